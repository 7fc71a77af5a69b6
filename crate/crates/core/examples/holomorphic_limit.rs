//! As the cones close up (t → 0) the theta function tends to the sign-kernel
//! sum, which is (4i)^m m! (∏(2j−1)!)² KW_m.

use superden::theta::{kw_constant, kw_numeric, limit_t_check, TauPoint};
use superden::verify::{kw_series, series_eval_at};

fn main() {
    let tau = TauPoint::new(0.0, 1.0).unwrap();
    let r = limit_t_check(1, tau, &[0.5, 0.2, 0.1, 0.05, 0.02], 1e-12).unwrap();
    for row in &r.rows {
        println!(
            "t = {:<5} error {:.3e} (radius {})",
            row.t, row.error, row.radius
        );
    }
    println!("observed order {:.2}", r.observed_order());

    let numeric = kw_numeric(1, tau, 1e-14).unwrap().value;
    let exact = series_eval_at(&kw_series(1, 400).unwrap(), tau)
        .unwrap()
        .value;
    println!("constant {}", kw_constant(1));
    println!("KW_1(i) numeric {numeric:.15}");
    println!("KW_1(i) series  {exact:.15}");
}

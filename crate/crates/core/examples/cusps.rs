//! Scaled magnitudes of KW_m approaching the cusps i∞, 0 and 1.

use superden::theta::cusp_behavior_check;

fn main() {
    let m = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(1);
    let r = cusp_behavior_check(m, &[1.0, 2.0, 4.0, 8.0], 1e-12).unwrap();
    println!(
        "{:>4} {:>14} {:>14} {:>14}",
        "v", "|KW(iv)|", "at 0", "at 1"
    );
    for row in &r.rows {
        println!(
            "{:>4} {:>14.6e} {:>14.6e} {:>14.6e}",
            row.v, row.infinity, row.zero, row.one
        );
    }
    println!(
        "expected exponent {}, fitted at ∞ {:.4}, at 1 {:.4}; spread at 0 {:.4}",
        r.expected_exponent, r.fitted_infinity, r.fitted_one, r.zero_spread
    );
}

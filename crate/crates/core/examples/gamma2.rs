//! KW_m under the generators τ ↦ τ+2 and τ ↦ τ/(2τ+1) of Γ(2).

use superden::theta::{gamma2_transform_check, TauPoint};

fn main() {
    for m in 1..=2 {
        for tau in [
            TauPoint::new(0.0, 1.0).unwrap(),
            TauPoint::new(0.3, 0.9).unwrap(),
        ] {
            let r = gamma2_transform_check(m, tau, 1e-8).unwrap();
            println!(
                "m = {m}, τ = {tau}: KW = {:.6e}, τ+2 {:.1e}, τ/(2τ+1) {:.1e}",
                r.kw_tau, r.translation, r.st2s
            );
        }
    }
}

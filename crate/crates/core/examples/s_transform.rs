//! θ(−1/τ) against (−τ)^{m+d} e^{2πiB(a,b)} θ_{−b,a}(τ).

use superden::theta::{s_transform_check, TauPoint, ThetaSpec};

fn main() {
    let spec = ThetaSpec::kw(1, 1.0).unwrap();
    for tau in ["i", "0.3333333333333333+0.5i", "-0.4+0.8i"] {
        let tau: TauPoint = tau.parse().unwrap();
        let r = s_transform_check(&spec, tau, 1e-12).unwrap();
        println!(
            "τ = {tau}: lhs {:.12} rhs {:.12} relative {:.1e}",
            r.lhs, r.rhs, r.relative
        );
    }
}

//! V_m is annihilated by the signature-(m, m) Laplacian.

use superden::mpoly::{is_spherical, laplacian_mm, vm_poly};

fn main() {
    for m in 1..=4 {
        let v = vm_poly(m);
        let (ok, degree) = is_spherical(&v);
        println!(
            "m = {m}: {} terms, degree {:?}, Δ V_m has {} terms, spherical = {ok}",
            v.num_terms(),
            degree,
            laplacian_mm(&v).num_terms(),
        );
    }
}

//! The error-function kernel is an eigenfunction of ℰ − Δ/4π.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use superden::kernel::{kernel_eval, sign_kernel, vigneras_residual, KernelSpec};
use superden::mpoly::{vm_poly, PointR2m};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for m in 1..=2 {
        let spec = KernelSpec::sign_limit(vm_poly(m), 1.0).unwrap();
        let worst = (0..20)
            .map(|_| {
                let x =
                    PointR2m::new((0..2 * m).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
                vigneras_residual(&spec, &x).unwrap()
            })
            .fold(0.0, f64::max);
        println!(
            "m = {m}, degree {}: max residual {worst:.2e}",
            spec.degree()
        );
    }

    // shrinking the cones sharpens the kernel towards the sign kernel
    let x = PointR2m::from_pairs(&[(1.0, 0.5)]).unwrap();
    for t in [1.0, 0.1, 0.01, 0.001] {
        let spec = KernelSpec::sign_limit(vm_poly(1), t).unwrap();
        println!("t = {t:<6} p(x) = {:.12}", kernel_eval(&spec, &x).unwrap());
    }
    println!("H(x)·xy    {:.12}", sign_kernel(&x) * 0.5);
}

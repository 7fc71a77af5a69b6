//! End-to-end acceptance suite. Every test prints one `PASS`/`FAIL` line
//! before asserting, so `cargo test --test acceptance -- --nocapture` reads as
//! a checklist.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use superden::exactq::{
    eta_quotient_theta, theta_triangle, triangle_product_form, triangle_series,
};
use superden::kernel::{vigneras_residual, KernelSpec};
use superden::mpoly::{laplacian_mm, vm_poly, MultiPoly, PointR2m};
use superden::theta::{
    cusp_behavior_check, gamma2_transform_check, holomorphic_limit_eval, kw_shifts, limit_t_check,
    s_transform_check, TauPoint, ThetaSpec,
};
use superden::verify::{
    kw_series, leading_key, series_eval_at, support_in_kw_progression, translation_phase_matches,
    truncation_for_terms, verify_identity, verify_identity_with, SignConvention,
};

fn outcome(id: u32, what: &str, ok: bool, detail: String) {
    println!(
        "{} [{id:02}] {what}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "[{id:02}] {what}: {detail}");
}

fn i() -> TauPoint {
    TauPoint::new(0.0, 1.0).unwrap()
}

#[test]
fn exact_identity_m1() {
    let start = Instant::now();
    let n = truncation_for_terms(1, 100);
    let r = verify_identity(1, n).unwrap();
    let took = start.elapsed();
    let ok = r.equal && r.terms_checked >= 100 && took <= Duration::from_secs(10);
    outcome(
        1,
        "exact identity m = 1",
        ok,
        format!(
            "N = {n}, equal = {}, {} nonzero terms, {took:.2?}",
            r.equal, r.terms_checked
        ),
    );
}

#[test]
fn exact_identity_m2() {
    let start = Instant::now();
    let n = truncation_for_terms(2, 40);
    let r = verify_identity(2, n).unwrap();
    let took = start.elapsed();
    let ok = r.equal && took <= Duration::from_secs(120);
    outcome(
        2,
        "exact identity m = 2",
        ok,
        format!(
            "N = {n}, equal = {}, {} nonzero terms, {took:.2?}",
            r.equal, r.terms_checked
        ),
    );
}

#[test]
fn eta_quotient_equals_theta_triangle() {
    let n = 16 * 50;
    let mismatch = theta_triangle(n).first_mismatch(&eta_quotient_theta(n));
    outcome(
        3,
        "eta quotient",
        mismatch.is_none(),
        format!("N = {n}, first mismatch {mismatch:?}"),
    );
}

#[test]
fn triangle_product_form_matches_series() {
    let n = 16 * 50;
    let mismatch = triangle_series(n).first_mismatch(&triangle_product_form(n));
    outcome(
        4,
        "triangle product form",
        mismatch.is_none(),
        format!("N = {n}, first mismatch {mismatch:?}"),
    );
}

#[test]
fn vm_is_spherical() {
    let mut detail = Vec::new();
    let mut ok = true;
    for m in 1..=4 {
        let lap = laplacian_mm(&vm_poly(m));
        ok &= lap.is_zero();
        detail.push(format!("m = {m}: {} terms", lap.num_terms()));
    }
    outcome(5, "Δ_m V_m = 0", ok, detail.join(", "));
}

fn worst_residual(f: MultiPoly, half: f64, seed: u64) -> f64 {
    let m = f.m();
    let spec = KernelSpec::sign_limit(f, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..20)
        .map(|_| {
            let x =
                PointR2m::new((0..2 * m).map(|_| rng.gen_range(-half..half)).collect()).unwrap();
            vigneras_residual(&spec, &x).unwrap()
        })
        .fold(0.0, f64::max)
}

#[test]
fn vigneras_eigenvalue() {
    let xy = &MultiPoly::x(1, 0) * &MultiPoly::y(1, 0);
    let r1 = worst_residual(xy, 3.0, 11);
    let r2 = worst_residual(vm_poly(2), 2.0, 12);
    outcome(
        6,
        "Vignéras eigenvalue",
        r1 <= 1e-7 && r2 <= 1e-6,
        format!("m = 1 (xy): {r1:.2e}, m = 2 (V_2): {r2:.2e}"),
    );
}

#[test]
fn theta_s_transform() {
    let spec = ThetaSpec::kw(1, 1.0).unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for tau in [i(), TauPoint::new(1.0 / 3.0, 0.5).unwrap()] {
        let r = s_transform_check(&spec, tau, 1e-12).unwrap();
        ok &= r.relative <= 1e-5;
        detail.push(format!("τ = {tau}: {:.2e}", r.relative));
    }
    outcome(7, "S-transform m = 1, f = xy, t = 1", ok, detail.join(", "));
}

#[test]
fn holomorphic_limit_convergence() {
    let r = limit_t_check(1, i(), &[0.5, 0.2, 0.1, 0.05], 1e-12).unwrap();
    let errors: Vec<String> = r
        .rows
        .iter()
        .map(|row| format!("{:.2e}", row.error))
        .collect();
    let ok = r.strictly_decreasing() && r.reduction() <= 1e-1;
    outcome(
        8,
        "holomorphic limit t → 0",
        ok,
        format!(
            "errors [{}], reduction {:.2e}, observed order {:.2}",
            errors.join(", "),
            r.reduction(),
            r.observed_order()
        ),
    );
}

#[test]
fn gamma2_laws() {
    let mut ok = true;
    let mut detail = Vec::new();
    for (m, tol) in [(1, 1e-5), (2, 1e-4)] {
        let r = gamma2_transform_check(m, i(), tol).unwrap();
        let s = kw_series(m, truncation_for_terms(m, 40)).unwrap();
        let exact = support_in_kw_progression(&s, m) && translation_phase_matches(m);
        ok &= r.translation <= tol && r.st2s <= tol && exact;
        detail.push(format!(
            "m = {m}: τ+2 {:.1e}, τ/(2τ+1) {:.1e}, series support {exact}",
            r.translation, r.st2s
        ));
    }
    outcome(9, "Γ(2) transforms", ok, detail.join("; "));
}

#[test]
fn cusp_behaviour() {
    let mut ok = true;
    let mut detail = Vec::new();
    for m in 1..=2 {
        let s = kw_series(m, leading_key(m)).unwrap();
        let lead = s.leading_term().map(|(k, c)| (k, c.to_string()));
        let lead_ok = lead == Some((leading_key(m), "1".to_string()));
        let r = cusp_behavior_check(m, &[1.0, 2.0, 4.0, 8.0], 1e-12).unwrap();
        let bounded = r.zero_spread <= 4.0 && r.rows.iter().all(|row| row.zero.is_finite());
        ok &= lead_ok && bounded;
        let mut line = format!(
            "m = {m}: leading {lead:?}, cusp-0 spread {:.3}",
            r.zero_spread
        );
        if m == 1 {
            let fit_ok = (r.fitted_one - r.expected_exponent).abs() <= 0.05;
            ok &= fit_ok;
            line += &format!(
                ", cusp-1 exponent {:.4} vs {}",
                r.fitted_one, r.expected_exponent
            );
        }
        detail.push(line);
    }
    outcome(10, "cusp behaviour", ok, detail.join("; "));
}

#[test]
fn exact_series_matches_numeric_limit() {
    let exact = series_eval_at(&kw_series(1, 400).unwrap(), i()).unwrap();
    let (a, b) = kw_shifts(1);
    let limit = holomorphic_limit_eval(&vm_poly(1), &a, &b, i(), 1e-14)
        .unwrap()
        .value;
    let numeric = limit / Complex64::new(0.0, 4.0);
    let rel = (exact.value - numeric).norm() / exact.value.norm();
    outcome(
        11,
        "exact series vs numeric limit",
        rel <= 1e-8,
        format!("relative {rel:.2e}, tail bound {:.1e}", exact.tail),
    );
}

#[test]
fn flipped_sign_is_detected() {
    let r = verify_identity_with(1, 160, SignConvention::Flipped).unwrap();
    // the expected location is q^{7/8}, key 14
    let ok = !r.equal && r.first_mismatch == Some(14);
    outcome(
        12,
        "negative control (flipped character)",
        ok,
        format!(
            "equal = {}, first mismatch at key {:?} (expected 14)",
            r.equal, r.first_mismatch
        ),
    );
}

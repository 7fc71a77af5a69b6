use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use superden::exactq::{theta_triangle, FracSeries};
use superden::kernel::{kernel_eval, sign_kernel, ConeVector, KernelSpec};
use superden::mpoly::{euler_op, laplacian_mm, vm_poly, FloatPoly, MultiPoly, PointR2m};
use superden::special::{beta_fn, error_e, error_e_deriv};
use superden::verify::{
    kw_series, kw_series_fulllattice, support_in_kw_progression, truncation_for_terms,
};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

prop_compose! {
    fn small_series()(
        terms in prop::collection::vec((0i64..40, -9i64..10, 1i64..5), 0..6),
        trunc in 20i64..60,
    ) -> FracSeries {
        FracSeries::from_terms(terms.into_iter().map(|(n, a, b)| (n, rat(a, b))), trunc)
    }
}

prop_compose! {
    fn small_poly(m: usize)(
        terms in prop::collection::vec(
            (prop::collection::vec(0u32..4, 2 * m), -5i64..6, 1i64..4),
            1..6,
        ),
    ) -> MultiPoly {
        let mut p = MultiPoly::zero(m);
        for (e, a, b) in terms {
            p.add_term(e, rat(a, b));
        }
        p
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn series_product_is_associative(a in small_series(), b in small_series(), c in small_series()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn series_product_distributes(a in small_series(), b in small_series(), c in small_series()) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    // recomputing with a larger truncation never changes a known coefficient
    #[test]
    fn truncation_is_sound(n in 6i64..200, extra in 1i64..120, power in 1u32..8) {
        // a power knows more than its base: compare on what the smaller run knows
        let lo = theta_triangle(n).pow(power);
        let hi = theta_triangle(n + extra).pow(power);
        prop_assert_eq!(hi.truncate(lo.truncation()).unwrap(), lo);
        let lo = kw_series(1, n).unwrap();
        let hi = kw_series(1, n + extra).unwrap();
        prop_assert_eq!(hi.truncate(n).unwrap(), lo);
    }

    #[test]
    fn vm_is_homogeneous(
        m in 1usize..=2,
        t in (-7i64..8, 1i64..5),
        xs in prop::collection::vec((-9i64..10, 1i64..4), 4),
    ) {
        let v = vm_poly(m);
        let t = rat(t.0, t.1);
        let x: Vec<BigRational> = xs[..2 * m].iter().map(|(a, b)| rat(*a, *b)).collect();
        let tx: Vec<BigRational> = x.iter().map(|c| c * &t).collect();
        let scale = num_traits::pow::pow(t, 2 * m * m);
        prop_assert_eq!(v.eval_rational(&tx).unwrap(), v.eval_rational(&x).unwrap() * scale);
    }

    #[test]
    fn vm_vanishes_on_repeated_squares(
        xs in prop::collection::vec((-9i64..10, 1i64..4), 6),
        i in 0usize..3,
        j in 0usize..3,
        flip in any::<bool>(),
        on_y in any::<bool>(),
    ) {
        prop_assume!(i != j);
        let mut x: Vec<BigRational> = xs.iter().map(|(a, b)| rat(*a, *b)).collect();
        let off = usize::from(on_y);
        let src = x[2 * i + off].clone();
        x[2 * j + off] = if flip { -src } else { src };
        prop_assert_eq!(vm_poly(3).eval_rational(&x).unwrap(), rat(0, 1));
    }

    // [Δ, ℰ] p = 2 Δ p
    #[test]
    fn laplacian_euler_commutator(p in small_poly(2)) {
        let lhs = &laplacian_mm(&euler_op(&p)) - &euler_op(&laplacian_mm(&p));
        let lap = laplacian_mm(&p);
        prop_assert_eq!(lhs, &lap + &lap);
    }

    #[test]
    fn directional_derivatives_commute(
        p in small_poly(2),
        c in (-3i64..4, 1i64..3),
        d in (-3i64..4, 1i64..3),
        k in 1u32..3,
        l in 1u32..3,
    ) {
        // keep the cone condition c2 > |c1|
        let a = ConeVector::new(rat(c.0, 4), rat(c.1, 1)).unwrap();
        let b = ConeVector::new(rat(d.0, 4), rat(d.1, 1)).unwrap();
        let ab = p.directional_derivative(&a, 0, k).unwrap().poly.directional_derivative(&b, 1, l).unwrap().poly;
        let ba = p.directional_derivative(&b, 1, l).unwrap().poly.directional_derivative(&a, 0, k).unwrap().poly;
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn tower_matches_finite_difference(k in 1u32..=6, z in -3.0f64..3.0) {
        let h = 1e-5;
        let below = |z: f64| if k == 1 { error_e(z) } else { error_e_deriv(k - 1, z).unwrap() };
        let fd = (below(z + h) - below(z - h)) / (2.0 * h);
        prop_assert!((fd - error_e_deriv(k, z).unwrap()).abs() <= 1e-6);
    }

    #[test]
    fn e_increasing_and_beta_decreasing(a in -2.5f64..2.5, gap in 1e-3f64..1.0) {
        prop_assert!(error_e(a + gap) > error_e(a));
        let lo = a.abs();
        prop_assert!(beta_fn(lo + gap).unwrap() < beta_fn(lo).unwrap());
    }

    #[test]
    fn e_gaussian_tail(z in 1.0f64..6.0) {
        prop_assert!((1.0 - error_e(z)).abs() <= (-std::f64::consts::PI * z * z).exp());
    }

    // E is odd, so p[f](−x) = (−1)^{m+d} p[f](x)
    #[test]
    fn kernel_parity(x in -3.0f64..3.0, y in -3.0f64..3.0, t in 0.2f64..2.0) {
        let pt = PointR2m::from_pairs(&[(x, y)]).unwrap();
        let neg = pt.neg();
        let odd = KernelSpec::sign_limit(&MultiPoly::x(1, 0) * &MultiPoly::y(1, 0), t).unwrap();
        let (a, b) = (kernel_eval(&odd, &pt).unwrap(), kernel_eval(&odd, &neg).unwrap());
        prop_assert!((a + b).abs() <= 1e-12 * (1.0 + a.abs()));
        let even = KernelSpec::sign_limit(MultiPoly::x(1, 0), t).unwrap();
        let (a, b) = (kernel_eval(&even, &pt).unwrap(), kernel_eval(&even, &neg).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    // off the lines x_j = ±y_j the kernel tends to the sign kernel times f
    #[test]
    fn sign_kernel_limit(pairs in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2)) {
        prop_assume!(pairs.iter().all(|(x, y)| (x - y).abs() > 0.2 && (x + y).abs() > 0.2));
        let pt = PointR2m::from_pairs(&pairs).unwrap();
        let f = vm_poly(2);
        let spec = KernelSpec::sign_limit(f.clone(), 1e-4).unwrap();
        let want = sign_kernel(&pt) * FloatPoly::from_exact(&f, 1.0).eval(pt.coords());
        let got = kernel_eval(&spec, &pt).unwrap();
        prop_assert!((got - want).abs() <= 1e-8 * (1.0 + want.abs()), "{got} vs {want}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn cone_and_full_lattice_forms_agree(n in 0i64..180) {
        prop_assert_eq!(kw_series(1, n).unwrap(), kw_series_fulllattice(1, n).unwrap());
    }

    #[test]
    fn kw_support(m in 1usize..=3, terms in 0i64..12) {
        let s = kw_series(m, truncation_for_terms(m, terms)).unwrap();
        prop_assert!(support_in_kw_progression(&s, m));
    }
}

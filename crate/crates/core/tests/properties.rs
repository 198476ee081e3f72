//! Property tests for the structural invariants: randomized inputs with
//! shrinking, complementing the fixed-oracle suites.

use num_complex::Complex64;
use proptest::prelude::*;

use hyperlab_core::excision::{nu, smooth_step};
use hyperlab_core::phasespace::{classify_zone, planck_h, PhaseParams, ZoneLabel};
use hyperlab_core::sobolev::{bessel_potential, sobolev_norm, GridFunction, SobolevIndex};
use hyperlab_core::weights::{WeightPair, WeightSpec};

fn bracket_weight() -> impl Strategy<Value = WeightSpec> {
    (0.0..=1.0_f64).prop_map(|k| WeightSpec::bracket_pow(k).unwrap())
}

proptest! {
    /// Concavity plus the triangle inequality: ⟨x+y⟩^κ ≤ ⟨x⟩^κ + ⟨y⟩^κ.
    #[test]
    fn weight_subadditive(
        w in bracket_weight(),
        x in -1e3..1e3_f64,
        y in -1e3..1e3_f64,
    ) {
        prop_assert!(w.eval(x + y) <= w.eval(x) + w.eval(y) + 1e-12 * w.eval(x + y));
        prop_assert!((w.eval(x) - w.eval(y)).abs() <= w.eval(x + y) * (1.0 + 1e-12));
    }

    /// Two-sided scaling: aΦ(x) ≤ Φ(ax) for a ≤ 1 and Φ(ax) ≤ aΦ(x) for a > 1.
    #[test]
    fn weight_scaling(
        w in bracket_weight(),
        x in -1e3..1e3_f64,
        a in 0.0..100.0_f64,
    ) {
        let (lhs, rhs) = if a <= 1.0 {
            (a * w.eval(x), w.eval(a * x))
        } else {
            (w.eval(a * x), a * w.eval(x))
        };
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    /// Weights never fall below one and grow with |x|.
    #[test]
    fn weight_floor_and_monotonicity(
        w in bracket_weight(),
        x in 0.0..1e3_f64,
        dx in 0.0..10.0_f64,
    ) {
        prop_assert!(w.eval(x) >= 1.0);
        prop_assert!(w.eval(x + dx) >= w.eval(x) - 1e-12);
        prop_assert!(w.eval(-x) == w.eval(x));
    }

    /// The cutoffs stay in [0, 1] and sit on their plateaus.
    #[test]
    fn cutoffs_bounded_with_plateaus(r in -5.0..5.0_f64) {
        let phi = smooth_step(r);
        prop_assert!((0.0..=1.0).contains(&phi));
        if r <= 1.0 { prop_assert_eq!(phi, 1.0); }
        if r >= 2.0 { prop_assert_eq!(phi, 0.0); }
        let v = nu(r);
        prop_assert!((0.0..=1.0).contains(&v));
        if r <= 0.0 { prop_assert_eq!(v, 0.0); }
        if r >= 1.0 { prop_assert_eq!(v, 1.0); }
    }

    /// Interior classification is monotone in time and the Planck function
    /// never exceeds one.
    #[test]
    fn zones_time_monotone(
        k in 1.0..10.0_f64,
        zone_n in 0.1..5.0_f64,
        x in -100.0..100.0_f64,
        xi in -100.0..100.0_f64,
        t in 0.0..2.0_f64,
        frac in 0.0..1.0_f64,
    ) {
        let pair = WeightPair::new(
            WeightSpec::bracket_pow(0.5).unwrap(),
            WeightSpec::bracket_pow(1.0).unwrap(),
        );
        let p = PhaseParams::new(k, zone_n, pair).unwrap();
        prop_assert!(planck_h(x, xi, &p) <= 1.0 + 1e-12);
        if classify_zone(t, x, xi, &p).unwrap() == ZoneLabel::Interior {
            prop_assert_eq!(
                classify_zone(t * frac, x, xi, &p).unwrap(),
                ZoneLabel::Interior
            );
        }
    }

    /// The fractional derivative of order s then −s is the identity.
    #[test]
    fn bessel_potential_inverts(
        s1 in -3.0..3.0_f64,
        k in 1.0..10.0_f64,
        seed in any::<u64>(),
    ) {
        let mut rng = hyperlab_core::numerics::rng::SplitMix64::new(seed);
        let v = GridFunction::from_fn(8.0, 64, |_| {
            Complex64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
        }).unwrap();
        let back = bessel_potential(&bessel_potential(&v, s1, k).unwrap(), -s1, k).unwrap();
        let worst = back
            .values()
            .iter()
            .zip(v.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0_f64, f64::max);
        prop_assert!(worst < 1e-9, "round-trip error {worst}");
    }

    /// Norms are monotone in both Sobolev indices.
    #[test]
    fn sobolev_norm_monotone(
        s1 in -2.0..2.0_f64,
        s2 in -2.0..2.0_f64,
        up1 in 0.0..2.0_f64,
        up2 in 0.0..2.0_f64,
        seed in any::<u64>(),
    ) {
        let mut rng = hyperlab_core::numerics::rng::SplitMix64::new(seed);
        let v = GridFunction::from_fn(10.0, 128, |x| {
            Complex64::new((-x * x / 5.0).exp() * rng.uniform(-1.0, 1.0), 0.0)
        }).unwrap();
        let phi = WeightSpec::bracket_pow(1.0).unwrap();
        let lo = sobolev_norm(&v, SobolevIndex::new(s1, s2), 1.5, phi).unwrap();
        let hi = sobolev_norm(&v, SobolevIndex::new(s1 + up1, s2 + up2), 1.5, phi).unwrap();
        prop_assert!(hi >= lo * (1.0 - 1e-11), "hi {hi} < lo {lo}");
    }
}

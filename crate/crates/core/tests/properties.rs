//! Property-based invariants over seeded random instances.

use mingeo_core::curves::{concatenate, length, reparametrize_constant_speed, sample, VERIFY_STEPS};
use mingeo_core::linalg::{log_pd, max_abs, pinch, schatten_norm, Hermitian, SchattenIndex, Unitary};
use mingeo_core::minimal::{
    is_minimal_hermitian_trace, is_unique_minimal_unitary, lift_positive, minimal_family_hermitian,
    DEFAULT_ENDPOINT_TOLERANCE,
};
use mingeo_core::random::{
    gaussian_hermitian, haar_unitary, hermitian_with_norm, random_invertible, random_positive, random_projection, rng,
    uniform,
};
use mingeo_core::spaces::{dist, geodesic};
use mingeo_core::verify::fixtures::{commuting_system, random_hermitian_curve};
use mingeo_core::verify::{check_araki_contraction, check_iemi};
use mingeo_core::{PositiveDefinite, SpaceTag};
use proptest::prelude::*;

fn index() -> impl Strategy<Value = SchattenIndex> {
    prop_oneof![
        Just(SchattenIndex::One),
        Just(SchattenIndex::Two),
        Just(SchattenIndex::Inf),
        (1.1f64..6.0).prop_map(SchattenIndex::Finite),
    ]
}

fn space() -> impl Strategy<Value = SpaceTag> {
    prop_oneof![
        Just(SpaceTag::Hermitian),
        Just(SpaceTag::Unitary),
        Just(SpaceTag::Positive),
        Just(SpaceTag::Grassmann),
    ]
}

/// Three random points of `space` in dimension `n`.
fn triple(space: SpaceTag, seed: u64, n: usize) -> [mingeo_core::CMat; 3] {
    let mut r = rng(seed);
    let rank = (n / 2).max(1);
    std::array::from_fn(|_| match space {
        SpaceTag::Hermitian => gaussian_hermitian(&mut r, n).into_matrix(),
        SpaceTag::Unitary => haar_unitary(&mut r, n).into_matrix(),
        SpaceTag::Positive => random_positive(&mut r, n).matrix().clone(),
        SpaceTag::Grassmann => random_projection(&mut r, n, rank).matrix().clone(),
    })
}

fn close(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distance_is_a_metric(sp in space(), p in index(), seed in any::<u64>(), n in 2usize..=5) {
        let [a, b, c] = triple(sp, seed, n);
        let ab = dist(sp, &a, &b, p).unwrap();
        let ba = dist(sp, &b, &a, p).unwrap();
        let bc = dist(sp, &b, &c, p).unwrap();
        let ac = dist(sp, &a, &c, p).unwrap();
        prop_assert!(close(ab, ba, 1e-9), "{ab} vs {ba}");
        prop_assert!(ac <= ab + bc + 1e-9 * (ab + bc).max(1.0));
        prop_assert!(dist(sp, &a, &a, p).unwrap() < 1e-9);
    }

    #[test]
    fn unitary_distance_is_bi_invariant(p in index(), seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        let u = haar_unitary(&mut r, n);
        let v = haar_unitary(&mut r, n);
        let w = haar_unitary(&mut r, n);
        let d = dist(SpaceTag::Unitary, u.matrix(), v.matrix(), p).unwrap();
        let left = dist(SpaceTag::Unitary, w.mul(&u).matrix(), w.mul(&v).matrix(), p).unwrap();
        let right = dist(SpaceTag::Unitary, u.mul(&w).matrix(), v.mul(&w).matrix(), p).unwrap();
        prop_assert!(close(d, left, 1e-9) && close(d, right, 1e-9), "{d} {left} {right}");
    }

    #[test]
    fn positive_distance_is_congruence_invariant(p in index(), seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let a = random_positive(&mut r, n);
        let b = random_positive(&mut r, n);
        let g = random_invertible(&mut r, n);
        let ga = &g * a.matrix() * g.adjoint();
        let gb = &g * b.matrix() * g.adjoint();
        let d = dist(SpaceTag::Positive, a.matrix(), b.matrix(), p).unwrap();
        let moved = dist(SpaceTag::Positive, &ga, &gb, p).unwrap();
        prop_assert!(close(d, moved, 1e-8), "{d} vs {moved}");
    }

    #[test]
    fn geodesic_length_equals_distance_and_concatenation_adds(
        sp in space(), p in index(), seed in any::<u64>(), n in 2usize..=4
    ) {
        let [a, b, _] = triple(sp, seed, n);
        let g = geodesic(sp, &a, &b).unwrap();
        let whole = sample(&g, 128).unwrap();
        let d = dist(sp, &a, &b, p).unwrap();
        // unitary and Grassmann intervals are measured by chords, which
        // undershoot the arc by O(h^2)
        let rtol = match sp {
            SpaceTag::Hermitian | SpaceTag::Positive => 1e-9,
            _ => 1e-4,
        };
        prop_assert!(close(length(&whole, p).length, d, rtol));

        let mid = g.eval(0.5);
        let first = sample(&geodesic(sp, &a, &mid).unwrap(), 64).unwrap();
        let second = sample(&geodesic(sp, &mid, &b).unwrap(), 64).unwrap();
        let joined = concatenate(&first, &second, p).unwrap();
        let (l1, l2) = (length(&first, p).length, length(&second, p).length);
        prop_assert!(close(length(&joined, p).length, l1 + l2, 1e-12));
        prop_assert!(close(l1 + l2, d, rtol));
    }

    #[test]
    fn reparametrization_keeps_length(p in index(), seed in any::<u64>(), n in 2usize..=4) {
        let c = random_hermitian_curve(seed, n, VERIFY_STEPS).unwrap();
        let before = length(&c, p).length;
        let resampled = reparametrize_constant_speed(&c, p).unwrap();
        let report = length(&resampled, p);
        // resampling along chords cuts corners, which can only shorten
        prop_assert!(report.length <= before * (1.0 + 1e-12));
        prop_assert!(close(report.length, before, 1e-3), "{} vs {before}", report.length);
        prop_assert!(report.max_speed_deviation <= 1e-3 * report.length, "{}", report.max_speed_deviation);
        prop_assert!(max_abs(&(resampled.end() - c.end())) < 1e-12);
    }

    #[test]
    fn trace_family_length_is_seed_invariant(seed in any::<u64>(), other in any::<u64>(), n in 2usize..=5, segments in 1usize..=5) {
        let mut r = rng(seed);
        let d = gaussian_hermitian(&mut r, n);
        let expected = schatten_norm(d.matrix(), SchattenIndex::One);
        for s in [seed, other] {
            let member = minimal_family_hermitian(&d, s, segments).unwrap();
            let c = sample(&member.generator, 256).unwrap();
            let l = length(&c, SchattenIndex::One).length;
            prop_assert!(close(l, expected, 1e-9), "{l} vs {expected}");
            prop_assert!(is_minimal_hermitian_trace(&c, DEFAULT_ENDPOINT_TOLERANCE).unwrap().supported());
        }
    }

    #[test]
    fn positive_lift_inverts_under_log(seed in any::<u64>(), n in 2usize..=4) {
        let c = random_hermitian_curve(seed, n, 32).unwrap();
        let lifted = lift_positive(&c).unwrap();
        for (orig, up) in c.points.iter().zip(&lifted.points) {
            let back = log_pd(&PositiveDefinite::new(up.clone()).unwrap());
            prop_assert!(max_abs(&(back.matrix() - orig)) < 1e-8);
        }
    }

    #[test]
    fn uniqueness_is_conjugation_invariant(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        let u = haar_unitary(&mut r, n);
        let v = haar_unitary(&mut r, n);
        let w = haar_unitary(&mut r, n);
        let conj = |x: &Unitary| w.mul(x).mul(&w.adjoint());
        let a = is_unique_minimal_unitary(&u, &v).unwrap();
        let b = is_unique_minimal_unitary(&conj(&u), &conj(&v)).unwrap();
        prop_assert_eq!(a.unique, b.unique);
    }

    #[test]
    fn pinching_contracts_every_norm(p in index(), seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        let d = gaussian_hermitian(&mut r, n);
        let system = commuting_system(seed, &d).unwrap();
        let m = gaussian_hermitian(&mut r, n).into_matrix();
        let pinched = pinch(&system, &m).unwrap();
        prop_assert!(schatten_norm(&pinched, p) <= schatten_norm(&m, p) * (1.0 + 1e-12));
    }

    #[test]
    fn exponential_metric_increasing(p in index(), seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let h_norm = uniform(&mut r, 0.0, 3.0);
        let h: Hermitian = hermitian_with_norm(&mut r, n, h_norm);
        let k = gaussian_hermitian(&mut r, n);
        prop_assert!(check_iemi(&h, &k, p).unwrap().passed);
    }

    #[test]
    fn araki_contraction(p in index(), seed in any::<u64>(), n in 2usize..=4, t in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let c = random_positive(&mut r, n);
        let d = random_positive(&mut r, n);
        prop_assert!(check_araki_contraction(&c, &d, t, p).unwrap().passed);
    }
}

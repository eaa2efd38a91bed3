//! Cross-module invariants checked through the public API only.

use num_traits::Signed;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use towerdyn::conditions::{classify, ksc_failure_certificate, Property};
use towerdyn::lp::{apply_op, frechet, lp_norm_p, SimpleFunction, Term};
use towerdyn::rational::{pow2, powi, ratio};
use towerdyn::{sample, DyadicSet, LeveledSet, Rational, TowerSystem};

fn systems() -> Vec<TowerSystem> {
    vec![TowerSystem::bdp(), TowerSystem::geometric(ratio(3, 4)).unwrap(), TowerSystem::identity_like()]
}

fn simple_from_seed(seed: u64) -> SimpleFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = sample::below(&mut rng, 4) + 1;
    SimpleFunction::new((0..k).map(|_| Term {
        level: sample::below(&mut rng, 21) as i64 - 10,
        set: sample::dyadic_set(&mut rng, 5),
        coeff: sample::coefficient(&mut rng, 3, 4),
    }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// `‖T_f^n φ‖_p^p` against `Σ |a|^p μ(f^{-n}(A_a))` computed by pushing the level sets.
    #[test]
    fn norm_of_orbit_equals_pushed_measures(seed in any::<u64>(), n in -60i64..=60, p in 1u32..=3, which in 0usize..3) {
        let sys = &systems()[which];
        let phi = simple_from_seed(seed);
        let lhs = lp_norm_p(sys, &apply_op(&phi, n), p).unwrap();
        let mut rhs = Rational::default();
        for t in phi.terms() {
            let pushed = LeveledSet::single(t.level, t.set.clone()).push(-n);
            rhs += powi(&t.coeff.abs(), p as u64) * sys.measure(&pushed);
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pushes_compose(seed in any::<u64>(), n in -200i64..=200, m in -200i64..=200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sample::leveled_set(&mut rng, -50..=50, 4, 6);
        prop_assert_eq!(s.push(n).push(m), s.push(n + m));
        let sys = TowerSystem::bdp();
        let direct: Rational = s.iter().map(|(p, fiber)| sys.density(p + n).integrate(fiber)).sum();
        prop_assert_eq!(sys.measure(&s.push(n)), direct);
    }

    #[test]
    fn frechet_zero_iff_equal(seed in any::<u64>(), other in any::<u64>()) {
        let sys = TowerSystem::bdp();
        let (a, b) = (simple_from_seed(seed), simple_from_seed(other));
        let d = frechet(&sys, &a, &b).value;
        prop_assert_eq!(d == Rational::default(), a == b);
        prop_assert_eq!(d, frechet(&sys, &b, &a).value);
    }
}

/// Re-derives each certificate step from raw densities, without the certificate code.
#[test]
fn certificate_steps_reverify_independently() {
    let sys = TowerSystem::bdp();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..40 {
        let c = sample::dyadic_set_with_holes(&mut rng, 7, 30);
        let b = LeveledSet::single(0, c.clone());
        let cert = ksc_failure_certificate(&sys, &b, 7).unwrap();
        assert!(cert.verified);
        for s in &cert.steps {
            let cell = DyadicSet::grid_cell(s.n, s.j);
            let overlap = c.intersect(&cell).lebesgue();
            assert_eq!(overlap, s.overlap);
            assert!(overlap >= c.lebesgue() * pow2(-(s.n as i64)));
            let mu = sys.density(s.k_n).integrate(&c);
            assert_eq!(mu, s.measure);
            assert!(mu >= pow2(s.n as i64) * &overlap);
            assert!(pow2(s.n as i64) * &overlap >= c.lebesgue());
        }
    }
}

#[test]
fn classification_respects_implications() {
    for sys in systems() {
        let r = classify(&sys, 60).unwrap();
        let chain = [Property::Kitai, Property::Mixing, Property::WeaklyMixing, Property::Hypercyclic, Property::Recurrent];
        for (i, strong) in chain.iter().enumerate() {
            for weak in &chain[i + 1..] {
                if r.label(*strong).verdict.holds() {
                    assert!(r.label(*weak).verdict.holds(), "{}: {strong} holds but {weak} does not", sys.name());
                }
                if r.label(*weak).verdict.fails() {
                    assert!(r.label(*strong).verdict.fails(), "{}: {weak} fails but {strong} does not", sys.name());
                }
            }
        }
    }
}

#[test]
fn reports_serialize_rationals_as_num_den() {
    let r = classify(&TowerSystem::bdp(), 40).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["schema"], towerdyn::REPORT_SCHEMA);
    for c in v["conditions"].as_array().unwrap() {
        for key in ["achieved", "target"] {
            let s = c[key].as_str().unwrap();
            let (num, den) = s.split_once('/').unwrap();
            assert!(num.parse::<i64>().is_ok() && den.parse::<u64>().is_ok(), "{s}");
        }
    }
    assert_eq!(r.to_json(), classify(&TowerSystem::bdp(), 40).unwrap().to_json());
}

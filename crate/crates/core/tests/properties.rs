use std::sync::OnceLock;

use num_traits::{One, Zero};
use proptest::prelude::*;

use kstar_lab::bounds::{divergence, eq1_cases, expected_distance_sum, random_measure, DistanceKind};
use kstar_lab::enumeration::enumerate_witnesses;
use kstar_lab::kstar::{kstar_upper, sandwich_values};
use kstar_lab::machine::{run, MachineState, Opcode};
use kstar_lab::nu::NuContext;
use kstar_lab::rational::{pow2, ratio};
use kstar_lab::strings;
use kstar_lab::{Budget, Estimator, MachineKind, MeasureRegistry, MeasureSpec, Predictor, SearchBudget, Semimeasure};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small() -> &'static Estimator {
    static E: OnceLock<Estimator> = OnceLock::new();
    E.get_or_init(|| Estimator::new(SearchBudget::new(12, 500).unwrap()))
}

fn large() -> &'static Estimator {
    static E: OnceLock<Estimator> = OnceLock::new();
    E.get_or_init(|| Estimator::new(SearchBudget::new(15, 2000).unwrap()))
}

fn registry() -> &'static MeasureRegistry {
    static R: OnceLock<MeasureRegistry> = OnceLock::new();
    R.get_or_init(|| {
        MeasureRegistry::from_specs([
            MeasureSpec::uniform(2),
            MeasureSpec::iid(vec![ratio(1, 4), ratio(3, 4)]),
            MeasureSpec::zeros_then_ones(3),
        ])
        .unwrap()
    })
}

fn predictor() -> &'static Predictor<'static> {
    static P: OnceLock<Predictor<'static>> = OnceLock::new();
    P.get_or_init(|| Predictor::new(registry(), large()).unwrap())
}

fn bits(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, 0..=max)
}

fn opcode() -> impl Strategy<Value = Opcode> {
    (0u8..8).prop_map(|n| Opcode::from_bits(&[n >> 2, (n >> 1) & 1, n & 1]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn estimates_tighten_with_budget(x in bits(4)) {
        let (a, b) = (small(), large());
        prop_assert!(b.k_upper(&x, None).unwrap().value <= a.k_upper(&x, None).unwrap().value);
        prop_assert!(b.km_upper(&x).value <= a.km_upper(&x).value);
        prop_assert!(b.big_m(&x).value >= a.big_m(&x).value);
    }

    #[test]
    fn monotone_complexity_below_prefix_complexity(x in bits(4)) {
        let e = large();
        let km = e.km_upper(&x).value;
        prop_assert!(km <= e.k_upper(&x, None).unwrap().value);
        if let Some(k) = km.finite() {
            prop_assert!(e.km_solomonoff(&x) <= k as f64 + 1e-9);
        }
    }

    #[test]
    fn big_m_is_a_semimeasure(x in bits(7)) {
        let e = small();
        let parent = e.big_m(&x).value;
        let kids = e.big_m(&[x.as_slice(), &[0]].concat()).value + e.big_m(&[x.as_slice(), &[1]].concat()).value;
        prop_assert!(kids <= parent);
        prop_assert!(parent <= num_rational::BigRational::one());
    }

    #[test]
    fn kstar_never_grows_under_prolongation(y in bits(3), x in bits(3), z in bits(2)) {
        let e = small();
        let xz = [x.as_slice(), &z].concat();
        prop_assert!(kstar_upper(e, &y, &xz).unwrap().value <= kstar_upper(e, &y, &x).unwrap().value);
    }

    #[test]
    fn sandwich_has_zero_constants(y in bits(3), x in bits(3)) {
        let s = sandwich_values(small(), &y, &x).unwrap();
        prop_assert!(s.conditional <= s.kstar);
        prop_assert!(s.kstar <= s.unconditional);
    }

    #[test]
    fn emitted_output_only_grows(ops in prop::collection::vec(opcode(), 0..12), cond in bits(4)) {
        for kind in [MachineKind::Monotone, MachineKind::TwicePrefix, MachineKind::CondLengthAware] {
            let c = kind.takes_condition().then_some(cond.as_slice());
            let mut state = MachineState::new(kind, c, Budget::steps(200));
            for &op in &ops {
                let before = state.output().to_vec();
                let done = state.exec(op);
                prop_assert!(state.output().starts_with(&before));
                if done.is_some() {
                    break;
                }
            }
        }
    }

    #[test]
    fn proper_measures_are_additive(seed in any::<u64>(), alphabet in 2usize..4, x in prop::collection::vec(0u8..2, 0..4)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = random_measure(&mut rng, alphabet, true);
        let parent = mu.prob(&x);
        let mut kids = num_rational::BigRational::zero();
        for a in 0..alphabet as u8 {
            kids += mu.prob(&[x.as_slice(), &[a]].concat());
        }
        prop_assert_eq!(kids, parent);
    }

    #[test]
    fn divergence_grows_with_horizon(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = random_measure(&mut rng, 2, true);
        let rho = random_measure(&mut rng, 2, false);
        let mut last = 0.0;
        for n in 1..=5 {
            let d = divergence(&mu, &rho, &[], n).unwrap();
            prop_assert!(d >= last - 1e-12);
            last = d;
        }
    }

    #[test]
    fn distances_below_divergence(seed in any::<u64>()) {
        for c in eq1_cases(1, seed) {
            let d = divergence(&c.mu, &c.rho, &c.past, c.n).unwrap();
            for kind in DistanceKind::all(c.mu.alphabet()) {
                let lhs = expected_distance_sum(&c.mu, &c.rho, &c.past, c.n, &kind).unwrap();
                prop_assert!(lhs >= -1e-12);
                prop_assert!(lhs <= d + 1e-9, "{} {} > {}", kind.name(), lhs, d);
            }
        }
    }

    #[test]
    fn lambda_is_dyadic_and_monotone(z in bits(3), a in 0u8..2, t in 0usize..3, d in -3i64..=2) {
        let nu = NuContext::new(registry(), predictor(), 4).unwrap();
        let l = nu.lambda_coeff(&z, t, d).unwrap();
        let mut za = z.clone();
        za.push(a);
        let la = nu.lambda_coeff(&za, t, d).unwrap();
        prop_assert!(la >= l);
        for v in [l, la] {
            prop_assert!(v.is_zero() || (v.numer().is_one() && (v.denom() & (v.denom() - 1u8)).is_zero()));
        }
    }
}

#[test]
fn witnesses_replay_exactly() {
    for kind in [MachineKind::Prefix, MachineKind::TwicePrefix, MachineKind::CondLengthAware] {
        let cond = kind.takes_condition().then_some(&[1u8, 0][..]);
        let set = enumerate_witnesses(kind, cond, 12, 500).unwrap();
        for w in &set.witnesses {
            let out = run(kind, &w.program, cond, Budget::steps(500));
            assert_eq!(out.output, w.output);
            assert_eq!(out.consumed_condition, w.k);
            assert_eq!(out.steps, w.steps);
            assert_eq!(out.consumed_program, w.program.len());
        }
    }
}

#[test]
fn witness_sets_grow_with_budget() {
    for kind in [MachineKind::Prefix, MachineKind::TwicePrefix] {
        let cond = kind.takes_condition().then_some(&[0u8][..]);
        let small = enumerate_witnesses(kind, cond, 9, 5).unwrap();
        let large = enumerate_witnesses(kind, cond, 12, 500).unwrap();
        for w in &small.witnesses {
            assert!(large.witnesses.contains(w));
        }
    }
}

#[test]
fn output_kraft_sum_at_most_one() {
    let e = large();
    let mut total = num_rational::BigRational::zero();
    for y in strings::all_strings_upto(2, 5) {
        if let Some(k) = e.k_upper(&y, None).unwrap().value.finite() {
            total += pow2(-(k as i64));
        }
    }
    assert!(total <= num_rational::BigRational::one());
}

#[test]
fn zoo_weights_satisfy_kraft() {
    assert!(predictor().zoo().weight_sum() <= num_rational::BigRational::one());
}

//! Property tests against the brute-force oracle and algebraic laws.

mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use prccsl::clock::Trace;
use prccsl::expr::{delay_for, eval_expr, periodic_on, ClockExpr};
use prccsl::lang::{parse, pretty_print};
use prccsl::monitor::{
    check_relations, MonitorState, Outcome, RelationKind, RelationSpec, SampleSize, Threshold,
};
use prccsl::trace_io::{read_trace, write_trace};

use common::*;

fn columns(max_clocks: usize, max_len: usize) -> impl Strategy<Value = Vec<Vec<bool>>> {
    (0..=max_len, 1..=max_clocks).prop_flat_map(|(n, c)| {
        prop::collection::vec(
            (0.0..=1.0f64)
                .prop_flat_map(move |p| prop::collection::vec(prop::bool::weighted(p), n)),
            c,
        )
    })
}

fn trace_of(cols: &[Vec<bool>]) -> Trace {
    let named: Vec<(&str, Vec<bool>)> = CLOCKS.iter().copied().zip(cols.iter().cloned()).collect();
    Trace::from_columns(&named).expect("valid columns")
}

fn km(kind: RelationKind, a: &[bool], b: &[bool]) -> (u64, u64) {
    let trace = Trace::from_columns(&[("a", a.to_vec()), ("b", b.to_vec())]).expect("columns");
    let spec = RelationSpec {
        id: "r".into(),
        kind,
        left: ClockExpr::clock("a"),
        right: ClockExpr::clock("b"),
        threshold: Threshold::ONE,
        sample_size: SampleSize::WholeTrace,
    };
    let v = check_relations(&[spec], &trace).remove(0).expect("builds");
    (v.k, v.m)
}

fn pair(max_len: usize) -> impl Strategy<Value = (Vec<bool>, Vec<bool>)> {
    (0..=max_len).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(any::<bool>(), n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn monitors_match_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trace = random_trace(&mut rng, 128);
        let specs: Vec<RelationSpec> = RelationKind::ALL
            .into_iter()
            .map(|kind| RelationSpec {
                id: kind.name().into(),
                kind,
                left: random_expr(&mut rng, &trace, 2),
                right: random_expr(&mut rng, &trace, 2),
                threshold: Threshold::ONE,
                sample_size: SampleSize::WholeTrace,
            })
            .collect();
        for (spec, v) in specs.iter().zip(check_relations(&specs, &trace)) {
            let v = v.unwrap();
            let want = oracle_relation(
                spec.kind,
                &oracle_expr(&spec.left, &trace),
                &oracle_expr(&spec.right, &trace),
                trace.len(),
            );
            prop_assert_eq!((v.k, v.m), want, "{}", spec);
        }
    }

    #[test]
    fn expressions_match_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trace = random_trace(&mut rng, 128);
        let e = random_expr(&mut rng, &trace, 4);
        prop_assert_eq!(dates_of(&eval_expr(&e, &trace).unwrap()), oracle_expr(&e, &trace), "{}", e);
    }

    #[test]
    fn precedence_is_stricter_than_causality((a, b) in pair(128)) {
        let (kc, mc) = km(RelationKind::Causality, &a, &b);
        let (kp, mp) = km(RelationKind::Precedence, &a, &b);
        prop_assert_eq!(kc, kp);
        prop_assert!(mp <= mc);
    }

    #[test]
    fn coincidence_and_exclusion_partition((a, b) in pair(128)) {
        let (kc, mc) = km(RelationKind::Coincidence, &a, &b);
        let (ke, me) = km(RelationKind::Exclusion, &a, &b);
        prop_assert_eq!(kc, ke);
        prop_assert_eq!(mc + me, kc);
    }

    #[test]
    fn every_clock_is_a_subclock_of_ms(a in prop::collection::vec(any::<bool>(), 0..200)) {
        let (k, m) = km(RelationKind::Subclock, &a, &vec![true; a.len()]);
        prop_assert_eq!(k, m);
    }

    #[test]
    fn m_never_exceeds_k((a, b) in pair(128), idx in 0..5usize) {
        let (k, m) = km(RelationKind::ALL[idx], &a, &b);
        prop_assert!(m <= k);
    }

    #[test]
    fn verdict_is_monotone_in_threshold(
        k in 1..1000u64,
        frac in 0.0..=1.0f64,
        p in 0..=1000u64,
        q in 0..=1000u64,
    ) {
        let m = (k as f64 * frac) as u64;
        let (lo, hi) = (p.min(q), p.max(q));
        let at = |num| Threshold::new(num, 3).unwrap().accepts(m, k);
        prop_assert!(!at(hi) || at(lo));
    }

    #[test]
    fn fixed_sample_freezes_at_n(a in prop::collection::vec(any::<bool>(), 0..200), n in 1..50u64) {
        let mut s = MonitorState::new(RelationKind::Subclock, SampleSize::Fixed(n));
        for &t in &a {
            s.observe_subclock(t, true);
        }
        let ticks = a.iter().filter(|&&t| t).count() as u64;
        prop_assert_eq!(s.k(), ticks.min(n));
        prop_assert_eq!(s.is_frozen(), ticks >= n);
        let v = s.finalize("r", Threshold::ONE);
        prop_assert_eq!(v.outcome == Outcome::Vacuous, ticks == 0);
    }

    #[test]
    fn periodic_output_is_subclock_of_base(base in prop::collection::vec(any::<bool>(), 0..200), p in 1..8u64) {
        let out = periodic_on(&base, p).unwrap();
        prop_assert!(out.iter().zip(&base).all(|(&o, &b)| !o || b));
        prop_assert_eq!(dates_of(&out), oracle_periodic(&dates_of(&base), p));
    }

    #[test]
    fn delay_output_is_subclock_of_ref((base, reference) in pair(200), d in 1..8u64) {
        let out = delay_for(&base, d, &reference).unwrap();
        prop_assert!(out.iter().zip(&reference).all(|(&o, &r)| !o || r));
        prop_assert_eq!(dates_of(&out), oracle_delay(&dates_of(&base), d, &dates_of(&reference)));
    }

    #[test]
    fn trace_csv_round_trip(cols in columns(4, 64)) {
        let trace = trace_of(&cols);
        let bytes = write_trace(&trace, Vec::new()).unwrap();
        let back = read_trace(bytes.as_slice()).unwrap();
        prop_assert_eq!(back, trace);
    }

    #[test]
    fn spec_print_parse_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ast = random_spec(&mut rng);
        let text = pretty_print(&ast);
        let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back.without_positions(), ast);
        prop_assert_eq!(pretty_print(&back), text);
    }

    #[test]
    fn threshold_display_round_trip(
        (num, scale) in (0..=6u32).prop_flat_map(|s| (0..=10u64.pow(s), Just(s)))
    ) {
        let t = Threshold::new(num, scale).unwrap();
        prop_assert_eq!(t.to_string().parse::<Threshold>().unwrap(), t);
    }
}

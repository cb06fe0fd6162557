//! Streaming monitors for the five probabilistic relations.
//!
//! A monitor counts `k`, the steps at which the relation is observed, and
//! `m`, the observations at which it holds. The relation is valid when
//! `m / k >= p`, compared exactly in integer arithmetic.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::clock::{Alphabet, TickSet, Trace};
use crate::expr::{ClockExpr, ExprError, ExprGraph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationKind {
    Subclock,
    Coincidence,
    Exclusion,
    Causality,
    Precedence,
}

impl RelationKind {
    pub const ALL: [RelationKind; 5] = [
        RelationKind::Subclock,
        RelationKind::Coincidence,
        RelationKind::Exclusion,
        RelationKind::Causality,
        RelationKind::Precedence,
    ];

    /// Operator keyword in the specification language.
    pub fn keyword(self) -> &'static str {
        match self {
            RelationKind::Subclock => "subclockof",
            RelationKind::Coincidence => "coincides",
            RelationKind::Exclusion => "excludes",
            RelationKind::Causality => "causes",
            RelationKind::Precedence => "precedes",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        RelationKind::ALL
            .into_iter()
            .find(|k| k.keyword().eq_ignore_ascii_case(word))
    }

    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Subclock => "subclock",
            RelationKind::Coincidence => "coincidence",
            RelationKind::Exclusion => "exclusion",
            RelationKind::Causality => "causality",
            RelationKind::Precedence => "precedence",
        }
    }

    /// Whether `(t1, h1, t2, h2)` is an observation, and whether it succeeds.
    #[inline]
    pub fn judge(self, t1: bool, h1: u64, t2: bool, h2: u64) -> (bool, bool) {
        match self {
            RelationKind::Subclock => (t1, t1 && t2),
            RelationKind::Coincidence => (t1 || t2, t1 && t2),
            RelationKind::Exclusion => (t1 || t2, t1 != t2),
            RelationKind::Causality => (t1, t1 && h1 >= h2),
            RelationKind::Precedence => (t1, t1 && h1 >= h2 && !(h1 == h2 && t2)),
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThresholdError {
    #[error("malformed decimal {0:?}")]
    Malformed(String),
    #[error("threshold out of range: {0}")]
    OutOfRange(String),
    #[error("too many decimal places in {0:?}")]
    TooPrecise(String),
}

const MAX_SCALE: u32 = 18;

/// Probability threshold `num / 10^scale`, kept exact and without trailing
/// zeros, so `0.9` and `0.90` are the same value and print as `0.9`.
#[derive(Debug, Clone, Copy)]
pub struct Threshold {
    num: u64,
    scale: u32,
}

impl Threshold {
    pub const ONE: Threshold = Threshold { num: 1, scale: 0 };
    pub const ZERO: Threshold = Threshold { num: 0, scale: 0 };

    pub fn new(num: u64, scale: u32) -> Result<Self, ThresholdError> {
        if scale > MAX_SCALE {
            return Err(ThresholdError::TooPrecise(format!("{num}e-{scale}")));
        }
        let (mut num, mut scale) = (num, scale);
        while scale > 0 && num % 10 == 0 {
            num /= 10;
            scale -= 1;
        }
        let t = Threshold { num, scale };
        if u128::from(num) > t.denominator() {
            return Err(ThresholdError::OutOfRange(t.to_string()));
        }
        Ok(t)
    }

    pub fn numerator(self) -> u64 {
        self.num
    }

    pub fn denominator(self) -> u128 {
        10u128.pow(self.scale)
    }

    pub fn scale(self) -> u32 {
        self.scale
    }

    /// `m / k >= self`, exactly. False when `k == 0`.
    pub fn accepts(self, m: u64, k: u64) -> bool {
        k > 0 && u128::from(m) * self.denominator() >= u128::from(self.num) * u128::from(k)
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.denominator() as f64
    }

    /// `num/den` with the fraction reduced.
    pub fn fraction(self) -> String {
        let den = self.denominator();
        let g = gcd(u128::from(self.num), den);
        format!("{}/{}", u128::from(self.num) / g, den / g)
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl PartialEq for Threshold {
    fn eq(&self, other: &Self) -> bool {
        u128::from(self.num) * other.denominator() == u128::from(other.num) * self.denominator()
    }
}

impl Eq for Threshold {}

impl PartialOrd for Threshold {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Threshold {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (u128::from(self.num) * other.denominator())
            .cmp(&(u128::from(other.num) * self.denominator()))
    }
}

impl FromStr for Threshold {
    type Err = ThresholdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || ThresholdError::Malformed(s.to_string());
        let (int, frac) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int.is_empty() && frac.is_empty() {
            return Err(malformed());
        }
        if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let frac = frac.trim_end_matches('0');
        let int = int.trim_start_matches('0');
        if int.len() > 1 || (int == "1" && !frac.is_empty()) || (!int.is_empty() && int != "1") {
            return Err(ThresholdError::OutOfRange(s.to_string()));
        }
        if int == "1" {
            return Ok(Threshold::ONE);
        }
        if frac.len() > MAX_SCALE as usize {
            return Err(ThresholdError::TooPrecise(s.to_string()));
        }
        let num = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| malformed())?
        };
        Threshold::new(num, frac.len() as u32)
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 0 {
            return write!(f, "{}", self.num);
        }
        let den = self.denominator();
        let n = u128::from(self.num);
        let frac = format!("{:0width$}", n % den, width = self.scale as usize);
        write!(f, "{}.{}", n / den, frac)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SampleSize {
    #[default]
    WholeTrace,
    Fixed(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSpec {
    pub id: String,
    pub kind: RelationKind,
    pub left: ClockExpr,
    pub right: ClockExpr,
    pub threshold: Threshold,
    pub sample_size: SampleSize,
}

impl fmt::Display for RelationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |e: &ClockExpr| {
            if e.is_atomic() {
                e.to_string()
            } else {
                format!("({e})")
            }
        };
        write!(
            f,
            "{}: {} {} {} prob >= {}",
            self.id,
            side(&self.left),
            self.kind.keyword(),
            side(&self.right),
            self.threshold
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Valid,
    Fail,
    Vacuous,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Valid => "valid",
            Outcome::Fail => "fail",
            Outcome::Vacuous => "vacuous",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub id: String,
    pub kind: RelationKind,
    pub k: u64,
    pub m: u64,
    pub threshold: Threshold,
    pub outcome: Outcome,
}

impl Verdict {
    pub fn probability(&self) -> Option<f64> {
        (self.k > 0).then(|| self.m as f64 / self.k as f64)
    }

    /// `m/k`, unreduced.
    pub fn fraction(&self) -> String {
        format!("{}/{}", self.m, self.k)
    }

    pub fn is_valid(&self) -> bool {
        self.outcome == Outcome::Valid
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Running,
    Done(Outcome),
}

/// Counters of one relation.
#[derive(Debug, Clone)]
pub struct MonitorState {
    kind: RelationKind,
    sample_size: SampleSize,
    k: u64,
    m: u64,
    steps: u64,
    frozen: bool,
    outcome: Option<Outcome>,
}

impl MonitorState {
    pub fn new(kind: RelationKind, sample_size: SampleSize) -> Self {
        MonitorState {
            kind,
            sample_size,
            k: 0,
            m: 0,
            steps: 0,
            frozen: matches!(sample_size, SampleSize::Fixed(0)),
            outcome: None,
        }
    }

    pub fn kind(&self) -> RelationKind {
        self.kind
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// Steps observed before the counters froze.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// True once the sample size is reached; further observations are ignored.
    pub fn is_frozen(&self) -> bool {
        self.frozen || self.outcome.is_some()
    }

    pub fn phase(&self) -> Phase {
        match self.outcome {
            Some(o) => Phase::Done(o),
            None => Phase::Running,
        }
    }

    /// Feeds one step. `h1`, `h2` are histories before this step's ticks.
    pub fn observe(&mut self, t1: bool, h1: u64, t2: bool, h2: u64) {
        if self.is_frozen() {
            return;
        }
        let (obs, ok) = self.kind.judge(t1, h1, t2, h2);
        self.steps += 1;
        self.k += u64::from(obs);
        self.m += u64::from(ok);
        if let SampleSize::Fixed(n) = self.sample_size {
            if self.k >= n {
                self.frozen = true;
            }
        }
    }

    fn observe_as(&mut self, kind: RelationKind, t1: bool, h1: u64, t2: bool, h2: u64) {
        debug_assert_eq!(self.kind, kind, "monitor kind mismatch");
        self.observe(t1, h1, t2, h2);
    }

    pub fn observe_subclock(&mut self, t1: bool, t2: bool) {
        self.observe_as(RelationKind::Subclock, t1, 0, t2, 0);
    }

    pub fn observe_coincidence(&mut self, t1: bool, t2: bool) {
        self.observe_as(RelationKind::Coincidence, t1, 0, t2, 0);
    }

    pub fn observe_exclusion(&mut self, t1: bool, t2: bool) {
        self.observe_as(RelationKind::Exclusion, t1, 0, t2, 0);
    }

    pub fn observe_causality(&mut self, t1: bool, h1: u64, t2: bool, h2: u64) {
        self.observe_as(RelationKind::Causality, t1, h1, t2, h2);
    }

    pub fn observe_precedence(&mut self, t1: bool, h1: u64, t2: bool, h2: u64) {
        self.observe_as(RelationKind::Precedence, t1, h1, t2, h2);
    }

    /// Settles the outcome. Calling it again returns the same verdict.
    pub fn finalize(&mut self, id: &str, threshold: Threshold) -> Verdict {
        let outcome = *self.outcome.get_or_insert_with(|| {
            if self.k == 0 {
                Outcome::Vacuous
            } else if threshold.accepts(self.m, self.k) {
                Outcome::Valid
            } else {
                Outcome::Fail
            }
        });
        Verdict {
            id: id.to_string(),
            kind: self.kind,
            k: self.k,
            m: self.m,
            threshold,
            outcome,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("relation {id}: {source}")]
pub struct CheckError {
    pub id: String,
    #[source]
    pub source: ExprError,
}

#[derive(Debug)]
struct Slot {
    spec: RelationSpec,
    left: NodeId,
    right: NodeId,
    state: MonitorState,
}

/// Single-pass checker for a set of relations.
///
/// Relations whose operands cannot be built over the alphabet are reported
/// as errors by [`Checker::finish`]; the others are checked normally.
#[derive(Debug)]
pub struct Checker {
    graph: ExprGraph,
    slots: Vec<Result<Slot, CheckError>>,
}

impl Checker {
    pub fn new(alphabet: Alphabet, specs: impl IntoIterator<Item = RelationSpec>) -> Self {
        let mut graph = ExprGraph::new(alphabet);
        let slots = specs
            .into_iter()
            .map(|spec| {
                let nodes = graph
                    .add(&spec.left)
                    .and_then(|l| Ok((l, graph.add(&spec.right)?)));
                match nodes {
                    Ok((left, right)) => Ok(Slot {
                        state: MonitorState::new(spec.kind, spec.sample_size),
                        spec,
                        left,
                        right,
                    }),
                    Err(source) => Err(CheckError {
                        id: spec.id,
                        source,
                    }),
                }
            })
            .collect();
        Checker { graph, slots }
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.graph.alphabet()
    }

    pub fn steps(&self) -> u64 {
        self.graph.steps()
    }

    pub fn step(&mut self, ticks: &TickSet) {
        self.graph.evaluate(ticks);
        let g = &self.graph;
        for slot in self.slots.iter_mut().flatten() {
            slot.state.observe(
                g.tick(slot.left),
                g.history(slot.left),
                g.tick(slot.right),
                g.history(slot.right),
            );
        }
    }

    /// True when every relation has reached its sample size.
    pub fn all_frozen(&self) -> bool {
        self.slots.iter().flatten().all(|s| s.state.is_frozen())
    }

    pub fn finish(self) -> Vec<Result<Verdict, CheckError>> {
        self.slots
            .into_iter()
            .map(|slot| slot.map(|mut s| s.state.finalize(&s.spec.id, s.spec.threshold)))
            .collect()
    }
}

/// Checks `specs` over `trace` in one forward pass.
pub fn check_relations(specs: &[RelationSpec], trace: &Trace) -> Vec<Result<Verdict, CheckError>> {
    let mut checker = Checker::new(trace.alphabet().clone(), specs.iter().cloned());
    for ticks in trace.steps() {
        checker.step(&ticks);
    }
    checker.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(kind: RelationKind, a: &[usize], b: &[usize], n: usize) -> (u64, u64) {
        let trace = Trace::from_dates(&[("a", a), ("b", b)], n).unwrap();
        let spec = RelationSpec {
            id: "t".into(),
            kind,
            left: ClockExpr::clock("a"),
            right: ClockExpr::clock("b"),
            threshold: Threshold::ONE,
            sample_size: SampleSize::WholeTrace,
        };
        let v = check_relations(&[spec], &trace).pop().unwrap().unwrap();
        (v.k, v.m)
    }

    #[test]
    fn subclock_seven_six() {
        let c1 = [1, 5, 9, 13, 17, 21, 25];
        let c2 = [1, 5, 9, 13, 17, 21];
        assert_eq!(run(RelationKind::Subclock, &c1, &c2, 30), (7, 6));
        assert_eq!(run(RelationKind::Subclock, &[], &c2, 30), (0, 0));
    }

    #[test]
    fn coincidence_examples() {
        assert_eq!(run(RelationKind::Coincidence, &[0, 2], &[2, 4], 6), (3, 1));
        assert_eq!(run(RelationKind::Coincidence, &[1, 3], &[1, 3], 6), (2, 2));
        assert_eq!(
            run(
                RelationKind::Coincidence,
                &[0, 1, 2, 3, 4],
                &[5, 6, 7, 8, 9],
                10
            ),
            (10, 0)
        );
    }

    #[test]
    fn exclusion_examples() {
        let even: Vec<usize> = (0..10).step_by(2).collect();
        let odd: Vec<usize> = (1..10).step_by(2).collect();
        assert_eq!(run(RelationKind::Exclusion, &even, &odd, 10), (10, 10));
        assert_eq!(run(RelationKind::Exclusion, &even, &even, 10), (5, 0));
        assert_eq!(run(RelationKind::Exclusion, &[0, 1], &[1, 2], 4), (3, 2));
    }

    #[test]
    fn causality_examples() {
        assert_eq!(
            run(RelationKind::Causality, &[0, 2, 4], &[1, 3, 5], 6),
            (3, 3)
        );
        assert_eq!(run(RelationKind::Causality, &[1], &[0], 3), (1, 0));
        assert_eq!(
            run(RelationKind::Causality, &[0, 3, 4], &[0, 3, 4], 6),
            (3, 3)
        );
    }

    #[test]
    fn precedence_examples() {
        assert_eq!(
            run(RelationKind::Precedence, &[0, 2, 4], &[1, 3, 5], 6),
            (3, 3)
        );
        assert_eq!(
            run(RelationKind::Precedence, &[0, 3, 4], &[0, 3, 4], 6),
            (3, 0)
        );
        assert_eq!(run(RelationKind::Precedence, &[0], &[0], 1), (1, 0));
    }

    #[test]
    fn threshold_drops_trailing_zeros() {
        let t = Threshold::new(940, 3).unwrap();
        assert_eq!((t.numerator(), t.scale()), (94, 2));
        assert_eq!(t.to_string(), "0.94");
        assert_eq!(Threshold::new(100, 2).unwrap().to_string(), "1");
    }

    #[test]
    fn finalize_exact_threshold() {
        let mut s = MonitorState::new(RelationKind::Subclock, SampleSize::WholeTrace);
        for (t1, t2) in [(true, true); 6].into_iter().chain([(true, false)]) {
            s.observe_subclock(t1, t2);
        }
        let p95: Threshold = "0.95".parse().unwrap();
        let p85: Threshold = "0.85".parse().unwrap();
        assert_eq!(s.clone().finalize("x", p95).outcome, Outcome::Fail);
        assert_eq!(s.clone().finalize("x", p85).outcome, Outcome::Valid);
        let first = s.finalize("x", p85);
        assert_eq!(
            s.finalize("x", p95),
            Verdict {
                threshold: p95,
                ..first
            }
        );
    }

    #[test]
    fn vacuous_when_unobserved() {
        let mut s = MonitorState::new(RelationKind::Causality, SampleSize::WholeTrace);
        s.observe_causality(false, 0, true, 0);
        let v = s.finalize("x", Threshold::ZERO);
        assert_eq!(v.outcome, Outcome::Vacuous);
        assert_eq!(v.probability(), None);
    }

    #[test]
    fn sample_size_freezes() {
        let mut s = MonitorState::new(RelationKind::Subclock, SampleSize::Fixed(3));
        for t2 in [true, true, true, false, false] {
            s.observe_subclock(true, t2);
        }
        assert_eq!((s.k(), s.m()), (3, 3));
        assert!(s.is_frozen());
        assert_eq!(s.steps(), 3);
    }

    #[test]
    fn threshold_parsing() {
        let t: Threshold = "0.95".parse().unwrap();
        assert_eq!((t.numerator(), t.denominator()), (95, 100));
        assert_eq!(t.fraction(), "19/20");
        assert_eq!(t.to_string(), "0.95");
        assert_eq!("0.950".parse::<Threshold>().unwrap(), t);
        assert_eq!("1".parse::<Threshold>().unwrap(), Threshold::ONE);
        assert_eq!("1.000".parse::<Threshold>().unwrap(), Threshold::ONE);
        assert_eq!("0".parse::<Threshold>().unwrap(), Threshold::ZERO);
        assert_eq!(".5".parse::<Threshold>().unwrap().to_string(), "0.5");
        assert_eq!("0.05".parse::<Threshold>().unwrap().to_string(), "0.05");
        assert!(matches!(
            "1.5".parse::<Threshold>(),
            Err(ThresholdError::OutOfRange(_))
        ));
        assert!(matches!(
            "2".parse::<Threshold>(),
            Err(ThresholdError::OutOfRange(_))
        ));
        assert!(matches!(
            "1.01".parse::<Threshold>(),
            Err(ThresholdError::OutOfRange(_))
        ));
        assert!(matches!(
            "-0.5".parse::<Threshold>(),
            Err(ThresholdError::Malformed(_))
        ));
        assert!(matches!(
            ".".parse::<Threshold>(),
            Err(ThresholdError::Malformed(_))
        ));
        assert!(matches!(
            "".parse::<Threshold>(),
            Err(ThresholdError::Malformed(_))
        ));
        assert!("0.1234567890123456789".parse::<Threshold>().is_err());
    }

    #[test]
    fn errors_are_isolated() {
        let trace = Trace::from_dates(&[("a", &[0usize][..])], 2).unwrap();
        let mk = |id: &str, right: &str| RelationSpec {
            id: id.into(),
            kind: RelationKind::Subclock,
            left: ClockExpr::clock("a"),
            right: ClockExpr::clock(right),
            threshold: Threshold::ONE,
            sample_size: SampleSize::WholeTrace,
        };
        let out = check_relations(&[mk("bad", "nope"), mk("good", "ms")], &trace);
        assert_eq!(out[0].as_ref().unwrap_err().id, "bad");
        assert!(out[1].as_ref().unwrap().is_valid());
        assert!(check_relations(&[], &trace).is_empty());
    }

    #[test]
    fn keywords_round_trip() {
        for k in RelationKind::ALL {
            assert_eq!(RelationKind::from_keyword(k.keyword()), Some(k));
        }
        assert_eq!(
            RelationKind::from_keyword("PRECEDES"),
            Some(RelationKind::Precedence)
        );
    }
}

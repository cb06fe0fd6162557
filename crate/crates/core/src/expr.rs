//! Clock expressions: derived clocks computed from existing ones.
//!
//! Every operator is a step-by-step transformer reading the tick and the
//! pre-tick history of its operands at the current step:
//!
//! * `PeriodicOn base p` ticks with `base` whenever `h_base(i)` is a multiple
//!   of `p`, i.e. on the 1st, (p+1)-th, (2p+1)-th ... tick of `base`.
//! * `base DelayFor d on ref` keeps a FIFO of pending delays; each tick of
//!   `base` enqueues `d`, each later tick of `ref` counts every pending element
//!   down, and the result ticks (with `ref`) when the head reaches zero. A `ref`
//!   tick at the same step as the enqueueing `base` tick does not count.
//! * `Inf(a, b)` ticks when the clock that is ahead (or level) ticks; its k-th
//!   tick is at the earlier of the k-th ticks of `a` and `b`.
//! * `Sup(a, b)` ticks when the clock that is behind catches up; its k-th
//!   tick is at the later of the k-th ticks of `a` and `b`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::clock::{Alphabet, ClockError, ClockId, TickSet, Trace, UNIVERSAL_CLOCK};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("period must be at least 1")]
    ZeroPeriod,
    #[error("delay must be at least 1")]
    ZeroDelay,
    #[error("operand lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error(transparent)]
    Clock(#[from] ClockError),
}

/// Derived-clock expression tree. Children are shared, so a tree built from
/// named definitions is a DAG.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ClockExpr {
    Ref(ClockId),
    PeriodicOn {
        base: Arc<ClockExpr>,
        period: u64,
    },
    DelayFor {
        base: Arc<ClockExpr>,
        delay: u64,
        reference: Arc<ClockExpr>,
    },
    Inf(Arc<ClockExpr>, Arc<ClockExpr>),
    Sup(Arc<ClockExpr>, Arc<ClockExpr>),
}

impl ClockExpr {
    /// Reference to a named clock. Panics on an invalid identifier; use
    /// [`ClockExpr::Ref`] with a checked [`ClockId`] for untrusted input.
    pub fn clock(name: &str) -> Self {
        ClockExpr::Ref(ClockId::new(name).expect("valid clock name"))
    }

    pub fn ms() -> Self {
        ClockExpr::Ref(ClockId::universal())
    }

    pub fn periodic_on(self, period: u64) -> Self {
        ClockExpr::PeriodicOn {
            base: Arc::new(self),
            period,
        }
    }

    pub fn delay_for(self, delay: u64, reference: ClockExpr) -> Self {
        ClockExpr::DelayFor {
            base: Arc::new(self),
            delay,
            reference: Arc::new(reference),
        }
    }

    pub fn inf(a: ClockExpr, b: ClockExpr) -> Self {
        ClockExpr::Inf(Arc::new(a), Arc::new(b))
    }

    pub fn sup(a: ClockExpr, b: ClockExpr) -> Self {
        ClockExpr::Sup(Arc::new(a), Arc::new(b))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, ClockExpr::Ref(_))
    }

    /// Checks `period >= 1` and `delay >= 1` throughout the tree.
    pub fn validate(&self) -> Result<(), ExprError> {
        match self {
            ClockExpr::Ref(_) => Ok(()),
            ClockExpr::PeriodicOn { base, period } => {
                if *period == 0 {
                    return Err(ExprError::ZeroPeriod);
                }
                base.validate()
            }
            ClockExpr::DelayFor {
                base,
                delay,
                reference,
            } => {
                if *delay == 0 {
                    return Err(ExprError::ZeroDelay);
                }
                base.validate()?;
                reference.validate()
            }
            ClockExpr::Inf(a, b) | ClockExpr::Sup(a, b) => {
                a.validate()?;
                b.validate()
            }
        }
    }

    /// Clock names referenced anywhere in the tree, with repeats.
    pub fn clocks(&self) -> Vec<&ClockId> {
        let mut out = Vec::new();
        self.collect_clocks(&mut out);
        out
    }

    fn collect_clocks<'a>(&'a self, out: &mut Vec<&'a ClockId>) {
        match self {
            ClockExpr::Ref(c) => out.push(c),
            ClockExpr::PeriodicOn { base, .. } => base.collect_clocks(out),
            ClockExpr::DelayFor {
                base, reference, ..
            } => {
                base.collect_clocks(out);
                reference.collect_clocks(out);
            }
            ClockExpr::Inf(a, b) | ClockExpr::Sup(a, b) => {
                a.collect_clocks(out);
                b.collect_clocks(out);
            }
        }
    }
}

struct Operand<'a>(&'a ClockExpr);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_atomic() {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

impl fmt::Display for ClockExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClockExpr::Ref(c) => write!(f, "{c}"),
            ClockExpr::PeriodicOn { base, period } => {
                write!(f, "periodicon {} period {period}", Operand(base))
            }
            ClockExpr::DelayFor {
                base,
                delay,
                reference,
            } => write!(
                f,
                "{} delayfor {delay} on {}",
                Operand(base),
                Operand(reference)
            ),
            ClockExpr::Inf(a, b) => write!(f, "inf({a}, {b})"),
            ClockExpr::Sup(a, b) => write!(f, "sup({a}, {b})"),
        }
    }
}

/// Streaming state of `PeriodicOn`.
#[derive(Debug, Clone)]
pub struct PeriodicState {
    period: u64,
    seen: u64,
}

impl PeriodicState {
    pub fn new(period: u64) -> Result<Self, ExprError> {
        if period == 0 {
            return Err(ExprError::ZeroPeriod);
        }
        Ok(PeriodicState { period, seen: 0 })
    }

    pub fn step(&mut self, base: bool) -> bool {
        let fire = base && self.seen.is_multiple_of(self.period);
        self.seen += u64::from(base);
        fire
    }
}

/// Pending-delay FIFO of `DelayFor`.
///
/// Elements are stored as the `ref` tick count at which they expire, so a
/// `ref` tick costs O(1) amortized instead of decrementing every element.
#[derive(Debug, Clone)]
pub struct DelayQueue {
    delay: u64,
    ref_seen: u64,
    due: VecDeque<u64>,
}

impl DelayQueue {
    pub fn new(delay: u64) -> Result<Self, ExprError> {
        if delay == 0 {
            return Err(ExprError::ZeroDelay);
        }
        Ok(DelayQueue {
            delay,
            ref_seen: 0,
            due: VecDeque::new(),
        })
    }

    pub fn step(&mut self, base: bool, reference: bool) -> bool {
        let mut fire = false;
        if reference {
            self.ref_seen += 1;
            while self.due.front() == Some(&self.ref_seen) {
                self.due.pop_front();
                fire = true;
            }
        }
        if base {
            self.due.push_back(self.ref_seen + self.delay);
        }
        fire
    }

    /// Remaining `ref` ticks of each pending element, head first.
    pub fn pending(&self) -> impl Iterator<Item = u64> + '_ {
        self.due.iter().map(|d| d - self.ref_seen)
    }

    pub fn len(&self) -> usize {
        self.due.len()
    }

    pub fn is_empty(&self) -> bool {
        self.due.is_empty()
    }
}

#[inline]
pub fn inf_step(t1: bool, h1: u64, t2: bool, h2: u64) -> bool {
    (t1 && h1 >= h2) || (t2 && h2 >= h1)
}

#[inline]
pub fn sup_step(t1: bool, h1: u64, t2: bool, h2: u64) -> bool {
    (t1 && h1 < h2) || (t2 && h2 < h1) || (t1 && t2 && h1 == h2)
}

fn same_len(a: &[bool], b: &[bool]) -> Result<(), ExprError> {
    if a.len() != b.len() {
        return Err(ExprError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

pub fn periodic_on(base: &[bool], period: u64) -> Result<Vec<bool>, ExprError> {
    let mut state = PeriodicState::new(period)?;
    Ok(base.iter().map(|&t| state.step(t)).collect())
}

pub fn delay_for(base: &[bool], delay: u64, reference: &[bool]) -> Result<Vec<bool>, ExprError> {
    same_len(base, reference)?;
    let mut queue = DelayQueue::new(delay)?;
    Ok(base
        .iter()
        .zip(reference)
        .map(|(&b, &r)| queue.step(b, r))
        .collect())
}

fn combine(
    a: &[bool],
    b: &[bool],
    op: fn(bool, u64, bool, u64) -> bool,
) -> Result<Vec<bool>, ExprError> {
    same_len(a, b)?;
    let (mut h1, mut h2) = (0u64, 0u64);
    Ok(a.iter()
        .zip(b)
        .map(|(&t1, &t2)| {
            let out = op(t1, h1, t2, h2);
            h1 += u64::from(t1);
            h2 += u64::from(t2);
            out
        })
        .collect())
}

pub fn inf_clock(a: &[bool], b: &[bool]) -> Result<Vec<bool>, ExprError> {
    combine(a, b, inf_step)
}

pub fn sup_clock(a: &[bool], b: &[bool]) -> Result<Vec<bool>, ExprError> {
    combine(a, b, sup_step)
}

/// Derived tick sequence of `expr` over `trace`.
pub fn eval_expr(expr: &ClockExpr, trace: &Trace) -> Result<Vec<bool>, ExprError> {
    let mut graph = ExprGraph::new(trace.alphabet().clone());
    let node = graph.add(expr)?;
    let mut out = Vec::with_capacity(trace.len());
    for ticks in trace.steps() {
        graph.evaluate(&ticks);
        out.push(graph.tick(node));
    }
    Ok(out)
}

/// Handle to a node of an [`ExprGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(usize);

#[derive(Debug, Clone)]
enum NodeKind {
    Clock(usize),
    Universal,
    Periodic {
        base: usize,
        period: u64,
    },
    Delay {
        base: usize,
        reference: usize,
        queue: DelayQueue,
    },
    Inf(usize, usize),
    Sup(usize, usize),
}

#[derive(Debug, Clone)]
struct Node {
    kind: NodeKind,
    tick: bool,
    history: u64,
}

/// Streaming evaluator for a set of expressions over one clock alphabet.
///
/// Structurally equal sub-expressions are evaluated once. Nodes are stored
/// children-first, so one pass in index order evaluates a step. After
/// [`ExprGraph::evaluate`] for step `i`, [`ExprGraph::tick`] is `t(i)` and
/// [`ExprGraph::history`] is the pre-tick `h(i)`.
///
/// A reference to `ms` that is not part of the alphabet resolves to a
/// built-in clock ticking at every step.
#[derive(Debug, Clone)]
pub struct ExprGraph {
    alphabet: Alphabet,
    nodes: Vec<Node>,
    memo: HashMap<ClockExpr, usize>,
    dirty: bool,
    steps: u64,
}

impl ExprGraph {
    pub fn new(alphabet: Alphabet) -> Self {
        ExprGraph {
            alphabet,
            nodes: Vec::new(),
            memo: HashMap::new(),
            dirty: false,
            steps: 0,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Adds `expr` (and its sub-expressions) and returns its node. Must be
    /// called before the first step.
    pub fn add(&mut self, expr: &ClockExpr) -> Result<NodeId, ExprError> {
        assert_eq!(
            self.steps, 0,
            "expressions must be added before evaluation starts"
        );
        self.add_inner(expr).map(NodeId)
    }

    fn add_inner(&mut self, expr: &ClockExpr) -> Result<usize, ExprError> {
        if let Some(&id) = self.memo.get(expr) {
            return Ok(id);
        }
        let kind = match expr {
            ClockExpr::Ref(c) => match self.alphabet.lookup(c) {
                Some(i) => NodeKind::Clock(i),
                None if c.as_str() == UNIVERSAL_CLOCK => NodeKind::Universal,
                None => return Err(ClockError::Undeclared(c.to_string()).into()),
            },
            ClockExpr::PeriodicOn { base, period } => {
                if *period == 0 {
                    return Err(ExprError::ZeroPeriod);
                }
                NodeKind::Periodic {
                    base: self.add_inner(base)?,
                    period: *period,
                }
            }
            ClockExpr::DelayFor {
                base,
                delay,
                reference,
            } => {
                let queue = DelayQueue::new(*delay)?;
                NodeKind::Delay {
                    base: self.add_inner(base)?,
                    reference: self.add_inner(reference)?,
                    queue,
                }
            }
            ClockExpr::Inf(a, b) => NodeKind::Inf(self.add_inner(a)?, self.add_inner(b)?),
            ClockExpr::Sup(a, b) => NodeKind::Sup(self.add_inner(a)?, self.add_inner(b)?),
        };
        let id = self.nodes.len();
        self.nodes.push(Node {
            kind,
            tick: false,
            history: 0,
        });
        self.memo.insert(expr.clone(), id);
        Ok(id)
    }

    /// Computes every node's tick for the next step.
    pub fn evaluate(&mut self, ticks: &TickSet) {
        if self.dirty {
            for n in &mut self.nodes {
                n.history += u64::from(n.tick);
            }
        }
        for i in 0..self.nodes.len() {
            let tick = match &self.nodes[i].kind {
                NodeKind::Clock(c) => ticks.contains(*c),
                NodeKind::Universal => true,
                NodeKind::Periodic { base, period } => {
                    let b = &self.nodes[*base];
                    b.tick && b.history.is_multiple_of(*period)
                }
                NodeKind::Delay {
                    base, reference, ..
                } => {
                    let (b, r) = (self.nodes[*base].tick, self.nodes[*reference].tick);
                    match &mut self.nodes[i].kind {
                        NodeKind::Delay { queue, .. } => queue.step(b, r),
                        _ => unreachable!(),
                    }
                }
                NodeKind::Inf(a, b) => {
                    let (a, b) = (&self.nodes[*a], &self.nodes[*b]);
                    inf_step(a.tick, a.history, b.tick, b.history)
                }
                NodeKind::Sup(a, b) => {
                    let (a, b) = (&self.nodes[*a], &self.nodes[*b]);
                    sup_step(a.tick, a.history, b.tick, b.history)
                }
            };
            self.nodes[i].tick = tick;
        }
        self.dirty = true;
        self.steps += 1;
    }

    pub fn tick(&self, node: NodeId) -> bool {
        self.nodes[node.0].tick
    }

    pub fn history(&self, node: NodeId) -> u64 {
        self.nodes[node.0].history
    }

    /// Steps evaluated so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(n: usize, dates: &[usize]) -> Vec<bool> {
        let mut v = vec![false; n];
        for &d in dates {
            v[d] = true;
        }
        v
    }

    fn dates(v: &[bool]) -> Vec<usize> {
        v.iter()
            .enumerate()
            .filter_map(|(i, &t)| t.then_some(i))
            .collect()
    }

    #[test]
    fn periodic_on_ms_period_50() {
        let ms = vec![true; 150];
        assert_eq!(dates(&periodic_on(&ms, 50).unwrap()), vec![0, 50, 100]);
    }

    #[test]
    fn periodic_on_edge_cases() {
        let base = col(10, &[1, 4, 7]);
        assert_eq!(periodic_on(&base, 1).unwrap(), base);
        assert_eq!(periodic_on(&[false; 6], 3).unwrap(), vec![false; 6]);
        assert_eq!(periodic_on(&[], 3).unwrap(), Vec::<bool>::new());
        assert_eq!(periodic_on(&base, 0), Err(ExprError::ZeroPeriod));
    }

    #[test]
    fn delay_for_single_and_fifo() {
        let ms = vec![true; 8];
        assert_eq!(dates(&delay_for(&col(8, &[0]), 3, &ms).unwrap()), vec![3]);
        assert_eq!(
            dates(&delay_for(&col(8, &[0, 1]), 2, &ms).unwrap()),
            vec![2, 3]
        );
        assert_eq!(
            dates(&delay_for(&[false; 8], 2, &ms).unwrap()),
            Vec::<usize>::new()
        );
        assert_eq!(delay_for(&col(8, &[0]), 0, &ms), Err(ExprError::ZeroDelay));
    }

    #[test]
    fn delay_for_drops_pending_at_end() {
        let ms = vec![true; 5];
        assert_eq!(
            dates(&delay_for(&col(5, &[1, 3]), 3, &ms).unwrap()),
            vec![4]
        );
    }

    #[test]
    fn delay_queue_pending_counts() {
        let mut q = DelayQueue::new(3).unwrap();
        q.step(true, true);
        q.step(true, true);
        assert_eq!(q.pending().collect::<Vec<_>>(), vec![2, 3]);
        q.step(false, false);
        assert_eq!(q.pending().collect::<Vec<_>>(), vec![2, 3]);
        assert!(!q.step(false, true));
        assert!(q.step(false, true));
        assert_eq!(q.len(), 1);
    }

    #[test]
    fn inf_sup_examples() {
        let n = 8;
        let a = col(n, &[1, 2]);
        let b = col(n, &[3, 4]);
        assert_eq!(dates(&inf_clock(&a, &b).unwrap()), vec![1, 2]);
        assert_eq!(dates(&sup_clock(&a, &b).unwrap()), vec![3, 4]);
        let a = col(n, &[1, 5]);
        let b = col(n, &[2, 3]);
        assert_eq!(dates(&inf_clock(&a, &b).unwrap()), vec![1, 3]);
        assert_eq!(dates(&sup_clock(&a, &b).unwrap()), vec![2, 5]);
        assert_eq!(inf_clock(&a, &a).unwrap(), a);
        assert_eq!(sup_clock(&a, &a).unwrap(), a);
        assert!(matches!(
            inf_clock(&a, &b[..3]),
            Err(ExprError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn graph_shares_structurally_equal_nodes() {
        let alphabet = Alphabet::from_names(["a", "b"]).unwrap();
        let mut g = ExprGraph::new(alphabet);
        let e1 = ClockExpr::inf(ClockExpr::clock("a"), ClockExpr::clock("b"));
        let e2 = ClockExpr::inf(ClockExpr::clock("a"), ClockExpr::clock("b"));
        let n1 = g.add(&e1).unwrap();
        let n2 = g.add(&e2).unwrap();
        assert_eq!(n1, n2);
        assert_eq!(g.node_count(), 3);
    }

    #[test]
    fn graph_rejects_undeclared() {
        let mut g = ExprGraph::new(Alphabet::from_names(["a"]).unwrap());
        assert!(matches!(
            g.add(&ClockExpr::clock("zz")),
            Err(ExprError::Clock(ClockError::Undeclared(_)))
        ));
        // ms is implicit
        assert!(g.add(&ClockExpr::ms()).is_ok());
    }

    #[test]
    fn eval_ref_and_nested_sup() {
        let trace = Trace::from_dates(
            &[
                ("a", &[1usize, 6][..]),
                ("b", &[2, 3][..]),
                ("c", &[0, 7][..]),
            ],
            9,
        )
        .unwrap();
        let a = eval_expr(&ClockExpr::clock("a"), &trace).unwrap();
        assert_eq!(a, trace.column_by_name("a").unwrap());
        // k-th date = max of the k-th dates: max(1,2,0)=2, max(6,3,7)=7
        let e = ClockExpr::sup(
            ClockExpr::sup(ClockExpr::clock("a"), ClockExpr::clock("b")),
            ClockExpr::clock("c"),
        );
        assert_eq!(dates(&eval_expr(&e, &trace).unwrap()), vec![2, 7]);
    }

    #[test]
    fn display_is_parenthesized() {
        let e = ClockExpr::clock("obstc").delay_for(500, ClockExpr::ms());
        assert_eq!(e.to_string(), "obstc delayfor 500 on ms");
        let e = ClockExpr::ms()
            .periodic_on(50)
            .delay_for(2, ClockExpr::ms());
        assert_eq!(e.to_string(), "(periodicon ms period 50) delayfor 2 on ms");
    }
}

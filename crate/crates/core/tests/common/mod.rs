//! Brute-force reference evaluator and random input generators shared by the
//! integration tests. Everything here works on sorted date lists and
//! recomputes histories from scratch at every step.

#![allow(dead_code)]

use prccsl::clock::Trace;
use prccsl::expr::ClockExpr;
use prccsl::lang::{Expr, ExprKind, Ident, Setting, SpecFile, Stmt};
use prccsl::monitor::{RelationKind, Threshold};
use rand::Rng;

/// Sorted step indices at which a clock ticks.
pub type Dates = Vec<usize>;

/// Ticks strictly before step `i`.
pub fn history(dates: &[usize], i: usize) -> u64 {
    dates.iter().filter(|&&d| d < i).count() as u64
}

/// `(k, m)` over steps `0..n`, straight from the per-step definitions.
pub fn oracle_relation(kind: RelationKind, c1: &[usize], c2: &[usize], n: usize) -> (u64, u64) {
    let (mut k, mut m) = (0, 0);
    for i in 0..n {
        let t1 = c1.contains(&i);
        let t2 = c2.contains(&i);
        let h1 = history(c1, i);
        let h2 = history(c2, i);
        let (obs, ok) = match kind {
            RelationKind::Subclock => (t1, t1 && t2),
            RelationKind::Coincidence => (t1 || t2, t1 && t2),
            RelationKind::Exclusion => (t1 || t2, t1 != t2),
            RelationKind::Causality => (t1, t1 && h1 >= h2),
            RelationKind::Precedence => (t1, t1 && h1 >= h2 && !(h1 == h2 && t2)),
        };
        k += u64::from(obs);
        m += u64::from(obs && ok);
    }
    (k, m)
}

/// Every `p`-th tick of `base`, starting with the first.
pub fn oracle_periodic(base: &[usize], p: u64) -> Dates {
    base.iter().copied().step_by(p as usize).collect()
}

/// For each base tick, the `d`-th reference tick strictly after it.
pub fn oracle_delay(base: &[usize], d: u64, reference: &[usize]) -> Dates {
    let mut out: Dates = base
        .iter()
        .filter_map(|&b| {
            reference
                .iter()
                .copied()
                .filter(|&r| r > b)
                .nth(d as usize - 1)
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// k-th tick at the earlier of the two k-th ticks; the longer list's
/// surplus ticks carry over.
pub fn oracle_inf(a: &[usize], b: &[usize]) -> Dates {
    (0..a.len().max(b.len()))
        .map(|k| match (a.get(k), b.get(k)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) | (None, Some(&x)) => x,
            (None, None) => unreachable!(),
        })
        .collect()
}

/// k-th tick at the later of the two k-th ticks, while both exist.
pub fn oracle_sup(a: &[usize], b: &[usize]) -> Dates {
    a.iter().zip(b).map(|(&x, &y)| x.max(y)).collect()
}

pub fn oracle_expr(expr: &ClockExpr, trace: &Trace) -> Dates {
    match expr {
        ClockExpr::Ref(id) => {
            let idx = trace
                .alphabet()
                .resolve(id.as_str())
                .expect("clock in trace");
            trace.dates(idx)
        }
        ClockExpr::PeriodicOn { base, period } => {
            oracle_periodic(&oracle_expr(base, trace), *period)
        }
        ClockExpr::DelayFor {
            base,
            delay,
            reference,
        } => oracle_delay(
            &oracle_expr(base, trace),
            *delay,
            &oracle_expr(reference, trace),
        ),
        ClockExpr::Inf(a, b) => oracle_inf(&oracle_expr(a, trace), &oracle_expr(b, trace)),
        ClockExpr::Sup(a, b) => oracle_sup(&oracle_expr(a, trace), &oracle_expr(b, trace)),
    }
}

pub fn dates_of(column: &[bool]) -> Dates {
    column
        .iter()
        .enumerate()
        .filter_map(|(i, &t)| t.then_some(i))
        .collect()
}

pub const CLOCKS: [&str; 4] = ["a", "b", "c", "d"];

/// Trace over `ms` plus up to four clocks, each with its own density.
pub fn random_trace<R: Rng>(rng: &mut R, max_len: usize) -> Trace {
    let n = rng.random_range(0..=max_len);
    let clocks = rng.random_range(1..=CLOCKS.len());
    let mut columns = vec![("ms", vec![true; n])];
    for name in &CLOCKS[..clocks] {
        let density: f64 = rng.random_range(0.0..=1.0);
        let col = (0..n).map(|_| rng.random_bool(density)).collect();
        columns.push((*name, col));
    }
    Trace::from_columns(&columns).expect("valid columns")
}

/// Random expression over the clocks of `trace`.
pub fn random_expr<R: Rng>(rng: &mut R, trace: &Trace, depth: u32) -> ClockExpr {
    let names = trace.alphabet().names();
    if depth == 0 || rng.random_bool(0.3) {
        return ClockExpr::clock(names[rng.random_range(0..names.len())].as_str());
    }
    match rng.random_range(0..4) {
        0 => random_expr(rng, trace, depth - 1).periodic_on(rng.random_range(1..=5)),
        1 => {
            let base = random_expr(rng, trace, depth - 1);
            let reference = random_expr(rng, trace, depth - 1);
            base.delay_for(rng.random_range(1..=6), reference)
        }
        2 => ClockExpr::inf(
            random_expr(rng, trace, depth - 1),
            random_expr(rng, trace, depth - 1),
        ),
        _ => ClockExpr::sup(
            random_expr(rng, trace, depth - 1),
            random_expr(rng, trace, depth - 1),
        ),
    }
}

pub fn random_threshold<R: Rng>(rng: &mut R) -> Threshold {
    let scale = rng.random_range(0..=6u32);
    let den = 10u64.pow(scale);
    Threshold::new(rng.random_range(0..=den), scale).expect("in range")
}

fn random_ast_expr<R: Rng>(rng: &mut R, names: &[String], depth: u32) -> Expr {
    if depth == 0 || rng.random_bool(0.35) {
        return Expr::name(names[rng.random_range(0..names.len())].clone());
    }
    let sub = |rng: &mut R| Box::new(random_ast_expr(rng, names, depth - 1));
    let kind = match rng.random_range(0..4) {
        0 => ExprKind::PeriodicOn {
            base: sub(rng),
            period: rng.random_range(1..=1000),
        },
        1 => ExprKind::DelayFor {
            base: sub(rng),
            delay: rng.random_range(1..=5000),
            reference: sub(rng),
        },
        2 => ExprKind::Inf(sub(rng), sub(rng)),
        _ => ExprKind::Sup(sub(rng), sub(rng)),
    };
    Expr::new(kind)
}

/// Well-formed specification AST: clocks first, definitions referring to
/// earlier names, relations over declared clocks and definitions.
pub fn random_spec<R: Rng>(rng: &mut R) -> SpecFile {
    let mut stmts = Vec::new();
    let mut names = vec!["ms".to_string()];
    for i in 0..rng.random_range(1..=5) {
        let name = format!("clk{i}");
        stmts.push(Stmt::Clock {
            name: Ident::new(&name),
            span: Default::default(),
        });
        names.push(name);
    }
    for i in 0..rng.random_range(0..=3) {
        let expr = random_ast_expr(rng, &names, 3);
        let name = format!("def_{i}");
        stmts.push(Stmt::Def {
            name: Ident::new(&name),
            expr,
            span: Default::default(),
        });
        names.push(name);
    }
    for i in 0..rng.random_range(0..=5) {
        stmts.push(Stmt::Rel {
            id: Ident::new(format!("R{i}")),
            left: random_ast_expr(rng, &names, 2),
            kind: RelationKind::ALL[rng.random_range(0..RelationKind::ALL.len())],
            right: random_ast_expr(rng, &names, 2),
            threshold: random_threshold(rng),
            span: Default::default(),
        });
    }
    if rng.random_bool(0.3) {
        stmts.push(Stmt::Set {
            setting: Setting::Steps,
            value: rng.random_range(1..=100_000),
            span: Default::default(),
        });
    }
    if rng.random_bool(0.3) {
        stmts.push(Stmt::Set {
            setting: Setting::Samples,
            value: rng.random_range(1..=1000),
            span: Default::default(),
        });
    }
    SpecFile { stmts }
}

use std::collections::HashMap;
use std::sync::Arc;

use super::ast::{Expr, ExprKind, Setting, SpecFile, Stmt};
use super::parser::validate;
use super::{ErrorKind, LangError};
use crate::clock::{Alphabet, ClockId};
use crate::expr::ClockExpr;
use crate::monitor::{RelationSpec, SampleSize};

/// A specification lowered to checker inputs.
#[derive(Debug, Clone)]
pub struct Elaborated {
    /// `ms` followed by the declared clocks in order.
    pub alphabet: Alphabet,
    /// Named definitions; later ones share the nodes of earlier ones.
    pub definitions: Vec<(String, Arc<ClockExpr>)>,
    pub relations: Vec<RelationSpec>,
    pub steps: Option<u64>,
    pub samples: Option<u64>,
}

pub fn elaborate(spec: &SpecFile) -> Result<Elaborated, LangError> {
    validate(spec)?;
    let mut alphabet = Alphabet::default();
    alphabet
        .push(ClockId::universal())
        .expect("empty alphabet accepts ms");
    let samples = spec.setting(Setting::Samples);
    let sample_size = samples.map_or(SampleSize::WholeTrace, SampleSize::Fixed);

    let mut defs: HashMap<&str, Arc<ClockExpr>> = HashMap::new();
    let mut definitions = Vec::new();
    let mut relations = Vec::new();
    for stmt in &spec.stmts {
        match stmt {
            Stmt::Clock { name, .. } => {
                let id = ClockId::new(&name.name)
                    .map_err(|e| LangError::new(ErrorKind::Lex(e.to_string()), name.span))?;
                alphabet.push(id).map_err(|_| {
                    LangError::new(ErrorKind::Duplicate(name.name.clone()), name.span)
                })?;
            }
            Stmt::Def { name, expr, .. } => {
                let e = lower(expr, &defs)?;
                defs.insert(&name.name, e.clone());
                definitions.push((name.name.clone(), e));
            }
            Stmt::Rel {
                id,
                left,
                kind,
                right,
                threshold,
                ..
            } => relations.push(RelationSpec {
                id: id.name.clone(),
                kind: *kind,
                left: Arc::unwrap_or_clone(lower(left, &defs)?),
                right: Arc::unwrap_or_clone(lower(right, &defs)?),
                threshold: *threshold,
                sample_size,
            }),
            Stmt::Set { .. } => {}
        }
    }
    Ok(Elaborated {
        alphabet,
        definitions,
        relations,
        steps: spec.setting(Setting::Steps),
        samples,
    })
}

fn lower(expr: &Expr, defs: &HashMap<&str, Arc<ClockExpr>>) -> Result<Arc<ClockExpr>, LangError> {
    Ok(match &expr.kind {
        ExprKind::Name(n) => match defs.get(n.as_str()) {
            Some(e) => e.clone(),
            None => {
                let id = ClockId::new(n.as_str())
                    .map_err(|_| LangError::new(ErrorKind::UnknownName(n.clone()), expr.span))?;
                Arc::new(ClockExpr::Ref(id))
            }
        },
        ExprKind::PeriodicOn { base, period } => Arc::new(ClockExpr::PeriodicOn {
            base: lower(base, defs)?,
            period: *period,
        }),
        ExprKind::DelayFor {
            base,
            delay,
            reference,
        } => Arc::new(ClockExpr::DelayFor {
            base: lower(base, defs)?,
            delay: *delay,
            reference: lower(reference, defs)?,
        }),
        ExprKind::Inf(a, b) => Arc::new(ClockExpr::Inf(lower(a, defs)?, lower(b, defs)?)),
        ExprKind::Sup(a, b) => Arc::new(ClockExpr::Sup(lower(a, defs)?, lower(b, defs)?)),
    })
}

use crate::monitor::{RelationKind, Threshold};

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Ident {
            name: name.into(),
            span: Span::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Name(String),
    PeriodicOn {
        base: Box<Expr>,
        period: u64,
    },
    DelayFor {
        base: Box<Expr>,
        delay: u64,
        reference: Box<Expr>,
    },
    Inf(Box<Expr>, Box<Expr>),
    Sup(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr {
            kind,
            span: Span::default(),
        }
    }

    pub fn name(name: impl Into<String>) -> Self {
        Expr::new(ExprKind::Name(name.into()))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self.kind, ExprKind::Name(_))
    }

    fn strip(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            ExprKind::Name(_) => {}
            ExprKind::PeriodicOn { base, .. } => base.strip(),
            ExprKind::DelayFor {
                base, reference, ..
            } => {
                base.strip();
                reference.strip();
            }
            ExprKind::Inf(a, b) | ExprKind::Sup(a, b) => {
                a.strip();
                b.strip();
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Setting {
    Steps,
    Samples,
}

impl Setting {
    pub fn keyword(self) -> &'static str {
        match self {
            Setting::Steps => "steps",
            Setting::Samples => "samples",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Clock {
        name: Ident,
        span: Span,
    },
    Def {
        name: Ident,
        expr: Expr,
        span: Span,
    },
    Rel {
        id: Ident,
        left: Expr,
        kind: RelationKind,
        right: Expr,
        threshold: Threshold,
        span: Span,
    },
    Set {
        setting: Setting,
        value: u64,
        span: Span,
    },
}

impl Stmt {
    pub fn span(&self) -> Span {
        match self {
            Stmt::Clock { span, .. }
            | Stmt::Def { span, .. }
            | Stmt::Rel { span, .. }
            | Stmt::Set { span, .. } => *span,
        }
    }

    fn strip(&mut self) {
        match self {
            Stmt::Clock { name, span } => {
                name.span = Span::default();
                *span = Span::default();
            }
            Stmt::Def { name, expr, span } => {
                name.span = Span::default();
                expr.strip();
                *span = Span::default();
            }
            Stmt::Rel {
                id,
                left,
                right,
                span,
                ..
            } => {
                id.span = Span::default();
                left.strip();
                right.strip();
                *span = Span::default();
            }
            Stmt::Set { span, .. } => *span = Span::default(),
        }
    }
}

/// A parsed specification, statements in source order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpecFile {
    pub stmts: Vec<Stmt>,
}

impl SpecFile {
    /// Copy with every span zeroed, for structural comparison.
    pub fn without_positions(&self) -> SpecFile {
        let mut out = self.clone();
        out.stmts.iter_mut().for_each(Stmt::strip);
        out
    }

    pub fn clocks(&self) -> impl Iterator<Item = &Ident> {
        self.stmts.iter().filter_map(|s| match s {
            Stmt::Clock { name, .. } => Some(name),
            _ => None,
        })
    }

    pub fn definitions(&self) -> impl Iterator<Item = (&Ident, &Expr)> {
        self.stmts.iter().filter_map(|s| match s {
            Stmt::Def { name, expr, .. } => Some((name, expr)),
            _ => None,
        })
    }

    pub fn relations(&self) -> impl Iterator<Item = &Stmt> {
        self.stmts.iter().filter(|s| matches!(s, Stmt::Rel { .. }))
    }

    pub fn setting(&self, which: Setting) -> Option<u64> {
        self.stmts.iter().rev().find_map(|s| match s {
            Stmt::Set { setting, value, .. } if *setting == which => Some(*value),
            _ => None,
        })
    }
}

use std::collections::HashMap;

use super::ast::{Expr, ExprKind, Ident, Setting, Span, SpecFile, Stmt};
use super::lexer::{tokenize, Kw, Tok};
use super::{ErrorKind, LangError};
use crate::clock::UNIVERSAL_CLOCK;
use crate::monitor::{RelationKind, Threshold, ThresholdError};

/// Parses and validates a specification.
pub fn parse(src: &str) -> Result<SpecFile, LangError> {
    let spec = parse_syntax(src)?;
    validate(&spec)?;
    Ok(spec)
}

/// Parses without name resolution or range checks on periods and delays.
pub fn parse_syntax(src: &str) -> Result<SpecFile, LangError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    let mut stmts = Vec::new();
    while p.peek() != &Tok::Eof {
        stmts.push(p.stmt()?);
    }
    Ok(SpecFile { stmts })
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn advance(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, expected: &[&str]) -> Result<T, LangError> {
        Err(LangError::new(
            ErrorKind::Syntax {
                expected: expected.iter().map(|s| s.to_string()).collect(),
                found: self.peek().to_string(),
            },
            self.span(),
        ))
    }

    fn expect(&mut self, tok: Tok) -> Result<Span, LangError> {
        if *self.peek() == tok {
            Ok(self.advance().1)
        } else {
            self.unexpected(&[&tok.to_string()])
        }
    }

    fn keyword(&mut self, kw: Kw) -> Result<Span, LangError> {
        self.expect(Tok::Kw(kw))
    }

    fn ident(&mut self) -> Result<Ident, LangError> {
        match self.peek() {
            Tok::Ident(_) => match self.advance() {
                (Tok::Ident(name), span) => Ok(Ident { name, span }),
                _ => unreachable!(),
            },
            _ => self.unexpected(&["identifier"]),
        }
    }

    fn nat(&mut self) -> Result<u64, LangError> {
        match self.peek() {
            Tok::Number(_) => match self.advance() {
                (Tok::Number(n), span) => n
                    .parse()
                    .ok()
                    .filter(|_| n.bytes().all(|b| b.is_ascii_digit()))
                    .ok_or_else(|| LangError::new(ErrorKind::BadNumber(n), span)),
                _ => unreachable!(),
            },
            _ => self.unexpected(&["natural number"]),
        }
    }

    fn decimal(&mut self) -> Result<Threshold, LangError> {
        match self.peek() {
            Tok::Number(_) => match self.advance() {
                (Tok::Number(n), span) => n.parse().map_err(|e| {
                    let kind = match e {
                        ThresholdError::OutOfRange(_) => ErrorKind::ThresholdOutOfRange(n),
                        _ => ErrorKind::BadNumber(n),
                    };
                    LangError::new(kind, span)
                }),
                _ => unreachable!(),
            },
            _ => self.unexpected(&["decimal number"]),
        }
    }

    fn stmt(&mut self) -> Result<Stmt, LangError> {
        let span = self.span();
        match self.peek() {
            Tok::Kw(Kw::Clock) => {
                self.advance();
                Ok(Stmt::Clock {
                    name: self.ident()?,
                    span,
                })
            }
            Tok::Kw(Kw::Def) => {
                self.advance();
                let name = self.ident()?;
                self.expect(Tok::Eq)?;
                let expr = self.expr()?;
                Ok(Stmt::Def { name, expr, span })
            }
            Tok::Kw(Kw::Rel) => {
                self.advance();
                let id = self.ident()?;
                self.expect(Tok::Colon)?;
                let left = self.expr()?;
                let kind = match self.peek() {
                    Tok::Kw(k) => RelationKind::from_keyword(k.as_str()),
                    _ => None,
                };
                let Some(kind) = kind else {
                    let ops: Vec<_> = RelationKind::ALL.iter().map(|k| k.keyword()).collect();
                    return self.unexpected(&ops);
                };
                self.advance();
                let right = self.expr()?;
                self.keyword(Kw::Prob)?;
                self.expect(Tok::Ge)?;
                let threshold = self.decimal()?;
                Ok(Stmt::Rel {
                    id,
                    left,
                    kind,
                    right,
                    threshold,
                    span,
                })
            }
            Tok::Kw(Kw::Set) => {
                self.advance();
                let setting = match self.peek() {
                    Tok::Kw(Kw::Steps) => Setting::Steps,
                    Tok::Kw(Kw::Samples) => Setting::Samples,
                    _ => return self.unexpected(&["'steps'", "'samples'"]),
                };
                self.advance();
                let value = self.nat()?;
                Ok(Stmt::Set {
                    setting,
                    value,
                    span,
                })
            }
            _ => self.unexpected(&["'clock'", "'def'", "'rel'", "'set'"]),
        }
    }

    /// `primary { delayfor NAT on primary }`
    fn expr(&mut self) -> Result<Expr, LangError> {
        let mut e = self.primary()?;
        while self.peek() == &Tok::Kw(Kw::DelayFor) {
            self.advance();
            let delay = self.nat()?;
            self.keyword(Kw::On)?;
            let reference = self.primary()?;
            let span = e.span;
            e = Expr {
                kind: ExprKind::DelayFor {
                    base: Box::new(e),
                    delay,
                    reference: Box::new(reference),
                },
                span,
            };
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr, LangError> {
        let span = self.span();
        let kind = match self.peek() {
            Tok::Ident(_) => ExprKind::Name(self.ident()?.name),
            Tok::Kw(Kw::PeriodicOn) => {
                self.advance();
                let base = self.expr()?;
                self.keyword(Kw::Period)?;
                let period = self.nat()?;
                ExprKind::PeriodicOn {
                    base: Box::new(base),
                    period,
                }
            }
            Tok::Kw(kw @ (Kw::Inf | Kw::Sup)) => {
                let kw = *kw;
                self.advance();
                self.expect(Tok::LParen)?;
                let a = Box::new(self.expr()?);
                self.expect(Tok::Comma)?;
                let b = Box::new(self.expr()?);
                self.expect(Tok::RParen)?;
                if kw == Kw::Inf {
                    ExprKind::Inf(a, b)
                } else {
                    ExprKind::Sup(a, b)
                }
            }
            Tok::LParen => {
                self.advance();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(inner);
            }
            _ => return self.unexpected(&["identifier", "'periodicon'", "'inf'", "'sup'", "'('"]),
        };
        Ok(Expr { kind, span })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Entity {
    Clock,
    Def,
    Rel,
}

/// Checks names, definition order, and value ranges.
pub fn validate(spec: &SpecFile) -> Result<(), LangError> {
    let mut names: HashMap<&str, Entity> = HashMap::new();
    names.insert(UNIVERSAL_CLOCK, Entity::Clock);
    let mut seen_settings = Vec::new();

    for stmt in &spec.stmts {
        match stmt {
            Stmt::Clock { name, .. } => declare(&mut names, name, Entity::Clock)?,
            Stmt::Def { name, expr, .. } => {
                check_expr(expr, &names, Some(&name.name))?;
                declare(&mut names, name, Entity::Def)?;
            }
            Stmt::Rel {
                id, left, right, ..
            } => {
                check_expr(left, &names, None)?;
                check_expr(right, &names, None)?;
                declare(&mut names, id, Entity::Rel)?;
            }
            Stmt::Set {
                setting,
                value,
                span,
            } => {
                if seen_settings.contains(setting) {
                    return Err(LangError::new(
                        ErrorKind::DuplicateSetting(setting.keyword()),
                        *span,
                    ));
                }
                seen_settings.push(*setting);
                if *setting == Setting::Samples && *value == 0 {
                    return Err(LangError::new(ErrorKind::ZeroSamples, *span));
                }
            }
        }
    }
    Ok(())
}

fn declare<'a>(
    names: &mut HashMap<&'a str, Entity>,
    ident: &'a Ident,
    entity: Entity,
) -> Result<(), LangError> {
    if names.insert(&ident.name, entity).is_some() {
        return Err(LangError::new(
            ErrorKind::Duplicate(ident.name.clone()),
            ident.span,
        ));
    }
    Ok(())
}

fn check_expr(
    expr: &Expr,
    names: &HashMap<&str, Entity>,
    defining: Option<&str>,
) -> Result<(), LangError> {
    match &expr.kind {
        ExprKind::Name(n) => match names.get(n.as_str()) {
            Some(Entity::Clock | Entity::Def) => Ok(()),
            Some(Entity::Rel) => Err(LangError::new(ErrorKind::NotAClock(n.clone()), expr.span)),
            None if defining == Some(n.as_str()) => {
                Err(LangError::new(ErrorKind::Cyclic(n.clone()), expr.span))
            }
            None => Err(LangError::new(ErrorKind::UnknownName(n.clone()), expr.span)),
        },
        ExprKind::PeriodicOn { base, period } => {
            if *period == 0 {
                return Err(LangError::new(ErrorKind::ZeroPeriod, expr.span));
            }
            check_expr(base, names, defining)
        }
        ExprKind::DelayFor {
            base,
            delay,
            reference,
        } => {
            if *delay == 0 {
                return Err(LangError::new(ErrorKind::ZeroDelay, expr.span));
            }
            check_expr(base, names, defining)?;
            check_expr(reference, names, defining)
        }
        ExprKind::Inf(a, b) | ExprKind::Sup(a, b) => {
            check_expr(a, names, defining)?;
            check_expr(b, names, defining)
        }
    }
}

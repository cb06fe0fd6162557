use std::fmt::Write;

use super::ast::{Expr, ExprKind, SpecFile, Stmt};

/// Canonical text: one statement per line, lowercase keywords, compound
/// operands parenthesized.
pub fn pretty_print(spec: &SpecFile) -> String {
    let mut out = String::new();
    for stmt in &spec.stmts {
        match stmt {
            Stmt::Clock { name, .. } => writeln!(out, "clock {}", name.name),
            Stmt::Def { name, expr, .. } => {
                writeln!(out, "def {} = {}", name.name, print_expr(expr))
            }
            Stmt::Rel {
                id,
                left,
                kind,
                right,
                threshold,
                ..
            } => writeln!(
                out,
                "rel {}: {} {} {} prob >= {}",
                id.name,
                operand(left),
                kind.keyword(),
                operand(right),
                threshold
            ),
            Stmt::Set { setting, value, .. } => writeln!(out, "set {} {value}", setting.keyword()),
        }
        .expect("writing to a String");
    }
    out
}

pub fn print_expr(expr: &Expr) -> String {
    match &expr.kind {
        ExprKind::Name(n) => n.clone(),
        ExprKind::PeriodicOn { base, period } => {
            format!("periodicon {} period {period}", operand(base))
        }
        ExprKind::DelayFor {
            base,
            delay,
            reference,
        } => format!(
            "{} delayfor {delay} on {}",
            operand(base),
            operand(reference)
        ),
        ExprKind::Inf(a, b) => format!("inf({}, {})", print_expr(a), print_expr(b)),
        ExprKind::Sup(a, b) => format!("sup({}, {})", print_expr(a), print_expr(b)),
    }
}

fn operand(expr: &Expr) -> String {
    if expr.is_atomic() {
        print_expr(expr)
    } else {
        format!("({})", print_expr(expr))
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn empty_file_prints_nothing() {
        assert_eq!(pretty_print(&SpecFile::default()), "");
        assert_eq!(pretty_print(&parse("# only a comment\n").unwrap()), "");
    }

    #[test]
    fn canonical_form() {
        let src = "CLOCK a  clock b\nDef  x=SUP( sup(a,b) ,ms)\nrel r : x Precedes a DelayFor 3 On b prob>=0.950\nset samples 10";
        let spec = parse(src).unwrap();
        let text = pretty_print(&spec);
        assert_eq!(
            text,
            "clock a\nclock b\ndef x = sup(sup(a, b), ms)\n\
             rel r: x precedes (a delayfor 3 on b) prob >= 0.95\nset samples 10\n"
        );
        assert_eq!(
            parse(&text).unwrap().without_positions(),
            spec.without_positions()
        );
    }

    #[test]
    fn nested_operands_parenthesized() {
        let spec = parse("def x = periodicon (ms delayfor 2 on ms) period 3 delayfor 1 on (periodicon ms period 2)")
            .unwrap();
        let text = pretty_print(&spec);
        assert_eq!(
            text,
            "def x = (periodicon (ms delayfor 2 on ms) period 3) delayfor 1 on (periodicon ms period 2)\n"
        );
        assert_eq!(
            parse(&text).unwrap().without_positions(),
            spec.without_positions()
        );
    }
}

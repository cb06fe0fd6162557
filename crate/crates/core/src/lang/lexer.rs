use std::fmt;

use super::{ErrorKind, LangError, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kw {
    Clock,
    Def,
    Rel,
    Set,
    Steps,
    Samples,
    PeriodicOn,
    Period,
    DelayFor,
    On,
    Inf,
    Sup,
    Prob,
    SubclockOf,
    Coincides,
    Excludes,
    Causes,
    Precedes,
}

impl Kw {
    const ALL: [Kw; 18] = [
        Kw::Clock,
        Kw::Def,
        Kw::Rel,
        Kw::Set,
        Kw::Steps,
        Kw::Samples,
        Kw::PeriodicOn,
        Kw::Period,
        Kw::DelayFor,
        Kw::On,
        Kw::Inf,
        Kw::Sup,
        Kw::Prob,
        Kw::SubclockOf,
        Kw::Coincides,
        Kw::Excludes,
        Kw::Causes,
        Kw::Precedes,
    ];

    pub(crate) fn as_str(self) -> &'static str {
        match self {
            Kw::Clock => "clock",
            Kw::Def => "def",
            Kw::Rel => "rel",
            Kw::Set => "set",
            Kw::Steps => "steps",
            Kw::Samples => "samples",
            Kw::PeriodicOn => "periodicon",
            Kw::Period => "period",
            Kw::DelayFor => "delayfor",
            Kw::On => "on",
            Kw::Inf => "inf",
            Kw::Sup => "sup",
            Kw::Prob => "prob",
            Kw::SubclockOf => "subclockof",
            Kw::Coincides => "coincides",
            Kw::Excludes => "excludes",
            Kw::Causes => "causes",
            Kw::Precedes => "precedes",
        }
    }

    fn lookup(word: &str) -> Option<Kw> {
        Kw::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(word))
    }
}

/// True if `word` is reserved, in any letter case.
pub fn is_keyword(word: &str) -> bool {
    Kw::lookup(word).is_some()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Kw(Kw),
    Number(String),
    LParen,
    RParen,
    Comma,
    Colon,
    Eq,
    Ge,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier {s}"),
            Tok::Kw(k) => write!(f, "'{}'", k.as_str()),
            Tok::Number(n) => write!(f, "number {n}"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::Colon => f.write_str("':'"),
            Tok::Eq => f.write_str("'='"),
            Tok::Ge => f.write_str("'>='"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<(Tok, Span)>, LangError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1u32, 1u32);
    while let Some(&c) = chars.peek() {
        let span = Span { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(&c) = chars
                .peek()
                .filter(|c| c.is_ascii_alphanumeric() || **c == '_')
            {
                word.push(c);
                bump(&mut chars);
            }
            match Kw::lookup(&word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word),
            }
        } else if c.is_ascii_digit() || c == '.' {
            let mut num = String::new();
            while let Some(&c) = chars
                .peek()
                .filter(|c| c.is_ascii_alphanumeric() || **c == '.')
            {
                num.push(c);
                bump(&mut chars);
            }
            Tok::Number(num)
        } else {
            bump(&mut chars);
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                ':' => Tok::Colon,
                '=' => Tok::Eq,
                '>' if chars.peek() == Some(&'=') => {
                    bump(&mut chars);
                    Tok::Ge
                }
                _ => {
                    return Err(LangError::new(
                        ErrorKind::Lex(format!("unexpected character {c:?}")),
                        span,
                    ))
                }
            }
        };
        out.push((tok, span));
    }
    out.push((Tok::Eof, Span { line, col }));
    Ok(out)
}

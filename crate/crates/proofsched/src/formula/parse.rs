//! Formula concrete syntax.
//!
//! `x` variable, `x^` dual, `A * B` tensor, `A @ B` par, `<a>+ A` /
//! `<a>- A` modalities, `A -o B` implication sugar. `*` binds tighter
//! than `@`, both left-associative; modalities take a primary; `-o` has
//! lowest precedence and associates to the right. Identifiers starting
//! with an uppercase letter denote metavariables.

use std::fmt;

use super::{lollipop, Formula};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for FormulaParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for FormulaParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Caret,
    Star,
    At,
    Lt,
    Gt,
    Plus,
    Minus,
    Lolli,
    LParen,
    RParen,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

fn lex(src: &str) -> Result<Lexer, FormulaParseError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let (mut line, mut col) = (1, 1);
    let mut end = (1, 1);
    while i < chars.len() {
        let (c, l0, c0) = (chars[i], line, col);
        let advance = |n: usize, i: &mut usize, line: &mut usize, col: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    *line += 1;
                    *col = 1;
                } else {
                    *col += 1;
                }
                *i += 1;
            }
        };
        match c {
            ' ' | '\t' | '\n' | '\r' => advance(1, &mut i, &mut line, &mut col),
            '^' => {
                toks.push((Tok::Caret, l0, c0));
                advance(1, &mut i, &mut line, &mut col);
            }
            '*' => {
                toks.push((Tok::Star, l0, c0));
                advance(1, &mut i, &mut line, &mut col);
            }
            '@' => {
                toks.push((Tok::At, l0, c0));
                advance(1, &mut i, &mut line, &mut col);
            }
            '<' => {
                toks.push((Tok::Lt, l0, c0));
                advance(1, &mut i, &mut line, &mut col);
            }
            '>' => {
                toks.push((Tok::Gt, l0, c0));
                advance(1, &mut i, &mut line, &mut col);
            }
            '+' => {
                toks.push((Tok::Plus, l0, c0));
                advance(1, &mut i, &mut line, &mut col);
            }
            '-' => {
                // `-o` is the implication arrow when the `o` does not
                // start an identifier (write `<a>- o` for a var body `o`)
                let is_lolli = chars.get(i + 1) == Some(&'o')
                    && !chars
                        .get(i + 2)
                        .map_or(false, |c| c.is_ascii_alphanumeric() || *c == '_');
                if is_lolli {
                    toks.push((Tok::Lolli, l0, c0));
                    advance(2, &mut i, &mut line, &mut col);
                } else {
                    toks.push((Tok::Minus, l0, c0));
                    advance(1, &mut i, &mut line, &mut col);
                }
            }
            '(' => {
                toks.push((Tok::LParen, l0, c0));
                advance(1, &mut i, &mut line, &mut col);
            }
            ')' => {
                toks.push((Tok::RParen, l0, c0));
                advance(1, &mut i, &mut line, &mut col);
            }
            c if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_')
                {
                    name.push(chars[i]);
                    advance(1, &mut i, &mut line, &mut col);
                }
                toks.push((Tok::Ident(name), l0, c0));
            }
            other => {
                return Err(FormulaParseError {
                    line: l0,
                    column: c0,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
        end = (line, col);
    }
    Ok(Lexer { toks, pos: 0, end })
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|&(_, l, c)| (l, c))
            .unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> FormulaParseError {
        let (line, column) = self.here();
        FormulaParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), FormulaParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }
}

/// Parses a formula from its concrete syntax.
pub fn parse_formula(src: &str) -> Result<Formula, FormulaParseError> {
    let mut lx = lex(src)?;
    let f = parse_lolli(&mut lx)?;
    if lx.peek().is_some() {
        return Err(lx.err("trailing input after formula"));
    }
    Ok(f)
}

fn parse_lolli(lx: &mut Lexer) -> Result<Formula, FormulaParseError> {
    let lhs = parse_par(lx)?;
    if lx.peek() == Some(&Tok::Lolli) {
        lx.next();
        let rhs = parse_lolli(lx)?;
        Ok(lollipop(&lhs, &rhs))
    } else {
        Ok(lhs)
    }
}

fn parse_par(lx: &mut Lexer) -> Result<Formula, FormulaParseError> {
    let mut f = parse_tensor(lx)?;
    while lx.peek() == Some(&Tok::At) {
        lx.next();
        let rhs = parse_tensor(lx)?;
        f = Formula::par(f, rhs);
    }
    Ok(f)
}

fn parse_tensor(lx: &mut Lexer) -> Result<Formula, FormulaParseError> {
    let mut f = parse_primary(lx)?;
    while lx.peek() == Some(&Tok::Star) {
        lx.next();
        let rhs = parse_primary(lx)?;
        f = Formula::tensor(f, rhs);
    }
    Ok(f)
}

fn parse_primary(lx: &mut Lexer) -> Result<Formula, FormulaParseError> {
    match lx.peek() {
        Some(Tok::Lt) => {
            lx.next();
            let channel = match lx.next() {
                Some(Tok::Ident(name)) => name,
                _ => return Err(lx.err("expected channel name after `<`")),
            };
            if !channel.chars().next().is_some_and(|c| c.is_ascii_lowercase()) {
                return Err(lx.err("channel names start with a lowercase letter"));
            }
            lx.expect(Tok::Gt, "`>` after channel name")?;
            let pos = match lx.next() {
                Some(Tok::Plus) => true,
                Some(Tok::Minus) => false,
                _ => return Err(lx.err("expected `+` or `-` after `>`")),
            };
            let body = parse_primary(lx)?;
            Ok(if pos {
                Formula::mod_pos(channel, body)
            } else {
                Formula::mod_neg(channel, body)
            })
        }
        Some(Tok::LParen) => {
            lx.next();
            let f = parse_lolli(lx)?;
            lx.expect(Tok::RParen, "closing `)`")?;
            Ok(f)
        }
        Some(Tok::Ident(_)) => {
            let name = match lx.next() {
                Some(Tok::Ident(name)) => name,
                _ => unreachable!(),
            };
            let meta = name.chars().next().is_some_and(|c| c.is_ascii_uppercase());
            let dual = if lx.peek() == Some(&Tok::Caret) {
                lx.next();
                true
            } else {
                false
            };
            Ok(match (meta, dual) {
                (false, false) => Formula::Var(name),
                (false, true) => Formula::DualVar(name),
                (true, false) => Formula::MetaVar(name),
                (true, true) => Formula::DualMetaVar(name),
            })
        }
        _ => Err(lx.err("expected a formula")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_carry_position() {
        let e = parse_formula("x @ ").unwrap_err();
        assert_eq!((e.line, e.column), (1, 5));
        assert!(parse_formula("x )").is_err());
        assert!(parse_formula("(x").is_err());
        assert!(parse_formula("<A>+ x").is_err());
        assert!(parse_formula("<a> x").is_err());
        assert!(parse_formula("").is_err());
        assert!(parse_formula("x $ y").is_err());
    }

    #[test]
    fn lolli_vs_minus_lexing() {
        // `-o` followed by an identifier character is the sign + a var
        assert!(parse_formula("<a>-ox").is_ok());
        assert_eq!(
            parse_formula("<a>- o").unwrap(),
            Formula::mod_neg("a", Formula::var("o"))
        );
        assert_eq!(
            parse_formula("x -o y").unwrap(),
            parse_formula("x^ @ y").unwrap()
        );
    }
}

//! Text syntax for MCCS terms.
//!
//! ```text
//! process := factor | process "|" factor
//! factor  := "1" | act | act "." factor | "(" process ")"
//! act     := NAME tag? | "~" NAME tag?
//! tag     := "^" NAT
//! ```
//!
//! `|` is left-associative and binds looser than prefixing, so `a.b | c`
//! is `(a.b) | c`. A bare `a` abbreviates `a.1`. When a tag `^n` is
//! omitted the parser assigns consecutive integers in left-to-right
//! order, skipping ids already taken by explicit tags; mixing an implicit
//! tag with a colliding explicit one is an error.

use std::collections::BTreeSet;

use super::term::{valid_channel_name, Location, Polarity, ProcessTerm};
use super::ProcessError;

/// A parse error with 1-based line/column position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Tilde,
    Dot,
    Bar,
    LParen,
    RParen,
    Caret,
    Nat(u64),
    Eof,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0 }
    }

    fn line_col(&self, at: usize) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for (i, c) in self.src.char_indices() {
            if i >= at {
                break;
            }
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    fn error(&self, at: usize, message: impl Into<String>) -> ParseError {
        let (line, column) = self.line_col(at);
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn next_token(&mut self) -> Result<(Tok, usize), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos >= bytes.len() {
            return Ok((Tok::Eof, start));
        }
        let c = bytes[self.pos] as char;
        let tok = match c {
            '~' => {
                self.pos += 1;
                Tok::Tilde
            }
            '.' => {
                self.pos += 1;
                Tok::Dot
            }
            '|' => {
                self.pos += 1;
                Tok::Bar
            }
            '(' => {
                self.pos += 1;
                Tok::LParen
            }
            ')' => {
                self.pos += 1;
                Tok::RParen
            }
            '^' => {
                self.pos += 1;
                Tok::Caret
            }
            c if c.is_ascii_digit() => {
                let mut end = self.pos;
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
                let n: u64 = self.src[self.pos..end]
                    .parse()
                    .map_err(|_| self.error(start, "number out of range"))?;
                self.pos = end;
                Tok::Nat(n)
            }
            c if c.is_ascii_lowercase() => {
                let mut end = self.pos;
                while end < bytes.len()
                    && ((bytes[end] as char).is_ascii_alphanumeric() || bytes[end] == b'_')
                {
                    end += 1;
                }
                let name = self.src[self.pos..end].to_string();
                self.pos = end;
                Tok::Name(name)
            }
            other => return Err(self.error(start, format!("unexpected character `{}`", other))),
        };
        Ok((tok, start))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    tok_at: usize,
}

/// Untagged syntax tree; locations are filled in afterwards.
enum Raw {
    Unit,
    Par(Box<Raw>, Box<Raw>),
    Prefix {
        name: String,
        polarity: Polarity,
        tag: Option<u64>,
        at: usize,
        body: Box<Raw>,
    },
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let (tok, tok_at) = lexer.next_token()?;
        Ok(Parser { lexer, tok, tok_at })
    }

    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, at) = self.lexer.next_token()?;
        self.tok = tok;
        self.tok_at = at;
        Ok(())
    }

    fn process(&mut self) -> Result<Raw, ParseError> {
        let mut acc = self.factor()?;
        while self.tok == Tok::Bar {
            self.bump()?;
            let rhs = self.factor()?;
            acc = Raw::Par(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Raw, ParseError> {
        match self.tok.clone() {
            Tok::Nat(1) => {
                self.bump()?;
                Ok(Raw::Unit)
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.process()?;
                if self.tok != Tok::RParen {
                    return Err(self.lexer.error(self.tok_at, "expected `)`"));
                }
                self.bump()?;
                Ok(inner)
            }
            Tok::Tilde => {
                self.bump()?;
                self.act(Polarity::Neg)
            }
            Tok::Name(_) => self.act(Polarity::Pos),
            _ => Err(self
                .lexer
                .error(self.tok_at, "expected a process (name, `1`, `~` or `(`)")),
        }
    }

    fn act(&mut self, polarity: Polarity) -> Result<Raw, ParseError> {
        let at = self.tok_at;
        let name = match self.tok.clone() {
            Tok::Name(n) => n,
            _ => return Err(self.lexer.error(self.tok_at, "expected a channel name")),
        };
        if !valid_channel_name(&name) {
            return Err(self.lexer.error(at, format!("bad channel name `{}`", name)));
        }
        self.bump()?;
        let tag = if self.tok == Tok::Caret {
            self.bump()?;
            match self.tok {
                Tok::Nat(n) => {
                    self.bump()?;
                    Some(n)
                }
                _ => return Err(self.lexer.error(self.tok_at, "expected a location after `^`")),
            }
        } else {
            None
        };
        let body = if self.tok == Tok::Dot {
            self.bump()?;
            self.factor()?
        } else {
            Raw::Unit
        };
        Ok(Raw::Prefix {
            name,
            polarity,
            tag,
            at,
            body: Box::new(body),
        })
    }
}

fn collect_explicit(raw: &Raw, out: &mut Vec<(u64, usize)>) {
    match raw {
        Raw::Unit => {}
        Raw::Par(l, r) => {
            collect_explicit(l, out);
            collect_explicit(r, out);
        }
        Raw::Prefix { tag, at, body, .. } => {
            if let Some(t) = tag {
                out.push((*t, *at));
            }
            collect_explicit(body, out);
        }
    }
}

fn assign(raw: Raw, taken: &BTreeSet<u64>, next: &mut u64) -> ProcessTerm {
    match raw {
        Raw::Unit => ProcessTerm::Unit,
        Raw::Par(l, r) => {
            let l = assign(*l, taken, next);
            let r = assign(*r, taken, next);
            ProcessTerm::par(l, r)
        }
        Raw::Prefix {
            name,
            polarity,
            tag,
            body,
            ..
        } => {
            let loc = match tag {
                Some(t) => t,
                None => {
                    while taken.contains(next) {
                        *next += 1;
                    }
                    let l = *next;
                    *next += 1;
                    l
                }
            };
            let body = assign(*body, taken, next);
            ProcessTerm::prefix(name, polarity, Location(loc), body)
        }
    }
}

/// Parses a term, auto-assigning locations where tags are omitted.
pub fn parse_term(src: &str) -> Result<ProcessTerm, ParseError> {
    let mut parser = Parser::new(src)?;
    let raw = parser.process()?;
    if parser.tok != Tok::Eof {
        return Err(parser.lexer.error(parser.tok_at, "trailing input"));
    }
    let mut explicit = Vec::new();
    collect_explicit(&raw, &mut explicit);
    let mut taken = BTreeSet::new();
    for (t, at) in &explicit {
        if !taken.insert(*t) {
            return Err(parser
                .lexer
                .error(*at, format!("location {} used more than once", t)));
        }
    }
    let mut next = 0u64;
    let term = assign(raw, &taken, &mut next);
    term.validate().map_err(|e| match e {
        ProcessError::DuplicateLocation(l) => parser
            .lexer
            .error(0, format!("location {} used more than once", l)),
        other => parser.lexer.error(0, other.to_string()),
    })?;
    Ok(term)
}

#[cfg(test)]
mod tests {
    use super::super::term::{Location, Polarity, ProcessTerm};
    use super::*;

    #[test]
    fn parses_the_running_example() {
        let p = parse_term("a^1.c^2 | b^3.~a^4 | ~b^5.~c^6 | a^7.~b^8 | b^9 | ~a^0").unwrap();
        assert_eq!(p.prefix_count(), 10);
        assert_eq!(p.subject(Location(6)).unwrap(), "c");
        assert_eq!(p.polarity(Location(6)).unwrap(), Polarity::Neg);
    }

    #[test]
    fn unit_and_grouping() {
        assert_eq!(parse_term("1").unwrap(), ProcessTerm::Unit);
        let p = parse_term("(a^1 | 1) | b^2").unwrap();
        assert_eq!(p.prefix_count(), 2);
        let q = parse_term("a^1.(b^2 | c^3)").unwrap();
        assert_eq!(q.prefix_count(), 3);
    }

    #[test]
    fn implicit_locations_skip_taken_ones() {
        let p = parse_term("a^2 | b | c").unwrap();
        let locs = p.locations();
        assert_eq!(locs.len(), 3);
        assert!(p.subject(Location(2)).unwrap() == "a");
        // implicit tags fill in unused numbers
        assert!(p.validate().is_ok());
    }

    #[test]
    fn multi_digit_locations() {
        let p = parse_term("a^10 | ~a^100").unwrap();
        assert_eq!(p.subject(Location(10)).unwrap(), "a");
        assert_eq!(p.subject(Location(100)).unwrap(), "a");
    }

    #[test]
    fn rejects_duplicate_locations() {
        assert!(parse_term("a^1 | b^1").is_err());
    }

    #[test]
    fn rejects_garbage_with_position() {
        let err = parse_term("a^1 | | b^2").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.column > 0);
        assert!(parse_term("").is_err());
        assert!(parse_term("a^").is_err());
        assert!(parse_term("(a^1").is_err());
        assert!(parse_term("A^1").is_err());
    }

    #[test]
    fn display_roundtrip() {
        for src in [
            "1",
            "a^1",
            "~a^1",
            "a^1.c^2 | b^3.~a^4 | ~b^5.~c^6 | a^7.~b^8 | b^9 | ~a^0",
            "a^1.(b^2 | c^3) | 1",
            "a^1.1",
        ] {
            let p = parse_term(src).unwrap();
            let q = parse_term(&p.to_string()).unwrap();
            assert_eq!(p, q, "roundtrip failed for {src}: printed {p}");
        }
    }
}

use std::fmt;

use super::{Formula, Term, EQUALITY};

/// A syntax error: where it happened, what was found and what would have been
/// accepted instead.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub found: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unexpected {} at position {}, expected one of: {}",
            self.found,
            self.position,
            self.expected.join(", ")
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Forall,
    Exists,
    True,
    False,
    LParen,
    RParen,
    Comma,
    Dot,
    Bang,
    Amp,
    Bar,
    Arrow,
    DoubleArrow,
    Equals,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("\"{s}\""),
            Tok::End => "end of input".into(),
            other => format!("\"{}\"", other.text()),
        }
    }

    fn text(&self) -> &str {
        match self {
            Tok::Ident(s) => s,
            Tok::Forall => "forall",
            Tok::Exists => "exists",
            Tok::True => "true",
            Tok::False => "false",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Bang => "!",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::Arrow => "->",
            Tok::DoubleArrow => "<->",
            Tok::Equals => "=",
            Tok::End => "",
        }
    }
}

fn lex(input: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b'!' => Tok::Bang,
            b'&' => Tok::Amp,
            b'|' => Tok::Bar,
            b'=' => Tok::Equals,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                i += 2;
                Tok::DoubleArrow
            }
            c if c.is_ascii_alphabetic() => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_')
                {
                    i += 1;
                }
                match &input[start..=i] {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    word => Tok::Ident(word.to_string()),
                }
            }
            _ => {
                let ch = input[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    position: start,
                    found: format!("character '{ch}'"),
                    expected: vec!["formula token".into()],
                });
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((input.len(), Tok::End));
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    bound: Vec<String>,
}

const FORMULA_START: &[&str] = &[
    "predicate",
    "term",
    "\"!\"",
    "\"(\"",
    "\"forall\"",
    "\"exists\"",
    "\"true\"",
    "\"false\"",
];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.pos].1.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let (position, tok) = &self.tokens[self.pos];
        ParseError {
            position: *position,
            found: tok.describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[&tok.describe()]))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implication()?;
        if *self.peek() == Tok::DoubleArrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Forall | Tok::Exists => {
                let quant = self.bump();
                let var = match self.peek().clone() {
                    Tok::Ident(v) if starts_lower(&v) => {
                        self.bump();
                        v
                    }
                    _ => return Err(self.error(&["variable"])),
                };
                self.expect(Tok::Dot)?;
                self.bound.push(var.clone());
                let body = self.formula();
                self.bound.pop();
                let body = body?;
                Ok(if quant == Tok::Forall {
                    Formula::forall(var, body)
                } else {
                    Formula::exists(var, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) if !starts_lower(&name) => {
                self.bump();
                let args = if *self.peek() == Tok::LParen {
                    self.arguments()?
                } else {
                    Vec::new()
                };
                Ok(Formula::Atom(name, args))
            }
            Tok::Ident(_) => {
                let lhs = self.term()?;
                self.expect(Tok::Equals)?;
                let rhs = self.term()?;
                Ok(Formula::Atom(EQUALITY.to_string(), vec![lhs, rhs]))
            }
            _ => Err(self.error(FORMULA_START)),
        }
    }

    fn arguments(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                    args.push(self.term()?);
                }
                Tok::RParen => {
                    self.bump();
                    return Ok(args);
                }
                _ => return Err(self.error(&["\",\"", "\")\""])),
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) if starts_lower(&name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    Ok(Term::App(name, self.arguments()?))
                } else if self.bound.contains(&name) {
                    Ok(Term::Var(name))
                } else {
                    Ok(Term::Const(name))
                }
            }
            _ => Err(self.error(&["term"])),
        }
    }
}

fn starts_lower(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase())
}

/// Parses a closed formula.
pub fn parse_formula(input: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser {
        tokens: lex(input)?,
        pos: 0,
        bound: Vec::new(),
    };
    let f = parser.formula()?;
    if *parser.peek() != Tok::End {
        return Err(parser.error(&["\"&\"", "\"|\"", "\"->\"", "\"<->\"", "end of input"]));
    }
    Ok(f)
}

/// Parses a ground term; every lowercase identifier without arguments is a
/// constant.
pub fn parse_term(input: &str) -> Result<Term, ParseError> {
    let mut parser = Parser {
        tokens: lex(input)?,
        pos: 0,
        bound: Vec::new(),
    };
    let t = parser.term()?;
    if *parser.peek() != Tok::End {
        return Err(parser.error(&["end of input"]));
    }
    Ok(t)
}

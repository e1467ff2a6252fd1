//! Recursive-descent parser for rational-function expressions.
//!
//! Grammar (whitespace insignificant, no implicit multiplication):
//!
//! ```text
//! expr   := term { ("+"|"-") term }
//! term   := factor { ("*"|"/") factor }
//! factor := base [ "^" uint ]
//! base   := uint | ident | "(" expr ")" | "-" base
//! ident  := letter { letter | digit | "_" }
//! uint   := digit { digit }
//! ```
//!
//! `a/b` is uniform division of rational functions, so rational literals
//! like `16/25` need no special case.

use num::bigint::BigInt;

use super::{Rat, RatfunError, RationalFunction, Result, VarSet};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    UInt(String),
    Ident(String),
    End,
}

impl Token {
    fn describe(&self) -> &'static str {
        match self {
            Token::Plus => "`+`",
            Token::Minus => "`-`",
            Token::Star => "`*`",
            Token::Slash => "`/`",
            Token::Caret => "`^`",
            Token::LParen => "`(`",
            Token::RParen => "`)`",
            Token::UInt(_) => "integer",
            Token::Ident(_) => "identifier",
            Token::End => "end of input",
        }
    }
}

struct Lexer<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { text: text.as_bytes(), pos: 0 }
    }

    fn next_token(&mut self) -> Result<(Token, usize)> {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos >= self.text.len() {
            return Ok((Token::End, start));
        }
        let c = self.text[self.pos];
        let simple = match c {
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(t) = simple {
            self.pos += 1;
            return Ok((t, start));
        }
        if c.is_ascii_digit() {
            while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let s = std::str::from_utf8(&self.text[start..self.pos]).expect("ascii digits");
            return Ok((Token::UInt(s.to_string()), start));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self.pos < self.text.len()
                && (self.text[self.pos].is_ascii_alphanumeric() || self.text[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let s = std::str::from_utf8(&self.text[start..self.pos]).expect("ascii word");
            return Ok((Token::Ident(s.to_string()), start));
        }
        Err(RatfunError::Syntax {
            position: start,
            expected: "digit, identifier, operator, or parenthesis".to_string(),
        })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    current: Token,
    current_pos: usize,
    vars: &'a VarSet,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, vars: &'a VarSet) -> Result<Self> {
        let mut lexer = Lexer::new(text);
        let (current, current_pos) = lexer.next_token()?;
        Ok(Parser { lexer, current, current_pos, vars })
    }

    fn advance(&mut self) -> Result<()> {
        let (t, p) = self.lexer.next_token()?;
        self.current = t;
        self.current_pos = p;
        Ok(())
    }

    fn err_expected(&self, expected: &str) -> RatfunError {
        RatfunError::Syntax {
            position: self.current_pos,
            expected: format!("{expected}, found {}", self.current.describe()),
        }
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        loop {
            match self.current {
                Token::Plus => {
                    self.advance()?;
                    acc = acc.add(&self.term()?)?;
                }
                Token::Minus => {
                    self.advance()?;
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.factor()?;
        loop {
            match self.current {
                Token::Star => {
                    self.advance()?;
                    acc = acc.mul(&self.factor()?)?;
                }
                Token::Slash => {
                    let pos = self.current_pos;
                    self.advance()?;
                    let rhs = self.factor()?;
                    if rhs.is_zero() {
                        return Err(RatfunError::Syntax {
                            position: pos,
                            expected: "nonzero divisor".to_string(),
                        });
                    }
                    acc = acc.div(&rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RationalFunction> {
        let base = self.base()?;
        if self.current == Token::Caret {
            self.advance()?;
            match std::mem::replace(&mut self.current, Token::End) {
                Token::UInt(digits) => {
                    self.advance()?;
                    let exp: u32 = digits.parse().map_err(|_| RatfunError::Syntax {
                        position: self.current_pos,
                        expected: "exponent fitting in 32 bits".to_string(),
                    })?;
                    Ok(base.pow(exp))
                }
                other => {
                    self.current = other;
                    Err(self.err_expected("unsigned integer exponent"))
                }
            }
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<RationalFunction> {
        match std::mem::replace(&mut self.current, Token::End) {
            Token::UInt(digits) => {
                self.advance()?;
                let n: BigInt = digits.parse().expect("decimal digits");
                Ok(RationalFunction::constant(self.vars, Rat::from_bigint(n)))
            }
            Token::Ident(name) => {
                let pos = self.current_pos;
                self.advance()?;
                match self.vars.index_of(&name) {
                    Some(idx) => Ok(RationalFunction::variable(self.vars, idx)),
                    None => Err(RatfunError::UnknownVariable { name, position: pos }),
                }
            }
            Token::LParen => {
                self.advance()?;
                let inner = self.expr()?;
                if self.current != Token::RParen {
                    return Err(self.err_expected("`)`"));
                }
                self.advance()?;
                Ok(inner)
            }
            Token::Minus => {
                self.advance()?;
                Ok(self.base()?.neg())
            }
            other => {
                self.current = other;
                Err(self.err_expected("integer, identifier, `(`, or `-`"))
            }
        }
    }
}

/// Parse `text` into an exact rational function over `variables`.
pub fn parse_expression(text: &str, variables: &VarSet) -> Result<RationalFunction> {
    let mut p = Parser::new(text, variables)?;
    let value = p.expr()?;
    if p.current != Token::End {
        return Err(p.err_expected("end of input"));
    }
    Ok(value)
}

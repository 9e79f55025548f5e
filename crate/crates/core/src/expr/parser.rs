use num_bigint::BigInt;

use super::ast::{Expr, Func, Var};
use crate::rational::Rational;

/// Syntax or bound error with its byte offset in the input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    return Err(ParseError {
                        pos: i,
                        msg: "decimal literals are not supported; write a fraction".into(),
                    });
                }
                out.push((start, Tok::Int(src[start..i].parse().unwrap())));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap();
                return Err(ParseError {
                    pos: i,
                    msg: format!("unexpected character '{ch}'"),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    k: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.primary()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            let neg = if *self.peek() == Tok::Minus {
                self.bump();
                true
            } else {
                false
            };
            let pos = self.pos();
            let n = match self.bump() {
                Tok::Int(n) => n,
                _ => {
                    return Err(ParseError {
                        pos,
                        msg: "exponent must be an integer literal".into(),
                    })
                }
            };
            let n: i32 = i32::try_from(&n).ok().filter(|n| *n <= 1 << 16).ok_or(ParseError {
                pos,
                msg: "exponent too large".into(),
            })?;
            base = Expr::Pow(Box::new(base), if neg { -n } else { n });
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => Ok(Expr::Num(Rational::from_bigint(n))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if name == "t" {
                    return Ok(Expr::Var(Var::T));
                }
                if let Some(func) = Func::from_name(&name) {
                    self.expect(Tok::LParen, "'(' after function name")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                let idx = name
                    .strip_prefix('x')
                    .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                    .and_then(|d| d.parse::<usize>().ok());
                match idx {
                    Some(i) if i <= self.k => Ok(Expr::Var(Var::X(i))),
                    Some(_) => Err(ParseError {
                        pos,
                        msg: format!("variable index exceeds k in '{name}' (k = {})", self.k),
                    }),
                    None => Err(ParseError {
                        pos,
                        msg: format!("unknown identifier '{name}'"),
                    }),
                }
            }
            Tok::End => Err(ParseError {
                pos,
                msg: "unexpected end of input".into(),
            }),
            _ => Err(ParseError {
                pos,
                msg: "expected a number, variable, function or '('".into(),
            }),
        }
    }
}

/// Parses a right-hand side over the variables `t, x0, .., xk`.
pub fn parse(text: &str, k: usize) -> Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        k,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.error("unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn grammar_cases() {
        let e = parse("x1^2 + t*x0", 3).unwrap();
        assert_eq!(
            e,
            Expr::Add(
                b(Expr::Pow(b(Expr::Var(Var::X(1))), 2)),
                b(Expr::Mul(b(Expr::Var(Var::T)), b(Expr::Var(Var::X(0)))))
            )
        );
        let e = parse("1/(1+t)", 3).unwrap();
        assert_eq!(
            e,
            Expr::Div(
                b(Expr::num(1)),
                b(Expr::Add(b(Expr::num(1)), b(Expr::Var(Var::T))))
            )
        );
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse("-x0^2", 3).unwrap(),
            Expr::Neg(b(Expr::Pow(b(Expr::Var(Var::X(0))), 2)))
        );
        assert_eq!(
            parse("1-2-3", 3).unwrap(),
            Expr::Sub(b(Expr::Sub(b(Expr::num(1)), b(Expr::num(2)))), b(Expr::num(3)))
        );
        assert_eq!(
            parse("t^2^3", 3).unwrap(),
            Expr::Pow(b(Expr::Pow(b(Expr::Var(Var::T)), 2)), 3)
        );
        assert_eq!(
            parse("t^-1", 3).unwrap(),
            Expr::Pow(b(Expr::Var(Var::T)), -1)
        );
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("x4", 3).unwrap_err();
        assert!(e.msg.contains("variable index exceeds k"));
        assert_eq!(e.pos, 0);
        assert_eq!(parse("t + ", 3).unwrap_err().pos, 4);
        assert_eq!(parse("t ) ", 3).unwrap_err().pos, 2);
        assert!(parse("0.5", 3).is_err());
        assert!(parse("tan(t)", 3).is_err());
        assert!(parse("t^x0", 3).is_err());
        assert!(parse("  ", 3).is_err());
    }
}

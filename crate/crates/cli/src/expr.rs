//! Arithmetic expressions in the family index `n`, used for parameter maps
//! such as `c_n = 1/(n*sqrt(ln n))`.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | primary
//! primary := number | 'n' | '(' expr ')'
//!          | ('ln' | 'sqrt') unary
//!          | 'pow' '(' expr ',' expr ')'
//! ```
//!
//! `ln` and `sqrt` bind tighter than `*`, so `ln n*2` is `(ln n)*2`.
//! Numbers are decimal literals (`2`, `0.5`).

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    N,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Ln(Box<Expr>),
    Sqrt(Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExprError(pub String);

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ExprError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<Tok>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse().map_err(|_| ExprError(format!("bad number '{s}'")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/(),".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(ExprError(format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(ExprError(format!("expected '{c}' at token {}", self.pos + 1)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let tok = self.peek().cloned().ok_or_else(|| ExprError("unexpected end of expression".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "n" => Ok(Expr::N),
                "ln" => Ok(Expr::Ln(Box::new(self.unary()?))),
                "sqrt" => Ok(Expr::Sqrt(Box::new(self.unary()?))),
                "pow" => {
                    self.expect('(')?;
                    let a = self.expr()?;
                    self.expect(',')?;
                    let b = self.expr()?;
                    self.expect(')')?;
                    Ok(Expr::Pow(Box::new(a), Box::new(b)))
                }
                other => Err(ExprError(format!("unknown name '{other}'; expected n, ln, sqrt or pow"))),
            },
            Tok::Sym(c) => Err(ExprError(format!("unexpected '{c}'"))),
        }
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ExprError> {
        let mut p = Parser { toks: lex(src)?, pos: 0 };
        if p.toks.is_empty() {
            return Err(ExprError("empty expression".into()));
        }
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(ExprError(format!("trailing input after token {}", p.pos)));
        }
        Ok(e)
    }

    pub fn eval(&self, n: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::N => n,
            Expr::Neg(a) => -a.eval(n),
            Expr::Add(a, b) => a.eval(n) + b.eval(n),
            Expr::Sub(a, b) => a.eval(n) - b.eval(n),
            Expr::Mul(a, b) => a.eval(n) * b.eval(n),
            Expr::Div(a, b) => a.eval(n) / b.eval(n),
            Expr::Ln(a) => a.eval(n).ln(),
            Expr::Sqrt(a) => a.eval(n).sqrt(),
            Expr::Pow(a, b) => a.eval(n).powf(b.eval(n)),
        }
    }

    /// Evaluate at `n`, rejecting NaN and infinite results.
    pub fn eval_finite(&self, n: f64) -> Result<f64, ExprError> {
        let v = self.eval(n);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ExprError(format!("expression is {v} at n = {n}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(src: &str, n: f64) -> f64 {
        Expr::parse(src).unwrap().eval(n)
    }

    #[test]
    fn default_maps() {
        let n: f64 = 25.0;
        assert_eq!(at("1/(n*sqrt(ln n))", n), 1.0 / (n * n.ln().sqrt()));
        assert_eq!(at("1/(2*ln n)", n), 1.0 / (2.0 * n.ln()));
        assert_eq!(at("n*n", n), 625.0);
    }

    #[test]
    fn precedence_and_unary() {
        assert_eq!(at("1+2*3", 0.0), 7.0);
        assert_eq!(at("(1+2)*3", 0.0), 9.0);
        assert_eq!(at("8/2/2", 0.0), 2.0);
        assert_eq!(at("-n+1", 3.0), -2.0);
        assert_eq!(at("2-3-4", 0.0), -5.0);
        assert_eq!(at("ln n*2", std::f64::consts::E), 2.0);
        assert_eq!(at("sqrt 16 + 1", 0.0), 5.0);
        assert_eq!(at("pow(n, 0.5)", 9.0), 3.0);
        assert_eq!(at("pow(2, n-1)", 4.0), 8.0);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["", "n +", "(n", "m", "exp(n)", "n $ 2", "pow(n)", "n n", "1..2"] {
            assert!(Expr::parse(bad).is_err(), "{bad}");
        }
        assert!(Expr::parse("ln n").unwrap().eval_finite(0.0).is_err());
    }
}

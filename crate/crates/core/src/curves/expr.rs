//! Closed-form scalar expressions.
//!
//! Grammar: `+ - * / ^`, unary minus, parentheses, numeric literals, the
//! constant `pi`, and the functions `sin cos tan sqrt exp atan`. `^` binds
//! tighter than unary minus and associates to the right.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::jets::Taylor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sqrt,
    Exp,
    Atan,
}

impl Func {
    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "atan" => Func::Atan,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Atan => "atan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var { name: String, offset: usize },
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x}"),
            Expr::Pi => f.write_str("pi"),
            Expr::Var { name, .. } => f.write_str(name),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

impl Expr {
    /// Parses a scalar expression whose free variables are drawn from `vars`.
    pub fn parse(src: &str, vars: &[&str]) -> Result<Expr> {
        let mut p = Parser::new(src, vars)?;
        let e = p.expr()?;
        p.expect_end()?;
        Ok(e)
    }

    /// Free variables, sorted, each with the offset of its first use.
    pub fn free_vars(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        self.collect_vars(&mut out);
        out.sort_by_key(|(_, off)| *off);
        let mut seen = BTreeSet::new();
        out.retain(|(n, _)| seen.insert(n.clone()));
        out
    }

    fn collect_vars(&self, out: &mut Vec<(String, usize)>) {
        match self {
            Expr::Var { name, offset } => out.push((name.clone(), *offset)),
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_vars(out),
            Expr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Num(_) | Expr::Pi => {}
        }
    }

    fn constant_value(&self) -> Option<f64> {
        match self {
            Expr::Num(x) => Some(*x),
            Expr::Pi => Some(std::f64::consts::PI),
            Expr::Var { .. } => None,
            Expr::Neg(a) => a.constant_value().map(|x| -x),
            Expr::Bin(op, a, b) => {
                let (x, y) = (a.constant_value()?, b.constant_value()?);
                Some(match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => x / y,
                    BinOp::Pow => x.powf(y),
                })
            }
            Expr::Call(func, a) => {
                let x = a.constant_value()?;
                Some(match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.tan(),
                    Func::Sqrt => x.sqrt(),
                    Func::Exp => x.exp(),
                    Func::Atan => x.atan(),
                })
            }
        }
    }

    /// Evaluates on jets. `bind` maps a variable name to its jet; `proto`
    /// fixes the base point and order of constants.
    pub fn eval<S: Taylor>(&self, bind: &dyn Fn(&str) -> Option<S>, proto: &S) -> Result<S> {
        Ok(match self {
            Expr::Num(x) => proto.constant_like(*x),
            Expr::Pi => proto.constant_like(std::f64::consts::PI),
            Expr::Var { name, offset } => bind(name).ok_or_else(|| Error::UnknownIdentifier {
                name: name.clone(),
                offset: *offset,
            })?,
            Expr::Neg(a) => a.eval(bind, proto)?.scale(-1.0),
            Expr::Bin(op, a, b) => {
                let x = a.eval(bind, proto)?;
                match op {
                    BinOp::Pow => match b.constant_value() {
                        Some(p) => x.powf(p)?,
                        None => x.ln()?.mul_t(&b.eval(bind, proto)?).exp(),
                    },
                    _ => {
                        let y = b.eval(bind, proto)?;
                        match op {
                            BinOp::Add => x.add_t(&y),
                            BinOp::Sub => x.sub_t(&y),
                            BinOp::Mul => x.mul_t(&y),
                            BinOp::Div => x.try_div(&y)?,
                            BinOp::Pow => unreachable!(),
                        }
                    }
                }
            }
            Expr::Call(func, a) => {
                let x = a.eval(bind, proto)?;
                match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.tan()?,
                    Func::Sqrt => x.sqrt()?,
                    Func::Exp => x.exp(),
                    Func::Atan => x.atan(),
                }
            }
        })
    }

    /// Plain floating-point evaluation with a single variable bound to `t`.
    pub fn eval_f64(&self, t: f64) -> Result<f64> {
        let j = crate::jets::Jet::variable(t, 0);
        Ok(self.eval(&|_| Some(j.clone()), &j)?.value())
    }
}

/// Parses `(a, b, c)`.
pub fn parse_triple(src: &str, vars: &[&str]) -> Result<[Expr; 3]> {
    let mut p = Parser::new(src, vars)?;
    let t = p.triple()?;
    p.expect_end()?;
    Ok(t)
}

/// Parses two triples separated by `;` or `,`: `(a, b, c); (d, e, f)`.
pub fn parse_triple_pair(src: &str, vars: &[&str]) -> Result<([Expr; 3], [Expr; 3])> {
    let mut p = Parser::new(src, vars)?;
    let a = p.triple()?;
    match p.peek() {
        Tok::Semi | Tok::Comma => p.bump(),
        _ => return Err(p.syntax("expected `;` between the two vectors")),
    }
    let b = p.triple()?;
    p.expect_end()?;
    Ok((a, b))
}

pub fn format_triple(t: &[Expr; 3]) -> String {
    format!("({}, {}, {})", t[0], t[1], t[2])
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Semi,
    End,
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a [&'a str],
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '0'..='9' | '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let x: f64 = text.parse().map_err(|_| Error::Syntax {
                    offset: start,
                    message: format!("malformed number `{text}`"),
                })?;
                out.push((Tok::Num(x), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            other => {
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

impl<'a> Parser<'a> {
    fn new(src: &str, vars: &'a [&'a str]) -> Result<Self> {
        Ok(Parser { toks: tokenize(src)?, pos: 0, vars })
    }

    fn peek(&self) -> Tok {
        self.toks[self.pos].0.clone()
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) {
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
    }

    fn syntax(&self, what: &str) -> Error {
        let found = match self.peek() {
            Tok::End => "end of input".to_string(),
            t => format!("{t:?}"),
        };
        Error::Syntax { offset: self.offset(), message: format!("{what}, found {found}") }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(what))
        }
    }

    fn expect_end(&self) -> Result<()> {
        if self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.syntax("expected end of input"))
        }
    }

    fn triple(&mut self) -> Result<[Expr; 3]> {
        self.expect(Tok::LParen, "expected `(`")?;
        let a = self.expr()?;
        self.expect(Tok::Comma, "expected `,`")?;
        let b = self.expr()?;
        self.expect(Tok::Comma, "expected `,`")?;
        let c = self.expr()?;
        self.expect(Tok::RParen, "expected `)`")?;
        Ok([a, b, c])
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Tok::Caret {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let offset = self.offset();
        match self.peek() {
            Tok::Num(x) => {
                self.bump();
                Ok(Expr::Num(x))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "expected `)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(func) = Func::from_name(&name) {
                    self.expect(Tok::LParen, "expected `(` after function name")?;
                    let mut args = vec![self.expr()?];
                    while self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen, "expected `)`")?;
                    if args.len() != 1 {
                        return Err(Error::ArityMismatch { name, expected: 1, found: args.len() });
                    }
                    return Ok(Expr::Call(func, Box::new(args.pop().unwrap())));
                }
                if name == "pi" {
                    return Ok(Expr::Pi);
                }
                if self.vars.contains(&name.as_str()) {
                    return Ok(Expr::Var { name, offset });
                }
                Err(Error::UnknownIdentifier { name, offset })
            }
            _ => Err(self.syntax("expected a number, name or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const V: &[&str] = &["u"];

    #[test]
    fn precedence_and_associativity() {
        let e = Expr::parse("-u^2 + 2*u/4 - 1", V).unwrap();
        assert_eq!(e.eval_f64(3.0).unwrap(), -9.0 + 1.5 - 1.0);
        let p = Expr::parse("2^3^2", V).unwrap();
        assert_eq!(p.eval_f64(0.0).unwrap(), 512.0);
        let q = Expr::parse("1 - 2 - 3", V).unwrap();
        assert_eq!(q.eval_f64(0.0).unwrap(), -4.0);
    }

    #[test]
    fn errors_carry_offsets() {
        match parse_triple("(u, ", V) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        match Expr::parse("u + w", V) {
            Err(Error::UnknownIdentifier { name, offset }) => {
                assert_eq!(name, "w");
                assert_eq!(offset, 4);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(Expr::parse("sin(u, 2)", V), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn display_round_trips() {
        for src in ["sin(u)^2 - 3.5e-7*u", "-(u - pi)/sqrt(1 + u^4)", "exp(-u)*atan(u^3)", "2^-u"] {
            let e = Expr::parse(src, V).unwrap();
            let s1 = e.to_string();
            let s2 = Expr::parse(&s1, V).unwrap().to_string();
            assert_eq!(s1, s2);
            let x = 0.37;
            assert_eq!(e.eval_f64(x).unwrap(), Expr::parse(&s1, V).unwrap().eval_f64(x).unwrap());
        }
    }

    #[test]
    fn triple_pair_accepts_both_separators() {
        assert!(parse_triple_pair("(1,0,0);(0,1,0)", V).is_ok());
        assert!(parse_triple_pair("(1,0,0),(0,1,u)", V).is_ok());
    }
}

//! Expression language for user-defined graph coordinates `φ(x, y)`, `ψ(x, y)`.
//!
//! ```text
//! expr    = term { ("+"|"-") term } ;
//! term    = factor { ("*"|"/") factor } ;
//! factor  = ["-"] base [ "^" factor ] ;
//! base    = number | "x" | "y" | "pi" | "e" | func "(" expr ")" | "(" expr ")" ;
//! func    = "sin"|"cos"|"tan"|"exp"|"log"|"sqrt"|"sinh"|"cosh"|"tanh"|"atan" ;
//! ```
//!
//! Power is right associative and binds tighter than unary minus, so
//! `-x^2` parses as `-(x^2)`.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
    Atan,
}

impl UnaryOp {
    const FUNCTIONS: [UnaryOp; 10] = [
        UnaryOp::Sin,
        UnaryOp::Cos,
        UnaryOp::Tan,
        UnaryOp::Exp,
        UnaryOp::Log,
        UnaryOp::Sqrt,
        UnaryOp::Sinh,
        UnaryOp::Cosh,
        UnaryOp::Tanh,
        UnaryOp::Atan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Tan => "tan",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Sinh => "sinh",
            UnaryOp::Cosh => "cosh",
            UnaryOp::Tanh => "tanh",
            UnaryOp::Atan => "atan",
        }
    }

    fn function(name: &str) -> Option<UnaryOp> {
        Self::FUNCTIONS.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn unary(op: UnaryOp, a: Expr) -> Self {
        Expr::Unary(op, Box::new(a))
    }

    pub fn binary(op: BinaryOp, a: Expr, b: Expr) -> Self {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }
}

/// Prints a fully parenthesized form that parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if c.is_sign_negative() => write!(f, "(-{})", -c),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::Var(Var::Y) => f.write_str("y"),
            Expr::Unary(UnaryOp::Neg, a) => write!(f, "(-{a})"),
            Expr::Unary(op, a) => write!(f, "{}({a})", op.name()),
            Expr::Binary(op, a, b) => write!(f, "({a}{}{b})", op.symbol()),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: expected one of {expected:?}, found {found}")]
    Syntax { offset: usize, expected: Vec<&'static str>, found: String },
    #[error("unknown identifier '{name}' at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("domain error in '{node}': {reason}")]
    Domain { node: String, reason: &'static str },
}

const BASE_START: &[&str] = &["number", "x", "y", "pi", "e", "function", "(", "-"];

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn found(&self) -> String {
        match self.src.get(self.pos) {
            Some(&c) => format!("'{}'", c as char),
            None => "end of input".to_string(),
        }
    }

    fn error(&self, expected: &[&'static str]) -> ExprError {
        ExprError::Syntax { offset: self.pos, expected: expected.to_vec(), found: self.found() }
    }

    fn expect(&mut self, c: u8, name: &'static str) -> Result<(), ExprError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinaryOp::Add,
                Some(b'-') => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinaryOp::Mul,
                Some(b'/') => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::binary(op, lhs, self.factor()?);
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let negate = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            base = Expr::binary(BinaryOp::Pow, base, self.factor()?);
        }
        Ok(if negate { Expr::unary(UnaryOp::Neg, base) } else { base })
    }

    fn base(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')', ")")?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            _ => Err(self.error(BASE_START)),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            self.pos = start;
            return Err(self.error(&["number"]));
        }
        // An exponent needs at least one digit; otherwise the 'e' is left for
        // the caller (and rejected there, since juxtaposition is not allowed).
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>().map(Expr::Const).map_err(|_| {
            self.pos = start;
            self.error(&["number"])
        })
    }

    fn identifier(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match name {
            "x" => Ok(Expr::Var(Var::X)),
            "y" => Ok(Expr::Var(Var::Y)),
            "pi" => Ok(Expr::Const(std::f64::consts::PI)),
            "e" => Ok(Expr::Const(std::f64::consts::E)),
            _ => match UnaryOp::function(name) {
                Some(op) => {
                    self.expect(b'(', "(")?;
                    let arg = self.expr()?;
                    self.expect(b')', ")")?;
                    Ok(Expr::unary(op, arg))
                }
                None => Err(ExprError::UnknownIdentifier { name: name.to_string(), offset: start }),
            },
        }
    }
}

/// Parses `text` into an expression tree. Whitespace is ignored between tokens.
pub fn parse_expression(text: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(e)
}

impl std::str::FromStr for Expr {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expression(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x() -> Expr {
        Expr::Var(Var::X)
    }
    fn y() -> Expr {
        Expr::Var(Var::Y)
    }
    fn c(v: f64) -> Expr {
        Expr::Const(v)
    }

    #[test]
    fn parses_quadratic_difference() {
        let expected = Expr::binary(
            BinaryOp::Div,
            Expr::binary(
                BinaryOp::Sub,
                Expr::binary(BinaryOp::Pow, x(), c(2.0)),
                Expr::binary(BinaryOp::Pow, y(), c(2.0)),
            ),
            c(2.0),
        );
        assert_eq!(parse_expression("(x^2 - y^2)/2").unwrap(), expected);
        assert_eq!(parse_expression("  ( x ^ 2-y^2 ) /  2 ").unwrap(), expected);
    }

    #[test]
    fn parses_function_product() {
        assert_eq!(
            parse_expression("sin(x)*cosh(y)").unwrap(),
            Expr::binary(BinaryOp::Mul, Expr::unary(UnaryOp::Sin, x()), Expr::unary(UnaryOp::Cosh, y()))
        );
    }

    #[test]
    fn reports_offset_of_malformed_operand() {
        match parse_expression("x + * y") {
            Err(ExprError::Syntax { offset, expected, .. }) => {
                assert_eq!(offset, 4);
                assert!(expected.contains(&"number") && expected.contains(&"("));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse_expression("-x^2").unwrap(),
            Expr::unary(UnaryOp::Neg, Expr::binary(BinaryOp::Pow, x(), c(2.0)))
        );
        assert_eq!(
            parse_expression("2^3^2").unwrap(),
            Expr::binary(BinaryOp::Pow, c(2.0), Expr::binary(BinaryOp::Pow, c(3.0), c(2.0)))
        );
        assert_eq!(
            parse_expression("1-2-3").unwrap(),
            Expr::binary(BinaryOp::Sub, Expr::binary(BinaryOp::Sub, c(1.0), c(2.0)), c(3.0))
        );
        assert_eq!(
            parse_expression("x^-1").unwrap(),
            Expr::binary(BinaryOp::Pow, x(), Expr::unary(UnaryOp::Neg, c(1.0)))
        );
    }

    #[test]
    fn numbers_and_constants() {
        assert_eq!(parse_expression("2.5e-3").unwrap(), c(2.5e-3));
        assert_eq!(parse_expression("0.5").unwrap(), c(0.5));
        assert_eq!(parse_expression("1E2").unwrap(), c(100.0));
        assert_eq!(parse_expression("pi").unwrap(), c(std::f64::consts::PI));
        assert_eq!(
            parse_expression("2*e").unwrap(),
            Expr::binary(BinaryOp::Mul, c(2.0), c(std::f64::consts::E))
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_expression(""), Err(ExprError::Syntax { offset: 0, .. })));
        assert!(matches!(parse_expression("z + 1"), Err(ExprError::UnknownIdentifier { offset: 0, .. })));
        assert!(matches!(parse_expression("foo(x)"), Err(ExprError::UnknownIdentifier { .. })));
        assert!(matches!(parse_expression("sin x"), Err(ExprError::Syntax { offset: 4, .. })));
        assert!(matches!(parse_expression("(x + 1"), Err(ExprError::Syntax { offset: 6, .. })));
        assert!(matches!(parse_expression("2e"), Err(ExprError::Syntax { offset: 1, .. })));
        assert!(matches!(parse_expression("x y"), Err(ExprError::Syntax { offset: 2, .. })));
    }

    pub(crate) fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0u32..1000).prop_map(|n| Expr::Const(f64::from(n) / 8.0)),
            (0.0f64..1e6).prop_map(Expr::Const),
            Just(Expr::Var(Var::X)),
            Just(Expr::Var(Var::Y)),
        ];
        leaf.prop_recursive(5, 48, 2, |inner| {
            let unary = prop_oneof![
                Just(UnaryOp::Neg),
                Just(UnaryOp::Sin),
                Just(UnaryOp::Cos),
                Just(UnaryOp::Tan),
                Just(UnaryOp::Exp),
                Just(UnaryOp::Log),
                Just(UnaryOp::Sqrt),
                Just(UnaryOp::Sinh),
                Just(UnaryOp::Cosh),
                Just(UnaryOp::Tanh),
                Just(UnaryOp::Atan),
            ];
            let binary = prop_oneof![
                Just(BinaryOp::Add),
                Just(BinaryOp::Sub),
                Just(BinaryOp::Mul),
                Just(BinaryOp::Div),
                Just(BinaryOp::Pow),
            ];
            prop_oneof![
                (unary, inner.clone()).prop_map(|(op, a)| Expr::unary(op, a)),
                (binary, inner.clone(), inner).prop_map(|(op, a, b)| Expr::binary(op, a, b)),
            ]
        })
    }

    #[test]
    fn negated_negative_constant_prints_parseably() {
        let e = Expr::unary(UnaryOp::Neg, Expr::Const(-0.03));
        let back = parse_expression(&e.to_string()).unwrap();
        assert_eq!(crate::jet::eval_value(&back, 0.0f64, 0.0).unwrap(), 0.03);
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(e in arb_expr()) {
            let printed = e.to_string();
            let reparsed = parse_expression(&printed).unwrap();
            prop_assert_eq!(&reparsed, &e);
            prop_assert_eq!(parse_expression(&reparsed.to_string()).unwrap(), e);
        }
    }
}

//! Second-order forward-mode jets in two variables and expression evaluation.

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::Serialize;

use crate::expr::{BinaryOp, Expr, ExprError, UnaryOp, Var};
use crate::scalar::Real;

/// `f(x, y)` together with its first and second partial derivatives.
/// The mixed partial has a single slot.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalarJet2<T> {
    pub value: T,
    pub dx: T,
    pub dy: T,
    pub dxx: T,
    pub dxy: T,
    pub dyy: T,
}

impl<T: Real> ScalarJet2<T> {
    pub fn constant(value: T) -> Self {
        let z = T::zero();
        Self { value, dx: z, dy: z, dxx: z, dxy: z, dyy: z }
    }

    pub fn var_x(x: T) -> Self {
        Self { dx: T::one(), ..Self::constant(x) }
    }

    pub fn var_y(y: T) -> Self {
        Self { dy: T::one(), ..Self::constant(y) }
    }

    pub fn is_constant(&self) -> bool {
        [self.dx, self.dy, self.dxx, self.dxy, self.dyy].iter().all(|d| d.is_zero())
    }

    fn is_finite(&self) -> bool {
        [self.value, self.dx, self.dy, self.dxx, self.dxy, self.dyy].iter().all(|d| d.is_finite())
    }

    /// `g(self)` for a scalar `g` with `g = f0`, `g' = f1`, `g'' = f2` at `self.value`.
    pub fn compose(self, f0: T, f1: T, f2: T) -> Self {
        Self {
            value: f0,
            dx: f1 * self.dx,
            dy: f1 * self.dy,
            dxx: f2 * self.dx * self.dx + f1 * self.dxx,
            dxy: f2 * self.dx * self.dy + f1 * self.dxy,
            dyy: f2 * self.dy * self.dy + f1 * self.dyy,
        }
    }

    pub fn recip(self) -> Self {
        let r = self.value.recip();
        self.compose(r, -r * r, T::lit(2.0) * r * r * r)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(c, -s, -c)
    }

    pub fn tan(self) -> Self {
        let t = self.value.tan();
        let d = T::one() + t * t;
        self.compose(t, d, T::lit(2.0) * t * d)
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    pub fn ln(self) -> Self {
        let r = self.value.recip();
        self.compose(self.value.ln(), r, -r * r)
    }

    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        let d = T::lit(0.5) / s;
        self.compose(s, d, -d / (T::lit(2.0) * self.value))
    }

    pub fn sinh(self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.compose(s, c, s)
    }

    pub fn cosh(self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.compose(c, s, c)
    }

    pub fn tanh(self) -> Self {
        let t = self.value.tanh();
        let d = T::one() - t * t;
        self.compose(t, d, -T::lit(2.0) * t * d)
    }

    pub fn atan(self) -> Self {
        let d = (T::one() + self.value * self.value).recip();
        self.compose(self.value.atan(), d, -T::lit(2.0) * self.value * d * d)
    }

    /// Integer power, exact for every `n` (no logarithm involved).
    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::constant(T::one());
        }
        let a = self.value;
        let nf = T::from_i32(n).expect("i32 fits");
        let f1 = if n == 1 { T::one() } else { nf * a.powi(n - 1) };
        let f2 = match n {
            1 => T::zero(),
            2 => T::lit(2.0),
            _ => nf * (nf - T::one()) * a.powi(n - 2),
        };
        self.compose(a.powi(n), f1, f2)
    }
}

impl<T: Real> Add for ScalarJet2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            value: self.value + o.value,
            dx: self.dx + o.dx,
            dy: self.dy + o.dy,
            dxx: self.dxx + o.dxx,
            dxy: self.dxy + o.dxy,
            dyy: self.dyy + o.dyy,
        }
    }
}

impl<T: Real> Sub for ScalarJet2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Neg for ScalarJet2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: -self.value,
            dx: -self.dx,
            dy: -self.dy,
            dxx: -self.dxx,
            dxy: -self.dxy,
            dyy: -self.dyy,
        }
    }
}

impl<T: Real> Mul for ScalarJet2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self, o);
        Self {
            value: a.value * b.value,
            dx: a.dx * b.value + a.value * b.dx,
            dy: a.dy * b.value + a.value * b.dy,
            dxx: a.dxx * b.value + (a.dx * b.dx + a.dx * b.dx) + a.value * b.dxx,
            dxy: a.dxy * b.value + a.dx * b.dy + a.dy * b.dx + a.value * b.dxy,
            dyy: a.dyy * b.value + (a.dy * b.dy + a.dy * b.dy) + a.value * b.dyy,
        }
    }
}

impl<T: Real> Div for ScalarJet2<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

fn domain(node: &Expr, reason: &'static str) -> ExprError {
    ExprError::Domain { node: node.to_string(), reason }
}

/// Evaluates `ast` and all of its first and second partial derivatives at `(x, y)`.
pub fn eval_jet<T: Real>(ast: &Expr, x: T, y: T) -> Result<ScalarJet2<T>, ExprError> {
    let out = match ast {
        Expr::Const(c) => ScalarJet2::constant(T::lit(*c)),
        Expr::Var(Var::X) => ScalarJet2::var_x(x),
        Expr::Var(Var::Y) => ScalarJet2::var_y(y),
        Expr::Unary(op, a) => {
            let a = eval_jet(a, x, y)?;
            match op {
                UnaryOp::Neg => -a,
                UnaryOp::Sin => a.sin(),
                UnaryOp::Cos => a.cos(),
                UnaryOp::Tan => a.tan(),
                UnaryOp::Exp => a.exp(),
                UnaryOp::Log if a.value > T::zero() => a.ln(),
                UnaryOp::Log => return Err(domain(ast, "logarithm of a non-positive value")),
                UnaryOp::Sqrt if a.value > T::zero() => a.sqrt(),
                UnaryOp::Sqrt => return Err(domain(ast, "square root of a non-positive value")),
                UnaryOp::Sinh => a.sinh(),
                UnaryOp::Cosh => a.cosh(),
                UnaryOp::Tanh => a.tanh(),
                UnaryOp::Atan => a.atan(),
            }
        }
        Expr::Binary(op, a, b) => {
            let a = eval_jet(a, x, y)?;
            let b = eval_jet(b, x, y)?;
            match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div if b.value.is_zero() => return Err(domain(ast, "division by zero")),
                BinaryOp::Div => a / b,
                BinaryOp::Pow => pow(ast, a, b)?,
            }
        }
    };
    if !out.is_finite() {
        return Err(domain(ast, "non-finite result"));
    }
    Ok(out)
}

fn pow<T: Real>(node: &Expr, base: ScalarJet2<T>, exponent: ScalarJet2<T>) -> Result<ScalarJet2<T>, ExprError> {
    let n = exponent.value;
    if exponent.is_constant() && n == n.round() && n.abs() <= T::lit(f64::from(i32::MAX)) {
        let n = n.to_i32().expect("bounded integer");
        if n < 0 && base.value.is_zero() {
            return Err(domain(node, "zero raised to a negative power"));
        }
        return Ok(base.powi(n));
    }
    if !(base.value > T::zero()) {
        return Err(domain(node, "non-integer power of a non-positive base"));
    }
    Ok((exponent * base.ln()).exp())
}

/// Plain value of `ast` at `(x, y)` with the same domain rules as [`eval_jet`].
pub fn eval_value<T: Real>(ast: &Expr, x: T, y: T) -> Result<T, ExprError> {
    let out = match ast {
        Expr::Const(c) => T::lit(*c),
        Expr::Var(Var::X) => x,
        Expr::Var(Var::Y) => y,
        Expr::Unary(op, a) => {
            let a = eval_value(a, x, y)?;
            match op {
                UnaryOp::Neg => -a,
                UnaryOp::Sin => a.sin(),
                UnaryOp::Cos => a.cos(),
                UnaryOp::Tan => a.tan(),
                UnaryOp::Exp => a.exp(),
                UnaryOp::Log if a > T::zero() => a.ln(),
                UnaryOp::Log => return Err(domain(ast, "logarithm of a non-positive value")),
                UnaryOp::Sqrt if a > T::zero() => a.sqrt(),
                UnaryOp::Sqrt => return Err(domain(ast, "square root of a non-positive value")),
                UnaryOp::Sinh => a.sinh(),
                UnaryOp::Cosh => a.cosh(),
                UnaryOp::Tanh => a.tanh(),
                UnaryOp::Atan => a.atan(),
            }
        }
        Expr::Binary(op, a, b) => {
            let a = eval_value(a, x, y)?;
            let b = eval_value(b, x, y)?;
            match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div if b.is_zero() => return Err(domain(ast, "division by zero")),
                BinaryOp::Div => a / b,
                BinaryOp::Pow => {
                    let int_exp = b == b.round() && !contains_var(ast_rhs(ast));
                    if int_exp {
                        if b < T::zero() && a.is_zero() {
                            return Err(domain(ast, "zero raised to a negative power"));
                        }
                        a.powi(b.to_i32().unwrap_or(i32::MAX))
                    } else if a > T::zero() {
                        a.powf(b)
                    } else {
                        return Err(domain(ast, "non-integer power of a non-positive base"));
                    }
                }
            }
        }
    };
    if !out.is_finite() {
        return Err(domain(ast, "non-finite result"));
    }
    Ok(out)
}

fn ast_rhs(e: &Expr) -> &Expr {
    match e {
        Expr::Binary(_, _, b) => b,
        _ => e,
    }
}

fn contains_var(e: &Expr) -> bool {
    match e {
        Expr::Const(_) => false,
        Expr::Var(_) => true,
        Expr::Unary(_, a) => contains_var(a),
        Expr::Binary(_, a, b) => contains_var(a) || contains_var(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use approx::assert_abs_diff_eq;

    fn jet(src: &str, x: f64, y: f64) -> ScalarJet2<f64> {
        eval_jet(&parse_expression(src).unwrap(), x, y).unwrap()
    }

    #[test]
    fn polynomial_jets() {
        let j = jet("(x^2-y^2)/2", 1.0, 2.0);
        assert_eq!((j.value, j.dx, j.dy, j.dxx, j.dyy, j.dxy), (-1.5, 1.0, -2.0, 1.0, -1.0, 0.0));
        let j = jet("x*y", 3.0, 5.0);
        assert_eq!((j.value, j.dx, j.dy, j.dxy, j.dxx, j.dyy), (15.0, 5.0, 3.0, 1.0, 0.0, 0.0));
    }

    #[test]
    fn transcendental_jet() {
        // exp(x) sin(y) at (0, pi/2): f = 1, fx = 1, fy = cos = 0, fxx = 1, fyy = -1, fxy = 0
        let j = jet("exp(x)*sin(y)", 0.0, std::f64::consts::FRAC_PI_2);
        assert_abs_diff_eq!(j.value, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j.dx, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j.dy, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j.dxx, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j.dyy, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j.dxy, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn integer_powers_are_exact_including_at_zero() {
        let j = jet("x^3", 0.0, 0.0);
        assert_eq!((j.value, j.dx, j.dxx), (0.0, 0.0, 0.0));
        let j = jet("x^2", 0.0, 0.0);
        assert_eq!((j.value, j.dx, j.dxx), (0.0, 0.0, 2.0));
        let j = jet("(-2)^3", 0.0, 0.0);
        assert_eq!(j.value, -8.0);
        let j = jet("x^-2", 2.0, 0.0);
        assert_eq!((j.value, j.dx, j.dxx), (0.25, -0.25, 0.375));
    }

    #[test]
    fn domain_errors_name_the_node() {
        let e = eval_jet(&parse_expression("1 + log(x - 1)").unwrap(), 0.5, 0.0).unwrap_err();
        assert_eq!(e, ExprError::Domain { node: "log((x-1))".into(), reason: "logarithm of a non-positive value" });
        assert!(matches!(eval_jet::<f64>(&parse_expression("sqrt(x)").unwrap(), 0.0, 0.0), Err(ExprError::Domain { .. })));
        assert!(matches!(eval_jet::<f64>(&parse_expression("x^0.5").unwrap(), -1.0, 0.0), Err(ExprError::Domain { .. })));
        assert!(matches!(eval_jet::<f64>(&parse_expression("1/x").unwrap(), 0.0, 0.0), Err(ExprError::Domain { .. })));
        assert!(matches!(eval_jet::<f64>(&parse_expression("x^-1").unwrap(), 0.0, 0.0), Err(ExprError::Domain { .. })));
        assert!(matches!(eval_value::<f64>(&parse_expression("x^0.5").unwrap(), -1.0, 0.0), Err(ExprError::Domain { .. })));
    }

    #[test]
    fn general_power_matches_exp_log() {
        let j = jet("x^y", 2.0, 0.5);
        let v = 2f64.powf(0.5);
        assert_abs_diff_eq!(j.value, v, epsilon = 1e-15);
        assert_abs_diff_eq!(j.dx, 0.5 * 2f64.powf(-0.5), epsilon = 1e-15);
        assert_abs_diff_eq!(j.dy, v * 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(j.dxy, 2f64.powf(-0.5) * (1.0 + 0.5 * 2f64.ln()), epsilon = 1e-14);
    }

    #[test]
    fn value_evaluator_agrees_with_jet() {
        for src in ["sin(x)*cosh(y)", "atan(x/y) - tanh(x*y)", "sqrt(1 + x^2) * exp(-y)", "tan(x) + log(2 + y)"] {
            let ast = parse_expression(src).unwrap();
            let j: ScalarJet2<f64> = eval_jet(&ast, 0.3, 0.7).unwrap();
            assert_abs_diff_eq!(eval_value(&ast, 0.3, 0.7).unwrap(), j.value, epsilon = 1e-15);
        }
    }
}

use super::ast::{Expr, Func};
use crate::error::{Error, Result};
use crate::jets::{Jet, Order, Space};
use crate::rational::Rational;

/// Taylor expansion of `e` at `point` (values of `t, x0, ..`), valid to
/// total degree `order`.
pub fn expand_to_jet(e: &Expr, point: &[Rational], order: u32) -> Result<Jet> {
    let space = Space::series(point.len());
    Expander {
        space,
        point,
        order: Order::Finite(order),
    }
    .go(e)
}

struct Expander<'a> {
    space: Space,
    point: &'a [Rational],
    order: Order,
}

impl Expander<'_> {
    fn go(&self, e: &Expr) -> Result<Jet> {
        Ok(match e {
            Expr::Num(q) => Jet::constant(self.space, q.clone(), self.order),
            Expr::Var(v) => {
                let i = v.index();
                if i >= self.point.len() {
                    return Err(Error::Input(format!("variable {v} has no value at the point")));
                }
                Jet::coordinate(self.space, i, &self.point[i]).with_order(self.order)
            }
            Expr::Neg(a) => self.go(a)?.neg(),
            Expr::Add(a, b) => self.go(a)?.add(&self.go(b)?)?,
            Expr::Sub(a, b) => self.go(a)?.sub(&self.go(b)?)?,
            Expr::Mul(a, b) => self.go(a)?.mul(&self.go(b)?)?,
            Expr::Div(a, b) => self.go(a)?.div(&self.go(b)?)?,
            Expr::Pow(a, n) => pow(&self.go(a)?, *n)?,
            Expr::Call(f, a) => elementary(*f, &self.go(a)?)?,
        })
    }
}

/// Integer power by repeated squaring; negative exponents invert first.
pub fn pow(base: &Jet, n: i32) -> Result<Jet> {
    let mut b = if n < 0 { base.inv()? } else { base.clone() };
    let mut n = n.unsigned_abs();
    let mut acc = Jet::one(base.space()).with_order(base.order());
    while n > 0 {
        if n & 1 == 1 {
            acc = acc.mul(&b)?;
        }
        n >>= 1;
        if n > 0 {
            b = b.mul(&b)?;
        }
    }
    Ok(acc)
}

/// `sum_n coeffs[n] * r^n` by Horner's rule. `r` must have no constant
/// term, so `r^n` vanishes beyond the validity order once `n` exceeds it.
fn compose(r: &Jet, coeffs: impl Fn(u32) -> Rational) -> Result<Jet> {
    let n_max = r.order().finite().expect("finite order");
    let mut acc = Jet::constant(r.space(), coeffs(n_max), r.order());
    for n in (0..n_max).rev() {
        acc = acc
            .mul(r)?
            .add(&Jet::constant(r.space(), coeffs(n), r.order()))?;
    }
    Ok(acc)
}

fn factorial(n: u32) -> Rational {
    (1..=n as i64).fold(Rational::one(), |a, i| &a * &Rational::from_int(i))
}

/// Applies an elementary function by splitting off the constant term.
/// Only points where the result keeps a rational constant term are allowed.
pub fn elementary(f: Func, a: &Jet) -> Result<Jet> {
    let c = a.constant_term();
    let c_jet = Jet::constant(a.space(), c.clone(), a.order());
    let r = a.sub(&c_jet)?;
    let irrational = || {
        Error::Domain(format!(
            "{}({c}) is irrational; choose an expansion point where the argument is exact",
            f.name()
        ))
    };
    match f {
        Func::Exp => {
            if !c.is_zero() {
                return Err(irrational());
            }
            compose(&r, |n| factorial(n).recip().unwrap())
        }
        Func::Sin | Func::Cos => {
            if !c.is_zero() {
                return Err(irrational());
            }
            let odd = f == Func::Sin;
            compose(&r, |n| {
                if (n % 2 == 1) != odd {
                    return Rational::zero();
                }
                let sign = if (n / 2) % 2 == 0 { 1 } else { -1 };
                &Rational::from_int(sign) / &factorial(n)
            })
        }
        Func::Log => {
            if c.signum() <= 0 {
                return Err(Error::Domain(format!("log of non-positive value {c}")));
            }
            if !c.is_one() {
                return Err(irrational());
            }
            compose(&r, |n| {
                if n == 0 {
                    Rational::zero()
                } else {
                    let s = if n % 2 == 1 { 1 } else { -1 };
                    Rational::new(s, n as i64)
                }
            })
        }
        Func::Sqrt => {
            if c.signum() <= 0 {
                return Err(Error::Domain(format!("sqrt of non-positive value {c}")));
            }
            let s = c.sqrt_exact().ok_or_else(irrational)?;
            let scaled = r.scale(&c.recip().unwrap());
            // binomial series of (1 + x)^(1/2)
            let series = compose(&scaled, |n| {
                let mut b = Rational::one();
                for j in 0..n as i64 {
                    b = &b * &Rational::new(1 - 2 * j, 2 * (j + 1));
                }
                b
            })?;
            Ok(series.scale(&s))
        }
    }
}

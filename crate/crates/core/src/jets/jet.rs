use std::fmt;

use rustc_hash::FxHashMap;

use super::{JetError, Mono, Order, Space};
use crate::rational::Rational;

/// One stored coefficient. `deg` caches the series degree of `mono`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub deg: u32,
    pub mono: Mono,
    pub coeff: Rational,
}

/// A truncated power series at a point, see the module docs.
///
/// Invariants: no stored coefficient is zero, no stored term exceeds the
/// validity order, and terms are sorted by `(deg, mono)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Jet {
    space: Space,
    order: Order,
    terms: Vec<Term>,
}

impl Jet {
    pub fn zero(space: Space, order: Order) -> Self {
        Jet {
            space,
            order,
            terms: Vec::new(),
        }
    }

    pub fn constant(space: Space, c: Rational, order: Order) -> Self {
        Self::monomial(space, Mono::ONE, c, order)
    }

    pub fn one(space: Space) -> Self {
        Self::constant(space, Rational::one(), Order::Exact)
    }

    pub fn monomial(space: Space, mono: Mono, c: Rational, order: Order) -> Self {
        let deg = mono.degree(space.n_series());
        let mut j = Jet::zero(space, order);
        if !c.is_zero() && order.admits(deg) {
            j.terms.push(Term {
                deg,
                mono,
                coeff: c,
            });
        }
        j
    }

    /// Coordinate function of variable `var`: `value + u_var` for a series
    /// variable centred at `value`, the bare monomial for an exact one.
    pub fn coordinate(space: Space, var: usize, value: &Rational) -> Self {
        let mut terms = Vec::new();
        if space.is_series(var) {
            if !value.is_zero() {
                terms.push((Mono::ONE, value.clone()));
            }
            terms.push((Mono::unit(var), Rational::one()));
        } else {
            terms.push((Mono::unit(var), Rational::one()));
        }
        Jet::from_terms(space, Order::Exact, terms)
    }

    /// Builds a jet from arbitrary (monomial, coefficient) pairs; duplicates
    /// are summed, zeros and terms beyond `order` dropped.
    pub fn from_terms(
        space: Space,
        order: Order,
        terms: impl IntoIterator<Item = (Mono, Rational)>,
    ) -> Self {
        let mut acc: FxHashMap<Mono, Rational> = FxHashMap::default();
        for (m, c) in terms {
            *acc.entry(m).or_default() += &c;
        }
        Self::from_map(space, order, acc)
    }

    fn from_map(space: Space, order: Order, acc: FxHashMap<Mono, Rational>) -> Self {
        let ns = space.n_series();
        let mut terms: Vec<Term> = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(mono, coeff)| Term {
                deg: mono.degree(ns),
                mono,
                coeff,
            })
            .filter(|t| order.admits(t.deg))
            .collect();
        terms.sort_unstable_by_key(|a| (a.deg, a.mono));
        Jet {
            space,
            order,
            terms,
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// All coefficients up to the validity order vanish.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest series degree present, `None` for the zero jet.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.first().map(|t| t.deg)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.mono == Mono::ONE)
    }

    /// Coefficient of the monomial with the given exponents; asking beyond
    /// the validity order is an error rather than a silent zero.
    pub fn coeff(&self, exps: &[i32]) -> Result<Rational, JetError> {
        let m = Mono::from_exponents(exps);
        self.coeff_mono(m)
    }

    pub fn coeff_mono(&self, m: Mono) -> Result<Rational, JetError> {
        let deg = m.degree(self.space.n_series());
        if let Order::Finite(n) = self.order {
            if deg > n {
                return Err(JetError::BeyondOrder { degree: deg, order: n });
            }
        }
        Ok(self
            .terms
            .iter()
            .find(|t| t.mono == m)
            .map(|t| t.coeff.clone())
            .unwrap_or_default())
    }

    /// Drops everything above `order` (no-op when already lower).
    pub fn truncate(&self, order: Order) -> Jet {
        let order = self.order.min(order);
        Jet {
            space: self.space,
            order,
            terms: self
                .terms
                .iter()
                .filter(|t| order.admits(t.deg))
                .cloned()
                .collect(),
        }
    }

    pub fn with_order(mut self, order: Order) -> Jet {
        if order < self.order {
            self.terms.retain(|t| order.admits(t.deg));
            self.order = order;
        }
        self
    }

    fn check(&self, other: &Jet) -> Result<(), JetError> {
        if self.space != other.space {
            Err(JetError::SpaceMismatch)
        } else {
            Ok(())
        }
    }

    fn combine(&self, other: &Jet, sign: bool) -> Result<Jet, JetError> {
        self.check(other)?;
        let order = self.order.min(other.order);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        let key = |t: &Term| (t.deg, t.mono);
        while i < a.len() || j < b.len() {
            let take = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => key(x).cmp(&key(y)),
                (Some(_), None) => std::cmp::Ordering::Less,
                _ => std::cmp::Ordering::Greater,
            };
            let t = match take {
                std::cmp::Ordering::Less => {
                    i += 1;
                    a[i - 1].clone()
                }
                std::cmp::Ordering::Greater => {
                    j += 1;
                    let mut t = b[j - 1].clone();
                    if sign {
                        t.coeff = -t.coeff;
                    }
                    t
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                    let coeff = if sign {
                        &a[i - 1].coeff - &b[j - 1].coeff
                    } else {
                        &a[i - 1].coeff + &b[j - 1].coeff
                    };
                    if coeff.is_zero() {
                        continue;
                    }
                    Term {
                        deg: a[i - 1].deg,
                        mono: a[i - 1].mono,
                        coeff,
                    }
                }
            };
            if order.admits(t.deg) {
                out.push(t);
            }
        }
        Ok(Jet {
            space: self.space,
            order,
            terms: out,
        })
    }

    pub fn add(&self, other: &Jet) -> Result<Jet, JetError> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet, JetError> {
        self.combine(other, true)
    }

    pub fn neg(&self) -> Jet {
        Jet {
            space: self.space,
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    deg: t.deg,
                    mono: t.mono,
                    coeff: -&t.coeff,
                })
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Jet {
        if c.is_zero() {
            return Jet::zero(self.space, self.order);
        }
        if c.is_one() {
            return self.clone();
        }
        Jet {
            space: self.space,
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    deg: t.deg,
                    mono: t.mono,
                    coeff: &t.coeff * c,
                })
                .collect(),
        }
    }

    /// Multiplies by `c * m`. When `m` involves series variables the result
    /// is re-truncated.
    pub fn mul_monomial(&self, m: Mono, c: &Rational) -> Jet {
        if c.is_zero() {
            return Jet::zero(self.space, self.order);
        }
        let ns = self.space.n_series();
        let shift = m.degree(ns);
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .map(|t| Term {
                deg: t.deg + shift,
                mono: t.mono.mul(m),
                coeff: &t.coeff * c,
            })
            .filter(|t| self.order.admits(t.deg))
            .collect();
        if m.exact_part(ns) != Mono::ONE {
            terms.sort_unstable_by_key(|a| (a.deg, a.mono));
        }
        Jet {
            space: self.space,
            order: self.order,
            terms,
        }
    }

    /// Truncated product; result order is the smaller operand order.
    pub fn mul(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check(other)?;
        let order = self.order.min(other.order);
        if self.is_zero() || other.is_zero() {
            return Ok(Jet::zero(self.space, order));
        }
        // monomial operands avoid the hash accumulator
        if self.terms.len() == 1 {
            let t = &self.terms[0];
            return Ok(other.mul_monomial(t.mono, &t.coeff).with_order(order));
        }
        if other.terms.len() == 1 {
            let t = &other.terms[0];
            return Ok(self.mul_monomial(t.mono, &t.coeff).with_order(order));
        }
        let limit = order.finite().unwrap_or(u32::MAX);
        let (a, b) = if self.terms.len() <= other.terms.len() {
            (&self.terms, &other.terms)
        } else {
            (&other.terms, &self.terms)
        };
        let mut acc: FxHashMap<Mono, Rational> =
            FxHashMap::with_capacity_and_hasher(a.len().max(b.len()) * 2, Default::default());
        for ta in a {
            if ta.deg > limit {
                break;
            }
            let room = limit - ta.deg;
            for tb in b {
                if tb.deg > room {
                    break;
                }
                acc.entry(ta.mono.mul(tb.mono))
                    .or_default()
                    .add_mul(&ta.coeff, &tb.coeff);
            }
        }
        Ok(Jet::from_map(self.space, order, acc))
    }

    /// Degree-0 part: the terms that survive evaluation at the series point.
    fn leading(&self) -> &[Term] {
        let end = self.terms.partition_point(|t| t.deg == 0);
        &self.terms[..end]
    }

    /// Multiplicative inverse. The degree-0 part must be a single unit
    /// monomial `c * m` (for series-only jets: a nonzero constant term).
    pub fn inv(&self) -> Result<Jet, JetError> {
        let lead = self.leading();
        if lead.len() != 1 || !self.space.is_unit_mono(lead[0].mono) {
            return Err(JetError::NotInvertible);
        }
        let m = lead[0].mono;
        let c_inv = lead[0].coeff.recip().ok_or(JetError::NotInvertible)?;
        let m_inv = Mono::ONE.div(m);
        if self.terms.len() == 1 {
            return Ok(Jet::monomial(self.space, m_inv, c_inv, self.order));
        }
        let limit = match self.order {
            Order::Finite(n) => n,
            Order::Exact => return Err(JetError::UnboundedInverse),
        };
        // u = self / (c m) = 1 + r with r of positive degree;
        // inverse of u by the graded recursion b_d = -sum_{j>=1} r_j b_{d-j}
        let r: Vec<Term> = self.terms[1..]
            .iter()
            .map(|t| Term {
                deg: t.deg,
                mono: t.mono.div(m),
                coeff: &t.coeff * &c_inv,
            })
            .collect();
        let mut graded: Vec<Vec<(Mono, Rational)>> = vec![vec![(Mono::ONE, Rational::one())]];
        for d in 1..=limit {
            let mut acc: FxHashMap<Mono, Rational> = FxHashMap::default();
            for rt in r.iter().take_while(|t| t.deg <= d) {
                for (bm, bc) in &graded[(d - rt.deg) as usize] {
                    acc.entry(rt.mono.mul(*bm))
                        .or_default()
                        .add_mul(&rt.coeff, bc);
                }
            }
            let mut level: Vec<(Mono, Rational)> = acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(mm, c)| (mm, -c))
                .collect();
            level.sort_unstable_by_key(|(mm, _)| *mm);
            graded.push(level);
        }
        let terms = graded.into_iter().flatten().map(|(mm, c)| (mm.mul(m_inv), &c * &c_inv));
        Ok(Jet::from_terms(self.space, self.order, terms))
    }

    /// `self * other^{-1}`.
    pub fn div(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check(other)?;
        let inv = other.inv()?;
        self.mul(&inv)
    }

    /// Formal partial derivative. Along a series variable the validity order
    /// drops by one; along an exact variable nothing is lost.
    pub fn partial(&self, var: usize) -> Result<Jet, JetError> {
        if var >= self.space.nvars() {
            return Err(JetError::BadVariable(var));
        }
        let series = self.space.is_series(var);
        let order = if series { self.order.lower()? } else { self.order };
        let unit = Mono::unit(var);
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .filter(|t| t.mono.exp(var) != 0)
            .map(|t| Term {
                deg: if series { t.deg - 1 } else { t.deg },
                mono: t.mono.div(unit),
                coeff: &t.coeff * &Rational::from_int(t.mono.exp(var) as i64),
            })
            .filter(|t| order.admits(t.deg))
            .collect();
        terms.sort_unstable_by_key(|a| (a.deg, a.mono));
        Ok(Jet {
            space: self.space,
            order,
            terms,
        })
    }

    /// Homogeneous part of series degree `d`.
    pub fn homogeneous(&self, d: u32) -> &[Term] {
        let lo = self.terms.partition_point(|t| t.deg < d);
        let hi = self.terms.partition_point(|t| t.deg <= d);
        &self.terms[lo..hi]
    }

    /// Value at the expansion point, given the values of the exact
    /// variables (ignored for series-only jets).
    pub fn value_at(&self, exact_values: &[Rational]) -> Rational {
        let ns = self.space.n_series();
        let mut acc = Rational::zero();
        for t in self.leading() {
            let mut v = t.coeff.clone();
            for (i, x) in exact_values.iter().enumerate().take(self.space.n_exact()) {
                let e = t.mono.exp(ns + i);
                if e != 0 {
                    v = &v * &x.pow(e);
                }
            }
            acc += &v;
        }
        acc
    }

    /// Constant term of a series-only jet.
    pub fn constant_term(&self) -> Rational {
        self.value_at(&[])
    }

    /// First partial derivatives at the point in every variable, using
    /// `exact_values` to evaluate the Laurent part. Needs order >= 1.
    pub fn gradient_at(&self, exact_values: &[Rational]) -> Result<Vec<Rational>, JetError> {
        let mut out = Vec::with_capacity(self.space.nvars());
        for v in 0..self.space.nvars() {
            out.push(self.partial(v)?.value_at(exact_values));
        }
        Ok(out)
    }

    /// Drops the exact variables by evaluating them, yielding a series-only
    /// jet in the base space.
    pub fn restrict_fiber(&self, exact_values: &[Rational]) -> Jet {
        let ns = self.space.n_series();
        let terms = self.terms.iter().map(|t| {
            let mut v = t.coeff.clone();
            for (i, x) in exact_values.iter().enumerate().take(self.space.n_exact()) {
                let e = t.mono.exp(ns + i);
                if e != 0 {
                    v = &v * &x.pow(e);
                }
            }
            (t.mono.series_part(ns), v)
        });
        Jet::from_terms(self.space.base(), self.order, terms)
    }

    /// Re-embeds a series-only jet into a space with extra exact variables
    /// (the lift of a base function to the bundle).
    /// Human-readable sum of terms. Series variables print as `d<name>`
    /// (offsets from the point), exact ones as `<name>`.
    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        for t in &self.terms {
            let c = &t.coeff;
            if out.is_empty() {
                if c.signum() < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if c.signum() < 0 { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            for (v, e) in t.mono.exponents(self.space.nvars()).into_iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = if self.space.is_series(v) { format!("d{}", names[v]) } else { names[v].clone() };
                factors.push(if e == 1 { name } else { format!("{name}^{e}") });
            }
            let a = c.abs();
            if factors.is_empty() || !a.is_one() {
                factors.insert(0, a.to_string());
            }
            out.push_str(&factors.join("*"));
        }
        if out.is_empty() {
            out.push('0');
        }
        if let Some(n) = self.order.finite() {
            out.push_str(&format!(" + O({})", n + 1));
        }
        out
    }

    pub fn lift(&self, space: Space) -> Jet {
        assert_eq!(self.space.n_series(), space.n_series());
        assert_eq!(self.space.n_exact(), 0);
        Jet {
            space,
            order: self.order,
            terms: self.terms.clone(),
        }
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet[order {}]{{", self.order)?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{:?}: {}", t.mono, t.coeff)?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn t1(order: u32) -> (Space, Jet) {
        let s = Space::series(1);
        let t = Jet::coordinate(s, 0, &Rational::zero()).with_order(Order::Finite(order));
        (s, t)
    }

    #[test]
    fn truncated_product() {
        let (s, t) = t1(2);
        let one = Jet::one(s);
        let a = one.add(&t).unwrap();
        let b = one.sub(&t).unwrap();
        let p = a.mul(&b).unwrap();
        assert_eq!(p.coeff(&[0]).unwrap(), q(1));
        assert_eq!(p.coeff(&[1]).unwrap(), q(0));
        assert_eq!(p.coeff(&[2]).unwrap(), q(-1));

        let (_, t) = t1(1);
        let a = one.add(&t).unwrap();
        let b = one.sub(&t).unwrap();
        let p = a.mul(&b).unwrap();
        assert_eq!(p, Jet::one(s).with_order(Order::Finite(1)));
        assert!(matches!(
            p.coeff(&[2]),
            Err(JetError::BeyondOrder { degree: 2, order: 1 })
        ));
    }

    #[test]
    fn geometric_inverse() {
        let (s, t) = t1(3);
        let b = Jet::one(s).sub(&t).unwrap();
        let inv = Jet::one(s).div(&b).unwrap();
        for d in 0..=3 {
            assert_eq!(inv.coeff(&[d]).unwrap(), q(1));
        }
        assert_eq!(inv.order(), Order::Finite(3));
    }

    #[test]
    fn zero_constant_term_is_not_invertible() {
        let (_, t) = t1(3);
        assert_eq!(t.inv().unwrap_err(), JetError::NotInvertible);
    }

    #[test]
    fn partial_derivatives() {
        let (_, t) = t1(4);
        let t2 = t.mul(&t).unwrap();
        let d = t2.partial(0).unwrap();
        assert_eq!(d, t.scale(&q(2)).with_order(Order::Finite(3)));
        let c = Jet::constant(Space::series(1), q(5), Order::Finite(4));
        assert!(c.partial(0).unwrap().is_zero());
        let z = Jet::constant(Space::series(1), q(5), Order::Finite(0));
        assert_eq!(
            z.partial(0).unwrap_err(),
            JetError::InsufficientOrder { needed: 1, available: 0 }
        );
    }

    #[test]
    fn laurent_fiber_variables() {
        // one series variable, exact F0 (unit) and F1 (not a unit)
        let s = Space::with_exact(1, &[true, false]);
        let f0 = Jet::coordinate(s, 1, &Rational::zero());
        let f1 = Jet::coordinate(s, 2, &Rational::zero());
        let inv = f0.inv().unwrap();
        assert_eq!(inv.coeff(&[0, -1, 0]).unwrap(), q(1));
        assert_eq!(f1.inv().unwrap_err(), JetError::NotInvertible);
        // d/dF0 (1/F0) = -1/F0^2, no order loss
        let d = inv.partial(1).unwrap();
        assert_eq!(d.coeff(&[0, -2, 0]).unwrap(), q(-1));
        assert_eq!(d.order(), Order::Exact);
        // (F0 + t F1) / F0 at F0 = 2, F1 = 3: value 1
        let t = Jet::coordinate(s, 0, &Rational::zero()).with_order(Order::Finite(3));
        let num = f0.add(&t.mul(&f1).unwrap()).unwrap();
        let ratio = num.div(&f0).unwrap();
        assert_eq!(ratio.value_at(&[q(2), q(3)]), q(1));
        let g = ratio.gradient_at(&[q(2), q(3)]).unwrap();
        assert_eq!(g, vec![Rational::new(3, 2), q(0), q(0)]);
    }
}

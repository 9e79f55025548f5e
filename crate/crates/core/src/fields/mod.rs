//! Vector fields with jet coefficients, Lie brackets and frame expansion.

mod linalg;

pub use linalg::{frame_expand, rank, FrameSolver};

use crate::error::Result;
use crate::jets::{Jet, JetError, Order, Space};
use crate::rational::Rational;

/// Named coordinates with the values at which everything is expanded.
///
/// Series variables are expanded around `values[i]`; exact variables are
/// carried symbolically and `values[i]` only serves evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    names: Vec<String>,
    space: Space,
    values: Vec<Rational>,
}

impl Chart {
    pub fn new(names: Vec<String>, space: Space, values: Vec<Rational>) -> Self {
        assert_eq!(names.len(), space.nvars());
        assert_eq!(values.len(), space.nvars());
        for (i, n) in names.iter().enumerate() {
            assert!(!names[..i].contains(n), "duplicate chart variable {n}");
        }
        Chart {
            names,
            space,
            values,
        }
    }

    /// The jet-space chart `(t, x0, .., xk)`.
    pub fn jet_space(k: usize, point: Vec<Rational>) -> Self {
        let mut names = vec!["t".to_string()];
        names.extend((0..=k).map(|i| format!("x{i}")));
        Chart::new(names, Space::series(k + 2), point)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn series_point(&self) -> &[Rational] {
        &self.values[..self.space.n_series()]
    }

    pub fn exact_values(&self) -> &[Rational] {
        &self.values[self.space.n_series()..]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// A vector field `sum_i comps[i] d/du_i` on a chart.
#[derive(Clone, PartialEq, Eq)]
pub struct VField {
    space: Space,
    comps: Vec<Jet>,
}

impl std::fmt::Debug for VField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(&self.comps).finish()
    }
}

impl VField {
    pub fn zero(space: Space, order: Order) -> Self {
        VField {
            space,
            comps: (0..space.nvars()).map(|_| Jet::zero(space, order)).collect(),
        }
    }

    pub fn from_comps(comps: Vec<Jet>) -> Result<Self> {
        let space = comps.first().ok_or(JetError::SpaceMismatch)?.space();
        if comps.len() != space.nvars() || comps.iter().any(|c| c.space() != space) {
            return Err(JetError::SpaceMismatch.into());
        }
        Ok(VField { space, comps })
    }

    /// Coordinate field `d/du_var`.
    pub fn coordinate(space: Space, var: usize) -> Self {
        let mut v = VField::zero(space, Order::Exact);
        v.comps[var] = Jet::one(space);
        v
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn comps(&self) -> &[Jet] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &Jet {
        &self.comps[i]
    }

    pub fn set_comp(&mut self, i: usize, j: Jet) {
        assert_eq!(j.space(), self.space);
        self.comps[i] = j;
    }

    pub fn order(&self) -> Order {
        self.comps.iter().map(Jet::order).min().unwrap_or(Order::Exact)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Jet::is_zero)
    }

    pub fn truncate(&self, order: Order) -> VField {
        VField {
            space: self.space,
            comps: self.comps.iter().map(|c| c.truncate(order)).collect(),
        }
    }

    fn zip(&self, other: &VField, op: impl Fn(&Jet, &Jet) -> Result<Jet, JetError>) -> Result<VField> {
        if self.space != other.space {
            return Err(JetError::SpaceMismatch.into());
        }
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| op(a, b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VField {
            space: self.space,
            comps,
        })
    }

    pub fn add(&self, other: &VField) -> Result<VField> {
        self.zip(other, Jet::add)
    }

    pub fn sub(&self, other: &VField) -> Result<VField> {
        self.zip(other, Jet::sub)
    }

    pub fn neg(&self) -> VField {
        VField {
            space: self.space,
            comps: self.comps.iter().map(Jet::neg).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> VField {
        VField {
            space: self.space,
            comps: self.comps.iter().map(|j| j.scale(c)).collect(),
        }
    }

    /// The field `f * self`.
    pub fn mul_fn(&self, f: &Jet) -> Result<VField> {
        let comps = self
            .comps
            .iter()
            .map(|c| f.mul(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VField {
            space: self.space,
            comps,
        })
    }

    /// Directional derivative `self(f)`.
    pub fn apply(&self, f: &Jet) -> Result<Jet> {
        let mut acc: Option<Jet> = None;
        let mut order = f.order().min(self.order());
        for (j, a) in self.comps.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let d = f.partial(j)?;
            order = order.min(d.order());
            if d.is_zero() {
                continue;
            }
            let term = a.mul(&d)?;
            acc = Some(match acc {
                None => term,
                Some(s) => s.add(&term)?,
            });
        }
        Ok(match acc {
            None => Jet::zero(self.space, order),
            Some(s) => s.with_order(order),
        })
    }

    /// Lie bracket `[self, other]`.
    pub fn bracket(&self, other: &VField) -> Result<VField> {
        if self.space != other.space {
            return Err(JetError::SpaceMismatch.into());
        }
        let mut comps = Vec::with_capacity(self.comps.len());
        for i in 0..self.comps.len() {
            let ab = self.apply(&other.comps[i])?;
            let ba = other.apply(&self.comps[i])?;
            comps.push(ab.sub(&ba)?);
        }
        // directions along exact variables cost no order, so the bracket
        // order is whatever the components ended up with
        let order = comps.iter().map(Jet::order).min().unwrap_or(Order::Exact);
        let comps = comps.into_iter().map(|c| c.with_order(order)).collect();
        Ok(VField {
            space: self.space,
            comps,
        })
    }

    /// `ad_self^i(other)`: `i`-fold left bracket.
    pub fn ad_power(&self, other: &VField, i: usize) -> Result<VField> {
        let mut b = other.clone();
        for _ in 0..i {
            b = self.bracket(&b)?;
        }
        Ok(b)
    }

    /// Every iterate `ad_self^0(other) .. ad_self^n(other)`.
    pub fn ad_sequence(&self, other: &VField, n: usize) -> Result<Vec<VField>> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(other.clone());
        for i in 0..n {
            let next = self.bracket(&out[i])?;
            out.push(next);
        }
        Ok(out)
    }

    /// Component values at the expansion point.
    pub fn value_at(&self, exact_values: &[Rational]) -> Vec<Rational> {
        self.comps.iter().map(|c| c.value_at(exact_values)).collect()
    }

    /// Lifts a field on the base into a space with extra exact variables
    /// (no components along them).
    pub fn lift(&self, space: Space) -> VField {
        let mut comps: Vec<Jet> = self.comps.iter().map(|c| c.lift(space)).collect();
        let order = self.order();
        comps.extend((self.comps.len()..space.nvars()).map(|_| Jet::zero(space, order)));
        VField { space, comps }
    }

    /// Linear combination `sum_i coeffs[i] * fields[i]`.
    pub fn combine(coeffs: &[Jet], fields: &[VField]) -> Result<VField> {
        assert_eq!(coeffs.len(), fields.len());
        let space = fields[0].space;
        let mut acc = VField::zero(space, Order::Exact);
        for (c, f) in coeffs.iter().zip(fields) {
            if c.is_zero() {
                acc = acc.truncate(c.order());
                continue;
            }
            acc = acc.add(&f.mul_fn(c)?)?;
        }
        Ok(acc)
    }
}

/// Result of the regularity test on a pair `(X, V)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Regularity {
    pub regular: bool,
    /// Rank of `{X, V, ad_X V, .., ad_X^i V}` at the point, `i = 1..=k`.
    pub ranks: Vec<usize>,
}

/// Checks (G1)-(G2) at the expansion point: the iterated brackets grow the
/// span by one dimension per step and finally fill the tangent space.
pub fn regularity_check(x: &VField, v: &VField, k: usize, exact_values: &[Rational]) -> Result<Regularity> {
    let ads = x.ad_sequence(v, k)?;
    let mut rows = vec![x.value_at(exact_values)];
    rows.push(ads[0].value_at(exact_values));
    let mut ranks = Vec::with_capacity(k);
    for ad in &ads[1..] {
        rows.push(ad.value_at(exact_values));
        ranks.push(rank(&rows));
    }
    let dim = x.space().nvars();
    let regular = ranks.iter().enumerate().all(|(i, &r)| r == i + 3) && ranks.last() == Some(&dim);
    Ok(Regularity { regular, ranks })
}

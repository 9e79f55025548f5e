//! Chart on the canonical bundle: base coordinates plus fibre coordinates
//! `(F0, F1, G)` carried as exact Laurent variables.

use crate::error::{Error, Result};
use crate::fields::{Chart, VField};
use crate::jets::{Jet, Mono, Order, Space};
use crate::normalize::ReferenceFrame;
use crate::rational::Rational;

/// Fibre coordinates of a bundle point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberPoint {
    pub f0: Rational,
    pub f1: Rational,
    pub g: Rational,
}

impl Default for FiberPoint {
    fn default() -> Self {
        FiberPoint {
            f0: Rational::one(),
            f1: Rational::zero(),
            g: Rational::one(),
        }
    }
}

/// The bundle chart with the lifted reference pair, the fundamental fields
/// and the lifted `BX`.
#[derive(Clone, Debug)]
pub struct BundleChart {
    pub k: usize,
    pub chart: Chart,
    pub fiber: FiberPoint,
    /// Reference `X` and `V` lifted (constant along fibres).
    pub x: VField,
    pub v: VField,
    pub bg: VField,
    pub bf0: VField,
    pub bf1: VField,
    pub bx: VField,
}

impl BundleChart {
    pub fn space(&self) -> Space {
        self.chart.space()
    }

    pub fn exact_values(&self) -> &[Rational] {
        self.chart.exact_values()
    }

    /// Index of `F0`; `F1` and `G` follow.
    pub fn f0_var(&self) -> usize {
        self.k + 2
    }

    /// The fibre coordinate as a jet.
    pub fn fiber_coord(&self, which: usize) -> Jet {
        Jet::coordinate(self.space(), self.f0_var() + which, &Rational::zero())
    }
}

/// Extended space: `k+2` series variables, then `F0` (unit), `F1`, `G` (unit).
pub fn bundle_space(k: usize) -> Space {
    Space::with_exact(k + 2, &[true, false, true])
}

pub fn make_bundle_chart(r: &ReferenceFrame, base_point: &[Rational], fiber: FiberPoint) -> Result<BundleChart> {
    if fiber.f0.is_zero() || fiber.g.is_zero() {
        return Err(Error::Input(
            "point outside the structure group orbit: F0 and G must be nonzero".into(),
        ));
    }
    let k = r.k;
    let space = bundle_space(k);
    let mut names: Vec<String> = vec!["t".into()];
    names.extend((0..=k).map(|i| format!("x{i}")));
    names.extend(["F0", "F1", "G"].map(String::from));
    let mut values = base_point.to_vec();
    values.extend([fiber.f0.clone(), fiber.f1.clone(), fiber.g.clone()]);
    let chart = Chart::new(names, space, values);

    let x = r.x.lift(space);
    let v = r.v.lift(space);
    let (bg, bf0, bf1) = fundamental_fields(k);
    let mut b = BundleChart {
        k,
        chart,
        fiber,
        x,
        v,
        bg,
        bf0,
        bf1,
        bx: VField::zero(space, Order::Exact),
    };
    b.bx = lift_x(&b)?;
    Ok(b)
}

/// `BG = G d_G`, `BF0 = F0 d_F0`, `BF1 = F0 d_F1`.
pub fn fundamental_fields(k: usize) -> (VField, VField, VField) {
    let space = bundle_space(k);
    let f0 = k + 2;
    let mono = |var: usize| Jet::monomial(space, Mono::unit(var), Rational::one(), Order::Exact);
    let mut bg = VField::zero(space, Order::Exact);
    bg.set_comp(f0 + 2, mono(f0 + 2));
    let mut bf0 = VField::zero(space, Order::Exact);
    bf0.set_comp(f0, mono(f0));
    let mut bf1 = VField::zero(space, Order::Exact);
    bf1.set_comp(f0 + 1, mono(f0));
    (bg, bf0, bf1)
}

/// `BX = X/F0 - 2 (F1/F0) BF0 - (F1/F0)^2 BF1 - k (F1/F0) BG`.
pub fn lift_x(b: &BundleChart) -> Result<VField> {
    let space = b.space();
    let f0 = b.f0_var();
    let inv_f0 = Jet::monomial(space, Mono::ONE.div(Mono::unit(f0)), Rational::one(), Order::Exact);
    let f1 = b.fiber_coord(1);
    let ratio = f1.mul(&inv_f0)?;
    let kq = Rational::from_int(b.k as i64);
    b.x.mul_fn(&inv_f0)?
        .sub(&b.bf0.mul_fn(&ratio.scale(&Rational::from_int(2)))?)?
        .sub(&b.bf1.mul_fn(&ratio.mul(&ratio)?)?)?
        .sub(&b.bg.mul_fn(&ratio.scale(&kq))?)
}

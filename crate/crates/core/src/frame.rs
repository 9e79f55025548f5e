//! The adapted frame `(BG, BF0, BF1, BX, BV^0..BV^k)` fixed by the four
//! torsion normalizations.
//!
//! `BV^0 = G V + alpha BX + beta BG + gamma0 BF0 + gamma1 BF1`; the four
//! torsion coefficients depend affinely on the unknowns:
//!
//! ```text
//! T01_0 = T01_0|0 - (BX(beta) + 2k gamma1)
//! T01_1 = T01_1|0 - (BX(alpha) - beta + 2 gamma0)
//! T01_2 = T01_2|0 + alpha
//! T03_3 = T03_3|0 + beta - 3 gamma0 + c alpha     (c = 0 unless k = 3)
//! ```
//!
//! so the zero ansatz gives the inhomogeneous terms, one probe with a
//! constant `alpha` gives `c`, and the system is solved triangularly.

use std::fmt;

use crate::bundle::BundleChart;
use crate::error::{Error, Result};
use crate::fields::{FrameSolver, VField};
use crate::jets::{Jet, Order};
use crate::rational::Rational;

pub const BG: usize = 0;
pub const BF0: usize = 1;
pub const BF1: usize = 2;
pub const BX: usize = 3;

/// Position of `BV^r` in the full frame.
pub const fn bv(r: usize) -> usize {
    4 + r
}

/// Display name of a full-frame index.
pub fn frame_name(i: usize) -> String {
    match i {
        BG => "BG".into(),
        BF0 => "BF0".into(),
        BF1 => "BF1".into(),
        BX => "BX".into(),
        _ => format!("BV{}", i - 4),
    }
}

#[derive(Clone, Debug)]
pub struct Ansatz {
    pub alpha: Jet,
    pub beta: Jet,
    pub gamma0: Jet,
    pub gamma1: Jet,
}

impl Ansatz {
    pub fn zero(b: &BundleChart) -> Self {
        let z = Jet::zero(b.space(), Order::Exact);
        Ansatz {
            alpha: z.clone(),
            beta: z.clone(),
            gamma0: z.clone(),
            gamma1: z,
        }
    }

    pub fn get(&self, i: usize) -> &Jet {
        [&self.alpha, &self.beta, &self.gamma0, &self.gamma1][i]
    }

    pub fn get_mut(&mut self, i: usize) -> &mut Jet {
        match i {
            0 => &mut self.alpha,
            1 => &mut self.beta,
            2 => &mut self.gamma0,
            _ => &mut self.gamma1,
        }
    }

    pub const NAMES: [&'static str; 4] = ["alpha", "beta", "gamma0", "gamma1"];
}

/// Frame vectors built from an ansatz, with the solver for their span.
#[derive(Clone, Debug)]
pub struct FrameBuild {
    pub bv: Vec<VField>,
    pub solver: FrameSolver,
}

pub fn build_frame(b: &BundleChart, a: &Ansatz) -> Result<FrameBuild> {
    let g = b.fiber_coord(2);
    let bv0 = b
        .v
        .mul_fn(&g)?
        .add(&b.bx.mul_fn(&a.alpha)?)?
        .add(&b.bg.mul_fn(&a.beta)?)?
        .add(&b.bf0.mul_fn(&a.gamma0)?)?
        .add(&b.bf1.mul_fn(&a.gamma1)?)?;
    let bv = b.bx.ad_sequence(&bv0, b.k)?;
    let mut full = vec![b.bg.clone(), b.bf0.clone(), b.bf1.clone(), b.bx.clone()];
    full.extend(bv.iter().cloned());
    let solver = FrameSolver::new(&full, b.exact_values())?;
    Ok(FrameBuild { bv, solver })
}

/// `(T01_0, T01_1, T01_2, T03_3)` of a built frame.
pub fn functionals_of(fb: &FrameBuild) -> Result<[Jet; 4]> {
    let b01 = fb.bv[0].bracket(&fb.bv[1])?;
    let b03 = fb.bv[0].bracket(&fb.bv[3])?;
    let t01 = fb.solver.solve_some(&b01, &[bv(0), bv(1), bv(2)])?;
    let t03 = fb.solver.solve_some(&b03, &[bv(3)])?;
    let [a, b, c]: [Jet; 3] = t01.try_into().unwrap();
    Ok([a, b, c, t03.into_iter().next().unwrap()])
}

pub fn torsion_functionals(b: &BundleChart, a: &Ansatz) -> Result<[Jet; 4]> {
    functionals_of(&build_frame(b, a)?)
}

/// The canonical frame with its construction data.
#[derive(Clone, Debug)]
pub struct CanonicalFrame {
    pub bundle: BundleChart,
    pub ansatz: Ansatz,
    /// `C_1 .. C_4` of the normalization system.
    pub constants: [Jet; 4],
    /// Coefficient of `alpha` in `T03_3`.
    pub c_tilde: Jet,
    pub bv: Vec<VField>,
    pub solver: FrameSolver,
    /// The four normalized torsion coefficients after solving.
    pub adapted: [Jet; 4],
}

impl CanonicalFrame {
    pub fn k(&self) -> usize {
        self.bundle.k
    }

    /// `[BG, BF0, BF1, BX, BV^0, .., BV^k]`.
    pub fn full(&self) -> Vec<VField> {
        let b = &self.bundle;
        let mut v = vec![b.bg.clone(), b.bf0.clone(), b.bf1.clone(), b.bx.clone()];
        v.extend(self.bv.iter().cloned());
        v
    }

    pub fn order(&self) -> Order {
        self.bv.iter().map(VField::order).min().unwrap_or(Order::Exact)
    }

    pub fn exact_values(&self) -> &[Rational] {
        self.bundle.exact_values()
    }
}

impl CanonicalFrame {
    /// The frame rebuilt with one ansatz unknown shifted by `delta`;
    /// `adapted` holds the resulting normalized torsion, unchecked.
    pub fn perturbed(&self, which: usize, delta: &Rational) -> Result<CanonicalFrame> {
        let mut a = self.ansatz.clone();
        let space = self.bundle.space();
        let slot = a.get_mut(which);
        *slot = slot.add(&Jet::constant(space, delta.clone(), Order::Exact))?;
        let fb = build_frame(&self.bundle, &a)?;
        let adapted = functionals_of(&fb)?;
        Ok(CanonicalFrame {
            ansatz: a,
            bv: fb.bv,
            solver: fb.solver,
            adapted,
            ..self.clone()
        })
    }
}

fn sub(a: &Jet, b: &Jet) -> Result<Jet> {
    Ok(a.sub(b)?)
}

/// Solves for the unique ansatz satisfying the torsion normalization and
/// verifies it by rebuilding the frame.
pub fn solve_normalization(b: &BundleChart) -> Result<CanonicalFrame> {
    let k = b.k;
    if k < 3 {
        return Err(Error::Input("k must exceed 2".into()));
    }
    let zero = Ansatz::zero(b);
    let t0 = torsion_functionals(b, &zero)?;
    let mut probe = zero.clone();
    probe.alpha = Jet::one(b.space());
    let tp = torsion_functionals(b, &probe)?;
    let c_tilde = sub(&tp[3], &t0[3])?;

    let c1 = t0[0].clone();
    let c2 = t0[1].clone();
    let c3 = t0[2].neg();
    let c4 = t0[3].neg();

    let alpha = c3.clone();
    let r2 = sub(&c2, &b.bx.apply(&alpha)?)?;
    let r4 = sub(&c4, &c_tilde.mul(&alpha)?)?;
    let gamma0 = r2.add(&r4)?.neg();
    let beta = sub(&gamma0.scale(&Rational::from_int(2)), &r2)?;
    let gamma1 = sub(&c1, &b.bx.apply(&beta)?)?.scale(&Rational::new(1, 2 * k as i64));
    let ansatz = Ansatz {
        alpha,
        beta,
        gamma0,
        gamma1,
    };

    let fb = build_frame(b, &ansatz)?;
    let adapted = functionals_of(&fb)?;
    if let Some(i) = adapted.iter().position(|t| !t.is_zero()) {
        let names = ["T01_0", "T01_1", "T01_2", "T03_3"];
        return Err(Error::Consistency(format!(
            "normalization did not annihilate {} (value {})",
            names[i],
            adapted[i].value_at(b.exact_values())
        )));
    }
    Ok(CanonicalFrame {
        bundle: b.clone(),
        ansatz,
        constants: [c1, c2, c3, c4],
        c_tilde,
        bv: fb.bv,
        solver: fb.solver,
        adapted,
    })
}

/// Outcome of checking one identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    /// The residual vanishes identically to `order`.
    pub zero: bool,
    pub order: Order,
    /// First nonzero residual component and its value at the point.
    pub witness: Option<String>,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.name, if self.zero { "ok" } else { "FAIL" })?;
        if let Some(w) = &self.witness {
            write!(f, " ({w})")?;
        }
        Ok(())
    }
}

/// Check for a vector identity `lhs = 0`, reporting components in `names`.
pub fn check_field(name: impl Into<String>, residual: &VField, names: &[String], exact_values: &[Rational]) -> Check {
    let witness = residual
        .comps()
        .iter()
        .enumerate()
        .find(|(_, c)| !c.is_zero())
        .map(|(i, c)| format!("component {} at point = {}", names[i], c.value_at(exact_values)));
    Check {
        name: name.into(),
        zero: witness.is_none(),
        order: residual.order(),
        witness,
    }
}

/// Check for a list of frame coefficients that must all vanish.
pub fn check_coeffs(name: impl Into<String>, coeffs: &[(usize, Jet)], exact_values: &[Rational]) -> Check {
    let witness = coeffs
        .iter()
        .find(|(_, c)| !c.is_zero())
        .map(|(i, c)| format!("coefficient on {} at point = {}", frame_name(*i), c.value_at(exact_values)));
    Check {
        name: name.into(),
        zero: witness.is_none(),
        order: coeffs.iter().map(|(_, c)| c.order()).min().unwrap_or(Order::Exact),
        witness,
    }
}

/// `sum_i c_i frame_i` with rational coefficients.
fn rational_combo(terms: &[(Rational, &VField)], space_of: &VField) -> Result<VField> {
    let mut acc = VField::zero(space_of.space(), Order::Exact);
    for (c, v) in terms {
        acc = acc.add(&v.scale(c))?;
    }
    Ok(acc)
}

/// Residuals of the structural equations: brackets with `BX` and the fiber
/// fields as exact identities, `[BF1, BV^i]` modulo `BX, BG, BF0, BF1`.
pub fn verify_structural(fr: &CanonicalFrame) -> Result<Vec<Check>> {
    let b = &fr.bundle;
    let k = b.k;
    let names = b.chart.names();
    let ev = b.exact_values();
    let kq = Rational::from_int(k as i64);
    let mut out = Vec::new();

    out.push(check_field("[BG,BX]", &b.bg.bracket(&b.bx)?, names, ev));
    out.push(check_field("[BF0,BX]+BX", &b.bf0.bracket(&b.bx)?.add(&b.bx)?, names, ev));
    let r = b
        .bf1
        .bracket(&b.bx)?
        .add(&rational_combo(&[(Rational::from_int(2), &b.bf0), (kq, &b.bg)], &b.bx)?)?;
    out.push(check_field("[BF1,BX]+2BF0+kBG", &r, names, ev));
    for i in 0..=k {
        let v = &fr.bv[i];
        let r = b.bg.bracket(v)?.sub(v)?;
        out.push(check_field(format!("[BG,BV{i}]-BV{i}"), &r, names, ev));
        let r = b.bf0.bracket(v)?.add(&v.scale(&Rational::from_int(i as i64)))?;
        out.push(check_field(format!("[BF0,BV{i}]+{i}BV{i}"), &r, names, ev));
    }
    for (i, r) in bf1_residuals(fr)?.iter().enumerate() {
        let coeffs = fr.solver.solve_some(r, &(0..=k).map(bv).collect::<Vec<_>>())?;
        let coeffs: Vec<(usize, Jet)> = coeffs.into_iter().enumerate().map(|(j, c)| (bv(j), c)).collect();
        out.push(check_coeffs(format!("[BF1,BV{i}] mod BX,BG,BF"), &coeffs, ev));
    }
    Ok(out)
}

/// `[BF1, BV^i] - i(i-1-k) BV^{i-1}` for `i = 0..=k`.
pub fn bf1_residuals(fr: &CanonicalFrame) -> Result<Vec<VField>> {
    let b = &fr.bundle;
    let k = b.k as i64;
    (0..=b.k)
        .map(|i| {
            let br = b.bf1.bracket(&fr.bv[i])?;
            if i == 0 {
                return Ok(br);
            }
            let c = Rational::from_int(i as i64 * (i as i64 - 1 - k));
            br.sub(&fr.bv[i - 1].scale(&c))
        })
        .collect()
}

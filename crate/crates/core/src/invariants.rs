//! Structure functions of the canonical frame and the verdicts read off
//! from them.

use crate::error::{Error, Result};
use crate::fields::{rank, FrameSolver, VField};
use crate::frame::{self, bv, check_field, frame_name, CanonicalFrame, Check, BX};
use crate::jets::{Jet, Mono, Order};
use crate::rational::Rational;

/// Every bracket of the full frame and its expansion in the frame.
#[derive(Clone, Debug)]
pub struct StructureTable {
    pub k: usize,
    /// `entries[a][b]` for `a < b`: coefficients of `[E_a, E_b]`.
    entries: Vec<Vec<Vec<Jet>>>,
}

impl StructureTable {
    pub fn compute(fr: &CanonicalFrame) -> Result<Self> {
        let full = fr.full();
        let n = full.len();
        let mut entries = vec![Vec::new(); n];
        for a in 0..n {
            for b in a + 1..n {
                let br = full[a].bracket(&full[b])?;
                entries[a].push(fr.solver.solve(&br)?);
            }
        }
        Ok(StructureTable { k: fr.k(), entries })
    }

    pub fn dim(&self) -> usize {
        self.k + 5
    }

    /// Coefficient of `E_e` in `[E_a, E_b]`.
    pub fn coeff(&self, a: usize, b: usize, e: usize) -> Jet {
        use std::cmp::Ordering::*;
        match a.cmp(&b) {
            Less => self.entries[a][b - a - 1][e].clone(),
            Greater => self.entries[b][a - b - 1][e].neg(),
            Equal => {
                let any = &self.entries[0][0][0];
                Jet::zero(any.space(), Order::Exact)
            }
        }
    }

    /// `w_0 .. w_k`: the `BV` components of `[BX, BV^k]`.
    pub fn w(&self) -> Vec<Jet> {
        (0..=self.k).map(|i| self.coeff(BX, bv(self.k), bv(i))).collect()
    }

    pub fn torsion(&self) -> TorsionTable {
        let k = self.k;
        let mut entries = Vec::new();
        let mut discarded = Vec::new();
        for p in 0..=k {
            for q in p + 1..=k {
                for r in 0..=k {
                    entries.push(((p, q, r), self.coeff(bv(p), bv(q), bv(r))));
                }
                for e in 0..4 {
                    discarded.push(((p, q, e), self.coeff(bv(p), bv(q), e)));
                }
            }
        }
        TorsionTable {
            k,
            entries,
            discarded,
        }
    }
}

/// `T^{pq}_r` for `p < q`, plus the components along `BG, BF0, BF1, BX`
/// (indexed `0..4` in `discarded`).
#[derive(Clone, Debug)]
pub struct TorsionTable {
    pub k: usize,
    pub entries: Vec<((usize, usize, usize), Jet)>,
    pub discarded: Vec<((usize, usize, usize), Jet)>,
}

impl TorsionTable {
    pub fn get(&self, p: usize, q: usize, r: usize) -> Option<Jet> {
        if p == q {
            return None;
        }
        let (a, b, s) = if p < q { (p, q, false) } else { (q, p, true) };
        self.entries
            .iter()
            .find(|(idx, _)| *idx == (a, b, r))
            .map(|(_, j)| if s { j.neg() } else { j.clone() })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationType {
    /// All `T^{pq}_r` with `r > max(p, q) + 1` vanish at the point.
    pub holds: bool,
    /// They vanish as jets to their validity order.
    pub holds_as_jets: bool,
    pub witness: Option<String>,
}

pub fn equation_type_test(t: &TorsionTable, exact_values: &[Rational]) -> EquationType {
    let mut holds = true;
    let mut holds_as_jets = true;
    let mut witness = None;
    for ((p, q, r), j) in &t.entries {
        if *r <= (*p).max(*q) + 1 {
            continue;
        }
        let v = j.value_at(exact_values);
        if !j.is_zero() {
            holds_as_jets = false;
        }
        if !v.is_zero() {
            holds = false;
            witness.get_or_insert_with(|| format!("T{p}{q}_{r} = {v}"));
        }
    }
    EquationType {
        holds,
        holds_as_jets,
        witness,
    }
}

/// The exact form of the `BF1` relation: `[BF1, BV^i] = i(i-1-k) BV^{i-1}`
/// with no remainder along `BX, BG, BF`.
pub fn bf1_exact_check(fr: &CanonicalFrame) -> Result<Vec<Check>> {
    let names = fr.bundle.chart.names();
    let ev = fr.exact_values();
    Ok(frame::bf1_residuals(fr)?
        .iter()
        .enumerate()
        .map(|(i, r)| check_field(format!("[BF1,BV{i}] exact"), r, names, ev))
        .collect())
}

/// Residuals of the rescaled model frame `(BG, BH, BX, BY, BW^0..BW^k)`.
#[derive(Clone, Debug)]
pub struct ModelReport {
    pub checks: Vec<Check>,
    /// `[BX, BW^k]`, which carries the `w` coefficients and vanishes only
    /// in the flat case.
    pub obstruction: Check,
    /// `[BH, BW^i] = -2i BW^i` exactly as printed in the model table; it
    /// disagrees with the `BG` and `BF0` relations by `k BW^i`.
    pub printed_bh: Vec<Check>,
}

pub fn model_coframe(fr: &CanonicalFrame) -> Result<ModelReport> {
    let b = &fr.bundle;
    let k = fr.k();
    let names = b.chart.names();
    let ev = fr.exact_values();
    let q = |n: i64| Rational::from_int(n);
    let bh = b.bf0.scale(&q(2)).add(&b.bg.scale(&q(k as i64)))?;
    let by = &b.bf1;
    let bxf = &b.bx;
    let mut fact = Rational::one();
    let bw: Vec<VField> = (0..=k)
        .map(|i| {
            if i > 0 {
                fact = &fact * &q(i as i64);
            }
            fr.bv[i].scale(&fact.recip().unwrap())
        })
        .collect();

    let mut checks = vec![
        check_field("[BX,BY]-BH", &bxf.bracket(by)?.sub(&bh)?, names, ev),
        check_field("[BH,BX]+2BX", &bh.bracket(bxf)?.add(&bxf.scale(&q(2)))?, names, ev),
        check_field("[BH,BY]-2BY", &bh.bracket(by)?.sub(&by.scale(&q(2)))?, names, ev),
        check_field("[BG,BX]", &b.bg.bracket(bxf)?, names, ev),
        check_field("[BG,BY]", &b.bg.bracket(by)?, names, ev),
        check_field("[BG,BH]", &b.bg.bracket(&bh)?, names, ev),
    ];
    let mut printed_bh = Vec::new();
    let obstruction = check_field(format!("[BX,BW{k}]"), &bxf.bracket(&bw[k])?, names, ev);
    for i in 0..=k {
        let ii = i as i64;
        if i < k {
            let r = bxf.bracket(&bw[i])?.sub(&bw[i + 1].scale(&q(ii + 1)))?;
            checks.push(check_field(format!("[BX,BW{i}]-{}BW{}", i + 1, i + 1), &r, names, ev));
        }
        let yw = by.bracket(&bw[i])?;
        let r = if i > 0 {
            yw.add(&bw[i - 1].scale(&q(k as i64 - ii + 1)))?
        } else {
            yw
        };
        let label = if i > 0 { format!("[BY,BW{i}]+{}BW{}", k as i64 - ii + 1, ii - 1) } else { "[BY,BW0]".to_string() };
        checks.push(check_field(label, &r, names, ev));
        let hw = bh.bracket(&bw[i])?;
        let kk = k as i64 - 2 * ii;
        checks.push(check_field(
            if kk >= 0 { format!("[BH,BW{i}]-{kk}BW{i}") } else { format!("[BH,BW{i}]+{}BW{i}", -kk) },
            &hw.sub(&bw[i].scale(&q(kk)))?,
            names,
            ev,
        ));
        printed_bh.push(check_field(
            format!("[BH,BW{i}]+{}BW{i}", 2 * ii),
            &hw.add(&bw[i].scale(&q(2 * ii)))?,
            names,
            ev,
        ));
        checks.push(check_field(
            format!("[BG,BW{i}]-BW{i}"),
            &b.bg.bracket(&bw[i])?.sub(&bw[i])?,
            names,
            ev,
        ));
    }
    Ok(ModelReport {
        checks,
        obstruction,
        printed_bh,
    })
}

/// Ranks at the point of the derived flag of `span{BG, BF0, BF1, BX, BV^0}`.
///
/// Step `i` takes the frame vectors `S_i = {BG, BF0, BF1, BX, BV^0..BV^{i-1}}`
/// and the point values of all brackets among them; `S_{i+1}` adds `BV^i`.
pub fn derived_flag_ranks(t: &StructureTable, exact_values: &[Rational]) -> Vec<usize> {
    let n = t.dim();
    let unit = |e: usize| -> Vec<Rational> { (0..n).map(|j| if j == e { Rational::one() } else { Rational::zero() }).collect() };
    let mut ranks = Vec::new();
    let mut set: Vec<usize> = vec![0, 1, 2, 3, bv(0)];
    ranks.push(rank(&set.iter().map(|&e| unit(e)).collect::<Vec<_>>()));
    for i in 1..=t.k {
        let mut rows: Vec<Vec<Rational>> = set.iter().map(|&e| unit(e)).collect();
        for (x, &a) in set.iter().enumerate() {
            for &b in &set[x + 1..] {
                rows.push((0..n).map(|e| t.coeff(a, b, e).value_at(exact_values)).collect());
            }
        }
        ranks.push(rank(&rows));
        set.push(bv(i));
    }
    ranks
}

/// The rational numbers `c^i_j` in
/// `BV^i = G F0^{-i} sum_j c^i_j F1^{i-j} ad_X^j V  mod BX, BG, BF`.
pub fn projection_constants(fr: &CanonicalFrame) -> Result<Vec<(usize, usize, Rational)>> {
    let b = &fr.bundle;
    let k = fr.k();
    let ads = b.x.ad_sequence(&b.v, k)?;
    let mut basis = vec![b.bg.clone(), b.bf0.clone(), b.bf1.clone(), b.x.clone()];
    basis.extend(ads);
    let solver = FrameSolver::new(&basis, b.exact_values())?;
    let f0 = b.f0_var();
    let mut out = Vec::new();
    for i in 0..=k {
        let c = solver.solve(&fr.bv[i])?;
        for j in 0..=i {
            let coeff = &c[4 + j];
            let m = Mono::unit(f0 + 2)
                .mul(pow_mono(f0, -(i as i32)))
                .mul(pow_mono(f0 + 1, (i - j) as i32));
            let val = coeff.coeff_mono(m)?;
            let mono_only = Jet::monomial(coeff.space(), m, val.clone(), coeff.order());
            if *coeff != mono_only {
                return Err(Error::Consistency(format!(
                    "projection coefficient of BV{i} on ad^{j} V is not a constant multiple of G F0^-{i} F1^{}",
                    i - j
                )));
            }
            out.push((i, j, val));
        }
    }
    Ok(out)
}

fn pow_mono(var: usize, e: i32) -> Mono {
    let mut v = vec![0; var + 1];
    v[var] = e;
    Mono::from_exponents(&v)
}

/// Pointwise flatness evidence: values and first derivatives of every
/// torsion coefficient and every `w_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatnessEvidence {
    pub flat_here: bool,
    pub witness: Option<String>,
}

pub fn flatness_evidence(t: &StructureTable, var_names: &[String], exact_values: &[Rational]) -> Result<FlatnessEvidence> {
    let torsion = t.torsion();
    let named = torsion
        .entries
        .iter()
        .map(|((p, q, r), j)| (format!("T{p}{q}_{r}"), j.clone()))
        .chain(t.w().into_iter().enumerate().map(|(i, j)| (format!("w{i}"), j)));
    for (name, j) in named {
        let v = j.value_at(exact_values);
        if !v.is_zero() {
            return Ok(FlatnessEvidence {
                flat_here: false,
                witness: Some(format!("{name} = {v}")),
            });
        }
        let grad = j.gradient_at(exact_values)?;
        if let Some((var, g)) = grad.iter().enumerate().find(|(_, g)| !g.is_zero()) {
            return Ok(FlatnessEvidence {
                flat_here: false,
                witness: Some(format!("d{name}/d{} = {g}", var_names[var])),
            });
        }
    }
    Ok(FlatnessEvidence {
        flat_here: true,
        witness: None,
    })
}

/// Names of frame vectors for reports.
pub fn names(k: usize) -> Vec<String> {
    (0..k + 5).map(frame_name).collect()
}

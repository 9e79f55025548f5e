//! Normalized reference frame `(X, V) = (f X_F, g d/dx_k)` of an ODE.
//!
//! The rescalings are found as jets: `g` by a first-order directional
//! equation killing `a_k`, then `f = w^2` from a linear second-order equation
//! for `w` killing `a_{k-1}`. Everything is re-expanded and checked at the end.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::fields::{regularity_check, Chart, FrameSolver, Regularity, VField};
use crate::jets::{Jet, Mono, Order, Space};
use crate::rational::Rational;

/// `X_F = d_t + x1 d_x0 + .. + xk d_x(k-1) + F d_xk` and `V0 = d_xk`.
pub fn ode_fields(k: usize, rhs: &Jet, chart: &Chart) -> (VField, VField) {
    let s = chart.space();
    let order = rhs.order();
    let mut x = VField::coordinate(s, 0).truncate(order);
    for i in 0..k {
        let xi = Jet::coordinate(s, i + 2, &chart.values()[i + 2]).with_order(order);
        x.set_comp(i + 1, xi);
    }
    x.set_comp(k + 1, rhs.clone());
    let v = VField::coordinate(s, k + 1).truncate(order);
    (x, v)
}

/// `ad_X^{k+1} V = sum_i a_i ad_X^i V + a_X X`.
#[derive(Clone, Debug)]
pub struct AdExpansion {
    pub a: Vec<Jet>,
    pub a_x: Jet,
}

impl AdExpansion {
    pub fn order(&self) -> Order {
        self.a.iter().map(Jet::order).min().unwrap_or(Order::Exact).min(self.a_x.order())
    }
}

pub fn ad_expansion(x: &VField, v: &VField, k: usize, exact_values: &[Rational]) -> Result<AdExpansion> {
    let ads = x.ad_sequence(v, k + 1)?;
    let mut frame = vec![x.clone()];
    frame.extend(ads[..=k].iter().cloned());
    let c = FrameSolver::new(&frame, exact_values)?.solve(&ads[k + 1])?;
    let mut c = c.into_iter();
    let a_x = c.next().unwrap();
    Ok(AdExpansion { a: c.collect(), a_x })
}

/// Solves the linear system `X(u_i) = sum_j A[i][j] u_j` with `u_i(p) =
/// init[i]`, degree by degree in the `t` direction. `X` must have `d_t`
/// component exactly 1. Coefficients of `t`-free monomials are free and are
/// taken from `gauge` (zero when absent). The result is valid to
/// `min(order(A), order(X)) + 1`, capped at `cap`.
pub fn solve_linear_directional(
    x: &VField,
    a: &[Vec<Jet>],
    init: &[Rational],
    gauge: Option<&[Jet]>,
    cap: u32,
) -> Result<Vec<Jet>> {
    let space = x.space();
    let n = init.len();
    assert_eq!(space.n_exact(), 0, "directional solver works on the base chart");
    let one = Jet::one(space).with_order(x.comp(0).order());
    if *x.comp(0) != one {
        return Err(Error::Input("directional solver needs a unit d/dt component".into()));
    }
    let nv = space.n_series();
    let a_order = a.iter().flatten().map(Jet::order).min().unwrap_or(Order::Exact);
    let x_order = x.comps()[1..].iter().map(Jet::order).min().unwrap_or(Order::Exact);
    let m = match a_order.min(x_order) {
        Order::Finite(o) => (o + 1).min(cap),
        Order::Exact => cap,
    };
    // constant parts of the transverse components, and their remainders
    let x0: Vec<Rational> = (0..nv).map(|j| x.comp(j).constant_term()).collect();
    let xr: Vec<Jet> = (0..nv)
        .map(|j| x.comp(j).sub(&Jet::constant(space, x0[j].clone(), Order::Exact)))
        .collect::<Result<_, _>>()?;

    // graded[i][d] = homogeneous degree-d part of u_i
    let mut graded: Vec<Vec<FxHashMap<Mono, Rational>>> = (0..n)
        .map(|i| {
            let mut g0 = FxHashMap::default();
            if !init[i].is_zero() {
                g0.insert(Mono::ONE, init[i].clone());
            }
            vec![g0]
        })
        .collect();
    let t = Mono::unit(0);

    for d in 1..=m {
        let mut next: Vec<FxHashMap<Mono, Rational>> = Vec::with_capacity(n);
        for i in 0..n {
            // right side at degree d-1 from already known lower degrees
            let mut rhs: FxHashMap<Mono, Rational> = FxHashMap::default();
            for (j, aij) in a[i].iter().enumerate() {
                for term in aij.terms().iter().take_while(|t| t.deg < d) {
                    for (um, uc) in &graded[j][(d - 1 - term.deg) as usize] {
                        rhs.entry(term.mono.mul(*um)).or_default().add_mul(&term.coeff, uc);
                    }
                }
            }
            for (v, xv) in xr.iter().enumerate().skip(1) {
                for term in xv.terms().iter().take_while(|t| t.deg < d) {
                    // term.deg >= 1; partial_v of u at degree d - term.deg
                    for (um, uc) in &graded[i][(d - term.deg) as usize] {
                        let e = um.exp(v);
                        if e == 0 {
                            continue;
                        }
                        let c = &term.coeff * &Rational::from_int(e as i64);
                        rhs.entry(term.mono.mul(um.div(Mono::unit(v))))
                            .or_default()
                            .add_mul(&-&c, uc);
                    }
                }
            }

            let mut ud: FxHashMap<Mono, Rational> = FxHashMap::default();
            if let Some(g) = gauge {
                for term in g[i].homogeneous(d) {
                    if term.mono.exp(0) == 0 {
                        ud.insert(term.mono, term.coeff.clone());
                    }
                }
            }
            // u[m t] = (rhs[m] - sum_v x0[v] (e_v(m)+1) u[m x_v]) / (e_t(m)+1),
            // processed by increasing t exponent
            let mut levels: Vec<Vec<Mono>> = vec![Vec::new(); d as usize];
            for m in rhs.keys() {
                levels[m.exp(0) as usize].push(*m);
            }
            let spread = |levels: &mut Vec<Vec<Mono>>, n_: &Mono| {
                for (v, xv0) in x0.iter().enumerate().skip(1) {
                    if !xv0.is_zero() && n_.exp(v) > 0 {
                        let mm = n_.div(Mono::unit(v));
                        levels[mm.exp(0) as usize].push(mm);
                    }
                }
            };
            for n_ in ud.keys().copied().collect::<Vec<_>>() {
                spread(&mut levels, &n_);
            }
            for s in 0..d as usize {
                let mut ms = std::mem::take(&mut levels[s]);
                ms.sort_unstable();
                ms.dedup();
                for mm in ms {
                    let mut val = rhs.get(&mm).cloned().unwrap_or_default();
                    for (v, xv0) in x0.iter().enumerate().skip(1) {
                        if xv0.is_zero() {
                            continue;
                        }
                        let nb = mm.mul(Mono::unit(v));
                        if let Some(c) = ud.get(&nb) {
                            let w = xv0 * &Rational::from_int(mm.exp(v) as i64 + 1);
                            val.add_mul(&-&w, c);
                        }
                    }
                    if val.is_zero() {
                        continue;
                    }
                    let nm = mm.mul(t);
                    let val = &val / &Rational::from_int(mm.exp(0) as i64 + 1);
                    ud.insert(nm, val);
                    if s + 1 < d as usize {
                        spread(&mut levels, &nm);
                    }
                }
            }
            next.push(ud);
        }
        for (i, ud) in next.into_iter().enumerate() {
            graded[i].push(ud);
        }
    }
    Ok(graded
        .into_iter()
        .map(|g| Jet::from_terms(space, Order::Finite(m), g.into_iter().flatten()))
        .collect())
}

/// Scalar case: `X(g) = h g`, `g(p) = init`, transverse gauge zero.
pub fn solve_directional_scale(x: &VField, h: &Jet, init: Rational, cap: u32) -> Result<Jet> {
    let mut u = solve_linear_directional(x, &[vec![h.clone()]], &[init], None, cap)?;
    Ok(u.remove(0))
}

/// Free choices made while normalizing: values at the point and the
/// transverse gauge of the directional solves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeData {
    /// `w(p)` with `f = w^2`, so `f(p) = w0^2`.
    pub w0: Rational,
    /// `X_F(w)(p)`, so `X_F(f)(p) = 2 w0 z0`.
    pub z0: Rational,
    pub g0: Rational,
    /// Seed for random transverse gauges; `None` is the zero gauge.
    pub gauge_seed: Option<u64>,
}

impl Default for FreeData {
    fn default() -> Self {
        FreeData {
            w0: Rational::one(),
            z0: Rational::zero(),
            g0: Rational::one(),
            gauge_seed: None,
        }
    }
}

/// Random `t`-free gauge in one base variable: `c1 y + c2 y^2`. One
/// variable keeps the normalized jets sparse enough for the frame solve.
fn random_gauge(rng: &mut ChaCha8Rng, space: Space) -> Jet {
    let nv = space.n_series();
    let mut c = || loop {
        let n = rng.random_range(-3..=3);
        if n != 0 {
            break Rational::new(n, rng.random_range(1..=3));
        }
    };
    let (c1, c2) = (c(), c());
    let y = Mono::unit(rng.random_range(1..nv));
    Jet::from_terms(space, Order::Exact, [(y, c1), (y.mul(y), c2)])
}

/// The pair `(X, V)` satisfying the normalization, with its rescalings.
#[derive(Clone, Debug)]
pub struct ReferenceFrame {
    pub k: usize,
    pub x: VField,
    pub v: VField,
    pub f: Jet,
    pub g: Jet,
    /// Expansion of the normalized pair; `a[k]` and `a[k-1]` vanish.
    pub expansion: AdExpansion,
    pub regularity: Regularity,
}

impl ReferenceFrame {
    pub fn order(&self) -> Order {
        self.x.order().min(self.v.order())
    }
}

/// Normalizes `(X_F, V0)`; `order` is the jet order of the inputs.
pub fn normalize_pair(xf: &VField, v0: &VField, k: usize, free: &FreeData) -> Result<ReferenceFrame> {
    let space = xf.space();
    let regularity = regularity_check(xf, v0, k, &[])?;
    if !regularity.regular {
        return Err(Error::Input(format!(
            "pair is not regular at the point (rank profile {:?})",
            regularity.ranks
        )));
    }
    let cap = xf.order().finite().unwrap_or(u32::MAX);
    let kq = Rational::from_int(k as i64);
    let k1 = Rational::from_int(k as i64 + 1);
    let e0 = ad_expansion(xf, v0, k, &[])?;
    let ak = &e0.a[k];
    let akm1 = &e0.a[k - 1];

    let gauges: Option<Vec<Jet>> = free.gauge_seed.map(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..3).map(|_| random_gauge(&mut rng, space)).collect()
    });

    // (i) X_F(g1) = -a_k/(k+1) g1
    let h = ak.scale(&(-k1.recip().unwrap()));
    let g1 = solve_linear_directional(
        xf,
        &[vec![h]],
        std::slice::from_ref(&free.g0),
        gauges.as_ref().map(|g| &g[..1]),
        cap,
    )?
    .remove(0);

    // a_{k-1} after the g1 rescaling, then X_F^2 w = c ã w
    let half_k = &kq / &Rational::from_int(2);
    let tilde = akm1
        .add(&ak.mul(ak)?.scale(&(&kq / &Rational::from_int(2 * (k as i64 + 1)))))?
        .sub(&xf.apply(ak)?.scale(&half_k))?;
    let c = Rational::new(6, (k * (k + 1) * (k + 2)) as i64);
    let ct = tilde.scale(&c);
    let zero = Jet::zero(space, Order::Exact);
    let one = Jet::one(space);
    let wz = solve_linear_directional(
        xf,
        &[vec![zero, one], vec![ct, Jet::zero(space, Order::Exact)]],
        &[free.w0.clone(), free.z0.clone()],
        gauges.as_ref().map(|g| &g[1..]),
        cap,
    )?;
    let w = &wz[0];
    let f = w.mul(w)?;
    let g = g1.mul(&crate::expr::pow(w, -(k as i32))?)?;

    let x = xf.mul_fn(&f)?;
    let v = v0.mul_fn(&g)?;
    let expansion = ad_expansion(&x, &v, k, &[])?;
    for i in [k, k - 1] {
        if !expansion.a[i].is_zero() {
            return Err(Error::Consistency(format!(
                "normalization left a nonzero coefficient a_{i} = {:?}",
                expansion.a[i]
            )));
        }
    }
    Ok(ReferenceFrame {
        k,
        x,
        v,
        f,
        g,
        expansion,
        regularity,
    })
}

/// Residuals `a_0 .. a_{k-2}` of a normalized frame and the verdict that
/// all their values at the point vanish.
#[derive(Clone, Debug)]
pub struct Wunschmann {
    pub residuals: Vec<Jet>,
    pub holds: bool,
    /// Every residual vanishes identically to its validity order.
    pub holds_as_jets: bool,
}

pub fn wunschmann_residuals(r: &ReferenceFrame) -> Wunschmann {
    let residuals = r.expansion.a[..=r.k - 2].to_vec();
    let holds = residuals.iter().all(|a| a.constant_term().is_zero());
    let holds_as_jets = residuals.iter().all(Jet::is_zero);
    Wunschmann {
        residuals,
        holds,
        holds_as_jets,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{expand_to_jet, parse};

    fn setup(k: usize, rhs: &str, point: &[i64], order: u32) -> (Chart, VField, VField) {
        let pt: Vec<Rational> = point.iter().map(|&v| Rational::from_int(v)).collect();
        let chart = Chart::jet_space(k, pt);
        let f = expand_to_jet(&parse(rhs, k).unwrap(), chart.values(), order).unwrap();
        let (x, v) = ode_fields(k, &f, &chart);
        (chart, x, v)
    }

    #[test]
    fn scalar_linear_ode() {
        let s = Space::series(2);
        let dt = VField::coordinate(s, 0).truncate(Order::Finite(6));
        let one = Jet::one(s).with_order(Order::Finite(6));
        let g = solve_directional_scale(&dt, &one, Rational::one(), 6).unwrap();
        let mut fact = 1;
        for d in 0..=6 {
            if d > 0 {
                fact *= d;
            }
            assert_eq!(g.coeff(&[d, 0]).unwrap(), Rational::new(1, fact as i64));
        }
        let g = solve_directional_scale(&dt, &Jet::zero(s, Order::Exact), Rational::one(), 6).unwrap();
        assert_eq!(g, Jet::one(s).with_order(Order::Finite(6)));
    }

    #[test]
    fn directional_residual_vanishes() {
        let (_, x, _) = setup(3, "x0*x2 + t", &[0, 1, 2, -1, 3], 8);
        let h = expand_to_jet(&parse("x1 - x3*t + 2", 3).unwrap(), &[0, 1, 2, -1, 3].map(Rational::from_int), 7).unwrap();
        for seed in [None, Some(5)] {
            let gauge = seed.map(|s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                vec![random_gauge(&mut rng, x.space())]
            });
            let g = solve_linear_directional(&x, &[vec![h.clone()]], &[Rational::new(3, 2)], gauge.as_deref(), 99).unwrap()
                .remove(0);
            assert_eq!(g.order(), Order::Finite(8));
            let res = x.apply(&g).unwrap().sub(&h.mul(&g).unwrap()).unwrap();
            assert!(res.is_zero(), "{res:?}");
            assert_eq!(g.constant_term(), Rational::new(3, 2));
        }
    }

    #[test]
    fn bracket_with_vertical_field() {
        // [X_F, d_xk] = -d_x(k-1) - F_xk d_xk
        let (chart, x, v) = setup(3, "x3^2 + x1", &[0, 1, 1, 1, 2], 6);
        let b = x.bracket(&v).unwrap();
        let f = expand_to_jet(&parse("x3^2 + x1", 3).unwrap(), chart.values(), 6).unwrap();
        let mut want = VField::zero(chart.space(), Order::Finite(5));
        want.set_comp(3, Jet::constant(chart.space(), Rational::from_int(-1), Order::Finite(5)));
        want.set_comp(4, f.partial(4).unwrap().neg());
        assert_eq!(b, want);
    }

    #[test]
    fn flat_pair_is_already_normal() {
        for k in [3, 4] {
            let (_, x, v) = setup(k, "0", &vec![0; k + 2], 2 * k as u32 + 4);
            let r = normalize_pair(&x, &v, k, &FreeData::default()).unwrap();
            assert_eq!(r.f, Jet::one(x.space()).with_order(r.f.order()));
            assert_eq!(r.g, Jet::one(x.space()).with_order(r.g.order()));
            assert!(r.expansion.a.iter().all(Jet::is_zero));
            assert!(wunschmann_residuals(&r).holds);
        }
    }

    #[test]
    fn linear_rhs_has_constant_coefficients() {
        let (_, x, v) = setup(3, "x3", &[0, 1, 2, 3, 4], 10);
        let e = ad_expansion(&x, &v, 3, &[]).unwrap();
        for a in e.a.iter().chain([&e.a_x]) {
            assert!(a.is_constant(), "{a:?}");
        }
    }

    #[test]
    fn nontrivial_normalization() {
        let (_, x, v) = setup(3, "x1*x2", &[0, 1, 2, 3, 1], 12);
        let r = normalize_pair(&x, &v, 3, &FreeData::default()).unwrap();
        assert!(!r.f.is_constant());
        let r2 = normalize_pair(
            &x,
            &v,
            3,
            &FreeData {
                gauge_seed: Some(11),
                ..FreeData::default()
            },
        )
        .unwrap();
        assert_ne!(r.f, r2.f);
    }
}

//! Generators and property bodies shared by the property suites and the
//! acceptance runner.
#![allow(dead_code)]

use canonframe::fields::VField;
use canonframe::jets::{Jet, Mono, Order, Space};
use canonframe::rational::Rational;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=6).prop_map(|(n, d)| Rational::new(n, d))
}

/// Spaces exercised by the kernel suite: pure series, and series plus
/// one invertible and one plain exact variable.
pub fn space() -> impl Strategy<Value = Space> {
    prop_oneof![
        (1usize..=4).prop_map(Space::series),
        (1usize..=3).prop_map(|n| Space::with_exact(n, &[true, false])),
    ]
}

/// Sparse jet in `space` with up to `terms` terms of series degree `<= max_deg`.
pub fn jet_in(space: Space, order: Order, terms: usize, max_deg: i32) -> impl Strategy<Value = Jet> {
    let nv = space.nvars();
    let ns = space.n_series();
    let exps = proptest::collection::vec(0..=max_deg, nv).prop_flat_map(move |e| {
        // exact variables: small exponents, negative only for the unit
        let ex = proptest::collection::vec(-2i32..=2, nv - ns);
        ex.prop_map(move |x| {
            let mut e = e.clone();
            for (i, v) in x.into_iter().enumerate() {
                let var = ns + i;
                e[var] = if space.is_unit_mono(Mono::unit(var)) { v } else { v.abs() };
            }
            e
        })
    });
    proptest::collection::vec((exps, small_rational()), 0..=terms).prop_map(move |ts| {
        Jet::from_terms(space, order, ts.into_iter().map(|(e, c)| (Mono::from_exponents(&e), c)))
    })
}

/// Unit jet: nonzero constant term plus higher terms.
pub fn unit_jet_in(space: Space, order: Order) -> impl Strategy<Value = Jet> {
    (jet_in(space, order, 5, 3), small_rational().prop_filter("nonzero", |c| !c.is_zero())).prop_map(move |(j, c)| {
        let head: Vec<_> = j.terms().iter().filter(|t| t.deg > 0).map(|t| (t.mono, t.coeff.clone())).collect();
        Jet::from_terms(space, order, head.into_iter().chain([(Mono::ONE, c)]))
    })
}

pub fn kernel_order() -> impl Strategy<Value = Order> {
    (2u32..=6).prop_map(Order::Finite)
}

/// Three jets in a common space at a common order.
pub fn jet_triple() -> impl Strategy<Value = (Jet, Jet, Jet)> {
    (space(), kernel_order()).prop_flat_map(|(s, o)| (jet_in(s, o, 6, 4), jet_in(s, o, 6, 4), jet_in(s, o, 6, 4)))
}

pub fn unit_jet() -> impl Strategy<Value = Jet> {
    (space(), kernel_order()).prop_flat_map(|(s, o)| unit_jet_in(s, o))
}

/// Equality after cutting both sides to the lower validity order.
pub fn same(a: &Jet, b: &Jet) -> bool {
    let o = a.order().min(b.order());
    a.truncate(o) == b.truncate(o)
}

fn ensure(ok: bool, what: &str) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(what.to_string()))
    }
}

pub fn ring_axioms(a: &Jet, b: &Jet, c: &Jet) -> Result<(), TestCaseError> {
    let s = a.space();
    let zero = Jet::zero(s, Order::Exact);
    let one = Jet::one(s);
    let ab = a.mul(b).unwrap();
    ensure(same(&a.add(b).unwrap(), &b.add(a).unwrap()), "addition commutes")?;
    ensure(
        same(&a.add(b).unwrap().add(c).unwrap(), &a.add(&b.add(c).unwrap()).unwrap()),
        "addition associates",
    )?;
    ensure(same(&ab, &b.mul(a).unwrap()), "multiplication commutes")?;
    ensure(same(&ab.mul(c).unwrap(), &a.mul(&b.mul(c).unwrap()).unwrap()), "multiplication associates")?;
    ensure(
        same(&a.mul(&b.add(c).unwrap()).unwrap(), &ab.add(&a.mul(c).unwrap()).unwrap()),
        "distributive law",
    )?;
    ensure(same(&a.add(&zero).unwrap(), a), "additive identity")?;
    ensure(same(&a.mul(&one).unwrap(), a), "multiplicative identity")?;
    ensure(a.sub(a).unwrap().is_zero(), "additive inverse")?;
    ensure(same(&a.add(&a.neg()).unwrap(), &zero), "negation")?;
    Ok(())
}

pub fn leibniz(a: &Jet, b: &Jet) -> Result<(), TestCaseError> {
    for v in 0..a.space().nvars() {
        let lhs = a.mul(b).unwrap().partial(v).unwrap();
        let rhs = a.partial(v).unwrap().mul(b).unwrap().add(&a.mul(&b.partial(v).unwrap()).unwrap()).unwrap();
        ensure(same(&lhs, &rhs), "Leibniz rule")?;
    }
    Ok(())
}

pub fn mixed_partials(a: &Jet) -> Result<(), TestCaseError> {
    let n = a.space().nvars();
    for u in 0..n {
        for v in 0..n {
            let uv = a.partial(u).unwrap().partial(v).unwrap();
            let vu = a.partial(v).unwrap().partial(u).unwrap();
            ensure(uv == vu, "mixed partials commute")?;
        }
    }
    Ok(())
}

pub fn inverse_multiplies_back(a: &Jet) -> Result<(), TestCaseError> {
    let inv = a.inv().map_err(|e| TestCaseError::fail(e.to_string()))?;
    let prod = a.mul(&inv).unwrap();
    ensure(same(&prod, &Jet::one(a.space())), "a * a^-1 = 1")?;
    ensure(prod.order() == a.order(), "inverse keeps the order")?;
    Ok(())
}

pub const LIE_ORDER: Order = Order::Finite(6);

/// Vector field in `n` series variables with sparse polynomial components.
pub fn vfield_in(n: usize) -> impl Strategy<Value = VField> {
    let s = Space::series(n);
    proptest::collection::vec(jet_in(s, LIE_ORDER, 3, 2), n).prop_map(|c| VField::from_comps(c).unwrap())
}

pub fn lie_triple() -> impl Strategy<Value = (VField, VField, VField, Jet)> {
    (2usize..=8).prop_flat_map(|n| (vfield_in(n), vfield_in(n), vfield_in(n), jet_in(Space::series(n), LIE_ORDER, 4, 3)))
}

fn same_field(a: &VField, b: &VField) -> bool {
    a.comps().iter().zip(b.comps()).all(|(x, y)| same(x, y))
}

pub fn jacobi(x: &VField, y: &VField, z: &VField) -> Result<(), TestCaseError> {
    let br = |a: &VField, b: &VField| a.bracket(b).unwrap();
    let sum = br(x, &br(y, z)).add(&br(y, &br(z, x))).unwrap().add(&br(z, &br(x, y))).unwrap();
    ensure(sum.is_zero(), "Jacobi identity")
}

pub fn bracket_leibniz(x: &VField, y: &VField, f: &Jet) -> Result<(), TestCaseError> {
    let lhs = x.bracket(&y.mul_fn(f).unwrap()).unwrap();
    let rhs = y.mul_fn(&x.apply(f).unwrap()).unwrap().add(&x.bracket(y).unwrap().mul_fn(f).unwrap()).unwrap();
    ensure(same_field(&lhs, &rhs), "[X, fY] = X(f) Y + f [X, Y]")?;
    let anti = x.bracket(y).unwrap().add(&y.bracket(x).unwrap()).unwrap();
    ensure(anti.is_zero(), "antisymmetry")
}

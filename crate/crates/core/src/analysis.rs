//! The full pipeline from a problem to verdicts: normalization, bundle,
//! canonical frame, structure table, checks.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::{make_bundle_chart, FiberPoint};
use crate::error::{Error, Result};
use crate::expr::expand_to_jet;
use crate::fields::Chart;
use crate::frame::{solve_normalization, verify_structural, CanonicalFrame, Check};
use crate::invariants::{
    derived_flag_ranks, equation_type_test, flatness_evidence, model_coframe, projection_constants,
    bf1_exact_check, EquationType, FlatnessEvidence, ModelReport, StructureTable,
};
use crate::jets::{Jet, JetError, Order};
use crate::normalize::{normalize_pair, ode_fields, wunschmann_residuals, ReferenceFrame, Wunschmann};
use crate::problem::Problem;
use crate::rational::Rational;

/// Everything computed at one base point.
#[derive(Clone, Debug)]
pub struct PointAnalysis {
    pub base_point: Vec<Rational>,
    pub reference: ReferenceFrame,
    pub wunschmann: Wunschmann,
    pub frame: CanonicalFrame,
    pub table: StructureTable,
    pub equation_type: EquationType,
    pub flatness: FlatnessEvidence,
    pub timings: Vec<(&'static str, Duration)>,
}

impl PointAnalysis {
    pub fn exact_values(&self) -> &[Rational] {
        self.frame.exact_values()
    }

    pub fn w_values(&self) -> Vec<Rational> {
        self.table.w().iter().map(|w| w.value_at(self.exact_values())).collect()
    }
}

/// Runs the pipeline at `base` with the problem's fibre point.
pub fn analyze_point(p: &Problem, base: &[Rational]) -> Result<PointAnalysis> {
    analyze_point_with(p, base, &p.fiber)
}

pub fn analyze_point_with(p: &Problem, base: &[Rational], fiber: &FiberPoint) -> Result<PointAnalysis> {
    let mut timings = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |name: &'static str, timings: &mut Vec<(&'static str, Duration)>| {
        timings.push((name, clock.elapsed()));
        clock = Instant::now();
    };
    let chart = Chart::jet_space(p.k, base.to_vec());
    let rhs = expand_to_jet(&p.rhs, chart.values(), p.jet_order())?;
    let (xf, v0) = ode_fields(p.k, &rhs, &chart);
    let reference = normalize_pair(&xf, &v0, p.k, &p.free)?;
    let wunschmann = wunschmann_residuals(&reference);
    lap("normalize", &mut timings);
    let bundle = make_bundle_chart(&reference, base, fiber.clone())?;
    let frame = solve_normalization(&bundle)?;
    lap("frame", &mut timings);
    let table = StructureTable::compute(&frame)?;
    let ev = frame.exact_values();
    let equation_type = equation_type_test(&table.torsion(), ev);
    let flatness = flatness_evidence(&table, bundle.chart.names(), ev)?;
    lap("invariants", &mut timings);
    Ok(PointAnalysis {
        base_point: base.to_vec(),
        reference,
        wunschmann,
        frame,
        table,
        equation_type,
        flatness,
        timings,
    })
}

/// Verdicts at one sample point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleVerdict {
    pub point: Vec<Rational>,
    pub wunschmann: bool,
    pub equation_type: bool,
    pub flat_here: bool,
    pub witness: Option<String>,
}

impl SampleVerdict {
    fn of(a: &PointAnalysis) -> Self {
        SampleVerdict {
            point: a.base_point.clone(),
            wunschmann: a.wunschmann.holds,
            equation_type: a.equation_type.holds,
            flat_here: a.flatness.flat_here,
            witness: a.flatness.witness.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub problem: Problem,
    pub primary: PointAnalysis,
    pub samples: Vec<SampleVerdict>,
    pub flat: bool,
    /// First nonzero entry found, prefixed with its sample index.
    pub flat_witness: Option<String>,
}

impl Analysis {
    pub fn fingerprint(&self) -> Fingerprint {
        Fingerprint {
            k: self.problem.k,
            wunschmann: self.primary.wunschmann.holds,
            equation_type: self.samples.iter().all(|s| s.equation_type),
            flat: self.flat,
        }
    }
}

/// The gauge- and point-independent verdicts of an analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    pub k: usize,
    pub wunschmann: bool,
    pub equation_type: bool,
    pub flat: bool,
}

/// Whether `rhs` can be expanded at `point`: domain errors and division
/// by zero make a point unusable, other errors are real.
fn admissible(p: &Problem, point: &[Rational]) -> Result<bool> {
    match expand_to_jet(&p.rhs, point, 2) {
        Ok(_) => Ok(true),
        Err(Error::Domain(_)) | Err(Error::Jet(JetError::NotInvertible)) => Ok(false),
        Err(e) => Err(e),
    }
}

const POOL: [(i64, i64); 9] = [(0, 1), (1, 1), (-1, 1), (1, 2), (-1, 2), (1, 3), (2, 1), (1, 4), (-2, 3)];

/// `n` distinct admissible base points. The first is the problem's own
/// point when admissible; the rest come from a search seeded by `p.seed`.
pub fn sample_points(p: &Problem, n: usize) -> Result<Vec<Vec<Rational>>> {
    let mut out = Vec::new();
    let own = p.base_point();
    if admissible(p, &own)? {
        out.push(own);
    } else if !p.point.is_empty() {
        return Err(Error::Input("rhs cannot be expanded at the given point".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut tries = 0;
    while out.len() < n {
        tries += 1;
        if tries > 2000 {
            return Err(Error::Input("no admissible expansion point found for rhs".into()));
        }
        let cand: Vec<Rational> = (0..p.k + 2)
            .map(|_| {
                let (a, b) = POOL[rng.random_range(0..POOL.len())];
                Rational::new(a, b)
            })
            .collect();
        if !out.contains(&cand) && admissible(p, &cand)? {
            out.push(cand);
        }
    }
    Ok(out)
}

/// Worker count: `CANONFRAME_THREADS` or the available parallelism.
pub fn thread_count() -> usize {
    std::env::var("CANONFRAME_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `f` over `items` on up to `threads` scoped workers; results keep
/// the input order.
fn par_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = threads.clamp(1, items.len().max(1));
    if threads == 1 {
        return items.iter().map(f).collect();
    }
    let mut slots: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|s| {
        for (its, outs) in items.chunks(chunk).zip(slots.chunks_mut(chunk)) {
            let f = &f;
            s.spawn(move || {
                for (it, o) in its.iter().zip(outs) {
                    *o = Some(f(it));
                }
            });
        }
    });
    slots.into_iter().map(Option::unwrap).collect()
}

pub fn analyze(p: &Problem) -> Result<Analysis> {
    p.validate()?;
    let points = sample_points(p, p.samples)?;
    let results = par_map(&points, thread_count(), |pt| analyze_point(p, pt));
    let mut analyses = Vec::with_capacity(results.len());
    for r in results {
        analyses.push(r?);
    }
    let samples: Vec<SampleVerdict> = analyses.iter().map(SampleVerdict::of).collect();
    let flat = samples.iter().all(|s| s.flat_here);
    let flat_witness = samples
        .iter()
        .enumerate()
        .find_map(|(i, s)| s.witness.as_ref().map(|w| format!("sample {i}: {w}")));
    Ok(Analysis {
        problem: p.clone(),
        primary: analyses.swap_remove(0),
        samples,
        flat,
        flat_witness,
    })
}

fn verdict(name: impl Into<String>, ok: bool, witness: Option<String>) -> Check {
    Check {
        name: name.into(),
        zero: ok,
        order: Order::Exact,
        witness: if ok { None } else { witness },
    }
}

/// Every identity that must hold for an ODE input, at one point.
pub fn verification_checks(a: &PointAnalysis) -> Result<Vec<Check>> {
    let fr = &a.frame;
    let ev = fr.exact_values();
    let k = fr.k();
    let mut out = Vec::new();
    for (name, t) in ["T01_0", "T01_1", "T01_2", "T03_3"].iter().zip(&fr.adapted) {
        out.push(verdict(format!("adapted {name}"), t.is_zero(), Some(format!("value at point = {}", t.value_at(ev)))));
    }
    out.extend(verify_structural(fr)?);
    out.push(verdict(
        "equation type",
        a.equation_type.holds && a.equation_type.holds_as_jets,
        a.equation_type.witness.clone().or(Some("nonzero beyond the point".into())),
    ));
    out.extend(bf1_exact_check(fr)?);
    let ModelReport { checks, .. } = model_coframe(fr)?;
    out.extend(checks.into_iter().map(|mut c| {
        c.name = format!("model {}", c.name);
        c
    }));
    let ranks = derived_flag_ranks(&a.table, ev);
    let expected: Vec<usize> = (5..=k + 5).collect();
    out.push(verdict("derived flag ranks", ranks == expected, Some(format!("{ranks:?}"))));
    let proj = projection_constants(fr);
    out.push(verdict("projection constants", proj.is_ok(), proj.err().map(|e| e.to_string())));
    Ok(out)
}

/// Outcome of `verify`: the checks and whether all passed.
#[derive(Clone, Debug)]
pub struct Verification {
    pub checks: Vec<Check>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.zero)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.zero)
    }
}

/// Test hook for `verify`: shift one ansatz unknown before checking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corruption {
    pub which: usize,
    pub delta: Rational,
}

pub fn verify(p: &Problem, corrupt: Option<&Corruption>) -> Result<Verification> {
    p.validate()?;
    let base = sample_points(p, 1)?.remove(0);
    let mut a = analyze_point(p, &base)?;
    if let Some(c) = corrupt {
        a.frame = a.frame.perturbed(c.which, &c.delta)?;
        a.table = StructureTable::compute(&a.frame)?;
        a.equation_type = equation_type_test(&a.table.torsion(), a.frame.exact_values());
    }
    Ok(Verification {
        checks: verification_checks(&a)?,
    })
}

/// `w_i` at fibre points with `F0 = 1` and `F0 = 2` over the same base data,
/// and whether `w_i(2) = 2^-(k+1-i) w_i(1)` for every `i`.
#[derive(Clone, Debug)]
pub struct Homogeneity {
    pub at_one: Vec<Rational>,
    pub at_two: Vec<Rational>,
    pub holds: bool,
}

pub fn homogeneity(p: &Problem, base: &[Rational]) -> Result<Homogeneity> {
    let run = |f0: i64| -> Result<Vec<Rational>> {
        let fiber = FiberPoint {
            f0: Rational::from_int(f0),
            ..p.fiber.clone()
        };
        Ok(analyze_point_with(p, base, &fiber)?.w_values())
    };
    let at_one = run(1)?;
    let at_two = run(2)?;
    let k = p.k as i32;
    let holds = at_one
        .iter()
        .zip(&at_two)
        .enumerate()
        .all(|(i, (a, b))| *b == a * &Rational::from_int(2).pow(-(k + 1 - i as i32)));
    Ok(Homogeneity { at_one, at_two, holds })
}

/// Outcome of comparing two problems. Only ever refutes equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Comparison {
    Distinguishable(Vec<&'static str>),
    NotDistinguished,
}

pub fn compare(a: &Analysis, b: &Analysis) -> Result<Comparison> {
    let (fa, fb) = (a.fingerprint(), b.fingerprint());
    if fa.k != fb.k {
        return Err(Error::Input(format!("cannot compare k = {} with k = {}", fa.k, fb.k)));
    }
    let mut differ = Vec::new();
    if fa.wunschmann != fb.wunschmann {
        differ.push("wunschmann");
    }
    if fa.equation_type != fb.equation_type {
        differ.push("equation_type");
    }
    if fa.flat != fb.flat {
        differ.push("flat");
    }
    Ok(if differ.is_empty() {
        Comparison::NotDistinguished
    } else {
        Comparison::Distinguishable(differ)
    })
}

/// Jet renderer with the bundle chart's coordinate names.
pub fn render_jet(a: &PointAnalysis, j: &Jet) -> String {
    j.render(a.frame.bundle.chart.names())
}

//! Text rendering of an analysis: `[section]` headers followed by
//! `name = value` lines. Values are exact rationals or verdicts.

use std::fmt::Write;

use crate::analysis::{render_jet, Analysis, Comparison};
use crate::error::Result;
use crate::frame::{verify_structural, Ansatz, Check};
use crate::invariants::{derived_flag_ranks, model_coframe, projection_constants, bf1_exact_check};
use crate::rational::Rational;

pub const FORMAT: &str = "canonframe-report/1";

#[derive(Clone, Copy, Debug, Default)]
pub struct ReportOptions {
    /// Print torsion coefficients and `w_i` as full jets as well.
    pub jets: bool,
    /// Append wall-clock timings (makes the output nondeterministic).
    pub timings: bool,
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

fn join(v: &[Rational]) -> String {
    v.iter().map(Rational::to_string).collect::<Vec<_>>().join(", ")
}

struct Out(String);

impl Out {
    fn section(&mut self, name: &str) {
        let _ = writeln!(self.0, "\n[{name}]");
    }

    fn kv(&mut self, key: impl std::fmt::Display, value: impl std::fmt::Display) {
        let _ = writeln!(self.0, "{key} = {value}");
    }

    fn check(&mut self, c: &Check) {
        let _ = writeln!(self.0, "{c}");
    }
}

pub fn render(a: &Analysis, opts: ReportOptions) -> Result<String> {
    let p = &a.problem;
    let pa = &a.primary;
    let fr = &pa.frame;
    let ev = fr.exact_values();
    let names = fr.bundle.chart.names();
    let mut o = Out(String::new());
    o.kv("format", FORMAT);

    o.section("problem");
    o.0.push_str(&p.to_string());

    o.section("point");
    for (n, v) in names.iter().zip(fr.bundle.chart.values()) {
        o.kv(n, v);
    }

    o.section("solver");
    o.kv("order", p.jet_order());
    o.kv("reference_order", pa.reference.order());
    o.kv("frame_order", fr.order());
    let torsion = pa.table.torsion();
    let t_order = torsion.entries.iter().map(|(_, j)| j.order()).min().unwrap();
    o.kv("torsion_order", t_order);

    o.section("regularity");
    o.kv("regular", yes_no(pa.reference.regularity.regular));
    let ranks: Vec<String> = pa.reference.regularity.ranks.iter().map(usize::to_string).collect();
    o.kv("ranks", ranks.join(" "));

    o.section("wunschmann");
    o.kv("verdict", yes_no(pa.wunschmann.holds));
    o.kv("as_jets", yes_no(pa.wunschmann.holds_as_jets));
    for (i, r) in pa.wunschmann.residuals.iter().enumerate() {
        o.kv(format!("a{i}"), r.constant_term());
    }

    o.section("normalization");
    o.kv("f", pa.reference.f.constant_term());
    o.kv("g", pa.reference.g.constant_term());
    for (i, c) in fr.constants.iter().enumerate() {
        o.kv(format!("C{}", i + 1), c.value_at(ev));
    }
    o.kv("c_tilde", fr.c_tilde.value_at(ev));
    for (i, n) in Ansatz::NAMES.iter().enumerate() {
        o.kv(n, fr.ansatz.get(i).value_at(ev));
    }

    o.section("adapted");
    for (n, t) in ["T01_0", "T01_1", "T01_2", "T03_3"].iter().zip(&fr.adapted) {
        o.kv(n, t.value_at(ev));
    }

    o.section("torsion");
    for ((pp, q, r), j) in &torsion.entries {
        o.kv(format!("T{pp}{q}_{r}"), j.value_at(ev));
    }
    o.section("w");
    let w = pa.table.w();
    for (i, j) in w.iter().enumerate() {
        o.kv(format!("w{i}"), j.value_at(ev));
    }
    if opts.jets {
        o.section("torsion.jets");
        for ((pp, q, r), j) in &torsion.entries {
            o.kv(format!("T{pp}{q}_{r}"), render_jet(pa, j));
        }
        for (i, j) in w.iter().enumerate() {
            o.kv(format!("w{i}"), render_jet(pa, j));
        }
    }

    o.section("structural");
    for c in verify_structural(fr)? {
        o.check(&c);
    }

    o.section("equation_type");
    o.kv("verdict", yes_no(pa.equation_type.holds));
    o.kv("as_jets", yes_no(pa.equation_type.holds_as_jets));
    o.kv("witness", pa.equation_type.witness.as_deref().unwrap_or("none"));

    o.section("bf1_exact");
    for c in bf1_exact_check(fr)? {
        o.check(&c);
    }

    o.section("model");
    let m = model_coframe(fr)?;
    for c in &m.checks {
        o.check(c);
    }
    o.check(&m.obstruction);
    for c in &m.printed_bh {
        let _ = writeln!(o.0, "printed {c}");
    }

    o.section("projection");
    for (i, j, c) in projection_constants(fr)? {
        o.kv(format!("c{i}_{j}"), c);
    }

    o.section("derived_flag");
    let ranks: Vec<String> = derived_flag_ranks(&pa.table, ev).iter().map(usize::to_string).collect();
    o.kv("ranks", ranks.join(" "));

    o.section("flatness");
    o.kv(
        "verdict",
        if a.flat { "flat at tested points to tested order" } else { "not flat" },
    );
    o.kv("samples", a.samples.len());
    for (i, s) in a.samples.iter().enumerate() {
        o.kv(format!("sample{i}.point"), join(&s.point));
        o.kv(format!("sample{i}.flat"), yes_no(s.flat_here));
        o.kv(format!("sample{i}.wunschmann"), yes_no(s.wunschmann));
        o.kv(format!("sample{i}.equation_type"), yes_no(s.equation_type));
    }
    o.kv("witness", a.flat_witness.as_deref().unwrap_or("none"));

    if opts.timings {
        o.section("timings");
        for (n, d) in &pa.timings {
            o.kv(n, format!("{:.3} ms", d.as_secs_f64() * 1e3));
        }
    }
    Ok(o.0)
}

pub fn render_comparison(a: &Analysis, b: &Analysis, c: &Comparison) -> String {
    let mut o = Out(String::new());
    o.kv("format", FORMAT);
    o.section("compare");
    let (fa, fb) = (a.fingerprint(), b.fingerprint());
    o.kv("k", fa.k);
    o.kv("rhs", format!("{} | {}", a.problem.rhs_text, b.problem.rhs_text));
    o.kv("wunschmann", format!("{} | {}", yes_no(fa.wunschmann), yes_no(fb.wunschmann)));
    o.kv("equation_type", format!("{} | {}", yes_no(fa.equation_type), yes_no(fb.equation_type)));
    o.kv("flat", format!("{} | {}", yes_no(fa.flat), yes_no(fb.flat)));
    o.section("torsion");
    let ta = a.primary.table.torsion();
    let tb = b.primary.table.torsion();
    let (ea, eb) = (a.primary.exact_values(), b.primary.exact_values());
    for (((p, q, r), x), (_, y)) in ta.entries.iter().zip(&tb.entries) {
        o.kv(format!("T{p}{q}_{r}"), format!("{} | {}", x.value_at(ea), y.value_at(eb)));
    }
    for (i, (x, y)) in a.primary.w_values().iter().zip(b.primary.w_values()).enumerate() {
        o.kv(format!("w{i}"), format!("{x} | {y}"));
    }
    o.section("verdict");
    match c {
        Comparison::Distinguishable(d) => {
            o.kv("result", "distinguishable");
            o.kv("differing", d.join(", "));
        }
        Comparison::NotDistinguished => o.kv("result", "not distinguished at tested points"),
    }
    o.0
}

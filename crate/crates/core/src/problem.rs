//! Problem files: flat `key = value` text.
//!
//! ```text
//! # x''' ... comments start with '#'
//! k = 3
//! rhs = x0^2
//! point.t = 0
//! point.x1 = 1/2
//! fiber.F0 = 2
//! order = 14
//! samples = 3
//! seed = 7
//! ```
//!
//! Unset base coordinates default to `t = 0`, `x_i = (i+1)/10`.

use std::collections::BTreeMap;
use std::fmt;

use crate::bundle::FiberPoint;
use crate::error::{Error, Result};
use crate::expr::{parse, Expr};
use crate::normalize::FreeData;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub k: usize,
    pub rhs_text: String,
    pub rhs: Expr,
    /// Explicit base coordinates, by chart index (`t` = 0, `x_i` = i+1).
    pub point: BTreeMap<usize, Rational>,
    pub fiber: FiberPoint,
    pub free: FreeData,
    pub order: Option<u32>,
    pub samples: usize,
    pub seed: u64,
}

impl Problem {
    /// A problem with every optional key at its default.
    pub fn new(k: usize, rhs: &str) -> Result<Problem> {
        check_k(k)?;
        Ok(Problem {
            k,
            rhs_text: rhs.trim().to_string(),
            rhs: parse(rhs, k)?,
            point: BTreeMap::new(),
            fiber: FiberPoint::default(),
            free: FreeData::default(),
            order: None,
            samples: 3,
            seed: 0,
        })
    }

    pub fn parse(text: &str) -> Result<Problem> {
        let mut kv: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Input(format!("line {}: expected key = value", n + 1)));
            };
            let key = key.trim().to_string();
            if kv.insert(key.clone(), (n + 1, value.trim().to_string())).is_some() {
                return Err(Error::Input(format!("line {}: duplicate key {key}", n + 1)));
            }
        }
        let k_text = &kv.get("k").ok_or_else(|| Error::Input("missing key k".into()))?.1;
        let k: i64 = k_text
            .parse()
            .map_err(|_| Error::Input(format!("k: not an integer: {k_text}")))?;
        check_k(k.max(0) as usize)?;
        let k = k as usize;
        let rhs = kv.get("rhs").ok_or_else(|| Error::Input("missing key rhs".into()))?;
        let mut p = Problem::new(k, &rhs.1).map_err(|e| match e {
            Error::Parse(pe) => Error::Input(format!("line {}: rhs: {pe}", rhs.0)),
            e => e,
        })?;

        for (key, (line, value)) in &kv {
            let at = |e: Error| Error::Input(format!("line {line}: {key}: {e}"));
            let rat = || value.parse::<Rational>().map_err(|e| at(Error::Input(e.to_string())));
            let int = || value.parse::<u64>().map_err(|_| at(Error::Input(format!("not a nonnegative integer: {value}"))));
            match key.as_str() {
                "k" | "rhs" => {}
                "order" => p.order = Some(int()? as u32),
                "samples" => p.samples = int()? as usize,
                "seed" => p.seed = int()?,
                "gauge" => {
                    p.free.gauge_seed = match value.as_str() {
                        "zero" => None,
                        _ => Some(int()?),
                    }
                }
                "fiber.F0" => p.fiber.f0 = rat()?,
                "fiber.F1" => p.fiber.f1 = rat()?,
                "fiber.G" => p.fiber.g = rat()?,
                "free.w" => p.free.w0 = rat()?,
                "free.Xw" => p.free.z0 = rat()?,
                "free.g" => p.free.g0 = rat()?,
                "point.t" => {
                    p.point.insert(0, rat()?);
                }
                other => {
                    let idx = other
                        .strip_prefix("point.x")
                        .and_then(|i| i.parse::<usize>().ok())
                        .filter(|&i| i <= k)
                        .ok_or_else(|| Error::Input(format!("line {line}: unknown key {other}")))?;
                    p.point.insert(idx + 1, rat()?);
                }
            }
        }
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_k(self.k)?;
        if self.fiber.f0.is_zero() || self.fiber.g.is_zero() {
            return Err(Error::Input("fiber.F0 and fiber.G must be nonzero".into()));
        }
        if self.free.w0.is_zero() || self.free.g0.is_zero() {
            return Err(Error::Input("free.w and free.g must be nonzero".into()));
        }
        if self.samples < 2 {
            return Err(Error::Input("samples must be at least 2".into()));
        }
        if self.order.is_some_and(|n| n < min_order(self.k)) {
            return Err(Error::Input(format!("order must be at least {}", min_order(self.k))));
        }
        Ok(())
    }

    /// Jet order used: the override, or `max(2k+8, 3k+5)`.
    pub fn jet_order(&self) -> u32 {
        self.order.unwrap_or_else(|| default_order(self.k))
    }

    /// The default base point with explicit coordinates applied.
    pub fn base_point(&self) -> Vec<Rational> {
        let mut p: Vec<Rational> = (0..self.k + 2)
            .map(|i| if i == 0 { Rational::zero() } else { Rational::new(i as i64, 10) })
            .collect();
        for (&i, v) in &self.point {
            p[i] = v.clone();
        }
        p
    }
}

/// Smallest order that leaves every reported torsion jet with order >= 1.
pub fn min_order(k: usize) -> u32 {
    3 * k as u32 + 5
}

pub fn default_order(k: usize) -> u32 {
    (2 * k as u32 + 8).max(min_order(k))
}

fn check_k(k: usize) -> Result<()> {
    if k <= 2 {
        return Err(Error::Input(format!(
            "k must exceed 2 (got {k}): the construction assumes equations of order at least 4"
        )));
    }
    Ok(())
}

impl fmt::Display for Problem {
    /// Canonical problem text; parses back to an equal problem.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "k = {}", self.k)?;
        writeln!(f, "rhs = {}", self.rhs_text)?;
        for (&i, v) in &self.point {
            match i {
                0 => writeln!(f, "point.t = {v}")?,
                i => writeln!(f, "point.x{} = {v}", i - 1)?,
            }
        }
        writeln!(f, "fiber.F0 = {}", self.fiber.f0)?;
        writeln!(f, "fiber.F1 = {}", self.fiber.f1)?;
        writeln!(f, "fiber.G = {}", self.fiber.g)?;
        writeln!(f, "free.w = {}", self.free.w0)?;
        writeln!(f, "free.Xw = {}", self.free.z0)?;
        writeln!(f, "free.g = {}", self.free.g0)?;
        match self.free.gauge_seed {
            None => writeln!(f, "gauge = zero")?,
            Some(s) => writeln!(f, "gauge = {s}")?,
        }
        if let Some(n) = self.order {
            writeln!(f, "order = {n}")?;
        }
        writeln!(f, "samples = {}", self.samples)?;
        writeln!(f, "seed = {}", self.seed)
    }
}

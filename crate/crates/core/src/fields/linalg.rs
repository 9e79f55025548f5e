use num_bigint::BigInt;
use num_traits::Zero;

use super::VField;
use crate::error::{Error, Result};
use crate::jets::{Jet, JetError, Order};
use crate::rational::{lcm_of_denominators, Rational};

/// Rank of a rational matrix (given as rows) by fraction-free Bareiss
/// elimination over the integers.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let l = lcm_of_denominators(r.iter());
            r.iter()
                .map(|q| q.numer() * (&l / q.denom()))
                .collect()
        })
        .collect();
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for col in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            for c in col + 1..ncols {
                let v = &m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c];
                m[r][c] = v / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Precomputed inverse of a frame's component matrix, for expanding many
/// fields in the same frame.
///
/// Elimination runs over jets and needs pivots that are units: their
/// degree-0 part must be a single monomial in the invertible variables.
/// Pivots are chosen greedily among all remaining entries, sparsest first.
#[derive(Clone, Debug)]
pub struct FrameSolver {
    /// `inv[i][j]`: coefficient of frame vector `i` per unit of component `j`.
    inv: Vec<Vec<Jet>>,
}

impl FrameSolver {
    pub fn new(frame: &[VField], exact_values: &[Rational]) -> Result<Self> {
        let n = frame.first().map(|f| f.space().nvars()).unwrap_or(0);
        if frame.len() != n {
            return Err(Error::Input(format!(
                "frame has {} vectors for a {n}-dimensional chart",
                frame.len()
            )));
        }
        let space = frame[0].space();
        // Exact entries are cut to the frame's finite order so that their
        // inverses exist as truncated series.
        let cap = frame
            .iter()
            .flat_map(|f| f.comps().iter().map(Jet::order))
            .filter(|o| *o != Order::Exact)
            .min()
            .unwrap_or(Order::Exact);
        // a[r][c] = component r of frame vector c, augmented with identity
        let mut a: Vec<Vec<Jet>> = (0..n)
            .map(|r| {
                let mut row: Vec<Jet> = frame.iter().map(|f| f.comp(r).truncate(cap)).collect();
                row.extend((0..n).map(|c| {
                    if c == r {
                        Jet::one(space).truncate(cap)
                    } else {
                        Jet::zero(space, cap)
                    }
                }));
                row
            })
            .collect();

        let degenerate = || {
            let rows: Vec<Vec<Rational>> = frame.iter().map(|f| f.value_at(exact_values)).collect();
            if rank(&rows) < n {
                Error::DegenerateFrame
            } else {
                Error::Consistency("no monomial pivot available in frame elimination".into())
            }
        };

        let mut row_done = vec![false; n];
        let mut col_done = vec![false; n];
        // pivot_row[c] = row that pivots column c
        let mut pivot_row = vec![0; n];
        for _ in 0..n {
            let mut best: Option<(usize, usize, usize)> = None;
            for r in (0..n).filter(|&r| !row_done[r]) {
                for c in (0..n).filter(|&c| !col_done[c]) {
                    let e = &a[r][c];
                    if e.is_zero() || !is_unit(e) {
                        continue;
                    }
                    let score = e.len();
                    if best.is_none_or(|(_, _, s)| score < s) {
                        best = Some((r, c, score));
                    }
                }
            }
            let (pr, pc, _) = best.ok_or_else(degenerate)?;
            row_done[pr] = true;
            col_done[pc] = true;
            pivot_row[pc] = pr;
            let inv = match a[pr][pc].inv() {
                Ok(j) => j,
                Err(JetError::NotInvertible) => return Err(degenerate()),
                Err(e) => return Err(e.into()),
            };
            for c in 0..2 * n {
                if !a[pr][c].is_zero() {
                    a[pr][c] = a[pr][c].mul(&inv)?;
                }
            }
            let pivot = a[pr].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r == pr || row[pc].is_zero() {
                    continue;
                }
                let factor = row[pc].clone();
                for c in 0..2 * n {
                    if pivot[c].is_zero() {
                        row[c] = row[c].truncate(pivot[c].order().min(factor.order()));
                        continue;
                    }
                    row[c] = row[c].sub(&factor.mul(&pivot[c])?)?;
                }
            }
        }
        // after full elimination row pivot_row[c] holds e_c = sum inv[c][j] W_j
        let inv = (0..n).map(|c| a[pivot_row[c]][n..].to_vec()).collect();
        Ok(FrameSolver { inv })
    }

    pub fn dim(&self) -> usize {
        self.inv.len()
    }

    /// Coefficients `c` with `w = sum_i c_i frame_i`.
    pub fn solve(&self, w: &VField) -> Result<Vec<Jet>> {
        self.inv
            .iter()
            .map(|row| dot(row, w.comps()))
            .collect()
    }

    /// Only the coefficients with the listed frame indices.
    pub fn solve_some(&self, w: &VField, which: &[usize]) -> Result<Vec<Jet>> {
        which.iter().map(|&i| dot(&self.inv[i], w.comps())).collect()
    }
}

fn dot(row: &[Jet], comps: &[Jet]) -> Result<Jet> {
    let mut order = Order::Exact;
    let mut acc: Option<Jet> = None;
    for (a, b) in row.iter().zip(comps) {
        order = order.min(a.order()).min(b.order());
        if a.is_zero() || b.is_zero() {
            continue;
        }
        let p = a.mul(b)?;
        acc = Some(match acc {
            None => p,
            Some(s) => s.add(&p)?,
        });
    }
    let space = comps[0].space();
    Ok(acc.unwrap_or_else(|| Jet::zero(space, order)).with_order(order))
}

fn is_unit(j: &Jet) -> bool {
    let lead: Vec<_> = j.terms().iter().take_while(|t| t.deg == 0).collect();
    lead.len() == 1 && j.space().is_unit_mono(lead[0].mono)
}

/// Coefficients of `w` in `frame`.
pub fn frame_expand(w: &VField, frame: &[VField], exact_values: &[Rational]) -> Result<Vec<Jet>> {
    FrameSolver::new(frame, exact_values)?.solve(w)
}

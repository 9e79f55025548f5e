//! Sparse truncated multivariate power series with exact coefficients.
//!
//! A [`Jet`] lives in a [`Space`] made of two kinds of variables:
//!
//! * *series* variables are local coordinates centred at the expansion point;
//!   jets in them are truncated at the validity [`Order`] and every partial
//!   derivative along them costs one order;
//! * *exact* variables are carried as Laurent polynomials with no truncation
//!   at all. The canonical bundle's fibre coordinates live here, because every
//!   object built on the bundle depends on them polynomially in `F1` and
//!   Laurent-polynomially in `F0` and `G`.
//!
//! The degree and validity order only ever count series exponents.

mod jet;
mod mono;

pub use jet::{Jet, Term};
pub use mono::{Mono, MAX_VARS};

use std::fmt;

/// Variable layout shared by all jets that may be combined.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Space {
    series: u8,
    exact: u8,
    /// Bit `i` set: exact variable `i` may carry negative exponents and is a
    /// unit (it never vanishes on the charts we build).
    invertible: u16,
}

impl Space {
    pub fn series(n: usize) -> Self {
        assert!(n <= MAX_VARS, "too many variables");
        Space {
            series: n as u8,
            exact: 0,
            invertible: 0,
        }
    }

    /// `series` truncated variables followed by `exact` Laurent variables;
    /// `invertible[i]` marks exact variable `i` as a unit.
    pub fn with_exact(series: usize, invertible: &[bool]) -> Self {
        assert!(series + invertible.len() <= MAX_VARS, "too many variables");
        let mask = invertible
            .iter()
            .enumerate()
            .fold(0u16, |m, (i, &b)| if b { m | (1 << i) } else { m });
        Space {
            series: series as u8,
            exact: invertible.len() as u8,
            invertible: mask,
        }
    }

    pub fn n_series(&self) -> usize {
        self.series as usize
    }

    pub fn n_exact(&self) -> usize {
        self.exact as usize
    }

    pub fn nvars(&self) -> usize {
        (self.series + self.exact) as usize
    }

    pub fn is_series(&self, var: usize) -> bool {
        var < self.series as usize
    }

    /// True when every exact exponent of `m` sits on an invertible variable
    /// or is zero, i.e. `m` is a unit of the coefficient ring.
    pub fn is_unit_mono(&self, m: Mono) -> bool {
        (0..self.exact as usize).all(|i| {
            self.invertible & (1 << i) != 0 || m.exp(self.series as usize + i) == 0
        })
    }

    /// Base (series-only) space of the same series dimension.
    pub fn base(&self) -> Space {
        Space::series(self.series as usize)
    }
}

/// Validity order of a jet: all coefficients of total series degree up to
/// and including the order are exact; nothing is known beyond it.
///
/// `Exact` marks polynomials known completely (coordinate functions,
/// constants, fibre monomials).
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Finite(u32),
    Exact,
}

impl Order {
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(n) => Some(n),
            Order::Exact => None,
        }
    }

    /// Order after one derivative along a series variable.
    pub fn lower(self) -> Result<Order, JetError> {
        match self {
            Order::Finite(0) => Err(JetError::InsufficientOrder {
                needed: 1,
                available: 0,
            }),
            Order::Finite(n) => Ok(Order::Finite(n - 1)),
            Order::Exact => Ok(Order::Exact),
        }
    }

    pub fn admits(self, degree: u32) -> bool {
        match self {
            Order::Finite(n) => degree <= n,
            Order::Exact => true,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Exact => f.write_str("exact"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JetError {
    #[error("jets live in different variable spaces")]
    SpaceMismatch,
    #[error("jet not invertible at point")]
    NotInvertible,
    #[error("insufficient jet order: need {needed}, have {available}")]
    InsufficientOrder { needed: u32, available: u32 },
    #[error("coefficient of degree {degree} requested beyond validity order {order}")]
    BeyondOrder { degree: u32, order: u32 },
    #[error("variable index {0} out of range")]
    BadVariable(usize),
    #[error("an exact jet with a non-monomial leading part has no finite inverse")]
    UnboundedInverse,
}

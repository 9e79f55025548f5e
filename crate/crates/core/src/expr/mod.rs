//! Right-hand-side expressions: parsing, printing and jet expansion.

mod ast;
mod expand;
mod parser;

pub use ast::{Expr, Func, Var};
pub use expand::{elementary, expand_to_jet, pow};
pub use parser::{parse, ParseError};

//! Prescribed data: expressions, warp profiles, energy weights and the
//! hypothesis checkers that gate a run.

pub mod conditions;
mod expr;
mod parser;
mod profile;
pub mod quadrature;
mod weights;

pub use conditions::{
    check_corollary1_conditions, check_corollary2_conditions, check_theorem_conditions,
    ConditionEntry, ConditionReport, Location, DEFAULT_U_SAMPLES,
};
pub use expr::{EvalError, Expr, Func, Var};
pub use parser::{parse, ParseError};
pub use profile::{ProfileError, WarpedProfile};
pub use weights::{EnergyWeights, WeightError, WeightPair};

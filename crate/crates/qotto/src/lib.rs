//! Exact simulation of two-stroke Otto engines whose working fluid is a pair
//! of equally spaced qudits held at different temperatures.
//!
//! The work stroke of such an engine is a permutation of the product energy
//! basis. This crate derives the work-optimal permutation by double sorting
//! (populations descending against energies ascending), classifies the qutrit
//! regimes (swap, idle swaps, double swap), and computes the full finite
//! joint distribution of work and subsystem energy change for any basis
//! permutation. On top of the exact distribution it evaluates entropy
//! production, characteristic functions, fluctuation-theorem residuals,
//! thermodynamic uncertainty bounds, and a seedable Monte Carlo sampler of
//! engine cycles.
//!
//! All numerics are generic over the floating-point scalar via [`Real`];
//! the `*64` aliases at the crate root fix `f64`, which is the precision the
//! CLI and the test suites use.
//!
//! ```
//! use qotto::{ergotropy, statistics, EngineParams64};
//!
//! let params = EngineParams64::qutrit(1.0, 0.75, 0.5, 4.0).unwrap();
//! let result = ergotropy::ergotropic_unitary(&params);
//! let joint = statistics::joint_distribution(&params, &result.unitary).unwrap();
//! let stats = statistics::entropy_production(&params, &joint);
//! assert!(result.mean_work > 0.0 && stats.mean_entropy > 0.0);
//! ```

use num_traits::{Float, FromPrimitive};

pub mod ergotropy;
pub mod model;
pub mod qutrit;
pub mod statistics;
pub mod trajectory;
pub mod tur;

/// Floating-point scalar the engine maths is generic over.
pub trait Real: Float + FromPrimitive + std::fmt::Debug + std::iter::Sum + 'static {}

impl<T> Real for T where T: Float + FromPrimitive + std::fmt::Debug + std::iter::Sum + 'static {}

/// Converts an `f64` literal into the working scalar type.
pub(crate) fn lit<T: Real>(value: f64) -> T {
    T::from_f64(value).expect("literal must be representable in the scalar type")
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("cycle notation: {0}")]
    CycleNotation(String),
    #[error("operation requires a 3x3 engine, got {dim_a}x{dim_b}")]
    NotQutrit { dim_a: usize, dim_b: usize },
    #[error("the passive regime has no closed form")]
    PassiveClosedForm,
    #[error("imaginary part of a counting parameter exceeds the cap {cap}")]
    CountingParameterOverflow { cap: f64 },
    #[error("inverse of x*tanh(x) requires a nonnegative argument")]
    NegativeEntropyArgument,
    #[error("sweep must contain at least one step")]
    EmptySweep,
    #[error("sample count must be at least 1")]
    EmptySample,
}

pub type Result<T> = std::result::Result<T, Error>;

pub use ergotropy::ErgotropyResult;
pub use model::{
    apply_permutation, compose, conserved_number_combination, energy_table, gibbs_state,
    BasisPermutation, DiagonalState, EnergyTable, EngineParams,
};
pub use qutrit::RegimeLabel;
pub use statistics::{CycleStatistics, JointWorkHeat, WorkHeatAtom};
pub use trajectory::{EmpiricalSummary, Trajectory};
pub use tur::{BoundCheck, TurReport};

/// Double-precision engine parameters (the supported default).
pub type EngineParams64 = model::EngineParams<f64>;
/// Double-precision occupation-probability vector.
pub type DiagonalState64 = model::DiagonalState<f64>;
/// Double-precision energy table.
pub type EnergyTable64 = model::EnergyTable<f64>;
/// Double-precision joint work/heat distribution.
pub type JointWorkHeat64 = statistics::JointWorkHeat<f64>;
/// Double-precision per-cycle statistics.
pub type CycleStatistics64 = statistics::CycleStatistics<f64>;
/// Double-precision uncertainty-relation report.
pub type TurReport64 = tur::TurReport<f64>;

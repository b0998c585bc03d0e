//! Universal ARMA graph filters.
//!
//! The crate covers the full life cycle of a graph filter whose coefficients
//! are chosen for a whole spectral interval rather than a particular graph:
//!
//! * [`graph`], [`operator`], [`spectrum`], [`signal`]: graphs, shift
//!   operators, the graph Fourier transform and exact spectral filtering.
//! * [`design`]: least-squares FIR design, the two-step rational fit and
//!   conversion to parallel and periodic realizations.
//! * [`engine`]: a round-synchronous, per-node simulator that runs the
//!   resulting recursions with message and memory accounting.
//! * [`temporal`]: joint graph/time transfer functions and their empirical
//!   verification.
//! * [`experiments`]: scripted response-fit, convergence and mobility runs.

pub mod config;
pub mod design;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod operator;
pub mod signal;
pub mod spectrum;
pub mod temporal;

pub use num_complex::Complex64;

pub use design::{
    design_arma, design_fir, ArmaDesign, DesignConfig, DesiredResponse, FirDesign, ParallelForm,
    PeriodicForm, RationalDesign, ResponseKind, StabilityReport,
};
pub use engine::{Engine, FilterSpec, InitialCondition, SimulationConfig, Trace};
pub use error::{Error, Result};
pub use graph::Graph;
pub use operator::{build_shift_operator, OperatorVariant, ShiftOperator, SpectralInterval};
pub use signal::GraphSignal;
pub use spectrum::{eigendecompose, Spectrum};

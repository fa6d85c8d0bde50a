//! Spectral laboratory for compressible nematic liquid-crystal flow on a
//! periodic box.
//!
//! The crate provides, bottom up:
//!
//! * [`grid`]/[`field`]: complex spectral fields over a uniform periodic grid
//!   in 1, 2 or 3 dimensions, with FFT transforms, Fourier multipliers and
//!   `L^p` norms;
//! * [`lp`]: a dyadic Littlewood-Paley partition of unity with block
//!   operators and Bony paraproduct/remainder decomposition;
//! * [`besov`]: homogeneous Besov, hybrid Besov and Chemin-Lerner norms plus
//!   the mixed solution-space norm used for small-data estimates;
//! * [`model`]: right-hand sides of the epsilon-scaled compressible system,
//!   its incompressible limit and director-constraint handling;
//! * [`acoustic`]: the exact per-mode propagator of the (viscous) acoustic
//!   pair;
//! * [`stepper`]: integrating-factor Heun time stepping with trajectory
//!   recording;
//! * [`synth`]: seeded random band-limited fields for experiments and tests.

pub mod acoustic;
pub mod besov;
pub mod error;
pub mod field;
mod fft;
pub mod grid;
pub mod lp;
pub mod model;
pub mod stepper;
pub mod symbol;
pub mod synth;

pub use besov::{BesovIndex, Trajectory};
pub use error::{Error, Result};
pub use field::SpectralField;
pub use grid::Grid;
pub use lp::DyadicPartition;
pub use model::{FlowState, ModelParams, PressureLaw, StrichartzExponents};
pub use stepper::{FlowTrajectory, LinearPropagator, ModelKind};
pub use symbol::Symbol;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

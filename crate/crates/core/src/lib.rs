//! Attracting invariant circles and their isochrons for maps of the cylinder.
//!
//! The solver computes an embedding `W(θ, s)`, inner dynamics `a(θ)` and a
//! normal rate `λ(θ)` satisfying `f∘W(θ, s) = W(a(θ), λ(θ)s)` with a
//! quasi-Newton method, and reports condition numbers for the result.

pub mod aposteriori;
pub mod bootstrap;
pub mod cohomology;
pub mod error;
pub mod fourier;
pub mod io;
pub mod jet;
pub mod models;
pub mod newton;
pub mod taylor;

pub use aposteriori::{condition_report, verify_aposteriori, ConditionReport, Thresholds, Verdict};
pub use bootstrap::{initial_guess, BootstrapConfig};
pub use error::{Error, Result};
pub use fourier::{CircleMap, PeriodicFunction};
pub use io::SolutionFile;
pub use jet::TaylorJet;
pub use models::{MapModel, ModelRegistry, Params};
pub use newton::{solve, ConjugacyTriple, Schedule, SolveOutcome, SolverConfig, StepDiagnostics};
pub use taylor::{FourierTaylor, FtMatrix, FtPair};

//! Spontaneous emission rates, Lamb shifts and dispersion forces of a
//! Rydberg rubidium atom near a silica optical nanofiber.
//!
//! The electromagnetic environment of the fiber is described by the dyadic
//! Green's function of a dielectric cylinder, split into guided-mode
//! (pole residue) and radiative (branch-line integral) contributions.
//! Atomic structure comes from quantum-defect energies, Numerov radial
//! integrals and exact angular-momentum algebra.
//!
//! The crate is organized as a library; `examples/` holds one runnable
//! program per capability and `src/bin/fiberqed.rs` provides a batch CLI
//! for parameter scans with CSV output.

pub mod atom;
pub mod constants;
pub mod driver;
pub mod greens;
pub mod material;
pub mod observables;
pub mod quad;
pub mod specfun;
pub mod tensor;

pub use atom::{QuantizationAxis, RydbergState, Transition};
pub use greens::{FiberConfig, GreenTensorPart, GreensEngine, GuidedMode, ModeFamily};
pub use material::PermittivityModel;
pub use observables::{AnisotropyReport, ForceVector, RateBreakdown, ShiftBreakdown};
pub use tensor::Tensor3;

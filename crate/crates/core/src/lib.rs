//! Numerical machinery for the spin Dirac operator on finite-area hyperbolic
//! surfaces: length spectra of Fuchsian groups, sign class functions attached
//! to spin structures, trace-formula evaluation with certified tail bounds,
//! heat-trace asymptotics, and Selberg zeta functions with their meromorphic
//! continuation.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`] — special functions and adaptive quadrature,
//! - [`hyperbolic`] — `SL(2,R)` isometry algebra and half-plane geometry,
//! - [`surfaces`] — surface presentations and oriented length spectra,
//! - [`spin`] — spin structures as sign lifts and the class function ε,
//! - [`testfn`] — admissible test-function pairs (heat, resolvent, generic),
//! - [`traceformula`] — the geometric side of the trace formula and its
//!   applications (heat traces, Weyl limits, spectral extraction, pinching),
//! - [`zeta`] — Selberg zeta evaluation, logarithmic derivative, and
//!   continuation.

pub mod error;
pub mod hyperbolic;
pub mod numerics;
pub mod spin;
pub mod surfaces;
pub mod testfn;
pub mod traceformula;
pub mod zeta;

pub use error::{Error, Result};
pub use hyperbolic::{HalfPlanePoint, IsometryClass, UnimodularMatrix};
pub use numerics::QuadratureSpec;
pub use spin::SpinStructure;
pub use surfaces::{ConjugacyClassRecord, LengthSpectrum, PinchFamily, SurfacePresentation, Word};
pub use testfn::TestFunctionPair;
pub use traceformula::{GeometricSide, SpectrumEstimate};
pub use zeta::{SpectralInput, ZetaEvaluation};

//! Casimir pressure and energy between planar mirrors made of dissipative
//! (Drude) and magneto-dielectric (metamaterial) media.
//!
//! Natural units are used throughout: `c = ħ = k_B = 1`, frequencies in units
//! of a reference scale `Ω`, lengths in `c/Ω`, temperatures in `ħΩ/k_B`.
//! Pressures are positive for attraction.
//!
//! Three routes to the same physics are provided:
//! * [`lifshitz`]: imaginary-frequency (Matsubara) integration of the
//!   reflection round-trip kernel;
//! * [`modes`]: complex cavity eigenfrequencies found by the argument
//!   principle, summed with a logarithmic cutoff term;
//! * [`modes::plasmon_force_short_distance`]: the closed-form coupled-plasmon
//!   limit.

pub mod error;
pub mod fresnel;
pub mod lifshitz;
pub mod modes;
pub mod quadrature;
pub mod response;
pub mod units;

pub use error::{CasimirError, Result};
pub use fresnel::{Mirror, Polarization};
pub use lifshitz::{CavityConfig, EnergyResult, PressureResult, QuadratureSpec};
pub use response::{DrudeParams, MetamaterialMuParams, ResponseModel, TabulatedAbsorption};

//! Precision bounds for second-order (Kerr, generator `n̂²`) optical phase
//! estimation under photon loss and phase diffusion.
//!
//! The crate is organised by noise model:
//!
//! - [`states`]: truncated Fock-space probe states and photon-number moments.
//! - [`lossbounds`]: photon-loss bounds built from the variational Kraus
//!   family `E_k(φ) ∝ η^{n̂/2} â^k e^{−iφ(n̂² − 2λ₁kn̂ + λ₂k²)}`, its exact
//!   minimisation, closed-form minima and the comparison bounds.
//! - [`dephasing`]: linear and second-order phase-diffusion bounds, including
//!   environment squeezing.
//! - [`oracle`]: exact quantum Fisher information via the symmetric
//!   logarithmic derivative, used to validate every bound.
//! - [`report`]: curve generation, the summary table and CSV/JSON/gnuplot
//!   rendering behind the `kerr-bounds` binary.
//! - [`verify`]: the invariant suites run by `kerr-bounds verify`.
//!
//! ```
//! use kerr_bounds::{lossbounds, states};
//!
//! let moments = states::gaussian_saturating_moments(10.0).unwrap();
//! let f_min = lossbounds::fmin_analytic_general(&moments, 0.9).unwrap();
//! let f_sv = lossbounds::fmin_analytic_sv(10.0, 0.9).unwrap();
//! assert!((f_min - f_sv).abs() < 1e-9 * f_sv);
//! println!("Δφ ≥ {:.4e}", lossbounds::delta_phi_from_f(f_min, 1));
//! ```

pub mod dephasing;
pub mod error;
pub mod lossbounds;
pub mod oracle;
pub mod report;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use states::{MomentSet, ProbeState, StateFamily, TruncationPolicy};

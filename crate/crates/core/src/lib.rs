//! Exact and numeric machinery around the identity
//!
//! ```text
//! θ_△(τ)^{2m(2m+1)} = KW_m(τ),   θ_△ = Σ_{n ≥ 0} q^{(2n+1)²/16}
//! ```
//!
//! where `KW_m` is a signature-`(m, m)` theta series weighted by the spherical
//! polynomial `V_m`.
//!
//! - [`exactq`]: q-series with big-rational coefficients on the `(1/16)ℤ` lattice.
//! - [`mpoly`]: exact polynomials in `(x_j, y_j)`, the operators `Δ_m` and `ℰ`.
//! - [`special`]: `E(z) = erf(√π z)`, its derivatives, `β(z)`.
//! - [`kernel`]: the error-function kernel `p[f]` and the Vignéras operator.
//! - [`theta`]: numeric theta sums, the `t → 0` limit and modular checks.
//! - [`verify`]: the cone expansion of `KW_m` and the exact identity check.

pub mod exactq;
pub mod kernel;
pub mod mpoly;
pub mod special;
pub mod theta;
pub mod verify;

pub use exactq::{FracSeries, SeriesError, SCALE};
pub use kernel::{ConeVector, KernelSpec};
pub use mpoly::{vm_poly, MultiPoly, PointR2m};
pub use theta::{TauPoint, ThetaSpec};
pub use verify::{kw_series, verify_identity, IdentityReport};

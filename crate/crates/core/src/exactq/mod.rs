//! Exact q-series over big rationals.
//!
//! Every exponent lives on the lattice `(1/16)·ℤ`: that is fine enough for
//! `θ_△ = q^{1/16} △(q^{1/2})`, for the eta quotient (whose `1/24` and `1/48`
//! prefactors combine to `1/16`) and for the indefinite form on the
//! `ℤ × (1/2 + ℤ)` lattice, whose values lie in `(1/8)·ℤ`.

mod products;
mod series;

pub use products::{
    eta_quotient_theta, euler_product, series_pow, theta_triangle, triangle_product_form,
    triangle_series, triangular_representations,
};
pub use series::{parse_rational, rational_to_f64, FracSeries, SCALE};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("coefficient of q^({exponent}/16) requested but series is only known to q^({truncation}/16)")]
    BeyondTruncation { exponent: i64, truncation: i64 },
    #[error("series has no nonzero leading term to invert")]
    NotInvertible,
    #[error("unsupported exponent scale {0} (expected 16)")]
    Scale(i64),
    #[error("malformed series: {0}")]
    Malformed(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

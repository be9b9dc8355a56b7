//! Semi-infinite spherical Bessel integrals
//!
//! I(s) = ∫₀^∞ x^{n_x} k̂_ν(R₂γ(s,x)) / γ(s,x)^{n_γ} · j_λ(vx) dx
//!
//! evaluated by rewriting the Bessel integral as a sine integral and
//! applying the Ooura–Mori double-exponential rules, plus the full
//! three-centre nuclear attraction integral over B functions built on it.

pub mod assembly;
pub mod dequad;
pub mod error;
pub mod oracle;
pub mod sintegrand;
pub mod specfun;

pub use error::Error;

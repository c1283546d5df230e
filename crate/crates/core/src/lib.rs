//! Exact computation in weight-truncated free divided power algebras over `Z`
//! and `Z/m`: the algebras themselves, their enveloping algebras, Beck
//! modules, Kähler differentials, and brute-force linear-algebra oracles that
//! cross-check the closed forms.

pub mod coeff;
pub mod dpcore;
pub mod envelope;
pub mod laws;
pub mod beck;
pub mod linalg;
pub mod kahler;
pub mod oracle;

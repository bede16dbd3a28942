//! Computable window truncations of the upper unitriangular group over the
//! integers, with the Gaussian product measures attached to a positive weight
//! family `b = (b_kn)`.
//!
//! Four layers:
//!
//! * [`matrix`] — exact unitriangular matrix algebra (two independent
//!   inversion routes, elementary subgroups, symmetric embedding);
//! * [`series`] / [`classify`] — certified partial sums and tail bounds for
//!   the convergence series that govern quasi-invariance, inversion
//!   equivalence, irreducibility and the factor property;
//! * [`poly`] / [`weyl`] / [`identities`] — an exact Weyl-algebra engine over
//!   the coordinates `x_kn` that verifies the commutator lemmas behind the
//!   modular theory symbolically, with rational weights;
//! * [`measure`] — a binary64 realization of the measure, the regular
//!   representations, the modular data `J`, `Delta^{it}`, `W` and the crossed
//!   product phase operators, verified pointwise and by Monte Carlo.

pub mod classify;
pub mod error;
pub mod identities;
pub mod interval;
pub mod matrix;
pub mod measure;
pub mod poly;
pub mod series;
pub mod weights;
pub mod weyl;
pub mod window;

pub use error::{Error, Result};
pub use window::IndexWindow;

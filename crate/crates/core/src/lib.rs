//! Finite-scale computational additive combinatorics.
//!
//! - [`zq`]: sets, sumsets, pair counts, popular sumsets and subgroups in Z/Q.
//! - [`direct`]: Cauchy–Davenport, Vosper and cyclic Kneser checkers and sweeps.
//! - [`inverse`]: structure certificates, their verifiers, Bohr fitting and
//!   inverse-structure detection, popular-sumset covers.
//! - [`equidist`]: Bohr sets in the integers, exact discrepancy, Erdős–Turán
//!   type bounds, window densities and simultaneous approximation.
//! - [`uniformity`]: Gowers and Fourier uniformity norms, scale estimators and
//!   structured/pseudorandom decompositions.
//! - [`density`]: windows of the naturals, density profiles, Schnirelmann tools.
//! - [`constructions`]: the extremal example sets.

mod bits;
pub mod constructions;
pub mod density;
pub mod direct;
pub mod equidist;
pub mod inverse;
pub mod ntt;
pub mod uniformity;
pub mod zq;

pub use zq::{PairCountVector, Subgroup, ZqSet};

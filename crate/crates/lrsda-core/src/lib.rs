//! Construction and verification of sparse linear arrays whose second-order
//! statistics yield an extended sum/difference co-array, plus a seeded
//! simulation pipeline for subspace DOA estimation on that co-array.
//!
//! The crate is organized around an exact integer oracle: every closed-form
//! claim about degrees of freedom, hole-freeness, or redundancy is checked by
//! brute-force enumeration of the co-array lags, never assumed.
//!
//! - [`mod@array`]: physical sensor geometries.
//! - [`geometry`]: the LR-SDA construction, sensor-allocation optimization,
//!   and claimed DOF formulas for it and for comparator arrays.
//! - [`coarray`]: exact lag-multiset algebra: sum/difference co-arrays, the
//!   four cumulant-case co-arrays, weight functions, holes, redundancy.
//! - [`reconstruction`]: exact rational/big-integer ambiguity conditions.
//! - [`signal`]: non-circular source simulation and sample cumulants.
//! - [`doa`]: lag averaging, spatial smoothing, MUSIC, peak picking, RMSE.
//! - [`experiment`]: reproducible experiment runners and discrepancy reports.

pub mod array;
pub mod coarray;
pub mod doa;
pub mod experiment;
pub mod geometry;
pub mod reconstruction;
pub mod signal;

pub use array::SensorArray;
pub use coarray::{CoArraySummary, LagMultiset};
pub use geometry::LrSdaParams;
pub use signal::Scenario;

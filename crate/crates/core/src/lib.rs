//! Exact-arithmetic bookkeeping for unit-group volumes, formal degrees,
//! Plancherel density ratios, S-arithmetic covolumes, and von Neumann
//! dimensions, with brute-force finite-group oracles for cross-checking.

mod numutil;
pub mod adelic;
pub mod jsonutil;
pub mod localgeom;
pub mod oracle;
pub mod plancherel;
pub mod symexpr;
pub mod vndensity;

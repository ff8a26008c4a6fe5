//! Classical simulations of the quantum attacks, plus the brute-force
//! solvers used as oracles throughout the test suites.

pub mod brute;
pub mod collision;
pub mod drivers;
pub mod kuperberg;
pub mod simon;

//! Command-line frontend for the order-thresholding library: calibration
//! dumps, single tests on data, HANOVA tests, Monte Carlo studies, and
//! regeneration of the bundled reference tables.

pub mod config;
pub mod io;
pub mod mc;
pub mod tables;

pub mod coeff;
pub mod error;
pub mod par;
pub mod series;
pub mod galois;
pub mod forms;
pub mod complex;
pub mod kummer;
pub mod symbol;
pub mod oracles;
pub mod config;
pub mod suites;
pub mod cli;

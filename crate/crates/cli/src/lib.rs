//! Command-line front end for the two-path RIS propagation simulator.
//!
//! The binary (`ris-sim`) exposes three subcommands:
//! - `simulate`: run a distance sweep from a preset or a TOML config
//!   document and emit CSV and SVG outputs
//! - `validate`: parse and fully validate a config document
//! - `oracle`: enumerate every binary configuration on a small random
//!   scenario and score the search strategies against the optimum
//!
//! Modules: [`config`] owns the document schema and the flag-merge logic,
//! [`csv`] and [`svg`] render a finished sweep to bytes (deterministically,
//! byte for byte), and [`runner`] wires it all to the process boundary.

pub mod config;
pub mod csv;
pub mod runner;
pub mod svg;

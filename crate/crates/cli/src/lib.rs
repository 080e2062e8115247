//! Experiment drivers, parameter sweeps and report tables behind the
//! `shapaudit` binary.

pub mod experiments;
pub mod grid;
pub mod report;

pub use experiments::{
    run_markov1, run_markov2, run_secret, run_taxicab, sweep_markov2, sweep_secret, Markov1Row,
    Markov2Row, SecretRow, TaxicabRow,
};
pub use grid::{GridAxis, SweepConfig};
pub use report::{Cell, Table};

//! Exact-arithmetic computations with quiver representations,
//! n-representations, and n-quivers: categorical constructions (limits,
//! colimits, kernels, cokernels), Fitting splits, coalgebra axiom checking,
//! a small text format, and a command-line front end.

pub mod cli;
pub mod coalg;
pub mod dsl;
pub mod exactlin;
pub mod limits;
pub mod nquiver;
pub mod nrep;
pub mod quiver;
pub mod rep;

/// Runs the command-line interface and returns the process exit code.
pub fn run() -> i32 {
    cli::run()
}

//! Two-channel open quantum graphs as qubits.
//!
//! A graph with two leads scatters a particle entering lead 0 into
//! `r|0> + t|1>`. Composing two graphs with a controlled scattering operator,
//! where Alice's output channel decides which configuration of Bob's graph
//! acts, produces an entangled two-qubit state whose entanglement entropy is
//! analysed in [`entanglement`].
//!
//! * [`graph`]: metric graphs, validation, the star graph and its file format
//! * [`scattering`]: bond-scattering solver and the star-graph closed forms
//! * [`qubit`]: joint states, density matrices and partial traces
//! * [`entanglement`]: eigenvalues, entropy, extremal conditions, gates
//! * [`surface`]: entropy over parameter grids

pub mod entanglement;
pub mod error;
pub mod graph;
pub mod qubit;
pub mod scattering;
pub mod surface;

pub use error::{Error, Result};
pub use num_complex::Complex64;

//! Expected utility of a heralded two-qubit entanglement protocol.
//!
//! A measurement on an ancilla heralds either a singlet (success, with
//! probability `sin²θ/2`) or a partially entangled state (failure). A
//! fraction `w` of the failures can be merged into the successes after a
//! local unitary on one system. This crate finds the unitary that keeps
//! the merged ensemble as entangled as possible and then the fraction `w`
//! that maximizes the expected utility
//!
//! ```text
//! N(w) = P(w) u(E_w) + (1 − w) P_fail u(E_fail) − w P_fail C
//! ```
//!
//! Modules, bottom up:
//!
//! * [`qmat`]: fixed-size complex matrices, eigensolvers, density matrices.
//! * [`protocol`]: coupling, conditional states, the unitary family and `ρ_w`.
//! * [`entanglement`]: concurrence and entanglement of formation.
//! * [`optimizer`]: the concurrence-maximizing unitary for fixed `(θ, w)`.
//! * [`utility`]: utility families and `N(w)`.
//! * [`strategy`]: `(θ, w)` tables and the optimal `w` per utility.
//! * [`cli`]: state files, run configuration and CSV output.

pub mod cli;
pub mod entanglement;
pub mod error;
pub mod optimizer;
pub mod protocol;
pub mod qmat;
pub mod strategy;
pub mod utility;

pub use entanglement::{
    binary_entropy, concurrence, concurrence_pure, concurrence_spectral, eof, Concurrence,
    Entanglement,
};
pub use error::{Error, Result};
pub use optimizer::{grid_oracle, optimize_unitary, OptResult, OptimizerConfig};
pub use protocol::{
    conditional_states, mix_state, realize_unitary, ConditionalStates, Coupling, FeedForward,
    MixWeighting, Mixture, Side, UnitaryParams,
};
pub use qmat::{validate_density, CMat2, CMat4, CVec4, DensityMatrix2Q};
pub use strategy::{build_ew_table, find_wopt, sweep, EwTable, StrategyRecord, Workers};
pub use utility::{evaluate_utility, net_utility, NetUtilityInputs, UtilityFamily, UtilitySpec};

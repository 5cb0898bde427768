//! Variational eigensolver simulation for two-module ("dual-core") quantum
//! architectures with a limited number of inter-module gates.
//!
//! The crate provides a dense statevector simulator, spin-chain
//! Hamiltonians with exact diagonalization, Schmidt decompositions across the
//! module cut, the dual-core / separable / all-to-all ansatz families with
//! adjoint gradients, a staged multi-restart Adam trainer, and an experiment
//! harness that writes CSV or JSON result tables.

pub mod ansatz;
pub mod circuit;
mod eigen;
pub mod error;
pub mod experiments;
pub mod factored;
pub mod hamiltonian;
pub mod kernels;
pub mod schmidt;
pub mod statevector;
pub mod trainer;

pub use ansatz::{AnsatzSpec, Architecture, EntanglerPattern, LayerTemplate, ParamSlot, ParameterLayout, ParameterVector};
pub use error::{Error, Result};
pub use hamiltonian::{spin1_direct_ed, GroundStateSolution, Hamiltonian, Pauli, PauliString};
pub use num_complex::Complex64;
pub use schmidt::{schmidt_rank, SchmidtDecomposition};
pub use statevector::{Axis, SingleQubitGate, StateVector};
pub use trainer::{
    epsilon, epsilon_signed, stage_targets, train_full, train_stage, AdamConfig, StageResult, TrainingConfig,
    TrainingResult,
};

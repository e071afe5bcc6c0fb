//! Simulation core for a small-scale quantum linear-systems workbench.
//!
//! The crate solves 2×2 (and small N×N) Hermitian systems `A|x⟩ = |b⟩` the
//! way a few-qubit quantum computer would: phase estimation on an eigenvalue
//! register, a controlled `R_y` eigenvalue inversion on an ancilla, and
//! post-selection on the ancilla reading `1`. Around that it models a
//! polarisation-encoded photonic implementation (heralded and destructive
//! CNOT gates fed by a two-pass down-conversion source) and the single-qubit
//! tomography used to evaluate the output.
//!
//! Layers, bottom-up:
//!
//! - [`qmat`]: dense complex matrices, Hermitian eigensolver, fidelities.
//! - [`statevec`]: state-vector circuits, post-selection, partial trace.
//! - [`hhl`]: instance validation, circuit builders, classical oracle.
//! - [`photonic`]: Fock-space linear optics and the experiment pipeline.
//! - [`tomo`]: count sampling, linear-inversion tomography, Monte-Carlo errors.
//!
//! Qubit 0 is always the most significant bit of a basis label.
//!
//! The crate is `no_std` and needs only `alloc`; file formats, the CLI and
//! anything touching the filesystem live in the `qlsw` companion crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
pub mod hhl;
pub mod photonic;
pub mod qmat;
pub mod statevec;
pub mod tomo;

pub use error::{Error, Result};
pub use num_complex::Complex64;

//! Polarization-encoded linear optics in the occupation-number basis, and
//! the photonic run of the two-qubit circuit built from it.

pub mod experiment;
pub mod fock;
pub mod gates;
pub mod optics;
pub mod source;

pub use experiment::{
    calibrate_pair_amplitude, class_breakdown, double_backward_interference_check,
    reference_pair_amplitude, run_experiment, simulate, EmissionClass, ExperimentResult,
    ExperimentState, NoiseParams, DEFAULT_DOUBLE_EMISSION_SHARE, DEFAULT_PAIR_AMPLITUDE,
};
pub use fock::{register, Creation, FockState, ModeLabel, Polarization, DEFAULT_TRUNCATION};
pub use gates::{destructive_cnot, heralded_cnot, GateOutcome};
pub use optics::{apply_element, OpticalElement, PbsBasis};
pub use source::{spdc_source, Emission};

//! The heralded and the destructive CNOT.
//!
//! Heralded gate: the control meets one photon of an entangled ancilla pair
//! on an H/V polarizing beam splitter, the target meets the other on a ±
//! polarizing beam splitter. Detecting `|−⟩` behind the first and `|V⟩`
//! behind the second, one photon each, leaves CNOT applied to the control
//! and target outputs.
//!
//! Destructive gate: a half-wave plate at 22.5° on the target, a
//! polarization-dependent splitter (T_H = 1, T_V = 1/3) between the paths,
//! one balancing splitter (T_H = 1/3, T_V = 1) per output path, and a second
//! 22.5° plate. One photon per output path signals success, with
//! probability 1/9 for every input.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use num_complex::Complex64;

use super::fock::{register, Creation, FockState, ModeLabel, Polarization};
use super::optics::{apply_all, Jones, OpticalElement, PbsBasis, ANTIDIAGONAL, V};
use super::source::{backward_pair, ports, PairCorrelation};
use super::NoiseParams;
use crate::qmat::{self, ComplexMatrix};
use crate::{Error, Result};

/// Detector settings that herald the gate: `|−⟩` on the control-side
/// ancilla, `|V⟩` on the target-side ancilla.
pub const HERALD: [(u8, Jones); 2] = [(ports::ANCILLA_C, ANTIDIAGONAL), (ports::ANCILLA_T, V)];

pub fn heralded_cnot_elements() -> Vec<OpticalElement> {
    vec![
        OpticalElement::pbs(ports::CONTROL, ports::ANCILLA_C, PbsBasis::Rectilinear),
        OpticalElement::pbs(ports::TARGET, ports::ANCILLA_T, PbsBasis::Diagonal),
    ]
}

pub fn destructive_cnot_elements() -> Vec<OpticalElement> {
    let third = (1.0f64 / 3.0).sqrt();
    vec![
        OpticalElement::hwp(ports::TARGET, PI / 8.0),
        OpticalElement::beam_splitter(ports::CONTROL, ports::TARGET, 1.0, third),
        OpticalElement::beam_splitter(ports::CONTROL, ports::LOSS_C, third, 1.0),
        OpticalElement::beam_splitter(ports::TARGET, ports::LOSS_T, third, 1.0),
        OpticalElement::hwp(ports::TARGET, PI / 8.0),
    ]
}

/// Post-selected two-qubit output of a gate.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOutcome {
    /// Normalised 4×4 density matrix, control qubit first.
    pub rho: ComplexMatrix,
    /// Probability of the heralding (or coincidence) event.
    pub probability: f64,
}

impl GateOutcome {
    pub fn fidelity(&self, psi: &[Complex64]) -> Result<f64> {
        qmat::state_fidelity(&self.rho, psi)
    }
}

/// Creation operator for one photon in `spatial` with polarization `jones`.
pub fn photon(spatial: u8, jones: Jones, tag: u8) -> Creation {
    Creation::new()
        .term(jones[0], &[ModeLabel::new(spatial, Polarization::H, tag)])
        .term(jones[1], &[ModeLabel::new(spatial, Polarization::V, tag)])
}

fn normalized_jones(j: Jones) -> Result<Jones> {
    let v = qmat::normalize(&j)?;
    Ok([v[0], v[1]])
}

/// Applies the herald projections; returns the unnormalised branches.
pub fn herald(state: &FockState) -> Result<Vec<FockState>> {
    let mut branches = vec![state.clone()];
    for (spatial, jones) in HERALD {
        let mut next = Vec::new();
        for b in &branches {
            next.extend(b.detect(spatial, jones)?);
        }
        branches = next;
    }
    Ok(branches)
}

/// Keeps exactly one photon in each of `spatial` and none in `empty`.
pub fn coincidence(state: &FockState, spatial: &[u8], empty: &[u8]) -> FockState {
    let probe = state.clone();
    state.filter(|k| {
        spatial.iter().all(|&s| probe.spatial_count(k, s) == 1)
            && empty.iter().all(|&s| probe.spatial_count(k, s) == 0)
    })
}

fn outcome(rho: ComplexMatrix) -> Result<GateOutcome> {
    let probability = rho.trace().re;
    if probability <= 1e-15 {
        return Err(Error::Invariant(
            "gate never succeeds; check the optical conventions".into(),
        ));
    }
    Ok(GateOutcome {
        rho: rho.scale(Complex64::new(1.0 / probability, 0.0)),
        probability,
    })
}

/// Backward-pair trajectories for the given noise: (weight, correlation, tag).
pub(crate) fn backward_trajectories(noise: &NoiseParams) -> Vec<(f64, PairCorrelation, u8)> {
    let vb = noise.bell_visibility;
    let vi = noise.interference_visibility;
    let mut out = Vec::new();
    for (pc, corr) in [
        (vb, PairCorrelation::Entangled),
        ((1.0 - vb) / 2.0, PairCorrelation::BothH),
        ((1.0 - vb) / 2.0, PairCorrelation::BothV),
    ] {
        for (pt, tag) in [(vi, 0u8), (1.0 - vi, 1u8)] {
            if pc * pt > 0.0 {
                out.push((pc * pt, corr, tag));
            }
        }
    }
    out
}

/// Heralded CNOT on single-photon polarization qubits. Imperfect Bell
/// visibility dephases the ancilla pair; imperfect interference visibility
/// makes the ancilla photons distinguishable from the inputs.
pub fn heralded_cnot(
    control_in: Jones,
    target_in: Jones,
    noise: &NoiseParams,
) -> Result<GateOutcome> {
    noise.validate()?;
    let c = normalized_jones(control_in)?;
    let t = normalized_jones(target_in)?;
    let vacuum = FockState::vacuum(
        register(
            &[
                ports::CONTROL,
                ports::TARGET,
                ports::ANCILLA_C,
                ports::ANCILLA_T,
            ],
            2,
        ),
        noise.truncation,
    )?;
    let inputs = photon(ports::CONTROL, c, 0).times(&photon(ports::TARGET, t, 0));
    let elements = heralded_cnot_elements();
    let mut rho = ComplexMatrix::zeros(4, 4);
    for (weight, corr, tag) in backward_trajectories(noise) {
        let state = vacuum.create(&inputs.times(&backward_pair(corr, tag)))?;
        let out = apply_all(&state, &elements)?;
        for branch in herald(&out)? {
            let kept = coincidence(&branch, &[ports::CONTROL, ports::TARGET], &[]);
            let part = kept.polarization_density(&[ports::CONTROL, ports::TARGET])?;
            rho = rho.try_add(&part.scale(Complex64::new(weight, 0.0)))?;
        }
    }
    outcome(rho)
}

/// Destructive CNOT: coincidence of one photon in each output path.
pub fn destructive_cnot(control_in: Jones, target_in: Jones) -> Result<GateOutcome> {
    let c = normalized_jones(control_in)?;
    let t = normalized_jones(target_in)?;
    let vacuum = FockState::vacuum(
        register(
            &[ports::CONTROL, ports::TARGET, ports::LOSS_C, ports::LOSS_T],
            1,
        ),
        2,
    )?;
    let state = vacuum.create(&photon(ports::CONTROL, c, 0).times(&photon(ports::TARGET, t, 0)))?;
    let out = apply_all(&state, &destructive_cnot_elements())?;
    let kept = coincidence(
        &out,
        &[ports::CONTROL, ports::TARGET],
        &[ports::LOSS_C, ports::LOSS_T],
    );
    outcome(kept.polarization_density(&[ports::CONTROL, ports::TARGET])?)
}

//! End-to-end photonic run of the two-qubit circuit: source, heralded CNOT,
//! `R_y(−θ/2)`, destructive CNOT, `R_y(θ/2)` and `R†`, post-selection on the
//! fourfold coincidence and on the target photon reading `V`.
//!
//! Only the four-photon sector matters for fourfold coincidences. It holds
//! three kinds of emission: one forward and one backward pair (the signal),
//! two forward pairs and two backward pairs. The moving mirror between the
//! passes randomises their relative phase, so the three kinds add
//! incoherently. They are weighted `1 : ε² : ε²`, making `pair_amplitude`
//! the amplitude of a double emission relative to the signal emission.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use num_complex::Complex64;

use super::fock::{register, Creation, FockState};
use super::gates::{coincidence, destructive_cnot_elements, herald, heralded_cnot_elements};
use super::optics::{apply_all, polarization_unitary, ry_plates, OpticalElement, V};
use super::source::{backward_pair, forward_pair, ports, PairCorrelation};
use crate::hhl::{rotation_angle, HHLConfig, LinearSystemInstance};
use crate::qmat::{self, c64, ComplexMatrix};
use crate::tomo::{self, CountRecord};
use crate::{Error, Result};

/// Double-emission share of the counts targeted by [`calibrate_pair_amplitude`].
pub const DEFAULT_DOUBLE_EMISSION_SHARE: f64 = 0.1;
/// Pair amplitude at which double emissions are 10% of the successful
/// events of the reference instance under the default visibilities.
pub const DEFAULT_PAIR_AMPLITUDE: f64 = 0.4823;
/// Photons in the simulated sector.
const PHOTONS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    /// Weight of `|Φ⁺⟩` in the dephased ancilla pair.
    pub bell_visibility: f64,
    /// Probability that photons from different emissions are indistinguishable.
    pub interference_visibility: f64,
    /// Double-pair amplitude relative to the signal emission.
    pub pair_amplitude: f64,
    /// Fock-space photon-number limit.
    pub truncation: usize,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            bell_visibility: 0.9,
            interference_visibility: 0.875,
            pair_amplitude: DEFAULT_PAIR_AMPLITUDE,
            truncation: super::DEFAULT_TRUNCATION,
        }
    }
}

impl NoiseParams {
    pub fn ideal() -> Self {
        Self {
            bell_visibility: 1.0,
            interference_visibility: 1.0,
            pair_amplitude: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("bell_visibility", self.bell_visibility),
            ("interference_visibility", self.interference_visibility),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} outside [0, 1]"
                )));
            }
        }
        if !(self.pair_amplitude >= 0.0 && self.pair_amplitude.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "pair_amplitude = {} must be finite and >= 0",
                self.pair_amplitude
            )));
        }
        if self.truncation < 2 {
            return Err(Error::Configuration(
                "truncation must allow at least one pair".into(),
            ));
        }
        Ok(())
    }
}

/// Which pairs produced the four photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmissionClass {
    ForwardBackward,
    DoubleForward,
    DoubleBackward,
}

impl EmissionClass {
    pub const ALL: [EmissionClass; 3] = [
        EmissionClass::ForwardBackward,
        EmissionClass::DoubleForward,
        EmissionClass::DoubleBackward,
    ];
}

/// Four-photon emissions of one class as (weight, normalised creation operator).
fn trajectories(class: EmissionClass, noise: &NoiseParams) -> Vec<(f64, Creation)> {
    let vb = noise.bell_visibility;
    let vi = noise.interference_visibility;
    let correlations = [
        (vb, PairCorrelation::Entangled),
        ((1.0 - vb) / 2.0, PairCorrelation::BothH),
        ((1.0 - vb) / 2.0, PairCorrelation::BothV),
    ];
    let tags = [(vi, 0u8), (1.0 - vi, 1u8)];
    let mut out = Vec::new();
    match class {
        EmissionClass::ForwardBackward => {
            for (pc, corr) in correlations {
                for (pt, tag) in tags {
                    out.push((pc * pt, forward_pair(0).times(&backward_pair(corr, tag))));
                }
            }
        }
        EmissionClass::DoubleForward => {
            for (pt, tag) in tags {
                out.push((pt, forward_pair(0).times(&forward_pair(tag))));
            }
        }
        EmissionClass::DoubleBackward => {
            // Both pairs of one pass share the pass's phase, hence one correlation.
            for (pc, corr) in correlations {
                for (pt, tag) in tags {
                    out.push((
                        pc * pt,
                        backward_pair(corr, 0).times(&backward_pair(corr, tag)),
                    ));
                }
            }
        }
    }
    out.retain(|(w, _)| *w > 0.0);
    out
}

/// Unitary taking `|0⟩` to `psi`.
fn preparation(psi: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |r, c| match (r, c) {
        (0, 0) => psi[0],
        (1, 0) => psi[1],
        (0, 1) => -psi[1].conj(),
        _ => psi[0].conj(),
    })
}

/// The optical elements of the whole run, from state preparation to the
/// final wave plates, for an instance and configuration.
pub fn pipeline_elements(
    inst: &LinearSystemInstance,
    cfg: &HHLConfig,
) -> Result<Vec<OpticalElement>> {
    if inst.dim() != 2 || cfg.eigenvalue_qubits != 1 {
        return Err(Error::InvalidParameter(
            "the photonic run needs a 2x2 instance and m = 1".into(),
        ));
    }
    let values = inst.eigenvalues();
    let theta_low = rotation_angle(cfg.c, values[0])?;
    let delta = rotation_angle(cfg.c, values[1])? - theta_low;
    let rb = cfg.r.mul_vec(inst.b())?;

    let mut elements = polarization_unitary(ports::CONTROL, &preparation(&rb))?;
    // Target: H → V, then the rotation of the λ₁ branch (identity when C = λ₁).
    elements.push(OpticalElement::hwp(ports::TARGET, PI / 4.0));
    if theta_low.abs() >= 1e-15 {
        elements.extend(ry_plates(ports::TARGET, theta_low));
    }
    elements.extend(heralded_cnot_elements());
    elements.extend(ry_plates(ports::TARGET, -delta / 2.0));
    elements.extend(destructive_cnot_elements());
    elements.extend(ry_plates(ports::TARGET, delta / 2.0));
    elements.extend(polarization_unitary(ports::CONTROL, &cfg.r.adjoint())?);
    Ok(elements)
}

/// Fourfold-coincidence and success statistics of one emission class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassResult {
    /// Probability of a fourfold coincidence (herald plus one photon in each output).
    pub fourfold: f64,
    /// Fourfold coincidence with the target photon found in `V`.
    pub success: f64,
    /// Unnormalised control-photon density matrix of the successful events.
    pub rho: ComplexMatrix,
}

fn run_class(
    class: EmissionClass,
    elements: &[OpticalElement],
    noise: &NoiseParams,
) -> Result<ClassResult> {
    if noise.truncation < PHOTONS {
        return Err(Error::Configuration(format!(
            "truncation {} cannot hold the {PHOTONS}-photon coincidence sector",
            noise.truncation
        )));
    }
    let vacuum = FockState::vacuum(register(&ports::ALL, 2), noise.truncation)?;
    let mut fourfold = 0.0;
    let mut rho = ComplexMatrix::zeros(2, 2);
    for (weight, emission) in trajectories(class, noise) {
        let state = vacuum.create(&emission)?.normalized()?;
        let out = apply_all(&state, elements)?;
        for branch in herald(&out)? {
            let kept = coincidence(
                &branch,
                &[ports::CONTROL, ports::TARGET],
                &[ports::LOSS_C, ports::LOSS_T],
            );
            fourfold += weight * kept.norm_sqr();
            for analysed in kept.detect(ports::TARGET, V)? {
                let part = analysed.polarization_density(&[ports::CONTROL])?;
                rho = rho.try_add(&part.scale(c64(weight, 0.0)))?;
            }
        }
    }
    let success = rho.trace().re;
    Ok(ClassResult {
        fourfold,
        success,
        rho,
    })
}

/// Per-class results at unit weight.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassBreakdown {
    pub forward_backward: ClassResult,
    pub double_forward: ClassResult,
    pub double_backward: ClassResult,
}

pub fn class_breakdown(
    inst: &LinearSystemInstance,
    cfg: &HHLConfig,
    noise: &NoiseParams,
) -> Result<ClassBreakdown> {
    noise.validate()?;
    let elements = pipeline_elements(inst, cfg)?;
    Ok(ClassBreakdown {
        forward_backward: run_class(EmissionClass::ForwardBackward, &elements, noise)?,
        double_forward: run_class(EmissionClass::DoubleForward, &elements, noise)?,
        double_backward: run_class(EmissionClass::DoubleBackward, &elements, noise)?,
    })
}

/// Exact (sampling-free) outcome of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentState {
    /// Normalised control-photon state after all post-selection.
    pub rho: ComplexMatrix,
    /// Success rate relative to one signal emission.
    pub success_rate: f64,
    /// Fraction of the successful events caused by double emissions.
    pub double_emission_share: f64,
    pub breakdown: ClassBreakdown,
}

pub fn simulate(
    inst: &LinearSystemInstance,
    cfg: &HHLConfig,
    noise: &NoiseParams,
) -> Result<ExperimentState> {
    let breakdown = class_breakdown(inst, cfg, noise)?;
    let eps2 = noise.pair_amplitude * noise.pair_amplitude;
    let rho = breakdown
        .forward_backward
        .rho
        .try_add(&breakdown.double_forward.rho.scale(c64(eps2, 0.0)))?
        .try_add(&breakdown.double_backward.rho.scale(c64(eps2, 0.0)))?;
    let success_rate = rho.trace().re;
    if success_rate <= 1e-15 {
        return Err(Error::Invariant(
            "no successful events; check the optical conventions".into(),
        ));
    }
    let double = eps2 * (breakdown.double_forward.success + breakdown.double_backward.success);
    Ok(ExperimentState {
        rho: rho.scale(c64(1.0 / success_rate, 0.0)),
        success_rate,
        double_emission_share: double / success_rate,
        breakdown,
    })
}

/// Simulated run plus Poissonian tomography counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub state: ExperimentState,
    pub counts: Vec<CountRecord>,
}

/// Runs the pipeline and samples `shots` (mean) counts per analysis basis.
pub fn run_experiment(
    inst: &LinearSystemInstance,
    cfg: &HHLConfig,
    noise: &NoiseParams,
    shots: u64,
    seed: u64,
) -> Result<ExperimentResult> {
    let state = simulate(inst, cfg, noise)?;
    let counts = tomo::sample_counts(&state.rho, shots, seed)?;
    Ok(ExperimentResult { state, counts })
}

/// Pair amplitude at which double emissions make up `share` of the
/// successful events of `inst`.
pub fn calibrate_pair_amplitude(
    inst: &LinearSystemInstance,
    cfg: &HHLConfig,
    noise: &NoiseParams,
    share: f64,
) -> Result<f64> {
    if !(0.0..1.0).contains(&share) {
        return Err(Error::InvalidParameter(format!(
            "share {share} outside [0, 1)"
        )));
    }
    let b = class_breakdown(inst, cfg, noise)?;
    let double = b.double_forward.success + b.double_backward.success;
    if double <= 0.0 {
        return if share == 0.0 {
            Ok(0.0)
        } else {
            Err(Error::Configuration(
                "double emissions never succeed at these settings".into(),
            ))
        };
    }
    // share = ε²D / (S + ε²D)
    Ok((share * b.forward_backward.success / ((1.0 - share) * double)).sqrt())
}

/// The calibration reference: `A = diag(1/2, 3/4)`, `b = |1⟩`, `R = I`.
pub fn reference_instance() -> Result<(LinearSystemInstance, HHLConfig)> {
    let b = [c64(0.0, 0.0), c64(1.0, 0.0)];
    let inst = crate::hhl::validate_instance(&ComplexMatrix::real_diagonal(&[0.5, 0.75]), &b)?;
    let cfg = HHLConfig::for_instance(&inst)?;
    Ok((inst, cfg))
}

/// [`calibrate_pair_amplitude`] on the reference instance.
pub fn reference_pair_amplitude(noise: &NoiseParams, share: f64) -> Result<f64> {
    let (inst, cfg) = reference_instance()?;
    calibrate_pair_amplitude(&inst, &cfg, noise, share)
}

/// Probability that a double backward emission alone produces the herald
/// and one photon in each gate output (a fourfold coincidence). Vanishes
/// when the two pairs are indistinguishable.
pub fn double_backward_interference_check(noise: &NoiseParams) -> Result<f64> {
    noise.validate()?;
    let vacuum = FockState::vacuum(register(&ports::ALL, 2), noise.truncation.max(PHOTONS))?;
    let elements = heralded_cnot_elements();
    let mut total = 0.0;
    for (weight, emission) in trajectories(EmissionClass::DoubleBackward, noise) {
        let state = vacuum.create(&emission)?.normalized()?;
        let out = apply_all(&state, &elements)?;
        for branch in herald(&out)? {
            total +=
                weight * coincidence(&branch, &[ports::CONTROL, ports::TARGET], &[]).norm_sqr();
        }
    }
    Ok(total)
}

/// Fidelity of the exact output state to the classical solution.
pub fn exact_fidelity(state: &ExperimentState, target: &[Complex64]) -> Result<f64> {
    qmat::state_fidelity(&state.rho, target)
}

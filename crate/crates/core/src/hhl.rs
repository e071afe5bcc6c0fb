//! The linear-systems algorithm on a state-vector simulator.
//!
//! Register layout of the general circuit, most significant first: the state
//! register (`log2 N` qubits), the eigenvalue register (`m` qubits), then the
//! ancilla. The ancilla enters in `|1⟩`; reading it as `1` at the end leaves
//! the state register in `A⁻¹|b⟩` (normalised).
//!
//! With one eigenvalue qubit the phase estimation reads a single binary digit
//! `n` of each eigenvalue, so a 2×2 instance is solvable exactly only when its
//! eigenvalues terminate at digit `n` and differ there and nowhere else
//! (`0.a0` and `0.a1`). Anything else is rejected rather than approximated.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use num_complex::Complex64;

use crate::qmat::{self, c64, ComplexMatrix, EigenDecomposition, HERMITIAN_TOL, ONE, ZERO};
use crate::statevec::{Circuit, GateOp, StateVector, MAX_QUBITS};
use crate::{Error, Result};

/// Longest binary expansion considered when testing whether an eigenvalue is dyadic.
pub const MAX_DIGITS: u32 = 24;
const DYADIC_TOL: f64 = 1e-9;
const DEGENERACY_TOL: f64 = 1e-10;
const DIAGONALISER_TOL: f64 = 1e-8;

/// A validated problem `A|x⟩ = |b⟩` with `A` Hermitian and spectrum in `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystemInstance {
    a: ComplexMatrix,
    b: Vec<Complex64>,
    b_scale: f64,
    eig: EigenDecomposition,
    condition_number: f64,
}

impl LinearSystemInstance {
    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    /// The normalised right-hand side.
    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    /// Norm of `b` as supplied, before normalisation.
    pub fn b_scale(&self) -> f64 {
        self.b_scale
    }

    pub fn eig(&self) -> &EigenDecomposition {
        &self.eig
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.values
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `λ_max / λ_min`.
    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    /// Coefficients `β_j = ⟨u_j|b⟩`.
    pub fn eigen_coefficients(&self) -> Vec<Complex64> {
        (0..self.dim())
            .map(|j| qmat::inner(&self.eig.vector(j), &self.b))
            .collect()
    }

    /// `R = V†`, with `V` the eigenvector matrix; `R A R†` is diagonal ascending.
    pub fn diagonaliser(&self) -> ComplexMatrix {
        self.eig.vectors.adjoint()
    }
}

/// Normalises `b`, checks Hermiticity and the `(0, 1)` spectrum condition.
pub fn validate_instance(a: &ComplexMatrix, b: &[Complex64]) -> Result<LinearSystemInstance> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("A is {}x{}", a.rows(), a.cols())));
    }
    if b.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "b has length {} but A is {}x{}",
            b.len(),
            a.rows(),
            a.cols()
        )));
    }
    let b_scale = qmat::norm(b);
    if !b_scale.is_finite() {
        return Err(Error::NonFinite);
    }
    if b_scale < 1e-300 {
        return Err(Error::DegenerateInput("b is the zero vector".into()));
    }
    let b: Vec<Complex64> = b.iter().map(|z| z / b_scale).collect();
    let eig = qmat::eig_hermitian(a)?;

    let min = eig.values[0];
    let max = eig.values[eig.values.len() - 1];
    if let Some(&value) = eig.values.iter().find(|&&l| l <= 0.0 || l >= 1.0) {
        let divide_by = (min > 0.0).then_some(max);
        return Err(Error::EigenvalueRange { value, divide_by });
    }
    Ok(LinearSystemInstance {
        a: a.clone(),
        b,
        b_scale,
        eig,
        condition_number: max / min,
    })
}

/// `A = R† diag(λ) R`.
pub fn matrix_from_spectrum(eigenvalues: &[f64], r: &ComplexMatrix) -> Result<ComplexMatrix> {
    if r.rows() != eigenvalues.len() || !r.is_unitary(1e-10) {
        return Err(Error::InvalidParameter(
            "R must be a unitary matching the spectrum".into(),
        ));
    }
    let a = &(&r.adjoint() * &ComplexMatrix::real_diagonal(eigenvalues)) * r;
    // Symmetrise away rounding.
    Ok(ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        (a[(i, j)] + a[(j, i)].conj()) * 0.5
    }))
}

fn dyadic_digits(value: f64) -> Option<u32> {
    (0..=MAX_DIGITS).find(|&k| {
        let scaled = value * (1u64 << k) as f64;
        (scaled - scaled.round()).abs() <= DYADIC_TOL
    })
}

fn digits_as_integer(value: f64, digits: u32) -> u64 {
    (value * (1u64 << digits) as f64).round() as u64
}

/// Digit position `n` at which a single eigenvalue qubit tells the two
/// eigenvalues apart, or `None` when they are not of the form `0.a0`, `0.a1`.
pub fn representable_digits(eig: &EigenDecomposition, m: usize) -> Result<Option<u32>> {
    if m != 1 {
        return Err(Error::InvalidParameter(format!(
            "single-digit readout needs m = 1, got {m}"
        )));
    }
    if eig.dim() != 2 {
        return Err(Error::Dimension(format!(
            "expected 2 eigenvalues, got {}",
            eig.dim()
        )));
    }
    let (l1, l2) = (eig.values[0], eig.values[1]);
    if (l2 - l1).abs() <= DEGENERACY_TOL {
        return Err(Error::DegenerateEigenvalues(l1, l2));
    }
    let (Some(k1), Some(k2)) = (dyadic_digits(l1), dyadic_digits(l2)) else {
        return Ok(None);
    };
    let n = k1.max(k2);
    if n == 0 {
        return Ok(None);
    }
    let diff = digits_as_integer(l1, n) ^ digits_as_integer(l2, n);
    Ok((diff == 1).then_some(n))
}

/// How the eigenvalue register resolves the spectrum: total digits `n` of the
/// readout and, per eigenvalue (ascending), the register value it produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterReadout {
    pub digits: u32,
    pub values: Vec<usize>,
}

/// Register readout for `m` eigenvalue qubits. With `m = 1` this is
/// [`representable_digits`]; with `m > 1` the register holds digits
/// `n-m+1 ..= n` and every distinct eigenvalue needs a distinct value there.
pub fn register_readout(eig: &EigenDecomposition, m: usize) -> Result<RegisterReadout> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "at least one eigenvalue qubit is needed".into(),
        ));
    }
    if m == 1 {
        let n = representable_digits(eig, 1)?.ok_or_else(|| {
            Error::NotRepresentable(format!(
                "{:?} are not of the form 0.a0 / 0.a1 in binary",
                eig.values
            ))
        })?;
        let values = eig
            .values
            .iter()
            .map(|&l| (digits_as_integer(l, n) & 1) as usize)
            .collect();
        return Ok(RegisterReadout { digits: n, values });
    }
    let mut digits = m as u32;
    for &l in &eig.values {
        let k = dyadic_digits(l).ok_or_else(|| {
            Error::NotRepresentable(format!(
                "{l} has no binary expansion within {MAX_DIGITS} digits"
            ))
        })?;
        digits = digits.max(k);
    }
    let modulus = 1u64 << m;
    let values: Vec<usize> = eig
        .values
        .iter()
        .map(|&l| (digits_as_integer(l, digits) % modulus) as usize)
        .collect();
    for i in 0..values.len() {
        for j in 0..i {
            let distinct = (eig.values[i] - eig.values[j]).abs() > DEGENERACY_TOL;
            if distinct && values[i] == values[j] {
                return Err(Error::NotRepresentable(format!(
                    "{} and {} share register value {} with {m} eigenvalue qubits",
                    eig.values[j], eig.values[i], values[i]
                )));
            }
        }
    }
    Ok(RegisterReadout { digits, values })
}

/// `θ = -2 arccos(C/λ)`, the ancilla rotation that leaves amplitude `C/λ` on `|1⟩`.
pub fn rotation_angle(c: f64, lambda: f64) -> Result<f64> {
    if !(c > 0.0 && c <= lambda + DEGENERACY_TOL) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < C <= λ, got C = {c}, λ = {lambda}"
        )));
    }
    Ok(-2.0 * (c / lambda).min(1.0).acos())
}

/// Controlled-rotation angle for the `λ₂` branch of a 2×2 instance; with
/// `c = λ₁` this is `-2 arccos(λ₁/λ₂)`.
pub fn theta_for(eigenvalues: [f64; 2], c: f64) -> Result<f64> {
    let [l1, l2] = eigenvalues;
    if l1.is_nan() || l2.is_nan() || l1 >= l2 {
        return Err(Error::Ordering(l1, l2));
    }
    if !(0.0 < l1 && l2 < 1.0) {
        return Err(Error::EigenvalueRange {
            value: if l1 <= 0.0 { l1 } else { l2 },
            divide_by: None,
        });
    }
    if c > l1 + DEGENERACY_TOL {
        return Err(Error::InvalidParameter(format!(
            "C = {c} exceeds min eigenvalue {l1}"
        )));
    }
    rotation_angle(c, l2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HHLConfig {
    /// Eigenvalue-register size `m`.
    pub eigenvalue_qubits: usize,
    /// Binary digit `n` read out (for `m > 1`, the last digit of the window).
    pub digit: u32,
    /// Rotation constant `C`, `0 < C <= λ_min`.
    pub c: f64,
    /// Unitary with `R A R† = diag(λ₁, λ₂, …)`.
    pub r: ComplexMatrix,
}

impl HHLConfig {
    /// Single eigenvalue qubit, `C = λ_min`, `R` from the eigendecomposition.
    pub fn for_instance(inst: &LinearSystemInstance) -> Result<Self> {
        Self::with_register(inst, 1)
    }

    pub fn with_register(inst: &LinearSystemInstance, m: usize) -> Result<Self> {
        let readout = register_readout(inst.eig(), m)?;
        Ok(Self {
            eigenvalue_qubits: m,
            digit: readout.digits,
            c: inst.eigenvalues()[0],
            r: inst.diagonaliser(),
        })
    }

    pub fn with_c(mut self, inst: &LinearSystemInstance, c: f64) -> Result<Self> {
        let min = inst.eigenvalues()[0];
        if !(c > 0.0 && c <= min + DEGENERACY_TOL) {
            return Err(Error::InvalidParameter(format!(
                "C = {c} outside (0, {min}]"
            )));
        }
        self.c = c.min(min);
        Ok(self)
    }

    /// Replaces `R`, checking that it diagonalises `A` with ascending eigenvalues.
    pub fn with_r(mut self, inst: &LinearSystemInstance, r: ComplexMatrix) -> Result<Self> {
        if r.rows() != inst.dim() || !r.is_unitary(1e-10) {
            return Err(Error::InvalidParameter(
                "R must be unitary and match A".into(),
            ));
        }
        let d = &(&r * inst.a()) * &r.adjoint();
        let expected = ComplexMatrix::real_diagonal(inst.eigenvalues());
        let deviation = d.max_abs_diff(&expected)?;
        if deviation > DIAGONALISER_TOL {
            return Err(Error::InvalidParameter(format!(
                "R A R† deviates from diag(λ ascending) by {deviation:e}"
            )));
        }
        self.r = r;
        Ok(self)
    }
}

fn state_qubits(inst: &LinearSystemInstance) -> Result<usize> {
    let n = inst.dim();
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::Dimension(format!("N = {n} is not a power of two")));
    }
    Ok(n.trailing_zeros() as usize)
}

fn check_readout(inst: &LinearSystemInstance, cfg: &HHLConfig) -> Result<RegisterReadout> {
    let readout = register_readout(inst.eig(), cfg.eigenvalue_qubits)?;
    if readout.digits != cfg.digit {
        return Err(Error::InvalidParameter(format!(
            "config reads digit {} but the spectrum needs {}",
            cfg.digit, readout.digits
        )));
    }
    Ok(readout)
}

/// Inverse quantum Fourier transform on `m` qubits, first qubit most significant.
fn inverse_qft(m: usize) -> ComplexMatrix {
    let dim = 1usize << m;
    let norm = 1.0 / (dim as f64).sqrt();
    ComplexMatrix::from_fn(dim, dim, |y, k| {
        Complex64::from_polar(norm, -2.0 * PI * (y * k) as f64 / dim as f64)
    })
}

fn phase_estimation(
    inst: &LinearSystemInstance,
    cfg: &HHLConfig,
    state: &[usize],
    register: &[usize],
) -> Result<Vec<GateOp>> {
    let m = register.len();
    let mut ops: Vec<GateOp> = register.iter().map(|&q| GateOp::h(q)).collect();
    for (j, &q) in register.iter().enumerate() {
        let power = cfg.digit as i32 - 1 - j as i32;
        let u = qmat::unitary_exp(inst.a(), 2.0 * PI * 2f64.powi(power))?;
        ops.push(GateOp::unitary(state.to_vec(), u)?.controlled_by(&[q])?);
    }
    if m == 1 {
        ops.push(GateOp::h(register[0]));
    } else {
        ops.push(GateOp::unitary(register.to_vec(), inverse_qft(m))?);
    }
    Ok(ops)
}

/// Full circuit: phase estimation, eigenvalue-conditioned `R_y` on the
/// ancilla, inverse phase estimation. Expects input `|b⟩|0…0⟩|1⟩`.
pub fn build_general_circuit(inst: &LinearSystemInstance, cfg: &HHLConfig) -> Result<Circuit> {
    let readout = check_readout(inst, cfg)?;
    let s = state_qubits(inst)?;
    let m = cfg.eigenvalue_qubits;
    let total = s + m + 1;
    if total > MAX_QUBITS {
        return Err(Error::Dimension(format!(
            "{total} qubits exceeds {MAX_QUBITS}"
        )));
    }
    let state: Vec<usize> = (0..s).collect();
    let register: Vec<usize> = (s..s + m).collect();
    let ancilla = s + m;

    let mut circuit = Circuit::new(total)?.with_label("general");
    let estimate = phase_estimation(inst, cfg, &state, &register)?;
    circuit.extend(estimate.iter().cloned())?;

    let mut done: Vec<usize> = Vec::new();
    for (&lambda, &value) in inst.eigenvalues().iter().zip(&readout.values) {
        if done.contains(&value) {
            continue;
        }
        done.push(value);
        let theta = rotation_angle(cfg.c, lambda)?;
        if theta.abs() < 1e-15 {
            continue;
        }
        let flips: Vec<usize> = register
            .iter()
            .enumerate()
            .filter(|(bit, _)| value & (1 << (m - 1 - bit)) == 0)
            .map(|(_, &q)| q)
            .collect();
        circuit.extend(flips.iter().map(|&q| GateOp::x(q)))?;
        circuit.push(GateOp::ry(ancilla, theta).controlled_by(&register)?)?;
        circuit.extend(flips.iter().map(|&q| GateOp::x(q)))?;
    }

    circuit.extend(estimate.iter().rev().map(GateOp::inverse))?;
    Ok(circuit)
}

/// Two-qubit circuit with the eigenvalue qubit removed: `R` on the state
/// qubit, a controlled `R_y(θ)` from state to ancilla written as
/// CNOT – `R_y(-θ/2)` – CNOT – `R_y(θ/2)`, then `R†`. Expects input `|b⟩|1⟩`.
pub fn build_optimized_circuit(inst: &LinearSystemInstance, cfg: &HHLConfig) -> Result<Circuit> {
    if inst.dim() != 2 || cfg.eigenvalue_qubits != 1 {
        return Err(Error::InvalidParameter(
            "the two-qubit circuit needs a 2x2 instance and one eigenvalue qubit".into(),
        ));
    }
    check_readout(inst, cfg)?;
    let [l1, l2] = [inst.eigenvalues()[0], inst.eigenvalues()[1]];
    let theta_low = rotation_angle(cfg.c, l1)?;
    let theta_high = rotation_angle(cfg.c, l2)?;
    let delta = theta_high - theta_low;

    let mut circuit = Circuit::new(2)?.with_label("optimized");
    circuit.push(GateOp::unitary(vec![0], cfg.r.clone())?)?;
    if theta_low.abs() >= 1e-15 {
        circuit.push(GateOp::ry(1, theta_low))?;
    }
    circuit.extend([
        GateOp::cnot(0, 1),
        GateOp::ry(1, -delta / 2.0),
        GateOp::cnot(0, 1),
        GateOp::ry(1, delta / 2.0),
    ])?;
    circuit.push(GateOp::unitary(vec![0], cfg.r.adjoint())?)?;
    Ok(circuit)
}

/// `A⁻¹|b⟩ / ‖A⁻¹|b⟩‖` through the eigendecomposition.
pub fn classical_solve(inst: &LinearSystemInstance) -> Vec<Complex64> {
    let mut x = vec![ZERO; inst.dim()];
    for (j, beta) in inst.eigen_coefficients().into_iter().enumerate() {
        let weight = beta / inst.eigenvalues()[j];
        for (xi, ui) in x.iter_mut().zip(inst.eig().vector(j)) {
            *xi += weight * ui;
        }
    }
    let mut x = qmat::normalize(&x).expect("A is invertible and b is non-zero");
    qmat::fix_global_phase(&mut x);
    x
}

/// `⟨x|M|x⟩` for each Hermitian `M`.
pub fn expectation_values(x: &[Complex64], operators: &[ComplexMatrix]) -> Result<Vec<f64>> {
    operators
        .iter()
        .map(|op| {
            if op.rows() != x.len() || !op.is_square() {
                return Err(Error::Dimension(format!(
                    "{}x{} operator on a vector of length {}",
                    op.rows(),
                    op.cols(),
                    x.len()
                )));
            }
            if !qmat::is_hermitian(op, HERMITIAN_TOL)? {
                return Err(Error::NotHermitian {
                    deviation: f64::NAN,
                });
            }
            let value = qmat::inner(x, &op.mul_vec(x)?);
            if value.im.abs() > 1e-10 {
                return Err(Error::Invariant(format!(
                    "imaginary expectation value {}",
                    value.im
                )));
            }
            Ok(value.re)
        })
        .collect()
}

/// Projectors onto `|0⟩`, `|+⟩` and `|+i⟩` with their labels.
pub fn analysis_projectors() -> [(&'static str, ComplexMatrix); 3] {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    [
        ("0", ComplexMatrix::projector(&[ONE, ZERO])),
        ("+", ComplexMatrix::projector(&[c64(h, 0.0), c64(h, 0.0)])),
        ("+i", ComplexMatrix::projector(&[c64(h, 0.0), c64(0.0, h)])),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircuitVariant {
    General,
    Optimized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRecord {
    /// Post-selected state register, unit norm, first component real-positive.
    pub x: Vec<Complex64>,
    /// Probability of reading the ancilla as 1.
    pub success_probability: f64,
    pub variant: CircuitVariant,
    pub circuit: Circuit,
    pub eigenvalues: Vec<f64>,
    pub digit: u32,
    /// Angle of the rotation applied on the largest eigenvalue's branch.
    pub theta: f64,
    /// `|⟨x|x_classical⟩|²`.
    pub fidelity_to_classical: f64,
}

/// Builds the chosen circuit, runs it, post-selects the ancilla on 1 and
/// returns the state register.
pub fn run_pipeline(
    inst: &LinearSystemInstance,
    cfg: &HHLConfig,
    variant: CircuitVariant,
) -> Result<SolutionRecord> {
    let b = StateVector::new(inst.b().to_vec())?;
    let one = StateVector::basis(1, 1)?;
    let (circuit, input) = match variant {
        CircuitVariant::General => {
            let register = StateVector::zero(cfg.eigenvalue_qubits)?;
            (
                build_general_circuit(inst, cfg)?,
                b.tensor(&register)?.tensor(&one)?,
            )
        }
        CircuitVariant::Optimized => (build_optimized_circuit(inst, cfg)?, b.tensor(&one)?),
    };
    let output = circuit.run(&input)?;
    let (mut rest, success_probability) = output.postselect(circuit.num_qubits - 1, true)?;

    if variant == CircuitVariant::General {
        // The register must have been uncomputed back to |0…0⟩.
        let s = state_qubits(inst)?;
        for _ in 0..cfg.eigenvalue_qubits {
            let (next, p) = rest.postselect(s, false)?;
            if (p - 1.0).abs() > 1e-9 {
                return Err(Error::Invariant(format!(
                    "eigenvalue register left in |0⟩ with p = {p}"
                )));
            }
            rest = next;
        }
    }

    let mut x = rest.into_amplitudes();
    qmat::fix_global_phase(&mut x);
    let fidelity_to_classical = qmat::overlap_fidelity(&x, &classical_solve(inst));
    let values = inst.eigenvalues();
    let theta = rotation_angle(cfg.c, values[values.len() - 1])?;
    Ok(SolutionRecord {
        x,
        success_probability,
        variant,
        circuit,
        eigenvalues: values.to_vec(),
        digit: cfg.digit,
        theta,
        fidelity_to_classical,
    })
}

/// Reference instances: the three spectra and the two diagonalisers used for
/// the bundled examples.
pub mod presets {
    use super::*;

    pub const SPECTRA: [[f64; 2]; 3] = [[0.5, 0.75], [0.5, 0.625], [0.75, 0.875]];

    /// `R_x(11π/15)·R_y(3π/8)`.
    pub fn rotation_one() -> ComplexMatrix {
        qmat::rx(11.0 * PI / 15.0) * qmat::ry(3.0 * PI / 8.0)
    }

    /// `R_x(89π/60)·R_y(-3π/8)`.
    pub fn rotation_two() -> ComplexMatrix {
        qmat::rx(89.0 * PI / 60.0) * qmat::ry(-3.0 * PI / 8.0)
    }

    pub fn ket_one() -> Vec<Complex64> {
        vec![ZERO, ONE]
    }

    pub fn ket_plus() -> Vec<Complex64> {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        vec![c64(h, 0.0), c64(h, 0.0)]
    }

    pub fn instance(
        spectrum: [f64; 2],
        r: &ComplexMatrix,
        b: &[Complex64],
    ) -> Result<LinearSystemInstance> {
        validate_instance(&matrix_from_spectrum(&spectrum, r)?, b)
    }
}

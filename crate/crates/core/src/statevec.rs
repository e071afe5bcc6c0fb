//! Dense state-vector simulation of few-qubit circuits.
//!
//! Qubit 0 is the most significant bit of the basis label: in a 3-qubit
//! register, `|q0 q1 q2⟩ = |1 0 0⟩` is amplitude index 4.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use num_complex::Complex64;

use crate::qmat::{self, c64, ComplexMatrix, ONE, ZERO};
use crate::{Error, Result};

pub const MAX_QUBITS: usize = 12;

const NORM_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-10;
/// Outcomes below this probability are reported as impossible.
pub const IMPOSSIBLE_PROBABILITY: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalised.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "{len} amplitudes is not 2^n for n >= 1"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::Dimension(format!(
                "{num_qubits} qubits exceeds {MAX_QUBITS}"
            )));
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let n = qmat::norm(&amplitudes);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state norm {n} != 1")));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Normalises arbitrary non-zero amplitudes.
    pub fn from_unnormalized(amplitudes: &[Complex64]) -> Result<Self> {
        Self::new(qmat::normalize(amplitudes)?)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS || index >= 1 << num_qubits {
            return Err(Error::Dimension(format!(
                "basis state {index} on {num_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[index] = ONE;
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    /// `self ⊗ other`; `self` supplies the leading (more significant) qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_QUBITS {
            return Err(Error::Dimension(format!("{n} qubits exceeds {MAX_QUBITS}")));
        }
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(Self {
            num_qubits: n,
            amplitudes,
        })
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        qmat::norm(&self.amplitudes)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        qmat::overlap_fidelity(&self.amplitudes, &other.amplitudes)
    }

    #[inline]
    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::Dimension(format!(
                "qubit {qubit} out of range for {} qubits",
                self.num_qubits
            )));
        }
        Ok(())
    }

    /// Probability of reading `outcome` on `qubit`.
    pub fn probability(&self, qubit: usize, outcome: bool) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| (i & mask != 0) == outcome)
            .map(|(_, z)| z.norm_sqr())
            .sum())
    }

    pub fn apply_gate(&self, op: &GateOp) -> Result<StateVector> {
        let mut out = self.clone();
        out.apply_gate_in_place(op)?;
        Ok(out)
    }

    fn apply_gate_in_place(&mut self, op: &GateOp) -> Result<()> {
        op.check_register(self.num_qubits)?;
        let matrix = op.matrix();
        let target_masks: Vec<usize> = op.targets.iter().map(|&q| self.mask(q)).collect();
        let control_mask: usize = op.controls.iter().map(|&q| self.mask(q)).sum();
        let target_mask: usize = target_masks.iter().sum();
        let block = 1usize << op.targets.len();

        // Offsets of the block's basis states, first target most significant.
        let offsets: Vec<usize> = (0..block)
            .map(|k| {
                target_masks
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| k & (1 << (op.targets.len() - 1 - bit)) != 0)
                    .map(|(_, m)| m)
                    .sum()
            })
            .collect();

        let mut gathered = vec![ZERO; block];
        for base in 0..self.amplitudes.len() {
            if base & target_mask != 0 || base & control_mask != control_mask {
                continue;
            }
            for (g, off) in gathered.iter_mut().zip(&offsets) {
                *g = self.amplitudes[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                self.amplitudes[base | off] = matrix
                    .row(r)
                    .iter()
                    .zip(&gathered)
                    .map(|(m, a)| m * a)
                    .sum();
            }
        }
        Ok(())
    }

    /// Measures `qubit`, keeps the branch with `outcome`, and returns the
    /// renormalised state of the remaining qubits with the branch probability.
    pub fn postselect(&self, qubit: usize, outcome: bool) -> Result<(StateVector, f64)> {
        self.check_qubit(qubit)?;
        if self.num_qubits < 2 {
            return Err(Error::Dimension("cannot remove the only qubit".into()));
        }
        let probability = self.probability(qubit, outcome)?;
        if probability < IMPOSSIBLE_PROBABILITY {
            return Err(Error::ImpossibleOutcome { probability });
        }
        let mask = self.mask(qubit);
        let low = mask - 1;
        let scale = 1.0 / probability.sqrt();
        let amplitudes = (0..self.amplitudes.len() / 2)
            .map(|r| {
                let full = ((r & !low) << 1) | (r & low) | if outcome { mask } else { 0 };
                self.amplitudes[full] * scale
            })
            .collect();
        Ok((
            StateVector {
                num_qubits: self.num_qubits - 1,
                amplitudes,
            },
            probability,
        ))
    }

    /// Reduced density matrix on `keep` (in the listed order), tracing out the rest.
    pub fn density_matrix(&self, keep: &[usize]) -> Result<ComplexMatrix> {
        for (i, &q) in keep.iter().enumerate() {
            self.check_qubit(q)?;
            if keep[..i].contains(&q) {
                return Err(Error::Dimension(format!("qubit {q} listed twice")));
            }
        }
        if keep.is_empty() {
            return Err(Error::Dimension("nothing to keep".into()));
        }
        let traced: Vec<usize> = (0..self.num_qubits).filter(|q| !keep.contains(q)).collect();
        let keep_masks: Vec<usize> = keep.iter().map(|&q| self.mask(q)).collect();
        let traced_masks: Vec<usize> = traced.iter().map(|&q| self.mask(q)).collect();
        let dim = 1usize << keep.len();

        let compose = |sub: usize, env: usize| -> usize {
            let mut idx = 0;
            for (bit, m) in keep_masks.iter().enumerate() {
                if sub & (1 << (keep.len() - 1 - bit)) != 0 {
                    idx |= m;
                }
            }
            for (bit, m) in traced_masks.iter().enumerate() {
                if env & (1 << (traced.len() - 1 - bit)) != 0 {
                    idx |= m;
                }
            }
            idx
        };

        let mut rho = ComplexMatrix::zeros(dim, dim);
        for env in 0..1usize << traced.len() {
            for i in 0..dim {
                let ai = self.amplitudes[compose(i, env)];
                if ai == ZERO {
                    continue;
                }
                for j in 0..dim {
                    rho[(i, j)] += ai * self.amplitudes[compose(j, env)].conj();
                }
            }
        }
        Ok(rho)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    Hadamard,
    PauliX,
    PauliZ,
    /// `exp(-iθσ_y/2)`.
    Ry(f64),
    /// Arbitrary unitary on `2^k` amplitudes for `k` targets.
    Unitary(ComplexMatrix),
}

/// A gate on `targets`, applied only where every qubit in `controls` is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<usize>,
}

impl GateOp {
    pub fn new(kind: GateKind, targets: Vec<usize>, controls: Vec<usize>) -> Result<Self> {
        let op = Self {
            kind,
            targets,
            controls,
        };
        op.validate()?;
        Ok(op)
    }

    fn single(kind: GateKind, target: usize) -> Self {
        Self {
            kind,
            targets: vec![target],
            controls: Vec::new(),
        }
    }

    pub fn h(target: usize) -> Self {
        Self::single(GateKind::Hadamard, target)
    }

    pub fn x(target: usize) -> Self {
        Self::single(GateKind::PauliX, target)
    }

    pub fn z(target: usize) -> Self {
        Self::single(GateKind::PauliZ, target)
    }

    pub fn ry(target: usize, theta: f64) -> Self {
        Self::single(GateKind::Ry(theta), target)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::PauliX,
            targets: vec![target],
            controls: vec![control],
        }
    }

    pub fn unitary(targets: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        Self::new(GateKind::Unitary(matrix), targets, Vec::new())
    }

    /// Adds control qubits to this gate.
    pub fn controlled_by(mut self, controls: &[usize]) -> Result<Self> {
        self.controls.extend_from_slice(controls);
        self.validate()?;
        Ok(self)
    }

    /// The gate's matrix on its target block.
    pub fn matrix(&self) -> ComplexMatrix {
        match &self.kind {
            GateKind::Hadamard => qmat::hadamard(),
            GateKind::PauliX => qmat::pauli_x(),
            GateKind::PauliZ => qmat::pauli_z(),
            GateKind::Ry(theta) => qmat::ry(*theta),
            GateKind::Unitary(m) => m.clone(),
        }
    }

    pub fn inverse(&self) -> Self {
        let kind = match &self.kind {
            GateKind::Ry(theta) => GateKind::Ry(-theta),
            GateKind::Unitary(m) => GateKind::Unitary(m.adjoint()),
            other => other.clone(),
        };
        Self {
            kind,
            targets: self.targets.clone(),
            controls: self.controls.clone(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.targets.is_empty() {
            return Err(Error::Dimension("gate without targets".into()));
        }
        let all: Vec<usize> = self.targets.iter().chain(&self.controls).copied().collect();
        for (i, q) in all.iter().enumerate() {
            if all[..i].contains(q) {
                return Err(Error::Dimension(format!(
                    "qubit {q} used twice in one gate"
                )));
            }
        }
        let expected = 1usize << self.targets.len();
        match &self.kind {
            GateKind::Unitary(m) => {
                if m.rows() != expected || m.cols() != expected {
                    return Err(Error::Dimension(format!(
                        "{}x{} matrix on {} targets",
                        m.rows(),
                        m.cols(),
                        self.targets.len()
                    )));
                }
                if !m.is_unitary(UNITARY_TOL) {
                    return Err(Error::InvalidParameter("gate matrix is not unitary".into()));
                }
            }
            GateKind::Ry(theta) if !theta.is_finite() => return Err(Error::NonFinite),
            _ if self.targets.len() != 1 => {
                return Err(Error::Dimension("fixed gates act on one target".into()));
            }
            _ => {}
        }
        Ok(())
    }

    fn check_register(&self, num_qubits: usize) -> Result<()> {
        self.validate()?;
        if let Some(q) = self
            .targets
            .iter()
            .chain(&self.controls)
            .find(|&&q| q >= num_qubits)
        {
            return Err(Error::Dimension(format!(
                "qubit {q} out of range for {num_qubits} qubits"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub num_qubits: usize,
    pub ops: Vec<GateOp>,
    pub labels: Vec<String>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::Dimension(format!("{num_qubits} qubits")));
        }
        Ok(Self {
            num_qubits,
            ops: Vec::new(),
            labels: Vec::new(),
        })
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.labels.push(label.into());
        self
    }

    pub fn push(&mut self, op: GateOp) -> Result<&mut Self> {
        op.check_register(self.num_qubits)?;
        self.ops.push(op);
        Ok(self)
    }

    pub fn extend(&mut self, ops: impl IntoIterator<Item = GateOp>) -> Result<&mut Self> {
        for op in ops {
            self.push(op)?;
        }
        Ok(self)
    }

    /// Applies the ops left to right.
    pub fn run(&self, input: &StateVector) -> Result<StateVector> {
        if input.num_qubits() != self.num_qubits {
            return Err(Error::Dimension(format!(
                "{}-qubit circuit on {}-qubit state",
                self.num_qubits,
                input.num_qubits()
            )));
        }
        let mut state = input.clone();
        for op in &self.ops {
            state.apply_gate_in_place(op)?;
        }
        Ok(state)
    }

    /// The circuit's full `2^n × 2^n` matrix.
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        let dim = 1usize << self.num_qubits;
        let mut u = ComplexMatrix::zeros(dim, dim);
        for col in 0..dim {
            let out = self.run(&StateVector::basis(self.num_qubits, col)?)?;
            for (row, z) in out.amplitudes().iter().enumerate() {
                u[(row, col)] = *z;
            }
        }
        Ok(u)
    }

    /// Adjoint circuit: reversed order, each gate inverted.
    pub fn inverse(&self) -> Self {
        Self {
            num_qubits: self.num_qubits,
            ops: self.ops.iter().rev().map(GateOp::inverse).collect(),
            labels: self.labels.clone(),
        }
    }
}

pub fn run_circuit(circuit: &Circuit, input: &StateVector) -> Result<StateVector> {
    circuit.run(input)
}

/// Single-qubit state `α|0⟩ + β|1⟩` (normalised).
pub fn qubit(alpha: Complex64, beta: Complex64) -> Result<StateVector> {
    StateVector::from_unnormalized(&[alpha, beta])
}

pub fn plus() -> StateVector {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    StateVector {
        num_qubits: 1,
        amplitudes: vec![c64(h, 0.0), c64(h, 0.0)],
    }
}

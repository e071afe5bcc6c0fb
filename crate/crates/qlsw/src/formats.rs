//! JSON and CSV file formats. Complex numbers are `[re, im]` pairs; input
//! files also accept a bare real number.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use qlsw_core::hhl::{self, HHLConfig, LinearSystemInstance};
use qlsw_core::photonic::{self, NoiseParams};
use qlsw_core::qmat::{c64, ComplexMatrix};
use qlsw_core::statevec::{Circuit, GateKind, GateOp};
use qlsw_core::tomo::{self, Basis, CountRecord, TomographyReport};
use qlsw_core::Complex64;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexEntry {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexEntry {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexEntry::Real(r) => c64(r, 0.0),
            ComplexEntry::Pair([re, im]) => c64(re, im),
        }
    }
}

pub fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn vector_out(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|&z| pair(z)).collect()
}

pub fn matrix_out(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows()).map(|i| vector_out(m.row(i))).collect()
}

fn vector_in(v: &[ComplexEntry]) -> Vec<Complex64> {
    v.iter().map(|e| e.value()).collect()
}

fn matrix_in(rows: &[Vec<ComplexEntry>]) -> Result<ComplexMatrix, CliError> {
    let rows: Vec<Vec<Complex64>> = rows.iter().map(|r| vector_in(r)).collect();
    Ok(ComplexMatrix::from_rows(&rows)?)
}

/// Problem definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<ComplexEntry>>,
    pub b: Vec<ComplexEntry>,
    /// Diagonalising unitary; derived from `A` when absent.
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<Vec<ComplexEntry>>>,
    #[serde(default = "one")]
    pub eigenvalue_qubits: usize,
    /// Rotation constant; defaults to the smallest eigenvalue.
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

fn one() -> usize {
    1
}

impl InstanceFile {
    pub fn build(&self) -> Result<(LinearSystemInstance, HHLConfig), CliError> {
        let a = matrix_in(&self.a)?;
        let inst = hhl::validate_instance(&a, &vector_in(&self.b))?;
        let mut cfg = HHLConfig::with_register(&inst, self.eigenvalue_qubits)?;
        if let Some(r) = &self.r {
            cfg = cfg.with_r(&inst, matrix_in(r)?)?;
        }
        if let Some(c) = self.c {
            cfg = cfg.with_c(&inst, c)?;
        }
        Ok((inst, cfg))
    }

    pub fn from_parts(
        label: Option<String>,
        a: &ComplexMatrix,
        b: &[Complex64],
        r: Option<&ComplexMatrix>,
    ) -> Self {
        let entries = |m: &ComplexMatrix| -> Vec<Vec<ComplexEntry>> {
            matrix_out(m)
                .into_iter()
                .map(|row| row.into_iter().map(ComplexEntry::Pair).collect())
                .collect()
        };
        Self {
            label,
            a: entries(a),
            b: b.iter().map(|&z| ComplexEntry::Pair(pair(z))).collect(),
            r: r.map(entries),
            eigenvalue_qubits: 1,
            c: None,
        }
    }
}

/// Noise model and sampling settings. Omitting `pair_amplitude` calibrates
/// it so double emissions make up `double_emission_share` of the counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseFile {
    #[serde(default = "default_bell")]
    pub bell_visibility: f64,
    #[serde(default = "default_interference")]
    pub interference_visibility: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub double_emission_share: Option<f64>,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_bell() -> f64 {
    NoiseParams::default().bell_visibility
}

fn default_interference() -> f64 {
    NoiseParams::default().interference_visibility
}

fn default_truncation() -> usize {
    photonic::DEFAULT_TRUNCATION
}

impl Default for NoiseFile {
    fn default() -> Self {
        Self {
            bell_visibility: default_bell(),
            interference_visibility: default_interference(),
            pair_amplitude: None,
            double_emission_share: None,
            truncation: default_truncation(),
            shots: None,
            seed: None,
        }
    }
}

impl NoiseFile {
    pub fn params(&self) -> Result<NoiseParams, CliError> {
        let mut noise = NoiseParams {
            bell_visibility: self.bell_visibility,
            interference_visibility: self.interference_visibility,
            pair_amplitude: 0.0,
            truncation: self.truncation,
        };
        noise.validate()?;
        noise.pair_amplitude = match (self.pair_amplitude, self.double_emission_share) {
            (Some(_), Some(_)) => {
                return Err(CliError::new(
                    "configuration",
                    "give either pair_amplitude or double_emission_share, not both",
                ))
            }
            (Some(eps), None) => eps,
            (None, share) => photonic::reference_pair_amplitude(
                &noise,
                share.unwrap_or(photonic::DEFAULT_DOUBLE_EMISSION_SHARE),
            )?,
        };
        noise.validate()?;
        Ok(noise)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisCounts {
    pub plus: u64,
    pub minus: u64,
}

/// Tomography counts keyed by basis label `Z`, `X`, `Y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountsFile {
    pub bases: BTreeMap<String, BasisCounts>,
}

impl CountsFile {
    pub fn from_records(records: &[CountRecord]) -> Self {
        let bases = records
            .iter()
            .map(|r| {
                (
                    r.basis.label().to_string(),
                    BasisCounts {
                        plus: r.plus,
                        minus: r.minus,
                    },
                )
            })
            .collect();
        Self { bases }
    }

    pub fn records(&self) -> Result<Vec<CountRecord>, CliError> {
        let mut out = Vec::new();
        for (label, c) in &self.bases {
            let basis = Basis::from_label(label).ok_or_else(|| {
                CliError::new(
                    "parse",
                    format!("unknown basis {label:?}; expected Z, X or Y"),
                )
            })?;
            out.push(CountRecord {
                basis,
                plus: c.plus,
                minus: c.minus,
            });
        }
        out.sort_by_key(|r| r.basis);
        Ok(out)
    }
}

/// Named single-qubit inputs.
pub fn named_state(name: &str) -> Option<Vec<Complex64>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = match name {
        "0" => vec![c64(1.0, 0.0), c64(0.0, 0.0)],
        "1" => vec![c64(0.0, 0.0), c64(1.0, 0.0)],
        "+" => vec![c64(h, 0.0), c64(h, 0.0)],
        "-" => vec![c64(h, 0.0), c64(-h, 0.0)],
        "+i" => vec![c64(h, 0.0), c64(0.0, h)],
        "-i" => vec![c64(h, 0.0), c64(0.0, -h)],
        _ => return None,
    };
    Some(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridInput {
    Named(String),
    Explicit {
        label: String,
        state: Vec<ComplexEntry>,
    },
}

impl GridInput {
    pub fn label(&self) -> &str {
        match self {
            GridInput::Named(n) => n,
            GridInput::Explicit { label, .. } => label,
        }
    }

    pub fn state(&self) -> Result<Vec<Complex64>, CliError> {
        match self {
            GridInput::Named(n) => named_state(n).ok_or_else(|| {
                CliError::new(
                    "parse",
                    format!("unknown input state {n:?}; use 0, 1, +, -, +i, -i"),
                )
            }),
            GridInput::Explicit { state, .. } => Ok(vector_in(state)),
        }
    }
}

/// Sweep grid: every spectrum is combined with every input, spectrum-major.
/// Each point solves `A = R† diag(λ) R` with `b` the input state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub spectra: Vec<[f64; 2]>,
    pub inputs: Vec<GridInput>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<Vec<ComplexEntry>>>,
}

pub struct GridPoint {
    pub label: String,
    pub spectrum: [f64; 2],
    pub instance: LinearSystemInstance,
    pub config: HHLConfig,
}

impl GridFile {
    pub fn points(&self) -> Result<Vec<GridPoint>, CliError> {
        if self.spectra.is_empty() || self.inputs.is_empty() {
            return Err(CliError::new(
                "empty_grid",
                "grid needs at least one spectrum and one input",
            ));
        }
        let r = match &self.r {
            Some(r) => matrix_in(r)?,
            None => ComplexMatrix::identity(2),
        };
        let mut points = Vec::new();
        for &spectrum in &self.spectra {
            for input in &self.inputs {
                let a = hhl::matrix_from_spectrum(&spectrum, &r)?;
                let instance = hhl::validate_instance(&a, &input.state()?)?;
                let config = HHLConfig::for_instance(&instance)?.with_r(&instance, r.clone())?;
                points.push(GridPoint {
                    label: input.label().to_string(),
                    spectrum,
                    instance,
                    config,
                });
            }
        }
        Ok(points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpJson {
    /// One of `h`, `x`, `z`, `ry`, `unitary`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<ComplexEntry>>>,
    pub targets: Vec<usize>,
    #[serde(default)]
    pub controls: Vec<usize>,
}

/// Gate list of a circuit; qubit 0 is the most significant bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitJson {
    pub num_qubits: usize,
    pub ops: Vec<OpJson>,
}

impl From<&Circuit> for CircuitJson {
    fn from(c: &Circuit) -> Self {
        let ops = c
            .ops
            .iter()
            .map(|op| {
                let (kind, theta, matrix) = match &op.kind {
                    GateKind::Hadamard => ("h", None, None),
                    GateKind::PauliX => ("x", None, None),
                    GateKind::PauliZ => ("z", None, None),
                    GateKind::Ry(t) => ("ry", Some(*t), None),
                    GateKind::Unitary(m) => (
                        "unitary",
                        None,
                        Some(
                            matrix_out(m)
                                .into_iter()
                                .map(|r| r.into_iter().map(ComplexEntry::Pair).collect())
                                .collect(),
                        ),
                    ),
                };
                OpJson {
                    kind: kind.to_string(),
                    theta,
                    matrix,
                    targets: op.targets.clone(),
                    controls: op.controls.clone(),
                }
            })
            .collect();
        Self {
            num_qubits: c.num_qubits,
            ops,
        }
    }
}

impl CircuitJson {
    pub fn to_circuit(&self) -> Result<Circuit, CliError> {
        let mut circuit = Circuit::new(self.num_qubits)?;
        for op in &self.ops {
            let kind = match (op.kind.as_str(), op.theta, &op.matrix) {
                ("h", None, None) => GateKind::Hadamard,
                ("x", None, None) => GateKind::PauliX,
                ("z", None, None) => GateKind::PauliZ,
                ("ry", Some(t), None) => GateKind::Ry(t),
                ("unitary", None, Some(m)) => GateKind::Unitary(matrix_in(m)?),
                (k, ..) => return Err(CliError::new("parse", format!("malformed {k:?} gate"))),
            };
            circuit.push(GateOp::new(kind, op.targets.clone(), op.controls.clone())?)?;
        }
        Ok(circuit)
    }
}

/// Output of `solve`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveReport {
    pub variant: String,
    pub x: Vec<[f64; 2]>,
    pub success_probability: f64,
    pub fidelity_to_classical: f64,
    pub theta: f64,
    pub eigenvalues: Vec<f64>,
    pub n_digit: u32,
    pub condition_number: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectationJson {
    pub label: String,
    pub value: f64,
    pub error: f64,
}

/// Output of `tomo`, and the tomography part of the `photonic` report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomographyJson {
    pub rho: Vec<Vec<[f64; 2]>>,
    pub target: Vec<[f64; 2]>,
    pub fidelity: f64,
    pub fidelity_error: f64,
    pub expectation_values: Vec<ExpectationJson>,
    pub counts: CountsFile,
    pub trials: usize,
    pub failed_trials: usize,
    pub seed: u64,
}

impl TomographyJson {
    pub fn new(report: &TomographyReport, target: &[Complex64], seed: u64) -> Self {
        Self {
            rho: matrix_out(&report.rho),
            target: vector_out(target),
            fidelity: report.fidelity,
            fidelity_error: report.fidelity_error,
            expectation_values: report
                .expectation_values
                .iter()
                .map(|e| ExpectationJson {
                    label: e.label.clone(),
                    value: e.value,
                    error: e.error,
                })
                .collect(),
            counts: CountsFile::from_records(&report.raw),
            trials: report.trials,
            failed_trials: report.failed_trials,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseJson {
    pub bell_visibility: f64,
    pub interference_visibility: f64,
    pub pair_amplitude: f64,
    pub truncation: usize,
}

impl From<&NoiseParams> for NoiseJson {
    fn from(n: &NoiseParams) -> Self {
        Self {
            bell_visibility: n.bell_visibility,
            interference_visibility: n.interference_visibility,
            pair_amplitude: n.pair_amplitude,
            truncation: n.truncation,
        }
    }
}

/// Output of `photonic`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhotonicReport {
    /// Fidelity of the simulated (unsampled) output state to the classical solution.
    pub exact_fidelity: f64,
    /// Successful events per signal emission.
    pub success_probability: f64,
    pub double_emission_share: f64,
    pub eigenvalues: Vec<f64>,
    pub theta: f64,
    pub shots: u64,
    pub noise: NoiseJson,
    pub tomography: TomographyJson,
}

/// One row of the sweep CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub input: String,
    pub lambda_1: f64,
    pub lambda_2: f64,
    pub fidelity: f64,
    pub error: f64,
    pub measured_fidelity: f64,
    pub success_probability: f64,
}

/// Density matrix as CSV rows: row, col, re, im.
pub fn density_csv(rho: &ComplexMatrix) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["row", "col", "re", "im"])?;
    for i in 0..rho.rows() {
        for j in 0..rho.cols() {
            let z = rho[(i, j)];
            w.write_record([
                i.to_string(),
                j.to_string(),
                z.re.to_string(),
                z.im.to_string(),
            ])?;
        }
    }
    finish_csv(w)
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record([
            "input",
            "lambda_1",
            "lambda_2",
            "fidelity",
            "error",
            "measured_fidelity",
            "success_probability",
        ])?;
    }
    finish_csv(w)
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::new("io", e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::new("internal", e.to_string()))
}

/// Single-qubit target state file: `[[re, im], [re, im]]`.
pub fn parse_state(text: &str) -> Result<Vec<Complex64>, CliError> {
    let entries: Vec<ComplexEntry> = serde_json::from_str(text)?;
    Ok(vector_in(&entries))
}

pub fn default_trials() -> usize {
    tomo::DEFAULT_TRIALS
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_accepts_real_shorthand() {
        let f: InstanceFile =
            serde_json::from_str(r#"{"A": [[0.5, 0], [0, [0.75, 0]]], "b": [0, 1]}"#).unwrap();
        let (inst, cfg) = f.build().unwrap();
        assert_eq!(inst.eigenvalues(), &[0.5, 0.75]);
        assert_eq!(cfg.digit, 2);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(
            serde_json::from_str::<InstanceFile>(r#"{"A": [[1]], "b": [1], "extra": 1}"#).is_err()
        );
    }

    #[test]
    fn noise_defaults_calibrate() {
        let noise = NoiseFile::default().params().unwrap();
        assert!((noise.pair_amplitude - photonic::DEFAULT_PAIR_AMPLITUDE).abs() < 5e-4);
        let both = NoiseFile {
            pair_amplitude: Some(0.1),
            double_emission_share: Some(0.1),
            ..NoiseFile::default()
        };
        assert_eq!(both.params().unwrap_err().code, "configuration");
    }

    #[test]
    fn counts_round_trip() {
        let text = r#"{"bases": {"Z": {"plus": 5, "minus": 1}, "X": {"plus": 3, "minus": 3}, "Y": {"plus": 2, "minus": 4}}}"#;
        let f: CountsFile = serde_json::from_str(text).unwrap();
        let records = f.records().unwrap();
        assert_eq!(records[0].basis, Basis::Z);
        assert_eq!(CountsFile::from_records(&records), f);
    }

    #[test]
    fn circuit_round_trip() {
        let inst = hhl::presets::instance(
            [0.5, 0.75],
            &hhl::presets::rotation_one(),
            &hhl::presets::ket_one(),
        )
        .unwrap();
        let cfg = HHLConfig::for_instance(&inst).unwrap();
        for c in [
            hhl::build_optimized_circuit(&inst, &cfg).unwrap(),
            hhl::build_general_circuit(&inst, &cfg).unwrap(),
        ] {
            let json = serde_json::to_string(&CircuitJson::from(&c)).unwrap();
            let back: CircuitJson = serde_json::from_str(&json).unwrap();
            let rebuilt = back.to_circuit().unwrap();
            assert_eq!(rebuilt.ops, c.ops);
        }
        let ry: CircuitJson =
            serde_json::from_str(r#"{"num_qubits": 2, "ops": [{"kind": "ry", "theta": -1.682, "targets": [1], "controls": [0]}]}"#)
                .unwrap();
        assert_eq!(
            ry.to_circuit().unwrap().ops[0],
            GateOp::ry(1, -1.682).controlled_by(&[0]).unwrap()
        );
    }

    #[test]
    fn empty_grid() {
        let g = GridFile {
            spectra: vec![],
            inputs: vec![GridInput::Named("1".into())],
            r: None,
        };
        assert_eq!(g.points().err().unwrap().code, "empty_grid");
    }
}

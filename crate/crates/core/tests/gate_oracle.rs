#[path = "support/permanent_oracle.rs"]
mod oracle;

use oracle::{cnot, fidelity, inputs, C};
use qlsw_core::photonic::{destructive_cnot, heralded_cnot, NoiseParams};

#[test]
fn heralded_gate_against_permanents() {
    for (c, t) in inputs() {
        let (psi, p) = oracle::heralded(c, t);
        assert!((p - 1.0 / 16.0).abs() < 1e-12, "oracle probability {p}");
        assert!(fidelity(&psi, &cnot(c, t)) > 1.0 - 1e-12);

        let sim = heralded_cnot(c, t, &NoiseParams::ideal()).unwrap();
        assert!((sim.probability - p).abs() < 1e-10);
        let psi_vec: Vec<C> = psi.iter().map(|a| a / p.sqrt()).collect();
        assert!(sim.fidelity(&psi_vec).unwrap() > 1.0 - 1e-9);
    }
}

#[test]
fn destructive_gate_against_permanents() {
    for (c, t) in inputs() {
        let (psi, p) = oracle::destructive(c, t);
        assert!((p - 1.0 / 9.0).abs() < 1e-12, "oracle probability {p}");
        assert!(fidelity(&psi, &cnot(c, t)) > 1.0 - 1e-12);

        let sim = destructive_cnot(c, t).unwrap();
        assert!((sim.probability - p).abs() < 1e-10);
        let psi_vec: Vec<C> = psi.iter().map(|a| a / p.sqrt()).collect();
        assert!(sim.fidelity(&psi_vec).unwrap() > 1.0 - 1e-9);
    }
}

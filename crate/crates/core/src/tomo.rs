//! Single-qubit tomography: simulated Pauli-basis counts, linear-inversion
//! reconstruction and Monte-Carlo error bars under Poissonian statistics.
//!
//! Randomness comes from ChaCha8 seeded with the caller's seed. Monte-Carlo
//! trial `k` draws from stream `k` of that seed, so trials can be evaluated
//! in any order (or in parallel) with identical results.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};

use crate::hhl::analysis_projectors;
use crate::qmat::{self, c64, ComplexMatrix, ONE, ZERO};
use crate::{Error, Result};

pub const DEFAULT_SHOTS: u64 = 10_000;
pub const DEFAULT_TRIALS: usize = 500;
pub const MIN_TRIALS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Basis {
    Z,
    X,
    Y,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::Z, Basis::X, Basis::Y];

    pub fn label(self) -> char {
        match self {
            Basis::Z => 'Z',
            Basis::X => 'X',
            Basis::Y => 'Y',
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "Z" | "z" => Some(Basis::Z),
            "X" | "x" => Some(Basis::X),
            "Y" | "y" => Some(Basis::Y),
            _ => None,
        }
    }

    /// The `+1` eigenstate: `|0⟩`, `|+⟩` or `|+i⟩`.
    pub fn plus_state(self) -> [Complex64; 2] {
        let h = FRAC_1_SQRT_2;
        match self {
            Basis::Z => [ONE, ZERO],
            Basis::X => [c64(h, 0.0), c64(h, 0.0)],
            Basis::Y => [c64(h, 0.0), c64(0.0, h)],
        }
    }

    pub fn pauli(self) -> ComplexMatrix {
        match self {
            Basis::Z => qmat::pauli_z(),
            Basis::X => qmat::pauli_x(),
            Basis::Y => qmat::pauli_y(),
        }
    }
}

/// Counts for one analysis basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountRecord {
    pub basis: Basis,
    pub plus: u64,
    pub minus: u64,
}

impl CountRecord {
    pub fn total(&self) -> u64 {
        self.plus + self.minus
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationValue {
    pub label: String,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyReport {
    pub rho: ComplexMatrix,
    pub fidelity: f64,
    /// Standard deviation of the fidelity over Monte-Carlo trials.
    pub fidelity_error: f64,
    /// Projections onto `|0⟩`, `|+⟩`, `|+i⟩`.
    pub expectation_values: Vec<ExpectationValue>,
    pub raw: Vec<CountRecord>,
    pub trials: usize,
    /// Trials whose resampled counts could not be reconstructed.
    pub failed_trials: usize,
}

/// Probability of the `+` outcome of `basis` for density matrix `rho`.
pub fn plus_probability(rho: &ComplexMatrix, basis: Basis) -> Result<f64> {
    let plus = basis.plus_state();
    let p = qmat::inner(&plus, &rho.mul_vec(&plus)?).re;
    Ok(p.clamp(0.0, 1.0))
}

/// Draws counts in Z, X, Y: a Poisson total with mean `shots_per_basis`,
/// split binomially by the Born probabilities of `rho`.
pub fn sample_counts(
    rho: &ComplexMatrix,
    shots_per_basis: u64,
    seed: u64,
) -> Result<Vec<CountRecord>> {
    if shots_per_basis == 0 {
        return Err(Error::InvalidParameter(
            "shots per basis must be at least 1".into(),
        ));
    }
    qmat::validate_density_matrix(rho, qmat::DENSITY_TOL)?;
    if rho.rows() != 2 {
        return Err(Error::Dimension("tomography is single-qubit".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poisson = Poisson::new(shots_per_basis as f64)
        .map_err(|e| Error::InvalidParameter(alloc::format!("{e}")))?;
    Basis::ALL
        .iter()
        .map(|&basis| {
            let total = poisson.sample(&mut rng) as u64;
            let p = plus_probability(rho, basis)?;
            let plus = binomial(total, p, &mut rng)?;
            Ok(CountRecord {
                basis,
                plus,
                minus: total - plus,
            })
        })
        .collect()
}

fn binomial(n: u64, p: f64, rng: &mut impl Rng) -> Result<u64> {
    let dist = Binomial::new(n, p).map_err(|e| Error::InvalidParameter(alloc::format!("{e}")))?;
    Ok(dist.sample(rng))
}

/// Counts rounded from exact Born probabilities, `shots` per basis.
pub fn expected_counts(rho: &ComplexMatrix, shots: u64) -> Result<Vec<CountRecord>> {
    Basis::ALL
        .iter()
        .map(|&basis| {
            let plus = (plus_probability(rho, basis)? * shots as f64).round() as u64;
            Ok(CountRecord {
                basis,
                plus,
                minus: shots - plus.min(shots),
            })
        })
        .collect()
}

fn bloch_vector(counts: &[CountRecord]) -> Result<[f64; 3]> {
    let mut r = [0.0; 3];
    for (k, basis) in Basis::ALL.iter().enumerate() {
        let mut found = counts.iter().filter(|c| c.basis == *basis);
        let record = found.next().ok_or(Error::MissingBasis(basis.label()))?;
        if found.next().is_some() {
            return Err(Error::InvalidParameter(alloc::format!(
                "basis {} listed twice",
                basis.label()
            )));
        }
        let total = record.total();
        if total == 0 {
            return Err(Error::EmptyBasis(basis.label()));
        }
        r[k] = (record.plus as f64 - record.minus as f64) / total as f64;
    }
    // Order above is Z, X, Y; return (x, y, z).
    Ok([r[1], r[2], r[0]])
}

/// `ρ = ½(I + r·σ)`, projected onto the density matrices when `|r| > 1`.
pub fn density_from_bloch(r: [f64; 3]) -> Result<ComplexMatrix> {
    let [x, y, z] = r;
    let rho = ComplexMatrix::from_rows(&[
        alloc::vec![c64((1.0 + z) / 2.0, 0.0), c64(x / 2.0, -y / 2.0)],
        alloc::vec![c64(x / 2.0, y / 2.0), c64((1.0 - z) / 2.0, 0.0)],
    ])?;
    if x * x + y * y + z * z > 1.0 {
        qmat::clip_to_density(&rho)
    } else {
        Ok(rho)
    }
}

/// Linear-inversion estimate from Z, X and Y counts.
pub fn reconstruct(counts: &[CountRecord]) -> Result<ComplexMatrix> {
    density_from_bloch(bloch_vector(counts)?)
}

struct Estimate {
    fidelity: f64,
    projections: [f64; 3],
}

fn estimate(
    rho: &ComplexMatrix,
    target: &[Complex64],
    projectors: &[ComplexMatrix],
) -> Result<Estimate> {
    let fidelity = qmat::state_fidelity(rho, target)?;
    let mut projections = [0.0; 3];
    for (p, op) in projections.iter_mut().zip(projectors) {
        *p = rho.try_mul(op)?.trace().re;
    }
    Ok(Estimate {
        fidelity,
        projections,
    })
}

fn poisson_resample(mean: u64, rng: &mut ChaCha8Rng) -> u64 {
    if mean == 0 {
        return 0;
    }
    Poisson::new(mean as f64)
        .map(|d| d.sample(rng) as u64)
        .unwrap_or(0)
}

/// Trial `trial` of the parametric bootstrap: each count replaced by a
/// Poisson draw with the observed count as mean.
pub fn resample(counts: &[CountRecord], seed: u64, trial: u64) -> Vec<CountRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    counts
        .iter()
        .map(|c| CountRecord {
            basis: c.basis,
            plus: poisson_resample(c.plus, &mut rng),
            minus: poisson_resample(c.minus, &mut rng),
        })
        .collect()
}

fn std_dev(samples: &[f64]) -> f64 {
    if samples.len() < 2 {
        return 0.0;
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    (samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Point estimate from `counts` plus 1σ errors from `trials` Poisson resamplings.
pub fn monte_carlo_errors(
    counts: &[CountRecord],
    target: &[Complex64],
    trials: usize,
    seed: u64,
) -> Result<TomographyReport> {
    if trials < MIN_TRIALS {
        return Err(Error::InvalidParameter(alloc::format!(
            "need at least {MIN_TRIALS} Monte-Carlo trials, got {trials}"
        )));
    }
    if target.len() != 2 {
        return Err(Error::Dimension(
            "target must be a single-qubit state".into(),
        ));
    }
    let target = qmat::normalize(target)?;
    let labelled = analysis_projectors();
    let projectors: Vec<ComplexMatrix> = labelled.iter().map(|(_, p)| p.clone()).collect();

    let rho = reconstruct(counts)?;
    let point = estimate(&rho, &target, &projectors)?;

    let mut fidelities = Vec::with_capacity(trials);
    let mut projections: [Vec<f64>; 3] = Default::default();
    let mut failed_trials = 0;
    for trial in 0..trials {
        let sample = resample(counts, seed, trial as u64);
        match reconstruct(&sample).and_then(|r| estimate(&r, &target, &projectors)) {
            Ok(e) => {
                fidelities.push(e.fidelity);
                for (acc, v) in projections.iter_mut().zip(e.projections) {
                    acc.push(v);
                }
            }
            Err(Error::EmptyBasis(_)) => failed_trials += 1,
            Err(other) => return Err(other),
        }
    }

    let expectation_values = labelled
        .iter()
        .zip(point.projections)
        .zip(&projections)
        .map(|(((label, _), value), samples)| ExpectationValue {
            label: (*label).into(),
            value,
            error: std_dev(samples),
        })
        .collect();

    Ok(TomographyReport {
        rho,
        fidelity: point.fidelity,
        fidelity_error: std_dev(&fidelities),
        expectation_values,
        raw: counts.to_vec(),
        trials,
        failed_trials,
    })
}

/// [`monte_carlo_errors`] with the default trial count.
pub fn report(counts: &[CountRecord], target: &[Complex64], seed: u64) -> Result<TomographyReport> {
    monte_carlo_errors(counts, target, DEFAULT_TRIALS, seed)
}

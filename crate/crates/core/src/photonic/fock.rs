use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use num_complex::Complex64;

use crate::qmat::{ComplexMatrix, ZERO};
use crate::{Error, Result};

pub const DEFAULT_TRUNCATION: usize = 4;
const NORM_TOL: f64 = 1e-9;
const PRUNE: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::H, Polarization::V];

    pub fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }
}

/// One optical mode: a spatial path, a polarization and an internal tag.
///
/// Photons with different tags never interfere; the tag stands in for the
/// spectral and temporal degrees of freedom that make photons from separate
/// emissions partially distinguishable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeLabel {
    pub spatial: u8,
    pub polarization: Polarization,
    pub tag: u8,
}

impl ModeLabel {
    pub const fn new(spatial: u8, polarization: Polarization, tag: u8) -> Self {
        Self {
            spatial,
            polarization,
            tag,
        }
    }
}

/// All (spatial, polarization, tag) combinations for the given paths and `tags` tags.
pub fn register(spatial: &[u8], tags: u8) -> Vec<ModeLabel> {
    let mut modes = Vec::new();
    for &s in spatial {
        for tag in 0..tags.max(1) {
            for pol in Polarization::BOTH {
                modes.push(ModeLabel::new(s, pol, tag));
            }
        }
    }
    modes
}

/// A creation-operator polynomial: each term is a coefficient times a
/// product of single-mode creation operators.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Creation {
    pub terms: Vec<(Complex64, Vec<ModeLabel>)>,
}

impl Creation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(mut self, coefficient: Complex64, modes: &[ModeLabel]) -> Self {
        self.terms.push((coefficient, modes.to_vec()));
        self
    }

    /// Product of two polynomials.
    pub fn times(&self, other: &Creation) -> Creation {
        let mut terms = Vec::new();
        for (a, ma) in &self.terms {
            for (b, mb) in &other.terms {
                let mut modes = ma.clone();
                modes.extend_from_slice(mb);
                terms.push((a * b, modes));
            }
        }
        Creation { terms }
    }

    pub fn scaled(&self, s: Complex64) -> Creation {
        Creation {
            terms: self.terms.iter().map(|(c, m)| (c * s, m.clone())).collect(),
        }
    }

    pub fn max_photons(&self) -> usize {
        self.terms.iter().map(|(_, m)| m.len()).max().unwrap_or(0)
    }
}

fn factorial_sqrt(n: u8) -> f64 {
    (1..=n as u32).map(|k| k as f64).product::<f64>().sqrt()
}

/// A state in the occupation-number basis over a fixed mode register.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    modes: Vec<ModeLabel>,
    terms: BTreeMap<Vec<u8>, Complex64>,
    truncation: usize,
    leakage: f64,
}

impl FockState {
    pub fn vacuum(modes: Vec<ModeLabel>, truncation: usize) -> Result<Self> {
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(Error::InvalidParameter(format!("mode {m:?} listed twice")));
            }
        }
        if modes.len() > u8::MAX as usize {
            return Err(Error::Dimension("too many modes".into()));
        }
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; modes.len()], Complex64::new(1.0, 0.0));
        Ok(Self {
            modes,
            terms,
            truncation,
            leakage: 0.0,
        })
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u8>, Complex64> {
        &self.terms
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Norm discarded by truncation so far.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    pub fn mode_index(&self, mode: ModeLabel) -> Result<usize> {
        self.modes
            .iter()
            .position(|&m| m == mode)
            .ok_or_else(|| Error::UnknownMode(format!("{mode:?}")))
    }

    pub fn has_spatial(&self, spatial: u8) -> bool {
        self.modes.iter().any(|m| m.spatial == spatial)
    }

    /// Amplitude of the occupation pattern given as (mode, count) pairs.
    pub fn amplitude(&self, occupied: &[(ModeLabel, u8)]) -> Result<Complex64> {
        let mut key = vec![0u8; self.modes.len()];
        for &(mode, n) in occupied {
            key[self.mode_index(mode)?] += n;
        }
        Ok(self.terms.get(&key).copied().unwrap_or(ZERO))
    }

    /// Photon count in spatial mode `spatial` for occupation `key`.
    pub fn spatial_count(&self, key: &[u8], spatial: u8) -> u8 {
        key.iter()
            .zip(&self.modes)
            .filter(|(_, m)| m.spatial == spatial)
            .map(|(n, _)| n)
            .sum()
    }

    pub fn scaled(mut self, s: f64) -> Self {
        for a in self.terms.values_mut() {
            *a *= s;
        }
        self
    }

    pub fn normalized(self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n < 1e-300 {
            return Err(Error::DegenerateInput("Fock state has zero norm".into()));
        }
        Ok(self.scaled(1.0 / n))
    }

    /// Adds the amplitudes of `other`, which must share the mode register.
    pub fn add_assign(&mut self, other: &FockState) -> Result<()> {
        if other.modes != self.modes {
            return Err(Error::InvalidParameter(
                "Fock states over different registers".into(),
            ));
        }
        for (k, a) in &other.terms {
            *self.terms.entry(k.clone()).or_insert(ZERO) += a;
        }
        self.leakage += other.leakage;
        Ok(())
    }

    /// Applies a creation-operator polynomial. Components above the
    /// truncation limit are an error, since dropping them would silently
    /// change the physics.
    pub fn create(&self, op: &Creation) -> Result<Self> {
        let mut indices = Vec::with_capacity(op.terms.len());
        for (c, modes) in &op.terms {
            let idx = modes
                .iter()
                .map(|&m| self.mode_index(m))
                .collect::<Result<Vec<_>>>()?;
            indices.push((*c, idx));
        }
        let mut out: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
        for (key, amp) in &self.terms {
            let present: usize = key.iter().map(|&n| n as usize).sum();
            for (c, idx) in &indices {
                if present + idx.len() > self.truncation {
                    return Err(Error::Configuration(format!(
                        "{} photons exceed the truncation limit {}",
                        present + idx.len(),
                        self.truncation
                    )));
                }
                let mut next = key.clone();
                let mut factor = 1.0;
                for &i in idx {
                    next[i] += 1;
                    factor *= (next[i] as f64).sqrt();
                }
                *out.entry(next).or_insert(ZERO) += amp * c * factor;
            }
        }
        out.retain(|_, a| a.norm_sqr() > PRUNE);
        Ok(Self {
            terms: out,
            ..self.clone()
        })
    }

    /// Applies a passive linear map given per input mode as a list of
    /// (output mode, amplitude). Modes absent from the map are untouched.
    pub fn apply_linear(&self, map: &BTreeMap<usize, Vec<(usize, Complex64)>>) -> Self {
        let mut out: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
        let identity = |i: usize| vec![(i, Complex64::new(1.0, 0.0))];
        for (key, amp) in &self.terms {
            let mut photons = Vec::new();
            let mut norm = 1.0;
            for (i, &n) in key.iter().enumerate() {
                for _ in 0..n {
                    photons.push(i);
                }
                norm /= factorial_sqrt(n);
            }
            let routes: Vec<Vec<(usize, Complex64)>> = photons
                .iter()
                .map(|&i| map.get(&i).cloned().unwrap_or_else(|| identity(i)))
                .collect();
            let mut next = vec![0u8; key.len()];
            expand(&routes, 0, *amp * norm, &mut next, &mut out);
        }
        out.retain(|_, a| a.norm_sqr() > PRUNE);
        Self {
            terms: out,
            ..self.clone()
        }
    }

    /// Keeps only occupation patterns satisfying `keep`; returns the
    /// unnormalised remainder.
    pub fn filter(&self, mut keep: impl FnMut(&[u8]) -> bool) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| keep(k))
            .map(|(k, a)| (k.clone(), *a))
            .collect();
        Self {
            terms,
            ..self.clone()
        }
    }

    /// Projects spatial mode `spatial` onto exactly one photon with
    /// polarization `jones` and removes that photon. The detector does not
    /// resolve tags, so the result is one unnormalised branch per tag.
    pub fn detect(&self, spatial: u8, jones: [Complex64; 2]) -> Result<Vec<FockState>> {
        if !self.has_spatial(spatial) {
            return Err(Error::UnknownMode(format!("spatial mode {spatial}")));
        }
        let mut tags: Vec<u8> = self
            .modes
            .iter()
            .filter(|m| m.spatial == spatial)
            .map(|m| m.tag)
            .collect();
        tags.sort_unstable();
        tags.dedup();
        let mut branches = Vec::new();
        for tag in tags {
            let mut out: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
            for (key, amp) in &self.terms {
                if self.spatial_count(key, spatial) != 1 {
                    continue;
                }
                for (i, m) in self.modes.iter().enumerate() {
                    if m.spatial == spatial && m.tag == tag && key[i] == 1 {
                        let mut next = key.clone();
                        next[i] = 0;
                        *out.entry(next).or_insert(ZERO) +=
                            amp * jones[m.polarization.index()].conj();
                    }
                }
            }
            out.retain(|_, a| a.norm_sqr() > PRUNE);
            if !out.is_empty() {
                branches.push(Self {
                    terms: out,
                    ..self.clone()
                });
            }
        }
        Ok(branches)
    }

    /// Polarization density matrix of the photons in the listed spatial
    /// modes, one photon per mode, tags traced out. Every term must hold
    /// exactly one photon in each listed mode and none elsewhere. The result
    /// is unnormalised (trace = norm²); qubit order follows `spatial`.
    pub fn polarization_density(&self, spatial: &[u8]) -> Result<ComplexMatrix> {
        let k = spatial.len();
        let dim = 1usize << k;
        // Group amplitudes by the tag pattern, which is traced over.
        let mut by_tags: BTreeMap<Vec<u8>, Vec<Complex64>> = BTreeMap::new();
        for (key, amp) in &self.terms {
            let mut index = 0usize;
            let mut tags = Vec::with_capacity(k);
            let mut found = 0usize;
            for (slot, &s) in spatial.iter().enumerate() {
                let mut hit = None;
                for (i, m) in self.modes.iter().enumerate() {
                    if m.spatial == s && key[i] > 0 {
                        if key[i] > 1 || hit.is_some() {
                            return Err(Error::InvalidState(format!(
                                "spatial mode {s} holds several photons"
                            )));
                        }
                        hit = Some(*m);
                    }
                }
                let m =
                    hit.ok_or_else(|| Error::InvalidState(format!("spatial mode {s} is empty")))?;
                found += 1;
                tags.push(m.tag);
                if m.polarization == Polarization::V {
                    index |= 1 << (k - 1 - slot);
                }
            }
            let total: usize = key.iter().map(|&n| n as usize).sum();
            if total != found {
                return Err(Error::InvalidState(
                    "photons outside the analysed modes".into(),
                ));
            }
            by_tags.entry(tags).or_insert_with(|| vec![ZERO; dim])[index] += amp;
        }
        let mut rho = ComplexMatrix::zeros(dim, dim);
        for psi in by_tags.values() {
            for i in 0..dim {
                for j in 0..dim {
                    rho[(i, j)] += psi[i] * psi[j].conj();
                }
            }
        }
        Ok(rho)
    }
}

fn expand(
    routes: &[Vec<(usize, Complex64)>],
    depth: usize,
    amp: Complex64,
    occupation: &mut Vec<u8>,
    out: &mut BTreeMap<Vec<u8>, Complex64>,
) {
    if amp.norm_sqr() < PRUNE {
        return;
    }
    if depth == routes.len() {
        let factor: f64 = occupation.iter().map(|&n| factorial_sqrt(n)).product();
        *out.entry(occupation.clone()).or_insert(ZERO) += amp * factor;
        return;
    }
    for &(target, u) in &routes[depth] {
        occupation[target] += 1;
        expand(routes, depth + 1, amp * u, occupation, out);
        occupation[target] -= 1;
    }
}

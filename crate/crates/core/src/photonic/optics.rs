//! Passive optical elements and their action on [`FockState`]s.
//!
//! Convention: a beam splitter transmits with real amplitude `t` and reflects
//! with `i·r`. Port `a` continues into output `a` on transmission and into
//! output `b` on reflection, and vice versa. Jones vectors are `(H, V)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};
#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use num_complex::Complex64;

use super::fock::{FockState, ModeLabel, Polarization};
use crate::qmat::{c64, ComplexMatrix, I, ONE, ZERO};
use crate::{Error, Result};

pub type Jones = [Complex64; 2];
pub type Jones2 = [[Complex64; 2]; 2];

pub const H: Jones = [ONE, ZERO];
pub const V: Jones = [ZERO, ONE];
pub const DIAGONAL: Jones = [c64(FRAC_1_SQRT_2, 0.0), c64(FRAC_1_SQRT_2, 0.0)];
pub const ANTIDIAGONAL: Jones = [c64(FRAC_1_SQRT_2, 0.0), c64(-FRAC_1_SQRT_2, 0.0)];

/// Basis a polarizing beam splitter separates; the first state is transmitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbsBasis {
    /// Transmits H, reflects V.
    Rectilinear,
    /// Transmits +, reflects −.
    Diagonal,
}

impl PbsBasis {
    fn states(self) -> (Jones, Jones) {
        match self {
            PbsBasis::Rectilinear => (H, V),
            PbsBasis::Diagonal => (DIAGONAL, ANTIDIAGONAL),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OpticalElement {
    /// Polarization-dependent splitter between spatial modes `a` and `b`
    /// with real transmission amplitudes `t_h`, `t_v` in `[0, 1]`.
    BeamSplitter {
        a: u8,
        b: u8,
        t_h: f64,
        t_v: f64,
    },
    /// Birefringent plate on mode `mode`: retardance `retardance`, fast axis
    /// at `angle` from horizontal.
    WavePlate {
        mode: u8,
        retardance: f64,
        angle: f64,
    },
    Pbs {
        a: u8,
        b: u8,
        basis: PbsBasis,
    },
    /// Polarization-independent phase `e^{iφ}` on mode `mode`.
    PhaseShifter {
        mode: u8,
        phase: f64,
    },
}

impl OpticalElement {
    pub fn beam_splitter(a: u8, b: u8, t_h: f64, t_v: f64) -> Self {
        OpticalElement::BeamSplitter { a, b, t_h, t_v }
    }

    pub fn hwp(mode: u8, angle: f64) -> Self {
        OpticalElement::WavePlate {
            mode,
            retardance: PI,
            angle,
        }
    }

    pub fn qwp(mode: u8, angle: f64) -> Self {
        OpticalElement::WavePlate {
            mode,
            retardance: PI / 2.0,
            angle,
        }
    }

    pub fn pbs(a: u8, b: u8, basis: PbsBasis) -> Self {
        OpticalElement::Pbs { a, b, basis }
    }

    pub fn phase(mode: u8, phase: f64) -> Self {
        OpticalElement::PhaseShifter { mode, phase }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            OpticalElement::BeamSplitter { a, b, t_h, t_v } => {
                if a == b {
                    return Err(Error::InvalidParameter(
                        "beam splitter needs two distinct modes".into(),
                    ));
                }
                for t in [t_h, t_v] {
                    if !(0.0..=1.0).contains(&t) {
                        return Err(Error::InvalidParameter(format!(
                            "transmission amplitude {t} outside [0, 1]"
                        )));
                    }
                }
            }
            OpticalElement::Pbs { a, b, .. } if a == b => {
                return Err(Error::InvalidParameter(
                    "PBS needs two distinct modes".into(),
                ));
            }
            OpticalElement::WavePlate {
                retardance, angle, ..
            } if !(retardance.is_finite() && angle.is_finite()) => {
                return Err(Error::NonFinite);
            }
            _ => {}
        }
        Ok(())
    }

    /// Spatial transfer: for input spatial mode `s`, the list of
    /// (output spatial mode, polarization matrix) it feeds.
    fn transfer(&self, s: u8) -> Option<Vec<(u8, Jones2)>> {
        match *self {
            OpticalElement::BeamSplitter { a, b, t_h, t_v } if s == a || s == b => {
                let other = if s == a { b } else { a };
                let r_h = (1.0 - t_h * t_h).max(0.0).sqrt();
                let r_v = (1.0 - t_v * t_v).max(0.0).sqrt();
                let trans = [[c64(t_h, 0.0), ZERO], [ZERO, c64(t_v, 0.0)]];
                let refl = [[I * r_h, ZERO], [ZERO, I * r_v]];
                Some(vec![(s, trans), (other, refl)])
            }
            OpticalElement::Pbs { a, b, basis } if s == a || s == b => {
                let other = if s == a { b } else { a };
                let (p, q) = basis.states();
                let pass = outer(p, p);
                let block = outer(q, q);
                let block = [
                    [I * block[0][0], I * block[0][1]],
                    [I * block[1][0], I * block[1][1]],
                ];
                Some(vec![(s, pass), (other, block)])
            }
            OpticalElement::WavePlate {
                mode,
                retardance,
                angle,
            } if s == mode => Some(vec![(s, retarder(retardance, angle))]),
            OpticalElement::PhaseShifter { mode, phase } if s == mode => {
                let e = Complex64::from_polar(1.0, phase);
                Some(vec![(s, [[e, ZERO], [ZERO, e]])])
            }
            _ => None,
        }
    }

    fn spatial_modes(&self) -> Vec<u8> {
        match *self {
            OpticalElement::BeamSplitter { a, b, .. } | OpticalElement::Pbs { a, b, .. } => {
                vec![a, b]
            }
            OpticalElement::WavePlate { mode, .. } | OpticalElement::PhaseShifter { mode, .. } => {
                vec![mode]
            }
        }
    }
}

fn outer(a: Jones, b: Jones) -> Jones2 {
    [
        [a[0] * b[0].conj(), a[0] * b[1].conj()],
        [a[1] * b[0].conj(), a[1] * b[1].conj()],
    ]
}

/// Jones matrix of a retarder: `Rot(α) · diag(1, e^{iδ}) · Rot(−α)`.
/// A half-wave plate at angle α is `[[cos 2α, sin 2α], [sin 2α, −cos 2α]]`.
pub fn retarder(retardance: f64, angle: f64) -> Jones2 {
    let (s, c) = angle.sin_cos();
    let e = Complex64::from_polar(1.0, retardance);
    [
        [c64(c * c, 0.0) + e * s * s, (ONE - e) * c * s],
        [(ONE - e) * c * s, c64(s * s, 0.0) + e * c * c],
    ]
}

pub fn jones_to_matrix(j: &Jones2) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |r, c| j[r][c])
}

/// Single-photon transfer matrix of `elem` restricted to the register, as
/// a sparse per-mode map.
fn mode_map(
    state: &FockState,
    elem: &OpticalElement,
) -> Result<BTreeMap<usize, Vec<(usize, Complex64)>>> {
    let mut map = BTreeMap::new();
    for (i, m) in state.modes().iter().enumerate() {
        let Some(routes) = elem.transfer(m.spatial) else {
            continue;
        };
        let mut outs = Vec::new();
        for (spatial, jm) in routes {
            for pol in Polarization::BOTH {
                let amp = jm[pol.index()][m.polarization.index()];
                if amp.norm_sqr() > 0.0 {
                    let target = state.mode_index(ModeLabel::new(spatial, pol, m.tag))?;
                    outs.push((target, amp));
                }
            }
        }
        map.insert(i, outs);
    }
    Ok(map)
}

/// Applies one element. The number of photons is conserved, so the norm is
/// too; the leakage counter is carried through unchanged.
pub fn apply_element(state: &FockState, elem: &OpticalElement) -> Result<FockState> {
    elem.validate()?;
    for s in elem.spatial_modes() {
        if !state.has_spatial(s) {
            return Err(Error::UnknownMode(format!("spatial mode {s}")));
        }
    }
    Ok(state.apply_linear(&mode_map(state, elem)?))
}

pub fn apply_all(state: &FockState, elements: &[OpticalElement]) -> Result<FockState> {
    elements
        .iter()
        .try_fold(state.clone(), |s, e| apply_element(&s, e))
}

/// Wave plates (and a phase shifter for the global phase) realising the
/// 2×2 unitary `u` on spatial mode `mode`, via
/// `u = e^{iφ} · diag(1, e^{iβ}) · R_y(γ) · diag(1, e^{iδ})`.
/// `R_y(γ)` is a half-wave plate at 0 followed by one at `γ/4`; the
/// diagonal factors are retarders with their axis horizontal.
pub fn polarization_unitary(mode: u8, u: &ComplexMatrix) -> Result<Vec<OpticalElement>> {
    if u.rows() != 2 || !u.is_unitary(1e-10) {
        return Err(Error::InvalidParameter(
            "polarization transform must be a 2x2 unitary".into(),
        ));
    }
    let (a, b, c, d) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    let gamma = 2.0 * c.norm().atan2(a.norm());
    let eps = 1e-12;
    let (phi, beta, delta) = if a.norm() > eps && c.norm() > eps {
        let phi = a.arg();
        (phi, c.arg() - phi, (-b).arg() - phi)
    } else if a.norm() <= eps {
        let phi = c.arg();
        (phi, 0.0, (-b).arg() - phi)
    } else {
        let phi = a.arg();
        (phi, d.arg() - phi, 0.0)
    };
    Ok(vec![
        OpticalElement::WavePlate {
            mode,
            retardance: delta,
            angle: 0.0,
        },
        OpticalElement::hwp(mode, 0.0),
        OpticalElement::hwp(mode, gamma / 4.0),
        OpticalElement::WavePlate {
            mode,
            retardance: beta,
            angle: 0.0,
        },
        OpticalElement::phase(mode, phi),
    ])
}

/// `R_y(θ)` on mode `mode` as two half-wave plates.
pub fn ry_plates(mode: u8, theta: f64) -> Vec<OpticalElement> {
    vec![
        OpticalElement::hwp(mode, 0.0),
        OpticalElement::hwp(mode, theta / 4.0),
    ]
}

/// Product of the Jones matrices of single-mode elements acting on `mode`,
/// in application order.
pub fn jones_product(elements: &[OpticalElement], mode: u8) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::identity(2);
    for e in elements {
        let Some(routes) = e.transfer(mode) else {
            continue;
        };
        if routes.len() != 1 || routes[0].0 != mode {
            return Err(Error::InvalidParameter(
                "element couples spatial modes".into(),
            ));
        }
        m = &jones_to_matrix(&routes[0].1) * &m;
    }
    Ok(m)
}

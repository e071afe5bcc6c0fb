//! Two-pass down-conversion source.
//!
//! The forward pass emits a pair into the control and target paths, both
//! horizontally polarised after the polarizer (wave plates downstream
//! prepare the logical inputs). The backward pass emits a polarization
//! entangled pair into the two ancilla paths.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use super::fock::{register, Creation, FockState, ModeLabel, Polarization};
use crate::qmat::{c64, ONE};
use crate::{Error, Result};

/// Spatial paths of the setup.
pub mod ports {
    pub const CONTROL: u8 = 0;
    pub const TARGET: u8 = 1;
    /// Ancilla path meeting the control; ends at the ± analysed detector.
    pub const ANCILLA_C: u8 = 2;
    /// Ancilla path meeting the target; ends at the H/V analysed detector.
    pub const ANCILLA_T: u8 = 3;
    pub const LOSS_C: u8 = 4;
    pub const LOSS_T: u8 = 5;
    pub const ALL: [u8; 6] = [CONTROL, TARGET, ANCILLA_C, ANCILLA_T, LOSS_C, LOSS_T];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emission {
    ForwardPair,
    BackwardEntangled,
}

/// Polarization correlation of one backward pair. A dephased pair is an
/// equal mixture of the two product terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairCorrelation {
    Entangled,
    BothH,
    BothV,
}

fn mode(spatial: u8, pol: Polarization, tag: u8) -> ModeLabel {
    ModeLabel::new(spatial, pol, tag)
}

/// Creation operator of one forward pair.
pub fn forward_pair(tag: u8) -> Creation {
    Creation::new().term(
        ONE,
        &[
            mode(ports::CONTROL, Polarization::H, tag),
            mode(ports::TARGET, Polarization::H, tag),
        ],
    )
}

/// Creation operator of one backward pair; `Entangled` gives `|Φ⁺⟩`.
pub fn backward_pair(correlation: PairCorrelation, tag: u8) -> Creation {
    let (a, b) = (ports::ANCILLA_C, ports::ANCILLA_T);
    let hh = [mode(a, Polarization::H, tag), mode(b, Polarization::H, tag)];
    let vv = [mode(a, Polarization::V, tag), mode(b, Polarization::V, tag)];
    match correlation {
        PairCorrelation::Entangled => {
            let s = c64(FRAC_1_SQRT_2, 0.0);
            Creation::new().term(s, &hh).term(s, &vv)
        }
        PairCorrelation::BothH => Creation::new().term(ONE, &hh),
        PairCorrelation::BothV => Creation::new().term(ONE, &vv),
    }
}

/// `|0⟩ + εP† + (εP†)²/2! + …` up to `order` pairs, normalised.
pub fn spdc_source(
    epsilon: f64,
    emission: Emission,
    order: usize,
    truncation: usize,
) -> Result<FockState> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "pair amplitude {epsilon} must be finite and >= 0"
        )));
    }
    if 2 * order > truncation {
        return Err(Error::Configuration(format!(
            "{order} pairs need {} photons but truncation is {truncation}",
            2 * order
        )));
    }
    let pair = match emission {
        Emission::ForwardPair => forward_pair(0),
        Emission::BackwardEntangled => backward_pair(PairCorrelation::Entangled, 0),
    };
    let vacuum = FockState::vacuum(register(&ports::ALL, 1), truncation)?;
    let mut terms: Vec<FockState> = Vec::with_capacity(order + 1);
    terms.push(vacuum);
    for k in 1..=order {
        let next = terms[k - 1].create(&pair.scaled(c64(epsilon / k as f64, 0.0)))?;
        terms.push(next);
    }
    let mut total = terms[0].clone();
    for t in &terms[1..] {
        total.add_assign(t)?;
    }
    total.normalized()
}

//! Random-access-code witness `W1` and determinant witness `W2`.
//!
//! Both are evaluated on an accessor `p(x, s)` giving the probability of
//! outcome `+1` for preparation `x` and setting `s`. For the Alice-Bob pair
//! the setting is Bob's `y`; for Alice-Charlie it is Charlie's `z`.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{p_bob, p_bob_given_z, p_charlie, ProbTable, Scenario};
use crate::weak_channel::WeakCoupling;

/// Largest classical value of `W1`.
pub const W1_CLASSICAL_BOUND: f64 = 2.0;
/// Largest qubit value of `W1`.
pub const W1_QUANTUM_BOUND: f64 = 2.0 * SQRT_2;
/// Classical value of `W2`.
pub const W2_CLASSICAL_BOUND: f64 = 0.0;
/// Largest qubit value of `|W2|`.
pub const W2_QUANTUM_BOUND: f64 = 1.0;
/// Slack used when comparing against the bounds.
pub const BOUND_TOL: f64 = 1e-9;

/// Sign of `p(+1 | x, s)` in `W1`, indexed `[x][s]`.
pub const W1_COEFFICIENTS: [[f64; 2]; 4] = [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    W1,
    W2,
}

impl WitnessKind {
    pub fn quantum_bound(self) -> f64 {
        match self {
            WitnessKind::W1 => W1_QUANTUM_BOUND,
            WitnessKind::W2 => W2_QUANTUM_BOUND,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pair {
    AB,
    AC,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessValue {
    pub kind: WitnessKind,
    pub pair: Pair,
    /// `Some(z)` for the Bob-side witness conditioned on Charlie's setting.
    pub conditioning: Option<usize>,
    pub value: f64,
}

impl WitnessValue {
    pub fn violation(&self) -> Violation {
        violation(self.kind, self.value)
    }
}

pub fn w1(p: impl Fn(usize, usize) -> f64) -> f64 {
    let mut acc = 0.0;
    for (x, row) in W1_COEFFICIENTS.iter().enumerate() {
        for (s, coef) in row.iter().enumerate() {
            acc += coef * p(x, s);
        }
    }
    acc
}

/// `det [[p(00,0) - p(01,0), p(10,0) - p(11,0)], [p(00,1) - p(01,1), p(10,1) - p(11,1)]]`,
/// signed.
pub fn w2(p: impl Fn(usize, usize) -> f64) -> f64 {
    let entry = |s: usize, first: usize| p(first, s) - p(first + 1, s);
    entry(0, 0) * entry(1, 2) - entry(0, 2) * entry(1, 0)
}

fn apply(kind: WitnessKind, p: impl Fn(usize, usize) -> f64) -> f64 {
    match kind {
        WitnessKind::W1 => w1(p),
        WitnessKind::W2 => w2(p),
    }
}

/// Witness of one pair read off a probability table.
pub fn evaluate(table: &ProbTable, kind: WitnessKind, pair: Pair) -> WitnessValue {
    let value = match pair {
        Pair::AB => apply(kind, |x, y| table.bob(x, y)[0]),
        Pair::AC => apply(kind, |x, z| table.charlie(x, z)[0]),
    };
    WitnessValue { kind, pair, conditioning: None, value }
}

/// Witness of one pair computed straight from the marginal channels, without
/// building the full joint table.
pub fn evaluate_scenario(s: &Scenario, eps: WeakCoupling, kind: WitnessKind, pair: Pair) -> f64 {
    match pair {
        Pair::AB => {
            let table = marginal_grid(|x, y| p_bob(s, eps, x, y)[0]);
            apply(kind, |x, y| table[x][y])
        }
        Pair::AC => {
            let table = marginal_grid(|x, z| p_charlie(s, eps, x, z)[0]);
            apply(kind, |x, z| table[x][z])
        }
    }
}

/// Bob-side witness at fixed Charlie setting `z`, straight from the channel.
pub fn evaluate_scenario_given_z(s: &Scenario, eps: WeakCoupling, kind: WitnessKind, z: usize) -> f64 {
    let table = marginal_grid(|x, y| p_bob_given_z(s, eps, x, y, z)[0]);
    apply(kind, |x, y| table[x][y])
}

fn marginal_grid(f: impl Fn(usize, usize) -> f64) -> [[f64; 2]; 4] {
    let mut out = [[0.0; 2]; 4];
    for (x, row) in out.iter_mut().enumerate() {
        for (s, v) in row.iter_mut().enumerate() {
            *v = f(x, s);
        }
    }
    out
}

pub fn w1_given_z(table: &ProbTable, z: usize) -> WitnessValue {
    WitnessValue {
        kind: WitnessKind::W1,
        pair: Pair::AB,
        conditioning: Some(z),
        value: w1(|x, y| table.bob_given_z(x, y, z)[0]),
    }
}

pub fn w2_given_z(table: &ProbTable, z: usize) -> WitnessValue {
    WitnessValue {
        kind: WitnessKind::W2,
        pair: Pair::AB,
        conditioning: Some(z),
        value: w2(|x, y| table.bob_given_z(x, y, z)[0]),
    }
}

/// Analytic witness curves of the canonical scenarios.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClosedForm {
    W1AB,
    W1AC,
    W2AB,
    W2AC,
    /// `W1` between Alice and Bob at either fixed `z`.
    W1ABz,
    /// `W2` between Alice and Bob at either fixed `z`.
    W2ABz,
}

impl ClosedForm {
    pub const ALL: [ClosedForm; 6] =
        [ClosedForm::W1AB, ClosedForm::W1AC, ClosedForm::W2AB, ClosedForm::W2AC, ClosedForm::W1ABz, ClosedForm::W2ABz];

    pub fn name(self) -> &'static str {
        match self {
            ClosedForm::W1AB => "w1_ab",
            ClosedForm::W1AC => "w1_ac",
            ClosedForm::W2AB => "w2_ab",
            ClosedForm::W2AC => "w2_ac",
            ClosedForm::W1ABz => "w1_ab_z",
            ClosedForm::W2ABz => "w2_ab_z",
        }
    }
}

pub fn closed_form(kind: ClosedForm, eps: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::PI).contains(&eps) {
        return Err(Error::Domain(format!("epsilon {eps} outside [0, pi]")));
    }
    let (s, c) = eps.sin_cos();
    Ok(match kind {
        ClosedForm::W1AB => SQRT_2 * (c + 1.0),
        ClosedForm::W1AC => 2.0 * SQRT_2 * s * s,
        ClosedForm::W2AB => (0.5 * c + 0.5).powi(2),
        ClosedForm::W2AC => s.powi(4),
        ClosedForm::W1ABz => SQRT_2 * c + SQRT_2,
        ClosedForm::W2ABz => c,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub violated: bool,
    /// Signed distance past the classical bound; positive when violated.
    pub margin: f64,
}

pub fn violation(kind: WitnessKind, value: f64) -> Violation {
    let margin = match kind {
        WitnessKind::W1 => value - W1_CLASSICAL_BOUND,
        WitnessKind::W2 => value.abs() - W2_CLASSICAL_BOUND,
    };
    Violation { violated: margin > BOUND_TOL, margin }
}

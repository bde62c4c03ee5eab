//! Sweeps, reports and the verification suite behind the `seqwit` CLI.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::explore::find_violation_window;
use crate::oracle;
use crate::qubit_algebra::bloch_to_density;
use crate::randomness::{
    bob_certified, bob_certified_from_table, charlie_certified, h_from_w1, hmin_global_bound, hmin_global_exact,
    hmin_local_bob_given_z,
};
use crate::scenario::{
    build_table, canonical_w1_scenario, canonical_w2_scenario, p_bob, p_bob_given_z, p_charlie, x_label, Outcome,
    ProbTable, Scenario, N_PREPARATIONS, N_SETTINGS,
};
use crate::weak_channel::{bob_state, charlie_state, marginals_via_joint, WeakCoupling};
use crate::witness::{closed_form, evaluate, w1_given_z, w2_given_z, ClosedForm, Pair, WitnessKind};

/// Scientific notation with 12 significant digits.
pub fn fmt_sci(v: f64) -> String {
    format!("{v:.11e}")
}

/// `v` rounded to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    fmt_sci(v).parse().unwrap_or(v)
}

/// `steps` uniformly spaced points from `start` to `end`, both included.
pub fn grid(start: f64, end: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::Config(format!("steps must be at least 2, got {steps}")));
    }
    if !(0.0 <= start && start < end && end <= PI) {
        return Err(Error::Config(format!("need 0 <= eps_start < eps_end <= pi, got [{start}, {end}]")));
    }
    let n = (steps - 1) as f64;
    Ok((0..steps).map(|i| if i + 1 == steps { end } else { start + (end - start) * i as f64 / n }).collect())
}

/// One row of the sweep CSV.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub w1_ab: f64,
    pub w1_ac: f64,
    pub w2_ab: f64,
    pub w2_ac: f64,
    pub w1_ab_z0: f64,
    pub w2_ab_z0: f64,
    pub h_bob_w1: f64,
    pub h_bob_w2: f64,
    pub h_charlie: f64,
    pub hmin_global_exact: f64,
    pub hmin_global_bound: f64,
}

impl SweepRow {
    pub const HEADER: [&'static str; 12] = [
        "epsilon",
        "w1_ab",
        "w1_ac",
        "w2_ab",
        "w2_ac",
        "w1_ab_z0",
        "w2_ab_z0",
        "h_bob_w1",
        "h_bob_w2",
        "h_charlie",
        "hmin_global_exact",
        "hmin_global_bound",
    ];

    pub fn evaluate(t: &ProbTable) -> Result<Self> {
        Ok(SweepRow {
            epsilon: t.eps().epsilon(),
            w1_ab: evaluate(t, WitnessKind::W1, Pair::AB).value,
            w1_ac: evaluate(t, WitnessKind::W1, Pair::AC).value,
            w2_ab: evaluate(t, WitnessKind::W2, Pair::AB).value,
            w2_ac: evaluate(t, WitnessKind::W2, Pair::AC).value,
            w1_ab_z0: w1_given_z(t, 0).value,
            w2_ab_z0: w2_given_z(t, 0).value,
            h_bob_w1: bob_certified_from_table(t, WitnessKind::W1)?,
            h_bob_w2: bob_certified_from_table(t, WitnessKind::W2)?,
            h_charlie: h_from_w1(evaluate(t, WitnessKind::W1, Pair::AC).value)?,
            hmin_global_exact: hmin_global_exact(t),
            hmin_global_bound: hmin_global_bound(t),
        })
    }

    pub fn values(&self) -> [f64; 12] {
        [
            self.epsilon,
            self.w1_ab,
            self.w1_ac,
            self.w2_ab,
            self.w2_ac,
            self.w1_ab_z0,
            self.w2_ab_z0,
            self.h_bob_w1,
            self.h_bob_w2,
            self.h_charlie,
            self.hmin_global_exact,
            self.hmin_global_bound,
        ]
    }
}

pub fn run_sweep(s: &Scenario, start: f64, end: f64, steps: usize) -> Result<Vec<SweepRow>> {
    let points = grid(start, end, steps)?;
    points.par_iter().map(|&e| SweepRow::evaluate(&build_table(s, WeakCoupling::new(e)?))).collect()
}

/// Writes rows as CSV: a header line, then numbers in [`fmt_sci`] form.
pub fn write_csv<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.iter().map(|v| fmt_sci(*v))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    write_csv(out, &SweepRow::HEADER, rows.iter().map(|r| r.values().to_vec()))
}

/// Canonical certified-rate curves: Bob with `W1` and `W2` settings, Charlie.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateRow {
    pub epsilon: f64,
    pub h_bob_w1: f64,
    pub h_bob_w2: f64,
    pub h_charlie: f64,
}

impl RateRow {
    pub const HEADER: [&'static str; 4] = ["epsilon", "h_bob_w1", "h_bob_w2", "h_charlie"];

    pub fn values(&self) -> Vec<f64> {
        vec![self.epsilon, self.h_bob_w1, self.h_bob_w2, self.h_charlie]
    }
}

pub fn run_rates(start: f64, end: f64, steps: usize) -> Result<Vec<RateRow>> {
    grid(start, end, steps)?
        .into_iter()
        .map(|e| {
            Ok(RateRow {
                epsilon: e,
                h_bob_w1: bob_certified(e, WitnessKind::W1)?,
                h_bob_w2: bob_certified(e, WitnessKind::W2)?,
                h_charlie: charlie_certified(e)?,
            })
        })
        .collect()
}

/// The 64 joint probabilities keyed `"x=..,y=..,z=.."` then `"b=..,c=.."`.
pub fn table_json(t: &ProbTable) -> serde_json::Value {
    let mut cells = BTreeMap::new();
    for (x, y, z, cell) in t.cells() {
        let mut entry = BTreeMap::new();
        for b in Outcome::ALL {
            for c in Outcome::ALL {
                entry.insert(format!("b={},c={}", b.label(), c.label()), round12(cell[b.index()][c.index()]));
            }
        }
        cells.insert(format!("x={},y={},z={}", x_label(x), y, z), entry);
    }
    serde_json::json!({
        "epsilon": t.eps().epsilon(),
        "entries": cells,
    })
}

/// One line of the verification report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check_name: String,
    pub epsilon: f64,
    pub expected: f64,
    pub actual: f64,
    pub abs_error: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub tolerance: f64,
    pub grid_steps: usize,
    pub checks: Vec<CheckRecord>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Largest error over all checks.
    pub fn max_abs_error(&self) -> f64 {
        self.checks.iter().map(|c| c.abs_error).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let checks: Vec<_> = self
            .checks
            .iter()
            .map(|c| {
                serde_json::json!({
                    "check_name": c.check_name,
                    "epsilon": c.epsilon,
                    "expected": round12(c.expected),
                    "actual": round12(c.actual),
                    "abs_error": c.abs_error,
                    "pass": c.pass,
                })
            })
            .collect();
        serde_json::json!({
            "tolerance": self.tolerance,
            "grid_steps": self.grid_steps,
            "passed": self.passed(),
            "checks": checks,
        })
    }
}

struct Checks {
    tol: f64,
    records: Vec<CheckRecord>,
}

impl Checks {
    fn equal(&mut self, name: impl Into<String>, eps: f64, expected: f64, actual: f64) {
        let abs_error = (actual - expected).abs();
        self.records.push(CheckRecord {
            check_name: name.into(),
            epsilon: eps,
            expected,
            actual,
            abs_error,
            pass: abs_error <= self.tol,
        });
    }

    /// Records the worst `(expected, actual)` pair of a family.
    fn worst(&mut self, name: &str, eps: f64, pairs: impl IntoIterator<Item = (f64, f64)>) {
        let (expected, actual) =
            pairs.into_iter().max_by(|a, b| (a.1 - a.0).abs().total_cmp(&(b.1 - b.0).abs())).unwrap_or((0.0, 0.0));
        self.equal(name, eps, expected, actual);
    }

    /// Passes when `actual <= limit + tol`.
    fn at_most(&mut self, name: &str, eps: f64, limit: f64, actual: f64) {
        let abs_error = (actual - limit).max(0.0);
        self.records.push(CheckRecord {
            check_name: name.into(),
            epsilon: eps,
            expected: limit,
            actual,
            abs_error,
            pass: abs_error <= self.tol,
        });
    }
}

/// Compares the simulation with every closed form and checks the channel,
/// probability and entropy invariants on a grid over `[0, pi]`.
pub fn run_verify(grid_steps: usize, tolerance: f64) -> Result<VerifyReport> {
    if !(tolerance >= 0.0) {
        return Err(Error::Config(format!("tolerance {tolerance} must be non-negative")));
    }
    let points = grid(0.0, PI, grid_steps)?;
    let s1 = canonical_w1_scenario();
    let s2 = canonical_w2_scenario();

    let per_point: Vec<Vec<CheckRecord>> = points
        .par_iter()
        .map(|&e| {
            let mut c = Checks { tol: tolerance, records: Vec::new() };
            verify_point(&mut c, &s1, &s2, e)?;
            Ok(c.records)
        })
        .collect::<Result<_>>()?;

    let mut checks = Checks { tol: tolerance, records: per_point.into_iter().flatten().collect() };

    let window = find_violation_window(WitnessKind::W1, 1e-13)?;
    checks.equal("window_lo", window.lo, 2f64.powf(-0.25).asin(), window.lo);
    checks.equal("window_hi", window.hi, (SQRT_2 - 1.0).acos(), window.hi);

    Ok(VerifyReport { tolerance, grid_steps, checks: checks.records })
}

fn verify_point(c: &mut Checks, s1: &Scenario, s2: &Scenario, e: f64) -> Result<()> {
    let eps = WeakCoupling::new(e)?;
    let t1 = build_table(s1, eps);
    let t2 = build_table(s2, eps);

    c.equal("w1_ab", e, closed_form(ClosedForm::W1AB, e)?, evaluate(&t1, WitnessKind::W1, Pair::AB).value);
    c.equal("w1_ac", e, closed_form(ClosedForm::W1AC, e)?, evaluate(&t1, WitnessKind::W1, Pair::AC).value);
    c.equal("w2_ab", e, closed_form(ClosedForm::W2AB, e)?, evaluate(&t2, WitnessKind::W2, Pair::AB).value);
    c.equal("w2_ac", e, closed_form(ClosedForm::W2AC, e)?, evaluate(&t2, WitnessKind::W2, Pair::AC).value);
    for z in 0..N_SETTINGS {
        c.equal(format!("w1_ab_z{z}"), e, closed_form(ClosedForm::W1ABz, e)?, w1_given_z(&t1, z).value);
        c.equal(format!("w2_ab_z{z}"), e, closed_form(ClosedForm::W2ABz, e)?, w2_given_z(&t2, z).value);
    }

    for (name, s, t) in [("w1", s1, &t1), ("w2", s2, &t2)] {
        let mut bob_pairs = Vec::new();
        let mut charlie_pairs = Vec::new();
        let mut joint_pairs = Vec::new();
        let mut channel_pairs = Vec::new();
        for x in 0..N_PREPARATIONS {
            for z in 0..N_SETTINGS {
                charlie_pairs.push((oracle::charlie_plus(s, eps, x, z), p_charlie(s, eps, x, z)[0]));
                for y in 0..N_SETTINGS {
                    bob_pairs.push((oracle::bob_plus(s, eps, x, y, z), p_bob_given_z(s, eps, x, y, z)[0]));
                    bob_pairs.push((oracle::bob_plus(s, eps, x, y, z), t.bob_given_z(x, y, z)[0]));
                    charlie_pairs.push((oracle::charlie_plus(s, eps, x, z), t.charlie_given_y(x, y, z)[0]));
                    let reference = oracle::joint(s, eps, x, y, z);
                    let sim = t.joint(x, y, z);
                    for b in 0..2 {
                        for cc in 0..2 {
                            joint_pairs.push((reference[b][cc], sim[b][cc]));
                        }
                    }
                }
                let rho = bloch_to_density(&s.preparation(x))?;
                let axis = s.charlie_axis(z);
                let (b_ref, c_ref) = marginals_via_joint(&rho, &axis, eps);
                let b = bob_state(&rho, &axis, eps);
                let ch = charlie_state(&rho, &axis, eps);
                channel_pairs.push((0.0, b.matrix().max_abs_diff(&b_ref)));
                channel_pairs.push((0.0, ch.matrix().max_abs_diff(&c_ref)));
            }
            for y in 0..N_SETTINGS {
                let prior = s.z_prior();
                let averaged: f64 = (0..N_SETTINGS).map(|z| prior[z] * oracle::bob_plus(s, eps, x, y, z)).sum();
                bob_pairs.push((averaged, p_bob(s, eps, x, y)[0]));
            }
        }
        c.worst(&format!("{name}_bob_probabilities"), e, bob_pairs);
        c.worst(&format!("{name}_charlie_probabilities"), e, charlie_pairs);
        c.worst(&format!("{name}_joint_probabilities"), e, joint_pairs);
        c.worst(&format!("{name}_marginal_channels"), e, channel_pairs);

        let normalization = t.cells().map(|(.., cell)| (1.0, cell.iter().flatten().sum::<f64>()));
        c.worst(&format!("{name}_normalization"), e, normalization);

        c.at_most(&format!("{name}_bound_dominance"), e, hmin_global_exact(t), hmin_global_bound(t));
    }

    for (kind, t) in [(WitnessKind::W1, &t1), (WitnessKind::W2, &t2)] {
        let tag = if kind == WitnessKind::W1 { "w1" } else { "w2" };
        let certified = bob_certified(e, kind)?;
        c.equal(format!("{tag}_bob_certified"), e, certified, bob_certified_from_table(t, kind)?);
        for z in 0..N_SETTINGS {
            c.at_most(&format!("{tag}_certification_sound_z{z}"), e, hmin_local_bob_given_z(t, z), certified);
        }
    }
    Ok(())
}

//! Numerical searches: multi-start simplex optimization over scenario
//! settings, and bisection for the double-violation window.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubit_algebra::{Bloch3, UnitBloch3};
use crate::scenario::{canonical_w1_scenario, canonical_w2_scenario, Scenario};
use crate::weak_channel::{CharlieAxis, WeakCoupling};
use crate::witness::{evaluate_scenario, Pair, WitnessKind};

/// Which witness the optimizer maximizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Target {
    pub kind: WitnessKind,
    pub pair: Pair,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeConfig {
    pub target: Target,
    pub eps: WeakCoupling,
    pub restarts: usize,
    pub seed: u64,
    /// Simplex convergence threshold on the spread of objective values.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Search over mixed preparations (Bloch norm below one) as well.
    pub allow_mixed: bool,
}

impl OptimizeConfig {
    pub fn new(target: Target, eps: WeakCoupling) -> Self {
        OptimizeConfig { target, eps, restarts: 64, seed: 0, tolerance: 1e-9, max_iterations: 2000, allow_mixed: false }
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config(format!("tolerance {} must be positive", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeResult {
    pub scenario: Scenario,
    pub value: f64,
    /// Index of the restart that produced `value`.
    pub restart: usize,
    /// Whether that restart's simplex met the tolerance before running out
    /// of iterations.
    pub converged: bool,
    /// Largest objective value seen at any evaluated point, all restarts.
    pub max_evaluated: f64,
    pub evaluations: usize,
}

/// Result of one simplex run.
#[derive(Clone, Debug)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Downhill simplex minimization with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
///
/// Stops when the spread of values over the simplex drops below `tol` or
/// after `max_iter` iterations.
pub fn nelder_mead(mut f: impl FnMut(&[f64]) -> f64, start: &[f64], step: f64, tol: f64, max_iter: usize) -> Minimum {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += step;
        let v = f(&p);
        simplex.push((p, v));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (simplex[n].1 - simplex[0].1).abs() <= tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (p, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (w - c)).collect() };

        let reflected = along(-1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < simplex[n].1 {
            let p = along(-0.5);
            let v = f(&p);
            (p, v)
        } else {
            let p = along(0.5);
            let v = f(&p);
            (p, v)
        };
        if fc < fr.min(simplex[n].1) {
            simplex[n] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for (p, v) in simplex.iter_mut().skip(1) {
            for (x, b) in p.iter_mut().zip(&best) {
                *x = b + 0.5 * (*x - b);
            }
            *v = f(p);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (point, value) = simplex.swap_remove(0);
    Minimum { point, value, iterations, converged }
}

/// Angle layout of the search vector: 4 preparations, 2 Bob axes,
/// 2 Charlie axes, 1 ancilla axis, each as (polar, azimuth), followed by
/// 4 radius parameters when mixed preparations are allowed.
const N_AXES: usize = 9;

fn n_params(allow_mixed: bool) -> usize {
    2 * N_AXES + if allow_mixed { 4 } else { 0 }
}

fn decode(params: &[f64], allow_mixed: bool) -> Scenario {
    let axis = |i: usize| UnitBloch3::from_angles(params[2 * i], params[2 * i + 1]);
    let preparations = [0, 1, 2, 3].map(|x| {
        let u = axis(x).bloch();
        // radius in [0, 1]
        let r = if allow_mixed { 0.5 * (1.0 + params[2 * N_AXES + x].sin()) } else { 1.0 };
        Bloch3 { rx: r * u.rx, ry: r * u.ry, rz: r * u.rz }
    });
    Scenario::new(preparations, [axis(4), axis(5)], [CharlieAxis(axis(6)), CharlieAxis(axis(7))], axis(8), [0.5, 0.5])
        .expect("angle-parametrized scenario is valid")
}

fn random_start(rng: &mut SplitMix64, allow_mixed: bool) -> Vec<f64> {
    let mut p = Vec::with_capacity(n_params(allow_mixed));
    for _ in 0..N_AXES {
        // uniform on the sphere
        p.push((1.0 - 2.0 * rng.gen::<f64>()).acos());
        p.push(TAU * rng.gen::<f64>());
    }
    if allow_mixed {
        for _ in 0..4 {
            p.push(PI * (rng.gen::<f64>() - 0.5));
        }
    }
    p
}

/// Multi-start maximization of the target witness over all settings.
///
/// Restart `k` starts from a point drawn from its own SplitMix64 stream,
/// seeded by the `k`-th output of a SplitMix64 seeded with `cfg.seed`.
/// Each restart runs the simplex repeatedly from its current best point
/// until a rerun stops improving or `max_iterations` is spent. Ties between
/// restarts go to the lowest index, so the result does not depend on
/// thread scheduling.
pub fn optimize_settings(cfg: &OptimizeConfig) -> Result<OptimizeResult> {
    cfg.validate()?;
    let mut master = SplitMix64::seed_from_u64(cfg.seed);
    let seeds: Vec<u64> = (0..cfg.restarts).map(|_| master.gen::<u64>()).collect();

    let runs: Vec<(usize, Minimum, f64, usize)> = seeds
        .par_iter()
        .enumerate()
        .map(|(k, &s)| {
            let mut rng = SplitMix64::seed_from_u64(s);
            let start = random_start(&mut rng, cfg.allow_mixed);
            let (best, max_seen, evals) = run_restart(cfg, start);
            (k, best, max_seen, evals)
        })
        .collect();

    let mut max_evaluated = f64::NEG_INFINITY;
    let mut evaluations = 0;
    let mut winner: Option<&(usize, Minimum, f64, usize)> = None;
    for run in &runs {
        max_evaluated = max_evaluated.max(run.2);
        evaluations += run.3;
        // values are negated witness values
        if winner.is_none_or(|w| run.1.value < w.1.value) {
            winner = Some(run);
        }
    }
    let (restart, best, ..) = winner.expect("at least one restart");
    Ok(OptimizeResult {
        scenario: decode(&best.point, cfg.allow_mixed),
        value: -best.value,
        restart: *restart,
        converged: best.converged,
        max_evaluated,
        evaluations,
    })
}

fn run_restart(cfg: &OptimizeConfig, start: Vec<f64>) -> (Minimum, f64, usize) {
    let mut max_seen = f64::NEG_INFINITY;
    let mut evals = 0usize;
    let mut objective = |p: &[f64]| {
        let v = evaluate_scenario(&decode(p, cfg.allow_mixed), cfg.eps, cfg.target.kind, cfg.target.pair);
        max_seen = max_seen.max(v);
        evals += 1;
        -v
    };

    let mut budget = cfg.max_iterations;
    let mut step = 0.5;
    let mut best = nelder_mead(&mut objective, &start, step, cfg.tolerance, budget);
    budget -= best.iterations.min(budget);
    while budget > 0 {
        step *= 0.5;
        let next = nelder_mead(&mut objective, &best.point, step, cfg.tolerance, budget);
        budget -= next.iterations.min(budget);
        let improved = next.value < best.value - cfg.tolerance;
        let stalled = next.iterations == 0;
        if next.value <= best.value {
            best = Minimum { converged: next.converged, ..next };
        }
        if !improved && (best.converged || stalled) {
            break;
        }
    }
    (best, max_seen, evals)
}

/// Interval of couplings over which both observer pairs violate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
    pub kind: WitnessKind,
}

/// Root of `f` in `[lo, hi]` by bisection, to bracket width `tol`.
///
/// `f(lo)` and `f(hi)` must have opposite signs (or one of them be zero).
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || !(lo < hi) {
        return Err(Error::Config(format!("bad bisection setup: [{lo}, {hi}], tol {tol}")));
    }
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Domain(format!("no sign change on [{lo}, {hi}]")));
    }
    // each halving is exact in binary; 200 steps exhausts f64 resolution
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + 0.5 * (hi - lo))
}

fn assert_monotone(f: impl Fn(f64) -> f64, lo: f64, hi: f64, increasing: bool, what: &str) -> Result<()> {
    const SAMPLES: usize = 256;
    let mut prev = f(lo);
    for i in 1..=SAMPLES {
        let e = lo + (hi - lo) * i as f64 / SAMPLES as f64;
        let v = f(e);
        let ok = if increasing { v >= prev - 1e-12 } else { v <= prev + 1e-12 };
        if !ok {
            return Err(Error::Domain(format!("{what} is not monotone near eps={e}")));
        }
        prev = v;
    }
    Ok(())
}

/// Double-violation window of the canonical scenario for `kind`.
///
/// For `W1` the endpoints are found by bisection on the simulated witnesses:
/// `W1AC - 2` on `[0, pi/2]` and `W1AB - 2` on `[0, pi]`. For `W2` the window
/// is the open interval `(0, pi)`; positivity is checked on interior samples.
pub fn find_violation_window(kind: WitnessKind, tol: f64) -> Result<Window> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance {tol} must be positive")));
    }
    match kind {
        WitnessKind::W1 => {
            let s = canonical_w1_scenario();
            let witness = |pair: Pair| {
                let s = s.clone();
                move |e: f64| {
                    evaluate_scenario(&s, WeakCoupling::new(e).expect("bracket inside [0, pi]"), WitnessKind::W1, pair)
                }
            };
            let w_ac = witness(Pair::AC);
            let w_ab = witness(Pair::AB);
            assert_monotone(&w_ac, 0.0, PI / 2.0, true, "W1AC")?;
            assert_monotone(&w_ab, 0.0, PI, false, "W1AB")?;
            let lo = bisect(|e| w_ac(e) - 2.0, 0.0, PI / 2.0, tol)?;
            let hi = bisect(|e| w_ab(e) - 2.0, 0.0, PI, tol)?;
            if !(lo < hi) {
                return Err(Error::Domain(format!("no double violation: lo {lo} >= hi {hi}")));
            }
            Ok(Window { lo, hi, kind })
        }
        WitnessKind::W2 => {
            let s = canonical_w2_scenario();
            let samples = [0.1, PI / 2.0, 3.0].into_iter().chain((1..64).map(|i| PI * i as f64 / 64.0));
            for e in samples {
                let eps = WeakCoupling::new(e)?;
                for pair in [Pair::AB, Pair::AC] {
                    let v = evaluate_scenario(&s, eps, WitnessKind::W2, pair);
                    if !(v > 0.0) {
                        return Err(Error::Domain(format!("W2 {pair:?} = {v} at eps={e}")));
                    }
                }
            }
            Ok(Window { lo: 0.0, hi: PI, kind })
        }
    }
}

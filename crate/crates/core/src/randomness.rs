//! Min-entropy of the observed statistics and witness-based certified rates.
//!
//! All entropies are in bits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{ProbTable, N_PREPARATIONS, N_SETTINGS};
use crate::weak_channel::WeakCoupling;
use crate::witness::{
    closed_form, w1_given_z, w2_given_z, ClosedForm, WitnessKind, BOUND_TOL, W1_CLASSICAL_BOUND, W1_QUANTUM_BOUND,
    W2_QUANTUM_BOUND,
};

fn neg_log2(p: f64) -> f64 {
    // -log2(1) is -0.0
    (-p.log2()).max(0.0)
}

fn max2(p: [f64; 2]) -> f64 {
    p[0].max(p[1])
}

/// `-log2[(1/16) sum_{x,y,z} max_{b,c} p(b,c|x,y,z)]`.
pub fn hmin_global_exact(t: &ProbTable) -> f64 {
    let total: f64 = t.cells().map(|(.., cell)| cell.iter().flatten().copied().fold(f64::MIN, f64::max)).sum();
    neg_log2(total / 16.0)
}

/// `-log2[(1/8) sum_{x,y} max_b p(b|x,y)]` on the `z`-averaged Bob marginal.
pub fn hmin_local_bob_exact(t: &ProbTable) -> f64 {
    let total: f64 =
        (0..N_PREPARATIONS).flat_map(|x| (0..N_SETTINGS).map(move |y| (x, y))).map(|(x, y)| max2(t.bob(x, y))).sum();
    neg_log2(total / 8.0)
}

/// Bob min-entropy with Charlie's setting fixed to `z`.
pub fn hmin_local_bob_given_z(t: &ProbTable, z: usize) -> f64 {
    let total: f64 = (0..N_PREPARATIONS)
        .flat_map(|x| (0..N_SETTINGS).map(move |y| (x, y)))
        .map(|(x, y)| max2(t.bob_given_z(x, y, z)))
        .sum();
    neg_log2(total / 8.0)
}

/// Charlie part of the factorized bound, `-log2[(1/8) sum_{x,z} max_c p(c|x,z)]`.
pub fn charlie_guess_term(t: &ProbTable) -> f64 {
    let total: f64 = (0..N_PREPARATIONS)
        .flat_map(|x| (0..N_SETTINGS).map(move |z| (x, z)))
        .map(|(x, z)| max2(t.charlie(x, z)))
        .sum();
    neg_log2(total / 8.0)
}

/// Bob part of the factorized bound, `-log2 max_{b,x,y,z} p(b|x,y,z)`.
pub fn bob_worst_case_term(t: &ProbTable) -> f64 {
    let worst = t.cells().map(|(x, y, z, _)| max2(t.bob_given_z(x, y, z))).fold(f64::MIN, f64::max);
    neg_log2(worst)
}

/// Lower bound on the global min-entropy from the factorized guessing
/// probability: Charlie's average term plus Bob's worst-case term.
pub fn hmin_global_bound(t: &ProbTable) -> f64 {
    charlie_guess_term(t) + bob_worst_case_term(t)
}

/// Certified min-entropy from a random-access-code witness value.
///
/// Values at or below the classical bound 2 certify nothing and give 0.
pub fn h_from_w1(w: f64) -> Result<f64> {
    if !w.is_finite() {
        return Err(Error::Domain(format!("non-finite witness value {w}")));
    }
    if w > W1_QUANTUM_BOUND + BOUND_TOL {
        return Err(Error::SuperQuantum { value: w, bound: W1_QUANTUM_BOUND });
    }
    if w <= W1_CLASSICAL_BOUND {
        return Ok(0.0);
    }
    let w = w.min(W1_QUANTUM_BOUND);
    let u = (w * w - 4.0) / 4.0;
    Ok(guess_to_entropy((1.0 - u * u).max(0.0).sqrt()))
}

/// Certified min-entropy from a determinant witness value (sign ignored).
pub fn h_from_w2(w: f64) -> Result<f64> {
    if !w.is_finite() {
        return Err(Error::Domain(format!("non-finite witness value {w}")));
    }
    let w = w.abs();
    if w > W2_QUANTUM_BOUND + BOUND_TOL {
        return Err(Error::SuperQuantum { value: w, bound: W2_QUANTUM_BOUND });
    }
    let w = w.min(W2_QUANTUM_BOUND);
    Ok(guess_to_entropy((1.0 - w * w).max(0.0).sqrt()))
}

// -log2(1/2 + 1/2 sqrt((1 + root)/2))
fn guess_to_entropy(root: f64) -> f64 {
    neg_log2(0.5 + 0.5 * ((1.0 + root) / 2.0).sqrt())
}

/// Bob's certified rate for the canonical scenario of `kind`, from the
/// `z`-conditioned closed forms.
pub fn bob_certified(eps: f64, kind: WitnessKind) -> Result<f64> {
    match kind {
        WitnessKind::W1 => h_from_w1(closed_form(ClosedForm::W1ABz, eps)?),
        WitnessKind::W2 => h_from_w2(closed_form(ClosedForm::W2ABz, eps)?),
    }
}

/// Bob's certified rate from simulated statistics: the worst of the two
/// `z`-conditioned witnesses.
pub fn bob_certified_from_table(t: &ProbTable, kind: WitnessKind) -> Result<f64> {
    let rates = (0..N_SETTINGS).map(|z| match kind {
        WitnessKind::W1 => h_from_w1(w1_given_z(t, z).value),
        WitnessKind::W2 => h_from_w2(w2_given_z(t, z).value),
    });
    rates.into_iter().try_fold(f64::INFINITY, |acc, r| Ok(acc.min(r?)))
}

/// Charlie's certified rate for the canonical random-access-code scenario.
pub fn charlie_certified(eps: f64) -> Result<f64> {
    h_from_w1(closed_form(ClosedForm::W1AC, eps)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub epsilon: f64,
    pub hmin_global_exact: f64,
    pub hmin_local_bob_exact: f64,
    pub hmin_global_bound: f64,
    pub h_bob_certified_w1: f64,
    pub h_bob_certified_w2: f64,
    pub h_charlie_certified: f64,
}

impl EntropyReport {
    /// Everything computable from one table; certified rates use the
    /// simulated witnesses of the table's own scenario.
    pub fn evaluate(t: &ProbTable) -> Result<Self> {
        let charlie_w1 = crate::witness::evaluate(t, WitnessKind::W1, crate::witness::Pair::AC).value;
        Ok(EntropyReport {
            epsilon: t.eps().epsilon(),
            hmin_global_exact: hmin_global_exact(t),
            hmin_local_bob_exact: hmin_local_bob_exact(t),
            hmin_global_bound: hmin_global_bound(t),
            h_bob_certified_w1: bob_certified_from_table(t, WitnessKind::W1)?,
            h_bob_certified_w2: bob_certified_from_table(t, WitnessKind::W2)?,
            h_charlie_certified: h_from_w1(charlie_w1)?,
        })
    }

    /// Certified-rate curves for the canonical scenarios at `eps`.
    pub fn canonical_rates(eps: WeakCoupling) -> Result<(f64, f64, f64)> {
        let e = eps.epsilon();
        Ok((bob_certified(e, WitnessKind::W1)?, bob_certified(e, WitnessKind::W2)?, charlie_certified(e)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{build_table, canonical_w1_scenario, canonical_w2_scenario, Scenario};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, SQRT_2};

    fn eps(e: f64) -> WeakCoupling {
        WeakCoupling::new(e).unwrap()
    }

    // Independent scalar evaluation of the certification formulas, written
    // term by term; shares no code with the functions under test.
    fn oracle_w1(w: f64) -> f64 {
        let inner = 1.0 - ((w * w - 4.0) / 4.0).powi(2);
        let g = 0.5 + 0.5 * ((1.0 + inner.max(0.0).sqrt()) / 2.0).sqrt();
        -g.ln() / std::f64::consts::LN_2
    }

    fn oracle_w2(w: f64) -> f64 {
        let g = 0.5 + 0.5 * ((1.0 + (1.0 - w * w).max(0.0).sqrt()) / 2.0).sqrt();
        -g.ln() / std::f64::consts::LN_2
    }

    fn uniform_table() -> ProbTable {
        let s = canonical_w1_scenario();
        ProbTable::from_entries(s, WeakCoupling::NONE, [[[[[0.25; 2]; 2]; 2]; 2]; 4]).unwrap()
    }

    fn deterministic_table() -> ProbTable {
        let mut raw = [[[[[0.0; 2]; 2]; 2]; 2]; 4];
        raw.iter_mut().flatten().flatten().for_each(|cell| cell[0][0] = 1.0);
        ProbTable::from_entries(canonical_w1_scenario(), WeakCoupling::NONE, raw).unwrap()
    }

    #[test]
    fn frozen_oracle_values() {
        // values produced by the oracles above
        assert!((oracle_w1(2.0 * SQRT_2) - 0.228_446_696_836_388).abs() < 1e-12);
        assert!((oracle_w1(2.5) - 0.032_300_966_462_098).abs() < 1e-12);
        assert!((oracle_w2(0.5) - 0.024_791_109_686_525).abs() < 1e-12);
        assert!((oracle_w1(2.0 * SQRT_2 * 1f64.sin().powi(2)) - 6.749_413_867_745e-7).abs() < 1e-15);
    }

    #[test]
    fn global_exact_examples() {
        let t = build_table(&canonical_w1_scenario(), WeakCoupling::NONE);
        let expect = -(0.5 + 1.0 / (2.0 * SQRT_2)).log2();
        assert!((hmin_global_exact(&t) - expect).abs() < 1e-12);
        assert!((hmin_global_exact(&t) - 0.228_446_7).abs() < 1e-6);
        assert!((hmin_global_exact(&uniform_table()) - 2.0).abs() < 1e-15);
        assert_eq!(hmin_global_exact(&deterministic_table()), 0.0);
    }

    #[test]
    fn local_bob_examples() {
        let s = canonical_w1_scenario();
        for e in [0.0, 0.6, FRAC_PI_2, 2.4, PI] {
            let t = build_table(&s, eps(e));
            let expect = -(0.5 + (1.0 + e.cos()) / (4.0 * SQRT_2)).log2();
            assert!((hmin_local_bob_exact(&t) - expect).abs() < 1e-12, "eps={e}");
        }
        let t = build_table(&s, eps(FRAC_PI_2));
        assert!((hmin_local_bob_exact(&t) - 0.5633).abs() < 1e-4);
        assert_eq!(hmin_local_bob_exact(&deterministic_table()), 0.0);
    }

    #[test]
    fn global_bound_examples() {
        let t = build_table(&canonical_w1_scenario(), WeakCoupling::NONE);
        assert!(charlie_guess_term(&t).abs() < 1e-15);
        assert!((hmin_global_bound(&t) - hmin_global_exact(&t)).abs() < 1e-12);
        let u = uniform_table();
        assert!((charlie_guess_term(&u) - 1.0).abs() < 1e-15);
        assert!((bob_worst_case_term(&u) - 1.0).abs() < 1e-15);
        assert!((hmin_global_bound(&u) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bound_holds_for_w2_scenario_and_without_coupling() {
        for i in 0..=100 {
            let t = build_table(&canonical_w2_scenario(), eps(PI * i as f64 / 100.0));
            assert!(hmin_global_bound(&t) <= hmin_global_exact(&t) + 1e-12);
        }
        let t = build_table(&canonical_w1_scenario(), WeakCoupling::NONE);
        assert!(hmin_global_bound(&t) <= hmin_global_exact(&t) + 1e-12);
    }

    // The factorized guessing probability assumes p(c|x,y,z,b) = p(c|x,z).
    // When Bob and Charlie measure along the same axis their outcomes are
    // correlated and the "bound" overshoots the exact value.
    #[test]
    fn factorized_bound_overshoots_when_outcomes_correlate() {
        let t = build_table(&canonical_w1_scenario(), eps(0.28 * PI));
        let cell = t.joint(0, 0, 0);
        let pb = t.bob_given_z(0, 0, 0);
        let pc = t.charlie(0, 0);
        assert!(cell[0][0] > pb[0] * pc[0] + 1e-3);
        assert!(hmin_global_bound(&t) > hmin_global_exact(&t) + 0.05);
    }

    #[test]
    fn h_from_w1_examples() {
        assert!((h_from_w1(W1_QUANTUM_BOUND).unwrap() - oracle_w1(W1_QUANTUM_BOUND)).abs() < 1e-12);
        assert!((h_from_w1(W1_QUANTUM_BOUND).unwrap() + ((2.0 + SQRT_2) / 4.0).log2()).abs() < 1e-12);
        assert_eq!(h_from_w1(2.0).unwrap(), 0.0);
        assert!((h_from_w1(2.5).unwrap() - oracle_w1(2.5)).abs() < 1e-12);
        assert_eq!(h_from_w1(1.0).unwrap(), 0.0);
        assert_eq!(h_from_w1(-2.5).unwrap(), 0.0);
        assert!(matches!(h_from_w1(2.9), Err(Error::SuperQuantum { .. })));
        assert!(h_from_w1(W1_QUANTUM_BOUND + 5e-10).is_ok());
    }

    #[test]
    fn h_from_w2_examples() {
        assert!((h_from_w2(1.0).unwrap() - h_from_w1(W1_QUANTUM_BOUND).unwrap()).abs() < 1e-12);
        assert_eq!(h_from_w2(0.0).unwrap(), 0.0);
        assert!((h_from_w2(0.5).unwrap() - oracle_w2(0.5)).abs() < 1e-12);
        assert_eq!(h_from_w2(-0.5).unwrap(), h_from_w2(0.5).unwrap());
        assert!(matches!(h_from_w2(1.01), Err(Error::SuperQuantum { .. })));
    }

    #[test]
    fn rate_curves_are_monotone() {
        let mut prev = 0.0;
        for i in 0..1000 {
            let w = 2.0 + (W1_QUANTUM_BOUND - 2.0) * i as f64 / 999.0;
            let h = h_from_w1(w).unwrap();
            assert!(h + 1e-15 >= prev);
            prev = h;
        }
        prev = 0.0;
        for i in 0..1000 {
            let h = h_from_w2(i as f64 / 999.0).unwrap();
            assert!(h + 1e-15 >= prev);
            prev = h;
        }
    }

    #[test]
    fn clamp_is_continuous() {
        assert!(h_from_w1(2.0 + 1e-9).unwrap().abs() < 1e-6);
        assert!(h_from_w1(2.0 - 1e-9).unwrap().abs() < 1e-6);
    }

    #[test]
    fn certified_examples() {
        assert!((bob_certified(0.0, WitnessKind::W1).unwrap() - oracle_w1(W1_QUANTUM_BOUND)).abs() < 1e-12);
        assert!((bob_certified(FRAC_PI_3, WitnessKind::W2).unwrap() - oracle_w2(0.5)).abs() < 1e-12);
        assert!(bob_certified((SQRT_2 - 1.0).acos(), WitnessKind::W1).unwrap().abs() < 1e-7);
        assert!(bob_certified(FRAC_PI_2, WitnessKind::W2).unwrap().abs() < 1e-12);
        assert!((charlie_certified(FRAC_PI_2).unwrap() - oracle_w1(W1_QUANTUM_BOUND)).abs() < 1e-12);
        assert_eq!(charlie_certified(0.0).unwrap(), 0.0);
        let h = charlie_certified(1.0).unwrap();
        assert!(h > 0.0);
        assert!((h - oracle_w1(2.0 * SQRT_2 * 1f64.sin().powi(2))).abs() < 1e-12);
        assert!(matches!(bob_certified(-0.5, WitnessKind::W1), Err(Error::Domain(_))));
    }

    #[test]
    fn certified_from_table_matches_closed_form() {
        let pairs: [(Scenario, WitnessKind); 2] =
            [(canonical_w1_scenario(), WitnessKind::W1), (canonical_w2_scenario(), WitnessKind::W2)];
        for (s, kind) in pairs {
            for i in 0..=100 {
                let e = PI * i as f64 / 100.0;
                let t = build_table(&s, eps(e));
                let sim = bob_certified_from_table(&t, kind).unwrap();
                assert!((sim - bob_certified(e, kind).unwrap()).abs() < 1e-9, "{kind:?} eps={e}");
            }
        }
    }

    #[test]
    fn certification_is_sound_on_honest_device() {
        let pairs = [(canonical_w1_scenario(), WitnessKind::W1), (canonical_w2_scenario(), WitnessKind::W2)];
        for (s, kind) in pairs {
            for i in 0..=100 {
                let e = PI * i as f64 / 100.0;
                let t = build_table(&s, eps(e));
                let certified = bob_certified(e, kind).unwrap();
                for z in 0..2 {
                    assert!(certified <= hmin_local_bob_given_z(&t, z) + 1e-12, "{kind:?} eps={e} z={z}");
                }
            }
        }
    }

    #[test]
    fn report_fields_non_negative() {
        for s in [canonical_w1_scenario(), canonical_w2_scenario()] {
            for e in [0.0, 1.0, FRAC_PI_2, 3.0] {
                let r = EntropyReport::evaluate(&build_table(&s, eps(e))).unwrap();
                for v in [
                    r.hmin_global_exact,
                    r.hmin_local_bob_exact,
                    r.hmin_global_bound,
                    r.h_bob_certified_w1,
                    r.h_bob_certified_w2,
                    r.h_charlie_certified,
                ] {
                    assert!(v >= 0.0);
                }
                assert!(r.hmin_global_bound <= r.hmin_global_exact + 1e-12);
            }
        }
    }
}

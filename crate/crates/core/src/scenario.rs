//! Prepare-and-measure configuration and its exact outcome statistics.
//!
//! Indices: preparation `x` in `0..4` is the two-bit label `x1 x2` with
//! `x = 2*x1 + x2`; Bob's setting `y` and Charlie's setting `z` are in `0..2`.
//! Outcomes are `+1` (projector along the measurement axis) and `-1`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubit_algebra::{bloch_operator, projector, tensor, Bloch3, Mat2, UnitBloch3};
use crate::weak_channel::{bob_state_matrix, charlie_state_matrix, evolve_joint_matrix, CharlieAxis, WeakCoupling};

pub const N_PREPARATIONS: usize = 4;
pub const N_SETTINGS: usize = 2;

/// Binary measurement outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    /// Storage index: `+1 -> 0`, `-1 -> 1`.
    pub fn index(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Outcome::Plus => "+1",
            Outcome::Minus => "-1",
        }
    }

    fn along(self, axis: &UnitBloch3) -> UnitBloch3 {
        match self {
            Outcome::Plus => *axis,
            Outcome::Minus => axis.antipode(),
        }
    }
}

/// Two-bit label of preparation `x`, e.g. `"01"`.
pub fn x_label(x: usize) -> String {
    format!("{}{}", x >> 1, x & 1)
}

/// Which canonical configuration to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    /// Random-access-code settings.
    W1,
    /// Determinant-witness settings.
    W2,
}

impl ScenarioKind {
    pub fn canonical(self) -> Scenario {
        match self {
            ScenarioKind::W1 => canonical_w1_scenario(),
            ScenarioKind::W2 => canonical_w2_scenario(),
        }
    }
}

/// Alice's preparations, Bob's and Charlie's axes, the ancilla readout axis
/// and the distribution of Charlie's setting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioDoc", into = "ScenarioDoc")]
pub struct Scenario {
    preparations: [Bloch3; N_PREPARATIONS],
    bob_axes: [UnitBloch3; N_SETTINGS],
    charlie_axes: [CharlieAxis; N_SETTINGS],
    ancilla_axis: UnitBloch3,
    z_prior: [f64; N_SETTINGS],
}

impl Scenario {
    pub fn new(
        preparations: [Bloch3; N_PREPARATIONS],
        bob_axes: [UnitBloch3; N_SETTINGS],
        charlie_axes: [CharlieAxis; N_SETTINGS],
        ancilla_axis: UnitBloch3,
        z_prior: [f64; N_SETTINGS],
    ) -> Result<Self> {
        if z_prior.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::Config(format!("z_prior {z_prior:?} has a negative entry")));
        }
        let total: f64 = z_prior.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("z_prior sums to {total}, expected 1")));
        }
        Ok(Scenario { preparations, bob_axes, charlie_axes, ancilla_axis, z_prior })
    }

    pub fn preparation(&self, x: usize) -> Bloch3 {
        self.preparations[x]
    }

    pub fn preparations(&self) -> &[Bloch3; N_PREPARATIONS] {
        &self.preparations
    }

    pub fn bob_axis(&self, y: usize) -> UnitBloch3 {
        self.bob_axes[y]
    }

    pub fn charlie_axis(&self, z: usize) -> CharlieAxis {
        self.charlie_axes[z]
    }

    pub fn ancilla_axis(&self) -> UnitBloch3 {
        self.ancilla_axis
    }

    pub fn z_prior(&self) -> [f64; N_SETTINGS] {
        self.z_prior
    }

    pub fn with_z_prior(mut self, z_prior: [f64; N_SETTINGS]) -> Result<Self> {
        self = Scenario::new(self.preparations, self.bob_axes, self.charlie_axes, self.ancilla_axis, z_prior)?;
        Ok(self)
    }

    fn rho(&self, x: usize) -> Mat2 {
        bloch_operator(&self.preparations[x])
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_toml_string()?)?;
        Ok(())
    }
}

/// On-disk form of a [`Scenario`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub preparations: [[f64; 3]; N_PREPARATIONS],
    pub bob_axes: [[f64; 3]; N_SETTINGS],
    pub charlie_axes: [[f64; 3]; N_SETTINGS],
    pub ancilla_axis: [f64; 3],
    #[serde(default = "uniform_prior")]
    pub z_prior: [f64; N_SETTINGS],
}

fn uniform_prior() -> [f64; N_SETTINGS] {
    [0.5, 0.5]
}

impl TryFrom<ScenarioDoc> for Scenario {
    type Error = Error;

    fn try_from(doc: ScenarioDoc) -> Result<Self> {
        let config = |what: &str, e: Error| Error::Config(format!("{what}: {e}"));
        let mut preparations = [Bloch3::ORIGIN; N_PREPARATIONS];
        for (x, v) in doc.preparations.iter().enumerate() {
            preparations[x] = Bloch3::from_array(*v).map_err(|e| config(&format!("preparations[{x}]"), e))?;
        }
        let mut bob_axes = [UnitBloch3::Z; N_SETTINGS];
        let mut charlie_axes = [CharlieAxis(UnitBloch3::Z); N_SETTINGS];
        for s in 0..N_SETTINGS {
            bob_axes[s] = UnitBloch3::from_array(doc.bob_axes[s]).map_err(|e| config(&format!("bob_axes[{s}]"), e))?;
            charlie_axes[s] = CharlieAxis(
                UnitBloch3::from_array(doc.charlie_axes[s]).map_err(|e| config(&format!("charlie_axes[{s}]"), e))?,
            );
        }
        let ancilla_axis = UnitBloch3::from_array(doc.ancilla_axis).map_err(|e| config("ancilla_axis", e))?;
        Scenario::new(preparations, bob_axes, charlie_axes, ancilla_axis, doc.z_prior)
    }
}

impl From<Scenario> for ScenarioDoc {
    fn from(s: Scenario) -> Self {
        ScenarioDoc {
            preparations: s.preparations.map(Bloch3::to_array),
            bob_axes: s.bob_axes.map(UnitBloch3::to_array),
            charlie_axes: s.charlie_axes.map(|a| a.omega().to_array()),
            ancilla_axis: s.ancilla_axis.to_array(),
            z_prior: s.z_prior,
        }
    }
}

/// Preparations `((-1)^x1, 0, (-1)^x2)/sqrt(2)`, Bob and Charlie both measuring
/// along X then Z, ancilla read out along X, uniform `z`.
pub fn canonical_w1_scenario() -> Scenario {
    let preparations = [0usize, 1, 2, 3].map(|x| {
        let s1 = if x >> 1 == 0 { 1.0 } else { -1.0 };
        let s2 = if x & 1 == 0 { 1.0 } else { -1.0 };
        Bloch3 { rx: s1 * FRAC_1_SQRT_2, ry: 0.0, rz: s2 * FRAC_1_SQRT_2 }
    });
    Scenario::new(
        preparations,
        [UnitBloch3::X, UnitBloch3::Z],
        [CharlieAxis(UnitBloch3::X), CharlieAxis(UnitBloch3::Z)],
        UnitBloch3::X,
        uniform_prior(),
    )
    .expect("canonical settings are valid")
}

/// Preparations `+Z, -Z, +X, -X`; Bob and Charlie measure Z then X.
pub fn canonical_w2_scenario() -> Scenario {
    let z = UnitBloch3::Z.bloch();
    let x = UnitBloch3::X.bloch();
    let neg = |b: Bloch3| Bloch3 { rx: -b.rx, ry: -b.ry, rz: -b.rz };
    Scenario::new(
        [z, neg(z), x, neg(x)],
        [UnitBloch3::Z, UnitBloch3::X],
        [CharlieAxis(UnitBloch3::Z), CharlieAxis(UnitBloch3::X)],
        UnitBloch3::X,
        uniform_prior(),
    )
    .expect("canonical settings are valid")
}

/// `p(b, c | x, y, z)` from the full two-qubit evolution, indexed `[b][c]`.
pub fn p_joint(s: &Scenario, eps: WeakCoupling, x: usize, y: usize, z: usize) -> [[f64; 2]; 2] {
    let joint = evolve_joint_matrix(&s.rho(x), &s.charlie_axes[z], eps);
    let mut out = [[0.0; 2]; 2];
    for b in Outcome::ALL {
        let bob = projector(&b.along(&s.bob_axes[y]));
        for c in Outcome::ALL {
            let charlie = projector(&c.along(&s.ancilla_axis));
            out[b.index()][c.index()] = tensor(&bob, &charlie).trace_product(&joint).re;
        }
    }
    out
}

/// `p(b | x, y, z)` from Bob's reduced state, indexed by outcome.
pub fn p_bob_given_z(s: &Scenario, eps: WeakCoupling, x: usize, y: usize, z: usize) -> [f64; 2] {
    let rho_b = bob_state_matrix(&s.rho(x), &s.charlie_axes[z], eps);
    Outcome::ALL.map(|b| projector(&b.along(&s.bob_axes[y])).trace_product(&rho_b).re)
}

/// `p(b | x, y) = sum_z p(z) p(b | x, y, z)`.
pub fn p_bob(s: &Scenario, eps: WeakCoupling, x: usize, y: usize) -> [f64; 2] {
    let mut out = [0.0; 2];
    for z in 0..N_SETTINGS {
        let pz = p_bob_given_z(s, eps, x, y, z);
        for b in 0..2 {
            out[b] += s.z_prior[z] * pz[b];
        }
    }
    out
}

/// `p(c | x, z)` from Charlie's ancilla, indexed by outcome.
pub fn p_charlie(s: &Scenario, eps: WeakCoupling, x: usize, z: usize) -> [f64; 2] {
    let rho_c = charlie_state_matrix(&s.rho(x), &s.charlie_axes[z], eps);
    Outcome::ALL.map(|c| projector(&c.along(&s.ancilla_axis)).trace_product(&rho_c).re)
}

/// The 64 joint probabilities `p(b, c | x, y, z)` of one scenario at one coupling.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbTable {
    scenario: Scenario,
    eps: WeakCoupling,
    // [x][y][z][b][c]
    joint: [[[[[f64; 2]; 2]; N_SETTINGS]; N_SETTINGS]; N_PREPARATIONS],
}

pub fn build_table(s: &Scenario, eps: WeakCoupling) -> ProbTable {
    let mut joint = [[[[[0.0; 2]; 2]; N_SETTINGS]; N_SETTINGS]; N_PREPARATIONS];
    for (x, by_x) in joint.iter_mut().enumerate() {
        for (y, by_y) in by_x.iter_mut().enumerate() {
            for (z, cell) in by_y.iter_mut().enumerate() {
                *cell = p_joint(s, eps, x, y, z);
            }
        }
    }
    ProbTable { scenario: s.clone(), eps, joint }
}

impl ProbTable {
    /// Builds a table from raw entries, checking normalization; used for
    /// externally supplied statistics.
    pub fn from_entries(
        scenario: Scenario,
        eps: WeakCoupling,
        joint: [[[[[f64; 2]; 2]; N_SETTINGS]; N_SETTINGS]; N_PREPARATIONS],
    ) -> Result<Self> {
        for x in 0..N_PREPARATIONS {
            for y in 0..N_SETTINGS {
                for z in 0..N_SETTINGS {
                    let cell = &joint[x][y][z];
                    if cell.iter().flatten().any(|p| !(-1e-12..=1.0 + 1e-12).contains(p)) {
                        return Err(Error::Config(format!("entry outside [0,1] at x={x} y={y} z={z}")));
                    }
                    let total: f64 = cell.iter().flatten().sum();
                    if (total - 1.0).abs() > 1e-12 {
                        return Err(Error::Config(format!("cell x={x} y={y} z={z} sums to {total}")));
                    }
                }
            }
        }
        Ok(ProbTable { scenario, eps, joint })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn eps(&self) -> WeakCoupling {
        self.eps
    }

    pub fn joint(&self, x: usize, y: usize, z: usize) -> [[f64; 2]; 2] {
        self.joint[x][y][z]
    }

    pub fn get(&self, x: usize, y: usize, z: usize, b: Outcome, c: Outcome) -> f64 {
        self.joint[x][y][z][b.index()][c.index()]
    }

    /// `p(b | x, y, z)`, summed over `c`.
    pub fn bob_given_z(&self, x: usize, y: usize, z: usize) -> [f64; 2] {
        let cell = &self.joint[x][y][z];
        [cell[0][0] + cell[0][1], cell[1][0] + cell[1][1]]
    }

    /// `p(b | x, y)`, averaged over `z` with the scenario prior.
    pub fn bob(&self, x: usize, y: usize) -> [f64; 2] {
        let prior = self.scenario.z_prior;
        let mut out = [0.0; 2];
        for z in 0..N_SETTINGS {
            let p = self.bob_given_z(x, y, z);
            out[0] += prior[z] * p[0];
            out[1] += prior[z] * p[1];
        }
        out
    }

    /// `p(c | x, y, z)` summed over `b`; independent of `y` for physical tables.
    pub fn charlie_given_y(&self, x: usize, y: usize, z: usize) -> [f64; 2] {
        let cell = &self.joint[x][y][z];
        [cell[0][0] + cell[1][0], cell[0][1] + cell[1][1]]
    }

    /// `p(c | x, z)`, read off the `y = 0` slice.
    pub fn charlie(&self, x: usize, z: usize) -> [f64; 2] {
        self.charlie_given_y(x, 0, z)
    }

    /// Iterates `(x, y, z, cell)` in index order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, usize, [[f64; 2]; 2])> + '_ {
        (0..N_PREPARATIONS).flat_map(move |x| {
            (0..N_SETTINGS).flat_map(move |y| (0..N_SETTINGS).map(move |z| (x, y, z, self.joint[x][y][z])))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    fn eps(e: f64) -> WeakCoupling {
        WeakCoupling::new(e).unwrap()
    }

    #[test]
    fn canonical_preparations_are_pure() {
        for s in [canonical_w1_scenario(), canonical_w2_scenario()] {
            for r in s.preparations() {
                assert!((r.norm() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn prior_validation() {
        let s = canonical_w1_scenario();
        assert!(s.clone().with_z_prior([0.3, 0.7]).is_ok());
        assert!(matches!(s.clone().with_z_prior([0.6, 0.6]), Err(Error::Config(_))));
        assert!(matches!(s.with_z_prior([-0.1, 1.1]), Err(Error::Config(_))));
    }

    #[test]
    fn uncoupled_joint_factorizes() {
        let s = canonical_w1_scenario();
        for x in 0..4 {
            for y in 0..2 {
                for z in 0..2 {
                    let p = p_joint(&s, WeakCoupling::NONE, x, y, z);
                    let pb = p_bob_given_z(&s, WeakCoupling::NONE, x, y, z);
                    assert!(p[0][1].abs() < 1e-15 && p[1][1].abs() < 1e-15);
                    assert!((p[0][0] - pb[0]).abs() < 1e-15);
                    assert!((p[1][0] - pb[1]).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn bob_marginal_examples() {
        let s = canonical_w1_scenario();
        let p = p_bob(&s, WeakCoupling::NONE, 0, 0);
        assert!((p[0] - (0.5 + 1.0 / (2.0 * SQRT_2))).abs() < 1e-12);
        for e in [0.0, 0.5, FRAC_PI_2, 2.0, PI] {
            let p = p_bob(&s, eps(e), 0, 0);
            let expect = 0.5 + (1.0 + e.cos()) / (4.0 * SQRT_2);
            assert!((p[0] - expect).abs() < 1e-12, "eps={e}");
            assert!((p[0] + p[1] - 1.0).abs() < 1e-12);
        }
        let p = p_bob(&s, eps(FRAC_PI_2), 0, 0);
        assert!((p[0] - 0.676_776_695_3).abs() < 1e-9);
    }

    #[test]
    fn charlie_marginal_examples() {
        let s = canonical_w1_scenario();
        for x in 0..4 {
            for z in 0..2 {
                assert!((p_charlie(&s, WeakCoupling::NONE, x, z)[0] - 1.0).abs() < 1e-15);
            }
        }
        let p = p_charlie(&s, eps(FRAC_PI_2), 0, 0);
        assert!((p[1] - 0.5 * (1.0 - 1.0 / SQRT_2)).abs() < 1e-12);
        assert!((p[1] - 0.146_446_609_4).abs() < 1e-9);

        // W2 scenario: x=00 is aligned with omega_0
        let s2 = canonical_w2_scenario();
        for e in [0.3, FRAC_PI_2, 2.8] {
            assert!(p_charlie(&s2, eps(e), 0, 0)[1].abs() < 1e-15);
        }
    }

    #[test]
    fn joint_marginal_at_half_pi() {
        let s = canonical_w1_scenario();
        let p = p_joint(&s, eps(FRAC_PI_2), 0, 0, 0);
        let pc_minus = p[0][1] + p[1][1];
        assert!((pc_minus - 0.5 * (1.0 - 1.0 / SQRT_2)).abs() < 1e-12);
    }

    #[test]
    fn table_invariants() {
        for s in [canonical_w1_scenario(), canonical_w2_scenario()] {
            for e in [0.0, 0.4, 1.0, FRAC_PI_2, 2.2, PI] {
                let t = build_table(&s, eps(e));
                for (x, y, z, cell) in t.cells() {
                    assert!(cell.iter().flatten().all(|p| (-1e-15..=1.0 + 1e-15).contains(p)));
                    let total: f64 = cell.iter().flatten().sum();
                    assert!((total - 1.0).abs() < 1e-12);
                    let pb = p_bob_given_z(&s, eps(e), x, y, z);
                    let tb = t.bob_given_z(x, y, z);
                    assert!((pb[0] - tb[0]).abs() < 1e-12 && (pb[1] - tb[1]).abs() < 1e-12);
                    let pc = p_charlie(&s, eps(e), x, z);
                    let tc = t.charlie_given_y(x, y, z);
                    assert!((pc[0] - tc[0]).abs() < 1e-12 && (pc[1] - tc[1]).abs() < 1e-12);
                }
                if e == 0.0 {
                    assert!(t.cells().all(|(.., cell)| cell[0][1] == 0.0 || cell[0][1].abs() < 1e-15));
                }
            }
        }
    }

    #[test]
    fn charlie_symmetric_under_reflection() {
        for s in [canonical_w1_scenario(), canonical_w2_scenario()] {
            for e in [0.1, 0.7, 1.3] {
                for x in 0..4 {
                    for z in 0..2 {
                        let a = p_charlie(&s, eps(e), x, z);
                        let b = p_charlie(&s, eps(PI - e), x, z);
                        assert!((a[1] - b[1]).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn from_entries_checks_normalization() {
        let t = build_table(&canonical_w1_scenario(), eps(0.3));
        let mut raw = t.joint;
        assert!(ProbTable::from_entries(t.scenario.clone(), t.eps, raw).is_ok());
        raw[1][0][1][0][0] += 0.01;
        assert!(matches!(ProbTable::from_entries(t.scenario.clone(), t.eps, raw), Err(Error::Config(_))));
    }

    #[test]
    fn toml_round_trip_is_lossless() {
        let mut s = canonical_w1_scenario();
        s.preparations[2] = Bloch3::new(0.1, 1.0 / 3.0, -0.2).unwrap();
        s.bob_axes[1] = UnitBloch3::from_angles(0.123456789, std::f64::consts::E);
        s = s.with_z_prior([0.3, 0.7]).unwrap();
        let text = s.to_toml_string().unwrap();
        let back = Scenario::from_toml_str(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn toml_rejects_invalid_documents() {
        let good = canonical_w2_scenario().to_toml_string().unwrap();
        let bad_axis = good.replacen("bob_axes = [[0.0, 0.0, 1.0]", "bob_axes = [[0.0, 0.0, 2.0]", 1);
        assert_ne!(bad_axis, good);
        assert!(matches!(Scenario::from_toml_str(&bad_axis), Err(Error::Parse(_))));
        assert!(Scenario::from_toml_str("preparations = 3").is_err());
    }

    #[test]
    fn toml_prior_defaults_to_uniform() {
        let doc = r#"
preparations = [[0, 0, 1], [0, 0, -1], [1, 0, 0], [-1, 0, 0]]
bob_axes = [[0, 0, 1], [1, 0, 0]]
charlie_axes = [[0, 0, 1], [1, 0, 0]]
ancilla_axis = [1, 0, 0]
"#;
        let s = Scenario::from_toml_str(doc).unwrap();
        assert_eq!(s, canonical_w2_scenario());
    }
}

//! Charlie's weak measurement: a controlled phase kick on a `|+>` ancilla.
//!
//! Charlie's setting is a Bloch axis `omega`. The interaction is
//! `U = P(+omega) (x) I + P(-omega) (x) exp(i eps Z)`, acting on the system
//! qubit (first slot) and the ancilla (second slot).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qubit_algebra::{
    bloch_operator, partial_trace, pauli, projector, tensor, Bloch3, Density2, Density4, Mat2, Mat4, Matrix, Subsystem,
    UnitBloch3,
};

/// Coupling strength `eps` in radians, restricted to `[0, pi]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct WeakCoupling(f64);

impl WeakCoupling {
    pub const NONE: WeakCoupling = WeakCoupling(0.0);

    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&epsilon) {
            return Err(Error::Domain(format!("epsilon {epsilon} outside [0, pi]")));
        }
        Ok(WeakCoupling(epsilon))
    }

    pub fn epsilon(self) -> f64 {
        self.0
    }
}

/// Bloch axis of Charlie's basis state `|omega_z>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharlieAxis(pub UnitBloch3);

impl CharlieAxis {
    pub fn omega(&self) -> UnitBloch3 {
        self.0
    }

    /// Projector onto `+omega` (no phase kick).
    pub fn plus_projector(&self) -> Mat2 {
        projector(&self.0)
    }

    /// Projector onto `-omega` (phase kick applied).
    pub fn minus_projector(&self) -> Mat2 {
        projector(&self.0.antipode())
    }
}

/// `|+><+|`, the ancilla's initial state.
pub fn plus_state() -> Mat2 {
    bloch_operator(&UnitBloch3::X.bloch())
}

/// `exp(i eps Z) = diag(e^{i eps}, e^{-i eps})`.
pub fn phase_kick(eps: WeakCoupling) -> Mat2 {
    let e = eps.epsilon();
    Matrix([
        [Complex64::from_polar(1.0, e), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, -e)],
    ])
}

pub fn controlled_kick(axis: &CharlieAxis, eps: WeakCoupling) -> Mat4 {
    tensor(&axis.plus_projector(), &pauli::IDENTITY) + tensor(&axis.minus_projector(), &phase_kick(eps))
}

/// Joint state after the interaction, `U (rho (x) |+><+|) U^dagger`.
pub fn evolve_joint(rho: &Density2, axis: &CharlieAxis, eps: WeakCoupling) -> Density4 {
    let u = controlled_kick(axis, eps);
    let joint = tensor(rho.matrix(), &plus_state());
    Density4::new(u.conjugate(&joint)).expect("unitary conjugation of a valid product state")
}

/// Same as [`evolve_joint`] without the positivity check; for hot loops.
pub(crate) fn evolve_joint_matrix(rho: &Mat2, axis: &CharlieAxis, eps: WeakCoupling) -> Mat4 {
    let u = controlled_kick(axis, eps);
    u.conjugate(&tensor(rho, &plus_state()))
}

/// Bob's reduced state:
/// `(1 - cos eps)(P+ rho P+ + P- rho P-) + cos eps * rho`.
pub fn bob_state(rho: &Density2, axis: &CharlieAxis, eps: WeakCoupling) -> Density2 {
    Density2::new(bob_state_matrix(rho.matrix(), axis, eps)).expect("dephasing channel is CPTP")
}

pub(crate) fn bob_state_matrix(rho: &Mat2, axis: &CharlieAxis, eps: WeakCoupling) -> Mat2 {
    let c = eps.epsilon().cos();
    let plus = axis.plus_projector();
    let minus = axis.minus_projector();
    (plus * *rho * plus + minus * *rho * minus).scale_real(1.0 - c) + rho.scale_real(c)
}

/// Charlie's ancilla:
/// `Tr(P+ rho) |+><+| + Tr(P- rho) K |+><+| K^dagger` with `K = exp(i eps Z)`.
pub fn charlie_state(rho: &Density2, axis: &CharlieAxis, eps: WeakCoupling) -> Density2 {
    Density2::new(charlie_state_matrix(rho.matrix(), axis, eps))
        .expect("ancilla state is a convex mixture of pure states")
}

pub(crate) fn charlie_state_matrix(rho: &Mat2, axis: &CharlieAxis, eps: WeakCoupling) -> Mat2 {
    let (kept, kicked) = omega_weights(rho, axis);
    let plus = plus_state();
    plus.scale_real(kept) + phase_kick(eps).conjugate(&plus).scale_real(kicked)
}

/// `(Tr(P+ rho), Tr(P- rho))`.
pub fn omega_weights(rho: &Mat2, axis: &CharlieAxis) -> (f64, f64) {
    (axis.plus_projector().trace_product(rho).re, axis.minus_projector().trace_product(rho).re)
}

/// Partial traces of [`evolve_joint`]; the reference route for the two
/// marginal channels above.
pub fn marginals_via_joint(rho: &Density2, axis: &CharlieAxis, eps: WeakCoupling) -> (Mat2, Mat2) {
    let joint = evolve_joint(rho, axis, eps);
    (partial_trace(joint.matrix(), Subsystem::B), partial_trace(joint.matrix(), Subsystem::C))
}

/// Bloch vector of Bob's state in dephasing form,
/// `cos(eps) r + (1 - cos(eps)) (r . omega) omega`.
pub fn bob_bloch(r: &Bloch3, axis: &CharlieAxis, eps: WeakCoupling) -> Bloch3 {
    let c = eps.epsilon().cos();
    let w = axis.omega().bloch();
    let along = (1.0 - c) * r.dot(&w);
    Bloch3 { rx: c * r.rx + along * w.rx, ry: c * r.ry + along * w.ry, rz: c * r.rz + along * w.rz }
}

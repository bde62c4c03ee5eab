//! Reference evaluations of the outcome probabilities that avoid the
//! two-qubit simulation entirely.
//!
//! Bob: `p(b|x,y,z) = 1/2 (1 + b nu_y . r')` with the dephased Bloch vector
//! `r' = cos(eps) r + (1 - cos(eps)) (r . omega_z) omega_z`.
//!
//! Charlie: the ancilla Bloch vector is
//! `(1 - q) (1, 0, 0) + q (cos 2eps, -sin 2eps, 0)` with
//! `q = (1 - r . omega_z)/2`, read out along `t`.
//!
//! Joint: `sum_{j,k} Tr[B P_j rho P_k] Tr[C A_j |+><+| A_k^dagger]` over the
//! two branches `j, k` of the interaction, with `A_+ = I`, `A_- = exp(i eps Z)`;
//! only 2x2 products are formed.

use num_complex::Complex64;

use crate::qubit_algebra::{bloch_operator, projector, Bloch3, Mat2, Matrix};
use crate::scenario::{Outcome, Scenario};
use crate::weak_channel::WeakCoupling;

fn bloch(v: [f64; 3]) -> Bloch3 {
    Bloch3 { rx: v[0], ry: v[1], rz: v[2] }
}

pub fn bob_plus(s: &Scenario, eps: WeakCoupling, x: usize, y: usize, z: usize) -> f64 {
    let r = s.preparation(x);
    let w = s.charlie_axis(z).omega().bloch();
    let nu = s.bob_axis(y).bloch();
    let c = eps.epsilon().cos();
    let rw = r.dot(&w);
    let projected = c * nu.dot(&r) + (1.0 - c) * rw * nu.dot(&w);
    0.5 * (1.0 + projected)
}

pub fn charlie_plus(s: &Scenario, eps: WeakCoupling, x: usize, z: usize) -> f64 {
    let r = s.preparation(x);
    let w = s.charlie_axis(z).omega().bloch();
    let q = 0.5 * (1.0 - r.dot(&w));
    let two = 2.0 * eps.epsilon();
    let a = bloch([(1.0 - q) + q * two.cos(), -q * two.sin(), 0.0]);
    0.5 * (1.0 + s.ancilla_axis().bloch().dot(&a))
}

pub fn joint(s: &Scenario, eps: WeakCoupling, x: usize, y: usize, z: usize) -> [[f64; 2]; 2] {
    let rho = bloch_operator(&s.preparation(x));
    let axis = s.charlie_axis(z).omega();
    let branches = [projector(&axis), projector(&axis.antipode())];
    let e = eps.epsilon();
    let zero = Complex64::new(0.0, 0.0);
    let kick: Mat2 = Matrix([[Complex64::from_polar(1.0, e), zero], [zero, Complex64::from_polar(1.0, -e)]]);
    let ops = [Mat2::identity(), kick];
    let plus = bloch_operator(&bloch([1.0, 0.0, 0.0]));

    let mut out = [[0.0; 2]; 2];
    for b in Outcome::ALL {
        let nu = s.bob_axis(y);
        let bob = projector(&if b == Outcome::Plus { nu } else { nu.antipode() });
        for c in Outcome::ALL {
            let t = s.ancilla_axis();
            let charlie = projector(&if c == Outcome::Plus { t } else { t.antipode() });
            let mut acc = zero;
            for j in 0..2 {
                for k in 0..2 {
                    let system = (bob * branches[j] * rho * branches[k]).trace();
                    let ancilla = (charlie * ops[j] * plus * ops[k].adjoint()).trace();
                    acc += system * ancilla;
                }
            }
            out[b.index()][c.index()] = acc.re;
        }
    }
    out
}

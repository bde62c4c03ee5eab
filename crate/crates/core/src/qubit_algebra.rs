//! Small dense complex linear algebra for one and two qubits.
//!
//! Two-qubit objects always use the subsystem order (system, ancilla): the
//! first Kronecker factor is the slot measured by Bob, the second is
//! Charlie's ancilla.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Slack on the Bloch-norm constraint `|r| <= 1`.
pub const NORM_SLACK: f64 = 1e-12;
/// Entrywise tolerance for hermiticity and unit trace.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_SLACK: f64 = -1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense square complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix<const N: usize>(pub [[Complex64; N]; N]);

pub type Mat2 = Matrix<2>;
pub type Mat4 = Matrix<4>;

impl<const N: usize> Matrix<N> {
    pub fn zeros() -> Self {
        Matrix([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_real_diagonal(d: [f64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = Complex64::new(d[i], 0.0);
        }
        m
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|v| *v *= s);
        m
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().flatten().zip(other.0.iter().flatten()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `self * rho * self^dagger`.
    pub fn conjugate(&self, rho: &Self) -> Self {
        *self * *rho * self.adjoint()
    }

    /// `trace(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        let mut acc = ZERO;
        for i in 0..N {
            for k in 0..N {
                acc += self.0[i][k] * other.0[k][i];
            }
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl<const N: usize> Default for Matrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Index<(usize, usize)> for Matrix<N> {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Matrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Neg for Matrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_real(-1.0)
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

/// Pauli matrices and the 2x2 identity.
pub mod pauli {
    use super::{Complex64, Mat2, Matrix, I, ONE, ZERO};

    pub const IDENTITY: Mat2 = Matrix([[ONE, ZERO], [ZERO, ONE]]);
    pub const X: Mat2 = Matrix([[ZERO, ONE], [ONE, ZERO]]);
    pub const Y: Mat2 = Matrix([[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]]);
    pub const Z: Mat2 = Matrix([[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]]);

    /// `[X, Y, Z]`.
    pub const ALL: [Mat2; 3] = [X, Y, Z];
}

/// Real 3-vector with norm at most one: a qubit state in Bloch form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bloch3 {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl Bloch3 {
    pub const ORIGIN: Bloch3 = Bloch3 { rx: 0.0, ry: 0.0, rz: 0.0 };

    pub fn new(rx: f64, ry: f64, rz: f64) -> Result<Self> {
        let b = Bloch3 { rx, ry, rz };
        if !(rx.is_finite() && ry.is_finite() && rz.is_finite()) {
            return Err(Error::InvalidState(format!("non-finite Bloch vector {b:?}")));
        }
        if b.norm() > 1.0 + NORM_SLACK {
            return Err(Error::InvalidState(format!("Bloch vector norm {} exceeds 1", b.norm())));
        }
        Ok(b)
    }

    pub fn from_array(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.rx, self.ry, self.rz]
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Bloch3) -> f64 {
        self.rx * other.rx + self.ry * other.ry + self.rz * other.rz
    }

    pub fn max_abs_diff(&self, other: &Bloch3) -> f64 {
        (self.rx - other.rx).abs().max((self.ry - other.ry).abs()).max((self.rz - other.rz).abs())
    }
}

/// Unit-norm Bloch vector: a pure state or a measurement axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitBloch3(Bloch3);

impl UnitBloch3 {
    pub const X: UnitBloch3 = UnitBloch3(Bloch3 { rx: 1.0, ry: 0.0, rz: 0.0 });
    pub const Y: UnitBloch3 = UnitBloch3(Bloch3 { rx: 0.0, ry: 1.0, rz: 0.0 });
    pub const Z: UnitBloch3 = UnitBloch3(Bloch3 { rx: 0.0, ry: 0.0, rz: 1.0 });

    pub fn new(rx: f64, ry: f64, rz: f64) -> Result<Self> {
        let b = Bloch3 { rx, ry, rz };
        let n = b.norm();
        if !n.is_finite() || (n - 1.0).abs() > NORM_SLACK {
            return Err(Error::InvalidState(format!("axis {b:?} has norm {n}, expected 1")));
        }
        Ok(UnitBloch3(b))
    }

    pub fn from_array(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    /// Point on the sphere at polar angle `theta` and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        UnitBloch3(Bloch3 { rx: st * cp, ry: st * sp, rz: ct })
    }

    pub fn bloch(&self) -> Bloch3 {
        self.0
    }

    pub fn antipode(&self) -> Self {
        UnitBloch3(Bloch3 { rx: -self.0.rx, ry: -self.0.ry, rz: -self.0.rz })
    }

    pub fn to_array(self) -> [f64; 3] {
        self.0.to_array()
    }
}

impl From<UnitBloch3> for Bloch3 {
    fn from(u: UnitBloch3) -> Bloch3 {
        u.0
    }
}

/// `(I + r.sigma)/2` for any real vector, with no validation.
pub fn bloch_operator(r: &Bloch3) -> Mat2 {
    let half = 0.5;
    Matrix([
        [Complex64::new(half * (1.0 + r.rz), 0.0), Complex64::new(half * r.rx, -half * r.ry)],
        [Complex64::new(half * r.rx, half * r.ry), Complex64::new(half * (1.0 - r.rz), 0.0)],
    ])
}

/// Rank-one projector onto the pure state with Bloch vector `axis`.
pub fn projector(axis: &UnitBloch3) -> Mat2 {
    bloch_operator(&axis.bloch())
}

/// Eigenvalues of a 2x2 Hermitian matrix, ascending.
pub fn hermitian_eigenvalues2(m: &Mat2) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean - radius, mean + radius]
}

/// Eigenvalues of a 4x4 Hermitian matrix, ascending.
///
/// The matrix `A + iB` is embedded as the real symmetric `[[A, -B], [B, A]]`,
/// diagonalized with cyclic Jacobi rotations; every eigenvalue appears twice
/// in the embedding.
pub fn hermitian_eigenvalues4(m: &Mat4) -> [f64; 4] {
    let mut s = [[0.0f64; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            // symmetrize so tiny anti-Hermitian noise cannot stall Jacobi
            let h = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            s[i][j] = h.re;
            s[i + 4][j + 4] = h.re;
            s[i][j + 4] = -h.im;
            s[i + 4][j] = h.im;
        }
    }
    for _sweep in 0..64 {
        let off: f64 = (0..8)
            .flat_map(|i| (0..8).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s[i][j] * s[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..8 {
            for q in (p + 1)..8 {
                if s[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..8 {
                    let skp = s[k][p];
                    let skq = s[k][q];
                    s[k][p] = c * skp - sn * skq;
                    s[k][q] = sn * skp + c * skq;
                }
                for k in 0..8 {
                    let spk = s[p][k];
                    let sqk = s[q][k];
                    s[p][k] = c * spk - sn * sqk;
                    s[q][k] = sn * spk + c * sqk;
                }
            }
        }
    }
    let mut diag: Vec<f64> = (0..8).map(|i| s[i][i]).collect();
    diag.sort_by(f64::total_cmp);
    [diag[0], diag[2], diag[4], diag[6]]
}

fn check_density<const N: usize>(m: &Matrix<N>, min_eig: impl Fn(&Matrix<N>) -> f64) -> Result<()> {
    if !m.is_finite() {
        return Err(Error::InvalidState("non-finite matrix entry".into()));
    }
    let herm = m.hermiticity_error();
    if herm > HERMITIAN_TOL {
        return Err(Error::InvalidState(format!("not Hermitian (error {herm:e})")));
    }
    let tr = m.trace();
    if (tr - Complex64::new(1.0, 0.0)).norm() > HERMITIAN_TOL {
        return Err(Error::InvalidState(format!("trace {tr} != 1")));
    }
    let low = min_eig(m);
    if low < PSD_SLACK {
        return Err(Error::InvalidState(format!("negative eigenvalue {low:e}")));
    }
    Ok(())
}

/// Validated single-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Density2(Mat2);

impl Density2 {
    pub fn new(m: Mat2) -> Result<Self> {
        check_density(&m, |m| hermitian_eigenvalues2(m)[0])?;
        Ok(Density2(m))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn maximally_mixed() -> Self {
        Density2(pauli::IDENTITY.scale_real(0.5))
    }
}

/// Validated two-qubit density matrix in (system, ancilla) order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Density4(Mat4);

impl Density4 {
    pub fn new(m: Mat4) -> Result<Self> {
        check_density(&m, |m| hermitian_eigenvalues4(m)[0])?;
        Ok(Density4(m))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }
}

pub fn bloch_to_density(r: &Bloch3) -> Result<Density2> {
    let r = Bloch3::new(r.rx, r.ry, r.rz)?;
    Ok(Density2(bloch_operator(&r)))
}

pub fn density_to_bloch(rho: &Density2) -> Result<Bloch3> {
    // re-validate: Density2 can only be built through `new`, but the check is cheap
    check_density(&rho.0, |m| hermitian_eigenvalues2(m)[0])?;
    let [x, y, z] = pauli::ALL.map(|s| rho.0.trace_product(&s).re);
    Ok(Bloch3 { rx: x, ry: y, rz: z })
}

/// Kronecker product `a (x) b`, `a` in the first slot.
pub fn tensor(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    m
}

/// Which subsystem of a two-qubit operator survives a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    /// First slot: Bob's system.
    B,
    /// Second slot: Charlie's ancilla.
    C,
}

pub fn partial_trace(m: &Mat4, keep: Subsystem) -> Mat2 {
    let mut out = Mat2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = match keep {
                Subsystem::B => (0..2).map(|k| m[(2 * i + k, 2 * j + k)]).sum(),
                Subsystem::C => (0..2).map(|k| m[(2 * k + i, 2 * k + j)]).sum(),
            };
        }
    }
    out
}

//! Small dense complex linear algebra for two-qubit work.
//!
//! Everything here is fixed-size and stack allocated. Two-qubit vectors and
//! matrices use the computational basis in the order |00⟩, |01⟩, |10⟩, |11⟩,
//! with the first tensor factor as the most significant bit. This order is
//! used everywhere in the crate and is not configurable.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Sweep budget shared by the iterative eigensolvers.
pub const MAX_SWEEPS: usize = 500;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A complex column vector of fixed length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CVec<const N: usize>(pub [C64; N]);

pub type CVec2 = CVec<2>;
pub type CVec4 = CVec<4>;

/// A complex square matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<const N: usize>(pub [[C64; N]; N]);

pub type CMat2 = CMat<2>;
pub type CMat4 = CMat<4>;

impl<const N: usize> CVec<N> {
    pub fn zeros() -> Self {
        CVec([ZERO; N])
    }

    /// The `k`-th computational basis vector.
    pub fn basis(k: usize) -> Self {
        let mut v = Self::zeros();
        v.0[k] = ONE;
        v
    }

    pub fn from_real(re: [f64; N]) -> Self {
        CVec(re.map(|x| C64::new(x, 0.0)))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, k: C64) -> Self {
        CVec(self.0.map(|z| z * k))
    }

    pub fn scale_re(&self, k: f64) -> Self {
        CVec(self.0.map(|z| z * k))
    }

    /// Hermitian inner product ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> C64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// The projector-like outer product |self⟩⟨self|.
    pub fn outer(&self) -> CMat<N> {
        let mut m = CMat::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[i] * self.0[j].conj();
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<const N: usize> Index<usize> for CVec<N> {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl<const N: usize> Add for CVec<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for (a, b) in out.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        out
    }
}

impl<const N: usize> CMat<N> {
    pub fn zeros() -> Self {
        CMat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_diag(d: [C64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn from_real_diag(d: [f64; N]) -> Self {
        Self::from_diag(d.map(|x| C64::new(x, 0.0)))
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        CMat(rows.map(|r| r.map(|x| C64::new(x, 0.0))))
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        CMat(self.0.map(|r| r.map(|z| z.conj())))
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn scale(&self, k: C64) -> Self {
        CMat(self.0.map(|r| r.map(|z| z * k)))
    }

    pub fn scale_re(&self, k: f64) -> Self {
        CMat(self.0.map(|r| r.map(|z| z * k)))
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn apply(&self, v: &CVec<N>) -> CVec<N> {
        let mut out = CVec::zeros();
        for i in 0..N {
            out.0[i] = (0..N).map(|j| self.0[i][j] * v.0[j]).sum();
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Largest entrywise deviation `max |self - other|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `U†U = I` entrywise within `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.adjoint() * *self).max_abs_diff(&Self::identity()) <= tol
    }

    /// Similarity transform `u · self · u†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        *u * *self * u.adjoint()
    }

    pub fn column(&self, j: usize) -> CVec<N> {
        let mut v = CVec::zeros();
        for i in 0..N {
            v.0[i] = self.0[i][j];
        }
        v
    }
}

impl CMat2 {
    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }
}

impl<const N: usize> Index<(usize, usize)> for CMat<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMat<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for CMat<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..N {
            for j in 0..N {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl<const N: usize> Sub for CMat<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..N {
            for j in 0..N {
                out.0[i][j] -= rhs.0[i][j];
            }
        }
        out
    }
}

impl<const N: usize> Mul for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

/// Tensor product `a ⊗ b`; `a` acts on the first qubit.
pub fn kron(a: &CMat2, b: &CMat2) -> CMat4 {
    let mut m = CMat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    m
}

/// Tensor product of two one-qubit kets.
pub fn kron_vec(a: &CVec2, b: &CVec2) -> CVec4 {
    CVec([a.0[0] * b.0[0], a.0[0] * b.0[1], a.0[1] * b.0[0], a.0[1] * b.0[1]])
}

/// Pauli matrices.
pub fn pauli_x() -> CMat2 {
    CMat::from_real([[0.0, 1.0], [1.0, 0.0]])
}

pub fn pauli_y() -> CMat2 {
    CMat([[ZERO, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), ZERO]])
}

pub fn pauli_z() -> CMat2 {
    CMat::from_real_diag([1.0, -1.0])
}

/// Complex Givens rotation `G = [[c, s], [-s̄, c]]` with real `c`, chosen so
/// that `G · [x, y]ᵀ` has a zero second component.
#[derive(Clone, Copy, Debug)]
struct Givens {
    c: f64,
    s: C64,
}

impl Givens {
    fn zeroing(x: C64, y: C64) -> Self {
        let ay = y.norm();
        if ay == 0.0 {
            return Givens { c: 1.0, s: ZERO };
        }
        let ax = x.norm();
        if ax == 0.0 {
            return Givens { c: 0.0, s: y.conj() / ay };
        }
        let r = ax.hypot(ay);
        Givens {
            c: ax / r,
            s: (x / ax) * y.conj() / r,
        }
    }

    /// Rows `p, q` ← G · rows, over columns `cols`.
    fn apply_left<const N: usize>(
        &self,
        m: &mut CMat<N>,
        p: usize,
        q: usize,
        cols: std::ops::RangeInclusive<usize>,
    ) {
        for j in cols {
            let a = m.0[p][j];
            let b = m.0[q][j];
            m.0[p][j] = a * self.c + self.s * b;
            m.0[q][j] = -self.s.conj() * a + b * self.c;
        }
    }

    /// Columns `p, q` ← columns · G†, over rows `rows`.
    fn apply_right_adjoint<const N: usize>(
        &self,
        m: &mut CMat<N>,
        p: usize,
        q: usize,
        rows: std::ops::RangeInclusive<usize>,
    ) {
        for i in rows {
            let a = m.0[i][p];
            let b = m.0[i][q];
            m.0[i][p] = a * self.c + b * self.s.conj();
            m.0[i][q] = -a * self.s + b * self.c;
        }
    }
}

/// Reduce to upper Hessenberg form by unitary similarity.
fn hessenberg<const N: usize>(m: &mut CMat<N>) {
    if N < 3 {
        return;
    }
    for k in 0..N - 2 {
        for i in (k + 2..N).rev() {
            let g = Givens::zeroing(m.0[i - 1][k], m.0[i][k]);
            g.apply_left(m, i - 1, i, 0..=N - 1);
            g.apply_right_adjoint(m, i - 1, i, 0..=N - 1);
            m.0[i][k] = ZERO;
        }
    }
}

/// Eigenvalue of the 2×2 block `[[a, b], [c, d]]` nearest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// All eigenvalues of a general complex square matrix, unordered.
///
/// Hessenberg reduction followed by explicitly shifted QR steps with
/// Wilkinson shifts and deflation.
pub fn eigvals_general<const N: usize>(m: &CMat<N>) -> Result<[C64; N]> {
    if !m.is_finite() {
        return Err(Error::NonFinite("eigenvalue input"));
    }
    let mut out = [ZERO; N];
    if N == 0 {
        return Ok(out);
    }
    let mut h = *m;
    hessenberg(&mut h);
    let norm = h.max_abs();
    if norm == 0.0 {
        return Ok(out);
    }
    let floor = f64::EPSILON * norm;

    let mut hi = N - 1;
    let mut iterations = 0usize;
    let mut since_deflation = 0usize;
    while hi > 0 {
        // Locate the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h.0[lo][lo - 1].norm();
            let scale = h.0[lo][lo].norm() + h.0[lo - 1][lo - 1].norm();
            if sub <= f64::EPSILON * scale || sub <= floor {
                h.0[lo][lo - 1] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            out[hi] = h.0[hi][hi];
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        iterations += 1;
        since_deflation += 1;
        if iterations > MAX_SWEEPS * N {
            return Err(Error::NoConvergence {
                routine: "eigvals_general",
                iterations,
            });
        }

        let mu = if since_deflation % 11 == 10 {
            // Exceptional shift to break cycles.
            h.0[hi][hi] + C64::new(0.75 * h.0[hi][hi - 1].norm(), 0.0)
        } else {
            wilkinson_shift(
                h.0[hi - 1][hi - 1],
                h.0[hi - 1][hi],
                h.0[hi][hi - 1],
                h.0[hi][hi],
            )
        };

        for i in lo..=hi {
            h.0[i][i] -= mu;
        }
        let mut rotations = [Givens { c: 1.0, s: ZERO }; N];
        for k in lo..hi {
            let g = Givens::zeroing(h.0[k][k], h.0[k + 1][k]);
            g.apply_left(&mut h, k, k + 1, k..=hi);
            h.0[k + 1][k] = ZERO;
            rotations[k] = g;
        }
        for k in lo..hi {
            rotations[k].apply_right_adjoint(&mut h, k, k + 1, lo..=(k + 2).min(hi));
        }
        for i in lo..=hi {
            h.0[i][i] += mu;
        }
    }
    out[0] = h.0[0][0];
    Ok(out)
}

/// Eigenvalues of a general 4×4 complex matrix.
pub fn eigvals4_general(m: &CMat4) -> Result<[C64; 4]> {
    eigvals_general(m)
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as the columns of the second matrix. Only the Hermitian
/// part `(m + m†)/2` is used.
pub fn eigh<const N: usize>(m: &CMat<N>) -> Result<([f64; N], CMat<N>)> {
    if !m.is_finite() {
        return Err(Error::NonFinite("Hermitian eigensolver input"));
    }
    let mut a = (*m + m.adjoint()).scale_re(0.5);
    let mut v = CMat::<N>::identity();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..N)
            .flat_map(|p| (p + 1..N).map(move |q| (p, q)))
            .map(|(p, q)| a.0[p][q].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-16 * scale {
            converged = true;
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                let g = a.0[p][q];
                let ag = g.norm();
                if ag <= 1e-300 {
                    continue;
                }
                let phase = g / ag;
                let app = a.0[p][p].re;
                let aqq = a.0[q][q].re;
                let zeta = (aqq - app) / (2.0 * ag);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = diag-phase · real rotation, acting on (p, q).
                let mut j = CMat::<N>::identity();
                j.0[p][p] = C64::new(c, 0.0);
                j.0[p][q] = C64::new(s, 0.0);
                j.0[q][p] = -phase.conj() * s;
                j.0[q][q] = phase.conj() * c;
                a = j.adjoint() * a * j;
                a.0[p][q] = ZERO;
                a.0[q][p] = ZERO;
                v = v * j;
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "eigh",
            iterations: MAX_SWEEPS,
        });
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&x, &y| a.0[x][x].re.total_cmp(&a.0[y][y].re));
    let values = order.map(|k| a.0[k][k].re);
    let mut vectors = CMat::<N>::zeros();
    for (col, &k) in order.iter().enumerate() {
        for i in 0..N {
            vectors.0[i][col] = v.0[i][k];
        }
    }
    Ok((values, vectors))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh<const N: usize>(m: &CMat<N>) -> Result<[f64; N]> {
    eigh(m).map(|(values, _)| values)
}

/// Singular values in descending order, by one-sided Jacobi
/// orthogonalisation of the columns.
///
/// Small singular values come out with absolute accuracy near machine
/// precision relative to the largest, which squaring-based routes lose.
pub fn singular_values<const N: usize>(m: &CMat<N>) -> Result<[f64; N]> {
    if !m.is_finite() {
        return Err(Error::NonFinite("singular value input"));
    }
    let mut cols: [CVec<N>; N] = std::array::from_fn(|j| m.column(j));
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..N {
            for j in i + 1..N {
                let a = cols[i].norm_sqr();
                let b = cols[j].norm_sqr();
                let g = cols[i].inner(&cols[j]);
                let ag = g.norm();
                if ag == 0.0 || ag <= f64::EPSILON * (a * b).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotate the phase away, then apply a real rotation.
                let cj = cols[j].scale(g.conj() / ag);
                let zeta = (b - a) / (2.0 * ag);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let ci = cols[i];
                cols[i] = ci.scale_re(cs) + cj.scale_re(-sn);
                cols[j] = ci.scale_re(sn) + cj.scale_re(cs);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "singular_values",
            iterations: MAX_SWEEPS,
        });
    }
    let mut sv = cols.map(|c| c.norm());
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// A validated two-qubit density operator: Hermitian, unit trace and
/// positive semidefinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix2Q(CMat4);

impl DensityMatrix2Q {
    pub fn matrix(&self) -> &CMat4 {
        &self.0
    }

    pub fn into_inner(self) -> CMat4 {
        self.0
    }

    /// `|ψ⟩⟨ψ|/⟨ψ|ψ⟩`.
    pub fn from_ket(psi: &CVec4) -> Result<Self> {
        let n = psi.norm_sqr();
        if !psi.is_finite() {
            return Err(Error::NonFinite("ket"));
        }
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(DensityMatrix2Q(psi.outer().scale_re(1.0 / n)))
    }

    /// Wrap a matrix the caller built as a convex mixture of pure states.
    pub(crate) fn from_trusted(m: CMat4) -> Self {
        DensityMatrix2Q(m)
    }
}

/// Check that `rho` is a density matrix within the absolute tolerance `tol`.
///
/// The result is the Hermitian part of `rho`. Eigenvalues in `[-tol, 0)`
/// are clamped to zero, in which case the matrix is rebuilt from its
/// clamped spectrum.
pub fn validate_density(rho: &CMat4, tol: f64) -> Result<DensityMatrix2Q> {
    if !rho.is_finite() {
        return Err(Error::NonFinite("density matrix"));
    }
    let herm_dev = rho.max_abs_diff(&rho.adjoint());
    if herm_dev > tol {
        return Err(Error::NotHermitian(herm_dev));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::Trace(tr.re));
    }
    let herm = (*rho + rho.adjoint()).scale_re(0.5);
    let (values, vectors) = eigh(&herm)?;
    if values[0] < -tol {
        return Err(Error::Negative(values[0]));
    }
    if values[0] >= 0.0 {
        return Ok(DensityMatrix2Q(herm));
    }
    let clamped = values.map(|x| x.max(0.0));
    Ok(DensityMatrix2Q(
        vectors * CMat4::from_real_diag(clamped) * vectors.adjoint(),
    ))
}

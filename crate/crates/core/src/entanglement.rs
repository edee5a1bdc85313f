//! Two-qubit concurrence and entanglement of formation.
//!
//! Three routes compute the same concurrence:
//!
//! * [`concurrence_spectral`]: the defining formula, `λᵢ = √eig(ρ ρ̃)` with
//!   `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`, via the general eigensolver.
//! * [`concurrence`]: `λᵢ` as singular values of `τ = Vᵀ (σy⊗σy) V` for any
//!   decomposition `ρ = V V†`. Rank-deficient states keep their exact zeros
//!   here, whereas taking square roots of round-off eigenvalues in the
//!   spectral route costs about 1e-8 of accuracy.
//! * [`concurrence_two_kets`]: the closed form of the previous route for
//!   rank-two states, used in the optimizer inner loop.

use std::fmt;

use crate::error::{Error, Result};
use crate::qmat::{eigh, eigvals4_general, singular_values, CMat4, CVec4, DensityMatrix2Q, C64};

/// Round-off allowance for negative eigenvalues before they are treated as
/// an invalid state.
pub const CLAMP_TOL: f64 = 1e-10;

/// Eigenvalues of `ρ` at or below this are dropped from the decomposition.
pub const RANK_EPS: f64 = 1e-14;

/// Wootters concurrence, in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct Concurrence(f64);

impl Concurrence {
    pub const ZERO: Concurrence = Concurrence(0.0);
    pub const ONE: Concurrence = Concurrence(1.0);

    /// Accepts `[-CLAMP_TOL, 1 + CLAMP_TOL]` and clamps into `[0, 1]`.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&value) {
            return Err(Error::domain("concurrence", value, "[0, 1]"));
        }
        Ok(Concurrence(value.clamp(0.0, 1.0)))
    }

    pub(crate) fn clamped(value: f64) -> Self {
        Concurrence(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Concurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Entanglement of formation in ebits.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct Entanglement(f64);

impl Entanglement {
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || !(0.0..=1.0).contains(&value) {
            return Err(Error::domain("entanglement", value, "[0, 1]"));
        }
        Ok(Entanglement(value))
    }
}

impl fmt::Display for Entanglement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The bilinear form `aᵀ (σy⊗σy) b`.
#[inline]
pub fn spin_flip_form(a: &CVec4, b: &CVec4) -> C64 {
    let (a, b) = (&a.0, &b.0);
    -a[0] * b[3] + a[1] * b[2] + a[2] * b[1] - a[3] * b[0]
}

/// `2|ad − bc|` on the normalized amplitudes.
pub fn concurrence_pure(psi: &CVec4) -> Result<Concurrence> {
    if !psi.is_finite() {
        return Err(Error::NonFinite("ket"));
    }
    let n = psi.norm_sqr();
    if n == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let a = &psi.0;
    Ok(Concurrence::clamped(2.0 * (a[0] * a[3] - a[1] * a[2]).norm() / n))
}

/// Concurrence of `(|a⟩⟨a| + |b⟩⟨b|) / (⟨a|a⟩ + ⟨b|b⟩)`.
///
/// With `τ` the 2×2 spin-flip form of the two kets, `λ₁ − λ₂` equals
/// `√(‖τ‖²_F − 2|det τ|)`.
#[inline]
pub fn concurrence_two_kets(a: &CVec4, b: &CVec4) -> f64 {
    let t11 = spin_flip_form(a, a);
    let t12 = spin_flip_form(a, b);
    let t22 = spin_flip_form(b, b);
    let frob = t11.norm_sqr() + 2.0 * t12.norm_sqr() + t22.norm_sqr();
    let det = (t11 * t22 - t12 * t12).norm();
    let tr = a.norm_sqr() + b.norm_sqr();
    ((frob - 2.0 * det).max(0.0).sqrt() / tr).min(1.0)
}

/// Concurrence of `Σ|vᵢ⟩⟨vᵢ| / Σ⟨vᵢ|vᵢ⟩` for up to four kets.
pub fn concurrence_of_ensemble(kets: &[CVec4]) -> Result<Concurrence> {
    if kets.is_empty() || kets.len() > 4 {
        return Err(Error::domain("ensemble size", kets.len() as f64, "1..=4"));
    }
    let tr: f64 = kets.iter().map(CVec4::norm_sqr).sum();
    if tr == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let mut tau = CMat4::zeros();
    for (i, a) in kets.iter().enumerate() {
        for (j, b) in kets.iter().enumerate() {
            tau[(i, j)] = spin_flip_form(a, b);
        }
    }
    let sv = singular_values(&tau)?;
    Ok(Concurrence::clamped((sv[0] - sv[1] - sv[2] - sv[3]) / tr))
}

/// Concurrence of a density matrix.
pub fn concurrence(rho: &DensityMatrix2Q) -> Result<Concurrence> {
    let (values, vectors) = eigh(rho.matrix())?;
    if values[0] < -CLAMP_TOL {
        return Err(Error::Negative(values[0]));
    }
    let kets: Vec<CVec4> = values
        .iter()
        .enumerate()
        .filter(|(_, &mu)| mu > RANK_EPS)
        .map(|(k, &mu)| vectors.column(k).scale_re(mu.sqrt()))
        .collect();
    if kets.is_empty() {
        return Err(Error::ZeroNorm);
    }
    // τ is built from unit-trace ρ; normalise by the retained weight.
    concurrence_of_ensemble(&kets)
}

/// `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`.
pub fn spin_flip(rho: &CMat4) -> CMat4 {
    // σy⊗σy is real: ±1 on the anti-diagonal.
    let sign = [1.0, -1.0, -1.0, 1.0];
    let mut out = CMat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            out[(i, j)] = rho[(3 - i, 3 - j)].conj() * (sign[i] * sign[j]);
        }
    }
    out
}

/// Concurrence straight from the eigenvalues of `ρ ρ̃`.
pub fn concurrence_spectral(rho: &DensityMatrix2Q) -> Result<Concurrence> {
    let m = *rho.matrix();
    let ev = eigvals4_general(&(m * spin_flip(&m)))?;
    let mut lambdas = [0.0; 4];
    for (l, z) in lambdas.iter_mut().zip(ev) {
        if z.re < -CLAMP_TOL {
            return Err(Error::Negative(z.re));
        }
        *l = z.re.max(0.0).sqrt();
    }
    lambdas.sort_by(|x, y| y.total_cmp(x));
    Ok(Concurrence::clamped(
        lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3],
    ))
}

/// Binary entropy in bits, `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if x.is_nan() || !(0.0..=1.0).contains(&x) {
        return Err(Error::domain("x", x, "[0, 1]"));
    }
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    Ok(term(x) + term(1.0 - x))
}

/// Entanglement of formation, `h((1 + √(1 − C²)) / 2)`.
pub fn eof(c: Concurrence) -> Entanglement {
    let c = c.value();
    let x = 0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt());
    // x lies in [1/2, 1] by construction
    let h = binary_entropy(x).unwrap_or(0.0);
    Entanglement(h.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{CMat, CVec};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_3};

    fn werner(p: f64) -> DensityMatrix2Q {
        let h = FRAC_1_SQRT_2;
        let singlet = CVec4::from_real([0.0, h, -h, 0.0]).outer();
        let m = singlet.scale_re(p) + CMat4::identity().scale_re((1.0 - p) / 4.0);
        crate::qmat::validate_density(&m, 1e-12).unwrap()
    }

    #[test]
    fn pure_examples() {
        let h = FRAC_1_SQRT_2;
        let singlet = CVec4::from_real([0.0, h, -h, 0.0]);
        assert!((concurrence_pure(&singlet).unwrap().value() - 1.0).abs() < 1e-15);
        assert_eq!(concurrence_pure(&CVec4::basis(0)).unwrap().value(), 0.0);
        assert_eq!(concurrence_pure(&CVec4::zeros()), Err(Error::ZeroNorm));

        // normalized failure branch at θ = π/3
        let (s, c) = FRAC_PI_3.sin_cos();
        let fail = CVec4::from_real([c, s / 2.0, s / 2.0, 0.0]);
        let cf = concurrence_pure(&fail).unwrap().value();
        assert!((cf - 0.6).abs() < 1e-12);
        let s2 = s * s;
        assert!((cf - s2 / (2.0 - s2)).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_is_separable() {
        let rho = crate::qmat::validate_density(&CMat4::identity().scale_re(0.25), 1e-12).unwrap();
        assert_eq!(concurrence(&rho).unwrap().value(), 0.0);
        assert_eq!(concurrence_spectral(&rho).unwrap().value(), 0.0);
    }

    #[test]
    fn werner_family() {
        // C = max(0, (3p − 1)/2)
        for &(p, expect) in &[(1.0, 1.0), (2.0 / 3.0, 0.5), (1.0 / 3.0, 0.0), (0.2, 0.0), (0.9, 0.85)] {
            let rho = werner(p);
            let c1 = concurrence(&rho).unwrap().value();
            let c2 = concurrence_spectral(&rho).unwrap().value();
            assert!((c1 - expect).abs() < 1e-12, "p={p}: {c1}");
            assert!((c2 - expect).abs() < 1e-8, "p={p}: {c2}");
        }
    }

    #[test]
    fn spin_flip_of_singlet_projector_is_itself() {
        let h = FRAC_1_SQRT_2;
        let singlet = CVec4::from_real([0.0, h, -h, 0.0]).outer();
        assert!(spin_flip(&singlet).max_abs_diff(&singlet) < 1e-16);
        // and matches the explicit Y⊗Y sandwich
        let yy = crate::qmat::kron(&crate::qmat::pauli_y(), &crate::qmat::pauli_y());
        let m = CMat4::from_real_diag([0.1, 0.2, 0.3, 0.4]) + {
            let mut off = CMat::zeros();
            off[(0, 2)] = C64::new(0.05, 0.02);
            off[(2, 0)] = C64::new(0.05, -0.02);
            off
        };
        assert!(spin_flip(&m).max_abs_diff(&(yy * m.conj() * yy)) < 1e-16);
    }

    #[test]
    fn two_kets_matches_ensemble() {
        let a = CVec([
            C64::new(0.1, 0.3),
            C64::new(0.4, 0.0),
            C64::new(-0.2, 0.1),
            C64::new(0.0, 0.2),
        ]);
        let b = CVec([
            C64::new(0.0, 0.1),
            C64::new(0.3, -0.2),
            C64::new(0.5, 0.0),
            C64::new(0.1, 0.1),
        ]);
        let fast = concurrence_two_kets(&a, &b);
        let slow = concurrence_of_ensemble(&[a, b]).unwrap().value();
        assert!((fast - slow).abs() < 1e-14);
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // −0.9 log₂ 0.9 − 0.1 log₂ 0.1
        assert!((binary_entropy(0.9).unwrap() - 0.468_995_593_589_281).abs() < 1e-12);
        assert!(binary_entropy(1.0001).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn eof_values() {
        assert_eq!(eof(Concurrence::ZERO).value(), 0.0);
        assert_eq!(eof(Concurrence::ONE).value(), 1.0);
        let e = eof(Concurrence::new(0.6).unwrap()).value();
        assert!((e - 0.468996).abs() < 1e-6);
    }

    #[test]
    fn eof_is_monotone() {
        let mut prev = 0.0;
        for k in 0..=10_000 {
            let e = eof(Concurrence::new(k as f64 / 10_000.0).unwrap()).value();
            assert!(e >= prev);
            prev = e;
        }
    }

    #[test]
    fn concurrence_clamps_roundoff_only() {
        assert_eq!(Concurrence::new(-1e-11).unwrap().value(), 0.0);
        assert_eq!(Concurrence::new(1.0 + 1e-11).unwrap().value(), 1.0);
        assert!(Concurrence::new(-1e-6).is_err());
        assert!(Concurrence::new(f64::NAN).is_err());
    }
}

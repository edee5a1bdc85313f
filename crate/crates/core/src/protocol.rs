//! Conditional states of the heralded protocol and the feed-forward mixture.
//!
//! The two target systems start in |A⟩ and end up in a superposition of |A⟩
//! and |A⊥⟩; these are encoded as |0⟩ and |1⟩ of each qubit.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use crate::entanglement::concurrence_two_kets;
use crate::error::{Error, Result};
use crate::qmat::{CMat2, CMat4, CVec, CVec4, DensityMatrix2Q, C64};

/// Coupling strength between the ancilla and each system, in radians.
///
/// `|⟨B|A⟩|² = cos²θ`. Zero coupling is excluded because the success branch
/// has vanishing probability there.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Coupling(f64);

impl Coupling {
    pub fn new(theta: f64) -> Result<Self> {
        if theta.is_finite() && theta > 0.0 && theta <= FRAC_PI_2 {
            Ok(Coupling(theta))
        } else {
            Err(Error::domain("theta", theta, "(0, pi/2]"))
        }
    }

    pub fn theta(self) -> f64 {
        self.0
    }

    /// Heralded success probability `sin²θ / 2`.
    pub fn p_succ(self) -> f64 {
        0.5 * self.0.sin().powi(2)
    }

    pub fn p_fail(self) -> f64 {
        1.0 - self.p_succ()
    }

    /// Closed-form concurrence of the normalized failure state,
    /// `sin²θ / (2 − sin²θ)`.
    pub fn failure_concurrence(self) -> f64 {
        let s2 = self.0.sin().powi(2);
        s2 / (2.0 - s2)
    }
}

/// The two heralded outcomes, as sub-normalized kets whose squared norms
/// are the outcome probabilities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalStates {
    pub psi_succ: CVec4,
    pub psi_fail: CVec4,
    pub p_succ: f64,
    pub p_fail: f64,
}

pub fn conditional_states(theta: Coupling) -> ConditionalStates {
    let (s, c) = theta.theta().sin_cos();
    let h = 0.5 * s;
    ConditionalStates {
        psi_succ: CVec4::from_real([0.0, h, -h, 0.0]),
        psi_fail: CVec4::from_real([c, h, h, 0.0]),
        p_succ: theta.p_succ(),
        p_fail: theta.p_fail(),
    }
}

/// Angles of a one-qubit special unitary
/// `[[e^{iβ} cos α, −e^{−iγ} sin α], [e^{iγ} sin α, e^{−iβ} cos α]]`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct UnitaryParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl UnitaryParams {
    pub const IDENTITY: UnitaryParams = UnitaryParams {
        alpha: 0.0,
        beta: 0.0,
        gamma: 0.0,
    };

    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        UnitaryParams { alpha, beta, gamma }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    pub fn from_array(x: [f64; 3]) -> Self {
        UnitaryParams::new(x[0], x[1], x[2])
    }

    pub fn in_bounds(&self) -> bool {
        (0.0..=FRAC_PI_2).contains(&self.alpha)
            && (0.0..TAU).contains(&self.beta)
            && (0.0..TAU).contains(&self.gamma)
    }

    /// Equivalent angles inside `α ∈ [0, π/2]`, `β, γ ∈ [0, 2π)`.
    ///
    /// The result realizes the same matrix up to a sign, so it acts
    /// identically on density matrices.
    pub fn canonical(self) -> Self {
        let UnitaryParams {
            mut alpha,
            mut beta,
            gamma,
        } = self;
        // U(α + π) = −U(α)
        alpha = alpha.rem_euclid(PI);
        // U(π − α, β, γ) = U(α, β + π, γ)
        if alpha > FRAC_PI_2 {
            alpha = PI - alpha;
            beta += PI;
        }
        UnitaryParams {
            alpha,
            beta: wrap_angle(beta),
            gamma: wrap_angle(gamma),
        }
    }
}

fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl fmt::Display for UnitaryParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.alpha, self.beta, self.gamma)
    }
}

pub fn realize_unitary(p: UnitaryParams) -> CMat2 {
    let (sa, ca) = p.alpha.sin_cos();
    let eb = C64::from_polar(1.0, p.beta);
    let eg = C64::from_polar(1.0, p.gamma);
    crate::qmat::CMat([[eb * ca, -eg.conj() * sa], [eg * sa, eb.conj() * ca]])
}

/// Which system receives the feed-forward unitary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Side {
    First,
    #[default]
    Second,
}

impl Side {
    pub fn index(self) -> u8 {
        match self {
            Side::First => 1,
            Side::Second => 2,
        }
    }

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Side::First),
            2 => Ok(Side::Second),
            _ => Err(Error::domain("side", i as f64, "{1, 2}")),
        }
    }
}

/// How the success and (retained) failure states are weighted in `ρ_w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum MixWeighting {
    /// `ρ_w = (ρ̂_succ + w U ρ̂_fail U†) / (1 + w)` with unit-trace
    /// conditional states.
    #[default]
    Equal,
    /// `ρ_w = (ρ_succ + w U ρ_fail U†) / (p_succ + w p_fail)` with the
    /// conditional states weighted by their probabilities.
    Probability,
}

impl fmt::Display for MixWeighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MixWeighting::Equal => "equal",
            MixWeighting::Probability => "probability",
        })
    }
}

impl FromStr for MixWeighting {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "equal" => Ok(MixWeighting::Equal),
            "probability" => Ok(MixWeighting::Probability),
            _ => Err(format!("unknown weighting `{s}` (expected equal or probability)")),
        }
    }
}

/// Feed-forward configuration shared by every cell of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct FeedForward {
    pub side: Side,
    pub weighting: MixWeighting,
}

impl FeedForward {
    pub fn on(side: Side) -> Self {
        FeedForward {
            side,
            ..Default::default()
        }
    }
}

/// Apply a one-qubit operator to one system of a two-qubit ket.
pub fn apply_local(u: &CMat2, side: Side, psi: &CVec4) -> CVec4 {
    let a = &psi.0;
    let m = &u.0;
    match side {
        Side::First => CVec([
            m[0][0] * a[0] + m[0][1] * a[2],
            m[0][0] * a[1] + m[0][1] * a[3],
            m[1][0] * a[0] + m[1][1] * a[2],
            m[1][0] * a[1] + m[1][1] * a[3],
        ]),
        Side::Second => CVec([
            m[0][0] * a[0] + m[0][1] * a[1],
            m[1][0] * a[0] + m[1][1] * a[1],
            m[0][0] * a[2] + m[0][1] * a[3],
            m[1][0] * a[2] + m[1][1] * a[3],
        ]),
    }
}

/// `ρ_w` for fixed coupling, mixing fraction and feed-forward, as a
/// function of the local unitary.
///
/// `ρ_w = |k₁⟩⟨k₁| + (1⊗U)|k₂⟩⟨k₂|(1⊗U)†` for two precomputed kets, so
/// evaluating the concurrence for a new unitary is cheap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mixture {
    theta: Coupling,
    w: f64,
    ff: FeedForward,
    succ: CVec4,
    fail: CVec4,
}

impl Mixture {
    pub fn new(theta: Coupling, w: f64, ff: FeedForward) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::domain("w", w, "[0, 1]"));
        }
        let st = conditional_states(theta);
        let (succ, fail) = match ff.weighting {
            MixWeighting::Equal => {
                let norm = 1.0 / (1.0 + w).sqrt();
                (
                    CVec4::from_real([0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0]).scale_re(norm),
                    st.psi_fail.scale_re((w / st.p_fail).sqrt() * norm),
                )
            }
            MixWeighting::Probability => {
                let norm = 1.0 / (st.p_succ + w * st.p_fail).sqrt();
                (
                    st.psi_succ.scale_re(norm),
                    st.psi_fail.scale_re(w.sqrt() * norm),
                )
            }
        };
        Ok(Mixture {
            theta,
            w,
            ff,
            succ,
            fail,
        })
    }

    pub fn theta(&self) -> Coupling {
        self.theta
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn feed_forward(&self) -> FeedForward {
        self.ff
    }

    /// The two weighted kets whose projectors sum to `ρ_w`.
    pub fn kets(&self, u: UnitaryParams) -> [CVec4; 2] {
        let m = realize_unitary(u);
        [self.succ, apply_local(&m, self.ff.side, &self.fail)]
    }

    /// Kets for a unitary on each side, `(U₁ ⊗ U₂)` on the failure branch.
    pub fn kets_two_sided(&self, u1: UnitaryParams, u2: UnitaryParams) -> [CVec4; 2] {
        let first = apply_local(&realize_unitary(u1), Side::First, &self.fail);
        [self.succ, apply_local(&realize_unitary(u2), Side::Second, &first)]
    }

    pub fn density(&self, u: UnitaryParams) -> DensityMatrix2Q {
        let [a, b] = self.kets(u);
        DensityMatrix2Q::from_trusted(a.outer() + b.outer())
    }

    /// Concurrence of `ρ_w` for the unitary `u`.
    pub fn concurrence(&self, u: UnitaryParams) -> f64 {
        let [a, b] = self.kets(u);
        concurrence_two_kets(&a, &b)
    }
}

/// The feed-forward mixture `ρ_w` with the default (equal) weighting.
pub fn mix_state(theta: Coupling, w: f64, u: UnitaryParams, side: Side) -> Result<DensityMatrix2Q> {
    Ok(Mixture::new(theta, w, FeedForward::on(side))?.density(u))
}

/// Same as [`mix_state`] with an explicit weighting.
pub fn mix_state_weighted(
    theta: Coupling,
    w: f64,
    u: UnitaryParams,
    ff: FeedForward,
) -> Result<DensityMatrix2Q> {
    Ok(Mixture::new(theta, w, ff)?.density(u))
}

/// `U ⊗ 1` or `1 ⊗ U` as a 4×4 matrix.
pub fn lift(u: &CMat2, side: Side) -> CMat4 {
    match side {
        Side::First => crate::qmat::kron(u, &CMat2::identity()),
        Side::Second => crate::qmat::kron(&CMat2::identity(), u),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::concurrence;
    use crate::qmat::{pauli_z, validate_density, CMat};
    use std::f64::consts::FRAC_PI_3;

    fn pi2() -> Coupling {
        Coupling::new(FRAC_PI_2).unwrap()
    }

    #[test]
    fn coupling_domain() {
        assert!(Coupling::new(0.0).is_err());
        assert!(Coupling::new(-0.1).is_err());
        assert!(Coupling::new(FRAC_PI_2 + 1e-9).is_err());
        assert!(Coupling::new(f64::NAN).is_err());
        assert!(Coupling::new(FRAC_PI_2).is_ok());
    }

    #[test]
    fn probabilities_at_half_pi_and_third_pi() {
        let st = conditional_states(pi2());
        assert!((st.p_succ - 0.5).abs() < 1e-15);
        assert!((st.p_fail - 0.5).abs() < 1e-15);
        // θ = π/2 leaves no |00⟩ component in the failure branch
        assert!(st.psi_fail[0].norm() < 1e-16);
        assert!((st.psi_fail[1].re - 0.5).abs() < 1e-15);
        assert!((st.psi_fail[2].re - 0.5).abs() < 1e-15);

        let st = conditional_states(Coupling::new(FRAC_PI_3).unwrap());
        assert!((st.p_succ - 3.0 / 8.0).abs() < 1e-15);
        assert!((st.p_fail - 5.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn ket_norms_are_probabilities() {
        for k in 1..=1000 {
            let theta = Coupling::new(FRAC_PI_2 * k as f64 / 1000.0).unwrap();
            let st = conditional_states(theta);
            assert!((st.psi_succ.norm_sqr() - st.p_succ).abs() < 1e-12);
            assert!((st.psi_fail.norm_sqr() - st.p_fail).abs() < 1e-12);
            assert!((st.p_succ + st.p_fail - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn realize_special_cases() {
        let id = realize_unitary(UnitaryParams::IDENTITY);
        assert!(id.max_abs_diff(&CMat2::identity()) < 1e-15);

        let r = realize_unitary(UnitaryParams::new(FRAC_PI_2, 0.0, 0.0));
        assert!(r.max_abs_diff(&CMat::from_real([[0.0, -1.0], [1.0, 0.0]])) < 1e-15);

        let m = realize_unitary(UnitaryParams::new(0.0, PI, 0.0));
        assert!(m.max_abs_diff(&CMat2::identity().scale_re(-1.0)) < 1e-15);
    }

    #[test]
    fn minus_identity_acts_like_identity() {
        let theta = Coupling::new(0.7).unwrap();
        let a = mix_state(theta, 0.6, UnitaryParams::IDENTITY, Side::Second).unwrap();
        let b = mix_state(theta, 0.6, UnitaryParams::new(0.0, PI, 0.0), Side::Second).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-15);
        let ca = concurrence(&a).unwrap().value();
        let cb = concurrence(&b).unwrap().value();
        assert!((ca - cb).abs() < 1e-12);
    }

    #[test]
    fn realized_matrices_are_special_unitary() {
        for &(a, b, g) in &[(0.3, 1.1, 4.0), (1.5, 6.2, 0.1), (0.0, 3.0, 3.0)] {
            let u = realize_unitary(UnitaryParams::new(a, b, g));
            assert!(u.is_unitary(1e-12));
            assert!((u.det() - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn canonical_params_act_identically() {
        let theta = Coupling::new(1.0).unwrap();
        let mix = Mixture::new(theta, 0.4, FeedForward::default()).unwrap();
        for &(a, b, g) in &[(-0.4, 1.0, 2.0), (2.0, -3.0, 9.0), (4.0, 0.5, -0.2), (1.6, 7.0, 7.0)] {
            let raw = UnitaryParams::new(a, b, g);
            let canon = raw.canonical();
            assert!(canon.in_bounds(), "{canon}");
            let d = mix.density(raw).matrix().max_abs_diff(mix.density(canon).matrix());
            assert!(d < 1e-14, "{raw} -> {canon}: {d}");
        }
    }

    #[test]
    fn w_zero_gives_singlet() {
        for &theta in &[0.1, 0.8, FRAC_PI_2] {
            let rho = mix_state(
                Coupling::new(theta).unwrap(),
                0.0,
                UnitaryParams::new(0.3, 1.0, 2.0),
                Side::Second,
            )
            .unwrap();
            let h = FRAC_1_SQRT_2;
            let singlet = CVec4::from_real([0.0, h, -h, 0.0]).outer();
            assert!(rho.matrix().max_abs_diff(&singlet) < 1e-15);
            assert!((concurrence(&rho).unwrap().value() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sigma_z_feed_forward_turns_triplet_into_singlet() {
        // (0, π/2, π/2) realizes diag(i, −i) = i σ_z
        let u = UnitaryParams::new(0.0, FRAC_PI_2, FRAC_PI_2);
        let m = realize_unitary(u);
        assert!(m.max_abs_diff(&pauli_z().scale(C64::new(0.0, 1.0))) < 1e-15);
        let rho = mix_state(pi2(), 1.0, u, Side::Second).unwrap();
        let h = FRAC_1_SQRT_2;
        let singlet = CVec4::from_real([0.0, h, -h, 0.0]).outer();
        assert!(rho.matrix().max_abs_diff(&singlet) < 1e-15);
    }

    #[test]
    fn identity_feed_forward_at_half_pi_is_separable() {
        let rho = mix_state(pi2(), 1.0, UnitaryParams::IDENTITY, Side::Second).unwrap();
        // support on {|01⟩, |10⟩}: C = 2|ρ₁₂| = 0
        assert!(rho.matrix()[(1, 2)].norm() < 1e-15);
        assert!(concurrence(&rho).unwrap().value() < 1e-12);
    }

    #[test]
    fn weightings_agree_at_half_pi() {
        let u = UnitaryParams::new(0.4, 2.0, 5.0);
        let eq = mix_state(pi2(), 0.37, u, Side::First).unwrap();
        let pr = mix_state_weighted(
            pi2(),
            0.37,
            u,
            FeedForward {
                side: Side::First,
                weighting: MixWeighting::Probability,
            },
        )
        .unwrap();
        assert!(eq.matrix().max_abs_diff(pr.matrix()) < 1e-15);
    }

    #[test]
    fn mix_state_is_a_valid_density_for_both_weightings() {
        for weighting in [MixWeighting::Equal, MixWeighting::Probability] {
            for side in [Side::First, Side::Second] {
                let ff = FeedForward { side, weighting };
                for &(theta, w) in &[(0.01, 0.5), (0.9, 1.0), (1.3, 0.001)] {
                    let rho = mix_state_weighted(
                        Coupling::new(theta).unwrap(),
                        w,
                        UnitaryParams::new(1.0, 2.0, 3.0),
                        ff,
                    )
                    .unwrap();
                    validate_density(rho.matrix(), 1e-10).unwrap();
                }
            }
        }
    }

    #[test]
    fn mix_state_rejects_bad_w() {
        let t = pi2();
        assert!(mix_state(t, -0.01, UnitaryParams::IDENTITY, Side::Second).is_err());
        assert!(mix_state(t, 1.01, UnitaryParams::IDENTITY, Side::Second).is_err());
    }

    #[test]
    fn apply_local_matches_kron() {
        let u = realize_unitary(UnitaryParams::new(0.7, 1.3, 2.9));
        let psi = CVec([
            C64::new(0.1, 0.2),
            C64::new(-0.3, 0.0),
            C64::new(0.5, -0.4),
            C64::new(0.0, 0.6),
        ]);
        for side in [Side::First, Side::Second] {
            let direct = apply_local(&u, side, &psi);
            let via = lift(&u, side).apply(&psi);
            for k in 0..4 {
                assert!((direct[k] - via[k]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn side_index_round_trip() {
        assert_eq!(Side::from_index(1).unwrap(), Side::First);
        assert_eq!(Side::from_index(2).unwrap().index(), 2);
        assert!(Side::from_index(3).is_err());
    }
}

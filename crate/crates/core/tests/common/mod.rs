#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, TAU};

use entutil::protocol::UnitaryParams;
use entutil::qmat::{kron, CMat2, CMat4, CVec, CVec4, DensityMatrix2Q, C64};
use entutil::{realize_unitary, validate_density};
use rand::Rng;

pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

pub fn complex<R: Rng>(rng: &mut R) -> C64 {
    C64::new(gaussian(rng), gaussian(rng))
}

/// Haar-random normalized ket.
pub fn random_ket<R: Rng>(rng: &mut R) -> CVec4 {
    let v = CVec([complex(rng), complex(rng), complex(rng), complex(rng)]);
    v.scale_re(1.0 / v.norm())
}

/// `G G† / tr` for a complex Gaussian `G` with `rank` columns.
pub fn random_density<R: Rng>(rng: &mut R, rank: usize) -> DensityMatrix2Q {
    let mut m = CMat4::zeros();
    for _ in 0..rank {
        m = m + random_ket(rng).outer().scale_re(rng.gen_range(0.05..1.0));
    }
    let m = m.scale_re(1.0 / m.trace().re);
    validate_density(&m, 1e-10).expect("random density matrix")
}

pub fn random_su2<R: Rng>(rng: &mut R) -> CMat2 {
    realize_unitary(UnitaryParams::new(
        rng.gen_range(0.0..FRAC_PI_2),
        rng.gen_range(0.0..TAU),
        rng.gen_range(0.0..TAU),
    ))
}

pub fn random_qubit_density<R: Rng>(rng: &mut R) -> CMat2 {
    let a = CVec([complex(rng), complex(rng)]);
    let b = CVec([complex(rng), complex(rng)]);
    let m = a.outer() + b.outer().scale_re(rng.gen_range(0.0..1.0));
    m.scale_re(1.0 / m.trace().re)
}

pub fn product_density<R: Rng>(rng: &mut R) -> DensityMatrix2Q {
    let m = kron(&random_qubit_density(rng), &random_qubit_density(rng));
    validate_density(&m, 1e-10).expect("product state")
}

/// `2|ad − bc|` for `a|00⟩ + b|01⟩ + c|10⟩ + d|11⟩`, normalized.
pub fn pure_concurrence_oracle(psi: &CVec4) -> f64 {
    let [a, b, c, d] = psi.0;
    2.0 * (a * d - b * c).norm() / psi.norm_sqr()
}

//! Maximization of the concurrence of `ρ_w` over the feed-forward unitary.
//!
//! The search is derivative-free: the concurrence has a kink where
//! `λ₁ − λ₂ − λ₃ − λ₄` crosses zero. A coarse lattice over the parameter
//! box seeds several Nelder–Mead runs and the best point wins.

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::entanglement::{concurrence_two_kets, Concurrence};
use crate::protocol::{Mixture, UnitaryParams};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig {
    /// Lattice points per axis for the seeding grid.
    pub grid: usize,
    /// Number of best lattice points refined locally.
    pub starts: usize,
    /// Simplex diameter (max-norm, radians) at which a start stops.
    pub x_tol: f64,
    /// Spread of objective values across the simplex at which a start stops.
    pub f_tol: f64,
    pub max_iterations: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            grid: 8,
            starts: 10,
            x_tol: 1e-9,
            f_tol: 1e-12,
            max_iterations: 2000,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<(), String> {
        let mut errs = Vec::new();
        if self.grid < 1 {
            errs.push("optimizer grid must be >= 1".to_string());
        }
        if self.starts < 1 {
            errs.push("optimizer starts must be >= 1".to_string());
        }
        if !(self.x_tol > 0.0) {
            errs.push(format!("optimizer x_tol must be > 0, got {}", self.x_tol));
        }
        if !(self.f_tol >= 0.0) {
            errs.push(format!("optimizer f_tol must be >= 0, got {}", self.f_tol));
        }
        if self.max_iterations == 0 {
            errs.push("optimizer max_iterations must be >= 1".to_string());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs.join("; "))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptResult {
    pub params: UnitaryParams,
    pub c_star: Concurrence,
    pub evaluations: usize,
    /// Every local search met a termination tolerance within its budget.
    pub converged: bool,
}

/// Lattice point `(i, j, k)`. A coarse α axis nests in a fine one when
/// `r_coarse − 1` divides `r_fine − 1`; β and γ nest when `r_coarse`
/// divides `r_fine`. Resolutions 8 and 64 nest on all three axes.
fn lattice_point(resolution: usize, i: usize, j: usize, k: usize) -> UnitaryParams {
    let alpha = if resolution > 1 {
        FRAC_PI_2 * i as f64 / (resolution - 1) as f64
    } else {
        0.0
    };
    let step = TAU / resolution as f64;
    UnitaryParams::new(alpha, step * j as f64, step * k as f64)
}

/// Exhaustive maximum over a `resolution³` lattice of the parameter box.
///
/// `α` takes `resolution` evenly spaced values on `[0, π/2]` (just `0` for
/// resolution 1); `β` and `γ` take `resolution` values `2πk/resolution`.
/// The first lattice point in `(α, β, γ)` lexicographic order attaining the
/// maximum is returned.
pub fn grid_oracle(mix: &Mixture, resolution: usize) -> OptResult {
    let r = resolution.max(1);
    let mut best = (f64::NEG_INFINITY, UnitaryParams::IDENTITY);
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                let p = lattice_point(r, i, j, k);
                let c = mix.concurrence(p);
                if c > best.0 {
                    best = (c, p);
                }
            }
        }
    }
    OptResult {
        params: best.1,
        c_star: Concurrence::clamped(best.0),
        evaluations: r * r * r,
        converged: true,
    }
}

struct LocalResult<const D: usize> {
    x: [f64; D],
    value: f64,
    evaluations: usize,
    converged: bool,
}

/// Maximize `f` by Nelder–Mead from `x0` with an axis-aligned initial
/// simplex of edge `step`.
fn nelder_mead<const D: usize, F>(
    f: F,
    x0: [f64; D],
    step: [f64; D],
    cfg: &OptimizerConfig,
) -> LocalResult<D>
where
    F: Fn(&[f64; D]) -> f64,
{
    // Minimize g = −f.
    let mut evaluations = 0usize;
    let mut g = |x: &[f64; D]| {
        evaluations += 1;
        -f(x)
    };

    let mut pts: Vec<([f64; D], f64)> = Vec::with_capacity(D + 1);
    pts.push((x0, g(&x0)));
    for d in 0..D {
        let mut x = x0;
        x[d] += step[d];
        let v = g(&x);
        pts.push((x, v));
    }

    let mut converged = false;
    for _ in 0..cfg.max_iterations {
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = pts[0];
        let worst = pts[D];

        let diameter = pts[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(best.0.iter()).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if diameter <= cfg.x_tol || (worst.1 - best.1).abs() <= cfg.f_tol {
            converged = true;
            break;
        }

        let mut centroid = [0.0; D];
        for (x, _) in &pts[..D] {
            for d in 0..D {
                centroid[d] += x[d] / D as f64;
            }
        }
        let along = |t: f64| -> [f64; D] {
            std::array::from_fn(|d| centroid[d] + t * (worst.0[d] - centroid[d]))
        };

        let xr = along(-1.0);
        let gr = g(&xr);
        if gr < best.1 {
            let xe = along(-2.0);
            let ge = g(&xe);
            pts[D] = if ge < gr { (xe, ge) } else { (xr, gr) };
            continue;
        }
        if gr < pts[D - 1].1 {
            pts[D] = (xr, gr);
            continue;
        }
        let (xc, gc) = if gr < worst.1 {
            let xc = along(-0.5);
            (xc, g(&xc))
        } else {
            let xc = along(0.5);
            (xc, g(&xc))
        };
        if gc < gr.min(worst.1) {
            pts[D] = (xc, gc);
            continue;
        }
        // Shrink towards the best vertex.
        for p in pts.iter_mut().skip(1) {
            let x: [f64; D] = std::array::from_fn(|d| best.0[d] + 0.5 * (p.0[d] - best.0[d]));
            *p = (x, g(&x));
        }
    }
    pts.sort_by(|a, b| a.1.total_cmp(&b.1));
    LocalResult {
        x: pts[0].0,
        value: -pts[0].1,
        evaluations,
        converged,
    }
}

/// Concurrence-maximizing one-sided unitary for a fixed mixture.
///
/// The `cfg.grid³` lattice plus the identity is evaluated, the best
/// `cfg.starts` points are refined with Nelder–Mead, and the best point
/// found is returned with canonical angles. The result is never worse than
/// the lattice maximum and is a pure function of its inputs.
pub fn optimize_unitary(mix: &Mixture, cfg: &OptimizerConfig) -> OptResult {
    let r = cfg.grid.max(1);
    let mut seeds: Vec<(f64, UnitaryParams)> = Vec::with_capacity(r * r * r + 1);
    seeds.push((mix.concurrence(UnitaryParams::IDENTITY), UnitaryParams::IDENTITY));
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                let p = lattice_point(r, i, j, k);
                seeds.push((mix.concurrence(p), p));
            }
        }
    }
    let mut evaluations = seeds.len();
    // Stable sort keeps lattice order among ties.
    seeds.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut best = seeds[0];
    let mut all_converged = true;
    if best.0 < 1.0 {
        let step = [
            if r > 1 { 0.25 * FRAC_PI_2 / (r - 1) as f64 } else { 0.25 },
            0.5 * TAU / r as f64,
            0.5 * TAU / r as f64,
        ];
        let objective = |x: &[f64; 3]| mix.concurrence(UnitaryParams::from_array(*x));
        for &(_, seed) in seeds.iter().take(cfg.starts) {
            let local = nelder_mead(objective, seed.to_array(), step, cfg);
            evaluations += local.evaluations;
            all_converged &= local.converged;
            if local.value > best.0 {
                best = (local.value, UnitaryParams::from_array(local.x));
            }
        }
    }

    let params = best.1.canonical();
    OptResult {
        params,
        c_star: Concurrence::clamped(mix.concurrence(params)),
        evaluations,
        converged: all_converged,
    }
}

/// Result of the two-sided search: one unitary per system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoSidedResult {
    pub first: UnitaryParams,
    pub second: UnitaryParams,
    pub c_star: Concurrence,
    pub evaluations: usize,
}

/// Maximize over independent unitaries on both systems (six angles).
///
/// Only used to check that acting on one system is enough; seeded from a
/// `cfg.grid`-per-axis lattice in the first unitary with the second at
/// identity plus the reverse.
pub fn optimize_two_sided(mix: &Mixture, cfg: &OptimizerConfig) -> TwoSidedResult {
    let r = cfg.grid.max(1);
    let c_of = |x: &[f64; 6]| {
        let [a, b] = mix.kets_two_sided(
            UnitaryParams::new(x[0], x[1], x[2]),
            UnitaryParams::new(x[3], x[4], x[5]),
        );
        concurrence_two_kets(&a, &b)
    };
    let mut seeds: Vec<(f64, [f64; 6])> = Vec::new();
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                let p = lattice_point(r, i, j, k).to_array();
                for x in [
                    [p[0], p[1], p[2], 0.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0, p[0], p[1], p[2]],
                ] {
                    seeds.push((c_of(&x), x));
                }
            }
        }
    }
    let mut evaluations = seeds.len();
    seeds.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = seeds[0];
    let h = 0.5 * TAU / r as f64;
    let step = [0.25, h, h, 0.25, h, h];
    for &(_, seed) in seeds.iter().take(cfg.starts) {
        let local = nelder_mead(c_of, seed, step, cfg);
        evaluations += local.evaluations;
        if local.value > best.0 {
            best = (local.value, local.x);
        }
    }
    let x = best.1;
    TwoSidedResult {
        first: UnitaryParams::new(x[0], x[1], x[2]).canonical(),
        second: UnitaryParams::new(x[3], x[4], x[5]).canonical(),
        c_star: Concurrence::clamped(best.0),
        evaluations,
    }
}

//! Sweeps over coupling and mixing fraction, and the choice of the
//! utility-maximizing fraction of failures to retain.
//!
//! The expensive part, the optimal entanglement of `ρ_w` for every
//! `(θ, w)`, does not depend on the utility, so it is tabulated once in an
//! [`EwTable`] and reused for every utility and cost.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;

use crate::entanglement::{concurrence_pure, eof, Concurrence, Entanglement};
use crate::error::{Error, Result};
use crate::optimizer::{optimize_unitary, OptimizerConfig};
use crate::protocol::{conditional_states, Coupling, FeedForward, Mixture, UnitaryParams};
use crate::utility::{net_utility, NetUtilityInputs, UtilitySpec};

/// Slack used when deciding that two net utilities are tied.
pub const TIE_TOL: f64 = 1e-12;

/// Default smallest coupling of a sweep.
pub const DEFAULT_THETA_MIN: f64 = PI / 1000.0;

/// `points` couplings evenly spaced on `[theta_min, π/2]`, both ends
/// included. A single point is `π/2`.
pub fn theta_grid(points: usize, theta_min: f64) -> Result<Vec<f64>> {
    Coupling::new(theta_min)?;
    if points == 0 {
        return Err(Error::domain("theta points", 0.0, ">= 1"));
    }
    if points == 1 {
        return Ok(vec![FRAC_PI_2]);
    }
    let span = FRAC_PI_2 - theta_min;
    let last = points - 1;
    Ok((0..points)
        .map(|i| {
            if i == last {
                FRAC_PI_2
            } else {
                theta_min + span * i as f64 / last as f64
            }
        })
        .collect())
}

/// `{0, s, 2s, …, 1}`; `step` must divide 1.
pub fn w_grid(step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0 && step <= 1.0) {
        return Err(Error::domain("w step", step, "(0, 1]"));
    }
    let n = (1.0 / step).round();
    if (n * step - 1.0).abs() > 1e-9 {
        return Err(Error::domain("w step", step, "1/k for integer k"));
    }
    let n = n as usize;
    Ok((0..=n).map(|i| i as f64 / n as f64).collect())
}

/// Per-coupling quantities shared by every `w`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaRow {
    pub theta: Coupling,
    pub p_succ: f64,
    pub p_fail: f64,
    pub c_fail: Concurrence,
    pub e_fail: Entanglement,
}

impl ThetaRow {
    pub fn new(theta: Coupling) -> Result<Self> {
        let st = conditional_states(theta);
        let c_fail = concurrence_pure(&st.psi_fail)?;
        Ok(ThetaRow {
            theta,
            p_succ: st.p_succ,
            p_fail: st.p_fail,
            c_fail,
            e_fail: eof(c_fail),
        })
    }
}

/// Optimal feed-forward for one `(θ, w)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EwCell {
    pub params: UnitaryParams,
    pub c_star: Concurrence,
    pub e_w: Entanglement,
}

impl EwCell {
    pub fn from_concurrence(params: UnitaryParams, c_star: Concurrence) -> Self {
        EwCell {
            params,
            c_star,
            e_w: eof(c_star),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EwTable {
    rows: Vec<ThetaRow>,
    ws: Vec<f64>,
    /// Row-major over `(θ, w)`.
    cells: Vec<EwCell>,
}

/// One coupling's slice of an [`EwTable`].
#[derive(Clone, Copy, Debug)]
pub struct TableRow<'a> {
    pub meta: &'a ThetaRow,
    pub ws: &'a [f64],
    pub cells: &'a [EwCell],
}

fn check_grids(thetas: &[f64], ws: &[f64]) -> Result<Vec<ThetaRow>> {
    if thetas.is_empty() {
        return Err(Error::domain("theta grid size", 0.0, ">= 1"));
    }
    if ws.is_empty() {
        return Err(Error::domain("w grid size", 0.0, ">= 1"));
    }
    if ws[0] != 0.0 {
        return Err(Error::domain("w grid start", ws[0], "{0}"));
    }
    for pair in ws.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(Error::domain("w grid", pair[1], "strictly ascending"));
        }
    }
    if let Some(&last) = ws.last() {
        if last > 1.0 {
            return Err(Error::domain("w", last, "[0, 1]"));
        }
    }
    thetas
        .iter()
        .map(|&t| Coupling::new(t).and_then(ThetaRow::new))
        .collect()
}

impl EwTable {
    /// Assemble a table from precomputed cells, e.g. read back from disk.
    pub fn from_cells(thetas: &[f64], ws: &[f64], cells: Vec<EwCell>) -> Result<Self> {
        let rows = check_grids(thetas, ws)?;
        let expected = rows.len() * ws.len();
        if cells.len() != expected {
            return Err(Error::domain("table cells", cells.len() as f64, "theta count x w count"));
        }
        Ok(EwTable {
            rows,
            ws: ws.to_vec(),
            cells,
        })
    }

    pub fn theta_rows(&self) -> &[ThetaRow] {
        &self.rows
    }

    pub fn ws(&self) -> &[f64] {
        &self.ws
    }

    pub fn cells(&self) -> &[EwCell] {
        &self.cells
    }

    pub fn len_theta(&self) -> usize {
        self.rows.len()
    }

    pub fn cell(&self, theta_index: usize, w_index: usize) -> &EwCell {
        &self.cells[theta_index * self.ws.len() + w_index]
    }

    pub fn row(&self, theta_index: usize) -> TableRow<'_> {
        let n = self.ws.len();
        TableRow {
            meta: &self.rows[theta_index],
            ws: &self.ws,
            cells: &self.cells[theta_index * n..(theta_index + 1) * n],
        }
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = TableRow<'_>> {
        (0..self.rows.len()).map(move |i| self.row(i))
    }
}

/// Worker pool selection for table construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Workers {
    /// Rayon's global pool.
    #[default]
    Auto,
    Fixed(usize),
}

/// Optimize the feed-forward for every `(θ, w)` pair.
///
/// `ws` must be strictly ascending in `[0, 1]` and start at `0`. Cells are
/// independent, so the result does not depend on scheduling or on the
/// number of workers.
pub fn build_ew_table(
    thetas: &[f64],
    ws: &[f64],
    ff: FeedForward,
    cfg: &OptimizerConfig,
    workers: Workers,
) -> Result<EwTable> {
    let rows = check_grids(thetas, ws)?;
    cfg.validate().map_err(Error::Config)?;
    let nw = ws.len();
    let compute = || -> Result<Vec<EwCell>> {
        (0..rows.len() * nw)
            .into_par_iter()
            .map(|idx| {
                let (ti, wi) = (idx / nw, idx % nw);
                let theta = rows[ti].theta;
                let mix = Mixture::new(theta, ws[wi], ff).map_err(|e| Error::Cell {
                    theta_index: ti,
                    theta: theta.theta(),
                    w_index: wi,
                    w: ws[wi],
                    source: Box::new(e),
                })?;
                let opt = optimize_unitary(&mix, cfg);
                Ok(EwCell::from_concurrence(opt.params, opt.c_star))
            })
            .collect()
    };
    let cells = match workers {
        Workers::Auto => compute()?,
        Workers::Fixed(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .expect("thread pool")
            .install(compute)?,
    };
    Ok(EwTable {
        rows,
        ws: ws.to_vec(),
        cells,
    })
}

/// Best mixing fraction for one coupling and one utility.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrategyRecord {
    pub theta: f64,
    pub spec: UtilitySpec,
    pub w_index: usize,
    pub w_opt: f64,
    /// `N(w_opt)`
    pub n_opt: f64,
    /// `N(0)`, the base strategy.
    pub n_base: f64,
    /// `n_opt / n_base`
    pub ratio: f64,
}

/// `N(w)` along a table row.
pub fn net_utility_curve(row: TableRow<'_>, spec: &UtilitySpec) -> Vec<f64> {
    let meta = row.meta;
    let e_fail = spec.argument_of(meta.c_fail, meta.e_fail);
    row.ws
        .iter()
        .zip(row.cells)
        .map(|(&w, cell)| {
            net_utility(
                &NetUtilityInputs {
                    p_succ: meta.p_succ,
                    p_fail: meta.p_fail,
                    e_w: spec.argument_of(cell.c_star, cell.e_w),
                    e_fail,
                    w,
                },
                spec,
            )
        })
        .collect()
}

/// Scan the `w` grid for the largest net utility. Ties within
/// [`TIE_TOL`] go to the smallest `w`.
pub fn find_wopt(row: TableRow<'_>, spec: &UtilitySpec) -> StrategyRecord {
    let curve = net_utility_curve(row, spec);
    let max = curve.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w_index = curve
        .iter()
        .position(|&n| n >= max - TIE_TOL)
        .unwrap_or(0);
    let n_base = curve[0];
    let n_opt = curve[w_index];
    StrategyRecord {
        theta: row.meta.theta.theta(),
        spec: *spec,
        w_index,
        w_opt: row.ws[w_index],
        n_opt,
        n_base,
        ratio: n_opt / n_base,
    }
}

/// Records for every coupling and spec, ordered by `(θ index, spec index)`.
pub fn strategies(table: &EwTable, specs: &[UtilitySpec]) -> Vec<StrategyRecord> {
    table
        .iter_rows()
        .flat_map(|row| specs.iter().map(move |s| find_wopt(row, s)))
        .collect()
}

#[derive(Clone, Debug)]
pub struct Sweep {
    pub table: EwTable,
    pub records: Vec<StrategyRecord>,
}

/// Build the table once and evaluate every spec on it.
pub fn sweep(
    thetas: &[f64],
    ws: &[f64],
    specs: &[UtilitySpec],
    ff: FeedForward,
    cfg: &OptimizerConfig,
    workers: Workers,
) -> Result<Sweep> {
    let table = build_ew_table(thetas, ws, ff, cfg, workers)?;
    let records = strategies(&table, specs);
    Ok(Sweep { table, records })
}

//! Library side of the `entutil` command-line tool: state files, run
//! configuration and CSV output.

use std::f64::consts::FRAC_PI_2;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::entanglement::{concurrence, concurrence_pure, eof, Concurrence, Entanglement};
use crate::error::Error as NumError;
use crate::optimizer::OptimizerConfig;
use crate::protocol::{FeedForward, MixWeighting, Side, UnitaryParams};
use crate::qmat::{validate_density, CMat4, CVec, CVec4, C64};
use crate::strategy::{
    strategies, sweep, theta_grid, w_grid, EwCell, EwTable, StrategyRecord, Sweep, Workers,
};
use crate::utility::{UtilityArgument, UtilityFamily, UtilitySpec};

/// Tolerance used when validating user-supplied density matrices.
pub const STATE_FILE_TOL: f64 = 1e-8;

pub const EW_TABLE_FILE: &str = "ew_table.csv";
pub const STRATEGY_FILE: &str = "strategy.csv";

pub const EW_TABLE_HEADER: [&str; 7] = ["theta", "w", "alpha", "beta", "gamma", "concurrence", "eof"];
pub const STRATEGY_HEADER: [&str; 9] = [
    "theta", "family", "n", "e0", "cost", "w_opt", "N_opt", "N_base", "ratio",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error(transparent)]
    Numerical(#[from] NumError),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },

    #[error("{context}: {source}")]
    Csv {
        context: String,
        #[source]
        source: csv::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } | CliError::Csv { .. } => 1,
        }
    }

    fn io(context: impl Into<String>, source: io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    fn csv(context: impl Into<String>, source: csv::Error) -> Self {
        CliError::Csv {
            context: context.into(),
            source,
        }
    }
}

/// `n` significant digits in the style of C's `%.ng`: plain decimals for
/// moderate exponents, scientific otherwise, trailing zeros removed.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp >= -5 && exp < digits as i32 {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn num(x: f64) -> String {
    fmt_sig(x, 9)
}

/// Contents of a state file.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StateInput {
    Ket(CVec4),
    Density(CMat4),
}

/// Parse a state file: the keyword `ket` or `dm`, then 4 or 16 complex
/// numbers as whitespace-separated `re im` pairs, row-major. `#` starts a
/// comment that runs to the end of the line.
pub fn parse_state(path: &str, text: &str) -> Result<StateInput, CliError> {
    let mut tokens = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        let mut offset = 0;
        for tok in body.split_whitespace() {
            let start = offset + body[offset..].find(tok).expect("token in line");
            offset = start + tok.len();
            tokens.push((li + 1, start + 1, tok));
        }
    }
    let err = |line, column, message: String| CliError::Parse {
        path: path.to_string(),
        line,
        column,
        message,
    };
    let Some(&(l0, c0, kind)) = tokens.first() else {
        return Err(err(1, 1, "empty state file; expected `ket` or `dm`".into()));
    };
    let count = match kind {
        "ket" => 4,
        "dm" => 16,
        other => return Err(err(l0, c0, format!("expected `ket` or `dm`, found `{other}`"))),
    };
    let numbers = &tokens[1..];
    let mut values = Vec::with_capacity(2 * count);
    for &(l, c, t) in numbers.iter().take(2 * count) {
        let v: f64 = t
            .parse()
            .map_err(|_| err(l, c, format!("expected a real number, found `{t}`")))?;
        values.push(v);
    }
    if numbers.len() < 2 * count {
        let (l, c) = tokens
            .last()
            .map(|&(l, c, t)| (l, c + t.len()))
            .unwrap_or((l0, c0));
        return Err(err(
            l,
            c,
            format!(
                "`{kind}` needs {} real numbers ({count} complex), found {}",
                2 * count,
                numbers.len()
            ),
        ));
    }
    if let Some(&(l, c, t)) = numbers.get(2 * count) {
        return Err(err(l, c, format!("unexpected trailing token `{t}`")));
    }
    let z: Vec<C64> = values.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
    Ok(match count {
        4 => StateInput::Ket(CVec([z[0], z[1], z[2], z[3]])),
        _ => {
            let mut m = CMat4::zeros();
            for (k, v) in z.into_iter().enumerate() {
                m[(k / 4, k % 4)] = v;
            }
            StateInput::Density(m)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcurrenceReport {
    pub concurrence: Concurrence,
    pub eof: Entanglement,
}

impl ConcurrenceReport {
    pub fn render(&self) -> String {
        format!(
            "concurrence {:.9}\neof {:.9}\n",
            self.concurrence.value(),
            self.eof.value()
        )
    }
}

pub fn concurrence_report(state: &StateInput) -> Result<ConcurrenceReport, CliError> {
    let c = match state {
        StateInput::Ket(psi) => concurrence_pure(psi)?,
        StateInput::Density(m) => concurrence(&validate_density(m, STATE_FILE_TOL)?)?,
    };
    Ok(ConcurrenceReport {
        concurrence: c,
        eof: eof(c),
    })
}

/// `concurrence <file>`.
pub fn cmd_concurrence(path: &Path) -> Result<String, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    let state = parse_state(&path.display().to_string(), &text)?;
    Ok(concurrence_report(&state)?.render())
}

/// Settings of one `sweep` run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub theta_points: usize,
    pub theta_min: f64,
    pub w_step: f64,
    pub utilities: Vec<UtilityFamily>,
    pub costs: Vec<f64>,
    pub argument: UtilityArgument,
    pub side: Side,
    pub weighting: MixWeighting,
    pub optimizer: OptimizerConfig,
    pub out: PathBuf,
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            theta_points: 200,
            theta_min: crate::strategy::DEFAULT_THETA_MIN,
            w_step: 0.001,
            utilities: vec![
                UtilityFamily::Power { n: 1.0 },
                UtilityFamily::Power { n: 2.0 },
                UtilityFamily::Power { n: 3.0 },
            ],
            costs: vec![0.0],
            argument: UtilityArgument::Eof,
            side: Side::Second,
            weighting: MixWeighting::Equal,
            optimizer: OptimizerConfig::default(),
            out: PathBuf::from("."),
            workers: None,
        }
    }
}

impl RunConfig {
    /// Every violated field, one message each.
    pub fn validate(&self) -> Result<(), CliError> {
        let mut errs = Vec::new();
        if self.theta_points == 0 {
            errs.push("theta-points must be >= 1".to_string());
        }
        if !(self.theta_min.is_finite()
            && self.theta_min > 0.0
            && self.theta_min <= FRAC_PI_2)
        {
            errs.push(format!("theta-min must lie in (0, pi/2], got {}", self.theta_min));
        }
        if let Err(e) = w_grid(self.w_step) {
            errs.push(format!("w-step must be 1/k for a positive integer k ({e})"));
        }
        if self.utilities.is_empty() {
            errs.push("at least one --utility is required".to_string());
        }
        for u in &self.utilities {
            if let Err(e) = u.validate() {
                errs.push(format!("utility {u}: {e}"));
            }
        }
        if self.costs.is_empty() {
            errs.push("at least one --cost is required".to_string());
        }
        for &c in &self.costs {
            if !(c.is_finite() && c >= 0.0) {
                errs.push(format!("cost must be >= 0, got {c}"));
            }
        }
        if let Err(e) = self.optimizer.validate() {
            errs.push(e);
        }
        if self.workers == Some(0) {
            errs.push("workers must be >= 1".to_string());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(errs))
        }
    }

    /// Utilities × costs, utility-major.
    pub fn specs(&self) -> Vec<UtilitySpec> {
        self.utilities
            .iter()
            .flat_map(|&family| {
                self.costs.iter().map(move |&cost| UtilitySpec {
                    family,
                    cost,
                    argument: self.argument,
                })
            })
            .collect()
    }

    pub fn feed_forward(&self) -> FeedForward {
        FeedForward {
            side: self.side,
            weighting: self.weighting,
        }
    }

    /// Everything that determines the output, on one line. The worker
    /// count and output directory are left out.
    pub fn echo(&self) -> String {
        let utilities: Vec<String> = self.utilities.iter().map(|u| u.to_string()).collect();
        let costs: Vec<String> = self.costs.iter().map(|c| c.to_string()).collect();
        format!(
            "# entutil sweep theta_points={} theta_min={} w_step={} utilities={} costs={} \
             utility_of={} side={} weighting={} grid={} starts={} x_tol={:e} f_tol={:e} max_iterations={}",
            self.theta_points,
            self.theta_min,
            self.w_step,
            utilities.join(";"),
            costs.join(";"),
            self.argument,
            self.side.index(),
            self.weighting,
            self.optimizer.grid,
            self.optimizer.starts,
            self.optimizer.x_tol,
            self.optimizer.f_tol,
            self.optimizer.max_iterations,
        )
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(format!("creating {}", path.display()), e))
}

/// Write `ew_table.csv` rows sorted by `(θ, w)`.
pub fn write_ew_table<W: Write>(mut out: W, echo: &str, table: &EwTable) -> Result<(), CliError> {
    writeln!(out, "{echo}").map_err(|e| CliError::io("writing table header", e))?;
    let mut w = csv::Writer::from_writer(out);
    let ctx = "writing ew table";
    w.write_record(EW_TABLE_HEADER).map_err(|e| CliError::csv(ctx, e))?;
    for row in table.iter_rows() {
        for (&wv, cell) in row.ws.iter().zip(row.cells) {
            let p = cell.params;
            w.write_record([
                num(row.meta.theta.theta()),
                num(wv),
                num(p.alpha),
                num(p.beta),
                num(p.gamma),
                num(cell.c_star.value()),
                num(cell.e_w.value()),
            ])
            .map_err(|e| CliError::csv(ctx, e))?;
        }
    }
    w.flush().map_err(|e| CliError::io(ctx, e))
}

/// Write `strategy.csv` rows in `(θ, spec)` order.
pub fn write_strategy<W: Write>(
    mut out: W,
    echo: &str,
    records: &[StrategyRecord],
) -> Result<(), CliError> {
    writeln!(out, "{echo}").map_err(|e| CliError::io("writing strategy header", e))?;
    let mut w = csv::Writer::from_writer(out);
    let ctx = "writing strategy table";
    w.write_record(STRATEGY_HEADER).map_err(|e| CliError::csv(ctx, e))?;
    for r in records {
        let f = r.spec.family;
        w.write_record([
            num(r.theta),
            f.name().to_string(),
            num(f.exponent()),
            num(f.threshold()),
            num(r.spec.cost),
            num(r.w_opt),
            num(r.n_opt),
            num(r.n_base),
            num(r.ratio),
        ])
        .map_err(|e| CliError::csv(ctx, e))?;
    }
    w.flush().map_err(|e| CliError::io(ctx, e))
}

/// The θ grid named by a config echo line, if it has one.
fn echoed_theta_grid(line: &str) -> Option<Vec<f64>> {
    let value = |key: &str| {
        line.split_whitespace()
            .find_map(|t| t.strip_prefix(key)?.strip_prefix('='))
    };
    let points = value("theta_points")?.parse().ok()?;
    let theta_min = value("theta_min")?.parse().ok()?;
    theta_grid(points, theta_min).ok()
}

/// Read an `ew_table.csv` back into a table.
///
/// θ is printed with 9 significant digits. When the config echo line names
/// a grid that agrees with the printed values, the exact grid is used.
pub fn read_ew_table<R: io::Read>(mut input: R) -> Result<EwTable, CliError> {
    let ctx = "reading ew table";
    let mut text = String::new();
    input
        .read_to_string(&mut text)
        .map_err(|e| CliError::io(ctx, e))?;
    let echoed = text
        .lines()
        .next()
        .filter(|l| l.starts_with('#'))
        .and_then(echoed_theta_grid);
    let mut rd = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = rd.headers().map_err(|e| CliError::csv(ctx, e))?.clone();
    if headers.iter().ne(EW_TABLE_HEADER.iter().copied()) {
        return Err(CliError::Config(vec![format!(
            "unexpected ew table columns: {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )]));
    }
    let mut thetas: Vec<f64> = Vec::new();
    let mut ws: Vec<f64> = Vec::new();
    let mut cells = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| CliError::csv(ctx, e))?;
        let field = |k: usize| -> Result<f64, CliError> {
            rec[k].parse::<f64>().map_err(|_| CliError::Parse {
                path: EW_TABLE_FILE.to_string(),
                line: i + 3,
                column: k + 1,
                message: format!("bad number `{}`", &rec[k]),
            })
        };
        let (mut theta, w) = (field(0)?, field(1)?);
        // π/2 printed with 9 digits reads back slightly above π/2
        if theta > FRAC_PI_2 && theta - FRAC_PI_2 <= 1e-8 {
            theta = FRAC_PI_2;
        }
        if thetas.last() != Some(&theta) {
            thetas.push(theta);
        }
        if thetas.len() == 1 {
            ws.push(w);
        }
        let c = Concurrence::new(field(5)?)?;
        cells.push(EwCell {
            params: UnitaryParams::new(field(2)?, field(3)?, field(4)?),
            c_star: c,
            e_w: Entanglement::new(field(6)?)?,
        });
    }
    if let Some(grid) = echoed {
        let agrees = grid.len() == thetas.len()
            && grid
                .iter()
                .zip(&thetas)
                .all(|(g, t)| (g - t).abs() <= 1e-8 * g.max(1.0));
        if agrees {
            thetas = grid;
        }
    }
    Ok(EwTable::from_cells(&thetas, &ws, cells)?)
}

/// Recompute strategy records from a stored table.
pub fn strategies_from_table(table: &EwTable, specs: &[UtilitySpec]) -> Vec<StrategyRecord> {
    strategies(table, specs)
}

/// `sweep`: build the table, evaluate every spec, write both CSV files.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<Sweep, CliError> {
    cfg.validate()?;
    let thetas = theta_grid(cfg.theta_points, cfg.theta_min)?;
    let ws = w_grid(cfg.w_step)?;
    let workers = cfg.workers.map_or(Workers::Auto, Workers::Fixed);
    let result = sweep(
        &thetas,
        &ws,
        &cfg.specs(),
        cfg.feed_forward(),
        &cfg.optimizer,
        workers,
    )?;
    fs::create_dir_all(&cfg.out)
        .map_err(|e| CliError::io(format!("creating {}", cfg.out.display()), e))?;
    let echo = cfg.echo();
    write_ew_table(create(&cfg.out.join(EW_TABLE_FILE))?, &echo, &result.table)?;
    write_strategy(create(&cfg.out.join(STRATEGY_FILE))?, &echo, &result.records)?;
    Ok(result)
}

/// `utility-curves`: `u(e)` on `samples` evenly spaced points of `[0, 1]`
/// for each spec, as CSV with columns `utility,e,u`.
pub fn cmd_utility_curves(
    utilities: &[UtilityFamily],
    samples: usize,
) -> Result<String, CliError> {
    let mut errs = Vec::new();
    if samples < 2 {
        errs.push(format!("samples must be >= 2, got {samples}"));
    }
    if utilities.is_empty() {
        errs.push("at least one --utility is required".to_string());
    }
    for u in utilities {
        if let Err(e) = u.validate() {
            errs.push(format!("utility {u}: {e}"));
        }
    }
    if !errs.is_empty() {
        return Err(CliError::Config(errs));
    }
    let ctx = "writing utility curves";
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["utility", "e", "u"]).map_err(|e| CliError::csv(ctx, e))?;
    for &family in utilities {
        let spec = UtilitySpec {
            family,
            cost: 0.0,
            argument: UtilityArgument::Eof,
        };
        for k in 0..samples {
            let e = if k + 1 == samples {
                1.0
            } else {
                k as f64 / (samples - 1) as f64
            };
            w.write_record([family.to_string(), num(e), num(spec.u(e))])
                .map_err(|e| CliError::csv(ctx, e))?;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::io(ctx, io::Error::other(e.to_string())))?;
    let out = String::from_utf8(bytes).expect("csv output is utf-8");
    Ok(out)
}

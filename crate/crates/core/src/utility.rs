//! Utility functions of entanglement and the net utility of a mixing
//! strategy.

use std::fmt;
use std::str::FromStr;

use crate::entanglement::{Concurrence, Entanglement};

/// Shape of `u(E)`. Both families satisfy `u(1) = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UtilityFamily {
    /// `u(E) = Eⁿ`
    Power { n: f64 },
    /// `u(E) = ((E − e0)/(1 − e0))ⁿ` above `e0`, zero at or below it.
    Threshold { e0: f64, n: f64 },
}

impl UtilityFamily {
    pub fn exponent(&self) -> f64 {
        match *self {
            UtilityFamily::Power { n } | UtilityFamily::Threshold { n, .. } => n,
        }
    }

    /// Threshold, zero for the power family.
    pub fn threshold(&self) -> f64 {
        match *self {
            UtilityFamily::Power { .. } => 0.0,
            UtilityFamily::Threshold { e0, .. } => e0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            UtilityFamily::Power { .. } => "power",
            UtilityFamily::Threshold { .. } => "threshold",
        }
    }

    pub fn with_exponent(self, n: f64) -> Self {
        match self {
            UtilityFamily::Power { .. } => UtilityFamily::Power { n },
            UtilityFamily::Threshold { e0, .. } => UtilityFamily::Threshold { e0, n },
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let n = self.exponent();
        if !(n.is_finite() && n > 0.0) {
            return Err(format!("utility exponent must be > 0, got {n}"));
        }
        if let UtilityFamily::Threshold { e0, .. } = *self {
            if !(0.0..1.0).contains(&e0) {
                return Err(format!("utility threshold must lie in [0, 1), got {e0}"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for UtilityFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            UtilityFamily::Power { n } => write!(f, "power:{n}"),
            UtilityFamily::Threshold { e0, n } => write!(f, "threshold:{e0},{n}"),
        }
    }
}

/// Parses `power:n` and `threshold:e0,n`.
impl FromStr for UtilityFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| format!("utility `{s}`: expected power:n or threshold:e0,n"))?;
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("utility `{s}`: bad number `{t}`: {e}"))
        };
        let family = match kind.trim() {
            "power" => UtilityFamily::Power { n: num(args)? },
            "threshold" => {
                let (e0, n) = args
                    .split_once(',')
                    .ok_or_else(|| format!("utility `{s}`: expected threshold:e0,n"))?;
                UtilityFamily::Threshold {
                    e0: num(e0)?,
                    n: num(n)?,
                }
            }
            other => return Err(format!("utility `{s}`: unknown family `{other}`")),
        };
        family.validate().map_err(|e| format!("utility `{s}`: {e}"))?;
        Ok(family)
    }
}

/// Which entanglement quantity `u` is applied to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum UtilityArgument {
    #[default]
    Eof,
    Concurrence,
}

impl FromStr for UtilityArgument {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "eof" => Ok(UtilityArgument::Eof),
            "concurrence" => Ok(UtilityArgument::Concurrence),
            _ => Err(format!("unknown utility argument `{s}` (expected eof or concurrence)")),
        }
    }
}

impl fmt::Display for UtilityArgument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UtilityArgument::Eof => "eof",
            UtilityArgument::Concurrence => "concurrence",
        })
    }
}

/// A utility function together with the cost of one feed-forward
/// operation, in units of the maximum utility.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UtilitySpec {
    pub family: UtilityFamily,
    pub cost: f64,
    pub argument: UtilityArgument,
}

impl UtilitySpec {
    pub fn power(n: f64) -> Self {
        UtilitySpec {
            family: UtilityFamily::Power { n },
            cost: 0.0,
            argument: UtilityArgument::Eof,
        }
    }

    pub fn threshold(e0: f64, n: f64) -> Self {
        UtilitySpec {
            family: UtilityFamily::Threshold { e0, n },
            cost: 0.0,
            argument: UtilityArgument::Eof,
        }
    }

    pub fn with_cost(mut self, cost: f64) -> Self {
        self.cost = cost;
        self
    }

    pub fn with_argument(mut self, argument: UtilityArgument) -> Self {
        self.argument = argument;
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        self.family.validate()?;
        if !(self.cost.is_finite() && self.cost >= 0.0) {
            return Err(format!("cost must be >= 0, got {}", self.cost));
        }
        Ok(())
    }

    /// `u(x)` for `x ∈ [0, 1]`.
    pub fn u(&self, x: f64) -> f64 {
        match self.family {
            UtilityFamily::Power { n } => x.max(0.0).powf(n),
            UtilityFamily::Threshold { e0, n } => {
                if x <= e0 {
                    0.0
                } else {
                    ((x - e0) / (1.0 - e0)).powf(n)
                }
            }
        }
    }

    /// Select the quantity `u` acts on.
    pub fn argument_of(&self, c: Concurrence, e: Entanglement) -> f64 {
        match self.argument {
            UtilityArgument::Eof => e.value(),
            UtilityArgument::Concurrence => c.value(),
        }
    }
}

impl fmt::Display for UtilitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} cost={}", self.family, self.cost)?;
        if self.argument != UtilityArgument::Eof {
            write!(f, " of={}", self.argument)?;
        }
        Ok(())
    }
}

pub fn evaluate_utility(spec: &UtilitySpec, e: Entanglement) -> f64 {
    spec.u(e.value())
}

/// Inputs to the net utility, with the entanglement quantities already
/// mapped to the utility's argument.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetUtilityInputs {
    pub p_succ: f64,
    pub p_fail: f64,
    /// Entanglement of the mixed success ensemble `ρ_w`.
    pub e_w: f64,
    /// Entanglement of the (normalized) failure state.
    pub e_fail: f64,
    pub w: f64,
}

/// `N(w) = P(w) u(E_w) + (1 − w) P_fail u(E_fail) − w P_fail C`, with
/// `P(w) = P_succ + w P_fail`.
pub fn net_utility(inputs: &NetUtilityInputs, spec: &UtilitySpec) -> f64 {
    let NetUtilityInputs {
        p_succ,
        p_fail,
        e_w,
        e_fail,
        w,
    } = *inputs;
    (p_succ + w * p_fail) * spec.u(e_w) + (1.0 - w) * p_fail * spec.u(e_fail)
        - w * p_fail * spec.cost
}

use serde::{Deserialize, Serialize};

use crate::diagnostics::{DEFAULT_COUNTING_C, DEFAULT_DECAY_C};
use crate::error::{Error, Result};
use crate::modulus::{Convention, SolverOptions};
use crate::uniformizer::{UniformizeOptions, DEFAULT_MIN_SIDE_RATIO};

pub const CONFIG_VERSION: &str = "1";

/// Run settings shared by all commands. Missing fields take their defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub version: String,
    pub seed: u64,
    /// Grid resolution.
    pub h: f64,
    pub solver_eps: f64,
    pub iteration_cap: usize,
    /// Constant of the counting bound `C/(st)²`.
    pub counting_c: f64,
    /// Constant of the decay bound.
    pub decay_c: f64,
    pub convention: Convention,
    /// Degenerate squares are those below this fraction of `h_A`.
    pub min_side_ratio: f64,
}

impl Default for Config {
    fn default() -> Self {
        let s = SolverOptions::default();
        Config {
            version: CONFIG_VERSION.into(),
            seed: 0,
            h: 1.0 / 64.0,
            solver_eps: s.eps,
            iteration_cap: s.iteration_cap,
            counting_c: DEFAULT_COUNTING_C,
            decay_c: DEFAULT_DECAY_C,
            convention: Convention::Open,
            min_side_ratio: DEFAULT_MIN_SIDE_RATIO,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let c: Config = serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("h", self.h),
            ("solver_eps", self.solver_eps),
            ("counting_c", self.counting_c),
            ("decay_c", self.decay_c),
            ("min_side_ratio", self.min_side_ratio),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Parse(format!("config: {name} = {v} must be positive")));
        }
        if self.iteration_cap == 0 {
            return Err(Error::Parse("config: iteration_cap must be positive".into()));
        }
        if self.version != CONFIG_VERSION {
            return Err(Error::Parse(format!("config: unsupported version '{}'", self.version)));
        }
        Ok(())
    }

    pub fn solver(&self) -> SolverOptions {
        SolverOptions { eps: self.solver_eps, iteration_cap: self.iteration_cap, seed: self.seed, ..Default::default() }
    }

    pub fn uniformize(&self) -> UniformizeOptions {
        UniformizeOptions {
            solver: self.solver(),
            convention: self.convention,
            min_side_ratio: self.min_side_ratio,
            ..Default::default()
        }
    }
}

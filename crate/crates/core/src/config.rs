use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which edge-selection strategy the solver uses each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    /// Exhaustive scan over every edge.
    #[default]
    Greedy,
    /// Recursive Cheeger-cut partitioning of the candidate edge set.
    Recursive,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Greedy => "greedy",
            SolverKind::Recursive => "recursive",
        })
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(SolverKind::Greedy),
            "recursive" => Ok(SolverKind::Recursive),
            other => Err(Error::InvalidConfig(format!("unknown solver '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Weakening step size.
    pub epsilon: f64,
    /// Diagonal shift inside the log-determinant.
    pub alpha: f64,
    /// Weight of the Fiedler-number reward.
    pub gamma: f64,
    /// Per-entry sparsity penalty.
    pub mu: f64,
    /// Extra edges added by the sparse initializer; `None` means `3N`.
    pub budget_b: Option<usize>,
    /// Sub-graphs with at most this many nodes are scanned exhaustively.
    pub v_min: usize,
    pub eig_tol: f64,
    pub eig_max_iters: usize,
    /// Accepted steps between spectral refreshes.
    pub refresh_interval: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub solver_kind: SolverKind,
    /// Score the determinant factor from the dense inverse instead of the
    /// spectral majorizer.
    pub exact_logdet: bool,
    /// Eigenpairs retained for the majorizer; `None` means the observation
    /// count. Always floored at 3.
    pub retained: Option<usize>,
    /// Record the exact objective every this many accepted steps (0 = never).
    pub objective_every: usize,
    /// Score against the sample second-moment matrix `X X^T / K` rather than
    /// the raw Gram matrix.
    pub normalize_gram: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            alpha: 0.5,
            gamma: 0.5,
            mu: 0.2,
            budget_b: None,
            v_min: 8,
            eig_tol: 1e-8,
            eig_max_iters: 500,
            refresh_interval: 1,
            max_iters: 20_000,
            seed: 0,
            solver_kind: SolverKind::Greedy,
            exact_logdet: false,
            retained: None,
            objective_every: 0,
            normalize_gram: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be positive");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive");
        }
        if !(self.gamma >= 0.0 && self.mu >= 0.0) {
            return bad("gamma and mu must be nonnegative");
        }
        if self.refresh_interval == 0 {
            return bad("refresh interval must be at least 1");
        }
        if self.v_min == 0 {
            return bad("vmin must be at least 1");
        }
        if !(self.eig_tol > 0.0) {
            return bad("eigensolver tolerance must be positive");
        }
        Ok(())
    }

    /// Extra-edge budget for an `n`-node problem.
    pub fn budget_for(&self, n: usize) -> usize {
        self.budget_b.unwrap_or(3 * n)
    }

    /// Eigenpairs to keep for `k` observations on `n` nodes.
    pub fn retained_for(&self, k: usize, n: usize) -> usize {
        self.retained.unwrap_or(k).max(3).min(n)
    }

    /// Overrides fields from flat `key = value` lines. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn apply_overrides(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    /// Sets one field by its flag name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::InvalidConfig(format!("bad value '{v}' for {key}")))
        }
        match key {
            "epsilon" => self.epsilon = num(key, value)?,
            "alpha" => self.alpha = num(key, value)?,
            "gamma" => self.gamma = num(key, value)?,
            "mu" => self.mu = num(key, value)?,
            "budget" => self.budget_b = Some(num(key, value)?),
            "vmin" => self.v_min = num(key, value)?,
            "eig-tol" | "eig_tol" => self.eig_tol = num(key, value)?,
            "refresh" => self.refresh_interval = num(key, value)?,
            "max-iters" | "max_iters" => self.max_iters = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "solver" => self.solver_kind = value.parse()?,
            "exact-logdet" | "exact_logdet" => self.exact_logdet = num(key, value)?,
            "retained" => self.retained = Some(num(key, value)?),
            "normalize-gram" | "normalize_gram" => self.normalize_gram = num(key, value)?,
            other => return Err(Error::InvalidConfig(format!("unknown key '{other}'"))),
        }
        Ok(())
    }
}

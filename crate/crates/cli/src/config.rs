use std::path::{Path, PathBuf};

use chevalley::coxeter::CoxeterType;
use chevalley::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Invariants,
    VerifyJacobian,
    VerifyStatement,
    Morse,
    Fiber,
    Whitney,
    Report,
    All,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Invariants,
        Command::VerifyJacobian,
        Command::VerifyStatement,
        Command::Morse,
        Command::Fiber,
        Command::Whitney,
        Command::Report,
        Command::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Invariants => "invariants",
            Command::VerifyJacobian => "verify-jacobian",
            Command::VerifyStatement => "verify-statement",
            Command::Morse => "morse",
            Command::Fiber => "fiber",
            Command::Whitney => "whitney",
            Command::Report => "report",
            Command::All => "all",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

/// Everything a suite run depends on. Identical configurations give
/// identical reports, apart from the runtime.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Type specifier such as `B3`, `D6` or `I2:7`.
    #[serde(rename = "type")]
    pub ty: Option<String>,
    pub command: Option<Command>,
    pub seed: u64,
    /// Threshold separating zero from nonzero normalized minors.
    pub tol_zero: f64,
    /// Relative singular-value threshold of the rank test.
    pub tol_rank: f64,
    /// Residual tolerance of fiber projections.
    pub eps_fiber: f64,
    /// Ball radius for meshes and lifts.
    pub a: f64,
    /// Mesh pitch; by default 0.02 in the plane and 0.05 above.
    pub h: Option<f64>,
    /// Samples per stratum.
    pub samples: usize,
    /// Truncation order; every `1 ≤ k < n` when absent.
    pub k: Option<usize>,
    /// Explicit fiber target `mᵏ`; seeded regular targets when absent.
    pub m: Option<Vec<f64>>,
    pub fiber_points: usize,
    /// Seeded targets per `k`.
    pub fibers: usize,
    pub multistarts: usize,
    pub pairs: usize,
    pub bins: usize,
    /// Report destination; for `invariants`, the directory receiving the basis.
    pub out: Option<PathBuf>,
    /// CSV of the sampled Whitney pairs.
    pub csv: Option<PathBuf>,
    /// Saved report read by `report`.
    pub input: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ty: None,
            command: None,
            seed: 1,
            tol_zero: 1e-9,
            tol_rank: 1e-8,
            eps_fiber: 1e-12,
            a: 1.0,
            h: None,
            samples: 100,
            k: None,
            m: None,
            fiber_points: 2000,
            fibers: 20,
            multistarts: 32,
            pairs: 5000,
            bins: 20,
            out: None,
            csv: None,
            input: None,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Usage(format!("bad config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tol_zero", self.tol_zero),
            ("tol_rank", self.tol_rank),
            ("eps_fiber", self.eps_fiber),
            ("a", self.a),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Usage(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(h) = self.h {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Usage(format!("h must be positive, got {h}")));
            }
        }
        if let (Some(k), Some(m)) = (self.k, &self.m) {
            if k != m.len() {
                return Err(Error::Usage(format!("k = {k} but m has {} entries", m.len())));
            }
        }
        match self.command {
            None => Err(Error::Usage("no command given".into())),
            Some(Command::Report) if self.input.is_none() => {
                Err(Error::Usage("report needs a saved report to read".into()))
            }
            Some(Command::Report) => Ok(()),
            Some(_) if self.ty.is_none() => Err(Error::Usage("no type given".into())),
            Some(_) => Ok(()),
        }
    }

    pub fn coxeter_type(&self) -> Result<CoxeterType> {
        let s = self.ty.as_deref().ok_or_else(|| Error::Usage("no type given".into()))?;
        s.parse::<CoxeterType>()?.checked()
    }

    pub fn pitch(&self, n: usize) -> f64 {
        self.h.unwrap_or(if n <= 2 { 0.02 } else { 0.05 })
    }
}

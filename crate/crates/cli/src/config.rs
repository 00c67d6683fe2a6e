//! Run configuration: defaults, TOML file loading (flat key=value with
//! sections) and command-line overrides. Every output embeds the fully
//! resolved configuration for provenance.

use anyhow::{bail, Context};
use lptk::corpus::{CorpusSpec, Family};
use lptk::grid::GridSpec;
use lptk::norms::NormParams;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize)]
pub struct GridSection {
    pub dim: usize,
    pub extent: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowSection {
    pub jmin: i32,
    pub jmax: i32,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormSection {
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GatesSection {
    pub equivalence_max_spread: f64,
    pub equivalence_warn_spread: f64,
    pub calderon_final_tol: f64,
    pub dilation_slack: f64,
    pub moment_tol: f64,
}

/// Fully resolved run configuration (defaults ← file ← flags).
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub grid: GridSection,
    pub window: WindowSection,
    pub norm: NormSection,
    pub corpus: CorpusSpec,
    pub gates: GatesSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid: GridSection {
                dim: 1,
                extent: 64.0,
                samples: 1024,
            },
            window: WindowSection { jmin: -4, jmax: 6 },
            norm: NormSection {
                alpha: 0.5,
                p: 2.0,
                q: 2.0,
                lambda: None,
            },
            corpus: CorpusSpec::new(
                Family::RandomBandlimited {
                    count: 20,
                    lo: 0.5,
                    hi: 8.0,
                },
                7,
            ),
            gates: GatesSection {
                equivalence_max_spread: 100.0,
                equivalence_warn_spread: 30.0,
                calderon_final_tol: 1e-6,
                dilation_slack: 0.25,
                moment_tol: 1e-5,
            },
        }
    }
}

// File-side sections: every key optional so partial files merge onto the
// defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    grid: Option<FileGrid>,
    window: Option<FileWindow>,
    norm: Option<FileNorm>,
    corpus: Option<toml::Value>,
    gates: Option<FileGates>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileGrid {
    dim: Option<usize>,
    extent: Option<f64>,
    samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileWindow {
    jmin: Option<i32>,
    jmax: Option<i32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileNorm {
    alpha: Option<f64>,
    p: Option<f64>,
    q: Option<f64>,
    lambda: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileGates {
    equivalence_max_spread: Option<f64>,
    equivalence_warn_spread: Option<f64>,
    calderon_final_tol: Option<f64>,
    dilation_slack: Option<f64>,
    moment_tol: Option<f64>,
}

/// Command-line overrides shared by all subcommands.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonArgs {
    /// Configuration file (TOML sections; flags override file values)
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    #[arg(long, global = true)]
    pub extent: Option<f64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub jmin: Option<i32>,
    #[arg(long, global = true)]
    pub jmax: Option<i32>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub q: Option<f64>,
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Write the JSON report here (atomic); stdout otherwise
    #[arg(long, global = true)]
    pub output: Option<std::path::PathBuf>,
    /// Optional CSV plot data
    #[arg(long, global = true)]
    pub csv: Option<std::path::PathBuf>,
}

pub fn resolve(args: &CommonArgs) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &args.config {
        merge_file(&mut cfg, path)?;
    }
    if let Some(v) = args.dim {
        cfg.grid.dim = v;
    }
    if let Some(v) = args.extent {
        cfg.grid.extent = v;
    }
    if let Some(v) = args.samples {
        cfg.grid.samples = v;
    }
    if let Some(v) = args.jmin {
        cfg.window.jmin = v;
    }
    if let Some(v) = args.jmax {
        cfg.window.jmax = v;
    }
    if let Some(v) = args.alpha {
        cfg.norm.alpha = v;
    }
    if let Some(v) = args.p {
        cfg.norm.p = v;
    }
    if let Some(v) = args.q {
        cfg.norm.q = v;
    }
    if let Some(v) = args.lambda {
        cfg.norm.lambda = Some(v);
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn merge_file(cfg: &mut RunConfig, path: &Path) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let file: FileConfig = toml::from_str(&text)
        .with_context(|| format!("cannot parse config file {}", path.display()))?;
    if let Some(g) = file.grid {
        if let Some(v) = g.dim {
            cfg.grid.dim = v;
        }
        if let Some(v) = g.extent {
            cfg.grid.extent = v;
        }
        if let Some(v) = g.samples {
            cfg.grid.samples = v;
        }
    }
    if let Some(w) = file.window {
        if let Some(v) = w.jmin {
            cfg.window.jmin = v;
        }
        if let Some(v) = w.jmax {
            cfg.window.jmax = v;
        }
    }
    if let Some(n) = file.norm {
        if let Some(v) = n.alpha {
            cfg.norm.alpha = v;
        }
        if let Some(v) = n.p {
            cfg.norm.p = v;
        }
        if let Some(v) = n.q {
            cfg.norm.q = v;
        }
        if n.lambda.is_some() {
            cfg.norm.lambda = n.lambda;
        }
    }
    if let Some(c) = file.corpus {
        cfg.corpus = c
            .try_into()
            .context("corpus: invalid family specification")?;
    }
    if let Some(g) = file.gates {
        if let Some(v) = g.equivalence_max_spread {
            cfg.gates.equivalence_max_spread = v;
        }
        if let Some(v) = g.equivalence_warn_spread {
            cfg.gates.equivalence_warn_spread = v;
        }
        if let Some(v) = g.calderon_final_tol {
            cfg.gates.calderon_final_tol = v;
        }
        if let Some(v) = g.dilation_slack {
            cfg.gates.dilation_slack = v;
        }
        if let Some(v) = g.moment_tol {
            cfg.gates.moment_tol = v;
        }
    }
    Ok(())
}

/// Reject invalid configurations before any computation starts, naming the
/// offending key path.
fn validate(cfg: &RunConfig) -> anyhow::Result<()> {
    GridSpec::new(cfg.grid.dim, cfg.grid.extent, cfg.grid.samples)
        .map_err(|e| anyhow::anyhow!("grid: {e}"))?;
    if cfg.window.jmin > cfg.window.jmax {
        bail!("window.jmin: must not exceed window.jmax");
    }
    let params = NormParams {
        alpha: cfg.norm.alpha,
        p: cfg.norm.p,
        q: cfg.norm.q,
        lambda: cfg.norm.lambda,
    };
    params.validate().map_err(|e| anyhow::anyhow!("norm: {e}"))?;
    if !(cfg.gates.equivalence_max_spread >= 1.0) {
        bail!("gates.equivalence_max_spread: must be at least 1");
    }
    if !(cfg.gates.calderon_final_tol > 0.0) {
        bail!("gates.calderon_final_tol: must be positive");
    }
    Ok(())
}

impl RunConfig {
    pub fn grid_spec(&self) -> anyhow::Result<GridSpec> {
        GridSpec::new(self.grid.dim, self.grid.extent, self.grid.samples)
            .map_err(|e| anyhow::anyhow!("grid: {e}"))
    }

    pub fn norm_params(&self) -> NormParams {
        NormParams {
            alpha: self.norm.alpha,
            p: self.norm.p,
            q: self.norm.q,
            lambda: self.norm.lambda,
        }
    }

    pub fn window(&self) -> (i32, i32) {
        (self.window.jmin, self.window.jmax)
    }
}

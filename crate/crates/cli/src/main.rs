//! Command-line front end: kernel admissibility certificates, quasi-norm
//! computation, Calderón reconstruction studies, norm-equivalence audits,
//! the Strömberg-type inequality audit, dilation-envelope fits and corpus
//! generation. Reports are JSON (optionally CSV plot data), deterministic
//! byte-for-byte given the same configuration.
//!
//! Exit codes: 0 = pass, 1 = a verification gate failed, 2 = usage or
//! configuration error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use config::CommonArgs;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "lptk",
    about = "Numerical Littlewood-Paley toolkit",
    version,
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Run the admissibility checkers on a kernel and emit a certificate
    CheckKernel {
        /// Kernel id, e.g. poisson:beta=1.5, gaussd:kappa=2, lp, zero
        kernel: String,
        /// Weight order for the weighted-L1 quadrature (defaults to the
        /// kernel's declared value)
        #[arg(long)]
        ell: Option<f64>,
    },
    /// Compute a quasi-norm of a stored field or a corpus element
    Norm {
        /// besov | triebel | tinf | peetre-besov | peetre-triebel |
        /// hardy-besov | hardy-triebel
        #[arg(long, default_value = "besov")]
        engine: String,
        #[arg(long, default_value = "lp")]
        kernel: String,
        /// Field file (CSV); otherwise a corpus element is used
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        corpus_index: usize,
        /// Mollifier kernel id for the hardy engines
        #[arg(long)]
        mollifier: Option<String>,
        #[arg(long, default_value_t = 8)]
        tgrid_per_octave: usize,
    },
    /// Build a generalized reconstruction pair and run the error study
    Calderon {
        #[arg(long, default_value = "poisson:beta=1")]
        kernel: String,
        /// Low-pass cutoff scale (defaults to the window bottom)
        #[arg(long)]
        k: Option<i32>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        corpus_index: usize,
    },
    /// Two-kernel norm equivalence audit over the configured corpus
    Equivalence {
        /// Kernel id for side A
        #[arg(long)]
        a: String,
        /// Kernel id for side B
        #[arg(long)]
        b: String,
        #[arg(long, default_value = "besov")]
        engine: String,
    },
    /// Pointwise maximal-inequality audit
    Stromberg {
        #[arg(long, default_value = "poisson:beta=1")]
        kernel: String,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Estimate exponent in the scale penalty
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Base scale of the audited maximal function
        #[arg(long, default_value_t = 0)]
        j: i32,
        /// Scale-sum truncation (defaults to the window top)
        #[arg(long)]
        kmax: Option<i32>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        corpus_index: usize,
    },
    /// Dilation-estimate envelope fits for a kernel pair
    Dilation {
        #[arg(long, default_value = "lp")]
        eta: String,
        #[arg(long, default_value = "poisson:beta=1")]
        psi: String,
        /// Spatial weight order N in (1+|x|/t)^N
        #[arg(long, default_value_t = 2)]
        n_decay: usize,
        /// Target exponent of the estimate
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        /// Comma list of scale ratios, at least five spanning four octaves
        #[arg(long, default_value = "2,4,8,16,32,64")]
        ratios: String,
    },
    /// Generate the configured corpus and write the fields to disk
    Corpus {
        /// Directory receiving one CSV per field
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let cfg = config::resolve(&cli.common)?;
    let output = cli.common.output.as_deref();
    let csv = cli.common.csv.as_deref();
    match &cli.command {
        Command::CheckKernel { kernel, ell } => {
            commands::check_kernel(&cfg, kernel, cli.common.alpha, *ell, output)
        }
        Command::Norm {
            engine,
            kernel,
            input,
            corpus_index,
            mollifier,
            tgrid_per_octave,
        } => commands::norm(
            &cfg,
            engine,
            kernel,
            input.as_deref(),
            *corpus_index,
            mollifier.as_deref(),
            *tgrid_per_octave,
            output,
        ),
        Command::Calderon {
            kernel,
            k,
            input,
            corpus_index,
        } => commands::calderon(&cfg, kernel, *k, input.as_deref(), *corpus_index, output, csv),
        Command::Equivalence { a, b, engine } => {
            commands::equivalence(&cfg, a, b, engine, output, csv)
        }
        Command::Stromberg {
            kernel,
            r,
            beta,
            j,
            kmax,
            input,
            corpus_index,
        } => {
            let lambda = cli.common.lambda.unwrap_or(2.0);
            commands::stromberg(
                &cfg,
                kernel,
                *r,
                lambda,
                *beta,
                *j,
                *kmax,
                input.as_deref(),
                *corpus_index,
                output,
                csv,
            )
        }
        Command::Dilation {
            eta,
            psi,
            n_decay,
            m,
            ratios,
        } => commands::dilation(&cfg, eta, psi, *n_decay, *m, ratios, output, csv),
        Command::Corpus { out_dir } => commands::corpus_cmd(&cfg, out_dir, output),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}

//! Empirical audits: kernel-vs-kernel norm equivalence with measured
//! two-sided constants, dilation-estimate envelope fits, the
//! Strömberg-type pointwise maximal inequality, dyadic scaling
//! covariance, and pointwise maximal-function domination laws.
//!
//! Every report is deterministic given (corpus seed, grid, parameters):
//! re-running a check reproduces it bit for bit.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Representation, SampledField};
use crate::kernels::{fit_log_slope, tauberian_analysis, CheckConfig, KernelSpec};
use crate::lp::{dyadic_block, BlockKernel, LPFamily};
use crate::maximal::peetre_maximal;
use crate::norms::{
    besov_norm, hardy_besov_norm, hardy_triebel_norm, peetre_besov_norm, peetre_triebel_norm,
    triebel_infinity_norm, triebel_norm, NormParams,
};

/// Which quasi-norm an engine computes.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "engine", rename_all = "snake_case")]
pub enum EngineKind {
    Besov { params: NormParams },
    Triebel { params: NormParams },
    TriebelInfinity { alpha: f64, q: f64 },
    PeetreBesov { params: NormParams },
    PeetreTriebel { params: NormParams },
    HardyBesov { params: NormParams, tgrid: Vec<f64> },
    HardyTriebel { params: NormParams, tgrid: Vec<f64> },
}

/// Analysis kernel owned by an engine.
#[derive(Debug, Clone)]
pub enum EngineKernel {
    Family(Arc<LPFamily>),
    Kernel(KernelSpec),
}

impl EngineKernel {
    pub fn block(&self) -> BlockKernel<'_> {
        match self {
            EngineKernel::Family(f) => BlockKernel::Family(f),
            EngineKernel::Kernel(k) => BlockKernel::Kernel(k),
        }
    }

    pub fn name(&self) -> String {
        self.block().name()
    }
}

/// A fully configured quasi-norm evaluator.
#[derive(Debug, Clone)]
pub struct NormEngine {
    pub kind: EngineKind,
    pub kernel: EngineKernel,
    pub window: (i32, i32),
    /// Mollifier for the Hardy-flavoured engines.
    pub mollifier: Option<KernelSpec>,
}

impl NormEngine {
    pub fn besov(params: NormParams, kernel: EngineKernel, window: (i32, i32)) -> Self {
        NormEngine {
            kind: EngineKind::Besov { params },
            kernel,
            window,
            mollifier: None,
        }
    }

    pub fn triebel(params: NormParams, kernel: EngineKernel, window: (i32, i32)) -> Self {
        NormEngine {
            kind: EngineKind::Triebel { params },
            kernel,
            window,
            mollifier: None,
        }
    }

    pub fn compute(&self, f: &SampledField) -> Result<f64> {
        let kernel = self.kernel.block();
        match &self.kind {
            EngineKind::Besov { params } => besov_norm(f, params, kernel, self.window),
            EngineKind::Triebel { params } => triebel_norm(f, params, kernel, self.window),
            EngineKind::TriebelInfinity { alpha, q } => {
                triebel_infinity_norm(f, *alpha, *q, kernel, self.window)
            }
            EngineKind::PeetreBesov { params } => {
                peetre_besov_norm(f, params, kernel, self.window)
            }
            EngineKind::PeetreTriebel { params } => {
                peetre_triebel_norm(f, params, kernel, self.window)
            }
            EngineKind::HardyBesov { params, tgrid } => {
                let phi = self.mollifier.as_ref().ok_or_else(|| {
                    Error::Usage("hardy engine requires a mollifier".into())
                })?;
                hardy_besov_norm(f, params, kernel, self.window, phi, tgrid)
            }
            EngineKind::HardyTriebel { params, tgrid } => {
                let phi = self.mollifier.as_ref().ok_or_else(|| {
                    Error::Usage("hardy engine requires a mollifier".into())
                })?;
                hardy_triebel_norm(f, params, kernel, self.window, phi, tgrid)
            }
        }
    }

    /// Smoothness and integrability exponents governing dyadic scaling.
    pub fn alpha_p(&self) -> (f64, f64) {
        match &self.kind {
            EngineKind::Besov { params }
            | EngineKind::Triebel { params }
            | EngineKind::PeetreBesov { params }
            | EngineKind::PeetreTriebel { params }
            | EngineKind::HardyBesov { params, .. }
            | EngineKind::HardyTriebel { params, .. } => (params.alpha, params.p),
            EngineKind::TriebelInfinity { alpha, .. } => (*alpha, f64::INFINITY),
        }
    }

    pub fn is_family_kernel(&self) -> bool {
        matches!(self.kernel, EngineKernel::Family(_))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioEntry {
    pub index: usize,
    pub value_a: f64,
    pub value_b: f64,
    pub ratio: f64,
}

/// Two-norm comparison over a corpus: per-function values, ratio extremes
/// and the measured equivalence constants.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub engine_a: String,
    pub engine_b: String,
    pub corpus_size: usize,
    pub entries: Vec<RatioEntry>,
    pub skipped_zero_norm: usize,
    pub c_lower: f64,
    pub c_upper: f64,
    pub geometric_mean: f64,
    /// `c_upper / c_lower`.
    pub spread: f64,
    pub gate: f64,
    pub warn_band: f64,
    pub passed: bool,
    pub warned: bool,
    /// Set when no usable ratios were produced (e.g. an all-zero corpus).
    pub degenerate: bool,
}

/// Gate configuration for the equivalence audit. The bounds are
/// stability guards, not certified constants: the comparison theorems
/// assert existence of two-sided bounds, not magnitudes.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EquivalenceGate {
    pub max_spread: f64,
    pub warn_spread: f64,
}

impl Default for EquivalenceGate {
    fn default() -> Self {
        EquivalenceGate {
            max_spread: 100.0,
            warn_spread: 30.0,
        }
    }
}

pub fn norm_equivalence_report(
    corpus: &[SampledField],
    engine_a: &NormEngine,
    engine_b: &NormEngine,
    gate: EquivalenceGate,
) -> Result<EquivalenceReport> {
    if corpus.is_empty() {
        return Err(Error::Usage("equivalence corpus is empty".into()));
    }
    let mut entries = Vec::new();
    let mut skipped = 0usize;
    for (index, f) in corpus.iter().enumerate() {
        let value_a = engine_a.compute(f)?;
        let value_b = engine_b.compute(f)?;
        if value_a <= 0.0 || value_b <= 0.0 {
            skipped += 1;
            continue;
        }
        entries.push(RatioEntry {
            index,
            value_a,
            value_b,
            ratio: value_a / value_b,
        });
    }
    let degenerate = entries.is_empty();
    let (c_lower, c_upper, geometric_mean) = if degenerate {
        (f64::NAN, f64::NAN, f64::NAN)
    } else {
        let lo = entries.iter().map(|e| e.ratio).fold(f64::INFINITY, f64::min);
        let hi = entries.iter().map(|e| e.ratio).fold(0.0, f64::max);
        let gm = (entries.iter().map(|e| e.ratio.ln()).sum::<f64>() / entries.len() as f64).exp();
        (lo, hi, gm)
    };
    let spread = c_upper / c_lower;
    let passed = !degenerate && spread <= gate.max_spread;
    Ok(EquivalenceReport {
        engine_a: engine_a.kernel.name(),
        engine_b: engine_b.kernel.name(),
        corpus_size: corpus.len(),
        entries,
        skipped_zero_norm: skipped,
        c_lower,
        c_upper,
        geometric_mean,
        spread,
        gate: gate.max_spread,
        warn_band: gate.warn_spread,
        passed,
        warned: !degenerate && spread > gate.warn_spread,
        degenerate,
    })
}

/// One fitted envelope of the dilation estimate: measured sup values
/// against scale ratios, the log-log slope and the target exponent.
#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeFit {
    pub case_label: String,
    /// Scale ratios `s/t` (case far) resp. `s/t` with `t` the fine scale
    /// (case near); all > 1.
    pub ratios: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub target: f64,
    pub residual: f64,
    pub passed: bool,
}

/// Envelope audit of the two dilation estimates for `η_s * ψ_t` with an
/// annulus-supported `η`.
///
/// Case "far" (`s ≤ t`): `K = sup_x |η_s*ψ_t| (1+|x|/t)^N t^n` should
/// shrink like `(s/t)^{m-n}`; the fit of `log K` against `log(s/t)` must
/// have slope at least `m - n - 0.25`.
///
/// Case "near" (`t ≤ s`): `K = sup_x |η_s*ψ_t| (1+|x|/s)^N s^n` should
/// shrink like `(t/s)^m`; the fit against `log(t/s)` must have slope at
/// least `m - 0.25`.
pub fn check_dilation_lemma(
    eta: &KernelSpec,
    psi: &KernelSpec,
    grid: &crate::grid::GridSpec,
    n_decay: usize,
    m: f64,
    ratios: &[f64],
) -> Result<(EnvelopeFit, EnvelopeFit)> {
    let (_, eta_hi) = eta.annular_support.ok_or_else(|| {
        Error::Precondition(format!(
            "dilation audit requires an annulus-supported η, got {}",
            eta.name
        ))
    })?;
    if ratios.len() < 5 {
        return Err(Error::Config("need at least 5 scale ratios".into()));
    }
    let span = ratios.iter().copied().fold(0.0f64, f64::max)
        / ratios.iter().copied().fold(f64::INFINITY, f64::min);
    if span < 16.0 {
        return Err(Error::Config("scale ratios must span at least 4 octaves".into()));
    }
    let vmax = ratios.iter().copied().fold(0.0f64, f64::max);
    if vmax * eta_hi > grid.nyquist() {
        return Err(Error::Config(format!(
            "scale ratio {vmax} pushes η's annulus beyond the Nyquist bound"
        )));
    }
    let dist = grid.distance_table();
    let n = grid.dim() as f64;

    let sup_weighted = |eta_dilation: f64, psi_dilation: f64, weight_scale: f64| -> Result<f64> {
        let eta_table = eta.spectral_table(grid, eta_dilation)?;
        let psi_table = psi.spectral_table(grid, psi_dilation)?;
        let product: Vec<Complex64> = eta_table
            .iter()
            .zip(&psi_table)
            .map(|(a, b)| a * b)
            .collect();
        let conv = SampledField::new(*grid, Representation::Spectral, product)?
            .inverse_transform()?;
        let mut best = 0.0f64;
        for (v, &d) in conv.values().iter().zip(&dist) {
            let w = (1.0 + d / weight_scale).powi(n_decay as i32);
            best = best.max(v.norm() * w);
        }
        Ok(best * weight_scale.powf(n))
    };

    let fit_case = |label: &str, points: Vec<(f64, f64)>, target: f64| -> Result<EnvelopeFit> {
        let usable: Vec<(f64, f64)> = points
            .iter()
            .copied()
            .filter(|&(_, v)| v > 1e-280)
            .collect();
        let (slope, residual) = fit_log_slope(&usable).ok_or_else(|| {
            Error::Evaluation(format!("dilation case {label}: too few usable points"))
        })?;
        Ok(EnvelopeFit {
            case_label: label.to_string(),
            ratios: points.iter().map(|p| 1.0 / p.0).collect(),
            values: points.iter().map(|p| p.1).collect(),
            slope,
            target,
            residual,
            passed: slope >= target - 0.25,
        })
    };

    // case far: s = 1/v, t = 1; abscissa s/t = 1/v
    let mut far_points = Vec::new();
    for &v in ratios {
        let s = 1.0 / v;
        let k = sup_weighted(s, 1.0, 1.0)?;
        far_points.push((s, k));
    }
    let far = fit_case("far", far_points, m - n)?;

    // case near: s = 1, t = 1/v; abscissa t/s = 1/v
    let mut near_points = Vec::new();
    for &v in ratios {
        let t = 1.0 / v;
        let k = sup_weighted(1.0, t, 1.0)?;
        near_points.push((t, k));
    }
    let near = fit_case("near", near_points, m)?;

    Ok((far, near))
}

/// Outcome of the Strömberg-type pointwise audit: the `r`-th power of the
/// Peetre maximal function against the scale-weighted sum of local `L^r`
/// averages of finer blocks.
#[derive(Debug, Clone, Serialize)]
pub struct StrombergReport {
    pub empirical_c: Option<f64>,
    pub passed: bool,
    pub degenerate: bool,
    /// Mass fraction of the last scale term in the truncated sum.
    pub tail_fraction: f64,
    #[serde(skip)]
    pub ratio_field: Option<SampledField>,
}

/// Audit the pointwise inequality
/// `(ψ*_j f)^r ≤ C Σ_{k≥j} 2^{(j-k)(β-λ)r} ∫ |ψ_k*f(x-y)|^r (1+2^k|y|)^{-λr} 2^{kn} dy`
/// with the scale sum truncated at `kmax` (tail recorded). The audit only
/// fails when the right side vanishes while the left does not.
#[allow(clippy::too_many_arguments)]
pub fn check_stromberg(
    f: &SampledField,
    kernel: &KernelSpec,
    r: f64,
    lambda: f64,
    beta: f64,
    j: i32,
    kmax: i32,
    cfg: &CheckConfig,
) -> Result<StrombergReport> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!("r must lie in (0, 1], got {r}")));
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    if kmax < j {
        return Err(Error::Domain(format!("kmax={kmax} must be at least j={j}")));
    }
    let analysis = tauberian_analysis(kernel, cfg);
    if !analysis.passed {
        return Err(Error::Precondition(format!(
            "kernel {} fails the Tauberian condition",
            kernel.name
        )));
    }
    let grid = *f.grid();
    let n = grid.dim() as f64;
    let block_j = dyadic_block(f, j, BlockKernel::Kernel(kernel))?;
    let lhs: Vec<f64> = peetre_maximal(&block_j, j, lambda)?
        .values()
        .iter()
        .map(|v| v.re.powf(r))
        .collect();

    let dist = grid.distance_table();
    let mut rhs = vec![0.0f64; grid.len()];
    let mut last_term_mass = 0.0f64;
    let mut total_mass = 0.0f64;
    for k in j..=kmax {
        let block = dyadic_block(f, k, BlockKernel::Kernel(kernel))?;
        let powered = SampledField::new(
            grid,
            Representation::Spatial,
            block
                .values()
                .iter()
                .map(|v| Complex64::new(v.norm().powf(r), 0.0))
                .collect(),
        )?;
        let scale = (k as f64).exp2();
        let weight = SampledField::new(
            grid,
            Representation::Spatial,
            dist.iter()
                .map(|&d| Complex64::new((1.0 + scale * d).powf(-lambda * r) * scale.powf(n), 0.0))
                .collect(),
        )?;
        let conv = powered.convolve(&weight)?;
        let coeff = ((j - k) as f64 * (beta - lambda) * r).exp2();
        let mut term_mass = 0.0;
        for (slot, v) in rhs.iter_mut().zip(conv.values()) {
            let contribution = coeff * v.re.max(0.0);
            *slot += contribution;
            term_mass += contribution;
        }
        total_mass += term_mass;
        if k == kmax {
            last_term_mass = term_mass;
        }
    }

    let degenerate = lhs.iter().all(|&v| v == 0.0) && rhs.iter().all(|&v| v == 0.0);
    if degenerate {
        return Ok(StrombergReport {
            empirical_c: None,
            passed: true,
            degenerate: true,
            tail_fraction: 0.0,
            ratio_field: None,
        });
    }
    let mut passed = true;
    let mut worst = 0.0f64;
    let mut ratios = Vec::with_capacity(grid.len());
    for (&l, &rv) in lhs.iter().zip(&rhs) {
        if rv == 0.0 {
            if l > 0.0 {
                passed = false;
            }
            ratios.push(Complex64::new(0.0, 0.0));
        } else {
            let ratio = l / rv;
            worst = worst.max(ratio);
            ratios.push(Complex64::new(ratio, 0.0));
        }
    }
    Ok(StrombergReport {
        empirical_c: Some(worst),
        passed,
        degenerate: false,
        tail_fraction: if total_mass > 0.0 {
            last_term_mass / total_mass
        } else {
            0.0
        },
        ratio_field: Some(SampledField::new(grid, Representation::Spatial, ratios)?),
    })
}

/// Measured vs predicted norm ratio under an exact dyadic spectrum shift.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub shift: i32,
    pub measured_ratio: f64,
    pub predicted: f64,
    pub relative_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Dyadic scaling covariance: shifting the spectrum by `k` octaves (with
/// the `L^p`-matching amplitude `2^{-kn/p}`) must scale the norm by
/// `2^{k(α - n/p)}`, exactly for the band-limited family kernel and
/// within 5% for kernels whose blocks only approximately shift.
pub fn check_scaling_covariance(
    f: &SampledField,
    engine: &NormEngine,
    k: i32,
) -> Result<ScalingReport> {
    let grid = *f.grid();
    let n = grid.dim() as f64;
    let (alpha, p) = engine.alpha_p();
    let np = if p.is_infinite() { 0.0 } else { n / p };

    // both the support and its shift must stay inside the covered window
    let spec = f.as_spectral()?;
    let norms = grid.frequency_norm_table();
    let max_mag = spec.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    if max_mag == 0.0 {
        return Err(Error::Usage("scaling check needs a nonzero field".into()));
    }
    let mut smin = f64::INFINITY;
    let mut smax = 0.0f64;
    for (flat, v) in spec.values().iter().enumerate() {
        if v.norm() > 1e-13 * max_mag && flat != 0 {
            smin = smin.min(norms[flat]);
            smax = smax.max(norms[flat]);
        }
    }
    let factor = (k as f64).exp2();
    let (cov_lo, cov_hi) = match &engine.kernel {
        EngineKernel::Family(fam) => fam.covered_annulus(),
        EngineKernel::Kernel(_) => (grid.fundamental_mode(), grid.nyquist()),
    };
    for bound in [smin, smax, smin * factor, smax * factor] {
        if bound < cov_lo * (1.0 - 1e-12) || bound > cov_hi * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "spectral support [{smin:.4}, {smax:.4}] shifted by 2^{k} leaves the covered window [{cov_lo:.4}, {cov_hi:.4}]"
            )));
        }
    }

    let amplitude = (-(k as f64) * np).exp2();
    let shifted = f.dilate_dyadic(k, amplitude)?;
    let base = engine.compute(f)?;
    if base == 0.0 {
        return Err(Error::Usage("scaling check needs a nonzero norm".into()));
    }
    let measured_ratio = engine.compute(&shifted)? / base;
    let predicted = (k as f64 * (alpha - np)).exp2();
    let tolerance = if engine.is_family_kernel() { 1e-10 } else { 5e-2 };
    let relative_deviation = (measured_ratio / predicted - 1.0).abs();
    Ok(ScalingReport {
        shift: k,
        measured_ratio,
        predicted,
        relative_deviation,
        tolerance,
        passed: relative_deviation < tolerance,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DominationWitness {
    pub lambda: f64,
    pub flat_index: usize,
    pub block_value: f64,
    pub maximal_value: f64,
}

/// Pointwise laws of the Peetre maximal function: `|ψ_j*f| ≤ ψ*_j f`
/// everywhere (exactly), and monotonicity in `λ` across `lambda_list`.
#[derive(Debug, Clone, Serialize)]
pub struct DominationReport {
    pub passed: bool,
    pub domination_failures: Vec<DominationWitness>,
    pub monotonicity_failures: Vec<DominationWitness>,
}

pub fn check_maximal_domination(
    f: &SampledField,
    kernel: BlockKernel,
    j: i32,
    lambda_list: &[f64],
) -> Result<DominationReport> {
    if lambda_list.is_empty() {
        return Err(Error::Usage("need at least one λ".into()));
    }
    let mut lambdas = lambda_list.to_vec();
    lambdas.sort_by(f64::total_cmp);
    let block = dyadic_block(f, j, kernel)?;
    let mut previous: Option<Vec<f64>> = None;
    let mut domination_failures = Vec::new();
    let mut monotonicity_failures = Vec::new();
    for &lambda in &lambdas {
        let maximal = peetre_maximal(&block, j, lambda)?;
        let current: Vec<f64> = maximal.values().iter().map(|v| v.re).collect();
        for (flat, (&m, b)) in current.iter().zip(block.values()).enumerate() {
            if m < b.norm() {
                domination_failures.push(DominationWitness {
                    lambda,
                    flat_index: flat,
                    block_value: b.norm(),
                    maximal_value: m,
                });
            }
        }
        if let Some(prev) = &previous {
            // larger λ penalizes harder: values must not increase
            for (flat, (&cur, &pre)) in current.iter().zip(prev.iter()).enumerate() {
                if cur > pre {
                    monotonicity_failures.push(DominationWitness {
                        lambda,
                        flat_index: flat,
                        block_value: pre,
                        maximal_value: cur,
                    });
                }
            }
        }
        previous = Some(current);
    }
    Ok(DominationReport {
        passed: domination_failures.is_empty() && monotonicity_failures.is_empty(),
        domination_failures,
        monotonicity_failures,
    })
}

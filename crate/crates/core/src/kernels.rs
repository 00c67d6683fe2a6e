//! Analysis kernels given by closed-form Fourier symbols, plus numerical
//! checkers for the admissibility conditions used throughout the toolkit:
//! decay of the symbol at the origin (cancellation), the Tauberian
//! condition, decay of the symbol at infinity (smoothness), weighted
//! integrability and vanishing moments.
//!
//! The checkers are numerical audits: they sample symbols on logarithmic
//! ray grids and fit log-log slopes against the declared exponents with a
//! fixed slack. They do not constitute proofs.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, Representation, SampledField};

type SymbolFn = dyn Fn(&[f64]) -> Complex64 + Send + Sync;
type DerivFn = dyn Fn(&[usize], &[f64]) -> Complex64 + Send + Sync;

/// Declared exponents a kernel claims; checkers certify them numerically.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KernelParams {
    /// Fractional order for the Poisson family (0 when not applicable).
    pub beta: f64,
    /// Decay-at-origin exponent: `∂^κ ψ̂ = O(|ξ|^{r-|κ|})` as `ξ → 0`.
    pub r: f64,
    /// Decay-at-infinity exponent: `∂^κ ψ̂ = O(|ξ|^{-n-m})` as `ξ → ∞`.
    pub m: f64,
    /// Derivative-order budget: checks run over `|κ| ≤ n+1+[Λ]`.
    pub lambda: f64,
    /// Spatial growth/weight order for the weighted `L¹` hypothesis.
    pub ell: f64,
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams {
            beta: 0.0,
            r: 0.0,
            m: 0.0,
            lambda: 0.0,
            ell: 0.0,
        }
    }
}

/// A kernel described by its Fourier symbol `ψ̂`, an optional exact
/// derivative oracle, and declared parameters.
#[derive(Clone)]
pub struct KernelSpec {
    pub name: String,
    pub dim: usize,
    pub params: KernelParams,
    symbol: Arc<SymbolFn>,
    derivative: Option<Arc<DerivFn>>,
    max_derivative_order: usize,
    /// Set when the symbol is supported in `{lo ≤ |ξ| ≤ hi}`.
    pub annular_support: Option<(f64, f64)>,
}

impl std::fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KernelSpec")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("params", &self.params)
            .field("annular_support", &self.annular_support)
            .finish()
    }
}

impl KernelSpec {
    pub fn new<F>(name: impl Into<String>, dim: usize, params: KernelParams, symbol: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        KernelSpec {
            name: name.into(),
            dim,
            params,
            symbol: Arc::new(symbol),
            derivative: None,
            max_derivative_order: 0,
            annular_support: None,
        }
    }

    pub fn with_derivative<F>(mut self, max_order: usize, deriv: F) -> Self
    where
        F: Fn(&[usize], &[f64]) -> Complex64 + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(deriv));
        self.max_derivative_order = max_order;
        self
    }

    pub fn with_annular_support(mut self, lo: f64, hi: f64) -> Self {
        self.annular_support = Some((lo, hi));
        self
    }

    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        (self.symbol)(xi)
    }

    /// `∂^κ ψ̂(ξ)`: exact oracle when declared, otherwise recursive central
    /// differences with per-point step `max(|ξ|,1)·fd_step`.
    pub fn partial_derivative(
        &self,
        kappa: &[usize],
        xi: &[f64],
        cfg: &CheckConfig,
    ) -> Result<Complex64> {
        let order: usize = kappa.iter().sum();
        if order == 0 {
            return Ok(self.eval(xi));
        }
        if let Some(d) = &self.derivative {
            if order <= self.max_derivative_order {
                return Ok(d(kappa, xi));
            }
        }
        if !cfg.fd_enabled {
            return Err(Error::Capability(format!(
                "kernel {} has no derivative oracle of order {order} and finite differencing is disabled",
                self.name
            )));
        }
        Ok(self.fd_derivative(kappa, xi, cfg.fd_step))
    }

    fn fd_derivative(&self, kappa: &[usize], xi: &[f64], step: f64) -> Complex64 {
        let axis = match kappa.iter().position(|&k| k > 0) {
            Some(a) => a,
            None => return self.eval(xi),
        };
        let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        let h = norm.max(1.0) * step;
        let mut reduced = kappa.to_vec();
        reduced[axis] -= 1;
        let mut plus = xi.to_vec();
        plus[axis] += h;
        let mut minus = xi.to_vec();
        minus[axis] -= h;
        (self.fd_derivative(&reduced, &plus, step) - self.fd_derivative(&reduced, &minus, step))
            / (2.0 * h)
    }

    /// Spectral multiplier table `ψ̂(t·ξ)` on the grid's frequency lattice.
    pub fn spectral_table(&self, grid: &GridSpec, t: f64) -> Result<Vec<Complex64>> {
        if self.dim != grid.dim() {
            return Err(Error::Usage(format!(
                "kernel {} has dimension {}, grid has {}",
                self.name,
                self.dim,
                grid.dim()
            )));
        }
        let freqs = grid.axis_frequencies();
        let mut out = Vec::with_capacity(grid.len());
        let mut idx = [0usize; crate::grid::MAX_DIM];
        let mut point = [0.0f64; crate::grid::MAX_DIM];
        for flat in 0..grid.len() {
            grid.decompose(flat, &mut idx);
            for axis in 0..self.dim {
                point[axis] = t * freqs[idx[axis]];
            }
            out.push(self.eval(&point[..self.dim]));
        }
        Ok(out)
    }

    /// Spatial samples of the kernel on the grid (inverse transform of the
    /// symbol restricted to the lattice).
    pub fn spatial_field(&self, grid: &GridSpec) -> Result<SampledField> {
        let table = self.spectral_table(grid, 1.0)?;
        SampledField::new(*grid, Representation::Spectral, table)?.inverse_transform()
    }
}

/// Fractional Poisson kernel: symbol `|ξ|^β e^{-|ξ|}`.
///
/// The symbol value at the origin is 0 for `β > 0` and 1 (the radial
/// limit) for `β = 0`. In one dimension an exact derivative oracle is
/// attached.
pub fn make_fractional_poisson(beta: f64, dim: usize) -> Result<KernelSpec> {
    if !(beta >= 0.0) {
        return Err(Error::Domain(format!(
            "fractional Poisson order must be >= 0, got {beta}"
        )));
    }
    let params = KernelParams {
        beta,
        r: beta,
        m: 64.0,
        lambda: 0.0,
        ell: (beta - 0.5).max(0.0),
    };
    let symbol = move |xi: &[f64]| {
        let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        Complex64::new(r.powf(beta) * (-r).exp(), 0.0)
    };
    let mut spec = KernelSpec::new(format!("poisson:beta={beta}"), dim, params, symbol);
    if dim == 1 {
        spec = spec.with_derivative(12, move |kappa: &[usize], xi: &[f64]| {
            Complex64::new(poisson_radial_derivative(beta, kappa[0], xi[0]), 0.0)
        });
    }
    Ok(spec)
}

/// `d^k/dξ^k |ξ|^β e^{-|ξ|}` in one dimension, away from the origin.
fn poisson_radial_derivative(beta: f64, order: usize, xi: f64) -> f64 {
    let u = xi.abs();
    if u == 0.0 {
        return if order == 0 && beta == 0.0 { 1.0 } else { 0.0 };
    }
    // g(u) = u^β e^{-u}; g^(k)(u) = e^{-u} Σ_l C(k,l) β(β-1)…(β-l+1) u^{β-l} (-1)^{k-l}
    let mut acc = 0.0;
    let mut binom = 1.0f64;
    let mut falling = 1.0f64;
    for l in 0..=order {
        let sign = if (order - l).is_multiple_of(2) { 1.0 } else { -1.0 };
        acc += binom * falling * u.powf(beta - l as f64) * sign;
        binom *= (order - l) as f64 / (l + 1) as f64;
        falling *= beta - l as f64;
    }
    let g = acc * (-u).exp();
    if xi < 0.0 && order % 2 == 1 {
        -g
    } else {
        g
    }
}

/// Derivative of the Gaussian `e^{-|x|^2}`: symbol `(iξ)^κ π^{n/2} e^{-|ξ|^2/4}`.
pub fn make_gaussian_derivative(kappa: &[usize], dim: usize) -> Result<KernelSpec> {
    if kappa.len() != dim {
        return Err(Error::Usage(format!(
            "multi-index length {} does not match dimension {dim}",
            kappa.len()
        )));
    }
    let order: usize = kappa.iter().sum();
    let kappa_owned: Vec<usize> = kappa.to_vec();
    let amp = PI.powf(dim as f64 / 2.0);
    let params = KernelParams {
        beta: 0.0,
        r: order as f64,
        m: 64.0,
        lambda: 0.0,
        ell: 8.0,
    };
    let name = format!(
        "gaussd:kappa={}",
        kappa.iter().map(|k| k.to_string()).collect::<String>()
    );
    let symbol = move |xi: &[f64]| {
        let norm_sq: f64 = xi.iter().map(|v| v * v).sum();
        let mut value = Complex64::new(amp * (-norm_sq / 4.0).exp(), 0.0);
        for (axis, &k) in kappa_owned.iter().enumerate() {
            value *= Complex64::new(0.0, xi[axis]).powu(k as u32);
        }
        value
    };
    Ok(KernelSpec::new(name, dim, params, symbol))
}

/// Plain Gaussian kernel (`κ = 0`).
pub fn make_gaussian(dim: usize) -> KernelSpec {
    make_gaussian_derivative(&vec![0; dim], dim).expect("zero multi-index is valid")
}

/// The zero symbol; useful as a degenerate test case.
pub fn make_zero(dim: usize) -> KernelSpec {
    KernelSpec::new("zero", dim, KernelParams::default(), |_| {
        Complex64::new(0.0, 0.0)
    })
}

/// Rational symbol `(1+|ξ|^2)^{-s}`; decays like `|ξ|^{-2s}` at infinity.
pub fn make_rational(s: f64, dim: usize) -> Result<KernelSpec> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!(
            "rational symbol order must be positive, got {s}"
        )));
    }
    let params = KernelParams {
        beta: 0.0,
        r: 0.0,
        m: 2.0 * s - dim as f64,
        lambda: 0.0,
        ell: 0.0,
    };
    Ok(KernelSpec::new(
        format!("rational:s={s}"),
        dim,
        params,
        move |xi: &[f64]| {
            let norm_sq: f64 = xi.iter().map(|v| v * v).sum();
            Complex64::new((1.0 + norm_sq).powf(-s), 0.0)
        },
    ))
}

/// Parse a kernel id of the form `name:key=value,...`.
///
/// Known names: `poisson:beta=B`, `gaussd:kappa=D…` (one digit per axis),
/// `gauss`, `zero`, `rational:s=S`. The band-limited family kernel (`lp`)
/// is grid-dependent and resolved by callers that hold a family.
pub fn parse_kernel_id(id: &str, dim: usize) -> Result<KernelSpec> {
    let (name, args) = match id.split_once(':') {
        Some((n, a)) => (n, a),
        None => (id, ""),
    };
    let mut kv = std::collections::BTreeMap::new();
    if !args.is_empty() {
        for pair in args.split(',') {
            let (k, v) = pair.split_once('=').ok_or_else(|| {
                Error::Parse(format!("kernel argument `{pair}` is not key=value"))
            })?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    let get_f64 = |key: &str| -> Result<f64> {
        kv.get(key)
            .ok_or_else(|| Error::Parse(format!("kernel `{name}` requires {key}=")))?
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("kernel argument {key}: {e}")))
    };
    match name {
        "poisson" => make_fractional_poisson(get_f64("beta")?, dim),
        "gauss" => Ok(make_gaussian(dim)),
        "gaussd" => {
            let digits = kv
                .get("kappa")
                .ok_or_else(|| Error::Parse("kernel `gaussd` requires kappa=".into()))?;
            let kappa: Vec<usize> = digits
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::Parse(format!("bad kappa digit `{c}`")))
                })
                .collect::<Result<_>>()?;
            make_gaussian_derivative(&kappa, dim)
        }
        "zero" => Ok(make_zero(dim)),
        "rational" => make_rational(get_f64("s")?, dim),
        other => Err(Error::Parse(format!("unknown kernel `{other}`"))),
    }
}

/// Tunables for the numerical admissibility checks.
#[derive(Debug, Clone)]
pub struct CheckConfig {
    /// Ray window for the decay-at-origin fit.
    pub origin_window: (f64, f64),
    /// Ray window for the decay-at-infinity fit.
    pub infinity_window: (f64, f64),
    /// Slack added to fitted-slope comparisons.
    pub slope_slack: f64,
    /// Sample density for slope fits.
    pub slope_points_per_octave: usize,
    pub fd_enabled: bool,
    pub fd_step: f64,
    /// Decay exponent cap for the rapidly-decreasing flag.
    pub rapid_decay_cap: f64,
    /// Positivity floor for the Tauberian condition.
    pub tauberian_floor: f64,
    /// Candidate octaves `[2^g, 2^{g+1}]` for `g` in this range.
    pub tauberian_octaves: (i32, i32),
    pub tauberian_points_per_octave: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            origin_window: ((-12.0f64).exp2(), (-4.0f64).exp2()),
            infinity_window: (4.0f64.exp2(), 10.0f64.exp2()),
            slope_slack: 0.1,
            slope_points_per_octave: 2,
            fd_enabled: true,
            fd_step: 6e-6,
            rapid_decay_cap: 8.0,
            tauberian_floor: 1e-10,
            tauberian_octaves: (-6, 6),
            tauberian_points_per_octave: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    C1,
    C2,
    C3,
    WeightedL1,
    Moments,
}

/// Structured evidence attached to a check outcome.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    SlopeFit {
        kappa: Vec<usize>,
        /// `None` when every sample was numerically negligible.
        slope: Option<f64>,
        target: f64,
        passed: bool,
        window: (f64, f64),
        points: usize,
        residual: Option<f64>,
    },
    DirectionInterval {
        direction: Vec<f64>,
        a: f64,
        b: f64,
        floor: f64,
        passed: bool,
    },
    Value {
        label: String,
        value: f64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub passed: bool,
    pub tolerance: f64,
    pub witness: Vec<Witness>,
}

/// Outcome of the decay-at-infinity check together with the
/// rapidly-decreasing flag.
#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub report: ConditionReport,
    pub rapidly_decreasing: bool,
}

/// Unit direction mesh used by ray-based checks: the two signs in 1D, 64
/// equally spaced angles in 2D, a Fibonacci sphere in 3D.
pub fn direction_mesh(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..64)
            .map(|i| {
                let theta = 2.0 * PI * i as f64 / 64.0;
                vec![theta.cos(), theta.sin()]
            })
            .collect(),
        3 => {
            let count = 128;
            let golden = PI * (3.0 - 5.0f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let rho = (1.0 - z * z).sqrt();
                    let theta = golden * i as f64;
                    vec![rho * theta.cos(), rho * theta.sin(), z]
                })
                .collect()
        }
        _ => panic!("unsupported dimension {dim}"),
    }
}

/// All multi-indices in `ℕ^dim` with total degree at most `maxdeg`,
/// ordered by degree then lexicographically.
pub fn multi_indices(dim: usize, maxdeg: usize) -> Vec<Vec<usize>> {
    fn compositions(dim: usize, deg: usize, out: &mut Vec<Vec<usize>>, prefix: &mut Vec<usize>) {
        if dim == 1 {
            prefix.push(deg);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=deg {
            prefix.push(first);
            compositions(dim - 1, deg - first, out, prefix);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for deg in 0..=maxdeg {
        compositions(dim, deg, &mut out, &mut Vec::new());
    }
    out
}

/// Least-squares slope of `ln(value)` against `ln(t)`. Returns the slope
/// and the RMS residual; `None` when fewer than two points are given.
pub fn fit_log_slope(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    Some((slope, (rss / n).sqrt()))
}

const NEGLIGIBLE: f64 = 1e-280;

/// Per multi-index: the index, an optional `(slope, rms residual)` fit and
/// the number of usable sample points.
type SlopeFits = Vec<(Vec<usize>, Option<(f64, f64)>, usize)>;

fn log_spaced(window: (f64, f64), per_octave: usize) -> Vec<f64> {
    let octaves = (window.1 / window.0).log2();
    let count = (octaves * per_octave as f64).round() as usize + 1;
    (0..count)
        .map(|i| window.0 * (octaves * i as f64 / (count - 1) as f64).exp2())
        .collect()
}

/// Per-multi-index slope fits of `max_direction |∂^κ ψ̂(t u)|` over a log
/// window in `t`.
fn envelope_slopes(
    k: &KernelSpec,
    max_order: usize,
    window: (f64, f64),
    cfg: &CheckConfig,
) -> Result<SlopeFits> {
    let dirs = direction_mesh(k.dim);
    let ts = log_spaced(window, cfg.slope_points_per_octave);
    let mut out = Vec::new();
    for kappa in multi_indices(k.dim, max_order) {
        let mut pts = Vec::with_capacity(ts.len());
        for &t in &ts {
            let mut envelope = 0.0f64;
            for dir in &dirs {
                let xi: Vec<f64> = dir.iter().map(|d| d * t).collect();
                let v = k.partial_derivative(&kappa, &xi, cfg)?;
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::Evaluation(format!(
                        "symbol derivative {kappa:?} of {} not finite at t={t}",
                        k.name
                    )));
                }
                envelope = envelope.max(v.norm());
            }
            if envelope > NEGLIGIBLE {
                pts.push((t, envelope));
            }
        }
        // Require enough usable samples over a wide-enough span; otherwise
        // the derivative is numerically negligible on the window.
        let span_ok = pts.len() >= 5
            && pts.last().map(|p| p.0).unwrap_or(0.0) / pts.first().map(|p| p.0).unwrap_or(1.0)
                >= 16.0;
        let fit = if span_ok { fit_log_slope(&pts) } else { None };
        out.push((kappa, fit, pts.len()));
    }
    Ok(out)
}

fn derivative_budget(dim: usize, lambda: f64) -> usize {
    dim + 1 + lambda.max(0.0).floor() as usize
}

/// Cancellation check: fits the log-log slope of `|∂^κ ψ̂|` along rays as
/// `|ξ| → 0` and compares against `r - |κ|` for every `|κ| ≤ n+1+[Λ]`.
pub fn check_decay_origin(
    k: &KernelSpec,
    r: f64,
    lambda: f64,
    cfg: &CheckConfig,
) -> Result<ConditionReport> {
    let max_order = derivative_budget(k.dim, lambda);
    let slopes = envelope_slopes(k, max_order, cfg.origin_window, cfg)?;
    let mut witness = Vec::new();
    let mut passed = true;
    for (kappa, fit, points) in slopes {
        let order: usize = kappa.iter().sum();
        let target = r - order as f64;
        let (slope, residual, ok) = match fit {
            // vanishing samples satisfy any polynomial lower bound
            None => (None, None, true),
            Some((s, res)) => (Some(s), Some(res), s >= target - cfg.slope_slack),
        };
        passed &= ok;
        witness.push(Witness::SlopeFit {
            kappa,
            slope,
            target,
            passed: ok,
            window: cfg.origin_window,
            points,
            residual,
        });
    }
    Ok(ConditionReport {
        condition: Condition::C1,
        passed,
        tolerance: cfg.slope_slack,
        witness,
    })
}

/// Smoothness check: slope fit of `|∂^κ ψ̂|` as `|ξ| → ∞` against `-n-m`,
/// plus a rapidly-decreasing flag (slope test passes for `m` up to the
/// configured cap).
pub fn check_decay_infinity(
    k: &KernelSpec,
    m: f64,
    lambda: f64,
    cfg: &CheckConfig,
) -> Result<DecayReport> {
    let max_order = derivative_budget(k.dim, lambda);
    let slopes = envelope_slopes(k, max_order, cfg.infinity_window, cfg)?;
    let n = k.dim as f64;
    let mut witness = Vec::new();
    let mut passed = true;
    let mut rapid = true;
    for (kappa, fit, points) in slopes {
        let target = -n - m;
        let (slope, residual, ok) = match fit {
            // values below the floor over the whole window: as fast as any
            // polynomial decay we can certify
            None => (None, None, true),
            Some((s, res)) => (Some(s), Some(res), s <= target + cfg.slope_slack),
        };
        passed &= ok;
        if let Some(s) = slope {
            rapid &= s <= -n - cfg.rapid_decay_cap + cfg.slope_slack;
        }
        witness.push(Witness::SlopeFit {
            kappa,
            slope,
            target,
            passed: ok,
            window: cfg.infinity_window,
            points,
            residual,
        });
    }
    Ok(DecayReport {
        report: ConditionReport {
            condition: Condition::C3,
            passed,
            tolerance: cfg.slope_slack,
            witness,
        },
        rapidly_decreasing: rapid,
    })
}

/// Detailed Tauberian search outcome; feeds both the condition report and
/// the generalized Calderón pair construction.
#[derive(Debug, Clone)]
pub struct TauberianAnalysis {
    /// Per direction: best octave start `a` and the certified floor on
    /// `[a, 2a]`.
    pub per_direction: Vec<(Vec<f64>, f64, f64)>,
    /// Best octave uniform over directions: `(a, min_u min_t |ψ̂(tu)|)`.
    pub global: Option<(f64, f64)>,
    pub passed: bool,
}

/// Search the dyadic candidate octaves `[a, 2a]` for scales on which the
/// symbol stays away from zero along every mesh direction. The `t`-grid
/// samples octave interiors, so symbols vanishing exactly at dyadic points
/// (like the band-limited family kernel) still certify.
pub fn tauberian_analysis(k: &KernelSpec, cfg: &CheckConfig) -> TauberianAnalysis {
    let dirs = direction_mesh(k.dim);
    let ppo = cfg.tauberian_points_per_octave;
    let offsets: Vec<f64> = (0..ppo)
        .map(|i| ((i as f64 + 0.5) / ppo as f64).exp2())
        .collect();
    let octaves: Vec<f64> = (cfg.tauberian_octaves.0..=cfg.tauberian_octaves.1)
        .map(|g| (g as f64).exp2())
        .collect();
    let mut per_direction = Vec::with_capacity(dirs.len());
    let mut global_best: Option<(f64, f64)> = None;
    let mut per_octave_global = vec![f64::INFINITY; octaves.len()];
    let mut passed = true;
    for dir in &dirs {
        let mut best = (octaves[0], 0.0f64);
        for (gi, &a) in octaves.iter().enumerate() {
            let mut floor = f64::INFINITY;
            for &off in &offsets {
                let t = a * off;
                let xi: Vec<f64> = dir.iter().map(|d| d * t).collect();
                floor = floor.min(k.eval(&xi).norm());
            }
            if floor > best.1 {
                best = (a, floor);
            }
            per_octave_global[gi] = per_octave_global[gi].min(floor);
        }
        passed &= best.1 > cfg.tauberian_floor;
        per_direction.push((dir.clone(), best.0, best.1));
    }
    for (gi, &a) in octaves.iter().enumerate() {
        let c = per_octave_global[gi];
        if global_best.is_none_or(|(_, b)| c > b) {
            global_best = Some((a, c));
        }
    }
    let global = global_best.filter(|&(_, c)| c > cfg.tauberian_floor);
    TauberianAnalysis {
        per_direction,
        global,
        passed,
    }
}

/// Tauberian condition: along every mesh direction some octave `[a, 2a]`
/// keeps `|ψ̂(tξ)|` above the configured floor.
pub fn check_tauberian(k: &KernelSpec, cfg: &CheckConfig) -> ConditionReport {
    let analysis = tauberian_analysis(k, cfg);
    let witness = analysis
        .per_direction
        .iter()
        .map(|(dir, a, c0)| Witness::DirectionInterval {
            direction: dir.clone(),
            a: *a,
            b: 2.0 * a,
            floor: *c0,
            passed: *c0 > cfg.tauberian_floor,
        })
        .collect();
    ConditionReport {
        condition: Condition::C2,
        passed: analysis.passed,
        tolerance: cfg.tauberian_floor,
        witness,
    }
}

/// Grid quadrature of the moments `∫ x^κ ψ(x) dx` for all `|κ| ≤ maxdeg`.
/// Values are returned as-is; callers compare against their tolerance.
pub fn vanishing_moments(
    k: &KernelSpec,
    grid: &GridSpec,
    maxdeg: usize,
) -> Result<Vec<(Vec<usize>, Complex64)>> {
    let spatial = k.spatial_field(grid)?;
    let coords = grid.axis_coordinates();
    let cell = grid.cell_measure();
    let mut idx = [0usize; crate::grid::MAX_DIM];
    let mut out = Vec::new();
    for kappa in multi_indices(k.dim, maxdeg) {
        let mut acc = Complex64::new(0.0, 0.0);
        for flat in 0..grid.len() {
            grid.decompose(flat, &mut idx);
            let mut weight = 1.0;
            for axis in 0..k.dim {
                weight *= coords[idx[axis]].powi(kappa[axis] as i32);
            }
            acc += spatial.values()[flat] * weight;
        }
        out.push((kappa, acc * cell));
    }
    Ok(out)
}

/// Grid quadrature of `∫ (1+|x|)^ℓ |ψ(x)| dx` over the fundamental domain,
/// with `|x|` the periodic distance. Divergence shows up as growth of the
/// value across increasing extents.
pub fn weighted_l1(k: &KernelSpec, grid: &GridSpec, ell: f64) -> Result<f64> {
    if !(ell >= 0.0) {
        return Err(Error::Domain(format!("weight order must be >= 0, got {ell}")));
    }
    let spatial = k.spatial_field(grid)?;
    let dist = grid.distance_table();
    let cell = grid.cell_measure();
    Ok(spatial
        .values()
        .iter()
        .zip(&dist)
        .map(|(v, d)| (1.0 + d).powf(ell) * v.norm())
        .sum::<f64>()
        * cell)
}

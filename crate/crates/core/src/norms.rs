//! Besov-Lipschitz and Triebel-Lizorkin quasi-norm engines over a dyadic
//! scale window, including the `p = ∞` dyadic-cube variant, the
//! Peetre-maximal variants and the Hardy-space-flavoured variants.
//!
//! The zero frequency is excluded from every engine: quasi-norms here are
//! homogeneous objects and the discrete stand-in for working modulo
//! polynomials is to ignore `f̂(0)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{lp_norm_of, GridSpec, SampledField, MAX_DIM};
use crate::kernels::KernelSpec;
use crate::lp::{dyadic_block, BlockKernel};
use crate::maximal::{peetre_maximal, smooth_maximal};

/// Smoothness/integrability parameter bundle `(α, p, q)` with an optional
/// Peetre exponent `λ` (defaulted to `max(n/p, n/q) + 1`).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NormParams {
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    #[serde(default)]
    pub lambda: Option<f64>,
}

impl NormParams {
    pub fn new(alpha: f64, p: f64, q: f64) -> Result<Self> {
        let params = NormParams {
            alpha,
            p,
            q,
            lambda: None,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0) || self.p.is_nan() {
            return Err(Error::Domain(format!("p must be positive, got {}", self.p)));
        }
        if !(self.q > 0.0) || self.q.is_nan() {
            return Err(Error::Domain(format!("q must be positive, got {}", self.q)));
        }
        if !self.alpha.is_finite() {
            return Err(Error::Domain(format!(
                "alpha must be finite, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Effective Peetre exponent: `max(n/p, n/q) + 1` unless overridden,
    /// with `n + 1` in the `p = q = ∞` corner.
    pub fn effective_lambda(&self, dim: usize) -> f64 {
        if let Some(l) = self.lambda {
            return l;
        }
        let n = dim as f64;
        if self.p.is_infinite() && self.q.is_infinite() {
            return n + 1.0;
        }
        let np = if self.p.is_infinite() { 0.0 } else { n / self.p };
        let nq = if self.q.is_infinite() { 0.0 } else { n / self.q };
        np.max(nq) + 1.0
    }

    fn validate_peetre(&self, dim: usize, triebel: bool) -> Result<f64> {
        let n = dim as f64;
        let lambda = self.effective_lambda(dim);
        let np = if self.p.is_infinite() { 0.0 } else { n / self.p };
        let nq = if self.q.is_infinite() { 0.0 } else { n / self.q };
        let bound = if self.p.is_infinite() && self.q.is_infinite() {
            n
        } else if triebel {
            np.max(nq)
        } else {
            np
        };
        if lambda <= bound {
            return Err(Error::Domain(format!(
                "Peetre exponent λ={lambda} must exceed {bound}"
            )));
        }
        Ok(lambda)
    }
}

/// `ℓ^q` aggregation of nonnegative terms; `q = ∞` takes the max and
/// `q < 1` uses the quasi-norm power sum as written.
fn lq_aggregate(terms: impl Iterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        terms.fold(0.0, f64::max)
    } else {
        terms.map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

fn validate_window(window: (i32, i32), kernel: &BlockKernel) -> Result<()> {
    if window.0 > window.1 {
        return Err(Error::Config(format!(
            "scale window [{}, {}] is empty",
            window.0, window.1
        )));
    }
    if let BlockKernel::Family(fam) = kernel {
        if window.0 < fam.jmin() || window.1 > fam.jmax() {
            return Err(Error::Config(format!(
                "window [{}, {}] outside family window [{}, {}]",
                window.0,
                window.1,
                fam.jmin(),
                fam.jmax()
            )));
        }
    }
    Ok(())
}

/// Per-scale Besov terms `2^{jα} ‖ψ_j * f‖_{L^p}` over the window (the
/// first/last entries double as truncation-tail indicators).
pub fn besov_scale_terms(
    f: &SampledField,
    params: &NormParams,
    kernel: BlockKernel,
    window: (i32, i32),
) -> Result<Vec<(i32, f64)>> {
    params.validate()?;
    validate_window(window, &kernel)?;
    let clean = f.without_dc()?;
    let mut terms = Vec::with_capacity((window.1 - window.0 + 1) as usize);
    for j in window.0..=window.1 {
        let block = dyadic_block(&clean, j, kernel)?;
        let weight = (j as f64 * params.alpha).exp2();
        terms.push((j, weight * block.lp_norm(params.p)?));
    }
    Ok(terms)
}

/// Besov-Lipschitz quasi-norm
/// `( Σ_j (2^{jα} ‖ψ_j*f‖_{L^p})^q )^{1/q}` over the scale window.
pub fn besov_norm(
    f: &SampledField,
    params: &NormParams,
    kernel: BlockKernel,
    window: (i32, i32),
) -> Result<f64> {
    let terms = besov_scale_terms(f, params, kernel, window)?;
    Ok(lq_aggregate(terms.into_iter().map(|(_, t)| t), params.q))
}

/// Shared inner loop for the Triebel-Lizorkin family: aggregates
/// per-scale fields pointwise in `ℓ^q`, then takes `L^p`.
fn triebel_from_blocks<F>(
    grid: &GridSpec,
    params: &NormParams,
    window: (i32, i32),
    mut block_mags: F,
) -> Result<f64>
where
    F: FnMut(i32) -> Result<Vec<f64>>,
{
    let q = params.q;
    let mut acc = vec![0.0f64; grid.len()];
    for j in window.0..=window.1 {
        let weight = (j as f64 * params.alpha).exp2();
        let mags = block_mags(j)?;
        if q.is_infinite() {
            for (slot, m) in acc.iter_mut().zip(&mags) {
                let v = weight * m;
                if v > *slot {
                    *slot = v;
                }
            }
        } else {
            for (slot, m) in acc.iter_mut().zip(&mags) {
                *slot += (weight * m).powf(q);
            }
        }
    }
    let pointwise = acc.into_iter().map(|v| {
        if q.is_infinite() {
            v
        } else {
            v.powf(1.0 / q)
        }
    });
    Ok(lp_norm_of(pointwise, params.p, grid.cell_measure()))
}

/// Triebel-Lizorkin quasi-norm
/// `‖ (Σ_j (2^{jα}|ψ_j*f|)^q)^{1/q} ‖_{L^p}` for `p < ∞`.
pub fn triebel_norm(
    f: &SampledField,
    params: &NormParams,
    kernel: BlockKernel,
    window: (i32, i32),
) -> Result<f64> {
    params.validate()?;
    if params.p.is_infinite() {
        return Err(Error::Usage(
            "p = ∞ is handled by triebel_infinity_norm (dyadic-cube variant)".into(),
        ));
    }
    validate_window(window, &kernel)?;
    let clean = f.without_dc()?;
    let grid = *f.grid();
    triebel_from_blocks(&grid, params, window, |j| {
        Ok(dyadic_block(&clean, j, kernel)?
            .values()
            .iter()
            .map(|v| v.norm())
            .collect())
    })
}

/// Peetre-maximal Besov norm: the per-scale `L^p` data is
/// `ψ*_j f = sup_y |ψ_j*f(·-y)|/(1+2^j|y|)^λ` instead of `|ψ_j*f|`.
pub fn peetre_besov_norm(
    f: &SampledField,
    params: &NormParams,
    kernel: BlockKernel,
    window: (i32, i32),
) -> Result<f64> {
    params.validate()?;
    let lambda = params.validate_peetre(f.grid().dim(), false)?;
    validate_window(window, &kernel)?;
    let clean = f.without_dc()?;
    let mut terms = Vec::new();
    for j in window.0..=window.1 {
        let block = dyadic_block(&clean, j, kernel)?;
        let maximal = peetre_maximal(&block, j, lambda)?;
        let weight = (j as f64 * params.alpha).exp2();
        terms.push(weight * maximal.lp_norm(params.p)?);
    }
    Ok(lq_aggregate(terms.into_iter(), params.q))
}

/// Peetre-maximal Triebel-Lizorkin norm (`p < ∞`).
pub fn peetre_triebel_norm(
    f: &SampledField,
    params: &NormParams,
    kernel: BlockKernel,
    window: (i32, i32),
) -> Result<f64> {
    params.validate()?;
    if params.p.is_infinite() {
        return Err(Error::Usage(
            "p = ∞ is handled by triebel_infinity_norm (dyadic-cube variant)".into(),
        ));
    }
    let lambda = params.validate_peetre(f.grid().dim(), true)?;
    validate_window(window, &kernel)?;
    let clean = f.without_dc()?;
    let grid = *f.grid();
    triebel_from_blocks(&grid, params, window, |j| {
        let block = dyadic_block(&clean, j, kernel)?;
        Ok(peetre_maximal(&block, j, lambda)?
            .values()
            .iter()
            .map(|v| v.re)
            .collect())
    })
}

fn check_hardy_mollifier(phi: &KernelSpec) -> Result<()> {
    let zero = vec![0.0f64; phi.dim];
    if phi.eval(&zero).norm() <= 1e-8 {
        return Err(Error::Precondition(format!(
            "mollifier {} has vanishing mass (|φ̂(0)| ≤ 1e-8)",
            phi.name
        )));
    }
    Ok(())
}

/// Hardy-flavoured Besov norm: per-scale data `sup_t |φ_t * ψ_j * f|`
/// with a mollifier of nonzero mass.
pub fn hardy_besov_norm(
    f: &SampledField,
    params: &NormParams,
    kernel: BlockKernel,
    window: (i32, i32),
    phi: &KernelSpec,
    tgrid: &[f64],
) -> Result<f64> {
    params.validate()?;
    check_hardy_mollifier(phi)?;
    validate_window(window, &kernel)?;
    let clean = f.without_dc()?;
    let mut terms = Vec::new();
    for j in window.0..=window.1 {
        let block = dyadic_block(&clean, j, kernel)?;
        let maximal = smooth_maximal(&block, phi, tgrid)?;
        let weight = (j as f64 * params.alpha).exp2();
        terms.push(weight * maximal.lp_norm(params.p)?);
    }
    Ok(lq_aggregate(terms.into_iter(), params.q))
}

/// Hardy-flavoured Triebel-Lizorkin norm (`p < ∞`).
pub fn hardy_triebel_norm(
    f: &SampledField,
    params: &NormParams,
    kernel: BlockKernel,
    window: (i32, i32),
    phi: &KernelSpec,
    tgrid: &[f64],
) -> Result<f64> {
    params.validate()?;
    if params.p.is_infinite() {
        return Err(Error::Usage(
            "p = ∞ is handled by triebel_infinity_norm (dyadic-cube variant)".into(),
        ));
    }
    check_hardy_mollifier(phi)?;
    validate_window(window, &kernel)?;
    let clean = f.without_dc()?;
    let grid = *f.grid();
    triebel_from_blocks(&grid, params, window, |j| {
        let block = dyadic_block(&clean, j, kernel)?;
        Ok(smooth_maximal(&block, phi, tgrid)?
            .values()
            .iter()
            .map(|v| v.re)
            .collect())
    })
}

/// Dyadic cube decomposition of the torus: level `v` tiles it with
/// `2^{vn}` congruent cubes; level 0 is the whole torus and the deepest
/// level keeps at least 4 samples per axis.
pub struct CubeLevels {
    pub levels: usize,
    log2_extent: f64,
}

impl CubeLevels {
    pub fn for_grid(grid: &GridSpec) -> Self {
        let mut levels = 1usize;
        while grid.samples() >> levels >= 4 {
            levels += 1;
        }
        CubeLevels {
            levels,
            log2_extent: grid.extent().log2(),
        }
    }

    /// Lowest dyadic scale participating at a level: `j ≥ -log₂(side)`.
    pub fn scale_threshold(&self, level: usize) -> i32 {
        (level as f64 - self.log2_extent).ceil() as i32
    }
}

/// `F^α_{∞,q}` norm: sup over dyadic cubes `Q` of
/// `(|Q|^{-1} ∫_Q Σ_{j ≥ -ℓ(Q)} (2^{jα}|ψ_j*f|)^q dx)^{1/q}`; for
/// `q = ∞`, sup over cubes and eligible scales of the cube average of
/// `2^{jα}|ψ_j*f|`.
///
/// The torus hosts finitely many cube levels, so this is the lower-bound
/// rendering of the full-space supremum.
pub fn triebel_infinity_norm(
    f: &SampledField,
    alpha: f64,
    q: f64,
    kernel: BlockKernel,
    window: (i32, i32),
) -> Result<f64> {
    if !(q > 0.0) || q.is_nan() {
        return Err(Error::Domain(format!("q must be positive, got {q}")));
    }
    validate_window(window, &kernel)?;
    let grid = *f.grid();
    let clean = f.without_dc()?;
    let cubes = CubeLevels::for_grid(&grid);
    // weighted block magnitudes per scale
    let mut weighted: Vec<Vec<f64>> = Vec::new();
    for j in window.0..=window.1 {
        let block = dyadic_block(&clean, j, kernel)?;
        let w = (j as f64 * alpha).exp2();
        weighted.push(block.values().iter().map(|v| w * v.norm()).collect());
    }
    let mut best = 0.0f64;
    for level in 0..cubes.levels {
        let threshold = cubes.scale_threshold(level);
        let j_start = threshold.max(window.0);
        if j_start > window.1 {
            continue;
        }
        let cube_cells = cube_cell_count(&grid, level);
        if q.is_infinite() {
            for j in j_start..=window.1 {
                let sums = cube_sums(&grid, level, &weighted[(j - window.0) as usize]);
                for s in sums {
                    best = best.max(s / cube_cells as f64);
                }
            }
        } else {
            let mut pointwise = vec![0.0f64; grid.len()];
            for j in j_start..=window.1 {
                for (slot, &v) in pointwise
                    .iter_mut()
                    .zip(&weighted[(j - window.0) as usize])
                {
                    *slot += v.powf(q);
                }
            }
            let sums = cube_sums(&grid, level, &pointwise);
            for s in sums {
                best = best.max((s / cube_cells as f64).powf(1.0 / q));
            }
        }
    }
    Ok(best)
}

fn cube_cell_count(grid: &GridSpec, level: usize) -> usize {
    (grid.samples() >> level).pow(grid.dim() as u32)
}

/// Sum of `data` over each cube at `level`, indexed by cube id.
fn cube_sums(grid: &GridSpec, level: usize, data: &[f64]) -> Vec<f64> {
    let per_axis = 1usize << level;
    let side = grid.samples() >> level;
    let cube_count = per_axis.pow(grid.dim() as u32);
    let mut sums = vec![0.0f64; cube_count];
    let mut idx = [0usize; MAX_DIM];
    for (flat, &v) in data.iter().enumerate() {
        grid.decompose(flat, &mut idx);
        let mut cube = 0usize;
        for axis in 0..grid.dim() {
            cube = cube * per_axis + idx[axis] / side;
        }
        sums[cube] += v;
    }
    sums
}

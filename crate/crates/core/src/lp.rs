//! The fixed band-limited analysis family with an exact discrete partition
//! of unity, dyadic frequency blocks, and both Calderón reproducing
//! formulas (classical partial sums with polynomial correction, and the
//! generalized dual-pair construction for Tauberian kernels).

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, Representation, SampledField};
use crate::kernels::{multi_indices, tauberian_analysis, CheckConfig, KernelSpec};

/// Seventh-order polynomial smoothstep: 0 at 0, 1 at 1, with three
/// vanishing derivatives at both ends.
fn smoothstep7(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let u4 = u * u * u * u;
        u4 * (35.0 - 84.0 * u + 70.0 * u * u - 20.0 * u * u * u)
    }
}

/// Radial bump profile `h` supported on `(1/2, 2)`, symmetric in `log₂ t`
/// with `h(1) = 1`, three continuous derivatives at the seams, and the
/// log-dyadic partition property `Σ_j h(2^{-j} t) = 1` for every `t > 0`.
pub fn profile_bump(t: f64) -> f64 {
    if t <= 0.5 || t >= 2.0 {
        return 0.0;
    }
    smoothstep7(1.0 - t.log2().abs())
}

/// The family kernel symbol on the full line of scales:
/// `h(|ξ|)/sqrt(Σ_{j∈ℤ} h(2^{-j}|ξ|)²)`.
fn family_symbol(norm: f64) -> f64 {
    let h = profile_bump(norm);
    if h == 0.0 {
        return 0.0;
    }
    // at most the two scales adjacent to log2(norm) contribute
    let base = norm.log2().floor() as i32;
    let mut denom = 0.0;
    for j in (base - 1)..=(base + 1) {
        let hj = profile_bump(norm * (-j as f64).exp2());
        denom += hj * hj;
    }
    h / denom.sqrt()
}

/// Band-limited kernel family `𝒒` with per-scale multiplier tables and an
/// exact-on-grid partition of unity over the scale window.
#[derive(Debug, Clone)]
pub struct LPFamily {
    grid: GridSpec,
    jmin: i32,
    jmax: i32,
    tables: Vec<Vec<f64>>,
}

/// Construct the family on `grid` for scales `j ∈ [jmin, jmax]`.
///
/// The covered annulus `[2^{jmin+1}, 2^{jmax-1}]`, on which the partition
/// sums exactly to one, must fit between the lowest nonzero mode and the
/// Nyquist bound.
pub fn build_lp_family(grid: &GridSpec, jmin: i32, jmax: i32) -> Result<LPFamily> {
    if jmax - jmin < 2 {
        return Err(Error::Config(format!(
            "scale window [{jmin}, {jmax}] must span at least two octaves"
        )));
    }
    let lo = ((jmin + 1) as f64).exp2();
    let hi = ((jmax - 1) as f64).exp2();
    if lo < grid.fundamental_mode() {
        return Err(Error::Config(format!(
            "covered annulus bottom 2^{} = {lo} lies below the lowest nonzero mode {}",
            jmin + 1,
            grid.fundamental_mode()
        )));
    }
    if hi > grid.nyquist() {
        return Err(Error::Config(format!(
            "covered annulus top 2^{} = {hi} exceeds the Nyquist bound {}",
            jmax - 1,
            grid.nyquist()
        )));
    }
    let norms = grid.frequency_norm_table();
    let scales: Vec<i32> = (jmin..=jmax).collect();
    let mut tables = vec![vec![0.0f64; grid.len()]; scales.len()];
    let mut hs = vec![0.0f64; scales.len()];
    for (flat, &norm) in norms.iter().enumerate() {
        let mut sum_sq = 0.0;
        for (si, &j) in scales.iter().enumerate() {
            let h = profile_bump(norm * (-j as f64).exp2());
            hs[si] = h;
            sum_sq += h * h;
        }
        if sum_sq > 0.0 {
            let inv = 1.0 / sum_sq.sqrt();
            for (si, &h) in hs.iter().enumerate() {
                tables[si][flat] = h * inv;
            }
        }
    }
    Ok(LPFamily {
        grid: *grid,
        jmin,
        jmax,
        tables,
    })
}

impl LPFamily {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn jmin(&self) -> i32 {
        self.jmin
    }

    pub fn jmax(&self) -> i32 {
        self.jmax
    }

    pub fn window(&self) -> (i32, i32) {
        (self.jmin, self.jmax)
    }

    /// Frequency annulus on which the partition of unity is exact.
    pub fn covered_annulus(&self) -> (f64, f64) {
        (
            ((self.jmin + 1) as f64).exp2(),
            ((self.jmax - 1) as f64).exp2(),
        )
    }

    /// Real multiplier table `𝒒̂(2^{-j}ξ)` for a scale in the window.
    pub fn multiplier(&self, j: i32) -> Result<&[f64]> {
        if j < self.jmin || j > self.jmax {
            return Err(Error::Config(format!(
                "scale {j} outside family window [{}, {}]",
                self.jmin, self.jmax
            )));
        }
        Ok(&self.tables[(j - self.jmin) as usize])
    }

    /// Largest deviation of `Σ_j 𝒒̂(2^{-j}ξ)²` from 1 over lattice points in
    /// the covered annulus.
    pub fn partition_residual(&self) -> f64 {
        let norms = self.grid.frequency_norm_table();
        let (lo, hi) = self.covered_annulus();
        let mut worst = 0.0f64;
        for (flat, &norm) in norms.iter().enumerate() {
            if norm >= lo && norm <= hi {
                let sum: f64 = self.tables.iter().map(|t| t[flat] * t[flat]).sum();
                worst = worst.max((sum - 1.0).abs());
            }
        }
        worst
    }

    /// The family kernel as a grid-free symbol (normalized over the full
    /// line of scales; coincides with the window tables on the covered
    /// annulus).
    pub fn as_kernel(&self) -> KernelSpec {
        let dim = self.grid.dim();
        KernelSpec::new(
            "lp",
            dim,
            crate::kernels::KernelParams {
                beta: 0.0,
                r: 64.0,
                m: 64.0,
                lambda: 0.0,
                ell: 2.0,
            },
            |xi: &[f64]| {
                let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
                Complex64::new(family_symbol(norm), 0.0)
            },
        )
        .with_annular_support(0.5, 2.0)
    }
}

/// Analysis kernel argument accepted by block and norm operations: either
/// the band-limited family or a closed-form symbol.
#[derive(Debug, Clone, Copy)]
pub enum BlockKernel<'a> {
    Family(&'a LPFamily),
    Kernel(&'a KernelSpec),
}

impl<'a> BlockKernel<'a> {
    pub fn name(&self) -> String {
        match self {
            BlockKernel::Family(_) => "lp".to_string(),
            BlockKernel::Kernel(k) => k.name.clone(),
        }
    }

    /// Spectral multiplier `ψ̂(2^{-j}ξ)` on the grid.
    pub fn multiplier(&self, grid: &GridSpec, j: i32) -> Result<Vec<Complex64>> {
        match self {
            BlockKernel::Family(fam) => {
                if fam.grid() != grid {
                    return Err(Error::Usage(
                        "family grid does not match field grid".into(),
                    ));
                }
                Ok(fam
                    .multiplier(j)?
                    .iter()
                    .map(|&v| Complex64::new(v, 0.0))
                    .collect())
            }
            BlockKernel::Kernel(k) => k.spectral_table(grid, (-j as f64).exp2()),
        }
    }
}

/// Dyadic frequency block `ψ_j * f`, realized as spectral multiplication
/// by `ψ̂(2^{-j}ξ)`.
pub fn dyadic_block(f: &SampledField, j: i32, kernel: BlockKernel) -> Result<SampledField> {
    let table = kernel.multiplier(f.grid(), j)?;
    f.apply_multiplier(&table)
}

/// Partial sum `Σ_{j=n_lo+1}^{m_hi} 𝒒_j * 𝒒_j * f` of the classical
/// reproducing formula; its spectrum is `f̂(ξ) Σ 𝒒̂(2^{-j}ξ)²`.
pub fn calderon_partial_sum(
    f: &SampledField,
    family: &LPFamily,
    n_lo: i32,
    m_hi: i32,
) -> Result<SampledField> {
    if n_lo >= m_hi {
        return Err(Error::Config(format!(
            "partial sum needs n_lo < m_hi, got [{n_lo}, {m_hi}]"
        )));
    }
    if n_lo + 1 < family.jmin() || m_hi > family.jmax() {
        return Err(Error::Config(format!(
            "partial-sum range ({n_lo}, {m_hi}] outside family window [{}, {}]",
            family.jmin(),
            family.jmax()
        )));
    }
    if family.grid() != f.grid() {
        return Err(Error::Usage("family grid does not match field grid".into()));
    }
    let mut table = vec![Complex64::new(0.0, 0.0); f.grid().len()];
    for j in (n_lo + 1)..=m_hi {
        let q = family.multiplier(j)?;
        for (slot, &v) in table.iter_mut().zip(q.iter()) {
            *slot += Complex64::new(v * v, 0.0);
        }
    }
    f.apply_multiplier(&table)
}

/// Polynomial in `n` variables with complex coefficients per multi-index.
/// Degree −1 encodes the zero polynomial.
#[derive(Debug, Clone, Serialize)]
pub struct Polynomial {
    pub degree: i32,
    pub coefficients: Vec<(Vec<usize>, Complex64)>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial {
            degree: -1,
            coefficients: Vec::new(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (kappa, c) in &self.coefficients {
            let mut mono = 1.0;
            for (axis, &k) in kappa.iter().enumerate() {
                mono *= x[axis].powi(k as i32);
            }
            acc += c * mono;
        }
        acc
    }
}

/// Taylor polynomial of `φ_N * f` at the origin, with `φ̂_N` the low-pass
/// completion of the family below scale `N` (set to 1 for `|ξ| ≤ 2^{jmin}`
/// and clipped to the window). Coefficients come from spectral
/// differentiation: `∂^κ(φ_N*f)(0)/κ!`.
pub fn polynomial_correction(
    f: &SampledField,
    family: &LPFamily,
    n_scale: i32,
    deg: usize,
) -> Result<Polynomial> {
    if deg > 6 {
        return Err(Error::Capability(format!(
            "polynomial degree {deg} exceeds the grid-accuracy cap of 6"
        )));
    }
    if n_scale < family.jmin() || n_scale > family.jmax() {
        return Err(Error::Config(format!(
            "low-pass scale {n_scale} outside family window [{}, {}]",
            family.jmin(),
            family.jmax()
        )));
    }
    if family.grid() != f.grid() {
        return Err(Error::Usage("family grid does not match field grid".into()));
    }
    let grid = *f.grid();
    let spec = f.as_spectral()?;
    let norms = grid.frequency_norm_table();
    let floor = (family.jmin() as f64).exp2();
    // low-pass table Σ_{j ≤ N} 𝒒̂², completed by 1 at and below the window
    let mut lowpass = vec![0.0f64; grid.len()];
    for (flat, &norm) in norms.iter().enumerate() {
        if norm <= floor {
            lowpass[flat] = 1.0;
        } else {
            let mut s = 0.0;
            for j in family.jmin()..=n_scale {
                let q = family.multiplier(j)?[flat];
                s += q * q;
            }
            lowpass[flat] = s;
        }
    }
    let freqs = grid.axis_frequencies();
    let scale = grid.extent().powi(-(grid.dim() as i32));
    let mut idx = [0usize; crate::grid::MAX_DIM];
    let mut coefficients = Vec::new();
    for kappa in multi_indices(grid.dim(), deg) {
        let mut acc = Complex64::new(0.0, 0.0);
        for flat in 0..grid.len() {
            let w = lowpass[flat];
            if w == 0.0 {
                continue;
            }
            grid.decompose(flat, &mut idx);
            let mut mono = Complex64::new(1.0, 0.0);
            for (axis, &k) in kappa.iter().enumerate() {
                mono *= Complex64::new(0.0, freqs[idx[axis]]).powu(k as u32);
            }
            acc += spec.values()[flat] * mono * w;
        }
        let mut factorial = 1.0;
        for &k in &kappa {
            for i in 2..=k {
                factorial *= i as f64;
            }
        }
        coefficients.push((kappa, acc * scale / factorial));
    }
    let max_coeff = coefficients
        .iter()
        .map(|(_, c)| c.norm())
        .fold(0.0f64, f64::max);
    let degree = if max_coeff == 0.0 { -1 } else { deg as i32 };
    Ok(Polynomial {
        degree,
        coefficients,
    })
}

/// Dual pair `(η, φ)` for a Tauberian kernel `ψ`: multiplier tables
/// realizing `g = φ_k * g + Σ_{j>k} η_j * ψ_j * g` on the covered modes.
#[derive(Debug, Clone)]
pub struct CalderonPair {
    grid: GridSpec,
    jmin: i32,
    jmax: i32,
    pub kernel_name: String,
    /// Support annulus of `η̂`.
    pub annulus: (f64, f64),
    /// Dyadic anchor of the covered annulus (1 for annular kernels, the
    /// certified octave start otherwise).
    shift: f64,
    /// Certified Tauberian octave start and floor.
    pub a_star: f64,
    pub c0: f64,
    /// Smallest normalization denominator met on covered lattice modes.
    pub denominator_min: f64,
    /// `η̂(2^{-j}ξ)` for `j` in the window.
    eta_tables: Vec<Vec<Complex64>>,
    /// `ψ̂(2^{-j}ξ)` for `j` in the window.
    psi_tables: Vec<Vec<Complex64>>,
    /// `φ̂_k(ξ)` for `k` in the window.
    phi_tables: Vec<Vec<Complex64>>,
}

/// Build the generalized Calderón pair.
///
/// For a kernel already supported in an annulus (the family itself) the
/// normalization is `η̂ = conj(ψ̂)/Σ_j |ψ̂(2^{-j}ξ)|²`, which reproduces the
/// family exactly. Otherwise the certified Tauberian octave `[a*, 2a*]`
/// positions a log-dyadic bump `γ(ξ) = h(|ξ|/a*)` and
/// `η̂ = γ·conj(ψ̂)/Σ_j γ(2^{-j}ξ)|ψ̂(2^{-j}ξ)|²`; since `Σ_j γ_j ≡ 1` the
/// denominator is a convex combination of `|ψ̂|²` over scales inside the
/// doubled certified octave.
pub fn build_calderon_pair(
    kernel: &KernelSpec,
    family: &LPFamily,
    cfg: &CheckConfig,
) -> Result<CalderonPair> {
    let grid = *family.grid();
    if kernel.dim != grid.dim() {
        return Err(Error::Usage(format!(
            "kernel dimension {} does not match grid dimension {}",
            kernel.dim,
            grid.dim()
        )));
    }
    let analysis = tauberian_analysis(kernel, cfg);
    if !analysis.passed {
        let worst = analysis
            .per_direction
            .iter()
            .min_by(|a, b| a.2.total_cmp(&b.2))
            .expect("direction mesh is nonempty");
        return Err(Error::Precondition(format!(
            "kernel {} fails the Tauberian condition along direction {:?} (floor {:.3e})",
            kernel.name, worst.0, worst.2
        )));
    }
    let (a_star, c0) = analysis.global.ok_or_else(|| {
        Error::Precondition(format!(
            "kernel {} has no direction-uniform Tauberian octave",
            kernel.name
        ))
    })?;
    if c0 < 1e-6 {
        return Err(Error::Precondition(format!(
            "Tauberian floor {c0:.3e} below the 1e-6 construction threshold"
        )));
    }

    let annular = kernel.annular_support;
    let shift = if annular.is_some() { 1.0 } else { a_star };
    let annulus = match annular {
        Some((lo, hi)) => (lo, hi),
        None => (a_star / 2.0, 2.0 * a_star),
    };

    // denominator D(ξ) = Σ_j γ(2^{-j}ξ)|ψ̂(2^{-j}ξ)|², scale-invariant by
    // construction because the j-sum runs over all contributing integers
    let denom = |point: &[f64], norm: f64| -> f64 {
        if norm == 0.0 {
            return 0.0;
        }
        let mut d = 0.0;
        match annular {
            Some((lo, hi)) => {
                let j_lo = (norm / hi).log2().ceil() as i32;
                let j_hi = (norm / lo).log2().floor() as i32;
                for j in j_lo..=j_hi {
                    let s = (-j as f64).exp2();
                    let scaled: Vec<f64> = point.iter().map(|v| v * s).collect();
                    d += kernel.eval(&scaled).norm_sqr();
                }
            }
            None => {
                let base = (norm / a_star).log2().floor() as i32;
                for j in (base - 1)..=(base + 1) {
                    let s = (-j as f64).exp2();
                    let g = profile_bump(norm * s / a_star);
                    if g > 0.0 {
                        let scaled: Vec<f64> = point.iter().map(|v| v * s).collect();
                        d += g * kernel.eval(&scaled).norm_sqr();
                    }
                }
            }
        }
        d
    };
    let eta_hat = |point: &[f64], norm: f64| -> Complex64 {
        if norm == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let g = match annular {
            Some((lo, hi)) => {
                if norm > lo && norm < hi {
                    1.0
                } else {
                    0.0
                }
            }
            None => profile_bump(norm / a_star),
        };
        if g == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let d = denom(point, norm);
        if d == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        kernel.eval(point).conj() * (g / d)
    };

    let freqs = grid.axis_frequencies();
    let norms = grid.frequency_norm_table();
    let mut idx = [0usize; crate::grid::MAX_DIM];
    let scales: Vec<i32> = (family.jmin()..=family.jmax()).collect();

    let mut eta_tables = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; scales.len()];
    let mut psi_tables = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; scales.len()];
    let mut phi_tables = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; scales.len()];
    let mut denominator_min = f64::INFINITY;
    let pair_lo = ((family.jmin() + 1) as f64).exp2() * shift;
    let pair_hi = ((family.jmax() - 1) as f64).exp2() * shift;

    for flat in 0..grid.len() {
        grid.decompose(flat, &mut idx);
        let mut point_buf = [0.0f64; crate::grid::MAX_DIM];
        for axis in 0..grid.dim() {
            point_buf[axis] = freqs[idx[axis]];
        }
        let point = &point_buf[..grid.dim()];
        let norm = norms[flat];
        if norm >= pair_lo && norm <= pair_hi {
            denominator_min = denominator_min.min(denom(point, norm));
        }
        for (si, &j) in scales.iter().enumerate() {
            let s = (-j as f64).exp2();
            let scaled: Vec<f64> = point.iter().map(|v| v * s).collect();
            psi_tables[si][flat] = kernel.eval(&scaled);
            eta_tables[si][flat] = eta_hat(&scaled, norm * s);
        }
        // φ̂_k(ξ) = Σ_{j ≤ k} η̂(2^{-j}ξ)ψ̂(2^{-j}ξ), summed pointwise over
        // every contributing integer scale, with φ̂_k(0) = 1
        for (si, &k) in scales.iter().enumerate() {
            if norm == 0.0 {
                phi_tables[si][flat] = Complex64::new(1.0, 0.0);
                continue;
            }
            // η̂(2^{-j}ξ) vanishes unless 2^{-j}|ξ| lies in the support
            // annulus, so only finitely many j contribute
            let j_lo = (norm / annulus.1).log2().floor() as i32 - 1;
            let j_hi = k.min((norm / annulus.0).log2().ceil() as i32 + 1);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in j_lo..=j_hi {
                let s = (-j as f64).exp2();
                let scaled: Vec<f64> = point.iter().map(|v| v * s).collect();
                acc += eta_hat(&scaled, norm * s) * kernel.eval(&scaled);
            }
            phi_tables[si][flat] = acc;
        }
    }
    if !denominator_min.is_finite() || denominator_min < 1e-12 {
        return Err(Error::Precondition(format!(
            "pair denominator minimum {denominator_min:.3e} would amplify round-off beyond 1e12"
        )));
    }
    Ok(CalderonPair {
        grid,
        jmin: family.jmin(),
        jmax: family.jmax(),
        kernel_name: kernel.name.clone(),
        annulus,
        shift,
        a_star,
        c0,
        denominator_min,
        eta_tables,
        psi_tables,
        phi_tables,
    })
}

impl CalderonPair {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn window(&self) -> (i32, i32) {
        (self.jmin, self.jmax)
    }

    fn scale_index(&self, j: i32) -> Result<usize> {
        if j < self.jmin || j > self.jmax {
            return Err(Error::Config(format!(
                "scale {j} outside pair window [{}, {}]",
                self.jmin, self.jmax
            )));
        }
        Ok((j - self.jmin) as usize)
    }

    pub fn eta_table(&self, j: i32) -> Result<&[Complex64]> {
        let si = self.scale_index(j)?;
        Ok(&self.eta_tables[si])
    }

    pub fn psi_table(&self, j: i32) -> Result<&[Complex64]> {
        let si = self.scale_index(j)?;
        Ok(&self.psi_tables[si])
    }

    pub fn phi_table(&self, k: i32) -> Result<&[Complex64]> {
        let si = self.scale_index(k)?;
        Ok(&self.phi_tables[si])
    }

    /// Frequency annulus on which the windowed multiplier identity
    /// `Σ_j η̂(2^{-j}ξ)ψ̂(2^{-j}ξ) = 1` holds.
    pub fn covered_annulus(&self) -> (f64, f64) {
        (
            ((self.jmin + 1) as f64).exp2() * self.shift,
            ((self.jmax - 1) as f64).exp2() * self.shift,
        )
    }

    /// Max deviation of the windowed multiplier identity from 1 over
    /// covered lattice modes.
    pub fn identity_residual(&self) -> f64 {
        let norms = self.grid.frequency_norm_table();
        let (lo, hi) = self.covered_annulus();
        let mut worst = 0.0f64;
        for (flat, &norm) in norms.iter().enumerate() {
            if norm >= lo && norm <= hi {
                let mut acc = Complex64::new(0.0, 0.0);
                for (eta, psi) in self.eta_tables.iter().zip(&self.psi_tables) {
                    acc += eta[flat] * psi[flat];
                }
                worst = worst.max((acc - Complex64::new(1.0, 0.0)).norm());
            }
        }
        worst
    }

    const CACHE_MANIFEST: &'static str = "pair-manifest.txt";

    fn cache_slug(kernel_name: &str, grid: &GridSpec, jmin: i32, jmax: i32) -> String {
        let name: String = kernel_name
            .chars()
            .map(|c| if c.is_alphanumeric() { c } else { '_' })
            .collect();
        format!(
            "pair-{name}-d{}L{}N{}j{}_{}",
            grid.dim(),
            grid.extent(),
            grid.samples(),
            jmin,
            jmax
        )
    }

    /// Persist the multiplier tables under `dir` keyed by
    /// (kernel, grid, window); one field file per table.
    pub fn save_cache(&self, dir: &Path) -> Result<PathBuf> {
        let slug = Self::cache_slug(&self.kernel_name, &self.grid, self.jmin, self.jmax);
        let root = dir.join(&slug);
        std::fs::create_dir_all(&root)?;
        let manifest = format!(
            "kernel={}\nannulus={},{}\nshift={}\na_star={}\nc0={}\ndenominator_min={}\n",
            self.kernel_name,
            self.annulus.0,
            self.annulus.1,
            self.shift,
            self.a_star,
            self.c0,
            self.denominator_min
        );
        for (label, tables) in [
            ("eta", &self.eta_tables),
            ("psi", &self.psi_tables),
            ("phi", &self.phi_tables),
        ] {
            for (si, table) in tables.iter().enumerate() {
                let j = self.jmin + si as i32;
                let field =
                    SampledField::new(self.grid, Representation::Spectral, table.clone())?;
                field.write_csv_file(root.join(format!("{label}_{j}.csv")))?;
            }
        }
        std::fs::write(root.join(Self::CACHE_MANIFEST), manifest)?;
        Ok(root)
    }

    pub fn load_cache(
        dir: &Path,
        kernel_name: &str,
        grid: &GridSpec,
        jmin: i32,
        jmax: i32,
    ) -> Result<Option<CalderonPair>> {
        let root = dir.join(Self::cache_slug(kernel_name, grid, jmin, jmax));
        if !root.join(Self::CACHE_MANIFEST).exists() {
            return Ok(None);
        }
        let manifest = std::fs::read_to_string(root.join(Self::CACHE_MANIFEST))?;
        let mut fields = std::collections::BTreeMap::new();
        for line in manifest.lines() {
            if let Some((k, v)) = line.split_once('=') {
                fields.insert(k.to_string(), v.to_string());
            }
        }
        let parse = |key: &str| -> Result<f64> {
            fields
                .get(key)
                .ok_or_else(|| Error::Parse(format!("cache manifest missing {key}")))?
                .parse()
                .map_err(|e| Error::Parse(format!("cache manifest {key}: {e}")))
        };
        let annulus_raw = fields
            .get("annulus")
            .ok_or_else(|| Error::Parse("cache manifest missing annulus".into()))?;
        let (alo, ahi) = annulus_raw
            .split_once(',')
            .ok_or_else(|| Error::Parse("bad annulus in cache manifest".into()))?;
        let load_tables = |label: &str| -> Result<Vec<Vec<Complex64>>> {
            let mut tables = Vec::new();
            for j in jmin..=jmax {
                let field = SampledField::read_csv_file(root.join(format!("{label}_{j}.csv")))?;
                if field.grid() != grid {
                    return Err(Error::Parse("cached table grid mismatch".into()));
                }
                tables.push(field.into_values());
            }
            Ok(tables)
        };
        Ok(Some(CalderonPair {
            grid: *grid,
            jmin,
            jmax,
            kernel_name: kernel_name.to_string(),
            annulus: (
                alo.parse()
                    .map_err(|e| Error::Parse(format!("annulus: {e}")))?,
                ahi.parse()
                    .map_err(|e| Error::Parse(format!("annulus: {e}")))?,
            ),
            shift: parse("shift")?,
            a_star: parse("a_star")?,
            c0: parse("c0")?,
            denominator_min: parse("denominator_min")?,
            eta_tables: load_tables("eta")?,
            psi_tables: load_tables("psi")?,
            phi_tables: load_tables("phi")?,
        }))
    }
}

/// Reconstruction `φ_k * g + Σ_{j=k+1}^{M} η_j * ψ_j * g`, together with
/// the relative `L²` error against `g`.
pub fn reconstruct(
    g: &SampledField,
    pair: &CalderonPair,
    k: i32,
    m: i32,
) -> Result<(SampledField, f64)> {
    if k >= m {
        return Err(Error::Config(format!(
            "reconstruction needs k < M, got k={k}, M={m}"
        )));
    }
    let (jmin, jmax) = pair.window();
    if k < jmin || m > jmax {
        return Err(Error::Config(format!(
            "reconstruction range [{k}, {m}] outside pair window [{jmin}, {jmax}]"
        )));
    }
    if pair.grid() != g.grid() {
        return Err(Error::Usage("pair grid does not match field grid".into()));
    }
    let mut table = pair.phi_table(k)?.to_vec();
    for j in (k + 1)..=m {
        let eta = pair.eta_table(j)?;
        let psi = pair.psi_table(j)?;
        for (slot, (e, p)) in table.iter_mut().zip(eta.iter().zip(psi.iter())) {
            *slot += e * p;
        }
    }
    let out = g.apply_multiplier(&table)?;
    let g_spatial = g.as_spatial()?;
    let mut err_sq = 0.0f64;
    let mut ref_sq = 0.0f64;
    for (a, b) in out.values().iter().zip(g_spatial.values()) {
        err_sq += (a - b).norm_sqr();
        ref_sq += b.norm_sqr();
    }
    let rel = if ref_sq == 0.0 {
        err_sq.sqrt()
    } else {
        (err_sq / ref_sq).sqrt()
    };
    Ok((out, rel))
}

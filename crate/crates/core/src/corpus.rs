//! Deterministic generator of test-function families used by the
//! verification harness. A fixed, portable generator (ChaCha8 with
//! explicit seeding) makes every corpus bit-reproducible given the same
//! specification and grid.
//!
//! All families except `spike` are mean-zero by construction (`f̂(0) = 0`
//! exactly) and are returned in spectral representation so that the zero
//! coefficient survives bitwise; transforming to spatial samples is the
//! caller's choice. The spike keeps its unit mass: a single-cell field whose
//! `L¹` norm is exactly one is more useful than a mean-zero one, and the
//! norm engines discard its zero frequency anyway.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, Representation, SampledField, MAX_DIM};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// Spatial Gaussian bumps with seeded centres and widths.
    Gaussian {
        count: usize,
        width_lo: f64,
        width_hi: f64,
    },
    /// Gaussians modulated to seeded carrier frequencies.
    ModulatedGaussian {
        count: usize,
        width_lo: f64,
        width_hi: f64,
        freq_lo: f64,
        freq_hi: f64,
    },
    /// Exact dyadic spectral dilations of one band-limited base field.
    DilateLadder {
        k_lo: i32,
        k_hi: i32,
        base_center: f64,
        base_halfwidth: f64,
    },
    /// Random Hermitian spectra supported on an annulus (real fields).
    RandomBandlimited { count: usize, lo: f64, hi: f64 },
    /// Random fields whose spectra sit inside one dyadic band.
    SingleBlock { count: usize, j: i32 },
    /// Unit-mass single-cell field.
    Spike,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusSpec {
    #[serde(flatten)]
    pub family: Family,
    pub seed: u64,
}

impl CorpusSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        CorpusSpec { family, seed }
    }
}

fn zero_dc(field: &mut SampledField) {
    field.values_mut()[0] = Complex64::new(0.0, 0.0);
}

/// Random Hermitian-symmetric spectrum on `lo ≤ |ξ| ≤ hi` (real spatial
/// field); coefficients are drawn in ascending flat-index order.
fn hermitian_annulus(grid: &GridSpec, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> SampledField {
    let norms = grid.frequency_norm_table();
    let n = grid.samples();
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut idx = [0usize; MAX_DIM];
    for flat in 0..grid.len() {
        if norms[flat] < lo || norms[flat] > hi {
            continue;
        }
        grid.decompose(flat, &mut idx);
        let mut mirror_idx = [0usize; MAX_DIM];
        for axis in 0..grid.dim() {
            mirror_idx[axis] = (n - idx[axis]) % n;
        }
        let mirror = grid.flatten(&mirror_idx[..grid.dim()]);
        match flat.cmp(&mirror) {
            std::cmp::Ordering::Less => {
                let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                values[flat] = c;
                values[mirror] = c.conj();
            }
            std::cmp::Ordering::Equal => {
                values[flat] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
            }
            std::cmp::Ordering::Greater => {}
        }
    }
    SampledField::new(*grid, Representation::Spectral, values).expect("length preserved")
}

/// Generate the corpus; deterministic given `(spec, grid)`.
pub fn generate(spec: &CorpusSpec, grid: &GridSpec) -> Result<Vec<SampledField>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let nyquist = grid.nyquist();
    match &spec.family {
        Family::Gaussian {
            count,
            width_lo,
            width_hi,
        } => {
            if !(0.0 < *width_lo && width_lo <= width_hi) {
                return Err(Error::Config(
                    "gaussian widths must satisfy 0 < lo <= hi".into(),
                ));
            }
            let mut out = Vec::with_capacity(*count);
            for _ in 0..*count {
                let width = rng.gen_range(*width_lo..=*width_hi);
                let mut center = [0.0f64; MAX_DIM];
                for c in center.iter_mut().take(grid.dim()) {
                    *c = rng.gen_range(-grid.extent() / 2.0..grid.extent() / 2.0);
                }
                let mut f = SampledField::from_spatial_fn(*grid, |x| {
                    let mut d2 = 0.0;
                    for (axis, &xi) in x.iter().enumerate() {
                        let mut d = (xi - center[axis]).abs();
                        d = d.min(grid.extent() - d);
                        d2 += d * d;
                    }
                    Complex64::new((-d2 / (2.0 * width * width)).exp(), 0.0)
                })
                .forward_transform()?;
                zero_dc(&mut f);
                out.push(f);
            }
            Ok(out)
        }
        Family::ModulatedGaussian {
            count,
            width_lo,
            width_hi,
            freq_lo,
            freq_hi,
        } => {
            if !(0.0 < *freq_lo && freq_lo <= freq_hi) {
                return Err(Error::Config(
                    "modulation band must satisfy 0 < lo <= hi".into(),
                ));
            }
            if *freq_hi >= nyquist {
                return Err(Error::Config(format!(
                    "modulation frequency {freq_hi} exceeds the Nyquist bound {nyquist}"
                )));
            }
            let mut out = Vec::with_capacity(*count);
            for _ in 0..*count {
                let width = rng.gen_range(*width_lo..=*width_hi);
                let omega = rng.gen_range(*freq_lo..=*freq_hi);
                let mut center = [0.0f64; MAX_DIM];
                for c in center.iter_mut().take(grid.dim()) {
                    *c = rng.gen_range(-grid.extent() / 2.0..grid.extent() / 2.0);
                }
                let mut f = SampledField::from_spatial_fn(*grid, |x| {
                    let mut d2 = 0.0;
                    let mut phase = 0.0;
                    for (axis, &xi) in x.iter().enumerate() {
                        let mut d = (xi - center[axis]).abs();
                        d = d.min(grid.extent() - d);
                        d2 += d * d;
                        phase += omega * (xi - center[axis]);
                    }
                    Complex64::new(phase.cos() * (-d2 / (2.0 * width * width)).exp(), 0.0)
                })
                .forward_transform()?;
                zero_dc(&mut f);
                out.push(f);
            }
            Ok(out)
        }
        Family::DilateLadder {
            k_lo,
            k_hi,
            base_center,
            base_halfwidth,
        } => {
            if k_lo > k_hi {
                return Err(Error::Config("ladder range must satisfy k_lo <= k_hi".into()));
            }
            // the base spectrum lives on the sublattice divisible by
            // 2^{max(0,-k_lo)} so every ladder shift stays on the lattice
            let divisor = 1i64 << (-k_lo).max(0) as u32;
            let top_factor = (*k_hi as f64).exp2();
            if (base_center + base_halfwidth) * top_factor >= nyquist {
                return Err(Error::Config(format!(
                    "ladder top {} exceeds the Nyquist bound {nyquist}",
                    (base_center + base_halfwidth) * top_factor
                )));
            }
            let norms = grid.frequency_norm_table();
            let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
            let mut idx = [0usize; MAX_DIM];
            let mut any = false;
            for flat in 0..grid.len() {
                let norm = norms[flat];
                if (norm - base_center).abs() > *base_halfwidth {
                    continue;
                }
                grid.decompose(flat, &mut idx);
                let on_sublattice =
                    (0..grid.dim()).all(|axis| grid.signed_index(idx[axis]) % divisor == 0);
                if on_sublattice {
                    let envelope = (-(norm - base_center).powi(2)
                        / (base_halfwidth * base_halfwidth / 4.0))
                        .exp();
                    values[flat] = Complex64::new(envelope, 0.0)
                        * Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    any = true;
                }
            }
            if !any {
                return Err(Error::Config(
                    "ladder base band contains no usable lattice modes".into(),
                ));
            }
            values[0] = Complex64::new(0.0, 0.0);
            let base = SampledField::new(*grid, Representation::Spectral, values)?;
            let mut out = Vec::new();
            for k in *k_lo..=*k_hi {
                out.push(base.dilate_dyadic(k, 1.0)?);
            }
            Ok(out)
        }
        Family::RandomBandlimited { count, lo, hi } => {
            if !(0.0 < *lo && lo <= hi) {
                return Err(Error::Config("annulus must satisfy 0 < lo <= hi".into()));
            }
            if *hi >= nyquist {
                return Err(Error::Config(format!(
                    "band top {hi} exceeds the Nyquist bound {nyquist}"
                )));
            }
            let mut out = Vec::with_capacity(*count);
            for _ in 0..*count {
                let mut f = hermitian_annulus(grid, *lo, *hi, &mut rng);
                zero_dc(&mut f);
                out.push(f);
            }
            Ok(out)
        }
        Family::SingleBlock { count, j } => {
            let center = (*j as f64).exp2();
            let lo = center / std::f64::consts::SQRT_2;
            let hi = center * std::f64::consts::SQRT_2;
            if hi >= nyquist {
                return Err(Error::Config(format!(
                    "block scale 2^{j} exceeds the Nyquist bound {nyquist}"
                )));
            }
            if lo < grid.fundamental_mode() {
                return Err(Error::Config(format!(
                    "block scale 2^{j} lies below the lowest nonzero mode"
                )));
            }
            let mut out = Vec::with_capacity(*count);
            for _ in 0..*count {
                let mut f = hermitian_annulus(grid, lo, hi, &mut rng);
                zero_dc(&mut f);
                out.push(f);
            }
            Ok(out)
        }
        Family::Spike => {
            let mut f = SampledField::zeros(*grid, Representation::Spatial);
            let cell = rng.gen_range(0..grid.len());
            f.values_mut()[cell] = Complex64::new(1.0 / grid.cell_measure(), 0.0);
            Ok(vec![f])
        }
    }
}

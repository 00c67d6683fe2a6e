//! Maximal functions: the Peetre maximal function of a dyadic block, its
//! scale-penalized variant, the Hardy-Littlewood maximal function over
//! dyadic periodic balls, and the smooth maximal function
//! `sup_t |φ_t * g|`.
//!
//! Convolutions inside this module are evaluated by direct spatial
//! summation (not FFT), so every operation commutes bitwise with lattice
//! translations of its input; the suprema themselves are exact discrete
//! sups, computed with an early-exit bound rather than truncation.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledField, MAX_DIM};
use crate::kernels::KernelSpec;
use crate::lp::BlockKernel;

/// Parameter bundle for the maximal operators.
#[derive(Debug, Clone)]
pub struct MaximalParams {
    pub lambda: f64,
    pub m: f64,
    pub tgrid: Vec<f64>,
}

impl MaximalParams {
    pub fn new(lambda: f64, m: f64, tgrid: Vec<f64>) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
        }
        validate_tgrid(&tgrid)?;
        Ok(MaximalParams { lambda, m, tgrid })
    }
}

fn validate_tgrid(tgrid: &[f64]) -> Result<()> {
    if tgrid.is_empty() {
        return Err(Error::Domain("dilation grid must be nonempty".into()));
    }
    let max_ratio = (1.0f64 / 8.0).exp2() * (1.0 + 1e-12);
    for w in tgrid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Domain("dilation grid must be strictly increasing".into()));
        }
        if w[1] / w[0] > max_ratio {
            return Err(Error::Domain(format!(
                "dilation grid ratio {} exceeds 2^(1/8)",
                w[1] / w[0]
            )));
        }
    }
    Ok(())
}

/// Geometric dilation grid spanning `[2^{-jmax}, 2^{-jmin}]`.
pub fn default_tgrid(jmin: i32, jmax: i32, points_per_octave: usize) -> Vec<f64> {
    let lo = (-jmax as f64).exp2();
    let octaves = (jmax - jmin) as usize;
    let count = octaves * points_per_octave + 1;
    (0..count)
        .map(|i| lo * (octaves as f64 * i as f64 / (count - 1) as f64).exp2())
        .collect()
}

/// Offsets of the lattice sorted by periodic distance from the origin
/// (ties broken by flat index), with per-axis decompositions.
struct OffsetTable {
    dist: Vec<f64>,
    axes: Vec<[usize; MAX_DIM]>,
}

fn sorted_offsets(grid: &GridSpec) -> OffsetTable {
    let raw = grid.distance_table();
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]).then(a.cmp(&b)));
    let mut dist = Vec::with_capacity(order.len());
    let mut axes = Vec::with_capacity(order.len());
    let mut idx = [0usize; MAX_DIM];
    for &flat in &order {
        grid.decompose(flat, &mut idx);
        dist.push(raw[flat]);
        axes.push(idx);
    }
    OffsetTable { dist, axes }
}

#[inline]
fn shifted_flat(grid: &GridSpec, x_axes: &[usize; MAX_DIM], off: &[usize; MAX_DIM]) -> usize {
    let n = grid.samples();
    let mask = n - 1;
    let mut flat = 0usize;
    for axis in 0..grid.dim() {
        flat = flat * n + ((x_axes[axis].wrapping_sub(off[axis])) & mask);
    }
    flat
}

/// Exact discrete sup `max_y w(y)·|g(x-y)|` for a weight that is
/// non-increasing along the sorted offset order; exits each point's scan
/// as soon as `max|g|·w` cannot beat the current best.
fn weighted_sup_into(
    grid: &GridSpec,
    mags: &[f64],
    offsets: &OffsetTable,
    weights: &[f64],
    global_max: f64,
    out: &mut [f64],
) {
    out.par_iter_mut().enumerate().for_each(|(flat, slot)| {
        let mut x_axes = [0usize; MAX_DIM];
        grid.decompose(flat, &mut x_axes);
        let mut best = *slot;
        for (rank, off) in offsets.axes.iter().enumerate() {
            let w = weights[rank];
            if global_max * w <= best {
                break;
            }
            let cand = mags[shifted_flat(grid, &x_axes, off)] * w;
            if cand > best {
                best = cand;
            }
        }
        *slot = best;
    });
}

fn real_field(grid: GridSpec, values: Vec<f64>) -> SampledField {
    SampledField::new(
        grid,
        crate::grid::Representation::Spatial,
        values
            .into_iter()
            .map(|v| Complex64::new(v, 0.0))
            .collect(),
    )
    .expect("length preserved")
}

/// Peetre maximal function of a block at scale `j`:
/// `ψ*_j f(x) = max_y |block(x-y)| / (1 + 2^j d(y))^λ` with `d` the
/// periodic distance. The discrete sup over all lattice offsets is exact.
pub fn peetre_maximal(block: &SampledField, j: i32, lambda: f64) -> Result<SampledField> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    let spatial = block.as_spatial()?;
    let grid = *spatial.grid();
    let mags: Vec<f64> = spatial.values().iter().map(|v| v.norm()).collect();
    let global_max = mags.iter().copied().fold(0.0, f64::max);
    let offsets = sorted_offsets(&grid);
    let scale = (j as f64).exp2();
    let weights: Vec<f64> = offsets
        .dist
        .iter()
        .map(|&d| (1.0 + scale * d).powf(-lambda))
        .collect();
    let mut out = vec![0.0f64; grid.len()];
    weighted_sup_into(&grid, &mags, &offsets, &weights, global_max, &mut out);
    Ok(real_field(grid, out))
}

/// Spatial kernel table of `ψ̂(2^{-j}ξ)` for direct convolution.
fn spatial_scale_kernel(
    kernel: &BlockKernel,
    grid: &GridSpec,
    j: i32,
) -> Result<Vec<Complex64>> {
    let table = kernel.multiplier(grid, j)?;
    let field = SampledField::new(*grid, crate::grid::Representation::Spectral, table)?
        .inverse_transform()?;
    Ok(field.into_values())
}

/// Direct periodic convolution `Σ_y k(y) f(x-y) Δx^n`, summed in a fixed
/// order so translated inputs give bitwise-translated outputs.
fn direct_convolve(
    grid: &GridSpec,
    kernel_spatial: &[Complex64],
    f: &[Complex64],
) -> Vec<Complex64> {
    let cell = grid.cell_measure();
    let n = grid.samples();
    let mask = n - 1;
    let dim = grid.dim();
    (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let mut x_axes = [0usize; MAX_DIM];
            grid.decompose(flat, &mut x_axes);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut y_axes = [0usize; MAX_DIM];
            for (y, k) in kernel_spatial.iter().enumerate() {
                grid.decompose(y, &mut y_axes);
                let mut target = 0usize;
                for axis in 0..dim {
                    target = target * n + ((x_axes[axis].wrapping_sub(y_axes[axis])) & mask);
                }
                acc += k * f[target];
            }
            acc * cell
        })
        .collect()
}

/// Scale-penalized variant maximal function:
/// `sup_{k ∈ [j, kmax], y} |ψ_k * f(y)| · 2^{(j-k)m} / (1 + 2^j|x-y|)^λ`.
pub fn variant_maximal(
    f: &SampledField,
    kernel: BlockKernel,
    j: i32,
    lambda: f64,
    m: f64,
    kmax: i32,
) -> Result<SampledField> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    if kmax < j {
        return Err(Error::Domain(format!("kmax={kmax} must be at least j={j}")));
    }
    let spatial = f.as_spatial()?;
    let grid = *spatial.grid();
    let offsets = sorted_offsets(&grid);
    let scale = (j as f64).exp2();
    let weights: Vec<f64> = offsets
        .dist
        .iter()
        .map(|&d| (1.0 + scale * d).powf(-lambda))
        .collect();
    let mut out = vec![0.0f64; grid.len()];
    for k in j..=kmax {
        let kern = spatial_scale_kernel(&kernel, &grid, k)?;
        let block = direct_convolve(&grid, &kern, spatial.values());
        let penalty = ((j - k) as f64 * m).exp2();
        let mags: Vec<f64> = block.iter().map(|v| v.norm() * penalty).collect();
        let global_max = mags.iter().copied().fold(0.0, f64::max);
        weighted_sup_into(&grid, &mags, &offsets, &weights, global_max, &mut out);
    }
    Ok(real_field(grid, out))
}

/// Hardy-Littlewood maximal function over the dyadic radius set
/// `{cell, 2·cell, …, L/2}`: the largest average of `|g|` over periodic
/// balls centred at each point.
pub fn hl_maximal(g: &SampledField) -> Result<SampledField> {
    let spatial = g.as_spatial()?;
    let grid = *spatial.grid();
    let mags: Vec<f64> = spatial.values().iter().map(|v| v.norm()).collect();
    let offsets = sorted_offsets(&grid);
    // prefix counts of offsets inside each dyadic ball
    let mut radii = Vec::new();
    let mut r = grid.step();
    while r <= grid.extent() / 2.0 {
        radii.push(r);
        r *= 2.0;
    }
    let boundaries: Vec<usize> = radii
        .iter()
        .map(|&rad| offsets.dist.partition_point(|&d| d <= rad))
        .collect();
    let out: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let mut x_axes = [0usize; MAX_DIM];
            grid.decompose(flat, &mut x_axes);
            let mut best = 0.0f64;
            let mut sum = 0.0f64;
            let mut rank = 0usize;
            for &boundary in &boundaries {
                while rank < boundary {
                    sum += mags[shifted_flat(&grid, &x_axes, &offsets.axes[rank])];
                    rank += 1;
                }
                let avg = sum / boundary as f64;
                if avg > best {
                    best = avg;
                }
            }
            best
        })
        .collect();
    Ok(real_field(grid, out))
}

/// Smooth maximal function `max_{t ∈ tgrid} |φ_t * g|` with the standard
/// dilation realized spectrally as `φ̂(tξ)`.
pub fn smooth_maximal(
    g: &SampledField,
    phi: &KernelSpec,
    tgrid: &[f64],
) -> Result<SampledField> {
    validate_tgrid(tgrid)?;
    let spatial = g.as_spatial()?;
    let grid = *spatial.grid();
    let mut out = vec![0.0f64; grid.len()];
    for &t in tgrid {
        let table = phi.spectral_table(&grid, t)?;
        let kern = SampledField::new(grid, crate::grid::Representation::Spectral, table)?
            .inverse_transform()?;
        let conv = direct_convolve(&grid, kern.values(), spatial.values());
        for (slot, v) in out.iter_mut().zip(&conv) {
            let mag = v.norm();
            if mag > *slot {
                *slot = mag;
            }
        }
    }
    Ok(real_field(grid, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Representation;
    use crate::kernels::{make_fractional_poisson, make_gaussian, KernelParams};
    use crate::lp::{build_lp_family, dyadic_block};
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn grid_small() -> GridSpec {
        GridSpec::new(1, 64.0, 256).unwrap()
    }

    fn random_field(grid: &GridSpec, seed: u64) -> SampledField {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<Complex64> = (0..grid.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        SampledField::new(*grid, Representation::Spatial, values).unwrap()
    }

    #[test]
    fn zero_block_gives_zero() {
        let block = SampledField::zeros(grid_small(), Representation::Spatial);
        let out = peetre_maximal(&block, 0, 2.0).unwrap();
        assert!(out.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn lambda_must_be_positive() {
        let block = SampledField::zeros(grid_small(), Representation::Spatial);
        assert!(matches!(
            peetre_maximal(&block, 0, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn spike_gives_closed_form_envelope() {
        // single spike of height 1 at x0: ψ*_0 f(x) = (1 + d(x, x0))^{-λ}
        let grid = grid_small();
        let mut block = SampledField::zeros(grid, Representation::Spatial);
        let spike_at = 100usize;
        block.values_mut()[spike_at] = Complex64::new(1.0, 0.0);
        let out = peetre_maximal(&block, 0, 2.0).unwrap();
        let coords = grid.axis_coordinates();
        for (m, v) in out.values().iter().enumerate() {
            let mut d = (coords[m] - coords[spike_at]).abs();
            d = d.min(grid.extent() - d);
            let expected = (1.0 + d).powi(-2);
            assert!((v.re - expected).abs() < 1e-13, "m={m}");
        }
    }

    #[test]
    fn domination_and_lambda_monotonicity_exact() {
        let grid = grid_small();
        let f = random_field(&grid, 1);
        let fam = build_lp_family(&grid, -4, 4).unwrap();
        let block = dyadic_block(&f, 1, BlockKernel::Family(&fam)).unwrap();
        let lambdas = [1.0, 2.0, 4.0, 8.0];
        let outputs: Vec<SampledField> = lambdas
            .iter()
            .map(|&l| peetre_maximal(&block, 1, l).unwrap())
            .collect();
        for (flat, b) in block.values().iter().enumerate() {
            for out in &outputs {
                assert!(out.values()[flat].re >= b.norm());
            }
            for w in outputs.windows(2) {
                assert!(w[1].values()[flat].re <= w[0].values()[flat].re);
            }
        }
    }

    #[test]
    fn large_lambda_recovers_block_modulus() {
        let grid = GridSpec::new(1, 64.0, 1024).unwrap();
        let fam = build_lp_family(&grid, -4, 6).unwrap();
        let f = SampledField::from_spatial_fn(grid, |x| {
            Complex64::new((-x[0] * x[0] / 8.0).exp() * (4.0 * x[0]).cos(), 0.0)
        });
        let block = dyadic_block(&f, 4, BlockKernel::Family(&fam)).unwrap();
        let out = peetre_maximal(&block, 4, 64.0).unwrap();
        let peak = block.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (v, b) in out.values().iter().zip(block.values()) {
            assert!((v.re - b.norm()).abs() <= 1e-6 * peak);
        }
    }

    #[test]
    fn peetre_translation_covariance_bitwise() {
        let grid = grid_small();
        let f = random_field(&grid, 2);
        let shifted = f.translate(&[37]).unwrap();
        let a = peetre_maximal(&f, 2, 3.0).unwrap().translate(&[37]).unwrap();
        let b = peetre_maximal(&shifted, 2, 3.0).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn variant_reduces_to_peetre_at_single_scale() {
        let grid = grid_small();
        let fam = build_lp_family(&grid, -4, 4).unwrap();
        let f = random_field(&grid, 3);
        let j = 2;
        let var = variant_maximal(&f, BlockKernel::Family(&fam), j, 2.0, 1.0, j).unwrap();
        let kern = spatial_scale_kernel(&BlockKernel::Family(&fam), &grid, j).unwrap();
        let block = real_block(&grid, &kern, &f);
        let peetre = peetre_maximal(&block, j, 2.0).unwrap();
        assert_eq!(var.values(), peetre.values());
    }

    fn real_block(grid: &GridSpec, kern: &[Complex64], f: &SampledField) -> SampledField {
        let conv = direct_convolve(grid, kern, f.values());
        SampledField::new(*grid, Representation::Spatial, conv).unwrap()
    }

    #[test]
    fn variant_zero_field_and_validation() {
        let grid = grid_small();
        let fam = build_lp_family(&grid, -4, 4).unwrap();
        let zero = SampledField::zeros(grid, Representation::Spatial);
        let out = variant_maximal(&zero, BlockKernel::Family(&fam), 0, 2.0, 1.0, 3).unwrap();
        assert!(out.values().iter().all(|v| v.norm() == 0.0));
        assert!(matches!(
            variant_maximal(&zero, BlockKernel::Family(&fam), 2, 2.0, 1.0, 1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn variant_large_m_suppresses_finer_scales() {
        let grid = grid_small();
        let fam = build_lp_family(&grid, -4, 4).unwrap();
        let f = random_field(&grid, 4);
        let j = 0;
        let single = variant_maximal(&f, BlockKernel::Family(&fam), j, 2.0, 32.0, j).unwrap();
        let many = variant_maximal(&f, BlockKernel::Family(&fam), j, 2.0, 32.0, 4).unwrap();
        let peak = single.values().iter().map(|v| v.re).fold(0.0, f64::max);
        for (a, b) in many.values().iter().zip(single.values()) {
            assert!(a.re >= b.re);
            assert!((a.re - b.re).abs() <= 1e-6 * peak);
        }
    }

    #[test]
    fn variant_monotone_in_m_and_kmax() {
        let grid = grid_small();
        let fam = build_lp_family(&grid, -4, 4).unwrap();
        let f = random_field(&grid, 5);
        let base = variant_maximal(&f, BlockKernel::Family(&fam), 0, 2.0, 1.0, 3).unwrap();
        let higher_m = variant_maximal(&f, BlockKernel::Family(&fam), 0, 2.0, 2.0, 3).unwrap();
        let wider = variant_maximal(&f, BlockKernel::Family(&fam), 0, 2.0, 1.0, 4).unwrap();
        for ((b, hm), w) in base
            .values()
            .iter()
            .zip(higher_m.values())
            .zip(wider.values())
        {
            assert!(hm.re <= b.re + 1e-15);
            assert!(w.re + 1e-15 >= b.re);
        }
    }

    #[test]
    fn hl_constant_and_indicator() {
        let grid = grid_small();
        let c = SampledField::from_spatial_fn(grid, |_| Complex64::new(-2.0, 0.0));
        let out = hl_maximal(&c).unwrap();
        for v in out.values() {
            assert!((v.re - 2.0).abs() < 1e-12);
        }

        // indicator of a ball: at the centre the smallest average is 1
        let rho = 2.0;
        let ind = SampledField::from_spatial_fn(grid, |x| {
            if x[0].abs() <= rho {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let out = hl_maximal(&ind).unwrap();
        assert!((out.values()[0].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hl_spike_envelope() {
        // unit-mass spike: M(g)(x) ≈ 1/(2 d(x,x0)) within a factor ~2 at
        // dyadic radii
        let grid = GridSpec::new(1, 64.0, 1024).unwrap();
        let mut g = SampledField::zeros(grid, Representation::Spatial);
        let height = 1.0 / grid.cell_measure();
        g.values_mut()[0] = Complex64::new(height, 0.0);
        let out = hl_maximal(&g).unwrap();
        let coords = grid.axis_coordinates();
        for (m, v) in out.values().iter().enumerate() {
            let d = coords[m].abs().min(grid.extent() - coords[m].abs());
            if d > 1.0 && d < 16.0 {
                let envelope = 1.0 / (2.0 * d);
                let ratio = v.re / envelope;
                assert!(ratio > 0.45 && ratio < 2.2, "d={d} ratio={ratio}");
            }
        }
    }

    #[test]
    fn hl_translation_covariance_bitwise() {
        let grid = grid_small();
        let f = random_field(&grid, 6);
        let a = hl_maximal(&f).unwrap().translate(&[19]).unwrap();
        let b = hl_maximal(&f.translate(&[19]).unwrap()).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn smooth_maximal_zero_and_singleton() {
        let grid = grid_small();
        let zero = SampledField::zeros(grid, Representation::Spatial);
        let phi = make_gaussian(1);
        let out = smooth_maximal(&zero, &phi, &[1.0]).unwrap();
        assert!(out.values().iter().all(|v| v.norm() == 0.0));

        let f = random_field(&grid, 7);
        let single = smooth_maximal(&f, &phi, &[1.0]).unwrap();
        let table = phi.spectral_table(&grid, 1.0).unwrap();
        let kern = SampledField::new(grid, Representation::Spectral, table)
            .unwrap()
            .inverse_transform()
            .unwrap();
        let conv = direct_convolve(&grid, kern.values(), f.values());
        for (a, b) in single.values().iter().zip(&conv) {
            assert_eq!(a.re, b.norm());
        }
    }

    #[test]
    fn smooth_maximal_gaussian_means_bounded_by_max() {
        // normalized Gaussian means of a nonnegative field stay below its
        // max and approach it at the argmax as t → 0 (the mean deficit is
        // ~t² times the curvature, so the grid must reach small t)
        let grid = grid_small();
        let phi = KernelSpec::new("gauss-normalized", 1, KernelParams::default(), |xi: &[f64]| {
            Complex64::new((-xi[0] * xi[0] / 4.0).exp(), 0.0)
        });
        let g = SampledField::from_spatial_fn(grid, |x| {
            Complex64::new((-(x[0] - 3.0) * (x[0] - 3.0) / 10.0).exp(), 0.0)
        });
        let tgrid = default_tgrid(-4, 12, 8);
        let out = smooth_maximal(&g, &phi, &tgrid).unwrap();
        let gmax = g.values().iter().map(|v| v.re).fold(0.0, f64::max);
        let argmax = (0..grid.len())
            .max_by(|&a, &b| g.values()[a].re.total_cmp(&g.values()[b].re))
            .unwrap();
        for v in out.values() {
            assert!(v.re <= gmax * (1.0 + 1e-9));
        }
        assert!((out.values()[argmax].re - gmax).abs() < 1e-8 * gmax);
    }

    #[test]
    fn smooth_maximal_monotone_under_refinement() {
        let grid = grid_small();
        let phi = make_gaussian(1);
        let f = random_field(&grid, 8);
        let coarse = default_tgrid(-2, 3, 8);
        let fine = default_tgrid(-2, 3, 16);
        let a = smooth_maximal(&f, &phi, &coarse).unwrap();
        let b = smooth_maximal(&f, &phi, &fine).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!(y.re >= x.re - 1e-15);
        }
    }

    #[test]
    fn smooth_translation_covariance_bitwise() {
        let grid = grid_small();
        let phi = make_fractional_poisson(0.0, 1).unwrap();
        let f = random_field(&grid, 9);
        let tg = default_tgrid(-1, 2, 8);
        let a = smooth_maximal(&f, &phi, &tg).unwrap().translate(&[5]).unwrap();
        let b = smooth_maximal(&f.translate(&[5]).unwrap(), &phi, &tg).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn variant_translation_covariance_bitwise() {
        let grid = grid_small();
        let fam = build_lp_family(&grid, -4, 4).unwrap();
        let f = random_field(&grid, 10);
        let a = variant_maximal(&f, BlockKernel::Family(&fam), 1, 2.0, 1.0, 3)
            .unwrap()
            .translate(&[11])
            .unwrap();
        let b = variant_maximal(
            &f.translate(&[11]).unwrap(),
            BlockKernel::Family(&fam),
            1,
            2.0,
            1.0,
            3,
        )
        .unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn tgrid_validation() {
        assert!(MaximalParams::new(1.0, 0.0, vec![1.0, 2.0]).is_err()); // ratio 2 > 2^{1/8}
        assert!(MaximalParams::new(1.0, 0.0, vec![1.0, 1.05, 1.1]).is_ok());
        assert!(MaximalParams::new(0.0, 0.0, vec![1.0]).is_err());
        assert!(MaximalParams::new(1.0, 0.0, vec![]).is_err());
    }

    #[test]
    fn default_tgrid_shape() {
        let tg = default_tgrid(-4, 6, 8);
        assert_eq!(tg.len(), 81);
        assert!((tg[0] - (-6.0f64).exp2()).abs() < 1e-15);
        assert!((tg.last().unwrap() - (4.0f64).exp2()).abs() < 1e-12);
        let _ = PI;
    }
}

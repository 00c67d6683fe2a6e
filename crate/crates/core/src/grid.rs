//! Periodic n-dimensional sampled-function model with exact spectral
//! transforms.
//!
//! Functions live on the torus `[-L/2, L/2)^n` sampled on a uniform grid of
//! `N` points per axis (`N` a power of two). Index conventions follow the
//! unshifted FFT layout: along each axis, sample `m` sits at coordinate
//! `m*Δx` for `m < N/2` and `(m-N)*Δx` otherwise, and spectral bin `i`
//! carries frequency `2π k/L` with `k = i` for `i < N/2` and `k = i-N`
//! otherwise. With that layout the forward DFT times the cell measure
//! approximates the continuum Fourier transform `∫ f(x) e^{-ix·ξ} dx`
//! without any phase correction.

use std::borrow::Cow;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Spatial,
    Spectral,
}

impl std::fmt::Display for Representation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Representation::Spatial => write!(f, "spatial"),
            Representation::Spectral => write!(f, "spectral"),
        }
    }
}

/// Geometry of the periodic grid: dimension, spatial extent per axis and
/// sample count per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    extent: f64,
    samples: usize,
}

impl GridSpec {
    pub fn new(dim: usize, extent: f64, samples: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Domain(format!(
                "grid dimension must be in 1..={MAX_DIM}, got {dim}"
            )));
        }
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::Domain(format!(
                "grid extent must be positive and finite, got {extent}"
            )));
        }
        if samples < 4 || !samples.is_power_of_two() {
            return Err(Error::Domain(format!(
                "samples per axis must be a power of two >= 4, got {samples}"
            )));
        }
        Ok(GridSpec {
            dim,
            extent,
            samples,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Total number of grid points, `N^n`.
    pub fn len(&self) -> usize {
        self.samples.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spatial step per axis, `L/N`.
    pub fn step(&self) -> f64 {
        self.extent / self.samples as f64
    }

    /// Spatial cell measure `(L/N)^n`.
    pub fn cell_measure(&self) -> f64 {
        self.step().powi(self.dim as i32)
    }

    /// Spectral step per axis, `2π/L`.
    pub fn spectral_step(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.extent
    }

    /// Spectral cell measure `(2π/L)^n`.
    pub fn spectral_cell_measure(&self) -> f64 {
        self.spectral_step().powi(self.dim as i32)
    }

    /// Nyquist bound `πN/L`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI * self.samples as f64 / self.extent
    }

    /// Lowest nonzero frequency magnitude, `2π/L`.
    pub fn fundamental_mode(&self) -> f64 {
        self.spectral_step()
    }

    /// Per-axis coordinates in FFT order.
    pub fn axis_coordinates(&self) -> Vec<f64> {
        let n = self.samples;
        let dx = self.step();
        (0..n)
            .map(|m| {
                if m < n / 2 {
                    m as f64 * dx
                } else {
                    (m as f64 - n as f64) * dx
                }
            })
            .collect()
    }

    /// Per-axis frequencies `2πk/L` in FFT order.
    pub fn axis_frequencies(&self) -> Vec<f64> {
        let n = self.samples;
        let dxi = self.spectral_step();
        (0..n)
            .map(|i| {
                if i < n / 2 {
                    i as f64 * dxi
                } else {
                    (i as f64 - n as f64) * dxi
                }
            })
            .collect()
    }

    /// Decompose a flat index into per-axis indices (row-major, axis 0
    /// slowest).
    pub fn decompose(&self, flat: usize, out: &mut [usize; MAX_DIM]) {
        let mut rem = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = rem % self.samples;
            rem /= self.samples;
        }
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        let mut flat = 0usize;
        for axis in 0..self.dim {
            flat = flat * self.samples + idx[axis];
        }
        flat
    }

    /// Signed lattice index along one axis for FFT position `i`:
    /// `i` for `i < N/2`, `i - N` otherwise.
    pub fn signed_index(&self, i: usize) -> i64 {
        if i < self.samples / 2 {
            i as i64
        } else {
            i as i64 - self.samples as i64
        }
    }

    /// FFT position for a signed lattice index, or `None` when out of band.
    pub fn unsigned_index(&self, k: i64) -> Option<usize> {
        let half = self.samples as i64 / 2;
        if k >= -half && k < half {
            Some(k.rem_euclid(self.samples as i64) as usize)
        } else {
            None
        }
    }

    /// Euclidean frequency magnitude for every flat spectral index.
    pub fn frequency_norm_table(&self) -> Vec<f64> {
        self.norm_table(&self.axis_frequencies())
    }

    /// Periodic Euclidean distance from the origin for every flat spatial
    /// index.
    pub fn distance_table(&self) -> Vec<f64> {
        self.norm_table(&self.axis_coordinates())
    }

    fn norm_table(&self, axis: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        let mut idx = [0usize; MAX_DIM];
        for flat in 0..self.len() {
            self.decompose(flat, &mut idx);
            let mut s = 0.0;
            for a in 0..self.dim {
                let v = axis[idx[a]];
                s += v * v;
            }
            out.push(s.sqrt());
        }
        out
    }
}

/// A sampled complex field together with its grid and a flag telling
/// whether `values` holds spatial samples or spectral coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: GridSpec,
    representation: Representation,
    values: Vec<Complex64>,
}

impl SampledField {
    pub fn new(
        grid: GridSpec,
        representation: Representation,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Usage(format!(
                "field length {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(SampledField {
            grid,
            representation,
            values,
        })
    }

    pub fn zeros(grid: GridSpec, representation: Representation) -> Self {
        SampledField {
            grid,
            representation,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Sample a spatial function on the grid.
    pub fn from_spatial_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64,
    {
        Self::from_table_fn(grid, Representation::Spatial, &grid.axis_coordinates(), f)
    }

    /// Sample a spectral function (a Fourier symbol) on the frequency
    /// lattice.
    pub fn from_spectral_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64,
    {
        Self::from_table_fn(grid, Representation::Spectral, &grid.axis_frequencies(), f)
    }

    fn from_table_fn<F>(
        grid: GridSpec,
        representation: Representation,
        table: &[f64],
        f: F,
    ) -> Self
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let mut values = Vec::with_capacity(grid.len());
        let mut idx = [0usize; MAX_DIM];
        let mut point = [0.0f64; MAX_DIM];
        for flat in 0..grid.len() {
            grid.decompose(flat, &mut idx);
            for axis in 0..grid.dim() {
                point[axis] = table[idx[axis]];
            }
            values.push(f(&point[..grid.dim()]));
        }
        SampledField {
            grid,
            representation,
            values,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Continuum-normalized forward transform: DFT scaled by the cell
    /// measure, so spectral values approximate `∫ f(x) e^{-ix·ξ} dx`.
    pub fn forward_transform(&self) -> Result<SampledField> {
        if self.representation != Representation::Spatial {
            return Err(Error::Usage(
                "forward_transform requires a spatial field".into(),
            ));
        }
        let mut values = self.values.clone();
        fft_nd(&mut values, &self.grid, FftDirection::Forward);
        let scale = self.grid.cell_measure();
        for v in &mut values {
            *v *= scale;
        }
        Ok(SampledField {
            grid: self.grid,
            representation: Representation::Spectral,
            values,
        })
    }

    /// Exact inverse of [`forward_transform`]: unnormalized inverse DFT
    /// scaled by `L^{-n}`.
    pub fn inverse_transform(&self) -> Result<SampledField> {
        if self.representation != Representation::Spectral {
            return Err(Error::Usage(
                "inverse_transform requires a spectral field".into(),
            ));
        }
        let mut values = self.values.clone();
        fft_nd(&mut values, &self.grid, FftDirection::Inverse);
        let scale = self.grid.extent().powi(-(self.grid.dim() as i32));
        for v in &mut values {
            *v *= scale;
        }
        Ok(SampledField {
            grid: self.grid,
            representation: Representation::Spatial,
            values,
        })
    }

    /// Borrow the field in spectral representation, transforming only when
    /// needed.
    pub fn as_spectral(&self) -> Result<Cow<'_, SampledField>> {
        match self.representation {
            Representation::Spectral => Ok(Cow::Borrowed(self)),
            Representation::Spatial => Ok(Cow::Owned(self.forward_transform()?)),
        }
    }

    /// Borrow the field in spatial representation.
    pub fn as_spatial(&self) -> Result<Cow<'_, SampledField>> {
        match self.representation {
            Representation::Spatial => Ok(Cow::Borrowed(self)),
            Representation::Spectral => Ok(Cow::Owned(self.inverse_transform()?)),
        }
    }

    /// Exact periodic convolution: pointwise product of the two spectra,
    /// returned as a spatial field.
    pub fn convolve(&self, other: &SampledField) -> Result<SampledField> {
        if self.grid != other.grid {
            return Err(Error::Usage("convolve requires matching grids".into()));
        }
        let a = self.as_spectral()?;
        let b = other.as_spectral()?;
        let values: Vec<Complex64> = a
            .values
            .iter()
            .zip(b.values.iter())
            .map(|(x, y)| x * y)
            .collect();
        SampledField {
            grid: self.grid,
            representation: Representation::Spectral,
            values,
        }
        .inverse_transform()
    }

    /// Apply a spectral multiplier table, returning a spatial field.
    pub fn apply_multiplier(&self, table: &[Complex64]) -> Result<SampledField> {
        if table.len() != self.grid.len() {
            return Err(Error::Usage(
                "multiplier table length does not match grid".into(),
            ));
        }
        let spec = self.as_spectral()?;
        let values: Vec<Complex64> = spec
            .values
            .iter()
            .zip(table.iter())
            .map(|(x, m)| x * m)
            .collect();
        SampledField {
            grid: self.grid,
            representation: Representation::Spectral,
            values,
        }
        .inverse_transform()
    }

    /// `L^p` quasi-norm with the cell measure: `(Σ|f|^p (L/N)^n)^{1/p}`;
    /// `p = ∞` gives the max. For `0 < p < 1` this is the standard
    /// quasi-norm power sum.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if self.representation != Representation::Spatial {
            return Err(Error::Usage("lp_norm requires a spatial field".into()));
        }
        if !(p > 0.0) {
            return Err(Error::Domain(format!("lp_norm requires p > 0, got {p}")));
        }
        Ok(lp_norm_of(
            self.values.iter().map(|v| v.norm()),
            p,
            self.grid.cell_measure(),
        ))
    }

    /// Return a copy with the zero-frequency coefficient removed.
    pub fn without_dc(&self) -> Result<SampledField> {
        let mut spec = self.as_spectral()?.into_owned();
        spec.values[0] = Complex64::new(0.0, 0.0);
        Ok(spec)
    }

    /// Dyadic spectral dilation: the output spectrum carries
    /// `amplitude * F(2^{-k} ξ)` wherever `2^{-k} ξ` is a lattice point and
    /// zero elsewhere. Fails when a non-negligible coefficient would leave
    /// the lattice.
    pub fn dilate_dyadic(&self, k: i32, amplitude: f64) -> Result<SampledField> {
        let spec = self.as_spectral()?;
        let grid = self.grid;
        let n = grid.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        let max_mag = spec
            .values
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max);
        let negligible = max_mag * 1e-13;
        let factor = 1i64 << k.unsigned_abs();
        let mut idx = [0usize; MAX_DIM];
        for flat in 0..n {
            let v = spec.values[flat];
            if v.norm() <= negligible {
                continue;
            }
            grid.decompose(flat, &mut idx);
            let mut target = [0usize; MAX_DIM];
            let mut ok = true;
            for axis in 0..grid.dim() {
                let s = grid.signed_index(idx[axis]);
                let mapped = if k >= 0 {
                    Some(s * factor)
                } else if s % factor == 0 {
                    Some(s / factor)
                } else {
                    None
                };
                match mapped.and_then(|t| grid.unsigned_index(t)) {
                    Some(u) => target[axis] = u,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                return Err(Error::Config(format!(
                    "spectral support cannot be dilated by 2^{k} within the grid"
                )));
            }
            out[grid.flatten(&target[..grid.dim()])] = v * amplitude;
        }
        SampledField::new(grid, Representation::Spectral, out)
    }

    /// Re-express the field on a grid with doubled sample count (same
    /// extent) by zero-padding the spectrum; the continuum trigonometric
    /// polynomial it represents is unchanged.
    pub fn upsample(&self) -> Result<SampledField> {
        let spec = self.as_spectral()?;
        let old = self.grid;
        let fine = GridSpec::new(old.dim(), old.extent(), old.samples() * 2)?;
        let mut out = vec![Complex64::new(0.0, 0.0); fine.len()];
        let mut idx = [0usize; MAX_DIM];
        for flat in 0..old.len() {
            old.decompose(flat, &mut idx);
            let mut target = [0usize; MAX_DIM];
            for axis in 0..old.dim() {
                let s = old.signed_index(idx[axis]);
                target[axis] = fine.unsigned_index(s).expect("half-band index fits");
            }
            out[fine.flatten(&target[..old.dim()])] = spec.values[flat];
        }
        SampledField::new(fine, Representation::Spectral, out)
    }

    /// Cyclic spatial shift by whole cells along each axis.
    pub fn translate(&self, shift: &[i64]) -> Result<SampledField> {
        if self.representation != Representation::Spatial {
            return Err(Error::Usage("translate requires a spatial field".into()));
        }
        if shift.len() != self.grid.dim() {
            return Err(Error::Usage("shift length must match dimension".into()));
        }
        let grid = self.grid;
        let n = grid.samples() as i64;
        let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
        let mut idx = [0usize; MAX_DIM];
        for flat in 0..grid.len() {
            grid.decompose(flat, &mut idx);
            let mut target = [0usize; MAX_DIM];
            for axis in 0..grid.dim() {
                target[axis] = (idx[axis] as i64 + shift[axis]).rem_euclid(n) as usize;
            }
            out[grid.flatten(&target[..grid.dim()])] = self.values[flat];
        }
        SampledField::new(grid, Representation::Spatial, out)
    }

    /// Write the field as CSV: one header line
    /// `lptk-field,v1,dim=<n>,extent=<L>,samples=<N>,representation=<r>`
    /// followed by one `re,im` line per value in flat row-major order.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "lptk-field,v1,dim={},extent={},samples={},representation={}",
            self.grid.dim(),
            self.grid.extent(),
            self.grid.samples(),
            self.representation
        )?;
        for v in &self.values {
            writeln!(w, "{},{}", v.re, v.im)?;
        }
        Ok(())
    }

    pub fn write_csv_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(r: R) -> Result<SampledField> {
        let reader = BufReader::new(r);
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty field file".into()))??;
        let parts: Vec<&str> = header.split(',').collect();
        if parts.len() != 6 || parts[0] != "lptk-field" || parts[1] != "v1" {
            return Err(Error::Parse("bad field header".into()));
        }
        let get = |i: usize, key: &str| -> Result<String> {
            let p = parts[i];
            p.strip_prefix(&format!("{key}="))
                .map(str::to_string)
                .ok_or_else(|| Error::Parse(format!("expected {key}= in field header")))
        };
        let dim: usize = get(2, "dim")?
            .parse()
            .map_err(|e| Error::Parse(format!("dim: {e}")))?;
        let extent: f64 = get(3, "extent")?
            .parse()
            .map_err(|e| Error::Parse(format!("extent: {e}")))?;
        let samples: usize = get(4, "samples")?
            .parse()
            .map_err(|e| Error::Parse(format!("samples: {e}")))?;
        let representation = match get(5, "representation")?.as_str() {
            "spatial" => Representation::Spatial,
            "spectral" => Representation::Spectral,
            other => return Err(Error::Parse(format!("bad representation {other}"))),
        };
        let grid = GridSpec::new(dim, extent, samples)?;
        let mut values = Vec::with_capacity(grid.len());
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (re, im) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse("expected re,im".into()))?;
            values.push(Complex64::new(
                re.trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("re: {e}")))?,
                im.trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("im: {e}")))?,
            ));
        }
        SampledField::new(grid, representation, values)
    }

    pub fn read_csv_file<P: AsRef<Path>>(path: P) -> Result<SampledField> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(file)
    }
}

pub(crate) fn lp_norm_of<I: Iterator<Item = f64>>(mags: I, p: f64, cell: f64) -> f64 {
    if p.is_infinite() {
        return mags.fold(0.0, f64::max);
    }
    let sum: f64 = mags.map(|m| m.powf(p)).sum();
    (sum * cell).powf(1.0 / p)
}

#[derive(Clone, Copy)]
enum FftDirection {
    Forward,
    Inverse,
}

static PLANNER: Mutex<Option<FftPlanner<f64>>> = Mutex::new(None);

/// In-place n-dimensional FFT (unnormalized, matching rustfft's
/// convention) applied axis by axis.
fn fft_nd(values: &mut [Complex64], grid: &GridSpec, direction: FftDirection) {
    let n = grid.samples();
    let fft = {
        let mut guard = PLANNER.lock().expect("fft planner poisoned");
        let planner = guard.get_or_insert_with(FftPlanner::new);
        match direction {
            FftDirection::Forward => planner.plan_fft_forward(n),
            FftDirection::Inverse => planner.plan_fft_inverse(n),
        }
    };
    let dim = grid.dim();
    let total = values.len();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..dim {
        // stride between consecutive entries along `axis`
        let stride = n.pow((dim - 1 - axis) as u32);
        let lines = total / n;
        for l in 0..lines {
            // base index of the l-th line along this axis
            let block = l / stride;
            let offset = l % stride;
            let base = block * stride * n + offset;
            for (j, slot) in line.iter_mut().enumerate() {
                *slot = values[base + j * stride];
            }
            fft.process(&mut line);
            for (j, slot) in line.iter().enumerate() {
                values[base + j * stride] = *slot;
            }
        }
    }
}

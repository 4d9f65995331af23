//! Square sampling grids for complex fields and real intensity images.
//!
//! Samples are row-major with the column index running along x and the row
//! index along y. Pixel `i` of an axis sits at `(i - n/2) * spacing + center`,
//! so an even-sized grid always contains the exact axis point. This alignment
//! is what the FFT stages assume (index `n/2` maps to the zero-frequency bin
//! after an `ifftshift`).

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pgm;

/// Complex field samples on a uniform square grid with physical extent.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    n: usize,
    spacing: f64,
    center: (f64, f64),
    samples: Vec<Complex64>,
}

impl FieldGrid {
    /// Build a grid from row-major samples.
    ///
    /// Requires `n >= 16` and even, positive spacing, and finite nonzero
    /// total power.
    pub fn from_samples(
        n: usize,
        spacing: f64,
        center: (f64, f64),
        samples: Vec<Complex64>,
    ) -> Result<Self> {
        if n < 16 || n % 2 != 0 {
            return Err(Error::Config(format!("grid size must be even and >= 16, got {n}")));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::Config(format!("grid spacing must be positive, got {spacing}")));
        }
        if samples.len() != n * n {
            return Err(Error::Config(format!(
                "expected {} samples for a {n}x{n} grid, got {}",
                n * n,
                samples.len()
            )));
        }
        let grid = FieldGrid { n, spacing, center, samples };
        let power = grid.total_power();
        if !power.is_finite() || power <= 0.0 {
            return Err(Error::DataIntegrity(format!(
                "total grid power must be finite and positive, got {power}"
            )));
        }
        Ok(grid)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn center(&self) -> (f64, f64) {
        self.center
    }

    /// Physical side length of the grid.
    pub fn extent(&self) -> f64 {
        self.n as f64 * self.spacing
    }

    /// x coordinate of column `col`.
    pub fn x_at(&self, col: usize) -> f64 {
        (col as f64 - (self.n / 2) as f64) * self.spacing + self.center.0
    }

    /// y coordinate of row `row`.
    pub fn y_at(&self, row: usize) -> f64 {
        (row as f64 - (self.n / 2) as f64) * self.spacing + self.center.1
    }

    pub fn value(&self, row: usize, col: usize) -> Complex64 {
        self.samples[row * self.n + col]
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    /// Total power on the grid, `sum |E|^2 * spacing^2`.
    pub fn total_power(&self) -> f64 {
        let cell = self.spacing * self.spacing;
        self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell
    }

    /// Grid inner product `<self, other> = sum self* . other . spacing^2`.
    pub fn inner_product(&self, other: &FieldGrid) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::Config(format!(
                "inner product requires equal grids, got {} and {}",
                self.n, other.n
            )));
        }
        let cell = self.spacing * self.spacing;
        let dot: Complex64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(dot * cell)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Write the field as a (magnitude, phase) 16-bit PGM pair plus a text
    /// header. `stem` is extended with `.mag.pgm`, `.phase.pgm` and `.hdr`.
    pub fn write_image_pair(&self, stem: &Path) -> Result<()> {
        let mag_max = self.max_abs();
        let scale = if mag_max > 0.0 { 65535.0 / mag_max } else { 0.0 };
        let mut mag = Vec::with_capacity(self.samples.len());
        let mut phase = Vec::with_capacity(self.samples.len());
        for v in &self.samples {
            mag.push((v.norm() * scale).round().clamp(0.0, 65535.0) as u16);
            // phase in [-pi, pi] mapped onto the full u16 range
            let ph = (v.arg() + std::f64::consts::PI) / (2.0 * std::f64::consts::PI);
            phase.push((ph * 65535.0).round().clamp(0.0, 65535.0) as u16);
        }
        pgm::write_pgm16(&stem.with_extension("mag.pgm"), self.n, self.n, &mag)?;
        pgm::write_pgm16(&stem.with_extension("phase.pgm"), self.n, self.n, &phase)?;
        let header = [
            ("n_pixels".to_string(), format!("{}", self.n)),
            ("spacing".to_string(), format!("{:.17e}", self.spacing)),
            ("center_x".to_string(), format!("{:.17e}", self.center.0)),
            ("center_y".to_string(), format!("{:.17e}", self.center.1)),
            ("mag_max".to_string(), format!("{:.17e}", mag_max)),
        ];
        pgm::write_sidecar(&stem.with_extension("hdr"), &header)
    }

    /// Read a field previously written by [`FieldGrid::write_image_pair`].
    pub fn read_image_pair(stem: &Path) -> Result<Self> {
        let header = pgm::read_sidecar(&stem.with_extension("hdr"))?;
        let lookup = |key: &str| -> Result<f64> {
            header
                .iter()
                .find(|(k, _)| k == key)
                .ok_or_else(|| Error::parse(stem.with_extension("hdr"), format!("missing key {key}")))?
                .1
                .parse::<f64>()
                .map_err(|e| Error::parse(stem.with_extension("hdr"), format!("bad {key}: {e}")))
        };
        let n = lookup("n_pixels")? as usize;
        let spacing = lookup("spacing")?;
        let center = (lookup("center_x")?, lookup("center_y")?);
        let mag_max = lookup("mag_max")?;
        let (wm, hm, mag) = pgm::read_pgm16(&stem.with_extension("mag.pgm"))?;
        let (wp, hp, phase) = pgm::read_pgm16(&stem.with_extension("phase.pgm"))?;
        if wm != n || hm != n || wp != n || hp != n {
            return Err(Error::parse(
                stem.with_extension("mag.pgm"),
                format!("image dimensions do not match header n_pixels = {n}"),
            ));
        }
        let samples = mag
            .iter()
            .zip(&phase)
            .map(|(&m, &p)| {
                let r = m as f64 / 65535.0 * mag_max;
                let ph = p as f64 / 65535.0 * 2.0 * std::f64::consts::PI - std::f64::consts::PI;
                Complex64::from_polar(r, ph)
            })
            .collect();
        FieldGrid::from_samples(n, spacing, center, samples)
    }
}

/// Real-valued samples on a uniform square grid (intensity frames, Wigner
/// slices before packaging).
#[derive(Debug, Clone)]
pub struct ScalarField {
    n: usize,
    spacing: f64,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(n: usize, spacing: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::Config(format!(
                "expected {} values for a {n}x{n} grid, got {}",
                n * n,
                values.len()
            )));
        }
        Ok(ScalarField { n, spacing, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n + col]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

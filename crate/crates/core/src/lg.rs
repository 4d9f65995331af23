//! Laguerre-Gaussian vortex fields sampled at the beam waist.
//!
//! Fields are evaluated at the waist plane: the wavefront is flat, the Gouy
//! phase is zero and the spot size equals the waist. A mode of azimuthal
//! index `n` and radial index `m` has amplitude
//!
//! ```text
//! E(r, phi) ~ (r sqrt(2)/w)^|n| exp(-r^2/w^2) L_m^|n|(2 r^2/w^2) exp(i n phi)
//! ```
//!
//! normalized so the sampled grid carries unit total power.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::FieldGrid;

/// Beam parameters of one vortex mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSpec {
    waist: f64,
    wavelength: f64,
    order_n: i32,
    order_m: u32,
}

impl BeamSpec {
    /// Validates `waist > 0`, `wavelength > 0`, `|n| <= 8`, `m <= 4`.
    pub fn new(waist: f64, wavelength: f64, order_n: i32, order_m: u32) -> Result<Self> {
        if !(waist > 0.0) || !waist.is_finite() {
            return Err(Error::Domain(format!("waist must be positive, got {waist}")));
        }
        if !(wavelength > 0.0) || !wavelength.is_finite() {
            return Err(Error::Domain(format!("wavelength must be positive, got {wavelength}")));
        }
        if order_n.unsigned_abs() > 8 {
            return Err(Error::Domain(format!("|order_n| <= 8 supported, got {order_n}")));
        }
        if order_m > 4 {
            return Err(Error::Domain(format!("order_m <= 4 supported, got {order_m}")));
        }
        Ok(BeamSpec { waist, wavelength, order_n, order_m })
    }

    pub fn waist(&self) -> f64 {
        self.waist
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Reduced wavelength, `lambda / 2 pi`.
    pub fn lambda_bar(&self) -> f64 {
        self.wavelength / (2.0 * std::f64::consts::PI)
    }

    pub fn order_n(&self) -> i32 {
        self.order_n
    }

    pub fn order_m(&self) -> u32 {
        self.order_m
    }
}

/// Square grid shape: sample count per axis and pixel spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub spacing: f64,
}

impl GridSpec {
    pub fn new(n: usize, spacing: f64) -> Self {
        GridSpec { n, spacing }
    }

    /// Default sampling for a given waist: 512 pixels spanning 8 waists,
    /// which keeps the mode tails at the boundary below double-precision
    /// noise for `n <= 3`.
    pub fn default_for_waist(waist: f64) -> Self {
        let n = 512;
        GridSpec { n, spacing: 8.0 * waist / n as f64 }
    }

    pub fn extent(&self) -> f64 {
        self.n as f64 * self.spacing
    }
}

/// Generalized Laguerre polynomial `L_m^alpha(x)` by the three-term
/// recurrence, stable for the small orders used here (`m <= 12`).
pub fn laguerre(m: u32, alpha: u32, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("laguerre argument must be finite, got {x}")));
    }
    if m > 12 {
        return Err(Error::Domain(format!("laguerre order m <= 12 supported, got {m}")));
    }
    Ok(laguerre_unchecked(m, alpha, x))
}

pub(crate) fn laguerre_unchecked(m: u32, alpha: u32, x: f64) -> f64 {
    let a = alpha as f64;
    if m == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + a - x;
    for k in 1..m {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Unnormalized waist-plane LG amplitude at a point.
pub fn lg_amplitude(spec: &BeamSpec, x: f64, y: f64) -> Complex64 {
    let w = spec.waist;
    let r2 = x * x + y * y;
    let rho2 = 2.0 * r2 / (w * w);
    let n_abs = spec.order_n.unsigned_abs();
    let radial = rho2.powf(n_abs as f64 / 2.0)
        * (-r2 / (w * w)).exp()
        * laguerre_unchecked(spec.order_m, n_abs, rho2);
    let phi = y.atan2(x);
    radial * Complex64::from_polar(1.0, spec.order_n as f64 * phi)
}

/// Sample an LG mode on a centered grid, normalized to unit total power.
///
/// Fails if the grid extent is below four waists (the tails would carry
/// non-negligible power).
pub fn lg_field(spec: &BeamSpec, grid: &GridSpec) -> Result<FieldGrid> {
    lg_field_centered(spec, grid, (0.0, 0.0))
}

/// As [`lg_field`] with the beam axis offset from the grid center.
pub fn lg_field_centered(spec: &BeamSpec, grid: &GridSpec, center: (f64, f64)) -> Result<FieldGrid> {
    if grid.extent() < 4.0 * spec.waist {
        return Err(Error::Config(format!(
            "grid extent {:.3} is below 4 waists ({:.3}); the mode does not fit",
            grid.extent(),
            4.0 * spec.waist
        )));
    }
    let n = grid.n;
    let half = (n / 2) as f64;
    let mut samples = Vec::with_capacity(n * n);
    for row in 0..n {
        let y = (row as f64 - half) * grid.spacing;
        for col in 0..n {
            let x = (col as f64 - half) * grid.spacing;
            samples.push(lg_amplitude(spec, x - center.0, y - center.1));
        }
    }
    let cell = grid.spacing * grid.spacing;
    let power: f64 = samples.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell;
    let norm = 1.0 / power.sqrt();
    for v in &mut samples {
        *v *= norm;
    }
    FieldGrid::from_samples(n, grid.spacing, center, samples)
}

/// Multiply a field by the spiral-phase-plate factor `exp(i charge phi)`.
///
/// The phase is singular on the beam axis; the sample at the exact axis
/// point (present on these even grids) is set to zero for nonzero charge,
/// the only value consistent with the surrounding phase winding. Fields
/// that already vanish on axis (every vortex mode) lose no power.
pub fn apply_spp(input: &FieldGrid, charge: i32) -> Result<FieldGrid> {
    if !(input.total_power() > 0.0) {
        return Err(Error::DataIntegrity("input field has no power".into()));
    }
    let n = input.n();
    let mut samples = Vec::with_capacity(n * n);
    for row in 0..n {
        let y = input.y_at(row) - input.center().1;
        for col in 0..n {
            let x = input.x_at(col) - input.center().0;
            let v = input.value(row, col);
            if charge != 0 && x == 0.0 && y == 0.0 {
                samples.push(Complex64::new(0.0, 0.0));
            } else {
                let phi = y.atan2(x);
                samples.push(v * Complex64::from_polar(1.0, charge as f64 * phi));
            }
        }
    }
    FieldGrid::from_samples(n, input.spacing(), input.center(), samples)
}

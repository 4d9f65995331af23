//! Wigner slices from two-point correlation records.
//!
//! At a fixed shear the centered Fourier transform of the TPCF over the
//! camera coordinate reproduces the analytic Wigner function of the mode on
//! a momentum plane, up to three fixed conventions:
//!
//! - the momentum axis is `P = scale * k` with one multiplicative factor
//!   relating camera angular frequency to the dimensionless quadrature;
//!   the factor is *measured* by [`calibrate_axes`] against a reference
//!   Gaussian rather than assumed (for a waist `w` it comes out at
//!   `w / (2 sqrt(2))`),
//! - the amplitude is normalized by the recorded arm power so the
//!   zero-shear Gaussian slice peaks at `1/pi^2`,
//! - the mode parity `(-1)^(|n| + 2m)` relates the transform to the signed
//!   Wigner function; the slice applies it from the beam order, which the
//!   measurement procedure knows by construction.
//!
//! The transform uses the negative-exponent kernel, output centered, with
//! zero-padding to twice the record size for momentum resolution.

use crate::error::{Error, Result};
use crate::fft::{bin_frequency, centered_spectrum};
use crate::lg::{lg_field, BeamSpec, GridSpec};
use crate::sagnac::{extract_tpcf, synthesize_interferograms, NoiseModel, ShearSetting, TPCFRecord};
use crate::wigner::{wdf_analytic, QuadraturePoint};

/// Momentum half-window retained in a slice; the analytic distribution is
/// below 1e-14 outside |P| <= 4 for the supported orders.
pub const MOMENTUM_WINDOW: f64 = 4.0;

const PI2: f64 = std::f64::consts::PI * std::f64::consts::PI;

/// Momentum-axis scale fitted by [`calibrate_axes`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisCalibration {
    momentum_scale: f64,
}

impl AxisCalibration {
    /// Dimensionless momentum per unit angular frequency.
    pub fn momentum_scale(&self) -> f64 {
        self.momentum_scale
    }

    /// The closed-form scale for a waist `w`; used as a fallback where no
    /// reference measurement is wanted, and as the oracle the fitted value
    /// is tested against.
    pub fn nominal(waist: f64) -> Self {
        AxisCalibration { momentum_scale: waist / (2.0 * std::f64::consts::SQRT_2) }
    }
}

/// A real Wigner slice over `(P_X, P_Y)` at fixed `(X, Y)`.
#[derive(Debug, Clone)]
pub struct WignerSlice {
    side: usize,
    p_axis: Vec<f64>,
    values: Vec<f64>,
    x_fixed: f64,
    y_fixed: f64,
    residual_imag: f64,
}

impl WignerSlice {
    pub fn side(&self) -> usize {
        self.side
    }

    /// Uniform momentum axis, symmetric about zero, shared by both
    /// directions.
    pub fn p_axis(&self) -> &[f64] {
        &self.p_axis
    }

    /// Row-major values; the row index runs along `P_Y`, the column index
    /// along `P_X`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn x_fixed(&self) -> f64 {
        self.x_fixed
    }

    pub fn y_fixed(&self) -> f64 {
        self.y_fixed
    }

    /// Largest imaginary magnitude discarded when taking the real part,
    /// in the same units as `values`.
    pub fn residual_imag(&self) -> f64 {
        self.residual_imag
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.side + col]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Bilinear interpolation at `(p_x, p_y)`; a range error outside the
    /// stored window.
    pub fn value_at(&self, p_x: f64, p_y: f64) -> Result<f64> {
        let lo = self.p_axis[0];
        let hi = *self.p_axis.last().unwrap();
        if !(p_x >= lo && p_x <= hi && p_y >= lo && p_y <= hi) {
            return Err(Error::Range(format!(
                "momentum ({p_x}, {p_y}) outside the slice window [{lo}, {hi}]"
            )));
        }
        let step = self.p_axis[1] - self.p_axis[0];
        let fx = (p_x - lo) / step;
        let fy = (p_y - lo) / step;
        let ix = (fx.floor() as usize).min(self.side - 2);
        let iy = (fy.floor() as usize).min(self.side - 2);
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        let v00 = self.value(iy, ix);
        let v01 = self.value(iy, ix + 1);
        let v10 = self.value(iy + 1, ix);
        let v11 = self.value(iy + 1, ix + 1);
        Ok(v00 * (1.0 - tx) * (1.0 - ty)
            + v01 * tx * (1.0 - ty)
            + v10 * (1.0 - tx) * ty
            + v11 * tx * ty)
    }

    /// Sample the analytic distribution into a slice, for oracle
    /// comparisons and analytic-source Bell evaluation.
    pub fn analytic(
        n: i32,
        m: u32,
        x_fixed: f64,
        y_fixed: f64,
        p_axis: Vec<f64>,
    ) -> Result<Self> {
        let side = p_axis.len();
        if side < 2 {
            return Err(Error::Config("analytic slice needs at least a 2x2 grid".into()));
        }
        let mut values = Vec::with_capacity(side * side);
        for &py in &p_axis {
            for &px in &p_axis {
                values.push(wdf_analytic(n, m, &QuadraturePoint::new(x_fixed, px, y_fixed, py))?);
            }
        }
        Ok(WignerSlice { side, p_axis, values, x_fixed, y_fixed, residual_imag: 0.0 })
    }
}

/// Both sides of the discrete Parseval identity for the padded transform:
/// `sum |Phi|^2 h^2` and `sum |F|^2 dk^2 / (2 pi)^2`. Equal to rounding,
/// before any axis rescaling.
pub fn parseval_identity(tpcf: &TPCFRecord) -> (f64, f64) {
    let n = tpcf.n();
    let h = tpcf.spacing();
    let padded = 2 * n;
    let spectrum = centered_spectrum(tpcf.values(), n, h, padded);
    let spatial: f64 = tpcf.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * h * h;
    let dk = std::f64::consts::TAU / (padded as f64 * h);
    let spectral: f64 = spectrum.iter().map(|v| v.norm_sqr()).sum::<f64>() * dk * dk
        / (std::f64::consts::TAU * std::f64::consts::TAU);
    (spatial, spectral)
}

/// Fourier-transform a TPCF into a Wigner slice at its shear.
pub fn tpcf_to_wdf_slice(
    tpcf: &TPCFRecord,
    beam: &BeamSpec,
    calib: &AxisCalibration,
) -> Result<WignerSlice> {
    let n = tpcf.n();
    let h = tpcf.spacing();
    if n < 16 || n % 2 != 0 || !(h > 0.0) {
        return Err(Error::Config(format!(
            "TPCF grid must be uniform, even and >= 16 per side; got n = {n}, spacing = {h}"
        )));
    }
    if !(tpcf.beam_power() > 0.0) {
        return Err(Error::DataIntegrity("TPCF carries no beam power".into()));
    }
    let padded = 2 * n;
    let spectrum = centered_spectrum(tpcf.values(), n, h, padded);

    let dk = std::f64::consts::TAU / (padded as f64 * h);
    let dp = calib.momentum_scale * dk;
    let half_nodes = (MOMENTUM_WINDOW / dp).floor() as usize;
    if half_nodes < 2 {
        return Err(Error::Config(
            "momentum resolution too coarse for the retained window".into(),
        ));
    }
    let side = 2 * half_nodes + 1;
    let mid = padded / 2;
    let parity = if beam.order_n().unsigned_abs() % 2 == 1 { -1.0 } else { 1.0 };
    let norm = parity / (PI2 * tpcf.beam_power());

    let mut p_axis = Vec::with_capacity(side);
    for j in 0..side {
        let bin = mid - half_nodes + j;
        p_axis.push(calib.momentum_scale * bin_frequency(bin, padded, h));
    }
    let mut values = Vec::with_capacity(side * side);
    let mut residual = 0.0f64;
    for row in 0..side {
        let src_row = (mid - half_nodes + row) * padded;
        for col in 0..side {
            let v = spectrum[src_row + mid - half_nodes + col];
            values.push(v.re * norm);
            residual = residual.max(v.im.abs() * norm.abs());
        }
    }
    Ok(WignerSlice {
        side,
        p_axis,
        values,
        x_fixed: tpcf.shear().x_shear,
        y_fixed: tpcf.shear().y_shear,
        residual_imag: residual,
    })
}

/// Fit the momentum-axis scale on a reference Gaussian.
///
/// For each probe shear the noiseless pipeline is run and the log of the
/// reconstructed spectrum is regressed on `k^2`; the slope gives the scale.
/// The per-probe fits must agree with the Gaussian model to 2% or the
/// calibration is rejected.
pub fn calibrate_axes(
    reference_beam: &BeamSpec,
    grid: &GridSpec,
    probe_shears: &[ShearSetting],
) -> Result<AxisCalibration> {
    if reference_beam.order_n() != 0 || reference_beam.order_m() != 0 {
        return Err(Error::Config(format!(
            "calibration reference must be the Gaussian mode, got n = {}, m = {}",
            reference_beam.order_n(),
            reference_beam.order_m()
        )));
    }
    if probe_shears.is_empty() {
        return Err(Error::Config("calibration needs at least one probe shear".into()));
    }
    let field = lg_field(reference_beam, grid)?;
    let mut scales = Vec::with_capacity(probe_shears.len());
    for shear in probe_shears {
        let frames =
            synthesize_interferograms(&field, reference_beam.waist(), shear, &NoiseModel::NONE)?;
        let tpcf = extract_tpcf(&frames)?;
        let n = tpcf.n();
        let h = tpcf.spacing();
        let padded = 2 * n;
        let spectrum = centered_spectrum(tpcf.values(), n, h, padded);
        let peak = spectrum.iter().map(|v| v.re.abs()).fold(0.0, f64::max);
        if !(peak > 0.0) {
            return Err(Error::Calibration("empty spectrum from probe".into()));
        }
        // weighted linear regression of ln F on k^2
        let mut sw = 0.0;
        let mut sx = 0.0;
        let mut sy = 0.0;
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        let mut points = Vec::new();
        for row in 0..padded {
            let ky = bin_frequency(row, padded, h);
            for col in 0..padded {
                let v = spectrum[row * padded + col].re;
                if v > 1e-3 * peak {
                    let kx = bin_frequency(col, padded, h);
                    let k2 = kx * kx + ky * ky;
                    let ln = (v / peak).ln();
                    points.push((k2, ln));
                    sw += 1.0;
                    sx += k2;
                    sy += ln;
                    sxx += k2 * k2;
                    sxy += k2 * ln;
                }
            }
        }
        let denom = sw * sxx - sx * sx;
        if denom <= 0.0 {
            return Err(Error::Calibration("degenerate spectrum fit".into()));
        }
        let slope = (sw * sxy - sx * sy) / denom;
        let intercept = (sy - slope * sx) / sw;
        if slope >= 0.0 {
            return Err(Error::Calibration("spectrum failed to decay with frequency".into()));
        }
        // relative residual against the fitted Gaussian model
        let mut worst = 0.0f64;
        for (k2, ln) in &points {
            let model = (intercept + slope * k2).exp();
            worst = worst.max((ln.exp() - model).abs());
        }
        if worst > 0.02 {
            return Err(Error::Calibration(format!(
                "probe ({}, {}): fit residual {worst:.3} above 2%",
                shear.x_shear, shear.y_shear
            )));
        }
        scales.push((-slope).sqrt());
    }
    let mean = scales.iter().sum::<f64>() / scales.len() as f64;
    Ok(AxisCalibration { momentum_scale: mean })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lg::lg_field;

    const W: f64 = 1.0;

    fn beam(n: i32) -> BeamSpec {
        BeamSpec::new(W, 0.5328e-3, n, 0).unwrap()
    }

    fn grid(n: usize, extent: f64) -> GridSpec {
        GridSpec::new(n, extent / n as f64)
    }

    fn slice_for(order: i32, shear: ShearSetting, g: &GridSpec) -> WignerSlice {
        let field = lg_field(&beam(order), g).unwrap();
        let frames = synthesize_interferograms(&field, W, &shear, &NoiseModel::NONE).unwrap();
        let tpcf = extract_tpcf(&frames).unwrap();
        tpcf_to_wdf_slice(&tpcf, &beam(order), &AxisCalibration::nominal(W)).unwrap()
    }

    #[test]
    fn gaussian_zero_shear_peaks_at_inverse_pi_squared() {
        let s = slice_for(0, ShearSetting::ZERO, &grid(256, 8.0));
        let mid = s.side() / 2;
        assert_eq!(s.p_axis()[mid], 0.0);
        let center = s.value(mid, mid);
        assert!(((center - 1.0 / PI2) / (1.0 / PI2)).abs() < 1e-3, "center {center}");
        let peak = s.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!((peak - center).abs() <= 1e-12 * center.abs());
        // radially symmetric: compare the two axes at equal |P|
        let k = mid / 2;
        assert!((s.value(mid, mid + k) - s.value(mid + k, mid)).abs() < 1e-6 / PI2);
    }

    #[test]
    fn vortex_zero_shear_is_negative_at_center_with_unit_ring() {
        let s = slice_for(1, ShearSetting::ZERO, &grid(256, 8.0));
        let mid = s.side() / 2;
        let center = s.value(mid, mid);
        assert!(((center + 1.0 / PI2) / (1.0 / PI2)).abs() < 1e-2, "center {center}");
        // sign change across the circle P_X^2 + P_Y^2 = 1
        let step = s.p_axis()[1] - s.p_axis()[0];
        let inside = s.value_at(0.0, 1.0 - 2.0 * step).unwrap();
        let outside = s.value_at(0.0, 1.0 + 2.0 * step).unwrap();
        assert!(inside < 0.0 && outside > 0.0, "no crossing: {inside} / {outside}");
    }

    #[test]
    fn residual_imag_small_for_noiseless_input() {
        let s = slice_for(1, ShearSetting::new(0.2, 0.0).unwrap(), &grid(256, 8.0));
        assert!(s.residual_imag() < 1e-6 * s.max_abs());
    }

    #[test]
    fn oracle_agreement_zero_and_nonzero_shear() {
        let g = grid(256, 8.0);
        let tol = 0.01 / PI2;
        for order in [0, 1, 2, 3] {
            for shear in [ShearSetting::ZERO, ShearSetting::new(0.2, 0.0).unwrap()] {
                let s = slice_for(order, shear, &g);
                let mut worst = 0.0f64;
                for (row, &py) in s.p_axis().iter().enumerate() {
                    for (col, &px) in s.p_axis().iter().enumerate() {
                        if px.abs() > 3.0 || py.abs() > 3.0 {
                            continue;
                        }
                        let truth = wdf_analytic(
                            order,
                            0,
                            &QuadraturePoint::new(shear.x_shear, px, shear.y_shear, py),
                        )
                        .unwrap();
                        worst = worst.max((s.value(row, col) - truth).abs());
                    }
                }
                assert!(
                    worst < tol,
                    "order {order}, shear ({}, {}): deviation {worst:.3e} vs tol {tol:.3e}",
                    shear.x_shear,
                    shear.y_shear
                );
            }
        }
    }

    #[test]
    fn deviation_shrinks_with_resolution() {
        let deviation = |n_grid: usize| -> f64 {
            let s = slice_for(2, ShearSetting::ZERO, &grid(n_grid, 8.0));
            let mut worst = 0.0f64;
            for (row, &py) in s.p_axis().iter().enumerate() {
                for (col, &px) in s.p_axis().iter().enumerate() {
                    if px.abs() > 3.0 || py.abs() > 3.0 {
                        continue;
                    }
                    let truth =
                        wdf_analytic(2, 0, &QuadraturePoint::new(0.0, px, 0.0, py)).unwrap();
                    worst = worst.max((s.value(row, col) - truth).abs());
                }
            }
            worst
        };
        let coarse = deviation(128);
        let fine = deviation(256);
        let floor = 0.002 / PI2;
        assert!(
            fine <= coarse / 2.0 || fine < floor,
            "coarse {coarse:.3e}, fine {fine:.3e}"
        );
    }

    #[test]
    fn parseval_holds_before_rescaling() {
        let field = lg_field(&beam(1), &grid(128, 8.0)).unwrap();
        let frames = synthesize_interferograms(
            &field,
            W,
            &ShearSetting::new(0.3, -0.1).unwrap(),
            &NoiseModel::NONE,
        )
        .unwrap();
        let tpcf = extract_tpcf(&frames).unwrap();
        let (spatial, spectral) = parseval_identity(&tpcf);
        assert!(((spatial - spectral) / spatial).abs() < 1e-6);
    }

    #[test]
    fn calibration_recovers_the_closed_form_scale() {
        let shears = [
            ShearSetting::ZERO,
            ShearSetting::new(0.3, 0.0).unwrap(),
            ShearSetting::new(0.0, 0.3).unwrap(),
        ];
        let calib = calibrate_axes(&beam(0), &grid(256, 8.0), &shears).unwrap();
        let oracle = AxisCalibration::nominal(W).momentum_scale();
        assert!(
            ((calib.momentum_scale() - oracle) / oracle).abs() < 0.005,
            "fitted {} vs oracle {oracle}",
            calib.momentum_scale()
        );
    }

    #[test]
    fn calibration_stable_across_probe_subsets() {
        let g = grid(256, 8.0);
        let all = [
            ShearSetting::ZERO,
            ShearSetting::new(0.3, 0.0).unwrap(),
            ShearSetting::new(0.0, 0.3).unwrap(),
            ShearSetting::new(0.2, 0.2).unwrap(),
        ];
        let full = calibrate_axes(&beam(0), &g, &all).unwrap().momentum_scale();
        let first = calibrate_axes(&beam(0), &g, &all[..2]).unwrap().momentum_scale();
        let last = calibrate_axes(&beam(0), &g, &all[2..]).unwrap().momentum_scale();
        assert!(((first - full) / full).abs() < 0.005);
        assert!(((last - full) / full).abs() < 0.005);
    }

    #[test]
    fn calibration_is_idempotent() {
        let g = grid(128, 8.0);
        let shears = [ShearSetting::ZERO];
        let a = calibrate_axes(&beam(0), &g, &shears).unwrap();
        let b = calibrate_axes(&beam(0), &g, &shears).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn calibration_rejects_vortex_reference() {
        let g = grid(128, 8.0);
        assert!(matches!(
            calibrate_axes(&beam(1), &g, &[ShearSetting::ZERO]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn interpolation_out_of_window_is_a_range_error() {
        let s = slice_for(0, ShearSetting::ZERO, &grid(128, 8.0));
        assert!(matches!(s.value_at(0.0, 100.0), Err(Error::Range(_))));
    }

    #[test]
    fn analytic_slice_matches_direct_evaluation() {
        let p_axis: Vec<f64> = (-20..=20).map(|k| 0.1 * k as f64).collect();
        let s = WignerSlice::analytic(1, 0, 0.2, 0.0, p_axis).unwrap();
        let v = s.value_at(0.3, -0.5).unwrap();
        let truth = wdf_analytic(1, 0, &QuadraturePoint::new(0.2, 0.3, 0.0, -0.5)).unwrap();
        // exact at grid nodes
        assert!((v - truth).abs() < 1e-15);
    }
}

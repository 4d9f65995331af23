//! End-to-end simulated measurement: field synthesis, interferograms, TPCF
//! extraction, slice reconstruction and Bell evaluation, plus repetition
//! batches for error statistics.

use rayon::prelude::*;

use crate::bell::{
    maximize_bell_from_slices, mean_std, BellResult, SliceQuartet,
};
use crate::error::{Error, Result};
use crate::grid::FieldGrid;
use crate::lg::{lg_field, BeamSpec, GridSpec};
use crate::reconstruct::{calibrate_axes, tpcf_to_wdf_slice, AxisCalibration, WignerSlice};
use crate::sagnac::{
    extract_tpcf, synthesize_interferograms, NoiseModel, ShearSetting,
};

/// Per-order `(X1, X2, Y1, Y2)` shear settings at which the reconstructed
/// Bell parameter is maximized over momenta; the bundled values are the
/// analytic eight-variable optima for orders 0..=3.
pub fn preset_shears(order: i32) -> Option<(f64, f64, f64, f64)> {
    match order {
        0 => Some((0.00, 0.58, 0.00, 0.00)),
        1 => Some((-0.07, 0.40, -0.05, 0.26)),
        2 => Some((0.09, -0.40, 0.00, 0.00)),
        3 => Some((-0.09, 0.35, -0.01, 0.06)),
        _ => None,
    }
}

/// Momentum search window for the reconstructed Bell maximization; the
/// optima of the supported orders sit well inside |P| <= 1.
pub const BELL_MOMENTUM_WINDOW: f64 = 1.0;

/// One beam driven through the virtual interferometer.
#[derive(Debug, Clone)]
pub struct Pipeline {
    beam: BeamSpec,
    grid: GridSpec,
    calibration: AxisCalibration,
    field: FieldGrid,
}

impl Pipeline {
    /// Calibrate the momentum axis on the Gaussian reference for this grid,
    /// then prepare the mode field.
    pub fn new(beam: BeamSpec, grid: GridSpec) -> Result<Self> {
        let reference = BeamSpec::new(beam.waist(), beam.wavelength(), 0, 0)?;
        let probes = [
            ShearSetting::ZERO,
            ShearSetting::new(0.3, 0.0)?,
            ShearSetting::new(0.0, 0.3)?,
        ];
        let calibration = calibrate_axes(&reference, &grid, &probes)?;
        Self::with_calibration(beam, grid, calibration)
    }

    /// Use a previously fitted calibration (or the nominal one).
    pub fn with_calibration(
        beam: BeamSpec,
        grid: GridSpec,
        calibration: AxisCalibration,
    ) -> Result<Self> {
        let field = lg_field(&beam, &grid)?;
        Ok(Pipeline { beam, grid, calibration, field })
    }

    pub fn beam(&self) -> &BeamSpec {
        &self.beam
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn calibration(&self) -> AxisCalibration {
        self.calibration
    }

    pub fn field(&self) -> &FieldGrid {
        &self.field
    }

    /// Simulate one shear setting and reconstruct the Wigner slice.
    pub fn slice_at(&self, shear: ShearSetting, noise: &NoiseModel) -> Result<WignerSlice> {
        let frames = synthesize_interferograms(&self.field, self.beam.waist(), &shear, noise)?;
        let tpcf = extract_tpcf(&frames)?;
        tpcf_to_wdf_slice(&tpcf, &self.beam, &self.calibration)
    }

    /// Reconstruct the four slices of the `(X1, X2) x (Y1, Y2)` pattern.
    /// Coinciding shear pairs are simulated once; when noise is active each
    /// distinct pair still gets its own seed offset.
    pub fn quartet(
        &self,
        shears: (f64, f64, f64, f64),
        noise: &NoiseModel,
    ) -> Result<SliceQuartet> {
        let (x1, x2, y1, y2) = shears;
        let pairs = [(x1, y1), (x1, y2), (x2, y1), (x2, y2)];
        let mut slices: Vec<Option<WignerSlice>> = vec![None, None, None, None];
        for i in 0..4 {
            if slices[i].is_some() {
                continue;
            }
            let setting = ShearSetting::new(pairs[i].0, pairs[i].1)?;
            let frame_noise = NoiseModel {
                gaussian_sigma: noise.gaussian_sigma,
                seed: mix_seed(noise.seed, i as u64),
            };
            let slice = self.slice_at(setting, &frame_noise)?;
            for j in i..4 {
                if pairs[j] == pairs[i] {
                    slices[j] = Some(slice.clone());
                }
            }
        }
        let mut it = slices.into_iter().map(Option::unwrap);
        Ok(SliceQuartet {
            s11: it.next().unwrap(),
            s12: it.next().unwrap(),
            s21: it.next().unwrap(),
            s22: it.next().unwrap(),
        })
    }

    /// One full reconstructed Bell evaluation: four slices at the given
    /// shears, maximized over the momentum axes.
    pub fn bell_at_shears(
        &self,
        shears: (f64, f64, f64, f64),
        noise: &NoiseModel,
    ) -> Result<BellResult> {
        let quartet = self.quartet(shears, noise)?;
        maximize_bell_from_slices(&quartet, BELL_MOMENTUM_WINDOW)
    }

    /// `|B|` of the two-variable pattern on an `X` grid, maximized over
    /// `P_Y` per column. Returns the surface (row-major, `X` rows by
    /// `P_Y` columns) for export alongside the best value found.
    pub fn two_param_scan(
        &self,
        x_values: &[f64],
        p_y_values: &[f64],
        noise: &NoiseModel,
    ) -> Result<TwoParamScan> {
        if x_values.is_empty() || p_y_values.is_empty() {
            return Err(Error::Config("two-variable scan needs non-empty grids".into()));
        }
        let zero = self.slice_at(ShearSetting::ZERO, noise)?;
        let b_zero = zero.value_at(0.0, 0.0)?;
        let rows: Vec<Vec<f64>> = x_values
            .par_iter()
            .map(|&x| -> Result<Vec<f64>> {
                let sx = self.slice_at(
                    ShearSetting::new(x, 0.0)?,
                    &NoiseModel {
                        gaussian_sigma: noise.gaussian_sigma,
                        seed: mix_seed(noise.seed, x.to_bits()),
                    },
                )?;
                let pi2 = std::f64::consts::PI * std::f64::consts::PI;
                let mut row = Vec::with_capacity(p_y_values.len());
                for &py in p_y_values {
                    let b = pi2
                        * (b_zero + zero.value_at(0.0, py)? + sx.value_at(0.0, 0.0)?
                            - sx.value_at(0.0, py)?);
                    row.push(b.abs());
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut values = Vec::with_capacity(x_values.len() * p_y_values.len());
        let mut best = (0.0f64, 0.0, 0.0);
        for (ix, row) in rows.into_iter().enumerate() {
            for (iy, v) in row.into_iter().enumerate() {
                if v > best.0 {
                    best = (v, x_values[ix], p_y_values[iy]);
                }
                values.push(v);
            }
        }
        Ok(TwoParamScan {
            x_values: x_values.to_vec(),
            p_y_values: p_y_values.to_vec(),
            abs_b: values,
            best_abs_b: best.0,
            best_x: best.1,
            best_p_y: best.2,
        })
    }
}

/// Result of a simulated two-variable scan.
#[derive(Debug, Clone)]
pub struct TwoParamScan {
    pub x_values: Vec<f64>,
    pub p_y_values: Vec<f64>,
    /// Row-major `|B|`, `X` rows by `P_Y` columns.
    pub abs_b: Vec<f64>,
    pub best_abs_b: f64,
    pub best_x: f64,
    pub best_p_y: f64,
}

/// Run the full simulated pipeline `repetitions` times per order at the
/// bundled shear settings, maximizing over momenta each time; one
/// [`BellResult`] per order with the per-repetition samples and their
/// statistics. Repetitions run in parallel with seeds derived from
/// `noise.seed`.
pub fn bell_vs_order(
    orders: &[i32],
    repetitions: usize,
    noise: &NoiseModel,
    waist: f64,
    wavelength: f64,
    grid: GridSpec,
) -> Result<Vec<BellResult>> {
    if repetitions == 0 {
        return Err(Error::Config("repetitions must be >= 1".into()));
    }
    let reference = BeamSpec::new(waist, wavelength, 0, 0)?;
    let probes = [
        ShearSetting::ZERO,
        ShearSetting::new(0.3, 0.0)?,
        ShearSetting::new(0.0, 0.3)?,
    ];
    let calibration = calibrate_axes(&reference, &grid, &probes)?;

    let mut results = Vec::with_capacity(orders.len());
    for &order in orders {
        let shears = preset_shears(order).ok_or_else(|| {
            Error::Config(format!("no bundled shear settings for order {order}"))
        })?;
        let beam = BeamSpec::new(waist, wavelength, order, 0)?;
        let pipeline = Pipeline::with_calibration(beam, grid, calibration)?;
        let runs: Vec<BellResult> = (0..repetitions)
            .into_par_iter()
            .map(|rep| {
                let rep_noise = NoiseModel {
                    gaussian_sigma: noise.gaussian_sigma,
                    seed: mix_seed(noise.seed, ((order as u64) << 32) ^ rep as u64),
                };
                pipeline.bell_at_shears(shears, &rep_noise)
            })
            .collect::<Result<Vec<_>>>()?;
        let samples: Vec<f64> = runs.iter().map(|r| r.b_max).collect();
        let (mean, std_dev) = mean_std(&samples);
        let first = &runs[0];
        results.push(BellResult {
            b_value: first.b_value,
            b_max: mean,
            argmax: first.argmax,
            repetitions: samples,
            mean,
            std_dev,
            converged: runs.iter().all(|r| r.converged),
        });
    }
    Ok(results)
}

/// SplitMix64 step; derives well-separated per-repetition seeds.
fn mix_seed(base: u64, salt: u64) -> u64 {
    let mut z = base ^ salt.wrapping_mul(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

//! Virtual shearing Sagnac interferometer.
//!
//! The glass-block calibration maps a linear-scale reading to a lateral
//! beam displacement (exact Snell ray trace and its paraxial limit). Frame
//! synthesis displaces the two counter-propagating copies of the field by
//! +/- the Eq.-4 image of the shear setting, so the two arms are separated
//! by `sqrt(2) w X_shear` and the two-point correlation
//!
//! ```text
//! Phi(e) = E(e + d) E*(e - d),   d = (w/sqrt(2)) (X_shear, Y_shear)
//! ```
//!
//! comes out of the four recorded frames by subtraction:
//! `Re Phi = (I_0 - I_cw - I_ccw)/2`, `Im Phi = (I_90 - I_cw - I_ccw)/2`,
//! where the quarter-cycle wave-plate toggle is modeled as an ideal
//! multiplication of one arm by `i`.

use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::fft::shift_sampled_field_pair;
use crate::grid::{FieldGrid, ScalarField};
use crate::pgm;

/// Tilted glass block mounted on the rotation stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlassBlock {
    refractive_index_mu: f64,
    thickness_s: f64,
    mount_arm_l: f64,
    scale_reading_t: f64,
}

impl GlassBlock {
    /// Validates `1 < mu <= 2`, positive thickness and arm length.
    pub fn new(
        refractive_index_mu: f64,
        thickness_s: f64,
        mount_arm_l: f64,
        scale_reading_t: f64,
    ) -> Result<Self> {
        if !(refractive_index_mu > 1.0 && refractive_index_mu <= 2.0) {
            return Err(Error::Domain(format!(
                "refractive index must lie in (1, 2], got {refractive_index_mu}"
            )));
        }
        if !(thickness_s > 0.0) {
            return Err(Error::Domain(format!("thickness must be positive, got {thickness_s}")));
        }
        if !(mount_arm_l > 0.0) {
            return Err(Error::Domain(format!("mount arm must be positive, got {mount_arm_l}")));
        }
        if !scale_reading_t.is_finite() {
            return Err(Error::Domain("scale reading must be finite".into()));
        }
        Ok(GlassBlock { refractive_index_mu, thickness_s, mount_arm_l, scale_reading_t })
    }

    pub fn mu(&self) -> f64 {
        self.refractive_index_mu
    }

    pub fn thickness(&self) -> f64 {
        self.thickness_s
    }

    pub fn mount_arm(&self) -> f64 {
        self.mount_arm_l
    }

    pub fn scale_reading(&self) -> f64 {
        self.scale_reading_t
    }

    pub fn with_reading(&self, t: f64) -> Result<Self> {
        GlassBlock::new(self.refractive_index_mu, self.thickness_s, self.mount_arm_l, t)
    }

    /// Incidence angle set by the stage reading, `i = atan(t / l)`.
    pub fn incidence_angle(&self) -> f64 {
        (self.scale_reading_t / self.mount_arm_l).atan()
    }
}

/// Exact lateral displacement of the beam through the block:
/// `i = atan(t/l)`, `sin r = sin i / mu`, `d = s sin(i - r) / cos r`.
pub fn shear_exact(block: &GlassBlock) -> Result<f64> {
    let tan_i = block.scale_reading_t / block.mount_arm_l;
    if tan_i.abs() >= 89.0_f64.to_radians().tan() {
        return Err(Error::Domain(format!(
            "stage reading implies near-grazing incidence (tan i = {tan_i})"
        )));
    }
    let i = tan_i.atan();
    let r = (i.sin() / block.refractive_index_mu).asin();
    Ok(block.thickness_s * (i - r).sin() / r.cos())
}

/// Small-angle limit of [`shear_exact`]: `d = (s t / l)(1 - 1/mu)`.
pub fn shear_paraxial(block: &GlassBlock) -> f64 {
    block.thickness_s * block.scale_reading_t / block.mount_arm_l
        * (1.0 - 1.0 / block.refractive_index_mu)
}

/// Maximum calibrated tilt of the block.
pub const MAX_TILT_DEG: f64 = 3.0;

/// Calibration curve `(t, X_shear)` over a list of stage readings, using the
/// exact ray trace and the Eq.-4 position scaling `X = sqrt(2) d / w`.
///
/// Readings implying a tilt beyond [`MAX_TILT_DEG`] are a range error.
pub fn calibration_curve(
    block: &GlassBlock,
    t_values: &[f64],
    waist_w: f64,
) -> Result<Vec<(f64, f64)>> {
    if !(waist_w > 0.0) {
        return Err(Error::Domain(format!("waist must be positive, got {waist_w}")));
    }
    let max_tan = (MAX_TILT_DEG.to_radians()).tan() * (1.0 + 1e-9);
    let mut curve = Vec::with_capacity(t_values.len());
    for &t in t_values {
        let b = block.with_reading(t)?;
        if (t / b.mount_arm_l).abs() > max_tan {
            return Err(Error::Range(format!(
                "stage reading {t} tilts the block beyond the calibrated {MAX_TILT_DEG} degrees"
            )));
        }
        let d = shear_exact(&b)?;
        curve.push((t, std::f64::consts::SQRT_2 * d / waist_w));
    }
    Ok(curve)
}

/// Dimensionless lateral displacement of each interferometer arm along the
/// two transverse axes. Bounded by the calibrated range `|.| <= 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearSetting {
    pub x_shear: f64,
    pub y_shear: f64,
}

impl ShearSetting {
    pub fn new(x_shear: f64, y_shear: f64) -> Result<Self> {
        if !(x_shear.abs() <= 2.0 && y_shear.abs() <= 2.0)
            || !x_shear.is_finite()
            || !y_shear.is_finite()
        {
            return Err(Error::Range(format!(
                "shear ({x_shear}, {y_shear}) outside the calibrated range |X|,|Y| <= 2"
            )));
        }
        Ok(ShearSetting { x_shear, y_shear })
    }

    pub const ZERO: ShearSetting = ShearSetting { x_shear: 0.0, y_shear: 0.0 };
}

/// Additive per-pixel Gaussian noise, expressed as a fraction of the peak
/// frame intensity. Deterministic under `seed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub gaussian_sigma: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(gaussian_sigma: f64, seed: u64) -> Result<Self> {
        if !(gaussian_sigma >= 0.0) {
            return Err(Error::Domain(format!("sigma must be >= 0, got {gaussian_sigma}")));
        }
        Ok(NoiseModel { gaussian_sigma, seed })
    }

    pub const NONE: NoiseModel = NoiseModel { gaussian_sigma: 0.0, seed: 0 };
}

/// The four camera frames recorded at one shear setting.
#[derive(Debug, Clone)]
pub struct InterferogramSet {
    pub i_cw: ScalarField,
    pub i_ccw: ScalarField,
    pub i_phase0: ScalarField,
    pub i_phase90: ScalarField,
    pub shear: ShearSetting,
}

/// Complex two-point correlation over center coordinates at one fixed shear.
#[derive(Debug, Clone)]
pub struct TPCFRecord {
    n: usize,
    spacing: f64,
    values: Vec<Complex64>,
    shear: ShearSetting,
    /// Mean power of the two individual arms, used downstream to normalize
    /// reconstructed slices independently of the camera's intensity scale.
    beam_power: f64,
}

impl TPCFRecord {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn shear(&self) -> ShearSetting {
        self.shear
    }

    pub fn beam_power(&self) -> f64 {
        self.beam_power
    }

    pub fn value(&self, row: usize, col: usize) -> Complex64 {
        self.values[row * self.n + col]
    }
}

/// Synthesize the four interferogram frames for one shear setting.
///
/// Each arm is displaced by the Eq.-4 image of the setting,
/// `d = (w/sqrt(2)) (X_shear, Y_shear)`, one arm by `+d` and the other by
/// `-d`. The displacement must stay within a quarter of the grid extent.
pub fn synthesize_interferograms(
    field: &FieldGrid,
    waist_w: f64,
    shear: &ShearSetting,
    noise: &NoiseModel,
) -> Result<InterferogramSet> {
    if !(waist_w > 0.0) {
        return Err(Error::Domain(format!("waist must be positive, got {waist_w}")));
    }
    let dx = waist_w / std::f64::consts::SQRT_2 * shear.x_shear;
    let dy = waist_w / std::f64::consts::SQRT_2 * shear.y_shear;
    let quarter = field.extent() / 4.0;
    if dx.abs() > quarter || dy.abs() > quarter {
        return Err(Error::Config(format!(
            "shear displacement ({dx:.4}, {dy:.4}) exceeds a quarter of the grid extent {:.4}",
            field.extent()
        )));
    }

    let n = field.n();
    let (plus, minus) = shift_sampled_field_pair(field.samples(), n, field.spacing(), dx, dy);

    let mut i_cw = Vec::with_capacity(n * n);
    let mut i_ccw = Vec::with_capacity(n * n);
    let mut i_p0 = Vec::with_capacity(n * n);
    let mut i_p90 = Vec::with_capacity(n * n);
    for (ep, em) in plus.iter().zip(&minus) {
        i_cw.push(ep.norm_sqr());
        i_ccw.push(em.norm_sqr());
        i_p0.push((ep + em).norm_sqr());
        i_p90.push((ep + Complex64::i() * em).norm_sqr());
    }

    if noise.gaussian_sigma > 0.0 {
        let peak = i_cw
            .iter()
            .chain(&i_ccw)
            .chain(&i_p0)
            .chain(&i_p90)
            .copied()
            .fold(0.0, f64::max);
        let normal = Normal::new(0.0, noise.gaussian_sigma * peak)
            .map_err(|e| Error::Domain(format!("noise model: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
        // one stream, frames in fixed order, clipped at zero
        for frame in [&mut i_cw, &mut i_ccw, &mut i_p0, &mut i_p90] {
            for v in frame.iter_mut() {
                *v = (*v + normal.sample(&mut rng)).max(0.0);
            }
        }
    }

    let h = field.spacing();
    Ok(InterferogramSet {
        i_cw: ScalarField::new(n, h, i_cw)?,
        i_ccw: ScalarField::new(n, h, i_ccw)?,
        i_phase0: ScalarField::new(n, h, i_p0)?,
        i_phase90: ScalarField::new(n, h, i_p90)?,
        shear: *shear,
    })
}

/// Dark-background level of a frame, measured outside the inscribed circle
/// (the corner regions, which the sheared beams never reach). This is the
/// mean pedestal a clipped noisy camera frame carries; it is numerically
/// zero for noiseless synthetic frames.
fn background_level(frame: &ScalarField) -> f64 {
    let n = frame.n() as isize;
    let half = n / 2;
    let r2_min = {
        let r = 0.45 * n as f64;
        r * r
    };
    let mut sum = 0.0;
    let mut count = 0usize;
    for row in 0..n {
        let dy = (row - half) as f64;
        for col in 0..n {
            let dx = (col - half) as f64;
            if dx * dx + dy * dy > r2_min {
                sum += frame.value(row as usize, col as usize);
                count += 1;
            }
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Recover the complex TPCF from the four frames by subtracting the two
/// individual beam components.
///
/// Each frame first loses its dark-background pedestal; without this the
/// rectified noise floor of a clipped camera frame would both inflate the
/// recorded arm powers and bias the correlation toward negative values.
pub fn extract_tpcf(frames: &InterferogramSet) -> Result<TPCFRecord> {
    let n = frames.i_cw.n();
    let spacing = frames.i_cw.spacing();
    for (name, f) in [
        ("i_ccw", &frames.i_ccw),
        ("i_phase0", &frames.i_phase0),
        ("i_phase90", &frames.i_phase90),
    ] {
        if f.n() != n {
            return Err(Error::Config(format!("frame {name} has size {} != {n}", f.n())));
        }
    }
    let peak = frames
        .i_phase0
        .max()
        .max(frames.i_cw.max())
        .max(frames.i_ccw.max())
        .max(frames.i_phase90.max());
    let floor = -1e-6 * peak;
    for (name, f) in [
        ("i_cw", &frames.i_cw),
        ("i_ccw", &frames.i_ccw),
        ("i_phase0", &frames.i_phase0),
        ("i_phase90", &frames.i_phase90),
    ] {
        let min = f.min();
        if min < floor {
            return Err(Error::DataIntegrity(format!(
                "frame {name} holds negative intensity {min:.3e} beyond the noise tolerance"
            )));
        }
    }

    let b_cw = background_level(&frames.i_cw);
    let b_ccw = background_level(&frames.i_ccw);
    let b_p0 = background_level(&frames.i_phase0);
    let b_p90 = background_level(&frames.i_phase90);

    let mut values = Vec::with_capacity(n * n);
    for i in 0..n * n {
        let cw = frames.i_cw.values()[i] - b_cw;
        let ccw = frames.i_ccw.values()[i] - b_ccw;
        let re = (frames.i_phase0.values()[i] - b_p0 - cw - ccw) / 2.0;
        let im = (frames.i_phase90.values()[i] - b_p90 - cw - ccw) / 2.0;
        values.push(Complex64::new(re, im));
    }
    let cell = spacing * spacing;
    let p_cw: f64 =
        frames.i_cw.values().iter().map(|v| v - b_cw).sum::<f64>() * cell;
    let p_ccw: f64 =
        frames.i_ccw.values().iter().map(|v| v - b_ccw).sum::<f64>() * cell;
    Ok(TPCFRecord {
        n,
        spacing,
        values,
        shear: frames.shear,
        beam_power: 0.5 * (p_cw + p_ccw),
    })
}

const FRAME_NAMES: [&str; 4] = ["i_cw", "i_ccw", "i_phase0", "i_phase90"];

/// Write the four frames of a set as 16-bit PGM files plus a sidecar.
///
/// All four frames share one quantization scale so their differences stay
/// meaningful; the absolute scale cancels downstream against the recorded
/// arm powers.
pub fn write_interferograms(dir: &Path, frames: &InterferogramSet, seed: u64) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let peak = frames
        .i_cw
        .max()
        .max(frames.i_ccw.max())
        .max(frames.i_phase0.max())
        .max(frames.i_phase90.max());
    let scale = if peak > 0.0 { 65535.0 / peak } else { 0.0 };
    let n = frames.i_cw.n();
    for (name, f) in FRAME_NAMES
        .iter()
        .zip([&frames.i_cw, &frames.i_ccw, &frames.i_phase0, &frames.i_phase90])
    {
        let data: Vec<u16> = f
            .values()
            .iter()
            .map(|&v| (v * scale).round().clamp(0.0, 65535.0) as u16)
            .collect();
        pgm::write_pgm16(&dir.join(format!("{name}.pgm")), n, n, &data)?;
    }
    let sidecar = [
        ("x_shear".to_string(), format!("{:.17e}", frames.shear.x_shear)),
        ("y_shear".to_string(), format!("{:.17e}", frames.shear.y_shear)),
        ("seed".to_string(), format!("{seed}")),
        ("pixel_pitch_um".to_string(), format!("{:.17e}", frames.i_cw.spacing())),
    ];
    pgm::write_sidecar(&dir.join("sidecar.txt"), &sidecar)
}

/// Read a frame set written by [`write_interferograms`], or externally
/// recorded frames in the same container.
pub fn read_interferograms(dir: &Path) -> Result<InterferogramSet> {
    let sidecar = pgm::read_sidecar(&dir.join("sidecar.txt"))?;
    let lookup = |key: &str| -> Result<f64> {
        sidecar
            .iter()
            .find(|(k, _)| k == key)
            .ok_or_else(|| Error::parse(dir.join("sidecar.txt"), format!("missing key {key}")))?
            .1
            .parse::<f64>()
            .map_err(|e| Error::parse(dir.join("sidecar.txt"), format!("bad {key}: {e}")))
    };
    let shear = ShearSetting::new(lookup("x_shear")?, lookup("y_shear")?)?;
    let spacing = lookup("pixel_pitch_um")?;
    if !(spacing > 0.0) {
        return Err(Error::parse(dir.join("sidecar.txt"), "pixel_pitch_um must be positive"));
    }
    let mut fields = Vec::with_capacity(4);
    for name in FRAME_NAMES {
        let path = dir.join(format!("{name}.pgm"));
        let (w, h, data) = pgm::read_pgm16(&path)?;
        if w != h {
            return Err(Error::parse(path, format!("expected a square frame, got {w}x{h}")));
        }
        let values = data.iter().map(|&v| v as f64).collect();
        fields.push(ScalarField::new(w, spacing, values)?);
    }
    let i_phase90 = fields.pop().unwrap();
    let i_phase0 = fields.pop().unwrap();
    let i_ccw = fields.pop().unwrap();
    let i_cw = fields.pop().unwrap();
    if i_ccw.n() != i_cw.n() || i_phase0.n() != i_cw.n() || i_phase90.n() != i_cw.n() {
        return Err(Error::Config("frame sizes differ within one set".into()));
    }
    Ok(InterferogramSet { i_cw, i_ccw, i_phase0, i_phase90, shear })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lg::{lg_amplitude, lg_field, BeamSpec, GridSpec};

    const W: f64 = 1.0;

    fn beam(n: i32) -> BeamSpec {
        BeamSpec::new(W, 0.5328e-3, n, 0).unwrap()
    }

    fn grid(n: usize, extent: f64) -> GridSpec {
        GridSpec::new(n, extent / n as f64)
    }

    fn block(mu: f64, t: f64) -> GlassBlock {
        GlassBlock::new(mu, 1.0, 5.2, t).unwrap()
    }

    #[test]
    fn shear_zero_reading_gives_zero() {
        assert_eq!(shear_exact(&block(1.5, 0.0)).unwrap(), 0.0);
        assert_eq!(shear_paraxial(&block(1.5, 0.0)), 0.0);
    }

    #[test]
    fn shear_exact_vs_paraxial_at_three_degrees() {
        // t chosen so i = 3 degrees at l = 5.2
        let t = 5.2 * 3.0_f64.to_radians().tan();
        let b = block(1.5, t);
        let i = (t / 5.2).atan();
        let r = (i.sin() / 1.5).asin();
        let oracle = 1.0 * (i - r).sin() / r.cos();
        let exact = shear_exact(&b).unwrap();
        assert!((exact - oracle).abs() < 1e-15);
        let par = shear_paraxial(&b);
        assert!(exact > par, "exact trace exceeds the linear limit");
        assert!((exact - par) / exact < 0.002);
    }

    #[test]
    fn shear_paraxial_closed_form() {
        let b = block(1.5, 0.52);
        // (1.0 * 0.52 / 5.2) * (1 - 1/1.5) = 0.1 / 3
        assert!((shear_paraxial(&b) - 0.1 / 3.0).abs() < 1e-15);
        let exact = shear_exact(&b).unwrap();
        assert!(((exact - shear_paraxial(&b)) / exact).abs() < 0.005);
    }

    #[test]
    fn shear_is_odd_and_paraxial_linear() {
        let b = block(1.5, 0.2);
        let bm = block(1.5, -0.2);
        assert!((shear_exact(&b).unwrap() + shear_exact(&bm).unwrap()).abs() < 1e-15);
        let b2 = block(1.5, 0.1);
        assert!((shear_paraxial(&b) - 2.0 * shear_paraxial(&b2)).abs() < 1e-15);
    }

    #[test]
    fn paraxial_accuracy_over_calibrated_range() {
        for mu10 in 14..=16 {
            let mu = mu10 as f64 / 10.0;
            for k in 1..=12 {
                let deg = 0.25 * k as f64;
                let t = 5.2 * deg.to_radians().tan();
                let b = block(mu, t);
                let exact = shear_exact(&b).unwrap();
                let par = shear_paraxial(&b);
                assert!(
                    ((exact - par) / exact).abs() < 0.005,
                    "mu={mu} i={deg} deg: exact {exact} paraxial {par}"
                );
            }
        }
    }

    #[test]
    fn glass_block_validation() {
        assert!(GlassBlock::new(1.0, 1.0, 5.2, 0.0).is_err());
        assert!(GlassBlock::new(2.5, 1.0, 5.2, 0.0).is_err());
        assert!(GlassBlock::new(1.5, -1.0, 5.2, 0.0).is_err());
        assert!(GlassBlock::new(1.5, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn calibration_curve_odd_and_monotone() {
        let b = block(1.5, 0.0);
        let tmax = 5.2 * 3.0_f64.to_radians().tan();
        let ts: Vec<f64> = (-5..=5).map(|k| tmax * k as f64 / 5.0).collect();
        let curve = calibration_curve(&b, &ts, W).unwrap();
        assert_eq!(curve.len(), 11);
        for k in 0..curve.len() {
            let (t, x) = curve[k];
            let (tm, xm) = curve[curve.len() - 1 - k];
            assert!((t + tm).abs() < 1e-12 && (x + xm).abs() < 1e-12, "curve not odd");
        }
        for pair in curve.windows(2) {
            assert!(pair[1].1 > pair[0].1, "curve not monotone");
        }
        assert_eq!(calibration_curve(&b, &[0.0], W).unwrap()[0].1, 0.0);
    }

    #[test]
    fn calibration_curve_linear_fit_residual() {
        let b = block(1.5, 0.0);
        let tmax = 5.2 * 3.0_f64.to_radians().tan();
        let ts: Vec<f64> = (-10..=10).map(|k| tmax * k as f64 / 10.0).collect();
        let curve = calibration_curve(&b, &ts, W).unwrap();
        // least-squares slope through the origin (the curve is odd)
        let sxy: f64 = curve.iter().map(|(t, x)| t * x).sum();
        let sxx: f64 = curve.iter().map(|(t, _)| t * t).sum();
        let slope = sxy / sxx;
        let full_scale = curve.last().unwrap().1;
        for (t, x) in &curve {
            assert!((x - slope * t).abs() < 0.005 * full_scale.abs());
        }
        // slope close to the paraxial prediction sqrt(2)/w * (s/l)(1 - 1/mu)
        let predicted = std::f64::consts::SQRT_2 / W * (1.0 / 5.2) * (1.0 - 1.0 / 1.5);
        assert!(((slope - predicted) / predicted).abs() < 0.005);
    }

    #[test]
    fn calibration_rejects_overtilt() {
        let b = block(1.5, 0.0);
        let t_bad = 5.2 * 3.2_f64.to_radians().tan();
        assert!(matches!(calibration_curve(&b, &[t_bad], W), Err(Error::Range(_))));
    }

    #[test]
    fn shear_setting_range() {
        assert!(ShearSetting::new(2.0, -2.0).is_ok());
        assert!(ShearSetting::new(2.1, 0.0).is_err());
        assert!(ShearSetting::new(0.0, f64::NAN).is_err());
    }

    #[test]
    fn zero_shear_gaussian_constructive() {
        let f = lg_field(&beam(0), &grid(128, 8.0)).unwrap();
        let set =
            synthesize_interferograms(&f, W, &ShearSetting::ZERO, &NoiseModel::NONE).unwrap();
        let peak = set.i_cw.max();
        for i in 0..set.i_cw.values().len() {
            let a = set.i_phase0.values()[i];
            let b = 4.0 * set.i_cw.values()[i];
            assert!((a - b).abs() < 1e-10 * peak);
        }
    }

    #[test]
    fn zero_shear_vortex_ring() {
        let f = lg_field(&beam(1), &grid(128, 8.0)).unwrap();
        let set =
            synthesize_interferograms(&f, W, &ShearSetting::ZERO, &NoiseModel::NONE).unwrap();
        let c = 64;
        let peak = set.i_phase0.max();
        assert!(set.i_phase0.value(c, c) < 1e-9 * peak, "no dark core");
        // bright ring: the peak sits off-center near r = w/sqrt(2)
        assert!(peak > 0.0);
        let ring = set.i_phase0.value(c, c + (0.7 / set.i_phase0.spacing()) as usize);
        assert!(ring > 0.5 * peak);
    }

    #[test]
    fn interferograms_respect_intensity_bound() {
        let f = lg_field(&beam(2), &grid(128, 8.0)).unwrap();
        let shear = ShearSetting::new(0.4, -0.3).unwrap();
        let set = synthesize_interferograms(&f, W, &shear, &NoiseModel::NONE).unwrap();
        for i in 0..set.i_cw.values().len() {
            let bound = (set.i_cw.values()[i].sqrt() + set.i_ccw.values()[i].sqrt()).powi(2);
            assert!(set.i_phase0.values()[i] <= bound + 1e-12);
            assert!(set.i_phase90.values()[i] <= bound + 1e-12);
        }
    }

    #[test]
    fn shear_outside_grid_is_rejected() {
        let f = lg_field(&beam(0), &grid(64, 4.5)).unwrap();
        // displacement 2 * w/sqrt(2) = 1.414 > extent/4 = 1.125
        let shear = ShearSetting::new(2.0, 0.0).unwrap();
        assert!(matches!(
            synthesize_interferograms(&f, W, &shear, &NoiseModel::NONE),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn extract_zero_shear_is_intensity() {
        let f = lg_field(&beam(1), &grid(128, 8.0)).unwrap();
        let set =
            synthesize_interferograms(&f, W, &ShearSetting::ZERO, &NoiseModel::NONE).unwrap();
        let tpcf = extract_tpcf(&set).unwrap();
        let peak = set.i_cw.max();
        for (i, v) in tpcf.values().iter().enumerate() {
            let intensity = f.samples()[i].norm_sqr();
            assert!((v.re - intensity).abs() < 1e-10 * peak);
            assert!(v.im.abs() < 1e-10 * peak);
        }
        assert!((tpcf.beam_power() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn extract_matches_two_point_product() {
        // round trip against the analytic product at a nonzero shear
        let g = grid(256, 12.0);
        for order in [0, 1, 2, 3] {
            let f = lg_field(&beam(order), &g).unwrap();
            let shear = ShearSetting::new(0.2, 0.0).unwrap();
            let set = synthesize_interferograms(&f, W, &shear, &NoiseModel::NONE).unwrap();
            let tpcf = extract_tpcf(&set).unwrap();

            let spec = beam(order);
            let raw = lg_field(&spec, &g).unwrap();
            // normalization constant of the sampled unit-power field
            let norm = {
                let mut acc = 0.0;
                let half = (g.n / 2) as f64;
                for row in 0..g.n {
                    for col in 0..g.n {
                        let x = (col as f64 - half) * g.spacing;
                        let y = (row as f64 - half) * g.spacing;
                        acc += lg_amplitude(&spec, x, y).norm_sqr();
                    }
                }
                1.0 / (acc * g.spacing * g.spacing).sqrt()
            };
            let _ = raw;
            let dxs = W / std::f64::consts::SQRT_2 * shear.x_shear;
            let half = (g.n / 2) as f64;
            let mut max_err = 0.0f64;
            let mut max_abs = 0.0f64;
            for row in 0..g.n {
                let y = (row as f64 - half) * g.spacing;
                for col in 0..g.n {
                    let x = (col as f64 - half) * g.spacing;
                    let ep = lg_amplitude(&spec, x + dxs, y) * norm;
                    let em = lg_amplitude(&spec, x - dxs, y) * norm;
                    let oracle = ep * em.conj();
                    let got = tpcf.value(row, col);
                    max_err = max_err.max((got - oracle).norm());
                    max_abs = max_abs.max(oracle.norm());
                }
            }
            assert!(
                max_err < 1e-10 * max_abs,
                "order {order}: max error {max_err:.3e} vs scale {max_abs:.3e}"
            );
        }
    }

    #[test]
    fn gaussian_tpcf_is_real() {
        // 12-waist extent keeps the truncated tails below rounding, so the
        // imaginary part is genuinely numerical zero
        let f = lg_field(&beam(0), &grid(192, 12.0)).unwrap();
        let shear = ShearSetting::new(0.35, 0.1).unwrap();
        let set = synthesize_interferograms(&f, W, &shear, &NoiseModel::NONE).unwrap();
        let tpcf = extract_tpcf(&set).unwrap();
        let peak = tpcf.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for v in tpcf.values() {
            assert!(v.im.abs() < 1e-12 * peak);
        }
    }

    #[test]
    fn tpcf_hermitian_under_shear_flip() {
        let f = lg_field(&beam(1), &grid(128, 8.0)).unwrap();
        let sp = ShearSetting::new(0.3, -0.2).unwrap();
        let sm = ShearSetting::new(-0.3, 0.2).unwrap();
        let tp = extract_tpcf(
            &synthesize_interferograms(&f, W, &sp, &NoiseModel::NONE).unwrap(),
        )
        .unwrap();
        let tm = extract_tpcf(
            &synthesize_interferograms(&f, W, &sm, &NoiseModel::NONE).unwrap(),
        )
        .unwrap();
        let peak = tp.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (a, b) in tp.values().iter().zip(tm.values()) {
            assert!((a - b.conj()).norm() < 1e-10 * peak);
        }
    }

    #[test]
    fn tpcf_bounded_by_geometric_mean() {
        let f = lg_field(&beam(1), &grid(128, 8.0)).unwrap();
        let shear = ShearSetting::new(0.25, 0.0).unwrap();
        let set = synthesize_interferograms(&f, W, &shear, &NoiseModel::NONE).unwrap();
        let tpcf = extract_tpcf(&set).unwrap();
        let peak = set.i_cw.max();
        for i in 0..tpcf.values().len() {
            let bound = (set.i_cw.values()[i] * set.i_ccw.values()[i]).sqrt();
            assert!(tpcf.values()[i].norm() <= bound + 1e-10 * peak);
        }
    }

    #[test]
    fn noise_amplitude_calibrated() {
        let f = lg_field(&beam(0), &grid(512, 8.0)).unwrap();
        let sigma = 0.01;
        let clean =
            synthesize_interferograms(&f, W, &ShearSetting::ZERO, &NoiseModel::NONE).unwrap();
        let noisy = synthesize_interferograms(
            &f,
            W,
            &ShearSetting::ZERO,
            &NoiseModel::new(sigma, 99).unwrap(),
        )
        .unwrap();
        let peak = clean
            .i_cw
            .max()
            .max(clean.i_ccw.max())
            .max(clean.i_phase0.max())
            .max(clean.i_phase90.max());
        // restrict to pixels where clipping at zero cannot bite
        let mut diffs = Vec::new();
        for i in 0..clean.i_phase0.values().len() {
            if clean.i_phase0.values()[i] >= 5.0 * sigma * peak {
                diffs.push(noisy.i_phase0.values()[i] - clean.i_phase0.values()[i]);
            }
        }
        assert!(diffs.len() > 10_000, "not enough unclipped pixels: {}", diffs.len());
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        let var =
            diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (diffs.len() - 1) as f64;
        let std = var.sqrt();
        assert!(
            (std - sigma * peak).abs() < 0.05 * sigma * peak,
            "std {std:.4e} vs target {:.4e}",
            sigma * peak
        );
    }

    #[test]
    fn noise_is_deterministic_under_seed() {
        let f = lg_field(&beam(1), &grid(64, 8.0)).unwrap();
        let nm = NoiseModel::new(0.02, 1234).unwrap();
        let a = synthesize_interferograms(&f, W, &ShearSetting::ZERO, &nm).unwrap();
        let b = synthesize_interferograms(&f, W, &ShearSetting::ZERO, &nm).unwrap();
        assert_eq!(a.i_phase90.values(), b.i_phase90.values());
        let c = synthesize_interferograms(
            &f,
            W,
            &ShearSetting::ZERO,
            &NoiseModel::new(0.02, 1235).unwrap(),
        )
        .unwrap();
        assert_ne!(a.i_phase90.values(), c.i_phase90.values());
    }

    #[test]
    fn extract_rejects_negative_frames() {
        let f = lg_field(&beam(0), &grid(64, 8.0)).unwrap();
        let mut set =
            synthesize_interferograms(&f, W, &ShearSetting::ZERO, &NoiseModel::NONE).unwrap();
        let peak = set.i_cw.max();
        set.i_cw.values_mut()[10] = -0.1 * peak;
        assert!(matches!(extract_tpcf(&set), Err(Error::DataIntegrity(_))));
    }

    #[test]
    fn frame_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let f = lg_field(&beam(1), &grid(64, 8.0)).unwrap();
        let shear = ShearSetting::new(0.2, 0.0).unwrap();
        let set = synthesize_interferograms(&f, W, &shear, &NoiseModel::NONE).unwrap();
        write_interferograms(dir.path(), &set, 7).unwrap();
        let back = read_interferograms(dir.path()).unwrap();
        assert_eq!(back.i_cw.n(), 64);
        assert_eq!(back.shear, shear);
        // quantized to a shared 16-bit scale
        let peak = set
            .i_cw
            .max()
            .max(set.i_ccw.max())
            .max(set.i_phase0.max())
            .max(set.i_phase90.max());
        let scale = 65535.0 / peak;
        for (a, b) in set.i_phase0.values().iter().zip(back.i_phase0.values()) {
            assert!((a * scale - b).abs() <= 0.5 + 1e-9);
        }
    }
}

// temporary probe (deleted after measurement)
#[test]
fn probe_tpcf_noise() {
    use crate::lg::{lg_field, BeamSpec, GridSpec};
    let g = GridSpec::new(512, 8.0 / 512.0);
    let beam = BeamSpec::new(1.0, 0.5328e-3, 1, 0).unwrap();
    let f = lg_field(&beam, &g).unwrap();
    let shear = ShearSetting::new(0.2, 0.0).unwrap();
    let clean_frames = synthesize_interferograms(&f, 1.0, &shear, &NoiseModel::NONE).unwrap();
    let noisy_frames = synthesize_interferograms(&f, 1.0, &shear, &NoiseModel::new(0.01, 3).unwrap()).unwrap();
    let peak = clean_frames.i_cw.max().max(clean_frames.i_ccw.max()).max(clean_frames.i_phase0.max()).max(clean_frames.i_phase90.max());
    println!("PROBE 4-frame peak = {peak:.4}, sigma_abs = {:.4}", 0.01 * peak);
    let clean = extract_tpcf(&clean_frames).unwrap();
    let noisy = extract_tpcf(&noisy_frames).unwrap();
    println!("PROBE beam_power clean = {:.5}, noisy = {:.5}", clean.beam_power(), noisy.beam_power());
    let mut dre = Vec::new();
    for (a, b) in noisy.values().iter().zip(clean.values()) {
        dre.push(a.re - b.re);
    }
    let nn = dre.len() as f64;
    let mean = dre.iter().sum::<f64>() / nn;
    let var = dre.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (nn - 1.0);
    println!("PROBE tpcf re-noise: mean = {:+.3e}, std = {:.3e} (predicted white {:.3e})", mean, var.sqrt(), 0.866 * 0.01 * peak);
}

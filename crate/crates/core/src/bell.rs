//! Continuous-variable Bell-CHSH analysis on parity values.
//!
//! The Bell parameter combines four displaced-parity expectations
//! `Pi = pi^2 W` at two setting pairs per party:
//!
//! ```text
//! B = Pi(a, b) + Pi(a, b') + Pi(a', b) - Pi(a', b')
//! ```
//!
//! with `a = (X1, P_X1)`, `a' = (X2, P_X2)`, `b = (Y1, P_Y1)`,
//! `b' = (Y2, P_Y2)`. `|B| <= 2` for any separable field; the vortex modes
//! exceed it. The objective is invariant under a simultaneous rotation of
//! all four `(position, momentum)` pairs by one angle, which the maximizer
//! uses to pin `P_X1 = 0`, `X1 >= 0`.

use crate::error::{Error, Result};
use crate::optim::nelder_mead;
use crate::reconstruct::WignerSlice;
use crate::wigner::{pi_unchecked, pi_value, QuadraturePoint, MAX_AZIMUTHAL, MAX_RADIAL};

/// The four phase-space setting pairs entering one Bell parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellSettings {
    /// `(X1, P_X1)`
    pub point_a: (f64, f64),
    /// `(Y1, P_Y1)`
    pub point_b: (f64, f64),
    /// `(X2, P_X2)`
    pub point_a_prime: (f64, f64),
    /// `(Y2, P_Y2)`
    pub point_b_prime: (f64, f64),
}

impl BellSettings {
    /// Order: `(X1, P_X1, X2, P_X2, Y1, P_Y1, Y2, P_Y2)`.
    pub fn from_array(v: [f64; 8]) -> Self {
        BellSettings {
            point_a: (v[0], v[1]),
            point_a_prime: (v[2], v[3]),
            point_b: (v[4], v[5]),
            point_b_prime: (v[6], v[7]),
        }
    }

    pub fn to_array(self) -> [f64; 8] {
        [
            self.point_a.0,
            self.point_a.1,
            self.point_a_prime.0,
            self.point_a_prime.1,
            self.point_b.0,
            self.point_b.1,
            self.point_b_prime.0,
            self.point_b_prime.1,
        ]
    }

    /// Rotate every `(position, momentum)` pair by `theta` and optionally
    /// negate all components; these transformations leave `B` unchanged.
    pub fn symmetry_image(&self, theta: f64, parity_flip: bool) -> Self {
        let (s, c) = theta.sin_cos();
        let sign = if parity_flip { -1.0 } else { 1.0 };
        let rot = |(q, p): (f64, f64)| (sign * (q * c - p * s), sign * (q * s + p * c));
        BellSettings {
            point_a: rot(self.point_a),
            point_b: rot(self.point_b),
            point_a_prime: rot(self.point_a_prime),
            point_b_prime: rot(self.point_b_prime),
        }
    }
}

/// Best Bell value found, with the settings that produced it and optional
/// repetition statistics.
#[derive(Debug, Clone)]
pub struct BellResult {
    /// Signed `B` at `argmax`.
    pub b_value: f64,
    /// `|B|` reported for the run (the mean over repetitions when several
    /// were taken).
    pub b_max: f64,
    pub argmax: BellSettings,
    /// Per-repetition `|B_max|` samples; empty for single deterministic runs.
    pub repetitions: Vec<f64>,
    pub mean: f64,
    pub std_dev: f64,
    /// False when the simplex refinement hit its iteration cap before the
    /// diameter tolerance; the best value seen is still returned.
    pub converged: bool,
}

impl BellResult {
    pub(crate) fn single(b_value: f64, argmax: BellSettings, converged: bool) -> Self {
        let b_max = b_value.abs();
        BellResult {
            b_value,
            b_max,
            argmax,
            repetitions: Vec::new(),
            mean: b_max,
            std_dev: 0.0,
            converged,
        }
    }
}

const PI_BOUND: f64 = 1.0 + 1e-9;

/// Combine four parity values into the CHSH parameter
/// `B = Pi_aa + Pi_ab + Pi_ba - Pi_bb`.
pub fn bell_parameter(pi_aa: f64, pi_ab: f64, pi_ba: f64, pi_bb: f64) -> Result<f64> {
    for (name, v) in [("aa", pi_aa), ("ab", pi_ab), ("ba", pi_ba), ("bb", pi_bb)] {
        if !v.is_finite() || v.abs() > PI_BOUND {
            return Err(Error::DataIntegrity(format!(
                "parity value Pi_{name} = {v} outside [-1, 1]"
            )));
        }
    }
    Ok(pi_aa + pi_ab + pi_ba - pi_bb)
}

/// Signed analytic Bell parameter of the `(n, m)` mode at the given settings.
pub fn bell_parameter_analytic(n: i32, m: u32, settings: &BellSettings) -> Result<f64> {
    let aa = pi_value(n, m, &compose(settings.point_a, settings.point_b))?;
    let ab = pi_value(n, m, &compose(settings.point_a, settings.point_b_prime))?;
    let ba = pi_value(n, m, &compose(settings.point_a_prime, settings.point_b))?;
    let bb = pi_value(n, m, &compose(settings.point_a_prime, settings.point_b_prime))?;
    bell_parameter(aa, ab, ba, bb)
}

fn compose(a: (f64, f64), b: (f64, f64)) -> QuadraturePoint {
    QuadraturePoint::new(a.0, a.1, b.0, b.1)
}

fn bell_fast(n: i32, m: u32, v: &[f64; 8]) -> f64 {
    pi_unchecked(n, m, &QuadraturePoint::new(v[0], v[1], v[4], v[5]))
        + pi_unchecked(n, m, &QuadraturePoint::new(v[0], v[1], v[6], v[7]))
        + pi_unchecked(n, m, &QuadraturePoint::new(v[2], v[3], v[4], v[5]))
        - pi_unchecked(n, m, &QuadraturePoint::new(v[2], v[3], v[6], v[7]))
}

/// Settings of the two-variable pattern: `a = (0,0)`, `a' = (X, 0)`,
/// `b = (0,0)`, `b' = (0, P_Y)`.
pub fn two_param_settings(x: f64, p_y: f64) -> BellSettings {
    BellSettings::from_array([0.0, 0.0, x, 0.0, 0.0, 0.0, 0.0, p_y])
}

/// `|B|` surface of the two-variable pattern over an `(X, P_Y)` grid,
/// row-major with the `X` index as the row.
pub fn bell_two_param_surface_analytic(
    n: i32,
    m: u32,
    x_grid: &[f64],
    p_y_grid: &[f64],
) -> Result<Vec<f64>> {
    validate_orders(n, m)?;
    for &v in x_grid.iter().chain(p_y_grid) {
        if v.abs() > 3.0 {
            return Err(Error::Range(format!("surface coordinate {v} outside |.| <= 3")));
        }
    }
    let mut out = Vec::with_capacity(x_grid.len() * p_y_grid.len());
    for &x in x_grid {
        for &py in p_y_grid {
            out.push(bell_fast(n, m, &two_param_settings(x, py).to_array()).abs());
        }
    }
    Ok(out)
}

fn validate_orders(n: i32, m: u32) -> Result<()> {
    if n.unsigned_abs() > MAX_AZIMUTHAL || m > MAX_RADIAL {
        return Err(Error::Domain(format!("unsupported mode orders n = {n}, m = {m}")));
    }
    Ok(())
}

/// Number of free variables in a maximization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellDimensionality {
    /// The two-variable pattern of [`two_param_settings`].
    Two,
    /// All eight setting components.
    Eight,
}

const SIMPLEX_ITERS: usize = 500;
const SIMPLEX_TOL: f64 = 1e-4;
// refinement polishing runs after the coarse scans
const REFINE_STARTS: usize = 10;

/// Maximize `|B|` of the `(n, m)` mode analytically.
///
/// A deterministic coarse grid scan (0.05 step for the two-variable
/// pattern; a 0.25-step scan over the rotation-pinned seven free variables
/// for the eight-variable problem, plus embeddings of the two-variable
/// optimum) seeds a Nelder-Mead refinement from the best
/// [`REFINE_STARTS`] candidates.
pub fn maximize_bell(n: i32, m: u32, dims: BellDimensionality) -> Result<BellResult> {
    validate_orders(n, m)?;
    match dims {
        BellDimensionality::Two => Ok(maximize_two(n, m)),
        BellDimensionality::Eight => Ok(maximize_eight(n, m)),
    }
}

fn maximize_two(n: i32, m: u32) -> BellResult {
    let axis: Vec<f64> = (0..=40).map(|k| -1.0 + 0.05 * k as f64).collect();
    let mut candidates: Vec<([f64; 2], f64)> = Vec::new();
    for &x in &axis {
        for &py in &axis {
            let b = bell_fast(n, m, &two_param_settings(x, py).to_array()).abs();
            keep_best(&mut candidates, [x, py], b, REFINE_STARTS);
        }
    }
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for (start, _) in &candidates {
        let out = nelder_mead(
            |v| -bell_fast(n, m, &two_param_settings(v[0], v[1]).to_array()).abs(),
            start,
            0.02,
            SIMPLEX_ITERS,
            SIMPLEX_TOL,
        );
        if best.as_ref().map_or(true, |(_, v, _)| -out.value > *v) {
            best = Some((out.x.clone(), -out.value, out.converged));
        }
    }
    let (x, _, converged) = best.unwrap();
    let settings = two_param_settings(x[0], x[1]);
    let b = bell_fast(n, m, &settings.to_array());
    BellResult::single(b, settings, converged)
}

/// Map the seven pinned coordinates to the full eight (gauge `P_X1 = 0`).
fn unpin(v: &[f64]) -> [f64; 8] {
    [v[0], 0.0, v[1], v[2], v[3], v[4], v[5], v[6]]
}

fn maximize_eight(n: i32, m: u32) -> BellResult {
    // coarse deterministic grid over the pinned space; X1 >= 0 by symmetry
    let x1_axis = [0.0, 0.25, 0.5, 0.75];
    let free_axis = [-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75];
    let mut candidates: Vec<([f64; 7], f64)> = Vec::new();
    let mut point = [0.0f64; 7];
    for &x1 in &x1_axis {
        point[0] = x1;
        scan_recursive(n, m, &mut point, 1, &free_axis, &mut candidates);
    }
    // embed the two-variable optimum and its axis swap as extra seeds
    let two = maximize_two(n, m);
    let arr = two.argmax.to_array();
    let extra = [
        [arr[0], arr[2], arr[3], arr[4], arr[5], arr[6], arr[7]],
        [0.0, 0.0, arr[7], 0.0, 0.0, arr[2], 0.0],
    ];
    for e in extra {
        let b = bell_fast(n, m, &unpin(&e)).abs();
        candidates.push((e, b));
    }

    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for (start, _) in &candidates {
        let out = nelder_mead(
            |v| -bell_fast(n, m, &unpin(v)).abs(),
            start,
            0.05,
            SIMPLEX_ITERS,
            SIMPLEX_TOL,
        );
        if best.as_ref().map_or(true, |(_, v, _)| -out.value > *v) {
            best = Some((out.x.clone(), -out.value, out.converged));
        }
    }
    let (x, _, converged) = best.unwrap();
    let settings = BellSettings::from_array(unpin(&x));
    let b = bell_fast(n, m, &settings.to_array());
    BellResult::single(b, settings, converged)
}

fn scan_recursive(
    n: i32,
    m: u32,
    point: &mut [f64; 7],
    depth: usize,
    axis: &[f64],
    candidates: &mut Vec<([f64; 7], f64)>,
) {
    if depth == 7 {
        let b = bell_fast(n, m, &unpin(point)).abs();
        keep_best(candidates, *point, b, REFINE_STARTS);
        return;
    }
    for &v in axis {
        point[depth] = v;
        scan_recursive(n, m, point, depth + 1, axis, candidates);
    }
}

fn keep_best<const D: usize>(
    candidates: &mut Vec<([f64; D], f64)>,
    point: [f64; D],
    value: f64,
    cap: usize,
) {
    if candidates.len() < cap {
        candidates.push((point, value));
        candidates.sort_by(|a, b| b.1.total_cmp(&a.1));
        return;
    }
    if value > candidates[cap - 1].1 {
        candidates[cap - 1] = (point, value);
        candidates.sort_by(|a, b| b.1.total_cmp(&a.1));
    }
}

/// The four reconstructed slices entering one Bell evaluation; `s_ij` was
/// taken at shear `(X_i, Y_j)`.
#[derive(Debug, Clone)]
pub struct SliceQuartet {
    pub s11: WignerSlice,
    pub s12: WignerSlice,
    pub s21: WignerSlice,
    pub s22: WignerSlice,
}

impl SliceQuartet {
    /// The `(X1, X2, Y1, Y2)` shear coordinates the slices were taken at.
    pub fn shears(&self) -> Result<(f64, f64, f64, f64)> {
        let x1 = self.s11.x_fixed();
        let x2 = self.s21.x_fixed();
        let y1 = self.s11.y_fixed();
        let y2 = self.s12.y_fixed();
        let consistent = self.s12.x_fixed() == x1
            && self.s22.x_fixed() == x2
            && self.s21.y_fixed() == y1
            && self.s22.y_fixed() == y2;
        if !consistent {
            return Err(Error::Config(
                "slice quartet shears do not form an (X1, X2) x (Y1, Y2) pattern".into(),
            ));
        }
        Ok((x1, x2, y1, y2))
    }
}

const PI2: f64 = std::f64::consts::PI * std::f64::consts::PI;

/// Assemble `B` from four reconstructed slices at the given momenta
/// `(P_X1, P_X2, P_Y1, P_Y2)`, interpolating bilinearly between momentum
/// nodes.
pub fn bell_from_slices(
    quartet: &SliceQuartet,
    momenta: (f64, f64, f64, f64),
) -> Result<f64> {
    quartet.shears()?;
    let (px1, px2, py1, py2) = momenta;
    let aa = PI2 * quartet.s11.value_at(px1, py1)?;
    let ab = PI2 * quartet.s12.value_at(px1, py2)?;
    let ba = PI2 * quartet.s21.value_at(px2, py1)?;
    let bb = PI2 * quartet.s22.value_at(px2, py2)?;
    Ok(aa + ab + ba - bb)
}

/// The full Bell parameter as a four-dimensional array over the slice
/// momentum nodes within `|P| <= window`, in index order
/// `(P_X1, P_X2, P_Y1, P_Y2)`.
pub struct BellFourDim {
    pub axis: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn bell_four_dim(quartet: &SliceQuartet, window: f64) -> Result<BellFourDim> {
    quartet.shears()?;
    let p_axis = quartet.s11.p_axis();
    for s in [&quartet.s12, &quartet.s21, &quartet.s22] {
        if s.p_axis() != p_axis {
            return Err(Error::Config("slice quartet momentum axes differ".into()));
        }
    }
    let idx: Vec<usize> = (0..p_axis.len()).filter(|&i| p_axis[i].abs() <= window).collect();
    if idx.is_empty() {
        return Err(Error::Range(format!("no momentum nodes within |P| <= {window}")));
    }
    let axis: Vec<f64> = idx.iter().map(|&i| p_axis[i]).collect();
    let k = idx.len();
    let mut values = Vec::with_capacity(k * k * k * k);
    for &ipx1 in &idx {
        for &ipx2 in &idx {
            for &ipy1 in &idx {
                for &ipy2 in &idx {
                    let aa = quartet.s11.value(ipy1, ipx1);
                    let ab = quartet.s12.value(ipy2, ipx1);
                    let ba = quartet.s21.value(ipy1, ipx2);
                    let bb = quartet.s22.value(ipy2, ipx2);
                    values.push(PI2 * (aa + ab + ba - bb));
                }
            }
        }
    }
    Ok(BellFourDim { axis, values })
}

/// Maximize `|B|` over the four momentum axes of a slice quartet: a scan of
/// the node array within `|P| <= window` followed by simplex refinement
/// with bilinear interpolation.
pub fn maximize_bell_from_slices(quartet: &SliceQuartet, window: f64) -> Result<BellResult> {
    let four = bell_four_dim(quartet, window)?;
    let k = four.axis.len();
    let mut best_idx = 0;
    for (i, v) in four.values.iter().enumerate() {
        if v.abs() > four.values[best_idx].abs() {
            best_idx = i;
        }
    }
    let i_px1 = best_idx / (k * k * k);
    let i_px2 = (best_idx / (k * k)) % k;
    let i_py1 = (best_idx / k) % k;
    let i_py2 = best_idx % k;
    let start = [
        four.axis[i_px1],
        four.axis[i_px2],
        four.axis[i_py1],
        four.axis[i_py2],
    ];
    let step = (four.axis[1] - four.axis[0]) * 0.5;
    let objective = |v: &[f64]| -> f64 {
        match bell_from_slices(quartet, (v[0], v[1], v[2], v[3])) {
            Ok(b) => -b.abs(),
            Err(_) => f64::INFINITY,
        }
    };
    let out = nelder_mead(objective, &start, step, SIMPLEX_ITERS, SIMPLEX_TOL);

    let (momenta, value) = if -out.value >= four.values[best_idx].abs() {
        ((out.x[0], out.x[1], out.x[2], out.x[3]), -out.value)
    } else {
        ((start[0], start[1], start[2], start[3]), four.values[best_idx].abs())
    };
    let signed = bell_from_slices(quartet, momenta)?;
    let (x1, x2, y1, y2) = quartet.shears()?;
    let settings = BellSettings {
        point_a: (x1, momenta.0),
        point_a_prime: (x2, momenta.1),
        point_b: (y1, momenta.2),
        point_b_prime: (y2, momenta.3),
    };
    let _ = value;
    Ok(BellResult::single(signed, settings, out.converged))
}

/// Probe `|B|` at a fixed distance around a claimed maximum: true when no
/// probed direction improves on it. Probes the 16 axis directions plus at
/// least six deterministic pseudo-random directions.
pub fn neighborhood_check(n: i32, m: u32, argmax: &BellSettings, radius: f64) -> Result<bool> {
    validate_orders(n, m)?;
    if radius < 0.0 || !radius.is_finite() {
        return Err(Error::Domain(format!("radius must be >= 0, got {radius}")));
    }
    let center = argmax.to_array();
    let reference = bell_fast(n, m, &center).abs();
    if radius == 0.0 {
        return Ok(true);
    }
    let mut directions: Vec<[f64; 8]> = Vec::new();
    for d in 0..8 {
        let mut e = [0.0; 8];
        e[d] = 1.0;
        directions.push(e);
        e[d] = -1.0;
        directions.push(e);
    }
    // deterministic scattered directions
    let mut state = 0x9E3779B97F4A7C15u64;
    for _ in 0..6 {
        let mut dir = [0.0f64; 8];
        let mut norm = 0.0;
        for v in &mut dir {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            *v = ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0;
            norm += *v * *v;
        }
        let norm = norm.sqrt();
        for v in &mut dir {
            *v /= norm;
        }
        directions.push(dir);
    }
    for dir in directions {
        let mut probe = center;
        for (p, d) in probe.iter_mut().zip(dir) {
            *p += radius * d;
        }
        if bell_fast(n, m, &probe).abs() > reference + 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sample mean and standard deviation (n - 1 normalization).
pub fn mean_std(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

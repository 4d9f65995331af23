//! Closed-form Wigner distribution of LG vortex modes in dimensionless
//! quadratures, plus the parity-normalized value `Pi = pi^2 W`.
//!
//! For indices `(n, m)` the distribution is
//!
//! ```text
//! W = ((-1)^(n+m) / pi^2) L_n[4(Q0+Q2)] L_m[4(Q0-Q2)] exp(-4 Q0)
//! Q0 = (X^2 + P_X^2 + Y^2 + P_Y^2) / 4
//! Q2 = (X P_Y - Y P_X) / 2
//! ```
//!
//! Negative azimuthal index flips the sign of `Q2` (the orbital sense of the
//! charge) rather than extending `L_n` to negative order; the formula above
//! is written for `|n|`. Both Laguerre arguments are sums of squares,
//! `4(Q0 +/- Q2) = (X +/- P_Y)^2 + (Y -/+ P_X)^2`, so they are never
//! negative and `|Q2| <= Q0` always holds.

use crate::error::{Error, Result};
use crate::lg::laguerre_unchecked;

pub const MAX_AZIMUTHAL: u32 = 8;
pub const MAX_RADIAL: u32 = 4;

/// One dimensionless phase-space point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraturePoint {
    pub x: f64,
    pub p_x: f64,
    pub y: f64,
    pub p_y: f64,
}

impl QuadraturePoint {
    pub fn new(x: f64, p_x: f64, y: f64, p_y: f64) -> Self {
        QuadraturePoint { x, p_x, y, p_y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.p_x.is_finite() && self.y.is_finite() && self.p_y.is_finite()
    }
}

/// The two rotation invariants entering the LG Wigner function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QInvariants {
    pub q0: f64,
    pub q2: f64,
}

/// `Q0 = (X^2+P_X^2+Y^2+P_Y^2)/4`, `Q2 = (X P_Y - Y P_X)/2`.
pub fn q_invariants(p: &QuadraturePoint) -> QInvariants {
    QInvariants {
        q0: (p.x * p.x + p.p_x * p.p_x + p.y * p.y + p.p_y * p.p_y) / 4.0,
        q2: (p.x * p.p_y - p.y * p.p_x) / 2.0,
    }
}

pub(crate) fn wdf_unchecked(n: i32, m: u32, p: &QuadraturePoint) -> f64 {
    let q = q_invariants(p);
    let n_abs = n.unsigned_abs();
    // charge sign carried by the handedness of Q2
    let q2 = if n < 0 { -q.q2 } else { q.q2 };
    let sign = if (n_abs + m) % 2 == 0 { 1.0 } else { -1.0 };
    sign / (std::f64::consts::PI * std::f64::consts::PI)
        * laguerre_unchecked(n_abs, 0, 4.0 * (q.q0 + q2))
        * laguerre_unchecked(m, 0, 4.0 * (q.q0 - q2))
        * (-4.0 * q.q0).exp()
}

/// Analytic Wigner function of the `(n, m)` LG mode.
pub fn wdf_analytic(n: i32, m: u32, p: &QuadraturePoint) -> Result<f64> {
    if n.unsigned_abs() > MAX_AZIMUTHAL {
        return Err(Error::Domain(format!("|n| <= {MAX_AZIMUTHAL} supported, got {n}")));
    }
    if m > MAX_RADIAL {
        return Err(Error::Domain(format!("m <= {MAX_RADIAL} supported, got {m}")));
    }
    if !p.is_finite() {
        return Err(Error::Domain("quadrature point must be finite".into()));
    }
    Ok(wdf_unchecked(n, m, p))
}

/// Closed form of the `n = 1, m = 0` Wigner function, kept as an independent
/// cross-check of [`wdf_analytic`]:
/// `exp(-X^2-P_X^2-Y^2-P_Y^2) [(P_X-Y)^2 + (P_Y+X)^2 - 1] / pi^2`.
pub fn wdf_n1_closed(p: &QuadraturePoint) -> f64 {
    let e = (-(p.x * p.x + p.p_x * p.p_x + p.y * p.y + p.p_y * p.p_y)).exp();
    let a = p.p_x - p.y;
    let b = p.p_y + p.x;
    e * (a * a + b * b - 1.0) / (std::f64::consts::PI * std::f64::consts::PI)
}

/// Displaced-parity expectation `Pi = pi^2 W`; bounded by 1 in magnitude.
pub fn pi_value(n: i32, m: u32, p: &QuadraturePoint) -> Result<f64> {
    Ok(std::f64::consts::PI * std::f64::consts::PI * wdf_analytic(n, m, p)?)
}

pub(crate) fn pi_unchecked(n: i32, m: u32, p: &QuadraturePoint) -> f64 {
    std::f64::consts::PI * std::f64::consts::PI * wdf_unchecked(n, m, p)
}

/// Map physical position/transverse-momentum pairs onto dimensionless
/// quadratures: `X = sqrt(2) x / w`, `P = w p / (sqrt(2) lambda_bar)`.
pub fn scale_to_quadrature(
    x_phys: f64,
    p_phys: f64,
    waist: f64,
    lambda_bar: f64,
) -> Result<(f64, f64)> {
    if !(waist > 0.0) {
        return Err(Error::Domain(format!("waist must be positive, got {waist}")));
    }
    if !(lambda_bar > 0.0) {
        return Err(Error::Domain(format!("lambda_bar must be positive, got {lambda_bar}")));
    }
    let x = std::f64::consts::SQRT_2 * x_phys / waist;
    let p = waist * p_phys / (std::f64::consts::SQRT_2 * lambda_bar);
    Ok((x, p))
}

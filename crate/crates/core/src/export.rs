//! CSV tables and PNG renderings of slices, surfaces and order scans.
//!
//! All floating-point columns use a fixed `%.9e` format so identical runs
//! produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use image::{Rgb, RgbImage};

use crate::bell::BellResult;
use crate::error::{Error, Result};
use crate::pipeline::TwoParamScan;
use crate::reconstruct::WignerSlice;

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn fmt(v: f64) -> String {
    format!("{v:.9e}")
}

/// `(t, X_shear)` calibration table.
pub fn write_calibration_csv(path: &Path, curve: &[(f64, f64)]) -> Result<()> {
    let mut text = String::from("t,x_shear\n");
    for (t, x) in curve {
        let _ = writeln!(text, "{},{}", fmt(*t), fmt(*x));
    }
    write_text(path, &text)
}

/// Linear-fit parameters of a calibration curve.
pub fn write_calibration_fit_csv(
    path: &Path,
    slope: f64,
    intercept: f64,
    rms_residual: f64,
) -> Result<()> {
    let mut text = String::from("slope,intercept,rms_residual\n");
    let _ = writeln!(text, "{},{},{}", fmt(slope), fmt(intercept), fmt(rms_residual));
    write_text(path, &text)
}

/// `(P_X, P_Y, W)` rows of a Wigner slice.
pub fn write_slice_csv(path: &Path, slice: &WignerSlice) -> Result<()> {
    let mut text = String::from("p_x,p_y,w\n");
    for (row, &py) in slice.p_axis().iter().enumerate() {
        for (col, &px) in slice.p_axis().iter().enumerate() {
            let _ = writeln!(text, "{},{},{}", fmt(px), fmt(py), fmt(slice.value(row, col)));
        }
    }
    write_text(path, &text)
}

/// `(X, P_Y, |B|)` rows of a two-variable scan.
pub fn write_surface_csv(path: &Path, scan: &TwoParamScan) -> Result<()> {
    let mut text = String::from("x,p_y,abs_b\n");
    for (ix, &x) in scan.x_values.iter().enumerate() {
        for (iy, &py) in scan.p_y_values.iter().enumerate() {
            let v = scan.abs_b[ix * scan.p_y_values.len() + iy];
            let _ = writeln!(text, "{},{},{}", fmt(x), fmt(py), fmt(v));
        }
    }
    write_text(path, &text)
}

/// Per-order Bell results: order, mean and spread of `|B_max|`, argmax
/// components.
pub fn write_bell_orders_csv(path: &Path, rows: &[(i32, BellResult)]) -> Result<()> {
    let mut text = String::from(
        "n,b_max_mean,b_max_std,repetitions,x1,p_x1,x2,p_x2,y1,p_y1,y2,p_y2\n",
    );
    for (order, r) in rows {
        let a = r.argmax.to_array();
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            order,
            fmt(r.mean),
            fmt(r.std_dev),
            r.repetitions.len().max(1),
            fmt(a[0]),
            fmt(a[1]),
            fmt(a[2]),
            fmt(a[3]),
            fmt(a[4]),
            fmt(a[5]),
            fmt(a[6]),
            fmt(a[7])
        );
    }
    write_text(path, &text)
}

/// Diverging blue-white-red map for signed data, symmetric about zero.
fn diverging(v: f64, max_abs: f64) -> Rgb<u8> {
    let t = if max_abs > 0.0 { (v / max_abs).clamp(-1.0, 1.0) } else { 0.0 };
    let (r, g, b) = if t >= 0.0 {
        (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t))
    } else {
        (255.0 * (1.0 + t), 255.0 * (1.0 + t), 255.0)
    };
    Rgb([r as u8, g as u8, b as u8])
}

/// Sequential dark-to-bright map for non-negative data.
fn sequential(v: f64, max: f64) -> Rgb<u8> {
    let t = if max > 0.0 { (v / max).clamp(0.0, 1.0) } else { 0.0 };
    // dark violet to yellow
    let r = (255.0 * t.powf(0.7)) as u8;
    let g = (255.0 * t.powf(1.3)) as u8;
    let b = (80.0 + 100.0 * (0.5 - (t - 0.5).abs())) as u8;
    Rgb([r, g, b])
}

fn render_grid(
    path: &Path,
    values: &[f64],
    cols: usize,
    rows: usize,
    signed: bool,
) -> Result<()> {
    if values.len() != cols * rows || cols == 0 || rows == 0 {
        return Err(Error::Config(format!(
            "heatmap: {} values do not fill {cols} x {rows}",
            values.len()
        )));
    }
    let mut img = RgbImage::new(cols as u32, rows as u32);
    if signed {
        let max_abs = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (i, v) in values.iter().enumerate() {
            // image rows run downward; data rows run upward
            let row = rows - 1 - i / cols;
            img.put_pixel((i % cols) as u32, row as u32, diverging(*v, max_abs));
        }
    } else {
        let max = values.iter().copied().fold(0.0f64, f64::max);
        for (i, v) in values.iter().enumerate() {
            let row = rows - 1 - i / cols;
            img.put_pixel((i % cols) as u32, row as u32, sequential(*v, max));
        }
    }
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    img.save(path)
        .map_err(|e| Error::Config(format!("writing {}: {e}", path.display())))
}

/// Signed heatmap of a Wigner slice (blue negative, red positive).
pub fn render_slice_heatmap(path: &Path, slice: &WignerSlice) -> Result<()> {
    render_grid(path, slice.values(), slice.side(), slice.side(), true)
}

/// Heatmap of a `|B|` surface (row-major, `X` rows by `P_Y` columns); the
/// image places `X` along the horizontal axis.
pub fn render_surface_heatmap(path: &Path, scan: &TwoParamScan) -> Result<()> {
    // transpose so P_Y runs along image rows
    let nx = scan.x_values.len();
    let ny = scan.p_y_values.len();
    let mut transposed = vec![0.0; nx * ny];
    for ix in 0..nx {
        for iy in 0..ny {
            transposed[iy * nx + ix] = scan.abs_b[ix * ny + iy];
        }
    }
    render_grid(path, &transposed, nx, ny, false)
}

/// Heatmap of arbitrary non-negative intensity data.
pub fn render_intensity_heatmap(
    path: &Path,
    values: &[f64],
    cols: usize,
    rows: usize,
) -> Result<()> {
    render_grid(path, values, cols, rows, false)
}

/// Line plot of `|B_max|` against order with one-sigma error bars.
pub fn render_order_curve(
    path: &Path,
    orders: &[i32],
    means: &[f64],
    stds: &[f64],
) -> Result<()> {
    if orders.is_empty() || orders.len() != means.len() || orders.len() != stds.len() {
        return Err(Error::Config("order curve needs equal non-empty inputs".into()));
    }
    let (width, height) = (640u32, 480u32);
    let margin = 60.0;
    let mut img = RgbImage::from_pixel(width, height, Rgb([255, 255, 255]));

    let y_lo = 1.9f64;
    let y_hi = means
        .iter()
        .zip(stds)
        .map(|(m, s)| m + s)
        .fold(2.5f64, f64::max)
        + 0.05;
    let x_lo = orders[0] as f64 - 0.5;
    let x_hi = *orders.last().unwrap() as f64 + 0.5;
    let to_px = |x: f64| margin + (x - x_lo) / (x_hi - x_lo) * (width as f64 - 2.0 * margin);
    let to_py = |y: f64| {
        height as f64 - margin - (y - y_lo) / (y_hi - y_lo) * (height as f64 - 2.0 * margin)
    };

    fn line(img: &mut RgbImage, x0: f64, y0: f64, x1: f64, y1: f64, color: Rgb<u8>) {
        let steps = ((x1 - x0).abs().max((y1 - y0).abs()) as u32).max(1);
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            let x = x0 + t * (x1 - x0);
            let y = y0 + t * (y1 - y0);
            if x >= 0.0 && y >= 0.0 && (x as u32) < img.width() && (y as u32) < img.height() {
                img.put_pixel(x as u32, y as u32, color);
            }
        }
    }

    let axis = Rgb([0, 0, 0]);
    let h = height as f64;
    let w = width as f64;
    line(&mut img, margin, h - margin, w - margin, h - margin, axis);
    line(&mut img, margin, margin, margin, h - margin, axis);
    // classical bound marker at |B| = 2
    let bound = Rgb([160, 160, 160]);
    line(&mut img, margin, to_py(2.0), w - margin, to_py(2.0), bound);

    let series = Rgb([200, 30, 30]);
    for k in 0..orders.len() {
        let x = to_px(orders[k] as f64);
        let y = to_py(means[k]);
        if k + 1 < orders.len() {
            line(&mut img, x, y, to_px(orders[k + 1] as f64), to_py(means[k + 1]), series);
        }
        // error bar with caps
        let y_up = to_py(means[k] + stds[k]);
        let y_dn = to_py(means[k] - stds[k]);
        line(&mut img, x, y_up, x, y_dn, axis);
        line(&mut img, x - 4.0, y_up, x + 4.0, y_up, axis);
        line(&mut img, x - 4.0, y_dn, x + 4.0, y_dn, axis);
        // point marker
        for dx in -2i32..=2 {
            for dy in -2i32..=2 {
                let px = (x as i32 + dx).max(0) as u32;
                let py = (y as i32 + dy).max(0) as u32;
                if px < width && py < height {
                    img.put_pixel(px, py, series);
                }
            }
        }
    }

    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    img.save(path)
        .map_err(|e| Error::Config(format!("writing {}: {e}", path.display())))
}

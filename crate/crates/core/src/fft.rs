//! 2-D FFT helpers shared by the interferometer and reconstruction stages.
//!
//! Grids are row-major `n x n` with the spatial origin at index `n/2` on each
//! axis; `ifftshift` moves that sample to index 0 before a transform so the
//! DFT phases correspond to the centered coordinates.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// In-place 2-D FFT of a square row-major buffer.
pub(crate) fn fft2d(buf: &mut [Complex64], n: usize, direction: FftDirection) {
    debug_assert_eq!(buf.len(), n * n);
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(n, direction);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for row in buf.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose_square(buf, n);
    for row in buf.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose_square(buf, n);
}

fn transpose_square(buf: &mut [Complex64], n: usize) {
    for row in 0..n {
        for col in (row + 1)..n {
            buf.swap(row * n + col, col * n + row);
        }
    }
}

/// Swap quadrants so index `n/2` moves to index 0 (even sizes only, where
/// shift and inverse shift coincide).
pub(crate) fn fftshift2d(buf: &mut [Complex64], n: usize) {
    debug_assert!(n % 2 == 0);
    let half = n / 2;
    for row in 0..half {
        for col in 0..n {
            let src = row * n + col;
            let dst = ((row + half) % n) * n + (col + half) % n;
            buf.swap(src, dst);
        }
    }
}

/// Displace a centered field by `(dx, dy)` physical units via the Fourier
/// shift theorem: the output samples `f(x + dx, y + dy)`. Exact to rounding
/// for fields whose spectrum has decayed at the Nyquist frequency.
pub(crate) fn shift_sampled_field(
    samples: &[Complex64],
    n: usize,
    spacing: f64,
    dx: f64,
    dy: f64,
) -> Vec<Complex64> {
    let (shifted, _) = shift_sampled_field_pair(samples, n, spacing, dx, dy);
    shifted
}

/// The two opposite displacements `f(x + d)` and `f(x - d)` from a single
/// forward transform.
pub(crate) fn shift_sampled_field_pair(
    samples: &[Complex64],
    n: usize,
    spacing: f64,
    dx: f64,
    dy: f64,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut spectrum = samples.to_vec();
    fftshift2d(&mut spectrum, n);
    fft2d(&mut spectrum, n, FftDirection::Forward);
    fftshift2d(&mut spectrum, n);
    // centered spectrum: bin j holds angular frequency 2 pi (j - n/2) / (n h)
    let dk = std::f64::consts::TAU / (n as f64 * spacing);
    let half = (n / 2) as f64;
    let mut plus = spectrum.clone();
    let mut minus = spectrum;
    for row in 0..n {
        let ky = (row as f64 - half) * dk;
        for col in 0..n {
            let kx = (col as f64 - half) * dk;
            // sampling at x + d multiplies the spectrum by exp(+i k.d)
            let ramp = Complex64::from_polar(1.0, kx * dx + ky * dy);
            plus[row * n + col] *= ramp;
            minus[row * n + col] *= ramp.conj();
        }
    }
    let scale = 1.0 / (n * n) as f64;
    for buf in [&mut plus, &mut minus] {
        fftshift2d(buf, n);
        fft2d(buf, n, FftDirection::Inverse);
        fftshift2d(buf, n);
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }
    (plus, minus)
}

/// Centered forward DFT of centered samples, zero-padded to `padded` per
/// axis. Returns the padded spectrum (row-major, zero frequency at index
/// `padded/2`) scaled by `spacing^2`, i.e. a Riemann-sum approximation of
/// the continuous transform `F(k) = sum f(e) exp(-i k.e) h^2`.
pub(crate) fn centered_spectrum(
    samples: &[Complex64],
    n: usize,
    spacing: f64,
    padded: usize,
) -> Vec<Complex64> {
    debug_assert!(padded >= n && padded % 2 == 0);
    let offset = padded / 2 - n / 2;
    let mut buf = vec![Complex64::default(); padded * padded];
    for row in 0..n {
        let dst = (row + offset) * padded + offset;
        buf[dst..dst + n].copy_from_slice(&samples[row * n..row * n + n]);
    }
    fftshift2d(&mut buf, padded);
    fft2d(&mut buf, padded, FftDirection::Forward);
    fftshift2d(&mut buf, padded);
    let cell = spacing * spacing;
    for v in &mut buf {
        *v *= cell;
    }
    buf
}

/// Angular frequency of centered bin `j` for a `padded`-point axis.
pub(crate) fn bin_frequency(j: usize, padded: usize, spacing: f64) -> f64 {
    (j as f64 - (padded / 2) as f64) * std::f64::consts::TAU / (padded as f64 * spacing)
}

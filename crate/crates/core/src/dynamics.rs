//! Time-domain singlet probability and quantum-beat extraction.
//!
//! The coherent singlet probability of a singlet-born pair is a cosine sum
//! over transition frequencies weighted by the projector's eigenbasis
//! matrix elements; phenomenological relaxation then pulls it toward the
//! statistical limit ¼ at rate r.

use rustfft::FftPlanner;

use crate::eigen::{singlet_pair_spectrum, PairSpectrum};
use crate::matrix::C64;
use crate::system::{PhysicalConstants, RadicalPairSpec};
use crate::tol;
use crate::{Error, Result};

pub const DEFAULT_TRACE_SAMPLES: usize = 4096;
pub const DEFAULT_TRACE_T_MAX_S: f64 = 10e-6;
pub const MIN_BEAT_SAMPLES: usize = 1024;

#[derive(Debug, Clone)]
pub struct TimeTrace {
    pub times_s: Vec<f64>,
    pub probabilities: Vec<f64>,
}

/// `n` uniform samples t_i = i·t_max/n, starting at 0 (t_max itself is not
/// sampled; the spacing is t_max/n, which keeps FFT bin widths simple).
pub fn uniform_times(t_max_s: f64, n: usize) -> Vec<f64> {
    let h = t_max_s / n as f64;
    (0..n).map(|i| i as f64 * h).collect()
}

/// Σ w·cos(ωt) over the spectrum's lines — the relaxation-free singlet
/// probability of a singlet-born pair. Even in t.
pub fn coherent_singlet_probability(spectrum: &PairSpectrum, t_s: f64) -> f64 {
    spectrum
        .lines
        .iter()
        .map(|l| l.weight * (l.omega_rad_s * t_s).cos())
        .sum()
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::invalid("time grid is empty"));
    }
    if !times[0].is_finite() || times[0] < 0.0 {
        return Err(Error::invalid("times must start at t ≥ 0"));
    }
    for i in 1..times.len() {
        if !times[i].is_finite() || times[i] <= times[i - 1] {
            return Err(Error::invalid(format!(
                "times must be strictly increasing and finite (index {i})"
            )));
        }
    }
    Ok(())
}

/// Singlet probability of a singlet-born pair at the given times, with
/// relaxation applied as p(t) = ¼ − (¼ − p_coh(t))·e^{−rt}.
pub fn singlet_probability_trace(
    spec: &RadicalPairSpec,
    b_ut: f64,
    r_per_s: f64,
    times: &[f64],
    c: &PhysicalConstants,
) -> Result<TimeTrace> {
    validate_times(times)?;
    if !r_per_s.is_finite() || r_per_s < 0.0 {
        return Err(Error::invalid(format!(
            "relaxation rate must be finite and ≥ 0, got {r_per_s}"
        )));
    }
    let spectrum = singlet_pair_spectrum(spec, b_ut, c)?;
    let probabilities = times
        .iter()
        .map(|&t| {
            let coh = coherent_singlet_probability(&spectrum, t);
            0.25 - (0.25 - coh) * (-r_per_s * t).exp()
        })
        .collect();
    Ok(TimeTrace {
        times_s: times.to_vec(),
        probabilities,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPeak {
    pub frequency_hz: f64,
    pub amplitude: f64,
}

fn uniform_step(times: &[f64]) -> Result<f64> {
    let n = times.len();
    let h = (times[n - 1] - times[0]) / (n - 1) as f64;
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::invalid("degenerate time grid"));
    }
    for i in 0..n - 1 {
        let step = times[i + 1] - times[i];
        let rel_dev = (step - h).abs() / h;
        if rel_dev > tol::UNIFORM_GRID_REL {
            return Err(Error::NonUniformGrid { index: i, rel_dev });
        }
    }
    Ok(h)
}

/// Discrete Fourier magnitude spectrum of (p − mean), scaled so a pure
/// cosine of amplitude A shows up as a peak of height ≈ A. Returns strict
/// local maxima with quadratically interpolated frequency and height,
/// sorted by height, largest first.
pub fn beat_spectrum(trace: &TimeTrace) -> Result<Vec<SpectralPeak>> {
    let n = trace.times_s.len();
    if n < MIN_BEAT_SAMPLES {
        return Err(Error::TooFewSamples {
            got: n,
            min: MIN_BEAT_SAMPLES,
        });
    }
    if trace.probabilities.len() != n {
        return Err(Error::DimensionMismatch {
            context: "trace probabilities vs times",
            got: trace.probabilities.len(),
            expected: n,
        });
    }
    let h = uniform_step(&trace.times_s)?;

    let mean = trace.probabilities.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<C64> = trace
        .probabilities
        .iter()
        .map(|&p| C64::new(p - mean, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 2.0 / n as f64;
    let mags: Vec<f64> = buf[..=n / 2].iter().map(|z| z.norm() * scale).collect();

    let mut peaks = Vec::new();
    for m in 1..n / 2 {
        let (ym, y0, yp) = (mags[m - 1], mags[m], mags[m + 1]);
        if y0 > ym && y0 > yp {
            let denom = ym - 2.0 * y0 + yp;
            let delta = if denom != 0.0 { 0.5 * (ym - yp) / denom } else { 0.0 };
            peaks.push(SpectralPeak {
                frequency_hz: (m as f64 + delta) / (n as f64 * h),
                amplitude: y0 - 0.25 * (ym - yp) * delta,
            });
        }
    }
    peaks.sort_by(|a, b| b.amplitude.partial_cmp(&a.amplitude).unwrap());
    Ok(peaks)
}

/// Magnitude of the demeaned trace's Fourier component at an arbitrary
/// frequency, on the same amplitude scale as `beat_spectrum` peaks. Lets a
/// caller ask "how much of frequency f is in this trace" off the bin grid.
pub fn spectrum_magnitude(trace: &TimeTrace, frequency_hz: f64) -> Result<f64> {
    let n = trace.times_s.len();
    if n < 2 {
        return Err(Error::TooFewSamples { got: n, min: 2 });
    }
    if !frequency_hz.is_finite() {
        return Err(Error::invalid("frequency must be finite"));
    }
    let mean = trace.probabilities.iter().sum::<f64>() / n as f64;
    let mut acc = C64::new(0.0, 0.0);
    let w = -2.0 * std::f64::consts::PI * frequency_hz;
    for (&t, &p) in trace.times_s.iter().zip(trace.probabilities.iter()) {
        let phase = w * t;
        acc += C64::new(phase.cos(), phase.sin()) * (p - mean);
    }
    Ok(acc.norm() * 2.0 / n as f64)
}

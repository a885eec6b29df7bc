//! IIR filters: audio-cookbook biquads and Butterworth lowpass cascades.

use crate::error::{Error, Result};

fn check_freq(f: f64, sample_rate: u32, what: &str) -> Result<()> {
    let nyquist = sample_rate as f64 / 2.0;
    if !(f > 0.0 && f < nyquist) {
        return Err(Error::invalid(format!(
            "{what} {f} Hz out of range (0, {nyquist})"
        )));
    }
    Ok(())
}

/// Second-order section in transposed direct form II.
#[derive(Debug, Clone)]
pub struct Biquad {
    b0: f64,
    b1: f64,
    b2: f64,
    a1: f64,
    a2: f64,
    z1: f64,
    z2: f64,
}

impl Biquad {
    /// Constant 0 dB peak-gain bandpass.
    pub fn bandpass(center_hz: f64, q: f64, sample_rate: u32) -> Result<Self> {
        check_freq(center_hz, sample_rate, "bandpass center")?;
        if q <= 0.0 {
            return Err(Error::invalid(format!("q must be positive, got {q}")));
        }
        let mut f = Biquad {
            b0: 0.0,
            b1: 0.0,
            b2: 0.0,
            a1: 0.0,
            a2: 0.0,
            z1: 0.0,
            z2: 0.0,
        };
        f.retune_bandpass(center_hz, q, sample_rate);
        Ok(f)
    }

    /// Lowpass with the given resonance.
    pub fn lowpass(cutoff_hz: f64, q: f64, sample_rate: u32) -> Result<Self> {
        check_freq(cutoff_hz, sample_rate, "lowpass cutoff")?;
        let w0 = std::f64::consts::TAU * cutoff_hz / sample_rate as f64;
        let alpha = w0.sin() / (2.0 * q);
        let cos_w0 = w0.cos();
        let a0 = 1.0 + alpha;
        Ok(Biquad {
            b0: (1.0 - cos_w0) / 2.0 / a0,
            b1: (1.0 - cos_w0) / a0,
            b2: (1.0 - cos_w0) / 2.0 / a0,
            a1: -2.0 * cos_w0 / a0,
            a2: (1.0 - alpha) / a0,
            z1: 0.0,
            z2: 0.0,
        })
    }

    /// Recompute bandpass coefficients in place, keeping the filter state.
    /// Used by the time-varying wind filter.
    pub fn retune_bandpass(&mut self, center_hz: f64, q: f64, sample_rate: u32) {
        let nyquist = sample_rate as f64 / 2.0;
        let f = center_hz.clamp(1.0, nyquist * 0.99);
        let w0 = std::f64::consts::TAU * f / sample_rate as f64;
        let alpha = w0.sin() / (2.0 * q);
        let a0 = 1.0 + alpha;
        self.b0 = alpha / a0;
        self.b1 = 0.0;
        self.b2 = -alpha / a0;
        self.a1 = -2.0 * w0.cos() / a0;
        self.a2 = (1.0 - alpha) / a0;
    }

    #[inline]
    pub fn tick(&mut self, x: f64) -> f64 {
        let y = self.b0 * x + self.z1;
        self.z1 = self.b1 * x - self.a1 * y + self.z2;
        self.z2 = self.b2 * x - self.a2 * y;
        y
    }

    pub fn process(&mut self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.tick(x)).collect()
    }
}

/// First-order lowpass section (bilinear transform).
#[derive(Debug, Clone)]
struct OnePoleLowpass {
    b0: f64,
    a1: f64,
    z1: f64,
}

impl OnePoleLowpass {
    fn new(cutoff_hz: f64, sample_rate: u32) -> Self {
        let k = (std::f64::consts::PI * cutoff_hz / sample_rate as f64).tan();
        OnePoleLowpass {
            b0: k / (k + 1.0),
            a1: (k - 1.0) / (k + 1.0),
            z1: 0.0,
        }
    }

    #[inline]
    fn tick(&mut self, x: f64) -> f64 {
        // y = b0*x + b0*x[n-1] - a1*y[n-1], folded into one state variable
        let y = self.b0 * x + self.z1;
        self.z1 = self.b0 * x - self.a1 * y;
        y
    }
}

/// Stateless bandpass application: filters the whole sequence through a
/// freshly constructed constant 0 dB peak-gain biquad.
pub fn biquad_bandpass(
    samples: &[f64],
    center_hz: f64,
    q: f64,
    sample_rate: u32,
) -> Result<Vec<f64>> {
    let mut f = Biquad::bandpass(center_hz, q, sample_rate)?;
    Ok(f.process(samples))
}

/// N-th order Butterworth lowpass realized as cascaded second-order sections
/// plus one first-order section when the order is odd.
pub fn lowpass_n(samples: &[f64], cutoff_hz: f64, order: usize, sample_rate: u32) -> Result<Vec<f64>> {
    check_freq(cutoff_hz, sample_rate, "lowpass cutoff")?;
    if order < 1 {
        return Err(Error::invalid("filter order must be >= 1"));
    }
    let mut out = samples.to_vec();
    for k in 1..=(order / 2) {
        let theta = (2 * k - 1) as f64 * std::f64::consts::PI / (2 * order) as f64;
        let q = 1.0 / (2.0 * theta.sin());
        let mut section = Biquad::lowpass(cutoff_hz, q, sample_rate)?;
        out = section.process(&out);
    }
    if order % 2 == 1 {
        let mut section = OnePoleLowpass::new(cutoff_hz, sample_rate);
        out = out.iter().map(|&x| section.tick(x)).collect();
    }
    Ok(out)
}

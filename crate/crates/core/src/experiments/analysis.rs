//! Post-processing of recorded traces.

use std::f64::consts::TAU;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Angular frequency of the strongest Fourier component of a uniformly
/// sampled trace, mean removed, refined by a parabola through the peak bin
/// and its neighbours. `None` for fewer than 8 samples or a flat trace.
pub fn dominant_frequency(times: &[f64], values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n < 8 || times.len() != n {
        return None;
    }
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    let mean = values.iter().sum::<f64>() / n as f64;
    // Hann taper keeps the negative-frequency image and leakage out of the
    // neighbouring bins, so the log-power parabola is nearly unbiased.
    let mut buf: Vec<Complex<f64>> = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = 0.5 - 0.5 * (TAU * i as f64 / (n - 1) as f64).cos();
            Complex::new(w * (v - mean), 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let power: Vec<f64> = buf[..=n / 2].iter().map(|z| z.norm_sqr()).collect();
    let (kmax, &pmax) = power
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    if pmax <= 0.0 {
        return None;
    }
    let shift = match (power[kmax - 1], power.get(kmax + 1)) {
        (a, Some(&c)) if a > 0.0 && c > 0.0 => {
            let (a, b, c) = (a.ln(), pmax.ln(), c.ln());
            let den = a - 2.0 * b + c;
            if den < 0.0 {
                (0.5 * (a - c) / den).clamp(-0.5, 0.5)
            } else {
                0.0
            }
        }
        _ => 0.0,
    };
    Some(TAU * (kmax as f64 + shift) / (n as f64 * dt))
}

/// Half the peak-to-peak excursion.
pub fn amplitude(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
            (l.min(v), h.max(v))
        });
    0.5 * (hi - lo)
}

/// Largest relative excursion `max |v - v0| / |v0|` from the first sample.
pub fn relative_excursion(values: &[f64]) -> f64 {
    let Some(&v0) = values.first() else {
        return 0.0;
    };
    values.iter().map(|v| (v - v0).abs()).fold(0.0, f64::max) / v0.abs().max(f64::MIN_POSITIVE)
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn flat_and_short_traces() {
        assert_eq!(dominant_frequency(&[0.0; 4], &[1.0; 4]), None);
        let t: Vec<f64> = (0..64).map(|i| i as f64).collect();
        assert_eq!(dominant_frequency(&t, &[3.0; 64]), None);
    }

    proptest! {
        #[test]
        fn recovers_sinusoid_frequency(f in 6.0f64..40.0, phase in 0.0f64..std::f64::consts::TAU, offset in -2.0f64..2.0) {
            let n = 1000;
            let t: Vec<f64> = (0..n).map(|i| i as f64 * 1e-3).collect();
            let v: Vec<f64> = t.iter().map(|t| offset + (f * TAU * t + phase).cos()).collect();
            let w = dominant_frequency(&t, &v).unwrap();
            // Bin width is 2 pi / span; the tapered refinement stays within a
            // small fraction of it once the window holds several cycles.
            prop_assert!((w - f * TAU).abs() < 0.05 * TAU / 0.999, "{} vs {}", w, f * TAU);
        }
    }

    #[test]
    fn gaps_and_amplitudes() {
        assert_eq!(relative_gap(0.0, 0.0), 0.0);
        assert!((relative_gap(1.0, 0.9) - 0.1).abs() < 1e-12);
        assert_eq!(amplitude(&[-2.0, 1.0, 0.5]), 1.5);
        assert!((relative_excursion(&[2.0, 2.1, 1.96]) - 0.05).abs() < 1e-12);
    }
}

use std::f64::consts::PI;

/// Band-center default for the 200-900 MHz excitation.
pub const DEFAULT_CENTER_FREQUENCY: f64 = 550e6;

/// Unit-peak Ricker wavelet `(1 - 2π²f²t²) exp(-π²f²t²)`.
pub fn ricker(center_frequency: f64, t: f64) -> f64 {
    let a = (PI * center_frequency * t).powi(2);
    (1.0 - 2.0 * a) * (-a).exp()
}

/// Continuous Fourier transform of [`ricker`], real and even:
/// `2 f² / (√π f_c³) · exp(-f²/f_c²)`.
pub fn ricker_spectrum(center_frequency: f64, f: f64) -> f64 {
    let x = f / center_frequency;
    2.0 * f * f / (PI.sqrt() * center_frequency.powi(3)) * (-x * x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_is_one() {
        assert_eq!(ricker(5.5e8, 0.0), 1.0);
    }

    #[test]
    fn zero_crossings() {
        let fc = 5.5e8;
        let t0 = 1.0 / (PI * fc * 2f64.sqrt());
        assert!(ricker(fc, t0).abs() < 1e-12);
        assert!(ricker(fc, -t0).abs() < 1e-12);
        assert!(ricker(fc, 0.9 * t0) > 0.0 && ricker(fc, 1.1 * t0) < 0.0);
    }

    #[test]
    fn spectrum_peaks_at_center() {
        let fc = 5.5e8;
        let best = (1..2000)
            .map(|i| i as f64 * 1e6)
            .max_by(|a, b| ricker_spectrum(fc, *a).total_cmp(&ricker_spectrum(fc, *b)))
            .unwrap();
        assert!((best - fc).abs() <= 1e6);
    }

    #[test]
    fn spectrum_matches_numerical_transform() {
        // rectangle-rule Fourier integral of the time-domain pulse
        let fc = 5.5e8;
        let dt = 1e-12;
        for f in [2e8, 5.5e8, 9e8] {
            let mut re = 0.0;
            for i in -20_000..=20_000 {
                let t = i as f64 * dt;
                re += ricker(fc, t) * (2.0 * PI * f * t).cos() * dt;
            }
            assert!((re - ricker_spectrum(fc, f)).abs() < 1e-6 * ricker_spectrum(fc, fc));
        }
    }
}

//! One-dimensional helpers shared by the raster and profile stages.

/// Normalized Gaussian taps truncated at four standard deviations.
pub(crate) fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if !(sigma > 0.0) {
        return vec![1.0];
    }
    let radius = (4.0 * sigma).ceil() as i64;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-0.5 * (i as f64 / sigma).powi(2)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

/// Index into `0..n` with half-sample symmetric reflection (`d c b a | a b c d`).
pub(crate) fn reflect(i: i64, n: usize) -> usize {
    let n = n as i64;
    let period = 2 * n;
    let mut j = i.rem_euclid(period);
    if j >= n {
        j = period - 1 - j;
    }
    j as usize
}

/// Convolution with a symmetric odd-length kernel under reflection.
pub(crate) fn convolve_reflect(data: &[f64], kernel: &[f64]) -> Vec<f64> {
    let n = data.len();
    let r = (kernel.len() / 2) as i64;
    (0..n as i64)
        .map(|i| {
            kernel
                .iter()
                .enumerate()
                .map(|(k, w)| w * data[reflect(i + k as i64 - r, n)])
                .sum()
        })
        .collect()
}

/// Local maxima of `profile` (plateaus count once, at their middle) whose
/// topographic prominence is at least `min_prominence`, thinned so that no
/// two kept peaks are closer than `min_distance` samples; higher peaks win.
/// Returned in increasing index order.
pub(crate) fn find_peaks(profile: &[f64], min_prominence: f64, min_distance: f64) -> Vec<usize> {
    let n = profile.len();
    let mut candidates = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if profile[i] > profile[i - 1] {
            let mut j = i;
            while j + 1 < n && profile[j + 1] == profile[i] {
                j += 1;
            }
            if j + 1 < n && profile[j + 1] < profile[i] {
                candidates.push((i + j) / 2);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    let mut kept: Vec<usize> = candidates
        .into_iter()
        .filter(|&p| prominence(profile, p) >= min_prominence)
        .collect();
    kept.sort_by(|&a, &b| profile[b].total_cmp(&profile[a]).then(a.cmp(&b)));
    let mut chosen: Vec<usize> = Vec::new();
    for p in kept {
        if chosen.iter().all(|&q| (p as f64 - q as f64).abs() >= min_distance) {
            chosen.push(p);
        }
    }
    chosen.sort_unstable();
    chosen
}

fn prominence(profile: &[f64], peak: usize) -> f64 {
    let v = profile[peak];
    let mut left = v;
    for k in (0..peak).rev() {
        if profile[k] > v {
            break;
        }
        left = left.min(profile[k]);
    }
    let mut right = v;
    for &x in &profile[peak + 1..] {
        if x > v {
            break;
        }
        right = right.min(x);
    }
    v - left.max(right)
}

/// Sub-sample position of a peak from a parabola through its neighbors.
pub(crate) fn refine_peak(profile: &[f64], i: usize) -> f64 {
    if i == 0 || i + 1 >= profile.len() {
        return i as f64;
    }
    let (a, b, c) = (profile[i - 1], profile[i], profile[i + 1]);
    let denom = a - 2.0 * b + c;
    if denom >= 0.0 {
        return i as f64;
    }
    i as f64 + (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
}

/// Value at quantile `q` in `[0, 1]` by linear interpolation of the sorted data.
pub(crate) fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_sums_to_one() {
        let k = gaussian_kernel(3.0);
        assert_eq!(k.len(), 25);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reflection_mirrors_about_the_edges() {
        assert_eq!(reflect(-1, 5), 0);
        assert_eq!(reflect(-2, 5), 1);
        assert_eq!(reflect(5, 5), 4);
        assert_eq!(reflect(6, 5), 3);
        assert_eq!(reflect(-12, 3), 0);
    }

    #[test]
    fn constant_is_unchanged_by_smoothing() {
        let out = convolve_reflect(&[2.0; 7], &gaussian_kernel(3.0));
        assert!(out.iter().all(|v| (v - 2.0).abs() < 1e-12));
    }

    #[test]
    fn peaks_respect_prominence_and_distance() {
        let p = [0.0, 1.0, 0.0, 0.9, 0.85, 0.95, 0.0, 3.0, 3.0, 3.0, 0.0];
        // the 0.9 shoulder rises only 0.05 above the dip next to it
        assert_eq!(find_peaks(&p, 0.5, 1.0), vec![1, 5, 8]);
        assert_eq!(find_peaks(&p, 0.5, 4.0), vec![1, 8]);
        assert!(find_peaks(&[1.0; 9], 0.0, 1.0).is_empty());
    }

    #[test]
    fn parabola_finds_the_true_vertex() {
        let p: Vec<f64> = (0..9).map(|i| -(i as f64 - 4.3).powi(2)).collect();
        assert!((refine_peak(&p, 4) - 4.3).abs() < 1e-12);
    }

    #[test]
    fn quantile_interpolates() {
        assert_eq!(quantile(&[3.0, 1.0, 2.0], 0.5), 2.0);
        assert_eq!(quantile(&[0.0, 10.0], 0.25), 2.5);
    }
}

//! Automatic saturation detection for cooling curves.

/// First index at which the two trailing windows (each `fraction` of the
/// series long) have means differing by less than one combined standard error.
///
/// Returns the index of the last sample of the second window, or `None` if the
/// series never saturates under this rule.
pub fn saturation_index(values: &[f64], fraction: f64) -> Option<usize> {
    let w = ((values.len() as f64 * fraction).round() as usize).max(2);
    if values.len() < 2 * w {
        return None;
    }
    let stats = |s: &[f64]| {
        let n = s.len() as f64;
        let mean = s.iter().sum::<f64>() / n;
        let var = s.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        (mean, var / n)
    };
    (2 * w..=values.len()).find_map(|end| {
        let (ma, va) = stats(&values[end - 2 * w..end - w]);
        let (mb, vb) = stats(&values[end - w..end]);
        ((ma - mb).abs() < (va + vb).sqrt()).then_some(end - 1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn detects_end_of_exponential_cooling() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v: Vec<f64> = (0..1000).map(|i| 0.25 + 5.0 * (-(i as f64) / 50.0).exp() + 0.02 * (rng.random::<f64>() - 0.5)).collect();
        let k = saturation_index(&v, 0.1).unwrap();
        assert!(k > 250 && k < 700, "{k}");
    }

    #[test]
    fn linear_drift_never_saturates() {
        let v: Vec<f64> = (0..500).map(|i| i as f64).collect();
        assert_eq!(saturation_index(&v, 0.1), None);
        assert_eq!(saturation_index(&[1.0, 2.0], 0.1), None);
    }
}

//! Sample statistics over ensembles of paths.

/// Mean and standard error of the mean (zero error for a single sample).
pub fn mean_and_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Leave-one-out jackknife for an estimator over `n` independent samples.
///
/// `estimate(None)` is evaluated on the full set; `estimate(Some(i))` with
/// sample `i` removed. Returns the full-sample value and the jackknife error.
/// With fewer than two samples the error is zero.
pub fn jackknife(n: usize, mut estimate: impl FnMut(Option<usize>) -> f64) -> (f64, f64) {
    let full = estimate(None);
    if n < 2 {
        return (full, 0.0);
    }
    let partial: Vec<f64> = (0..n).map(|i| estimate(Some(i))).collect();
    let mean = partial.iter().sum::<f64>() / n as f64;
    let var = partial.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() * (n - 1) as f64 / n as f64;
    (full, var.sqrt())
}

/// Mean of `values` with entry `skip` left out.
pub fn mean_excluding(values: &[f64], skip: Option<usize>) -> f64 {
    match skip {
        None => values.iter().sum::<f64>() / values.len() as f64,
        Some(i) => (values.iter().sum::<f64>() - values[i]) / (values.len() - 1) as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_error() {
        let (m, e) = mean_and_error(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        // sd = sqrt(5/3)
        assert!((e - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_error(&[7.0]), (7.0, 0.0));
    }

    #[test]
    fn jackknife_of_mean_equals_standard_error() {
        let v = [0.3, 1.7, 2.2, -0.4, 5.0, 1.1];
        let (m, e) = jackknife(v.len(), |skip| mean_excluding(&v, skip));
        let (m2, e2) = mean_and_error(&v);
        assert!((m - m2).abs() < 1e-14);
        assert!((e - e2).abs() < 1e-12);
    }
}

use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("each sample needs at least 2 values (got {0} and {1})")]
    TooFewValues(usize, usize),
    #[error("both samples have zero variance; the statistic is undefined")]
    ZeroVariance,
    #[error("sample contains a non-finite value")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult {
    pub t: f64,
    /// Welch–Satterthwaite degrees of freedom.
    pub df: f64,
    /// Two-sided, 95% confidence.
    pub significant: bool,
    pub mean_a: f64,
    pub var_a: f64,
    pub n_a: usize,
    pub mean_b: f64,
    pub var_b: f64,
    pub n_b: usize,
}

impl TTestResult {
    /// One-sided test of `mean_a > mean_b` at confidence `level`.
    pub fn greater_at(&self, level: f64) -> bool {
        self.t > t_quantile(level, self.df)
    }

    /// `sqrt(v_a/n_a + v_b/n_b)`.
    pub fn std_error(&self) -> f64 {
        (self.var_a / self.n_a as f64 + self.var_b / self.n_b as f64).sqrt()
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Student-t quantile; the normal quantile stands in above 100 degrees of
/// freedom.
pub fn t_quantile(p: f64, df: f64) -> f64 {
    if df > 100.0 {
        // 1.96 and 1.645 for the two levels used here
        let n = statrs::distribution::Normal::standard();
        return n.inverse_cdf(p);
    }
    StudentsT::new(0.0, 1.0, df).expect("df > 0").inverse_cdf(p)
}

pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::TooFewValues(a.len(), b.len()));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (variance(a), variance(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (sa, sb) = (va / na, vb / nb);
    if sa + sb == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let t = (ma - mb) / (sa + sb).sqrt();
    let df = (sa + sb).powi(2) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    Ok(TTestResult {
        t,
        df,
        significant: t.abs() > t_quantile(0.975, df),
        mean_a: ma,
        var_a: va,
        n_a: a.len(),
        mean_b: mb,
        var_b: vb,
        n_b: b.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn shifted_by_one() {
        let r = welch_t_test(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert!((r.t + 1.0).abs() < 1e-12);
        assert!((r.df - 8.0).abs() < 1e-12);
        assert!(!r.significant);
    }

    #[test]
    fn identical_samples() {
        let a = [1.0, 3.0, 2.0];
        let r = welch_t_test(&a, &a).unwrap();
        assert_eq!(r.t, 0.0);
        assert!(!r.significant);
    }

    #[test]
    fn far_apart() {
        let a = [1.0, 1.001, 0.999, 1.0];
        let b: Vec<f64> = a.iter().map(|x| x + 100.0).collect();
        let r = welch_t_test(&a, &b).unwrap();
        assert!(r.significant);
        assert!(welch_t_test(&b, &a).unwrap().greater_at(0.95));
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(welch_t_test(&[1.0], &[1.0, 2.0]), Err(StatsError::TooFewValues(1, 2)));
        assert_eq!(welch_t_test(&[1.0, 1.0], &[2.0, 2.0]), Err(StatsError::ZeroVariance));
        assert_eq!(welch_t_test(&[1.0, f64::NAN], &[2.0, 3.0]), Err(StatsError::NonFinite));
    }

    #[test]
    fn quantiles() {
        assert!((t_quantile(0.975, 1000.0) - 1.959964).abs() < 1e-5);
        assert!((t_quantile(0.975, 10.0) - 2.228139).abs() < 1e-5);
        assert!((t_quantile(0.95, 8.0) - 1.859548).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn antisymmetric_and_shift_invariant(
            a in prop::collection::vec(-10.0f64..10.0, 2..12),
            b in prop::collection::vec(-10.0f64..10.0, 2..12),
            shift in -50.0f64..50.0,
        ) {
            prop_assume!(variance(&a) + variance(&b) > 1e-6);
            let r = welch_t_test(&a, &b).unwrap();
            let s = welch_t_test(&b, &a).unwrap();
            prop_assert!((r.t + s.t).abs() < 1e-9);
            prop_assert!((r.df - s.df).abs() < 1e-9);
            let a2: Vec<f64> = a.iter().map(|x| x + shift).collect();
            let b2: Vec<f64> = b.iter().map(|x| x + shift).collect();
            let u = welch_t_test(&a2, &b2).unwrap();
            prop_assert!((r.t - u.t).abs() < 1e-6 * (1.0 + r.t.abs()));
            prop_assert!(r.df > 0.0);
        }
    }
}

//! Two-sided paired Student's t-test.

use crate::{Error, Result};

const BETA_TOLERANCE: f64 = 1e-12;
const BETA_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult {
    pub t_statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub significant_at_05: bool,
    /// All differences were equal and nonzero: `t` is infinite and `p` is 0.
    pub degenerate_variance: bool,
}

/// Paired t-test on fold-aligned samples `a` and `b` (differences `a - b`).
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::TooFewPairs(n));
    }
    let df = n - 1;
    let mean = a.iter().zip(b).map(|(x, y)| x - y).sum::<f64>() / n as f64;
    let ss: f64 = a.iter().zip(b).map(|(x, y)| (x - y - mean) * (x - y - mean)).sum();
    let sd = libm::sqrt(ss / df as f64);

    if sd == 0.0 {
        let (t, p, degenerate) =
            if mean == 0.0 { (0.0, 1.0, false) } else { (f64::INFINITY.copysign(mean), 0.0, true) };
        return Ok(TTestResult {
            t_statistic: t,
            degrees_of_freedom: df,
            p_value: p,
            significant_at_05: p < 0.05,
            degenerate_variance: degenerate,
        });
    }

    let t = mean / (sd / libm::sqrt(n as f64));
    let p = student_t_two_sided(t, df as f64);
    Ok(TTestResult {
        t_statistic: t,
        degrees_of_freedom: df,
        p_value: p,
        significant_at_05: p < 0.05,
        degenerate_variance: false,
    })
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    regularized_incomplete_beta(df / 2.0, 0.5, x).clamp(0.0, 1.0)
}

/// `I_x(a, b)` by continued fraction.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b)
        + a * libm::log(x)
        + b * libm::log1p(-x);
    let front = libm::exp(ln_front);
    // the fraction converges fast on this side of the mode
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=BETA_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < BETA_TOLERANCE {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_to_five_differences() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [0.0; 5];
        let r = paired_t_test(&a, &b).unwrap();
        assert!((r.t_statistic - 4.242640687119285).abs() < 1e-9);
        assert_eq!(r.degrees_of_freedom, 4);
        assert!((r.p_value - 0.013235599563682695).abs() < 1e-6);
        assert!(r.significant_at_05);
    }

    #[test]
    fn equal_samples() {
        let a = [0.3, 0.4, 0.5];
        let r = paired_t_test(&a, &a).unwrap();
        assert_eq!(r.t_statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.significant_at_05);
    }

    #[test]
    fn constant_nonzero_difference_is_degenerate() {
        let r = paired_t_test(&[1.0, 2.0, 3.0], &[0.5, 1.5, 2.5]).unwrap();
        assert!(r.degenerate_variance);
        assert_eq!(r.p_value, 0.0);
        assert_eq!(r.t_statistic, f64::INFINITY);
        let r = paired_t_test(&[0.5, 1.5, 2.5], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.t_statistic, f64::NEG_INFINITY);
    }

    #[test]
    fn swapped_samples_negate_t() {
        let a = [0.51, 0.49, 0.55, 0.50, 0.53];
        let b = [0.47, 0.48, 0.50, 0.49, 0.52];
        let ab = paired_t_test(&a, &b).unwrap();
        let ba = paired_t_test(&b, &a).unwrap();
        assert_eq!(ab.t_statistic, -ba.t_statistic);
        assert_eq!(ab.p_value, ba.p_value);
    }

    #[test]
    fn input_errors() {
        assert_eq!(
            paired_t_test(&[1.0, 2.0], &[1.0]),
            Err(Error::LengthMismatch { left: 2, right: 1 })
        );
        assert_eq!(paired_t_test(&[1.0], &[2.0]), Err(Error::TooFewPairs(1)));
    }

    #[test]
    fn beta_edges() {
        assert_eq!(regularized_incomplete_beta(2.0, 0.5, 0.0), 0.0);
        assert_eq!(regularized_incomplete_beta(2.0, 0.5, 1.0), 1.0);
        // I_x(1, 1) = x
        assert!((regularized_incomplete_beta(1.0, 1.0, 0.3) - 0.3).abs() < 1e-12);
        assert_eq!(student_t_two_sided(0.0, 4.0), 1.0);
    }

    #[test]
    fn p_decreases_with_t() {
        for df in [1.0, 2.0, 4.0, 9.0, 30.0] {
            let mut last = 1.0;
            for i in 1..60 {
                let p = student_t_two_sided(i as f64 * 0.25, df);
                assert!(p < last, "df={df} t={}", i as f64 * 0.25);
                last = p;
            }
        }
    }
}

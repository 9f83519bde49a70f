use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::special::student_t_cdf;

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties. NaN when either
/// input is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (ranks(x), ranks(y));
    let (mx, _) = mean_sd(&rx);
    let (my, _) = mean_sd(&ry);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TostResult {
    pub delta: f64,
    pub mean_difference: f64,
    pub stderr: f64,
    pub df: f64,
    /// p-value against `H0: diff <= -delta`.
    pub p_lower: f64,
    /// p-value against `H0: diff >= +delta`.
    pub p_upper: f64,
    pub equivalent: bool,
}

/// Two one-sided Welch t-tests of `mean(a) - mean(b)` against `±delta`.
pub fn tost_equivalence(a: &[f64], b: &[f64], delta: f64) -> Result<TostResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(invalid("samples", "each sample needs at least two values"));
    }
    if !(delta > 0.0) {
        return Err(invalid("delta", "must be positive"));
    }
    let (ma, sa) = mean_sd(a);
    let (mb, sb) = mean_sd(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (sa * sa / na, sb * sb / nb);
    let se = (va + vb).sqrt();
    if se == 0.0 {
        return Err(Error::DegenerateTest("both samples have zero variance".into()));
    }
    let df = (va + vb).powi(2) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    let diff = ma - mb;
    let p_lower = 1.0 - student_t_cdf((diff + delta) / se, df);
    let p_upper = student_t_cdf((diff - delta) / se, df);
    Ok(TostResult {
        delta,
        mean_difference: diff,
        stderr: se,
        df,
        p_lower,
        p_upper,
        equivalent: p_lower < 0.05 && p_upper < 0.05,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;
    use rand_distr::{Distribution, Normal};
    use statrs::distribution::{ContinuousCDF, StudentsT};

    /// Reference TOST built on an independent t distribution.
    fn reference(a: &[f64], b: &[f64], delta: f64) -> (f64, f64) {
        let m = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
        let v = |x: &[f64]| {
            let mu = m(x);
            x.iter().map(|t| (t - mu).powi(2)).sum::<f64>() / (x.len() - 1) as f64 / x.len() as f64
        };
        let (va, vb) = (v(a), v(b));
        let se = (va + vb).sqrt();
        let df = (va + vb).powi(2) / (va * va / (a.len() - 1) as f64 + vb * vb / (b.len() - 1) as f64);
        let t = StudentsT::new(0.0, 1.0, df).unwrap();
        let d = m(a) - m(b);
        (t.sf((d + delta) / se), t.cdf((d - delta) / se))
    }

    #[test]
    fn matches_reference_on_fixed_seeds() {
        for seed in 0..5 {
            let mut rng = derive_stream(300, seed);
            let a: Vec<f64> = (0..50).map(|_| Normal::new(0.0, 1.0).unwrap().sample(&mut rng)).collect();
            let b: Vec<f64> = (0..50).map(|_| Normal::new(0.01, 1.0).unwrap().sample(&mut rng)).collect();
            let r = tost_equivalence(&a, &b, 0.05).unwrap();
            let (pl, pu) = reference(&a, &b, 0.05);
            assert!((r.p_lower - pl).abs() < 1e-9, "{} {}", r.p_lower, pl);
            assert!((r.p_upper - pu).abs() < 1e-9);
            // A 0.05 margin is far inside the noise of n = 50 unit normals.
            assert!(!r.equivalent);
        }
    }

    #[test]
    fn identical_samples_are_equivalent() {
        let a: Vec<f64> = (0..40).map(|i| (i % 7) as f64 * 0.01).collect();
        let r = tost_equivalence(&a, &a, 0.05).unwrap();
        assert_eq!(r.mean_difference, 0.0);
        assert!(r.equivalent);
        assert!((r.p_lower - r.p_upper).abs() < 1e-12);
    }

    #[test]
    fn shifted_samples_are_not() {
        let a: Vec<f64> = (0..40).map(|i| (i % 3) as f64 * 1e-4).collect();
        let b: Vec<f64> = a.iter().map(|v| v + 0.1).collect();
        assert!(!tost_equivalence(&a, &b, 0.05).unwrap().equivalent);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(matches!(tost_equivalence(&[1.0, 1.0], &[1.0, 1.0], 0.1), Err(Error::DegenerateTest(_))));
        assert!(tost_equivalence(&[1.0], &[1.0, 2.0], 0.1).is_err());
        assert!(tost_equivalence(&[1.0, 2.0], &[1.0, 2.0], 0.0).is_err());
    }

    #[test]
    fn spearman_cases() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]) - 1.0).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
        // ties get average ranks: ranks of y are [1.5, 1.5, 3]
        let r = spearman(&[1.0, 2.0, 3.0], &[5.0, 5.0, 9.0]);
        assert!((r - 0.866_025_403_784_438_6).abs() < 1e-12);
        assert!(spearman(&[1.0, 2.0], &[4.0, 4.0]).is_nan());
    }
}

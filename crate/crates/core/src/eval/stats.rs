use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::num::{quantile_sorted, Real};

/// Five-number boxplot summary plus the mean. Quartiles are type-7.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary<F> {
    pub min: F,
    pub q1: F,
    pub median: F,
    pub q3: F,
    pub max: F,
    pub mean: F,
}

impl<F: Real> Summary<F> {
    pub fn of(values: &[F]) -> Self {
        assert!(!values.is_empty(), "summary of empty data");
        let mut s = values.to_vec();
        s.sort_by(|a, b| a.as_f64().total_cmp(&b.as_f64()));
        Summary {
            min: s[0],
            q1: quantile_sorted(&s, F::lit(0.25)),
            median: quantile_sorted(&s, F::lit(0.5)),
            q3: quantile_sorted(&s, F::lit(0.75)),
            max: s[s.len() - 1],
            mean: s.iter().copied().sum::<F>() / F::from_count(s.len()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UTestResult {
    /// U for the first sample: pairs `(x, y)` with `x > y`, ties counting half.
    pub u_statistic: f64,
    pub z: f64,
    pub p_two_sided: f64,
    pub n_a: usize,
    pub n_b: usize,
    /// Every observation was equal; `z = 0` and `p = 1`.
    pub all_tied: bool,
}

/// Two-sided Mann-Whitney U test: midranks, tie-corrected normal
/// approximation with a 0.5 continuity correction.
pub fn mann_whitney<F: Real>(a: &[F], b: &[F]) -> UTestResult {
    assert!(!a.is_empty() && !b.is_empty(), "both samples must be non-empty");
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|x| (x.as_f64(), true))
        .chain(b.iter().map(|x| (x.as_f64(), false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        // Ranks i+1 ..= j share their mean.
        let midrank = (i + 1 + j) as f64 / 2.0;
        let in_a = pooled[i..j].iter().filter(|p| p.1).count();
        rank_sum_a += midrank * in_a as f64;
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }

    let (naf, nbf, nf) = (na as f64, nb as f64, n as f64);
    let u = rank_sum_a - naf * (naf + 1.0) / 2.0;
    let mu = naf * nbf / 2.0;
    let var = naf * nbf / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    if n < 2 || var <= 0.0 {
        return UTestResult {
            u_statistic: u,
            z: 0.0,
            p_two_sided: 1.0,
            n_a: na,
            n_b: nb,
            all_tied: true,
        };
    }
    let diff = u - mu;
    let z = diff.signum() * (diff.abs() - 0.5).max(0.0) / var.sqrt();
    let p = erfc(z.abs() / std::f64::consts::SQRT_2).clamp(f64::MIN_POSITIVE, 1.0);
    UTestResult {
        u_statistic: u,
        z,
        p_two_sided: p,
        n_a: na,
        n_b: nb,
        all_tied: false,
    }
}

use super::{FeatureError, SelectionMethod, SelectionResult, SparseFeatureMatrix};
use crate::corpus::Class;
use crate::num::Real;

pub const DEFAULT_CHI2_K: usize = 200;

/// Count-based chi-squared statistic of each feature against the class.
///
/// For feature `f`, `O_c` is the sum of `f`'s values over class `c` and
/// `E_c = total_f * T_c / T`, where `T_c` is the summed mass of all features
/// in class `c`. A feature with no mass scores 0.
pub fn chi2_scores<F: Real>(m: &SparseFeatureMatrix<F>) -> Result<Vec<F>, FeatureError> {
    let mut observed = vec![[F::zero(); 2]; m.num_features];
    let mut class_mass = [F::zero(); 2];
    for r in &m.rows {
        let c = r.label.index();
        for &(o, v) in &r.values {
            observed[o as usize][c] = observed[o as usize][c] + v;
            class_mass[c] = class_mass[c] + v;
        }
    }
    for c in Class::BOTH {
        if class_mass[c.index()] <= F::zero() {
            return Err(FeatureError::DegenerateClass(c));
        }
    }
    let total = class_mass[0] + class_mass[1];
    Ok(observed
        .iter()
        .map(|o| {
            let total_f = o[0] + o[1];
            if total_f == F::zero() {
                return F::zero();
            }
            (0..2)
                .map(|c| {
                    let e = total_f * class_mass[c] / total;
                    (o[c] - e) * (o[c] - e) / e
                })
                .sum()
        })
        .collect())
}

/// Keeps the `k` highest-scoring features, ties to the lower ordinal.
pub fn select_chi2<F: Real>(m: &SparseFeatureMatrix<F>, k: usize) -> Result<SelectionResult<F>, FeatureError> {
    let scores = chi2_scores(m)?;
    let mut order: Vec<u32> = (0..m.num_features as u32).collect();
    order.sort_by(|&a, &b| {
        scores[b as usize]
            .partial_cmp(&scores[a as usize])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut kept: Vec<u32> = order.into_iter().take(k).collect();
    kept.sort_unstable();
    Ok(SelectionResult {
        method: SelectionMethod::Chi2,
        kept,
        scores,
        merit: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::test_util::matrix;

    #[test]
    fn bug_only_feature() {
        // Feature 0 only in BUG; class masses are balanced (10 each).
        let m = matrix(&[(Class::Bug, &[(0, 10.0)]), (Class::NonBug, &[(1, 10.0)])], 2);
        let s = chi2_scores(&m).unwrap();
        assert!((s[0] - 10.0).abs() < 1e-12);
        assert!((s[1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn proportional_feature_scores_zero() {
        // Class masses 6 : 3; both features split 2 : 1 as well.
        let m = matrix(
            &[
                (Class::Bug, &[(0, 2.0), (1, 4.0)]),
                (Class::NonBug, &[(0, 1.0), (1, 2.0)]),
            ],
            2,
        );
        let s = chi2_scores(&m).unwrap();
        assert!(s[0].abs() < 1e-12 && s[1].abs() < 1e-12, "{s:?}");
    }

    #[test]
    fn contingency_fixture() {
        // Masses (8, 4); feature 0 total 6 → E = (4, 2), O = (3, 3):
        // 1/4 + 1/2 = 0.75. Feature 1 total 6 → O = (5, 1): 1/4 + 1/2.
        let m = matrix(
            &[
                (Class::Bug, &[(0, 3.0), (1, 5.0)]),
                (Class::NonBug, &[(0, 3.0), (1, 1.0)]),
            ],
            2,
        );
        let s = chi2_scores(&m).unwrap();
        assert!((s[0] - 0.75).abs() < 1e-12);
        assert!((s[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn degenerate_class() {
        let m = matrix(&[(Class::Bug, &[(0, 1.0)]), (Class::NonBug, &[])], 1);
        assert!(matches!(
            chi2_scores(&m),
            Err(FeatureError::DegenerateClass(Class::NonBug))
        ));
    }

    #[test]
    fn ties_prefer_lower_ordinal() {
        let m = matrix(
            &[
                (Class::Bug, &[(0, 1.0), (1, 1.0), (2, 5.0)]),
                (Class::NonBug, &[(3, 7.0)]),
            ],
            4,
        );
        let s = select_chi2(&m, 1).unwrap();
        assert_eq!(s.kept.len(), 1);
        let top = s.kept[0] as usize;
        assert!(s.scores.iter().all(|&v| v <= s.scores[top]));
        // all four features score exactly 1
        let eq = matrix(
            &[
                (Class::Bug, &[(0, 1.0), (1, 1.0)]),
                (Class::NonBug, &[(2, 1.0), (3, 1.0)]),
            ],
            4,
        );
        assert_eq!(select_chi2(&eq, 1).unwrap().kept, [0]);
        assert_eq!(select_chi2(&eq, 3).unwrap().kept, [0, 1, 2]);
    }

    #[test]
    fn nested_and_identity() {
        let m = matrix(
            &[
                (Class::Bug, &[(0, 3.0), (1, 1.0), (3, 2.0)]),
                (Class::Bug, &[(0, 1.0), (2, 2.0)]),
                (Class::NonBug, &[(1, 4.0), (2, 1.0), (3, 2.0)]),
            ],
            4,
        );
        let mut prev: Vec<u32> = Vec::new();
        for k in 1..=4 {
            let kept = select_chi2(&m, k).unwrap().kept;
            assert!(prev.iter().all(|p| kept.contains(p)));
            prev = kept;
        }
        assert_eq!(prev, [0, 1, 2, 3]);
    }
}

use alloc::vec::Vec;

use crate::{Error, Result};

/// Maximum number of violations kept in a report.
pub const MAX_REPORTED: usize = 10_000;

/// Two distinct sets of `q` levels whose energies sum to the same value.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Violation {
    pub q: usize,
    pub set_a: Vec<usize>,
    pub set_b: Vec<usize>,
    pub sum_a: f64,
    pub sum_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GenericityReport {
    pub q_checked: usize,
    /// At most [`MAX_REPORTED`] entries; see `violation_count`.
    pub violations: Vec<Violation>,
    pub violation_count: usize,
    /// Pairs of level indices closer than the tolerance.
    pub degenerate_levels: Vec<(usize, usize)>,
    pub passed: bool,
}

/// Every multiset of `q` levels (indices non-decreasing) with its sum.
/// Repeats are needed: `E_1 - E_0 = E_2 - E_1` is the collision of
/// `{0, 2}` with `{1, 1}`.
fn subset_sums(levels: &[f64], q: usize) -> Vec<(f64, [u32; 3])> {
    let d = levels.len();
    let mut out = Vec::new();
    if d == 0 || q == 0 || q > 3 {
        return out;
    }
    let mut idx = [0usize; 3];
    loop {
        let mut key = [u32::MAX; 3];
        let mut sum = 0.0;
        for j in 0..q {
            key[j] = idx[j] as u32;
            sum += levels[idx[j]];
        }
        out.push((sum, key));
        let Some(i) = (0..q).rev().find(|&i| idx[i] + 1 < d) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..q {
            idx[j] = idx[i];
        }
    }
}

fn key_set(key: &[u32; 3]) -> Vec<usize> {
    key.iter().filter(|&&k| k != u32::MAX).map(|&k| k as usize).collect()
}

/// Checks that no two distinct multisets of `q <= q_max` levels share an
/// energy sum to within `tol`, by sorting each list of sums and comparing
/// neighbours.
pub fn check_genericity(levels: &[f64], q_max: usize, tol: f64) -> Result<GenericityReport> {
    if q_max == 0 || q_max > 3 {
        return Err(Error::GenericityOrder(q_max));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let mut order: Vec<usize> = (0..levels.len()).collect();
    order.sort_by(|&a, &b| levels[a].total_cmp(&levels[b]).then(a.cmp(&b)));
    let degenerate_levels: Vec<(usize, usize)> = order
        .windows(2)
        .filter(|w| (levels[w[1]] - levels[w[0]]).abs() <= tol)
        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
        .collect();

    let mut violations = Vec::new();
    let mut violation_count = 0;
    for q in 2..=q_max {
        let mut sums = subset_sums(levels, q);
        sums.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        for w in sums.windows(2) {
            if (w[1].0 - w[0].0).abs() <= tol {
                violation_count += 1;
                if violations.len() < MAX_REPORTED {
                    violations.push(Violation {
                        q,
                        set_a: key_set(&w[0].1),
                        set_b: key_set(&w[1].1),
                        sum_a: w[0].0,
                        sum_b: w[1].0,
                    });
                }
            }
        }
    }
    let passed = violation_count == 0 && degenerate_levels.is_empty();
    Ok(GenericityReport { q_checked: q_max, violations, violation_count, degenerate_levels, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multisets_enumerate_all() {
        let e = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(subset_sums(&e[..4], 2).len(), 10);
        assert_eq!(subset_sums(&e, 3).len(), 35);
        assert_eq!(subset_sums(&e[..2], 3).len(), 4);
        assert_eq!(subset_sums(&e, 3)[34], (12.0, [4, 4, 4]));
        assert_eq!(subset_sums(&e, 2)[1], (1.0, [0, 1, u32::MAX]));
    }

    #[test]
    fn equally_spaced_levels_fail() {
        let r = check_genericity(&[0.0, 1.0, 2.0], 2, 1e-10).unwrap();
        assert!(!r.passed);
        assert!(r.degenerate_levels.is_empty());
        assert_eq!(r.violation_count, 1);
        assert_eq!(r.violations[0].set_a, alloc::vec![0, 2]);
        assert_eq!(r.violations[0].set_b, alloc::vec![1, 1]);
    }

    #[test]
    fn irrational_spacing_passes() {
        let r = check_genericity(&[0.0, 1.0, libm::sqrt(2.0)], 2, 1e-10).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn degenerate_levels_are_reported() {
        let r = check_genericity(&[0.0, 0.5, 0.5], 2, 1e-10).unwrap();
        assert_eq!(r.degenerate_levels, alloc::vec![(1, 2)]);
        assert!(!r.passed);
    }

    #[test]
    fn single_level_is_generic() {
        assert!(check_genericity(&[3.0], 3, 1e-10).unwrap().passed);
    }

    #[test]
    fn order_limits() {
        assert_eq!(check_genericity(&[0.0], 4, 1e-10), Err(Error::GenericityOrder(4)));
        assert!(check_genericity(&[0.0], 0, 1e-10).is_err());
    }
}

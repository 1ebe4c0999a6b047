//! Assignments of facilities to locations and the QAP goal function.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::instance::QapInstance;
use crate::matrix::SquareMatrix;

/// A bijection from facilities to locations: `perm[i]` is the location of
/// facility `i`.
///
/// The matrix view has rows indexed by location and columns by facility, so
/// `X[k][i] = 1` exactly when `perm[i] = k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    perm: Vec<usize>,
}

impl Assignment {
    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect() }
    }

    pub fn from_perm(perm: Vec<usize>) -> Result<Self, Error> {
        if !is_permutation(&perm) {
            return Err(Error::NotAPermutation("indices must cover 0..n exactly once"));
        }
        Ok(Self { perm })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.perm.len()
    }

    #[inline]
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn into_perm(self) -> Vec<usize> {
        self.perm
    }

    /// The 0/1 permutation-matrix view.
    pub fn matrix(&self) -> SquareMatrix {
        let n = self.n();
        let mut x = SquareMatrix::zeros(n);
        for (facility, &location) in self.perm.iter().enumerate() {
            x[(location, facility)] = 1.0;
        }
        x
    }
}

pub fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter().all(|&p| p < seen.len() && !core::mem::replace(&mut seen[p], true))
}

/// Recovers the assignment from a permutation matrix, mapping facility `j`
/// to the row holding the single 1 of column `j`.
pub fn matrix_to_assignment(x: &SquareMatrix) -> Result<Assignment, Error> {
    let n = x.n();
    if x.as_slice().iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::NotAPermutation("entries must be 0 or 1"));
    }
    let mut perm = vec![0; n];
    for (c, slot) in perm.iter_mut().enumerate() {
        let sum: f64 = (0..n).map(|r| x[(r, c)]).sum();
        if sum != 1.0 {
            return Err(Error::InvalidPermutationMatrix { axis: "column", index: c, sum });
        }
        *slot = (0..n).find(|&r| x[(r, c)] == 1.0).expect("column holds a one");
    }
    for r in 0..n {
        let sum: f64 = x.row(r).iter().sum();
        if sum != 1.0 {
            return Err(Error::InvalidPermutationMatrix { axis: "row", index: r, sum });
        }
    }
    Ok(Assignment { perm })
}

/// Goal function `Σ_i Σ_j flow[i][j] · distance[perm[i]][perm[j]]`.
///
/// Integer instances are summed in `i64`, so QAPLIB costs come out exact.
pub fn evaluate_cost(instance: &QapInstance, a: &Assignment) -> Result<f64, Error> {
    if a.n() != instance.n() {
        return Err(Error::DimensionMismatch { expected: instance.n(), found: a.n() });
    }
    Ok(cost_of(instance, a.perm()))
}

/// Unchecked goal function over a raw permutation slice of length `n`.
pub(crate) fn cost_of(instance: &QapInstance, perm: &[usize]) -> f64 {
    let n = instance.n();
    debug_assert_eq!(perm.len(), n);
    if let Some(w) = instance.integral() {
        let mut total: i64 = 0;
        for (i, &pi) in perm.iter().enumerate() {
            let flow = &w.flow[i * n..(i + 1) * n];
            let dist = &w.distance[pi * n..(pi + 1) * n];
            for (f, &pj) in flow.iter().zip(perm) {
                total += f * dist[pj];
            }
        }
        total as f64
    } else {
        let flow = instance.flow();
        let distance = instance.distance();
        let mut total = 0.0;
        for (i, &pi) in perm.iter().enumerate() {
            let dist = distance.row(pi);
            for (f, &pj) in flow.row(i).iter().zip(perm) {
                total += f * dist[pj];
            }
        }
        total
    }
}

/// Relative gap `(cost − reference) / reference`.
pub fn gap(cost: f64, reference: f64) -> Result<f64, Error> {
    if reference.is_nan() || reference <= 0.0 {
        return Err(Error::NonPositiveReference(reference));
    }
    Ok((cost - reference) / reference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;
    use proptest::prelude::*;

    fn two_by_two() -> QapInstance {
        parse_instance("2  0 1  1 0   0 3  3 0").unwrap()
    }

    /// Four-index sum over the binary variables x_ki x_lj.
    fn quadruple_sum(inst: &QapInstance, x: &SquareMatrix) -> f64 {
        let n = inst.n();
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        total += inst.flow()[(i, j)] * inst.distance()[(k, l)] * x[(k, i)] * x[(l, j)];
                    }
                }
            }
        }
        total
    }

    #[test]
    fn hand_sum_small_instance() {
        let cost = evaluate_cost(&two_by_two(), &Assignment::identity(2)).unwrap();
        assert_eq!(cost, 6.0);
    }

    #[test]
    fn dimension_mismatch() {
        let err = evaluate_cost(&two_by_two(), &Assignment::identity(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn identity_matrix_roundtrip() {
        let a = matrix_to_assignment(&SquareMatrix::identity(3)).unwrap();
        assert_eq!(a.perm(), &[0, 1, 2]);
    }

    #[test]
    fn worked_example_matrix() {
        let x = SquareMatrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]]).unwrap();
        let a = matrix_to_assignment(&x).unwrap();
        assert_eq!(a.perm(), &[0, 2, 1]);
        assert_eq!(a.matrix(), x);
    }

    #[test]
    fn invalid_matrix_column_sum() {
        let x = SquareMatrix::from_rows(&[[1.0, 0.0], [1.0, 0.0]]).unwrap();
        assert_eq!(
            matrix_to_assignment(&x).unwrap_err(),
            Error::InvalidPermutationMatrix { axis: "column", index: 0, sum: 2.0 }
        );
        let half = SquareMatrix::from_rows(&[[0.5, 0.5], [0.5, 0.5]]).unwrap();
        assert!(matrix_to_assignment(&half).is_err());
    }

    #[test]
    fn from_perm_validates() {
        assert!(Assignment::from_perm(vec![1, 0, 2]).is_ok());
        assert!(Assignment::from_perm(vec![1, 1, 2]).is_err());
        assert!(Assignment::from_perm(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn gap_values() {
        assert_eq!(gap(9552.0, 9552.0).unwrap(), 0.0);
        let g = gap(5_429_693.0, 5_426_670.0).unwrap();
        assert!((g - 0.000_557_06).abs() < 1e-8, "{g}");
        let g = gap(530_816_224.0, 498_896_643.0).unwrap();
        assert!((g * 100.0 - 6.40).abs() < 0.005, "{g}");
        assert_eq!(gap(1.0, 0.0), Err(Error::NonPositiveReference(0.0)));
        assert!(gap(1.0, -2.0).is_err());
    }

    #[test]
    fn real_valued_fallback_matches_oracle() {
        let inst = parse_instance("3  0 1.5 2  0.25 0 1  3 2 0   0 1 2  1 0 0.5  2 0.5 0").unwrap();
        assert!(!inst.is_integral());
        let a = Assignment::from_perm(vec![2, 0, 1]).unwrap();
        let cost = evaluate_cost(&inst, &a).unwrap();
        assert!((cost - quadruple_sum(&inst, &a.matrix())).abs() < 1e-12);
    }

    fn instance_and_perm() -> impl Strategy<Value = (QapInstance, Vec<usize>)> {
        (2usize..=7).prop_flat_map(|n| {
            (
                proptest::collection::vec(0u32..50, 2 * n * n),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            )
                .prop_map(move |(vals, perm)| {
                    let vals: Vec<f64> = vals.into_iter().map(f64::from).collect();
                    let flow = SquareMatrix::from_row_major(n, vals[..n * n].to_vec()).unwrap();
                    let dist = SquareMatrix::from_row_major(n, vals[n * n..].to_vec()).unwrap();
                    (QapInstance::new("p", flow, dist).unwrap(), perm)
                })
        })
    }

    proptest! {
        #[test]
        fn cost_matches_quadruple_sum((inst, perm) in instance_and_perm()) {
            let a = Assignment::from_perm(perm).unwrap();
            prop_assert_eq!(evaluate_cost(&inst, &a).unwrap(), quadruple_sum(&inst, &a.matrix()));
        }

        #[test]
        fn matrix_view_roundtrip((_inst, perm) in instance_and_perm()) {
            let a = Assignment::from_perm(perm).unwrap();
            prop_assert_eq!(matrix_to_assignment(&a.matrix()).unwrap(), a);
        }

        /// Relabeling facilities by σ in both the flow matrix and the
        /// assignment leaves the cost unchanged.
        #[test]
        fn facility_relabeling_invariance(((inst, perm), seed) in (instance_and_perm(), any::<u64>())) {
            let n = inst.n();
            let mut sigma: Vec<usize> = (0..n).collect();
            let mut s = seed | 1;
            for i in (1..n).rev() {
                s ^= s << 13; s ^= s >> 7; s ^= s << 17;
                sigma.swap(i, (s % (i as u64 + 1)) as usize);
            }
            let mut flow = SquareMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    flow[(sigma[i], sigma[j])] = inst.flow()[(i, j)];
                }
            }
            let relabeled = QapInstance::new("r", flow, inst.distance().clone()).unwrap();
            let mut new_perm = vec![0; n];
            for i in 0..n {
                new_perm[sigma[i]] = perm[i];
            }
            let a = Assignment::from_perm(perm).unwrap();
            let b = Assignment::from_perm(new_perm).unwrap();
            prop_assert_eq!(evaluate_cost(&inst, &a).unwrap(), evaluate_cost(&relabeled, &b).unwrap());
        }
    }
}

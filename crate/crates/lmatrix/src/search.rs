//! Brute-force ground truth for tiny instances: exhaustive minimal rank over
//! all L-matrices of a given size, the truncated N(r, L) and N_0(r, L)
//! evaluations, and the coefficient-box relation search used as the oracle
//! for the relation engine.

use crate::error::Error;
use crate::matrix::ExactMatrix;
use crate::relations::LSet;
use crate::DEFAULT_ENUM_BUDGET;
use num_bigint::BigInt;

/// Enumeration budget: the environment variable LMAT_ENUM_BUDGET overrides
/// the built-in default.
pub fn enum_budget() -> u128 {
    std::env::var("LMAT_ENUM_BUDGET")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_ENUM_BUDGET)
}

#[derive(Debug, Clone)]
pub struct SearchSpec {
    pub l: LSet,
    pub n: usize,
    pub symmetric_only: bool,
}

impl SearchSpec {
    /// Number of assignments k^cells, checked against the budget.
    pub fn assignments(&self) -> Result<u128, Error> {
        let cells = if self.symmetric_only {
            self.n * (self.n - 1) / 2
        } else {
            self.n * (self.n - 1)
        };
        let k = self.l.len() as u128;
        let budget = enum_budget();
        let mut total = 1u128;
        for _ in 0..cells {
            total = total.checked_mul(k).unwrap_or(u128::MAX);
            if total > budget {
                return Err(Error::BudgetExceeded { needed: total, budget });
            }
        }
        Ok(total)
    }
}

#[derive(Debug, Clone)]
pub struct MinRankResult {
    pub min_rank: usize,
    pub witness: ExactMatrix,
    /// Minimum of rank(M | 1) over the same enumeration.
    pub min_rank_ones: usize,
    pub assignments: u128,
}

/// Exhaustive minimum rank over all off-diagonal assignments, with the first
/// (lexicographically least) witness. Cells are filled in row-major order,
/// values in L declaration order.
pub fn min_rank(spec: &SearchSpec) -> Result<MinRankResult, Error> {
    let total = spec.assignments()?;
    let n = spec.n;
    let l = &spec.l;
    let ctx = l.ctx().clone();
    let cells: Vec<(usize, usize)> = if spec.symmetric_only {
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
    } else {
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .collect()
    };
    let k = l.len();
    let mut assign = vec![0usize; cells.len()];
    let mut best_rank = usize::MAX;
    let mut best_ones = usize::MAX;
    let mut witness: Option<ExactMatrix> = None;
    loop {
        let mut m = ExactMatrix::zeros(ctx.clone(), n, n);
        for (&(i, j), &a) in cells.iter().zip(&assign) {
            let e = l.elems()[a].clone();
            if spec.symmetric_only {
                m.set(j, i, e.clone());
            }
            m.set(i, j, e);
        }
        let r = m.rank()?;
        let r1 = m.rank_with_ones()?;
        if r < best_rank {
            best_rank = r;
            witness = Some(m);
        }
        best_ones = best_ones.min(r1);
        // odometer, last cell fastest
        let mut idx = cells.len();
        loop {
            if idx == 0 {
                let witness = witness.expect("at least one assignment");
                return Ok(MinRankResult {
                    min_rank: best_rank,
                    witness,
                    min_rank_ones: best_ones,
                    assignments: total,
                });
            }
            idx -= 1;
            assign[idx] += 1;
            if assign[idx] < k {
                break;
            }
            assign[idx] = 0;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NOfRResult {
    /// Largest n <= n_max with an L-matrix of rank <= r (0 when none).
    pub n: usize,
    /// Same for the ones-augmented rank (the N_0 variant).
    pub n_zero: usize,
}

/// Evaluate N(r, L) and N_0(r, L) truncated at n_max by exhaustive search.
pub fn n_of_r(l: &LSet, r: usize, n_max: usize, symmetric_only: bool) -> Result<NOfRResult, Error> {
    let mut out = NOfRResult { n: 0, n_zero: 0 };
    for n in 1..=n_max {
        let spec = SearchSpec { l: l.clone(), n, symmetric_only };
        let res = min_rank(&spec)?;
        if res.min_rank <= r {
            out.n = n;
        }
        if res.min_rank_ones <= r {
            out.n_zero = n;
        }
    }
    Ok(out)
}

/// Exhaustive scan of the coefficient box |A_i| <= bound for a primitive
/// relation; the independent oracle for the relation engine.
pub fn primitive_relation_box_search(l: &LSet, bound: i64) -> Result<Option<Vec<BigInt>>, Error> {
    let k = l.len();
    let budget = enum_budget();
    let width = (2 * bound + 1) as u128;
    let mut total = k as u128;
    for _ in 0..k {
        total = total.checked_mul(width).unwrap_or(u128::MAX);
        if total > budget {
            return Err(Error::BudgetExceeded { needed: total, budget });
        }
    }
    let ctx = l.ctx();
    let mut a = vec![-bound; k];
    loop {
        let sum: i64 = a.iter().sum();
        if sum == 1 {
            let mut acc = ctx.zero();
            for (&ai, alpha) in a.iter().zip(l.elems()) {
                acc = ctx.add(&acc, &ctx.mul_int(alpha, &BigInt::from(ai)));
            }
            if ctx.is_zero(&acc) {
                return Ok(Some(a.iter().map(|&x| BigInt::from(x)).collect()));
            }
        }
        let mut idx = k;
        loop {
            if idx == 0 {
                return Ok(None);
            }
            idx -= 1;
            a[idx] += 1;
            if a[idx] <= bound {
                break;
            }
            a[idx] = -bound;
        }
    }
}

/// Membership of a vector in the infinity-norm box, for oracle agreement
/// checks.
pub fn within_box(v: &[BigInt], bound: i64) -> bool {
    let b = BigInt::from(bound);
    v.iter().all(|x| num_traits::Signed::abs(x) <= b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;
    use crate::relations::{primitive_relation, PrimitiveRelation};
    use num_traits::Signed;

    fn qset(vals: &[i64]) -> LSet {
        let ctx = FieldCtx::rational();
        LSet::new(ctx.clone(), vals.iter().map(|&v| ctx.from_i64(v)).collect()).unwrap()
    }

    #[test]
    fn paper_min_rank() {
        // {-1,1} at n = 3: minimal rank 2 (the paper's example matrix)
        let spec = SearchSpec { l: qset(&[-1, 1]), n: 3, symmetric_only: false };
        let res = min_rank(&spec).unwrap();
        assert_eq!(res.min_rank, 2);
        assert_eq!(res.witness.rank().unwrap(), 2);
        res.witness
            .verify_l_matrix(spec.l.elems())
            .expect("witness re-verifies as an L-matrix");

        // {1} at n = 3: only J - I, rank 3
        let spec = SearchSpec { l: qset(&[1]), n: 3, symmetric_only: false };
        assert_eq!(min_rank(&spec).unwrap().min_rank, 3);

        // {-1,1} at n = 2: the determinant never vanishes
        let spec = SearchSpec { l: qset(&[-1, 1]), n: 2, symmetric_only: false };
        assert_eq!(min_rank(&spec).unwrap().min_rank, 2);
    }

    #[test]
    fn n_of_r_examples() {
        // N(2, {-1,1}) = 3 up to n_max = 4
        let res = n_of_r(&qset(&[-1, 1]), 2, 4, false).unwrap();
        assert_eq!(res.n, 3);
        // N(3, {1}) truncated at 5: J - I has full rank, so N = r = 3
        let res = n_of_r(&qset(&[1]), 3, 5, false).unwrap();
        assert_eq!(res.n, 3);
        // r = 0: only the 1x1 zero matrix
        let res = n_of_r(&qset(&[1, 2]), 0, 3, false).unwrap();
        assert_eq!(res.n, 1);
        assert_eq!(res.n_zero, 0);
    }

    #[test]
    fn monotonicity_and_n0_ordering() {
        let l = qset(&[-1, 1]);
        let mut prev = 0;
        for r in 0..=3 {
            let res = n_of_r(&l, r, 4, false).unwrap();
            assert!(res.n >= prev);
            assert!(res.n >= res.n_zero); // N >= N_0 pointwise
            prev = res.n;
        }
    }

    #[test]
    fn box_search_examples() {
        // {1,3,8}: finds a valid relation within |A| <= 5
        let l = qset(&[1, 3, 8]);
        let found = primitive_relation_box_search(&l, 5).unwrap();
        let a = found.expect("relation exists");
        crate::relations::check_relation(l.ctx(), l.elems(), &a).unwrap();

        // {1, sqrt2}: none
        let nf = FieldCtx::number_field_from_str("x^2-2").unwrap();
        let l = LSet::new(nf.clone(), vec![nf.one(), nf.generator().unwrap()]).unwrap();
        assert!(primitive_relation_box_search(&l, 10).unwrap().is_none());

        // {1,2}: (2,-1) found at bound 2
        let found = primitive_relation_box_search(&qset(&[1, 2]), 2).unwrap();
        assert_eq!(found.unwrap(), vec![BigInt::from(2), BigInt::from(-1)]);
    }

    #[test]
    fn engine_and_box_agree() {
        for vals in [&[1i64, 2][..], &[1, 3, 8], &[2, 3], &[3, 4], &[2, 5], &[1, 4, 5]] {
            let l = qset(vals);
            let engine = primitive_relation(&l).unwrap();
            let boxed = primitive_relation_box_search(&l, 10).unwrap();
            match (&engine, &boxed) {
                (PrimitiveRelation::Found(rel), Some(_)) => {
                    // the canonical minimal-norm solution must itself lie in
                    // the box the oracle scanned
                    assert!(rel.coeffs().iter().all(|c| c.abs() <= BigInt::from(10)));
                }
                (PrimitiveRelation::Infeasible(_), None) => {}
                other => panic!("oracle disagreement on {vals:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn budget_guard() {
        let spec = SearchSpec { l: qset(&[1, 2]), n: 30, symmetric_only: false };
        assert!(matches!(min_rank(&spec), Err(Error::BudgetExceeded { .. })));
    }
}

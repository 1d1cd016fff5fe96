//! Symbolic pattern determinants and the witness polynomial extracted from a
//! low-rank L-matrix: a homogeneous integer polynomial P with P(1,...,1) = 1
//! vanishing at (alpha_1, ..., alpha_k) to the order forced by the rank gap.

use crate::error::Error;
use crate::field::{Element, FieldCtx};
use crate::matrix::ExactMatrix;
use crate::mpoly::{monomials_of_degree, MultiPoly};
use crate::relations::LSet;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Exact determinant of an integer matrix by fraction-free elimination.
fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut prev = BigInt::one();
    let mut sign = 1i32;
    for col in 0..n {
        let Some(pr) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigInt::zero();
        };
        if pr != col {
            a.swap(col, pr);
            sign = -sign;
        }
        let pivot = a[col][col].clone();
        for r in col + 1..n {
            for c in col + 1..n {
                let num = &pivot * &a[r][c] - &a[r][col] * &a[col][c];
                a[r][c] = num / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = pivot;
    }
    if sign < 0 {
        -a[n - 1][n - 1].clone()
    } else {
        a[n - 1][n - 1].clone()
    }
}

fn validate_pattern(pattern: &[Vec<usize>], k: usize) -> Result<usize, Error> {
    let n = pattern.len();
    for row in pattern {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: row.len() });
        }
        for &l in row {
            if l > k {
                return Err(Error::Invalid(format!("label {l} exceeds variable count {k}")));
            }
        }
    }
    Ok(n)
}

/// Determinant of the n x n matrix whose (i, j) entry is the variable
/// x_{label(i,j)} (label 0 marks a structural zero, used on the diagonal),
/// returned as a homogeneous polynomial of degree n in k variables.
///
/// Computed by evaluation-interpolation at consecutive integer points of the
/// weighted power curve t -> (t^{w_1}, ..., t^{w_k}) with w_i = (n+1)^(i-1),
/// which separates all monomials of degree n. Cross-checked against a
/// cofactor expansion for n <= 6.
pub fn pattern_det(pattern: &[Vec<usize>], k: usize) -> Result<MultiPoly, Error> {
    let n = validate_pattern(pattern, k)?;
    if n > 10 {
        return Err(Error::Invalid(format!("pattern size {n} exceeds the symbolic guard 10")));
    }
    if k == 0 {
        return Err(Error::Invalid("need at least one variable".into()));
    }
    let ctx = FieldCtx::rational();
    if n == 0 {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0u32; k], ctx.one());
        return MultiPoly::new(ctx, k, terms);
    }

    let exps = monomials_of_degree(k, n as u32);
    let t_count = exps.len();
    // weighted exponents separating monomials of degree n
    let base = (n + 1) as u64;
    let mut weights = vec![1u64; k];
    for i in 1..k {
        weights[i] = weights[i - 1].saturating_mul(base);
    }
    let max_exp: u64 = exps
        .iter()
        .map(|e| e.iter().zip(&weights).map(|(&p, &w)| p as u64 * w).sum())
        .max()
        .unwrap_or(0);
    if max_exp > 2_000 || t_count > 300 {
        return Err(Error::Invalid(format!(
            "pattern with n = {n}, k = {k} too large for exact interpolation"
        )));
    }

    // evaluate the determinant at t = 1..t_count
    let mut values = Vec::with_capacity(t_count);
    for j in 1..=t_count {
        let t = BigInt::from(j as u64);
        let powers: Vec<BigInt> = weights.iter().map(|&w| t.pow(w as u32)).collect();
        let mat: Vec<Vec<BigInt>> = pattern
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&l| if l == 0 { BigInt::zero() } else { powers[l - 1].clone() })
                    .collect()
            })
            .collect();
        values.push(bareiss_det(mat));
    }

    // solve the generalized Vandermonde system for the coefficients
    let mut aug: Vec<Vec<BigRational>> = (0..t_count)
        .map(|j| {
            let t = BigInt::from((j + 1) as u64);
            let mut row: Vec<BigRational> = exps
                .iter()
                .map(|e| {
                    let d: u64 = e.iter().zip(&weights).map(|(&p, &w)| p as u64 * w).sum();
                    BigRational::from_integer(t.pow(d as u32))
                })
                .collect();
            row.push(BigRational::from_integer(values[j].clone()));
            row
        })
        .collect();
    gaussian_solve(&mut aug)?;
    let mut terms = BTreeMap::new();
    for (i, e) in exps.iter().enumerate() {
        let c = aug[i][t_count].clone();
        if !c.denom().is_one() {
            return Err(Error::Invariant("interpolated determinant coefficient not integral".into()));
        }
        if !c.is_zero() {
            terms.insert(e.clone(), Element::Rat(c));
        }
    }
    let poly = MultiPoly::new(ctx, k, terms)?;

    if n <= 6 {
        let direct = pattern_det_cofactor(pattern, k)?;
        if direct != poly {
            return Err(Error::Invariant("interpolation disagrees with cofactor expansion".into()));
        }
    }
    Ok(poly)
}

/// Reduced-row-echelon solve of an augmented square system; unique solution
/// expected (the interpolation matrix is invertible).
fn gaussian_solve(aug: &mut [Vec<BigRational>]) -> Result<(), Error> {
    let n = aug.len();
    for col in 0..n {
        let Some(pr) = (col..n).find(|&r| !aug[r][col].is_zero()) else {
            return Err(Error::Invariant("singular interpolation system".into()));
        };
        aug.swap(col, pr);
        let inv = aug[col][col].recip();
        for c in col..=n {
            let v = &aug[col][c] * &inv;
            aug[col][c] = v;
        }
        for r in 0..n {
            if r == col || aug[r][col].is_zero() {
                continue;
            }
            let f = aug[r][col].clone();
            for c in col..=n {
                let delta = &f * &aug[col][c];
                aug[r][c] -= delta;
            }
        }
    }
    Ok(())
}

/// Independent symbolic route: cofactor expansion along the first row.
pub fn pattern_det_cofactor(pattern: &[Vec<usize>], k: usize) -> Result<MultiPoly, Error> {
    validate_pattern(pattern, k)?;
    let ctx = FieldCtx::rational();
    fn go(pattern: &[Vec<usize>], k: usize, ctx: &FieldCtx) -> MultiPoly {
        let n = pattern.len();
        if n == 0 {
            let mut terms = BTreeMap::new();
            terms.insert(vec![0u32; k], ctx.one());
            return MultiPoly::new(ctx.clone(), k, terms).unwrap();
        }
        let mut acc = MultiPoly::zero(ctx.clone(), k);
        for j in 0..n {
            let label = pattern[0][j];
            if label == 0 {
                continue;
            }
            let minor: Vec<Vec<usize>> = (1..n)
                .map(|i| (0..n).filter(|&c| c != j).map(|c| pattern[i][c]).collect())
                .collect();
            let sub = go(&minor, k, ctx);
            let mut term = sub.mul_var(label - 1);
            if j % 2 == 1 {
                term = term.scale(&ctx.from_i64(-1));
            }
            acc = acc.add(&term);
        }
        acc
    }
    Ok(go(pattern, k, &ctx))
}

/// Label an L-matrix by positions into L (1-based); zero entries map to 0.
pub fn labels_of_matrix(m: &ExactMatrix, l: &LSet) -> Result<Vec<Vec<usize>>, Error> {
    let n = m.rows();
    let mut out = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in 0..n {
            let e = m.get(i, j);
            if m.ctx().is_zero(e) {
                continue;
            }
            let Some(pos) = l.elems().iter().position(|a| a == e) else {
                return Err(Error::Invalid(format!(
                    "entry at ({i},{j}) = {} is not in L",
                    m.ctx().render_element(e)
                )));
            };
            out[i][j] = pos + 1;
        }
    }
    Ok(out)
}

/// The witness polynomial produced by a low-rank L-matrix of size r + v with
/// rank r - 1: homogeneous, integral, P(1,...,1) = 1, vanishing at
/// (alpha_1,...,alpha_k) to order at least v.
#[derive(Debug, Clone)]
pub struct GenupperWitness {
    pub poly: MultiPoly,
    pub rank: usize,
    /// r = rank + 1, so that size = r + v.
    pub r: usize,
    /// v = size - r; 0 is the degenerate boundary (flagged, not an error).
    pub v: usize,
    /// Exact vanishing order measured at the alpha point.
    pub order: u32,
    pub degenerate: bool,
}

pub fn genupper_witness(m: &ExactMatrix, l: &LSet) -> Result<GenupperWitness, Error> {
    let n = m.rows();
    if !m.is_square() || n == 0 {
        return Err(Error::Invalid("witness extraction needs a nonempty square matrix".into()));
    }
    if n > 10 {
        return Err(Error::Invalid(format!("matrix size {n} exceeds the symbolic guard 10")));
    }
    m.verify_l_matrix(l.elems())?;
    let rank = m.rank()?;
    if rank == n {
        return Err(Error::RankPrecondition(format!(
            "matrix of size {n} has full rank {rank}; need rank < size"
        )));
    }
    let r = rank + 1;
    let v = n - r;
    let k = l.len();
    let labels = labels_of_matrix(m, l)?;
    let p_n = pattern_det(&labels, k)?;
    let minor: Vec<Vec<usize>> = (0..n - 1).map(|i| labels[i][..n - 1].to_vec()).collect();
    let p_n1 = pattern_det(&minor, k)?;
    // P = (-1)^(n-1) (P_n + x_1 P_{n-1})
    let mut p = p_n.add(&p_n1.mul_var(0));
    if (n - 1) % 2 == 1 {
        p = p.scale(&FieldCtx::rational().from_i64(-1));
    }

    if !p.is_homogeneous() || !p.has_integer_coeffs() {
        return Err(Error::Invariant("witness polynomial must be homogeneous and integral".into()));
    }
    let q = FieldCtx::rational();
    let ones = vec![q.one(); k];
    if p.eval(&ones, &q)? != q.one() {
        return Err(Error::Invariant("witness normalization P(1,...,1) = 1 failed".into()));
    }
    let order = p.vanishing_order(l.elems(), l.ctx())?;
    if (order as usize) < v {
        return Err(Error::Invariant(format!(
            "witness vanishing order {order} below the required {v}"
        )));
    }
    Ok(GenupperWitness { poly: p, rank, r, v, order, degenerate: v == 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_label_pattern() {
        // all labels 1, n = 4: det of x_1 (J - I) = -3 x_1^4
        let pattern = vec![
            vec![0, 1, 1, 1],
            vec![1, 0, 1, 1],
            vec![1, 1, 0, 1],
            vec![1, 1, 1, 0],
        ];
        let p = pattern_det(&pattern, 1).unwrap();
        assert_eq!(p.render(), "-3*x1^4");
    }

    #[test]
    fn two_by_two() {
        // labels a=1, b=2 off the diagonal: det = -x1 x2
        let pattern = vec![vec![0, 1], vec![2, 0]];
        let p = pattern_det(&pattern, 2).unwrap();
        assert_eq!(p.render(), "-x1*x2");
    }

    #[test]
    fn paper_pattern_vanishes_at_signs() {
        // paper's 3x3 {-1,1} matrix with x_1 for +1, x_2 for -1:
        // [[0,1,1],[1,0,-1],[1,1,0]]
        let pattern = vec![vec![0, 1, 1], vec![1, 0, 2], vec![1, 1, 0]];
        let p = pattern_det(&pattern, 2).unwrap();
        let q = FieldCtx::rational();
        let val = p.eval(&[q.one(), q.from_i64(-1)], &q).unwrap();
        assert!(q.is_zero(&val)); // matches rank 2 < 3
    }

    #[test]
    fn interpolation_matches_cofactor_on_random_patterns() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let n = rng.random_range(1..=5);
            let k = rng.random_range(1..=3);
            let pattern: Vec<Vec<usize>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { 0 } else { rng.random_range(1..=k) })
                        .collect()
                })
                .collect();
            // pattern_det cross-checks against the cofactor route internally
            pattern_det(&pattern, k).unwrap();
        }
    }

    #[test]
    fn too_large_patterns_rejected() {
        let pattern = vec![vec![0usize; 11]; 11];
        assert!(pattern_det(&pattern, 1).is_err());
    }
}

//! Matrices with a prescribed eigenvalue of large multiplicity: companion
//! progenitors, tensor amplification with low-rank patches, the digraph
//! pipeline, and the monomial-indexed progenitor built from a vanishing
//! polynomial relation.
//!
//! Amplification replaces each scalar block beta I_l of M (x) I_l by
//! beta I_l + Q_beta, where Q_beta = Q'_beta - beta J_l and Q'_beta is a
//! low-rank symmetric ({beta, beta+alpha_1, ..., beta+alpha_k}, 0)-matrix
//! produced by the construction engine. Entries land in {0, alpha_1, ...,
//! alpha_k} while the eigenvalue multiplicity drops by at most the sum of
//! the patch ranks.

use crate::construct::{construct_square_raw, construct_threehalves_raw, ConstructionReport};
use crate::error::Error;
use crate::field::{Element, FieldCtx};
use crate::matrix::{binomial_u128, ExactMatrix};
use crate::mpoly::{monomials_of_degree, MultiPoly};
use crate::qpoly::{next_prime_above, QPoly};
use crate::relations::{integer_solvable, IntegerSolve, LSet};
use crate::MAX_EXACT_ENTRIES;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Companion matrix of a monic integer polynomial: ones on the subdiagonal,
/// negated coefficients in the last column. Its characteristic polynomial is
/// the input.
pub fn companion(f: &QPoly) -> Result<ExactMatrix, Error> {
    if f.is_zero() || f.degree() == 0 {
        return Err(Error::Invalid("companion needs a non-constant polynomial".into()));
    }
    if !f.is_monic() {
        return Err(Error::NonMonicModulus);
    }
    let Some(coeffs) = f.to_integer_coeffs() else {
        return Err(Error::Invalid("companion needs integer coefficients".into()));
    };
    let d = f.degree();
    let ctx = FieldCtx::rational();
    Ok(ExactMatrix::from_fn(ctx.clone(), d, d, |i, j| {
        if j == d - 1 {
            ctx.from_bigint(&-coeffs[i].clone())
        } else if i == j + 1 {
            ctx.one()
        } else {
            ctx.zero()
        }
    }))
}

/// An amplification request: a progenitor whose entries are integer
/// combinations of the alphas, the nonzero part of the target set L (the
/// full L is {0} united with `alphas`), and the block size.
#[derive(Debug, Clone)]
pub struct AmplifyPlan {
    pub progenitor: ExactMatrix,
    pub alphas: Vec<Element>,
    pub block: usize,
}

#[derive(Debug, Clone)]
pub struct AmplifyReport {
    pub matrix: ExactMatrix,
    /// Multiplicity of lambda in the progenitor.
    pub progenitor_multiplicity: usize,
    /// Exact multiplicity of lambda in the output (when the size policy
    /// allows the exact computation).
    pub multiplicity_exact: Option<usize>,
    /// block * m - sum of patch ranks over all patched blocks.
    pub lower_bound: i128,
    /// block * m - n^2 * max patch rank (the statement-level bound).
    pub lower_bound_crude: i128,
    /// Rank of Q_beta per distinct patched entry (rendered).
    pub patch_ranks: BTreeMap<String, usize>,
    pub patched_blocks: usize,
}

/// Solve beta = sum A_i alpha_i over Z; errors when beta is outside the
/// group generated by the alphas.
fn membership_coefficients(
    ctx: &FieldCtx,
    alphas: &[Element],
    beta: &Element,
) -> Result<Vec<BigInt>, Error> {
    let deg = ctx.degree();
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(deg);
    let beta_coords = ctx.coordinates(beta);
    let mut rhs: Vec<BigRational> = Vec::with_capacity(deg);
    for t in 0..deg {
        rows.push(
            alphas
                .iter()
                .map(|a| ctx.coordinates(a).get(t).cloned().unwrap_or_else(BigRational::zero))
                .collect(),
        );
        rhs.push(beta_coords.get(t).cloned().unwrap_or_else(BigRational::zero));
    }
    match integer_solvable(&rows, &rhs)? {
        IntegerSolve::Solution(a) => Ok(a),
        IntegerSolve::Certificate(_) => Err(Error::Invalid(format!(
            "progenitor entry {} is not an integer combination of the alphas",
            ctx.render_element(beta)
        ))),
    }
}

/// Build the low-rank patch Q'_beta for one progenitor entry: a symmetric
/// zero-diagonal matrix with entries in {beta, beta + alpha_i}, of size
/// `block`, built by the size-q^2 construction when there is a single alpha
/// and the size-q^3 construction otherwise, truncated to the block size.
fn build_patch(
    ctx: &FieldCtx,
    alphas: &[Element],
    beta: &Element,
    block: usize,
) -> Result<ExactMatrix, Error> {
    let coeffs = membership_coefficients(ctx, alphas, beta)?;
    let mut elems = vec![beta.clone()];
    for a in alphas {
        elems.push(ctx.add(beta, a));
    }
    let sum: BigInt = coeffs.iter().sum();
    let mut rel = vec![BigInt::one() + &sum];
    for c in &coeffs {
        rel.push(-c.clone());
    }
    let exponent = if alphas.len() == 1 { 2u32 } else { 3u32 };
    let mut q = 1u64;
    let report: ConstructionReport = loop {
        q = next_prime_above(q);
        if q > 10_000 {
            return Err(Error::Invalid("no workable patch prime below 10000".into()));
        }
        if (q as u128).pow(exponent) < block as u128 {
            continue;
        }
        let attempt = if exponent == 2 {
            construct_square_raw(ctx, &elems, &rel, q)
        } else {
            construct_threehalves_raw(ctx, &elems, &rel, q)
        };
        match attempt {
            Ok(r) => break r,
            Err(Error::QTooSmall { .. }) => continue,
            Err(e) => return Err(e),
        }
    };
    report.matrix.leading_principal(block)
}

/// Amplify the progenitor: M (x) I_block with every nonzero scalar block
/// patched into L = {0} u alphas. `lambda` is the tracked eigenvalue and
/// `lambda_ctx` the field in which multiplicities are computed.
pub fn amplify(
    plan: &AmplifyPlan,
    lambda: &Element,
    lambda_ctx: &FieldCtx,
) -> Result<AmplifyReport, Error> {
    let prog = &plan.progenitor;
    if !prog.is_square() {
        return Err(Error::Invalid("progenitor must be square".into()));
    }
    let ctx = prog.ctx().clone();
    for a in &plan.alphas {
        ctx.validate(a)?;
        if ctx.is_zero(a) {
            return Err(Error::DegenerateL("alphas must be nonzero (0 is implicit in L)".into()));
        }
    }
    let n = prog.rows();
    let block = plan.block;
    if block == 0 {
        return Err(Error::Invalid("block size must be positive".into()));
    }

    // distinct nonzero entries and their patches: (beta, Q'_beta, rank Q_beta)
    let mut patches: Vec<(Element, ExactMatrix, usize)> = Vec::new();
    let jl = ExactMatrix::all_ones(ctx.clone(), block);
    for i in 0..n {
        for j in 0..n {
            let beta = prog.get(i, j);
            if ctx.is_zero(beta) || patches.iter().any(|(b, _, _)| b == beta) {
                continue;
            }
            let qp = build_patch(&ctx, &plan.alphas, beta, block)?;
            let q_beta = qp.sub(&jl.scale(beta))?;
            let rank = q_beta.rank()?;
            patches.push((beta.clone(), qp, rank));
        }
    }

    // assemble the (n*block)^2 output: block (i, j) entry (u, v) is zero on
    // the block diagonal u = v, else Q'(u, v) - beta
    let size = n * block;
    let matrix = ExactMatrix::from_fn(ctx.clone(), size, size, |r, c| {
        let (bi, u) = (r / block, r % block);
        let (bj, v) = (c / block, c % block);
        let beta = prog.get(bi, bj);
        if ctx.is_zero(beta) {
            return ctx.zero();
        }
        let qp = &patches.iter().find(|(b, _, _)| b == beta).unwrap().1;
        if u == v {
            ctx.zero()
        } else {
            ctx.sub(qp.get(u, v), beta)
        }
    });

    // the output is an L-matrix for L = {0} u alphas
    let mut allowed = vec![ctx.zero()];
    allowed.extend(plan.alphas.iter().cloned());
    matrix.verify_l_matrix(&allowed)?;
    if prog.is_symmetric() && !matrix.is_symmetric() {
        return Err(Error::Invariant("symmetric progenitor must give a symmetric output".into()));
    }

    let m = prog.eigen_multiplicity(lambda, lambda_ctx)?;
    let mut rank_sum: i128 = 0;
    let mut max_rank: i128 = 0;
    let mut patched_blocks = 0usize;
    for i in 0..n {
        for j in 0..n {
            let beta = prog.get(i, j);
            if ctx.is_zero(beta) {
                continue;
            }
            let r = patches.iter().find(|(b, _, _)| b == beta).unwrap().2 as i128;
            rank_sum += r;
            max_rank = max_rank.max(r);
            patched_blocks += 1;
        }
    }
    let lower_bound = (block as i128) * (m as i128) - rank_sum;
    let lower_bound_crude = (block as i128) * (m as i128) - (n as i128).pow(2) * max_rank;
    let multiplicity_exact = if size * size <= MAX_EXACT_ENTRIES {
        let exact = matrix.eigen_multiplicity(lambda, lambda_ctx)?;
        if (exact as i128) < lower_bound || (exact as i128) < lower_bound_crude {
            return Err(Error::Invariant(format!(
                "exact multiplicity {exact} below the reported lower bounds"
            )));
        }
        Some(exact)
    } else {
        None
    };

    let patch_ranks = patches
        .iter()
        .map(|(b, _, r)| (ctx.render_element(b), *r))
        .collect();
    Ok(AmplifyReport {
        matrix,
        progenitor_multiplicity: m,
        multiplicity_exact,
        lower_bound,
        lower_bound_crude,
        patch_ranks,
        patched_blocks,
    })
}

#[derive(Debug, Clone)]
pub struct DigraphReport {
    /// A {0,1}-matrix of size n over Q.
    pub matrix: ExactMatrix,
    /// Exact geometric multiplicity of lambda.
    pub multiplicity: usize,
    /// The constructive lower bound realized by this run (may be negative).
    pub lower_bound: i128,
    /// floor(n / deg lambda), the characteristic-polynomial upper bound.
    pub upper_bound: usize,
    pub degree: usize,
    /// Rank of Q_beta per patched entry (empty for the degree-1 route).
    pub patch_ranks: BTreeMap<String, usize>,
}

/// Build an n-by-n {0,1}-matrix with eigenvalue lambda (given by its monic
/// integral minimal polynomial) of certified multiplicity.
pub fn digraph_pipeline(minpoly: &QPoly, n: usize) -> Result<DigraphReport, Error> {
    if n == 0 {
        return Err(Error::Invalid("target size must be positive".into()));
    }
    if !minpoly.is_monic() || minpoly.to_integer_coeffs().is_none() {
        return Err(Error::Invalid("minimal polynomial must be monic integral".into()));
    }
    let d = minpoly.degree();
    let qctx = FieldCtx::rational();
    let zero_one: Vec<Element> = vec![qctx.zero(), qctx.one()];
    if d == 1 {
        // lambda = a in Z: go through the {a, a+1} relation and the square
        // construction, translating back by a (J - I)
        let a = minpoly.coeff(0).numer().clone() * BigInt::from(-1);
        if a.is_zero() {
            let matrix = ExactMatrix::zeros(qctx.clone(), n, n);
            return Ok(DigraphReport {
                matrix,
                multiplicity: n,
                lower_bound: n as i128,
                upper_bound: n,
                degree: 1,
                patch_ranks: BTreeMap::new(),
            });
        }
        let lambda = qctx.from_bigint(&a);
        let elems = vec![lambda.clone(), qctx.add(&lambda, &qctx.one())];
        let rel = vec![BigInt::one() + &a, -a.clone()];
        let mut q = 1u64;
        let report = loop {
            q = next_prime_above(q);
            if (q as u128).pow(2) < n as u128 {
                continue;
            }
            match construct_square_raw(&qctx, &elems, &rel, q) {
                Ok(r) => break r,
                Err(Error::QTooSmall { .. }) => continue,
                Err(e) => return Err(e),
            }
        };
        let truncated = report.matrix.leading_principal(n)?;
        let trunc_rank = truncated.rank()?;
        // D = M - a (J - I) has {0,1} entries and eigenvalue a with
        // multiplicity at least n - rank(M) - 1
        let jmi = ExactMatrix::from_fn(qctx.clone(), n, n, |i, j| {
            if i == j {
                qctx.zero()
            } else {
                qctx.one()
            }
        });
        let matrix = truncated.sub(&jmi.scale(&lambda))?;
        matrix.verify_l_matrix(&zero_one)?;
        let multiplicity = matrix.eigen_multiplicity(&lambda, &qctx)?;
        let lower_bound = n as i128 - trunc_rank as i128 - 1;
        if (multiplicity as i128) < lower_bound {
            return Err(Error::Invariant("multiplicity below the translation bound".into()));
        }
        if multiplicity > n {
            return Err(Error::Invariant("multiplicity above n".into()));
        }
        return Ok(DigraphReport {
            matrix,
            multiplicity,
            lower_bound,
            upper_bound: n,
            degree: 1,
            patch_ranks: BTreeMap::new(),
        });
    }

    // d >= 2: companion progenitor amplified over Q, multiplicities in the
    // number field of the minimal polynomial
    let nf = FieldCtx::number_field(minpoly)?;
    let lambda = nf.generator()?;
    let prog = companion(minpoly)?;
    let block = n.div_ceil(d);
    let plan = AmplifyPlan { progenitor: prog, alphas: vec![qctx.one()], block };
    let amplified = amplify(&plan, &lambda, &nf)?;
    let truncated = amplified.matrix.leading_principal(n)?;
    truncated.verify_l_matrix(&zero_one)?;
    let multiplicity = truncated.eigen_multiplicity(&lambda, &nf)?;
    let upper_bound = n / d;
    if multiplicity > upper_bound {
        return Err(Error::Invariant(format!(
            "multiplicity {multiplicity} exceeds n/deg = {upper_bound}"
        )));
    }
    let drop = (block * d - n) as i128;
    let lower_bound = amplified.lower_bound - drop;
    Ok(DigraphReport {
        matrix: truncated,
        multiplicity,
        lower_bound,
        upper_bound,
        degree: d,
        patch_ranks: amplified.patch_ranks,
    })
}

/// Lexicographically ordered monomials of one degree, with predecessor
/// bookkeeping: pred(m) strips the smallest variable index >= 2 dividing m.
#[derive(Debug, Clone)]
pub struct MonomialIndex {
    pub k: usize,
    pub degree: u32,
    pub monomials: Vec<Vec<u32>>,
    index: BTreeMap<Vec<u32>, usize>,
}

impl MonomialIndex {
    pub fn new(k: usize, degree: u32) -> Self {
        let monomials = monomials_of_degree(k, degree);
        let index = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        MonomialIndex { k, degree, monomials, index }
    }

    pub fn position(&self, m: &[u32]) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// (pred(m), i_m) with m = x_{i_m} pred(m), i_m >= 2 minimal; None for
    /// pure powers of x_1. The returned index is 0-based.
    pub fn pred(m: &[u32]) -> Option<(Vec<u32>, usize)> {
        let i = (1..m.len()).find(|&i| m[i] > 0)?;
        let mut p = m.to_vec();
        p[i] -= 1;
        Some((p, i))
    }
}

#[derive(Debug, Clone)]
pub struct PolyrelOutput {
    /// The progenitor matrix indexed by monomials of degree d - 1; entries
    /// are integer combinations of the shifted alphas.
    pub matrix: ExactMatrix,
    pub index: MonomialIndex,
    /// rank(M - alpha_1 I), strictly below the size (singularity witness).
    pub shifted_rank: usize,
}

/// Build the monomial-indexed progenitor from a homogeneous integer
/// polynomial with P(1,...,1) = 1 and P(alpha) = 0. The matrix has
/// eigenvalue alpha_1, certified by exact rank.
pub fn polyrel_matrix(p: &MultiPoly, l: &LSet) -> Result<PolyrelOutput, Error> {
    let ctx = l.ctx().clone();
    let k = l.len();
    if p.vars() != k {
        return Err(Error::DimensionMismatch { expected: k, got: p.vars() });
    }
    let d = p.degree();
    if d < 2 {
        return Err(Error::Invalid(format!("polynomial degree must be at least 2, got {d}")));
    }
    if !p.is_homogeneous() {
        return Err(Error::Invalid("polynomial must be homogeneous".into()));
    }
    if !p.has_integer_coeffs() {
        return Err(Error::Invalid("polynomial must have integer coefficients".into()));
    }
    let qctx = FieldCtx::rational();
    let ones = vec![qctx.one(); k];
    let at_ones = p.eval(&ones, &qctx)?;
    if at_ones != qctx.one() {
        return Err(Error::Invalid(format!(
            "P(1,...,1) = {} but must equal 1",
            qctx.render_element(&at_ones)
        )));
    }
    let at_alpha = p.eval(l.elems(), &ctx)?;
    if !ctx.is_zero(&at_alpha) {
        return Err(Error::Invalid(format!(
            "P(alpha) = {} but must vanish",
            ctx.render_element(&at_alpha)
        )));
    }

    // Q(x) = P(x_1, x_2 + x_1, ..., x_k + x_1) and its degree-d coefficients
    let shifted = p.shift_vars_by_first();
    let alpha1 = l.elems()[0].clone();
    let alpha_shift: Vec<Element> =
        l.elems().iter().map(|a| ctx.sub(a, &alpha1)).collect(); // alpha'_i; index 0 gives 0

    let index = MonomialIndex::new(k, d - 1);
    let size = index.monomials.len();
    let mut matrix = ExactMatrix::zeros(ctx.clone(), size, size);
    let x1_top = {
        let mut m = vec![0u32; k];
        m[0] = d - 1;
        index.position(&m).unwrap()
    };

    // first summand: for every column m' other than x_1^(d-1), the row
    // pred(m' x_1) holds the shifted alpha of the stripped variable
    for (col, mprime) in index.monomials.iter().enumerate() {
        if col == x1_top {
            continue;
        }
        let mut mx1 = mprime.clone();
        mx1[0] += 1;
        let (pred, i) = MonomialIndex::pred(&mx1).expect("non-x1 monomial has a predecessor");
        let row = index.position(&pred).unwrap();
        let cur = matrix.get(row, col).clone();
        matrix.set(row, col, ctx.add(&cur, &alpha_shift[i]));
    }
    // second summand: the x_1^(d-1) column collects -c_m alpha'_{i_m} at
    // row pred(m) for every degree-d monomial m except x_1^d
    for (m, c) in shifted.terms() {
        let Some((pred, i)) = MonomialIndex::pred(m) else { continue };
        let row = index.position(&pred).unwrap();
        let Element::Rat(c_rat) = c else { return Err(Error::CtxMismatch) };
        let contribution = ctx.mul_int(&alpha_shift[i], &-c_rat.numer().clone());
        let cur = matrix.get(row, x1_top).clone();
        matrix.set(row, x1_top, ctx.add(&cur, &contribution));
    }

    // verify the two row-sum identities with the monomial evaluation vector
    // w_m = m(alpha_1, alpha'_2, ..., alpha'_k)
    let mut point = vec![alpha1.clone()];
    point.extend(alpha_shift.iter().skip(1).cloned());
    let w: Vec<Element> = index
        .monomials
        .iter()
        .map(|m| {
            let mut acc = ctx.one();
            for (x, &e) in point.iter().zip(m) {
                if e > 0 {
                    acc = ctx.mul(&acc, &ctx.pow(x, e as u64));
                }
            }
            acc
        })
        .collect();
    let alpha1_pow = ctx.pow(&alpha1, d as u64);
    for col in 0..size {
        let mut column_sum = ctx.zero();
        for row in 0..size {
            let entry = matrix.get(row, col);
            if !ctx.is_zero(entry) {
                column_sum = ctx.add(&column_sum, &ctx.mul(&w[row], entry));
            }
        }
        // w (M - alpha_1 I) must be -alpha_1^d + alpha_1^d = 0 at the
        // x_1^(d-1) column (first summand gives -alpha_1^d there, second
        // gives +alpha_1^d) and 0 elsewhere
        let total = ctx.sub(&column_sum, &ctx.mul(&alpha1, &w[col]));
        if col == x1_top {
            // split check: the second summand alone contributes alpha_1^d
            let mut second = ctx.zero();
            for (m, c) in shifted.terms() {
                let Some((pred, i)) = MonomialIndex::pred(m) else { continue };
                let row = index.position(&pred).unwrap();
                let Element::Rat(c_rat) = c else { return Err(Error::CtxMismatch) };
                let contribution = ctx.mul_int(&alpha_shift[i], &-c_rat.numer().clone());
                second = ctx.add(&second, &ctx.mul(&w[row], &contribution));
            }
            if second != alpha1_pow {
                return Err(Error::Invariant(format!(
                    "second-summand identity failed: got {}",
                    ctx.render_element(&second)
                )));
            }
        }
        if !ctx.is_zero(&total) {
            return Err(Error::Invariant("row-sum eigenvector identity failed".into()));
        }
    }

    // certify the eigenvalue by exact rank
    let shifted_m = matrix.sub(&ExactMatrix::identity(ctx.clone(), size).scale(&alpha1))?;
    let shifted_rank = shifted_m.rank()?;
    if shifted_rank >= size {
        return Err(Error::Invariant("M - alpha_1 I must be singular".into()));
    }
    Ok(PolyrelOutput { matrix, index, shifted_rank })
}

#[derive(Debug, Clone)]
pub struct PolytobetterReport {
    /// The final L-matrix of size block * C(d+k-2, k-1).
    pub matrix: ExactMatrix,
    /// Exact multiplicity of alpha_1 in the amplified progenitor.
    pub multiplicity: usize,
    pub rank_exact: usize,
    /// block * (C - 1) + patch slack + 1.
    pub rank_bound: usize,
    /// Sum of the patch ranks over patched blocks.
    pub patch_slack: usize,
    pub patch_ranks: BTreeMap<String, usize>,
    pub size: usize,
}

/// Full pipeline: polynomial relation -> progenitor -> amplification ->
/// translation by alpha_1 (J - I) into an L-matrix of certified rank.
pub fn polytobetter_pipeline(
    p: &MultiPoly,
    l: &LSet,
    block: usize,
) -> Result<PolytobetterReport, Error> {
    let ctx = l.ctx().clone();
    let prog = polyrel_matrix(p, l)?;
    let alpha1 = l.elems()[0].clone();
    let alphas: Vec<Element> = l.elems()[1..].iter().map(|a| ctx.sub(a, &alpha1)).collect();
    let plan = AmplifyPlan { progenitor: prog.matrix.clone(), alphas, block };
    let amplified = amplify(&plan, &alpha1, &ctx)?;
    let size = amplified.matrix.rows();
    let jmi = ExactMatrix::from_fn(ctx.clone(), size, size, |i, j| {
        if i == j {
            ctx.zero()
        } else {
            ctx.one()
        }
    });
    let matrix = amplified.matrix.add(&jmi.scale(&alpha1))?;
    matrix.verify_l_matrix(l.elems())?;
    let rank_exact = matrix.rank()?;
    // sum of patch ranks over patched blocks
    let patch_slack: usize = {
        let prog_m = &prog.matrix;
        let mut acc = 0usize;
        for i in 0..prog_m.rows() {
            for j in 0..prog_m.cols() {
                let beta = prog_m.get(i, j);
                if ctx.is_zero(beta) {
                    continue;
                }
                acc += amplified.patch_ranks[&ctx.render_element(beta)];
            }
        }
        acc
    };
    let c_size = prog.matrix.rows();
    let rank_bound = block * (c_size - 1) + patch_slack + 1;
    if rank_exact > rank_bound {
        return Err(Error::Invariant(format!(
            "exact rank {rank_exact} exceeds the certified bound {rank_bound}"
        )));
    }
    let multiplicity = amplified
        .multiplicity_exact
        .ok_or_else(|| Error::Invalid("pipeline size exceeds the exact policy".into()))?;
    Ok(PolytobetterReport {
        matrix,
        multiplicity,
        rank_exact,
        rank_bound,
        patch_slack,
        patch_ranks: amplified.patch_ranks,
        size,
    })
}

/// C(d + k - 2, k - 1), the progenitor size of the polynomial pipeline.
pub fn polytobetter_size(d: u32, k: usize) -> usize {
    binomial_u128(d as u128 + k as u128 - 2, k as u128 - 1) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    fn qctx() -> FieldCtx {
        FieldCtx::rational()
    }

    /// Characteristic polynomial by the Faddeev-LeVerrier trace recursion,
    /// an independent route for checking companion matrices.
    fn char_poly(m: &ExactMatrix) -> Vec<BigRational> {
        let n = m.rows();
        let ctx = m.ctx().clone();
        let mut coeffs = vec![BigRational::zero(); n + 1];
        coeffs[n] = BigRational::one();
        let mut acc = ExactMatrix::identity(ctx.clone(), n);
        for i in 1..=n {
            acc = m.matmul(&acc).unwrap();
            // c_{n-i} = -trace(acc) / i
            let mut tr = BigRational::zero();
            for t in 0..n {
                let Element::Rat(r) = acc.get(t, t) else { unreachable!() };
                tr += r;
            }
            let c = -tr / BigRational::from_integer(BigInt::from(i as i64));
            coeffs[n - i] = c.clone();
            let shift = ExactMatrix::identity(ctx.clone(), n).scale(&Element::Rat(c));
            acc = acc.add(&shift).unwrap();
        }
        coeffs
    }

    #[test]
    fn companion_examples() {
        // x^2 - 2 -> [[0,2],[1,0]]
        let c = companion(&QPoly::from_integers(&[-2, 0, 1])).unwrap();
        let ctx = qctx();
        assert_eq!(c.get(0, 0), &ctx.zero());
        assert_eq!(c.get(0, 1), &ctx.from_i64(2));
        assert_eq!(c.get(1, 0), &ctx.one());
        assert_eq!(c.get(1, 1), &ctx.zero());
        let cp = char_poly(&c);
        assert_eq!(cp, QPoly::from_integers(&[-2, 0, 1]).coeffs().to_vec());

        // x - 5 -> [5]
        let c = companion(&QPoly::from_integers(&[-5, 1])).unwrap();
        assert_eq!(c.get(0, 0), &ctx.from_i64(5));

        // x^3 - x - 1: last column (1, 1, 0)
        let f = QPoly::from_integers(&[-1, -1, 0, 1]);
        let c = companion(&f).unwrap();
        assert_eq!(c.get(0, 2), &ctx.one());
        assert_eq!(c.get(1, 2), &ctx.one());
        assert_eq!(c.get(2, 2), &ctx.zero());
        assert_eq!(char_poly(&c), f.coeffs().to_vec());

        assert!(companion(&QPoly::parse("2*x^2-1").unwrap()).is_err());
    }

    #[test]
    fn amplify_zero_progenitor() {
        let ctx = qctx();
        let prog = ExactMatrix::zeros(ctx.clone(), 1, 1);
        let plan = AmplifyPlan { progenitor: prog, alphas: vec![ctx.one()], block: 7 };
        let report = amplify(&plan, &ctx.zero(), &ctx).unwrap();
        assert_eq!(report.matrix.rows(), 7);
        assert!(report.matrix.entries().iter().all(|e| ctx.is_zero(e)));
        assert_eq!(report.multiplicity_exact, Some(7));
        assert_eq!(report.patched_blocks, 0);
    }

    #[test]
    fn amplify_block_one() {
        // block size 1: every nonzero entry collapses to 0; the result is
        // still a valid L-matrix
        let prog = companion(&QPoly::from_integers(&[-2, 0, 1])).unwrap();
        let ctx = qctx();
        let nf = FieldCtx::number_field_from_str("x^2-2").unwrap();
        let lambda = nf.generator().unwrap();
        let plan = AmplifyPlan { progenitor: prog, alphas: vec![ctx.one()], block: 1 };
        let report = amplify(&plan, &lambda, &nf).unwrap();
        assert_eq!(report.matrix.rows(), 2);
        report
            .matrix
            .verify_l_matrix(&[ctx.zero(), ctx.one()])
            .unwrap();
    }

    #[test]
    fn amplify_companion_sqrt2() {
        // the acceptance-scale instance: 50x50 {0,1}-matrix with sqrt2 of
        // multiplicity at least 11
        let prog = companion(&QPoly::from_integers(&[-2, 0, 1])).unwrap();
        let ctx = qctx();
        let nf = FieldCtx::number_field_from_str("x^2-2").unwrap();
        let lambda = nf.generator().unwrap();
        let plan = AmplifyPlan { progenitor: prog, alphas: vec![ctx.one()], block: 25 };
        let report = amplify(&plan, &lambda, &nf).unwrap();
        assert_eq!(report.matrix.rows(), 50);
        assert_eq!(report.progenitor_multiplicity, 1);
        let exact = report.multiplicity_exact.unwrap();
        assert!(exact >= 11, "exact multiplicity {exact} below 11");
        assert!(exact <= 25);
        assert!(report.lower_bound <= exact as i128);
    }

    #[test]
    fn digraph_pipeline_sqrt2() {
        let report = digraph_pipeline(&QPoly::from_integers(&[-2, 0, 1]), 50).unwrap();
        assert_eq!(report.matrix.rows(), 50);
        assert!(report.multiplicity >= 11 && report.multiplicity <= 25);
        assert_eq!(report.upper_bound, 25);
    }

    #[test]
    fn digraph_pipeline_degree_one() {
        // minpoly x - 1 at n = 9: eigenvalue 1 with multiplicity >= 3
        let report = digraph_pipeline(&QPoly::from_integers(&[-1, 1]), 9).unwrap();
        assert_eq!(report.matrix.rows(), 9);
        assert!(report.multiplicity >= 3, "got {}", report.multiplicity);
        assert!(report.multiplicity <= 9);

        // minpoly x at n = 5: the zero matrix
        let report = digraph_pipeline(&QPoly::from_integers(&[0, 1]), 5).unwrap();
        assert_eq!(report.multiplicity, 5);
    }

    #[test]
    fn eq_en_translation_bracket() {
        // from a pipeline output with multiplicity m at size n, the
        // translated matrix M + lambda (J - I) has rank within one of n - m
        let report = digraph_pipeline(&QPoly::from_integers(&[-1, 1]), 9).unwrap();
        let ctx = qctx();
        let n = report.matrix.rows();
        let m = report.multiplicity;
        let lambda = ctx.one();
        let jmi = ExactMatrix::from_fn(ctx.clone(), n, n, |i, j| {
            if i == j {
                ctx.zero()
            } else {
                ctx.one()
            }
        });
        let translated = report.matrix.add(&jmi.scale(&lambda)).unwrap();
        let r = translated.rank().unwrap();
        assert!(r + 1 >= n - m && r <= n - m + 1, "rank {r} outside bracket around {}", n - m);
    }

    #[test]
    fn polyrel_two_by_two() {
        // P = 2 x1^2 - x2^2 on L = {1, sqrt2}: 2x2 progenitor with
        // eigenvalue 1
        let nf = FieldCtx::number_field_from_str("x^2-2").unwrap();
        let l = LSet::new(nf.clone(), vec![nf.one(), nf.generator().unwrap()]).unwrap();
        let p = MultiPoly::parse(qctx(), "2*x1^2-x2^2", 2).unwrap();
        let out = polyrel_matrix(&p, &l).unwrap();
        assert_eq!(out.matrix.rows(), 2);
        assert_eq!(out.shifted_rank, 1); // M - I singular
        // degree-1 polynomial rejected
        let p1 = MultiPoly::parse(qctx(), "x1", 2).unwrap();
        assert!(polyrel_matrix(&p1, &l).is_err());
        // P(1,...,1) != 1 rejected with the evaluated value in the message
        let p2 = MultiPoly::parse(qctx(), "x1^2-x2^2", 2).unwrap();
        match polyrel_matrix(&p2, &l) {
            Err(Error::Invalid(msg)) => assert!(msg.contains("P(1,...,1) = 0")),
            other => panic!("expected invalid, got {other:?}"),
        }
    }

    #[test]
    fn polytobetter_small() {
        let nf = FieldCtx::number_field_from_str("x^2-2").unwrap();
        let l = LSet::new(nf.clone(), vec![nf.one(), nf.generator().unwrap()]).unwrap();
        let p = MultiPoly::parse(qctx(), "2*x1^2-x2^2", 2).unwrap();
        // block = 1: size 2, rank at most 2
        let report = polytobetter_pipeline(&p, &l, 1).unwrap();
        assert_eq!(report.size, 2);
        assert!(report.rank_exact <= 2);
        report.matrix.verify_l_matrix(l.elems()).unwrap();
    }

    #[test]
    fn polytobetter_size_helper() {
        assert_eq!(polytobetter_size(2, 2), 2);
        assert_eq!(polytobetter_size(3, 2), 3);
        assert_eq!(polytobetter_size(2, 3), 3);
    }
}

//! Dense exact matrices over a [`FieldCtx`] with exact rank computation:
//! fraction-free (Bareiss) elimination over Q and number fields, ordinary
//! row reduction over prime fields, plus the derived quantities used by the
//! constructions (eigenvalue multiplicity, rank of the ones-augmented matrix,
//! entrywise polynomial application, modular rank bounds).

use crate::error::Error;
use crate::field::{Element, FieldCtx, FieldKind};
use crate::qpoly::is_prime_u64;
use crate::MAX_EXACT_ENTRIES;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactMatrix {
    ctx: FieldCtx,
    rows: usize,
    cols: usize,
    entries: Vec<Element>,
}

/// Modular rank bracket for an integer matrix over Q.
#[derive(Debug, Clone)]
pub struct ModularRankBounds {
    pub lower: usize,
    pub upper: usize,
    /// Primes that had to be skipped (divide a denominator), with notices.
    pub skipped: Vec<(u64, String)>,
}

impl ExactMatrix {
    pub fn new(ctx: FieldCtx, rows: usize, cols: usize, entries: Vec<Element>) -> Result<Self, Error> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: entries.len() });
        }
        for e in &entries {
            ctx.validate(e)?;
        }
        Ok(ExactMatrix { ctx, rows, cols, entries })
    }

    pub fn from_fn(ctx: FieldCtx, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Element) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        ExactMatrix { ctx, rows, cols, entries }
    }

    pub fn zeros(ctx: FieldCtx, rows: usize, cols: usize) -> Self {
        let z = ctx.zero();
        ExactMatrix { rows, cols, entries: vec![z; rows * cols], ctx }
    }

    pub fn identity(ctx: FieldCtx, n: usize) -> Self {
        let one = ctx.one();
        let mut m = ExactMatrix::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, one.clone());
        }
        m
    }

    pub fn all_ones(ctx: FieldCtx, n: usize) -> Self {
        let one = ctx.one();
        ExactMatrix { rows: n, cols: n, entries: vec![one; n * n], ctx }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Element {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: Element) {
        self.entries[i * self.cols + j] = e;
    }

    pub fn entries(&self) -> &[Element] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        ExactMatrix::from_fn(self.ctx.clone(), self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }

    pub fn diagonal_equals(&self, e: &Element) -> bool {
        self.is_square() && (0..self.rows).all(|i| self.get(i, i) == e)
    }

    /// First off-diagonal entry not in the allowed set, if any.
    pub fn off_diagonal_violation(&self, allowed: &[Element]) -> Option<(usize, usize)> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i == j {
                    continue;
                }
                if !allowed.contains(self.get(i, j)) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Check the "L-matrix" claim: square, zero diagonal, off-diagonal in L.
    pub fn verify_l_matrix(&self, l: &[Element]) -> Result<(), Error> {
        if !self.is_square() {
            return Err(Error::Invariant("L-matrix must be square".into()));
        }
        let zero = self.ctx.zero();
        if !self.diagonal_equals(&zero) {
            return Err(Error::Invariant("L-matrix diagonal must be zero".into()));
        }
        if let Some((i, j)) = self.off_diagonal_violation(l) {
            return Err(Error::Invariant(format!(
                "off-diagonal entry at ({i},{j}) = {} not in declared L",
                self.ctx.render_element(self.get(i, j))
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        if self.ctx != other.ctx {
            return Err(Error::CtxMismatch);
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.rows * self.cols, got: other.rows * other.cols });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| self.ctx.add(a, b))
            .collect();
        Ok(ExactMatrix { ctx: self.ctx.clone(), rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, Error> {
        let neg = ExactMatrix {
            ctx: other.ctx.clone(),
            rows: other.rows,
            cols: other.cols,
            entries: other.entries.iter().map(|e| other.ctx.neg(e)).collect(),
        };
        self.add(&neg)
    }

    pub fn scale(&self, c: &Element) -> Self {
        ExactMatrix {
            ctx: self.ctx.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| self.ctx.mul(e, c)).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, Error> {
        if self.ctx != other.ctx {
            return Err(Error::CtxMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let ctx = self.ctx.clone();
        let mut out = ExactMatrix::zeros(ctx.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if ctx.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = ctx.mul(a, other.get(k, j));
                    let cur = out.get(i, j).clone();
                    out.set(i, j, ctx.add(&cur, &prod));
                }
            }
        }
        Ok(out)
    }

    /// Leading principal n x n submatrix.
    pub fn leading_principal(&self, n: usize) -> Result<Self, Error> {
        if n > self.rows || n > self.cols {
            return Err(Error::DimensionMismatch { expected: n, got: self.rows.min(self.cols) });
        }
        Ok(ExactMatrix::from_fn(self.ctx.clone(), n, n, |i, j| self.get(i, j).clone()))
    }

    /// Convert into a richer context. Supported promotions: Q -> number
    /// field (constant embedding), Q -> F_p (denominators must be units).
    pub fn into_ctx(&self, target: &FieldCtx) -> Result<Self, Error> {
        if &self.ctx == target {
            return Ok(self.clone());
        }
        if !self.ctx.is_rational() {
            return Err(Error::CtxMismatch);
        }
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            let Element::Rat(r) = e else { return Err(Error::CtxMismatch) };
            entries.push(target.from_rational(r)?);
        }
        Ok(ExactMatrix { ctx: target.clone(), rows: self.rows, cols: self.cols, entries })
    }

    /// Histogram of rendered entry values (off-diagonal only when `off_diag`).
    pub fn entry_histogram(&self, off_diag_only: bool) -> BTreeMap<String, u64> {
        let mut hist = BTreeMap::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if off_diag_only && i == j {
                    continue;
                }
                *hist.entry(self.ctx.render_element(self.get(i, j))).or_insert(0) += 1;
            }
        }
        hist
    }

    // ------------------------------------------------------------------
    // Rank
    // ------------------------------------------------------------------

    /// Exact rank. Fraction-free elimination over Q and number fields,
    /// ordinary elimination over F_p. Pivot rule: first nonzero entry
    /// scanning rows top-down, columns left to right.
    pub fn rank(&self) -> Result<usize, Error> {
        match self.ctx.kind() {
            FieldKind::Prime(p) => Ok(self.rank_fp(*p)),
            FieldKind::Rational => {
                self.check_exact_size()?;
                Ok(bareiss_rank_int(self.to_integer_rows()))
            }
            FieldKind::NumberField { modulus } => {
                self.check_exact_size()?;
                Ok(nf_bareiss_rank(self.to_nf_integer_rows(), modulus))
            }
        }
    }

    fn check_exact_size(&self) -> Result<(), Error> {
        let n = self.rows * self.cols;
        if n > MAX_EXACT_ENTRIES {
            return Err(Error::TooLargeForExactRank { entries: n });
        }
        Ok(())
    }

    fn rank_fp(&self, p: u64) -> usize {
        let mut a: Vec<Vec<u64>> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| match self.get(i, j) {
                        Element::Fp(v) => *v,
                        _ => unreachable!(),
                    })
                    .collect()
            })
            .collect();
        fp_rank(&mut a, p)
    }

    /// Clear denominators row by row, producing integer rows (rank-preserving).
    fn to_integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let mut lcm = BigInt::one();
                for j in 0..self.cols {
                    let Element::Rat(r) = self.get(i, j) else { unreachable!() };
                    lcm = lcm.lcm(r.denom());
                }
                (0..self.cols)
                    .map(|j| {
                        let Element::Rat(r) = self.get(i, j) else { unreachable!() };
                        r.numer() * (&lcm / r.denom())
                    })
                    .collect()
            })
            .collect()
    }

    /// Same for number fields: per-row common denominator over all coordinates.
    fn to_nf_integer_rows(&self) -> Vec<Vec<Vec<BigInt>>> {
        let deg = self.ctx.degree();
        (0..self.rows)
            .map(|i| {
                let mut lcm = BigInt::one();
                for j in 0..self.cols {
                    let Element::Nf(v) = self.get(i, j) else { unreachable!() };
                    for c in v {
                        lcm = lcm.lcm(c.denom());
                    }
                }
                (0..self.cols)
                    .map(|j| {
                        let Element::Nf(v) = self.get(i, j) else { unreachable!() };
                        let mut coords: Vec<BigInt> =
                            v.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
                        coords.resize(deg, BigInt::zero());
                        coords
                    })
                    .collect()
            })
            .collect()
    }

    /// Rank of (M | 1): the matrix with an all-ones column appended.
    pub fn rank_with_ones(&self) -> Result<usize, Error> {
        let one = self.ctx.one();
        let aug = ExactMatrix::from_fn(self.ctx.clone(), self.rows, self.cols + 1, |i, j| {
            if j == self.cols {
                one.clone()
            } else {
                self.get(i, j).clone()
            }
        });
        aug.rank()
    }

    /// Geometric multiplicity of `lambda` as an eigenvalue, computed in the
    /// field `ctx` (which must contain both the entries and lambda):
    /// n - rank(M - lambda I).
    pub fn eigen_multiplicity(&self, lambda: &Element, ctx: &FieldCtx) -> Result<usize, Error> {
        if !self.is_square() {
            return Err(Error::Invalid("eigen_multiplicity needs a square matrix".into()));
        }
        ctx.validate(lambda)?;
        let m = self.into_ctx(ctx)?;
        let mut shifted = m;
        for i in 0..shifted.rows {
            let cur = shifted.get(i, i).clone();
            shifted.set(i, i, ctx.sub(&cur, lambda));
        }
        Ok(shifted.rows - shifted.rank()?)
    }

    /// Apply a univariate polynomial (coefficients in this matrix's context,
    /// constant first) to every entry. The rank bounds
    /// rank f[M] <= C(rank M + k, k) and the sparse-term refinement are
    /// re-verified before returning.
    pub fn entrywise_apply(&self, coeffs: &[Element]) -> Result<Self, Error> {
        let ctx = &self.ctx;
        for c in coeffs {
            ctx.validate(c)?;
        }
        let horner = |x: &Element| {
            let mut acc = ctx.zero();
            for c in coeffs.iter().rev() {
                acc = ctx.add(&ctx.mul(&acc, x), c);
            }
            acc
        };
        let out = ExactMatrix {
            ctx: ctx.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(horner).collect(),
        };
        let r = self.rank()?;
        let rf = out.rank()?;
        let deg = coeffs.iter().rposition(|c| !ctx.is_zero(c)).unwrap_or(0);
        let dense_bound = binomial_u128(r as u128 + deg as u128, deg as u128);
        if (rf as u128) > dense_bound {
            return Err(Error::Invariant(format!(
                "entrywise rank bound violated: rank f[M] = {rf} > C({r}+{deg},{deg}) = {dense_bound}"
            )));
        }
        let sparse_bound: u128 = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !ctx.is_zero(c))
            .map(|(d, _)| {
                if d == 0 {
                    1u128
                } else {
                    binomial_u128(r as u128 + d as u128 - 1, d as u128)
                }
            })
            .sum();
        if (rf as u128) > sparse_bound {
            return Err(Error::Invariant(format!(
                "sparse entrywise rank bound violated: rank f[M] = {rf} > {sparse_bound}"
            )));
        }
        Ok(out)
    }

    /// Reduce an integer matrix over Q modulo each given prime and report
    /// (max modular rank, upper bound). The upper bound is the exact rational
    /// rank when the size policy permits, else min(rows, cols). Primes
    /// dividing a denominator are skipped with a notice.
    pub fn rank_bounds_modular(&self, primes: &[u64]) -> Result<ModularRankBounds, Error> {
        if !self.ctx.is_rational() {
            return Err(Error::Invalid("rank_bounds_modular expects a matrix over Q".into()));
        }
        let mut lower = 0usize;
        let mut skipped = Vec::new();
        for &p in primes {
            if !is_prime_u64(p) {
                skipped.push((p, "not prime".into()));
                continue;
            }
            match self.rank_mod_p(p) {
                Ok(r) => lower = lower.max(r),
                Err(msg) => skipped.push((p, msg)),
            }
        }
        let upper = if self.rows * self.cols <= MAX_EXACT_ENTRIES {
            self.rank()?
        } else {
            self.rows.min(self.cols)
        };
        Ok(ModularRankBounds { lower, upper, skipped })
    }

    /// Rank of the reduction mod p; error message when p divides a denominator.
    pub fn rank_mod_p(&self, p: u64) -> Result<usize, String> {
        let p_big = BigInt::from(p);
        let mut a: Vec<Vec<u64>> = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut row = Vec::with_capacity(self.cols);
            for j in 0..self.cols {
                let Element::Rat(r) = self.get(i, j) else {
                    return Err("matrix not over Q".into());
                };
                if (r.denom() % &p_big).is_zero() {
                    return Err(format!("prime {p} divides a denominator at ({i},{j})"));
                }
                let num = modp(r.numer(), p);
                let den = modp(r.denom(), p);
                let den_inv = fp_inv(den, p);
                row.push(((num as u128 * den_inv as u128) % p as u128) as u64);
            }
            a.push(row);
        }
        Ok(fp_rank(&mut a, p))
    }
}

fn modp(n: &BigInt, p: u64) -> u64 {
    let p_big = BigInt::from(p);
    let mut r = n % &p_big;
    if r.is_negative() {
        r += &p_big;
    }
    use num_traits::ToPrimitive;
    r.to_u64().unwrap()
}

fn fp_inv(a: u64, p: u64) -> u64 {
    // Fermat; a != 0 mod p assumed by callers.
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * base as u128) % p as u128) as u64;
        }
        base = ((base as u128 * base as u128) % p as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Ordinary Gaussian elimination rank over F_p. First-nonzero pivot rule.
pub fn fp_rank(a: &mut [Vec<u64>], p: u64) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut pivot_row = 0usize;
    for col in 0..cols {
        if pivot_row >= rows {
            break;
        }
        let Some(pr) = (pivot_row..rows).find(|&r| a[r][col] % p != 0) else {
            continue;
        };
        a.swap(pivot_row, pr);
        let inv = fp_inv(a[pivot_row][col], p);
        for r in pivot_row + 1..rows {
            if a[r][col] == 0 {
                continue;
            }
            let factor = ((a[r][col] as u128 * inv as u128) % p as u128) as u64;
            for c in col..cols {
                let sub = (factor as u128 * a[pivot_row][c] as u128) % p as u128;
                a[r][c] = ((a[r][c] as u128 + p as u128 - sub) % p as u128) as u64;
            }
        }
        pivot_row += 1;
    }
    pivot_row
}

/// Fraction-free Bareiss elimination rank over Z. Intermediate entries are
/// minors of the input, so every division is exact.
pub fn bareiss_rank_int(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut prev = BigInt::one();
    let mut pivot_row = 0usize;
    for col in 0..cols {
        if pivot_row >= rows {
            break;
        }
        let Some(pr) = (pivot_row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(pivot_row, pr);
        let pivot = a[pivot_row][col].clone();
        for r in pivot_row + 1..rows {
            if a[r][col].is_zero() {
                // still perform the Bareiss update for the trailing columns
                for c in col + 1..cols {
                    let num = &pivot * &a[r][c];
                    debug_assert!((&num % &prev).is_zero(), "Bareiss division must be exact");
                    a[r][c] = num / &prev;
                }
                continue;
            }
            for c in col + 1..cols {
                let num = &pivot * &a[r][c] - &a[r][col] * &a[pivot_row][c];
                debug_assert!((&num % &prev).is_zero(), "Bareiss division must be exact");
                a[r][c] = num / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = pivot;
        pivot_row += 1;
    }
    pivot_row
}

// ---------------------------------------------------------------------------
// Number-field Bareiss: entries are integer coordinate vectors in Z[theta]
// for the monic integral modulus. Exact division by the previous pivot is
// done by a precomputed scaled inverse (u, den) with pivot * u = den.
// ---------------------------------------------------------------------------

type ZNf = Vec<BigInt>;

fn znf_is_zero(a: &ZNf) -> bool {
    a.iter().all(|c| c.is_zero())
}

fn znf_mul(a: &ZNf, b: &ZNf, modulus: &[BigInt]) -> ZNf {
    let m = modulus.len() - 1;
    let mut prod = vec![BigInt::zero(); 2 * m - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            prod[i + j] += x * y;
        }
    }
    znf_reduce(prod, modulus)
}

fn znf_reduce(mut v: ZNf, modulus: &[BigInt]) -> ZNf {
    let m = modulus.len() - 1;
    while v.len() > m {
        let k = v.len() - 1;
        let lead = v.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        for i in 0..m {
            let idx = k - m + i;
            let delta = &modulus[i] * &lead;
            v[idx] -= delta;
        }
    }
    v.resize(m, BigInt::zero());
    v
}

fn znf_sub(a: &ZNf, b: &ZNf) -> ZNf {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Scaled inverse: returns (u, den) with a * u = den (den a positive integer
/// scalar), via extended Euclid in Q[x] mod the modulus.
fn znf_scaled_inverse(a: &ZNf, modulus: &[BigInt]) -> (ZNf, BigInt) {
    use crate::qpoly::QPoly;
    let to_q = |v: &[BigInt]| QPoly::new(v.iter().map(|c| BigRational::from_integer(c.clone())).collect());
    let f = to_q(modulus);
    let ap = to_q(a);
    let (g, u, _) = ap.xgcd(&f);
    assert!(g == QPoly::one(), "pivot not invertible modulo the field modulus");
    let u = u.rem(&f);
    let mut den = BigInt::one();
    for c in u.coeffs() {
        den = den.lcm(c.denom());
    }
    let m = modulus.len() - 1;
    let mut coords: Vec<BigInt> = u.coeffs().iter().map(|c| c.numer() * (&den / c.denom())).collect();
    coords.resize(m, BigInt::zero());
    if den.is_negative() {
        den = -den;
        coords = coords.into_iter().map(|c| -c).collect();
    }
    (coords, den)
}

fn znf_div_exact(a: &ZNf, inv: &ZNf, den: &BigInt, modulus: &[BigInt]) -> ZNf {
    // a / pivot = (a * u) / den, exact coordinatewise
    let prod = znf_mul(a, inv, modulus);
    prod.into_iter()
        .map(|c| {
            debug_assert!((&c % den).is_zero(), "non-exact division in nf bareiss");
            c / den
        })
        .collect()
}

fn nf_bareiss_rank(mut a: Vec<Vec<ZNf>>, modulus: &[BigInt]) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut prev: Option<(ZNf, BigInt)> = None; // scaled inverse of previous pivot
    let mut pivot_row = 0usize;
    for col in 0..cols {
        if pivot_row >= rows {
            break;
        }
        let Some(pr) = (pivot_row..rows).find(|&r| !znf_is_zero(&a[r][col])) else {
            continue;
        };
        a.swap(pivot_row, pr);
        let pivot = a[pivot_row][col].clone();
        for r in pivot_row + 1..rows {
            for c in col + 1..cols {
                let t1 = znf_mul(&pivot, &a[r][c], modulus);
                let t2 = znf_mul(&a[r][col], &a[pivot_row][c], modulus);
                let num = znf_sub(&t1, &t2);
                a[r][c] = match &prev {
                    None => num,
                    Some((inv, den)) => znf_div_exact(&num, inv, den, modulus),
                };
            }
            let m = modulus.len() - 1;
            a[r][col] = vec![BigInt::zero(); m];
        }
        prev = Some(znf_scaled_inverse(&pivot, modulus));
        pivot_row += 1;
    }
    pivot_row
}

/// Binomial coefficient in u128 with saturation.
pub fn binomial_u128(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qctx() -> FieldCtx {
        FieldCtx::rational()
    }

    fn qmat(rows: &[&[i64]]) -> ExactMatrix {
        let ctx = qctx();
        let r = rows.len();
        let c = rows[0].len();
        ExactMatrix::from_fn(ctx.clone(), r, c, |i, j| ctx.from_i64(rows[i][j]))
    }

    /// Paper's 3x3 {-1,1}-matrix of rank 2.
    fn paper_matrix() -> ExactMatrix {
        qmat(&[&[0, 1, 1], &[1, 0, -1], &[1, 1, 0]])
    }

    /// Independent oracle: determinant by cofactor expansion over Q.
    fn naive_det(m: &ExactMatrix) -> BigRational {
        fn go(a: &[Vec<BigRational>]) -> BigRational {
            let n = a.len();
            if n == 1 {
                return a[0][0].clone();
            }
            let mut acc = BigRational::zero();
            for j in 0..n {
                if a[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<BigRational>> = (1..n)
                    .map(|i| (0..n).filter(|&c| c != j).map(|c| a[i][c].clone()).collect())
                    .collect();
                let term = &a[0][j] * go(&minor);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
        let a: Vec<Vec<BigRational>> = (0..m.rows())
            .map(|i| {
                (0..m.cols())
                    .map(|j| match m.get(i, j) {
                        Element::Rat(r) => r.clone(),
                        _ => unreachable!(),
                    })
                    .collect()
            })
            .collect();
        go(&a)
    }

    #[test]
    fn paper_rank_two() {
        assert_eq!(paper_matrix().rank().unwrap(), 2);
        assert!(naive_det(&paper_matrix()).is_zero());
    }

    #[test]
    fn zero_and_j_minus_i() {
        let z = ExactMatrix::zeros(qctx(), 4, 4);
        assert_eq!(z.rank().unwrap(), 0);
        // (J - I) of size 4 has det (-1)^3 * 3 = -3 != 0, so rank 4
        let ctx = qctx();
        let jmi = ExactMatrix::from_fn(ctx.clone(), 4, 4, |i, j| {
            if i == j { ctx.zero() } else { ctx.one() }
        });
        assert_eq!(naive_det(&jmi), BigRational::from_integer(BigInt::from(-3)));
        assert_eq!(jmi.rank().unwrap(), 4);
    }

    #[test]
    fn modular_bounds() {
        // 2*I_3: rank drops to 0 mod 2, stays 3 mod 3 -> lower = 3
        let ctx = qctx();
        let m = ExactMatrix::from_fn(ctx.clone(), 3, 3, |i, j| {
            if i == j { ctx.from_i64(2) } else { ctx.zero() }
        });
        let b = m.rank_bounds_modular(&[2, 3]).unwrap();
        assert_eq!(b.lower, 3);
        assert_eq!(b.upper, 3);

        // paper matrix mod 2 = [[0,1,1],[1,0,1],[1,1,0]] has rank 2
        let b = paper_matrix().rank_bounds_modular(&[2]).unwrap();
        assert_eq!(b.lower, 2);

        // denominators divisible by p are skipped with a notice
        let half = ExactMatrix::new(
            ctx.clone(),
            1,
            1,
            vec![Element::Rat(BigRational::new(BigInt::one(), BigInt::from(2)))],
        )
        .unwrap();
        let b = half.rank_bounds_modular(&[2, 3]).unwrap();
        assert_eq!(b.skipped.len(), 1);
        assert_eq!(b.skipped[0].0, 2);
        assert_eq!(b.lower, 1);
    }

    #[test]
    fn random_modular_equals_exact() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let ctx = qctx();
        for _ in 0..5 {
            let m = ExactMatrix::from_fn(ctx.clone(), 10, 10, |_, _| {
                ctx.from_i64(rng.random_range(1..=2))
            });
            let exact = m.rank().unwrap();
            let b = m.rank_bounds_modular(&[101, 103]).unwrap();
            assert_eq!(b.lower, exact);
            assert!(b.lower <= b.upper);
        }
    }

    #[test]
    fn eigen_multiplicities() {
        let ctx = qctx();
        let j4 = ExactMatrix::all_ones(ctx.clone(), 4);
        assert_eq!(j4.eigen_multiplicity(&ctx.zero(), &ctx).unwrap(), 3);
        let i5 = ExactMatrix::identity(ctx.clone(), 5);
        assert_eq!(i5.eigen_multiplicity(&ctx.one(), &ctx).unwrap(), 5);

        // companion of x^2-2 over Q(sqrt2): eigenvalue sqrt2 of multiplicity 1
        let nf = FieldCtx::number_field_from_str("x^2-2").unwrap();
        let comp = qmat(&[&[0, 2], &[1, 0]]);
        let sqrt2 = nf.generator().unwrap();
        assert_eq!(comp.eigen_multiplicity(&sqrt2, &nf).unwrap(), 1);
        // and rank(M - sqrt2 I) = 1 by the identity mult + rank = n
        let shifted = comp
            .into_ctx(&nf)
            .unwrap()
            .sub(&ExactMatrix::identity(nf.clone(), 2).scale(&sqrt2))
            .unwrap();
        assert_eq!(shifted.rank().unwrap(), 1);
    }

    #[test]
    fn rank_with_ones_examples() {
        let z3 = ExactMatrix::zeros(qctx(), 3, 3);
        assert_eq!(z3.rank_with_ones().unwrap(), 1);
        let ctx = qctx();
        let jmi3 = ExactMatrix::from_fn(ctx.clone(), 3, 3, |i, j| {
            if i == j { ctx.zero() } else { ctx.one() }
        });
        assert_eq!(jmi3.rank_with_ones().unwrap(), 3);
        assert_eq!(paper_matrix().rank_with_ones().unwrap(), 3);
    }

    #[test]
    fn entrywise_identity_and_annihilator() {
        let ctx = qctx();
        let m = paper_matrix();
        // f = x keeps the matrix and the rank
        let id = m.entrywise_apply(&[ctx.zero(), ctx.one()]).unwrap();
        assert_eq!(id, m);

        // f = (x-1)(x-2) = x^2 - 3x + 2 on a {1,2}-matrix of size 9 kills
        // the off-diagonal and leaves 2 on the diagonal: rank 9
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let m = ExactMatrix::from_fn(ctx.clone(), 9, 9, |i, j| {
            if i == j { ctx.zero() } else { ctx.from_i64(rng.random_range(1..=2)) }
        });
        let f = [ctx.from_i64(2), ctx.from_i64(-3), ctx.from_i64(1)];
        let fm = m.entrywise_apply(&f).unwrap();
        assert_eq!(fm.rank().unwrap(), 9);
        for i in 0..9 {
            assert_eq!(fm.get(i, i), &ctx.from_i64(2));
            for j in 0..9 {
                if i != j {
                    assert!(ctx.is_zero(fm.get(i, j)));
                }
            }
        }
        let r = m.rank().unwrap();
        assert!(9u128 <= binomial_u128(r as u128 + 2, 2));
    }

    #[test]
    fn uppbound_fuzz_f101() {
        use rand::{Rng, SeedableRng};
        let ctx = FieldCtx::prime(101).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.random_range(2..=12);
            let m = ExactMatrix::from_fn(ctx.clone(), n, n, |_, _| ctx.sample(&mut rng));
            let deg = rng.random_range(0..=3usize);
            let coeffs: Vec<Element> = (0..=deg).map(|_| ctx.sample(&mut rng)).collect();
            // entrywise_apply asserts both bounds internally
            m.entrywise_apply(&coeffs).unwrap();
        }
    }

    #[test]
    fn uppbound_fuzz_rationals() {
        use rand::{Rng, SeedableRng};
        let ctx = qctx();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        for _ in 0..15 {
            let n = rng.random_range(2..=6);
            let m = ExactMatrix::from_fn(ctx.clone(), n, n, |_, _| {
                ctx.from_i64(rng.random_range(-3..=3))
            });
            let deg = rng.random_range(0..=2usize);
            let coeffs: Vec<Element> =
                (0..=deg).map(|_| ctx.from_i64(rng.random_range(-2..=2))).collect();
            m.entrywise_apply(&coeffs).unwrap();
        }
    }

    #[test]
    fn nf_rank_matches_restriction_of_scalars() {
        // independent route: the Q-rank of the regular-representation
        // blowup equals deg(field) times the number-field rank
        use rand::{Rng, SeedableRng};
        let nf = FieldCtx::number_field_from_str("x^2-2").unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        for _ in 0..15 {
            let n = rng.random_range(1..=5);
            let m = ExactMatrix::from_fn(nf.clone(), n, n, |_, _| {
                // small integer coordinates a + b sqrt2
                let a = rng.random_range(-2i64..=2);
                let b = rng.random_range(-2i64..=2);
                let t = nf.generator().unwrap();
                nf.add(&nf.from_i64(a), &nf.mul_int(&t, &BigInt::from(b)))
            });
            let nf_rank = m.rank().unwrap();
            // blowup: entry a + b sqrt2 becomes [[a, 2b], [b, a]]
            let mut big = vec![vec![BigInt::zero(); 2 * n]; 2 * n];
            for i in 0..n {
                for j in 0..n {
                    let coords = nf.coordinates(m.get(i, j));
                    let a = coords[0].numer().clone();
                    let b = coords[1].numer().clone();
                    big[2 * i][2 * j] = a.clone();
                    big[2 * i][2 * j + 1] = BigInt::from(2) * &b;
                    big[2 * i + 1][2 * j] = b;
                    big[2 * i + 1][2 * j + 1] = a;
                }
            }
            assert_eq!(bareiss_rank_int(big), 2 * nf_rank);
        }
    }

    #[test]
    fn rank_invariances() {
        use rand::{Rng, SeedableRng};
        let ctx = qctx();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let n = rng.random_range(2..=6);
            let m = ExactMatrix::from_fn(ctx.clone(), n, n, |_, _| ctx.from_i64(rng.random_range(-3..=3)));
            let r = m.rank().unwrap();
            // row permutation
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.random_range(0..=i);
                perm.swap(i, j);
            }
            let permuted = ExactMatrix::from_fn(ctx.clone(), n, n, |i, j| m.get(perm[i], j).clone());
            assert_eq!(permuted.rank().unwrap(), r);
            // dilation by a nonzero scalar
            let t = ctx.from_i64(rng.random_range(1..=5));
            assert_eq!(m.scale(&t).rank().unwrap(), r);
        }
    }
}

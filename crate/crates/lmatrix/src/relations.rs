//! Integer-linear decision procedures on a finite set L of field elements:
//! the lattice of integer relations, primitive relations (sum of
//! coefficients equal to 1) with infeasibility certificates, the
//! negative-coefficient normal form for integer L, the difference rewriting
//! used by the rank-3/2 construction, and the rational point criterion.

use crate::error::Error;
use crate::field::{Element, FieldCtx};
use crate::qpoly::QPoly;
use crate::snf::{column_echelon_lattice, kernel_lattice, solve_integer, ZMat, ZSolve};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// A finite set of distinct nonzero field elements.
#[derive(Debug, Clone, PartialEq)]
pub struct LSet {
    ctx: FieldCtx,
    elems: Vec<Element>,
}

impl LSet {
    pub fn new(ctx: FieldCtx, elems: Vec<Element>) -> Result<Self, Error> {
        for e in &elems {
            ctx.validate(e)?;
            if ctx.is_zero(e) {
                return Err(Error::DegenerateL("0 is not allowed in L".into()));
            }
        }
        for i in 0..elems.len() {
            for j in i + 1..elems.len() {
                if elems[i] == elems[j] {
                    return Err(Error::DegenerateL(format!(
                        "duplicate element {}",
                        ctx.render_element(&elems[i])
                    )));
                }
            }
        }
        Ok(LSet { ctx, elems })
    }

    pub fn parse(ctx: FieldCtx, csv: &str) -> Result<Self, Error> {
        let elems = csv
            .split(',')
            .map(|s| ctx.parse_element(s.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        LSet::new(ctx, elems)
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn elems(&self) -> &[Element] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn render(&self) -> Vec<String> {
        self.elems.iter().map(|e| self.ctx.render_element(e)).collect()
    }
}

/// An integer vector A with sum(A) = 1 and sum(A_i alpha_i) = 0; both
/// identities are re-checked in the field context on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntRelation {
    coeffs: Vec<BigInt>,
}

impl IntRelation {
    pub fn new(l: &LSet, coeffs: Vec<BigInt>) -> Result<Self, Error> {
        check_relation(l.ctx(), l.elems(), &coeffs)?;
        Ok(IntRelation { coeffs })
    }

    pub fn from_i64(l: &LSet, coeffs: &[i64]) -> Result<Self, Error> {
        IntRelation::new(l, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }
}

/// Check the two defining identities of a primitive relation against an
/// arbitrary element list (this lower-level entry point allows 0 among the
/// elements, which the amplification patches need).
pub fn check_relation(ctx: &FieldCtx, elems: &[Element], coeffs: &[BigInt]) -> Result<(), Error> {
    if coeffs.len() != elems.len() {
        return Err(Error::DimensionMismatch { expected: elems.len(), got: coeffs.len() });
    }
    let sum: BigInt = coeffs.iter().sum();
    if !sum.is_one() {
        return Err(Error::Invariant(format!("relation coefficients sum to {sum}, not 1")));
    }
    let mut acc = ctx.zero();
    for (a, alpha) in coeffs.iter().zip(elems) {
        acc = ctx.add(&acc, &ctx.mul_int(alpha, a));
    }
    if !ctx.is_zero(&acc) {
        return Err(Error::Invariant(format!(
            "relation does not vanish: sum A_i alpha_i = {}",
            ctx.render_element(&acc)
        )));
    }
    Ok(())
}

/// Integer rows of the Q-linear system expressing sum(A_i alpha_i) = 0,
/// plus the number of auxiliary columns (1 for prime fields, where an extra
/// unknown absorbs multiples of p).
fn relation_rows(ctx: &FieldCtx, elems: &[Element]) -> (ZMat, usize) {
    if ctx.is_prime_field() {
        let p = ctx.characteristic();
        let mut row: Vec<BigInt> = elems
            .iter()
            .map(|e| match e {
                Element::Fp(v) => BigInt::from(*v),
                _ => unreachable!(),
            })
            .collect();
        row.push(BigInt::from(p));
        return (vec![row], 1);
    }
    let deg = ctx.degree();
    let mut rows = Vec::with_capacity(deg);
    for t in 0..deg {
        let rats: Vec<BigRational> = elems
            .iter()
            .map(|e| {
                let coords = ctx.coordinates(e);
                coords.get(t).cloned().unwrap_or_else(BigRational::zero)
            })
            .collect();
        let mut lcm = BigInt::one();
        for r in &rats {
            lcm = lcm.lcm(r.denom());
        }
        let row: Vec<BigInt> = rats.iter().map(|r| r.numer() * (&lcm / r.denom())).collect();
        rows.push(row);
    }
    (rows, 0)
}

/// Basis of the lattice of all integer relations sum(A_i alpha_i) = 0.
/// Computed as the saturated integer kernel of the coordinatized system.
pub fn relation_lattice(l: &LSet) -> Result<Vec<Vec<BigInt>>, Error> {
    let (rows, _extra) = relation_rows(l.ctx(), l.elems());
    let kernel = kernel_lattice(&rows)?;
    let k = l.len();
    Ok(kernel.into_iter().map(|v| v[..k].to_vec()).collect())
}

/// A van der Waerden infeasibility certificate: a rational row vector w
/// with wT M integral and wT b not an integer, for the primitive-relation
/// system of the L set it was issued for.
#[derive(Debug, Clone, PartialEq)]
pub struct VdwCertificate {
    pub w: Vec<BigRational>,
}

/// Outcome of the primitive relation search.
#[derive(Debug, Clone, PartialEq)]
pub enum PrimitiveRelation {
    Found(IntRelation),
    Infeasible(VdwCertificate),
}

/// Find the canonical primitive relation on L, or certify that none exists.
///
/// Canonical = lexicographically least among the minimal-infinity-norm
/// solutions, located by enumerating the solution coset within twice the
/// norm of one particular solution.
pub fn primitive_relation(l: &LSet) -> Result<PrimitiveRelation, Error> {
    let k = l.len();
    let (mut rows, extra) = relation_rows(l.ctx(), l.elems());
    let mut ones = vec![BigInt::one(); k];
    ones.resize(k + extra, BigInt::zero());
    rows.push(ones);
    let mut b = vec![BigInt::zero(); rows.len() - 1];
    b.push(BigInt::one());
    match solve_integer(&rows, &b)? {
        ZSolve::Certificate { numer, denom } => {
            let w = numer
                .iter()
                .map(|n| BigRational::new(n.clone(), denom.clone()))
                .collect();
            Ok(PrimitiveRelation::Infeasible(VdwCertificate { w }))
        }
        ZSolve::Solution(z0) => {
            let hom = kernel_lattice(&rows)?;
            let hom_proj: Vec<Vec<BigInt>> = hom.iter().map(|v| v[..k].to_vec()).collect();
            let z0_proj = z0[..k].to_vec();
            let best = coset_min_inf_norm(&z0_proj, &hom_proj);
            let rel = IntRelation::new(l, best)?;
            Ok(PrimitiveRelation::Found(rel))
        }
    }
}

/// Verify a vdW certificate against the primitive-relation system of `l`.
pub fn verify_certificate(l: &LSet, cert: &VdwCertificate) -> bool {
    let (mut rows, extra) = relation_rows(l.ctx(), l.elems());
    let k = l.len();
    let mut ones = vec![BigInt::one(); k];
    ones.resize(k + extra, BigInt::zero());
    rows.push(ones);
    let mut b = vec![BigRational::zero(); rows.len() - 1];
    b.push(BigRational::one());
    if cert.w.len() != rows.len() {
        return false;
    }
    // wT M integral
    for col in 0..k + extra {
        let mut acc = BigRational::zero();
        for (wi, row) in cert.w.iter().zip(&rows) {
            acc += wi * BigRational::from_integer(row[col].clone());
        }
        if !acc.denom().is_one() {
            return false;
        }
    }
    // wT b not an integer
    let mut acc = BigRational::zero();
    for (wi, bi) in cert.w.iter().zip(&b) {
        acc += wi * bi;
    }
    !acc.denom().is_one()
}

/// Enumerate the coset z0 + lattice within infinity-norm bound
/// 2 * |z0|_inf and return the lexicographically least minimal-norm vector.
fn coset_min_inf_norm(z0: &[BigInt], lattice: &[Vec<BigInt>]) -> Vec<BigInt> {
    let norm = |v: &[BigInt]| v.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero);
    let bound = BigInt::from(2) * norm(z0);
    let cols = column_echelon_lattice(lattice);
    if cols.is_empty() {
        return z0.to_vec();
    }
    let mut best: Option<Vec<BigInt>> = None;
    let mut current = z0.to_vec();
    // echelon columns have strictly increasing pivot rows, so coefficient
    // ranges can be derived exactly one column at a time
    fn rec(
        cols: &[Vec<BigInt>],
        idx: usize,
        current: &mut Vec<BigInt>,
        bound: &BigInt,
        best: &mut Option<Vec<BigInt>>,
    ) {
        if idx == cols.len() {
            let norm = current.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero);
            if norm > *bound {
                return;
            }
            let better = match best {
                None => true,
                Some(b) => {
                    let bn = b.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero);
                    norm < bn || (norm == bn && current[..] < b[..])
                }
            };
            if better {
                *best = Some(current.clone());
            }
            return;
        }
        let col = &cols[idx];
        let pr = col.iter().position(|x| !x.is_zero()).expect("echelon column nonzero");
        let h = col[pr].clone(); // positive by construction
        let cur = current[pr].clone();
        // need |cur + c*h| <= bound
        let lo = (-bound - &cur).div_floor(&h);
        let hi = (bound - &cur).div_floor(&h);
        let mut c = lo;
        while c <= hi {
            if !c.is_zero() {
                for (x, y) in current.iter_mut().zip(col) {
                    *x += &c * y;
                }
            }
            rec(cols, idx + 1, current, bound, best);
            if !c.is_zero() {
                for (x, y) in current.iter_mut().zip(col) {
                    *x -= &c * y;
                }
            }
            c += 1;
        }
    }
    rec(&cols, 0, &mut current, &bound, &mut best);
    best.unwrap_or_else(|| z0.to_vec())
}

/// Rewrite a primitive relation with at most one negative coefficient.
/// Requires L to consist of integers (as a subset of Q) and k >= 3 when a
/// reduction step is needed. Already-conforming relations pass through.
pub fn normalize_min_negatives(l: &LSet, rel: &IntRelation) -> Result<IntRelation, Error> {
    if !l.ctx().is_rational() {
        return Err(Error::Invalid("normalize_min_negatives needs L as integers in Q".into()));
    }
    let alphas: Vec<BigInt> = l
        .elems()
        .iter()
        .map(|e| match e {
            Element::Rat(r) if r.denom().is_one() => Ok(r.numer().clone()),
            _ => Err(Error::Invalid("normalize_min_negatives needs integer L".into())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut a = rel.coeffs().to_vec();
    let negatives = |a: &[BigInt]| a.iter().filter(|x| x.is_negative()).count();
    while negatives(&a) >= 2 {
        let k = a.len();
        if k < 3 {
            return Err(Error::Invalid("reduction step needs k >= 3".into()));
        }
        // lexicographically first pair of negative indices, plus the first
        // remaining index to complete the triple
        let negs: Vec<usize> = (0..k).filter(|&i| a[i].is_negative()).collect();
        let (i, j) = (negs[0], negs[1]);
        let h = (0..k).find(|&t| t != i && t != j).unwrap();
        // integer kernel of [[1,1,1],[alpha_i,alpha_j,alpha_h]]:
        // (alpha_j - alpha_h, alpha_h - alpha_i, alpha_i - alpha_j)
        let mut b_i = &alphas[j] - &alphas[h];
        let mut b_j = &alphas[h] - &alphas[i];
        let mut b_h = &alphas[i] - &alphas[j];
        let g = b_i.gcd(&b_j).gcd(&b_h);
        b_i /= &g;
        b_j /= &g;
        b_h /= &g;
        // flip so that exactly two of the three components are positive
        let pos = [&b_i, &b_j, &b_h].iter().filter(|x| x.is_positive()).count();
        if pos < 2 {
            b_i = -b_i;
            b_j = -b_j;
            b_h = -b_h;
        }
        // smallest admissible scaling: first s that strictly reduces the
        // number of negatives
        let before = negatives(&a);
        let mut s = BigInt::one();
        loop {
            let mut cand = a.clone();
            cand[i] += &s * &b_i;
            cand[j] += &s * &b_j;
            cand[h] += &s * &b_h;
            if negatives(&cand) < before {
                a = cand;
                break;
            }
            s += 1;
        }
    }
    IntRelation::new(l, a)
}

/// The difference rewriting alpha_1 + sum B_{i,i'} (alpha_i - alpha_{i'}) = 0
/// of a primitive relation; positions into L are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceForm {
    /// (i, i') -> B_{i,i'} > 0
    pub b: BTreeMap<(usize, usize), BigInt>,
    /// S = sum of all B values.
    pub s: BigInt,
}

pub fn relation_to_differences(l: &LSet, rel: &IntRelation) -> Result<DifferenceForm, Error> {
    relation_to_differences_raw(l.ctx(), l.elems(), rel.coeffs())
}

/// Raw-slice variant of [`relation_to_differences`]; the construction
/// patches use it with element lists that may contain 0.
pub fn relation_to_differences_raw(
    ctx: &FieldCtx,
    elems: &[Element],
    coeffs: &[BigInt],
) -> Result<DifferenceForm, Error> {
    check_relation(ctx, elems, coeffs)?;
    let mut b = BTreeMap::new();
    for (i, a) in coeffs.iter().enumerate() {
        if i == 0 {
            continue;
        }
        if a.is_positive() {
            b.insert((i, 0usize), a.clone());
        } else if a.is_negative() {
            b.insert((0usize, i), -a.clone());
        }
    }
    let s: BigInt = b.values().sum();
    // re-verify alpha_1 + sum B_{i,i'}(alpha_i - alpha_{i'}) = 0 in ctx
    let mut acc = elems[0].clone();
    for (&(i, ip), coeff) in &b {
        let diff = ctx.sub(&elems[i], &elems[ip]);
        acc = ctx.add(&acc, &ctx.mul_int(&diff, coeff));
    }
    if !ctx.is_zero(&acc) {
        return Err(Error::Invariant(format!(
            "difference form does not re-sum to zero: {}",
            ctx.render_element(&acc)
        )));
    }
    Ok(DifferenceForm { b, s })
}

/// Outcome of an integral solve of a rational system M z = b.
#[derive(Debug, Clone, PartialEq)]
pub enum IntegerSolve {
    Solution(Vec<BigInt>),
    /// w with wT M integral and wT b not an integer.
    Certificate(Vec<BigRational>),
}

/// Decide integral solvability of M z = b for rational M, b; either an
/// integer solution or a van der Waerden certificate is returned.
pub fn integer_solvable(m: &[Vec<BigRational>], b: &[BigRational]) -> Result<IntegerSolve, Error> {
    let rows = m.len();
    if b.len() != rows {
        return Err(Error::DimensionMismatch { expected: rows, got: b.len() });
    }
    // clear denominators row by row
    let mut mult = Vec::with_capacity(rows);
    let mut mi: ZMat = Vec::with_capacity(rows);
    let mut bi: Vec<BigInt> = Vec::with_capacity(rows);
    for (row, rhs) in m.iter().zip(b) {
        let mut lcm = rhs.denom().clone();
        for e in row {
            lcm = lcm.lcm(e.denom());
        }
        mi.push(row.iter().map(|e| e.numer() * (&lcm / e.denom())).collect());
        bi.push(rhs.numer() * (&lcm / rhs.denom()));
        mult.push(lcm);
    }
    match solve_integer(&mi, &bi)? {
        ZSolve::Solution(z) => Ok(IntegerSolve::Solution(z)),
        ZSolve::Certificate { numer, denom } => {
            // certificate for the cleared system maps back through the row
            // multipliers: w_i = numer_i * mult_i / denom
            let w = numer
                .iter()
                .zip(&mult)
                .map(|(n, l)| BigRational::new(n * l, denom.clone()))
                .collect();
            Ok(IntegerSolve::Certificate(w))
        }
    }
}

/// Direct re-verification of either branch of [`integer_solvable`].
pub fn verify_integer_solve(m: &[Vec<BigRational>], b: &[BigRational], out: &IntegerSolve) -> bool {
    match out {
        IntegerSolve::Solution(z) => {
            for (row, rhs) in m.iter().zip(b) {
                let mut acc = BigRational::zero();
                for (e, zi) in row.iter().zip(z) {
                    acc += e * BigRational::from_integer(zi.clone());
                }
                if &acc != rhs {
                    return false;
                }
            }
            true
        }
        IntegerSolve::Certificate(w) => {
            if w.len() != m.len() {
                return false;
            }
            let cols = m.first().map_or(0, |r| r.len());
            for c in 0..cols {
                let mut acc = BigRational::zero();
                for (wi, row) in w.iter().zip(m) {
                    acc += wi * &row[c];
                }
                if !acc.denom().is_one() {
                    return false;
                }
            }
            let mut acc = BigRational::zero();
            for (wi, rhs) in w.iter().zip(b) {
                acc += wi * rhs;
            }
            !acc.denom().is_one()
        }
    }
}

/// The rational point criterion: a degree-one integer polynomial Q with
/// Q(v) = 0 and Q(1,...,1) = 1 exists iff gcd(s_1 - r_1, ..., s_k - r_k) = 1
/// for v = (r_i/s_i) in lowest terms.
pub fn point_criterion(v: &[BigRational]) -> bool {
    let mut g = BigInt::zero();
    for coord in v {
        let diff = coord.denom() - coord.numer();
        g = g.gcd(&diff);
    }
    g.is_one()
}

/// Brute-force witness for the point criterion: integer A with
/// sum A_i (1 - v_i) = 1 and |A_i| <= bound, if one exists in the box.
pub fn point_criterion_witness(v: &[BigRational], bound: i64) -> Option<Vec<BigInt>> {
    let k = v.len();
    let one_minus: Vec<BigRational> = v.iter().map(|x| BigRational::one() - x).collect();
    let mut a = vec![-bound; k];
    loop {
        let mut acc = BigRational::zero();
        for (ai, c) in a.iter().zip(&one_minus) {
            acc += BigRational::from_integer(BigInt::from(*ai)) * c;
        }
        if acc.is_one() {
            return Some(a.iter().map(|&x| BigInt::from(x)).collect());
        }
        let mut i = 0;
        loop {
            if i == k {
                return None;
            }
            a[i] += 1;
            if a[i] <= bound {
                break;
            }
            a[i] = -bound;
            i += 1;
        }
    }
}

/// Minimal polynomial of lambda = 1/(1 - alpha) given the minimal polynomial
/// of alpha over Q; returned only when lambda is an algebraic integer
/// (monic integral after normalization).
pub fn algebraic_integer_of_inverse(minpoly_alpha: &QPoly) -> Result<Option<QPoly>, Error> {
    if minpoly_alpha.is_zero() || minpoly_alpha.degree() == 0 {
        return Err(Error::Invalid("minimal polynomial must be non-constant".into()));
    }
    let g = minpoly_alpha.monic();
    if g.eval(&BigRational::one()).is_zero() {
        return Err(Error::Invalid("alpha = 1 makes 1/(1-alpha) undefined".into()));
    }
    // roots of h are 1 - alpha; roots of reverse(h)/h(0) are 1/(1 - alpha)
    let h = g.compose_affine(&BigRational::one(), &-BigRational::one());
    let lambda_poly = h.reverse().monic();
    if lambda_poly.has_integer_coeffs() {
        Ok(Some(lambda_poly))
    } else {
        Ok(None)
    }
}

//! Sparse multivariate polynomials over a field context, Hasse derivatives,
//! and order of vanishing at a point.
//!
//! The Hasse derivative of multi-index i is the coefficient of z^i in
//! P(x + z); it replaces iterated partial derivatives in positive
//! characteristic (binomial coefficients are applied multiplicatively per
//! variable, reduced in the coefficient field).

use crate::error::Error;
use crate::field::{Element, FieldCtx};
use crate::parse;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Sparse polynomial in k variables; no zero coefficients are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    ctx: FieldCtx,
    k: usize,
    terms: BTreeMap<Vec<u32>, Element>,
}

fn binomial_bigint(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl MultiPoly {
    pub fn new(ctx: FieldCtx, k: usize, terms: BTreeMap<Vec<u32>, Element>) -> Result<Self, Error> {
        let mut clean = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != k {
                return Err(Error::DimensionMismatch { expected: k, got: e.len() });
            }
            ctx.validate(&c)?;
            if !ctx.is_zero(&c) {
                clean.insert(e, c);
            }
        }
        Ok(MultiPoly { ctx, k, terms: clean })
    }

    pub fn zero(ctx: FieldCtx, k: usize) -> Self {
        MultiPoly { ctx, k, terms: BTreeMap::new() }
    }

    /// Parse from the `2*x1^2-x2^2` syntax; `k` is forced to at least the
    /// highest variable index seen.
    pub fn parse(ctx: FieldCtx, input: &str, k_min: usize) -> Result<Self, Error> {
        let (k_seen, raw) = parse::parse_poly(input)?;
        let k = k_seen.max(k_min);
        let mut terms = BTreeMap::new();
        for (mut e, c) in raw {
            e.resize(k, 0);
            let elem = ctx.from_rational(&c)?;
            terms.insert(e, elem);
        }
        MultiPoly::new(ctx, k, terms)
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts: Vec<String> = Vec::new();
        // highest total degree first, then lexicographic
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by_key(|e| {
            let d: u32 = e.iter().sum();
            (std::cmp::Reverse(d), (*e).clone())
        });
        for e in keys {
            let c = &self.terms[e];
            let coeff_str = self.ctx.render_element(c);
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| {
                    if p == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, p)
                    }
                })
                .collect();
            let body = if mono.is_empty() {
                coeff_str.clone()
            } else if coeff_str == "1" {
                mono.join("*")
            } else if coeff_str == "-1" {
                format!("-{}", mono.join("*"))
            } else {
                format!("{}*{}", coeff_str, mono.join("*"))
            };
            if parts.is_empty() {
                parts.push(body);
            } else if let Some(stripped) = body.strip_prefix('-') {
                parts.push(format!("-{stripped}"));
            } else {
                parts.push(format!("+{body}"));
            }
        }
        parts.concat()
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn vars(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Element> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degrees.next() {
            None => true,
            Some(d) => degrees.all(|x| x == d),
        }
    }

    /// All coefficients are integers (meaningful over Q).
    pub fn has_integer_coeffs(&self) -> bool {
        self.terms.values().all(|c| match c {
            Element::Rat(r) => r.denom().is_one(),
            _ => false,
        })
    }

    pub fn insert_term(&mut self, e: Vec<u32>, c: Element) {
        assert_eq!(e.len(), self.k);
        let cur = self.terms.remove(&e).unwrap_or_else(|| self.ctx.zero());
        let sum = self.ctx.add(&cur, &c);
        if !self.ctx.is_zero(&sum) {
            self.terms.insert(e, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.k, other.k);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Element) -> Self {
        let mut terms = BTreeMap::new();
        for (e, v) in &self.terms {
            let prod = self.ctx.mul(v, c);
            if !self.ctx.is_zero(&prod) {
                terms.insert(e.clone(), prod);
            }
        }
        MultiPoly { ctx: self.ctx.clone(), k: self.k, terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.k, other.k);
        let mut out = MultiPoly::zero(self.ctx.clone(), self.k);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.insert_term(e, self.ctx.mul(c1, c2));
            }
        }
        out
    }

    /// Multiply by the single variable x_i (0-based index).
    pub fn mul_var(&self, i: usize) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2[i] += 1;
            terms.insert(e2, c.clone());
        }
        MultiPoly { ctx: self.ctx.clone(), k: self.k, terms }
    }

    /// Map coefficients into a target context (identity, or Q -> richer).
    pub fn into_ctx(&self, target: &FieldCtx) -> Result<Self, Error> {
        if &self.ctx == target {
            return Ok(self.clone());
        }
        if !self.ctx.is_rational() {
            return Err(Error::CtxMismatch);
        }
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let Element::Rat(r) = c else { return Err(Error::CtxMismatch) };
            let v = target.from_rational(r)?;
            if !target.is_zero(&v) {
                terms.insert(e.clone(), v);
            }
        }
        Ok(MultiPoly { ctx: target.clone(), k: self.k, terms })
    }

    /// Evaluate at a point whose coordinates live in `ctx` (the coefficient
    /// context must embed: identical, or Q into anything).
    pub fn eval(&self, point: &[Element], ctx: &FieldCtx) -> Result<Element, Error> {
        if point.len() != self.k {
            return Err(Error::DimensionMismatch { expected: self.k, got: point.len() });
        }
        let lifted = self.into_ctx(ctx)?;
        let mut acc = ctx.zero();
        for (e, c) in &lifted.terms {
            let mut term = c.clone();
            for (xi, &p) in point.iter().zip(e) {
                if p > 0 {
                    term = ctx.mul(&term, &ctx.pow(xi, p as u64));
                }
            }
            acc = ctx.add(&acc, &term);
        }
        Ok(acc)
    }

    /// Hasse derivative: the coefficient of z^i in P(x + z). Characteristic
    /// safe: binomials are computed in Z and reduced into the field.
    pub fn hasse_derivative(&self, i: &[u32]) -> Result<Self, Error> {
        if i.len() != self.k {
            return Err(Error::DimensionMismatch { expected: self.k, got: i.len() });
        }
        let mut out = MultiPoly::zero(self.ctx.clone(), self.k);
        'term: for (e, c) in &self.terms {
            let mut coeff = BigInt::one();
            let mut shifted = Vec::with_capacity(self.k);
            for (&et, &it) in e.iter().zip(i) {
                if it > et {
                    continue 'term;
                }
                coeff *= binomial_bigint(et, it);
                shifted.push(et - it);
            }
            let factor = self.ctx.from_bigint(&coeff);
            let v = self.ctx.mul(c, &factor);
            if !self.ctx.is_zero(&v) {
                out.insert_term(shifted, v);
            }
        }
        Ok(out)
    }

    /// Order of vanishing at a point: the largest m such that every Hasse
    /// derivative of order below m vanishes at the point. The zero
    /// polynomial returns degree + 1 (= 1) as an "infinite" sentinel.
    pub fn vanishing_order(&self, point: &[Element], ctx: &FieldCtx) -> Result<u32, Error> {
        if self.is_zero() {
            return Ok(self.degree() + 1);
        }
        let lifted = self.into_ctx(ctx)?;
        let deg = lifted.degree();
        for m in 0..=deg {
            for idx in multi_indices(self.k, m) {
                let der = lifted.hasse_derivative(&idx)?;
                let v = der.eval(point, ctx)?;
                if !ctx.is_zero(&v) {
                    return Ok(m);
                }
            }
        }
        // a nonzero polynomial always has a nonvanishing Hasse derivative of
        // order at most its degree (the lowest-degree term of P(x + a))
        Err(Error::Invariant("vanishing order exceeded the degree for a nonzero polynomial".into()))
    }

    /// Substitute x_i -> x_i + x_1 for every i >= 2 (0-based var 0 is x_1).
    pub fn shift_vars_by_first(&self) -> Self {
        let ctx = self.ctx.clone();
        let k = self.k;
        let mut out = MultiPoly::zero(ctx.clone(), k);
        for (e, c) in &self.terms {
            // expand prod_{i>=2} (x_i + x_1)^{e_i} * x_1^{e_1}
            let mut partial = MultiPoly::zero(ctx.clone(), k);
            let mut base = vec![0u32; k];
            base[0] = e[0];
            partial.insert_term(base, c.clone());
            for var in 1..k {
                if e[var] == 0 {
                    continue;
                }
                let mut next = MultiPoly::zero(ctx.clone(), k);
                for (pe, pc) in &partial.terms {
                    for j in 0..=e[var] {
                        // choose j copies of x_var, e[var]-j copies of x_1
                        let b = binomial_bigint(e[var], j);
                        let coeff = ctx.mul(pc, &ctx.from_bigint(&b));
                        let mut ne = pe.clone();
                        ne[var] += j;
                        ne[0] += e[var] - j;
                        next.insert_term(ne, coeff);
                    }
                }
                partial = next;
            }
            out = out.add(&partial);
        }
        out
    }
}

/// All multi-indices of length k and total degree m, lexicographic order.
pub fn multi_indices(k: usize, m: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; k];
    fn rec(k: usize, pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == k - 1 {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[pos] = v;
            rec(k, pos + 1, left - v, cur, out);
        }
    }
    if k == 0 {
        return out;
    }
    rec(k, 0, m, &mut cur, &mut out);
    out.sort();
    out
}

/// Monomials of total degree m in k variables as exponent vectors,
/// lexicographically sorted (the canonical index order used throughout).
pub fn monomials_of_degree(k: usize, m: u32) -> Vec<Vec<u32>> {
    multi_indices(k, m)
}

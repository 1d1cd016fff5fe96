//! Points and subspaces of projective space P^{d-1}(F_q) for prime q,
//! represented by their underlying vector subspaces of F_q^d in reduced
//! row-echelon form (one canonical carrier per subspace).

use crate::error::Error;
use crate::qpoly::is_prime_u64;

/// A point of P^{d-1}(F_q): nonzero vector normalized so its first nonzero
/// coordinate is 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPoint {
    pub q: u64,
    pub d: usize,
    pub rep: Vec<u64>,
}

/// A subspace of F_q^d with an RREF-canonical basis. dim 0 has an empty
/// basis (the subspace called the empty flat of the projective space).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subspace {
    pub q: u64,
    pub d: usize,
    basis: Vec<Vec<u64>>,
}

fn inv_mod(a: u64, q: u64) -> u64 {
    // q prime, a != 0
    let mut acc = 1u64;
    let mut base = a % q;
    let mut e = q - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        e >>= 1;
    }
    acc
}

/// RREF of a list of vectors mod q; returns the canonical basis rows.
fn rref(mut rows: Vec<Vec<u64>>, q: u64) -> Vec<Vec<u64>> {
    let nrows = rows.len();
    if nrows == 0 {
        return rows;
    }
    let d = rows[0].len();
    let mut pivot_row = 0usize;
    for col in 0..d {
        if pivot_row >= nrows {
            break;
        }
        let Some(pr) = (pivot_row..nrows).find(|&r| rows[r][col] % q != 0) else {
            continue;
        };
        rows.swap(pivot_row, pr);
        let inv = inv_mod(rows[pivot_row][col], q);
        for c in 0..d {
            rows[pivot_row][c] = rows[pivot_row][c] * inv % q;
        }
        for r in 0..nrows {
            if r == pivot_row || rows[r][col] == 0 {
                continue;
            }
            let f = rows[r][col];
            for c in 0..d {
                rows[r][c] = (rows[r][c] + (q - f) * rows[pivot_row][c]) % q;
            }
        }
        pivot_row += 1;
    }
    rows.truncate(pivot_row);
    rows.retain(|r| r.iter().any(|&x| x != 0));
    rows
}

impl ProjPoint {
    /// Canonical representative of the line through a nonzero vector.
    pub fn from_vector(q: u64, v: &[u64]) -> Result<Self, Error> {
        let mut rep: Vec<u64> = v.iter().map(|&x| x % q).collect();
        let Some(first) = rep.iter().position(|&x| x != 0) else {
            return Err(Error::ZeroVector);
        };
        let inv = inv_mod(rep[first], q);
        for x in rep.iter_mut() {
            *x = *x * inv % q;
        }
        Ok(ProjPoint { q, d: v.len(), rep })
    }

    pub fn as_subspace(&self) -> Subspace {
        Subspace { q: self.q, d: self.d, basis: vec![self.rep.clone()] }
    }
}

impl Subspace {
    pub fn zero(q: u64, d: usize) -> Self {
        Subspace { q, d, basis: vec![] }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    /// Does this subspace contain the vector?
    pub fn contains_vector(&self, v: &[u64]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.iter().map(|&x| x % self.q).collect());
        rref(rows, self.q).len() == self.dim()
    }

    /// Containment of subspaces: W <= self.
    pub fn contains(&self, w: &Subspace) -> bool {
        w.basis.iter().all(|v| self.contains_vector(v))
    }

    /// True iff <w, z> = 0 for every basis vector w. The dim-0 subspace is
    /// orthogonal to everything; z must be nonzero.
    pub fn is_orthogonal(&self, z: &[u64]) -> Result<bool, Error> {
        if z.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: z.len() });
        }
        if z.iter().all(|&x| x % self.q == 0) {
            return Err(Error::ZeroVector);
        }
        Ok(self.basis.iter().all(|w| dot(w, z, self.q) == 0))
    }

    /// All vectors of the subspace (including zero), in lexicographic order.
    pub fn all_vectors(&self) -> Vec<Vec<u64>> {
        let k = self.dim();
        let q = self.q;
        let mut out = Vec::with_capacity((q as usize).pow(k as u32));
        let mut coeffs = vec![0u64; k];
        loop {
            let mut v = vec![0u64; self.d];
            for (c, b) in coeffs.iter().zip(&self.basis) {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi = (*vi + c * bi) % q;
                }
            }
            out.push(v);
            // odometer
            let mut i = 0;
            loop {
                if i == k {
                    out.sort();
                    return out;
                }
                coeffs[i] += 1;
                if coeffs[i] < q {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
        }
    }

    /// Projective points lying on this subspace, in lexicographic order.
    pub fn points(&self) -> Vec<ProjPoint> {
        let mut pts: Vec<ProjPoint> = self
            .all_vectors()
            .into_iter()
            .filter(|v| v.iter().any(|&x| x != 0))
            .map(|v| ProjPoint::from_vector(self.q, &v).unwrap())
            .collect();
        pts.sort();
        pts.dedup();
        pts
    }
}

pub fn dot(a: &[u64], b: &[u64], q: u64) -> u64 {
    a.iter().zip(b).map(|(x, y)| x * y % q).sum::<u64>() % q
}

/// All points of P^{d-1}(F_q) in lexicographic order of canonical
/// representatives. Exactly (q^d - 1)/(q - 1) points.
pub fn enumerate_points(q: u64, d: usize) -> Result<Vec<ProjPoint>, Error> {
    if !is_prime_u64(q) {
        return Err(Error::CompositeModulus(q));
    }
    if d == 0 {
        return Err(Error::Invalid("ambient dimension must be at least 1".into()));
    }
    // canonical reps: first nonzero coordinate is 1
    let mut out = Vec::new();
    let mut rep = vec![0u64; d];
    fn rec(rep: &mut Vec<u64>, pos: usize, started: bool, q: u64, out: &mut Vec<ProjPoint>) {
        if pos == rep.len() {
            if started {
                out.push(ProjPoint { q, d: rep.len(), rep: rep.clone() });
            }
            return;
        }
        if !started {
            // leading zeros, then a leading 1
            rep[pos] = 0;
            rec(rep, pos + 1, false, q, out);
            rep[pos] = 1;
            rec(rep, pos + 1, true, q, out);
            rep[pos] = 0;
        } else {
            for v in 0..q {
                rep[pos] = v;
                rec(rep, pos + 1, true, q, out);
            }
            rep[pos] = 0;
        }
    }
    rec(&mut rep, 0, false, q, &mut out);
    out.sort();
    let expected = ((q as u128).pow(d as u32) - 1) / (q as u128 - 1);
    debug_assert_eq!(out.len() as u128, expected);
    Ok(out)
}

/// Span of a list of vectors in F_q^d, RREF-canonical. span([]) = dim 0.
pub fn span(q: u64, d: usize, vectors: &[Vec<u64>]) -> Result<Subspace, Error> {
    for v in vectors {
        if v.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: v.len() });
        }
    }
    let rows: Vec<Vec<u64>> = vectors.iter().map(|v| v.iter().map(|&x| x % q).collect()).collect();
    Ok(Subspace { q, d, basis: rref(rows, q) })
}

/// Span of subspaces (their union of bases).
pub fn span_subspaces(q: u64, d: usize, parts: &[&Subspace]) -> Subspace {
    let mut rows = Vec::new();
    for p in parts {
        rows.extend(p.basis.iter().cloned());
    }
    Subspace { q, d, basis: rref(rows, q) }
}

/// The hyperplane z^perp for a nonzero z: the (d-1)-dimensional kernel of
/// x -> <x, z>, RREF-canonical.
pub fn hyperplane_of(q: u64, z: &[u64]) -> Result<Subspace, Error> {
    let d = z.len();
    let zr: Vec<u64> = z.iter().map(|&x| x % q).collect();
    let Some(lead) = zr.iter().position(|&x| x != 0) else {
        return Err(Error::ZeroVector);
    };
    // kernel basis: for each coordinate j != lead a vector with 1 at j and
    // -z_j / z_lead at lead
    let inv = inv_mod(zr[lead], q);
    let mut rows = Vec::with_capacity(d - 1);
    for j in 0..d {
        if j == lead {
            continue;
        }
        let mut v = vec![0u64; d];
        v[j] = 1;
        v[lead] = (q - zr[j] * inv % q) % q;
        rows.push(v);
    }
    Ok(Subspace { q, d, basis: rref(rows, q) })
}

/// All k-dimensional subspaces of F_q^d contained in `within`
/// (use the full space for all of Gr(k, d)), canonical and lex-sorted.
/// Desk-scale enumeration via spans of point tuples.
pub fn subspaces_within(within: &Subspace, k: usize) -> Vec<Subspace> {
    if k == 0 {
        return vec![Subspace::zero(within.q, within.d)];
    }
    if k > within.dim() {
        return vec![];
    }
    let pts = within.points();
    let mut found: Vec<Subspace> = Vec::new();
    let mut idx = vec![0usize; k];
    fn rec(
        pts: &[ProjPoint],
        q: u64,
        d: usize,
        k: usize,
        start: usize,
        idx: &mut Vec<usize>,
        depth: usize,
        found: &mut Vec<Subspace>,
    ) {
        if depth == k {
            let vecs: Vec<Vec<u64>> = idx.iter().map(|&i| pts[i].rep.clone()).collect();
            let s = span(q, d, &vecs).unwrap();
            if s.dim() == k {
                found.push(s);
            }
            return;
        }
        for i in start..pts.len() {
            idx[depth] = i;
            rec(pts, q, d, k, i + 1, idx, depth + 1, found);
        }
    }
    rec(&pts, within.q, within.d, k, 0, &mut idx, 0, &mut found);
    found.sort();
    found.dedup();
    found
}

/// The full space F_q^d as a subspace.
pub fn full_space(q: u64, d: usize) -> Subspace {
    let mut basis = Vec::with_capacity(d);
    for i in 0..d {
        let mut v = vec![0u64; d];
        v[i] = 1;
        basis.push(v);
    }
    Subspace { q, d, basis }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_counts_and_order() {
        let pts = enumerate_points(2, 2).unwrap();
        let reps: Vec<Vec<u64>> = pts.iter().map(|p| p.rep.clone()).collect();
        assert_eq!(reps, vec![vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(enumerate_points(5, 2).unwrap().len(), 6);
        assert_eq!(enumerate_points(3, 5).unwrap().len(), 121);
        assert!(enumerate_points(4, 2).is_err());
    }

    #[test]
    fn spans() {
        let s = span(5, 2, &[]).unwrap();
        assert_eq!(s.dim(), 0);
        let s = span(3, 3, &[vec![1, 0, 0], vec![1, 1, 0]]).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.basis(), &[vec![1, 0, 0], vec![0, 1, 0]]);
        let s = span(5, 2, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(s.dim(), 1);
    }

    #[test]
    fn orthogonality() {
        let w = span(5, 2, &[vec![1, 0]]).unwrap();
        assert!(w.is_orthogonal(&[0, 1]).unwrap());
        let w = span(2, 2, &[vec![1, 1]]).unwrap();
        assert!(w.is_orthogonal(&[1, 1]).unwrap()); // 1+1 = 0 in F_2
        let zero = Subspace::zero(7, 3);
        assert!(zero.is_orthogonal(&[1, 2, 3]).unwrap());
        assert!(zero.is_orthogonal(&[0, 0, 0]).is_err());
    }

    #[test]
    fn hyperplanes() {
        let h = hyperplane_of(3, &[1, 0]).unwrap();
        assert_eq!(h.basis(), &[vec![0, 1]]);
        let h = hyperplane_of(2, &[1, 1, 1]).unwrap();
        assert_eq!(h.dim(), 2);
        for v in h.all_vectors() {
            assert_eq!(v.iter().sum::<u64>() % 2, 0);
        }
        // scalar multiples give the same hyperplane
        let h1 = hyperplane_of(7, &[1, 2, 3]).unwrap();
        let h2 = hyperplane_of(7, &[2, 4, 6]).unwrap();
        assert_eq!(h1, h2);
    }

    #[test]
    fn hyperplane_membership_matches_orthogonality() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let q = *[2u64, 3, 5].iter().nth(rng.random_range(0..3)).unwrap();
            let d = rng.random_range(2..=4);
            let z: Vec<u64> = loop {
                let v: Vec<u64> = (0..d).map(|_| rng.random_range(0..q)).collect();
                if v.iter().any(|&x| x != 0) {
                    break v;
                }
            };
            let nvecs = rng.random_range(0..=2);
            let vecs: Vec<Vec<u64>> = (0..nvecs)
                .map(|_| (0..d).map(|_| rng.random_range(0..q)).collect())
                .collect();
            let w = span(q, d, &vecs).unwrap();
            let h = hyperplane_of(q, &z).unwrap();
            assert_eq!(h.contains(&w), w.is_orthogonal(&z).unwrap());
            // orthogonality depends only on the projective point of z
            let c = rng.random_range(1..q);
            let cz: Vec<u64> = z.iter().map(|&x| x * c % q).collect();
            assert_eq!(w.is_orthogonal(&z).unwrap(), w.is_orthogonal(&cz).unwrap());
        }
    }

    #[test]
    fn duality_and_canonicality() {
        let pts = enumerate_points(3, 3).unwrap();
        let mut hyps: Vec<Subspace> = pts.iter().map(|p| hyperplane_of(3, &p.rep).unwrap()).collect();
        hyps.sort();
        hyps.dedup();
        assert_eq!(hyps.len(), pts.len());
        // canonicality: span of the basis reproduces the subspace
        for h in &hyps {
            let again = span(3, 3, &h.basis().to_vec()).unwrap();
            assert_eq!(&again, h);
        }
    }

    #[test]
    fn subspace_enumeration() {
        // lines of F_3^3 within the full space: (27-1)/2 points, lines = 13
        let full = full_space(3, 3);
        let lines = subspaces_within(&full, 2);
        assert_eq!(lines.len(), 13);
        for l in &lines {
            assert_eq!(l.dim(), 2);
        }
    }
}

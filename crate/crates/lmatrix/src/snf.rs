//! Smith normal form over Z with unimodular transforms, plus a column-style
//! Hermite form used for lattice enumeration.

use crate::error::Error;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Dense integer matrix as rows.
pub type ZMat = Vec<Vec<BigInt>>;

pub fn zmat_zero(rows: usize, cols: usize) -> ZMat {
    vec![vec![BigInt::zero(); cols]; rows]
}

pub fn zmat_identity(n: usize) -> ZMat {
    let mut m = zmat_zero(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigInt::from(1);
    }
    m
}

pub fn zmat_mul(a: &ZMat, b: &ZMat) -> ZMat {
    let rows = a.len();
    let inner = if rows > 0 { a[0].len() } else { 0 };
    let cols = if b.is_empty() { 0 } else { b[0].len() };
    let mut out = zmat_zero(rows, cols);
    for i in 0..rows {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..cols {
                let delta = &a[i][k] * &b[k][j];
                out[i][j] += delta;
            }
        }
    }
    out
}

/// Result of a Smith normal form computation: U * M * V = D with U, V
/// unimodular and D diagonal with divisibility d_1 | d_2 | ...
pub struct SmithForm {
    pub d: ZMat,
    pub u: ZMat,
    pub v: ZMat,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
}

/// Classic pivot-to-smallest-entry reduction. The returned transforms are
/// re-verified against the input (U·M·V = D) before returning.
pub fn smith_normal_form(m: &ZMat) -> Result<SmithForm, Error> {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    let mut a = m.clone();
    let mut u = zmat_identity(rows);
    let mut v = zmat_identity(cols);

    let swap_rows = |a: &mut ZMat, u: &mut ZMat, i: usize, j: usize| {
        a.swap(i, j);
        u.swap(i, j);
    };
    let swap_cols = |a: &mut ZMat, v: &mut ZMat, i: usize, j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
    };

    let mut t = 0usize;
    while t < rows.min(cols) {
        // locate smallest nonzero entry in the trailing block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j].is_zero() {
                    continue;
                }
                match &pivot {
                    None => pivot = Some((i, j)),
                    Some((pi, pj)) => {
                        if a[i][j].abs() < a[*pi][*pj].abs() {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        swap_rows(&mut a, &mut u, t, pi);
        swap_cols(&mut a, &mut v, t, pj);

        // clear row and column t by Euclidean steps
        let mut dirty = true;
        while dirty {
            dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = div_round(&a[i][t], &a[t][t]);
                if !q.is_zero() {
                    for j in 0..cols {
                        let delta = &q * &a[t][j];
                        a[i][j] -= delta;
                    }
                    for j in 0..rows {
                        let delta = &q * &u[t][j];
                        u[i][j] -= delta;
                    }
                }
                if !a[i][t].is_zero() {
                    // remainder smaller than pivot: swap up and restart
                    swap_rows(&mut a, &mut u, t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = div_round(&a[t][j], &a[t][t]);
                if !q.is_zero() {
                    for i in 0..rows {
                        let delta = &q * &a[i][t];
                        a[i][j] -= delta;
                    }
                    for i in 0..cols {
                        let delta = &q * &v[i][t];
                        v[i][j] -= delta;
                    }
                }
                if !a[t][j].is_zero() {
                    swap_cols(&mut a, &mut v, t, j);
                    dirty = true;
                }
            }
        }
        t += 1;
    }

    // normalize signs
    for i in 0..rows.min(cols) {
        if a[i][i].is_negative() {
            for j in 0..cols {
                a[i][j] = -a[i][j].clone();
            }
            for j in 0..rows {
                u[i][j] = -u[i][j].clone();
            }
        }
    }

    // enforce the divisibility chain d_i | d_{i+1}
    let diag_len = rows.min(cols);
    loop {
        let mut fixed = true;
        for i in 0..diag_len.saturating_sub(1) {
            let di = a[i][i].clone();
            let dj = a[i + 1][i + 1].clone();
            if di.is_zero() && !dj.is_zero() {
                // move nonzero up
                swap_rows(&mut a, &mut u, i, i + 1);
                swap_cols(&mut a, &mut v, i, i + 1);
                fixed = false;
                continue;
            }
            if di.is_zero() || dj.is_zero() {
                continue;
            }
            if (&dj % &di).is_zero() {
                continue;
            }
            // add column i+1 to column i, then re-reduce the 2x2 block
            for r in 0..rows {
                let delta = a[r][i + 1].clone();
                a[r][i] += delta;
            }
            for r in 0..cols {
                let delta = v[r][i + 1].clone();
                v[r][i] += delta;
            }
            // local Euclid on the 2x2 block
            loop {
                if a[i + 1][i].is_zero() {
                    break;
                }
                let q = div_round(&a[i][i], &a[i + 1][i]);
                for j in 0..cols {
                    let delta = &q * &a[i + 1][j];
                    a[i][j] -= delta;
                }
                for j in 0..rows {
                    let delta = &q * &u[i + 1][j];
                    u[i][j] -= delta;
                }
                swap_rows(&mut a, &mut u, i, i + 1);
            }
            // clear the (i, i+1) entry
            loop {
                if a[i][i + 1].is_zero() {
                    break;
                }
                let q = div_round(&a[i][i + 1], &a[i][i]);
                if !q.is_zero() {
                    for r in 0..rows {
                        let delta = &q * &a[r][i];
                        a[r][i + 1] -= delta;
                    }
                    for r in 0..cols {
                        let delta = &q * &v[r][i];
                        v[r][i + 1] -= delta;
                    }
                }
                if !a[i][i + 1].is_zero() {
                    swap_cols(&mut a, &mut v, i, i + 1);
                }
            }
            if a[i][i].is_negative() {
                for j in 0..cols {
                    a[i][j] = -a[i][j].clone();
                }
                for j in 0..rows {
                    u[i][j] = -u[i][j].clone();
                }
            }
            if a[i + 1][i + 1].is_negative() {
                for j in 0..cols {
                    a[i + 1][j] = -a[i + 1][j].clone();
                }
                for j in 0..rows {
                    u[i + 1][j] = -u[i + 1][j].clone();
                }
            }
            fixed = false;
        }
        if fixed {
            break;
        }
    }

    let rank = (0..diag_len).take_while(|&i| !a[i][i].is_zero()).count();

    // full verification U * M * V = D
    let check = zmat_mul(&zmat_mul(&u, m), &v);
    if check != a {
        return Err(Error::Invariant("smith form verification U*M*V = D failed".into()));
    }
    for i in 0..rows {
        for j in 0..cols {
            if i != j && !a[i][j].is_zero() {
                return Err(Error::Invariant("smith form not diagonal".into()));
            }
        }
    }

    Ok(SmithForm { d: a, u, v, rank })
}

/// Rounded division used by the Euclidean steps (quotient minimizing |rem|).
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let q = a / b;
    let r = a - &q * b;
    if r.is_zero() {
        return q;
    }
    let two_r = BigInt::from(2) * r.abs();
    if two_r > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Basis of the integer kernel lattice {x in Z^cols : M x = 0}, saturated
/// (i.e. all integer solutions, not just a finite-index sublattice).
pub fn kernel_lattice(m: &ZMat) -> Result<Vec<Vec<BigInt>>, Error> {
    let cols = if m.is_empty() { 0 } else { m[0].len() };
    if cols == 0 {
        return Ok(vec![]);
    }
    if m.is_empty() {
        return Ok((0..cols)
            .map(|i| {
                let mut v = vec![BigInt::zero(); cols];
                v[i] = BigInt::from(1);
                v
            })
            .collect());
    }
    let snf = smith_normal_form(m)?;
    let mut basis = Vec::new();
    for j in snf.rank..cols {
        let col: Vec<BigInt> = (0..cols).map(|i| snf.v[i][j].clone()).collect();
        basis.push(col);
    }
    Ok(basis)
}

/// Outcome of an integral linear solve M z = b.
pub enum ZSolve {
    /// An integer solution.
    Solution(Vec<BigInt>),
    /// A certifying rational row w: wᵀM integral but wᵀb not an integer,
    /// stored as (numerators, denominator).
    Certificate { numer: Vec<BigInt>, denom: BigInt },
}

/// Solve M z = b over the integers, or produce the impossibility certificate.
pub fn solve_integer(m: &ZMat, b: &[BigInt]) -> Result<ZSolve, Error> {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    if b.len() != rows {
        return Err(Error::DimensionMismatch { expected: rows, got: b.len() });
    }
    let snf = smith_normal_form(m)?;
    // D y = U b, z = V y
    let ub: Vec<BigInt> = (0..rows)
        .map(|i| (0..rows).map(|j| &snf.u[i][j] * &b[j]).sum())
        .collect();
    let mut y = vec![BigInt::zero(); cols];
    for i in 0..rows {
        let di = if i < cols { snf.d[i][i].clone() } else { BigInt::zero() };
        if di.is_zero() {
            if !ub[i].is_zero() {
                // zero row with nonzero rhs: scale row i of U so wᵀb = 1/2
                let denom = BigInt::from(2) * &ub[i];
                let numer: Vec<BigInt> = snf.u[i].clone();
                return Ok(ZSolve::Certificate { numer, denom });
            }
        } else {
            if (&ub[i] % &di).is_zero() {
                y[i] = &ub[i] / &di;
            } else {
                // w = (row i of U) / d_i
                return Ok(ZSolve::Certificate { numer: snf.u[i].clone(), denom: di });
            }
        }
    }
    let z: Vec<BigInt> = (0..cols)
        .map(|i| (0..cols).map(|j| &snf.v[i][j] * &y[j]).sum())
        .collect();
    Ok(ZSolve::Solution(z))
}

/// Column-style Hermite form of a lattice basis (vectors as columns of the
/// returned matrix): unimodular column operations produce an echelon shape
/// whose pivot rows increase strictly. Used for exact coset enumeration.
pub fn column_echelon_lattice(basis: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if basis.is_empty() {
        return vec![];
    }
    let dim = basis[0].len();
    // columns
    let mut cols: Vec<Vec<BigInt>> = basis.to_vec();
    let ncols = cols.len();
    let mut col_start = 0usize;
    for row in 0..dim {
        if col_start >= ncols {
            break;
        }
        // gcd-reduce entries of this row across columns col_start..
        loop {
            let mut best: Option<usize> = None;
            for c in col_start..ncols {
                if cols[c][row].is_zero() {
                    continue;
                }
                match best {
                    None => best = Some(c),
                    Some(bc) => {
                        if cols[c][row].abs() < cols[bc][row].abs() {
                            best = Some(c);
                        }
                    }
                }
            }
            let Some(bc) = best else { break };
            cols.swap(col_start, bc);
            let mut any = false;
            for c in col_start + 1..ncols {
                if cols[c][row].is_zero() {
                    continue;
                }
                let q = div_round(&cols[c][row], &cols[col_start][row]);
                if !q.is_zero() {
                    for r in 0..dim {
                        let delta = &q * &cols[col_start][r];
                        cols[c][r] -= delta;
                    }
                }
                if !cols[c][row].is_zero() {
                    any = true;
                }
            }
            if !any {
                break;
            }
        }
        if !cols[col_start][row].is_zero() {
            if cols[col_start][row].is_negative() {
                for r in 0..dim {
                    cols[col_start][r] = -cols[col_start][r].clone();
                }
            }
            col_start += 1;
        }
    }
    cols.truncate(col_start);
    cols
}

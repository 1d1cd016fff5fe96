//! Univariate polynomial helpers over Q and Z.

use crate::error::Error;
use crate::parse;
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Dense univariate polynomial over Q, constant coefficient first.
/// The coefficient vector never ends in zeros (zero polynomial = empty vec).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        QPoly::new(vec![BigRational::one()])
    }

    pub fn constant(c: BigRational) -> Self {
        QPoly::new(vec![c])
    }

    pub fn x() -> Self {
        QPoly::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        QPoly::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn parse(input: &str) -> Result<Self, Error> {
        Ok(QPoly::new(parse::parse_univariate(input)?))
    }

    pub fn render(&self, var: &str) -> String {
        parse::render_univariate(&self.coeffs, var)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; 0 for the zero polynomial by convention.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom().is_one())
    }

    pub fn to_integer_coeffs(&self) -> Option<Vec<BigInt>> {
        if !self.has_integer_coeffs() {
            return None;
        }
        Some(self.coeffs.iter().map(|c| c.numer().clone()).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        QPoly::new(out)
    }

    pub fn neg(&self) -> Self {
        QPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        QPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        let lead = divisor.leading();
        if rem.len() <= dd && !(rem.len() == dd + 1) {
            // degree(self) < degree(divisor)
        }
        let mut quo = vec![BigRational::zero(); rem.len().saturating_sub(dd)];
        while rem.len() > dd || (dd == 0 && !rem.is_empty()) {
            let k = rem.len() - 1;
            if k < dd {
                break;
            }
            let factor = rem[k].clone() / lead.clone();
            if !factor.is_zero() {
                quo[k - dd] = factor.clone();
                for (i, c) in divisor.coeffs.iter().enumerate() {
                    let idx = k - dd + i;
                    let delta = c * &factor;
                    rem[idx] -= delta;
                }
            }
            rem.pop();
            if dd == 0 && rem.is_empty() {
                break;
            }
        }
        (QPoly::new(quo), QPoly::new(rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// Monic multiple of self (zero stays zero).
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return QPoly::zero();
        }
        let inv = BigRational::one() / self.leading();
        self.scale(&inv)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Compose with an affine argument: returns self(a + b·x).
    pub fn compose_affine(&self, a: &BigRational, b: &BigRational) -> Self {
        let mut acc = QPoly::zero();
        let arg = QPoly::new(vec![a.clone(), b.clone()]);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&arg).add(&QPoly::constant(c.clone()));
        }
        acc
    }

    /// Coefficient reversal x^deg · self(1/x).
    pub fn reverse(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        QPoly::new(coeffs)
    }

    /// Extended gcd: returns (g, u, v) with u·self + v·other = g, g monic
    /// (or zero when both inputs are zero).
    pub fn xgcd(&self, other: &Self) -> (Self, Self, Self) {
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut s0 = QPoly::one();
        let mut s1 = QPoly::zero();
        let mut t0 = QPoly::zero();
        let mut t1 = QPoly::one();
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (QPoly::zero(), QPoly::zero(), QPoly::zero());
        }
        let lead = r0.leading();
        let inv = BigRational::one() / lead;
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }
}

// ---------------------------------------------------------------------------
// Integer (monic) polynomial utilities: primality and irreducibility checks.
// ---------------------------------------------------------------------------

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime_above(n: u64) -> u64 {
    let mut c = n + 1;
    loop {
        if is_prime_u64(c) {
            return c;
        }
        c += 1;
    }
}

fn pollard_rho(n: u64) -> u64 {
    // Brent's variant; n must be composite and odd.
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// Factorization of a u64 into prime powers.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13] {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            match out.iter_mut().find(|(p, _)| *p == m) {
                Some((_, e)) => *e += 1,
                None => out.push((m, 1)),
            }
            continue;
        }
        let d = pollard_rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    out.sort();
    out
}

/// All divisors of n (positive), unsorted size can be large only for very
/// composite n; fine at desk scale.
pub fn divisors_u64(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factor_u64(n) {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = 1u64;
            for _ in 0..=e {
                next.push(d * pk);
                pk = pk.saturating_mul(p);
            }
        }
        divs = next;
    }
    divs.sort();
    divs.dedup();
    divs
}

/// Outcome of the irreducibility check for a monic integer polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Irreducibility {
    /// Verified irreducible over Q (degree <= 4, or degree 1).
    Verified,
    /// Accepted without verification (degree > 4 or constant term too large
    /// to factor); callers should surface a warning.
    Unverified,
}

/// Check irreducibility over Q of a monic integer polynomial, machine-checked
/// through degree 4 (rational-root search plus monic quadratic-factor search).
/// Returns the found factor string on reducibility.
pub fn check_irreducible_monic(coeffs: &[BigInt]) -> Result<Irreducibility, Error> {
    let deg = coeffs.len() - 1;
    assert!(coeffs[deg].is_one(), "caller must pass a monic polynomial");
    if deg == 0 {
        return Err(Error::Invalid("constant modulus".into()));
    }
    if deg == 1 {
        return Ok(Irreducibility::Verified);
    }
    if deg > 4 {
        return Ok(Irreducibility::Unverified);
    }
    let c0 = &coeffs[0];
    if c0.is_zero() {
        return Err(Error::ReducibleModulus { factor: "x".into() });
    }
    // Integer roots of a monic integer polynomial divide the constant term.
    let c0_abs = c0.abs();
    let c0_u64: Option<u64> = c0_abs.try_into().ok();
    let Some(c0_u64) = c0_u64 else {
        return Ok(Irreducibility::Unverified);
    };
    let eval = |x: &BigInt| -> BigInt {
        let mut acc = BigInt::zero();
        for c in coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    for d in divisors_u64(c0_u64) {
        for sgn in [1i64, -1] {
            let cand = BigInt::from(d) * BigInt::from(sgn);
            if eval(&cand).is_zero() {
                let factor = if sgn >= 0 && d == 0 {
                    "x".to_string()
                } else {
                    let neg = -cand;
                    let rendered = parse::render_univariate(
                        &[
                            BigRational::from_integer(neg),
                            BigRational::one(),
                        ],
                        "x",
                    );
                    rendered
                };
                return Err(Error::ReducibleModulus { factor });
            }
        }
    }
    if deg <= 3 {
        return Ok(Irreducibility::Verified);
    }
    // Degree 4: search for a monic quadratic factor (x^2+ax+b)(x^2+cx+d).
    let e3 = &coeffs[3];
    let e2 = &coeffs[2];
    let e1 = &coeffs[1];
    let e0 = &coeffs[0];
    for b_abs in divisors_u64(c0_u64) {
        for sgn in [1i64, -1] {
            let b = BigInt::from(b_abs) * BigInt::from(sgn);
            if b.is_zero() {
                continue;
            }
            let d = e0 / &b;
            if &(&d * &b) != e0 {
                continue;
            }
            // a + c = e3, a*c = e2 - b - d, a*d + b*c = e1
            let sum = e3.clone();
            let prod = e2 - &b - &d;
            let disc = &sum * &sum - BigInt::from(4) * &prod;
            if disc.sign() == Sign::Minus {
                continue;
            }
            let root = disc.sqrt();
            if &root * &root != disc {
                continue;
            }
            for r in [root.clone(), -root] {
                let two = BigInt::from(2);
                let a_num = &sum + &r;
                if (&a_num % &two).is_zero() {
                    let a = a_num / &two;
                    let c = &sum - &a;
                    if &a * &d + &b * &c == *e1 {
                        let factor = parse::render_univariate(
                            &[
                                BigRational::from_integer(b.clone()),
                                BigRational::from_integer(a.clone()),
                                BigRational::one(),
                            ],
                            "x",
                        );
                        return Err(Error::ReducibleModulus { factor });
                    }
                }
            }
        }
    }
    Ok(Irreducibility::Verified)
}

//! Exact field contexts: Q, prime fields F_p, and simple number fields
//! Q[x]/(f) for a monic integral irreducible f.
//!
//! All element arithmetic goes through a [`FieldCtx`], which owns the field
//! description. Elements are kept in canonical form so structural equality is
//! field equality: rationals are gcd-reduced, prime-field residues lie in
//! [0, p), number-field elements are coefficient vectors of length deg(f)
//! in the power basis of the generator.

use crate::error::Error;
use crate::parse;
use crate::qpoly::{check_irreducible_monic, is_prime_u64, Irreducibility, QPoly};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

/// Which field a context describes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldKind {
    Rational,
    Prime(u64),
    /// Monic integral modulus, constant coefficient first, leading 1 included.
    NumberField { modulus: Vec<BigInt> },
}

/// A computation context for one exact field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldCtx {
    kind: FieldKind,
    /// False when a number-field modulus of degree > 4 was accepted without
    /// an irreducibility proof.
    irreducibility_verified: bool,
}

/// An element of some [`FieldCtx`]. Meaning depends on the context kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Element {
    Rat(BigRational),
    Fp(u64),
    /// Power-basis coordinates, length = degree of the field modulus.
    Nf(Vec<BigRational>),
}

impl FieldCtx {
    pub fn rational() -> Self {
        FieldCtx {
            kind: FieldKind::Rational,
            irreducibility_verified: true,
        }
    }

    pub fn prime(p: u64) -> Result<Self, Error> {
        if !is_prime_u64(p) {
            return Err(Error::CompositeModulus(p));
        }
        Ok(FieldCtx {
            kind: FieldKind::Prime(p),
            irreducibility_verified: true,
        })
    }

    /// Build Q[x]/(f) for a monic integral f. Irreducibility over Q is
    /// machine-checked through degree 4; higher degrees are accepted with
    /// `irreducibility_verified() == false`.
    pub fn number_field(modulus: &QPoly) -> Result<Self, Error> {
        if modulus.is_zero() || modulus.degree() == 0 {
            return Err(Error::Invalid("modulus must be non-constant".into()));
        }
        if !modulus.is_monic() {
            return Err(Error::NonMonicModulus);
        }
        let coeffs = modulus.to_integer_coeffs().ok_or(Error::NonMonicModulus)?;
        let verified = match check_irreducible_monic(&coeffs)? {
            Irreducibility::Verified => true,
            Irreducibility::Unverified => false,
        };
        Ok(FieldCtx {
            kind: FieldKind::NumberField { modulus: coeffs },
            irreducibility_verified: verified,
        })
    }

    pub fn number_field_from_str(s: &str) -> Result<Self, Error> {
        FieldCtx::number_field(&QPoly::parse(s)?)
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn characteristic(&self) -> u64 {
        match self.kind {
            FieldKind::Prime(p) => p,
            _ => 0,
        }
    }

    pub fn irreducibility_verified(&self) -> bool {
        self.irreducibility_verified
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.kind, FieldKind::Rational)
    }

    pub fn is_prime_field(&self) -> bool {
        matches!(self.kind, FieldKind::Prime(_))
    }

    pub fn is_number_field(&self) -> bool {
        matches!(self.kind, FieldKind::NumberField { .. })
    }

    /// Degree of the field as a Q-vector space (1 for Q; p-fields report 1).
    pub fn degree(&self) -> usize {
        match &self.kind {
            FieldKind::NumberField { modulus } => modulus.len() - 1,
            _ => 1,
        }
    }

    /// The modulus polynomial of a number field.
    pub fn modulus(&self) -> Option<QPoly> {
        match &self.kind {
            FieldKind::NumberField { modulus } => Some(QPoly::new(
                modulus.iter().map(|c| BigRational::from_integer(c.clone())).collect(),
            )),
            _ => None,
        }
    }

    // ---- element constructors -------------------------------------------

    pub fn zero(&self) -> Element {
        match &self.kind {
            FieldKind::Rational => Element::Rat(BigRational::zero()),
            FieldKind::Prime(_) => Element::Fp(0),
            FieldKind::NumberField { modulus } => {
                Element::Nf(vec![BigRational::zero(); modulus.len() - 1])
            }
        }
    }

    pub fn one(&self) -> Element {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Element {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Element {
        match &self.kind {
            FieldKind::Rational => Element::Rat(BigRational::from_integer(n.clone())),
            FieldKind::Prime(p) => {
                let p_big = BigInt::from(*p);
                let mut r = n % &p_big;
                if r.is_negative() {
                    r += &p_big;
                }
                Element::Fp(r.to_u64().expect("residue fits"))
            }
            FieldKind::NumberField { modulus } => {
                let mut v = vec![BigRational::zero(); modulus.len() - 1];
                v[0] = BigRational::from_integer(n.clone());
                Element::Nf(v)
            }
        }
    }

    /// Map a rational into the field. Fails for F_p when the denominator is
    /// divisible by p.
    pub fn from_rational(&self, r: &BigRational) -> Result<Element, Error> {
        match &self.kind {
            FieldKind::Rational => Ok(Element::Rat(r.clone())),
            FieldKind::Prime(_) => {
                let num = self.from_bigint(r.numer());
                let den = self.from_bigint(r.denom());
                self.div(&num, &den)
            }
            FieldKind::NumberField { modulus } => {
                let mut v = vec![BigRational::zero(); modulus.len() - 1];
                v[0] = r.clone();
                Ok(Element::Nf(v))
            }
        }
    }

    /// The generator x of a number field (the class of x mod f).
    pub fn generator(&self) -> Result<Element, Error> {
        match &self.kind {
            FieldKind::NumberField { modulus } => {
                let deg = modulus.len() - 1;
                if deg == 1 {
                    // Q[x]/(x - a) ~ Q; the generator is the constant a.
                    return Ok(Element::Nf(vec![BigRational::from_integer(-modulus[0].clone())]));
                }
                let mut v = vec![BigRational::zero(); deg];
                v[1] = BigRational::one();
                Ok(Element::Nf(v))
            }
            _ => Err(Error::Invalid("generator only exists in a number field".into())),
        }
    }

    /// Check that an element structurally belongs to this context.
    pub fn validate(&self, e: &Element) -> Result<(), Error> {
        match (&self.kind, e) {
            (FieldKind::Rational, Element::Rat(_)) => Ok(()),
            (FieldKind::Prime(p), Element::Fp(v)) if v < p => Ok(()),
            (FieldKind::NumberField { modulus }, Element::Nf(v))
                if v.len() == modulus.len() - 1 =>
            {
                Ok(())
            }
            _ => Err(Error::CtxMismatch),
        }
    }

    // ---- arithmetic -------------------------------------------------------

    pub fn is_zero(&self, e: &Element) -> bool {
        match e {
            Element::Rat(r) => r.is_zero(),
            Element::Fp(v) => *v == 0,
            Element::Nf(v) => v.iter().all(|c| c.is_zero()),
        }
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        match (a, b) {
            (Element::Rat(x), Element::Rat(y)) => Element::Rat(x + y),
            (Element::Fp(x), Element::Fp(y)) => {
                let p = self.characteristic();
                Element::Fp((x + y) % p)
            }
            (Element::Nf(x), Element::Nf(y)) => {
                Element::Nf(x.iter().zip(y).map(|(u, v)| u + v).collect())
            }
            _ => panic!("mixed element kinds"),
        }
    }

    pub fn neg(&self, a: &Element) -> Element {
        match a {
            Element::Rat(x) => Element::Rat(-x),
            Element::Fp(x) => {
                let p = self.characteristic();
                Element::Fp(if *x == 0 { 0 } else { p - x })
            }
            Element::Nf(x) => Element::Nf(x.iter().map(|c| -c).collect()),
        }
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Element {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        match (a, b) {
            (Element::Rat(x), Element::Rat(y)) => Element::Rat(x * y),
            (Element::Fp(x), Element::Fp(y)) => {
                let p = self.characteristic();
                Element::Fp(((*x as u128 * *y as u128) % p as u128) as u64)
            }
            (Element::Nf(x), Element::Nf(y)) => Element::Nf(self.nf_mul(x, y)),
            _ => panic!("mixed element kinds"),
        }
    }

    fn nf_modulus_rational(&self) -> Vec<BigRational> {
        match &self.kind {
            FieldKind::NumberField { modulus } => modulus
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
            _ => unreachable!(),
        }
    }

    fn nf_mul(&self, x: &[BigRational], y: &[BigRational]) -> Vec<BigRational> {
        let m = x.len();
        let mut prod = vec![BigRational::zero(); 2 * m - 1];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                prod[i + j] += a * b;
            }
        }
        self.nf_reduce(prod)
    }

    /// Reduce a coefficient vector modulo the (monic) field modulus.
    fn nf_reduce(&self, mut v: Vec<BigRational>) -> Vec<BigRational> {
        let f = self.nf_modulus_rational();
        let m = f.len() - 1;
        while v.len() > m {
            let k = v.len() - 1;
            let lead = v.pop().unwrap();
            if lead.is_zero() {
                continue;
            }
            // subtract lead * x^(k-m) * f  (leading term cancels by monicity)
            for i in 0..m {
                let idx = k - m + i;
                let delta = &f[i] * &lead;
                v[idx] -= delta;
            }
        }
        v.resize(m, BigRational::zero());
        v
    }

    pub fn inv(&self, a: &Element) -> Result<Element, Error> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        match a {
            Element::Rat(x) => Ok(Element::Rat(x.recip())),
            Element::Fp(x) => {
                let p = self.characteristic();
                // Fermat inverse; p prime.
                let mut acc = 1u64;
                let mut base = *x % p;
                let mut e = p - 2;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = ((acc as u128 * base as u128) % p as u128) as u64;
                    }
                    base = ((base as u128 * base as u128) % p as u128) as u64;
                    e >>= 1;
                }
                Ok(Element::Fp(acc))
            }
            Element::Nf(x) => {
                let f = QPoly::new(self.nf_modulus_rational());
                let a_poly = QPoly::new(x.clone());
                let (g, u, _) = a_poly.xgcd(&f);
                if g != QPoly::one() {
                    // impossible for an irreducible modulus and nonzero a
                    return Err(Error::Invariant(format!(
                        "gcd with modulus not 1 (modulus reducible?): gcd = {}",
                        g.render("x")
                    )));
                }
                let red = u.rem(&f);
                let mut v = red.coeffs().to_vec();
                v.resize(self.degree(), BigRational::zero());
                Ok(Element::Nf(v))
            }
        }
    }

    pub fn div(&self, a: &Element, b: &Element) -> Result<Element, Error> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Element, e: u64) -> Element {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Sum of a slice of elements.
    pub fn sum<'a, I: IntoIterator<Item = &'a Element>>(&self, items: I) -> Element {
        let mut acc = self.zero();
        for e in items {
            acc = self.add(&acc, e);
        }
        acc
    }

    /// a * n for an integer n.
    pub fn mul_int(&self, a: &Element, n: &BigInt) -> Element {
        self.mul(a, &self.from_bigint(n))
    }

    // ---- parsing / printing ----------------------------------------------

    /// Parse an element in the canonical string syntax: `a/b` for rationals,
    /// decimal residues for F_p, polynomials in `t` for number fields.
    pub fn parse_element(&self, s: &str) -> Result<Element, Error> {
        match &self.kind {
            FieldKind::Rational => {
                let coeffs = parse::parse_univariate(s)?;
                if coeffs.len() > 1 {
                    return Err(Error::Parse(format!("expected a rational, got `{s}`")));
                }
                Ok(Element::Rat(coeffs.first().cloned().unwrap_or_else(BigRational::zero)))
            }
            FieldKind::Prime(_) => {
                let coeffs = parse::parse_univariate(s)?;
                if coeffs.len() > 1 {
                    return Err(Error::Parse(format!("expected a residue, got `{s}`")));
                }
                let r = coeffs.first().cloned().unwrap_or_else(BigRational::zero);
                self.from_rational(&r)
            }
            FieldKind::NumberField { modulus } => {
                let coeffs = parse::parse_univariate(s)?;
                if coeffs.len() > modulus.len() - 1 {
                    // reduce higher powers of t
                    let red = self.nf_reduce(coeffs);
                    return Ok(Element::Nf(red));
                }
                let mut v = coeffs;
                v.resize(modulus.len() - 1, BigRational::zero());
                Ok(Element::Nf(v))
            }
        }
    }

    pub fn render_element(&self, e: &Element) -> String {
        match e {
            Element::Rat(r) => parse::render_rational(r),
            Element::Fp(v) => v.to_string(),
            Element::Nf(v) => parse::render_univariate(v, "t"),
        }
    }

    /// Pseudo-random small elements for axiom spot-checks and fuzz tests.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Element {
        match &self.kind {
            FieldKind::Rational => {
                let n = rng.random_range(-20i64..=20);
                let d = rng.random_range(1i64..=9);
                Element::Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
            }
            FieldKind::Prime(p) => Element::Fp(rng.random_range(0..*p)),
            FieldKind::NumberField { modulus } => {
                let m = modulus.len() - 1;
                Element::Nf(
                    (0..m)
                        .map(|_| BigRational::from_integer(BigInt::from(rng.random_range(-9i64..=9))))
                        .collect(),
                )
            }
        }
    }

    /// Spot-check field axioms (associativity, distributivity, inverses) on
    /// sampled triples. Used by tests and on-demand by callers.
    pub fn verify_axioms(&self, seed: u64, trials: usize) -> Result<(), Error> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let a = self.sample(&mut rng);
            let b = self.sample(&mut rng);
            let c = self.sample(&mut rng);
            let assoc_add =
                self.add(&self.add(&a, &b), &c) == self.add(&a, &self.add(&b, &c));
            let assoc_mul =
                self.mul(&self.mul(&a, &b), &c) == self.mul(&a, &self.mul(&b, &c));
            let distr = self.mul(&a, &self.add(&b, &c))
                == self.add(&self.mul(&a, &b), &self.mul(&a, &c));
            if !(assoc_add && assoc_mul && distr) {
                return Err(Error::Invariant("field axiom failed on sample".into()));
            }
            if !self.is_zero(&a) {
                let inv = self.inv(&a)?;
                if self.mul(&a, &inv) != self.one() {
                    return Err(Error::Invariant("inverse axiom failed on sample".into()));
                }
            }
        }
        Ok(())
    }

    /// Coordinates of an element over Q in the power basis (length = degree).
    /// Prime-field elements coordinatize as their integer lift.
    pub fn coordinates(&self, e: &Element) -> Vec<BigRational> {
        match e {
            Element::Rat(r) => vec![r.clone()],
            Element::Fp(v) => vec![BigRational::from_integer(BigInt::from(*v))],
            Element::Nf(v) => v.clone(),
        }
    }
}

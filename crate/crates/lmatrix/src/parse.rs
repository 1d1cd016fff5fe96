//! Tiny polynomial string parser.
//!
//! Accepted syntax: integer (or `a/b`) coefficients, variables `x`, `t`, or
//! `x1`..`xk`, `^` for powers, `*` for products, `+`/`-` between terms.
//! Examples: `x^2-2`, `2*x1^2-x2^2`, `1/2*t+3`.

use crate::error::Error;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(BigInt),
    Var(usize), // 1-based variable index
    Pow,
    Mul,
    Div,
    Plus,
    Minus,
}

fn tokenize(input: &str) -> Result<Vec<Token>, Error> {
    let mut out = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' | '−' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Mul);
                i += 1;
            }
            '/' => {
                out.push(Token::Div);
                i += 1;
            }
            '^' => {
                out.push(Token::Pow);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad number `{s}`")))?;
                out.push(Token::Num(n));
            }
            'x' | 't' => {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let idx = if s.len() == 1 {
                    1
                } else {
                    let n: usize = s[1..]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad variable `{s}`")))?;
                    if n == 0 {
                        return Err(Error::Parse(format!("variable index 0 in `{s}`")));
                    }
                    n
                };
                if c == 't' && s.len() > 1 {
                    return Err(Error::Parse(format!("unexpected variable `{s}`")));
                }
                out.push(Token::Var(idx));
            }
            _ => return Err(Error::Parse(format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

/// Parse a polynomial into a map from exponent vectors (length = number of
/// variables, inferred from the highest index seen) to rational coefficients.
/// Returns `(k, terms)`. Zero coefficients are dropped.
pub fn parse_poly(input: &str) -> Result<(usize, BTreeMap<Vec<u32>, BigRational>), Error> {
    let tokens = tokenize(input)?;
    if tokens.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    // Split into terms & collect raw (coefficient, exponent-map) pairs.
    let mut k = 0usize;
    let mut raw: Vec<(BigRational, BTreeMap<usize, u32>)> = Vec::new();
    let mut pos = 0usize;
    let mut sign = BigInt::one();
    // optional leading sign
    loop {
        match tokens.get(pos) {
            Some(Token::Plus) => pos += 1,
            Some(Token::Minus) => {
                sign = -sign;
                pos += 1;
            }
            _ => break,
        }
    }
    loop {
        // parse one term: factor ('*' factor)*
        let mut coeff = BigRational::from_integer(sign.clone());
        let mut exps: BTreeMap<usize, u32> = BTreeMap::new();
        let mut expect_factor = true;
        loop {
            match tokens.get(pos) {
                Some(Token::Num(n)) if expect_factor => {
                    pos += 1;
                    let mut val = BigRational::from_integer(n.clone());
                    if let Some(Token::Div) = tokens.get(pos) {
                        pos += 1;
                        match tokens.get(pos) {
                            Some(Token::Num(d)) if !d.is_zero() => {
                                val /= BigRational::from_integer(d.clone());
                                pos += 1;
                            }
                            _ => return Err(Error::Parse("bad denominator".into())),
                        }
                    }
                    coeff *= val;
                    expect_factor = false;
                }
                Some(Token::Var(idx)) if expect_factor => {
                    pos += 1;
                    let mut e: u32 = 1;
                    if let Some(Token::Pow) = tokens.get(pos) {
                        pos += 1;
                        match tokens.get(pos) {
                            Some(Token::Num(n)) => {
                                e = n
                                    .try_into()
                                    .map_err(|_| Error::Parse("exponent too large".into()))?;
                                pos += 1;
                            }
                            _ => return Err(Error::Parse("missing exponent".into())),
                        }
                    }
                    *exps.entry(*idx).or_insert(0) += e;
                    k = k.max(*idx);
                    expect_factor = false;
                }
                Some(Token::Mul) if !expect_factor => {
                    pos += 1;
                    expect_factor = true;
                }
                _ => break,
            }
        }
        if expect_factor {
            return Err(Error::Parse("dangling operator".into()));
        }
        raw.push((coeff, exps));
        // term separator
        match tokens.get(pos) {
            None => break,
            Some(Token::Plus) => {
                sign = BigInt::one();
                pos += 1;
            }
            Some(Token::Minus) => {
                sign = -BigInt::one();
                pos += 1;
            }
            Some(t) => return Err(Error::Parse(format!("unexpected token {t:?}"))),
        }
    }
    let k = k.max(1);
    let mut terms: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
    for (coeff, exps) in raw {
        let mut e = vec![0u32; k];
        for (idx, p) in exps {
            e[idx - 1] = p;
        }
        let entry = terms.entry(e).or_insert_with(BigRational::zero);
        *entry += coeff;
    }
    terms.retain(|_, c| !c.is_zero());
    Ok((k, terms))
}

/// Parse a univariate polynomial (variable `x` or `t`) into dense rational
/// coefficients, constant term first.
pub fn parse_univariate(input: &str) -> Result<Vec<BigRational>, Error> {
    let (k, terms) = parse_poly(input)?;
    if k > 1 {
        return Err(Error::Parse(format!(
            "expected univariate polynomial, found {k} variables in `{input}`"
        )));
    }
    let deg = terms.keys().map(|e| e[0]).max().unwrap_or(0) as usize;
    let mut coeffs = vec![BigRational::zero(); deg + 1];
    for (e, c) in terms {
        coeffs[e[0] as usize] = c;
    }
    Ok(coeffs)
}

/// Render a rational in the canonical `a` / `a/b` form.
pub fn render_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Render a univariate polynomial over Q with the given variable name,
/// highest degree first. The zero polynomial renders as `0`.
pub fn render_univariate(coeffs: &[BigRational], var: &str) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let abs = c.abs();
        let body = if i == 0 {
            render_rational(&abs)
        } else {
            let pow = if i == 1 {
                var.to_string()
            } else {
                format!("{var}^{i}")
            };
            if abs.is_one() {
                pow
            } else {
                format!("{}*{}", render_rational(&abs), pow)
            }
        };
        if parts.is_empty() {
            if c < &BigRational::zero() {
                parts.push(format!("-{body}"));
            } else {
                parts.push(body);
            }
        } else if c < &BigRational::zero() {
            parts.push(format!("-{body}"));
        } else {
            parts.push(format!("+{body}"));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.concat()
    }
}

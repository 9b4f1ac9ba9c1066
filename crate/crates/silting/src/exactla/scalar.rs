//! Exact field scalars: arbitrary-precision rationals or a prime field.
//!
//! A session fixes one [`Field`] up front; every scalar carries enough
//! information to detect accidental mixing, which is always a programming
//! error and panics rather than silently coercing.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;

use crate::error::{Error, Result};

/// The base field of a session: exact rationals or integers mod a prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Field {
    Rational,
    /// Prime field with `p` prime, `p <= 2^31`.
    Prime(u64),
}

impl Field {
    /// Validates and constructs a prime field.
    pub fn prime(p: u64) -> Result<Field> {
        if !(2..=(1 << 31)).contains(&p) {
            return Err(Error::input(format!("field characteristic {p} out of range")));
        }
        if !is_prime(p) {
            return Err(Error::input(format!("{p} is not prime")));
        }
        Ok(Field::Prime(p))
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Rational => Scalar::Q(BigRational::zero()),
            Field::Prime(p) => Scalar::Fp { p: *p, v: 0 },
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Field::Rational => Scalar::Q(BigRational::one()),
            Field::Prime(p) => Scalar::Fp { p: *p, v: 1 },
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => {
                let m = n.rem_euclid(*p as i64) as u64;
                Scalar::Fp { p: *p, v: m }
            }
        }
    }

    /// Parses a decimal scalar string: an optional sign, digits, and for a
    /// fraction a `/` followed by a nonzero denominator. `"3/7"` is valid in
    /// both fields (in a prime field it means `3 * 7^{-1}`).
    pub fn parse(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s, None),
        };
        let num: BigInt = num
            .parse()
            .map_err(|_| Error::input(format!("invalid scalar literal {s:?}")))?;
        let den: BigInt = match den {
            Some(d) => d
                .parse()
                .map_err(|_| Error::input(format!("invalid scalar literal {s:?}")))?,
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(Error::input(format!("zero denominator in scalar {s:?}")));
        }
        match self {
            Field::Rational => Ok(Scalar::Q(BigRational::new(num, den))),
            Field::Prime(p) => {
                let pv = BigInt::from(*p);
                let n = ((num % &pv) + &pv) % &pv;
                let d = ((den % &pv) + &pv) % &pv;
                let n: u64 = n.try_into().unwrap();
                let d: u64 = d.try_into().unwrap();
                if d == 0 {
                    return Err(Error::input(format!(
                        "denominator of {s:?} vanishes mod {p}"
                    )));
                }
                let inv = mod_inverse(d, *p);
                Ok(Scalar::Fp { p: *p, v: mulmod(n, inv, *p) })
            }
        }
    }
}

/// An exact scalar in the session field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Q(BigRational),
    Fp { p: u64, v: u64 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Q(_) => Field::Rational,
            Scalar::Fp { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(q) => Scalar::Q(-q),
            Scalar::Fp { p, v } => Scalar::Fp { p: *p, v: if *v == 0 { 0 } else { p - v } },
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp { p, v }, Scalar::Fp { p: q, v: w }) => {
                assert_eq!(p, q, "mixed prime fields");
                Scalar::Fp { p: *p, v: (v + w) % p }
            }
            _ => panic!("mixed fields in scalar arithmetic"),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp { p, v }, Scalar::Fp { p: q, v: w }) => {
                assert_eq!(p, q, "mixed prime fields");
                Scalar::Fp { p: *p, v: mulmod(*v, *w, *p) }
            }
            _ => panic!("mixed fields in scalar arithmetic"),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Q(q) => Scalar::Q(q.recip()),
            Scalar::Fp { p, v } => Scalar::Fp { p: *p, v: mod_inverse(*v, *p) },
        })
    }

    /// Multiplies by `(-1)^sign_exponent`.
    pub fn with_sign(self, sign_exponent: i64) -> Scalar {
        if sign_exponent.rem_euclid(2) == 0 {
            self
        } else {
            self.neg()
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Fp { v, .. } => write!(f, "{v}"),
        }
    }
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // Extended Euclid; a is nonzero mod p, p prime.
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "{a} not invertible mod {p}");
    t.rem_euclid(p as i128) as u64
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parse_and_arith() {
        let f = Field::Rational;
        let a = f.parse("3/7").unwrap();
        let b = f.parse("-2").unwrap();
        let c = a.mul(&b);
        assert_eq!(c, f.parse("-6/7").unwrap());
        assert!(a.mul(&a.inv().unwrap()).is_one());
    }

    #[test]
    fn prime_field_parse_and_arith() {
        let f = Field::prime(101).unwrap();
        let a = f.parse("3/7").unwrap();
        // 3 * 7^{-1} mod 101: 7 * 29 = 203 = 2*101 + 1, so 7^{-1} = 29, a = 87.
        assert_eq!(a, Scalar::Fp { p: 101, v: 87 });
        assert!(a.mul(&f.parse("7").unwrap()).eq(&f.from_i64(3)));
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(Field::prime(1).is_err());
        assert!(Field::prime(91).is_err());
        assert!(Field::Rational.parse("1/0").is_err());
        assert!(Field::prime(5).unwrap().parse("1/5").is_err());
    }

    #[test]
    #[should_panic(expected = "mixed fields")]
    fn mixing_fields_panics() {
        let a = Field::Rational.one();
        let b = Field::prime(5).unwrap().one();
        let _ = a.add(&b);
    }
}

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient field: the rationals or a prime field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    Q,
    Fp(u64),
}

impl Field {
    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Q => 0,
            Field::Fp(p) => *p,
        }
    }

    /// Accepts `Q`, `QQ`, `F2`, `F_7`, `GF(7)`.
    pub fn parse(s: &str) -> Result<Field> {
        let t = s.trim();
        match t {
            "Q" | "QQ" | "q" => return Ok(Field::Q),
            _ => {}
        }
        let digits = t
            .strip_prefix("GF(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| t.strip_prefix("F_"))
            .or_else(|| t.strip_prefix('F'));
        let p: u64 = digits
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| Error::BadCharacteristic(format!("unrecognized field `{s}`")))?;
        if p < 2 || p > u32::MAX as u64 || !is_prime(p) {
            return Err(Error::BadCharacteristic(format!("{p} is not a supported prime")));
        }
        Ok(Field::Fp(p))
    }

    pub fn zero(&self) -> Coeff {
        self.from_i64(0)
    }

    pub fn one(&self) -> Coeff {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Coeff {
        match *self {
            Field::Q => Coeff::Q(BigRational::from_integer(BigInt::from(v))),
            Field::Fp(p) => Coeff::Fp {
                v: v.rem_euclid(p as i64) as u64,
                p,
            },
        }
    }

    pub fn from_bigint(&self, v: &BigInt) -> Coeff {
        match *self {
            Field::Q => Coeff::Q(BigRational::from_integer(v.clone())),
            Field::Fp(p) => {
                let r = v.mod_floor(&BigInt::from(p));
                Coeff::Fp {
                    v: r.to_u64().unwrap(),
                    p,
                }
            }
        }
    }

    pub fn from_biguint(&self, v: &BigUint) -> Coeff {
        self.from_bigint(&BigInt::from(v.clone()))
    }

    /// Maps a rational into the field; fails when the denominator vanishes mod p.
    pub fn from_rational(&self, r: &BigRational) -> Result<Coeff> {
        match *self {
            Field::Q => Ok(Coeff::Q(r.clone())),
            Field::Fp(p) => {
                let n = self.from_bigint(r.numer());
                let d = self.from_bigint(r.denom());
                if d.is_zero() {
                    return Err(Error::BadCharacteristic(format!(
                        "{r} has a denominator divisible by {p}"
                    )));
                }
                Ok(n.mul(&d.inv()))
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Q => write!(f, "Q"),
            Field::Fp(p) => write!(f, "F{p}"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of `Field::Q` or `Field::Fp`. Rationals are kept reduced with
/// positive denominator (guaranteed by `BigRational`), residues lie in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Coeff {
    Q(BigRational),
    Fp { v: u64, p: u64 },
}

impl Coeff {
    pub fn field(&self) -> Field {
        match self {
            Coeff::Q(_) => Field::Q,
            Coeff::Fp { p, .. } => Field::Fp(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Q(r) => r.is_zero(),
            Coeff::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coeff::Q(r) => r.is_one(),
            Coeff::Fp { v, .. } => *v == 1,
        }
    }

    pub fn add(&self, o: &Coeff) -> Coeff {
        match (self, o) {
            (Coeff::Q(a), Coeff::Q(b)) => Coeff::Q(a + b),
            (Coeff::Fp { v: a, p }, Coeff::Fp { v: b, .. }) => Coeff::Fp {
                v: ((*a as u128 + *b as u128) % *p as u128) as u64,
                p: *p,
            },
            _ => panic!("coefficient field mismatch"),
        }
    }

    pub fn sub(&self, o: &Coeff) -> Coeff {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Q(a) => Coeff::Q(-a),
            Coeff::Fp { v, p } => Coeff::Fp {
                v: if *v == 0 { 0 } else { p - v },
                p: *p,
            },
        }
    }

    pub fn mul(&self, o: &Coeff) -> Coeff {
        match (self, o) {
            (Coeff::Q(a), Coeff::Q(b)) => Coeff::Q(a * b),
            (Coeff::Fp { v: a, p }, Coeff::Fp { v: b, .. }) => Coeff::Fp {
                v: ((*a as u128 * *b as u128) % *p as u128) as u64,
                p: *p,
            },
            _ => panic!("coefficient field mismatch"),
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Coeff {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            Coeff::Q(a) => Coeff::Q(a.recip()),
            Coeff::Fp { v, p } => Coeff::Fp {
                v: pow_mod(*v, p - 2, *p),
                p: *p,
            },
        }
    }

    pub fn div(&self, o: &Coeff) -> Coeff {
        self.mul(&o.inv())
    }

    pub fn pow(&self, e: u32) -> Coeff {
        let mut acc = self.field().one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// The rational value (for `Fp`, the residue as an integer).
    pub fn to_rational(&self) -> BigRational {
        match self {
            Coeff::Q(a) => a.clone(),
            Coeff::Fp { v, .. } => BigRational::from_integer(BigInt::from(*v)),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Coeff::Q(a) => a.is_negative(),
            Coeff::Fp { .. } => false,
        }
    }

    pub fn abs(&self) -> Coeff {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }
}

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut r: u128 = 1;
    let mut b = b as u128 % m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r as u64
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Q(a) => {
                if a.denom().is_one() {
                    write!(f, "{}", a.numer())
                } else {
                    write!(f, "{}/{}", a.numer(), a.denom())
                }
            }
            Coeff::Fp { v, .. } => write!(f, "{v}"),
        }
    }
}

/// Binomial coefficient as an exact big integer.
pub fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    c
}

/// Parses a rational written as `a`, `-a` or `a/b`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Invalid(format!("not a rational number: `{s}`"));
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

/// Formats a rational as `p` or `p/q`.
pub fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Least common multiple of positive rationals: the smallest positive `w`
/// with every `w / a_i` an integer.
pub fn rational_lcm(values: &[BigRational]) -> BigRational {
    // w / (p/q) = w q / p integral for all i  <=>  w = lcm(p_i) / gcd(q_i)
    let mut num = BigInt::one();
    let mut den = BigInt::zero();
    for v in values {
        num = num.lcm(v.numer());
        den = den.gcd(v.denom());
    }
    if den.is_zero() {
        den = BigInt::one();
    }
    BigRational::new(num, den)
}

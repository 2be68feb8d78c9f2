//! Coefficient rings: the integers, prime fields and residue rings,
//! all with the trivial involution.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A supported coefficient ring.  Elements are represented by `BigInt`s
/// reduced to canonical representatives (`0 <= e < m` over a finite ring).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Ring {
    #[serde(rename = "Z")]
    Z,
    #[serde(rename = "Fp")]
    Fp { p: u64 },
    #[serde(rename = "Zmod")]
    Zmod { m: u64 },
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl Ring {
    pub fn fp(p: u64) -> Result<Ring> {
        if !is_prime(p) {
            return Err(Error::Ring(format!("{p} is not prime")));
        }
        Ok(Ring::Fp { p })
    }

    pub fn zmod(m: u64) -> Result<Ring> {
        if m < 2 {
            return Err(Error::Ring(format!("modulus {m} < 2")));
        }
        Ok(Ring::Zmod { m })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Ring::Z => Ok(()),
            Ring::Fp { p } => Ring::fp(p).map(|_| ()),
            Ring::Zmod { m } => Ring::zmod(m).map(|_| ()),
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        match *self {
            Ring::Z => None,
            Ring::Fp { p } => Some(p),
            Ring::Zmod { m } => Some(m),
        }
    }

    pub fn is_field(&self) -> bool {
        matches!(self, Ring::Fp { .. })
    }

    /// Canonical representative of an element.
    pub fn reduce(&self, x: &BigInt) -> BigInt {
        match self.modulus() {
            None => x.clone(),
            Some(m) => x.mod_floor(&BigInt::from(m)),
        }
    }

    pub fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        self.reduce(&(a + b))
    }

    pub fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        self.reduce(&(a - b))
    }

    pub fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        self.reduce(&(a * b))
    }

    pub fn neg(&self, a: &BigInt) -> BigInt {
        self.reduce(&(-a))
    }

    pub fn is_unit(&self, a: &BigInt) -> bool {
        match self.modulus() {
            None => a.abs().is_one(),
            Some(m) => self.reduce(a).gcd(&BigInt::from(m)).is_one(),
        }
    }

    /// Multiplicative inverse of a unit.
    pub fn inv(&self, a: &BigInt) -> Result<BigInt> {
        match self.modulus() {
            None => {
                if a.abs().is_one() {
                    Ok(a.clone())
                } else {
                    Err(Error::Ring(format!("{a} is not a unit of Z")))
                }
            }
            Some(m) => {
                let m = BigInt::from(m);
                let a = self.reduce(a);
                let e = a.extended_gcd(&m);
                if !e.gcd.is_one() {
                    return Err(Error::Ring(format!("{a} is not a unit mod {m}")));
                }
                Ok(e.x.mod_floor(&m))
            }
        }
    }

    /// Whether `a` divides `b` in the ring.  Over a finite ring this asks for
    /// solvability of `a x = b`.
    pub fn divides(&self, a: &BigInt, b: &BigInt) -> bool {
        match self.modulus() {
            None => {
                if a.is_zero() {
                    b.is_zero()
                } else {
                    b.mod_floor(&a.abs()).is_zero()
                }
            }
            Some(m) => {
                let m = BigInt::from(m);
                let g = self.reduce(a).gcd(&m);
                self.reduce(b).mod_floor(&g).is_zero()
            }
        }
    }
}

impl std::fmt::Display for Ring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ring::Z => write!(f, "Z"),
            Ring::Fp { p } => write!(f, "F{p}"),
            Ring::Zmod { m } => write!(f, "Z/{m}"),
        }
    }
}

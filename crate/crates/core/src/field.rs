//! Scalar arithmetic in a prime field GF(p).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest admissible modulus (exclusive). Keeps every product of two
/// residues inside a `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is out of range (must be < 2^31)")]
    OutOfRange(u64),
    #[error("{value} has no inverse modulo {p}")]
    NotInvertible { value: u64, p: u64 },
}

/// The characteristic `p` of a prime field, checked prime at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p >= MAX_MODULUS {
            return Err(FieldError::OutOfRange(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeModulus(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// Canonical residue of a signed integer.
    #[inline]
    pub fn reduce(self, x: i64) -> u64 {
        x.rem_euclid(self.0 as i64) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        (a * b) % self.0
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.0;
        base %= self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(self, a: u64) -> Result<u64, FieldError> {
        let a = a % self.0;
        if a == 0 {
            return Err(FieldError::NotInvertible { value: a, p: self.0 });
        }
        Ok(self.pow(a, self.0 - 2))
    }

    /// Inverse of an arbitrary signed integer, failing when `p` divides it.
    pub fn inv_int(self, x: i64) -> Result<u64, FieldError> {
        let r = self.reduce(x);
        if r == 0 {
            return Err(FieldError::NotInvertible {
                value: x.unsigned_abs(),
                p: self.0,
            });
        }
        self.inv(r)
    }

    /// True iff `p` divides `x`.
    pub fn divides(self, x: i64) -> bool {
        self.reduce(x) == 0
    }
}

impl TryFrom<u64> for PrimeModulus {
    type Error = FieldError;

    fn try_from(p: u64) -> Result<Self, Self::Error> {
        PrimeModulus::new(p)
    }
}

impl From<PrimeModulus> for u64 {
    fn from(p: PrimeModulus) -> u64 {
        p.0
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Trial division.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes `p <= bound`, ascending.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&p| is_prime(p)).collect()
}

//! Exact arithmetic in the prime field GF(d) for odd prime d.
//!
//! Every classical quantity of the protocol (secrets, shares, components,
//! unitary exponents) lives in this field. Values are kept canonical in
//! [0, d) and operations between different moduli are rejected.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("modulus {0} is not an odd prime >= 3")]
    NotOddPrime(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
}

/// An odd prime d >= 3, validated at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(d: u64) -> Result<Self, GfError> {
        if d < 3 || d % 2 == 0 || !is_prime_u64(d) {
            return Err(GfError::NotOddPrime(d));
        }
        Ok(PrimeModulus(d))
    }

    pub fn d(self) -> u64 {
        self.0
    }

    /// Canonical element with the given residue (reduced mod d).
    pub fn element(self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.0,
            modulus: self,
        }
    }

    pub fn zero(self) -> FieldElement {
        self.element(0)
    }

    pub fn one(self) -> FieldElement {
        self.element(1)
    }

    /// All d residues in order.
    pub fn elements(self) -> impl Iterator<Item = FieldElement> {
        (0..self.0).map(move |v| self.element(v))
    }
}

/// Deterministic Miller-Rabin, exact for all u64.
///
/// The witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37} is known to
/// be sufficient for n < 3.3 * 10^24, which covers the 64-bit range.
fn is_prime_u64(n: u64) -> bool {
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
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// A canonical residue in GF(d).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: PrimeModulus,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus.0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl FieldElement {
    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_modulus(self, other: FieldElement) -> Result<u64, GfError> {
        if self.modulus != other.modulus {
            return Err(GfError::ModulusMismatch(self.modulus.0, other.modulus.0));
        }
        Ok(self.modulus.0)
    }

    pub fn add(self, other: FieldElement) -> Result<FieldElement, GfError> {
        let d = self.same_modulus(other)?;
        // values < d <= 2^63 so the sum fits in u64 only for d < 2^63;
        // widen to u128 to be safe for any 64-bit prime
        let v = ((self.value as u128 + other.value as u128) % d as u128) as u64;
        Ok(self.modulus.element(v))
    }

    pub fn sub(self, other: FieldElement) -> Result<FieldElement, GfError> {
        let d = self.same_modulus(other)?;
        let v = if self.value >= other.value {
            self.value - other.value
        } else {
            d - (other.value - self.value)
        };
        Ok(self.modulus.element(v))
    }

    pub fn mul(self, other: FieldElement) -> Result<FieldElement, GfError> {
        let d = self.same_modulus(other)?;
        Ok(self.modulus.element(mul_mod(self.value, other.value, d)))
    }

    pub fn neg(self) -> FieldElement {
        if self.value == 0 {
            self
        } else {
            self.modulus.element(self.modulus.0 - self.value)
        }
    }

    /// Multiplicative inverse by extended Euclid.
    pub fn inv(self) -> Result<FieldElement, GfError> {
        if self.value == 0 {
            return Err(GfError::ZeroInverse);
        }
        let d = self.modulus.0 as i128;
        let (mut r0, mut r1) = (d, self.value as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1, "modulus is prime so gcd must be 1");
        let v = t0.rem_euclid(d) as u64;
        Ok(self.modulus.element(v))
    }

    /// self^e with pow(0, 0) = 1.
    pub fn pow(self, e: u64) -> FieldElement {
        self.modulus.element(pow_mod(self.value, e, self.modulus.0))
    }
}

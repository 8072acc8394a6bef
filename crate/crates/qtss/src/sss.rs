//! Classical share dealing and component computation.
//!
//! Shamir's (t, n) scheme over GF(d), exposed behind a generic
//! additive-component interface: any scheme whose per-participant components
//! sum to the secret mod d can drive the quantum phase unchanged.

use rand::Rng;
use thiserror::Error;

use crate::gf::{FieldElement, GfError, PrimeModulus};

/// Hard cap on d^t for exhaustive census enumeration.
pub const CENSUS_CAP: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SssError {
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error("threshold {t} out of range for {n} shareholders")]
    BadThreshold { t: usize, n: usize },
    #[error("participant identities must be distinct and nonzero")]
    BadIdentities,
    #[error("share x={0} is not in the active set")]
    NotInActiveSet(u64),
    #[error("no components to sum")]
    Empty,
    #[error("census would enumerate {0} polynomials, cap is {CENSUS_CAP}")]
    CensusCapExceeded(u64),
    #[error("{0} fixed shares over-determine a degree-{1} polynomial")]
    TooManyFixedShares(usize, usize),
}

/// f(x) = a_0 + a_1 x + ... + a_{t-1} x^{t-1} mod d, with a_0 the dealt value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<FieldElement>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<FieldElement>) -> Self {
        assert!(!coeffs.is_empty());
        Polynomial { coeffs }
    }

    /// Random polynomial of degree at most t-1 with constant term `secret`.
    /// All of a_1..a_{t-1} are uniform including zero, so the actual degree
    /// may be lower.
    pub fn random<R: Rng + ?Sized>(secret: FieldElement, t: usize, rng: &mut R) -> Self {
        let m = secret.modulus();
        let mut coeffs = vec![secret];
        for _ in 1..t {
            coeffs.push(m.element(rng.random_range(0..m.d())));
        }
        Polynomial { coeffs }
    }

    pub fn threshold(&self) -> usize {
        self.coeffs.len()
    }

    pub fn secret(&self) -> FieldElement {
        self.coeffs[0]
    }

    /// Horner evaluation.
    pub fn eval(&self, x: FieldElement) -> Result<FieldElement, GfError> {
        let mut acc = x.modulus().zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(x)?.add(c)?;
        }
        Ok(acc)
    }
}

/// One shareholder's point (x_j, f(x_j)).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Share {
    pub x: FieldElement,
    pub y: FieldElement,
}

/// A participant's Lagrange-weighted share term c_j for a fixed active set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Component {
    pub value: FieldElement,
    /// public identity x_j of the owner
    pub owner: FieldElement,
}

/// Any classical (t, n) scheme whose components on an authorized set sum to
/// the secret mod d. Shamir is the concrete backend; CRT- or geometry-based
/// schemes would plug in here once a reduction to Z_d exponents is fixed.
pub trait AdditiveComponentScheme {
    fn modulus(&self) -> PrimeModulus;

    fn deal<R: Rng + ?Sized>(
        &self,
        secret: FieldElement,
        t: usize,
        xs: &[FieldElement],
        rng: &mut R,
    ) -> Result<Vec<Share>, SssError>;

    fn component(&self, share: Share, active_xs: &[FieldElement]) -> Result<Component, SssError>;
}

#[derive(Debug, Clone, Copy)]
pub struct ShamirScheme {
    modulus: PrimeModulus,
}

impl ShamirScheme {
    pub fn new(modulus: PrimeModulus) -> Self {
        ShamirScheme { modulus }
    }
}

impl AdditiveComponentScheme for ShamirScheme {
    fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    fn deal<R: Rng + ?Sized>(
        &self,
        secret: FieldElement,
        t: usize,
        xs: &[FieldElement],
        rng: &mut R,
    ) -> Result<Vec<Share>, SssError> {
        deal(secret, t, xs, rng)
    }

    fn component(&self, share: Share, active_xs: &[FieldElement]) -> Result<Component, SssError> {
        component(share, active_xs)
    }
}

fn check_identities(xs: &[FieldElement]) -> Result<(), SssError> {
    for (i, x) in xs.iter().enumerate() {
        if x.is_zero() {
            return Err(SssError::BadIdentities);
        }
        if xs[..i].contains(x) {
            return Err(SssError::BadIdentities);
        }
    }
    Ok(())
}

/// Deal n shares of `secret` at the public identities `xs`.
pub fn deal<R: Rng + ?Sized>(
    secret: FieldElement,
    t: usize,
    xs: &[FieldElement],
    rng: &mut R,
) -> Result<Vec<Share>, SssError> {
    let n = xs.len();
    if t < 1 || t > n || (n as u64) >= secret.modulus().d() {
        return Err(SssError::BadThreshold { t, n });
    }
    check_identities(xs)?;
    let poly = Polynomial::random(secret, t, rng);
    xs.iter()
        .map(|&x| Ok(Share { x, y: poly.eval(x)? }))
        .collect()
}

/// c_j = f(x_j) * prod_{r != j} x_r (x_r - x_j)^{-1} mod d.
pub fn component(share: Share, active_xs: &[FieldElement]) -> Result<Component, SssError> {
    check_identities(active_xs)?;
    if !active_xs.contains(&share.x) {
        return Err(SssError::NotInActiveSet(share.x.value()));
    }
    let mut c = share.y;
    for &xr in active_xs {
        if xr == share.x {
            continue;
        }
        let denom = xr.sub(share.x)?.inv()?;
        c = c.mul(xr)?.mul(denom)?;
    }
    Ok(Component {
        value: c,
        owner: share.x,
    })
}

/// Sum of components; equals the dealt secret on any authorized set.
pub fn reconstruct(components: &[Component]) -> Result<FieldElement, SssError> {
    let first = components.first().ok_or(SssError::Empty)?;
    let mut acc = first.value;
    for c in &components[1..] {
        acc = acc.add(c.value)?;
    }
    Ok(acc)
}

/// Textbook Lagrange interpolation of the shares' polynomial at x = 0.
/// Kept as an independent route for cross-checking `component` + `reconstruct`.
pub fn interpolate_at_zero(shares: &[Share]) -> Result<FieldElement, SssError> {
    let first = shares.first().ok_or(SssError::Empty)?;
    let m = first.x.modulus();
    let mut acc = m.zero();
    for sj in shares {
        let mut term = sj.y;
        for sr in shares {
            if sr.x == sj.x {
                continue;
            }
            // (0 - x_r) / (x_j - x_r) = x_r / (x_r - x_j)
            term = term.mul(sr.x)?.mul(sr.x.sub(sj.x)?.inv()?)?;
        }
        acc = acc.add(term)?;
    }
    Ok(acc)
}

/// Exhaustively enumerate all d^t polynomials of degree < t, keep those
/// consistent with the fixed shares, and histogram the constant term.
/// A perfect scheme gives a flat histogram for any <= t-1 fixed shares.
pub fn secrecy_census(
    d: PrimeModulus,
    t: usize,
    fixed_shares: &[Share],
) -> Result<Vec<u64>, SssError> {
    if fixed_shares.len() > t.saturating_sub(1) {
        return Err(SssError::TooManyFixedShares(fixed_shares.len(), t));
    }
    let total = (d.d() as f64).powi(t as i32);
    if total > CENSUS_CAP as f64 {
        return Err(SssError::CensusCapExceeded(total as u64));
    }
    let mut histogram = vec![0u64; d.d() as usize];
    // odometer over coefficient vectors
    let mut coeffs = vec![0u64; t];
    loop {
        let poly = Polynomial::new(coeffs.iter().map(|&c| d.element(c)).collect());
        let consistent = fixed_shares
            .iter()
            .all(|s| poly.eval(s.x).map(|y| y == s.y).unwrap_or(false));
        if consistent {
            histogram[coeffs[0] as usize] += 1;
        }
        let mut i = 0;
        loop {
            if i == t {
                return Ok(histogram);
            }
            coeffs[i] += 1;
            if coeffs[i] < d.d() {
                break;
            }
            coeffs[i] = 0;
            i += 1;
        }
    }
}

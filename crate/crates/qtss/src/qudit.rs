//! Single d-level quantum system: MUB vectors, the diagonal cyclic unitaries,
//! Born-rule measurement, and an exact label tracker.
//!
//! Phase exponents are reduced mod d in integer arithmetic before touching
//! floating point, and all phases come from one precomputed table of the d
//! roots of unity, so the symbolic label model and the numeric statevector
//! agree to rounding.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::gf::{FieldElement, PrimeModulus};

/// Default tolerance for state assertions.
pub const TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuditError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// Label (l, k) of the MUB vector |phi_l^k>; l indexes the vector, k the basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MubLabel {
    pub l: FieldElement,
    pub k: FieldElement,
}

impl MubLabel {
    pub fn new(l: FieldElement, k: FieldElement) -> Self {
        MubLabel { l, k }
    }

    /// Symbolic twin of `apply_unitary`: (l, k) -> (l + p, k + q).
    pub fn shifted(self, p: FieldElement, q: FieldElement) -> Self {
        MubLabel {
            l: self.l.add(p).expect("labels share the space modulus"),
            k: self.k.add(q).expect("labels share the space modulus"),
        }
    }
}

/// The d-dimensional Hilbert space with its root-of-unity phase table.
#[derive(Debug, Clone)]
pub struct QuditSpace {
    modulus: PrimeModulus,
    /// roots[r] = exp(2 pi i r / d)
    roots: Vec<Complex64>,
}

/// Unit-norm amplitude vector over the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuditState {
    amps: Vec<Complex64>,
}

impl QuditState {
    /// Wrap raw amplitudes without normalization; for fixture injection.
    pub fn from_raw(amps: Vec<Complex64>) -> Self {
        QuditState { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

pub fn inner_product(a: &QuditState, b: &QuditState) -> Result<Complex64, QuditError> {
    if a.dim() != b.dim() {
        return Err(QuditError::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(a.amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

impl QuditSpace {
    pub fn new(modulus: PrimeModulus) -> Self {
        let d = modulus.d();
        let roots = (0..d)
            .map(|r| {
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / d as f64)
            })
            .collect();
        QuditSpace { modulus, roots }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn d(&self) -> u64 {
        self.modulus.d()
    }

    fn root(&self, exponent: u64) -> Complex64 {
        self.roots[(exponent % self.d()) as usize]
    }

    /// Computational basis state |j>. The (d+1)-th basis; unused by the
    /// protocol itself.
    pub fn basis_state(&self, j: FieldElement) -> QuditState {
        let mut amps = vec![Complex64::ZERO; self.d() as usize];
        amps[j.value() as usize] = Complex64::ONE;
        QuditState { amps }
    }

    /// |phi_l^k> = (1/sqrt d) sum_j w^{j(l + k j)} |j>.
    pub fn mub_vector(&self, label: MubLabel) -> QuditState {
        let d = self.d();
        let norm = 1.0 / (d as f64).sqrt();
        let (l, k) = (label.l.value() as u128, label.k.value() as u128);
        let amps = (0..d as u128)
            .map(|j| {
                let e = (j * (l + k * j % d as u128)) % d as u128;
                self.root(e as u64) * norm
            })
            .collect();
        QuditState { amps }
    }

    /// Apply U_{p,q} = X_d^p Y_d^q: amplitude j picks up phase w^{j p + j^2 q}.
    pub fn apply_unitary(&self, state: &QuditState, p: FieldElement, q: FieldElement) -> QuditState {
        let d = self.d() as u128;
        let (p, q) = (p.value() as u128, q.value() as u128);
        let amps = state
            .amps
            .iter()
            .enumerate()
            .map(|(j, &a)| {
                let j = j as u128;
                let e = (j * p % d + j * j % d * q % d) % d;
                a * self.root(e as u64)
            })
            .collect();
        QuditState { amps }
    }

    /// Born probabilities of the d outcomes when measuring in basis k.
    pub fn outcome_probabilities(&self, state: &QuditState, k: FieldElement) -> Vec<f64> {
        let mut probs: Vec<f64> = self
            .modulus
            .elements()
            .map(|l| {
                let basis = self.mub_vector(MubLabel::new(l, k));
                inner_product(&basis, state)
                    .expect("basis vector has the space dimension")
                    .norm_sqr()
                    .max(0.0)
            })
            .collect();
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
        probs
    }

    /// Projective measurement in MUB k: samples an outcome l by inverse CDF
    /// and collapses to |phi_l^k>.
    pub fn measure_in_basis<R: Rng + ?Sized>(
        &self,
        state: &QuditState,
        k: FieldElement,
        rng: &mut R,
    ) -> (FieldElement, QuditState) {
        let probs = self.outcome_probabilities(state, k);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut outcome = self.d() - 1;
        for (l, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                outcome = l as u64;
                break;
            }
        }
        let l = self.modulus.element(outcome);
        let post = self.mub_vector(MubLabel::new(l, k));
        (l, post)
    }
}

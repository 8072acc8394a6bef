//! The sequential secret-sharing session: dealer preparation of three qudits,
//! participant-by-participant unitary hops, final measurement, random-number
//! exchange, recovery, and verification.
//!
//! Three values travel in parallel: the two secrets S1, S2 and a check value
//! N with S1 = S2 * N mod d. Each qudit v carries p0^v in its vector index
//! and d - s in its basis index, where s is the private value dealt in the
//! classical phase. Honest hops cancel s via the share components, so the
//! last participant measures in basis 0 and the randoms unmask (S1, S2, N).

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{FieldElement, GfError, PrimeModulus};
use crate::qudit::{MubLabel, QuditSpace, QuditState};
use crate::sss::{self, Share, SssError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error(transparent)]
    Sss(#[from] SssError),
    #[error("invalid session shape: need t <= m <= n < d, got t={t} m={m} n={n} d={d}")]
    BadShape { t: usize, m: usize, n: usize, d: u64 },
    #[error("active identities must be distinct, nonzero members of the shareholder set")]
    BadActiveSet,
    #[error("S2 = 0 cannot bind S1 through the check equation")]
    DegenerateS2,
    #[error("share x={0} does not belong to the hopping participant")]
    ForeignShare(u64),
    #[error("expected randoms from {expected} participants, got {got}")]
    MissingRandoms { expected: usize, got: usize },
    #[error("malformed transcript: randoms exchanged before results were published")]
    ExchangeBeforePublish,
    #[error("no attack reports to summarize")]
    EmptyReports,
}

/// Shape of one session: field size, threshold, shareholder count, and the
/// ordered communication line Bob_1 -> ... -> Bob_m.
#[derive(Debug, Clone)]
pub struct SessionParams {
    d: PrimeModulus,
    t: usize,
    all_xs: Vec<FieldElement>,
    active_xs: Vec<FieldElement>,
}

impl SessionParams {
    /// Identities default to 1..n; the line is the first m of them.
    pub fn new(d: PrimeModulus, t: usize, n: usize, m: usize) -> Result<Self, ProtocolError> {
        let all_xs = (1..=n as u64).map(|x| d.element(x)).collect::<Vec<_>>();
        let active_xs = all_xs.iter().take(m).copied().collect();
        Self::with_line(d, t, all_xs, active_xs)
    }

    /// Explicit identities and line order. The order only fixes who measures
    /// last; all hop operators commute.
    pub fn with_line(
        d: PrimeModulus,
        t: usize,
        all_xs: Vec<FieldElement>,
        active_xs: Vec<FieldElement>,
    ) -> Result<Self, ProtocolError> {
        let (n, m) = (all_xs.len(), active_xs.len());
        if t < 1 || t > m || m > n || n as u64 >= d.d() {
            return Err(ProtocolError::BadShape { t, m, n, d: d.d() });
        }
        for (i, x) in all_xs.iter().enumerate() {
            if x.is_zero() || all_xs[..i].contains(x) || x.modulus() != d {
                return Err(ProtocolError::BadActiveSet);
            }
        }
        for (i, x) in active_xs.iter().enumerate() {
            if !all_xs.contains(x) || active_xs[..i].contains(x) {
                return Err(ProtocolError::BadActiveSet);
            }
        }
        Ok(SessionParams { d, t, all_xs, active_xs })
    }

    pub fn d(&self) -> PrimeModulus {
        self.d
    }
    pub fn t(&self) -> usize {
        self.t
    }
    pub fn n(&self) -> usize {
        self.all_xs.len()
    }
    pub fn m(&self) -> usize {
        self.active_xs.len()
    }
    pub fn all_xs(&self) -> &[FieldElement] {
        &self.all_xs
    }
    pub fn active_xs(&self) -> &[FieldElement] {
        &self.active_xs
    }
}

/// Result of the classical private share distribution phase.
#[derive(Debug, Clone)]
pub struct ClassicalDeal {
    /// the private value s = f(0); encodes the final measurement basis offset
    pub s: FieldElement,
    /// one share per shareholder, aligned with `SessionParams::all_xs`
    pub shares: Vec<Share>,
}

/// Deal shares of a fresh uniform private value to all n shareholders.
pub fn classical_phase<R: Rng + ?Sized>(
    params: &SessionParams,
    rng: &mut R,
) -> Result<ClassicalDeal, ProtocolError> {
    let d = params.d;
    let s = d.element(rng.random_range(0..d.d()));
    let shares = sss::deal(s, params.t, &params.all_xs, rng)?;
    Ok(ClassicalDeal { s, shares })
}

/// The dealer's embedded values for one session.
#[derive(Debug, Clone, Copy)]
pub struct DealerSecrets {
    pub s1: FieldElement,
    pub s2: FieldElement,
    /// check value with S1 = S2 * N mod d
    pub check: FieldElement,
    pub s: FieldElement,
    /// vector-index exponents (S1, S2, N)
    pub p0: [FieldElement; 3],
    /// basis-index exponents, all d - s
    pub q0: [FieldElement; 3],
}

impl DealerSecrets {
    /// N is derived as S1 * S2^-1, so S2 = 0 is rejected.
    pub fn derive(
        s1: FieldElement,
        s2: FieldElement,
        s: FieldElement,
    ) -> Result<Self, ProtocolError> {
        if s2.is_zero() {
            return Err(ProtocolError::DegenerateS2);
        }
        let check = s1.mul(s2.inv()?)?;
        let q = s.neg();
        Ok(DealerSecrets {
            s1,
            s2,
            check,
            s,
            p0: [s1, s2, check],
            q0: [q, q, q],
        })
    }
}

/// One participant's action on the three traveling qudits.
#[derive(Debug, Clone)]
pub struct HopRecord {
    pub x: FieldElement,
    /// the three independent masks p_j^v
    pub p: [FieldElement; 3],
    /// q_j = c_j, identical across the three qudits
    pub q: FieldElement,
    /// symbolic track of the labels after this hop
    pub labels_after: [MubLabel; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accepted,
    Rejected,
}

/// Full record of one session.
#[derive(Debug, Clone)]
pub struct Transcript {
    pub d: u64,
    pub t: usize,
    pub n: usize,
    pub active_xs: Vec<FieldElement>,
    pub hops: Vec<HopRecord>,
    pub results: [FieldElement; 3],
    pub exchanged: Vec<[FieldElement; 3]>,
    pub recovered: [FieldElement; 3],
    pub verdict: Verdict,
    /// enforced ordering: results are published before randoms are exchanged
    pub results_published_first: bool,
    pub dealer: Option<DealerSecrets>,
}

impl Transcript {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        if !self.results_published_first {
            return Err(ProtocolError::ExchangeBeforePublish);
        }
        Ok(())
    }
}

/// Step (i): prepare |phi_0^0> three times and shift by (p0^v, q0^v).
pub fn dealer_prepare(
    space: &QuditSpace,
    secrets: &DealerSecrets,
) -> ([QuditState; 3], [MubLabel; 3]) {
    let origin = MubLabel::new(space.modulus().zero(), space.modulus().zero());
    let labels =
        std::array::from_fn(|v| origin.shifted(secrets.p0[v], secrets.q0[v]));
    let states = std::array::from_fn(|v| {
        let flat = space.mub_vector(origin);
        space.apply_unitary(&flat, secrets.p0[v], secrets.q0[v])
    });
    (states, labels)
}

/// Steps (ii)-(iii) for one participant, with the masks supplied explicitly.
/// `participant_hop` draws them; tests inject fixed values here.
pub fn participant_hop_with(
    space: &QuditSpace,
    states: &[QuditState; 3],
    labels: &[MubLabel; 3],
    share: Share,
    active_xs: &[FieldElement],
    p: [FieldElement; 3],
) -> Result<([QuditState; 3], HopRecord), ProtocolError> {
    if !active_xs.contains(&share.x) {
        return Err(ProtocolError::ForeignShare(share.x.value()));
    }
    let q = sss::component(share, active_xs)?.value;
    let new_states = std::array::from_fn(|v| space.apply_unitary(&states[v], p[v], q));
    let labels_after = std::array::from_fn(|v| labels[v].shifted(p[v], q));
    Ok((
        new_states,
        HopRecord { x: share.x, p, q, labels_after },
    ))
}

pub fn participant_hop<R: Rng + ?Sized>(
    space: &QuditSpace,
    states: &[QuditState; 3],
    labels: &[MubLabel; 3],
    share: Share,
    active_xs: &[FieldElement],
    rng: &mut R,
) -> Result<([QuditState; 3], HopRecord), ProtocolError> {
    let d = space.modulus();
    let p = std::array::from_fn(|_| d.element(rng.random_range(0..d.d())));
    participant_hop_with(space, states, labels, share, active_xs, p)
}

/// Step (iv): Bob_m measures the three qudits in the basis k = 0.
pub fn final_measure<R: Rng + ?Sized>(
    space: &QuditSpace,
    states: &[QuditState; 3],
    rng: &mut R,
) -> [FieldElement; 3] {
    let k0 = space.modulus().zero();
    std::array::from_fn(|v| space.measure_in_basis(&states[v], k0, rng).0)
}

/// Step (v): p0^v = R_v - sum_j p_j^v mod d.
pub fn recover(
    results: [FieldElement; 3],
    exchanged: &[[FieldElement; 3]],
    m: usize,
) -> Result<[FieldElement; 3], ProtocolError> {
    if exchanged.len() != m {
        return Err(ProtocolError::MissingRandoms { expected: m, got: exchanged.len() });
    }
    let mut recovered = results;
    for p in exchanged {
        for v in 0..3 {
            recovered[v] = recovered[v].sub(p[v])?;
        }
    }
    Ok(recovered)
}

/// Step (vi): accepted iff p0^1 = p0^2 * p0^3 mod d.
pub fn verify(recovered: [FieldElement; 3]) -> Verdict {
    match recovered[1].mul(recovered[2]) {
        Ok(prod) if prod == recovered[0] => Verdict::Accepted,
        _ => Verdict::Rejected,
    }
}

/// Steps (i)-(vi) with every party honest.
pub fn run_honest_session<R: Rng + ?Sized>(
    params: &SessionParams,
    s1: FieldElement,
    s2: FieldElement,
    deal: &ClassicalDeal,
    rng: &mut R,
) -> Result<Transcript, ProtocolError> {
    let space = QuditSpace::new(params.d);
    let secrets = DealerSecrets::derive(s1, s2, deal.s)?;
    let (mut states, mut labels) = dealer_prepare(&space, &secrets);

    let mut hops = Vec::with_capacity(params.m());
    for x in params.active_xs() {
        let share = deal.shares[params.all_xs.iter().position(|a| a == x).unwrap()];
        let (next, hop) =
            participant_hop(&space, &states, &labels, share, params.active_xs(), rng)?;
        states = next;
        labels = hop.labels_after;
        hops.push(hop);
    }

    let results = final_measure(&space, &states, rng);
    let exchanged: Vec<[FieldElement; 3]> = hops.iter().map(|h| h.p).collect();
    let recovered = recover(results, &exchanged, params.m())?;
    let verdict = verify(recovered);

    Ok(Transcript {
        d: params.d.d(),
        t: params.t,
        n: params.n(),
        active_xs: params.active_xs.clone(),
        hops,
        results,
        exchanged,
        recovered,
        verdict,
        results_published_first: true,
        dealer: Some(secrets),
    })
}

// --- serialization ---------------------------------------------------------

/// Canonical JSON form of a transcript. Secrets and shares are stripped
/// unless explicitly requested for test fixtures.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranscriptExport {
    pub version: u32,
    pub d: u64,
    pub t: usize,
    pub n: usize,
    pub m: usize,
    pub xs: Vec<u64>,
    #[serde(rename = "R")]
    pub results: [u64; 3],
    pub exchanged: Vec<[u64; 3]>,
    pub recovered: [u64; 3],
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub secrets: Option<[u64; 3]>,
}

pub const TRANSCRIPT_SCHEMA_VERSION: u32 = 1;

impl Transcript {
    pub fn export(&self, include_secrets: bool) -> TranscriptExport {
        TranscriptExport {
            version: TRANSCRIPT_SCHEMA_VERSION,
            d: self.d,
            t: self.t,
            n: self.n,
            m: self.active_xs.len(),
            xs: self.active_xs.iter().map(|x| x.value()).collect(),
            results: self.results.map(|r| r.value()),
            exchanged: self.exchanged.iter().map(|p| p.map(|e| e.value())).collect(),
            recovered: self.recovered.map(|r| r.value()),
            verdict: self.verdict,
            secrets: match (&self.dealer, include_secrets) {
                (Some(ds), true) => Some([ds.s1.value(), ds.s2.value(), ds.check.value()]),
                _ => None,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pm(d: u64) -> PrimeModulus {
        PrimeModulus::new(d).unwrap()
    }

    #[test]
    fn dealer_prepare_labels() {
        let d = pm(7);
        let space = QuditSpace::new(d);
        // N = 6 * 3^-1 = 6 * 5 = 30 = 2
        let secrets = DealerSecrets::derive(d.element(6), d.element(3), d.element(2)).unwrap();
        assert_eq!(secrets.check, d.element(2));
        assert_eq!(secrets.s2.mul(secrets.check).unwrap(), secrets.s1);
        let (_, labels) = dealer_prepare(&space, &secrets);
        assert_eq!(labels[0], MubLabel::new(d.element(6), d.element(5)));
        assert_eq!(labels[1], MubLabel::new(d.element(3), d.element(5)));
        assert_eq!(labels[2], MubLabel::new(d.element(2), d.element(5)));
    }

    #[test]
    fn dealer_zero_s1_allowed_zero_s2_rejected() {
        let d = pm(7);
        let secrets = DealerSecrets::derive(d.element(0), d.element(4), d.element(1)).unwrap();
        assert_eq!(secrets.check, d.element(0));
        assert!(matches!(
            DealerSecrets::derive(d.element(1), d.element(0), d.element(1)),
            Err(ProtocolError::DegenerateS2)
        ));
    }

    #[test]
    fn dealer_s_zero_keeps_basis() {
        let d = pm(7);
        let space = QuditSpace::new(d);
        let secrets = DealerSecrets::derive(d.element(2), d.element(1), d.element(0)).unwrap();
        let (_, labels) = dealer_prepare(&space, &secrets);
        assert_eq!(labels[0].k, d.element(0));
    }

    #[test]
    fn zero_randomness_hop_advances_only_k() {
        let d = pm(7);
        let space = QuditSpace::new(d);
        let params = SessionParams::new(d, 1, 1, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let deal = classical_phase(&params, &mut rng).unwrap();
        let secrets =
            DealerSecrets::derive(d.element(4), d.element(2), deal.s).unwrap();
        let (states, labels) = dealer_prepare(&space, &secrets);
        let zero = d.element(0);
        let (_, hop) = participant_hop_with(
            &space,
            &states,
            &labels,
            deal.shares[0],
            params.active_xs(),
            [zero, zero, zero],
        )
        .unwrap();
        for v in 0..3 {
            assert_eq!(hop.labels_after[v].l, labels[v].l);
            // degenerate chain: q0 + c = (d - s) + s = 0
            assert_eq!(hop.labels_after[v].k, d.element(0));
        }
    }

    #[test]
    fn honest_session_recovers_secrets() {
        let d = pm(7);
        let params = SessionParams::new(d, 2, 4, 3).unwrap();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let deal = classical_phase(&params, &mut rng).unwrap();
            let tr =
                run_honest_session(&params, d.element(6), d.element(3), &deal, &mut rng).unwrap();
            assert_eq!(tr.verdict, Verdict::Accepted);
            assert_eq!(tr.recovered[0], d.element(6));
            assert_eq!(tr.recovered[1], d.element(3));
            // basis-closure: symbolic k index is 0 before measurement
            let last = tr.hops.last().unwrap();
            for v in 0..3 {
                assert!(last.labels_after[v].k.is_zero());
            }
            // R_v = p0^v + sum_j p_j^v
            for v in 0..3 {
                let mut sum = tr.dealer.unwrap().p0[v];
                for h in &tr.hops {
                    sum = sum.add(h.p[v]).unwrap();
                }
                assert_eq!(tr.results[v], sum);
            }
        }
    }

    #[test]
    fn honest_session_m_sweep_d31() {
        let d = pm(31);
        for m in 5..=10 {
            let params = SessionParams::new(d, 5, 10, m).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(m as u64);
            let deal = classical_phase(&params, &mut rng).unwrap();
            let tr =
                run_honest_session(&params, d.element(17), d.element(9), &deal, &mut rng).unwrap();
            assert_eq!(tr.verdict, Verdict::Accepted);
            assert_eq!(tr.recovered[0].value(), 17);
            assert_eq!(tr.recovered[1].value(), 9);
        }
    }

    #[test]
    fn final_state_matches_accumulated_phase_form() {
        // final amplitude j must be w^{sum_r (j p_r + j^2 q_r)} / sqrt d
        let d = pm(7);
        let space = QuditSpace::new(d);
        let params = SessionParams::new(d, 2, 3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let deal = classical_phase(&params, &mut rng).unwrap();
        let secrets = DealerSecrets::derive(d.element(4), d.element(6), deal.s).unwrap();
        let (mut states, mut labels) = dealer_prepare(&space, &secrets);
        let mut p_sums = [secrets.p0[0], secrets.p0[1], secrets.p0[2]];
        let mut q_sums = [secrets.q0[0], secrets.q0[1], secrets.q0[2]];
        for x in params.active_xs() {
            let i = params.all_xs().iter().position(|a| a == x).unwrap();
            let (next, hop) = participant_hop(
                &space, &states, &labels, deal.shares[i], params.active_xs(), &mut rng,
            )
            .unwrap();
            states = next;
            labels = hop.labels_after;
            for v in 0..3 {
                p_sums[v] = p_sums[v].add(hop.p[v]).unwrap();
                q_sums[v] = q_sums[v].add(hop.q).unwrap();
            }
        }
        let norm = 1.0 / 7f64.sqrt();
        for v in 0..3 {
            for (j, amp) in states[v].amplitudes().iter().enumerate() {
                let j = j as u64;
                let e = (j * p_sums[v].value() + j * j * q_sums[v].value()) % 7;
                let expect = num_complex::Complex64::from_polar(
                    norm,
                    2.0 * std::f64::consts::PI * e as f64 / 7.0,
                );
                assert!((amp - expect).norm() < 1e-9, "v={v} j={j}");
            }
        }
    }

    #[test]
    fn line_permutation_is_honest_knob() {
        let d = pm(11);
        let all: Vec<_> = (1..=5u64).map(|x| d.element(x)).collect();
        let line = vec![d.element(4), d.element(1), d.element(3)];
        let params = SessionParams::with_line(d, 2, all, line).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let deal = classical_phase(&params, &mut rng).unwrap();
        let tr = run_honest_session(&params, d.element(5), d.element(8), &deal, &mut rng).unwrap();
        assert_eq!(tr.verdict, Verdict::Accepted);
        assert_eq!(tr.recovered[0].value(), 5);
    }

    #[test]
    fn recover_examples() {
        let d = pm(7);
        let r = [d.element(5), d.element(0), d.element(0)];
        let exchanged = vec![[d.element(2), d.element(0), d.element(0)]];
        let rec = recover(r, &exchanged, 1).unwrap();
        assert_eq!(rec[0], d.element(3));
        assert!(matches!(
            recover(r, &exchanged, 2),
            Err(ProtocolError::MissingRandoms { expected: 2, got: 1 })
        ));
        // all randoms zero
        let rec = recover(r, &[[d.element(0); 3]], 1).unwrap();
        assert_eq!(rec[0], d.element(5));
    }

    #[test]
    fn verify_examples() {
        let d = pm(7);
        let fe = |v| d.element(v);
        assert_eq!(verify([fe(6), fe(3), fe(2)]), Verdict::Accepted);
        assert_eq!(verify([fe(5), fe(3), fe(2)]), Verdict::Rejected);
        assert_eq!(verify([fe(0), fe(0), fe(4)]), Verdict::Accepted);
    }

    #[test]
    fn params_validation() {
        let d = pm(7);
        assert!(matches!(
            SessionParams::new(d, 3, 4, 2),
            Err(ProtocolError::BadShape { .. })
        ));
        assert!(SessionParams::new(d, 2, 7, 3).is_err()); // n >= d
        assert!(SessionParams::new(d, 2, 4, 3).is_ok());
    }

    #[test]
    fn malformed_ordering_rejected() {
        let d = pm(7);
        let params = SessionParams::new(d, 1, 1, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let deal = classical_phase(&params, &mut rng).unwrap();
        let mut tr =
            run_honest_session(&params, d.element(2), d.element(5), &deal, &mut rng).unwrap();
        assert!(tr.validate().is_ok());
        tr.results_published_first = false;
        assert!(matches!(tr.validate(), Err(ProtocolError::ExchangeBeforePublish)));
    }

    #[test]
    fn share_reuse_across_sessions() {
        let d = pm(11);
        let params = SessionParams::new(d, 2, 3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let deal = classical_phase(&params, &mut rng).unwrap();
        let t1 = run_honest_session(&params, d.element(4), d.element(7), &deal, &mut rng).unwrap();
        let t2 = run_honest_session(&params, d.element(4), d.element(7), &deal, &mut rng).unwrap();
        assert_eq!(t1.verdict, Verdict::Accepted);
        assert_eq!(t2.verdict, Verdict::Accepted);
        // fresh masks: published values differ between sessions
        assert_ne!(t1.exchanged, t2.exchanged);
    }

    #[test]
    fn export_hides_secrets_by_default() {
        let d = pm(7);
        let params = SessionParams::new(d, 1, 2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let deal = classical_phase(&params, &mut rng).unwrap();
        let tr = run_honest_session(&params, d.element(1), d.element(2), &deal, &mut rng).unwrap();
        let public = serde_json::to_string(&tr.export(false)).unwrap();
        assert!(!public.contains("secrets"));
        let fixture = tr.export(true);
        assert_eq!(fixture.secrets, Some([1, 2, tr.dealer.unwrap().check.value()]));
    }
}

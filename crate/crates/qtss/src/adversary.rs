//! Attack strategies plugged into the session pipeline, with Monte Carlo
//! estimation of detection and leak rates and exact exhaustive enumeration
//! at small d.
//!
//! Detection events are exactly the verification-rejected transcripts; no
//! other signal is consulted. Trials are independent: trial i draws its rng
//! stream from splitmix64(master_seed, i), so a report is reproducible and
//! earlier trials are unaffected by raising the trial count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::gf::FieldElement;
use crate::protocol::{
    classical_phase, dealer_prepare, final_measure, recover, verify, DealerSecrets,
    ProtocolError, SessionParams, Verdict,
};
use crate::qudit::{MubLabel, QuditSpace};
use crate::sss;

/// splitmix64 finalizer over (seed, trial); the documented fan-out rule.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut z = seed.wrapping_add((trial.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    ChaCha8Rng::seed_from_u64(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackStrategy {
    /// Eve measures all three qudits in a uniformly guessed basis at a hop
    /// boundary and resends the collapsed states.
    InterceptResend { position: usize },
    /// A participant substitutes a uniform wrong value for its component.
    FakeShareParticipant { cheater_index: usize },
    /// Bob_m measures honestly but publishes a uniformly wrong triple.
    LyingMeasurer,
    /// The three qudits are swapped for fresh uniformly-labeled MUB states;
    /// separable-state stand-in for the entanglement-swapping joint attack.
    StateReplacement { position: usize },
}

impl AttackStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            AttackStrategy::InterceptResend { .. } => "intercept-resend",
            AttackStrategy::FakeShareParticipant { .. } => "fake-share",
            AttackStrategy::LyingMeasurer => "lying-measurer",
            AttackStrategy::StateReplacement { .. } => "state-replacement",
        }
    }
}

/// Per-strategy Monte Carlo statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttackReport {
    pub strategy: String,
    pub d: u64,
    pub t: usize,
    pub n: usize,
    pub m: usize,
    pub trials: u64,
    pub detected: u64,
    pub undetected_wrong_secret: u64,
    pub attacker_learned_secret: u64,
    pub detection_rate: f64,
    pub ci95: [f64; 2],
    pub prediction: f64,
    pub seed: u64,
    /// state-disturbed count (wrong-basis interception); intercept-resend only
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disturbed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disturbance_prediction: Option<f64>,
}

/// Normal-approximation 95% binomial interval, clamped to [0, 1].
pub fn binomial_ci95(successes: u64, trials: u64) -> [f64; 2] {
    if trials == 0 {
        return [0.0, 1.0];
    }
    let p = successes as f64 / trials as f64;
    let half = 1.96 * (p * (1.0 - p) / trials as f64).sqrt();
    [(p - half).max(0.0), (p + half).min(1.0)]
}

/// What one attacked session produced.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub verdict: Verdict,
    pub wrong_secret: bool,
    pub attacker_learned: bool,
    pub disturbed: bool,
    pub results: [FieldElement; 3],
    pub exchanged: Vec<[FieldElement; 3]>,
    pub recovered: [FieldElement; 3],
}

pub fn run_attacked_session<R: Rng + ?Sized>(
    params: &SessionParams,
    s1: FieldElement,
    s2: FieldElement,
    strategy: AttackStrategy,
    rng: &mut R,
) -> Result<TrialOutcome, ProtocolError> {
    let d = params.d();
    let space = QuditSpace::new(d);
    let deal = classical_phase(params, rng)?;
    let secrets = DealerSecrets::derive(s1, s2, deal.s)?;
    let (mut states, _) = dealer_prepare(&space, &secrets);

    // exact symbolic track of the basis index of the (untampered) qudits;
    // the three qudits share it because every q is common across v
    let mut true_k = secrets.q0[0];
    let mut attacker_learned = false;
    let mut disturbed = false;

    let m = params.m();
    let mut exchanged: Vec<[FieldElement; 3]> = Vec::with_capacity(m);

    for j in 0..m {
        // eavesdropper strikes on the channel into participant j
        match strategy {
            AttackStrategy::InterceptResend { position } if position == j => {
                let guess = d.element(rng.random_range(0..d.d()));
                if guess == true_k {
                    // correct basis: collapse is onto the current eigenstates
                    attacker_learned = true;
                } else {
                    disturbed = true;
                }
                states = std::array::from_fn(|v| {
                    let (_, post) = space.measure_in_basis(&states[v], guess, rng);
                    post
                });
            }
            AttackStrategy::StateReplacement { position } if position == j => {
                states = std::array::from_fn(|_| {
                    let l = d.element(rng.random_range(0..d.d()));
                    let k = d.element(rng.random_range(0..d.d()));
                    space.mub_vector(MubLabel::new(l, k))
                });
            }
            _ => {}
        }

        let x = params.active_xs()[j];
        let share = deal.shares[params.all_xs().iter().position(|a| *a == x).unwrap()];
        let honest_q = sss::component(share, params.active_xs())?.value;
        let q = match strategy {
            AttackStrategy::FakeShareParticipant { cheater_index } if cheater_index == j => {
                // uniform over GF(d) \ {c_j}: never degenerates to honest
                loop {
                    let c = d.element(rng.random_range(0..d.d()));
                    if c != honest_q {
                        break c;
                    }
                }
            }
            _ => honest_q,
        };
        let p: [FieldElement; 3] = std::array::from_fn(|_| d.element(rng.random_range(0..d.d())));
        states = std::array::from_fn(|v| space.apply_unitary(&states[v], p[v], q));
        true_k = true_k.add(honest_q)?;
        exchanged.push(p);
    }

    let results = final_measure(&space, &states, rng);
    let published = match strategy {
        AttackStrategy::LyingMeasurer => loop {
            let r: [FieldElement; 3] =
                std::array::from_fn(|_| d.element(rng.random_range(0..d.d())));
            if r != results {
                break r;
            }
        },
        _ => results,
    };

    let recovered = recover(published, &exchanged, m)?;
    let verdict = verify(recovered);
    let wrong_secret = recovered[0] != s1 || recovered[1] != s2;

    if let AttackStrategy::FakeShareParticipant { .. } = strategy {
        // the cheater recovers the same triple as everyone else
        attacker_learned = !wrong_secret;
    }

    Ok(TrialOutcome {
        verdict,
        wrong_secret,
        attacker_learned,
        disturbed,
        results: published,
        exchanged,
        recovered,
    })
}

fn run_trials(
    params: &SessionParams,
    s1: FieldElement,
    s2: FieldElement,
    strategy: AttackStrategy,
    trials: u64,
    seed: u64,
    prediction: f64,
) -> Result<AttackReport, ProtocolError> {
    let mut detected = 0u64;
    let mut undetected_wrong = 0u64;
    let mut learned = 0u64;
    let mut disturbed = 0u64;
    for i in 0..trials {
        let mut rng = trial_rng(seed, i);
        let out = run_attacked_session(params, s1, s2, strategy, &mut rng)?;
        match out.verdict {
            Verdict::Rejected => detected += 1,
            Verdict::Accepted if out.wrong_secret => undetected_wrong += 1,
            Verdict::Accepted => {}
        }
        if out.attacker_learned {
            learned += 1;
        }
        if out.disturbed {
            disturbed += 1;
        }
    }
    let d = params.d().d() as f64;
    let is_intercept = matches!(strategy, AttackStrategy::InterceptResend { .. });
    Ok(AttackReport {
        strategy: strategy.name().to_string(),
        d: params.d().d(),
        t: params.t(),
        n: params.n(),
        m: params.m(),
        trials,
        detected,
        undetected_wrong_secret: undetected_wrong,
        attacker_learned_secret: learned,
        detection_rate: detected as f64 / trials as f64,
        ci95: binomial_ci95(detected, trials),
        prediction,
        seed,
        disturbed: is_intercept.then_some(disturbed),
        disturbance_prediction: is_intercept.then_some((d - 1.0) / d),
    })
}

pub fn run_intercept_resend(
    params: &SessionParams,
    s1: FieldElement,
    s2: FieldElement,
    position: usize,
    trials: u64,
    seed: u64,
) -> Result<AttackReport, ProtocolError> {
    let d = params.d().d() as f64;
    // wrong basis AND the corrupted triple still failing the check equation
    let prediction = ((d - 1.0) / d) * ((d - 1.0) / d);
    run_trials(
        params,
        s1,
        s2,
        AttackStrategy::InterceptResend { position },
        trials,
        seed,
        prediction,
    )
}

pub fn run_fake_share(
    params: &SessionParams,
    s1: FieldElement,
    s2: FieldElement,
    cheater_index: usize,
    trials: u64,
    seed: u64,
) -> Result<AttackReport, ProtocolError> {
    let d = params.d().d() as f64;
    run_trials(
        params,
        s1,
        s2,
        AttackStrategy::FakeShareParticipant { cheater_index },
        trials,
        seed,
        (d - 1.0) / d,
    )
}

pub fn run_lying_measurer(
    params: &SessionParams,
    s1: FieldElement,
    s2: FieldElement,
    trials: u64,
    seed: u64,
) -> Result<AttackReport, ProtocolError> {
    let d = params.d().d() as f64;
    run_trials(
        params,
        s1,
        s2,
        AttackStrategy::LyingMeasurer,
        trials,
        seed,
        (d - 1.0) / d,
    )
}

pub fn run_state_replacement(
    params: &SessionParams,
    s1: FieldElement,
    s2: FieldElement,
    position: usize,
    trials: u64,
    seed: u64,
) -> Result<AttackReport, ProtocolError> {
    let d = params.d().d() as f64;
    run_trials(
        params,
        s1,
        s2,
        AttackStrategy::StateReplacement { position },
        trials,
        seed,
        (d - 1.0) / d,
    )
}

// --- exhaustive enumeration ------------------------------------------------

/// Exact branch counts for one strategy at small d: every random choice of
/// the attacker and every measurement branch is enumerated with integer
/// weights, and verdicts come from the same `recover` + `verify` path the
/// simulator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExhaustiveRates {
    pub detected: u128,
    pub attacker_learned: u128,
    pub total: u128,
}

impl ExhaustiveRates {
    pub fn detection_rate(&self) -> f64 {
        self.detected as f64 / self.total as f64
    }

    /// detected / total == num / den, exactly.
    pub fn detection_equals(&self, num: u128, den: u128) -> bool {
        self.detected * den == num * self.total
    }
}

fn verdict_of(recovered: [FieldElement; 3]) -> Verdict {
    verify(recovered)
}

/// All Eve basis guesses x all final measurement branches. Exchanged randoms
/// are fixed to zero: the verdict count over uniform results is invariant
/// under the shift they introduce.
pub fn exhaustive_intercept_resend(secrets: &DealerSecrets) -> ExhaustiveRates {
    let d = secrets.s1.modulus();
    let dv = d.d();
    let mut detected = 0u128;
    let mut learned = 0u128;
    // Eve guesses the true basis: states are undisturbed, measurement is the
    // honest deterministic one. One guess out of d; weight d^3 to match the
    // R-branch fan-out of the wrong guesses.
    let honest = verdict_of(secrets.p0);
    debug_assert_eq!(honest, Verdict::Accepted);
    learned += (dv as u128).pow(3);
    // wrong guess: each R_v is an equally weighted branch
    for _wrong_guess in 1..dv {
        for r1 in 0..dv {
            for r2 in 0..dv {
                for r3 in 0..dv {
                    let rec = [d.element(r1), d.element(r2), d.element(r3)];
                    if verdict_of(rec) == Verdict::Rejected {
                        detected += 1;
                    }
                }
            }
        }
    }
    ExhaustiveRates {
        detected,
        attacker_learned: learned,
        total: (dv as u128) * (dv as u128).pow(3),
    }
}

/// All wrong components x all final measurement branches.
pub fn exhaustive_fake_share(secrets: &DealerSecrets) -> ExhaustiveRates {
    let d = secrets.s1.modulus();
    let dv = d.d();
    let mut detected = 0u128;
    let mut learned = 0u128;
    for _wrong_component in 1..dv {
        for r1 in 0..dv {
            for r2 in 0..dv {
                for r3 in 0..dv {
                    let rec = [d.element(r1), d.element(r2), d.element(r3)];
                    if verdict_of(rec) == Verdict::Rejected {
                        detected += 1;
                    } else if rec[0] == secrets.s1 && rec[1] == secrets.s2 {
                        learned += 1;
                    }
                }
            }
        }
    }
    ExhaustiveRates {
        detected,
        attacker_learned: learned,
        total: (dv as u128 - 1) * (dv as u128).pow(3),
    }
}

/// All d^3 published triples, honest one included: exactly d^2 of them pass
/// the check equation.
pub fn exhaustive_lying_measurer(secrets: &DealerSecrets) -> ExhaustiveRates {
    let d = secrets.s1.modulus();
    let dv = d.d();
    let mut detected = 0u128;
    for r1 in 0..dv {
        for r2 in 0..dv {
            for r3 in 0..dv {
                // zero exchanged randoms: recovered = published
                let rec = [d.element(r1), d.element(r2), d.element(r3)];
                if verdict_of(rec) == Verdict::Rejected {
                    detected += 1;
                }
            }
        }
    }
    ExhaustiveRates {
        detected,
        attacker_learned: 0,
        total: (dv as u128).pow(3),
    }
}

/// All per-qudit replacement labels x all measurement branches. A qudit whose
/// replacement basis matches the live one carries its replacement vector
/// index deterministically; otherwise its result is a uniform branch.
pub fn exhaustive_state_replacement(secrets: &DealerSecrets) -> ExhaustiveRates {
    let d = secrets.s1.modulus();
    let dv = d.d();
    let mut detected = 0u128;
    // per qudit: delta-k (basis offset), delta-l (index offset), r (branch
    // used when the basis is off); all uniform
    let per_qudit: Vec<Vec<FieldElement>> = (0..3)
        .map(|v| {
            let mut outcomes = Vec::with_capacity((dv * dv * dv) as usize);
            for dk in 0..dv {
                for dl in 0..dv {
                    for r in 0..dv {
                        let value = if dk == 0 {
                            secrets.p0[v].add(d.element(dl)).expect("same modulus")
                        } else {
                            d.element(r)
                        };
                        outcomes.push(value);
                    }
                }
            }
            outcomes
        })
        .collect();
    for &a in &per_qudit[0] {
        for &b in &per_qudit[1] {
            for &c in &per_qudit[2] {
                if verdict_of([a, b, c]) == Verdict::Rejected {
                    detected += 1;
                }
            }
        }
    }
    ExhaustiveRates {
        detected,
        attacker_learned: 0,
        total: (dv as u128).pow(9),
    }
}

// --- summary ---------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub strategy: String,
    pub d: u64,
    pub trials: u64,
    pub detection_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub prediction: f64,
}

pub fn detection_summary(reports: &[AttackReport]) -> Result<Vec<SummaryRow>, ProtocolError> {
    if reports.is_empty() {
        return Err(ProtocolError::EmptyReports);
    }
    Ok(reports
        .iter()
        .map(|r| SummaryRow {
            strategy: r.strategy.clone(),
            d: r.d,
            trials: r.trials,
            detection_rate: r.detection_rate,
            ci_low: r.ci95[0],
            ci_high: r.ci95[1],
            prediction: r.prediction,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::PrimeModulus;

    fn pm(d: u64) -> PrimeModulus {
        PrimeModulus::new(d).unwrap()
    }

    fn secrets(d: u64, s1: u64, s2: u64) -> DealerSecrets {
        let m = pm(d);
        DealerSecrets::derive(m.element(s1), m.element(s2), m.element(1)).unwrap()
    }

    #[test]
    fn exhaustive_intercept_d3() {
        let r = exhaustive_intercept_resend(&secrets(3, 2, 1));
        // wrong basis 2/3 of the time, then 18 of 27 triples fail the check
        assert!(r.detection_equals(4, 9), "{:?}", r);
        // learning = correct basis guess = 1/d
        assert_eq!(r.attacker_learned * 3, r.total);
    }

    #[test]
    fn exhaustive_fake_share_d3() {
        let r = exhaustive_fake_share(&secrets(3, 2, 2));
        assert!(r.detection_equals(2, 3), "{:?}", r);
    }

    #[test]
    fn exhaustive_lying_d3() {
        let r = exhaustive_lying_measurer(&secrets(3, 1, 2));
        // exactly d^2 of d^3 triples pass
        assert_eq!(r.total - r.detected, 9);
    }

    #[test]
    fn exhaustive_replacement_d3() {
        let r = exhaustive_state_replacement(&secrets(3, 2, 1));
        // recovered triple is uniform; detection collapses to (d-1)/d
        assert!(r.detection_equals(2, 3), "{:?}", r);
        assert_eq!(r.attacker_learned, 0);
    }

    #[test]
    fn trial_rng_is_stable_and_splittable() {
        let mut a = trial_rng(42, 0);
        let mut b = trial_rng(42, 0);
        let mut c = trial_rng(42, 1);
        let (xa, xb, xc): (u64, u64, u64) = (a.random(), b.random(), c.random());
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn fake_share_detection_rate_small_run() {
        let d = pm(7);
        let params = SessionParams::new(d, 2, 4, 3).unwrap();
        let report =
            run_fake_share(&params, d.element(6), d.element(3), 1, 2_000, 11).unwrap();
        // (d-1)/d = 0.857; generous band for 2000 trials
        assert!((report.detection_rate - 6.0 / 7.0).abs() < 0.03, "{report:?}");
        assert_eq!(report.detected + report.undetected_wrong_secret
            + (report.trials - report.detected - report.undetected_wrong_secret),
            report.trials);
    }

    #[test]
    fn lying_measurer_undetected_rate_small_run() {
        let d = pm(7);
        let params = SessionParams::new(d, 2, 4, 3).unwrap();
        let report = run_lying_measurer(&params, d.element(5), d.element(2), 2_000, 3).unwrap();
        let undetected = report.undetected_wrong_secret as f64 / report.trials as f64;
        assert!((undetected - 1.0 / 7.0).abs() < 0.03, "{report:?}");
    }

    #[test]
    fn intercept_correct_basis_is_harmless() {
        // position 0, d=3: over many trials the correct-guess subset must all
        // be accepted with correct secrets
        let d = pm(3);
        let params = SessionParams::new(d, 1, 2, 1).unwrap();
        let report = run_intercept_resend(&params, d.element(2), d.element(1), 0, 500, 5).unwrap();
        // learned (correct guess) + disturbed partition the trials
        assert_eq!(report.attacker_learned_secret + report.disturbed.unwrap(), report.trials);
        // every detection must come from a disturbed trial
        assert!(report.detected <= report.disturbed.unwrap());
    }

    #[test]
    fn state_replacement_never_leaks() {
        let d = pm(5);
        let params = SessionParams::new(d, 2, 3, 2).unwrap();
        let report =
            run_state_replacement(&params, d.element(3), d.element(4), 0, 500, 8).unwrap();
        assert_eq!(report.attacker_learned_secret, 0);
    }

    #[test]
    fn summary_rows() {
        let d = pm(7);
        let params = SessionParams::new(d, 1, 1, 1).unwrap();
        let r = run_lying_measurer(&params, d.element(1), d.element(1), 100, 1).unwrap();
        let rows = detection_summary(&[r.clone()]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].prediction, 6.0 / 7.0);
        assert!(detection_summary(&[]).is_err());
    }
}

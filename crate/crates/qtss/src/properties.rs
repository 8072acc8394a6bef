//! Named property checks shared by the CLI `properties` subcommand and the
//! acceptance suite. Each check returns Ok or a human-readable failure.

use crate::gf::PrimeModulus;
use crate::qudit::{inner_product, MubLabel, QuditSpace, TOL};
use crate::sss;

pub type CheckResult = Result<(), String>;

/// Eq-style orthonormality within each basis and |overlap|^2 = 1/d across
/// bases, to 1e-9. `perturb` poisons one amplitude; negative-control hook.
pub fn mub_orthonormality_unbiasedness(d: PrimeModulus, perturb: bool) -> CheckResult {
    let space = QuditSpace::new(d);
    let dv = d.d();
    for k in 0..dv {
        for l in 0..dv {
            let mut v = space.mub_vector(MubLabel::new(d.element(l), d.element(k)));
            if perturb && k == 0 && l == 0 {
                let mut amps = v.amplitudes().to_vec();
                amps[0] += 1e-3;
                v = crate::qudit::QuditState::from_raw(amps);
            }
            for k2 in 0..dv {
                for l2 in 0..dv {
                    let u = space.mub_vector(MubLabel::new(d.element(l2), d.element(k2)));
                    let overlap = inner_product(&v, &u).map_err(|e| e.to_string())?;
                    let expect = if k == k2 {
                        if l == l2 { 1.0 } else { 0.0 }
                    } else {
                        1.0 / dv as f64
                    };
                    let got = if k == k2 { overlap.norm() } else { overlap.norm_sqr() };
                    if (got - expect).abs() >= TOL {
                        return Err(format!(
                            "d={dv}: overlap of ({l},{k}) with ({l2},{k2}) is {got}, expected {expect}"
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Exhaustive d=5 check that the unitary and the label tracker agree
/// componentwise through `mub_vector`, and that composition commutes.
pub fn cyclic_equivalence_exhaustive_d5() -> CheckResult {
    let d = PrimeModulus::new(5).expect("5 is prime");
    let space = QuditSpace::new(d);
    for l in 0..5u64 {
        for k in 0..5u64 {
            let lab = MubLabel::new(d.element(l), d.element(k));
            for p in 0..5u64 {
                for q in 0..5u64 {
                    let (pe, qe) = (d.element(p), d.element(q));
                    let numeric = space.apply_unitary(&space.mub_vector(lab), pe, qe);
                    let symbolic = space.mub_vector(lab.shifted(pe, qe));
                    for (a, b) in numeric.amplitudes().iter().zip(symbolic.amplitudes()) {
                        if (a - b).norm() >= TOL {
                            return Err(format!(
                                "label ({l},{k}) exponent ({p},{q}): {a} vs {b}"
                            ));
                        }
                    }
                    if (numeric.norm_sq() - 1.0).abs() >= 1e-12 {
                        return Err(format!("norm drift at ({l},{k})+({p},{q})"));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Composition and commutation of the diagonal unitaries: applying
/// (p1, q1) then (p2, q2) equals applying (p1+p2, q1+q2), either order,
/// exhaustively at d=3.
pub fn unitary_composition_exhaustive_d3() -> CheckResult {
    let d = PrimeModulus::new(3).expect("3 is prime");
    let space = QuditSpace::new(d);
    let start = space.mub_vector(MubLabel::new(d.element(1), d.element(2)));
    for p1 in 0..3u64 {
        for q1 in 0..3u64 {
            for p2 in 0..3u64 {
                for q2 in 0..3u64 {
                    let a = space.apply_unitary(
                        &space.apply_unitary(&start, d.element(p1), d.element(q1)),
                        d.element(p2),
                        d.element(q2),
                    );
                    let b = space.apply_unitary(
                        &space.apply_unitary(&start, d.element(p2), d.element(q2)),
                        d.element(p1),
                        d.element(q1),
                    );
                    let c = space.apply_unitary(
                        &start,
                        d.element((p1 + p2) % 3),
                        d.element((q1 + q2) % 3),
                    );
                    for v in [&a, &b] {
                        for (x, y) in v.amplitudes().iter().zip(c.amplitudes()) {
                            if (x - y).norm() >= TOL {
                                return Err(format!(
                                    "composition mismatch at ({p1},{q1})+({p2},{q2})"
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Exhaustive census: conditional distribution of the secret given any
/// t-1 = 2 shares at d=5 is exactly flat (integer equality).
pub fn secrecy_census_uniform(d: PrimeModulus, t: usize) -> CheckResult {
    let dv = d.d();
    // fix t-1 shares of an arbitrary polynomial at x = 1..t-1
    let coeffs: Vec<_> = (0..t as u64).map(|i| d.element(2 * i + 1)).collect();
    let poly = sss::Polynomial::new(coeffs);
    for fixed_count in 0..t {
        let fixed: Vec<sss::Share> = (1..=fixed_count as u64)
            .map(|x| {
                let xe = d.element(x);
                sss::Share { x: xe, y: poly.eval(xe).expect("same modulus") }
            })
            .collect();
        let hist = sss::secrecy_census(d, t, &fixed).map_err(|e| e.to_string())?;
        let expect = dv.pow((t - 1 - fixed_count) as u32);
        if hist.iter().any(|&c| c != expect) {
            return Err(format!(
                "census d={dv} t={t} with {fixed_count} fixed shares not uniform: {hist:?}"
            ));
        }
    }
    Ok(())
}

/// Run every property for the given d list; returns (name, result) pairs.
pub fn run_all(ds: &[u64], perturb: bool) -> Vec<(String, CheckResult)> {
    let mut out = Vec::new();
    for &dv in ds {
        let name = format!("mub-orthonormality-unbiasedness d={dv}");
        let res = match PrimeModulus::new(dv) {
            Ok(d) => mub_orthonormality_unbiasedness(d, perturb),
            Err(e) => Err(e.to_string()),
        };
        out.push((name, res));
    }
    out.push((
        "unitary-composition exhaustive d=3".into(),
        unitary_composition_exhaustive_d3(),
    ));
    out.push((
        "cyclic-equivalence exhaustive d=5".into(),
        cyclic_equivalence_exhaustive_d5(),
    ));
    out.push((
        "secrecy-census uniform d=5 t=3".into(),
        PrimeModulus::new(5)
            .map_err(|e| e.to_string())
            .and_then(|d| secrecy_census_uniform(d, 3)),
    ));
    out
}

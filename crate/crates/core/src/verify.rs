//! The property suite behind `telepsim verify` and the acceptance tests.
//!
//! Each check is deterministic in its seed and reports a one-line detail.
//! Wall-clock limits are left to the caller so reports stay byte-stable.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, DiscreteCDF, Poisson};

use crate::bell::{expectation, state_of, weight2_nonstabilizers};
use crate::circuits::{
    pcliff_distribution, pcliff_statevector_distribution, pcliff_support, statevector_distribution, telep_distribution,
    telep_support, CorrectionTable, PCliffInstance, TelepInstance, TelepOutcome,
};
use crate::group::clifford::pauli_matrix;
use crate::group::{matrix, product_of_sequence, Clifford1, PauliLabel, SignedPauli2, CLIFFORD_ORDER};
use crate::hashing::StableHasher;
use crate::lightcone::{random_local, select_embedding_params, LocalCircuitSpec, Window, TELEP_K, TELEP_R};
use crate::oracle::{
    falsify_simulator, AdversarialPcliff, ConstantTelep, HonestPcliff, HonestTelep, PcliffOracle, SampledTelep,
    TelepOracle,
};
use crate::reduction::{
    commuting_identity_gap, compute_q_correction, EmbeddingParams, ReductionOracle, IDENTITY_TOLERANCE,
};
use crate::tomography::{
    failure_bound, learn_nonstabilizer, learn_stabilizer_pair, magic_square, sign_assignment_exists,
    uniform_nonstabilizer, Line,
};
use crate::word_problems::{solve_mod3, solve_parity};

/// `Ok(detail)` on pass, `Err(detail)` on failure.
pub type CheckResult = std::result::Result<String, String>;

pub struct Check {
    pub id: u8,
    pub name: &'static str,
    /// Wall-clock budget in seconds.
    pub time_limit: u64,
    pub run: fn(u64) -> CheckResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub all_passed: bool,
    pub checks: Vec<CheckReport>,
}

pub fn checks() -> Vec<Check> {
    vec![
        Check {
            id: 1,
            name: "group exactness",
            time_limit: 1,
            run: group_exactness,
        },
        Check {
            id: 2,
            name: "born-rule consistency",
            time_limit: 30,
            run: born_rule,
        },
        Check {
            id: 3,
            name: "commuting identity",
            time_limit: 30,
            run: commuting_identity,
        },
        Check {
            id: 4,
            name: "reduction soundness",
            time_limit: 60,
            run: reduction_soundness,
        },
        Check {
            id: 5,
            name: "lightcone counting",
            time_limit: 60,
            run: lightcone_counting,
        },
        Check {
            id: 6,
            name: "magic square",
            time_limit: 1,
            run: magic_square_facts,
        },
        Check {
            id: 7,
            name: "adversarial non-stabilizer learning",
            time_limit: 60,
            run: adversarial_nonstabilizer,
        },
        Check {
            id: 8,
            name: "uniformity",
            time_limit: 120,
            run: uniformity,
        },
        Check {
            id: 9,
            name: "stabilizer-pair learning",
            time_limit: 120,
            run: stabilizer_pairs,
        },
        Check {
            id: 10,
            name: "parity and mod 3",
            time_limit: 120,
            run: word_problems,
        },
        Check {
            id: 11,
            name: "falsifier",
            time_limit: 30,
            run: falsifier,
        },
    ]
}

pub fn run_check(check: &Check, seed: u64) -> CheckReport {
    let (passed, detail) = match (check.run)(seed) {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckReport {
        id: check.id,
        name: check.name,
        passed,
        detail,
    }
}

pub fn run_all(seed: u64) -> VerifyReport {
    let checks: Vec<CheckReport> = checks().iter().map(|c| run_check(c, seed)).collect();
    VerifyReport {
        seed,
        all_passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn rng_for(seed: u64, id: u64) -> ChaCha8Rng {
    StableHasher::new(seed).word(0x7665_7269).word(id).rng()
}

fn random_seq<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<Clifford1> {
    (0..len).map(|_| Clifford1::random(rng)).collect()
}

/// A random sequence of length `len` whose product is `target`.
fn seq_with_product<R: Rng + ?Sized>(rng: &mut R, len: usize, target: Clifford1) -> Vec<Clifford1> {
    let mut seq = random_seq(rng, len - 1);
    let prefix = product_of_sequence(&seq);
    seq.push(target.compose(prefix.inverse()));
    seq
}

fn random_label<R: Rng + ?Sized>(rng: &mut R) -> PauliLabel {
    PauliLabel::from_code(rng.random_range(0..4)).expect("< 4")
}

fn lib<T>(r: crate::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn group_exactness(_seed: u64) -> CheckResult {
    let all: Vec<Clifford1> = Clifford1::all().collect();
    let id = Clifford1::identity();
    let mut codes: Vec<u8> = all.iter().map(|c| c.code()).collect();
    codes.dedup();
    ensure(codes.len() == CLIFFORD_ORDER, || {
        format!("{} distinct elements", codes.len())
    })?;
    for &a in &all {
        ensure(a.compose(id) == a && id.compose(a) == a, || {
            format!("identity fails on {a}")
        })?;
        ensure(a.compose(a.inverse()) == id && a.inverse().compose(a) == id, || {
            format!("inverse fails on {a}")
        })?;
    }
    let mut pairs = 0;
    for &a in &all {
        for &b in &all {
            let ab = a.compose(b);
            ensure(ab.quotient_s3() == a.quotient_s3().compose(b.quotient_s3()), || {
                format!("quotient not multiplicative at ({a}, {b})")
            })?;
            let m = matrix::mul(&a.matrix(), &b.matrix());
            ensure(matrix::proportionality(&ab.matrix(), &m, 1e-12).is_some(), || {
                format!("tableau and matrix products differ at ({a}, {b})")
            })?;
            for (p, img) in [(PauliLabel::X, ab.image_of_x()), (PauliLabel::Z, ab.image_of_z())] {
                let conj = matrix::mul(&matrix::mul(&m, &pauli_matrix(p)), &matrix::adjoint(&m));
                let sign = f64::from(img.sign().ok_or_else(|| format!("non-Hermitian image under {ab}"))?);
                let expect = matrix::scale(&pauli_matrix(img.label()), sign.into());
                ensure(matrix::max_abs_diff(&conj, &expect) < 1e-12, || {
                    format!("conjugation of {p} disagrees at ({a}, {b})")
                })?;
            }
            pairs += 1;
        }
    }
    Ok(format!("24 elements, {pairs} products exact"))
}

fn born_rule(seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 2);
    let tol = 1e-9;
    for n in 1..=4 {
        for _ in 0..100 {
            let inst = lib(TelepInstance::new(random_seq(&mut rng, n)))?;
            let exact = lib(telep_distribution(&inst))?;
            let sv = lib(statevector_distribution(&inst))?;
            let gap = exact.iter().zip(&sv).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            ensure(gap < tol, || {
                format!("telep gap {gap:e} on {:?}", inst.codes().collect::<Vec<_>>())
            })?;
            let total: f64 = exact.iter().sum();
            ensure((total - 1.0).abs() < tol, || format!("telep total {total}"))?;
        }
    }
    for _ in 0..1000 {
        let l = rng.random_range(1..=3);
        let inst = lib(PCliffInstance::new(
            random_seq(&mut rng, l),
            Clifford1::random(&mut rng),
        ))?;
        let mut table = CorrectionTable::new(l);
        lib(table.insert(&inst.cliffords, random_label(&mut rng)))?;
        for _ in 0..4 {
            lib(table.insert(&random_seq(&mut rng, l), random_label(&mut rng)))?;
        }
        let exact = pcliff_distribution(&table, &inst);
        let sv = pcliff_statevector_distribution(&table, &inst);
        let gap = exact.iter().zip(&sv).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure(gap < tol, || format!("pcliff gap {gap:e}"))?;
        let total: f64 = exact.iter().sum();
        ensure((total - 1.0).abs() < tol, || format!("pcliff total {total}"))?;
    }
    Ok("400 telep instances (n ≤ 4) and 1000 pcliff pairs agree within 1e-9".into())
}

fn random_identity_case<R: Rng + ?Sized>(
    rng: &mut R,
) -> std::result::Result<(EmbeddingParams, TelepOutcome, Vec<Clifford1>, Clifford1), String> {
    let n = rng.random_range(2..=8);
    let l = rng.random_range(1..n);
    let m = rng.random_range(l..n);
    let j: Vec<usize> = (l..n).filter(|_| rng.random_bool(0.5)).collect();
    let params = lib(EmbeddingParams::new(n, l, m, j))?;
    let out = TelepOutcome::new((0..n).map(|_| random_label(rng)).collect());
    Ok((params, out, random_seq(rng, l), Clifford1::random(rng)))
}

fn commuting_identity(seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 3);
    let mut worst: f64 = 0.0;
    let mut broken = 0;
    for _ in 0..1000 {
        let (params, out, cl, d) = random_identity_case(&mut rng)?;
        let gap = lib(commuting_identity_gap(&params, &out, &cl, d, None))?;
        worst = worst.max(gap);
        ensure(gap < IDENTITY_TOLERANCE, || {
            format!("gap {gap:e} at {params:?}, outcome {out}")
        })?;
        let q = lib(compute_q_correction(&params, &out, &cl))?;
        let corrupted = random_label(&mut rng).times(q).times(PauliLabel::X);
        if lib(commuting_identity_gap(&params, &out, &cl, d, Some(corrupted)))? > IDENTITY_TOLERANCE {
            broken += 1;
        }
    }
    ensure(broken > 0, || "corrupted Q never broke the identity".into())?;
    Ok(format!(
        "1000 tuples, max gap {worst:.1e}; corrupted Q broke {broken}/1000"
    ))
}

fn check_reduction(
    oracle: Arc<dyn TelepOracle>,
    params: EmbeddingParams,
    inst: &PCliffInstance,
) -> std::result::Result<(), String> {
    let red = ReductionOracle::new(oracle, params);
    let p = lib(red.query(inst))?;
    let q = red.correction().expect("reduction oracles expose their correction");
    // evaluating the induced Q at this tuple is its table entry
    let mut table = CorrectionTable::new(inst.len());
    lib(table.insert(&inst.cliffords, q.correction(&inst.cliffords)))?;
    ensure(pcliff_support(&table, inst, p), || {
        format!("{} answered {p} outside the support", red.name())
    })
}

fn reduction_soundness(seed: u64) -> CheckResult {
    let honest: Arc<dyn TelepOracle> = Arc::new(HonestTelep);
    let sampled: Arc<dyn TelepOracle> = Arc::new(SampledTelep { seed });
    let mut count = 0;
    for a in Clifford1::all() {
        for d in Clifford1::all() {
            let inst = lib(PCliffInstance::new(vec![a], d))?;
            check_reduction(honest.clone(), lib(EmbeddingParams::last_only(3, 1, 2))?, &inst)?;
            check_reduction(sampled.clone(), lib(EmbeddingParams::causal(4, 1, 2))?, &inst)?;
            count += 1;
        }
    }
    let mut rng = rng_for(seed, 4);
    for _ in 0..1000 {
        let inst = lib(PCliffInstance::new(
            random_seq(&mut rng, 4),
            Clifford1::random(&mut rng),
        ))?;
        check_reduction(honest.clone(), lib(EmbeddingParams::last_only(10, 4, 6))?, &inst)?;
        check_reduction(sampled.clone(), lib(EmbeddingParams::causal(10, 4, 6))?, &inst)?;
        count += 1;
    }
    Ok(format!(
        "{count} instances sound for the lexmin and sampled honest oracles"
    ))
}

fn lightcone_counting(seed: u64) -> CheckResult {
    let n = 4096;
    let mut min = (usize::MAX, usize::MAX, usize::MAX);
    for i in 0..100u64 {
        let ell = 1 + (i % 8) as usize;
        let c = random_local(LocalCircuitSpec {
            n,
            k: TELEP_K,
            r: TELEP_R,
            ell,
            hubs: 4,
            seed: StableHasher::new(seed).word(i).finish(),
        });
        let rep = c.report(Window::Counting);
        let tag = || format!("circuit {i} (ℓ={})", rep.locality);
        ensure(rep.locality <= 8, || format!("{}: locality above 8", tag()))?;
        ensure(4 * rep.good_upper >= n, || {
            format!("{}: {} good", tag(), rep.good_upper)
        })?;
        ensure(8 * rep.limited_signaling_upper >= 3 * n, || {
            format!("{}: {} limited signaling", tag(), rep.limited_signaling_upper)
        })?;
        ensure(8 * rep.both_upper >= n, || {
            format!("{}: {} in both", tag(), rep.both_upper)
        })?;
        min = (
            min.0.min(rep.good_upper),
            min.1.min(rep.limited_signaling_upper),
            min.2.min(rep.both_upper),
        );
        let params = lib(select_embedding_params(&c))?;
        ensure(params.m > n / 2, || format!("{}: m = {}", tag(), params.m))?;
        ensure(params.j == rep.forward[params.m], || {
            format!("{}: J is not L→(m)", tag())
        })?;
        ensure(params.j.len() <= 8 * rep.locality, || {
            format!("{}: |J| = {}", tag(), params.j.len())
        })?;
    }
    Ok(format!(
        "100 circuits, n = {n}: min good {}, limited {}, both {}",
        min.0, min.1, min.2
    ))
}

fn magic_square_facts(_seed: u64) -> CheckResult {
    let sq = magic_square();
    let minus = SignedPauli2::parse("-II").map_err(|e| e.to_string())?;
    let plus = SignedPauli2::parse("+II").map_err(|e| e.to_string())?;
    for line in Line::ALL {
        let want = match line {
            Line::Row(_) => minus,
            Line::Col(_) => plus,
        };
        let got = sq.line_product(line);
        ensure(got == want, || format!("{line} multiplies to {got}"))?;
    }
    ensure(!sign_assignment_exists(), || {
        "a consistent sign assignment exists".into()
    })?;
    Ok("rows multiply to -I, columns to +I; none of 512 sign tables fits".into())
}

fn adversarial_nonstabilizer(seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 7);
    let mut runs = 0;
    for target in Clifford1::all() {
        let state = state_of(target);
        for s in 0..1000u64 {
            let oracle = AdversarialPcliff::new(StableHasher::new(seed).word(s).finish());
            let seq = seq_with_product(&mut rng, 1 + (s % 4) as usize, target);
            let m = lib(learn_nonstabilizer(&oracle, &seq))?;
            ensure(expectation(&state, m) == 0, || {
                format!("{} returned {m} for product {target}", oracle.name())
            })?;
            runs += 1;
        }
    }
    Ok(format!("{runs} runs, all non-stabilizers"))
}

/// Frequencies of each non-stabilizer of `state_of(product)`.
fn draw_counts(
    oracle: &dyn PcliffOracle,
    seq: &[Clifford1],
    draws: usize,
    rng: &mut ChaCha8Rng,
) -> std::result::Result<BTreeMap<SignedPauli2, u64>, String> {
    let targets = weight2_nonstabilizers(&state_of(product_of_sequence(seq)));
    let mut counts: BTreeMap<SignedPauli2, u64> = targets.iter().map(|&p| (p, 0)).collect();
    for _ in 0..draws {
        let m = lib(uniform_nonstabilizer(oracle, seq, rng))?;
        *counts
            .get_mut(&m)
            .ok_or_else(|| format!("{} drew stabilizer {m}", oracle.name()))? += 1;
    }
    Ok(counts)
}

fn chi_square_uniform(counts: &BTreeMap<SignedPauli2, u64>, draws: usize) -> f64 {
    let expected = draws as f64 / counts.len() as f64;
    let stat: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    ChiSquared::new((counts.len() - 1) as f64).expect("dof > 0").sf(stat)
}

fn chi_square_homogeneity(a: &BTreeMap<SignedPauli2, u64>, b: &BTreeMap<SignedPauli2, u64>) -> f64 {
    let (na, nb) = (a.values().sum::<u64>() as f64, b.values().sum::<u64>() as f64);
    let mut stat = 0.0;
    for (k, &ca) in a {
        let cb = b.get(k).copied().unwrap_or(0);
        let col = (ca + cb) as f64;
        for (c, n) in [(ca as f64, na), (cb as f64, nb)] {
            let e = col * n / (na + nb);
            stat += (c - e).powi(2) / e;
        }
    }
    ChiSquared::new((a.len() - 1) as f64).expect("dof > 0").sf(stat)
}

fn uniformity(seed: u64) -> CheckResult {
    let draws = 6000;
    let mut rng = rng_for(seed, 8);
    let h = Clifford1::hadamard();
    let i = Clifford1::identity();
    let honest = HonestPcliff::new(Arc::new(crate::circuits::ConstantCorrection(PauliLabel::I)));
    let mut oracles: Vec<Box<dyn PcliffOracle>> = vec![Box::new(honest)];
    for s in 0..3 {
        oracles.push(Box::new(AdversarialPcliff::new(seed.wrapping_mul(3).wrapping_add(s))));
    }
    let mut min_p = 1.0f64;
    for oracle in &oracles {
        let hhh = draw_counts(oracle.as_ref(), &[h, h, h], draws, &mut rng)?;
        let iih = draw_counts(oracle.as_ref(), &[i, i, h], draws, &mut rng)?;
        for counts in [&hhh, &iih] {
            for (p, &c) in counts {
                let freq = c as f64 / draws as f64;
                ensure((freq - 1.0 / 6.0).abs() <= 0.03, || {
                    format!("{}: {p} has frequency {freq:.4}", oracle.name())
                })?;
            }
            let pv = chi_square_uniform(counts, draws);
            ensure(pv > 0.01, || format!("{}: uniformity p = {pv:.4}", oracle.name()))?;
            min_p = min_p.min(pv);
        }
        let pv = chi_square_homogeneity(&hhh, &iih);
        ensure(pv > 0.01, || {
            format!("{}: (H,H,H) vs (I,I,H) p = {pv:.4}", oracle.name())
        })?;
        min_p = min_p.min(pv);
    }
    Ok(format!(
        "{} oracles × 2 sequences × {draws} draws, min p = {min_p:.3}",
        oracles.len()
    ))
}

fn stabilizer_pairs(seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 9);
    let budget = 64;
    let mut successes = 0;
    let mut failures = 0;
    for t in 0..1000u64 {
        let len = rng.random_range(1..=6);
        let seq = random_seq(&mut rng, len);
        let state = state_of(product_of_sequence(&seq));
        let oracle = AdversarialPcliff::new(StableHasher::new(seed).word(t).finish());
        match learn_stabilizer_pair(&oracle, &seq, budget, &mut rng) {
            Ok(res) => {
                let [a, b] = res.pair;
                ensure(a != b && a.weight() == 2 && b.weight() == 2, || {
                    format!("bad pair {a}, {b}")
                })?;
                for p in res.pair {
                    ensure(expectation(&state, p).abs() == 1, || format!("{p} is not a stabilizer"))?;
                }
                successes += 1;
            }
            Err(crate::Error::BudgetExhausted { .. }) => failures += 1,
            Err(e) => return Err(e.to_string()),
        }
    }
    ensure(successes >= 999, || format!("{successes}/1000 successes"))?;
    Ok(format!("{successes}/1000 successes, {failures} budget failures"))
}

fn failure_count_plausible(failures: u64, runs: u64, budget: usize) -> bool {
    let mean = runs as f64 * failure_bound(budget);
    failures == 0 || Poisson::new(mean).map(|p| p.sf(failures - 1) > 1e-3).unwrap_or(false)
}

fn word_problems(seed: u64) -> CheckResult {
    let budget = 64;
    let mut rng = rng_for(seed, 10);
    let honest = HonestPcliff::new(Arc::new(crate::circuits::ConstantCorrection(PauliLabel::I)));
    let mut summary = Vec::new();
    for (kind, modulus) in [("parity", 2u8), ("mod3", 3u8)] {
        for adversarial in [false, true] {
            let (mut runs, mut failures) = (0u64, 0u64);
            for len in 1..=32usize {
                for t in 0..200u64 {
                    let bits: Vec<bool> = (0..len).map(|_| rng.random_bool(0.5)).collect();
                    let want = (bits.iter().filter(|&&b| b).count() % modulus as usize) as u8;
                    let adv;
                    let oracle: &dyn PcliffOracle = if adversarial {
                        adv = AdversarialPcliff::new(StableHasher::new(seed).word(len as u64).word(t).finish());
                        &adv
                    } else {
                        &honest
                    };
                    let got = if modulus == 2 {
                        solve_parity(oracle, &bits, budget, &mut rng)
                    } else {
                        solve_mod3(oracle, &bits, budget, &mut rng)
                    };
                    runs += 1;
                    match got {
                        Ok(v) => ensure(v == want, || {
                            format!("{kind} on {} gave {v}, expected {want}", bits_string(&bits))
                        })?,
                        Err(crate::Error::BudgetExhausted { .. }) => failures += 1,
                        Err(e) => return Err(e.to_string()),
                    }
                }
            }
            let who = if adversarial { "adversarial" } else { "honest" };
            ensure(failure_count_plausible(failures, runs, budget), || {
                format!("{kind}/{who}: {failures} failures in {runs} runs")
            })?;
            summary.push(format!("{kind}/{who} {failures}/{runs} failed"));
        }
    }
    Ok(summary.join(", "))
}

fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn falsifier(seed: u64) -> CheckResult {
    let constant = ConstantTelep(PauliLabel::I);
    let mut worst = 0;
    for n in 1..=8 {
        let found = lib(falsify_simulator(&constant, n, 1000, seed))?
            .ok_or_else(|| format!("constant-I survived 1000 trials at n = {n}"))?;
        ensure(!lib(telep_support(&found.instance, &found.answer))?, || {
            "counterexample is in support".into()
        })?;
        worst = worst.max(found.trial + 1);
    }
    let honest: [Box<dyn TelepOracle>; 2] = [Box::new(HonestTelep), Box::new(SampledTelep { seed })];
    for oracle in &honest {
        for n in [1, 2, 4, 8] {
            if let Some(c) = lib(falsify_simulator(oracle.as_ref(), n, 10_000, seed))? {
                return Err(format!("{} refuted at n = {n} on trial {}", oracle.name(), c.trial));
            }
        }
    }
    Ok(format!(
        "constant-I refuted within {worst} trials for n = 1..8; honest oracles survive 10^4 trials at n = 1, 2, 4, 8"
    ))
}

//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria 1, 5, 6 and 8 always run. The Monte Carlo criteria (2, 3, 4, 7
//! and the optional 9) take hours on one core and run only when
//! `SPINHEX_ACCEPTANCE_FULL=1`; otherwise they print SKIP. Run them with
//!
//! ```text
//! SPINHEX_ACCEPTANCE_FULL=1 cargo test --release -p spinhex --test acceptance
//! ```
//!
//! `SPINHEX_ACCEPTANCE_ONLY=4,7` restricts the run to the listed criteria.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinhex::analysis::{fit_and_project, threshold_estimate, AnalysisError, CurvePoint, ThresholdEstimate};
use spinhex::arch::{chip_area, footprint, ArchitectureParams, CodeVariant, MemoryBasis};
use spinhex::circuit::build_memory_experiment;
use spinhex::decoder::{Decoder, BRUTE_FORCE_LIMIT};
use spinhex::dem::{build_dem, error_locations};
use spinhex::experiment::MemoryExperiment;
use spinhex::frame::{FrameSampler, Injection};
use spinhex::noise::{Bias, NoiseParams};
use std::time::Instant;

const FULL_ENV: &str = "SPINHEX_ACCEPTANCE_FULL";
const ONLY_ENV: &str = "SPINHEX_ACCEPTANCE_ONLY";
const SEED: u64 = 20251015;

/// Threshold sweep grid and budget.
const DISTANCES: [u32; 3] = [3, 5, 7];
const P_GRID: [f64; 5] = [0.0012, 0.0015, 0.0018, 0.0022, 0.0026];
const SHOTS: u64 = 200_000;
const P_TH: f64 = 0.0018;
const P_TH_TOL: f64 = 0.0005;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Option<Outcome> {
    Some(Outcome { pass, detail: detail.into() })
}

fn sweep(variant: CodeVariant, basis: MemoryBasis, eta: Bias, nx: u32, ny: u32, ds: &[u32], ps: &[f64], shots: u64) -> Vec<CurvePoint> {
    let mut out = Vec::new();
    for &d in ds {
        let arch = ArchitectureParams::new(nx, ny, d, variant, basis).unwrap();
        for &p in ps {
            let t = Instant::now();
            let e = MemoryExperiment::new(&arch, &NoiseParams::new(p, eta).unwrap(), 3 * d).unwrap();
            let r = e.run(shots, u64::MAX, SEED).unwrap();
            let c = CurvePoint::from_counts(p, d, 3 * d, r.shots, r.failures).unwrap();
            eprintln!(
                "    {variant} {basis} ({nx},{ny}) eta={eta} d={d} p={p}: {}/{} pL/round={:.3e} [{:.3e}, {:.3e}] {:.0}s",
                r.failures,
                r.shots,
                c.pl_round,
                c.ci_low,
                c.ci_high,
                t.elapsed().as_secs_f64()
            );
            out.push(c);
        }
    }
    out
}

type Estimate = Result<ThresholdEstimate, AnalysisError>;

fn estimate(variant: CodeVariant, basis: MemoryBasis, eta: Bias) -> Estimate {
    let pts = sweep(variant, basis, eta, 2, 3, &DISTANCES, &P_GRID, SHOTS);
    let t = threshold_estimate(&pts);
    match &t {
        Ok(t) => {
            let cross: Vec<String> = t.crossings.iter().map(|c| format!("{}/{}:{:.5}", c.d_low, c.d_high, c.p)).collect();
            eprintln!("    -> {variant} {basis} eta={eta}: p_th={:.5} +- {:.5} ({})", t.p_th, t.uncertainty, cross.join(" "));
        }
        Err(e) => eprintln!("    -> {variant} {basis} eta={eta}: {e}"),
    }
    t
}

fn fmt_est(t: &Estimate) -> String {
    match t {
        Ok(t) => format!("{:.4}% +- {:.4}%", 100.0 * t.p_th, 100.0 * t.uncertainty),
        Err(e) => format!("no estimate ({e})"),
    }
}

fn criterion_1() -> Option<Outcome> {
    let a15 = ArchitectureParams::xzzx(2, 3, 15).unwrap();
    let nq15 = footprint(&a15).unwrap().qubits_per_logical;
    let nq35 = footprint(&ArchitectureParams::xzzx(2, 3, 35).unwrap()).unwrap().qubits_per_logical;
    let area1 = chip_area(&a15, 10_000, 1.0).unwrap();
    let area10 = chip_area(&a15, 10_000, 10.0).unwrap();
    let spg = a15.swaps_per_gate();
    let nswap = footprint(&ArchitectureParams::xzzx(19, 20, 3).unwrap()).unwrap().swaps_per_stabilizer;
    let sig3 = |x: f64, want: f64| {
        let unit = 10f64.powi(want.log10().floor() as i32 - 2);
        (x / unit).round() == (want / unit).round()
    };
    let pass = nq15 == 4480 && nq35 == 24480 && sig3(area1, 0.263) && sig3(area10, 2.63) && spg == 10 && nswap == 584;
    outcome(
        pass,
        format!("N_q(15)={nq15} N_q(35)={nq35} area={area1:.4}/{area10:.3} cm2 swaps/gate={spg} N_SWAP(19,20)={nswap}"),
    )
}

fn full() -> bool {
    std::env::var(FULL_ENV).is_ok_and(|v| v == "1")
}

fn criterion_2(base: &[(MemoryBasis, Estimate)]) -> Option<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for (b, t) in base {
        pass &= t.as_ref().is_ok_and(|t| (t.p_th - P_TH).abs() <= P_TH_TOL);
        parts.push(format!("{b}: {}", fmt_est(t)));
    }
    outcome(pass, format!("{} (target 0.18% +- 0.05%)", parts.join(", ")))
}

fn criterion_3(base: &[(MemoryBasis, Estimate)]) -> Option<Outcome> {
    let mut all: Vec<(String, Estimate)> = base.iter().map(|(b, t)| (format!("{b} eta=100"), t.clone())).collect();
    for eta in [1.0, 1000.0] {
        for b in [MemoryBasis::H, MemoryBasis::V] {
            all.push((format!("{b} eta={eta}"), estimate(CodeVariant::Xzzx, b, Bias::Finite(eta))));
        }
    }
    let mut pass = true;
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let agree = match (&all[i].1, &all[j].1) {
                (Ok(a), Ok(b)) => a.agrees_with(b),
                _ => false,
            };
            if !agree {
                pass = false;
                eprintln!("    disagree: {} vs {}", all[i].0, all[j].0);
            }
        }
    }
    let parts: Vec<String> = all.iter().map(|(n, t)| format!("{n}: {}", fmt_est(t))).collect();
    outcome(pass, parts.join(", "))
}

fn criterion_4(base: &[(MemoryBasis, Estimate)]) -> Option<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    // CSS X memory is the image of XZZX H, CSS Z of XZZX V.
    for (css, xzzx) in [(MemoryBasis::X, MemoryBasis::H), (MemoryBasis::Z, MemoryBasis::V)] {
        let t = estimate(CodeVariant::Css, css, Bias::Finite(100.0));
        let reference = &base.iter().find(|(b, _)| *b == xzzx).unwrap().1;
        pass &= matches!((&t, reference), (Ok(a), Ok(b)) if a.agrees_with(b));
        parts.push(format!("CSS {css}: {} vs XZZX {xzzx}: {}", fmt_est(&t), fmt_est(reference)));
    }
    outcome(pass, parts.join(", "))
}

fn criterion_5() -> Option<Outcome> {
    let mut checked = 0;
    let mut unique = 0;
    let mut mismatches = Vec::new();
    for d in [3u32, 5] {
        let arch = ArchitectureParams::xzzx(2, 3, d).unwrap();
        let c = build_memory_experiment(&arch, &NoiseParams::new(0.003, Bias::Finite(100.0)).unwrap(), 3 * d).unwrap();
        let dec = Decoder::from_dem(&build_dem(&c).unwrap()).unwrap();
        let n = dec.graph().num_detectors as u32;
        let mut syndromes: Vec<Vec<u32>> = Vec::new();
        // Circuit-sampled syndromes small enough for exhaustive search.
        let samples = FrameSampler::new(&c).unwrap().sample(20_000, SEED + d as u64).unwrap();
        for s in 0..samples.shots as usize {
            let f: Vec<u32> = samples.detectors.ones(s).collect();
            if !f.is_empty() && f.len() <= BRUTE_FORCE_LIMIT && syndromes.len() < 1000 {
                syndromes.push(f);
            }
        }
        // Uniformly random detector subsets.
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ d as u64);
        while syndromes.len() < 2000 {
            let mut f: Vec<u32> = (0..rng.gen_range(1..=BRUTE_FORCE_LIMIT)).map(|_| rng.gen_range(0..n)).collect();
            f.sort_unstable();
            f.dedup();
            syndromes.push(f);
        }
        for f in &syndromes {
            let (w, m) = dec.decode_with_weight(f).unwrap();
            let b = dec.brute_force_decode(f).unwrap();
            checked += 1;
            if b.optimal_pairings == 1 {
                unique += 1;
            }
            if w != b.weight || (b.optimal_pairings == 1 && m != b.mask) {
                mismatches.push(format!("d={d} {f:?}"));
            }
        }
    }
    let first = mismatches.first().map(|m| format!(", first {m}")).unwrap_or_default();
    outcome(
        mismatches.is_empty(),
        format!("{checked} syndromes (2000 per distance), {unique} with a unique optimum, {} mismatches{first}", mismatches.len()),
    )
}

fn criterion_6() -> Option<Outcome> {
    let mut total = 0;
    let mut bad = 0;
    for basis in [MemoryBasis::H, MemoryBasis::V] {
        let arch = ArchitectureParams::new(2, 3, 3, CodeVariant::Xzzx, basis).unwrap();
        let c = build_memory_experiment(&arch, &NoiseParams::new(0.001, Bias::Finite(100.0)).unwrap(), 9).unwrap();
        let locs = error_locations(&c).unwrap();
        let shots: Vec<Vec<Injection>> =
            locs.iter().map(|l| vec![Injection { layer: l.layer, noise_index: l.noise_index, fault: l.fault }]).collect();
        let out = FrameSampler::new(&c).unwrap().inject(&shots).unwrap();
        total += locs.len();
        bad += locs.iter().zip(&out).filter(|(l, (dets, mask))| &l.detectors != dets || l.observable_mask != *mask).count();
    }
    outcome(bad == 0, format!("{total} primitive error locations (H and V memories), {bad} signature mismatches"))
}

fn criterion_7() -> Option<Outcome> {
    let mut pts = Vec::new();
    for d in [3u32, 5, 7, 9, 11] {
        let arch = ArchitectureParams::xzzx(2, 3, d).unwrap();
        let e = MemoryExperiment::new(&arch, &NoiseParams::new(0.001, Bias::Finite(100.0)).unwrap(), 3 * d).unwrap();
        let t = Instant::now();
        let r = e.run(1_000_000, 2000, SEED).unwrap();
        let c = CurvePoint::from_counts(0.001, d, 3 * d, r.shots, r.failures).unwrap();
        eprintln!("    p=0.001 d={d}: {}/{} pL/round={:.3e} {:.0}s", r.failures, r.shots, c.pl_round, t.elapsed().as_secs_f64());
        pts.push((d, c.pl_round));
    }
    let (fit, ds) = match fit_and_project(&pts, &[1e-6]) {
        Ok(x) => x,
        Err(e) => return outcome(false, format!("no fit ({e})")),
    };
    let d = ds[0];
    let pass = (d as f64 - 35.0).abs() <= 0.2 * 35.0;
    outcome(pass, format!("ln pL = {:.3} {:+.4} d, MegaQuop d = {d} (target 35 +- 20%)", fit.intercept, fit.slope))
}

fn criterion_8() -> Option<Outcome> {
    let mut pairs = Vec::new();
    for (d, p) in [(3u32, 0.004), (5, 0.003)] {
        let arch = ArchitectureParams::xzzx(2, 3, d).unwrap();
        let e = MemoryExperiment::new(&arch, &NoiseParams::new(p, Bias::Finite(100.0)).unwrap(), 3 * d).unwrap();
        let runs: Vec<_> = [1, 2, 4].iter().map(|&w| e.run_with_workers(20_000, 1500, SEED, w).unwrap()).collect();
        pairs.push((d, runs));
    }
    let pass = pairs.iter().all(|(_, r)| r.iter().all(|x| *x == r[0]));
    let detail: Vec<String> = pairs
        .iter()
        .map(|(d, r)| format!("d={d}: {}", r.iter().map(|x| format!("{}/{}", x.failures, x.shots)).collect::<Vec<_>>().join(" ")))
        .collect();
    outcome(pass, format!("workers 1/2/4 -> {}", detail.join("; ")))
}

fn criterion_9(base: &[(MemoryBasis, Estimate)]) -> Option<Outcome> {
    let pts = sweep(CodeVariant::Xzzx, MemoryBasis::H, Bias::Finite(100.0), 4, 5, &DISTANCES, &[0.0005, 0.0007, 0.0009, 0.0011, 0.0014], 50_000);
    let t45 = threshold_estimate(&pts);
    let t23 = &base.iter().find(|(b, _)| *b == MemoryBasis::H).unwrap().1;
    let pass = matches!((t23, &t45), (Ok(a), Ok(b)) if b.p_th < a.p_th);
    outcome(pass, format!("H memory: (2,3) N_SWAP=40 {} vs (4,5) N_SWAP=104 {}", fmt_est(t23), fmt_est(&t45)))
}

fn selected() -> Option<Vec<u32>> {
    let v = std::env::var(ONLY_ENV).ok()?;
    Some(v.split(',').map(|x| x.trim().parse().expect("criterion numbers")).collect())
}

fn main() {
    let only = selected();
    let want = |n: u32| only.as_ref().is_none_or(|o| o.contains(&n));
    let mut failed = 0;
    let mut report = |n: u32, o: Option<Outcome>| match o {
        Some(o) => {
            println!("{} criterion {n}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
            failed += !o.pass as u32;
        }
        None => println!("SKIP criterion {n}: long-running Monte Carlo, set {FULL_ENV}=1"),
    };
    let fast: [(u32, fn() -> Option<Outcome>); 4] = [(1, criterion_1), (5, criterion_5), (6, criterion_6), (8, criterion_8)];
    for (n, f) in fast {
        if want(n) {
            report(n, f());
        }
    }
    if full() {
        let base: Vec<(MemoryBasis, Estimate)> = if [2, 3, 4, 9].iter().any(|&n| want(n)) {
            [MemoryBasis::H, MemoryBasis::V].into_iter().map(|b| (b, estimate(CodeVariant::Xzzx, b, Bias::Finite(100.0)))).collect()
        } else {
            Vec::new()
        };
        let slow: [(u32, &dyn Fn() -> Option<Outcome>); 5] = [
            (2, &|| criterion_2(&base)),
            (3, &|| criterion_3(&base)),
            (4, &|| criterion_4(&base)),
            (7, &criterion_7),
            (9, &|| criterion_9(&base)),
        ];
        for (n, f) in slow {
            if want(n) {
                report(n, f());
            }
        }
    } else {
        for n in [2, 3, 4, 7, 9].into_iter().filter(|&n| want(n)) {
            report(n, None);
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

//! Acceptance criteria 1-11. Runs every criterion, prints one PASS/FAIL line
//! for each, and exits nonzero if any failed.

use hfe_core::diagnostics::*;
use hfe_core::montecarlo::*;
use hfe_core::spectrum::{make_class_d, ClassDParams, PowerSpectrum};
use hfe_core::subordination::{c_l_q, c_l_q2, SubordinatedSpectrum};
use hfe_core::wigner::*;
use hfe_core::Error;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(x: f64, target: f64, se: f64) -> bool {
    (x - target).abs() <= 3.0 * se
}

fn wigner_engine() -> Outcome {
    let t0 = Instant::now();
    let mut worst_orth = 0.0f64;
    for l in 0..=50u32 {
        let li = l as i32;
        for m1 in -li..=li {
            for m2 in -li..=li {
                let mut s = 0.0;
                for big_l in (m1 + m2).unsigned_abs()..=2 * l {
                    let c = clebsch_gordan(l, m1, l, m2, big_l, m1 + m2).map_err(|e| e.to_string())?;
                    s += c * c;
                }
                worst_orth = worst_orth.max((s - 1.0).abs());
            }
        }
    }
    let mut worst_rel = 0.0f64;
    let mut compared = 0usize;
    for l1 in [0u32, 1, 3, 10, 25, 50, 77, 100] {
        for l2 in [0u32, 2, 9, 33, 64, 100] {
            let s1 = (l1 / 6).max(1) as usize;
            let s2 = (l2 / 6).max(1) as usize;
            for m1 in (-(l1 as i32)..=l1 as i32).step_by(s1) {
                for m2 in (-(l2 as i32)..=l2 as i32).step_by(s2) {
                    let row = three_j_row(l1, l2, m1, m2);
                    let Some(jmax) = row.jmax() else { continue };
                    for j in row.jmin()..=jmax.min(100) {
                        let k = ThreeJKey::new(l1, l2, j, m1, m2, -m1 - m2);
                        let e = three_j(k, Mode::Exact).map_err(|e| e.to_string())?;
                        let f = three_j(k, Mode::Float).map_err(|e| e.to_string())?;
                        let r = if e == 0.0 { f.abs() } else { ((e - f) / e).abs() };
                        worst_rel = worst_rel.max(r);
                        compared += 1;
                    }
                }
            }
        }
    }
    let t1 = Instant::now();
    let table = ZeroMTable::new(200, 400);
    let sq = three_j_sq_zero_table(200, 400).map_err(|e| e.to_string())?;
    let table_secs = t1.elapsed().as_secs_f64();
    let table_ok = (sq.iter().sum::<f64>() - 1.0).abs() < 1e-12 && table.get(200, 200) != 0.0;
    check(
        worst_orth < 1e-10 && worst_rel < 1e-12 && table_secs < 5.0 && table_ok,
        format!(
            "orthogonality worst {worst_orth:.2e} (l <= 50); exact vs recurrence worst {worst_rel:.2e} over {compared} symbols; \
             zero-m tables at l = 200 in {table_secs:.2}s; total {:.1}s",
            t0.elapsed().as_secs_f64()
        ),
    )
}

fn parity() -> Outcome {
    let mut bad = 0usize;
    for l in 0..=500u32 {
        let w = weights_w1(l);
        bad += w.iter().skip(1).step_by(2).filter(|&&x| x != 0.0).count();
    }
    let rejects = (1..=6u32).all(|l| {
        let mut v = vec![0.0; 2 * l as usize + 1];
        v[1] = 1e-300;
        matches!(TrispectrumDiag::new(l, v), Err(Error::OddSupport(1)))
    });
    check(bad == 0 && rejects, format!("{bad} nonzero odd-L weights for l <= 500; odd support rejected: {rejects}"))
}

fn gaussian_closed_forms() -> Outcome {
    let mut exact = true;
    for l in 0..=10_000u32 {
        let n = (2 * l + 1) as f64;
        let g = gaussian_baselines(l);
        exact &= g.variance == 2.0 / n && g.cum4 == 12.0 / n && g.tv_bound == (8.0 / n).sqrt();
    }
    let tv = gaussian_baselines(100).tv_bound;
    check(exact && (tv - 0.19950).abs() <= 1e-5, format!("closed forms exact for l <= 10^4: {exact}; tv bound at l = 100 is {tv:.6}"))
}

fn gaussian_mc() -> Outcome {
    let t0 = Instant::now();
    let base = make_class_d(ClassDParams::new(3.0, 0.0, 1.0, 100).unwrap()).map_err(|e| e.to_string())?;
    let cfg = McRunConfig {
        kind: ExperimentKind::Gaussian,
        base: Some(base),
        lmax_in: 100,
        lmax_out: None,
        ls: vec![10, 50, 100],
        replicates: 5000,
        seed: 20_240_101,
    };
    let r = run_gaussian_experiment(&cfg).map_err(|e| e.to_string())?;
    let secs = t0.elapsed().as_secs_f64();
    let mut ok = secs < 30.0;
    let mut parts = Vec::new();
    for s in &r.summaries {
        let n = (2 * s.l + 1) as f64;
        let (ct, clt) = (s.ctilde.unwrap(), s.clt.unwrap());
        let se4 = clt.se_cum4.unwrap();
        let good = within(ct.variance, 2.0 / n, ct.se_variance) && within(clt.cum4, 12.0 / n, se4);
        ok &= good;
        parts.push(format!(
            "l={} var {:.5} (target {:.5}, se {:.1e}) cum4 {:.4} (target {:.4}, se {:.1e})",
            s.l,
            ct.variance,
            2.0 / n,
            ct.se_variance,
            clt.cum4,
            12.0 / n,
            se4
        ));
    }
    check(ok, format!("{}; {secs:.1}s", parts.join("; ")))
}

fn quadratic_spectrum() -> Outcome {
    let mut worst = 0.0f64;
    for alpha in [2.5, 3.0, 4.0] {
        for beta in [0.0, 0.5, 1.0] {
            let base = make_class_d(ClassDParams::new(alpha, beta, 1.0, 64).unwrap()).map_err(|e| e.to_string())?;
            for l in 0..=128u32 {
                let a = c_l_q2(&base, l).value;
                let b = c_l_q(&base, l, 2).map_err(|e| e.to_string())?.value;
                worst = worst.max(if a == 0.0 { b.abs() } else { ((a - b) / a).abs() });
            }
        }
    }
    let dip = PowerSpectrum::from_table(vec![0.0, 1.7]).unwrap();
    let want = 3.0 * 1.7 * 1.7 / (5.0 * std::f64::consts::PI);
    let dip_err = (c_l_q2(&dip, 2).value - want).abs() / want;
    let base = make_class_d(ClassDParams::new(3.0, 0.0, 1.0, 64).unwrap())
        .and_then(|b| b.normalize_unit_variance())
        .map_err(|e| e.to_string())?;
    let v = base.tail_bound().unwrap();
    let total = SubordinatedSpectrum::compute(&base, 2, None).map_err(|e| e.to_string())?.total_variance();
    let bound = 2.0 * ((1.0 + v).powi(2) - 1.0);
    check(
        worst < 1e-10 && dip_err < 1e-12 && (total - 2.0).abs() <= bound,
        format!("closed vs convolution worst {worst:.2e}; dipole error {dip_err:.2e}; total {total} vs 2 within {bound:.2e}"),
    )
}

fn sabato_bracket() -> Outcome {
    let t0 = Instant::now();
    let base = make_class_d(ClassDParams::new(3.0, 0.0, 1.0, 24).unwrap()).map_err(|e| e.to_string())?;
    let cfg = McRunConfig {
        kind: ExperimentKind::Quadratic,
        base: Some(base),
        lmax_in: 24,
        lmax_out: None,
        ls: vec![8, 12, 16],
        replicates: 500,
        seed: 424_242,
    };
    let r = run_quadratic_experiment(&cfg).map_err(|e| e.to_string())?;
    let secs = t0.elapsed().as_secs_f64();
    let mut ok = secs < 600.0;
    let mut parts = Vec::new();
    for s in &r.summaries {
        let [lo, hi] = s.targets.bracket.unwrap();
        let se = s.second_moment_se.unwrap();
        let good = s.second_moment >= lo - 3.0 * se && s.second_moment <= hi + 3.0 * se;
        ok &= good;
        parts.push(format!("l={} mc {:.4} +- {:.4} vs [{lo:.4}, {hi:.4}]", s.l, s.second_moment, se));
    }
    check(ok, format!("alpha=3 beta=0: {}; {secs:.1}s", parts.join("; ")))
}

fn phase_transition() -> Outcome {
    let ls: Vec<u32> = (10..=60).collect();
    let mut grid = Vec::new();
    for alpha in [2.5, 3.0, 4.0] {
        for beta in [0.0, 0.25, 1.0] {
            grid.push(ClassDParams::new(alpha, beta, 1.0, 200).map_err(|e| e.to_string())?);
        }
    }
    let rep = phase_scan(&grid, &ls, &ConvergenceRule::default()).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut parts = Vec::new();
    for p in &rep.points {
        let q = p.params.unwrap();
        let first = p.records.first().unwrap();
        let last = p.records.last().unwrap();
        let good = if q.beta > 0.0 {
            let decreasing = p.records.windows(2).all(|w| w[1].hfe_leading < w[0].hfe_leading);
            p.verdict == Verdict::Converging && decreasing && last.markov_ratio < 0.05
        } else {
            let floor = p.final_lemma_lower.unwrap();
            p.verdict == Verdict::NonConverging && p.records.iter().all(|r| r.hfe_leading >= floor)
        };
        ok &= good;
        parts.push(format!(
            "({},{}) {} leading {:.3}->{:.3} markov {:.3} {}",
            q.alpha,
            q.beta,
            p.verdict.as_str(),
            first.hfe_leading,
            last.hfe_leading,
            last.markov_ratio,
            if good { "ok" } else { "MISS" }
        ));
    }
    check(ok, parts.join("; "))
}

fn sandwich() -> Outcome {
    let mut violations = Vec::new();
    let mut checked = 0;
    for alpha in [2.5, 3.0, 4.0] {
        let p = ClassDParams::new(alpha, 0.0, 1.0, 1000).map_err(|e| e.to_string())?;
        let base = make_class_d(p).map_err(|e| e.to_string())?;
        let (mut worst_lo, mut worst_hi) = (0.0f64, 0.0f64);
        for l in 10..=100u32 {
            let s = sandwich_q2(&p, l).map_err(|e| e.to_string())?;
            let c = c_l_q2(&base, l);
            let top = c.value + c.tail_bound.unwrap_or(0.0);
            worst_lo = worst_lo.max(s.lower / top);
            worst_hi = worst_hi.max(c.value / s.upper);
            checked += 1;
        }
        if worst_lo > 1.0 || worst_hi > 1.0 {
            violations.push(format!("alpha={alpha}: max lower/C {worst_lo:.3}, max C/upper {worst_hi:.3}"));
        }
    }
    check(
        violations.is_empty(),
        format!("{checked} (alpha, l) pairs; {}", if violations.is_empty() { "no violations".into() } else { violations.join("; ") }),
    )
}

fn counterexample() -> Outcome {
    let cfg = McRunConfig {
        kind: ExperimentKind::Counterexample,
        base: None,
        lmax_in: 50,
        lmax_out: None,
        ls: (1..=50).collect(),
        replicates: 10_000,
        seed: 31_337,
    };
    let r = run_counterexample_experiment(&cfg).map_err(|e| e.to_string())?;
    // squared deviations of C~_l from 1 are rounding-level (about 1e-32)
    let worst = r.summaries.iter().map(|s| s.second_moment).fold(0.0, f64::max);
    let c50 = r.summaries.last().unwrap().component.unwrap();
    let (k, se) = (c50.kurtosis.unwrap(), c50.se_kurtosis.unwrap());
    check(
        worst < 1e-28 && k - 3.0 > 5.0 * se,
        format!("max E(C~-1)^2 {worst:.1e} over l <= 50; kurtosis at l=50 {k:.3} +- {se:.3} (needs > 3 + 5 se = {:.3})", 3.0 + 5.0 * se),
    )
}

fn completely_random() -> Outcome {
    let base = PowerSpectrum::from_table(vec![1.0; 101]).unwrap();
    let cfg = McRunConfig {
        kind: ExperimentKind::CompletelyRandom,
        base: Some(base),
        lmax_in: 100,
        lmax_out: None,
        ls: vec![1, 100],
        replicates: 5000,
        seed: 271_828,
    };
    let r = run_completely_random_experiment(&cfg).map_err(|e| e.to_string())?;
    let (ks1, ks100) = (r.summaries[0].component_ks, r.summaries[1].component_ks);
    check(ks100 < 0.05 && ks1 > 0.2, format!("KS at l=100 {ks100:.4} (< 0.05); KS at l=1 {ks1:.4} (> 0.2)"))
}

fn run_cli(args: &[&str], out: &Path, threads: usize) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_hfe"))
        .args(args)
        .arg("--out")
        .arg(out)
        .arg("--threads")
        .arg(threads.to_string())
        .env_remove("HFE_OUT_DIR")
        .status()
        .map_err(|e| e.to_string())?;
    if status.success() {
        Ok(())
    } else {
        Err(format!("`hfe {}` exited with {status}", args.join(" ")))
    }
}

fn determinism() -> Outcome {
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["spectrum", "--alpha", "3", "--beta", "0", "--lmax", "100"], "spectrum.csv"),
        (vec!["subordinate", "--alpha", "3", "--beta", "0.5", "--lmax", "16", "--q", "3", "--lmax-out", "12"], "spectrum_q.csv"),
        (vec!["diagnose", "--alpha", "4", "--beta", "0.25", "--lmax", "200"], "diagnostics.csv"),
        (vec!["scan", "--alphas", "2.5,4", "--betas", "0,1", "--lmax", "120", "--l-min", "10", "--l-max", "40"], "scan.csv"),
        (vec!["simulate", "--kind", "gaussian", "--seed", "7", "--replicates", "400", "--lmax-in", "30", "--ls", "5,30", "--alpha", "3"], "simulation.csv"),
        (vec!["simulate", "--kind", "quadratic", "--seed", "8", "--replicates", "60", "--lmax-in", "12", "--ls", "4,9", "--alpha", "3"], "simulation.csv"),
        (vec!["simulate", "--kind", "counterexample", "--seed", "9", "--replicates", "400", "--lmax-in", "20", "--ls", "3,20"], "simulation.csv"),
        (vec!["simulate", "--kind", "completely-random", "--seed", "10", "--replicates", "400", "--lmax-in", "30", "--ls", "1,30", "--alpha", "3"], "simulation.csv"),
        (vec!["wigner", "--lmax", "30"], "wigner_3j.csv"),
    ];
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = 0;
    for (i, (args, file)) in cases.iter().enumerate() {
        let mut payloads = Vec::new();
        for threads in [1usize, 2, 8] {
            for rep in 0..2 {
                let dir = tmp.path().join(format!("{i}-{threads}-{rep}"));
                run_cli(args, &dir, threads)?;
                payloads.push(std::fs::read(dir.join(file)).map_err(|e| e.to_string())?);
                if !dir.join("manifest.json").exists() {
                    return Err(format!("no manifest for `hfe {}`", args.join(" ")));
                }
                runs += 1;
            }
        }
        if payloads.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!("`hfe {}` output differs across runs", args.join(" ")));
        }
    }
    check(true, format!("{} commands x 3 thread counts x 2 repeats = {runs} runs, payloads byte-identical", cases.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("Wigner engine", wigner_engine),
        ("parity of w1 and odd support", parity),
        ("Gaussian closed forms", gaussian_closed_forms),
        ("Gaussian Monte Carlo", gaussian_mc),
        ("quadratic spectrum", quadratic_spectrum),
        ("variance bracket for the squared field", sabato_bracket),
        ("phase transition scan", phase_transition),
        ("sandwich bounds", sandwich),
        ("counterexample", counterexample),
        ("completely random sampler", completely_random),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {:>2} PASS [{name}] ({secs:.1}s) {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{name}] ({secs:.1}s) {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

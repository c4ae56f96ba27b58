use crate::args::{Command, LRange, ModeArg, RuleArgs, SpectrumArgs};
use crate::output::OutputDir;
use anyhow::{Context, Result};
use hfe_core::diagnostics::{diagnose, phase_scan, ConvergenceRule, DiagnosticReport};
use hfe_core::format::fmt_f64;
use hfe_core::montecarlo::{run_experiment, McRunConfig};
use hfe_core::spectrum::{make_class_d, ClassDParams, PowerSpectrum};
use hfe_core::subordination::SubordinatedSpectrum;
use hfe_core::wigner::{three_j, Mode, ThreeJKey, Wigner};
use hfe_core::Error;
use std::fs::File;
use std::io::{BufReader, Write};

fn load_spectrum(a: &SpectrumArgs, default_lmax: Option<u32>) -> Result<PowerSpectrum> {
    if let Some(path) = &a.input {
        let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        return Ok(PowerSpectrum::read_csv(BufReader::new(f))?);
    }
    let alpha = a
        .alpha
        .ok_or_else(|| Error::InvalidArgument("either --input or --alpha is required".into()))?;
    let lmax = a
        .lmax
        .or(default_lmax)
        .ok_or_else(|| Error::InvalidArgument("--lmax is required with --alpha".into()))?;
    Ok(make_class_d(ClassDParams::new(alpha, a.beta, a.c, lmax)?)?)
}

fn multipoles(r: &LRange) -> Result<Vec<u32>> {
    if !r.ls.is_empty() {
        return Ok(r.ls.clone());
    }
    if r.l_step == 0 || r.l_min > r.l_max {
        return Err(Error::InvalidArgument(format!(
            "empty multipole range {}..={} step {}",
            r.l_min, r.l_max, r.l_step
        ))
        .into());
    }
    Ok((r.l_min..=r.l_max).step_by(r.l_step as usize).collect())
}

fn rule(r: &RuleArgs) -> ConvergenceRule {
    ConvergenceRule { max_slope: r.max_slope, terminal_factor: r.terminal_factor }
}

fn write_report(out: &mut OutputDir, stem: &str, report: &DiagnosticReport) -> Result<()> {
    out.write(&format!("{stem}.csv"), |w| Ok(report.write_csv(w)?))?;
    out.write_json(&format!("{stem}.json"), report)
}

/// Runs `cmd`, writing its files into `out`; returns the seed, if any.
pub fn run(cmd: &Command, out: &mut OutputDir) -> Result<Option<u64>> {
    match cmd {
        Command::Spectrum { spectrum, normalize } => {
            let mut s = load_spectrum(spectrum, None)?;
            if *normalize {
                s = s.normalize_unit_variance()?;
            }
            out.write("spectrum.csv", |w| Ok(s.write_csv(w)?))?;
            Ok(None)
        }
        Command::Subordinate { spectrum, q, lmax_out } => {
            let base = load_spectrum(spectrum, None)?;
            let sub = SubordinatedSpectrum::compute(&base, *q as usize, *lmax_out)?;
            out.write("spectrum_q.csv", |w| Ok(sub.write_csv(w)?))?;
            Ok(None)
        }
        Command::Diagnose { spectrum, range, rule: r } => {
            let base = load_spectrum(spectrum, None)?;
            let rule = rule(r);
            let point = diagnose(&base, &multipoles(range)?, &rule)?;
            write_report(out, "diagnostics", &DiagnosticReport { rule, points: vec![point] })?;
            Ok(None)
        }
        Command::Scan { alphas, betas, c, lmax, range, rule: r } => {
            let grid = alphas
                .iter()
                .flat_map(|&a| betas.iter().map(move |&b| (a, b)))
                .map(|(a, b)| ClassDParams::new(a, b, *c, *lmax))
                .collect::<hfe_core::Result<Vec<_>>>()?;
            let ls = multipoles(range)?;
            let report = phase_scan(&grid, &ls, &rule(r))?;
            write_report(out, "scan", &report)?;
            Ok(None)
        }
        Command::Simulate { kind, seed, replicates, lmax_in, lmax_out, ls, spectrum } => {
            let kind = (*kind).into();
            let base = match kind {
                hfe_core::montecarlo::ExperimentKind::Counterexample => None,
                _ => Some(load_spectrum(spectrum, Some(*lmax_in))?),
            };
            let cfg = McRunConfig {
                kind,
                base,
                lmax_in: *lmax_in,
                lmax_out: *lmax_out,
                ls: ls.clone(),
                replicates: *replicates,
                seed: *seed,
            };
            let result = run_experiment(&cfg)?;
            out.write("simulation.csv", |w| Ok(result.write_csv(w)?))?;
            out.write_json("simulation.json", &result)?;
            Ok(Some(*seed))
        }
        Command::Wigner { lmax, mode, cap } => {
            if !Wigner::init_global(*cap) {
                return Err(Error::InvalidArgument("symbol engine already initialised with another cap".into()).into());
            }
            let mode = match mode {
                ModeArg::Exact => Mode::Exact,
                ModeArg::Float => Mode::Float,
            };
            out.write("wigner_3j.csv", |w| {
                writeln!(w, "l1,l2,l3,value")?;
                for l3 in 0..=*lmax {
                    for l2 in 0..=l3 {
                        for l1 in l3 - l2..=l2 {
                            if (l1 + l2 + l3) % 2 == 1 {
                                continue;
                            }
                            let v = three_j(ThreeJKey::zero_m(l1, l2, l3), mode)?;
                            writeln!(w, "{l1},{l2},{l3},{}", fmt_f64(v))?;
                        }
                    }
                }
                Ok(())
            })?;
            Ok(None)
        }
    }
}

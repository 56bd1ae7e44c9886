//! Pipeline orchestration and file output.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nodal_core::textfmt::{round12, sig12};
use nodal_core::verify::{check_co_area, standard_reports, systole_violations};
use nodal_core::{
    banach_indicatrix, extract_domains, extrema_moments, scaling_study, sweep, Family, GridField, InequalityReport,
    ScalingFit, SweepSpec, Verdict, WeightFn,
};

use crate::config::{Command, RunConfig};

/// Default output directory.
pub const DEFAULT_OUT_DIR: &str = "out";
/// `B(1,f) >= (1 - slack) sum m_A` is a hard invariant of every run.
pub const BANACH_SLACK: f64 = 0.01;

/// Files written by a run and the hard-invariant or scaling failures it saw.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub violations: Vec<String>,
}

impl Outcome {
    /// 0 when nothing was violated, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            0
        } else {
            2
        }
    }
}

struct Writer<'a> {
    dir: &'a Path,
    outcome: Outcome,
}

impl Writer<'_> {
    fn file(&mut self, name: &str, body: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        body(&mut buf)?;
        let path = self.dir.join(name);
        fs::write(&path, buf).with_context(|| format!("cannot write {}", path.display()))?;
        self.outcome.files.push(path);
        Ok(())
    }

    fn json<T: serde::Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.file(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)
        })
    }
}

/// Runs `cfg`, writing every output under its output directory.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut out = Writer { dir: &dir, outcome: Outcome::default() };
    let u = cfg.u.weight()?;
    let (analyze, sweeps, verify) = match cfg.command {
        Command::Analyze => (true, false, false),
        Command::Sweep => (false, true, false),
        Command::Verify => (false, false, true),
        Command::Scaling => (false, false, false),
        Command::All => (true, true, true),
    };
    if analyze || sweeps || verify {
        run_members(cfg, &u, analyze, sweeps, verify, &mut out)?;
    }
    match (cfg.command, &cfg.family) {
        (Command::Scaling, None) => bail!("scaling needs a family"),
        (Command::Scaling | Command::All, Some(family)) => run_scaling(cfg, family, &mut out)?,
        _ => {}
    }
    Ok(out.outcome)
}

fn run_members(cfg: &RunConfig, u: &WeightFn, analyze: bool, sweeps: bool, verify: bool, out: &mut Writer) -> Result<()> {
    let resolution = cfg.resolution.map(|r| r.resolution());
    let spec = SweepSpec { keep_contours: cfg.sweep.keep_contours || cfg.contours, ..cfg.sweep.clone() };
    let mut reports: Vec<InequalityReport> = Vec::new();
    for m in cfg.members()? {
        let tag = &m.tag;
        let gf = GridField::sample(&m.expr, resolution).with_context(|| format!("sampling {tag}"))?;
        let flat = gf.model().systole(1.0).is_some();
        if analyze {
            let nds = extract_domains(&gf, None).with_context(|| format!("nodal domains of {tag}"))?;
            out.file(&format!("{tag}.domains.csv"), |w| nds.write_csv(w))?;
            if cfg.grid {
                out.file(&format!("{tag}.grid.csv"), |w| gf.write_csv(w))?;
            }
        }
        if sweeps {
            let s = sweep(&gf, &spec).with_context(|| format!("sweeping {tag}"))?;
            out.file(&format!("{tag}.sweep.csv"), |w| s.write_csv(w))?;
            if spec.keep_contours {
                out.file(&format!("{tag}.contours.csv"), |w| s.write_contours_csv(w))?;
            }
            if flat {
                for (c, r, l, floor) in systole_violations(&gf, &s)? {
                    out.outcome.violations.push(format!(
                        "{tag}: systole inequality fails at c={} r={}: L={} < kappa beta={}",
                        sig12(c),
                        sig12(r),
                        sig12(l),
                        sig12(floor)
                    ));
                }
            }
        }
        if verify {
            reports.extend(standard_reports(&gf, u, &cfg.sweep).with_context(|| format!("verifying {tag}"))?);
            if flat {
                for &r in &cfg.sweep.r_values {
                    reports.push(check_co_area(&gf, u, r, &cfg.sweep)?);
                }
            }
            let b = banach_indicatrix(&gf, &WeightFn::one(), &cfg.sweep)?;
            let sum = extrema_moments(&extract_domains(&gf, None)?, 1.0);
            if b < (1.0 - BANACH_SLACK) * sum {
                out.outcome
                    .violations
                    .push(format!("{tag}: B(1,f) = {} is below sum m_A = {}", sig12(b), sig12(sum)));
            }
        }
    }
    if verify {
        reports.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        for r in &reports {
            if r.verdict == Verdict::ViolatedScaling {
                out.outcome.violations.push(format!(
                    "{} on {}: ratio {} above its family cap",
                    r.name,
                    r.mode,
                    sig12(r.ratio)
                ));
            }
        }
        let rounded: Vec<_> = reports.iter().map(InequalityReport::rounded).collect();
        out.json("report.json", &rounded)?;
    }
    Ok(())
}

fn run_scaling(cfg: &RunConfig, family: &Family, out: &mut Writer) -> Result<()> {
    let ftag = family_tag(family);
    let mut fits = Vec::new();
    for q in cfg.scaling_quantities(family) {
        let fit = scaling_study(family, q).with_context(|| format!("fitting {q} over {}", family.label()))?;
        let qtag = q.to_string().replace('^', "_q");
        out.file(&format!("{ftag}.{qtag}.fit.csv"), |w| emit_plotdata(&fit, w))?;
        if fit.within_tolerance() == Some(false) {
            out.outcome.violations.push(format!(
                "{} over {}: exponent {} outside {} +- {}",
                fit.quantity,
                fit.family,
                sig12(fit.fitted_exponent),
                sig12(fit.expected_exponent.unwrap_or(f64::NAN)),
                sig12(fit.tolerance.unwrap_or(f64::NAN))
            ));
        }
        fits.push(rounded_fit(&fit));
    }
    out.json("scaling.json", &fits)
}

fn family_tag(family: &Family) -> String {
    match family {
        Family::TorusDiagonal { n_min, n_max } => format!("torus_nn_{n_min}-{n_max}"),
        Family::Zonal { l_min, l_max } => format!("zonal_{l_min}-{l_max}"),
        Family::DirichletDiagonal { n_min, n_max, .. } => format!("rect_nn_{n_min}-{n_max}"),
    }
}

fn rounded_fit(fit: &ScalingFit) -> ScalingFit {
    ScalingFit {
        points: fit.points.iter().map(|&(l, v)| (round12(l), round12(v))).collect(),
        fitted_exponent: round12(fit.fitted_exponent),
        intercept: round12(fit.intercept),
        residual: round12(fit.residual),
        ..fit.clone()
    }
}

/// Plot data for one fit: `log_lambda,log_value,fit_prediction,slope,in_fit,
/// quantity,expected_exponent`, one row per member in ascending `lambda`.
/// `slope` is the secant slope to the previous member (to the next one on
/// the first row); `in_fit` is 0 for members the fit excluded.
pub fn emit_plotdata<W: Write>(fit: &ScalingFit, mut w: W) -> io::Result<()> {
    writeln!(w, "log_lambda,log_value,fit_prediction,slope,in_fit,quantity,expected_exponent")?;
    let logs: Vec<(f64, f64)> = fit.points.iter().map(|&(l, v)| (l.ln(), v.ln())).collect();
    let expected = fit.expected_exponent.map(sig12).unwrap_or_default();
    for (i, &(x, y)) in logs.iter().enumerate() {
        let (a, b) = if i == 0 { (0, 1) } else { (i - 1, i) };
        let slope = match (logs.get(a), logs.get(b)) {
            (Some(p), Some(q)) => (q.1 - p.1) / (q.0 - p.0),
            _ => f64::NAN,
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            sig12(x),
            sig12(y),
            sig12(fit.intercept + fit.fitted_exponent * x),
            sig12(slope),
            u8::from(i >= fit.excluded),
            fit.quantity,
            expected
        )?;
    }
    Ok(())
}

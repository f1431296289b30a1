//! One function per subcommand. Each turns a [`RunConfig`] into a table (or
//! report) plus an optional plot; rendering lives in [`crate::output`].

use std::fs::File;

use hpsym_core::bounds::{bounds_sweep, ell_delta};
use hpsym_core::clipping::{clipping_report, ell_hat_exact, entropy_bits};
use hpsym_core::io::{bounds_table, clipping_table, format_number, qgrid_table, read_chi_csv, remnant_table, CsvTable};
use hpsym_core::remnant::{q_function, remnant_bounds};
use hpsym_core::{gaussian_spectrum, BlackHoleSpec, SectorSpectrum};
use hpsym_validate::{run_validation_with, ValidationOptions, ValidationReport};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::fit;
use crate::svg::{self, Series};

/// Result of one subcommand before rendering.
pub struct Outcome {
    pub table: CsvTable,
    /// Extra `# ` preamble lines, such as fit summaries.
    pub notes: Vec<String>,
    pub fits: Vec<FitRecord>,
    pub plot: Option<String>,
    pub report: Option<ValidationReport>,
}

impl Outcome {
    fn table(table: CsvTable) -> Self {
        Outcome {
            table,
            notes: Vec::new(),
            fits: Vec::new(),
            plot: None,
            report: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FitRecord {
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub lambda: Option<f64>,
    pub dl_coeff: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    pub power_law: Option<fit::PowerLaw>,
    pub mixed: Option<fit::Mixed>,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let want_plot = cfg.format == crate::config::Format::Svg;
    let mut out = match cfg.command {
        Command::Bounds => bounds(cfg)?,
        Command::Delay | Command::Scaling => delay(cfg)?,
        Command::Clipping => clipping(cfg)?,
        Command::Remnant => remnant(cfg)?,
        Command::Qfunc => qfunc(cfg)?,
        Command::Validate => validate(cfg)?,
    };
    if !want_plot {
        out.plot = None;
    }
    Ok(out)
}

fn size(cfg: &RunConfig) -> usize {
    cfg.n.expect("N checked during resolution")
}

fn make_spec(cfg: &RunConfig, n: usize, l: f64, dl_coeff: f64) -> Result<BlackHoleSpec, CliError> {
    Ok(BlackHoleSpec::new(n, cfg.k, l, cfg.delta_l(dl_coeff, n), cfg.kind)?.with_width(cfg.width))
}

fn load_chi(cfg: &RunConfig, spec: &BlackHoleSpec) -> Result<SectorSpectrum, CliError> {
    let chi = match &cfg.chi {
        Some(path) => read_chi_csv(File::open(path).map_err(|e| {
            std::io::Error::new(e.kind(), format!("{path}: {e}"))
        })?)?,
        None => gaussian_spectrum(spec)?,
    };
    chi.check_matches(spec)?;
    Ok(chi)
}

fn ell_range(cfg: &RunConfig, spec: &BlackHoleSpec) -> Result<Vec<usize>, CliError> {
    let ells = cfg.ell_grid.clone().unwrap_or_else(|| (0..=spec.total()).collect());
    for &ell in &ells {
        spec.check_ell(ell)?;
    }
    Ok(ells)
}

fn combos(cfg: &RunConfig) -> Vec<(f64, f64)> {
    cfg.l_values
        .iter()
        .flat_map(|&l| cfg.dl_coeffs.iter().map(move |&c| (l, c)))
        .collect()
}

fn bounds(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = size(cfg);
    let mut table = CsvTable::new(&hpsym_core::io::BOUNDS_HEADER);
    let mut series = Vec::new();
    for (l, c) in combos(cfg) {
        let spec = make_spec(cfg, n, l, c)?;
        let chi = load_chi(cfg, &spec)?;
        let reports = bounds_sweep(&spec, &chi, &ell_range(cfg, &spec)?)?;
        let tag = format!("L={l} dL={c}");
        series.push(Series {
            label: format!("inv {tag}"),
            points: reports.iter().map(|r| (r.ell as f64, r.delta_inv_bound)).collect(),
            dashed: false,
        });
        series.push(Series {
            label: format!("tot {tag}"),
            points: reports.iter().map(|r| (r.ell as f64, r.delta_tot_bound)).collect(),
            dashed: true,
        });
        table.extend(bounds_table(&reports));
    }
    let mut out = Outcome::table(table);
    out.plot = Some(svg::line_plot("recovery-error bounds", "ell", "bound", &series, true));
    Ok(out)
}

struct DelayJob {
    n: usize,
    lambda: Option<f64>,
    l: f64,
    group: usize,
    dl_coeff: f64,
    delta: f64,
}

pub const DELAY_HEADER: [&str; 10] = ["N", "k", "kind", "lambda", "L", "dL", "Delta", "ell_Delta", "baseline", "delay"];

fn delay(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let sizes = cfg.sweep_n.clone().unwrap_or_else(|| vec![size(cfg)]);
    let positions: Vec<(Option<f64>, Option<f64>)> = match &cfg.lambda_grid {
        Some(g) => g.iter().map(|&lam| (Some(lam), None)).collect(),
        None => cfg.l_values.iter().map(|&l| (None, Some(l))).collect(),
    };
    let mut jobs = Vec::new();
    for &n in &sizes {
        for (pi, &(lambda, l)) in positions.iter().enumerate() {
            for (ci, &dl_coeff) in cfg.dl_coeffs.iter().enumerate() {
                for (di, &delta) in cfg.deltas.iter().enumerate() {
                    let group = (pi * cfg.dl_coeffs.len() + ci) * cfg.deltas.len() + di;
                    let l = l.unwrap_or_else(|| lambda.unwrap_or(0.0) * n as f64);
                    jobs.push(DelayJob { n, lambda, l, group, dl_coeff, delta });
                }
            }
        }
    }
    let results = jobs
        .par_iter()
        .map(|j| {
            let spec = make_spec(cfg, j.n, j.l, j.dl_coeff)?;
            let chi = load_chi(cfg, &spec)?;
            Ok((spec, ell_delta(&spec, &chi, j.delta)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut table = CsvTable::new(&DELAY_HEADER);
    for (j, (spec, r)) in jobs.iter().zip(&results) {
        table.push(vec![
            spec.n.to_string(),
            spec.k.to_string(),
            spec.kind.to_string(),
            format_number(j.lambda.unwrap_or(spec.l / spec.n as f64)),
            format_number(spec.l),
            format_number(spec.delta_l),
            format_number(j.delta),
            hpsym_core::io::format_count(r.ell_delta),
            hpsym_core::io::format_count(r.baseline),
            r.delay.map_or_else(|| "unreached".into(), |d| d.to_string()),
        ]);
    }
    let groups = positions.len() * cfg.dl_coeffs.len() * cfg.deltas.len();
    let x_of = |j: &DelayJob| {
        if cfg.sweep_n.is_some() {
            j.n as f64
        } else {
            j.lambda.unwrap_or(j.l)
        }
    };
    let mut series = Vec::new();
    let mut fits = Vec::new();
    let mut notes = Vec::new();
    for g in 0..groups {
        let members: Vec<(&DelayJob, f64)> = jobs
            .iter()
            .zip(&results)
            .filter(|(j, _)| j.group == g)
            .filter_map(|(j, (_, r))| r.delay.map(|d| (j, d as f64)))
            .collect();
        let Some(first) = jobs.iter().find(|j| j.group == g) else { continue };
        let position = match first.lambda {
            Some(lam) => format!("lambda={lam}"),
            None => format!("L={}", first.l),
        };
        let tag = format!("{position} dL={} Delta={}", first.dl_coeff, first.delta);
        series.push(Series {
            label: tag.clone(),
            points: members.iter().map(|(j, d)| (x_of(j), *d)).collect(),
            dashed: false,
        });
        if cfg.fit {
            let xs: Vec<f64> = members.iter().map(|(j, _)| j.n as f64).collect();
            let ys: Vec<f64> = members.iter().map(|(_, d)| *d).collect();
            let rec = FitRecord {
                l: first.lambda.is_none().then_some(first.l),
                lambda: first.lambda,
                dl_coeff: first.dl_coeff,
                delta: first.delta,
                power_law: fit::power_law(&xs, &ys),
                mixed: fit::mixed(&xs, &ys),
            };
            notes.push(format!("fit {tag}: {}", describe_fit(&rec)));
            fits.push(rec);
        }
    }
    let x_label = if cfg.sweep_n.is_some() { "N" } else if cfg.lambda_grid.is_some() { "lambda" } else { "L" };
    let mut out = Outcome::table(table);
    out.notes = notes;
    out.fits = fits;
    out.plot = Some(svg::line_plot("delay", x_label, "delay (qubits)", &series, false));
    Ok(out)
}

fn describe_fit(rec: &FitRecord) -> String {
    let power = rec.power_law.map_or_else(
        || "power-law n/a".to_string(),
        |f| format!("a*N^p a={} p={} r2={} points={}", format_number(f.a), format_number(f.p), format_number(f.r2), f.points),
    );
    let mixed = rec.mixed.map_or_else(
        || "mixed n/a".to_string(),
        |f| {
            format!(
                "a*N+b*sqrt(N)+c a={} b={} c={} rms={}",
                format_number(f.a),
                format_number(f.b),
                format_number(f.c),
                format_number(f.rms)
            )
        },
    );
    format!("{power}; {mixed}")
}

fn clipping(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = size(cfg);
    let lambdas = cfg.lambda_grid.clone().expect("lambda grid checked during resolution");
    let dl = cfg.dl_coeffs[0];
    let base = make_spec(cfg, n, 0.0, dl)?;
    let baselines = cfg
        .c
        .iter()
        .map(|&c| Ok(ell_hat_exact(&base, 0.0, entropy_bits(&base, 0.0, cfg.entropy)?, c)?))
        .collect::<Result<Vec<_>, CliError>>()?;
    let jobs: Vec<(f64, usize)> = lambdas
        .iter()
        .flat_map(|&lam| (0..cfg.c.len()).map(move |ci| (lam, ci)))
        .collect();
    let reports = jobs
        .par_iter()
        .map(|&(lam, ci)| {
            let spec = make_spec(cfg, n, lam * n as f64, dl)?;
            let h = entropy_bits(&spec, lam, cfg.entropy)?;
            Ok(clipping_report(&spec, lam, h, cfg.c[ci], cfg.temperature)?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut table = clipping_table(&reports);
    table.header.push("delay".into());
    for (row, (r, &(_, ci))) in table.rows.iter_mut().zip(reports.iter().zip(&jobs)) {
        let delay = match (r.ell_hat_exact, baselines[ci]) {
            (Some(a), Some(b)) => (a as i64 - b as i64).to_string(),
            _ => "unreached".into(),
        };
        row.push(delay);
    }
    let series: Vec<Series> = cfg
        .c
        .iter()
        .enumerate()
        .flat_map(|(ci, &c)| {
            let pick = |f: &dyn Fn(&hpsym_core::clipping::ClippingReport) -> f64| -> Vec<(f64, f64)> {
                reports
                    .iter()
                    .zip(&jobs)
                    .filter(|(_, j)| j.1 == ci)
                    .map(|(r, _)| (r.lambda, f(r)))
                    .collect()
            };
            [
                Series {
                    label: format!("exact c={c}"),
                    points: pick(&|r| r.ell_hat_exact.map_or(f64::NAN, |v| v as f64)),
                    dashed: false,
                },
                Series {
                    label: format!("closed c={c}"),
                    points: pick(&|r| r.closed.ell_hat_closed),
                    dashed: true,
                },
            ]
        })
        .collect();
    let mut out = Outcome::table(table);
    out.plot = Some(svg::line_plot("clipping threshold", "lambda", "ell", &series, false));
    Ok(out)
}

fn single_spec(cfg: &RunConfig) -> Result<(BlackHoleSpec, SectorSpectrum), CliError> {
    let spec = make_spec(cfg, size(cfg), cfg.l_values[0], cfg.dl_coeffs[0])?;
    let chi = load_chi(cfg, &spec)?;
    Ok((spec, chi))
}

fn remnant(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (spec, chi) = single_spec(cfg)?;
    let reports = ell_range(cfg, &spec)?
        .par_iter()
        .map(|&ell| remnant_bounds(&spec, &chi, ell))
        .collect::<Result<Vec<_>, _>>()?;
    let pick = |f: fn(&hpsym_core::remnant::RemnantReport) -> f64| -> Vec<(f64, f64)> {
        reports.iter().map(|r| (r.ell as f64, f(r))).collect()
    };
    let series = vec![
        Series { label: "eta".into(), points: pick(|r| r.eta_exact), dashed: false },
        Series { label: "variance bound".into(), points: pick(|r| r.bound_exact_variance), dashed: true },
    ];
    let mut out = Outcome::table(remnant_table(&reports));
    out.plot = Some(svg::line_plot("information remnant", "ell", "eta", &series, true));
    Ok(out)
}

fn qfunc(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (spec, chi) = single_spec(cfg)?;
    let grid = q_function(&spec, &chi, cfg.resolution)?;
    let mut out = Outcome::table(qgrid_table(&grid));
    out.plot = Some(svg::heatmap("Q function", &grid));
    Ok(out)
}

fn validate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (spec, chi) = single_spec(cfg)?;
    let opts = ValidationOptions {
        samples: cfg.samples,
        seed: cfg.seed,
        delta: cfg.delta,
        epsilon: cfg.epsilon,
        mode: cfg.mode,
        d_th: cfg.d_th,
    };
    let report = run_validation_with(&spec, &chi, cfg.ell.expect("ell checked during resolution"), &opts)?;
    let mut out = Outcome::table(report.distances_table());
    out.report = Some(report);
    Ok(out)
}

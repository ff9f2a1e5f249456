use std::fs;
use std::path::Path;

use ndr_core::dist::{
    joint_pdf_exponential, joint_pdf_gamma, ndr_moment, ndr_pdf, ratio_pdf, Formulation, GammaPairParams,
};
use ndr_core::sampling::{
    chunk_count, map_chunk_range, sample_complex_pair, sample_intensity_pair, GammaPairSampler, SeedSpec,
};
use ndr_core::validate::checks::default_joint_upper;
use ndr_core::validate::figures::{figure_joint_histogram, figure_joint_theory, figure_ratio_ndr, linear_grid};
use ndr_core::validate::{
    figure_corr_curve, figure_moments_vs_k, figure_ndr_vs_rho, moment_table, run_suite, FitConfig, SuiteConfig,
    Table,
};

use crate::args::{
    param_metadata, FiguresArgs, MomentsArgs, ParamDefaults, PdfArgs, PdfTarget, SampleArgs, SampleTarget,
    ValidateArgs,
};
use crate::error::{CliError, CliResult};
use crate::output::{format_number, write_json, Cell, Format, Metadata, TableSink};

/// Chunks generated per write batch in `sample`.
const SAMPLE_WRITE_CHUNKS: usize = 16;

fn grid_metadata(meta: &mut Metadata, lo: f64, hi: f64, points: usize) {
    meta.push((
        "grid".into(),
        format!("lo={} hi={} points={points}", format_number(lo), format_number(hi)),
    ));
}

fn seed_metadata(meta: &mut Metadata, seed: SeedSpec, n: usize) {
    meta.push(("seed".into(), format!("{} stream={}", seed.seed, seed.stream_id)));
    meta.push(("n".into(), n.to_string()));
}

pub fn pdf(a: &PdfArgs) -> CliResult<()> {
    let p = a.params.resolve(ParamDefaults::PLAIN)?;
    let name = match a.target {
        PdfTarget::JointExp => "joint-exp",
        PdfTarget::JointGamma => "joint-gamma",
        PdfTarget::Ratio => "ratio",
        PdfTarget::Ndr => "ndr",
    };
    let mut meta = param_metadata(&format!("pdf {name}"), &p);
    match a.target {
        PdfTarget::Ratio | PdfTarget::Ndr => {
            let (lo, hi, points) = match a.target {
                PdfTarget::Ratio => (a.lo.unwrap_or(0.1), a.hi.unwrap_or(10.0), a.points.unwrap_or(100)),
                _ => (a.lo.unwrap_or(0.0), a.hi.unwrap_or(1.0), a.points.unwrap_or(101)),
            };
            check_grid(lo, hi, points)?;
            grid_metadata(&mut meta, lo, hi, points);
            let column = if a.target == PdfTarget::Ratio { "z" } else { "r" };
            let rows = linear_grid(lo, hi, points)
                .into_iter()
                .map(|x| {
                    let v = match a.target {
                        PdfTarget::Ratio => ratio_pdf(&p, x)?,
                        _ => ndr_pdf(&p, x)?,
                    };
                    Ok([x, v])
                })
                .collect::<CliResult<Vec<_>>>()?;
            let mut sink = TableSink::create(a.output.out.as_deref(), a.output.format, &meta, &[column, "pdf"])?;
            for row in &rows {
                sink.num_row(row)?;
            }
            sink.finish()
        }
        PdfTarget::JointExp | PdfTarget::JointGamma => {
            let lo = a.lo.unwrap_or(0.0);
            let hi = a.hi.unwrap_or_else(|| default_joint_upper(&p));
            let points = a.points.unwrap_or(50);
            check_grid(lo, hi, points)?;
            grid_metadata(&mut meta, lo, hi, points);
            let grid = linear_grid(lo, hi, points);
            let mut rows = Vec::with_capacity(points * points);
            for &x1 in &grid {
                for &x2 in &grid {
                    let v = if a.target == PdfTarget::JointExp {
                        joint_pdf_exponential(&p, x1, x2)?
                    } else {
                        joint_pdf_gamma(&p, x1, x2)?
                    };
                    rows.push([x1, x2, v]);
                }
            }
            let mut sink =
                TableSink::create(a.output.out.as_deref(), a.output.format, &meta, &["x1", "x2", "pdf"])?;
            for row in &rows {
                sink.num_row(row)?;
            }
            sink.finish()
        }
    }
}

fn check_grid(lo: f64, hi: f64, points: usize) -> CliResult<()> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(CliError::Usage(format!("grid needs finite lo <= hi, got [{lo}, {hi}]")));
    }
    if points == 0 || (points == 1 && lo != hi) {
        return Err(CliError::Usage(format!("grid needs at least two points, got {points}")));
    }
    Ok(())
}

pub fn moments(a: &MomentsArgs) -> CliResult<()> {
    let p = a.params.resolve(ParamDefaults::PLAIN)?;
    let mut meta = param_metadata("moments", &p);
    let seed = SeedSpec::new(a.seed.seed, a.seed.stream);
    if a.mc {
        seed_metadata(&mut meta, seed, a.n);
    }
    let mut columns = vec!["m", "f1", "f2", "f3"];
    if a.mc {
        columns.extend(["mc_estimate", "mc_std_error", "mc_consistent"]);
    }
    let mut sink = TableSink::create(a.output.out.as_deref(), a.output.format, &meta, &columns)?;
    if a.mc {
        for r in moment_table(&p, &a.orders, a.n, seed)? {
            sink.row(&[
                Cell::Int(r.m.into()),
                r.analytic_f1.into(),
                r.analytic_f2.into(),
                r.analytic_f3.into(),
                r.mc_estimate.into(),
                r.mc_std_error.into(),
                Cell::Bool(r.mc_consistent),
            ])?;
        }
    } else {
        for &m in &a.orders {
            let mut row = vec![Cell::Int(m.into())];
            for form in Formulation::ALL {
                row.push(ndr_moment(&p, m, form)?.into());
            }
            sink.row(&row)?;
        }
    }
    sink.finish()
}

pub fn sample(a: &SampleArgs) -> CliResult<()> {
    let p = a.params.resolve(ParamDefaults::PLAIN)?;
    if a.n == 0 {
        return Err(CliError::Usage("sample count must be at least 1".into()));
    }
    if a.n > a.max_count {
        return Err(ndr_core::Error::TooLarge {
            requested: a.n,
            cap: a.max_count,
        }
        .into());
    }
    let (name, columns): (&str, &[&str]) = match a.kind {
        SampleTarget::Complex => ("complex", &["z1_re", "z1_im", "z2_re", "z2_im"]),
        SampleTarget::Intensity => ("intensity", &["x1", "x2"]),
        SampleTarget::Gamma => ("gamma", &["x1", "x2"]),
        SampleTarget::Ndr => ("ndr", &["d"]),
    };
    let seed = SeedSpec::new(a.seed.seed, a.seed.stream);
    let mut meta = param_metadata(&format!("sample {name}"), &p);
    seed_metadata(&mut meta, seed, a.n);
    let mut sink = TableSink::create(a.output.out.as_deref(), a.output.format, &meta, columns)?;
    let field = p.field();
    let sampler = match a.kind {
        SampleTarget::Gamma | SampleTarget::Ndr => Some(GammaPairSampler::new(&p)?),
        _ => None,
    };
    let width = columns.len();
    let draw = |rng: &mut ndr_core::sampling::StreamRng, len: usize| -> Vec<f64> {
        let mut out = Vec::with_capacity(len * width);
        for _ in 0..len {
            match (a.kind, &sampler) {
                (SampleTarget::Complex, _) => {
                    let c = sample_complex_pair(&field, rng);
                    out.extend([c.z1_re, c.z1_im, c.z2_re, c.z2_im]);
                }
                (SampleTarget::Intensity, _) => {
                    let q = sample_intensity_pair(&field, rng);
                    out.extend([q.x1, q.x2]);
                }
                (SampleTarget::Gamma, Some(s)) => {
                    let q = s.sample(rng);
                    out.extend([q.x1, q.x2]);
                }
                (SampleTarget::Ndr, Some(s)) => out.push(s.sample_ndr(rng)),
                _ => unreachable!("sampler built for gamma and ndr"),
            }
        }
        out
    };
    let total = chunk_count(a.n);
    let mut start = 0;
    while start < total {
        let end = (start + SAMPLE_WRITE_CHUNKS).min(total);
        for block in map_chunk_range(a.n, seed, start..end, draw) {
            for row in block.chunks_exact(width) {
                sink.num_row(row)?;
            }
        }
        start = end;
    }
    sink.finish()
}

pub fn validate(a: &ValidateArgs) -> CliResult<()> {
    let mut cfg = if a.quick { SuiteConfig::quick() } else { SuiteConfig::full() };
    cfg.seed = a.seed;
    cfg.perturb = a.perturb_pdf;
    if let Some(n) = a.n {
        cfg.n = n;
        cfg.n_joint = cfg.n_joint.max(n);
    }
    if let Some(b) = a.bins {
        cfg.bins = b;
    }
    let report = run_suite(&cfg)?;
    match a.format {
        Format::Json => write_json(a.out.as_deref(), &report)?,
        Format::Csv => {
            let meta = vec![
                ("ndr-stats".into(), env!("CARGO_PKG_VERSION").into()),
                ("command".into(), "validate".into()),
                ("config".into(), serde_json::to_string(&cfg).unwrap_or_default()),
                ("pass".into(), report.pass.to_string()),
            ];
            let mut sink = TableSink::create(
                a.out.as_deref(),
                Format::Csv,
                &meta,
                &["name", "pass", "statistic", "threshold", "detail"],
            )?;
            for c in &report.checks {
                sink.row(&[
                    Cell::Text(c.name.clone()),
                    Cell::Bool(c.pass),
                    c.statistic.into(),
                    c.threshold.into(),
                    Cell::Text(c.detail.clone()),
                ])?;
            }
            sink.finish()?;
        }
    }
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(failed.join(", ")))
    }
}

fn write_table(dir: &Path, id: u8, format: Format, meta: &Metadata, t: &Table) -> CliResult<()> {
    let path = dir.join(format!("figure{id}.{}", format.extension()));
    let cols: Vec<&str> = t.columns.iter().map(String::as_str).collect();
    let mut sink = TableSink::create(Some(&path), format, meta, &cols)?;
    for row in &t.rows {
        sink.num_row(row)?;
    }
    sink.finish()
}

/// Shapes shown in figures 6 and 7.
pub const FIGURE_K_SET: [f64; 5] = [1.0, 2.0, 3.0, 5.0, 12.0];

pub fn figures(a: &FiguresArgs) -> CliResult<()> {
    // sigma = 2 * 0.7^2, rho = 0.8^2, k = 12 unless overridden
    let paper = ParamDefaults {
        k: 12.0,
        sigma: 0.98,
        rho: 0.64,
    };
    let p = a.params.resolve(paper)?;
    let which: Vec<u8> = if a.which.is_empty() { (1..=8).collect() } else { a.which.clone() };
    fs::create_dir_all(&a.out).map_err(|e| CliError::io(&a.out, e))?;
    let cfg = FitConfig::default();
    let rho_grid = linear_grid(0.0, 0.99, 100);
    for id in which {
        let seed = SeedSpec::new(a.seed, u64::from(id) * 100);
        let exp = GammaPairParams::new(p.sigma(), p.rho(), 1.0)?;
        let (used, table): (Option<&GammaPairParams>, Table) = match id {
            1 => (None, figure_corr_curve(&ndr_core::validate::figures::default_rho_z_grid(), p.field().sigma_z(), a.n, seed)?),
            2 => (Some(&exp), figure_joint_histogram(&exp, 50, a.n, seed, &cfg)?),
            3 => (Some(&p), figure_joint_histogram(&p, 50, a.n, seed, &cfg)?),
            4 => (Some(&p), figure_joint_theory(&[1.0, p.k()], p.sigma(), p.rho(), 50)?),
            5 => (Some(&p), figure_ratio_ndr(&p, a.bins, a.n, seed, &cfg)?),
            6 => {
                let full = figure_ndr_vs_rho(&FIGURE_K_SET, &rho_grid)?;
                let mut t = Table::new(&["k", "rho", "mean"]);
                for r in &full.rows {
                    t.push(r[..3].to_vec());
                }
                (None, t)
            }
            7 => (None, figure_ndr_vs_rho(&FIGURE_K_SET, &rho_grid)?),
            8 => {
                let ks: Vec<f64> = (1..=20).map(f64::from).collect();
                (None, figure_moments_vs_k(&ks, &[1, 2, 3, 4], 0.0)?)
            }
            _ => return Err(CliError::Usage(format!("unknown figure id {id}"))),
        };
        let mut meta = match used {
            Some(q) => param_metadata(&format!("figures {id}"), q),
            None => vec![
                ("ndr-stats".into(), env!("CARGO_PKG_VERSION").into()),
                ("command".into(), format!("figures {id}")),
            ],
        };
        if matches!(id, 1 | 2 | 3 | 5) {
            seed_metadata(&mut meta, seed, a.n);
        }
        if id == 1 {
            meta.push(("sigma_z".into(), format_number(p.field().sigma_z())));
        }
        write_table(&a.out, id, a.format, &meta, &table)?;
    }
    Ok(())
}

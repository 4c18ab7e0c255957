//! The six commands. Each `compute_*` is pure; each `cmd_*` also writes the
//! requested files and returns a short report for stdout.

use std::path::PathBuf;

use dirac_warp::branch::Branch;
use dirac_warp::eta::EtaReport;
use dirac_warp::flow::{CrossingClass, RegularizedFamily, SpectralFlowReport, TouchingPolicy};
use dirac_warp::gauge::allowed_modes;
use dirac_warp::heun::SingularityReport;
use dirac_warp::modes::ModeContext;
use dirac_warp::ode::{integrate_fundamental, wronskian_drift, Basis};
use dirac_warp::spectrum::{char_fn, find_eigenvalues, SpectralWindow};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{num, Emitter, Table};
use crate::svg::{Plot, Series};
use crate::CliError;

/// What a command printed and wrote.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: String,
    pub written: Vec<PathBuf>,
}

fn context(cfg: &RunConfig, k: f64) -> Result<ModeContext, CliError> {
    Ok(ModeContext::new(k, cfg.gauge, cfg.spin, cfg.profile())?)
}

fn window(cfg: &RunConfig) -> Result<SpectralWindow, CliError> {
    Ok(SpectralWindow::new(cfg.lambda_min, cfg.lambda_max, cfg.scan_points)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct CharFnSamples {
    pub k: f64,
    pub m: f64,
    pub lambda: Vec<f64>,
    pub value: Vec<f64>,
}

pub fn compute_charfn(cfg: &RunConfig) -> Result<CharFnSamples, CliError> {
    cfg.validate()?;
    let ctx = context(cfg, cfg.single_mode()?)?;
    let lambda = window(cfg)?.grid();
    let value = lambda
        .par_iter()
        .map(|&l| char_fn(&ctx, l, &cfg.integrator))
        .collect::<dirac_warp::Result<Vec<f64>>>()?;
    Ok(CharFnSamples {
        k: ctx.k(),
        m: ctx.m(),
        lambda,
        value,
    })
}

pub fn cmd_charfn(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let s = compute_charfn(cfg)?;
    let mut out = Emitter::new(cfg, "charfn");
    let mut t = Table::new(&["lambda", "F"]);
    for (l, v) in s.lambda.iter().zip(&s.value) {
        t.push(vec![num(*l), num(*v)]);
    }
    out.csv("charfn.csv", &t)?;
    out.json("charfn.json", &s)?;
    out.svg(
        "charfn.svg",
        &Plot {
            title: format!("F_k(λ), α = {}, A = {}, k = {}, T = {}", cfg.alpha, cfg.gauge, s.k, cfg.length),
            x_label: "λ".into(),
            y_label: "F_k(λ)".into(),
            series: vec![Series {
                label: format!("k = {}", s.k),
                points: s.lambda.iter().cloned().zip(s.value.iter().cloned()).collect(),
            }],
            zero_axis: true,
            markers: Vec::new(),
        },
    )?;
    let changes = s.value.windows(2).filter(|w| (w[0] < 0.0) != (w[1] < 0.0)).count();
    Ok(Outcome {
        report: format!("charfn: k = {}, m = {}, {} samples, {changes} sign changes", s.k, s.m, s.value.len()),
        written: out.written,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootEntry {
    pub lambda: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeRoots {
    pub k: f64,
    pub roots: Vec<RootEntry>,
}

pub fn compute_spectrum(cfg: &RunConfig) -> Result<Vec<ModeRoots>, CliError> {
    cfg.validate()?;
    let w = window(cfg)?;
    cfg.modes()
        .iter()
        .map(|&k| {
            let list = find_eigenvalues(&context(cfg, k)?, &w, &cfg.integrator)?;
            Ok(ModeRoots {
                k,
                roots: list
                    .roots
                    .iter()
                    .map(|r| RootEntry {
                        lambda: r.lambda,
                        residual: r.residual,
                    })
                    .collect(),
            })
        })
        .collect()
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let modes = compute_spectrum(cfg)?;
    let mut out = Emitter::new(cfg, "spectrum");
    let mut t = Table::new(&["k", "lambda", "residual"]);
    for m in &modes {
        for r in &m.roots {
            t.push(vec![num(m.k), num(r.lambda), num(r.residual)]);
        }
    }
    out.csv("spectrum.csv", &t)?;
    out.json("spectrum.json", &modes)?;
    out.svg(
        "spectrum.svg",
        &Plot {
            title: format!("APS eigenvalues by mode, A = {}", cfg.gauge),
            x_label: "k".into(),
            y_label: "λ".into(),
            series: Vec::new(),
            zero_axis: true,
            markers: modes.iter().flat_map(|m| m.roots.iter().map(move |r| (m.k, r.lambda))).collect(),
        },
    )?;
    let mut report = String::from("spectrum:");
    for m in &modes {
        report.push_str(&format!("\n  k = {}: {} eigenvalue(s)", m.k, m.roots.len()));
    }
    Ok(Outcome {
        report,
        written: out.written,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowResult {
    pub path: String,
    pub report: SpectralFlowReport,
    /// Orientation is fixed by comparing the signed count with the winding.
    pub orientation_note: String,
    pub delta_note: String,
    pub branches: Vec<Branch>,
}

pub fn compute_flow(cfg: &RunConfig, with_branches: bool) -> Result<FlowResult, CliError> {
    cfg.validate()?;
    let path = cfg.gauge_path()?;
    let fam = RegularizedFamily::new(path, cfg.spin, cfg.delta, cfg.profile(), cfg.integrator)?;
    let policy = if cfg.exclude_touching {
        TouchingPolicy::Exclude
    } else {
        TouchingPolicy::Refuse
    };
    let report = fam.spectral_flow(policy)?;
    let branches = if with_branches {
        let modes = allowed_modes(cfg.spin, &fam.path);
        let lmax = cfg.lambda_min.abs().max(cfg.lambda_max.abs());
        fam.track_all(&modes, lmax, cfg.scan_points, cfg.s_step)?
    } else {
        Vec::new()
    };
    let orientation_note = match report.orientation {
        Some(o) => format!("upward crossings count +1; signed count = {o} × winding"),
        None => "winding is not integral or does not match the signed count".into(),
    };
    let delta_note = format!(
        "delta = {} is a configurable choice; threshold 2/ell(T) = {}",
        report.delta, report.threshold
    );
    Ok(FlowResult {
        path: fam.path.label().to_string(),
        report,
        orientation_note,
        delta_note,
        branches,
    })
}

fn class_name(c: CrossingClass) -> &'static str {
    match c {
        CrossingClass::Transverse => "transverse",
        CrossingClass::Touching => "touching",
        CrossingClass::Unclassified => "unclassified",
    }
}

pub fn cmd_flow(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let r = compute_flow(cfg, true)?;
    let mut out = Emitter::new(cfg, "flow");
    let mut t = Table::new(&["k", "s_star", "class", "a_prime", "a_second", "slope", "slope_sign"]);
    for c in &r.report.crossings {
        t.push(vec![
            num(c.k),
            num(c.s_star),
            class_name(c.class).into(),
            num(c.a_prime),
            num(c.a_second),
            c.slope.map_or_else(String::new, num),
            c.slope_sign.to_string(),
        ]);
    }
    out.csv("crossings.csv", &t)?;
    let mut b = Table::new(&["branch", "k", "s", "lambda", "residual"]);
    for (i, br) in r.branches.iter().enumerate() {
        for p in &br.samples {
            b.push(vec![i.to_string(), num(br.k), num(p.s), num(p.lambda), num(p.residual)]);
        }
    }
    out.csv("branches.csv", &b)?;
    out.json("flow.json", &r)?;
    out.svg(
        "flow.svg",
        &Plot {
            title: format!("Tracked branches λ(s, k), {}", r.path),
            x_label: "s".into(),
            y_label: "λ".into(),
            series: r
                .branches
                .iter()
                .map(|br| Series {
                    label: format!("k = {}", br.k),
                    points: br.samples.iter().map(|p| (p.s, p.lambda)).collect(),
                })
                .collect(),
            zero_axis: true,
            markers: r.report.crossings.iter().map(|c| (c.s_star, 0.0)).collect(),
        },
    )?;
    let winding = r.report.winding.map_or_else(|| "n/a".into(), |w| w.to_string());
    let mut report = format!(
        "flow: {} crossing(s), {} touching excluded\nspectral flow = {} (winding {winding}, |SF| {} |winding|)",
        r.report.crossings.len(),
        if cfg.exclude_touching { r.report.excluded_touching } else { 0 },
        r.report.net,
        if Some(r.report.net.abs()) == r.report.winding.map(i64::abs) { "=" } else { "≠" },
    );
    for (k, n) in &r.report.per_mode {
        report.push_str(&format!("\n  k = {k}: {n}"));
    }
    Ok(Outcome {
        report,
        written: out.written,
    })
}

pub fn compute_eta(cfg: &RunConfig) -> Result<EtaReport, CliError> {
    cfg.validate()?;
    Ok(EtaReport::compute(cfg.gauge, cfg.spin, &cfg.profile())?)
}

pub fn cmd_eta(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let r = compute_eta(cfg)?;
    let mut out = Emitter::new(cfg, "eta");
    out.json("eta.json", &r)?;
    Ok(Outcome {
        report: serde_json::to_string_pretty(&r).map_err(|e| CliError::Io(e.to_string()))?,
        written: out.written,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WronskianCurve {
    pub t: Vec<f64>,
    pub drift: Vec<f64>,
    pub scale: f64,
    pub max_drift: f64,
}

pub fn compute_wronskian(cfg: &RunConfig) -> Result<WronskianCurve, CliError> {
    cfg.validate()?;
    let ctx = context(cfg, cfg.single_mode()?)?;
    let sol = integrate_fundamental(&ctx, cfg.lambda, Basis::ComplexUV, &cfg.integrator)?;
    let (t, drift): (Vec<f64>, Vec<f64>) = wronskian_drift(&sol, &cfg.profile()).into_iter().unzip();
    let max_drift = drift.iter().cloned().fold(0.0, f64::max);
    Ok(WronskianCurve {
        t,
        drift,
        scale: cfg.scale,
        max_drift,
    })
}

pub fn cmd_wronskian(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let w = compute_wronskian(cfg)?;
    let mut out = Emitter::new(cfg, "wronskian");
    let mut t = Table::new(&["t", "drift", "scaled"]);
    for (x, d) in w.t.iter().zip(&w.drift) {
        t.push(vec![num(*x), num(*d), num(d * w.scale)]);
    }
    out.csv("wronskian.csv", &t)?;
    out.json("wronskian.json", &w)?;
    let curve: Vec<(f64, f64)> = w.t.iter().zip(&w.drift).map(|(x, d)| (*x, d * w.scale)).collect();
    let label = format!("{:e}·|f det Ψ − f(0)|", w.scale);
    let plot = |title: &str, points: Vec<(f64, f64)>| Plot {
        title: title.into(),
        x_label: "t".into(),
        y_label: label.clone(),
        series: vec![Series {
            label: format!("λ = {}", cfg.lambda),
            points,
        }],
        zero_axis: false,
        markers: Vec::new(),
    };
    out.svg("wronskian.svg", &plot("Wronskian drift", curve.clone()))?;
    let zoom_end = 0.2 * cfg.length;
    out.svg(
        "wronskian_zoom.svg",
        &plot(
            "Wronskian drift (zoom)",
            curve.into_iter().filter(|p| p.0 <= zoom_end).collect(),
        ),
    )?;
    Ok(Outcome {
        report: format!(
            "wronskian: max |f det Ψ − f(0)| = {:e} (scaled {:.3})",
            w.max_drift,
            w.max_drift * w.scale
        ),
        written: out.written,
    })
}

pub fn compute_heun(cfg: &RunConfig) -> Result<SingularityReport, CliError> {
    cfg.validate()?;
    let k = cfg.single_mode()?;
    Ok(SingularityReport::compute(cfg.alpha, cfg.lambda, k + cfg.gauge)?)
}

pub fn cmd_heun(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let r = compute_heun(cfg)?;
    let mut out = Emitter::new(cfg, "heun");
    out.json("heun.json", &r)?;
    Ok(Outcome {
        report: serde_json::to_string_pretty(&r).map_err(|e| CliError::Io(e.to_string()))?,
        written: out.written,
    })
}

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use euler2c::collision::risk_classify;
use euler2c::dynamics::integrate_with;
use euler2c::integrals::conservation_report;
use euler2c::portrait::{level_fan, render_svg, LevelCurve};
use euler2c::secular::{compare_with_direct, ComparisonSetup};
use serde_json::json;

use crate::config::{Config, ModelKind};

pub const DEFAULT_MARGIN: f64 = 0.05;

pub enum Status {
    Done,
    Collision,
}

fn create(dir: &Path, file: &str) -> anyhow::Result<BufWriter<File>> {
    let path = dir.join(file);
    Ok(BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_json(dir: &Path, file: &str, value: &serde_json::Value) -> anyhow::Result<()> {
    let path = dir.join(file);
    std::fs::write(&path, serde_json::to_string_pretty(value)? + "\n").with_context(|| format!("writing {}", path.display()))
}

pub fn simulate(c: &Config, dir: &Path) -> anyhow::Result<Status> {
    let model = c.model()?;
    let s0 = c.cartesian()?;
    let run = c.run_config()?;
    let tr = integrate_with(&s0, &model, &run)?;
    if c.wants("csv") {
        tr.write_csv(create(dir, "trajectory.csv")?)?;
    }
    if c.wants("json") {
        let report = conservation_report(&tr);
        let value = json!({
            "samples": report.samples,
            "t_final": report.t_final,
            "drift": report.drift,
            "integrator": tr.meta,
            "termination": tr.termination,
        });
        write_json(dir, "conservation.json", &value)?;
    }
    if tr.is_collision() {
        eprintln!("collision event at t = {:.6e}; trajectory truncated", tr.last().t);
        return Ok(Status::Collision);
    }
    Ok(Status::Done)
}

fn default_levels(delta: f64) -> Vec<f64> {
    let mut levels: Vec<f64> = (1..8).map(|i| -delta + (1.0 + delta) * i as f64 / 8.0).collect();
    levels.push(delta);
    levels.sort_by(f64::total_cmp);
    levels
}

pub fn portrait(c: &Config, dir: &Path) -> anyhow::Result<Status> {
    let p = c.portrait.as_ref().ok_or_else(|| anyhow!("portrait command needs a 'portrait' section"))?;
    if !(p.delta > 0.0 && p.delta < 1.0) {
        bail!("portrait needs 0 < delta < 1, got {}", p.delta);
    }
    let levels = p.levels.clone().unwrap_or_else(|| default_levels(p.delta));
    let curves: Vec<LevelCurve> = level_fan(p.delta, &levels, p.lambda, p.points).into_iter().collect::<Result<_, _>>()?;
    let mut manifest = Vec::new();
    for (i, curve) in curves.iter().enumerate() {
        if curve.is_empty() {
            eprintln!("warning: level {}: {}", curve.spec.level, curve.reason.as_deref().unwrap_or("empty level set"));
        }
        let mut files = Vec::new();
        for (k, b) in curve.branches.iter().enumerate() {
            let file = format!("level_{i:02}_{k}.csv");
            if c.wants("csv") {
                LevelCurve::write_csv(b, create(dir, &file)?)?;
            }
            files.push(json!({ "label": b.label, "file": file, "points": b.points.len() }));
        }
        manifest.push(json!({
            "level": curve.spec.level,
            "class": curve.class,
            "reason": curve.reason,
            "branches": files,
        }));
    }
    if c.wants("svg") {
        let path = dir.join("portrait.svg");
        std::fs::write(&path, render_svg(p.delta, &curves)).with_context(|| format!("writing {}", path.display()))?;
    }
    if c.wants("json") {
        write_json(dir, "portrait.json", &json!({ "delta": p.delta, "Lambda": p.lambda, "levels": manifest }))?;
    }
    Ok(Status::Done)
}

pub fn secular(c: &Config, dir: &Path) -> anyhow::Result<Status> {
    if c.model != ModelKind::TwoCentre {
        bail!("secular comparison is implemented for the two-centre model");
    }
    let p = c.mass_params()?;
    let d = c.elements()?;
    if d.theta.abs() > 1e-12 {
        bail!("secular comparison needs planar elements (Theta = 0), got Theta = {}", d.theta);
    }
    let [t0, t1] = c.integrator.t_span.ok_or_else(|| anyhow!("config needs integrator.t_span"))?;
    if t0 != 0.0 {
        bail!("secular comparison starts at t = 0");
    }
    let setup = ComparisonSetup {
        m: p.m,
        eps: p.eps,
        a: d.semi_major_axis(p.m),
        rprime: d.rprime,
        g_norm: d.g_norm,
        g: d.g,
        ell: d.ell,
        t_end: t1,
        tol: c.integrator.tol,
        samples_per_orbit: c.secular.samples_per_orbit.unwrap_or(64),
    };
    let cmp = compare_with_direct(&setup)?;
    if c.wants("csv") {
        cmp.write_csv(create(dir, "secular.csv")?)?;
    }
    if c.wants("json") {
        let value = json!({
            "setup": setup,
            "delta_g_secular": cmp.delta_g_secular,
            "delta_g_direct": cmp.delta_g_direct,
            "rel_err_delta_g": cmp.rel_err_delta_g,
            "rel_err_g_final": cmp.rel_err_g_final,
            "u_avg_nodes": cmp.u_avg_nodes,
        });
        write_json(dir, "secular.json", &value)?;
    }
    Ok(Status::Done)
}

pub fn risk(c: &Config, dir: &Path, margin: Option<f64>) -> anyhow::Result<Status> {
    let margin = margin.or(c.risk.margin).unwrap_or(DEFAULT_MARGIN);
    let p = c.mass_params()?;
    let d = c.elements()?;
    let report = risk_classify(&d, p.m, margin)?;
    let text = report.to_json()?;
    if c.wants("json") {
        std::fs::write(dir.join("risk.json"), format!("{text}\n"))?;
    }
    println!("{text}");
    Ok(Status::Done)
}

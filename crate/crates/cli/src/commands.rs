use anyhow::{bail, Context};
use num_complex::Complex64;
use serde_json::{json, Value};
use sppal_core::export::{curve_table, Cell, Table};
use sppal_core::linfield::{beam_pattern, equivalence_ratio, first_null_angle, propagation_curve, quarter_power_angle, FieldCurve};
use sppal_core::medium::Medium;
use sppal_core::nlfield::{find_audio_cd, PrimaryPair, QuasilinearSolver};
use sppal_core::optimizer::{audio_response, cd_search_grid, design_sweep, optimize_design, AudioOptions, DesignContext, SweepOptions};
use sppal_core::radiator::{
    aperture_for_cd, first_local_max, piston_profile, plate_mode_shape, radial_samples, size_plate_for, stepped_profile, PistonSpec, SourceProfile,
};
use sppal_core::transducer::{cr_screen, pzg_frf};

use crate::config::{material, LinearGrid, RunConfig, SourceBlock};

/// One output file pair: `<name>.csv` and `<name>.json`.
pub struct Artifact {
    pub name: String,
    pub table: Table,
    pub result: Value,
}

pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub warnings: Vec<String>,
    /// Extra `# ` lines for CSV headers.
    pub notes: Vec<String>,
}

impl Outcome {
    fn single(name: &str, table: Table, result: Value, warnings: Vec<String>) -> Self {
        Self { artifacts: vec![Artifact { name: name.into(), table, result }], warnings, notes: Vec::new() }
    }
}

struct Source {
    profile: SourceProfile,
    f: f64,
    radius: f64,
    /// Plate sources radiate through their stepped/flat profile; pistons do not.
    is_plate: bool,
    d_uc: Option<f64>,
}

fn source(cfg: &RunConfig, medium: &Medium) -> anyhow::Result<Source> {
    match cfg.source.as_ref().context("missing source block")? {
        SourceBlock::Piston { frequency_hz, radius_m, d_uc_m, velocity_m_s } => {
            let a = match (radius_m, d_uc_m) {
                (Some(r), _) => *r,
                (None, Some(d)) => aperture_for_cd(*d, *frequency_hz, medium)?,
                (None, None) => bail!("piston needs radius_m or d_uc_m"),
            };
            let profile = piston_profile(&PistonSpec::new(a, Complex64::new(*velocity_m_s, 0.0))?, 2)?;
            Ok(Source { profile, f: *frequency_hz, radius: a, is_plate: false, d_uc: *d_uc_m })
        }
        SourceBlock::Plate { f_u0_hz, d_uc_m, mode_m, material: m, boundary, steps, center_velocity_m_s } => {
            let plate = size_plate_for(*f_u0_hz, *d_uc_m, *mode_m, &material(m)?, medium, *boundary)?;
            let mode = plate_mode_shape(&plate)?;
            let n = radial_samples(plate.radius_a, *f_u0_hz, medium);
            let profile = stepped_profile(&mode, Complex64::new(*center_velocity_m_s, 0.0), *steps, n)?;
            Ok(Source { profile, f: *f_u0_hz, radius: plate.radius_a, is_plate: true, d_uc: Some(*d_uc_m) })
        }
    }
}

fn z_ref(radius: f64, f: f64, medium: &Medium) -> f64 {
    first_local_max(radius, f, medium).unwrap_or(radius).max(radius)
}

fn z_grid(cfg: &RunConfig, z1: f64) -> Vec<f64> {
    cfg.solver.z_grid_m.map(|g| g.values()).unwrap_or_else(|| LinearGrid { start: 0.02 * z1, stop: 5.0 * z1, count: 500 }.values())
}

fn curve_json(curve: &FieldCurve) -> Value {
    json!({
        "f_hz": curve.f,
        "abscissa": curve.abscissa,
        "re_p": curve.pressure.iter().map(|p| p.re).collect::<Vec<_>>(),
        "im_p": curve.pressure.iter().map(|p| p.im).collect::<Vec<_>>(),
        "spl_db": curve.spl_db(),
    })
}

pub fn pc(cfg: &RunConfig, medium: &Medium) -> anyhow::Result<Outcome> {
    let s = source(cfg, medium)?;
    let z1 = z_ref(s.radius, s.f, medium);
    let curve = propagation_curve(&s.profile, medium, s.f, &z_grid(cfg, z1))?;
    let spl = curve.spl_db();
    let imax = (0..spl.len()).max_by(|&a, &b| spl[a].total_cmp(&spl[b]).then(b.cmp(&a))).unwrap_or(0);
    let result = json!({
        "source_hash": s.profile.descriptor_hash(),
        "radius_m": s.radius,
        "z1_m": z1,
        "argmax_m": curve.abscissa.get(imax),
        "curve": curve_json(&curve),
    });
    Ok(Outcome::single("pc", curve_table(&curve), result, curve.warnings.clone()))
}

pub fn bp(cfg: &RunConfig, medium: &Medium) -> anyhow::Result<Outcome> {
    let s = source(cfg, medium)?;
    let curve = beam_pattern(&s.profile, medium, s.f, cfg.solver.range_m, &cfg.solver.theta_grid_deg.values())?;
    let result = json!({
        "source_hash": s.profile.descriptor_hash(),
        "radius_m": s.radius,
        "range_m": cfg.solver.range_m,
        "quarter_power_half_angle_deg": quarter_power_angle(&curve),
        "first_null_deg": first_null_angle(&curve),
        "curve": curve_json(&curve),
    });
    Ok(Outcome::single("bp", curve_table(&curve), result, curve.warnings.clone()))
}

pub fn er(cfg: &RunConfig, medium: &Medium) -> anyhow::Result<Outcome> {
    let s = source(cfg, medium)?;
    let d_uc = s.d_uc.context("er needs d_uc_m")?;
    let freqs = cfg
        .solver
        .freq_grid_hz
        .map(|g| g.values())
        .unwrap_or_else(|| LinearGrid { start: s.f - 5e3, stop: s.f + 5e3, count: 21 }.values());
    let mut t = Table::new(["f_hz", "er_db"]);
    let mut rows = Vec::new();
    for f in freqs {
        let e = equivalence_ratio(&s.profile, medium, f, d_uc)?;
        t.push(vec![Cell::Num(f), Cell::Num(e.er_db)]);
        rows.push(json!({"f_hz": f, "er_db": e.er_db}));
    }
    let result = json!({"source_hash": s.profile.descriptor_hash(), "d_uc_m": d_uc, "er": rows});
    Ok(Outcome::single("er", t, result, Vec::new()))
}

/// Effective piston velocity at a primary frequency.
fn velocity_fn<'a>(cfg: &'a RunConfig, medium: &'a Medium, s: &'a Source) -> anyhow::Result<impl Fn(f64) -> sppal_core::Result<Complex64> + Sync + 'a> {
    let pair = cfg.pair.as_ref().context("missing pair block")?;
    let surrogate = cfg.transducer.as_ref().map(|t| t.surrogate.clone());
    let scale = match &surrogate {
        Some(sg) => {
            let at = pzg_frf(sg.kind, sg.gain, sg.f_r1_hz, sg.f_r2_hz, sg.f_anti_hz, sg.eta, &[pair.f_carrier_hz])?.center_velocity[0];
            sg.carrier_velocity_m_s.map_or(1.0, |v| v / at.norm())
        }
        None => 1.0,
    };
    let d_uc = s.d_uc;
    Ok(move |f: f64| -> sppal_core::Result<Complex64> {
        let centre = match &surrogate {
            Some(sg) => pzg_frf(sg.kind, sg.gain, sg.f_r1_hz, sg.f_r2_hz, sg.f_anti_hz, sg.eta, &[f])?.center_velocity[0] * scale,
            None if (f - pair.f_carrier_hz).abs() < 1e-9 => Complex64::new(pair.v2_m_s, 0.0),
            None => Complex64::new(pair.v1_m_s, 0.0),
        };
        if s.is_plate {
            let e = equivalence_ratio(&s.profile, medium, f, d_uc.unwrap_or(1.0))?;
            Ok(e.effective_velocity(centre))
        } else {
            Ok(centre)
        }
    })
}

fn audio_solver(cfg: &RunConfig, medium: &Medium, s: &Source) -> anyhow::Result<(QuasilinearSolver, PrimaryPair)> {
    let pair_cfg = cfg.pair.as_ref().context("missing pair block")?;
    let vel = velocity_fn(cfg, medium, s)?;
    let (fc, fa) = (pair_cfg.f_carrier_hz, pair_cfg.f_a_hz);
    let pair = PrimaryPair::lsb_pistons(s.radius, vel(fc - fa)?, vel(fc)?, fc, fa)?;
    Ok((QuasilinearSolver::new(&pair, medium, &cfg.solver.grid_options())?, pair))
}

fn pair_json(pair: &PrimaryPair) -> Value {
    json!({"f_u1_hz": pair.f_u1, "f_u2_hz": pair.f_u2, "f_a_hz": pair.f_a()})
}

pub fn audio_pc(cfg: &RunConfig, medium: &Medium) -> anyhow::Result<Outcome> {
    let s = source(cfg, medium)?;
    let (solver, pair) = audio_solver(cfg, medium, &s)?;
    let grid = cfg.solver.z_grid_m.map(|g| g.values()).unwrap_or_else(|| cd_search_grid(z_ref(s.radius, pair.f_u2, medium)));
    let curve = solver.propagation_curve(&grid)?;
    let cd = find_audio_cd(&curve)?;
    let mut warnings = solver.warnings.clone();
    warnings.extend(cd.warnings.iter().cloned());
    let result = json!({
        "pair": pair_json(&pair),
        "radius_m": s.radius,
        "d_ac_m": cd.distance,
        "l_pa_c_db": cd.spl,
        "curve": curve_json(&curve),
    });
    Ok(Outcome::single("audio-pc", curve_table(&curve), result, warnings))
}

pub fn audio_bp(cfg: &RunConfig, medium: &Medium) -> anyhow::Result<Outcome> {
    let s = source(cfg, medium)?;
    let (solver, pair) = audio_solver(cfg, medium, &s)?;
    let curve = solver.beam_pattern(cfg.solver.range_m, &cfg.solver.theta_grid_deg.values())?;
    let result = json!({
        "pair": pair_json(&pair),
        "radius_m": s.radius,
        "range_m": cfg.solver.range_m,
        "quarter_power_half_angle_deg": quarter_power_angle(&curve),
        "curve": curve_json(&curve),
    });
    Ok(Outcome::single("audio-bp", curve_table(&curve), result, solver.warnings.clone()))
}

pub fn audio_fr(cfg: &RunConfig, medium: &Medium) -> anyhow::Result<Outcome> {
    let s = source(cfg, medium)?;
    let pair = cfg.pair.as_ref().context("missing pair block")?;
    let vel = velocity_fn(cfg, medium, &s)?;
    let opts = AudioOptions { f_a_ref: pair.f_a_hz, grid: cfg.solver.grid_options() };
    let cap = audio_response(s.radius, &vel, pair.f_carrier_hz, medium, &pair.f_a_grid_hz, &opts)?;
    let mut t = Table::new(["f_a_hz", "spl_db"]);
    for (f, l) in cap.f_a.iter().zip(&cap.spl) {
        t.push(vec![Cell::Num(*f), Cell::Num(*l)]);
    }
    let result = serde_json::to_value(&cap)?;
    Ok(Outcome::single("audio-fr", t, result, cap.warnings.clone()))
}

pub fn cd_contour(cfg: &RunConfig, medium: &Medium) -> anyhow::Result<Outcome> {
    let c = cfg.contour.as_ref().context("missing contour block")?;
    let pair = cfg.pair.as_ref().context("missing pair block")?;
    let mut long = Table::new(["f_u0_hz", "d_uc_m", "radius_m", "d_ac_m", "l_pa_c_db"]);
    let mut level = Table::new(std::iter::once("d_uc_m".to_string()).chain(c.f_u0_hz.iter().map(|f| format!("l_pa_c_db@{f}"))));
    let mut dist = Table::new(std::iter::once("d_uc_m".to_string()).chain(c.f_u0_hz.iter().map(|f| format!("d_ac_m@{f}"))));
    let mut cells = Vec::new();
    let mut warnings = Vec::new();
    let mut grid_l = vec![vec![Cell::Empty; c.f_u0_hz.len()]; c.d_uc_m.len()];
    let mut grid_d = grid_l.clone();
    for (i, &d) in c.d_uc_m.iter().enumerate() {
        for (j, &f) in c.f_u0_hz.iter().enumerate() {
            let a = aperture_for_cd(d, f, medium)?;
            let p = PrimaryPair::lsb_pistons(a, Complex64::new(pair.v1_m_s, 0.0), Complex64::new(pair.v2_m_s, 0.0), f, pair.f_a_hz)?;
            let solver = QuasilinearSolver::new(&p, medium, &cfg.solver.grid_options())?;
            let cd = find_audio_cd(&solver.propagation_curve(&cd_search_grid(z_ref(a, f, medium)))?)?;
            warnings.extend(solver.warnings.iter().chain(&cd.warnings).map(|w| format!("f_u0 = {f} Hz, D_uc = {d} m: {w}")));
            long.push(vec![Cell::Num(f), Cell::Num(d), Cell::Num(a), Cell::Num(cd.distance), Cell::Num(cd.spl)]);
            grid_l[i][j] = Cell::Num(cd.spl);
            grid_d[i][j] = Cell::Num(cd.distance);
            cells.push(json!({"f_u0_hz": f, "d_uc_m": d, "radius_m": a, "d_ac_m": cd.distance, "l_pa_c_db": cd.spl}));
        }
    }
    for (i, &d) in c.d_uc_m.iter().enumerate() {
        level.push(std::iter::once(Cell::Num(d)).chain(grid_l[i].iter().cloned()).collect());
        dist.push(std::iter::once(Cell::Num(d)).chain(grid_d[i].iter().cloned()).collect());
    }
    let result = json!({"f_a_hz": pair.f_a_hz, "cells": cells});
    Ok(Outcome {
        artifacts: vec![
            Artifact { name: "cd-contour".into(), table: long, result },
            Artifact { name: "cd-contour_level".into(), table: level, result: json!(null) },
            Artifact { name: "cd-contour_distance".into(), table: dist, result: json!(null) },
        ],
        warnings,
        notes: Vec::new(),
    })
}

pub fn pareto(cfg: &RunConfig, medium: &Medium) -> anyhow::Result<Outcome> {
    let o = cfg.optimizer.as_ref().context("missing optimizer block")?;
    let ctx = DesignContext::new(&o.design.params()?, medium)?;
    let front = optimize_design(&ctx, &o.nsga)?;
    let n = ctx.x0.len();
    let mut t = Table::new(["f1_m_s", "f2_hz", "f_dist_hz"].into_iter().map(String::from).chain((1..=n).map(|i| format!("l{i}_m"))));
    for p in &front.points {
        let mut row = vec![Cell::Num(p.objectives.0), Cell::Num(p.objectives.1), p.derived.f_dist.into()];
        row.extend(p.x.iter().map(|x| Cell::Num(*x)));
        t.push(row);
    }
    let result = json!({
        "er_db": ctx.er.er_db,
        "plate_thickness_m": ctx.plate.thickness,
        "x0_m": ctx.x0,
        "bounds_m": ctx.bounds,
        "front": front,
    });
    Ok(Outcome::single("pareto", t, result, Vec::new()))
}

pub fn sweep(cfg: &RunConfig, medium: &Medium) -> anyhow::Result<Outcome> {
    let o = cfg.optimizer.as_ref().context("missing optimizer block")?;
    let f_a_ref = cfg.pair.as_ref().map_or(1e3, |p| p.f_a_hz);
    let opts = SweepOptions {
        nsga: o.nsga,
        f_dist_window: o.sweep.f_dist_window_hz,
        audio: o.sweep.audio,
        audio_opts: AudioOptions { f_a_ref, grid: cfg.solver.grid_options() },
    };
    let rows = design_sweep(&o.sweep.grid(), medium, &opts);
    let mut t = Table::new([
        "cell", "d_uc_m", "f_u0_hz", "mode_m", "config", "r_p_m", "r_h_m", "l1_m", "l2_m", "l3_m", "l4_m", "f1_m_s", "f2_hz", "f_dist_hz", "l_pa_c_db", "d_ac_m", "flags",
    ]);
    for r in &rows {
        let p = &r.params;
        let mut row = vec![
            Cell::Int(r.cell as i64),
            Cell::Num(p.d_uc),
            Cell::Num(p.f_u0),
            Cell::Int(p.mode_m as i64),
            Cell::Text(format!("{:?}", p.config).to_lowercase()),
            Cell::Num(p.r_p),
            Cell::Num(p.r_h),
        ];
        match &r.design {
            Some(d) => {
                row.extend((0..4).map(|i| d.x.get(i).map_or(Cell::Empty, |x| Cell::Num(*x))));
                row.extend([Cell::Num(d.objectives.0), Cell::Num(d.objectives.1), d.derived.f_dist.into(), d.derived.l_pa_c.into(), d.derived.d_ac.into()]);
                row.push(Cell::Text(d.flag.clone().unwrap_or_default()));
            }
            None => {
                row.extend(std::iter::repeat(Cell::Empty).take(9));
                row.push(Cell::Text(r.note.clone().unwrap_or_default()));
            }
        }
        t.push(row);
    }
    let note = "levels come from a 1D stack model with a single-mode plate load; compare orderings and trends, not absolute values".to_string();
    let result = json!({"note": note, "rows": rows});
    let mut out = Outcome::single("sweep", t, result, Vec::new());
    out.notes.push(note);
    Ok(out)
}

pub fn cr(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let c = cfg.cr.as_ref().context("missing cr block")?;
    let flags = cr_screen(&c.modal_freqs_hz, c.band_hz, c.tol_hz)?;
    let mut t = Table::new(["mode_hz", "lo_hz", "hi_hz"]);
    for f in &flags {
        t.push(vec![Cell::Num(f.mode_freq), Cell::Num(f.lo), Cell::Num(f.hi)]);
    }
    Ok(Outcome::single("cr-screen", t, json!({"flags": flags}), Vec::new()))
}

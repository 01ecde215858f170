//! NSGA-II search over stack segment lengths, the audio-capability pipeline
//! and design-space sweeps.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linfield::{equivalence_ratio, EquivalenceRatio, FieldPoint};
use crate::medium::Medium;
use crate::nlfield::{find_audio_cd, GridOptions, PrimaryPair, QuasilinearSolver};
use crate::radiator::{plate_mode_shape, radial_samples, size_plate_for, stepped_profile, Boundary, Material, ModeShape, PlateSpec, StepPolicy};
use crate::transducer::{
    build_stack, extract_dr_features, frequency_grid, frf_transfer_matrix, langevin_initial_lengths, objectives, plate_load_impedance, Config, DrFeatures,
    Frf, StackOptions, TransducerSpec, PEAK_GRID_STEP,
};

/// Fixed design parameters of one sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignParams {
    pub d_uc: f64,
    pub f_u0: f64,
    pub mode_m: usize,
    pub config: Config,
    pub r_p: f64,
    pub l_p: f64,
    pub r_h: f64,
    #[serde(default = "default_plate_material")]
    pub plate_material: Material,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default)]
    pub steps: StepPolicy,
    /// Peak-search band as fractions of `f_u0`.
    #[serde(default = "default_band")]
    pub band: (f64, f64),
    #[serde(default)]
    pub stack: StackOptions,
}

fn default_plate_material() -> Material {
    Material::aluminum()
}

fn default_band() -> (f64, f64) {
    (0.9, 1.1)
}

impl DesignParams {
    pub fn new(d_uc: f64, f_u0: f64, mode_m: usize, config: Config, r_p: f64, l_p: f64, r_h: f64) -> Self {
        Self {
            d_uc,
            f_u0,
            mode_m,
            config,
            r_p,
            l_p,
            r_h,
            plate_material: default_plate_material(),
            boundary: Boundary::Free,
            steps: StepPolicy::Standard,
            band: default_band(),
            stack: StackOptions { f_u0, ..StackOptions::default() },
        }
    }
}

/// Everything about a cell that does not depend on the segment lengths.
#[derive(Debug, Clone)]
pub struct DesignContext {
    pub params: DesignParams,
    pub medium: Medium,
    pub plate: PlateSpec,
    pub mode: ModeShape,
    pub er: EquivalenceRatio,
    pub template: TransducerSpec,
    pub x0: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
    pub freqs: Vec<f64>,
    pub load: Vec<Complex64>,
}

impl DesignContext {
    pub fn new(params: &DesignParams, medium: &Medium) -> Result<Self> {
        let mut params = params.clone();
        params.stack.f_u0 = params.f_u0;
        let plate = size_plate_for(params.f_u0, params.d_uc, params.mode_m, &params.plate_material, medium, params.boundary)?;
        let mode = plate_mode_shape(&plate)?;
        let er = plate_equivalence_ratio(&mode, medium, params.f_u0, params.d_uc, params.steps)?;
        let unit = vec![1.0; params.config.design_len()];
        let template = build_stack(params.config, params.r_p, params.l_p, params.r_h, &unit, &params.stack)?;
        let init = langevin_initial_lengths(params.f_u0, &template)?;
        let (lo, hi) = params.band;
        if !(lo > 0.0 && hi > lo) {
            return domain("search band must be increasing and positive");
        }
        let freqs = frequency_grid(lo * params.f_u0, hi * params.f_u0, PEAK_GRID_STEP)?;
        let load = plate_load_impedance(&plate, &mode, &er, medium, &freqs)?;
        Ok(Self {
            params,
            medium: medium.clone(),
            plate,
            mode,
            er,
            template,
            bounds: init.lower.iter().zip(&init.upper).map(|(&l, &u)| (l, u)).collect(),
            x0: init.x0,
            freqs,
            load,
        })
    }

    pub fn band_width(&self) -> f64 {
        self.freqs[self.freqs.len() - 1] - self.freqs[0]
    }

    pub fn frf(&self, x: &[f64]) -> Result<Frf> {
        let spec = self.template.with_design(x)?;
        frf_transfer_matrix(&spec, &self.load, &self.freqs)
    }

    /// Objectives of one design; failures become penalty objectives.
    pub fn evaluate(&self, x: &[f64]) -> Evaluation {
        let out = self.frf(x).and_then(|frf| {
            let d = extract_dr_features(&frf)?;
            Ok((d, objectives(&d)?))
        });
        match out {
            Ok((d, o)) if o.0.is_finite() && o.1.is_finite() => Evaluation { objectives: o, features: Some(d), flag: None },
            Ok(_) => self.penalty("non-finite objectives".into()),
            Err(e) => self.penalty(e.to_string()),
        }
    }

    fn penalty(&self, why: String) -> Evaluation {
        Evaluation { objectives: (0.0, self.band_width()), features: None, flag: Some(why) }
    }
}

/// Stepped-plate equivalence ratio at `f` and `d_uc`.
pub fn plate_equivalence_ratio(mode: &ModeShape, medium: &Medium, f: f64, d_uc: f64, steps: StepPolicy) -> Result<EquivalenceRatio> {
    let n = radial_samples(mode.radius_a, f, medium);
    let prof = stepped_profile(mode, Complex64::new(1.0, 0.0), steps, n)?;
    equivalence_ratio(&prof, medium, f, d_uc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub objectives: (f64, f64),
    pub features: Option<DrFeatures>,
    /// Set when the design was penalised.
    pub flag: Option<String>,
}

pub fn evaluate_design(ctx: &DesignContext, x: &[f64]) -> Evaluation {
    ctx.evaluate(x)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    pub f_dist: Option<f64>,
    pub l_pa_c: Option<f64>,
    pub d_ac: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint {
    pub params: DesignParams,
    pub x: Vec<f64>,
    pub objectives: (f64, f64),
    pub derived: Derived,
    pub flag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    pub points: Vec<DesignPoint>,
    /// Archive hypervolume after each generation, when a reference point
    /// was supplied.
    pub hv_history: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NsgaConfig {
    pub pop: usize,
    pub generations: usize,
    pub seed: u64,
    pub crossover_prob: f64,
    pub eta_c: f64,
    pub eta_m: f64,
    /// Per-variable mutation probability; `None` means `1/n`.
    pub mutation_prob: Option<f64>,
    pub hv_reference: Option<(f64, f64)>,
}

impl Default for NsgaConfig {
    fn default() -> Self {
        Self { pop: 40, generations: 50, seed: 1, crossover_prob: 0.9, eta_c: 15.0, eta_m: 20.0, mutation_prob: None, hv_reference: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub x: Vec<f64>,
    pub f: (f64, f64),
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NsgaResult {
    /// Non-dominated archive of every evaluated point, sorted by `f.1`.
    pub front: Vec<Individual>,
    pub hv_history: Vec<f64>,
    pub evaluations: usize,
}

pub fn dominates(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.0 && a.1 <= b.1 && (a.0 < b.0 || a.1 < b.1)
}

/// Area dominated by `points` and bounded by `reference` (both objectives
/// minimised).
pub fn hypervolume(points: &[(f64, f64)], reference: (f64, f64)) -> f64 {
    let mut p: Vec<(f64, f64)> = points.iter().cloned().filter(|q| q.0 < reference.0 && q.1 < reference.1).collect();
    p.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    // staircase of points that improve f2 as f1 grows
    let mut stair: Vec<(f64, f64)> = Vec::new();
    for q in p {
        if stair.last().map_or(true, |s| q.1 < s.1) {
            stair.push(q);
        }
    }
    stair
        .iter()
        .enumerate()
        .map(|(i, q)| (stair.get(i + 1).map_or(reference.0, |r| r.0) - q.0) * (reference.1 - q.1))
        .sum()
}

/// Indices of successive non-dominated fronts.
fn non_dominated_sort(f: &[(f64, f64)]) -> Vec<Vec<usize>> {
    let n = f.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates_list = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && dominates(f[i], f[j]) {
                dominates_list[i].push(j);
            } else if i != j && dominates(f[j], f[i]) {
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

fn crowding(front: &[usize], f: &[(f64, f64)]) -> Vec<f64> {
    let n = front.len();
    let mut d = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    for obj in 0..2 {
        let val = |i: usize| if obj == 0 { f[front[i]].0 } else { f[front[i]].1 };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| val(a).total_cmp(&val(b)).then(front[a].cmp(&front[b])));
        let span = val(order[n - 1]) - val(order[0]);
        d[order[0]] = f64::INFINITY;
        d[order[n - 1]] = f64::INFINITY;
        if span > 0.0 {
            for k in 1..n - 1 {
                d[order[k]] += (val(order[k + 1]) - val(order[k - 1])) / span;
            }
        }
    }
    d
}

fn sbx(rng: &mut ChaCha8Rng, a: f64, b: f64, lo: f64, hi: f64, eta: f64) -> (f64, f64) {
    if (a - b).abs() < 1e-14 || hi <= lo {
        return (a, b);
    }
    let (y1, y2) = if a < b { (a, b) } else { (b, a) };
    let u: f64 = rng.gen();
    let child = |beta_bound: f64| {
        let alpha = 2.0 - beta_bound.powf(-(eta + 1.0));
        if u <= 1.0 / alpha {
            (u * alpha).powf(1.0 / (eta + 1.0))
        } else {
            (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
        }
    };
    let beta1 = 1.0 + 2.0 * (y1 - lo) / (y2 - y1);
    let bq1 = child(beta1);
    let c1 = 0.5 * ((y1 + y2) - bq1 * (y2 - y1));
    let beta2 = 1.0 + 2.0 * (hi - y2) / (y2 - y1);
    let bq2 = child(beta2);
    let c2 = 0.5 * ((y1 + y2) + bq2 * (y2 - y1));
    let (c1, c2) = (c1.clamp(lo, hi), c2.clamp(lo, hi));
    if rng.gen::<bool>() {
        (c2, c1)
    } else {
        (c1, c2)
    }
}

fn poly_mutation(rng: &mut ChaCha8Rng, y: f64, lo: f64, hi: f64, eta: f64) -> f64 {
    if hi <= lo {
        return y;
    }
    let d1 = (y - lo) / (hi - lo);
    let d2 = (hi - y) / (hi - lo);
    let u: f64 = rng.gen();
    let p = 1.0 / (eta + 1.0);
    let dq = if u < 0.5 {
        (2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1).powf(eta + 1.0)).powf(p) - 1.0
    } else {
        1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2).powf(eta + 1.0)).powf(p)
    };
    (y + dq * (hi - lo)).clamp(lo, hi)
}

fn archive_insert(archive: &mut Vec<Individual>, cand: &Individual) {
    if archive.iter().any(|a| dominates(a.f, cand.f) || a.f == cand.f) {
        return;
    }
    archive.retain(|a| !dominates(cand.f, a.f));
    archive.push(cand.clone());
}

/// Seeded NSGA-II. `evaluate` returns both objectives and whether the point
/// is feasible; every evaluated point passes through a non-dominated
/// archive, which is returned as the front.
pub fn nsga2<F>(evaluate: F, bounds: &[(f64, f64)], cfg: &NsgaConfig) -> Result<NsgaResult>
where
    F: Fn(&[f64]) -> ((f64, f64), bool) + Sync,
{
    if cfg.pop < 8 || cfg.pop % 2 != 0 {
        return domain(format!("population {} must be even and at least 8", cfg.pop));
    }
    if cfg.generations < 1 {
        return domain("need at least one generation");
    }
    if bounds.is_empty() || bounds.iter().any(|(l, u)| !(l <= u && l.is_finite() && u.is_finite())) {
        return domain("bounds must be finite with lower <= upper");
    }
    let n = bounds.len();
    let pm = cfg.mutation_prob.unwrap_or(1.0 / n as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let eval_all = |xs: Vec<Vec<f64>>| -> Vec<Individual> {
        xs.into_par_iter()
            .map(|x| {
                let (f, feasible) = evaluate(&x);
                Individual { x, f, feasible }
            })
            .collect()
    };
    let init: Vec<Vec<f64>> = (0..cfg.pop).map(|_| bounds.iter().map(|&(l, u)| l + (u - l) * rng.gen::<f64>()).collect()).collect();
    let mut pop = eval_all(init);
    let mut evaluations = pop.len();
    let mut archive: Vec<Individual> = Vec::new();
    for ind in &pop {
        archive_insert(&mut archive, ind);
    }
    let hv = |arch: &[Individual]| cfg.hv_reference.map(|r| hypervolume(&arch.iter().map(|a| a.f).collect::<Vec<_>>(), r));
    let mut hv_history = Vec::new();
    hv_history.extend(hv(&archive));

    let (mut rank, mut crowd) = rank_and_crowd(&pop);
    for _ in 0..cfg.generations {
        let tournament = |rng: &mut ChaCha8Rng| {
            let a = rng.gen_range(0..pop.len());
            let b = rng.gen_range(0..pop.len());
            if rank[a] != rank[b] {
                if rank[a] < rank[b] { a } else { b }
            } else if crowd[a] != crowd[b] {
                if crowd[a] > crowd[b] { a } else { b }
            } else {
                a.min(b)
            }
        };
        let mut children = Vec::with_capacity(cfg.pop);
        while children.len() < cfg.pop {
            let p1 = pop[tournament(&mut rng)].x.clone();
            let p2 = pop[tournament(&mut rng)].x.clone();
            let (mut c1, mut c2) = (p1.clone(), p2.clone());
            if rng.gen::<f64>() < cfg.crossover_prob {
                for j in 0..n {
                    if rng.gen::<f64>() < 0.5 {
                        let (a, b) = sbx(&mut rng, p1[j], p2[j], bounds[j].0, bounds[j].1, cfg.eta_c);
                        c1[j] = a;
                        c2[j] = b;
                    }
                }
            }
            for c in [&mut c1, &mut c2] {
                for j in 0..n {
                    if rng.gen::<f64>() < pm {
                        c[j] = poly_mutation(&mut rng, c[j], bounds[j].0, bounds[j].1, cfg.eta_m);
                    }
                }
            }
            children.push(c1);
            children.push(c2);
        }
        let offspring = eval_all(children);
        evaluations += offspring.len();
        for ind in &offspring {
            archive_insert(&mut archive, ind);
        }
        hv_history.extend(hv(&archive));

        let mut merged = pop;
        merged.extend(offspring);
        let f: Vec<(f64, f64)> = merged.iter().map(|m| m.f).collect();
        let mut next = Vec::with_capacity(cfg.pop);
        for front in non_dominated_sort(&f) {
            if next.len() + front.len() <= cfg.pop {
                next.extend(front);
            } else {
                let d = crowding(&front, &f);
                let mut order: Vec<usize> = (0..front.len()).collect();
                order.sort_by(|&a, &b| d[b].total_cmp(&d[a]).then(front[a].cmp(&front[b])));
                next.extend(order.into_iter().take(cfg.pop - next.len()).map(|k| front[k]));
                break;
            }
        }
        pop = next.into_iter().map(|i| merged[i].clone()).collect();
        (rank, crowd) = rank_and_crowd(&pop);
    }
    if archive.iter().any(|a| a.feasible) {
        archive.retain(|a| a.feasible);
    }
    archive.sort_by(|a, b| a.f.1.total_cmp(&b.f.1).then(a.f.0.total_cmp(&b.f.0)));
    Ok(NsgaResult { front: archive, hv_history, evaluations })
}

fn rank_and_crowd(pop: &[Individual]) -> (Vec<usize>, Vec<f64>) {
    let f: Vec<(f64, f64)> = pop.iter().map(|p| p.f).collect();
    let mut rank = vec![0; pop.len()];
    let mut crowd = vec![0.0; pop.len()];
    for (r, front) in non_dominated_sort(&f).iter().enumerate() {
        let d = crowding(front, &f);
        for (k, &i) in front.iter().enumerate() {
            rank[i] = r;
            crowd[i] = d[k];
        }
    }
    (rank, crowd)
}

/// NSGA-II over the cell's segment lengths.
pub fn optimize_design(ctx: &DesignContext, cfg: &NsgaConfig) -> Result<ParetoFront> {
    let res = nsga2(
        |x| {
            let e = ctx.evaluate(x);
            (e.objectives, e.flag.is_none())
        },
        &ctx.bounds,
        cfg,
    )?;
    let points = res
        .front
        .into_iter()
        .map(|ind| {
            let e = ctx.evaluate(&ind.x);
            DesignPoint {
                params: ctx.params.clone(),
                derived: Derived { f_dist: e.features.map(|d| d.f_dist), ..Derived::default() },
                x: ind.x,
                objectives: e.objectives,
                flag: e.flag,
            }
        })
        .collect();
    Ok(ParetoFront { points, hv_history: res.hv_history })
}

/// Minimum F1 among points with `f_dist` strictly inside `window`, ties by
/// smaller F2.
pub fn select_knee(front: &ParetoFront, window: (f64, f64)) -> Option<&DesignPoint> {
    front
        .points
        .iter()
        .filter(|p| p.flag.is_none() && p.derived.f_dist.is_some_and(|d| d > window.0 && d < window.1))
        .min_by(|a, b| a.objectives.0.total_cmp(&b.objectives.0).then(a.objectives.1.total_cmp(&b.objectives.1)))
}

/// On-axis distances searched for the audio maximum.
pub fn cd_search_grid(z_ref: f64) -> Vec<f64> {
    let step = (z_ref / 20.0).max(0.005);
    let n = ((6.0 * z_ref).max(1.0) / step).ceil() as usize;
    (1..=n).map(|i| step * i as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AudioOptions {
    /// Audio frequency at which the audio maximum is located, Hz.
    pub f_a_ref: f64,
    pub grid: GridOptions,
}

impl Default for AudioOptions {
    fn default() -> Self {
        Self { f_a_ref: 1000.0, grid: GridOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioCapability {
    pub f_carrier: f64,
    pub d_ac: f64,
    /// SPL at `d_ac` and `f_a_ref`.
    pub l_pa_c: f64,
    pub f_a: Vec<f64>,
    pub spl: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Surface velocities of the equivalent rigid piston at each primary
/// frequency: centre velocity from the FRF times the plate's equivalence
/// ratio there.
pub type EffectiveVelocity<'a> = dyn Fn(f64) -> Result<Complex64> + Sync + 'a;

/// Audio response at the audio maximum of a piston pair driven at the
/// carrier and its lower sidebands.
pub fn audio_response(
    radius_a: f64,
    velocity: &EffectiveVelocity,
    f_carrier: f64,
    medium: &Medium,
    f_a_grid: &[f64],
    opts: &AudioOptions,
) -> Result<AudioCapability> {
    if f_a_grid.iter().any(|&f| !(f > 0.0 && f < f_carrier)) {
        return domain("audio frequencies must lie in (0, f_carrier)");
    }
    let v2 = velocity(f_carrier)?;
    let pair_for = |f_a: f64| -> Result<PrimaryPair> {
        let v1 = velocity(f_carrier - f_a)?;
        PrimaryPair::lsb_pistons(radius_a, v1, v2, f_carrier, f_a)
    };
    let z_ref = crate::radiator::first_local_max(radius_a, f_carrier, medium).unwrap_or(radius_a).max(radius_a);
    let solver = QuasilinearSolver::new(&pair_for(opts.f_a_ref)?, medium, &opts.grid)?;
    let mut warnings = solver.warnings.clone();
    let cd = find_audio_cd(&solver.propagation_curve(&cd_search_grid(z_ref))?)?;
    warnings.extend(cd.warnings.iter().cloned());
    let pt = FieldPoint::on_axis(cd.distance)?;
    let spl: Vec<f64> = f_a_grid
        .iter()
        .map(|&f_a| {
            let s = QuasilinearSolver::new(&pair_for(f_a)?, medium, &opts.grid)?;
            Ok(crate::linfield::spl_db(s.pressure(pt)?))
        })
        .collect::<Result<_>>()?;
    Ok(AudioCapability { f_carrier, d_ac: cd.distance, l_pa_c: cd.spl, f_a: f_a_grid.to_vec(), spl, warnings })
}

/// Full pipeline for an evaluated design: carrier at the upper resonance,
/// sidebands below it, plate velocities converted through the ER.
pub fn audio_capability(ctx: &DesignContext, design: &DesignPoint, f_a_grid: &[f64], opts: &AudioOptions) -> Result<AudioCapability> {
    let tag = |e: Error| Error::Numerical(format!("design x = {:?}: {e}", design.x));
    let frf = ctx.frf(&design.x).map_err(tag)?;
    let features = extract_dr_features(&frf).map_err(tag)?;
    let velocity = |f: f64| -> Result<Complex64> {
        let er = plate_equivalence_ratio(&ctx.mode, &ctx.medium, f, ctx.params.d_uc, ctx.params.steps)?;
        Ok(er.effective_velocity(frf.velocity_at(f)))
    };
    audio_response(ctx.plate.radius_a, &velocity, features.f_r2, &ctx.medium, f_a_grid, opts).map_err(tag)
}

/// Grid over the sweep axes; every combination is one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepGrid {
    pub d_uc: Vec<f64>,
    pub f_u0: Vec<f64>,
    pub mode_m: Vec<usize>,
    pub config: Vec<Config>,
    pub r_p: Vec<f64>,
    pub r_h: Vec<f64>,
    pub l_p: f64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            d_uc: vec![0.30, 0.35, 0.40, 0.45],
            f_u0: vec![40e3, 50e3, 60e3, 75e3, 90e3],
            mode_m: vec![6, 8],
            config: vec![Config::Half, Config::Full],
            r_p: crate::transducer::PIEZO_RADIUS_CATALOG.to_vec(),
            r_h: crate::transducer::HORN_RADIUS_CATALOG.to_vec(),
            l_p: 8e-3,
        }
    }
}

impl SweepGrid {
    pub fn cells(&self) -> Vec<DesignParams> {
        let mut out = Vec::new();
        for &d in &self.d_uc {
            for &f in &self.f_u0 {
                for &m in &self.mode_m {
                    for &c in &self.config {
                        for &rp in &self.r_p {
                            for &rh in &self.r_h {
                                out.push(DesignParams::new(d, f, m, c, rp, self.l_p, rh));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub cell: usize,
    pub params: DesignParams,
    /// Selected design, if any passed the `f_dist` window.
    pub design: Option<DesignPoint>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepOptions {
    pub nsga: NsgaConfig,
    pub f_dist_window: (f64, f64),
    /// Run the audio pipeline on selected designs.
    pub audio: bool,
    pub audio_opts: AudioOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            nsga: NsgaConfig { pop: 16, generations: 10, ..NsgaConfig::default() },
            f_dist_window: (800.0, 1250.0),
            audio: true,
            audio_opts: AudioOptions::default(),
        }
    }
}

/// Optimises every cell, keeps the knee design inside the `f_dist` window
/// and optionally runs the audio pipeline on it. Cells that fail or have no
/// admissible design are recorded with a note.
pub fn design_sweep(grid: &SweepGrid, medium: &Medium, opts: &SweepOptions) -> Vec<SweepRow> {
    grid.cells()
        .into_iter()
        .enumerate()
        .map(|(cell, params)| {
            let run = || -> Result<Option<DesignPoint>> {
                let ctx = DesignContext::new(&params, medium)?;
                let front = optimize_design(&ctx, &opts.nsga)?;
                let Some(knee) = select_knee(&front, opts.f_dist_window).cloned() else {
                    return Ok(None);
                };
                let mut knee = knee;
                if opts.audio {
                    let cap = audio_capability(&ctx, &knee, &[opts.audio_opts.f_a_ref], &opts.audio_opts)?;
                    knee.derived.l_pa_c = Some(cap.l_pa_c);
                    knee.derived.d_ac = Some(cap.d_ac);
                }
                Ok(Some(knee))
            };
            match run() {
                Ok(Some(d)) => SweepRow { cell, params, design: Some(d), note: None },
                Ok(None) => SweepRow { cell, params, design: None, note: Some("no design inside the f_dist window".into()) },
                Err(e) => SweepRow { cell, params, design: None, note: Some(e.to_string()) },
            }
        })
        .collect()
}

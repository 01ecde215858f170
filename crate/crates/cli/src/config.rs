//! Run configuration: strict JSON, SI units, unit-suffixed field names.

use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use sppal_core::medium::{build_medium, Medium};
use sppal_core::nlfield::GridOptions;
use sppal_core::optimizer::{DesignParams, NsgaConfig, SweepGrid};
use sppal_core::radiator::{Boundary, Material, StepPolicy};
use sppal_core::transducer::{Config as Xdcr, SurrogateKind};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub medium: MediumBlock,
    pub source: Option<SourceBlock>,
    pub pair: Option<PairBlock>,
    pub solver: SolverBlock,
    pub transducer: Option<TransducerBlock>,
    pub contour: Option<ContourBlock>,
    pub optimizer: Option<OptimizerBlock>,
    pub cr: Option<CrBlock>,
    pub output: OutputBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MediumBlock {
    pub temperature_c: f64,
    pub relative_humidity_pct: f64,
    pub pressure_kpa: f64,
    pub beta: f64,
    pub lossless: bool,
}

impl Default for MediumBlock {
    fn default() -> Self {
        Self { temperature_c: 20.0, relative_humidity_pct: 70.0, pressure_kpa: 101.325, beta: 1.2, lossless: false }
    }
}

impl MediumBlock {
    pub fn build(&self) -> sppal_core::Result<Medium> {
        let m = build_medium(self.temperature_c, self.relative_humidity_pct / 100.0, self.pressure_kpa)?.with_beta(self.beta)?;
        Ok(if self.lossless { m.lossless() } else { m })
    }
}

fn default_velocity() -> f64 {
    0.1
}

fn default_material() -> String {
    "aluminum".into()
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceBlock {
    /// Radius given directly, or sized so that z1 equals `d_uc_m`.
    Piston {
        frequency_hz: f64,
        #[serde(default)]
        radius_m: Option<f64>,
        #[serde(default)]
        d_uc_m: Option<f64>,
        #[serde(default = "default_velocity")]
        velocity_m_s: f64,
    },
    /// Plate sized for mode `mode_m` at `f_u0_hz` and aperture from `d_uc_m`.
    Plate {
        f_u0_hz: f64,
        d_uc_m: f64,
        mode_m: usize,
        #[serde(default = "default_material")]
        material: String,
        #[serde(default)]
        boundary: Boundary,
        /// `none` gives the bare flat plate.
        #[serde(default)]
        steps: StepPolicy,
        #[serde(default = "one")]
        center_velocity_m_s: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PairBlock {
    pub f_carrier_hz: f64,
    pub f_a_hz: f64,
    pub f_a_grid_hz: Vec<f64>,
    /// Sideband and carrier surface (piston) or centre (plate) velocities.
    pub v1_m_s: f64,
    pub v2_m_s: f64,
}

impl Default for PairBlock {
    fn default() -> Self {
        Self { f_carrier_hz: 60e3, f_a_hz: 1e3, f_a_grid_hz: vec![250.0, 500.0, 1000.0, 2000.0, 4000.0], v1_m_s: 0.1, v2_m_s: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl LinearGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.count <= 1 {
            return vec![self.start];
        }
        (0..self.count).map(|i| self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    /// Axial grid; defaults to one scaled on z1.
    pub z_grid_m: Option<LinearGrid>,
    pub theta_grid_deg: LinearGrid,
    pub range_m: f64,
    /// Frequencies for `er`; defaults to f_u0 +/- 5 kHz.
    pub freq_grid_hz: Option<LinearGrid>,
    pub truncation_db: f64,
    pub beam_radii: f64,
    pub refinement: f64,
    pub z_max_m: Option<f64>,
    pub r_max_m: Option<f64>,
}

impl Default for SolverBlock {
    fn default() -> Self {
        let g = GridOptions::default();
        Self {
            z_grid_m: None,
            theta_grid_deg: LinearGrid { start: -30.0, stop: 30.0, count: 241 },
            range_m: 1.0,
            freq_grid_hz: None,
            truncation_db: g.truncation_db,
            beam_radii: g.beam_radii,
            refinement: g.refinement,
            z_max_m: None,
            r_max_m: None,
        }
    }
}

impl SolverBlock {
    pub fn grid_options(&self) -> GridOptions {
        GridOptions {
            truncation_db: self.truncation_db,
            beam_radii: self.beam_radii,
            refinement: self.refinement,
            z_max: self.z_max_m,
            r_max: self.r_max_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransducerBlock {
    pub surrogate: SurrogateBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurrogateBlock {
    pub kind: SurrogateKind,
    #[serde(default = "one")]
    pub gain: f64,
    #[serde(default)]
    pub f_r1_hz: f64,
    pub f_r2_hz: f64,
    #[serde(default)]
    pub f_anti_hz: f64,
    pub eta: f64,
    /// Rescales the response so the carrier velocity has this magnitude.
    #[serde(default)]
    pub carrier_velocity_m_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContourBlock {
    pub f_u0_hz: Vec<f64>,
    pub d_uc_m: Vec<f64>,
}

impl Default for ContourBlock {
    fn default() -> Self {
        Self { f_u0_hz: vec![40e3, 50e3, 60e3, 75e3, 90e3], d_uc_m: vec![0.30, 0.35, 0.40, 0.45] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DesignBlock {
    pub d_uc_m: f64,
    pub f_u0_hz: f64,
    pub mode_m: usize,
    pub config: Xdcr,
    pub r_p_m: f64,
    pub l_p_m: f64,
    pub r_h_m: f64,
    pub plate_material: String,
    pub drive_voltage_v: f64,
    pub horn_step_ratio: f64,
}

impl Default for DesignBlock {
    fn default() -> Self {
        Self {
            d_uc_m: 0.45,
            f_u0_hz: 60e3,
            mode_m: 8,
            config: Xdcr::Full,
            r_p_m: 9e-3,
            l_p_m: 8e-3,
            r_h_m: 0.75e-3,
            plate_material: default_material(),
            drive_voltage_v: 20.0,
            horn_step_ratio: 1.0,
        }
    }
}

impl DesignBlock {
    pub fn params(&self) -> anyhow::Result<DesignParams> {
        let mut p = DesignParams::new(self.d_uc_m, self.f_u0_hz, self.mode_m, self.config, self.r_p_m, self.l_p_m, self.r_h_m);
        p.plate_material = material(&self.plate_material)?;
        p.stack.drive_voltage = self.drive_voltage_v;
        p.stack.horn_step_ratio = self.horn_step_ratio;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepBlock {
    pub d_uc_m: Vec<f64>,
    pub f_u0_hz: Vec<f64>,
    pub mode_m: Vec<usize>,
    pub config: Vec<Xdcr>,
    pub r_p_m: Vec<f64>,
    pub r_h_m: Vec<f64>,
    pub l_p_m: f64,
    pub f_dist_window_hz: (f64, f64),
    pub audio: bool,
}

impl Default for SweepBlock {
    fn default() -> Self {
        let g = SweepGrid::default();
        Self {
            d_uc_m: g.d_uc,
            f_u0_hz: g.f_u0,
            mode_m: g.mode_m,
            config: g.config,
            r_p_m: g.r_p,
            r_h_m: g.r_h,
            l_p_m: g.l_p,
            f_dist_window_hz: (800.0, 1250.0),
            audio: true,
        }
    }
}

impl SweepBlock {
    pub fn grid(&self) -> SweepGrid {
        SweepGrid {
            d_uc: self.d_uc_m.clone(),
            f_u0: self.f_u0_hz.clone(),
            mode_m: self.mode_m.clone(),
            config: self.config.clone(),
            r_p: self.r_p_m.clone(),
            r_h: self.r_h_m.clone(),
            l_p: self.l_p_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerBlock {
    pub design: DesignBlock,
    pub nsga: NsgaConfig,
    pub sweep: SweepBlock,
}

impl Default for OptimizerBlock {
    fn default() -> Self {
        Self { design: DesignBlock::default(), nsga: NsgaConfig::default(), sweep: SweepBlock::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrBlock {
    pub modal_freqs_hz: Vec<f64>,
    pub band_hz: (f64, f64),
    pub tol_hz: f64,
}

impl Default for CrBlock {
    fn default() -> Self {
        Self { modal_freqs_hz: Vec::new(), band_hz: (100.0, 6000.0), tol_hz: 100.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    #[default]
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub directory: String,
    pub formats: Format,
    /// Treat solver warnings (e.g. truncation) as failures.
    pub warnings_as_errors: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { directory: ".".into(), formats: Format::Both, warnings_as_errors: false }
    }
}

pub fn material(name: &str) -> anyhow::Result<Material> {
    Material::builtin(name).with_context(|| format!("unknown material '{name}' (known: aluminum, stainless_steel, pzt)"))
}

pub fn load_config(path: &Path) -> anyhow::Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in config {}", path.display()))
}

pub fn parse_config(text: &str) -> anyhow::Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| anyhow::anyhow!("parse error at line {}, column {}: {e}", e.line(), e.column()))?;
    let problems = cfg.problems();
    if !problems.is_empty() {
        bail!("invalid config:\n  - {}", problems.join("\n  - "));
    }
    Ok(cfg)
}

/// Blocks each subcommand needs.
pub fn required_blocks(command: &str) -> &'static [&'static str] {
    match command {
        "pc" | "bp" | "er" => &["source"],
        "audio-pc" | "audio-bp" | "audio-fr" => &["source", "pair"],
        "cd-contour" => &["contour", "pair"],
        "pareto" | "sweep" => &["optimizer"],
        "cr-screen" => &["cr"],
        _ => &[],
    }
}

impl RunConfig {
    /// Every semantic violation, independent of the subcommand.
    pub fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        if let Err(e) = self.medium.build() {
            p.push(format!("medium: {e}"));
        }
        match &self.source {
            Some(SourceBlock::Piston { frequency_hz, radius_m, d_uc_m, .. }) => {
                if !(*frequency_hz > 0.0) {
                    p.push("source.frequency_hz must be positive".into());
                }
                match (radius_m, d_uc_m) {
                    (None, None) => p.push("source: piston needs radius_m or d_uc_m".into()),
                    (Some(_), Some(_)) => p.push("source: give only one of radius_m and d_uc_m".into()),
                    (Some(r), None) if !(*r > 0.0) => p.push("source.radius_m must be positive".into()),
                    (None, Some(d)) if !(*d > 0.0) => p.push("source.d_uc_m must be positive".into()),
                    _ => {}
                }
            }
            Some(SourceBlock::Plate { f_u0_hz, d_uc_m, mode_m, material: m, .. }) => {
                if !(*f_u0_hz > 0.0) {
                    p.push("source.f_u0_hz must be positive".into());
                }
                if !(*d_uc_m > 0.0) {
                    p.push("source.d_uc_m must be positive".into());
                }
                if *mode_m < 1 {
                    p.push("source.mode_m must be at least 1".into());
                }
                if Material::builtin(m).is_none() {
                    p.push(format!("source.material '{m}' is not a built-in material"));
                }
            }
            None => {}
        }
        if let Some(pair) = &self.pair {
            if !(pair.f_carrier_hz > 0.0) {
                p.push("pair.f_carrier_hz must be positive".into());
            }
            for f in std::iter::once(pair.f_a_hz).chain(pair.f_a_grid_hz.iter().cloned()) {
                if !(f > 0.0 && f < pair.f_carrier_hz) {
                    p.push(format!("pair: audio frequency {f} Hz must lie in (0, f_carrier_hz)"));
                }
            }
        }
        let s = &self.solver;
        if !(s.range_m > 0.0) {
            p.push("solver.range_m must be positive".into());
        }
        if !(s.refinement > 0.0) {
            p.push("solver.refinement must be positive".into());
        }
        if !(s.truncation_db > 0.0) {
            p.push("solver.truncation_db must be positive".into());
        }
        if s.theta_grid_deg.count < 2 {
            p.push("solver.theta_grid_deg needs at least 2 points".into());
        }
        if let Some(g) = &s.z_grid_m {
            if g.count < 1 || !(g.start > 0.0) || g.stop < g.start {
                p.push("solver.z_grid_m needs 0 < start <= stop and count >= 1".into());
            }
        }
        if let Some(t) = &self.transducer {
            let sg = &t.surrogate;
            if !(sg.eta > 0.0) {
                p.push("transducer.surrogate.eta must be positive".into());
            }
            if sg.kind == SurrogateKind::DR && !(sg.f_r1_hz > 0.0 && sg.f_r1_hz < sg.f_anti_hz && sg.f_anti_hz < sg.f_r2_hz) {
                p.push("transducer.surrogate: need 0 < f_r1_hz < f_anti_hz < f_r2_hz".into());
            }
        }
        if let Some(c) = &self.contour {
            if c.f_u0_hz.iter().chain(&c.d_uc_m).any(|v| !(*v > 0.0)) {
                p.push("contour: grid values must be positive".into());
            }
        }
        if let Some(o) = &self.optimizer {
            if o.nsga.pop < 8 || o.nsga.pop % 2 != 0 {
                p.push("optimizer.nsga.pop must be even and at least 8".into());
            }
            if o.nsga.generations < 1 {
                p.push("optimizer.nsga.generations must be at least 1".into());
            }
            if Material::builtin(&o.design.plate_material).is_none() {
                p.push(format!("optimizer.design.plate_material '{}' is not a built-in material", o.design.plate_material));
            }
        }
        if let Some(c) = &self.cr {
            if !(c.tol_hz > 0.0) {
                p.push("cr.tol_hz must be positive".into());
            }
            if !(c.band_hz.1 > c.band_hz.0) {
                p.push("cr.band_hz must be increasing".into());
            }
        }
        p
    }

    pub fn check_for(&self, command: &str) -> anyhow::Result<()> {
        let missing: Vec<&str> = required_blocks(command)
            .iter()
            .cloned()
            .filter(|b| match *b {
                "source" => self.source.is_none(),
                "pair" => self.pair.is_none(),
                "contour" => self.contour.is_none(),
                "optimizer" => self.optimizer.is_none(),
                "cr" => self.cr.is_none(),
                _ => false,
            })
            .collect();
        if !missing.is_empty() {
            bail!("`{command}` needs the {} block(s) in the config", missing.join(", "));
        }
        if command == "er" && !matches!(self.source, Some(SourceBlock::Plate { .. })) {
            bail!("`er` needs a plate source block");
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.optimizer.as_ref().map_or(NsgaConfig::default().seed, |o| o.nsga.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_medium() {
        let c = parse_config(r#"{"source": {"kind": "piston", "frequency_hz": 60000, "radius_m": 0.05}}"#).unwrap();
        assert_eq!(c.medium.temperature_c, 20.0);
        assert_eq!(c.medium.relative_humidity_pct, 70.0);
        assert_eq!(c.medium.pressure_kpa, 101.325);
    }

    #[test]
    fn unknown_field_rejected() {
        let e = parse_config(r#"{"medium": {"temperature": 20}}"#).unwrap_err();
        assert!(format!("{e:#}").contains("unknown field"), "{e:#}");
    }

    #[test]
    fn every_problem_listed() {
        let e = parse_config(r#"{"medium": {"pressure_kpa": -1}, "solver": {"range_m": 0}}"#).unwrap_err();
        let msg = format!("{e:#}");
        assert!(msg.contains("medium") && msg.contains("range_m"), "{msg}");
    }

    #[test]
    fn missing_block_named() {
        let c = parse_config("{}").unwrap();
        let e = c.check_for("pc").unwrap_err();
        assert!(e.to_string().contains("source"));
    }
}

//! Langevin transducer response: a 1D lossy transfer-matrix stack terminated
//! by a single-mode plate load, pole-zero-gain surrogates, dual-resonance
//! feature extraction and the design objectives.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linfield::{piston_radiation_impedance, EquivalenceRatio};
use crate::medium::Medium;
use crate::radiator::{Material, ModeShape, PlateSpec};
use crate::special::{refine_root, GaussLegendre};

/// Neck radii of the sweep catalogue, m.
pub const HORN_RADIUS_CATALOG: [f64; 4] = [0.75e-3, 1.00e-3, 1.25e-3, 1.50e-3];
/// Piezo ring radii of the sweep catalogue, m.
pub const PIEZO_RADIUS_CATALOG: [f64; 4] = [7e-3, 9e-3, 11e-3, 13e-3];
/// Spacing of the peak-search grid, Hz.
pub const PEAK_GRID_STEP: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Config {
    Half,
    Full,
}

impl Config {
    pub fn stack_count(self) -> usize {
        match self {
            Config::Half => 1,
            Config::Full => 2,
        }
    }

    pub fn design_len(self) -> usize {
        match self {
            Config::Half => 3,
            Config::Full => 4,
        }
    }
}

/// Electroded piezo stack occupying one segment. Layers are poled
/// alternately and wired in parallel, so every layer sees `V / t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piezo {
    /// Short-circuit axial compliance, 1/Pa.
    pub s33e: f64,
    /// m/V.
    pub d33: f64,
    /// Clamped permittivity, F/m.
    pub eps33s: f64,
    /// m^2.
    pub electrode_area: f64,
    pub layers: usize,
    /// +1 or -1; flips the sense of the drive.
    pub polarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub length: f64,
    pub radius: f64,
    /// Density and loss; the stiffness of a piezo segment comes from `s33e`.
    pub material: Material,
    pub piezo: Option<Piezo>,
}

impl Segment {
    pub fn new(length: f64, radius: f64, material: Material) -> Result<Self> {
        let s = Self { length, radius, material, piezo: None };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.radius > 0.0) {
            return domain(format!("segment length {} and radius {} must be positive", self.length, self.radius));
        }
        if !(self.material.density > 0.0 && self.material.youngs_modulus > 0.0 && self.material.loss_factor >= 0.0) {
            return domain(format!("segment material {} has invalid constants", self.material.name));
        }
        if let Some(p) = &self.piezo {
            if !(p.s33e > 0.0 && p.layers > 0 && p.electrode_area > 0.0) {
                return domain("piezo segment needs positive compliance, layer count and electrode area");
            }
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    fn complex_modulus(&self, lossless: bool) -> Complex64 {
        let e = match &self.piezo {
            Some(p) => 1.0 / p.s33e,
            None => self.material.youngs_modulus,
        };
        let eta = if lossless { 0.0 } else { self.material.loss_factor };
        Complex64::new(e, e * eta)
    }

    /// Maps `(N, v)` at the input face to the output face; `N` is the axial
    /// tensile force.
    pub fn matrix(&self, f: f64) -> [[Complex64; 2]; 2] {
        self.matrix_with(f, false)
    }

    fn matrix_with(&self, f: f64, lossless: bool) -> [[Complex64; 2]; 2] {
        let w = 2.0 * PI * f;
        let y = self.complex_modulus(lossless);
        let rho = self.material.density;
        let k = w * (rho / y).sqrt();
        let z = self.area() * (rho * y).sqrt();
        let kl = k * self.length;
        let (c, s) = (kl.cos(), kl.sin());
        let i = Complex64::i();
        [[c, i * z * s], [i * s / z, c]]
    }

    /// Blocked force of the stack per volt of drive, N/V.
    fn blocked_force_per_volt(&self) -> Complex64 {
        match &self.piezo {
            Some(p) => {
                let t = self.length / p.layers as f64;
                self.complex_modulus(false) * (p.polarity * self.area() * p.d33 / t)
            }
            None => Complex64::new(0.0, 0.0),
        }
    }
}

pub fn mat_mul(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransducerSpec {
    pub config: Config,
    /// Back mass first, plate interface last.
    pub segments: Vec<Segment>,
    pub drive_voltage: f64,
    /// External force on the back face, N. Lets passive bars be excited.
    #[serde(default)]
    pub back_force: f64,
    /// Segment indices that the design vector `x` sets, in order.
    #[serde(default)]
    pub design_indices: Vec<usize>,
}

impl TransducerSpec {
    pub fn new(config: Config, segments: Vec<Segment>, drive_voltage: f64) -> Result<Self> {
        let spec = Self { config, segments, drive_voltage, back_force: 0.0, design_indices: Vec::new() };
        spec.validate()?;
        Ok(spec)
    }

    /// A stack must match its configuration; a bar with no stacks at all is
    /// accepted as a passive element driven through `back_force`.
    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return domain("transducer has no segments");
        }
        for s in &self.segments {
            s.validate()?;
        }
        let stacks = self.stack_count();
        if stacks != 0 && stacks != self.config.stack_count() {
            return domain(format!("{:?} configuration needs {} piezo stack(s), found {stacks}", self.config, self.config.stack_count()));
        }
        if !self.drive_voltage.is_finite() || !self.back_force.is_finite() {
            return domain("drive must be finite");
        }
        if self.design_indices.iter().any(|&i| i >= self.segments.len()) {
            return domain("design index out of range");
        }
        Ok(())
    }

    /// Runs of consecutive piezo segments.
    pub fn stack_count(&self) -> usize {
        let mut n = 0;
        let mut prev = false;
        for s in &self.segments {
            let p = s.piezo.is_some();
            if p && !prev {
                n += 1;
            }
            prev = p;
        }
        n
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    pub fn horn_end_radius(&self) -> f64 {
        self.segments.last().map(|s| s.radius).unwrap_or(0.0)
    }

    pub fn design_vector(&self) -> Vec<f64> {
        self.design_indices.iter().map(|&i| self.segments[i].length).collect()
    }

    pub fn with_design(&self, x: &[f64]) -> Result<Self> {
        if x.len() != self.design_indices.len() {
            return domain(format!("design vector has {} entries, expected {}", x.len(), self.design_indices.len()));
        }
        let mut out = self.clone();
        for (&i, &l) in self.design_indices.iter().zip(x) {
            out.segments[i].length = l;
        }
        out.validate()?;
        Ok(out)
    }

    /// Product of all segment matrices, back face to front face.
    pub fn chain_matrix(&self, f: f64) -> [[Complex64; 2]; 2] {
        self.chain_with(f, false)
    }

    fn chain_with(&self, f: f64, lossless: bool) -> [[Complex64; 2]; 2] {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        self.segments
            .iter()
            .fold([[one, zero], [zero, one]], |acc, s| mat_mul(&s.matrix_with(f, lossless), &acc))
    }

    /// Front-face velocity for load impedance `z_load` (front force `N = -Z v`,
    /// free back face). `None` when the chain is singular.
    pub fn front_velocity(&self, f: f64, z_load: Complex64) -> Option<Complex64> {
        // Front state = v0 * (a_n, a_v) + (b_n, b_v).
        let mut a = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        let mut b = [Complex64::new(-self.back_force, 0.0), Complex64::new(0.0, 0.0)];
        for s in &self.segments {
            let m = s.matrix(f);
            let np = s.blocked_force_per_volt() * self.drive_voltage;
            a = [m[0][0] * a[0] + m[0][1] * a[1], m[1][0] * a[0] + m[1][1] * a[1]];
            let bn = b[0] + np;
            b = [m[0][0] * bn + m[0][1] * b[1] - np, m[1][0] * bn + m[1][1] * b[1]];
        }
        let den = a[0] + z_load * a[1];
        let scale = a[0].norm() + (z_load * a[1]).norm();
        if !(den.norm() > 1e-13 * scale) || !den.is_finite() {
            return None;
        }
        let v0 = -(b[0] + z_load * b[1]) / den;
        let v = a[1] * v0 + b[1];
        v.is_finite().then_some(v)
    }
}

/// Ceramic constants of the drive rings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiezoMaterial {
    pub name: String,
    pub s11e: f64,
    pub s33e: f64,
    pub d33: f64,
    pub eps33s: f64,
    pub density: f64,
    pub loss_factor: f64,
}

impl PiezoMaterial {
    pub fn pzt4() -> Self {
        Self {
            name: "pzt4".into(),
            s11e: 12.3e-12,
            s33e: 15.5e-12,
            d33: 289e-12,
            eps33s: 5.62e-9,
            density: 7500.0,
            loss_factor: 0.01,
        }
    }

    /// Radial-mode wave speed `1 / sqrt(rho s11E)`.
    pub fn radial_speed(&self) -> f64 {
        1.0 / (self.density * self.s11e).sqrt()
    }

    pub fn axial_speed(&self) -> f64 {
        1.0 / (self.density * self.s33e).sqrt()
    }

    fn as_material(&self) -> Material {
        Material {
            name: self.name.clone(),
            youngs_modulus: 1.0 / self.s33e,
            poisson_ratio: 0.31,
            density: self.density,
            loss_factor: self.loss_factor,
        }
    }
}

/// Materials and fixed parameters of a stack build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StackOptions {
    /// Nominal frequency the ring-radius band is checked at, Hz.
    pub f_u0: f64,
    pub back: Material,
    pub front: Material,
    pub horn: Material,
    pub piezo: PiezoMaterial,
    /// Rings per stack.
    pub layers: usize,
    /// Radius of the first horn section relative to `r_P`; the second
    /// section has radius `r_H`.
    pub horn_step_ratio: f64,
    pub drive_voltage: f64,
}

impl Default for StackOptions {
    fn default() -> Self {
        Self {
            f_u0: 60e3,
            back: Material::stainless_steel(),
            front: Material::aluminum(),
            horn: Material::aluminum(),
            piezo: PiezoMaterial::pzt4(),
            layers: 2,
            horn_step_ratio: 1.0,
            drive_voltage: 20.0,
        }
    }
}

/// Assembles the segment chain. Half: back, stack, front, neck.
/// Full: back, stack, middle, reversed stack, front, neck.
pub fn build_stack(config: Config, r_p: f64, l_p: f64, r_h: f64, x: &[f64], opts: &StackOptions) -> Result<TransducerSpec> {
    if x.len() != config.design_len() {
        return domain(format!("{config:?} configuration takes {} lengths, got {}", config.design_len(), x.len()));
    }
    if !(r_p > 0.0 && l_p > 0.0 && r_h > 0.0 && opts.f_u0 > 0.0) {
        return domain("r_P, l_P, r_H and f_u0 must be positive");
    }
    if !(opts.horn_step_ratio > 0.0) {
        return domain("horn step ratio must be positive");
    }
    let lambda = opts.piezo.radial_speed() / opts.f_u0;
    if !(r_p > lambda / 8.0 && r_p < lambda / 4.0) {
        return Err(Error::Infeasible(format!(
            "r_P = {:.2} mm is outside ({:.2}, {:.2}) mm at {} Hz",
            r_p * 1e3,
            lambda / 8.0 * 1e3,
            lambda / 4.0 * 1e3,
            opts.f_u0
        )));
    }
    let stack = |polarity: f64| -> Result<Segment> {
        let s = Segment {
            length: l_p,
            radius: r_p,
            material: opts.piezo.as_material(),
            piezo: Some(Piezo {
                s33e: opts.piezo.s33e,
                d33: opts.piezo.d33,
                eps33s: opts.piezo.eps33s,
                electrode_area: PI * r_p * r_p,
                layers: opts.layers.max(1),
                polarity,
            }),
        };
        s.validate()?;
        Ok(s)
    };
    let horn_r = r_p * opts.horn_step_ratio;
    let (segments, design_indices) = match config {
        Config::Half => (
            vec![
                Segment::new(x[0], r_p, opts.back.clone())?,
                stack(1.0)?,
                Segment::new(x[1], horn_r, opts.front.clone())?,
                Segment::new(x[2], r_h, opts.horn.clone())?,
            ],
            vec![0, 2, 3],
        ),
        Config::Full => (
            vec![
                Segment::new(x[0], r_p, opts.back.clone())?,
                stack(1.0)?,
                Segment::new(x[1], r_p, opts.front.clone())?,
                stack(-1.0)?,
                Segment::new(x[2], horn_r, opts.front.clone())?,
                Segment::new(x[3], r_h, opts.horn.clone())?,
            ],
            vec![0, 2, 4, 5],
        ),
    };
    let mut spec = TransducerSpec::new(config, segments, opts.drive_voltage)?;
    spec.design_indices = design_indices;
    Ok(spec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialLengths {
    pub x0: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Scales the design segments of `template` together (keeping their
/// ratios) until the free-free chain resonates at `f_u0` in its half-wave
/// (Half) or full-wave (Full) mode. With no design indices every segment
/// is scaled.
pub fn langevin_initial_lengths(f_u0: f64, template: &TransducerSpec) -> Result<InitialLengths> {
    if !(f_u0 > 0.0) {
        return domain("f_u0 must be positive");
    }
    template.validate()?;
    let idx: Vec<usize> = if template.design_indices.is_empty() {
        (0..template.segments.len()).collect()
    } else {
        template.design_indices.clone()
    };
    let ratios: Vec<f64> = idx.iter().map(|&i| template.segments[i].length).collect();
    let order = match template.config {
        Config::Half => 1,
        Config::Full => 2,
    };
    // Free-free resonance: the lossless chain has purely imaginary M12.
    let m12 = |s: f64| {
        let mut t = template.clone();
        for (&i, &r) in idx.iter().zip(&ratios) {
            t.segments[i].length = s * r;
        }
        t.chain_with(f_u0, true)[0][1].im
    };
    let shortest = idx
        .iter()
        .map(|&i| template.segments[i].material.bar_speed() / f_u0)
        .fold(f64::INFINITY, f64::min);
    let ratio_max = ratios.iter().cloned().fold(0.0, f64::max);
    let step = shortest / (400.0 * ratio_max);
    let mut s = step;
    let mut prev = m12(s);
    let mut found = 0;
    let mut scale = None;
    while s < 2000.0 * step {
        let next = m12(s + step);
        if prev == 0.0 || prev.signum() != next.signum() {
            found += 1;
            if found == order {
                scale = refine_root(&m12, s, s + step, 1e-14 * s);
                break;
            }
        }
        prev = next;
        s += step;
    }
    let scale = scale.ok_or_else(|| Error::Numerical(format!("no resonant length allocation found at {f_u0} Hz")))?;
    let x0: Vec<f64> = ratios.iter().map(|r| r * scale).collect();
    Ok(InitialLengths {
        lower: x0.iter().map(|x| 0.5 * x).collect(),
        upper: x0.iter().map(|x| 1.5 * x).collect(),
        x0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frf {
    pub freqs: Vec<f64>,
    pub center_velocity: Vec<Complex64>,
    /// Samples where the chain was singular; their values are interpolated.
    #[serde(default)]
    pub flagged: Vec<usize>,
}

impl Frf {
    pub fn new(freqs: Vec<f64>, center_velocity: Vec<Complex64>) -> Result<Self> {
        if freqs.len() != center_velocity.len() {
            return domain("frequency and velocity lengths differ");
        }
        check_grid(&freqs)?;
        Ok(Self { freqs, center_velocity, flagged: Vec::new() })
    }

    pub fn magnitude(&self) -> Vec<f64> {
        self.center_velocity.iter().map(|v| v.norm()).collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            center_velocity: self.center_velocity.iter().map(|v| v * s).collect(),
            ..self.clone()
        }
    }

    /// Linear interpolation of the complex velocity, clamped at the ends.
    pub fn velocity_at(&self, f: f64) -> Complex64 {
        let n = self.freqs.len();
        if f <= self.freqs[0] {
            return self.center_velocity[0];
        }
        if f >= self.freqs[n - 1] {
            return self.center_velocity[n - 1];
        }
        let j = self.freqs.partition_point(|&x| x <= f);
        let t = (f - self.freqs[j - 1]) / (self.freqs[j] - self.freqs[j - 1]);
        self.center_velocity[j - 1] * (1.0 - t) + self.center_velocity[j] * t
    }
}

fn check_grid(freqs: &[f64]) -> Result<()> {
    if freqs.is_empty() {
        return domain("empty frequency grid");
    }
    if freqs.iter().any(|f| !(*f > 0.0 && f.is_finite())) {
        return domain("frequencies must be positive and finite");
    }
    if freqs.windows(2).any(|w| w[1] <= w[0]) {
        return domain("frequency grid must be strictly increasing");
    }
    Ok(())
}

/// Uniform grid from `lo` to `hi` inclusive with spacing close to `step`.
pub fn frequency_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && step > 0.0) {
        return domain("need 0 < lo < hi and step > 0");
    }
    let n = ((hi - lo) / step).round().max(1.0) as usize;
    Ok((0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurrogateKind {
    SR,
    DR,
}

/// Pole-zero-gain velocity surrogates of a single- and dual-resonance stack.
pub fn pzg_frf(kind: SurrogateKind, gain: f64, f_r1: f64, f_r2: f64, f_a_anti: f64, eta: f64, freqs: &[f64]) -> Result<Frf> {
    check_grid(freqs)?;
    if !(eta > 0.0) {
        return domain("loss factor must be positive");
    }
    if !(f_r2 > 0.0) {
        return domain("f_r2 must be positive");
    }
    if kind == SurrogateKind::DR && !(f_r1 > 0.0 && f_r1 < f_a_anti && f_a_anti < f_r2) {
        return domain(format!("need 0 < f_r1 < f_a < f_r2, got {f_r1}, {f_a_anti}, {f_r2}"));
    }
    let lossy = Complex64::new(1.0, eta);
    let w1 = 2.0 * PI * f_r1;
    let w2 = 2.0 * PI * f_r2;
    let wa = 2.0 * PI * f_a_anti;
    let v = freqs
        .iter()
        .map(|&f| {
            let w = 2.0 * PI * f;
            let iwk = Complex64::new(0.0, w * gain);
            let p2 = w2 * w2 * lossy - w * w;
            match kind {
                SurrogateKind::SR => iwk / p2,
                SurrogateKind::DR => iwk * (wa * wa * lossy - w * w) / ((w1 * w1 * lossy - w * w) * p2),
            }
        })
        .collect();
    Frf::new(freqs.to_vec(), v)
}

/// Drive-point impedance at the plate centre for a single axisymmetric
/// mode, with the piston radiation load referred through the equivalence
/// ratio.
pub fn plate_load_impedance(plate: &PlateSpec, mode: &ModeShape, er: &EquivalenceRatio, medium: &Medium, freqs: &[f64]) -> Result<Vec<Complex64>> {
    plate.validate()?;
    check_grid(freqs)?;
    if (mode.radius_a - plate.radius_a).abs() > 1e-12 * plate.radius_a || mode.mode_m != plate.mode_m || mode.boundary != plate.boundary {
        return domain("mode shape does not belong to this plate");
    }
    let m_eff = modal_mass(plate, mode);
    let wm = 2.0 * PI * mode.natural_frequency;
    let k_eff = m_eff * wm * wm;
    let eps2 = 10f64.powf(er.er_db / 10.0);
    let stiff = Complex64::new(k_eff, k_eff * plate.loss_factor);
    freqs
        .iter()
        .map(|&f| {
            let w = 2.0 * PI * f;
            let rad = if eps2 > 0.0 { piston_radiation_impedance(plate.radius_a, f, medium)? * eps2 } else { Complex64::new(0.0, 0.0) };
            Ok(Complex64::new(0.0, w * m_eff) + stiff / Complex64::new(0.0, w) + rad)
        })
        .collect()
}

/// `int rho h w^2 dA` with `w(0) = 1`.
pub fn modal_mass(plate: &PlateSpec, mode: &ModeShape) -> f64 {
    let gl = GaussLegendre::new(8);
    let panels = 32 + 8 * mode.mode_m;
    let a = plate.radius_a;
    let mut sum = 0.0;
    for j in 0..panels {
        let lo = a * j as f64 / panels as f64;
        let hi = a * (j + 1) as f64 / panels as f64;
        for (r, w) in gl.on_interval(lo, hi) {
            sum += w * r * mode.eval(r).powi(2);
        }
    }
    2.0 * PI * plate.areal_density() * sum
}

/// Centre velocity of the stack driving `load` (one impedance per
/// frequency). Singular samples are flagged and linearly interpolated.
pub fn frf_transfer_matrix(spec: &TransducerSpec, load: &[Complex64], freqs: &[f64]) -> Result<Frf> {
    spec.validate()?;
    check_grid(freqs)?;
    if load.len() != freqs.len() {
        return domain(format!("load has {} samples for {} frequencies", load.len(), freqs.len()));
    }
    let raw: Vec<Option<Complex64>> = freqs.par_iter().zip(load.par_iter()).map(|(&f, &z)| spec.front_velocity(f, z)).collect();
    let good: Vec<usize> = (0..raw.len()).filter(|&i| raw[i].is_some()).collect();
    if good.is_empty() {
        return Err(Error::Numerical("transfer-matrix chain is singular at every frequency".into()));
    }
    let mut flagged = Vec::new();
    let mut v = Vec::with_capacity(raw.len());
    for (i, r) in raw.iter().enumerate() {
        match r {
            Some(x) => v.push(*x),
            None => {
                flagged.push(i);
                let j = good.partition_point(|&g| g < i);
                let val = match (j.checked_sub(1).map(|k| good[k]), good.get(j)) {
                    (Some(lo), Some(&hi)) => {
                        let t = (freqs[i] - freqs[lo]) / (freqs[hi] - freqs[lo]);
                        raw[lo].unwrap() * (1.0 - t) + raw[hi].unwrap() * t
                    }
                    (Some(lo), None) => raw[lo].unwrap(),
                    (None, Some(&hi)) => raw[hi].unwrap(),
                    (None, None) => unreachable!(),
                };
                v.push(val);
            }
        }
    }
    let mut frf = Frf::new(freqs.to_vec(), v)?;
    frf.flagged = flagged;
    Ok(frf)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrFeatures {
    pub f_r1: f64,
    pub f_r2: f64,
    pub v_r1: f64,
    pub v_r2: f64,
    pub f_m: f64,
    pub v_m: f64,
    pub f_dist: f64,
}

/// Vertex of the parabola through three samples (abscissa, ordinate).
fn parabola_peak(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let c = (d2 - d1) / (x[2] - x[0]);
    if c == 0.0 || !c.is_finite() {
        return (x[1], y[1]);
    }
    let b = d1 - c * (x[0] + x[1]);
    let xv = (-b / (2.0 * c)).clamp(x[0], x[2]);
    let yv = y[0] + d1 * (xv - x[0]) + c * (xv - x[0]) * (xv - x[1]);
    (xv, yv)
}

/// The two largest interior peaks of `|v|`, ordered by frequency, and the
/// minimum between them.
pub fn extract_dr_features(frf: &Frf) -> Result<DrFeatures> {
    let m = frf.magnitude();
    let f = &frf.freqs;
    let mut peaks: Vec<usize> = (1..m.len().saturating_sub(1)).filter(|&i| m[i] > m[i - 1] && m[i] >= m[i + 1]).collect();
    if peaks.len() < 2 {
        return Err(Error::NoDualResonance(format!("found {} interior peak(s)", peaks.len())));
    }
    // Largest first; equal heights resolve to the lower frequency.
    peaks.sort_by(|&a, &b| m[b].total_cmp(&m[a]).then(a.cmp(&b)));
    let (i1, i2) = (peaks[0].min(peaks[1]), peaks[0].max(peaks[1]));
    let im = (i1 + 1..i2).min_by(|&a, &b| m[a].total_cmp(&m[b]).then(a.cmp(&b))).unwrap_or(i1);
    if im == i1 {
        return Err(Error::NoDualResonance("peaks are adjacent samples".into()));
    }
    let refine = |i: usize| parabola_peak([f[i - 1], f[i], f[i + 1]], [m[i - 1], m[i], m[i + 1]]);
    let (f_r1, v_r1) = refine(i1);
    let (f_r2, v_r2) = refine(i2);
    let (f_m, v_m) = refine(im);
    let v_m = v_m.min(m[im]);
    Ok(DrFeatures { f_r1, f_r2, v_r1, v_r2, f_m, v_m, f_dist: f_r2 - f_r1 })
}

/// `(F1, F2)`: negative geometric mean of the two peaks and the dip, and
/// the peak separation.
pub fn objectives(features: &DrFeatures) -> Result<(f64, f64)> {
    let DrFeatures { v_r1, v_r2, v_m, .. } = *features;
    if !(v_r1 > 0.0 && v_r2 > 0.0 && v_m > 0.0) {
        return domain(format!("velocities must be positive, got ({v_r1}, {v_r2}, {v_m})"));
    }
    Ok((-(v_r1 * v_r2 * v_m).cbrt(), features.f_r2 - features.f_r1))
}

/// Audio-frequency interval around one structural mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrFlag {
    pub mode_freq: f64,
    pub lo: f64,
    pub hi: f64,
}

impl CrFlag {
    pub fn contains(&self, f_a: f64) -> bool {
        f_a >= self.lo && f_a <= self.hi
    }
}

/// Flags audio frequencies within `tol` of any modal frequency, clipped to
/// the audio band. Modes whose window misses the band are dropped.
pub fn cr_screen(modal_freqs: &[f64], audio_band: (f64, f64), tol: f64) -> Result<Vec<CrFlag>> {
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    if !(audio_band.1 > audio_band.0) {
        return domain("audio band must be increasing");
    }
    let mut flags: Vec<CrFlag> = modal_freqs
        .iter()
        .filter(|f| f.is_finite())
        .map(|&f| CrFlag { mode_freq: f, lo: (f - tol).max(audio_band.0), hi: (f + tol).min(audio_band.1) })
        .filter(|c| c.lo <= c.hi)
        .collect();
    flags.sort_by(|a, b| a.mode_freq.total_cmp(&b.mode_freq));
    Ok(flags)
}

pub fn is_flagged(flags: &[CrFlag], f_a: f64) -> bool {
    flags.iter().any(|c| c.contains(f_a))
}

//! Difference-frequency (audio) field of two primary beams.
//!
//! The audio pressure is the quasilinear Westervelt solution
//!
//! `P_a(x) = -(beta w_a^2 / (rho0 c0^4)) int p2 conj(p1) e^{-g_a R} / (4 pi R) dV`
//!
//! evaluated by direct quadrature over an axisymmetric `(r, z)` grid with
//! the primary fields cached at the quadrature nodes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linfield::{parabolic_vertex, periodic_mean, rayleigh_pressure, spl_db, FieldCurve, FieldPoint};
use crate::medium::Medium;
use crate::radiator::{first_local_max, piston_profile, PistonSpec, ProfileKind, SourceProfile};
use crate::special::{elliptic_k_complement, GaussLegendre};

const AXIAL_ORDER: usize = 4;
const RADIAL_ORDER: usize = 6;
const J1_FIRST_ZERO: f64 = 3.831_705_970_207_512;
const MAX_TAIL_FRACTION: f64 = 0.01;

/// `(f_u1, f_u2)` for lower-sideband modulation of `f_carrier` by `f_audio`.
pub fn lsb_am_pair(f_carrier: f64, f_audio: f64) -> Result<(f64, f64)> {
    if !(f_audio > 0.0 && f_audio < f_carrier) {
        return domain(format!("audio frequency {f_audio} Hz must lie in (0, {f_carrier})"));
    }
    Ok((f_carrier - f_audio, f_carrier))
}

/// Sideband (1) and carrier (2) primaries radiated from one aperture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimaryPair {
    pub f_u1: f64,
    pub f_u2: f64,
    pub profile_1: SourceProfile,
    pub profile_2: SourceProfile,
}

impl PrimaryPair {
    pub fn new(f_u1: f64, f_u2: f64, profile_1: SourceProfile, profile_2: SourceProfile) -> Result<Self> {
        if !(f_u2 > f_u1 && f_u1 > 0.0) {
            return domain(format!("primaries need f_u2 > f_u1 > 0, got {f_u1}, {f_u2}"));
        }
        if (profile_1.radius_a - profile_2.radius_a).abs() > 1e-12 * profile_1.radius_a {
            return domain("primary profiles must share one aperture");
        }
        Ok(Self { f_u1, f_u2, profile_1, profile_2 })
    }

    /// Two rigid pistons of radius `a`.
    pub fn pistons(a: f64, v1: Complex64, v2: Complex64, f_u1: f64, f_u2: f64) -> Result<Self> {
        let p1 = piston_profile(&PistonSpec::new(a, v1)?, 2)?;
        let p2 = piston_profile(&PistonSpec::new(a, v2)?, 2)?;
        Self::new(f_u1, f_u2, p1, p2)
    }

    /// Piston pair for lower-sideband modulation of `f_carrier` by `f_audio`.
    pub fn lsb_pistons(a: f64, v1: Complex64, v2: Complex64, f_carrier: f64, f_audio: f64) -> Result<Self> {
        let (f1, f2) = lsb_am_pair(f_carrier, f_audio)?;
        Self::pistons(a, v1, v2, f1, f2)
    }

    pub fn f_a(&self) -> f64 {
        self.f_u2 - self.f_u1
    }

    pub fn radius_a(&self) -> f64 {
        self.profile_1.radius_a
    }

    pub fn scaled(&self, s1: Complex64, s2: Complex64) -> Self {
        Self {
            profile_1: self.profile_1.scaled(s1),
            profile_2: self.profile_2.scaled(s2),
            ..self.clone()
        }
    }

    /// Unit-scale copy used to size the grid, so the grid depends only on
    /// geometry and frequencies.
    fn shape_only(&self) -> Self {
        let unit = |p: &SourceProfile| {
            if p.kind == ProfileKind::Piston || p.is_uniform() {
                let mut q = p.clone();
                q.v.iter_mut().for_each(|v| *v = Complex64::new(1.0, 0.0));
                return q;
            }
            let peak = p.v.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if peak > 0.0 {
                p.scaled(Complex64::new(1.0 / peak, 0.0))
            } else {
                p.clone()
            }
        };
        Self {
            profile_1: unit(&self.profile_1),
            profile_2: unit(&self.profile_2),
            ..self.clone()
        }
    }
}

/// Settings for the virtual-source volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    /// Axial extent ends where `|p1 p2|` is this many dB below its maximum.
    pub truncation_db: f64,
    /// Radial extent in multiples of the primary beam radius.
    pub beam_radii: f64,
    /// Multiplies every panel length; 0.5 halves all steps.
    pub refinement: f64,
    /// Fixed axial extent, overriding the truncation rule.
    pub z_max: Option<f64>,
    /// Fixed radial extent, overriding the beam-radius rule.
    pub r_max: Option<f64>,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { truncation_db: 60.0, beam_radii: 4.0, refinement: 1.0, z_max: None, r_max: None }
    }
}

/// One axial quadrature node and its radial nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    pub z: f64,
    pub r: Vec<f64>,
    /// `r dr dz` quadrature weights.
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeGrid {
    pub slices: Vec<Slice>,
    /// Axial panel edges; each panel holds consecutive slices.
    pub z_breaks: Vec<f64>,
    pub z_max: f64,
    pub truncation_db: f64,
    pub warnings: Vec<String>,
}

fn on_axis_product(pair: &PrimaryPair, medium: &Medium, z: f64) -> Result<f64> {
    let pt = FieldPoint::on_axis(z)?;
    let p1 = rayleigh_pressure(&pair.profile_1, medium, pair.f_u1, pt)?;
    let p2 = rayleigh_pressure(&pair.profile_2, medium, pair.f_u2, pt)?;
    Ok((p1 * p2).norm())
}

fn beam_radius(a: f64, k: f64, z: f64) -> f64 {
    let spread = (J1_FIRST_ZERO / (k * a)).min(1.0);
    (a * a + (z * spread).powi(2)).sqrt()
}

fn panel_breaks(lo: f64, hi: f64, step: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut out = vec![lo];
    let mut x = lo;
    while x < hi {
        let h = step(x);
        x = if x + h >= hi - 1e-3 * h { hi } else { x + h };
        out.push(x);
    }
    out
}

impl VolumeGrid {
    pub fn build(pair: &PrimaryPair, medium: &Medium, opts: &GridOptions) -> Result<Self> {
        if !(opts.refinement > 0.0 && opts.beam_radii > 0.0 && opts.truncation_db > 0.0) {
            return domain("grid options must be positive");
        }
        let a = pair.radius_a();
        let lambda = medium.wavelength(pair.f_u2);
        let k = medium.wavenumber(pair.f_u2);
        let lambda_a = medium.wavelength(pair.f_a());
        let mut warnings = Vec::new();
        let z_max = match opts.z_max {
            Some(z) if z > 0.0 => z,
            Some(z) => return domain(format!("z_max {z} must be positive")),
            None => {
                let shape = pair.shape_only();
                let z_ref = first_local_max(a, pair.f_u2, medium).unwrap_or(0.0).max(a).max(lambda);
                let threshold = 10f64.powf(-opts.truncation_db / 20.0);
                let limit = 100.0 * z_ref;
                let mut z = 0.25 * lambda;
                let mut peak: f64 = 0.0;
                loop {
                    let v = on_axis_product(&shape, medium, z)?;
                    peak = peak.max(v);
                    if z > 2.0 * z_ref && v < peak * threshold {
                        break z;
                    }
                    if z >= limit {
                        warnings.push(format!(
                            "primary product still above the {} dB truncation level at z = {z:.3} m",
                            opts.truncation_db
                        ));
                        break z;
                    }
                    z = (z * 1.02).min(limit);
                }
            }
        };
        if let Some(r) = opts.r_max {
            if !(r > 0.0) {
                return domain(format!("r_max {r} must be positive"));
            }
        }
        let refine = opts.refinement;
        let cap = lambda_a / 4.0;
        let z_breaks = panel_breaks(0.0, z_max, |z| refine * cap.min(0.25 * lambda * (2.0 * z * z / (a * a)).max(1.0)));
        let zrule = GaussLegendre::new(AXIAL_ORDER);
        let rrule = GaussLegendre::new(RADIAL_ORDER);
        let mut slices = Vec::new();
        for w in z_breaks.windows(2) {
            for (z, wz) in zrule.on_interval(w[0], w[1]) {
                let r_top = opts.r_max.unwrap_or(opts.beam_radii * beam_radius(a, k, z));
                let h = refine * cap.min((0.3 * lambda).max(0.4 * lambda * z / a));
                let mut r_breaks = if a < r_top {
                    let mut inner = panel_breaks(0.0, a, |_| h);
                    inner.pop();
                    inner.extend(panel_breaks(a, r_top, |_| h));
                    inner
                } else {
                    panel_breaks(0.0, r_top, |_| h)
                };
                r_breaks.dedup();
                let mut r = Vec::new();
                let mut weights = Vec::new();
                for p in r_breaks.windows(2) {
                    for (x, wr) in rrule.on_interval(p[0], p[1]) {
                        r.push(x);
                        weights.push(x * wr * wz);
                    }
                }
                slices.push(Slice { z, r, weights });
            }
        }
        Ok(Self { slices, z_breaks, z_max, truncation_db: opts.truncation_db, warnings })
    }

    pub fn node_count(&self) -> usize {
        self.slices.iter().map(|s| s.r.len()).sum()
    }

    pub fn z_nodes(&self) -> Vec<f64> {
        self.slices.iter().map(|s| s.z).collect()
    }
}

/// `(1/4pi) int_0^{2pi} e^{-g R} / R dphi` between an observation ring of
/// radius `rho` and a source ring of radius `rp`, axial offset `dz`.
///
/// The `1/R` part is integrated exactly (complete elliptic integral); the
/// bounded remainder `(e^{-gR} - 1)/R` by periodic trapezoid.
fn ring_kernel(gamma: Complex64, rho: f64, rp: f64, dz: f64) -> Complex64 {
    let sum_sq = (rho + rp).powi(2) + dz * dz;
    let min_sq = ((rho - rp).powi(2) + dz * dz).max(1e-24);
    let static_part = 4.0 * elliptic_k_complement(min_sq / sum_sq) / sum_sq.sqrt();
    let mean_r = (rho * rho + rp * rp + dz * dz).sqrt();
    let sweep = gamma.im * 2.0 * rho * rp / mean_r;
    let start = ((sweep.ceil() as usize) + 8).next_power_of_two();
    let g = |phi: f64| {
        let s = (0.5 * phi).sin();
        let big_r = (min_sq + 4.0 * rho * rp * s * s).sqrt();
        ((-gamma * big_r).exp() - 1.0) / big_r
    };
    let (mean, _) = periodic_mean(g, start, 1e-9, 1 << 12);
    (static_part + 2.0 * PI * mean) / (4.0 * PI)
}

/// Quasilinear solver with the virtual-source density cached on its grid.
#[derive(Debug, Clone)]
pub struct QuasilinearSolver {
    pub pair: PrimaryPair,
    pub medium: Medium,
    pub grid: VolumeGrid,
    /// `p2 conj(p1) * weight` per node, slice by slice.
    source: Vec<Vec<Complex64>>,
    /// Unweighted `p2 conj(p1)` on the axis at each slice.
    axis_source: Vec<Complex64>,
    gamma_a: Complex64,
    coefficient: f64,
    pub warnings: Vec<String>,
}

impl QuasilinearSolver {
    pub fn new(pair: &PrimaryPair, medium: &Medium, opts: &GridOptions) -> Result<Self> {
        let grid = VolumeGrid::build(pair, medium, opts)?;
        Self::with_grid(pair, medium, grid)
    }

    pub fn with_grid(pair: &PrimaryPair, medium: &Medium, grid: VolumeGrid) -> Result<Self> {
        let source = grid
            .slices
            .par_iter()
            .map(|slice| {
                slice
                    .r
                    .iter()
                    .zip(&slice.weights)
                    .map(|(&r, &w)| {
                        let pt = FieldPoint { rho: r, z: slice.z };
                        let p1 = rayleigh_pressure(&pair.profile_1, medium, pair.f_u1, pt)?;
                        let p2 = rayleigh_pressure(&pair.profile_2, medium, pair.f_u2, pt)?;
                        Ok(p2 * p1.conj() * w)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let axis_source = grid
            .slices
            .par_iter()
            .map(|slice| {
                let pt = FieldPoint { rho: 0.0, z: slice.z };
                let p1 = rayleigh_pressure(&pair.profile_1, medium, pair.f_u1, pt)?;
                let p2 = rayleigh_pressure(&pair.profile_2, medium, pair.f_u2, pt)?;
                Ok(p2 * p1.conj())
            })
            .collect::<Result<Vec<_>>>()?;
        let f_a = pair.f_a();
        let omega_a = 2.0 * PI * f_a;
        let coefficient = medium.beta * omega_a * omega_a / (medium.density * medium.sound_speed.powi(4));
        let mut warnings = grid.warnings.clone();
        if grid.slices.len() >= AXIAL_ORDER {
            // Tail beyond z_max: last panel's source strength per unit length,
            // continued with the combined attenuation and spreading decay.
            let span = grid.z_max - grid.slices[grid.slices.len() - AXIAL_ORDER].z;
            let strength: f64 = source[source.len() - AXIAL_ORDER..]
                .iter()
                .flat_map(|s| s.iter())
                .map(|q| q.norm())
                .sum::<f64>()
                / (2.0 * span.max(1e-12));
            let total: f64 = source.iter().flat_map(|s| s.iter()).map(|q| q.norm()).sum();
            let decay = medium.alpha(pair.f_u1) + medium.alpha(pair.f_u2) + 2.0 / grid.z_max;
            let tail = strength / decay;
            if total > 0.0 && tail / total > MAX_TAIL_FRACTION {
                warnings.push(format!(
                    "volume truncated at z = {:.3} m leaves an estimated {:.1} % of the source outside the grid",
                    grid.z_max,
                    100.0 * tail / total
                ));
            }
        }
        Ok(Self {
            pair: pair.clone(),
            medium: *medium,
            grid,
            source,
            axis_source,
            gamma_a: Complex64::new(medium.alpha(f_a), medium.wavenumber(f_a)),
            coefficient,
            warnings,
        })
    }

    /// Audio pressure (complex, peak) at `pt`.
    pub fn pressure(&self, pt: FieldPoint) -> Result<Complex64> {
        let pt = FieldPoint::new(pt.rho, pt.z)?;
        let gamma = self.gamma_a;
        // fixed-order reduction: per-slice sums are combined sequentially
        let partial: Vec<Complex64> = self
            .grid
            .slices
            .par_iter()
            .zip(self.source.par_iter())
            .map(|(slice, q)| {
                let dz = pt.z - slice.z;
                let mut acc = Complex64::new(0.0, 0.0);
                if pt.rho == 0.0 {
                    for (&r, &qn) in slice.r.iter().zip(q) {
                        let big_r = (r * r + dz * dz).sqrt();
                        acc += qn * (-gamma * big_r).exp() / (2.0 * big_r);
                    }
                } else {
                    for (&r, &qn) in slice.r.iter().zip(q) {
                        acc += qn * ring_kernel(gamma, pt.rho, r, dz);
                    }
                }
                acc
            })
            .collect();
        let mut total = neumaier_sum(&partial);
        if pt.rho == 0.0 {
            total += self.axial_kink_correction(pt.z);
        }
        let p = -self.coefficient * total;
        if !p.re.is_finite() || !p.im.is_finite() {
            return Err(Error::Numerical(format!("non-finite audio pressure at ({}, {})", pt.rho, pt.z)));
        }
        Ok(p)
    }

    /// Near the axis the radial integral of the on-axis kernel behaves like
    /// `q_axis(z') e^{-g|z - z'|} / (2g)`, which has a kink at `z' = z`.
    /// Within the panel holding `z` that term is swapped from Gauss
    /// quadrature to a split rule with the axial source interpolated
    /// through the panel's nodes.
    fn axial_kink_correction(&self, z: f64) -> Complex64 {
        let breaks = &self.grid.z_breaks;
        if z <= 0.0 || z >= self.grid.z_max || breaks.len() < 2 {
            return Complex64::new(0.0, 0.0);
        }
        let panel = breaks.partition_point(|&b| b <= z).saturating_sub(1).min(breaks.len() - 2);
        let first = panel * AXIAL_ORDER;
        if first + AXIAL_ORDER > self.grid.slices.len() {
            return Complex64::new(0.0, 0.0);
        }
        let gamma = self.gamma_a;
        let nodes: Vec<f64> = (first..first + AXIAL_ORDER).map(|j| self.grid.slices[j].z).collect();
        let values = &self.axis_source[first..first + AXIAL_ORDER];
        let kink = |zp: f64, q: Complex64| q * (-gamma * (z - zp).abs()).exp() / (2.0 * gamma);
        let (lo, hi) = (breaks[panel], breaks[panel + 1]);
        let rule = GaussLegendre::new(AXIAL_ORDER);
        let mut discrete = Complex64::new(0.0, 0.0);
        for ((zp, w), q) in rule.on_interval(lo, hi).zip(values) {
            discrete += kink(zp, *q) * w;
        }
        let fine = GaussLegendre::new(24);
        let interp = |zp: f64| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..AXIAL_ORDER {
                let mut l = 1.0;
                for j in 0..AXIAL_ORDER {
                    if i != j {
                        l *= (zp - nodes[j]) / (nodes[i] - nodes[j]);
                    }
                }
                acc += values[i] * l;
            }
            acc
        };
        let mut exact = Complex64::new(0.0, 0.0);
        for (a, b) in [(lo, z), (z, hi)] {
            for (zp, w) in fine.on_interval(a, b) {
                exact += kink(zp, interp(zp)) * w;
            }
        }
        exact - discrete
    }

    pub fn propagation_curve(&self, z_grid: &[f64]) -> Result<FieldCurve> {
        if z_grid.is_empty() {
            return domain("empty z grid");
        }
        if z_grid.iter().any(|z| !(*z > 0.0)) {
            return domain("z grid must be positive");
        }
        let pressure = z_grid
            .iter()
            .map(|&z| self.pressure(FieldPoint { rho: 0.0, z }))
            .collect::<Result<Vec<_>>>()?;
        let mut curve = FieldCurve::new(z_grid.to_vec(), pressure, self.pair.f_a())?;
        curve.warnings = self.warnings.clone();
        Ok(curve)
    }

    pub fn beam_pattern(&self, r: f64, theta_grid: &[f64]) -> Result<FieldCurve> {
        if !(r > 0.0) {
            return domain(format!("range {r} m must be positive"));
        }
        if theta_grid.is_empty() {
            return domain("empty angle grid");
        }
        if theta_grid.iter().any(|t| t.abs() > 90.0) {
            return domain("angles must lie in [-90, 90] degrees");
        }
        let pressure = theta_grid
            .iter()
            .map(|&t| self.pressure(FieldPoint::polar(r, t)?))
            .collect::<Result<Vec<_>>>()?;
        let mut curve = FieldCurve::new(theta_grid.to_vec(), pressure, self.pair.f_a())?;
        curve.warnings = self.warnings.clone();
        Ok(curve)
    }
}

fn neumaier_sum(values: &[Complex64]) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for &v in values {
        let t = sum + v;
        let fix = |s: f64, v: f64, t: f64| if s.abs() >= v.abs() { (s - t) + v } else { (v - t) + s };
        comp += Complex64::new(fix(sum.re, v.re, t.re), fix(sum.im, v.im, t.im));
        sum = t;
    }
    sum + comp
}

/// Audio pressure at one point on an existing grid.
pub fn quasilinear_pressure(pair: &PrimaryPair, medium: &Medium, pt: FieldPoint, grid: &VolumeGrid) -> Result<Complex64> {
    QuasilinearSolver::with_grid(pair, medium, grid.clone())?.pressure(pt)
}

/// On-axis audio pressure over `z_grid` with the default grid.
pub fn audio_propagation_curve(pair: &PrimaryPair, medium: &Medium, z_grid: &[f64]) -> Result<FieldCurve> {
    QuasilinearSolver::new(pair, medium, &GridOptions::default())?.propagation_curve(z_grid)
}

/// Audio pressure at range `r` over polar angles with the default grid.
pub fn audio_beam_pattern(pair: &PrimaryPair, medium: &Medium, r: f64, theta_grid: &[f64]) -> Result<FieldCurve> {
    QuasilinearSolver::new(pair, medium, &GridOptions::default())?.beam_pattern(r, theta_grid)
}

/// Location and level of the on-axis audio maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioCd {
    pub distance: f64,
    pub spl: f64,
    #[serde(default)]
    pub warnings: Vec<String>,
}

/// Maximum of the curve's SPL, refined by a parabola through the three
/// samples around the discrete maximum.
pub fn find_audio_cd(curve: &FieldCurve) -> Result<AudioCd> {
    if curve.is_empty() {
        return domain("empty curve");
    }
    let spl = curve.spl_db();
    let mut best = 0;
    for (i, s) in spl.iter().enumerate() {
        if *s > spl[best] {
            best = i;
        }
    }
    if best == 0 || best + 1 == spl.len() {
        return Ok(AudioCd {
            distance: curve.abscissa[best],
            spl: spl[best],
            warnings: vec![format!(
                "maximum lies on the grid boundary at z = {} m; extend the grid",
                curve.abscissa[best]
            )],
        });
    }
    let x = [curve.abscissa[best - 1], curve.abscissa[best], curve.abscissa[best + 1]];
    let y = [spl[best - 1], spl[best], spl[best + 1]];
    let distance = parabolic_vertex(x, y);
    // parabola value at the vertex (Lagrange form)
    let l = |i: usize| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        (distance - x[j]) * (distance - x[k]) / ((x[i] - x[j]) * (x[i] - x[k]))
    };
    let level = y[0] * l(0) + y[1] * l(1) + y[2] * l(2);
    Ok(AudioCd { distance, spl: level.max(spl[best]), warnings: Vec::new() })
}

/// Collimated-beam far-field estimate for a piston pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerktayParams {
    pub radius_a: f64,
    pub f_carrier: f64,
    /// Peak surface pressures `rho0 c0 v` of sideband and carrier, Pa.
    pub p1: f64,
    pub p2: f64,
    /// On-axis range, m.
    pub z: f64,
}

/// Far-field on-axis audio amplitude (Pa, peak) for each audio frequency:
/// `beta w_a^2 P1 P2 a^2 e^{-alpha_a z} / (4 rho0 c0^4 z alpha_T)`, with
/// `alpha_T = alpha_1 + alpha_2 - alpha_a`.
pub fn berktay_farfield(params: &BerktayParams, medium: &Medium, f_audio: &[f64]) -> Result<Vec<f64>> {
    let z1 = first_local_max(params.radius_a, params.f_carrier, medium).unwrap_or(0.0);
    if !(params.z > z1) || !(params.z > 0.0) {
        return domain(format!("range {} m is inside the primary near field (z1 = {z1:.3} m)", params.z));
    }
    f_audio
        .iter()
        .map(|&fa| {
            let (f1, f2) = lsb_am_pair(params.f_carrier, fa)?;
            let alpha_t = medium.alpha(f1) + medium.alpha(f2) - medium.alpha(fa);
            if !(alpha_t > 0.0) {
                return domain("collimated far-field estimate needs an absorbing medium");
            }
            let wa = 2.0 * PI * fa;
            let num = medium.beta * wa * wa * params.p1 * params.p2 * params.radius_a.powi(2) * (-medium.alpha(fa) * params.z).exp();
            Ok(num / (4.0 * medium.density * medium.sound_speed.powi(4) * params.z * alpha_t))
        })
        .collect()
}

/// SPL of each sample in dB, convenience for audio curves.
pub fn curve_spl(curve: &FieldCurve) -> Vec<f64> {
    curve.pressure.iter().map(|p| spl_db(*p)).collect()
}

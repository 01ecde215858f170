//! Baffled circular radiators: rigid pistons, thin flexural plates and
//! stepped plates whose annular steps re-phase the out-of-phase zones.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{domain, Error, Result};
use crate::medium::Medium;
use crate::special::{bessel_i0, bessel_i1, bessel_j0, bessel_j1, refine_root};

/// Isotropic elastic material with hysteretic loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    /// Pa.
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    /// kg/m^3.
    pub density: f64,
    pub loss_factor: f64,
}

impl Material {
    pub fn aluminum() -> Self {
        Self {
            name: "aluminum".into(),
            youngs_modulus: 70e9,
            poisson_ratio: 0.33,
            density: 2700.0,
            loss_factor: 0.001,
        }
    }

    pub fn stainless_steel() -> Self {
        Self {
            name: "stainless_steel".into(),
            youngs_modulus: 193e9,
            poisson_ratio: 0.29,
            density: 8000.0,
            loss_factor: 0.001,
        }
    }

    /// Hard PZT ceramic treated as an isotropic solid (short-circuit axial stiffness).
    pub fn pzt() -> Self {
        Self {
            name: "pzt".into(),
            youngs_modulus: 1.0 / 15.5e-12,
            poisson_ratio: 0.31,
            density: 7500.0,
            loss_factor: 0.01,
        }
    }

    /// Built-in material table, looked up by name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "aluminum" | "aluminium" => Some(Self::aluminum()),
            "stainless_steel" | "steel" => Some(Self::stainless_steel()),
            "pzt" => Some(Self::pzt()),
            _ => None,
        }
    }

    /// Thin-rod longitudinal wave speed.
    pub fn bar_speed(&self) -> f64 {
        (self.youngs_modulus / self.density).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PistonSpec {
    /// m.
    pub radius_a: f64,
    /// m/s (complex amplitude).
    pub normal_velocity: Complex64,
}

impl PistonSpec {
    pub fn new(radius_a: f64, normal_velocity: Complex64) -> Result<Self> {
        if !(radius_a > 0.0) {
            return domain(format!("piston radius {radius_a} must be positive"));
        }
        Ok(Self { radius_a, normal_velocity })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Free,
    Clamped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateSpec {
    pub radius_a: f64,
    pub thickness: f64,
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub density: f64,
    /// Number of nodal circles of the axisymmetric operating mode.
    pub mode_m: usize,
    pub loss_factor: f64,
    pub boundary: Boundary,
}

impl PlateSpec {
    pub fn from_material(radius_a: f64, thickness: f64, material: &Material, mode_m: usize, boundary: Boundary) -> Result<Self> {
        let spec = Self {
            radius_a,
            thickness,
            youngs_modulus: material.youngs_modulus,
            poisson_ratio: material.poisson_ratio,
            density: material.density,
            mode_m,
            loss_factor: material.loss_factor,
            boundary,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius_a > 0.0 && self.thickness > 0.0) {
            return domain("plate radius and thickness must be positive");
        }
        if self.thickness >= self.radius_a / 5.0 {
            return domain(format!(
                "thickness {} m is outside the thin-plate regime (< a/5 = {} m)",
                self.thickness,
                self.radius_a / 5.0
            ));
        }
        if self.mode_m < 1 {
            return domain("mode_m must be at least 1");
        }
        if !(self.poisson_ratio > 0.0 && self.poisson_ratio < 0.5) {
            return domain(format!("Poisson ratio {} outside (0, 0.5)", self.poisson_ratio));
        }
        if !(self.youngs_modulus > 0.0 && self.density > 0.0) {
            return domain("plate stiffness and density must be positive");
        }
        Ok(())
    }

    /// `sqrt(E / (12 (1 - nu^2) rho))`, the factor relating thickness to frequency.
    fn stiffness_speed(&self) -> f64 {
        (self.youngs_modulus / (12.0 * (1.0 - self.poisson_ratio.powi(2)) * self.density)).sqrt()
    }

    pub fn areal_density(&self) -> f64 {
        self.density * self.thickness
    }
}

/// Axisymmetric Kirchhoff plate mode `w(r) = A J0(k r) + B I0(k r)`, `w(0) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeShape {
    pub radius_a: f64,
    pub mode_m: usize,
    pub boundary: Boundary,
    /// Frequency parameter `lambda = k a`.
    pub eigenvalue: f64,
    pub coef_j: f64,
    pub coef_i: f64,
    pub nodal_radii: Vec<f64>,
    /// Hz.
    pub natural_frequency: f64,
    /// `(r, w(r))` on a uniform grid over `[0, a]`.
    pub radial_profile: Vec<[f64; 2]>,
}

impl ModeShape {
    pub fn eval(&self, r: f64) -> f64 {
        let x = self.eigenvalue * r / self.radius_a;
        self.coef_j * bessel_j0(x) + self.coef_i * bessel_i0(x)
    }

    fn slope(&self, r: f64) -> f64 {
        let k = self.eigenvalue / self.radius_a;
        let x = k * r;
        k * (-self.coef_j * bessel_j1(x) + self.coef_i * bessel_i1(x))
    }
}

fn characteristic(boundary: Boundary, nu: f64, lambda: f64) -> f64 {
    // Scaled by I0(lambda) to keep the magnitude O(1) for large lambda.
    let j0 = bessel_j0(lambda);
    let j1 = bessel_j1(lambda);
    let ratio = bessel_i1(lambda) / bessel_i0(lambda);
    match boundary {
        Boundary::Free => j1 + ratio * j0 - 2.0 * (1.0 - nu) * j1 * ratio / lambda,
        Boundary::Clamped => j0 * ratio + j1,
    }
}

/// `n`-th positive root of the axisymmetric characteristic equation.
fn eigenvalue(boundary: Boundary, nu: f64, n: usize) -> Result<f64> {
    let step = 0.05;
    let mut lo = 0.5;
    let mut f_lo = characteristic(boundary, nu, lo);
    let mut found = 0;
    let limit = 10.0 + 4.0 * n as f64;
    while lo < limit {
        let hi = lo + step;
        let f_hi = characteristic(boundary, nu, hi);
        if f_lo.signum() != f_hi.signum() {
            found += 1;
            if found == n {
                return refine_root(|x| characteristic(boundary, nu, x), lo, hi, 1e-13).ok_or_else(|| {
                    Error::Numerical(format!("eigenvalue {n} lost its bracket [{lo}, {hi}]"))
                });
            }
        }
        lo = hi;
        f_lo = f_hi;
    }
    Err(Error::Numerical(format!(
        "could not bracket axisymmetric eigenvalue {n} ({boundary:?}, nu = {nu}); scanned (0.5, {limit}), found {found} roots"
    )))
}

/// Axisymmetric thin-plate mode with `spec.mode_m` nodal circles.
pub fn plate_mode_shape(spec: &PlateSpec) -> Result<ModeShape> {
    spec.validate()?;
    let nu = spec.poisson_ratio;
    // A clamped edge is itself a nodal circle, so its m-interior-circle mode is root m + 1.
    let root_index = match spec.boundary {
        Boundary::Free => spec.mode_m,
        Boundary::Clamped => spec.mode_m + 1,
    };
    let lambda = eigenvalue(spec.boundary, nu, root_index)?;
    let ratio = match spec.boundary {
        // shear-free edge: A J1 + B I1 = 0
        Boundary::Free => -bessel_j1(lambda) / bessel_i1(lambda),
        // zero edge displacement: A J0 + B I0 = 0
        Boundary::Clamped => -bessel_j0(lambda) / bessel_i0(lambda),
    };
    let coef_j = 1.0 / (1.0 + ratio);
    let coef_i = ratio * coef_j;
    let a = spec.radius_a;
    let natural_frequency = lambda * lambda / (2.0 * std::f64::consts::PI * a * a) * spec.thickness * spec.stiffness_speed();
    let mut shape = ModeShape {
        radius_a: a,
        mode_m: spec.mode_m,
        boundary: spec.boundary,
        eigenvalue: lambda,
        coef_j,
        coef_i,
        nodal_radii: Vec::new(),
        natural_frequency,
        radial_profile: Vec::new(),
    };
    let scan = 64 * (spec.mode_m + 2);
    let upper = match spec.boundary {
        Boundary::Free => a,
        // stop short of the clamped edge, where w vanishes by construction
        Boundary::Clamped => a * (1.0 - 1e-6),
    };
    let mut prev_r = 0.0;
    let mut prev_w: f64 = 1.0;
    for i in 1..=scan {
        let r = upper * i as f64 / scan as f64;
        let w = shape.eval(r);
        if w.signum() != prev_w.signum() && w != 0.0 {
            let root = refine_root(|x| shape.eval(x), prev_r, r, 1e-14 * a)
                .ok_or_else(|| Error::Numerical("nodal circle bracket lost".into()))?;
            if root < a * (1.0 - 1e-6) {
                shape.nodal_radii.push(root);
            }
        }
        prev_r = r;
        prev_w = w;
    }
    if shape.nodal_radii.len() != spec.mode_m {
        return Err(Error::Numerical(format!(
            "mode {} has {} nodal circles (eigenvalue {lambda})",
            spec.mode_m,
            shape.nodal_radii.len()
        )));
    }
    for r in &shape.nodal_radii {
        // every zero must be simple
        if shape.slope(*r).abs() < 1e-9 / a {
            return Err(Error::Numerical(format!("nodal circle at {r} m is not a simple zero")));
        }
    }
    let n = 32 * (spec.mode_m + 2);
    shape.radial_profile = (0..=n)
        .map(|i| {
            let r = a * i as f64 / n as f64;
            [r, shape.eval(r)]
        })
        .collect();
    Ok(shape)
}

/// Sizes a plate whose `mode_m` mode lands on `f_u0` and whose aperture puts
/// the last axial pressure maximum at `d_uc`.
pub fn size_plate_for(f_u0: f64, d_uc: f64, mode_m: usize, material: &Material, medium: &Medium, boundary: Boundary) -> Result<PlateSpec> {
    if !(f_u0 > 0.0 && d_uc > 0.0) {
        return domain("f_u0 and D_uc must be positive");
    }
    if mode_m < 1 {
        return domain("mode_m must be at least 1");
    }
    let a = aperture_for_cd(d_uc, f_u0, medium)?;
    let nu = material.poisson_ratio;
    let root_index = match boundary {
        Boundary::Free => mode_m,
        Boundary::Clamped => mode_m + 1,
    };
    let lambda = eigenvalue(boundary, nu, root_index)?;
    // Kirchhoff frequencies are linear in thickness, so the sizing is closed form.
    let speed = (material.youngs_modulus / (12.0 * (1.0 - nu * nu) * material.density)).sqrt();
    let thickness = 2.0 * std::f64::consts::PI * f_u0 * a * a / (lambda * lambda * speed);
    if !(thickness > 0.0 && thickness < a / 5.0) {
        return Err(Error::Infeasible(format!(
            "mode {mode_m} at {f_u0} Hz needs thickness {thickness:.4e} m, outside (0, a/5 = {:.4e}] m",
            a / 5.0
        )));
    }
    PlateSpec::from_material(a, thickness, material, mode_m, boundary)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Piston,
    FlatPlate,
    SteppedPlate,
}

/// Axisymmetric surface-velocity distribution sampled on a radial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceProfile {
    pub radius_a: f64,
    pub r: Vec<f64>,
    pub v: Vec<Complex64>,
    pub kind: ProfileKind,
}

impl SourceProfile {
    pub fn new(radius_a: f64, r: Vec<f64>, v: Vec<Complex64>, kind: ProfileKind) -> Result<Self> {
        if !(radius_a > 0.0) {
            return domain("profile radius must be positive");
        }
        if r.len() < 2 || r.len() != v.len() {
            return domain("profile needs at least two samples and matching lengths");
        }
        if r[0] < 0.0 || *r.last().unwrap() > radius_a * (1.0 + 1e-12) {
            return domain("profile grid must lie in [0, a]");
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("profile grid must be strictly increasing");
        }
        Ok(Self { radius_a, r, v, kind })
    }

    /// Piecewise-linear velocity at radius `r` (zero outside the aperture).
    pub fn velocity_at(&self, r: f64) -> Complex64 {
        if r < 0.0 || r > self.radius_a {
            return Complex64::new(0.0, 0.0);
        }
        let idx = self.r.partition_point(|&x| x <= r);
        if idx == 0 {
            return self.v[0];
        }
        if idx >= self.r.len() {
            return *self.v.last().unwrap();
        }
        let (r0, r1) = (self.r[idx - 1], self.r[idx]);
        let t = (r - r0) / (r1 - r0);
        self.v[idx - 1] * (1.0 - t) + self.v[idx] * t
    }

    pub fn center_velocity(&self) -> Complex64 {
        self.v[0]
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            v: self.v.iter().map(|v| v * s).collect(),
            ..self.clone()
        }
    }

    /// A uniform profile has one ring; everything else is decomposed into
    /// concentric rings of constant velocity (midpoint values).
    pub fn is_uniform(&self) -> bool {
        let v0 = self.v[0];
        self.v.iter().all(|v| *v == v0)
    }

    /// Hex SHA-256 of the serialized profile, used to tag exported results.
    pub fn descriptor_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("profile serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

/// `max(64, 16 samples per air wavelength)` over the aperture.
pub fn radial_samples(radius_a: f64, f: f64, medium: &Medium) -> usize {
    let per_wavelength = 16.0 * radius_a / medium.wavelength(f);
    (per_wavelength.ceil() as usize + 1).max(64)
}

pub fn piston_profile(spec: &PistonSpec, n_samples: usize) -> Result<SourceProfile> {
    if n_samples < 2 {
        return domain(format!("piston profile needs at least 2 samples, got {n_samples}"));
    }
    let a = spec.radius_a;
    let r: Vec<f64> = (0..n_samples).map(|i| a * i as f64 / (n_samples - 1) as f64).collect();
    let v = vec![spec.normal_velocity; n_samples];
    SourceProfile::new(a, r, v, ProfileKind::Piston)
}

/// Which out-of-phase zones carry a half-wavelength step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StepPolicy {
    /// Bare plate.
    None,
    /// Every zone where `w < 0`, except that an outermost negative zone is
    /// left bare (odd modes).
    #[default]
    Standard,
    /// Every zone where `w < 0`, including the outermost one.
    All,
}

/// Radial zone boundaries `[0, r_1, ..., r_m, a]` of a mode.
fn zone_edges(mode: &ModeShape) -> Vec<f64> {
    let mut edges = Vec::with_capacity(mode.nodal_radii.len() + 2);
    edges.push(0.0);
    edges.extend_from_slice(&mode.nodal_radii);
    edges.push(mode.radius_a);
    edges
}

/// Zone indices (0 = central disc) that carry a step under `policy`.
pub fn stepped_zones(mode: &ModeShape, policy: StepPolicy) -> Vec<usize> {
    let edges = zone_edges(mode);
    let zones = edges.len() - 1;
    let negative: Vec<usize> = (0..zones)
        .filter(|&z| mode.eval(0.5 * (edges[z] + edges[z + 1])) < 0.0)
        .collect();
    match policy {
        StepPolicy::None => Vec::new(),
        StepPolicy::All => negative,
        StepPolicy::Standard => negative.into_iter().filter(|&z| z + 1 != zones).collect(),
    }
}

/// Surface velocity of the plate vibrating in `mode` with centre velocity
/// `center_velocity`; stepped zones radiate with inverted sign.
///
/// The grid always contains the nodal radii, so the kinks of `|w|` are
/// represented exactly by the piecewise-linear profile.
pub fn stepped_profile(mode: &ModeShape, center_velocity: Complex64, policy: StepPolicy, n_samples: usize) -> Result<SourceProfile> {
    if n_samples < 2 {
        return domain("profile needs at least 2 samples");
    }
    let a = mode.radius_a;
    let mut r: Vec<f64> = (0..n_samples).map(|i| a * i as f64 / (n_samples - 1) as f64).collect();
    r.extend_from_slice(&mode.nodal_radii);
    r.sort_by(|x, y| x.partial_cmp(y).unwrap());
    r.dedup_by(|x, y| (*x - *y).abs() < 1e-12 * a);
    let edges = zone_edges(mode);
    let stepped = stepped_zones(mode, policy);
    let v = r
        .iter()
        .map(|&ri| {
            let zone = edges.partition_point(|&e| e <= ri).saturating_sub(1).min(edges.len() - 2);
            if mode.nodal_radii.iter().any(|&n| (n - ri).abs() < 1e-12 * a) {
                return Complex64::new(0.0, 0.0);
            }
            let sign = if stepped.contains(&zone) { -1.0 } else { 1.0 };
            center_velocity * (sign * mode.eval(ri))
        })
        .collect();
    let kind = if policy == StepPolicy::None { ProfileKind::FlatPlate } else { ProfileKind::SteppedPlate };
    SourceProfile::new(a, r, v, kind)
}

/// Last axial maximum of a baffled piston, `z1 = a^2/lambda - lambda/4`.
pub fn first_local_max(a: f64, f: f64, medium: &Medium) -> Result<f64> {
    if !(a > 0.0 && f > 0.0) {
        return domain("radius and frequency must be positive");
    }
    let lambda = medium.wavelength(f);
    if a <= lambda / 2.0 {
        return Err(Error::Infeasible(format!(
            "radius {a} m is not larger than half a wavelength ({} m); no axial maximum",
            lambda / 2.0
        )));
    }
    Ok(a * a / lambda - lambda / 4.0)
}

/// Piston radius whose last axial maximum sits at `d_uc`.
pub fn aperture_for_cd(d_uc: f64, f: f64, medium: &Medium) -> Result<f64> {
    if !(d_uc > 0.0 && f > 0.0) {
        return domain("distance and frequency must be positive");
    }
    let lambda = medium.wavelength(f);
    Ok(((d_uc + lambda / 4.0) * lambda).sqrt())
}

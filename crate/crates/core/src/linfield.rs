//! Linear (primary-frequency) radiation from baffled axisymmetric sources.
//!
//! Time dependence is `exp(+i w t)`; the damped kernel is `exp(-g R) / R`
//! with `g = alpha + i k`. Complex pressures are peak amplitudes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::medium::Medium;
use crate::radiator::{first_local_max, PistonSpec, SourceProfile};
use crate::special::{bessel_j0, bessel_j1, struve_h1, GaussLegendre};

/// Reference pressure for SPL, Pa rms.
pub const P_REF: f64 = 20e-6;

const RADIAL_ORDER: usize = 6;
const AZIMUTH_START: usize = 16;
const AZIMUTH_MAX: usize = 1 << 16;
const AZIMUTH_TOL: f64 = 1e-10;
/// Beam patterns beyond this multiple of the last axial maximum use the
/// far-field kernel.
pub const FAR_FIELD_FACTOR: f64 = 20.0;

/// SPL of a peak complex amplitude, dB re 20 uPa rms.
pub fn spl_db(p: Complex64) -> f64 {
    20.0 * (p.norm() / (std::f64::consts::SQRT_2 * P_REF)).log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldPoint {
    /// Cylindrical radius, m.
    pub rho: f64,
    /// Axial distance, m.
    pub z: f64,
}

impl FieldPoint {
    pub fn new(rho: f64, z: f64) -> Result<Self> {
        if !(z >= 0.0) || !(rho >= 0.0) || !rho.is_finite() || !z.is_finite() {
            return domain(format!("field point (rho = {rho}, z = {z}) must have rho >= 0, z >= 0"));
        }
        Ok(Self { rho, z })
    }

    pub fn on_axis(z: f64) -> Result<Self> {
        Self::new(0.0, z)
    }

    /// Point at range `r` and polar angle `theta_deg` from the axis.
    pub fn polar(r: f64, theta_deg: f64) -> Result<Self> {
        let t = theta_deg.to_radians();
        Self::new((r * t.sin()).abs(), r * t.cos())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldCurve {
    /// z in m, or polar angle in degrees.
    pub abscissa: Vec<f64>,
    pub pressure: Vec<Complex64>,
    pub f: f64,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl FieldCurve {
    pub fn new(abscissa: Vec<f64>, pressure: Vec<Complex64>, f: f64) -> Result<Self> {
        if abscissa.len() != pressure.len() {
            return domain("abscissa and pressure lengths differ");
        }
        if abscissa.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("abscissa must be strictly increasing");
        }
        Ok(Self { abscissa, pressure, f, warnings: Vec::new() })
    }

    pub fn spl_db(&self) -> Vec<f64> {
        self.pressure.iter().map(|p| spl_db(*p)).collect()
    }

    /// SPL relative to the curve maximum.
    pub fn normalized_db(&self) -> Vec<f64> {
        let spl = self.spl_db();
        let max = spl.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        spl.iter().map(|s| s - max).collect()
    }

    pub fn len(&self) -> usize {
        self.abscissa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissa.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceRatio {
    pub er_db: f64,
    pub f: f64,
    pub d_uc: f64,
}

impl EquivalenceRatio {
    /// Velocity of the rigid piston that radiates like the plate at `d_uc`.
    pub fn effective_velocity(&self, center_velocity: Complex64) -> Complex64 {
        center_velocity * 10f64.powf(self.er_db / 20.0)
    }
}

fn check_frequency(f: f64) -> Result<()> {
    if !(f > 0.0) || !f.is_finite() {
        return domain(format!("frequency {f} Hz must be positive"));
    }
    Ok(())
}

fn propagation_constant(medium: &Medium, f: f64) -> Complex64 {
    Complex64::new(medium.alpha(f), medium.wavenumber(f))
}

/// Radial Gauss nodes `(r, weight, v(r))` over the profile, panels no
/// longer than `max_len`.
fn radial_nodes(profile: &SourceProfile, max_len: f64) -> Vec<(f64, f64, Complex64)> {
    let rule = GaussLegendre::new(RADIAL_ORDER);
    let mut out = Vec::new();
    for w in profile.r.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let pieces = ((hi - lo) / max_len).ceil().max(1.0) as usize;
        let h = (hi - lo) / pieces as f64;
        for j in 0..pieces {
            let a = lo + j as f64 * h;
            for (x, wt) in rule.on_interval(a, a + h) {
                out.push((x, wt, profile.velocity_at(x)));
            }
        }
    }
    out
}

/// Periodic trapezoid of an even `2 pi`-periodic function, returned as
/// `(1/pi) int_0^pi g`, doubling nodes from `start` until the change is
/// below `tol` (relative). Returns the last estimate and whether it converged.
pub(crate) fn periodic_mean(g: impl Fn(f64) -> Complex64, start: usize, tol: f64, max_nodes: usize) -> (Complex64, bool) {
    let mut n = start.max(4);
    let h = PI / n as f64;
    let mut sum = 0.5 * (g(0.0) + g(PI));
    for j in 1..n {
        sum += g(j as f64 * h);
    }
    let mut mean = sum / n as f64;
    while n < max_nodes {
        let h_new = PI / (2 * n) as f64;
        for j in 0..n {
            sum += g((2 * j + 1) as f64 * h_new);
        }
        n *= 2;
        let next = sum / n as f64;
        let diff = (next - mean).norm();
        mean = next;
        if diff <= tol * mean.norm() + 1e-300 {
            return (mean, true);
        }
    }
    (mean, false)
}

fn azimuthal_mean(g: impl Fn(f64) -> Complex64, start: usize) -> Result<Complex64> {
    match periodic_mean(g, start, AZIMUTH_TOL, AZIMUTH_MAX) {
        (mean, true) => Ok(mean),
        (_, false) => Err(Error::Numerical(format!(
            "azimuthal quadrature did not converge with {AZIMUTH_MAX} nodes"
        ))),
    }
}

pub(crate) fn azimuth_start(k: f64, rho: f64, rp: f64, rmin: f64) -> usize {
    // the kernel phase sweeps roughly k * 2 rho r' / R over half a period
    let sweep = (k * 2.0 * rho * rp / rmin.max(1e-12)).min(1e6);
    (sweep.ceil() as usize + AZIMUTH_START).next_power_of_two()
}

/// `(1/pi) int_0^pi g` for integrands with a peak of angular width `width`
/// at `phi = 0`: Gauss panels graded geometrically away from the peak,
/// then uniform panels short enough for a phase sweep of `sweep` radians.
fn graded_mean(g: impl Fn(f64) -> Complex64, width: f64, sweep: f64) -> Complex64 {
    let rule = GaussLegendre::new(12);
    let uniform = (PI / (sweep / 3.0).ceil().max(4.0)).min(PI / 4.0);
    let mut edges = vec![0.0];
    let mut h = width.max(1e-12);
    while *edges.last().unwrap() < PI {
        let last = *edges.last().unwrap();
        let step = h.min(uniform);
        edges.push((last + step).min(PI));
        h *= 2.0;
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for w in edges.windows(2) {
        for (x, wt) in rule.on_interval(w[0], w[1]) {
            sum += g(x) * wt;
        }
    }
    sum / PI
}


/// Rayleigh integral evaluated by direct surface quadrature.
///
/// On the axis the azimuthal integral is exact and the radial one is done
/// in the variable `R`, which removes the `1/R` factor.
pub fn rayleigh_surface_quadrature(profile: &SourceProfile, medium: &Medium, f: f64, pt: FieldPoint) -> Result<Complex64> {
    check_frequency(f)?;
    let pt = FieldPoint::new(pt.rho, pt.z)?;
    let gamma = propagation_constant(medium, f);
    let omega = 2.0 * PI * f;
    let pre = Complex64::new(0.0, omega * medium.density);
    let max_len = medium.wavelength(f) / 8.0;
    let z = pt.z;
    if pt.rho == 0.0 {
        // p = i w rho0 int v(r) e^{-gR} dR with R = sqrt(z^2 + r^2)
        let rule = GaussLegendre::new(RADIAL_ORDER);
        let mut sum = Complex64::new(0.0, 0.0);
        for w in profile.r.windows(2) {
            let (r0, r1) = (w[0], w[1]);
            let (big0, big1) = ((z * z + r0 * r0).sqrt(), (z * z + r1 * r1).sqrt());
            let pieces = ((big1 - big0) / max_len).ceil().max(1.0) as usize;
            let h = (big1 - big0) / pieces as f64;
            for j in 0..pieces {
                let a = big0 + j as f64 * h;
                for (big_r, wt) in rule.on_interval(a, a + h) {
                    let r = (big_r * big_r - z * z).max(0.0).sqrt();
                    sum += profile.velocity_at(r) * (-gamma * big_r).exp() * wt;
                }
            }
        }
        return Ok(pre * sum);
    }
    let rho = pt.rho;
    let mut sum = Complex64::new(0.0, 0.0);
    for (rp, wt, v) in radial_nodes(profile, max_len) {
        if v == Complex64::new(0.0, 0.0) {
            continue;
        }
        let rmin = (z * z + (rho - rp).powi(2)).sqrt();
        let start = azimuth_start(gamma.im, rho, rp, rmin);
        let base = z * z + rho * rho + rp * rp;
        let mean = azimuthal_mean(
            |phi| {
                let big_r = (base - 2.0 * rho * rp * phi.cos()).max(0.0).sqrt();
                (-gamma * big_r).exp() / big_r
            },
            start,
        )?;
        // (1/2pi) int_0^{2pi} = mean
        sum += v * mean * rp * wt;
    }
    Ok(pre * sum)
}

/// Exact field of a uniform disc of radius `a` and velocity `v`, reduced to
/// a single contour integral around the rim.
pub fn disc_pressure(a: f64, v: Complex64, medium: &Medium, f: f64, pt: FieldPoint) -> Result<Complex64> {
    check_frequency(f)?;
    if !(a > 0.0) {
        return domain("disc radius must be positive");
    }
    let gamma = propagation_constant(medium, f);
    let pre = Complex64::new(0.0, 2.0 * PI * f * medium.density) / gamma * v;
    Ok(pre * disc_integral(a, gamma, pt.rho, pt.z)?)
}

/// `int_disc e^{-gR}/R dA * g / (2 pi)`.
fn disc_integral(a: f64, gamma: Complex64, rho: f64, z: f64) -> Result<Complex64> {
    let direct = (-gamma * z).exp();
    let inside = if rho < a {
        1.0
    } else if rho == a {
        0.5
    } else {
        0.0
    };
    if rho == 0.0 {
        return Ok(direct - (-gamma * (z * z + a * a).sqrt()).exp());
    }
    let r0 = (z * z + (a - rho).powi(2)).sqrt();
    let e0 = (-gamma * r0).exp();
    let diff = a * a - rho * rho;
    let poisson = if rho < a { 1.0 } else if rho > a { -1.0 } else { 0.0 };
    let g = |phi: f64| {
        let s = (0.5 * phi).sin();
        let d = (a - rho).powi(2) + 4.0 * a * rho * s * s;
        let e = (-gamma * (z * z + d).sqrt()).exp();
        let singular = if diff == 0.0 || d == 0.0 { Complex64::new(0.0, 0.0) } else { (e - e0) * (diff / d) };
        0.5 * (e + singular)
    };
    // the Poisson factor peaks over |a - rho| / a, the exponential over r0 / a
    let width = if diff == 0.0 { r0 } else { (a - rho).abs() } / (a * rho).sqrt();
    let sweep = gamma.im * 2.0 * a.min(rho);
    let mean = if width < 0.02 {
        graded_mean(g, width, sweep)
    } else {
        azimuthal_mean(g, azimuth_start(gamma.im, rho, a, r0))
            .map_err(|e| Error::Numerical(format!("{e} (disc a = {a}, field point rho = {rho}, z = {z})")))?
    };
    Ok(direct * inside - mean - 0.5 * poisson * e0)
}

/// Rayleigh integral for an axisymmetric profile.
///
/// Uniform profiles use the exact rim-integral form; all others use
/// surface quadrature.
pub fn rayleigh_pressure(profile: &SourceProfile, medium: &Medium, f: f64, pt: FieldPoint) -> Result<Complex64> {
    check_frequency(f)?;
    let pt = FieldPoint::new(pt.rho, pt.z)?;
    if profile.is_uniform() && pt.rho > 0.0 {
        let a = *profile.r.last().unwrap();
        return disc_pressure(a, profile.v[0], medium, f, pt);
    }
    rayleigh_surface_quadrature(profile, medium, f, pt)
}

/// Closed-form on-axis pressure of a baffled piston, with plane-wave
/// attenuation `e^{-alpha z}`.
pub fn axial_piston_pressure(spec: &PistonSpec, medium: &Medium, f: f64, z: f64) -> Result<Complex64> {
    check_frequency(f)?;
    if !(z >= 0.0) {
        return domain(format!("z = {z} must be non-negative"));
    }
    let k = medium.wavenumber(f);
    let a = spec.radius_a;
    let edge = (z * z + a * a).sqrt();
    let phase = Complex64::new(0.0, -k * z).exp() - Complex64::new(0.0, -k * edge).exp();
    Ok(medium.impedance() * spec.normal_velocity * phase * (-medium.alpha(f) * z).exp())
}

/// On-axis pressures over `z_grid`.
pub fn propagation_curve(profile: &SourceProfile, medium: &Medium, f: f64, z_grid: &[f64]) -> Result<FieldCurve> {
    check_frequency(f)?;
    if z_grid.is_empty() {
        return domain("empty z grid");
    }
    if z_grid.iter().any(|z| !(*z > 0.0)) {
        return domain("z grid must be positive");
    }
    let pressure = z_grid
        .par_iter()
        .map(|&z| rayleigh_pressure(profile, medium, f, FieldPoint { rho: 0.0, z }))
        .collect::<Result<Vec<_>>>()?;
    FieldCurve::new(z_grid.to_vec(), pressure, f)
}

/// Far-field pressure at range `r` and angle `theta`:
/// `i w rho0 e^{-gr}/r int v(r') J0(k r' sin theta) r' dr'`.
pub fn far_field_pressure(profile: &SourceProfile, medium: &Medium, f: f64, r: f64, theta_deg: f64) -> Result<Complex64> {
    check_frequency(f)?;
    let gamma = propagation_constant(medium, f);
    let k = gamma.im;
    let s = theta_deg.to_radians().sin().abs();
    let sum: Complex64 = radial_nodes(profile, medium.wavelength(f) / 8.0)
        .into_iter()
        .map(|(rp, wt, v)| v * bessel_j0(k * rp * s) * rp * wt)
        .sum();
    let omega = 2.0 * PI * f;
    Ok(Complex64::new(0.0, omega * medium.density) * (-gamma * r).exp() / r * sum)
}

/// Pressure at fixed range `r` over polar angles (degrees).
pub fn beam_pattern(profile: &SourceProfile, medium: &Medium, f: f64, r: f64, theta_grid: &[f64]) -> Result<FieldCurve> {
    check_frequency(f)?;
    if !(r > 0.0) {
        return domain(format!("range {r} m must be positive"));
    }
    if theta_grid.is_empty() {
        return domain("empty angle grid");
    }
    if theta_grid.iter().any(|t| t.abs() > 90.0) {
        return domain("angles must lie in [-90, 90] degrees");
    }
    let far = match first_local_max(profile.radius_a, f, medium) {
        Ok(z1) => r > FAR_FIELD_FACTOR * z1,
        Err(_) => r > FAR_FIELD_FACTOR * profile.radius_a,
    };
    let pressure = theta_grid
        .par_iter()
        .map(|&t| {
            if far {
                far_field_pressure(profile, medium, f, r, t)
            } else {
                rayleigh_pressure(profile, medium, f, FieldPoint::polar(r, t)?)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    FieldCurve::new(theta_grid.to_vec(), pressure, f)
}

/// Half-angle (degrees) where the beam first falls `drop_db` below its
/// on-axis level, by linear interpolation in dB. The curve must contain
/// `theta = 0`.
pub fn beam_half_angle(curve: &FieldCurve, drop_db: f64) -> Option<f64> {
    let spl = curve.spl_db();
    let i0 = curve.abscissa.iter().position(|t| t.abs() < 1e-12)?;
    let target = spl[i0] - drop_db;
    for i in i0 + 1..curve.len() {
        if spl[i] <= target {
            let (t0, t1) = (curve.abscissa[i - 1], curve.abscissa[i]);
            let (s0, s1) = (spl[i - 1], spl[i]);
            return Some(t0 + (t1 - t0) * (s0 - target) / (s0 - s1));
        }
    }
    None
}

/// Quarter-power (-6 dB) half-angle in degrees.
pub fn quarter_power_angle(curve: &FieldCurve) -> Option<f64> {
    beam_half_angle(curve, 6.0)
}

/// First minimum of |p| at positive angle, refined by a parabola through
/// the three bracketing samples.
pub fn first_null_angle(curve: &FieldCurve) -> Option<f64> {
    let mag: Vec<f64> = curve.pressure.iter().map(|p| p.norm()).collect();
    let start = curve.abscissa.iter().position(|t| *t >= 0.0)?;
    for i in start + 1..curve.len().saturating_sub(1) {
        if mag[i] <= mag[i - 1] && mag[i] < mag[i + 1] {
            return Some(parabolic_vertex(
                [curve.abscissa[i - 1], curve.abscissa[i], curve.abscissa[i + 1]],
                [mag[i - 1], mag[i], mag[i + 1]],
            ));
        }
    }
    None
}

/// Abscissa of the vertex of the parabola through three points.
pub fn parabolic_vertex(x: [f64; 3], y: [f64; 3]) -> f64 {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let curvature = (d2 - d1) / (x[2] - x[0]);
    if curvature == 0.0 {
        return x[1];
    }
    let v = 0.5 * (x[0] + x[1]) - d1 / (2.0 * curvature);
    v.clamp(x[0], x[2])
}

/// Mechanical radiation impedance of a baffled piston, N s/m.
pub fn piston_radiation_impedance(a: f64, f: f64, medium: &Medium) -> Result<Complex64> {
    check_frequency(f)?;
    if !(a > 0.0) {
        return domain("radius must be positive");
    }
    let x = 2.0 * medium.wavenumber(f) * a;
    let resistance = 1.0 - 2.0 * bessel_j1(x) / x;
    let reactance = 2.0 * struve_h1(x) / x;
    Ok(medium.impedance() * PI * a * a * Complex64::new(resistance, reactance))
}

/// SPL difference at `d_uc` between the profile and a rigid piston of the
/// same radius moving at the profile's centre velocity.
pub fn equivalence_ratio(sp_profile: &SourceProfile, medium: &Medium, f: f64, d_uc: f64) -> Result<EquivalenceRatio> {
    if !(d_uc > 0.0) {
        return domain("D_uc must be positive");
    }
    let v0 = sp_profile.center_velocity();
    if v0.norm() == 0.0 {
        return domain("centre velocity is zero; the reference piston is undefined");
    }
    let pt = FieldPoint::on_axis(d_uc)?;
    let sp = rayleigh_pressure(sp_profile, medium, f, pt)?;
    let piston = PistonSpec::new(sp_profile.radius_a, v0)?;
    // same per-ray attenuation as the plate
    let rp = rayleigh_pressure(&crate::radiator::piston_profile(&piston, 2)?, medium, f, pt)?;
    Ok(EquivalenceRatio { er_db: spl_db(sp) - spl_db(rp), f, d_uc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radiator::piston_profile;

    fn piston(a: f64, v: f64) -> SourceProfile {
        piston_profile(&PistonSpec::new(a, Complex64::new(v, 0.0)).unwrap(), 64).unwrap()
    }

    #[test]
    fn spl_convention_is_peak_over_sqrt2() {
        let p = Complex64::new(std::f64::consts::SQRT_2 * 20e-6, 0.0);
        assert!(spl_db(p).abs() < 1e-12);
        assert!((spl_db(p * 10.0) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_matches_closed_form_on_axis() {
        let air = Medium::standard_air().lossless();
        let spec = PistonSpec::new(0.0508, Complex64::new(0.1, 0.0)).unwrap();
        let prof = piston_profile(&spec, 64).unwrap();
        for z in [0.05, 0.1, 0.3, 0.45, 1.0, 3.0] {
            let q = rayleigh_surface_quadrature(&prof, &air, 60e3, FieldPoint::on_axis(z).unwrap()).unwrap();
            let c = axial_piston_pressure(&spec, &air, 60e3, z).unwrap();
            assert!((spl_db(q) - spl_db(c)).abs() < 0.1, "z = {z}");
        }
    }

    #[test]
    fn disc_form_matches_surface_quadrature_off_axis() {
        let air = Medium::standard_air();
        let prof = piston(0.02, 0.1);
        for (rho, z) in [(0.01, 0.05), (0.03, 0.2), (0.019, 0.01), (0.1, 0.5), (0.5, 0.2), (0.0199, 2e-4), (0.0201, 1e-4), (0.02, 1e-3)] {
            let pt = FieldPoint::new(rho, z).unwrap();
            let fast = disc_pressure(0.02, Complex64::new(0.1, 0.0), &air, 40e3, pt).unwrap();
            let slow = rayleigh_surface_quadrature(&prof, &air, 40e3, pt).unwrap();
            assert!((fast - slow).norm() < 1e-6 * slow.norm(), "({rho}, {z}): {fast} vs {slow}");
        }
    }

    #[test]
    fn disc_form_on_axis_equals_exact_damped_integral() {
        let air = Medium::standard_air();
        let gamma = Complex64::new(air.alpha(60e3), air.wavenumber(60e3));
        let (a, z) = (0.05, 0.3);
        let expected = Complex64::new(0.0, 2.0 * PI * 60e3 * air.density) / gamma
            * ((-gamma * z).exp() - (-gamma * (z * z + a * a).sqrt()).exp());
        let fast = disc_pressure(a, Complex64::new(1.0, 0.0), &air, 60e3, FieldPoint::new(1e-9, z).unwrap()).unwrap();
        assert!((fast - expected).norm() < 1e-7 * expected.norm());
    }

    #[test]
    fn zero_profile_gives_zero_and_linearity_holds() {
        let air = Medium::standard_air();
        let zero = piston(0.05, 0.0);
        let pt = FieldPoint::new(0.02, 0.3).unwrap();
        assert_eq!(rayleigh_pressure(&zero, &air, 40e3, pt).unwrap(), Complex64::new(0.0, 0.0));
        let p1 = rayleigh_pressure(&piston(0.05, 0.1), &air, 40e3, pt).unwrap();
        let p2 = rayleigh_pressure(&piston(0.05, 0.2), &air, 40e3, pt).unwrap();
        assert!((p2 - 2.0 * p1).norm() <= 1e-14 * p2.norm());
    }

    #[test]
    fn closed_form_peak_and_bound() {
        let air = Medium::standard_air().lossless();
        let spec = PistonSpec::new(0.0508, Complex64::new(0.1, 0.0)).unwrap();
        let z1 = first_local_max(0.0508, 60e3, &air).unwrap();
        let p = axial_piston_pressure(&spec, &air, 60e3, z1).unwrap();
        assert!((p.norm() - 2.0 * air.impedance() * 0.1).abs() < 1e-9);
        for i in 0..2000 {
            let z = i as f64 * 0.002;
            assert!(axial_piston_pressure(&spec, &air, 60e3, z).unwrap().norm() <= 2.0 * air.impedance() * 0.1 + 1e-12);
        }
        let far1 = axial_piston_pressure(&spec, &air, 60e3, 50.0).unwrap().norm();
        let far2 = axial_piston_pressure(&spec, &air, 60e3, 100.0).unwrap().norm();
        assert!((far1 / far2 - 2.0).abs() < 0.02);
    }

    #[test]
    fn empty_grid_is_rejected() {
        let air = Medium::standard_air();
        assert!(propagation_curve(&piston(0.05, 0.1), &air, 40e3, &[]).is_err());
    }

    #[test]
    fn beam_pattern_is_symmetric() {
        let air = Medium::standard_air();
        let prof = piston(0.02, 0.1);
        let grid: Vec<f64> = (-20..=20).map(|i| i as f64 * 2.0).collect();
        let bp = beam_pattern(&prof, &air, 40e3, 1.0, &grid).unwrap();
        for i in 0..grid.len() {
            let j = grid.len() - 1 - i;
            assert!((bp.pressure[i] - bp.pressure[j]).norm() <= 1e-12 * bp.pressure[i].norm().max(1e-30));
        }
    }

    #[test]
    fn far_field_kernel_first_null() {
        let air = Medium::standard_air();
        let a = 0.0508;
        let prof = piston(a, 0.1);
        let ka = air.wavenumber(60e3) * a;
        let expected = (3.831_705_970_207_512 / ka).asin().to_degrees();
        let grid: Vec<f64> = (0..=2000).map(|i| i as f64 * 0.005).collect();
        let bp = beam_pattern(&prof, &air, 60e3, 100.0, &grid).unwrap();
        let null = first_null_angle(&bp).unwrap();
        assert!((null - expected).abs() < 0.1, "{null} vs {expected}");
    }

    #[test]
    fn radiation_impedance_limits() {
        let air = Medium::standard_air();
        let a = 0.05;
        let full = air.impedance() * PI * a * a;
        let f_hi = 200.0 * air.sound_speed / (2.0 * PI * a);
        let z = piston_radiation_impedance(a, f_hi, &air).unwrap();
        assert!((z.re / full - 1.0).abs() < 0.01 && z.im / full < 0.01);
        // ka = 0.01: R1 ~ (ka)^2 / 2, X1 ~ 8 ka / (3 pi)
        let ka: f64 = 0.01;
        let f_lo = ka * air.sound_speed / (2.0 * PI * a);
        let z = piston_radiation_impedance(a, f_lo, &air).unwrap() / full;
        assert!((z.re / (ka * ka / 2.0) - 1.0).abs() < 1e-3);
        assert!((z.im / (8.0 * ka / (3.0 * PI)) - 1.0).abs() < 1e-3);
        for i in 1..=500 {
            let ka = i as f64 * 0.1;
            let z = piston_radiation_impedance(a, ka * air.sound_speed / (2.0 * PI * a), &air).unwrap();
            assert!(z.re > 0.0 && z.im > 0.0, "ka = {ka}");
        }
    }

    #[test]
    fn piston_against_itself_is_zero_db() {
        let air = Medium::standard_air();
        let er = equivalence_ratio(&piston(0.0508, 0.1), &air, 60e3, 0.45).unwrap();
        assert!(er.er_db.abs() < 1e-9);
    }

    #[test]
    fn parabolic_vertex_recovers_quadratic_peak() {
        let f = |x: f64| -(x - 0.45).powi(2);
        let v = parabolic_vertex([0.4, 0.44, 0.5], [f(0.4), f(0.44), f(0.5)]);
        assert!((v - 0.45).abs() < 1e-12);
    }
}

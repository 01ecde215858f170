use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sppal_core::linfield::{self, FieldCurve, FieldPoint};
use sppal_core::medium::build_medium;
use sppal_core::nlfield::{GridOptions, PrimaryPair, QuasilinearSolver};
use sppal_core::optimizer::{self, DesignContext, DesignParams, NsgaConfig};
use sppal_core::radiator::{self, Boundary, Material, PistonSpec, SourceProfile, StepPolicy};
use sppal_core::transducer::{self, Config, SurrogateKind};

fn err(e: sppal_core::Error) -> PyErr {
    match e {
        sppal_core::Error::Domain(_) | sppal_core::Error::Infeasible(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse<T: serde::de::DeserializeOwned>(what: &str, name: &str) -> PyResult<T> {
    serde_json::from_value(serde_json::Value::String(name.into())).map_err(|_| PyValueError::new_err(format!("unknown {what} `{name}`")))
}

/// Air at the given conditions.
#[pyclass(module = "sppal", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Medium(sppal_core::medium::Medium);

#[pymethods]
impl Medium {
    #[new]
    #[pyo3(signature = (temperature_c=20.0, relative_humidity_pct=70.0, pressure_kpa=101.325, beta=1.2, lossless=false))]
    fn new(temperature_c: f64, relative_humidity_pct: f64, pressure_kpa: f64, beta: f64, lossless: bool) -> PyResult<Self> {
        let m = build_medium(temperature_c, relative_humidity_pct / 100.0, pressure_kpa).and_then(|m| m.with_beta(beta)).map_err(err)?;
        Ok(Self(if lossless { m.lossless() } else { m }))
    }

    #[getter]
    fn sound_speed(&self) -> f64 {
        self.0.sound_speed
    }

    #[getter]
    fn density(&self) -> f64 {
        self.0.density
    }

    /// Pressure absorption in Np/m.
    fn alpha(&self, f: f64) -> f64 {
        self.0.alpha(f)
    }

    fn wavelength(&self, f: f64) -> f64 {
        self.0.wavelength(f)
    }

    fn __repr__(&self) -> String {
        format!("Medium(temperature_c={}, relative_humidity_pct={}, c={:.3})", self.0.temperature, self.0.relative_humidity * 100.0, self.0.sound_speed)
    }
}

/// Axisymmetric normal-velocity distribution on a baffled disc.
#[pyclass(module = "sppal", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Source {
    profile: SourceProfile,
    thickness: Option<f64>,
}

#[pymethods]
impl Source {
    #[staticmethod]
    #[pyo3(signature = (radius, velocity=Complex64::new(1.0, 0.0)))]
    fn piston(radius: f64, velocity: Complex64) -> PyResult<Self> {
        let profile = radiator::piston_profile(&PistonSpec::new(radius, velocity).map_err(err)?, 2).map_err(err)?;
        Ok(Self { profile, thickness: None })
    }

    /// Plate sized so its design mode sits at `f_u0` and its ultrasound CD is `d_uc`.
    #[staticmethod]
    #[pyo3(signature = (f_u0, d_uc, mode_m, medium, material="aluminum", boundary="free", steps="standard", center_velocity=Complex64::new(1.0, 0.0)))]
    #[allow(clippy::too_many_arguments)]
    fn plate(f_u0: f64, d_uc: f64, mode_m: usize, medium: &Medium, material: &str, boundary: &str, steps: &str, center_velocity: Complex64) -> PyResult<Self> {
        let mat = Material::builtin(material).ok_or_else(|| PyValueError::new_err(format!("unknown material `{material}`")))?;
        let boundary: Boundary = parse("boundary", boundary)?;
        let steps: StepPolicy = parse("step policy", steps)?;
        let plate = radiator::size_plate_for(f_u0, d_uc, mode_m, &mat, &medium.0, boundary).map_err(err)?;
        let mode = radiator::plate_mode_shape(&plate).map_err(err)?;
        let n = radiator::radial_samples(plate.radius_a, f_u0, &medium.0);
        let profile = radiator::stepped_profile(&mode, center_velocity, steps, n).map_err(err)?;
        Ok(Self { profile, thickness: Some(plate.thickness) })
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.profile.radius_a
    }

    /// Plate thickness, `None` for pistons.
    #[getter]
    fn thickness(&self) -> Option<f64> {
        self.thickness
    }

    fn velocity_at(&self, r: f64) -> Complex64 {
        self.profile.velocity_at(r)
    }

    fn scaled(&self, s: Complex64) -> Self {
        Self { profile: self.profile.scaled(s), thickness: self.thickness }
    }

    fn __repr__(&self) -> String {
        format!("Source(radius={}, kind={:?})", self.profile.radius_a, self.profile.kind)
    }
}

/// Sampled complex pressure along an axis or arc.
#[pyclass(module = "sppal", frozen, get_all, skip_from_py_object)]
struct Curve {
    abscissa: Vec<f64>,
    pressure: Vec<Complex64>,
    spl_db: Vec<f64>,
    f: f64,
    warnings: Vec<String>,
}

impl From<FieldCurve> for Curve {
    fn from(c: FieldCurve) -> Self {
        let spl_db = c.spl_db();
        Self { abscissa: c.abscissa, pressure: c.pressure, spl_db, f: c.f, warnings: c.warnings }
    }
}

#[pymethods]
impl Curve {
    fn __len__(&self) -> usize {
        self.abscissa.len()
    }
}

#[pyfunction]
fn propagation_curve(py: Python<'_>, source: &Source, medium: &Medium, f: f64, z: Vec<f64>) -> PyResult<Curve> {
    py.detach(|| linfield::propagation_curve(&source.profile, &medium.0, f, &z)).map(Curve::from).map_err(err)
}

#[pyfunction]
fn beam_pattern(py: Python<'_>, source: &Source, medium: &Medium, f: f64, r: f64, theta_deg: Vec<f64>) -> PyResult<Curve> {
    py.detach(|| linfield::beam_pattern(&source.profile, &medium.0, f, r, &theta_deg)).map(Curve::from).map_err(err)
}

#[pyfunction]
fn pressure(source: &Source, medium: &Medium, f: f64, rho: f64, z: f64) -> PyResult<Complex64> {
    let pt = FieldPoint::new(rho, z).map_err(err)?;
    linfield::rayleigh_pressure(&source.profile, &medium.0, f, pt).map_err(err)
}

/// Plate-to-piston level ratio in dB at the CD.
#[pyfunction]
fn equivalence_ratio(source: &Source, medium: &Medium, f: f64, d_uc: f64) -> PyResult<f64> {
    linfield::equivalence_ratio(&source.profile, &medium.0, f, d_uc).map(|e| e.er_db).map_err(err)
}

#[pyfunction]
fn first_local_max(radius: f64, f: f64, medium: &Medium) -> PyResult<f64> {
    radiator::first_local_max(radius, f, &medium.0).map_err(err)
}

#[pyfunction]
fn aperture_for_cd(d_uc: f64, f: f64, medium: &Medium) -> PyResult<f64> {
    radiator::aperture_for_cd(d_uc, f, &medium.0).map_err(err)
}

#[pyfunction]
fn quarter_power_angle(curve: &Curve) -> PyResult<Option<f64>> {
    let c = FieldCurve::new(curve.abscissa.clone(), curve.pressure.clone(), curve.f).map_err(err)?;
    Ok(linfield::quarter_power_angle(&c))
}

/// Difference-frequency field of two coaxial piston tones, lower-sideband placement.
#[pyclass(module = "sppal", frozen)]
struct AudioField {
    solver: QuasilinearSolver,
    f_a: f64,
}

#[pymethods]
impl AudioField {
    #[new]
    #[pyo3(signature = (radius, v1, v2, f_carrier, f_a, medium, refinement=1.0, z_max=None, r_max=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        py: Python<'_>,
        radius: f64,
        v1: Complex64,
        v2: Complex64,
        f_carrier: f64,
        f_a: f64,
        medium: &Medium,
        refinement: f64,
        z_max: Option<f64>,
        r_max: Option<f64>,
    ) -> PyResult<Self> {
        let pair = PrimaryPair::lsb_pistons(radius, v1, v2, f_carrier, f_a).map_err(err)?;
        let opts = GridOptions { refinement, z_max, r_max, ..GridOptions::default() };
        let solver = py.detach(|| QuasilinearSolver::new(&pair, &medium.0, &opts)).map_err(err)?;
        Ok(Self { solver, f_a })
    }

    #[getter]
    fn f_a(&self) -> f64 {
        self.f_a
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.solver.warnings.clone()
    }

    fn pressure(&self, rho: f64, z: f64) -> PyResult<Complex64> {
        self.solver.pressure(FieldPoint::new(rho, z).map_err(err)?).map_err(err)
    }

    fn propagation_curve(&self, py: Python<'_>, z: Vec<f64>) -> PyResult<Curve> {
        py.detach(|| self.solver.propagation_curve(&z)).map(Curve::from).map_err(err)
    }

    fn beam_pattern(&self, py: Python<'_>, r: f64, theta_deg: Vec<f64>) -> PyResult<Curve> {
        py.detach(|| self.solver.beam_pattern(r, &theta_deg)).map(Curve::from).map_err(err)
    }
}

/// Centre-velocity response of the analytic single/dual resonance model.
#[pyfunction]
#[pyo3(signature = (kind, f_r1, f_r2, f_anti, eta, freqs, gain=1.0))]
fn surrogate_frf(kind: &str, f_r1: f64, f_r2: f64, f_anti: f64, eta: f64, freqs: Vec<f64>, gain: f64) -> PyResult<Vec<Complex64>> {
    let kind: SurrogateKind = parse("surrogate", kind)?;
    transducer::pzg_frf(kind, gain, f_r1, f_r2, f_anti, eta, &freqs).map(|f| f.center_velocity).map_err(err)
}

/// `(F1, F2)` from the two resonance peaks and the dip between them.
#[pyfunction]
fn dr_objectives(freqs: Vec<f64>, velocity: Vec<Complex64>) -> PyResult<(f64, f64)> {
    let frf = transducer::Frf::new(freqs, velocity).map_err(err)?;
    transducer::extract_dr_features(&frf).and_then(|d| transducer::objectives(&d)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (modal_freqs, band=(100.0, 6000.0), tol=100.0))]
fn cr_screen(modal_freqs: Vec<f64>, band: (f64, f64), tol: f64) -> PyResult<Vec<(f64, f64, f64)>> {
    let flags = transducer::cr_screen(&modal_freqs, band, tol).map_err(err)?;
    Ok(flags.into_iter().map(|f| (f.mode_freq, f.lo, f.hi)).collect())
}

/// Runs NSGA-II on one transducer/plate design and returns the Pareto front as dicts.
#[pyfunction]
#[pyo3(signature = (d_uc, f_u0, mode_m, config, r_p, l_p, r_h, medium, pop=40, generations=50, seed=1))]
#[allow(clippy::too_many_arguments)]
fn pareto<'py>(
    py: Python<'py>,
    d_uc: f64,
    f_u0: f64,
    mode_m: usize,
    config: &str,
    r_p: f64,
    l_p: f64,
    r_h: f64,
    medium: &Medium,
    pop: usize,
    generations: usize,
    seed: u64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let config: Config = parse("config", config)?;
    let params = DesignParams::new(d_uc, f_u0, mode_m, config, r_p, l_p, r_h);
    let cfg = NsgaConfig { pop, generations, seed, ..NsgaConfig::default() };
    let front = py
        .detach(|| DesignContext::new(&params, &medium.0).and_then(|ctx| optimizer::optimize_design(&ctx, &cfg)))
        .map_err(err)?;
    front
        .points
        .iter()
        .map(|p| {
            let d = PyDict::new(py);
            d.set_item("x", p.x.clone())?;
            d.set_item("f1", p.objectives.0)?;
            d.set_item("f2", p.objectives.1)?;
            d.set_item("f_dist", p.derived.f_dist)?;
            d.set_item("flag", p.flag.clone())?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn sppal(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Medium>()?;
    m.add_class::<Source>()?;
    m.add_class::<Curve>()?;
    m.add_class::<AudioField>()?;
    m.add_function(wrap_pyfunction!(propagation_curve, m)?)?;
    m.add_function(wrap_pyfunction!(beam_pattern, m)?)?;
    m.add_function(wrap_pyfunction!(pressure, m)?)?;
    m.add_function(wrap_pyfunction!(equivalence_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(first_local_max, m)?)?;
    m.add_function(wrap_pyfunction!(aperture_for_cd, m)?)?;
    m.add_function(wrap_pyfunction!(quarter_power_angle, m)?)?;
    m.add_function(wrap_pyfunction!(surrogate_frf, m)?)?;
    m.add_function(wrap_pyfunction!(dr_objectives, m)?)?;
    m.add_function(wrap_pyfunction!(cr_screen, m)?)?;
    m.add_function(wrap_pyfunction!(pareto, m)?)?;
    Ok(())
}

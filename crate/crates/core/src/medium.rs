//! Air properties and pure-tone atmospheric absorption (ISO 9613-1).

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Conversion between nepers and decibels: `dB = NP_TO_DB * Np`.
pub const NP_TO_DB: f64 = 8.686;

const REFERENCE_PRESSURE_KPA: f64 = 101.325;
const REFERENCE_TEMPERATURE_K: f64 = 293.15;
const TRIPLE_POINT_K: f64 = 273.16;
const DRY_AIR_GAS_CONSTANT: f64 = 287.058;

/// Default nonlinearity coefficient of air.
pub const BETA_AIR: f64 = 1.2;

/// How attenuation is applied to propagating waves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Absorption {
    #[default]
    Iso9613,
    /// No attenuation at any frequency.
    Lossless,
}

/// Ambient air state and derived acoustic constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    /// Celsius.
    pub temperature: f64,
    /// Fraction in `[0, 1]`.
    pub relative_humidity: f64,
    /// kPa.
    pub pressure: f64,
    /// m/s.
    pub sound_speed: f64,
    /// kg/m^3.
    pub density: f64,
    pub beta: f64,
    #[serde(default)]
    pub absorption: Absorption,
}

/// Builds the medium for the given ambient state.
pub fn build_medium(temperature: f64, relative_humidity: f64, pressure: f64) -> Result<Medium> {
    if !(-20.0..=50.0).contains(&temperature) {
        return domain(format!("temperature {temperature} degC outside [-20, 50]"));
    }
    if !(0.0..=1.0).contains(&relative_humidity) {
        return domain(format!("relative humidity {relative_humidity} outside [0, 1]"));
    }
    if !(pressure > 0.0 && pressure <= 200.0) {
        return domain(format!("pressure {pressure} kPa outside (0, 200]"));
    }
    let kelvin = temperature + 273.15;
    Ok(Medium {
        temperature,
        relative_humidity,
        pressure,
        sound_speed: 331.3 * (1.0 + temperature / 273.15).sqrt(),
        density: pressure * 1e3 / (DRY_AIR_GAS_CONSTANT * kelvin),
        beta: BETA_AIR,
        absorption: Absorption::Iso9613,
    })
}

impl Medium {
    /// 20 degC, 70 % relative humidity, 101.325 kPa.
    pub fn standard_air() -> Self {
        build_medium(20.0, 0.70, REFERENCE_PRESSURE_KPA).expect("standard state is in range")
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return domain(format!("nonlinearity coefficient {beta} must be positive"));
        }
        self.beta = beta;
        Ok(self)
    }

    pub fn lossless(mut self) -> Self {
        self.absorption = Absorption::Lossless;
        self
    }

    pub fn wavelength(&self, f: f64) -> f64 {
        self.sound_speed / f
    }

    pub fn wavenumber(&self, f: f64) -> f64 {
        2.0 * std::f64::consts::PI * f / self.sound_speed
    }

    /// Characteristic impedance `rho0 * c0`.
    pub fn impedance(&self) -> f64 {
        self.density * self.sound_speed
    }

    /// Attenuation in Np/m, or zero for a lossless medium.
    pub fn alpha(&self, f: f64) -> f64 {
        match self.absorption {
            Absorption::Lossless => 0.0,
            Absorption::Iso9613 => iso9613_np_per_m(self, f),
        }
    }

    /// Molar concentration of water vapour in percent.
    pub fn water_vapour_percent(&self) -> f64 {
        let kelvin = self.temperature + 273.15;
        let exponent = -6.8346 * (TRIPLE_POINT_K / kelvin).powf(1.261) + 4.6151;
        let psat_ratio = 10f64.powf(exponent);
        100.0 * self.relative_humidity * psat_ratio / (self.pressure / REFERENCE_PRESSURE_KPA)
    }
}

fn iso9613_np_per_m(medium: &Medium, f: f64) -> f64 {
    let kelvin = medium.temperature + 273.15;
    let p_ratio = medium.pressure / REFERENCE_PRESSURE_KPA;
    let t_ratio = kelvin / REFERENCE_TEMPERATURE_K;
    let h = medium.water_vapour_percent();
    let fr_o = p_ratio * (24.0 + 4.04e4 * h * (0.02 + h) / (0.391 + h));
    let fr_n = p_ratio * t_ratio.powf(-0.5) * (9.0 + 280.0 * h * (-4.170 * (t_ratio.powf(-1.0 / 3.0) - 1.0)).exp());
    let f2 = f * f;
    let classical = 1.84e-11 / p_ratio * t_ratio.sqrt();
    let oxygen = 0.01275 * (-2239.1 / kelvin).exp() / (fr_o + f2 / fr_o);
    let nitrogen = 0.1068 * (-3352.0 / kelvin).exp() / (fr_n + f2 / fr_n);
    // ISO gives 8.686 f^2 {...} in dB/m; the bracket itself is Np/m.
    f2 * (classical + t_ratio.powf(-2.5) * (oxygen + nitrogen))
}

/// Pure-tone attenuation in Np/m at frequency `f` (Hz).
pub fn absorption_coeff(medium: &Medium, f: f64) -> Result<f64> {
    if !(f > 0.0) || !f.is_finite() {
        return domain(format!("frequency {f} Hz must be positive"));
    }
    Ok(medium.alpha(f))
}

/// Pure-tone attenuation in dB/m.
pub fn absorption_db_per_m(medium: &Medium, f: f64) -> Result<f64> {
    absorption_coeff(medium, f).map(|a| a * NP_TO_DB)
}

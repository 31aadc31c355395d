//! Cannonball solar radiation pressure, its effect on inclination, and the
//! magnitude sweep that generates perturbed orbits.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::ephemeris::{shadow_factor, sun_position_analytic, EphemerisError, EphemerisTable};
use crate::kepler::{KeplerianElements, Vec3};
use crate::timeframe::{Epoch, AU_KM, P0_SOLAR, SECONDS_PER_DAY};

#[derive(Debug, Error)]
pub enum SrpError {
    #[error("satellite and Sun positions coincide")]
    Singular,
    #[error("invalid SRP configuration: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("sweep requires a circular orbit (e < 1e-6), got e = {0}")]
    NonCircular(f64),
    #[error(transparent)]
    Ephemeris(#[from] EphemerisError),
}

/// Satellite optical and mass properties for the cannonball model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrpConfig {
    emissivity: f64,
    cr: f64,
    /// Cross-sectional area, m².
    pub area: f64,
    /// Mass, kg.
    pub mass: f64,
    /// Forced shadow factor; `None` uses the geometric shadow model.
    pub nu_override: Option<u8>,
}

impl Default for SrpConfig {
    fn default() -> Self {
        Self::new(0.30, 1.0, 15.0).expect("defaults are valid")
    }
}

impl SrpConfig {
    pub fn new(emissivity: f64, area: f64, mass: f64) -> Result<Self, SrpError> {
        if !(0.0..=1.0).contains(&emissivity) {
            return Err(SrpError::Config(format!("emissivity {emissivity} outside [0, 1]")));
        }
        if !(area > 0.0 && area.is_finite()) {
            return Err(SrpError::Config(format!("area {area} must be > 0")));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(SrpError::Config(format!("mass {mass} must be > 0")));
        }
        Ok(Self {
            emissivity,
            cr: 1.0 + emissivity,
            area,
            mass,
            nu_override: None,
        })
    }

    pub fn with_nu_override(mut self, nu: Option<u8>) -> Result<Self, SrpError> {
        if matches!(nu, Some(v) if v > 1) {
            return Err(SrpError::Config("nu must be 0 or 1".into()));
        }
        self.nu_override = nu;
        Ok(self)
    }

    pub fn emissivity(&self) -> f64 {
        self.emissivity
    }

    /// Radiation pressure coefficient, 1 + emissivity.
    pub fn cr(&self) -> f64 {
        self.cr
    }

    /// m²/kg.
    pub fn area_to_mass(&self) -> f64 {
        self.area / self.mass
    }

    /// cr·p0·A/M in km/s², the acceleration at exactly 1 AU.
    pub fn accel_at_1au(&self) -> f64 {
        self.cr * P0_SOLAR * self.area_to_mass() / 1000.0
    }
}

/// Parses `emissivity=0.30,area=1.0,mass=15[,nu=0|1]`; omitted keys keep
/// their defaults.
impl FromStr for SrpConfig {
    type Err = SrpError;

    fn from_str(s: &str) -> Result<Self, SrpError> {
        let d = SrpConfig::default();
        let (mut emissivity, mut area, mut mass, mut nu) = (d.emissivity, d.area, d.mass, None);
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| SrpError::Config(format!("expected key=value, got `{part}`")))?;
            let num: f64 = value
                .trim()
                .parse()
                .map_err(|_| SrpError::Config(format!("`{value}` is not a number")))?;
            match key.trim() {
                "emissivity" => emissivity = num,
                "area" => area = num,
                "mass" => mass = num,
                "nu" if num == 0.0 || num == 1.0 => nu = Some(num as u8),
                "nu" => return Err(SrpError::Config("nu must be 0 or 1".into())),
                other => return Err(SrpError::Config(format!("unknown key `{other}`"))),
            }
        }
        SrpConfig::new(emissivity, area, mass)?.with_nu_override(nu)
    }
}

/// SRP acceleration in km/s², pointing from the Sun toward the satellite.
pub fn srp_acceleration(r_sat: &Vec3, r_sun_geo: &Vec3, cfg: &SrpConfig, nu: u8) -> Result<Vec3, SrpError> {
    let d = r_sat - r_sun_geo;
    let dist = d.norm();
    if dist == 0.0 {
        return Err(SrpError::Singular);
    }
    if nu == 0 {
        return Ok(Vec3::zeros());
    }
    let scale = cfg.accel_at_1au() * AU_KM * AU_KM / (dist * dist * dist);
    Ok(d * scale)
}

/// Force in newtons for an acceleration in km/s².
pub fn srp_force(a_srp: &Vec3, mass: f64) -> Vec3 {
    a_srp * (mass * 1000.0)
}

/// km/s² → km/day².
pub fn km_s2_to_km_day2(a: f64) -> f64 {
    a * SECONDS_PER_DAY * SECONDS_PER_DAY
}

/// km/day² → km/s².
pub fn km_day2_to_km_s2(a: f64) -> f64 {
    a / (SECONDS_PER_DAY * SECONDS_PER_DAY)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrpSample {
    pub epoch: Epoch,
    /// km/s².
    pub a_srp: Vec3,
    pub magnitude: f64,
    pub nu: u8,
    /// Satellite-Sun distance, km.
    pub sun_distance: f64,
}

/// One sample per table record in `[start, end]`.
pub fn srp_year_series<P>(
    table: &EphemerisTable,
    start: Epoch,
    end: Epoch,
    r_sat_provider: P,
    cfg: &SrpConfig,
) -> Result<Vec<SrpSample>, SrpError>
where
    P: Fn(Epoch) -> Vec3,
{
    let (t0, t1) = table.span();
    let tol = 1e-6;
    if start.jd() < t0.jd() - tol || end.jd() > t1.jd() + tol {
        return Err(EphemerisError::OutOfRange {
            jd: if start.jd() < t0.jd() { start.jd() } else { end.jd() },
            start: t0.jd(),
            end: t1.jd(),
        }
        .into());
    }
    table
        .records()
        .iter()
        .filter(|rec| rec.epoch.jd() >= start.jd() - tol && rec.epoch.jd() <= end.jd() + tol)
        .map(|rec| {
            let r_sat = r_sat_provider(rec.epoch);
            let nu = cfg
                .nu_override
                .unwrap_or_else(|| shadow_factor(&r_sat, &rec.sun_geocentric));
            let a_srp = srp_acceleration(&r_sat, &rec.sun_geocentric, cfg, nu)?;
            Ok(SrpSample {
                epoch: rec.epoch,
                a_srp,
                magnitude: a_srp.norm(),
                nu,
                sun_distance: (r_sat - rec.sun_geocentric).norm(),
            })
        })
        .collect()
}

pub const SRP_CSV_HEADER: &str = "jd,ax_km_s2,ay_km_s2,az_km_s2,mag_km_s2,mag_km_day2,nu";

pub fn srp_series_to_csv(samples: &[SrpSample]) -> String {
    let mut out = String::from(SRP_CSV_HEADER);
    out.push('\n');
    for s in samples {
        let _ = writeln!(
            out,
            "{:.6},{:e},{:e},{:e},{:e},{:e},{}",
            s.epoch.jd(),
            s.a_srp.x,
            s.a_srp.y,
            s.a_srp.z,
            s.magnitude,
            km_s2_to_km_day2(s.magnitude),
            s.nu
        );
    }
    out
}

/// SRP as a propagator perturbation, with the Sun from `table` when given and
/// from the analytic model otherwise.
pub struct SrpPerturbation<'a> {
    pub cfg: SrpConfig,
    pub table: Option<&'a EphemerisTable>,
}

impl SrpPerturbation<'_> {
    pub fn sun_at(&self, epoch: Epoch) -> Vec3 {
        self.table
            .and_then(|t| t.interpolate(epoch).ok())
            .map(|rec| rec.sun_geocentric)
            .unwrap_or_else(|| sun_position_analytic(epoch))
    }

    pub fn accel(&self, r: &Vec3, epoch: Epoch) -> Vec3 {
        let sun = self.sun_at(epoch);
        let nu = self.cfg.nu_override.unwrap_or_else(|| shadow_factor(r, &sun));
        srp_acceleration(r, &sun, &self.cfg, nu).unwrap_or_else(|_| Vec3::zeros())
    }
}

/// Composite-trapezoid evaluation of δi = (1/(n·a))·∫ W(t)·cos(u(t)) dt on
/// `[t0, t1]` using ⌈(t1 − t0)/dt⌉ equal panels.
pub fn inclination_delta<W, U>(w: W, u: U, n: f64, a: f64, t0: f64, t1: f64, dt: f64) -> Result<f64, SrpError>
where
    W: Fn(f64) -> f64,
    U: Fn(f64) -> f64,
{
    if !(t1 >= t0) || !(dt > 0.0) || !(n > 0.0) || !(a > 0.0) {
        return Err(SrpError::InvalidInput(format!(
            "inclination_delta needs t1 >= t0, dt > 0, n > 0, a > 0 (t0 {t0}, t1 {t1}, dt {dt}, n {n}, a {a})"
        )));
    }
    if t1 == t0 {
        return Ok(0.0);
    }
    let panels = ((t1 - t0) / dt).ceil().max(1.0) as usize;
    let h = (t1 - t0) / panels as f64;
    let f = |t: f64| w(t) * u(t).cos();
    let mut sum = 0.5 * (f(t0) + f(t1));
    for k in 1..panels {
        sum += f(t0 + k as f64 * h);
    }
    Ok(sum * h / (n * a))
}

/// Closed form of [`inclination_delta`] for constant W over u ∈ [−π/2, π/2].
pub fn half_orbit_delta_closed_form(w: f64, n: f64, a: f64) -> f64 {
    2.0 * w / (n * n * a)
}

/// Default sweep exposure: the half orbit u ∈ [−π/2, π/2] where cos u ≥ 0.
pub const DEFAULT_EXPOSURE: f64 = 0.5;

/// Default quadrature step for the sweep integral, s.
pub const DEFAULT_SWEEP_DT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepEntry {
    pub a_srp_km_day2: f64,
    pub delta_i: f64,
    pub elements: KeplerianElements,
}

/// Treats each magnitude `start + k·step` (km/day²) as a constant normal
/// acceleration over `exposure` of an orbit beginning at u = −π/2 and
/// returns `el0` with only the inclination changed.
pub fn perturb_sweep(
    start: f64,
    step: f64,
    count: usize,
    el0: &KeplerianElements,
    exposure: f64,
    dt: f64,
) -> Result<Vec<SweepEntry>, SrpError> {
    if count == 0 {
        return Err(SrpError::InvalidInput("sweep count must be >= 1".into()));
    }
    if el0.e >= 1e-6 {
        return Err(SrpError::NonCircular(el0.e));
    }
    if !(exposure > 0.0 && exposure.is_finite()) {
        return Err(SrpError::InvalidInput(format!("exposure fraction {exposure} must be > 0")));
    }
    if !(start.is_finite() && step.is_finite()) {
        return Err(SrpError::InvalidInput("sweep start and step must be finite".into()));
    }
    let n = el0.mean_motion();
    let window = exposure * el0.period();
    let unit = inclination_delta(|_| 1.0, |t| -FRAC_PI_2 + n * t, n, el0.a, 0.0, window, dt)?;
    (0..count)
        .map(|k| {
            let a_srp = start + k as f64 * step;
            let delta_i = km_day2_to_km_s2(a_srp) * unit;
            let mut elements = *el0;
            elements.i = el0.i + delta_i;
            if !(0.0..=std::f64::consts::PI).contains(&elements.i) {
                return Err(SrpError::InvalidInput(format!(
                    "perturbed inclination {} rad leaves [0, π]",
                    elements.i
                )));
            }
            Ok(SweepEntry {
                a_srp_km_day2: a_srp,
                delta_i,
                elements,
            })
        })
        .collect()
}

pub const SWEEP_CSV_HEADER: &str = "a_srp_km_day2,delta_i_rad,i_deg_new";

pub fn sweep_to_csv(entries: &[SweepEntry]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for e in entries {
        let _ = writeln!(out, "{},{:e},{}", e.a_srp_km_day2, e.delta_i, e.elements.i.to_degrees());
    }
    out
}

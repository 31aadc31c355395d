//! Keplerian element algebra: anomalies, element/state conversion, and the
//! circular-orbit velocity and period relations.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;
use thiserror::Error;

use crate::timeframe::{normalize_angle, Epoch, MU_EARTH, SECONDS_PER_DAY};

pub type Vec3 = Vector3<f64>;

/// Below this eccentricity the orbit is treated as circular: argument of
/// periapsis is pinned to zero and the anomaly is measured from the node.
pub const CIRCULAR_TOL: f64 = 1e-9;
/// Below this inclination (or within it of π) the node is taken along +x.
pub const EQUATORIAL_TOL: f64 = 1e-9;

const KEPLER_TOL: f64 = 1e-12;
const KEPLER_MAX_ITER: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KeplerError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate orbit: angular momentum is zero")]
    Degenerate,
    #[error("orbit is not elliptic (specific energy {0} km^2/s^2 >= 0)")]
    Unbound(f64),
    #[error("kepler solver did not converge for M={mean_anomaly}, e={eccentricity}")]
    NoConvergence { mean_anomaly: f64, eccentricity: f64 },
    #[error("line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

fn check_eccentricity(e: f64) -> Result<(), KeplerError> {
    if (0.0..1.0).contains(&e) {
        Ok(())
    } else {
        Err(KeplerError::Domain(format!("eccentricity {e} outside [0, 1)")))
    }
}

/// Classical elements of an elliptic orbit. The anomaly is stored as the
/// true anomaly; mean and eccentric anomalies are derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerianElements {
    /// Semi-major axis, km.
    pub a: f64,
    pub e: f64,
    /// Inclination, rad in `[0, π]`.
    pub i: f64,
    /// Right ascension of the ascending node, rad.
    pub raan: f64,
    /// Argument of periapsis, rad.
    pub argp: f64,
    /// True anomaly, rad.
    pub true_anomaly: f64,
    pub epoch: Epoch,
}

impl KeplerianElements {
    /// Validates and normalizes a set of elements (angles in radians).
    pub fn new(
        a: f64,
        e: f64,
        i: f64,
        raan: f64,
        argp: f64,
        true_anomaly: f64,
        epoch: Epoch,
    ) -> Result<Self, KeplerError> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(KeplerError::Domain(format!("semi-major axis {a} must be > 0")));
        }
        check_eccentricity(e)?;
        if !(0.0..=PI).contains(&i) {
            return Err(KeplerError::Domain(format!("inclination {i} rad outside [0, π]")));
        }
        if !(raan.is_finite() && argp.is_finite() && true_anomaly.is_finite()) {
            return Err(KeplerError::Domain("non-finite angle".into()));
        }
        Ok(Self {
            a,
            e,
            i,
            raan: normalize_angle(raan),
            argp: normalize_angle(argp),
            true_anomaly: normalize_angle(true_anomaly),
            epoch,
        })
    }

    /// Same as [`KeplerianElements::new`] with angles given in degrees.
    pub fn from_degrees(
        a: f64,
        e: f64,
        i_deg: f64,
        raan_deg: f64,
        argp_deg: f64,
        true_anom_deg: f64,
        epoch: Epoch,
    ) -> Result<Self, KeplerError> {
        Self::new(
            a,
            e,
            i_deg.to_radians(),
            raan_deg.to_radians(),
            argp_deg.to_radians(),
            true_anom_deg.to_radians(),
            epoch,
        )
    }

    pub fn eccentric_anomaly(&self) -> f64 {
        true_to_eccentric(self.true_anomaly, self.e)
    }

    pub fn mean_anomaly(&self) -> f64 {
        true_to_mean(self.true_anomaly, self.e).expect("eccentricity validated at construction")
    }

    /// Argument of latitude u = ω + F.
    pub fn argument_of_latitude(&self) -> f64 {
        normalize_angle(self.argp + self.true_anomaly)
    }

    /// Mean motion, rad/s.
    pub fn mean_motion(&self) -> f64 {
        (MU_EARTH / self.a.powi(3)).sqrt()
    }

    /// Keplerian period, s.
    pub fn period(&self) -> f64 {
        TAU / self.mean_motion()
    }

    /// Two-body analytic advance by `dt` seconds (mean anomaly grows at n).
    pub fn advanced_by(&self, dt: f64) -> Result<Self, KeplerError> {
        let m = self.mean_anomaly() + self.mean_motion() * dt;
        let e_anom = solve_kepler(m, self.e)?;
        let f = eccentric_to_true(e_anom, self.e)?;
        Ok(Self {
            true_anomaly: f,
            epoch: self.epoch.plus_seconds(dt),
            ..*self
        })
    }

    /// One row of the elements CSV (see [`ELEMENTS_CSV_HEADER`]).
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.a,
            self.e,
            self.i.to_degrees(),
            self.raan.to_degrees(),
            self.argp.to_degrees(),
            self.true_anomaly.to_degrees(),
            self.epoch.jd()
        )
    }

    pub fn from_csv_row(row: &str) -> Result<Self, KeplerError> {
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != 7 {
            return Err(KeplerError::Domain(format!(
                "expected 7 columns, found {}",
                fields.len()
            )));
        }
        let mut v = [0.0; 7];
        for (slot, field) in v.iter_mut().zip(&fields) {
            *slot = field
                .parse()
                .map_err(|_| KeplerError::Domain(format!("`{field}` is not a number")))?;
        }
        let epoch = Epoch::from_jd(v[6]).map_err(|e| KeplerError::Domain(e.to_string()))?;
        Self::from_degrees(v[0], v[1], v[2], v[3], v[4], v[5], epoch)
    }
}

pub const ELEMENTS_CSV_HEADER: &str = "a_km,e,i_deg,raan_deg,argp_deg,true_anom_deg,epoch_jd";

/// Reads every element row of a CSV document. A header line is optional;
/// blank lines and `#` comments are skipped.
pub fn read_elements_csv(text: &str) -> Result<Vec<KeplerianElements>, KeplerError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with(|c: char| c.is_ascii_alphabetic()) {
            continue;
        }
        let el = KeplerianElements::from_csv_row(line).map_err(|e| KeplerError::Csv {
            line: idx + 1,
            msg: e.to_string(),
        })?;
        out.push(el);
    }
    if out.is_empty() {
        return Err(KeplerError::Csv {
            line: 0,
            msg: "no element rows found".into(),
        });
    }
    Ok(out)
}

/// Inertial position and velocity at an epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    /// Position, km (J2000).
    pub r: Vec3,
    /// Velocity, km/s (J2000).
    pub v: Vec3,
    pub epoch: Epoch,
}

impl StateVector {
    pub fn new(r: Vec3, v: Vec3, epoch: Epoch) -> Self {
        Self { r, v, epoch }
    }

    /// Specific orbital energy, km^2/s^2.
    pub fn specific_energy(&self) -> f64 {
        0.5 * self.v.norm_squared() - MU_EARTH / self.r.norm()
    }

    /// Specific angular momentum r × v, km^2/s.
    pub fn angular_momentum(&self) -> Vec3 {
        self.r.cross(&self.v)
    }
}

/// Solves Kepler's equation M = E − e·sin E by Newton–Raphson.
///
/// The returned eccentric anomaly lies in `[0, 2π)`.
pub fn solve_kepler(mean_anomaly: f64, e: f64) -> Result<f64, KeplerError> {
    check_eccentricity(e)?;
    let m = normalize_angle(mean_anomaly);
    if e == 0.0 {
        return Ok(m);
    }
    let mut ecc = if e > 0.8 { PI } else { m };
    for _ in 0..KEPLER_MAX_ITER {
        let f = ecc - e * ecc.sin() - m;
        if f.abs() < KEPLER_TOL {
            return Ok(ecc);
        }
        ecc -= f / (1.0 - e * ecc.cos());
    }
    if (ecc - e * ecc.sin() - m).abs() < KEPLER_TOL {
        Ok(ecc)
    } else {
        Err(KeplerError::NoConvergence {
            mean_anomaly,
            eccentricity: e,
        })
    }
}

/// True anomaly from eccentric anomaly. cos F = (cos E − e)/(1 − e cos E),
/// with F placed in the same half-plane as E.
pub fn eccentric_to_true(ecc_anomaly: f64, e: f64) -> Result<f64, KeplerError> {
    check_eccentricity(e)?;
    let (s, c) = ecc_anomaly.sin_cos();
    Ok(normalize_angle(((1.0 - e * e).sqrt() * s).atan2(c - e)))
}

fn true_to_eccentric(true_anomaly: f64, e: f64) -> f64 {
    let (s, c) = true_anomaly.sin_cos();
    normalize_angle(((1.0 - e * e).sqrt() * s).atan2(e + c))
}

/// Mean anomaly from true anomaly, in `[0, 2π)`.
pub fn true_to_mean(true_anomaly: f64, e: f64) -> Result<f64, KeplerError> {
    check_eccentricity(e)?;
    let ecc = true_to_eccentric(true_anomaly, e);
    Ok(normalize_angle(ecc - e * ecc.sin()))
}

/// Perifocal-to-inertial rotation R3(−Ω)·R1(−i)·R3(−ω) applied to `p`.
fn perifocal_to_inertial(el: &KeplerianElements, p: Vec3) -> Vec3 {
    let (so, co) = el.raan.sin_cos();
    let (si, ci) = el.i.sin_cos();
    let (sw, cw) = el.argp.sin_cos();
    let m11 = co * cw - so * sw * ci;
    let m12 = -co * sw - so * cw * ci;
    let m21 = so * cw + co * sw * ci;
    let m22 = -so * sw + co * cw * ci;
    let m31 = sw * si;
    let m32 = cw * si;
    Vec3::new(
        m11 * p.x + m12 * p.y,
        m21 * p.x + m22 * p.y,
        m31 * p.x + m32 * p.y,
    )
}

pub fn elements_to_state(el: &KeplerianElements) -> StateVector {
    let p = el.a * (1.0 - el.e * el.e);
    let (sf, cf) = el.true_anomaly.sin_cos();
    let radius = p / (1.0 + el.e * cf);
    let r_pf = Vec3::new(radius * cf, radius * sf, 0.0);
    let k = (MU_EARTH / p).sqrt();
    let v_pf = Vec3::new(-k * sf, k * (el.e + cf), 0.0);
    StateVector {
        r: perifocal_to_inertial(el, r_pf),
        v: perifocal_to_inertial(el, v_pf),
        epoch: el.epoch,
    }
}

/// Signed angle from `from` to `to`, measured about `axis` in `[0, 2π)`.
fn angle_about(from: &Vec3, to: &Vec3, axis: &Vec3) -> f64 {
    normalize_angle(axis.dot(&from.cross(to)).atan2(from.dot(to)))
}

/// Recovers classical elements from a state vector.
///
/// The arccos forms for i, ω, Ω and F are evaluated as atan2 of the
/// matching sine/cosine pair; the branch on the node vector's y-component,
/// on e_z and on r·v falls out of the sign of the sine term.
pub fn state_to_elements(sv: &StateVector) -> Result<KeplerianElements, KeplerError> {
    let r = sv.r;
    let v = sv.v;
    let rmag = r.norm();
    let h = r.cross(&v);
    let hmag = h.norm();
    if rmag == 0.0 || hmag <= 1e-12 * rmag * v.norm() || hmag == 0.0 {
        return Err(KeplerError::Degenerate);
    }
    let h_hat = h / hmag;

    let energy = 0.5 * v.norm_squared() - MU_EARTH / rmag;
    if energy >= 0.0 {
        return Err(KeplerError::Unbound(energy));
    }
    let a = -MU_EARTH / (2.0 * energy);

    let node = Vec3::new(-h.y, h.x, 0.0);
    let nmag = node.norm();
    let i = nmag.atan2(h.z);

    let e_vec = ((v.norm_squared() - MU_EARTH / rmag) * r - r.dot(&v) * v) / MU_EARTH;
    let e = e_vec.norm();

    let equatorial = nmag / hmag < EQUATORIAL_TOL;
    let circular = e < CIRCULAR_TOL;

    let (raan, node_dir) = if equatorial {
        (0.0, Vec3::x())
    } else {
        (normalize_angle(node.y.atan2(node.x)), node / nmag)
    };
    let (argp, true_anomaly) = if circular {
        (0.0, angle_about(&node_dir, &r, &h_hat))
    } else {
        (
            angle_about(&node_dir, &e_vec, &h_hat),
            angle_about(&e_vec, &r, &h_hat),
        )
    };

    KeplerianElements::new(
        a,
        if circular { 0.0 } else { e },
        i.clamp(0.0, PI),
        raan,
        argp,
        true_anomaly,
        sv.epoch,
    )
}

/// Circular orbital speed sqrt(mu/a), km/s.
pub fn circular_velocity(a: f64) -> Result<f64, KeplerError> {
    if !(a > 0.0) {
        return Err(KeplerError::Domain(format!("semi-major axis {a} must be > 0")));
    }
    Ok((MU_EARTH / a).sqrt())
}

/// Period T = 2πa / v for a circular orbit of radius `a`, s.
pub fn orbital_period(a: f64) -> Result<f64, KeplerError> {
    Ok(TAU * a / circular_velocity(a)?)
}

/// Whole revolutions completed in one solar day.
pub fn orbits_per_day(a: f64) -> Result<u32, KeplerError> {
    Ok((SECONDS_PER_DAY / orbital_period(a)?).floor() as u32)
}

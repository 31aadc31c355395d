//! Fixed-step RK4 integration of two-body motion with an optional
//! perturbing acceleration.

use thiserror::Error;

use crate::kepler::{StateVector, Vec3};
use crate::timeframe::{Epoch, MU_EARTH, R_EARTH};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PropagatorError {
    #[error("position magnitude is zero")]
    Singular,
    #[error("invalid step: duration {duration} s, dt {dt} s (need 0 < dt <= duration)")]
    InvalidStep { duration: f64, dt: f64 },
    #[error("state became non-finite at t = {0} s")]
    NonFinite(f64),
    #[error("time {t} s outside trajectory span [0, {end}] s")]
    OutOfSpan { t: f64, end: f64 },
}

/// Perturbing acceleration hook: (r km, v km/s, epoch) → km/s².
pub type Perturbation<'a> = &'a (dyn Fn(&Vec3, &Vec3, Epoch) -> Vec3 + 'a);

/// Central-body gravity −μ r/|r|³, km/s².
pub fn two_body_accel(r: &Vec3) -> Result<Vec3, PropagatorError> {
    let r2 = r.norm_squared();
    if r2 == 0.0 {
        return Err(PropagatorError::Singular);
    }
    Ok(-MU_EARTH / (r2 * r2.sqrt()) * r)
}

fn gravity(r: &Vec3) -> Vec3 {
    let r2 = r.norm_squared();
    -MU_EARTH / (r2 * r2.sqrt()) * r
}

/// One classical RK4 step of the coupled (r, v) system.
pub fn rk4_step<F>(sv: &StateVector, dt: f64, accel: F) -> StateVector
where
    F: Fn(&Vec3, &Vec3, Epoch) -> Vec3,
{
    let t0 = sv.epoch;
    let half = t0.plus_seconds(0.5 * dt);
    let t1 = t0.plus_seconds(dt);
    let (r, v) = (sv.r, sv.v);

    let k1r = v;
    let k1v = accel(&r, &v, t0);
    let r2 = r + 0.5 * dt * k1r;
    let v2 = v + 0.5 * dt * k1v;
    let k2r = v2;
    let k2v = accel(&r2, &v2, half);
    let r3 = r + 0.5 * dt * k2r;
    let v3 = v + 0.5 * dt * k2v;
    let k3r = v3;
    let k3v = accel(&r3, &v3, half);
    let r4 = r + dt * k3r;
    let v4 = v + dt * k3v;
    let k4r = v4;
    let k4v = accel(&r4, &v4, t1);

    StateVector {
        r: r + dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r),
        v: v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        epoch: t1,
    }
}

/// Uniformly stepped states; the final step may be shorter.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<StateVector>,
    /// Offsets from the first sample, s. Kept separately because Julian
    /// Dates only resolve ~40 µs.
    times: Vec<f64>,
    step: f64,
    warnings: Vec<String>,
}

pub const TRAJECTORY_CSV_HEADER: &str = "t_s,x_km,y_km,z_km,vx_km_s,vy_km_s,vz_km_s";

impl Trajectory {
    pub fn from_samples(samples: Vec<StateVector>, step: f64) -> Self {
        let times = samples
            .iter()
            .map(|s| s.epoch.seconds_since(samples[0].epoch))
            .collect();
        Self {
            samples,
            times,
            step,
            warnings: Vec::new(),
        }
    }

    pub fn samples(&self) -> &[StateVector] {
        &self.samples
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn start(&self) -> Option<Epoch> {
        self.samples.first().map(|s| s.epoch)
    }

    /// Seconds from the first sample to the last.
    pub fn duration(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// Offset of sample `k` from the start, s.
    pub fn time_of(&self, k: usize) -> f64 {
        self.times[k]
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// State at `t` seconds after the start by cubic Hermite interpolation
    /// between the bracketing samples.
    pub fn state_at(&self, t: f64) -> Result<StateVector, PropagatorError> {
        let end = self.duration();
        if self.samples.is_empty() || t < 0.0 || t > end + 1e-9 {
            return Err(PropagatorError::OutOfSpan { t, end });
        }
        let n = self.samples.len();
        let mut k = ((t / self.step).floor() as usize).min(n.saturating_sub(2));
        while k + 1 < n - 1 && self.time_of(k + 1) < t {
            k += 1;
        }
        if n == 1 {
            return Ok(self.samples[0]);
        }
        let (a, b) = (&self.samples[k], &self.samples[k + 1]);
        let ta = self.time_of(k);
        let h = self.time_of(k + 1) - ta;
        let s = ((t - ta) / h).clamp(0.0, 1.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let r = h00 * a.r + h10 * h * a.v + h01 * b.r + h11 * h * b.v;
        let d00 = (6.0 * s2 - 6.0 * s) / h;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = (-6.0 * s2 + 6.0 * s) / h;
        let d11 = 3.0 * s2 - 2.0 * s;
        let v = d00 * a.r + d10 * a.v + d01 * b.r + d11 * b.v;
        Ok(StateVector {
            r,
            v,
            epoch: self.samples[0].epoch.plus_seconds(t),
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.samples.len() * 120);
        out.push_str(TRAJECTORY_CSV_HEADER);
        out.push('\n');
        for (k, s) in self.samples.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                self.time_of(k),
                s.r.x,
                s.r.y,
                s.r.z,
                s.v.x,
                s.v.y,
                s.v.z
            ));
        }
        out
    }
}

/// Integrates from `sv0` for `duration` seconds at fixed step `dt`.
///
/// The total acceleration is two-body gravity plus `perturb` when given.
/// Samples below the Earth's surface add a reentry warning; propagation
/// continues.
pub fn propagate(
    sv0: &StateVector,
    duration: f64,
    dt: f64,
    perturb: Option<Perturbation<'_>>,
) -> Result<Trajectory, PropagatorError> {
    if !(duration > 0.0 && dt > 0.0 && dt <= duration) {
        return Err(PropagatorError::InvalidStep { duration, dt });
    }
    two_body_accel(&sv0.r)?;
    let full_steps = (duration / dt + 1e-9).floor() as usize;
    let remainder = duration - full_steps as f64 * dt;

    let accel = |r: &Vec3, v: &Vec3, t: Epoch| -> Vec3 {
        let g = gravity(r);
        match perturb {
            Some(p) => g + p(r, v, t),
            None => g,
        }
    };

    let mut samples = Vec::with_capacity(full_steps + 2);
    let mut times = Vec::with_capacity(full_steps + 2);
    samples.push(*sv0);
    times.push(0.0);
    let mut warnings = Vec::new();
    let mut state = *sv0;
    let mut steps: Vec<f64> = vec![dt; full_steps];
    if remainder > 1e-9 * dt {
        steps.push(remainder);
    }
    let mut t = 0.0;
    for (k, h) in steps.into_iter().enumerate() {
        state = rk4_step(&state, h, accel);
        t = if k < full_steps { (k + 1) as f64 * dt } else { duration };
        state.epoch = sv0.epoch.plus_seconds(t);
        if !(state.r.iter().chain(state.v.iter()).all(|c| c.is_finite())) || state.r.norm() == 0.0 {
            return Err(PropagatorError::NonFinite(t));
        }
        if warnings.is_empty() && state.r.norm() < R_EARTH {
            warnings.push(format!(
                "reentry: |r| = {:.3} km below the Earth radius at t = {t} s",
                state.r.norm()
            ));
        }
        samples.push(state);
        times.push(t);
    }
    debug_assert!((t - duration).abs() < 1e-6 * duration.max(1.0));
    Ok(Trajectory {
        samples,
        times,
        step: dt,
        warnings,
    })
}

//! Earth-fixed geometry: ground tracks, look angles, and ground-station
//! passes.
//!
//! The Earth is a sphere of radius [`R_EARTH`]; latitudes are geocentric.

use std::fmt::Write as _;

use thiserror::Error;

use crate::kepler::{StateVector, Vec3};
use crate::propagator::{PropagatorError, Trajectory};
use crate::timeframe::{gmst, Epoch, R_EARTH, SIDEREAL_DAY_S};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("position vector has zero length")]
    Singular,
    #[error("satellite coincides with the station; direction undefined")]
    UndefinedDirection,
    #[error("invalid station: {0}")]
    InvalidStation(String),
    #[error("empty trajectory")]
    EmptyTrajectory,
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
}

/// Geocentric latitude/longitude in degrees and altitude in km.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
    pub alt: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64, alt: f64) -> Self {
        Self {
            lat,
            lon: normalize_lon(lon),
            alt,
        }
    }

    pub fn to_ecef(&self) -> Vec3 {
        let (slat, clat) = self.lat.to_radians().sin_cos();
        let (slon, clon) = self.lon.to_radians().sin_cos();
        (R_EARTH + self.alt) * Vec3::new(clat * clon, clat * slon, slat)
    }
}

/// Wraps a longitude into `(-180, 180]`.
pub fn normalize_lon(lon: f64) -> f64 {
    let l = (lon + 180.0).rem_euclid(360.0) - 180.0;
    if l <= -180.0 {
        l + 360.0
    } else {
        l
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundStation {
    pub name: String,
    pub location: GeoPoint,
    /// Minimum tracking elevation, deg.
    pub mask_deg: f64,
}

impl GroundStation {
    pub fn new(name: impl Into<String>, lat: f64, lon: f64, mask_deg: f64) -> Result<Self, GeoError> {
        if !(0.0..90.0).contains(&mask_deg) {
            return Err(GeoError::InvalidStation(format!("mask angle {mask_deg} outside [0, 90)")));
        }
        if !(-90.0..=90.0).contains(&lat) {
            return Err(GeoError::InvalidStation(format!("latitude {lat} outside [-90, 90]")));
        }
        Ok(Self {
            name: name.into(),
            location: GeoPoint::new(lat, lon, 0.0),
            mask_deg,
        })
    }

    pub fn patiala() -> Self {
        Self::new("Patiala", 30.3398, 76.3869, 5.0).unwrap()
    }

    pub fn srinagar() -> Self {
        Self::new("Srinagar", 34.0837, 74.7973, 5.0).unwrap()
    }

    pub fn bengaluru() -> Self {
        Self::new("Bengaluru", 12.9716, 77.5946, 5.0).unwrap()
    }
}

/// Rotation from J2000 to Earth-fixed axes through the GMST angle.
pub fn eci_to_ecef(r: &Vec3, epoch: Epoch) -> Vec3 {
    rotate_z(r, gmst(epoch))
}

fn rotate_z(r: &Vec3, theta: f64) -> Vec3 {
    let (s, c) = theta.sin_cos();
    Vec3::new(c * r.x + s * r.y, -s * r.x + c * r.y, r.z)
}

pub fn ecef_to_geo(r: &Vec3) -> Result<GeoPoint, GeoError> {
    let rmag = r.norm();
    if rmag == 0.0 {
        return Err(GeoError::Singular);
    }
    Ok(GeoPoint::new(
        (r.z / rmag).clamp(-1.0, 1.0).asin().to_degrees(),
        r.y.atan2(r.x).to_degrees(),
        rmag - R_EARTH,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackPoint {
    /// Seconds since the trajectory start.
    pub t: f64,
    pub epoch: Epoch,
    pub point: GeoPoint,
}

fn sample_epoch(traj: &Trajectory, k: usize) -> Epoch {
    traj.samples()[k].epoch
}

/// Sub-satellite points of every trajectory sample.
pub fn ground_track(traj: &Trajectory) -> Result<Vec<TrackPoint>, GeoError> {
    if traj.is_empty() {
        return Err(GeoError::EmptyTrajectory);
    }
    traj.samples()
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let epoch = sample_epoch(traj, k);
            Ok(TrackPoint {
                t: traj.time_of(k),
                epoch,
                point: ecef_to_geo(&eci_to_ecef(&s.r, epoch))?,
            })
        })
        .collect()
}

/// Splits a track wherever consecutive longitudes jump by more than 180°.
pub fn split_segments(track: &[TrackPoint]) -> Vec<Vec<TrackPoint>> {
    let mut segments: Vec<Vec<TrackPoint>> = Vec::new();
    for p in track {
        match segments.last_mut() {
            Some(seg) if (seg.last().unwrap().point.lon - p.point.lon).abs() <= 180.0 => seg.push(*p),
            _ => segments.push(vec![*p]),
        }
    }
    segments
}

pub const TRACK_CSV_HEADER: &str = "t_s,lat_deg,lon_deg,alt_km";

pub fn track_to_csv(track: &[TrackPoint]) -> String {
    let mut out = String::from(TRACK_CSV_HEADER);
    out.push('\n');
    for p in track {
        let _ = writeln!(out, "{},{:.6},{:.6},{:.6}", p.t, p.point.lat, p.point.lon, p.point.alt);
    }
    out
}

/// GeoJSON FeatureCollection with one LineString per anti-meridian segment.
pub fn track_to_geojson(track: &[TrackPoint]) -> String {
    let mut out = String::from("{\"type\":\"FeatureCollection\",\"features\":[");
    for (i, seg) in split_segments(track).iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(
            out,
            "{{\"type\":\"Feature\",\"properties\":{{\"segment\":{i}}},\"geometry\":{{\"type\":\"LineString\",\"coordinates\":["
        );
        for (j, p) in seg.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "[{:.6},{:.6}]", p.point.lon, p.point.lat);
        }
        out.push_str("]}}");
    }
    out.push_str("]}\n");
    out
}

/// Times (s since start), by linear interpolation of z, at which the
/// trajectory crosses the equator northbound.
pub fn ascending_node_times(traj: &Trajectory) -> Vec<f64> {
    let s = traj.samples();
    (1..s.len())
        .filter(|&k| s[k - 1].r.z < 0.0 && s[k].r.z >= 0.0)
        .map(|k| {
            let (t0, t1) = (traj.time_of(k - 1), traj.time_of(k));
            let (z0, z1) = (s[k - 1].r.z, s[k].r.z);
            t0 + (t1 - t0) * (-z0) / (z1 - z0)
        })
        .collect()
}

/// Longitude drift per revolution expected from Earth rotation alone, deg.
pub fn expected_node_regression(period_s: f64) -> f64 {
    360.0 * period_s / SIDEREAL_DAY_S
}

/// Earth-central cap angle α (deg) for a mask angle β, and the visible
/// fraction V of the Earth's surface, cos α = 1 − 2V.
pub fn cap_angle(altitude: f64, mask_deg: f64) -> (f64, f64) {
    let beta = mask_deg.to_radians();
    let ratio = R_EARTH / (R_EARTH + altitude);
    let alpha = (ratio * beta.cos()).acos() - beta;
    let visibility = (1.0 - alpha.cos()) / 2.0;
    (alpha.to_degrees(), visibility)
}

/// Station-to-satellite distance for a satellite radius `a_sat` (km) at
/// Earth-central angle `alpha_deg` from the station.
pub fn slant_range(a_sat: f64, alpha_deg: f64) -> f64 {
    let c = alpha_deg.to_radians().cos();
    (a_sat * a_sat + R_EARTH * R_EARTH - 2.0 * R_EARTH * a_sat * c)
        .max(0.0)
        .sqrt()
}

struct Enu {
    east: Vec3,
    north: Vec3,
    up: Vec3,
}

fn enu_basis(p: &GeoPoint) -> Enu {
    let (slat, clat) = p.lat.to_radians().sin_cos();
    let (slon, clon) = p.lon.to_radians().sin_cos();
    Enu {
        east: Vec3::new(-slon, clon, 0.0),
        north: Vec3::new(-slat * clon, -slat * slon, clat),
        up: Vec3::new(clat * clon, clat * slon, slat),
    }
}

/// Topocentric elevation and azimuth (deg, azimuth in [0, 360) from north
/// through east) of an Earth-fixed satellite position.
pub fn elevation_azimuth(station: &GroundStation, r_ecef: &Vec3) -> Result<(f64, f64), GeoError> {
    let rho = r_ecef - station.location.to_ecef();
    let range = rho.norm();
    if range < 1e-9 {
        return Err(GeoError::UndefinedDirection);
    }
    let basis = enu_basis(&station.location);
    let up = rho.dot(&basis.up);
    let el = (up / range).clamp(-1.0, 1.0).asin().to_degrees();
    let az = rho.dot(&basis.east).atan2(rho.dot(&basis.north)).to_degrees();
    Ok((el, az.rem_euclid(360.0)))
}

/// What gates a pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VisibilityCriterion {
    /// Elevation at or above the station's mask angle.
    MaskAngle,
    /// Station inside the nadir-centred camera cone of full angle `fov_deg`.
    FieldOfView { fov_deg: f64 },
}

/// Default camera field of view, deg.
pub const DEFAULT_FOV_DEG: f64 = 27.3;

fn margin(station: &GroundStation, r_ecef: &Vec3, criterion: VisibilityCriterion) -> Result<f64, GeoError> {
    match criterion {
        VisibilityCriterion::MaskAngle => Ok(elevation_azimuth(station, r_ecef)?.0 - station.mask_deg),
        VisibilityCriterion::FieldOfView { fov_deg } => {
            let to_station = station.location.to_ecef() - r_ecef;
            let nadir = -r_ecef;
            let cosang = to_station.dot(&nadir) / (to_station.norm() * nadir.norm());
            let off_nadir = fov_deg / 2.0 - cosang.clamp(-1.0, 1.0).acos().to_degrees();
            // the nadir cone also reaches the antipode, so require line of sight
            Ok(off_nadir.min(elevation_azimuth(station, r_ecef)?.0))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PassDirection {
    /// South to north.
    Ascending,
    /// North to south.
    Descending,
}

impl PassDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            PassDirection::Ascending => "ascending",
            PassDirection::Descending => "descending",
        }
    }
}

/// One continuous visibility interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassWindow {
    pub aos: Epoch,
    pub los: Epoch,
    /// Acquisition and loss offsets from the trajectory start, s.
    pub aos_t: f64,
    pub los_t: f64,
    pub duration: f64,
    pub max_elevation: f64,
    /// Offset of the elevation peak from the trajectory start, s.
    pub max_elevation_t: f64,
    pub direction: PassDirection,
}

struct PassGeometry<'a> {
    traj: &'a Trajectory,
    start: Epoch,
    station: &'a GroundStation,
    criterion: VisibilityCriterion,
}

impl PassGeometry<'_> {
    fn state(&self, t: f64) -> Result<(StateVector, Vec3), GeoError> {
        let sv = self.traj.state_at(t)?;
        let ecef = eci_to_ecef(&sv.r, self.start.plus_seconds(t));
        Ok((sv, ecef))
    }

    fn margin_at(&self, t: f64) -> Result<f64, GeoError> {
        margin(self.station, &self.state(t)?.1, self.criterion)
    }

    fn elevation_at(&self, t: f64) -> Result<f64, GeoError> {
        Ok(elevation_azimuth(self.station, &self.state(t)?.1)?.0)
    }

    /// Bisects the sign change of the margin between `lo` (outside) and
    /// `hi` (inside), or the reverse when `rising` is false.
    fn edge(&self, mut lo: f64, mut hi: f64, rising: bool) -> Result<f64, GeoError> {
        while hi - lo > 1e-3 {
            let mid = 0.5 * (lo + hi);
            let inside = self.margin_at(mid)? >= 0.0;
            if inside == rising {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(if rising { hi } else { lo })
    }

    /// Golden-section maximisation of elevation on `[a, b]`.
    fn peak(&self, mut a: f64, mut b: f64) -> Result<(f64, f64), GeoError> {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (self.elevation_at(c)?, self.elevation_at(d)?);
        while b - a > 1e-3 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = self.elevation_at(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = self.elevation_at(d)?;
            }
        }
        let t = 0.5 * (a + b);
        Ok((t, self.elevation_at(t)?))
    }
}

/// Visibility windows of `station` over `traj`, with AOS/LOS refined by
/// bisection well below one second.
pub fn find_passes(
    traj: &Trajectory,
    station: &GroundStation,
    criterion: VisibilityCriterion,
) -> Result<Vec<PassWindow>, GeoError> {
    let Some(start) = traj.start() else {
        return Ok(Vec::new());
    };
    let geom = PassGeometry {
        traj,
        start,
        station,
        criterion,
    };
    let n = traj.len();
    let mut margins = Vec::with_capacity(n);
    let mut elevations = Vec::with_capacity(n);
    for (k, s) in traj.samples().iter().enumerate() {
        let ecef = eci_to_ecef(&s.r, start.plus_seconds(traj.time_of(k)));
        margins.push(margin(station, &ecef, criterion)?);
        elevations.push(elevation_azimuth(station, &ecef)?.0);
    }

    let mut passes = Vec::new();
    let mut k = 0;
    while k < n {
        if margins[k] < 0.0 {
            k += 1;
            continue;
        }
        let first = k;
        while k + 1 < n && margins[k + 1] >= 0.0 {
            k += 1;
        }
        let last = k;
        k += 1;

        let aos_t = if first == 0 {
            0.0
        } else {
            geom.edge(traj.time_of(first - 1), traj.time_of(first), true)?
        };
        let los_t = if last + 1 == n {
            traj.duration()
        } else {
            geom.edge(traj.time_of(last), traj.time_of(last + 1), false)?
        };

        let best = (first..=last)
            .max_by(|&a, &b| elevations[a].total_cmp(&elevations[b]))
            .unwrap();
        let lo = if best > first { traj.time_of(best - 1) } else { aos_t }.max(aos_t);
        let hi = if best < last { traj.time_of(best + 1) } else { los_t }.min(los_t);
        let (peak_t, peak_el) = if hi > lo { geom.peak(lo, hi)? } else { (traj.time_of(best), elevations[best]) };
        let (max_elevation_t, max_elevation) = if peak_el >= elevations[best] {
            (peak_t, peak_el)
        } else {
            (traj.time_of(best), elevations[best])
        };

        let (sv, _) = geom.state(max_elevation_t)?;
        let lat_rate = sv.v.z * sv.r.norm_squared() - sv.r.z * sv.r.dot(&sv.v);
        let direction = if lat_rate >= 0.0 {
            PassDirection::Ascending
        } else {
            PassDirection::Descending
        };

        passes.push(PassWindow {
            aos: start.plus_seconds(aos_t),
            los: start.plus_seconds(los_t),
            aos_t,
            los_t,
            duration: los_t - aos_t,
            max_elevation,
            max_elevation_t,
            direction,
        });
    }
    Ok(passes)
}

pub const PASSES_CSV_HEADER: &str = "aos_iso,los_iso,duration_s,max_el_deg,direction";

pub fn passes_to_csv(passes: &[PassWindow]) -> String {
    let mut out = String::from(PASSES_CSV_HEADER);
    out.push('\n');
    for p in passes {
        let _ = writeln!(
            out,
            "{},{},{:.1},{:.3},{}",
            p.aos.to_iso(),
            p.los.to_iso(),
            p.duration,
            p.max_elevation,
            p.direction.as_str()
        );
    }
    out
}

/// Per-station pass statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct RevisitSummary {
    pub station: String,
    pub count: usize,
    pub min_duration: Option<f64>,
    pub mean_duration: Option<f64>,
    pub max_duration: Option<f64>,
    /// AOS-to-AOS separations of consecutive passes, s.
    pub gaps: Vec<f64>,
    pub max_gap: Option<f64>,
}

/// Summarises time-ordered passes. Exact duplicate windows are counted once.
pub fn revisit_report(passes: &[PassWindow], station: &GroundStation) -> RevisitSummary {
    let mut unique: Vec<PassWindow> = Vec::with_capacity(passes.len());
    for p in passes {
        if !unique.iter().any(|q| q.aos == p.aos && q.los == p.los) {
            unique.push(*p);
        }
    }
    unique.sort_by(|a, b| a.aos.jd().total_cmp(&b.aos.jd()));
    let durations: Vec<f64> = unique.iter().map(|p| p.duration).collect();
    let gaps: Vec<f64> = unique
        .windows(2)
        .map(|w| w[1].aos.seconds_since(w[0].aos))
        .collect();
    let fold = |init: f64, f: fn(f64, f64) -> f64| -> Option<f64> {
        (!durations.is_empty()).then(|| durations.iter().copied().fold(init, f))
    };
    RevisitSummary {
        station: station.name.clone(),
        count: unique.len(),
        min_duration: fold(f64::INFINITY, f64::min),
        mean_duration: (!durations.is_empty())
            .then(|| durations.iter().sum::<f64>() / durations.len() as f64),
        max_duration: fold(f64::NEG_INFINITY, f64::max),
        max_gap: gaps.iter().copied().reduce(f64::max),
        gaps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kepler::{elements_to_state, KeplerianElements};
    use crate::propagator::propagate;

    #[test]
    fn eci_ecef_rotation() {
        let r = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(rotate_z(&r, 0.0), r);
        let q = rotate_z(&Vec3::new(1.0, 0.0, 0.0), std::f64::consts::FRAC_PI_2);
        assert!((q - Vec3::new(0.0, -1.0, 0.0)).norm() < 1e-15);
        let e = Epoch::from_jd(2_459_905.77).unwrap();
        assert!((eci_to_ecef(&r, e).norm() - r.norm()).abs() < 1e-12);
    }

    #[test]
    fn geodetic_examples() {
        let p = ecef_to_geo(&Vec3::new(R_EARTH, 0.0, 0.0)).unwrap();
        assert_eq!((p.lat, p.lon, p.alt), (0.0, 0.0, 0.0));
        let p = ecef_to_geo(&Vec3::new(0.0, 0.0, R_EARTH + 550.0)).unwrap();
        assert_eq!(p.lat, 90.0);
        assert!((p.alt - 550.0).abs() < 1e-9);
        let p = ecef_to_geo(&Vec3::new(0.0, R_EARTH, 0.0)).unwrap();
        assert_eq!(p.lon, 90.0);
        assert_eq!(ecef_to_geo(&Vec3::zeros()), Err(GeoError::Singular));
        assert_eq!(normalize_lon(-180.0), 180.0);
        assert_eq!(normalize_lon(540.0), 180.0);
    }

    #[test]
    fn equatorial_track_stays_on_equator() {
        let el = KeplerianElements::new(6928.18, 0.0, 0.0, 0.0, 0.0, 0.0, Epoch::J2000).unwrap();
        let traj = propagate(&elements_to_state(&el), 6000.0, 10.0, None).unwrap();
        let track = ground_track(&traj).unwrap();
        assert!(track.iter().all(|p| p.point.lat.abs() < 0.01));
    }

    #[test]
    fn segments_split_at_antimeridian() {
        let mk = |lon: f64| TrackPoint {
            t: 0.0,
            epoch: Epoch::J2000,
            point: GeoPoint::new(0.0, lon, 0.0),
        };
        let track = vec![mk(170.0), mk(179.0), mk(-178.0), mk(-170.0)];
        let segs = split_segments(&track);
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[0].len(), 2);
        let json = track_to_geojson(&track);
        assert_eq!(json.matches("LineString").count(), 2);
    }

    #[test]
    fn cap_angle_examples() {
        let (alpha, v) = cap_angle(550.0, 5.003_088);
        assert!((alpha - 18.5).abs() < 0.1, "{alpha}");
        assert!((v - (1.0 - alpha.to_radians().cos()) / 2.0).abs() < 1e-15);
        let (alpha0, _) = cap_angle(550.0, 0.0);
        let horizon = (R_EARTH / (R_EARTH + 550.0)).acos().to_degrees();
        assert!((alpha0 - horizon).abs() < 1e-12);
        assert!((alpha0 - 23.0).abs() < 0.2, "{alpha0}");
        assert!(cap_angle(550.0, 89.999_999).0.abs() < 1e-5);
    }

    #[test]
    fn slant_range_examples() {
        assert!((slant_range(6928.18, 0.0) - (6928.18 - R_EARTH)).abs() < 1e-9);
        assert!((slant_range(6928.18, 180.0) - (6928.18 + R_EARTH)).abs() < 1e-9);
        let d = slant_range(6928.18, 18.5);
        assert!((d - 2209.0).abs() < 20.0, "{d}");
    }

    #[test]
    fn elevation_examples() {
        let st = GroundStation::new("mid", 40.0, 20.0, 5.0).unwrap();
        let zenith = GeoPoint::new(40.0, 20.0, 550.0).to_ecef();
        assert!((elevation_azimuth(&st, &zenith).unwrap().0 - 90.0).abs() < 1e-9);

        let (alpha, _) = cap_angle(550.0, 0.0);
        let horizon = GeoPoint::new(40.0 + alpha, 20.0, 550.0).to_ecef();
        let (el, az) = elevation_azimuth(&st, &horizon).unwrap();
        assert!(el.abs() < 0.1, "{el}");
        assert!(az.abs() < 1e-6 || (az - 360.0).abs() < 1e-6, "{az}");

        let north = GeoPoint::new(45.0, 20.0, 550.0).to_ecef();
        let az = elevation_azimuth(&st, &north).unwrap().1;
        assert!(az < 1e-6 || az > 360.0 - 1e-6);
        assert_eq!(
            elevation_azimuth(&st, &st.location.to_ecef()),
            Err(GeoError::UndefinedDirection)
        );
    }

    #[test]
    fn cap_angle_closes_with_topocentric_elevation() {
        for beta in [0.0, 5.003_088, 10.0, 30.0, 60.0] {
            let (alpha, _) = cap_angle(550.0, beta);
            let st = GroundStation::new("s", 10.0, 50.0, beta.min(89.0)).unwrap();
            let sat = GeoPoint::new(10.0 - alpha, 50.0, 550.0).to_ecef();
            let (el, _) = elevation_azimuth(&st, &sat).unwrap();
            assert!((el - beta).abs() < 0.1, "beta {beta}: el {el}");
        }
    }

    #[test]
    fn invalid_station() {
        assert!(GroundStation::new("x", 0.0, 0.0, 90.0).is_err());
        assert!(GroundStation::new("x", 0.0, 0.0, -1.0).is_err());
        assert!(GroundStation::new("x", 91.0, 0.0, 5.0).is_err());
    }

    #[test]
    fn equatorial_orbit_never_seen_from_pole() {
        let el = KeplerianElements::new(6928.18, 0.0, 0.0, 0.0, 0.0, 0.0, Epoch::J2000).unwrap();
        let traj = propagate(&elements_to_state(&el), 86_400.0, 10.0, None).unwrap();
        let pole = GroundStation::new("pole", 90.0, 0.0, 5.0).unwrap();
        assert!(find_passes(&traj, &pole, VisibilityCriterion::MaskAngle).unwrap().is_empty());
    }

    #[test]
    fn empty_trajectory_has_no_passes() {
        let traj = Trajectory::from_samples(Vec::new(), 10.0);
        assert!(find_passes(&traj, &GroundStation::patiala(), VisibilityCriterion::MaskAngle)
            .unwrap()
            .is_empty());
    }

    fn pass(aos_s: f64, dur: f64) -> PassWindow {
        let aos = Epoch::from_jd(2_459_905.5).unwrap().plus_seconds(aos_s);
        PassWindow {
            aos,
            los: aos.plus_seconds(dur),
            aos_t: aos_s,
            los_t: aos_s + dur,
            duration: dur,
            max_elevation: 40.0,
            max_elevation_t: aos_s + dur / 2.0,
            direction: PassDirection::Descending,
        }
    }

    #[test]
    fn revisit_examples() {
        let st = GroundStation::patiala();
        let empty = revisit_report(&[], &st);
        assert_eq!(empty.count, 0);
        assert_eq!(empty.max_gap, None);
        assert_eq!(empty.mean_duration, None);

        let passes = [pass(2.0 * 3600.0 + 59.0 * 60.0, 530.0), pass(2.0 * 3600.0 + 59.0 * 60.0 + 44_040.0, 560.0)];
        let s = revisit_report(&passes, &st);
        assert_eq!(s.count, 2);
        assert!((s.max_gap.unwrap() - 44_040.0).abs() < 1e-3);
        assert_eq!(s.min_duration, Some(530.0));
        assert_eq!(s.max_duration, Some(560.0));
        assert!((s.mean_duration.unwrap() - 545.0).abs() < 1e-9);

        let doubled: Vec<PassWindow> = passes.iter().chain(passes.iter()).copied().collect();
        assert_eq!(revisit_report(&doubled, &st), s);
        assert_eq!(revisit_report(&passes, &st), s);
    }
}

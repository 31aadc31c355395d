//! Sun, Earth and Moon positions for SRP and shadow evaluation.
//!
//! Positions come from JPL Horizons vector tables (parsed from text, or
//! fetched and cached), from a simplified `jd,x_km,y_km,z_km` CSV, or from a
//! low-precision analytic solar model when no data file is available.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::kepler::Vec3;
use crate::timeframe::{Epoch, AU_KM, J2000_JD, R_EARTH, SECONDS_PER_DAY};

#[derive(Debug, Error)]
pub enum EphemerisError {
    #[error("{body}: line {line}: {msg}")]
    Format {
        body: String,
        line: usize,
        msg: String,
    },
    #[error("{body}: line {line}: epoch {jd} does not increase")]
    Ordering { body: String, line: usize, jd: f64 },
    #[error("epoch {jd} outside ephemeris span [{start}, {end}]")]
    OutOfRange { jd: f64, start: f64, end: f64 },
    #[error("ephemeris table needs at least two records, found {0}")]
    TooFew(usize),
    #[error("series {0} does not share epochs with the Sun series")]
    Misaligned(String),
    #[error("horizons fetch failed: {0} (use an ephemeris file or the analytic model offline)")]
    Fetch(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

fn format_err(body: &str, line: usize, msg: impl Into<String>) -> EphemerisError {
    EphemerisError::Format {
        body: body.to_string(),
        line,
        msg: msg.into(),
    }
}

/// Position of one body at one epoch, km.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyPosition {
    pub epoch: Epoch,
    pub position: Vec3,
}

fn parse_f64(body: &str, line: usize, field: &str) -> Result<f64, EphemerisError> {
    field
        .trim()
        .parse()
        .map_err(|_| format_err(body, line, format!("`{}` is not a number", field.trim())))
}

fn parse_jd(body: &str, line: usize, field: &str) -> Result<Epoch, EphemerisError> {
    let jd = parse_f64(body, line, field)?;
    Epoch::from_jd(jd).map_err(|e| format_err(body, line, e.to_string()))
}

/// Extracts `X =`, `Y =`, `Z =` values from a Horizons text-format data line.
fn labelled_xyz(line: &str) -> Option<[f64; 3]> {
    let mut out = [f64::NAN; 3];
    for (slot, label) in out.iter_mut().zip(["X", "Y", "Z"]) {
        let start = line.find(&format!("{label} ="))
            .or_else(|| line.find(&format!("{label}=")))?;
        let rest = line[start + label.len()..].trim_start().trim_start_matches('=');
        let token = rest.split_whitespace().next()?;
        *slot = token.parse().ok()?;
    }
    Some(out)
}

/// Parses a Horizons vector table (CSV or text layout, records between
/// `$$SOE` and `$$EOE`) or a simplified `jd,x,y,z` CSV with a header row.
///
/// `body` labels error messages.
pub fn parse_horizons_vectors(text: &str, body: &str) -> Result<Vec<BodyPosition>, EphemerisError> {
    let lines: Vec<&str> = text.lines().collect();
    let soe = lines.iter().position(|l| l.trim() == "$$SOE");
    let mut out = Vec::new();

    if let Some(soe) = soe {
        let eoe = lines
            .iter()
            .skip(soe)
            .position(|l| l.trim() == "$$EOE")
            .map(|p| p + soe)
            .ok_or_else(|| format_err(body, lines.len(), "missing $$EOE marker"))?;
        let scale = if lines[..soe]
            .iter()
            .any(|l| l.contains("Output units") && l.contains("AU"))
        {
            AU_KM
        } else {
            1.0
        };
        let mut idx = soe + 1;
        while idx < eoe {
            let line_no = idx + 1;
            let line = lines[idx].trim();
            idx += 1;
            if line.is_empty() || line.starts_with(|c: char| c.is_ascii_alphabetic()) {
                continue;
            }
            if line.contains(',') {
                let fields: Vec<&str> = line.split(',').collect();
                if fields.len() < 5 {
                    return Err(format_err(body, line_no, "expected JDTDB, date, X, Y, Z"));
                }
                let epoch = parse_jd(body, line_no, fields[0])?;
                let xyz = [
                    parse_f64(body, line_no, fields[2])?,
                    parse_f64(body, line_no, fields[3])?,
                    parse_f64(body, line_no, fields[4])?,
                ];
                out.push((line_no, epoch, Vec3::from(xyz) * scale));
            } else if let Some((jd, _)) = line.split_once('=') {
                let epoch = parse_jd(body, line_no, jd)?;
                let data = lines
                    .get(idx)
                    .and_then(|l| labelled_xyz(l))
                    .ok_or_else(|| format_err(body, line_no + 1, "expected X = .. Y = .. Z = .."))?;
                idx += 1;
                out.push((line_no, epoch, Vec3::from(data) * scale));
            } else {
                return Err(format_err(body, line_no, "unrecognised record"));
            }
        }
    } else {
        let mut saw_header = false;
        for (i, raw) in lines.iter().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !saw_header && line.starts_with(|c: char| c.is_ascii_alphabetic()) {
                saw_header = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() < 4 {
                return Err(format_err(
                    body,
                    line_no,
                    "no $$SOE/$$EOE block and not a jd,x_km,y_km,z_km CSV",
                ));
            }
            let epoch = parse_jd(body, line_no, fields[0])?;
            let xyz = [
                parse_f64(body, line_no, fields[1])?,
                parse_f64(body, line_no, fields[2])?,
                parse_f64(body, line_no, fields[3])?,
            ];
            out.push((line_no, epoch, Vec3::from(xyz)));
        }
        if out.is_empty() {
            return Err(format_err(body, 0, "no $$SOE marker and no CSV records"));
        }
    }

    for w in out.windows(2) {
        if w[1].1.jd() <= w[0].1.jd() {
            return Err(EphemerisError::Ordering {
                body: body.to_string(),
                line: w[1].0,
                jd: w[1].1.jd(),
            });
        }
    }
    Ok(out
        .into_iter()
        .map(|(_, epoch, position)| BodyPosition { epoch, position })
        .collect())
}

/// Writes positions in the simplified CSV layout.
pub fn to_simple_csv(series: &[BodyPosition]) -> String {
    let mut s = String::from("jd,x_km,y_km,z_km\n");
    for p in series {
        s.push_str(&format!(
            "{},{},{},{}\n",
            p.epoch.jd(),
            p.position.x,
            p.position.y,
            p.position.z
        ));
    }
    s
}

/// The position series the toolkit can request from Horizons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HorizonsSeries {
    SunGeocentric,
    EarthBarycentric,
    MoonGeocentric,
    MoonBarycentric,
}

impl HorizonsSeries {
    pub const ALL: [HorizonsSeries; 4] = [
        HorizonsSeries::SunGeocentric,
        HorizonsSeries::EarthBarycentric,
        HorizonsSeries::MoonGeocentric,
        HorizonsSeries::MoonBarycentric,
    ];

    /// (COMMAND, CENTER) pair of the Horizons request.
    fn target_center(self) -> (&'static str, &'static str) {
        match self {
            HorizonsSeries::SunGeocentric => ("10", "500@399"),
            HorizonsSeries::EarthBarycentric => ("399", "500@0"),
            HorizonsSeries::MoonGeocentric => ("301", "500@399"),
            HorizonsSeries::MoonBarycentric => ("301", "500@0"),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            HorizonsSeries::SunGeocentric => "sun-geocentric",
            HorizonsSeries::EarthBarycentric => "earth-barycentric",
            HorizonsSeries::MoonGeocentric => "moon-geocentric",
            HorizonsSeries::MoonBarycentric => "moon-barycentric",
        }
    }
}

/// HTTP GET returning the response body.
pub trait Transport {
    fn get(&self, url: &str) -> Result<String, String>;
}

/// Blocking client backed by `ureq`.
#[derive(Debug, Default, Clone, Copy)]
pub struct HttpTransport;

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<String, String> {
        let mut resp = ureq::get(url).call().map_err(|e| e.to_string())?;
        resp.body_mut().read_to_string().map_err(|e| e.to_string())
    }
}

pub const HORIZONS_API: &str = "https://ssd.jpl.nasa.gov/api/horizons.api";

/// Horizons API URL for a J2000 (ICRF frame) km-s vector table.
pub fn horizons_url(series: HorizonsSeries, jd_start: f64, jd_end: f64, step_days: u32) -> String {
    let (target, center) = series.target_center();
    let q = |v: &str| format!("%27{}%27", v.replace(' ', "%20"));
    format!(
        "{HORIZONS_API}?format=text&COMMAND={}&OBJ_DATA={}&MAKE_EPHEM={}&EPHEM_TYPE={}\
         &CENTER={}&START_TIME={}&STOP_TIME={}&STEP_SIZE={}&VEC_TABLE={}&REF_PLANE={}\
         &REF_SYSTEM={}&OUT_UNITS={}&CSV_FORMAT={}&VEC_LABELS={}",
        q(target),
        q("NO"),
        q("YES"),
        q("VECTORS"),
        q(center),
        q(&format!("JD{jd_start}")),
        q(&format!("JD{jd_end}")),
        q(&format!("{step_days} d")),
        q("2"),
        q("FRAME"),
        q("ICRF"),
        q("KM-S"),
        q("YES"),
        q("NO"),
    )
}

/// Disk-cached Horizons client.
pub struct HorizonsClient<T: Transport = HttpTransport> {
    transport: T,
    cache_dir: PathBuf,
}

impl HorizonsClient<HttpTransport> {
    pub fn new(cache_dir: impl Into<PathBuf>) -> Self {
        Self::with_transport(HttpTransport, cache_dir)
    }
}

impl<T: Transport> HorizonsClient<T> {
    pub fn with_transport(transport: T, cache_dir: impl Into<PathBuf>) -> Self {
        Self {
            transport,
            cache_dir: cache_dir.into(),
        }
    }

    pub fn cache_path(&self, series: HorizonsSeries, jd_start: f64, jd_end: f64, step_days: u32) -> PathBuf {
        self.cache_dir.join(format!(
            "horizons_{}_{jd_start}_{jd_end}_{step_days}d.txt",
            series.label()
        ))
    }

    /// Raw Horizons text for the request, served from the cache when present.
    pub fn fetch(
        &self,
        series: HorizonsSeries,
        jd_start: f64,
        jd_end: f64,
        step_days: u32,
    ) -> Result<String, EphemerisError> {
        if step_days < 1 {
            return Err(EphemerisError::Fetch("step must be at least one day".into()));
        }
        let path = self.cache_path(series, jd_start, jd_end, step_days);
        if path.exists() {
            return Ok(fs::read_to_string(&path)?);
        }
        let url = horizons_url(series, jd_start, jd_end, step_days);
        let text = self.transport.get(&url).map_err(EphemerisError::Fetch)?;
        if !text.contains("$$SOE") {
            let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
            return Err(format_err(series.label(), 1, format!("unexpected payload: {first}")));
        }
        write_atomic(&path, &text)?;
        Ok(text)
    }
}

/// Fetches one series over the given daily span (see [`HorizonsClient`]).
pub fn fetch_horizons(
    series: HorizonsSeries,
    jd_start: f64,
    jd_end: f64,
    step_days: u32,
    cache_dir: &Path,
) -> Result<String, EphemerisError> {
    HorizonsClient::new(cache_dir).fetch(series, jd_start, jd_end, step_days)
}

fn write_atomic(path: &Path, text: &str) -> Result<(), EphemerisError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Low-precision geocentric Sun position in J2000 axes, km.
///
/// Mean longitude and anomaly with a two-term equation of centre, the
/// distance series in AU, precession removed back to the J2000 equinox, and
/// rotation by the J2000 mean obliquity.
pub fn sun_position_analytic(epoch: Epoch) -> Vec3 {
    let n = epoch.jd() - J2000_JD;
    let mean_lon = 280.460 + 0.985_647_4 * n;
    let g = (357.528 + 0.985_600_3 * n).to_radians();
    let lambda_of_date = mean_lon + 1.915 * g.sin() + 0.020 * (2.0 * g).sin();
    // general precession, 50.29 arcsec per year
    let lambda = (lambda_of_date - 3.8246e-5 * n).to_radians();
    let dist_au = 1.000_14 - 0.016_71 * g.cos() - 0.000_14 * (2.0 * g).cos();
    let eps = 23.439_291_f64.to_radians();
    let r = dist_au * AU_KM;
    Vec3::new(
        r * lambda.cos(),
        r * eps.cos() * lambda.sin(),
        r * eps.sin() * lambda.sin(),
    )
}

/// Sun/Earth/Moon positions at one epoch. Only the geocentric Sun enters the
/// SRP force; the other vectors are carried when the source supplies them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EphemerisRecord {
    pub epoch: Epoch,
    pub sun_geocentric: Vec3,
    pub earth_barycentric: Option<Vec3>,
    pub moon_geocentric: Option<Vec3>,
    pub moon_barycentric: Option<Vec3>,
}

/// Satellite-relative vectors r − R for each body position on a record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeVectors {
    pub from_sun_geocentric: Vec3,
    pub from_earth_barycentric: Option<Vec3>,
    pub from_moon_geocentric: Option<Vec3>,
    pub from_moon_barycentric: Option<Vec3>,
}

impl EphemerisRecord {
    pub fn relative_to(&self, r_sat: &Vec3) -> RelativeVectors {
        RelativeVectors {
            from_sun_geocentric: r_sat - self.sun_geocentric,
            from_earth_barycentric: self.earth_barycentric.map(|p| r_sat - p),
            from_moon_geocentric: self.moon_geocentric.map(|p| r_sat - p),
            from_moon_barycentric: self.moon_barycentric.map(|p| r_sat - p),
        }
    }
}

/// Time-ordered ephemeris records with strictly increasing epochs.
#[derive(Debug, Clone, PartialEq)]
pub struct EphemerisTable {
    records: Vec<EphemerisRecord>,
}

fn align(
    label: &str,
    sun: &[BodyPosition],
    other: Option<Vec<BodyPosition>>,
) -> Result<Vec<Option<Vec3>>, EphemerisError> {
    match other {
        None => Ok(vec![None; sun.len()]),
        Some(series) => {
            if series.len() != sun.len()
                || series
                    .iter()
                    .zip(sun)
                    .any(|(a, b)| (a.epoch.jd() - b.epoch.jd()).abs() > 1e-6)
            {
                return Err(EphemerisError::Misaligned(label.to_string()));
            }
            Ok(series.into_iter().map(|p| Some(p.position)).collect())
        }
    }
}

impl EphemerisTable {
    pub fn new(records: Vec<EphemerisRecord>) -> Result<Self, EphemerisError> {
        if records.len() < 2 {
            return Err(EphemerisError::TooFew(records.len()));
        }
        for (i, w) in records.windows(2).enumerate() {
            if w[1].epoch.jd() <= w[0].epoch.jd() {
                return Err(EphemerisError::Ordering {
                    body: "table".into(),
                    line: i + 2,
                    jd: w[1].epoch.jd(),
                });
            }
        }
        Ok(Self { records })
    }

    /// Builds a table from a geocentric Sun series plus optional companion
    /// series sampled at the same epochs.
    pub fn from_series(
        sun: Vec<BodyPosition>,
        earth_barycentric: Option<Vec<BodyPosition>>,
        moon_geocentric: Option<Vec<BodyPosition>>,
        moon_barycentric: Option<Vec<BodyPosition>>,
    ) -> Result<Self, EphemerisError> {
        let eb = align("earth-barycentric", &sun, earth_barycentric)?;
        let mg = align("moon-geocentric", &sun, moon_geocentric)?;
        let mb = align("moon-barycentric", &sun, moon_barycentric)?;
        let records = sun
            .iter()
            .enumerate()
            .map(|(i, s)| EphemerisRecord {
                epoch: s.epoch,
                sun_geocentric: s.position,
                earth_barycentric: eb[i],
                moon_geocentric: mg[i],
                moon_barycentric: mb[i],
            })
            .collect();
        Self::new(records)
    }

    /// Daily (or `step_days`) table from the analytic solar model, inclusive
    /// of both ends.
    pub fn analytic(start: Epoch, end: Epoch, step_days: f64) -> Result<Self, EphemerisError> {
        let count = ((end.jd() - start.jd()) / step_days + 1e-9).floor() as usize + 1;
        let records = (0..count)
            .map(|k| {
                let epoch = start.plus_seconds(k as f64 * step_days * SECONDS_PER_DAY);
                EphemerisRecord {
                    epoch,
                    sun_geocentric: sun_position_analytic(epoch),
                    earth_barycentric: None,
                    moon_geocentric: None,
                    moon_barycentric: None,
                }
            })
            .collect();
        Self::new(records)
    }

    pub fn records(&self) -> &[EphemerisRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// First and last epoch.
    pub fn span(&self) -> (Epoch, Epoch) {
        (self.records[0].epoch, self.records[self.records.len() - 1].epoch)
    }

    /// Componentwise linear interpolation; no extrapolation.
    pub fn interpolate(&self, epoch: Epoch) -> Result<EphemerisRecord, EphemerisError> {
        let (start, end) = self.span();
        let t = epoch.jd();
        if t < start.jd() || t > end.jd() {
            return Err(EphemerisError::OutOfRange {
                jd: t,
                start: start.jd(),
                end: end.jd(),
            });
        }
        let hi = self.records.partition_point(|r| r.epoch.jd() < t);
        if self.records[hi].epoch.jd() == t {
            return Ok(self.records[hi]);
        }
        let (p, q) = (&self.records[hi - 1], &self.records[hi]);
        let frac = (t - p.epoch.jd()) / (q.epoch.jd() - p.epoch.jd());
        let lerp = |a: Vec3, b: Vec3| a + (b - a) * frac;
        let lerp_opt = |a: Option<Vec3>, b: Option<Vec3>| match (a, b) {
            (Some(a), Some(b)) => Some(lerp(a, b)),
            _ => None,
        };
        Ok(EphemerisRecord {
            epoch,
            sun_geocentric: lerp(p.sun_geocentric, q.sun_geocentric),
            earth_barycentric: lerp_opt(p.earth_barycentric, q.earth_barycentric),
            moon_geocentric: lerp_opt(p.moon_geocentric, q.moon_geocentric),
            moon_barycentric: lerp_opt(p.moon_barycentric, q.moon_barycentric),
        })
    }
}

/// Cylindrical Earth shadow: 0 when the satellite is behind the Earth and
/// within one Earth radius of the anti-Sun axis, 1 otherwise.
pub fn shadow_factor(r_sat: &Vec3, r_sun_geo: &Vec3) -> u8 {
    let sun_hat = r_sun_geo.normalize();
    let along = r_sat.dot(&sun_hat);
    if along >= 0.0 {
        return 1;
    }
    let perp = (r_sat - along * sun_hat).norm();
    if perp < R_EARTH {
        0
    } else {
        1
    }
}

//! Time scales and Earth rotation.
//!
//! A single time scale is used throughout: Julian Dates are treated as UTC
//! and TDB interchangeably. The inertial frame is J2000 with fixed axes and
//! the Earth-fixed frame is reached by a rotation through GMST.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Earth gravitational parameter, km^3/s^2.
pub const MU_EARTH: f64 = 398_600.4418;
/// Equatorial Earth radius, km. The toolkit uses a spherical Earth.
pub const R_EARTH: f64 = 6378.137;
/// Astronomical unit, km.
pub const AU_KM: f64 = 1.495_978_707e8;
/// Solar radiation pressure at 1 AU, N/m^2.
pub const P0_SOLAR: f64 = 4.56e-6;

pub const SECONDS_PER_DAY: f64 = 86_400.0;
/// Length of one sidereal day in SI seconds.
pub const SIDEREAL_DAY_S: f64 = 86_164.0905;
/// Julian Date of the J2000 epoch, 2000-01-01 12:00:00.
pub const J2000_JD: f64 = 2_451_545.0;

/// Physical constants bundled for callers that want them as a value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConstants {
    pub mu_earth: f64,
    pub r_earth: f64,
    pub au: f64,
    pub p0: f64,
}

impl FrameConstants {
    pub const STANDARD: FrameConstants = FrameConstants {
        mu_earth: MU_EARTH,
        r_earth: R_EARTH,
        au: AU_KM,
        p0: P0_SOLAR,
    };
}

impl Default for FrameConstants {
    fn default() -> Self {
        Self::STANDARD
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TimeError {
    #[error("invalid date {0}")]
    InvalidDate(String),
    #[error("julian date {0} outside the supported range")]
    OutOfRange(f64),
    #[error("cannot parse epoch `{0}` (expected YYYY-MM-DDThh:mm:ss or a julian date)")]
    Parse(String),
}

/// An instant on the Julian Date axis, in days.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Epoch {
    jd: f64,
}

/// Broken-down Gregorian calendar instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calendar {
    pub year: i32,
    pub month: u32,
    pub day: u32,
    pub hour: u32,
    pub minute: u32,
    pub second: f64,
}

fn days_in_month(year: i32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 => {
            let leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
            if leap {
                29
            } else {
                28
            }
        }
        _ => 0,
    }
}

/// Julian Day Number of a Gregorian date (Fliegel and Van Flandern).
fn julian_day_number(year: i32, month: u32, day: u32) -> i64 {
    let (y, m, d) = (year as i64, month as i64, day as i64);
    let a = (m - 14) / 12;
    (1461 * (y + 4800 + a)) / 4 + (367 * (m - 2 - 12 * a)) / 12
        - (3 * ((y + 4900 + a) / 100)) / 4
        + d
        - 32075
}

fn gregorian_from_jdn(jdn: i64) -> (i32, u32, u32) {
    let mut l = jdn + 68569;
    let n = 4 * l / 146_097;
    l -= (146_097 * n + 3) / 4;
    let i = 4000 * (l + 1) / 1_461_001;
    l = l - 1461 * i / 4 + 31;
    let j = 80 * l / 2447;
    let day = l - 2447 * j / 80;
    l = j / 11;
    let month = j + 2 - 12 * l;
    let year = 100 * (n - 49) + i + l;
    (year as i32, month as u32, day as u32)
}

/// Converts a Gregorian calendar instant to a Julian Date.
pub fn calendar_to_jd(
    year: i32,
    month: u32,
    day: u32,
    hour: u32,
    minute: u32,
    second: f64,
) -> Result<Epoch, TimeError> {
    let bad = || {
        TimeError::InvalidDate(format!(
            "{year:04}-{month:02}-{day:02} {hour:02}:{minute:02}:{second}"
        ))
    };
    if !(1950..=2150).contains(&year) || !(1..=12).contains(&month) {
        return Err(bad());
    }
    if day == 0 || day > days_in_month(year, month) {
        return Err(bad());
    }
    if hour > 23 || minute > 59 || !(0.0..60.0).contains(&second) {
        return Err(bad());
    }
    let jdn = julian_day_number(year, month, day);
    let day_fraction =
        (hour as f64 * 3600.0 + minute as f64 * 60.0 + second) / SECONDS_PER_DAY;
    Ok(Epoch {
        jd: jdn as f64 - 0.5 + day_fraction,
    })
}

impl Epoch {
    pub const J2000: Epoch = Epoch { jd: J2000_JD };

    pub fn from_jd(jd: f64) -> Result<Self, TimeError> {
        if !jd.is_finite() || jd <= 2_400_000.0 {
            return Err(TimeError::OutOfRange(jd));
        }
        Ok(Self { jd })
    }

    /// Julian Date in days.
    pub fn jd(self) -> f64 {
        self.jd
    }

    /// A later (or earlier, for negative input) epoch.
    pub fn plus_seconds(self, seconds: f64) -> Epoch {
        Epoch {
            jd: self.jd + seconds / SECONDS_PER_DAY,
        }
    }

    /// Signed separation `self - earlier` in seconds.
    pub fn seconds_since(self, earlier: Epoch) -> f64 {
        (self.jd - earlier.jd) * SECONDS_PER_DAY
    }

    pub fn to_calendar(self) -> Calendar {
        let shifted = self.jd + 0.5;
        let jdn = shifted.floor();
        let seconds_of_day = (shifted - jdn) * SECONDS_PER_DAY;
        let (year, month, day) = gregorian_from_jdn(jdn as i64);
        let hour = (seconds_of_day / 3600.0).floor().min(23.0);
        let minute = ((seconds_of_day - hour * 3600.0) / 60.0).floor().min(59.0);
        let second = seconds_of_day - hour * 3600.0 - minute * 60.0;
        Calendar {
            year,
            month,
            day,
            hour: hour as u32,
            minute: minute as u32,
            second,
        }
    }

    /// ISO-8601 text rounded to the nearest whole second.
    pub fn to_iso(self) -> String {
        let shifted = self.jd + 0.5;
        let mut jdn = shifted.floor() as i64;
        let mut sod = ((shifted - shifted.floor()) * SECONDS_PER_DAY).round() as i64;
        if sod >= 86_400 {
            sod -= 86_400;
            jdn += 1;
        }
        let (y, m, d) = gregorian_from_jdn(jdn);
        format!(
            "{y:04}-{m:02}-{d:02}T{:02}:{:02}:{:02}",
            sod / 3600,
            (sod % 3600) / 60,
            sod % 60
        )
    }
}

impl fmt::Display for Epoch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_iso())
    }
}

/// Accepts `YYYY-MM-DDThh:mm:ss` (fractional seconds allowed) or a raw
/// decimal Julian Date.
impl FromStr for Epoch {
    type Err = TimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = || TimeError::Parse(s.to_string());
        if let Ok(jd) = s.parse::<f64>() {
            return Epoch::from_jd(jd);
        }
        let (date, time) = s.split_once(['T', ' ']).unwrap_or((s, "00:00:00"));
        let time = time.trim_end_matches('Z');
        let mut dp = date.splitn(3, '-');
        let year: i32 = dp.next().and_then(|v| v.parse().ok()).ok_or_else(err)?;
        let month: u32 = dp.next().and_then(|v| v.parse().ok()).ok_or_else(err)?;
        let day: u32 = dp.next().and_then(|v| v.parse().ok()).ok_or_else(err)?;
        let mut tp = time.splitn(3, ':');
        let hour: u32 = tp.next().and_then(|v| v.parse().ok()).ok_or_else(err)?;
        let minute: u32 = tp.next().and_then(|v| v.parse().ok()).ok_or_else(err)?;
        let second: f64 = match tp.next() {
            Some(v) => v.parse().map_err(|_| err())?,
            None => 0.0,
        };
        calendar_to_jd(year, month, day, hour, minute, second)
    }
}

/// Greenwich Mean Sidereal Time in radians, normalized to `[0, 2π)`.
///
/// Linear IAU-1982 model: constant plus the daily rate, no higher-order terms.
pub fn gmst(epoch: Epoch) -> f64 {
    let d = epoch.jd - J2000_JD;
    // 360.98564736629 deg/day split so the whole-turn part never grows large
    let deg = 280.460_618_37 + 360.0 * (d - d.floor()) + 0.985_647_366_29 * d;
    normalize_angle(deg.to_radians())
}

/// Wraps an angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j2000_definition() {
        let e = calendar_to_jd(2000, 1, 1, 12, 0, 0.0).unwrap();
        assert_eq!(e.jd(), 2_451_545.0);
    }

    #[test]
    fn campaign_dates() {
        let start = calendar_to_jd(2022, 11, 22, 0, 0, 0.0).unwrap();
        let end = calendar_to_jd(2023, 11, 22, 0, 0, 0.0).unwrap();
        assert_eq!(start.jd(), 2_459_905.5);
        assert_eq!(end.jd(), 2_460_270.5);
    }

    #[test]
    fn invalid_dates_rejected() {
        assert!(calendar_to_jd(2023, 2, 29, 0, 0, 0.0).is_err());
        assert!(calendar_to_jd(2024, 13, 1, 0, 0, 0.0).is_err());
        assert!(calendar_to_jd(2024, 4, 31, 0, 0, 0.0).is_err());
        assert!(calendar_to_jd(1900, 1, 1, 0, 0, 0.0).is_err());
        assert!(calendar_to_jd(2024, 2, 29, 0, 0, 0.0).is_ok());
    }

    #[test]
    fn gmst_at_j2000() {
        let deg = gmst(Epoch::J2000).to_degrees();
        assert!((deg - 280.460_618_37).abs() < 1e-3, "{deg}");
    }

    #[test]
    fn gmst_repeats_after_sidereal_day() {
        let e0 = Epoch::J2000;
        let e1 = e0.plus_seconds(SIDEREAL_DAY_S);
        let diff = (gmst(e1) - gmst(e0)).to_degrees();
        let wrapped = (diff + 180.0).rem_euclid(360.0) - 180.0;
        assert!(wrapped.abs() < 0.01, "{wrapped}");
    }

    #[test]
    fn parse_iso_and_jd() {
        let a: Epoch = "2022-11-22T00:00:00".parse().unwrap();
        assert_eq!(a.jd(), 2_459_905.5);
        let b: Epoch = "2459905.5".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_iso(), "2022-11-22T00:00:00");
        assert!("2022-11-xx".parse::<Epoch>().is_err());
        assert!("12".parse::<Epoch>().is_err());
    }

    #[test]
    fn iso_rounding_carries_into_next_day() {
        let e = Epoch::from_jd(2_459_906.5 - 0.2 / SECONDS_PER_DAY).unwrap();
        assert_eq!(e.to_iso(), "2022-11-23T00:00:00");
    }
}

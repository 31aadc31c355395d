//! Two-line element sets: checksum, parsing, canonical formatting, and
//! conversion to Keplerian elements.
//!
//! Parsing first tries the fixed 69-column layout. When that fails (TLEs
//! copied from documents often have collapsed whitespace and missing line
//! numbers) a token-based fallback is used and the result carries warnings.
//! The checksum only depends on digits and minus signs, so it is still
//! verified on the fallback path, but a mismatch there is a warning.

use std::f64::consts::TAU;
use std::fmt;

use thiserror::Error;

use crate::kepler::{eccentric_to_true, solve_kepler, KeplerError, KeplerianElements};
use crate::timeframe::{calendar_to_jd, Epoch, MU_EARTH, SECONDS_PER_DAY};

const LINE_LEN: usize = 69;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TleError {
    #[error("line too short for checksum ({0} < 68 columns)")]
    TooShort(usize),
    #[error("line {line}: {msg}")]
    Format { line: u8, msg: String },
    #[error("line {line}: checksum mismatch (computed {computed}, found {found})")]
    Checksum { line: u8, computed: u8, found: u8 },
    #[error("expected two element lines, found {0}")]
    LineCount(usize),
    #[error(transparent)]
    Elements(#[from] KeplerError),
}

fn fmt_err(line: u8, msg: impl Into<String>) -> TleError {
    TleError::Format {
        line,
        msg: msg.into(),
    }
}

/// Standard TLE checksum: sum of digits plus one per minus sign over the
/// first 68 columns, modulo 10.
pub fn tle_checksum(line: &str) -> Result<u8, TleError> {
    let len = line.chars().count();
    if len < 68 {
        return Err(TleError::TooShort(len));
    }
    Ok(checksum_of(line.chars().take(68)))
}

fn checksum_of(chars: impl Iterator<Item = char>) -> u8 {
    let sum: u32 = chars
        .map(|c| match c {
            '0'..='9' => c as u32 - '0' as u32,
            '-' => 1,
            _ => 0,
        })
        .sum();
    (sum % 10) as u8
}

/// Decodes an implied-leading-decimal field such as `0001715` → 0.0001715.
pub fn decode_implied_decimal(field: &str) -> Option<f64> {
    let field = field.trim();
    if field.is_empty() || !field.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    format!("0.{field}").parse().ok()
}

/// Decodes an implied-decimal exponent field such as `-37321-3` → −0.37321e-3.
pub fn decode_exponent_field(field: &str) -> Option<f64> {
    let field = field.trim();
    let (sign, rest) = match field.as_bytes().first()? {
        b'-' => (-1.0, &field[1..]),
        b'+' => (1.0, &field[1..]),
        _ => (1.0, field),
    };
    let split = rest.rfind(['-', '+'])?;
    let mantissa: f64 = format!("0.{}", &rest[..split]).parse().ok()?;
    let exponent: i32 = rest[split..].parse().ok()?;
    Some(sign * mantissa * 10f64.powi(exponent))
}

/// Which parser produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseMode {
    Strict,
    Tolerant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TleRecord {
    pub catalog_number: u32,
    pub classification: char,
    pub intl_designator: String,
    /// Four-digit epoch year after the 57 pivot.
    pub epoch_year: i32,
    /// Day of year with fraction, 1-based.
    pub epoch_day: f64,
    pub epoch: Epoch,
    /// First derivative of mean motion, as printed.
    pub mean_motion_dot: String,
    /// Second derivative of mean motion, as printed.
    pub mean_motion_ddot: String,
    /// Drag term, as printed; never used in propagation.
    pub bstar: String,
    pub ephemeris_type: char,
    pub element_set: u32,
    /// Degrees.
    pub inclination: f64,
    /// Degrees.
    pub raan: f64,
    pub eccentricity: f64,
    /// Degrees.
    pub argp: f64,
    /// Degrees.
    pub mean_anomaly: f64,
    /// Revolutions per day.
    pub mean_motion: f64,
    pub rev_number: u32,
    /// Checksum digits as found at the end of line 1 and line 2.
    pub line_checksums: [u8; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTle {
    pub record: TleRecord,
    pub mode: ParseMode,
    pub warnings: Vec<String>,
}

fn epoch_from_tle(yy: u32, day: f64) -> Result<(i32, Epoch), TleError> {
    let year = if yy < 57 { 2000 + yy as i32 } else { 1900 + yy as i32 };
    if !(1.0..367.0).contains(&day) {
        return Err(fmt_err(1, format!("epoch day {day} out of range")));
    }
    let jan1 = calendar_to_jd(year, 1, 1, 0, 0, 0.0).map_err(|e| fmt_err(1, e.to_string()))?;
    Ok((year, jan1.plus_seconds((day - 1.0) * SECONDS_PER_DAY)))
}

fn num<T: std::str::FromStr>(line: u8, what: &str, s: &str) -> Result<T, TleError> {
    s.trim()
        .parse()
        .map_err(|_| fmt_err(line, format!("malformed {what} `{}`", s.trim())))
}

fn digit(line: u8, c: char) -> Result<u8, TleError> {
    c.to_digit(10)
        .map(|d| d as u8)
        .ok_or_else(|| fmt_err(line, format!("checksum `{c}` is not a digit")))
}

fn split_epoch(line: u8, field: &str) -> Result<(u32, f64), TleError> {
    let field = field.trim();
    if field.len() < 3 {
        return Err(fmt_err(line, format!("malformed epoch `{field}`")));
    }
    let yy = num(line, "epoch year", &field[..2])?;
    let day = num(line, "epoch day", &field[2..])?;
    Ok((yy, day))
}

fn eccentricity(line: u8, field: &str) -> Result<f64, TleError> {
    decode_implied_decimal(field)
        .ok_or_else(|| fmt_err(line, format!("malformed eccentricity `{}`", field.trim())))
}

fn parse_strict(l1: &str, l2: &str) -> Result<TleRecord, TleError> {
    for (n, l) in [(1u8, l1), (2u8, l2)] {
        if !l.is_ascii() {
            return Err(fmt_err(n, "non-ASCII characters"));
        }
        if l.len() != LINE_LEN {
            return Err(fmt_err(n, format!("expected {LINE_LEN} columns, found {}", l.len())));
        }
        let expected = if n == 1 { "1 " } else { "2 " };
        if &l[..2] != expected {
            return Err(fmt_err(n, "missing line number"));
        }
    }
    let col = |l: &'_ str, a: usize, b: usize| -> String { l[a - 1..b].to_string() };

    let cat1: u32 = num(1, "catalog number", &col(l1, 3, 7))?;
    let cat2: u32 = num(2, "catalog number", &col(l2, 3, 7))?;
    if cat1 != cat2 {
        return Err(fmt_err(2, format!("catalog number {cat2} differs from line 1 ({cat1})")));
    }
    let (yy, day) = split_epoch(1, &col(l1, 19, 32))?;
    let (epoch_year, epoch) = epoch_from_tle(yy, day)?;

    let ck1 = digit(1, l1.as_bytes()[68] as char)?;
    let ck2 = digit(2, l2.as_bytes()[68] as char)?;
    for (n, l, found) in [(1u8, l1, ck1), (2u8, l2, ck2)] {
        let computed = tle_checksum(l)?;
        if computed != found {
            return Err(TleError::Checksum {
                line: n,
                computed,
                found,
            });
        }
    }

    Ok(TleRecord {
        catalog_number: cat1,
        classification: l1.as_bytes()[7] as char,
        intl_designator: col(l1, 10, 17).trim().to_string(),
        epoch_year,
        epoch_day: day,
        epoch,
        mean_motion_dot: col(l1, 34, 43).trim().to_string(),
        mean_motion_ddot: col(l1, 45, 52).trim().to_string(),
        bstar: col(l1, 54, 61).trim().to_string(),
        ephemeris_type: l1.as_bytes()[62] as char,
        element_set: num(1, "element set number", &col(l1, 65, 68))?,
        inclination: num(2, "inclination", &col(l2, 9, 16))?,
        raan: num(2, "right ascension", &col(l2, 18, 25))?,
        eccentricity: eccentricity(2, &col(l2, 27, 33))?,
        argp: num(2, "argument of perigee", &col(l2, 35, 42))?,
        mean_anomaly: num(2, "mean anomaly", &col(l2, 44, 51))?,
        mean_motion: num(2, "mean motion", &col(l2, 53, 63))?,
        rev_number: num(2, "revolution number", &col(l2, 64, 68))?,
        line_checksums: [ck1, ck2],
    })
}

/// Splits a trailing `<number><checksum digit>` token.
fn split_trailing_checksum<'a>(line: u8, token: &'a str) -> Result<(&'a str, u8), TleError> {
    let (body, ck) = token.split_at(token.len() - 1);
    let ck = digit(line, ck.chars().next().unwrap_or(' '))?;
    Ok((body, ck))
}

fn tokens_without_line_number<'a>(line: &'a str, number: &str) -> Vec<&'a str> {
    let mut tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.first() == Some(&number) {
        tokens.remove(0);
    }
    tokens
}

fn parse_tolerant(l1: &str, l2: &str, warnings: &mut Vec<String>) -> Result<TleRecord, TleError> {
    let t1 = tokens_without_line_number(l1, "1");
    let mut t2 = tokens_without_line_number(l2, "2");

    // 7 tokens: designator absent; 8 tokens: full line 1
    let (head, intl, rest) = match t1.len() {
        8 => (t1[0], t1[1], &t1[2..]),
        7 => (t1[0], "", &t1[1..]),
        n => return Err(fmt_err(1, format!("expected 7 or 8 fields, found {n}"))),
    };
    let class_pos = head
        .find(|c: char| !c.is_ascii_digit())
        .ok_or_else(|| fmt_err(1, format!("missing classification in `{head}`")))?;
    let cat1: u32 = num(1, "catalog number", &head[..class_pos])?;
    let classification = head[class_pos..].chars().next().unwrap_or('U');
    let (yy, day) = split_epoch(1, rest[0])?;
    let (epoch_year, epoch) = epoch_from_tle(yy, day)?;
    let ephemeris_type = rest[4].chars().next().unwrap_or('0');
    let (elset, ck1) = split_trailing_checksum(1, rest[5])?;
    let element_set = if elset.is_empty() { 0 } else { num(1, "element set number", elset)? };

    // mean motion and a five-digit revolution number can run together
    if t2.len() == 7 && t2[6].len() > 12 {
        let merged = t2.pop().unwrap();
        let (mm, rev) = merged.split_at(11);
        t2.push(mm);
        t2.push(rev);
    }
    if t2.len() != 8 {
        return Err(fmt_err(2, format!("expected 8 fields, found {}", t2.len())));
    }
    let cat2: u32 = num(2, "catalog number", t2[0])?;
    if cat1 != cat2 {
        return Err(fmt_err(2, format!("catalog number {cat2} differs from line 1 ({cat1})")));
    }
    let (rev, ck2) = split_trailing_checksum(2, t2[7])?;
    let rev_number = if rev.is_empty() { 0 } else { num(2, "revolution number", rev)? };

    for (n, tokens, found) in [(1u8, &t1, ck1), (2u8, &t2, ck2)] {
        let prefix = if n == 1 { '1' } else { '2' };
        let body = tokens.iter().flat_map(|t| t.chars());
        let computed = checksum_of(std::iter::once(prefix).chain(body)) as u32;
        // the checksum digit itself was included in the token sum
        let computed = ((computed + 10 - found as u32) % 10) as u8;
        if computed != found {
            warnings.push(format!(
                "line {n}: checksum mismatch (computed {computed}, found {found}); \
                 lines were whitespace-normalized"
            ));
        }
    }

    Ok(TleRecord {
        catalog_number: cat1,
        classification,
        intl_designator: intl.to_string(),
        epoch_year,
        epoch_day: day,
        epoch,
        mean_motion_dot: rest[1].to_string(),
        mean_motion_ddot: rest[2].to_string(),
        bstar: rest[3].to_string(),
        ephemeris_type,
        element_set,
        inclination: num(2, "inclination", t2[1])?,
        raan: num(2, "right ascension", t2[2])?,
        eccentricity: eccentricity(2, t2[3])?,
        argp: num(2, "argument of perigee", t2[4])?,
        mean_anomaly: num(2, "mean anomaly", t2[5])?,
        mean_motion: num(2, "mean motion", t2[6])?,
        rev_number,
        line_checksums: [ck1, ck2],
    })
}

fn validate(rec: &TleRecord) -> Result<(), TleError> {
    if !(rec.mean_motion > 0.0) {
        return Err(fmt_err(2, format!("mean motion {} must be positive", rec.mean_motion)));
    }
    if !(0.0..1.0).contains(&rec.eccentricity) {
        return Err(fmt_err(2, format!("eccentricity {} outside [0, 1)", rec.eccentricity)));
    }
    Ok(())
}

/// Parses a two-line element set.
///
/// A checksum mismatch is an error for column-exact input and a warning
/// when the lines had to be tokenized.
pub fn parse_tle(line1: &str, line2: &str) -> Result<ParsedTle, TleError> {
    let l1 = line1.trim_end_matches(['\r', '\n', ' ']);
    let l2 = line2.trim_end_matches(['\r', '\n', ' ']);
    let strict = parse_strict(l1, l2);
    let (record, mode, warnings) = match strict {
        Ok(rec) => (rec, ParseMode::Strict, Vec::new()),
        Err(e @ TleError::Checksum { .. }) => return Err(e),
        Err(strict_err) => {
            let mut warnings = vec![format!(
                "column layout rejected ({strict_err}); parsed by whitespace tokens"
            )];
            let rec = parse_tolerant(l1.trim(), l2.trim(), &mut warnings)?;
            (rec, ParseMode::Tolerant, warnings)
        }
    };
    validate(&record)?;
    Ok(ParsedTle {
        record,
        mode,
        warnings,
    })
}

/// Reads a 2- or 3-line TLE document, returning the optional name line.
pub fn read_tle_text(text: &str) -> Result<(Option<String>, ParsedTle), TleError> {
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    match lines.len() {
        2 => Ok((None, parse_tle(lines[0], lines[1])?)),
        3 => Ok((
            Some(lines[0].trim().trim_start_matches("0 ").to_string()),
            parse_tle(lines[1], lines[2])?,
        )),
        n => Err(TleError::LineCount(n)),
    }
}

impl TleRecord {
    /// Canonical 69-column lines with recomputed checksums.
    pub fn to_lines(&self) -> (String, String) {
        let mut l1 = format!(
            "1 {:05}{} {:<8} {:02}{:012.8} {:>10} {:>8} {:>8} {} {:>4}",
            self.catalog_number,
            self.classification,
            self.intl_designator,
            self.epoch_year % 100,
            self.epoch_day,
            self.mean_motion_dot,
            self.mean_motion_ddot,
            self.bstar,
            self.ephemeris_type,
            self.element_set,
        );
        let ecc = format!("{:07}", (self.eccentricity * 1e7).round() as u64);
        let mut l2 = format!(
            "2 {:05} {:8.4} {:8.4} {} {:8.4} {:8.4} {:11.8}{:5}",
            self.catalog_number,
            self.inclination,
            self.raan,
            ecc,
            self.argp,
            self.mean_anomaly,
            self.mean_motion,
            self.rev_number,
        );
        let c1 = checksum_of(l1.chars());
        let c2 = checksum_of(l2.chars());
        l1.push(char::from(b'0' + c1));
        l2.push(char::from(b'0' + c2));
        (l1, l2)
    }

    /// Semi-major axis from mean motion via Kepler's third law, km.
    pub fn semi_major_axis(&self) -> f64 {
        let period = SECONDS_PER_DAY / self.mean_motion;
        (MU_EARTH * (period / TAU).powi(2)).cbrt()
    }
}

impl fmt::Display for TleRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l1, l2) = self.to_lines();
        write!(f, "{l1}\n{l2}")
    }
}

/// Converts a TLE to osculating-equivalent two-body elements.
///
/// Pure Keplerian mean motion is used for the semi-major axis, with no
/// SGP4 recovery.
pub fn tle_to_elements(rec: &TleRecord) -> Result<KeplerianElements, TleError> {
    let e = rec.eccentricity;
    let ecc_anomaly = solve_kepler(rec.mean_anomaly.to_radians(), e)?;
    let true_anomaly = eccentric_to_true(ecc_anomaly, e)?;
    Ok(KeplerianElements::new(
        rec.semi_major_axis(),
        e,
        rec.inclination.to_radians(),
        rec.raan.to_radians(),
        rec.argp.to_radians(),
        true_anomaly,
        rec.epoch,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const STARLINK_L1: &str = "53693U 22105AX 22255.91667824 -.00045150 00000-0 -37321-3 0 9991";
    const STARLINK_L2: &str = "53693 97.6562 134.0486 0001715 125.8937 299.3955 15.70295930 1305";

    #[test]
    fn checksum_trivial_lines() {
        let zeros = format!("{:0<40}{:28}", "", "");
        assert_eq!(tle_checksum(&zeros).unwrap(), 0);
        let one = format!("1{:67}", "");
        assert_eq!(tle_checksum(&one).unwrap(), 1);
        assert_eq!(tle_checksum("1 2 3"), Err(TleError::TooShort(5)));
    }

    #[test]
    fn checksum_hand_sum_of_line2() {
        // digits of line 2 with its line number restored sum to 225
        let parsed = parse_tle(STARLINK_L1, STARLINK_L2).unwrap();
        let (_, canonical_l2) = parsed.record.to_lines();
        assert_eq!(tle_checksum(&canonical_l2).unwrap(), 5);
        assert_eq!(parsed.record.line_checksums, [1, 5]);
    }

    #[test]
    fn starlink_lines_parse_tolerantly() {
        let parsed = parse_tle(STARLINK_L1, STARLINK_L2).unwrap();
        assert_eq!(parsed.mode, ParseMode::Tolerant);
        // only the layout warning; checksums agree
        assert_eq!(parsed.warnings.len(), 1, "{:?}", parsed.warnings);
        let r = &parsed.record;
        assert_eq!(r.catalog_number, 53693);
        assert_eq!(r.intl_designator, "22105AX");
        assert_eq!(r.classification, 'U');
        assert_eq!(r.inclination, 97.6562);
        assert_eq!(r.raan, 134.0486);
        assert_eq!(r.eccentricity, 0.0001715);
        assert_eq!(r.argp, 125.8937);
        assert_eq!(r.mean_anomaly, 299.3955);
        assert_eq!(r.mean_motion, 15.70295930);
        assert_eq!(r.epoch_year, 2022);
        assert_eq!(r.epoch_day, 255.91667824);
        assert_eq!(r.element_set, 999);
        assert_eq!(r.rev_number, 130);
        assert_eq!(r.bstar, "-37321-3");
    }

    #[test]
    fn strict_parse_of_canonical_lines() {
        let parsed = parse_tle(STARLINK_L1, STARLINK_L2).unwrap();
        let (l1, l2) = parsed.record.to_lines();
        assert_eq!(l1.len(), 69);
        assert_eq!(l2.len(), 69);
        let strict = parse_tle(&l1, &l2).unwrap();
        assert_eq!(strict.mode, ParseMode::Strict);
        assert!(strict.warnings.is_empty());
        assert_eq!(strict.record, parsed.record);
    }

    #[test]
    fn strict_checksum_mismatch_is_an_error() {
        let parsed = parse_tle(STARLINK_L1, STARLINK_L2).unwrap();
        let (l1, mut l2) = parsed.record.to_lines();
        l2.pop();
        l2.push('0');
        assert!(matches!(
            parse_tle(&l1, &l2),
            Err(TleError::Checksum { line: 2, .. })
        ));
    }

    #[test]
    fn tolerant_checksum_mismatch_is_a_warning() {
        let l2 = STARLINK_L2.replace("1305", "1304");
        let parsed = parse_tle(STARLINK_L1, &l2).unwrap();
        assert_eq!(parsed.warnings.len(), 2);
        assert!(parsed.warnings[1].contains("checksum"));
    }

    #[test]
    fn malformed_field_is_a_format_error() {
        let l2 = STARLINK_L2.replace("97.6562", "97.65x2");
        assert!(matches!(parse_tle(STARLINK_L1, &l2), Err(TleError::Format { line: 2, .. })));
    }

    #[test]
    fn epoch_pivot() {
        let (year, e) = epoch_from_tle(22, 255.91667824).unwrap();
        assert_eq!(year, 2022);
        let jan1 = calendar_to_jd(2022, 1, 1, 0, 0, 0.0).unwrap();
        assert!((e.jd() - jan1.jd() - 254.91667824).abs() < 1e-9);
        assert_eq!(epoch_from_tle(57, 1.0).unwrap().0, 1957);
        assert_eq!(epoch_from_tle(56, 1.0).unwrap().0, 2056);
    }

    #[test]
    fn implied_decimals() {
        assert_eq!(decode_implied_decimal("0001715"), Some(1715e-7));
        assert_eq!(decode_implied_decimal("0000000"), Some(0.0));
        assert_eq!(decode_implied_decimal("12a"), None);
        let b = decode_exponent_field("-37321-3").unwrap();
        assert!((b + 0.37321e-3).abs() < 1e-18);
        assert_eq!(decode_exponent_field("00000-0"), Some(0.0));
    }

    #[test]
    fn elements_from_starlink_tle() {
        let parsed = parse_tle(STARLINK_L1, STARLINK_L2).unwrap();
        let el = tle_to_elements(&parsed.record).unwrap();
        assert!((el.a - 6736.187_564).abs() < 1e-3, "{}", el.a);
        let f = el.true_anomaly.to_degrees();
        assert!((f - 299.3955).abs() < 0.02, "{f}");
        assert!((el.i.to_degrees() - 97.6562).abs() < 1e-12);
    }

    #[test]
    fn zero_eccentricity_gives_circular_elements() {
        let mut rec = parse_tle(STARLINK_L1, STARLINK_L2).unwrap().record;
        rec.eccentricity = decode_implied_decimal("0000000").unwrap();
        let el = tle_to_elements(&rec).unwrap();
        assert_eq!(el.e, 0.0);
        assert!((el.true_anomaly.to_degrees() - 299.3955).abs() < 1e-9);
    }

    #[test]
    fn three_line_document() {
        let text = format!("STARLINK-4566\n{STARLINK_L1}\n{STARLINK_L2}\n");
        let (name, parsed) = read_tle_text(&text).unwrap();
        assert_eq!(name.as_deref(), Some("STARLINK-4566"));
        assert_eq!(parsed.record.catalog_number, 53693);
        assert!(matches!(read_tle_text(STARLINK_L1), Err(TleError::LineCount(1))));
    }
}

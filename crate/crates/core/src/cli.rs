//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or format error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::ephemeris::{fetch_horizons, parse_horizons_vectors, EphemerisTable, HorizonsSeries};
use crate::geotrack::{
    ascending_node_times, find_passes, ground_track, passes_to_csv, revisit_report, split_segments,
    track_to_csv, track_to_geojson, GroundStation, TrackPoint, VisibilityCriterion,
};
use crate::kepler::{elements_to_state, read_elements_csv, KeplerianElements, ELEMENTS_CSV_HEADER};
use crate::mlreg::{
    generate_dataset, split_dataset, train, Dataset, ModelSet, DEFAULT_EPOCHS, DEFAULT_LR, DEFAULT_SEED,
    REFERENCE_U_DEG,
};
use crate::plot::{line_chart, Axes, Series};
use crate::propagator::{propagate, Trajectory};
use crate::srp::{
    km_s2_to_km_day2, perturb_sweep, srp_series_to_csv, srp_year_series, sweep_to_csv, SrpConfig, SrpPerturbation,
    SweepEntry, DEFAULT_EXPOSURE, DEFAULT_SWEEP_DT,
};
use crate::timeframe::{Epoch, SECONDS_PER_DAY};
use crate::tle::{read_tle_text, tle_to_elements, ParseMode};

#[derive(Debug, Parser)]
#[command(name = "leosrp", version, about = "LEO orbit, SRP perturbation and pass-planning toolkit")]
pub struct Cli {
    /// Directory for cached Horizons responses.
    #[arg(long, global = true, default_value = "ephem-cache")]
    pub ephem_cache: PathBuf,
    /// Propagation step, s.
    #[arg(long, global = true, default_value_t = 10.0)]
    pub dt: f64,
    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate an orbit and write its trajectory.
    Propagate(PropagateArgs),
    /// Sub-satellite track, optionally overlaid with a second orbit.
    Groundtrack(GroundtrackArgs),
    /// Ground-station passes and revisit statistics.
    Passes(PassesArgs),
    /// Two-line element sets.
    #[command(subcommand)]
    Tle(TleCommand),
    /// Solar radiation pressure.
    #[command(subcommand)]
    Srp(SrpCommand),
    /// Regression on SRP sweep datasets.
    #[command(subcommand)]
    Ml(MlCommand),
    /// Ephemeris to SRP to sweep to perturbed orbit to dataset to model.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct OrbitSource {
    /// Elements CSV (first data row is used).
    #[arg(long)]
    pub elements: Option<PathBuf>,
    /// Two- or three-line TLE file.
    #[arg(long)]
    pub tle: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PropagateArgs {
    #[command(flatten)]
    pub orbit: OrbitSource,
    #[arg(long, default_value_t = 24.0)]
    pub hours: f64,
    /// Add SRP, e.g. `emissivity=0.30,area=1.0,mass=15`.
    #[arg(long)]
    pub srp: Option<String>,
    /// Sun source for --srp: a Horizons/CSV file, `fetch`, or `analytic`.
    #[arg(long, default_value = "analytic")]
    pub ephem: String,
}

#[derive(Debug, Args)]
pub struct GroundtrackArgs {
    #[command(flatten)]
    pub orbit: OrbitSource,
    #[arg(long, default_value_t = 24.0)]
    pub hours: f64,
    /// Second elements CSV to overlay.
    #[arg(long)]
    pub compare: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PassesArgs {
    #[command(flatten)]
    pub orbit: OrbitSource,
    #[arg(long, default_value_t = 24.0)]
    pub hours: f64,
    /// `patiala`, `srinagar`, `bengaluru`, or `NAME:LAT:LON`; repeatable.
    #[arg(long = "station")]
    pub stations: Vec<String>,
    /// Mask angle, deg.
    #[arg(long, default_value_t = 5.0)]
    pub mask: f64,
    /// Gate passes by a nadir camera cone of this full angle (deg) instead of
    /// the mask angle.
    #[arg(long)]
    pub fov: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum TleCommand {
    /// Parse a TLE file and write its elements.
    Parse {
        file: PathBuf,
        /// Reject element sets that need the tolerant parser.
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShadowMode {
    Geometric,
    ForceLit,
}

#[derive(Debug, Args)]
pub struct YearArgs {
    /// Horizons/CSV file, `fetch`, or `analytic`.
    #[arg(long)]
    pub ephem: String,
    #[arg(long, default_value = "emissivity=0.30,area=1.0,mass=15")]
    pub config: String,
    #[arg(long, value_enum, default_value_t = ShadowMode::ForceLit)]
    pub shadow: ShadowMode,
    /// Satellite elements CSV; the built-in reference orbit otherwise.
    #[arg(long)]
    pub elements: Option<PathBuf>,
    /// First day (ISO date-time or JD).
    #[arg(long = "from", default_value = "2022-11-22T00:00:00")]
    pub from: String,
    #[arg(long, default_value_t = 365)]
    pub days: u32,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// First magnitude, km/day².
    #[arg(long, default_value_t = 0.00994)]
    pub start: f64,
    /// Increment, km/day².
    #[arg(long, default_value_t = 0.0001)]
    pub step: f64,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Fraction of an orbit, starting at u = -90°, over which SRP acts.
    #[arg(long, default_value_t = DEFAULT_EXPOSURE)]
    pub exposure: f64,
    /// Quadrature step for the inclination integral, s.
    #[arg(long, default_value_t = DEFAULT_SWEEP_DT)]
    pub quad_dt: f64,
}

#[derive(Debug, Subcommand)]
pub enum SrpCommand {
    /// Daily SRP acceleration over a year.
    Year(YearArgs),
    /// Inclination change over a range of SRP magnitudes.
    Sweep {
        #[arg(long)]
        elements: PathBuf,
        #[command(flatten)]
        sweep: SweepArgs,
    },
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, default_value_t = DEFAULT_LR)]
    pub lr: f64,
    #[arg(long, default_value_t = DEFAULT_EPOCHS)]
    pub epochs: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Training fraction.
    #[arg(long, default_value_t = 0.8)]
    pub ratio: f64,
}

#[derive(Debug, Subcommand)]
pub enum MlCommand {
    /// Train per-target regressors and report validation MAPE.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        opts: TrainArgs,
    },
    /// Predict x, y, z for one feature row.
    Predict {
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated `a_srp,area_to_mass,mass`.
        #[arg(long, allow_hyphen_values = true)]
        features: String,
    },
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub elements: PathBuf,
    /// Horizons/CSV file, `fetch`, or `analytic`.
    #[arg(long, default_value = "analytic")]
    pub ephem: String,
    #[arg(long, default_value = "emissivity=0.30,area=1.0,mass=15")]
    pub config: String,
    #[arg(long, value_enum, default_value_t = ShadowMode::ForceLit)]
    pub shadow: ShadowMode,
    #[arg(long = "from", default_value = "2022-11-22T00:00:00")]
    pub from: String,
    #[arg(long, default_value_t = 365)]
    pub days: u32,
    /// Length of the perturbed and unperturbed trajectories, h.
    #[arg(long, default_value_t = 24.0)]
    pub hours: f64,
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub train: TrainArgs,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) => f.write_str(m),
        }
    }
}

fn data_err(path: &Path, err: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {err}", path.display()))
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `argv` (program name first), runs the command, and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    if !(cli.dt > 0.0 && cli.dt.is_finite()) {
        return Err(usage(format!("--dt must be > 0, got {}", cli.dt)));
    }
    let ctx = Context { cli };
    match &cli.command {
        Command::Propagate(a) => ctx.propagate(a),
        Command::Groundtrack(a) => ctx.groundtrack(a),
        Command::Passes(a) => ctx.passes(a),
        Command::Tle(TleCommand::Parse { file, strict }) => ctx.tle_parse(file, *strict),
        Command::Srp(SrpCommand::Year(a)) => ctx.srp_year(a).map(|_| ()),
        Command::Srp(SrpCommand::Sweep { elements, sweep }) => {
            let el = load_elements(elements)?;
            ctx.sweep(&el, sweep).map(|_| ())
        }
        Command::Ml(MlCommand::Train { data, opts }) => {
            let text = read(data)?;
            let ds = Dataset::from_csv(&text).map_err(|e| data_err(data, e))?;
            ctx.train(&ds, opts).map(|_| ())
        }
        Command::Ml(MlCommand::Predict { model, features }) => ctx.predict(model, features),
        Command::Pipeline(a) => ctx.pipeline(a),
    }
}

/// The orbit used when no elements file is given.
pub fn reference_orbit() -> KeplerianElements {
    KeplerianElements::from_degrees(6928.18, 0.0, 98.6, 7.0, 180.0, 0.0, Epoch::from_jd(2_459_905.5).expect("valid epoch"))
        .expect("reference orbit is valid")
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| data_err(path, format!("cannot read: {e}")))
}

fn load_elements(path: &Path) -> Result<KeplerianElements, CliError> {
    let text = read(path)?;
    let all = read_elements_csv(&text).map_err(|e| data_err(path, e))?;
    all.into_iter()
        .next()
        .ok_or_else(|| data_err(path, "no element rows"))
}

fn load_orbit(src: &OrbitSource) -> Result<KeplerianElements, CliError> {
    match (&src.elements, &src.tle) {
        (Some(p), _) => load_elements(p),
        (None, Some(p)) => {
            let (_, parsed) = read_tle_text(&read(p)?).map_err(|e| data_err(p, e))?;
            for w in &parsed.warnings {
                eprintln!("warning: {}: {w}", p.display());
            }
            tle_to_elements(&parsed.record).map_err(|e| data_err(p, e))
        }
        (None, None) => Err(usage("one of --elements or --tle is required")),
    }
}

fn parse_epoch(s: &str) -> Result<Epoch, CliError> {
    s.parse::<Epoch>().map_err(|e| usage(format!("invalid epoch `{s}`: {e}")))
}

fn parse_config(s: &str) -> Result<SrpConfig, CliError> {
    s.parse::<SrpConfig>().map_err(|e| usage(format!("--config: {e}")))
}

fn check_hours(hours: f64) -> Result<f64, CliError> {
    if hours > 0.0 && hours.is_finite() {
        Ok(hours * 3600.0)
    } else {
        Err(usage(format!("--hours must be > 0, got {hours}")))
    }
}

fn parse_station(spec: &str, mask: f64) -> Result<GroundStation, CliError> {
    let make = |name: &str, lat: f64, lon: f64| {
        GroundStation::new(name, lat, lon, mask).map_err(|e| usage(format!("--station {spec}: {e}")))
    };
    match spec.to_ascii_lowercase().as_str() {
        "patiala" => {
            let s = GroundStation::patiala();
            make(&s.name, s.location.lat, s.location.lon)
        }
        "srinagar" => {
            let s = GroundStation::srinagar();
            make(&s.name, s.location.lat, s.location.lon)
        }
        "bengaluru" => {
            let s = GroundStation::bengaluru();
            make(&s.name, s.location.lat, s.location.lon)
        }
        _ => {
            let parts: Vec<&str> = spec.split(':').collect();
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| usage(format!("--station {spec}: `{s}` is not a number")));
            match parts.as_slice() {
                [name, lat, lon] => make(name, num(lat)?, num(lon)?),
                _ => Err(usage(format!("unknown station `{spec}` (use a known name or NAME:LAT:LON)"))),
            }
        }
    }
}

fn propagate_elements(el: &KeplerianElements, seconds: f64, dt: f64) -> Result<Trajectory, CliError> {
    propagate(&elements_to_state(el), seconds, dt.min(seconds), None).map_err(|e| CliError::Data(e.to_string()))
}

fn track_series(label: &str, track: &[TrackPoint]) -> Series {
    Series {
        label: label.to_string(),
        segments: split_segments(track)
            .into_iter()
            .map(|seg| seg.iter().map(|p| (p.point.lon, p.point.lat)).collect())
            .collect(),
    }
}

fn track_svg(title: &str, series: &[Series]) -> String {
    line_chart(
        &Axes {
            title: title.into(),
            x_label: "longitude (deg)".into(),
            y_label: "latitude (deg)".into(),
            bounds: Some((-180.0, 180.0, -90.0, 90.0)),
        },
        series,
    )
}

fn elements_csv(rows: impl IntoIterator<Item = KeplerianElements>) -> String {
    let mut out = String::from(ELEMENTS_CSV_HEADER);
    out.push('\n');
    for el in rows {
        out.push_str(&el.to_csv_row());
        out.push('\n');
    }
    out
}

struct Context<'a> {
    cli: &'a Cli,
}

impl Context<'_> {
    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let dir = &self.cli.out;
        fs::create_dir_all(dir).map_err(|e| data_err(dir, format!("cannot create: {e}")))?;
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|e| data_err(&path, format!("cannot write: {e}")))?;
        println!("wrote {}", path.display());
        Ok(path)
    }

    fn table(&self, source: &str, start: Epoch, end: Epoch) -> Result<EphemerisTable, CliError> {
        match source {
            "analytic" => EphemerisTable::analytic(start, end, 1.0).map_err(|e| CliError::Data(e.to_string())),
            "fetch" => {
                let cache = &self.cli.ephem_cache;
                let span = end.jd() - start.jd();
                let (jd0, jd1) = (start.jd(), start.jd() + span.ceil());
                let mut series = Vec::new();
                for s in HorizonsSeries::ALL {
                    let text = fetch_horizons(s, jd0, jd1, 1, cache).map_err(|e| CliError::Data(e.to_string()))?;
                    let parsed = parse_horizons_vectors(&text, s.label()).map_err(|e| {
                        data_err(&cache.join(format!("horizons_{}", s.label())), e)
                    })?;
                    series.push(parsed);
                }
                let mut it = series.into_iter();
                let sun = it.next().unwrap();
                EphemerisTable::from_series(sun, it.next(), it.next(), it.next())
                    .map_err(|e| CliError::Data(e.to_string()))
            }
            path => {
                let p = Path::new(path);
                let sun = parse_horizons_vectors(&read(p)?, "sun").map_err(|e| data_err(p, e))?;
                EphemerisTable::from_series(sun, None, None, None).map_err(|e| data_err(p, e))
            }
        }
    }

    fn propagate(&self, a: &PropagateArgs) -> Result<(), CliError> {
        let el = load_orbit(&a.orbit)?;
        let seconds = check_hours(a.hours)?;
        let dt = self.cli.dt.min(seconds);
        let traj = match &a.srp {
            None => propagate_elements(&el, seconds, dt)?,
            Some(cfg) => {
                let cfg = parse_config(cfg)?;
                let end = el.epoch.plus_seconds(seconds + SECONDS_PER_DAY);
                let table = match a.ephem.as_str() {
                    "analytic" => None,
                    src => Some(self.table(src, el.epoch, end)?),
                };
                let hook = SrpPerturbation { cfg, table: table.as_ref() };
                let f = |r: &crate::kepler::Vec3, _: &crate::kepler::Vec3, t: Epoch| hook.accel(r, t);
                propagate(&elements_to_state(&el), seconds, dt, Some(&f)).map_err(|e| CliError::Data(e.to_string()))?
            }
        };
        for w in traj.warnings() {
            eprintln!("warning: {w}");
        }
        self.write("trajectory.csv", &traj.to_csv())?;
        Ok(())
    }

    fn groundtrack(&self, a: &GroundtrackArgs) -> Result<(), CliError> {
        let el = load_orbit(&a.orbit)?;
        let seconds = check_hours(a.hours)?;
        let traj = propagate_elements(&el, seconds, self.cli.dt)?;
        let track = ground_track(&traj).map_err(|e| CliError::Data(e.to_string()))?;
        println!("revolutions: {}", ascending_node_times(&traj).len());
        self.write("groundtrack.csv", &track_to_csv(&track))?;
        self.write("groundtrack.geojson", &track_to_geojson(&track))?;
        let mut series = vec![track_series("primary", &track)];
        if let Some(path) = &a.compare {
            let other = load_elements(path)?;
            let traj2 = propagate_elements(&other, seconds, self.cli.dt)?;
            let track2 = ground_track(&traj2).map_err(|e| CliError::Data(e.to_string()))?;
            self.write("groundtrack_compare.csv", &track_to_csv(&track2))?;
            series.push(track_series("compare", &track2));
        }
        self.write("groundtrack.svg", &track_svg("Ground track", &series))?;
        Ok(())
    }

    fn passes(&self, a: &PassesArgs) -> Result<(), CliError> {
        let el = load_orbit(&a.orbit)?;
        let seconds = check_hours(a.hours)?;
        let specs = if a.stations.is_empty() {
            vec!["patiala".to_string(), "srinagar".into(), "bengaluru".into()]
        } else {
            a.stations.clone()
        };
        let stations = specs.iter().map(|s| parse_station(s, a.mask)).collect::<Result<Vec<_>, _>>()?;
        let criterion = match a.fov {
            Some(fov) if fov > 0.0 && fov < 180.0 => VisibilityCriterion::FieldOfView { fov_deg: fov },
            Some(fov) => return Err(usage(format!("--fov must be in (0, 180), got {fov}"))),
            None => VisibilityCriterion::MaskAngle,
        };
        let traj = propagate_elements(&el, seconds, self.cli.dt)?;
        for st in &stations {
            let passes = find_passes(&traj, st, criterion).map_err(|e| CliError::Data(e.to_string()))?;
            let summary = revisit_report(&passes, st);
            let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.1}"));
            println!(
                "{}: passes={} min_s={} mean_s={} max_s={} max_gap_s={}",
                st.name,
                summary.count,
                fmt(summary.min_duration),
                fmt(summary.mean_duration),
                fmt(summary.max_duration),
                fmt(summary.max_gap)
            );
            let file = format!("passes_{}.csv", st.name.to_ascii_lowercase().replace(' ', "_"));
            self.write(&file, &passes_to_csv(&passes))?;
        }
        Ok(())
    }

    fn tle_parse(&self, file: &Path, strict: bool) -> Result<(), CliError> {
        let (name, parsed) = read_tle_text(&read(file)?).map_err(|e| data_err(file, e))?;
        if strict && parsed.mode == ParseMode::Tolerant {
            return Err(data_err(
                file,
                format!("not a strict fixed-column TLE: {}", parsed.warnings.join("; ")),
            ));
        }
        for w in &parsed.warnings {
            eprintln!("warning: {}: {w}", file.display());
        }
        let r = &parsed.record;
        if let Some(n) = name {
            println!("name={n}");
        }
        println!("catalog_number={}", r.catalog_number);
        println!("epoch={}", r.epoch.to_iso());
        println!("inclination_deg={}", r.inclination);
        println!("raan_deg={}", r.raan);
        println!("eccentricity={}", r.eccentricity);
        println!("argp_deg={}", r.argp);
        println!("mean_anomaly_deg={}", r.mean_anomaly);
        println!("mean_motion_rev_day={}", r.mean_motion);
        println!("semi_major_axis_km={:.4}", r.semi_major_axis());
        let el = tle_to_elements(r).map_err(|e| data_err(file, e))?;
        self.write("tle_elements.csv", &elements_csv([el]))?;
        Ok(())
    }

    fn year_series(
        &self,
        ephem: &str,
        config: &str,
        shadow: ShadowMode,
        el: &KeplerianElements,
        from: &str,
        days: u32,
    ) -> Result<String, CliError> {
        let mut cfg = parse_config(config)?;
        if cfg.nu_override.is_none() && shadow == ShadowMode::ForceLit {
            cfg.nu_override = Some(1);
        }
        if days == 0 {
            return Err(usage("--days must be >= 1"));
        }
        let start = parse_epoch(from)?;
        let end = start.plus_seconds(days as f64 * SECONDS_PER_DAY);
        let table = self.table(ephem, start, end)?;
        let provider = |e: Epoch| {
            let adv = el.advanced_by(e.seconds_since(el.epoch)).unwrap_or(*el);
            elements_to_state(&adv).r
        };
        let samples = srp_year_series(&table, start, end, provider, &cfg).map_err(|e| CliError::Data(e.to_string()))?;
        if let (Some(max), Some(min)) = (
            samples.iter().map(|s| s.magnitude).reduce(f64::max),
            samples.iter().map(|s| s.magnitude).reduce(f64::min),
        ) {
            println!(
                "srp samples={} max_km_day2={:.6e} min_km_day2={:.6e}",
                samples.len(),
                km_s2_to_km_day2(max),
                km_s2_to_km_day2(min)
            );
        }
        let csv = srp_series_to_csv(&samples);
        self.write("srp_year.csv", &csv)?;
        let points = samples
            .iter()
            .map(|s| (s.epoch.jd() - start.jd(), km_s2_to_km_day2(s.magnitude)))
            .collect();
        let svg = line_chart(
            &Axes {
                title: "SRP acceleration".into(),
                x_label: format!("days since {}", start.to_iso()),
                y_label: "|a_srp| (km/day^2)".into(),
                bounds: None,
            },
            &[Series::new("|a_srp|", points)],
        );
        self.write("srp_year.svg", &svg)?;
        Ok(csv)
    }

    fn srp_year(&self, a: &YearArgs) -> Result<String, CliError> {
        let el = match &a.elements {
            Some(p) => load_elements(p)?,
            None => reference_orbit(),
        };
        self.year_series(&a.ephem, &a.config, a.shadow, &el, &a.from, a.days)
    }

    fn sweep(&self, el: &KeplerianElements, a: &SweepArgs) -> Result<Vec<SweepEntry>, CliError> {
        if !(a.quad_dt > 0.0) {
            return Err(usage("--quad-dt must be > 0"));
        }
        let entries = perturb_sweep(a.start, a.step, a.count, el, a.exposure, a.quad_dt).map_err(|e| CliError::Data(e.to_string()))?;
        self.write("sweep.csv", &sweep_to_csv(&entries))?;
        self.write("sweep_elements.csv", &elements_csv(entries.iter().map(|e| e.elements)))?;
        Ok(entries)
    }

    fn train(&self, ds: &Dataset, opts: &TrainArgs) -> Result<ModelSet, CliError> {
        let (tr, va) = split_dataset(ds, opts.ratio, opts.seed).map_err(|e| CliError::Data(e.to_string()))?;
        let model = train(&tr, opts.lr, opts.epochs).map_err(|e| CliError::Data(e.to_string()))?;
        let scores = model.evaluate(&va).map_err(|e| CliError::Data(e.to_string()))?;
        for (name, m) in model.target_names().iter().zip(&scores) {
            println!("validation MAPE {name} = {m:.6e} %");
        }
        self.write("model.txt", &model.to_text())?;

        if let Some(j) = model.target_names().iter().position(|n| n == "z_km") {
            let pred = model.predict_batch(&va.features).map_err(|e| CliError::Data(e.to_string()))?;
            let mut rows: Vec<(f64, f64, f64)> = va
                .features
                .iter()
                .zip(&va.targets)
                .zip(&pred)
                .map(|((x, y), p)| (x[0], y[j], p[j]))
                .collect();
            rows.sort_by(|a, b| a.0.total_cmp(&b.0));
            let svg = line_chart(
                &Axes {
                    title: "Validation Z: actual vs predicted".into(),
                    x_label: ds.feature_names[0].clone(),
                    y_label: "z (km)".into(),
                    bounds: None,
                },
                &[
                    Series::new("actual", rows.iter().map(|r| (r.0, r.1)).collect()),
                    Series::new("predicted", rows.iter().map(|r| (r.0, r.2)).collect()),
                ],
            );
            self.write("predicted_vs_actual_z.svg", &svg)?;
        }
        Ok(model)
    }

    fn predict(&self, model: &Path, features: &str) -> Result<(), CliError> {
        let m = ModelSet::from_text(&read(model)?).map_err(|e| data_err(model, e))?;
        let x = features
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| usage(format!("--features: `{s}` is not a number"))))
            .collect::<Result<Vec<_>, _>>()?;
        let y = m.predict(&x).map_err(|e| usage(format!("--features: {e}")))?;
        println!("{}", m.target_names().join(","));
        println!("{}", y.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
        Ok(())
    }

    fn pipeline(&self, a: &PipelineArgs) -> Result<(), CliError> {
        let el = load_elements(&a.elements)?;
        let cfg = parse_config(&a.config)?;
        self.year_series(&a.ephem, &a.config, a.shadow, &el, &a.from, a.days)?;

        let entries = self.sweep(&el, &a.sweep)?;
        let seconds = check_hours(a.hours)?;
        let base = propagate_elements(&el, seconds, self.cli.dt)?;
        let perturbed = propagate_elements(&entries[0].elements, seconds, self.cli.dt)?;
        self.write("trajectory.csv", &base.to_csv())?;
        self.write("perturbed_trajectory.csv", &perturbed.to_csv())?;
        let max_sep = base
            .samples()
            .iter()
            .zip(perturbed.samples())
            .map(|(p, q)| (p.r - q.r).norm())
            .fold(0.0, f64::max);
        println!("max perturbed-unperturbed separation over {} h: {max_sep:.6e} km", a.hours);
        let t1 = ground_track(&base).map_err(|e| CliError::Data(e.to_string()))?;
        let t2 = ground_track(&perturbed).map_err(|e| CliError::Data(e.to_string()))?;
        self.write(
            "groundtrack_compare.svg",
            &track_svg(
                "Non-perturbed vs perturbed orbit",
                &[track_series("non-perturbed", &t1), track_series("perturbed", &t2)],
            ),
        )?;

        let ds = generate_dataset(&entries, &cfg, REFERENCE_U_DEG).map_err(|e| CliError::Data(e.to_string()))?;
        self.write("dataset.csv", &ds.to_csv())?;
        self.train(&ds, &a.train)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_subcommand_is_usage_error() {
        assert_eq!(run(["leosrp", "frobnicate"]), 1);
        assert_eq!(run(["leosrp", "--help"]), 0);
    }

    #[test]
    fn bad_dt_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert_eq!(run(["leosrp", "--out", out, "--dt", "-1", "tle", "parse", "x"]), 1);
    }

    #[test]
    fn station_specs() {
        assert_eq!(parse_station("Patiala", 5.0).unwrap().name, "Patiala");
        let s = parse_station("Here:10.5:-20", 7.0).unwrap();
        assert_eq!((s.location.lat, s.location.lon, s.mask_deg), (10.5, -20.0, 7.0));
        assert!(parse_station("nowhere", 5.0).is_err());
        assert!(parse_station("X:a:b", 5.0).is_err());
    }
}

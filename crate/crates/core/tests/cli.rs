use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use leosrp::ephemeris::{sun_position_analytic, HorizonsClient, HorizonsSeries};
use leosrp::timeframe::Epoch;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn leosrp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leosrp"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Horizons CSV-layout vector table of the analytic Sun, one row per day.
fn horizons_text(start_jd: f64, days: u32) -> String {
    let mut out = String::from(" Target body name: Sun (10)\n Center body name: Earth (399)\n$$SOE\n");
    for k in 0..=days {
        let jd = start_jd + k as f64;
        let p = sun_position_analytic(Epoch::from_jd(jd).unwrap());
        out.push_str(&format!(
            "{jd:.9}, A.D. x, {:.15E}, {:.15E}, {:.15E}, 0.0E+00, 0.0E+00, 0.0E+00,\n",
            p.x, p.y, p.z
        ));
    }
    out.push_str("$$EOE\n");
    out
}

#[test]
fn unknown_subcommand_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = leosrp(dir.path(), &["launch"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn malformed_elements_exit_two_naming_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "a_km,e,i_deg,raan_deg,argp_deg,true_anom_deg,epoch_jd\n6928.18,0,98.6,7,oops,0,2459905.5\n").unwrap();
    let o = leosrp(dir.path(), &["propagate", "--elements", bad.to_str().unwrap(), "--hours", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("bad.csv") && msg.contains("line 2"), "{msg}");
}

#[test]
fn malformed_ephemeris_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("sun.txt");
    fs::write(&bad, "$$SOE\n2459905.5, x, 1, 2\n$$EOE\n").unwrap();
    let o = leosrp(dir.path(), &["srp", "year", "--ephem", bad.to_str().unwrap(), "--days", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sun.txt"), "{}", stderr(&o));
}

#[test]
fn groundtrack_reports_fifteen_revolutions() {
    let dir = tempfile::tempdir().unwrap();
    let o = leosrp(
        dir.path(),
        &["--out", "out", "groundtrack", "--elements", data("reference_orbit.csv").to_str().unwrap()],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("revolutions: 15"));
    let csv = fs::read_to_string(dir.path().join("out/groundtrack.csv")).unwrap();
    assert!(csv.starts_with("t_s,lat_deg,lon_deg,alt_km\n"));
    assert_eq!(csv.lines().count(), 8642);
}

#[test]
fn pipeline_with_horizons_file() {
    let dir = tempfile::tempdir().unwrap();
    let ephem = dir.path().join("sun_year.txt");
    fs::write(&ephem, horizons_text(2_459_905.5, 365)).unwrap();
    let o = leosrp(
        dir.path(),
        &[
            "--out",
            "out",
            "pipeline",
            "--elements",
            data("reference_orbit.csv").to_str().unwrap(),
            "--ephem",
            ephem.to_str().unwrap(),
            "--config",
            "mass=15,emissivity=0.30",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let out = dir.path().join("out");
    for (name, header) in [
        ("srp_year.csv", "jd,ax_km_s2,ay_km_s2,az_km_s2,mag_km_s2,mag_km_day2,nu"),
        ("sweep.csv", "a_srp_km_day2,delta_i_rad,i_deg_new"),
        ("perturbed_trajectory.csv", "t_s,x_km,y_km,z_km,vx_km_s,vy_km_s,vz_km_s"),
        ("dataset.csv", "a_srp_km_day2,area_to_mass,mass_kg,x_km,y_km,z_km"),
    ] {
        let text = fs::read_to_string(out.join(name)).unwrap();
        assert_eq!(text.lines().next(), Some(header), "{name}");
    }
    let year = fs::read_to_string(out.join("srp_year.csv")).unwrap();
    assert_eq!(year.lines().count(), 367);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("validation MAPE z_km"));
    assert!(out.join("model.txt").exists() && out.join("groundtrack_compare.svg").exists());
}

#[test]
fn fetch_reads_the_cache_offline() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let client = HorizonsClient::new(&cache);
    let (jd0, days) = (2_459_905.5, 10u32);
    fs::create_dir_all(&cache).unwrap();
    for s in HorizonsSeries::ALL {
        let path = client.cache_path(s, jd0, jd0 + days as f64, 1);
        fs::write(path, horizons_text(jd0, days)).unwrap();
    }
    let o = leosrp(
        dir.path(),
        &[
            "--out",
            "out",
            "--ephem-cache",
            cache.to_str().unwrap(),
            "srp",
            "year",
            "--ephem",
            "fetch",
            "--days",
            "10",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let year = fs::read_to_string(dir.path().join("out/srp_year.csv")).unwrap();
    assert_eq!(year.lines().count(), 12);
}

#[test]
fn ml_predict_prints_three_targets() {
    let dir = tempfile::tempdir().unwrap();
    let orbit = data("reference_orbit.csv");
    let o = leosrp(
        dir.path(),
        &["--out", "out", "pipeline", "--elements", orbit.to_str().unwrap(), "--days", "2", "--epochs", "500"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let o = leosrp(dir.path(), &["ml", "predict", "--model", "out/model.txt", "--features", "0.0100,0.0666667,15"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "x_km,y_km,z_km");
    assert_eq!(lines[1].split(',').count(), 3);
    let o = leosrp(dir.path(), &["ml", "predict", "--model", "out/model.txt", "--features", "1,2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn tle_parse_writes_elements() {
    let dir = tempfile::tempdir().unwrap();
    let o = leosrp(dir.path(), &["--out", "out", "tle", "parse", data("starlink_4566.tle").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("inclination_deg=97.6562"));
    let csv = fs::read_to_string(dir.path().join("out/tle_elements.csv")).unwrap();
    assert!(csv.starts_with("a_km,e,i_deg"));
    let o = leosrp(dir.path(), &["tle", "parse", "--strict", data("starlink_4566.tle").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

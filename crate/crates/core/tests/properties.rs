use std::f64::consts::{PI, TAU};

use leosrp::geotrack::{cap_angle, ecef_to_geo, elevation_azimuth, GeoPoint, GroundStation};
use leosrp::kepler::{
    eccentric_to_true, elements_to_state, solve_kepler, state_to_elements, true_to_mean, KeplerianElements,
};
use leosrp::mlreg::{normalize_features, split_dataset, train, Dataset};
use leosrp::srp::{perturb_sweep, srp_acceleration, SrpConfig};
use leosrp::timeframe::{calendar_to_jd, gmst, normalize_angle, Epoch, AU_KM, SIDEREAL_DAY_S};
use leosrp::tle::parse_tle;
use leosrp::Vec3;
use proptest::prelude::*;

fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn kepler_residual(m in -20.0f64..20.0, e in 0.0f64..0.99) {
        let big_e = solve_kepler(m, e).unwrap();
        prop_assert!((big_e - e * big_e.sin() - normalize_angle(m)).abs() < 1e-12);
        prop_assert!(angle_diff(big_e - e * big_e.sin(), m) < 1e-12);
    }

    #[test]
    fn anomaly_chain(f in 0.0f64..TAU, e in 0.0f64..0.95) {
        let m = true_to_mean(f, e).unwrap();
        let back = eccentric_to_true(solve_kepler(m, e).unwrap(), e).unwrap();
        prop_assert!(angle_diff(back, f) < 1e-9);
    }

    #[test]
    fn element_state_round_trip(
        a in 6600.0f64..42_000.0,
        e in 0.0f64..0.9,
        i in 0.0f64..PI,
        raan in 0.0f64..TAU,
        argp in 0.0f64..TAU,
        f in 0.0f64..TAU,
    ) {
        let el = KeplerianElements::new(a, e, i, raan, argp, f, Epoch::J2000).unwrap();
        let sv = elements_to_state(&el);
        let back = state_to_elements(&sv).unwrap();
        let sv2 = elements_to_state(&back);
        prop_assert!((sv2.r - sv.r).norm() / sv.r.norm() < 1e-9);
        prop_assert!((sv2.v - sv.v).norm() / sv.v.norm() < 1e-9);
        prop_assert!(((back.a - a) / a).abs() < 1e-9);
        if e > 1e-3 && i > 1e-3 && i < PI - 1e-3 {
            prop_assert!(angle_diff(back.raan, el.raan) < 1e-8);
            prop_assert!(angle_diff(back.argp, el.argp) < 1e-6);
            prop_assert!(angle_diff(back.true_anomaly, el.true_anomaly) < 1e-6);
        }
    }

    #[test]
    fn energy_and_momentum_relations(a in 6600.0f64..42_000.0, e in 0.0f64..0.9, f in 0.0f64..TAU) {
        let el = KeplerianElements::new(a, e, 1.0, 0.3, 0.2, f, Epoch::J2000).unwrap();
        let sv = elements_to_state(&el);
        let mu = leosrp::timeframe::MU_EARTH;
        prop_assert!(((sv.specific_energy() + mu / (2.0 * a)) / (mu / (2.0 * a))).abs() < 1e-10);
        let h = (mu * a * (1.0 - e * e)).sqrt();
        prop_assert!(((sv.angular_momentum().norm() - h) / h).abs() < 1e-10);
    }

    #[test]
    fn gmst_advances_one_turn_per_sidereal_day(jd in 2_440_000.0f64..2_470_000.0) {
        let t = Epoch::from_jd(jd).unwrap();
        let later = t.plus_seconds(SIDEREAL_DAY_S);
        prop_assert!(angle_diff(gmst(later), gmst(t)) < 1e-6);
        let g = gmst(t);
        prop_assert!((0.0..TAU).contains(&g));
    }

    #[test]
    fn normalized_angles_in_range(theta in -1e4f64..1e4) {
        let n = normalize_angle(theta);
        prop_assert!((0.0..TAU).contains(&n));
        prop_assert!(angle_diff(n, theta) < 1e-9);
    }

    #[test]
    fn calendar_round_trip(
        year in 1950i32..2150,
        month in 1u32..=12,
        day in 1u32..=28,
        hour in 0u32..24,
        minute in 0u32..60,
        second in 0.0f64..59.0,
    ) {
        let epoch = calendar_to_jd(year, month, day, hour, minute, second).unwrap();
        let c = epoch.to_calendar();
        prop_assert_eq!((c.year, c.month, c.day, c.hour, c.minute), (year, month, day, hour, minute));
        prop_assert!((c.second - second).abs() < 1e-4);
    }

    #[test]
    fn tle_format_parse_round_trip(
        inc in 0.0f64..180.0,
        raan in 0.0f64..360.0,
        ecc in 0u32..9_999_999,
        argp in 0.0f64..360.0,
        ma in 0.0f64..360.0,
        n in 1.0f64..17.0,
    ) {
        let base = parse_tle(
            "1 53693U 22105AX 22255.91667824 -.00045150 00000-0 -37321-3 0 9991",
            "2 53693 97.6562 134.0486 0001715 125.8937 299.3955 15.70295930 1305",
        )
        .unwrap()
        .record;
        let round = |v: f64, places: i32| (v * 10f64.powi(places)).round() / 10f64.powi(places);
        let mut rec = base.clone();
        rec.inclination = round(inc, 4).min(179.9999);
        rec.raan = round(raan, 4).min(359.9999);
        rec.eccentricity = ecc as f64 * 1e-7;
        rec.argp = round(argp, 4).min(359.9999);
        rec.mean_anomaly = round(ma, 4).min(359.9999);
        rec.mean_motion = round(n, 8);
        let (l1, l2) = rec.to_lines();
        prop_assert_eq!(l1.len(), 69);
        prop_assert_eq!(l2.len(), 69);
        let parsed = parse_tle(&l1, &l2).unwrap();
        prop_assert_eq!(parsed.mode, leosrp::tle::ParseMode::Strict);
        let r = parsed.record;
        prop_assert!((r.inclination - rec.inclination).abs() < 1e-9);
        prop_assert!((r.raan - rec.raan).abs() < 1e-9);
        prop_assert!((r.eccentricity - rec.eccentricity).abs() < 1e-12);
        prop_assert!((r.argp - rec.argp).abs() < 1e-9);
        prop_assert!((r.mean_anomaly - rec.mean_anomaly).abs() < 1e-9);
        prop_assert!((r.mean_motion - rec.mean_motion).abs() < 1e-12);
    }

    #[test]
    fn geodetic_round_trip(lat in -89.9f64..89.9, lon in -179.9f64..180.0, alt in 0.0f64..2000.0) {
        let p = GeoPoint::new(lat, lon, alt);
        let back = ecef_to_geo(&p.to_ecef()).unwrap();
        prop_assert!((back.lat - lat).abs() < 1e-9);
        prop_assert!((back.lon - lon).abs() < 1e-9);
        prop_assert!((back.alt - alt).abs() < 1e-6);
        prop_assert!(back.lon > -180.0 && back.lon <= 180.0);
    }

    #[test]
    fn elevation_bounded_and_cap_consistent(
        lat in -80.0f64..80.0,
        lon in -180.0f64..180.0,
        beta in 0.0f64..60.0,
        alt in 300.0f64..1500.0,
        bearing in 0.0f64..TAU,
    ) {
        let st = GroundStation::new("p", lat, lon, beta).unwrap();
        let (alpha, v) = cap_angle(alt, beta);
        prop_assert!(alpha >= 0.0 && (0.0..=0.5).contains(&v));
        let delta = alpha.to_radians();
        let (la, lo) = (lat.to_radians(), lon.to_radians());
        let lat2 = (la.sin() * delta.cos() + la.cos() * delta.sin() * bearing.cos()).asin();
        let lon2 = lo + (bearing.sin() * delta.sin() * la.cos()).atan2(delta.cos() - la.sin() * lat2.sin());
        let sat = GeoPoint::new(lat2.to_degrees(), lon2.to_degrees(), alt).to_ecef();
        let (el, az) = elevation_azimuth(&st, &sat).unwrap();
        prop_assert!((-90.0..=90.0).contains(&el));
        prop_assert!((0.0..360.0).contains(&az));
        prop_assert!((el - beta).abs() < 1e-6, "el {} beta {}", el, beta);
    }

    #[test]
    fn srp_is_anti_sunward_inverse_square(
        sx in -2e8f64..2e8, sy in -2e8f64..2e8, sz in -1e8f64..1e8,
        rx in -8e3f64..8e3, ry in -8e3f64..8e3, rz in -8e3f64..8e3,
    ) {
        let sun = Vec3::new(sx, sy, sz);
        let sat = Vec3::new(rx, ry, rz);
        prop_assume!((sat - sun).norm() > 1e6);
        let cfg = SrpConfig::default();
        let a = srp_acceleration(&sat, &sun, &cfg, 1).unwrap();
        prop_assert!(a.normalize().dot(&(sun - sat).normalize()) < -1.0 + 1e-12);
        let ratio = a.norm() * (sat - sun).norm_squared() / (cfg.accel_at_1au() * AU_KM * AU_KM);
        prop_assert!((ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_is_affine_and_touches_only_inclination(
        start in 1e-4f64..1.0,
        step in 0.0f64..0.1,
        count in 1usize..30,
    ) {
        let el = KeplerianElements::from_degrees(6928.18, 0.0, 98.6, 7.0, 180.0, 0.0, Epoch::J2000).unwrap();
        let sweep = perturb_sweep(start, step, count, &el, 0.5, 5.0).unwrap();
        let unit = sweep[0].delta_i / start;
        for (k, s) in sweep.iter().enumerate() {
            let expected = (start + k as f64 * step) * unit;
            prop_assert!((s.delta_i - expected).abs() <= 1e-12 * expected.abs());
            prop_assert_eq!(s.elements.raan.to_bits(), el.raan.to_bits());
            prop_assert_eq!(s.elements.argp.to_bits(), el.argp.to_bits());
            prop_assert_eq!(s.elements.a.to_bits(), el.a.to_bits());
            prop_assert_eq!(s.elements.e.to_bits(), el.e.to_bits());
            prop_assert_eq!(s.elements.true_anomaly.to_bits(), el.true_anomaly.to_bits());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn split_is_partition(n in 5usize..200, seed in any::<u64>(), ratio in 0.2f64..0.8) {
        let features: Vec<Vec<f64>> = (0..n).map(|k| vec![k as f64]).collect();
        let targets: Vec<Vec<f64>> = (0..n).map(|k| vec![k as f64 + 1.0]).collect();
        let ds = Dataset::new(vec!["x".into()], vec!["y".into()], features, targets).unwrap();
        let (a, b) = split_dataset(&ds, ratio, seed).unwrap();
        prop_assert_eq!(a.len(), (ratio * n as f64).round() as usize);
        let mut ids: Vec<usize> = a.features.iter().chain(&b.features).map(|r| r[0] as usize).collect();
        ids.sort_unstable();
        prop_assert_eq!(ids, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn loss_non_increasing(seed in any::<u64>(), lr in 0.001f64..0.1) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let features: Vec<Vec<f64>> = (0..30).map(|_| (0..3).map(|_| rng.random_range(-100.0..100.0)).collect()).collect();
        let targets: Vec<Vec<f64>> = features
            .iter()
            .map(|r| vec![r[0] * 0.5 - r[1] * 2.0 + rng.random_range(-1.0..1.0)])
            .collect();
        let ds = Dataset::new(vec!["a".into(), "b".into(), "c".into()], vec!["y".into()], features, targets).unwrap();
        let model = train(&ds, lr, 300).unwrap();
        let h = &model.models[0].loss_history;
        prop_assert!(h.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }

    #[test]
    fn normalization_is_idempotent(rows in proptest::collection::vec(proptest::collection::vec(-1e3f64..1e3, 2), 2..40)) {
        let (z, stats) = normalize_features(&rows).unwrap();
        for (row, zr) in rows.iter().zip(&z) {
            prop_assert_eq!(&stats.apply(row).unwrap(), zr);
        }
    }
}

#[test]
fn kepler_residual_dense_sample() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100_000 {
        let m = rng.random_range(0.0..TAU);
        let e = rng.random_range(0.0..0.999);
        let big_e = solve_kepler(m, e).unwrap();
        assert!((big_e - e * big_e.sin() - m).abs() < 1e-12, "m {m} e {e}");
    }
}

use leosrp::geotrack::{
    eci_to_ecef, elevation_azimuth, find_passes, ground_track, GroundStation, VisibilityCriterion, DEFAULT_FOV_DEG,
};
use leosrp::kepler::{elements_to_state, KeplerianElements};
use leosrp::propagator::{propagate, Trajectory};
use leosrp::timeframe::Epoch;

fn day_of_reference_orbit() -> Trajectory {
    let el = KeplerianElements::from_degrees(6928.18, 0.0, 98.6, 7.0, 180.0, 0.0, Epoch::from_jd(2_459_905.5).unwrap())
        .unwrap();
    propagate(&elements_to_state(&el), 86_400.0, 10.0, None).unwrap()
}

fn elevation(traj: &Trajectory, st: &GroundStation, t: f64) -> f64 {
    let sv = traj.state_at(t).unwrap();
    let r = eci_to_ecef(&sv.r, traj.start().unwrap().plus_seconds(t));
    elevation_azimuth(st, &r).unwrap().0
}

#[test]
fn pass_edges_sit_on_the_mask() {
    let traj = day_of_reference_orbit();
    for st in [GroundStation::patiala(), GroundStation::srinagar(), GroundStation::bengaluru()] {
        let passes = find_passes(&traj, &st, VisibilityCriterion::MaskAngle).unwrap();
        assert!(!passes.is_empty(), "{}", st.name);
        for p in &passes {
            assert!(p.los_t > p.aos_t);
            assert!(p.max_elevation >= st.mask_deg);
            assert!((elevation(&traj, &st, p.aos_t) - st.mask_deg).abs() < 0.05);
            assert!((elevation(&traj, &st, p.los_t) - st.mask_deg).abs() < 0.05);
            for k in 1..20 {
                let t = p.aos_t + (p.los_t - p.aos_t) * k as f64 / 20.0;
                let el = elevation(&traj, &st, t);
                assert!(el >= st.mask_deg - 1e-6);
                assert!(el <= p.max_elevation + 1e-6);
            }
        }
        for w in passes.windows(2) {
            assert!(w[1].aos_t > w[0].los_t);
        }
    }
}

#[test]
fn field_of_view_passes_nest_inside_mask_passes() {
    let traj = day_of_reference_orbit();
    let sub = ground_track(&traj).unwrap()[300].point;
    let st = GroundStation::new("under", sub.lat, sub.lon, 5.0).unwrap();
    let mask = find_passes(&traj, &st, VisibilityCriterion::MaskAngle).unwrap();
    let fov = find_passes(&traj, &st, VisibilityCriterion::FieldOfView { fov_deg: DEFAULT_FOV_DEG }).unwrap();
    assert!(!fov.is_empty());
    assert!(fov.iter().any(|p| p.aos_t < 3000.0 && 3000.0 < p.los_t));
    for p in &fov {
        assert!(p.max_elevation > 60.0);
        assert!(mask.iter().any(|m| m.aos_t <= p.aos_t && p.los_t <= m.los_t && p.duration < m.duration));
    }
    let patiala = GroundStation::patiala();
    let far = find_passes(&traj, &patiala, VisibilityCriterion::FieldOfView { fov_deg: DEFAULT_FOV_DEG }).unwrap();
    assert!(far.iter().all(|p| p.max_elevation > 60.0));
}

#[test]
fn higher_mask_never_adds_visibility() {
    let traj = day_of_reference_orbit();
    let low = GroundStation::new("low", 30.3398, 76.3869, 5.0).unwrap();
    let high = GroundStation::new("high", 30.3398, 76.3869, 20.0).unwrap();
    let total = |st: &GroundStation| -> f64 {
        find_passes(&traj, st, VisibilityCriterion::MaskAngle).unwrap().iter().map(|p| p.duration).sum()
    };
    assert!(total(&high) < total(&low));
}

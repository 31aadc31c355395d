//! Python bindings for the `leosrp` orbit and SRP toolkit.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use leosrp::ephemeris::sun_position_analytic;
use leosrp::geotrack::{self, GroundStation, VisibilityCriterion};
use leosrp::kepler::{self, KeplerianElements, StateVector};
use leosrp::mlreg::{self, Dataset, ModelSet};
use leosrp::propagator::{self, Trajectory as CoreTrajectory};
use leosrp::srp::{self, SrpConfig, SrpPerturbation};
use leosrp::timeframe::Epoch;
use leosrp::Vec3;

type Triple = (f64, f64, f64);

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vec3(t: Triple) -> Vec3 {
    Vec3::new(t.0, t.1, t.2)
}

fn triple(v: &Vec3) -> Triple {
    (v.x, v.y, v.z)
}

fn epoch(jd: f64) -> PyResult<Epoch> {
    Epoch::from_jd(jd).map_err(err)
}

/// Classical orbital elements. Angles are exposed in degrees.
#[pyclass(name = "Elements", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyElements {
    inner: KeplerianElements,
}

#[pymethods]
impl PyElements {
    #[new]
    #[pyo3(signature = (a, e, i_deg, raan_deg, argp_deg, nu_deg, epoch_jd=2_459_905.5))]
    fn new(a: f64, e: f64, i_deg: f64, raan_deg: f64, argp_deg: f64, nu_deg: f64, epoch_jd: f64) -> PyResult<Self> {
        let inner =
            KeplerianElements::from_degrees(a, e, i_deg, raan_deg, argp_deg, nu_deg, epoch(epoch_jd)?).map_err(err)?;
        Ok(Self { inner })
    }

    /// Elements recovered from an inertial state (km, km/s).
    #[staticmethod]
    #[pyo3(signature = (r, v, epoch_jd=2_459_905.5))]
    fn from_state(r: Triple, v: Triple, epoch_jd: f64) -> PyResult<Self> {
        let sv = StateVector::new(vec3(r), vec3(v), epoch(epoch_jd)?);
        Ok(Self {
            inner: kepler::state_to_elements(&sv).map_err(err)?,
        })
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a
    }

    #[getter]
    fn e(&self) -> f64 {
        self.inner.e
    }

    #[getter]
    fn i_deg(&self) -> f64 {
        self.inner.i.to_degrees()
    }

    #[getter]
    fn raan_deg(&self) -> f64 {
        self.inner.raan.to_degrees()
    }

    #[getter]
    fn argp_deg(&self) -> f64 {
        self.inner.argp.to_degrees()
    }

    #[getter]
    fn nu_deg(&self) -> f64 {
        self.inner.true_anomaly.to_degrees()
    }

    #[getter]
    fn epoch_jd(&self) -> f64 {
        self.inner.epoch.jd()
    }

    /// Orbital period, s.
    fn period(&self) -> f64 {
        self.inner.period()
    }

    /// Mean motion, rad/s.
    fn mean_motion(&self) -> f64 {
        self.inner.mean_motion()
    }

    /// Inertial `(r, v)` in km and km/s.
    fn to_state(&self) -> (Triple, Triple) {
        let sv = kepler::elements_to_state(&self.inner);
        (triple(&sv.r), triple(&sv.v))
    }

    fn __repr__(&self) -> String {
        format!(
            "Elements(a={}, e={}, i_deg={}, raan_deg={}, argp_deg={}, nu_deg={}, epoch_jd={})",
            self.a(),
            self.e(),
            self.i_deg(),
            self.raan_deg(),
            self.argp_deg(),
            self.nu_deg(),
            self.epoch_jd()
        )
    }
}

fn station_from(obj: &Bound<'_, PyAny>, mask: f64) -> PyResult<GroundStation> {
    if let Ok(name) = obj.extract::<String>() {
        return match name.to_lowercase().as_str() {
            "patiala" => Ok(GroundStation::patiala()),
            "srinagar" => Ok(GroundStation::srinagar()),
            "bengaluru" => Ok(GroundStation::bengaluru()),
            _ => Err(PyValueError::new_err(format!("unknown station: {name}"))),
        };
    }
    let (name, lat, lon): (String, f64, f64) = obj.extract()?;
    GroundStation::new(&name, lat, lon, mask).map_err(err)
}

/// Fixed-step RK4 trajectory.
#[pyclass(name = "Trajectory", frozen)]
struct PyTrajectory {
    inner: CoreTrajectory,
}

#[pymethods]
impl PyTrajectory {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Sample offsets from the start, s.
    fn times(&self) -> Vec<f64> {
        self.inner.times().to_vec()
    }

    /// Inertial positions, km.
    fn positions(&self) -> Vec<Triple> {
        self.inner.samples().iter().map(|s| triple(&s.r)).collect()
    }

    /// Hermite-interpolated `(r, v)` at `t` seconds after the start.
    fn state_at(&self, t: f64) -> PyResult<(Triple, Triple)> {
        let sv = self.inner.state_at(t).map_err(err)?;
        Ok((triple(&sv.r), triple(&sv.v)))
    }

    /// `(t_s, lat_deg, lon_deg, alt_km)` per sample.
    fn ground_track(&self) -> PyResult<Vec<(f64, f64, f64, f64)>> {
        let track = geotrack::ground_track(&self.inner).map_err(err)?;
        Ok(track
            .iter()
            .map(|p| (p.t, p.point.lat, p.point.lon, p.point.alt))
            .collect())
    }

    /// Visibility windows over a named station or a `(name, lat, lon)` tuple.
    #[pyo3(signature = (station, mask_deg=5.0, fov_deg=None))]
    fn passes<'py>(
        &self,
        py: Python<'py>,
        station: &Bound<'py, PyAny>,
        mask_deg: f64,
        fov_deg: Option<f64>,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let st = station_from(station, mask_deg)?;
        let criterion = match fov_deg {
            Some(fov_deg) => VisibilityCriterion::FieldOfView { fov_deg },
            None => VisibilityCriterion::MaskAngle,
        };
        let passes = geotrack::find_passes(&self.inner, &st, criterion).map_err(err)?;
        passes
            .iter()
            .map(|p| {
                let d = PyDict::new(py);
                d.set_item("aos", p.aos.to_iso())?;
                d.set_item("los", p.los.to_iso())?;
                d.set_item("aos_t", p.aos_t)?;
                d.set_item("los_t", p.los_t)?;
                d.set_item("duration", p.duration)?;
                d.set_item("max_elevation", p.max_elevation)?;
                d.set_item("direction", p.direction.as_str())?;
                Ok(d)
            })
            .collect()
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }
}

fn srp_config(text: Option<&str>) -> PyResult<SrpConfig> {
    match text {
        Some(t) => t.parse().map_err(err),
        None => Ok(SrpConfig::default()),
    }
}

/// Propagates the orbit for `hours`; `srp` is an optional config string
/// such as `"emissivity=0.3,area=1,mass=15"`.
#[pyfunction]
#[pyo3(signature = (elements, hours=24.0, dt=10.0, srp=None))]
fn propagate(elements: &PyElements, hours: f64, dt: f64, srp: Option<&str>) -> PyResult<PyTrajectory> {
    let sv0 = kepler::elements_to_state(&elements.inner);
    let duration = hours * 3600.0;
    let inner = match srp {
        Some(text) => {
            let model = SrpPerturbation {
                cfg: srp_config(Some(text))?,
                table: None,
            };
            let f = |r: &Vec3, _v: &Vec3, t: Epoch| model.accel(r, t);
            propagator::propagate(&sv0, duration, dt, Some(&f)).map_err(err)?
        }
        None => propagator::propagate(&sv0, duration, dt, None).map_err(err)?,
    };
    Ok(PyTrajectory { inner })
}

/// Parses a two- or three-line TLE into `(fields, elements)`.
#[pyfunction]
#[pyo3(signature = (text, strict=false))]
fn parse_tle<'py>(py: Python<'py>, text: &str, strict: bool) -> PyResult<(Bound<'py, PyDict>, PyElements)> {
    let (name, parsed) = leosrp::tle::read_tle_text(text).map_err(err)?;
    if strict && parsed.mode != leosrp::tle::ParseMode::Strict {
        return Err(PyValueError::new_err(format!(
            "not a strict fixed-column TLE: {}",
            parsed.warnings.join("; ")
        )));
    }
    let rec = &parsed.record;
    let d = PyDict::new(py);
    d.set_item("name", name)?;
    d.set_item("catalog_number", rec.catalog_number)?;
    d.set_item("epoch_jd", rec.epoch.jd())?;
    d.set_item("inclination_deg", rec.inclination)?;
    d.set_item("raan_deg", rec.raan)?;
    d.set_item("eccentricity", rec.eccentricity)?;
    d.set_item("argp_deg", rec.argp)?;
    d.set_item("mean_anomaly_deg", rec.mean_anomaly)?;
    d.set_item("mean_motion_rev_day", rec.mean_motion)?;
    d.set_item("rev_number", rec.rev_number)?;
    d.set_item("strict", parsed.mode == leosrp::tle::ParseMode::Strict)?;
    d.set_item("warnings", parsed.warnings.clone())?;
    let inner = leosrp::tle::tle_to_elements(rec).map_err(err)?;
    Ok((d, PyElements { inner }))
}

/// Visibility cap half-angle (deg) and cap area fraction for an altitude (km).
#[pyfunction]
#[pyo3(signature = (altitude, mask_deg=5.0))]
fn cap_angle(altitude: f64, mask_deg: f64) -> (f64, f64) {
    geotrack::cap_angle(altitude, mask_deg)
}

#[pyfunction]
fn slant_range(a_sat: f64, alpha_deg: f64) -> f64 {
    geotrack::slant_range(a_sat, alpha_deg)
}

/// Geocentric Sun position, km, from the analytic model.
#[pyfunction]
fn sun_position(jd: f64) -> PyResult<Triple> {
    Ok(triple(&sun_position_analytic(epoch(jd)?)))
}

/// Cannonball SRP acceleration, km/s².
#[pyfunction]
#[pyo3(signature = (r_sat, r_sun, config=None, nu=1))]
fn srp_acceleration(r_sat: Triple, r_sun: Triple, config: Option<&str>, nu: u8) -> PyResult<Triple> {
    let cfg = srp_config(config)?;
    let a = srp::srp_acceleration(&vec3(r_sat), &vec3(r_sun), &cfg, nu).map_err(err)?;
    Ok(triple(&a))
}

#[pyfunction]
fn shadow_factor(r_sat: Triple, r_sun: Triple) -> u8 {
    leosrp::ephemeris::shadow_factor(&vec3(r_sat), &vec3(r_sun))
}

/// `(a_srp_km_day2, delta_i_rad, elements)` for each swept magnitude.
#[pyfunction]
#[pyo3(signature = (elements, start=0.00994, step=1e-4, count=100, exposure=srp::DEFAULT_EXPOSURE, dt=srp::DEFAULT_SWEEP_DT))]
fn perturb_sweep(
    elements: &PyElements,
    start: f64,
    step: f64,
    count: usize,
    exposure: f64,
    dt: f64,
) -> PyResult<Vec<(f64, f64, PyElements)>> {
    let sweep = srp::perturb_sweep(start, step, count, &elements.inner, exposure, dt).map_err(err)?;
    Ok(sweep
        .into_iter()
        .map(|s| (s.a_srp_km_day2, s.delta_i, PyElements { inner: s.elements }))
        .collect())
}

/// One linear model per target, trained by batch gradient descent.
#[pyclass(name = "Models", frozen)]
struct PyModels {
    inner: ModelSet,
}

#[pymethods]
impl PyModels {
    #[staticmethod]
    #[pyo3(signature = (features, targets, feature_names=None, target_names=None, lr=mlreg::DEFAULT_LR, epochs=mlreg::DEFAULT_EPOCHS))]
    fn train(
        features: Vec<Vec<f64>>,
        targets: Vec<Vec<f64>>,
        feature_names: Option<Vec<String>>,
        target_names: Option<Vec<String>>,
        lr: f64,
        epochs: usize,
    ) -> PyResult<Self> {
        let names = |given: Option<Vec<String>>, prefix: &str, n: usize| {
            given.unwrap_or_else(|| (0..n).map(|k| format!("{prefix}{k}")).collect())
        };
        let fw = features.first().map_or(0, Vec::len);
        let tw = targets.first().map_or(0, Vec::len);
        let ds = Dataset::new(names(feature_names, "x", fw), names(target_names, "y", tw), features, targets)
            .map_err(err)?;
        Ok(Self {
            inner: mlreg::train(&ds, lr, epochs).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: ModelSet::from_text(text).map_err(err)?,
        })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn predict(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.predict(&x).map_err(err)
    }

    fn target_names(&self) -> Vec<String> {
        self.inner.models.iter().map(|m| m.target.clone()).collect()
    }

    /// Final training loss per target.
    fn final_losses(&self) -> Vec<f64> {
        self.inner
            .models
            .iter()
            .map(|m| m.loss_history.last().copied().unwrap_or(f64::NAN))
            .collect()
    }
}

/// Mean absolute percentage error, %.
#[pyfunction]
fn mape(pred: Vec<f64>, actual: Vec<f64>) -> PyResult<f64> {
    mlreg::mape(&pred, &actual).map_err(err)
}

#[pymodule]
fn pyleosrp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyElements>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyModels>()?;
    m.add_function(wrap_pyfunction!(propagate, m)?)?;
    m.add_function(wrap_pyfunction!(parse_tle, m)?)?;
    m.add_function(wrap_pyfunction!(cap_angle, m)?)?;
    m.add_function(wrap_pyfunction!(slant_range, m)?)?;
    m.add_function(wrap_pyfunction!(sun_position, m)?)?;
    m.add_function(wrap_pyfunction!(srp_acceleration, m)?)?;
    m.add_function(wrap_pyfunction!(shadow_factor, m)?)?;
    m.add_function(wrap_pyfunction!(perturb_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(mape, m)?)?;
    m.add("MU_EARTH", leosrp::timeframe::MU_EARTH)?;
    m.add("R_EARTH", leosrp::timeframe::R_EARTH)?;
    Ok(())
}

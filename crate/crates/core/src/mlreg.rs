//! Linear regression by batch gradient descent, trained on datasets built
//! from SRP sweeps.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::kepler::elements_to_state;
use crate::srp::{SrpConfig, SweepEntry};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MlError {
    #[error("empty input: {0}")]
    Empty(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("need at least 5 rows to split, got {0}")]
    TooFewRows(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("training diverged at epoch {epoch} with learning rate {lr}")]
    Diverged { lr: f64, epoch: usize },
    #[error("MAPE undefined: zero actual values at indices {0:?}")]
    ZeroActual(Vec<usize>),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub const FEATURE_NAMES: [&str; 3] = ["a_srp_km_day2", "area_to_mass", "mass_kg"];
pub const TARGET_NAMES: [&str; 3] = ["x_km", "y_km", "z_km"];
pub const DATASET_CSV_HEADER: &str = "a_srp_km_day2,area_to_mass,mass_kg,x_km,y_km,z_km";

/// Default reference argument of latitude for dataset targets, deg.
pub const REFERENCE_U_DEG: f64 = 90.0;
pub const DEFAULT_LR: f64 = 0.01;
pub const DEFAULT_EPOCHS: usize = 10_000;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub target_names: Vec<String>,
    pub features: Vec<Vec<f64>>,
    pub targets: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(
        feature_names: Vec<String>,
        target_names: Vec<String>,
        features: Vec<Vec<f64>>,
        targets: Vec<Vec<f64>>,
    ) -> Result<Self, MlError> {
        if features.len() != targets.len() {
            return Err(MlError::Shape(format!(
                "{} feature rows but {} target rows",
                features.len(),
                targets.len()
            )));
        }
        for (k, (x, y)) in features.iter().zip(&targets).enumerate() {
            if x.len() != feature_names.len() || y.len() != target_names.len() {
                return Err(MlError::Shape(format!("row {k} has the wrong arity")));
            }
            if !x.iter().chain(y).all(|v| v.is_finite()) {
                return Err(MlError::NonFinite(format!("row {k}")));
            }
        }
        Ok(Self {
            feature_names,
            target_names,
            features,
            targets,
        })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// Column `j` of the targets.
    pub fn target_column(&self, j: usize) -> Vec<f64> {
        self.targets.iter().map(|row| row[j]).collect()
    }

    fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            target_names: self.target_names.clone(),
            features: idx.iter().map(|&i| self.features[i].clone()).collect(),
            targets: idx.iter().map(|&i| self.targets[i].clone()).collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self
            .feature_names
            .iter()
            .chain(&self.target_names)
            .cloned()
            .collect::<Vec<_>>()
            .join(",");
        out.push('\n');
        for (x, y) in self.features.iter().zip(&self.targets) {
            let row: Vec<String> = x.iter().chain(y).map(|v| v.to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Reads the dataset CSV; the last three columns are the targets.
    pub fn from_csv(text: &str) -> Result<Self, MlError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (_, header) = lines
            .next()
            .ok_or_else(|| MlError::Empty("dataset file has no header".into()))?;
        let names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        if names.len() < TARGET_NAMES.len() + 1 {
            return Err(MlError::Parse {
                line: 1,
                msg: format!("expected at least {} columns", TARGET_NAMES.len() + 1),
            });
        }
        let split = names.len() - TARGET_NAMES.len();
        let mut features = Vec::new();
        let mut targets = Vec::new();
        for (idx, line) in lines {
            let values: Vec<f64> = line
                .split(',')
                .map(|f| {
                    f.trim().parse::<f64>().map_err(|_| MlError::Parse {
                        line: idx + 1,
                        msg: format!("`{}` is not a number", f.trim()),
                    })
                })
                .collect::<Result<_, _>>()?;
            if values.len() != names.len() {
                return Err(MlError::Parse {
                    line: idx + 1,
                    msg: format!("expected {} columns, found {}", names.len(), values.len()),
                });
            }
            features.push(values[..split].to_vec());
            targets.push(values[split..].to_vec());
        }
        Dataset::new(names[..split].to_vec(), names[split..].to_vec(), features, targets)
    }
}

/// One row per sweep entry: features (a_srp, A/M, M) and the position of the
/// perturbed orbit at argument of latitude `reference_u_deg`.
pub fn generate_dataset(sweep: &[SweepEntry], cfg: &SrpConfig, reference_u_deg: f64) -> Result<Dataset, MlError> {
    if sweep.is_empty() {
        return Err(MlError::Empty("sweep".into()));
    }
    let mut features = Vec::with_capacity(sweep.len());
    let mut targets = Vec::with_capacity(sweep.len());
    for entry in sweep {
        let mut el = entry.elements;
        el.true_anomaly = crate::timeframe::normalize_angle(reference_u_deg.to_radians() - el.argp);
        let r = elements_to_state(&el).r;
        features.push(vec![entry.a_srp_km_day2, cfg.area_to_mass(), cfg.mass]);
        targets.push(vec![r.x, r.y, r.z]);
    }
    Dataset::new(
        FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        TARGET_NAMES.iter().map(|s| s.to_string()).collect(),
        features,
        targets,
    )
}

/// Seeded shuffle, then the first round(ratio·N) rows train.
pub fn split_dataset(ds: &Dataset, ratio: f64, seed: u64) -> Result<(Dataset, Dataset), MlError> {
    if ds.len() < 5 {
        return Err(MlError::TooFewRows(ds.len()));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(MlError::InvalidParameter(format!("split ratio {ratio} outside (0, 1)")));
    }
    let n_train = (ratio * ds.len() as f64).round() as usize;
    if n_train == 0 || n_train == ds.len() {
        return Err(MlError::InvalidParameter(format!(
            "split ratio {ratio} leaves an empty partition of {} rows",
            ds.len()
        )));
    }
    let mut idx: Vec<usize> = (0..ds.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok((ds.subset(&idx[..n_train]), ds.subset(&idx[n_train..])))
}

/// Per-feature z-score statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct NormStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl NormStats {
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, MlError> {
        if x.len() != self.mean.len() {
            return Err(MlError::Shape(format!(
                "expected {} features, got {}",
                self.mean.len(),
                x.len()
            )));
        }
        Ok(x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect())
    }
}

/// Population z-score per column. Columns constant to within 1e-12 relative
/// get std 1 and so map to (nearly) 0.
pub fn normalize_features(x: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, NormStats), MlError> {
    let first = x.first().ok_or_else(|| MlError::Empty("feature matrix".into()))?;
    let d = first.len();
    if x.iter().any(|row| row.len() != d) {
        return Err(MlError::Shape("ragged feature matrix".into()));
    }
    let m = x.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / m).collect();
    let std: Vec<f64> = (0..d)
        .map(|j| {
            let var = x.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / m;
            let s = var.sqrt();
            if s > 0.0 && s > 1e-12 * mean[j].abs() {
                s
            } else {
                1.0
            }
        })
        .collect();
    let stats = NormStats { mean, std };
    let normalized = x.iter().map(|r| stats.apply(r)).collect::<Result<_, _>>()?;
    Ok((normalized, stats))
}

fn residuals(x: &[Vec<f64>], y: &[f64], w: &[f64], b: f64) -> Vec<f64> {
    x.iter()
        .zip(y)
        .map(|(row, yi)| row.iter().zip(w).map(|(a, c)| a * c).sum::<f64>() + b - yi)
        .collect()
}

/// J = 1/(2m) Σ (w·x + b − y)².
pub fn cost(x: &[Vec<f64>], y: &[f64], w: &[f64], b: f64) -> f64 {
    let r = residuals(x, y, w, b);
    r.iter().map(|e| e * e).sum::<f64>() / (2.0 * y.len() as f64)
}

/// (∂J/∂w, ∂J/∂b).
pub fn gradient(x: &[Vec<f64>], y: &[f64], w: &[f64], b: f64) -> (Vec<f64>, f64) {
    let r = residuals(x, y, w, b);
    let m = y.len() as f64;
    let gw = (0..w.len())
        .map(|j| x.iter().zip(&r).map(|(row, e)| e * row[j]).sum::<f64>() / m)
        .collect();
    let gb = r.iter().sum::<f64>() / m;
    (gw, gb)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Cost before each update followed by the final cost.
    pub loss_history: Vec<f64>,
}

/// Batch gradient descent from zero initialisation on already-normalised
/// features.
pub fn gradient_descent(x: &[Vec<f64>], y: &[f64], lr: f64, epochs: usize) -> Result<LinearFit, MlError> {
    if x.is_empty() {
        return Err(MlError::Empty("training split".into()));
    }
    if x.len() != y.len() {
        return Err(MlError::Shape(format!("{} rows but {} targets", x.len(), y.len())));
    }
    if epochs == 0 {
        return Err(MlError::InvalidParameter("epochs must be >= 1".into()));
    }
    if !(lr >= 0.0 && lr.is_finite()) {
        return Err(MlError::InvalidParameter(format!("learning rate {lr} must be >= 0")));
    }
    let mut w = vec![0.0; x[0].len()];
    let mut b = 0.0;
    let mut history = Vec::with_capacity(epochs + 1);
    for epoch in 0..epochs {
        let j = cost(x, y, &w, b);
        if !j.is_finite() {
            return Err(MlError::Diverged { lr, epoch });
        }
        history.push(j);
        let (gw, gb) = gradient(x, y, &w, b);
        for (wj, g) in w.iter_mut().zip(gw) {
            *wj -= lr * g;
        }
        b -= lr * gb;
    }
    let j = cost(x, y, &w, b);
    if !j.is_finite() {
        return Err(MlError::Diverged { lr, epoch: epochs });
    }
    history.push(j);
    Ok(LinearFit {
        weights: w,
        bias: b,
        loss_history: history,
    })
}

/// One scalar-output regressor y = w·z(x) + b, z the stored z-score.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionModel {
    pub target: String,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub stats: NormStats,
    pub lr: f64,
    pub epochs: usize,
    pub loss_history: Vec<f64>,
}

impl RegressionModel {
    pub fn predict(&self, x: &[f64]) -> Result<f64, MlError> {
        let z = self.stats.apply(x)?;
        Ok(z.iter().zip(&self.weights).map(|(a, c)| a * c).sum::<f64>() + self.bias)
    }

    /// Weights and bias mapped back to raw feature units.
    pub fn raw_coefficients(&self) -> (Vec<f64>, f64) {
        let w: Vec<f64> = self.weights.iter().zip(&self.stats.std).map(|(w, s)| w / s).collect();
        let b = self.bias - w.iter().zip(&self.stats.mean).map(|(w, m)| w * m).sum::<f64>();
        (w, b)
    }
}

/// Independent per-target regressors over a shared feature normalisation.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSet {
    pub feature_names: Vec<String>,
    pub models: Vec<RegressionModel>,
}

pub fn train(train: &Dataset, lr: f64, epochs: usize) -> Result<ModelSet, MlError> {
    let (z, stats) = normalize_features(&train.features)?;
    let models = train
        .target_names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let fit = gradient_descent(&z, &train.target_column(j), lr, epochs)?;
            Ok(RegressionModel {
                target: name.clone(),
                weights: fit.weights,
                bias: fit.bias,
                stats: stats.clone(),
                lr,
                epochs,
                loss_history: fit.loss_history,
            })
        })
        .collect::<Result<_, MlError>>()?;
    Ok(ModelSet {
        feature_names: train.feature_names.clone(),
        models,
    })
}

impl ModelSet {
    pub fn target_names(&self) -> Vec<String> {
        self.models.iter().map(|m| m.target.clone()).collect()
    }

    /// One prediction per target.
    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>, MlError> {
        self.models.iter().map(|m| m.predict(x)).collect()
    }

    pub fn predict_batch(&self, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, MlError> {
        x.iter().map(|row| self.predict(row)).collect()
    }

    /// Validation MAPE per target, in percent.
    pub fn evaluate(&self, ds: &Dataset) -> Result<Vec<f64>, MlError> {
        let pred = self.predict_batch(&ds.features)?;
        (0..self.models.len())
            .map(|j| {
                let p: Vec<f64> = pred.iter().map(|row| row[j]).collect();
                mape(&p, &ds.target_column(j))
            })
            .collect()
    }

    /// Plain-text `key=value` model file.
    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        let _ = writeln!(out, "features={}", self.feature_names.join(","));
        let _ = writeln!(out, "targets={}", self.target_names().join(","));
        for m in &self.models {
            let t = &m.target;
            let _ = writeln!(out, "{t}.weights={}", join(&m.weights));
            let _ = writeln!(out, "{t}.bias={:e}", m.bias);
            let _ = writeln!(out, "{t}.mean={}", join(&m.stats.mean));
            let _ = writeln!(out, "{t}.std={}", join(&m.stats.std));
            let _ = writeln!(out, "{t}.lr={:e}", m.lr);
            let _ = writeln!(out, "{t}.epochs={}", m.epochs);
            let _ = writeln!(out, "{t}.final_loss={:e}", m.loss_history.last().copied().unwrap_or(f64::NAN));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, MlError> {
        let mut map: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| MlError::Parse {
                line: idx + 1,
                msg: "expected key=value".into(),
            })?;
            map.insert(k.trim().to_string(), (idx + 1, v.trim().to_string()));
        }
        let get = |key: &str| {
            map.get(key).ok_or_else(|| MlError::Parse {
                line: 0,
                msg: format!("missing key `{key}`"),
            })
        };
        let floats = |key: &str| -> Result<Vec<f64>, MlError> {
            let (line, v) = get(key)?;
            v.split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| MlError::Parse {
                        line: *line,
                        msg: format!("`{s}` is not a number"),
                    })
                })
                .collect()
        };
        let names = |key: &str| -> Result<Vec<String>, MlError> {
            Ok(get(key)?.1.split(',').map(|s| s.trim().to_string()).collect())
        };
        let feature_names = names("features")?;
        let mut models = Vec::new();
        for target in names("targets")? {
            let scalar = |suffix: &str| -> Result<f64, MlError> {
                let v = floats(&format!("{target}.{suffix}"))?;
                v.first().copied().ok_or_else(|| MlError::Parse {
                    line: 0,
                    msg: format!("empty `{target}.{suffix}`"),
                })
            };
            let weights = floats(&format!("{target}.weights"))?;
            let mean = floats(&format!("{target}.mean"))?;
            let std = floats(&format!("{target}.std"))?;
            if weights.len() != feature_names.len() || mean.len() != weights.len() || std.len() != weights.len() {
                return Err(MlError::Shape(format!("model arrays for `{target}` disagree with features")));
            }
            models.push(RegressionModel {
                weights,
                bias: scalar("bias")?,
                stats: NormStats { mean, std },
                lr: scalar("lr")?,
                epochs: scalar("epochs")? as usize,
                loss_history: vec![scalar("final_loss")?],
                target,
            });
        }
        Ok(ModelSet { feature_names, models })
    }
}

/// Mean absolute percentage error, percent.
pub fn mape(pred: &[f64], actual: &[f64]) -> Result<f64, MlError> {
    if pred.len() != actual.len() {
        return Err(MlError::Shape(format!("{} predictions for {} actuals", pred.len(), actual.len())));
    }
    if actual.is_empty() {
        return Err(MlError::Empty("MAPE of no values".into()));
    }
    let zeros: Vec<usize> = actual
        .iter()
        .enumerate()
        .filter(|(_, a)| **a == 0.0)
        .map(|(i, _)| i)
        .collect();
    if !zeros.is_empty() {
        return Err(MlError::ZeroActual(zeros));
    }
    let sum: f64 = pred.iter().zip(actual).map(|(p, a)| ((p - a) / a).abs()).sum();
    Ok(100.0 * sum / actual.len() as f64)
}

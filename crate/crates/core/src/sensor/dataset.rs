use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::par::maybe_par_map;
use crate::seed::mix_seed;

use super::model::simulate_response_with_tol;
use super::shots::{sample_shots, PRNG_NAME};
use super::{SensorError, SensorParams, SIM_TOL};

/// Identifier of the per-example seed derivation written to manifests:
/// `seed = splitmix64(master ^ (index * 0x9E3779B97F4A7C15))` with the
/// standard splitmix64 finalizer.
pub(crate) const MIX_FUNCTION: &str = "splitmix64-xor-v1";

/// Grid, sampling, and bookkeeping parameters of a dataset run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub omega_tg_min: f64,
    pub omega_tg_max: f64,
    pub omega_tg_count: usize,
    pub xi_min: f64,
    pub xi_max: f64,
    pub xi_count: usize,
    pub repetitions: usize,
    /// Feature count N_p: uniformly spaced sample times, both window
    /// endpoints included.
    pub n_points: usize,
    /// Shots per expectation value N_m.
    pub n_shots: u32,
    /// Acquisition window as fractions of t0.
    pub window_lo_frac: f64,
    pub window_hi_frac: f64,
    pub master_seed: u64,
    pub split_fractions: (f64, f64, f64),
    /// Per-step integration tolerance for the trace simulations.
    pub sim_tol: f64,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        Self {
            omega_tg_min: 1.0,
            omega_tg_max: 25.0,
            omega_tg_count: 241,
            xi_min: -0.3,
            xi_max: 0.3,
            xi_count: 11,
            repetitions: 20,
            n_points: 101,
            n_shots: 100,
            window_lo_frac: 0.5,
            window_hi_frac: 1.0,
            master_seed: 0,
            split_fractions: (0.70, 0.15, 0.15),
            sim_tol: SIM_TOL,
        }
    }
}

impl DatasetSpec {
    /// The reduced grid used by the fast acceptance profile.
    pub fn small_profile(master_seed: u64) -> Self {
        Self {
            omega_tg_count: 61,
            repetitions: 5,
            master_seed,
            ..Self::default()
        }
    }

    pub fn total_rows(&self) -> usize {
        self.omega_tg_count * self.xi_count * self.repetitions
    }

    pub fn validate(&self) -> Result<(), SensorError> {
        let positive = [
            ("omega_tg_count", self.omega_tg_count),
            ("xi_count", self.xi_count),
            ("repetitions", self.repetitions),
            ("n_points", self.n_points),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(SensorError::InvalidSpec(format!("{name} must be >= 1")));
            }
        }
        if self.n_shots == 0 {
            return Err(SensorError::InvalidSpec("n_shots must be >= 1".into()));
        }
        let (a, b, c) = self.split_fractions;
        if (a + b + c - 1.0).abs() > 1e-9 || a < 0.0 || b < 0.0 || c < 0.0 {
            return Err(SensorError::InvalidSpec(
                "split fractions must be non-negative and sum to 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.window_lo_frac)
            || self.window_hi_frac > 1.0
            || self.window_lo_frac >= self.window_hi_frac
        {
            return Err(SensorError::InvalidSpec(
                "window must satisfy 0 <= lo < hi <= 1 (fractions of t0)".into(),
            ));
        }
        Ok(())
    }

    pub fn omega_tg_values(&self) -> Vec<f64> {
        linspace(self.omega_tg_min, self.omega_tg_max, self.omega_tg_count)
    }

    pub fn xi_values(&self) -> Vec<f64> {
        linspace(self.xi_min, self.xi_max, self.xi_count)
    }
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Everything needed to reproduce a dataset bit for bit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub sensor: SensorParams,
    pub spec: DatasetSpec,
    pub prng: String,
    pub mix_function: String,
    pub feature_grid: String,
    pub rows: usize,
    pub code_version: String,
}

/// Simulates one noiseless trace per grid point (repetitions only differ in
/// shot noise), samples shots with per-example seeds, and writes
/// `data.csv` plus `manifest.json` into `out_dir`. Row order, seed
/// derivation, and float formatting are all fixed, so equal inputs produce
/// byte-identical files regardless of how the traces were scheduled.
pub fn generate_dataset(
    spec: &DatasetSpec,
    params: &SensorParams,
    out_dir: &Path,
) -> Result<DatasetManifest, SensorError> {
    spec.validate()?;
    params
        .validate()
        .map_err(SensorError::InvalidSpec)?;
    let t0 = params.t0.ok_or(SensorError::MissingReferencePeriod)?;

    let omega_values = spec.omega_tg_values();
    let xi_values = spec.xi_values();

    // t = 0 is always simulated so the P_D(0) = 1 anchor is checked even
    // when the window starts later.
    let window: Vec<f64> = linspace(
        spec.window_lo_frac * t0,
        spec.window_hi_frac * t0,
        spec.n_points,
    );
    let mut times = Vec::with_capacity(spec.n_points + 1);
    if window[0] > 0.0 {
        times.push(0.0);
    }
    times.extend_from_slice(&window);
    let skip = times.len() - spec.n_points;

    let grid: Vec<(usize, usize)> = (0..omega_values.len())
        .flat_map(|i| (0..xi_values.len()).map(move |j| (i, j)))
        .collect();
    let traces: Vec<Result<Vec<f64>, SensorError>> = maybe_par_map(grid.clone(), |(i, j)| {
        let mut p = params.clone();
        p.omega_tg_amp = omega_values[i];
        p.xi = xi_values[j];
        simulate_response_with_tol(&p, &times, spec.sim_tol)
            .map(|trace| trace.pd[skip..].to_vec())
            .map_err(|e| match e {
                SensorError::Quantum(q) => SensorError::GridPointFailed {
                    omega_tg: omega_values[i],
                    xi: xi_values[j],
                    source: q,
                },
                other => other,
            })
    });

    std::fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let csv_path = out_dir.join("data.csv");
    let file = std::fs::File::create(&csv_path).map_err(|e| io_err(&csv_path, e))?;
    let mut out = std::io::BufWriter::new(file);

    let mut header = String::from("omega_tg_khz,xi_khz,rep,seed");
    for k in 0..spec.n_points {
        header.push_str(&format!(",p_{k:03}"));
    }
    header.push('\n');
    out.write_all(header.as_bytes())
        .map_err(|e| io_err(&csv_path, e))?;

    for (gi, &(i, j)) in grid.iter().enumerate() {
        let pd = match &traces[gi] {
            Ok(pd) => pd,
            Err(e) => {
                return Err(SensorError::InvalidSpec(format!("{e}")));
            }
        };
        let trace = super::ResponseTrace {
            times: window.clone(),
            pd: pd.clone(),
            norm_drift: 0.0,
        };
        for rep in 0..spec.repetitions {
            let example_index = (i * xi_values.len() + j) * spec.repetitions + rep;
            let seed = mix_seed(spec.master_seed, example_index as u64);
            let features = sample_shots(&trace, spec.n_shots, seed);
            let mut line = format!(
                "{},{},{rep},{seed}",
                fmt_f64(omega_values[i]),
                fmt_f64(xi_values[j])
            );
            for f in features {
                line.push(',');
                line.push_str(&fmt_f64(f));
            }
            line.push('\n');
            out.write_all(line.as_bytes()).map_err(|e| io_err(&csv_path, e))?;
        }
    }
    out.flush().map_err(|e| io_err(&csv_path, e))?;

    let manifest = DatasetManifest {
        sensor: SensorParams {
            t0: Some(t0),
            ..params.clone()
        },
        spec: spec.clone(),
        prng: PRNG_NAME.into(),
        mix_function: MIX_FUNCTION.into(),
        feature_grid: "uniform-inclusive".into(),
        rows: spec.total_rows(),
        code_version: crate::VERSION.into(),
    };
    let manifest_path = out_dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&manifest_path, json + "\n").map_err(|e| io_err(&manifest_path, e))?;

    Ok(manifest)
}

fn io_err(path: &Path, source: std::io::Error) -> SensorError {
    SensorError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Row indices of the train/validation/test partition.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

/// Deterministic shuffled partition: validation and test sizes use the
/// floor rule, the remainder goes to train. Indices are sorted within each
/// set.
pub fn split_dataset(
    n_rows: usize,
    fractions: (f64, f64, f64),
    seed: u64,
) -> Result<SplitIndices, SensorError> {
    let (ftrain, fval, ftest) = fractions;
    if (ftrain + fval + ftest - 1.0).abs() > 1e-9 || ftrain < 0.0 || fval < 0.0 || ftest < 0.0 {
        return Err(SensorError::InvalidSpec(
            "split fractions must be non-negative and sum to 1".into(),
        ));
    }
    let mut indices: Vec<usize> = (0..n_rows).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let n_val = (fval * n_rows as f64).floor() as usize;
    let n_test = (ftest * n_rows as f64).floor() as usize;
    let n_train = n_rows - n_val - n_test;
    let mut train: Vec<usize> = indices[..n_train].to_vec();
    let mut validation: Vec<usize> = indices[n_train..n_train + n_val].to_vec();
    let mut test: Vec<usize> = indices[n_train + n_val..].to_vec();
    train.sort_unstable();
    validation.sort_unstable();
    test.sort_unstable();
    Ok(SplitIndices {
        train,
        validation,
        test,
    })
}

impl SplitIndices {
    pub fn write(&self, path: &Path) -> Result<(), SensorError> {
        let json = serde_json::to_string_pretty(self).expect("split serializes");
        std::fs::write(path, json + "\n").map_err(|e| io_err(path, e))
    }

    pub fn read(path: &Path) -> Result<Self, SensorError> {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        serde_json::from_str(&text).map_err(|e| SensorError::Malformed {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
    }
}

/// In-memory dataset rows: shot features and the two targets.
#[derive(Debug, Clone)]
pub struct DatasetRows {
    pub features: Vec<Vec<f64>>,
    /// `(omega_tg, xi)` in kHz.
    pub targets: Vec<[f64; 2]>,
    pub reps: Vec<usize>,
    pub seeds: Vec<u64>,
}

impl DatasetRows {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

pub fn read_dataset(path: &Path) -> Result<DatasetRows, SensorError> {
    let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| malformed(path, "empty file"))?
        .map_err(|e| io_err(path, e))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < 5 || columns[..4] != ["omega_tg_khz", "xi_khz", "rep", "seed"] {
        return Err(malformed(path, "unexpected header"));
    }
    let n_features = columns.len() - 4;

    let mut rows = DatasetRows {
        features: Vec::new(),
        targets: Vec::new(),
        reps: Vec::new(),
        seeds: Vec::new(),
    };
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n_features + 4 {
            return Err(malformed(path, &format!("row {} has wrong arity", lineno + 2)));
        }
        let parse = |s: &str| -> Result<f64, SensorError> {
            s.parse::<f64>()
                .map_err(|_| malformed(path, &format!("bad float {s:?} on row {}", lineno + 2)))
        };
        rows.targets.push([parse(fields[0])?, parse(fields[1])?]);
        rows.reps.push(
            fields[2]
                .parse()
                .map_err(|_| malformed(path, "bad rep"))?,
        );
        rows.seeds.push(
            fields[3]
                .parse()
                .map_err(|_| malformed(path, "bad seed"))?,
        );
        rows.features
            .push(fields[4..].iter().map(|s| parse(s)).collect::<Result<_, _>>()?);
    }
    Ok(rows)
}

fn malformed(path: &Path, reason: &str) -> SensorError {
    SensorError::Malformed {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_arithmetic() {
        let spec = DatasetSpec::default();
        assert_eq!(spec.total_rows(), 53_020);
        assert_eq!(DatasetSpec::small_profile(0).total_rows(), 61 * 11 * 5);
    }

    #[test]
    fn split_sizes_floor_rule() {
        let s = split_dataset(53_020, (0.70, 0.15, 0.15), 9).unwrap();
        assert_eq!(s.train.len(), 37_114);
        assert_eq!(s.validation.len(), 7_953);
        assert_eq!(s.test.len(), 7_953);

        let all = split_dataset(10, (1.0, 0.0, 0.0), 9).unwrap();
        assert_eq!(all.train.len(), 10);
        assert!(all.validation.is_empty() && all.test.is_empty());
    }

    #[test]
    fn split_deterministic_and_disjoint() {
        let a = split_dataset(100, (0.7, 0.15, 0.15), 5).unwrap();
        let b = split_dataset(100, (0.7, 0.15, 0.15), 5).unwrap();
        assert_eq!(a, b);
        let mut seen = vec![false; 100];
        for &i in a.train.iter().chain(&a.validation).chain(&a.test) {
            assert!(!seen[i]);
            seen[i] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn tiny_dataset_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let spec = DatasetSpec {
            omega_tg_count: 1,
            xi_min: 0.0,
            xi_max: 0.0,
            xi_count: 1,
            repetitions: 1,
            n_points: 7,
            master_seed: 11,
            ..DatasetSpec::default()
        };
        let params = SensorParams {
            t0: Some(2.0f64.sqrt()),
            ..SensorParams::default()
        };
        let manifest = generate_dataset(&spec, &params, dir.path()).unwrap();
        assert_eq!(manifest.rows, 1);
        let rows = read_dataset(&dir.path().join("data.csv")).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows.features[0].len(), 7);
        assert_eq!(rows.targets[0], [1.0, 0.0]);
        assert_eq!(rows.seeds[0], crate::seed::mix_seed(11, 0));
    }

    #[test]
    fn byte_identical_reruns() {
        let spec = DatasetSpec {
            omega_tg_count: 2,
            xi_count: 2,
            repetitions: 2,
            n_points: 5,
            master_seed: 3,
            sim_tol: 1e-6,
            ..DatasetSpec::default()
        };
        let params = SensorParams {
            t0: Some(2.0f64.sqrt()),
            drop_counter_rotating: true,
            ..SensorParams::default()
        };
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        generate_dataset(&spec, &params, d1.path()).unwrap();
        generate_dataset(&spec, &params, d2.path()).unwrap();
        let a = std::fs::read(d1.path().join("data.csv")).unwrap();
        let b = std::fs::read(d2.path().join("data.csv")).unwrap();
        assert_eq!(a, b);
        let am = std::fs::read(d1.path().join("manifest.json")).unwrap();
        let bm = std::fs::read(d2.path().join("manifest.json")).unwrap();
        assert_eq!(am, bm);
    }
}

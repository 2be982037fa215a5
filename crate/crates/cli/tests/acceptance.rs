//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the verdict lines always reach the
//! console. Exits non-zero if any criterion fails.
//!
//! Criterion 7 compares against reference total errors only when the original
//! 126-patient table is supplied through `QNMC_IPF_DATA` and `QNMC_IPF_SCHEMA`;
//! otherwise it exercises the pipeline on the synthetic fixture.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use qnmc::classifier::{fit, ClassifierSpec};
use qnmc::dataset::synthetic::{BananaConfig, GaussianConfig, GeneratorSpec, MoonConfig};
use qnmc::dataset::{ClassLabel, Dataset};
use qnmc::encoding::{encode, inverse_stereographic, EncoderKind};
use qnmc::evaluation::{
    run_experiment, run_predictions, ClassifierEntry, DatasetSource, EvaluationReport, ExperimentConfig,
    RescaleSetting,
};
use qnmc::matrix::{sym_eigen, trace_distance, DensityMatrix, SymMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;
type Criterion = (u8, &'static str, fn() -> Verdict);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "encoding correctness (exact)", encoding_correctness),
        (2, "trace-distance property suite", trace_distance_properties),
        (3, "eigensolver oracle equivalence", eigensolver_oracle),
        (4, "NMC rescaling argmin-invariance", nmc_invariance),
        (5, "QNMC non-invariance witness", qnmc_non_invariance),
        (6, "synthetic ordering QNMC(SE) > NMC", synthetic_ordering),
        (7, "IPF nine-row grid", ipf_grid),
        (8, "LDA/QDA/NMC reduction on isotropic data", classifier_reduction),
        (9, "end-to-end determinism", end_to_end_determinism),
    ];
    let mut failed = 0;
    for (id, title, check) in criteria {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("[PASS] criterion {id}: {title}: {detail} ({secs:.2}s)"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {id}: {title}: {detail} ({secs:.2}s)");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn max_entry_gap(m: &DensityMatrix, expected: &[[f64; 2]; 2]) -> f64 {
    let mut gap: f64 = 0.0;
    for (r, row) in expected.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            gap = gap.max((m.matrix().get(r, c) - v).abs());
        }
    }
    gap
}

fn encoding_correctness() -> Verdict {
    let cases = [
        ([0.0], EncoderKind::Stereographic, [[0.0, 0.0], [0.0, 1.0]]),
        ([1.0], EncoderKind::Stereographic, [[1.0, 0.0], [0.0, 0.0]]),
        ([1.0], EncoderKind::Informative, [[0.5, 0.5], [0.5, 0.5]]),
    ];
    for (x, kind, expected) in cases {
        let gap = max_entry_gap(&encode(&x, kind).map_err(|e| e.to_string())?, &expected);
        ensure!(gap <= 1e-12, "encode({x:?}, {kind}) off by {gap:e}");
    }
    // exact rationals: |x|² = 2, so the factor is 1/3 and the numerator (2, 2, 1)
    let (num, den) = ([2i64, 2, 1], 3i64);
    let got = inverse_stereographic(&[1.0, 1.0]).map_err(|e| e.to_string())?;
    for (g, n) in got.iter().zip(num) {
        let want = n as f64 / den as f64;
        ensure!((g - want).abs() <= 1e-12, "inverse_stereographic((1,1)) = {got:?}");
    }
    Ok("3 density patterns and SP^-1(1,1) within 1e-12".into())
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Pure with probability 1/3, else a random mixture of up to `dim` pure states.
fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    if rng.random_range(0..3) == 0 {
        return DensityMatrix::pure(&random_unit(rng, dim)).unwrap();
    }
    let k = rng.random_range(2..=dim.max(2));
    let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut m = SymMatrix::zeros(dim);
    for w in weights {
        m.add_scaled(w / total, &SymMatrix::outer(&random_unit(rng, dim))).unwrap();
    }
    DensityMatrix::new(m).unwrap()
}

fn trace_distance_properties() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let d = |a: &DensityMatrix, b: &DensityMatrix| trace_distance(a, b).unwrap();
    let mut worst_sym: f64 = 0.0;
    let mut worst_tri = f64::INFINITY;
    for _ in 0..10_000 {
        let dim = rng.random_range(2..=16);
        let (r, s, w) = (
            random_density(&mut rng, dim),
            random_density(&mut rng, dim),
            random_density(&mut rng, dim),
        );
        let (rs, sr, rw, ws) = (d(&r, &s), d(&s, &r), d(&r, &w), d(&w, &s));
        ensure!((0.0..=1.0 + 1e-9).contains(&rs), "d = {rs} outside [0, 1]");
        worst_sym = worst_sym.max((rs - sr).abs());
        worst_tri = worst_tri.min(rw + ws - rs);
        ensure!((rs - sr).abs() <= 1e-12, "asymmetry {:e}", (rs - sr).abs());
        ensure!(rw + ws >= rs - 1e-9, "triangle inequality broken by {:e}", rs - rw - ws);
    }
    let mut worst_pure: f64 = 0.0;
    for _ in 0..1_000 {
        let dim = rng.random_range(2..=16);
        let (u, v) = (random_unit(&mut rng, dim), random_unit(&mut rng, dim));
        let overlap: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
        let oracle = (1.0 - overlap * overlap).max(0.0).sqrt();
        let got = d(&DensityMatrix::pure(&u).unwrap(), &DensityMatrix::pure(&v).unwrap());
        worst_pure = worst_pure.max((got - oracle).abs());
    }
    ensure!(worst_pure <= 1e-8, "pure-state oracle gap {worst_pure:e}");
    Ok(format!(
        "10000 triples, max asymmetry {worst_sym:e}, min triangle slack {worst_tri:.3e}; 1000 pure pairs, max oracle gap {worst_pure:.1e}"
    ))
}

fn eigensolver_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_2x2: f64 = 0.0;
    for _ in 0..1_000 {
        let (a, b, c) = (
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
        );
        let e = sym_eigen(&SymMatrix::new(2, vec![a, b, b, c]).unwrap()).map_err(|e| e.to_string())?;
        // roots of λ² − (a + c)λ + (ac − b²)
        let mid = 0.5 * (a + c);
        let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        worst_2x2 = worst_2x2.max((e.eigenvalues[0] - (mid - rad)).abs());
        worst_2x2 = worst_2x2.max((e.eigenvalues[1] - (mid + rad)).abs());
    }
    ensure!(worst_2x2 <= 1e-10, "2x2 eigenvalue gap {worst_2x2:e}");
    let (mut worst_rec, mut worst_orth): (f64, f64) = (0.0, 0.0);
    for dim in 1..=32 {
        for _ in 0..8 {
            let mut a = vec![0.0; dim * dim];
            for i in 0..dim {
                for j in i..dim {
                    a[i * dim + j] = rng.random_range(-1.0..1.0);
                    a[j * dim + i] = a[i * dim + j];
                }
            }
            let m = SymMatrix::new(dim, a.clone()).unwrap();
            let e = sym_eigen(&m).map_err(|e| e.to_string())?;
            let (mut rec, mut orth) = (0.0, 0.0);
            for i in 0..dim {
                for j in 0..dim {
                    let r: f64 = (0..dim).map(|k| e.vector(i, k) * e.eigenvalues[k] * e.vector(j, k)).sum();
                    let g: f64 = (0..dim).map(|k| e.vector(k, i) * e.vector(k, j)).sum();
                    rec += (r - a[i * dim + j]).powi(2);
                    orth += (g - if i == j { 1.0 } else { 0.0 }).powi(2);
                }
            }
            worst_rec = worst_rec.max(rec.sqrt());
            worst_orth = worst_orth.max(orth.sqrt());
        }
    }
    ensure!(worst_rec <= 1e-8 && worst_orth <= 1e-8, "reconstruction {worst_rec:e}, orthogonality {worst_orth:e}");
    Ok(format!(
        "1000 2x2 max gap {worst_2x2:.1e}; dims 1..32 reconstruction {worst_rec:.1e}, orthogonality {worst_orth:.1e}"
    ))
}

fn random_gaussian_source(rng: &mut ChaCha8Rng) -> DatasetSource {
    let dim = rng.random_range(2..=5);
    let classes = rng.random_range(2..=4);
    let means = (0..classes)
        .map(|_| (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect())
        .collect();
    let covariances = (0..classes)
        .map(|_| {
            // A Aᵀ + 0.1 I is positive definite
            let a: Vec<f64> = (0..dim * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            (0..dim)
                .map(|i| {
                    (0..dim)
                        .map(|j| {
                            (0..dim).map(|k| a[i * dim + k] * a[j * dim + k]).sum::<f64>()
                                + if i == j { 0.1 } else { 0.0 }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    DatasetSource::Generator {
        spec: GeneratorSpec::Gaussian(GaussianConfig {
            n_per_class: rng.random_range(20..=60),
            means,
            covariances,
        }),
        seed: Some(rng.random()),
    }
}

fn nmc_invariance() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut compared = 0usize;
    for _ in 0..20 {
        let mut cfg = ExperimentConfig::new(
            random_gaussian_source(&mut rng),
            vec![ClassifierEntry::new(ClassifierSpec::nmc())],
        );
        cfg.runs = 10;
        cfg.seed = rng.random();
        let data = cfg.dataset.load(cfg.seed).map_err(|e| e.to_string())?;
        cfg.rescale = Some(RescaleSetting::Uniform(1.0));
        let base = run_predictions(&cfg, &data).map_err(|e| e.to_string())?;
        for t in [0.01, 0.5, 2.0, 100.0] {
            cfg.rescale = Some(RescaleSetting::Uniform(t));
            let scaled = run_predictions(&cfg, &data).map_err(|e| e.to_string())?;
            ensure!(scaled == base, "predictions changed at t = {t}");
            compared += scaled.iter().map(|r| r.test.len()).sum::<usize>();
        }
    }
    Ok(format!("20 datasets x 10 runs x 4 factors, {compared} predictions identical to t = 1"))
}

fn gaussian_config(classifiers: Vec<ClassifierEntry>, runs: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(
        DatasetSource::generator(GeneratorSpec::Gaussian(GaussianConfig::default())),
        classifiers,
    );
    cfg.runs = runs;
    cfg
}

fn qnmc_non_invariance() -> Verdict {
    let mut cfg = gaussian_config(
        vec![ClassifierEntry::new(ClassifierSpec::qnmc(EncoderKind::Stereographic))],
        20,
    );
    let data = cfg.dataset.load(cfg.seed).map_err(|e| e.to_string())?;
    cfg.rescale = Some(RescaleSetting::Uniform(1.0));
    let base = run_predictions(&cfg, &data).map_err(|e| e.to_string())?;
    let mut witnesses = Vec::new();
    for t in [0.1, 0.2, 0.5, 2.0, 5.0, 10.0] {
        cfg.rescale = Some(RescaleSetting::Uniform(t));
        let scaled = run_predictions(&cfg, &data).map_err(|e| e.to_string())?;
        let changed: usize = scaled
            .iter()
            .zip(&base)
            .map(|(a, b)| a.predicted[0].iter().zip(&b.predicted[0]).filter(|(x, y)| x != y).count())
            .sum();
        if changed > 0 {
            witnesses.push(format!("t={t}: {changed}"));
        }
    }
    ensure!(!witnesses.is_empty(), "no factor in the grid changed a prediction");
    Ok(format!("changed predictions vs t = 1 over 20 runs: {}", witnesses.join(", ")))
}

fn synthetic_ordering() -> Verdict {
    let generators = [
        GeneratorSpec::Moon(MoonConfig::default()),
        GeneratorSpec::Gaussian(GaussianConfig::default()),
        GeneratorSpec::Banana(BananaConfig::default()),
    ];
    let mut summary = Vec::new();
    for spec in generators {
        let name = spec.name();
        let mut cfg = ExperimentConfig::new(
            DatasetSource::generator(spec),
            vec![
                ClassifierEntry::new(ClassifierSpec::nmc()),
                ClassifierEntry::new(ClassifierSpec::qnmc(EncoderKind::Stereographic)),
            ],
        );
        cfg.runs = 100;
        let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
        let (nmc, qnmc) = (&report.classifiers[0], &report.classifiers[1]);
        let n = cfg.runs as f64;
        let combined = (nmc.std_accuracy.powi(2) / n + qnmc.std_accuracy.powi(2) / n).sqrt();
        let z = (qnmc.mean_accuracy - nmc.mean_accuracy) / combined;
        summary.push(format!(
            "{name} NMC {:.3}±{:.3} QNMC {:.3}±{:.3} ({z:.1} SE)",
            nmc.mean_accuracy, nmc.std_accuracy, qnmc.mean_accuracy, qnmc.std_accuracy
        ));
        ensure!(z >= 2.0, "{}", summary.join("; "));
    }
    Ok(summary.join("; "))
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_qnmc")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

const BENCH_ROWS: [&str; 9] = [
    "QNMC (SE)",
    "QNMC (IE)",
    "QNMC (IE) Resc 1",
    "QNMC (IE) Resc 2",
    "QNMC (IE) Resc 3",
    "QNMC (IE) Resc 4",
    "NMC",
    "LDA",
    "QDA",
];

/// Reference mean total errors for the original 126-patient table, in `BENCH_ROWS` order.
const REFERENCE_ERRORS: [f64; 9] = [0.455, 0.378, 0.334, 0.341, 0.344, 0.314, 0.495, 0.393, 0.568];

fn ipf_bench(data: &Path, schema: &Path) -> Result<EvaluationReport, String> {
    let out = Command::new(bin())
        .args(["ipf-bench", "--format", "json", "--seed", "7"])
        .arg(data)
        .arg("--schema")
        .arg(schema)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "ipf-bench failed: {}", String::from_utf8_lossy(&out.stderr));
    EvaluationReport::from_json(&String::from_utf8_lossy(&out.stdout)).map_err(|e| e.to_string())
}

fn check_grid(report: &EvaluationReport) -> Result<(), String> {
    let names: Vec<&str> = report.classifiers.iter().map(|c| c.name.as_str()).collect();
    ensure!(names == BENCH_ROWS, "rows {names:?}");
    ensure!(report.run_seeds.len() == 50, "{} runs", report.run_seeds.len());
    ensure!(
        report.dataset.patterns == 126 && report.dataset.features.len() == 12 && report.dataset.labels.len() == 3,
        "dataset shape {:?}",
        report.dataset
    );
    for c in &report.classifiers {
        ensure!(c.accuracies.iter().all(|a| (0.0..=1.0).contains(a)), "{}: accuracy out of range", c.name);
        ensure!((c.mean_error - (1.0 - c.mean_accuracy)).abs() <= 1e-12, "{}: error != 1 - accuracy", c.name);
        let mean = c.accuracies.iter().sum::<f64>() / c.accuracies.len() as f64;
        ensure!((mean - c.mean_accuracy).abs() <= 1e-12, "{}: mean mismatch", c.name);
    }
    Ok(())
}

fn ipf_grid() -> Verdict {
    let supplied = std::env::var_os("QNMC_IPF_DATA").zip(std::env::var_os("QNMC_IPF_SCHEMA"));
    if let Some((data, schema)) = supplied {
        let report = ipf_bench(Path::new(&data), Path::new(&schema))?;
        check_grid(&report)?;
        let gaps: Vec<f64> = report
            .classifiers
            .iter()
            .zip(REFERENCE_ERRORS)
            .map(|(c, r)| (c.mean_error - r).abs())
            .collect();
        let worst = gaps.iter().cloned().fold(0.0, f64::max);
        ensure!(worst <= 0.05, "largest gap to reference total error {worst:.3} ({gaps:?})");
        return Ok(format!("supplied table: 9 rows, max gap to reference {worst:.3}"));
    }

    let (data, schema) = (fixture("ipf_synthetic.csv"), fixture("ipf_schema.toml"));
    let report = ipf_bench(&data, &schema)?;
    check_grid(&report)?;
    let block1 = ["FVC%", "DLCO%", "Age", "GAP Sex", "GAP FVC", "GAP DLCO", "GAP Age"];
    ensure!(
        !report.dataset.features.iter().any(|f| block1.contains(&f.as_str())),
        "block-1 column in the feature matrix"
    );
    let dump = Command::new(bin())
        .args(["encode", "--encoder", "ie", "--schema"])
        .arg(&schema)
        .arg(&data)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(dump.status.success(), "encode failed");
    let text = String::from_utf8_lossy(&dump.stdout);
    let body: Vec<&str> = text.lines().skip(1).collect();
    ensure!(body.len() == 126 * 13, "{} dump lines", body.len());
    ensure!(body.iter().all(|l| l.split(',').count() == 2 + 13), "dump rows are not 13 wide");
    let nmc = report.classifier("NMC").unwrap().mean_error;
    Ok(format!(
        "no original table supplied (set QNMC_IPF_DATA/QNMC_IPF_SCHEMA); synthetic fixture: 9 rows x 50 runs, 126 13x13 IE patterns, NMC error {nmc:.3}"
    ))
}

/// A point cloud closed under 90° rotation about its mean has scatter
/// `(a + c)·I` exactly; the second class is a translate of the first.
fn isotropic_pair(rng: &mut ChaCha8Rng, shift: [f64; 2]) -> Dataset {
    let base: Vec<[f64; 2]> = (0..15).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
    let m = [
        base.iter().map(|p| p[0]).sum::<f64>() / 15.0,
        base.iter().map(|p| p[1]).sum::<f64>() / 15.0,
    ];
    let mut cloud = Vec::new();
    for p in &base {
        let (dx, dy) = (p[0] - m[0], p[1] - m[1]);
        cloud.push([dx, dy]);
        cloud.push([-dy, dx]);
    }
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (label, offset) in [("A", [0.0, 0.0]), ("B", shift)] {
        for p in &cloud {
            rows.push(vec![p[0] + offset[0], p[1] + offset[1]]);
            labels.push(ClassLabel::from(label));
        }
    }
    Dataset::new(vec!["x".into(), "y".into()], rows, labels).unwrap()
}

fn classifier_reduction() -> Verdict {
    const TIE_TOLERANCE: f64 = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut checked, mut skipped) = (0, 0);
    for _ in 0..10 {
        let shift = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let train = isotropic_pair(&mut rng, shift);
        let models = [
            fit(&ClassifierSpec::nmc(), &train, None),
            fit(&ClassifierSpec::lda(1e-6), &train, None),
            fit(&ClassifierSpec::qda(1e-6), &train, None),
        ];
        let [nmc, lda, qda] = models.map(|m| m.unwrap());
        let (ma, mb) = match nmc.state() {
            qnmc::ModelState::Nmc { centroids } => (centroids[0].clone(), centroids[1].clone()),
            _ => unreachable!(),
        };
        let gap = ((ma[0] - mb[0]).powi(2) + (ma[1] - mb[1]).powi(2)).sqrt();
        for _ in 0..100 {
            let x = [rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)];
            let da: f64 = (x[0] - ma[0]).powi(2) + (x[1] - ma[1]).powi(2);
            let db: f64 = (x[0] - mb[0]).powi(2) + (x[1] - mb[1]).powi(2);
            // distance from the perpendicular bisector of the two means
            if (da - db).abs() / (2.0 * gap) <= TIE_TOLERANCE {
                skipped += 1;
                continue;
            }
            let p = [nmc.predict_index(&x), lda.predict_index(&x), qda.predict_index(&x)].map(|r| r.unwrap());
            ensure!(p[0] == p[1] && p[1] == p[2], "disagreement at {x:?}: NMC/LDA/QDA = {p:?}");
            checked += 1;
        }
    }
    Ok(format!("10 datasets x 100 points, {checked} agree, {skipped} within {TIE_TOLERANCE:e} of the boundary"))
}

fn end_to_end_determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("moon.toml");
    std::fs::write(
        &config,
        "runs = 100\nseed = 42\n\n[dataset]\nsource = \"generator\"\ngenerator = \"moon\"\n\n\
         [[classifiers]]\nkind = \"nmc\"\n\n[[classifiers]]\nkind = \"qnmc\"\nencoder = \"se\"\n",
    )
    .map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for name in ["first.json", "second.json"] {
        let path = dir.path().join(name);
        let status = Command::new(bin())
            .args(["evaluate", "--format", "json", "-o"])
            .arg(&path)
            .arg(&config)
            .status()
            .map_err(|e| e.to_string())?;
        ensure!(status.success(), "evaluate exited with {status}");
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure!(outputs[0] == outputs[1], "reports differ");
    let report = EvaluationReport::from_json(&String::from_utf8_lossy(&outputs[0])).map_err(|e| e.to_string())?;
    ensure!(report.classifiers.len() == 2, "{} classifier rows", report.classifiers.len());
    Ok(format!("two evaluate runs wrote identical {}-byte reports", outputs[0].len()))
}

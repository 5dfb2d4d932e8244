use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::{
    BatchArgs, Cli, CliError, Command, CorrelateArgs, DistancesArgs, FitArgs, ImageArgs, OutputFormat, RoiSweepArgs,
    SimModel, SimulateArgs, EXIT_OK, EXIT_PARTIAL,
};
use crate::distances::{distance_report, DistanceReport, DistanceSettings};
use crate::distfit::{rank_families, Family};
use crate::ingest::{self, PixelMatrix, RoiSpec};
use crate::pipeline::{self, SweepRow};
use crate::sample::AmplitudeSample;
use crate::sim::{self, SimConfig};
use crate::stats::{fisher_compare, linear_regression, spearman_rho, PairedSeries};
use crate::{Error, VERSION};

pub(super) fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Simulate(a) => simulate(cli, a, stdout, stderr),
        Command::Distances(a) => distances(cli, a, stdout, stderr),
        Command::Fit(a) => fit(cli, a, stdout, stderr),
        Command::Batch(a) => batch(cli, a, stdout, stderr),
        Command::RoiSweep(a) => roi_sweep(cli, a, stdout, stderr),
        Command::Correlate(a) => correlate(cli, a, stdout, stderr),
    }
}

fn run_record(cli: &Cli) -> Map<String, Value> {
    let mut record = Map::new();
    record.insert("version".into(), json!(VERSION));
    record.insert("config".into(), serde_json::to_value(cli).expect("arguments serialize"));
    record
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".run.json");
    PathBuf::from(name)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Data(Error::Io(e)))
}

/// Writes a JSON document (run record plus `payload`) or CSV text. CSV
/// output carries its run record in a `<out>.run.json` sidecar, or on
/// stderr when writing to stdout.
fn emit(
    cli: &Cli,
    format: OutputFormat,
    payload: Map<String, Value>,
    csv: impl FnOnce() -> Result<String, CliError>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let mut record = run_record(cli);
    let text = match format {
        OutputFormat::Json => {
            record.extend(payload);
            let mut s = serde_json::to_string_pretty(&Value::Object(record)).map_err(Error::from)?;
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let text = csv()?;
            let record = serde_json::to_string(&Value::Object(record)).map_err(Error::from)?;
            match &cli.global.out {
                Some(out) => write_file(&sidecar_path(out), format!("{record}\n").as_bytes())?,
                None => {
                    let _ = writeln!(stderr, "run: {record}");
                }
            }
            text
        }
    };
    match &cli.global.out {
        Some(out) => write_file(out, text.as_bytes()),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Data(Error::Io(e))),
    }
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(Error::from)?;
    for row in rows {
        w.write_record(row).map_err(Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn simulate(cli: &Cli, a: &SimulateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let seed = cli.global.seed;
    let usage = |m: &str| Err(CliError::Usage(m.into()));
    let sample = match a.model {
        SimModel::Fixed => {
            if a.alpha.is_some() {
                return usage("--alpha does not apply to the fixed model");
            }
            let Some(count) = a.scatterers else {
                return usage("the fixed model needs --scatterers");
            };
            if !(count >= 1.0 && count.fract() == 0.0 && count < u64::MAX as f64) {
                return usage("--scatterers must be a positive whole number for the fixed model");
            }
            sim::sample_phasor_sum(&SimConfig::fixed(a.n, count as u64, seed))
        }
        SimModel::Negbin => {
            let (Some(mean), Some(alpha)) = (a.scatterers, a.alpha) else {
                return usage("the negbin model needs --scatterers and --alpha");
            };
            sim::sample_phasor_sum(&SimConfig::neg_binomial(a.n, mean, alpha, seed))
        }
        SimModel::Rayleigh => {
            if a.alpha.is_some() || a.scatterers.is_some() {
                return usage("the rayleigh model takes neither --alpha nor --scatterers");
            }
            sim::sample_rayleigh(a.n, crate::benchmark::SIGMA, seed)
        }
        SimModel::K => {
            if a.scatterers.is_some() {
                return usage("--scatterers does not apply to the k model");
            }
            let Some(alpha) = a.alpha else {
                return usage("the k model needs --alpha");
            };
            sim::sample_k(a.n, alpha, seed)
        }
    }
    .map_err(|e| match e {
        Error::InvalidParameter { .. } => CliError::Usage(e.to_string()),
        e => CliError::Data(e),
    })?;

    let mut body = Vec::with_capacity(sample.len() * 20);
    ingest::write_amplitude_csv(&sample, &mut body)?;
    let record = serde_json::to_string(&Value::Object(run_record(cli))).map_err(Error::from)?;
    match &cli.global.out {
        Some(out) => {
            write_file(out, &body)?;
            write_file(&sidecar_path(out), format!("{record}\n").as_bytes())?;
        }
        None => {
            stdout.write_all(&body).map_err(|e| CliError::Data(Error::Io(e)))?;
            let _ = writeln!(stderr, "run: {record}");
        }
    }
    Ok(EXIT_OK)
}

fn ensure_readable(path: &Path) -> Result<(), CliError> {
    fs::metadata(path).map(|_| ()).map_err(|source| {
        CliError::Data(Error::Read {
            path: path.to_path_buf(),
            source,
        })
    })
}

fn load_pixels(path: &Path, image: &ImageArgs) -> Result<PixelMatrix, CliError> {
    let raw = match image.image_format {
        Some(f) => ingest::load_image(path, f)?,
        None => ingest::load_image_auto(path)?,
    };
    Ok(image.mapping().to_amplitudes(&raw)?)
}

/// Normalized sample from an amplitude CSV or an image ROI.
fn load_sample(path: &Path, roi: Option<RoiSpec>, image: &ImageArgs) -> Result<AmplitudeSample, CliError> {
    ensure_readable(path)?;
    if ingest::is_amplitude_csv(path) {
        if roi.is_some() {
            return Err(CliError::Usage("--roi applies to images, not amplitude CSV files".into()));
        }
        return Ok(ingest::normalize_rms(&ingest::read_amplitude_csv(path)?)?);
    }
    let Some(roi) = roi else {
        return Err(CliError::Usage(format!(
            "{} is an image; --roi x0,y0,width,height is required",
            path.display()
        )));
    };
    Ok(pipeline::roi_sample(&load_pixels(path, image)?, &roi)?)
}

fn report_json(report: &DistanceReport) -> Map<String, Value> {
    match serde_json::to_value(report).expect("report serializes") {
        Value::Object(m) => m,
        _ => unreachable!(),
    }
}

fn report_cells(report: &DistanceReport) -> Vec<String> {
    let mut cells: Vec<String> = report.values().iter().map(|v| v.to_string()).collect();
    cells.push(report.n.to_string());
    cells
}

fn distances(cli: &Cli, a: &DistancesArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let settings = a.grid.settings()?;
    let sample = load_sample(&a.input.input, a.input.roi, &a.input.image)?;
    let report = distance_report(&sample, &settings)?;
    emit(
        cli,
        cli.global.format,
        report_json(&report),
        || csv_text(&["d_ks", "d_mse", "d_mmd", "d_cr", "n"], vec![report_cells(&report)]),
        stdout,
        stderr,
    )?;
    Ok(EXIT_OK)
}

fn parse_families(spec: &str) -> Result<Vec<Family>, CliError> {
    if spec == "all" {
        return Ok(Family::ALL.to_vec());
    }
    spec.split(',')
        .map(|t| t.trim().parse::<Family>().map_err(|e| CliError::Usage(e.to_string())))
        .collect()
}

fn fit(cli: &Cli, a: &FitArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let families = parse_families(&a.family)?;
    let settings = a.grid.settings()?;
    let sample = load_sample(&a.input.input, a.input.roi, &a.input.image)?;
    let grid = settings.amplitude_grid(&sample)?;
    let results = rank_families(&sample, &families, &grid, &settings.kde)?;

    let mut payload = Map::new();
    payload.insert("n".into(), json!(sample.len()));
    payload.insert("results".into(), Value::Array(results.iter().map(|r| r.to_json()).collect()));
    let rows = || {
        let rows = results
            .iter()
            .map(|r| {
                let params: Vec<String> = r
                    .family
                    .param_names()
                    .iter()
                    .zip(&r.params)
                    .map(|(n, v)| format!("{n}={v}"))
                    .collect();
                vec![
                    r.family.tag().to_string(),
                    params.join(";"),
                    r.log_likelihood.to_string(),
                    r.gof.map(|g| g.to_string()).unwrap_or_default(),
                    r.converged.to_string(),
                    r.iterations.to_string(),
                ]
            })
            .collect();
        csv_text(&["family", "params", "log_likelihood", "gof", "converged", "iterations"], rows)
    };
    emit(cli, cli.global.format, payload, rows, stdout, stderr)?;
    Ok(EXIT_OK)
}

struct ManifestRow {
    path: String,
    roi: String,
    label: String,
}

fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>, CliError> {
    let bytes = fs::read(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes.as_slice());
    let headers = reader.headers().map_err(Error::from)?.clone();
    let column = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            CliError::Data(Error::Parse {
                what: "manifest".into(),
                detail: format!("missing `{name}` column (expected path,roi,label)"),
            })
        })
    };
    let (p, r, l) = (column("path")?, column("roi")?, column("label")?);
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(Error::from)?;
        let field = |i: usize| record.get(i).unwrap_or("").to_string();
        rows.push(ManifestRow {
            path: field(p),
            roi: field(r),
            label: field(l),
        });
    }
    Ok(rows)
}

fn batch_item(row: &ManifestRow, base: &Path, image: &ImageArgs, settings: &DistanceSettings) -> Result<DistanceReport, CliError> {
    let path = base.join(&row.path);
    let roi = if row.roi.is_empty() {
        None
    } else {
        Some(row.roi.parse::<RoiSpec>()?)
    };
    Ok(distance_report(&load_sample(&path, roi, image)?, settings)?)
}

fn batch(cli: &Cli, a: &BatchArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let settings = a.grid.settings()?;
    let rows = read_manifest(&a.manifest)?;
    let base = a.manifest.parent().map(Path::to_path_buf).unwrap_or_default();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.jobs as usize)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} worker threads: {e}", cli.global.jobs)))?;
    let results: Vec<Result<DistanceReport, CliError>> =
        pool.install(|| rows.par_iter().map(|r| batch_item(r, &base, &a.image, &settings)).collect());

    let failures = results.iter().filter(|r| r.is_err()).count();
    for (row, result) in rows.iter().zip(&results) {
        if let Err(e) = result {
            let _ = writeln!(stderr, "warning: {} ({}): {e}", row.label, row.path);
        }
    }
    let json_rows: Vec<Value> = rows
        .iter()
        .zip(&results)
        .map(|(row, result)| {
            json!({
                "label": row.label,
                "path": row.path,
                "roi": row.roi,
                "status": if result.is_ok() { "ok" } else { "error" },
                "report": result.as_ref().ok(),
                "error": result.as_ref().err().map(|e| e.to_string()),
            })
        })
        .collect();
    let mut payload = Map::new();
    payload.insert("failures".into(), json!(failures));
    payload.insert("rows".into(), Value::Array(json_rows));
    let table = || {
        let table = rows
            .iter()
            .zip(&results)
            .map(|(row, result)| {
                let mut cells = vec![row.label.clone(), row.path.clone(), row.roi.clone()];
                match result {
                    Ok(report) => {
                        cells.push("ok".into());
                        cells.extend(report_cells(report));
                        cells.push(String::new());
                    }
                    Err(e) => {
                        cells.push("error".into());
                        cells.extend(std::iter::repeat_n(String::new(), 5));
                        cells.push(e.to_string());
                    }
                }
                cells
            })
            .collect();
        csv_text(
            &["label", "path", "roi", "status", "d_ks", "d_mse", "d_mmd", "d_cr", "n", "error"],
            table,
        )
    };
    emit(cli, cli.global.format, payload, table, stdout, stderr)?;
    Ok(if failures > 0 { EXIT_PARTIAL } else { EXIT_OK })
}

/// Parses `1/16,0.25,1` style fraction lists.
pub(crate) fn parse_fractions(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |t: &str| CliError::Usage(format!("invalid fraction `{t}`: expected a value in (0, 1] such as 1/4 or 0.25"));
    spec.split(',')
        .map(str::trim)
        .map(|t| {
            let v = match t.split_once('/') {
                Some((n, d)) => {
                    let n: f64 = n.trim().parse().map_err(|_| bad(t))?;
                    let d: f64 = d.trim().parse().map_err(|_| bad(t))?;
                    n / d
                }
                None => t.parse().map_err(|_| bad(t))?,
            };
            if v > 0.0 && v <= 1.0 {
                Ok(v)
            } else {
                Err(bad(t))
            }
        })
        .collect()
}

fn roi_sweep(cli: &Cli, a: &RoiSweepArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let fractions = parse_fractions(&a.fractions)?;
    let settings = a.grid.settings()?;
    ensure_readable(&a.input)?;
    if ingest::is_amplitude_csv(&a.input) {
        return Err(CliError::Usage("roi-sweep needs an image, not an amplitude CSV".into()));
    }
    let pixels = load_pixels(&a.input, &a.image)?;
    let rows = pipeline::roi_sweep(&pixels, &a.roi, &fractions, &settings)?;
    for row in rows.iter().filter(|r| r.report.is_none()) {
        let _ = writeln!(
            stderr,
            "warning: fraction {}: {}",
            row.fraction,
            row.note.as_deref().unwrap_or("skipped")
        );
    }
    let status = |r: &SweepRow| if r.report.is_some() { "ok" } else { "skipped" };
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "fraction": r.fraction,
                "roi": r.roi.to_string(),
                "area": r.area,
                "status": status(r),
                "report": r.report,
                "note": r.note,
            })
        })
        .collect();
    let mut payload = Map::new();
    payload.insert("rows".into(), Value::Array(json_rows));
    let table = || {
        let table = rows
            .iter()
            .map(|r| {
                let mut cells = vec![r.fraction.to_string(), r.roi.to_string(), r.area.to_string(), status(r).into()];
                match &r.report {
                    Some(report) => cells.extend(report_cells(report)),
                    None => cells.extend(std::iter::repeat_n(String::new(), 5)),
                }
                cells.push(r.note.clone().unwrap_or_default());
                cells
            })
            .collect();
        csv_text(
            &["fraction", "roi", "area", "status", "d_ks", "d_mse", "d_mmd", "d_cr", "n", "note"],
            table,
        )
    };
    emit(cli, cli.global.format, payload, table, stdout, stderr)?;
    Ok(EXIT_OK)
}

/// Reads the first two columns of a CSV; a first row that is not numeric is
/// treated as a header.
pub(crate) fn read_pairs(path: &Path) -> Result<PairedSeries, CliError> {
    let bytes = fs::read(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(Error::from)?;
        let parse = |j: usize| record.get(j).and_then(|f| f.parse::<f64>().ok());
        match (parse(0), parse(1)) {
            (Some(a), Some(b)) => {
                x.push(a);
                y.push(b);
            }
            _ if i == 0 => {}
            _ => {
                return Err(CliError::Data(Error::Parse {
                    what: path.display().to_string(),
                    detail: format!("row {} does not hold two numbers", i + 1),
                }))
            }
        }
    }
    Ok(PairedSeries::new(x, y)?)
}

fn correlate(cli: &Cli, a: &CorrelateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let series = read_pairs(&a.input)?;
    let fit = linear_regression(&series)?;
    let rho = spearman_rho(&series)?;
    let fisher = match (a.compare_r, a.compare_n) {
        (Some(r2), Some(n2)) => Some(
            fisher_compare(fit.r, series.len(), r2, n2).map_err(|e| CliError::Usage(e.to_string()))?,
        ),
        _ => None,
    };
    let mut payload = Map::new();
    payload.insert("n".into(), json!(series.len()));
    payload.insert("r".into(), json!(fit.r));
    payload.insert("slope".into(), json!(fit.slope));
    payload.insert("intercept".into(), json!(fit.intercept));
    payload.insert("spearman_rho".into(), json!(rho));
    payload.insert(
        "p_fisher_vs".into(),
        fisher.map_or(Value::Null, |f| {
            json!({
                "r": a.compare_r,
                "n": a.compare_n,
                "z": f.z,
                "p_two_sided": f.p_two_sided,
            })
        }),
    );
    let table = || {
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        csv_text(
            &["n", "r", "slope", "intercept", "spearman_rho", "fisher_z", "p_fisher_vs"],
            vec![vec![
                series.len().to_string(),
                fit.r.to_string(),
                fit.slope.to_string(),
                fit.intercept.to_string(),
                rho.to_string(),
                opt(fisher.map(|f| f.z)),
                opt(fisher.map(|f| f.p_two_sided)),
            ]],
        )
    };
    emit(cli, cli.global.format, payload, table, stdout, stderr)?;
    Ok(EXIT_OK)
}

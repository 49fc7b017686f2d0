use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use chromadapt::eval::{self, DatasetResult, EvalReport};
use chromadapt::gamut::{locus_polygon, robustness_sweep, SweepConfig, SweepResult};
use chromadapt::spectral_cat::reconstruct_illuminant;
use chromadapt::spectrum::wavelengths;
use chromadapt::{
    build_diff_matrix, builtin_cmf, chromaticity, normalize_illuminant, reconstruct, weight_cmf, CmfSet, Error,
    Spectrum, Tristimulus, N_BANDS,
};

use crate::output::{self, g6};
use crate::{Cli, Command, EvalArgs, Format, ReconstructArgs, ScaleArg, SweepArgs, TransformArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_ROWS: u8 = 2;
pub const EXIT_NO_CONVERGENCE: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    NoConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::NoConvergence(_) => EXIT_NO_CONVERGENCE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::NoConvergence(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence { .. } | Error::SingularSystem { .. } => CliError::NoConvergence(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn run(cli: &Cli) -> CliResult<u8> {
    let cmf = load_cmf(&cli.cmf)?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Transform(args) => transform(&cmf, cli.format, out, args),
        Command::Reconstruct(args) => reconstruct_cmd(&cmf, cli.format, out, args),
        Command::Eval(args) => eval_cmd(&cmf, cli.format, out, args),
        Command::GamutSweep(args) => sweep(&cmf, cli.format, out, args),
        Command::Locus => locus(&cmf, cli.format, out),
    }
}

fn load_cmf(spec: &str) -> CliResult<CmfSet> {
    if spec.eq_ignore_ascii_case("builtin") {
        Ok(builtin_cmf())
    } else {
        CmfSet::read_csv(spec).map_err(|e| CliError::Config(e.to_string()))
    }
}

fn scale_factor(scale: ScaleArg, luminances: impl Iterator<Item = f64>) -> f64 {
    match scale {
        ScaleArg::Unit => 1.0,
        ScaleArg::Percent => 0.01,
        ScaleArg::Auto => {
            if luminances.into_iter().any(|y| y > 2.0) {
                0.01
            } else {
                1.0
            }
        }
    }
}

fn xyz_json(t: Tristimulus) -> Value {
    json!({"X": t.x, "Y": t.y, "Z": t.z})
}

struct InputRow {
    id: String,
    xyz: Result<Tristimulus, String>,
}

fn read_batch(path: &Path) -> CliResult<Vec<InputRow>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers = reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let (Some(ix), Some(iy), Some(iz)) = (find("X"), find("Y"), find("Z")) else {
        return Err(CliError::Config(format!("{}: header must contain X, Y and Z columns", path.display())));
    };
    let id_col = find("id").or_else(|| find("sample_id"));
    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record?;
        let id = id_col.and_then(|i| record.get(i)).map(str::to_string).unwrap_or_else(|| (n + 1).to_string());
        let field = |i: usize| -> Result<f64, String> {
            let s = record.get(i).unwrap_or("");
            s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("`{s}` is not a number"))
        };
        let xyz = (|| Ok(Tristimulus::new(field(ix)?, field(iy)?, field(iz)?)))();
        rows.push(InputRow { id, xyz });
    }
    Ok(rows)
}

fn transform(cmf: &CmfSet, format: Format, out: Option<&Path>, args: &TransformArgs) -> CliResult<u8> {
    let rows = match (&args.xyz, &args.input) {
        (Some(xyz), _) => vec![InputRow { id: "1".into(), xyz: Ok(*xyz) }],
        (None, Some(path)) => read_batch(path)?,
        (None, None) => return Err(CliError::Config("either --xyz or --input is required".into())),
    };
    let k = scale_factor(args.scale, rows.iter().filter_map(|r| r.xyz.as_ref().ok().map(|t| t.y)));
    let cat = args.method.prepare(cmf, args.src_wp, args.dst_wp, args.d).map_err(|e| CliError::Config(e.to_string()))?;

    let results: Vec<(String, Result<Tristimulus, String>, Result<Tristimulus, String>)> = rows
        .into_iter()
        .map(|row| {
            let predicted = match &row.xyz {
                Ok(xyz) => cat.transform(xyz.scale(k)).map(|t| t.scale(1.0 / k)).map_err(|e| e.to_string()),
                Err(e) => Err(e.clone()),
            };
            (row.id, row.xyz, predicted)
        })
        .collect();
    let failed = results.iter().filter(|r| r.2.is_err()).count();

    let mut w = output::open(out)?;
    match format {
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            csv.write_record(["id", "X", "Y", "Z", "x", "y", "status"])?;
            for (id, _, predicted) in &results {
                match predicted {
                    Ok(t) => {
                        let (cx, cy) = chromaticity(*t).map(|c| (g6(c.x), g6(c.y))).unwrap_or_default();
                        csv.write_record([id.as_str(), &g6(t.x), &g6(t.y), &g6(t.z), &cx, &cy, "ok"])?;
                    }
                    Err(e) => csv.write_record([id.as_str(), "", "", "", "", "", e])?,
                }
            }
            csv.flush()?;
        }
        Format::Json => {
            let rows: Vec<Value> = results
                .iter()
                .map(|(id, input, predicted)| {
                    json!({
                        "id": id,
                        "input": input.as_ref().ok().map(|t| xyz_json(*t)),
                        "output": predicted.as_ref().ok().map(|t| xyz_json(*t)),
                        "chromaticity": predicted.as_ref().ok().and_then(|t| chromaticity(*t).ok()),
                        "error": predicted.as_ref().err(),
                    })
                })
                .collect();
            let meta = output::meta(
                "transform",
                json!({
                    "method": args.method.name(),
                    "src_wp": xyz_json(args.src_wp),
                    "dst_wp": xyz_json(args.dst_wp),
                    "d": args.d,
                    "scale_factor": k,
                }),
            );
            output::write_json(&mut w, &json!({"meta": meta, "rows": rows}))?;
        }
    }
    w.flush()?;
    if failed > 0 {
        eprintln!("{failed} of {} rows failed", results.len());
        Ok(EXIT_ROWS)
    } else {
        Ok(EXIT_OK)
    }
}

fn reconstruct_cmd(cmf: &CmfSet, format: Format, out: Option<&Path>, args: &ReconstructArgs) -> CliResult<u8> {
    let diff = build_diff_matrix(N_BANDS)?;
    let illum = match (&args.illuminant_wp, &args.illuminant_file) {
        (Some(wp), _) => {
            let wp = chromadapt::colorimetry::normalize_white_point(*wp)?;
            reconstruct_illuminant(cmf, &diff, wp).map_err(|e| CliError::Config(format!("illuminant: {e}")))?
        }
        (None, Some(path)) => normalize_illuminant(&Spectrum::read_csv(path)?, cmf)?,
        (None, None) => return Err(CliError::Config("either --illuminant-wp or --illuminant-file is required".into())),
    };
    let k = scale_factor(args.scale, std::iter::once(args.xyz.y));
    let target = args.xyz.scale(k);
    let result = match reconstruct(&weight_cmf(&illum, cmf), &diff, target) {
        Ok(r) => r,
        Err(e @ (Error::NoConvergence { .. } | Error::SingularSystem { .. })) => {
            return Err(CliError::NoConvergence(e.to_string()))
        }
        Err(e) => return Err(e.into()),
    };

    let meta = output::meta("reconstruct", json!({"target": xyz_json(target)}));
    let mut w = output::open(out)?;
    match format {
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            csv.write_record(["wavelength_nm", "value"])?;
            for (nm, v) in wavelengths().zip(result.rho.iter()) {
                csv.write_record([nm.to_string(), g6(v)])?;
            }
            csv.flush()?;
            let side = json!({
                "meta": meta,
                "iterations": result.iterations,
                "residual_norm": result.residual_norm,
            });
            match out {
                Some(path) => {
                    let mut s = output::open(Some(&output::sidecar(path, ".json")))?;
                    output::write_json(&mut s, &side)?;
                    s.flush()?;
                }
                None => eprintln!("iterations {} residual {:e}", result.iterations, result.residual_norm),
            }
        }
        Format::Json => {
            let doc = json!({
                "meta": meta,
                "wavelength_nm": wavelengths().collect::<Vec<_>>(),
                "reflectance": result.rho.iter().collect::<Vec<_>>(),
                "iterations": result.iterations,
                "residual_norm": result.residual_norm,
            });
            output::write_json(&mut w, &doc)?;
        }
    }
    w.flush()?;
    Ok(EXIT_OK)
}

const DATASET_ORDER: [&str; 8] = ["CSAJ", "Helson", "LamRigg", "LUTCHI", "KuoLuo", "Breneman", "BraunFairchild", "McCann"];

fn eval_cmd(cmf: &CmfSet, format: Format, out: Option<&Path>, args: &EvalArgs) -> CliResult<u8> {
    let (datasets, errors) = eval::load_dataset_dir(&args.datasets)?;
    for (path, e) in &errors {
        eprintln!("skipping {}: {e}", path.display());
    }
    if datasets.is_empty() {
        return Err(CliError::Config(format!("no dataset could be loaded from {}", args.datasets.display())));
    }

    let reports: Vec<(&str, EvalReport)> = args
        .methods
        .iter()
        .map(|m| {
            let results: Vec<DatasetResult> = datasets.iter().map(|d| eval::evaluate_method(*m, cmf, d)).collect();
            (m.name(), eval::summarize(&results))
        })
        .collect();

    let mut names: Vec<String> = DATASET_ORDER
        .iter()
        .filter(|n| datasets.iter().any(|d| d.name == **n))
        .map(|n| n.to_string())
        .collect();
    let mut others: Vec<String> =
        datasets.iter().map(|d| d.name.clone()).filter(|n| !DATASET_ORDER.contains(&n.as_str())).collect();
    others.sort();
    others.dedup();
    names.extend(others);

    let cell = |v: Option<f64>| v.map(g6).unwrap_or_default();
    let mut table: Vec<Vec<String>> = Vec::new();
    for name in &names {
        let mut row = vec![name.clone()];
        row.extend(reports.iter().map(|(_, r)| cell(r.per_dataset.get(name).and_then(|s| s.mean))));
        table.push(row);
    }
    let mut all = vec!["Mean (All Datasets)".to_string()];
    all.extend(reports.iter().map(|(_, r)| cell(r.weighted_mean_all)));
    table.push(all);
    let mut no_mc = vec!["Mean (No McCann)".to_string()];
    no_mc.extend(reports.iter().map(|(_, r)| cell(r.weighted_mean_no_mccann)));
    table.push(no_mc);

    let report_json: BTreeMap<&str, &EvalReport> = reports.iter().map(|(n, r)| (*n, r)).collect();
    let meta = output::meta(
        "eval",
        json!({
            "methods": args.methods.iter().map(|m| m.name()).collect::<Vec<_>>(),
            "datasets": datasets.iter().map(|d| json!({"file": d.file, "name": d.name, "pairs": d.pairs.len(), "source_provenance": d.source_provenance})).collect::<Vec<_>>(),
            "skipped": errors.iter().map(|(p, e)| json!({"path": p.display().to_string(), "error": e.to_string()})).collect::<Vec<_>>(),
        }),
    );

    let mut header = vec!["dataset".to_string()];
    header.extend(args.methods.iter().map(|m| m.name().to_string()));
    let mut w = output::open(out)?;
    match format {
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            csv.write_record(&header)?;
            for row in &table {
                csv.write_record(row)?;
            }
            csv.flush()?;
            let report_path: Option<PathBuf> = args.report.clone().or_else(|| out.map(|p| output::sidecar(p, ".json")));
            if let Some(path) = report_path {
                let mut s = output::open(Some(&path))?;
                output::write_json(&mut s, &json!({"meta": meta, "reports": report_json}))?;
                s.flush()?;
            }
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .iter()
                .map(|row| {
                    let mut obj = serde_json::Map::new();
                    for (h, v) in header.iter().zip(row) {
                        obj.insert(h.clone(), json!(v));
                    }
                    Value::Object(obj)
                })
                .collect();
            output::write_json(&mut w, &json!({"meta": meta, "table": rows, "reports": report_json}))?;
        }
    }
    w.flush()?;
    Ok(EXIT_OK)
}

fn sweep_summary(results: &[SweepResult]) -> Value {
    let sweeps: Vec<Value> = results
        .iter()
        .map(|s| {
            json!({
                "angle_index": s.angle_index,
                "destination": xyz_json(s.destination),
                "destination_xy": chromaticity(s.destination).ok(),
                "points": s.points.len(),
                "outside": s.outside_count(),
                "negative": s.negative_count(),
                "failures": s.failures,
            })
        })
        .collect();
    json!({
        "sweeps": sweeps,
        "total_outside": results.iter().map(|s| s.outside_count()).sum::<usize>(),
        "total_negative": results.iter().map(|s| s.negative_count()).sum::<usize>(),
        "total_failures": results.iter().map(|s| s.failures.len()).sum::<usize>(),
    })
}

fn sweep(cmf: &CmfSet, format: Format, out: Option<&Path>, args: &SweepArgs) -> CliResult<u8> {
    if !(0.0..1.0).contains(&args.fraction) {
        return Err(CliError::Config(format!("--fraction must be in [0, 1), got {}", args.fraction)));
    }
    if !(args.y_slice > 0.0 && args.y_slice <= 1.0) {
        return Err(CliError::Config(format!("--y-slice must be in (0, 1], got {}", args.y_slice)));
    }
    if args.count == 0 || args.samples == 0 {
        return Err(CliError::Config("--count and --samples must be positive".into()));
    }
    let center = chromaticity(args.center)?;
    if !locus_polygon(cmf).contains(center) {
        return Err(CliError::Config("--center lies outside the spectral locus".into()));
    }
    let config = SweepConfig { center, y_slice: args.y_slice, fraction: args.fraction, count: args.count, samples: args.samples };
    let results = robustness_sweep(cmf, args.method, &config)?;

    let meta = output::meta(
        "gamut-sweep",
        json!({"method": args.method.name(), "config": config}),
    );
    let mut summary = sweep_summary(&results);
    summary["meta"] = meta;

    let mut w = output::open(out)?;
    match format {
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            csv.write_record(["angle_index", "src_x", "src_y", "dst_x", "dst_y", "inside", "negative"])?;
            for s in &results {
                for p in &s.points {
                    let (dx, dy) = p.dst.map(|c| (g6(c.x), g6(c.y))).unwrap_or_default();
                    csv.write_record([
                        s.angle_index.to_string(),
                        g6(p.src.x),
                        g6(p.src.y),
                        dx,
                        dy,
                        p.inside.to_string(),
                        p.negative.to_string(),
                    ])?;
                }
            }
            csv.flush()?;
            let path = args.summary.clone().or_else(|| out.map(|p| output::sidecar(p, ".summary.json")));
            match path {
                Some(path) => {
                    let mut s = output::open(Some(&path))?;
                    output::write_json(&mut s, &summary)?;
                    s.flush()?;
                }
                None => {
                    let mut err = std::io::stderr().lock();
                    output::write_json(&mut err, &summary)?;
                }
            }
        }
        Format::Json => {
            summary["results"] = serde_json::to_value(&results).map_err(|e| CliError::Config(e.to_string()))?;
            output::write_json(&mut w, &summary)?;
        }
    }
    w.flush()?;
    Ok(EXIT_OK)
}

fn locus(cmf: &CmfSet, format: Format, out: Option<&Path>) -> CliResult<u8> {
    let poly = locus_polygon(cmf);
    let mut w = output::open(out)?;
    match format {
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            csv.write_record(["wavelength_nm", "x", "y"])?;
            for (nm, c) in poly.wavelengths_nm().zip(poly.vertices()) {
                csv.write_record([nm.to_string(), g6(c.x), g6(c.y)])?;
            }
            csv.flush()?;
        }
        Format::Json => {
            let vertices: Vec<Value> = poly
                .wavelengths_nm()
                .zip(poly.vertices())
                .map(|(nm, c)| json!({"wavelength_nm": nm, "x": c.x, "y": c.y}))
                .collect();
            output::write_json(&mut w, &json!({"meta": output::meta("locus", json!({})), "vertices": vertices}))?;
        }
    }
    w.flush()?;
    Ok(EXIT_OK)
}

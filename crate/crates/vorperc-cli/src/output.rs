//! Result files. For `--out results/x.csv` the runner writes
//!
//! - `x.csv`: one row per estimate, columns [`CSV_HEADER`];
//! - `x.json`: the resolved config and the full estimator output;
//! - `x.timing.csv`: wall time per experiment;
//! - `x.<k>.dat` and `x.<k>.gp`: plot data and a gnuplot script per plot;
//! - `x.<name>` for extra binary artifacts such as spectrum dumps.
//!
//! Every file except the timing file depends only on the config. Each file
//! is written to a temporary sibling and renamed into place.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use vorperc::estimators::McEstimate;

use crate::config::ExperimentConfig;

pub const CSV_VERSION: u32 = 1;
pub const CSV_HEADER: [&str; 9] =
    ["experiment", "estimator", "params", "value", "stderr", "n_effective", "n_discarded", "seed", "csv_version"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub experiment: String,
    pub estimator: String,
    pub params: Value,
    pub value: f64,
    pub stderr: f64,
    pub n_effective: u64,
    pub n_discarded: u64,
    pub seed: u64,
}

impl Row {
    pub fn new(estimator: &str, params: Value, value: f64, stderr: f64, n: u64, discarded: u64, seed: u64) -> Self {
        Row { experiment: String::new(), estimator: estimator.into(), params, value, stderr, n_effective: n, n_discarded: discarded, seed }
    }

    pub fn est(estimator: &str, e: &McEstimate) -> Self {
        Self::new(estimator, e.params.clone(), e.value, e.stderr, e.n_effective, e.n_discarded, e.seed)
    }

    /// An exactly computed quantity.
    pub fn exact(estimator: &str, params: Value, value: f64, n: u64, seed: u64) -> Self {
        Self::new(estimator, params, value, 0.0, n, 0, seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64, f64)>,
}

impl Series {
    pub fn new(name: &str) -> Self {
        Series { name: name.into(), points: Vec::new() }
    }

    pub fn push(&mut self, x: f64, y: f64, err: f64) {
        self.points.push((x, y, err));
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Plot {
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    pub logx: bool,
    pub logy: bool,
    pub errorbars: bool,
    pub series: Vec<Series>,
}

impl Plot {
    pub fn errors(title: &str, x: &str, y: &str, logx: bool, logy: bool, series: Vec<Series>) -> Self {
        Plot { title: title.into(), xlabel: x.into(), ylabel: y.into(), logx, logy, errorbars: true, series }
    }

    pub fn points(title: &str, x: &str, y: &str, series: Vec<Series>) -> Self {
        Plot { title: title.into(), xlabel: x.into(), ylabel: y.into(), logx: false, logy: false, errorbars: false, series }
    }

    /// Data blocks separated by two blank lines, one per series.
    pub fn data(&self) -> String {
        let mut s = String::new();
        for (i, ser) in self.series.iter().enumerate() {
            if i > 0 {
                s.push_str("\n\n");
            }
            s.push_str(&format!("# {}\n", ser.name));
            for (x, y, e) in &ser.points {
                s.push_str(&format!("{x} {y} {e}\n"));
            }
        }
        s
    }

    pub fn script(&self, data_file: &str, png: &str) -> String {
        let mut s = format!(
            "set terminal pngcairo size 900,600\nset output '{png}'\nset title '{}'\nset xlabel '{}'\nset ylabel '{}'\nset key outside\n",
            self.title, self.xlabel, self.ylabel
        );
        if self.logx {
            s.push_str("set logscale x\n");
        }
        if self.logy {
            s.push_str("set logscale y\n");
        }
        let style = if self.errorbars { "using 1:2:3 with yerrorlines" } else { "using 1:2 with points pt 7 ps 0.5" };
        let parts: Vec<String> = self
            .series
            .iter()
            .enumerate()
            .map(|(i, ser)| format!("'{data_file}' index {i} {style} title '{}'", ser.name.replace('\'', "")))
            .collect();
        s.push_str(&format!("plot {}\n", parts.join(", \\\n     ")));
        s
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<Row>,
    pub plots: Vec<(String, Plot)>,
    pub bundle: Value,
    /// Extra artifacts by file suffix.
    pub files: Vec<(String, Vec<u8>)>,
    /// Wall time per experiment, in seconds.
    pub timing: Vec<(String, f64)>,
}

impl Report {
    pub fn plot(&mut self, p: Plot) {
        let k = self.plots.len().to_string();
        self.plots.push((k, p));
    }

    /// Appends a sub-experiment's output under `name`.
    pub fn absorb(&mut self, name: &str, sub: Report, bundle: &mut serde_json::Map<String, Value>) {
        for mut r in sub.rows {
            r.experiment = name.into();
            self.rows.push(r);
        }
        for (k, p) in sub.plots {
            self.plots.push((format!("{name}.{k}"), p));
        }
        for (k, f) in sub.files {
            self.files.push((format!("{name}.{k}"), f));
        }
        self.timing.extend(sub.timing.into_iter().map(|(n, t)| (if n.is_empty() { name.into() } else { n }, t)));
        bundle.insert(name.into(), sub.bundle);
    }

    pub fn csv(&self) -> anyhow::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.experiment.clone(),
                r.estimator.clone(),
                serde_json::to_string(&r.params)?,
                format!("{:?}", r.value),
                format!("{:?}", r.stderr),
                r.n_effective.to_string(),
                r.n_discarded.to_string(),
                r.seed.to_string(),
                CSV_VERSION.to_string(),
            ])?;
        }
        Ok(w.into_inner()?)
    }
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "result".into());
    out.with_file_name(format!("{stem}.{suffix}"))
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Writes every result file; the CSV goes last. Returns the paths written.
pub fn write_report(cfg: &ExperimentConfig, rep: &Report) -> anyhow::Result<Vec<PathBuf>> {
    let out = &cfg.out;
    let mut written = Vec::new();
    let mut put = |p: PathBuf, b: &[u8]| -> anyhow::Result<()> {
        write_atomic(&p, b).map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))?;
        written.push(p);
        Ok(())
    };
    for (suffix, bytes) in &rep.files {
        put(sibling(out, suffix), bytes)?;
    }
    for (k, plot) in &rep.plots {
        let dat = sibling(out, &format!("{k}.dat"));
        let png = sibling(out, &format!("{k}.png"));
        let name = |p: &Path| p.file_name().unwrap().to_string_lossy().into_owned();
        put(dat.clone(), plot.data().as_bytes())?;
        put(sibling(out, &format!("{k}.gp")), plot.script(&name(&dat), &name(&png)).as_bytes())?;
    }
    let bundle = serde_json::json!({ "config": cfg, "csv_version": CSV_VERSION, "result": rep.bundle });
    put(sibling(out, "json"), serde_json::to_string_pretty(&bundle)?.as_bytes())?;
    let mut t = String::from("experiment,wall_seconds\n");
    for (n, s) in &rep.timing {
        t.push_str(&format!("{n},{s:.3}\n"));
    }
    put(sibling(out, "timing.csv"), t.as_bytes())?;
    put(out.clone(), &rep.csv()?)?;
    Ok(written)
}

//! Sums of annealed box pivotal probabilities for square crossings.
//!
//! Box `B` is annealed pivotal when resampling `η ∩ B` and its colors can
//! change the event. Resampling only recolors the plane inside the union of the
//! cells that a new point in `B` could take area from: the cells of points in
//! `B` and the cells `C_i` with a vertex `v` such that `B` meets the disk of
//! radius `|v − x_i|` about `v`. A crossing is increasing in the black part of
//! the plane, so if painting those cells all black and all white gives the same
//! outcome, `B` is not pivotal. Otherwise `B` is classified pivotal when a
//! recoloring of `η ∩ B`, or a dense all-black or all-white point grid in `B`,
//! changes the outcome, and then by `M` fresh resamples; boxes passing the
//! screen without any witness are undetermined.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{estimate_arm, replica_config, EstimatorError, McEstimate, Replicas};
use crate::events::{
    pivotal_annealed_mc, pivotal_quenched_box, AnnulusSpec, ArmSpec, Color, ColoredConfiguration, Compiled, EventError,
    EventSpec, Pivotality, Sector, BLACK, QUENCHED_CAP, WHITE,
};
use crate::geometry::{PointSet, Pt, Tessellation, Window};
use crate::rng;

/// Points per side of the probe grids.
const PROBE_GRID: usize = 8;

/// Unit boxes `[i,i+1]×[j,j+1]` meeting `[−margin, n+margin]²`.
pub fn unit_boxes(n: usize, margin: usize) -> Vec<Window> {
    let (lo, hi) = (-(margin as i64), (n + margin) as i64);
    let mut v = Vec::new();
    for j in lo..hi {
        for i in lo..hi {
            v.push(Window::new(i as f64, i as f64 + 1.0, j as f64, j as f64 + 1.0).unwrap());
        }
    }
    v
}

struct Flower {
    cell: usize,
    bb: Window,
    disks: Vec<(Pt, f64)>,
}

fn flowers(cfg: &ColoredConfiguration, ev: &Compiled) -> Vec<Flower> {
    ev.cells()
        .into_iter()
        .map(|i| {
            let x = cfg.tess.point(i);
            let disks: Vec<(Pt, f64)> = cfg.tess.cell(i).0.iter().map(|&v| (v, crate::geometry::dist2(v, x))).collect();
            let mut bb = Window { x0: x[0], x1: x[0], y0: x[1], y1: x[1] };
            for &(v, r2) in &disks {
                let r = r2.sqrt();
                bb = Window { x0: bb.x0.min(v[0] - r), x1: bb.x1.max(v[0] + r), y0: bb.y0.min(v[1] - r), y1: bb.y1.max(v[1] + r) };
            }
            Flower { cell: i, bb, disks }
        })
        .collect()
}

fn affected(fl: &[Flower], cfg: &ColoredConfiguration, b: &Window) -> Vec<usize> {
    fl.iter()
        .filter(|f| {
            f.bb.intersects(b)
                && (b.contains(cfg.tess.point(f.cell)) || f.disks.iter().any(|&(v, r2)| b.dist2(v) < r2))
        })
        .map(|f| f.cell)
        .collect()
}

fn probe(spec: &EventSpec, cfg: &ColoredConfiguration, b: &Window, color: Color) -> Option<bool> {
    let mut pts = Vec::new();
    let mut cols = Vec::new();
    for (i, &p) in cfg.tess.points.points.iter().enumerate() {
        if !b.contains(p) {
            pts.push(p);
            cols.push(cfg.colors[i]);
        }
    }
    let k = PROBE_GRID;
    for a in 0..k {
        for c in 0..k {
            pts.push([b.x0 + b.width() * (a as f64 + 0.5) / k as f64, b.y0 + b.height() * (c as f64 + 0.5) / k as f64]);
            cols.push(color);
        }
    }
    let ps = PointSet::new(cfg.tess.points.seed, cfg.tess.window(), pts);
    let tess = match spec.support() {
        Some(roi) => Tessellation::build_for(ps, &roi),
        None => Tessellation::build(ps),
    };
    spec.compile(&tess).ok().map(|ev| ev.eval(&cols))
}

/// Classifies box `b` for an increasing event (a black crossing).
pub fn box_pivotality(
    spec: &EventSpec,
    cfg: &ColoredConfiguration,
    ev: &Compiled,
    b: &Window,
    m: usize,
    seed: u64,
) -> Result<Pivotality, EventError> {
    let fl = flowers(cfg, ev);
    classify_box(spec, cfg, ev, &fl, b, m, seed)
}

fn classify_box(
    spec: &EventSpec,
    cfg: &ColoredConfiguration,
    ev: &Compiled,
    fl: &[Flower],
    b: &Window,
    m: usize,
    seed: u64,
) -> Result<Pivotality, EventError> {
    let aff = affected(fl, cfg, b);
    if aff.is_empty() {
        return Ok(Pivotality::False);
    }
    let mut colors = cfg.colors.clone();
    let base = ev.eval(&colors);
    aff.iter().for_each(|&i| colors[i] = BLACK);
    let hi = ev.eval(&colors);
    aff.iter().for_each(|&i| colors[i] = WHITE);
    let lo = ev.eval(&colors);
    if hi == lo {
        return Ok(Pivotality::False);
    }
    let mut colors = cfg.colors.clone();
    let in_box: Vec<usize> = (0..cfg.colors.len()).filter(|&i| b.contains(cfg.tess.point(i))).collect();
    match pivotal_quenched_box(ev, &mut colors, &in_box, QUENCHED_CAP) {
        Ok(true) => return Ok(Pivotality::True),
        Ok(false) | Err(EventError::EnumerationCap { .. }) => {}
        Err(e) => return Err(e),
    }
    for c in [BLACK, WHITE] {
        if probe(spec, cfg, b, c).is_some_and(|v| v != base) {
            return Ok(Pivotality::True);
        }
    }
    if m >= 2 {
        if let Ok(Pivotality::True) = pivotal_annealed_mc(spec, cfg, *b, m, seed) {
            return Ok(Pivotality::True);
        }
    }
    Ok(Pivotality::Undetermined)
}

/// Per-replica counts of pivotal boxes: `(certain, certain + undetermined)`.
pub fn estimate_pivotal_sum_boxes(
    n: f64,
    boxes: &[Window],
    replicas: usize,
    m: usize,
    seed: u64,
) -> Result<(McEstimate, McEstimate), EstimatorError> {
    let rect = Window::new(0.0, n, 0.0, n).map_err(|e| EstimatorError::Parameter(e.to_string()))?;
    let spec = EventSpec::crossing(rect);
    let reach = boxes.iter().fold(rect, |a, b| Window {
        x0: a.x0.min(b.x0),
        x1: a.x1.max(b.x1),
        y0: a.y0.min(b.y0),
        y1: a.y1.max(b.y1),
    });
    let s: Vec<Result<Option<(f64, f64)>, EventError>> = super::par_map(replicas, |i| {
        let cfg = replica_config(&reach, seed, i as u64);
        let ev = match spec.compile(&cfg.tess) {
            Ok(e) => e,
            Err(EventError::Uncertified) => return Ok(None),
            Err(e) => return Err(e),
        };
        let fl = flowers(&cfg, &ev);
        let rs = rng::replica_seed(seed, i as u64);
        let (mut sure, mut maybe) = (0.0, 0.0);
        for (k, b) in boxes.iter().enumerate() {
            match classify_box(&spec, &cfg, &ev, &fl, b, m, rng::derive_seed(rs, &[k as u64]))? {
                Pivotality::True => sure += 1.0,
                Pivotality::Undetermined => maybe += 1.0,
                Pivotality::False => {}
            }
        }
        Ok(Some((sure, sure + maybe)))
    });
    let s = s.into_iter().collect::<Result<Vec<_>, _>>()?;
    let params = json!({ "n": n, "boxes": boxes.len(), "M": m });
    let lo: Vec<Option<f64>> = s.iter().map(|o| o.map(|v| v.0)).collect();
    let hi: Vec<Option<f64>> = s.iter().map(|o| o.map(|v| v.1)).collect();
    Ok((McEstimate::from_samples(&lo, seed, params.clone()), McEstimate::from_samples(&hi, seed, params)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PivotalSum {
    pub n: usize,
    pub boxes: usize,
    /// Sum over boxes of the frequency of certain pivotality.
    pub sum: McEstimate,
    /// The same, counting undetermined boxes as pivotal.
    pub upper: McEstimate,
    pub alpha4: McEstimate,
    /// `sum / (n² α̂_4(n))`.
    pub ratio: f64,
    pub ratio_stderr: f64,
}

/// `Σ_B P[Piv_B(g_n)]` over unit boxes within distance 2 of `[0,n]²`.
pub fn estimate_pivotal_sum(
    n: usize,
    replicas: usize,
    m: usize,
    alpha4_replicas: Replicas,
    seed: u64,
) -> Result<PivotalSum, EstimatorError> {
    if n == 0 || n > 64 {
        return Err(EstimatorError::Parameter("need 1 <= n <= 64".into()));
    }
    let boxes = unit_boxes(n, 2);
    let (sum, upper) = estimate_pivotal_sum_boxes(n as f64, &boxes, replicas, m, seed)?;
    let a4 = if n > 1 {
        estimate_arm(
            AnnulusSpec::new(1.0, n as f64),
            ArmSpec::new(4, Sector::FullPlane),
            alpha4_replicas,
            rng::derive_seed(seed, &[0x6134]),
        )?
    } else {
        McEstimate::new(1.0, 0.0, 0, 0, seed, json!({ "r": 1, "R": 1 }))
    };
    let scale = (n * n) as f64 * a4.value;
    let ratio = sum.value / scale;
    let rel = ((sum.stderr / sum.value).powi(2) + (a4.stderr / a4.value).powi(2)).sqrt();
    Ok(PivotalSum { n, boxes: boxes.len(), sum, upper, alpha4: a4, ratio, ratio_stderr: ratio * rel })
}

//! Pivotality of points and boxes.

use serde::{Deserialize, Serialize};

use super::{random_colors, Color, Compiled, ColoredConfiguration, EventError, EventSpec};
use crate::geometry::{sample_poisson_with, PointSet, Tessellation, Window};
use crate::rng::{self, Rng};

pub const QUENCHED_CAP: usize = 20;

/// Whether flipping the color of `x` changes the event; `colors` is restored.
pub fn pivotal_point(ev: &Compiled, colors: &mut [Color], x: usize) -> bool {
    let before = ev.eval(colors);
    colors[x] = -colors[x];
    let after = ev.eval(colors);
    colors[x] = -colors[x];
    before != after
}

/// Whether some recoloring of the points `in_box` changes the event.
///
/// Only points the compiled event can see are enumerated; the cap applies to them.
pub fn pivotal_quenched_box(
    ev: &Compiled,
    colors: &mut [Color],
    in_box: &[usize],
    cap: usize,
) -> Result<bool, EventError> {
    let seen = ev.cells();
    let pts: Vec<usize> = in_box.iter().copied().filter(|x| seen.binary_search(x).is_ok()).collect();
    if pts.len() > cap {
        return Err(EventError::EnumerationCap { found: pts.len(), cap });
    }
    let base = ev.eval(colors);
    let saved: Vec<Color> = pts.iter().map(|&x| colors[x]).collect();
    let mut found = false;
    // Gray code walk over all 2^k recolorings.
    for step in 1u64..(1u64 << pts.len()) {
        let x = pts[step.trailing_zeros() as usize];
        colors[x] = -colors[x];
        if ev.eval(colors) != base {
            found = true;
            break;
        }
    }
    for (&x, &c) in pts.iter().zip(&saved) {
        colors[x] = c;
    }
    Ok(found)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pivotality {
    True,
    False,
    Undetermined,
}

/// Monte Carlo classifier of annealed pivotality of `d`: the points and colors
/// in `d` are resampled `m` times (unit intensity).
///
/// `True` is always correct. `False` additionally requires quenched
/// non-pivotality; for a box whose resampled outcomes have minority
/// probability `q`, a wrong `False` happens with probability at most
/// `(1 − q)^m`.
pub fn pivotal_annealed_mc(
    spec: &EventSpec,
    cfg: &ColoredConfiguration,
    d: Window,
    m: usize,
    seed: u64,
) -> Result<Pivotality, EventError> {
    assert!(m >= 2, "need M >= 2");
    let tess = &cfg.tess;
    let mut rng: Rng = rng::stream(seed, rng::tag::RESAMPLE, 0);
    let mut outer_pts = Vec::new();
    let mut outer_cols = Vec::new();
    let mut in_box = Vec::new();
    for (i, &p) in tess.points.points.iter().enumerate() {
        if d.contains(p) {
            in_box.push(i);
        } else {
            outer_pts.push(p);
            outer_cols.push(cfg.colors[i]);
        }
    }
    let mut seen = [false; 2];
    let mut drawn = 0;
    let mut attempts = 0;
    while drawn < m {
        attempts += 1;
        if attempts > 4 * m + 16 {
            return Err(EventError::Uncertified);
        }
        let fresh = sample_poisson_with(&d, 1.0, &mut rng);
        let mut pts = outer_pts.clone();
        pts.extend_from_slice(&fresh);
        let mut cols = outer_cols.clone();
        cols.extend(random_colors(fresh.len(), cfg.p, &mut rng));
        let t = Tessellation::build(PointSet::new(tess.points.seed, tess.window(), pts));
        let ev = match spec.compile(&t) {
            Ok(ev) => ev,
            Err(EventError::Uncertified) => continue,
            Err(e) => return Err(e),
        };
        drawn += 1;
        seen[ev.eval(&cols) as usize] = true;
        if seen[0] && seen[1] {
            return Ok(Pivotality::True);
        }
    }
    let ev = spec.compile(tess)?;
    let mut colors = cfg.colors.clone();
    match pivotal_quenched_box(&ev, &mut colors, &in_box, QUENCHED_CAP) {
        Ok(false) => Ok(Pivotality::False),
        Ok(true) | Err(EventError::EnumerationCap { .. }) => Ok(Pivotality::Undetermined),
        Err(e) => Err(e),
    }
}

//! Annulus-measurable relaxations of arm events.
//!
//! Let `A = A(r,R)` and let `T_A` be the tessellation of `η ∩ A` alone. A
//! piece `P` of a `T_A`-cell owned by `x` can lose area to a point outside
//! `A` only at locations `u ∈ P` with `dist(u, A^c) < |u − x| ≤ ρ_P`, where
//! `ρ_P` is the largest vertex distance from `x`. In sup-norm, all such
//! locations lie within `w_in` of the inner square or `w_out` of the outer
//! one. Hence every completion of `ω ∩ A` agrees with `T_A` on
//! `A(r + w_in, R − w_out)`, and by nesting any completion realizing the arm
//! event realizes it there. The surrogates below are therefore implied by
//! the genuine event and by every completion of it.

use serde::{Deserialize, Serialize};

use super::region::RegionGraph;
use super::{AnnulusSpec, ArmSpec, Compiled, EventError, Kind};
use crate::geometry::{check_padding_valid, PointSet, Pt, Tessellation, Window};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HatVariant {
    /// Both boundaries relaxed, annulus points only.
    Hat,
    /// Outer boundary relaxed; points of `[-R,R]^2`.
    Ext,
    /// Inner boundary relaxed; every point outside `]-r,r[^2`.
    Int,
}

fn sup(u: Pt, c: Pt) -> f64 {
    (u[0] - c[0]).abs().max((u[1] - c[1]).abs())
}

/// Minimum of `‖u − c‖∞` over a convex polygon.
fn min_sup(v: &[Pt], c: Pt) -> f64 {
    let n = v.len();
    let inside = (0..n).all(|k| {
        let (a, b) = (v[k], v[(k + 1) % n]);
        (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) >= 0.0
    });
    if inside {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for k in 0..n {
        let (a, b) = (v[k], v[(k + 1) % n]);
        best = best.min(sup(a, c));
        let (ax, ay) = (a[0] - c[0], a[1] - c[1]);
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        // Breakpoints of max(|x|,|y|) along the edge: x = 0, y = 0, y = ±x.
        for (num, den) in [(-ax, dx), (-ay, dy), (ax - ay, dy - dx), (-(ax + ay), dx + dy)] {
            if den != 0.0 {
                let t = num / den;
                if (0.0..=1.0).contains(&t) {
                    best = best.min(sup([a[0] + t * dx, a[1] + t * dy], c));
                }
            }
        }
    }
    best
}

/// Widths `(w_in, w_out)` of the boundary zones of `T_A` that outside points may alter.
fn widths(ta: &Tessellation, g: &RegionGraph, ann: &AnnulusSpec) -> (f64, f64) {
    let n = g.node_count();
    let mut rho = vec![0.0f64; n];
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![0.0f64; n];
    for (k, v) in g.parts() {
        let x = ta.point(g.cell(k));
        for &u in v {
            rho[k] = rho[k].max(crate::geometry::dist2(u, x).sqrt());
            hi[k] = hi[k].max(sup(u, ann.center));
        }
        lo[k] = lo[k].min(min_sup(v, ann.center));
    }
    let (mut w_in, mut w_out) = (0.0f64, 0.0f64);
    for k in 0..n {
        if lo[k] - ann.r <= rho[k] {
            w_in = w_in.max(rho[k].min(hi[k] - ann.r));
        }
        if ann.big_r - hi[k] <= rho[k] {
            w_out = w_out.max(rho[k].min(ann.big_r - lo[k]));
        }
    }
    (w_in, w_out)
}

fn remapped(mut g: RegionGraph, map: &[u32]) -> RegionGraph {
    g.remap_cells(map);
    g
}

pub(super) fn compile(
    tess: &Tessellation,
    ann: &AnnulusSpec,
    arms: &ArmSpec,
    variant: HatVariant,
) -> Result<Compiled, EventError> {
    let vacuous = Ok(Compiled { kind: Kind::Const(true), flagged: true });
    if ann.r == ann.big_r {
        return Ok(Compiled::constant(true));
    }
    let outer = ann.outer_box();
    let c = ann.center;
    let (pa, map_a) = tess.points.filter(outer, |p| outer.contains(p) && sup(p, c) >= ann.r);
    if pa.is_empty() {
        return vacuous;
    }
    let ta = Tessellation::build(pa);
    let ga = RegionGraph::build(&ta, ann.region(arms.sector))?;
    let (w_in, w_out) = widths(&ta, &ga, ann);
    let r_in = ann.r + w_in;
    let r_out = ann.big_r - w_out;
    let (lo, hi) = match variant {
        HatVariant::Hat => (r_in, r_out),
        HatVariant::Ext => (ann.r, r_out),
        HatVariant::Int => (r_in, ann.big_r),
    };
    if lo >= hi {
        return vacuous;
    }
    let region = super::Region::annulus(c, lo, hi, arms.sector);
    let g = match variant {
        HatVariant::Hat => remapped(RegionGraph::build(&ta, region)?, &map_a),
        HatVariant::Ext => {
            let (pe, map) = tess.points.filter(outer, |p| outer.contains(p));
            let te = Tessellation::build(pe);
            remapped(RegionGraph::build(&te, region)?, &map)
        }
        HatVariant::Int => {
            let (pi, map) = tess.points.filter(tess.window(), |p| sup(p, c) >= ann.r);
            let ti = Tessellation::build_for(pi, &outer);
            if !check_padding_valid(&ti, &outer) {
                return Err(EventError::Uncertified);
            }
            remapped(RegionGraph::build(&ti, region)?, &map)
        }
    };
    Ok(Compiled { kind: Kind::Arm { g, pattern: arms.pattern.clone(), cyclic: arms.cyclic() }, flagged: false })
}

/// Inner and outer relaxation widths of the hat surrogate for this configuration.
pub fn hat_widths(tess: &Tessellation, ann: &AnnulusSpec, arms: &ArmSpec) -> Option<(f64, f64)> {
    let outer: Window = ann.outer_box();
    let (pa, _) = tess.points.filter(outer, |p| outer.contains(p) && sup(p, ann.center) >= ann.r);
    if pa.is_empty() {
        return None;
    }
    let ta = Tessellation::build(pa);
    let ga = RegionGraph::build(&ta, ann.region(arms.sector)).ok()?;
    Some(widths(&ta, &ga, ann))
}

/// Points of `ps` lying in the closed annulus.
pub fn annulus_points(ps: &PointSet, ann: &AnnulusSpec) -> Vec<usize> {
    let outer = ann.outer_box();
    (0..ps.len()).filter(|&i| outer.contains(ps.points[i]) && sup(ps.points[i], ann.center) >= ann.r).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sup_min_over_polygon() {
        let sq = [[1.0, -1.0], [3.0, -1.0], [3.0, 1.0], [1.0, 1.0]];
        assert!((min_sup(&sq, [0.0, 0.0]) - 1.0).abs() < 1e-15);
        let tri = [[-1.0, 2.0], [1.0, 2.0], [0.0, 3.0]];
        assert!((min_sup(&tri, [0.0, 0.0]) - 2.0).abs() < 1e-15);
        let diag = [[2.0, 0.0], [0.0, 2.0], [3.0, 3.0]];
        assert!((min_sup(&diag, [0.0, 0.0]) - 1.0).abs() < 1e-15);
        assert_eq!(min_sup(&sq, [2.0, 0.0]), 0.0);
    }
}

//! The Skorokhod-type metric on colored configurations:
//! `d = ∫_0^∞ e^{−r} d'_r / (1 + d'_r) dr`, where `d'_r` is the bottleneck
//! distance between the color-preserving point sets in `[−r,r]²` (1 when no
//! color-preserving bijection exists).

use serde::{Deserialize, Serialize};

use crate::events::{Color, ColoredConfiguration};
use crate::geometry::{dist2, Pt};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub d: f64,
    /// Bound on the truncated tail `∫_{r_max}^∞`.
    pub err: f64,
}

fn sup(p: Pt) -> f64 {
    p[0].abs().max(p[1].abs())
}

struct Side {
    /// Points sorted by sup-norm, with colors.
    pts: Vec<(f64, Pt, Color)>,
}

impl Side {
    fn new(pts: impl Iterator<Item = (Pt, Color)>) -> Self {
        let mut pts: Vec<(f64, Pt, Color)> = pts.map(|(p, c)| (sup(p), p, c)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        Side { pts }
    }

    fn within(&self, r: f64) -> &[(f64, Pt, Color)] {
        &self.pts[..self.pts.partition_point(|q| q.0 <= r)]
    }
}

fn class(s: &[(f64, Pt, Color)], c: Color) -> Vec<Pt> {
    s.iter().filter(|q| q.2 == c).map(|q| q.1).collect()
}

/// `d'_r` between two colored point sets.
pub fn d_prime(a: &[(Pt, Color)], b: &[(Pt, Color)], r: f64) -> f64 {
    let sa = Side::new(a.iter().copied());
    let sb = Side::new(b.iter().copied());
    d_prime_sides(&sa, &sb, r)
}

fn d_prime_sides(a: &Side, b: &Side, r: f64) -> f64 {
    let (wa, wb) = (a.within(r), b.within(r));
    if wa.len() != wb.len() {
        return 1.0;
    }
    let mut worst: f64 = 0.0;
    for c in [1, -1] {
        let (ca, cb) = (class(wa, c), class(wb, c));
        if ca.len() != cb.len() {
            return 1.0;
        }
        worst = worst.max(bottleneck(&ca, &cb));
    }
    worst
}

/// Smallest `δ` such that some bijection moves every point of `a` by at most
/// `δ` onto `b`. Requires `a.len() == b.len()`.
pub fn bottleneck(a: &[Pt], b: &[Pt]) -> f64 {
    assert_eq!(a.len(), b.len());
    let k = a.len();
    if k == 0 {
        return 0.0;
    }
    let d: Vec<f64> = a.iter().flat_map(|&p| b.iter().map(move |&q| dist2(p, q))).collect();
    // Every point needs a partner, so the answer is at least the worst nearest neighbour.
    let mut lb: f64 = 0.0;
    for i in 0..k {
        lb = lb.max(d[i * k..(i + 1) * k].iter().copied().fold(f64::INFINITY, f64::min));
    }
    for j in 0..k {
        lb = lb.max((0..k).map(|i| d[i * k + j]).fold(f64::INFINITY, f64::min));
    }
    let mut cand: Vec<f64> = d.iter().copied().filter(|&x| x >= lb).collect();
    cand.sort_by(f64::total_cmp);
    cand.dedup();
    let (mut lo, mut hi) = (0, cand.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(k, |i, j| d[i * k + j] <= cand[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cand[lo].sqrt()
}

/// Hopcroft–Karp on the bipartite graph `{(i, j) : edge(i, j)}`.
fn perfect_matching(k: usize, edge: impl Fn(usize, usize) -> bool) -> bool {
    let adj: Vec<Vec<u32>> = (0..k).map(|i| (0..k).filter(|&j| edge(i, j)).map(|j| j as u32).collect()).collect();
    if adj.iter().any(|a| a.is_empty()) {
        return false;
    }
    const FREE: u32 = u32::MAX;
    let mut mate_l = vec![FREE; k];
    let mut mate_r = vec![FREE; k];
    let mut dist = vec![0u32; k];
    let mut matched = 0;
    loop {
        // Layered BFS from the free left vertices.
        let mut queue: Vec<u32> = Vec::new();
        for i in 0..k {
            if mate_l[i] == FREE {
                dist[i] = 0;
                queue.push(i as u32);
            } else {
                dist[i] = u32::MAX;
            }
        }
        let mut found = false;
        let mut h = 0;
        while h < queue.len() {
            let i = queue[h] as usize;
            h += 1;
            for &j in &adj[i] {
                let m = mate_r[j as usize];
                if m == FREE {
                    found = true;
                } else if dist[m as usize] == u32::MAX {
                    dist[m as usize] = dist[i] + 1;
                    queue.push(m);
                }
            }
        }
        if !found {
            break;
        }
        let mut it = vec![0usize; k];
        for i in 0..k {
            if mate_l[i] == FREE && augment(i, &adj, &mut mate_l, &mut mate_r, &mut dist, &mut it) {
                matched += 1;
            }
        }
    }
    matched == k
}

fn augment(
    i: usize,
    adj: &[Vec<u32>],
    mate_l: &mut [u32],
    mate_r: &mut [u32],
    dist: &mut [u32],
    it: &mut [usize],
) -> bool {
    while it[i] < adj[i].len() {
        let j = adj[i][it[i]] as usize;
        it[i] += 1;
        let m = mate_r[j];
        let ok = m == u32::MAX
            || (dist[m as usize] == dist[i] + 1 && augment(m as usize, adj, mate_l, mate_r, dist, it));
        if ok {
            mate_l[i] = j as u32;
            mate_r[j] = i as u32;
            return true;
        }
    }
    dist[i] = u32::MAX;
    false
}

/// `d` between two colored point sets, integrated exactly over `[0, r_max]`:
/// `d'_r` only changes where a point enters the box, and those radii are all
/// included together with the `n` grid radii.
pub fn metric_of_points(a: &[(Pt, Color)], b: &[(Pt, Color)], r_max: f64, n: usize) -> MetricValue {
    let sa = Side::new(a.iter().copied());
    let sb = Side::new(b.iter().copied());
    let mut rs: Vec<f64> = (0..=n.max(1)).map(|k| r_max * k as f64 / n.max(1) as f64).collect();
    rs.extend(sa.pts.iter().chain(&sb.pts).map(|q| q.0).filter(|&s| s < r_max));
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    let mut d = 0.0;
    for w in rs.windows(2) {
        let dp = d_prime_sides(&sa, &sb, w[0]);
        d += dp / (1.0 + dp) * ((-w[0]).exp() - (-w[1]).exp());
    }
    MetricValue { d, err: (-r_max).exp() }
}

pub fn config_metric(a: &ColoredConfiguration, b: &ColoredConfiguration, r_max: f64, n: usize) -> MetricValue {
    let pa: Vec<(Pt, Color)> = a.tess.points.points.iter().copied().zip(a.colors.iter().copied()).collect();
    let pb: Vec<(Pt, Color)> = b.tess.points.points.iter().copied().zip(b.colors.iter().copied()).collect();
    metric_of_points(&pa, &pb, r_max, n)
}

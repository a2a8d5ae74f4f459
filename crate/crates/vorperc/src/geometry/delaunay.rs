//! Incremental Bowyer–Watson Delaunay triangulation with ghost triangles.
//!
//! Triangles are stored counterclockwise. `n[i]` is the neighbour across the
//! edge opposite `v[i]`. A ghost triangle `(a, b, GHOST)` sits outside the hull
//! edge `a -> b`; its conflict region is the open half-plane to the left of
//! `a -> b` plus the open segment `ab`.
//!
//! A point conflicts with a finite triangle only when it lies strictly inside
//! the circumcircle, so cocircular configurations resolve by insertion order,
//! which is itself fixed by a Hilbert sort with index tie-break.

use super::{incircle, orient, Pt};

pub const GHOST: u32 = u32::MAX;
const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Tri {
    v: [u32; 3],
    n: [u32; 3],
}

impl Tri {
    #[inline]
    fn is_ghost(&self) -> bool {
        self.v[2] == GHOST
    }
}

/// Result of triangulating a point set.
#[derive(Clone, Debug, Default)]
pub struct Triangulation {
    /// Finite triangles, counterclockwise.
    pub triangles: Vec<[u32; 3]>,
    /// Undirected edges `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(u32, u32)>,
    /// Hull vertices in counterclockwise order (empty for degenerate inputs).
    pub hull: Vec<u32>,
    /// Indices that were skipped because they duplicate an earlier point.
    pub duplicates: Vec<u32>,
}

struct Builder<'a> {
    pts: &'a [Pt],
    tris: Vec<Tri>,
    free: Vec<u32>,
    mark: Vec<u32>,
    epoch: u32,
    last: u32,
    turn: usize,
    stack: Vec<u32>,
    cavity: Vec<u32>,
    boundary: Vec<(u32, u32, u32, u32)>,
    made: Vec<(u32, u32, u32)>,
}

impl<'a> Builder<'a> {
    #[inline]
    fn p(&self, i: u32) -> Pt {
        self.pts[i as usize]
    }

    fn alloc(&mut self, t: Tri) -> u32 {
        if let Some(i) = self.free.pop() {
            self.tris[i as usize] = t;
            i
        } else {
            self.tris.push(t);
            self.mark.push(0);
            (self.tris.len() - 1) as u32
        }
    }

    fn in_conflict(&self, t: u32, q: Pt) -> bool {
        let tr = &self.tris[t as usize];
        if tr.is_ghost() {
            let a = self.p(tr.v[0]);
            let b = self.p(tr.v[1]);
            let o = orient(a, b, q);
            if o > 0.0 {
                return true;
            }
            if o < 0.0 {
                return false;
            }
            let d1 = (q[0] - a[0]) * (b[0] - a[0]) + (q[1] - a[1]) * (b[1] - a[1]);
            let d2 = (q[0] - b[0]) * (a[0] - b[0]) + (q[1] - b[1]) * (a[1] - b[1]);
            d1 > 0.0 && d2 > 0.0
        } else {
            incircle(self.p(tr.v[0]), self.p(tr.v[1]), self.p(tr.v[2]), q) > 0.0
        }
    }

    /// Visibility walk from `self.last`; returns a triangle in conflict with `q`
    /// or `None` when `q` coincides with an existing vertex.
    fn locate(&mut self, q: Pt) -> Option<u32> {
        let mut t = self.last;
        if self.tris[t as usize].is_ghost() {
            t = self.tris[t as usize].n[2];
        }
        loop {
            let tr = self.tris[t as usize];
            let mut moved = false;
            self.turn = (self.turn + 1) % 3;
            for k in 0..3 {
                let i = (k + self.turn) % 3;
                let a = self.p(tr.v[(i + 1) % 3]);
                let b = self.p(tr.v[(i + 2) % 3]);
                if orient(a, b, q) < 0.0 {
                    let nb = tr.n[i];
                    if self.tris[nb as usize].is_ghost() {
                        return Some(nb);
                    }
                    t = nb;
                    moved = true;
                    break;
                }
            }
            if !moved {
                for &v in &tr.v {
                    if self.p(v) == q {
                        return None;
                    }
                }
                return Some(t);
            }
        }
    }

    fn insert(&mut self, pi: u32) -> bool {
        let q = self.p(pi);
        let Some(start) = self.locate(q) else { return false };
        self.epoch += 1;
        let epoch = self.epoch;
        self.cavity.clear();
        self.boundary.clear();
        self.stack.clear();
        self.stack.push(start);
        self.mark[start as usize] = epoch;
        // Mark values: epoch = in cavity, epoch | high bit = rejected.
        let rejected = epoch | 0x8000_0000;
        while let Some(t) = self.stack.pop() {
            self.cavity.push(t);
            let tr = self.tris[t as usize];
            for i in 0..3 {
                let nb = tr.n[i];
                let m = self.mark[nb as usize];
                if m == epoch {
                    continue;
                }
                if m != rejected && self.in_conflict(nb, q) {
                    self.mark[nb as usize] = epoch;
                    self.stack.push(nb);
                } else {
                    self.mark[nb as usize] = rejected;
                    let u = tr.v[(i + 1) % 3];
                    let w = tr.v[(i + 2) % 3];
                    let nbt = &self.tris[nb as usize];
                    let k = (0..3).find(|&k| nbt.n[k] == t).expect("neighbour link");
                    self.boundary.push((u, w, nb, k as u32));
                }
            }
        }
        for &t in &self.cavity {
            self.free.push(t);
        }
        let mut made = std::mem::take(&mut self.made);
        made.clear();
        let boundary = std::mem::take(&mut self.boundary);
        for &(u, w, nb, k) in &boundary {
            let t = self.alloc(Tri { v: [u, w, pi], n: [NONE, NONE, nb] });
            self.tris[nb as usize].n[k as usize] = t;
            made.push((u, w, t));
        }
        for &(u, w, t) in &made {
            // Across (w, p): the new triangle starting at w. Across (p, u): the one ending at u.
            let a = made.iter().find(|m| m.0 == w).expect("cavity cycle").2;
            let b = made.iter().find(|m| m.1 == u).expect("cavity cycle").2;
            let tr = &mut self.tris[t as usize];
            tr.n[0] = a;
            tr.n[1] = b;
        }
        for &(_, _, t) in &made {
            let tr = self.tris[t as usize];
            let rot = if tr.v[0] == GHOST {
                1
            } else if tr.v[1] == GHOST {
                2
            } else {
                0
            };
            if rot != 0 {
                let v = [tr.v[rot % 3], tr.v[(rot + 1) % 3], tr.v[(rot + 2) % 3]];
                let n = [tr.n[rot % 3], tr.n[(rot + 1) % 3], tr.n[(rot + 2) % 3]];
                self.tris[t as usize] = Tri { v, n };
            }
        }
        self.boundary = boundary;
        self.last = made.iter().map(|m| m.2).find(|&t| !self.tris[t as usize].is_ghost()).unwrap_or(made[0].2);
        self.made = made;
        true
    }
}

/// Hilbert index of `(x, y)` on a `2^16` grid.
fn hilbert(mut x: u32, mut y: u32) -> u64 {
    let n: u32 = 1 << 16;
    let mut d: u64 = 0;
    let mut s = n / 2;
    while s > 0 {
        let rx = u32::from(x & s > 0);
        let ry = u32::from(y & s > 0);
        d += (s as u64) * (s as u64) * ((3 * rx) ^ ry) as u64;
        if ry == 0 {
            if rx == 1 {
                x = n - 1 - x;
                y = n - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}

fn insertion_order(pts: &[Pt]) -> Vec<u32> {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let sx = if x1 > x0 { 65535.0 / (x1 - x0) } else { 0.0 };
    let sy = if y1 > y0 { 65535.0 / (y1 - y0) } else { 0.0 };
    let mut keyed: Vec<(u64, u32)> = pts
        .iter()
        .enumerate()
        .map(|(i, p)| (hilbert(((p[0] - x0) * sx) as u32, ((p[1] - y0) * sy) as u32), i as u32))
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|k| k.1).collect()
}

/// Delaunay triangulation of `pts`.
///
/// Fewer than three distinct points, or an entirely collinear input, yields no
/// triangles; the edges then join consecutive points along the line.
pub fn triangulate(pts: &[Pt]) -> Triangulation {
    let order = insertion_order(pts);
    let n = pts.len();
    if n < 2 {
        return Triangulation::default();
    }
    // Seed triangle: first two distinct points and the first point off their line.
    let a = order[0];
    let Some(bpos) = order.iter().position(|&i| pts[i as usize] != pts[a as usize]) else {
        return Triangulation { duplicates: order[1..].to_vec(), ..Default::default() };
    };
    let b = order[bpos];
    let cpos = order.iter().position(|&i| orient(pts[a as usize], pts[b as usize], pts[i as usize]) != 0.0);
    let Some(cpos) = cpos else {
        return collinear(pts, &order);
    };
    let c = order[cpos];
    let (a, b) = if orient(pts[a as usize], pts[b as usize], pts[c as usize]) > 0.0 { (a, b) } else { (b, a) };
    let mut bd = Builder {
        pts,
        tris: Vec::with_capacity(2 * n + 8),
        free: Vec::new(),
        mark: Vec::with_capacity(2 * n + 8),
        epoch: 0,
        last: 0,
        turn: 0,
        stack: Vec::new(),
        cavity: Vec::new(),
        boundary: Vec::new(),
        made: Vec::new(),
    };
    let v = [a, b, c];
    bd.tris.push(Tri { v, n: [1, 2, 3] });
    for i in 0..3 {
        bd.tris.push(Tri { v: [v[(i + 2) % 3], v[(i + 1) % 3], GHOST], n: [1 + ((i + 2) % 3) as u32, 1 + ((i + 1) % 3) as u32, 0] });
    }
    bd.mark.resize(4, 0);
    let mut duplicates = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        if k == 0 || k == bpos || k == cpos {
            continue;
        }
        if !bd.insert(i) {
            duplicates.push(i);
        }
    }
    finish(bd, duplicates)
}

fn finish(bd: Builder<'_>, mut duplicates: Vec<u32>) -> Triangulation {
    let mut live = vec![true; bd.tris.len()];
    for &f in &bd.free {
        live[f as usize] = false;
    }
    let mut triangles = Vec::new();
    let mut edges = Vec::new();
    let mut next = std::collections::HashMap::new();
    for (t, tr) in bd.tris.iter().enumerate() {
        if !live[t] {
            continue;
        }
        if tr.is_ghost() {
            edges.push((tr.v[0].min(tr.v[1]), tr.v[0].max(tr.v[1])));
            // Hull runs counterclockwise: the ghost edge a -> b is the hull edge b -> a.
            next.insert(tr.v[1], tr.v[0]);
        } else {
            triangles.push(tr.v);
            for i in 0..3 {
                let (p, q) = (tr.v[i], tr.v[(i + 1) % 3]);
                if p < q {
                    edges.push((p, q));
                }
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let mut hull = Vec::new();
    if let Some(&start) = next.keys().min() {
        let mut cur = start;
        loop {
            hull.push(cur);
            cur = next[&cur];
            if cur == start || hull.len() > next.len() {
                break;
            }
        }
    }
    duplicates.sort_unstable();
    Triangulation { triangles, edges, hull, duplicates }
}

fn collinear(pts: &[Pt], order: &[u32]) -> Triangulation {
    let a = pts[order[0] as usize];
    let b = pts[order.iter().copied().find(|&i| pts[i as usize] != a).unwrap() as usize];
    let dir = [b[0] - a[0], b[1] - a[1]];
    let mut keyed: Vec<(f64, u32)> = order
        .iter()
        .map(|&i| {
            let p = pts[i as usize];
            ((p[0] - a[0]) * dir[0] + (p[1] - a[1]) * dir[1], i)
        })
        .collect();
    keyed.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let mut edges = Vec::new();
    let mut duplicates = Vec::new();
    let mut prev: Option<u32> = None;
    for &(_, i) in &keyed {
        if let Some(p) = prev {
            if pts[p as usize] == pts[i as usize] {
                duplicates.push(i);
                continue;
            }
            edges.push((p.min(i), p.max(i)));
        }
        prev = Some(i);
    }
    edges.sort_unstable();
    duplicates.sort_unstable();
    Triangulation { triangles: Vec::new(), edges, hull: Vec::new(), duplicates }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_poisson, Window};

    fn check_delaunay(pts: &[Pt], tri: &Triangulation) {
        for t in &tri.triangles {
            let (a, b, c) = (pts[t[0] as usize], pts[t[1] as usize], pts[t[2] as usize]);
            assert!(orient(a, b, c) > 0.0);
            for (i, &p) in pts.iter().enumerate() {
                if t.contains(&(i as u32)) {
                    continue;
                }
                assert!(incircle(a, b, c, p) <= 0.0, "point {i} inside circumcircle of {t:?}");
            }
        }
    }

    #[test]
    fn single_triangle() {
        let pts = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let t = triangulate(&pts);
        assert_eq!(t.triangles.len(), 1);
        assert_eq!(t.edges, vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(t.hull.len(), 3);
    }

    #[test]
    fn random_sets_are_delaunay() {
        for seed in 0..20 {
            let w = Window::new(0.0, 10.0, 0.0, 10.0).unwrap();
            let ps = sample_poisson(w, 1.0, seed);
            let t = triangulate(&ps.points);
            check_delaunay(&ps.points, &t);
            // Euler: 2n - 2 - h triangles.
            let n = ps.len();
            assert_eq!(t.triangles.len(), 2 * n - 2 - t.hull.len());
            assert_eq!(t.edges.len(), 3 * n - 3 - t.hull.len());
        }
    }

    #[test]
    fn lattice_is_valid() {
        let mut pts = Vec::new();
        for i in 0..7 {
            for j in 0..6 {
                pts.push([i as f64, j as f64]);
            }
        }
        let t = triangulate(&pts);
        check_delaunay(&pts, &t);
        assert_eq!(t.triangles.len(), 2 * 42 - 2 - t.hull.len());
        assert_eq!(t, triangulate(&pts));
    }

    #[test]
    fn collinear_chain() {
        let pts = vec![[2.0, 2.0], [0.0, 0.0], [1.0, 1.0], [3.0, 3.0]];
        let t = triangulate(&pts);
        assert!(t.triangles.is_empty());
        assert_eq!(t.edges, vec![(0, 2), (0, 3), (1, 2)]);
    }

    #[test]
    fn duplicates_are_skipped() {
        let pts = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.3, 0.3]];
        let t = triangulate(&pts);
        assert_eq!(t.duplicates.len(), 1);
        assert_eq!(t.triangles.len(), 3);
    }

    impl PartialEq for Triangulation {
        fn eq(&self, o: &Self) -> bool {
            self.triangles == o.triangles && self.edges == o.edges && self.hull == o.hull
        }
    }
}

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use super::delaunay::{triangulate, Triangulation};
use super::polygon::Poly;
use super::{dist2, orient, GeometryError, PointSet, Pt, Window};

/// Cell-edge labels for the four window sides; every other label is a point index.
pub const LABEL_BOTTOM: u32 = u32::MAX - 3;
pub const LABEL_RIGHT: u32 = u32::MAX - 2;
pub const LABEL_TOP: u32 = u32::MAX - 1;
pub const LABEL_LEFT: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub c: Pt,
    pub r: f64,
}

static BUILDS: AtomicU64 = AtomicU64::new(0);

/// Number of tessellations constructed by this process so far.
pub fn tessellations_built() -> u64 {
    BUILDS.load(Ordering::Relaxed)
}

/// Delaunay adjacency and window-clipped Voronoi cells of a point set.
#[derive(Clone, Debug)]
pub struct Tessellation {
    pub points: PointSet,
    pub triangles: Vec<[u32; 3]>,
    pub circumdisks: Vec<Disk>,
    pub hull: Vec<u32>,
    adj_off: Vec<u32>,
    adj: Vec<u32>,
    cell_off: Vec<u32>,
    cell_v: Vec<Pt>,
    cell_l: Vec<u32>,
    cell_bb: Vec<Option<Window>>,
    cell_roi: Option<Window>,
}

fn circumdisk(a: Pt, b: Pt, c: Pt) -> Disk {
    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
    let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
    let d = 2.0 * (bx * cy - by * cx);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    Disk { c: [a[0] + ux, a[1] + uy], r: (ux * ux + uy * uy).sqrt() }
}

impl Tessellation {
    pub fn build(points: PointSet) -> Self {
        let tri = triangulate(&points.points);
        Self::from_triangulation(points, tri, None)
    }

    /// Like [`Tessellation::build`] but only materializes the cells that can
    /// meet `roi`: those of hull vertices and of vertices of triangles whose
    /// circumdisk meets `roi` (every interior cell is covered by the
    /// circumdisks of its incident triangles). Other cells are left empty.
    pub fn build_for(points: PointSet, roi: &Window) -> Self {
        let tri = triangulate(&points.points);
        Self::from_triangulation(points, tri, Some(*roi))
    }

    fn from_triangulation(points: PointSet, tri: Triangulation, roi: Option<Window>) -> Self {
        BUILDS.fetch_add(1, Ordering::Relaxed);
        let n = points.len();
        let pts = &points.points;
        let circumdisks = tri
            .triangles
            .iter()
            .map(|t| circumdisk(pts[t[0] as usize], pts[t[1] as usize], pts[t[2] as usize]))
            .collect();
        let mut deg = vec![0u32; n + 1];
        for &(i, j) in &tri.edges {
            deg[i as usize + 1] += 1;
            deg[j as usize + 1] += 1;
        }
        for k in 0..n {
            deg[k + 1] += deg[k];
        }
        let adj_off = deg;
        let mut fill = adj_off.clone();
        let mut adj = vec![0u32; tri.edges.len() * 2];
        for &(i, j) in &tri.edges {
            adj[fill[i as usize] as usize] = j;
            fill[i as usize] += 1;
            adj[fill[j as usize] as usize] = i;
            fill[j as usize] += 1;
        }
        for k in 0..n {
            adj[adj_off[k] as usize..adj_off[k + 1] as usize].sort_unstable();
        }
        let mut t = Tessellation {
            points,
            triangles: tri.triangles,
            circumdisks,
            hull: tri.hull,
            adj_off,
            adj,
            cell_off: Vec::with_capacity(n + 1),
            cell_v: Vec::with_capacity(n * 7),
            cell_l: Vec::with_capacity(n * 7),
            cell_bb: Vec::with_capacity(n),
            cell_roi: None,
        };
        let mut want = vec![roi.is_none() || t.triangles.is_empty(); n];
        if let Some(roi) = roi {
            for (tr, d) in t.triangles.iter().zip(&t.circumdisks) {
                if roi.dist2(d.c) <= d.r * d.r {
                    for &v in tr {
                        want[v as usize] = true;
                    }
                }
            }
            for &h in &t.hull {
                want[h as usize] = true;
            }
        }
        for &d in &tri.duplicates {
            want[d as usize] = false;
        }
        t.cell_roi = roi;
        t.build_cells(&want);
        t
    }

    fn build_cells(&mut self, want: &[bool]) {
        let w = self.points.window;
        let base = Poly::rect(&w, [LABEL_BOTTOM, LABEL_RIGHT, LABEL_TOP, LABEL_LEFT]);
        let mut cur = Poly::default();
        let mut nxt = Poly::default();
        let mut order: Vec<(f64, u32)> = Vec::new();
        self.cell_off.push(0);
        for i in 0..self.points.len() {
            if !want[i] {
                self.cell_off.push(self.cell_v.len() as u32);
                self.cell_bb.push(None);
                continue;
            }
            let p = self.points.points[i];
            order.clear();
            order.extend(self.neighbors(i).iter().map(|&j| (dist2(p, self.points.points[j as usize]), j)));
            order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            cur.clone_from(&base);
            for &(_, j) in &order {
                let q = self.points.points[j as usize];
                let a = [q[0] - p[0], q[1] - p[1]];
                let m = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
                cur.clip(a, a[0] * m[0] + a[1] * m[1], j, &mut nxt);
                std::mem::swap(&mut cur, &mut nxt);
            }
            self.cell_v.extend_from_slice(&cur.v);
            self.cell_l.extend_from_slice(&cur.labels);
            self.cell_off.push(self.cell_v.len() as u32);
            self.cell_bb.push(cur.bbox());
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Whether every cell was materialized.
    pub fn is_complete(&self) -> bool {
        self.cell_roi.is_none()
    }

    /// Whether every cell meeting `w` was materialized.
    pub fn cells_cover(&self, w: &Window) -> bool {
        self.cell_roi.is_none_or(|r| r.contains_window(w))
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn window(&self) -> Window {
        self.points.window
    }

    #[inline]
    pub fn point(&self, i: usize) -> Pt {
        self.points.points[i]
    }

    /// Sorted Delaunay neighbours of `i`.
    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.adj[self.adj_off[i] as usize..self.adj_off[i + 1] as usize]
    }

    /// Undirected Delaunay edges `(i, j)`, `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.len()).flat_map(move |i| {
            self.neighbors(i).iter().filter(move |&&j| j as usize > i).map(move |&j| (i as u32, j))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adj.len() / 2
    }

    /// Voronoi cell of `i` (counterclockwise vertices, edge labels).
    #[inline]
    pub fn cell(&self, i: usize) -> (&[Pt], &[u32]) {
        let a = self.cell_off[i] as usize;
        let b = self.cell_off[i + 1] as usize;
        (&self.cell_v[a..b], &self.cell_l[a..b])
    }

    pub fn cell_poly(&self, i: usize) -> Poly {
        let (v, l) = self.cell(i);
        Poly { v: v.to_vec(), labels: l.to_vec() }
    }

    #[inline]
    pub fn cell_bbox(&self, i: usize) -> Option<Window> {
        self.cell_bb[i]
    }

    pub fn cell_area(&self, i: usize) -> f64 {
        super::polygon::area(self.cell(i).0)
    }

    /// Shared Voronoi edge of `i` and `j`, taken from the cell of the smaller index.
    pub fn voronoi_edge(&self, i: usize, j: usize) -> Option<(Pt, Pt)> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let (v, l) = self.cell(a);
        let k = l.iter().position(|&x| x as usize == b)?;
        Some((v[k], v[(k + 1) % v.len()]))
    }

    /// Index of the point nearest to `u`, ties broken by lowest index.
    pub fn locate(&self, u: Pt) -> Result<usize, GeometryError> {
        if self.is_empty() {
            return Err(GeometryError::NoCells);
        }
        let pts = &self.points.points;
        let mut cur = 0usize;
        let mut best = dist2(u, pts[0]);
        loop {
            let mut moved = false;
            for &j in self.neighbors(cur) {
                let d = dist2(u, pts[j as usize]);
                if d < best {
                    best = d;
                    cur = j as usize;
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
        // Gather every point at the minimal distance reachable through ties.
        let mut tied = vec![cur];
        let mut k = 0;
        while k < tied.len() {
            for &j in self.neighbors(tied[k]) {
                let j = j as usize;
                if dist2(u, pts[j]) == best && !tied.contains(&j) {
                    tied.push(j);
                }
            }
            k += 1;
        }
        Ok(*tied.iter().min().unwrap())
    }
}

/// Margin `m` bounding the chance that a cell meeting `roi` feels points
/// outside `roi ⊕ m`.
///
/// If certification fails there is a Poisson-empty disk of radius at least
/// `m/2` meeting `roi`. Such a disk contains an empty disk of radius
/// `ρ = m/2 − g/√2` centred on a grid of spacing `g = m/8` laid over
/// `roi ⊕ m/2`, so the failure probability is at most
/// `((W+m)/g + 2)((H+m)/g + 2) · exp(−λ π ρ²)`. The result is the smallest
/// such `m` (found by bisection) for which this bound is `≤ failure_prob`.
pub fn padded_margin(roi: &Window, intensity: f64, failure_prob: f64) -> f64 {
    assert!(failure_prob > 0.0 && failure_prob < 1.0, "failure_prob must lie in (0,1)");
    assert!(intensity > 0.0);
    let bound = |m: f64| {
        let g = m / 8.0;
        let rho = m / 2.0 - g / std::f64::consts::SQRT_2;
        let k = ((roi.width() + m) / g + 2.0) * ((roi.height() + m) / g + 2.0);
        (k.ln() - intensity * std::f64::consts::PI * rho * rho).exp()
    };
    let mut hi = 1.0;
    while bound(hi) > failure_prob {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if bound(mid) > failure_prob {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `roi` enlarged by [`padded_margin`] on all sides.
pub fn padded_window(roi: &Window, intensity: f64, failure_prob: f64) -> Window {
    roi.expand(padded_margin(roi, intensity, failure_prob))
}

/// True iff every Delaunay circumdisk meeting `roi` lies inside the window and
/// `roi` is inside the convex hull, so no point outside the window could alter
/// any cell restricted to `roi`.
pub fn check_padding_valid(tess: &Tessellation, roi: &Window) -> bool {
    if tess.triangles.is_empty() {
        return false;
    }
    let w = tess.window();
    for d in &tess.circumdisks {
        if roi.dist2(d.c) < d.r * d.r
            && !(d.c[0] - d.r >= w.x0 && d.c[0] + d.r <= w.x1 && d.c[1] - d.r >= w.y0 && d.c[1] + d.r <= w.y1)
        {
            return false;
        }
    }
    let h = &tess.hull;
    for corner in roi.corners() {
        for k in 0..h.len() {
            let a = tess.point(h[k] as usize);
            let b = tess.point(h[(k + 1) % h.len()] as usize);
            if orient(a, b, corner) < 0.0 {
                return false;
            }
        }
    }
    true
}

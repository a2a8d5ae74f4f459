//! Regions as unions of rectangles, and the piece graph of a tessellation restricted to one.

use serde::{Deserialize, Serialize};

use crate::geometry::polygon::{segment_in_convex, segment_in_rect, Poly};
use crate::geometry::{Pt, Tessellation, Window};

use super::EventError;

/// A straight piece of region boundary; it lies on the boundary of `strip`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Pt,
    pub b: Pt,
    pub strip: usize,
}

impl Segment {
    pub fn len(&self) -> f64 {
        crate::geometry::dist2(self.a, self.b).sqrt()
    }
}

/// A boundary arc, traversed segment by segment; positions along it are arclengths.
#[derive(Clone, Debug, PartialEq)]
pub struct Boundary {
    pub segs: Vec<Segment>,
    pub cyclic: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sector {
    FullPlane,
    HalfPlane,
    QuarterPlane,
}

/// A closed region given as a union of axis-aligned rectangles ("strips"),
/// together with labelled boundary arcs.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub strips: Vec<Window>,
    pub boundaries: Vec<Boundary>,
}

pub const BOTTOM: usize = 0;
pub const RIGHT: usize = 1;
pub const TOP: usize = 2;
pub const LEFT: usize = 3;
pub const INNER: usize = 0;
pub const OUTER: usize = 1;

fn seg(a: Pt, b: Pt, strip: usize) -> Segment {
    Segment { a, b, strip }
}

impl Region {
    /// A rectangle with boundaries `[BOTTOM, RIGHT, TOP, LEFT]`.
    pub fn rect(w: Window) -> Self {
        let [p0, p1, p2, p3] = w.corners();
        let one = |a, b| Boundary { segs: vec![seg(a, b, 0)], cyclic: false };
        Region { strips: vec![w], boundaries: vec![one(p0, p1), one(p1, p2), one(p2, p3), one(p3, p0)] }
    }

    /// `c + [-R,R]^2 \ ]-r,r[^2`, intersected with the upper half-plane or the
    /// positive quadrant (relative to `c`) for the restricted sectors.
    /// Boundaries are `[INNER, OUTER]`, both counterclockwise.
    pub fn annulus(c: Pt, r: f64, big_r: f64, sector: Sector) -> Self {
        let p = |x: f64, y: f64| [c[0] + x, c[1] + y];
        let rect = |x0, x1, y0, y1| Window { x0: c[0] + x0, x1: c[0] + x1, y0: c[1] + y0, y1: c[1] + y1 };
        let (r, rr) = (r, big_r);
        match sector {
            Sector::FullPlane => {
                // 0: bottom, 1: right, 2: top, 3: left.
                let strips = vec![
                    rect(-rr, rr, -rr, -r),
                    rect(r, rr, -rr, rr),
                    rect(-rr, rr, r, rr),
                    rect(-rr, -r, -rr, rr),
                ];
                let inner = Boundary {
                    segs: vec![
                        seg(p(-r, -r), p(r, -r), 0),
                        seg(p(r, -r), p(r, r), 1),
                        seg(p(r, r), p(-r, r), 2),
                        seg(p(-r, r), p(-r, -r), 3),
                    ],
                    cyclic: true,
                };
                let outer = Boundary {
                    segs: vec![
                        seg(p(-rr, -rr), p(rr, -rr), 0),
                        seg(p(rr, -rr), p(rr, rr), 1),
                        seg(p(rr, rr), p(-rr, rr), 2),
                        seg(p(-rr, rr), p(-rr, -rr), 3),
                    ],
                    cyclic: true,
                };
                Region { strips, boundaries: vec![inner, outer] }
            }
            Sector::HalfPlane => {
                // 0: right, 1: top, 2: left.
                let strips = vec![rect(r, rr, 0.0, rr), rect(-rr, rr, r, rr), rect(-rr, -r, 0.0, rr)];
                let inner = Boundary {
                    segs: vec![seg(p(r, 0.0), p(r, r), 0), seg(p(r, r), p(-r, r), 1), seg(p(-r, r), p(-r, 0.0), 2)],
                    cyclic: false,
                };
                let outer = Boundary {
                    segs: vec![
                        seg(p(rr, 0.0), p(rr, rr), 0),
                        seg(p(rr, rr), p(-rr, rr), 1),
                        seg(p(-rr, rr), p(-rr, 0.0), 2),
                    ],
                    cyclic: false,
                };
                Region { strips, boundaries: vec![inner, outer] }
            }
            Sector::QuarterPlane => {
                // 0: right, 1: top.
                let strips = vec![rect(r, rr, 0.0, rr), rect(0.0, rr, r, rr)];
                let inner = Boundary { segs: vec![seg(p(r, 0.0), p(r, r), 0), seg(p(r, r), p(0.0, r), 1)], cyclic: false };
                let outer =
                    Boundary { segs: vec![seg(p(rr, 0.0), p(rr, rr), 0), seg(p(rr, rr), p(0.0, rr), 1)], cyclic: false };
                Region { strips, boundaries: vec![inner, outer] }
            }
        }
    }

    pub fn bbox(&self) -> Window {
        let mut b = self.strips[0];
        for s in &self.strips[1..] {
            b = Window { x0: b.x0.min(s.x0), x1: b.x1.max(s.x1), y0: b.y0.min(s.y0), y1: b.y1.max(s.y1) };
        }
        b
    }

    pub fn area(&self) -> f64 {
        // Strips overlap only pairwise in corner rectangles.
        let mut a: f64 = self.strips.iter().map(Window::area).sum();
        for i in 0..self.strips.len() {
            for j in i + 1..self.strips.len() {
                if let Some(w) = overlap(&self.strips[i], &self.strips[j]) {
                    a -= w.area();
                }
            }
        }
        a
    }

    pub fn contains(&self, u: Pt) -> bool {
        self.strips.iter().any(|s| s.contains(u))
    }
}

fn overlap(a: &Window, b: &Window) -> Option<Window> {
    let w = Window { x0: a.x0.max(b.x0), x1: a.x1.min(b.x1), y0: a.y0.max(b.y0), y1: a.y1.min(b.y1) };
    (w.x0 < w.x1 && w.y0 < w.y1).then_some(w)
}

/// Where a node meets a boundary arc: arclength interval `[s0, s1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Contact {
    pub node: u32,
    pub s0: f64,
    pub s1: f64,
}

/// Graph whose nodes are the connected pieces of `cell ∩ region`, adjacent
/// when they share a Voronoi edge of positive length inside the region.
#[derive(Clone, Debug)]
pub struct RegionGraph {
    pub region: Region,
    node_cell: Vec<u32>,
    adj_off: Vec<u32>,
    adj: Vec<u32>,
    contacts: Vec<Vec<Contact>>,
    touch: Vec<u8>,
    part_off: Vec<u32>,
    part_v: Vec<Pt>,
    part_node: Vec<u32>,
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n as u32).collect())
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.0[x as usize] != x {
            let p = self.0[x as usize];
            self.0[x as usize] = self.0[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            self.0[hi as usize] = lo;
        }
    }
}

impl RegionGraph {
    pub fn build(tess: &Tessellation, region: Region) -> Result<Self, EventError> {
        let bb = region.bbox();
        if !tess.cells_cover(&bb) {
            return Err(EventError::Uncertified);
        }
        let ns = region.strips.len();
        let mut scratch = Poly::default();
        let mut out = Poly::default();
        let mut tmp = Poly::default();
        // Per-strip parts: (cell, strip, polygon).
        let mut part_cell: Vec<u32> = Vec::new();
        let mut part_strip: Vec<u8> = Vec::new();
        let mut part_off: Vec<u32> = vec![0];
        let mut part_v: Vec<Pt> = Vec::new();
        // For every cell with parts, the part index per strip.
        let mut cell_parts: Vec<(u32, [u32; 4])> = Vec::new();
        for i in 0..tess.len() {
            let Some(cb) = tess.cell_bbox(i) else { continue };
            if !cb.intersects(&bb) {
                continue;
            }
            let (v, l) = tess.cell(i);
            let cell = Poly { v: v.to_vec(), labels: l.to_vec() };
            let mut slots = [u32::MAX; 4];
            let mut any = false;
            for (s, w) in region.strips.iter().enumerate() {
                if !cb.intersects(w) {
                    continue;
                }
                cell.clip_rect(w, [0; 4], &mut scratch, &mut out);
                if out.area() > 0.0 {
                    slots[s] = part_cell.len() as u32;
                    part_cell.push(i as u32);
                    part_strip.push(s as u8);
                    part_v.extend_from_slice(&out.v);
                    part_off.push(part_v.len() as u32);
                    any = true;
                }
            }
            if any {
                cell_parts.push((i as u32, slots));
            }
        }
        let np = part_cell.len();
        let mut uf = UnionFind::new(np);
        for (_, slots) in &cell_parts {
            for a in 0..ns {
                for b in a + 1..ns {
                    let (pa, pb) = (slots[a], slots[b]);
                    if pa == u32::MAX || pb == u32::MAX {
                        continue;
                    }
                    if let Some(ov) = overlap(&region.strips[a], &region.strips[b]) {
                        let poly = Poly {
                            v: part_v[part_off[pa as usize] as usize..part_off[pa as usize + 1] as usize].to_vec(),
                            labels: vec![0; (part_off[pa as usize + 1] - part_off[pa as usize]) as usize],
                        };
                        poly.clip_rect(&ov, [0; 4], &mut scratch, &mut tmp);
                        if tmp.area() > 0.0 {
                            uf.union(pa, pb);
                        }
                    }
                }
            }
        }
        // Number nodes by first part.
        let mut node_of_root = vec![u32::MAX; np];
        let mut part_node = vec![0u32; np];
        let mut node_cell = Vec::new();
        for p in 0..np {
            let root = uf.find(p as u32) as usize;
            if node_of_root[root] == u32::MAX {
                node_of_root[root] = node_cell.len() as u32;
                node_cell.push(part_cell[p]);
            }
            part_node[p] = node_of_root[root];
        }
        let nn = node_cell.len();
        // Lookup from cell index to slots.
        let mut slot_of = std::collections::HashMap::with_capacity(cell_parts.len());
        for (c, slots) in &cell_parts {
            slot_of.insert(*c, *slots);
        }
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for (c, slots) in &cell_parts {
            let i = *c as usize;
            for &j in tess.neighbors(i) {
                if (j as usize) < i {
                    continue;
                }
                let Some(other) = slot_of.get(&j) else { continue };
                let Some((p, q)) = tess.voronoi_edge(i, j as usize) else { continue };
                for s in 0..ns {
                    if slots[s] == u32::MAX || other[s] == u32::MAX {
                        continue;
                    }
                    if let Some((t0, t1)) = segment_in_rect(p, q, &region.strips[s]) {
                        if t1 > t0 {
                            let a = part_node[slots[s] as usize];
                            let b = part_node[other[s] as usize];
                            edges.push((a.min(b), a.max(b)));
                        }
                    }
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let mut deg = vec![0u32; nn + 1];
        for &(a, b) in &edges {
            deg[a as usize + 1] += 1;
            deg[b as usize + 1] += 1;
        }
        for k in 0..nn {
            deg[k + 1] += deg[k];
        }
        let adj_off = deg;
        let mut fill = adj_off.clone();
        let mut adj = vec![0u32; edges.len() * 2];
        for &(a, b) in &edges {
            adj[fill[a as usize] as usize] = b;
            fill[a as usize] += 1;
            adj[fill[b as usize] as usize] = a;
            fill[b as usize] += 1;
        }
        let mut contacts = Vec::with_capacity(region.boundaries.len());
        let mut touch = vec![0u8; nn];
        for (k, bd) in region.boundaries.iter().enumerate() {
            let mut list = Vec::new();
            let mut off = 0.0;
            for sg in &bd.segs {
                let len = sg.len();
                let sb = Window {
                    x0: sg.a[0].min(sg.b[0]),
                    x1: sg.a[0].max(sg.b[0]),
                    y0: sg.a[1].min(sg.b[1]),
                    y1: sg.a[1].max(sg.b[1]),
                };
                for (c, slots) in &cell_parts {
                    let part = slots[sg.strip];
                    if part == u32::MAX {
                        continue;
                    }
                    let i = *c as usize;
                    if !tess.cell_bbox(i).is_some_and(|b| b.intersects(&sb)) {
                        continue;
                    }
                    if let Some((t0, t1)) = segment_in_convex(sg.a, sg.b, tess.cell(i).0) {
                        if t1 > t0 {
                            let node = part_node[part as usize];
                            list.push(Contact { node, s0: off + t0 * len, s1: off + t1 * len });
                            touch[node as usize] |= 1 << k;
                        }
                    }
                }
                off += len;
            }
            list.sort_by(|a: &Contact, b: &Contact| a.s0.total_cmp(&b.s0).then(a.node.cmp(&b.node)));
            contacts.push(list);
        }
        Ok(RegionGraph { region, node_cell, adj_off, adj, contacts, touch, part_off, part_v, part_node })
    }

    /// Renames owning points through `map` (local index to global index).
    pub fn remap_cells(&mut self, map: &[u32]) {
        for c in &mut self.node_cell {
            *c = map[*c as usize];
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_cell.len()
    }

    /// Index of the point owning node `k`.
    #[inline]
    pub fn cell(&self, k: usize) -> usize {
        self.node_cell[k] as usize
    }

    #[inline]
    pub fn neighbors(&self, k: usize) -> &[u32] {
        &self.adj[self.adj_off[k] as usize..self.adj_off[k + 1] as usize]
    }

    /// Contacts with boundary `b`, sorted by position.
    pub fn contacts(&self, b: usize) -> &[Contact] {
        &self.contacts[b]
    }

    /// Whether node `k` meets boundary `b`.
    #[inline]
    pub fn touches(&self, k: usize, b: usize) -> bool {
        self.touch[k] >> b & 1 == 1
    }

    /// The distinct points owning at least one node.
    pub fn cells(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.node_cell.iter().map(|&c| c as usize).collect();
        c.sort_unstable();
        c.dedup();
        c
    }

    /// Convex polygons (one per strip) making up each node.
    pub fn parts(&self) -> impl Iterator<Item = (usize, &[Pt])> + '_ {
        (0..self.part_node.len()).map(move |p| {
            (self.part_node[p] as usize, &self.part_v[self.part_off[p] as usize..self.part_off[p + 1] as usize])
        })
    }

    /// Whether the nodes of color `color` connect boundary `a` to boundary `b`.
    pub fn connects(&self, colors: &[i8], color: i8, a: usize, b: usize) -> bool {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut stack: Vec<u32> = Vec::new();
        for c in &self.contacts[a] {
            let k = c.node as usize;
            if !seen[k] && colors[self.cell(k)] == color {
                if self.touches(k, b) {
                    return true;
                }
                seen[k] = true;
                stack.push(c.node);
            }
        }
        while let Some(k) = stack.pop() {
            for &m in self.neighbors(k as usize) {
                let m = m as usize;
                if !seen[m] && colors[self.cell(m)] == color {
                    if self.touches(m, b) {
                        return true;
                    }
                    seen[m] = true;
                    stack.push(m as u32);
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_poisson, PointSet};

    #[test]
    fn annulus_areas() {
        let a = Region::annulus([1.0, 2.0], 2.0, 5.0, Sector::FullPlane);
        assert!((a.area() - (100.0 - 16.0)).abs() < 1e-12);
        let h = Region::annulus([0.0, 0.0], 2.0, 5.0, Sector::HalfPlane);
        assert!((h.area() - 42.0).abs() < 1e-12);
        let q = Region::annulus([0.0, 0.0], 2.0, 5.0, Sector::QuarterPlane);
        assert!((q.area() - 21.0).abs() < 1e-12);
    }

    #[test]
    fn parts_tile_region() {
        let ps = sample_poisson(Window::square([0.0, 0.0], 12.0), 1.0, 3);
        let t = Tessellation::build(ps);
        for sector in [Sector::FullPlane, Sector::HalfPlane, Sector::QuarterPlane] {
            let reg = Region::annulus([0.3, -0.2], 2.0, 7.0, sector);
            let area = reg.area();
            let g = RegionGraph::build(&t, reg).unwrap();
            // Parts of the corner overlaps are counted twice.
            let mut tot = 0.0;
            let mut ov = 0.0;
            for (_, v) in g.parts() {
                tot += crate::geometry::polygon::area(v);
            }
            for a in 0..g.region.strips.len() {
                for b in a + 1..g.region.strips.len() {
                    if let Some(w) = overlap(&g.region.strips[a], &g.region.strips[b]) {
                        ov += w.area();
                    }
                }
            }
            assert!((tot - ov - area).abs() < 1e-8, "{sector:?}: {tot} {ov} {area}");
            let len: f64 = g.region.boundaries[INNER].segs.iter().map(Segment::len).sum();
            let cov: f64 = g.contacts(INNER).iter().map(|c| c.s1 - c.s0).sum();
            assert!((len - cov).abs() < 1e-8);
        }
    }

    #[test]
    fn single_cell_rect() {
        let w = Window::square([0.0, 0.0], 5.0);
        let t = Tessellation::build(PointSet::new(0, w, vec![[0.1, 0.2]]));
        let g = RegionGraph::build(&t, Region::rect(Window::square([0.0, 0.0], 1.0))).unwrap();
        assert_eq!(g.node_count(), 1);
        for b in 0..4 {
            assert!(g.touches(0, b));
        }
        assert!(g.connects(&[1], 1, LEFT, RIGHT));
        assert!(!g.connects(&[-1], 1, LEFT, RIGHT));
    }

    #[test]
    fn corner_cell_splits_around_hole() {
        // A lone point in the hole: its cell covers everything and meets all strips.
        let w = Window::square([0.0, 0.0], 10.0);
        let t = Tessellation::build(PointSet::new(0, w, vec![[0.0, 0.0]]));
        let g = RegionGraph::build(&t, Region::annulus([0.0, 0.0], 1.0, 3.0, Sector::FullPlane)).unwrap();
        assert_eq!(g.node_count(), 1);
        let g = RegionGraph::build(&t, Region::annulus([0.0, 0.0], 1.0, 3.0, Sector::HalfPlane)).unwrap();
        assert_eq!(g.node_count(), 1);
    }
}

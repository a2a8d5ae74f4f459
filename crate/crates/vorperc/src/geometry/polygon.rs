//! Small convex-polygon kernel: labelled half-plane clipping, areas, segment clipping.

use super::{Pt, Window};

/// Convex polygon, counterclockwise; `labels[k]` tags the edge `v[k] -> v[k+1]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    pub v: Vec<Pt>,
    pub labels: Vec<u32>,
}

impl Poly {
    pub fn rect(w: &Window, labels: [u32; 4]) -> Self {
        Poly { v: w.corners().to_vec(), labels: labels.to_vec() }
    }

    pub fn is_empty(&self) -> bool {
        self.v.len() < 3
    }

    pub fn area(&self) -> f64 {
        area(&self.v)
    }

    pub fn bbox(&self) -> Option<Window> {
        bbox(&self.v)
    }

    /// Keeps `{u : a·u <= b}`; new edges along the line get `label`.
    pub fn clip(&self, a: Pt, b: f64, label: u32, out: &mut Poly) {
        out.v.clear();
        out.labels.clear();
        let n = self.v.len();
        if n == 0 {
            return;
        }
        for k in 0..n {
            let p = self.v[k];
            let q = self.v[(k + 1) % n];
            let dp = a[0] * p[0] + a[1] * p[1] - b;
            let dq = a[0] * q[0] + a[1] * q[1] - b;
            let lp = self.labels[k];
            let pin = dp <= 0.0;
            let qin = dq <= 0.0;
            if pin {
                out.v.push(p);
                out.labels.push(lp);
                if !qin {
                    out.v.push(lerp(p, q, dp / (dp - dq)));
                    out.labels.push(label);
                }
            } else if qin {
                out.v.push(lerp(p, q, dp / (dp - dq)));
                out.labels.push(lp);
            }
        }
        dedup_ring(out);
    }

    /// Intersection with an axis-aligned rectangle.
    pub fn clip_rect(&self, w: &Window, labels: [u32; 4], scratch: &mut Poly, out: &mut Poly) {
        self.clip([0.0, -1.0], -w.y0, labels[0], scratch);
        scratch.clip([1.0, 0.0], w.x1, labels[1], out);
        out.clip([0.0, 1.0], w.y1, labels[2], scratch);
        scratch.clip([-1.0, 0.0], -w.x0, labels[3], out);
    }
}

#[inline]
fn lerp(p: Pt, q: Pt, t: f64) -> Pt {
    [p[0] + (q[0] - p[0]) * t, p[1] + (q[1] - p[1]) * t]
}

fn dedup_ring(poly: &mut Poly) {
    let n = poly.v.len();
    if n < 2 {
        return;
    }
    let mut v = Vec::with_capacity(n);
    let mut l = Vec::with_capacity(n);
    for k in 0..n {
        let q = poly.v[(k + 1) % n];
        if poly.v[k] == q && n > 1 {
            continue;
        }
        v.push(poly.v[k]);
        l.push(poly.labels[k]);
    }
    poly.v = v;
    poly.labels = l;
}

pub fn area(v: &[Pt]) -> f64 {
    let n = v.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for k in 0..n {
        let p = v[k];
        let q = v[(k + 1) % n];
        s += p[0] * q[1] - p[1] * q[0];
    }
    s / 2.0
}

pub fn bbox(v: &[Pt]) -> Option<Window> {
    if v.is_empty() {
        return None;
    }
    let mut w = Window { x0: v[0][0], x1: v[0][0], y0: v[0][1], y1: v[0][1] };
    for p in &v[1..] {
        w.x0 = w.x0.min(p[0]);
        w.x1 = w.x1.max(p[0]);
        w.y0 = w.y0.min(p[1]);
        w.y1 = w.y1.max(p[1]);
    }
    Some(w)
}

/// Parameter interval `[t0, t1] ⊆ [0, 1]` of the segment `p + t (q - p)` inside the rectangle.
pub fn segment_in_rect(p: Pt, q: Pt, w: &Window) -> Option<(f64, f64)> {
    let d = [q[0] - p[0], q[1] - p[1]];
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    for (num, den) in [
        (p[0] - w.x0, -d[0]),
        (w.x1 - p[0], d[0]),
        (p[1] - w.y0, -d[1]),
        (w.y1 - p[1], d[1]),
    ] {
        // Constraint: den * t <= num.
        if den == 0.0 {
            if num < 0.0 {
                return None;
            }
        } else {
            let t = num / den;
            if den > 0.0 {
                t1 = t1.min(t);
            } else {
                t0 = t0.max(t);
            }
        }
    }
    (t0 <= t1).then_some((t0, t1))
}

/// Parameter interval of the segment `p + t (q - p)`, `t ∈ [0,1]`, inside a convex ccw polygon.
pub fn segment_in_convex(p: Pt, q: Pt, poly: &[Pt]) -> Option<(f64, f64)> {
    let n = poly.len();
    if n < 3 {
        return None;
    }
    let d = [q[0] - p[0], q[1] - p[1]];
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    for k in 0..n {
        let a = poly[k];
        let b = poly[(k + 1) % n];
        // Inside: cross(b - a, u - a) >= 0.
        let e = [b[0] - a[0], b[1] - a[1]];
        let f0 = e[0] * (p[1] - a[1]) - e[1] * (p[0] - a[0]);
        let fd = e[0] * d[1] - e[1] * d[0];
        if fd == 0.0 {
            if f0 < 0.0 {
                return None;
            }
        } else {
            let t = -f0 / fd;
            if fd > 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
        if t0 > t1 {
            return None;
        }
    }
    Some((t0, t1))
}

//! Poisson point sets, Delaunay/Voronoi structure and finite-window certification.

mod delaunay;
mod poisson;
pub mod polygon;
mod tessellation;

pub use delaunay::{triangulate, Triangulation, GHOST};
pub use poisson::{sample_poisson, sample_poisson_with, PointSet};
pub use tessellation::{
    check_padding_valid, padded_margin, padded_window, tessellations_built, Disk, Tessellation, LABEL_BOTTOM, LABEL_LEFT,
    LABEL_RIGHT, LABEL_TOP,
};

use serde::{Deserialize, Serialize};

pub type Pt = [f64; 2];

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GeometryError {
    #[error("window must satisfy x0 < x1 and y0 < y1")]
    BadWindow,
    #[error("no cells")]
    NoCells,
}

/// Axis-aligned closed rectangle `[x0,x1]×[y0,y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Window {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self, GeometryError> {
        if x0 < x1 && y0 < y1 {
            Ok(Window { x0, x1, y0, y1 })
        } else {
            Err(GeometryError::BadWindow)
        }
    }

    /// `c + [-h,h]^2`.
    pub fn square(c: Pt, h: f64) -> Self {
        Window { x0: c[0] - h, x1: c[0] + h, y0: c[1] - h, y1: c[1] + h }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: Pt) -> bool {
        p[0] >= self.x0 && p[0] <= self.x1 && p[1] >= self.y0 && p[1] <= self.y1
    }

    pub fn contains_window(&self, o: &Window) -> bool {
        o.x0 >= self.x0 && o.x1 <= self.x1 && o.y0 >= self.y0 && o.y1 <= self.y1
    }

    pub fn intersects(&self, o: &Window) -> bool {
        self.x0 <= o.x1 && o.x0 <= self.x1 && self.y0 <= o.y1 && o.y0 <= self.y1
    }

    pub fn expand(&self, m: f64) -> Self {
        Window { x0: self.x0 - m, x1: self.x1 + m, y0: self.y0 - m, y1: self.y1 + m }
    }

    pub fn center(&self) -> Pt {
        [(self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0]
    }

    pub fn corners(&self) -> [Pt; 4] {
        [[self.x0, self.y0], [self.x1, self.y0], [self.x1, self.y1], [self.x0, self.y1]]
    }

    /// Squared Euclidean distance from `p` to the rectangle (0 inside).
    pub fn dist2(&self, p: Pt) -> f64 {
        let dx = (self.x0 - p[0]).max(0.0).max(p[0] - self.x1);
        let dy = (self.y0 - p[1]).max(0.0).max(p[1] - self.y1);
        dx * dx + dy * dy
    }
}

#[inline]
pub fn dist2(a: Pt, b: Pt) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

#[inline]
pub fn orient(a: Pt, b: Pt, c: Pt) -> f64 {
    robust::orient2d(
        robust::Coord { x: a[0], y: a[1] },
        robust::Coord { x: b[0], y: b[1] },
        robust::Coord { x: c[0], y: c[1] },
    )
}

#[inline]
pub fn incircle(a: Pt, b: Pt, c: Pt, d: Pt) -> f64 {
    robust::incircle(
        robust::Coord { x: a[0], y: a[1] },
        robust::Coord { x: b[0], y: b[1] },
        robust::Coord { x: c[0], y: c[1] },
        robust::Coord { x: d[0], y: d[1] },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_rejects_empty() {
        assert_eq!(Window::new(1.0, 1.0, 0.0, 1.0), Err(GeometryError::BadWindow));
        assert!(Window::new(0.0, 2.0, 0.0, 3.0).is_ok());
        assert_eq!(Window::new(0.0, 2.0, 0.0, 3.0).unwrap().area(), 6.0);
    }

    #[test]
    fn window_distance() {
        let w = Window::new(0.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(w.dist2([0.5, 0.5]), 0.0);
        assert!((w.dist2([2.0, 2.0]) - 2.0).abs() < 1e-15);
    }
}

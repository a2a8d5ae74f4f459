use rand::Rng as _;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::{Pt, Window};
use crate::rng::{self, Rng};

/// A finite realization of a homogeneous Poisson process in `window`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub seed: u64,
    pub window: Window,
    pub points: Vec<Pt>,
}

impl PointSet {
    pub fn new(seed: u64, window: Window, points: Vec<Pt>) -> Self {
        PointSet { seed, window, points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sub-point-set of the points satisfying `keep`, with their original indices.
    pub fn filter(&self, window: Window, keep: impl Fn(Pt) -> bool) -> (PointSet, Vec<u32>) {
        let mut pts = Vec::new();
        let mut idx = Vec::new();
        for (i, &p) in self.points.iter().enumerate() {
            if keep(p) {
                pts.push(p);
                idx.push(i as u32);
            }
        }
        (PointSet { seed: self.seed, window, points: pts }, idx)
    }
}

/// Poisson process of the given intensity in `window`; deterministic in `seed`.
pub fn sample_poisson(window: Window, intensity: f64, seed: u64) -> PointSet {
    let mut rng = rng::stream(seed, rng::tag::POINTS, 0);
    let points = sample_poisson_with(&window, intensity, &mut rng);
    PointSet { seed, window, points }
}

/// Poisson points in `window` drawn from an existing generator.
pub fn sample_poisson_with(window: &Window, intensity: f64, rng: &mut Rng) -> Vec<Pt> {
    assert!(intensity > 0.0, "intensity must be positive");
    let mean = intensity * window.area();
    let n = if mean > 0.0 { Poisson::new(mean).expect("finite mean").sample(rng) as usize } else { 0 };
    let (w, h) = (window.width(), window.height());
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            [window.x0 + w * u, window.y0 + h * v]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let w = Window::new(0.0, 10.0, 0.0, 10.0).unwrap();
        assert_eq!(sample_poisson(w, 1.0, 5), sample_poisson(w, 1.0, 5));
        assert_ne!(sample_poisson(w, 1.0, 5), sample_poisson(w, 1.0, 6));
    }

    #[test]
    fn mean_count() {
        let w = Window::new(0.0, 10.0, 0.0, 10.0).unwrap();
        let n = 10_000;
        let tot: usize = (0..n).map(|s| sample_poisson(w, 1.0, s).len()).sum();
        let mean = tot as f64 / n as f64;
        assert!((mean - 100.0).abs() < 3.0 * (100.0f64 / n as f64).sqrt() * 3.0, "mean {mean}");
        assert!((mean - 100.0).abs() < 3.0);
    }

    #[test]
    fn tiny_window_mostly_empty() {
        let w = Window::new(0.0, 0.01, 0.0, 0.01).unwrap();
        let n = 20_000u64;
        let empty = (0..n).filter(|&s| sample_poisson(w, 1.0, s).is_empty()).count();
        let p = (-1e-4f64).exp();
        let sd = (p * (1.0 - p) / n as f64).sqrt();
        assert!(((empty as f64 / n as f64) - p).abs() <= 4.0 * sd + 1.0 / n as f64);
    }

    #[test]
    fn points_inside_window() {
        let w = Window::new(-3.0, 2.0, 1.0, 4.0).unwrap();
        let ps = sample_poisson(w, 3.0, 1);
        assert!(ps.points.iter().all(|&p| w.contains(p)));
    }
}

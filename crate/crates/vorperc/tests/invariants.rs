//! Property tests over random configurations, tables and point sets.

use std::sync::Arc;

use proptest::prelude::*;

use vorperc::dynamics::metric::metric_of_points;
use vorperc::events::{
    pivotal_point, random_colors, AnnulusSpec, ArmSpec, ColoredConfiguration, Direction, EventSpec, HatVariant, Sector,
    WHITE,
};
use vorperc::geometry::{incircle, orient, padded_window, sample_poisson, PointSet, Tessellation, Window};
use vorperc::rng;
use vorperc::spectral::{fourier_transform, BooleanFunctionTable};

fn colored(roi: &Window, seed: u64) -> ColoredConfiguration {
    let tess = Arc::new(Tessellation::build(sample_poisson(padded_window(roi, 1.0, 1e-9), 1.0, seed)));
    ColoredConfiguration::sample(tess, 0.5, &mut rng::stream(seed, rng::tag::COLORS, 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn delaunay_is_empty_circle(seed in any::<u64>(), side in 3.0f64..20.0) {
        let w = Window::new(0.0, side, 0.0, side).unwrap();
        let tess = Tessellation::build(sample_poisson(w, 1.0, seed));
        let pts = &tess.points.points;
        for t in &tess.triangles {
            let (a, b, c) = (pts[t[0] as usize], pts[t[1] as usize], pts[t[2] as usize]);
            prop_assert!(orient(a, b, c) > 0.0);
            for (i, &d) in pts.iter().enumerate() {
                if !t.contains(&(i as u32)) {
                    prop_assert!(incircle(a, b, c, d) <= 0.0);
                }
            }
        }
    }

    #[test]
    fn cells_tile_and_adjacency_is_symmetric(seed in any::<u64>(), side in 2.0f64..15.0) {
        let w = Window::new(-1.0, side, 0.5, side + 2.0).unwrap();
        let ps = sample_poisson(w, 1.0, seed);
        let tess = Tessellation::build(ps.clone());
        let area: f64 = (0..tess.len()).map(|i| tess.cell_area(i)).sum();
        if tess.len() > 0 {
            prop_assert!((area - w.area()).abs() <= 1e-9 * w.area());
        }
        for i in 0..tess.len() {
            for &j in tess.neighbors(i) {
                prop_assert!(j as usize != i);
                prop_assert!(tess.neighbors(j as usize).contains(&(i as u32)));
            }
        }
        let again = Tessellation::build(ps);
        prop_assert_eq!(&again.triangles, &tess.triangles);
    }

    #[test]
    fn duality_and_involution(seed in any::<u64>(), n in 1.0f64..10.0) {
        let rect = Window::new(0.0, n, 0.0, n).unwrap();
        let mut cfg = colored(&rect, seed);
        let lr = EventSpec::crossing(rect).compile(&cfg.tess).unwrap();
        let tb = EventSpec::Crossing { rect, dir: Direction::TopBottom, color: WHITE }.compile(&cfg.tess).unwrap();
        prop_assert!(lr.eval(&cfg.colors) ^ tb.eval(&cfg.colors));
        let before = cfg.colors.clone();
        for x in lr.cells().into_iter().take(5) {
            pivotal_point(&lr, &mut cfg.colors, x);
            prop_assert_eq!(&cfg.colors, &before);
        }
    }

    #[test]
    fn arm_nesting_counts_and_hats(seed in any::<u64>(), r in 1.0f64..2.0, gap in 1.0f64..3.0) {
        let big_r = r + gap;
        let cfg = colored(&Window::square([0.0, 0.0], big_r), seed);
        let ev = |r: f64, big: f64, arms: ArmSpec| {
            EventSpec::Arm { ann: AnnulusSpec::new(r, big), arms }.compile(&cfg.tess).unwrap().eval(&cfg.colors)
        };
        let mid = 0.5 * (r + big_r);
        for sector in [Sector::FullPlane, Sector::HalfPlane, Sector::QuarterPlane] {
            for j in 1..=4usize {
                let a = ev(r, big_r, ArmSpec::new(j, sector));
                if a {
                    prop_assert!(ev(r, mid, ArmSpec::new(j, sector)));
                    prop_assert!(ev(mid, big_r, ArmSpec::new(j, sector)));
                    if j > 1 {
                        prop_assert!(ev(r, big_r, ArmSpec::new(j - 1, sector)));
                    }
                }
            }
        }
        for j in [1usize, 2, 4] {
            let plain = ev(r, big_r, ArmSpec::new(j, Sector::FullPlane));
            let hat = EventSpec::hat(r, big_r, j, HatVariant::Hat).compile(&cfg.tess).unwrap().eval(&cfg.colors);
            prop_assert!(!plain || hat);
        }
    }

    #[test]
    fn spectra_are_exact(bits in proptest::collection::vec(any::<bool>(), 1usize << 9)) {
        let t = BooleanFunctionTable::from_fn(9, |x| bits[x]);
        let s = fourier_transform(&t);
        prop_assert!((s.energy() - t.mean()).abs() < 1e-12);
        prop_assert!((s.coef.iter().map(|c| c * c).sum::<f64>() - t.mean()).abs() < 1e-12);
        for (a, &v) in s.inverse().iter().zip(&t.values) {
            prop_assert!((a - v as f64).abs() < 1e-12);
        }
        for (a, b) in s.marginals().iter().zip(t.pivotal_probabilities()) {
            prop_assert!((a - b / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn metric_axioms(seed in any::<u64>(), n in 0usize..25, delta in 0.0f64..0.5) {
        let mut r = rng::stream(seed, rng::tag::MISC, 0);
        let pts = sample_poisson(Window::square([0.0, 0.0], 4.0), n as f64 / 64.0 + 0.01, seed).points;
        let cols = random_colors(pts.len(), 0.5, &mut r);
        let a: Vec<_> = pts.iter().copied().zip(cols.iter().copied()).collect();
        let other = sample_poisson(Window::square([0.0, 0.0], 4.0), 0.3, seed ^ 1).points;
        let oc = random_colors(other.len(), 0.5, &mut r);
        let b: Vec<_> = other.into_iter().zip(oc).collect();
        prop_assert_eq!(metric_of_points(&a, &a, 8.0, 16).d, 0.0);
        let ab = metric_of_points(&a, &b, 8.0, 16).d;
        prop_assert!((ab - metric_of_points(&b, &a, 8.0, 16).d).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab));
        if !a.is_empty() {
            let mut moved = a.clone();
            moved[0].0[1] += delta;
            let v = metric_of_points(&a, &moved, 8.0, 16);
            prop_assert!(v.d <= 2.0 * delta + v.err);
        }
    }
}

#[test]
fn point_set_round_trips() {
    let ps = PointSet::new(3, Window::square([0.0, 0.0], 1.0), vec![[0.1, 0.2]]);
    let back: PointSet = serde_json::from_str(&serde_json::to_string(&ps).unwrap()).unwrap();
    assert_eq!(back, ps);
}

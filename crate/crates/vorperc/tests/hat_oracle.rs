//! The hat surrogate against completions of the annulus configuration by dense outside points.

use rand::Rng as _;

use vorperc::events::{annulus_points, AnnulusSpec, ArmSpec, EventSpec, HatVariant, Sector};
use vorperc::geometry::{padded_window, sample_poisson, PointSet, Tessellation, Window};
use vorperc::rng;

const OUTSIDE_POINTS: usize = 1000;
const COMPLETIONS: usize = 200;

fn sector_color(p: [f64; 2], phase: f64, k: usize) -> i8 {
    let a = (p[1].atan2(p[0]) - phase).rem_euclid(std::f64::consts::TAU);
    let s = (a / std::f64::consts::TAU * k as f64) as usize;
    if s % 2 == 0 {
        1
    } else {
        -1
    }
}

#[test]
fn completions_never_beat_the_surrogate() {
    let ann = AnnulusSpec::new(2.0, 6.0);
    let outer = ann.outer_box();
    let frame = outer.expand(2.0);
    let hole = Window::square([0.0, 0.0], 2.0);
    let hole_share = hole.area() / (hole.area() + frame.area() - outer.area());
    let js = [1usize, 2, 4];
    let mut surrogate_only = [0usize; 3];
    let mut surrogate_true = [0usize; 3];
    let mut oracle_true = [0usize; 3];
    for inst in 0..200u64 {
        let ps = sample_poisson(padded_window(&outer, 1.0, 1e-9), 1.0, inst);
        let tess = Tessellation::build(ps.clone());
        let mut crng = rng::stream(inst, rng::tag::COLORS, 0);
        let colors = vorperc::events::random_colors(tess.len(), 0.5, &mut crng);
        let inside = annulus_points(&ps, &ann);
        let sur: Vec<bool> = js
            .iter()
            .map(|&j| {
                let spec = EventSpec::Hat { ann, arms: ArmSpec::new(j, Sector::FullPlane), variant: HatVariant::Hat };
                spec.compile(&tess).unwrap().eval(&colors)
            })
            .collect();
        let mut found = [false; 3];
        let mut orng = rng::stream(inst, rng::tag::COMPLETION, 0);
        for c in 0..COMPLETIONS {
            if found.iter().all(|f| *f) {
                break;
            }
            let mut pts: Vec<[f64; 2]> = inside.iter().map(|&i| ps.points[i]).collect();
            let mut cols: Vec<i8> = inside.iter().map(|&i| colors[i]).collect();
            let (phase, k) = (orng.random::<f64>() * std::f64::consts::TAU, 2 * orng.random_range(1..=3));
            while pts.len() < inside.len() + OUTSIDE_POINTS {
                let p = if orng.random::<f64>() < hole_share {
                    [orng.random_range(-2.0..2.0), orng.random_range(-2.0..2.0)]
                } else {
                    let p = [orng.random_range(frame.x0..frame.x1), orng.random_range(frame.y0..frame.y1)];
                    if outer.contains(p) {
                        continue;
                    }
                    p
                };
                if hole.contains(p) && p[0].abs().max(p[1].abs()) >= 2.0 {
                    continue;
                }
                pts.push(p);
                cols.push(if c % 2 == 0 { if orng.random::<bool>() { 1 } else { -1 } } else { sector_color(p, phase, k) });
            }
            let t = Tessellation::build(PointSet::new(inst, frame, pts));
            for (n, &j) in js.iter().enumerate() {
                if found[n] {
                    continue;
                }
                let spec = EventSpec::Arm { ann, arms: ArmSpec::new(j, Sector::FullPlane) };
                let Ok(ev) = spec.compile(&t) else { continue };
                found[n] = ev.eval(&cols);
            }
        }
        for n in 0..3 {
            assert!(!found[n] || sur[n], "instance {inst}, j={}: completion realizes the event", js[n]);
            surrogate_true[n] += sur[n] as usize;
            oracle_true[n] += found[n] as usize;
            surrogate_only[n] += (sur[n] && !found[n]) as usize;
        }
    }
    for n in 0..3 {
        println!(
            "j={}: surrogate {} oracle {} discrepancy rate {:.3}",
            js[n],
            surrogate_true[n],
            oracle_true[n],
            surrogate_only[n] as f64 / 200.0
        );
    }
}

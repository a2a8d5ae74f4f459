//! Arm events against brute-force search over disjoint minimal crossings.

use std::sync::Arc;

use vorperc::events::region::{RegionGraph, INNER, OUTER};
use vorperc::events::{AnnulusSpec, ArmSpec, ColoredConfiguration, EventSpec, Sector};
use vorperc::geometry::{padded_window, sample_poisson, Tessellation};
use vorperc::rng;

const PATH_CAP: usize = 20_000;
const STEP_CAP: usize = 2_000_000;

struct Path {
    pos: f64,
    color: i8,
    nodes: Vec<u64>,
}

/// All simple same-color paths that meet the inner boundary only at their
/// first node and the outer boundary only at their last; `None` past the cap.
fn minimal_paths(g: &RegionGraph, colors: &[i8]) -> Option<Vec<Path>> {
    let n = g.node_count();
    let words = n.div_ceil(64);
    let mut first_pos = vec![f64::NAN; n];
    for c in g.contacts(INNER) {
        if first_pos[c.node as usize].is_nan() {
            first_pos[c.node as usize] = 0.5 * (c.s0 + c.s1);
        }
    }
    let mut out = Vec::new();
    let mut steps = 0;
    for s in 0..n {
        if !g.touches(s, INNER) {
            continue;
        }
        let col = colors[g.cell(s)];
        let mut stack = vec![s];
        let mut on = vec![0u64; words];
        on[s / 64] |= 1 << (s % 64);
        // Iterative DFS keeping, per depth, the index of the next neighbor to try.
        let mut next = vec![0usize];
        if g.touches(s, OUTER) {
            out.push(Path { pos: first_pos[s], color: col, nodes: on.clone() });
            continue;
        }
        while let Some(&k) = stack.last() {
            let d = stack.len() - 1;
            let nb = g.neighbors(k);
            if next[d] >= nb.len() {
                on[k / 64] &= !(1 << (k % 64));
                stack.pop();
                next.pop();
                continue;
            }
            let m = nb[next[d]] as usize;
            next[d] += 1;
            steps += 1;
            if steps > STEP_CAP {
                return None;
            }
            if on[m / 64] >> (m % 64) & 1 == 1 || colors[g.cell(m)] != col || g.touches(m, INNER) {
                continue;
            }
            if g.touches(m, OUTER) {
                let mut nodes = on.clone();
                nodes[m / 64] |= 1 << (m % 64);
                out.push(Path { pos: first_pos[s], color: col, nodes });
                if out.len() > PATH_CAP {
                    return None;
                }
                continue;
            }
            on[m / 64] |= 1 << (m % 64);
            stack.push(m);
            next.push(0);
        }
    }
    // A path whose node set contains another's with the same start is never needed.
    out.sort_by(|a, b| {
        a.pos.total_cmp(&b.pos).then(count(&a.nodes).cmp(&count(&b.nodes))).then(a.nodes.cmp(&b.nodes))
    });
    out.dedup_by(|a, b| a.pos == b.pos && a.nodes == b.nodes);
    let mut kept: Vec<Path> = Vec::new();
    let mut group = 0;
    for p in out {
        if kept.last().is_some_and(|l| l.pos != p.pos) {
            group = kept.len();
        }
        if !kept[group..].iter().any(|q| subset(&q.nodes, &p.nodes)) {
            kept.push(p);
        }
    }
    Some(kept)
}

fn count(a: &[u64]) -> u32 {
    a.iter().map(|w| w.count_ones()).sum()
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn disjoint(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & y == 0)
}

/// Pairwise disjoint paths, in increasing position, whose colors spell `want`.
fn search(paths: &[Path], want: &[i8], from: usize, chosen: &mut Vec<usize>) -> bool {
    let k = chosen.len();
    if k == want.len() {
        return true;
    }
    for i in from..paths.len() {
        if paths[i].color != want[k] {
            continue;
        }
        if chosen.iter().all(|&c| disjoint(&paths[c].nodes, &paths[i].nodes)) {
            chosen.push(i);
            if search(paths, want, i + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

fn oracle(paths: &[Path], pattern: &[i8], cyclic: bool) -> bool {
    let j = pattern.len();
    let mut candidates: Vec<Vec<i8>> = Vec::new();
    for dir in [false, true] {
        let p: Vec<i8> = if dir { pattern.iter().rev().copied().collect() } else { pattern.to_vec() };
        let rots = if cyclic { j } else { 1 };
        for s in 0..rots {
            candidates.push((0..j).map(|k| p[(s + k) % j]).collect());
        }
    }
    candidates.sort();
    candidates.dedup();
    candidates.iter().any(|w| search(paths, w, 0, &mut Vec::new()))
}

#[test]
fn arm_events_match_exhaustive_search() {
    let cases: &[(Sector, &[usize])] =
        &[(Sector::FullPlane, &[1, 2, 3, 4, 5]), (Sector::HalfPlane, &[1, 2, 3]), (Sector::QuarterPlane, &[1, 2])];
    let samples: u64 = std::env::var("ORACLE_N").ok().and_then(|s| s.parse().ok()).unwrap_or(1000);
    let mut skipped = 0;
    let mut positives = vec![0usize; 6];
    for seed in 0..samples {
        let big_r = if seed % 2 == 0 { 3.0 } else { 4.0 };
        let ann = AnnulusSpec::new(1.0, big_r);
        let ps = sample_poisson(padded_window(&ann.outer_box(), 1.0, 1e-9), 1.0, seed);
        let tess = Arc::new(Tessellation::build(ps));
        let mut crng = rng::stream(seed, rng::tag::COLORS, 0);
        let cfg = ColoredConfiguration::sample(tess.clone(), 0.5, &mut crng);
        for &(sector, js) in cases {
            let g = RegionGraph::build(&tess, ann.region(sector)).unwrap();
            let Some(paths) = minimal_paths(&g, &cfg.colors) else {
                skipped += 1;
                continue;
            };
            if std::env::var("ORACLE_DEBUG").is_ok() {
                println!("seed {seed} {sector:?} nodes {} paths {}", g.node_count(), paths.len());
            }
            for &j in js {
                let arms = ArmSpec::new(j, sector);
                let fast = EventSpec::Arm { ann, arms: arms.clone() }.compile(&tess).unwrap().eval(&cfg.colors);
                let slow = oracle(&paths, &arms.pattern, arms.cyclic());
                assert_eq!(fast, slow, "seed={seed} R={big_r} {sector:?} j={j}");
                positives[j] += fast as usize;
            }
        }
    }
    println!("skipped {skipped} of {} graph instances; positives by j {:?}", samples * 3, &positives[1..]);
    assert!(skipped * 100 <= samples as usize * 3);
    assert!(positives[4] > 0 && positives[5] > 0);
}

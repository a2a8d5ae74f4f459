//! Arm events by boundary walks over through-clusters.

use super::region::{RegionGraph, INNER, OUTER};

/// Cluster labels of the nodes reachable from inner contacts, and which of
/// those clusters reach the outer boundary.
struct Clusters {
    label: Vec<u32>,
    through: Vec<bool>,
    color: Vec<i8>,
}

const NONE: u32 = u32::MAX;

fn clusters(g: &RegionGraph, colors: &[i8]) -> Clusters {
    let n = g.node_count();
    let mut label = vec![NONE; n];
    let mut through = Vec::new();
    let mut color = Vec::new();
    let mut stack = Vec::new();
    for c in g.contacts(INNER) {
        let s = c.node as usize;
        if label[s] != NONE {
            continue;
        }
        let id = through.len() as u32;
        let col = colors[g.cell(s)];
        let mut hits = false;
        label[s] = id;
        stack.push(s);
        while let Some(k) = stack.pop() {
            hits |= g.touches(k, OUTER);
            for &m in g.neighbors(k) {
                let m = m as usize;
                if label[m] == NONE && colors[g.cell(m)] == col {
                    label[m] = id;
                    stack.push(m);
                }
            }
        }
        through.push(hits);
        color.push(col);
    }
    Clusters { label, through, color }
}

/// Through-clusters in the order their inner contacts are met, each once.
fn boundary_sequence(g: &RegionGraph, cl: &Clusters, cyclic: bool) -> Vec<u32> {
    let mut seq: Vec<u32> = Vec::new();
    for c in g.contacts(INNER) {
        let id = cl.label[c.node as usize];
        if cl.through[id as usize] && seq.last() != Some(&id) {
            seq.push(id);
        }
    }
    if cyclic {
        while seq.len() > 1 && seq.first() == seq.last() {
            seq.pop();
        }
    }
    // By planarity each through-cluster meets the inner boundary in one block;
    // keep first occurrences should roundoff ever suggest otherwise.
    let mut seen = std::collections::HashSet::new();
    seq.retain(|id| seen.insert(*id));
    seq
}

/// Whether the cyclic (or linear) word `word` contains `pattern` as a cyclic
/// (or linear) subsequence, read in either direction.
pub(crate) fn contains_pattern(word: &[i8], pattern: &[i8], cyclic: bool) -> bool {
    let j = pattern.len();
    if j == 0 {
        return true;
    }
    if word.len() < j {
        return false;
    }
    let rev: Vec<i8> = pattern.iter().rev().copied().collect();
    for p in [pattern, &rev[..]] {
        if cyclic {
            for s in 0..word.len() {
                let mut k = 0;
                for t in 0..word.len() {
                    if word[(s + t) % word.len()] == p[k] {
                        k += 1;
                        if k == j {
                            return true;
                        }
                    }
                }
            }
        } else {
            let mut k = 0;
            for &c in word {
                if c == p[k] {
                    k += 1;
                    if k == j {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn needs_multiplicity(pattern: &[i8], cyclic: bool) -> bool {
    let j = pattern.len();
    (0..j).any(|k| (k + 1 < j || (cyclic && j > 1)) && pattern[k] == pattern[(k + 1) % j])
}

/// Whether `pattern` is realized by disjoint monochromatic inner-to-outer paths.
pub fn realizes(g: &RegionGraph, colors: &[i8], pattern: &[i8], cyclic: bool) -> bool {
    if pattern.len() == 1 {
        return g.connects(colors, pattern[0], INNER, OUTER);
    }
    let cl = clusters(g, colors);
    let seq = boundary_sequence(g, &cl, cyclic);
    if !needs_multiplicity(pattern, cyclic) {
        let word: Vec<i8> = seq.iter().map(|&id| cl.color[id as usize]).collect();
        return contains_pattern(&word, pattern, cyclic);
    }
    let blacks = pattern.iter().filter(|&&c| c == 1).count();
    let whites = pattern.len() - blacks;
    let mut word = Vec::new();
    for &id in &seq {
        let c = cl.color[id as usize];
        let cap = if c == 1 { blacks } else { whites };
        let m = if cap <= 1 { cap } else { disjoint_crossings(g, &cl.label, id, cap) };
        word.extend(std::iter::repeat_n(c, m));
    }
    contains_pattern(&word, pattern, cyclic)
}

/// Node-disjoint inner-to-outer paths inside cluster `id`, capped, by
/// augmenting paths on the split-node network.
fn disjoint_crossings(g: &RegionGraph, label: &[u32], id: u32, cap: usize) -> usize {
    let members: Vec<usize> = (0..g.node_count()).filter(|&k| label[k] == id).collect();
    let mut local = vec![u32::MAX; g.node_count()];
    for (i, &k) in members.iter().enumerate() {
        local[k] = i as u32;
    }
    let m = members.len();
    // Vertices: 2i (in), 2i+1 (out), s = 2m, t = 2m+1.
    let s = 2 * m;
    let t = 2 * m + 1;
    let mut net = Flow::new(2 * m + 2);
    for (i, &k) in members.iter().enumerate() {
        net.add(2 * i, 2 * i + 1);
        if g.touches(k, INNER) {
            net.add(s, 2 * i);
        }
        if g.touches(k, OUTER) {
            net.add(2 * i + 1, t);
        }
        for &nb in g.neighbors(k) {
            let j = local[nb as usize];
            if j != u32::MAX {
                net.add(2 * i + 1, 2 * j as usize);
            }
        }
    }
    net.max_flow(s, t, cap)
}

/// Unit-capacity residual network.
struct Flow {
    head: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<u8>,
    nxt: Vec<usize>,
}

impl Flow {
    fn new(n: usize) -> Self {
        Flow { head: vec![usize::MAX; n], to: Vec::new(), cap: Vec::new(), nxt: Vec::new() }
    }

    fn add(&mut self, a: usize, b: usize) {
        for (u, v, c) in [(a, b, 1), (b, a, 0)] {
            self.to.push(v);
            self.cap.push(c);
            self.nxt.push(self.head[u]);
            self.head[u] = self.to.len() - 1;
        }
    }

    fn max_flow(&mut self, s: usize, t: usize, limit: usize) -> usize {
        let n = self.head.len();
        let mut flow = 0;
        let mut via = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        while flow < limit {
            via.fill(usize::MAX);
            queue.clear();
            queue.push_back(s);
            via[s] = usize::MAX - 1;
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                let mut e = self.head[u];
                while e != usize::MAX {
                    let v = self.to[e];
                    if self.cap[e] > 0 && via[v] == usize::MAX {
                        via[v] = e;
                        queue.push_back(v);
                    }
                    e = self.nxt[e];
                }
            }
            if via[t] == usize::MAX {
                break;
            }
            let mut v = t;
            while v != s {
                let e = via[v];
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                v = self.to[e ^ 1];
            }
            flow += 1;
        }
        flow
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_patterns() {
        let (b, w) = (1i8, -1i8);
        assert!(contains_pattern(&[b, w, b, w], &[b, w, b, w], true));
        assert!(contains_pattern(&[w, b, w, b], &[b, w, b, w], true));
        assert!(!contains_pattern(&[b, w, b], &[b, w, b, w], true));
        assert!(contains_pattern(&[b, b, w, b, w], &[b, w, b, w, b], true));
        assert!(contains_pattern(&[w, b, b, w, b], &[b, w, b, w, b], true));
        assert!(!contains_pattern(&[b, w, b, w], &[b, w, b, w, b], true));
        assert!(contains_pattern(&[b, w, b], &[b, w, b], false));
        assert!(!contains_pattern(&[w, b, w], &[b, w, b], false));
        assert!(contains_pattern(&[w, b], &[b, w], false));
    }

    #[test]
    fn multiplicity_needed() {
        assert!(needs_multiplicity(&[1, -1, 1, -1, 1], true));
        assert!(!needs_multiplicity(&[1, -1, 1, -1], true));
        assert!(!needs_multiplicity(&[1, -1, 1], false));
        assert!(needs_multiplicity(&[1, -1, 1], true));
        assert!(needs_multiplicity(&[1, 1], false));
    }
}

//! Exact Walsh–Fourier analysis of events on small quenched point sets.
//!
//! Bit order: bit `i` of a coloring index is the color of `points[i]`
//! (ascending point ids), `1 ↔ +1`. Subsets `S` use the same bit encoding.
//! Coefficients are `ĥ(S) = E[h χ_S]` with `χ_S(ω) = ∏_{i∈S} ω_i` under the
//! uniform measure, so `h = Σ_S ĥ(S) χ_S`.

use std::io::Write;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::events::{Color, Compiled, EventError, EventSpec, BLACK, WHITE};
use crate::geometry::{padded_window, sample_poisson, Tessellation, Window};
use crate::rng::{self, Rng};

pub const TABLE_CAP: usize = 24;
pub const IDENTITY_CAP: usize = 12;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SpectralError {
    #[error("support too large: no configuration with at most {cap} relevant points in {tries} tries")]
    SupportTooLarge { cap: usize, tries: usize },
    #[error("null spectrum")]
    NullSpectrum,
    #[error("acceptance too low: {accepted} of {attempts}")]
    LowAcceptance { accepted: usize, attempts: usize },
    #[error("table too large for exhaustive check: m = {0}")]
    TooLarge(usize),
    #[error(transparent)]
    Event(#[from] EventError),
}

/// Truth table of a `{0,1}` event over all colorings of `points`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanFunctionTable {
    pub points: Vec<usize>,
    pub values: Vec<u8>,
}

impl BooleanFunctionTable {
    pub fn m(&self) -> usize {
        self.points.len()
    }

    /// Evaluates `ev` on every coloring of `points` (ascending), others fixed as in `base`.
    pub fn tabulate(ev: &Compiled, base: &[Color], points: &[usize]) -> Result<Self, SpectralError> {
        let m = points.len();
        if m > TABLE_CAP {
            return Err(SpectralError::TooLarge(m));
        }
        let mut colors = base.to_vec();
        let mut values = vec![0u8; 1 << m];
        for x in 0..1usize << m {
            for (i, &p) in points.iter().enumerate() {
                colors[p] = if x >> i & 1 == 1 { BLACK } else { WHITE };
            }
            values[x] = ev.eval(&colors) as u8;
        }
        Ok(BooleanFunctionTable { points: points.to_vec(), values })
    }

    pub fn from_fn(m: usize, f: impl Fn(usize) -> bool) -> Self {
        BooleanFunctionTable { points: (0..m).collect(), values: (0..1usize << m).map(|x| f(x) as u8).collect() }
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().map(|&v| v as f64).sum::<f64>() / self.values.len() as f64
    }

    /// Points whose flip never changes the value.
    pub fn insensitive(&self) -> Vec<usize> {
        (0..self.m())
            .filter(|&i| (0..self.values.len()).all(|x| self.values[x] == self.values[x ^ (1 << i)]))
            .collect()
    }

    /// `P[Piv_x]` for each position `x`, under uniform colors.
    pub fn pivotal_probabilities(&self) -> Vec<f64> {
        let n = self.values.len() as f64;
        (0..self.m())
            .map(|i| {
                (0..self.values.len()).filter(|&x| self.values[x] != self.values[x ^ (1 << i)]).count() as f64 / n
            })
            .collect()
    }

    /// `P[Piv_G]`, `G` a bitmask: the value is not constant on the fiber of colorings agreeing off `G`.
    pub fn box_pivotal_probability(&self, g: usize) -> f64 {
        let m = self.m();
        let full = (1usize << m) - 1;
        let rest = full & !g;
        let mut piv = 0usize;
        // Enumerate fibers by their off-G part.
        let mut o = 0usize;
        loop {
            let mut seen = [false; 2];
            let mut s = 0usize;
            loop {
                seen[self.values[o | s] as usize] = true;
                if s == g {
                    break;
                }
                s = (s.wrapping_sub(g)) & g;
            }
            if seen[0] && seen[1] {
                piv += 1 << g.count_ones();
            }
            if o == rest {
                break;
            }
            o = (o.wrapping_sub(rest)) & rest;
        }
        piv as f64 / (1usize << m) as f64
    }
}

/// In-place unnormalized Walsh–Hadamard butterfly, `a[S] ← Σ_x (−1)^{|x∧S|} a[x]`.
pub fn fwht(a: &mut [f64]) {
    let n = a.len();
    assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for blk in (0..n).step_by(2 * h) {
            for k in blk..blk + h {
                let (u, v) = (a[k], a[k + h]);
                a[k] = u + v;
                a[k + h] = u - v;
            }
        }
        h *= 2;
    }
}

/// All Fourier coefficients of a table.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumTable {
    pub points: Vec<usize>,
    pub coef: Vec<f64>,
}

impl SpectrumTable {
    pub fn m(&self) -> usize {
        self.points.len()
    }

    /// `Σ_S ĥ(S)²`, which equals `E[h²] = E[h]`.
    pub fn energy(&self) -> f64 {
        self.coef.iter().map(|c| c * c).sum()
    }

    /// Table values reconstructed from the coefficients.
    pub fn inverse(&self) -> Vec<f64> {
        let mut a: Vec<f64> =
            self.coef.iter().enumerate().map(|(s, &c)| if s.count_ones() % 2 == 1 { -c } else { c }).collect();
        fwht(&mut a);
        a
    }

    /// `Σ_{|S|=k} ĥ(S)²` for `k = 0..=m`.
    pub fn level_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.m() + 1];
        for (s, c) in self.coef.iter().enumerate() {
            w[s.count_ones() as usize] += c * c;
        }
        w
    }

    /// `Σ_{S∋x} ĥ(S)²` for each position `x`.
    pub fn marginals(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.m()];
        for (s, c) in self.coef.iter().enumerate() {
            let mut b = s;
            while b != 0 {
                w[b.trailing_zeros() as usize] += c * c;
                b &= b - 1;
            }
        }
        w
    }

    /// `Σ_S ĥ(S)² e^{−t|S|}`; `t = ∞` gives `ĥ(∅)²`.
    pub fn noise_correlation(&self, t: f64) -> f64 {
        let w = self.level_weights();
        let r = (-t).exp();
        w.iter().enumerate().map(|(k, &wk)| wk * r.powi(k as i32)).sum()
    }

    /// Writes a JSON header line followed by the coefficients as little-endian `f64`.
    pub fn dump(&self, out: &mut impl Write, event_id: &str) -> std::io::Result<()> {
        #[derive(Serialize)]
        struct Header<'a> {
            m: usize,
            point_ids: &'a [usize],
            event_id: &'a str,
            encoding: &'static str,
        }
        let h = Header { m: self.m(), point_ids: &self.points, event_id, encoding: "f64-le" };
        serde_json::to_writer(&mut *out, &h)?;
        out.write_all(b"\n")?;
        for c in &self.coef {
            out.write_all(&c.to_le_bytes())?;
        }
        Ok(())
    }
}

pub fn fourier_transform(t: &BooleanFunctionTable) -> SpectrumTable {
    let mut a: Vec<f64> = t.values.iter().map(|&v| v as f64).collect();
    fwht(&mut a);
    let scale = 1.0 / a.len() as f64;
    for (s, c) in a.iter_mut().enumerate() {
        *c *= if s.count_ones() % 2 == 1 { -scale } else { scale };
    }
    SpectrumTable { points: t.points.clone(), coef: a }
}

/// The `O(4^m)` definition `ĥ(S) = 2^{−m} Σ_x h(x) χ_S(x)`.
pub fn naive_transform(t: &BooleanFunctionTable) -> Vec<f64> {
    let n = t.values.len();
    (0..n)
        .map(|s| {
            let mut acc = 0.0;
            for x in 0..n {
                if t.values[x] == 1 {
                    let minus = (s & !x).count_ones();
                    acc += if minus % 2 == 1 { -1.0 } else { 1.0 };
                }
            }
            acc / n as f64
        })
        .collect()
}

/// Sampler of the quenched spectral law `ĥ(S)² / Σ ĥ²`.
pub struct QuenchedSampler {
    cdf: Vec<f64>,
}

impl QuenchedSampler {
    pub fn new(spec: &SpectrumTable) -> Result<Self, SpectralError> {
        let mut acc = 0.0;
        let cdf: Vec<f64> = spec
            .coef
            .iter()
            .map(|c| {
                acc += c * c;
                acc
            })
            .collect();
        if acc <= 0.0 {
            return Err(SpectralError::NullSpectrum);
        }
        Ok(QuenchedSampler { cdf })
    }

    /// A subset as a bitmask over table positions.
    pub fn draw(&self, rng: &mut Rng) -> usize {
        let u = rng.random::<f64>() * self.cdf[self.cdf.len() - 1];
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

/// One spectral-sample draw, with the point ids of `S`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSampleDraw {
    pub subset: Vec<usize>,
    pub mask: u64,
    pub m: usize,
    /// `E^η[h²]` of the point set the draw came from.
    pub normalization: f64,
    pub attempts: usize,
}

pub fn draw_quenched_sample(spec: &SpectrumTable, seed: u64) -> Result<SpectralSampleDraw, SpectralError> {
    let s = QuenchedSampler::new(spec)?;
    let mut rng = rng::stream(seed, rng::tag::SPECTRAL, 0);
    let mask = s.draw(&mut rng);
    Ok(SpectralSampleDraw {
        subset: (0..spec.m()).filter(|i| mask >> i & 1 == 1).map(|i| spec.points[i]).collect(),
        mask: mask as u64,
        m: spec.m(),
        normalization: spec.energy(),
        attempts: 1,
    })
}

/// A tabulated event on a freshly sampled point set.
pub struct Tabulated {
    pub tess: Tessellation,
    pub table: BooleanFunctionTable,
    pub rejections: usize,
}

/// Samples point sets (attempt `k` from stream `k`) until the event is
/// certified and sees at most `cap` points, then tabulates it.
pub fn tabulate_event(
    spec: &EventSpec,
    seed: u64,
    cap: usize,
    max_tries: usize,
) -> Result<Tabulated, SpectralError> {
    let support = spec.support().ok_or(EventError::Invalid("event needs a support window"))?;
    let window = padded_window(&support, 1.0, 1e-9);
    for attempt in 0..max_tries {
        let ps = sample_poisson(window, 1.0, rng::derive_seed(seed, &[attempt as u64]));
        let tess = Tessellation::build_for(ps, &support);
        let ev = match spec.compile(&tess) {
            Ok(ev) => ev,
            Err(EventError::Uncertified) => continue,
            Err(e) => return Err(e.into()),
        };
        let cells = ev.cells();
        if cells.len() > cap {
            continue;
        }
        let base = vec![WHITE; tess.len()];
        let table = BooleanFunctionTable::tabulate(&ev, &base, &cells)?;
        return Ok(Tabulated { tess, table, rejections: attempt });
    }
    Err(SpectralError::SupportTooLarge { cap, tries: max_tries })
}

/// Annealed spectral sample by rejection: a fresh `η` is accepted with
/// probability `E^η[h²]`, then `S` is drawn from its quenched law.
pub fn draw_annealed_sample(
    spec: &EventSpec,
    seed: u64,
    cap: usize,
    max_attempts: usize,
) -> Result<(SpectralSampleDraw, Tabulated), SpectralError> {
    let mut rng = rng::stream(seed, rng::tag::SPECTRAL, 1);
    for attempt in 0..max_attempts {
        let tab = tabulate_event(spec, rng::derive_seed(seed, &[0xa7, attempt as u64]), cap, 64)?;
        let st = fourier_transform(&tab.table);
        let e = st.energy();
        if rng.random::<f64>() < e {
            let mask = QuenchedSampler::new(&st)?.draw(&mut rng);
            let draw = SpectralSampleDraw {
                subset: (0..st.m()).filter(|i| mask >> i & 1 == 1).map(|i| st.points[i]).collect(),
                mask: mask as u64,
                m: st.m(),
                normalization: e,
                attempts: attempt + 1,
            };
            return Ok((draw, tab));
        }
    }
    Err(SpectralError::LowAcceptance { accepted: 0, attempts: max_attempts })
}

/// Exact comparison of `Σ_S ĥ(S)² e^{−t|S|}` with the dynamics expectation
/// `E[h(ω(0)) h(ω(t))]`, where each bit is independently kept with
/// probability `(1 + e^{−t})/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovIdentityRow {
    pub t: f64,
    pub spectral: f64,
    pub dynamics: f64,
}

pub fn check_cov_identity(table: &BooleanFunctionTable, ts: &[f64]) -> Result<Vec<CovIdentityRow>, SpectralError> {
    let m = table.m();
    if m > IDENTITY_CAP {
        return Err(SpectralError::TooLarge(m));
    }
    let st = fourier_transform(table);
    let n = table.values.len();
    let ones: Vec<usize> = (0..n).filter(|&x| table.values[x] == 1).collect();
    // Count pairs by Hamming distance, then weight per t.
    let mut by_d = vec![0u64; m + 1];
    for &x in &ones {
        for &y in &ones {
            by_d[(x ^ y).count_ones() as usize] += 1;
        }
    }
    let mut rows = Vec::new();
    for &t in ts {
        let keep = 0.5 * (1.0 + (-t).exp());
        let pw: Vec<f64> = (0..=m).map(|d| keep.powi((m - d) as i32) * (1.0 - keep).powi(d as i32)).collect();
        let dynamics = by_d.iter().zip(&pw).map(|(&c, &p)| c as f64 * p).sum::<f64>() / n as f64;
        rows.push(CovIdentityRow { t, spectral: st.noise_correlation(t), dynamics });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PivotalBoundsReport {
    pub g_mask: u64,
    /// `Σ_{S∩G≠∅} ĥ(S)²`.
    pub hits: f64,
    /// `Σ_{∅≠S⊆G} ĥ(S)²`.
    pub inside: f64,
    pub piv: f64,
    /// `min(4 P[Piv_G] − hits, 4 P[Piv_G]² − inside)`.
    pub slack: f64,
}

/// Both spectral-versus-pivotal inequalities for the positions in `g`.
pub fn check_spectral_pivotal_bounds(table: &BooleanFunctionTable, g: usize) -> PivotalBoundsReport {
    let st = fourier_transform(table);
    let mut hits = 0.0;
    let mut inside = 0.0;
    for (s, c) in st.coef.iter().enumerate() {
        if s & g != 0 {
            hits += c * c;
        }
        if s != 0 && s & !g == 0 {
            inside += c * c;
        }
    }
    let piv = table.box_pivotal_probability(g);
    PivotalBoundsReport { g_mask: g as u64, hits, inside, piv, slack: (4.0 * piv - hits).min(4.0 * piv * piv - inside) }
}

/// Positions of `table` whose points lie in `w`, as a bitmask.
pub fn mask_of(tess: &Tessellation, table: &BooleanFunctionTable, w: &Window) -> usize {
    table.points.iter().enumerate().filter(|(_, &p)| w.contains(tess.point(p))).fold(0, |m, (i, _)| m | 1 << i)
}

/// Lower-tail profile `P[0 < |S^an| ≤ k]`, estimated by the ratio
/// `Σ_η Q̂^η[0<|S|≤k] / Σ_η E^η[h]` over independent point sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerTailRow {
    pub k: usize,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerTail {
    pub rows: Vec<LowerTailRow>,
    /// `P[S^an = ∅]`, the `k = 0` column of `P[|S^an| ≤ k]`.
    pub empty: LowerTailRow,
}

fn ratio_row(k: usize, num: &[f64], den: &[f64]) -> LowerTailRow {
    let n = num.len() as f64;
    let mden = den.iter().sum::<f64>() / n;
    let ratio = num.iter().sum::<f64>() / n / mden;
    // Delta method for a ratio of means.
    let var = num.iter().zip(den).map(|(a, b)| (a - ratio * b).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    LowerTailRow { k, value: ratio, stderr: (var / n).sqrt() / mden }
}

pub fn lower_tail_profile(
    spec: &EventSpec,
    ks: &[usize],
    replicas: usize,
    seed: u64,
    cap: usize,
) -> Result<LowerTail, SpectralError> {
    let per: Vec<(Vec<f64>, f64, f64)> = crate::estimators::par_map(replicas, |i| {
        let tab = tabulate_event(spec, rng::replica_seed(seed, i as u64), cap, 64)?;
        let st = fourier_transform(&tab.table);
        let w = st.level_weights();
        let mut cum = vec![0.0; w.len()];
        for k in 1..w.len() {
            cum[k] = cum[k - 1] + w[k];
        }
        let prof = ks.iter().map(|&k| cum[k.min(w.len() - 1)]).collect();
        Ok::<_, SpectralError>((prof, w[0], st.energy()))
    })
    .into_iter()
    .collect::<Result<_, _>>()?;
    let den: Vec<f64> = per.iter().map(|p| p.2).collect();
    let rows = (0..ks.len())
        .map(|j| ratio_row(ks[j], &per.iter().map(|p| p.0[j]).collect::<Vec<_>>(), &den))
        .collect();
    let empty = ratio_row(0, &per.iter().map(|p| p.1).collect::<Vec<_>>(), &den);
    Ok(LowerTail { rows, empty })
}

/// Annealed law of `|S|` by direct enumeration: per bin `k`,
/// `E[Q̂^η[|S|=k]] / E[h]` over independent point sets, for `k ≤ cap`.
pub fn annealed_level_law(spec: &EventSpec, replicas: usize, seed: u64, cap: usize) -> Result<Vec<LowerTailRow>, SpectralError> {
    let per: Vec<(Vec<f64>, f64)> = crate::estimators::par_map(replicas, |i| {
        let tab = tabulate_event(spec, rng::replica_seed(seed, i as u64), cap, 64)?;
        let st = fourier_transform(&tab.table);
        let mut w = st.level_weights();
        w.resize(cap + 1, 0.0);
        Ok::<_, SpectralError>((w, st.energy()))
    })
    .into_iter()
    .collect::<Result<_, _>>()?;
    let den: Vec<f64> = per.iter().map(|p| p.1).collect();
    Ok((0..=cap).map(|k| ratio_row(k, &per.iter().map(|p| p.0[k]).collect::<Vec<_>>(), &den)).collect())
}

/// Counts of `|S|` over `draws` independent rejection-sampled annealed draws.
pub fn annealed_size_histogram(
    spec: &EventSpec,
    draws: usize,
    seed: u64,
    cap: usize,
    max_attempts: usize,
) -> Result<Vec<u64>, SpectralError> {
    let sizes: Vec<usize> = crate::estimators::par_map(draws, |i| {
        draw_annealed_sample(spec, rng::replica_seed(seed, i as u64), cap, max_attempts).map(|(d, _)| d.subset.len())
    })
    .into_iter()
    .collect::<Result<_, _>>()?;
    let mut h = vec![0u64; cap + 1];
    for s in sizes {
        h[s] += 1;
    }
    Ok(h)
}

//! Frozen, moving and mixed dynamics.
//!
//! Frozen dynamics keep the points and resample each color at rate 1; the
//! event list is exact. Moving dynamics keep the colors and move each point by
//! an independent Lévy process sampled on a time grid; positions wrap around
//! the window, which makes the window a torus and keeps the point process
//! exactly Poisson at every grid time. Mixed dynamics do both independently.

mod levy;
pub mod metric;

use std::sync::Arc;

use rand::Rng as _;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::events::{Color, ColoredConfiguration, EventError, EventSpec, Sector, BLACK, WHITE};
use crate::geometry::{PointSet, Pt, Tessellation, Window};
use crate::rng::{self, Rng};

pub use levy::{
    increment_norms, positive_stable, sample_stable_increment, stable_increment, tail_check, MoverKind, TailCell,
    TailReport,
};
pub use metric::{config_metric, MetricValue};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum DynamicsError {
    #[error("invalid parameter: {0}")]
    Parameter(&'static str),
    #[error(transparent)]
    Event(#[from] EventError),
}

/// A color clock ring: at `time`, `point` takes color `color`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColorEvent {
    pub time: f64,
    pub point: u32,
    pub color: Color,
}

/// Rate-1 clocks on `n` points over `[0, horizon]`, each ring drawing a fresh
/// color that is black with probability `p`. Sorted by time.
pub fn color_clocks(n: usize, horizon: f64, p: f64, rng: &mut Rng) -> Vec<ColorEvent> {
    let mean = n as f64 * horizon;
    let count = if mean > 0.0 { Poisson::new(mean).unwrap().sample(rng) as usize } else { 0 };
    let mut ev: Vec<ColorEvent> = (0..count)
        .map(|_| ColorEvent {
            time: horizon * rng.random::<f64>(),
            point: rng.random_range(0..n as u32),
            color: if rng.random::<f64>() < p { BLACK } else { WHITE },
        })
        .collect();
    ev.sort_by(|a, b| a.time.total_cmp(&b.time));
    ev
}

fn apply_until(colors: &mut [Color], events: &[ColorEvent], t: f64) {
    for e in events.iter().take_while(|e| e.time <= t) {
        colors[e.point as usize] = e.color;
    }
}

#[derive(Clone, Debug)]
pub struct FrozenTrajectory {
    pub base: ColoredConfiguration,
    pub events: Vec<ColorEvent>,
    pub horizon: f64,
}

impl FrozenTrajectory {
    pub fn colors_at(&self, t: f64) -> Vec<Color> {
        let mut c = self.base.colors.clone();
        apply_until(&mut c, &self.events, t);
        c
    }

    pub fn configuration_at(&self, t: f64) -> ColoredConfiguration {
        ColoredConfiguration { tess: self.base.tess.clone(), colors: self.colors_at(t), p: self.base.p }
    }

    /// Lebesgue measure of `{t ∈ [a, b] : ev(ω(t))}`, exact.
    pub fn occupation(&self, spec: &EventSpec, a: f64, b: f64) -> Result<f64, DynamicsError> {
        let ev = spec.compile(&self.base.tess)?;
        let mut relevant = vec![false; self.base.colors.len()];
        for c in ev.cells() {
            relevant[c] = true;
        }
        let start = self.events.partition_point(|e| e.time <= a);
        let mut colors = self.colors_at(a);
        let mut cur = ev.eval(&colors);
        let (mut since, mut total) = (a, 0.0);
        for e in self.events[start..].iter().take_while(|e| e.time < b) {
            let i = e.point as usize;
            if colors[i] == e.color {
                continue;
            }
            colors[i] = e.color;
            if !relevant[i] {
                continue;
            }
            let now = ev.eval(&colors);
            if now != cur {
                if cur {
                    total += e.time - since;
                }
                cur = now;
                since = e.time;
            }
        }
        if cur {
            total += b - since;
        }
        Ok(total)
    }
}

#[derive(Clone, Debug)]
pub struct MovingTrajectory {
    pub initial: ColoredConfiguration,
    pub mover: MoverKind,
    pub dt: f64,
    pub horizon: f64,
    /// Positions at grid times `k·dt`, `k = 0..=⌈horizon/dt⌉`, wrapped into the window.
    pub positions: Vec<Vec<Pt>>,
}

impl MovingTrajectory {
    pub fn window(&self) -> Window {
        self.initial.tess.window()
    }

    /// Grid step in force at time `t` (positions are piecewise constant, left-continuous grid).
    pub fn step_at(&self, t: f64) -> usize {
        ((t / self.dt + 1e-9).floor().max(0.0) as usize).min(self.positions.len() - 1)
    }

    pub fn points_at(&self, t: f64) -> PointSet {
        let ps = &self.initial.tess.points;
        PointSet::new(ps.seed, ps.window, self.positions[self.step_at(t)].clone())
    }

    pub fn configuration_at(&self, t: f64) -> ColoredConfiguration {
        let tess = if self.step_at(t) == 0 { self.initial.tess.clone() } else { Arc::new(Tessellation::build(self.points_at(t))) };
        ColoredConfiguration { tess, colors: self.initial.colors.clone(), p: self.initial.p }
    }
}

#[derive(Clone, Debug)]
pub struct MixedTrajectory {
    pub motion: MovingTrajectory,
    pub events: Vec<ColorEvent>,
}

impl MixedTrajectory {
    pub fn colors_at(&self, t: f64) -> Vec<Color> {
        let mut c = self.motion.initial.colors.clone();
        apply_until(&mut c, &self.events, t);
        c
    }

    pub fn configuration_at(&self, t: f64) -> ColoredConfiguration {
        let mut cfg = self.motion.configuration_at(t);
        cfg.colors = self.colors_at(t);
        cfg
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DynamicsKind {
    Frozen,
    Moving,
    Mixed,
}

#[derive(Clone, Debug)]
pub enum Trajectory {
    Frozen(FrozenTrajectory),
    Moving(MovingTrajectory),
    Mixed(MixedTrajectory),
}

fn check_horizon(t: f64) -> Result<(), DynamicsError> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(DynamicsError::Parameter("horizon must be positive"))
    }
}

pub fn simulate_frozen(cfg: &ColoredConfiguration, horizon: f64, seed: u64) -> Result<FrozenTrajectory, DynamicsError> {
    check_horizon(horizon)?;
    let mut r = rng::stream(seed, rng::tag::CLOCKS, 0);
    let events = color_clocks(cfg.colors.len(), horizon, cfg.p, &mut r);
    Ok(FrozenTrajectory { base: cfg.clone(), events, horizon })
}

pub fn simulate_moving(
    cfg: &ColoredConfiguration,
    horizon: f64,
    dt: f64,
    mover: MoverKind,
    seed: u64,
) -> Result<MovingTrajectory, DynamicsError> {
    check_horizon(horizon)?;
    mover.validate()?;
    if !(dt > 0.0) || horizon < dt {
        return Err(DynamicsError::Parameter("need 0 < dt <= horizon"));
    }
    let w = cfg.tess.window();
    let steps = (horizon / dt - 1e-9).ceil() as usize;
    let mut r = rng::stream(seed, rng::tag::MOVES, 0);
    let mut positions = vec![cfg.tess.points.points.clone()];
    for _ in 0..steps {
        let next = positions
            .last()
            .unwrap()
            .iter()
            .map(|&p| {
                let d = mover.increment(dt, &mut r);
                [wrap(p[0] + d[0], w.x0, w.x1), wrap(p[1] + d[1], w.y0, w.y1)]
            })
            .collect();
        positions.push(next);
    }
    Ok(MovingTrajectory { initial: cfg.clone(), mover, dt, horizon, positions })
}

fn wrap(x: f64, lo: f64, hi: f64) -> f64 {
    if x >= lo && x < hi {
        return x;
    }
    let y = lo + (x - lo).rem_euclid(hi - lo);
    if y >= hi {
        lo
    } else {
        y
    }
}

pub fn simulate_mixed(
    cfg: &ColoredConfiguration,
    horizon: f64,
    dt: f64,
    mover: MoverKind,
    seed: u64,
) -> Result<MixedTrajectory, DynamicsError> {
    let motion = simulate_moving(cfg, horizon, dt, mover, seed)?;
    let mut r = rng::stream(seed, rng::tag::CLOCKS, 0);
    let events = color_clocks(cfg.colors.len(), horizon, cfg.p, &mut r);
    Ok(MixedTrajectory { motion, events })
}

pub fn simulate(
    kind: DynamicsKind,
    cfg: &ColoredConfiguration,
    horizon: f64,
    dt: f64,
    mover: MoverKind,
    seed: u64,
) -> Result<Trajectory, DynamicsError> {
    Ok(match kind {
        DynamicsKind::Frozen => Trajectory::Frozen(simulate_frozen(cfg, horizon, seed)?),
        DynamicsKind::Moving => Trajectory::Moving(simulate_moving(cfg, horizon, dt, mover, seed)?),
        DynamicsKind::Mixed => Trajectory::Mixed(simulate_mixed(cfg, horizon, dt, mover, seed)?),
    })
}

impl Trajectory {
    pub fn horizon(&self) -> f64 {
        match self {
            Trajectory::Frozen(f) => f.horizon,
            Trajectory::Moving(m) => m.horizon,
            Trajectory::Mixed(x) => x.motion.horizon,
        }
    }

    pub fn initial(&self) -> &ColoredConfiguration {
        match self {
            Trajectory::Frozen(f) => &f.base,
            Trajectory::Moving(m) => &m.initial,
            Trajectory::Mixed(x) => &x.motion.initial,
        }
    }

    pub fn configuration_at(&self, t: f64) -> ColoredConfiguration {
        match self {
            Trajectory::Frozen(f) => f.configuration_at(t),
            Trajectory::Moving(m) => m.configuration_at(t),
            Trajectory::Mixed(x) => x.configuration_at(t),
        }
    }

    pub fn record(&self) -> TrajectoryRecord {
        let init = self.initial();
        let (mover, dt, positions, events) = match self {
            Trajectory::Frozen(f) => (None, None, Vec::new(), f.events.clone()),
            Trajectory::Moving(m) => (Some(m.mover), Some(m.dt), m.positions[1..].to_vec(), Vec::new()),
            Trajectory::Mixed(x) => {
                (Some(x.motion.mover), Some(x.motion.dt), x.motion.positions[1..].to_vec(), x.events.clone())
            }
        };
        TrajectoryRecord {
            kind: self.kind(),
            points: init.tess.points.clone(),
            colors: init.colors.clone(),
            p: init.p,
            horizon: self.horizon(),
            mover,
            dt,
            events,
            positions,
        }
    }

    pub fn kind(&self) -> DynamicsKind {
        match self {
            Trajectory::Frozen(_) => DynamicsKind::Frozen,
            Trajectory::Moving(_) => DynamicsKind::Moving,
            Trajectory::Mixed(_) => DynamicsKind::Mixed,
        }
    }
}

/// Serializable form of a trajectory: the initial configuration, the color
/// clock rings and the grid positions after time 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub kind: DynamicsKind,
    pub points: PointSet,
    pub colors: Vec<Color>,
    pub p: f64,
    pub horizon: f64,
    pub mover: Option<MoverKind>,
    pub dt: Option<f64>,
    pub events: Vec<ColorEvent>,
    pub positions: Vec<Vec<Pt>>,
}

impl TrajectoryRecord {
    pub fn replay(self) -> Result<Trajectory, DynamicsError> {
        let tess = Arc::new(Tessellation::build(self.points));
        if tess.len() != self.colors.len() {
            return Err(DynamicsError::Parameter("one color per point"));
        }
        let base = ColoredConfiguration { tess, colors: self.colors, p: self.p };
        if self.kind == DynamicsKind::Frozen {
            return Ok(Trajectory::Frozen(FrozenTrajectory { base, events: self.events, horizon: self.horizon }));
        }
        let (Some(mover), Some(dt)) = (self.mover, self.dt) else {
            return Err(DynamicsError::Parameter("moving record without mover"));
        };
        let mut positions = vec![base.tess.points.points.clone()];
        positions.extend(self.positions);
        let motion = MovingTrajectory { initial: base, mover, dt, horizon: self.horizon, positions };
        Ok(match self.kind {
            DynamicsKind::Moving => Trajectory::Moving(motion),
            _ => Trajectory::Mixed(MixedTrajectory { motion, events: self.events }),
        })
    }
}

/// The event at each requested time. Frozen trajectories compile once and only
/// re-evaluate after a ring that changes a relevant color; moving ones rebuild
/// and re-certify the tessellation at each new grid step.
pub fn indicator_path(traj: &Trajectory, spec: &EventSpec, times: &[f64]) -> Result<Vec<bool>, DynamicsError> {
    let horizon = traj.horizon();
    if times.iter().any(|&t| !(0.0..=horizon).contains(&t)) {
        return Err(DynamicsError::Parameter("time outside [0, horizon]"));
    }
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    let mut out = vec![false; times.len()];
    match traj {
        Trajectory::Frozen(f) => {
            let ev = spec.compile(&f.base.tess)?;
            let mut relevant = vec![false; f.base.colors.len()];
            for c in ev.cells() {
                relevant[c] = true;
            }
            let mut colors = f.base.colors.clone();
            let mut next = 0;
            let mut val = None;
            for &q in &order {
                while next < f.events.len() && f.events[next].time <= times[q] {
                    let e = f.events[next];
                    if colors[e.point as usize] != e.color && relevant[e.point as usize] {
                        val = None;
                    }
                    colors[e.point as usize] = e.color;
                    next += 1;
                }
                out[q] = *val.get_or_insert_with(|| ev.eval(&colors));
            }
        }
        Trajectory::Moving(m) => {
            let mut cache: Option<(usize, crate::events::Compiled)> = None;
            for &q in &order {
                let ev = grid_event(m, spec, times[q], &mut cache)?;
                out[q] = ev.eval(&m.initial.colors);
            }
        }
        Trajectory::Mixed(x) => {
            let mut cache: Option<(usize, crate::events::Compiled)> = None;
            let mut colors = x.motion.initial.colors.clone();
            let mut next = 0;
            for &q in &order {
                while next < x.events.len() && x.events[next].time <= times[q] {
                    colors[x.events[next].point as usize] = x.events[next].color;
                    next += 1;
                }
                out[q] = grid_event(&x.motion, spec, times[q], &mut cache)?.eval(&colors);
            }
        }
    }
    Ok(out)
}

fn grid_event<'a>(
    m: &MovingTrajectory,
    spec: &EventSpec,
    t: f64,
    cache: &'a mut Option<(usize, crate::events::Compiled)>,
) -> Result<&'a crate::events::Compiled, EventError> {
    let k = m.step_at(t);
    if cache.as_ref().is_none_or(|c| c.0 != k) {
        let ev = if k == 0 {
            spec.compile(&m.initial.tess)?
        } else {
            let ps = m.points_at(t);
            let tess = match spec.support() {
                Some(roi) => Tessellation::build_for(ps, &roi),
                None => Tessellation::build(ps),
            };
            spec.compile(&tess)?
        };
        *cache = Some((k, ev));
    }
    Ok(&cache.as_ref().unwrap().1)
}

/// The one-arm event from `[−1,1]²` to `∂[−R,R]²`.
pub fn one_arm(big_r: f64) -> EventSpec {
    EventSpec::arm(1.0, big_r, 1, Sector::FullPlane)
}

/// `X_R = ∫_0^1 f_R(ω(t)) dt` with `f_R` the one-arm event to distance `R`.
/// Exact for frozen trajectories; otherwise the left Riemann sum on
/// `resolution` equal steps, whose bias is `O(1/resolution)` plus the `O(dt)`
/// grid error of the motion.
pub fn integral_x_r(traj: &Trajectory, big_r: f64, resolution: usize) -> Result<f64, DynamicsError> {
    if traj.horizon() < 1.0 {
        return Err(DynamicsError::Parameter("horizon must be at least 1"));
    }
    let spec = one_arm(big_r);
    match traj {
        Trajectory::Frozen(f) => f.occupation(&spec, 0.0, 1.0),
        _ => {
            let n = resolution.max(1);
            let ts: Vec<f64> = (0..n).map(|k| k as f64 / n as f64).collect();
            let path = indicator_path(traj, &spec, &ts)?;
            Ok(path.iter().filter(|&&b| b).count() as f64 / n as f64)
        }
    }
}

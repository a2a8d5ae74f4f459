//! Colored configurations and the static events evaluated on them.
//!
//! Events are described by an [`EventSpec`] and compiled against a
//! [`Tessellation`] into a [`Compiled`] evaluator; compilation does all the
//! geometry, evaluation only looks at colors. Colors are `+1` (black) and `-1`
//! (white), indexed like the points of the tessellation.

mod arms;
mod hat;
mod pivotal;
pub mod region;

use std::sync::Arc;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::geometry::{check_padding_valid, Pt, Tessellation, Window};
use crate::rng::Rng;

pub use arms::realizes;
pub use hat::{annulus_points, hat_widths, HatVariant};
pub use pivotal::{pivotal_annealed_mc, pivotal_point, pivotal_quenched_box, Pivotality, QUENCHED_CAP};
pub use region::{Region, RegionGraph, Sector};

pub type Color = i8;
pub const BLACK: Color = 1;
pub const WHITE: Color = -1;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EventError {
    #[error("uncertified region")]
    Uncertified,
    #[error("enumeration cap: {found} points exceed {cap}")]
    EnumerationCap { found: usize, cap: usize },
    #[error("invalid event: {0}")]
    Invalid(&'static str),
}

/// A point set with its tessellation and one color per point.
#[derive(Clone, Debug)]
pub struct ColoredConfiguration {
    pub tess: Arc<Tessellation>,
    pub colors: Vec<Color>,
    pub p: f64,
}

impl ColoredConfiguration {
    pub fn new(tess: Arc<Tessellation>, colors: Vec<Color>) -> Self {
        assert_eq!(tess.len(), colors.len(), "one color per point");
        ColoredConfiguration { tess, colors, p: 0.5 }
    }

    /// Independent colors, black with probability `p`.
    pub fn sample(tess: Arc<Tessellation>, p: f64, rng: &mut Rng) -> Self {
        assert!((0.0..=1.0).contains(&p));
        let colors = random_colors(tess.len(), p, rng);
        ColoredConfiguration { tess, colors, p }
    }

    pub fn uniform(tess: Arc<Tessellation>, color: Color) -> Self {
        let n = tess.len();
        ColoredConfiguration::new(tess, vec![color; n])
    }
}

pub fn random_colors(n: usize, p: f64, rng: &mut Rng) -> Vec<Color> {
    if p == 0.5 {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let bits: u64 = rng.random();
            for k in 0..64.min(n - out.len()) {
                out.push(if bits >> k & 1 == 1 { BLACK } else { WHITE });
            }
        }
        out
    } else {
        (0..n).map(|_| if rng.random::<f64>() < p { BLACK } else { WHITE }).collect()
    }
}

/// Sup-norm annulus `center + [-R,R]^2 \ ]-r,r[^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSpec {
    pub center: Pt,
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
}

impl AnnulusSpec {
    pub fn new(r: f64, big_r: f64) -> Self {
        AnnulusSpec { center: [0.0, 0.0], r, big_r }
    }

    pub fn outer_box(&self) -> Window {
        Window::square(self.center, self.big_r)
    }

    pub fn region(&self, sector: Sector) -> Region {
        Region::annulus(self.center, self.r, self.big_r, sector)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArmSpec {
    pub j: usize,
    pub sector: Sector,
    pub pattern: Vec<Color>,
}

impl ArmSpec {
    /// Alternating pattern starting with black: `B`, `BW`, `BWB`, `BWBW`, ...
    pub fn new(j: usize, sector: Sector) -> Self {
        let pattern = (0..j).map(|k| if k % 2 == 0 { BLACK } else { WHITE }).collect();
        ArmSpec { j, sector, pattern }
    }

    pub fn with_pattern(sector: Sector, pattern: Vec<Color>) -> Self {
        ArmSpec { j: pattern.len(), sector, pattern }
    }

    pub fn cyclic(&self) -> bool {
        self.sector == Sector::FullPlane
    }

    fn validate(&self) -> Result<(), EventError> {
        if self.j == 0 || self.pattern.len() != self.j {
            return Err(EventError::Invalid("pattern length must equal j >= 1"));
        }
        if self.pattern.iter().any(|&c| c != BLACK && c != WHITE) {
            return Err(EventError::Invalid("pattern colors must be +1 or -1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    LeftRight,
    TopBottom,
}

/// Geometry-independent description of an event.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EventSpec {
    Constant { value: bool },
    Crossing { rect: Window, dir: Direction, color: Color },
    Arm { ann: AnnulusSpec, arms: ArmSpec },
    Hat { ann: AnnulusSpec, arms: ArmSpec, variant: HatVariant },
    /// `η ∩ window ≠ ∅`, which ignores colors.
    NonEmpty { window: Window },
}

impl EventSpec {
    pub fn crossing(rect: Window) -> Self {
        EventSpec::Crossing { rect, dir: Direction::LeftRight, color: BLACK }
    }

    pub fn arm(r: f64, big_r: f64, j: usize, sector: Sector) -> Self {
        EventSpec::Arm { ann: AnnulusSpec::new(r, big_r), arms: ArmSpec::new(j, sector) }
    }

    pub fn hat(r: f64, big_r: f64, j: usize, variant: HatVariant) -> Self {
        EventSpec::Hat { ann: AnnulusSpec::new(r, big_r), arms: ArmSpec::new(j, Sector::FullPlane), variant }
    }

    /// A window outside of which neither points nor colors matter (after certification).
    pub fn support(&self) -> Option<Window> {
        match self {
            EventSpec::Constant { .. } => None,
            EventSpec::Crossing { rect, .. } => Some(*rect),
            EventSpec::Arm { ann, .. } | EventSpec::Hat { ann, .. } => Some(ann.outer_box()),
            EventSpec::NonEmpty { window } => Some(*window),
        }
    }

    /// Compiles after checking that the tessellation is certified on the support.
    pub fn compile(&self, tess: &Tessellation) -> Result<Compiled, EventError> {
        if let Some(s) = self.support() {
            let needs_cert = !matches!(self, EventSpec::NonEmpty { .. })
                && !matches!(self, EventSpec::Hat { variant: HatVariant::Hat | HatVariant::Ext, .. });
            if needs_cert && !check_padding_valid(tess, &s) {
                return Err(EventError::Uncertified);
            }
        }
        self.compile_unchecked(tess)
    }

    /// Compiles on the tessellation as given, without certification.
    pub fn compile_unchecked(&self, tess: &Tessellation) -> Result<Compiled, EventError> {
        let kind = match self {
            EventSpec::Constant { value } => Kind::Const(*value),
            EventSpec::NonEmpty { window } => Kind::Const(tess.points.points.iter().any(|&p| window.contains(p))),
            EventSpec::Crossing { rect, dir, color } => {
                let g = RegionGraph::build(tess, Region::rect(*rect))?;
                let (a, b) = match dir {
                    Direction::LeftRight => (region::LEFT, region::RIGHT),
                    Direction::TopBottom => (region::TOP, region::BOTTOM),
                };
                if *color != BLACK && *color != WHITE {
                    return Err(EventError::Invalid("color must be +1 or -1"));
                }
                Kind::Crossing { g, color: *color, a, b }
            }
            EventSpec::Arm { ann, arms } => {
                arms.validate()?;
                if ann.r < 1.0 || ann.r > ann.big_r {
                    return Err(EventError::Invalid("annulus needs 1 <= r <= R"));
                }
                if ann.r == ann.big_r {
                    Kind::Const(true)
                } else {
                    let g = RegionGraph::build(tess, ann.region(arms.sector))?;
                    Kind::Arm { g, pattern: arms.pattern.clone(), cyclic: arms.cyclic() }
                }
            }
            EventSpec::Hat { ann, arms, variant } => {
                arms.validate()?;
                if arms.sector != Sector::FullPlane {
                    return Err(EventError::Invalid("hat events are defined for the full plane"));
                }
                if ann.r < 1.0 || ann.r > ann.big_r {
                    return Err(EventError::Invalid("annulus needs 1 <= r <= R"));
                }
                return hat::compile(tess, ann, arms, *variant);
            }
        };
        Ok(Compiled { kind, flagged: false })
    }
}

enum Kind {
    Const(bool),
    Crossing { g: RegionGraph, color: Color, a: usize, b: usize },
    Arm { g: RegionGraph, pattern: Vec<Color>, cyclic: bool },
}

/// An event bound to one tessellation; evaluation only reads colors.
pub struct Compiled {
    kind: Kind,
    flagged: bool,
}

impl Compiled {
    pub fn constant(value: bool) -> Self {
        Compiled { kind: Kind::Const(value), flagged: false }
    }

    pub fn eval(&self, colors: &[Color]) -> bool {
        match &self.kind {
            Kind::Const(v) => *v,
            Kind::Crossing { g, color, a, b } => g.connects(colors, *color, *a, *b),
            Kind::Arm { g, pattern, cyclic } => arms::realizes(g, colors, pattern, *cyclic),
        }
    }

    /// Set when the value was decided vacuously (hat events on an empty or
    /// fully absorbed annulus).
    pub fn flagged(&self) -> bool {
        self.flagged
    }

    /// Points whose color can matter, sorted.
    pub fn cells(&self) -> Vec<usize> {
        match &self.kind {
            Kind::Const(_) => Vec::new(),
            Kind::Crossing { g, .. } | Kind::Arm { g, .. } => g.cells(),
        }
    }

    pub fn graph(&self) -> Option<&RegionGraph> {
        match &self.kind {
            Kind::Const(_) => None,
            Kind::Crossing { g, .. } | Kind::Arm { g, .. } => Some(g),
        }
    }
}

/// Per-color cluster ids over Delaunay adjacency of the whole tessellation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterLabeling {
    pub id: Vec<u32>,
}

impl ClusterLabeling {
    pub fn compute(tess: &Tessellation, colors: &[Color]) -> Self {
        let n = tess.len();
        let mut id = vec![u32::MAX; n];
        let mut stack = Vec::new();
        for s in 0..n {
            if id[s] != u32::MAX {
                continue;
            }
            id[s] = s as u32;
            stack.push(s);
            while let Some(k) = stack.pop() {
                for &m in tess.neighbors(k) {
                    let m = m as usize;
                    if id[m] == u32::MAX && colors[m] == colors[s] {
                        id[m] = s as u32;
                        stack.push(m);
                    }
                }
            }
        }
        ClusterLabeling { id }
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.id[a] == self.id[b]
    }
}

/// Black left-right crossing of `rect`.
pub fn crossing(cfg: &ColoredConfiguration, rect: Window, dir: Direction, color: Color) -> Result<bool, EventError> {
    Ok(EventSpec::Crossing { rect, dir, color }.compile(&cfg.tess)?.eval(&cfg.colors))
}

pub fn arm_event(cfg: &ColoredConfiguration, ann: AnnulusSpec, arms: ArmSpec) -> Result<bool, EventError> {
    Ok(EventSpec::Arm { ann, arms }.compile(&cfg.tess)?.eval(&cfg.colors))
}

pub fn half_plane_arm_event(cfg: &ColoredConfiguration, ann: AnnulusSpec, mut arms: ArmSpec) -> Result<bool, EventError> {
    arms.sector = Sector::HalfPlane;
    arm_event(cfg, ann, arms)
}

pub fn quarter_plane_arm_event(
    cfg: &ColoredConfiguration,
    ann: AnnulusSpec,
    mut arms: ArmSpec,
) -> Result<bool, EventError> {
    arms.sector = Sector::QuarterPlane;
    arm_event(cfg, ann, arms)
}

/// The annulus-measurable surrogate of the hat event; also reports the vacuity flag.
pub fn hat_arm_event(cfg: &ColoredConfiguration, ann: AnnulusSpec, arms: ArmSpec) -> Result<(bool, bool), EventError> {
    let c = EventSpec::Hat { ann, arms, variant: HatVariant::Hat }.compile(&cfg.tess)?;
    Ok((c.eval(&cfg.colors), c.flagged()))
}

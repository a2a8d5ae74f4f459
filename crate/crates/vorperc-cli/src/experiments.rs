//! Every experiment is one subcommand and one config `estimator` value; the
//! parameter structs double as clap flag groups and config `params` records.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use vorperc::dynamics::metric::metric_of_points;
use vorperc::dynamics::{tail_check, DynamicsKind, MoverKind};
use vorperc::estimators::{
    crossing_duality, estimate_arm_profile, estimate_coupled, estimate_coupled_fourarm, estimate_crossing,
    estimate_noise_covariance, estimate_pivotal_sum, estimate_quenched_second_moment, estimate_xr_moments,
    fit_power_law, qm_ratio, replica_config, ArmCase, DynamicsParams, FourArmVariant, McEstimate, Replicas, Resample,
};
use vorperc::events::{random_colors, EventSpec, HatVariant, Sector};
use vorperc::geometry::{check_padding_valid, padded_window, sample_poisson, Window};
use vorperc::rng;
use vorperc::spectral::{
    annealed_level_law, annealed_size_histogram, check_cov_identity, check_spectral_pivotal_bounds, fourier_transform,
    lower_tail_profile, mask_of, tabulate_event, QuenchedSampler,
};

use crate::output::{Plot, Report, Row, Series};

#[derive(Parser)]
struct Defaults<T: Args> {
    #[command(flatten)]
    inner: T,
}

macro_rules! clap_default {
    ($($t:ty),* $(,)?) => {$(
        impl Default for $t {
            fn default() -> Self {
                Defaults::<$t>::parse_from(["vorperc"]).inner
            }
        }
    )*};
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectorArg {
    Full,
    Half,
    Quarter,
}

impl SectorArg {
    fn sector(self) -> Sector {
        match self {
            SectorArg::Full => Sector::FullPlane,
            SectorArg::Half => Sector::HalfPlane,
            SectorArg::Quarter => Sector::QuarterPlane,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoverArg {
    Zero,
    Brownian,
    Stable,
    CompoundPoisson,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MoverArgs {
    #[arg(id = "mover_kind", long = "mover", value_enum, default_value_t = MoverArg::Stable)]
    pub kind: MoverArg,
    /// Stability or tail index of the mover.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Jump rate of the compound Poisson mover.
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
}

impl MoverArgs {
    fn mover(&self) -> MoverKind {
        match self.kind {
            MoverArg::Zero => MoverKind::Zero,
            MoverArg::Brownian => MoverKind::Brownian,
            MoverArg::Stable => MoverKind::IsotropicStable { alpha: self.alpha },
            MoverArg::CompoundPoisson => MoverKind::CompoundPoisson { alpha: self.alpha, rate: self.rate },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DynArg {
    Frozen,
    Moving,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynArgs {
    #[arg(id = "dynamics_kind", long = "dynamics", value_enum, default_value_t = DynArg::Frozen)]
    pub kind: DynArg,
    #[command(flatten)]
    pub mover: MoverArgs,
    /// Motion grid step.
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
}

impl DynArgs {
    fn params(&self) -> DynamicsParams {
        let kind = match self.kind {
            DynArg::Frozen => DynamicsKind::Frozen,
            DynArg::Moving => DynamicsKind::Moving,
            DynArg::Mixed => DynamicsKind::Mixed,
        };
        DynamicsParams { kind, mover: self.mover.mover(), dt: self.dt }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    /// Black left-right crossing of `[0,size]²`.
    Crossing,
    /// `j` arms from `inner` to `size`.
    Arm,
    /// Hat `j`-arm event from `inner` to `size`.
    Hat,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmallEvent {
    #[arg(id = "event_kind", long = "event", value_enum, default_value_t = EventKind::Crossing)]
    pub kind: EventKind,
    #[arg(long, default_value_t = 1.0)]
    pub size: f64,
    #[arg(long, default_value_t = 0.5)]
    pub inner: f64,
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    /// Largest number of relevant points per table.
    #[arg(long, default_value_t = 12)]
    pub cap: usize,
}

impl SmallEvent {
    fn spec(&self) -> EventSpec {
        match self.kind {
            EventKind::Crossing => EventSpec::crossing(Window::new(0.0, self.size, 0.0, self.size).unwrap()),
            EventKind::Arm => EventSpec::arm(self.inner, self.size, self.j, Sector::FullPlane),
            EventKind::Hat => EventSpec::hat(self.inner, self.size, self.j, HatVariant::Hat),
        }
    }

    fn check(&self) -> Result<(), (&'static str, String)> {
        positive("size", self.size)?;
        if self.kind != EventKind::Crossing && !(self.inner > 0.0 && self.inner < self.size) {
            return Err(("inner", "need 0 < inner < size".into()));
        }
        if self.kind != EventKind::Crossing && self.j == 0 {
            return Err(("j", "need at least one arm".into()));
        }
        if self.cap == 0 || self.cap > vorperc::spectral::TABLE_CAP {
            return Err(("cap", format!("need 1 <= cap <= {}", vorperc::spectral::TABLE_CAP)));
        }
        Ok(())
    }
}

/// Poisson points in `[0,n]²`.
#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleArgs {
    #[arg(long, default_value_t = 8.0)]
    pub n: f64,
    #[arg(long, default_value_t = 1.0)]
    pub intensity: f64,
    /// Probability of black.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TessellateArgs {
    #[arg(long, default_value_t = 8.0)]
    pub n: f64,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrossingArgs {
    /// Height of the rectangle.
    #[arg(long, default_value_t = 16.0)]
    pub n: f64,
    /// Width over height; squares also report the duality check.
    #[arg(long, default_value_t = 1.0)]
    pub aspect: f64,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArmsArgs {
    #[arg(long = "big-r", default_value_t = 32.0)]
    pub big_r: f64,
    #[arg(long, value_delimiter = ',', default_values_t = vec![8.0, 4.0, 2.0, 1.0])]
    pub r: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![4])]
    pub j: Vec<usize>,
    #[arg(long, value_enum, default_value_t = SectorArg::Full)]
    pub sector: SectorArg,
    /// Replica cap for adaptive doubling; below `replicas` means fixed.
    #[arg(long = "max-replicas", default_value_t = 0)]
    pub max_replicas: usize,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HatArmsArgs {
    #[arg(long, default_value_t = 2.0)]
    pub r: f64,
    #[arg(long = "big-r", default_value_t = 8.0)]
    pub big_r: f64,
    #[arg(long, default_value_t = 4)]
    pub j: usize,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QmArgs {
    #[arg(long, default_value_t = 4)]
    pub j: usize,
    #[arg(long, default_value_t = 2.0)]
    pub r1: f64,
    #[arg(long, default_value_t = 8.0)]
    pub r2: f64,
    #[arg(long, default_value_t = 32.0)]
    pub r3: f64,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuenchedMomentArgs {
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long = "big-r", value_delimiter = ',', default_values_t = vec![2.0, 4.0, 8.0])]
    pub big_r: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResampleArg {
    Empty,
    UpperHalfPlane,
    Box,
    All,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoupledArgs {
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long = "big-r", default_value_t = 8.0)]
    pub big_r: f64,
    /// Region whose colors are resampled in the second configuration.
    #[arg(long, value_enum, default_value_t = ResampleArg::UpperHalfPlane)]
    pub w: ResampleArg,
    /// Half side of the centered box for `--w box`.
    #[arg(long = "box-half", default_value_t = 1.0)]
    pub box_half: f64,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HalfplaneArgs {
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long = "big-r", value_delimiter = ',', default_values_t = vec![2.0, 4.0, 8.0, 16.0])]
    pub big_r: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseArgs {
    #[arg(long, default_value_t = 16.0)]
    pub n: f64,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0])]
    pub t: Vec<f64>,
    #[command(flatten)]
    pub dynamics: DynArgs,
    #[arg(long = "alpha4-replicas", default_value_t = 4000)]
    pub alpha4_replicas: usize,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PivotalSumArgs {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Annealed resamples per undetermined box.
    #[arg(long, default_value_t = 0)]
    pub m: usize,
    #[arg(long = "alpha4-replicas", default_value_t = 4000)]
    pub alpha4_replicas: usize,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct XrArgs {
    #[arg(long = "big-r", value_delimiter = ',', default_values_t = vec![4.0, 8.0, 16.0, 32.0])]
    pub big_r: Vec<f64>,
    /// Riemann steps for moving and mixed dynamics.
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    #[arg(long = "alpha1-replicas", default_value_t = 4000)]
    pub alpha1_replicas: usize,
    #[command(flatten)]
    pub dynamics: DynArgs,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TabulateArgs {
    #[command(flatten)]
    pub event: SmallEvent,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralSampleArgs {
    #[command(flatten)]
    pub event: SmallEvent,
    /// Draw from one fixed point set instead of the annealed law.
    #[arg(long)]
    pub quenched: bool,
    /// Point sets for the direct enumeration of the annealed law.
    #[arg(long = "law-replicas", default_value_t = 20000)]
    pub law_replicas: usize,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CovIdentityArgs {
    #[command(flatten)]
    pub event: SmallEvent,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.1, 0.7, 3.0, 50.0])]
    pub t: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralPivotalArgs {
    #[command(flatten)]
    pub event: SmallEvent,
    /// Random point subsets checked per instance, besides singletons and unit boxes.
    #[arg(long = "random-sets", default_value_t = 8)]
    pub random_sets: usize,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LowerTailArgs {
    #[command(flatten)]
    pub event: SmallEvent,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2, 3, 4, 6, 8, 12])]
    pub k: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LevyTailArgs {
    #[command(flatten)]
    pub mover: MoverArgs,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.0, 2.0])]
    pub t: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![4.0, 8.0, 16.0, 32.0, 64.0])]
    pub l: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricArgs {
    #[arg(long = "r-max", default_value_t = 6.0)]
    pub r_max: f64,
    /// Radii per unit length in the numeric integral.
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    /// Displacement bound of the perturbed configuration.
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteArgs {
    /// Experiments to run; empty runs all of them.
    #[arg(long, value_delimiter = ',')]
    pub experiments: Vec<String>,
    /// Factor applied to every default replica count.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

clap_default!(
    SampleArgs,
    TessellateArgs,
    CrossingArgs,
    ArmsArgs,
    HatArmsArgs,
    QmArgs,
    QuenchedMomentArgs,
    CoupledArgs,
    HalfplaneArgs,
    NoiseArgs,
    PivotalSumArgs,
    XrArgs,
    TabulateArgs,
    SpectralSampleArgs,
    CovIdentityArgs,
    SpectralPivotalArgs,
    LowerTailArgs,
    LevyTailArgs,
    MetricArgs,
    SuiteArgs,
    MoverArgs,
    DynArgs,
    SmallEvent,
);

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "estimator", content = "params", rename_all = "kebab-case")]
pub enum Experiment {
    /// Sample a colored Poisson configuration.
    Sample(SampleArgs),
    /// Build a tessellation and report its size and padding certificate.
    Tessellate(TessellateArgs),
    /// Crossing probability of an n-high rectangle.
    Crossing(CrossingArgs),
    /// Annealed arm probabilities over inner radii, with a power-law fit.
    Arms(ArmsArgs),
    /// Plain against hat arm events on shared configurations.
    HatArms(HatArmsArgs),
    /// Quasi-multiplicativity ratio.
    Qm(QmArgs),
    /// Quenched second moment of an arm probability.
    QuenchedMoment(QuenchedMomentArgs),
    /// Coupled four-arm probabilities for all variants.
    CoupledFourarm(CoupledArgs),
    /// Upper half-plane resampling against the annealed four-arm probability.
    HalfplaneFourarm(HalfplaneArgs),
    /// Covariance of a crossing between times 0 and t.
    Noise(NoiseArgs),
    /// Sum of box pivotal probabilities of a crossing.
    PivotalSum(PivotalSumArgs),
    /// Moments of the time spent with a one-arm event.
    XrMoments(XrArgs),
    /// Truth table and Fourier spectrum of one small event.
    SpectralTabulate(TabulateArgs),
    /// Spectral-sample size histogram.
    SpectralSample(SpectralSampleArgs),
    /// Spectral against exhaustive noise correlations.
    CovIdentity(CovIdentityArgs),
    /// Spectral mass against pivotal probabilities.
    SpectralPivotal(SpectralPivotalArgs),
    /// Lower tail of the annealed spectral-sample size.
    LowerTail(LowerTailArgs),
    /// Tail probabilities of mover increments.
    LevyTail(LevyTailArgs),
    /// Configuration metric checks.
    Metric(MetricArgs),
    /// Run several experiments into one result file.
    Suite(SuiteArgs),
}

pub struct Ctx {
    pub seed: u64,
    pub replicas: usize,
}

fn positive(field: &'static str, x: f64) -> Result<(), (&'static str, String)> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err((field, format!("must be positive, got {x}")))
    }
}

fn bad<E: std::fmt::Display>(e: E) -> anyhow::Error {
    anyhow::anyhow!("{e}")
}

impl Experiment {
    pub const NAMES: [&'static str; 20] = [
        "sample",
        "tessellate",
        "crossing",
        "arms",
        "hat-arms",
        "qm",
        "quenched-moment",
        "coupled-fourarm",
        "halfplane-fourarm",
        "noise",
        "pivotal-sum",
        "xr-moments",
        "spectral-tabulate",
        "spectral-sample",
        "cov-identity",
        "spectral-pivotal",
        "lower-tail",
        "levy-tail",
        "metric",
        "suite",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Sample(_) => "sample",
            Experiment::Tessellate(_) => "tessellate",
            Experiment::Crossing(_) => "crossing",
            Experiment::Arms(_) => "arms",
            Experiment::HatArms(_) => "hat-arms",
            Experiment::Qm(_) => "qm",
            Experiment::QuenchedMoment(_) => "quenched-moment",
            Experiment::CoupledFourarm(_) => "coupled-fourarm",
            Experiment::HalfplaneFourarm(_) => "halfplane-fourarm",
            Experiment::Noise(_) => "noise",
            Experiment::PivotalSum(_) => "pivotal-sum",
            Experiment::XrMoments(_) => "xr-moments",
            Experiment::SpectralTabulate(_) => "spectral-tabulate",
            Experiment::SpectralSample(_) => "spectral-sample",
            Experiment::CovIdentity(_) => "cov-identity",
            Experiment::SpectralPivotal(_) => "spectral-pivotal",
            Experiment::LowerTail(_) => "lower-tail",
            Experiment::LevyTail(_) => "levy-tail",
            Experiment::Metric(_) => "metric",
            Experiment::Suite(_) => "suite",
        }
    }

    /// The experiment with all parameters at their defaults.
    pub fn default_of(name: &str) -> Option<Self> {
        serde_json::from_value(json!({ "estimator": name, "params": {} })).ok()
    }

    pub fn default_replicas(&self) -> usize {
        match self {
            Experiment::Sample(_) | Experiment::Tessellate(_) | Experiment::SpectralTabulate(_) | Experiment::Suite(_) => 1,
            Experiment::Crossing(_) => 10_000,
            Experiment::Arms(_) | Experiment::HatArms(_) | Experiment::Qm(_) => 2000,
            Experiment::QuenchedMoment(_) | Experiment::CoupledFourarm(_) | Experiment::HalfplaneFourarm(_) => 4000,
            Experiment::Noise(_) => 4000,
            Experiment::PivotalSum(_) => 100,
            Experiment::XrMoments(_) | Experiment::LowerTail(_) | Experiment::SpectralPivotal(_) => 1000,
            Experiment::SpectralSample(_) => 100_000,
            Experiment::CovIdentity(_) | Experiment::Metric(_) => 100,
            Experiment::LevyTail(_) => 1_000_000,
        }
    }

    /// The same experiment with every auxiliary replica count scaled by `f`.
    pub fn scaled(&self, f: f64) -> Self {
        let sc = |n: usize| ((n as f64 * f).ceil() as usize).max(1);
        let mut e = self.clone();
        match &mut e {
            Experiment::Arms(a) => a.max_replicas = (a.max_replicas as f64 * f).ceil() as usize,
            Experiment::Noise(a) => a.alpha4_replicas = sc(a.alpha4_replicas),
            Experiment::PivotalSum(a) => a.alpha4_replicas = sc(a.alpha4_replicas),
            Experiment::XrMoments(a) => a.alpha1_replicas = sc(a.alpha1_replicas),
            Experiment::SpectralSample(a) => a.law_replicas = sc(a.law_replicas),
            _ => {}
        }
        e
    }

    /// Parameter checks beyond the types; errors name the field.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        match self {
            Experiment::Sample(a) => {
                positive("n", a.n)?;
                positive("intensity", a.intensity)?;
                if !(0.0..=1.0).contains(&a.p) {
                    return Err(("p", "must lie in [0, 1]".into()));
                }
            }
            Experiment::Tessellate(a) => positive("n", a.n)?,
            Experiment::Crossing(a) => {
                positive("n", a.n)?;
                positive("aspect", a.aspect)?;
            }
            Experiment::Arms(a) => {
                positive("big_r", a.big_r)?;
                if a.r.is_empty() || a.r.iter().any(|&r| !(r >= 1.0 && r <= a.big_r)) {
                    return Err(("r", "need nonempty radii with 1 <= r <= big_r".into()));
                }
                if a.j.is_empty() || a.j.contains(&0) {
                    return Err(("j", "need positive arm counts".into()));
                }
            }
            Experiment::HatArms(a) => {
                if !(a.r > 0.0 && a.r < a.big_r) {
                    return Err(("r", "need 0 < r < big_r".into()));
                }
            }
            Experiment::Qm(a) => {
                if !(1.0 <= a.r1 && a.r1 < a.r2 && a.r2 < a.r3) {
                    return Err(("r1", "need 1 <= r1 < r2 < r3".into()));
                }
            }
            Experiment::QuenchedMoment(a) => {
                if a.big_r.is_empty() || a.big_r.iter().any(|&b| !(b > a.r)) {
                    return Err(("big_r", "need radii above r".into()));
                }
            }
            Experiment::CoupledFourarm(a) => {
                if !(a.r > 0.0 && a.r < a.big_r) {
                    return Err(("r", "need 0 < r < big_r".into()));
                }
                positive("box_half", a.box_half)?;
            }
            Experiment::HalfplaneFourarm(a) => {
                if a.big_r.is_empty() || a.big_r.iter().any(|&b| !(b > a.r)) {
                    return Err(("big_r", "need radii above r".into()));
                }
            }
            Experiment::Noise(a) => {
                positive("n", a.n)?;
                if a.t.is_empty() || a.t.iter().any(|&t| !(t > 0.0)) {
                    return Err(("t", "need positive times".into()));
                }
                positive("dt", a.dynamics.dt)?;
            }
            Experiment::PivotalSum(a) => {
                if a.n == 0 || a.n > 64 {
                    return Err(("n", "need 1 <= n <= 64".into()));
                }
            }
            Experiment::XrMoments(a) => {
                if a.big_r.is_empty() || a.big_r.iter().any(|&b| !(b > 1.0)) {
                    return Err(("big_r", "need radii above 1".into()));
                }
                if a.resolution == 0 {
                    return Err(("resolution", "must be positive".into()));
                }
            }
            Experiment::SpectralTabulate(a) => a.event.check()?,
            Experiment::SpectralSample(a) => a.event.check()?,
            Experiment::CovIdentity(a) => {
                a.event.check()?;
                if a.event.cap > vorperc::spectral::IDENTITY_CAP {
                    return Err(("cap", format!("need cap <= {}", vorperc::spectral::IDENTITY_CAP)));
                }
            }
            Experiment::SpectralPivotal(a) => a.event.check()?,
            Experiment::LowerTail(a) => a.event.check()?,
            Experiment::LevyTail(a) => {
                if a.t.iter().chain(&a.l).any(|&x| !(x > 0.0)) || a.t.is_empty() || a.l.is_empty() {
                    return Err(("t", "need positive, nonempty t and l grids".into()));
                }
            }
            Experiment::Metric(a) => {
                positive("r_max", a.r_max)?;
                if a.grid == 0 {
                    return Err(("grid", "must be positive".into()));
                }
            }
            Experiment::Suite(a) => {
                if let Some(n) = a.experiments.iter().find(|n| !Self::NAMES.contains(&n.as_str()) || *n == "suite") {
                    return Err(("experiments", format!("unknown or nested experiment `{n}`")));
                }
                positive("scale", a.scale)?;
            }
        }
        Ok(())
    }

    pub fn run(&self, ctx: &Ctx) -> anyhow::Result<Report> {
        self.validate().map_err(|(f, m)| anyhow::anyhow!("{f}: {m}"))?;
        let (seed, reps) = (ctx.seed, ctx.replicas);
        let mut rep = Report::default();
        match self {
            Experiment::Sample(a) => {
                let w = Window::new(0.0, a.n, 0.0, a.n)?;
                let ps = sample_poisson(w, a.intensity, seed);
                let colors = random_colors(ps.len(), a.p, &mut rng::stream(seed, rng::tag::COLORS, 0));
                rep.rows.push(Row::exact("sample.points", json!({ "n": a.n }), ps.len() as f64, 1, seed));
                let black = colors.iter().filter(|&&c| c > 0).count();
                rep.rows.push(Row::exact("sample.black", json!({ "n": a.n }), black as f64, 1, seed));
                let mut s = [Series::new("black"), Series::new("white")];
                for (p, &c) in ps.points.iter().zip(&colors) {
                    s[(c < 0) as usize].push(p[0], p[1], 0.0);
                }
                rep.plot(Plot::points("configuration", "x", "y", s.to_vec()));
                rep.bundle = json!({ "points": ps, "colors": colors });
            }
            Experiment::Tessellate(a) => {
                let roi = Window::new(0.0, a.n, 0.0, a.n)?;
                let cfg = replica_config(&roi, seed, 0);
                let tess = &cfg.tess;
                let p = json!({ "n": a.n });
                let edges: usize = (0..tess.len()).map(|i| tess.neighbors(i).len()).sum::<usize>() / 2;
                let area: f64 = (0..tess.len()).map(|i| tess.cell_area(i)).sum();
                rep.rows.push(Row::exact("tessellate.points", p.clone(), tess.len() as f64, 1, seed));
                rep.rows.push(Row::exact("tessellate.delaunay_edges", p.clone(), edges as f64, 1, seed));
                rep.rows.push(Row::exact("tessellate.cell_area", p.clone(), area, 1, seed));
                let valid = check_padding_valid(tess, &roi);
                rep.rows.push(Row::exact("tessellate.padding_valid", p, valid as u8 as f64, 1, seed));
                let mut deg = Series::new("cells");
                for i in 0..tess.len() {
                    deg.push(tess.neighbors(i).len() as f64, tess.cell_area(i), 0.0);
                }
                rep.plot(Plot::points("cell area by degree", "degree", "area", vec![deg]));
                rep.bundle = json!({ "window": tess.points.window, "points": tess.len(), "triangles": tess.triangles.len() });
            }
            Experiment::Crossing(a) => {
                let rect = Window::new(0.0, a.aspect * a.n, 0.0, a.n)?;
                if a.aspect == 1.0 {
                    let d = crossing_duality(a.n, reps, seed);
                    rep.rows.push(Row::est("crossing.p", &d.estimate));
                    let n = d.estimate.n_effective;
                    rep.rows.push(Row::exact("crossing.duality_violations", d.estimate.params.clone(), d.violations as f64, n, seed));
                    rep.bundle = serde_json::to_value(&d)?;
                } else {
                    let e = estimate_crossing(rect, reps, seed);
                    rep.rows.push(Row::est("crossing.p", &e));
                    rep.bundle = serde_json::to_value(&e)?;
                }
            }
            Experiment::Arms(a) => {
                let cases: Vec<ArmCase> = a.j.iter().map(|&j| ArmCase { j, sector: a.sector.sector() }).collect();
                let budget = Replicas { min: reps, max: a.max_replicas.max(reps) };
                let prof = estimate_arm_profile(a.big_r, &a.r, &cases, budget, seed)?;
                let mut fits = Vec::new();
                let mut series = Vec::new();
                for (case, ests) in cases.iter().zip(&prof) {
                    let mut s = Series::new(&format!("j={} {:?}", case.j, case.sector));
                    let mut pairs = Vec::new();
                    for (&r, e) in a.r.iter().zip(ests) {
                        rep.rows.push(Row::est("arms.alpha", e));
                        s.push(r / a.big_r, e.value, e.stderr);
                        pairs.push((r / a.big_r, e.value, e.stderr));
                    }
                    series.push(s);
                    let p = json!({ "j": case.j, "sector": case.sector, "R": a.big_r, "r": a.r });
                    match fit_power_law(&pairs) {
                        Ok(f) => {
                            rep.rows.push(Row::new("arms.exponent", p, f.exponent, f.stderr, f.used as u64, f.dropped as u64, seed));
                            fits.push(Some(f));
                        }
                        Err(_) => fits.push(None),
                    }
                }
                rep.plot(Plot::errors("arm probabilities", "r/R", "alpha", true, true, series));
                rep.bundle = json!({ "estimates": prof, "fits": fits });
            }
            Experiment::HatArms(a) => {
                let mut specs = vec![EventSpec::arm(a.r, a.big_r, a.j, Sector::FullPlane)];
                for v in [HatVariant::Hat, HatVariant::Ext, HatVariant::Int] {
                    specs.push(EventSpec::hat(a.r, a.big_r, a.j, v));
                }
                let roi = Window::square([0.0, 0.0], a.big_r);
                let c = estimate_coupled(&specs, Resample::Empty, roi, reps, seed)?;
                for (name, e) in ["plain", "hat", "ext", "int"].iter().zip(&c.single) {
                    rep.rows.push(Row::est(&format!("hat-arms.{name}"), e));
                }
                rep.bundle = serde_json::to_value(&c.single)?;
            }
            Experiment::Qm(a) => {
                let e = qm_ratio(a.j, a.r1, a.r2, a.r3, reps, seed)?;
                rep.rows.push(Row::est("qm.ratio", &e));
                rep.bundle = serde_json::to_value(&e)?;
            }
            Experiment::QuenchedMoment(a) => {
                let mut s = Series::new(&format!("j={}", a.j));
                let mut all = Vec::new();
                for &big_r in &a.big_r {
                    let spec = EventSpec::arm(a.r, big_r, a.j, Sector::FullPlane);
                    let q = estimate_quenched_second_moment(&spec, reps, rng::derive_seed(seed, &[big_r.to_bits()]))?;
                    rep.rows.push(Row::est("quenched-moment.second", &q.second));
                    rep.rows.push(Row::est("quenched-moment.annealed", &q.annealed));
                    rep.rows.push(Row::est("quenched-moment.ratio", &q.ratio));
                    s.push(big_r / a.r, q.ratio.value, q.ratio.stderr);
                    all.push(q);
                }
                rep.plot(Plot::errors("quenched over annealed arm probability", "R/r", "ratio", true, false, vec![s]));
                rep.bundle = serde_json::to_value(&all)?;
            }
            Experiment::CoupledFourarm(a) => {
                let w = match a.w {
                    ResampleArg::Empty => Resample::Empty,
                    ResampleArg::UpperHalfPlane => Resample::UpperHalfPlane,
                    ResampleArg::All => Resample::All,
                    ResampleArg::Box => Resample::Box { window: Window::square([0.0, 0.0], a.box_half) },
                };
                let vs = [FourArmVariant::Plain, FourArmVariant::Hat, FourArmVariant::Ext, FourArmVariant::Int];
                let e = estimate_coupled_fourarm(w, a.r, a.big_r, &vs, reps, seed)?;
                for (name, e) in ["plain", "hat", "ext", "int"].iter().zip(&e) {
                    rep.rows.push(Row::est(&format!("coupled-fourarm.beta.{name}"), e));
                }
                rep.bundle = serde_json::to_value(&e)?;
            }
            Experiment::HalfplaneFourarm(a) => {
                let vs = [FourArmVariant::Plain, FourArmVariant::Hat, FourArmVariant::Ext, FourArmVariant::Int];
                let mut ratio = Series::new("hat beta / alpha4");
                let mut all = Vec::new();
                for &big_r in &a.big_r {
                    let specs: Vec<EventSpec> = vs.iter().map(|v| v.spec(a.r, big_r)).collect();
                    let roi = Window::square([0.0, 0.0], big_r);
                    let s = rng::derive_seed(seed, &[big_r.to_bits()]);
                    let c = estimate_coupled(&specs, Resample::UpperHalfPlane, roi, reps, s)?;
                    for (name, e) in ["plain", "hat", "ext", "int"].iter().zip(&c.pair) {
                        rep.rows.push(Row::est(&format!("halfplane-fourarm.beta.{name}"), e));
                    }
                    let a4 = &c.single[0];
                    rep.rows.push(Row::est("halfplane-fourarm.alpha4", a4));
                    let (r, se) = ratio_se(&c.pair[1], a4);
                    let p = json!({ "r": a.r, "R": big_r });
                    rep.rows.push(Row::new("halfplane-fourarm.ratio", p, r, se, a4.n_effective, a4.n_discarded, s));
                    ratio.push(big_r / a.r, r, se);
                    all.push(c);
                }
                rep.plot(Plot::errors("half-plane resampling", "R/r", "ratio", true, false, vec![ratio]));
                rep.bundle = serde_json::to_value(&all)?;
            }
            Experiment::Noise(a) => {
                let c = estimate_noise_covariance(
                    a.dynamics.params(),
                    a.n,
                    &a.t,
                    reps,
                    Replicas::fixed(a.alpha4_replicas),
                    seed,
                )?;
                let mut s = Series::new(&format!("n={}", a.n));
                for row in &c.rows {
                    let p = json!({ "n": a.n, "t": row.t, "regime": row.regime, "corr": row.corr, "dynamics": c.dynamics });
                    rep.rows.push(Row::new("noise.cov", p, row.cov, row.stderr, c.n_effective, c.n_discarded, seed));
                    s.push(row.t, row.cov, row.stderr);
                }
                let var = json!({ "n": a.n });
                rep.rows.push(Row::new("noise.variance", var, c.variance, 0.0, c.n_effective, c.n_discarded, seed));
                rep.rows.push(Row::est("noise.quenched_variance", &c.quenched_var));
                rep.rows.push(Row::est("noise.alpha4", &c.alpha4));
                rep.plot(Plot::errors("noise covariance", "t", "cov", true, false, vec![s]));
                rep.bundle = serde_json::to_value(&c)?;
            }
            Experiment::PivotalSum(a) => {
                let p = estimate_pivotal_sum(a.n, reps, a.m, Replicas::fixed(a.alpha4_replicas), seed)?;
                rep.rows.push(Row::est("pivotal-sum.sum", &p.sum));
                rep.rows.push(Row::est("pivotal-sum.upper", &p.upper));
                rep.rows.push(Row::est("pivotal-sum.alpha4", &p.alpha4));
                let params = json!({ "n": a.n, "boxes": p.boxes });
                rep.rows.push(Row::new("pivotal-sum.ratio", params, p.ratio, p.ratio_stderr, p.sum.n_effective, p.sum.n_discarded, seed));
                rep.bundle = serde_json::to_value(&p)?;
            }
            Experiment::XrMoments(a) => {
                let rows = estimate_xr_moments(a.dynamics.params(), &a.big_r, reps, a.alpha1_replicas, a.resolution, seed)?;
                let mut m = Series::new("E[X_R]");
                let mut al = Series::new("alpha1(R)");
                let mut ra = Series::new("E[X_R^2]/E[X_R]^2");
                for r in &rows {
                    rep.rows.push(Row::est("xr-moments.mean", &r.mean));
                    rep.rows.push(Row::est("xr-moments.second", &r.second));
                    rep.rows.push(Row::est("xr-moments.alpha1", &r.alpha1));
                    let se = 0.5 * (r.ratio_ci.1 - r.ratio_ci.0) / 1.96;
                    let p = json!({ "R": r.big_r, "ci": r.ratio_ci });
                    rep.rows.push(Row::new("xr-moments.ratio", p, r.ratio, se, r.mean.n_effective, r.mean.n_discarded, seed));
                    m.push(r.big_r, r.mean.value, r.mean.stderr);
                    al.push(r.big_r, r.alpha1.value, r.alpha1.stderr);
                    ra.push(r.big_r, r.ratio, se);
                }
                rep.plot(Plot::errors("X_R first moment", "R", "probability", true, true, vec![m, al]));
                rep.plot(Plot::errors("X_R moment ratio", "R", "ratio", true, false, vec![ra]));
                rep.bundle = serde_json::to_value(&rows)?;
            }
            Experiment::SpectralTabulate(a) => {
                let spec = a.event.spec();
                let tab = tabulate_event(&spec, seed, a.event.cap, 64).map_err(bad)?;
                let st = fourier_transform(&tab.table);
                let p = json!({ "event": spec, "m": st.m(), "rejections": tab.rejections });
                rep.rows.push(Row::exact("spectral-tabulate.m", p.clone(), st.m() as f64, 1, seed));
                rep.rows.push(Row::exact("spectral-tabulate.mean", p.clone(), tab.table.mean(), 1, seed));
                rep.rows.push(Row::exact("spectral-tabulate.energy", p.clone(), st.energy(), 1, seed));
                let mut s = Series::new("level weight");
                for (k, w) in st.level_weights().into_iter().enumerate() {
                    rep.rows.push(Row::exact("spectral-tabulate.level", json!({ "k": k }), w, 1, seed));
                    s.push(k as f64, w, 0.0);
                }
                rep.plot(Plot::errors("spectral level weights", "|S|", "weight", false, false, vec![s]));
                let mut dump = Vec::new();
                st.dump(&mut dump, &serde_json::to_string(&spec)?)?;
                rep.files.push(("spectrum.bin".into(), dump));
                rep.bundle = json!({ "event": spec, "points": tab.table.points, "values": tab.table.values, "coef": st.coef });
            }
            Experiment::SpectralSample(a) => {
                let spec = a.event.spec();
                let cap = a.event.cap;
                let (hist, law) = if a.quenched {
                    let tab = tabulate_event(&spec, seed, cap, 64).map_err(bad)?;
                    let st = fourier_transform(&tab.table);
                    let sampler = QuenchedSampler::new(&st).map_err(bad)?;
                    let sizes: Vec<usize> = vorperc::estimators::par_map(reps, |i| {
                        sampler.draw(&mut rng::stream(seed, rng::tag::SPECTRAL, i as u64)).count_ones() as usize
                    });
                    let mut h = vec![0u64; cap + 1];
                    for s in sizes {
                        h[s] += 1;
                    }
                    let e = st.energy();
                    let mut w = st.level_weights();
                    w.resize(cap + 1, 0.0);
                    (h, w.into_iter().map(|x| (x / e, 0.0)).collect::<Vec<_>>())
                } else {
                    let h = annealed_size_histogram(&spec, reps, seed, cap, 10_000).map_err(bad)?;
                    let law = annealed_level_law(&spec, a.law_replicas, rng::derive_seed(seed, &[0x1a]), cap).map_err(bad)?;
                    (h, law.into_iter().map(|r| (r.value, r.stderr)).collect())
                };
                let mut sh = Series::new("sampled");
                let mut sl = Series::new("enumerated");
                for (k, (&c, &(v, se))) in hist.iter().zip(&law).enumerate() {
                    let f = c as f64 / reps as f64;
                    let p = json!({ "event": spec, "k": k, "quenched": a.quenched });
                    rep.rows.push(Row::new("spectral-sample.freq", p.clone(), f, (f * (1.0 - f) / reps as f64).sqrt(), reps as u64, 0, seed));
                    rep.rows.push(Row::new("spectral-sample.law", p, v, se, a.law_replicas as u64, 0, seed));
                    sh.push(k as f64, f, (f * (1.0 - f) / reps as f64).sqrt());
                    sl.push(k as f64, v, se);
                }
                rep.plot(Plot::errors("spectral sample size", "|S|", "probability", false, true, vec![sh, sl]));
                rep.bundle = json!({ "histogram": hist, "law": law });
            }
            Experiment::CovIdentity(a) => {
                let spec = a.event.spec();
                let mut worst = vec![0.0f64; a.t.len()];
                let mut sums = vec![(0.0, 0.0); a.t.len()];
                let per: Vec<_> = vorperc::estimators::par_map(reps, |i| {
                    let tab = tabulate_event(&spec, rng::replica_seed(seed, i as u64), a.event.cap, 64)?;
                    check_cov_identity(&tab.table, &a.t)
                });
                for rows in per {
                    for (k, r) in rows.map_err(bad)?.into_iter().enumerate() {
                        worst[k] = worst[k].max((r.spectral - r.dynamics).abs());
                        sums[k].0 += r.spectral;
                        sums[k].1 += r.dynamics;
                    }
                }
                let mut s = Series::new("mean spectral side");
                for (k, &t) in a.t.iter().enumerate() {
                    let p = json!({ "event": spec, "t": t });
                    rep.rows.push(Row::exact("cov-identity.max_abs_diff", p.clone(), worst[k], reps as u64, seed));
                    rep.rows.push(Row::exact("cov-identity.spectral_mean", p, sums[k].0 / reps as f64, reps as u64, seed));
                    s.push(t, sums[k].0 / reps as f64, 0.0);
                }
                rep.plot(Plot::errors("quenched noise correlation", "t", "E[h(0)h(t)]", false, false, vec![s]));
                rep.bundle = json!({ "max_abs_diff": worst });
            }
            Experiment::SpectralPivotal(a) => {
                let spec = a.event.spec();
                let support = spec.support().unwrap();
                let per: Vec<_> = vorperc::estimators::par_map(reps, |i| {
                    let tab = tabulate_event(&spec, rng::replica_seed(seed, i as u64), a.event.cap, 64)?;
                    let t = &tab.table;
                    let m = t.m();
                    let mut gs: Vec<usize> = (0..m).map(|i| 1 << i).collect();
                    for x in (support.x0.floor() as i64)..(support.x1.ceil() as i64) {
                        for y in (support.y0.floor() as i64)..(support.y1.ceil() as i64) {
                            let b = Window::new(x as f64, x as f64 + 1.0, y as f64, y as f64 + 1.0).unwrap();
                            gs.push(mask_of(&tab.tess, t, &b));
                        }
                    }
                    let mut r = rng::stream(seed, rng::tag::MISC, i as u64);
                    gs.extend((0..a.random_sets).map(|_| r.random_range(0..1usize << m)));
                    let mut slack = f64::INFINITY;
                    for &g in &gs {
                        slack = slack.min(check_spectral_pivotal_bounds(t, g).slack);
                    }
                    let marg = fourier_transform(t).marginals();
                    let piv = t.pivotal_probabilities();
                    let merr = marg.iter().zip(&piv).map(|(a, b)| (a - b / 4.0).abs()).fold(0.0, f64::max);
                    Ok::<_, vorperc::spectral::SpectralError>((slack, gs.len(), merr))
                });
                let (mut slack, mut sets, mut merr, mut viol) = (f64::INFINITY, 0usize, 0.0f64, 0u64);
                for x in per {
                    let (s, n, e) = x.map_err(bad)?;
                    slack = slack.min(s);
                    sets += n;
                    merr = merr.max(e);
                    viol += (s < -1e-12) as u64;
                }
                let p = json!({ "event": spec, "sets": sets });
                rep.rows.push(Row::exact("spectral-pivotal.violations", p.clone(), viol as f64, reps as u64, seed));
                rep.rows.push(Row::exact("spectral-pivotal.min_slack", p.clone(), slack, reps as u64, seed));
                rep.rows.push(Row::exact("spectral-pivotal.marginal_error", p, merr, reps as u64, seed));
                rep.bundle = json!({ "violations": viol, "min_slack": slack, "marginal_error": merr });
            }
            Experiment::LowerTail(a) => {
                let spec = a.event.spec();
                let lt = lower_tail_profile(&spec, &a.k, reps, seed, a.event.cap).map_err(bad)?;
                let mut s = Series::new("P[0<|S|<=k]");
                let p = json!({ "event": spec, "k": 0 });
                rep.rows.push(Row::new("lower-tail.empty", p, lt.empty.value, lt.empty.stderr, reps as u64, 0, seed));
                for r in &lt.rows {
                    let p = json!({ "event": spec, "k": r.k });
                    rep.rows.push(Row::new("lower-tail.p", p, r.value, r.stderr, reps as u64, 0, seed));
                    s.push(r.k as f64, r.value, r.stderr);
                }
                rep.plot(Plot::errors("spectral lower tail", "k", "probability", false, false, vec![s]));
                rep.bundle = serde_json::to_value(&lt)?;
            }
            Experiment::LevyTail(a) => {
                let t = tail_check(a.mover.mover(), &a.t, &a.l, reps, seed)?;
                let mut series = Vec::new();
                for &tt in &a.t {
                    let mut s = Series::new(&format!("t={tt}"));
                    for c in t.cells.iter().filter(|c| c.t == tt) {
                        let p = json!({ "mover": t.mover, "t": c.t, "L": c.l });
                        rep.rows.push(Row::new("levy-tail.p", p, c.p_hat, c.stderr, reps as u64, 0, seed));
                        s.push(c.l, c.p_hat, c.stderr);
                    }
                    series.push(s);
                }
                let p = json!({ "mover": t.mover, "alpha": t.alpha });
                rep.rows.push(Row::new("levy-tail.slope", p.clone(), t.slope, t.slope_stderr, reps as u64, 0, seed));
                rep.rows.push(Row::exact("levy-tail.c_hat", p.clone(), t.c_hat, reps as u64, seed));
                rep.rows.push(Row::exact("levy-tail.holds", p, t.holds as u8 as f64, reps as u64, seed));
                rep.plot(Plot::errors("increment tails", "L", "P[|X_t| >= L]", true, true, series));
                rep.bundle = serde_json::to_value(&t)?;
            }
            Experiment::Metric(a) => {
                let w = padded_window(&Window::square([0.0, 0.0], a.r_max), 1.0, 1e-9);
                let per: Vec<(f64, f64, f64, f64)> = vorperc::estimators::par_map(reps, |i| {
                    let s = rng::replica_seed(seed, i as u64);
                    let mut r = rng::stream(s, rng::tag::MISC, 0);
                    let pts = sample_poisson(w, 1.0, s).points;
                    let cols = random_colors(pts.len(), 0.5, &mut r);
                    let x: Vec<_> = pts.iter().copied().zip(cols.iter().copied()).collect();
                    let y: Vec<_> = x
                        .iter()
                        .map(|&(p, c)| ([p[0] + a.delta * r.random_range(-1.0..1.0), p[1] + a.delta * r.random_range(-1.0..1.0)], c))
                        .collect();
                    let other = sample_poisson(w, 1.0, s ^ 0x5eed).points;
                    let oc = random_colors(other.len(), 0.5, &mut r);
                    let z: Vec<_> = other.into_iter().zip(oc).collect();
                    let d_self = metric_of_points(&x, &x, a.r_max, a.grid).d;
                    let xy = metric_of_points(&x, &y, a.r_max, a.grid).d;
                    let xz = metric_of_points(&x, &z, a.r_max, a.grid).d;
                    let zx = metric_of_points(&z, &x, a.r_max, a.grid).d;
                    (d_self, xy, xz, (xz - zx).abs())
                });
                let p = json!({ "r_max": a.r_max, "grid": a.grid, "delta": a.delta });
                let col = |k: usize| -> Vec<Option<f64>> {
                    per.iter().map(|v| Some([v.0, v.1, v.2, v.3][k])).collect()
                };
                let max = |k: usize| col(k).into_iter().flatten().fold(0.0, f64::max);
                rep.rows.push(Row::exact("metric.self_max", p.clone(), max(0), reps as u64, seed));
                rep.rows.push(Row::est("metric.perturbed", &McEstimate::from_samples(&col(1), seed, p.clone())));
                rep.rows.push(Row::est("metric.independent", &McEstimate::from_samples(&col(2), seed, p.clone())));
                rep.rows.push(Row::exact("metric.asymmetry_max", p, max(3), reps as u64, seed));
                let mut s = Series::new("numeric - closed form");
                for k in 1..=10 {
                    let eps = k as f64 / 10.0;
                    let num = metric_of_points(&[([0.0, 0.0], 1)], &[([eps, 0.0], 1)], 30.0, 50).d;
                    let want = 0.5 * (1.0 - (-eps).exp()) + (-eps).exp() * eps / (1.0 + eps);
                    rep.rows.push(Row::exact("metric.one_point_error", json!({ "eps": eps }), num - want, 1, seed));
                    s.push(eps, num - want, 0.0);
                }
                rep.plot(Plot::errors("one-point metric", "eps", "error", false, false, vec![s]));
                rep.bundle = json!({ "pairs": per.len() });
            }
            Experiment::Suite(a) => {
                let names: Vec<&str> = if a.experiments.is_empty() {
                    Self::NAMES.iter().copied().filter(|&n| n != "suite").collect()
                } else {
                    a.experiments.iter().map(String::as_str).collect()
                };
                let mut bundle = serde_json::Map::new();
                for name in names {
                    let e = Self::default_of(name).expect("registered experiment").scaled(a.scale);
                    let replicas = ((e.default_replicas() as f64 * a.scale).ceil() as usize).max(1);
                    let t0 = std::time::Instant::now();
                    let mut sub = e.run(&Ctx { seed, replicas })?;
                    sub.timing = vec![(String::new(), t0.elapsed().as_secs_f64())];
                    rep.absorb(name, sub, &mut bundle);
                }
                rep.bundle = Value::Object(bundle);
            }
        }
        Ok(rep)
    }
}

fn ratio_se(num: &McEstimate, den: &McEstimate) -> (f64, f64) {
    let r = num.value / den.value;
    let rel = ((num.stderr / num.value).powi(2) + (den.stderr / den.value).powi(2)).sqrt();
    (r, if r > 0.0 { r * rel } else { 0.0 })
}

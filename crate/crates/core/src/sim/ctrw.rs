//! Continuous-time random walk ground-truth paths: heavy-tailed waits at a
//! location alternate with straight constant-speed jumps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::power_law::TruncatedPowerLaw;
use crate::error::{Error, Result};
use crate::geo::Planar;
use crate::trajectory::MobilityParams;

/// Generator configuration. Times in seconds, lengths in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct CtrwConfig {
    pub wait_exponent: f64,
    pub wait_min: f64,
    pub wait_max: f64,
    pub jump_exponent: f64,
    pub jump_min: f64,
    pub jump_max: f64,
    pub speed: f64,
    pub jitter_radius: f64,
    /// Radius of the disk around the plane origin the walk starts in.
    pub start_spread: f64,
    pub seed: u64,
    pub duration: f64,
    /// Require `wait_min >= delta_t`, `jump_min >= delta_s` and
    /// `jitter_radius < delta_s / 2`. Off only for stress tests.
    pub enforce_truncation: bool,
}

impl Default for CtrwConfig {
    fn default() -> Self {
        Self {
            wait_exponent: 1.8,
            wait_min: 1800.0,
            wait_max: 86_400.0,
            jump_exponent: 1.75,
            jump_min: 1600.0,
            jump_max: 50_000.0,
            speed: 10.0,
            jitter_radius: 250.0,
            start_spread: 10_000.0,
            seed: 0,
            duration: 7.0 * 86_400.0,
            enforce_truncation: true,
        }
    }
}

impl CtrwConfig {
    pub fn wait_law(&self) -> Result<TruncatedPowerLaw> {
        TruncatedPowerLaw::new(self.wait_exponent, self.wait_min, self.wait_max)
    }

    pub fn jump_law(&self) -> Result<TruncatedPowerLaw> {
        TruncatedPowerLaw::new(self.jump_exponent, self.jump_min, self.jump_max)
    }

    /// Check the configuration, including the truncation minima against
    /// `params` when enforcement is on.
    pub fn validate(&self, params: &MobilityParams) -> Result<()> {
        self.wait_law()?;
        self.jump_law()?;
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.speed.is_finite() && self.speed > 0.0) {
            return bad(format!("speed must be > 0, got {}", self.speed));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return bad(format!("duration must be > 0, got {}", self.duration));
        }
        if !(self.jitter_radius.is_finite() && self.jitter_radius >= 0.0) {
            return bad(format!("jitter radius must be >= 0, got {}", self.jitter_radius));
        }
        if !(self.start_spread.is_finite() && self.start_spread >= 0.0) {
            return bad(format!("start spread must be >= 0, got {}", self.start_spread));
        }
        if self.enforce_truncation {
            if self.wait_min < params.delta_t as f64 {
                return bad(format!("wait_min {} below delta_t {}", self.wait_min, params.delta_t));
            }
            if self.jump_min < params.delta_s {
                return bad(format!("jump_min {} below delta_s {}", self.jump_min, params.delta_s));
            }
            if self.jitter_radius >= params.delta_s / 2.0 {
                return bad(format!(
                    "jitter radius {} not below delta_s / 2 = {}",
                    self.jitter_radius,
                    params.delta_s / 2.0
                ));
            }
        }
        Ok(())
    }
}

/// A stay at `center` over `[start, end]`. `waypoints` are the jittered
/// positions the path visits at observation times strictly inside the stay.
#[derive(Debug, Clone, PartialEq)]
pub struct StayPeriod {
    pub center: Planar,
    pub start: f64,
    pub end: f64,
    pub waypoints: Vec<(f64, Planar)>,
}

impl StayPeriod {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    pub fn contains(&self, t: f64) -> bool {
        self.start <= t && t <= self.end
    }

    /// Largest distance of any waypoint from the center.
    pub fn radius(&self) -> f64 {
        self.waypoints
            .iter()
            .map(|&(_, p)| p.distance(self.center))
            .fold(0.0, f64::max)
    }
}

/// A straight leg from `from` to `to` at constant `speed` over `[start, end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TravelLeg {
    pub from: Planar,
    pub to: Planar,
    pub start: f64,
    pub end: f64,
    pub speed: f64,
}

impl TravelLeg {
    pub fn length(&self) -> f64 {
        self.from.distance(self.to)
    }

    pub fn position(&self, t: f64) -> Planar {
        let span = self.end - self.start;
        if span <= 0.0 {
            return self.to;
        }
        self.from.lerp(self.to, ((t - self.start) / span).clamp(0.0, 1.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Phase {
    Stay(StayPeriod),
    Travel(TravelLeg),
}

impl Phase {
    pub fn start(&self) -> f64 {
        match self {
            Phase::Stay(s) => s.start,
            Phase::Travel(l) => l.start,
        }
    }

    pub fn end(&self) -> f64 {
        match self {
            Phase::Stay(s) => s.end,
            Phase::Travel(l) => l.end,
        }
    }
}

/// Alternating stays and legs tiling `[0, duration]`, starting with a stay.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthPath {
    phases: Vec<Phase>,
    duration: f64,
}

impl GroundTruthPath {
    /// Assemble a path from explicit phases; they must alternate starting with
    /// a stay, abut exactly, and cover `[0, duration]`.
    pub fn from_phases(phases: Vec<Phase>) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("path: {msg}")));
        let Some(first) = phases.first() else { return bad("no phases") };
        if first.start() != 0.0 {
            return bad("must start at time 0");
        }
        for (k, ph) in phases.iter().enumerate() {
            let stay_slot = k % 2 == 0;
            if stay_slot != matches!(ph, Phase::Stay(_)) {
                return bad("stays and legs must alternate, starting with a stay");
            }
            if ph.end().partial_cmp(&ph.start()) != Some(std::cmp::Ordering::Greater) {
                return bad("every phase needs positive length");
            }
            if k > 0 && phases[k - 1].end() != ph.start() {
                return bad("phases must abut");
            }
            if let Phase::Stay(s) = ph {
                if s.waypoints.windows(2).any(|w| w[0].0 >= w[1].0)
                    || s.waypoints.iter().any(|&(t, _)| t <= s.start || t >= s.end)
                {
                    return bad("waypoints must be strictly increasing and inside their stay");
                }
            }
        }
        for w in phases.windows(3) {
            if let (Phase::Stay(a), Phase::Travel(l), Phase::Stay(b)) = (&w[0], &w[1], &w[2]) {
                if l.from != a.center || l.to != b.center {
                    return bad("legs must join consecutive stay centers");
                }
            }
        }
        let duration = phases.last().map(Phase::end).unwrap_or(0.0);
        Ok(Self { phases, duration })
    }

    pub fn phases(&self) -> &[Phase] {
        &self.phases
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn stays(&self) -> impl Iterator<Item = &StayPeriod> {
        self.phases.iter().filter_map(|p| match p {
            Phase::Stay(s) => Some(s),
            Phase::Travel(_) => None,
        })
    }

    pub fn legs(&self) -> impl Iterator<Item = &TravelLeg> {
        self.phases.iter().filter_map(|p| match p {
            Phase::Travel(l) => Some(l),
            Phase::Stay(_) => None,
        })
    }

    /// Index of the phase containing `t`; a shared boundary belongs to the later phase.
    pub fn phase_index(&self, t: f64) -> usize {
        self.phases
            .partition_point(|p| p.start() <= t)
            .saturating_sub(1)
    }

    /// The stay containing `t`, boundaries included.
    pub fn stay_at(&self, t: f64) -> Option<&StayPeriod> {
        let k = self.phase_index(t);
        let candidates = [k.checked_sub(1), Some(k)];
        candidates
            .into_iter()
            .flatten()
            .filter_map(|i| match self.phases.get(i) {
                Some(Phase::Stay(s)) if s.contains(t) => Some(s),
                _ => None,
            })
            .next()
    }

    pub(crate) fn phases_mut(&mut self) -> &mut [Phase] {
        &mut self.phases
    }
}

pub(crate) fn uniform_in_disk<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Planar {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    Planar::new(r * theta.cos(), r * theta.sin())
}

/// Generate a path from `config`. Assumes a validated configuration.
pub fn generate_ctrw(config: &CtrwConfig) -> Result<GroundTruthPath> {
    let wait = config.wait_law()?;
    let jump = config.jump_law()?;
    if !(config.speed > 0.0 && config.duration > 0.0) {
        return Err(Error::InvalidParameter("speed and duration must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut pos = uniform_in_disk(&mut rng, config.start_spread);
    let mut t = 0.0;
    let mut phases = Vec::new();
    let end = config.duration;
    loop {
        let stay_end = (t + wait.sample(&mut rng)).min(end);
        phases.push(Phase::Stay(StayPeriod { center: pos, start: t, end: stay_end, waypoints: Vec::new() }));
        t = stay_end;
        if t >= end {
            break;
        }
        let length = jump.sample(&mut rng);
        let theta = std::f64::consts::TAU * rng.random::<f64>();
        let to = Planar::new(pos.x + length * theta.cos(), pos.y + length * theta.sin());
        let leg_end = t + length / config.speed;
        if leg_end >= end {
            let to = pos.lerp(to, (end - t) / (leg_end - t));
            phases.push(Phase::Travel(TravelLeg { from: pos, to, start: t, end, speed: config.speed }));
            break;
        }
        phases.push(Phase::Travel(TravelLeg { from: pos, to, start: t, end: leg_end, speed: config.speed }));
        t = leg_end;
        pos = to;
    }
    Ok(GroundTruthPath { phases, duration: end })
}

//! Policy interface and the builtin scripted drivers.
//!
//! Scripted drivers read a privileged view of the true pose and the track in
//! addition to the observation. Recorded datasets only ever contain the
//! observation, so downstream learners see the same inputs as any other policy.

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::dynamics::{Action, PhysicsConfig, VehicleState};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::rng::SimRng;
use crate::sensing::{Observation, NUM_RAYS};
use crate::track::TrackDef;

/// Ground truth available to scripted drivers.
#[derive(Debug, Clone, Copy)]
pub struct PrivilegedView<'a> {
    pub track: &'a TrackDef,
    pub vehicle: &'a VehicleState,
}

pub trait Policy: Send + Sync {
    fn name(&self) -> &str;

    /// Whether `act` ignores its random stream.
    fn deterministic(&self) -> bool;

    /// Chooses an action; implementations return clamped actions.
    fn act(&self, obs: &Observation, view: &PrivilegedView<'_>, rng: &mut SimRng) -> Action;
}

pub const BUILTIN_POLICIES: [&str; 4] = ["expert", "medium", "basic", "random"];

/// Builds a builtin policy by name for the given track and physics.
pub fn builtin(name: &str, track: &TrackDef, physics: &PhysicsConfig) -> Result<Arc<dyn Policy>> {
    Ok(match name {
        "expert" => Arc::new(PursuitPolicy::new("expert", PursuitConfig::expert(), track, physics)),
        "medium" => Arc::new(PursuitPolicy::new("medium", PursuitConfig::medium(), track, physics)),
        "basic" => Arc::new(BasicPolicy::new(BasicConfig::default(), track)),
        "random" => Arc::new(RandomPolicy),
        other => return Err(Error::UnknownPolicy(other.to_string())),
    })
}

/// Pure-pursuit driver parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PursuitConfig {
    /// Lookahead distance at standstill, m.
    pub lookahead: f64,
    /// Additional lookahead per m/s of speed, s.
    pub lookahead_per_speed: f64,
    /// Lateral shift of the racing line toward the inside of turns, as a
    /// multiple of `curvature * half_width^2`.
    pub corner_cut_gain: f64,
    /// Clearance kept between the racing line and the walls, m.
    pub wall_margin: f64,
    /// Arc-length window used to smooth curvature, m.
    pub smoothing: f64,
    pub target_speed_straight: f64,
    /// Corner speed is `cornering_speed_gain * sqrt(radius)`.
    pub cornering_speed_gain: f64,
    /// Deceleration assumed when planning braking before corners, m/s^2.
    /// Zero disables anticipation.
    pub planned_braking: f64,
    /// Throttle per m/s of speed error.
    pub speed_gain: f64,
    /// Standard deviation of Gaussian noise added to both action components.
    pub action_noise_sigma: f64,
}

impl PursuitConfig {
    pub fn expert() -> Self {
        Self {
            lookahead: 4.0,
            lookahead_per_speed: 0.25,
            corner_cut_gain: 1.2,
            wall_margin: 2.2,
            smoothing: 6.0,
            target_speed_straight: 36.0,
            cornering_speed_gain: 6.6,
            planned_braking: 22.0,
            speed_gain: 0.5,
            action_noise_sigma: 0.0,
        }
    }

    pub fn medium() -> Self {
        Self {
            lookahead: 2.5,
            lookahead_per_speed: 0.12,
            corner_cut_gain: 2.0,
            wall_margin: 0.2,
            smoothing: 3.0,
            target_speed_straight: 18.0,
            cornering_speed_gain: 7.0,
            planned_braking: 8.0,
            speed_gain: 0.3,
            action_noise_sigma: 0.3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lookahead.is_finite() || self.lookahead <= 0.0 {
            return Err(Error::Config("lookahead must be positive".into()));
        }
        if !self.action_noise_sigma.is_finite() || self.action_noise_sigma < 0.0 {
            return Err(Error::Config("action_noise_sigma must be >= 0".into()));
        }
        Ok(())
    }
}

/// Closed reference path indexed by centerline arc length.
#[derive(Debug, Clone)]
pub struct RacingLine {
    /// Centerline arc length of each station.
    pub s: Vec<f64>,
    pub points: Vec<Vec2>,
    /// Speed limit at each station, m/s.
    pub speed: Vec<f64>,
    length: f64,
}

fn smooth_cyclic(values: &[f64], s: &[f64], length: f64, window: f64) -> Vec<f64> {
    if window <= 0.0 {
        return values.to_vec();
    }
    let n = values.len();
    (0..n)
        .map(|i| {
            let (mut acc, mut wsum) = (0.0, 0.0);
            for j in 0..n {
                let mut d = (s[j] - s[i]).abs();
                d = d.min(length - d);
                if d <= 2.0 * window {
                    let w = (-0.5 * (d / window).powi(2)).exp();
                    acc += w * values[j];
                    wsum += w;
                }
            }
            acc / wsum
        })
        .collect()
}

/// Signed curvature at each vertex of a closed polyline (left turns positive).
fn vertex_curvature(points: &[Vec2]) -> Vec<f64> {
    let n = points.len();
    (0..n)
        .map(|i| {
            let a = points[(i + n - 1) % n];
            let b = points[i];
            let c = points[(i + 1) % n];
            let e0 = b - a;
            let e1 = c - b;
            let turn = e0.cross(e1).atan2(e0.dot(e1));
            turn / (0.5 * (e0.length() + e1.length()))
        })
        .collect()
}

impl RacingLine {
    pub fn new(track: &TrackDef, cfg: &PursuitConfig, physics: &PhysicsConfig) -> Self {
        let n = track.centerline.len();
        let s = track.cum_arc.clone();
        let length = track.total_length;
        let kappa = smooth_cyclic(&vertex_curvature(&track.centerline), &s, length, cfg.smoothing);
        let max_offset = (track.half_width - physics.car_radius - cfg.wall_margin).max(0.0);
        let hw2 = track.half_width * track.half_width;
        let offsets: Vec<f64> = kappa
            .iter()
            .map(|k| (cfg.corner_cut_gain * k * hw2).clamp(-max_offset, max_offset))
            .collect();
        let offsets = smooth_cyclic(&offsets, &s, length, cfg.smoothing);
        let points: Vec<Vec2> = (0..n)
            .map(|i| {
                let t_prev = track.segment_direction((i + n - 1) % n);
                let t_next = track.segment_direction(i);
                let normal = (t_prev + t_next).normalized().perp();
                track.centerline[i] + normal * offsets[i]
            })
            .collect();

        let line_kappa = smooth_cyclic(&vertex_curvature(&points), &s, length, 0.5 * cfg.smoothing);
        let mut speed: Vec<f64> = line_kappa
            .iter()
            .map(|k| {
                let corner = cfg.cornering_speed_gain / k.abs().max(1e-9).sqrt();
                corner.min(cfg.target_speed_straight)
            })
            .collect();
        if cfg.planned_braking > 0.0 {
            // Backward passes around the loop: arrive at every station slow enough.
            for _ in 0..2 {
                for i in (0..n).rev() {
                    let next = (i + 1) % n;
                    let ds = track.segment_length(i);
                    let reachable = (speed[next].powi(2) + 2.0 * cfg.planned_braking * ds).sqrt();
                    speed[i] = speed[i].min(reachable);
                }
            }
        }
        Self {
            s,
            points,
            speed,
            length,
        }
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let s = s.rem_euclid(self.length);
        let i = match self.s.binary_search_by(|v| v.total_cmp(&s)) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let next_s = if i + 1 == self.s.len() { self.length } else { self.s[i + 1] };
        let f = ((s - self.s[i]) / (next_s - self.s[i])).clamp(0.0, 1.0);
        (i, f)
    }

    pub fn point_at(&self, s: f64) -> Vec2 {
        let (i, f) = self.locate(s);
        let a = self.points[i];
        let b = self.points[(i + 1) % self.points.len()];
        a + (b - a) * f
    }

    pub fn speed_at(&self, s: f64) -> f64 {
        let (i, f) = self.locate(s);
        let a = self.speed[i];
        let b = self.speed[(i + 1) % self.speed.len()];
        a + (b - a) * f
    }
}

/// Steering command that points the car at `target`, pure-pursuit style.
fn pursuit_steer(vehicle: &VehicleState, target: Vec2, physics: &PhysicsConfig) -> f64 {
    let d = target - vehicle.position;
    let h = vehicle.heading_vector();
    let local_x = d.dot(h);
    let local_y = h.cross(d);
    let dist2 = local_x * local_x + local_y * local_y;
    if dist2 <= 1e-12 {
        return 0.0;
    }
    // Path curvature through the target, left positive.
    let curvature = 2.0 * local_y / dist2;
    let wheel = (curvature * physics.wheelbase).atan();
    // Positive steer turns right.
    -wheel / physics.steer_max
}

/// Pure pursuit over a [`RacingLine`] with a curvature-derived speed profile.
#[derive(Debug, Clone)]
pub struct PursuitPolicy {
    name: String,
    cfg: PursuitConfig,
    line: RacingLine,
    physics: PhysicsConfig,
    noise: Option<Normal<f64>>,
}

impl PursuitPolicy {
    pub fn new(name: &str, cfg: PursuitConfig, track: &TrackDef, physics: &PhysicsConfig) -> Self {
        let line = RacingLine::new(track, &cfg, physics);
        let noise = (cfg.action_noise_sigma > 0.0)
            .then(|| Normal::new(0.0, cfg.action_noise_sigma).expect("finite sigma"));
        Self {
            name: name.to_string(),
            cfg,
            line,
            physics: *physics,
            noise,
        }
    }

    pub fn config(&self) -> &PursuitConfig {
        &self.cfg
    }

    pub fn racing_line(&self) -> &RacingLine {
        &self.line
    }
}

impl Policy for PursuitPolicy {
    fn name(&self) -> &str {
        &self.name
    }

    fn deterministic(&self) -> bool {
        self.noise.is_none()
    }

    fn act(&self, _obs: &Observation, view: &PrivilegedView<'_>, rng: &mut SimRng) -> Action {
        let v = view.vehicle;
        let s = view.track.project(v.position).s;
        let lookahead = self.cfg.lookahead + self.cfg.lookahead_per_speed * v.speed.max(0.0);
        let target = self.line.point_at(s + lookahead);
        let steer = pursuit_steer(v, target, &self.physics);
        // Plan on the speed needed a short distance ahead.
        let v_target = self.line.speed_at(s + 0.5 * lookahead);
        let throttle = self.cfg.speed_gain * (v_target - v.speed);
        let mut a = Action { steer, throttle };
        if let Some(noise) = &self.noise {
            a.steer += noise.sample(rng);
            a.throttle += noise.sample(rng);
        }
        a.clamped()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasicConfig {
    /// Proportional gain on heading error to the centerline tangent.
    pub steer_gain: f64,
    /// Proportional gain on lateral offset, per metre.
    pub lateral_gain: f64,
    pub steer_noise_sigma: f64,
    pub throttle_noise_sigma: f64,
    /// Normalized front-ray distance below which the driver panics and brakes.
    pub panic_distance: f64,
    /// Panic braking only happens above this speed, m/s.
    pub panic_speed: f64,
    /// Normalized front distance under which a slow driver gives up and idles.
    pub stall_distance: f64,
}

impl Default for BasicConfig {
    fn default() -> Self {
        Self {
            steer_gain: 0.35,
            lateral_gain: 0.04,
            steer_noise_sigma: 0.25,
            throttle_noise_sigma: 0.05,
            panic_distance: 0.4,
            panic_speed: 3.0,
            stall_distance: 0.06,
        }
    }
}

/// Full-throttle driver with weak, noisy steering. Brakes in a panic when a
/// wall fills the windscreen and then sits still.
#[derive(Debug, Clone)]
pub struct BasicPolicy {
    cfg: BasicConfig,
}

impl BasicPolicy {
    pub fn new(cfg: BasicConfig, _track: &TrackDef) -> Self {
        Self { cfg }
    }
}

impl Policy for BasicPolicy {
    fn name(&self) -> &str {
        "basic"
    }

    fn deterministic(&self) -> bool {
        false
    }

    fn act(&self, obs: &Observation, view: &PrivilegedView<'_>, rng: &mut SimRng) -> Action {
        let v = view.vehicle;
        let proj = view.track.project(v.position);
        let heading_err = crate::geom::wrap_angle(v.heading - proj.tangent.angle());
        // Right steer is positive; a left-pointing error (positive) needs right steer.
        let steer = self.cfg.steer_gain * heading_err + self.cfg.lateral_gain * proj.lateral;
        let steer = steer + self.cfg.steer_noise_sigma * rng.sample::<f64, _>(rand_distr::StandardNormal);

        let front = obs.ray(NUM_RAYS / 2).distance;
        let throttle = if front < self.cfg.stall_distance && v.speed < self.cfg.panic_speed {
            0.0
        } else if front < self.cfg.panic_distance && v.speed >= self.cfg.panic_speed {
            -1.0
        } else {
            1.0 - self.cfg.throttle_noise_sigma * rng.sample::<f64, _>(rand_distr::StandardNormal).abs()
        };
        Action::new(steer, throttle)
    }
}

/// Uniform random actions.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomPolicy;

impl Policy for RandomPolicy {
    fn name(&self) -> &str {
        "random"
    }

    fn deterministic(&self) -> bool {
        false
    }

    fn act(&self, _obs: &Observation, _view: &PrivilegedView<'_>, rng: &mut SimRng) -> Action {
        Action {
            steer: rng.random_range(-1.0..=1.0),
            throttle: rng.random_range(-1.0..=1.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Env;
    use crate::rng;

    #[test]
    fn unknown_name_is_rejected() {
        let t = TrackDef::canonical();
        assert!(matches!(
            builtin("pro", &t, &PhysicsConfig::default()),
            Err(Error::UnknownPolicy(n)) if n == "pro"
        ));
        for name in BUILTIN_POLICIES {
            assert_eq!(builtin(name, &t, &PhysicsConfig::default()).unwrap().name(), name);
        }
    }

    #[test]
    fn random_actions_are_uniform_and_in_range() {
        let mut env = Env::canonical();
        let obs = env.reset(Some(0));
        let view = PrivilegedView { track: env.track(), vehicle: env.vehicle() };
        let mut r = rng::stream(3, rng::STREAM_POLICY);
        let n = 10_000;
        let (mut ss, mut st) = (0.0, 0.0);
        for _ in 0..n {
            let a = RandomPolicy.act(&obs, &view, &mut r);
            assert!((-1.0..=1.0).contains(&a.steer) && (-1.0..=1.0).contains(&a.throttle));
            ss += a.steer;
            st += a.throttle;
        }
        assert!((ss / n as f64).abs() < 0.03);
        assert!((st / n as f64).abs() < 0.03);
    }

    #[test]
    fn scripted_drivers_are_clamped_and_seed_deterministic() {
        let t = TrackDef::canonical();
        let mut env = Env::canonical();
        for name in ["expert", "medium", "basic"] {
            let p = builtin(name, &t, &PhysicsConfig::default()).unwrap();
            let obs = env.reset(Some(4));
            let view = PrivilegedView { track: env.track(), vehicle: env.vehicle() };
            let a = p.act(&obs, &view, &mut rng::stream(9, rng::STREAM_POLICY));
            let b = p.act(&obs, &view, &mut rng::stream(9, rng::STREAM_POLICY));
            assert_eq!(a, b);
            assert!(a.steer.abs() <= 1.0 && a.throttle.abs() <= 1.0);
        }
        assert!(builtin("expert", &t, &PhysicsConfig::default()).unwrap().deterministic());
    }
}

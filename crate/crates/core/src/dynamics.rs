//! Fixed-timestep kinematic bicycle with wall collision handling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::track::TrackDef;

/// Distance within which a car touching a wall still counts as in contact.
pub const CONTACT_SLOP: f64 = 1e-6;

const MAX_PUSH_ITERATIONS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    /// Timestep, s.
    pub dt: f64,
    /// Forward speed limit, m/s.
    pub v_max: f64,
    /// Reverse speed limit, m/s.
    pub v_rev_max: f64,
    /// Throttle acceleration, m/s^2.
    pub a_max: f64,
    /// Braking deceleration, m/s^2.
    pub b_max: f64,
    /// Linear drag, 1/s.
    pub drag: f64,
    pub wheelbase: f64,
    /// Front wheel angle at full lock, radians.
    pub steer_max: f64,
    /// Radius of the collision disc, m.
    pub car_radius: f64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self {
            dt: 0.02,
            v_max: 40.0,
            v_rev_max: 10.0,
            a_max: 20.0,
            b_max: 30.0,
            drag: 0.1,
            wheelbase: 2.5,
            steer_max: 25f64.to_radians(),
            car_radius: 1.0,
        }
    }
}

impl PhysicsConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("dt", self.dt),
            ("v_max", self.v_max),
            ("v_rev_max", self.v_rev_max),
            ("a_max", self.a_max),
            ("b_max", self.b_max),
            ("drag", self.drag),
            ("wheelbase", self.wheelbase),
            ("steer_max", self.steer_max),
            ("car_radius", self.car_radius),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("physics.{name} must be positive, got {v}")));
            }
        }
        if self.v_rev_max >= self.v_max {
            return Err(Error::Config("physics.v_rev_max must be below v_max".into()));
        }
        Ok(())
    }

    /// Turning radius at full steering lock.
    pub fn min_turn_radius(&self) -> f64 {
        self.wheelbase / self.steer_max.tan()
    }
}

/// Steering and throttle command, each in `[-1, 1]`.
///
/// `steer = -1` is full left, `+1` full right. Negative throttle brakes while
/// moving forward and reverses once stationary.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Action {
    pub steer: f64,
    pub throttle: f64,
}

impl Action {
    pub fn new(steer: f64, throttle: f64) -> Self {
        Self { steer, throttle }.clamped()
    }

    /// Clamps both components; NaN maps to zero.
    pub fn clamped(self) -> Self {
        fn c(v: f64) -> f64 {
            if v.is_nan() {
                0.0
            } else {
                v.clamp(-1.0, 1.0)
            }
        }
        Self {
            steer: c(self.steer),
            throttle: c(self.throttle),
        }
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.steer, self.throttle]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VehicleState {
    pub position: Vec2,
    /// Radians, counter-clockwise from +x.
    pub heading: f64,
    /// World-frame velocity; always `speed` along the heading.
    pub velocity: Vec2,
    /// Signed speed along the heading, negative when reversing.
    pub speed: f64,
    pub in_contact: bool,
    /// Speed at the moment of wall contact this step, 0 without contact.
    pub impact_speed: f64,
}

impl VehicleState {
    pub fn at_rest(position: Vec2, heading: f64) -> Self {
        Self {
            position,
            heading,
            ..Default::default()
        }
    }

    pub fn heading_vector(&self) -> Vec2 {
        Vec2::from_angle(self.heading)
    }
}

/// One semi-implicit Euler step. Contact fields are cleared.
pub fn step_dynamics(state: &VehicleState, action: Action, cfg: &PhysicsConfig) -> VehicleState {
    let throttle = action.throttle;
    let accel = if throttle >= 0.0 || state.speed <= 0.0 {
        cfg.a_max * throttle
    } else {
        cfg.b_max * throttle
    };
    let mut speed = state.speed + accel * cfg.dt;
    speed *= 1.0 - cfg.drag * cfg.dt;
    speed = speed.clamp(-cfg.v_rev_max, cfg.v_max);

    // Positive steer turns right, i.e. clockwise in the y-up world frame.
    let yaw_rate = speed / cfg.wheelbase * (action.steer * cfg.steer_max).tan();
    let heading = state.heading - yaw_rate * cfg.dt;
    let dir = Vec2::from_angle(heading);
    VehicleState {
        position: state.position + dir * (speed * cfg.dt),
        heading,
        velocity: dir * speed,
        speed,
        in_contact: false,
        impact_speed: 0.0,
    }
}

/// Pushes the car disc out of any wall it penetrates and removes the velocity
/// component driving into the wall.
pub fn resolve_collision(state: &VehicleState, track: &TrackDef, cfg: &PhysicsConfig) -> VehicleState {
    let grid = track.wall_grid();
    let r = cfg.car_radius;
    let mut out = *state;
    out.in_contact = false;
    out.impact_speed = 0.0;

    let mut touching = false;
    grid.for_each_near(state.position, r + CONTACT_SLOP, |_, seg| {
        if !touching {
            let (_, _, d2) = seg.closest(state.position);
            touching = d2 < (r + CONTACT_SLOP) * (r + CONTACT_SLOP);
        }
    });
    if !touching {
        return out;
    }
    out.in_contact = true;
    out.impact_speed = state.velocity.length();

    let mut pos = state.position;
    let mut vel = state.velocity;
    for _ in 0..MAX_PUSH_ITERATIONS {
        let mut deepest: Option<(f64, Vec2, usize)> = None;
        grid.for_each_near(pos, r, |i, seg| {
            let (_, q, d2) = seg.closest(pos);
            if d2 < r * r && deepest.is_none_or(|(bd2, _, _)| d2 < bd2) {
                deepest = Some((d2, q, i));
            }
        });
        let Some((d2, q, i)) = deepest else { break };
        let d = d2.sqrt();
        let normal = if d > 0.0 {
            (pos - q) * (1.0 / d)
        } else {
            // Center exactly on the wall line: push toward the corridor.
            let seg = &grid.segments()[i];
            let n = (seg.b - seg.a).perp().normalized();
            let mid = track.project(q).foot;
            if (mid - q).dot(n) >= 0.0 {
                n
            } else {
                -n
            }
        };
        pos = q + normal * r;
        let vn = vel.dot(normal);
        if vn < 0.0 {
            vel = vel - normal * vn;
        }
    }

    let dir = Vec2::from_angle(out.heading);
    let speed = vel.dot(dir);
    out.position = pos;
    out.speed = speed;
    out.velocity = dir * speed;
    out
}

/// Clamps a step whose centre would cross a wall line to just before the
/// crossing. Only needed when the step is long relative to the car radius.
pub fn sweep_guard(prev: Vec2, state: &VehicleState, track: &TrackDef, cfg: &PhysicsConfig) -> VehicleState {
    let disp = state.position - prev;
    let len = disp.length();
    if len <= 0.5 * cfg.car_radius {
        return *state;
    }
    let dir = disp * (1.0 / len);
    match track.wall_grid().raycast(prev, dir, len) {
        Some((t, _)) => {
            let mut s = *state;
            s.position = prev + dir * (t - 1e-6).max(0.0);
            s
        }
        None => *state,
    }
}

/// Dynamics plus collision handling, as applied by the environment each step.
pub fn advance_vehicle(
    state: &VehicleState,
    action: Action,
    track: &TrackDef,
    cfg: &PhysicsConfig,
) -> VehicleState {
    let moved = step_dynamics(state, action, cfg);
    let guarded = sweep_guard(state.position, &moved, track, cfg);
    resolve_collision(&guarded, track, cfg)
}

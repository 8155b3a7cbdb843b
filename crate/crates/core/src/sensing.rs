//! Raycast lidar and observation assembly.
//!
//! Observation layout (33 values):
//!
//! | index      | meaning                                              |
//! |------------|------------------------------------------------------|
//! | `2i`       | ray `i` hit flag, 0 or 1                             |
//! | `2i + 1`   | ray `i` distance / `max_range`, 1.0 on a miss        |
//! | 30, 31, 32 | forward, lateral, vertical velocity in the car frame |
//!
//! Ray 0 points 90 degrees to the left of the heading, ray 14 points 90
//! degrees to the right, spaced 180/14 degrees apart.

use serde::{Deserialize, Serialize};

use crate::dynamics::VehicleState;
use crate::error::{Error, Result};
use crate::geom::{SegmentGrid, Vec2};
use crate::track::TrackDef;

pub const NUM_RAYS: usize = 15;
pub const OBS_DIM: usize = 2 * NUM_RAYS + 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayConfig {
    pub n_rays: usize,
    /// Total field of view, radians.
    pub fov: f64,
    /// Metres; distances are normalized by this.
    pub max_range: f64,
}

impl Default for RayConfig {
    fn default() -> Self {
        Self {
            n_rays: NUM_RAYS,
            fov: std::f64::consts::PI,
            max_range: 50.0,
        }
    }
}

impl RayConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_rays != NUM_RAYS {
            return Err(Error::Config(format!("rays.n_rays must be {NUM_RAYS}, got {}", self.n_rays)));
        }
        if !(self.fov.is_finite() && self.fov > 0.0 && self.fov <= std::f64::consts::TAU) {
            return Err(Error::Config(format!("rays.fov out of range: {}", self.fov)));
        }
        if !(self.max_range.is_finite() && self.max_range > 0.0) {
            return Err(Error::Config(format!("rays.max_range must be positive, got {}", self.max_range)));
        }
        Ok(())
    }

    /// Ray offsets in radians, left to right; negative is to the left.
    pub fn offsets(&self) -> [f64; NUM_RAYS] {
        let step = self.fov / (NUM_RAYS - 1) as f64;
        std::array::from_fn(|i| -0.5 * self.fov + i as f64 * step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub hit: bool,
    /// Normalized distance in `[0, 1]`.
    pub distance: f64,
}

impl RayHit {
    pub const MISS: RayHit = RayHit { hit: false, distance: 1.0 };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub values: [f64; OBS_DIM],
}

impl Default for Observation {
    fn default() -> Self {
        Self { values: [0.0; OBS_DIM] }
    }
}

impl Observation {
    pub fn ray(&self, i: usize) -> RayHit {
        RayHit {
            hit: self.values[2 * i] != 0.0,
            distance: self.values[2 * i + 1],
        }
    }

    pub fn forward_speed(&self) -> f64 {
        self.values[2 * NUM_RAYS]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn to_f32(&self) -> [f32; OBS_DIM] {
        std::array::from_fn(|i| self.values[i] as f32)
    }
}

fn cast(grid: &SegmentGrid, state: &VehicleState, rays: &RayConfig, brute: bool) -> [RayHit; NUM_RAYS] {
    let offsets = rays.offsets();
    std::array::from_fn(|i| {
        // Offsets are clockwise-positive, matching the steering convention.
        let dir = Vec2::from_angle(state.heading - offsets[i]);
        let hit = if brute {
            grid.raycast_brute(state.position, dir, rays.max_range)
        } else {
            grid.raycast(state.position, dir, rays.max_range)
        };
        match hit {
            Some((t, _)) => RayHit {
                hit: true,
                distance: (t / rays.max_range).clamp(0.0, 1.0),
            },
            None => RayHit::MISS,
        }
    })
}

/// Casts the lidar fan against both walls.
pub fn cast_rays(state: &VehicleState, track: &TrackDef, rays: &RayConfig) -> [RayHit; NUM_RAYS] {
    cast(track.wall_grid(), state, rays, false)
}

/// [`cast_rays`] testing every wall segment.
pub fn cast_rays_brute(state: &VehicleState, track: &TrackDef, rays: &RayConfig) -> [RayHit; NUM_RAYS] {
    cast(track.wall_grid(), state, rays, true)
}

pub fn assemble_observation(state: &VehicleState, hits: &[RayHit; NUM_RAYS]) -> Observation {
    let mut values = [0.0; OBS_DIM];
    for (i, h) in hits.iter().enumerate() {
        values[2 * i] = if h.hit { 1.0 } else { 0.0 };
        values[2 * i + 1] = h.distance;
    }
    // Kinematic model: velocity is always along the heading.
    values[2 * NUM_RAYS] = state.speed;
    values[2 * NUM_RAYS + 1] = 0.0;
    values[2 * NUM_RAYS + 2] = 0.0;
    Observation { values }
}

pub fn observe(state: &VehicleState, track: &TrackDef, rays: &RayConfig) -> Observation {
    assemble_observation(state, &cast_rays(state, track, rays))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::track::{StartAreaSpec, TrackFile};

    fn long_box() -> TrackDef {
        TrackDef::from_file(TrackFile {
            version: "1".into(),
            name: "box".into(),
            half_width: 6.0,
            start_area: StartAreaSpec {
                center: [200.0, 0.0],
                size_m: 8.0,
                heading_offset_deg_range: [-30.0, 30.0],
            },
            centerline: vec![[0.0, 0.0], [400.0, 0.0], [400.0, 300.0], [0.0, 300.0]],
        })
        .unwrap()
    }

    #[test]
    fn offsets_span_field_of_view_symmetrically() {
        let o = RayConfig::default().offsets();
        assert_eq!(o.len(), 15);
        assert!((o[0] + std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((o[14] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        for i in 0..15 {
            assert!((o[i] + o[14 - i]).abs() < 1e-15);
        }
        assert!((o[1] - o[0] - (180f64 / 14.0).to_radians()).abs() < 1e-15);
    }

    #[test]
    fn side_rays_measure_half_width() {
        let t = long_box();
        let s = VehicleState::at_rest(Vec2::new(200.0, 0.0), 0.0);
        let hits = cast_rays(&s, &t, &RayConfig::default());
        for i in [0, 14] {
            assert!(hits[i].hit);
            assert!((hits[i].distance - 0.12).abs() < 1e-12);
        }
        // Straight ahead: next wall is 206 m away, beyond range.
        assert_eq!(hits[7], RayHit::MISS);
    }

    #[test]
    fn open_space_is_all_misses() {
        let t = long_box();
        let s = VehicleState::at_rest(Vec2::new(200.0, 150.0), 0.0);
        let hits = cast_rays(&s, &t, &RayConfig::default());
        assert!(hits.iter().all(|h| *h == RayHit::MISS));
    }

    #[test]
    fn observation_packs_rays_then_velocity() {
        let t = long_box();
        let s = VehicleState {
            position: Vec2::new(200.0, 0.0),
            speed: 10.0,
            velocity: Vec2::new(10.0, 0.0),
            ..Default::default()
        };
        let o = observe(&s, &t, &RayConfig::default());
        assert_eq!(o.values.len(), 33);
        assert_eq!(&o.values[30..], &[10.0, 0.0, 0.0]);
        assert_eq!(o.values[0], 1.0);
        assert_eq!(o.values[14], 0.0);
        assert_eq!(o.values[15], 1.0);
        let still = observe(&VehicleState::at_rest(Vec2::new(200.0, 0.0), 0.0), &t, &RayConfig::default());
        assert_eq!(&still.values[30..], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn distance_shrinks_approaching_wall() {
        let t = long_box();
        let cfg = RayConfig::default();
        let mut last = f64::INFINITY;
        for k in 0..40 {
            let s = VehicleState::at_rest(Vec2::new(380.0 + k as f64 * 0.4, 0.0), 0.0);
            let d = cast_rays(&s, &t, &cfg)[7].distance;
            assert!(d < last);
            last = d;
        }
    }

    #[test]
    fn mirror_symmetric_corridor_gives_mirrored_rays() {
        let t = long_box();
        let cfg = RayConfig::default();
        let s = VehicleState::at_rest(Vec2::new(200.0, 0.0), 0.0);
        let hits = cast_rays(&s, &t, &cfg);
        for i in 0..15 {
            assert!((hits[i].distance - hits[14 - i].distance).abs() < 1e-12);
            assert_eq!(hits[i].hit, hits[14 - i].hit);
        }
    }
}

//! Track geometry: closed centerline with arc-length parameterization, wall
//! polylines, point projection, lap-unwrapped progress and start sampling.

use std::path::Path;
use std::sync::{Arc, OnceLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Segment, SegmentGrid, Vec2};

/// The calibrated circuit shipped with the crate.
pub const CANONICAL_TRACK_JSON: &str = include_str!("../assets/offlinemania-1.json");

/// Track file version understood by [`load_track`].
pub const TRACK_FORMAT_VERSION: &str = "1";

const GRID_CELL: f64 = 4.0;

/// On-disk track document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackFile {
    pub version: String,
    pub name: String,
    pub half_width: f64,
    pub start_area: StartAreaSpec,
    pub centerline: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartAreaSpec {
    pub center: [f64; 2],
    pub size_m: f64,
    pub heading_offset_deg_range: [f64; 2],
}

/// Square spawn region aligned with the local centerline tangent.
#[derive(Debug, Clone, PartialEq)]
pub struct StartArea {
    pub center: Vec2,
    pub size: f64,
    /// Orientation of the square (tangent angle at its center), radians.
    pub orientation: f64,
    /// Heading offset range relative to the tangent, radians.
    pub heading_offset: (f64, f64),
}

impl StartArea {
    pub fn corners(&self) -> [Vec2; 4] {
        let t = Vec2::from_angle(self.orientation) * (0.5 * self.size);
        let n = t.perp();
        let c = self.center;
        [c - t - n, c + t - n, c + t + n, c - t + n]
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let t = Vec2::from_angle(self.orientation);
        let d = p - self.center;
        let h = 0.5 * self.size;
        d.dot(t).abs() <= h + 1e-9 && d.dot(t.perp()).abs() <= h + 1e-9
    }
}

/// Result of projecting a point onto the centerline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    /// Arc length in `[0, L)`.
    pub s: f64,
    /// Signed perpendicular offset, positive to the left of travel.
    pub lateral: f64,
    pub segment_index: usize,
    pub tangent: Vec2,
    /// Closest point on the centerline.
    pub foot: Vec2,
}

#[derive(Debug, Clone)]
pub struct TrackDef {
    pub name: String,
    pub version: String,
    pub half_width: f64,
    pub centerline: Vec<Vec2>,
    /// Cumulative arc length at each vertex; `cum_arc[0] == 0`.
    pub cum_arc: Vec<f64>,
    pub total_length: f64,
    pub start_area: StartArea,
    pub start_s: f64,
    pub left_wall: Vec<Vec2>,
    pub right_wall: Vec<Vec2>,
    seg_len: Vec<f64>,
    seg_dir: Vec<Vec2>,
    center_grid: SegmentGrid,
    wall_grid: SegmentGrid,
    source: TrackFile,
}

/// Parses and validates a track document.
pub fn load_track(source: &[u8]) -> Result<TrackDef> {
    let file: TrackFile = serde_json::from_slice(source).map_err(|e| Error::Parse(e.to_string()))?;
    TrackDef::from_file(file)
}

impl TrackDef {
    /// The bundled `offlinemania-1` circuit, parsed once per process.
    pub fn canonical() -> Arc<TrackDef> {
        static CANONICAL: OnceLock<Arc<TrackDef>> = OnceLock::new();
        CANONICAL
            .get_or_init(|| {
                Arc::new(load_track(CANONICAL_TRACK_JSON.as_bytes()).expect("bundled track is valid"))
            })
            .clone()
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<TrackDef> {
        load_track(&std::fs::read(path)?)
    }

    pub fn from_file(file: TrackFile) -> Result<TrackDef> {
        if file.version != TRACK_FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported track version `{}` (expected `{TRACK_FORMAT_VERSION}`)",
                file.version
            )));
        }
        if !(file.half_width.is_finite() && file.half_width > 0.0) {
            return Err(Error::Geometry(format!("half_width must be positive, got {}", file.half_width)));
        }
        let pts: Vec<Vec2> = file.centerline.iter().map(|&p| Vec2::from(p)).collect();
        let n = pts.len();
        if n < 3 {
            return Err(Error::Geometry(format!("centerline needs at least 3 vertices, got {n}")));
        }
        if pts.iter().any(|p| !p.is_finite()) {
            return Err(Error::Geometry("centerline contains non-finite coordinates".into()));
        }

        let mut seg_len = Vec::with_capacity(n);
        let mut seg_dir = Vec::with_capacity(n);
        let mut cum_arc = Vec::with_capacity(n);
        let mut acc = 0.0;
        for i in 0..n {
            let e = pts[(i + 1) % n] - pts[i];
            let len = e.length();
            if len == 0.0 {
                return Err(Error::Geometry(format!(
                    "consecutive centerline vertices {i} and {} coincide",
                    (i + 1) % n
                )));
            }
            cum_arc.push(acc);
            acc += len;
            seg_len.push(len);
            seg_dir.push(e * (1.0 / len));
        }
        let total_length = acc;

        let center_segs: Vec<Segment> = (0..n).map(|i| Segment::new(pts[i], pts[(i + 1) % n])).collect();
        if let Some((i, j)) = first_self_intersection(&center_segs) {
            return Err(Error::Geometry(format!("centerline segments {i} and {j} intersect")));
        }

        let hw = file.half_width;
        let mut left_wall = Vec::with_capacity(n);
        let mut right_wall = Vec::with_capacity(n);
        for i in 0..n {
            let n_prev = seg_dir[(i + n - 1) % n].perp();
            let n_next = seg_dir[i].perp();
            let denom = 1.0 + n_prev.dot(n_next);
            if denom < 1e-6 {
                return Err(Error::Geometry(format!("centerline folds back on itself at vertex {i}")));
            }
            let miter = (n_prev + n_next) * (1.0 / denom);
            left_wall.push(pts[i] + miter * hw);
            right_wall.push(pts[i] - miter * hw);
        }
        for (side, wall) in [("left", &left_wall), ("right", &right_wall)] {
            for i in 0..n {
                let e = wall[(i + 1) % n] - wall[i];
                if e.dot(seg_dir[i]) <= 0.0 {
                    return Err(Error::Geometry(format!(
                        "corridor pinches closed: {side} wall reverses at segment {i}"
                    )));
                }
            }
        }
        let left_segs: Vec<Segment> = (0..n).map(|i| Segment::new(left_wall[i], left_wall[(i + 1) % n])).collect();
        let right_segs: Vec<Segment> =
            (0..n).map(|i| Segment::new(right_wall[i], right_wall[(i + 1) % n])).collect();
        if let Some((i, j)) = first_self_intersection(&left_segs) {
            return Err(Error::Geometry(format!("left wall segments {i} and {j} intersect")));
        }
        if let Some((i, j)) = first_self_intersection(&right_segs) {
            return Err(Error::Geometry(format!("right wall segments {i} and {j} intersect")));
        }
        for (i, a) in left_segs.iter().enumerate() {
            for (j, b) in right_segs.iter().enumerate() {
                if a.intersects(b) {
                    return Err(Error::Geometry(format!(
                        "corridor pinches closed: left wall segment {i} crosses right wall segment {j}"
                    )));
                }
            }
        }

        let mut wall_segs = left_segs;
        wall_segs.extend(right_segs);
        let center_grid = SegmentGrid::new(center_segs, GRID_CELL, 0.01);
        let wall_grid = SegmentGrid::new(wall_segs, GRID_CELL, 0.01);

        let sa = &file.start_area;
        let [lo, hi] = sa.heading_offset_deg_range;
        if !(sa.size_m.is_finite() && sa.size_m > 0.0) {
            return Err(Error::Geometry(format!("start area size must be positive, got {}", sa.size_m)));
        }
        if !(lo.is_finite() && hi.is_finite() && lo <= hi && lo > -90.0 && hi < 90.0) {
            return Err(Error::Geometry(format!("invalid heading offset range [{lo}, {hi}]")));
        }

        let mut track = TrackDef {
            name: file.name.clone(),
            version: file.version.clone(),
            half_width: hw,
            centerline: pts,
            cum_arc,
            total_length,
            start_area: StartArea {
                center: Vec2::from(sa.center),
                size: sa.size_m,
                orientation: 0.0,
                heading_offset: (lo.to_radians(), hi.to_radians()),
            },
            start_s: 0.0,
            left_wall,
            right_wall,
            seg_len,
            seg_dir,
            center_grid,
            wall_grid,
            source: file,
        };

        let proj = track.project(track.start_area.center);
        if proj.lateral.abs() >= hw {
            return Err(Error::Geometry("start area center lies outside the corridor".into()));
        }
        track.start_s = proj.s;
        track.start_area.orientation = proj.tangent.angle();
        let corners = track.start_area.corners();
        for k in 0..4 {
            let edge = Segment::new(corners[k], corners[(k + 1) % 4]);
            if track.wall_grid.segments().iter().any(|w| w.intersects(&edge)) {
                return Err(Error::Geometry("start area is not contained in the corridor".into()));
            }
        }
        Ok(track)
    }

    /// The document this track was loaded from.
    pub fn source(&self) -> &TrackFile {
        &self.source
    }

    pub fn len(&self) -> f64 {
        self.total_length
    }

    pub fn num_segments(&self) -> usize {
        self.centerline.len()
    }

    /// Left wall segments followed by right wall segments.
    pub fn wall_segments(&self) -> &[Segment] {
        self.wall_grid.segments()
    }

    pub fn wall_grid(&self) -> &SegmentGrid {
        &self.wall_grid
    }

    pub fn centerline_segments(&self) -> &[Segment] {
        self.center_grid.segments()
    }

    pub fn segment_length(&self, i: usize) -> f64 {
        self.seg_len[i]
    }

    pub fn segment_direction(&self, i: usize) -> Vec2 {
        self.seg_dir[i]
    }

    /// Wraps any arc length into `[0, L)`.
    pub fn wrap_s(&self, s: f64) -> f64 {
        let l = self.total_length;
        let w = s.rem_euclid(l);
        if w >= l {
            0.0
        } else {
            w
        }
    }

    /// Index of the segment containing arc length `s` (wrapped).
    pub fn segment_at(&self, s: f64) -> usize {
        let s = self.wrap_s(s);
        match self.cum_arc.binary_search_by(|c| c.total_cmp(&s)) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    /// Centerline point at arc length `s` (wrapped).
    pub fn point_at(&self, s: f64) -> Vec2 {
        let s = self.wrap_s(s);
        let i = self.segment_at(s);
        self.centerline[i] + self.seg_dir[i] * (s - self.cum_arc[i])
    }

    pub fn tangent_at(&self, s: f64) -> Vec2 {
        self.seg_dir[self.segment_at(s)]
    }

    fn arc_of(&self, i: usize, t: f64) -> f64 {
        if t <= 0.0 {
            self.cum_arc[i]
        } else if t >= 1.0 {
            let next = i + 1;
            if next == self.cum_arc.len() {
                0.0
            } else {
                self.cum_arc[next]
            }
        } else {
            let s = self.cum_arc[i] + t * self.seg_len[i];
            if s >= self.total_length {
                0.0
            } else {
                s
            }
        }
    }

    /// Closest point on the centerline. Exact distance ties go to the smaller `s`.
    pub fn project(&self, p: Vec2) -> Projection {
        let (i, t, _) = self
            .center_grid
            .nearest_by(p, |(ci, ct, cd), (bi, bt, bd)| {
                cd < bd || (cd == bd && self.arc_of(ci, ct) < self.arc_of(bi, bt))
            })
            .expect("centerline is never empty");
        self.projection_from(p, i, t)
    }

    /// Projection by testing every centerline segment.
    pub fn project_brute(&self, p: Vec2) -> Projection {
        let mut best = (0usize, 0.0f64, f64::INFINITY, f64::INFINITY);
        for (i, seg) in self.centerline_segments().iter().enumerate() {
            let (t, _, d2) = seg.closest(p);
            let s = self.arc_of(i, t);
            if d2 < best.2 || (d2 == best.2 && s < best.3) {
                best = (i, t, d2, s);
            }
        }
        self.projection_from(p, best.0, best.1)
    }

    fn projection_from(&self, p: Vec2, i: usize, t: f64) -> Projection {
        let seg = &self.centerline_segments()[i];
        let foot = seg.a + (seg.b - seg.a) * t;
        let tangent = self.seg_dir[i];
        let d = p - foot;
        let dist = d.length();
        let lateral = if tangent.cross(d) >= 0.0 { dist } else { -dist };
        Projection {
            s: self.arc_of(i, t),
            lateral,
            segment_index: i,
            tangent,
            foot,
        }
    }

    /// Uniform position in the start area and a heading within the allowed
    /// offset of the local centerline direction.
    pub fn sample_start<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec2, f64) {
        let sa = &self.start_area;
        let t = Vec2::from_angle(sa.orientation);
        let n = t.perp();
        let u: f64 = rng.random_range(-0.5..0.5);
        let v: f64 = rng.random_range(-0.5..0.5);
        let pos = sa.center + t * (u * sa.size) + n * (v * sa.size);
        let (lo, hi) = sa.heading_offset;
        let offset: f64 = rng.random_range(lo..=hi);
        let heading = self.project(pos).tangent.angle() + offset;
        (pos, heading)
    }
}

/// First pair of non-adjacent intersecting segments in a closed polyline,
/// also reporting adjacent segments that overlap collinearly.
fn first_self_intersection(segs: &[Segment]) -> Option<(usize, usize)> {
    let n = segs.len();
    for i in 0..n {
        let next = (i + 1) % n;
        let e0 = segs[i].b - segs[i].a;
        let e1 = segs[next].b - segs[next].a;
        if e0.cross(e1) == 0.0 && e0.dot(e1) < 0.0 {
            return Some((i, next));
        }
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segs[i].intersects(&segs[j]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Lap-unwrapped progress along the centerline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProgressTracker {
    /// Completed start-line crossings; negative if the car backed over the line.
    pub lap_count: i64,
    /// `lap_count * L + s`.
    pub u: f64,
    /// Largest `u` reached this episode.
    pub u_best: f64,
}

impl ProgressTracker {
    pub fn new(start_s: f64) -> Self {
        Self {
            lap_count: 0,
            u: start_s,
            u_best: start_s,
        }
    }

    /// Moves to arc length `new_s`, picking the lap offset that keeps `u`
    /// continuous. Returns the progress beyond the previous best, `>= 0`.
    pub fn advance(&mut self, new_s: f64, length: f64) -> f64 {
        let mut best_k = self.lap_count;
        let mut best_gap = f64::INFINITY;
        for k in [self.lap_count, self.lap_count - 1, self.lap_count + 1] {
            let cand = k as f64 * length + new_s;
            let gap = (cand - self.u).abs();
            if gap < best_gap {
                best_gap = gap;
                best_k = k;
            }
        }
        self.lap_count = best_k;
        self.u = best_k as f64 * length + new_s;
        let delta = (self.u - self.u_best).max(0.0);
        if self.u > self.u_best {
            self.u_best = self.u;
        }
        delta
    }
}

/// Functional form of [`ProgressTracker::advance`].
pub fn advance_progress(track: &TrackDef, tracker: ProgressTracker, new_s: f64) -> (ProgressTracker, f64) {
    let mut t = tracker;
    let delta = t.advance(new_s, track.total_length);
    (t, delta)
}

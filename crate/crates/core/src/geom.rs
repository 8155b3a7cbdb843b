//! Planar geometry primitives and a uniform-grid segment index.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector pointing at `angle` radians (counter-clockwise from +x).
    #[inline]
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { x: c, y: s }
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3-D cross product; positive when `o` is to the left of `self`.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn length_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn length(self) -> f64 {
        self.length_squared().sqrt()
    }

    #[inline]
    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).length()
    }

    pub fn normalized(self) -> Vec2 {
        let l = self.length();
        if l > 0.0 {
            self * (1.0 / l)
        } else {
            Vec2::ZERO
        }
    }

    /// Counter-clockwise perpendicular.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Vec2,
    pub b: Vec2,
}

impl Segment {
    pub const fn new(a: Vec2, b: Vec2) -> Self {
        Self { a, b }
    }

    /// Closest point on the segment to `p`, as `(t, point, squared distance)`.
    #[inline]
    pub fn closest(&self, p: Vec2) -> (f64, Vec2, f64) {
        let e = self.b - self.a;
        let len2 = e.length_squared();
        let t = if len2 > 0.0 {
            ((p - self.a).dot(e) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let q = self.a + e * t;
        (t, q, (p - q).length_squared())
    }

    /// Ray parameter of the first intersection of `origin + t * dir` with this
    /// segment. Parallel and collinear configurations report no hit.
    #[inline]
    pub fn ray_hit(&self, origin: Vec2, dir: Vec2) -> Option<f64> {
        let e = self.b - self.a;
        let denom = dir.cross(e);
        if denom == 0.0 {
            return None;
        }
        let ao = self.a - origin;
        let t = ao.cross(e) / denom;
        let u = ao.cross(dir) / denom;
        if t >= 0.0 && (0.0..=1.0).contains(&u) {
            Some(t)
        } else {
            None
        }
    }

    /// Proper or touching intersection test between two closed segments.
    pub fn intersects(&self, o: &Segment) -> bool {
        fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
            (b - a).cross(c - a)
        }
        fn on_seg(a: Vec2, b: Vec2, p: Vec2) -> bool {
            p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
        }
        let d1 = orient(o.a, o.b, self.a);
        let d2 = orient(o.a, o.b, self.b);
        let d3 = orient(self.a, self.b, o.a);
        let d4 = orient(self.a, self.b, o.b);
        if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
            && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
        {
            return true;
        }
        (d1 == 0.0 && on_seg(o.a, o.b, self.a))
            || (d2 == 0.0 && on_seg(o.a, o.b, self.b))
            || (d3 == 0.0 && on_seg(self.a, self.b, o.a))
            || (d4 == 0.0 && on_seg(self.a, self.b, o.b))
    }
}

/// Uniform grid over a fixed set of segments. Each cell stores every segment
/// whose padded bounding box overlaps it, in CSR layout.
#[derive(Debug, Clone)]
pub struct SegmentGrid {
    segments: Vec<Segment>,
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl SegmentGrid {
    pub fn new(segments: Vec<Segment>, cell: f64, pad: f64) -> Self {
        assert!(cell > 0.0, "grid cell size must be positive");
        let (mut lo, mut hi) = (
            Vec2::new(f64::INFINITY, f64::INFINITY),
            Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for s in &segments {
            for p in [s.a, s.b] {
                lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
            }
        }
        if segments.is_empty() {
            lo = Vec2::ZERO;
            hi = Vec2::ZERO;
        }
        let origin = lo - Vec2::new(pad + cell, pad + cell);
        let span = hi - origin + Vec2::new(pad + cell, pad + cell);
        let nx = ((span.x / cell).ceil() as usize).max(1);
        let ny = ((span.y / cell).ceil() as usize).max(1);

        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); nx * ny];
        for (i, s) in segments.iter().enumerate() {
            let x0 = ((s.a.x.min(s.b.x) - pad - origin.x) / cell).floor().max(0.0) as usize;
            let x1 = (((s.a.x.max(s.b.x) + pad - origin.x) / cell).floor() as usize).min(nx - 1);
            let y0 = ((s.a.y.min(s.b.y) - pad - origin.y) / cell).floor().max(0.0) as usize;
            let y1 = (((s.a.y.max(s.b.y) + pad - origin.y) / cell).floor() as usize).min(ny - 1);
            for cy in y0..=y1 {
                for cx in x0..=x1 {
                    buckets[cy * nx + cx].push(i as u32);
                }
            }
        }
        let mut starts = Vec::with_capacity(nx * ny + 1);
        let mut items = Vec::new();
        starts.push(0);
        for b in buckets {
            items.extend_from_slice(&b);
            starts.push(items.len() as u32);
        }
        Self {
            segments,
            origin,
            cell,
            nx,
            ny,
            starts,
            items,
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    #[inline]
    fn cell_items(&self, cx: usize, cy: usize) -> &[u32] {
        let c = cy * self.nx + cx;
        &self.items[self.starts[c] as usize..self.starts[c + 1] as usize]
    }

    #[inline]
    fn cell_of(&self, p: Vec2) -> (usize, usize) {
        let fx = ((p.x - self.origin.x) / self.cell).floor();
        let fy = ((p.y - self.origin.y) / self.cell).floor();
        (
            (fx.max(0.0) as usize).min(self.nx - 1),
            (fy.max(0.0) as usize).min(self.ny - 1),
        )
    }

    /// Nearest segment to `p` under `better(candidate, incumbent)` ordering on
    /// `(index, t, squared distance)`. Returns `None` only for an empty grid.
    pub fn nearest_by<F>(&self, p: Vec2, mut better: F) -> Option<(usize, f64, f64)>
    where
        F: FnMut((usize, f64, f64), (usize, f64, f64)) -> bool,
    {
        if self.segments.is_empty() {
            return None;
        }
        let (cx, cy) = self.cell_of(p);
        let mut best: Option<(usize, f64, f64)> = None;
        let max_ring = self.nx.max(self.ny);
        for ring in 0..=max_ring {
            let x0 = cx as isize - ring as isize;
            let x1 = cx as isize + ring as isize;
            let y0 = cy as isize - ring as isize;
            let y1 = cy as isize + ring as isize;
            for gy in y0..=y1 {
                if gy < 0 || gy >= self.ny as isize {
                    continue;
                }
                let edge_row = gy == y0 || gy == y1;
                let mut gx = x0;
                while gx <= x1 {
                    if gx >= 0 && gx < self.nx as isize {
                        for &i in self.cell_items(gx as usize, gy as usize) {
                            let i = i as usize;
                            let (t, _, d2) = self.segments[i].closest(p);
                            let cand = (i, t, d2);
                            best = match best {
                                None => Some(cand),
                                Some(b) if better(cand, b) => Some(cand),
                                keep => keep,
                            };
                        }
                    }
                    gx += if edge_row || ring == 0 { 1 } else { (x1 - x0).max(1) };
                }
            }
            if let Some((_, _, d2)) = best {
                // Cells beyond this ring are at least `ring * cell` away from p
                // (or from p's projection onto the grid box, which is closer).
                let reach = ring as f64 * self.cell;
                if d2 < reach * reach {
                    break;
                }
            }
        }
        best
    }

    /// Visits every segment whose padded box overlaps the disc at `p`.
    pub fn for_each_near<F: FnMut(usize, &Segment)>(&self, p: Vec2, radius: f64, mut f: F) {
        let (x0, y0) = self.cell_of(p - Vec2::new(radius, radius));
        let (x1, y1) = self.cell_of(p + Vec2::new(radius, radius));
        for cy in y0..=y1 {
            for cx in x0..=x1 {
                for &i in self.cell_items(cx, cy) {
                    f(i as usize, &self.segments[i as usize]);
                }
            }
        }
    }

    /// First hit along the ray within `max_t`, as `(t, segment index)`.
    /// Walks the grid cells the ray passes through.
    pub fn raycast(&self, origin: Vec2, dir: Vec2, max_t: f64) -> Option<(f64, usize)> {
        let ox = (origin.x - self.origin.x) / self.cell;
        let oy = (origin.y - self.origin.y) / self.cell;
        if ox < 0.0 || oy < 0.0 || ox >= self.nx as f64 || oy >= self.ny as f64 {
            return self.raycast_brute(origin, dir, max_t);
        }
        let mut cx = ox as isize;
        let mut cy = oy as isize;
        let step_x: isize = if dir.x > 0.0 { 1 } else { -1 };
        let step_y: isize = if dir.y > 0.0 { 1 } else { -1 };
        let t_delta_x = if dir.x != 0.0 { self.cell / dir.x.abs() } else { f64::INFINITY };
        let t_delta_y = if dir.y != 0.0 { self.cell / dir.y.abs() } else { f64::INFINITY };
        let mut t_max_x = if dir.x > 0.0 {
            ((cx + 1) as f64 - ox) * t_delta_x
        } else if dir.x < 0.0 {
            (ox - cx as f64) * t_delta_x
        } else {
            f64::INFINITY
        };
        let mut t_max_y = if dir.y > 0.0 {
            ((cy + 1) as f64 - oy) * t_delta_y
        } else if dir.y < 0.0 {
            (oy - cy as f64) * t_delta_y
        } else {
            f64::INFINITY
        };

        let mut best: Option<(f64, usize)> = None;
        loop {
            for &i in self.cell_items(cx as usize, cy as usize) {
                let i = i as usize;
                if let Some(t) = self.segments[i].ray_hit(origin, dir) {
                    if t <= max_t && best.is_none_or(|(bt, bi)| t < bt || (t == bt && i < bi)) {
                        best = Some((t, i));
                    }
                }
            }
            let t_exit = t_max_x.min(t_max_y);
            if let Some((bt, _)) = best {
                if bt <= t_exit {
                    return best;
                }
            }
            if t_exit > max_t {
                return best;
            }
            if t_max_x < t_max_y {
                cx += step_x;
                t_max_x += t_delta_x;
            } else {
                cy += step_y;
                t_max_y += t_delta_y;
            }
            if cx < 0 || cy < 0 || cx >= self.nx as isize || cy >= self.ny as isize {
                return best;
            }
        }
    }

    /// Same contract as [`raycast`](Self::raycast), testing every segment.
    pub fn raycast_brute(&self, origin: Vec2, dir: Vec2, max_t: f64) -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for (i, s) in self.segments.iter().enumerate() {
            if let Some(t) = s.ray_hit(origin, dir) {
                if t <= max_t && best.is_none_or(|(bt, _)| t < bt) {
                    best = Some((t, i));
                }
            }
        }
        best
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut a = a % std::f64::consts::TAU;
    if a <= -std::f64::consts::PI {
        a += std::f64::consts::TAU;
    } else if a > std::f64::consts::PI {
        a -= std::f64::consts::TAU;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closest_point_clamps_to_endpoints() {
        let s = Segment::new(Vec2::new(0.0, 0.0), Vec2::new(10.0, 0.0));
        let (t, q, d2) = s.closest(Vec2::new(3.0, 2.0));
        assert_eq!(t, 0.3);
        assert_eq!(q, Vec2::new(3.0, 0.0));
        assert_eq!(d2, 4.0);
        let (t, _, d2) = s.closest(Vec2::new(-2.0, 0.0));
        assert_eq!(t, 0.0);
        assert_eq!(d2, 4.0);
    }

    #[test]
    fn ray_hits_perpendicular_segment() {
        let s = Segment::new(Vec2::new(5.0, -1.0), Vec2::new(5.0, 1.0));
        assert_eq!(s.ray_hit(Vec2::ZERO, Vec2::new(1.0, 0.0)), Some(5.0));
        assert_eq!(s.ray_hit(Vec2::ZERO, Vec2::new(-1.0, 0.0)), None);
        assert_eq!(s.ray_hit(Vec2::ZERO, Vec2::new(0.0, 1.0)), None);
    }

    #[test]
    fn segment_intersection_cases() {
        let a = Segment::new(Vec2::new(0.0, 0.0), Vec2::new(2.0, 2.0));
        let b = Segment::new(Vec2::new(0.0, 2.0), Vec2::new(2.0, 0.0));
        let c = Segment::new(Vec2::new(3.0, 0.0), Vec2::new(4.0, 1.0));
        assert!(a.intersects(&b));
        assert!(!a.intersects(&c));
        let touch = Segment::new(Vec2::new(2.0, 2.0), Vec2::new(3.0, 5.0));
        assert!(a.intersects(&touch));
    }

    #[test]
    fn grid_raycast_matches_brute_force_on_box() {
        let pts = [
            Vec2::new(0.0, 0.0),
            Vec2::new(20.0, 0.0),
            Vec2::new(20.0, 10.0),
            Vec2::new(0.0, 10.0),
        ];
        let segs: Vec<_> = (0..4).map(|i| Segment::new(pts[i], pts[(i + 1) % 4])).collect();
        let grid = SegmentGrid::new(segs, 3.0, 0.5);
        for k in 0..64 {
            let dir = Vec2::from_angle(k as f64 * 0.1);
            let o = Vec2::new(7.3, 4.1);
            let fast = grid.raycast(o, dir, 100.0).map(|h| h.0);
            let slow = grid.raycast_brute(o, dir, 100.0).map(|h| h.0);
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn wrap_angle_range() {
        use std::f64::consts::PI;
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-0.5) + 0.5).abs() < 1e-15);
        assert!(wrap_angle(-PI) > 0.0);
    }
}

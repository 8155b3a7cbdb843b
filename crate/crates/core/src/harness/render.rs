//! Top-down SVG of a trajectory on its track.

use std::fmt::Write as _;

use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::track::TrackDef;

const MARGIN: f64 = 10.0;
const SCALE: f64 = 4.0;

/// Speed colour ramp, blue (slow) to red (fast).
fn speed_color(speed: f64, max: f64) -> String {
    let t = if max > 0.0 { (speed.abs() / max).clamp(0.0, 1.0) } else { 0.0 };
    let r = (255.0 * t).round() as u8;
    let b = (255.0 * (1.0 - t)).round() as u8;
    format!("#{r:02x}40{b:02x}")
}

struct Frame {
    min: Vec2,
    height: f64,
}

impl Frame {
    // SVG's y axis points down.
    fn map(&self, p: Vec2) -> (f64, f64) {
        ((p.x - self.min.x + MARGIN) * SCALE, self.height - (p.y - self.min.y + MARGIN) * SCALE)
    }

    fn points(&self, pts: impl IntoIterator<Item = Vec2>) -> String {
        let mut s = String::new();
        for p in pts {
            let (x, y) = self.map(p);
            let _ = write!(s, "{x:.2},{y:.2} ");
        }
        s.trim_end().to_string()
    }
}

pub fn render_svg(track: &TrackDef, traj: &Trajectory) -> Result<String> {
    if traj.steps.is_empty() {
        return Err(Error::Format("trajectory has no steps".into()));
    }
    let all = track.left_wall.iter().chain(&track.right_wall);
    let (mut min, mut max) = (Vec2::new(f64::INFINITY, f64::INFINITY), Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in all {
        min = Vec2::new(min.x.min(p.x), min.y.min(p.y));
        max = Vec2::new(max.x.max(p.x), max.y.max(p.y));
    }
    let width = (max.x - min.x + 2.0 * MARGIN) * SCALE;
    let height = (max.y - min.y + 2.0 * MARGIN) * SCALE;
    let fr = Frame { min, height };
    let closed = |pts: &[Vec2]| fr.points(pts.iter().copied().chain(std::iter::once(pts[0])));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.2} {height:.2}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        "<title>{} seed {} on {} ({} steps)</title>",
        traj.policy,
        traj.seed,
        traj.env_version,
        traj.steps.len()
    );
    for wall in [&track.left_wall, &track.right_wall] {
        let _ = writeln!(svg, r#"<polyline class="wall" fill="none" stroke="black" stroke-width="2" points="{}"/>"#, closed(wall));
    }
    let _ = writeln!(
        svg,
        r##"<polyline class="centerline" fill="none" stroke="#888" stroke-width="1" stroke-dasharray="6 4" points="{}"/>"##,
        closed(&track.centerline)
    );
    let _ = writeln!(
        svg,
        r##"<polygon class="start-area" fill="#3c3" fill-opacity="0.3" stroke="#282" points="{}"/>"##,
        fr.points(track.start_area.corners())
    );

    let vmax = traj.steps.iter().map(|s| s.speed.abs()).fold(0.0, f64::max);
    let pos = |i: usize| Vec2::new(traj.steps[i].position[0], traj.steps[i].position[1]);
    let _ = writeln!(svg, r#"<g class="path" stroke-width="2" stroke-linecap="round">"#);
    for i in 1..traj.steps.len() {
        let (x1, y1) = fr.map(pos(i - 1));
        let (x2, y2) = fr.map(pos(i));
        let _ = writeln!(
            svg,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{}"/>"#,
            speed_color(traj.steps[i].speed, vmax)
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r#"<g class="collisions" fill="none" stroke="red" stroke-width="1.5">"#);
    for (i, s) in traj.steps.iter().enumerate() {
        if s.in_contact && (i == 0 || !traj.steps[i - 1].in_contact) {
            let (x, y) = fr.map(pos(i));
            let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="6"/>"#);
        }
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    Ok(svg)
}

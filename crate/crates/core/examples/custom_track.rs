//! Build a track from JSON, inspect its geometry and run a policy on it.

use std::sync::Arc;

use offlinemania::env::EnvConfig;
use offlinemania::geom::Vec2;
use offlinemania::harness::evaluate;
use offlinemania::policy::builtin;
use offlinemania::track::load_track;

// A rounded rectangle, counter-clockwise.
const OVAL: &str = r#"{
  "version": "1",
  "name": "oval",
  "half_width": 6.0,
  "start_area": { "center": [0, 0], "size_m": 8, "heading_offset_deg_range": [-30, 30] },
  "centerline": [
    [-40, 0], [40, 0], [52, 4], [58, 15], [52, 26], [40, 30], [-40, 30], [-52, 26], [-58, 15], [-52, 4]
  ]
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let track = Arc::new(load_track(OVAL.as_bytes())?);
    println!("{}: length {:.2} m, {} vertices", track.name, track.total_length, track.centerline.len());

    for p in [Vec2::new(0.0, 2.0), Vec2::new(55.0, 15.0), Vec2::new(-10.0, 29.0)] {
        let pr = track.project(p);
        println!("({:6.1},{:5.1}) -> s={:7.2} lateral={:+.2}", p.x, p.y, pr.s, pr.lateral);
    }

    // A pinched corridor is rejected at load time.
    let bad = OVAL.replace("\"half_width\": 6.0", "\"half_width\": 16.0");
    println!("half width 16: {}", load_track(bad.as_bytes()).unwrap_err());

    let cfg = Arc::new(EnvConfig::with_track(track)?);
    let p = builtin("expert", &cfg.track, &cfg.physics)?;
    let r = evaluate(&cfg, &*p, 3, 0)?;
    println!("{r}");
    Ok(())
}

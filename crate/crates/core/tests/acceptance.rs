//! Acceptance gate. Prints one line per criterion and fails if any check
//! fails; checks whose hardware precondition is unmet are reported as SKIP.

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use offlinemania::dataset::{same_modulo_timestamp, Dataset, SUITE_FILES};
use offlinemania::dynamics::{Action, VehicleState};
use offlinemania::env::{Env, EnvConfig};
use offlinemania::error::Error;
use offlinemania::geom::Vec2;
use offlinemania::harness::{batched_matches_sequential, bench::bench_single, evaluate, run_episode};
use offlinemania::policy::builtin;
use offlinemania::reward::{compute_reward, RewardConfig};
use offlinemania::sensing::{cast_rays, OBS_DIM};
use offlinemania::track::TrackDef;

enum Outcome {
    Pass(String),
    Fail(String),
}

use Outcome::{Fail, Pass};

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn config() -> Arc<EnvConfig> {
    Arc::new(EnvConfig::canonical())
}

fn random_action(rng: &mut ChaCha8Rng) -> Action {
    Action::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
}

fn c1_contract() -> Outcome {
    let mut env = Env::canonical();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut obs = env.reset(Some(1));
    let mut violations = 0;
    for _ in 0..10_000 {
        if env.is_done() {
            obs = env.reset(None);
        }
        let bad = obs.values.len() != OBS_DIM
            || obs.values.iter().any(|v| !v.is_finite())
            || (0..15).any(|i| {
                let r = obs.ray(i);
                let flag = obs.values[2 * i];
                !(flag == 0.0 || flag == 1.0) || !(0.0..=1.0).contains(&r.distance) || (!r.hit && r.distance != 1.0)
            })
            || obs.values[32] != 0.0;
        violations += bad as usize;
        // Out-of-range inputs must come out clamped.
        let raw = Action::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let a = raw.clamped().to_array();
        violations += (a.len() != 2 || a.iter().any(|v| v.abs() > 1.0)) as usize;
        obs = env.step(raw).unwrap().observation;
    }
    check(violations == 0, format!("10000 random steps, {violations} violations"))
}

fn c2_reward() -> Outcome {
    let cfg = RewardConfig::default();
    let a = compute_reward(0.0, true, 2.0, &cfg);
    let b = compute_reward(0.0, false, 0.0, &cfg);
    let deltas = [0.001, 0.37, 2.5, 0.8];
    let c = deltas.iter().all(|&d| compute_reward(d, false, 0.0, &cfg) == d);
    check(a == -100.0 && b == 0.0 && c, format!("contact@2m/s={a}, no-advance={b}, delta exact={c}"))
}

fn c3_telescoping() -> Outcome {
    let cfg = config();
    let expert = builtin("expert", &cfg.track, &cfg.physics).unwrap();
    let l = cfg.track.total_length;
    let mut worst = 0.0f64;
    for seed in 0..5 {
        let mut env = Env::new(cfg.clone());
        let mut positive = 0.0;
        let mut deltas = 0.0;
        let s = run_episode(&mut env, &*expert, seed, |_, _, r| {
            if r.reward > 0.0 {
                positive += r.reward;
            }
            deltas += r.info.progress_delta;
        });
        let gain = s.u_best - s.u_start;
        worst = worst.max((positive - gain).abs()).max((deltas - gain).abs());
    }
    check(worst <= 1e-6 * l, format!("5 expert episodes, max |sum - (u_best - u_start)| = {worst:.3e} (tol {:.3e})", 1e-6 * l))
}

fn c4_determinism() -> Outcome {
    let cfg = config();
    let mut mismatches = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5);
        let actions: Vec<Action> = (0..cfg.episode_len).map(|_| random_action(&mut rng)).collect();
        let run = || {
            let mut env = Env::new(cfg.clone());
            let mut trace = vec![env.reset(Some(seed)).values.map(f64::to_bits).to_vec()];
            for a in &actions {
                let r = env.step(*a).unwrap();
                let mut row = r.observation.values.map(f64::to_bits).to_vec();
                row.push(r.reward.to_bits());
                row.push(r.info.position.x.to_bits());
                row.push(r.info.position.y.to_bits());
                row.push(r.info.heading.to_bits());
                trace.push(row);
            }
            trace
        };
        mismatches += (run() != run()) as usize;
    }
    check(mismatches == 0, format!("100 seeds x 2000 random actions, {mismatches} differing runs"))
}

fn c5_episode_structure() -> Outcome {
    let cfg = config();
    let random = builtin("random", &cfg.track, &cfg.physics).unwrap();
    let mut ok = true;
    for seed in 0..5 {
        let mut env = Env::new(cfg.clone());
        let (mut truncs, mut terms) = (0, 0);
        let s = run_episode(&mut env, &*random, seed, |_, _, r| {
            truncs += r.truncated as usize;
            terms += r.terminated as usize;
        });
        let over = matches!(env.step(Action::default()), Err(Error::EpisodeOver));
        ok &= s.steps == 2000 && truncs == 1 && terms == 0 && over;
    }
    check(ok, "5 episodes: 2000 steps each, truncated once, never terminated, stepping after end refused".into())
}

fn c6_expert() -> Outcome {
    let cfg = config();
    let expert = builtin("expert", &cfg.track, &cfg.physics).unwrap();
    let mut env = Env::new(cfg.clone());
    let runs: Vec<_> = (0..5).map(|s| offlinemania::harness::run_episode_quiet(&mut env, &*expert, s)).collect();
    let mean = runs.iter().map(|r| r.episode_return).sum::<f64>() / 5.0;
    let min_laps = runs.iter().map(|r| r.laps).min().unwrap();
    let mut laps: Vec<usize> = runs.iter().flat_map(|r| r.lap_steps.clone()).collect();
    laps.sort_unstable();
    let median = if laps.is_empty() {
        f64::INFINITY
    } else if laps.len() % 2 == 1 {
        laps[laps.len() / 2] as f64
    } else {
        (laps[laps.len() / 2 - 1] + laps[laps.len() / 2]) as f64 / 2.0
    };
    check(
        (1065.0..=1301.0).contains(&mean) && min_laps >= 5 && median <= 420.0,
        format!("mean return {mean:.1} in [1065,1301], min laps {min_laps} >= 5, median lap {median} <= 420"),
    )
}

fn c7_tiers() -> Outcome {
    let cfg = config();
    let mean = |name: &str| {
        let p = builtin(name, &cfg.track, &cfg.physics).unwrap();
        evaluate(&cfg, &*p, 20, 0).unwrap().mean_return
    };
    let (r, b, m, e) = (mean("random"), mean("basic"), mean("medium"), mean("expert"));
    check(
        r <= b && b < m && m < e && b < 0.0 && m > 100.0 && m < 700.0,
        format!("random {r:.1} <= basic {b:.1} < medium {m:.1} < expert {e:.1}; basic < 0; medium in (100,700)"),
    )
}

fn c8_suite() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let gen = |dir: &Path| {
        Command::new(env!("CARGO_BIN_EXE_offlinemania"))
            .args(["gen-suite", "--seed", "0", "--out-dir"])
            .arg(dir)
            .env_remove("OMD_TRACK_PATH")
            .output()
            .map(|o| o.status.success())
            .unwrap_or(false)
    };
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    if !gen(&a) || !gen(&b) {
        return Fail("gen-suite did not exit 0".into());
    }
    let expected = [100_000u64, 100_000, 100_000, 200_000, 5_000, 5_000];
    let mut counts = Vec::new();
    let mut identical = true;
    let mut prov = Vec::new();
    for name in SUITE_FILES {
        let bytes = std::fs::read(a.join(name)).unwrap();
        let d = Dataset::read_from(bytes.as_slice()).unwrap();
        counts.push(d.len() as u64);
        if name.starts_with("mix") {
            prov.push(d.header.provenance.iter().map(|p| p.count).collect::<Vec<_>>());
        }
        identical &= same_modulo_timestamp(&bytes, &std::fs::read(b.join(name)).unwrap()).unwrap_or(false);
    }
    let files = std::fs::read_dir(&a).unwrap().count();
    check(
        files == 6 && counts == expected && prov == [vec![180_000, 14_000, 6_000], vec![4_500, 350, 150]] && identical,
        format!("{files} files, counts {counts:?}, mix provenance {prov:?}, regeneration identical={identical}"),
    )
}

/// Centerline sampled every centimetre, independently of the library.
fn dense_centerline(track: &TrackDef) -> Vec<(Vec2, f64)> {
    let pts = &track.centerline;
    let mut out = Vec::new();
    let mut s0 = 0.0;
    for i in 0..pts.len() {
        let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
        let len = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
        let n = (len / 0.01).ceil() as usize;
        for k in 0..n {
            let t = k as f64 / n as f64;
            out.push((Vec2::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t), s0 + len * t));
        }
        s0 += len;
    }
    out
}

fn c9_projection() -> Outcome {
    let track = TrackDef::canonical();
    let dense = dense_centerline(&track);
    let l = track.total_length;
    let (mut lo, mut hi) = (Vec2::new(f64::MAX, f64::MAX), Vec2::new(f64::MIN, f64::MIN));
    for p in &track.centerline {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut n, mut worst) = (0, 0.0f64);
    while n < 1000 {
        let p = Vec2::new(rng.random_range(lo.x - 6.0..hi.x + 6.0), rng.random_range(lo.y - 6.0..hi.y + 6.0));
        let (d2, s_brute) = dense
            .iter()
            .map(|(q, s)| ((q.x - p.x).powi(2) + (q.y - p.y).powi(2), *s))
            .fold((f64::MAX, 0.0), |best, c| if c.0 < best.0 { c } else { best });
        // Only points on the drivable corridor.
        if d2.sqrt() > track.half_width {
            continue;
        }
        n += 1;
        let s = track.project(p).s;
        let diff = (s - s_brute).abs();
        worst = worst.max(diff.min(l - diff));
    }
    check(worst <= 0.01, format!("1000 corridor points, max arc-length gap {:.4} cm", worst * 100.0))
}

/// Ray/segment intersection written out longhand.
fn brute_ray(track: &TrackDef, o: Vec2, angle: f64, max_range: f64) -> f64 {
    let (dx, dy) = (angle.cos(), angle.sin());
    let mut best = f64::INFINITY;
    for wall in [&track.left_wall, &track.right_wall] {
        for i in 0..wall.len() {
            let (a, b) = (wall[i], wall[(i + 1) % wall.len()]);
            let (ex, ey) = (b.x - a.x, b.y - a.y);
            let den = dx * ey - dy * ex;
            if den == 0.0 {
                continue;
            }
            let (wx, wy) = (a.x - o.x, a.y - o.y);
            let t = (wx * ey - wy * ex) / den;
            let u = (wx * dy - wy * dx) / den;
            if t >= 0.0 && (0.0..=1.0).contains(&u) {
                best = best.min(t);
            }
        }
    }
    if best <= max_range {
        best / max_range
    } else {
        1.0
    }
}

fn c10_raycast() -> Outcome {
    let cfg = config();
    let track = &cfg.track;
    let offsets = cfg.rays.offsets();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    let mut flag_mismatch = 0;
    for _ in 0..1000 {
        let s = rng.random_range(0.0..track.total_length);
        let lat = rng.random_range(-(track.half_width - 1.0)..(track.half_width - 1.0));
        let base = track.point_at(s);
        let n = track.tangent_at(s).perp();
        let state = VehicleState::at_rest(base + n * lat, rng.random_range(-std::f64::consts::PI..std::f64::consts::PI));
        let hits = cast_rays(&state, track, &cfg.rays);
        for (i, h) in hits.iter().enumerate() {
            let d = brute_ray(track, state.position, state.heading - offsets[i], cfg.rays.max_range);
            worst = worst.max((h.distance - d).abs());
            flag_mismatch += (h.hit != (d < 1.0)) as usize;
        }
    }
    check(
        worst <= 1e-6 && flag_mismatch == 0,
        format!("1000 poses x 15 rays, max normalized gap {worst:.2e}, {flag_mismatch} hit-flag mismatches"),
    )
}

fn c11_throughput() -> Vec<(String, Option<Outcome>)> {
    let cfg = config();
    let single = bench_single(&cfg, 200_000, 0);
    let identical = batched_matches_sequential(&cfg, 16, 2_500, 11).unwrap_or(false);
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let scaling = if threads >= 8 {
        let r = offlinemania::harness::bench(&cfg, 16, 50_000, 0);
        let agg = r.batched_steps_per_sec.unwrap();
        Some(check(agg >= 4.0 * single, format!("16 instances {agg:.0} steps/s = {:.2}x single", agg / single)))
    } else {
        None
    };
    vec![
        ("single".into(), Some(check(single >= 50_000.0, format!("single instance {single:.0} steps/s >= 50000")))),
        ("batched-identity".into(), Some(check(identical, "16 instances x 2500 steps, batched == sequential bitwise".into()))),
        (format!("scaling ({threads} hardware threads, needs >= 8)"), scaling),
    ]
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    // `cargo test -- --list` and filters have nothing to enumerate here.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: Vec<Criterion> = vec![
        (1, "observation/action contract", c1_contract),
        (2, "reward cases", c2_reward),
        (3, "progress telescoping", c3_telescoping),
        (4, "determinism", c4_determinism),
        (5, "episode structure", c5_episode_structure),
        (6, "expert calibration", c6_expert),
        (7, "tier ordering", c7_tiers),
        (8, "dataset suite", c8_suite),
        (9, "projection oracle", c9_projection),
        (10, "raycast oracle", c10_raycast),
    ];
    let mut failed = 0;
    for (n, name, f) in criteria {
        let t = Instant::now();
        let out = f();
        let secs = t.elapsed().as_secs_f64();
        match out {
            Pass(d) => println!("criterion {n:2} PASS {name} ({secs:.2}s): {d}"),
            Fail(d) => {
                failed += 1;
                println!("criterion {n:2} FAIL {name} ({secs:.2}s): {d}");
            }
        }
    }
    let t = Instant::now();
    let parts = c11_throughput();
    let secs = t.elapsed().as_secs_f64();
    let mut line = Vec::new();
    let mut any_fail = false;
    let mut any_skip = false;
    for (label, o) in parts {
        match o {
            Some(Pass(d)) => line.push(format!("[pass] {d}")),
            Some(Fail(d)) => {
                any_fail = true;
                line.push(format!("[FAIL] {d}"));
            }
            None => {
                any_skip = true;
                line.push(format!("[skip] {label}"));
            }
        }
    }
    let verdict = match (any_fail, any_skip) {
        (true, _) => "FAIL",
        (false, true) => "PASS (partial; scaling SKIP)",
        _ => "PASS",
    };
    failed += any_fail as usize;
    println!("criterion 11 {verdict} throughput gate ({secs:.2}s): {}", line.join("; "));
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

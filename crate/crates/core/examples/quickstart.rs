//! Reset, step, and read observations with a tiny centerline-following loop.

use offlinemania::dynamics::Action;
use offlinemania::env::Env;
use offlinemania::geom::wrap_angle;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut env = Env::canonical();
    let obs = env.reset(Some(42));
    println!("env {}", env.config().env_version());
    println!("start pose {:?}, heading {:.3}", env.vehicle().position, env.vehicle().heading);
    println!("first observation ({} values): {:?}", obs.values.len(), &obs.values[..6]);

    let mut ret = 0.0;
    for t in 0..2000 {
        // Steer back toward the centerline; positive steer turns right.
        let v = env.vehicle();
        let p = env.track().project(v.position);
        let heading_err = wrap_angle(v.heading - p.tangent.angle());
        let steer = (0.3 * p.lateral + 2.0 * heading_err).clamp(-1.0, 1.0);
        let r = env.step(Action::new(steer, 0.4))?;
        ret += r.reward;
        if t % 250 == 0 || r.truncated {
            println!(
                "t={t:4} u={:8.2} laps={} speed={:5.2} contact={} return={:8.2}",
                r.info.u, r.info.lap_count, r.info.speed, r.info.in_contact, ret
            );
        }
    }
    Ok(())
}

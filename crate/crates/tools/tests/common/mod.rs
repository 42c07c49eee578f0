#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use c2model::model::{KinematicSample, Pose2Derivs};
use c2model::vehicle::Wheel;
use c2model::Vec2;
use c2model_tools::config::VehicleConfig;
use c2model_tools::format::g9;

pub const VEHICLE_TOML: &str = "\
wheelbase = 2.7
tire_radius = 0.32
track.front = 1.6
track.rear = 1.6
steering.coefficients = [0.0, 859.436693, 0.0, 0.0]
steering.range = [-0.6, 0.6]
";

/// Weaving drive: x = 12 t, y = 25 sin(0.3 t).
pub fn weave(t: f64) -> Pose2Derivs {
    let (s, c) = (0.3 * t).sin_cos();
    Pose2Derivs::new(
        Vec2::new(12.0 * t, 25.0 * s),
        Vec2::new(12.0, 7.5 * c),
        Vec2::new(0.0, -2.25 * s),
        false,
    )
    .unwrap()
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Track CSV of the weave at 10 Hz over [0, 60] s with a 3 s outage and a
/// short stretch of bad quality.
pub fn weave_track_csv() -> String {
    let mut s = String::from("t[s],x[m],y[m],quality\n");
    for i in 0..=600 {
        let t = i as f64 * 0.1;
        if t > 30.0 && t < 33.0 {
            continue;
        }
        let q = if (45.0..=45.5).contains(&t) { 0 } else { 1 };
        let p = weave(t).position;
        let _ = writeln!(s, "{},{},{},{q}", g9(t), g9(p.x), g9(p.y));
    }
    s
}

/// CAN channels at 50 Hz, stamped `lag` seconds late. Wheel speeds read
/// 5 % high where |κ| > 0.01, so the model underestimates them there.
pub fn weave_can_csv(lag: f64) -> String {
    let geometry = VehicleConfig::parse(VEHICLE_TOML).unwrap().geometry;
    let mut s = String::from(
        "t[s],delta_swa[deg],v_lon[m/s],v_fl[m/s],v_fr[m/s],v_rl[m/s],v_rr[m/s],a_lat[m/s2]\n",
    );
    for i in 0..=3000 {
        let t = i as f64 * 0.02;
        let k = KinematicSample::evaluate(t - lag, &weave(t - lag), &geometry, Vec2::new(0.0, 1.0))
            .unwrap();
        let scale = if k.kappa.abs() > 0.01 {
            1.0 / 0.95
        } else {
            1.0
        };
        let _ = write!(
            s,
            "{},{},{}",
            g9(t),
            g9(geometry.steering_wheel_angle(k.kappa)),
            g9(k.v_lon)
        );
        for w in Wheel::ALL {
            let _ = write!(s, ",{}", g9(k.wheel(w).speed * scale));
        }
        let _ = writeln!(s, ",{}", g9(k.a_lat));
    }
    s
}

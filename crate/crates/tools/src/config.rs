//! Vehicle configuration in TOML.
//!
//! ```toml
//! wheelbase = 2.7          # m, rear axle to front axle
//! tire_radius = 0.32       # m
//! north = [0.0, 1.0]       # optional
//! track.front = 1.6        # m, wheel spacing per axle
//! track.rear = 1.6
//! steering.coefficients = [0.0, 859.0, 0.0, 0.0]  # δ_SWA[deg] = c0 + c1·δ + c2·δ² + c3·δ³
//! steering.range = [-0.6, 0.6]                     # δ [rad]
//!
//! [wheels.fl]              # optional per-wheel override
//! d_lat = -0.8             # right of the rear-axle center is positive
//! ```

use std::path::Path;

use c2model::calibration::SteeringPolynomial;
use c2model::vehicle::{VehicleGeometry, Wheel, WheelMount};
use c2model::Vec2;
use serde::Deserialize;

use crate::error::{ToolError, ToolResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    wheelbase: f64,
    tire_radius: f64,
    north: Option<[f64; 2]>,
    track: Option<RawTrack>,
    #[serde(default)]
    wheels: RawWheels,
    steering: RawSteering,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrack {
    front: f64,
    rear: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWheels {
    fl: Option<RawMount>,
    fr: Option<RawMount>,
    rl: Option<RawMount>,
    rr: Option<RawMount>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMount {
    d_lon: Option<f64>,
    d_lat: f64,
    tire_radius: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSteering {
    coefficients: [f64; 4],
    range: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleConfig {
    pub geometry: VehicleGeometry,
    pub north: Vec2,
}

impl Default for VehicleConfig {
    /// Mid-size passenger car with a 15:1 steering ratio.
    fn default() -> Self {
        let ratio = 15.0f64.to_degrees();
        let steering = SteeringPolynomial::linear(ratio, (-0.6, 0.6)).expect("valid default");
        VehicleConfig {
            geometry: VehicleGeometry::symmetric(2.7, 1.6, 1.6, 0.32, steering)
                .expect("valid default"),
            north: Vec2::new(0.0, 1.0),
        }
    }
}

impl VehicleConfig {
    pub fn load(path: &Path) -> ToolResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ToolError::io(path, e))?;
        Self::parse(&text).map_err(|msg| ToolError::Config {
            path: path.to_path_buf(),
            msg,
        })
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| e.message().to_string())?;
        let l = raw.wheelbase;
        if !(l > 0.0 && l.is_finite()) {
            return Err("wheelbase must be positive".into());
        }
        let mount = |wheel: Wheel, over: &Option<RawMount>| -> Result<WheelMount, String> {
            let name = wheel.label();
            let want_lon = if wheel.is_front() { l } else { 0.0 };
            let (d_lon, d_lat, radius) = match over {
                Some(m) => (
                    m.d_lon.unwrap_or(want_lon),
                    m.d_lat,
                    m.tire_radius.unwrap_or(raw.tire_radius),
                ),
                None => {
                    let track = raw.track.as_ref().ok_or_else(|| {
                        format!("wheels.{name} missing and no track widths given")
                    })?;
                    let w = if wheel.is_front() {
                        track.front
                    } else {
                        track.rear
                    };
                    let half = 0.5 * w;
                    (
                        want_lon,
                        if wheel.is_left() { -half } else { half },
                        raw.tire_radius,
                    )
                }
            };
            if (d_lon - want_lon).abs() > 1e-9 {
                return Err(format!("wheels.{name}.d_lon must be {want_lon}"));
            }
            if wheel.is_left() != (d_lat < 0.0) || d_lat == 0.0 {
                return Err(format!(
                    "wheels.{name}.d_lat must be {} (right of center is positive)",
                    if wheel.is_left() {
                        "negative"
                    } else {
                        "positive"
                    }
                ));
            }
            WheelMount::new(d_lon, d_lat, radius).map_err(|e| format!("wheels.{name}: {e}"))
        };
        let w = &raw.wheels;
        let mounts = [
            mount(Wheel::FrontLeft, &w.fl)?,
            mount(Wheel::FrontRight, &w.fr)?,
            mount(Wheel::RearLeft, &w.rl)?,
            mount(Wheel::RearRight, &w.rr)?,
        ];
        let [lo, hi] = raw.steering.range;
        let steering = SteeringPolynomial::new(raw.steering.coefficients, (lo, hi))
            .map_err(|e| format!("steering: {e}"))?;
        let geometry = VehicleGeometry::new(l, mounts, steering).map_err(|e| e.to_string())?;
        let north = raw
            .north
            .map_or(Vec2::new(0.0, 1.0), |[x, y]| Vec2::new(x, y));
        let north = north.normalized().ok_or("north must be a nonzero vector")?;
        Ok(VehicleConfig { geometry, north })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
wheelbase = 2.5
tire_radius = 0.3
track.front = 1.5
track.rear = 1.6
steering.coefficients = [0.0, 859.0, 0.0, 0.0]
steering.range = [-0.6, 0.6]
"#;

    #[test]
    fn symmetric_from_track_widths() {
        let c = VehicleConfig::parse(BASIC).unwrap();
        let g = &c.geometry;
        assert_eq!(g.wheelbase(), 2.5);
        assert_eq!(g.mount(Wheel::FrontLeft).d_lat, -0.75);
        assert_eq!(g.mount(Wheel::RearRight).d_lat, 0.8);
        assert_eq!(g.mount(Wheel::FrontRight).d_lon, 2.5);
        assert_eq!(g.mount(Wheel::RearLeft).d_lon, 0.0);
        assert_eq!(c.north, Vec2::new(0.0, 1.0));
    }

    #[test]
    fn per_wheel_override() {
        let text = format!("{BASIC}\n[wheels.fl]\nd_lat = -0.9\ntire_radius = 0.31\n");
        let c = VehicleConfig::parse(&text).unwrap();
        assert_eq!(c.geometry.mount(Wheel::FrontLeft).d_lat, -0.9);
        assert_eq!(c.geometry.mount(Wheel::FrontLeft).tire_radius, 0.31);
        assert_eq!(c.geometry.mount(Wheel::FrontRight).d_lat, 0.75);
    }

    #[test]
    fn rejects_bad_geometry() {
        let flipped = format!("{BASIC}\n[wheels.fl]\nd_lat = 0.9\n");
        assert!(VehicleConfig::parse(&flipped)
            .unwrap_err()
            .contains("negative"));
        let rear = format!("{BASIC}\n[wheels.rr]\nd_lon = 1.0\nd_lat = 0.8\n");
        assert!(VehicleConfig::parse(&rear).is_err());
        assert!(VehicleConfig::parse(&BASIC.replace("2.5", "-1")).is_err());
        assert!(VehicleConfig::parse(&format!("{BASIC}\nbogus = 1\n")).is_err());
        let no_track = BASIC.replace("track.front = 1.5\ntrack.rear = 1.6\n", "");
        assert!(VehicleConfig::parse(&no_track)
            .unwrap_err()
            .contains("track"));
    }
}

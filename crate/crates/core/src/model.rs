//! Closed-form evaluation of the kinematic quantities at a single instant.
//!
//! Every function here works on the first two time derivatives of the
//! rear-axle center trajectory plus the reverse-gear flag `R`. Quantities
//! that depend on the driving direction carry the sign `(−1)^R`, so that the
//! tangent always points toward the vehicle front even while reversing.
//!
//! Sign conventions:
//! * curvature is positive for left (counter-clockwise) turns when driving forward;
//! * wheel lateral offsets `d_lat` are positive to the **right** of the vehicle,
//!   i.e. along `−N`. With this convention `1/κ + d_lat` is the distance from
//!   the rotation center to the wheel's lateral position, and the inner wheel
//!   of a turn steers more than the outer one.

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::vehicle::{VehicleGeometry, Wheel, WheelMount};

/// Velocity norms below this are treated as a standstill (m/s).
pub const ZERO_VELOCITY_THRESHOLD: f64 = 1e-9;

/// `|1 + κ·d_lat|` below this means the wheel sits on the rotation center.
pub const ROTATION_CENTER_THRESHOLD: f64 = 1e-12;

/// Position and its first two time derivatives, plus the reverse-gear flag.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose2Derivs {
    pub position: Vec2,
    pub velocity: Vec2,
    pub acceleration: Vec2,
    pub reverse: bool,
}

impl Pose2Derivs {
    pub fn new(position: Vec2, velocity: Vec2, acceleration: Vec2, reverse: bool) -> Result<Self> {
        if !position.is_finite() {
            return Err(Error::NonFinite { what: "position" });
        }
        if !velocity.is_finite() {
            return Err(Error::NonFinite { what: "velocity" });
        }
        if !acceleration.is_finite() {
            return Err(Error::NonFinite {
                what: "acceleration",
            });
        }
        Ok(Pose2Derivs {
            position,
            velocity,
            acceleration,
            reverse,
        })
    }

    /// `(−1)^R`.
    pub fn direction_sign(&self) -> f64 {
        if self.reverse {
            -1.0
        } else {
            1.0
        }
    }

    /// `‖ẋ‖`.
    pub fn speed(&self) -> f64 {
        self.velocity.norm()
    }

    fn moving_speed(&self) -> Result<f64> {
        let speed = self.speed();
        if speed < ZERO_VELOCITY_THRESHOLD {
            Err(Error::ZeroVelocity)
        } else {
            Ok(speed)
        }
    }
}

/// Unit tangent (toward the vehicle front) and unit normal (to its left).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentFrame {
    pub tangent: Vec2,
    pub normal: Vec2,
}

impl TangentFrame {
    /// Builds the frame from a unit tangent; the normal is its +90° rotation.
    pub fn from_tangent(tangent: Vec2) -> Self {
        TangentFrame {
            tangent,
            normal: tangent.perp(),
        }
    }
}

pub fn tangent_frame(p: &Pose2Derivs) -> Result<TangentFrame> {
    let speed = p.moving_speed()?;
    Ok(TangentFrame::from_tangent(
        p.velocity * (p.direction_sign() / speed),
    ))
}

/// Signed longitudinal speed `(−1)^R·‖ẋ‖`; zero at rest.
pub fn longitudinal_speed(p: &Pose2Derivs) -> f64 {
    p.direction_sign() * p.speed()
}

/// Longitudinal and lateral acceleration in the vehicle frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accelerations {
    pub lon: f64,
    pub lat: f64,
}

pub fn accelerations(p: &Pose2Derivs) -> Result<Accelerations> {
    let speed = p.moving_speed()?;
    let sign = p.direction_sign();
    Ok(Accelerations {
        lon: sign * p.velocity.dot(p.acceleration) / speed,
        lat: sign * p.velocity.det(p.acceleration) / speed,
    })
}

/// Signed curvature `(−1)^R·det[ẋ, ẍ]/‖ẋ‖³`.
pub fn curvature(p: &Pose2Derivs) -> Result<f64> {
    let speed = p.moving_speed()?;
    Ok(p.direction_sign() * p.velocity.det(p.acceleration) / (speed * speed * speed))
}

/// Time derivative of the unit tangent, `Ṫ = (−1)^R (ẍ − T₀ (T₀ᵀẍ)) / ‖ẋ‖`
/// with `T₀ = ẋ/‖ẋ‖`.
pub fn tangent_rate(p: &Pose2Derivs) -> Result<Vec2> {
    let speed = p.moving_speed()?;
    let unit = p.velocity * (1.0 / speed);
    let along = unit * unit.dot(p.acceleration);
    Ok((p.acceleration - along) * (p.direction_sign() / speed))
}

/// Curvature from the tangent rate: `det[T, Ṫ] / v_lon`.
///
/// `det[T, Ṫ]` does not change sign with the gear, so `v_lon` must be the
/// signed longitudinal speed for the result to match [`curvature`].
pub fn curvature_from_tangent_rate(frame: &TangentFrame, tangent_rate: Vec2, v_lon: f64) -> f64 {
    frame.tangent.det(tangent_rate) / v_lon
}

/// Curvature from the arc-length derivative of the tangent: `Nᵀ dT/ds`,
/// with `s` advancing along `T` (`ds = v_lon·dt`, decreasing in reverse).
pub fn curvature_from_arc_derivative(frame: &TangentFrame, dtangent_ds: Vec2) -> f64 {
    frame.normal.dot(dtangent_ds)
}

/// Steering angle that aligns a wheel mounted at `(d_lon, d_lat)` with its
/// direction of travel: `atan2(κ·d_lon, 1 + κ·d_lat)`.
///
/// This is the κ-multiplied form of `arctan(d_lon / (1/κ + d_lat))`, regular
/// at κ = 0.
pub fn wheel_steer_angle(kappa: f64, mount: &WheelMount) -> Result<f64> {
    let den = 1.0 + kappa * mount.d_lat;
    if libm::fabs(den) < ROTATION_CENTER_THRESHOLD {
        return Err(Error::WheelAtRotationCenter);
    }
    Ok(libm::atan2(kappa * mount.d_lon, den))
}

/// Ground speed of a wheel: `‖ẋ‖·sqrt(κ²·d_lon² + (1 + κ·d_lat)²)`.
pub fn wheel_speed(p: &Pose2Derivs, kappa: f64, mount: &WheelMount) -> f64 {
    wheel_speed_at(p.speed(), kappa, mount)
}

/// [`wheel_speed`] from an unsigned body speed.
pub fn wheel_speed_at(speed: f64, kappa: f64, mount: &WheelMount) -> f64 {
    let lon = kappa * mount.d_lon;
    let lat = 1.0 + kappa * mount.d_lat;
    speed * libm::hypot(lon, lat)
}

pub fn wheel_angular_rate(wheel_speed: f64, mount: &WheelMount) -> f64 {
    wheel_speed / mount.tire_radius
}

/// Heading of the direction of motion relative to `north`,
/// `atan2(det[n, ẋ], nᵀẋ)` in (−π, π]. While reversing this points to the
/// vehicle rear; see [`front_heading`].
pub fn heading(p: &Pose2Derivs, north: Vec2) -> Result<f64> {
    p.moving_speed()?;
    Ok(angle_from(north, p.velocity))
}

/// Heading of the vehicle front (the tangent `T`) relative to `north`.
pub fn front_heading(frame: &TangentFrame, north: Vec2) -> f64 {
    angle_from(north, frame.tangent)
}

fn angle_from(north: Vec2, v: Vec2) -> f64 {
    let psi = libm::atan2(north.det(v), north.dot(v));
    // atan2 returns −π for (−0, negative); fold onto the closed end.
    if psi == -core::f64::consts::PI {
        core::f64::consts::PI
    } else {
        psi
    }
}

/// Yaw rate `(−1)^R·det[ẋ, ẍ]/‖ẋ‖²`, equal to `κ·‖ẋ‖`.
pub fn yaw_rate(p: &Pose2Derivs) -> Result<f64> {
    let speed = p.moving_speed()?;
    Ok(p.direction_sign() * p.velocity.det(p.acceleration) / (speed * speed))
}

/// Steering angle, ground speed and rotation rate of one wheel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WheelState {
    pub delta: f64,
    pub speed: f64,
    pub angular_rate: f64,
}

impl WheelState {
    pub fn evaluate(speed: f64, kappa: f64, mount: &WheelMount) -> Result<Self> {
        let delta = wheel_steer_angle(kappa, mount)?;
        let v = wheel_speed_at(speed, kappa, mount);
        Ok(WheelState {
            delta,
            speed: v,
            angular_rate: wheel_angular_rate(v, mount),
        })
    }
}

/// All model quantities at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicSample {
    pub t: f64,
    pub v_lon: f64,
    /// Always zero: the unsteered axle cannot slide sideways.
    pub v_lat: f64,
    pub a_lon: f64,
    pub a_lat: f64,
    pub kappa: f64,
    /// Heading of the motion direction (literal `atan2(det[n, ẋ], nᵀẋ)`).
    pub heading: f64,
    /// Heading of the vehicle front; differs from `heading` by π while reversing.
    pub front_heading: f64,
    pub yaw_rate: f64,
    /// Indexed by [`Wheel::index`].
    pub wheels: [WheelState; 4],
}

impl KinematicSample {
    /// Evaluates every quantity from trajectory derivatives.
    pub fn evaluate(
        t: f64,
        p: &Pose2Derivs,
        geometry: &VehicleGeometry,
        north: Vec2,
    ) -> Result<Self> {
        let frame = tangent_frame(p)?;
        let acc = accelerations(p)?;
        let kappa = curvature(p)?;
        Self::assemble(
            t,
            longitudinal_speed(p),
            acc.lon,
            kappa,
            heading(p, north)?,
            front_heading(&frame, north),
            geometry,
        )
    }

    /// Builds a sample from already known speed, acceleration and curvature.
    /// Lateral acceleration and yaw rate follow from `κ·v²` and `κ·|v|`.
    pub fn assemble(
        t: f64,
        v_lon: f64,
        a_lon: f64,
        kappa: f64,
        heading: f64,
        front_heading: f64,
        geometry: &VehicleGeometry,
    ) -> Result<Self> {
        let speed = libm::fabs(v_lon);
        let mut wheels = [WheelState::default(); 4];
        for wheel in Wheel::ALL {
            wheels[wheel.index()] = WheelState::evaluate(speed, kappa, geometry.mount(wheel))?;
        }
        Ok(KinematicSample {
            t,
            v_lon,
            v_lat: 0.0,
            a_lon,
            a_lat: kappa * v_lon * v_lon,
            kappa,
            heading,
            front_heading,
            yaw_rate: kappa * speed,
            wheels,
        })
    }

    pub fn wheel(&self, wheel: Wheel) -> &WheelState {
        &self.wheels[wheel.index()]
    }
}

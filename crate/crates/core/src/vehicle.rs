//! Vehicle geometry: wheel mounts, wheelbase and steering function.

use crate::calibration::SteeringPolynomial;
use crate::error::{Error, Result};
use crate::model::wheel_steer_angle;

/// The four wheels of a two-axle vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wheel {
    FrontLeft,
    FrontRight,
    RearLeft,
    RearRight,
}

impl Wheel {
    pub const ALL: [Wheel; 4] = [
        Wheel::FrontLeft,
        Wheel::FrontRight,
        Wheel::RearLeft,
        Wheel::RearRight,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Short lowercase label (`fl`, `fr`, `rl`, `rr`).
    pub fn label(self) -> &'static str {
        match self {
            Wheel::FrontLeft => "fl",
            Wheel::FrontRight => "fr",
            Wheel::RearLeft => "rl",
            Wheel::RearRight => "rr",
        }
    }

    pub fn from_label(label: &str) -> Option<Wheel> {
        Wheel::ALL
            .into_iter()
            .find(|w| w.label().eq_ignore_ascii_case(label))
    }

    pub fn is_front(self) -> bool {
        matches!(self, Wheel::FrontLeft | Wheel::FrontRight)
    }

    pub fn is_left(self) -> bool {
        matches!(self, Wheel::FrontLeft | Wheel::RearLeft)
    }
}

/// Mounting point of a wheel relative to the rear-axle center.
///
/// `d_lon` is positive toward the front, `d_lat` positive toward the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WheelMount {
    pub d_lon: f64,
    pub d_lat: f64,
    pub tire_radius: f64,
}

impl WheelMount {
    pub fn new(d_lon: f64, d_lat: f64, tire_radius: f64) -> Result<Self> {
        if !d_lon.is_finite() || !d_lat.is_finite() {
            return Err(Error::NonFinite {
                what: "wheel offset",
            });
        }
        if !(tire_radius > 0.0 && tire_radius.is_finite()) {
            return Err(Error::InvalidParameter("tire radius must be positive"));
        }
        Ok(WheelMount {
            d_lon,
            d_lat,
            tire_radius,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleGeometry {
    wheelbase: f64,
    wheels: [WheelMount; 4],
    steering: SteeringPolynomial,
}

impl VehicleGeometry {
    /// `wheels` is indexed by [`Wheel::index`].
    pub fn new(
        wheelbase: f64,
        wheels: [WheelMount; 4],
        steering: SteeringPolynomial,
    ) -> Result<Self> {
        if !(wheelbase > 0.0 && wheelbase.is_finite()) {
            return Err(Error::InvalidParameter("wheelbase must be positive"));
        }
        Ok(VehicleGeometry {
            wheelbase,
            wheels,
            steering,
        })
    }

    /// Front wheels at `d_lon = wheelbase`, rear wheels on the axle, each
    /// pair centered laterally.
    pub fn symmetric(
        wheelbase: f64,
        track_front: f64,
        track_rear: f64,
        tire_radius: f64,
        steering: SteeringPolynomial,
    ) -> Result<Self> {
        if !(track_front > 0.0 && track_rear > 0.0) {
            return Err(Error::InvalidParameter("track width must be positive"));
        }
        let wheels = [
            WheelMount::new(wheelbase, -0.5 * track_front, tire_radius)?,
            WheelMount::new(wheelbase, 0.5 * track_front, tire_radius)?,
            WheelMount::new(0.0, -0.5 * track_rear, tire_radius)?,
            WheelMount::new(0.0, 0.5 * track_rear, tire_radius)?,
        ];
        Self::new(wheelbase, wheels, steering)
    }

    pub fn wheelbase(&self) -> f64 {
        self.wheelbase
    }

    pub fn mount(&self, wheel: Wheel) -> &WheelMount {
        &self.wheels[wheel.index()]
    }

    pub fn mounts(&self) -> &[WheelMount; 4] {
        &self.wheels
    }

    pub fn steering(&self) -> &SteeringPolynomial {
        &self.steering
    }

    /// Angle of a virtual wheel at `(wheelbase, 0)`: `arctan(ℓ·κ)`.
    pub fn center_wheel_angle(&self, kappa: f64) -> f64 {
        let center = WheelMount {
            d_lon: self.wheelbase,
            d_lat: 0.0,
            tire_radius: 1.0,
        };
        // d_lat = 0 keeps the denominator at 1, so this cannot fail
        wheel_steer_angle(kappa, &center).unwrap_or(0.0)
    }

    /// Steering wheel angle (deg) producing curvature `kappa`.
    pub fn steering_wheel_angle(&self, kappa: f64) -> f64 {
        self.steering.eval(self.center_wheel_angle(kappa))
    }

    /// Curvature commanded by a steering wheel angle (deg):
    /// `κ = tan(f(δ_SWA)) / ℓ` where `f` inverts the steering polynomial.
    pub fn curvature_from_steering(&self, delta_swa: f64) -> Result<f64> {
        let delta = self
            .steering
            .invert(delta_swa)
            .map_err(|_| Error::SteeringOutOfRange { delta_swa })?;
        if libm::fabs(delta) >= core::f64::consts::FRAC_PI_2 {
            return Err(Error::SteeringOutOfRange { delta_swa });
        }
        Ok(libm::tan(delta) / self.wheelbase)
    }
}

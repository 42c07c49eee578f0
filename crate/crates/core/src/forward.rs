//! Trajectory generation from steering wheel angle and longitudinal speed.
//!
//! The state is the position `ξ` and the unit tangent `T`; with
//! `κ = tan(f(δ_SWA)) / ℓ` the model integrates
//!
//! ```text
//! dT/dt = κ·v_lon·N,    dξ/dt = v_lon·T,    N = rot90(T)
//! ```
//!
//! with the classical fixed-step Runge–Kutta scheme. `T` is projected back
//! onto the unit circle after every step.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::trajectory::{KinematicProfile, SampledTrack, SmoothTrajectory, TrackSample};
use crate::vehicle::VehicleGeometry;

/// How controls are evaluated between their samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    #[default]
    Linear,
    ZeroOrderHold,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSample {
    pub t: f64,
    /// Steering wheel angle (deg).
    pub delta_swa: f64,
    /// Signed longitudinal speed (m/s).
    pub v_lon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlProfile {
    samples: Vec<ControlSample>,
    interpolation: Interpolation,
}

impl ControlProfile {
    pub fn new(samples: Vec<ControlSample>, interpolation: Interpolation) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::TooFewSamples { needed: 1, got: 0 });
        }
        if samples
            .iter()
            .any(|s| !(s.t.is_finite() && s.delta_swa.is_finite() && s.v_lon.is_finite()))
        {
            return Err(Error::NonFinite {
                what: "control samples",
            });
        }
        if let Some(i) = samples.windows(2).position(|w| w[1].t <= w[0].t) {
            return Err(Error::NonMonotoneTime { index: i + 1 });
        }
        Ok(ControlProfile {
            samples,
            interpolation,
        })
    }

    pub fn samples(&self) -> &[ControlSample] {
        &self.samples
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    /// Controls at `t` within interval `i` (between samples `i` and `i + 1`).
    fn in_interval(&self, i: usize, t: f64) -> (f64, f64) {
        let a = &self.samples[i];
        match (self.interpolation, self.samples.get(i + 1)) {
            (Interpolation::Linear, Some(b)) => {
                let w = (t - a.t) / (b.t - a.t);
                (
                    a.delta_swa + w * (b.delta_swa - a.delta_swa),
                    a.v_lon + w * (b.v_lon - a.v_lon),
                )
            }
            _ => (a.delta_swa, a.v_lon),
        }
    }
}

/// Position and unit tangent (vehicle front direction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseState {
    pub position: Vec2,
    pub tangent: Vec2,
}

impl PoseState {
    /// Normalizes `tangent`; fails for a zero vector.
    pub fn new(position: Vec2, tangent: Vec2) -> Result<Self> {
        if !position.is_finite() {
            return Err(Error::NonFinite {
                what: "initial position",
            });
        }
        let tangent = tangent
            .normalized()
            .ok_or(Error::InvalidParameter("initial tangent is zero"))?;
        Ok(PoseState { position, tangent })
    }

    /// Pose whose front points `heading` radians counter-clockwise from `north`.
    pub fn from_heading(position: Vec2, heading: f64, north: Vec2) -> Result<Self> {
        let north = north
            .normalized()
            .ok_or(Error::InvalidParameter("north vector is zero"))?;
        Self::new(position, north.rotated(heading))
    }
}

/// One output sample of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratedSample {
    pub t: f64,
    pub position: Vec2,
    pub tangent: Vec2,
    pub v_lon: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntegratedTrack {
    pub samples: Vec<IntegratedSample>,
}

impl IntegratedTrack {
    pub fn last(&self) -> Option<&IntegratedSample> {
        self.samples.last()
    }

    /// Positions as a track, with reverse flags from the sign of `v_lon`
    /// (a sample at rest keeps the previous flag).
    pub fn to_sampled_track(&self) -> Result<SampledTrack> {
        let mut reverse = false;
        let samples = self
            .samples
            .iter()
            .map(|s| {
                if s.v_lon != 0.0 {
                    reverse = s.v_lon < 0.0;
                }
                TrackSample {
                    t: s.t,
                    x: s.position.x,
                    y: s.position.y,
                    quality: None,
                    reverse: Some(reverse),
                }
            })
            .collect();
        SampledTrack::new(samples)
    }
}

/// Integrates the forward model over the span of `controls`, substepping
/// each control interval uniformly with steps no longer than `step`, and
/// reports the state at every control timestamp.
pub fn integrate(
    controls: &ControlProfile,
    geometry: &VehicleGeometry,
    init: PoseState,
    step: f64,
) -> Result<IntegratedTrack> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::NonPositiveStep);
    }
    for c in controls.samples() {
        geometry.curvature_from_steering(c.delta_swa)?;
    }

    let samples = controls.samples();
    let mut out = Vec::with_capacity(samples.len());
    let mut pos = init.position;
    let mut tangent = init.tangent;
    let first = &samples[0];
    out.push(IntegratedSample {
        t: first.t,
        position: pos,
        tangent,
        v_lon: first.v_lon,
        kappa: geometry.curvature_from_steering(first.delta_swa)?,
    });

    for i in 0..samples.len() - 1 {
        let (t0, t1) = (samples[i].t, samples[i + 1].t);
        let n = libm::ceil((t1 - t0) / step - 1e-9).max(1.0) as usize;
        let h = (t1 - t0) / n as f64;
        // rate of change of (ξ, T) at time t
        let rate = |t: f64, tan: Vec2| -> Result<(Vec2, Vec2)> {
            let (swa, v) = controls.in_interval(i, t);
            let kappa = geometry.curvature_from_steering(swa)?;
            Ok((tan * v, tan.perp() * (kappa * v)))
        };
        for k in 0..n {
            let t = t0 + h * k as f64;
            let (dp1, dt1) = rate(t, tangent)?;
            let (dp2, dt2) = rate(t + 0.5 * h, tangent + dt1 * (0.5 * h))?;
            let (dp3, dt3) = rate(t + 0.5 * h, tangent + dt2 * (0.5 * h))?;
            let (dp4, dt4) = rate(t + h, tangent + dt3 * h)?;
            pos += (dp1 + dp2 * 2.0 + dp3 * 2.0 + dp4) * (h / 6.0);
            let next = tangent + (dt1 + dt2 * 2.0 + dt3 * 2.0 + dt4) * (h / 6.0);
            tangent = next.normalized().ok_or(Error::NonFinite {
                what: "integrated tangent",
            })?;
        }
        let end = &samples[i + 1];
        out.push(IntegratedSample {
            t: t1,
            position: pos,
            tangent,
            v_lon: end.v_lon,
            kappa: geometry.curvature_from_steering(end.delta_swa)?,
        });
    }
    Ok(IntegratedTrack { samples: out })
}

/// Controls, re-integrated track and endpoint error of one roundtrip.
#[derive(Debug, Clone, PartialEq)]
pub struct Roundtrip {
    pub controls: ControlProfile,
    pub integrated: IntegratedTrack,
    /// Distance between the integrated and the original end position (m).
    pub endpoint_error: f64,
}

/// Extracts `(δ_SWA, v_lon)` from `traj` on `[t0, t1]` (at the window ends
/// and every knot in between), integrates them from the trajectory's pose
/// at `t0` and compares the end positions.
pub fn roundtrip_window(
    traj: &SmoothTrajectory,
    geometry: &VehicleGeometry,
    t0: f64,
    t1: f64,
    step: f64,
) -> Result<Roundtrip> {
    let times = window_times(traj, t0, t1)?;
    let profile = traj.extract_profile(geometry, Vec2::new(0.0, 1.0), &times)?;
    roundtrip_profile(traj, geometry, &profile, step)
}

/// Sample times used for a roundtrip over `[t0, t1]`.
pub fn window_times(traj: &SmoothTrajectory, t0: f64, t1: f64) -> Result<Vec<f64>> {
    if !(t1 > t0) {
        return Err(Error::InvalidParameter(
            "roundtrip window must have positive length",
        ));
    }
    let mut times = Vec::new();
    times.push(t0);
    times.extend(traj.knots().iter().copied().filter(|&k| k > t0 && k < t1));
    times.push(t1);
    Ok(times)
}

/// Roundtrip from an already extracted profile of `traj`; the profile's
/// first and last sample delimit the window.
pub fn roundtrip_profile(
    traj: &SmoothTrajectory,
    geometry: &VehicleGeometry,
    profile: &KinematicProfile,
    step: f64,
) -> Result<Roundtrip> {
    let (first, last) = match (profile.samples.first(), profile.samples.last()) {
        (Some(a), Some(b)) if profile.len() >= 2 => (a.sample.t, b.sample.t),
        _ => {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: profile.len(),
            })
        }
    };
    let controls = ControlProfile::new(
        profile
            .samples
            .iter()
            .map(|s| ControlSample {
                t: s.sample.t,
                delta_swa: s.delta_swa,
                v_lon: s.sample.v_lon,
            })
            .collect(),
        Interpolation::Linear,
    )?;
    let start = traj.eval_derivs(first)?;
    let init = PoseState::new(start.position, traj.tangent_at(first)?)?;
    let integrated = integrate(&controls, geometry, init, step)?;
    let reached = integrated
        .last()
        .map(|s| s.position)
        .unwrap_or(init.position);
    let target = traj.eval_derivs(last)?.position;
    Ok(Roundtrip {
        controls,
        integrated,
        endpoint_error: reached.distance(target),
    })
}

/// Endpoint error `E` of the analyze→integrate roundtrip over the whole trajectory.
pub fn roundtrip_check(
    traj: &SmoothTrajectory,
    geometry: &VehicleGeometry,
    step: f64,
) -> Result<f64> {
    roundtrip_window(traj, geometry, traj.start(), traj.end(), step).map(|r| r.endpoint_error)
}

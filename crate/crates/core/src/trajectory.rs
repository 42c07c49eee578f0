//! From sampled positions to a C² trajectory with analytic derivatives.
//!
//! [`SmoothTrajectory::fit`] fits one smoothing spline per coordinate, finds
//! the intervals where the vehicle (nearly) stands still, decides the
//! reverse-gear state on every driving segment and, where possible, fills the
//! tangent across each stop so that the vehicle front direction stays
//! continuous through stops and cusps.

use alloc::vec::Vec;

use log::debug;

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::model::{self, KinematicSample, Pose2Derivs, ZERO_VELOCITY_THRESHOLD};
use crate::spline::{CubicSpline, SplinePoint, MIN_SAMPLES};
use crate::vehicle::VehicleGeometry;

/// One raw position observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// `Some(false)` marks a sample as unreliable (e.g. occluded GNSS).
    pub quality: Option<bool>,
    /// Explicit reverse-gear flag, if the source records one.
    pub reverse: Option<bool>,
}

impl TrackSample {
    pub fn new(t: f64, x: f64, y: f64) -> Self {
        TrackSample {
            t,
            x,
            y,
            quality: None,
            reverse: None,
        }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

/// Time-ordered position samples with strictly increasing timestamps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampledTrack {
    samples: Vec<TrackSample>,
}

impl SampledTrack {
    pub fn new(samples: Vec<TrackSample>) -> Result<Self> {
        if samples
            .iter()
            .any(|s| !(s.t.is_finite() && s.x.is_finite() && s.y.is_finite()))
        {
            return Err(Error::NonFinite {
                what: "track samples",
            });
        }
        if let Some(i) = samples.windows(2).position(|w| w[1].t <= w[0].t) {
            return Err(Error::NonMonotoneTime { index: i + 1 });
        }
        Ok(SampledTrack { samples })
    }

    pub fn samples(&self) -> &[TrackSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    /// True when every sample carries an explicit reverse flag.
    pub fn has_reverse_flags(&self) -> bool {
        !self.samples.is_empty() && self.samples.iter().all(|s| s.reverse.is_some())
    }

    pub fn into_samples(self) -> Vec<TrackSample> {
        self.samples
    }
}

/// Tuning knobs of [`SmoothTrajectory::fit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Smoothing weight λ; zero interpolates the samples.
    pub lambda: f64,
    /// Speeds below this count as standing still (m/s).
    pub stop_speed: f64,
    /// Largest tangent mismatch across a stop that can still be filled (rad).
    pub fill_angle: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            lambda: 0.0,
            stop_speed: 0.05,
            fill_angle: 5f64.to_radians(),
        }
    }
}

/// A maximal interval where the speed stays below the stop threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopInterval {
    pub start: f64,
    pub end: f64,
    /// Unit direction of motion where the vehicle enters the stop; `None` at the data start.
    pub entry_direction: Option<Vec2>,
    /// Unit direction of motion where the vehicle leaves the stop; `None` at the data end.
    pub exit_direction: Option<Vec2>,
    /// Tangent held constant over the stop, if the one-sided tangents agree.
    pub fill: Option<Vec2>,
}

impl StopInterval {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }

    pub fn is_resolved(&self) -> bool {
        self.fill.is_some()
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.start + self.end)
    }
}

/// Piecewise constant reverse-gear function `R(t)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReverseProfile {
    initial: bool,
    /// `(time, value)`: from `time` on, `R = value`.
    switches: Vec<(f64, bool)>,
}

impl ReverseProfile {
    pub fn constant(value: bool) -> Self {
        ReverseProfile {
            initial: value,
            switches: Vec::new(),
        }
    }

    pub fn with_switches(initial: bool, switches: Vec<(f64, bool)>) -> Self {
        ReverseProfile { initial, switches }
    }

    pub fn at(&self, t: f64) -> bool {
        let idx = self.switches.partition_point(|&(ts, _)| ts <= t);
        if idx == 0 {
            self.initial
        } else {
            self.switches[idx - 1].1
        }
    }

    pub fn switches(&self) -> &[(f64, bool)] {
        &self.switches
    }

    pub fn initial(&self) -> bool {
        self.initial
    }
}

/// A C² trajectory of the rear-axle center with reverse-gear information.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothTrajectory {
    x: CubicSpline,
    y: CubicSpline,
    reverse: ReverseProfile,
    explicit_reverse: bool,
    stops: Vec<StopInterval>,
    options: FitOptions,
}

impl SmoothTrajectory {
    /// Fits smoothing splines to `track`, detects stops, assigns `R(t)`
    /// (from the track's reverse flags when every sample has one, inferred
    /// otherwise) and resolves the fill tangents.
    pub fn fit(track: &SampledTrack, options: FitOptions) -> Result<Self> {
        if !(options.stop_speed > 0.0) || !(options.fill_angle >= 0.0) {
            return Err(Error::InvalidParameter("stop speed must be positive"));
        }
        let n = track.len();
        if n < MIN_SAMPLES {
            return Err(Error::TooFewSamples {
                needed: MIN_SAMPLES,
                got: n,
            });
        }
        let t: Vec<f64> = track.samples.iter().map(|s| s.t).collect();
        let xs: Vec<f64> = track.samples.iter().map(|s| s.x).collect();
        let ys: Vec<f64> = track.samples.iter().map(|s| s.y).collect();
        let x = CubicSpline::fit(&t, &xs, options.lambda)?;
        let y = CubicSpline::fit(&t, &ys, options.lambda)?;

        let mut traj = SmoothTrajectory {
            x,
            y,
            reverse: ReverseProfile::default(),
            explicit_reverse: false,
            stops: Vec::new(),
            options,
        };
        traj.stops = traj.find_stops(options.stop_speed);
        if track.has_reverse_flags() {
            traj.reverse = reverse_from_flags(track, &traj.stops);
            traj.explicit_reverse = true;
        } else {
            traj.reverse = traj.infer_reverse();
        }
        let resolved: Vec<StopInterval> = traj.stops.iter().map(|s| traj.resolve(*s)).collect();
        traj.stops = resolved;
        Ok(traj)
    }

    pub fn start(&self) -> f64 {
        self.x.start()
    }

    pub fn end(&self) -> f64 {
        self.x.end()
    }

    pub fn knots(&self) -> &[f64] {
        self.x.knots()
    }

    pub fn options(&self) -> &FitOptions {
        &self.options
    }

    pub fn reverse_profile(&self) -> &ReverseProfile {
        &self.reverse
    }

    pub fn stops(&self) -> &[StopInterval] {
        &self.stops
    }

    /// Per-coordinate splines `(x(t), y(t))`.
    pub fn splines(&self) -> (&CubicSpline, &CubicSpline) {
        (&self.x, &self.y)
    }

    /// Position, velocity, acceleration and `R(t)` on the closed domain.
    pub fn eval_derivs(&self, t: f64) -> Result<Pose2Derivs> {
        let i = self.x.segment_index(t).ok_or(Error::OutOfDomain {
            t,
            start: self.start(),
            end: self.end(),
        })?;
        let (px, py) = self.eval_segment(i, t);
        Ok(Pose2Derivs {
            position: Vec2::new(px.value, py.value),
            velocity: Vec2::new(px.d1, py.d1),
            acceleration: Vec2::new(px.d2, py.d2),
            reverse: self.reverse.at(t),
        })
    }

    fn eval_segment(&self, i: usize, t: f64) -> (SplinePoint, SplinePoint) {
        (self.x.eval_segment(i, t), self.y.eval_segment(i, t))
    }

    fn speed_in_segment(&self, i: usize, t: f64) -> f64 {
        let (px, py) = self.eval_segment(i, t);
        libm::hypot(px.d1, py.d1)
    }

    /// Stop interval containing `t`, if any.
    pub fn stop_at(&self, t: f64) -> Option<&StopInterval> {
        self.stops.iter().find(|s| s.contains(t))
    }

    /// Maximal intervals with `‖ẋ‖ < v_eps`, with fill tangents resolved
    /// against the current `R(t)`.
    pub fn detect_stops(&self, v_eps: f64) -> Vec<StopInterval> {
        self.find_stops(v_eps)
            .into_iter()
            .map(|s| self.resolve(s))
            .collect()
    }

    fn find_stops(&self, v_eps: f64) -> Vec<StopInterval> {
        // Speed is scanned on a fine grid inside every spline segment and the
        // threshold crossings are refined by bisection.
        const SUBDIVISIONS: usize = 16;
        let knots = self.x.knots();
        let mut stops = Vec::new();
        let mut open: Option<f64> = None;
        let mut prev: Option<(f64, bool)> = None;

        for i in 0..self.x.segment_count() {
            let (a, b) = (knots[i], knots[i + 1]);
            let first = if i == 0 { 0 } else { 1 };
            for k in first..=SUBDIVISIONS {
                let t = if k == SUBDIVISIONS {
                    b
                } else {
                    a + (b - a) * k as f64 / SUBDIVISIONS as f64
                };
                let below = self.speed_in_segment(i, t) < v_eps;
                match prev {
                    None => {
                        if below {
                            open = Some(t);
                        }
                    }
                    Some((pt, pbelow)) if pbelow != below => {
                        // pt is in segment i or on its left knot, where the
                        // neighbouring polynomials agree
                        let crossing = self.bisect_speed(i, pt, t, v_eps, pbelow);
                        if below {
                            open = Some(crossing);
                        } else if let Some(start) = open.take() {
                            stops.push(self.stop_between(start, crossing));
                        }
                    }
                    _ => {}
                }
                prev = Some((t, below));
            }
        }
        if let Some(start) = open {
            stops.push(self.stop_between(start, self.end()));
        }
        stops
    }

    fn bisect_speed(
        &self,
        seg: usize,
        mut lo: f64,
        mut hi: f64,
        v_eps: f64,
        lo_below: bool,
    ) -> f64 {
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let below = self.speed_in_segment(seg, mid) < v_eps;
            if below == lo_below {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // report the endpoint on the "moving" side so its direction is defined
        if lo_below {
            hi
        } else {
            lo
        }
    }

    fn stop_between(&self, start: f64, end: f64) -> StopInterval {
        let direction = |t: f64| -> Option<Vec2> {
            self.eval_derivs(t)
                .ok()
                .and_then(|p| p.velocity.normalized())
        };
        StopInterval {
            start,
            end,
            entry_direction: if start > self.start() {
                direction(start)
            } else {
                None
            },
            exit_direction: if end < self.end() {
                direction(end)
            } else {
                None
            },
            fill: None,
        }
    }

    /// Applies the fill rule: the stop keeps a constant tangent when the
    /// tangents entering and leaving it agree within the fill angle.
    fn resolve(&self, mut stop: StopInterval) -> StopInterval {
        let sign = |t: f64| if self.reverse.at(t) { -1.0 } else { 1.0 };
        let entry = stop.entry_direction.map(|d| d * sign(stop.start));
        let exit = stop.exit_direction.map(|d| d * sign(stop.end));
        stop.fill = match (entry, exit) {
            (Some(a), Some(b)) => {
                if a.angle_to(b) <= self.options.fill_angle {
                    (a + b).normalized()
                } else {
                    None
                }
            }
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b),
            (None, None) => None,
        };
        stop
    }

    /// Reverse-gear function chosen so that the tangent stays continuous:
    /// `R` flips across a stop iff the direction of motion turns by more
    /// than 90° there. The first driving segment is taken as forward.
    /// Explicit flags from the input track are returned unchanged.
    pub fn infer_reverse(&self) -> ReverseProfile {
        if self.explicit_reverse {
            return self.reverse.clone();
        }
        let mut current = false;
        let mut switches = Vec::new();
        for stop in &self.stops {
            match (stop.entry_direction, stop.exit_direction) {
                (Some(a), Some(b)) => {
                    if a.dot(b) < 0.0 {
                        current = !current;
                        switches.push((stop.midpoint(), current));
                    }
                }
                _ => debug!(
                    "stop [{}, {}] touches the data boundary, keeping reverse = {}",
                    stop.start, stop.end, current
                ),
            }
        }
        ReverseProfile::with_switches(false, switches)
    }

    /// Vehicle-front tangent `T(t)`, using the fill tangent inside stops.
    pub fn tangent_at(&self, t: f64) -> Result<Vec2> {
        if let Some(stop) = self.stop_at(t) {
            return stop.fill.ok_or(Error::UnresolvableInterval {
                start: stop.start,
                end: stop.end,
            });
        }
        let p = self.eval_derivs(t)?;
        Ok(model::tangent_frame(&p)?.tangent)
    }

    /// All model quantities at `times`, plus the steering wheel angle that
    /// the vehicle's steering function assigns to the virtual center wheel.
    ///
    /// Inside a resolved stop the tangent is the fill tangent, speed and
    /// longitudinal acceleration are projections onto it, and the curvature
    /// is held from the nearer stop boundary. Curvature near the ends of the
    /// domain is biased toward zero by the natural end conditions.
    pub fn extract_profile(
        &self,
        geometry: &VehicleGeometry,
        north: Vec2,
        times: &[f64],
    ) -> Result<KinematicProfile> {
        let samples = times
            .iter()
            .map(|&t| self.profile_sample(geometry, north, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(KinematicProfile { samples })
    }

    fn profile_sample(
        &self,
        geometry: &VehicleGeometry,
        north: Vec2,
        t: f64,
    ) -> Result<ProfileSample> {
        let p = self.eval_derivs(t)?;
        let sample = match self.stop_at(t) {
            None => KinematicSample::evaluate(t, &p, geometry, north)?,
            Some(stop) => {
                let fill = stop.fill.ok_or(Error::UnresolvableInterval {
                    start: stop.start,
                    end: stop.end,
                })?;
                let v_lon = fill.dot(p.velocity);
                let a_lon = fill.dot(p.acceleration);
                let kappa = self.held_curvature(stop, t)?;
                let motion = if p.speed() >= ZERO_VELOCITY_THRESHOLD {
                    p.velocity
                } else {
                    fill * p.direction_sign()
                };
                let frame = model::TangentFrame::from_tangent(fill);
                let heading = model::heading(
                    &Pose2Derivs {
                        velocity: motion,
                        ..p
                    },
                    north,
                )?;
                KinematicSample::assemble(
                    t,
                    v_lon,
                    a_lon,
                    kappa,
                    heading,
                    model::front_heading(&frame, north),
                    geometry,
                )?
            }
        };
        Ok(ProfileSample {
            sample,
            position: p.position,
            reverse: p.reverse,
            delta_center: geometry.center_wheel_angle(sample.kappa),
            delta_swa: geometry.steering_wheel_angle(sample.kappa),
        })
    }

    fn held_curvature(&self, stop: &StopInterval, t: f64) -> Result<f64> {
        let use_start = match (
            stop.entry_direction.is_some(),
            stop.exit_direction.is_some(),
        ) {
            (true, true) => t - stop.start <= stop.end - t,
            (true, false) => true,
            (false, true) => false,
            (false, false) => {
                return Err(Error::UnresolvableInterval {
                    start: stop.start,
                    end: stop.end,
                })
            }
        };
        let edge = if use_start { stop.start } else { stop.end };
        model::curvature(&self.eval_derivs(edge)?)
    }

    /// Cumulative arc length at every knot.
    pub fn arc_length(&self) -> ArcLength<'_> {
        let knots = self.x.knots();
        let mut cumulative = Vec::with_capacity(knots.len());
        let mut total = 0.0;
        cumulative.push(0.0);
        for i in 0..self.x.segment_count() {
            total += self.segment_arc_length(i, knots[i], knots[i + 1]);
            cumulative.push(total);
        }
        ArcLength {
            traj: self,
            cumulative,
        }
    }

    fn segment_arc_length(&self, seg: usize, a: f64, b: f64) -> f64 {
        // 5-point Gauss–Legendre on two halves of [a, b]
        const NODES: [f64; 5] = [
            -0.906_179_845_938_664,
            -0.538_469_310_105_683,
            0.0,
            0.538_469_310_105_683,
            0.906_179_845_938_664,
        ];
        const WEIGHTS: [f64; 5] = [
            0.236_926_885_056_189,
            0.478_628_670_499_366,
            0.568_888_888_888_889,
            0.478_628_670_499_366,
            0.236_926_885_056_189,
        ];
        let mut sum = 0.0;
        let mid = 0.5 * (a + b);
        for (lo, hi) in [(a, mid), (mid, b)] {
            let half = 0.5 * (hi - lo);
            let center = 0.5 * (hi + lo);
            for (x, w) in NODES.iter().zip(WEIGHTS) {
                sum += w * half * self.speed_in_segment(seg, center + half * x);
            }
        }
        sum
    }
}

fn reverse_from_flags(track: &SampledTrack, stops: &[StopInterval]) -> ReverseProfile {
    let samples = track.samples();
    let initial = samples[0].reverse.unwrap_or(false);
    let mut current = initial;
    let mut switches = Vec::new();
    for w in samples.windows(2) {
        let flag = w[1].reverse.unwrap_or(current);
        if flag != current {
            let (t0, t1) = (w[0].t, w[1].t);
            let at = stops
                .iter()
                .find(|s| s.start <= t1 && s.end >= t0)
                .map(StopInterval::midpoint)
                .unwrap_or(0.5 * (t0 + t1));
            switches.push((at, flag));
            current = flag;
        }
    }
    ReverseProfile::with_switches(initial, switches)
}

/// Arc length as a function of time along a [`SmoothTrajectory`].
#[derive(Debug, Clone)]
pub struct ArcLength<'a> {
    traj: &'a SmoothTrajectory,
    cumulative: Vec<f64>,
}

impl ArcLength<'_> {
    pub fn total(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    /// Arc length from the trajectory start to `t`.
    pub fn at(&self, t: f64) -> Result<f64> {
        let traj = self.traj;
        let i = traj.x.segment_index(t).ok_or(Error::OutOfDomain {
            t,
            start: traj.start(),
            end: traj.end(),
        })?;
        let k0 = traj.x.knots()[i];
        Ok(self.cumulative[i] + traj.segment_arc_length(i, k0, t))
    }

    /// Time at which the arc length reaches `s` (clamped to the domain).
    pub fn time_at(&self, s: f64) -> f64 {
        let traj = self.traj;
        let knots = traj.x.knots();
        if s <= 0.0 {
            return traj.start();
        }
        if s >= self.total() {
            return traj.end();
        }
        let i = (self.cumulative.partition_point(|&c| c <= s) - 1).min(knots.len() - 2);
        let (mut lo, mut hi) = (knots[i], knots[i + 1]);
        let target = s - self.cumulative[i];
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if traj.segment_arc_length(i, knots[i], mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Model quantities at one time plus position and steering wheel angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub sample: KinematicSample,
    pub position: Vec2,
    pub reverse: bool,
    /// Angle of the virtual center front wheel, `arctan(ℓ·κ)` (rad).
    pub delta_center: f64,
    /// Steering wheel angle from the steering function (deg).
    pub delta_swa: f64,
}

/// Time series of [`ProfileSample`]s.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KinematicProfile {
    pub samples: Vec<ProfileSample>,
}

impl KinematicProfile {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.sample.t).collect()
    }

    /// Extracts one channel with `f`.
    pub fn channel(&self, f: impl Fn(&ProfileSample) -> f64) -> Vec<f64> {
        self.samples.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::SteeringPolynomial;
    use core::f64::consts::PI;

    fn track_from(f: impl Fn(f64) -> (f64, f64), t0: f64, t1: f64, rate: f64) -> SampledTrack {
        let n = ((t1 - t0) * rate).round() as usize;
        let samples = (0..=n)
            .map(|i| {
                let t = t0 + i as f64 / rate;
                let (x, y) = f(t);
                TrackSample::new(t, x, y)
            })
            .collect();
        SampledTrack::new(samples).unwrap()
    }

    fn geometry() -> VehicleGeometry {
        let steering = SteeringPolynomial::linear(1.0, (-1.2, 1.2)).unwrap();
        VehicleGeometry::symmetric(2.5, 1.5, 1.5, 0.3, steering).unwrap()
    }

    const NORTH: Vec2 = Vec2 { x: 0.0, y: 1.0 };

    #[test]
    fn straight_line_has_no_acceleration() {
        let track = track_from(|t| (t, 2.0 * t), 0.0, 9.9, 10.0);
        let traj = SmoothTrajectory::fit(&track, FitOptions::default()).unwrap();
        for k in 0..=99 {
            let p = traj.eval_derivs(k as f64 * 0.1).unwrap();
            assert!(p.acceleration.norm() < 1e-9);
        }
        assert!(traj.stops().is_empty());
    }

    #[test]
    fn eval_domain_is_closed() {
        let track = track_from(|t| (t, 0.0), 0.0, 1.0, 10.0);
        let traj = SmoothTrajectory::fit(&track, FitOptions::default()).unwrap();
        assert!(traj.eval_derivs(1.0).is_ok());
        assert!(traj.eval_derivs(0.0).is_ok());
        assert!(matches!(
            traj.eval_derivs(1.0 + 1e-9),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(matches!(
            traj.eval_derivs(-1e-9),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn circle_fit_recovers_curvature() {
        let (r, v) = (20.0, 10.0);
        let w = v / r;
        let track = track_from(|t| (r * (w * t).cos(), r * (w * t).sin()), 0.0, 10.0, 100.0);
        let traj = SmoothTrajectory::fit(&track, FitOptions::default()).unwrap();
        for k in 0..=800 {
            let t = 1.0 + k as f64 * 0.01;
            let kappa = model::curvature(&traj.eval_derivs(t).unwrap()).unwrap();
            assert!((kappa - 0.05).abs() / 0.05 < 1e-3, "t = {t}: {kappa}");
        }
    }

    #[test]
    fn stop_and_resume_on_same_heading_is_filled() {
        // s(t) = t − sin t stops instantaneously at 2π without turning
        let dir = Vec2::new(1.0, 1.0).normalized().unwrap();
        let track = track_from(
            |t| {
                let s = t - t.sin();
                (s * dir.x, s * dir.y)
            },
            1.0,
            12.0,
            10.0,
        );
        let traj = SmoothTrajectory::fit(&track, FitOptions::default()).unwrap();
        assert_eq!(traj.stops().len(), 1);
        let stop = traj.stops()[0];
        assert!(stop.contains(2.0 * PI));
        let fill = stop.fill.expect("resolved");
        assert!(fill.angle_to(dir) < 1e-3);
        assert!(traj.reverse_profile().switches().is_empty());
    }

    #[test]
    fn turning_at_rest_is_unresolvable() {
        // east until t = 5, then north; position does not move while turning
        let track = track_from(
            |t| {
                let e = (5.0 - t).max(0.0);
                let n = (t - 5.0).max(0.0);
                (-e * e * e, n * n * n)
            },
            3.0,
            7.0,
            20.0,
        );
        let traj = SmoothTrajectory::fit(&track, FitOptions::default()).unwrap();
        assert_eq!(traj.stops().len(), 1);
        let stop = traj.stops()[0];
        assert!(!stop.is_resolved());
        assert!(matches!(
            traj.tangent_at(5.0),
            Err(Error::UnresolvableInterval { .. })
        ));
        let err = traj
            .extract_profile(&geometry(), NORTH, &[5.0])
            .unwrap_err();
        assert!(matches!(err, Error::UnresolvableInterval { .. }));
    }

    fn cusp_track() -> SampledTrack {
        // forward 10 m along an arc, stop, retrace backwards
        track_from(
            |t| {
                let u = (t - 5.0) / 5.0;
                let s = 10.0 - 10.0 * u * u;
                (30.0 * (s / 30.0).sin(), 30.0 * (1.0 - (s / 30.0).cos()))
            },
            0.0,
            10.0,
            20.0,
        )
    }

    #[test]
    fn cusp_infers_reverse_and_keeps_tangent_continuous() {
        let traj = SmoothTrajectory::fit(&cusp_track(), FitOptions::default()).unwrap();
        assert_eq!(traj.stops().len(), 1);
        let stop = traj.stops()[0];
        assert!(stop.is_resolved());
        assert!(!traj.reverse_profile().at(2.0));
        assert!(traj.reverse_profile().at(8.0));
        let before = traj.tangent_at(stop.start - 1e-6).unwrap();
        let after = traj.tangent_at(stop.end + 1e-6).unwrap();
        assert!(before.angle_to(after) < 5f64.to_radians());
    }

    #[test]
    fn explicit_reverse_flags_pass_through() {
        let mut samples = cusp_track().into_samples();
        for s in samples.iter_mut() {
            s.reverse = Some(false);
        }
        let track = SampledTrack::new(samples).unwrap();
        let traj = SmoothTrajectory::fit(&track, FitOptions::default()).unwrap();
        assert_eq!(traj.infer_reverse(), ReverseProfile::constant(false));
        // flags say forward throughout, so the tangent flips at the cusp
        assert!(!traj.stops()[0].is_resolved());
    }

    #[test]
    fn monotone_drive_is_forward() {
        let track = track_from(|t| (t * t + t, 0.5 * t), 0.0, 5.0, 10.0);
        let traj = SmoothTrajectory::fit(&track, FitOptions::default()).unwrap();
        assert_eq!(traj.infer_reverse(), ReverseProfile::constant(false));
    }

    #[test]
    fn profile_on_straight_track() {
        let track = track_from(|t| (3.0 * t, 4.0 * t), 0.0, 5.0, 10.0);
        let traj = SmoothTrajectory::fit(&track, FitOptions::default()).unwrap();
        let profile = traj
            .extract_profile(&geometry(), NORTH, &track.times())
            .unwrap();
        for s in &profile.samples {
            assert!(s.sample.kappa.abs() < 1e-9);
            assert!(s.delta_swa.abs() < 1e-9);
            for w in s.sample.wheels {
                assert!((w.speed - 5.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn profile_on_circle_gives_constant_steering() {
        let (r, v) = (10.0, 5.0);
        let w = v / r;
        let track = track_from(
            |t| (r * (w * t).sin(), r * (1.0 - (w * t).cos())),
            0.0,
            12.0,
            100.0,
        );
        let traj = SmoothTrajectory::fit(&track, FitOptions::default()).unwrap();
        let times: Vec<f64> = (0..=80).map(|k| 2.0 + k as f64 * 0.1).collect();
        let profile = traj.extract_profile(&geometry(), NORTH, &times).unwrap();
        for s in &profile.samples {
            assert!(
                (s.delta_swa - 0.25f64.atan()).abs() < 1e-4,
                "{}",
                s.delta_swa
            );
            assert!((s.delta_swa - 0.244979).abs() < 1e-4);
        }
    }

    #[test]
    fn profile_in_reverse() {
        let mut samples = track_from(|t| (10.0 - 2.0 * t, 1.0), 0.0, 4.0, 10.0).into_samples();
        for s in samples.iter_mut() {
            s.reverse = Some(true);
        }
        let track = SampledTrack::new(samples).unwrap();
        let traj = SmoothTrajectory::fit(&track, FitOptions::default()).unwrap();
        let profile = traj
            .extract_profile(&geometry(), NORTH, &track.times())
            .unwrap();
        for s in &profile.samples {
            assert!((s.sample.v_lon + 2.0).abs() < 1e-9);
            assert!(s.sample.kappa.abs() < 1e-12);
            // vehicle faces +x while moving toward −x
            assert!((s.sample.front_heading + PI / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn arc_length_of_circle() {
        let r = 20.0;
        let track = track_from(
            |t| (r * (0.5 * t).cos(), r * (0.5 * t).sin()),
            0.0,
            10.0,
            100.0,
        );
        let traj = SmoothTrajectory::fit(&track, FitOptions::default()).unwrap();
        let arc = traj.arc_length();
        assert!((arc.total() - 100.0).abs() < 1e-6);
        assert!((arc.at(4.0).unwrap() - 40.0).abs() < 1e-6);
        let s4 = arc.at(4.0).unwrap();
        assert!((arc.time_at(s4) - 4.0).abs() < 1e-9);
    }

    #[test]
    fn non_monotone_track_rejected() {
        let samples = alloc::vec![
            TrackSample::new(0.0, 0.0, 0.0),
            TrackSample::new(1.0, 1.0, 0.0),
            TrackSample::new(1.0, 2.0, 0.0),
        ];
        assert_eq!(
            SampledTrack::new(samples),
            Err(Error::NonMonotoneTime { index: 2 })
        );
    }
}

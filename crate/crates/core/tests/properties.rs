use std::f64::consts::PI;

use c2model::calibration::{compare_channels, SteeringPolynomial};
use c2model::forward::{integrate, ControlProfile, ControlSample, Interpolation, PoseState};
use c2model::model::{self, KinematicSample, Pose2Derivs, TangentFrame};
use c2model::spline::CubicSpline;
use c2model::vehicle::{VehicleGeometry, Wheel, WheelMount};
use c2model::Vec2;
use num_complex::Complex64;
use proptest::prelude::*;

/// x(t) = a0 + a1 t + a2 t² + a3 sin(ω t), y(t) = b0 + b1 t + b2 t² + b3 cos(ω t)
#[derive(Debug, Clone, Copy)]
struct Curve {
    a: [f64; 4],
    b: [f64; 4],
    w: f64,
}

impl Curve {
    fn velocity_c(&self, t: Complex64) -> [Complex64; 2] {
        let (a, b, w) = (self.a, self.b, self.w);
        [
            a[1] + 2.0 * a[2] * t + a[3] * w * (w * t).cos(),
            b[1] + 2.0 * b[2] * t - b[3] * w * (w * t).sin(),
        ]
    }

    fn derivs(&self, t: f64, reverse: bool) -> Pose2Derivs {
        let (a, b, w) = (self.a, self.b, self.w);
        let pos = Vec2::new(
            a[0] + a[1] * t + a[2] * t * t + a[3] * (w * t).sin(),
            b[0] + b[1] * t + b[2] * t * t + b[3] * (w * t).cos(),
        );
        let v = self.velocity_c(Complex64::new(t, 0.0));
        let acc = Vec2::new(
            2.0 * a[2] - a[3] * w * w * (w * t).sin(),
            2.0 * b[2] - b[3] * w * w * (w * t).cos(),
        );
        Pose2Derivs::new(pos, Vec2::new(v[0].re, v[1].re), acc, reverse).unwrap()
    }

    /// dT/dt by complex step on the unit tangent (sign for reverse applied outside).
    fn tangent_rate_oracle(&self, t: f64) -> Vec2 {
        let h = 1e-30;
        let v = self.velocity_c(Complex64::new(t, h));
        let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
        Vec2::new((v[0] / norm).im / h, (v[1] / norm).im / h)
    }
}

fn curve() -> impl Strategy<Value = Curve> {
    let c = -5.0..5.0f64;
    (
        prop::array::uniform4(c.clone()),
        prop::array::uniform4(c),
        0.1..2.0f64,
    )
        .prop_map(|(a, b, w)| Curve { a, b, w })
}

fn geometry_strategy() -> impl Strategy<Value = VehicleGeometry> {
    (1.5..4.0f64, 1.0..2.2f64, 1.0..2.2f64, 0.2..0.45f64).prop_map(|(l, tf, tr, r)| {
        let steering = SteeringPolynomial::linear(900.0, (-0.7, 0.7)).unwrap();
        VehicleGeometry::symmetric(l, tf, tr, r, steering).unwrap()
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lateral_acceleration_is_kappa_v_squared(c in curve(), t in -3.0..3.0f64, rev: bool) {
        let p = c.derivs(t, rev);
        prop_assume!(p.speed() > 0.1);
        let acc = model::accelerations(&p).unwrap();
        let kappa = model::curvature(&p).unwrap();
        let v = model::longitudinal_speed(&p);
        let scale = p.acceleration.norm() + 1.0;
        prop_assert!(close(acc.lat, kappa * v * v, 1e-12 * scale));
        prop_assert!(close(model::yaw_rate(&p).unwrap(), kappa * p.speed(), 1e-12 * scale / p.speed()));
        prop_assert!(close(acc.lon.hypot(acc.lat), p.acceleration.norm(), 1e-12 * scale));
    }

    #[test]
    fn curvature_forms_agree(c in curve(), t in -3.0..3.0f64, rev: bool) {
        let p = c.derivs(t, rev);
        prop_assume!(p.speed() > 0.1);
        let frame = model::tangent_frame(&p).unwrap();
        let sign = p.direction_sign();
        let rate = c.tangent_rate_oracle(t) * sign;
        let speed = p.speed();
        let k_det = model::curvature(&p).unwrap();
        let k_rate = model::curvature_from_tangent_rate(&frame, rate, model::longitudinal_speed(&p));
        // arc length runs backwards while reversing: ds = v_lon dt
        let k_arc = model::curvature_from_arc_derivative(&frame, rate * (1.0 / model::longitudinal_speed(&p)));
        let scale = k_det.abs() + p.acceleration.norm() / (speed * speed);
        prop_assert!(close(k_det, k_rate, 1e-10 * scale), "{k_det} vs {k_rate}");
        prop_assert!(close(k_det, k_arc, 1e-10 * scale), "{k_det} vs {k_arc}");
        let analytic_rate = model::tangent_rate(&p).unwrap();
        prop_assert!((analytic_rate - rate).norm() <= 1e-10 * scale * speed);
    }

    #[test]
    fn inner_wheel_steers_more(g in geometry_strategy(), k in 1e-6..0.2f64, left: bool) {
        let kappa = if left { k } else { -k };
        let fl = model::wheel_steer_angle(kappa, g.mount(Wheel::FrontLeft)).unwrap();
        let fr = model::wheel_steer_angle(kappa, g.mount(Wheel::FrontRight)).unwrap();
        let (inner, outer) = if left { (fl, fr) } else { (fr, fl) };
        prop_assert!(inner.abs() > outer.abs());
        prop_assert!(fl.signum() == kappa.signum() && fr.signum() == kappa.signum());
        // the virtual center wheel lies between both
        let center = g.center_wheel_angle(kappa).abs();
        prop_assert!(inner.abs() > center && center > outer.abs());
        // inner wheel on the tighter circle turns slower
        let vi = model::wheel_speed_at(10.0, kappa, g.mount(if left { Wheel::RearLeft } else { Wheel::RearRight })).abs();
        let vo = model::wheel_speed_at(10.0, kappa, g.mount(if left { Wheel::RearRight } else { Wheel::RearLeft })).abs();
        prop_assert!(vi < vo);
    }

    #[test]
    fn steer_angle_continuous_at_zero(g in geometry_strategy()) {
        for w in Wheel::ALL {
            for k in [1e-9, -1e-9, 0.0] {
                prop_assert!(model::wheel_steer_angle(k, g.mount(w)).unwrap().abs() < 1e-8);
            }
        }
    }

    #[test]
    fn rigid_motion_equivariance(
        c in curve(), t in -3.0..3.0f64, rev: bool,
        theta in -PI..PI, dx in -100.0..100.0f64, dy in -100.0..100.0f64,
        g in geometry_strategy(),
    ) {
        let p = c.derivs(t, rev);
        prop_assume!(p.speed() > 0.5);
        let moved = Pose2Derivs::new(
            p.position.rotated(theta) + Vec2::new(dx, dy),
            p.velocity.rotated(theta),
            p.acceleration.rotated(theta),
            rev,
        ).unwrap();
        let north = Vec2::new(0.0, 1.0);
        let a = KinematicSample::evaluate(t, &p, &g, north);
        let b = KinematicSample::evaluate(t, &moved, &g, north);
        prop_assume!(a.is_ok());
        let (a, b) = (a.unwrap(), b.unwrap());
        let scale = 1.0 + p.acceleration.norm() / (p.speed() * p.speed());
        prop_assert!(close(a.kappa, b.kappa, 1e-11 * scale));
        prop_assert!(close(a.v_lon, b.v_lon, 1e-11 * p.speed()));
        prop_assert!(close(a.a_lon, b.a_lon, 1e-11 * (1.0 + p.acceleration.norm())));
        prop_assert!(close(a.a_lat, b.a_lat, 1e-11 * (1.0 + p.acceleration.norm())));
        prop_assert!(angle_diff(b.heading, a.heading + theta) < 1e-11);
        prop_assert!(angle_diff(b.front_heading, a.front_heading + theta) < 1e-11);
        for w in Wheel::ALL {
            prop_assert!(close(a.wheel(w).delta, b.wheel(w).delta, 1e-11));
            prop_assert!(close(a.wheel(w).speed, b.wheel(w).speed, 1e-10 * p.speed()));
        }
    }

    #[test]
    fn reverse_flag_mirrors_signed_quantities(c in curve(), t in -3.0..3.0f64) {
        let fwd = c.derivs(t, false);
        prop_assume!(fwd.speed() > 0.1);
        let rev = Pose2Derivs { reverse: true, ..fwd };
        let kf = model::curvature(&fwd).unwrap();
        let kr = model::curvature(&rev).unwrap();
        prop_assert_eq!(kf, -kr);
        prop_assert_eq!(model::longitudinal_speed(&fwd), -model::longitudinal_speed(&rev));
        let (af, ar) = (model::accelerations(&fwd).unwrap(), model::accelerations(&rev).unwrap());
        prop_assert_eq!(af.lon, -ar.lon);
        prop_assert_eq!(af.lat, -ar.lat);
        prop_assert_eq!(model::yaw_rate(&fwd).unwrap(), -model::yaw_rate(&rev).unwrap());
        let tf = model::tangent_frame(&fwd).unwrap();
        let tr = model::tangent_frame(&rev).unwrap();
        prop_assert_eq!(tf.tangent, -tr.tangent);
    }

    #[test]
    fn steering_inverse_is_identity(
        c1 in 300.0..1200.0f64, c2 in -200.0..200.0f64, c3 in -100.0..100.0f64,
        c0 in -5.0..5.0f64, u in 0.0..1.0f64,
    ) {
        // keep the cubic monotone on the range
        let range = (-0.6, 0.6);
        let poly = SteeringPolynomial::new([c0, c1, c2, c3], range);
        prop_assume!(poly.is_ok());
        let poly = poly.unwrap();
        let delta = range.0 + u * (range.1 - range.0);
        let back = poly.invert(poly.eval(delta)).unwrap();
        prop_assert!((back - delta).abs() < 1e-10);
    }

    #[test]
    fn self_comparison_is_perfect(xs in prop::collection::vec(-100.0..100.0f64, 2..200)) {
        prop_assume!(xs.iter().any(|&x| x != 0.0));
        let c = compare_channels(&xs, &xs).unwrap();
        prop_assert_eq!(c.mu, 0.0);
        prop_assert_eq!(c.sigma, 0.0);
        prop_assert!((c.slope - 1.0).abs() < 1e-14);
        let doubled: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
        prop_assert!((compare_channels(&xs, &doubled).unwrap().slope - 2.0).abs() < 1e-14);
    }

    #[test]
    fn interpolating_spline_hits_data(ys in prop::collection::vec(-10.0..10.0f64, 4..40)) {
        let ts: Vec<f64> = (0..ys.len()).map(|i| 0.1 * i as f64).collect();
        let s = CubicSpline::fit(&ts, &ys, 0.0).unwrap();
        for (&t, &y) in ts.iter().zip(&ys) {
            prop_assert!((s.eval(t).unwrap().value - y).abs() < 1e-9);
        }
        prop_assert!(s.max_knot_discontinuity() < 1e-6);
    }

    #[test]
    fn forward_model_is_equivariant(
        theta in -PI..PI, dx in -50.0..50.0f64, dy in -50.0..50.0f64,
        swa in -400.0..400.0f64, v in -15.0..15.0f64,
    ) {
        let steering = SteeringPolynomial::linear(900.0, (-0.7, 0.7)).unwrap();
        let g = VehicleGeometry::symmetric(2.7, 1.6, 1.6, 0.3, steering).unwrap();
        let controls = ControlProfile::new(
            vec![
                ControlSample { t: 0.0, delta_swa: swa, v_lon: v },
                ControlSample { t: 2.0, delta_swa: -swa, v_lon: 0.5 * v },
                ControlSample { t: 3.0, delta_swa: 0.0, v_lon: v },
            ],
            Interpolation::Linear,
        ).unwrap();
        let a = integrate(&controls, &g, PoseState::new(Vec2::ZERO, Vec2::new(1.0, 0.0)).unwrap(), 0.01).unwrap();
        let origin = Vec2::new(dx, dy);
        let init = PoseState::new(origin, Vec2::from_angle(theta)).unwrap();
        let b = integrate(&controls, &g, init, 0.01).unwrap();
        for (p, q) in a.samples.iter().zip(&b.samples) {
            prop_assert!((p.position.rotated(theta) + origin - q.position).norm() < 1e-9);
            prop_assert!((p.tangent.rotated(theta) - q.tangent).norm() < 1e-12);
        }
    }

    #[test]
    fn forward_path_length_matches_speed_integral(swa in -400.0..400.0f64, v in 0.5..15.0f64) {
        let steering = SteeringPolynomial::linear(900.0, (-0.7, 0.7)).unwrap();
        let g = VehicleGeometry::symmetric(2.7, 1.6, 1.6, 0.3, steering).unwrap();
        let controls = ControlProfile::new(
            vec![
                ControlSample { t: 0.0, delta_swa: swa, v_lon: v },
                ControlSample { t: 1.0, delta_swa: swa, v_lon: v },
            ],
            Interpolation::Linear,
        ).unwrap();
        let kappa = g.curvature_from_steering(swa).unwrap();
        let out = integrate(&controls, &g, PoseState::new(Vec2::ZERO, Vec2::new(1.0, 0.0)).unwrap(), 1e-3).unwrap();
        // a circular arc of length v·1 s and curvature κ has chord 2 sin(κL/2)/κ
        let len = v;
        let chord = if kappa.abs() < 1e-12 { len } else { 2.0 * (kappa * len / 2.0).sin() / kappa };
        prop_assert!((out.last().unwrap().position.norm() - chord.abs()).abs() < 1e-9);
    }
}

#[test]
fn frame_normal_is_left_of_tangent() {
    let f = TangentFrame::from_tangent(Vec2::new(1.0, 0.0));
    assert_eq!(f.normal, Vec2::new(0.0, 1.0));
    let m = WheelMount::new(2.5, -0.75, 0.3).unwrap();
    assert!(model::wheel_steer_angle(0.1, &m).unwrap() > 0.0);
}

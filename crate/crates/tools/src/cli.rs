//! Command-line surface. Each command returns its [`Outputs`]; nothing is
//! written until the command has finished without error.

use std::path::{Path, PathBuf};

use c2model::calibration::{
    compare_channels, fit_steering, ChannelComparison, SteeringSample, WheelSide,
};
use c2model::evaluation::{
    endpoint_error_map, filter_quality, segment_overlapping, segment_stats, underestimation_map,
    Axis, BinnedMap, MapAxes, SegmentOptions, SegmentStats, SegmentVariable, Series,
};
use c2model::forward::{integrate, ControlProfile, ControlSample, Interpolation, PoseState};
use c2model::trajectory::{
    FitOptions, KinematicProfile, ProfileSample, SampledTrack, SmoothTrajectory,
};
use c2model::vehicle::Wheel;
use c2model::Vec2;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::config::VehicleConfig;
use crate::csvio::{load_track, CsvOut, Table};
use crate::error::{ToolError, ToolResult};
use crate::format::g9;
use crate::report::{map_tables, profile_headers, profile_row, segment_table, TextReport};
use crate::sync::{synchronize, Channels, OffsetMode};

#[derive(Debug, Parser)]
#[command(
    name = "c2model",
    version,
    about = "Analytic kinematic vehicle model for C² trajectories"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive speeds, accelerations, curvature, wheel angles and speeds from a track.
    Analyze(AnalyzeArgs),
    /// Integrate a track from steering wheel angle and longitudinal speed.
    Forward(ForwardArgs),
    /// Fit the cubic steering function to (wheel angle, steering wheel angle) pairs.
    CalibrateSteering(CalibrateArgs),
    /// Compare an estimated channel against a reference channel (μ, σ, slope m).
    Compare(CompareArgs),
    /// Full accuracy evaluation of a track, optionally against CAN recordings.
    Evaluate(EvaluateArgs),
    /// Split a track into overlapping windows and report per-window statistics.
    Segment(SegmentArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Smoothing weight of the trajectory spline (0 interpolates).
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Speed below which the vehicle counts as stopped (m/s).
    #[arg(long, default_value_t = 0.05)]
    pub stop_speed: f64,
}

impl FitArgs {
    fn options(&self) -> FitOptions {
        FitOptions {
            lambda: self.lambda,
            stop_speed: self.stop_speed,
            ..FitOptions::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub track: PathBuf,
    #[arg(long)]
    pub vehicle: PathBuf,
    #[command(flatten)]
    pub fit: FitArgs,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ForwardArgs {
    /// CSV with columns t, delta_swa [deg], v_lon [m/s].
    #[arg(long)]
    pub controls: PathBuf,
    #[arg(long)]
    pub vehicle: PathBuf,
    /// Initial pose `x,y,heading` (m, m, rad counter-clockwise from north).
    #[arg(long, value_parser = parse_pose, allow_hyphen_values = true)]
    pub init: [f64; 3],
    /// Largest integration step (s).
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    /// Hold each control until the next sample instead of interpolating.
    #[arg(long)]
    pub hold: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// CSV with columns delta [rad], delta_swa [deg] and optionally wheel (fl, fr, center).
    #[arg(long)]
    pub pairs: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub estimate: PathBuf,
    /// Channel column to compare (in both files unless --estimate-channel is given).
    #[arg(long)]
    pub channel: String,
    #[arg(long)]
    pub estimate_channel: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SegmentingArgs {
    /// Shortest window (m).
    #[arg(long = "min", default_value_t = 5.0)]
    pub min_len: f64,
    /// Longest window (m).
    #[arg(long = "max", default_value_t = 150.0)]
    pub max_len: f64,
    /// Window start and length increment (m).
    #[arg(long, default_value_t = 5.0)]
    pub stride: f64,
    /// Split the track at timestamp gaps longer than this (s).
    #[arg(long, default_value_t = 1.0)]
    pub gap: f64,
    /// Largest forward-integration step for the endpoint error (s).
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
}

impl SegmentingArgs {
    fn options(&self) -> SegmentOptions {
        SegmentOptions {
            min_len: self.min_len,
            max_len: self.max_len,
            stride: self.stride,
        }
    }
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    #[arg(long)]
    pub track: PathBuf,
    /// Vehicle configuration (a default passenger car when omitted).
    #[arg(long)]
    pub vehicle: Option<PathBuf>,
    #[command(flatten)]
    pub fit: FitArgs,
    #[command(flatten)]
    pub segments: SegmentingArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub track: PathBuf,
    /// Recorded reference channels (t plus any of delta_swa, v_lon, v_fl, v_fr, v_rl, v_rr, a_lat).
    #[arg(long)]
    pub can: Option<PathBuf>,
    #[arg(long)]
    pub vehicle: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "evaluation")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub fit: FitArgs,
    #[command(flatten)]
    pub segments: SegmentingArgs,
    /// Resampling rate of the synchronized recording (Hz).
    #[arg(long, default_value_t = 50.0)]
    pub rate: f64,
    /// Fixed CAN time offset (s); estimated from v_lon when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub offset: Option<f64>,
    /// Relative wheel-speed shortfall counted as underestimation.
    #[arg(long, default_value_t = 0.03)]
    pub threshold: f64,
    /// Bins per axis of the spatial underestimation maps.
    #[arg(long, default_value_t = 20)]
    pub spatial_bins: usize,
}

fn parse_pose(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err("expected x,y,heading".into());
    }
    let mut out = [0.0f64; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| format!("`{p}` is not a number"))?;
        if !o.is_finite() {
            return Err(format!("`{p}` is not finite"));
        }
    }
    Ok(out)
}

/// Everything a command produces.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outputs {
    pub stdout: Vec<u8>,
    pub files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    fn to(out: &Option<PathBuf>, bytes: Vec<u8>) -> Self {
        match out {
            Some(p) => Outputs {
                stdout: Vec::new(),
                files: vec![(p.clone(), bytes)],
            },
            None => Outputs {
                stdout: bytes,
                files: Vec::new(),
            },
        }
    }

    /// Writes every file through a temporary sibling and renames them only
    /// after all were written, then prints stdout.
    pub fn commit(self) -> ToolResult<()> {
        let mut staged = Vec::with_capacity(self.files.len());
        let result = (|| -> ToolResult<()> {
            for (path, bytes) in &self.files {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir).map_err(|e| ToolError::io(dir, e))?;
                }
                let mut tmp = path.clone().into_os_string();
                tmp.push(".partial");
                let tmp = PathBuf::from(tmp);
                std::fs::write(&tmp, bytes).map_err(|e| ToolError::io(&tmp, e))?;
                staged.push((tmp, path.clone()));
            }
            for (tmp, path) in &staged {
                std::fs::rename(tmp, path).map_err(|e| ToolError::io(path, e))?;
            }
            Ok(())
        })();
        if result.is_err() {
            for (tmp, _) in &staged {
                let _ = std::fs::remove_file(tmp);
            }
        }
        result?;
        use std::io::Write;
        let mut out = std::io::stdout().lock();
        out.write_all(&self.stdout)
            .map_err(|e| ToolError::io("<stdout>", e))?;
        out.flush().map_err(|e| ToolError::io("<stdout>", e))
    }
}

pub fn run(cli: Cli) -> ToolResult<Outputs> {
    match cli.command {
        Command::Analyze(a) => analyze(&a),
        Command::Forward(a) => forward(&a),
        Command::CalibrateSteering(a) => calibrate_steering(&a),
        Command::Compare(a) => compare(&a),
        Command::Evaluate(a) => evaluate(&a),
        Command::Segment(a) => segment(&a),
    }
}

fn check_positive(name: &str, v: f64) -> ToolResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ToolError::Usage(format!("--{name} must be positive")))
    }
}

fn analyze(a: &AnalyzeArgs) -> ToolResult<Outputs> {
    let vehicle = VehicleConfig::load(&a.vehicle)?;
    let track = load_track(&a.track)?;
    let traj = SmoothTrajectory::fit(&track, a.fit.options())?;
    let profile = traj.extract_profile(&vehicle.geometry, vehicle.north, &track.times())?;
    let mut out = CsvOut::new(profile_headers(false));
    for p in &profile.samples {
        out.push(profile_row(None, p));
    }
    Ok(Outputs::to(&a.out, out.to_bytes()))
}

/// Controls from a CSV with `t`, `delta_swa` and `v_lon` columns.
pub fn load_controls(path: &Path, interpolation: Interpolation) -> ToolResult<ControlProfile> {
    let table = Table::read(path)?;
    let times = table.times(table.require("t")?)?;
    let swa = table.require("delta_swa")?;
    let v = table.require("v_lon")?;
    let mut samples = Vec::with_capacity(times.len());
    for (row, &t) in table.rows.iter().zip(&times) {
        samples.push(ControlSample {
            t,
            delta_swa: table.number(row, swa)?,
            v_lon: table.number(row, v)?,
        });
    }
    Ok(ControlProfile::new(samples, interpolation)?)
}

fn forward(a: &ForwardArgs) -> ToolResult<Outputs> {
    check_positive("step", a.step)?;
    let vehicle = VehicleConfig::load(&a.vehicle)?;
    let interpolation = if a.hold {
        Interpolation::ZeroOrderHold
    } else {
        Interpolation::Linear
    };
    let controls = load_controls(&a.controls, interpolation)?;
    let [x, y, heading] = a.init;
    let init = PoseState::from_heading(Vec2::new(x, y), heading, vehicle.north)?;
    let track = integrate(&controls, &vehicle.geometry, init, a.step)?;
    let mut out = CsvOut::new([
        "t[s]",
        "x[m]",
        "y[m]",
        "front_heading[rad]",
        "v_lon[m/s]",
        "kappa[1/m]",
        "reverse",
    ]);
    let mut reverse = false;
    for s in &track.samples {
        if s.v_lon != 0.0 {
            reverse = s.v_lon < 0.0;
        }
        let heading = vehicle
            .north
            .det(s.tangent)
            .atan2(vehicle.north.dot(s.tangent));
        out.push(vec![
            g9(s.t),
            g9(s.position.x),
            g9(s.position.y),
            g9(heading),
            g9(s.v_lon),
            g9(s.kappa),
            if reverse { "1" } else { "0" }.into(),
        ]);
    }
    Ok(Outputs::to(&a.out, out.to_bytes()))
}

fn wheel_side(table: &Table, row: &crate::csvio::Row, col: Option<usize>) -> ToolResult<WheelSide> {
    let Some(c) = col else {
        return Ok(WheelSide::Center);
    };
    match table.text(row, c).to_ascii_lowercase().as_str() {
        "fl" | "left" | "l" => Ok(WheelSide::Left),
        "fr" | "right" | "r" => Ok(WheelSide::Right),
        "" | "center" | "c" => Ok(WheelSide::Center),
        other => Err(ToolError::Parse {
            path: table.path.clone(),
            line: row.line,
            msg: format!("`wheel`: expected fl, fr or center, got `{other}`"),
        }),
    }
}

fn calibrate_steering(a: &CalibrateArgs) -> ToolResult<Outputs> {
    let table = Table::read(&a.pairs)?;
    let delta = table
        .column("delta")
        .or_else(|| table.column("delta_wheel"));
    let delta = match delta {
        Some(c) => c,
        None => table.require("delta")?,
    };
    let swa = table.require("delta_swa")?;
    let side = table.column("wheel");
    let mut samples = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        samples.push(SteeringSample::new(
            table.number(row, delta)?,
            table.number(row, swa)?,
            wheel_side(&table, row, side)?,
        ));
    }
    let poly = fit_steering(&samples)?;
    let residuals: Vec<f64> = samples
        .iter()
        .map(|s| {
            let (d, w) = s.pooled();
            poly.eval(d) - w
        })
        .collect();
    let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
    let c = poly.coefficients();
    let (lo, hi) = poly.range();
    let text = format!(
        "# delta_swa[deg] = c0 + c1*delta + c2*delta^2 + c3*delta^3, delta in rad\n\
         [steering]\n\
         coefficients = [{}, {}, {}, {}]\n\
         range = [{}, {}]\n\
         \n\
         [fit]\n\
         samples = {}\n\
         rms_residual_deg = {}\n",
        g9(c[0]),
        g9(c[1]),
        g9(c[2]),
        g9(c[3]),
        g9(lo),
        g9(hi),
        samples.len(),
        g9(rms)
    );
    Ok(Outputs::to(&a.out, text.into_bytes()))
}

fn compare(a: &CompareArgs) -> ToolResult<Outputs> {
    let reference = Table::read(&a.reference)?;
    let estimate = Table::read(&a.estimate)?;
    let est_name = a.estimate_channel.as_deref().unwrap_or(&a.channel);
    let rc = reference.require(&a.channel)?;
    let ec = estimate.require(est_name)?;
    let rvals = reference
        .rows
        .iter()
        .map(|r| reference.maybe_number(r, rc))
        .collect::<ToolResult<Vec<_>>>()?;
    let evals = estimate
        .rows
        .iter()
        .map(|r| estimate.maybe_number(r, ec))
        .collect::<ToolResult<Vec<_>>>()?;
    let pairs: Vec<(f64, f64)> = match (reference.column("t"), estimate.column("t")) {
        (Some(rt), Some(et)) => {
            let rtimes = reference.times(rt)?;
            let series = Series::new(estimate.times(et)?, evals)?;
            rtimes
                .iter()
                .zip(&rvals)
                .filter_map(|(&t, &r)| series.at(t).map(|e| (r, e)))
                .collect()
        }
        _ => {
            if rvals.len() != evals.len() {
                return Err(ToolError::Usage(
                    "files without a t column must have the same number of rows".into(),
                ));
            }
            rvals.into_iter().zip(evals).collect()
        }
    };
    let pairs: Vec<(f64, f64)> = pairs
        .into_iter()
        .filter(|(r, e)| r.is_finite() && e.is_finite())
        .collect();
    let (r, e): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let cmp = compare_channels(&r, &e)?;
    let mut report = TextReport::default();
    report.section("comparison").text("channel", &a.channel);
    if est_name != a.channel {
        report.text("estimate_channel", est_name);
    }
    comparison_lines(&mut report, &cmp);
    Ok(Outputs::to(&a.out, report.into_bytes()))
}

fn comparison_lines(report: &mut TextReport, c: &ChannelComparison) {
    report
        .int("samples", c.samples)
        .num("mu", c.mu)
        .num("sigma", c.sigma)
        .num("m", c.slope);
}

/// Quality-filtered runs of a track, each fitted on its own.
fn fit_runs(
    track: &SampledTrack,
    gap: f64,
    options: FitOptions,
) -> ToolResult<Vec<(SampledTrack, SmoothTrajectory)>> {
    check_positive("gap", gap)?;
    let mut runs = Vec::new();
    for part in filter_quality(track, gap, true) {
        match SmoothTrajectory::fit(&part, options) {
            Ok(traj) => runs.push((part, traj)),
            Err(e) => log::warn!(
                "skipping run of {} samples starting at t = {}: {e}",
                part.len(),
                part.samples()[0].t
            ),
        }
    }
    Ok(runs)
}

/// Per-window statistics of every run, in run order then window order.
fn segment_runs(
    runs: &[(SampledTrack, SmoothTrajectory)],
    vehicle: &VehicleConfig,
    args: &SegmentingArgs,
    reference_speed: Option<&Series>,
) -> ToolResult<(Vec<(usize, SegmentStats)>, usize)> {
    check_positive("step", args.step)?;
    let options = args.options();
    options.validate()?;
    let mut windows = Vec::new();
    for (i, (_, traj)) in runs.iter().enumerate() {
        for s in segment_overlapping(traj, &options)? {
            windows.push((i, s));
        }
    }
    let results: Vec<_> = windows
        .par_iter()
        .map(|(i, s)| {
            (
                *i,
                segment_stats(
                    &runs[*i].1,
                    &vehicle.geometry,
                    s,
                    reference_speed,
                    args.step,
                ),
            )
        })
        .collect();
    let mut stats = Vec::with_capacity(results.len());
    let mut skipped = 0;
    for (i, r) in results {
        match r {
            Ok(s) => stats.push((i, s)),
            Err(e) => {
                skipped += 1;
                log::debug!("skipping window of run {i}: {e}");
            }
        }
    }
    if skipped > 0 {
        log::warn!("{skipped} windows could not be evaluated");
    }
    Ok((stats, skipped))
}

fn segment(a: &SegmentArgs) -> ToolResult<Outputs> {
    let vehicle = match &a.vehicle {
        Some(p) => VehicleConfig::load(p)?,
        None => VehicleConfig::default(),
    };
    let track = load_track(&a.track)?;
    let runs = fit_runs(&track, a.segments.gap, a.fit.options())?;
    let (stats, _) = segment_runs(&runs, &vehicle, &a.segments, None)?;
    Ok(Outputs::to(&a.out, segment_table(&stats, false).to_bytes()))
}

type ModelChannel = fn(&ProfileSample) -> f64;

/// Channels compared by `evaluate` and how the model provides them.
const CHANNELS: [(&str, ModelChannel); 7] = [
    ("delta_swa", |p| p.delta_swa),
    ("v_lon", |p| p.sample.v_lon),
    ("v_fl", |p| p.sample.wheel(Wheel::FrontLeft).speed),
    ("v_fr", |p| p.sample.wheel(Wheel::FrontRight).speed),
    ("v_rl", |p| p.sample.wheel(Wheel::RearLeft).speed),
    ("v_rr", |p| p.sample.wheel(Wheel::RearRight).speed),
    ("a_lat", |p| p.sample.a_lat),
];

fn map_files(dir: &Path, stem: &str, map: &BinnedMap, files: &mut Vec<(PathBuf, Vec<u8>)>) {
    let (values, counts) = map_tables(map);
    files.push((dir.join(format!("{stem}.csv")), values.to_bytes()));
    files.push((dir.join(format!("{stem}_counts.csv")), counts.to_bytes()));
}

fn spatial_axis(name: &str, values: impl Iterator<Item = f64>, bins: usize) -> ToolResult<Axis> {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    let (lo, hi) = if lo.is_finite() {
        (lo.floor(), hi.ceil())
    } else {
        (0.0, 1.0)
    };
    let hi = if hi > lo { hi } else { lo + 1.0 };
    Ok(Axis::uniform(name, lo, hi, bins)?)
}

fn evaluate(a: &EvaluateArgs) -> ToolResult<Outputs> {
    check_positive("threshold", a.threshold)?;
    if a.spatial_bins == 0 {
        return Err(ToolError::Usage("--spatial-bins must be at least 1".into()));
    }
    let vehicle = VehicleConfig::load(&a.vehicle)?;
    let track = load_track(&a.track)?;
    let can = a.can.as_deref().map(Channels::load).transpose()?;
    let runs = fit_runs(&track, a.segments.gap, a.fit.options())?;
    if runs.is_empty() {
        return Err(ToolError::Usage(
            "no part of the track is long enough to fit".into(),
        ));
    }
    let dir = &a.out_dir;
    let mut files = Vec::new();
    let mut report = TextReport::default();

    // model profile at the GPS sample times
    let mut profile = CsvOut::new(profile_headers(true));
    let mut skipped = 0;
    for (i, (part, traj)) in runs.iter().enumerate() {
        for t in part.times() {
            match traj.extract_profile(&vehicle.geometry, vehicle.north, &[t]) {
                Ok(p) => profile.push(profile_row(Some(i), &p.samples[0])),
                Err(_) => skipped += 1,
            }
        }
    }
    report
        .section("track")
        .int("samples", track.len())
        .int("runs", runs.len())
        .int("runs_samples", runs.iter().map(|r| r.0.len()).sum())
        .int("profile_samples", profile.rows.len())
        .int("profile_skipped", skipped);
    files.push((dir.join("profile.csv"), profile.to_bytes()));

    let synced = match &can {
        None => None,
        Some(can) => {
            let trajs: Vec<SmoothTrajectory> = runs.iter().map(|r| r.1.clone()).collect();
            let mode = a.offset.map_or(OffsetMode::Auto, OffsetMode::Fixed);
            Some(synchronize(
                &trajs,
                &vehicle.geometry,
                vehicle.north,
                can,
                a.rate,
                mode,
            )?)
        }
    };
    let reference_speed = match (&can, &synced) {
        (Some(c), Some(s)) => c.series("v_lon", s.offset),
        _ => None,
    };

    let (stats, skipped) = segment_runs(&runs, &vehicle, &a.segments, reference_speed.as_ref())?;
    report
        .section("segments")
        .int("count", stats.len())
        .int("skipped", skipped);
    if !stats.is_empty() {
        let mean = stats.iter().map(|s| s.1.endpoint_error).sum::<f64>() / stats.len() as f64;
        let max = stats.iter().map(|s| s.1.endpoint_error).fold(0.0, f64::max);
        report
            .num("mean_endpoint_error_m", mean)
            .num("max_endpoint_error_m", max);
    }
    files.push((
        dir.join("segments.csv"),
        segment_table(&stats, reference_speed.is_some()).to_bytes(),
    ));
    let only: Vec<SegmentStats> = stats.iter().map(|s| s.1).collect();
    let (lat, lon, err) = (
        SegmentVariable::MaxLatAccel,
        SegmentVariable::MaxLonAccel,
        SegmentVariable::MaxSpeedError,
    );
    let map = endpoint_error_map(&only, lat, lat.default_axis(), lon, lon.default_axis());
    map_files(dir, "endpoint_error_alat_alon", &map, &mut files);
    if reference_speed.is_some() {
        let map = endpoint_error_map(&only, lat, lat.default_axis(), err, err.default_axis());
        map_files(dir, "endpoint_error_alat_speed_error", &map, &mut files);
    }

    if let Some(s) = &synced {
        report
            .section("sync")
            .text(
                "offset_mode",
                if a.offset.is_some() { "fixed" } else { "auto" },
            )
            .num("offset_s", s.offset)
            .num("rate_hz", a.rate)
            .int("grid_samples", s.len());
        let grid_profile = KinematicProfile {
            samples: s.profile.clone(),
        };
        for (name, model) in CHANNELS {
            let Some(reference) = s.channel(name) else {
                continue;
            };
            let mut scatter = CsvOut::new(["t[s]", "reference", "estimate"]);
            let (mut r, mut e) = (Vec::new(), Vec::new());
            for ((t, p), &rv) in s.grid.iter().zip(&s.profile).zip(reference) {
                let ev = model(p);
                if rv.is_finite() && ev.is_finite() {
                    scatter.push(vec![g9(*t), g9(rv), g9(ev)]);
                    r.push(rv);
                    e.push(ev);
                }
            }
            report.section(&format!("channels.{name}"));
            match compare_channels(&r, &e) {
                Ok(c) => comparison_lines(&mut report, &c),
                Err(err) => {
                    report
                        .int("samples", r.len())
                        .text("error", &err.to_string());
                }
            }
            files.push((dir.join(format!("scatter_{name}.csv")), scatter.to_bytes()));

            if let Some(wheel) = name.strip_prefix("v_").and_then(Wheel::from_label) {
                let l = wheel.label();
                let param = underestimation_map(
                    &grid_profile,
                    reference,
                    wheel,
                    a.threshold,
                    MapAxes::default_parameter(),
                )?;
                map_files(
                    dir,
                    &format!("underestimation_{l}_kappa_speed"),
                    &param,
                    &mut files,
                );
                let axes = MapAxes::Spatial {
                    x: spatial_axis(
                        "x[m]",
                        s.profile.iter().map(|p| p.position.x),
                        a.spatial_bins,
                    )?,
                    y: spatial_axis(
                        "y[m]",
                        s.profile.iter().map(|p| p.position.y),
                        a.spatial_bins,
                    )?,
                };
                let spatial =
                    underestimation_map(&grid_profile, reference, wheel, a.threshold, axes)?;
                map_files(
                    dir,
                    &format!("underestimation_{l}_xy"),
                    &spatial,
                    &mut files,
                );
                report.num(
                    "underestimated_percent",
                    param.weighted_average().unwrap_or(f64::NAN),
                );
            }
        }
    }
    files.push((dir.join("report.txt"), report.into_bytes()));
    Ok(Outputs {
        stdout: Vec::new(),
        files,
    })
}

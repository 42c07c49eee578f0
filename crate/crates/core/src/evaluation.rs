//! Accuracy evaluation: quality filtering, overlapping segmentation,
//! per-segment statistics and binned maps.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::forward;
use crate::trajectory::{KinematicProfile, SampledTrack, SmoothTrajectory, TrackSample};
use crate::vehicle::{VehicleGeometry, Wheel};
use crate::Vec2;

/// m/s to km/h.
pub const KMH_PER_MS: f64 = 3.6;

/// Splits `track` into connected runs: a run ends at a timestamp gap longer
/// than `gap_threshold`, and (when `require_quality` is set) samples flagged
/// with bad quality are dropped and split the track as well. Samples without
/// a quality flag count as good.
pub fn filter_quality(
    track: &SampledTrack,
    gap_threshold: f64,
    require_quality: bool,
) -> Vec<SampledTrack> {
    let mut runs: Vec<Vec<TrackSample>> = Vec::new();
    let mut current: Vec<TrackSample> = Vec::new();
    for s in track.samples() {
        if require_quality && s.quality == Some(false) {
            if !current.is_empty() {
                runs.push(core::mem::take(&mut current));
            }
            continue;
        }
        if let Some(prev) = current.last() {
            if s.t - prev.t > gap_threshold {
                runs.push(core::mem::take(&mut current));
            }
        }
        current.push(*s);
    }
    if !current.is_empty() {
        runs.push(current);
    }
    // every run is a subsequence of a valid track
    runs.into_iter()
        .filter_map(|r| SampledTrack::new(r).ok())
        .collect()
}

/// Window lengths and stride for [`segment_overlapping`] (m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentOptions {
    pub min_len: f64,
    pub max_len: f64,
    pub stride: f64,
}

impl Default for SegmentOptions {
    fn default() -> Self {
        SegmentOptions {
            min_len: 5.0,
            max_len: 150.0,
            stride: 5.0,
        }
    }
}

impl SegmentOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_len > 0.0 && self.min_len <= self.max_len && self.max_len.is_finite()) {
            return Err(Error::InvalidParameter(
                "segment lengths need 0 < min_len <= max_len",
            ));
        }
        if !(self.stride > 0.0 && self.stride.is_finite()) {
            return Err(Error::InvalidParameter("segment stride must be positive"));
        }
        Ok(())
    }
}

/// One window of a trajectory, in arc length and in time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start_s: f64,
    pub end_s: f64,
    pub start_t: f64,
    pub end_t: f64,
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.end_s - self.start_s
    }
}

/// All windows starting at multiples of `stride` in arc length, with
/// lengths `min_len, min_len + stride, …` up to `max_len`. Windows reaching
/// past the end of the trajectory are dropped. Ordered by start, then length.
pub fn segment_overlapping(
    traj: &SmoothTrajectory,
    options: &SegmentOptions,
) -> Result<Vec<Segment>> {
    options.validate()?;
    let arc = traj.arc_length();
    let total = arc.total();
    let slack = 1e-9 * total.max(1.0);
    let lengths: Vec<f64> = (0..)
        .map(|j| options.min_len + j as f64 * options.stride)
        .take_while(|&l| l <= options.max_len + 1e-9 * options.max_len)
        .collect();
    let mut out = Vec::new();
    for k in 0.. {
        let start = k as f64 * options.stride;
        if start + options.min_len > total + slack {
            break;
        }
        let start_t = arc.time_at(start);
        for &len in &lengths {
            let end = start + len;
            if end > total + slack {
                break;
            }
            out.push(Segment {
                start_s: start,
                end_s: end,
                start_t,
                end_t: arc.time_at(end),
            });
        }
    }
    Ok(out)
}

/// Uniformly or irregularly sampled scalar channel. Non-finite values mark
/// missing data; [`Series::at`] never interpolates across them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Series {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl Series {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidParameter(
                "series times and values differ in length",
            ));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite {
                what: "series times",
            });
        }
        if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotoneTime { index: i + 1 });
        }
        Ok(Series { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Linear interpolation at `t`; `None` outside the sampled range or
    /// next to a missing value.
    pub fn at(&self, t: f64) -> Option<f64> {
        let n = self.times.len();
        if n == 0 || !(t >= self.times[0] && t <= self.times[n - 1]) {
            return None;
        }
        let i = self.times.partition_point(|&x| x <= t);
        if i == n || self.times[i - 1] == t {
            let v = self.values[i - 1];
            return v.is_finite().then_some(v);
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        if !(v0.is_finite() && v1.is_finite()) {
            return None;
        }
        Some(v0 + (t - t0) / (t1 - t0) * (v1 - v0))
    }
}

/// Summary of one evaluated segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentStats {
    pub segment: Segment,
    pub max_abs_a_lon: f64,
    pub max_abs_a_lat: f64,
    pub mean_abs_a_lon: f64,
    pub mean_abs_a_lat: f64,
    /// Largest |v_lon − reference| (km/h); `None` without reference data.
    pub max_speed_error: Option<f64>,
    /// Endpoint error of the forward roundtrip (m).
    pub endpoint_error: f64,
}

impl SegmentStats {
    pub fn get(&self, var: SegmentVariable) -> Option<f64> {
        match var {
            SegmentVariable::ArcLength => Some(self.segment.length()),
            SegmentVariable::MaxLatAccel => Some(self.max_abs_a_lat),
            SegmentVariable::MaxLonAccel => Some(self.max_abs_a_lon),
            SegmentVariable::MeanLatAccel => Some(self.mean_abs_a_lat),
            SegmentVariable::MeanLonAccel => Some(self.mean_abs_a_lon),
            SegmentVariable::MaxSpeedError => self.max_speed_error,
            SegmentVariable::EndpointError => Some(self.endpoint_error),
        }
    }
}

/// Statistics and roundtrip endpoint error of `segment`. Samples are the
/// window ends plus every knot in between; `reference_speed` (m/s), when
/// given, is compared against the model's `v_lon` where it has data.
pub fn segment_stats(
    traj: &SmoothTrajectory,
    geometry: &VehicleGeometry,
    segment: &Segment,
    reference_speed: Option<&Series>,
    step: f64,
) -> Result<SegmentStats> {
    let times = forward::window_times(traj, segment.start_t, segment.end_t)?;
    let profile = traj.extract_profile(geometry, Vec2::new(0.0, 1.0), &times)?;
    let roundtrip = forward::roundtrip_profile(traj, geometry, &profile, step)?;
    let n = profile.len() as f64;
    let mut stats = SegmentStats {
        segment: *segment,
        max_abs_a_lon: 0.0,
        max_abs_a_lat: 0.0,
        mean_abs_a_lon: 0.0,
        mean_abs_a_lat: 0.0,
        max_speed_error: None,
        endpoint_error: roundtrip.endpoint_error,
    };
    for p in &profile.samples {
        let s = &p.sample;
        stats.max_abs_a_lon = stats.max_abs_a_lon.max(s.a_lon.abs());
        stats.max_abs_a_lat = stats.max_abs_a_lat.max(s.a_lat.abs());
        stats.mean_abs_a_lon += s.a_lon.abs() / n;
        stats.mean_abs_a_lat += s.a_lat.abs() / n;
        if let Some(r) = reference_speed.and_then(|r| r.at(s.t)) {
            let e = (s.v_lon - r).abs() * KMH_PER_MS;
            stats.max_speed_error = Some(stats.max_speed_error.map_or(e, |m| m.max(e)));
        }
    }
    Ok(stats)
}

/// Bin edges of one map axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    name: String,
    edges: Vec<f64>,
}

impl Axis {
    /// `edges` must be finite and strictly increasing, at least two of them.
    pub fn new(name: impl Into<String>, edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: edges.len(),
            });
        }
        if edges.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite { what: "bin edges" });
        }
        if edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("bin edges must increase strictly"));
        }
        Ok(Axis {
            name: name.into(),
            edges,
        })
    }

    /// `bins` equal bins spanning `[lo, hi]`.
    pub fn uniform(name: impl Into<String>, lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidParameter("axis needs at least one bin"));
        }
        let edges = (0..=bins)
            .map(|i| lo + (hi - lo) * i as f64 / bins as f64)
            .collect();
        Self::new(name, edges)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn bins(&self) -> usize {
        self.edges.len() - 1
    }

    /// Bin of `v`; values beyond the outer edges go to the end bins and
    /// NaN has no bin. Bins are closed on the left.
    pub fn bin(&self, v: f64) -> Option<usize> {
        if v.is_nan() {
            return None;
        }
        let i = self.edges.partition_point(|&e| e <= v);
        Some(i.saturating_sub(1).min(self.bins() - 1))
    }
}

/// How a map cell summarises its samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregate {
    /// Arithmetic mean of the values.
    Mean,
    /// Share of samples with value 1, in percent (values are 0 or 1).
    Percentage,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Cell {
    pub count: usize,
    pub sum: f64,
}

/// Two-dimensional histogram of a per-sample value over `x` and `y` bins.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedMap {
    x: Axis,
    y: Axis,
    aggregate: Aggregate,
    /// row-major, one row per `y` bin
    cells: Vec<Cell>,
}

impl BinnedMap {
    pub fn new(x: Axis, y: Axis, aggregate: Aggregate) -> Self {
        let cells = alloc::vec![Cell::default(); x.bins() * y.bins()];
        BinnedMap {
            x,
            y,
            aggregate,
            cells,
        }
    }

    pub fn x_axis(&self) -> &Axis {
        &self.x
    }

    pub fn y_axis(&self) -> &Axis {
        &self.y
    }

    pub fn aggregate(&self) -> Aggregate {
        self.aggregate
    }

    /// Adds a sample; returns false (and ignores it) when a coordinate or
    /// the value is NaN.
    pub fn add(&mut self, x: f64, y: f64, value: f64) -> bool {
        match (self.x.bin(x), self.y.bin(y)) {
            (Some(i), Some(j)) if !value.is_nan() => {
                let cell = &mut self.cells[j * self.x.bins() + i];
                cell.count += 1;
                cell.sum += value;
                true
            }
            _ => false,
        }
    }

    pub fn cell(&self, ix: usize, iy: usize) -> Cell {
        self.cells[iy * self.x.bins() + ix]
    }

    /// Aggregate of a cell, `None` when it is empty.
    pub fn value(&self, ix: usize, iy: usize) -> Option<f64> {
        let c = self.cell(ix, iy);
        (c.count > 0).then(|| self.scale() * c.sum / c.count as f64)
    }

    pub fn total_count(&self) -> usize {
        self.cells.iter().map(|c| c.count).sum()
    }

    /// Count-weighted average of the cell aggregates; equals the statistic
    /// over all samples added.
    pub fn weighted_average(&self) -> Option<f64> {
        let n = self.total_count();
        if n == 0 {
            return None;
        }
        let mut acc = 0.0;
        for (k, c) in self.cells.iter().enumerate() {
            if let Some(v) = self.value(k % self.x.bins(), k / self.x.bins()) {
                acc += c.count as f64 * v;
            }
        }
        Some(acc / n as f64)
    }

    fn scale(&self) -> f64 {
        match self.aggregate {
            Aggregate::Mean => 1.0,
            Aggregate::Percentage => 100.0,
        }
    }
}

/// Per-segment quantities usable as map axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentVariable {
    ArcLength,
    MaxLatAccel,
    MaxLonAccel,
    MeanLatAccel,
    MeanLonAccel,
    MaxSpeedError,
    EndpointError,
}

impl SegmentVariable {
    pub fn name(self) -> &'static str {
        match self {
            SegmentVariable::ArcLength => "s[m]",
            SegmentVariable::MaxLatAccel => "max_abs_a_lat[m/s2]",
            SegmentVariable::MaxLonAccel => "max_abs_a_lon[m/s2]",
            SegmentVariable::MeanLatAccel => "mean_abs_a_lat[m/s2]",
            SegmentVariable::MeanLonAccel => "mean_abs_a_lon[m/s2]",
            SegmentVariable::MaxSpeedError => "max_speed_error[km/h]",
            SegmentVariable::EndpointError => "endpoint_error[m]",
        }
    }

    /// Default bins: lateral acceleration 0–6 in steps of 0.5, longitudinal
    /// 0–3 in steps of 0.25, speed error 0–3 km/h in steps of 0.25.
    pub fn default_axis(self) -> Axis {
        let (lo, hi, n) = match self {
            SegmentVariable::ArcLength => (0.0, 150.0, 30),
            SegmentVariable::MaxLatAccel | SegmentVariable::MeanLatAccel => (0.0, 6.0, 12),
            SegmentVariable::MaxLonAccel | SegmentVariable::MeanLonAccel => (0.0, 3.0, 12),
            SegmentVariable::MaxSpeedError => (0.0, 3.0, 12),
            SegmentVariable::EndpointError => (0.0, 5.0, 10),
        };
        Axis::uniform(self.name(), lo, hi, n).expect("static axis")
    }
}

/// Mean endpoint error per `(x, y)` cell. Segments missing one of the
/// variables are skipped.
pub fn endpoint_error_map(
    stats: &[SegmentStats],
    x: SegmentVariable,
    x_axis: Axis,
    y: SegmentVariable,
    y_axis: Axis,
) -> BinnedMap {
    let mut map = BinnedMap::new(x_axis, y_axis, Aggregate::Mean);
    for s in stats {
        if let (Some(a), Some(b)) = (s.get(x), s.get(y)) {
            map.add(a, b, s.endpoint_error);
        }
    }
    map
}

/// Coordinates of an underestimation map.
#[derive(Debug, Clone, PartialEq)]
pub enum MapAxes {
    /// `|κ|` (1/m) against `|v_lon|` (km/h).
    Parameter { curvature: Axis, speed: Axis },
    /// Planar position `x`, `y` (m).
    Spatial { x: Axis, y: Axis },
}

impl MapAxes {
    /// `|κ|` 0–1/20 1/m and `|v_lon|` 20–60 km/h, ten bins each.
    pub fn default_parameter() -> Self {
        MapAxes::Parameter {
            curvature: Axis::uniform("abs_kappa[1/m]", 0.0, 0.05, 10).expect("static axis"),
            speed: Axis::uniform("abs_v_lon[km/h]", 20.0, 60.0, 10).expect("static axis"),
        }
    }
}

/// Percentage of samples whose model wheel speed for `wheel` falls below
/// `(1 − threshold)` times the reference, per cell. `reference` holds one
/// value per profile sample; non-finite entries are skipped.
pub fn underestimation_map(
    profile: &KinematicProfile,
    reference: &[f64],
    wheel: Wheel,
    threshold: f64,
    axes: MapAxes,
) -> Result<BinnedMap> {
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::InvalidParameter(
            "underestimation threshold must be positive",
        ));
    }
    if reference.len() != profile.len() {
        return Err(Error::InvalidParameter(
            "reference length differs from profile length",
        ));
    }
    let spatial = matches!(axes, MapAxes::Spatial { .. });
    let mut map = match axes {
        MapAxes::Parameter { curvature, speed } => {
            BinnedMap::new(curvature, speed, Aggregate::Percentage)
        }
        MapAxes::Spatial { x, y } => BinnedMap::new(x, y, Aggregate::Percentage),
    };
    for (p, &r) in profile.samples.iter().zip(reference) {
        if !r.is_finite() {
            continue;
        }
        let estimate = p.sample.wheel(wheel).speed;
        let hit = if estimate < (1.0 - threshold) * r {
            1.0
        } else {
            0.0
        };
        let (a, b) = if spatial {
            (p.position.x, p.position.y)
        } else {
            (p.sample.kappa.abs(), p.sample.v_lon.abs() * KMH_PER_MS)
        };
        map.add(a, b, hit);
    }
    Ok(map)
}

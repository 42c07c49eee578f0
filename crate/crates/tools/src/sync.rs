//! Bringing GPS-derived model channels and recorded CAN channels onto one
//! uniform time grid.

use std::path::Path;

use c2model::evaluation::Series;
use c2model::trajectory::{ProfileSample, SmoothTrajectory};
use c2model::vehicle::VehicleGeometry;
use c2model::Vec2;

use crate::csvio::Table;
use crate::error::{ToolError, ToolResult};

/// Recorded channels sharing one time column. Missing values are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct Channels {
    pub times: Vec<f64>,
    pub names: Vec<String>,
    /// `values[c][i]` is channel `c` at `times[i]`.
    pub values: Vec<Vec<f64>>,
}

impl Channels {
    /// Reads a CSV with a `t` column; every other column is a channel.
    /// Empty fields and `nan` mark missing values.
    pub fn load(path: &Path) -> ToolResult<Self> {
        Self::from_table(&Table::read(path)?)
    }

    pub fn from_table(table: &Table) -> ToolResult<Self> {
        let tcol = table.require("t")?;
        let times = table.times(tcol)?;
        let mut names = Vec::new();
        let mut values = Vec::new();
        for (c, name) in table.headers.iter().enumerate() {
            if c == tcol || name.is_empty() {
                continue;
            }
            let col = table
                .rows
                .iter()
                .map(|r| table.maybe_number(r, c))
                .collect::<ToolResult<Vec<_>>>()?;
            names.push(name.clone());
            values.push(col);
        }
        Ok(Channels {
            times,
            names,
            values,
        })
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Channel `name` with timestamps shifted by `offset`.
    pub fn series(&self, name: &str, offset: f64) -> Option<Series> {
        let c = self.index(name)?;
        let times = self.times.iter().map(|t| t + offset).collect();
        Series::new(times, self.values[c].clone()).ok()
    }

    fn span(&self) -> Option<(f64, f64)> {
        Some((*self.times.first()?, *self.times.last()?))
    }
}

/// How the CAN time offset is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OffsetMode {
    Fixed(f64),
    /// Maximize the correlation of `v_lon` within ±[`AUTO_OFFSET_WINDOW`].
    Auto,
}

/// Search half-width of the automatic offset estimate (s).
pub const AUTO_OFFSET_WINDOW: f64 = 1.0;

/// Model and recorded channels on a shared grid.
#[derive(Debug, Clone)]
pub struct SyncedRecording {
    pub grid: Vec<f64>,
    /// Added to CAN timestamps before resampling (s).
    pub offset: f64,
    /// Index of the trajectory that produced each grid sample.
    pub run: Vec<usize>,
    pub profile: Vec<ProfileSample>,
    pub names: Vec<String>,
    /// `channels[c][i]` is CAN channel `c` at `grid[i]`; NaN where missing.
    pub channels: Vec<Vec<f64>>,
}

impl SyncedRecording {
    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        let c = self.names.iter().position(|n| n == name)?;
        Some(&self.channels[c])
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// Grid times `k / rate` within `[lo, hi]`.
fn grid(lo: f64, hi: f64, rate: f64) -> Vec<f64> {
    let first = (lo * rate - 1e-9).ceil() as i64;
    let last = (hi * rate + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 / rate).collect()
}

/// Model samples on grid times covered by one of `runs`; grid points in
/// gaps between runs, or where the model cannot be evaluated, are skipped.
fn model_on_grid(
    runs: &[SmoothTrajectory],
    geometry: &VehicleGeometry,
    north: Vec2,
    times: &[f64],
) -> Vec<(f64, usize, ProfileSample)> {
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let Some(i) = runs.iter().position(|r| t >= r.start() && t <= r.end()) else {
            continue;
        };
        match runs[i].extract_profile(geometry, north, &[t]) {
            Ok(p) => out.push((t, i, p.samples[0])),
            Err(e) => log::debug!("no model sample at t = {t}: {e}"),
        }
    }
    out
}

fn gps_span(runs: &[SmoothTrajectory]) -> Option<(f64, f64)> {
    let lo = runs.iter().map(SmoothTrajectory::start).reduce(f64::min)?;
    let hi = runs.iter().map(SmoothTrajectory::end).reduce(f64::max)?;
    Some((lo, hi))
}

fn pearson(pairs: &[(f64, f64)]) -> Option<f64> {
    if pairs.len() < 2 {
        return None;
    }
    let n = pairs.len() as f64;
    let (ma, mb) = pairs
        .iter()
        .fold((0.0, 0.0), |(a, b), p| (a + p.0 / n, b + p.1 / n));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for &(a, b) in pairs {
        sab += (a - ma) * (b - mb);
        saa += (a - ma) * (a - ma);
        sbb += (b - mb) * (b - mb);
    }
    (saa > 0.0 && sbb > 0.0).then(|| sab / (saa * sbb).sqrt())
}

/// Offset (added to CAN time) that best aligns recorded and model `v_lon`,
/// searched at grid resolution within ±1 s. Ties go to the smaller shift.
pub fn estimate_offset(
    runs: &[SmoothTrajectory],
    geometry: &VehicleGeometry,
    north: Vec2,
    can: &Channels,
    rate: f64,
) -> ToolResult<f64> {
    if can.index("v_lon").is_none() {
        return Err(ToolError::Usage(
            "automatic time offset needs a `v_lon` CAN channel".into(),
        ));
    }
    let (lo, hi) = gps_span(runs).ok_or(ToolError::NoOverlap)?;
    let model = model_on_grid(runs, geometry, north, &grid(lo, hi, rate));
    let steps = (AUTO_OFFSET_WINDOW * rate).round() as i64;
    let mut best: Option<(f64, f64)> = None;
    let order = std::iter::once(0).chain((1..=steps).flat_map(|k| [-k, k]));
    for k in order {
        let offset = k as f64 / rate;
        let series = can.series("v_lon", offset).expect("channel exists");
        let pairs: Vec<(f64, f64)> = model
            .iter()
            .filter_map(|(t, _, p)| series.at(*t).map(|r| (p.sample.v_lon, r)))
            .collect();
        if let Some(c) = pearson(&pairs) {
            if best.is_none_or(|(_, b)| c > b) {
                best = Some((offset, c));
            }
        }
    }
    best.map(|(o, _)| o).ok_or(ToolError::NoOverlap)
}

/// Resamples model and CAN channels onto a `rate` grid over their common
/// time span, after shifting CAN timestamps by the chosen offset.
pub fn synchronize(
    runs: &[SmoothTrajectory],
    geometry: &VehicleGeometry,
    north: Vec2,
    can: &Channels,
    rate: f64,
    mode: OffsetMode,
) -> ToolResult<SyncedRecording> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(ToolError::Usage("grid rate must be positive".into()));
    }
    let offset = match mode {
        OffsetMode::Fixed(o) => o,
        OffsetMode::Auto => estimate_offset(runs, geometry, north, can, rate)?,
    };
    let (g0, g1) = gps_span(runs).ok_or(ToolError::NoOverlap)?;
    let (c0, c1) = can.span().ok_or(ToolError::NoOverlap)?;
    let (lo, hi) = (g0.max(c0 + offset), g1.min(c1 + offset));
    if lo > hi {
        return Err(ToolError::NoOverlap);
    }
    let model = model_on_grid(runs, geometry, north, &grid(lo, hi, rate));
    if model.is_empty() {
        return Err(ToolError::NoOverlap);
    }
    let series: Vec<Series> = can
        .names
        .iter()
        .map(|n| can.series(n, offset).expect("channel exists"))
        .collect();
    let channels = series
        .iter()
        .map(|s| {
            model
                .iter()
                .map(|(t, _, _)| s.at(*t).unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    Ok(SyncedRecording {
        grid: model.iter().map(|m| m.0).collect(),
        offset,
        run: model.iter().map(|m| m.1).collect(),
        profile: model.into_iter().map(|m| m.2).collect(),
        names: can.names.clone(),
        channels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use c2model::trajectory::{FitOptions, SampledTrack, TrackSample};

    fn speed(t: f64) -> f64 {
        8.0 + 3.0 * (0.7 * t).sin() + (1.9 * t).cos()
    }

    /// Straight drive along x with a varying speed; position is ∫ speed.
    fn position(t: f64) -> f64 {
        8.0 * t - 3.0 / 0.7 * (0.7 * t).cos() + (1.9 * t).sin() / 1.9
    }

    fn runs() -> Vec<SmoothTrajectory> {
        let samples = (0..=200).map(|i| {
            let t = i as f64 * 0.1;
            TrackSample::new(t, position(t), 0.0)
        });
        let track = SampledTrack::new(samples.collect()).unwrap();
        vec![SmoothTrajectory::fit(&track, FitOptions::default()).unwrap()]
    }

    fn can(shift: f64, t0: f64, t1: f64) -> Channels {
        let times: Vec<f64> = grid(t0, t1, 50.0);
        let v = times.iter().map(|&t| speed(t - shift)).collect();
        let other = times.iter().map(|&t| t * 2.0).collect();
        Channels {
            times,
            names: vec!["v_lon".into(), "other".into()],
            values: vec![v, other],
        }
    }

    #[test]
    fn identical_grid_keeps_values() {
        let g = crate::config::VehicleConfig::default().geometry;
        let c = can(0.0, 0.0, 20.0);
        let s = synchronize(
            &runs(),
            &g,
            Vec2::new(0.0, 1.0),
            &c,
            50.0,
            OffsetMode::Fixed(0.0),
        )
        .unwrap();
        assert_eq!(s.grid, c.times);
        assert_eq!(s.channel("other").unwrap(), c.values[1].as_slice());
        assert_eq!(s.channel("v_lon").unwrap(), c.values[0].as_slice());
        // model speed from the spline matches the generating speed away from the ends
        for (t, p) in s.grid.iter().zip(&s.profile) {
            if (2.0..18.0).contains(t) {
                assert!((p.sample.v_lon - speed(*t)).abs() < 1e-2);
            }
        }
    }

    #[test]
    fn recovers_shift() {
        let g = crate::config::VehicleConfig::default().geometry;
        // CAN stamps every event 0.2 s late; shifting by −0.2 s realigns it
        let c = can(0.2, -1.0, 21.0);
        let s = synchronize(&runs(), &g, Vec2::new(0.0, 1.0), &c, 50.0, OffsetMode::Auto).unwrap();
        assert!((s.offset + 0.2).abs() <= 1.0 / 50.0, "offset {}", s.offset);
    }

    #[test]
    fn disjoint_is_no_overlap() {
        let g = crate::config::VehicleConfig::default().geometry;
        let c = can(0.0, 100.0, 120.0);
        let r = synchronize(
            &runs(),
            &g,
            Vec2::new(0.0, 1.0),
            &c,
            50.0,
            OffsetMode::Fixed(0.0),
        );
        assert!(matches!(r, Err(ToolError::NoOverlap)));
    }

    #[test]
    fn gaps_between_runs_are_not_filled() {
        let g = crate::config::VehicleConfig::default().geometry;
        let mk = |t0: f64| {
            let samples = (0..=50).map(|i| {
                let t = t0 + i as f64 * 0.1;
                TrackSample::new(t, position(t), 0.0)
            });
            SmoothTrajectory::fit(
                &SampledTrack::new(samples.collect()).unwrap(),
                FitOptions::default(),
            )
            .unwrap()
        };
        let runs = vec![mk(0.0), mk(10.0)];
        let c = can(0.0, 0.0, 15.0);
        let s = synchronize(
            &runs,
            &g,
            Vec2::new(0.0, 1.0),
            &c,
            50.0,
            OffsetMode::Fixed(0.0),
        )
        .unwrap();
        assert!(s.grid.iter().all(|&t| t <= 5.0 || t >= 10.0));
        assert_eq!(s.run.first(), Some(&0));
        assert_eq!(s.run.last(), Some(&1));
        assert_eq!(s.len(), 2 * 251);
    }
}

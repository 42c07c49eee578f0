//! Output tables and the structured text report.

use std::fmt::Write as _;

use c2model::evaluation::{BinnedMap, SegmentStats};
use c2model::trajectory::ProfileSample;
use c2model::vehicle::Wheel;

use crate::csvio::CsvOut;
use crate::format::{g9, g9_opt};

/// `key = value` lines grouped in `[sections]`.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct TextReport {
    text: String,
}

impl TextReport {
    pub fn section(&mut self, name: &str) -> &mut Self {
        if !self.text.is_empty() {
            self.text.push('\n');
        }
        let _ = writeln!(self.text, "[{name}]");
        self
    }

    pub fn num(&mut self, key: &str, v: f64) -> &mut Self {
        let _ = writeln!(self.text, "{key} = {}", g9(v));
        self
    }

    pub fn int(&mut self, key: &str, v: usize) -> &mut Self {
        let _ = writeln!(self.text, "{key} = {v}");
        self
    }

    pub fn text(&mut self, key: &str, v: &str) -> &mut Self {
        let _ = writeln!(
            self.text,
            "{key} = \"{}\"",
            v.replace('\\', "\\\\").replace('"', "\\\"")
        );
        self
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// Column headers of a kinematic profile table.
pub fn profile_headers(with_run: bool) -> Vec<String> {
    let mut h: Vec<String> = Vec::new();
    if with_run {
        h.push("run".into());
    }
    for s in [
        "t[s]",
        "x[m]",
        "y[m]",
        "reverse",
        "v_lon[m/s]",
        "v_lat[m/s]",
        "a_lon[m/s2]",
        "a_lat[m/s2]",
        "kappa[1/m]",
        "heading[rad]",
        "front_heading[rad]",
        "yaw_rate[rad/s]",
        "delta_center[rad]",
        "delta_swa[deg]",
    ] {
        h.push(s.into());
    }
    for w in Wheel::ALL {
        let l = w.label();
        h.push(format!("delta_{l}[rad]"));
        h.push(format!("v_{l}[m/s]"));
        h.push(format!("rho_dot_{l}[rad/s]"));
    }
    h
}

pub fn profile_row(run: Option<usize>, p: &ProfileSample) -> Vec<String> {
    let s = &p.sample;
    let mut row = Vec::with_capacity(27);
    if let Some(r) = run {
        row.push(r.to_string());
    }
    row.extend([
        g9(s.t),
        g9(p.position.x),
        g9(p.position.y),
        if p.reverse { "1" } else { "0" }.to_string(),
        g9(s.v_lon),
        g9(s.v_lat),
        g9(s.a_lon),
        g9(s.a_lat),
        g9(s.kappa),
        g9(s.heading),
        g9(s.front_heading),
        g9(s.yaw_rate),
        g9(p.delta_center),
        g9(p.delta_swa),
    ]);
    for w in Wheel::ALL {
        let ws = s.wheel(w);
        row.extend([g9(ws.delta), g9(ws.speed), g9(ws.angular_rate)]);
    }
    row
}

pub fn segment_table(rows: &[(usize, SegmentStats)], with_speed_error: bool) -> CsvOut {
    let mut headers = vec![
        "run",
        "start_t[s]",
        "end_t[s]",
        "start_s[m]",
        "end_s[m]",
        "length[m]",
        "max_abs_a_lon[m/s2]",
        "max_abs_a_lat[m/s2]",
        "mean_abs_a_lon[m/s2]",
        "mean_abs_a_lat[m/s2]",
    ];
    if with_speed_error {
        headers.push("max_speed_error[km/h]");
    }
    headers.push("endpoint_error[m]");
    let mut out = CsvOut::new(headers);
    for (run, s) in rows {
        let seg = &s.segment;
        let mut row = vec![
            run.to_string(),
            g9(seg.start_t),
            g9(seg.end_t),
            g9(seg.start_s),
            g9(seg.end_s),
            g9(seg.length()),
            g9(s.max_abs_a_lon),
            g9(s.max_abs_a_lat),
            g9(s.mean_abs_a_lon),
            g9(s.mean_abs_a_lat),
        ];
        if with_speed_error {
            row.push(g9_opt(s.max_speed_error));
        }
        row.push(g9(s.endpoint_error));
        out.push(row);
    }
    out
}

/// Cell values and counts as matrices: one row per `y` bin (labelled by its
/// lower edge), one column per `x` bin. Empty cells are left blank.
pub fn map_tables(map: &BinnedMap) -> (CsvOut, CsvOut) {
    let (x, y) = (map.x_axis(), map.y_axis());
    let corner = format!("{}\\{}", y.name(), x.name());
    let headers: Vec<String> = std::iter::once(corner)
        .chain(x.edges()[..x.bins()].iter().map(|&e| g9(e)))
        .collect();
    let mut values = CsvOut::new(headers.clone());
    let mut counts = CsvOut::new(headers);
    for iy in 0..y.bins() {
        let label = g9(y.edges()[iy]);
        let mut vrow = vec![label.clone()];
        let mut crow = vec![label];
        for ix in 0..x.bins() {
            vrow.push(g9_opt(map.value(ix, iy)));
            crow.push(map.cell(ix, iy).count.to_string());
        }
        values.push(vrow);
        counts.push(crow);
    }
    (values, counts)
}

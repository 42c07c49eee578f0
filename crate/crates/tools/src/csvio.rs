//! CSV tables with a mandatory header row.
//!
//! Headers may carry units in brackets (`t[s]`, `v_fl[m/s]`); lookups use
//! the lower-cased name without the unit.

use std::io::Read;
use std::path::{Path, PathBuf};

use c2model::trajectory::{SampledTrack, TrackSample};

use crate::error::{ToolError, ToolResult};
use crate::format::g9;

#[derive(Debug, Clone)]
pub struct Row {
    /// 1-based line in the source file.
    pub line: u64,
    pub fields: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub path: PathBuf,
    pub headers: Vec<String>,
    pub rows: Vec<Row>,
}

/// `"v_FL [m/s]"` → `"v_fl"`.
pub fn column_key(header: &str) -> String {
    let name = match header.find('[') {
        Some(i) => &header[..i],
        None => header,
    };
    name.trim().to_ascii_lowercase()
}

impl Table {
    pub fn read(path: &Path) -> ToolResult<Table> {
        let file = std::fs::File::open(path).map_err(|e| ToolError::io(path, e))?;
        Self::parse(path, file)
    }

    pub fn parse(path: &Path, input: impl Read) -> ToolResult<Table> {
        let parse_err = |line: u64, msg: String| ToolError::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(input);
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| parse_err(1, e.to_string()))?
            .iter()
            .map(column_key)
            .collect();
        if headers.iter().all(String::is_empty) {
            return Err(parse_err(1, "missing header row".into()));
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                parse_err(line, e.to_string())
            })?;
            let line = record.position().map_or(0, |p| p.line());
            rows.push(Row {
                line,
                fields: record.iter().map(str::to_string).collect(),
            });
        }
        Ok(Table {
            path: path.to_path_buf(),
            headers,
            rows,
        })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn require(&self, name: &str) -> ToolResult<usize> {
        self.column(name).ok_or_else(|| ToolError::Parse {
            path: self.path.clone(),
            line: 1,
            msg: format!("missing column `{name}`"),
        })
    }

    fn err(&self, row: &Row, msg: String) -> ToolError {
        ToolError::Parse {
            path: self.path.clone(),
            line: row.line,
            msg,
        }
    }

    /// Finite number in column `col`.
    pub fn number(&self, row: &Row, col: usize) -> ToolResult<f64> {
        let v = self.maybe_number(row, col)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.err(
                row,
                format!("`{}` must be a finite number", self.headers[col]),
            ))
        }
    }

    /// Number in column `col`; an empty field or `nan` gives NaN.
    pub fn maybe_number(&self, row: &Row, col: usize) -> ToolResult<f64> {
        let field = row.fields.get(col).map(String::as_str).unwrap_or("");
        if field.is_empty() || field.eq_ignore_ascii_case("nan") {
            return Ok(f64::NAN);
        }
        field.parse().map_err(|_| {
            self.err(
                row,
                format!(
                    "`{}`: cannot parse `{field}` as a number",
                    self.headers[col]
                ),
            )
        })
    }

    /// 0/1 flag; an empty field gives `None`.
    pub fn flag(&self, row: &Row, col: usize) -> ToolResult<Option<bool>> {
        match row
            .fields
            .get(col)
            .map(|s| s.to_ascii_lowercase())
            .as_deref()
        {
            None | Some("") => Ok(None),
            Some("1") | Some("true") => Ok(Some(true)),
            Some("0") | Some("false") => Ok(Some(false)),
            Some(other) => Err(self.err(
                row,
                format!("`{}`: expected 0 or 1, got `{other}`", self.headers[col]),
            )),
        }
    }

    pub fn text<'a>(&self, row: &'a Row, col: usize) -> &'a str {
        row.fields.get(col).map(String::as_str).unwrap_or("")
    }

    /// Strictly increasing values of column `col` (usually `t`).
    pub fn times(&self, col: usize) -> ToolResult<Vec<f64>> {
        let mut out: Vec<f64> = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let t = self.number(row, col)?;
            if out.last().is_some_and(|&prev| t <= prev) {
                return Err(ToolError::NonMonotoneTime {
                    path: self.path.clone(),
                    line: row.line,
                });
            }
            out.push(t);
        }
        Ok(out)
    }
}

/// Reads a track: `t`, `x`, `y` are required, `quality` and `reverse` (0/1)
/// are optional. Other columns are ignored.
pub fn load_track(path: &Path) -> ToolResult<SampledTrack> {
    track_from_table(&Table::read(path)?)
}

pub fn track_from_table(table: &Table) -> ToolResult<SampledTrack> {
    let t = table.require("t")?;
    let x = table.require("x")?;
    let y = table.require("y")?;
    let quality = table.column("quality");
    let reverse = table.column("reverse");
    let times = table.times(t)?;
    let mut samples = Vec::with_capacity(table.rows.len());
    for (row, &t) in table.rows.iter().zip(&times) {
        samples.push(TrackSample {
            t,
            x: table.number(row, x)?,
            y: table.number(row, y)?,
            quality: quality.map(|c| table.flag(row, c)).transpose()?.flatten(),
            reverse: reverse.map(|c| table.flag(row, c)).transpose()?.flatten(),
        });
    }
    Ok(SampledTrack::new(samples)?)
}

/// Output table: headers plus pre-formatted fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvOut {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvOut {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        CsvOut {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.headers).expect("write to memory");
        for r in &self.rows {
            w.write_record(r).expect("write to memory");
        }
        w.into_inner().expect("flush to memory")
    }
}

fn flag_field(v: Option<bool>) -> String {
    v.map(|b| if b { "1" } else { "0" }.to_string())
        .unwrap_or_default()
}

/// Track as CSV; `quality`/`reverse` columns appear when any sample has them.
pub fn track_csv(track: &SampledTrack) -> CsvOut {
    let with_q = track.samples().iter().any(|s| s.quality.is_some());
    let with_r = track.samples().iter().any(|s| s.reverse.is_some());
    let mut headers = vec!["t[s]", "x[m]", "y[m]"];
    if with_q {
        headers.push("quality");
    }
    if with_r {
        headers.push("reverse");
    }
    let mut out = CsvOut::new(headers);
    for s in track.samples() {
        let mut row = vec![g9(s.t), g9(s.x), g9(s.y)];
        if with_q {
            row.push(flag_field(s.quality));
        }
        if with_r {
            row.push(flag_field(s.reverse));
        }
        out.push(row);
    }
    out
}

pub fn write_track(path: &Path, track: &SampledTrack) -> ToolResult<()> {
    std::fs::write(path, track_csv(track).to_bytes()).map_err(|e| ToolError::io(path, e))
}

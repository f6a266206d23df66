//! CSV ingestion: rows of `time, lon, lat, mid[, label]` grouped into per-device trajectories.

use std::io::Read;
use std::path::Path;

use chrono::{DateTime, FixedOffset, NaiveDateTime, TimeZone};
use mobinfer_core::{GeoPoint, MobilityLabel, Trajectory, TrajectoryRecord};

use crate::error::{data, CliError, CliResult};

/// Trajectories ordered by device id, with labels when the input had a label column.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub trajectories: Vec<Trajectory>,
    pub labels: Option<Vec<Vec<MobilityLabel>>>,
    /// Problems with rows that were skipped.
    pub diagnostics: Vec<String>,
}

impl Dataset {
    pub fn records(&self) -> usize {
        self.trajectories.iter().map(Trajectory::len).sum()
    }

    /// Latitude of the first record of the first trajectory.
    pub fn first_latitude(&self) -> Option<f64> {
        self.trajectories.first().map(|t| t.records()[0].location.lat)
    }
}

const NAIVE_FORMATS: [&str; 5] = [
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%dT%H:%M:%S%.f",
    "%Y-%m-%d %H:%M:%S%.f",
    "%H:%M:%S/%m/%d/%Y",
];

/// Epoch seconds from epoch seconds (fraction truncated), RFC 3339, naive
/// ISO 8601 or `HH:MM:SS/MM/DD/YYYY`; naive forms are read in `tz`.
pub fn parse_time(s: &str, tz: &FixedOffset) -> Option<i64> {
    let s = s.trim();
    if let Ok(t) = s.parse::<i64>() {
        return Some(t);
    }
    if let Ok(t) = s.parse::<f64>() {
        return (t.is_finite() && t.abs() < 9.0e15).then_some(t.trunc() as i64);
    }
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.timestamp());
    }
    NAIVE_FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .and_then(|n| tz.from_local_datetime(&n).single())
        .map(|t| t.timestamp())
}

struct Row {
    mid: String,
    time: i64,
    location: GeoPoint,
    label: MobilityLabel,
    line: u64,
}

struct Columns {
    time: usize,
    lon: usize,
    lat: usize,
    mid: usize,
    label: Option<usize>,
}

fn column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name))
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input)
}

fn parse_row(rec: &csv::StringRecord, cols: &Columns, tz: &FixedOffset) -> Result<Row, String> {
    let get = |i: usize, name: &str| rec.get(i).ok_or_else(|| format!("missing {name} field"));
    let time_text = get(cols.time, "time")?;
    let time = parse_time(time_text, tz).ok_or_else(|| format!("unparseable time `{time_text}`"))?;
    if time < 0 {
        return Err(format!("negative time {time}"));
    }
    let num = |i: usize, name: &str| -> Result<f64, String> {
        let v = get(i, name)?;
        v.parse::<f64>().map_err(|_| format!("unparseable {name} `{v}`"))
    };
    let (lon, lat) = (num(cols.lon, "lon")?, num(cols.lat, "lat")?);
    let location = GeoPoint::new(lon, lat).map_err(|e| e.to_string())?;
    let mid = get(cols.mid, "mid")?.to_string();
    if mid.is_empty() {
        return Err("empty mid".into());
    }
    let label = match cols.label {
        None => MobilityLabel::Unlabeled,
        Some(i) => {
            let text = rec.get(i).unwrap_or("");
            let mut chars = text.chars();
            match (chars.next(), chars.next()) {
                (None, _) => MobilityLabel::Unlabeled,
                (Some(c), None) => MobilityLabel::from_char(c).ok_or_else(|| format!("unknown label `{text}`"))?,
                _ => return Err(format!("unknown label `{text}`")),
            }
        }
    };
    Ok(Row { mid, time, location, label, line: rec.position().map_or(0, |p| p.line()) })
}

/// Read a dataset. In strict mode any bad or duplicate row fails the whole read.
pub fn ingest_reader<R: Read>(input: R, name: &str, tz: &FixedOffset, strict: bool) -> CliResult<Dataset> {
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    let need = |n: &str| column(&headers, n).ok_or_else(|| CliError::Data(format!("{name}: missing `{n}` column")));
    let cols = Columns { time: need("time")?, lon: need("lon")?, lat: need("lat")?, mid: need("mid")?, label: column(&headers, "label") };

    let mut diagnostics = Vec::new();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        match rec {
            Ok(rec) => match parse_row(&rec, &cols, tz) {
                Ok(row) => rows.push(row),
                Err(msg) => diagnostics.push(format!("{name}:{}: {msg}", rec.position().map_or(0, |p| p.line()))),
            },
            Err(e) => diagnostics.push(format!("{name}: {e}")),
        }
    }
    rows.sort_by(|a, b| a.mid.cmp(&b.mid).then(a.time.cmp(&b.time)).then(a.line.cmp(&b.line)));
    let mut kept: Vec<Row> = Vec::with_capacity(rows.len());
    for row in rows {
        match kept.last() {
            Some(prev) if prev.mid == row.mid && prev.time == row.time => diagnostics.push(format!(
                "{name}:{}: duplicate (mid {}, time {}) first seen on line {}",
                row.line, row.mid, row.time, prev.line
            )),
            _ => kept.push(row),
        }
    }
    if strict && !diagnostics.is_empty() {
        return data(diagnostics.join("\n"));
    }

    let mut trajectories = Vec::new();
    let mut labels = Vec::new();
    let mut start = 0;
    while start < kept.len() {
        let end = start + kept[start..].iter().take_while(|r| r.mid == kept[start].mid).count();
        let group = &kept[start..end];
        let recs = group.iter().map(|r| TrajectoryRecord::new(r.time, r.location)).collect();
        trajectories.push(Trajectory::new(group[0].mid.clone(), recs).map_err(|e| CliError::Data(e.to_string()))?);
        labels.push(group.iter().map(|r| r.label).collect());
        start = end;
    }
    Ok(Dataset { trajectories, labels: cols.label.map(|_| labels), diagnostics })
}

pub fn ingest(path: &Path, tz: &FixedOffset, strict: bool) -> CliResult<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    ingest_reader(std::io::BufReader::new(file), &path.display().to_string(), tz, strict)
}

/// One row of a label table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRow {
    pub mid: String,
    pub time: i64,
    pub label: MobilityLabel,
}

/// Read `mid, time, label` columns (others ignored), sorted by `(mid, time)`.
pub fn read_label_table(path: &Path, tz: &FixedOffset) -> CliResult<Vec<LabelRow>> {
    let name = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|e| CliError::Data(format!("{name}: {e}")))?;
    let mut rdr = reader(std::io::BufReader::new(file));
    let headers = rdr.headers()?.clone();
    let need = |n: &str| column(&headers, n).ok_or_else(|| CliError::Data(format!("{name}: missing `{n}` column")));
    let (mid, time, label) = (need("mid")?, need("time")?, need("label")?);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize| rec.get(i).ok_or_else(|| CliError::Data(format!("{name}:{line}: missing field")));
        let t = parse_time(field(time)?, tz).ok_or_else(|| CliError::Data(format!("{name}:{line}: unparseable time")))?;
        let text = field(label)?;
        let l = text
            .chars()
            .next()
            .filter(|_| text.chars().count() == 1)
            .and_then(MobilityLabel::from_char)
            .ok_or_else(|| CliError::Data(format!("{name}:{line}: unknown label `{text}`")))?;
        rows.push(LabelRow { mid: field(mid)?.to_string(), time: t, label: l });
    }
    rows.sort_by(|a, b| (&a.mid, a.time).cmp(&(&b.mid, b.time)));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn utc8() -> FixedOffset {
        FixedOffset::east_opt(8 * 3600).unwrap()
    }

    #[test]
    fn time_formats() {
        let tz = utc8();
        assert_eq!(parse_time("1468317761", &tz), Some(1_468_317_761));
        assert_eq!(parse_time("1468317761.9", &tz), Some(1_468_317_761));
        assert_eq!(parse_time("2016-07-12T10:02:41Z", &tz), Some(1_468_317_761));
        assert_eq!(parse_time("2016-07-12T18:02:41+08:00", &tz), Some(1_468_317_761));
        assert_eq!(parse_time("2016-07-12 18:02:41", &tz), Some(1_468_317_761));
        assert_eq!(parse_time("18:02:41/07/12/2016", &tz), Some(1_468_317_761));
        assert_eq!(parse_time("yesterday", &tz), None);
    }

    #[test]
    fn table_sample_row() {
        let csv = "time,lon,lat,mid\n18:02:41/07/12/2016,116.523625,39.792935,1370021020431\n";
        let d = ingest_reader(csv.as_bytes(), "t", &utc8(), true).unwrap();
        assert_eq!(d.trajectories.len(), 1);
        let t = &d.trajectories[0];
        assert_eq!(t.device(), "1370021020431");
        assert_eq!(t.records()[0].time, 1_468_317_761);
        assert_eq!(t.records()[0].location, GeoPoint { lon: 116.523625, lat: 39.792935 });
        assert!(d.labels.is_none());
    }

    #[test]
    fn groups_sorts_and_skips_comments() {
        let csv = "# mobinfer dataset v1\ntime,lon,lat,mid,label\n20,1,1,b,S\n10,1,1,b,T\n5,2,2,a,\n";
        let d = ingest_reader(csv.as_bytes(), "t", &utc8(), true).unwrap();
        let ids: Vec<_> = d.trajectories.iter().map(|t| t.device().to_string()).collect();
        assert_eq!(ids, ["a", "b"]);
        assert_eq!(d.trajectories[1].times().collect::<Vec<_>>(), [10, 20]);
        let labels = d.labels.unwrap();
        assert_eq!(labels[0], [MobilityLabel::Unlabeled]);
        assert_eq!(labels[1], [MobilityLabel::Travel, MobilityLabel::Stay]);
    }

    #[test]
    fn empty_input_is_an_empty_dataset() {
        let d = ingest_reader("time,lon,lat,mid\n".as_bytes(), "t", &utc8(), true).unwrap();
        assert!(d.trajectories.is_empty());
    }

    #[test]
    fn duplicates_are_reported_with_lines() {
        let csv = "time,lon,lat,mid\n10,1,1,a\n10,1.5,1,a\n";
        let err = ingest_reader(csv.as_bytes(), "in.csv", &utc8(), true).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("in.csv:3: duplicate"), "{err}");
        let lenient = ingest_reader(csv.as_bytes(), "in.csv", &utc8(), false).unwrap();
        assert_eq!(lenient.records(), 1);
        assert_eq!(lenient.diagnostics.len(), 1);
    }

    #[test]
    fn malformed_rows() {
        let csv = "time,lon,lat,mid\nnoon,1,1,a\n10,500,1,a\n10,1\n20,1,1,a\n";
        let lenient = ingest_reader(csv.as_bytes(), "x", &utc8(), false).unwrap();
        assert_eq!(lenient.records(), 1);
        assert_eq!(lenient.diagnostics.len(), 3);
        assert!(lenient.diagnostics[0].starts_with("x:2:"));
        assert!(ingest_reader(csv.as_bytes(), "x", &utc8(), true).is_err());
        assert!(ingest_reader("when,lon,lat,mid\n".as_bytes(), "x", &utc8(), true).is_err());
    }
}

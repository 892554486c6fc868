//! Hourly time-series files: CSV with a header row naming the columns, a
//! one-line unit declaration, and strictly increasing ISO-8601 UTC
//! timestamps at a fixed hourly step.

use std::path::{Path, PathBuf};

pub const ALLOWED_UNITS: [&str; 5] = ["GW", "MW", "ratio", "currency/MWh", "GWh"];

/// One parsed series file. All columns share the row axis.
#[derive(Debug, Clone)]
pub struct TimeSeriesFile {
    pub path: PathBuf,
    /// Epoch seconds of the first row.
    pub start: i64,
    pub columns: Vec<SeriesColumn>,
}

#[derive(Debug, Clone)]
pub struct SeriesColumn {
    pub name: String,
    pub unit: String,
    pub values: Vec<f64>,
}

impl TimeSeriesFile {
    pub fn column(&self, name: &str) -> Option<&SeriesColumn> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SeriesError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
}

pub fn read_series(path: &Path) -> Result<TimeSeriesFile, SeriesError> {
    let text = std::fs::read_to_string(path).map_err(|source| SeriesError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_series(&text, path)
}

fn parse_series(text: &str, path: &Path) -> Result<TimeSeriesFile, SeriesError> {
    let err = |line: usize, message: String| SeriesError::Parse {
        path: path.display().to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| err(1, "empty file".to_string()))?;
    let mut fields = header.split(',').map(str::trim);
    if fields.next() != Some("timestamp") {
        return Err(err(1, "first header field must be `timestamp`".to_string()));
    }
    let names: Vec<String> = fields.map(String::from).collect();
    if names.is_empty() {
        return Err(err(1, "no value columns".to_string()));
    }

    let (_, unit_row) = lines
        .next()
        .ok_or_else(|| err(2, "missing unit row".to_string()))?;
    let mut fields = unit_row.split(',').map(str::trim);
    if fields.next() != Some("unit") {
        return Err(err(2, "second row must declare units, label `unit`".to_string()));
    }
    let units: Vec<String> = fields.map(String::from).collect();
    if units.len() != names.len() {
        return Err(err(
            2,
            format!("{} units for {} columns", units.len(), names.len()),
        ));
    }
    for u in &units {
        if !ALLOWED_UNITS.contains(&u.as_str()) {
            return Err(err(2, format!("unknown unit `{u}`")));
        }
    }

    let mut start = 0_i64;
    let mut prev: Option<i64> = None;
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (idx, row) in lines {
        if row.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let mut fields = row.split(',').map(str::trim);
        let stamp = fields.next().unwrap_or("");
        let epoch = parse_utc(stamp).ok_or_else(|| {
            err(lineno, format!("invalid ISO-8601 UTC timestamp `{stamp}`"))
        })?;
        match prev {
            None => start = epoch,
            Some(p) if epoch - p != 3600 => {
                return Err(err(
                    lineno,
                    format!("timestamps must advance by exactly one hour, got {} s", epoch - p),
                ));
            }
            Some(_) => {}
        }
        prev = Some(epoch);
        for (k, column) in values.iter_mut().enumerate() {
            let field = fields.next().ok_or_else(|| {
                err(lineno, format!("row has fewer fields than {} columns", names.len()))
            })?;
            let v: f64 = field
                .parse()
                .map_err(|_| err(lineno, format!("column `{}`: bad number `{field}`", names[k])))?;
            if !v.is_finite() {
                return Err(err(lineno, format!("column `{}`: non-finite value", names[k])));
            }
            column.push(v);
        }
        if fields.next().is_some() {
            return Err(err(lineno, "row has more fields than the header".to_string()));
        }
    }
    if prev.is_none() {
        return Err(err(3, "no data rows".to_string()));
    }

    let columns = names
        .into_iter()
        .zip(units)
        .zip(values)
        .map(|((name, unit), values)| SeriesColumn { name, unit, values })
        .collect();
    Ok(TimeSeriesFile {
        path: path.to_path_buf(),
        start,
        columns,
    })
}

/// Parse `YYYY-MM-DDTHH:MM:SSZ` to epoch seconds; anything else is rejected.
pub fn parse_utc(s: &str) -> Option<i64> {
    let b = s.as_bytes();
    if b.len() != 20 || b[4] != b'-' || b[7] != b'-' || b[10] != b'T' || b[13] != b':'
        || b[16] != b':' || b[19] != b'Z'
    {
        return None;
    }
    let num = |range: std::ops::Range<usize>| -> Option<i64> {
        let part = &s[range];
        if part.bytes().all(|c| c.is_ascii_digit()) {
            part.parse().ok()
        } else {
            None
        }
    };
    let (y, m, d) = (num(0..4)?, num(5..7)?, num(8..10)?);
    let (hh, mm, ss) = (num(11..13)?, num(14..16)?, num(17..19)?);
    if !(1..=12).contains(&m) || !(1..=31).contains(&d) || hh > 23 || mm > 59 || ss > 59 {
        return None;
    }
    Some(days_from_civil(y, m, d) * 86_400 + hh * 3600 + mm * 60 + ss)
}

/// Render epoch seconds as `YYYY-MM-DDTHH:MM:SSZ`.
pub fn format_utc(epoch: i64) -> String {
    let days = epoch.div_euclid(86_400);
    let secs = epoch.rem_euclid(86_400);
    let (y, m, d) = civil_from_days(days);
    format!(
        "{y:04}-{m:02}-{d:02}T{:02}:{:02}:{:02}Z",
        secs / 3600,
        (secs % 3600) / 60,
        secs % 60
    )
}

// Proleptic-Gregorian day arithmetic (days since 1970-01-01).
fn days_from_civil(y: i64, m: i64, d: i64) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = y.div_euclid(400);
    let yoe = y - era * 400;
    let doy = (153 * (if m > 2 { m - 3 } else { m + 9 }) + 2) / 5 + d - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

fn civil_from_days(z: i64) -> (i64, i64, i64) {
    let z = z + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    (era * 400 + yoe + i64::from(m <= 2), m, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "timestamp,AT_el,DE_el\n\
                          unit,GW,GW\n\
                          2016-01-01T00:00:00Z,5.0,60.5\n\
                          2016-01-01T01:00:00Z,4.8,58.1\n\
                          2016-01-01T02:00:00Z,4.7,57.0\n";

    #[test]
    fn parses_well_formed_file() {
        let f = parse_series(SAMPLE, Path::new("demand.csv")).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.start, parse_utc("2016-01-01T00:00:00Z").unwrap());
        let at = f.column("AT_el").unwrap();
        assert_eq!(at.unit, "GW");
        assert_eq!(at.values, vec![5.0, 4.8, 4.7]);
        assert_eq!(f.column("DE_el").unwrap().values[2], 57.0);
    }

    #[test]
    fn timestamp_round_trip_covers_leap_years() {
        for stamp in [
            "1970-01-01T00:00:00Z",
            "2016-02-29T23:00:00Z",
            "2016-12-31T23:00:00Z",
            "2100-03-01T00:00:00Z",
        ] {
            let epoch = parse_utc(stamp).unwrap();
            assert_eq!(format_utc(epoch), stamp);
        }
        assert_eq!(parse_utc("2016-01-01T00:00:00Z").unwrap(), 1_451_606_400);
    }

    #[test]
    fn rejects_gap_in_hourly_grid() {
        let text = "timestamp,a\nunit,GW\n\
                    2016-01-01T00:00:00Z,1\n2016-01-01T02:00:00Z,2\n";
        let e = parse_series(text, Path::new("x.csv")).unwrap_err();
        assert!(e.to_string().contains("one hour"), "{e}");
    }

    #[test]
    fn rejects_unknown_unit_and_bad_rows() {
        let bad_unit = "timestamp,a\nunit,kW\n2016-01-01T00:00:00Z,1\n";
        assert!(parse_series(bad_unit, Path::new("x.csv"))
            .unwrap_err()
            .to_string()
            .contains("unknown unit"));
        let short_row = "timestamp,a,b\nunit,GW,GW\n2016-01-01T00:00:00Z,1\n";
        assert!(parse_series(short_row, Path::new("x.csv")).is_err());
        let bad_stamp = "timestamp,a\nunit,GW\n2016-01-01 00:00,1\n";
        assert!(parse_series(bad_stamp, Path::new("x.csv"))
            .unwrap_err()
            .to_string()
            .contains("ISO-8601"));
    }
}

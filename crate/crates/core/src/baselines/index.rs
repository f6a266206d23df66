//! Spatial grid, weekly hour and relative minute indices.

use chrono::{DateTime, Datelike, FixedOffset, Timelike};

use crate::error::{Error, Result};
use crate::geo::GeoPoint;

/// Cells per degree of the spatial grid.
pub const GRID_CELLS_PER_DEGREE: f64 = 1000.0;

/// `(floor(lon·1000), floor(lat·1000))`.
pub fn grid_index(p: &GeoPoint) -> (i64, i64) {
    (
        (p.lon * GRID_CELLS_PER_DEGREE).floor() as i64,
        (p.lat * GRID_CELLS_PER_DEGREE).floor() as i64,
    )
}

/// First day of the week for [`hour_index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeekStart {
    /// Sunday is day 0, so Monday noon is hour 36.
    #[default]
    Sunday,
    /// Monday is day 0, so Sunday midnight is hour 144.
    Monday,
}

/// Timezone and week convention of the hour index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexConfig {
    pub timezone: FixedOffset,
    pub week_start: WeekStart,
}

impl Default for IndexConfig {
    fn default() -> Self {
        Self { timezone: FixedOffset::east_opt(8 * 3600).expect("valid offset"), week_start: WeekStart::Sunday }
    }
}

/// Hour of day plus 24 times the day of week, in `[0, 167]`.
pub fn hour_index(time: i64, config: &IndexConfig) -> u32 {
    let local = DateTime::from_timestamp(time, 0)
        .unwrap_or(DateTime::UNIX_EPOCH)
        .with_timezone(&config.timezone);
    let day = match config.week_start {
        WeekStart::Sunday => local.weekday().num_days_from_sunday(),
        WeekStart::Monday => local.weekday().num_days_from_monday(),
    };
    local.hour() + 24 * day
}

/// Whole minutes elapsed since `segment_start`.
pub fn minute_index(time: i64, segment_start: i64) -> Result<i64> {
    if time < segment_start {
        return Err(Error::NegativeElapsed { time, start: segment_start });
    }
    Ok((time - segment_start) / 60)
}

/// A spatial cell and weekly hour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpatioTemporalBin {
    pub grid_lon: i64,
    pub grid_lat: i64,
    pub hour: u32,
}

impl SpatioTemporalBin {
    pub fn of(time: i64, p: &GeoPoint, config: &IndexConfig) -> Self {
        let (grid_lon, grid_lat) = grid_index(p);
        Self { grid_lon, grid_lat, hour: hour_index(time, config) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{NaiveDate, TimeZone};
    use proptest::prelude::*;

    fn at(cfg: &IndexConfig, y: i32, m: u32, d: u32, h: u32, min: u32) -> i64 {
        let naive = NaiveDate::from_ymd_opt(y, m, d).unwrap().and_hms_opt(h, min, 0).unwrap();
        cfg.timezone.from_local_datetime(&naive).unwrap().timestamp()
    }

    #[test]
    fn grid_examples() {
        assert_eq!(grid_index(&GeoPoint { lon: 116.523625, lat: 39.792935 }), (116523, 39792));
        assert_eq!(grid_index(&GeoPoint { lon: 0.0, lat: 0.0 }), (0, 0));
        assert_eq!(grid_index(&GeoPoint { lon: -0.0005, lat: 0.0 }).0, -1);
    }

    #[test]
    fn hour_examples() {
        let cfg = IndexConfig::default();
        // 2016-07-11 is a Monday.
        assert_eq!(hour_index(at(&cfg, 2016, 7, 11, 12, 50), &cfg), 36);
        let monday = IndexConfig { week_start: WeekStart::Monday, ..cfg };
        assert_eq!(hour_index(at(&monday, 2016, 7, 10, 0, 30), &monday), 144);
        assert_eq!(hour_index(at(&cfg, 2016, 7, 10, 0, 30), &cfg), 0);
        assert_eq!(hour_index(at(&cfg, 2016, 7, 16, 23, 59), &cfg), 167);
    }

    #[test]
    fn timezone_shifts_the_hour() {
        let utc = IndexConfig { timezone: FixedOffset::east_opt(0).unwrap(), ..IndexConfig::default() };
        let t = at(&utc, 2016, 7, 11, 4, 0);
        assert_eq!(hour_index(t, &utc), 28);
        assert_eq!(hour_index(t, &IndexConfig::default()), 36);
    }

    #[test]
    fn minute_examples() {
        assert_eq!(minute_index(100, 100), Ok(0));
        assert_eq!(minute_index(190, 100), Ok(1));
        assert_eq!(minute_index(3699, 100), Ok(59));
        assert!(minute_index(99, 100).is_err());
    }

    proptest! {
        #[test]
        fn hour_in_range(t in 0i64..4_000_000_000, monday in any::<bool>()) {
            let cfg = IndexConfig { week_start: if monday { WeekStart::Monday } else { WeekStart::Sunday }, ..IndexConfig::default() };
            prop_assert!(hour_index(t, &cfg) < 168);
        }

        #[test]
        fn grid_steps_by_one_per_cell(lon in -179_000i64..179_000, lat in -89_000i64..89_000) {
            // Cell centers avoid floating-point edge effects at cell boundaries.
            let p = GeoPoint { lon: (lon as f64 + 0.5) / 1000.0, lat: (lat as f64 + 0.5) / 1000.0 };
            let q = GeoPoint { lon: p.lon + 0.001, lat: p.lat + 0.001 };
            let (a, b) = (grid_index(&p), grid_index(&q));
            prop_assert_eq!((b.0 - a.0, b.1 - a.1), (1, 1));
        }
    }
}

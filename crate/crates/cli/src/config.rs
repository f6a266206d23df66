//! Run settings: built-in defaults, then a `key=value` file, then flags.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::FixedOffset;
use clap::Args;
use mobinfer_core::{MobilityParams, SdsOptions};

use crate::error::{usage, CliError, CliResult};

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Spatial threshold in meters [default: 800]
    #[arg(long)]
    pub delta_s: Option<f64>,
    /// Temporal threshold in seconds [default: 1800]
    #[arg(long)]
    pub delta_t: Option<i64>,
    /// Root random seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core [default: 0]
    #[arg(long)]
    pub workers: Option<usize>,
    /// Emit a stay window still open at the end of a segment [default: true]
    #[arg(long, value_name = "BOOL")]
    pub tail_flush: Option<bool>,
    /// UTC offset for naive timestamps and hour indices, e.g. +08:00 or UTC [default: +08:00]
    #[arg(long)]
    pub timezone: Option<String>,
    /// Reference latitude of the distance model [default: first record of the input]
    #[arg(long)]
    pub ref_lat: Option<f64>,
    /// Fail on any malformed or duplicate input row
    #[arg(long)]
    pub strict: bool,
    /// File of key=value defaults; flags take precedence
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
}

/// Resolved settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: MobilityParams,
    pub seed: u64,
    pub workers: usize,
    pub sds: SdsOptions,
    pub timezone: FixedOffset,
    pub ref_lat: Option<f64>,
    pub strict: bool,
}

const KEYS: [&str; 8] = ["delta_s", "delta_t", "seed", "workers", "tail_flush", "timezone", "ref_lat", "strict"];

fn read_config_file(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return usage(format!("{}:{}: expected key=value", path.display(), n + 1));
        };
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return usage(format!("{}:{}: unknown key `{}`", path.display(), n + 1, k.trim()));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

fn from_file<T: std::str::FromStr>(file: &BTreeMap<String, String>, key: &str) -> CliResult<Option<T>> {
    file.get(key)
        .map(|v| v.parse::<T>().map_err(|_| CliError::Usage(format!("config: bad value `{v}` for {key}"))))
        .transpose()
}

/// Parse `+08:00`, `-0530`, `+8`, `UTC`, `Z` or `UTC+8`.
pub fn parse_timezone(s: &str) -> CliResult<FixedOffset> {
    let t = s.trim();
    let t = t.strip_prefix("UTC").or_else(|| t.strip_prefix("GMT")).unwrap_or(t);
    if t.is_empty() || t == "Z" {
        return Ok(FixedOffset::east_opt(0).expect("zero offset"));
    }
    let bad = || CliError::Usage(format!("invalid timezone `{s}`"));
    let (sign, rest) = match t.as_bytes()[0] {
        b'+' => (1, &t[1..]),
        b'-' => (-1, &t[1..]),
        _ => return Err(bad()),
    };
    let (h, m) = match rest.split_once(':') {
        Some((h, m)) => (h, m),
        None if rest.len() == 4 => rest.split_at(2),
        None => (rest, "0"),
    };
    let h: i32 = h.parse().map_err(|_| bad())?;
    let m: i32 = m.parse().map_err(|_| bad())?;
    if !(0..=23).contains(&h) || !(0..=59).contains(&m) {
        return Err(bad());
    }
    FixedOffset::east_opt(sign * (h * 3600 + m * 60)).ok_or_else(bad)
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> CliResult<Self> {
        let file = match &args.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        let delta_s = args.delta_s.or(from_file(&file, "delta_s")?).unwrap_or(800.0);
        let delta_t = args.delta_t.or(from_file(&file, "delta_t")?).unwrap_or(1800);
        let params = MobilityParams::new(delta_s, delta_t).map_err(|e| CliError::Usage(e.to_string()))?;
        let tz_text = args.timezone.clone().or(file.get("timezone").cloned());
        let timezone = match tz_text {
            Some(t) => parse_timezone(&t)?,
            None => FixedOffset::east_opt(8 * 3600).expect("valid offset"),
        };
        let ref_lat = args.ref_lat.or(from_file(&file, "ref_lat")?);
        if let Some(lat) = ref_lat {
            if !(-90.0..=90.0).contains(&lat) {
                return usage(format!("reference latitude {lat} out of range"));
            }
        }
        Ok(Self {
            params,
            seed: args.seed.or(from_file(&file, "seed")?).unwrap_or(0),
            workers: args.workers.or(from_file(&file, "workers")?).unwrap_or(0),
            sds: SdsOptions { tail_flush: args.tail_flush.or(from_file(&file, "tail_flush")?).unwrap_or(true) },
            timezone,
            ref_lat,
            strict: args.strict || from_file(&file, "strict")?.unwrap_or(false),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timezones() {
        assert_eq!(parse_timezone("+08:00").unwrap().local_minus_utc(), 28_800);
        assert_eq!(parse_timezone("UTC+8").unwrap().local_minus_utc(), 28_800);
        assert_eq!(parse_timezone("-0530").unwrap().local_minus_utc(), -19_800);
        assert_eq!(parse_timezone("UTC").unwrap().local_minus_utc(), 0);
        assert_eq!(parse_timezone("Z").unwrap().local_minus_utc(), 0);
        assert!(parse_timezone("Mars").is_err());
        assert!(parse_timezone("+25").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "# defaults\ndelta_s = 500\ndelta-t=600\nseed=7\ntail_flush=false\n").unwrap();
        let args = CommonArgs { delta_s: Some(900.0), config: Some(path), ..CommonArgs::default() };
        let cfg = RunConfig::resolve(&args).unwrap();
        assert_eq!(cfg.params.delta_s, 900.0);
        assert_eq!(cfg.params.delta_t, 600);
        assert_eq!(cfg.seed, 7);
        assert!(!cfg.sds.tail_flush);
    }

    #[test]
    fn bad_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "colour=blue\n").unwrap();
        let args = CommonArgs { config: Some(path), ..CommonArgs::default() };
        assert!(matches!(RunConfig::resolve(&args), Err(CliError::Usage(_))));
        let neg = CommonArgs { delta_s: Some(-1.0), ..CommonArgs::default() };
        assert!(matches!(RunConfig::resolve(&neg), Err(CliError::Usage(_))));
    }
}

//! Subcommand implementations.

use std::io::Write;
use std::path::Path;

use mobinfer_core::baselines::hmm::{hmm_predict, hmm_train, HmmModel, ObservationBuckets};
use mobinfer_core::baselines::index::{IndexConfig, SpatioTemporalBin, WeekStart};
use mobinfer_core::baselines::voting::{voting_predict, voting_train, VotingModel};
use mobinfer_core::eval::{prop1_violation_rate, resampling_experiment, sparsity_report, ConfusionCounts, MetricsReport};
use mobinfer_core::oracle::exact_label_with_limit;
use mobinfer_core::sds::{label_dataset, recall_lower_bounds, LabeledTrajectory};
use mobinfer_core::seed::{derive_seed, stream};
use mobinfer_core::sim::{resample_mask, simulate_dataset, CtrwConfig, GeoFrame, SimulationConfig, TruncatedPowerLaw};
use mobinfer_core::{GeoPoint, Mobility, MobilityLabel, MobilityParams, Projection, Trajectory};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{data, usage, CliError, CliResult};
use crate::ingest::{ingest, read_label_table, Dataset};
use crate::output::{metric, Report};
use crate::{BaselineArgs, Command, EvaluateArgs, ExperimentArgs, Method, Prop1Args, SimArgs, StatsArgs, WeekStartArg};

pub fn dispatch(command: &Command, cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Label(a) => run_label(&a.input, a.output.as_deref(), cfg, stdout, stderr),
        Command::Oracle(a) => run_oracle(&a.io.input, a.io.output.as_deref(), a.limit, cfg, stdout, stderr),
        Command::Stats(a) => run_stats(a, cfg, stderr),
        Command::Simulate(a) => run_simulate(&a.sim, a.output.as_deref(), cfg, stdout),
        Command::Resample(a) => run_resample(&a.io.input, a.io.output.as_deref(), a.rate, cfg, stdout, stderr),
        Command::Evaluate(a) => run_evaluate(a, cfg, stdout),
        Command::Prop1(a) => run_prop1(a, cfg, stdout, stderr),
        Command::Bounds(a) => run_bounds(&a.input, a.output.as_deref(), cfg, stdout, stderr),
        Command::Baseline(a) => run_baseline(a, cfg, stdout, stderr),
        Command::Experiment(a) => run_experiment(a, cfg, stdout),
    }
}

fn load(path: &Path, cfg: &RunConfig, stderr: &mut dyn Write) -> CliResult<Dataset> {
    let d = ingest(path, &cfg.timezone, cfg.strict)?;
    for msg in &d.diagnostics {
        writeln!(stderr, "warning: {msg}")?;
    }
    Ok(d)
}

fn projection(cfg: &RunConfig, d: &Dataset) -> Projection {
    Projection::new(cfg.ref_lat.or(d.first_latitude()).unwrap_or(0.0))
}

fn label_report<'a, L, I>(trajs: &[Trajectory], labels: I) -> CliResult<Report>
where
    I: IntoIterator<Item = &'a Vec<L>>,
    L: Copy + Into<MobilityLabel> + 'a,
{
    let mut r = Report::new("labels", &["mid", "time", "label"])?;
    for (t, ls) in trajs.iter().zip(labels) {
        for (rec, &l) in t.records().iter().zip(ls) {
            r.row([t.device(), &rec.time.to_string(), &l.into().as_char().to_string()])?;
        }
    }
    Ok(r)
}

fn run_label(input: &Path, output: Option<&Path>, cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let d = load(input, cfg, stderr)?;
    let labels = label_dataset(&d.trajectories, &cfg.params, &projection(cfg, &d), cfg.sds);
    label_report(&d.trajectories, &labels)?.emit(output, stdout)
}

fn run_oracle(input: &Path, output: Option<&Path>, limit: usize, cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let d = load(input, cfg, stderr)?;
    let proj = projection(cfg, &d);
    let labels: Vec<Vec<Mobility>> = d
        .trajectories
        .par_iter()
        .map(|t| {
            exact_label_with_limit(t, &cfg.params, &proj, limit)
                .map(|o| o.labels)
                .map_err(|e| CliError::Data(format!("trajectory {}: {e}", t.device())))
        })
        .collect::<CliResult<_>>()?;
    label_report(&d.trajectories, &labels)?.emit(output, stdout)
}

fn run_stats(a: &StatsArgs, cfg: &RunConfig, stderr: &mut dyn Write) -> CliResult<()> {
    let d = load(&a.input, cfg, stderr)?;
    if d.trajectories.is_empty() {
        return data("stats: the dataset is empty");
    }
    let proj = projection(cfg, &d);
    let rep = sparsity_report(&d.trajectories, &a.coverage_delta_t, &cfg.params, &proj, cfg.sds)
        .map_err(|e| CliError::Data(e.to_string()))?;
    std::fs::create_dir_all(&a.output_dir)?;
    let out = |name: &str| a.output_dir.join(name);

    let xi: Vec<f64> = d.trajectories.iter().filter_map(|t| mobinfer_core::global_sparsity(t).ok()).collect();
    let mut summary = Report::new("stats-summary", &["trajectories", "records", "singletons", "mean_sparsity"])?;
    let mean = (!xi.is_empty()).then(|| xi.iter().sum::<f64>() / xi.len() as f64);
    summary.row([
        d.trajectories.len().to_string(),
        d.records().to_string(),
        rep.singletons.to_string(),
        metric(mean),
    ])?;
    summary.emit(Some(&out("summary.csv")), &mut std::io::sink())?;

    let mut global = Report::new("global-sparsity", &["bin", "lower", "upper", "trajectories"])?;
    for &(b, n) in &rep.global_sparsity.bins {
        let (lo, hi) = rep.global_sparsity.bounds(b);
        global.row([b.to_string(), format!("{lo:.6}"), format!("{hi:.6}"), n.to_string()])?;
    }
    global.emit(Some(&out("global_sparsity.csv")), &mut std::io::sink())?;

    let mut coverage = Report::new("local-coverage", &["delta_t", "bin", "lower", "upper", "trajectories"])?;
    for (dt, h) in &rep.coverage {
        for (b, n) in h.counts.iter().enumerate() {
            let (lo, hi) = h.bounds(b);
            coverage.row([dt.to_string(), b.to_string(), format!("{lo:.6}"), format!("{hi:.6}"), n.to_string()])?;
        }
    }
    coverage.emit(Some(&out("local_coverage.csv")), &mut std::io::sink())?;

    let header = ["bin", "lower", "upper", "trajectories", "mean_length", "stay_share", "travel_share", "unlabeled_share"];
    let mut by = Report::new("by-sparsity", &header)?;
    for row in &rep.by_sparsity {
        let (lo, hi) = rep.global_sparsity.bounds(row.bin);
        by.row([
            row.bin.to_string(),
            format!("{lo:.6}"),
            format!("{hi:.6}"),
            row.trajectories.to_string(),
            format!("{:.6}", row.mean_length()),
            format!("{:.6}", row.share(row.stay)),
            format!("{:.6}", row.share(row.travel)),
            format!("{:.6}", row.share(row.unlabeled)),
        ])?;
    }
    by.emit(Some(&out("by_sparsity.csv")), &mut std::io::sink())
}

fn simulation_config(sim: &SimArgs, cfg: &RunConfig) -> CliResult<SimulationConfig> {
    let origin = GeoPoint::new(sim.origin_lon, sim.origin_lat).map_err(|e| CliError::Usage(e.to_string()))?;
    let config = SimulationConfig {
        ctrw: CtrwConfig {
            wait_exponent: sim.wait_exponent,
            wait_min: sim.wait_min,
            wait_max: sim.wait_max,
            jump_exponent: sim.jump_exponent,
            jump_min: sim.jump_min,
            jump_max: sim.jump_max,
            speed: sim.speed,
            jitter_radius: sim.jitter,
            enforce_truncation: !sim.no_truncation,
            ..CtrwConfig::default()
        },
        interval_law: TruncatedPowerLaw { exponent: sim.interval_exponent, xmin: sim.interval_min, xmax: sim.interval_max },
        records_per_trajectory: sim.records,
        trajectories: sim.trajectories,
        frame: GeoFrame { origin, epoch: sim.epoch },
        resolution: sim.resolution,
        stay_only: sim.stay_only,
        seed: cfg.seed,
    };
    config.ctrw.validate(&cfg.params).map_err(|e| CliError::Usage(e.to_string()))?;
    config.interval_law.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if !(sim.resolution > 0.0 && sim.resolution <= 1.0) {
        return usage(format!("resolution must be in (0, 1], got {}", sim.resolution));
    }
    if sim.records == 0 {
        return usage("--records must be at least 1");
    }
    Ok(config)
}

fn dataset_report<'a>(rows: impl Iterator<Item = (&'a str, i64, GeoPoint, Option<MobilityLabel>)>, labeled: bool) -> CliResult<Report> {
    let header: &[&str] = if labeled { &["time", "lon", "lat", "mid", "label"] } else { &["time", "lon", "lat", "mid"] };
    let mut r = Report::new("dataset", header)?;
    for (mid, time, p, label) in rows {
        let mut fields = vec![time.to_string(), p.lon.to_string(), p.lat.to_string(), mid.to_string()];
        if labeled {
            fields.push(label.unwrap_or_default().as_char().to_string());
        }
        r.row(fields)?;
    }
    Ok(r)
}

fn run_simulate(sim: &SimArgs, output: Option<&Path>, cfg: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let config = simulation_config(sim, cfg)?;
    let data = simulate_dataset(&config, &cfg.params).map_err(|e| CliError::Usage(e.to_string()))?;
    let rows = data.iter().flat_map(|s| {
        s.records.iter().zip(&s.labels).map(|(r, &l)| (s.device.as_str(), r.time, r.location, Some(l.into())))
    });
    dataset_report(rows, true)?.emit(output, stdout)
}

fn run_resample(input: &Path, output: Option<&Path>, rate: f64, cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    if !(0.0..=1.0).contains(&rate) {
        return usage(format!("--rate must be in [0, 1], got {rate}"));
    }
    let d = load(input, cfg, stderr)?;
    let masks: Vec<Vec<bool>> = d
        .trajectories
        .iter()
        .enumerate()
        .map(|(i, t)| resample_mask(t.len(), rate, derive_seed(cfg.seed, stream::RESAMPLE, i as u64)))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let labeled = d.labels.is_some();
    let rows = d.trajectories.iter().enumerate().flat_map(|(i, t)| {
        let labels = d.labels.as_ref().map(|l| &l[i]);
        let mask = &masks[i];
        t.records()
            .iter()
            .enumerate()
            .filter(move |(k, _)| mask[*k])
            .map(move |(k, r)| (t.device(), r.time, r.location, labels.map(|l| l[k])))
    });
    dataset_report(rows, labeled)?.emit(output, stdout)
}

fn run_evaluate(a: &EvaluateArgs, cfg: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let pred = read_label_table(&a.predicted, &cfg.timezone)?;
    let truth = read_label_table(&a.truth, &cfg.timezone)?;
    if pred.len() != truth.len() {
        return data(format!("{} predicted rows but {} truth rows", pred.len(), truth.len()));
    }
    let mut counts = ConfusionCounts::default();
    for (p, t) in pred.iter().zip(&truth) {
        if (&p.mid, p.time) != (&t.mid, t.time) {
            return data(format!("row key mismatch: predicted ({}, {}) vs truth ({}, {})", p.mid, p.time, t.mid, t.time));
        }
        let Some(tm) = t.label.mobility() else {
            return data(format!("truth label for ({}, {}) is U; truth must be S or T", t.mid, t.time));
        };
        counts.record(p.label, tm);
    }
    let m = MetricsReport::from_counts(&counts);
    let header = ["ts", "fs", "tv", "fv", "us", "ut", "evaluated", "sp", "sr", "vp", "vr", "acc", "f1_acc"];
    let mut r = Report::new("metrics", &header)?;
    let c = counts;
    let mut fields: Vec<String> = [c.ts, c.fs, c.tv, c.fv, c.us, c.ut, c.evaluated()].iter().map(u64::to_string).collect();
    fields.extend([m.sp, m.sr, m.vp, m.vr, m.acc, m.f1_acc].map(metric));
    r.row(fields)?;
    r.emit(a.output.as_deref(), stdout)
}

fn run_prop1(a: &Prop1Args, cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let d = load(&a.io.input, cfg, stderr)?;
    if d.trajectories.is_empty() {
        return data("prop1: the dataset is empty");
    }
    let spatial = if a.delta_s_grid.is_empty() { vec![cfg.params.delta_s] } else { a.delta_s_grid.clone() };
    let temporal = if a.delta_t_grid.is_empty() { vec![cfg.params.delta_t] } else { a.delta_t_grid.clone() };
    let grid: Vec<MobilityParams> = spatial
        .iter()
        .flat_map(|&s| temporal.iter().map(move |&t| MobilityParams::new(s, t)))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let res = prop1_violation_rate(&d.trajectories, &grid, &projection(cfg, &d)).map_err(|e| CliError::Data(e.to_string()))?;
    let mut r = Report::new("prop1", &["delta_s", "delta_t", "tested", "violations", "rate"])?;
    for (p, c) in res {
        r.row([p.delta_s.to_string(), p.delta_t.to_string(), c.tested.to_string(), c.violations.to_string(), metric(c.rate())])?;
    }
    r.emit(a.io.output.as_deref(), stdout)
}

fn run_bounds(input: &Path, output: Option<&Path>, cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let d = load(input, cfg, stderr)?;
    let proj = projection(cfg, &d);
    let bounds: Vec<_> = d.trajectories.par_iter().map(|t| recall_lower_bounds(t, &cfg.params, &proj, cfg.sds)).collect();
    let mut r = Report::new("bounds", &["mid", "records", "stay_bound", "travel_bound"])?;
    for (t, b) in d.trajectories.iter().zip(bounds) {
        r.row([t.device().to_string(), t.len().to_string(), format!("{:.6}", b.stay_bound), format!("{:.6}", b.travel_bound)])?;
    }
    r.emit(output, stdout)
}

fn write_voting(model: &VotingModel, path: &Path) -> CliResult<()> {
    let mut r = Report::new("voting-model", &["grid_lon", "grid_lat", "hour", "stay", "travel"])?;
    for (b, (s, t)) in &model.counts {
        r.row([b.grid_lon.to_string(), b.grid_lat.to_string(), b.hour.to_string(), s.to_string(), t.to_string()])?;
    }
    r.emit(Some(path), &mut std::io::sink())
}

fn model_reader(path: &Path) -> CliResult<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(file))
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, path: &Path) -> CliResult<T> {
    let line = rec.position().map_or(0, |p| p.line());
    rec.get(i)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| CliError::Data(format!("{}:{line}: bad field {}", path.display(), i + 1)))
}

fn read_voting(path: &Path, seed: u64, index: IndexConfig) -> CliResult<VotingModel> {
    let mut model = VotingModel::empty(seed, index);
    for rec in model_reader(path)?.records() {
        let rec = rec?;
        let bin = SpatioTemporalBin {
            grid_lon: parse_field(&rec, 0, path)?,
            grid_lat: parse_field(&rec, 1, path)?,
            hour: parse_field(&rec, 2, path)?,
        };
        model.counts.insert(bin, (parse_field(&rec, 3, path)?, parse_field(&rec, 4, path)?));
    }
    Ok(model)
}

fn state_name(i: usize) -> String {
    Mobility::from_index(i).as_char().to_string()
}

fn write_hmm(model: &HmmModel, path: &Path) -> CliResult<()> {
    let mut r = Report::new("hmm-model", &["table", "from", "to", "value"])?;
    for (i, e) in model.buckets.distance_edges.iter().enumerate() {
        r.row(["distance_edge".to_string(), String::new(), i.to_string(), e.to_string()])?;
    }
    for (i, e) in model.buckets.gap_edges.iter().enumerate() {
        r.row(["gap_edge".to_string(), String::new(), i.to_string(), e.to_string()])?;
    }
    for s in 0..2 {
        r.row(["initial".to_string(), String::new(), state_name(s), model.initial[s].to_string()])?;
    }
    for a in 0..2 {
        for b in 0..2 {
            r.row(["transition".to_string(), state_name(a), state_name(b), model.transition[a][b].to_string()])?;
        }
    }
    for s in 0..2 {
        for (o, p) in model.emission[s].iter().enumerate() {
            r.row(["emission".to_string(), state_name(s), o.to_string(), p.to_string()])?;
        }
    }
    r.emit(Some(path), &mut std::io::sink())
}

fn read_hmm(path: &Path) -> CliResult<HmmModel> {
    let state = |s: &str| match s {
        "S" => Ok(0),
        "T" => Ok(1),
        _ => data(format!("{}: unknown state `{s}`", path.display())),
    };
    let mut buckets = ObservationBuckets { distance_edges: Vec::new(), gap_edges: Vec::new() };
    let mut initial = [f64::NAN; 2];
    let mut transition = [[f64::NAN; 2]; 2];
    let mut emission: [Vec<(usize, f64)>; 2] = [Vec::new(), Vec::new()];
    for rec in model_reader(path)?.records() {
        let rec = rec?;
        let table = rec.get(0).unwrap_or("");
        let from = rec.get(1).unwrap_or("");
        let to = rec.get(2).unwrap_or("");
        match table {
            "distance_edge" => buckets.distance_edges.push(parse_field(&rec, 3, path)?),
            "gap_edge" => buckets.gap_edges.push(parse_field(&rec, 3, path)?),
            "initial" => initial[state(to)?] = parse_field(&rec, 3, path)?,
            "transition" => transition[state(from)?][state(to)?] = parse_field(&rec, 3, path)?,
            "emission" => emission[state(from)?].push((parse_field(&rec, 2, path)?, parse_field(&rec, 3, path)?)),
            other => return data(format!("{}: unknown table `{other}`", path.display())),
        }
    }
    let symbols = buckets.symbols();
    let mut dense = [vec![f64::NAN; symbols], vec![f64::NAN; symbols]];
    for s in 0..2 {
        for &(o, p) in &emission[s] {
            if o >= symbols {
                return data(format!("{}: emission symbol {o} out of range", path.display()));
            }
            dense[s][o] = p;
        }
    }
    let complete = initial.iter().chain(transition.iter().flatten()).chain(dense.iter().flatten()).all(|p| p.is_finite());
    if !complete {
        return data(format!("{}: incomplete HMM model", path.display()));
    }
    Ok(HmmModel { initial, transition, emission: dense, buckets })
}

fn training(d: &Dataset) -> CliResult<Vec<LabeledTrajectory<'_>>> {
    let Some(labels) = &d.labels else { return data("training data needs a label column") };
    Ok(d.trajectories
        .iter()
        .zip(labels)
        .map(|(trajectory, labels)| LabeledTrajectory { trajectory, labels: labels.clone() })
        .collect())
}

fn run_baseline(a: &BaselineArgs, cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let index = IndexConfig {
        timezone: cfg.timezone,
        week_start: match a.week_start {
            WeekStartArg::Sunday => WeekStart::Sunday,
            WeekStartArg::Monday => WeekStart::Monday,
        },
    };
    let train = a.train.as_deref().map(|p| load(p, cfg, stderr)).transpose()?;
    let input = a.input.as_deref().map(|p| load(p, cfg, stderr)).transpose()?;
    let proj = match (&train, &input) {
        (Some(d), _) | (None, Some(d)) => projection(cfg, d),
        (None, None) => Projection::new(cfg.ref_lat.unwrap_or(0.0)),
    };
    let predictions: Option<Vec<Vec<Mobility>>> = match a.method {
        Method::Voting => {
            let model = match (&train, &a.model_in) {
                (Some(d), _) => voting_train(&training(d)?, index, cfg.seed).map_err(|e| CliError::Data(e.to_string()))?,
                (None, Some(p)) => read_voting(p, cfg.seed, index)?,
                (None, None) => return usage("give --train or --model-in"),
            };
            if let Some(p) = &a.model_out {
                write_voting(&model, p)?;
            }
            input.as_ref().map(|d| {
                d.trajectories
                    .par_iter()
                    .map(|t| t.records().iter().map(|r| voting_predict(&model, r)).collect())
                    .collect()
            })
        }
        Method::Hmm => {
            let model = match (&train, &a.model_in) {
                (Some(d), _) => hmm_train(&training(d)?, ObservationBuckets::default(), &proj).map_err(|e| CliError::Data(e.to_string()))?,
                (None, Some(p)) => read_hmm(p)?,
                (None, None) => return usage("give --train or --model-in"),
            };
            if let Some(p) = &a.model_out {
                write_hmm(&model, p)?;
            }
            input.as_ref().map(|d| d.trajectories.par_iter().map(|t| hmm_predict(&model, t, &proj)).collect())
        }
    };
    match (&input, predictions) {
        (Some(d), Some(preds)) => label_report(&d.trajectories, &preds)?.emit(a.output.as_deref(), stdout),
        _ => Ok(()),
    }
}

fn run_experiment(a: &ExperimentArgs, cfg: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let config = simulation_config(&a.sim, cfg)?;
    let rows = resampling_experiment(&config, &a.rates, &cfg.params, cfg.sds).map_err(|e| CliError::Usage(e.to_string()))?;
    let header = ["rate", "records", "mean_sparsity", "sp", "sr", "vp", "vr", "acc", "f1_acc", "false_stay", "false_travel"];
    let mut r = Report::new("experiment", &header)?;
    for row in rows {
        let m = row.metrics;
        let mut fields = vec![format!("{:.2}", row.rate), row.records.to_string(), metric(row.mean_sparsity)];
        fields.extend([m.sp, m.sr, m.vp, m.vr, m.acc, m.f1_acc].map(metric));
        fields.push(row.precision_counts.fs.to_string());
        fields.push(row.precision_counts.fv.to_string());
        r.row(fields)?;
    }
    r.emit(a.output.as_deref(), stdout)
}

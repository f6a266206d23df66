use mobinfer_core::eval::*;
use mobinfer_core::sim::{simulate_dataset, synth_schedule, SimulationConfig, TruncatedPowerLaw};
use mobinfer_core::{GeoPoint, Mobility, MobilityLabel, MobilityParams, SdsOptions, Trajectory, TrajectoryRecord};
use proptest::prelude::*;

fn label_strategy() -> impl Strategy<Value = (MobilityLabel, Mobility)> {
    (0usize..3, 0usize..2).prop_map(|(p, t)| {
        let p = [MobilityLabel::Stay, MobilityLabel::Travel, MobilityLabel::Unlabeled][p];
        (p, Mobility::from_index(t))
    })
}

proptest! {
    #[test]
    fn metric_identities(pairs in prop::collection::vec(label_strategy(), 0..200)) {
        let (pred, truth): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let mask = vec![true; pred.len()];
        let c = ConfusionCounts::tally(&pred, &truth, &mask).unwrap();
        let r = MetricsReport::from_counts(&c);
        let predicted_stays = pred.iter().filter(|&&p| p == MobilityLabel::Stay).count() as u64;
        prop_assert_eq!(c.ts + c.fs, predicted_stays);
        if let Some(sp) = r.sp {
            prop_assert!((sp * predicted_stays as f64 - c.ts as f64).abs() < 1e-9);
        } else {
            prop_assert_eq!(predicted_stays, 0);
        }
        let correct = pred.iter().zip(&truth).filter(|(p, t)| p.mobility() == Some(**t)).count() as u64;
        match r.acc {
            Some(acc) => prop_assert!((acc * c.evaluated() as f64 - correct as f64).abs() < 1e-9),
            None => prop_assert_eq!(c.evaluated(), 0),
        }
        prop_assert_eq!(c.evaluated() + c.us + c.ut, pred.len() as u64);
        for v in [r.sp, r.sr, r.vp, r.vr, r.acc, r.f1_acc].into_iter().flatten() {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }
}

#[test]
fn experiment_output_is_repeatable() {
    let sim = SimulationConfig { trajectories: 30, records_per_trajectory: 100, seed: 9, ..SimulationConfig::default() };
    let p = MobilityParams::default();
    let a = resampling_experiment(&sim, &default_rates(), &p, SdsOptions::default()).unwrap();
    let b = resampling_experiment(&sim, &default_rates(), &p, SdsOptions::default()).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

#[test]
fn prop1_has_no_violations_on_stay_only_simulation() {
    let sim = SimulationConfig { trajectories: 100, records_per_trajectory: 150, stay_only: true, seed: 4, ..SimulationConfig::default() };
    let p = MobilityParams::default();
    let data: Vec<Trajectory> = simulate_dataset(&sim, &p).unwrap().iter().filter_map(|s| s.trajectory().ok()).collect();
    let res = prop1_violation_rate(&data, &[p], &sim.frame.projection()).unwrap();
    assert!(res[0].1.tested > 0);
    assert_eq!(res[0].1.violations, 0);
}

#[test]
fn sparsity_histogram_follows_the_schedule_law() {
    let law = TruncatedPowerLaw::new(1.8, 60.0, 1e6).unwrap();
    let origin = GeoPoint { lon: 116.4, lat: 39.9 };
    let data: Vec<Trajectory> = (0..50_000u64)
        .map(|i| {
            let s = synth_schedule(2, &law, i).unwrap();
            let recs = s.times().iter().map(|&t| TrajectoryRecord::new(t, origin)).collect();
            Trajectory::new(format!("d{i}"), recs).unwrap()
        })
        .collect();
    let proj = mobinfer_core::Projection::new(origin.lat);
    let r = sparsity_report(&data, &[1800], &MobilityParams::default(), &proj, SdsOptions::default()).unwrap();
    let slope = r.global_sparsity.slope(60.0, 1e5).unwrap();
    assert!((slope + 1.8).abs() <= 0.15, "{slope}");
    assert_eq!(r.global_sparsity.total(), 50_000);
}

//! Synthetic scenario generation.
//!
//! Instances mimic a two-line metro corridor: every station exposes one
//! platform per line, the lines run in opposite directions, and physical
//! trains turn around at the shared terminus under a crossing-over window.
//! All windows are placed symmetrically around a feasible baseline built by
//! forward propagation, so the baseline sits at the window midpoints and
//! passes the audit by construction.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::kinematics::minimum_trip_time;
use crate::model::{
    Connection, CrossOver, HeadwayPair, Instance, Network, PhysicsParams, Platform, PlatformIdx,
    Timetable, Track, TrackIdx, Train, TrainIdx, TurnaroundPair,
};
use crate::time::{Micros, UncertainWindow};

#[derive(Clone, Copy, Debug)]
pub struct ScenarioParams {
    /// Departure spacing between consecutive trains of a line, seconds.
    pub spacing_s: f64,
    pub dwell_base_s: f64,
    pub dwell_halfwidth_s: f64,
    /// Trip-time margin above the track's minimum feasible time, seconds.
    pub trip_margin_s: f64,
    pub trip_halfwidth_s: f64,
    pub cross_margin_s: f64,
    pub cross_halfwidth_s: f64,
    pub headway_s: f64,
    pub connect_halfwidth_s: f64,
    /// Connections are only created when the baseline gap stays below this.
    pub connect_max_gap_s: f64,
    pub travel_lead_slack_s: f64,
    /// Fraction of the summed trip/dwell half-widths granted as travel slack.
    pub travel_slack_factor: f64,
    pub closeness_radius_s: f64,
    /// Half-width of the box uncertainty put on every window bound, seconds.
    pub uncertainty_s: f64,
    pub track_len_min_m: f64,
    pub track_len_max_m: f64,
    /// Mode of the triangular length distribution; the defaults give a
    /// 1.4 km mean over [738 m, 2.6 km].
    pub track_len_mode_m: f64,
    pub grade_limit_deg: f64,
    pub crossover_length_m: f64,
    pub horizon_margin_s: f64,
    pub physics: PhysicsParams,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            spacing_s: 120.0,
            dwell_base_s: 30.0,
            dwell_halfwidth_s: 10.0,
            trip_margin_s: 15.0,
            trip_halfwidth_s: 10.0,
            cross_margin_s: 15.0,
            cross_halfwidth_s: 10.0,
            headway_s: 90.0,
            connect_halfwidth_s: 90.0,
            connect_max_gap_s: 900.0,
            travel_lead_slack_s: 30.0,
            travel_slack_factor: 0.7,
            closeness_radius_s: 60.0,
            uncertainty_s: 2.0,
            track_len_min_m: 738.0,
            track_len_max_m: 2600.0,
            track_len_mode_m: 862.0,
            grade_limit_deg: 2.00453,
            crossover_length_m: 300.0,
            horizon_margin_s: 600.0,
            physics: PhysicsParams {
                accel_max: 1.04,
                decel_max: -0.8,
                eta_elec_to_kin: 0.9,
                eta_kin_to_regen: 0.76,
                transmission_loss: 0.1,
                train_mass: 220_000.0,
                davis_coeffs: (2500.0, 40.0, 6.0),
                speed_limit: 22.2,
            },
        }
    }
}

fn triangular(rng: &mut ChaCha8Rng, min: f64, mode: f64, max: f64) -> f64 {
    let u: f64 = rng.gen();
    let c = (mode - min) / (max - min);
    if u < c {
        min + (u * (max - min) * (mode - min)).sqrt()
    } else {
        max - ((1.0 - u) * (max - min) * (max - mode)).sqrt()
    }
}

/// A window of `±halfwidth` seconds around `base`, with box uncertainty of
/// `±uncertainty` on each bound placed so the robustified window is exactly
/// `[base - halfwidth, base + halfwidth]`.
fn window_around(base: Micros, halfwidth_s: f64, uncertainty_s: f64) -> UncertainWindow {
    let half = Micros::from_secs_f64(halfwidth_s);
    let unc = Micros::from_secs_f64(uncertainty_s);
    UncertainWindow {
        lb_interval: (base - half - unc, base - half),
        ub_interval: (base + half, base + half + unc),
    }
}

/// Generates a deterministic two-line instance plus its feasible baseline.
///
/// Trains split evenly over the lines; line-two trains are the turnaround
/// continuations of line-one trains where counts allow. Every station's
/// platform pair is regen-eligible, and each (train, station) gets one
/// transfer connection to the temporally closest opposite-line departure.
pub fn generate_scenario(
    seed: u64,
    n_trains: usize,
    n_stations: usize,
    params: &ScenarioParams,
) -> (Instance, Timetable) {
    assert!(n_trains >= 2, "need at least two trains");
    assert!(n_stations >= 2, "need at least two stations");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let physics = params.physics;

    // Shared corridor geometry: one length/grade per station gap.
    let n_gaps = n_stations - 1;
    let gap_lengths: Vec<f64> = (0..n_gaps)
        .map(|_| {
            triangular(
                &mut rng,
                params.track_len_min_m,
                params.track_len_mode_m,
                params.track_len_max_m,
            )
        })
        .collect();
    let gap_grades: Vec<f64> = (0..n_gaps)
        .map(|_| rng.gen_range(-params.grade_limit_deg..=params.grade_limit_deg))
        .collect();

    // Platforms: S{s}_1 on line 1, S{s}_2 on line 2, per station.
    let mut platforms = Vec::with_capacity(2 * n_stations);
    for s in 0..n_stations {
        platforms.push(Platform {
            id: format!("S{:02}_1", s + 1),
            station_id: format!("S{:02}", s + 1),
            line_id: "L1".into(),
        });
        platforms.push(Platform {
            id: format!("S{:02}_2", s + 1),
            station_id: format!("S{:02}", s + 1),
            line_id: "L2".into(),
        });
    }
    let p1 = |s: usize| PlatformIdx((2 * s) as u32);
    let p2 = |s: usize| PlatformIdx((2 * s + 1) as u32);

    // Line 1 runs forward, line 2 backward over the same gaps.
    let mut tracks = Vec::with_capacity(2 * n_gaps);
    for s in 0..n_gaps {
        tracks.push(Track {
            from: p1(s),
            to: p1(s + 1),
            length: gap_lengths[s],
            grade: gap_grades[s],
        });
    }
    for s in (0..n_gaps).rev() {
        tracks.push(Track {
            from: p2(s + 1),
            to: p2(s),
            length: gap_lengths[s],
            grade: -gap_grades[s],
        });
    }
    let line1_track = |s: usize| TrackIdx(s as u32);
    let line2_track_pos = |k: usize| TrackIdx((n_gaps + k) as u32);

    let line1_path: Vec<PlatformIdx> = (0..n_stations).map(p1).collect();
    let line2_path: Vec<PlatformIdx> = (0..n_stations).rev().map(p2).collect();
    let line1_tracks: Vec<TrackIdx> = (0..n_gaps).map(line1_track).collect();
    let line2_tracks: Vec<TrackIdx> = (0..n_gaps).map(line2_track_pos).collect();

    // Baseline trip time per track: minimum feasible plus the margin.
    let trip_base: Vec<Micros> = tracks
        .iter()
        .map(|t| Micros::from_secs_f64(minimum_trip_time(t, &physics) + params.trip_margin_s))
        .collect();
    let dwell_base = Micros::from_secs_f64(params.dwell_base_s);
    let spacing = Micros::from_secs_f64(params.spacing_s);

    let n_line1 = n_trains - n_trains / 2;
    let n_line2 = n_trains / 2;

    // Travel window shared per line.
    let travel_window = |path_tracks: &[TrackIdx]| {
        let total_trips: i64 = path_tracks.iter().map(|&tr| trip_base[tr.get()].0).sum();
        let intermediates = (path_tracks.len().saturating_sub(1)) as i64;
        let base = Micros(total_trips) + dwell_base * intermediates;
        let slack_budget = params.travel_slack_factor
            * (path_tracks.len() as f64 * params.trip_halfwidth_s
                + intermediates as f64 * params.dwell_halfwidth_s);
        let lead = Micros::from_secs_f64(params.travel_lead_slack_s);
        let unc = Micros::from_secs_f64(params.uncertainty_s);
        let ub = base + Micros::from_secs_f64(slack_budget);
        UncertainWindow {
            lb_interval: (base - lead - unc, base - lead),
            ub_interval: (ub, ub + unc),
        }
    };

    let mut trains = Vec::with_capacity(n_trains);
    for k in 0..n_line1 {
        trains.push(Train {
            id: format!("L1T{:04}", k),
            path_platforms: line1_path.clone(),
            path_tracks: line1_tracks.clone(),
            travel_window: travel_window(&line1_tracks),
        });
    }
    for k in 0..n_line2 {
        trains.push(Train {
            id: format!("L2T{:04}", k),
            path_platforms: line2_path.clone(),
            path_tracks: line2_tracks.clone(),
            travel_window: travel_window(&line2_tracks),
        });
    }
    let l1 = |k: usize| TrainIdx(k as u32);
    let l2 = |k: usize| TrainIdx((n_line1 + k) as u32);

    // Baseline by forward propagation at window midpoints.
    let mut baseline = Timetable::new();
    let mut propagate = |train: TrainIdx, path: &[PlatformIdx], tracks_of: &[TrackIdx], start: Micros| {
        let mut arr = start;
        for (pos, &p) in path.iter().enumerate() {
            baseline.set_arrival(train, p, arr);
            let dep = arr + dwell_base;
            baseline.set_departure(train, p, dep);
            if pos < tracks_of.len() {
                arr = dep + trip_base[tracks_of[pos].get()];
            }
        }
    };
    for k in 0..n_line1 {
        propagate(l1(k), &line1_path, &line1_tracks, spacing * k as i64);
    }
    // Line-two trains continue line-one trains through the crossover.
    let cross_segment = Track {
        from: p1(n_stations - 1),
        to: p2(n_stations - 1),
        length: params.crossover_length_m,
        grade: 0.0,
    };
    let cross_base = Micros::from_secs_f64(
        minimum_trip_time(&cross_segment, &physics) + params.cross_margin_s,
    );
    let line1_end_departure = {
        let total: i64 = line1_tracks.iter().map(|&tr| trip_base[tr.get()].0).sum();
        Micros(total) + dwell_base * n_stations as i64
    };
    let line2_start = line1_end_departure + cross_base;
    for k in 0..n_line2 {
        propagate(l2(k), &line2_path, &line2_tracks, line2_start + spacing * k as i64);
    }

    let crossovers = vec![CrossOver {
        from: p1(n_stations - 1),
        to: p2(n_stations - 1),
        turnaround_pairs: (0..n_line2)
            .map(|k| TurnaroundPair {
                from_train: l1(k),
                to_train: l2(k),
                window: window_around(cross_base, params.cross_halfwidth_s, params.uncertainty_s),
            })
            .collect(),
    }];

    let network = Network {
        platforms,
        tracks,
        crossovers,
    };

    // Windows around the baseline.
    let mut dwell_windows = std::collections::BTreeMap::new();
    let mut trip_windows = std::collections::BTreeMap::new();
    for (ti, train) in trains.iter().enumerate() {
        let t = TrainIdx(ti as u32);
        for &p in &train.path_platforms {
            dwell_windows.insert(
                (t, p),
                window_around(dwell_base, params.dwell_halfwidth_s, params.uncertainty_s),
            );
        }
        for &tr in &train.path_tracks {
            trip_windows.insert(
                (t, tr),
                window_around(
                    trip_base[tr.get()],
                    params.trip_halfwidth_s,
                    params.uncertainty_s,
                ),
            );
        }
    }

    // Headways between consecutive trains of each line, per track.
    let headway = Micros::from_secs_f64(params.headway_s);
    let mut headways = Vec::new();
    for line_trains in [
        (0..n_line1).map(l1).collect::<Vec<_>>(),
        (0..n_line2).map(l2).collect::<Vec<_>>(),
    ] {
        if line_trains.is_empty() {
            continue;
        }
        let tracks_of = &trains[line_trains[0].get()].path_tracks;
        for pair in line_trains.windows(2) {
            for &tr in tracks_of {
                headways.push(HeadwayPair {
                    track: tr,
                    first: pair[0],
                    second: pair[1],
                    headway_from: headway,
                    headway_to: headway,
                });
            }
        }
    }

    // One transfer connection per (train, station) to the nearest
    // opposite-line departure in the baseline.
    let mut connections = Vec::new();
    let opposite = |p: PlatformIdx| {
        if p.0 % 2 == 0 {
            PlatformIdx(p.0 + 1)
        } else {
            PlatformIdx(p.0 - 1)
        }
    };
    let trains_ref = &trains;
    let other_line_trains = |t: TrainIdx| -> Vec<TrainIdx> {
        if t.get() < n_line1 {
            (0..n_line2).map(l2).collect()
        } else {
            (0..n_line1).map(l1).collect()
        }
    };
    for (ti, train) in trains_ref.iter().enumerate() {
        let t = TrainIdx(ti as u32);
        for &i in &train.path_platforms {
            let j = opposite(i);
            let Some(arr) = baseline.arrival(t, i) else { continue };
            let mut best: Option<(Micros, TrainIdx)> = None;
            for u in other_line_trains(t) {
                if let Some(dep) = baseline.departure(u, j) {
                    let gap = (dep - arr).abs();
                    if best.map_or(true, |(g, _)| gap < g) {
                        best = Some((gap, u));
                    }
                }
            }
            if let Some((gap, u)) = best {
                if gap.as_secs_f64() <= params.connect_max_gap_s {
                    let diff = baseline.departure(u, j).unwrap() - arr;
                    connections.push(Connection {
                        from_platform: i,
                        to_platform: j,
                        arriving: t,
                        departing: u,
                        window: window_around(
                            diff,
                            params.connect_halfwidth_s,
                            params.uncertainty_s,
                        ),
                    });
                }
            }
        }
    }

    // Every station's platform pair is regen-eligible; ids order as built.
    let regen_pairs: Vec<(PlatformIdx, PlatformIdx)> =
        (0..n_stations).map(|s| (p1(s), p2(s))).collect();

    let mut instance = Instance {
        network,
        trains,
        dwell_windows,
        trip_windows,
        connections,
        headways,
        regen_pairs,
        horizon: Micros::from_secs(1), // placeholder until computed below
        closeness_radius: Micros::from_secs_f64(params.closeness_radius_s),
        physics,
        crossover_length: params.crossover_length_m,
    };

    // Horizon: at least the analytic bound, and past the latest baseline
    // event with room for every window to stretch.
    let computed = instance.computed_horizon().expect("generator builds a DAG");
    let last_event = instance
        .trains
        .iter()
        .enumerate()
        .filter_map(|(ti, train)| baseline.arrival(TrainIdx(ti as u32), train.last_platform()))
        .max()
        .unwrap_or(Micros::ZERO);
    let margin = Micros::from_secs_f64(
        params.horizon_margin_s
            + params.travel_slack_factor
                * (n_stations as f64)
                * (params.trip_halfwidth_s + params.dwell_halfwidth_s),
    );
    instance.horizon = computed.max(last_event + margin);

    (instance, baseline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{audit_timetable, validate_instance};

    #[test]
    fn generated_instance_is_valid_and_baseline_feasible() {
        let (instance, baseline) = generate_scenario(7, 12, 5, &ScenarioParams::default());
        let violations = validate_instance(&instance);
        assert!(violations.is_empty(), "{violations:?}");
        let report = audit_timetable(&instance, &baseline).unwrap();
        assert!(report.is_feasible(), "{:?}", report.violations);
    }

    #[test]
    fn same_seed_reproduces_the_instance() {
        let a = generate_scenario(42, 10, 4, &ScenarioParams::default());
        let b = generate_scenario(42, 10, 4, &ScenarioParams::default());
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        let c = generate_scenario(43, 10, 4, &ScenarioParams::default());
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn minimal_two_by_two_scenario_is_buildable() {
        let (instance, baseline) = generate_scenario(1, 2, 2, &ScenarioParams::default());
        assert_eq!(instance.trains.len(), 2);
        assert!(validate_instance(&instance).is_empty());
        assert!(audit_timetable(&instance, &baseline).unwrap().is_feasible());
    }
}

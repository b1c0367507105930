//! Instance document: one structured-text (TOML) file describing the
//! network, trains, windows, relation sets, physics, and parameters.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{
    Connection, CrossOver, HeadwayPair, Instance, Network, PhysicsParams, Platform, PlatformIdx,
    Track, TrackIdx, Train, TrainIdx, TurnaroundPair,
};
use crate::time::{Micros, UncertainWindow};

use super::IoError;

pub const SCHEMA_VERSION: i64 = 1;

#[derive(Serialize, Deserialize)]
struct FileDoc {
    schema_version: i64,
    /// Platform-id pairs eligible for regenerative transfer.
    regen_pairs: Vec<(String, String)>,
    network: FileNetwork,
    trains: Vec<FileTrain>,
    windows: FileWindows,
    #[serde(default)]
    headways: Vec<FileHeadway>,
    #[serde(default)]
    connections: Vec<FileConnection>,
    physics: PhysicsParams,
    params: FileParams,
}

#[derive(Serialize, Deserialize)]
struct FileNetwork {
    platforms: Vec<FilePlatform>,
    tracks: Vec<FileTrack>,
    #[serde(default)]
    crossovers: Vec<FileCrossover>,
}

#[derive(Serialize, Deserialize)]
struct FilePlatform {
    id: String,
    station_id: String,
    line_id: String,
}

#[derive(Serialize, Deserialize)]
struct FileTrack {
    from: String,
    to: String,
    length: f64,
    grade: f64,
}

#[derive(Serialize, Deserialize)]
struct FileCrossover {
    from: String,
    to: String,
    turnaround_pairs: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
struct FileTrain {
    id: String,
    path_platforms: Vec<String>,
    /// Indices into `network.tracks`, one per consecutive platform pair.
    path_tracks: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct FileWindows {
    dwell: Vec<FileDwellWindow>,
    trip: Vec<FileTripWindow>,
    #[serde(default)]
    crossover: Vec<FileCrossWindow>,
    travel: Vec<FileTravelWindow>,
}

#[derive(Serialize, Deserialize)]
struct FileDwellWindow {
    train: String,
    platform: String,
    lb_interval: (Micros, Micros),
    ub_interval: (Micros, Micros),
}

#[derive(Serialize, Deserialize)]
struct FileTripWindow {
    train: String,
    from: String,
    to: String,
    lb_interval: (Micros, Micros),
    ub_interval: (Micros, Micros),
}

#[derive(Serialize, Deserialize)]
struct FileCrossWindow {
    from_train: String,
    to_train: String,
    lb_interval: (Micros, Micros),
    ub_interval: (Micros, Micros),
}

#[derive(Serialize, Deserialize)]
struct FileTravelWindow {
    train: String,
    lb_interval: (Micros, Micros),
    ub_interval: (Micros, Micros),
}

#[derive(Serialize, Deserialize)]
struct FileHeadway {
    from: String,
    to: String,
    first: String,
    second: String,
    headway_from: Micros,
    headway_to: Micros,
}

#[derive(Serialize, Deserialize)]
struct FileConnection {
    from_platform: String,
    to_platform: String,
    arriving: String,
    departing: String,
    lb_interval: (Micros, Micros),
    ub_interval: (Micros, Micros),
}

#[derive(Serialize, Deserialize)]
struct FileParams {
    horizon: Micros,
    closeness_radius: Micros,
    crossover_length: f64,
}

fn window(lb: (Micros, Micros), ub: (Micros, Micros)) -> UncertainWindow {
    UncertainWindow {
        lb_interval: lb,
        ub_interval: ub,
    }
}

pub fn write_instance(instance: &Instance) -> Result<String, IoError> {
    let net = &instance.network;
    let platform_id = |p: PlatformIdx| net.platform_id(p).to_string();
    let train_id = |t: TrainIdx| instance.train_id(t).to_string();

    let mut windows = FileWindows {
        dwell: Vec::new(),
        trip: Vec::new(),
        crossover: Vec::new(),
        travel: Vec::new(),
    };
    for (&(t, p), w) in &instance.dwell_windows {
        windows.dwell.push(FileDwellWindow {
            train: train_id(t),
            platform: platform_id(p),
            lb_interval: w.lb_interval,
            ub_interval: w.ub_interval,
        });
    }
    for (&(t, tr), w) in &instance.trip_windows {
        let track = net.track(tr);
        windows.trip.push(FileTripWindow {
            train: train_id(t),
            from: platform_id(track.from),
            to: platform_id(track.to),
            lb_interval: w.lb_interval,
            ub_interval: w.ub_interval,
        });
    }
    for crossover in &net.crossovers {
        for pair in &crossover.turnaround_pairs {
            windows.crossover.push(FileCrossWindow {
                from_train: train_id(pair.from_train),
                to_train: train_id(pair.to_train),
                lb_interval: pair.window.lb_interval,
                ub_interval: pair.window.ub_interval,
            });
        }
    }
    for train in &instance.trains {
        windows.travel.push(FileTravelWindow {
            train: train.id.clone(),
            lb_interval: train.travel_window.lb_interval,
            ub_interval: train.travel_window.ub_interval,
        });
    }

    let doc = FileDoc {
        schema_version: SCHEMA_VERSION,
        regen_pairs: instance
            .regen_pairs
            .iter()
            .map(|&(i, j)| (platform_id(i), platform_id(j)))
            .collect(),
        network: FileNetwork {
            platforms: net
                .platforms
                .iter()
                .map(|p| FilePlatform {
                    id: p.id.clone(),
                    station_id: p.station_id.clone(),
                    line_id: p.line_id.clone(),
                })
                .collect(),
            tracks: net
                .tracks
                .iter()
                .map(|t| FileTrack {
                    from: platform_id(t.from),
                    to: platform_id(t.to),
                    length: t.length,
                    grade: t.grade,
                })
                .collect(),
            crossovers: net
                .crossovers
                .iter()
                .map(|c| FileCrossover {
                    from: platform_id(c.from),
                    to: platform_id(c.to),
                    turnaround_pairs: c
                        .turnaround_pairs
                        .iter()
                        .map(|p| (train_id(p.from_train), train_id(p.to_train)))
                        .collect(),
                })
                .collect(),
        },
        trains: instance
            .trains
            .iter()
            .map(|t| FileTrain {
                id: t.id.clone(),
                path_platforms: t.path_platforms.iter().map(|&p| platform_id(p)).collect(),
                path_tracks: t.path_tracks.iter().map(|tr| tr.get()).collect(),
            })
            .collect(),
        windows,
        headways: instance
            .headways
            .iter()
            .map(|h| {
                let track = net.track(h.track);
                FileHeadway {
                    from: platform_id(track.from),
                    to: platform_id(track.to),
                    first: train_id(h.first),
                    second: train_id(h.second),
                    headway_from: h.headway_from,
                    headway_to: h.headway_to,
                }
            })
            .collect(),
        connections: instance
            .connections
            .iter()
            .map(|c| FileConnection {
                from_platform: platform_id(c.from_platform),
                to_platform: platform_id(c.to_platform),
                arriving: train_id(c.arriving),
                departing: train_id(c.departing),
                lb_interval: c.window.lb_interval,
                ub_interval: c.window.ub_interval,
            })
            .collect(),
        physics: instance.physics,
        params: FileParams {
            horizon: instance.horizon,
            closeness_radius: instance.closeness_radius,
            crossover_length: instance.crossover_length,
        },
    };
    Ok(toml::to_string(&doc)?)
}

pub fn read_instance(text: &str) -> Result<Instance, IoError> {
    let doc: FileDoc = toml::from_str(text)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(IoError::SchemaVersion(doc.schema_version));
    }

    let platform_index: BTreeMap<&str, PlatformIdx> = doc
        .network
        .platforms
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id.as_str(), PlatformIdx(i as u32)))
        .collect();
    let platform = |id: &str| -> Result<PlatformIdx, IoError> {
        platform_index
            .get(id)
            .copied()
            .ok_or_else(|| IoError::UnknownId {
                kind: "platform",
                id: id.to_string(),
            })
    };
    let train_index: BTreeMap<&str, TrainIdx> = doc
        .trains
        .iter()
        .enumerate()
        .map(|(i, t)| (t.id.as_str(), TrainIdx(i as u32)))
        .collect();
    let train = |id: &str| -> Result<TrainIdx, IoError> {
        train_index.get(id).copied().ok_or_else(|| IoError::UnknownId {
            kind: "train",
            id: id.to_string(),
        })
    };

    let tracks: Vec<Track> = doc
        .network
        .tracks
        .iter()
        .map(|t| {
            Ok(Track {
                from: platform(&t.from)?,
                to: platform(&t.to)?,
                length: t.length,
                grade: t.grade,
            })
        })
        .collect::<Result<_, IoError>>()?;
    let track_index: BTreeMap<(PlatformIdx, PlatformIdx), TrackIdx> = tracks
        .iter()
        .enumerate()
        .map(|(i, t)| ((t.from, t.to), TrackIdx(i as u32)))
        .collect();

    // Travel windows are matched to trains by id.
    let mut travel: BTreeMap<&str, UncertainWindow> = BTreeMap::new();
    for w in &doc.windows.travel {
        travel.insert(&w.train, window(w.lb_interval, w.ub_interval));
    }

    let trains: Vec<Train> = doc
        .trains
        .iter()
        .map(|t| {
            let path_platforms: Vec<PlatformIdx> = t
                .path_platforms
                .iter()
                .map(|p| platform(p))
                .collect::<Result<_, IoError>>()?;
            let path_tracks: Vec<TrackIdx> = t
                .path_tracks
                .iter()
                .map(|&idx| {
                    if idx < tracks.len() {
                        Ok(TrackIdx(idx as u32))
                    } else {
                        Err(IoError::Malformed {
                            kind: "train",
                            msg: format!("{}: track index {idx} out of range", t.id),
                        })
                    }
                })
                .collect::<Result<_, IoError>>()?;
            let travel_window =
                travel
                    .get(t.id.as_str())
                    .copied()
                    .ok_or_else(|| IoError::Malformed {
                        kind: "windows.travel",
                        msg: format!("missing travel window for train {}", t.id),
                    })?;
            Ok(Train {
                id: t.id.clone(),
                path_platforms,
                path_tracks,
                travel_window,
            })
        })
        .collect::<Result<_, IoError>>()?;

    // Crossover windows matched to pairs by (from_train, to_train).
    let mut cross_windows: BTreeMap<(TrainIdx, TrainIdx), UncertainWindow> = BTreeMap::new();
    for w in &doc.windows.crossover {
        cross_windows.insert(
            (train(&w.from_train)?, train(&w.to_train)?),
            window(w.lb_interval, w.ub_interval),
        );
    }
    let crossovers: Vec<CrossOver> = doc
        .network
        .crossovers
        .iter()
        .map(|c| {
            let turnaround_pairs = c
                .turnaround_pairs
                .iter()
                .map(|(a, b)| {
                    let key = (train(a)?, train(b)?);
                    let w = cross_windows.get(&key).copied().ok_or_else(|| {
                        IoError::Malformed {
                            kind: "windows.crossover",
                            msg: format!("missing crossover window for ({a}, {b})"),
                        }
                    })?;
                    Ok(TurnaroundPair {
                        from_train: key.0,
                        to_train: key.1,
                        window: w,
                    })
                })
                .collect::<Result<_, IoError>>()?;
            Ok(CrossOver {
                from: platform(&c.from)?,
                to: platform(&c.to)?,
                turnaround_pairs,
            })
        })
        .collect::<Result<_, IoError>>()?;

    let mut dwell_windows = BTreeMap::new();
    for w in &doc.windows.dwell {
        dwell_windows.insert(
            (train(&w.train)?, platform(&w.platform)?),
            window(w.lb_interval, w.ub_interval),
        );
    }
    let mut trip_windows = BTreeMap::new();
    for w in &doc.windows.trip {
        let key = (platform(&w.from)?, platform(&w.to)?);
        let track = track_index
            .get(&key)
            .copied()
            .ok_or_else(|| IoError::Malformed {
                kind: "windows.trip",
                msg: format!("no track {} -> {}", w.from, w.to),
            })?;
        trip_windows.insert(
            (train(&w.train)?, track),
            window(w.lb_interval, w.ub_interval),
        );
    }

    let headways = doc
        .headways
        .iter()
        .map(|h| {
            let key = (platform(&h.from)?, platform(&h.to)?);
            let track = track_index
                .get(&key)
                .copied()
                .ok_or_else(|| IoError::Malformed {
                    kind: "headways",
                    msg: format!("no track {} -> {}", h.from, h.to),
                })?;
            Ok(HeadwayPair {
                track,
                first: train(&h.first)?,
                second: train(&h.second)?,
                headway_from: h.headway_from,
                headway_to: h.headway_to,
            })
        })
        .collect::<Result<_, IoError>>()?;

    let connections = doc
        .connections
        .iter()
        .map(|c| {
            Ok(Connection {
                from_platform: platform(&c.from_platform)?,
                to_platform: platform(&c.to_platform)?,
                arriving: train(&c.arriving)?,
                departing: train(&c.departing)?,
                window: window(c.lb_interval, c.ub_interval),
            })
        })
        .collect::<Result<_, IoError>>()?;

    let regen_pairs = doc
        .regen_pairs
        .iter()
        .map(|(a, b)| Ok((platform(a)?, platform(b)?)))
        .collect::<Result<_, IoError>>()?;

    Ok(Instance {
        network: Network {
            platforms: doc
                .network
                .platforms
                .into_iter()
                .map(|p| Platform {
                    id: p.id,
                    station_id: p.station_id,
                    line_id: p.line_id,
                })
                .collect(),
            tracks,
            crossovers,
        },
        trains,
        dwell_windows,
        trip_windows,
        connections,
        headways,
        regen_pairs,
        horizon: doc.params.horizon,
        closeness_radius: doc.params.closeness_radius,
        physics: doc.physics,
        crossover_length: doc.params.crossover_length,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{generate_scenario, ScenarioParams};

    #[test]
    fn canonical_round_trip_is_bit_exact() {
        let (instance, _) = generate_scenario(3, 8, 4, &ScenarioParams::default());
        let text = write_instance(&instance).unwrap();
        let parsed = read_instance(&text).unwrap();
        assert_eq!(parsed, instance);
        let text2 = write_instance(&parsed).unwrap();
        assert_eq!(text, text2);
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let (instance, _) = generate_scenario(3, 4, 3, &ScenarioParams::default());
        let text = write_instance(&instance)
            .unwrap()
            .replace("schema_version = 1", "schema_version = 2");
        assert!(matches!(
            read_instance(&text),
            Err(IoError::SchemaVersion(2))
        ));
    }
}

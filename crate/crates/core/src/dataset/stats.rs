//! Dataset summaries.

use std::io::Read;

use serde::Serialize;

use super::format::{DatasetHeader, DatasetReader, Provenance, Transition, ACT_DIM};
use crate::error::Result;
use crate::sensing::OBS_DIM;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetStats {
    pub count: u64,
    pub env_version: String,
    pub provenance: Vec<Provenance>,
    pub obs: Vec<FieldStats>,
    pub action: Vec<FieldStats>,
    pub reward: FieldStats,
    pub total_reward: f64,
    pub terminals: u64,
    /// Number of timeout flags, i.e. completed episodes.
    pub episodes: u64,
    /// Return of each completed episode, in file order. Only meaningful for
    /// datasets whose episodes are stored contiguously.
    pub episode_returns: Vec<f64>,
    pub mean_episode_return: Option<f64>,
}

struct Acc {
    min: f64,
    max: f64,
    sum: f64,
}

impl Acc {
    fn new() -> Self {
        Self { min: f64::INFINITY, max: f64::NEG_INFINITY, sum: 0.0 }
    }

    fn add(&mut self, v: f32) {
        let v = v as f64;
        self.min = self.min.min(v);
        self.max = self.max.max(v);
        self.sum += v;
    }

    fn finish(&self, n: u64) -> FieldStats {
        if n == 0 {
            return FieldStats { min: 0.0, max: 0.0, mean: 0.0 };
        }
        FieldStats { min: self.min, max: self.max, mean: self.sum / n as f64 }
    }
}

/// Single streaming pass over a dataset.
pub fn stats_from_reader<R: Read>(reader: DatasetReader<R>) -> Result<DatasetStats> {
    let header: DatasetHeader = reader.header().clone();
    let mut obs: Vec<Acc> = (0..OBS_DIM).map(|_| Acc::new()).collect();
    let mut act: Vec<Acc> = (0..ACT_DIM).map(|_| Acc::new()).collect();
    let mut rew = Acc::new();
    let (mut count, mut terminals) = (0u64, 0u64);
    let mut returns = Vec::new();
    let mut running = 0.0;
    for t in reader {
        let t: Transition = t?;
        count += 1;
        for (a, v) in obs.iter_mut().zip(&t.obs) {
            a.add(*v);
        }
        for (a, v) in act.iter_mut().zip(&t.action) {
            a.add(*v);
        }
        rew.add(t.reward);
        running += t.reward as f64;
        terminals += t.terminal as u64;
        if t.timeout || t.terminal {
            returns.push(running);
            running = 0.0;
        }
    }
    let mean_episode_return = (!returns.is_empty()).then(|| returns.iter().sum::<f64>() / returns.len() as f64);
    Ok(DatasetStats {
        count,
        env_version: header.env_version,
        provenance: header.provenance,
        obs: obs.iter().map(|a| a.finish(count)).collect(),
        action: act.iter().map(|a| a.finish(count)).collect(),
        reward: rew.finish(count),
        total_reward: rew.sum,
        terminals,
        episodes: returns.len() as u64,
        episode_returns: returns,
        mean_episode_return,
    })
}

pub fn stats(path: impl AsRef<std::path::Path>) -> Result<DatasetStats> {
    stats_from_reader(DatasetReader::open(path)?)
}

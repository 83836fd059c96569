//! Observed event sequences.

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

/// One realization observed on `[0, T]`: per-component strictly increasing
/// event times in `(0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Path {
    #[serde(rename = "T")]
    horizon: f64,
    events: Vec<Vec<f64>>,
}

impl Path {
    pub fn new(horizon: f64, events: Vec<Vec<f64>>) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidPath(format!("horizon must be positive, got {horizon}")));
        }
        if events.is_empty() {
            return Err(Error::InvalidPath("path needs at least one component".into()));
        }
        for (j, times) in events.iter().enumerate() {
            let mut prev = 0.0;
            for &t in times {
                if !(t > prev && t <= horizon) {
                    return Err(Error::InvalidPath(format!(
                        "component {j}: event {t} is not strictly increasing inside (0, {horizon}]"
                    )));
                }
                prev = t;
            }
        }
        Ok(Self { horizon, events })
    }

    pub fn empty(horizon: f64, dim: usize) -> Result<Self> {
        Self::new(horizon, vec![Vec::new(); dim])
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dim(&self) -> usize {
        self.events.len()
    }

    pub fn events(&self, component: usize) -> &[f64] {
        &self.events[component]
    }

    pub fn all_events(&self) -> &[Vec<f64>] {
        &self.events
    }

    pub fn count(&self, component: usize) -> usize {
        self.events[component].len()
    }

    pub fn total_events(&self) -> usize {
        self.events.iter().map(Vec::len).sum()
    }

    /// All events as `(time, component)`, sorted by time then component.
    pub fn merged(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = self
            .events
            .iter()
            .enumerate()
            .flat_map(|(j, ts)| ts.iter().map(move |&t| (t, j)))
            .collect();
        out.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        out
    }
}

#[derive(Deserialize)]
struct PathRepr {
    #[serde(rename = "T")]
    horizon: f64,
    events: Vec<Vec<f64>>,
}

impl<'de> Deserialize<'de> for Path {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PathRepr::deserialize(deserializer)?;
        Path::new(repr.horizon, repr.events).map_err(serde::de::Error::custom)
    }
}

/// A path with its 1-based class label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledSample {
    #[serde(flatten)]
    pub path: Path,
    pub label: usize,
}

impl LabeledSample {
    pub fn new(path: Path, label: usize) -> Result<Self> {
        if label == 0 {
            return Err(Error::InvalidArgument("labels are 1-based".into()));
        }
        Ok(Self { path, label })
    }

    /// 0-based class index.
    pub fn class_index(&self) -> usize {
        self.label - 1
    }
}

#[derive(Deserialize)]
struct LabeledRepr {
    #[serde(rename = "T")]
    horizon: f64,
    events: Vec<Vec<f64>>,
    label: usize,
}

impl<'de> Deserialize<'de> for LabeledSample {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = LabeledRepr::deserialize(deserializer)?;
        let path = Path::new(repr.horizon, repr.events).map_err(serde::de::Error::custom)?;
        LabeledSample::new(path, repr.label).map_err(serde::de::Error::custom)
    }
}

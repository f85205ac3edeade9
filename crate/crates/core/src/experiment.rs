//! Task scripts, per-trial metrics and summary statistics.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{EventKind, GazeEvent};
use crate::error::{domain, Error, Result};
use crate::layout::{alphabet, Technique};

/// Trials without a matching activation this long after onset are errors.
pub const TRIAL_TIMEOUT_MS: f64 = 10_000.0;

pub const SEARCH_SELECT_WARMUP: usize = 3;
pub const SELECTION_REPETITIONS: usize = 10;
pub const SELECTION_WARMUP: usize = 2;
pub const DEFAULT_BLOCKS: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    SearchSelect,
    Selection,
    /// Hand-built prescription list (probes and stress scenarios).
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prescription {
    pub label: String,
    pub warmup: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskScript {
    pub kind: TaskKind,
    pub technique: Technique,
    pub trials: Vec<Prescription>,
    pub warmup_count: usize,
    pub block_index: u32,
    pub seed: u64,
}

impl TaskScript {
    pub fn custom(technique: Technique, labels: &[String]) -> Self {
        Self {
            kind: TaskKind::Custom,
            technique,
            trials: labels.iter().map(|l| Prescription { label: l.clone(), warmup: false }).collect(),
            warmup_count: 0,
            block_index: 1,
            seed: 0,
        }
    }

    pub fn with_block(mut self, block: u32) -> Self {
        self.block_index = block;
        self
    }

    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }
}

/// 55 prescriptions: three warm-up letters first, then every letter twice in
/// shuffled order. Each block draws from its own stream of the seeded RNG.
pub fn make_search_select_script(seed: u64, technique: Technique, block: u32) -> TaskScript {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(block));

    let letters = alphabet();
    let warmup: Vec<String> = letters.choose_multiple(&mut rng, SEARCH_SELECT_WARMUP).cloned().collect();
    let mut body: Vec<String> = letters.iter().chain(letters.iter()).cloned().collect();
    body.shuffle(&mut rng);

    let trials = warmup
        .into_iter()
        .map(|label| Prescription { label, warmup: true })
        .chain(body.into_iter().map(|label| Prescription { label, warmup: false }))
        .collect();
    TaskScript {
        kind: TaskKind::SearchSelect,
        technique,
        trials,
        warmup_count: SEARCH_SELECT_WARMUP,
        block_index: block,
        seed,
    }
}

/// Diagonal and adjacent letter pairs used by the reciprocal selection task.
pub fn default_pairs() -> Vec<(String, String)> {
    [("A", "N"), ("G", "T"), ("H", "I"), ("J", "R")]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

/// Twenty alternating prescriptions per pair; the first two of each pair are
/// warm-up.
pub fn make_selection_script(pairs: &[(String, String)], technique: Technique) -> Result<TaskScript> {
    let mut trials = Vec::with_capacity(pairs.len() * 2 * SELECTION_REPETITIONS);
    for (a, b) in pairs {
        if a == b {
            return Err(domain(format!("selection pair repeats letter {a:?}")));
        }
        for i in 0..2 * SELECTION_REPETITIONS {
            let label = if i % 2 == 0 { a } else { b };
            trials.push(Prescription { label: label.clone(), warmup: i < SELECTION_WARMUP });
        }
    }
    Ok(TaskScript {
        kind: TaskKind::Selection,
        technique,
        trials,
        warmup_count: SELECTION_WARMUP,
        block_index: 1,
        seed: 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub user: String,
    pub technique: Technique,
    pub block: u32,
    /// 1-based position in the script.
    pub trial: usize,
    pub prescription: String,
    pub shown_ms: f64,
    pub activated: Option<String>,
    pub activated_ms: Option<f64>,
    pub activation_time_ms: Option<f64>,
    pub return_time_ms: Option<f64>,
    /// Wrong label or timeout. Errors are excluded from every statistic.
    pub error: bool,
    pub warmup: bool,
}

impl TrialRecord {
    pub fn counts(&self) -> bool {
        !self.error && !self.warmup
    }
}

/// What a session ran: who, which script, and when each prescription
/// appeared.
#[derive(Debug, Clone, Copy)]
pub struct SessionLog<'a> {
    pub user: &'a str,
    pub script: &'a TaskScript,
    pub onsets_ms: &'a [f64],
}

/// One record per prescription. A trial's activation is the first one in
/// `[onset, next onset)`; its return is the first center arrival after the
/// activation, within the same window.
pub fn reduce(session: SessionLog<'_>, events: &[GazeEvent]) -> Result<Vec<TrialRecord>> {
    let SessionLog { user, script, onsets_ms } = session;
    if onsets_ms.len() != script.trials.len() {
        return Err(domain(format!(
            "{} onsets for {} prescriptions",
            onsets_ms.len(),
            script.trials.len()
        )));
    }
    if let Some(w) = events.windows(2).find(|w| w[1].t_ms < w[0].t_ms) {
        return Err(Error::Stream(format!("event at {} follows event at {}", w[1].t_ms, w[0].t_ms)));
    }
    if let Some(w) = onsets_ms.windows(2).find(|w| w[1] < w[0]) {
        return Err(Error::Stream(format!("onset {} follows onset {}", w[1], w[0])));
    }

    let mut records = Vec::with_capacity(script.trials.len());
    for (i, (p, &shown)) in script.trials.iter().zip(onsets_ms).enumerate() {
        let window_end = onsets_ms.get(i + 1).copied().unwrap_or(f64::INFINITY);
        let in_window = |e: &&GazeEvent| e.t_ms >= shown && e.t_ms < window_end;

        let activation = events
            .iter()
            .filter(in_window)
            .find_map(|e| e.activation().map(|l| (e.t_ms, l.to_string())))
            .filter(|(t, _)| t - shown <= TRIAL_TIMEOUT_MS);

        let (activated, activated_ms, activation_time_ms, return_time_ms, error) = match activation {
            Some((t, label)) => {
                let back = events
                    .iter()
                    .filter(in_window)
                    .find(|e| e.t_ms >= t && e.kind == EventKind::CenterReached)
                    .map(|e| e.t_ms - t);
                let error = label != p.label;
                (Some(label), Some(t), Some(t - shown), back, error)
            }
            None => (None, None, None, None, true),
        };
        records.push(TrialRecord {
            user: user.to_string(),
            technique: script.technique,
            block: script.block_index,
            trial: i + 1,
            prescription: p.label.clone(),
            shown_ms: shown,
            activated,
            activated_ms,
            activation_time_ms,
            return_time_ms,
            error,
            warmup: p.warmup,
        });
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricStats {
    pub n: usize,
    pub mean_ms: f64,
    pub median_ms: f64,
    pub iqr_ms: f64,
}

impl MetricStats {
    /// `None` for an empty sample.
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Some(Self {
            n: sorted.len(),
            mean_ms: sorted.iter().sum::<f64>() / sorted.len() as f64,
            median_ms: quantile_sorted(&sorted, 0.5),
            iqr_ms: quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25),
        })
    }
}

/// Linear interpolation between closest ranks (`h = (n - 1) p`). The median
/// of an even sample is the midpoint of the two central values.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Grouping {
    /// One group per (user, technique, block).
    #[default]
    PerBlock,
    /// Blocks pooled: one group per (user, technique).
    PerTechnique,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub user: String,
    pub technique: Technique,
    pub block: Option<u32>,
    pub activation: MetricStats,
    pub return_time: Option<MetricStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningRate {
    pub user: String,
    pub technique: Technique,
    pub from_block: u32,
    pub to_block: u32,
    /// `100 (earlier mean - later mean) / earlier mean` of activation time.
    pub rate_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechniqueRatio {
    pub user: String,
    /// Mean crossing activation time over mean dwell activation time.
    pub crossing_over_dwell: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SummaryStats {
    pub groups: Vec<GroupStats>,
    pub learning_rates: Vec<LearningRate>,
    pub ratios: Vec<TechniqueRatio>,
    pub warnings: Vec<String>,
}

type GroupKey = (String, Technique, Option<u32>);

/// Statistics over non-error, non-warm-up trials. Groups left empty by that
/// rule are omitted with a warning. Learning rates compare consecutive
/// blocks; ratios pool all blocks.
pub fn summarize(records: &[TrialRecord], grouping: Grouping) -> SummaryStats {
    let mut all_keys: BTreeSet<GroupKey> = BTreeSet::new();
    let mut activation: BTreeMap<GroupKey, Vec<f64>> = BTreeMap::new();
    let mut returns: BTreeMap<GroupKey, Vec<f64>> = BTreeMap::new();
    let mut block_means: BTreeMap<(String, Technique), BTreeMap<u32, Vec<f64>>> = BTreeMap::new();
    let mut pooled: BTreeMap<(String, Technique), Vec<f64>> = BTreeMap::new();

    for r in records {
        let block = match grouping {
            Grouping::PerBlock => Some(r.block),
            Grouping::PerTechnique => None,
        };
        let key = (r.user.clone(), r.technique, block);
        all_keys.insert(key.clone());
        if !r.counts() {
            continue;
        }
        if let Some(a) = r.activation_time_ms {
            activation.entry(key.clone()).or_default().push(a);
            block_means
                .entry((r.user.clone(), r.technique))
                .or_default()
                .entry(r.block)
                .or_default()
                .push(a);
            pooled.entry((r.user.clone(), r.technique)).or_default().push(a);
        }
        if let Some(b) = r.return_time_ms {
            returns.entry(key).or_default().push(b);
        }
    }

    let mut out = SummaryStats::default();
    for key in all_keys {
        let Some(act) = activation.get(&key).and_then(|v| MetricStats::from_values(v)) else {
            let (user, technique, block) = &key;
            let block = block.map_or_else(|| "all".to_string(), |b| b.to_string());
            out.warnings.push(format!(
                "no usable trials for user {user}, technique {technique}, block {block}; group omitted"
            ));
            continue;
        };
        let ret = returns.get(&key).and_then(|v| MetricStats::from_values(v));
        let (user, technique, block) = key;
        out.groups.push(GroupStats { user, technique, block, activation: act, return_time: ret });
    }

    for ((user, technique), blocks) in &block_means {
        let means: Vec<(u32, f64)> =
            blocks.iter().map(|(b, v)| (*b, v.iter().sum::<f64>() / v.len() as f64)).collect();
        for w in means.windows(2) {
            let ((b1, m1), (b2, m2)) = (w[0], w[1]);
            out.learning_rates.push(LearningRate {
                user: user.clone(),
                technique: *technique,
                from_block: b1,
                to_block: b2,
                rate_pct: 100.0 * (m1 - m2) / m1,
            });
        }
    }

    let mean = |v: &Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
    let users: BTreeSet<&String> = pooled.keys().map(|(u, _)| u).collect();
    for user in users {
        let dwell = pooled.get(&(user.clone(), Technique::Dwell));
        let crossing = pooled.get(&(user.clone(), Technique::Crossing));
        if let (Some(d), Some(c)) = (dwell, crossing) {
            out.ratios.push(TechniqueRatio { user: user.clone(), crossing_over_dwell: mean(c) / mean(d) });
        }
    }
    out
}

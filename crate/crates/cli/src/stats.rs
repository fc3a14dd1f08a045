//! Dataset composition statistics: video length histogram, chain lengths,
//! answer lengths, anchor kinds, and sport/task distributions.

use std::collections::BTreeMap;

use cot_core::model::{Sample, Sport, TaskType, TimeAnchor};
use serde::{Deserialize, Serialize};

/// Video-length histogram bucket edges in seconds. The last bucket is
/// open-ended.
pub const LENGTH_EDGES_S: [f64; 4] = [300.0, 900.0, 1800.0, 3600.0];

/// Labels matching [`LENGTH_EDGES_S`] plus the open tail.
pub const LENGTH_LABELS: [&str; 5] = ["<5min", "5-15min", "15-30min", "30-60min", ">=60min"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketCount {
    pub label: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub samples: usize,
    pub total_video_hours: f64,
    pub video_length_histogram: Vec<BucketCount>,
    /// chain length (number of reference steps) -> sample count
    pub chain_length_counts: BTreeMap<usize, usize>,
    pub mean_chain_length: f64,
    /// reference answer length in words -> sample count
    pub answer_word_counts: BTreeMap<usize, usize>,
    pub mean_answer_words: f64,
    pub point_anchors: usize,
    pub span_anchors: usize,
    pub sport_counts: BTreeMap<Sport, usize>,
    pub task_counts: BTreeMap<TaskType, usize>,
}

fn length_bucket(duration_s: f64) -> usize {
    LENGTH_EDGES_S.iter().position(|&e| duration_s < e).unwrap_or(LENGTH_EDGES_S.len())
}

/// Tallies composition statistics over a sample set.
pub fn dataset_stats(samples: &[Sample]) -> DatasetStats {
    let mut hist = [0usize; 5];
    let mut chain_length_counts = BTreeMap::new();
    let mut answer_word_counts = BTreeMap::new();
    let mut sport_counts = BTreeMap::new();
    let mut task_counts = BTreeMap::new();
    let (mut points, mut spans) = (0usize, 0usize);
    let mut total_seconds = 0.0;
    let mut total_steps = 0usize;
    let mut total_words = 0usize;

    for s in samples {
        hist[length_bucket(s.duration_s)] += 1;
        total_seconds += s.duration_s;
        let steps = s.reference_chain.steps.len();
        total_steps += steps;
        *chain_length_counts.entry(steps).or_insert(0) += 1;
        let words = s.reference_answer.split_whitespace().count();
        total_words += words;
        *answer_word_counts.entry(words).or_insert(0) += 1;
        *sport_counts.entry(s.sport).or_insert(0) += 1;
        *task_counts.entry(s.task_type).or_insert(0) += 1;
        for step in &s.reference_chain.steps {
            for anchor in &step.anchors {
                match anchor {
                    TimeAnchor::Point(_) => points += 1,
                    TimeAnchor::Span { .. } => spans += 1,
                }
            }
        }
    }

    let n = samples.len();
    DatasetStats {
        samples: n,
        total_video_hours: total_seconds / 3600.0,
        video_length_histogram: LENGTH_LABELS
            .iter()
            .zip(hist)
            .map(|(label, count)| BucketCount { label: label.to_string(), count })
            .collect(),
        chain_length_counts,
        mean_chain_length: if n == 0 { 0.0 } else { total_steps as f64 / n as f64 },
        answer_word_counts,
        mean_answer_words: if n == 0 { 0.0 } else { total_words as f64 / n as f64 },
        point_anchors: points,
        span_anchors: spans,
        sport_counts,
        task_counts,
    }
}

/// Markdown rendering of the statistics block.
pub fn stats_markdown(stats: &DatasetStats) -> String {
    let mut md = String::new();
    md.push_str("# Dataset statistics\n\n");
    md.push_str(&format!(
        "{} samples, {:.2} hours of video, mean chain length {:.2} steps, mean answer length {:.2} words.\n\n",
        stats.samples, stats.total_video_hours, stats.mean_chain_length, stats.mean_answer_words
    ));

    md.push_str("## Video length\n\n| Bucket | Count |\n|---|---:|\n");
    for b in &stats.video_length_histogram {
        md.push_str(&format!("| {} | {} |\n", b.label, b.count));
    }

    md.push_str("\n## Reference chains\n\n| Steps | Count |\n|---:|---:|\n");
    for (len, count) in &stats.chain_length_counts {
        md.push_str(&format!("| {len} | {count} |\n"));
    }
    md.push_str(&format!(
        "\nAnchors: {} points, {} spans.\n",
        stats.point_anchors, stats.span_anchors
    ));

    md.push_str("\n## Sports\n\n| Sport | Count |\n|---|---:|\n");
    for (sport, count) in &stats.sport_counts {
        md.push_str(&format!("| {sport} | {count} |\n"));
    }
    md.push_str("\n## Task types\n\n| Task | Count |\n|---|---:|\n");
    for (task, count) in &stats.task_counts {
        md.push_str(&format!("| {task} | {count} |\n"));
    }
    md
}

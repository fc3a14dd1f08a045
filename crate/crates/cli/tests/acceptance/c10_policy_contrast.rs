//! Criterion 10: the metrics must separate a policy that anchors every step
//! near the reference events (policy B) from one that anchors rarely and at
//! random (policy A). Per-sample scores are pinned exactly against
//! independently computed values, and the aggregate gaps must be wide.

use crate::frozen;
use crate::support::{self, hit_fraction, mean};
use cot_cli::eval::{evaluate_run, RunInputs};
use cot_cli::report::RunReport;

fn check_policy(
    name: &str,
    report: &RunReport,
    coverage: &[f64; 50],
    grounding: &[f64; 50],
    strict: &[f64; 50],
) {
    assert_eq!(report.per_sample.len(), frozen::SAMPLE_COUNT);
    for (i, row) in report.per_sample.iter().enumerate() {
        assert_eq!(row.anchor_coverage, coverage[i], "{name}: coverage, sample {i}");
        assert_eq!(row.grounding_score, grounding[i], "{name}: grounding, sample {i}");
        assert_eq!(
            row.grounding_score_strict, strict[i],
            "{name}: strict grounding, sample {i}"
        );
    }
    assert_eq!(report.aggregates.anchor_rate, mean(coverage), "{name}: anchor rate");
    assert_eq!(report.aggregates.mean_iou, mean(grounding), "{name}: mean IoU");
    assert_eq!(report.aggregates.mean_iou_strict, mean(strict), "{name}: strict mean IoU");
    assert_eq!(
        report.aggregates.hit_rate,
        hit_fraction(grounding, 0.5),
        "{name}: hit rate"
    );
}

#[test]
fn criterion_10_policy_contrast() {
    let ds = support::synthetic50();
    let settings = support::mock_judge_settings();

    let sparse = evaluate_run(
        &ds,
        &support::predictions("policy_a.jsonl"),
        &settings,
        &RunInputs::default(),
    )
    .unwrap();
    let anchored = evaluate_run(
        &ds,
        &support::predictions("policy_b.jsonl"),
        &settings,
        &RunInputs::default(),
    )
    .unwrap();

    check_policy(
        "policy A",
        &sparse,
        &frozen::POLICY_A_COVERAGE,
        &frozen::POLICY_A_GROUNDING,
        &frozen::POLICY_A_GROUNDING_STRICT,
    );
    check_policy(
        "policy B",
        &anchored,
        &frozen::POLICY_B_COVERAGE,
        &frozen::POLICY_B_GROUNDING,
        &frozen::POLICY_B_GROUNDING_STRICT,
    );

    // Policy B anchors every step 2 s off the reference; policy A anchors
    // 12% of steps at random times and answers wrong.
    assert_eq!(anchored.aggregates.anchor_rate, 1.0);
    assert_eq!(anchored.aggregates.hit_rate, 1.0);
    assert_eq!(anchored.aggregates.accuracy, Some(1.0));
    assert_eq!(sparse.aggregates.accuracy, Some(0.0));

    let anchor_gap = anchored.aggregates.anchor_rate - sparse.aggregates.anchor_rate;
    let iou_gap = anchored.aggregates.mean_iou - sparse.aggregates.mean_iou;
    let hit_gap = anchored.aggregates.hit_rate - sparse.aggregates.hit_rate;
    assert!(anchor_gap >= 0.8, "anchor-rate gap too small: {anchor_gap}");
    assert!(iou_gap >= 0.7, "mean-IoU gap too small: {iou_gap}");
    assert!(hit_gap >= 0.9, "hit-rate gap too small: {hit_gap}");

    support::pass(
        10,
        &format!(
            "anchored policy beats sparse policy by {:.3} anchor rate, {:.3} mIoU, {:.3} hit rate",
            anchor_gap, iou_gap, hit_gap
        ),
    );
}

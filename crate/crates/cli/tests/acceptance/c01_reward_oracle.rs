//! Criterion 1 — best-match temporal correctness agrees with a brute-force
//! oracle on 1,000 random instances (up to 5 reference anchors, up to 5
//! predicted anchors, durations up to 3600 s), within 1e-12, in under 5
//! seconds.
//!
//! The oracle below re-derives the similarity rules from scratch (explicit
//! case analysis, no shared helpers) so a bug in the production code cannot
//! hide in both places.

use std::time::Instant;

use cot_core::model::{normalize_anchor, TimeAnchor};
use cot_core::reward::correctness_reward;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn endpoints(a: &TimeAnchor) -> (f64, f64) {
    match *a {
        TimeAnchor::Point(p) => (p, p),
        TimeAnchor::Span { start_s, end_s } => (start_s, end_s),
    }
}

/// Oracle similarity, written independently of the production match arms.
fn oracle_similarity(gt: &TimeAnchor, pred: &TimeAnchor, tol: f64) -> f64 {
    let gt_is_point = matches!(gt, TimeAnchor::Point(_));
    let pred_is_point = matches!(pred, TimeAnchor::Point(_));
    let (gs, ge) = endpoints(gt);
    let (ps, pe) = endpoints(pred);
    if gt_is_point && pred_is_point {
        let d = (gs - ps).abs();
        if d <= 0.0 {
            return 1.0;
        }
        if tol <= 0.0 {
            return 0.0;
        }
        return (1.0 - d / tol).max(0.0);
    }
    if !gt_is_point && !pred_is_point {
        let lo = if gs > ps { gs } else { ps };
        let hi = if ge < pe { ge } else { pe };
        let inter = if hi > lo { hi - lo } else { 0.0 };
        let union = (ge - gs) + (pe - ps) - inter;
        if union <= 0.0 {
            return if gs == ps { 1.0 } else { 0.0 };
        }
        return inter / union;
    }
    // Mixed: one point, one span.
    let (p, (ss, se)) = if gt_is_point { (gs, (ps, pe)) } else { (ps, (gs, ge)) };
    if p >= ss && p <= se {
        return 1.0;
    }
    let gap = if p < ss { ss - p } else { p - se };
    if gap <= 0.0 {
        1.0
    } else if tol <= 0.0 {
        0.0
    } else {
        (1.0 - gap / tol).max(0.0)
    }
}

fn oracle_reward(gt: &[TimeAnchor], pred: &[TimeAnchor], tol: f64) -> f64 {
    let mut total = 0.0;
    for g in gt {
        let mut best = 0.0;
        for p in pred {
            let s = oracle_similarity(g, p, tol);
            if s > best {
                best = s;
            }
        }
        total += best;
    }
    total / gt.len() as f64
}

fn random_anchor(rng: &mut ChaCha8Rng, duration: f64) -> TimeAnchor {
    if rng.random_bool(0.5) {
        normalize_anchor(rng.random_range(0.0..duration), None, duration).unwrap()
    } else {
        let a = rng.random_range(0.0..duration);
        let b = rng.random_range(0.0..duration);
        normalize_anchor(a, Some(b), duration).unwrap()
    }
}

#[test]
fn criterion_01_reward_matches_bruteforce_oracle() {
    const INSTANCES: usize = 1000;
    const TOLERANCE: f64 = 1e-12;

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let started = Instant::now();
    let mut max_diff: f64 = 0.0;
    for case in 0..INSTANCES {
        let duration = rng.random_range(30.0..=3600.0);
        let tol = rng.random_range(0.5..=60.0);
        let gt_count = rng.random_range(1..=5);
        let pred_count = rng.random_range(0..=5);
        let gt: Vec<TimeAnchor> = (0..gt_count).map(|_| random_anchor(&mut rng, duration)).collect();
        let pred: Vec<TimeAnchor> =
            (0..pred_count).map(|_| random_anchor(&mut rng, duration)).collect();

        let got = correctness_reward(&gt, &pred, tol).unwrap();
        let want = oracle_reward(&gt, &pred, tol);
        let diff = (got - want).abs();
        max_diff = max_diff.max(diff);
        assert!(
            diff <= TOLERANCE,
            "case {case}: got {got}, oracle {want}, diff {diff:e}\n gt {gt:?}\n pred {pred:?}"
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}, budget 5 s");

    crate::support::pass(
        1,
        &format!("{INSTANCES} random instances within 1e-12 of brute force (max diff {max_diff:e}, {elapsed:?})"),
    );
}

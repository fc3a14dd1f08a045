#!/usr/bin/env python3
"""Generate the synthetic evaluation fixtures and their frozen expectations.

Writes into crates/cli/fixtures/:
  synthetic50.jsonl          50 samples across all sports and task types
  predictions_perfect.jsonl  reference chains rendered back into tagged form
  predictions_empty.jsonl    empty raw_text for every sample
  predictions_mixed.jsonl    five interleaved quality tiers (see TIERS below)
  policy_a.jsonl             weak policy: ~12% of steps carry a random anchor
  policy_b.jsonl             strong policy: every step anchored near the truth

and into crates/cli/tests/acceptance/frozen.rs the per-sample scores this
script computes independently of the Rust implementation. The test suite
pins those values exactly, so regenerate the module whenever generation
parameters change.

Everything here is integer-second arithmetic mirrored off the scoring rules
(interval IoU for spans, a 10-second linear ramp for points, best-match per
reference anchor), so the expected floats are bit-identical to what the
evaluator produces.
"""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "crates" / "cli" / "fixtures"
FROZEN_RS = ROOT / "crates" / "cli" / "tests" / "acceptance" / "frozen.rs"

POINT_TOLERANCE_S = 10.0
HIT_TAU = 0.5

SPORTS = ["american_football", "ice_hockey", "soccer", "basketball", "volleyball"]
TASKS = ["perception", "temporal", "tactical", "causal", "counterfactual"]

QUESTIONS = {
    "perception": "Which player controls the ball at the key moment?",
    "temporal": "When does the decisive play unfold?",
    "tactical": "What formation change sets up the score?",
    "causal": "Why does the defense break down on this play?",
    "counterfactual": "What likely happens if the pass is intercepted instead?",
}

STEP_PHRASES = [
    "The buildup starts from the back line",
    "A long ball switches the point of attack",
    "The press forces a hurried clearance",
    "Midfield wins the second ball cleanly",
    "The wide man drives at the retreating fullback",
    "An overlap drags the cover defender away",
    "A cutback finds the late runner unmarked",
    "The keeper parries into a dangerous area",
    "The rebound falls kindly for the attacker",
    "Defenders appeal in vain for offside",
    "The bench urges a quicker restart",
    "Fatigue shows as the line drops deeper",
]

ANSWER_WORDS = [
    "the", "late", "runner", "converts", "a", "low", "cutback",
    "after", "sustained", "pressure", "forces", "an", "error",
    "deep", "inside", "their", "own", "half",
]

WRONG_ANSWER = "nothing like that happens anywhere in this clip"

UNTAGGED_LINES = [
    "The opening exchanges stay cagey with neither side committing",
    "Possession swings around midfield without a clear chance",
    "Eventually the tempo lifts but the finishing stays wasteful",
]


def format_ts(seconds: int) -> str:
    minutes, secs = divmod(int(seconds), 60)
    return f"{minutes:02d}:{secs:02d}"


def render_anchor(anchor) -> str:
    if anchor[0] == "point":
        return format_ts(anchor[1])
    return f"{format_ts(anchor[1])}-{format_ts(anchor[2])}"


def render_tagged(steps, answer: str) -> str:
    """Mirror of the toolkit's canonical chain renderer."""
    parts = []
    for idx, (text, anchor) in enumerate(steps):
        piece = f"Step {idx + 1}: {text}"
        if anchor is not None:
            piece += f" ({render_anchor(anchor)})"
        piece += "."
        parts.append(piece)
    thinking = " ".join(parts)
    return f"<thinking>{thinking}</thinking><answer>{answer}</answer>"


def normalize(anchor, duration: int):
    """Clamp into [0, duration], order endpoints, collapse empty spans."""
    if anchor[0] == "point":
        p = min(max(anchor[1], 0), duration)
        return ("point", p)
    s = min(max(anchor[1], 0), duration)
    e = min(max(anchor[2], 0), duration)
    if s > e:
        s, e = e, s
    if s == e:
        return ("point", s)
    return ("span", s, e)


def ramp(distance: float) -> float:
    if distance <= 0.0:
        return 1.0
    return max(0.0, 1.0 - distance / POINT_TOLERANCE_S)


def bounds(anchor):
    if anchor[0] == "point":
        return float(anchor[1]), float(anchor[1])
    return float(anchor[1]), float(anchor[2])


def similarity(gt, pred) -> float:
    """Reward-style anchor similarity: IoU, point ramp, point-vs-span ramp."""
    if gt[0] == "point" and pred[0] == "point":
        return ramp(abs(float(gt[1]) - float(pred[1])))
    if gt[0] == "span" and pred[0] == "span":
        s1, e1 = bounds(gt)
        s2, e2 = bounds(pred)
        inter = max(0.0, min(e1, e2) - max(s1, s2))
        union = (e1 - s1) + (e2 - s2) - inter
        if union <= 0.0:
            return 1.0 if s1 == s2 else 0.0
        return inter / union
    point = gt if gt[0] == "point" else pred
    span = pred if gt[0] == "point" else gt
    p = float(point[1])
    s, e = bounds(span)
    if s <= p <= e:
        return 1.0
    gap = s - p if p < s else p - e
    return ramp(gap)


def span_iou(a, b) -> float:
    """Strict IoU with points as zero-width spans."""
    s1, e1 = bounds(a)
    s2, e2 = bounds(b)
    inter = max(0.0, min(e1, e2) - max(s1, s2))
    union = (e1 - s1) + (e2 - s2) - inter
    if union <= 0.0:
        return 1.0 if s1 == s2 else 0.0
    return inter / union


def grounding(gt_anchors, pred_anchors, sim) -> float:
    """Mean over reference anchors of the best score any prediction gets."""
    total = 0.0
    for gt in gt_anchors:
        best = 0.0
        for pred in pred_anchors:
            best = max(best, sim(gt, pred))
        total += best
    return total / len(gt_anchors)


def build_samples():
    samples = []
    for i in range(50):
        duration = 240 + (i * 97) % 3900
        n_steps = 2 + (i % 4)
        steps = []
        for j in range(n_steps):
            text = STEP_PHRASES[(i + 2 * j) % len(STEP_PHRASES)]
            center = round(duration * (j + 1) / (n_steps + 1))
            center = min(max(center, 30), duration - 40)
            if (i + j) % 2 == 0:
                length = 8 + 4 * ((i + j) % 5)
                anchor = ("span", center, center + length)
            else:
                anchor = ("point", center)
            steps.append((text, anchor))
        n_words = 1 + (i % 8)
        answer = " ".join(ANSWER_WORDS[(i + k) % len(ANSWER_WORDS)] for k in range(n_words))
        task = TASKS[(i // 5) % 5]
        samples.append({
            "sample_id": f"syn-{i:03d}",
            "video_id": f"video-{i:03d}",
            "duration_s": duration,
            "sport": SPORTS[i % 5],
            "task_type": task,
            "question": QUESTIONS[task],
            "answer": answer,
            "steps": steps,
        })
    return samples


def anchor_json(anchor):
    if anchor[0] == "point":
        return {"start_s": float(anchor[1]), "end_s": float(anchor[1])}
    return {"start_s": float(anchor[1]), "end_s": float(anchor[2])}


def sample_json(s) -> str:
    return json.dumps({
        "sample_id": s["sample_id"],
        "video_id": s["video_id"],
        "duration_s": float(s["duration_s"]),
        "sport": s["sport"],
        "task_type": s["task_type"],
        "question": s["question"],
        "reference_answer": s["answer"],
        "reference_chain": {
            "steps": [
                {"text": text, "anchors": [anchor_json(anchor)]}
                for text, anchor in s["steps"]
            ],
            "answer": s["answer"],
        },
    })


def prediction_json(sample_id: str, raw: str) -> str:
    return json.dumps({"sample_id": sample_id, "raw_text": raw})


def shift_anchor(anchor, delta: int, duration: int):
    if anchor[0] == "point":
        return normalize(("point", anchor[1] + delta), duration)
    return normalize(("span", anchor[1] + delta, anchor[2] + delta), duration)


# Mixed-tier construction, keyed by a per-sample tier in 0..4:
#   0 perfect copy of the reference
#   1 wrong answer, every anchor jittered +3s
#   2 correct answer, every second step loses its anchor
#   3 untagged free text: no sections, no anchors, no answer
#   4 correct answer, anchors displaced +200s (clamped into the video)
TIERS = 5


def mixed_prediction(s, tier: int):
    duration = s["duration_s"]
    if tier == 0:
        steps = [(t, a) for t, a in s["steps"]]
        return render_tagged(steps, s["answer"]), [a for _, a in steps], s["answer"]
    if tier == 1:
        steps = [(t, shift_anchor(a, 3, duration)) for t, a in s["steps"]]
        return render_tagged(steps, WRONG_ANSWER), [a for _, a in steps], WRONG_ANSWER
    if tier == 2:
        steps = [(t, a if j % 2 == 0 else None) for j, (t, a) in enumerate(s["steps"])]
        kept = [a for _, a in steps if a is not None]
        return render_tagged(steps, s["answer"]), kept, s["answer"]
    if tier == 3:
        return "\n".join(UNTAGGED_LINES), [], ""
    steps = [(t, shift_anchor(a, 200, duration)) for t, a in s["steps"]]
    return render_tagged(steps, s["answer"]), [a for _, a in steps], s["answer"]


def coverage(total_steps: int, anchored_steps: int) -> float:
    if total_steps == 0:
        return 0.0
    return anchored_steps / total_steps


def score(sample, pred_anchors, anchored_steps, total_steps, pred_answer):
    gt = [a for _, a in sample["steps"]]
    g = grounding(gt, pred_anchors, similarity)
    strict = grounding(gt, pred_anchors, span_iou)
    cov = coverage(total_steps, anchored_steps)
    correct = pred_answer == sample["answer"]
    return cov, g, strict, correct


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    FROZEN_RS.parent.mkdir(parents=True, exist_ok=True)
    samples = build_samples()

    (FIXTURES / "synthetic50.jsonl").write_text(
        "".join(sample_json(s) + "\n" for s in samples)
    )
    (FIXTURES / "predictions_perfect.jsonl").write_text(
        "".join(
            prediction_json(s["sample_id"], render_tagged(s["steps"], s["answer"])) + "\n"
            for s in samples
        )
    )
    (FIXTURES / "predictions_empty.jsonl").write_text(
        "".join(prediction_json(s["sample_id"], "") + "\n" for s in samples)
    )

    tier_rng = random.Random(20240817)
    tiers = [tier_rng.randrange(TIERS) for _ in samples]
    mixed_rows = []
    mixed_lines = []
    for s, tier in zip(samples, tiers):
        raw, kept_anchors, answer = mixed_prediction(s, tier)
        mixed_lines.append(prediction_json(s["sample_id"], raw))
        n = len(s["steps"])
        anchored = len(kept_anchors) if tier != 3 else 0
        total = n if tier != 3 else len(UNTAGGED_LINES)
        mixed_rows.append(score(s, kept_anchors, anchored, total, answer))
    (FIXTURES / "predictions_mixed.jsonl").write_text("".join(l + "\n" for l in mixed_lines))

    a_rows = []
    a_lines = []
    for i, s in enumerate(samples):
        rng = random.Random(1000 + i)
        steps = []
        for text, _ in s["steps"]:
            if rng.random() < 0.12:
                steps.append((text, ("point", rng.randrange(0, s["duration_s"] + 1))))
            else:
                steps.append((text, None))
        kept = [a for _, a in steps if a is not None]
        a_lines.append(prediction_json(s["sample_id"], render_tagged(steps, WRONG_ANSWER)))
        a_rows.append(score(s, kept, len(kept), len(steps), WRONG_ANSWER))
    (FIXTURES / "policy_a.jsonl").write_text("".join(l + "\n" for l in a_lines))

    b_rows = []
    b_lines = []
    for s in samples:
        steps = [(t, shift_anchor(a, 2, s["duration_s"])) for t, a in s["steps"]]
        kept = [a for _, a in steps]
        b_lines.append(prediction_json(s["sample_id"], render_tagged(steps, s["answer"])))
        b_rows.append(score(s, kept, len(kept), len(steps), s["answer"]))
    (FIXTURES / "policy_b.jsonl").write_text("".join(l + "\n" for l in b_lines))

    # Dataset composition tallies for the stats cross-check.
    edges = [300, 900, 1800, 3600]
    hist = [0] * 5
    points = spans = 0
    chain_lengths = {}
    for s in samples:
        bucket = next((k for k, e in enumerate(edges) if s["duration_s"] < e), 4)
        hist[bucket] += 1
        chain_lengths[len(s["steps"])] = chain_lengths.get(len(s["steps"]), 0) + 1
        for _, a in s["steps"]:
            if a[0] == "point":
                points += 1
            else:
                spans += 1

    def rust_f64_array(name, values):
        body = ",\n    ".join(repr(v) for v in values)
        return f"pub const {name}: [f64; {len(values)}] = [\n    {body},\n];\n"

    def rust_bool_array(name, values):
        body = ", ".join("true" if v else "false" for v in values)
        return f"pub const {name}: [bool; {len(values)}] = [{body}];\n"

    with open(FROZEN_RS, "w") as fh:
        fh.write(
            "//! Expected fixture scores, generated by tools/make_fixtures.py.\n"
            "//! Regenerate with that script instead of editing by hand.\n\n"
            "#![allow(dead_code)]\n\n"
        )
        fh.write(f"pub const SAMPLE_COUNT: usize = {len(samples)};\n\n")
        fh.write(rust_f64_array("MIXED_COVERAGE", [r[0] for r in mixed_rows]))
        fh.write(rust_f64_array("MIXED_GROUNDING", [r[1] for r in mixed_rows]))
        fh.write(rust_f64_array("MIXED_GROUNDING_STRICT", [r[2] for r in mixed_rows]))
        fh.write(rust_bool_array("MIXED_CORRECT", [r[3] for r in mixed_rows]))
        fh.write("\n")
        fh.write(rust_f64_array("POLICY_A_COVERAGE", [r[0] for r in a_rows]))
        fh.write(rust_f64_array("POLICY_A_GROUNDING", [r[1] for r in a_rows]))
        fh.write(rust_f64_array("POLICY_A_GROUNDING_STRICT", [r[2] for r in a_rows]))
        fh.write("\n")
        fh.write(rust_f64_array("POLICY_B_COVERAGE", [r[0] for r in b_rows]))
        fh.write(rust_f64_array("POLICY_B_GROUNDING", [r[1] for r in b_rows]))
        fh.write(rust_f64_array("POLICY_B_GROUNDING_STRICT", [r[2] for r in b_rows]))
        fh.write("\n")
        fh.write(f"pub const STATS_POINT_ANCHORS: usize = {points};\n")
        fh.write(f"pub const STATS_SPAN_ANCHORS: usize = {spans};\n")
        fh.write(
            f"pub const STATS_LENGTH_HISTOGRAM: [usize; 5] = [{', '.join(map(str, hist))}];\n"
        )
        lengths = ", ".join(f"({k}, {v})" for k, v in sorted(chain_lengths.items()))
        fh.write(
            f"pub const STATS_CHAIN_LENGTHS: [(usize, usize); {len(chain_lengths)}] = [{lengths}];\n"
        )

    # Round-trip summary for the log.
    def mean(xs):
        return sum(xs) / len(xs)

    def hit(xs):
        return sum(1 for x in xs if x > HIT_TAU) / len(xs)

    for name, rows in [("mixed", mixed_rows), ("policy_a", a_rows), ("policy_b", b_rows)]:
        acc = sum(1 for r in rows if r[3]) / len(rows)
        print(
            f"{name}: acc={acc:.4f} anchor={mean([r[0] for r in rows]):.4f} "
            f"miou={mean([r[1] for r in rows]):.6f} hit@{HIT_TAU}={hit([r[1] for r in rows]):.4f} "
            f"miou_strict={mean([r[2] for r in rows]):.6f}"
        )
    print(f"stats: hist={hist} points={points} spans={spans} chains={sorted(chain_lengths.items())}")


if __name__ == "__main__":
    main()

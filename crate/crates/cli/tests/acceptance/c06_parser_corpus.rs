//! Criterion 6: parser corpus. A table of raw outputs — well-formed, sloppy,
//! and adversarial — each with the exact chain the parser must recover, plus
//! a deterministic fuzz pass and an exhaustive timestamp round-trip.

use cot_core::parser::{format_timestamp, parse_output, parse_timestamp, render_tagged};
use cot_core::TimeAnchor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::support;

/// Expected anchor, spelled tersely so the table stays readable.
#[derive(Clone, Copy)]
enum A {
    P(f64),
    S(f64, f64),
}

impl A {
    fn to_anchor(self) -> TimeAnchor {
        match self {
            A::P(p) => TimeAnchor::Point(p),
            A::S(start_s, end_s) => TimeAnchor::Span { start_s, end_s },
        }
    }
}

struct Case {
    name: &'static str,
    raw: &'static str,
    duration_s: f64,
    format_ok: bool,
    answer: &'static str,
    steps: &'static [(&'static str, &'static [A])],
}

const DUR: f64 = 600.0;

const CASES: &[Case] = &[
    // --- well-formed tagged outputs ---
    Case {
        name: "two_step_markers",
        raw: "<thinking>Step 1: Kickoff happens at 00:05. Step 2: The return ends at 00:20.</thinking><answer>A touchback</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "A touchback",
        steps: &[
            ("Step 1: Kickoff happens at 00:05.", &[A::P(5.0)]),
            ("Step 2: The return ends at 00:20.", &[A::P(20.0)]),
        ],
    },
    Case {
        name: "single_sentence",
        raw: "<thinking>The shot at 01:30 goes in.</thinking><answer>Goal</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Goal",
        steps: &[("The shot at 01:30 goes in.", &[A::P(90.0)])],
    },
    Case {
        name: "span_hyphen",
        raw: "<thinking>Build-up play from 02:00-02:45 creates the chance.</thinking><answer>Cross</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Cross",
        steps: &[("Build-up play from 02:00-02:45 creates the chance.", &[A::S(120.0, 165.0)])],
    },
    Case {
        name: "span_to",
        raw: "<thinking>They press high from 03:10 to 03:40 and win the ball.</thinking><answer>Turnover</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Turnover",
        steps: &[("They press high from 03:10 to 03:40 and win the ball.", &[A::S(190.0, 220.0)])],
    },
    Case {
        name: "span_tilde",
        raw: "<thinking>The rally 00:12~00:47 is the longest.</thinking><answer>Long rally</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Long rally",
        steps: &[("The rally 00:12~00:47 is the longest.", &[A::S(12.0, 47.0)])],
    },
    Case {
        name: "span_en_dash",
        raw: "<thinking>Review 01:05\u{2013}01:25 closely.</thinking><answer>Offside</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Offside",
        steps: &[("Review 01:05\u{2013}01:25 closely.", &[A::S(65.0, 85.0)])],
    },
    Case {
        name: "span_em_dash",
        raw: "<thinking>Check 00:30\u{2014}00:55 again.</thinking><answer>Save</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Save",
        steps: &[("Check 00:30\u{2014}00:55 again.", &[A::S(30.0, 55.0)])],
    },
    Case {
        name: "span_spaced_hyphen",
        raw: "<thinking>The drive spans 04:00 - 05:30 in total.</thinking><answer>Field goal</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Field goal",
        steps: &[("The drive spans 04:00 - 05:30 in total.", &[A::S(240.0, 330.0)])],
    },
    Case {
        name: "span_uppercase_to",
        raw: "<thinking>Watch 02:00 TO 02:30 for the screen.</thinking><answer>Pick and roll</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Pick and roll",
        steps: &[("Watch 02:00 TO 02:30 for the screen.", &[A::S(120.0, 150.0)])],
    },
    Case {
        name: "span_to_no_spaces",
        raw: "<thinking>Surge 01:00to01:30 flips momentum.</thinking><answer>Run</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Run",
        steps: &[("Surge 01:00to01:30 flips momentum.", &[A::S(60.0, 90.0)])],
    },
    Case {
        name: "span_tight_left_space",
        raw: "<thinking>Hold from 02:00 -02:30 tightly.</thinking><answer>Press</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Press",
        steps: &[("Hold from 02:00 -02:30 tightly.", &[A::S(120.0, 150.0)])],
    },
    Case {
        name: "multi_points_one_step",
        raw: "<thinking>Key moments at 00:10, 00:50 and 01:40 build the lead.</thinking><answer>Run of play</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Run of play",
        steps: &[(
            "Key moments at 00:10, 00:50 and 01:40 build the lead.",
            &[A::P(10.0), A::P(50.0), A::P(100.0)],
        )],
    },
    Case {
        name: "point_then_span_in_text_order",
        raw: "<thinking>After 00:08 the move 00:30-00:40 seals it.</thinking><answer>Break</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Break",
        steps: &[("After 00:08 the move 00:30-00:40 seals it.", &[A::P(8.0), A::S(30.0, 40.0)])],
    },
    Case {
        name: "anchors_keep_text_order",
        raw: "<thinking>Marks at 00:40, 00:20 and 00:30 appear out of order.</thinking><answer>List</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "List",
        steps: &[(
            "Marks at 00:40, 00:20 and 00:30 appear out of order.",
            &[A::P(40.0), A::P(20.0), A::P(30.0)],
        )],
    },
    Case {
        name: "span_endpoints_not_reemitted",
        raw: "<thinking>Only the span 02:00 to 03:00 matters here.</thinking><answer>Window</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Window",
        steps: &[("Only the span 02:00 to 03:00 matters here.", &[A::S(120.0, 180.0)])],
    },
    Case {
        name: "hours_point",
        raw: "<thinking>Deep in overtime at 1:02:03 they score.</thinking><answer>Winner</answer>",
        duration_s: 4000.0,
        format_ok: true,
        answer: "Winner",
        steps: &[("Deep in overtime at 1:02:03 they score.", &[A::P(3723.0)])],
    },
    Case {
        name: "hours_arm_wins_over_minutes",
        raw: "<thinking>At 2:03:04 the clock shows late hours.</thinking><answer>Late</answer>",
        duration_s: 8000.0,
        format_ok: true,
        answer: "Late",
        steps: &[("At 2:03:04 the clock shows late hours.", &[A::P(7384.0)])],
    },
    Case {
        name: "hours_span",
        raw: "<thinking>The final stretch 1:00:00 to 1:01:30 decides it.</thinking><answer>Hold</answer>",
        duration_s: 4000.0,
        format_ok: true,
        answer: "Hold",
        steps: &[("The final stretch 1:00:00 to 1:01:30 decides it.", &[A::S(3600.0, 3690.0)])],
    },
    Case {
        name: "span_mixed_atom_forms",
        raw: "<thinking>The closing phase 59:30 to 1:00:10 seals the match.</thinking><answer>Fulltime</answer>",
        duration_s: 4000.0,
        format_ok: true,
        answer: "Fulltime",
        steps: &[("The closing phase 59:30 to 1:00:10 seals the match.", &[A::S(3570.0, 3610.0)])],
    },
    Case {
        name: "three_digit_minutes",
        raw: "<thinking>At 120:45 the marathon point ends.</thinking><answer>Ace</answer>",
        duration_s: 8000.0,
        format_ok: true,
        answer: "Ace",
        steps: &[("At 120:45 the marathon point ends.", &[A::P(7245.0)])],
    },
    Case {
        name: "zero_timestamp",
        raw: "<thinking>Right at 00:00 the whistle blows.</thinking><answer>Kickoff</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Kickoff",
        steps: &[("Right at 00:00 the whistle blows.", &[A::P(0.0)])],
    },
    Case {
        name: "single_digit_minute",
        raw: "<thinking>Instantly at 0:05 it begins.</thinking><answer>Start</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Start",
        steps: &[("Instantly at 0:05 it begins.", &[A::P(5.0)])],
    },
    // --- step segmentation precedence ---
    Case {
        name: "markers_mixed_case",
        raw: "<thinking>step 1: early save at 00:40. STEP 2: late goal at 09:10.</thinking><answer>One each</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "One each",
        steps: &[
            ("step 1: early save at 00:40.", &[A::P(40.0)]),
            ("STEP 2: late goal at 09:10.", &[A::P(550.0)]),
        ],
    },
    Case {
        name: "preamble_before_markers_kept",
        raw: "<thinking>Overview of the half. Step 1: corner at 02:02. Step 2: header at 02:05.</thinking><answer>Set piece</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Set piece",
        steps: &[
            ("Overview of the half.", &[]),
            ("Step 1: corner at 02:02.", &[A::P(122.0)]),
            ("Step 2: header at 02:05.", &[A::P(125.0)]),
        ],
    },
    Case {
        name: "marker_split_keeps_inner_newline",
        raw: "<thinking>Step 1: tip-off at 00:01\nextra note line\nStep 2: and-one at 07:45</thinking><answer>Foul</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Foul",
        steps: &[
            ("Step 1: tip-off at 00:01\nextra note line", &[A::P(1.0)]),
            ("Step 2: and-one at 07:45", &[A::P(465.0)]),
        ],
    },
    Case {
        name: "single_marker_falls_to_sentences",
        raw: "<thinking>Step 1: lone marker at 00:09 stays put. More text follows here.</thinking><answer>One</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "One",
        steps: &[
            ("Step 1: lone marker at 00:09 stays put.", &[A::P(9.0)]),
            ("More text follows here.", &[]),
        ],
    },
    Case {
        name: "newline_steps",
        raw: "<thinking>First the serve at 00:11\nthen the block at 00:19\nfinally the dig at 00:27</thinking><answer>Side-out</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Side-out",
        steps: &[
            ("First the serve at 00:11", &[A::P(11.0)]),
            ("then the block at 00:19", &[A::P(19.0)]),
            ("finally the dig at 00:27", &[A::P(27.0)]),
        ],
    },
    Case {
        name: "blank_lines_dropped",
        raw: "<thinking>\nOpening drive at 01:00\n\n\nRed-zone stop at 03:30\n</thinking><answer>Punt</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Punt",
        steps: &[
            ("Opening drive at 01:00", &[A::P(60.0)]),
            ("Red-zone stop at 03:30", &[A::P(210.0)]),
        ],
    },
    Case {
        name: "crlf_lines_trimmed",
        raw: "<thinking>Put-back at 00:16\r\nFast break at 00:26</thinking><answer>Swing</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Swing",
        steps: &[
            ("Put-back at 00:16", &[A::P(16.0)]),
            ("Fast break at 00:26", &[A::P(26.0)]),
        ],
    },
    Case {
        name: "sentence_terminators",
        raw: "<thinking>The faceoff at 00:03 is clean. The shot at 00:09 deflects! Was the tip at 00:10 legal? Replay says yes.</thinking><answer>Good goal</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Good goal",
        steps: &[
            ("The faceoff at 00:03 is clean.", &[A::P(3.0)]),
            ("The shot at 00:09 deflects!", &[A::P(9.0)]),
            ("Was the tip at 00:10 legal?", &[A::P(10.0)]),
            ("Replay says yes.", &[]),
        ],
    },
    Case {
        name: "decimal_does_not_split",
        raw: "<thinking>A 3.5 second possession starting 00:42 ends the quarter.</thinking><answer>Buzzer beater</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Buzzer beater",
        steps: &[("A 3.5 second possession starting 00:42 ends the quarter.", &[A::P(42.0)])],
    },
    // --- tag handling quirks that still count as well-formed ---
    Case {
        name: "text_between_sections_tolerated",
        raw: "<thinking>Lineout at 00:33 wins it.</thinking> noted <answer>Maul try</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Maul try",
        steps: &[("Lineout at 00:33 wins it.", &[A::P(33.0)])],
    },
    Case {
        name: "first_thinking_block_wins",
        raw: "<thinking>First look at 00:21.</thinking><thinking>Second look at 00:52.</thinking><answer>Keeper error</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Keeper error",
        steps: &[("First look at 00:21.", &[A::P(21.0)])],
    },
    Case {
        name: "first_answer_block_wins",
        raw: "<thinking>Counter at 06:40 finishes.</thinking><answer>Two-on-one</answer><answer>ignored</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Two-on-one",
        steps: &[("Counter at 06:40 finishes.", &[A::P(400.0)])],
    },
    Case {
        name: "answer_whitespace_trimmed",
        raw: "<thinking>Slap shot at 00:58 scores.</thinking><answer>\n  Top shelf \n</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Top shelf",
        steps: &[("Slap shot at 00:58 scores.", &[A::P(58.0)])],
    },
    Case {
        name: "trailing_text_after_answer_ignored",
        raw: "<thinking>Spike at 00:36 lands.</thinking><answer>Point</answer> trailing commentary 09:59",
        duration_s: DUR,
        format_ok: true,
        answer: "Point",
        steps: &[("Spike at 00:36 lands.", &[A::P(36.0)])],
    },
    Case {
        name: "tags_on_separate_lines",
        raw: "<thinking>Shift at 00:48 ends.</thinking>\n<answer>Change</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Change",
        steps: &[("Shift at 00:48 ends.", &[A::P(48.0)])],
    },
    Case {
        name: "answer_text_not_scanned_for_anchors",
        raw: "<thinking>Pressure peaks at 05:05.</thinking><answer>The goal at 05:10</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "The goal at 05:10",
        steps: &[("Pressure peaks at 05:05.", &[A::P(305.0)])],
    },
    Case {
        name: "unicode_text",
        raw: "<thinking>Ol\u{e9} at 00:21 from the crowd.</thinking><answer>Corner \u{2714}</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Corner \u{2714}",
        steps: &[("Ol\u{e9} at 00:21 from the crowd.", &[A::P(21.0)])],
    },
    // --- normalization: clamping, swapping, collapsing ---
    Case {
        name: "point_clamped_to_duration",
        raw: "<thinking>Late surge at 06:00 never happens.</thinking><answer>Nothing</answer>",
        duration_s: 300.0,
        format_ok: true,
        answer: "Nothing",
        steps: &[("Late surge at 06:00 never happens.", &[A::P(300.0)])],
    },
    Case {
        name: "span_end_clamped",
        raw: "<thinking>The spell 04:00-06:00 dominates.</thinking><answer>Possession</answer>",
        duration_s: 300.0,
        format_ok: true,
        answer: "Possession",
        steps: &[("The spell 04:00-06:00 dominates.", &[A::S(240.0, 300.0)])],
    },
    Case {
        name: "span_fully_beyond_collapses",
        raw: "<thinking>Supposedly 03:00-04:00 happened.</thinking><answer>No</answer>",
        duration_s: 100.0,
        format_ok: true,
        answer: "No",
        steps: &[("Supposedly 03:00-04:00 happened.", &[A::P(100.0)])],
    },
    Case {
        name: "reversed_span_swapped",
        raw: "<thinking>Rewind 05:30 to 02:10 for context.</thinking><answer>Replay</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Replay",
        steps: &[("Rewind 05:30 to 02:10 for context.", &[A::S(130.0, 330.0)])],
    },
    Case {
        name: "zero_width_span_collapses",
        raw: "<thinking>Freeze 02:10-02:10 exactly.</thinking><answer>Still</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Still",
        steps: &[("Freeze 02:10-02:10 exactly.", &[A::P(130.0)])],
    },
    Case {
        name: "chained_span_then_point",
        raw: "<thinking>Sequence 01:00-02:00-03:00 shows the shift.</thinking><answer>Line change</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Line change",
        steps: &[("Sequence 01:00-02:00-03:00 shows the shift.", &[A::S(60.0, 120.0), A::P(180.0)])],
    },
    // --- rejected near-misses ---
    Case {
        name: "trailing_digit_hug_rejected",
        raw: "<thinking>Code 12:345 is not a time but 00:15 is.</thinking><answer>Fifteen</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Fifteen",
        steps: &[("Code 12:345 is not a time but 00:15 is.", &[A::P(15.0)])],
    },
    Case {
        name: "triple_field_overflow_rejected",
        raw: "<thinking>The stamp 123:45:10 confuses clocks, unlike 01:10.</thinking><answer>Clean</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Clean",
        steps: &[("The stamp 123:45:10 confuses clocks, unlike 01:10.", &[A::P(70.0)])],
    },
    Case {
        name: "seconds_over_59_rejected",
        raw: "<thinking>The mark 02:75 is junk while 02:55 is real.</thinking><answer>Fine</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Fine",
        steps: &[("The mark 02:75 is junk while 02:55 is real.", &[A::P(175.0)])],
    },
    Case {
        name: "leading_digit_hug_rejected",
        raw: "<thinking>Jersey 4021:10 is not a time but 02:30 is.</thinking><answer>Sub</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Sub",
        steps: &[("Jersey 4021:10 is not a time but 02:30 is.", &[A::P(150.0)])],
    },
    Case {
        name: "leading_colon_hug_rejected",
        raw: "<thinking>The mark :02:10 has a stray colon, but 03:20 reads fine.</thinking><answer>Fair</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Fair",
        steps: &[("The mark :02:10 has a stray colon, but 03:20 reads fine.", &[A::P(200.0)])],
    },
    Case {
        name: "single_digit_seconds_rejected",
        raw: "<thinking>Shorthand 5:7 is too loose, yet 5:07 parses.</thinking><answer>Yes</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Yes",
        steps: &[("Shorthand 5:7 is too loose, yet 5:07 parses.", &[A::P(307.0)])],
    },
    Case {
        name: "to_without_second_atom",
        raw: "<thinking>From 01:10 to the end they defend.</thinking><answer>Shutout</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Shutout",
        steps: &[("From 01:10 to the end they defend.", &[A::P(70.0)])],
    },
    Case {
        name: "word_starting_with_to_is_not_a_span",
        raw: "<thinking>At 02:10 top spin wins, then at 02:30 a drop shot.</thinking><answer>Deuce</answer>",
        duration_s: DUR,
        format_ok: true,
        answer: "Deuce",
        steps: &[("At 02:10 top spin wins, then at 02:30 a drop shot.", &[A::P(130.0), A::P(150.0)])],
    },
    // --- malformed format: salvage without format credit ---
    Case {
        name: "untagged_sentences",
        raw: "The save at 00:30 keeps it level. The equalizer comes at 01:45.",
        duration_s: DUR,
        format_ok: false,
        answer: "",
        steps: &[
            ("The save at 00:30 keeps it level.", &[A::P(30.0)]),
            ("The equalizer comes at 01:45.", &[A::P(105.0)]),
        ],
    },
    Case {
        name: "untagged_lines",
        raw: "Early pressure at 00:15\nGoal at 00:55",
        duration_s: DUR,
        format_ok: false,
        answer: "",
        steps: &[
            ("Early pressure at 00:15", &[A::P(15.0)]),
            ("Goal at 00:55", &[A::P(55.0)]),
        ],
    },
    Case {
        name: "missing_answer_salvages_tail",
        raw: "<thinking>Corner at 04:04 leads to a header.</thinking>The header scores",
        duration_s: DUR,
        format_ok: false,
        answer: "The header scores",
        steps: &[("Corner at 04:04 leads to a header.", &[A::P(244.0)])],
    },
    Case {
        name: "unclosed_thinking_stops_at_answer",
        raw: "<thinking>Penalty at 03:33 converted <answer>Goal</answer>",
        duration_s: DUR,
        format_ok: false,
        answer: "Goal",
        steps: &[("Penalty at 03:33 converted", &[A::P(213.0)])],
    },
    Case {
        name: "unclosed_answer_runs_to_end",
        raw: "<thinking>Icing at 02:22 stops play.</thinking><answer>No goal",
        duration_s: DUR,
        format_ok: false,
        answer: "No goal",
        steps: &[("Icing at 02:22 stops play.", &[A::P(142.0)])],
    },
    Case {
        name: "stray_thinking_close",
        raw: "Warmup at 00:02 done.</thinking><answer>Ready</answer>",
        duration_s: DUR,
        format_ok: false,
        answer: "Ready",
        steps: &[("Warmup at 00:02 done.", &[A::P(2.0)])],
    },
    Case {
        name: "stray_answer_close_bounds_salvage",
        raw: "<thinking>Dump-in at 00:29 works.</thinking>Cycle goal</answer>",
        duration_s: DUR,
        format_ok: false,
        answer: "Cycle goal",
        steps: &[("Dump-in at 00:29 works.", &[A::P(29.0)])],
    },
    Case {
        name: "answer_before_thinking",
        raw: "<answer>Early call</answer><thinking>Whistle at 00:07 blows.</thinking>",
        duration_s: DUR,
        format_ok: false,
        answer: "Early call",
        steps: &[("Whistle at 00:07 blows.", &[A::P(7.0)])],
    },
    Case {
        name: "blank_answer_fails_format",
        raw: "<thinking>Drive at 05:55 stalls.</thinking><answer>   </answer>",
        duration_s: DUR,
        format_ok: false,
        answer: "",
        steps: &[("Drive at 05:55 stalls.", &[A::P(355.0)])],
    },
    Case {
        name: "blank_thinking_fails_format",
        raw: "<thinking>  </thinking><answer>Hold</answer>",
        duration_s: DUR,
        format_ok: false,
        answer: "Hold",
        steps: &[],
    },
    Case {
        name: "empty_input",
        raw: "",
        duration_s: DUR,
        format_ok: false,
        answer: "",
        steps: &[],
    },
    Case {
        name: "whitespace_only_input",
        raw: "   \n  ",
        duration_s: DUR,
        format_ok: false,
        answer: "",
        steps: &[],
    },
    Case {
        name: "empty_tags",
        raw: "<thinking></thinking><answer></answer>",
        duration_s: DUR,
        format_ok: false,
        answer: "",
        steps: &[],
    },
    Case {
        name: "untagged_prefix_before_answer",
        raw: "The play develops at 01:20 nicely.<answer>Screen pass</answer>",
        duration_s: DUR,
        format_ok: false,
        answer: "Screen pass",
        steps: &[("The play develops at 01:20 nicely.", &[A::P(80.0)])],
    },
    Case {
        name: "tags_are_case_sensitive",
        raw: "<Thinking>Rush at 00:44.</Thinking><Answer>Stop</Answer>",
        duration_s: DUR,
        format_ok: false,
        answer: "",
        steps: &[("<Thinking>Rush at 00:44.</Thinking><Answer>Stop</Answer>", &[A::P(44.0)])],
    },
    Case {
        name: "answer_only_no_steps",
        raw: "<answer>Just the answer</answer>",
        duration_s: DUR,
        format_ok: false,
        answer: "Just the answer",
        steps: &[],
    },
    // --- junk durations disable clamping instead of breaking parsing ---
    Case {
        name: "zero_duration_unclamped",
        raw: "<thinking>Ghost time at 02:00 persists.</thinking><answer>Odd</answer>",
        duration_s: 0.0,
        format_ok: true,
        answer: "Odd",
        steps: &[("Ghost time at 02:00 persists.", &[A::P(120.0)])],
    },
    Case {
        name: "negative_duration_unclamped",
        raw: "<thinking>Weird clock 01:00-01:30 rolls.</thinking><answer>Odd</answer>",
        duration_s: -5.0,
        format_ok: true,
        answer: "Odd",
        steps: &[("Weird clock 01:00-01:30 rolls.", &[A::S(60.0, 90.0)])],
    },
    Case {
        name: "nan_duration_unclamped",
        raw: "<thinking>Strange 00:30 mark.</thinking><answer>Odd</answer>",
        duration_s: f64::NAN,
        format_ok: true,
        answer: "Odd",
        steps: &[("Strange 00:30 mark.", &[A::P(30.0)])],
    },
];

fn check_case(case: &Case) {
    let got = parse_output(case.raw, case.duration_s);
    assert_eq!(got.raw, case.raw, "{}: raw text must be preserved", case.name);
    assert_eq!(got.format_ok, case.format_ok, "{}: format flag", case.name);
    assert_eq!(got.chain.answer, case.answer, "{}: answer", case.name);
    assert_eq!(
        got.chain.steps.len(),
        case.steps.len(),
        "{}: step count (got {:?})",
        case.name,
        got.chain.steps.iter().map(|s| &s.text).collect::<Vec<_>>()
    );
    for (i, (step, (want_text, want_anchors))) in
        got.chain.steps.iter().zip(case.steps).enumerate()
    {
        assert_eq!(step.text, *want_text, "{}: step {} text", case.name, i);
        let want: Vec<TimeAnchor> = want_anchors.iter().map(|a| a.to_anchor()).collect();
        assert_eq!(step.anchors, want, "{}: step {} anchors", case.name, i);
    }
}

/// Deterministic fuzz: glue random fragments (tags, half-tags, timestamps,
/// junk) together and require parsing to be total, idempotent, and to uphold
/// the normalization invariants.
fn fuzz_round(rng: &mut ChaCha8Rng) {
    const FRAGMENTS: &[&str] = &[
        "<thinking>",
        "</thinking>",
        "<answer>",
        "</answer>",
        "<think",
        "answer>",
        "</",
        "<",
        ">",
        "Step 1:",
        "step 23 :",
        "STEP 4:",
        "00:15",
        "1:02:03",
        "12:345",
        "123:45:10",
        "02:75",
        "4021:10",
        "999:59",
        "0:00",
        "99:59:59",
        "05:30 to 02:10",
        "02:10-02:10",
        "01:00-02:00-03:00",
        ":",
        "-",
        "\u{2013}",
        "\u{2014}",
        "~",
        "to",
        "TO",
        ".",
        "!",
        "?",
        "3.5",
        "\n",
        "\r\n",
        "  ",
        "the save happens",
        "goal!",
        "replay says yes.",
        "Ol\u{e9} \u{2714} \u{1f3af}",
    ];
    const DURATIONS: &[f64] = &[0.0, -3.0, f64::NAN, 37.5, 600.0, 86400.0];

    let pieces = rng.random_range(0..=24);
    let mut raw = String::new();
    for _ in 0..pieces {
        raw.push_str(FRAGMENTS[rng.random_range(0..FRAGMENTS.len())]);
    }
    let duration = DURATIONS[rng.random_range(0..DURATIONS.len())];

    let out = parse_output(&raw, duration);
    let again = parse_output(&raw, duration);
    assert_eq!(out, again, "parse must be deterministic for {raw:?}");

    assert_eq!(out.raw, raw);
    assert_eq!(out.chain.answer, out.chain.answer.trim());
    if out.format_ok {
        for tag in ["<thinking>", "</thinking>", "<answer>", "</answer>"] {
            assert!(raw.contains(tag), "format_ok without {tag} in {raw:?}");
        }
    }
    for step in &out.chain.steps {
        assert!(!step.text.trim().is_empty(), "empty step from {raw:?}");
        assert_eq!(step.text, step.text.trim(), "untrimmed step from {raw:?}");
        for anchor in &step.anchors {
            let (s, e) = (anchor.start_s(), anchor.end_s());
            assert!(s.is_finite() && e.is_finite());
            assert!(s >= 0.0, "negative anchor from {raw:?}");
            match anchor {
                TimeAnchor::Point(_) => assert_eq!(s, e),
                TimeAnchor::Span { .. } => assert!(s < e, "non-positive span from {raw:?}"),
            }
            if duration.is_finite() && duration > 0.0 {
                assert!(e <= duration, "unclamped anchor from {raw:?}");
            }
        }
    }
    // Whatever came out must render back into the tagged grammar.
    render_tagged(&out.chain).expect("parsed chains always render");
}

#[test]
fn criterion_06_parser_corpus() {
    assert!(CASES.len() >= 60, "corpus must hold at least 60 cases");
    for case in CASES {
        check_case(case);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(66);
    for _ in 0..10_000 {
        fuzz_round(&mut rng);
    }

    for s in 0..86_400u32 {
        let text = format_timestamp(f64::from(s)).unwrap();
        let back = parse_timestamp(&text).unwrap();
        assert_eq!(back, f64::from(s), "round-trip failed for {s}s via {text:?}");
    }

    support::pass(
        6,
        &format!(
            "{} corpus fixtures exact, 10000 fuzz inputs clean, 86400 timestamp round-trips",
            CASES.len()
        ),
    );
}

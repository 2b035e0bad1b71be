use blockscript::{
    parse, run_scripted, transcript, Event, Frame, IoScript, ModelConfig, RunError, RunLimits,
    StopReason,
};
use proptest::prelude::*;
use wisard_core::{BinaryPattern, Decision, GrayImage, WisardModel};
use wisard_testkit::{distinct_indices, flip, random_bits, rng};

fn small() -> ModelConfig {
    ModelConfig {
        width: 8,
        height: 8,
        tuple_size: 4,
        seed: 3,
        threshold: 128,
    }
}

fn star() -> BinaryPattern {
    BinaryPattern::from_rows(&[
        "...#....",
        "...#....",
        "#######.",
        ".#####..",
        "..###...",
        ".##.##..",
        "##...##.",
        "........",
    ])
    .unwrap()
}

fn gray(p: &BinaryPattern) -> GrayImage {
    GrayImage::from_pattern(p)
}

fn frames(patterns: &[BinaryPattern]) -> Vec<Frame> {
    patterns.iter().cloned().map(Frame::Pattern).collect()
}

#[test]
fn learns_from_file_and_recognizes_perturbed_copy() {
    let star2 = star().flipped(&[0]).unwrap();
    let script = IoScript {
        files: [
            ("star1.pgm".to_owned(), gray(&star())),
            ("star2.pgm".to_owned(), gray(&star2)),
        ]
        .into(),
        ..IoScript::default()
    };
    let src = r#"
        create wisard
        take picture from file "star1.pgm"
        learn "Star" from picture
        take picture from file "star2.pgm"
        recognize
        say result
    "#;
    let text = transcript(&parse(src).unwrap(), small(), script, RunLimits::default()).unwrap();
    assert_eq!(text, "Star\n");
}

#[test]
fn recognize_before_training_takes_unknown_branch() {
    let src = r#"
        create wisard
        take picture from camera
        recognize
        if result is unknown { say "I don't know what this image is" } else { say "known" }
        say result
    "#;
    let script = IoScript {
        camera: frames(&[star()]),
        ..IoScript::default()
    };
    let (text, summary, _) =
        run_scripted(&parse(src).unwrap(), small(), script, RunLimits::default()).unwrap();
    assert_eq!(text, "I don't know what this image is\nunknown\n");
    assert_eq!(summary.result, Some(Decision::Unknown));
    assert_eq!(summary.classifications, 1);
}

#[test]
fn loop_limit_stops_cleanly() {
    let src = "repeat forever { ask -> x\n say x }\nsay \"done\"";
    let script = IoScript::with_lines(&["a", "b", "c", "d", "e"]);
    let limits = RunLimits {
        max_loop_iterations: Some(3),
        ..RunLimits::default()
    };
    let (text, summary, _) = run_scripted(&parse(src).unwrap(), small(), script, limits).unwrap();
    assert_eq!(text, "a\nb\nc\ndone\n");
    assert_eq!(summary.stop, StopReason::Completed);
    assert!(summary.loop_limit_hit);
}

#[test]
fn end_of_input_is_recorded() {
    let src = "repeat forever { ask -> x\n say x }";
    let text = transcript(
        &parse(src).unwrap(),
        small(),
        IoScript::with_lines(&[" padded  "]),
        RunLimits::default(),
    )
    .unwrap();
    assert_eq!(text, "padded\n[end of input]\n");
}

#[test]
fn step_limit_is_recorded() {
    let limits = RunLimits {
        max_steps: 5,
        ..RunLimits::default()
    };
    let text = transcript(
        &parse("repeat forever { say \"x\" }").unwrap(),
        small(),
        IoScript::default(),
        limits,
    )
    .unwrap();
    assert_eq!(text, "x\nx\nx\nx\n[step limit reached]\n");
}

#[test]
fn empty_and_say_only_programs() {
    let run = |src: &str| {
        transcript(&parse(src).unwrap(), small(), IoScript::default(), RunLimits::default()).unwrap()
    };
    assert_eq!(run(""), "");
    assert_eq!(run("# only a comment"), "");
    assert_eq!(run("say \"hello\"\nsay \"a\\tb\""), "hello\na\tb\n");
}

#[test]
fn invalid_programs_do_not_run() {
    let err = run_scripted(
        &parse("learn \"X\" from folder \"d\"\ncreate wisard").unwrap(),
        small(),
        IoScript::default(),
        RunLimits::default(),
    )
    .unwrap_err();
    assert!(matches!(err, RunError::Invalid(d) if d.len() == 1));

    let bad = ModelConfig {
        tuple_size: 30,
        ..small()
    };
    let err = run_scripted(&parse("say \"x\"").unwrap(), bad, IoScript::default(), RunLimits::default())
        .unwrap_err();
    assert!(matches!(err, RunError::Config(_)));
}

#[test]
fn runtime_errors_skip_the_statement() {
    let src = r#"
        create wisard
        take picture from file "missing.pgm"
        show mental image of "nobody"
        say "still running"
    "#;
    let (text, summary, port) =
        run_scripted(&parse(src).unwrap(), small(), IoScript::default(), RunLimits::default()).unwrap();
    assert_eq!(text, "still running\n");
    assert_eq!(summary.runtime_errors.len(), 2);
    assert_eq!(summary.runtime_errors[0].location.line, 3);
    assert!(port.events.iter().any(|e| matches!(e, Event::RuntimeError { .. })));
}

#[test]
fn camera_frames_are_binarized_to_the_retina() {
    let big = GrayImage::from_pattern(&star()).upscale(4, 4);
    let src = "create wisard\ntake picture from camera\nlearn \"s\" from picture\nshow mental image of \"s\"";
    let script = IoScript {
        camera: vec![Frame::Image(big)],
        ..IoScript::default()
    };
    let (_, summary, port) = run_scripted(&parse(src).unwrap(), small(), script, RunLimits::default()).unwrap();
    let image = port
        .events
        .iter()
        .find_map(|e| match e {
            Event::MentalImage { image, .. } => Some(image.clone()),
            _ => None,
        })
        .unwrap();
    let expected: Vec<u64> = star().bits().iter().map(|&b| b as u64).collect();
    assert_eq!(image.counts, expected);
    assert_eq!(summary.model.unwrap().discriminator("s").unwrap().examples_trained(), 1);
}

#[test]
fn learn_from_folder() {
    let dir = tempfile::tempdir().unwrap();
    for (i, p) in [star(), star().flipped(&[5]).unwrap()].iter().enumerate() {
        std::fs::write(
            dir.path().join(format!("{i}.pgm")),
            wisard_core::imaging::write_pgm(&gray(p)),
        )
        .unwrap();
    }
    std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let script = IoScript {
        base_dir: Some(dir.path().to_owned()),
        ..IoScript::default()
    };
    let src = "create wisard\nlearn \"Star\" from folder \".\"";
    let (_, summary, _) = run_scripted(&parse(src).unwrap(), small(), script, RunLimits::default()).unwrap();
    assert_eq!(summary.labels_trained["Star"], 2);
    assert!(summary.runtime_errors.is_empty());
}

// The misread-then-taught cycle: an image answered wrongly (or not at all) is
// answered correctly right after it is learned under the right label.
#[test]
fn online_learning_corrects_the_next_answer() {
    let a = BinaryPattern::from_rows(&["##..", "##..", "....", "...."]).unwrap();
    let b = BinaryPattern::from_rows(&["....", "....", "..##", "..##"]).unwrap();
    let probe = BinaryPattern::from_rows(&["#...", "....", "..##", "..##"]).unwrap();
    let cfg = ModelConfig {
        width: 4,
        height: 4,
        tuple_size: 2,
        seed: 11,
        threshold: 128,
    };
    let src = r#"
        create wisard
        take picture from camera
        learn "A" from picture
        take picture from camera
        learn "B" from picture
        take picture from camera
        recognize
        say result
        learn "A" from picture
        recognize
        say result
    "#;
    let script = IoScript {
        camera: frames(&[a, b, probe]),
        ..IoScript::default()
    };
    let text = transcript(&parse(src).unwrap(), cfg, script, RunLimits::default()).unwrap();
    assert_eq!(text, "B\nA\n");
}

fn engine_decision(cfg: &ModelConfig, train: &[(String, BinaryPattern)], probe: &BinaryPattern) -> String {
    let mut m = WisardModel::new(cfg.width, cfg.height, cfg.tuple_size, cfg.seed).unwrap();
    for (label, p) in train {
        m.train(p, label).unwrap();
    }
    m.classify(probe).unwrap().decision.as_str().to_owned()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interpreter_agrees_with_engine(seed in any::<u64>(), n_train in 0usize..6, tuple in 1usize..6) {
        let mut r = rng(seed);
        let cfg = ModelConfig { width: 5, height: 4, tuple_size: tuple, seed, threshold: 128 };
        let labels = ["x", "y", "z"];
        let train: Vec<(String, BinaryPattern)> = (0..n_train)
            .map(|i| {
                let bits = random_bits(&mut r, 20);
                (labels[i % 3].to_owned(), BinaryPattern::new(5, 4, bits).unwrap())
            })
            .collect();
        let probe = BinaryPattern::new(5, 4, random_bits(&mut r, 20)).unwrap();

        let mut src = String::from("create wisard\n");
        for (label, _) in &train {
            src.push_str(&format!("take picture from camera\nlearn \"{label}\" from picture\n"));
        }
        src.push_str("take picture from camera\nrecognize\nsay result\n");
        let mut camera: Vec<BinaryPattern> = train.iter().map(|(_, p)| p.clone()).collect();
        camera.push(probe.clone());
        let script = IoScript { camera: frames(&camera), ..IoScript::default() };

        let text = transcript(&parse(&src).unwrap(), cfg, script, RunLimits::default()).unwrap();
        prop_assert_eq!(text, format!("{}\n", engine_decision(&cfg, &train, &probe)));
    }

    #[test]
    fn learning_a_misread_image_fixes_it(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cfg = ModelConfig { width: 6, height: 6, tuple_size: 3, seed, threshold: 128 };
        let a = BinaryPattern::new(6, 6, random_bits(&mut r, 36)).unwrap();
        let b = BinaryPattern::new(6, 6, random_bits(&mut r, 36)).unwrap();
        let idx = distinct_indices(&mut r, 36, 6);
        let probe = BinaryPattern::new(6, 6, flip(a.bits(), &idx)).unwrap();
        let src = r#"
            create wisard
            take picture from camera
            learn "A" from picture
            take picture from camera
            learn "B" from picture
            take picture from camera
            recognize
            if result == "A" { say "right" } else { say "wrong" learn "A" from picture recognize say result }
        "#;
        let script = IoScript { camera: frames(&[a, b.clone(), probe.clone()]), ..IoScript::default() };
        let text = transcript(&parse(src).unwrap(), cfg, script, RunLimits::default()).unwrap();
        prop_assert!(text == "right\n" || text == "wrong\nA\n" || probe == b, "{}", text);
    }
}

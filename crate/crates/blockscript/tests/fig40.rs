use std::fs;
use std::path::{Path, PathBuf};

use blockscript::{parse, run_scripted, validate, Frame, IoScript, ModelConfig, RunLimits, StopReason};

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/fig40")
}

fn session() -> IoScript {
    let dir = fixture_dir();
    let stdin = fs::read_to_string(dir.join("stdin.txt")).unwrap();
    let camera = fs::read_to_string(dir.join("camera.txt")).unwrap();
    IoScript {
        input_lines: stdin.lines().map(str::to_owned).collect(),
        camera: camera.lines().map(|l| Frame::Path(dir.join(l))).collect(),
        ..IoScript::default()
    }
}

fn program_source() -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fig40.bs")).unwrap()
}

#[test]
fn shipped_program_is_valid() {
    let program = parse(&program_source()).unwrap();
    assert!(validate(&program).is_empty(), "{:?}", validate(&program));
}

#[test]
fn golden_transcript() {
    let program = parse(&program_source()).unwrap();
    let (text, summary, _) =
        run_scripted(&program, ModelConfig::default(), session(), RunLimits::default()).unwrap();
    if std::env::var_os("BLOCKSCRIPT_WRITE_GOLDEN").is_some() {
        fs::write(fixture_dir().join("transcript.txt"), &text).unwrap();
    }
    let golden = fs::read_to_string(fixture_dir().join("transcript.txt")).unwrap();
    assert_eq!(text, golden);
    assert_eq!(summary.stop, StopReason::EndOfInput);
    assert_eq!(summary.classifications, 5);
    assert!(summary.runtime_errors.is_empty(), "{:?}", summary.runtime_errors);
}

#[test]
fn untrained_recognition_is_unknown_and_misread_image_is_learned() {
    let program = parse(&program_source()).unwrap();
    let (text, summary, _) =
        run_scripted(&program, ModelConfig::default(), session(), RunLimits::default()).unwrap();
    let answers: Vec<&str> = text.lines().filter(|l| l.starts_with("I ")).collect();
    assert_eq!(
        answers,
        [
            "I don't know what this image is",
            "I think this is a Flower",
            "I think this is a Star",
            "I think this is a Star",
            "I think this is a Flower",
        ]
    );
    assert_eq!(summary.labels_trained["Flower"], 2);
    assert_eq!(summary.labels_trained["Star"], 1);
}

#[test]
fn transcript_is_deterministic() {
    let program = parse(&program_source()).unwrap();
    let run = || {
        run_scripted(&program, ModelConfig::default(), session(), RunLimits::default())
            .unwrap()
            .0
    };
    assert_eq!(run(), run());
}

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::Duration;

use serde_json::Value;
use wisard_core::fixtures::{letter_e, letter_t};
use wisard_core::imaging::{load_pattern, write_pgm};
use wisard_core::{deserialize_model, BinarizeConfig, BinaryPattern, GrayImage};

fn wisard(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wisard")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_image(path: &Path, p: &BinaryPattern) {
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    std::fs::write(path, write_pgm(&GrayImage::from_pattern(p).upscale(4, 4))).unwrap();
}

fn new_model(dir: &Path) -> PathBuf {
    let model = dir.join("m.json");
    let o = wisard(&["new", "--width", "3", "--height", "5", "--tuple-size", "3", "--seed", "7", "--out", path(&model)]);
    assert!(o.status.success(), "{o:?}");
    model
}

fn letters(dir: &Path) -> PathBuf {
    let data = dir.join("letters");
    write_image(&data.join("E/e1.pgm"), &letter_e());
    write_image(&data.join("T/t1.pgm"), &letter_t());
    data
}

#[test]
fn new_writes_an_empty_model() {
    let dir = tempfile::tempdir().unwrap();
    let model = new_model(dir.path());
    let m = deserialize_model(&std::fs::read(&model).unwrap()).unwrap();
    assert_eq!(m.num_tuples(), 5);
    assert_eq!(m.seed(), 7);
    assert_eq!(m.labels().count(), 0);
    assert!(!dir.path().join("m.json.tmp").exists());
}

#[test]
fn usage_errors_exit_2() {
    let o = wisard(&["new", "--width", "3", "--height", "5", "--tuple-size", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = wisard(&["new", "--width", "3", "--height", "5", "--tuple-size", "30", "--out", "x.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = wisard(&["train", "--model", "m.json", "--dir", "d", "--image", "i.pgm", "--label", "E"]);
    assert_eq!(o.status.code(), Some(2));
    let o = wisard(&["train", "--model", "m.json", "--image", "i.pgm"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn train_from_folder_and_retrain() {
    let dir = tempfile::tempdir().unwrap();
    let model = new_model(dir.path());
    let data = letters(dir.path());
    let o = wisard(&["train", "--model", path(&model), "--dir", path(&data)]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("E: 1\nT: 1\n"));
    let o = wisard(&["train", "--model", path(&model), "--dir", path(&data)]);
    assert!(stdout(&o).contains("E: 2\nT: 2\n"));

    let empty = dir.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    let o = wisard(&["train", "--model", path(&model), "--dir", path(&empty)]);
    assert_eq!(o.status.code(), Some(1));
    let m = deserialize_model(&std::fs::read(&model).unwrap()).unwrap();
    assert_eq!(m.examples_per_label()["E"], 2);
}

#[test]
fn train_single_image() {
    let dir = tempfile::tempdir().unwrap();
    let model = new_model(dir.path());
    let img = dir.path().join("e.pgm");
    write_image(&img, &letter_e());
    let o = wisard(&["train", "--model", path(&model), "--image", path(&img), "--label", "E"]);
    assert_eq!(stdout(&o), "trained 1 image(s)\nE: 1\n");
    let o = wisard(&["train", "--model", path(&model), "--image", "missing.pgm", "--label", "E"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn classify_text_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let model = new_model(dir.path());
    let probe = dir.path().join("probe.pgm");
    write_image(&probe, &letter_e().flipped(&[3]).unwrap());

    let o = wisard(&["classify", "--model", path(&model), "--image", path(&probe)]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "unknown\n".into()));

    wisard(&["train", "--model", path(&model), "--dir", path(&letters(dir.path()))]);
    let o = wisard(&["classify", "--model", path(&model), "--image", path(&probe)]);
    assert_eq!(stdout(&o), "E\n");

    let o = wisard(&["classify", "--model", path(&model), "--image", path(&probe), "--json"]);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["decision"], "E");
    assert_eq!(doc["scores"]["E"], 4);
    assert!(doc["trace"].is_array());

    let o = wisard(&["classify", "--model", path(&model), "--image", path(&probe), "--min-score", "5"]);
    assert_eq!(stdout(&o), "unknown\n");
    let o = wisard(&["classify", "--model", "nope.json", "--image", path(&probe)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn mental_image_export() {
    let dir = tempfile::tempdir().unwrap();
    let model = new_model(dir.path());
    let img = dir.path().join("e.pgm");
    write_image(&img, &letter_e());
    wisard(&["train", "--model", path(&model), "--image", path(&img), "--label", "E"]);

    let out = dir.path().join("mi.pgm");
    let o = wisard(&["mental-image", "--model", path(&model), "--label", "E", "--out", path(&out)]);
    assert!(o.status.success(), "{o:?}");
    let back = load_pattern(&out, &BinarizeConfig::new(3, 5, 128).unwrap()).unwrap();
    assert_eq!(back, letter_e());

    let o = wisard(&["mental-image", "--model", path(&model), "--label", "Z", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn run_reports_validation_and_syntax_errors() {
    let dir = tempfile::tempdir().unwrap();
    let prog = dir.path().join("bad.bs");
    std::fs::write(&prog, "learn \"X\" from folder \"d\"\ncreate wisard\n").unwrap();
    let o = wisard(&["run", path(&prog)]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("LEARN_BEFORE_CREATE") && err.contains("must FIRST use"), "{err}");

    std::fs::write(&prog, "create wisard\nfly\n").unwrap();
    let o = wisard(&["run", path(&prog)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":2:1:"));

    std::fs::write(&prog, "create wisard\ntake picture from camera\n").unwrap();
    let o = wisard(&["run", path(&prog)]);
    assert_eq!(o.status.code(), Some(3));
    let o = wisard(&["run", path(&prog), "--camera-map", "webcam=x.pgm"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_reads_stdin_and_files() {
    let dir = tempfile::tempdir().unwrap();
    write_image(&dir.path().join("e.pgm"), &letter_e());
    let prog = dir.path().join("p.bs");
    std::fs::write(
        &prog,
        "create wisard\ntake picture from file \"e.pgm\"\nlearn \"E\" from picture\nrecognize\nsay result\nrepeat forever { ask -> w\n say w }\n",
    )
    .unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_wisard"))
        .args(["run", path(&prog), "--width", "3", "--height", "5", "--tuple-size", "3"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"one\r\ntwo\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(stdout(&o), "E\none\ntwo\n[end of input]\n");

    let o = wisard(&["run", path(&prog), "--width", "3", "--height", "5", "--tuple-size", "3", "--max-iterations", "1", "--stdin-script", path(&prog)]);
    assert_eq!(stdout(&o), "E\ncreate wisard\n");
}

fn http(port: u16, request: &str) -> String {
    let mut s = TcpStream::connect(("127.0.0.1", port)).unwrap();
    s.set_read_timeout(Some(Duration::from_secs(10))).unwrap();
    s.write_all(request.as_bytes()).unwrap();
    let mut out = String::new();
    s.read_to_string(&mut out).unwrap();
    out
}

#[test]
fn serve_answers_and_saves_on_interrupt() {
    let dir = tempfile::tempdir().unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_wisard"))
        .args(["serve", "--port", "0", "--models-dir", path(dir.path())])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stderr = BufReader::new(child.stderr.take().unwrap());
    let mut line = String::new();
    stderr.read_line(&mut line).unwrap();
    let port: u16 = line
        .split("127.0.0.1:")
        .nth(1)
        .and_then(|rest| rest.split_whitespace().next())
        .and_then(|p| p.parse().ok())
        .unwrap_or_else(|| panic!("unexpected banner {line:?}"));

    let list = http(port, "GET /models HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n");
    assert!(list.starts_with("HTTP/1.1 200"), "{list}");
    assert!(list.ends_with("[]"), "{list}");

    let body = r#"{"width":3,"height":5,"tuple_size":3}"#;
    let created = http(
        port,
        &format!("POST /models HTTP/1.1\r\nHost: x\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}", body.len()),
    );
    assert!(created.starts_with("HTTP/1.1 201"), "{created}");

    let status = Command::new("kill").args(["-INT", &child.id().to_string()]).status().unwrap();
    assert!(status.success());
    let exit = child.wait().unwrap();
    assert!(exit.success(), "{exit:?}");
    let saved: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| !e.file_name().to_string_lossy().ends_with(".meta.json"))
        .collect();
    assert_eq!(saved.len(), 1);
}

#[test]
fn serve_fails_on_occupied_port() {
    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let dir = tempfile::tempdir().unwrap();
    let o = wisard(&["serve", "--port", &port, "--models-dir", path(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot listen"));
}

//! Headless execution: scripted keyboard lines and camera frames in, the
//! concatenated `say` output out.

use std::collections::{BTreeMap, VecDeque};
use std::path::PathBuf;

use wisard_core::imaging::{load_pgm, load_pattern};
use wisard_core::{binarize, BinarizeConfig, BinaryPattern, GrayImage};

use crate::ast::{ImageSource, Program};
use crate::interp::{run, AcquireError, Event, ExecutionSummary, IoPort, ModelConfig, RunError, RunLimits};

/// One camera frame: an already-binary retina, a grayscale image, or a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Frame {
    Pattern(BinaryPattern),
    Image(GrayImage),
    Path(PathBuf),
}

impl Frame {
    fn to_pattern(&self, cfg: &BinarizeConfig) -> Result<BinaryPattern, AcquireError> {
        match self {
            Frame::Pattern(p) => Ok(p.clone()),
            Frame::Image(img) => Ok(binarize(img, cfg)),
            Frame::Path(path) => Ok(load_pattern(path, cfg)?),
        }
    }
}

/// Inputs for a headless run.
#[derive(Debug, Clone, Default)]
pub struct IoScript {
    pub input_lines: Vec<String>,
    /// Frames returned by `take picture from camera`, in order.
    pub camera: Vec<Frame>,
    /// In-memory images for `take picture from file`, keyed by path text.
    pub files: BTreeMap<String, GrayImage>,
    /// Directory that relative file and folder paths are resolved against.
    pub base_dir: Option<PathBuf>,
}

impl IoScript {
    pub fn with_lines<S: AsRef<str>>(lines: &[S]) -> Self {
        Self {
            input_lines: lines.iter().map(|l| l.as_ref().to_owned()).collect(),
            ..Self::default()
        }
    }
}

/// An [`IoPort`] fed entirely from an [`IoScript`].
#[derive(Debug, Default)]
pub struct ScriptedPort {
    lines: VecDeque<String>,
    camera: VecDeque<Frame>,
    files: BTreeMap<String, GrayImage>,
    base_dir: Option<PathBuf>,
    pub output: Vec<String>,
    pub events: Vec<Event>,
}

impl ScriptedPort {
    pub fn new(script: IoScript) -> Self {
        Self {
            lines: script.input_lines.into(),
            camera: script.camera.into(),
            files: script.files,
            base_dir: script.base_dir,
            output: Vec::new(),
            events: Vec::new(),
        }
    }

    fn resolve(&self, path: &str) -> PathBuf {
        match &self.base_dir {
            Some(base) => base.join(path),
            None => PathBuf::from(path),
        }
    }

    /// Output so far, one `say` per line.
    pub fn text(&self) -> String {
        self.output.iter().map(|l| format!("{l}\n")).collect()
    }
}

impl IoPort for ScriptedPort {
    fn write_line(&mut self, text: &str) {
        self.output.push(text.to_owned());
    }

    fn read_line(&mut self) -> Option<String> {
        self.lines.pop_front()
    }

    fn acquire_image(
        &mut self,
        source: &ImageSource,
        cfg: &BinarizeConfig,
    ) -> Result<BinaryPattern, AcquireError> {
        match source {
            ImageSource::Camera => self
                .camera
                .pop_front()
                .ok_or(AcquireError::EndOfInput)?
                .to_pattern(cfg),
            ImageSource::File(path) => match self.files.get(path) {
                Some(img) => Ok(binarize(img, cfg)),
                None => {
                    let bytes = std::fs::read(self.resolve(path))
                        .map_err(|e| AcquireError::Failed(format!("{path}: {e}")))?;
                    Ok(binarize(&load_pgm(&bytes)?, cfg))
                }
            },
        }
    }

    fn load_folder(
        &mut self,
        path: &str,
        cfg: &BinarizeConfig,
    ) -> Result<(Vec<BinaryPattern>, Vec<String>), String> {
        let loaded = wisard_core::imaging::load_image_folder(&self.resolve(path), cfg)
            .map_err(|e| e.to_string())?;
        Ok((
            loaded.items,
            loaded.diagnostics.iter().map(ToString::to_string).collect(),
        ))
    }

    fn emit_event(&mut self, event: Event) {
        self.events.push(event);
    }
}

/// Runs `program` headlessly and returns its output plus the run summary.
/// A run that stops early ends with a marker line such as `[end of input]`.
pub fn run_scripted(
    program: &Program,
    config: ModelConfig,
    script: IoScript,
    limits: RunLimits,
) -> Result<(String, ExecutionSummary, ScriptedPort), RunError> {
    let mut port = ScriptedPort::new(script);
    let summary = run(program, config, &mut port, limits)?;
    let mut text = port.text();
    if let Some(marker) = summary.stop.marker() {
        text.push_str(marker);
        text.push('\n');
    }
    Ok((text, summary, port))
}

pub fn transcript(
    program: &Program,
    config: ModelConfig,
    script: IoScript,
    limits: RunLimits,
) -> Result<String, RunError> {
    run_scripted(program, config, script, limits).map(|(text, _, _)| text)
}

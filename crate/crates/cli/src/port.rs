use std::collections::VecDeque;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use blockscript::{AcquireError, Event, ImageSource, IoPort};
use wisard_core::imaging::load_pattern;
use wisard_core::{BinarizeConfig, BinaryPattern};

/// Terminal host for BlockScript: `say` goes to stdout as it happens, `ask`
/// reads a line of input, and camera pictures come from a queue of files.
pub struct CliPort {
    input: Box<dyn BufRead>,
    camera: VecDeque<PathBuf>,
    base_dir: PathBuf,
}

impl CliPort {
    pub fn new(input: Box<dyn BufRead>, camera: Vec<PathBuf>, base_dir: PathBuf) -> Self {
        Self {
            input,
            camera: camera.into(),
            base_dir,
        }
    }

    pub fn print(&mut self, line: &str) {
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{line}");
        let _ = out.flush();
    }
}

impl IoPort for CliPort {
    fn write_line(&mut self, text: &str) {
        self.print(text);
    }

    fn read_line(&mut self) -> Option<String> {
        let mut line = String::new();
        match self.input.read_line(&mut line) {
            Ok(0) | Err(_) => None,
            Ok(_) => Some(line.trim_end_matches(['\n', '\r']).to_owned()),
        }
    }

    fn acquire_image(
        &mut self,
        source: &ImageSource,
        cfg: &BinarizeConfig,
    ) -> Result<BinaryPattern, AcquireError> {
        let path = match source {
            ImageSource::Camera => self.camera.pop_front().ok_or(AcquireError::EndOfInput)?,
            ImageSource::File(path) => self.base_dir.join(path),
        };
        Ok(load_pattern(&path, cfg)?)
    }

    fn load_folder(
        &mut self,
        path: &str,
        cfg: &BinarizeConfig,
    ) -> Result<(Vec<BinaryPattern>, Vec<String>), String> {
        let loaded = wisard_core::imaging::load_image_folder(&self.base_dir.join(path), cfg)
            .map_err(|e| e.to_string())?;
        Ok((
            loaded.items,
            loaded.diagnostics.iter().map(ToString::to_string).collect(),
        ))
    }

    fn emit_event(&mut self, event: Event) {
        if let Event::RuntimeError { location, message } = event {
            eprintln!("{location}: runtime error: {message}");
        }
    }
}

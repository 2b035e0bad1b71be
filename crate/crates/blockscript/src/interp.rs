use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use thiserror::Error;
use wisard_core::imaging::{load_image_folder, DEFAULT_THRESHOLD};
use wisard_core::{
    BinarizeConfig, BinaryPattern, ClassificationOutcome, Decision, ImageError, MentalImage,
    WisardError, WisardModel,
};

use crate::ast::*;
use crate::validate::{has_errors, validate, ValidationDiagnostic};

/// Retina and binarization settings applied by `create wisard`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelConfig {
    pub width: usize,
    pub height: usize,
    pub tuple_size: usize,
    pub seed: u64,
    pub threshold: u8,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            width: 32,
            height: 32,
            tuple_size: 16,
            seed: 0,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

impl ModelConfig {
    pub fn binarize_config(&self) -> BinarizeConfig {
        BinarizeConfig {
            threshold: self.threshold,
            target_width: self.width,
            target_height: self.height,
        }
    }

    pub fn build(&self) -> Result<WisardModel, WisardError> {
        WisardModel::new(self.width, self.height, self.tuple_size, self.seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunLimits {
    /// Statements executed before the run is stopped.
    pub max_steps: u64,
    /// Iterations of each `repeat forever` before it exits; `None` is unbounded.
    pub max_loop_iterations: Option<u64>,
}

impl Default for RunLimits {
    fn default() -> Self {
        Self {
            max_steps: 1_000_000,
            max_loop_iterations: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AcquireError {
    #[error("no more images")]
    EndOfInput,
    #[error("{0}")]
    Failed(String),
}

impl From<ImageError> for AcquireError {
    fn from(e: ImageError) -> Self {
        AcquireError::Failed(e.to_string())
    }
}

/// Structured notifications for hosts that present more than text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    ModelCreated,
    ImageAcquired(BinaryPattern),
    Trained { label: String, examples: u64 },
    Recognized(ClassificationOutcome),
    MentalImage { label: String, image: MentalImage },
    RuntimeError { location: Location, message: String },
}

/// Everything the interpreter needs from its host.
pub trait IoPort {
    fn write_line(&mut self, text: &str);

    /// Next line of user input without its line terminator; `None` at end of input.
    fn read_line(&mut self) -> Option<String>;

    fn acquire_image(
        &mut self,
        source: &ImageSource,
        cfg: &BinarizeConfig,
    ) -> Result<BinaryPattern, AcquireError>;

    /// Images for `learn ... from folder`. Reads `.pgm` files from disk by default.
    fn load_folder(
        &mut self,
        path: &str,
        cfg: &BinarizeConfig,
    ) -> Result<(Vec<BinaryPattern>, Vec<String>), String> {
        let loaded = load_image_folder(Path::new(path), cfg).map_err(|e| e.to_string())?;
        Ok((
            loaded.items,
            loaded.diagnostics.iter().map(ToString::to_string).collect(),
        ))
    }

    fn emit_event(&mut self, _event: Event) {}
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Completed,
    EndOfInput,
    StepLimit,
}

impl StopReason {
    /// Line appended to transcripts for runs that did not complete.
    pub fn marker(self) -> Option<&'static str> {
        match self {
            StopReason::Completed => None,
            StopReason::EndOfInput => Some("[end of input]"),
            StopReason::StepLimit => Some("[step limit reached]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuntimeDiagnostic {
    pub location: Location,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ExecutionSummary {
    pub statements_executed: u64,
    /// Examples trained during this run, per label.
    pub labels_trained: BTreeMap<String, u64>,
    pub classifications: u64,
    pub stop: StopReason,
    pub loop_limit_hit: bool,
    pub runtime_errors: Vec<RuntimeDiagnostic>,
    pub result: Option<Decision>,
    pub model: Option<WisardModel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("program has validation errors")]
    Invalid(Vec<ValidationDiagnostic>),
    #[error("invalid model configuration: {0}")]
    Config(#[from] WisardError),
}

enum Halt {
    EndOfInput,
    StepLimit,
}

struct Interpreter<'io, P: IoPort> {
    config: ModelConfig,
    limits: RunLimits,
    io: &'io mut P,
    model: Option<WisardModel>,
    image: Option<BinaryPattern>,
    result: Option<Decision>,
    vars: HashMap<String, String>,
    summary: ExecutionSummary,
}

/// Validates `program` and executes it against `io`.
pub fn run<P: IoPort>(
    program: &Program,
    config: ModelConfig,
    io: &mut P,
    limits: RunLimits,
) -> Result<ExecutionSummary, RunError> {
    let diags = validate(program);
    if has_errors(&diags) {
        return Err(RunError::Invalid(diags));
    }
    // Surface a bad configuration before any statement runs.
    config.build()?;

    let mut interp = Interpreter {
        config,
        limits,
        io,
        model: None,
        image: None,
        result: None,
        vars: HashMap::new(),
        summary: ExecutionSummary {
            statements_executed: 0,
            labels_trained: BTreeMap::new(),
            classifications: 0,
            stop: StopReason::Completed,
            loop_limit_hit: false,
            runtime_errors: Vec::new(),
            result: None,
            model: None,
        },
    };
    interp.summary.stop = match interp.block(program) {
        Ok(()) => StopReason::Completed,
        Err(Halt::EndOfInput) => StopReason::EndOfInput,
        Err(Halt::StepLimit) => StopReason::StepLimit,
    };
    let mut summary = interp.summary;
    summary.result = interp.result;
    summary.model = interp.model;
    Ok(summary)
}

impl<P: IoPort> Interpreter<'_, P> {
    fn block(&mut self, program: &Program) -> Result<(), Halt> {
        for stmt in &program.statements {
            self.statement(stmt)?;
        }
        Ok(())
    }

    fn fail(&mut self, location: Location, message: String) {
        self.io.emit_event(Event::RuntimeError {
            location,
            message: message.clone(),
        });
        self.summary.runtime_errors.push(RuntimeDiagnostic { location, message });
    }

    fn statement(&mut self, stmt: &Statement) -> Result<(), Halt> {
        if self.summary.statements_executed >= self.limits.max_steps {
            return Err(Halt::StepLimit);
        }
        self.summary.statements_executed += 1;
        let at = stmt.location;

        match &stmt.kind {
            StatementKind::CreateWisard => match self.config.build() {
                Ok(model) => {
                    self.model = Some(model);
                    self.io.emit_event(Event::ModelCreated);
                }
                Err(e) => self.fail(at, e.to_string()),
            },
            StatementKind::Say(text) => {
                let line = match text {
                    SayText::Literal(s) => s.clone(),
                    SayText::Result => self
                        .result
                        .as_ref()
                        .map(|d| d.as_str().to_owned())
                        .unwrap_or_else(|| "unknown".into()),
                    SayText::Var(v) => self.vars.get(v).cloned().unwrap_or_default(),
                };
                self.io.write_line(&line);
            }
            StatementKind::Ask(var) => {
                let line = self.io.read_line().ok_or(Halt::EndOfInput)?;
                self.vars.insert(var.clone(), line.trim().to_owned());
            }
            StatementKind::AcquireImage(source) => {
                let cfg = self.config.binarize_config();
                match self.io.acquire_image(source, &cfg) {
                    Ok(p) if p.same_dims(cfg.target_width, cfg.target_height) => {
                        self.io.emit_event(Event::ImageAcquired(p.clone()));
                        self.image = Some(p);
                    }
                    Ok(p) => self.fail(
                        at,
                        format!(
                            "image is {}x{}, the retina is {}x{}",
                            p.width(),
                            p.height(),
                            cfg.target_width,
                            cfg.target_height
                        ),
                    ),
                    Err(AcquireError::EndOfInput) => return Err(Halt::EndOfInput),
                    Err(AcquireError::Failed(msg)) => self.fail(at, format!("take picture: {msg}")),
                }
            }
            StatementKind::Learn { label, from } => self.learn(at, label, from),
            StatementKind::Recognize => {
                let (Some(model), Some(image)) = (&self.model, &self.image) else {
                    let what = if self.model.is_none() { "no wisard has been created" } else { "no picture has been taken" };
                    self.fail(at, format!("recognize: {what}"));
                    return Ok(());
                };
                match model.classify(image) {
                    Ok(outcome) => {
                        self.summary.classifications += 1;
                        self.result = Some(outcome.decision.clone());
                        self.io.emit_event(Event::Recognized(outcome));
                    }
                    Err(e) => self.fail(at, format!("recognize: {e}")),
                }
            }
            StatementKind::ShowMentalImage(label) => {
                let Some(model) = &self.model else {
                    self.fail(at, "show mental image: no wisard has been created".into());
                    return Ok(());
                };
                match model.mental_image(label) {
                    Ok(image) => self.io.emit_event(Event::MentalImage {
                        label: label.clone(),
                        image,
                    }),
                    Err(e) => self.fail(at, format!("show mental image: {e}")),
                }
            }
            StatementKind::RepeatForever(body) => {
                let mut iterations = 0u64;
                loop {
                    if self.limits.max_loop_iterations.is_some_and(|max| iterations >= max) {
                        self.summary.loop_limit_hit = true;
                        break;
                    }
                    iterations += 1;
                    self.block(body)?;
                }
            }
            StatementKind::If {
                cond,
                then,
                otherwise,
            } => {
                if self.holds(cond) {
                    self.block(then)?;
                } else if let Some(other) = otherwise {
                    self.block(other)?;
                }
            }
        }
        Ok(())
    }

    fn holds(&self, cond: &Condition) -> bool {
        match cond {
            Condition::VarEquals(var, lit) => self.vars.get(var) == Some(lit),
            Condition::ResultEquals(label) => {
                self.result.as_ref().and_then(Decision::label) == Some(label.as_str())
            }
            Condition::ResultUnknown => self.result.as_ref().is_none_or(Decision::is_unknown),
        }
    }

    fn learn(&mut self, at: Location, label: &str, from: &LearnSource) {
        if self.model.is_none() {
            self.fail(at, "learn: no wisard has been created".into());
            return;
        }
        let patterns = match from {
            LearnSource::CurrentImage => match &self.image {
                Some(p) => vec![p.clone()],
                None => {
                    self.fail(at, "learn: no picture has been taken".into());
                    return;
                }
            },
            LearnSource::Folder(path) => {
                let cfg = self.config.binarize_config();
                match self.io.load_folder(path, &cfg) {
                    Ok((patterns, problems)) => {
                        for msg in problems {
                            self.fail(at, format!("learn: skipped {msg}"));
                        }
                        patterns
                    }
                    Err(msg) => {
                        self.fail(at, format!("learn: {msg}"));
                        return;
                    }
                }
            }
        };
        for p in patterns {
            let model = self.model.as_mut().expect("checked above");
            match model.train(&p, label) {
                Ok(()) => {
                    *self.summary.labels_trained.entry(label.to_owned()).or_insert(0) += 1;
                    let examples = model
                        .discriminator(label)
                        .map(|d| d.examples_trained())
                        .unwrap_or(0);
                    self.io.emit_event(Event::Trained {
                        label: label.to_owned(),
                        examples,
                    });
                }
                Err(e) => self.fail(at, format!("learn: {e}")),
            }
        }
    }
}

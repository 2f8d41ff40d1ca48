use equispec::eta::EtaError;
use equispec::exact::ExactError;
use equispec::heat::HeatError;
use equispec::invariants::InvariantError;
use equispec::specfun::SpecfunError;
use equispec::spectral::SpectralError;
use serde_json::{json, Map, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// A failed command: exit status, message, and the failing cases if any.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub status: i32,
    pub message: String,
    pub failures: Vec<String>,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError { status: EXIT_VALIDATION, message: message.into(), failures: Vec::new() }
    }
    pub fn numeric(message: impl Into<String>) -> Self {
        CliError { status: EXIT_NUMERIC, message: message.into(), failures: Vec::new() }
    }
}

fn classify(numeric: bool, message: String) -> CliError {
    if numeric {
        CliError::numeric(message)
    } else {
        CliError::validation(message)
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        let numeric = matches!(e, ExactError::NotRational { .. } | ExactError::DivisionByZero { .. });
        classify(numeric, e.to_string())
    }
}

impl From<SpecfunError> for CliError {
    fn from(e: SpecfunError) -> Self {
        let numeric = matches!(e, SpecfunError::Overflow { .. } | SpecfunError::NotConverged { .. });
        classify(numeric, e.to_string())
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::Exact(inner) => inner.into(),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<HeatError> for CliError {
    fn from(e: HeatError) -> Self {
        match e {
            HeatError::Spectral(inner) => inner.into(),
            HeatError::RankDeficient { .. } => CliError::numeric(e.to_string()),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<EtaError> for CliError {
    fn from(e: EtaError) -> Self {
        match e {
            EtaError::Spectral(inner) => inner.into(),
            EtaError::Specfun(inner) => inner.into(),
            EtaError::Heat(inner) => inner.into(),
            EtaError::NoDecayCertificate(_) | EtaError::NotConverged { .. } => CliError::numeric(e.to_string()),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<InvariantError> for CliError {
    fn from(e: InvariantError) -> Self {
        match e {
            InvariantError::Exact(inner) => inner.into(),
            other => CliError::validation(other.to_string()),
        }
    }
}

/// Body of a successful command.
#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Value,
    pub diagnostics: Map<String, Value>,
    /// Nonzero when the command ran but its checks failed.
    pub failure: Option<CliError>,
}

impl Outcome {
    pub fn new(results: Value) -> Self {
        Outcome { results, diagnostics: Map::new(), failure: None }
    }

    pub fn diag(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.diagnostics.insert(key.to_string(), value.into());
        self
    }
}

/// The JSON document written to stdout. Keys are sorted, so identical input
/// gives identical bytes.
pub fn render(command: Value, outcome: Result<Outcome, CliError>) -> (String, i32) {
    let (results, mut diagnostics, error) = match outcome {
        Ok(o) => (o.results, o.diagnostics, o.failure),
        Err(e) => (Value::Null, Map::new(), Some(e)),
    };
    let status = match &error {
        Some(e) => {
            diagnostics.insert("error".into(), Value::String(e.message.clone()));
            if !e.failures.is_empty() {
                diagnostics.insert("failures".into(), json!(e.failures));
            }
            e.status
        }
        None => EXIT_OK,
    };
    let doc = json!({
        "command": command,
        "results": results,
        "diagnostics": Value::Object(diagnostics),
        "exit_status": status,
    });
    (serde_json::to_string_pretty(&doc).expect("report serialises"), status)
}

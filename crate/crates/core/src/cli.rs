//! The `mibguard` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or model error, 3 network error.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::net::SocketAddr;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classifiers::{train, ClassifierSpec, TrainedModel};
use crate::collector::{
    classify_stream, serve_simulated_agent, AgentEndpoint, Scenario, ScenarioClock, StreamConfig,
};
use crate::dataset::{load_csv, synth_generate, write_csv, Dataset, SynthSpec};
use crate::error::{Error, Result};
use crate::eval::evaluate_cv;
use crate::features::{Evaluator, ReliefFParams};

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "mibguard", version, about = "Classify ICMP MIB counter windows as normal traffic or DoS attacks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labeled synthetic dataset as CSV.
    Synth(SynthArgs),
    /// Score and rank attributes.
    Rank(RankArgs),
    /// Train a classifier and write the model as JSON.
    Train(TrainArgs),
    /// Stratified k-fold cross-validation report.
    Eval(EvalArgs),
    /// Classify CSV rows with a saved model.
    Predict(PredictArgs),
    /// Poll an SNMP agent and classify each window.
    Collect(CollectArgs),
    /// Run a simulated SNMP agent.
    ServeAgent(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, env = "MIBGUARD_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// JSON generator description; defaults to the built-in eight-class preset.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "infogain")]
    pub method: EvaluatorArg,
    /// ReliefF neighbours per class.
    #[arg(long, default_value_t = 10)]
    pub neighbors: usize,
    /// ReliefF sampled instances (default: all).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Keep only the best N attributes.
    #[arg(long)]
    pub top: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "j48")]
    pub classifier: ClassifierSpec,
    /// Comma-separated attribute names, or top:N:evaluator.
    #[arg(long)]
    pub attrs: Option<AttrSelection>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "j48")]
    pub classifier: ClassifierSpec,
    #[arg(long)]
    pub attrs: Option<AttrSelection>,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// CSV rows to classify; reads stdin when absent. With a header line,
    /// columns are matched by name and extra columns are ignored.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CollectArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = 161)]
    pub port: u16,
    #[arg(long, default_value = "public")]
    pub community: String,
    /// Seconds between polls (at least 1).
    #[arg(long, default_value_t = 5.0)]
    pub interval: f64,
    #[arg(long, default_value_t = 1000)]
    pub timeout_ms: u64,
    #[arg(long, default_value_t = 1)]
    pub retries: u32,
    /// Stop after this many polls.
    #[arg(long)]
    pub count: Option<u64>,
    /// Classify per-second rates instead of raw deltas.
    #[arg(long)]
    pub rates: bool,
    /// Detect agent restarts through sysUpTime.
    #[arg(long)]
    pub check_uptime: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioKind {
    Constant,
    IdleFlood,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:1161")]
    pub bind: SocketAddr,
    #[arg(long, value_enum, default_value_t = ScenarioKind::IdleFlood)]
    pub scenario: ScenarioKind,
    /// JSON scenario file; overrides --scenario.
    #[arg(long)]
    pub scenario_file: Option<PathBuf>,
    /// Idle windows before the flood starts.
    #[arg(long, default_value_t = 3)]
    pub idle_windows: u64,
    /// Advance one window per period of wall time instead of per request.
    #[arg(long)]
    pub period_ms: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct EvaluatorArg(pub Evaluator);

impl FromStr for EvaluatorArg {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.parse().map(EvaluatorArg)
    }
}

/// `--attrs` value.
#[derive(Debug, Clone, PartialEq)]
pub enum AttrSelection {
    Names(Vec<String>),
    Top { n: usize, evaluator: String },
}

impl FromStr for AttrSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("top:") {
            let (n, ev) = rest.split_once(':').unwrap_or((rest, "infogain"));
            let n: usize = n.parse().map_err(|_| Error::invalid(format!("bad attribute count in {s:?}")))?;
            if n == 0 {
                return Err(Error::invalid("top:N needs N >= 1"));
            }
            ev.parse::<Evaluator>()?;
            return Ok(AttrSelection::Top { n, evaluator: ev.to_string() });
        }
        let names: Vec<String> = s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect();
        if names.is_empty() {
            return Err(Error::invalid("empty attribute list"));
        }
        Ok(AttrSelection::Names(names))
    }
}

impl AttrSelection {
    pub fn apply(&self, ds: &Dataset, seed: u64) -> Result<Dataset> {
        match self {
            AttrSelection::Names(names) => ds.select_attributes(names),
            AttrSelection::Top { n, evaluator } => {
                let ev = with_seed(evaluator.parse()?, seed);
                let top = ev.rank(ds)?.top_n(*n)?;
                ds.select_attributes(&top)
            }
        }
    }
}

fn with_seed(ev: Evaluator, seed: u64) -> Evaluator {
    match ev {
        Evaluator::ReliefF(p) => Evaluator::ReliefF(ReliefFParams { seed, ..p }),
        other => other,
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_network() {
        3
    } else {
        2
    }
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, S>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                1
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    match execute(cli.command, stdin, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load(path: &Path) -> Result<Dataset> {
    load_csv(open(path)?)
}

fn load_model(path: &Path) -> Result<TrainedModel> {
    let mut s = String::new();
    open(path)?.read_to_string(&mut s)?;
    TrainedModel::from_json(&s)
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn execute(cmd: Command, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Synth(a) => {
            let mut spec = match &a.spec {
                Some(p) => serde_json::from_reader(open(p)?)?,
                None => SynthSpec::eight_class(a.common.seed),
            };
            spec.seed = a.common.seed;
            let ds = synth_generate(&spec)?;
            let mut buf = Vec::new();
            write_csv(&ds, &mut buf)?;
            emit(&a.common.out, stdout, &buf)?;
        }
        Command::Rank(a) => {
            let ds = load(&a.data)?;
            let ev = match a.method.0 {
                Evaluator::ReliefF(_) => Evaluator::ReliefF(ReliefFParams {
                    k_neighbors: a.neighbors,
                    sample_count: a.samples,
                    seed: a.common.seed,
                }),
                other => other,
            };
            let mut ranking = ev.rank(&ds)?;
            if let Some(n) = a.top {
                ranking.scores.truncate(n);
            }
            let text = match a.format {
                Format::Text => ranking.to_text(),
                Format::Json => ranking.to_json(),
            };
            emit(&a.common.out, stdout, with_newline(text).as_bytes())?;
        }
        Command::Train(a) => {
            let mut ds = load(&a.data)?;
            if let Some(sel) = &a.attrs {
                ds = sel.apply(&ds, a.common.seed)?;
            }
            let model = train(&ds, &a.classifier, a.common.seed)?;
            emit(&a.common.out, stdout, with_newline(model.to_json()).as_bytes())?;
        }
        Command::Eval(a) => {
            let mut ds = load(&a.data)?;
            if let Some(sel) = &a.attrs {
                ds = sel.apply(&ds, a.common.seed)?;
            }
            let report = evaluate_cv(&ds, &a.classifier, a.folds, a.common.seed)?;
            let text = match a.format {
                Format::Text => report.render(),
                Format::Json => report.to_json()?,
            };
            emit(&a.common.out, stdout, with_newline(text).as_bytes())?;
        }
        Command::Predict(a) => {
            let model = load_model(&a.model)?;
            let mut input = String::new();
            match &a.data {
                Some(p) => open(p)?.read_to_string(&mut input)?,
                None => stdin.read_to_string(&mut input)?,
            };
            let rows = parse_predict_rows(&input, &model)?;
            let mut out = String::new();
            for x in rows {
                let label = model.predict(&x)?;
                match a.format {
                    Format::Text => out.push_str(label.name()),
                    Format::Json => {
                        let dist = model.predict_distribution(&x)?;
                        out.push_str(&serde_json::json!({ "label": label, "distribution": dist }).to_string());
                    }
                }
                out.push('\n');
            }
            emit(&a.out, stdout, out.as_bytes())?;
        }
        Command::Collect(a) => return collect(a, stdout, stderr),
        Command::ServeAgent(a) => {
            let mut scenario = match &a.scenario_file {
                Some(p) => serde_json::from_reader(open(p)?)?,
                None => match a.scenario {
                    ScenarioKind::Constant => Scenario::constant([0; 6]),
                    ScenarioKind::IdleFlood => Scenario::idle_then_flood(a.idle_windows),
                },
            };
            if let Some(period_ms) = a.period_ms {
                scenario.clock = ScenarioClock::Wall { period_ms };
            }
            let agent = serve_simulated_agent(scenario, a.bind)?;
            writeln!(stderr, "simulated agent listening on {}", agent.local_addr())?;
            agent.join();
        }
    }
    Ok(0)
}

/// Rows of numbers, optionally preceded by a header naming the columns.
fn parse_predict_rows(input: &str, model: &TrainedModel) -> Result<Vec<Vec<f64>>> {
    let schema = model.schema();
    let mut lines = input.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).peekable();
    let mut columns: Option<Vec<usize>> = None;
    if let Some((_, first)) = lines.peek() {
        let fields: Vec<&str> = first.split(',').map(str::trim).collect();
        if fields.iter().any(|f| f.parse::<f64>().is_err()) {
            let pick = schema
                .names()
                .iter()
                .map(|n| {
                    fields
                        .iter()
                        .position(|f| schema.index_of(f) == schema.index_of(n))
                        .ok_or_else(|| Error::UnknownAttribute(n.clone()))
                })
                .collect::<Result<Vec<_>>>()?;
            columns = Some(pick);
            lines.next();
        }
    }
    lines
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let picked: Vec<&str> = match &columns {
                Some(cols) => cols
                    .iter()
                    .map(|&c| fields.get(c).copied())
                    .collect::<Option<Vec<_>>>()
                    .ok_or(Error::SchemaMismatch { expected: schema.len(), found: fields.len() })?,
                None if fields.len() != schema.len() => {
                    return Err(Error::SchemaMismatch { expected: schema.len(), found: fields.len() })
                }
                None => fields,
            };
            picked
                .iter()
                .enumerate()
                .map(|(j, f)| match f.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(Error::NonNumeric { row: i + 1, column: j + 1, value: f.to_string() }),
                })
                .collect()
        })
        .collect()
}

fn collect(a: CollectArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    if !(a.interval >= 1.0 && a.interval.is_finite()) {
        writeln!(stderr, "error: --interval must be at least 1 second")?;
        return Ok(1);
    }
    if a.timeout_ms == 0 {
        writeln!(stderr, "error: --timeout-ms must be positive")?;
        return Ok(1);
    }
    let model = load_model(&a.model)?;
    let endpoint = AgentEndpoint {
        host: a.host,
        port: a.port,
        community: a.community,
        timeout: Duration::from_millis(a.timeout_ms),
        retries: a.retries,
        check_uptime: a.check_uptime,
    };
    let config = StreamConfig { interval: Duration::from_secs_f64(a.interval), max_polls: a.count, rates: a.rates };
    let mut file = a.out.as_ref().map(File::create).transpose()?;
    let mut write_err: Option<std::io::Error> = None;
    let summary = classify_stream(&endpoint, &model, &config, |ev| {
        let line = ev.to_json_line() + "\n";
        let res = match file.as_mut() {
            Some(f) => f.write_all(line.as_bytes()),
            None => stdout.write_all(line.as_bytes()).and_then(|_| stdout.flush()),
        };
        match res {
            Ok(()) => ControlFlow::Continue(()),
            Err(e) => {
                write_err = Some(e);
                ControlFlow::Break(())
            }
        }
    })?;
    if let Some(e) = write_err {
        return Err(e.into());
    }
    if summary.windows == 0 && summary.gaps > 0 {
        writeln!(stderr, "error: every poll of {}:{} failed", endpoint.host, endpoint.port)?;
        return Ok(3);
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("mibguard").chain(args.iter().copied()), &mut stdin.as_bytes(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn attr_selection_parsing() {
        assert_eq!(
            "iIU, iOM,iIE".parse::<AttrSelection>().unwrap(),
            AttrSelection::Names(vec!["iIU".into(), "iOM".into(), "iIE".into()])
        );
        assert_eq!(
            "top:4:relieff".parse::<AttrSelection>().unwrap(),
            AttrSelection::Top { n: 4, evaluator: "relieff".into() }
        );
        assert!("top:0:relieff".parse::<AttrSelection>().is_err());
        assert!("top:x".parse::<AttrSelection>().is_err());
        assert!("top:2:magic".parse::<AttrSelection>().is_err());
        assert!(",".parse::<AttrSelection>().is_err());
    }

    #[test]
    fn usage_errors_exit_1() {
        assert_eq!(run_str(&[], "").0, 1);
        assert_eq!(run_str(&["bogus"], "").0, 1);
        assert_eq!(run_str(&["eval", "--data", "x.csv", "--classifier", "svm"], "").0, 1);
        let (code, out, _) = run_str(&["--help"], "");
        assert_eq!(code, 0);
        assert!(out.contains("synth"));
    }

    #[test]
    fn missing_file_exits_2() {
        let (code, _, err) = run_str(&["rank", "--data", "/nonexistent/file.csv"], "");
        assert_eq!(code, 2);
        assert!(err.contains("/nonexistent/file.csv"));
    }

    #[test]
    fn short_interval_is_a_usage_error() {
        let (code, _, err) = run_str(&["collect", "--model", "m.json", "--interval", "0.5"], "");
        assert_eq!(code, 1);
        assert!(err.contains("interval"));
    }

    fn model_json(names: &[&str]) -> TrainedModel {
        let ds = Dataset::new(
            crate::dataset::AttributeSchema::new(names.iter().copied()).unwrap(),
            vec![vec![0.0; names.len()], vec![100.0; names.len()]],
            vec![crate::ClassLabel::Normal, crate::ClassLabel::IcmpEcho],
        )
        .unwrap();
        train(&ds, &ClassifierSpec::Ibk { k: 1 }, 1).unwrap()
    }

    #[test]
    fn predict_rows_with_and_without_header() {
        let m = model_json(&["iIE", "iOE"]);
        assert_eq!(parse_predict_rows("1,2\n3,4\n", &m).unwrap(), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let with_header = "iOE,icmpInEchos,class\n1,2,Normal\n";
        assert_eq!(parse_predict_rows(with_header, &m).unwrap(), vec![vec![2.0, 1.0]]);
        assert!(matches!(
            parse_predict_rows("1,2,3\n", &m),
            Err(Error::SchemaMismatch { expected: 2, found: 3 })
        ));
        assert!(matches!(parse_predict_rows("iIE\n1\n", &m), Err(Error::UnknownAttribute(_))));
        assert!(matches!(parse_predict_rows("1,nan\n", &m), Err(Error::NonNumeric { .. })));
    }

    #[test]
    fn predict_wrong_arity_exits_2() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        std::fs::write(&path, model_json(&["iIE", "iOE"]).to_json()).unwrap();
        let (code, out, err) = run_str(&["predict", "--model", path.to_str().unwrap()], "1,2,3\n");
        assert_eq!(code, 2);
        assert!(out.is_empty());
        assert!(err.contains("schema mismatch"), "{err}");
        let (code, out, _) = run_str(&["predict", "--model", path.to_str().unwrap()], "0,0\n100,100\n");
        assert_eq!(code, 0);
        assert_eq!(out, "Normal\nIcmpEcho\n");
    }
}

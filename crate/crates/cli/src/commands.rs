//! Subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;

use overlap_codes::bounds::{bound_report, BoundReport};
use overlap_codes::constructions::{run as run_construction, ConstructionSpec, MaterializeOptions};
use overlap_codes::family::{count_families, FamilyEnumerator};
use overlap_codes::io::{format_code, parse_code, parse_family, FormatError};
use overlap_codes::search::{check_upper_bound, max_code, BoundCheck, SearchOptions, Strategy};
use overlap_codes::sync::{
    corrupt, encode_stream, exhaustive_latency, scan_decode, CorruptionSpec, DecodeLog, ExhaustiveConfig, LatencyReport,
};
use overlap_codes::tables::{table_row, Table, TableOptions, TableRow};
use overlap_codes::word::{verify_overlap_free, Alphabet, CodeError, CodeSet, OverlapWindow, OverlapWitness, Verdict};
use overlap_codes::Execution;

use crate::manifest::Recorder;
use crate::{
    BoundsArgs, Cli, Command, ConstructArgs, FamiliesArgs, Format, SearchArgs, SimulateArgs, Status, StrategyArg,
    TablesArgs, VerifyArgs,
};

pub fn run(cli: &Cli) -> Result<Status> {
    match &cli.command {
        Command::Construct(a) => construct(a, cli.seed),
        Command::Verify(a) => verify(a, cli.seed),
        Command::Bounds(a) => bounds(a, cli.seed),
        Command::Search(a) => search(a, cli.seed),
        Command::Tables(a) => tables(a, cli.seed),
        Command::Simulate(a) => simulate(a, cli.seed),
        Command::Families(a) => families(a, cli.seed),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Writes to `path`, or to stdout when absent.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// A code file carrying its manifest and extra comment lines.
fn code_artifact(rec: &Recorder, code: &CodeSet, notes: &[String]) -> Result<String> {
    let body = format_code(code, &[]);
    let mut comments = vec![rec.comment(&body)?.trim_start_matches("# ").trim_end().to_string()];
    comments.extend(notes.iter().cloned());
    let text = format_code(code, &comments);
    // Every emitted code file must load and re-verify.
    let reloaded = parse_code(&text).context("emitted code file does not reload")?;
    anyhow::ensure!(reloaded == *code, "emitted code file does not round-trip");
    Ok(text)
}

fn window_of(code: &CodeSet, t1: Option<usize>, t2: Option<usize>) -> Result<OverlapWindow> {
    match (t1, t2) {
        (Some(t1), Some(t2)) => Ok(OverlapWindow::new(t1, t2, code.n())?),
        _ => code.window().context("no window given and none declared in the code file"),
    }
}

#[derive(Debug, Deserialize)]
struct SpecFile {
    #[serde(flatten)]
    spec: ConstructionSpec,
    family: Option<PathBuf>,
}

fn construct(a: &ConstructArgs, seed: u64) -> Result<Status> {
    let spec_text = read(&a.spec)?;
    let file: SpecFile = serde_json::from_str(&spec_text).with_context(|| format!("parsing {}", a.spec.display()))?;
    let family_path = match (&a.family, &file.family) {
        (Some(p), _) => p.clone(),
        (None, Some(p)) => a.spec.parent().unwrap_or(Path::new(".")).join(p),
        (None, None) => bail!("no family file: give --family or a \"family\" entry in the spec"),
    };
    let family =
        parse_family(&read(&family_path)?).with_context(|| format!("invalid family file {}", family_path.display()))?;
    let construction = file.spec.construction()?;
    let mut opts = MaterializeOptions::default();
    if let Some(cap) = a.cap {
        opts.cap = cap;
    }
    let rec =
        Recorder::new("construct", json!({ "spec": file.spec, "family": family.to_string(), "cap": opts.cap }), seed);
    let (code, report) = run_construction(construction, &family, &opts)?;
    let status = if !report.all_ok() {
        Status::VerificationFailed
    } else if code.is_none() {
        Status::Budget
    } else {
        Status::Ok
    };
    if let Some(mut code) = code {
        code.set_window(Some(construction.window()?));
        if status == Status::Ok {
            let notes = vec![format!("construction: {construction}"), format!("family: {family}")];
            emit(a.out.as_deref(), &code_artifact(&rec, &code, &notes)?)?;
        }
    }
    match &a.report {
        Some(p) => emit(Some(p), &rec.json_artifact(&report)?)?,
        None => eprintln!(
            "{construction}: {} words, verified: {}",
            report.materialized.map_or("not materialized".to_string(), |s| s.to_string()),
            report.all_ok()
        ),
    }
    if status == Status::VerificationFailed {
        for c in report.verified.iter().filter(|c| c.ok == Some(false)) {
            if let Some(w) = &c.witness {
                eprintln!("verification failed for {}: {w}", c.window);
            }
        }
    }
    Ok(status)
}

#[derive(Debug, Serialize)]
struct VerifyResult {
    q: usize,
    n: usize,
    size: usize,
    window: OverlapWindow,
    ok: bool,
    witness: Option<OverlapWitness>,
}

fn verify(a: &VerifyArgs, seed: u64) -> Result<Status> {
    let text = read(&a.code)?;
    let rec = Recorder::new("verify", json!({ "code": a.code.display().to_string(), "t1": a.t1, "t2": a.t2 }), seed);
    let code = match parse_code(&text) {
        Ok(code) => code,
        Err(FormatError::Code(CodeError::Overlap { window, witness })) => {
            // The declared window fails; report it like any other failure.
            let words = parse_code(&strip_window(&text)).context("re-reading code words")?;
            let result = VerifyResult {
                q: words.q(),
                n: words.n(),
                size: words.len(),
                window,
                ok: false,
                witness: Some(witness),
            };
            emit(a.out.as_deref(), &rec.json_artifact(&result)?)?;
            return Ok(Status::VerificationFailed);
        }
        Err(e) => return Err(e).with_context(|| format!("invalid code file {}", a.code.display())),
    };
    let window = window_of(&code, a.t1, a.t2)?;
    let witness = match verify_overlap_free(&code, window.t1(), window.t2())? {
        Verdict::Ok => None,
        Verdict::Witness(w) => Some(w),
    };
    let ok = witness.is_none();
    let result = VerifyResult { q: code.q(), n: code.n(), size: code.len(), window, ok, witness };
    emit(a.out.as_deref(), &rec.json_artifact(&result)?)?;
    Ok(if ok { Status::Ok } else { Status::VerificationFailed })
}

/// The code file with the window removed from its header.
fn strip_window(text: &str) -> String {
    let mut seen_header = false;
    text.lines()
        .map(|l| {
            let content = l.split('#').next().unwrap_or("").trim();
            if !seen_header && content.contains('=') {
                seen_header = true;
                content
                    .split_whitespace()
                    .filter(|f| !f.starts_with("t1=") && !f.starts_with("t2="))
                    .collect::<Vec<_>>()
                    .join(" ")
            } else {
                l.to_string()
            }
        })
        .map(|l| l + "\n")
        .collect()
}

const BOUNDS_CSV_HEADER: &str = "q,n,t1,t2,best_lower,best_lower_rule,best_upper,best_upper_rule,exact";

fn bounds_csv_row(r: &BoundReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        r.q,
        r.n,
        r.t1,
        r.t2,
        r.best_lower,
        r.best_lower_rule,
        r.best_upper,
        r.best_upper_rule,
        r.exact.as_ref().map(ToString::to_string).unwrap_or_default()
    )
}

fn bounds(a: &BoundsArgs, seed: u64) -> Result<Status> {
    let rec = Recorder::new("bounds", json!({ "q": a.q, "n": a.n, "t1": a.t1, "t2": a.t2 }), seed);
    let windows: Vec<(usize, usize)> = match (a.t1, a.t2) {
        (Some(t1), Some(t2)) => vec![(t1, t2)],
        _ => (1..a.n).flat_map(|t1| (t1..a.n).map(move |t2| (t1, t2))).collect(),
    };
    let reports =
        windows.iter().map(|&(t1, t2)| bound_report(a.q, a.n, t1, t2, None)).collect::<Result<Vec<_>, _>>()?;
    let text = match (a.format, reports.as_slice()) {
        (Format::Json, [single]) if a.t1.is_some() => rec.json_artifact(single)?,
        (Format::Json, _) => rec.json_artifact(&reports)?,
        (Format::Csv, _) => {
            let body: String = std::iter::once(BOUNDS_CSV_HEADER.to_string())
                .chain(reports.iter().map(bounds_csv_row))
                .map(|l| l + "\n")
                .collect();
            rec.text_artifact(&body)?
        }
    };
    emit(a.out.as_deref(), &text)?;
    Ok(Status::Ok)
}

#[derive(Debug, Serialize)]
struct SearchResult {
    q: usize,
    n: usize,
    t1: usize,
    t2: usize,
    size: usize,
    exact: bool,
    upper_bound: u64,
    method: Strategy,
    vertices: usize,
    nodes_expanded: u64,
    witness: Vec<String>,
}

#[derive(Debug, Serialize)]
struct BoundCheckResult {
    q: usize,
    n: usize,
    t1: usize,
    t2: usize,
    bound: usize,
    #[serde(flatten)]
    check: BoundCheck,
}

fn search(a: &SearchArgs, seed: u64) -> Result<Status> {
    let mut opts = SearchOptions::default().with_strategy(match a.strategy {
        StrategyArg::Auto => Strategy::Auto,
        StrategyArg::Clique => Strategy::Clique,
        StrategyArg::Roles => Strategy::Roles,
    });
    if let Some(nodes) = a.budget_nodes {
        opts = opts.with_nodes(nodes);
    }
    if let Some(secs) = a.budget_secs {
        opts = opts.with_time(Duration::try_from_secs_f64(secs).context("bad --budget-secs")?);
    }
    if a.no_symmetry {
        opts = opts.without_symmetry();
    }
    let params = json!({
        "q": a.q, "n": a.n, "t1": a.t1, "t2": a.t2, "budget_nodes": a.budget_nodes,
        "budget_secs": a.budget_secs, "strategy": format!("{:?}", a.strategy).to_lowercase(),
        "symmetry": !a.no_symmetry, "at_most": a.at_most,
    });
    let rec = Recorder::new("search", params, seed);
    if let Some(bound) = a.at_most {
        let check = check_upper_bound(a.q, a.n, a.t1, a.t2, bound, &opts)?;
        let status = if check == BoundCheck::Unknown { Status::Budget } else { Status::Ok };
        if let (BoundCheck::Exceeded { witness }, Some(p)) = (&check, &a.witness) {
            emit(Some(p), &code_artifact(&rec, witness, &[format!("more than {bound} words")])?)?;
        }
        let result = BoundCheckResult { q: a.q, n: a.n, t1: a.t1, t2: a.t2, bound, check };
        emit(a.out.as_deref(), &rec.json_artifact(&result)?)?;
        return Ok(status);
    }
    let out = max_code(a.q, a.n, a.t1, a.t2, &opts)?;
    if let Some(p) = &a.witness {
        let note = if out.exact { "maximum code" } else { "best code found" };
        emit(Some(p), &code_artifact(&rec, &out.witness, &[note.to_string()])?)?;
    }
    let result = SearchResult {
        q: a.q,
        n: a.n,
        t1: a.t1,
        t2: a.t2,
        size: out.size,
        exact: out.exact,
        upper_bound: out.upper_bound,
        method: out.method,
        vertices: out.vertices,
        nodes_expanded: out.nodes_expanded,
        witness: out.witness.iter().map(ToString::to_string).collect(),
    };
    emit(a.out.as_deref(), &rec.json_artifact(&result)?)?;
    Ok(if out.exact { Status::Ok } else { Status::Budget })
}

fn tables(a: &TablesArgs, seed: u64) -> Result<Status> {
    let table: Table = a.which.parse()?;
    let mut opts =
        TableOptions { max_families: a.max_families.or(TableOptions::default().max_families), ..Default::default() };
    if let Some(secs) = a.budget_secs {
        opts.search = opts.search.with_time(Duration::try_from_secs_f64(secs).context("bad --budget-secs")?);
    }
    let rec = Recorder::new(
        "tables",
        json!({ "which": table.to_string(), "q": a.q, "n_max": a.n_max, "max_families": opts.max_families, "budget_secs": a.budget_secs }),
        seed,
    );
    let mut body = format!("{}\n", TableRow::CSV_HEADER);
    let mut truncated = Vec::new();
    for n in table.min_n()..=a.n_max {
        let row = table_row(table, a.q, n, &opts)?;
        if row.truncated {
            truncated.push(n);
        }
        body.push_str(&row.csv());
        body.push('\n');
    }
    let mut text = rec.text_artifact(&body)?;
    if !truncated.is_empty() {
        let rows = truncated.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
        text.push_str(&format!("# truncated: rows n = {rows} hit the family cap or search budget\n"));
    }
    emit(a.out.as_deref(), &text)?;
    Ok(if truncated.is_empty() { Status::Ok } else { Status::Budget })
}

#[derive(Debug, Deserialize)]
struct EditsFile {
    #[serde(default)]
    message: Option<Vec<usize>>,
    edits: Vec<CorruptionSpec>,
}

#[derive(Debug, Serialize)]
struct EditRun {
    edit: CorruptionSpec,
    latency: Option<usize>,
    log: DecodeLog,
}

#[derive(Debug, Serialize)]
struct EditsResult {
    q: usize,
    n: usize,
    message: Vec<usize>,
    runs: Vec<EditRun>,
}

/// Codewords in the default message for `--edits`.
const DEFAULT_MESSAGE_LEN: usize = 6;

fn histogram_csv(report: &LatencyReport) -> String {
    let mut out = String::from("kind,latency,runs\n");
    for k in [&report.deletion, &report.insertion] {
        let kind = serde_json::to_value(k.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        for (latency, runs) in &k.histogram {
            out.push_str(&format!("{kind},{latency},{runs}\n"));
        }
        if k.undetected > 0 {
            out.push_str(&format!("{kind},undetected,{}\n", k.undetected));
        }
    }
    out
}

fn simulate(a: &SimulateArgs, seed: u64) -> Result<Status> {
    let code = parse_code(&read(&a.code)?).with_context(|| format!("invalid code file {}", a.code.display()))?;
    if code.is_empty() {
        bail!("code file {} has no words", a.code.display());
    }
    if let Some(path) = &a.edits {
        let file: EditsFile =
            serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
        let message = file.message.unwrap_or_else(|| (0..DEFAULT_MESSAGE_LEN).map(|i| i % code.len()).collect());
        let rec = Recorder::new(
            "simulate",
            json!({ "code": a.code.display().to_string(), "message": message, "edits": file.edits }),
            seed,
        );
        let stream = encode_stream(&code, &message)?;
        let mut runs = Vec::new();
        for edit in file.edits {
            let corrupted = corrupt(&stream, &edit, code.alphabet())?;
            let log = scan_decode(&corrupted, &code);
            let latency = log.detected_at().map(|at| at.saturating_sub(edit.position));
            runs.push(EditRun { edit, latency, log });
        }
        let result = EditsResult { q: code.q(), n: code.n(), message, runs };
        emit(a.out.as_deref(), &rec.json_artifact(&result)?)?;
        return Ok(Status::Ok);
    }
    let window = window_of(&code, a.t1, a.t2)?;
    let mut cfg = ExhaustiveConfig { seed, ..Default::default() };
    if let Some(len) = a.message_len {
        cfg.message_len = len;
        cfg.trailing = cfg.trailing.min(len.saturating_sub(1));
    }
    if let Some(m) = a.max_messages {
        cfg.max_messages = m;
    }
    let rec = Recorder::new(
        "simulate",
        json!({ "code": a.code.display().to_string(), "t1": window.t1(), "t2": window.t2(), "exhaustive": cfg }),
        seed,
    );
    let report = exhaustive_latency(&code, window.t1(), window.t2(), &cfg, Execution::default())?;
    if let Some(p) = &a.histogram {
        emit(Some(p), &rec.text_artifact(&histogram_csv(&report))?)?;
    }
    emit(a.out.as_deref(), &rec.json_artifact(&report)?)?;
    let misses = report.deletion.confirmed_misses + report.insertion.confirmed_misses;
    if misses > 0 {
        eprintln!("{misses} edits exceeded the latency bound even with extra context");
        return Ok(Status::VerificationFailed);
    }
    Ok(Status::Ok)
}

fn families(a: &FamiliesArgs, seed: u64) -> Result<Status> {
    if let Some(path) = &a.validate {
        let rec = Recorder::new("families", json!({ "validate": path.display().to_string() }), seed);
        let (result, status) = match parse_family(&read(path)?) {
            Ok(f) => (json!({ "valid": true, "q": f.q(), "k": f.depth() }), Status::Ok),
            Err(FormatError::Family(e)) => {
                (json!({ "valid": false, "violation": e.to_string() }), Status::VerificationFailed)
            }
            Err(e) => return Err(e).with_context(|| format!("invalid family file {}", path.display())),
        };
        if let Some(v) = result.get("violation") {
            eprintln!("invalid family: {}", v.as_str().unwrap_or_default());
        }
        emit(a.out.as_deref(), &rec.json_artifact(&result)?)?;
        return Ok(status);
    }
    let (q, k) = (a.q.context("--q is required")?, a.k.context("--k is required")?);
    let alphabet = Alphabet::new(q)?;
    if a.count {
        let rec = Recorder::new("families", json!({ "q": q, "k": k, "count": true }), seed);
        let result = json!({ "q": q, "k": k, "count": count_families(q, k).to_string() });
        emit(a.out.as_deref(), &rec.json_artifact(&result)?)?;
        return Ok(Status::Ok);
    }
    let rec = Recorder::new("families", json!({ "q": q, "k": k, "limit": a.limit }), seed);
    let mut e = FamilyEnumerator::new(alphabet, k).with_budget(a.limit);
    let listed: Vec<String> = e.by_ref().map(|f| f.to_string()).collect();
    let truncated = e.is_truncated();
    let result = json!({ "q": q, "k": k, "families": listed, "truncated": truncated });
    emit(a.out.as_deref(), &rec.json_artifact(&result)?)?;
    Ok(if truncated { Status::Budget } else { Status::Ok })
}

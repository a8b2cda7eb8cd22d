//! The `qv` command line. `run` takes the argument vector and two sinks and
//! returns the process exit code: 0 when a verdict was computed, 2 when a
//! search ran out of budget, 1 on any error.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use quiver_ci::classify::{
    coregular_obstruction, coregular_shape, find_forbidden_descendant, is_ci, is_ci_by_generators, is_coregular,
    random_setting, Constraints, DescendantOptions, DimSpec, ObstructionOutcome, SearchOutcome, TargetName, Witness,
};
use quiver_ci::corpus::{self, Property, ALL_PROPERTIES};
use quiver_ci::cycles::{f_value, primitive_cycles};
use quiver_ci::local::{glue_subquiver, local_quiver, Decomposition};
use quiver_ci::quiver::{dot::to_dot, text};
use quiver_ci::reductions::{reduce_with, ReduceOptions, ReductionOutcome};
use quiver_ci::toric::min_generators;
use quiver_ci::{Error, QuiverSetting};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "qv", version, about = "Smoothness and complete intersection tests for quiver settings")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed for `random` and the first seed for `corpus`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// State budget of descendant searches.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Write DOT output here. For `reduce`, a directory receiving one file per step.
    #[arg(long, global = true, value_name = "PATH")]
    dot: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a .qv file and print it back in normal form.
    Parse { file: PathBuf },
    /// Decide the C.I. property, coregularity, or search for forbidden descendants.
    Classify {
        file: PathBuf,
        #[arg(long)]
        ci: bool,
        #[arg(long)]
        coregular: bool,
        /// Comma-separated targets, e.g. g1,g2,c1.
        #[arg(long, value_delimiter = ',', value_parser = parse_target)]
        descendants: Vec<TargetName>,
    },
    /// Run the reduction driver.
    Reduce {
        file: PathBuf,
        /// Print every step.
        #[arg(long)]
        trace: bool,
        /// Only RI–RIII.
        #[arg(long)]
        no_riv: bool,
    },
    /// Primitive cycles and F(Q).
    Cycles {
        file: PathBuf,
        #[arg(long)]
        list: bool,
    },
    /// Minimal generators of the ideal of relations among primitive cycles.
    Generators { file: PathBuf },
    /// Glue a strongly connected vertex subset of a one-dimensional setting.
    Glue {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        vertices: Vec<String>,
    },
    /// Local quiver of a decomposition of the dimension vector.
    Local {
        file: PathBuf,
        /// One part per line: `mult <a> dims <v>=<k>,...`.
        #[arg(long)]
        decomposition: PathBuf,
    },
    /// Search for a descendant isomorphic to one of the targets.
    Descendants {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', value_parser = parse_target, default_value = "g1,g2")]
        targets: Vec<TargetName>,
        /// Largest vertex subset glued in one move.
        #[arg(long, default_value_t = 4)]
        max_glue: usize,
    },
    /// A random setting.
    Random {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        arrows: usize,
        #[arg(long)]
        strongly_connected: bool,
        /// Strongly connected, loopless, all degrees at least 2.
        #[arg(long)]
        reduced: bool,
        /// Dimensions drawn uniformly from 1..=max-dim.
        #[arg(long, default_value_t = 1)]
        max_dim: u32,
    },
    /// Graphviz output.
    Dot { file: PathBuf },
    /// Run property suites over seeded random corpora.
    Corpus {
        /// Comma-separated property names; all when omitted.
        #[arg(long, value_delimiter = ',', value_parser = parse_property)]
        property: Vec<Property>,
        /// Number of seeds, starting at --seed.
        #[arg(long)]
        count: Option<u64>,
        /// Directory for counterexample files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn parse_target(s: &str) -> Result<TargetName, String> {
    TargetName::parse(s).ok_or_else(|| format!("unknown target `{s}` (expected g1, g2, c1)"))
}

fn parse_property(s: &str) -> Result<Property, String> {
    Property::parse(s).ok_or_else(|| {
        let names: Vec<&str> = ALL_PROPERTIES.iter().map(|p| p.name()).collect();
        format!("unknown property `{s}` (expected one of {})", names.join(", "))
    })
}

/// Why a command stopped early.
enum Failure {
    Core(Error, Option<PathBuf>),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e, None)
    }
}

type CmdResult = Result<Output, Failure>;

struct Output {
    text: String,
    json: Value,
    code: u8,
}

impl Output {
    fn verdict(text: String, json: Value) -> Self {
        Output { text, json, code: EXIT_OK }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn load(path: &Path) -> Result<QuiverSetting, Failure> {
    let src = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    text::parse(&src).map_err(|e| Failure::Core(e, Some(path.to_owned())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write_dot(global: &Global, q: &QuiverSetting) -> Result<(), Failure> {
    match &global.dot {
        Some(path) => write_file(path, &to_dot(q, "Q")),
        None => Ok(()),
    }
}

fn setting_output(global: &Global, q: &QuiverSetting) -> CmdResult {
    write_dot(global, q)?;
    Ok(Output::verdict(q.to_string(), to_json(q)))
}

fn indent(s: &str, by: &str) -> String {
    s.lines().map(|l| format!("{by}{l}\n")).collect()
}

fn describe_terminal(q: &QuiverSetting) -> String {
    if q.is_point() {
        return "point".into();
    }
    let mut s = format!("{} vertices, {} arrows", q.vertex_count(), q.arrow_count());
    if let Some(shape) = coregular_shape(q) {
        write!(s, " ({shape})").unwrap();
    }
    s
}

fn descendant_options(global: &Global, max_glue: usize) -> DescendantOptions {
    let mut opts = DescendantOptions {
        max_glue,
        ..DescendantOptions::default()
    };
    if let Some(b) = global.budget {
        opts.budget = b;
    }
    opts
}

fn witness_text(w: &Witness) -> String {
    if w.trace.is_empty() {
        return "  (the setting itself)\n".into();
    }
    let mut s = String::new();
    for step in w.trace.steps() {
        writeln!(s, "  {}", step.kind).unwrap();
    }
    s
}

fn search_text(out: &SearchOutcome, targets: &[TargetName]) -> (String, u8) {
    let names: Vec<String> = targets.iter().map(ToString::to_string).collect();
    match out {
        SearchOutcome::Found(w) => {
            (format!("descendant: {}\n{}", w.target, witness_text(w)), EXIT_OK)
        }
        SearchOutcome::NoneFound { explored } => (
            format!("descendant: none of {} ({explored} states explored)\n", names.join(", ")),
            EXIT_OK,
        ),
        SearchOutcome::Inconclusive { explored } => (
            format!("descendant: inconclusive, budget exhausted after {explored} states\n"),
            EXIT_INCONCLUSIVE,
        ),
    }
}

fn classify_ci(q: &QuiverSetting, text: &mut String) -> Result<Value, Failure> {
    let verdict = is_ci(q)?;
    writeln!(text, "CI: {}", verdict.answer).unwrap();
    let mut j = json!({ "answer": verdict.answer, "certificate": to_json(&verdict.certificate) });
    if q.is_strongly_connected() {
        match is_ci_by_generators(q) {
            Ok(by_gens) => {
                if by_gens.answer != verdict.answer {
                    return Err(Error::Inconsistent(format!(
                        "reduction says C.I. = {}, generator counting says {}",
                        verdict.answer, by_gens.answer
                    ))
                    .into());
                }
                if let quiver_ci::classify::Certificate::Generators { report, f } = &by_gens.certificate {
                    let s = if report.total == 1 { "" } else { "s" };
                    writeln!(text, "  certificate: {} minimal generator{s} vs F = {f}", report.total).unwrap();
                    j["generators"] = json!(report.total);
                    j["f"] = json!(f);
                }
            }
            Err(Error::Resource { what, cap }) => {
                writeln!(text, "  generator count skipped: limit hit while {what} (cap {cap})").unwrap();
            }
            Err(e) => return Err(e.into()),
        }
    }
    if let quiver_ci::classify::Certificate::Reduction(outcome) = &verdict.certificate {
        let terminals: Vec<String> = outcome.terminals().map(describe_terminal).collect();
        writeln!(text, "  reduction terminals: {}", terminals.join("; ")).unwrap();
    }
    Ok(j)
}

fn classify_coregular(q: &QuiverSetting, text: &mut String) -> Result<Value, Failure> {
    let verdict = is_coregular(q)?;
    writeln!(text, "coregular: {}", verdict.answer).unwrap();
    let mut j = json!({ "answer": verdict.answer, "certificate": to_json(&verdict.certificate) });
    if let quiver_ci::classify::Certificate::Reduction(outcome) = &verdict.certificate {
        let terminals: Vec<String> = outcome.terminals().map(describe_terminal).collect();
        writeln!(text, "  reduction terminals: {}", terminals.join("; ")).unwrap();
    }
    if !verdict.answer {
        let obstruction = coregular_obstruction(q)?;
        match &obstruction {
            ObstructionOutcome::Witness(w) => {
                writeln!(text, "  witness: descendant {}", w.target).unwrap();
                text.push_str(&indent(&witness_text(w), "  "));
            }
            ObstructionOutcome::Inconclusive { reason } => {
                writeln!(text, "  witness: not constructed ({reason})").unwrap();
            }
            ObstructionOutcome::NoObstruction => {
                return Err(Error::Inconsistent("non-coregular setting without an obstruction".into()).into());
            }
        }
        j["witness"] = to_json(&obstruction);
    }
    Ok(j)
}

fn classify(global: &Global, file: &Path, ci: bool, coregular: bool, targets: &[TargetName]) -> CmdResult {
    let q = load(file)?;
    write_dot(global, &q)?;
    let explicit = ci || coregular || !targets.is_empty();
    let mut text = String::new();
    let mut j = json!({});
    let mut code = EXIT_OK;
    if ci || (!explicit && q.is_unit()) {
        j["ci"] = classify_ci(&q, &mut text)?;
    }
    if coregular || !explicit {
        j["coregular"] = classify_coregular(&q, &mut text)?;
    }
    if !targets.is_empty() {
        let out = find_forbidden_descendant(&q, targets, &descendant_options(global, 4))?;
        let (t, c) = search_text(&out, targets);
        text.push_str(&t);
        code = c;
        j["descendants"] = to_json(&out);
    }
    Ok(Output { text, json: j, code })
}

fn reduce(global: &Global, file: &Path, trace: bool, no_riv: bool) -> CmdResult {
    let q = load(file)?;
    let opts = if no_riv {
        ReduceOptions::invariant_ring()
    } else {
        ReduceOptions::default()
    };
    let outcome = reduce_with(&q, &opts)?;
    if let Some(dir) = &global.dot {
        write_step_dots(dir, &q, &outcome)?;
    }
    let mut text = String::new();
    let many = outcome.factors.len() > 1;
    for (i, factor) in outcome.factors.iter().enumerate() {
        let pad = if many { "  " } else { "" };
        if many {
            writeln!(text, "factor {}:", i + 1).unwrap();
        }
        if trace {
            text.push_str(&indent(&factor.trace.to_text(), pad));
        }
        if factor.terminal.is_point() {
            writeln!(text, "{pad}terminal: point").unwrap();
        } else {
            writeln!(text, "{pad}terminal: {}", describe_terminal(&factor.terminal)).unwrap();
            text.push_str(&indent(&factor.terminal.to_string(), &format!("{pad}  ")));
        }
    }
    writeln!(text, "free variables: {}", outcome.free_vars).unwrap();
    Ok(Output::verdict(text, to_json(&outcome)))
}

fn write_step_dots(dir: &Path, q: &QuiverSetting, outcome: &ReductionOutcome) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    write_file(&dir.join("input.dot"), &to_dot(q, "input"))?;
    for (i, factor) in outcome.factors.iter().enumerate() {
        for (k, step) in factor.trace.steps().iter().enumerate() {
            let name = format!("factor{}_step{:03}", i + 1, k + 1);
            write_file(&dir.join(format!("{name}.dot")), &to_dot(&step.after, &name))?;
        }
    }
    Ok(())
}

fn cycles(global: &Global, file: &Path, list: bool) -> CmdResult {
    let q = load(file)?;
    write_dot(global, &q)?;
    let cycles = primitive_cycles(&q)?;
    let f = match f_value(&q) {
        Ok(f) => Some(f),
        Err(Error::Domain(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let f_text = f.map_or_else(|| "undefined (needs a strongly connected one-dimensional setting)".into(), |f| f.to_string());
    let mut text = format!("primitive cycles: {}, F(Q): {f_text}\n", cycles.len());
    if list {
        for c in &cycles {
            writeln!(text, "  {c}").unwrap();
        }
    }
    let j = json!({ "count": cycles.len(), "f": f, "cycles": to_json(&cycles) });
    Ok(Output::verdict(text, j))
}

fn generators(global: &Global, file: &Path) -> CmdResult {
    let q = load(file)?;
    write_dot(global, &q)?;
    let report = min_generators(&q)?;
    let mut text = format!("primitive cycles: {}\n", report.cycle_count);
    for entry in report.per_multiset.iter().filter(|e| e.e_value > 0) {
        writeln!(
            text,
            "  U = {}: E = {}, {} strong partitions, weak cycle {}",
            entry.multiset.describe(&q),
            entry.e_value,
            entry.strong_partitions,
            if entry.has_weak_partition { "yes" } else { "no" }
        )
        .unwrap();
    }
    writeln!(text, "minimal generators: {}", report.total).unwrap();
    for g in &report.generators {
        writeln!(text, "  {} - {}", g.lhs, g.rhs).unwrap();
    }
    Ok(Output::verdict(text, to_json(&report)))
}

fn corpus_run(global: &Global, properties: &[Property], count: Option<u64>, out: &Path) -> CmdResult {
    let chosen: Vec<Property> = if properties.is_empty() {
        ALL_PROPERTIES.to_vec()
    } else {
        properties.to_vec()
    };
    let mut text = String::new();
    let mut reports = Vec::new();
    let mut code = EXIT_OK;
    for p in chosen {
        let mut cfg = p.default_config();
        let start = global.seed.unwrap_or(cfg.seeds.start);
        let len = count.unwrap_or(cfg.seeds.end - cfg.seeds.start);
        cfg.seeds = start..start.saturating_add(len);
        if let Some(b) = global.budget {
            cfg.budget = b;
        }
        let report = corpus::run(p, &cfg);
        let verdict = if report.ok() { "PASS" } else { "FAIL" };
        writeln!(
            text,
            "{verdict} {p}: {} checked, {} passed, {} failed, {} inconclusive",
            report.checked, report.passed, report.failed, report.inconclusive
        )
        .unwrap();
        if let Some(c) = &report.first_failure {
            let path = out.join(format!("{p}-seed{}.qv", c.seed));
            write_file(&path, &c.setting)?;
            writeln!(text, "  seed {}: {}", c.seed, c.message).unwrap();
            writeln!(text, "  counterexample: {}", path.display()).unwrap();
            writeln!(text, "  reproduce: {}", c.reproduce).unwrap();
            code = EXIT_ERROR;
        }
        reports.push(report);
    }
    Ok(Output {
        text,
        json: to_json(&reports),
        code,
    })
}

fn dispatch(cli: &Cli) -> CmdResult {
    let g = &cli.global;
    match &cli.command {
        Command::Parse { file } => setting_output(g, &load(file)?),
        Command::Classify {
            file,
            ci,
            coregular,
            descendants,
        } => classify(g, file, *ci, *coregular, descendants),
        Command::Reduce { file, trace, no_riv } => reduce(g, file, *trace, *no_riv),
        Command::Cycles { file, list } => cycles(g, file, *list),
        Command::Generators { file } => generators(g, file),
        Command::Glue { file, vertices } => setting_output(g, &glue_subquiver(&load(file)?, vertices)?),
        Command::Local { file, decomposition } => {
            let q = load(file)?;
            let src = fs::read_to_string(decomposition)
                .map_err(|e| Failure::Io(format!("{}: {e}", decomposition.display())))?;
            let d = Decomposition::parse(&src).map_err(|e| Failure::Core(e, Some(decomposition.clone())))?;
            setting_output(g, &local_quiver(&q, &d)?)
        }
        Command::Descendants {
            file,
            targets,
            max_glue,
        } => {
            let q = load(file)?;
            write_dot(g, &q)?;
            let out = find_forbidden_descendant(&q, targets, &descendant_options(g, *max_glue))?;
            let (text, code) = search_text(&out, targets);
            Ok(Output {
                text,
                json: to_json(&out),
                code,
            })
        }
        Command::Random {
            vertices,
            arrows,
            strongly_connected,
            reduced,
            max_dim,
        } => {
            let mut c = if *reduced {
                Constraints::reduced()
            } else if *strongly_connected {
                Constraints::strongly_connected()
            } else {
                Constraints::default()
            };
            if *max_dim > 1 {
                c.dims = DimSpec::UpTo(*max_dim);
            }
            setting_output(g, &random_setting(g.seed.unwrap_or(0), *vertices, *arrows, &c)?)
        }
        Command::Dot { file } => {
            let q = load(file)?;
            let dot = to_dot(&q, "Q");
            match &g.dot {
                Some(path) => {
                    write_file(path, &dot)?;
                    Ok(Output::verdict(String::new(), json!({ "written": path.display().to_string() })))
                }
                None => Ok(Output::verdict(dot.clone(), json!({ "dot": dot }))),
            }
        }
        Command::Corpus { property, count, out } => corpus_run(g, property, *count, out),
    }
}

/// Runs `qv` with `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(o) => {
            let printed = if cli.global.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&o.json).expect("valid json"))
            } else {
                write!(out, "{}", o.text)
            };
            if printed.is_err() {
                return EXIT_ERROR;
            }
            o.code
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
        Err(Failure::Core(e, file)) => {
            let _ = match (&e, file) {
                (Error::Parse { line, column, message }, Some(f)) => {
                    writeln!(err, "error: {}:{line}:{column}: {message}", f.display())
                }
                _ => writeln!(err, "error: {e}"),
            };
            match e {
                Error::Resource { .. } => EXIT_INCONCLUSIVE,
                _ => EXIT_ERROR,
            }
        }
    }
}

use std::fs;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lgs_core::checker::{check_all, explore, prepare, simulate, Choice, ExploreOptions, Verdict};
use lgs_core::contracts::{
    assign_facets, compose, contract_queries, layered_verify, parse_contract, ComposeError, Facet,
    SYSTEM_CONTRACT,
};
use lgs_core::models::{
    assemble_with_fault, extension_schedule, retraction_schedule, FaultSpec, TimingTable,
};
use lgs_core::pml::{parse_pml, translate_network};
use lgs_core::props::{compile_property, parse_document, suite, PropertyFile};
use lgs_core::report::{
    reachable_trips, render_status, render_trip, status, verdict_table, RunReport,
};
use lgs_core::ta::{
    network_to_dot, parse_network, print_network, validate_network, Network, System,
};

const BUILTIN: &str = "lgs";

#[derive(Parser)]
#[command(
    name = "lgs",
    version,
    about = "Landing gear timed-automata verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the assembled landing gear network.
    Model(ModelArgs),
    /// Check properties or a contract against a network.
    Check(CheckArgs),
    /// Run a seeded random or scheduled simulation.
    Simulate(SimulateArgs),
    /// Compose two contracts.
    Compose(ComposeArgs),
    /// Translate a Promela process into a network.
    Translate(TranslateArgs),
    /// Export a network's automata as DOT.
    Export(ExportArgs),
    /// Render the layered status of a saved `check --json` report.
    Report(ReportArgs),
}

#[derive(Args)]
struct Source {
    /// Network in text format; the built-in landing gear system when absent.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Stall a phase of the built-in system, e.g. `door:MovingHighDown@10`.
    #[arg(long)]
    fault: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Args)]
struct ModelArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    source: Source,
    /// Property file; the built-in suite when absent.
    #[arg(long)]
    props: Option<PathBuf>,
    /// Verify a contract layer by layer instead of a property list.
    #[arg(long, conflicts_with_all = ["props", "only"])]
    contracts: Option<PathBuf>,
    /// Only properties of this facet.
    #[arg(long)]
    layer: Option<Facet>,
    /// Only these properties (comma separated).
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    #[arg(long, default_value_t = 5_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    bound: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    #[arg(long)]
    json: bool,
    /// Print the timeline of every trace.
    #[arg(long)]
    timeline: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Extension,
    Retraction,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random steps after the schedule.
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Choices separated by `;`: `delay N`, an edge `aut.from->to` or a channel.
    #[arg(long, conflicts_with = "preset")]
    schedule: Option<String>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ComposeArgs {
    #[arg(long, num_args = 2, required = true)]
    contracts: Vec<PathBuf>,
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Consistency report in JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct TranslateArgs {
    #[arg(long)]
    promela: PathBuf,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    dot: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    report: PathBuf,
    #[arg(long)]
    json: bool,
}

fn color() -> bool {
    std::env::var("LGS_COLOR").map_or(true, |v| v != "0") && std::io::stdout().is_terminal()
}

/// Writes to stdout; a closed pipe ends output quietly.
fn say(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            say(text);
            Ok(())
        }
    }
}

fn load(source: &Source) -> Result<(String, Network)> {
    let (name, network) = match (&source.model, &source.fault) {
        (Some(_), Some(_)) => bail!("--fault applies to the built-in system only"),
        (Some(p), None) => {
            let n = parse_network(&read(p)?).with_context(|| format!("in {}", p.display()))?;
            (p.display().to_string(), n)
        }
        (None, fault) => {
            let fault: Option<FaultSpec> = fault.as_deref().map(str::parse).transpose()?;
            (
                BUILTIN.to_string(),
                assemble_with_fault(&TimingTable::nominal(), fault.as_ref())?,
            )
        }
    };
    let report = validate_network(&network);
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if !report.is_ok() {
        let errors: Vec<String> = report.errors.iter().map(ToString::to_string).collect();
        bail!("invalid network:\n  {}", errors.join("\n  "));
    }
    Ok((name, network))
}

fn cmd_model(a: ModelArgs) -> Result<ExitCode> {
    let (_, network) = load(&a.source)?;
    let text = match a.format {
        Format::Text => print_network(&network),
        Format::Json => serde_json::to_string_pretty(&network)? + "\n",
        Format::Dot => network_to_dot(&network),
    };
    emit(a.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn selected(library: &PropertyFile, a: &CheckArgs) -> Result<Vec<String>> {
    for name in &a.only {
        if library.property(name).is_none() {
            bail!("no property `{name}`");
        }
    }
    Ok(library
        .properties()
        .filter(|p| a.layer.is_none_or(|f| p.facet == Some(f)))
        .filter(|p| a.only.is_empty() || a.only.iter().any(|n| n.eq_ignore_ascii_case(&p.name)))
        .map(|p| p.name.clone())
        .collect())
}

fn run_check(a: &CheckArgs) -> Result<RunReport> {
    let (model, network) = load(&a.source)?;
    let mut sys = System::new(&network).map_err(|e| anyhow::anyhow!("{e}"))?;
    let opts = ExploreOptions {
        bound: a.bound as usize,
        workers: a.workers as usize,
    };
    let mut library = match &a.props {
        Some(p) => parse_document(&read(p)?).with_context(|| format!("in {}", p.display()))?,
        None => suite(),
    };
    assign_facets(&mut library, &parse_contract(SYSTEM_CONTRACT)?);
    let (graph, verdicts, layers) = match &a.contracts {
        Some(path) => {
            let c =
                parse_contract(&read(path)?).with_context(|| format!("in {}", path.display()))?;
            let qs = contract_queries(&c, &library, &sys);
            prepare(&mut sys, &qs);
            let g = explore(&sys, opts);
            let mut report = layered_verify(&sys, &g, &c, &library);
            if let Some(f) = a.layer {
                report.layers.retain(|l| l.facet == f);
                report.stopped_at = report.layers.iter().find(|l| !l.passed).map(|l| l.facet);
            }
            (g, Vec::new(), Some(report))
        }
        None => {
            let names = selected(&library, a)?;
            let qs = names
                .iter()
                .map(|n| compile_property(library.property(n).unwrap(), &sys))
                .collect::<Result<Vec<_>, _>>()?;
            let (g, vs) = check_all(&mut sys, &qs, opts);
            (g, vs, None)
        }
    };
    let trips = if a.source.model.is_none() {
        reachable_trips(&sys, &graph)
    } else {
        Vec::new()
    };
    Ok(RunReport {
        model,
        fault: a.source.fault.clone(),
        states: graph.len(),
        transitions: graph.transitions(),
        depth: graph.depth,
        truncated: graph.truncated,
        verdicts,
        layers,
        trips,
    })
}

fn all_verdicts(r: &RunReport) -> Vec<Verdict> {
    let layered = r
        .layers
        .iter()
        .flat_map(|l| l.layers.iter().flat_map(|x| x.verdicts.iter()));
    r.verdicts.iter().chain(layered).cloned().collect()
}

fn cmd_check(a: CheckArgs) -> Result<ExitCode> {
    let report = run_check(&a)?;
    if a.json {
        say(&format!("{}\n", serde_json::to_string_pretty(&report)?));
    } else {
        let color = color();
        say(&format!(
            "{}: {} states, {} transitions, depth {}{}\n",
            report.model,
            report.states,
            report.transitions,
            report.depth,
            if report.truncated { " (truncated)" } else { "" }
        ));
        let verdicts = all_verdicts(&report);
        say(&verdict_table(&verdicts, color));
        if a.timeline {
            for v in verdicts.iter().filter(|v| v.trace.is_some()) {
                say(&format!(
                    "\n{} ({}):\n{}\n",
                    v.property,
                    v.result,
                    v.trace.as_ref().unwrap().timeline()
                ));
            }
        }
        if let Some(l) = &report.layers {
            say(&format!(
                "stopped_at={}\n",
                l.stopped_at.map_or("none", Facet::name)
            ));
        }
        for t in &report.trips {
            say(&format!("trip: {}\n", render_trip(t)));
        }
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn schedule(a: &SimulateArgs) -> Result<Vec<Choice>> {
    let t = TimingTable::nominal();
    Ok(match (&a.schedule, a.preset) {
        (Some(s), _) => s
            .split(';')
            .filter(|c| !c.trim().is_empty())
            .map(|c| c.parse().map_err(anyhow::Error::msg))
            .collect::<Result<_>>()?,
        (None, Some(Preset::Extension)) => extension_schedule(&t),
        (None, Some(Preset::Retraction)) => retraction_schedule(&t),
        (None, None) => Vec::new(),
    })
}

fn cmd_simulate(a: SimulateArgs) -> Result<ExitCode> {
    let (_, network) = load(&a.source)?;
    let sys = System::new(&network).map_err(|e| anyhow::anyhow!("{e}"))?;
    let trace = simulate(&sys, a.steps, a.seed, &schedule(&a)?)?;
    if a.json {
        say(&format!("{}\n", serde_json::to_string_pretty(&trace)?));
    } else {
        say(&trace.timeline());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_compose(a: ComposeArgs) -> Result<ExitCode> {
    let parse =
        |p: &PathBuf| parse_contract(&read(p)?).with_context(|| format!("in {}", p.display()));
    let (c1, c2) = (parse(&a.contracts[0])?, parse(&a.contracts[1])?);
    let (reports, code) = match compose(&c1, &c2, &suite()) {
        Ok(comp) => {
            emit(a.out.as_deref(), &comp.contract.to_string())?;
            (comp.reports, ExitCode::SUCCESS)
        }
        Err(ComposeError::Inconsistent { reports }) => {
            for r in reports.iter().filter(|r| !r.ok) {
                eprintln!(
                    "inconsistent {} guarantees on {}",
                    r.facet.name(),
                    r.shared.join(", ")
                );
            }
            (reports, ExitCode::from(1))
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(p) = &a.report {
        emit(Some(p), &(serde_json::to_string_pretty(&reports)? + "\n"))?;
    }
    Ok(code)
}

fn cmd_translate(a: TranslateArgs) -> Result<ExitCode> {
    let process =
        parse_pml(&read(&a.promela)?).with_context(|| format!("in {}", a.promela.display()))?;
    emit(
        a.out.as_deref(),
        &print_network(&translate_network(&process)),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_export(a: ExportArgs) -> Result<ExitCode> {
    let (_, network) = load(&a.source)?;
    emit(Some(&a.dot), &network_to_dot(&network))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_report(a: ReportArgs) -> Result<ExitCode> {
    let run: RunReport = serde_json::from_str(&read(&a.report)?)
        .with_context(|| format!("{} is not a check report", a.report.display()))?;
    let doc = status(&run);
    if a.json {
        say(&format!("{}\n", serde_json::to_string_pretty(&doc)?));
    } else {
        say(&render_status(&doc, color()));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Model(a) => cmd_model(a),
        Command::Check(a) => cmd_check(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Compose(a) => cmd_compose(a),
        Command::Translate(a) => cmd_translate(a),
        Command::Export(a) => cmd_export(a),
        Command::Report(a) => cmd_report(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}

//! `fairdiv`: one JSON document per run on stdout, diagnostics on stderr.
//!
//! Exit codes: 0 decided or succeeded, 1 negative decision, 2 usage or input
//! error, 3 budget exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use serde_json::{json, Value as Json};

use fairdiv_core::allocators::{allocate, Algorithm};
use fairdiv_core::chores_orient::{ef1_orient_graph, efx_orient_chores};
use fairdiv_core::dot::{export_dot, DotStyle};
use fairdiv_core::efx_multigraph::{efx_orient_bivalued, BiValuedGraph, BiValuedVerdict};
use fairdiv_core::fairness::{check, check_mms, holds, mms_thresholds};
use fairdiv_core::gadgets::{
    build_circuit_gadget, build_partition_selfloop_gadget, build_partition_triangle_gadget,
    Circuit, LoopVariant, PartitionSet,
};
use fairdiv_core::mms::{solve_mms, MmsVerdict};
use fairdiv_core::oracle::{
    brute_exists_allocation, search_orientation, OnExceed, Search, SearchBudget, DEFAULT_BUDGET,
};
use fairdiv_core::{
    graphical_to_instance, parse_rational, Allocation, Criterion, Error, Instance, Multigraph,
    Orientation, Rational,
};

#[derive(Parser)]
#[command(
    name = "fairdiv",
    version,
    about = "Exact fair division of indivisible items"
)]
struct Cli {
    /// Indent the JSON output and print a one-line summary on stderr.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate fairness criteria for an allocation.
    Check {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        allocation: PathBuf,
        /// Comma-separated: ef, prop, ef1, efx0, efx-, mms, po.
        #[arg(long, default_value = "ef,prop,ef1,efx0,efx-,mms,po")]
        criteria: String,
    },
    /// Run an allocation algorithm and report EF1.
    Allocate {
        #[arg(long, value_parser = parse_algo)]
        algo: Algorithm,
        #[arg(long)]
        instance: PathBuf,
        /// Agent order for round-robin, e.g. `1,0,2`.
        #[arg(long)]
        order: Option<String>,
    },
    /// MMS thresholds and an MMS allocation.
    Mms {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        thresholds_only: bool,
    },
    /// Orient a multigraph.
    Orient(OrientArgs),
    /// Generate a reduction gadget.
    Gadget {
        #[command(subcommand)]
        which: GadgetCommand,
    },
    /// Brute-force existence questions.
    Oracle(OracleArgs),
    /// Render a multigraph, optionally oriented, as Graphviz DOT.
    ExportDot {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        orientation: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = StyleArg::Plain)]
        style: StyleArg,
    },
}

#[derive(Args)]
struct OrientArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, conflicts_with = "goods")]
    chores: bool,
    #[arg(long)]
    goods: bool,
    #[arg(long, value_parser = parse_criterion)]
    criterion: Criterion,
    /// Heavy weight of a bi-valued graph; read off the edges when omitted.
    #[arg(long, value_parser = parse_rat, requires = "beta")]
    alpha: Option<Rational>,
    #[arg(long, value_parser = parse_rat, requires = "alpha")]
    beta: Option<Rational>,
    /// Also write the oriented graph as DOT to this path.
    #[arg(long)]
    emit_dot: Option<PathBuf>,
    /// States the fallback search may visit.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Subcommand)]
enum GadgetCommand {
    /// Bi-valued goods multigraph from a circuit in the text format.
    Circuit {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[arg(long, value_parser = parse_rat, default_value = "5")]
        alpha: Rational,
        #[arg(long, value_parser = parse_rat, default_value = "1")]
        beta: Rational,
        /// Write the multigraph here and print a summary instead.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Chores multigraph from a Partition set.
    Partition {
        /// Comma-separated positive integers.
        #[arg(long)]
        set: String,
        #[arg(long, value_enum)]
        variant: VariantArg,
        /// Picks the self-loop weight of the self-loop variant.
        #[arg(long, value_parser = parse_criterion, default_value = "ef1")]
        criterion: Criterion,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OracleArgs {
    #[arg(
        long,
        conflicts_with = "instance",
        required_unless_present = "instance"
    )]
    graph: Option<PathBuf>,
    #[arg(long)]
    instance: Option<PathBuf>,
    /// With --graph: ef1-orientation, efx0-orientation, ef-orientation or
    /// efx--orientation. With --instance: mms, ef1, efx0, efx-, ef or prop.
    #[arg(long)]
    exists: String,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum StyleArg {
    Plain,
    Paper,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Selfloop,
    Triangle,
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_criterion(s: &str) -> Result<Criterion, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_rat(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// A finished run: the JSON document, a summary line and the exit code.
struct Outcome {
    doc: Json,
    summary: String,
    code: u8,
}

impl Outcome {
    fn new(doc: Json, summary: impl Into<String>, code: u8) -> Self {
        Outcome {
            doc,
            summary: summary.into(),
            code,
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_instance(path: &Path) -> anyhow::Result<Instance> {
    Ok(Instance::from_json(&read(path)?)?)
}

fn load_graph(path: &Path) -> anyhow::Result<Multigraph> {
    Ok(Multigraph::from_json(&read(path)?)?)
}

fn to_json<T: serde::Serialize>(t: &T) -> Json {
    serde_json::to_value(t).expect("core types serialize")
}

fn budget(max_states: u64) -> anyhow::Result<SearchBudget> {
    Ok(SearchBudget::new(max_states, OnExceed::Unknown)?)
}

/// Exit code for a three-way decision.
fn decision_code(exists: Option<bool>) -> u8 {
    match exists {
        Some(true) => 0,
        Some(false) => 1,
        None => 3,
    }
}

fn run_check(instance: &Path, allocation: &Path, criteria: &str) -> anyhow::Result<Outcome> {
    let inst = load_instance(instance)?;
    let alloc = Allocation::from_json(&read(allocation)?)?;
    let crits = criteria
        .split(',')
        .map(str::parse)
        .collect::<Result<Vec<Criterion>, _>>()?;
    let reports = crits
        .iter()
        .map(|&c| check(&inst, &alloc, c))
        .collect::<Result<Vec<_>, _>>()?;
    let failing: Vec<String> = reports
        .iter()
        .filter(|r| !r.holds)
        .map(|r| r.criterion.to_string())
        .collect();
    let summary = if failing.is_empty() {
        "all criteria hold".into()
    } else {
        format!("fails {}", failing.join(", "))
    };
    Ok(Outcome::new(
        to_json(&reports),
        summary,
        u8::from(!failing.is_empty()),
    ))
}

fn run_allocate(algo: Algorithm, instance: &Path, order: Option<&str>) -> anyhow::Result<Outcome> {
    let inst = load_instance(instance)?;
    let order = order
        .map(|o| {
            o.split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()
        .context("--order takes comma-separated agent indices")?;
    let alloc = allocate(&inst, algo, order.as_deref())?;
    let report = check(&inst, &alloc, Criterion::Ef1)?;
    let summary = format!(
        "allocated; EF1 {}",
        if report.holds { "holds" } else { "fails" }
    );
    Ok(Outcome::new(
        json!({ "allocation": alloc, "report": report }),
        summary,
        0,
    ))
}

fn run_mms(instance: &Path, thresholds_only: bool) -> anyhow::Result<Outcome> {
    let inst = load_instance(instance)?;
    if thresholds_only {
        let t = mms_thresholds(&inst)?;
        let shown: Vec<String> = t.iter().map(fairdiv_core::format_rational).collect();
        return Ok(Outcome::new(
            json!({ "thresholds": shown }),
            format!("thresholds {}", shown.join(", ")),
            0,
        ));
    }
    let out = solve_mms(&inst)?;
    let code = match out.verdict {
        MmsVerdict::Found => 0,
        MmsVerdict::NoneExists => 1,
        MmsVerdict::Unknown => 3,
    };
    let summary = format!(
        "verdict {:?}, {} reduction steps",
        out.verdict,
        out.trail.len()
    );
    Ok(Outcome::new(to_json(&out), summary, code))
}

fn run_orient(a: &OrientArgs) -> anyhow::Result<Outcome> {
    let g = load_graph(&a.graph)?;
    let weights = || g.edges.iter().flat_map(|e| [&e.wa, &e.wb]);
    if a.chores && weights().any(|w| w.is_positive()) {
        bail!("--chores needs every edge weight to be at most zero");
    }
    if a.goods && weights().any(|w| w.is_negative()) {
        bail!("--goods needs every edge weight to be at least zero");
    }
    let search = |method: &str| -> anyhow::Result<(Option<bool>, Option<Orientation>, String)> {
        let r = search_orientation(&g, a.criterion, &budget(a.budget)?)?;
        Ok((r.exists(), r.into_option(), method.to_string()))
    };
    let mut extra = json!({});
    let (exists, orientation, method) = match (a.chores, a.criterion) {
        (true, Criterion::Ef1) => {
            let o = ef1_orient_graph(&g)?;
            (Some(o.is_some()), o, "ef1-chores".to_string())
        }
        (true, Criterion::Efx0) => {
            let o = efx_orient_chores(&g)?;
            (Some(o.is_some()), o, "efx0-chores".to_string())
        }
        (false, Criterion::Efx0) if a.goods && g.is_symmetric() => {
            let bg = match (&a.alpha, &a.beta) {
                (Some(al), Some(be)) => BiValuedGraph::new(g.clone(), al.clone(), be.clone()),
                _ => BiValuedGraph::infer(g.clone()),
            };
            match bg {
                Ok(bg) => {
                    let out = efx_orient_bivalued(&bg)?;
                    extra = json!({ "components": out.components });
                    match out.verdict {
                        BiValuedVerdict::Oriented => {
                            (Some(true), out.orientation, "bi-valued".to_string())
                        }
                        BiValuedVerdict::NtomBlocked => search("search after ntom")?,
                    }
                }
                Err(e) if a.alpha.is_some() => return Err(e.into()),
                Err(_) => search("search")?,
            }
        }
        _ => search("search")?,
    };
    if let (Some(path), Some(o)) = (&a.emit_dot, &orientation) {
        fs::write(path, export_dot(&g, Some(o), DotStyle::Paper)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let report = match &orientation {
        Some(o) => Some(check(
            &graphical_to_instance(&g),
            &o.to_allocation(&g)?,
            a.criterion,
        )?),
        None => None,
    };
    let mut doc =
        json!({ "exists": exists, "orientation": orientation, "method": method, "report": report });
    if let (Json::Object(d), Json::Object(x)) = (&mut doc, extra) {
        d.extend(x);
    }
    let summary = match exists {
        Some(true) => format!("{} orientation found", a.criterion),
        Some(false) => format!("no {} orientation", a.criterion),
        None => "search budget exhausted".into(),
    };
    Ok(Outcome::new(doc, summary, decision_code(exists)))
}

fn emit_graph(g: &Multigraph, output: Option<&Path>, meta: Json) -> anyhow::Result<Outcome> {
    let summary = format!("{} vertices, {} edges", g.vertices, g.edges.len());
    match output {
        None => Ok(Outcome::new(to_json(g), summary, 0)),
        Some(path) => {
            fs::write(path, g.to_json()).with_context(|| format!("writing {}", path.display()))?;
            let mut doc = json!({ "written": path.display().to_string(), "vertices": g.vertices, "edges": g.edges.len() });
            if let (Json::Object(d), Json::Object(m)) = (&mut doc, meta) {
                d.extend(m);
            }
            Ok(Outcome::new(doc, summary, 0))
        }
    }
}

fn run_gadget(which: &GadgetCommand) -> anyhow::Result<Outcome> {
    match which {
        GadgetCommand::Circuit {
            file,
            q,
            alpha,
            beta,
            output,
        } => {
            let c: Circuit = read(file)?.parse()?;
            let gd = build_circuit_gadget(&c, *q, alpha.clone(), beta.clone())?;
            let meta = json!({
                "alpha": fairdiv_core::format_rational(alpha),
                "beta": fairdiv_core::format_rational(beta),
                "variables": c.variables().iter().zip(&gd.variables).map(|(name, w)| json!({ "name": name, "wire": w })).collect::<Vec<_>>(),
                "output": gd.output,
                "colours": gd.colours,
            });
            emit_graph(&gd.graph.g, output.as_deref(), meta)
        }
        GadgetCommand::Partition {
            set,
            variant,
            criterion,
            output,
        } => {
            let s: PartitionSet = set.parse()?;
            let g = match variant {
                VariantArg::Triangle => build_partition_triangle_gadget(&s)?,
                VariantArg::Selfloop => {
                    let v = match criterion {
                        Criterion::Ef1 => LoopVariant::Ef1,
                        Criterion::Efx0 => LoopVariant::Efx0,
                        c => bail!("the self-loop gadget targets ef1 or efx0, not {c}"),
                    };
                    build_partition_selfloop_gadget(&s, v)?
                }
            };
            emit_graph(&g, output.as_deref(), json!({ "set": s.values }))
        }
    }
}

fn run_oracle(a: &OracleArgs) -> anyhow::Result<Outcome> {
    let b = budget(a.budget)?;
    if let Some(path) = &a.graph {
        let g = load_graph(path)?;
        let crit: Criterion = a
            .exists
            .strip_suffix("-orientation")
            .context("--graph questions end in -orientation, e.g. ef1-orientation")?
            .parse()?;
        let r = search_orientation(&g, crit, &b)?;
        let exists = r.exists();
        let summary = format!("{} orientation exists: {exists:?}", crit);
        return Ok(Outcome::new(
            json!({ "exists": exists, "orientation": r.into_option() }),
            summary,
            decision_code(exists),
        ));
    }
    let inst = load_instance(
        a.instance
            .as_deref()
            .expect("clap requires one of --graph and --instance"),
    )?;
    let crit: Criterion = a.exists.parse()?;
    let r: Search<Allocation> = match crit {
        Criterion::Mms => {
            let t = mms_thresholds(&inst)?;
            brute_exists_allocation(&inst, &b, |al| {
                let bundles = al
                    .index_bundles(&inst)
                    .expect("oracle allocations are well-formed");
                (0..inst.n).all(|i| inst.utility_of(i, &bundles[i]) >= t[i])
            })?
        }
        Criterion::Po => bail!("po is not an existence question"),
        c => {
            let mut failure = None;
            let r = brute_exists_allocation(&inst, &b, |al| match holds(&inst, al, c) {
                Ok(h) => h,
                Err(e) => {
                    failure.get_or_insert(e);
                    false
                }
            })?;
            if let Some(e) = failure {
                return Err(e.into());
            }
            r
        }
    };
    if let Search::Found(al) = &r {
        debug_assert!(
            crit != Criterion::Mms || check_mms(&inst, al).map(|r| r.holds).unwrap_or(false)
        );
    }
    let exists = r.exists();
    let summary = format!("{crit} allocation exists: {exists:?}");
    Ok(Outcome::new(
        json!({ "exists": exists, "allocation": r.into_option() }),
        summary,
        decision_code(exists),
    ))
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Check {
            instance,
            allocation,
            criteria,
        } => run_check(instance, allocation, criteria),
        Command::Allocate {
            algo,
            instance,
            order,
        } => run_allocate(*algo, instance, order.as_deref()),
        Command::Mms {
            instance,
            thresholds_only,
        } => run_mms(instance, *thresholds_only),
        Command::Orient(a) => run_orient(a),
        Command::Gadget { which } => run_gadget(which),
        Command::Oracle(a) => run_oracle(a),
        Command::ExportDot { .. } => unreachable!("export-dot prints DOT and is handled in main"),
    }
}

fn export(graph: &Path, orientation: Option<&Path>, style: StyleArg) -> anyhow::Result<String> {
    let g = load_graph(graph)?;
    let pi = orientation
        .map(|p| read(p).and_then(|t| Ok(Orientation::from_json(&t)?)))
        .transpose()?;
    let style = match style {
        StyleArg::Plain => DotStyle::Plain,
        StyleArg::Paper => DotStyle::Paper,
    };
    Ok(export_dot(&g, pi.as_ref(), style)?)
}

fn failure_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded(_)) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::ExportDot {
        graph,
        orientation,
        style,
    } = &cli.command
    {
        return match export(graph, orientation.as_deref(), *style) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(failure_code(&e))
            }
        };
    }
    match run(&cli) {
        Ok(out) => {
            let text = if cli.pretty {
                serde_json::to_string_pretty(&out.doc)
            } else {
                serde_json::to_string(&out.doc)
            };
            println!("{}", text.expect("JSON values serialize"));
            if cli.pretty {
                eprintln!("{}", out.summary);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(failure_code(&e))
        }
    }
}

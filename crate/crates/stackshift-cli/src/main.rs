//! Command-line interface: every subcommand is a thin wrapper around the
//! library, reads specs from a file or standard input (`-f -`), and writes
//! machine-readable JSON with sorted keys (DOT text for `dot`).
//!
//! Exit codes: 0 success, 1 validation or IO failure (one-line JSON on
//! standard error), 2 usage errors.

use std::collections::BTreeMap;
use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use stackshift::engine;
use stackshift::examples;
use stackshift::graph::{export_dot, load_graph, DirectedGraph};
use stackshift::ids::Symbol;
use stackshift::recode;
use stackshift::semigroup::{semigroup_reduce, SemigroupElement, SignedEdge};
use stackshift::separation;
use stackshift::sofic;
use stackshift::spec::{load_spec, save_spec, validate, AutomatonSpec};

#[derive(Parser)]
#[command(name = "stackshift", version, about = "Pushdown presentations of Dyck-like subshifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArg {
    /// Spec JSON file; `-` reads standard input
    #[arg(short = 'f', long = "file")]
    file: String,
}

#[derive(Subcommand)]
enum Command {
    /// Check conditions (a), (b), (c) and hypothesis (h); exit 0 iff
    /// (a), (b) and (c) hold
    Validate {
        #[command(flatten)]
        spec: SpecArg,
    },
    /// Enumerate all admissible words of length at most N
    Words {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(short = 'n', long = "length")]
        n: usize,
    },
    /// Count admissible words by length up to N
    Count {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(short = 'n', long = "length")]
        n: usize,
    },
    /// Decide membership of a comma-separated word
    Member {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(short = 'w', long = "word")]
        word: String,
    },
    /// Test strong connectedness (per stack root), with a witness
    Connected {
        #[command(flatten)]
        spec: SpecArg,
    },
    /// Report the visibility constants, projection hypothesis,
    /// hypothesis (h) and discordance
    Hypotheses {
        #[command(flatten)]
        spec: SpecArg,
        /// Bound for the visibility-constant search
        #[arg(long, default_value_t = 16)]
        cap: usize,
    },
    /// Decide forward separation
    Separated {
        #[command(flatten)]
        spec: SpecArg,
        /// Bound for the visibility-constant search
        #[arg(long, default_value_t = 16)]
        cap: usize,
        /// Cross-check the verdict against the brute-force oracle on
        /// boundary pairs, with this witness length bound
        #[arg(long)]
        brute: Option<usize>,
        /// Include shortest-word diagnostics of the pair system
        #[arg(long)]
        diagnostics: bool,
    },
    /// Search for the resolving radius and emit the recoded spec
    Recode {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 8)]
        cap: usize,
    },
    /// Export finite-type-Dyck data (push paths of length at most 1)
    ExportFtd {
        #[command(flatten)]
        spec: SpecArg,
    },
    /// Reduce a word of signed edge symbols in the graph inverse semigroup
    /// of the spec's stack graph
    Semigroup {
        #[command(flatten)]
        spec: SpecArg,
        /// Comma-separated signed edge symbols, e.g. e1-,e1+
        #[arg(short = 'w', long = "word")]
        word: String,
    },
    /// Emit a family spec as JSON
    Example {
        #[command(subcommand)]
        family: Family,
    },
    /// Render a DOT view of the spec
    Dot {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, value_enum)]
        what: DotView,
        /// Stack depth bound for the automaton view
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
}

#[derive(Subcommand)]
enum Family {
    /// Dyck automaton on N bracket pairs
    Dyck {
        #[arg(long)]
        n: usize,
    },
    /// Product-style automaton over a control graph and M stack loops
    Product {
        /// Control graph JSON; defaults to the golden-mean graph
        #[arg(short = 'g', long = "graph")]
        graph: Option<String>,
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
    /// Béal-Heller automaton with per-key arities
    BealHeller {
        /// Comma-separated key=arity pairs, e.g. K=2 or K=1,L=1
        #[arg(long = "I", value_name = "ARITIES")]
        arities: String,
    },
    /// The two-control automaton with states not directly accessible
    /// from infinity
    Ex84,
    /// Markov-Dyck automaton of a graph
    MarkovDyck {
        /// Stack graph JSON; defaults to the golden-mean graph
        #[arg(short = 'g', long = "graph")]
        graph: Option<String>,
    },
    /// Markov-Dyck construction combined with a control walk
    Combined {
        /// Stack graph JSON; defaults to the golden-mean graph
        #[arg(short = 'g', long = "graph")]
        graph: Option<String>,
        /// Control graph JSON; defaults to the golden-mean graph
        #[arg(long = "aux")]
        aux: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DotView {
    /// The pop presentation
    Y,
    /// The boundary summary graph
    Summary,
    /// The automaton truncated to a stack depth
    Automaton,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn read_spec(arg: &SpecArg) -> Result<AutomatonSpec, Failure> {
    Ok(load_spec(&read_input(&arg.file)?)?)
}

fn read_graph_or_golden_mean(path: &Option<String>) -> Result<DirectedGraph, Failure> {
    match path {
        Some(p) => Ok(load_graph(&read_input(p)?)?),
        None => Ok(examples::golden_mean()),
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), Failure> {
    let value = serde_json::to_value(value)?;
    println!("{}", serde_json::to_string_pretty(&value)?);
    Ok(())
}

fn split_word(text: &str) -> Vec<Symbol> {
    if text.is_empty() {
        Vec::new()
    } else {
        text.split(',').map(Symbol::new).collect()
    }
}

fn parse_arities(text: &str) -> Result<BTreeMap<String, usize>, Failure> {
    let mut out = BTreeMap::new();
    for part in text.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Failure(format!("bad arity entry {part:?}, expected key=count")))?;
        let value: usize = value
            .parse()
            .map_err(|_| Failure(format!("bad arity count in {part:?}")))?;
        out.insert(key.to_owned(), value);
    }
    Ok(out)
}

fn constants(spec: &AutomatonSpec, cap: usize) -> Result<sofic::VisibilityConstants, Failure> {
    sofic::visibility_constants(spec, cap)
        .found()
        .ok_or_else(|| Failure(format!("visibility constants not found below cap {cap}")))
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Validate { spec } => {
            let spec = read_spec(&spec)?;
            let report = validate(&spec);
            print_json(&report)?;
            Ok(if report.conditions_hold() { 0 } else { 1 })
        }
        Command::Words { spec, n } => {
            let spec = read_spec(&spec)?;
            let words = engine::enumerate_language(&spec, n)?;
            print_json(&words)?;
            Ok(0)
        }
        Command::Count { spec, n } => {
            let spec = read_spec(&spec)?;
            print_json(&engine::count_words(&spec, n)?)?;
            Ok(0)
        }
        Command::Member { spec, word } => {
            let spec = read_spec(&spec)?;
            let member = engine::member(&spec, &split_word(&word))?;
            print_json(&json!({ "member": member }))?;
            Ok(0)
        }
        Command::Connected { spec } => {
            let spec = read_spec(&spec)?;
            let report = engine::strongly_connected(&spec);
            print_json(&report)?;
            Ok(0)
        }
        Command::Hypotheses { spec, cap } => {
            let spec = read_spec(&spec)?;
            let report = validate(&spec);
            print_json(&json!({
                "visibility": sofic::visibility_constants(&spec, cap),
                "projection_hypothesis": sofic::test_projection_hypothesis(&spec),
                "hypothesis_h": report.hypothesis_h,
                "discordance": report.condition_b,
            }))?;
            Ok(0)
        }
        Command::Separated {
            spec,
            cap,
            brute,
            diagnostics,
        } => {
            let spec = read_spec(&spec)?;
            let consts = constants(&spec, cap)?;
            let verdict = separation::decide_forward_separated(&spec, &consts)?;
            if let Some(limit) = brute {
                cross_check(&spec, &verdict, limit)?;
            }
            if diagnostics {
                print_json(&json!({
                    "verdict": verdict,
                    "diagnostics": separation::pair_diagnostics(&spec, &consts),
                }))?;
            } else {
                print_json(&verdict)?;
            }
            Ok(0)
        }
        Command::Recode { spec, cap } => {
            let spec = read_spec(&spec)?;
            let search = recode::resolving_radius(&spec, cap);
            let found = search.found().is_some();
            print_json(&json!({
                "report": search,
                "recoded": serde_json::from_str::<serde_json::Value>(
                    &save_spec(&recode::recode_spec(&spec))
                )?,
            }))?;
            Ok(if found { 0 } else { 1 })
        }
        Command::ExportFtd { spec } => {
            let spec = read_spec(&spec)?;
            print_json(&recode::export_finite_type_dyck(&spec)?)?;
            Ok(0)
        }
        Command::Semigroup { spec, word } => {
            let spec = read_spec(&spec)?;
            let signed: Vec<SignedEdge> = split_word(&word)
                .iter()
                .map(SignedEdge::parse_symbol)
                .collect::<Result<_, _>>()?;
            let element = semigroup_reduce(spec.base(), &signed)?;
            let value = match &element {
                SemigroupElement::Zero => json!({ "result": "zero" }),
                SemigroupElement::NormalForm {
                    minus,
                    plus,
                    anchor,
                } => json!({
                    "result": "nonzero",
                    "normal_form": element.to_string(),
                    "minus": minus,
                    "plus": plus,
                    "anchor": anchor,
                }),
            };
            print_json(&value)?;
            Ok(0)
        }
        Command::Example { family } => {
            let spec = match family {
                Family::Dyck { n } => examples::build_dyck(n)?,
                Family::Product { graph, m } => {
                    examples::build_product(&read_graph_or_golden_mean(&graph)?, m)?
                }
                Family::BealHeller { arities } => {
                    examples::build_beal_heller(&parse_arities(&arities)?)?
                }
                Family::Ex84 => examples::build_example_84(),
                Family::MarkovDyck { graph } => {
                    examples::build_markov_dyck(&read_graph_or_golden_mean(&graph)?)?
                }
                Family::Combined { graph, aux } => examples::build_combined(
                    &read_graph_or_golden_mean(&graph)?,
                    &read_graph_or_golden_mean(&aux)?,
                )?,
            };
            println!("{}", save_spec(&spec));
            Ok(0)
        }
        Command::Dot { spec, what, depth } => {
            let spec = read_spec(&spec)?;
            let graph = match what {
                DotView::Y => sofic::build_y_presentation(&spec).graph,
                DotView::Summary => engine::boundary_summary_graph(&spec),
                DotView::Automaton => engine::automaton_view(&spec, depth),
            };
            print!("{}", export_dot(&graph));
            Ok(0)
        }
    }
}

/// Compares the separation verdict against the brute-force oracle on
/// boundary control pairs: a separated verdict needs a witness for every
/// distinct pair, a failing pair must have none.
fn cross_check(
    spec: &AutomatonSpec,
    verdict: &separation::SeparationVerdict,
    limit: usize,
) -> Result<(), Failure> {
    use engine::PdaState;
    match &verdict.failing_pair {
        Some((u, v)) => {
            let witness = separation::brute_force_separable(
                spec,
                &PdaState::boundary(u.clone()),
                &PdaState::boundary(v.clone()),
                limit,
            )?;
            if let Some(w) = witness {
                return Err(Failure(format!(
                    "verdict says not separated but brute force found witness {w:?}"
                )));
            }
        }
        None => {
            let controls: Vec<_> = spec.controls().cloned().collect();
            for (i, u) in controls.iter().enumerate() {
                for v in &controls[i + 1..] {
                    let witness = separation::brute_force_separable(
                        spec,
                        &PdaState::boundary(u.clone()),
                        &PdaState::boundary(v.clone()),
                        limit,
                    )?;
                    if witness.is_none() {
                        return Err(Failure(format!(
                            "verdict says separated but brute force found no witness \
                             for ({u}, {v}) within {limit}"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(message)) => {
            eprintln!("{}", json!({ "error": message }));
            ExitCode::from(1)
        }
    }
}

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use locdom_core::edgelist;
use locdom_core::generators::{generate, Family, GenSpec};
use locdom_core::graph::{Graph, VertexId};
use locdom_core::harness::{
    self, reverify_record, verify_result, Manifest, Verification, DEFAULT_ORACLE_BUDGET,
    DEFAULT_ORACLE_LIMIT,
};
use locdom_core::mds::{self, Config, DsResult, KvRefresh, Phase2Rule};
use locdom_core::minor::has_k_t3_depth1_minor;
use locdom_core::oracle::{exact_mds, OracleError};

/// Exit status for failed checks.
const CHECK_FAILED: u8 = 2;

#[derive(Parser)]
#[command(name = "locdom", version, about = "Local dominating set approximation toolkit")]
struct Cli {
    /// Worker threads (0 uses every core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Max,
    Fo,
}

#[derive(Clone, Copy, ValueEnum)]
enum Refresh {
    Once,
    Every,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Grid,
    Cycle,
    Triangulation,
    Torus,
    Handles,
    SubdividedK33,
    Star,
    Complete,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as an edge list.
    Generate {
        family: FamilyName,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        rows: Option<u64>,
        #[arg(long)]
        cols: Option<u64>,
        /// Number of K_{3,3} handles.
        #[arg(long)]
        h: Option<u64>,
        #[arg(long)]
        subdiv: Option<u64>,
        #[arg(long)]
        leaves: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Apply a random ID permutation drawn from this seed.
        #[arg(long)]
        shuffle_ids: Option<u64>,
        /// Output file (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the local algorithm and print the result as JSON.
    Solve {
        graph: PathBuf,
        #[arg(long)]
        c: Option<u64>,
        /// Genus bound; defaults to the edge-list header, else 0.
        #[arg(long)]
        genus: Option<u64>,
        #[arg(long)]
        t: Option<u64>,
        #[arg(long, value_enum, default_value = "max")]
        rule: Rule,
        #[arg(long, value_enum, default_value = "once")]
        kv_refresh: Refresh,
    },
    /// Exact minimum dominating set.
    Oracle {
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
        budget: u64,
    },
    /// Search for a depth-1 K_{t,3} minor.
    CheckMinor {
        graph: PathBuf,
        #[arg(long, default_value_t = 3)]
        t: usize,
    },
    /// Run a corpus manifest and write CSV and JSONL records.
    Experiment {
        manifest: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        jsonl: Option<PathBuf>,
        /// Added to every seed in the manifest.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        oracle_limit: Option<usize>,
    },
    /// Check a solve result against its graph, or re-check JSONL records.
    Verify {
        /// Result JSON produced by `solve`.
        #[arg(required_unless_present = "records")]
        result: Option<PathBuf>,
        #[arg(required_unless_present = "records")]
        graph: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["result", "graph"])]
        records: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
        oracle_limit: usize,
    },
}

#[derive(Serialize, Deserialize)]
struct SolveOutput {
    is_dominating: bool,
    size: usize,
    rounds: usize,
    dominating_set: Vec<VertexId>,
    #[serde(flatten)]
    result: DsResult,
}

#[derive(Serialize)]
struct MinorOutput {
    t: usize,
    present: bool,
    model: Option<locdom_core::minor::MinorModel>,
}

fn read_graph(path: &Path) -> Result<edgelist::EdgeList> {
    edgelist::read(path).with_context(|| format!("reading {}", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn need(v: Option<u64>, name: &str) -> Result<u64> {
    v.with_context(|| format!("--{name} is required for this family"))
}

#[allow(clippy::too_many_arguments)]
fn family(
    name: FamilyName,
    n: Option<u64>,
    rows: Option<u64>,
    cols: Option<u64>,
    h: Option<u64>,
    subdiv: Option<u64>,
    leaves: Option<u64>,
) -> Result<Family> {
    Ok(match name {
        FamilyName::Grid => Family::Grid {
            rows: need(rows, "rows")?,
            cols: need(cols, "cols")?,
        },
        FamilyName::Torus => Family::ToroidalGrid {
            rows: need(rows, "rows")?,
            cols: need(cols, "cols")?,
        },
        FamilyName::Cycle => Family::Cycle { n: need(n, "n")? },
        FamilyName::Triangulation => Family::RandomPlanarTriangulation { n: need(n, "n")? },
        FamilyName::Handles => Family::PlanarPlusK33Handles {
            n: need(n, "n")?,
            h: need(h, "h")?,
        },
        FamilyName::SubdividedK33 => Family::SubdividedK33 {
            subdiv: subdiv.unwrap_or(0),
        },
        FamilyName::Star => Family::Star {
            leaves: need(leaves, "leaves")?,
        },
        FamilyName::Complete => Family::Complete { n: need(n, "n")? },
    })
}

fn config(
    header_genus: Option<u64>,
    c: Option<u64>,
    genus: Option<u64>,
    t: Option<u64>,
    rule: Rule,
    refresh: Refresh,
) -> Config {
    let mut cfg = Config::for_genus(genus.or(header_genus).unwrap_or(0));
    if let Some(c) = c {
        cfg.c = c;
    }
    if let Some(t) = t {
        cfg.t = t;
    }
    cfg.phase2_rule = match rule {
        Rule::Max => Phase2Rule::MaxResidual,
        Rule::Fo => Phase2Rule::FirstOrderThreshold,
    };
    cfg.kv_refresh = match refresh {
        Refresh::Once => KvRefresh::Once,
        Refresh::Every => KvRefresh::EveryIteration,
    };
    cfg
}

fn gamma_if_small(g: &Graph, limit: usize) -> Result<Option<usize>> {
    if g.num_vertices() > limit {
        return Ok(None);
    }
    match exact_mds(g, DEFAULT_ORACLE_BUDGET) {
        Ok(o) => Ok(Some(o.gamma)),
        Err(OracleError::BudgetExhausted { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn verify_one(result: &Path, graph: &Path, oracle_limit: usize) -> Result<ExitCode> {
    let text = fs::read_to_string(result).with_context(|| format!("reading {}", result.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).context("parsing result JSON")?;
    let r: DsResult = serde_json::from_value(value.clone()).context("result JSON is not a solve result")?;
    let g = read_graph(graph)?.graph;
    let gamma = gamma_if_small(&g, oracle_limit)?;
    let mut v: Verification = verify_result(&g, &r, gamma);
    if let Some(listed) = value.get("dominating_set") {
        let listed: Vec<VertexId> = serde_json::from_value(listed.clone()).context("dominating_set")?;
        if listed != r.dominating_set() {
            v.problems.push("dominating_set differs from the union of the parts".into());
        }
        if !g.is_dominating_set(&listed).unwrap_or(false) {
            v.is_dominating = false;
        }
    }
    print_json(&v)?;
    Ok(if v.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(CHECK_FAILED)
    })
}

fn verify_records(path: &Path) -> Result<ExitCode> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let records = harness::read_jsonl(BufReader::new(file))?;
    let mut mismatched = 0;
    for r in &records {
        let diff = reverify_record(r).map_err(anyhow::Error::msg)?;
        if !diff.is_empty() {
            mismatched += 1;
            eprintln!(
                "{} {} seed={}: differs in {}",
                r.instance.family,
                r.instance.params,
                r.instance.seed,
                diff.join(", ")
            );
        }
    }
    let failed = records.iter().filter(|r| !r.passed()).count();
    eprintln!(
        "{} records re-checked, {mismatched} differ from the stored flags, {failed} record failures",
        records.len()
    );
    Ok(if mismatched == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(CHECK_FAILED)
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global()?;
    }
    match cli.command {
        Command::Generate {
            family: name,
            n,
            rows,
            cols,
            h,
            subdiv,
            leaves,
            seed,
            shuffle_ids,
            output,
        } => {
            let spec = GenSpec {
                family: family(name, n, rows, cols, h, subdiv, leaves)?,
                seed,
                shuffle_ids,
            };
            let gen = generate(&spec)?;
            let text = edgelist::write(&gen.graph, Some(gen.certified_genus));
            match output {
                Some(p) => fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
        }
        Command::Solve {
            graph,
            c,
            genus,
            t,
            rule,
            kv_refresh,
        } => {
            let el = read_graph(&graph)?;
            let cfg = config(el.genus, c, genus, t, rule, kv_refresh);
            let result = mds::solve(&el.graph, &cfg)?;
            let set = result.dominating_set();
            print_json(&SolveOutput {
                is_dominating: el.graph.is_dominating_set(&set)?,
                size: set.len(),
                rounds: result.rounds(),
                dominating_set: set,
                result,
            })?;
        }
        Command::Oracle { graph, budget } => {
            let g = read_graph(&graph)?.graph;
            match exact_mds(&g, budget) {
                Ok(o) => print_json(&o)?,
                Err(OracleError::BudgetExhausted { budget, best }) => {
                    bail!(
                        "search budget of {budget} nodes exhausted; best dominating set found has size {}",
                        best.len()
                    )
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::CheckMinor { graph, t } => {
            let g = read_graph(&graph)?.graph;
            let model = has_k_t3_depth1_minor(&g, t)?;
            print_json(&MinorOutput {
                t,
                present: model.is_some(),
                model,
            })?;
        }
        Command::Experiment {
            manifest,
            csv,
            jsonl,
            seed,
            oracle_limit,
        } => {
            let text = fs::read_to_string(&manifest).with_context(|| format!("reading {}", manifest.display()))?;
            let mut m = Manifest::from_json(&text)?;
            for e in &mut m.corpus {
                e.spec.seed = e.spec.seed.wrapping_add(seed);
            }
            if let Some(limit) = oracle_limit {
                m.oracle_limit = limit;
            }
            let records = harness::run_experiment(&m, cli.jobs)?;
            if let Some(p) = csv {
                harness::write_csv(BufWriter::new(File::create(&p)?), &records)?;
            }
            match jsonl {
                Some(p) => harness::write_jsonl(BufWriter::new(File::create(&p)?), &records)?,
                None => harness::write_jsonl(std::io::stdout().lock(), &records)?,
            }
            let failed = records.iter().filter(|r| !r.passed()).count();
            eprintln!("{} instances, {failed} with failures", records.len());
            if failed > 0 {
                return Ok(ExitCode::from(CHECK_FAILED));
            }
        }
        Command::Verify {
            result,
            graph,
            records,
            oracle_limit,
        } => {
            return match records {
                Some(p) => verify_records(&p),
                None => verify_one(&result.unwrap(), &graph.unwrap(), oracle_limit),
            };
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

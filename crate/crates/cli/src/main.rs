use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use teag_core::constructions::{cyc_ego, dup1_multigraph, dup1_simple, dupr_ego, dupr_ego_multigraph};
use teag_core::format::{read_graph, read_similarity_table, write_json};
use teag_core::graph::{PortAssignment, TypedMultigraph};
use teag_core::harness::{
    render_reports, reports_verdict, run_certificates, run_fuzz, run_necessity, run_sufficiency, table5_rows,
    FuzzBounds, FuzzOptions, NecessityBundle, NecessityOptions, Row, SufficiencyBundle, SufficiencyRow, Verdict,
};
use teag_core::oracles::{closed_walk, cyc, dup_r, overlap, soft_overlap, SimilarityTable};
use teag_core::separation::{
    gen_cycle_pair, gen_k22_example, gen_k2r_pair, gen_thm1_pair, gen_thm2_pair, SeparationPair,
};

#[derive(Parser)]
#[command(name = "teag-lab", version, about = "Separation pairs, exact constructions and MPNN probes on typed entity-attribute graphs")]
struct Cli {
    /// Write the JSON result here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Console output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Master seed for weight trials and fuzzing.
    #[arg(long, global = true, env = "TEAG_LAB_SEED", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum PairKind {
    Thm1,
    Thm2,
    K22,
    K2r,
    Cycle,
}

#[derive(Clone, Copy, ValueEnum)]
enum OraclePredicate {
    Dup,
    Overlap,
    Soft,
    Cyc,
    Walk,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Dup1,
    Dup1Multi,
    Dupr,
    DuprMulti,
    Cyc,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a separation pair as two graph files plus a manifest.
    Gen {
        #[arg(long, value_enum)]
        pair: PairKind,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 3)]
        ell: usize,
        /// Partition for k2r as `S1/S2`, e.g. `1,3/2`.
        #[arg(long)]
        partition: Option<String>,
        /// Output directory.
        #[arg(long)]
        dir: PathBuf,
    },
    /// Evaluate a brute-force predicate on a graph file.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        predicate: OraclePredicate,
        #[arg(long)]
        node: usize,
        /// Second entity for overlap and soft.
        #[arg(long)]
        other: Option<usize>,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 3)]
        ell: usize,
        /// Similarity table for soft.
        #[arg(long)]
        sims: Option<PathBuf>,
    },
    /// Run an exact construction on a graph file and print its trace.
    Construct {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        algo: Algo,
        #[arg(long)]
        ego: Option<usize>,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 3)]
        ell: usize,
    },
    /// Random-weight necessity trials.
    Necessity {
        /// Rows to run (default: all).
        #[arg(long, value_delimiter = ',')]
        rows: Vec<Row>,
        #[arg(long, default_value_t = 100)]
        seeds: usize,
        #[arg(long, default_value_t = 32)]
        hidden_dim: usize,
        /// Override each row's depth grid.
        #[arg(long, value_delimiter = ',')]
        depths: Vec<usize>,
        #[arg(long, default_value_t = 0.0)]
        tolerance: f64,
    },
    /// Run the exact constructions on their pairs.
    Sufficiency {
        /// `thm1`, `thm2`, `thm3:R` or `thm4:L` (default: the eight standard rows).
        #[arg(long, value_delimiter = ',')]
        rows: Vec<String>,
    },
    /// Refinement certificates.
    Certify {
        #[arg(long, default_value_t = 16)]
        depth_bound: usize,
    },
    /// Oracle-equivalence fuzzing.
    Fuzz {
        /// Graphs per family.
        #[arg(long, default_value_t = 500)]
        graphs: usize,
        #[arg(long, default_value_t = 3)]
        port_assignments: usize,
        #[arg(long, default_value_t = 8)]
        max_entities: usize,
        #[arg(long, default_value_t = 10)]
        max_attributes: usize,
        #[arg(long, default_value_t = 8)]
        max_ell: usize,
    },
    /// Merge JSON reports into text tables.
    Report { files: Vec<PathBuf> },
}

fn parse_row(s: &str) -> Result<SufficiencyRow> {
    let (name, param) = match s.split_once(':') {
        Some((n, p)) => (n, Some(p.parse::<usize>().with_context(|| format!("bad parameter in {s:?}"))?)),
        None => (s, None),
    };
    Ok(match (name, param) {
        ("thm1", None) => SufficiencyRow::Thm1,
        ("thm2", None) => SufficiencyRow::Thm2,
        ("thm3", Some(r)) => SufficiencyRow::Thm3 { r },
        ("thm4", Some(ell)) => SufficiencyRow::Thm4 { ell },
        _ => bail!("unknown row {s:?}; use thm1, thm2, thm3:R or thm4:L"),
    })
}

fn parse_partition(s: &str) -> Result<(Vec<usize>, Vec<usize>)> {
    let (a, b) = s.split_once('/').context("partition must look like 1,3/2")?;
    let list = |x: &str| -> Result<Vec<usize>> {
        x.split(',').filter(|t| !t.is_empty()).map(|t| t.trim().parse().context("partition entries are integers")).collect()
    };
    Ok((list(a)?, list(b)?))
}

fn load(path: &Path) -> Result<(TypedMultigraph, Option<PortAssignment>)> {
    read_graph(path).with_context(|| format!("reading {}", path.display()))
}

fn need_ports(ports: Option<PortAssignment>) -> Result<PortAssignment> {
    ports.context("this construction needs a `ports` table in the graph file")
}

/// Result JSON and, for harness commands, a verdict.
fn run(cli: &Cli) -> Result<(Value, Option<Verdict>, Option<String>)> {
    Ok(match &cli.command {
        Command::Gen { pair, r, ell, partition, dir } => {
            let p: SeparationPair = match pair {
                PairKind::Thm1 => gen_thm1_pair(),
                PairKind::Thm2 => gen_thm2_pair(),
                PairKind::K22 => gen_k22_example(),
                PairKind::K2r => gen_k2r_pair(*r, partition.as_deref().map(parse_partition).transpose()?)?,
                PairKind::Cycle => gen_cycle_pair(*ell)?,
            };
            p.write_to(dir)?;
            (serde_json::to_value(p.manifest())?, None, None)
        }
        Command::Oracle { graph, predicate, node, other, r, ell, sims } => {
            let (g, _) = load(graph)?;
            let view = g.view();
            let other = || other.context("--other is required for this predicate");
            let value = match predicate {
                OraclePredicate::Dup => json!(dup_r(&view, *node, *r)? as u8),
                OraclePredicate::Overlap => json!(overlap(&view, *node, other()?)?),
                OraclePredicate::Soft => {
                    let table = match sims {
                        Some(p) => read_similarity_table(p)?,
                        None => SimilarityTable::identity(),
                    };
                    json!(soft_overlap(&view, *node, other()?, &table)?)
                }
                OraclePredicate::Cyc => json!(cyc(&g, *node, *ell)? as u8),
                OraclePredicate::Walk => json!(closed_walk(&g, *node, *ell)? as u8),
            };
            (json!({"node": node, "value": value}), None, None)
        }
        Command::Construct { graph, algo, ego, r, ell } => {
            let (g, ports) = load(graph)?;
            let view = g.view();
            let ego = || ego.context("--ego is required for this construction");
            let value = match algo {
                Algo::Dup1 => serde_json::to_value(dup1_simple(&view)?)?,
                Algo::Dup1Multi => serde_json::to_value(dup1_multigraph(&view, &need_ports(ports)?)?)?,
                Algo::Dupr => serde_json::to_value(dupr_ego(&view, ego()?, *r)?)?,
                Algo::DuprMulti => serde_json::to_value(dupr_ego_multigraph(&view, &need_ports(ports)?, ego()?, *r)?)?,
                Algo::Cyc => serde_json::to_value(cyc_ego(&g, ego()?, *ell)?)?,
            };
            (value, None, None)
        }
        Command::Necessity { rows, seeds, hidden_dim, depths, tolerance } => {
            let rows = if rows.is_empty() { Row::ALL.to_vec() } else { rows.clone() };
            let opts = NecessityOptions {
                seeds: *seeds,
                hidden_dim: *hidden_dim,
                depths: (!depths.is_empty()).then(|| depths.clone()),
                tolerance: *tolerance,
                master_seed: cli.seed,
            };
            let reports = rows.into_iter().map(|r| run_necessity(r, &opts)).collect::<Result<Vec<_>, _>>()?;
            let bundle = NecessityBundle::new(reports);
            let v = serde_json::to_value(&bundle)?;
            (v.clone(), Some(bundle.verdict), Some(render_reports(&[v])?))
        }
        Command::Sufficiency { rows } => {
            let rows = if rows.is_empty() {
                table5_rows()
            } else {
                rows.iter().map(|s| parse_row(s)).collect::<Result<_>>()?
            };
            let reports = rows.into_iter().map(run_sufficiency).collect::<Result<Vec<_>, _>>()?;
            let bundle = SufficiencyBundle::new(reports);
            let v = serde_json::to_value(&bundle)?;
            (v.clone(), Some(bundle.verdict), Some(render_reports(&[v])?))
        }
        Command::Certify { depth_bound } => {
            let report = run_certificates(*depth_bound)?;
            let v = serde_json::to_value(&report)?;
            (v.clone(), Some(report.verdict), Some(render_reports(&[v])?))
        }
        Command::Fuzz { graphs, port_assignments, max_entities, max_attributes, max_ell } => {
            let opts = FuzzOptions {
                seed: cli.seed,
                n_graphs: *graphs,
                port_assignments: *port_assignments,
                bounds: FuzzBounds {
                    max_entities: *max_entities,
                    max_attributes: *max_attributes,
                    max_ell: *max_ell,
                    ..FuzzBounds::default()
                },
            };
            let report = run_fuzz(&opts)?;
            let v = serde_json::to_value(&report)?;
            (v.clone(), Some(report.verdict), Some(render_reports(&[v])?))
        }
        Command::Report { files } => {
            let values = files
                .iter()
                .map(|f| -> Result<Value> {
                    let text = fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?;
                    Ok(serde_json::from_str(&text)?)
                })
                .collect::<Result<Vec<_>>>()?;
            let text = render_reports(&values)?;
            (Value::Array(values.clone()), Some(reports_verdict(&values)?), Some(text))
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok((value, verdict, text)) => {
            if let Some(path) = &cli.out {
                if let Err(e) = write_json(path, &value) {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            let body = match (cli.format, text) {
                (Format::Text, Some(t)) => t,
                _ => serde_json::to_string_pretty(&value).expect("values serialize") + "\n",
            };
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = io::stdout().lock().write_all(body.as_bytes());
            match verdict {
                Some(Verdict::Fail) => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use dynamic_resistance::io::{parse_graph, parse_stream_lines, parse_terminals, write_graph, write_stream};
use dynamic_resistance::{DynamicMultigraph, EngineConfig, TerminalMode};
use er_bench::{cmd_sketch, generate, run_stream, BenchError, GenKind, GenSpec, Oracle, RunConfig};

#[derive(Parser)]
#[command(name = "er-bench", version, about = "Dynamic effective-resistance harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Edge,
    Vertex,
    Explicit,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Exact,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(clap::Args)]
struct Common {
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    rho_factor: f64,
    #[arg(long, default_value_t = 1.0)]
    cap_factor: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Replay an update stream and write a JSON-lines report.
    Run {
        graph: PathBuf,
        stream: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "edge")]
        mode: Mode,
        /// Terminal list for `--mode explicit`.
        #[arg(long)]
        terminals: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "none")]
        oracle: OracleArg,
        #[arg(long, value_enum, default_value = "off")]
        resparsify: Switch,
        /// Report destination; stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Sample a static Schur complement sketch and write its edge list.
    Sketch {
        graph: PathBuf,
        terminals: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate a graph file and a stream file.
    Gen {
        #[arg(value_parser = parse_kind)]
        kind: GenKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0)]
        ops: usize,
        #[arg(long, default_value_t = 2)]
        parallel: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        graph_out: PathBuf,
        #[arg(long)]
        stream_out: PathBuf,
    },
}

fn parse_kind(s: &str) -> Result<GenKind, String> {
    s.parse()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_graph(path: &Path) -> Result<DynamicMultigraph> {
    parse_graph(&read(path)?).map_err(|source| {
        BenchError::Parse {
            file: path.display().to_string(),
            source,
        }
        .into()
    })
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Run {
            graph,
            stream,
            common,
            mode,
            terminals,
            oracle,
            resparsify,
            report,
        } => {
            let g = load_graph(&graph)?;
            let events = parse_stream_lines(&read(&stream)?).map_err(|source| BenchError::Parse {
                file: stream.display().to_string(),
                source,
            })?;
            let mode = match (mode, terminals) {
                (Mode::Edge, None) => TerminalMode::EdgeEndpoint,
                (Mode::Vertex, None) => TerminalMode::VertexSample,
                (Mode::Explicit, Some(path)) => {
                    let list = parse_terminals(&read(&path)?, g.vertex_count()).map_err(|source| {
                        BenchError::Parse {
                            file: path.display().to_string(),
                            source,
                        }
                    })?;
                    TerminalMode::Explicit(list)
                }
                (Mode::Explicit, None) => bail!("--mode explicit needs --terminals"),
                (_, Some(_)) => bail!("--terminals only applies to --mode explicit"),
            };
            let cfg = RunConfig {
                engine: EngineConfig {
                    eps: common.eps,
                    mode,
                    beta: common.beta,
                    rho_factor: common.rho_factor,
                    cap_factor: common.cap_factor,
                    resparsify: matches!(resparsify, Switch::On),
                    seed: common.seed,
                    ..Default::default()
                },
                oracle: match oracle {
                    OracleArg::Exact => Oracle::Exact,
                    OracleArg::None => Oracle::None,
                },
            };
            let out = run_stream(g, &events, &cfg)?;
            emit(report.as_deref(), &out.to_jsonl(true))?;
            if let Some(within) = out.summary.within_eps {
                eprintln!(
                    "{within}/{} answered queries within 1±{}",
                    out.summary.answered, common.eps
                );
            }
        }
        Command::Sketch {
            graph,
            terminals,
            common,
            output,
        } => {
            let g = load_graph(&graph)?;
            let t = parse_terminals(&read(&terminals)?, g.vertex_count()).map_err(|source| {
                BenchError::Parse {
                    file: terminals.display().to_string(),
                    source,
                }
            })?;
            let text = cmd_sketch(
                &g,
                &t,
                common.eps,
                common.beta,
                common.rho_factor,
                common.cap_factor,
                common.seed,
            )?;
            emit(output.as_deref(), &text)?;
        }
        Command::Gen {
            kind,
            n,
            m,
            ops,
            parallel,
            seed,
            graph_out,
            stream_out,
        } => {
            let mut spec = GenSpec::new(kind, n);
            spec.m = m.unwrap_or(spec.m);
            spec.ops = ops;
            spec.parallel = parallel;
            spec.seed = seed;
            let (g, events) = generate(&spec)?;
            emit(Some(&graph_out), &write_graph(&g))?;
            emit(Some(&stream_out), &write_stream(&events))?;
        }
    }
    Ok(())
}

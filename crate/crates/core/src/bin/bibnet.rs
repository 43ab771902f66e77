use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bibnet::affinity::AssociationMode;
use bibnet::corpus::{normalize_corpus, write_wos_flatfile, NormalizeOptions};
use bibnet::delineation::{precision_from_areas, recall_report};
use bibnet::graph::{to_dot, to_graphml};
use bibnet::pipeline::{
    artifacts, export, overlay_view, read_records, ClusterSummary, Config, ExportFormat, GraphStats, IngestSummary,
    Stage, Workspace,
};
use bibnet::synth::{synth_corpus, synth_researcher, SynthParams};
use bibnet::{Error, Result};

#[derive(Parser)]
#[command(name = "bibnet", version, about = "Community structure in publication networks")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Opts {
    /// Workspace directory holding staged artifacts.
    #[arg(long, short = 'w', global = true, default_value = "bibnet-ws")]
    workspace: PathBuf,
    /// TOML config; defaults to the workspace's saved config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for the clustering trials.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Clustering restarts per network.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Publications an author needs to enter the co-author network.
    #[arg(long, global = true)]
    min_pubs: Option<usize>,
    /// Smallest topic area as a share of all documents.
    #[arg(long, global = true)]
    min_frac: Option<f64>,
    /// Years before a publication that count as recent references.
    #[arg(long, global = true)]
    window: Option<u32>,
    /// Association mode: citation or author_activity.
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Largest topic areas compared by delineate-precision.
    #[arg(long, global = true)]
    top_k: Option<usize>,
    /// Repeat for more log output.
    #[arg(long, short = 'v', global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and normalize a corpus.
    Ingest { input: PathBuf },
    /// Author table and one-time author counts.
    Authors,
    /// Co-author and citation networks.
    Graph,
    /// Map-equation clustering of both networks.
    Cluster,
    /// Node roles and the homonymy distortion check.
    Roles,
    /// Topic areas from double clustering.
    Topics,
    /// Reference inclusion rates per area.
    Rir,
    /// Residual table for the chosen --mode.
    Affinity,
    /// Group collaboration network and geographic propensities.
    Collab,
    /// Collaboration network coloured by continent or by area activity.
    Overlay {
        /// Area id for an activity overlay; omit for continents.
        #[arg(long)]
        area: Option<usize>,
        #[arg(long, default_value = "dot")]
        format: String,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Overlap of a researcher's self-citation clusters with the field corpus.
    DelineateRecall {
        /// The researcher's publications (flat file or .jsonl).
        publications: PathBuf,
        #[arg(long, default_value = "researcher")]
        id: String,
    },
    /// Author-activity affinity among the largest topic areas.
    DelineatePrecision,
    /// Write a synthetic flat-file corpus.
    Synth {
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = SynthParams::default().records)]
        records: usize,
        /// Emit one researcher's two-strand output with this id prefix instead.
        #[arg(long)]
        researcher: Option<String>,
    },
    /// Render a staged artifact.
    Export {
        artifact: String,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Table-style summary of the workspace.
    Report,
    /// Run every stage.
    Run {
        input: Option<PathBuf>,
    },
    /// Print the effective configuration.
    Config {
        /// Print built-in defaults instead.
        #[arg(long)]
        defaults: bool,
    },
}

impl Command {
    fn tag(&self) -> &'static str {
        match self {
            Command::Ingest { .. } => "ingest",
            Command::Authors => "authors",
            Command::Graph => "graph",
            Command::Cluster => "cluster",
            Command::Roles => "roles",
            Command::Topics => "topics",
            Command::Rir => "rir",
            Command::Affinity => "affinity",
            Command::Collab => "collab",
            Command::Overlay { .. } => "overlay",
            Command::DelineateRecall { .. } => "delineate-recall",
            Command::DelineatePrecision => "delineate-precision",
            Command::Synth { .. } => "synth",
            Command::Export { .. } => "export",
            Command::Report => "report",
            Command::Run { .. } => "run",
            Command::Config { .. } => "config",
        }
    }
}

fn effective_config(opts: &Opts, ws: &Workspace) -> Result<Config> {
    let mut cfg = match &opts.config {
        Some(p) => Config::load(p)?,
        None => ws.saved_config()?.unwrap_or_default(),
    };
    if let Some(s) = opts.seed {
        cfg.community.seed = s;
    }
    if let Some(t) = opts.trials {
        cfg.community.trials = t;
    }
    if let Some(m) = opts.min_pubs {
        cfg.authors.min_pubs = m;
    }
    if let Some(f) = opts.min_frac {
        cfg.topics.min_fraction = f;
    }
    if let Some(w) = opts.window {
        cfg.topics.window = w;
    }
    if let Some(k) = opts.top_k {
        cfg.delineation.top_k = k;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn mode(opts: &Opts) -> Result<AssociationMode> {
    opts.mode.as_deref().unwrap_or("citation").parse()
}

fn run(cli: Cli) -> Result<()> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Config { defaults: true } => {
            print!("{}", Config::defaults_toml());
            return Ok(());
        }
        Command::Synth { out, records, researcher } => {
            let recs = match researcher {
                Some(prefix) => synth_researcher(prefix, (*records / 2).max(1), opts.seed.unwrap_or(1)),
                None => synth_corpus(&SynthParams {
                    records: *records,
                    seed: opts.seed.unwrap_or(SynthParams::default().seed),
                    ..Default::default()
                }),
            };
            return emit(&write_wos_flatfile(&recs), out.as_deref());
        }
        _ => {}
    }

    let mut ws = Workspace::open(&opts.workspace)?;
    let mut cfg = effective_config(opts, &ws)?;
    match &cli.command {
        Command::Ingest { input } | Command::Run { input: Some(input) } => {
            cfg.corpus.input = Some(input.to_string_lossy().into_owned());
        }
        _ => {}
    }

    match &cli.command {
        Command::Config { .. } => print!("{}", cfg.to_toml()),
        Command::Ingest { .. } => {
            ws.run_through(Stage::Ingest, &cfg)?;
            let s: IngestSummary = ws.read_json(artifacts::INGEST)?;
            println!("records read: {}", s.records_read);
            println!("rejected blocks: {}", s.rejected.len());
            println!("dropped: {}", s.warnings.len());
            println!("removed by subject filter: {}", s.subject_filtered);
            println!("publications: {}", s.publications);
        }
        Command::Authors => {
            ws.run_through(Stage::Authors, &cfg)?;
            let t: bibnet::corpus::AuthorTable = ws.read_json(artifacts::AUTHORS)?;
            println!("authors: {}", t.total_authors);
            println!("1-time authors: {}", t.one_time_authors);
            println!("kept (>= {} publications): {}", t.min_pubs, t.len());
        }
        Command::Graph => {
            ws.run_through(Stage::Graph, &cfg)?;
            let g: GraphStats = ws.read_json(artifacts::GRAPH_STATS)?;
            println!("co-author network: {} nodes, {} edges", g.coauthor_nodes, g.coauthor_edges);
            if let Some(c) = g.coauthor_components {
                println!("  giant component: {} ({:.1}%)", c.giant_size, 100.0 * c.giant_fraction);
            }
            println!("citation network: {} nodes, {} edges", g.citation_nodes, g.citation_edges);
        }
        Command::Cluster => {
            ws.run_through(Stage::Cluster, &cfg)?;
            let c: ClusterSummary = ws.read_json(artifacts::CLUSTERS)?;
            println!("co-author clusters: {}", c.coauthor_clusters);
            if let Some(r) = c.coauthor_codelength {
                println!("  codelength: {:.4} bits", r.codelength_bits);
            }
            let show = |v: Option<usize>| v.map_or("not computed".to_string(), |n| n.to_string());
            println!("document clusters: {}", show(c.doc_clusters));
            println!("clusters of clusters: {}", show(c.clusters_of_clusters));
        }
        Command::Roles => {
            ws.run_through(Stage::Roles, &cfg)?;
            let d: bibnet::roles::DistortionReport = ws.read_json(artifacts::DISTORTION)?;
            print!("{}", d.summary());
        }
        Command::Topics => {
            ws.run_through(Stage::Topics, &cfg)?;
            print!("{}", ws.read_text(artifacts::AREA_METADATA)?);
        }
        Command::Rir => {
            ws.run_through(Stage::Topics, &cfg)?;
            print!("{}", ws.read_text(artifacts::RIR)?);
        }
        Command::Affinity => {
            let mode = mode(opts)?;
            ws.run_through(Stage::Affinity, &cfg)?;
            let file = match mode {
                AssociationMode::Citation => artifacts::RESIDUALS_CITATION,
                AssociationMode::AuthorActivity => artifacts::RESIDUALS_ACTIVITY,
            };
            print!("{}", ws.read_text(file)?);
        }
        Command::Collab => {
            ws.run_through(Stage::Collab, &cfg)?;
            let c: bibnet::collab::GroupCollabNetwork = ws.read_json(artifacts::COLLAB)?;
            println!("clusters in giant component: {}", c.cluster_count);
            println!(
                "linked clusters: {} ({:.1}%)",
                c.linked_clusters,
                100.0 * c.linked_proportion()
            );
            print!("{}", ws.read_text(artifacts::PROPENSITY)?);
        }
        Command::Overlay { area, format, out } => {
            ws.run_through(Stage::Collab, &cfg)?;
            let net = overlay_view(&ws, *area)?;
            let text = match format.parse::<ExportFormat>()? {
                ExportFormat::Dot => to_dot(&net, "overlay"),
                ExportFormat::Graphml => to_graphml(&net),
                other => {
                    return Err(Error::UnknownOption {
                        kind: "format",
                        given: other.to_string(),
                        valid: "dot, graphml".into(),
                    })
                }
            };
            emit(&text, out.as_deref())?;
        }
        Command::DelineateRecall { publications, id } => {
            ws.run_through(Stage::Ingest, &cfg)?;
            let (recs, _) = read_records(publications)?;
            let pubs = normalize_corpus(recs, &NormalizeOptions { year_range: None }).corpus;
            let r = recall_report(id, pubs.records(), &ws.corpus()?, &cfg.community.detect_options())?;
            print!("{}", r.summary());
        }
        Command::DelineatePrecision => {
            ws.run_through(Stage::Topics, &cfg)?;
            let r = precision_from_areas(&ws.areas()?, &ws.corpus()?, cfg.delineation.top_k)?;
            print!("{}", r.summary());
            print!("{}", r.heatmap.to_csv(cfg.affinity.decimals)?);
        }
        Command::Export { artifact, format, out } => {
            let text = export(&ws, artifact, format.parse()?)?;
            emit(&text, out.as_deref())?;
        }
        Command::Report => {
            if ws.has(artifacts::INGEST) {
                ws.run_through(Stage::Report, &cfg)?;
            }
            print!("{}", ws.report().render());
        }
        Command::Run { .. } => {
            for (stage, outcome) in ws.run_through(Stage::Report, &cfg)? {
                log::info!("{stage}: {outcome:?}");
            }
            print!("{}", ws.read_text(artifacts::SUMMARY)?);
        }
        Command::Synth { .. } => unreachable!("handled above"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.opts.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let tag = cli.command.tag();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let e = match e {
                Error::Stage { .. } => e,
                other => other.in_stage(tag),
            };
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

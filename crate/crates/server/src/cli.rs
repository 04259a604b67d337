//! Command-line front end.

use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use biblionet::corpus::load_corpus;
use biblionet::fixtures::{generate_planted_corpus, SyntheticSpec};
use biblionet::geo::Role;
use biblionet::network::{cut_level, export_graph, ExportFormat, Scope};
use biblionet::themes::{DEFAULT_CLOUD_TERMS, DEFAULT_THEMES};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analysis;
use crate::request::ColumnSource;
use crate::service::{self, AppState};
use crate::snapshot::{DataConfig, Snapshot};
use crate::{DEFAULT_PORT, DEFAULT_SEED, PORT_ENV};

#[derive(Debug, Parser)]
#[command(
    name = "biblionet",
    version,
    about = "Explore a journal corpus: country maps, keyword networks, themes"
)]
pub struct Cli {
    /// Corpus file (JSON Lines, one paper per line).
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// Seed for community detection, layout and theme extraction.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Lexicon file (JSON Lines of {name, terms}).
    #[arg(long, global = true)]
    pub lexicons: Option<PathBuf>,
    /// Gazetteer file (JSON Lines of {code, aliases}) for detecting studied countries.
    #[arg(long, global = true)]
    pub gazetteer: Option<PathBuf>,
    /// Skip records that fail validation instead of refusing the corpus.
    #[arg(long, global = true)]
    pub drop_invalid: bool,
    /// Graph export format.
    #[arg(long, global = true, default_value = "json", value_parser = parse_format)]
    pub format: ExportFormat,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_format(s: &str) -> Result<ExportFormat, String> {
    s.parse()
        .map_err(|e: biblionet::network::NetworkError| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report invalid records; exits with status 2 when there are any.
    Validate,
    /// Country activity and classification.
    #[command(subcommand)]
    Geo(GeoCommand),
    /// Keyword co-occurrence network with communities and layout.
    Network(NetworkArgs),
    /// Themes from full-text clustering.
    Themes(ThemesArgs),
    /// Write network, themes, activity and (optionally) classes into a directory.
    Export(ExportArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Generate a planted synthetic corpus from a spec file.
    Fixtures(FixturesArgs),
}

#[derive(Debug, Subcommand)]
pub enum GeoCommand {
    Activity {
        #[arg(long)]
        from: Option<i32>,
        #[arg(long)]
        to: Option<i32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Classes(ClassesArgs),
}

#[derive(Debug, Args)]
pub struct ClassesArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value = "studied")]
    pub role: Role,
    #[arg(long, default_value = "lexicons")]
    pub source: ColumnSource,
    /// Theme count when `--source themes`.
    #[arg(long, default_value_t = DEFAULT_THEMES)]
    pub themes: usize,
    #[arg(long)]
    pub from: Option<i32>,
    #[arg(long)]
    pub to: Option<i32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NetworkArgs {
    #[arg(long, default_value = "seed")]
    pub scope: Scope,
    #[arg(long, default_value_t = 1)]
    pub min_weight: u32,
    /// Hierarchy level (0 = finest); defaults to the coarsest.
    #[arg(long)]
    pub level: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThemesArgs {
    #[arg(long, default_value_t = DEFAULT_THEMES)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_CLOUD_TERMS)]
    pub top: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value = "seed")]
    pub scope: Scope,
    #[arg(long, default_value_t = 1)]
    pub min_weight: u32,
    #[arg(long, default_value_t = DEFAULT_THEMES)]
    pub themes: usize,
    #[arg(long, default_value_t = DEFAULT_CLOUD_TERMS)]
    pub top: usize,
    /// Also write classes.json with this many classes.
    #[arg(long)]
    pub classes: Option<usize>,
    #[arg(long, default_value = "studied")]
    pub role: Role,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
    /// Listening port; the BIBLIONET_PORT environment variable takes precedence.
    #[arg(long, default_value_t = DEFAULT_PORT)]
    pub port: u16,
    /// Maximum cached responses (least recently used are evicted); unbounded when absent.
    #[arg(long)]
    pub cache_capacity: Option<NonZeroUsize>,
    /// Directory of the web client, served under /ui.
    #[arg(long)]
    pub ui: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FixturesArgs {
    /// Spec file (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

impl Cli {
    fn data_config(&self) -> Result<DataConfig> {
        let Some(corpus) = self.corpus.clone() else {
            bail!("--corpus is required for this command");
        };
        Ok(DataConfig {
            corpus,
            lexicons: self.lexicons.clone(),
            gazetteer: self.gazetteer.clone(),
            seed: self.seed,
            drop_invalid: self.drop_invalid,
        })
    }

    fn snapshot(&self) -> Result<Snapshot> {
        let config = self.data_config()?;
        let snap = Snapshot::load(&config, 1)
            .with_context(|| format!("loading {}", config.corpus.display()))?;
        if !snap.dropped.is_empty() {
            tracing::warn!(records = snap.dropped.len(), "dropped invalid records");
        }
        Ok(snap)
    }
}

/// Port from `BIBLIONET_PORT` when set, else `flag`.
pub fn resolve_port(env: Option<&str>, flag: u16) -> Result<u16> {
    match env {
        Some(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{PORT_ENV}={v:?} is not a port number")),
        None => Ok(flag),
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializes");
    s.push('\n');
    s
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            std::io::stdout().lock().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

fn network_export(
    snap: &Snapshot,
    scope: Scope,
    min_weight: u32,
    level: Option<usize>,
    format: ExportFormat,
) -> String {
    let model = analysis::network_model(snap, scope, min_weight);
    let level = level.unwrap_or(model.hierarchy.top());
    let partition = cut_level(&model.hierarchy, level);
    export_graph(&model.graph, &partition, &model.positions, format).expect("sizes agree")
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Validate => {
            let config = cli.data_config()?;
            let corpus = load_corpus(&config.corpus)?;
            let report = corpus.validate();
            let mut out = std::io::stdout().lock();
            for v in &report {
                writeln!(out, "{}\t{}\t{}", v.id, v.rule.name(), v.detail)?;
            }
            writeln!(out, "{} records, {} violations", corpus.len(), report.len())?;
            return Ok(if report.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            });
        }
        Command::Geo(GeoCommand::Activity { from, to, out }) => {
            let snap = cli.snapshot()?;
            let a = analysis::activity(&snap, *from, *to)?;
            emit(out.as_deref(), &pretty(&a))?;
        }
        Command::Geo(GeoCommand::Classes(a)) => {
            let snap = cli.snapshot()?;
            let report = analysis::classes(&snap, a.k, a.role, a.source, a.themes, a.from, a.to)?;
            emit(a.out.as_deref(), &pretty(&report))?;
        }
        Command::Network(a) => {
            let snap = cli.snapshot()?;
            emit(
                a.out.as_deref(),
                &network_export(&snap, a.scope, a.min_weight, a.level, cli.format),
            )?;
        }
        Command::Themes(a) => {
            let snap = cli.snapshot()?;
            emit(
                a.out.as_deref(),
                &pretty(&analysis::themes(&snap, a.k, a.top)?),
            )?;
        }
        Command::Export(a) => {
            let snap = cli.snapshot()?;
            std::fs::create_dir_all(&a.out_dir)?;
            let dir = &a.out_dir;
            let graph = network_export(&snap, a.scope, a.min_weight, None, cli.format);
            emit(
                Some(&dir.join(format!("network.{}", cli.format.extension()))),
                &graph,
            )?;
            emit(
                Some(&dir.join("themes.json")),
                &pretty(&analysis::themes(&snap, a.themes, a.top)?),
            )?;
            emit(
                Some(&dir.join("activity.json")),
                &pretty(&analysis::activity(&snap, None, None)?),
            )?;
            if let Some(k) = a.classes {
                let source = if snap.lexicons.is_empty() {
                    ColumnSource::Themes
                } else {
                    ColumnSource::Lexicons
                };
                let report = analysis::classes(&snap, k, a.role, source, a.themes, None, None)?;
                emit(Some(&dir.join("classes.json")), &pretty(&report))?;
            }
        }
        Command::Serve(a) => {
            let config = cli.data_config()?;
            let port = resolve_port(std::env::var(PORT_ENV).ok().as_deref(), a.port)?;
            let state = AppState::load(config, a.cache_capacity).context("loading corpus")?;
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(service::serve(
                state,
                SocketAddr::new(a.host, port),
                a.ui.clone(),
            ))?;
        }
        Command::Fixtures(a) => {
            let raw = std::fs::read_to_string(&a.spec)
                .with_context(|| format!("reading {}", a.spec.display()))?;
            let spec: SyntheticSpec = serde_json::from_str(&raw)
                .with_context(|| format!("parsing {}", a.spec.display()))?;
            emit(Some(&a.out), &generate_planted_corpus(&spec)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

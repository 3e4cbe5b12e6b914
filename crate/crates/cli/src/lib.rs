//! The `plp` command line. Every command prints either a short human summary
//! or, with `--output structured`, the same bytes the HTTP API returns.

mod human;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use plp_core::clock::Clock;
use plp_core::fixture::{self, extend_to_graph_count, SyntheticReport};
use plp_core::lector::{build_page_index, validate_well_formed, PackInput, PackState, StubReader, UncheckedPack};
use plp_core::patos::{ingest_manifest, Currency, DocId};
use plp_core::refraction::{Execution, ViewKind};
use plp_core::Corpus;
use plp_service::ops::{self, CurateRequest, LinkRequest};
use plp_service::{structured, ApiError, Config};

pub const BENCH_GRAPHS: usize = 55_555;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Human,
    Structured,
}

#[derive(Debug, Parser)]
#[command(name = "plp", version, about = "Evidence packs, canonical ontology and context graphs")]
pub struct Cli {
    /// Data directory; created when missing.
    #[arg(long, global = true, env = "PLP_DATA_DIR")]
    pub data_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t)]
    pub output: OutputFormat,
    /// Print nothing to stderr unless a command fails.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ingest every document listed in a line-delimited manifest.
    Ingest {
        manifest: PathBuf,
        /// Leave the current flag of each lineage untouched.
        #[arg(long)]
        keep_current: bool,
    },
    /// Recompute document checksums against the stored blobs.
    Verify {
        #[arg(required_unless_present = "all", conflicts_with = "all")]
        doc_id: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Build the page index tree of a cleaned document.
    Index {
        doc_id: String,
        #[arg(long, default_value = StubReader::ID)]
        reader: String,
    },
    #[command(subcommand)]
    Pack(PackCommand),
    /// Link an accepted pack to a canonical entity.
    Link { pack_id: String, entity_id: String },
    #[command(subcommand)]
    Ontology(OntologyCommand),
    /// Materialize one context graph.
    Refract {
        entity_id: String,
        view: String,
        /// Comma-separated assertion types to keep.
        #[arg(long)]
        types: Option<String>,
    },
    /// Materialize every eligible graph.
    RefractAll(RefractAllArgs),
    /// Follow an assertion node back to its document versions.
    Trace { graph_id: String, node_id: String },
    Metrics,
    #[command(subcommand)]
    Fixture(FixtureCommand),
    /// Run the HTTP API until interrupted.
    Serve {
        #[arg(long, env = "PLP_CONFIG")]
        config: Option<PathBuf>,
        #[arg(long)]
        listen: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum PackCommand {
    /// Create a draft from a JSON pack body.
    New { file: PathBuf },
    /// Check a stored pack, or a pack file, against the six conditions.
    Validate { pack: String },
    Submit { pack_id: String },
    Curate {
        pack_id: String,
        #[arg(long, value_parser = ["accept", "reject"])]
        verdict: String,
        #[arg(long, default_value = "")]
        justification: String,
        #[arg(long, env = "PLP_CURATOR_ID", default_value = "")]
        curator: String,
    },
    /// Create a draft that revises a rejected pack.
    Derive { source: String, file: PathBuf },
    Show { pack_id: String },
    List {
        #[arg(long)]
        state: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum OntologyCommand {
    /// Apply a line-delimited record file.
    Load { file: PathBuf },
    /// Print every record, one per line.
    Export,
}

#[derive(Debug, Subcommand)]
pub enum FixtureCommand {
    /// Load the worked example: documents, packs, links and graphs.
    LoadDipyrone,
}

#[derive(Debug, Args)]
pub struct RefractAllArgs {
    /// Extend the ontology with synthetic entities first and time only the materialization.
    #[arg(long)]
    pub bench: bool,
    #[arg(long, default_value_t = BENCH_GRAPHS, requires = "bench")]
    pub target: usize,
    /// Comma-separated views; all four by default.
    #[arg(long)]
    pub views: Option<String>,
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub execution: String,
    pub graph_count: usize,
    pub elapsed_ms: u128,
    pub failures: usize,
    pub manifest_digest: String,
    pub generation_ms: u128,
    pub synthetic: SyntheticReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Listening {
    pub listen_addr: String,
}

struct Out<'a> {
    format: OutputFormat,
    quiet: bool,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Out<'_> {
    fn show<T: Serialize>(&mut self, value: &T, human: impl FnOnce(&T) -> String) -> Result<(), ApiError> {
        let bytes = match self.format {
            OutputFormat::Structured => structured(value),
            OutputFormat::Human => {
                let mut s = human(value);
                if !s.ends_with('\n') {
                    s.push('\n');
                }
                s.into_bytes()
            }
        };
        self.stdout.write_all(&bytes).and_then(|_| self.stdout.flush()).map_err(io_error)
    }

    fn note(&mut self, msg: &str) {
        if !self.quiet && self.format == OutputFormat::Human {
            let _ = writeln!(self.stderr, "{msg}");
        }
    }

    fn fail(&mut self, e: &ApiError) {
        let _ = match self.format {
            OutputFormat::Structured => self.stderr.write_all(&structured(e)),
            OutputFormat::Human => match &e.detail {
                Some(d) => writeln!(self.stderr, "error: {}: {} {d}", e.code, e.message),
                None => writeln!(self.stderr, "error: {}: {}", e.code, e.message),
            },
        };
    }
}

fn io_error(e: std::io::Error) -> ApiError {
    ApiError::new("io_error", e.to_string())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, ApiError> {
    let text = fs::read_to_string(path).map_err(|e| ApiError::invalid_input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ApiError::invalid_input(format!("{}: {e}", path.display())))
}

fn parse_state(s: &str) -> Result<PackState, ApiError> {
    serde_json::from_value(serde_json::Value::String(s.to_owned()))
        .map_err(|_| ApiError::invalid_input(format!("unknown pack state {s}")))
}

fn parse_views(views: Option<&str>) -> Result<Vec<ViewKind>, ApiError> {
    match views {
        None => Ok(ViewKind::ALL.to_vec()),
        Some(v) => v.split(',').map(|v| ops::parse_view(v.trim())).collect(),
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn data_dir(cli: &Cli) -> PathBuf {
    cli.data_dir.clone().unwrap_or_else(|| PathBuf::from(plp_service::config::DEFAULT_DATA_DIR))
}

/// Parses `argv` and runs the command. Returns the process exit code:
/// 0 on success, 1 when the command fails, 2 on a usage error.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{}", e.render());
            return 0;
        }
        Err(e) => {
            let msg = e.render().to_string();
            let _ = write!(stderr, "error: invalid_input: {}", msg.strip_prefix("error: ").unwrap_or(&msg));
            return 2;
        }
    };
    let mut out = Out { format: cli.output, quiet: cli.quiet, stdout, stderr };
    match execute(&cli, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            out.fail(&e);
            1
        }
    }
}

fn open(cli: &Cli, clock: Clock) -> Result<Corpus, ApiError> {
    Ok(Corpus::open(data_dir(cli), clock)?)
}

fn execute(cli: &Cli, out: &mut Out<'_>) -> Result<(), ApiError> {
    match &cli.command {
        Command::Fixture(FixtureCommand::LoadDipyrone) => {
            let c = open(cli, fixture::fixture_clock())?;
            let summary = fixture::load_dipyrone(&c)?;
            out.show(&summary, human::fixture)
        }
        Command::Serve { config, listen } => serve(cli, config.as_deref(), listen.as_deref(), out),
        command => {
            let c = open(cli, Clock::System)?;
            execute_on(&c, command, out)
        }
    }
}

fn execute_on(c: &Corpus, command: &Command, out: &mut Out<'_>) -> Result<(), ApiError> {
    match command {
        Command::Ingest { manifest, keep_current } => {
            let currency = if *keep_current { Currency::Keep } else { Currency::MarkLatest };
            let docs = ingest_manifest(&c.patos, manifest, currency).map_err(plp_core::Error::from)?;
            out.show(&docs, |d| human::documents(d))
        }
        Command::Verify { doc_id, all } => {
            let ids: Vec<String> = if *all {
                c.patos.documents().into_iter().map(|d| d.doc_id.0).collect()
            } else {
                doc_id.iter().cloned().collect()
            };
            let reports = ids.iter().map(|id| ops::verify(c, id)).collect::<Result<Vec<_>, _>>()?;
            out.show(&reports, |r| human::integrity(r))?;
            let bad: Vec<&str> = reports.iter().filter(|r| !r.is_ok()).map(|r| r.doc_id.as_str()).collect();
            if bad.is_empty() {
                Ok(())
            } else {
                Err(ApiError {
                    detail: Some(serde_json::json!({ "documents": bad })),
                    ..ApiError::new("integrity_violation", format!("{} corrupted document(s)", bad.len()))
                })
            }
        }
        Command::Index { doc_id, reader } => {
            if reader != StubReader::ID {
                return Err(ApiError::invalid_input(format!("unknown reader {reader}")));
            }
            let tree =
                build_page_index(&c.patos, &DocId(doc_id.clone()), &StubReader).map_err(plp_core::Error::from)?;
            c.lector.save_tree(tree.clone()).map_err(plp_core::Error::from)?;
            out.show(&tree, human::tree)
        }
        Command::Pack(p) => pack(c, p, out),
        Command::Link { pack_id, entity_id } => {
            let link =
                ops::link(c, LinkRequest { pack_id: pack_id.as_str().into(), entity_id: entity_id.as_str().into() })?;
            out.show(&link, |l| format!("linked {} to {}", l.pack_id, l.entity_id))
        }
        Command::Ontology(OntologyCommand::Load { file }) => {
            let accepted = |id: &plp_core::lector::PackId| c.lector.get(id).is_ok_and(|p| p.is_accepted());
            let n = c.ontology.load_file(file, &accepted).map_err(plp_core::Error::from)?;
            out.show(&serde_json::json!({ "records": n }), |_| format!("loaded {n} records"))
        }
        Command::Ontology(OntologyCommand::Export) => {
            out.stdout.write_all(c.ontology.export_jsonl().as_bytes()).map_err(io_error)
        }
        Command::Refract { entity_id, view, types } => {
            let view = ops::parse_view(view)?;
            let types = ops::parse_types(types.as_deref())?;
            let g = ops::view(c, entity_id, view, types.as_ref())?;
            out.show(&g, human::graph)
        }
        Command::RefractAll(args) => refract_all(c, args, out),
        Command::Trace { graph_id, node_id } => {
            let chain = ops::trace(c, graph_id, node_id)?;
            out.show(&chain, human::trace)
        }
        Command::Metrics => {
            let m = ops::metrics(c)?;
            out.show(&m, human::metrics)
        }
        Command::Fixture(_) | Command::Serve { .. } => unreachable!("handled before the corpus is opened"),
    }
}

fn pack(c: &Corpus, command: &PackCommand, out: &mut Out<'_>) -> Result<(), ApiError> {
    match command {
        PackCommand::New { file } => {
            let input: PackInput = read_json(file)?;
            let p = ops::create_pack(c, input)?;
            out.show(&p, human::pack)
        }
        PackCommand::Validate { pack } => {
            let path = Path::new(pack);
            let report = if path.is_file() {
                let unchecked: UncheckedPack = read_json(path)?;
                validate_well_formed(&unchecked, Some(&c.patos))
            } else {
                ops::validate(c, pack)?
            };
            out.show(&report, human::validation)?;
            if report.well_formed {
                Ok(())
            } else {
                let mut conditions = report.violations.clone();
                conditions.extend(&report.unverifiable);
                Err(ApiError {
                    detail: Some(serde_json::json!({ "conditions": conditions })),
                    ..ApiError::new("structural_violation", "pack is not well formed")
                })
            }
        }
        PackCommand::Submit { pack_id } => {
            let p = ops::submit(c, pack_id)?;
            out.show(&p, human::pack)
        }
        PackCommand::Curate { pack_id, verdict, justification, curator } => {
            let req = CurateRequest {
                verdict: serde_json::from_value(serde_json::Value::String(verdict.clone()))
                    .map_err(|e| ApiError::invalid_input(e.to_string()))?,
                justification: justification.clone(),
            };
            let r = ops::curate(c, pack_id, curator, req)?;
            out.show(&r, |r| human::pack(&r.pack))
        }
        PackCommand::Derive { source, file } => {
            let input: PackInput = read_json(file)?;
            let p = ops::derive_pack(c, source, input)?;
            out.show(&p, human::pack)
        }
        PackCommand::Show { pack_id } => {
            let d = ops::pack(c, pack_id)?;
            out.show(&d, |d| human::pack(&d.pack))
        }
        PackCommand::List { state } => {
            let state = state.as_deref().map(parse_state).transpose()?;
            let packs = ops::packs(c, state);
            out.show(&packs, |ps| ps.iter().map(human::pack).collect::<Vec<_>>().join("\n"))
        }
    }
}

fn refract_all(c: &Corpus, args: &RefractAllArgs, out: &mut Out<'_>) -> Result<(), ApiError> {
    let views = parse_views(args.views.as_deref())?;
    let exec = execution(args.sequential);
    if !args.bench {
        let report = ops::refract_all(c, &views, exec)?;
        return out.show(&report, human::materialization);
    }
    out.note(&format!("extending the ontology to {} graphs", args.target));
    let started = Instant::now();
    let synthetic = extend_to_graph_count(&c.ontology, args.target)?;
    let generation_ms = started.elapsed().as_millis();
    out.note(&format!("generated {} entities in {generation_ms} ms; materializing", synthetic.entities_added));
    let report = ops::refract_all(c, &views, exec)?;
    let bench = BenchReport {
        execution: format!("{exec:?}").to_lowercase(),
        graph_count: report.graph_count,
        elapsed_ms: report.elapsed.as_millis(),
        failures: report.failures.len(),
        manifest_digest: report.manifest_digest,
        generation_ms,
        synthetic,
    };
    out.show(&bench, human::bench)
}

fn serve(cli: &Cli, config: Option<&Path>, listen: Option<&str>, out: &mut Out<'_>) -> Result<(), ApiError> {
    let mut config = Config::load(config)?;
    if let Some(dir) = &cli.data_dir {
        config.data_dir = dir.clone();
    }
    if let Some(addr) = listen {
        config.listen_addr = addr.to_owned();
    }
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build().map_err(io_error)?;
    rt.block_on(async {
        let handle = plp_service::serve(config).await?;
        let listening = Listening { listen_addr: handle.local_addr.to_string() };
        out.show(&listening, |l| format!("listening on http://{}", l.listen_addr))?;
        tokio::signal::ctrl_c().await.map_err(io_error)?;
        out.note("shutting down");
        handle.shutdown().await.map_err(io_error)
    })
}

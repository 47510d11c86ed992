//! `processkit`: validate metamodels and models, ingest snapshots, serve the
//! process API, write its OpenAPI document and produce exports offline.
//!
//! Exit codes: 0 success, 1 metamodel/model/profile errors or convention
//! findings, 2 usage errors, 3 I/O errors.

use std::io::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use processkit_core::export::{self, ExportKind};
use processkit_core::model::{declared_identity, DirAssets, ModelStore};
use processkit_core::openapi::generate_openapi;
use processkit_core::tailoring::SavedProfile;
use processkit_core::{derive_route_table, ingest_model, parse_metamodel, validate_conventions, Metamodel, ModelSnapshot};
use processkit_server::{Config, ConfigError, Service};

#[derive(Parser)]
#[command(name = "processkit", version, about = "Metamodel-driven process API tooling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a metamodel against the modelling conventions, and optionally a
    /// model against the metamodel.
    Validate {
        #[arg(long)]
        metamodel: PathBuf,
        #[command(flatten)]
        model: OptionalModel,
    },
    /// Ingest a model and write its snapshot into a store directory.
    Ingest {
        #[arg(long)]
        metamodel: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        /// Store directory; the snapshot lands in `{out}/{variant}/{version}.xml`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the HTTP service.
    Serve {
        /// TOML configuration file.
        #[arg(long, conflicts_with_all = ["metamodel", "model"])]
        config: Option<PathBuf>,
        #[arg(long, required_unless_present = "config")]
        metamodel: Option<PathBuf>,
        #[command(flatten)]
        model: OptionalModel,
        /// Overrides the port of the configured listen address; 0 picks a free one.
        #[arg(long)]
        port: Option<u16>,
    },
    /// Write the OpenAPI document of the derived API.
    Openapi {
        #[arg(long)]
        metamodel: PathBuf,
        /// Model whose characteristics become tailoring parameters.
        #[command(flatten)]
        model: OptionalModel,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Defaults to the `--out` extension, else YAML.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Generate an export archive for a tailoring profile.
    Export {
        /// process-doc, doc-templates or project-plan.
        kind: ExportKind,
        #[arg(long)]
        metamodel: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        /// Profile JSON `{"name": ..., "selections": {...}}`; untailored when omitted.
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Archive path; defaults to `{variant}-{version}-{kind}.zip`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    model: PathBuf,
    /// Defaults to the `variant` declared by the model document.
    #[arg(long)]
    variant: Option<String>,
    /// Defaults to the `version` declared by the model document.
    #[arg(long)]
    version: Option<String>,
    /// Directory asset `href`s are resolved against; defaults to the model's directory.
    #[arg(long)]
    assets: Option<PathBuf>,
}

#[derive(Args)]
struct OptionalModel {
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, requires = "model")]
    variant: Option<String>,
    #[arg(long, requires = "model")]
    version: Option<String>,
    #[arg(long, requires = "model")]
    assets: Option<PathBuf>,
}

impl OptionalModel {
    fn into_model(self) -> Option<ModelArgs> {
        self.model.map(|model| ModelArgs {
            model,
            variant: self.variant,
            version: self.version,
            assets: self.assets,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Yaml,
    Json,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self { code: 3, message: format!("{}: {e}", path.display()) }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        let code = match e {
            ConfigError::Io { .. } => 3,
            ConfigError::Syntax { .. } => 2,
            _ => 1,
        };
        let mut message = e.to_string();
        if let ConfigError::Conventions { report, .. } = &e {
            for finding in &report.findings {
                message.push_str(&format!("\n  {finding}"));
            }
        }
        Self { code, message }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure::io(path, e))
}

fn load_metamodel(path: &Path) -> Result<Metamodel, Failure> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    parse_metamodel(&text).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn load_model(mm: &Metamodel, args: &ModelArgs) -> Result<ModelSnapshot, Failure> {
    let bytes = read(&args.model)?;
    let invalid = |e: &dyn std::fmt::Display| Failure::invalid(format!("{}: {e}", args.model.display()));
    let (declared_variant, declared_version) = declared_identity(&bytes).map_err(|e| invalid(&e))?;
    let variant = args
        .variant
        .clone()
        .or(declared_variant)
        .ok_or_else(|| Failure::usage("the model declares no variant; pass --variant"))?;
    let version = args
        .version
        .clone()
        .or(declared_version)
        .ok_or_else(|| Failure::usage("the model declares no version; pass --version"))?;
    let assets = args
        .assets
        .clone()
        .or_else(|| args.model.parent().map(Path::to_owned))
        .unwrap_or_default();
    ingest_model(mm, &bytes, &variant, &version, &DirAssets(assets)).map_err(|e| invalid(&e))
}

fn require_conventions(mm: &Metamodel, path: &Path) -> Result<(), Failure> {
    let report = validate_conventions(mm);
    if report.is_clean() {
        return Ok(());
    }
    let mut message = format!("{}: {} convention finding(s)", path.display(), report.findings.len());
    for f in &report.findings {
        message.push_str(&format!("\n  {f}"));
    }
    Err(Failure::invalid(message))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { metamodel, model } => {
            let mm = load_metamodel(&metamodel)?;
            let report = validate_conventions(&mm);
            for finding in &report.findings {
                println!("{finding}");
            }
            if !report.is_clean() {
                return Err(Failure::invalid(format!(
                    "{}: {} convention finding(s)",
                    metamodel.display(),
                    report.findings.len()
                )));
            }
            let routes = derive_route_table(&mm).map_err(|e| Failure::invalid(e.to_string()))?;
            println!(
                "{}: ok ({} types, {} associations, {} routes)",
                metamodel.display(),
                mm.types().count(),
                mm.associations().len(),
                routes.len()
            );
            if let Some(model) = model.into_model() {
                let snapshot = load_model(&mm, &model)?;
                println!(
                    "{}: ok ({} {}, {} elements)",
                    model.model.display(),
                    snapshot.variant(),
                    snapshot.version(),
                    snapshot.elements().len()
                );
            }
            Ok(())
        }
        Command::Ingest { metamodel, model, out } => {
            let mm = load_metamodel(&metamodel)?;
            require_conventions(&mm, &metamodel)?;
            let snapshot = load_model(&mm, &model)?;
            let store = ModelStore::persistent(&out);
            let path = store
                .snapshot_path(snapshot.variant(), snapshot.version())
                .expect("persistent store");
            store.publish(snapshot).map_err(|e| Failure::io(&out, e))?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Serve { config, metamodel, model, port } => {
            let config = match config {
                Some(path) => Config::load(&path)?,
                None => {
                    let metamodel = metamodel.expect("clap requires it");
                    let model = model
                        .into_model()
                        .ok_or_else(|| Failure::usage("serve needs --config or --metamodel with --model"))?;
                    let mm = load_metamodel(&metamodel)?;
                    let snapshot = load_model(&mm, &model)?;
                    Config {
                        listen: "127.0.0.1:8080".into(),
                        default_variant: snapshot.variant().to_owned(),
                        metamodel,
                        store_dir: None,
                        models: vec![processkit_server::ModelSource {
                            path: model.model,
                            variant: snapshot.variant().to_owned(),
                            version: snapshot.version().to_owned(),
                            assets: model.assets,
                        }],
                    }
                }
            };
            let mut addr: SocketAddr = config
                .listen
                .parse()
                .map_err(|e| Failure::usage(format!("invalid listen address `{}`: {e}", config.listen)))?;
            if let Some(port) = port {
                addr.set_port(port);
            }
            let service = Arc::new(config.build_service()?);
            serve(addr, service)
        }
        Command::Openapi { metamodel, model, out, format } => {
            let mm = load_metamodel(&metamodel)?;
            require_conventions(&mm, &metamodel)?;
            let characteristics = match model.into_model() {
                Some(model) => load_model(&mm, &model)?.characteristics().to_vec(),
                None => Vec::new(),
            };
            let routes = derive_route_table(&mm).map_err(|e| Failure::invalid(e.to_string()))?;
            let doc = generate_openapi(&mm, &routes, &characteristics);
            let format = format.unwrap_or_else(|| match out.as_deref().and_then(Path::extension) {
                Some(ext) if ext == "json" => Format::Json,
                _ => Format::Yaml,
            });
            let text = match format {
                Format::Yaml => doc.to_yaml(),
                Format::Json => doc.to_json(),
            };
            match out {
                Some(path) => write(&path, text.as_bytes()),
                None => std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|e| Failure::io(Path::new("<stdout>"), e)),
            }
        }
        Command::Export { kind, metamodel, model, profile, out } => {
            let mm = load_metamodel(&metamodel)?;
            require_conventions(&mm, &metamodel)?;
            let snapshot = load_model(&mm, &model)?;
            let profile = match profile {
                Some(path) => {
                    let saved: SavedProfile = serde_json::from_slice(&read(&path)?)
                        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
                    saved
                        .to_profile(&snapshot)
                        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?
                }
                None => Default::default(),
            };
            let bundle = export::generate(kind, &snapshot, &mm, &profile, export::timestamp_now())
                .map_err(|e| Failure::invalid(e.to_string()))?;
            let out = out.unwrap_or_else(|| {
                PathBuf::from(format!("{}-{}-{kind}.zip", snapshot.variant(), snapshot.version()))
            });
            write(&out, &bundle.to_zip())?;
            println!("wrote {} ({} files)", out.display(), bundle.files.len() + 1);
            Ok(())
        }
    }
}

fn serve(addr: SocketAddr, service: Arc<Service>) -> Result<(), Failure> {
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure::io(Path::new("<runtime>"), e))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| Failure::io(Path::new(&addr.to_string()), e))?;
        let local = listener
            .local_addr()
            .map_err(|e| Failure::io(Path::new(&addr.to_string()), e))?;
        println!("listening on http://{local}");
        let _ = std::io::stdout().flush();
        processkit_server::http::serve(listener, service)
            .await
            .map_err(|e| Failure::io(Path::new(&local.to_string()), e))
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

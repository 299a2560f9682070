use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "nebfca", version, about = "Concept analysis over file metadata")]
pub struct Cli {
    /// Workspace document to read and write.
    #[arg(short, long, global = true, env = "NEBFCA_WORKSPACE", default_value = "nebfca.json")]
    pub workspace: PathBuf,

    /// Context to work on; may be omitted when the workspace holds only one.
    #[arg(short, long, global = true, env = "NEBFCA_CONTEXT")]
    pub context: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create a workspace document.
    Init {
        /// Fill it with the bundled example contexts.
        #[arg(long)]
        demo: bool,
        /// Overwrite an existing document.
        #[arg(long)]
        force: bool,
    },
    /// Add a context from a directory tree or a record file.
    Ingest {
        path: PathBuf,
        /// TOML tag rules (directories only).
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Context name; defaults to the file stem or directory name.
        #[arg(long)]
        name: Option<String>,
    },
    /// Set the scale plan of a context from a JSON file.
    Scale {
        #[arg(long)]
        plan: PathBuf,
    },
    /// Print the concept lattice.
    Lattice {
        #[arg(long, value_enum, default_value_t = LatticeFormat::Json)]
        format: LatticeFormat,
        /// Use the context extended with the knowledge system's classes.
        #[arg(long)]
        extended: bool,
    },
    /// Print the objects matching a descriptive name.
    Query {
        query: String,
        /// Only search within this view.
        #[arg(long)]
        scope: Option<String>,
    },
    #[command(subcommand)]
    View(ViewCommand),
    #[command(subcommand)]
    Share(ShareCommand),
    /// Compute the neighborhood of an object or attribute.
    Browse(BrowseArgs),
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:7878")]
        addr: String,
        /// Directory of static UI assets served at `/`.
        #[arg(long)]
        assets: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LatticeFormat {
    Json,
    Dot,
    Cxt,
}

/// Views of the knowledge system over a context.
#[derive(Debug, Subcommand)]
pub enum ViewCommand {
    Add {
        name: String,
        /// Parent views (none for the root).
        #[arg(long, value_delimiter = ',')]
        scope: Vec<String>,
        /// Descriptive name selecting the view's objects.
        #[arg(long, default_value = "*")]
        constructor: String,
        #[arg(long, default_value = "")]
        note: String,
    },
    List,
    Resolve { name: String },
}

/// Links between knowledge systems.
#[derive(Debug, Subcommand)]
pub enum ShareCommand {
    /// Scope class FROM on class TO, both written `context/view`.
    Link { from: String, to: String },
    /// Print the combined block matrix.
    Compose {
        /// Contexts to combine; defaults to every linked one.
        spaces: Vec<String>,
        #[arg(long, value_enum, default_value_t = MatrixFormat::Table)]
        format: MatrixFormat,
    },
    /// Objects of every space contained in a class `context/view`.
    Resolve { class: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MatrixFormat {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct BrowseArgs {
    /// Object or attribute name.
    #[arg(long)]
    pub seed: String,
    /// Minimum extent size of a reported concept.
    #[arg(long, default_value_t = 1)]
    pub threshold: usize,
    /// Keep only the k most specific attributes of an object seed.
    #[arg(long = "top-attrs")]
    pub top_attrs: Option<usize>,
    /// Jaccard distance radius around the seed.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Raise the threshold until at most this many concepts remain; 0 disables.
    #[arg(long, default_value_t = 50)]
    pub max_concepts: usize,
    #[arg(long)]
    pub json: bool,
}

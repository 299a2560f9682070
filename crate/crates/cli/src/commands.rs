use std::io::Write;
use std::path::Path;

use nebfca::navigation::Metric;
use nebfca::query::GRAMMAR;
use nebfca::scaling::ScalePlan;
use nebfca::sharing::{BlockMatrix, ClassRef};
use nebfca::workspace::{export_cxt, ingest_directory, lattice_to_dot, parse_records, TagRules};
use nebfca::{enumerate_concepts, fixtures, BrowseSession, Error, Filters, SharingLink, ViewSpec, WorkspaceDocument};

use crate::args::{BrowseArgs, Cli, Command, LatticeFormat, MatrixFormat, ShareCommand, ViewCommand};
use crate::ops;

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation; exit code 2.
    Usage(String),
    /// The command was understood but failed; exit code 1.
    Domain(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(p) => CliError::Usage(format!("query: {p}\n\ngrammar:\n{GRAMMAR}")),
            other => CliError::Domain(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(Error::Workspace(e.to_string()))
    }
}

type CliResult = Result<(), CliError>;

fn load(path: &Path) -> Result<WorkspaceDocument, CliError> {
    if !path.exists() {
        return Err(CliError::Domain(Error::Workspace(format!(
            "no workspace at {}; create one with `nebfca init` or `nebfca ingest`",
            path.display()
        ))));
    }
    Ok(WorkspaceDocument::load(path)?)
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Domain(Error::io(path, e)))
}

/// Run one command, writing its output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult {
    let ws = cli.workspace.as_path();
    let ctx = cli.context.as_deref();
    match cli.command {
        Command::Init { demo, force } => {
            if ws.exists() && !force {
                return Err(CliError::Domain(Error::Workspace(format!(
                    "{} already exists; pass --force to overwrite",
                    ws.display()
                ))));
            }
            let doc = if demo { fixtures::demo_workspace() } else { WorkspaceDocument::new() };
            doc.save(ws)?;
            writeln!(out, "created {} with {} contexts", ws.display(), doc.contexts.len())?;
        }
        Command::Ingest { path, rules, name } => {
            let mut doc = if ws.exists() { load(ws)? } else { WorkspaceDocument::new() };
            let name = match name {
                Some(n) => n,
                None => path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .ok_or_else(|| CliError::Usage(format!("cannot name a context after {}", path.display())))?,
            };
            let mv = if path.is_dir() {
                let rules = match rules {
                    Some(r) => TagRules::from_toml(&read(&r)?)?,
                    None => TagRules::default(),
                };
                let ingested = ingest_directory(&path, &rules)?;
                for w in &ingested.warnings {
                    eprintln!("warning: {}: {}", w.object, w.message);
                }
                ingested.context
            } else {
                if rules.is_some() {
                    return Err(CliError::Usage("--rules applies to directories only".into()));
                }
                parse_records(&read(&path)?)?
            };
            let (n, m) = (mv.objects().len(), mv.sorts().len());
            doc.put_context(&name, mv)?;
            doc.save(ws)?;
            writeln!(out, "context {name}: {n} objects, {m} sorts")?;
        }
        Command::Scale { plan } => {
            let mut doc = load(ws)?;
            let name = ops::pick_context(&doc, ctx)?;
            let plan: ScalePlan = serde_json::from_str(&read(&plan)?).map_err(|e| CliError::Domain(e.into()))?;
            doc.set_plan(&name, plan)?;
            doc.save(ws)?;
            let scaled = doc.formal_context(&name)?;
            writeln!(out, "context {name}: {} attributes", scaled.n_attributes())?;
        }
        Command::Lattice { format, extended } => {
            let doc = load(ws)?;
            let name = ops::pick_context(&doc, ctx)?;
            let fc = ops::formal_context(&doc, &name, extended)?;
            match format {
                LatticeFormat::Json => {
                    let lattice = enumerate_concepts(&fc).to_document();
                    writeln!(out, "{}", serde_json::to_string_pretty(&lattice).expect("lattice serializes"))?;
                }
                LatticeFormat::Dot => write!(out, "{}", lattice_to_dot(&enumerate_concepts(&fc)))?,
                LatticeFormat::Cxt => write!(out, "{}", export_cxt(&fc))?,
            }
        }
        Command::Query { query, scope } => {
            let doc = load(ws)?;
            let name = ops::pick_context(&doc, ctx)?;
            for g in ops::query(&doc, &name, &query, scope.as_deref())? {
                writeln!(out, "{g}")?;
            }
        }
        Command::View(cmd) => view(ws, ctx, cmd, out)?,
        Command::Share(cmd) => share(ws, cmd, out)?,
        Command::Browse(args) => browse(ws, ctx, args, out)?,
        Command::Serve { addr, assets } => {
            let doc = load(ws)?;
            crate::serve(doc, Some(ws.to_path_buf()), &addr, assets.as_deref())?;
        }
    }
    Ok(())
}

fn view(ws: &Path, ctx: Option<&str>, cmd: ViewCommand, out: &mut dyn Write) -> CliResult {
    let mut doc = load(ws)?;
    let name = ops::pick_context(&doc, ctx)?;
    match cmd {
        ViewCommand::Add {
            name: view,
            scope,
            constructor,
            note,
        } => {
            let scope: Vec<&str> = scope.iter().map(String::as_str).collect();
            let mut spec = ViewSpec::new(view.clone(), &scope, constructor);
            spec.note = note;
            doc.add_view(&name, spec)?;
            doc.save(ws)?;
            let n = doc.system(&name)?.resolve_view(&view)?.len();
            writeln!(out, "view {view}: {n} objects")?;
        }
        ViewCommand::List => {
            for v in ops::views(&doc, &name)? {
                let scope = if v.scope.is_empty() { "-".to_string() } else { v.scope.join(",") };
                writeln!(out, "{}\t{}\t{}\t{}", v.name, scope, v.constructor, v.objects.len())?;
            }
        }
        ViewCommand::Resolve { name: view } => {
            for g in doc.system(&name)?.resolve_view(&view)? {
                writeln!(out, "{g}")?;
            }
        }
    }
    Ok(())
}

fn print_matrix(m: &BlockMatrix, out: &mut dyn Write) -> std::io::Result<()> {
    let breaks: Vec<usize> = m.column_groups.iter().skip(1).map(|g| g.start).collect();
    for (i, c) in m.columns.iter().enumerate() {
        writeln!(out, "{:>4} {c}", i + 1)?;
    }
    writeln!(out)?;
    for (r, name) in m.rows.iter().enumerate() {
        if m.row_groups.iter().skip(1).any(|g| g.start == r) {
            writeln!(out)?;
        }
        let mut line = String::new();
        for (c, ch) in m.cells[r].chars().enumerate() {
            if breaks.contains(&c) {
                line.push('|');
            }
            line.push(ch);
        }
        writeln!(out, "{line}  {name}")?;
    }
    Ok(())
}

fn share(ws: &Path, cmd: ShareCommand, out: &mut dyn Write) -> CliResult {
    let mut doc = load(ws)?;
    match cmd {
        ShareCommand::Link { from, to } => {
            let link = SharingLink::parse(&from, &to).map_err(|e| CliError::Usage(e.to_string()))?;
            doc.add_link(link)?;
            doc.save(ws)?;
            writeln!(out, "linked {from} -> {to}")?;
        }
        ShareCommand::Compose { spaces, format } => {
            let shared = ops::shared(&doc, &spaces, None)?;
            match format {
                MatrixFormat::Json => {
                    let summary = ops::shared_summary(&shared);
                    writeln!(out, "{}", serde_json::to_string_pretty(&summary).expect("matrix serializes"))?;
                }
                MatrixFormat::Table => print_matrix(&shared.block_matrix(), out)?,
            }
        }
        ShareCommand::Resolve { class } => {
            let class: ClassRef = class.parse().map_err(|e: Error| CliError::Usage(e.to_string()))?;
            let shared = ops::shared(&doc, &[], None)?;
            for g in shared.resolve_across(&class.space, &class.class)? {
                writeln!(out, "{g}")?;
            }
        }
    }
    Ok(())
}

fn browse(ws: &Path, ctx: Option<&str>, args: BrowseArgs, out: &mut dyn Write) -> CliResult {
    let doc = load(ws)?;
    let name = ops::pick_context(&doc, ctx)?;
    let session = BrowseSession::new(doc.formal_context(&name)?);
    let seed = ops::seed_for(session.context(), &args.seed)?;
    let mut filters = Filters::none().with_threshold(args.threshold);
    if let Some(k) = args.top_attrs {
        filters = filters.with_top_k(k);
    }
    if let Some(r) = args.radius {
        filters = filters.with_ball(Metric::Jaccard, r);
    }
    filters.max_concepts = (args.max_concepts > 0).then_some(args.max_concepts);
    let hood = session.neighborhood(&seed, &filters)?;
    let doc = hood.to_document();
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("neighborhood serializes"))?;
        return Ok(());
    }
    writeln!(
        out,
        "{seed}: {} concepts (threshold {})",
        doc.concepts.len(),
        doc.filters.threshold
    )?;
    for c in &doc.concepts {
        writeln!(out, "{{{}}} {{{}}}", c.extent.join(", "), c.intent.join(", "))?;
    }
    Ok(())
}

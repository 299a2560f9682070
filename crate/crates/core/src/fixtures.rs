//! Reference datasets shipped with the crate.

use crate::cks::{ConceptualKnowledgeSystem, ViewSpec};
use crate::context::{AttributeValue, FormalContext, ManyValuedContext};
use crate::scaling::{scale, ScaleKind, ScalePlan};
use crate::sharing::{ClassRef, SharingLink};
use crate::workspace::{parse_records, WorkspaceDocument};

pub const DOCUMENTS_RECORDS: &str = include_str!("../fixtures/documents.records");
pub const UNIVERSE_RECORDS: &str = include_str!("../fixtures/universe.records");
pub const MARVEL_RECORDS: &str = include_str!("../fixtures/marvel.records");

/// Five documents tagged with project and format; plan2.doc has no format.
pub fn documents() -> ManyValuedContext {
    parse_records(DOCUMENTS_RECORDS).expect("fixture parses")
}

/// Nominal scaling of [`documents`].
pub fn documents_formal_context() -> FormalContext {
    let mv = documents();
    scale(&mv, &ScalePlan::nominal(&mv)).expect("fixture scales")
}

/// The document space plus notes0.txt (project plan1, format text).
pub fn universe() -> ManyValuedContext {
    parse_records(UNIVERSE_RECORDS).expect("fixture parses")
}

/// Government publications with their catalogue class paths.
pub fn marvel() -> ManyValuedContext {
    parse_records(MARVEL_RECORDS).expect("fixture parses")
}

/// Views over [`universe`]: a root, a document view below it, and one view
/// per format and project below that.
pub fn universe_views() -> Vec<ViewSpec> {
    vec![
        ViewSpec::new("Object", &[], "*"),
        ViewSpec::new("Document", &["Object"], "*"),
        ViewSpec::new("PostScript", &["Document"], "format=postscript"),
        ViewSpec::new("Plan1", &["Document"], "project=plan1"),
        ViewSpec::new("Plan2", &["Document"], "project=plan2"),
    ]
}

pub fn universe_system() -> ConceptualKnowledgeSystem {
    let mv = universe();
    let plan = ScalePlan::nominal(&mv);
    ConceptualKnowledgeSystem::new(mv, plan, universe_views()).expect("fixture views are valid")
}

/// Nominal on `class`, `subject` and `published-by`; every other sort skipped.
pub fn marvel_plan(mv: &ManyValuedContext) -> ScalePlan {
    let mut plan = ScalePlan::default();
    for sort in mv.sorts() {
        let kind = if matches!(sort.as_str(), "class" | "subject" | "published-by") {
            ScaleKind::Nominal
        } else {
            ScaleKind::Skip
        };
        plan = plan.with(sort.clone(), kind);
    }
    plan
}

/// Class paths observed in the `class` sort of [`marvel`].
pub fn marvel_class_paths(mv: &ManyValuedContext) -> Vec<String> {
    let Some(a) = mv.sort_position("class") else {
        return Vec::new();
    };
    mv.domain(a)
        .iter()
        .filter_map(|v| match v {
            AttributeValue::Text(t) => Some(t.clone()),
            _ => None,
        })
        .collect()
}

/// One view per prefix of a colon-separated class path, scoped on the next
/// shorter prefix, under a single root.
pub fn class_hierarchy(root: &str, paths: &[String]) -> Vec<ViewSpec> {
    let mut prefixes: Vec<String> = Vec::new();
    for path in paths {
        let parts: Vec<&str> = path.split(':').collect();
        for k in 1..=parts.len() {
            let prefix = parts[..k].join(":");
            if !prefixes.contains(&prefix) {
                prefixes.push(prefix);
            }
        }
    }
    prefixes.sort();
    let mut views = vec![ViewSpec::new(root, &[], "*")];
    for p in prefixes {
        let parent = match p.rsplit_once(':') {
            Some((head, _)) => head.to_string(),
            None => root.to_string(),
        };
        let pattern = format!("^{}(:|$)", regex::escape(&p)).replace('/', "\\/");
        views.push(ViewSpec::new(p, &[parent.as_str()], format!("class~/{pattern}/")));
    }
    views
}

pub fn marvel_views(mv: &ManyValuedContext) -> Vec<ViewSpec> {
    class_hierarchy("Marvel", &marvel_class_paths(mv))
}

pub fn marvel_system() -> ConceptualKnowledgeSystem {
    let mv = marvel();
    let plan = marvel_plan(&mv);
    let views = marvel_views(&mv);
    ConceptualKnowledgeSystem::new(mv, plan, views).expect("fixture views are valid")
}

/// A reader's own space: no objects yet, one view collecting documents on
/// nuclear waste once it is linked to other spaces.
pub fn reader_system() -> ConceptualKnowledgeSystem {
    let mv = ManyValuedContext::new(Vec::new(), vec!["subject".into()], Vec::new())
        .expect("empty context");
    let plan = ScalePlan::nominal(&mv);
    let views = vec![
        ViewSpec::new("Reader", &[], "*"),
        ViewSpec::new("NuclearWaste", &["Reader"], "subject~/nuclear waste/"),
    ];
    ConceptualKnowledgeSystem::new(mv, plan, views).expect("fixture views are valid")
}

/// The catalogue's class tree as a space of its own, with no objects.
pub fn catalogue_system() -> ConceptualKnowledgeSystem {
    let mv = ManyValuedContext::new(Vec::new(), vec!["class".into()], Vec::new()).expect("empty context");
    let plan = ScalePlan::nominal(&mv);
    let views = class_hierarchy("Catalogue", &marvel_class_paths(&marvel()));
    ConceptualKnowledgeSystem::new(mv, plan, views).expect("fixture views are valid")
}

/// NuclearWaste scoped on the energy, White House and legislative classes.
pub fn reader_links() -> Vec<SharingLink> {
    ["Executive:Energy", "Executive:White House", "Legislative"]
        .iter()
        .map(|c| SharingLink::new(ClassRef::new("reader", "NuclearWaste"), ClassRef::new("marvel", *c)))
        .collect()
}

/// Each class a publication was filed under, linked to the same class of the catalogue tree.
pub fn catalogue_links() -> Vec<SharingLink> {
    marvel_class_paths(&marvel())
        .into_iter()
        .map(|p| SharingLink::new(ClassRef::new("marvel", p.clone()), ClassRef::new("catalogue", p)))
        .collect()
}

pub const DEMO_WORKSPACE: &str = include_str!("../fixtures/demo.workspace.json");

/// Every fixture in one workspace document.
pub fn demo_workspace() -> WorkspaceDocument {
    let mut doc = WorkspaceDocument::new();
    let documents = documents();
    doc.plans.insert("documents".into(), ScalePlan::nominal(&documents));
    doc.contexts.insert("documents".into(), documents);

    let universe = universe_system();
    doc.plans.insert("universe".into(), universe.plan().clone());
    doc.systems.insert("universe".into(), universe.specs().to_vec());
    doc.contexts.insert("universe".into(), universe.base().clone());

    for (name, sys) in [
        ("marvel", marvel_system()),
        ("catalogue", catalogue_system()),
        ("reader", reader_system()),
    ] {
        doc.plans.insert(name.into(), sys.plan().clone());
        doc.systems.insert(name.into(), sys.specs().to_vec());
        doc.contexts.insert(name.into(), sys.base().clone());
    }
    doc.links = reader_links();
    doc.links.extend(catalogue_links());
    doc.notes = vec![
        "documents: five files tagged by project and format; plan2.doc has no format".into(),
        "universe: the documents plus notes0.txt, organized by five views".into(),
        "marvel: government publications filed under catalogue menu paths; \"Legislative:Technology Assesme\" is truncated in the source listing and kept verbatim".into(),
        "catalogue: the menu tree on its own, linked from the classes publications were filed under".into(),
        "reader: a personal space whose NuclearWaste view draws on linked marvel classes".into(),
    ];
    doc
}

//! Operations shared by the command line and the HTTP service.

use nebfca::lattice::LatticeDocument;
use nebfca::query::evaluate_names;
use nebfca::sharing::BlockMatrix;
use nebfca::{
    compose, enumerate_concepts, parse, Error, FormalContext, Result, Seed, SharedSpace, SharingLink,
    WorkspaceDocument,
};
use serde::Serialize;

/// The context a command applies to: the one named, or the only one there is.
pub fn pick_context(doc: &WorkspaceDocument, name: Option<&str>) -> Result<String> {
    match name {
        Some(n) => {
            doc.context(n)?;
            Ok(n.to_string())
        }
        None if doc.contexts.len() == 1 => Ok(doc.contexts.keys().next().unwrap().clone()),
        None if doc.contexts.is_empty() => Err(Error::Workspace("the workspace has no contexts".into())),
        None => Err(Error::Workspace(format!(
            "several contexts ({}); choose one with --context",
            doc.contexts.keys().cloned().collect::<Vec<_>>().join(", ")
        ))),
    }
}

/// Objects of `context` matching `q`, optionally within a view.
pub fn query(doc: &WorkspaceDocument, context: &str, q: &str, scope: Option<&str>) -> Result<Vec<String>> {
    let mv = doc.context(context)?;
    let q = parse(q)?;
    let scope = match scope {
        Some(view) => Some(doc.system(context)?.resolve_view(view)?),
        None => None,
    };
    evaluate_names(&q, mv, scope.as_deref())
}

pub fn formal_context(doc: &WorkspaceDocument, context: &str, extended: bool) -> Result<FormalContext> {
    if extended {
        doc.system(context)?.extend_context()
    } else {
        doc.formal_context(context)
    }
}

pub fn lattice(doc: &WorkspaceDocument, context: &str, extended: bool) -> Result<LatticeDocument> {
    Ok(enumerate_concepts(&formal_context(doc, context, extended)?).to_document())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ViewSummary {
    pub name: String,
    pub scope: Vec<String>,
    pub constructor: String,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
    pub objects: Vec<String>,
}

pub fn views(doc: &WorkspaceDocument, context: &str) -> Result<Vec<ViewSummary>> {
    let system = doc.system(context)?;
    system
        .specs()
        .iter()
        .map(|s| {
            Ok(ViewSummary {
                name: s.name.clone(),
                scope: s.scope.clone(),
                constructor: s.constructor.clone(),
                note: s.note.clone(),
                objects: system.resolve_view(&s.name)?,
            })
        })
        .collect()
}

/// Object seed if the name is an object, attribute seed if it is an attribute.
pub fn seed_for(ctx: &FormalContext, name: &str) -> Result<Seed> {
    if ctx.object_position(name).is_some() {
        Ok(Seed::Object(name.to_string()))
    } else if ctx.attribute_position(name).is_some() {
        Ok(Seed::Attribute(name.to_string()))
    } else {
        Err(Error::unknown("object or attribute", name))
    }
}

/// Compose `spaces` (all linked contexts if empty) with `links`, or with the
/// workspace links between them when `links` is `None`.
pub fn shared(doc: &WorkspaceDocument, spaces: &[String], links: Option<Vec<SharingLink>>) -> Result<SharedSpace> {
    let Some(links) = links else {
        return doc.shared(spaces);
    };
    let names: Vec<String> = if spaces.is_empty() {
        let mut n: Vec<String> = links
            .iter()
            .flat_map(|l| [l.from.space.clone(), l.to.space.clone()])
            .collect();
        n.sort();
        n.dedup();
        n
    } else {
        spaces.to_vec()
    };
    let mut systems = Vec::with_capacity(names.len());
    for n in &names {
        systems.push((n.clone(), doc.system(n)?));
    }
    compose(systems, links)
}

#[derive(Clone, Debug, Serialize)]
pub struct SharedSummary {
    pub spaces: Vec<String>,
    pub links: Vec<SharingLink>,
    pub matrix: BlockMatrix,
}

pub fn shared_summary(space: &SharedSpace) -> SharedSummary {
    SharedSummary {
        spaces: space.space_ids().to_vec(),
        links: space.links().to_vec(),
        matrix: space.block_matrix(),
    }
}

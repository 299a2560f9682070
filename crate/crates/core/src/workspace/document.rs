//! The workspace document: every context, plan, view and link in one JSON file.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cks::{ConceptualKnowledgeSystem, ViewSpec};
use crate::context::{FormalContext, ManyValuedContext};
use crate::error::{Error, Result};
use crate::scaling::{scale, ScalePlan};
use crate::sharing::{SharedSpace, SharingLink};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceDocument {
    pub version: u32,
    #[serde(default)]
    pub contexts: BTreeMap<String, ManyValuedContext>,
    /// Scale plan per context; a context without one is scaled nominally.
    #[serde(default)]
    pub plans: BTreeMap<String, ScalePlan>,
    /// Views per context.
    #[serde(default)]
    pub systems: BTreeMap<String, Vec<ViewSpec>>,
    #[serde(default)]
    pub links: Vec<SharingLink>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl Default for WorkspaceDocument {
    fn default() -> Self {
        WorkspaceDocument {
            version: FORMAT_VERSION,
            contexts: BTreeMap::new(),
            plans: BTreeMap::new(),
            systems: BTreeMap::new(),
            links: Vec::new(),
            notes: Vec::new(),
        }
    }
}

impl WorkspaceDocument {
    pub fn new() -> Self {
        WorkspaceDocument::default()
    }

    pub fn context(&self, name: &str) -> Result<&ManyValuedContext> {
        self.contexts.get(name).ok_or_else(|| Error::unknown("context", name))
    }

    pub fn plan_for(&self, name: &str) -> Result<ScalePlan> {
        let mv = self.context(name)?;
        Ok(self
            .plans
            .get(name)
            .cloned()
            .unwrap_or_else(|| ScalePlan::nominal(mv)))
    }

    pub fn formal_context(&self, name: &str) -> Result<FormalContext> {
        scale(self.context(name)?, &self.plan_for(name)?)
    }

    pub fn views(&self, name: &str) -> Result<&[ViewSpec]> {
        self.context(name)?;
        Ok(self.systems.get(name).map(Vec::as_slice).unwrap_or_default())
    }

    pub fn system(&self, name: &str) -> Result<ConceptualKnowledgeSystem> {
        ConceptualKnowledgeSystem::new(
            self.context(name)?.clone(),
            self.plan_for(name)?,
            self.views(name)?.to_vec(),
        )
    }

    /// Compose the named spaces with every link between them. With no names,
    /// every context that takes part in a link is included.
    pub fn shared(&self, names: &[String]) -> Result<SharedSpace> {
        let names: Vec<String> = if names.is_empty() {
            self.contexts
                .keys()
                .filter(|c| self.links.iter().any(|l| &l.from.space == *c || &l.to.space == *c))
                .cloned()
                .collect()
        } else {
            names.to_vec()
        };
        let mut spaces = Vec::with_capacity(names.len());
        for n in &names {
            spaces.push((n.clone(), self.system(n)?));
        }
        let links = self
            .links
            .iter()
            .filter(|l| names.contains(&l.from.space) && names.contains(&l.to.space))
            .cloned()
            .collect();
        SharedSpace::compose(spaces, links)
    }

    /// Check every cross-reference.
    pub fn validate(&self) -> Result<()> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Workspace(format!(
                "unsupported format version {} (expected {FORMAT_VERSION})",
                self.version
            )));
        }
        for (name, plan) in &self.plans {
            plan.validate(self.context(name)?, true)?;
        }
        for name in self.systems.keys() {
            self.system(name)?;
        }
        for link in &self.links {
            for end in [&link.from, &link.to] {
                self.context(&end.space)?;
                if !self.views(&end.space)?.iter().any(|v| v.name == end.class) {
                    return Err(Error::unknown("class", end.to_string()));
                }
            }
        }
        if !self.links.is_empty() {
            self.shared(&[])?;
        }
        Ok(())
    }

    /// Add or replace a context; its plan and views must still fit.
    pub fn put_context(&mut self, name: &str, mv: ManyValuedContext) -> Result<()> {
        crate::context::check_identifier("context", name)?;
        if name.contains('/') {
            return Err(Error::Workspace(format!("context name `{name}` contains `/`")));
        }
        let mut next = self.clone();
        next.contexts.insert(name.to_string(), mv);
        next.validate()?;
        *self = next;
        Ok(())
    }

    pub fn set_plan(&mut self, name: &str, plan: ScalePlan) -> Result<()> {
        let mut next = self.clone();
        next.plans.insert(name.to_string(), plan);
        next.validate()?;
        *self = next;
        Ok(())
    }

    pub fn add_view(&mut self, context: &str, view: ViewSpec) -> Result<()> {
        self.context(context)?;
        let mut next = self.clone();
        next.systems.entry(context.to_string()).or_default().push(view);
        next.validate()?;
        *self = next;
        Ok(())
    }

    pub fn add_link(&mut self, link: SharingLink) -> Result<()> {
        if self.links.contains(&link) {
            return Ok(());
        }
        let mut next = self.clone();
        next.links.push(link);
        next.validate()?;
        *self = next;
        Ok(())
    }

    /// Canonical serialization: pretty JSON with sorted maps and a final newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("workspace serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: WorkspaceDocument = serde_json::from_str(text)?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Write through a temporary file so a crash never leaves half a document.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, self.to_json()).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }
}

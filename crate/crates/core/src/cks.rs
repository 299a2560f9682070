//! Conceptual knowledge systems built from views.
//!
//! A view selects objects with a descriptive name (its constructor) from the
//! objects of its scope parents. Views are the classes of the system; the
//! system carries four relations between classes, objects and scaled
//! attributes:
//!
//! | incidence   | classes       | attributes     |
//! |-------------|---------------|----------------|
//! | **classes** | organization  | distinguishing |
//! | **objects** | instantiation | having         |

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bitset::{BitMatrix, BitSet};
use crate::context::{FormalContext, ManyValuedContext};
use crate::error::{Error, Result};
use crate::query::{self, to_scaled_attributes, DescriptiveName, ScaledQuery};
use crate::scaling::{scale, ScalePlan};

/// A view as written by a user: constructor kept as query text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewSpec {
    pub name: String,
    #[serde(default)]
    pub scope: Vec<String>,
    pub constructor: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl ViewSpec {
    pub fn new(name: impl Into<String>, scope: &[&str], constructor: impl Into<String>) -> Self {
        ViewSpec {
            name: name.into(),
            scope: scope.iter().map(|s| s.to_string()).collect(),
            constructor: constructor.into(),
            note: String::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct View {
    pub name: String,
    pub scope: Vec<String>,
    pub constructor: DescriptiveName,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateName { name: String },
    UnknownParent { view: String, parent: String },
    Cycle { path: Vec<String> },
    NoRoot,
    MultipleRoots { roots: Vec<String> },
    BadConstructor { view: String, message: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateName { name } => write!(f, "view `{name}` is defined more than once"),
            Violation::UnknownParent { view, parent } => {
                write!(f, "view `{view}` is scoped on unknown view `{parent}`")
            }
            Violation::Cycle { path } => write!(f, "scope cycle: {}", path.join(" -> ")),
            Violation::NoRoot => f.write_str("no root view (every view has a scope)"),
            Violation::MultipleRoots { roots } => {
                write!(f, "more than one root view: {}", roots.join(", "))
            }
            Violation::BadConstructor { view, message } => {
                write!(f, "view `{view}`: {message}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Find one scope cycle per strongly connected tangle, as a closed path.
fn find_cycles(specs: &[ViewSpec], index: &HashMap<&str, usize>) -> Vec<Vec<String>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    fn visit(
        v: usize,
        specs: &[ViewSpec],
        index: &HashMap<&str, usize>,
        marks: &mut [Mark],
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<String>>,
    ) {
        marks[v] = Mark::Active;
        stack.push(v);
        for parent in &specs[v].scope {
            let Some(&p) = index.get(parent.as_str()) else { continue };
            match marks[p] {
                Mark::New => visit(p, specs, index, marks, stack, out),
                Mark::Active => {
                    let start = stack.iter().position(|&x| x == p).unwrap();
                    let mut path: Vec<String> =
                        stack[start..].iter().map(|&x| specs[x].name.clone()).collect();
                    path.push(specs[p].name.clone());
                    out.push(path);
                }
                Mark::Done => {}
            }
        }
        stack.pop();
        marks[v] = Mark::Done;
    }

    let mut marks = vec![Mark::New; specs.len()];
    let mut out = Vec::new();
    for v in 0..specs.len() {
        if marks[v] == Mark::New {
            visit(v, specs, index, &mut marks, &mut Vec::new(), &mut out);
        }
    }
    out
}

/// Check names, scopes and constructors of a set of views against `base`.
pub fn validate(specs: &[ViewSpec], base: &ManyValuedContext) -> ValidationReport {
    let mut violations = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, s) in specs.iter().enumerate() {
        if index.insert(s.name.as_str(), i).is_some() {
            violations.push(Violation::DuplicateName {
                name: s.name.clone(),
            });
        }
    }
    for s in specs {
        for p in &s.scope {
            if !index.contains_key(p.as_str()) {
                violations.push(Violation::UnknownParent {
                    view: s.name.clone(),
                    parent: p.clone(),
                });
            }
        }
    }
    for path in find_cycles(specs, &index) {
        violations.push(Violation::Cycle { path });
    }
    if !specs.is_empty() {
        let roots: Vec<String> = specs
            .iter()
            .filter(|s| s.scope.is_empty())
            .map(|s| s.name.clone())
            .collect();
        match roots.len() {
            0 => violations.push(Violation::NoRoot),
            1 => {}
            _ => violations.push(Violation::MultipleRoots { roots }),
        }
    }
    let nothing = BitSet::new(base.objects().len());
    for s in specs {
        let message = match query::parse(&s.constructor) {
            Err(e) => Some(e.to_string()),
            // type-check against the base without selecting anything
            Ok(q) => query::evaluate(&q, base, &nothing).err().map(|e| e.to_string()),
        };
        if let Some(message) = message {
            violations.push(Violation::BadConstructor {
                view: s.name.clone(),
                message,
            });
        }
    }
    ValidationReport { violations }
}

/// The four relations of a knowledge system, as boolean matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnowledgeRelations {
    pub classes: Vec<String>,
    pub objects: Vec<String>,
    pub attributes: Vec<String>,
    /// classes × classes; row c holds every c′ with c ≤ c′.
    pub organization: BitMatrix,
    /// classes × attributes.
    pub distinguishing: BitMatrix,
    /// objects × classes.
    pub instantiation: BitMatrix,
    /// objects × attributes.
    pub having: BitMatrix,
}

impl KnowledgeRelations {
    /// Incidence closure: organization made reflexive and transitive,
    /// instantiation closed upward along it, distinguishing inherited downward.
    pub fn close(&self) -> KnowledgeRelations {
        let organization = self.organization.reflexive_transitive_closure();
        let instantiation = self.instantiation.compose(&organization);
        let distinguishing = organization.compose(&self.distinguishing);
        KnowledgeRelations {
            classes: self.classes.clone(),
            objects: self.objects.clone(),
            attributes: self.attributes.clone(),
            organization,
            distinguishing,
            instantiation,
            having: self.having.clone(),
        }
    }

    /// Block matrix `[[organization, distinguishing], [instantiation, having]]`
    /// as rows of booleans, classes first.
    pub fn block_rows(&self) -> Vec<Vec<bool>> {
        let nc = self.classes.len();
        let na = self.attributes.len();
        let mut out = Vec::with_capacity(nc + self.objects.len());
        for c in 0..nc {
            out.push(
                (0..nc)
                    .map(|d| self.organization.get(c, d))
                    .chain((0..na).map(|a| self.distinguishing.get(c, a)))
                    .collect(),
            );
        }
        for g in 0..self.objects.len() {
            out.push(
                (0..nc)
                    .map(|d| self.instantiation.get(g, d))
                    .chain((0..na).map(|a| self.having.get(g, a)))
                    .collect(),
            );
        }
        out
    }
}

/// An immutable snapshot of a base context, its scale and its views.
#[derive(Clone, Debug)]
pub struct ConceptualKnowledgeSystem {
    base: ManyValuedContext,
    plan: ScalePlan,
    scaled: FormalContext,
    specs: Vec<ViewSpec>,
    views: Vec<View>,
    view_index: HashMap<String, usize>,
    topo: Vec<usize>,
    containment: Vec<BitSet>,
    direct: KnowledgeRelations,
    closed: KnowledgeRelations,
}

impl ConceptualKnowledgeSystem {
    pub fn new(base: ManyValuedContext, plan: ScalePlan, specs: Vec<ViewSpec>) -> Result<Self> {
        let report = validate(&specs, &base);
        if !report.is_ok() {
            return Err(Error::Validation(report));
        }
        let scaled = scale(&base, &plan)?;
        let views: Vec<View> = specs
            .iter()
            .map(|s| View {
                name: s.name.clone(),
                scope: s.scope.clone(),
                constructor: query::parse(&s.constructor).expect("validated"),
                note: s.note.clone(),
            })
            .collect();
        let view_index: HashMap<String, usize> =
            views.iter().enumerate().map(|(i, v)| (v.name.clone(), i)).collect();
        let parents: Vec<Vec<usize>> = views
            .iter()
            .map(|v| v.scope.iter().map(|p| view_index[p]).collect())
            .collect();

        // parents before children, ties in definition order
        let mut topo = Vec::with_capacity(views.len());
        let mut placed = vec![false; views.len()];
        while topo.len() < views.len() {
            let next = (0..views.len())
                .find(|&v| !placed[v] && parents[v].iter().all(|&p| placed[p]))
                .expect("validated acyclic");
            placed[next] = true;
            topo.push(next);
        }

        let n = base.objects().len();
        let mut containment = vec![BitSet::new(n); views.len()];
        for &v in &topo {
            let mut scope = BitSet::full(n);
            for &p in &parents[v] {
                scope.intersect_with(&containment[p]);
            }
            containment[v] = query::evaluate(&views[v].constructor, &base, &scope)?;
        }

        let nc = views.len();
        let mut organization = BitMatrix::new(nc, nc);
        for (v, ps) in parents.iter().enumerate() {
            for &p in ps {
                organization.set(v, p);
            }
        }
        let ancestors = organization.reflexive_transitive_closure();

        let mut distinguishing = BitMatrix::new(nc, scaled.n_attributes());
        for v in 0..nc {
            let mut intent = scaled.intent_of(&containment[v]);
            let chain = ancestors
                .row(v)
                .iter()
                .fold(DescriptiveName::All, |q, a| q.and(&views[a].constructor));
            if let ScaledQuery::Attributes(names) = to_scaled_attributes(&chain, &plan, &base) {
                let allowed = BitSet::from_indices(
                    scaled.n_attributes(),
                    names.iter().filter_map(|m| scaled.attribute_position(m)),
                );
                intent.intersect_with(&allowed);
            }
            *distinguishing.row_mut(v) = intent;
        }

        let mut instantiation = BitMatrix::new(n, nc);
        for (v, set) in containment.iter().enumerate() {
            for g in set.iter() {
                instantiation.set(g, v);
            }
        }

        let direct = KnowledgeRelations {
            classes: views.iter().map(|v| v.name.clone()).collect(),
            objects: base.objects().to_vec(),
            attributes: scaled.attributes().to_vec(),
            organization,
            distinguishing,
            instantiation,
            having: scaled.incidence().clone(),
        };
        let closed = direct.close();

        Ok(ConceptualKnowledgeSystem {
            base,
            plan,
            scaled,
            specs,
            views,
            view_index,
            topo,
            containment,
            direct,
            closed,
        })
    }

    pub fn base(&self) -> &ManyValuedContext {
        &self.base
    }

    pub fn plan(&self) -> &ScalePlan {
        &self.plan
    }

    pub fn scaled(&self) -> &FormalContext {
        &self.scaled
    }

    pub fn specs(&self) -> &[ViewSpec] {
        &self.specs
    }

    pub fn views(&self) -> &[View] {
        &self.views
    }

    pub fn view_position(&self, name: &str) -> Option<usize> {
        self.view_index.get(name).copied()
    }

    pub fn require_view(&self, name: &str) -> Result<usize> {
        self.view_position(name).ok_or_else(|| Error::unknown("view", name))
    }

    /// Views in scope order: every view after all of its parents.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn containment(&self, v: usize) -> &BitSet {
        &self.containment[v]
    }

    /// Objects contained in a view, in base order.
    pub fn resolve_view(&self, name: &str) -> Result<Vec<String>> {
        let v = self.require_view(name)?;
        Ok(self
            .containment[v]
            .iter()
            .map(|g| self.base.objects()[g].clone())
            .collect())
    }

    /// The relations before closure: direct scope edges, direct containment.
    pub fn direct_relations(&self) -> &KnowledgeRelations {
        &self.direct
    }

    pub fn incidence_closure(&self) -> &KnowledgeRelations {
        &self.closed
    }

    /// The closed block matrix as one formal context: classes and objects as
    /// rows, classes and scaled attributes as columns.
    pub fn extend_context(&self) -> Result<FormalContext> {
        let r = &self.closed;
        let objects: Vec<String> = r.classes.iter().chain(&r.objects).cloned().collect();
        let attributes: Vec<String> = r.classes.iter().chain(&r.attributes).cloned().collect();
        let width = attributes.len();
        let rows = r
            .block_rows()
            .into_iter()
            .map(|row| BitSet::from_indices(width, row.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)))
            .collect();
        FormalContext::from_rows(objects, attributes, rows)
    }

    /// A new snapshot with one more view.
    pub fn with_view(&self, spec: ViewSpec) -> Result<Self> {
        let mut specs = self.specs.clone();
        specs.push(spec);
        ConceptualKnowledgeSystem::new(self.base.clone(), self.plan.clone(), specs)
    }
}

//! Neighborhood browsing over a formal context.
//!
//! A session starts from a many-valued context scaled facet by facet. From a
//! seed object or attribute, [`BrowseSession::neighborhood`] cuts out a small
//! subcontext of related items and reports the part of its lattice that
//! contains the seed. Neighborhoods can be merged with
//! [`BrowseSession::union_neighborhood`] to compare where browsing has gone.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::context::{FormalContext, ManyValuedContext};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_concepts, ConceptLattice};
use crate::scaling::{scale_facets, ScalePlan};

static NEXT_SESSION: AtomicU64 = AtomicU64::new(1);

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Seed {
    Object(String),
    Attribute(String),
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Seed::Object(g) => write!(f, "object {g}"),
            Seed::Attribute(m) => write!(f, "attribute {m}"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Jaccard,
}

impl Metric {
    pub fn id(self) -> &'static str {
        match self {
            Metric::Jaccard => "jaccard",
        }
    }

    pub fn similarity(self, a: &BitSet, b: &BitSet) -> f64 {
        match self {
            Metric::Jaccard => {
                let union = a.union_count(b);
                if union == 0 {
                    1.0
                } else {
                    a.intersection_count(b) as f64 / union as f64
                }
            }
        }
    }

    pub fn distance(self, a: &BitSet, b: &BitSet) -> f64 {
        1.0 - self.similarity(a, b)
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jaccard" => Ok(Metric::Jaccard),
            other => Err(Error::Filter(format!("unknown metric `{other}`"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    #[serde(default)]
    pub metric: Metric,
    pub radius: f64,
}

fn default_threshold() -> usize {
    1
}

fn default_max_concepts() -> Option<usize> {
    Some(50)
}

/// Pruning applied to a neighborhood.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Filters {
    /// Minimum extent size of a reported concept; 1 reports everything.
    #[serde(default = "default_threshold")]
    pub threshold: usize,
    /// Keep only the k most specific attributes.
    #[serde(default)]
    pub top_k: Option<usize>,
    #[serde(default)]
    pub ball: Option<Ball>,
    /// Raise the threshold until at most this many concepts are reported.
    #[serde(default = "default_max_concepts")]
    pub max_concepts: Option<usize>,
}

impl Default for Filters {
    fn default() -> Self {
        Filters {
            threshold: 1,
            top_k: None,
            ball: None,
            max_concepts: default_max_concepts(),
        }
    }
}

impl Filters {
    /// No pruning at all.
    pub fn none() -> Self {
        Filters {
            max_concepts: None,
            ..Filters::default()
        }
    }

    pub fn with_threshold(mut self, threshold: usize) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_top_k(mut self, k: usize) -> Self {
        self.top_k = Some(k);
        self
    }

    pub fn with_ball(mut self, metric: Metric, radius: f64) -> Self {
        self.ball = Some(Ball { metric, radius });
        self
    }

    fn check(&self) -> Result<()> {
        if self.threshold == 0 {
            return Err(Error::Filter("threshold must be positive".into()));
        }
        if self.max_concepts == Some(0) {
            return Err(Error::Filter("max_concepts must be positive".into()));
        }
        if let Some(ball) = &self.ball {
            if !(0.0..=1.0).contains(&ball.radius) {
                return Err(Error::Filter(format!("radius {} is outside [0, 1]", ball.radius)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Neighborhood {
    session: u64,
    pub seed: Option<Seed>,
    pub subcontext: FormalContext,
    pub lattice: ConceptLattice,
    /// The filters in effect, with the threshold actually used.
    pub filters: Filters,
    /// Indices into `lattice` of the concepts shown.
    pub reported: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportedConcept {
    pub id: usize,
    pub extent: Vec<String>,
    pub intent: Vec<String>,
}

/// Serializable form of a neighborhood.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodDocument {
    pub seed: Option<Seed>,
    pub objects: Vec<String>,
    pub attributes: Vec<String>,
    pub filters: Filters,
    pub concepts: Vec<ReportedConcept>,
    /// `[lower, upper]` ids among the reported concepts.
    pub covers: Vec<[usize; 2]>,
}

impl Neighborhood {
    pub fn session_id(&self) -> u64 {
        self.session
    }

    pub fn reported_extents(&self) -> Vec<Vec<String>> {
        self.reported
            .iter()
            .map(|&c| self.lattice.concept(c).extent_names(&self.subcontext))
            .collect()
    }

    pub fn to_document(&self) -> NeighborhoodDocument {
        let concepts = self
            .reported
            .iter()
            .map(|&c| {
                let concept = self.lattice.concept(c);
                ReportedConcept {
                    id: c,
                    extent: concept.extent_names(&self.subcontext),
                    intent: concept.intent_names(&self.subcontext),
                }
            })
            .collect();
        let mut covers = Vec::new();
        for &lo in &self.reported {
            for &hi in &self.reported {
                if lo == hi || !self.lattice.leq(lo, hi) {
                    continue;
                }
                let between = self
                    .reported
                    .iter()
                    .any(|&m| m != lo && m != hi && self.lattice.leq(lo, m) && self.lattice.leq(m, hi));
                if !between {
                    covers.push([lo, hi]);
                }
            }
        }
        covers.sort();
        NeighborhoodDocument {
            seed: self.seed.clone(),
            objects: self.subcontext.objects().to_vec(),
            attributes: self.subcontext.attributes().to_vec(),
            filters: self.filters.clone(),
            concepts,
            covers,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectSummary {
    pub object: String,
    pub degree: usize,
    /// Concepts of the full lattice whose extent contains the object.
    pub concepts: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeSummary {
    pub attribute: String,
    pub support: usize,
    /// Concepts of the full lattice whose intent contains the attribute.
    pub concepts: usize,
}

/// Precomputed at session start over the whole context.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalAnalysis {
    pub concepts: usize,
    pub covers: usize,
    pub mean_degree: f64,
    pub max_degree: usize,
    pub objects: Vec<ObjectSummary>,
    pub attributes: Vec<AttributeSummary>,
}

#[derive(Clone, Debug)]
pub struct BrowseSession {
    id: u64,
    context: FormalContext,
    lattice: ConceptLattice,
    analysis: GlobalAnalysis,
    history: Vec<(Seed, Neighborhood)>,
    current: Option<usize>,
}

/// Scale the facets of `mv`, combine them, and run the global analysis.
pub fn init_session(mv: &ManyValuedContext, facets: &[(String, ScalePlan)]) -> Result<BrowseSession> {
    Ok(BrowseSession::new(scale_facets(mv, facets)?))
}

fn analyse(ctx: &FormalContext, lattice: &ConceptLattice) -> GlobalAnalysis {
    let degrees: Vec<usize> = (0..ctx.n_objects()).map(|g| ctx.row(g).count()).collect();
    let objects = (0..ctx.n_objects())
        .map(|g| ObjectSummary {
            object: ctx.objects()[g].clone(),
            degree: degrees[g],
            concepts: lattice.concepts().iter().filter(|c| c.extent.contains(g)).count(),
        })
        .collect();
    let attributes = (0..ctx.n_attributes())
        .map(|m| AttributeSummary {
            attribute: ctx.attributes()[m].clone(),
            support: ctx.column(m).count(),
            concepts: lattice.concepts().iter().filter(|c| c.intent.contains(m)).count(),
        })
        .collect();
    GlobalAnalysis {
        concepts: lattice.len(),
        covers: lattice.cover_relation().len(),
        mean_degree: if degrees.is_empty() {
            0.0
        } else {
            degrees.iter().sum::<usize>() as f64 / degrees.len() as f64
        },
        max_degree: degrees.iter().copied().max().unwrap_or(0),
        objects,
        attributes,
    }
}

impl BrowseSession {
    pub fn new(context: FormalContext) -> Self {
        let lattice = enumerate_concepts(&context);
        let analysis = analyse(&context, &lattice);
        BrowseSession {
            id: NEXT_SESSION.fetch_add(1, Ordering::Relaxed),
            context,
            lattice,
            analysis,
            history: Vec::new(),
            current: None,
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn context(&self) -> &FormalContext {
        &self.context
    }

    /// Lattice of the whole session context.
    pub fn lattice(&self) -> &ConceptLattice {
        &self.lattice
    }

    pub fn analysis(&self) -> &GlobalAnalysis {
        &self.analysis
    }

    pub fn history(&self) -> &[(Seed, Neighborhood)] {
        &self.history
    }

    pub fn current(&self) -> Option<&Neighborhood> {
        self.current.map(|i| &self.history[i].1)
    }

    pub fn current_index(&self) -> Option<usize> {
        self.current
    }

    /// Move back to an earlier history entry without dropping later ones.
    pub fn select(&mut self, index: usize) -> Result<&Neighborhood> {
        if index >= self.history.len() {
            return Err(Error::unknown("history entry", index.to_string()));
        }
        self.current = Some(index);
        Ok(&self.history[index].1)
    }

    /// Compute a neighborhood and append it to the history.
    pub fn browse(&mut self, seed: Seed, filters: &Filters) -> Result<&Neighborhood> {
        let n = self.neighborhood(&seed, filters)?;
        self.history.push((seed, n));
        self.current = Some(self.history.len() - 1);
        Ok(&self.history[self.history.len() - 1].1)
    }

    pub fn similarity(&self, a: &str, b: &str, metric: &str) -> Result<f64> {
        let metric: Metric = metric.parse()?;
        let (a, b) = (self.context.require_object(a)?, self.context.require_object(b)?);
        Ok(metric.similarity(self.context.row(a), self.context.row(b)))
    }

    fn build(&self, seed: Option<Seed>, objects: &[usize], attributes: &[usize], filters: Filters) -> Neighborhood {
        let subcontext = self.context.subcontext(objects, attributes);
        let lattice = enumerate_concepts(&subcontext);
        Neighborhood {
            session: self.id,
            seed,
            reported: (0..lattice.len()).collect(),
            subcontext,
            lattice,
            filters,
        }
    }

    /// The whole context as one neighborhood, unfiltered.
    pub fn global_neighborhood(&self) -> Neighborhood {
        let objects: Vec<usize> = (0..self.context.n_objects()).collect();
        let attributes: Vec<usize> = (0..self.context.n_attributes()).collect();
        self.build(None, &objects, &attributes, Filters::none())
    }

    /// Attributes ordered most specific first (smallest extent), ties by position.
    fn ranked(&self, attrs: impl Iterator<Item = usize>) -> Vec<usize> {
        let mut out: Vec<usize> = attrs.collect();
        out.sort_by_key(|&m| (self.context.column(m).count(), m));
        out
    }

    pub fn neighborhood(&self, seed: &Seed, filters: &Filters) -> Result<Neighborhood> {
        filters.check()?;
        let ctx = &self.context;
        let (objects, attributes) = match seed {
            Seed::Object(name) => {
                let g = ctx.require_object(name)?;
                let mut retained = self.ranked(ctx.row(g).iter());
                if let Some(k) = filters.top_k {
                    retained.truncate(k);
                }
                let mut objs = BitSet::from_indices(ctx.n_objects(), [g]);
                for &m in &retained {
                    objs.union_with(ctx.column(m));
                }
                if let Some(ball) = &filters.ball {
                    let keep: Vec<usize> = objs
                        .iter()
                        .filter(|&h| ball.metric.distance(ctx.row(g), ctx.row(h)) <= ball.radius)
                        .collect();
                    objs = BitSet::from_indices(ctx.n_objects(), keep);
                }
                retained.sort_unstable();
                (objs.iter().collect::<Vec<_>>(), retained)
            }
            Seed::Attribute(name) => {
                let m = ctx.require_attribute(name)?;
                let mut attrs = vec![m];
                attrs.extend(self.ranked((0..ctx.n_attributes()).filter(|&a| a != m)));
                if let Some(ball) = &filters.ball {
                    attrs.retain(|&a| ball.metric.distance(ctx.column(m), ctx.column(a)) <= ball.radius);
                }
                if let Some(k) = filters.top_k {
                    attrs.truncate(k.max(1));
                }
                attrs.sort_unstable();
                (ctx.column(m).iter().collect(), attrs)
            }
        };

        let mut n = self.build(Some(seed.clone()), &objects, &attributes, filters.clone());
        let sub = &n.subcontext;
        let members: Vec<usize> = match seed {
            Seed::Object(name) => {
                let g = sub.require_object(name)?;
                (0..n.lattice.len()).filter(|&c| n.lattice.concept(c).extent.contains(g)).collect()
            }
            Seed::Attribute(name) => {
                let m = sub.require_attribute(name)?;
                (0..n.lattice.len()).filter(|&c| n.lattice.concept(c).intent.contains(m)).collect()
            }
        };
        let visible = |t: usize| -> Vec<usize> {
            if t <= 1 {
                return members.clone();
            }
            members
                .iter()
                .copied()
                .filter(|&c| n.lattice.concept(c).extent.count() >= t)
                .collect()
        };
        let mut threshold = filters.threshold;
        let mut reported = visible(threshold);
        if let Some(max) = filters.max_concepts {
            while reported.len() > max {
                threshold += 1;
                reported = visible(threshold);
            }
        }
        n.filters.threshold = threshold;
        n.reported = reported;
        Ok(n)
    }

    /// Union of objects and union of attributes of two neighborhoods, with
    /// the lattice rebuilt and every concept reported.
    pub fn union_neighborhood(&self, old: &Neighborhood, new: &Neighborhood) -> Result<Neighborhood> {
        if old.session != self.id || new.session != self.id {
            return Err(Error::SessionMismatch);
        }
        let ctx = &self.context;
        let mut objs = BitSet::new(ctx.n_objects());
        let mut attrs = BitSet::new(ctx.n_attributes());
        for n in [old, new] {
            for g in n.subcontext.objects() {
                objs.insert(ctx.require_object(g)?);
            }
            for m in n.subcontext.attributes() {
                attrs.insert(ctx.require_attribute(m)?);
            }
        }
        let objects: Vec<usize> = objs.iter().collect();
        let attributes: Vec<usize> = attrs.iter().collect();
        Ok(self.build(None, &objects, &attributes, Filters::none()))
    }
}

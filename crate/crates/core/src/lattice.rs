//! Concept lattices: enumeration, cover relation, reduced labels, and the
//! purification / reduction passes.
//!
//! Concepts are enumerated with NextClosure in lectic order over whichever
//! side of the context is smaller, then sorted canonically: extent size
//! descending, ties broken by the lexicographic order of extent positions.
//! Index 0 is therefore always the top concept and the last index the bottom.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::context::{FormalConcept, FormalContext};
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct ConceptLattice {
    context: FormalContext,
    concepts: Vec<FormalConcept>,
    by_extent: HashMap<BitSet, usize>,
    covers: Vec<(usize, usize)>,
    upper: Vec<Vec<usize>>,
    lower: Vec<Vec<usize>>,
    depth: Vec<usize>,
    object_concepts: Vec<usize>,
    attribute_concepts: Vec<usize>,
}

/// All closed sets of `closure` over `0..n`, in lectic order.
pub fn next_closure_all(n: usize, closure: impl Fn(&BitSet) -> BitSet) -> Vec<BitSet> {
    let mut current = closure(&BitSet::new(n));
    let mut out = vec![current.clone()];
    'outer: loop {
        for i in (0..n).rev() {
            if current.contains(i) {
                current.remove(i);
                continue;
            }
            let mut seed = current.clone();
            seed.insert(i);
            let next = closure(&seed);
            // canonicity: nothing new below i
            if next.agrees_below(&current, i) {
                current = next;
                out.push(current.clone());
                continue 'outer;
            }
        }
        return out;
    }
}

pub fn enumerate_concepts(ctx: &FormalContext) -> ConceptLattice {
    let mut concepts: Vec<FormalConcept> = if ctx.n_objects() < ctx.n_attributes() {
        next_closure_all(ctx.n_objects(), |a| ctx.extent_of(&ctx.intent_of(a)))
            .into_iter()
            .map(|extent| FormalConcept {
                intent: ctx.intent_of(&extent),
                extent,
            })
            .collect()
    } else {
        next_closure_all(ctx.n_attributes(), |b| ctx.intent_of(&ctx.extent_of(b)))
            .into_iter()
            .map(|intent| FormalConcept {
                extent: ctx.extent_of(&intent),
                intent,
            })
            .collect()
    };
    concepts.sort_by(|a, b| {
        b.extent
            .count()
            .cmp(&a.extent.count())
            .then_with(|| a.extent.cmp_lex(&b.extent))
    });
    ConceptLattice::from_sorted(ctx.clone(), concepts)
}

impl ConceptLattice {
    fn from_sorted(context: FormalContext, concepts: Vec<FormalConcept>) -> Self {
        let n = concepts.len();
        let by_extent: HashMap<BitSet, usize> = concepts
            .iter()
            .enumerate()
            .map(|(i, c)| (c.extent.clone(), i))
            .collect();

        // Upper covers of i: minimal strict supersets. Larger extents sit at
        // smaller indices, so scan j downward = ascending extent size.
        let mut upper = vec![Vec::new(); n];
        let mut lower = vec![Vec::new(); n];
        let mut covers = Vec::new();
        for i in 0..n {
            let mut chosen: Vec<usize> = Vec::new();
            for j in (0..i).rev() {
                let ej = &concepts[j].extent;
                if !concepts[i].extent.is_strict_subset(ej) {
                    continue;
                }
                if chosen.iter().any(|&k| concepts[k].extent.is_subset(ej)) {
                    continue;
                }
                chosen.push(j);
            }
            chosen.sort_unstable();
            for &j in &chosen {
                covers.push((i, j));
                lower[j].push(i);
            }
            upper[i] = chosen;
        }
        covers.sort_unstable();

        let mut depth = vec![0; n];
        for i in 0..n {
            depth[i] = upper[i].iter().map(|&u| depth[u] + 1).max().unwrap_or(0);
        }

        let object_concepts = (0..context.n_objects())
            .map(|g| {
                let c = context.concept_of_objects(&BitSet::from_indices(context.n_objects(), [g]));
                by_extent[&c.extent]
            })
            .collect();
        let attribute_concepts = (0..context.n_attributes())
            .map(|m| by_extent[context.column(m)])
            .collect();

        ConceptLattice {
            context,
            concepts,
            by_extent,
            covers,
            upper,
            lower,
            depth,
            object_concepts,
            attribute_concepts,
        }
    }

    pub fn context(&self) -> &FormalContext {
        &self.context
    }

    pub fn concepts(&self) -> &[FormalConcept] {
        &self.concepts
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn concept(&self, i: usize) -> &FormalConcept {
        &self.concepts[i]
    }

    pub fn top(&self) -> usize {
        0
    }

    pub fn bottom(&self) -> usize {
        self.concepts.len() - 1
    }

    /// Hasse edges as `(lower, upper)` pairs, sorted.
    pub fn cover_relation(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn upper_covers(&self, i: usize) -> &[usize] {
        &self.upper[i]
    }

    pub fn lower_covers(&self, i: usize) -> &[usize] {
        &self.lower[i]
    }

    /// Longest path length from the top concept.
    pub fn depth(&self, i: usize) -> usize {
        self.depth[i]
    }

    pub fn index_of_extent(&self, extent: &BitSet) -> Option<usize> {
        self.by_extent.get(extent).copied()
    }

    /// γg: the smallest concept whose extent contains `g`.
    pub fn object_concept(&self, g: &str) -> Result<usize> {
        Ok(self.object_concepts[self.context.require_object(g)?])
    }

    /// μm: the largest concept whose intent contains `m`.
    pub fn attribute_concept(&self, m: &str) -> Result<usize> {
        Ok(self.attribute_concepts[self.context.require_attribute(m)?])
    }

    pub fn object_concept_at(&self, g: usize) -> usize {
        self.object_concepts[g]
    }

    pub fn attribute_concept_at(&self, m: usize) -> usize {
        self.attribute_concepts[m]
    }

    /// Whether concept `a` lies below (or equals) concept `b`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.concepts[a].extent.is_subset(&self.concepts[b].extent)
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        let union = self.concepts[a].extent.union(&self.concepts[b].extent);
        let closed = self.context.concept_of_objects(&union);
        self.by_extent[&closed.extent]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        let inter = self.concepts[a].extent.intersection(&self.concepts[b].extent);
        self.by_extent[&inter]
    }

    /// Reduced labeling: objects at their object concepts, attributes at
    /// their attribute concepts.
    pub fn labels(&self) -> DiagramLabels {
        let n = self.len();
        let mut objects = vec![Vec::new(); n];
        let mut attributes = vec![Vec::new(); n];
        for (g, &c) in self.object_concepts.iter().enumerate() {
            objects[c].push(self.context.objects()[g].clone());
        }
        for (m, &c) in self.attribute_concepts.iter().enumerate() {
            attributes[c].push(self.context.attributes()[m].clone());
        }
        DiagramLabels {
            objects,
            attributes,
        }
    }

    /// Serializable form with names, labels, depths and covers.
    pub fn to_document(&self) -> LatticeDocument {
        let labels = self.labels();
        let concepts = self
            .concepts
            .iter()
            .enumerate()
            .map(|(i, c)| ConceptRecord {
                id: i,
                extent: c.extent_names(&self.context),
                intent: c.intent_names(&self.context),
                depth: self.depth[i],
                object_labels: labels.objects[i].clone(),
                attribute_labels: labels.attributes[i].clone(),
            })
            .collect();
        LatticeDocument {
            objects: self.context.objects().to_vec(),
            attributes: self.context.attributes().to_vec(),
            concepts,
            covers: self.covers.iter().map(|&(l, u)| [l, u]).collect(),
            top: self.top(),
            bottom: self.bottom(),
        }
    }
}

/// Per-concept object and attribute labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramLabels {
    pub objects: Vec<Vec<String>>,
    pub attributes: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptRecord {
    pub id: usize,
    pub extent: Vec<String>,
    pub intent: Vec<String>,
    pub depth: usize,
    pub object_labels: Vec<String>,
    pub attribute_labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeDocument {
    pub objects: Vec<String>,
    pub attributes: Vec<String>,
    pub concepts: Vec<ConceptRecord>,
    /// `[lower, upper]` concept ids.
    pub covers: Vec<[usize; 2]>,
    pub top: usize,
    pub bottom: usize,
}

/// Groups of objects / attributes collapsed by purification. The first name
/// in each group is the one kept.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeReport {
    pub objects: Vec<Vec<String>>,
    pub attributes: Vec<Vec<String>>,
}

impl MergeReport {
    pub fn is_empty(&self) -> bool {
        self.objects.is_empty() && self.attributes.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub merged: MergeReport,
    pub removed_objects: Vec<String>,
    pub removed_attributes: Vec<String>,
}

fn group_duplicates(sets: &[&BitSet]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut first: HashMap<&BitSet, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut keep = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        match first.get(s) {
            Some(&g) => groups[g].push(i),
            None => {
                first.insert(s, groups.len());
                groups.push(vec![i]);
                keep.push(i);
            }
        }
    }
    groups.retain(|g| g.len() > 1);
    (keep, groups)
}

/// Merge objects with identical rows and attributes with identical columns.
pub fn purify(ctx: &FormalContext) -> (FormalContext, MergeReport) {
    let rows: Vec<&BitSet> = (0..ctx.n_objects()).map(|g| ctx.row(g)).collect();
    let cols: Vec<&BitSet> = (0..ctx.n_attributes()).map(|m| ctx.column(m)).collect();
    let (keep_objects, object_groups) = group_duplicates(&rows);
    let (keep_attributes, attribute_groups) = group_duplicates(&cols);
    let report = MergeReport {
        objects: object_groups
            .iter()
            .map(|g| g.iter().map(|&i| ctx.objects()[i].clone()).collect())
            .collect(),
        attributes: attribute_groups
            .iter()
            .map(|g| g.iter().map(|&i| ctx.attributes()[i].clone()).collect())
            .collect(),
    };
    (ctx.subcontext(&keep_objects, &keep_attributes), report)
}

/// Purify, then drop every object whose row is the intersection of the rows
/// strictly containing it (join-reducible γg) and every attribute whose
/// column is the intersection of the columns strictly containing it
/// (meet-reducible μm, including a full column as the empty meet).
pub fn reduce(ctx: &FormalContext) -> (FormalContext, ReductionReport) {
    let (pure, merged) = purify(ctx);

    let reducible = |sets: &[&BitSet], width: usize| -> Vec<bool> {
        sets.iter()
            .map(|s| {
                let mut acc = BitSet::full(width);
                for other in sets {
                    if s.is_strict_subset(other) {
                        acc.intersect_with(other);
                    }
                }
                acc == **s
            })
            .collect()
    };
    let rows: Vec<&BitSet> = (0..pure.n_objects()).map(|g| pure.row(g)).collect();
    let cols: Vec<&BitSet> = (0..pure.n_attributes()).map(|m| pure.column(m)).collect();
    let object_red = reducible(&rows, pure.n_attributes());
    let attribute_red = reducible(&cols, pure.n_objects());

    let keep_objects: Vec<usize> = (0..pure.n_objects()).filter(|&g| !object_red[g]).collect();
    let keep_attributes: Vec<usize> = (0..pure.n_attributes()).filter(|&m| !attribute_red[m]).collect();
    let report = ReductionReport {
        merged,
        removed_objects: (0..pure.n_objects())
            .filter(|&g| object_red[g])
            .map(|g| pure.objects()[g].clone())
            .collect(),
        removed_attributes: (0..pure.n_attributes())
            .filter(|&m| attribute_red[m])
            .map(|m| pure.attributes()[m].clone())
            .collect(),
    };
    (pure.subcontext(&keep_objects, &keep_attributes), report)
}

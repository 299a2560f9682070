//! Shared information spaces: several knowledge systems joined by links.
//!
//! A link `from -> to` scopes the class `from` of one space on the class `to`
//! of another, so `from ≤ to` holds in the combined order. Objects and
//! classes are addressed globally as `space/name`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bitset::{BitMatrix, BitSet};
use crate::cks::ConceptualKnowledgeSystem;
use crate::context::FormalContext;
use crate::error::{Error, Result};
use crate::query::evaluate_lenient;

/// A class of a named space, written `space/class`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassRef {
    pub space: String,
    pub class: String,
}

impl ClassRef {
    pub fn new(space: impl Into<String>, class: impl Into<String>) -> Self {
        ClassRef {
            space: space.into(),
            class: class.into(),
        }
    }
}

impl fmt::Display for ClassRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.space, self.class)
    }
}

impl FromStr for ClassRef {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('/') {
            Some((space, class)) if !space.is_empty() && !class.is_empty() => Ok(ClassRef::new(space, class)),
            _ => Err(Error::Link(format!("expected `space/class`, found {s:?}"))),
        }
    }
}

impl Serialize for ClassRef {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ClassRef {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SharingLink {
    pub from: ClassRef,
    pub to: ClassRef,
}

impl SharingLink {
    pub fn new(from: ClassRef, to: ClassRef) -> Self {
        SharingLink { from, to }
    }

    /// Parse both endpoints from `space/class` text.
    pub fn parse(from: &str, to: &str) -> Result<Self> {
        Ok(SharingLink {
            from: from.parse()?,
            to: to.parse()?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Classes,
    Objects,
    Attributes,
}

/// A contiguous run of rows or columns belonging to one space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockGroup {
    pub kind: GroupKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    pub start: usize,
    pub len: usize,
}

/// The combined incidence of a shared space, laid out block by block:
/// classes then objects of each space as rows; classes of each space then
/// the pooled attributes as columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockMatrix {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub row_groups: Vec<BlockGroup>,
    pub column_groups: Vec<BlockGroup>,
    /// Block names, indexed `[row group][column group]`.
    pub blocks: Vec<Vec<String>>,
    /// One `X`/`.` string per row.
    pub cells: Vec<String>,
}

impl BlockMatrix {
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.cells[r].as_bytes()[c] == b'X'
    }

    pub fn block(&self, row_group: usize, column_group: usize) -> Vec<Vec<bool>> {
        let rg = &self.row_groups[row_group];
        let cg = &self.column_groups[column_group];
        (rg.start..rg.start + rg.len)
            .map(|r| (cg.start..cg.start + cg.len).map(|c| self.get(r, c)).collect())
            .collect()
    }

    /// Every set cell as a `(row name, column name)` pair.
    pub fn pairs(&self) -> BTreeSet<(String, String)> {
        let mut out = BTreeSet::new();
        for (r, row) in self.rows.iter().enumerate() {
            for (c, col) in self.columns.iter().enumerate() {
                if self.get(r, c) {
                    out.insert((row.clone(), col.clone()));
                }
            }
        }
        out
    }
}

fn global(space: &str, name: &str) -> String {
    format!("{space}/{name}")
}

/// Several knowledge systems and the links between them, with the derived
/// cross-instantiation.
#[derive(Clone, Debug)]
pub struct SharedSpace {
    ids: Vec<String>,
    spaces: Vec<ConceptualKnowledgeSystem>,
    links: Vec<SharingLink>,
    class_offset: Vec<usize>,
    object_offset: Vec<usize>,
    classes: Vec<String>,
    objects: Vec<String>,
    class_space: Vec<usize>,
    object_space: Vec<usize>,
    attributes: Vec<String>,
    attribute_map: Vec<Vec<usize>>,
    direct_order: BitMatrix,
    order: BitMatrix,
    across: Vec<BitSet>,
    base: BitMatrix,
    instantiation: BitMatrix,
}

/// Combine knowledge systems under sharing links.
pub fn compose(spaces: Vec<(String, ConceptualKnowledgeSystem)>, links: Vec<SharingLink>) -> Result<SharedSpace> {
    SharedSpace::compose(spaces, links)
}

impl SharedSpace {
    pub fn compose(spaces: Vec<(String, ConceptualKnowledgeSystem)>, links: Vec<SharingLink>) -> Result<Self> {
        let mut space_index = HashMap::new();
        for (i, (id, _)) in spaces.iter().enumerate() {
            if id.is_empty() || id.contains('/') || id.chars().any(char::is_control) {
                return Err(Error::Workspace(format!("invalid space id {id:?}")));
            }
            if space_index.insert(id.clone(), i).is_some() {
                return Err(Error::Workspace(format!("space `{id}` given twice")));
            }
        }
        let (ids, spaces): (Vec<String>, Vec<ConceptualKnowledgeSystem>) = spaces.into_iter().unzip();

        let mut class_offset = Vec::with_capacity(spaces.len());
        let mut object_offset = Vec::with_capacity(spaces.len());
        let (mut classes, mut objects) = (Vec::new(), Vec::new());
        let (mut class_space, mut object_space) = (Vec::new(), Vec::new());
        for (s, (id, cks)) in ids.iter().zip(&spaces).enumerate() {
            class_offset.push(classes.len());
            object_offset.push(objects.len());
            for v in cks.views() {
                classes.push(global(id, &v.name));
                class_space.push(s);
            }
            for g in cks.base().objects() {
                objects.push(global(id, g));
                object_space.push(s);
            }
        }

        let mut seen: HashMap<&str, usize> = HashMap::new();
        for cks in &spaces {
            for m in cks.scaled().attributes() {
                *seen.entry(m.as_str()).or_default() += 1;
            }
        }
        let mut attributes = Vec::new();
        let mut attribute_map = Vec::with_capacity(spaces.len());
        for (id, cks) in ids.iter().zip(&spaces) {
            let mut map = Vec::new();
            for m in cks.scaled().attributes() {
                map.push(attributes.len());
                attributes.push(if seen[m.as_str()] > 1 {
                    global(id, m)
                } else {
                    m.clone()
                });
            }
            attribute_map.push(map);
        }

        let resolve = |r: &ClassRef| -> Result<usize> {
            let s = *space_index
                .get(&r.space)
                .ok_or_else(|| Error::unknown("space", r.space.clone()))?;
            let v = spaces[s]
                .view_position(&r.class)
                .ok_or_else(|| Error::unknown("class", r.to_string()))?;
            Ok(class_offset[s] + v)
        };
        let nc = classes.len();
        let mut direct_order = BitMatrix::new(nc, nc);
        let mut link_targets: Vec<Vec<usize>> = vec![Vec::new(); nc];
        for link in &links {
            let (from, to) = (resolve(&link.from)?, resolve(&link.to)?);
            if link.from.space == link.to.space {
                return Err(Error::Link(format!(
                    "{} and {} lie in the same space",
                    link.from, link.to
                )));
            }
            direct_order.set(from, to);
            if !link_targets[from].contains(&to) {
                link_targets[from].push(to);
            }
        }
        let mut own_parents: Vec<Vec<usize>> = vec![Vec::new(); nc];
        for (s, cks) in spaces.iter().enumerate() {
            for (v, view) in cks.views().iter().enumerate() {
                let c = class_offset[s] + v;
                for p in &view.scope {
                    let p = class_offset[s] + cks.view_position(p).expect("validated scope");
                    direct_order.set(c, p);
                    own_parents[c].push(p);
                }
            }
        }
        let topo = upward_order(&direct_order, &classes)?;
        let order = direct_order.reflexive_transitive_closure();

        let no = objects.len();
        let mut across = vec![BitSet::new(no); nc];
        for &c in &topo {
            let s = class_space[c];
            let mut scope = if own_parents[c].is_empty() {
                let start = object_offset[s];
                BitSet::from_indices(no, start..start + spaces[s].base().objects().len())
            } else {
                let mut acc = BitSet::full(no);
                for &p in &own_parents[c] {
                    acc.intersect_with(&across[p]);
                }
                acc
            };
            for &t in &link_targets[c] {
                scope.union_with(&across[t]);
            }
            let constructor = &spaces[s].views()[c - class_offset[s]].constructor;
            let mut hits = BitSet::new(no);
            for (s2, cks) in spaces.iter().enumerate() {
                let start = object_offset[s2];
                let len = cks.base().objects().len();
                let local = BitSet::from_indices(
                    len,
                    scope.iter().filter(|&g| g >= start && g < start + len).map(|g| g - start),
                );
                if local.is_empty() {
                    continue;
                }
                for g in evaluate_lenient(constructor, cks.base(), &local).iter() {
                    hits.insert(start + g);
                }
            }
            across[c] = hits;
        }

        let mut own = BitMatrix::new(no, nc);
        for (s, cks) in spaces.iter().enumerate() {
            let inst = &cks.incidence_closure().instantiation;
            for g in 0..inst.n_rows() {
                for v in inst.row(g).iter() {
                    own.set(object_offset[s] + g, class_offset[s] + v);
                }
            }
        }
        let mut base = own.clone();
        for (c, set) in across.iter().enumerate() {
            for g in set.iter() {
                base.set(g, c);
            }
        }
        let derived = base.compose(&order);
        let mut instantiation = own;
        for g in 0..no {
            for c in derived.row(g).iter() {
                if object_space[g] != class_space[c] {
                    instantiation.set(g, c);
                }
            }
        }

        Ok(SharedSpace {
            ids,
            spaces,
            links,
            class_offset,
            object_offset,
            classes,
            objects,
            class_space,
            object_space,
            attributes,
            attribute_map,
            direct_order,
            order,
            across,
            base,
            instantiation,
        })
    }

    pub fn space_ids(&self) -> &[String] {
        &self.ids
    }

    pub fn spaces(&self) -> &[ConceptualKnowledgeSystem] {
        &self.spaces
    }

    pub fn links(&self) -> &[SharingLink] {
        &self.links
    }

    pub fn space_position(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|s| s == id)
    }

    /// Global class names, `space/class`, space by space.
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    /// Global object names, `space/object`, space by space.
    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    /// Pooled attributes; a name used by several spaces is prefixed with its space.
    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn class_space(&self, c: usize) -> usize {
        self.class_space[c]
    }

    pub fn object_space(&self, g: usize) -> usize {
        self.object_space[g]
    }

    pub fn class_range(&self, s: usize) -> std::ops::Range<usize> {
        self.class_offset[s]..self.class_offset[s] + self.spaces[s].views().len()
    }

    pub fn object_range(&self, s: usize) -> std::ops::Range<usize> {
        self.object_offset[s]..self.object_offset[s] + self.spaces[s].base().objects().len()
    }

    /// Scope edges and links, before closure.
    pub fn direct_order(&self) -> &BitMatrix {
        &self.direct_order
    }

    /// The combined order ≤*: reflexive-transitive closure of scope edges and links.
    pub fn order(&self) -> &BitMatrix {
        &self.order
    }

    /// Instantiation before closing along ≤*: per-space instantiation plus
    /// every object reached through a view's cross-space scope.
    pub fn base_instantiation(&self) -> &BitMatrix {
        &self.base
    }

    /// Per-space instantiation on the diagonal blocks, derived
    /// cross-instantiation elsewhere.
    pub fn instantiation(&self) -> &BitMatrix {
        &self.instantiation
    }

    /// Objects of space `i` against classes of space `j`.
    pub fn instantiation_block(&self, i: usize, j: usize) -> BitMatrix {
        let rows = self.object_range(i);
        let cols: Vec<usize> = self.class_range(j).collect();
        BitMatrix::from_rows(
            cols.len(),
            rows.map(|g| self.instantiation.row(g).project(&cols)).collect(),
        )
    }

    pub fn resolve_across_set(&self, space: &str, view: &str) -> Result<&BitSet> {
        let s = self
            .space_position(space)
            .ok_or_else(|| Error::unknown("space", space))?;
        let v = self.spaces[s].require_view(view)?;
        Ok(&self.across[self.class_offset[s] + v])
    }

    /// Objects of every space selected by a view whose scope reaches across links.
    pub fn resolve_across(&self, space: &str, view: &str) -> Result<Vec<String>> {
        Ok(self
            .resolve_across_set(space, view)?
            .iter()
            .map(|g| self.objects[g].clone())
            .collect())
    }

    fn class_row(&self, c: usize) -> BitSet {
        let nc = self.classes.len();
        let s = self.class_space[c];
        let r = self.spaces[s].incidence_closure();
        let local = c - self.class_offset[s];
        let mut row = BitSet::new(nc + self.attributes.len());
        for d in 0..nc {
            let on = if self.class_space[d] == s {
                r.organization.get(local, d - self.class_offset[s])
            } else {
                self.order.get(c, d)
            };
            if on {
                row.insert(d);
            }
        }
        for m in r.distinguishing.row(local).iter() {
            row.insert(nc + self.attribute_map[s][m]);
        }
        row
    }

    fn object_row(&self, g: usize) -> BitSet {
        let nc = self.classes.len();
        let s = self.object_space[g];
        let mut row = BitSet::new(nc + self.attributes.len());
        for c in self.instantiation.row(g).iter() {
            row.insert(c);
        }
        for m in self.spaces[s].scaled().row(g - self.object_offset[s]).iter() {
            row.insert(nc + self.attribute_map[s][m]);
        }
        row
    }

    fn block_rows(&self) -> Vec<BitSet> {
        let mut rows = Vec::new();
        for s in 0..self.spaces.len() {
            rows.extend(self.class_range(s).map(|c| self.class_row(c)));
        }
        for s in 0..self.spaces.len() {
            rows.extend(self.object_range(s).map(|g| self.object_row(g)));
        }
        rows
    }

    pub fn block_matrix(&self) -> BlockMatrix {
        let mut row_groups = Vec::new();
        let mut rows = Vec::new();
        for kind in [GroupKind::Classes, GroupKind::Objects] {
            for s in 0..self.spaces.len() {
                let (names, range) = match kind {
                    GroupKind::Classes => (&self.classes, self.class_range(s)),
                    _ => (&self.objects, self.object_range(s)),
                };
                row_groups.push(BlockGroup {
                    kind,
                    space: Some(self.ids[s].clone()),
                    start: rows.len(),
                    len: range.len(),
                });
                rows.extend(names[range].iter().cloned());
            }
        }
        let mut column_groups: Vec<BlockGroup> = (0..self.spaces.len())
            .map(|s| BlockGroup {
                kind: GroupKind::Classes,
                space: Some(self.ids[s].clone()),
                start: self.class_offset[s],
                len: self.class_range(s).len(),
            })
            .collect();
        column_groups.push(BlockGroup {
            kind: GroupKind::Attributes,
            space: None,
            start: self.classes.len(),
            len: self.attributes.len(),
        });
        let columns: Vec<String> = self.classes.iter().chain(&self.attributes).cloned().collect();

        let blocks = row_groups
            .iter()
            .map(|rg| {
                let i = rg.space.as_deref().unwrap_or_default();
                column_groups
                    .iter()
                    .map(|cg| {
                        let j = cg.space.as_deref().unwrap_or_default();
                        match (rg.kind, cg.kind) {
                            (GroupKind::Classes, GroupKind::Classes) if i == j => format!("organization({i})"),
                            (GroupKind::Classes, GroupKind::Classes) => format!("sharing({i},{j})"),
                            (GroupKind::Classes, _) => format!("distinguishing({i})"),
                            (_, GroupKind::Classes) if i == j => format!("instantiation({i})"),
                            (_, GroupKind::Classes) => format!("instantiation({i},{j})"),
                            _ => format!("having({i})"),
                        }
                    })
                    .collect()
            })
            .collect();

        let width = columns.len();
        let cells = self
            .block_rows()
            .iter()
            .map(|row| (0..width).map(|c| if row.contains(c) { 'X' } else { '.' }).collect())
            .collect();
        BlockMatrix {
            rows,
            columns,
            row_groups,
            column_groups,
            blocks,
            cells,
        }
    }

    /// The block matrix as a formal context, for lattice building.
    pub fn to_context(&self) -> Result<FormalContext> {
        let objects: Vec<String> = self.classes.iter().chain(&self.objects).cloned().collect();
        let attributes: Vec<String> = self.classes.iter().chain(&self.attributes).cloned().collect();
        FormalContext::from_rows(objects, attributes, self.block_rows())
    }
}

/// Order classes so that every class comes after everything it lies below;
/// fails with the offending path if the order has a cycle.
fn upward_order(edges: &BitMatrix, names: &[String]) -> Result<Vec<usize>> {
    let n = names.len();
    let mut state = vec![0u8; n];
    let mut out = Vec::with_capacity(n);
    fn visit(
        v: usize,
        edges: &BitMatrix,
        names: &[String],
        state: &mut [u8],
        stack: &mut Vec<usize>,
        out: &mut Vec<usize>,
    ) -> Result<()> {
        state[v] = 1;
        stack.push(v);
        for w in edges.row(v).iter() {
            match state[w] {
                0 => visit(w, edges, names, state, stack, out)?,
                1 => {
                    let start = stack.iter().position(|&x| x == w).unwrap();
                    let mut path: Vec<String> = stack[start..].iter().map(|&x| names[x].clone()).collect();
                    path.push(names[w].clone());
                    return Err(Error::Cycle(path));
                }
                _ => {}
            }
        }
        stack.pop();
        state[v] = 2;
        out.push(v);
        Ok(())
    }
    for v in 0..n {
        if state[v] == 0 {
            visit(v, edges, names, &mut state, &mut Vec::new(), &mut out)?;
        }
    }
    Ok(out)
}

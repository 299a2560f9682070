//! Many-valued and formal contexts, derivation operators and apposition.
//!
//! A [`ManyValuedContext`] holds the raw metadata: every object has exactly one
//! [`AttributeValue`] per sort, possibly [`AttributeValue::Missing`]. A
//! [`FormalContext`] is the binary, interpreted form obtained by scaling. Its
//! incidence is kept twice, as object rows and attribute columns, so both
//! derivation operators are AND-folds over bit sets.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bitset::{BitMatrix, BitSet};
use crate::error::{Error, Result};

/// A single cell of a many-valued context.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AttributeValue {
    Text(String),
    Integer(i64),
    Date(NaiveDate),
    Missing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Text,
    Integer,
    Date,
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueKind::Text => "text",
            ValueKind::Integer => "integer",
            ValueKind::Date => "date",
        })
    }
}

impl AttributeValue {
    pub fn text(s: impl Into<String>) -> Self {
        AttributeValue::Text(s.into())
    }

    pub fn kind(&self) -> Option<ValueKind> {
        match self {
            AttributeValue::Text(_) => Some(ValueKind::Text),
            AttributeValue::Integer(_) => Some(ValueKind::Integer),
            AttributeValue::Date(_) => Some(ValueKind::Date),
            AttributeValue::Missing => None,
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, AttributeValue::Missing)
    }

    /// Domain comparison. `None` unless both values are of the same variant;
    /// `Missing` compares with nothing, not even itself.
    pub fn compare(&self, other: &AttributeValue) -> Option<Ordering> {
        match (self, other) {
            (AttributeValue::Text(a), AttributeValue::Text(b)) => Some(a.cmp(b)),
            (AttributeValue::Integer(a), AttributeValue::Integer(b)) => Some(a.cmp(b)),
            (AttributeValue::Date(a), AttributeValue::Date(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }

    /// Type a raw token: integer, then ISO-8601 date, otherwise text.
    pub fn infer(raw: &str) -> AttributeValue {
        if let Some(i) = parse_integer(raw) {
            AttributeValue::Integer(i)
        } else if let Some(d) = parse_date(raw) {
            AttributeValue::Date(d)
        } else {
            AttributeValue::Text(raw.to_string())
        }
    }

    fn variant_rank(&self) -> u8 {
        match self {
            AttributeValue::Text(_) => 0,
            AttributeValue::Integer(_) => 1,
            AttributeValue::Date(_) => 2,
            AttributeValue::Missing => 3,
        }
    }
}

pub(crate) fn parse_integer(raw: &str) -> Option<i64> {
    let digits = raw.strip_prefix('-').unwrap_or(raw);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    raw.parse().ok()
}

pub(crate) fn parse_date(raw: &str) -> Option<NaiveDate> {
    let b = raw.as_bytes();
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
        return None;
    }
    NaiveDate::parse_from_str(raw, "%Y-%m-%d").ok()
}

/// Total order for use as a map key: variant first, then domain order.
impl Ord for AttributeValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other)
            .unwrap_or_else(|| self.variant_rank().cmp(&other.variant_rank()))
    }
}

impl PartialOrd for AttributeValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for AttributeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttributeValue::Text(s) => f.write_str(s),
            AttributeValue::Integer(i) => write!(f, "{i}"),
            AttributeValue::Date(d) => write!(f, "{}", d.format("%Y-%m-%d")),
            AttributeValue::Missing => f.write_str("---"),
        }
    }
}

// JSON form: text as string, integer as number, date as {"date": "..."}, missing as null.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ValueRepr {
    Missing(()),
    Integer(i64),
    Text(String),
    Date { date: NaiveDate },
}

impl Serialize for AttributeValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AttributeValue::Text(t) => ValueRepr::Text(t.clone()),
            AttributeValue::Integer(i) => ValueRepr::Integer(*i),
            AttributeValue::Date(d) => ValueRepr::Date { date: *d },
            AttributeValue::Missing => ValueRepr::Missing(()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AttributeValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(match ValueRepr::deserialize(d)? {
            ValueRepr::Missing(()) => AttributeValue::Missing,
            ValueRepr::Integer(i) => AttributeValue::Integer(i),
            ValueRepr::Text(t) => AttributeValue::Text(t),
            ValueRepr::Date { date } => AttributeValue::Date(date),
        })
    }
}

pub(crate) fn check_identifier(kind: &str, id: &str) -> Result<()> {
    if id.chars().any(char::is_control) {
        return Err(Error::InvalidContext(format!(
            "{kind} identifier {id:?} contains a control character"
        )));
    }
    Ok(())
}

fn index_unique(kind: &str, ids: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        check_identifier(kind, id)?;
        if index.insert(id.clone(), i).is_some() {
            return Err(Error::InvalidContext(format!("duplicate {kind} `{id}`")));
        }
    }
    Ok(index)
}

/// Objects × sorts with one typed value per cell (the raw metadata table).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "MvRepr", into = "MvRepr")]
pub struct ManyValuedContext {
    objects: Vec<String>,
    sorts: Vec<String>,
    values: Vec<Vec<AttributeValue>>,
    domains: Vec<Vec<AttributeValue>>,
    kinds: Vec<Option<ValueKind>>,
    object_index: HashMap<String, usize>,
    sort_index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct MvRepr {
    objects: Vec<String>,
    sorts: Vec<String>,
    values: Vec<Vec<AttributeValue>>,
}

impl TryFrom<MvRepr> for ManyValuedContext {
    type Error = Error;
    fn try_from(r: MvRepr) -> Result<Self> {
        ManyValuedContext::new(r.objects, r.sorts, r.values)
    }
}

impl From<ManyValuedContext> for MvRepr {
    fn from(mv: ManyValuedContext) -> Self {
        MvRepr {
            objects: mv.objects,
            sorts: mv.sorts,
            values: mv.values,
        }
    }
}

impl PartialEq for ManyValuedContext {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects && self.sorts == other.sorts && self.values == other.values
    }
}

impl ManyValuedContext {
    /// Build from row-major values: `values[g][a]` is φ_a(g).
    pub fn new(
        objects: Vec<String>,
        sorts: Vec<String>,
        values: Vec<Vec<AttributeValue>>,
    ) -> Result<Self> {
        let object_index = index_unique("object", &objects)?;
        let sort_index = index_unique("sort", &sorts)?;
        if values.len() != objects.len() {
            return Err(Error::InvalidContext(format!(
                "{} value rows for {} objects",
                values.len(),
                objects.len()
            )));
        }
        let mut kinds = vec![None; sorts.len()];
        let mut domains: Vec<Vec<AttributeValue>> = vec![Vec::new(); sorts.len()];
        for (g, row) in values.iter().enumerate() {
            if row.len() != sorts.len() {
                return Err(Error::InvalidContext(format!(
                    "object `{}` has {} values for {} sorts",
                    objects[g],
                    row.len(),
                    sorts.len()
                )));
            }
            for (a, v) in row.iter().enumerate() {
                let Some(kind) = v.kind() else { continue };
                match kinds[a] {
                    None => kinds[a] = Some(kind),
                    Some(k) if k != kind => {
                        return Err(Error::InvalidContext(format!(
                            "sort `{}` mixes {k} and {kind} values",
                            sorts[a]
                        )))
                    }
                    _ => {}
                }
                domains[a].push(v.clone());
            }
        }
        for d in &mut domains {
            d.sort();
            d.dedup();
        }
        Ok(ManyValuedContext {
            objects,
            sorts,
            values,
            domains,
            kinds,
            object_index,
            sort_index,
        })
    }

    /// Build from sparse `(object, sort) -> value` entries; absent cells are missing.
    pub fn from_cells(
        objects: Vec<String>,
        sorts: Vec<String>,
        cells: impl IntoIterator<Item = (String, String, AttributeValue)>,
    ) -> Result<Self> {
        let oi: HashMap<&str, usize> = objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.as_str(), i))
            .collect();
        let si: HashMap<&str, usize> = sorts
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let mut values = vec![vec![AttributeValue::Missing; sorts.len()]; objects.len()];
        for (o, s, v) in cells {
            let g = *oi.get(o.as_str()).ok_or_else(|| Error::unknown("object", &o))?;
            let a = *si.get(s.as_str()).ok_or_else(|| Error::unknown("sort", &s))?;
            values[g][a] = v;
        }
        ManyValuedContext::new(objects, sorts, values)
    }

    pub fn empty() -> Self {
        ManyValuedContext::new(Vec::new(), Vec::new(), Vec::new()).expect("empty context is valid")
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn sorts(&self) -> &[String] {
        &self.sorts
    }

    pub fn object_position(&self, g: &str) -> Option<usize> {
        self.object_index.get(g).copied()
    }

    pub fn sort_position(&self, tag: &str) -> Option<usize> {
        self.sort_index.get(tag).copied()
    }

    pub(crate) fn require_sort(&self, tag: &str) -> Result<usize> {
        self.sort_position(tag)
            .ok_or_else(|| Error::unknown("attribute tag", tag))
    }

    /// φ_tag(g) by position.
    pub fn value_at(&self, g: usize, a: usize) -> &AttributeValue {
        &self.values[g][a]
    }

    pub fn value(&self, object: &str, tag: &str) -> Result<&AttributeValue> {
        let g = self
            .object_position(object)
            .ok_or_else(|| Error::unknown("object", object))?;
        let a = self.require_sort(tag)?;
        Ok(&self.values[g][a])
    }

    pub fn row(&self, g: usize) -> &[AttributeValue] {
        &self.values[g]
    }

    /// Observed non-missing values of a sort, in domain order.
    pub fn domain(&self, a: usize) -> &[AttributeValue] {
        &self.domains[a]
    }

    /// Value type of a sort, `None` when every cell is missing.
    pub fn kind(&self, a: usize) -> Option<ValueKind> {
        self.kinds[a]
    }

    /// Keep only the listed sorts, in the given order.
    pub fn project_sorts(&self, keep: &[usize]) -> ManyValuedContext {
        let values = self
            .values
            .iter()
            .map(|row| keep.iter().map(|&a| row[a].clone()).collect())
            .collect();
        let sorts = keep.iter().map(|&a| self.sorts[a].clone()).collect();
        ManyValuedContext::new(self.objects.clone(), sorts, values)
            .expect("projection of a valid context is valid")
    }

    /// The index relation of one sort: the inverse of φ_tag without missing cells.
    pub fn build_index(&self, tag: &str) -> Result<IndexRelation> {
        let a = self.require_sort(tag)?;
        let mut postings: BTreeMap<AttributeValue, BitSet> = BTreeMap::new();
        for (g, row) in self.values.iter().enumerate() {
            let v = &row[a];
            if v.is_missing() {
                continue;
            }
            postings
                .entry(v.clone())
                .or_insert_with(|| BitSet::new(self.objects.len()))
                .insert(g);
        }
        Ok(IndexRelation {
            tag: tag.to_string(),
            postings,
        })
    }
}

/// Postings list of one attribute tag: value → objects carrying it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexRelation {
    pub tag: String,
    pub postings: BTreeMap<AttributeValue, BitSet>,
}

impl IndexRelation {
    pub fn lookup(&self, value: &AttributeValue) -> Option<&BitSet> {
        self.postings.get(value)
    }

    /// Object identifiers posted under `value`, in context order.
    pub fn objects<'a>(&self, mv: &'a ManyValuedContext, value: &AttributeValue) -> Vec<&'a str> {
        self.lookup(value)
            .map(|set| set.iter().map(|g| mv.objects()[g].as_str()).collect())
            .unwrap_or_default()
    }
}

/// Objects × binary attributes with an incidence relation.
#[derive(Clone, Debug)]
pub struct FormalContext {
    objects: Vec<String>,
    attributes: Vec<String>,
    rows: BitMatrix,
    cols: BitMatrix,
    object_index: HashMap<String, usize>,
    attribute_index: HashMap<String, usize>,
}

impl PartialEq for FormalContext {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.attributes == other.attributes
            && self.rows == other.rows
    }
}

impl Eq for FormalContext {}

impl FormalContext {
    /// Build from object rows; `rows[g]` must be a set over the attributes.
    pub fn from_rows(objects: Vec<String>, attributes: Vec<String>, rows: Vec<BitSet>) -> Result<Self> {
        let object_index = index_unique("object", &objects)?;
        let attribute_index = index_unique("attribute", &attributes)?;
        if rows.len() != objects.len() || rows.iter().any(|r| r.universe() != attributes.len()) {
            return Err(Error::InvalidContext(
                "incidence rows do not match objects × attributes".into(),
            ));
        }
        let rows = BitMatrix::from_rows(attributes.len(), rows);
        let cols = rows.transpose();
        Ok(FormalContext {
            objects,
            attributes,
            rows,
            cols,
            object_index,
            attribute_index,
        })
    }

    /// Build from `(object, attribute)` name pairs.
    pub fn from_pairs<O, A>(
        objects: Vec<String>,
        attributes: Vec<String>,
        pairs: impl IntoIterator<Item = (O, A)>,
    ) -> Result<Self>
    where
        O: AsRef<str>,
        A: AsRef<str>,
    {
        let empty = vec![BitSet::new(attributes.len()); objects.len()];
        let mut ctx = FormalContext::from_rows(objects, attributes, empty)?;
        let mut rows = std::mem::replace(&mut ctx.rows, BitMatrix::new(0, 0));
        for (o, a) in pairs {
            let g = ctx.require_object(o.as_ref())?;
            let m = ctx.require_attribute(a.as_ref())?;
            rows.set(g, m);
        }
        ctx.cols = rows.transpose();
        ctx.rows = rows;
        Ok(ctx)
    }

    /// Build from a boolean table, naming objects and attributes `g0..`, `m0..`.
    pub fn from_bools(table: &[Vec<bool>], n_attributes: usize) -> Self {
        let objects = (0..table.len()).map(|i| format!("g{i}")).collect();
        let attributes = (0..n_attributes).map(|i| format!("m{i}")).collect();
        let rows = table
            .iter()
            .map(|r| BitSet::from_indices(n_attributes, (0..n_attributes).filter(|&m| r[m])))
            .collect();
        FormalContext::from_rows(objects, attributes, rows).expect("generated names are unique")
    }

    /// A context over `objects` with no attributes.
    pub fn attribute_free(objects: Vec<String>) -> Result<Self> {
        let rows = vec![BitSet::new(0); objects.len()];
        FormalContext::from_rows(objects, Vec::new(), rows)
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn object_position(&self, g: &str) -> Option<usize> {
        self.object_index.get(g).copied()
    }

    pub fn attribute_position(&self, m: &str) -> Option<usize> {
        self.attribute_index.get(m).copied()
    }

    pub fn require_object(&self, g: &str) -> Result<usize> {
        self.object_position(g).ok_or_else(|| Error::unknown("object", g))
    }

    pub fn require_attribute(&self, m: &str) -> Result<usize> {
        self.attribute_position(m)
            .ok_or_else(|| Error::unknown("attribute", m))
    }

    pub fn has(&self, g: usize, m: usize) -> bool {
        self.rows.get(g, m)
    }

    /// g′ as a set over attributes.
    pub fn row(&self, g: usize) -> &BitSet {
        self.rows.row(g)
    }

    /// m′ as a set over objects.
    pub fn column(&self, m: usize) -> &BitSet {
        self.cols.row(m)
    }

    pub fn incidence(&self) -> &BitMatrix {
        &self.rows
    }

    pub fn incidence_count(&self) -> usize {
        self.rows.count()
    }

    /// All `(object, attribute)` pairs in row-major order.
    pub fn pairs(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::with_capacity(self.incidence_count());
        for (g, row) in self.rows.rows().iter().enumerate() {
            for m in row.iter() {
                out.push((self.objects[g].as_str(), self.attributes[m].as_str()));
            }
        }
        out
    }

    pub fn object_set(&self, names: &[impl AsRef<str>]) -> Result<BitSet> {
        let mut set = BitSet::new(self.objects.len());
        for n in names {
            set.insert(self.require_object(n.as_ref())?);
        }
        Ok(set)
    }

    pub fn attribute_set(&self, names: &[impl AsRef<str>]) -> Result<BitSet> {
        let mut set = BitSet::new(self.attributes.len());
        for n in names {
            set.insert(self.require_attribute(n.as_ref())?);
        }
        Ok(set)
    }

    pub fn object_names(&self, set: &BitSet) -> Vec<String> {
        set.iter().map(|g| self.objects[g].clone()).collect()
    }

    pub fn attribute_names(&self, set: &BitSet) -> Vec<String> {
        set.iter().map(|m| self.attributes[m].clone()).collect()
    }

    /// A′: attributes shared by every object in `objs`.
    pub fn intent_of(&self, objs: &BitSet) -> BitSet {
        let mut acc = BitSet::full(self.attributes.len());
        for g in objs.iter() {
            acc.intersect_with(self.rows.row(g));
        }
        acc
    }

    /// B′: objects having every attribute in `attrs`.
    pub fn extent_of(&self, attrs: &BitSet) -> BitSet {
        let mut acc = BitSet::full(self.objects.len());
        for m in attrs.iter() {
            acc.intersect_with(self.cols.row(m));
        }
        acc
    }

    /// Name-level A ↦ A′, in attribute order.
    pub fn derive_intent(&self, objs: &[impl AsRef<str>]) -> Result<Vec<String>> {
        let set = self.object_set(objs)?;
        Ok(self.attribute_names(&self.intent_of(&set)))
    }

    /// Name-level B ↦ B′, in object order.
    pub fn derive_extent(&self, attrs: &[impl AsRef<str>]) -> Result<Vec<String>> {
        let set = self.attribute_set(attrs)?;
        Ok(self.object_names(&self.extent_of(&set)))
    }

    /// The concept generated by an object set: (A″, A′).
    pub fn close_objects(&self, objs: &[impl AsRef<str>]) -> Result<FormalConcept> {
        let set = self.object_set(objs)?;
        Ok(self.concept_of_objects(&set))
    }

    pub fn concept_of_objects(&self, objs: &BitSet) -> FormalConcept {
        let intent = self.intent_of(objs);
        FormalConcept {
            extent: self.extent_of(&intent),
            intent,
        }
    }

    pub fn concept_of_attributes(&self, attrs: &BitSet) -> FormalConcept {
        let extent = self.extent_of(attrs);
        FormalConcept {
            intent: self.intent_of(&extent),
            extent,
        }
    }

    /// Side-by-side combination over a common object set. Colliding attribute
    /// names on the right are renamed `label/name` when a label is given.
    pub fn apposition(&self, right: &FormalContext, label: Option<&str>) -> Result<FormalContext> {
        let left_set: HashSet<&str> = self.objects.iter().map(String::as_str).collect();
        let right_set: HashSet<&str> = right.objects.iter().map(String::as_str).collect();
        if left_set != right_set {
            let only_left = self
                .objects
                .iter()
                .filter(|o| !right_set.contains(o.as_str()))
                .cloned()
                .collect();
            let only_right = right
                .objects
                .iter()
                .filter(|o| !left_set.contains(o.as_str()))
                .cloned()
                .collect();
            return Err(Error::Apposition {
                only_left,
                only_right,
            });
        }

        let mut attributes = self.attributes.clone();
        let mut taken: HashSet<String> = attributes.iter().cloned().collect();
        for m in &right.attributes {
            let name = if taken.contains(m) {
                match label {
                    Some(l) => format!("{l}/{m}"),
                    None => return Err(Error::AttributeCollision(m.clone())),
                }
            } else {
                m.clone()
            };
            if !taken.insert(name.clone()) {
                return Err(Error::AttributeCollision(name));
            }
            attributes.push(name);
        }

        let width = attributes.len();
        let offset = self.attributes.len();
        let rows = self
            .objects
            .iter()
            .enumerate()
            .map(|(g, name)| {
                let rg = right.object_index[name];
                BitSet::from_indices(
                    width,
                    self.rows
                        .row(g)
                        .iter()
                        .chain(right.rows.row(rg).iter().map(|m| m + offset)),
                )
            })
            .collect();
        FormalContext::from_rows(self.objects.clone(), attributes, rows)
    }

    /// The subcontext on the given object and attribute positions, in the order given.
    pub fn subcontext(&self, objs: &[usize], attrs: &[usize]) -> FormalContext {
        let objects = objs.iter().map(|&g| self.objects[g].clone()).collect();
        let attributes = attrs.iter().map(|&m| self.attributes[m].clone()).collect();
        let rows = objs.iter().map(|&g| self.rows.row(g).project(attrs)).collect();
        FormalContext::from_rows(objects, attributes, rows).expect("subcontext of a valid context")
    }
}

/// An (extent, intent) pair closed under derivation, as bit sets over the
/// objects and attributes of the context it was computed in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormalConcept {
    pub extent: BitSet,
    pub intent: BitSet,
}

impl FormalConcept {
    pub fn extent_names(&self, ctx: &FormalContext) -> Vec<String> {
        ctx.object_names(&self.extent)
    }

    pub fn intent_names(&self, ctx: &FormalContext) -> Vec<String> {
        ctx.attribute_names(&self.intent)
    }

    /// Whether extent′ = intent and intent′ = extent in `ctx`.
    pub fn is_closed_in(&self, ctx: &FormalContext) -> bool {
        ctx.intent_of(&self.extent) == self.intent && ctx.extent_of(&self.intent) == self.extent
    }
}

#[derive(Serialize, Deserialize)]
struct FcRepr {
    objects: Vec<String>,
    attributes: Vec<String>,
    /// One string of `X`/`.` per object.
    incidence: Vec<String>,
}

impl Serialize for FormalContext {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let incidence = (0..self.n_objects())
            .map(|g| {
                (0..self.n_attributes())
                    .map(|m| if self.has(g, m) { 'X' } else { '.' })
                    .collect()
            })
            .collect();
        FcRepr {
            objects: self.objects.clone(),
            attributes: self.attributes.clone(),
            incidence,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FormalContext {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = FcRepr::deserialize(d)?;
        let width = r.attributes.len();
        let mut rows = Vec::with_capacity(r.incidence.len());
        for line in &r.incidence {
            if line.chars().count() != width || line.chars().any(|c| c != 'X' && c != '.') {
                return Err(D::Error::custom(format!("bad incidence row {line:?}")));
            }
            rows.push(BitSet::from_indices(
                width,
                line.chars().enumerate().filter(|(_, c)| *c == 'X').map(|(i, _)| i),
            ));
        }
        FormalContext::from_rows(r.objects, r.attributes, rows).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn table3() -> FormalContext {
        fixtures::documents_formal_context()
    }

    #[test]
    fn derive_intent_examples() {
        let ctx = table3();
        assert_eq!(
            ctx.derive_intent(&["plan1.ps"]).unwrap(),
            vec!["project=plan1", "format=postscript"]
        );
        assert_eq!(ctx.derive_intent(&[] as &[&str]).unwrap().len(), 4);
        assert_eq!(
            ctx.derive_intent(&["plan1.ps", "plan2.ps"]).unwrap(),
            vec!["format=postscript"]
        );
    }

    #[test]
    fn derive_intent_names_unknown_object() {
        let err = table3().derive_intent(&["plan9.ps"]).unwrap_err();
        assert!(matches!(err, Error::Unknown { kind: "object", ref name } if name == "plan9.ps"));
    }

    #[test]
    fn derive_extent_examples() {
        let ctx = table3();
        assert_eq!(
            ctx.derive_extent(&["project=plan2"]).unwrap(),
            vec!["plan2.ps", "plan2.doc", "notes1.txt", "notes2.txt"]
        );
        assert_eq!(ctx.derive_extent(&[] as &[&str]).unwrap().len(), 5);
        assert_eq!(
            ctx.derive_extent(&["project=plan2", "format=text"]).unwrap(),
            vec!["notes1.txt", "notes2.txt"]
        );
        assert!(ctx.derive_extent(&["size=3"]).is_err());
    }

    #[test]
    fn close_objects_examples() {
        let ctx = table3();
        let c = ctx.close_objects(&["plan2.doc"]).unwrap();
        assert_eq!(
            c.extent_names(&ctx),
            vec!["plan2.ps", "plan2.doc", "notes1.txt", "notes2.txt"]
        );
        assert_eq!(c.intent_names(&ctx), vec!["project=plan2"]);

        let bottom = ctx.close_objects(&[] as &[&str]).unwrap();
        assert!(bottom.extent.is_empty() && bottom.intent.is_full());

        let notes = ctx.close_objects(&["notes1.txt"]).unwrap();
        assert_eq!(notes.extent_names(&ctx), vec!["notes1.txt", "notes2.txt"]);
        assert_eq!(notes.intent_names(&ctx), vec!["project=plan2", "format=text"]);
        assert!(notes.is_closed_in(&ctx));
    }

    #[test]
    fn apposition_identity_and_mismatch() {
        let ctx = table3();
        let empty = FormalContext::attribute_free(ctx.objects().to_vec()).unwrap();
        assert_eq!(ctx.apposition(&empty, None).unwrap(), ctx);

        let a = FormalContext::attribute_free(vec!["a".into()]).unwrap();
        let ab = FormalContext::attribute_free(vec!["a".into(), "b".into()]).unwrap();
        match a.apposition(&ab, None).unwrap_err() {
            Error::Apposition {
                only_left,
                only_right,
            } => {
                assert!(only_left.is_empty());
                assert_eq!(only_right, vec!["b"]);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn apposition_renames_collisions_with_label() {
        let ctx = table3();
        assert!(matches!(
            ctx.apposition(&ctx, None),
            Err(Error::AttributeCollision(_))
        ));
        let doubled = ctx.apposition(&ctx, Some("copy")).unwrap();
        assert_eq!(doubled.n_attributes(), 8);
        assert_eq!(doubled.attributes()[4], "copy/project=plan1");
    }

    #[test]
    fn apposition_aligns_reordered_objects() {
        let left = FormalContext::from_pairs(
            vec!["a".into(), "b".into()],
            vec!["x".into()],
            [("a", "x")],
        )
        .unwrap();
        let right = FormalContext::from_pairs(
            vec!["b".into(), "a".into()],
            vec!["y".into()],
            [("b", "y")],
        )
        .unwrap();
        let both = left.apposition(&right, None).unwrap();
        assert_eq!(both.pairs(), vec![("a", "x"), ("b", "y")]);
    }

    #[test]
    fn build_index_examples() {
        let mv = fixtures::documents();
        let project = mv.build_index("project").unwrap();
        assert_eq!(
            project.objects(&mv, &AttributeValue::text("plan1")),
            vec!["plan1.ps"]
        );
        assert_eq!(
            project.objects(&mv, &AttributeValue::text("plan2")),
            vec!["plan2.ps", "plan2.doc", "notes1.txt", "notes2.txt"]
        );
        let format = mv.build_index("format").unwrap();
        let posted: usize = format.postings.values().map(BitSet::count).sum();
        assert_eq!(posted, 4);
        assert!(format.postings.values().all(|s| !s.contains(2)));
        assert!(mv.build_index("owner").is_err());

        let single = ManyValuedContext::new(
            vec!["x".into()],
            vec!["t".into()],
            vec![vec![AttributeValue::Missing]],
        )
        .unwrap();
        assert!(single.build_index("t").unwrap().postings.is_empty());
    }

    #[test]
    fn many_valued_validation() {
        let dup = ManyValuedContext::new(
            vec!["a".into(), "a".into()],
            vec![],
            vec![vec![], vec![]],
        );
        assert!(dup.is_err());
        let ctrl = ManyValuedContext::new(vec!["a\n".into()], vec![], vec![vec![]]);
        assert!(ctrl.is_err());
        let mixed = ManyValuedContext::new(
            vec!["a".into(), "b".into()],
            vec!["t".into()],
            vec![
                vec![AttributeValue::Integer(1)],
                vec![AttributeValue::text("x")],
            ],
        );
        assert!(mixed.is_err());
    }

    #[test]
    fn domains_hold_only_observed_values() {
        let mv = fixtures::documents();
        let f = mv.sort_position("format").unwrap();
        assert_eq!(
            mv.domain(f),
            &[AttributeValue::text("postscript"), AttributeValue::text("text")]
        );
    }

    #[test]
    fn value_inference() {
        assert_eq!(AttributeValue::infer("1024"), AttributeValue::Integer(1024));
        assert_eq!(AttributeValue::infer("-3"), AttributeValue::Integer(-3));
        assert_eq!(
            AttributeValue::infer("1994-12-01"),
            AttributeValue::Date(NaiveDate::from_ymd_opt(1994, 12, 1).unwrap())
        );
        assert_eq!(AttributeValue::infer("1994-13-01"), AttributeValue::text("1994-13-01"));
        assert_eq!(AttributeValue::infer("+5"), AttributeValue::text("+5"));
        assert_eq!(AttributeValue::infer("-"), AttributeValue::text("-"));
    }

    #[test]
    fn values_compare_within_variant_only() {
        let a = AttributeValue::Integer(1);
        assert_eq!(a.compare(&AttributeValue::Integer(2)), Some(Ordering::Less));
        assert_eq!(a.compare(&AttributeValue::text("1")), None);
        assert_eq!(AttributeValue::Missing.compare(&AttributeValue::Missing), None);
    }

    #[test]
    fn json_forms_are_lossless() {
        let mv = ManyValuedContext::new(
            vec!["a".into()],
            vec!["t".into(), "i".into(), "d".into(), "m".into()],
            vec![vec![
                AttributeValue::text("12"),
                AttributeValue::Integer(12),
                AttributeValue::Date(NaiveDate::from_ymd_opt(2001, 2, 3).unwrap()),
                AttributeValue::Missing,
            ]],
        )
        .unwrap();
        let json = serde_json::to_string(&mv).unwrap();
        assert!(json.contains(r#"["12",12,{"date":"2001-02-03"},null]"#));
        let back: ManyValuedContext = serde_json::from_str(&json).unwrap();
        assert_eq!(back, mv);

        let ctx = table3();
        let back: FormalContext =
            serde_json::from_str(&serde_json::to_string(&ctx).unwrap()).unwrap();
        assert_eq!(back, ctx);
    }
}

//! Conceptual scaling: many-valued context → formal context.
//!
//! Scaled attribute names are `tag=value` (nominal) and `tag<=cut` (ordinal);
//! no spaces are inserted, so the names read back as query terms.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::context::{AttributeValue, FormalContext, ManyValuedContext, ValueKind};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scale", rename_all = "lowercase")]
pub enum ScaleKind {
    /// One attribute `tag=v` per observed value.
    Nominal,
    /// One attribute `tag<=c` per cut; cuts default to the observed values.
    Ordinal {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cuts: Option<Vec<AttributeValue>>,
    },
    Skip,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleEntry {
    pub sort: String,
    #[serde(flatten)]
    pub scale: ScaleKind,
}

/// Per-sort choice of scale.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScalePlan {
    pub entries: Vec<ScaleEntry>,
}

impl ScalePlan {
    pub fn new(entries: Vec<ScaleEntry>) -> Self {
        ScalePlan { entries }
    }

    /// Nominal scaling of every sort of `mv`.
    pub fn nominal(mv: &ManyValuedContext) -> Self {
        ScalePlan::nominal_on(mv.sorts())
    }

    pub fn nominal_on(sorts: &[impl AsRef<str>]) -> Self {
        ScalePlan {
            entries: sorts
                .iter()
                .map(|s| ScaleEntry {
                    sort: s.as_ref().to_string(),
                    scale: ScaleKind::Nominal,
                })
                .collect(),
        }
    }

    pub fn with(mut self, sort: impl Into<String>, scale: ScaleKind) -> Self {
        let sort = sort.into();
        self.entries.retain(|e| e.sort != sort);
        self.entries.push(ScaleEntry { sort, scale });
        self
    }

    pub fn get(&self, sort: &str) -> Option<&ScaleKind> {
        self.entries.iter().find(|e| e.sort == sort).map(|e| &e.scale)
    }

    /// Check the plan against `mv`. With `total`, every sort must appear.
    pub fn validate(&self, mv: &ManyValuedContext, total: bool) -> Result<()> {
        let mut seen = HashSet::new();
        for entry in &self.entries {
            let a = mv
                .sort_position(&entry.sort)
                .ok_or_else(|| Error::Plan(format!("sort `{}` is not in the context", entry.sort)))?;
            if !seen.insert(a) {
                return Err(Error::Plan(format!("sort `{}` listed twice", entry.sort)));
            }
            if let ScaleKind::Ordinal { cuts } = &entry.scale {
                let kind = mv.kind(a);
                if kind == Some(ValueKind::Text) {
                    return Err(Error::Plan(format!(
                        "ordinal scale on text sort `{}`",
                        entry.sort
                    )));
                }
                if let Some(cuts) = cuts {
                    for c in cuts {
                        match (c.kind(), kind) {
                            (None, _) | (Some(ValueKind::Text), _) => {
                                return Err(Error::Plan(format!(
                                    "cut `{c}` on `{}` is not an integer or date",
                                    entry.sort
                                )))
                            }
                            (Some(ck), Some(k)) if ck != k => {
                                return Err(Error::Plan(format!(
                                    "cut `{c}` does not match the {k} sort `{}`",
                                    entry.sort
                                )))
                            }
                            _ => {}
                        }
                    }
                    let increasing = cuts.windows(2).all(|w| {
                        w[0].compare(&w[1]) == Some(std::cmp::Ordering::Less)
                    });
                    if !increasing {
                        return Err(Error::Plan(format!(
                            "cuts on `{}` are not strictly increasing",
                            entry.sort
                        )));
                    }
                }
            }
        }
        if total {
            if let Some(missing) = mv.sorts().iter().enumerate().find(|(a, _)| !seen.contains(a)) {
                return Err(Error::Plan(format!("sort `{}` has no scale", missing.1)));
            }
        }
        Ok(())
    }

    /// Cut values used for an ordinal sort.
    pub(crate) fn cuts_for(mv: &ManyValuedContext, a: usize, cuts: &Option<Vec<AttributeValue>>) -> Vec<AttributeValue> {
        cuts.clone().unwrap_or_else(|| mv.domain(a).to_vec())
    }
}

pub fn nominal_name(tag: &str, value: &AttributeValue) -> String {
    format!("{tag}={value}")
}

pub fn ordinal_name(tag: &str, cut: &AttributeValue) -> String {
    format!("{tag}<={cut}")
}

/// Scale `mv` with a plan covering every sort.
pub fn scale(mv: &ManyValuedContext, plan: &ScalePlan) -> Result<FormalContext> {
    plan.validate(mv, true)?;
    Ok(scale_unchecked(mv, plan))
}

fn scale_unchecked(mv: &ManyValuedContext, plan: &ScalePlan) -> FormalContext {
    let mut ordered: Vec<(usize, &ScaleKind)> = plan
        .entries
        .iter()
        .map(|e| (mv.sort_position(&e.sort).expect("validated"), &e.scale))
        .collect();
    ordered.sort_by_key(|(a, _)| *a);

    let mut attributes = Vec::new();
    // one predicate column per emitted attribute: (sort, value test)
    let mut tests: Vec<(usize, Box<dyn Fn(&AttributeValue) -> bool>)> = Vec::new();
    for (a, kind) in ordered {
        let tag = &mv.sorts()[a];
        match kind {
            ScaleKind::Skip => {}
            ScaleKind::Nominal => {
                for v in mv.domain(a) {
                    attributes.push(nominal_name(tag, v));
                    let v = v.clone();
                    tests.push((a, Box::new(move |x| *x == v)));
                }
            }
            ScaleKind::Ordinal { cuts } => {
                for c in ScalePlan::cuts_for(mv, a, cuts) {
                    attributes.push(ordinal_name(tag, &c));
                    tests.push((
                        a,
                        Box::new(move |x| {
                            matches!(
                                x.compare(&c),
                                Some(std::cmp::Ordering::Less | std::cmp::Ordering::Equal)
                            )
                        }),
                    ));
                }
            }
        }
    }

    let width = attributes.len();
    let rows = (0..mv.objects().len())
        .map(|g| {
            BitSet::from_indices(
                width,
                tests
                    .iter()
                    .enumerate()
                    .filter(|(_, (a, test))| test(mv.value_at(g, *a)))
                    .map(|(m, _)| m),
            )
        })
        .collect();
    FormalContext::from_rows(mv.objects().to_vec(), attributes, rows)
        .expect("scaled attribute names are unique per sort")
}

/// Scale each facet on its own sorts and combine the results by apposition.
pub fn scale_facets(mv: &ManyValuedContext, facets: &[(String, ScalePlan)]) -> Result<FormalContext> {
    let mut owner: std::collections::HashMap<&str, &str> = std::collections::HashMap::new();
    for (label, plan) in facets {
        plan.validate(mv, false)
            .map_err(|e| Error::Facet(format!("facet `{label}`: {e}")))?;
        for entry in &plan.entries {
            if let Some(prev) = owner.insert(entry.sort.as_str(), label.as_str()) {
                return Err(Error::Facet(format!(
                    "sort `{}` appears in facets `{prev}` and `{label}`",
                    entry.sort
                )));
            }
        }
    }
    let mut acc = FormalContext::attribute_free(mv.objects().to_vec())?;
    for (label, plan) in facets {
        let part = scale_unchecked(mv, plan);
        acc = acc.apposition(&part, Some(label))?;
    }
    Ok(acc)
}

//! Metadata from a directory tree.
//!
//! Every regular file below the root becomes one object, named by its path
//! relative to the root (with `/` separators). Built-in sorts are `name`,
//! `size`, `created`, `modified`, `owner` and `extension`; tag rules add more
//! sorts from directory names.

use std::collections::HashMap;
use std::path::Path;
use std::time::SystemTime;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::context::{check_identifier, AttributeValue, ManyValuedContext};
use crate::error::{Error, Result};

use super::records::type_column;

pub const BUILTIN_SORTS: [&str; 6] = ["name", "size", "created", "modified", "owner", "extension"];

/// Derive a tag from one directory of each file's relative path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagRule {
    pub tag: String,
    /// Directory index: 0 is the top directory, -1 the file's own directory.
    pub segment: i64,
    /// Optional regex; the first capture group (or the whole match) is the value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagRules {
    #[serde(default, rename = "rule")]
    pub rules: Vec<TagRule>,
}

impl TagRules {
    /// Parse a TOML file of `[[rule]]` tables.
    pub fn from_toml(text: &str) -> Result<Self> {
        let rules: TagRules = toml::from_str(text).map_err(|e| Error::Workspace(format!("tag rules: {e}")))?;
        for r in &rules.rules {
            check_identifier("tag", &r.tag)?;
            if BUILTIN_SORTS.contains(&r.tag.as_str()) {
                return Err(Error::Workspace(format!("tag rule shadows built-in sort `{}`", r.tag)));
            }
            if let Some(p) = &r.pattern {
                regex::Regex::new(p).map_err(|e| Error::Workspace(format!("tag `{}`: {e}", r.tag)))?;
            }
        }
        let mut seen = std::collections::HashSet::new();
        for r in &rules.rules {
            if !seen.insert(&r.tag) {
                return Err(Error::Workspace(format!("tag `{}` has two rules", r.tag)));
            }
        }
        Ok(rules)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warning {
    pub object: String,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct Ingested {
    pub context: ManyValuedContext,
    pub warnings: Vec<Warning>,
}

fn date_of(t: std::io::Result<SystemTime>) -> Option<NaiveDate> {
    t.ok().map(|t| DateTime::<Utc>::from(t).date_naive())
}

fn passwd_users() -> HashMap<u32, String> {
    let Ok(text) = std::fs::read_to_string("/etc/passwd") else {
        return HashMap::new();
    };
    text.lines()
        .filter_map(|line| {
            let mut fields = line.split(':');
            let name = fields.next()?;
            let uid = fields.nth(1)?.parse().ok()?;
            Some((uid, name.to_string()))
        })
        .collect()
}

#[cfg(unix)]
fn owner_uid(meta: &std::fs::Metadata) -> Option<u32> {
    use std::os::unix::fs::MetadataExt;
    Some(meta.uid())
}

#[cfg(not(unix))]
fn owner_uid(_: &std::fs::Metadata) -> Option<u32> {
    None
}

fn owner_value(uid: Option<u32>, users: &HashMap<u32, String>) -> AttributeValue {
    uid.and_then(|u| users.get(&u).cloned())
        .map(AttributeValue::Text)
        .unwrap_or(AttributeValue::Missing)
}

fn apply_rule(rule: &TagRule, dirs: &[&str]) -> std::result::Result<String, String> {
    let idx = if rule.segment < 0 {
        dirs.len() as i64 + rule.segment
    } else {
        rule.segment
    };
    let segment = usize::try_from(idx)
        .ok()
        .and_then(|i| dirs.get(i))
        .ok_or_else(|| format!("no directory at index {} for tag `{}`", rule.segment, rule.tag))?;
    match &rule.pattern {
        None => Ok(segment.to_string()),
        Some(p) => {
            let re = regex::Regex::new(p).expect("checked when the rules were read");
            let caps = re
                .captures(segment)
                .ok_or_else(|| format!("`{segment}` does not match {p:?} for tag `{}`", rule.tag))?;
            Ok(caps.get(1).or_else(|| caps.get(0)).unwrap().as_str().to_string())
        }
    }
}

/// Walk `root` and abstract file metadata into a many-valued context.
pub fn ingest_directory(root: &Path, rules: &TagRules) -> Result<Ingested> {
    let meta = std::fs::metadata(root).map_err(|e| Error::io(root, e))?;
    if !meta.is_dir() {
        return Err(Error::Workspace(format!("{} is not a directory", root.display())));
    }
    let mut files = Vec::new();
    for entry in walkdir::WalkDir::new(root).follow_links(false) {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            Error::io(path, e.into_io_error().unwrap_or_else(|| std::io::Error::other("walk failed")))
        })?;
        if entry.file_type().is_file() {
            files.push(entry.into_path());
        }
    }
    let mut named: Vec<(String, std::path::PathBuf)> = files
        .into_iter()
        .map(|p| {
            let rel = p.strip_prefix(root).expect("walk stays below root");
            let id = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect::<Vec<_>>()
                .join("/");
            (id, p)
        })
        .collect();
    named.sort();

    let users = passwd_users();
    let mut warnings = Vec::new();
    let mut builtin: Vec<Vec<AttributeValue>> = Vec::with_capacity(named.len());
    let mut tagged: Vec<Vec<Option<String>>> = vec![Vec::with_capacity(named.len()); rules.rules.len()];
    for (id, path) in &named {
        let meta = std::fs::metadata(path).map_err(|e| Error::io(path, e))?;
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let extension = path
            .extension()
            .map(|e| AttributeValue::Text(e.to_string_lossy().into_owned()))
            .unwrap_or(AttributeValue::Missing);
        let owner = owner_value(owner_uid(&meta), &users);
        let date = |d: Option<NaiveDate>| d.map(AttributeValue::Date).unwrap_or(AttributeValue::Missing);
        builtin.push(vec![
            AttributeValue::Text(name),
            AttributeValue::Integer(meta.len().try_into().unwrap_or(i64::MAX)),
            date(date_of(meta.created())),
            date(date_of(meta.modified())),
            owner,
            extension,
        ]);
        let dirs: Vec<&str> = id.split('/').collect();
        let dirs = &dirs[..dirs.len() - 1];
        for (r, rule) in rules.rules.iter().enumerate() {
            match apply_rule(rule, dirs) {
                Ok(v) => tagged[r].push(Some(v)),
                Err(message) => {
                    warnings.push(Warning {
                        object: id.clone(),
                        message,
                    });
                    tagged[r].push(None);
                }
            }
        }
    }

    let columns: Vec<Vec<AttributeValue>> = tagged
        .iter()
        .map(|col| type_column(&col.iter().map(|v| v.as_deref()).collect::<Vec<_>>()))
        .collect();
    let values = builtin
        .into_iter()
        .enumerate()
        .map(|(g, mut row)| {
            row.extend(columns.iter().map(|c| c[g].clone()));
            row
        })
        .collect();
    let mut sorts: Vec<String> = BUILTIN_SORTS.iter().map(|s| s.to_string()).collect();
    sorts.extend(rules.rules.iter().map(|r| r.tag.clone()));
    let objects = named.into_iter().map(|(id, _)| id).collect();
    Ok(Ingested {
        context: ManyValuedContext::new(objects, sorts, values)?,
        warnings,
    })
}

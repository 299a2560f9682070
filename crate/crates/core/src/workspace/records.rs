//! Record files: blocks of `field: value` lines separated by blank lines.
//!
//! A line starting with whitespace continues the previous value (joined with
//! a single space). Lines starting with `#` are comments. The optional `id`
//! field names the object; otherwise records are named `record1`, `record2`,
//! and so on. Each column is typed as a whole: integer if every value is an
//! integer, date if every value is an ISO date, text otherwise.

use std::collections::HashMap;

use crate::context::{check_identifier, parse_date, parse_integer, AttributeValue, ManyValuedContext};
use crate::error::{Error, Result};

struct Record {
    line: usize,
    id: Option<String>,
    fields: Vec<(String, String)>,
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

fn split_records(text: &str) -> Result<Vec<Record>> {
    let mut records = Vec::new();
    let mut current: Option<Record> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        if raw.trim().is_empty() {
            if let Some(r) = current.take() {
                records.push(r);
            }
            continue;
        }
        if raw.starts_with('#') {
            continue;
        }
        if raw.starts_with([' ', '\t']) {
            let rec = current
                .as_mut()
                .ok_or_else(|| syntax(line_no, "continuation line outside a record"))?;
            let cont = raw.trim();
            match rec.fields.last_mut() {
                Some((_, value)) => {
                    if !value.is_empty() {
                        value.push(' ');
                    }
                    value.push_str(cont);
                }
                None => match rec.id.as_mut() {
                    Some(id) => {
                        id.push(' ');
                        id.push_str(cont);
                    }
                    None => return Err(syntax(line_no, "continuation line before any field")),
                },
            }
            continue;
        }
        let (field, value) = raw
            .split_once(':')
            .ok_or_else(|| syntax(line_no, format!("expected `field: value`, found {raw:?}")))?;
        let field = field.trim();
        if field.is_empty() || field.chars().any(|c| c.is_whitespace() || c.is_control()) {
            return Err(syntax(line_no, format!("invalid field name {field:?}")));
        }
        let value = value.trim().to_string();
        let rec = current.get_or_insert_with(|| Record {
            line: line_no,
            id: None,
            fields: Vec::new(),
        });
        if field == "id" {
            if rec.id.is_some() {
                return Err(syntax(line_no, "duplicate `id` field"));
            }
            rec.id = Some(value);
        } else {
            if rec.fields.iter().any(|(f, _)| f == field) {
                return Err(syntax(line_no, format!("duplicate field `{field}`")));
            }
            rec.fields.push((field.to_string(), value));
        }
    }
    if let Some(r) = current.take() {
        records.push(r);
    }
    Ok(records)
}

pub(crate) fn type_column(raw: &[Option<&str>]) -> Vec<AttributeValue> {
    let present = || raw.iter().flatten();
    let all_int = present().all(|v| parse_integer(v).is_some());
    let all_date = present().all(|v| parse_date(v).is_some());
    raw.iter()
        .map(|cell| match cell {
            None => AttributeValue::Missing,
            Some(v) if all_int => AttributeValue::Integer(parse_integer(v).unwrap()),
            Some(v) if all_date => AttributeValue::Date(parse_date(v).unwrap()),
            Some(v) => AttributeValue::Text(v.to_string()),
        })
        .collect()
}

/// Parse a record file into a many-valued context.
pub fn parse_records(text: &str) -> Result<ManyValuedContext> {
    let records = split_records(text)?;
    let mut objects = Vec::with_capacity(records.len());
    let mut seen = HashMap::new();
    for (n, rec) in records.iter().enumerate() {
        let id = rec.id.clone().unwrap_or_else(|| format!("record{}", n + 1));
        if id.is_empty() {
            return Err(syntax(rec.line, "empty `id`"));
        }
        check_identifier("object", &id).map_err(|e| syntax(rec.line, e.to_string()))?;
        if let Some(prev) = seen.insert(id.clone(), rec.line) {
            return Err(syntax(
                rec.line,
                format!("object `{id}` already defined at line {prev}"),
            ));
        }
        objects.push(id);
    }

    let mut sorts: Vec<String> = Vec::new();
    for rec in &records {
        for (f, _) in &rec.fields {
            if !sorts.contains(f) {
                sorts.push(f.clone());
            }
        }
    }
    let columns: Vec<Vec<AttributeValue>> = sorts
        .iter()
        .map(|s| {
            let raw: Vec<Option<&str>> = records
                .iter()
                .map(|r| {
                    r.fields
                        .iter()
                        .find(|(f, _)| f == s)
                        .map(|(_, v)| v.as_str())
                        .filter(|v| !v.is_empty())
                })
                .collect();
            type_column(&raw)
        })
        .collect();
    let values = (0..objects.len())
        .map(|g| columns.iter().map(|col| col[g].clone()).collect())
        .collect();
    ManyValuedContext::new(objects, sorts, values)
}

/// Render a context back into record form. Missing cells are omitted.
pub fn write_records(mv: &ManyValuedContext) -> String {
    let mut out = String::new();
    for (g, id) in mv.objects().iter().enumerate() {
        if g > 0 {
            out.push('\n');
        }
        out.push_str(&format!("id: {id}\n"));
        for (a, tag) in mv.sorts().iter().enumerate() {
            let v = mv.value_at(g, a);
            if !v.is_missing() {
                out.push_str(&format!("{tag}: {v}\n"));
            }
        }
    }
    out
}

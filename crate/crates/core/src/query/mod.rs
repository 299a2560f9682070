//! Descriptive names: conjunctive attribute queries over a many-valued context.

mod eval;
mod parse;

use std::fmt;

pub use eval::{evaluate, evaluate_lenient, evaluate_names};
pub use parse::parse;

/// The query grammar, for error messages.
pub const GRAMMAR: &str = "\
query := '*' | term ('&' term)*
term  := tag op value | tag '~' '/' regex '/'
op    := '=' | '<' | '<=' | '>' | '>='
value := bare-token | '\"' chars '\"'
";

use crate::context::{AttributeValue, ManyValuedContext};
use crate::scaling::{nominal_name, ordinal_name, ScaleKind, ScalePlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operator {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
    Match,
}

impl Operator {
    pub fn symbol(self) -> &'static str {
        match self {
            Operator::Eq => "=",
            Operator::Lt => "<",
            Operator::Le => "<=",
            Operator::Gt => ">",
            Operator::Ge => ">=",
            Operator::Match => "~",
        }
    }

    pub fn is_order(self) -> bool {
        matches!(self, Operator::Lt | Operator::Le | Operator::Gt | Operator::Ge)
    }
}

/// A compiled regular expression that remembers its source text.
#[derive(Clone, Debug)]
pub struct Pattern {
    source: String,
    regex: regex::Regex,
}

impl Pattern {
    pub fn new(source: &str) -> Result<Self, regex::Error> {
        Ok(Pattern {
            source: source.to_string(),
            regex: regex::Regex::new(source)?,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn is_match(&self, text: &str) -> bool {
        self.regex.is_match(text)
    }
}

impl PartialEq for Pattern {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

impl Eq for Pattern {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Operand {
    Value(AttributeValue),
    Regex(Pattern),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    pub tag: String,
    pub op: Operator,
    pub operand: Operand,
}

impl Predicate {
    /// Whether a single cell satisfies this predicate. Missing satisfies nothing.
    pub fn holds(&self, value: &AttributeValue) -> bool {
        use std::cmp::Ordering::*;
        match (&self.operand, value) {
            (_, AttributeValue::Missing) => false,
            (Operand::Regex(p), AttributeValue::Text(t)) => self.op == Operator::Match && p.is_match(t),
            (Operand::Regex(_), _) => false,
            (Operand::Value(v), cell) => match (self.op, cell.compare(v)) {
                (_, None) => false,
                (Operator::Eq, Some(o)) => o == Equal,
                (Operator::Lt, Some(o)) => o == Less,
                (Operator::Le, Some(o)) => o != Greater,
                (Operator::Gt, Some(o)) => o == Greater,
                (Operator::Ge, Some(o)) => o != Less,
                (Operator::Match, _) => false,
            },
        }
    }
}

/// A conjunction of predicates, or the distinguished `*` query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DescriptiveName {
    All,
    Terms(Vec<Predicate>),
}

impl DescriptiveName {
    pub fn terms(&self) -> &[Predicate] {
        match self {
            DescriptiveName::All => &[],
            DescriptiveName::Terms(t) => t,
        }
    }

    /// Conjunction of two queries.
    pub fn and(&self, other: &DescriptiveName) -> DescriptiveName {
        let terms: Vec<Predicate> = self.terms().iter().chain(other.terms()).cloned().collect();
        if terms.is_empty() {
            DescriptiveName::All
        } else {
            DescriptiveName::Terms(terms)
        }
    }

    pub fn has_regex(&self) -> bool {
        self.terms().iter().any(|t| t.op == Operator::Match)
    }
}

impl std::str::FromStr for DescriptiveName {
    type Err = crate::error::ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

fn needs_quotes(text: &str) -> bool {
    text.is_empty()
        || !text.chars().all(parse::is_bare_char)
        || text.starts_with(['=', '<', '>', '!', '~'])
        || AttributeValue::infer(text) != AttributeValue::Text(text.to_string())
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Value(AttributeValue::Text(t)) if needs_quotes(t) => {
                f.write_str("\"")?;
                for c in t.chars() {
                    if c == '"' || c == '\\' {
                        f.write_str("\\")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("\"")
            }
            Operand::Value(v) => write!(f, "{v}"),
            Operand::Regex(p) => {
                f.write_str("/")?;
                let mut chars = p.source().chars();
                while let Some(c) = chars.next() {
                    match c {
                        '\\' => {
                            f.write_str("\\")?;
                            if let Some(n) = chars.next() {
                                write!(f, "{n}")?;
                            }
                        }
                        '/' => f.write_str("\\/")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("/")
            }
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.tag, self.op.symbol(), self.operand)
    }
}

impl fmt::Display for DescriptiveName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DescriptiveName::All => f.write_str("*"),
            DescriptiveName::Terms(terms) => {
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" & ")?;
                    }
                    write!(f, "{t}")?;
                }
                Ok(())
            }
        }
    }
}

/// Result of mapping a query onto scaled attributes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScaledQuery {
    /// The query selects exactly the objects having all these attributes.
    Attributes(Vec<String>),
    /// Some term has no scaled counterpart; evaluate extensionally.
    Unrepresentable,
}

/// Map a query onto the attributes of `scale(mv, plan)`.
///
/// Equality terms become `tag=value` under a nominal scale when the value is
/// observed; order terms become a single ordinal cut `tag<=c` when `<=` hits a
/// cut exactly or `<` sits just above one. Everything else is unrepresentable.
pub fn to_scaled_attributes(q: &DescriptiveName, plan: &ScalePlan, mv: &ManyValuedContext) -> ScaledQuery {
    let mut out: Vec<String> = Vec::new();
    for term in q.terms() {
        let Some(a) = mv.sort_position(&term.tag) else {
            return ScaledQuery::Unrepresentable;
        };
        let Operand::Value(v) = &term.operand else {
            return ScaledQuery::Unrepresentable;
        };
        let name = match (plan.get(&term.tag), term.op) {
            (Some(ScaleKind::Nominal), Operator::Eq) if mv.domain(a).contains(v) => {
                nominal_name(&term.tag, v)
            }
            (Some(ScaleKind::Ordinal { cuts }), Operator::Le | Operator::Lt) => {
                let cut = if term.op == Operator::Le {
                    Some(v.clone())
                } else {
                    predecessor(v)
                };
                match cut {
                    Some(c) if ScalePlan::cuts_for(mv, a, cuts).contains(&c) => ordinal_name(&term.tag, &c),
                    _ => return ScaledQuery::Unrepresentable,
                }
            }
            _ => return ScaledQuery::Unrepresentable,
        };
        if !out.contains(&name) {
            out.push(name);
        }
    }
    ScaledQuery::Attributes(out)
}

fn predecessor(v: &AttributeValue) -> Option<AttributeValue> {
    match v {
        AttributeValue::Integer(i) => i.checked_sub(1).map(AttributeValue::Integer),
        AttributeValue::Date(d) => d.pred_opt().map(AttributeValue::Date),
        _ => None,
    }
}

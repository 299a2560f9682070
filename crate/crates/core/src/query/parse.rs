//! Hand-written recursive-descent parser for descriptive names.
//!
//! ```text
//! query := '*' | term ('&' term)*
//! term  := tag op value | tag '~' '/' regex '/'
//! op    := '=' | '<' | '<=' | '>' | '>='
//! value := bare-token | '"' chars '"'
//! ```
//!
//! Whitespace between tokens is ignored. Bare tokens that read as integers or
//! ISO-8601 dates are typed as such; quoted values are always text. Inside a
//! regex, `\/` stands for a literal slash and every other escape is passed to
//! the regex engine unchanged.

use crate::context::AttributeValue;
use crate::error::{ParseError, ParseErrorKind};

use super::{DescriptiveName, Operand, Operator, Pattern, Predicate};

const OPERATORS: &[&str] = &["=", "<", "<=", ">", ">=", "~"];

pub(crate) fn is_tag_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.')
}

pub(crate) fn is_bare_char(c: char) -> bool {
    !c.is_whitespace() && c != '&' && c != '"'
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(&pred) {
            self.bump();
        }
        &self.src[start..self.pos]
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        let tok = self.src[self.pos..]
            .chars()
            .next()
            .map(String::from)
            .unwrap_or_default();
        ParseError {
            offset: self.pos,
            kind: ParseErrorKind::Unexpected(tok),
            expected: expected.to_vec(),
        }
    }

    fn query(&mut self) -> PResult<DescriptiveName> {
        self.skip_ws();
        if self.pos == self.src.len() {
            return Err(ParseError {
                offset: 0,
                kind: ParseErrorKind::Empty,
                expected: vec!["*", "tag"],
            });
        }
        if self.peek() == Some('*') {
            self.bump();
            self.skip_ws();
            if self.pos != self.src.len() {
                return Err(self.unexpected(&["end of input"]));
            }
            return Ok(DescriptiveName::All);
        }
        let mut terms = vec![self.term()?];
        loop {
            self.skip_ws();
            match self.peek() {
                None => return Ok(DescriptiveName::Terms(terms)),
                Some('&') => {
                    self.bump();
                    self.skip_ws();
                    terms.push(self.term()?);
                }
                Some(_) => return Err(self.unexpected(&["&", "end of input"])),
            }
        }
    }

    fn term(&mut self) -> PResult<Predicate> {
        let tag = self.take_while(is_tag_char);
        if tag.is_empty() {
            return Err(self.unexpected(&["tag"]));
        }
        self.skip_ws();
        let op_start = self.pos;
        let op_text = self.take_while(|c| matches!(c, '=' | '<' | '>' | '!' | '~'));
        let op = match op_text {
            "" => return Err(self.unexpected(OPERATORS)),
            "=" => Operator::Eq,
            "<" => Operator::Lt,
            "<=" => Operator::Le,
            ">" => Operator::Gt,
            ">=" => Operator::Ge,
            "~" => Operator::Match,
            other => {
                return Err(ParseError {
                    offset: op_start,
                    kind: ParseErrorKind::UnknownOperator(other.to_string()),
                    expected: OPERATORS.to_vec(),
                })
            }
        };
        self.skip_ws();
        let operand = if op == Operator::Match {
            Operand::Regex(self.regex()?)
        } else {
            Operand::Value(self.value()?)
        };
        Ok(Predicate {
            tag: tag.to_string(),
            op,
            operand,
        })
    }

    fn value(&mut self) -> PResult<AttributeValue> {
        if self.peek() == Some('"') {
            let start = self.pos;
            self.bump();
            let mut out = String::new();
            loop {
                match self.bump() {
                    None => {
                        return Err(ParseError {
                            offset: start,
                            kind: ParseErrorKind::UnterminatedString,
                            expected: vec!["\""],
                        })
                    }
                    Some('"') => return Ok(AttributeValue::Text(out)),
                    Some('\\') => match self.bump() {
                        Some(c) => out.push(c),
                        None => {
                            return Err(ParseError {
                                offset: start,
                                kind: ParseErrorKind::UnterminatedString,
                                expected: vec!["\""],
                            })
                        }
                    },
                    Some(c) => out.push(c),
                }
            }
        }
        let token = self.take_while(is_bare_char);
        if token.is_empty() {
            return Err(self.unexpected(&["value", "\""]));
        }
        Ok(AttributeValue::infer(token))
    }

    fn regex(&mut self) -> PResult<Pattern> {
        if self.peek() != Some('/') {
            return Err(self.unexpected(&["/"]));
        }
        let start = self.pos;
        self.bump();
        let mut source = String::new();
        loop {
            match self.bump() {
                None => {
                    return Err(ParseError {
                        offset: start,
                        kind: ParseErrorKind::UnterminatedRegex,
                        expected: vec!["/"],
                    })
                }
                Some('/') => break,
                Some('\\') => match self.bump() {
                    Some('/') => source.push('/'),
                    Some(c) => {
                        source.push('\\');
                        source.push(c);
                    }
                    None => {
                        return Err(ParseError {
                            offset: start,
                            kind: ParseErrorKind::UnterminatedRegex,
                            expected: vec!["/"],
                        })
                    }
                },
                Some(c) => source.push(c),
            }
        }
        Pattern::new(&source).map_err(|e| ParseError {
            offset: start,
            kind: ParseErrorKind::BadRegex(e.to_string()),
            expected: Vec::new(),
        })
    }
}

pub fn parse(input: &str) -> Result<DescriptiveName, ParseError> {
    Parser { src: input, pos: 0 }.query()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjunction_of_equalities() {
        let q = parse("format=text & project=plan2 & name=notes2.txt").unwrap();
        let DescriptiveName::Terms(terms) = q else { panic!() };
        assert_eq!(terms.len(), 3);
        assert!(terms.iter().all(|t| t.op == Operator::Eq));
        assert_eq!(terms[2].tag, "name");
        assert_eq!(terms[2].operand, Operand::Value(AttributeValue::text("notes2.txt")));
    }

    #[test]
    fn star_is_all() {
        assert_eq!(parse("*").unwrap(), DescriptiveName::All);
        assert_eq!(parse("  *  ").unwrap(), DescriptiveName::All);
        assert!(parse("* & a=b").is_err());
    }

    #[test]
    fn order_and_regex_terms() {
        let q = parse(r"size>=1024 & name~/.*\.ps$/").unwrap();
        let DescriptiveName::Terms(terms) = q else { panic!() };
        assert_eq!(terms[0].op, Operator::Ge);
        assert_eq!(terms[0].operand, Operand::Value(AttributeValue::Integer(1024)));
        assert_eq!(terms[1].op, Operator::Match);
        match &terms[1].operand {
            Operand::Regex(p) => assert_eq!(p.source(), r".*\.ps$"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn quoted_values_are_text() {
        let q = parse(r#"size="1024" & title="Scalable Systems \"and\" Software""#).unwrap();
        let DescriptiveName::Terms(terms) = q else { panic!() };
        assert_eq!(terms[0].operand, Operand::Value(AttributeValue::text("1024")));
        assert_eq!(
            terms[1].operand,
            Operand::Value(AttributeValue::text("Scalable Systems \"and\" Software"))
        );
    }

    #[test]
    fn dates_are_typed() {
        let q = parse("created<1994-12-01").unwrap();
        let DescriptiveName::Terms(terms) = q else { panic!() };
        assert!(matches!(terms[0].operand, Operand::Value(AttributeValue::Date(_))));
    }

    #[test]
    fn escaped_slash_in_regex() {
        let q = parse(r"class~/^a\/b/").unwrap();
        let DescriptiveName::Terms(terms) = q else { panic!() };
        match &terms[0].operand {
            Operand::Regex(p) => assert_eq!(p.source(), "^a/b"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_input() {
        assert_eq!(parse("").unwrap_err().kind, ParseErrorKind::Empty);
        assert_eq!(parse("   ").unwrap_err().kind, ParseErrorKind::Empty);
    }

    #[test]
    fn unknown_operator_reports_offset() {
        let err = parse("a=b & size!=3").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownOperator("!=".into()));
        assert_eq!(err.offset, 10);
        let err = parse("a==b").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownOperator("==".into()));
    }

    #[test]
    fn syntax_errors_carry_expected_tokens() {
        let err = parse("a=b c=d").unwrap_err();
        assert_eq!(err.offset, 4);
        assert_eq!(err.expected, vec!["&", "end of input"]);

        let err = parse("a=b &").unwrap_err();
        assert_eq!(err.offset, 5);
        assert_eq!(err.expected, vec!["tag"]);

        let err = parse("project plan2").unwrap_err();
        assert_eq!(err.offset, 8);
        assert!(err.expected.contains(&"="));

        let err = parse("a=").unwrap_err();
        assert_eq!(err.offset, 2);

        let err = parse("a~x").unwrap_err();
        assert_eq!(err.expected, vec!["/"]);
    }

    #[test]
    fn unterminated_tokens() {
        assert_eq!(
            parse(r#"a="abc"#).unwrap_err().kind,
            ParseErrorKind::UnterminatedString
        );
        assert_eq!(parse("a~/abc").unwrap_err().kind, ParseErrorKind::UnterminatedRegex);
        assert!(matches!(
            parse("a~/(/").unwrap_err().kind,
            ParseErrorKind::BadRegex(_)
        ));
    }
}

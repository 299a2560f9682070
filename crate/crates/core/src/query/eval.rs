use crate::bitset::BitSet;
use crate::context::{ManyValuedContext, ValueKind};
use crate::error::{Error, Result};

use super::{DescriptiveName, Operand, Operator, Predicate};

fn check_types(term: &Predicate, kind: Option<ValueKind>) -> Result<()> {
    // an all-missing column has no type and simply matches nothing
    let Some(kind) = kind else { return Ok(()) };
    match (&term.operand, term.op) {
        (Operand::Regex(_), _) if kind != ValueKind::Text => Err(Error::Type(format!(
            "`~` needs a text tag, `{}` is {kind}",
            term.tag
        ))),
        (Operand::Value(_), op) if op.is_order() && kind == ValueKind::Text => Err(Error::Type(
            format!("`{}` needs an integer or date tag, `{}` is text", op.symbol(), term.tag),
        )),
        (Operand::Value(v), _) if v.kind() != Some(kind) => Err(Error::Type(format!(
            "`{}` is {kind} but `{v}` is {}",
            term.tag,
            v.kind().map(|k| k.to_string()).unwrap_or_else(|| "missing".into())
        ))),
        _ => Ok(()),
    }
}

fn restrict(term: &Predicate, a: usize, mv: &ManyValuedContext, acc: &mut BitSet) {
    match (&term.operand, term.op) {
        (Operand::Value(v), Operator::Eq) => {
            // equality goes through the postings of the index relation
            let index = mv
                .build_index(&term.tag)
                .expect("tag resolved by caller");
            match index.lookup(v) {
                Some(posted) => acc.intersect_with(posted),
                None => *acc = BitSet::new(acc.universe()),
            }
        }
        _ => {
            let keep: Vec<usize> = acc
                .iter()
                .filter(|&g| term.holds(mv.value_at(g, a)))
                .collect();
            *acc = BitSet::from_indices(acc.universe(), keep);
        }
    }
}

/// Objects of `scope` satisfying every predicate of `q`.
pub fn evaluate(q: &DescriptiveName, mv: &ManyValuedContext, scope: &BitSet) -> Result<BitSet> {
    let mut resolved = Vec::with_capacity(q.terms().len());
    for term in q.terms() {
        let a = mv.require_sort(&term.tag)?;
        check_types(term, mv.kind(a))?;
        resolved.push((term, a));
    }
    let mut acc = scope.clone();
    for (term, a) in resolved {
        if acc.is_empty() {
            break;
        }
        restrict(term, a, mv, &mut acc);
    }
    Ok(acc)
}

/// Like [`evaluate`], but a tag the context lacks or a type mismatch makes
/// the query match nothing instead of failing. Used when a query written
/// against one space is applied to objects of another.
pub fn evaluate_lenient(q: &DescriptiveName, mv: &ManyValuedContext, scope: &BitSet) -> BitSet {
    let mut acc = scope.clone();
    for term in q.terms() {
        let Some(a) = mv.sort_position(&term.tag) else {
            return BitSet::new(scope.universe());
        };
        if check_types(term, mv.kind(a)).is_err() {
            return BitSet::new(scope.universe());
        }
        restrict(term, a, mv, &mut acc);
    }
    acc
}

/// Name-level evaluation; `scope = None` means every object.
pub fn evaluate_names(
    q: &DescriptiveName,
    mv: &ManyValuedContext,
    scope: Option<&[String]>,
) -> Result<Vec<String>> {
    let n = mv.objects().len();
    let scope_set = match scope {
        None => BitSet::full(n),
        Some(names) => {
            let mut s = BitSet::new(n);
            for name in names {
                s.insert(
                    mv.object_position(name)
                        .ok_or_else(|| Error::unknown("object", name))?,
                );
            }
            s
        }
    };
    let hits = evaluate(q, mv, &scope_set)?;
    Ok(hits.iter().map(|g| mv.objects()[g].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::AttributeValue;
    use crate::fixtures;
    use crate::query::parse;
    use proptest::prelude::*;

    fn run(q: &str, scope: Option<&[&str]>) -> Result<Vec<String>> {
        let mv = fixtures::documents();
        let scope: Option<Vec<String>> = scope.map(|s| s.iter().map(|x| x.to_string()).collect());
        evaluate_names(&parse(q).unwrap(), &mv, scope.as_deref())
    }

    #[test]
    fn document_queries() {
        assert_eq!(
            run("project=plan2 & format=text", None).unwrap(),
            vec!["notes1.txt", "notes2.txt"]
        );
        assert_eq!(run("*", None).unwrap().len(), 5);
        assert_eq!(
            run("format=postscript", Some(&["plan2.ps", "plan2.doc"])).unwrap(),
            vec!["plan2.ps"]
        );
        assert_eq!(run("format~/^post/", None).unwrap(), vec!["plan1.ps", "plan2.ps"]);
    }

    #[test]
    fn missing_never_matches() {
        assert!(!run("format~/.*/", None).unwrap().contains(&"plan2.doc".to_string()));
    }

    #[test]
    fn errors() {
        assert!(matches!(run("owner=me", None), Err(Error::Unknown { .. })));
        assert!(matches!(run("format>=text", None), Err(Error::Type(_))));
        assert!(matches!(run("format=12", None), Err(Error::Type(_))));
        assert!(matches!(run("*", Some(&["ghost"])), Err(Error::Unknown { .. })));
    }

    #[test]
    fn integer_order_and_regex_type_rules() {
        let mv = ManyValuedContext::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec!["size".into()],
            vec![
                vec![AttributeValue::Integer(512)],
                vec![AttributeValue::Integer(2048)],
                vec![AttributeValue::Missing],
            ],
        )
        .unwrap();
        let q = parse("size>=1024").unwrap();
        assert_eq!(evaluate_names(&q, &mv, None).unwrap(), vec!["b"]);
        let q = parse("size<1024").unwrap();
        assert_eq!(evaluate_names(&q, &mv, None).unwrap(), vec!["a"]);
        assert!(matches!(
            evaluate_names(&parse("size~/1/").unwrap(), &mv, None),
            Err(Error::Type(_))
        ));
        assert!(matches!(
            evaluate_names(&parse(r#"size="512""#).unwrap(), &mv, None),
            Err(Error::Type(_))
        ));
    }

    #[test]
    fn lenient_evaluation_swallows_foreign_tags() {
        let mv = fixtures::documents();
        let q = parse("issue=3").unwrap();
        assert!(evaluate_lenient(&q, &mv, &BitSet::full(5)).is_empty());
    }

    fn naive(q: &DescriptiveName, mv: &ManyValuedContext, scope: &BitSet) -> BitSet {
        BitSet::from_indices(
            scope.universe(),
            scope.iter().filter(|&g| {
                q.terms().iter().all(|t| {
                    let a = mv.sort_position(&t.tag).unwrap();
                    t.holds(mv.value_at(g, a))
                })
            }),
        )
    }

    prop_compose! {
        fn random_context()(n in 1usize..64, seed in any::<u64>()) -> ManyValuedContext {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let objects: Vec<String> = (0..n).map(|i| format!("o{i}")).collect();
            let rows = (0..n).map(|_| vec![
                if rng.gen_bool(0.1) { AttributeValue::Missing } else { AttributeValue::text(["x", "y", "z"][rng.gen_range(0..3)]) },
                if rng.gen_bool(0.1) { AttributeValue::Missing } else { AttributeValue::Integer(rng.gen_range(0..6)) },
            ]).collect();
            ManyValuedContext::new(objects, vec!["t".into(), "n".into()], rows).unwrap()
        }
    }

    fn query_strategy() -> impl Strategy<Value = DescriptiveName> {
        let term = prop_oneof![
            prop::sample::select(vec!["t=x", "t=y", "t=z", "t=w", "t~/^[xy]$/"]),
            prop::sample::select(vec!["n=1", "n<3", "n<=3", "n>2", "n>=4", "n=9"]),
        ];
        proptest::collection::vec(term, 0..4).prop_map(|ts| {
            if ts.is_empty() {
                DescriptiveName::All
            } else {
                parse(&ts.join(" & ")).unwrap()
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn matches_naive_scan(mv in random_context(), q in query_strategy(), mask in any::<u64>()) {
            let n = mv.objects().len();
            let scope = BitSet::from_indices(n, (0..n).filter(|g| mask & (1 << (g % 64)) != 0));
            prop_assert_eq!(evaluate(&q, &mv, &scope).unwrap(), naive(&q, &mv, &scope));
        }

        #[test]
        fn restriction_is_monotone(mv in random_context(), q in query_strategy(), mask in any::<u64>()) {
            let n = mv.objects().len();
            let small = BitSet::from_indices(n, (0..n).filter(|g| mask & (1 << (g % 64)) != 0));
            let big = BitSet::full(n);
            prop_assert!(evaluate(&q, &mv, &small).unwrap().is_subset(&evaluate(&q, &mv, &big).unwrap()));
        }

        #[test]
        fn conjunction_is_intersection(mv in random_context(), q1 in query_strategy(), q2 in query_strategy()) {
            let all = BitSet::full(mv.objects().len());
            let both = evaluate(&q1.and(&q2), &mv, &all).unwrap();
            let split = evaluate(&q1, &mv, &all).unwrap().intersection(&evaluate(&q2, &mv, &all).unwrap());
            prop_assert_eq!(both, split);
        }
    }
}

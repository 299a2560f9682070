//! Burmeister `.cxt` files.
//!
//! ```text
//! B
//!
//! 5
//! 4
//!
//! plan1.ps
//! ...
//! project=plan1
//! ...
//! X.X.
//! ```

use crate::bitset::BitSet;
use crate::context::FormalContext;
use crate::error::{Error, Result};

pub fn export_cxt(ctx: &FormalContext) -> String {
    let mut out = format!("B\n\n{}\n{}\n\n", ctx.n_objects(), ctx.n_attributes());
    for g in ctx.objects() {
        out.push_str(g);
        out.push('\n');
    }
    for m in ctx.attributes() {
        out.push_str(m);
        out.push('\n');
    }
    for g in 0..ctx.n_objects() {
        for m in 0..ctx.n_attributes() {
            out.push(if ctx.has(g, m) { 'X' } else { '.' });
        }
        out.push('\n');
    }
    out
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

/// Read a `.cxt` file. The line after `B` may hold a context name, which is
/// ignored; `x` is accepted for `X` and CRLF line ends are tolerated.
pub fn import_cxt(text: &str) -> Result<FormalContext> {
    let lines: Vec<&str> = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l)).collect();
    let mut i = 0;
    let mut next = |what: &str| -> Result<(usize, &str)> {
        let line = lines
            .get(i)
            .copied()
            .ok_or_else(|| syntax(i + 1, format!("unexpected end of file, expected {what}")))?;
        i += 1;
        Ok((i, line))
    };
    let (n, first) = next("`B`")?;
    if first.trim() != "B" {
        return Err(syntax(n, format!("expected `B`, found {first:?}")));
    }
    let _name = next("a blank line")?;
    let count = |(n, line): (usize, &str), what: &str| -> Result<usize> {
        line.trim()
            .parse()
            .map_err(|_| syntax(n, format!("expected the number of {what}, found {line:?}")))
    };
    let n_objects = count(next("the object count")?, "objects")?;
    let n_attributes = count(next("the attribute count")?, "attributes")?;
    let (n, blank) = next("a blank line")?;
    if !blank.trim().is_empty() {
        return Err(syntax(n, format!("expected a blank line, found {blank:?}")));
    }
    let mut objects = Vec::with_capacity(n_objects);
    for _ in 0..n_objects {
        objects.push(next("an object name")?.1.to_string());
    }
    let mut attributes = Vec::with_capacity(n_attributes);
    for _ in 0..n_attributes {
        attributes.push(next("an attribute name")?.1.to_string());
    }
    let mut rows = Vec::with_capacity(n_objects);
    for _ in 0..n_objects {
        let (n, line) = next("an incidence row")?;
        let cells: Vec<char> = line.trim_end().chars().collect();
        if cells.len() != n_attributes {
            return Err(syntax(
                n,
                format!("row has {} cells, expected {n_attributes}", cells.len()),
            ));
        }
        let mut row = BitSet::new(n_attributes);
        for (m, c) in cells.into_iter().enumerate() {
            match c {
                'X' | 'x' => row.insert(m),
                '.' => {}
                other => return Err(syntax(n, format!("unexpected cell {other:?}"))),
            }
        }
        rows.push(row);
    }
    if let Some((extra, line)) = lines.iter().enumerate().skip(i).find(|(_, l)| !l.trim().is_empty()) {
        return Err(syntax(extra + 1, format!("trailing content {line:?}")));
    }
    FormalContext::from_rows(objects, attributes, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    #[test]
    fn document_table_bytes() {
        let text = export_cxt(&fixtures::documents_formal_context());
        assert_eq!(
            text,
            "B\n\n5\n4\n\nplan1.ps\nplan2.ps\nplan2.doc\nnotes1.txt\nnotes2.txt\n\
             project=plan1\nproject=plan2\nformat=postscript\nformat=text\n\
             X.X.\n.XX.\n.X..\n.X.X\n.X.X\n"
        );
        assert_eq!(import_cxt(&text).unwrap(), fixtures::documents_formal_context());
    }

    #[test]
    fn lenient_reading() {
        let ctx = import_cxt("B\nname\n1\n2\n\ng\na\nb\nx.\r\n").unwrap();
        assert_eq!(ctx.attribute_names(ctx.row(0)), vec!["a"]);
        let empty = import_cxt("B\n\n0\n0\n\n").unwrap();
        assert_eq!(empty.n_objects(), 0);
    }

    #[test]
    fn malformed_files() {
        assert!(matches!(import_cxt("A\n"), Err(Error::Syntax { line: 1, .. })));
        assert!(matches!(import_cxt("B\n\nfive\n"), Err(Error::Syntax { line: 3, .. })));
        assert!(matches!(
            import_cxt("B\n\n1\n2\n\ng\na\nb\nX\n"),
            Err(Error::Syntax { line: 9, .. })
        ));
        assert!(matches!(import_cxt("B\n\n1\n1\n\ng\na\n"), Err(Error::Syntax { .. })));
        assert!(matches!(import_cxt("B\n\n1\n1\n\ng\na\nX\nmore\n"), Err(Error::Syntax { line: 9, .. })));
        assert!(import_cxt("B\n\n2\n1\n\ng\ng\na\nX\n.\n").is_err());
    }

    proptest! {
        #[test]
        fn export_then_import(g in 0usize..8, m in 0usize..8, bits in proptest::collection::vec(any::<bool>(), 64)) {
            let table: Vec<Vec<bool>> = (0..g).map(|i| (0..m).map(|j| bits[i * 8 + j]).collect()).collect();
            let ctx = FormalContext::from_bools(&table, m);
            let text = export_cxt(&ctx);
            let back = import_cxt(&text).unwrap();
            prop_assert_eq!(&back, &ctx);
            prop_assert_eq!(export_cxt(&back), text);
        }
    }
}

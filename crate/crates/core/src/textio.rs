//! Text formats: barcodes, matchings, module morphisms, and stratified
//! diagrams as UTF-8 files, plus the number formatting used in reports.
//!
//! All parsers attach 1-based line numbers to their errors; all writers are
//! deterministic (entry order for barcodes and matrices, sorted order for
//! diagram elements and matching pairs), so equal values produce equal
//! bytes.

use std::collections::BTreeSet;

use crate::barcode::{Barcode, Index};
use crate::diagram::StratifiedDiagram;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::interval::Interval;
use crate::matching::Matching;
use crate::module::{ModuleMorphism, PersistenceModule};
use crate::scalar::{ExtReal, Scalar, Threshold};

/// Content lines of a text block: 1-based line number and trimmed text,
/// with blank and `#`-comment lines dropped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, line)| (k + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
}

fn parse_error(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Checks that an index token survives every file format: nonempty, no
/// whitespace, and no `->` (the matching-pair separator).
fn validate_index(line: usize, index: &str) -> Result<()> {
    if index.is_empty() {
        return Err(parse_error(line, "empty index"));
    }
    if index.chars().any(char::is_whitespace) {
        return Err(parse_error(
            line,
            format!("index `{index}` contains whitespace"),
        ));
    }
    if index.contains("->") {
        return Err(parse_error(line, format!("index `{index}` contains `->`")));
    }
    Ok(())
}

/// Parses one barcode entry line: `<index>: <interval>` or a bare interval,
/// which gets the auto-index `i<line-number>`.
fn parse_barcode_line<Q: Scalar>(line_no: usize, line: &str) -> Result<(Index, Interval<Q>)> {
    let (index, interval_text) = match line.split_once(':') {
        Some((index, rest)) => (index.trim().to_string(), rest.trim()),
        None => (format!("i{line_no}"), line),
    };
    validate_index(line_no, &index)?;
    let interval = interval_text
        .parse::<Interval<Q>>()
        .map_err(|e| e.at_line(line_no))?;
    Ok((index, interval))
}

/// Parses a barcode file: one entry per line, `#` comments and blank lines
/// ignored.
pub fn parse_barcode<Q: Scalar>(text: &str) -> Result<Barcode<Q>> {
    let mut entries = Vec::new();
    let mut seen: BTreeSet<Index> = BTreeSet::new();
    for (line_no, line) in content_lines(text) {
        let (index, interval) = parse_barcode_line(line_no, line)?;
        if !seen.insert(index.clone()) {
            return Err(parse_error(line_no, format!("duplicate index `{index}`")));
        }
        entries.push((index, interval));
    }
    Barcode::new(entries)
}

/// Writes a barcode file, one `<index>: <interval>` line per entry.
pub fn write_barcode<Q: Scalar>(c: &Barcode<Q>) -> String {
    let mut out = String::new();
    for (index, interval) in c.iter() {
        out.push_str(&format!("{index}: {interval}\n"));
    }
    out
}

/// The contents of a matching file: the two barcode file paths from the
/// header and the matched index pairs.  Resolving the paths is left to the
/// caller.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingFile {
    pub source: String,
    pub target: String,
    pub pairs: Vec<(Index, Index)>,
}

/// Parses a matching file: `source:` and `target:` header lines naming
/// barcode files, then one `<source-index> -> <target-index>` pair per line.
pub fn parse_matching_file(text: &str) -> Result<MatchingFile> {
    let mut lines = content_lines(text);
    let mut header = |key: &str| -> Result<String> {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| parse_error(1, format!("missing `{key}:` header")))?;
        match line.split_once(':') {
            Some((k, path)) if k.trim() == key && !path.trim().is_empty() => {
                Ok(path.trim().to_string())
            }
            _ => Err(parse_error(
                line_no,
                format!("expected `{key}: <barcode-file>`"),
            )),
        }
    };
    let source = header("source")?;
    let target = header("target")?;
    let mut pairs = Vec::new();
    for (line_no, line) in lines {
        let (x, y) = line
            .split_once("->")
            .ok_or_else(|| parse_error(line_no, "expected `<source> -> <target>`"))?;
        let (x, y) = (x.trim().to_string(), y.trim().to_string());
        validate_index(line_no, &x)?;
        validate_index(line_no, &y)?;
        pairs.push((x, y));
    }
    Ok(MatchingFile {
        source,
        target,
        pairs,
    })
}

/// Writes a matching file for the given pairs, in the order given.
pub fn write_matching_file<'a>(
    source: &str,
    target: &str,
    pairs: impl IntoIterator<Item = (&'a Index, &'a Index)>,
) -> String {
    let mut out = format!("source: {source}\ntarget: {target}\n");
    for (x, y) in pairs {
        out.push_str(&format!("{x} -> {y}\n"));
    }
    out
}

/// Parses a module-morphism file: an optional `field: <p>` header, then the
/// sections `[source]` and `[target]` (each a barcode block restricted to
/// `[a,b)` / `[a,inf)` bars) and `[matrix]` (lines
/// `<target-index> <source-index> <scalar>`), in that order.
///
/// `field_override` takes precedence over the file header; without either,
/// the field defaults to p = 2.
pub fn parse_module_morphism<Q: Scalar>(
    text: &str,
    field_override: Option<u64>,
) -> Result<ModuleMorphism<Q>> {
    #[derive(PartialEq)]
    enum Section {
        Header,
        Source,
        Target,
        Matrix,
    }
    let mut section = Section::Header;
    let mut field_header: Option<u64> = None;
    let mut source_entries: Vec<(Index, Interval<Q>)> = Vec::new();
    let mut target_entries: Vec<(Index, Interval<Q>)> = Vec::new();
    let mut matrix_entries: Vec<(Index, Index, u64)> = Vec::new();
    let mut seen: BTreeSet<Index> = BTreeSet::new();
    for (line_no, line) in content_lines(text) {
        match line {
            "[source]" if section == Section::Header => {
                section = Section::Source;
                continue;
            }
            "[target]" if section == Section::Source => {
                section = Section::Target;
                seen.clear();
                continue;
            }
            "[matrix]" if section == Section::Target => {
                section = Section::Matrix;
                continue;
            }
            _ if line.starts_with('[') && line.ends_with(']') => {
                return Err(parse_error(
                    line_no,
                    format!(
                        "unexpected section `{line}`; the order is [source], [target], [matrix]"
                    ),
                ));
            }
            _ => {}
        }
        match section {
            Section::Header => {
                let p = line
                    .strip_prefix("field:")
                    .ok_or_else(|| parse_error(line_no, "expected `field: <p>` or `[source]`"))?;
                if field_header.is_some() {
                    return Err(parse_error(line_no, "repeated `field:` header"));
                }
                field_header = Some(p.trim().parse::<u64>().map_err(|e| {
                    parse_error(
                        line_no,
                        format!("invalid field modulus `{}`: {e}", p.trim()),
                    )
                })?);
            }
            Section::Source | Section::Target => {
                let (index, interval) = parse_barcode_line(line_no, line)?;
                if !seen.insert(index.clone()) {
                    return Err(parse_error(line_no, format!("duplicate index `{index}`")));
                }
                let shape_ok = interval.lo().is_finite()
                    && interval.lo_closed()
                    && !interval.hi_closed()
                    && interval.hi() != &ExtReal::NegInf;
                if !shape_ok {
                    return Err(parse_error(
                        line_no,
                        format!("bar `{interval}` is not of the form [a,b) or [a,inf)"),
                    ));
                }
                if section == Section::Source {
                    source_entries.push((index, interval));
                } else {
                    target_entries.push((index, interval));
                }
            }
            Section::Matrix => {
                let fields: Vec<&str> = line.split_whitespace().collect();
                if fields.len() != 3 {
                    return Err(parse_error(
                        line_no,
                        "expected `<target-index> <source-index> <scalar>`",
                    ));
                }
                let scalar = fields[2].parse::<u64>().map_err(|e| {
                    parse_error(line_no, format!("invalid scalar `{}`: {e}", fields[2]))
                })?;
                matrix_entries.push((fields[0].to_string(), fields[1].to_string(), scalar));
            }
        }
    }
    if section != Section::Matrix {
        return Err(parse_error(
            text.lines().count().max(1),
            "missing section; a module-morphism file needs [source], [target], and [matrix]",
        ));
    }
    let p = field_override.or(field_header).unwrap_or(2);
    let field = PrimeField::new(p)?;
    let source = PersistenceModule::new(Barcode::new(source_entries)?)?;
    let target = PersistenceModule::new(Barcode::new(target_entries)?)?;
    ModuleMorphism::from_interval_matrix(source, target, field, &matrix_entries)
}

/// Writes a stratified diagram: the critical values, one line per stratum
/// (elements in sorted order), and one line per link (pairs in sorted
/// order).  Elements must be whitespace-free and must not contain `->`.
pub fn write_diagram<Q: Scalar>(d: &StratifiedDiagram<Q>) -> String {
    let mut out = String::from("criticals:");
    for v in d.critical_values() {
        out.push_str(&format!(" {v}"));
    }
    out.push('\n');
    for (k, stratum) in d.strata().iter().enumerate() {
        out.push_str(&format!("stratum {k}:"));
        for element in stratum {
            debug_assert!(
                !element.chars().any(char::is_whitespace) && !element.contains("->"),
                "diagram elements must be plain tokens"
            );
            out.push_str(&format!(" {element}"));
        }
        out.push('\n');
    }
    for (k, link) in d.links().iter().enumerate() {
        out.push_str(&format!("link {k}:"));
        for (x, y) in link.pairs() {
            out.push_str(&format!(" {x}->{y}"));
        }
        out.push('\n');
    }
    out
}

/// Parses the format written by [`write_diagram`]: a `criticals:` line,
/// then `stratum <k>:` lines in order, then `link <k>:` lines in order.
pub fn parse_diagram<Q: Scalar>(text: &str) -> Result<StratifiedDiagram<Q>> {
    let mut lines = content_lines(text).peekable();
    let (line_no, line) = lines
        .next()
        .ok_or_else(|| parse_error(1, "missing `criticals:` line"))?;
    let values = line
        .strip_prefix("criticals:")
        .ok_or_else(|| parse_error(line_no, "expected `criticals: <values>`"))?;
    let mut critical: Vec<Q> = Vec::new();
    for token in values.split_whitespace() {
        let v = crate::scalar::parse_scalar(token)
            .map_err(|e| parse_error(line_no, format!("invalid critical value: {e}")))?;
        critical.push(v);
    }
    let n_strata = 2 * critical.len() + 1;
    let mut strata: Vec<BTreeSet<String>> = Vec::with_capacity(n_strata);
    for k in 0..n_strata {
        let (line_no, line) = lines.next().ok_or_else(|| {
            parse_error(
                text.lines().count().max(1),
                format!("missing `stratum {k}:` line"),
            )
        })?;
        let elements = line
            .strip_prefix(&format!("stratum {k}:"))
            .ok_or_else(|| parse_error(line_no, format!("expected `stratum {k}: <elements>`")))?;
        let mut set = BTreeSet::new();
        for token in elements.split_whitespace() {
            validate_index(line_no, token)?;
            if !set.insert(token.to_string()) {
                return Err(parse_error(line_no, format!("duplicate element `{token}`")));
            }
        }
        strata.push(set);
    }
    let mut links: Vec<Matching> = Vec::with_capacity(n_strata - 1);
    for k in 0..n_strata - 1 {
        let (line_no, line) = lines.next().ok_or_else(|| {
            parse_error(
                text.lines().count().max(1),
                format!("missing `link {k}:` line"),
            )
        })?;
        let body = line
            .strip_prefix(&format!("link {k}:"))
            .ok_or_else(|| parse_error(line_no, format!("expected `link {k}: <pairs>`")))?;
        let mut pairs: Vec<(String, String)> = Vec::new();
        for token in body.split_whitespace() {
            let (x, y) = token
                .split_once("->")
                .ok_or_else(|| parse_error(line_no, format!("expected `x->y`, found `{token}`")))?;
            pairs.push((x.to_string(), y.to_string()));
        }
        let link = Matching::new(strata[k].clone(), strata[k + 1].clone(), pairs)
            .map_err(|e| e.at_line(line_no))?;
        links.push(link);
    }
    if let Some((line_no, line)) = lines.next() {
        return Err(parse_error(line_no, format!("unexpected line `{line}`")));
    }
    StratifiedDiagram::new(critical, strata, links)
}

/// A decimal approximation to six significant digits, for the `(~…)` part
/// of distance reports.
pub fn format_approx<Q: Scalar>(q: &Q) -> String {
    let x = q.to_f64().unwrap_or(f64::NAN);
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.00000".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..=8).contains(&magnitude) {
        format!("{x:.5e}")
    } else {
        let decimals = (5 - magnitude).max(0) as usize;
        format!("{x:.decimals$}")
    }
}

/// `<exact> (~<decimal>)` for finite values, `inf` otherwise.
pub fn format_value<Q: Scalar>(v: &ExtReal<Q>) -> String {
    match v {
        ExtReal::Finite(q) => format!("{q} (~{})", format_approx(q)),
        other => format!("{other}"),
    }
}

/// A triviality threshold as `<value> (attained)` / `<value> (approached)`
/// / `inf`.
pub fn format_threshold<Q: Scalar>(t: &Threshold<Q>) -> String {
    match &t.value {
        ExtReal::Finite(q) => format!(
            "{q} ({})",
            if t.attained { "attained" } else { "approached" }
        ),
        other => format!("{other}"),
    }
}

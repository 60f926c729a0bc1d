//! Text formats: the tensor file (header `p N`, one entry per line) and
//! plain coefficient-sequence files. Blank lines and `#` comments are
//! accepted on input and never produced on output.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::tensor::SymmetricTensor;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::TensorParse { line, message: message.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses the tensor text format: a header line `p N`, then one line per
/// stored entry holding `p` 1-based indices (any order) and a value token
/// (integer, `a/b`, or exact decimal). Duplicate sorted indices, indices
/// out of range, explicit zero values, and malformed tokens are
/// line-numbered errors.
pub fn parse_tensor(text: &str) -> Result<SymmetricTensor> {
    let mut lines = content_lines(text);
    let Some((header_line, header)) = lines.next() else {
        return Err(parse_err(0, "missing header line `p N`"));
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(parse_err(header_line, "header must be `order dimension`"));
    }
    let order: usize = fields[0]
        .parse()
        .map_err(|_| parse_err(header_line, format!("invalid order {:?}", fields[0])))?;
    let dimension: u32 = fields[1]
        .parse()
        .map_err(|_| parse_err(header_line, format!("invalid dimension {:?}", fields[1])))?;
    if order == 0 || dimension == 0 {
        return Err(parse_err(header_line, "order and dimension must be positive"));
    }

    let mut entries: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != order + 1 {
            return Err(parse_err(
                line_no,
                format!("expected {order} indices and a value, found {} fields", fields.len()),
            ));
        }
        let mut index = Vec::with_capacity(order);
        for f in &fields[..order] {
            let component: u32 =
                f.parse().map_err(|_| parse_err(line_no, format!("invalid index {f:?}")))?;
            if component == 0 || component > dimension {
                return Err(parse_err(
                    line_no,
                    format!("index {component} out of range 1..={dimension}"),
                ));
            }
            index.push(component);
        }
        index.sort_unstable();
        let value = parse_rational(fields[order])
            .map_err(|_| parse_err(line_no, format!("invalid value {:?}", fields[order])))?;
        if value.is_zero() {
            return Err(parse_err(line_no, "explicit zero entries are not allowed"));
        }
        if entries.insert(index.clone(), value).is_some() {
            return Err(parse_err(line_no, format!("duplicate entry for sorted index {index:?}")));
        }
    }
    SymmetricTensor::from_entries(order, dimension, entries)
}

/// Canonical text form: header, then entries with sorted indices in
/// lexicographic order. `parse_tensor(write_tensor(T)) == T`.
pub fn write_tensor(t: &SymmetricTensor) -> String {
    let mut out = format!("{} {}\n", t.order(), t.dimension());
    for (index, value) in t.entries() {
        for i in index {
            out.push_str(&i.to_string());
            out.push(' ');
        }
        out.push_str(&format_rational(value));
        out.push('\n');
    }
    out
}

/// Parses a coefficient-sequence file: one rational per content line,
/// `alpha_0` first.
pub fn parse_sequence(text: &str) -> Result<Vec<Rational>> {
    let mut values = Vec::new();
    for (line_no, line) in content_lines(text) {
        let value = parse_rational(line)
            .map_err(|_| parse_err(line_no, format!("invalid rational {line:?}")))?;
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(values)
}

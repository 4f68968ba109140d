//! Tensor text format.
//!
//! Line 1 is `m n`; each following non-empty line is one nonzero,
//! `i1 i2 ... im value`, with 1-based whitespace-separated indices and a
//! decimal floating-point value. Unlisted entries are zero and duplicate index
//! tuples are a format error.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::tensor::{DenseTensor, TensorError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("empty input")]
    Empty,
    #[error("line {line}: expected `{expected}`, got `{content}`")]
    Malformed {
        line: usize,
        expected: &'static str,
        content: String,
    },
    #[error("line {line}: {source}")]
    Tensor {
        line: usize,
        #[source]
        source: TensorError,
    },
}

/// Parse a tensor from the text format.
pub fn parse_tensor(text: &str) -> Result<DenseTensor, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines.next().ok_or(FormatError::Empty)?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let malformed_header = || FormatError::Malformed {
        line: header_line,
        expected: "m n",
        content: header.to_string(),
    };
    if dims.len() != 2 {
        return Err(malformed_header());
    }
    let order: usize = dims[0].parse().map_err(|_| malformed_header())?;
    let dim: usize = dims[1].parse().map_err(|_| malformed_header())?;

    let mut nonzeros: Vec<(Vec<usize>, f64)> = Vec::new();
    let mut last_line = header_line;
    for (line, content) in lines {
        last_line = line;
        let fields: Vec<&str> = content.split_whitespace().collect();
        let malformed = || FormatError::Malformed {
            line,
            expected: "i1 i2 ... im value",
            content: content.to_string(),
        };
        if fields.len() != order + 1 {
            return Err(malformed());
        }
        let mut index = Vec::with_capacity(order);
        for field in &fields[..order] {
            index.push(field.parse::<usize>().map_err(|_| malformed())?);
        }
        let value: f64 = fields[order].parse().map_err(|_| malformed())?;
        nonzeros.push((index, value));
    }

    DenseTensor::from_nonzeros(order, dim, &nonzeros).map_err(|source| FormatError::Tensor {
        line: last_line,
        source,
    })
}

/// Render a tensor in the text format, one line per nonzero in flat order.
pub fn format_tensor(tensor: &DenseTensor) -> String {
    let mut out = format!("{} {}\n", tensor.order(), tensor.dim());
    let n = tensor.dim();
    let len = tensor.entries().len();
    let mut digits = vec![1usize; tensor.order()];
    for flat in 0..len {
        let value = tensor.entries()[flat];
        if value != 0.0 {
            let mut rest = flat;
            for k in (0..tensor.order()).rev() {
                digits[k] = rest % n + 1;
                rest /= n;
            }
            for d in &digits {
                out.push_str(&d.to_string());
                out.push(' ');
            }
            // shortest round-trip decimal
            out.push_str(&format!("{value:?}"));
            out.push('\n');
        }
    }
    out
}

pub fn read_tensor_file(path: &Path) -> Result<DenseTensor, FormatError> {
    parse_tensor(&fs::read_to_string(path)?)
}

pub fn write_tensor_file(path: &Path, tensor: &DenseTensor) -> Result<(), FormatError> {
    fs::write(path, format_tensor(tensor))?;
    Ok(())
}

//! Dense Matrix Market I/O.
//!
//! Reads `array` and `coordinate` files with `real` or `integer` fields and
//! `general`, `symmetric` or `skew-symmetric` symmetry. Writes `array real
//! general`, with every value in shortest round-trip form.

use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use dsaddle_core::DMatrix;

#[derive(Debug, thiserror::Error)]
pub enum MmError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Array,
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

impl Symmetry {
    fn mirror(self, v: f64) -> Option<f64> {
        match self {
            Symmetry::General => None,
            Symmetry::Symmetric => Some(v),
            Symmetry::SkewSymmetric => Some(-v),
        }
    }
}

struct Lines<R> {
    inner: io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, MmError> {
        Err(MmError::Parse {
            line: self.line,
            msg: msg.into(),
        })
    }

    fn raw(&mut self) -> Result<Option<String>, MmError> {
        match self.inner.next() {
            Some(l) => {
                self.line += 1;
                Ok(Some(l?))
            }
            None => Ok(None),
        }
    }

    /// Next line that is neither blank nor a comment.
    fn data(&mut self) -> Result<Option<String>, MmError> {
        while let Some(l) = self.raw()? {
            let t = l.trim();
            if !t.is_empty() && !t.starts_with('%') {
                return Ok(Some(t.to_owned()));
            }
        }
        Ok(None)
    }

    fn expect_data(&mut self, what: &str) -> Result<String, MmError> {
        match self.data()? {
            Some(l) => Ok(l),
            None => self.err(format!("unexpected end of file, expected {what}")),
        }
    }

    fn numbers<T: std::str::FromStr>(
        &self,
        line: &str,
        count: usize,
        what: &str,
    ) -> Result<Vec<T>, MmError> {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != count {
            return self.err(format!(
                "expected {count} fields for {what}, found {}",
                parts.len()
            ));
        }
        parts
            .iter()
            .map(|p| {
                p.parse()
                    .or_else(|_| self.err(format!("cannot parse {p:?} in {what}")))
            })
            .collect()
    }
}

fn parse_header<R: BufRead>(lines: &mut Lines<R>) -> Result<(Format, Symmetry), MmError> {
    let Some(header) = lines.raw()? else {
        return lines.err("empty file");
    };
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return lines.err("header must read `%%MatrixMarket matrix <format> <field> <symmetry>`");
    }
    let format = match tokens[2].as_str() {
        "array" => Format::Array,
        "coordinate" => Format::Coordinate,
        other => return lines.err(format!("unsupported format {other:?}")),
    };
    if !matches!(tokens[3].as_str(), "real" | "integer" | "double") {
        return lines.err(format!(
            "unsupported field {:?}; only real and integer are read",
            tokens[3]
        ));
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return lines.err(format!("unsupported symmetry {other:?}")),
    };
    Ok((format, symmetry))
}

fn parse_value<R: BufRead>(lines: &Lines<R>, s: &str) -> Result<f64, MmError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => lines.err(format!("non-finite value {s:?}")),
        Err(_) => lines.err(format!("cannot parse value {s:?}")),
    }
}

pub fn read<R: BufRead>(reader: R) -> Result<DMatrix<f64>, MmError> {
    let mut lines = Lines {
        inner: reader.lines(),
        line: 0,
    };
    let (format, symmetry) = parse_header(&mut lines)?;
    let size = lines.expect_data("the size line")?;
    let m = match format {
        Format::Array => {
            let dims: Vec<usize> = lines.numbers(&size, 2, "the size line")?;
            read_array(&mut lines, dims[0], dims[1], symmetry)?
        }
        Format::Coordinate => {
            let dims: Vec<usize> = lines.numbers(&size, 3, "the size line")?;
            read_coordinate(&mut lines, dims[0], dims[1], dims[2], symmetry)?
        }
    };
    if let Some(extra) = lines.data()? {
        return lines.err(format!("trailing data {extra:?}"));
    }
    Ok(m)
}

fn read_array<R: BufRead>(
    lines: &mut Lines<R>,
    rows: usize,
    cols: usize,
    symmetry: Symmetry,
) -> Result<DMatrix<f64>, MmError> {
    if symmetry != Symmetry::General && rows != cols {
        return lines.err(format!("{rows}×{cols} matrix cannot be symmetric"));
    }
    let mut m = DMatrix::zeros(rows, cols);
    // Column-major; symmetric files list the lower triangle, skew-symmetric
    // files the strict lower triangle.
    let positions: Vec<(usize, usize)> = match symmetry {
        Symmetry::General => (0..cols)
            .flat_map(|j| (0..rows).map(move |i| (i, j)))
            .collect(),
        Symmetry::Symmetric => (0..cols)
            .flat_map(|j| (j..rows).map(move |i| (i, j)))
            .collect(),
        Symmetry::SkewSymmetric => (0..cols)
            .flat_map(|j| (j + 1..rows).map(move |i| (i, j)))
            .collect(),
    };
    for (i, j) in positions {
        let line = lines.expect_data("a value")?;
        let v = parse_value(lines, &line)?;
        m[(i, j)] = v;
        if i != j {
            if let Some(mv) = symmetry.mirror(v) {
                m[(j, i)] = mv;
            }
        }
    }
    Ok(m)
}

fn read_coordinate<R: BufRead>(
    lines: &mut Lines<R>,
    rows: usize,
    cols: usize,
    nnz: usize,
    symmetry: Symmetry,
) -> Result<DMatrix<f64>, MmError> {
    if symmetry != Symmetry::General && rows != cols {
        return lines.err(format!("{rows}×{cols} matrix cannot be symmetric"));
    }
    let mut m = DMatrix::zeros(rows, cols);
    for _ in 0..nnz {
        let line = lines.expect_data("an entry")?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return lines.err(format!(
                "expected `row col value`, found {} fields",
                parts.len()
            ));
        }
        let index = |s: &str, bound: usize| -> Result<usize, MmError> {
            match s.parse::<usize>() {
                Ok(k) if (1..=bound).contains(&k) => Ok(k - 1),
                _ => lines.err(format!("index {s:?} outside 1..={bound}")),
            }
        };
        let (i, j) = (index(parts[0], rows)?, index(parts[1], cols)?);
        let v = parse_value(lines, parts[2])?;
        if symmetry != Symmetry::General && i < j {
            return lines.err("symmetric files list only the lower triangle");
        }
        if symmetry == Symmetry::SkewSymmetric && i == j {
            return lines.err("skew-symmetric files have no diagonal entries");
        }
        m[(i, j)] += v;
        if i != j {
            if let Some(mv) = symmetry.mirror(v) {
                m[(j, i)] += mv;
            }
        }
    }
    Ok(m)
}

pub fn read_path(path: &Path) -> Result<DMatrix<f64>, MmError> {
    read(BufReader::new(fs::File::open(path)?))
}

pub fn write<W: Write>(mut w: W, m: &DMatrix<f64>) -> io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} {}", m.nrows(), m.ncols())?;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            writeln!(w, "{:e}", m[(i, j)] + 0.0)?;
        }
    }
    w.flush()
}

pub fn write_path(path: &Path, m: &DMatrix<f64>) -> io::Result<()> {
    write(io::BufWriter::new(fs::File::create(path)?), m)
}

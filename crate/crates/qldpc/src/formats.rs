//! Matrix file formats: alist, dense text and a JSON bundle with metadata.
//!
//! All three are UTF-8 and line-feed terminated. Only the JSON bundle keeps
//! metadata; the other two import with metadata derived from the shape.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use qldpc_core::{BitMatrix, BitVector};
use serde::{Deserialize, Serialize};

pub const GENERATOR_VERSION: &str = concat!("qldpc ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Alist,
    DenseText,
    JsonBundle,
}

impl Format {
    /// `.alist`, `.json`, anything else is dense text.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("alist") => Format::Alist,
            Some("json") => Format::JsonBundle,
            _ => Format::DenseText,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Alist => "alist",
            Format::DenseText => "txt",
            Format::JsonBundle => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Format as clap::ValueEnum>::from_str(s, true)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub n: usize,
    pub r: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub generator_version: String,
    /// What the matrix is, e.g. `dual-containing`, `css-h1`, `stabilizer-x`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_step_isd_calls: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_step_span_rejections: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixBundle {
    pub matrix: BitMatrix,
    pub metadata: Metadata,
}

impl MatrixBundle {
    /// Bundle with metadata taken from the shape only.
    pub fn bare(matrix: BitMatrix) -> Self {
        let metadata = Metadata {
            n: matrix.cols(),
            r: matrix.rows(),
            generator_version: GENERATOR_VERSION.to_string(),
            ..Metadata::default()
        };
        Self { matrix, metadata }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    /// 1-based; 0 when the problem is the end of input.
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }

    fn missing(line: usize, section: &str) -> Self {
        Self::at(line, 1, format!("unexpected end of input: missing {section}"))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: ParseError,
    },
}

pub fn export(bundle: &MatrixBundle, format: Format) -> String {
    match format {
        Format::Alist => to_alist(&bundle.matrix),
        Format::DenseText => to_dense_text(&bundle.matrix),
        Format::JsonBundle => to_json_bundle(bundle),
    }
}

pub fn import(text: &str, format: Format) -> Result<MatrixBundle, ParseError> {
    match format {
        Format::Alist => from_alist(text).map(MatrixBundle::bare),
        Format::DenseText => from_dense_text(text).map(MatrixBundle::bare),
        Format::JsonBundle => from_json_bundle(text),
    }
}

pub fn write_file(path: &Path, bundle: &MatrixBundle, format: Format) -> Result<(), FormatError> {
    std::fs::write(path, export(bundle, format)).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a matrix file; the format comes from the extension.
pub fn read_file(path: &Path) -> Result<MatrixBundle, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    import(&text, Format::from_path(path)).map_err(|source| FormatError::Parse {
        path: path.display().to_string(),
        source,
    })
}

/// One `'0'`/`'1'` line per row.
pub fn to_dense_text(m: &BitMatrix) -> String {
    let mut out = String::with_capacity(m.rows() * (m.cols() + 1));
    for row in m.iter_rows() {
        writeln!(out, "{row}").expect("writing to a String");
    }
    out
}

/// Parses dense text. Blank lines are skipped; an input without rows is a
/// `0 × 0` matrix.
pub fn from_dense_text(text: &str) -> Result<BitMatrix, ParseError> {
    let mut rows = Vec::new();
    let mut width = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut bits = Vec::with_capacity(line.len());
        for (j, ch) in line.chars().enumerate() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => return Err(ParseError::at(i + 1, j + 1, format!("expected '0' or '1', found {other:?}"))),
            }
        }
        match width {
            None => width = Some(bits.len()),
            Some(w) if w != bits.len() => {
                return Err(ParseError::at(
                    i + 1,
                    bits.len().min(w) + 1,
                    format!("row has {} entries, expected {w}", bits.len()),
                ))
            }
            _ => {}
        }
        rows.push(BitVector::from_bools(&bits));
    }
    Ok(BitMatrix::from_rows(width.unwrap_or(0), &rows).expect("rows share one width"))
}

fn join(values: impl IntoIterator<Item = usize>) -> String {
    values.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// alist: `n m`, max column and row degrees, the column degrees, the row
/// degrees, then per column and per row the 1-based neighbour indices padded
/// with zeros to the maximum degree.
pub fn to_alist(m: &BitMatrix) -> String {
    let t = m.transpose();
    let col_lists: Vec<Vec<usize>> = t.iter_rows().map(|c| c.support()).collect();
    let row_lists: Vec<Vec<usize>> = m.iter_rows().map(|r| r.support()).collect();
    let max_col = col_lists.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = row_lists.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::new();
    writeln!(out, "{} {}", m.cols(), m.rows()).unwrap();
    writeln!(out, "{max_col} {max_row}").unwrap();
    writeln!(out, "{}", join(col_lists.iter().map(Vec::len))).unwrap();
    writeln!(out, "{}", join(row_lists.iter().map(Vec::len))).unwrap();
    for (lists, width) in [(&col_lists, max_col), (&row_lists, max_row)] {
        for list in lists {
            let padded = list.iter().map(|&x| x + 1).chain(std::iter::repeat(0)).take(width);
            writeln!(out, "{}", join(padded)).unwrap();
        }
    }
    out
}

/// Line cursor that reports 1-based positions.
struct Lines<'a> {
    lines: Vec<&'a str>,
    next: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().map(|l| l.trim_end_matches('\r')).collect(),
            next: 0,
        }
    }

    fn take(&mut self, section: &str) -> Result<(usize, &'a str), ParseError> {
        let line = self
            .lines
            .get(self.next)
            .ok_or_else(|| ParseError::missing(self.next + 1, section))?;
        self.next += 1;
        Ok((self.next, line))
    }

    fn numbers(&mut self, section: &str) -> Result<(usize, Vec<(usize, usize)>), ParseError> {
        let (no, line) = self.take(section)?;
        Ok((no, tokens(no, line)?))
    }
}

/// Unsigned integers of a line with their 1-based starting columns.
fn tokens(line_no: usize, line: &str) -> Result<Vec<(usize, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut start = None;
    for (j, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                let tok = &line[s..j];
                let value = tok
                    .parse()
                    .map_err(|_| ParseError::at(line_no, s + 1, format!("expected a non-negative integer, found {tok:?}")))?;
                out.push((value, s + 1));
            }
        } else if start.is_none() {
            start = Some(j);
        }
    }
    Ok(out)
}

fn expect_count(line_no: usize, found: &[(usize, usize)], want: usize, section: &str) -> Result<(), ParseError> {
    if found.len() != want {
        let column = found.get(want).map_or(1, |t| t.1);
        return Err(ParseError::at(
            line_no,
            column,
            format!("{section}: expected {want} values, found {}", found.len()),
        ));
    }
    Ok(())
}

fn read_lists(
    lines: &mut Lines<'_>,
    count: usize,
    degrees: &[usize],
    bound: usize,
    section: &str,
) -> Result<Vec<Vec<usize>>, ParseError> {
    let mut lists = Vec::with_capacity(count);
    for &degree in degrees.iter().take(count) {
        let (no, toks) = lines.numbers(section)?;
        let mut list = Vec::with_capacity(degree);
        let mut padding = false;
        for &(value, column) in &toks {
            if value == 0 {
                padding = true;
                continue;
            }
            if padding {
                return Err(ParseError::at(no, column, "index after zero padding"));
            }
            if value > bound {
                return Err(ParseError::at(no, column, format!("index {value} exceeds {bound}")));
            }
            list.push(value - 1);
        }
        if list.len() != degree {
            return Err(ParseError::at(
                no,
                1,
                format!("{section}: expected {degree} indices, found {}", list.len()),
            ));
        }
        lists.push(list);
    }
    Ok(lists)
}

pub fn from_alist(text: &str) -> Result<BitMatrix, ParseError> {
    let mut lines = Lines::new(text);
    let (no, dims) = lines.numbers("header `n m`")?;
    expect_count(no, &dims, 2, "header")?;
    let (n, m) = (dims[0].0, dims[1].0);
    let (no, max) = lines.numbers("maximum degrees")?;
    expect_count(no, &max, 2, "maximum degrees")?;
    let (no, col_deg) = lines.numbers("column degrees")?;
    expect_count(no, &col_deg, n, "column degrees")?;
    let (no, row_deg) = lines.numbers("row degrees")?;
    expect_count(no, &row_deg, m, "row degrees")?;
    let col_deg: Vec<usize> = col_deg.iter().map(|t| t.0).collect();
    let row_deg: Vec<usize> = row_deg.iter().map(|t| t.0).collect();
    for (degrees, declared, line, what) in [(&col_deg, max[0].0, 2, "column"), (&row_deg, max[1].0, 2, "row")] {
        if degrees.iter().any(|&d| d > declared) {
            return Err(ParseError::at(line, 1, format!("a {what} degree exceeds the declared maximum")));
        }
    }
    let cols = read_lists(&mut lines, n, &col_deg, m, "column lists")?;
    let rows = read_lists(&mut lines, m, &row_deg, n, "row lists")?;

    let mut h = BitMatrix::zeros(m, n);
    for (i, list) in rows.iter().enumerate() {
        for &j in list {
            h.set(i, j, true);
        }
    }
    let mut from_cols = BitMatrix::zeros(m, n);
    for (j, list) in cols.iter().enumerate() {
        for &i in list {
            from_cols.set(i, j, true);
        }
    }
    if h != from_cols {
        return Err(ParseError::at(lines.next, 1, "row lists disagree with column lists"));
    }
    Ok(h)
}

#[derive(Serialize, Deserialize)]
struct BundleFile {
    rows: usize,
    cols: usize,
    /// Dense-text rows.
    matrix: Vec<String>,
    metadata: Metadata,
}

pub fn to_json_bundle(bundle: &MatrixBundle) -> String {
    let file = BundleFile {
        rows: bundle.matrix.rows(),
        cols: bundle.matrix.cols(),
        matrix: bundle.matrix.iter_rows().map(|r| r.to_string()).collect(),
        metadata: bundle.metadata.clone(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("bundle serializes");
    s.push('\n');
    s
}

pub fn from_json_bundle(text: &str) -> Result<MatrixBundle, ParseError> {
    let file: BundleFile =
        serde_json::from_str(text).map_err(|e| ParseError::at(e.line(), e.column(), e.to_string()))?;
    if file.matrix.len() != file.rows {
        return Err(ParseError::at(0, 0, format!("matrix has {} rows, expected {}", file.matrix.len(), file.rows)));
    }
    let mut rows = Vec::with_capacity(file.rows);
    for (i, s) in file.matrix.iter().enumerate() {
        let v: BitVector = s
            .parse()
            .map_err(|_| ParseError::at(0, 0, format!("matrix row {} is not a 0/1 string", i + 1)))?;
        if v.len() != file.cols {
            return Err(ParseError::at(0, 0, format!("matrix row {} has length {}, expected {}", i + 1, v.len(), file.cols)));
        }
        rows.push(v);
    }
    Ok(MatrixBundle {
        matrix: BitMatrix::from_rows(file.cols, &rows).expect("lengths checked"),
        metadata: file.metadata,
    })
}

//! Matrix files: MatrixMarket array and coordinate formats (real, integer
//! or pattern fields; general or symmetric) and headerless CSV.
//!
//! Writers print every entry with `{:e}`, the shortest representation that
//! parses back to the same `f64`, so a write/read cycle is bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LarosError, Result};
use crate::matrix::DenseMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixFormat {
    MatrixmarketArray,
    MatrixmarketCoordinate,
    Csv,
}

impl FromStr for MatrixFormat {
    type Err = LarosError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "matrixmarket-array" | "mm-array" | "array" => Ok(MatrixFormat::MatrixmarketArray),
            "matrixmarket-coordinate" | "mm-coordinate" | "coordinate" => Ok(MatrixFormat::MatrixmarketCoordinate),
            "csv" => Ok(MatrixFormat::Csv),
            other => Err(LarosError::param("format", format!("unknown matrix format `{other}`"))),
        }
    }
}

impl std::fmt::Display for MatrixFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MatrixFormat::MatrixmarketArray => "matrixmarket-array",
            MatrixFormat::MatrixmarketCoordinate => "matrixmarket-coordinate",
            MatrixFormat::Csv => "csv",
        })
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> LarosError {
    LarosError::Parse {
        line,
        message: message.into(),
    }
}

fn number(tok: &str, line: usize) -> Result<f64> {
    let x: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("`{tok}` is not a number")))?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("non-finite value `{tok}`")));
    }
    Ok(x)
}

fn index(tok: &str, bound: usize, line: usize) -> Result<usize> {
    let i: usize = tok
        .parse()
        .map_err(|_| parse_err(line, format!("`{tok}` is not a positive index")))?;
    if i == 0 || i > bound {
        return Err(parse_err(line, format!("index {i} outside 1..={bound}")));
    }
    Ok(i - 1)
}

/// Guesses the format from the first nonblank line.
pub fn detect_format(text: &str) -> MatrixFormat {
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let lower = first.to_ascii_lowercase();
    if lower.starts_with("%%matrixmarket") {
        if lower.split_whitespace().any(|t| t == "coordinate") {
            MatrixFormat::MatrixmarketCoordinate
        } else {
            MatrixFormat::MatrixmarketArray
        }
    } else {
        MatrixFormat::Csv
    }
}

struct Header {
    coordinate: bool,
    pattern: bool,
    symmetric: bool,
}

fn parse_header(line: &str, lineno: usize) -> Result<Header> {
    let toks: Vec<String> = line.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" {
        return Err(parse_err(lineno, "expected `%%MatrixMarket matrix <format> <field> <symmetry>`"));
    }
    let coordinate = match toks[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(parse_err(lineno, format!("unsupported storage `{other}`"))),
    };
    let pattern = match toks[3].as_str() {
        "real" | "double" | "integer" => false,
        "pattern" if coordinate => true,
        other => return Err(parse_err(lineno, format!("unsupported field `{other}`"))),
    };
    let symmetric = match toks[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(parse_err(lineno, format!("unsupported symmetry `{other}`"))),
    };
    Ok(Header {
        coordinate,
        pattern,
        symmetric,
    })
}

fn parse_matrix_market(text: &str, want: MatrixFormat) -> Result<DenseMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hline, htext) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let header = parse_header(htext, hline)?;
    let expect_coord = want == MatrixFormat::MatrixmarketCoordinate;
    if header.coordinate != expect_coord {
        return Err(parse_err(hline, format!("header does not match requested format {want}")));
    }
    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (sline, size) = body.next().ok_or_else(|| parse_err(hline, "missing size line"))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    let want_len = if header.coordinate { 3 } else { 2 };
    if dims.len() != want_len {
        return Err(parse_err(sline, format!("size line needs {want_len} integers")));
    }
    let parse_dim = |t: &str| -> Result<usize> {
        t.parse::<usize>()
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| parse_err(sline, format!("`{t}` is not a positive dimension")))
    };
    let rows = parse_dim(dims[0])?;
    let cols = parse_dim(dims[1])?;
    if header.symmetric && rows != cols {
        return Err(parse_err(sline, "symmetric matrix must be square"));
    }
    let mut data = nalgebra::DMatrix::<f64>::zeros(rows, cols);
    let mut last_line = sline;

    if header.coordinate {
        let nnz: usize = dims[2]
            .parse()
            .map_err(|_| parse_err(sline, format!("`{}` is not an entry count", dims[2])))?;
        let mut seen = 0;
        for (ln, l) in body {
            last_line = ln;
            let toks: Vec<&str> = l.split_whitespace().collect();
            let need = if header.pattern { 2 } else { 3 };
            if toks.len() != need {
                return Err(parse_err(ln, format!("expected {need} fields, found {}", toks.len())));
            }
            let i = index(toks[0], rows, ln)?;
            let j = index(toks[1], cols, ln)?;
            let x = if header.pattern { 1.0 } else { number(toks[2], ln)? };
            seen += 1;
            if seen > nnz {
                return Err(parse_err(ln, format!("more than the declared {nnz} entries")));
            }
            data[(i, j)] = x;
            if header.symmetric {
                data[(j, i)] = x;
            }
        }
        if seen != nnz {
            return Err(parse_err(last_line, format!("declared {nnz} entries, found {seen}")));
        }
    } else {
        // column-major; symmetric files list the lower triangle only
        let slots: Vec<(usize, usize)> = if header.symmetric {
            (0..cols).flat_map(|j| (j..rows).map(move |i| (i, j))).collect()
        } else {
            (0..cols).flat_map(|j| (0..rows).map(move |i| (i, j))).collect()
        };
        let mut k = 0;
        for (ln, l) in body {
            last_line = ln;
            for tok in l.split_whitespace() {
                if k == slots.len() {
                    return Err(parse_err(ln, format!("more than the expected {} values", slots.len())));
                }
                let (i, j) = slots[k];
                let x = number(tok, ln)?;
                data[(i, j)] = x;
                if header.symmetric {
                    data[(j, i)] = x;
                }
                k += 1;
            }
        }
        if k != slots.len() {
            return Err(parse_err(last_line, format!("expected {} values, found {k}", slots.len())));
        }
    }
    DenseMatrix::from_nalgebra(data)
}

fn parse_csv(text: &str) -> Result<DenseMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (ln, l) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        if l.trim().is_empty() {
            continue;
        }
        let row = l.split(',').map(|t| number(t.trim(), ln)).collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_err(ln, format!("expected {} columns, found {}", first.len(), row.len())));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(1, "no rows"));
    }
    DenseMatrix::from_rows(&rows)
}

/// Parses `text` in the given format, or the detected one when `None`.
pub fn parse_matrix(text: &str, format: Option<MatrixFormat>) -> Result<DenseMatrix> {
    match format.unwrap_or_else(|| detect_format(text)) {
        MatrixFormat::Csv => parse_csv(text),
        f => parse_matrix_market(text, f),
    }
}

pub fn read_matrix(path: impl AsRef<Path>, format: Option<MatrixFormat>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| LarosError::Io(format!("{}: {e}", path.display())))?;
    parse_matrix(&text, format)
}

/// Renders `a`; coordinate output lists nonzero entries only.
pub fn format_matrix(a: &DenseMatrix, format: MatrixFormat) -> String {
    let (m, n) = a.shape();
    let mut s = String::new();
    match format {
        MatrixFormat::MatrixmarketArray => {
            s.push_str("%%MatrixMarket matrix array real general\n");
            let _ = writeln!(s, "{m} {n}");
            for j in 0..n {
                for i in 0..m {
                    let _ = writeln!(s, "{:e}", a.get(i, j));
                }
            }
        }
        MatrixFormat::MatrixmarketCoordinate => {
            s.push_str("%%MatrixMarket matrix coordinate real general\n");
            let nnz = a.as_slice().iter().filter(|&&x| x != 0.0).count();
            let _ = writeln!(s, "{m} {n} {nnz}");
            for j in 0..n {
                for i in 0..m {
                    let x = a.get(i, j);
                    if x != 0.0 {
                        let _ = writeln!(s, "{} {} {:e}", i + 1, j + 1, x);
                    }
                }
            }
        }
        MatrixFormat::Csv => {
            for i in 0..m {
                let row: Vec<String> = (0..n).map(|j| format!("{:e}", a.get(i, j))).collect();
                s.push_str(&row.join(","));
                s.push('\n');
            }
        }
    }
    s
}

pub fn write_matrix(path: impl AsRef<Path>, a: &DenseMatrix, format: MatrixFormat) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_matrix(a, format)).map_err(|e| LarosError::Io(format!("{}: {e}", path.display())))
}

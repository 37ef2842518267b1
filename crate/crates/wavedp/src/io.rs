//! File formats: numeric CSV, key=value metadata sidecars, and PGM images.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use std::fs;
use std::io::Write;
use std::path::Path;

/// Rectangular numeric table with column names.
#[derive(Debug, Clone)]
pub struct TabularDataset {
    pub column_names: Vec<String>,
    pub matrix: Matrix,
}

/// Shortest decimal representation that parses back to the same f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn parse_cell(field: &str, row: usize, col: usize) -> Result<f64> {
    let trimmed = field.trim();
    match trimmed.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::NonNumericCell {
            row,
            col,
            value: trimmed.to_string(),
        }),
    }
}

/// Load a comma-separated numeric table. A header row is assumed when any
/// field of the first line fails to parse as a number; otherwise columns are
/// named c1, c2, ...
pub fn load_csv(path: &Path) -> Result<TabularDataset> {
    let text = fs::read_to_string(path)?;
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.is_empty() {
        return Err(Error::ParseError {
            row: 0,
            col: 0,
            msg: "file contains no data".into(),
        });
    }
    let first_fields: Vec<&str> = lines[0].split(',').collect();
    let has_header = first_fields
        .iter()
        .any(|f| f.trim().parse::<f64>().is_err());
    let (column_names, data_lines): (Vec<String>, &[&str]) = if has_header {
        (
            first_fields.iter().map(|f| f.trim().to_string()).collect(),
            &lines[1..],
        )
    } else {
        (
            (1..=first_fields.len()).map(|j| format!("c{j}")).collect(),
            &lines[..],
        )
    };
    let cols = column_names.len();
    if data_lines.is_empty() {
        return Err(Error::ParseError {
            row: 1,
            col: 0,
            msg: "header without data rows".into(),
        });
    }
    let mut rows = Vec::with_capacity(data_lines.len());
    for (i, line) in data_lines.iter().enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols {
            return Err(Error::RaggedRows {
                row: i,
                expected: cols,
                found: fields.len(),
            });
        }
        let mut row = Vec::with_capacity(cols);
        for (j, f) in fields.iter().enumerate() {
            row.push(parse_cell(f, i, j)?);
        }
        rows.push(row);
    }
    Ok(TabularDataset {
        column_names,
        matrix: Matrix::from_rows(&rows)?,
    })
}

pub fn write_csv(dataset: &TabularDataset, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&dataset.column_names.join(","));
    out.push('\n');
    for i in 0..dataset.matrix.rows() {
        let line: Vec<String> = dataset.matrix.row(i).iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Flat key=value sidecar, one pair per line, keys in the given order.
pub fn write_metadata(pairs: &[(String, String)], path: &Path) -> Result<()> {
    let mut f = fs::File::create(path)?;
    for (k, v) in pairs {
        writeln!(f, "{k}={v}")?;
    }
    Ok(())
}

pub fn read_metadata(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path)?;
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => pairs.push((k.to_string(), v.to_string())),
            None => {
                return Err(Error::ParseError {
                    row: i,
                    col: 0,
                    msg: "metadata line without '='".into(),
                })
            }
        }
    }
    Ok(pairs)
}

/// Grayscale image in [0, 1], possibly cropped on load.
#[derive(Debug, Clone)]
pub struct PgmImage {
    pub matrix: Matrix,
    /// Rows removed to reach a multiple of 3.
    pub cropped_rows: usize,
}

/// Load an ASCII (P2) or binary (P5) PGM, mapping samples onto [0, 1] and
/// cropping trailing rows so the height is a multiple of 3.
pub fn load_pgm(path: &Path) -> Result<PgmImage> {
    let bytes = fs::read(path)?;
    let mut pos = 0usize;

    // header tokens, skipping whitespace and # comments
    let mut next_token = |bytes: &[u8]| -> Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::UnsupportedFormat("truncated PGM header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };

    let magic = next_token(&bytes)?;
    if magic != "P2" && magic != "P5" {
        return Err(Error::UnsupportedFormat(format!(
            "expected P2 or P5, found {magic}"
        )));
    }
    let parse_dim = |s: String| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|_| Error::UnsupportedFormat(format!("bad PGM dimension {s:?}")))
    };
    let width = parse_dim(next_token(&bytes)?)?;
    let height = parse_dim(next_token(&bytes)?)?;
    let maxval = parse_dim(next_token(&bytes)?)?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::UnsupportedFormat(format!(
            "maxval {maxval} outside 1..=65535"
        )));
    }

    let n = width * height;
    let mut samples = Vec::with_capacity(n);
    if magic == "P2" {
        for _ in 0..n {
            samples.push(parse_dim(next_token(&bytes)?)? as f64);
        }
    } else {
        // single whitespace byte after maxval, then raster
        pos += 1;
        let bytes_per = if maxval > 255 { 2 } else { 1 };
        if bytes.len() < pos + n * bytes_per {
            return Err(Error::UnsupportedFormat("truncated P5 raster".into()));
        }
        for k in 0..n {
            let v = if bytes_per == 1 {
                bytes[pos + k] as f64
            } else {
                // 16-bit samples are big-endian
                u16::from_be_bytes([bytes[pos + 2 * k], bytes[pos + 2 * k + 1]]) as f64
            };
            samples.push(v);
        }
    }

    let mut matrix = Matrix::zeros(height, width);
    for i in 0..height {
        for j in 0..width {
            matrix.set(i, j, samples[i * width + j] / maxval as f64);
        }
    }
    let kept = (height / 3) * 3;
    if kept < 6 {
        return Err(Error::InvalidSize(height));
    }
    let cropped_rows = height - kept;
    if cropped_rows > 0 {
        matrix = matrix.row_slice(0, kept);
    }
    Ok(PgmImage {
        matrix,
        cropped_rows,
    })
}

/// Write a [0, 1] matrix as binary 8-bit PGM; values are clamped.
pub fn write_pgm(matrix: &Matrix, path: &Path) -> Result<()> {
    let mut out = format!("P5\n{} {}\n255\n", matrix.cols(), matrix.rows()).into_bytes();
    for &v in matrix.data() {
        out.push((v.clamp(0.0, 1.0) * 255.0).round() as u8);
    }
    fs::write(path, out)?;
    Ok(())
}

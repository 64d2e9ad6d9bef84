//! Matrix files.
//!
//! CSV: comma separated, no header, one matrix row per line; label files
//! hold one integer per line. Reals are written with 17 significant digits
//! so they read back exactly.
//!
//! Binary: `HNGM` magic, then little-endian `u32` version, `u32` rows,
//! `u32` cols, a `u8` dtype tag, and the row-major payload. Labels are
//! stored as an `N x 1` real matrix.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ndarray::Array2;

use super::FeatureMatrix;
use crate::attributes::ClassAttributeMatrix;
use crate::error::{Error, Result};

pub const BINARY_MAGIC: &[u8; 4] = b"HNGM";
pub const BINARY_VERSION: u32 = 1;

const DTYPE_F64: u8 = 1;
const DTYPE_U8: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Binary,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Binary => "bin",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "binary" | "bin" => Ok(Format::Binary),
            other => Err(Error::invalid(format!("unknown format '{other}'"))),
        }
    }
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Parses a CSV matrix; `parse` maps `(row, col, text)` to a value.
fn read_csv<T: Clone>(
    path: &Path,
    mut parse: impl FnMut(usize, usize, &str) -> Result<T>,
) -> Result<Array2<T>> {
    let reader = BufReader::new(open(path)?);
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let before = data.len();
        for (c, field) in line.split(',').enumerate() {
            data.push(parse(rows, c, field.trim()).map_err(|e| match e {
                Error::InvalidInput(msg) => parse_error(path, idx + 1, msg),
                other => other,
            })?);
        }
        let width = data.len() - before;
        match cols {
            None => cols = Some(width),
            Some(w) if w != width => {
                return Err(parse_error(
                    path,
                    idx + 1,
                    format!("row has {width} fields, expected {w}"),
                ))
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| parse_error(path, 1, "file holds no rows"))?;
    Ok(Array2::from_shape_vec((rows, cols), data).expect("rows have equal width"))
}

fn parse_f64(text: &str) -> Result<f64> {
    text.parse::<f64>()
        .map_err(|_| Error::invalid(format!("'{text}' is not a number")))
}

fn write_csv<T>(path: &Path, values: &Array2<T>, fmt: impl Fn(&T) -> String) -> Result<()> {
    let mut out = create(path)?;
    for row in values.outer_iter() {
        let line: Vec<String> = row.iter().map(&fmt).collect();
        writeln!(out, "{}", line.join(",")).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

fn write_binary(path: &Path, shape: (usize, usize), dtype: u8, payload: &[u8]) -> Result<()> {
    let (rows, cols) = shape;
    let to_u32 = |v: usize| {
        u32::try_from(v).map_err(|_| Error::invalid(format!("dimension {v} does not fit in u32")))
    };
    let mut out = create(path)?;
    let mut header = Vec::with_capacity(17);
    header.extend_from_slice(BINARY_MAGIC);
    header.extend_from_slice(&BINARY_VERSION.to_le_bytes());
    header.extend_from_slice(&to_u32(rows)?.to_le_bytes());
    header.extend_from_slice(&to_u32(cols)?.to_le_bytes());
    header.push(dtype);
    out.write_all(&header)
        .and_then(|_| out.write_all(payload))
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

/// Reads a binary matrix file, returning its shape, dtype tag and payload.
fn read_binary(path: &Path) -> Result<((usize, usize), u8, Vec<u8>)> {
    let mut bytes = Vec::new();
    open(path)?
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io(path, e))?;
    if bytes.len() < 17 || &bytes[..4] != BINARY_MAGIC {
        return Err(parse_error(path, 0, "missing HNGM header"));
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"));
    let version = word(4);
    if version != BINARY_VERSION {
        return Err(parse_error(path, 0, format!("unsupported version {version}")));
    }
    let (rows, cols) = (word(8) as usize, word(12) as usize);
    let dtype = bytes[16];
    let width = match dtype {
        DTYPE_F64 => 8,
        DTYPE_U8 => 1,
        other => return Err(parse_error(path, 0, format!("unknown dtype tag {other}"))),
    };
    let payload = bytes.split_off(17);
    if payload.len() != rows * cols * width {
        return Err(parse_error(
            path,
            0,
            format!(
                "payload is {} bytes, header implies {}",
                payload.len(),
                rows * cols * width
            ),
        ));
    }
    Ok(((rows, cols), dtype, payload))
}

pub fn write_f64_matrix(path: impl AsRef<Path>, values: &Array2<f64>, format: Format) -> Result<()> {
    let path = path.as_ref();
    match format {
        Format::Csv => write_csv(path, values, |v| format!("{v:.16e}")),
        Format::Binary => {
            let payload: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
            write_binary(path, values.dim(), DTYPE_F64, &payload)
        }
    }
}

pub fn read_f64_matrix(path: impl AsRef<Path>, format: Format) -> Result<Array2<f64>> {
    let path = path.as_ref();
    match format {
        Format::Csv => read_csv(path, |_, _, text| parse_f64(text)),
        Format::Binary => {
            let (shape, dtype, payload) = read_binary(path)?;
            if dtype != DTYPE_F64 {
                return Err(parse_error(path, 0, "expected a real-valued (f64) matrix"));
            }
            let data = payload
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                .collect();
            Ok(Array2::from_shape_vec(shape, data).expect("payload length checked"))
        }
    }
}

/// Writes a 0/1 matrix (u8 payload in the binary format).
pub fn write_attribute_matrix(path: impl AsRef<Path>, values: &Array2<u8>, format: Format) -> Result<()> {
    let path = path.as_ref();
    match format {
        Format::Csv => write_csv(path, values, |v| v.to_string()),
        Format::Binary => {
            let payload: Vec<u8> = values.iter().copied().collect();
            write_binary(path, values.dim(), DTYPE_U8, &payload)
        }
    }
}

/// Reads a 0/1 matrix; any other entry is reported with its cell.
pub fn read_attribute_matrix(path: impl AsRef<Path>, format: Format) -> Result<Array2<u8>> {
    let path = path.as_ref();
    let non_binary = |row, col, value: String| Error::NonBinary {
        path: path.to_path_buf(),
        row,
        col,
        value,
    };
    match format {
        Format::Csv => read_csv(path, |r, c, text| match parse_f64(text)? {
            v if v == 0.0 => Ok(0u8),
            v if v == 1.0 => Ok(1u8),
            _ => Err(non_binary(r, c, text.to_string())),
        }),
        Format::Binary => {
            let ((rows, cols), dtype, payload) = read_binary(path)?;
            if dtype != DTYPE_U8 {
                return Err(parse_error(path, 0, "expected a u8 attribute matrix"));
            }
            if let Some(i) = payload.iter().position(|&v| v > 1) {
                return Err(non_binary(i / cols, i % cols, payload[i].to_string()));
            }
            Ok(Array2::from_shape_vec((rows, cols), payload).expect("payload length checked"))
        }
    }
}

pub fn write_labels(path: impl AsRef<Path>, labels: &[usize], format: Format) -> Result<()> {
    let path = path.as_ref();
    match format {
        Format::Csv => {
            let mut out = create(path)?;
            for y in labels {
                writeln!(out, "{y}").map_err(|e| Error::io(path, e))?;
            }
            out.flush().map_err(|e| Error::io(path, e))
        }
        Format::Binary => {
            let column = Array2::from_shape_fn((labels.len(), 1), |(i, _)| labels[i] as f64);
            write_f64_matrix(path, &column, Format::Binary)
        }
    }
}

pub fn read_labels(path: impl AsRef<Path>, format: Format) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let as_label = |text: &str| -> Result<usize> {
        text.parse::<usize>()
            .map_err(|_| Error::invalid(format!("'{text}' is not a class index")))
    };
    match format {
        Format::Csv => {
            let column = read_csv(path, |_, _, text| as_label(text))?;
            if column.ncols() != 1 {
                return Err(parse_error(path, 1, "label file must hold one value per line"));
            }
            Ok(column.into_iter().collect())
        }
        Format::Binary => {
            let column = read_f64_matrix(path, Format::Binary)?;
            if column.ncols() != 1 {
                return Err(parse_error(path, 0, "label matrix must have one column"));
            }
            column
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    if v >= 0.0 && v.fract() == 0.0 && v < u32::MAX as f64 {
                        Ok(v as usize)
                    } else {
                        Err(parse_error(path, i + 1, format!("{v} is not a class index")))
                    }
                })
                .collect()
        }
    }
}

/// Planted-noise cells as CSV `attribute_index,sample_index` with header.
pub fn write_noise_mask(path: impl AsRef<Path>, cells: &[(usize, usize)]) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    let mut body = String::from("attribute_index,sample_index\n");
    for (m, n) in cells {
        body.push_str(&format!("{m},{n}\n"));
    }
    out.write_all(body.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_noise_mask(path: impl AsRef<Path>) -> Result<Vec<(usize, usize)>> {
    let path = path.as_ref();
    let reader = BufReader::new(open(path)?);
    let mut cells = Vec::new();
    for (idx, line) in reader.lines().enumerate().skip(1) {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Option<(usize, usize)> = line
            .split_once(',')
            .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
        cells.push(parsed.ok_or_else(|| parse_error(path, idx + 1, format!("bad cell '{line}'")))?);
    }
    Ok(cells)
}

/// Loads features, labels and class attributes and checks they agree.
pub fn load_dataset(
    feature_path: impl AsRef<Path>,
    label_path: impl AsRef<Path>,
    class_attr_path: impl AsRef<Path>,
    format: Format,
) -> Result<(FeatureMatrix, ClassAttributeMatrix)> {
    let feature_path = feature_path.as_ref();
    let label_path: PathBuf = label_path.as_ref().to_path_buf();
    let rows = read_f64_matrix(feature_path, format)?;
    let labels = read_labels(&label_path, format)?;
    let attrs = read_attribute_matrix(&class_attr_path, format)?;

    if labels.len() != rows.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{} has {} rows but {} has {} labels",
            feature_path.display(),
            rows.nrows(),
            label_path.display(),
            labels.len()
        )));
    }
    let class_count = attrs.ncols();
    if let Some((i, &y)) = labels.iter().enumerate().find(|(_, &y)| y >= class_count) {
        return Err(Error::DimensionMismatch(format!(
            "{}: label {y} on line {} exceeds the {class_count} classes of {}",
            label_path.display(),
            i + 1,
            class_attr_path.as_ref().display()
        )));
    }
    let features = FeatureMatrix::new(rows, labels, class_count)
        .map_err(|e| Error::invalid(format!("{}: {e}", feature_path.display())))?;
    Ok((features, ClassAttributeMatrix::new(attrs)?))
}

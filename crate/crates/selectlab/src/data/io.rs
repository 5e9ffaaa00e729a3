//! Dataset file formats.
//!
//! Two formats are supported:
//!
//! - **CSV**: a header line `# dim=<d> classes=<m>` followed by one sample
//!   per line, `f_1,...,f_d,label`.
//! - **Binary**: magic `SNDS`, then little-endian `u32` count, dim, and
//!   class count, then per sample a `u8` label followed by `dim`
//!   little-endian `f32` features.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::nn::Matrix;

const BINARY_MAGIC: &[u8; 4] = b"SNDS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    Csv,
    Binary,
}

impl DatasetFormat {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "csv" => Ok(DatasetFormat::Csv),
            "binary" | "bin" => Ok(DatasetFormat::Binary),
            other => Err(Error::input(format!("unknown dataset format `{other}`"))),
        }
    }
}

pub fn save_dataset(ds: &LabeledDataset, path: impl AsRef<Path>, format: DatasetFormat) -> Result<()> {
    let bytes = match format {
        DatasetFormat::Csv => to_csv(ds).into_bytes(),
        DatasetFormat::Binary => to_binary(ds)?,
    };
    let mut file = fs::File::create(path.as_ref())?;
    file.write_all(&bytes)?;
    Ok(())
}

pub fn load_dataset(path: impl AsRef<Path>, format: DatasetFormat) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let display = path.display().to_string();
    match format {
        DatasetFormat::Csv => {
            let text = fs::read_to_string(path)?;
            from_csv(&text, &display)
        }
        DatasetFormat::Binary => {
            let mut bytes = Vec::new();
            fs::File::open(path)?.read_to_end(&mut bytes)?;
            from_binary(&bytes, &display)
        }
    }
}

fn to_csv(ds: &LabeledDataset) -> String {
    let mut out = format!("# dim={} classes={}\n", ds.dim(), ds.num_classes());
    for i in 0..ds.len() {
        let mut fields: Vec<String> = ds.features().row(i).iter().map(f64::to_string).collect();
        fields.push(ds.labels()[i].to_string());
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn from_csv(text: &str, path: &str) -> Result<LabeledDataset> {
    let mut lines = text.lines().enumerate();
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty file"))?;
    let (dim, classes) = parse_csv_header(header)
        .ok_or_else(|| Error::parse(path, header_line + 1, "expected `# dim=<d> classes=<m>`"))?;

    let mut data = Vec::new();
    let mut labels = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != dim + 1 {
            return Err(Error::parse(
                path,
                line_no,
                format!("expected {} fields, found {}", dim + 1, fields.len()),
            ));
        }
        for field in &fields[..dim] {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::parse(path, line_no, format!("bad feature value `{field}`")))?;
            data.push(v);
        }
        let label: usize = fields[dim]
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, line_no, format!("bad label `{}`", fields[dim])))?;
        if label >= classes {
            return Err(Error::parse(
                path,
                line_no,
                format!("label {label} out of range for {classes} classes"),
            ));
        }
        labels.push(label);
    }
    let features = Matrix::from_vec(labels.len(), dim, data)?;
    LabeledDataset::new(features, labels, classes)
}

fn parse_csv_header(line: &str) -> Option<(usize, usize)> {
    let rest = line.trim().strip_prefix('#')?.trim();
    let mut dim = None;
    let mut classes = None;
    for part in rest.split_whitespace() {
        if let Some(v) = part.strip_prefix("dim=") {
            dim = v.parse().ok();
        } else if let Some(v) = part.strip_prefix("classes=") {
            classes = v.parse().ok();
        }
    }
    match (dim, classes) {
        (Some(d), Some(m)) if d > 0 && m > 0 => Some((d, m)),
        _ => None,
    }
}

fn to_binary(ds: &LabeledDataset) -> Result<Vec<u8>> {
    if ds.num_classes() > usize::from(u8::MAX) + 1 {
        return Err(Error::input(format!(
            "binary format stores u8 labels; {} classes do not fit",
            ds.num_classes()
        )));
    }
    let mut out = Vec::with_capacity(16 + ds.len() * (1 + 4 * ds.dim()));
    out.extend_from_slice(BINARY_MAGIC);
    out.extend_from_slice(&(ds.len() as u32).to_le_bytes());
    out.extend_from_slice(&(ds.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(ds.num_classes() as u32).to_le_bytes());
    for i in 0..ds.len() {
        out.push(ds.labels()[i] as u8);
        for &v in ds.features().row(i) {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    Ok(out)
}

fn from_binary(bytes: &[u8], path: &str) -> Result<LabeledDataset> {
    let fail = |offset: usize, msg: &str| Error::parse(path, 0, format!("{msg} (offset {offset})"));
    if bytes.len() < 16 {
        return Err(fail(bytes.len(), "file too short for header"));
    }
    if &bytes[..4] != BINARY_MAGIC {
        return Err(fail(0, "bad magic, expected SNDS"));
    }
    let read_u32 = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"));
    let count = read_u32(4) as usize;
    let dim = read_u32(8) as usize;
    let classes = read_u32(12) as usize;
    if dim == 0 || classes == 0 {
        return Err(fail(8, "dim and classes must be positive"));
    }
    let sample_bytes = 1 + 4 * dim;
    let expected = 16 + count * sample_bytes;
    if bytes.len() != expected {
        return Err(fail(
            bytes.len(),
            &format!("expected {expected} bytes for {count} samples"),
        ));
    }
    let mut data = Vec::with_capacity(count * dim);
    let mut labels = Vec::with_capacity(count);
    for s in 0..count {
        let at = 16 + s * sample_bytes;
        let label = bytes[at] as usize;
        if label >= classes {
            return Err(fail(at, &format!("label {label} out of range")));
        }
        labels.push(label);
        for f in 0..dim {
            let fat = at + 1 + 4 * f;
            let v = f32::from_le_bytes(bytes[fat..fat + 4].try_into().expect("4 bytes"));
            data.push(f64::from(v));
        }
    }
    let features = Matrix::from_vec(count, dim, data)?;
    LabeledDataset::new(features, labels, classes)
}

//! Text formats and file helpers.
//!
//! Matrix TSV: a header `gene_id<TAB>sample:group[:batch]...` followed by one
//! row per gene. Summary TSV: `gene_id<TAB>xbar<TAB>s2<TAB>df`, header
//! optional. Blank lines and lines starting with `#` are skipped.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::summaries::{GeneSummary, Group, ReplicateMatrix};

pub const SUMMARY_HEADER: &str = "gene_id\txbar\ts2\tdf";

/// Shortest decimal form that parses back to the same value.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_f64(field: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("{what}: cannot parse {field:?} as a number")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("{what}: non-finite value {field:?}")));
    }
    Ok(v)
}

/// Numbered content lines, skipping blanks and comments.
fn content_lines(reader: impl BufRead) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Err(e) => Some(Err(Error::Io(e))),
            Ok(l) => {
                let t = l.trim_end_matches('\r');
                if t.trim().is_empty() || t.starts_with('#') {
                    None
                } else {
                    Some(Ok((i + 1, t.to_string())))
                }
            }
        })
}

pub fn read_matrix(reader: impl Read) -> Result<ReplicateMatrix> {
    let mut lines = content_lines(BufReader::new(reader));
    let (hline, header) = lines
        .next()
        .transpose()?
        .ok_or_else(|| parse_err(1, "missing header"))?;
    let mut sample_ids = Vec::new();
    let mut groups = Vec::new();
    let mut batches = Vec::new();
    for col in header.split('\t').skip(1) {
        let parts: Vec<&str> = col.split(':').collect();
        if !(2..=3).contains(&parts.len()) || parts[0].is_empty() {
            return Err(parse_err(
                hline,
                format!("column {col:?} is not of the form sample:group[:batch]"),
            ));
        }
        let group: Group = parts[1]
            .parse()
            .map_err(|e: Error| parse_err(hline, e.to_string()))?;
        sample_ids.push(parts[0].to_string());
        groups.push(group);
        batches.push(parts.get(2).map(|b| b.to_string()));
    }
    if sample_ids.is_empty() {
        return Err(parse_err(hline, "header has no sample columns"));
    }

    let m = sample_ids.len();
    let mut gene_ids = Vec::new();
    let mut values = Vec::new();
    for item in lines {
        let (ln, line) = item?;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != m + 1 {
            return Err(parse_err(
                ln,
                format!("expected {} fields, found {}", m + 1, fields.len()),
            ));
        }
        gene_ids.push(fields[0].to_string());
        for (j, f) in fields[1..].iter().enumerate() {
            values.push(parse_f64(f, ln, &sample_ids[j])?);
        }
    }
    if gene_ids.is_empty() {
        return Err(parse_err(hline, "no gene rows"));
    }
    ReplicateMatrix::new(gene_ids, sample_ids, groups, batches, values)
}

pub fn write_matrix(matrix: &ReplicateMatrix, mut w: impl Write) -> Result<()> {
    write!(w, "gene_id")?;
    for j in 0..matrix.n_samples() {
        write!(w, "\t{}:{}", matrix.sample_ids[j], matrix.groups[j])?;
        if let Some(b) = &matrix.batches[j] {
            write!(w, ":{b}")?;
        }
    }
    writeln!(w)?;
    for i in 0..matrix.n_genes() {
        write!(w, "{}", matrix.gene_ids[i])?;
        for &v in matrix.row(i) {
            write!(w, "\t{}", fmt_f64(v))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_summaries(reader: impl Read) -> Result<Vec<GeneSummary>> {
    let mut out = Vec::new();
    for (k, item) in content_lines(BufReader::new(reader)).enumerate() {
        let (ln, line) = item?;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(parse_err(ln, format!("expected 4 fields, found {}", fields.len())));
        }
        if k == 0 && fields[1].trim().parse::<f64>().is_err() {
            continue;
        }
        let xbar = parse_f64(fields[1], ln, "xbar")?;
        let s2 = parse_f64(fields[2], ln, "s2")?;
        let df = parse_f64(fields[3], ln, "df")?;
        let g = GeneSummary::new(fields[0], xbar, s2, df)
            .map_err(|e| parse_err(ln, e.to_string()))?;
        out.push(g);
    }
    if out.is_empty() {
        return Err(Error::Input("no gene summaries".into()));
    }
    Ok(out)
}

pub fn write_summaries(summaries: &[GeneSummary], mut w: impl Write) -> Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for g in summaries {
        writeln!(
            w,
            "{}\t{}\t{}\t{}",
            g.id,
            fmt_f64(g.xbar),
            fmt_f64(g.s2),
            fmt_f64(g.df_sigma)
        )?;
    }
    Ok(())
}

/// One variance per line.
pub fn read_variances(reader: impl Read) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in content_lines(BufReader::new(reader)) {
        let (ln, line) = item?;
        let v = parse_f64(&line, ln, "variance")?;
        if v < 0.0 {
            return Err(parse_err(ln, format!("negative variance {v}")));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::Input("variance file is empty".into()));
    }
    Ok(out)
}

pub fn read_matrix_file(path: &Path) -> Result<ReplicateMatrix> {
    read_matrix(fs::File::open(path)?)
}

pub fn read_summaries_file(path: &Path) -> Result<Vec<GeneSummary>> {
    read_summaries(fs::File::open(path)?)
}

pub fn read_variances_file(path: &Path) -> Result<Vec<f64>> {
    read_variances(fs::File::open(path)?)
}

/// Writes `bytes` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::Input(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn file_sha256(path: &Path) -> Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}

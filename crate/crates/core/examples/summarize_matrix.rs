//! Reading a replicate matrix and reducing it under each design.
//!
//! cargo run --example summarize_matrix [matrix.tsv]

use std::path::PathBuf;

use iteb::io::{read_matrix_file, write_summaries};
use iteb::summaries::{
    paired_log_diff, quantile_normalize, summarize_one_sample, summarize_paired,
    summarize_pooled, summarize_welch,
};

fn main() -> iteb::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/paired3.tsv"))
    });
    let matrix = read_matrix_file(&path)?;
    println!("{} genes x {} samples", matrix.n_genes(), matrix.n_samples());

    let mut out = std::io::stdout();
    println!("\n# pooled");
    write_summaries(&summarize_pooled(&matrix)?, &mut out)?;
    println!("\n# welch");
    write_summaries(&summarize_welch(&matrix)?, &mut out)?;
    println!("\n# paired");
    write_summaries(&summarize_paired(&matrix)?, &mut out)?;
    println!("\n# paired log ratios after quantile normalization");
    let qn = quantile_normalize(&matrix);
    write_summaries(&summarize_one_sample(&paired_log_diff(&qn)?)?, &mut out)?;
    Ok(())
}

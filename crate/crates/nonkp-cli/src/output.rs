//! Artifact writers: CSV with lossless float formatting, snapshot files
//! (JSON metadata plus a raw little-endian f64 sidecar), and the failure
//! record. Every byte written is a pure function of the inputs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use nonkp::model::StateUV;

/// 17 significant digits: round-trips every f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct CsvWriter {
    out: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> std::io::Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{}", header.join(","))?;
        Ok(Self { out })
    }

    pub fn row(&mut self, fields: &[String]) -> std::io::Result<()> {
        writeln!(self.out, "{}", fields.join(","))
    }

    pub fn finish(mut self) -> std::io::Result<()> {
        self.out.flush()
    }
}

#[derive(Serialize)]
struct SnapshotMeta<'a> {
    t: f64,
    scheme: &'a str,
    build: &'a str,
    grid: GridMeta,
    /// Row-major (y outer, x inner) f64 little-endian arrays in the sidecar:
    /// `u` first, then `v`.
    sidecar: String,
    samples_per_field: usize,
}

#[derive(Serialize)]
struct GridMeta {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
}

/// Write `snap_NNNNNN.json` + `snap_NNNNNN.bin` under `dir`.
pub fn write_snapshot(
    dir: &Path,
    index: usize,
    state: &StateUV,
    t: f64,
    scheme: &str,
    build: &str,
) -> std::io::Result<PathBuf> {
    let grid = state.u.grid();
    let base = format!("snap_{index:06}");
    let bin_name = format!("{base}.bin");

    let mut bin = BufWriter::new(File::create(dir.join(&bin_name))?);
    for field in [&state.u, &state.v] {
        for v in field.to_physical() {
            bin.write_all(&v.to_le_bytes())?;
        }
    }
    bin.flush()?;

    let meta = SnapshotMeta {
        t,
        scheme,
        build,
        grid: GridMeta {
            nx: grid.nx(),
            ny: grid.ny(),
            lx: grid.lx(),
            ly: grid.ly(),
        },
        sidecar: bin_name,
        samples_per_field: grid.len(),
    };
    let json_path = dir.join(format!("{base}.json"));
    let mut f = BufWriter::new(File::create(&json_path)?);
    serde_json::to_writer_pretty(&mut f, &meta)?;
    f.flush()?;
    Ok(json_path)
}

/// Machine-readable failure record: `{scenario, reason, t, detail}`.
#[derive(Debug, Serialize)]
pub struct Failure {
    pub scenario: String,
    pub reason: String,
    pub t: Option<f64>,
    pub detail: String,
}

impl Failure {
    pub fn new(scenario: &str, reason: &str, t: Option<f64>, detail: impl Into<String>) -> Self {
        Self {
            scenario: scenario.to_string(),
            reason: reason.to_string(),
            t,
            detail: detail.into(),
        }
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let mut f = BufWriter::new(File::create(dir.join("failure.json"))?);
        serde_json::to_writer_pretty(&mut f, self)?;
        f.flush()
    }
}

/// Order-preserving map over `items` on up to `threads` workers.
pub fn parallel_map<T, R, F>(items: Vec<T>, threads: usize, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    let threads = threads.max(1);
    if threads == 1 || items.len() <= 1 {
        return items.into_iter().map(f).collect();
    }
    let n = items.len();
    let chunk = n.div_ceil(threads);
    let mut slots: Vec<Option<R>> = (0..n).map(|_| None).collect();
    let mut item_chunks: Vec<Vec<T>> = Vec::new();
    {
        let mut it = items.into_iter();
        loop {
            let c: Vec<T> = it.by_ref().take(chunk).collect();
            if c.is_empty() {
                break;
            }
            item_chunks.push(c);
        }
    }
    std::thread::scope(|scope| {
        let mut remaining: &mut [Option<R>] = &mut slots;
        for chunk_items in item_chunks {
            let (head, tail) = remaining.split_at_mut(chunk_items.len());
            remaining = tail;
            let f = &f;
            scope.spawn(move || {
                for (slot, item) in head.iter_mut().zip(chunk_items) {
                    *slot = Some(f(item));
                }
            });
        }
    });
    slots.into_iter().map(|s| s.unwrap()).collect()
}

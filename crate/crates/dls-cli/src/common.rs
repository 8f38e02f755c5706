//! Shared plumbing: schema resolution, workload construction, table output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use dls::harness::{self, Distribution, WorkloadSpec};
use dls::label_space::{parse_schema, ContentSchema, DimensionSpec, EventPoint, Subscription};

pub const DEFAULT_DOMAIN_MAX: i64 = (1 << 20) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistArg {
    Uniform,
    Zipf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Csv,
}

/// Schema source: a file, or a synthetic `--dims`/`--granule` grid over
/// `[0, 2^20 - 1]` per dimension.
#[derive(Debug, Args)]
pub struct SchemaArgs {
    /// Schema definition file.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Dimension count for a synthetic schema.
    #[arg(long, default_value_t = 2)]
    pub dims: u8,
    /// Granules per dimension for a synthetic schema (power of two).
    #[arg(long, default_value_t = 32)]
    pub granule: u64,
}

impl SchemaArgs {
    pub fn resolve(&self) -> Result<ContentSchema> {
        if let Some(path) = &self.schema {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading schema {}", path.display()))?;
            return Ok(parse_schema(&text)?);
        }
        synthetic_schema(self.dims, self.granule)
    }
}

pub fn synthetic_schema(dims: u8, granule: u64) -> Result<ContentSchema> {
    if dims == 0 {
        bail!("--dims must be at least 1");
    }
    if !granule.is_power_of_two() {
        bail!("--granule must be a power of two, got {granule}");
    }
    let bits = granule.trailing_zeros() as u8;
    let specs = (1..=dims)
        .map(|i| DimensionSpec::range(format!("a{i}"), 0, DEFAULT_DOMAIN_MAX, bits))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(ContentSchema::new(specs, 0)?)
}

#[derive(Debug, Args)]
pub struct WorkloadArgs {
    #[arg(long, value_enum, default_value_t = DistArg::Uniform)]
    pub dist: DistArg,
    /// Zipf exponent.
    #[arg(long, default_value_t = 1.0)]
    pub zipf_s: f64,
    #[arg(long, default_value_t = 1000)]
    pub n_subs: u64,
    #[arg(long, default_value_t = 1000)]
    pub n_events: u64,
    /// Largest subscription interval length, applied to every dimension;
    /// defaults to an eighth of the domain width.
    #[arg(long)]
    pub max_interval_len: Option<u64>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

impl WorkloadArgs {
    pub fn spec(&self, schema: &ContentSchema) -> WorkloadSpec {
        let distribution = match self.dist {
            DistArg::Uniform => Distribution::Uniform,
            DistArg::Zipf => Distribution::Zipf { s: self.zipf_s },
        };
        WorkloadSpec {
            distribution,
            n_subscriptions: self.n_subs,
            n_events: self.n_events,
            max_interval_len: self.max_interval_len.map(|l| vec![l; schema.dims().len()]),
            seed: self.seed,
        }
    }

    pub fn with_n_subs(&self, schema: &ContentSchema, n_subs: u64) -> WorkloadSpec {
        let mut spec = self.spec(schema);
        spec.n_subscriptions = n_subs;
        spec
    }
}

/// Loads `<prefix>.subs.txt` / `<prefix>.events.txt` written by `gen`, or
/// generates the workload in memory when no prefix is given.
pub fn load_or_generate(
    workload: Option<&Path>,
    schema: &ContentSchema,
    spec: &WorkloadSpec,
) -> Result<(Vec<Subscription>, Vec<EventPoint>)> {
    match workload {
        Some(prefix) => {
            let subs_path = with_suffix(prefix, ".subs.txt");
            let events_path = with_suffix(prefix, ".events.txt");
            let subs_text = fs::read_to_string(&subs_path)
                .with_context(|| format!("reading {}", subs_path.display()))?;
            let events_text = fs::read_to_string(&events_path)
                .with_context(|| format!("reading {}", events_path.display()))?;
            let subs = harness::parse_workload(&subs_text, schema)?;
            let events = harness::parse_workload(&events_text, schema)?;
            Ok((subs.subscriptions, events.events))
        }
        None => Ok((
            harness::gen_subscriptions(spec, schema)?,
            harness::gen_events(spec, schema)?,
        )),
    }
}

pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

/// Round-robin assignment used to spread a workload over clients.
pub fn spread_subscriptions(
    subs: &[Subscription],
    clients: &[String],
) -> BTreeMap<String, Vec<Subscription>> {
    let mut by_client: BTreeMap<String, Vec<Subscription>> =
        clients.iter().map(|c| (c.clone(), Vec::new())).collect();
    for (i, sub) in subs.iter().enumerate() {
        by_client
            .get_mut(&clients[i % clients.len()])
            .unwrap()
            .push(sub.clone());
    }
    by_client
}

/// A small row-major table with deterministic rendering.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: FormatArg) -> String {
        match format {
            FormatArg::Csv => {
                let mut out = self.header.join(",");
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                out
            }
            FormatArg::Text => {
                let mut widths: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
                for row in &self.rows {
                    for (w, cell) in widths.iter_mut().zip(row) {
                        *w = (*w).max(cell.len());
                    }
                }
                let mut out = String::new();
                let emit = |cells: &[String], out: &mut String| {
                    let line: Vec<String> = cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{c:>w$}"))
                        .collect();
                    out.push_str(line.join("  ").trim_end());
                    out.push('\n');
                };
                emit(&self.header, &mut out);
                for row in &self.rows {
                    emit(row, &mut out);
                }
                out
            }
        }
    }
}

/// Writes to the path when given, otherwise to stdout.
pub fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{content}"),
    }
    Ok(())
}

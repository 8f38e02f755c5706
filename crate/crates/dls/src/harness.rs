//! Workload generation and ground-truth measurement.
//!
//! Subscriptions get a per-dimension lower bound drawn from the configured
//! distribution and a uniformly random interval length; events are plain
//! points. Everything is driven by a seeded stream cipher, so a workload is
//! reproducible byte for byte from its seed. The exact-matching oracle here
//! is a deliberate linear scan over normalized rectangles: slow, obvious,
//! and independent of every label or filter code path it is used to judge.

use std::collections::HashMap;
use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cbf::{CbfParams, CountingBloomFilter};
use crate::label_space::{ContentSchema, DimensionKind, EventPoint, Predicate, Subscription};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("workload spec: {0}")]
    InvalidSpec(String),
    #[error("zipf table over {0} values is beyond the supported size")]
    ZipfTooLarge(u128),
    #[error("workload file, line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("workload file was generated for a different schema")]
    SchemaMismatch,
    #[error(transparent)]
    LabelSpace(#[from] crate::label_space::LabelSpaceError),
    #[error(transparent)]
    Cbf(#[from] crate::cbf::CbfError),
}

type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    Uniform,
    /// Rank-skewed sampling with exponent `s`; rank 1 is the domain's
    /// lowest value.
    Zipf {
        s: f64,
    },
}

impl Distribution {
    pub fn name(&self) -> String {
        match self {
            Distribution::Uniform => "uniform".to_string(),
            Distribution::Zipf { s } => format!("zipf {s}"),
        }
    }
}

/// Parameters for one generated workload.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadSpec {
    pub distribution: Distribution,
    pub n_subscriptions: u64,
    pub n_events: u64,
    /// Largest interval length per dimension; `None` defaults every
    /// dimension to an eighth of its width.
    pub max_interval_len: Option<Vec<u64>>,
    pub seed: u64,
}

impl WorkloadSpec {
    pub fn validate(&self, schema: &ContentSchema) -> Result<()> {
        if let Distribution::Zipf { s } = self.distribution {
            if s <= 0.0 || !s.is_finite() {
                return Err(HarnessError::InvalidSpec(format!(
                    "zipf exponent must be positive and finite, got {s}"
                )));
            }
        }
        if let Some(lens) = &self.max_interval_len {
            if lens.len() != schema.dims().len() {
                return Err(HarnessError::InvalidSpec(format!(
                    "{} interval lengths for {} dimensions",
                    lens.len(),
                    schema.dims().len()
                )));
            }
            if lens.contains(&0) {
                return Err(HarnessError::InvalidSpec(
                    "interval lengths must be at least 1".into(),
                ));
            }
        }
        Ok(())
    }

    fn interval_len_for(&self, schema: &ContentSchema, dim: usize) -> u64 {
        match &self.max_interval_len {
            Some(lens) => lens[dim],
            None => ((schema.dims()[dim].width() / 8) as u64).max(1),
        }
    }
}

// Seed domains keep the subscription and event streams decorrelated while
// both stay a pure function of the workload seed.
const SEED_DOMAIN_SUBSCRIPTIONS: u64 = 0x5355_4253;
const SEED_DOMAIN_EVENTS: u64 = 0x4556_5453;

fn stream_rng(seed: u64, domain: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ domain.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Inverse-CDF sampler over ranks `1..=n` with mass proportional to
/// `rank^-s`, exact up to f64 summation.
struct ZipfCdf {
    cumulative: Vec<f64>,
}

impl ZipfCdf {
    fn new(n: u128, s: f64) -> Result<Self> {
        const MAX_TABLE: u128 = 1 << 26;
        if n == 0 || n > MAX_TABLE {
            return Err(HarnessError::ZipfTooLarge(n));
        }
        let mut cumulative = Vec::with_capacity(n as usize);
        let mut total = 0.0f64;
        for rank in 1..=n as u64 {
            total += (rank as f64).powf(-s);
            cumulative.push(total);
        }
        Ok(Self { cumulative })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> u64 {
        let total = *self.cumulative.last().expect("non-empty table");
        let target = rng.gen::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= target);
        idx.min(self.cumulative.len() - 1) as u64
    }
}

/// Per-dimension value sampler shared between subscription and event
/// generation.
struct ValueSampler {
    tables: HashMap<(u128, u64), Rc<ZipfCdf>>,
}

impl ValueSampler {
    fn new() -> Self {
        Self {
            tables: HashMap::new(),
        }
    }

    fn sample(
        &mut self,
        dist: Distribution,
        schema: &ContentSchema,
        dim: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<i64> {
        let spec = &schema.dims()[dim];
        match spec.kind() {
            DimensionKind::Range { lower, upper } => match dist {
                Distribution::Uniform => Ok(rng.gen_range(*lower..=*upper)),
                Distribution::Zipf { s } => {
                    let offset = self.zipf_rank(spec.width(), s, rng)?;
                    Ok(*lower + offset as i64)
                }
            },
            DimensionKind::Set { values } => {
                let pos = match dist {
                    Distribution::Uniform => rng.gen_range(0..values.len()),
                    Distribution::Zipf { s } => {
                        self.zipf_rank(values.len() as u128, s, rng)? as usize
                    }
                };
                Ok(values[pos])
            }
        }
    }

    /// Zero-based rank: 0 is the most probable.
    fn zipf_rank(&mut self, n: u128, s: f64, rng: &mut ChaCha8Rng) -> Result<u64> {
        let key = (n, s.to_bits());
        let table = match self.tables.get(&key) {
            Some(t) => Rc::clone(t),
            None => {
                let t = Rc::new(ZipfCdf::new(n, s)?);
                self.tables.insert(key, Rc::clone(&t));
                t
            }
        };
        Ok(table.sample(rng))
    }
}

/// Draws `spec.n_subscriptions` subscriptions: per dimension, a lower bound
/// from the distribution plus a uniform interval length, clipped at the
/// domain edge. Set dimensions get a single sampled value.
pub fn gen_subscriptions(spec: &WorkloadSpec, schema: &ContentSchema) -> Result<Vec<Subscription>> {
    spec.validate(schema)?;
    let mut rng = stream_rng(spec.seed, SEED_DOMAIN_SUBSCRIPTIONS);
    let mut sampler = ValueSampler::new();
    let mut out = Vec::with_capacity(spec.n_subscriptions as usize);
    for _ in 0..spec.n_subscriptions {
        let mut predicates = Vec::with_capacity(schema.dims().len());
        for (pos, dim) in schema.dims().iter().enumerate() {
            let low = sampler.sample(spec.distribution, schema, pos, &mut rng)?;
            match dim.kind() {
                DimensionKind::Range { upper, .. } => {
                    let len = rng.gen_range(1..=spec.interval_len_for(schema, pos)) as i64;
                    let high = low.saturating_add(len).min(*upper);
                    predicates.push(Predicate::range(dim.name(), low, high));
                }
                DimensionKind::Set { .. } => {
                    predicates.push(Predicate::among(dim.name(), low, low));
                }
            }
        }
        out.push(Subscription::new(predicates));
    }
    Ok(out)
}

/// Draws `spec.n_events` event points from the same distribution.
pub fn gen_events(spec: &WorkloadSpec, schema: &ContentSchema) -> Result<Vec<EventPoint>> {
    spec.validate(schema)?;
    let mut rng = stream_rng(spec.seed, SEED_DOMAIN_EVENTS);
    let mut sampler = ValueSampler::new();
    let mut out = Vec::with_capacity(spec.n_events as usize);
    for _ in 0..spec.n_events {
        let mut values = Vec::with_capacity(schema.dims().len());
        for pos in 0..schema.dims().len() {
            values.push(sampler.sample(spec.distribution, schema, pos, &mut rng)?);
        }
        out.push(EventPoint::new(values));
    }
    Ok(out)
}

/// Ground-truth matcher: normalized rectangles checked by linear scan.
#[derive(Debug, Clone)]
pub struct OracleIndex {
    entries: Vec<crate::label_space::NormalizedSubscription>,
    schema: ContentSchema,
}

impl OracleIndex {
    pub fn build(schema: &ContentSchema, subscriptions: &[Subscription]) -> Result<Self> {
        let entries = subscriptions
            .iter()
            .map(|s| s.normalize(schema))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Self {
            entries,
            schema: schema.clone(),
        })
    }

    /// Ids (input order) of every subscription containing the event.
    pub fn oracle_match(&self, event: &EventPoint) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, rect)| rect.contains(&self.schema, event))
            .map(|(id, _)| id)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Per-decision false-positive breakdown from a single-broker measurement.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FprReport {
    /// (event, subscriber) pairs examined.
    pub decisions: u64,
    pub true_deliveries: u64,
    /// Delivered, in the subscription's label set, rejected by the predicate.
    pub mapping_fps: u64,
    /// Delivered although even the label set rejects: filter collisions.
    pub cbf_fps: u64,
    pub saturation_events: u64,
    pub underflow_events: u64,
}

impl FprReport {
    pub fn total_fps(&self) -> u64 {
        self.mapping_fps + self.cbf_fps
    }

    pub fn mapping_fpr(&self) -> f64 {
        self.mapping_fps as f64 / self.decisions.max(1) as f64
    }

    pub fn cbf_fpr(&self) -> f64 {
        self.cbf_fps as f64 / self.decisions.max(1) as f64
    }

    pub fn total_fpr(&self) -> f64 {
        self.total_fps() as f64 / self.decisions.max(1) as f64
    }
}

/// Plays every event against every subscriber the way a broker with one
/// client per subscription would: the client filter decides delivery, the
/// exact oracle judges it. Each false delivery is attributed to exactly one
/// source: the cell over-approximation if the label is in the subscriber's
/// set, the filter otherwise.
pub fn measure_fpr(
    schema: &ContentSchema,
    app_id: u64,
    subscriptions: &[Subscription],
    events: &[EventPoint],
    params: CbfParams,
) -> Result<FprReport> {
    let mut report = FprReport {
        decisions: subscriptions.len() as u64 * events.len() as u64,
        ..FprReport::default()
    };
    let mut event_labels = Vec::with_capacity(events.len());
    for e in events {
        event_labels.push(schema.event_to_label(app_id, e)?.0);
    }
    let mut filter = CountingBloomFilter::new(params)?;
    for sub in subscriptions {
        let rect = sub.normalize(schema)?;
        let labels = schema.subscription_to_labels(app_id, sub)?;
        filter.reset();
        for label in &labels {
            filter.add(label);
        }
        report.saturation_events += filter.saturation_events();
        report.underflow_events += filter.underflow_events();
        for (event, &label_bits) in events.iter().zip(&event_labels) {
            let delivered = filter.query(crate::label_space::RangeLabel(label_bits)) >= 1;
            if !delivered {
                continue;
            }
            if rect.contains(schema, event) {
                report.true_deliveries += 1;
            } else if labels.contains(crate::label_space::RangeLabel(label_bits)) {
                report.mapping_fps += 1;
            } else {
                report.cbf_fps += 1;
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Workload files: header lines, then one record per line. Subscriptions are
// `s lo:hi lo:hi ...` (one field per dimension), events `e v1 v2 ...`.
// The embedded schema signature makes stale files fail loudly.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkloadKind {
    Subscriptions,
    Events,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadFile {
    pub kind: WorkloadKind,
    pub seed: u64,
    pub dist: String,
    pub subscriptions: Vec<Subscription>,
    pub events: Vec<EventPoint>,
}

fn schema_signature(schema: &ContentSchema) -> String {
    crate::label_space::schema_to_text(schema)
        .trim_end()
        .replace('\n', ";")
}

pub fn subscriptions_to_text(
    schema: &ContentSchema,
    spec: &WorkloadSpec,
    subscriptions: &[Subscription],
) -> Result<String> {
    let mut out = String::from("workload v1\nkind subscriptions\n");
    out.push_str(&format!("seed {}\n", spec.seed));
    out.push_str(&format!("dist {}\n", spec.distribution.name()));
    out.push_str(&format!("schema {}\n", schema_signature(schema)));
    out.push_str(&format!("count {}\n", subscriptions.len()));
    for sub in subscriptions {
        let rect = sub.normalize(schema)?;
        out.push('s');
        for bounds in &rect.rect {
            match bounds {
                Some((lo, hi)) => out.push_str(&format!(" {lo}:{hi}")),
                None => out.push_str(" *"),
            }
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn events_to_text(
    schema: &ContentSchema,
    spec: &WorkloadSpec,
    events: &[EventPoint],
) -> Result<String> {
    let mut out = String::from("workload v1\nkind events\n");
    out.push_str(&format!("seed {}\n", spec.seed));
    out.push_str(&format!("dist {}\n", spec.distribution.name()));
    out.push_str(&format!("schema {}\n", schema_signature(schema)));
    out.push_str(&format!("count {}\n", events.len()));
    for e in events {
        e.validate(schema)?;
        out.push('e');
        for v in &e.values {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_workload(text: &str, schema: &ContentSchema) -> Result<WorkloadFile> {
    let mut kind: Option<WorkloadKind> = None;
    let mut seed: Option<u64> = None;
    let mut dist = String::new();
    let mut count: Option<usize> = None;
    let mut subscriptions = Vec::new();
    let mut events = Vec::new();
    let mut saw_header = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let parse_err = |msg: String| HarnessError::Parse { line, msg };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if !saw_header {
            if fields != ["workload", "v1"] {
                return Err(parse_err("expected `workload v1` header".into()));
            }
            saw_header = true;
            continue;
        }
        match fields[0] {
            "kind" => {
                kind = Some(match fields.get(1) {
                    Some(&"subscriptions") => WorkloadKind::Subscriptions,
                    Some(&"events") => WorkloadKind::Events,
                    _ => return Err(parse_err("kind must be subscriptions|events".into())),
                })
            }
            "seed" => {
                seed = Some(
                    fields
                        .get(1)
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| parse_err("bad seed".into()))?,
                )
            }
            "dist" => dist = fields[1..].join(" "),
            "schema" => {
                let sig = fields[1..].join(" ");
                if sig != schema_signature(schema) {
                    return Err(HarnessError::SchemaMismatch);
                }
            }
            "count" => {
                count = Some(
                    fields
                        .get(1)
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| parse_err("bad count".into()))?,
                )
            }
            "s" => {
                if fields.len() - 1 != schema.dims().len() {
                    return Err(parse_err(format!(
                        "{} bounds for {} dimensions",
                        fields.len() - 1,
                        schema.dims().len()
                    )));
                }
                let mut predicates = Vec::new();
                for (dim, field) in schema.dims().iter().zip(&fields[1..]) {
                    if *field == "*" {
                        continue;
                    }
                    let (lo, hi) = field
                        .split_once(':')
                        .ok_or_else(|| parse_err(format!("bad bounds `{field}`")))?;
                    let lo: i64 = lo
                        .parse()
                        .map_err(|_| parse_err(format!("bad integer `{lo}`")))?;
                    let hi: i64 = hi
                        .parse()
                        .map_err(|_| parse_err(format!("bad integer `{hi}`")))?;
                    let pred = match dim.kind() {
                        DimensionKind::Range { .. } => Predicate::range(dim.name(), lo, hi),
                        DimensionKind::Set { .. } => Predicate::among(dim.name(), lo, hi),
                    };
                    predicates.push(pred);
                }
                let sub = Subscription::new(predicates);
                sub.normalize(schema)?;
                subscriptions.push(sub);
            }
            "e" => {
                let values = fields[1..]
                    .iter()
                    .map(|f| {
                        f.parse()
                            .map_err(|_| parse_err(format!("bad integer `{f}`")))
                    })
                    .collect::<Result<Vec<i64>>>()?;
                let event = EventPoint::new(values);
                event.validate(schema)?;
                events.push(event);
            }
            other => return Err(parse_err(format!("unknown directive `{other}`"))),
        }
    }
    if !saw_header {
        return Err(HarnessError::Parse {
            line: 1,
            msg: "missing `workload v1` header".into(),
        });
    }
    let kind = kind.ok_or(HarnessError::Parse {
        line: 1,
        msg: "missing `kind` line".into(),
    })?;
    let records = match kind {
        WorkloadKind::Subscriptions => subscriptions.len(),
        WorkloadKind::Events => events.len(),
    };
    if let Some(c) = count {
        if c != records {
            return Err(HarnessError::Parse {
                line: 1,
                msg: format!("count says {c}, found {records} records"),
            });
        }
    }
    Ok(WorkloadFile {
        kind,
        seed: seed.unwrap_or(0),
        dist,
        subscriptions,
        events,
    })
}

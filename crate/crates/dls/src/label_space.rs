//! Content-space partitioning and range-label encoding.
//!
//! A [`ContentSchema`] splits every attribute domain into `2^k` intervals, so
//! the full content space becomes a grid of cells. Each cell carries a
//! [`RangeLabel`]: the per-dimension interval indices concatenated into one
//! machine word, optionally prefixed by an application id. An event maps to
//! the single cell it falls in; a subscription rectangle maps to the set of
//! cells it touches (its cell-aligned minimum bounding rectangle). The
//! over-approximation can deliver events the subscription did not ask for,
//! never the other way around.

use std::fmt;

use thiserror::Error;

/// Hard ceiling on the number of labels one subscription may expand to.
///
/// A subscription wider than this is almost certainly a workload bug; the
/// expansion is `O(labels)`, so we surface it instead of stalling.
pub const DEFAULT_LABEL_SET_CAP: usize = 1 << 20;

/// Widest label we encode. One word keeps hashing and the wire form trivial.
pub const MAX_LABEL_BITS: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelSpaceError {
    #[error("dimension `{name}`: {reason}")]
    InvalidDimension { name: String, reason: String },
    #[error("schema: {0}")]
    InvalidSchema(String),
    #[error("attribute `{attr}`: predicate type does not match dimension kind")]
    TypeMismatch { attr: String },
    #[error("attribute `{attr}`: empty range after normalization")]
    EmptyRange { attr: String },
    #[error("dimension `{dim}`: value {value} outside domain")]
    OutOfDomain { dim: String, value: i64 },
    #[error("dimension {dim}: interval index {index} >= granule count {granules}")]
    IndexOverflow {
        dim: usize,
        index: u64,
        granules: u64,
    },
    #[error("label {label:#x} has bits set above bit {label_bits}")]
    MalformedLabel { label: u64, label_bits: u32 },
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("duplicate predicate for attribute `{0}`")]
    DuplicatePredicate(String),
    #[error("app id {app_id} does not fit in {bits} namespace bits")]
    AppIdOverflow { app_id: u64, bits: u32 },
    #[error("subscription expands to more than {cap} labels")]
    LabelSetOverflow { cap: usize },
    #[error("event has {got} values, schema has {want} dimensions")]
    DimensionCountMismatch { got: usize, want: usize },
    #[error("schema file, line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

type Result<T> = std::result::Result<T, LabelSpaceError>;

/// How one attribute's domain is laid out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DimensionKind {
    /// Closed integer interval `[lower, upper]`.
    Range { lower: i64, upper: i64 },
    /// Explicit list of admissible values. The list order is the index
    /// order; it does not have to be sorted.
    Set { values: Vec<i64> },
}

/// One axis of the content space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionSpec {
    name: String,
    kind: DimensionKind,
    /// Bits per interval index; the dimension is cut into `2^index_bits`
    /// granules.
    index_bits: u8,
}

impl DimensionSpec {
    pub fn range(name: impl Into<String>, lower: i64, upper: i64, index_bits: u8) -> Result<Self> {
        Self::new(
            name.into(),
            DimensionKind::Range { lower, upper },
            index_bits,
        )
    }

    pub fn set(name: impl Into<String>, values: Vec<i64>, index_bits: u8) -> Result<Self> {
        Self::new(name.into(), DimensionKind::Set { values }, index_bits)
    }

    fn new(name: String, kind: DimensionKind, index_bits: u8) -> Result<Self> {
        let err = |reason: &str| LabelSpaceError::InvalidDimension {
            name: name.clone(),
            reason: reason.to_string(),
        };
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(err("name must be non-empty and free of whitespace"));
        }
        if !(1..=32).contains(&index_bits) {
            return Err(err("index bits must be in 1..=32"));
        }
        let granules = 1u64 << index_bits;
        match &kind {
            DimensionKind::Range { lower, upper } => {
                if upper < lower {
                    return Err(err("upper bound below lower bound"));
                }
                // Width as u128: the full i64 range would overflow u64 + 1.
                let width = (*upper as i128 - *lower as i128 + 1) as u128;
                if width < granules as u128 {
                    return Err(err("domain narrower than granule count"));
                }
            }
            DimensionKind::Set { values } => {
                if values.is_empty() {
                    return Err(err("value set is empty"));
                }
                if values.len() as u64 > granules {
                    return Err(err("more values than granules"));
                }
                let mut seen = values.clone();
                seen.sort_unstable();
                if seen.windows(2).any(|w| w[0] == w[1]) {
                    return Err(err("duplicate value in set"));
                }
            }
        }
        Ok(Self {
            name,
            kind,
            index_bits,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &DimensionKind {
        &self.kind
    }

    pub fn index_bits(&self) -> u8 {
        self.index_bits
    }

    /// Granule count `g = 2^index_bits`.
    pub fn granules(&self) -> u64 {
        1u64 << self.index_bits
    }

    /// Inclusive domain width in points (range kind only).
    pub fn width(&self) -> u128 {
        match &self.kind {
            DimensionKind::Range { lower, upper } => (*upper as i128 - *lower as i128 + 1) as u128,
            DimensionKind::Set { values } => values.len() as u128,
        }
    }

    pub fn contains(&self, value: i64) -> bool {
        match &self.kind {
            DimensionKind::Range { lower, upper } => (*lower..=*upper).contains(&value),
            DimensionKind::Set { values } => values.contains(&value),
        }
    }

    /// Maps a domain value to its interval index.
    ///
    /// Range dimensions use `floor((v - lower) * g / width)` clamped to
    /// `g - 1`, which stays total when the width is not a multiple of `g`.
    /// Set dimensions return the value's position in the list.
    pub fn interval_index(&self, value: i64) -> Result<u64> {
        match &self.kind {
            DimensionKind::Range { lower, upper } => {
                if !(*lower..=*upper).contains(&value) {
                    return Err(LabelSpaceError::OutOfDomain {
                        dim: self.name.clone(),
                        value,
                    });
                }
                let offset = (value as i128 - *lower as i128) as u128;
                let idx = offset * self.granules() as u128 / self.width();
                Ok((idx as u64).min(self.granules() - 1))
            }
            DimensionKind::Set { values } => values
                .iter()
                .position(|v| *v == value)
                .map(|p| p as u64)
                .ok_or(LabelSpaceError::OutOfDomain {
                    dim: self.name.clone(),
                    value,
                }),
        }
    }

    /// Smallest domain value falling in `index` (range kind), used by tests
    /// to enumerate interval boundaries.
    pub fn interval_start(&self, index: u64) -> Option<i64> {
        match &self.kind {
            DimensionKind::Range { lower, .. } => {
                if index >= self.granules() {
                    return None;
                }
                // ceil(index * width / g) offset from lower.
                let num = index as u128 * self.width();
                let g = self.granules() as u128;
                let off = num.div_ceil(g);
                Some((*lower as i128 + off as i128) as i64)
            }
            DimensionKind::Set { .. } => None,
        }
    }
}

/// The d-dimensional attribute space plus the label layout derived from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentSchema {
    dims: Vec<DimensionSpec>,
    app_id_bits: u8,
    label_bits: u32,
}

impl ContentSchema {
    pub fn new(dims: Vec<DimensionSpec>, app_id_bits: u8) -> Result<Self> {
        if dims.is_empty() {
            return Err(LabelSpaceError::InvalidSchema(
                "at least one dimension required".into(),
            ));
        }
        let mut names: Vec<&str> = dims.iter().map(|d| d.name()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(LabelSpaceError::InvalidSchema(
                "duplicate dimension name".into(),
            ));
        }
        let label_bits = app_id_bits as u32 + dims.iter().map(|d| d.index_bits as u32).sum::<u32>();
        if label_bits > MAX_LABEL_BITS {
            return Err(LabelSpaceError::InvalidSchema(format!(
                "label needs {label_bits} bits, limit is {MAX_LABEL_BITS}"
            )));
        }
        Ok(Self {
            dims,
            app_id_bits,
            label_bits,
        })
    }

    pub fn dims(&self) -> &[DimensionSpec] {
        &self.dims
    }

    pub fn app_id_bits(&self) -> u8 {
        self.app_id_bits
    }

    /// Total significant label bits: `app_id_bits + sum(k_i)`.
    pub fn label_bits(&self) -> u32 {
        self.label_bits
    }

    /// Bytes per label on the wire.
    pub fn label_wire_width(&self) -> usize {
        self.label_bits.div_ceil(8) as usize
    }

    /// Number of distinct cells per app namespace, `prod(g_i)`.
    pub fn n_total(&self) -> u128 {
        self.dims.iter().map(|d| d.granules() as u128).product()
    }

    pub fn dim_position(&self, attr: &str) -> Option<usize> {
        self.dims.iter().position(|d| d.name() == attr)
    }

    fn check_app_id(&self, app_id: u64) -> Result<()> {
        let fits = self.app_id_bits >= 64 || app_id < (1u64 << self.app_id_bits);
        if fits {
            Ok(())
        } else {
            Err(LabelSpaceError::AppIdOverflow {
                app_id,
                bits: self.app_id_bits as u32,
            })
        }
    }

    /// Concatenates `[app_id | idx_1 | .. | idx_d]`, first dimension in the
    /// most significant position after the app id.
    pub fn encode_label(&self, app_id: u64, indices: &[u64]) -> Result<RangeLabel> {
        if indices.len() != self.dims.len() {
            return Err(LabelSpaceError::DimensionCountMismatch {
                got: indices.len(),
                want: self.dims.len(),
            });
        }
        self.check_app_id(app_id)?;
        let mut bits = app_id;
        for (pos, (dim, &idx)) in self.dims.iter().zip(indices).enumerate() {
            if idx >= dim.granules() {
                return Err(LabelSpaceError::IndexOverflow {
                    dim: pos,
                    index: idx,
                    granules: dim.granules(),
                });
            }
            bits = (bits << dim.index_bits) | idx;
        }
        Ok(RangeLabel(bits))
    }

    /// Exact inverse of [`encode_label`](Self::encode_label).
    pub fn decode_label(&self, label: RangeLabel) -> Result<(u64, Vec<u64>)> {
        if self.label_bits < 64 && label.0 >> self.label_bits != 0 {
            return Err(LabelSpaceError::MalformedLabel {
                label: label.0,
                label_bits: self.label_bits,
            });
        }
        let mut rest = label.0;
        let mut indices = vec![0u64; self.dims.len()];
        for (pos, dim) in self.dims.iter().enumerate().rev() {
            indices[pos] = rest & (dim.granules() - 1);
            rest >>= dim.index_bits;
        }
        Ok((rest, indices))
    }

    /// Reduces an event point to the label of the cell it falls in.
    pub fn event_to_label(&self, app_id: u64, event: &EventPoint) -> Result<RangeLabel> {
        if event.values.len() != self.dims.len() {
            return Err(LabelSpaceError::DimensionCountMismatch {
                got: event.values.len(),
                want: self.dims.len(),
            });
        }
        let mut indices = Vec::with_capacity(self.dims.len());
        for (dim, &v) in self.dims.iter().zip(&event.values) {
            indices.push(dim.interval_index(v)?);
        }
        self.encode_label(app_id, &indices)
    }

    /// Expands a subscription to the labels of every cell its rectangle
    /// touches, capped at [`DEFAULT_LABEL_SET_CAP`].
    ///
    /// Any event point satisfying the subscription maps into this set; the
    /// set may cover extra points (mapping false positives), never fewer.
    pub fn subscription_to_labels(&self, app_id: u64, sub: &Subscription) -> Result<LabelSet> {
        self.subscription_to_labels_with_cap(app_id, sub, DEFAULT_LABEL_SET_CAP)
    }

    pub fn subscription_to_labels_with_cap(
        &self,
        app_id: u64,
        sub: &Subscription,
        cap: usize,
    ) -> Result<LabelSet> {
        self.check_app_id(app_id)?;
        let norm = sub.normalize(self)?;
        // Per-dimension candidate index lists. Range predicates yield a
        // contiguous run; set predicates can select scattered positions.
        let mut axes: Vec<Vec<u64>> = Vec::with_capacity(self.dims.len());
        let mut size: u128 = 1;
        for (pos, dim) in self.dims.iter().enumerate() {
            let indices = match norm.rect[pos] {
                Some((low, high)) => match dim.kind() {
                    DimensionKind::Range { .. } => {
                        let lo = dim.interval_index(low)?;
                        let hi = dim.interval_index(high)?;
                        (lo..=hi).collect()
                    }
                    DimensionKind::Set { values } => {
                        let mut picked: Vec<u64> = values
                            .iter()
                            .enumerate()
                            .filter(|(_, v)| (low..=high).contains(*v))
                            .map(|(i, _)| i as u64)
                            .collect();
                        picked.sort_unstable();
                        picked
                    }
                },
                None => (0..dim.granules()).collect(),
            };
            size *= indices.len() as u128;
            if size > cap as u128 {
                return Err(LabelSpaceError::LabelSetOverflow { cap });
            }
            axes.push(indices);
        }
        // Mixed-radix walk over the cartesian product; axes are ascending,
        // so the output comes out sorted.
        let mut labels = Vec::with_capacity(size as usize);
        let mut cursor = vec![0usize; axes.len()];
        let mut current: Vec<u64> = axes.iter().map(|a| a[0]).collect();
        loop {
            labels.push(self.encode_label(app_id, &current)?);
            let mut pos = axes.len();
            loop {
                if pos == 0 {
                    return Ok(LabelSet::from_sorted(labels));
                }
                pos -= 1;
                cursor[pos] += 1;
                if cursor[pos] < axes[pos].len() {
                    current[pos] = axes[pos][cursor[pos]];
                    break;
                }
                cursor[pos] = 0;
                current[pos] = axes[pos][0];
            }
        }
    }
}

/// One atomic-subscription identifier: the packed cell coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RangeLabel(pub u64);

impl RangeLabel {
    pub fn bits(self) -> u64 {
        self.0
    }

    /// Big-endian wire form, `width` bytes.
    pub fn write_be(self, width: usize, out: &mut Vec<u8>) {
        let bytes = self.0.to_be_bytes();
        out.extend_from_slice(&bytes[8 - width..]);
    }

    pub fn read_be(bytes: &[u8]) -> Option<RangeLabel> {
        if bytes.is_empty() || bytes.len() > 8 {
            return None;
        }
        let mut buf = [0u8; 8];
        buf[8 - bytes.len()..].copy_from_slice(bytes);
        Some(RangeLabel(u64::from_be_bytes(buf)))
    }
}

impl fmt::Display for RangeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

/// A subscription's cell set, sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelSet {
    labels: Vec<RangeLabel>,
}

impl LabelSet {
    pub fn new(mut labels: Vec<RangeLabel>) -> Self {
        labels.sort_unstable();
        labels.dedup();
        Self { labels }
    }

    fn from_sorted(labels: Vec<RangeLabel>) -> Self {
        debug_assert!(labels.windows(2).all(|w| w[0] < w[1]));
        Self { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, label: RangeLabel) -> bool {
        self.labels.binary_search(&label).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = RangeLabel> + '_ {
        self.labels.iter().copied()
    }

    pub fn as_slice(&self) -> &[RangeLabel] {
        &self.labels
    }
}

impl FromIterator<RangeLabel> for LabelSet {
    fn from_iter<I: IntoIterator<Item = RangeLabel>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a LabelSet {
    type Item = RangeLabel;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, RangeLabel>>;

    fn into_iter(self) -> Self::IntoIter {
        self.labels.iter().copied()
    }
}

/// Which dimension kind a predicate is written against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredicateKind {
    Numeric,
    Discrete,
}

/// One attribute constraint: a closed value interval, possibly one-sided.
///
/// Single-sided constraints (`>= x`, `<= x`) leave the other bound `None`;
/// normalization substitutes the domain edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    pub attr: String,
    pub low: Option<i64>,
    pub high: Option<i64>,
    pub kind: PredicateKind,
}

impl Predicate {
    pub fn range(attr: impl Into<String>, low: i64, high: i64) -> Self {
        Self {
            attr: attr.into(),
            low: Some(low),
            high: Some(high),
            kind: PredicateKind::Numeric,
        }
    }

    pub fn at_least(attr: impl Into<String>, low: i64) -> Self {
        Self {
            attr: attr.into(),
            low: Some(low),
            high: None,
            kind: PredicateKind::Numeric,
        }
    }

    pub fn at_most(attr: impl Into<String>, high: i64) -> Self {
        Self {
            attr: attr.into(),
            low: None,
            high: Some(high),
            kind: PredicateKind::Numeric,
        }
    }

    /// Selects the admissible values of a set dimension that fall in
    /// `[low, high]`. Because the value list may be unordered, the selected
    /// index set is not necessarily contiguous.
    pub fn among(attr: impl Into<String>, low: i64, high: i64) -> Self {
        Self {
            attr: attr.into(),
            low: Some(low),
            high: Some(high),
            kind: PredicateKind::Discrete,
        }
    }

    pub fn equals(attr: impl Into<String>, value: i64) -> Self {
        Self {
            attr: attr.into(),
            low: Some(value),
            high: Some(value),
            kind: PredicateKind::Numeric,
        }
    }

    fn matches_kind(&self, dim: &DimensionSpec) -> bool {
        matches!(
            (self.kind, dim.kind()),
            (PredicateKind::Numeric, DimensionKind::Range { .. })
                | (PredicateKind::Discrete, DimensionKind::Set { .. })
        )
    }
}

/// Closes a predicate over its dimension: one-sided bounds get the domain
/// edge, both bounds are clamped into the domain.
pub fn normalize_predicate(pred: &Predicate, dim: &DimensionSpec) -> Result<Predicate> {
    assert_eq!(pred.attr, dim.name(), "predicate bound to wrong dimension");
    if !pred.matches_kind(dim) {
        return Err(LabelSpaceError::TypeMismatch {
            attr: pred.attr.clone(),
        });
    }
    let (dom_low, dom_high) = match dim.kind() {
        DimensionKind::Range { lower, upper } => (*lower, *upper),
        DimensionKind::Set { values } => {
            let lo = *values.iter().min().expect("non-empty set");
            let hi = *values.iter().max().expect("non-empty set");
            (lo, hi)
        }
    };
    let low = pred.low.unwrap_or(dom_low).max(dom_low);
    let high = pred.high.unwrap_or(dom_high).min(dom_high);
    if low > high {
        return Err(LabelSpaceError::EmptyRange {
            attr: pred.attr.clone(),
        });
    }
    if let DimensionKind::Set { values } = dim.kind() {
        if !values.iter().any(|v| (low..=high).contains(v)) {
            return Err(LabelSpaceError::EmptyRange {
                attr: pred.attr.clone(),
            });
        }
    }
    Ok(Predicate {
        attr: pred.attr.clone(),
        low: Some(low),
        high: Some(high),
        kind: pred.kind,
    })
}

/// A conjunction of per-attribute predicates. Dimensions without a
/// predicate are unconstrained and span their whole domain.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Subscription {
    pub predicates: Vec<Predicate>,
}

impl Subscription {
    pub fn new(predicates: Vec<Predicate>) -> Self {
        Self { predicates }
    }

    /// Per-dimension normalized bounds, `None` for unconstrained dimensions.
    pub fn normalize(&self, schema: &ContentSchema) -> Result<NormalizedSubscription> {
        let mut rect: Vec<Option<(i64, i64)>> = vec![None; schema.dims().len()];
        for pred in &self.predicates {
            let pos = schema
                .dim_position(&pred.attr)
                .ok_or_else(|| LabelSpaceError::UnknownAttribute(pred.attr.clone()))?;
            if rect[pos].is_some() {
                return Err(LabelSpaceError::DuplicatePredicate(pred.attr.clone()));
            }
            let norm = normalize_predicate(pred, &schema.dims()[pos])?;
            rect[pos] = Some((norm.low.unwrap(), norm.high.unwrap()));
        }
        Ok(NormalizedSubscription { rect })
    }

    /// Exact Boolean evaluation against an event point. This is the ground
    /// truth all mapping and filter decisions are measured against; it never
    /// touches labels.
    pub fn matches(&self, schema: &ContentSchema, event: &EventPoint) -> Result<bool> {
        Ok(self.normalize(schema)?.contains(schema, event))
    }
}

/// A subscription reduced to closed per-dimension bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedSubscription {
    /// One entry per schema dimension; `None` means full domain.
    pub rect: Vec<Option<(i64, i64)>>,
}

impl NormalizedSubscription {
    pub fn contains(&self, schema: &ContentSchema, event: &EventPoint) -> bool {
        if event.values.len() != self.rect.len() {
            return false;
        }
        for ((bounds, dim), &v) in self.rect.iter().zip(schema.dims()).zip(&event.values) {
            if !dim.contains(v) {
                return false;
            }
            if let Some((low, high)) = bounds {
                if !(*low..=*high).contains(&v) {
                    return false;
                }
            }
        }
        true
    }
}

/// One point in the content space, one value per schema dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventPoint {
    pub values: Vec<i64>,
}

impl EventPoint {
    pub fn new(values: Vec<i64>) -> Self {
        Self { values }
    }

    pub fn validate(&self, schema: &ContentSchema) -> Result<()> {
        if self.values.len() != schema.dims().len() {
            return Err(LabelSpaceError::DimensionCountMismatch {
                got: self.values.len(),
                want: schema.dims().len(),
            });
        }
        for (dim, &v) in schema.dims().iter().zip(&self.values) {
            if !dim.contains(v) {
                return Err(LabelSpaceError::OutOfDomain {
                    dim: dim.name().to_string(),
                    value: v,
                });
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Schema definition file
//
//   schema v1
//   app_id_bits 4
//   dim price range 0 1048575 bits 5
//   dim venue set 3,7,11 bits 2
//
// Blank lines and `#` comments are ignored.
// ---------------------------------------------------------------------------

pub fn parse_schema(text: &str) -> Result<ContentSchema> {
    let mut app_id_bits: u8 = 0;
    let mut dims = Vec::new();
    let mut saw_header = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let parse_err = |msg: String| LabelSpaceError::Parse { line, msg };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if !saw_header {
            if fields != ["schema", "v1"] {
                return Err(parse_err("expected `schema v1` header".into()));
            }
            saw_header = true;
            continue;
        }
        match fields[0] {
            "app_id_bits" => {
                if fields.len() != 2 {
                    return Err(parse_err("usage: app_id_bits <n>".into()));
                }
                app_id_bits = fields[1]
                    .parse()
                    .map_err(|_| parse_err(format!("bad app_id_bits `{}`", fields[1])))?;
            }
            "dim" => {
                let dim = parse_dim_line(&fields, line)?;
                dims.push(dim);
            }
            other => return Err(parse_err(format!("unknown directive `{other}`"))),
        }
    }
    if !saw_header {
        return Err(LabelSpaceError::Parse {
            line: 1,
            msg: "missing `schema v1` header".into(),
        });
    }
    ContentSchema::new(dims, app_id_bits)
}

fn parse_dim_line(fields: &[&str], line: usize) -> Result<DimensionSpec> {
    let parse_err = |msg: String| LabelSpaceError::Parse { line, msg };
    let int = |s: &str| -> Result<i64> {
        s.parse()
            .map_err(|_| parse_err(format!("bad integer `{s}`")))
    };
    match fields {
        ["dim", name, "range", lower, upper, "bits", bits] => {
            let k: u8 = bits
                .parse()
                .map_err(|_| parse_err(format!("bad bit count `{bits}`")))?;
            DimensionSpec::range(*name, int(lower)?, int(upper)?, k)
        }
        ["dim", name, "set", values, "bits", bits] => {
            let k: u8 = bits
                .parse()
                .map_err(|_| parse_err(format!("bad bit count `{bits}`")))?;
            let values = values.split(',').map(int).collect::<Result<Vec<i64>>>()?;
            DimensionSpec::set(*name, values, k)
        }
        _ => Err(parse_err(
            "usage: dim <name> range <l> <u> bits <k> | dim <name> set <v,..> bits <k>".into(),
        )),
    }
}

pub fn schema_to_text(schema: &ContentSchema) -> String {
    let mut out = String::from("schema v1\n");
    out.push_str(&format!("app_id_bits {}\n", schema.app_id_bits()));
    for dim in schema.dims() {
        match dim.kind() {
            DimensionKind::Range { lower, upper } => out.push_str(&format!(
                "dim {} range {} {} bits {}\n",
                dim.name(),
                lower,
                upper,
                dim.index_bits()
            )),
            DimensionKind::Set { values } => {
                let vals: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                out.push_str(&format!(
                    "dim {} set {} bits {}\n",
                    dim.name(),
                    vals.join(","),
                    dim.index_bits()
                ));
            }
        }
    }
    out
}

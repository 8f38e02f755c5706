//! A single broker node: per-client subscription filters, one SFF
//! (subscription filtering & forwarding table) aggregating everything known
//! here, and one ERT (event routing table) per neighbor link.
//!
//! Subscription handling is label-at-a-time: store into the origin's table,
//! forward only labels the SFF has never seen, then count them into the SFF.
//! Every arrival counts, whether it came from a client or a neighbor link,
//! so the SFF count of a label is the number of active insertions here and
//! an unsubscription is forwarded exactly when the count drops from one.
//! Event matching is a fixed number of filter queries, one per connection,
//! regardless of how many subscriptions are stored.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::cbf::{CbfParams, CountingBloomFilter};
use crate::label_space::{LabelSet, RangeLabel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BrokerError {
    #[error("unknown connection {0}")]
    UnknownConnection(ConnectionId),
    #[error("connection {0} still holds subscriptions")]
    NonEmptyTable(ConnectionId),
    #[error(transparent)]
    Cbf(#[from] crate::cbf::CbfError),
}

type Result<T> = std::result::Result<T, BrokerError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConnKind {
    Client,
    BrokerLink,
}

/// Dense per-kind connection handle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConnectionId {
    pub kind: ConnKind,
    pub index: u32,
}

impl ConnectionId {
    pub fn client(index: u32) -> Self {
        Self {
            kind: ConnKind::Client,
            index,
        }
    }

    pub fn link(index: u32) -> Self {
        Self {
            kind: ConnKind::BrokerLink,
            index,
        }
    }

    pub fn is_client(self) -> bool {
        self.kind == ConnKind::Client
    }
}

impl fmt::Display for ConnectionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ConnKind::Client => write!(f, "client#{}", self.index),
            ConnKind::BrokerLink => write!(f, "link#{}", self.index),
        }
    }
}

/// Message payloads a broker handles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BrokerMsg {
    Subscribe(LabelSet),
    Unsubscribe(LabelSet),
    /// An event is exactly one label.
    Publish(RangeLabel),
}

/// Operation counters used by tests and benchmarks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BrokerCounters {
    /// Filter operations (query/add/delete) spent in on_subscribe.
    pub subscribe_filter_ops: u64,
    /// Labels processed by on_subscribe.
    pub subscribe_labels: u64,
    /// Filter queries spent in match_event.
    pub match_filter_queries: u64,
    pub match_calls: u64,
    pub forced_detaches: u64,
}

#[derive(Debug, Clone)]
pub struct Broker {
    params: CbfParams,
    sff: CountingBloomFilter,
    clients: BTreeMap<u32, CountingBloomFilter>,
    erts: BTreeMap<u32, CountingBloomFilter>,
    next_client: u32,
    next_link: u32,
    counters: BrokerCounters,
}

impl Broker {
    pub fn new(params: CbfParams) -> Result<Self> {
        Ok(Self {
            params,
            sff: CountingBloomFilter::new(params)?,
            clients: BTreeMap::new(),
            erts: BTreeMap::new(),
            next_client: 0,
            next_link: 0,
            counters: BrokerCounters::default(),
        })
    }

    pub fn params(&self) -> &CbfParams {
        &self.params
    }

    pub fn sff(&self) -> &CountingBloomFilter {
        &self.sff
    }

    pub fn client_table(&self, id: ConnectionId) -> Option<&CountingBloomFilter> {
        match id.kind {
            ConnKind::Client => self.clients.get(&id.index),
            ConnKind::BrokerLink => None,
        }
    }

    pub fn ert(&self, id: ConnectionId) -> Option<&CountingBloomFilter> {
        match id.kind {
            ConnKind::BrokerLink => self.erts.get(&id.index),
            ConnKind::Client => None,
        }
    }

    pub fn counters(&self) -> BrokerCounters {
        self.counters
    }

    pub fn client_count(&self) -> usize {
        self.clients.len()
    }

    pub fn link_count(&self) -> usize {
        self.erts.len()
    }

    /// Creates a fresh zeroed table for a new connection.
    pub fn attach(&mut self, kind: ConnKind) -> Result<ConnectionId> {
        let filter = CountingBloomFilter::new(self.params)?;
        Ok(match kind {
            ConnKind::Client => {
                let id = self.next_client;
                self.next_client += 1;
                self.clients.insert(id, filter);
                ConnectionId::client(id)
            }
            ConnKind::BrokerLink => {
                let id = self.next_link;
                self.next_link += 1;
                self.erts.insert(id, filter);
                ConnectionId::link(id)
            }
        })
    }

    /// Drops a connection's table. Without `force` the table must be empty.
    /// A forced detach leaves the connection's labels counted in the SFF;
    /// the leak is recorded rather than guessed away.
    pub fn detach(&mut self, id: ConnectionId, force: bool) -> Result<()> {
        let table = match id.kind {
            ConnKind::Client => self.clients.get(&id.index),
            ConnKind::BrokerLink => self.erts.get(&id.index),
        }
        .ok_or(BrokerError::UnknownConnection(id))?;
        if !table.is_empty() {
            if !force {
                return Err(BrokerError::NonEmptyTable(id));
            }
            self.counters.forced_detaches += 1;
        }
        match id.kind {
            ConnKind::Client => self.clients.remove(&id.index),
            ConnKind::BrokerLink => self.erts.remove(&id.index),
        };
        Ok(())
    }

    fn table_mut(&mut self, id: ConnectionId) -> Result<&mut CountingBloomFilter> {
        match id.kind {
            ConnKind::Client => self.clients.get_mut(&id.index),
            ConnKind::BrokerLink => self.erts.get_mut(&id.index),
        }
        .ok_or(BrokerError::UnknownConnection(id))
    }

    /// Stores a subscription and returns the labels new to this broker,
    /// destined for every neighbor link.
    ///
    /// Per label this spends at most three filter operations: one add into
    /// the origin's table, one SFF query, and at most one SFF add.
    pub fn on_subscribe(
        &mut self,
        origin: ConnectionId,
        labels: &LabelSet,
    ) -> Result<Vec<RangeLabel>> {
        self.table_mut(origin)?; // validate before touching state
        let mut forwarding = Vec::new();
        for label in labels {
            self.table_mut(origin).unwrap().add(label);
            if self.sff.query(label) == 0 {
                forwarding.push(label);
            }
            self.sff.add(label);
            self.counters.subscribe_filter_ops += 3;
            self.counters.subscribe_labels += 1;
        }
        Ok(forwarding)
    }

    /// Removes a subscription and returns the labels whose last reference
    /// just left this broker, destined for every neighbor link.
    pub fn on_unsubscribe(
        &mut self,
        origin: ConnectionId,
        labels: &LabelSet,
    ) -> Result<Vec<RangeLabel>> {
        self.table_mut(origin)?;
        let mut forwarding = Vec::new();
        for label in labels {
            let count = self.sff.query(label);
            if count == 1 {
                forwarding.push(label);
            }
            if count != 0 {
                self.sff.delete(label);
            }
            let table = self.table_mut(origin).unwrap();
            if table.query(label) != 0 {
                table.delete(label);
            }
        }
        Ok(forwarding)
    }

    /// Routes one event: every link whose ERT may hold the label, plus every
    /// client (other than a publishing client) whose table may hold it. The
    /// link the event arrived over is never a destination.
    ///
    /// Query cost is `link_count + client_count - (origin is a client)`,
    /// independent of stored subscription volume.
    pub fn match_event(
        &mut self,
        origin: ConnectionId,
        label: RangeLabel,
    ) -> Result<Vec<ConnectionId>> {
        let known = match origin.kind {
            ConnKind::Client => self.clients.contains_key(&origin.index),
            ConnKind::BrokerLink => self.erts.contains_key(&origin.index),
        };
        if !known {
            return Err(BrokerError::UnknownConnection(origin));
        }
        let mut destinations = Vec::with_capacity(self.erts.len() + self.clients.len());
        for (&idx, ert) in &self.erts {
            self.counters.match_filter_queries += 1;
            if ert.query(label) >= 1 && origin != ConnectionId::link(idx) {
                destinations.push(ConnectionId::link(idx));
            }
        }
        for (&idx, table) in &self.clients {
            if origin == ConnectionId::client(idx) {
                continue;
            }
            self.counters.match_filter_queries += 1;
            if table.query(label) >= 1 {
                destinations.push(ConnectionId::client(idx));
            }
        }
        self.counters.match_calls += 1;
        Ok(destinations)
    }

    /// Saturation events summed over the SFF and every connection table.
    pub fn saturation_events(&self) -> u64 {
        self.sff.saturation_events()
            + self
                .clients
                .values()
                .map(|f| f.saturation_events())
                .sum::<u64>()
            + self
                .erts
                .values()
                .map(|f| f.saturation_events())
                .sum::<u64>()
    }

    pub fn underflow_events(&self) -> u64 {
        self.sff.underflow_events()
            + self
                .clients
                .values()
                .map(|f| f.underflow_events())
                .sum::<u64>()
            + self
                .erts
                .values()
                .map(|f| f.underflow_events())
                .sum::<u64>()
    }
}

// ---------------------------------------------------------------------------
// Wire format: 1-byte kind, 4-byte big-endian label count (always 1 for
// publish), then fixed-width big-endian labels of ceil(label_bits/8) bytes.
// ---------------------------------------------------------------------------

pub const WIRE_KIND_SUBSCRIBE: u8 = 0x01;
pub const WIRE_KIND_UNSUBSCRIBE: u8 = 0x02;
pub const WIRE_KIND_PUBLISH: u8 = 0x03;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WireError {
    #[error("message truncated: need {need} bytes, have {have}")]
    Truncated { need: usize, have: usize },
    #[error("unknown message kind {0:#04x}")]
    UnknownKind(u8),
    #[error("publish must carry exactly one label, count says {0}")]
    BadPublishCount(u32),
    #[error("{0} trailing bytes after message body")]
    TrailingBytes(usize),
    #[error("label {label:#x} has bits set above bit {label_bits}")]
    MalformedLabel { label: u64, label_bits: u32 },
    #[error("label width {0} bits is out of range")]
    BadLabelWidth(u32),
}

fn label_width_bytes(label_bits: u32) -> std::result::Result<usize, WireError> {
    if label_bits == 0 || label_bits > 64 {
        return Err(WireError::BadLabelWidth(label_bits));
    }
    Ok(label_bits.div_ceil(8) as usize)
}

pub fn encode_message(msg: &BrokerMsg, label_bits: u32) -> std::result::Result<Vec<u8>, WireError> {
    let width = label_width_bytes(label_bits)?;
    let (kind, labels): (u8, Vec<RangeLabel>) = match msg {
        BrokerMsg::Subscribe(set) => (WIRE_KIND_SUBSCRIBE, set.iter().collect()),
        BrokerMsg::Unsubscribe(set) => (WIRE_KIND_UNSUBSCRIBE, set.iter().collect()),
        BrokerMsg::Publish(label) => (WIRE_KIND_PUBLISH, vec![*label]),
    };
    let mut out = Vec::with_capacity(5 + labels.len() * width);
    out.push(kind);
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    for label in labels {
        label.write_be(width, &mut out);
    }
    Ok(out)
}

pub fn decode_message(bytes: &[u8], label_bits: u32) -> std::result::Result<BrokerMsg, WireError> {
    let width = label_width_bytes(label_bits)?;
    if bytes.len() < 5 {
        return Err(WireError::Truncated {
            need: 5,
            have: bytes.len(),
        });
    }
    let kind = bytes[0];
    let count = u32::from_be_bytes(bytes[1..5].try_into().unwrap());
    if kind == WIRE_KIND_PUBLISH && count != 1 {
        return Err(WireError::BadPublishCount(count));
    }
    let need = 5usize.saturating_add((count as usize).saturating_mul(width));
    if bytes.len() < need {
        return Err(WireError::Truncated {
            need,
            have: bytes.len(),
        });
    }
    if bytes.len() > need {
        return Err(WireError::TrailingBytes(bytes.len() - need));
    }
    let mut labels = Vec::with_capacity(count as usize);
    for i in 0..count as usize {
        let at = 5 + i * width;
        let label = RangeLabel::read_be(&bytes[at..at + width]).expect("width checked");
        if label_bits < 64 && label.0 >> label_bits != 0 {
            return Err(WireError::MalformedLabel {
                label: label.0,
                label_bits,
            });
        }
        labels.push(label);
    }
    Ok(match kind {
        WIRE_KIND_SUBSCRIBE => BrokerMsg::Subscribe(LabelSet::new(labels)),
        WIRE_KIND_UNSUBSCRIBE => BrokerMsg::Unsubscribe(LabelSet::new(labels)),
        WIRE_KIND_PUBLISH => BrokerMsg::Publish(labels[0]),
        other => return Err(WireError::UnknownKind(other)),
    })
}

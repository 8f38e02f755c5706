//! Deterministic simulator for a tree of brokers with attached clients.
//!
//! Messages move over per-link FIFO queues drained one at a time, so a run
//! is a pure function of (topology, injected workload). Subscriptions fan
//! out to every link of a broker, including the one they arrived over; the
//! echo is absorbed by aggregation after one hop and keeps the nonzero
//! positions of every event routing table aligned with the neighbor's SFF.
//! That alignment is what turns subscription-side filter collisions into
//! event-side false positives instead of lost deliveries. The flip side is
//! that the echo inflates the home broker's label count, so unsubscriptions
//! stop at the client table and links keep a stale over-approximation:
//! deliveries can only ever err toward extra, never toward lost.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use thiserror::Error;

use crate::broker::{Broker, BrokerMsg, ConnKind, ConnectionId};
use crate::cbf::CbfParams;
use crate::label_space::{ContentSchema, EventPoint, LabelSet, RangeLabel, Subscription};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OverlayError {
    #[error("topology contains a cycle")]
    CyclicTopology,
    #[error("topology is not connected")]
    DisconnectedTopology,
    #[error("broker `{broker}` overrides the network-wide filter parameters")]
    ParamsMismatch { broker: String },
    #[error("unknown client `{0}`")]
    UnknownClient(String),
    #[error("unknown broker `{0}`")]
    UnknownBroker(String),
    #[error("duplicate broker `{0}`")]
    DuplicateBroker(String),
    #[error("duplicate client `{0}`")]
    DuplicateClient(String),
    #[error("{0} events supplied for {1} recorded publishes")]
    TraceMismatch(usize, usize),
    #[error("topology file, line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Broker(#[from] crate::broker::BrokerError),
    #[error(transparent)]
    Cbf(#[from] crate::cbf::CbfError),
    #[error(transparent)]
    LabelSpace(#[from] crate::label_space::LabelSpaceError),
}

type Result<T> = std::result::Result<T, OverlayError>;

/// Static description of the broker graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub brokers: Vec<String>,
    /// Undirected broker pairs; must form a tree.
    pub links: Vec<(String, String)>,
    /// Client name to home broker.
    pub clients: BTreeMap<String, String>,
    pub params: CbfParams,
    /// Per-broker parameter overrides. Valid topologies have none; the
    /// negative-control path builds them anyway to demonstrate what breaks.
    pub overrides: BTreeMap<String, CbfParams>,
}

impl Topology {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let mut names = BTreeSet::new();
        for b in &self.brokers {
            if !names.insert(b.clone()) {
                return Err(OverlayError::DuplicateBroker(b.clone()));
            }
        }
        let index: BTreeMap<&str, usize> = self
            .brokers
            .iter()
            .enumerate()
            .map(|(i, b)| (b.as_str(), i))
            .collect();
        let mut seen_links = BTreeSet::new();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.brokers.len()];
        for (a, b) in &self.links {
            let ia = *index
                .get(a.as_str())
                .ok_or_else(|| OverlayError::UnknownBroker(a.clone()))?;
            let ib = *index
                .get(b.as_str())
                .ok_or_else(|| OverlayError::UnknownBroker(b.clone()))?;
            if ia == ib || !seen_links.insert((ia.min(ib), ia.max(ib))) {
                return Err(OverlayError::CyclicTopology);
            }
            adj[ia].push(ib);
            adj[ib].push(ia);
        }
        if self.links.len() + 1 > self.brokers.len() {
            return Err(OverlayError::CyclicTopology);
        }
        if self.links.len() + 1 < self.brokers.len() {
            return Err(OverlayError::DisconnectedTopology);
        }
        // |links| == |brokers| - 1 and no duplicate edges: connected iff
        // acyclic; a BFS settles both.
        if !self.brokers.is_empty() {
            let mut seen = vec![false; self.brokers.len()];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(at) = queue.pop_front() {
                for &next in &adj[at] {
                    if !seen[next] {
                        seen[next] = true;
                        queue.push_back(next);
                    }
                }
            }
            if seen.iter().any(|s| !s) {
                return Err(OverlayError::DisconnectedTopology);
            }
        }
        for (client, home) in &self.clients {
            if !index.contains_key(home.as_str()) {
                return Err(OverlayError::UnknownBroker(home.clone()));
            }
            if self.brokers.contains(client) {
                return Err(OverlayError::DuplicateClient(client.clone()));
            }
        }
        for b in self.overrides.keys() {
            if !index.contains_key(b.as_str()) {
                return Err(OverlayError::UnknownBroker(b.clone()));
            }
        }
        Ok(())
    }
}

/// Delivery record for one published event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub label: RangeLabel,
    pub publisher: String,
    pub delivered: BTreeSet<String>,
    /// Brokers the event visited, with the neighbors each one forwarded to.
    pub hops: Vec<(String, Vec<String>)>,
}

pub fn render_trace(record: &TraceRecord) -> String {
    let delivered = if record.delivered.is_empty() {
        "-".to_string()
    } else {
        record
            .delivered
            .iter()
            .cloned()
            .collect::<Vec<_>>()
            .join(",")
    };
    format!("{:x} {} {}", record.label.0, record.publisher, delivered)
}

/// Counters collected while draining the queue.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimMetrics {
    /// Subscription labels sent over each directed link.
    pub forwarded_subscription_labels: BTreeMap<(String, String), u64>,
    pub forwarded_unsubscription_labels: BTreeMap<(String, String), u64>,
    /// Distinct labels that ever entered any forwarding set.
    pub distinct_forwarded_labels: u64,
    pub deliveries: u64,
    pub subscribe_steps: u64,
    pub unsubscribe_steps: u64,
    pub publish_steps: u64,
}

impl SimMetrics {
    fn minus(&self, before: &SimMetrics) -> SimMetrics {
        let map_delta = |after: &BTreeMap<(String, String), u64>,
                         before: &BTreeMap<(String, String), u64>| {
            after
                .iter()
                .filter_map(|(k, v)| {
                    let prev = before.get(k).copied().unwrap_or(0);
                    (*v > prev).then(|| (k.clone(), v - prev))
                })
                .collect()
        };
        SimMetrics {
            forwarded_subscription_labels: map_delta(
                &self.forwarded_subscription_labels,
                &before.forwarded_subscription_labels,
            ),
            forwarded_unsubscription_labels: map_delta(
                &self.forwarded_unsubscription_labels,
                &before.forwarded_unsubscription_labels,
            ),
            distinct_forwarded_labels: self.distinct_forwarded_labels
                - before.distinct_forwarded_labels,
            deliveries: self.deliveries - before.deliveries,
            subscribe_steps: self.subscribe_steps - before.subscribe_steps,
            unsubscribe_steps: self.unsubscribe_steps - before.unsubscribe_steps,
            publish_steps: self.publish_steps - before.publish_steps,
        }
    }
}

#[derive(Debug, Clone)]
enum EnvOrigin {
    Client(ConnectionId),
    Link { from: usize },
}

#[derive(Debug, Clone)]
enum SimMsg {
    Sub(LabelSet),
    Unsub(LabelSet),
    Pub { label: RangeLabel, trace: usize },
}

#[derive(Debug, Clone)]
struct Envelope {
    to: usize,
    origin: EnvOrigin,
    msg: SimMsg,
}

/// A built network ready to take injected traffic.
#[derive(Debug)]
pub struct SimState {
    broker_names: Vec<String>,
    broker_index: BTreeMap<String, usize>,
    brokers: Vec<Broker>,
    /// Per broker: neighbor index -> link connection at this broker.
    link_conns: Vec<BTreeMap<usize, ConnectionId>>,
    /// Per broker: link connection index -> neighbor.
    link_peers: Vec<BTreeMap<u32, usize>>,
    /// Per broker: client connection index -> client name.
    client_names: Vec<BTreeMap<u32, String>>,
    clients: BTreeMap<String, (usize, ConnectionId)>,
    queue: VecDeque<Envelope>,
    metrics: SimMetrics,
    distinct_forwarded: HashSet<RangeLabel>,
    traces: Vec<TraceRecord>,
}

/// Builds the network, enforcing identical filter parameters everywhere.
pub fn build(topology: &Topology) -> Result<SimState> {
    topology.validate()?;
    for (name, over) in &topology.overrides {
        if over != &topology.params {
            return Err(OverlayError::ParamsMismatch {
                broker: name.clone(),
            });
        }
    }
    build_inner(topology)
}

/// Builds the network applying parameter overrides verbatim. Exists so the
/// negative control can show mismatched filters losing events.
pub fn build_unchecked(topology: &Topology) -> Result<SimState> {
    topology.validate()?;
    build_inner(topology)
}

fn build_inner(topology: &Topology) -> Result<SimState> {
    let broker_index: BTreeMap<String, usize> = topology
        .brokers
        .iter()
        .enumerate()
        .map(|(i, b)| (b.clone(), i))
        .collect();
    let mut brokers = Vec::with_capacity(topology.brokers.len());
    for name in &topology.brokers {
        let params = topology.overrides.get(name).unwrap_or(&topology.params);
        brokers.push(Broker::new(*params)?);
    }
    let n = brokers.len();
    let mut link_conns = vec![BTreeMap::new(); n];
    let mut link_peers = vec![BTreeMap::new(); n];
    for (a, b) in &topology.links {
        let ia = broker_index[a];
        let ib = broker_index[b];
        let ca = brokers[ia].attach(ConnKind::BrokerLink)?;
        let cb = brokers[ib].attach(ConnKind::BrokerLink)?;
        link_conns[ia].insert(ib, ca);
        link_conns[ib].insert(ia, cb);
        link_peers[ia].insert(ca.index, ib);
        link_peers[ib].insert(cb.index, ia);
    }
    let mut client_names = vec![BTreeMap::new(); n];
    let mut clients = BTreeMap::new();
    for (client, home) in &topology.clients {
        let at = broker_index[home];
        let conn = brokers[at].attach(ConnKind::Client)?;
        client_names[at].insert(conn.index, client.clone());
        clients.insert(client.clone(), (at, conn));
    }
    Ok(SimState {
        broker_names: topology.brokers.clone(),
        broker_index,
        brokers,
        link_conns,
        link_peers,
        client_names,
        clients,
        queue: VecDeque::new(),
        metrics: SimMetrics::default(),
        distinct_forwarded: HashSet::new(),
        traces: Vec::new(),
    })
}

impl SimState {
    pub fn broker(&self, name: &str) -> Option<&Broker> {
        self.broker_index.get(name).map(|&i| &self.brokers[i])
    }

    /// The event routing table at `broker` for the link toward `neighbor`.
    pub fn ert_toward(
        &self,
        broker: &str,
        neighbor: &str,
    ) -> Option<&crate::cbf::CountingBloomFilter> {
        let at = *self.broker_index.get(broker)?;
        let peer = *self.broker_index.get(neighbor)?;
        let conn = self.link_conns[at].get(&peer)?;
        self.brokers[at].ert(*conn)
    }

    pub fn traces(&self) -> &[TraceRecord] {
        &self.traces
    }

    pub fn metrics(&self) -> &SimMetrics {
        &self.metrics
    }

    pub fn saturation_events(&self) -> u64 {
        self.brokers.iter().map(|b| b.saturation_events()).sum()
    }

    pub fn underflow_events(&self) -> u64 {
        self.brokers.iter().map(|b| b.underflow_events()).sum()
    }

    /// Queues one client message; call [`run_to_quiescence`](Self::run_to_quiescence)
    /// to process it.
    pub fn inject(&mut self, client: &str, msg: BrokerMsg) -> Result<()> {
        let (at, conn) = *self
            .clients
            .get(client)
            .ok_or_else(|| OverlayError::UnknownClient(client.to_string()))?;
        let sim_msg = match msg {
            BrokerMsg::Subscribe(labels) => SimMsg::Sub(labels),
            BrokerMsg::Unsubscribe(labels) => SimMsg::Unsub(labels),
            BrokerMsg::Publish(label) => {
                self.traces.push(TraceRecord {
                    label,
                    publisher: client.to_string(),
                    delivered: BTreeSet::new(),
                    hops: Vec::new(),
                });
                SimMsg::Pub {
                    label,
                    trace: self.traces.len() - 1,
                }
            }
        };
        self.queue.push_back(Envelope {
            to: at,
            origin: EnvOrigin::Client(conn),
            msg: sim_msg,
        });
        Ok(())
    }

    /// Drains the message queue in FIFO order and reports what this drain
    /// added to the metrics.
    pub fn run_to_quiescence(&mut self) -> Result<SimMetrics> {
        let before = self.metrics.clone();
        while let Some(env) = self.queue.pop_front() {
            self.step(env)?;
        }
        Ok(self.metrics.minus(&before))
    }

    fn step(&mut self, env: Envelope) -> Result<()> {
        let at = env.to;
        let origin = match env.origin {
            EnvOrigin::Client(conn) => conn,
            EnvOrigin::Link { from } => *self.link_conns[at]
                .get(&from)
                .expect("link origin resolved at enqueue time"),
        };
        match env.msg {
            SimMsg::Sub(labels) => {
                self.metrics.subscribe_steps += 1;
                let fwd = self.brokers[at].on_subscribe(origin, &labels)?;
                self.fan_out(at, fwd, true);
            }
            SimMsg::Unsub(labels) => {
                self.metrics.unsubscribe_steps += 1;
                let fwd = self.brokers[at].on_unsubscribe(origin, &labels)?;
                self.fan_out(at, fwd, false);
            }
            SimMsg::Pub { label, trace } => {
                self.metrics.publish_steps += 1;
                let dests = self.brokers[at].match_event(origin, label)?;
                let mut forwarded_to = Vec::new();
                for dest in dests {
                    match dest.kind {
                        ConnKind::Client => {
                            let name = self.client_names[at]
                                .get(&dest.index)
                                .expect("client table and names stay in sync");
                            if self.traces[trace].delivered.insert(name.clone()) {
                                self.metrics.deliveries += 1;
                            }
                        }
                        ConnKind::BrokerLink => {
                            let peer = self.link_peers[at][&dest.index];
                            forwarded_to.push(self.broker_names[peer].clone());
                            self.queue.push_back(Envelope {
                                to: peer,
                                origin: EnvOrigin::Link { from: at },
                                msg: SimMsg::Pub { label, trace },
                            });
                        }
                    }
                }
                self.traces[trace]
                    .hops
                    .push((self.broker_names[at].clone(), forwarded_to));
            }
        }
        Ok(())
    }

    /// Sends forwarding labels out over every link of `at`, the arrival
    /// link included. Aggregation stops the echo at the neighbor, and the
    /// echo entry is exactly what keeps the neighbor's routing table
    /// position-aligned with this broker's SFF.
    fn fan_out(&mut self, at: usize, labels: Vec<RangeLabel>, subscribe: bool) {
        if labels.is_empty() {
            return;
        }
        self.distinct_forwarded.extend(labels.iter().copied());
        self.metrics.distinct_forwarded_labels = self.distinct_forwarded.len() as u64;
        let set = LabelSet::new(labels);
        let from_name = self.broker_names[at].clone();
        let peers: Vec<usize> = self.link_conns[at].keys().copied().collect();
        for peer in peers {
            let key = (from_name.clone(), self.broker_names[peer].clone());
            let book = if subscribe {
                &mut self.metrics.forwarded_subscription_labels
            } else {
                &mut self.metrics.forwarded_unsubscription_labels
            };
            *book.entry(key).or_insert(0) += set.len() as u64;
            self.queue.push_back(Envelope {
                to: peer,
                origin: EnvOrigin::Link { from: at },
                msg: if subscribe {
                    SimMsg::Sub(set.clone())
                } else {
                    SimMsg::Unsub(set.clone())
                },
            });
        }
    }
}

/// End-to-end delivery audit against the exact Boolean oracle.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EndToEndReport {
    /// Clients whose subscription truly matched but who never got the event.
    pub false_negatives: u64,
    /// Deliveries the cell over-approximation asked for but the predicate
    /// rejects.
    pub mapping_fps: u64,
    /// Deliveries even the label sets reject; pure filter collisions.
    pub cbf_fps: u64,
    pub true_deliveries: u64,
    pub deliveries: u64,
    pub events: u64,
    pub saturation_events: u64,
    pub underflow_events: u64,
}

/// Maps a Boolean workload onto the network: subscribes every client's
/// subscriptions, quiesces, then publishes every event from its publisher
/// and quiesces again. Leaves the state ready for [`end_to_end_check`].
pub fn inject_workload(
    state: &mut SimState,
    schema: &ContentSchema,
    app_id: u64,
    subscriptions_by_client: &BTreeMap<String, Vec<Subscription>>,
    events: &[(String, EventPoint)],
) -> Result<()> {
    for (client, subs) in subscriptions_by_client {
        for sub in subs {
            let labels = schema.subscription_to_labels(app_id, sub)?;
            state.inject(client, BrokerMsg::Subscribe(labels))?;
        }
    }
    state.run_to_quiescence()?;
    for (publisher, event) in events {
        let label = schema.event_to_label(app_id, event)?;
        state.inject(publisher, BrokerMsg::Publish(label))?;
    }
    state.run_to_quiescence()?;
    Ok(())
}

/// Compares each recorded delivery set against two oracles: exact Boolean
/// matching (ground truth) and label-set membership (mapping truth). Events
/// must be the publishes injected, in order.
pub fn end_to_end_check(
    state: &SimState,
    schema: &ContentSchema,
    app_id: u64,
    subscriptions_by_client: &BTreeMap<String, Vec<Subscription>>,
    events: &[(String, EventPoint)],
) -> Result<EndToEndReport> {
    if events.len() != state.traces.len() {
        return Err(OverlayError::TraceMismatch(
            events.len(),
            state.traces.len(),
        ));
    }
    // Normalize once; keep the label set as a hash set for O(1) membership.
    let mut normalized: BTreeMap<
        &str,
        Vec<(crate::label_space::NormalizedSubscription, HashSet<u64>)>,
    > = BTreeMap::new();
    for (client, subs) in subscriptions_by_client {
        let mut entry = Vec::with_capacity(subs.len());
        for sub in subs {
            let norm = sub.normalize(schema)?;
            let labels: HashSet<u64> = schema
                .subscription_to_labels(app_id, sub)?
                .iter()
                .map(|l| l.0)
                .collect();
            entry.push((norm, labels));
        }
        normalized.insert(client.as_str(), entry);
    }

    let mut report = EndToEndReport {
        events: events.len() as u64,
        saturation_events: state.saturation_events(),
        underflow_events: state.underflow_events(),
        ..EndToEndReport::default()
    };
    for ((publisher, event), trace) in events.iter().zip(&state.traces) {
        let label = schema.event_to_label(app_id, event)?;
        debug_assert_eq!(label, trace.label);
        for (client, subs) in &normalized {
            if client == publisher {
                // A publisher is never its own destination.
                continue;
            }
            let truth = subs.iter().any(|(norm, _)| norm.contains(schema, event));
            let delivered = trace.delivered.contains(*client);
            report.deliveries += delivered as u64;
            match (delivered, truth) {
                (false, true) => report.false_negatives += 1,
                (true, true) => report.true_deliveries += 1,
                (true, false) => {
                    if subs.iter().any(|(_, labels)| labels.contains(&label.0)) {
                        report.mapping_fps += 1;
                    } else {
                        report.cbf_fps += 1;
                    }
                }
                (false, false) => {}
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Topology file
//
//   topology v1
//   params m 16384 k 4 counter_bits 4 seed_a 1 seed_b 2
//   broker b1
//   broker b2
//   link b1 b2
//   client alice b1
//   override b2 m 16384 k 4 counter_bits 4 seed_a 9 seed_b 9
// ---------------------------------------------------------------------------

pub fn parse_topology(text: &str) -> Result<Topology> {
    let mut brokers = Vec::new();
    let mut links = Vec::new();
    let mut clients = BTreeMap::new();
    let mut overrides = BTreeMap::new();
    let mut params: Option<CbfParams> = None;
    let mut saw_header = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let parse_err = |msg: String| OverlayError::Parse { line, msg };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if !saw_header {
            if fields != ["topology", "v1"] {
                return Err(parse_err("expected `topology v1` header".into()));
            }
            saw_header = true;
            continue;
        }
        match fields[0] {
            "params" => params = Some(parse_params(&fields[1..], line)?),
            "broker" => match fields[..] {
                [_, name] => brokers.push(name.to_string()),
                _ => return Err(parse_err("usage: broker <name>".into())),
            },
            "link" => match fields[..] {
                [_, a, b] => links.push((a.to_string(), b.to_string())),
                _ => return Err(parse_err("usage: link <a> <b>".into())),
            },
            "client" => match fields[..] {
                [_, name, home] => {
                    if clients.insert(name.to_string(), home.to_string()).is_some() {
                        return Err(OverlayError::DuplicateClient(name.to_string()));
                    }
                }
                _ => return Err(parse_err("usage: client <name> <broker>".into())),
            },
            "override" => {
                if fields.len() < 2 {
                    return Err(parse_err("usage: override <broker> <params...>".into()));
                }
                let over = parse_params(&fields[2..], line)?;
                overrides.insert(fields[1].to_string(), over);
            }
            other => return Err(parse_err(format!("unknown directive `{other}`"))),
        }
    }
    if !saw_header {
        return Err(OverlayError::Parse {
            line: 1,
            msg: "missing `topology v1` header".into(),
        });
    }
    let params = params.ok_or(OverlayError::Parse {
        line: 1,
        msg: "missing `params` line".into(),
    })?;
    let topology = Topology {
        brokers,
        links,
        clients,
        params,
        overrides,
    };
    topology.validate()?;
    Ok(topology)
}

fn parse_params(fields: &[&str], line: usize) -> Result<CbfParams> {
    let parse_err = |msg: String| OverlayError::Parse { line, msg };
    if fields.len() != 10 {
        return Err(parse_err(
            "usage: m <m> k <k> counter_bits <b> seed_a <a> seed_b <b>".into(),
        ));
    }
    let mut m = None;
    let mut k = None;
    let mut counter_bits = None;
    let mut seed_a = None;
    let mut seed_b = None;
    for pair in fields.chunks(2) {
        let value = pair[1];
        let int = |s: &str| -> Result<u64> {
            s.parse()
                .map_err(|_| parse_err(format!("bad integer `{s}`")))
        };
        match pair[0] {
            "m" => m = Some(int(value)?),
            "k" => k = Some(int(value)? as u32),
            "counter_bits" => counter_bits = Some(int(value)? as u8),
            "seed_a" => seed_a = Some(int(value)?),
            "seed_b" => seed_b = Some(int(value)?),
            other => return Err(parse_err(format!("unknown parameter `{other}`"))),
        }
    }
    match (m, k, counter_bits, seed_a, seed_b) {
        (Some(m), Some(k), Some(cb), Some(sa), Some(sb)) => {
            CbfParams::new(m, k, cb, sa, sb).map_err(OverlayError::Cbf)
        }
        _ => Err(parse_err("missing parameter field".into())),
    }
}

pub fn topology_to_text(topology: &Topology) -> String {
    let p = &topology.params;
    let mut out = String::from("topology v1\n");
    out.push_str(&format!(
        "params m {} k {} counter_bits {} seed_a {} seed_b {}\n",
        p.m, p.k_h, p.counter_bits, p.seed_a, p.seed_b
    ));
    for b in &topology.brokers {
        out.push_str(&format!("broker {b}\n"));
    }
    for (a, b) in &topology.links {
        out.push_str(&format!("link {a} {b}\n"));
    }
    for (c, h) in &topology.clients {
        out.push_str(&format!("client {c} {h}\n"));
    }
    for (b, p) in &topology.overrides {
        out.push_str(&format!(
            "override {b} m {} k {} counter_bits {} seed_a {} seed_b {}\n",
            p.m, p.k_h, p.counter_bits, p.seed_a, p.seed_b
        ));
    }
    out
}

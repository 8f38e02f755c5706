//! Content-based publish/subscribe matching on discrete label sets.
//!
//! The content space is cut into a grid of labeled cells. Subscriptions
//! become small sets of cell labels, events become single labels, and
//! brokers store everything in counting Bloom filters, so subscription
//! aggregation and event matching cost a fixed number of filter operations
//! no matter how many subscriptions are live. The price is memory and a
//! tunable false-positive rate; deliveries are never lost as long as every
//! filter in the network shares one parameter set.
//!
//! Modules, bottom up:
//! - [`label_space`]: schemas, cell labels, event and subscription mapping.
//! - [`cbf`]: the counting Bloom filter and its false-positive formulas.
//! - [`broker`]: one broker node plus the message wire format.
//! - [`overlay`]: a deterministic simulator for broker trees.
//! - [`harness`]: seeded workload generation and the exact-matching oracle.

pub mod broker;
pub mod cbf;
pub mod harness;
pub mod label_space;
pub mod overlay;

pub use broker::{Broker, BrokerMsg, ConnKind, ConnectionId};
pub use cbf::{CbfParams, CountingBloomFilter};
pub use harness::{Distribution, WorkloadSpec};
pub use label_space::{
    ContentSchema, DimensionKind, DimensionSpec, EventPoint, LabelSet, Predicate, RangeLabel,
    Subscription,
};
pub use overlay::{SimState, Topology};

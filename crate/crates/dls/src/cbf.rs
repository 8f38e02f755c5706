//! Counting Bloom filter over range labels.
//!
//! Membership queries return the minimum of the touched counters, so the
//! reported multiplicity never undercounts while counters stay in range.
//! Counter positions come from two seeded 64-bit hashes combined by double
//! hashing, `index_i = (h1 + i * h2) mod m`, which makes the position set of
//! a label a pure function of the parameters. Brokers rely on that: filters
//! built with identical parameters collide identically, network-wide.

use thiserror::Error;

use crate::label_space::RangeLabel;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CbfError {
    #[error("invalid filter parameters: {0}")]
    InvalidParams(String),
    #[error("fpr formula domain error: {0}")]
    Domain(String),
    #[error("snapshot: {0}")]
    Snapshot(String),
}

type Result<T> = std::result::Result<T, CbfError>;

/// Filter geometry plus the two base hash seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CbfParams {
    /// Counter count.
    pub m: u64,
    /// Hash function count.
    pub k_h: u32,
    /// Bits per counter; 4 covers typical loads.
    pub counter_bits: u8,
    pub seed_a: u64,
    pub seed_b: u64,
}

impl CbfParams {
    pub fn new(m: u64, k_h: u32, counter_bits: u8, seed_a: u64, seed_b: u64) -> Result<Self> {
        let p = Self {
            m,
            k_h,
            counter_bits,
            seed_a,
            seed_b,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m > 1 << 32 {
            return Err(CbfError::InvalidParams(format!(
                "m must be in 1..=2^32, got {}",
                self.m
            )));
        }
        if !(1..=16).contains(&self.k_h) {
            return Err(CbfError::InvalidParams(format!(
                "k_h must be in 1..=16, got {}",
                self.k_h
            )));
        }
        if !(2..=16).contains(&self.counter_bits) {
            return Err(CbfError::InvalidParams(format!(
                "counter_bits must be in 2..=16, got {}",
                self.counter_bits
            )));
        }
        Ok(())
    }

    /// Standard optimum `round(m / n_expected * ln 2)`, clamped to 1..=16.
    pub fn optimal_k(m: u64, n_expected: u64) -> u32 {
        if n_expected == 0 {
            return 1;
        }
        let k = (m as f64 / n_expected as f64 * std::f64::consts::LN_2).round();
        (k as u32).clamp(1, 16)
    }

    pub fn counter_max(&self) -> u64 {
        (1u64 << self.counter_bits) - 1
    }

    /// Fixed-width big-endian parameter block, the snapshot header prefix.
    /// Brokers exchange these to verify the network-wide configuration.
    pub fn to_bytes(&self) -> [u8; PARAMS_WIRE_LEN] {
        let mut out = [0u8; PARAMS_WIRE_LEN];
        out[0..8].copy_from_slice(&self.m.to_be_bytes());
        out[8..12].copy_from_slice(&self.k_h.to_be_bytes());
        out[12] = self.counter_bits;
        out[13..21].copy_from_slice(&self.seed_a.to_be_bytes());
        out[21..29].copy_from_slice(&self.seed_b.to_be_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < PARAMS_WIRE_LEN {
            return Err(CbfError::Snapshot(format!(
                "params block needs {PARAMS_WIRE_LEN} bytes, have {}",
                bytes.len()
            )));
        }
        Self::new(
            u64::from_be_bytes(bytes[0..8].try_into().unwrap()),
            u32::from_be_bytes(bytes[8..12].try_into().unwrap()),
            bytes[12],
            u64::from_be_bytes(bytes[13..21].try_into().unwrap()),
            u64::from_be_bytes(bytes[21..29].try_into().unwrap()),
        )
    }
}

/// Bytes in the serialized [`CbfParams`] block.
pub const PARAMS_WIRE_LEN: usize = 8 + 4 + 1 + 8 + 8;

/// 64-bit avalanche mix (splitmix64 finalizer). Stable across platforms and
/// builds, which keeps filter states replayable byte for byte.
fn hash64(value: u64, seed: u64) -> u64 {
    let mut z = value ^ seed.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The `k_h` counter indices a label touches, in probe order.
pub fn positions(params: &CbfParams, label: RangeLabel) -> impl Iterator<Item = u64> {
    let h1 = hash64(label.0, params.seed_a) as u128;
    let h2 = hash64(label.0, params.seed_b) as u128;
    let m = params.m as u128;
    (0..params.k_h as u128).map(move |i| ((h1 + i * h2) % m) as u64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountingBloomFilter {
    params: CbfParams,
    /// Counters packed `counter_bits` each, little-end first within words.
    words: Vec<u64>,
    nonzero: u64,
    n_inserted: u64,
    saturation_events: u64,
    underflow_events: u64,
}

impl CountingBloomFilter {
    pub fn new(params: CbfParams) -> Result<Self> {
        params.validate()?;
        let total_bits = params.m as usize * params.counter_bits as usize;
        Ok(Self {
            params,
            words: vec![0; total_bits.div_ceil(64)],
            nonzero: 0,
            n_inserted: 0,
            saturation_events: 0,
            underflow_events: 0,
        })
    }

    pub fn params(&self) -> &CbfParams {
        &self.params
    }

    /// Adds minus deletes so far.
    pub fn n_inserted(&self) -> u64 {
        self.n_inserted
    }

    /// Times a counter reached or was held at its ceiling. While this stays
    /// zero the filter has counted exactly.
    pub fn saturation_events(&self) -> u64 {
        self.saturation_events
    }

    pub fn underflow_events(&self) -> u64 {
        self.underflow_events
    }

    pub fn is_empty(&self) -> bool {
        self.nonzero == 0
    }

    pub fn counter(&self, index: u64) -> u64 {
        debug_assert!(index < self.params.m);
        let cb = self.params.counter_bits as usize;
        let bit = index as usize * cb;
        let (w, off) = (bit / 64, bit % 64);
        let mask = (1u64 << cb) - 1;
        if off + cb <= 64 {
            (self.words[w] >> off) & mask
        } else {
            let lo = self.words[w] >> off;
            let hi = self.words[w + 1] << (64 - off);
            (lo | hi) & mask
        }
    }

    fn set_counter(&mut self, index: u64, value: u64) {
        let cb = self.params.counter_bits as usize;
        let bit = index as usize * cb;
        let (w, off) = (bit / 64, bit % 64);
        let mask = (1u64 << cb) - 1;
        debug_assert!(value <= mask);
        if off + cb <= 64 {
            self.words[w] = (self.words[w] & !(mask << off)) | (value << off);
        } else {
            let low_bits = 64 - off;
            self.words[w] = (self.words[w] & !(mask << off)) | (value << off);
            let hi_mask = mask >> low_bits;
            self.words[w + 1] = (self.words[w + 1] & !hi_mask) | (value >> low_bits);
        }
    }

    pub fn positions(&self, label: RangeLabel) -> impl Iterator<Item = u64> {
        positions(&self.params, label)
    }

    /// Increments every touched counter, saturating at the ceiling. A
    /// counter that reaches the ceiling is recorded as a saturation event
    /// and stays pinned: deletes skip it, so inflated counts can only grow,
    /// never cross below the true multiplicity.
    pub fn add(&mut self, label: RangeLabel) {
        let max = self.params.counter_max();
        // positions() borrows params immutably; collect the probe walk into
        // a small fixed buffer so counters can be mutated in the same pass.
        let mut idx = [0u64; 16];
        let k = self.fill_positions(label, &mut idx);
        for &pos in &idx[..k] {
            let v = self.counter(pos);
            if v >= max {
                self.saturation_events += 1;
                continue;
            }
            if v == 0 {
                self.nonzero += 1;
            }
            let next = v + 1;
            if next == max {
                self.saturation_events += 1;
            }
            self.set_counter(pos, next);
        }
        self.n_inserted += 1;
    }

    /// Decrements every touched counter, skipping pinned (saturated) ones
    /// and flooring at zero with an underflow event.
    pub fn delete(&mut self, label: RangeLabel) {
        let max = self.params.counter_max();
        let mut idx = [0u64; 16];
        let k = self.fill_positions(label, &mut idx);
        for &pos in &idx[..k] {
            let v = self.counter(pos);
            if v == max {
                // Sticky: the true count may exceed the ceiling.
                continue;
            }
            if v == 0 {
                self.underflow_events += 1;
                continue;
            }
            if v == 1 {
                self.nonzero -= 1;
            }
            self.set_counter(pos, v - 1);
        }
        self.n_inserted = self.n_inserted.saturating_sub(1);
    }

    /// Multiplicity estimate: the minimum touched counter. Never
    /// underestimates while no saturation or underflow event has occurred.
    /// Always reads all `k_h` counters, so query cost does not depend on
    /// filter fill.
    pub fn query(&self, label: RangeLabel) -> u64 {
        let mut min = u64::MAX;
        let mut idx = [0u64; 16];
        let k = self.fill_positions(label, &mut idx);
        for &pos in &idx[..k] {
            min = min.min(self.counter(pos));
        }
        min
    }

    fn fill_positions(&self, label: RangeLabel, out: &mut [u64; 16]) -> usize {
        let mut k = 0;
        for p in positions(&self.params, label) {
            out[k] = p;
            k += 1;
        }
        k
    }

    /// Zeroes every counter and statistic, keeping the parameters.
    pub fn reset(&mut self) {
        self.words.fill(0);
        self.nonzero = 0;
        self.n_inserted = 0;
        self.saturation_events = 0;
        self.underflow_events = 0;
    }

    /// Indices of counters currently above zero, ascending.
    pub fn nonzero_positions(&self) -> Vec<u64> {
        (0..self.params.m)
            .filter(|&i| self.counter(i) > 0)
            .collect()
    }

    pub fn sum_counters(&self) -> u64 {
        (0..self.params.m).map(|i| self.counter(i)).sum()
    }

    // -----------------------------------------------------------------
    // Snapshot: the parameter block, three u64 statistics, then the
    // packed counter array; everything fixed-width big-endian. Byte-exact
    // round-trips let brokers compare filter configurations (and
    // contents) across the network.
    //
    //   params block | n_inserted | saturation_events | underflow_events
    //   | ceil(m * counter_bits / 8) counter bytes
    // -----------------------------------------------------------------

    pub fn snapshot(&self) -> Vec<u8> {
        let counter_bytes =
            (self.params.m as usize * self.params.counter_bits as usize).div_ceil(8);
        let mut out = Vec::with_capacity(SNAPSHOT_HEADER_LEN + counter_bytes);
        out.extend_from_slice(&self.params.to_bytes());
        out.extend_from_slice(&self.n_inserted.to_be_bytes());
        out.extend_from_slice(&self.saturation_events.to_be_bytes());
        out.extend_from_slice(&self.underflow_events.to_be_bytes());
        for chunk_idx in 0..counter_bytes {
            let word = self.words[chunk_idx / 8];
            out.push((word >> ((chunk_idx % 8) * 8)) as u8);
        }
        out
    }

    pub fn from_snapshot(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < SNAPSHOT_HEADER_LEN {
            return Err(CbfError::Snapshot(format!(
                "truncated header: {} bytes",
                bytes.len()
            )));
        }
        let params = CbfParams::from_bytes(&bytes[..PARAMS_WIRE_LEN])
            .map_err(|e| CbfError::Snapshot(e.to_string()))?;
        let mut at = PARAMS_WIRE_LEN;
        let mut take_u64 = || {
            let v = u64::from_be_bytes(bytes[at..at + 8].try_into().unwrap());
            at += 8;
            v
        };
        let n_inserted = take_u64();
        let saturation_events = take_u64();
        let underflow_events = take_u64();
        let counter_bytes = (params.m as usize)
            .checked_mul(params.counter_bits as usize)
            .map(|b| b.div_ceil(8))
            .ok_or_else(|| CbfError::Snapshot("counter array too large".into()))?;
        let body = &bytes[SNAPSHOT_HEADER_LEN..];
        if body.len() != counter_bytes {
            return Err(CbfError::Snapshot(format!(
                "expected {counter_bytes} counter bytes, got {}",
                body.len()
            )));
        }
        let mut filter = Self::new(params)?;
        for (i, &b) in body.iter().enumerate() {
            filter.words[i / 8] |= (b as u64) << ((i % 8) * 8);
        }
        // Trailing pad bits past the last counter must be clear, otherwise
        // re-serialization would not reproduce the input.
        let used_bits = params.m as usize * params.counter_bits as usize;
        if !used_bits.is_multiple_of(64) {
            let last = filter.words[used_bits / 64];
            if last >> (used_bits % 64) != 0 {
                return Err(CbfError::Snapshot("pad bits set past last counter".into()));
            }
        }
        filter.n_inserted = n_inserted;
        filter.saturation_events = saturation_events;
        filter.underflow_events = underflow_events;
        filter.nonzero = (0..params.m).filter(|&i| filter.counter(i) > 0).count() as u64;
        Ok(filter)
    }
}

/// Snapshot header: the parameter block plus three u64 statistics.
pub const SNAPSHOT_HEADER_LEN: usize = PARAMS_WIRE_LEN + 3 * 8;

/// Exact false-positive rate of a filter of `m` counters loaded with `n`
/// distinct elements under `k_h` hashes: `(1 - (1 - 1/m)^(k*n))^k`.
pub fn theoretical_fpr_exact(m: u64, n: u64, k_h: u32) -> Result<f64> {
    if m == 0 || k_h == 0 {
        return Err(CbfError::Domain("m and k_h must be positive".into()));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let kn = k_h as f64 * n as f64;
    let inner = (kn * (-1.0 / m as f64).ln_1p()).exp();
    Ok((1.0 - inner).powi(k_h as i32))
}

/// Asymptotic form `(1 - e^(-k*n/m))^k`; a lower bound on the exact value.
pub fn theoretical_fpr_approx(m: u64, n: u64, k_h: u32) -> Result<f64> {
    if m == 0 || k_h == 0 {
        return Err(CbfError::Domain("m and k_h must be positive".into()));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let exponent = -(k_h as f64) * n as f64 / m as f64;
    Ok((1.0 - exponent.exp()).powi(k_h as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: u64, k_h: u32) -> CbfParams {
        CbfParams::new(m, k_h, 4, 11, 23).unwrap()
    }

    #[test]
    fn positions_single_hash_degenerates_to_h1() {
        let p = params(97, 1);
        let got: Vec<u64> = positions(&p, RangeLabel(42)).collect();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0], hash64(42, p.seed_a) % 97);
    }

    #[test]
    fn positions_are_deterministic() {
        let p = params(1 << 14, 4);
        let a: Vec<u64> = positions(&p, RangeLabel(7)).collect();
        let b: Vec<u64> = positions(&p, RangeLabel(7)).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn positions_walk_an_arithmetic_progression() {
        let p = params(13, 3);
        let label = RangeLabel(0xDEAD_BEEF);
        let got: Vec<u64> = positions(&p, label).collect();
        // Recompute by direct modular arithmetic.
        let h1 = hash64(label.0, p.seed_a);
        let h2 = hash64(label.0, p.seed_b);
        let stride = h2 % 13;
        for (i, &idx) in got.iter().enumerate() {
            assert!(idx < 13);
            assert_eq!(idx, ((h1 as u128 + i as u128 * h2 as u128) % 13) as u64);
            if i > 0 {
                assert_eq!((got[i - 1] + stride) % 13, idx);
            }
        }
    }

    #[test]
    fn add_then_query_reports_multiplicity() {
        let mut f = CountingBloomFilter::new(params(128, 4)).unwrap();
        let label = RangeLabel(99);
        assert_eq!(f.query(label), 0);
        f.add(label);
        assert!(f.query(label) >= 1);
        f.add(label);
        assert_eq!(f.query(label), 2);
        assert_eq!(f.n_inserted(), 2);
    }

    #[test]
    fn sixteen_adds_pin_counters_at_fifteen() {
        let mut f = CountingBloomFilter::new(params(128, 4)).unwrap();
        let label = RangeLabel(5);
        for _ in 0..16 {
            f.add(label);
        }
        for pos in positions(f.params(), label).collect::<Vec<_>>() {
            assert_eq!(f.counter(pos), 15);
        }
        assert!(f.saturation_events() > 0);
        // Pinned counters are sticky under delete.
        f.delete(label);
        assert_eq!(f.query(label), 15);
    }

    #[test]
    fn delete_restores_counters() {
        let mut f = CountingBloomFilter::new(params(256, 4)).unwrap();
        let label = RangeLabel(1234);
        f.add(label);
        f.delete(label);
        assert_eq!(f.query(label), 0);
        assert!(f.is_empty());
        assert_eq!(f.saturation_events(), 0);
        assert_eq!(f.underflow_events(), 0);
    }

    #[test]
    fn delete_on_empty_is_recorded_not_applied() {
        let mut f = CountingBloomFilter::new(params(64, 3)).unwrap();
        f.delete(RangeLabel(8));
        assert_eq!(f.sum_counters(), 0);
        assert_eq!(f.underflow_events(), 3);
    }

    #[test]
    fn colliding_delete_keeps_other_label_visible() {
        let p = params(16, 2);
        // Find two labels sharing at least one position.
        let mut pair = None;
        'outer: for a in 0u64..200 {
            let pa: Vec<u64> = positions(&p, RangeLabel(a)).collect();
            for b in (a + 1)..200 {
                let pb: Vec<u64> = positions(&p, RangeLabel(b)).collect();
                if pa.iter().any(|x| pb.contains(x)) {
                    pair = Some((RangeLabel(a), RangeLabel(b)));
                    break 'outer;
                }
            }
        }
        let (l1, l2) = pair.expect("collision exists in a 16-counter filter");
        let mut f = CountingBloomFilter::new(p).unwrap();
        f.add(l1);
        f.add(l2);
        f.delete(l1);
        assert!(f.query(l2) >= 1);
    }

    #[test]
    fn counter_sum_tracks_insertions() {
        let mut f = CountingBloomFilter::new(params(512, 4)).unwrap();
        for i in 0..40u64 {
            f.add(RangeLabel(i * 7919));
        }
        assert_eq!(f.saturation_events(), 0);
        assert_eq!(f.sum_counters(), 4 * 40);
    }

    #[test]
    fn odd_counter_widths_pack_correctly() {
        // 5-bit counters stride across word boundaries.
        let p = CbfParams::new(100, 2, 5, 1, 2).unwrap();
        let mut f = CountingBloomFilter::new(p).unwrap();
        let mut model = vec![0u64; 100];
        for i in 0..100u64 {
            let v = (i * 13) % 31;
            f.set_counter(i, v);
            model[i as usize] = v;
        }
        for i in 0..100u64 {
            assert_eq!(f.counter(i), model[i as usize], "counter {i}");
        }
    }

    #[test]
    fn fpr_exact_matches_rational_arithmetic() {
        // Oracle: (1 - 7^16 / 8^16)^2 computed in exact integer arithmetic.
        let num = 7u128.pow(16);
        let den = 8u128.pow(16);
        let expect = (1.0 - num as f64 / den as f64).powi(2);
        let got = theoretical_fpr_exact(8, 8, 2).unwrap();
        assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
        assert!((got - 0.777_805_5).abs() < 1e-6);
    }

    #[test]
    fn fpr_edges() {
        assert_eq!(theoretical_fpr_exact(8, 0, 2).unwrap(), 0.0);
        assert_eq!(theoretical_fpr_approx(8, 0, 2).unwrap(), 0.0);
        assert_eq!(theoretical_fpr_exact(1, 1, 1).unwrap(), 1.0);
        assert!(theoretical_fpr_exact(0, 1, 1).is_err());
        assert!(theoretical_fpr_exact(8, 1, 0).is_err());
    }

    #[test]
    fn fpr_approx_value() {
        let got = theoretical_fpr_approx(8, 8, 2).unwrap();
        let expect = (1.0 - (-2.0f64).exp()).powi(2);
        assert!((got - expect).abs() < 1e-12);
        assert!((got - 0.747_645_1).abs() < 1e-6);
    }

    #[test]
    fn optimal_k_matches_formula() {
        assert_eq!(CbfParams::optimal_k(1 << 14, 1 << 11), 6); // 8 * ln 2 = 5.5 -> 6
        assert_eq!(CbfParams::optimal_k(100, 100_000), 1);
        assert_eq!(CbfParams::optimal_k(1 << 20, 1), 16);
    }

    #[test]
    fn snapshot_round_trips_byte_exact() {
        let mut f = CountingBloomFilter::new(CbfParams::new(77, 3, 5, 9, 10).unwrap()).unwrap();
        for i in 0..30u64 {
            f.add(RangeLabel(i * i + 1));
        }
        f.delete(RangeLabel(2));
        let bytes = f.snapshot();
        let back = CountingBloomFilter::from_snapshot(&bytes).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.snapshot(), bytes);
    }

    #[test]
    fn params_block_round_trips() {
        let p = CbfParams::new(1 << 14, 4, 4, 0xDEAD, 0xBEEF).unwrap();
        let bytes = p.to_bytes();
        assert_eq!(CbfParams::from_bytes(&bytes).unwrap(), p);
        // The snapshot header starts with the params block.
        let f = CountingBloomFilter::new(p).unwrap();
        assert_eq!(&f.snapshot()[..super::PARAMS_WIRE_LEN], &bytes[..]);
        assert!(CbfParams::from_bytes(&bytes[..10]).is_err());
    }

    #[test]
    fn snapshot_rejects_garbage() {
        assert!(CountingBloomFilter::from_snapshot(&[]).is_err());
        assert!(CountingBloomFilter::from_snapshot(&[0u8; 20]).is_err());
        let f = CountingBloomFilter::new(params(8, 2)).unwrap();
        let mut bytes = f.snapshot();
        bytes.pop();
        assert!(CountingBloomFilter::from_snapshot(&bytes).is_err());
    }
}

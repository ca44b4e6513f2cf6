//! Packets, histories and finite history sets.
//!
//! A [`History`] is stored as one flat, shared buffer of field values
//! (head packet first) so that cloning is a reference-count bump and the
//! canonical order is a plain slice comparison. A [`HistSet`] keeps its
//! members sorted and deduplicated, which makes structural equality and
//! hashing coincide with set equality.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result, SchemaError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDef {
    pub name: String,
    pub min: u32,
    pub max: u32,
}

/// Ordered list of packet fields with their inclusive value ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSchema {
    fields: Vec<FieldDef>,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct SchemaFile {
    fields: Vec<FieldDef>,
}

impl FieldSchema {
    pub fn new(fields: Vec<FieldDef>) -> Result<Self, SchemaError> {
        let mut index = HashMap::with_capacity(fields.len());
        for (i, f) in fields.iter().enumerate() {
            if f.min > f.max {
                return Err(SchemaError::Invalid(format!(
                    "field `{}` has empty range [{}, {}]",
                    f.name, f.min, f.max
                )));
            }
            if index.insert(f.name.clone(), i).is_some() {
                return Err(SchemaError::Invalid(format!("duplicate field `{}`", f.name)));
            }
        }
        for required in ["sw", "pt"] {
            if !index.contains_key(required) {
                return Err(SchemaError::Invalid(format!("missing required field `{required}`")));
            }
        }
        Ok(FieldSchema { fields, index })
    }

    /// Convenience constructor from `(name, min, max)` triples.
    pub fn from_ranges(ranges: &[(&str, u32, u32)]) -> Result<Self, SchemaError> {
        Self::new(
            ranges
                .iter()
                .map(|&(name, min, max)| FieldDef {
                    name: name.to_string(),
                    min,
                    max,
                })
                .collect(),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SchemaFile = serde_json::from_str(text)?;
        Ok(Self::new(file.fields)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SchemaFile {
            fields: self.fields.clone(),
        })
        .expect("schema serializes")
    }

    pub fn fields(&self) -> &[FieldDef] {
        &self.fields
    }

    pub fn arity(&self) -> usize {
        self.fields.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, SchemaError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| SchemaError::UnknownField(name.to_string()))
    }

    /// Resolves a field name and checks that `value` lies in its range.
    pub fn resolve(&self, name: &str, value: u64) -> Result<(usize, u32), SchemaError> {
        let i = self.index_of(name)?;
        let f = &self.fields[i];
        if value < f.min as u64 || value > f.max as u64 {
            return Err(SchemaError::OutOfRange {
                field: name.to_string(),
                value,
                min: f.min,
                max: f.max,
            });
        }
        Ok((i, value as u32))
    }

    /// Every packet of the schema, in canonical order. Only sensible for
    /// tiny schemas; used by tests and predicate checks.
    pub fn all_packets(&self) -> Vec<Packet> {
        let mut out = vec![Vec::new()];
        for f in &self.fields {
            let mut next = Vec::new();
            for prefix in &out {
                for v in f.min..=f.max {
                    let mut p = prefix.clone();
                    p.push(v);
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(|v| Packet(v.into())).collect()
    }
}

/// A total assignment of values to the schema's fields.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Packet(Box<[u32]>);

impl Packet {
    pub fn new(schema: &FieldSchema, values: Vec<u32>) -> Result<Self, SchemaError> {
        if values.len() != schema.arity() {
            return Err(SchemaError::Invalid(format!(
                "packet has {} values, schema has {} fields",
                values.len(),
                schema.arity()
            )));
        }
        for (f, &v) in schema.fields.iter().zip(&values) {
            schema.resolve(&f.name, v as u64)?;
        }
        Ok(Packet(values.into()))
    }

    /// Builds a packet from named values; unnamed fields take their minimum.
    pub fn from_pairs(schema: &FieldSchema, pairs: &[(&str, u32)]) -> Result<Self, SchemaError> {
        let mut values: Vec<u32> = schema.fields.iter().map(|f| f.min).collect();
        for &(name, v) in pairs {
            let (i, v) = schema.resolve(name, v as u64)?;
            values[i] = v;
        }
        Ok(Packet(values.into()))
    }

    pub(crate) fn from_raw(values: &[u32]) -> Self {
        Packet(values.into())
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, schema: &FieldSchema, field: &str) -> Result<u32, SchemaError> {
        Ok(self.0[schema.index_of(field)?])
    }

    /// `π[f := n]`.
    pub fn update(&self, schema: &FieldSchema, field: &str, value: u64) -> Result<Packet, SchemaError> {
        let (i, v) = schema.resolve(field, value)?;
        let mut values = self.0.clone();
        values[i] = v;
        Ok(Packet(values))
    }
}

/// A nonempty packet sequence; entry 0 is the head (current state) and the
/// remaining entries are the logged past states, most recent first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct History {
    arity: u32,
    data: Arc<[u32]>,
}

impl History {
    pub fn new(packets: &[Packet]) -> Result<Self, SchemaError> {
        let first = packets
            .first()
            .ok_or_else(|| SchemaError::Invalid("a history needs at least one packet".into()))?;
        let arity = first.0.len();
        if arity == 0 || packets.iter().any(|p| p.0.len() != arity) {
            return Err(SchemaError::Invalid("packets of a history must share one schema".into()));
        }
        let data: Vec<u32> = packets.iter().flat_map(|p| p.0.iter().copied()).collect();
        Ok(History {
            arity: arity as u32,
            data: data.into(),
        })
    }

    /// The single-packet history `π::⟨⟩`.
    pub fn singleton(packet: &Packet) -> Self {
        History {
            arity: packet.0.len() as u32,
            data: packet.0.clone().into(),
        }
    }

    pub(crate) fn from_flat(arity: usize, data: Vec<u32>) -> Self {
        debug_assert!(arity > 0 && !data.is_empty() && data.len().is_multiple_of(arity));
        History {
            arity: arity as u32,
            data: data.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.arity as usize
    }

    /// Always false; histories are nonempty.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn arity(&self) -> usize {
        self.arity as usize
    }

    pub fn head(&self) -> &[u32] {
        &self.data[..self.arity as usize]
    }

    /// Entry `i`, where 0 is the head.
    pub fn entry(&self, i: usize) -> &[u32] {
        let k = self.arity as usize;
        &self.data[i * k..(i + 1) * k]
    }

    pub fn entries(&self) -> impl DoubleEndedIterator<Item = &[u32]> + ExactSizeIterator {
        self.data.chunks_exact(self.arity as usize)
    }

    /// The logged past states (everything except the head).
    pub fn tail(&self) -> impl DoubleEndedIterator<Item = &[u32]> + ExactSizeIterator {
        self.data[self.arity as usize..].chunks_exact(self.arity as usize)
    }

    pub fn packets(&self) -> Vec<Packet> {
        self.entries().map(Packet::from_raw).collect()
    }

    /// `π::σ ↦ π::π::σ`.
    pub fn dup(&self) -> History {
        let k = self.arity as usize;
        let mut data = Vec::with_capacity(self.data.len() + k);
        data.extend_from_slice(&self.data[..k]);
        data.extend_from_slice(&self.data);
        History::from_flat(k, data)
    }

    /// Replaces field `index` of the head packet.
    pub fn with_head_field(&self, index: usize, value: u32) -> History {
        if self.data[index] == value {
            return self.clone();
        }
        let mut data = self.data.to_vec();
        data[index] = value;
        History::from_flat(self.arity as usize, data)
    }

    /// Replaces the head packet.
    pub fn with_head(&self, head: &[u32]) -> History {
        let mut data = self.data.to_vec();
        data[..head.len()].copy_from_slice(head);
        History::from_flat(self.arity as usize, data)
    }
}

impl Ord for History {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.data.as_ref().cmp(other.data.as_ref()))
    }
}

impl PartialOrd for History {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries()
            .map(|e| format!("{e:?}"))
            .collect();
        write!(f, "{}", parts.join("::"))
    }
}

/// A finite set of histories in canonical order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct HistSet(Arc<[History]>);

impl HistSet {
    pub fn empty() -> Self {
        HistSet(Arc::from(Vec::new()))
    }

    pub fn singleton(h: History) -> Self {
        HistSet(Arc::from(vec![h]))
    }

    /// Sorts and deduplicates.
    pub fn from_histories(mut hs: Vec<History>) -> Self {
        hs.sort_unstable();
        hs.dedup();
        HistSet(hs.into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, History> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[History] {
        &self.0
    }

    pub fn contains(&self, h: &History) -> bool {
        self.0.binary_search(h).is_ok()
    }

    pub fn is_subset(&self, other: &HistSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut j = 0;
        for h in self.iter() {
            loop {
                match other.0.get(j) {
                    None => return false,
                    Some(o) => match o.cmp(h) {
                        Ordering::Less => j += 1,
                        Ordering::Equal => {
                            j += 1;
                            break;
                        }
                        Ordering::Greater => return false,
                    },
                }
            }
        }
        true
    }

    pub fn union(&self, other: &HistSet) -> HistSet {
        if other.is_empty() || Arc::ptr_eq(&self.0, &other.0) {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(a[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().cloned());
        HistSet(out.into())
    }

    pub fn intersection(&self, other: &HistSet) -> HistSet {
        self.filter(|h| other.contains(h))
    }

    pub fn difference(&self, other: &HistSet) -> HistSet {
        self.filter(|h| !other.contains(h))
    }

    /// Keeps the members satisfying `keep`; order is preserved.
    pub fn filter(&self, mut keep: impl FnMut(&History) -> bool) -> HistSet {
        let kept: Vec<History> = self.iter().filter(|h| keep(h)).cloned().collect();
        if kept.len() == self.len() {
            return self.clone();
        }
        HistSet(kept.into())
    }

    /// Image of the set under a partial map on histories.
    pub fn map_partial(&self, f: impl FnMut(&History) -> Option<History>) -> HistSet {
        HistSet::from_histories(self.iter().filter_map(f).collect())
    }

    /// Injective serialization whose byte-wise lexicographic order agrees
    /// with the canonical order on sets of equal arity.
    ///
    /// Layout (big-endian `u32` words): member count; then, if nonempty,
    /// the packet arity followed by each history as its entry count and
    /// its field values head first. The empty set is the four zero bytes.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.len() as u32).to_be_bytes());
        if let Some(first) = self.0.first() {
            out.extend_from_slice(&first.arity.to_be_bytes());
            for h in self.iter() {
                out.extend_from_slice(&(h.len() as u32).to_be_bytes());
                for v in h.data.iter() {
                    out.extend_from_slice(&v.to_be_bytes());
                }
            }
        }
        out
    }

    pub fn from_canonical_bytes(bytes: &[u8]) -> Result<HistSet> {
        let mut words = bytes.chunks(4).map(|c| {
            <[u8; 4]>::try_from(c)
                .map(u32::from_be_bytes)
                .map_err(|_| Error::Format("truncated history-set encoding".into()))
        });
        let mut next = || {
            words
                .next()
                .unwrap_or_else(|| Err(Error::Format("truncated history-set encoding".into())))
        };
        let count = next()? as usize;
        if count == 0 {
            if bytes.len() != 4 {
                return Err(Error::Format("trailing bytes after empty set".into()));
            }
            return Ok(HistSet::empty());
        }
        let arity = next()? as usize;
        if arity == 0 {
            return Err(Error::Format("zero packet arity".into()));
        }
        let mut hs = Vec::with_capacity(count);
        for _ in 0..count {
            let len = next()? as usize;
            if len == 0 {
                return Err(Error::Format("empty history".into()));
            }
            let mut data = Vec::with_capacity(len * arity);
            for _ in 0..len * arity {
                data.push(next()?);
            }
            hs.push(History::from_flat(arity, data));
        }
        let consumed = 4 * (2 + count + hs.iter().map(|h| h.data.len()).sum::<usize>());
        if consumed != bytes.len() {
            return Err(Error::Format("trailing bytes in history-set encoding".into()));
        }
        let set = HistSet::from_histories(hs);
        if set.len() != count {
            return Err(Error::Format("duplicate members in history-set encoding".into()));
        }
        Ok(set)
    }
}

impl Ord for HistSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.as_ref().cmp(other.0.as_ref()))
    }
}

impl PartialOrd for HistSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for HistSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<History> for HistSet {
    fn from_iter<I: IntoIterator<Item = History>>(iter: I) -> Self {
        HistSet::from_histories(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a HistSet {
    type Item = &'a History;
    type IntoIter = std::slice::Iter<'a, History>;
    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

// JSON forms: a packet is an object keyed by field name in schema order, a
// history is an array of packets (head first), a set is an array of
// histories in canonical order.

pub fn packet_to_json(schema: &FieldSchema, values: &[u32]) -> Value {
    let mut m = Map::new();
    for (f, v) in schema.fields().iter().zip(values) {
        m.insert(f.name.clone(), Value::from(*v));
    }
    Value::Object(m)
}

pub fn packet_from_json(schema: &FieldSchema, v: &Value) -> Result<Packet> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Format(format!("packet must be an object, got {v}")))?;
    let mut values: Vec<u32> = schema.fields().iter().map(|f| f.min).collect();
    for (k, val) in obj {
        let n = val
            .as_u64()
            .ok_or_else(|| Error::Format(format!("field `{k}` must be a natural number")))?;
        let (i, n) = schema.resolve(k, n)?;
        values[i] = n;
    }
    Ok(Packet(values.into()))
}

pub fn history_to_json(schema: &FieldSchema, h: &History) -> Value {
    Value::Array(h.entries().map(|e| packet_to_json(schema, e)).collect())
}

pub fn history_from_json(schema: &FieldSchema, v: &Value) -> Result<History> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Format("history must be an array of packets".into()))?;
    let packets = arr
        .iter()
        .map(|p| packet_from_json(schema, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(History::new(&packets)?)
}

pub fn histset_to_json(schema: &FieldSchema, s: &HistSet) -> Value {
    Value::Array(s.iter().map(|h| history_to_json(schema, h)).collect())
}

pub fn histset_from_json(schema: &FieldSchema, v: &Value) -> Result<HistSet> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Format("history set must be an array of histories".into()))?;
    arr
        .iter()
        .map(|h| history_from_json(schema, h))
        .collect::<Result<HistSet>>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema() -> FieldSchema {
        FieldSchema::from_ranges(&[("sw", 0, 7), ("pt", 0, 7), ("dst", 0, 3)]).unwrap()
    }

    #[test]
    fn packet_update_changes_one_field() {
        let s = schema();
        let p = Packet::from_pairs(&s, &[("sw", 1), ("pt", 1)]).unwrap();
        let q = p.update(&s, "pt", 2).unwrap();
        assert_eq!(q.values(), &[1, 2, 0]);
        assert_eq!(p.update(&s, "pt", 1).unwrap(), p);
    }

    #[test]
    fn packet_update_rejects_unknown_field_and_range() {
        let s = schema();
        let p = Packet::from_pairs(&s, &[]).unwrap();
        assert_eq!(
            p.update(&s, "vlan", 1),
            Err(SchemaError::UnknownField("vlan".into()))
        );
        assert!(matches!(
            p.update(&s, "dst", 9),
            Err(SchemaError::OutOfRange { .. })
        ));
    }

    #[test]
    fn schema_requires_location_fields() {
        assert!(FieldSchema::from_ranges(&[("sw", 0, 1)]).is_err());
        assert!(FieldSchema::from_ranges(&[("sw", 0, 1), ("pt", 2, 1)]).is_err());
        assert!(FieldSchema::from_ranges(&[("sw", 0, 1), ("pt", 0, 1), ("sw", 0, 1)]).is_err());
    }

    #[test]
    fn schema_json_round_trip() {
        let s = FieldSchema::from_json(r#"{"fields":[{"name":"sw","min":0,"max":63},{"name":"pt","min":0,"max":9}]}"#)
            .unwrap();
        assert_eq!(s.fields()[0].max, 63);
        assert_eq!(FieldSchema::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn dup_repeats_head() {
        let s = schema();
        let p = Packet::from_pairs(&s, &[("sw", 2)]).unwrap();
        let h = History::singleton(&p);
        let d = h.dup();
        assert_eq!(d.len(), 2);
        assert_eq!(d.head(), h.head());
        assert_eq!(d.tail().next().unwrap(), h.head());
        let dd = d.dup();
        assert_eq!(dd.len(), 3);
        assert!(dd.entries().all(|e| e == p.values()));
    }

    #[test]
    fn empty_set_token() {
        assert_eq!(HistSet::empty().canonical_bytes(), vec![0, 0, 0, 0]);
        assert_eq!(HistSet::from_canonical_bytes(&[0, 0, 0, 0]).unwrap(), HistSet::empty());
        assert!(HistSet::from_canonical_bytes(&[0, 0, 0]).is_err());
    }

    #[test]
    fn set_semantics_in_bytes() {
        let s = schema();
        let h = History::singleton(&Packet::from_pairs(&s, &[("sw", 3)]).unwrap());
        let once = HistSet::from_histories(vec![h.clone()]);
        let twice = HistSet::from_histories(vec![h.clone(), h]);
        assert_eq!(once.canonical_bytes(), twice.canonical_bytes());
    }

    #[test]
    fn json_round_trip() {
        let s = schema();
        let p = Packet::from_pairs(&s, &[("sw", 1), ("pt", 2), ("dst", 3)]).unwrap();
        let set = HistSet::from_histories(vec![History::singleton(&p).dup(), History::singleton(&p)]);
        let v = histset_to_json(&s, &set);
        assert_eq!(histset_from_json(&s, &v).unwrap(), set);
        assert_eq!(
            v.to_string(),
            r#"[[{"sw":1,"pt":2,"dst":3}],[{"sw":1,"pt":2,"dst":3},{"sw":1,"pt":2,"dst":3}]]"#
        );
    }
}

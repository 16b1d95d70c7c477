//! Isomorphism-invariant graph certificates by color refinement.
//!
//! Every node starts with a color derived from its label and in/out degree.
//! Each round rehashes a node's color together with the sorted multisets of
//! (edge label, neighbour color) over its outgoing and incoming edges. The
//! certificate hashes the final node colors and edge colors (label plus
//! endpoint colors) as sorted multisets, so it is independent of ids.
//! Equal certificates do not imply isomorphism.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(with = "hex_bytes")]
    pub bytes: [u8; 16],
    pub refinement_rounds: u32,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.bytes))
    }
}

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &[u8; 16], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(b))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 16], D::Error> {
        let s = String::deserialize(d)?;
        let v = hex::decode(s).map_err(serde::de::Error::custom)?;
        v.try_into().map_err(|_| serde::de::Error::custom("certificate must be 16 bytes"))
    }
}

/// Rounds used for a graph with `n` nodes: max(3, 1 + ceil(log2(n + 1))).
pub fn refinement_rounds(n: usize) -> u32 {
    let log = usize::BITS - n.leading_zeros(); // ceil(log2(n + 1))
    (1 + log).max(3)
}

/// The cached certificate of `g`.
pub fn certificate(g: &Graph) -> Certificate {
    *g.certificate()
}

pub(super) fn compute(g: &Graph) -> Certificate {
    let rounds = refinement_rounds(g.node_count());
    let colors = refine(g, rounds);
    let mut node_colors = colors.clone();
    node_colors.sort_unstable();
    let mut edge_colors: Vec<u64> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let (s, t) = g.ends(i);
            let mut h = Hasher::new(b'E');
            h.label(e.label.as_deref());
            h.u64(colors[s]);
            h.u64(colors[t]);
            h.finish64()
        })
        .collect();
    edge_colors.sort_unstable();

    let mut h = Sha256::new();
    h.update(b"gta-cert-v1");
    h.update((g.node_count() as u64).to_le_bytes());
    h.update((g.edge_count() as u64).to_le_bytes());
    for c in node_colors.iter().chain(&edge_colors) {
        h.update(c.to_le_bytes());
    }
    let digest = h.finalize();
    let mut bytes = [0u8; 16];
    bytes.copy_from_slice(&digest[..16]);
    Certificate { bytes, refinement_rounds: rounds }
}

/// Final refined color per node index, as used by the certificate. Nodes
/// related by an isomorphism always receive equal colors.
pub fn node_colors(g: &Graph) -> Vec<u64> {
    refine(g, refinement_rounds(g.node_count()))
}

fn refine(g: &Graph, rounds: u32) -> Vec<u64> {
    let mut colors: Vec<u64> = g
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let mut h = Hasher::new(b'N');
            h.label(n.label.as_deref());
            h.u64(g.out_edges(i).len() as u64);
            h.u64(g.in_edges(i).len() as u64);
            h.finish64()
        })
        .collect();
    let mut scratch = Vec::new();
    for _ in 0..rounds {
        let next = (0..g.node_count())
            .map(|i| {
                let mut h = Hasher::new(b'R');
                h.u64(colors[i]);
                for (tag, list, far) in [(b'o', g.out_edges(i), 1), (b'i', g.in_edges(i), 0)] {
                    scratch.clear();
                    scratch.extend(list.iter().map(|&e| {
                        let ends = g.ends(e);
                        let other = if far == 1 { ends.1 } else { ends.0 };
                        let mut eh = Hasher::new(tag);
                        eh.label(g.edges()[e].label.as_deref());
                        eh.u64(colors[other]);
                        eh.finish64()
                    }));
                    scratch.sort_unstable();
                    h.u64(scratch.len() as u64);
                    for c in &scratch {
                        h.u64(*c);
                    }
                }
                h.finish64()
            })
            .collect();
        colors = next;
    }
    colors
}

struct Hasher(Sha256);

impl Hasher {
    fn new(tag: u8) -> Self {
        let mut h = Sha256::new();
        h.update([tag]);
        Hasher(h)
    }

    fn u64(&mut self, v: u64) {
        self.0.update(v.to_le_bytes());
    }

    fn label(&mut self, l: Option<&str>) {
        match l {
            None => self.0.update([0u8]),
            Some(s) => {
                self.0.update([1u8]);
                self.u64(s.len() as u64);
                self.0.update(s.as_bytes());
            }
        }
    }

    fn finish64(self) -> u64 {
        let d = self.0.finalize();
        u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
    }
}

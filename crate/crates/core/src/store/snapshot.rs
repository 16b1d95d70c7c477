//! Single-file JSON snapshots of a [`GraphStore`].
//!
//! Layout (one JSON object, keys in this order, trailing newline):
//!
//! ```text
//! {"format":"gta-store","version":1,"next_id":N,
//!  "graphs":[{"id":0,"certificate":"<32 hex>","graph":{..graph json..}},..],
//!  "steps":[{"rule_name":..,"match":{..},"input":0,"output":1},..],
//!  "grapes":{"name":[[{"graph":0,"constraints":["c!-"]},..],..],..}}
//! ```
//!
//! Graphs are listed by ascending id, grapes by name. Writes go to a
//! temporary file in the target directory which is then renamed over the
//! destination.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::GraphStore;
use crate::algebra::Grape;
use crate::graph::{Certificate, Graph, GraphId};
use crate::rewrite::DerivationStep;

pub const SNAPSHOT_FORMAT: &str = "gta-store";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("snapshot decode: {0}")]
    Decode(#[from] serde_json::Error),
    #[error("unsupported snapshot format `{format}` version {version}")]
    Unsupported { format: String, version: u32 },
}

#[derive(Serialize, Deserialize)]
struct GraphEntry {
    id: GraphId,
    certificate: Certificate,
    graph: Graph,
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    format: String,
    version: u32,
    next_id: u64,
    graphs: Vec<GraphEntry>,
    steps: Vec<DerivationStep>,
    grapes: BTreeMap<String, Grape>,
}

impl GraphStore {
    pub fn to_snapshot_bytes(&self) -> Vec<u8> {
        let snap = Snapshot {
            format: SNAPSHOT_FORMAT.to_owned(),
            version: SNAPSHOT_VERSION,
            next_id: self.next_id,
            graphs: self
                .graphs
                .iter()
                .map(|(id, g)| GraphEntry { id: *id, certificate: *g.certificate(), graph: (**g).clone() })
                .collect(),
            steps: self.steps.clone(),
            grapes: self.grapes.clone(),
        };
        let mut out = serde_json::to_vec(&snap).expect("snapshot serialization cannot fail");
        out.push(b'\n');
        out
    }

    pub fn from_snapshot_bytes(bytes: &[u8]) -> Result<GraphStore, SnapshotError> {
        let snap: Snapshot = serde_json::from_slice(bytes)?;
        if snap.format != SNAPSHOT_FORMAT || snap.version != SNAPSHOT_VERSION {
            return Err(SnapshotError::Unsupported { format: snap.format, version: snap.version });
        }
        let mut store = GraphStore { next_id: snap.next_id, ..GraphStore::default() };
        for entry in snap.graphs {
            let id = entry.id;
            if entry.graph.certificate() != &entry.certificate {
                store.load_issues.push(format!("graph {id}: recorded certificate does not match its structure"));
            }
            if store.graphs.contains_key(&id) {
                store.load_issues.push(format!("graph id {id} listed twice"));
                continue;
            }
            if let Some(prev) = store.by_digest.insert(*entry.graph.digest(), id) {
                store.load_issues.push(format!("graphs {prev} and {id} are bit-identical"));
            }
            store.cert_index.entry(*entry.graph.certificate()).or_default().insert(id);
            store.graphs.insert(id, Arc::new(entry.graph));
        }
        for s in snap.steps {
            store.record_step(s);
        }
        store.grapes = snap.grapes;
        Ok(store)
    }

    /// Writes the snapshot atomically (temp file + rename).
    pub fn save(&self, path: &Path) -> Result<(), SnapshotError> {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(&self.to_snapshot_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<GraphStore, SnapshotError> {
        Self::from_snapshot_bytes(&std::fs::read(path)?)
    }

    /// Loads `path` if it exists, otherwise returns an empty store.
    pub fn open(path: &Path) -> Result<GraphStore, SnapshotError> {
        if path.exists() {
            Self::load(path)
        } else {
            Ok(GraphStore::new())
        }
    }
}

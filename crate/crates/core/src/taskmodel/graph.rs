use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{CallbackId, ModelError};
use crate::time::Time;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CallbackKind {
    Timer,
    Subscription,
    /// Multi-topic synchronised subscription; modelled as a join vertex.
    Sync,
}

/// Publish/subscribe edges trigger their consumer; queue edges (member
/// variable queues, take API reads) do not and are cut during decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Pubsub,
    Queue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Callback {
    pub id: CallbackId,
    pub name: String,
    pub kind: CallbackKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_us: Option<Time>,
    pub wcet_us: Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphEdge {
    pub src: CallbackId,
    pub dst: CallbackId,
    pub kind: EdgeKind,
}

/// Raw system description: typed callbacks and typed edges.
///
/// Cycles are allowed only through queue edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CallbackGraph {
    pub callbacks: Vec<Callback>,
    pub edges: Vec<GraphEdge>,
}

impl Callback {
    pub fn timer(id: CallbackId, name: impl Into<String>, period_us: Time, wcet_us: Time) -> Self {
        Self {
            id,
            name: name.into(),
            kind: CallbackKind::Timer,
            period_us: Some(period_us),
            wcet_us,
        }
    }

    pub fn subscription(id: CallbackId, name: impl Into<String>, wcet_us: Time) -> Self {
        Self {
            id,
            name: name.into(),
            kind: CallbackKind::Subscription,
            period_us: None,
            wcet_us,
        }
    }

    pub fn sync(id: CallbackId, name: impl Into<String>, wcet_us: Time) -> Self {
        Self {
            id,
            name: name.into(),
            kind: CallbackKind::Sync,
            period_us: None,
            wcet_us,
        }
    }
}

impl GraphEdge {
    pub fn pubsub(src: CallbackId, dst: CallbackId) -> Self {
        Self {
            src,
            dst,
            kind: EdgeKind::Pubsub,
        }
    }

    pub fn queue(src: CallbackId, dst: CallbackId) -> Self {
        Self {
            src,
            dst,
            kind: EdgeKind::Queue,
        }
    }
}

impl CallbackGraph {
    pub fn new(callbacks: Vec<Callback>, edges: Vec<GraphEdge>) -> Self {
        Self { callbacks, edges }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("callback graph serialization is infallible")
    }

    pub fn callback(&self, id: CallbackId) -> Option<&Callback> {
        self.callbacks.iter().find(|c| c.id == id)
    }

    pub fn pubsub_edges(&self) -> impl Iterator<Item = &GraphEdge> {
        self.edges.iter().filter(|e| e.kind == EdgeKind::Pubsub)
    }

    /// Checks every structural invariant except pubsub acyclicity, which
    /// decomposition reports separately.
    pub fn validate(&self) -> Result<(), ModelError> {
        let mut ids = BTreeSet::new();
        for cb in &self.callbacks {
            if !ids.insert(cb.id) {
                return Err(ModelError::DuplicateCallbackId(cb.id));
            }
            if cb.wcet_us == 0 {
                return Err(ModelError::ZeroWcet(cb.id));
            }
            match (cb.kind, cb.period_us) {
                (CallbackKind::Timer, None) => return Err(ModelError::MissingPeriod(cb.id)),
                (CallbackKind::Timer, Some(0)) => return Err(ModelError::ZeroPeriod(cb.id)),
                (CallbackKind::Timer, Some(_)) => {}
                (_, Some(_)) => return Err(ModelError::UnexpectedPeriod(cb.id)),
                (_, None) => {}
            }
        }
        for e in &self.edges {
            if !ids.contains(&e.src) || !ids.contains(&e.dst) {
                return Err(ModelError::UnknownEndpoint {
                    src: e.src,
                    dst: e.dst,
                });
            }
            if e.src == e.dst {
                return Err(ModelError::SelfLoop(e.src));
            }
        }
        Ok(())
    }

    /// Pubsub in-degree per callback.
    pub(crate) fn pubsub_in_degree(&self) -> BTreeMap<CallbackId, usize> {
        let mut deg: BTreeMap<CallbackId, usize> =
            self.callbacks.iter().map(|c| (c.id, 0)).collect();
        for e in self.pubsub_edges() {
            *deg.entry(e.dst).or_default() += 1;
        }
        deg
    }
}

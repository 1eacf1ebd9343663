use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{ModelError, TaskId, VertexId};
use crate::time::Time;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vertex {
    pub id: VertexId,
    pub name: String,
    pub wcet_us: Time,
}

impl Vertex {
    pub fn new(id: VertexId, name: impl Into<String>, wcet_us: Time) -> Self {
        Self {
            id,
            name: name.into(),
            wcet_us,
        }
    }
}

/// A recurrent DAG task `(T, G, 𝔇)` with one relative deadline per sink.
///
/// Construction validates the graph: acyclic, a single source, every vertex
/// reachable from it, and exactly one positive deadline per sink. Vertices
/// are addressed by dense index internally; indices follow the order of
/// [`DagTask::vertices`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTask", into = "RawTask")]
pub struct DagTask {
    task_id: TaskId,
    period: Time,
    vertices: Vec<Vertex>,
    edges: Vec<(VertexId, VertexId)>,
    deadlines: BTreeMap<VertexId, Time>,

    index: HashMap<VertexId, usize>,
    successors: Vec<Vec<usize>>,
    predecessors: Vec<Vec<usize>>,
    topo_order: Vec<usize>,
    source: usize,
    sinks: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    task_id: TaskId,
    period_us: Time,
    vertices: Vec<Vertex>,
    edges: Vec<(VertexId, VertexId)>,
    deadlines: BTreeMap<VertexId, Time>,
}

impl TryFrom<RawTask> for DagTask {
    type Error = ModelError;

    fn try_from(raw: RawTask) -> Result<Self, Self::Error> {
        DagTask::new(raw.task_id, raw.period_us, raw.vertices, raw.edges, raw.deadlines)
    }
}

impl From<DagTask> for RawTask {
    fn from(task: DagTask) -> Self {
        RawTask {
            task_id: task.task_id,
            period_us: task.period,
            vertices: task.vertices,
            edges: task.edges,
            deadlines: task.deadlines,
        }
    }
}

impl DagTask {
    pub fn new(
        task_id: TaskId,
        period: Time,
        vertices: Vec<Vertex>,
        edges: Vec<(VertexId, VertexId)>,
        deadlines: BTreeMap<VertexId, Time>,
    ) -> Result<Self, ModelError> {
        let task = Self::structure(task_id, period, vertices, edges)?;
        task.with_deadlines(deadlines)
    }

    /// Builds and validates the graph with a unit placeholder deadline on every
    /// sink; callers replace it through [`DagTask::with_deadlines`].
    pub(crate) fn structure(
        task_id: TaskId,
        period: Time,
        vertices: Vec<Vertex>,
        edges: Vec<(VertexId, VertexId)>,
    ) -> Result<Self, ModelError> {
        if vertices.is_empty() {
            return Err(ModelError::EmptyTask { task: task_id });
        }
        if period == 0 {
            return Err(ModelError::ZeroTaskPeriod { task: task_id });
        }
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.id, i).is_some() {
                return Err(ModelError::DuplicateVertexId {
                    task: task_id,
                    vertex: v.id,
                });
            }
            if v.wcet_us == 0 {
                return Err(ModelError::ZeroVertexWcet {
                    task: task_id,
                    vertex: v.id,
                });
            }
        }

        let n = vertices.len();
        let mut successors = vec![Vec::new(); n];
        let mut predecessors = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(src, dst) in &edges {
            let (Some(&s), Some(&d)) = (index.get(&src), index.get(&dst)) else {
                return Err(ModelError::UnknownEdgeVertex {
                    task: task_id,
                    src,
                    dst,
                });
            };
            if s == d || !seen.insert((s, d)) {
                return Err(ModelError::InvalidEdge {
                    task: task_id,
                    src,
                    dst,
                });
            }
            successors[s].push(d);
            predecessors[d].push(s);
        }

        // Kahn's algorithm; ties resolved by vertex index for a stable order.
        let mut in_deg: Vec<usize> = predecessors.iter().map(Vec::len).collect();
        let mut frontier: BTreeSet<usize> = (0..n).filter(|&i| in_deg[i] == 0).collect();
        let sources: Vec<usize> = frontier.iter().copied().collect();
        let mut topo_order = Vec::with_capacity(n);
        while let Some(v) = frontier.pop_first() {
            topo_order.push(v);
            for &s in &successors[v] {
                in_deg[s] -= 1;
                if in_deg[s] == 0 {
                    frontier.insert(s);
                }
            }
        }
        if topo_order.len() != n {
            return Err(ModelError::CyclicTask { task: task_id });
        }
        if sources.len() != 1 {
            return Err(ModelError::SourceCount {
                task: task_id,
                sources: sources.iter().map(|&i| vertices[i].id).collect(),
            });
        }
        let source = sources[0];

        // Acyclic with one in-degree-0 vertex already implies reachability,
        // but the explicit walk keeps the invariant independent of that fact.
        let mut reached = vec![false; n];
        reached[source] = true;
        for &v in &topo_order {
            if reached[v] {
                for &s in &successors[v] {
                    reached[s] = true;
                }
            }
        }
        if let Some(v) = reached.iter().position(|r| !r) {
            return Err(ModelError::Unreachable {
                task: task_id,
                vertex: vertices[v].id,
            });
        }

        let sinks: Vec<usize> = (0..n).filter(|&i| successors[i].is_empty()).collect();
        let deadlines = sinks.iter().map(|&i| (vertices[i].id, 1)).collect();
        Ok(Self {
            task_id,
            period,
            vertices,
            edges,
            deadlines,
            index,
            successors,
            predecessors,
            topo_order,
            source,
            sinks,
        })
    }

    /// Replaces the per-sink relative deadlines.
    pub fn with_deadlines(mut self, deadlines: BTreeMap<VertexId, Time>) -> Result<Self, ModelError> {
        for (&vertex, &d) in &deadlines {
            let Some(&i) = self.index.get(&vertex) else {
                return Err(ModelError::UnknownVertex {
                    task: self.task_id,
                    vertex,
                });
            };
            if !self.successors[i].is_empty() {
                return Err(ModelError::DeadlineOnNonSink {
                    task: self.task_id,
                    vertex,
                });
            }
            if d == 0 {
                return Err(ModelError::ZeroDeadline {
                    task: self.task_id,
                    vertex,
                });
            }
        }
        for &s in &self.sinks {
            let id = self.vertices[s].id;
            if !deadlines.contains_key(&id) {
                return Err(ModelError::MissingDeadline {
                    task: self.task_id,
                    vertex: id,
                });
            }
        }
        self.deadlines = deadlines;
        Ok(self)
    }

    pub fn task_id(&self) -> TaskId {
        self.task_id
    }

    pub fn period(&self) -> Time {
        self.period
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    /// Relative deadline per sink vertex id.
    pub fn deadlines(&self) -> &BTreeMap<VertexId, Time> {
        &self.deadlines
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, vertex: VertexId) -> Option<usize> {
        self.index.get(&vertex).copied()
    }

    pub(crate) fn require_index(&self, vertex: VertexId) -> Result<usize, ModelError> {
        self.index_of(vertex).ok_or(ModelError::UnknownVertex {
            task: self.task_id,
            vertex,
        })
    }

    pub fn successors(&self, idx: usize) -> &[usize] {
        &self.successors[idx]
    }

    pub fn predecessors(&self, idx: usize) -> &[usize] {
        &self.predecessors[idx]
    }

    pub fn topo_order(&self) -> &[usize] {
        &self.topo_order
    }

    pub fn source(&self) -> usize {
        self.source
    }

    /// Sink vertex indices in ascending index order.
    pub fn sinks(&self) -> &[usize] {
        &self.sinks
    }

    pub fn is_sink(&self, idx: usize) -> bool {
        self.successors[idx].is_empty()
    }

    /// Relative deadline of the sink at `idx`.
    pub fn deadline_of(&self, idx: usize) -> Option<Time> {
        self.deadlines.get(&self.vertices[idx].id).copied()
    }

    pub fn wcet_sum(&self) -> Time {
        self.vertices.iter().map(|v| v.wcet_us).sum()
    }
}

/// The task set τ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTaskSet", into = "RawTaskSet")]
pub struct TaskSet {
    tasks: Vec<DagTask>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTaskSet {
    tasks: Vec<DagTask>,
}

impl TryFrom<RawTaskSet> for TaskSet {
    type Error = ModelError;

    fn try_from(raw: RawTaskSet) -> Result<Self, Self::Error> {
        TaskSet::new(raw.tasks)
    }
}

impl From<TaskSet> for RawTaskSet {
    fn from(set: TaskSet) -> Self {
        RawTaskSet { tasks: set.tasks }
    }
}

impl TaskSet {
    pub fn new(tasks: Vec<DagTask>) -> Result<Self, ModelError> {
        if tasks.is_empty() {
            return Err(ModelError::EmptyTaskSet);
        }
        let mut ids = BTreeSet::new();
        for t in &tasks {
            if !ids.insert(t.task_id) {
                return Err(ModelError::DuplicateTaskId(t.task_id));
            }
        }
        Ok(Self { tasks })
    }

    pub fn tasks(&self) -> &[DagTask] {
        &self.tasks
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn task(&self, id: TaskId) -> Option<&DagTask> {
        self.tasks.iter().find(|t| t.task_id == id)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("task set serialization is infallible")
    }
}

/// Fixed execution time per `(task id, vertex id)` for one simulation run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExecAssignment {
    times: BTreeMap<TaskId, BTreeMap<VertexId, Time>>,
}

impl ExecAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every vertex runs for its WCET.
    pub fn wcet(taskset: &TaskSet) -> Self {
        let mut out = Self::new();
        for t in taskset.tasks() {
            for v in t.vertices() {
                out.insert(t.task_id(), v.id, v.wcet_us);
            }
        }
        out
    }

    pub fn insert(&mut self, task: TaskId, vertex: VertexId, time: Time) {
        self.times.entry(task).or_default().insert(vertex, time);
    }

    pub fn get(&self, task: TaskId, vertex: VertexId) -> Option<Time> {
        self.times.get(&task)?.get(&vertex).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TaskId, VertexId, Time)> + '_ {
        self.times
            .iter()
            .flat_map(|(&t, m)| m.iter().map(move |(&v, &x)| (t, v, x)))
    }

    /// Dense per-task vectors aligned with each task's vertex order, checking
    /// that every vertex has a positive time.
    pub fn dense(&self, taskset: &TaskSet) -> Result<Vec<Vec<Time>>, ModelError> {
        taskset
            .tasks()
            .iter()
            .map(|t| {
                t.vertices()
                    .iter()
                    .map(|v| match self.get(t.task_id(), v.id) {
                        Some(x) if x > 0 => Ok(x),
                        _ => Err(ModelError::InvalidExecAssignment {
                            task: t.task_id(),
                            vertex: v.id,
                        }),
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond_vertices() -> Vec<Vertex> {
        vec![
            Vertex::new(1, "a", 1),
            Vertex::new(2, "b", 2),
            Vertex::new(3, "c", 4),
            Vertex::new(4, "d", 1),
        ]
    }

    const DIAMOND_EDGES: [(VertexId, VertexId); 4] = [(1, 2), (1, 3), (2, 4), (3, 4)];

    #[test]
    fn builds_diamond() {
        let t = DagTask::new(
            0,
            100,
            diamond_vertices(),
            DIAMOND_EDGES.to_vec(),
            BTreeMap::from([(4, 6)]),
        )
        .unwrap();
        assert_eq!(t.source(), 0);
        assert_eq!(t.sinks(), &[3]);
        assert_eq!(t.topo_order(), &[0, 1, 2, 3]);
        assert_eq!(t.deadline_of(3), Some(6));
        assert_eq!(t.wcet_sum(), 8);
    }

    #[test]
    fn rejects_bad_structure() {
        let e = DagTask::new(0, 10, vec![], vec![], BTreeMap::new()).unwrap_err();
        assert_eq!(e, ModelError::EmptyTask { task: 0 });

        let e = DagTask::structure(0, 10, diamond_vertices(), vec![(1, 2), (2, 1), (1, 3), (3, 4)])
            .unwrap_err();
        assert_eq!(e, ModelError::CyclicTask { task: 0 });

        let e = DagTask::structure(0, 10, diamond_vertices(), vec![(1, 2), (3, 4)]).unwrap_err();
        assert_eq!(
            e,
            ModelError::SourceCount {
                task: 0,
                sources: vec![1, 3]
            }
        );

        let e = DagTask::structure(0, 10, diamond_vertices(), vec![(1, 9)]).unwrap_err();
        assert!(matches!(e, ModelError::UnknownEdgeVertex { .. }));

        let e = DagTask::structure(0, 10, diamond_vertices(), vec![(1, 2), (1, 2)]).unwrap_err();
        assert!(matches!(e, ModelError::InvalidEdge { .. }));
    }

    #[test]
    fn deadlines_must_cover_exactly_the_sinks() {
        let base = DagTask::structure(0, 100, diamond_vertices(), DIAMOND_EDGES.to_vec()).unwrap();
        assert_eq!(
            base.clone().with_deadlines(BTreeMap::new()).unwrap_err(),
            ModelError::MissingDeadline { task: 0, vertex: 4 }
        );
        assert_eq!(
            base.clone()
                .with_deadlines(BTreeMap::from([(4, 6), (2, 3)]))
                .unwrap_err(),
            ModelError::DeadlineOnNonSink { task: 0, vertex: 2 }
        );
        assert_eq!(
            base.with_deadlines(BTreeMap::from([(4, 0)])).unwrap_err(),
            ModelError::ZeroDeadline { task: 0, vertex: 4 }
        );
    }

    #[test]
    fn taskset_json_schema() {
        let text = r#"{"tasks": [{"task_id": 3, "period_us": 100,
            "vertices": [{"id": 1, "name": "a", "wcet_us": 2}, {"id": 2, "name": "b", "wcet_us": 3}],
            "edges": [[1, 2]], "deadlines": {"2": 6}}]}"#;
        let set = TaskSet::from_json(text).unwrap();
        assert_eq!(set.tasks()[0].deadlines(), &BTreeMap::from([(2, 6)]));
        assert_eq!(TaskSet::from_json(&set.to_json_pretty()).unwrap(), set);

        let extra = text.replace("\"period_us\": 100,", "\"period_us\": 100, \"offset\": 0,");
        assert!(TaskSet::from_json(&extra).is_err());
        let bad = text.replace("\"2\": 6", "\"1\": 6");
        assert!(TaskSet::from_json(&bad).is_err());
        assert!(TaskSet::from_json(r#"{"tasks": []}"#).is_err());
    }

    #[test]
    fn duplicate_task_ids_rejected() {
        let t = DagTask::new(
            1,
            10,
            vec![Vertex::new(1, "a", 1)],
            vec![],
            BTreeMap::from([(1, 5)]),
        )
        .unwrap();
        assert_eq!(
            TaskSet::new(vec![t.clone(), t]).unwrap_err(),
            ModelError::DuplicateTaskId(1)
        );
    }

    #[test]
    fn dense_exec_requires_positive_times() {
        let t = DagTask::new(
            1,
            10,
            vec![Vertex::new(1, "a", 1), Vertex::new(2, "b", 1)],
            vec![(1, 2)],
            BTreeMap::from([(2, 5)]),
        )
        .unwrap();
        let set = TaskSet::new(vec![t]).unwrap();
        let mut exec = ExecAssignment::new();
        exec.insert(1, 1, 3);
        assert_eq!(
            exec.dense(&set).unwrap_err(),
            ModelError::InvalidExecAssignment { task: 1, vertex: 2 }
        );
        exec.insert(1, 2, 0);
        assert!(exec.dense(&set).is_err());
        exec.insert(1, 2, 4);
        assert_eq!(exec.dense(&set).unwrap(), vec![vec![3, 4]]);
    }
}

use std::collections::{BTreeMap, BTreeSet};

use super::{
    assign_deadlines, CallbackGraph, CallbackId, CallbackKind, DagTask, ModelError, TaskSet, Vertex,
};
use crate::rational::Rational;

/// Cuts every queue edge and turns each weakly connected component of the
/// remaining publish/subscribe graph into one DAG task.
///
/// Each component must have exactly one source, and that source must be its
/// only timer callback; the timer period becomes the task period. Task ids
/// are assigned from 0 in ascending order of the source callback id. Vertex
/// ids are the callback ids, so the union of all task vertices is exactly the
/// callback set.
pub fn decompose(graph: &CallbackGraph, beta: Rational) -> Result<TaskSet, ModelError> {
    graph.validate()?;
    if *beta.numer() == 0 {
        return Err(ModelError::NonPositiveBeta);
    }
    check_pubsub_acyclic(graph)?;

    let ids: Vec<CallbackId> = graph.callbacks.iter().map(|c| c.id).collect();
    let position: BTreeMap<CallbackId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();

    // Union-find over pubsub edges.
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in graph.pubsub_edges() {
        let a = find(&mut parent, position[&e.src]);
        let b = find(&mut parent, position[&e.dst]);
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut components: BTreeMap<usize, BTreeSet<CallbackId>> = BTreeMap::new();
    for (i, &id) in ids.iter().enumerate() {
        let root = find(&mut parent, i);
        components.entry(root).or_default().insert(id);
    }

    let in_degree = graph.pubsub_in_degree();
    let mut shaped = Vec::with_capacity(components.len());
    for members in components.into_values() {
        let callbacks: Vec<CallbackId> = members.iter().copied().collect();
        let sources: Vec<CallbackId> = callbacks.iter().copied().filter(|id| in_degree[id] == 0).collect();
        let timers: Vec<CallbackId> = callbacks
            .iter()
            .copied()
            .filter(|&id| graph.callback(id).map(|c| c.kind) == Some(CallbackKind::Timer))
            .collect();
        if timers.is_empty() {
            return Err(ModelError::ComponentWithoutTimerSource { callbacks });
        }
        if sources.len() > 1 {
            return Err(ModelError::MultipleSources { sources, callbacks });
        }
        if timers.len() > 1 {
            return Err(ModelError::MultipleTimers { timers, callbacks });
        }
        let source = sources[0];
        if source != timers[0] {
            return Err(ModelError::ComponentWithoutTimerSource { callbacks });
        }
        shaped.push((source, members));
    }
    shaped.sort_by_key(|(source, _)| *source);

    let mut tasks = Vec::with_capacity(shaped.len());
    for (task_id, (source, members)) in shaped.into_iter().enumerate() {
        let task_id = u32::try_from(task_id).map_err(|_| ModelError::Overflow { what: "task id" })?;
        let period = graph
            .callback(source)
            .and_then(|c| c.period_us)
            .expect("validated timer has a period");
        let vertices: Vec<Vertex> = graph
            .callbacks
            .iter()
            .filter(|c| members.contains(&c.id))
            .map(|c| Vertex::new(c.id, c.name.clone(), c.wcet_us))
            .collect();
        let edges = graph
            .pubsub_edges()
            .filter(|e| members.contains(&e.src))
            .map(|e| (e.src, e.dst))
            .collect();
        let task = DagTask::structure(task_id, period, vertices, edges)?;
        let deadlines = assign_deadlines(&task, beta)?;
        tasks.push(task.with_deadlines(deadlines)?);
    }
    TaskSet::new(tasks)
}

fn check_pubsub_acyclic(graph: &CallbackGraph) -> Result<(), ModelError> {
    let mut in_deg = graph.pubsub_in_degree();
    let mut succ: BTreeMap<CallbackId, Vec<CallbackId>> = BTreeMap::new();
    for e in graph.pubsub_edges() {
        succ.entry(e.src).or_default().push(e.dst);
    }
    let mut frontier: Vec<CallbackId> = in_deg.iter().filter(|(_, &d)| d == 0).map(|(&id, _)| id).collect();
    while let Some(v) = frontier.pop() {
        for &s in succ.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            let d = in_deg.get_mut(&s).expect("validated endpoint");
            *d -= 1;
            if *d == 0 {
                frontier.push(s);
            }
        }
        in_deg.remove(&v);
    }
    if in_deg.is_empty() {
        Ok(())
    } else {
        Err(ModelError::CycleAfterSplit {
            callbacks: in_deg.into_keys().collect(),
        })
    }
}

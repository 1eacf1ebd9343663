use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;

use super::{DagTask, ExecAssignment, ModelError, TaskId, TaskSet, VertexId};
use crate::rational::{self, Rational};
use crate::time::Time;

/// Longest source-to-vertex path length for every vertex, weighting each
/// vertex by `weight(idx)` and counting both endpoints.
fn longest_paths(task: &DagTask, weight: impl Fn(usize) -> Time) -> Vec<Time> {
    let mut dist = vec![0; task.len()];
    for &v in task.topo_order() {
        let best_pred = task
            .predecessors(v)
            .iter()
            .map(|&p| dist[p])
            .max()
            .unwrap_or(0);
        dist[v] = best_pred + weight(v);
    }
    dist
}

/// WCET critical path length from the source to `sink`.
pub fn critical_path_length(task: &DagTask, sink: VertexId) -> Result<Time, ModelError> {
    let idx = task.require_index(sink)?;
    if !task.is_sink(idx) {
        return Err(ModelError::NotASink {
            task: task.task_id(),
            vertex: sink,
        });
    }
    let dist = longest_paths(task, |i| task.vertices()[i].wcet_us);
    Ok(dist[idx])
}

/// `D(sink) = ceil(beta · CPL(sink))` for every sink.
pub fn assign_deadlines(task: &DagTask, beta: Rational) -> Result<BTreeMap<VertexId, Time>, ModelError> {
    if *beta.numer() == 0 {
        return Err(ModelError::NonPositiveBeta);
    }
    let dist = longest_paths(task, |i| task.vertices()[i].wcet_us);
    task.sinks()
        .iter()
        .map(|&s| {
            let scaled = beta * Ratio::from_integer(u128::from(dist[s]));
            let d = Time::try_from(rational::ceil(scaled))
                .map_err(|_| ModelError::Overflow { what: "relative deadline" })?;
            Ok((task.vertices()[s].id, d))
        })
        .collect()
}

/// Sinks reachable from `vertex` through at least one edge.
pub fn descendant_sinks(task: &DagTask, vertex: VertexId) -> Result<BTreeSet<VertexId>, ModelError> {
    let start = task.require_index(vertex)?;
    let mut visited = vec![false; task.len()];
    let mut stack: Vec<usize> = task.successors(start).to_vec();
    let mut out = BTreeSet::new();
    while let Some(v) = stack.pop() {
        if std::mem::replace(&mut visited[v], true) {
            continue;
        }
        if task.is_sink(v) {
            out.insert(task.vertices()[v].id);
        }
        stack.extend_from_slice(task.successors(v));
    }
    Ok(out)
}

/// Per vertex, the smallest relative deadline among its descendant-or-self
/// sinks. The runtime RAD of instance `k` is this value plus `k·T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadBaseTable {
    task_ids: Vec<TaskId>,
    bases: Vec<Vec<Time>>,
}

impl RadBaseTable {
    /// Entry by task position and vertex index.
    pub fn base(&self, task_idx: usize, vertex_idx: usize) -> Time {
        self.bases[task_idx][vertex_idx]
    }

    pub fn task_bases(&self, task_idx: usize) -> &[Time] {
        &self.bases[task_idx]
    }

    pub fn get(&self, taskset: &TaskSet, task: TaskId, vertex: VertexId) -> Option<Time> {
        let ti = self.task_ids.iter().position(|&t| t == task)?;
        let vi = taskset.tasks().get(ti)?.index_of(vertex)?;
        Some(self.bases[ti][vi])
    }
}

pub fn rad_base_table(taskset: &TaskSet) -> RadBaseTable {
    let bases = taskset
        .tasks()
        .iter()
        .map(|task| {
            let mut base = vec![Time::MAX; task.len()];
            for &v in task.topo_order().iter().rev() {
                base[v] = match task.deadline_of(v) {
                    Some(d) if task.is_sink(v) => d,
                    _ => task
                        .successors(v)
                        .iter()
                        .map(|&s| base[s])
                        .min()
                        .expect("non-sink vertex has a successor"),
                };
            }
            base
        })
        .collect();
    RadBaseTable {
        task_ids: taskset.tasks().iter().map(DagTask::task_id).collect(),
        bases,
    }
}

/// Least common multiple of all periods.
pub fn hyper_period(taskset: &TaskSet) -> Result<Time, ModelError> {
    taskset.tasks().iter().try_fold(1, |acc: Time, t| {
        let p = t.period();
        (acc / num_integer::gcd(acc, p))
            .checked_mul(p)
            .ok_or(ModelError::Overflow { what: "hyper-period" })
    })
}

/// `Σ_x (Σ_v exec(v)) / T_x`, exactly.
pub fn total_utilization(taskset: &TaskSet, exec: &ExecAssignment) -> Result<Rational, ModelError> {
    let dense = exec.dense(taskset)?;
    Ok(utilization_dense(taskset, &dense))
}

pub(crate) fn utilization_dense(taskset: &TaskSet, dense: &[Vec<Time>]) -> Rational {
    taskset
        .tasks()
        .iter()
        .zip(dense)
        .map(|(t, times)| {
            let sum: Time = times.iter().sum();
            Ratio::new(u128::from(sum), u128::from(t.period()))
        })
        .fold(Ratio::from_integer(0), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taskmodel::Vertex;

    fn chain() -> DagTask {
        DagTask::new(
            0,
            100,
            vec![Vertex::new(1, "a", 2), Vertex::new(2, "b", 3)],
            vec![(1, 2)],
            BTreeMap::from([(2, 5)]),
        )
        .unwrap()
    }

    fn diamond(d: Time) -> DagTask {
        DagTask::new(
            0,
            100,
            vec![
                Vertex::new(1, "a", 1),
                Vertex::new(2, "b", 2),
                Vertex::new(3, "c", 4),
                Vertex::new(4, "d", 1),
            ],
            vec![(1, 2), (1, 3), (2, 4), (3, 4)],
            BTreeMap::from([(4, d)]),
        )
        .unwrap()
    }

    fn tree() -> DagTask {
        DagTask::new(
            0,
            50,
            vec![Vertex::new(1, "a", 1), Vertex::new(2, "b", 1), Vertex::new(3, "c", 1)],
            vec![(1, 2), (1, 3)],
            BTreeMap::from([(2, 10), (3, 7)]),
        )
        .unwrap()
    }

    fn single(id: TaskId, period: Time, wcet: Time) -> DagTask {
        DagTask::new(
            id,
            period,
            vec![Vertex::new(1, "a", wcet)],
            vec![],
            BTreeMap::from([(1, period)]),
        )
        .unwrap()
    }

    fn r(n: u128, d: u128) -> Rational {
        Ratio::new(n, d)
    }

    #[test]
    fn critical_path_examples() {
        assert_eq!(critical_path_length(&chain(), 2).unwrap(), 5);
        assert_eq!(critical_path_length(&diamond(6), 4).unwrap(), 6);
        assert_eq!(critical_path_length(&single(0, 10, 7), 1).unwrap(), 7);
        assert_eq!(
            critical_path_length(&chain(), 1).unwrap_err(),
            ModelError::NotASink { task: 0, vertex: 1 }
        );
        assert!(matches!(
            critical_path_length(&chain(), 42),
            Err(ModelError::UnknownVertex { .. })
        ));
    }

    #[test]
    fn deadline_examples() {
        assert_eq!(assign_deadlines(&diamond(1), r(1, 1)).unwrap(), BTreeMap::from([(4, 6)]));
        assert_eq!(assign_deadlines(&diamond(1), r(3, 2)).unwrap(), BTreeMap::from([(4, 9)]));
        assert_eq!(assign_deadlines(&chain(), r(2, 1)).unwrap(), BTreeMap::from([(2, 10)]));
        // ceil(1.2 * 6) = ceil(7.2)
        assert_eq!(assign_deadlines(&diamond(1), r(6, 5)).unwrap(), BTreeMap::from([(4, 8)]));
        assert_eq!(
            assign_deadlines(&diamond(1), r(0, 1)).unwrap_err(),
            ModelError::NonPositiveBeta
        );
    }

    #[test]
    fn descendant_sink_examples() {
        assert_eq!(descendant_sinks(&diamond(6), 1).unwrap(), BTreeSet::from([4]));
        assert!(descendant_sinks(&diamond(6), 4).unwrap().is_empty());
        assert_eq!(descendant_sinks(&tree(), 1).unwrap(), BTreeSet::from([2, 3]));
        assert!(descendant_sinks(&tree(), 9).is_err());
    }

    #[test]
    fn rad_base_examples() {
        let set = TaskSet::new(vec![diamond(6)]).unwrap();
        let table = rad_base_table(&set);
        assert_eq!(table.task_bases(0), &[6, 6, 6, 6]);

        let set = TaskSet::new(vec![tree()]).unwrap();
        let table = rad_base_table(&set);
        assert_eq!(table.get(&set, 0, 1), Some(7));
        assert_eq!(table.get(&set, 0, 2), Some(10));
        assert_eq!(table.get(&set, 0, 3), Some(7));
        assert_eq!(table.get(&set, 5, 1), None);
    }

    #[test]
    fn hyper_period_examples() {
        let set = TaskSet::new(vec![
            single(0, 20_000, 1),
            single(1, 100_000, 1),
            single(2, 150_000, 1),
        ])
        .unwrap();
        assert_eq!(hyper_period(&set).unwrap(), 300_000);
        let set = TaskSet::new(vec![single(0, 100_000, 1)]).unwrap();
        assert_eq!(hyper_period(&set).unwrap(), 100_000);

        let big = TaskSet::new(vec![
            single(0, u64::MAX - 1, 1),
            single(1, u64::MAX - 2, 1),
        ])
        .unwrap();
        assert_eq!(
            hyper_period(&big).unwrap_err(),
            ModelError::Overflow { what: "hyper-period" }
        );
    }

    #[test]
    fn utilization_examples() {
        let one = DagTask::new(
            0,
            100,
            vec![Vertex::new(1, "a", 10), Vertex::new(2, "b", 20)],
            vec![(1, 2)],
            BTreeMap::from([(2, 30)]),
        )
        .unwrap();
        let set = TaskSet::new(vec![one.clone()]).unwrap();
        assert_eq!(total_utilization(&set, &ExecAssignment::wcet(&set)).unwrap(), r(3, 10));

        let set = TaskSet::new(vec![one, single(1, 20, 10)]).unwrap();
        assert_eq!(total_utilization(&set, &ExecAssignment::wcet(&set)).unwrap(), r(4, 5));
        assert!(total_utilization(&set, &ExecAssignment::new()).is_err());
    }
}

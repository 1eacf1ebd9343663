//! Test-only oracles: random DAG generation, brute-force path enumeration
//! and a tick-by-tick reference simulator. None of this reuses the library's
//! scheduling or analysis code paths.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use mdsched::simulator::{Mode, Policy, SimResult, TraceKind};
use mdsched::taskmodel::{DagTask, TaskId, TaskSet, Vertex, VertexId};
use mdsched::Time;
use rand::seq::SliceRandom;
use rand::Rng;

/// Random single-source DAG built layer by layer. Vertex ids are a random
/// permutation so that id order and index order disagree.
pub struct RandomDag {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(VertexId, VertexId)>,
}

pub fn random_dag<R: Rng>(rng: &mut R, max_vertices: usize, max_wcet: Time) -> RandomDag {
    let n = rng.random_range(1..=max_vertices);
    let mut ids: Vec<VertexId> = (1..=(n as VertexId * 3)).collect();
    ids.shuffle(rng);
    ids.truncate(n);
    let vertices: Vec<Vertex> = ids
        .iter()
        .map(|&id| Vertex::new(id, format!("v{id}"), rng.random_range(1..=max_wcet)))
        .collect();

    // layer 0 is the source; every later vertex gets a parent in an earlier layer
    let mut layer_of = vec![0usize];
    let mut current = 1;
    while layer_of.len() < n {
        let width = rng.random_range(1..=3).min(n - layer_of.len());
        for _ in 0..width {
            layer_of.push(current);
        }
        current += 1;
    }
    let mut edges = BTreeSet::new();
    for v in 1..n {
        let earlier: Vec<usize> = (0..v).filter(|&u| layer_of[u] < layer_of[v]).collect();
        let parent = earlier[rng.random_range(0..earlier.len())];
        edges.insert((parent, v));
        for &u in &earlier {
            if rng.random_bool(0.25) {
                edges.insert((u, v));
            }
        }
    }
    RandomDag {
        edges: edges.into_iter().map(|(a, b)| (ids[a], ids[b])).collect(),
        vertices,
    }
}

pub fn sinks_of(vertices: &[Vertex], edges: &[(VertexId, VertexId)]) -> Vec<VertexId> {
    vertices
        .iter()
        .map(|v| v.id)
        .filter(|id| !edges.iter().any(|(s, _)| s == id))
        .collect()
}

pub fn source_of(vertices: &[Vertex], edges: &[(VertexId, VertexId)]) -> VertexId {
    let sources: Vec<_> = vertices
        .iter()
        .map(|v| v.id)
        .filter(|id| !edges.iter().any(|(_, d)| d == id))
        .collect();
    assert_eq!(sources.len(), 1);
    sources[0]
}

/// Every source-to-`target` path, by DFS.
pub fn enumerate_paths(task: &DagTask, target: VertexId) -> Vec<Vec<VertexId>> {
    fn walk(
        task: &DagTask,
        at: VertexId,
        target: VertexId,
        path: &mut Vec<VertexId>,
        out: &mut Vec<Vec<VertexId>>,
    ) {
        path.push(at);
        if at == target {
            out.push(path.clone());
        } else {
            for &(s, d) in task.edges() {
                if s == at {
                    walk(task, d, target, path, out);
                }
            }
        }
        path.pop();
    }
    let source = source_of(task.vertices(), task.edges());
    let mut out = Vec::new();
    walk(task, source, target, &mut Vec::new(), &mut out);
    out
}

pub fn brute_force_cpl(task: &DagTask, sink: VertexId) -> Time {
    let wcet: BTreeMap<VertexId, Time> = task.vertices().iter().map(|v| (v.id, v.wcet_us)).collect();
    enumerate_paths(task, sink)
        .iter()
        .map(|p| p.iter().map(|v| wcet[v]).sum())
        .max()
        .expect("every sink is reachable from the source")
}

/// Vertices reachable from `v` through at least one edge, by DFS.
pub fn brute_force_descendants(task: &DagTask, v: VertexId) -> BTreeSet<VertexId> {
    let mut out = BTreeSet::new();
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        for &(s, d) in task.edges() {
            if s == x && out.insert(d) {
                stack.push(d);
            }
        }
    }
    out
}

/// Minimum deadline over descendant-or-self sinks.
pub fn brute_force_rad_base(task: &DagTask, v: VertexId) -> Time {
    let mut candidates = brute_force_descendants(task, v);
    candidates.insert(v);
    candidates
        .iter()
        .filter_map(|id| task.deadlines().get(id).copied())
        .min()
        .expect("every vertex reaches a sink")
}

/// Random task set for simulator cross-checks.
pub fn random_taskset<R: Rng>(
    rng: &mut R,
    max_tasks: usize,
    max_vertices: usize,
    max_time: Time,
) -> TaskSet {
    let n_tasks = rng.random_range(1..=max_tasks);
    let mut tasks = Vec::new();
    let mut task_ids: Vec<TaskId> = (0..10).collect();
    task_ids.shuffle(rng);
    for &task_id in task_ids.iter().take(n_tasks) {
        let dag = random_dag(rng, max_vertices, max_time);
        let period = rng.random_range(5..=60);
        let deadlines = sinks_of(&dag.vertices, &dag.edges)
            .into_iter()
            .map(|s| (s, rng.random_range(1..=80)))
            .collect();
        tasks.push(DagTask::new(task_id, period, dag.vertices, dag.edges, deadlines).unwrap());
    }
    TaskSet::new(tasks).unwrap()
}

/// `(primary, secondary, task_id, k, vertex)`; lower runs first.
pub type RefKey = (Time, Time, TaskId, u64, VertexId);

#[derive(Debug, Clone)]
pub struct RefInstance {
    pub task_id: TaskId,
    pub period: Time,
    pub k: u64,
    pub vertex: VertexId,
    pub ready_at: Option<Time>,
    remaining: Time,
    preds_left: usize,
    running: bool,
    done: bool,
    pub segments: Vec<(Time, Option<Time>)>,
}

/// Execution segments per `(task, k, vertex)`; open segments were still
/// running at the end of the window.
pub type Segments = BTreeMap<(TaskId, u64, VertexId), Vec<(Time, Option<Time>)>>;

/// Advances time one unit at a time, applying the dispatch rules directly:
/// completions, then releases, then dispatch by `key`.
pub fn tick_simulate(
    set: &TaskSet,
    exec: &BTreeMap<(TaskId, VertexId), Time>,
    cores: usize,
    duration: Time,
    mode: Mode,
    key: &dyn Fn(&RefInstance) -> RefKey,
) -> Segments {
    let mut insts: Vec<RefInstance> = Vec::new();
    for t in 0..=duration {
        // completions
        let mut finished = Vec::new();
        for (i, inst) in insts.iter_mut().enumerate() {
            if inst.running && inst.remaining == 0 {
                inst.running = false;
                inst.done = true;
                inst.segments.last_mut().unwrap().1 = Some(t);
                finished.push(i);
            }
        }
        for i in finished {
            let (task_id, k, vertex) = (insts[i].task_id, insts[i].k, insts[i].vertex);
            let task = set.tasks().iter().find(|x| x.task_id() == task_id).unwrap();
            for &(s, d) in task.edges() {
                if s != vertex {
                    continue;
                }
                let succ = insts
                    .iter_mut()
                    .find(|x| x.task_id == task_id && x.k == k && x.vertex == d)
                    .unwrap();
                succ.preds_left -= 1;
                if succ.preds_left == 0 {
                    succ.ready_at = Some(t);
                }
            }
        }
        if t == duration {
            break;
        }
        // releases
        for task in set.tasks() {
            if t % task.period() != 0 {
                continue;
            }
            let k = t / task.period();
            for v in task.vertices() {
                let preds = task.edges().iter().filter(|(_, d)| *d == v.id).count();
                insts.push(RefInstance {
                    task_id: task.task_id(),
                    period: task.period(),
                    k,
                    vertex: v.id,
                    ready_at: (preds == 0).then_some(t),
                    remaining: exec[&(task.task_id(), v.id)],
                    preds_left: preds,
                    running: false,
                    done: false,
                    segments: Vec::new(),
                });
            }
        }
        // dispatch
        let mut waiting: Vec<usize> = (0..insts.len())
            .filter(|&i| !insts[i].running && !insts[i].done && insts[i].ready_at.is_some())
            .collect();
        waiting.sort_by_key(|&i| key(&insts[i]));
        match mode {
            Mode::NonPreemptive => {
                let busy = insts.iter().filter(|x| x.running).count();
                for &i in waiting.iter().take(cores - busy) {
                    insts[i].running = true;
                    insts[i].segments.push((t, None));
                }
            }
            Mode::Preemptive => {
                let mut pool: Vec<usize> = (0..insts.len()).filter(|&i| insts[i].running).collect();
                pool.extend(waiting);
                pool.sort_by_key(|&i| key(&insts[i]));
                let chosen: BTreeSet<usize> = pool.iter().take(cores).copied().collect();
                for &i in &pool {
                    let inst = &mut insts[i];
                    match (inst.running, chosen.contains(&i)) {
                        (true, false) => {
                            inst.running = false;
                            inst.segments.last_mut().unwrap().1 = Some(t);
                        }
                        (false, true) => {
                            inst.running = true;
                            inst.segments.push((t, None));
                        }
                        _ => {}
                    }
                }
            }
        }
        // one unit of progress
        for inst in insts.iter_mut().filter(|x| x.running) {
            inst.remaining -= 1;
        }
    }
    insts
        .into_iter()
        .filter(|x| !x.segments.is_empty())
        .map(|x| ((x.task_id, x.k, x.vertex), x.segments))
        .collect()
}

/// Reference keys built from brute-force tables.
pub fn reference_key(set: &TaskSet, policy: Policy) -> impl Fn(&RefInstance) -> RefKey {
    let bases: BTreeMap<(TaskId, VertexId), Time> = set
        .tasks()
        .iter()
        .flat_map(|t| t.vertices().iter().map(move |v| ((t.task_id(), v.id), brute_force_rad_base(t, v.id))))
        .collect();
    move |x: &RefInstance| {
        let ready = x.ready_at.unwrap();
        match policy {
            Policy::GedfRad => (bases[&(x.task_id, x.vertex)] + x.k * x.period, 0, x.task_id, x.k, x.vertex),
            Policy::WcFifo => (ready, 0, x.task_id, x.k, x.vertex),
            Policy::Rm => (x.period, ready, x.task_id, x.k, x.vertex),
        }
    }
}

/// Classic job-level GEDF: every vertex of job `k` carries the job's
/// absolute deadline. Only meaningful for single-sink tasks.
pub fn job_level_gedf_key(set: &TaskSet) -> impl Fn(&RefInstance) -> RefKey {
    let deadline: BTreeMap<TaskId, Time> = set
        .tasks()
        .iter()
        .map(|t| {
            assert_eq!(t.deadlines().len(), 1);
            (t.task_id(), *t.deadlines().values().next().unwrap())
        })
        .collect();
    move |x: &RefInstance| (deadline[&x.task_id] + x.k * x.period, 0, x.task_id, x.k, x.vertex)
}

/// Segments reconstructed from an engine trace.
pub fn segments_from_trace(result: &SimResult) -> Segments {
    let mut out: Segments = BTreeMap::new();
    for ev in &result.trace {
        let key = (ev.task, ev.k, ev.vertex);
        match ev.event {
            TraceKind::Start => out.entry(key).or_default().push((ev.t_us, None)),
            TraceKind::Finish | TraceKind::Preempt => {
                let seg = out.get_mut(&key).and_then(|s| s.last_mut()).expect("segment open");
                assert!(seg.1.is_none());
                seg.1 = Some(ev.t_us);
            }
            TraceKind::Release | TraceKind::Miss => {}
        }
    }
    out
}

pub fn exec_map(set: &TaskSet, exec: &mdsched::ExecAssignment) -> BTreeMap<(TaskId, VertexId), Time> {
    set.tasks()
        .iter()
        .flat_map(|t| t.vertices().iter().map(move |v| (t.task_id(), v.id)))
        .map(|(t, v)| ((t, v), exec.get(t, v).unwrap()))
        .collect()
}

/// Random execution times in `1..=wcet`.
pub fn random_exec<R: Rng>(rng: &mut R, set: &TaskSet) -> mdsched::ExecAssignment {
    let mut exec = mdsched::ExecAssignment::new();
    for t in set.tasks() {
        for v in t.vertices() {
            exec.insert(t.task_id(), v.id, rng.random_range(1..=v.wcet_us));
        }
    }
    exec
}

pub fn report(name: &str, ok: bool, detail: &str) {
    println!("[{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
}

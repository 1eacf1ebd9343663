use std::collections::BTreeSet;

use super::{
    detect_miss, InstanceState, Mode, Policy, PriorityKey, SimError, SimResult, SimWarning,
    SinkRecord, StaticTables, TraceEvent, TraceKind, VertexInstance,
};
use crate::taskmodel::{hyper_period, rad_base_table, utilization_dense, DagTask, ExecAssignment, TaskSet};
use crate::time::Time;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub cores: usize,
    pub duration: Time,
    pub policy: Policy,
    pub mode: Mode,
    pub trace: bool,
}

impl SimConfig {
    pub fn new(cores: usize, duration: Time, policy: Policy) -> Self {
        Self {
            cores,
            duration,
            policy,
            mode: Mode::NonPreemptive,
            trace: false,
        }
    }

    pub fn mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn trace(mut self, on: bool) -> Self {
        self.trace = on;
        self
    }
}

pub fn static_tables(taskset: &TaskSet) -> StaticTables {
    StaticTables {
        rad: rad_base_table(taskset),
        periods: taskset.tasks().iter().map(DagTask::period).collect(),
    }
}

/// Simulates `taskset` with fixed per-vertex execution times.
///
/// The result is a pure function of the arguments.
pub fn run(taskset: &TaskSet, exec: &ExecAssignment, config: &SimConfig) -> Result<SimResult, SimError> {
    run_with_tables(taskset, &static_tables(taskset), exec, config)
}

/// As [`run`], reusing precomputed tables across runs of one task set.
pub fn run_with_tables(
    taskset: &TaskSet,
    tables: &StaticTables,
    exec: &ExecAssignment,
    config: &SimConfig,
) -> Result<SimResult, SimError> {
    if config.cores == 0 {
        return Err(SimError::NoCores);
    }
    if config.duration == 0 {
        return Err(SimError::ZeroDuration);
    }
    let exec = exec.dense(taskset)?;
    let mut warnings = Vec::new();
    if let Ok(h) = hyper_period(taskset) {
        if !config.duration.is_multiple_of(h) {
            warnings.push(SimWarning::DurationNotHyperPeriodMultiple {
                duration_us: config.duration,
                hyper_period_us: h,
            });
        }
    }
    let realized_utilization = utilization_dense(taskset, &exec);

    let mut engine = Engine::new(taskset, tables, exec, config);
    engine.simulate();
    let (sinks, misses, trace) = engine.finish();

    Ok(SimResult {
        policy: config.policy,
        mode: config.mode,
        cores: config.cores,
        duration_us: config.duration,
        sinks,
        misses,
        realized_utilization,
        warnings,
        trace,
    })
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    inst: usize,
    segment_start: Time,
}

impl Slot {
    fn completes_at(&self, instances: &[VertexInstance]) -> Time {
        self.segment_start + instances[self.inst].remaining
    }
}

struct Engine<'a> {
    set: &'a TaskSet,
    tables: &'a StaticTables,
    exec: Vec<Vec<Time>>,
    config: &'a SimConfig,

    instances: Vec<VertexInstance>,
    /// First instance index of the job each instance belongs to.
    job_base: Vec<usize>,
    keys: Vec<PriorityKey>,
    unfinished_preds: Vec<usize>,
    ready: BTreeSet<(PriorityKey, usize)>,
    cores: Vec<Option<Slot>>,
    next_job: Vec<u64>,
    trace: Vec<TraceEvent>,
}

impl<'a> Engine<'a> {
    fn new(set: &'a TaskSet, tables: &'a StaticTables, exec: Vec<Vec<Time>>, config: &'a SimConfig) -> Self {
        Self {
            set,
            tables,
            exec,
            config,
            instances: Vec::new(),
            job_base: Vec::new(),
            keys: Vec::new(),
            unfinished_preds: Vec::new(),
            ready: BTreeSet::new(),
            cores: vec![None; config.cores],
            next_job: vec![0; set.len()],
            trace: Vec::new(),
        }
    }

    fn simulate(&mut self) {
        let duration = self.config.duration;
        let mut now = 0;
        loop {
            self.complete_at(now);
            if now < duration {
                self.release_at(now);
                self.dispatch(now);
            }
            match self.next_event_after(now) {
                Some(t) if t <= duration => now = t,
                _ => break,
            }
        }
    }

    fn next_event_after(&self, now: Time) -> Option<Time> {
        let duration = self.config.duration;
        let release = self
            .set
            .tasks()
            .iter()
            .zip(&self.next_job)
            .map(|(t, &k)| k * t.period())
            .filter(|&r| r < duration)
            .min();
        let completion = self
            .cores
            .iter()
            .flatten()
            .map(|s| s.completes_at(&self.instances))
            .min();
        let next = match (release, completion) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        debug_assert!(next.is_none_or(|t| t > now));
        next
    }

    fn complete_at(&mut self, now: Time) {
        for core in 0..self.cores.len() {
            let Some(slot) = self.cores[core] else { continue };
            if slot.completes_at(&self.instances) != now {
                continue;
            }
            self.cores[core] = None;
            let i = slot.inst;
            let inst = &mut self.instances[i];
            inst.remaining = 0;
            inst.state = InstanceState::Done;
            inst.finished_at = Some(now);
            let (task_idx, vertex_idx) = (inst.task_idx, inst.vertex_idx);
            self.record(now, Some(core), i, TraceKind::Finish);

            let base = self.job_base[i];
            let task = &self.set.tasks()[task_idx];
            for &s in task.successors(vertex_idx) {
                let succ = base + s;
                self.unfinished_preds[succ] -= 1;
                if self.unfinished_preds[succ] == 0 {
                    self.make_ready(succ, now);
                }
            }
        }
        if self.config.mode == Mode::Preemptive {
            for slot in self.cores.iter_mut().flatten() {
                let inst = &mut self.instances[slot.inst];
                inst.remaining -= now - slot.segment_start;
                slot.segment_start = now;
            }
        }
    }

    fn release_at(&mut self, now: Time) {
        for task_idx in 0..self.set.len() {
            let task = &self.set.tasks()[task_idx];
            let k = self.next_job[task_idx];
            if k * task.period() != now {
                continue;
            }
            self.next_job[task_idx] += 1;
            let base = self.instances.len();
            for (vertex_idx, v) in task.vertices().iter().enumerate() {
                let exec = self.exec[task_idx][vertex_idx];
                self.instances.push(VertexInstance::new(
                    task.task_id(),
                    task_idx,
                    k,
                    v.id,
                    vertex_idx,
                    exec,
                ));
                self.job_base.push(base);
                self.keys.push(PriorityKey {
                    primary: Time::MAX,
                    secondary: Time::MAX,
                    task_id: task.task_id(),
                    k,
                    vertex: v.id,
                });
                self.unfinished_preds.push(task.predecessors(vertex_idx).len());
            }
            let source = base + task.source();
            self.record(now, None, source, TraceKind::Release);
            self.make_ready(source, now);
        }
    }

    fn make_ready(&mut self, i: usize, now: Time) {
        let inst = &mut self.instances[i];
        inst.state = InstanceState::Ready;
        inst.ready_at = Some(now);
        let key = self.config.policy.key(inst, self.tables);
        self.keys[i] = key;
        self.ready.insert((key, i));
    }

    fn start(&mut self, core: usize, i: usize, now: Time) {
        let inst = &mut self.instances[i];
        inst.state = InstanceState::Running;
        inst.started_at.get_or_insert(now);
        self.cores[core] = Some(Slot {
            inst: i,
            segment_start: now,
        });
        self.record(now, Some(core), i, TraceKind::Start);
    }

    fn dispatch(&mut self, now: Time) {
        if self.config.mode == Mode::Preemptive {
            self.preempt_lower_priority(now);
        }
        for core in 0..self.cores.len() {
            if self.cores[core].is_some() {
                continue;
            }
            let Some((_, i)) = self.ready.pop_first() else { break };
            self.start(core, i, now);
        }
    }

    /// Keeps only the `m` best of running ∪ ready on the cores.
    fn preempt_lower_priority(&mut self, now: Time) {
        let m = self.cores.len();
        let mut candidates: Vec<(PriorityKey, Option<usize>)> = self
            .cores
            .iter()
            .enumerate()
            .filter_map(|(c, s)| s.map(|s| (self.keys[s.inst], Some(c))))
            .collect();
        candidates.extend(self.ready.iter().take(m).map(|&(k, _)| (k, None)));
        candidates.sort();
        for &(_, core) in &candidates[m.min(candidates.len())..] {
            let Some(core) = core else { continue };
            let slot = self.cores[core].take().expect("candidate core is busy");
            let i = slot.inst;
            self.instances[i].state = InstanceState::Ready;
            self.ready.insert((self.keys[i], i));
            self.record(now, Some(core), i, TraceKind::Preempt);
        }
    }

    fn record(&mut self, t: Time, core: Option<usize>, i: usize, event: TraceKind) {
        if !self.config.trace {
            return;
        }
        let inst = &self.instances[i];
        self.trace.push(TraceEvent {
            t_us: t,
            core,
            task: inst.task_id,
            k: inst.k,
            vertex: inst.vertex,
            event,
        });
    }

    fn finish(mut self) -> (Vec<SinkRecord>, usize, Vec<TraceEvent>) {
        let duration = self.config.duration;
        let mut records = Vec::new();
        let mut order = Vec::new();
        for (i, inst) in self.instances.iter().enumerate() {
            let task = &self.set.tasks()[inst.task_idx];
            let Some(relative) = task.deadline_of(inst.vertex_idx) else { continue };
            let deadline = relative + inst.k * task.period();
            if deadline > duration {
                continue;
            }
            let missed = detect_miss(inst.finished_at, deadline, duration);
            order.push((inst.task_idx, inst.k, inst.vertex));
            records.push((
                i,
                SinkRecord {
                    task: inst.task_id,
                    k: inst.k,
                    sink: inst.vertex,
                    finish_us: inst.finished_at,
                    deadline_us: deadline,
                    missed,
                },
            ));
        }
        let mut idx: Vec<usize> = (0..records.len()).collect();
        idx.sort_by_key(|&j| order[j]);
        let records: Vec<(usize, SinkRecord)> = idx.into_iter().map(|j| records[j].clone()).collect();
        let misses = records.iter().filter(|(_, r)| r.missed).count();

        if self.config.trace {
            for (i, r) in &records {
                if r.missed {
                    let inst = &self.instances[*i];
                    self.trace.push(TraceEvent {
                        t_us: r.deadline_us,
                        core: None,
                        task: inst.task_id,
                        k: inst.k,
                        vertex: inst.vertex,
                        event: TraceKind::Miss,
                    });
                }
            }
            self.trace.sort_by_key(|e| e.t_us);
        }
        (records.into_iter().map(|(_, r)| r).collect(), misses, self.trace)
    }
}

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{parse_err, Assignment, DomainSolution, ProblemError, Result, Sense, Violation};
use crate::rng::rng_from_seed;

/// Simple assembly line balancing, type 1: place every task on one of the
/// ordered stations `1..=max_stations` without exceeding the cycle time on
/// any station and without placing a task before one of its predecessors.
/// Tasks are 0-based; stations are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SalbpInstance {
    pub times: Vec<f64>,
    pub cycle_time: f64,
    /// `(t, t')`: task `t` must not come after task `t'`.
    pub precedence: Vec<(usize, usize)>,
    pub max_stations: usize,
}

impl SalbpInstance {
    pub fn new(times: Vec<f64>, cycle_time: f64, precedence: Vec<(usize, usize)>, max_stations: usize) -> Result<Self> {
        let n = times.len();
        if n == 0 || max_stations == 0 {
            return Err(ProblemError::InvalidInstance("need at least one task and one station".into()));
        }
        if !(cycle_time > 0.0 && cycle_time.is_finite()) {
            return Err(ProblemError::InvalidInstance(format!("cycle time {cycle_time} must be positive")));
        }
        for (t, &v) in times.iter().enumerate() {
            if !(v > 0.0 && v <= cycle_time) {
                return Err(ProblemError::InvalidInstance(format!(
                    "task {t} time {v} must lie in (0, {cycle_time}]"
                )));
            }
        }
        let mut seen = BTreeSet::new();
        for &(a, b) in &precedence {
            if a >= n || b >= n {
                return Err(ProblemError::IndexOutOfRange { index: a.max(b), limit: n });
            }
            if a == b || !seen.insert((a, b)) {
                return Err(ProblemError::InvalidInstance(format!("bad precedence pair ({a},{b})")));
            }
        }
        let inst = Self { times, cycle_time, precedence, max_stations };
        if inst.topological_order().is_none() {
            return Err(ProblemError::InvalidInstance("precedence graph has a cycle".into()));
        }
        Ok(inst)
    }

    pub fn n_tasks(&self) -> usize {
        self.times.len()
    }

    /// Kahn's algorithm; `None` when the precedence relation is cyclic.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.n_tasks();
        let mut indeg = vec![0usize; n];
        for &(_, b) in &self.precedence {
            indeg[b] += 1;
        }
        let mut ready: Vec<usize> = (0..n).filter(|&t| indeg[t] == 0).collect();
        ready.reverse();
        let mut order = Vec::with_capacity(n);
        while let Some(t) = ready.pop() {
            order.push(t);
            for &(a, b) in &self.precedence {
                if a == t {
                    indeg[b] -= 1;
                    if indeg[b] == 0 {
                        ready.push(b);
                    }
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Same instance with a different cycle time.
    pub fn with_cycle_time(&self, cycle_time: f64) -> Result<Self> {
        Self::new(self.times.clone(), cycle_time, self.precedence.clone(), self.max_stations)
    }

    /// Text form: `n_tasks max_stations n_precedence`, cycle time, task
    /// times, then one `t t'` pair per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n{}\n", self.n_tasks(), self.max_stations, self.precedence.len(), self.cycle_time);
        let times: Vec<String> = self.times.iter().map(|v| v.to_string()).collect();
        s.push_str(&times.join(" "));
        s.push('\n');
        for (a, b) in &self.precedence {
            let _ = writeln!(s, "{a} {b}");
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut next = |what: &str| lines.next().ok_or_else(|| parse_err(0, format!("missing {what}")));
        let (ln, counts) = next("counts")?;
        let c: Vec<usize> = counts
            .split_whitespace()
            .map(|f| f.parse().map_err(|_| parse_err(ln, "bad count")))
            .collect::<Result<_>>()?;
        let [n, stations, m] = c[..] else {
            return Err(parse_err(ln, "expected `n_tasks max_stations n_precedence`"));
        };
        let (ln, cyc) = next("cycle time")?;
        let cycle: f64 = cyc.parse().map_err(|_| parse_err(ln, "bad cycle time"))?;
        let (ln, tl) = next("task times")?;
        let times: Vec<f64> = tl
            .split_whitespace()
            .map(|f| f.parse().map_err(|_| parse_err(ln, "bad task time")))
            .collect::<Result<_>>()?;
        if times.len() != n {
            return Err(parse_err(ln, format!("expected {n} task times, found {}", times.len())));
        }
        let mut prec = Vec::with_capacity(m);
        for _ in 0..m {
            let (ln, pl) = next("precedence pair")?;
            let p: Vec<usize> = pl
                .split_whitespace()
                .map(|f| f.parse().map_err(|_| parse_err(ln, "bad task index")))
                .collect::<Result<_>>()?;
            let [a, b] = p[..] else {
                return Err(parse_err(ln, "expected `t t'`"));
            };
            prec.push((a, b));
        }
        Self::new(times, cycle, prec, stations)
    }
}

/// Layered random DAG instance. Tasks are split into about `sqrt(n)` layers;
/// each pair across layers gets a precedence edge with probability
/// `density`. Task times are uniform in `(0.1c, 0.7c)` snapped to the
/// `time_resolution` grid. `max_stations` equals the task count.
pub fn gen_salbp(n_tasks: usize, density: f64, cycle_time: f64, time_resolution: f64, seed: u64) -> Result<SalbpInstance> {
    if n_tasks == 0 {
        return Err(ProblemError::InvalidParameter("need at least one task".into()));
    }
    if !(time_resolution > 0.0 && time_resolution <= cycle_time) {
        return Err(ProblemError::InvalidParameter("time_resolution must lie in (0, cycle_time]".into()));
    }
    let mut rng = rng_from_seed(seed);
    let layers = (n_tasks as f64).sqrt().ceil() as usize;
    let layer = |t: usize| t * layers / n_tasks;
    let mut precedence = Vec::new();
    for a in 0..n_tasks {
        for b in a + 1..n_tasks {
            if layer(a) < layer(b) && rng.random::<f64>() < density {
                precedence.push((a, b));
            }
        }
    }
    let times = (0..n_tasks)
        .map(|_| {
            let raw = rng.random_range(0.1 * cycle_time..0.7 * cycle_time);
            ((raw / time_resolution).round() * time_resolution).clamp(time_resolution, cycle_time)
        })
        .collect();
    SalbpInstance::new(times, cycle_time, precedence, n_tasks)
}

/// Evaluate a plan that lists, for each task, the stations it is placed on.
pub fn eval_salbp(inst: &SalbpInstance, assignment: &[Vec<usize>]) -> Result<DomainSolution> {
    let n = inst.n_tasks();
    if assignment.len() != n {
        return Err(ProblemError::LengthMismatch { expected: n, found: assignment.len() });
    }
    let s_max = inst.max_stations;
    let mut load = vec![0.0; s_max + 1];
    let mut violations = Vec::new();
    for (t, stations) in assignment.iter().enumerate() {
        for &s in stations {
            if s == 0 || s > s_max {
                return Err(ProblemError::IndexOutOfRange { index: s, limit: s_max });
            }
            load[s] += inst.times[t];
        }
        match stations.len() {
            0 => violations.push(Violation::new("assignment", format!("task {t} unassigned"))),
            1 => {}
            k => violations.push(Violation::new("assignment", format!("task {t} assigned {k} times"))),
        }
    }
    for (s, &l) in load.iter().enumerate().skip(1) {
        if l > inst.cycle_time + 1e-9 {
            violations.push(Violation::new("capacity", format!("station {s} load {l} exceeds cycle time {}", inst.cycle_time)));
        }
    }
    for &(a, b) in &inst.precedence {
        if let ([sa], [sb]) = (&assignment[a][..], &assignment[b][..]) {
            if sa > sb {
                violations.push(Violation::new("precedence", format!("task {a} on station {sa} after task {b} on station {sb}")));
            }
        }
    }
    let objective: usize = (1..=s_max).filter(|&s| assignment.iter().any(|st| st.contains(&s))).sum();
    Ok(DomainSolution::new(
        "salbp",
        Assignment::Stations(assignment.to_vec()),
        objective as f64,
        Sense::Minimize,
        violations,
    ))
}

/// Exact optimum by depth-first search over tasks in topological order,
/// trying every station compatible with already placed predecessors.
pub fn salbp_optimum_exhaustive(inst: &SalbpInstance) -> Option<DomainSolution> {
    struct Search<'a> {
        inst: &'a SalbpInstance,
        order: Vec<usize>,
        preds: Vec<Vec<usize>>,
        station: Vec<usize>,
        load: Vec<f64>,
        best: Option<(usize, Vec<usize>)>,
    }
    impl Search<'_> {
        fn go(&mut self, depth: usize, cost: usize) {
            if self.best.as_ref().is_some_and(|(b, _)| cost >= *b) {
                return;
            }
            if depth == self.order.len() {
                self.best = Some((cost, self.station.clone()));
                return;
            }
            let t = self.order[depth];
            let lo = self.preds[t].iter().map(|&p| self.station[p]).max().unwrap_or(1);
            for s in lo..=self.inst.max_stations {
                if self.load[s] + self.inst.times[t] > self.inst.cycle_time + 1e-9 {
                    continue;
                }
                let opened = self.load[s] == 0.0;
                self.load[s] += self.inst.times[t];
                self.station[t] = s;
                self.go(depth + 1, cost + if opened { s } else { 0 });
                self.load[s] -= self.inst.times[t];
                if opened {
                    self.load[s] = 0.0;
                }
                self.station[t] = 0;
            }
        }
    }
    let n = inst.n_tasks();
    let mut preds = vec![Vec::new(); n];
    for &(a, b) in &inst.precedence {
        preds[b].push(a);
    }
    let mut search = Search {
        inst,
        order: inst.topological_order()?,
        preds,
        station: vec![0; n],
        load: vec![0.0; inst.max_stations + 1],
        best: None,
    };
    search.go(0, 0);
    let (_, stations) = search.best?;
    let plan: Vec<Vec<usize>> = stations.into_iter().map(|s| vec![s]).collect();
    Some(eval_salbp(inst, &plan).expect("search produces in-range stations"))
}

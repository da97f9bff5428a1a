//! Closed walks in compressed form.
//!
//! Visit requirements can reach 10^9, so solutions cannot store one entry
//! per visit. A walk is a cyclic skeleton of `Visit` steps plus two
//! repeatable attachments: `Detour` (out-and-back trips to another
//! vertex) and `LoopBlock` (loop traversals at the current vertex).
//!
//! Counting conventions, chosen so that a vertex's visit count is always
//! half its degree in the walk's edge multiset (loops contributing two):
//! - with at least two `Visit` steps, consecutive visits (cyclically) are
//!   joined by an edge and each `Visit` counts one visit;
//! - a lone `Visit` is only an anchor: it contributes no edge and no
//!   visit, so `[Visit(v), LoopBlock(1)]` is the walk that traverses the
//!   loop at `v` once and visits `v` once;
//! - `Detour { far, times }` at anchor `a` traverses the edge `{a, far}`
//!   `2 * times` times and adds `times` visits at both `a` and `far`;
//! - `LoopBlock { times }` traverses the loop at the anchor `times`
//!   times and adds `times` visits there.

use std::collections::BTreeMap;

use crate::dyadic::DyadicCosts;
use crate::instance::{ProblemInstance, Variant};

/// One step of a compressed walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WalkStep {
    /// Move to this vertex; it becomes the current anchor.
    Visit(usize),
    /// Repeat the round trip anchor -> far -> anchor.
    Detour { far: usize, times: u64 },
    /// Repeat the loop at the anchor.
    LoopBlock { times: u64 },
}

/// A closed walk as a list of steps. The first step must be a `Visit`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Walk {
    pub steps: Vec<WalkStep>,
}

/// A complete solution: one or more closed walks.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WalkSolution {
    pub walks: Vec<Walk>,
}

impl Walk {
    pub fn from_steps(steps: Vec<WalkStep>) -> Walk {
        Walk { steps }
    }

    /// Build a walk from a plain cyclic position sequence, collapsing
    /// runs of a repeated vertex into loop blocks.
    pub fn from_positions(positions: &[usize]) -> Walk {
        let mut steps = Vec::new();
        if positions.is_empty() {
            return Walk { steps };
        }
        if positions.iter().all(|&v| v == positions[0]) {
            // The all-loops walk: m positions mean m loop traversals.
            steps.push(WalkStep::Visit(positions[0]));
            steps.push(WalkStep::LoopBlock {
                times: positions.len() as u64,
            });
            return Walk { steps };
        }
        let mut i = 0;
        while i < positions.len() {
            let v = positions[i];
            let mut run = 1;
            while i + run < positions.len() && positions[i + run] == v {
                run += 1;
            }
            steps.push(WalkStep::Visit(v));
            if run > 1 {
                steps.push(WalkStep::LoopBlock {
                    times: (run - 1) as u64,
                });
            }
            i += run;
        }
        // The cyclic wrap can also repeat a vertex; merge the tail run
        // into the head instead of keeping a skeleton loop edge.
        if steps.len() >= 3 {
            if let (WalkStep::Visit(first), Some(WalkStep::Visit(last))) =
                (steps[0].clone(), steps.last().cloned())
            {
                if first == last {
                    steps.pop();
                    steps.insert(1, WalkStep::LoopBlock { times: 1 });
                }
            }
        }
        Walk { steps }
    }

    pub fn visit_steps(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, WalkStep::Visit(_)))
            .count()
    }

    /// Visit counts per vertex.
    pub fn visit_counts(&self) -> BTreeMap<usize, u128> {
        let mut counts: BTreeMap<usize, u128> = BTreeMap::new();
        let skeleton = self.visit_steps();
        let mut anchor = None;
        for step in &self.steps {
            match *step {
                WalkStep::Visit(v) => {
                    anchor = Some(v);
                    if skeleton >= 2 {
                        *counts.entry(v).or_default() += 1;
                    }
                }
                WalkStep::Detour { far, times } => {
                    let a = anchor.expect("detour before first visit");
                    *counts.entry(a).or_default() += times as u128;
                    *counts.entry(far).or_default() += times as u128;
                }
                WalkStep::LoopBlock { times } => {
                    let a = anchor.expect("loop block before first visit");
                    *counts.entry(a).or_default() += times as u128;
                }
            }
        }
        counts
    }

    /// Edge multiset as `((u, v), multiplicity)` with `u <= v`; the loop
    /// at `v` is `(v, v)`.
    pub fn edge_multiset(&self) -> BTreeMap<(usize, usize), u128> {
        let mut edges: BTreeMap<(usize, usize), u128> = BTreeMap::new();
        let mut add = |u: usize, v: usize, m: u128| {
            if m > 0 {
                *edges.entry((u.min(v), u.max(v))).or_default() += m;
            }
        };
        let skeleton: Vec<usize> = self
            .steps
            .iter()
            .filter_map(|s| match *s {
                WalkStep::Visit(v) => Some(v),
                _ => None,
            })
            .collect();
        if skeleton.len() >= 2 {
            for i in 0..skeleton.len() {
                let u = skeleton[i];
                let v = skeleton[(i + 1) % skeleton.len()];
                add(u, v, 1);
            }
        }
        let mut anchor = None;
        for step in &self.steps {
            match *step {
                WalkStep::Visit(v) => anchor = Some(v),
                WalkStep::Detour { far, times } => {
                    let a = anchor.expect("detour before first visit");
                    add(a, far, 2 * times as u128);
                }
                WalkStep::LoopBlock { times } => {
                    let a = anchor.expect("loop block before first visit");
                    add(a, a, times as u128);
                }
            }
        }
        edges
    }

    /// Total number of visits (positions) in the walk.
    pub fn total_positions(&self) -> u128 {
        self.visit_counts().values().sum()
    }

    /// Structural validity: starts with a visit, positive repetition
    /// counts, detours leave the anchor, and at least one edge.
    pub fn structural_errors(&self, n: usize) -> Vec<String> {
        let mut errs = Vec::new();
        if self.steps.is_empty() {
            errs.push("walk has no steps".into());
            return errs;
        }
        if !matches!(self.steps[0], WalkStep::Visit(_)) {
            errs.push("walk must start with a visit".into());
        }
        let mut anchor = None;
        for step in &self.steps {
            match *step {
                WalkStep::Visit(v) => {
                    if v >= n {
                        errs.push(format!("vertex {v} out of range"));
                    }
                    anchor = Some(v);
                }
                WalkStep::Detour { far, times } => {
                    if far >= n {
                        errs.push(format!("vertex {far} out of range"));
                    }
                    if times == 0 {
                        errs.push("detour with zero repetitions".into());
                    }
                    if anchor == Some(far) {
                        errs.push(format!("detour from {far} to itself"));
                    }
                }
                WalkStep::LoopBlock { times } => {
                    if times == 0 {
                        errs.push("loop block with zero repetitions".into());
                    }
                }
            }
        }
        if errs.is_empty() && self.edge_multiset().is_empty() {
            errs.push("walk traverses no edges".into());
        }
        errs
    }

    /// Walk cost in `f64` (exact for small multiplicities, relative
    /// error around 1e-13 for visit counts near 10^9).
    pub fn cost(&self, costs: &DyadicCosts) -> f64 {
        self.edge_multiset()
            .iter()
            .map(|(&(u, v), &m)| costs.cost_f64(u, v) * m as f64)
            .sum()
    }

    /// Exact scaled cost; `None` when a multiplicity-weighted sum would
    /// overflow `i128` (only conceivable with both huge visit counts and
    /// extreme cost magnitudes).
    pub fn cost_scaled(&self, costs: &DyadicCosts) -> Option<i128> {
        let mut total: i128 = 0;
        for (&(u, v), &m) in self.edge_multiset().iter() {
            let m = i128::try_from(m).ok()?;
            total = total.checked_add(costs.cost(u, v).checked_mul(m)?)?;
        }
        Some(total)
    }
}

impl WalkSolution {
    pub fn total_positions(&self) -> u128 {
        self.walks.iter().map(Walk::total_positions).sum()
    }

    pub fn cost(&self, costs: &DyadicCosts) -> f64 {
        self.walks.iter().map(|w| w.cost(costs)).sum()
    }

    pub fn cost_scaled(&self, costs: &DyadicCosts) -> Option<i128> {
        let mut total: i128 = 0;
        for w in &self.walks {
            total = total.checked_add(w.cost_scaled(costs)?)?;
        }
        Some(total)
    }
}

/// Result of checking a solution against an instance.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub cost: f64,
    pub feasible: bool,
    pub violations: Vec<String>,
    pub total_positions: u128,
}

/// Check a solution against the instance's variant rules and report its
/// cost. The checker is deliberately independent of the solver paths: it
/// only reads the walk structure.
pub fn evaluate_solution(inst: &ProblemInstance, sol: &WalkSolution) -> Evaluation {
    let n = inst.n();
    let mut violations = Vec::new();
    let expected_walks = inst.walk_count();
    if sol.walks.len() != expected_walks {
        violations.push(format!(
            "solution has {} walks, expected {expected_walks}",
            sol.walks.len()
        ));
    }
    let mut per_walk_counts = Vec::new();
    for (i, w) in sol.walks.iter().enumerate() {
        for e in w.structural_errors(n) {
            violations.push(format!("walk {i}: {e}"));
        }
        per_walk_counts.push(w.visit_counts());
    }

    // Aggregate visit totals.
    let mut totals = vec![0u128; n];
    for counts in &per_walk_counts {
        for (&v, &c) in counts {
            if v < n {
                totals[v] += c;
            }
        }
    }

    // Depot edge rules: no walk may traverse a depot-depot edge or a
    // depot loop.
    if inst.variant.has_depots() {
        for (i, w) in sol.walks.iter().enumerate() {
            for (&(u, v), _) in w.edge_multiset().iter() {
                if inst.is_depot(u) && inst.is_depot(v) {
                    violations.push(format!("walk {i}: traverses depot-depot edge ({u}, {v})"));
                }
            }
        }
    }

    match inst.variant {
        Variant::MvTsp => {
            for v in 0..n {
                if totals[v] != inst.visits[v] as u128 {
                    violations.push(format!(
                        "vertex {v} visited {} times, required {}",
                        totals[v], inst.visits[v]
                    ));
                }
            }
        }
        Variant::MvMtspPlus => {
            // Each walk contains exactly one depot, visited once, and at
            // least one non-depot visit; depots must be covered once each.
            let mut depot_walks: BTreeMap<usize, usize> = BTreeMap::new();
            for (i, counts) in per_walk_counts.iter().enumerate() {
                let depots_here: Vec<usize> = counts
                    .keys()
                    .copied()
                    .filter(|&v| inst.is_depot(v))
                    .collect();
                if depots_here.len() != 1 {
                    violations.push(format!(
                        "walk {i} contains {} depots, expected 1",
                        depots_here.len()
                    ));
                    continue;
                }
                let d = depots_here[0];
                if counts[&d] != 1 {
                    violations.push(format!("walk {i} visits depot {d} {} times", counts[&d]));
                }
                *depot_walks.entry(d).or_default() += 1;
                let non_depot: u128 = counts
                    .iter()
                    .filter(|(&v, _)| !inst.is_depot(v))
                    .map(|(_, &c)| c)
                    .sum();
                if non_depot == 0 {
                    violations.push(format!("walk {i} visits no non-depot vertex"));
                }
            }
            for &d in &inst.depots {
                if depot_walks.get(&d).copied().unwrap_or(0) != 1 {
                    violations.push(format!("depot {d} is not covered by exactly one walk"));
                }
            }
            for v in 0..n {
                if !inst.is_depot(v) && totals[v] != inst.visits[v] as u128 {
                    violations.push(format!(
                        "vertex {v} visited {} times, required {}",
                        totals[v], inst.visits[v]
                    ));
                }
            }
        }
        Variant::SdMvMtspPlus | Variant::SdMvMtspPlusDisjoint => {
            let depot = inst.depots[0];
            for (i, counts) in per_walk_counts.iter().enumerate() {
                if counts.get(&depot).copied().unwrap_or(0) != 1 {
                    violations.push(format!(
                        "walk {i} visits the depot {} times, expected 1",
                        counts.get(&depot).copied().unwrap_or(0)
                    ));
                }
                let non_depot: u128 = counts
                    .iter()
                    .filter(|(&v, _)| v != depot)
                    .map(|(_, &c)| c)
                    .sum();
                if non_depot == 0 {
                    violations.push(format!("walk {i} visits no non-depot vertex"));
                }
            }
            for v in 0..n {
                if v != depot && totals[v] != inst.visits[v] as u128 {
                    violations.push(format!(
                        "vertex {v} visited {} times, required {}",
                        totals[v], inst.visits[v]
                    ));
                }
            }
            if inst.variant == Variant::SdMvMtspPlusDisjoint {
                let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
                for (i, counts) in per_walk_counts.iter().enumerate() {
                    for &v in counts.keys() {
                        if v == depot {
                            continue;
                        }
                        if let Some(&j) = owner.get(&v) {
                            violations.push(format!("vertex {v} appears in walks {j} and {i}"));
                        } else {
                            owner.insert(v, i);
                        }
                    }
                }
            }
        }
        Variant::MtspPlusUnrestricted => {
            let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
            for (i, counts) in per_walk_counts.iter().enumerate() {
                for (&v, &c) in counts {
                    if c != 1 {
                        violations.push(format!("walk {i} visits vertex {v} {c} times"));
                    }
                    if let Some(&j) = owner.get(&v) {
                        violations.push(format!("vertex {v} appears in walks {j} and {i}"));
                    } else {
                        owner.insert(v, i);
                    }
                }
            }
            for v in 0..n {
                if totals[v] != 1 {
                    violations.push(format!("vertex {v} visited {} times, required 1", totals[v]));
                }
            }
        }
    }

    let cost = match inst.costs.dyadic() {
        Ok(d) => sol.cost(&d),
        Err(_) => sol
            .walks
            .iter()
            .flat_map(|w| w.edge_multiset())
            .map(|((u, v), m)| inst.costs.cost(u, v) * m as f64)
            .sum(),
    };
    Evaluation {
        cost,
        feasible: violations.is_empty(),
        violations,
        total_positions: sol.total_positions(),
    }
}

//! Problem instances: cost matrices, visit requirements, depots, and the
//! vertex-expansion used to hand multi-visit problems to single-visit
//! inner algorithms.

use crate::dyadic::DyadicCosts;
use crate::error::{Error, Result};

/// Absolute slack allowed when validating the triangle inequality and the
/// loop-cost rule on `f64` input. Generated instances satisfy both rules
/// exactly in scaled integer arithmetic; file input may carry rounding
/// noise up to this bound.
pub const METRIC_TOL: f64 = 1e-9;

/// Upper bound on any single visit requirement. Keeps every integer that
/// the LP layer forms (degrees are `2 r(v)` at scale 2^48) far inside
/// `i128`.
pub const MAX_VISITS: u64 = 1_000_000_000_000;

/// Largest vertex-expansion the inner algorithms accept. After edge
/// fixing each vertex contributes at most `2n + 2` copies, so this bound
/// is generous for every supported instance size.
pub const EXPANSION_CAP: u64 = 50_000;

/// Symmetric cost matrix with loop costs on the diagonal.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl CostMatrix {
    /// Build from a row-major slice of length `n * n`.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("empty cost matrix".into()));
        }
        if entries.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "cost matrix has {} entries, expected {}",
                entries.len(),
                n * n
            )));
        }
        for &c in &entries {
            if !c.is_finite() || c < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "cost entries must be finite and non-negative, got {c}"
                )));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(Error::InvalidInput(format!(
                        "cost matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(CostMatrix { n, entries })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut flat = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::InvalidInput("cost matrix is not square".into()));
            }
            flat.extend_from_slice(row);
        }
        CostMatrix::new(n, flat)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cost(&self, u: usize, v: usize) -> f64 {
        self.entries[u * self.n + v]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn max_cost(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    /// Check the semi-metric rules: triangle inequality between distinct
    /// vertices and, for every vertex, a loop no more expensive than any
    /// round trip (`c_vv <= 2 c_uv`), both within [`METRIC_TOL`].
    pub fn check_semi_metric(&self) -> Result<()> {
        let n = self.n;
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                for w in 0..n {
                    if w == u || w == v {
                        continue;
                    }
                    if self.cost(u, w) > self.cost(u, v) + self.cost(v, w) + METRIC_TOL {
                        return Err(Error::InvalidInput(format!(
                            "triangle inequality violated on ({u}, {v}, {w})"
                        )));
                    }
                }
                if self.cost(u, u) > 2.0 * self.cost(u, v) + METRIC_TOL {
                    return Err(Error::InvalidInput(format!(
                        "loop cost at {u} exceeds the round trip through {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dyadic(&self) -> Result<DyadicCosts> {
        DyadicCosts::from_costs(self.n, &self.entries)
    }
}

/// The five supported problem variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// One salesman, vertex `v` visited exactly `r(v)` times.
    MvTsp,
    /// One salesman per depot; walks may share non-depot vertices.
    MvMtspPlus,
    /// `k` salesmen from a single depot; walks may share vertices.
    SdMvMtspPlus,
    /// `k` salesmen from a single depot; walks are vertex-disjoint apart
    /// from the depot.
    SdMvMtspPlusDisjoint,
    /// `k` salesmen, no depots, every vertex in exactly one walk exactly
    /// once (a single-vertex walk is one loop traversal).
    MtspPlusUnrestricted,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::MvTsp,
        Variant::MvMtspPlus,
        Variant::SdMvMtspPlus,
        Variant::SdMvMtspPlusDisjoint,
        Variant::MtspPlusUnrestricted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::MvTsp => "mv-tsp",
            Variant::MvMtspPlus => "mv-mtsp-plus",
            Variant::SdMvMtspPlus => "sd-mv-mtsp-plus",
            Variant::SdMvMtspPlusDisjoint => "sd-mv-mtsp-plus-disjoint",
            Variant::MtspPlusUnrestricted => "mtsp-plus-unrestricted",
        }
    }

    pub fn parse(s: &str) -> Result<Variant> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown variant '{s}' (expected one of: {})",
                    Variant::ALL.map(|v| v.name()).join(", ")
                ))
            })
    }

    /// Guaranteed cost ratio against this variant's certified lower
    /// bound (the relaxation value, or the exact optimum for the
    /// vertex-disjoint variant).
    pub fn guarantee(self) -> f64 {
        match self {
            Variant::MvTsp => 1.5,
            Variant::MvMtspPlus => 2.0,
            Variant::SdMvMtspPlus => 1.5,
            Variant::SdMvMtspPlusDisjoint => 3.5,
            Variant::MtspPlusUnrestricted => 2.0,
        }
    }

    pub fn has_depots(self) -> bool {
        matches!(
            self,
            Variant::MvMtspPlus | Variant::SdMvMtspPlus | Variant::SdMvMtspPlusDisjoint
        )
    }
}

/// A full problem instance.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub costs: CostMatrix,
    pub variant: Variant,
    /// Visit requirement per vertex. Depot entries must be 1.
    pub visits: Vec<u64>,
    /// Sorted distinct depot indices; empty unless the variant uses them.
    pub depots: Vec<usize>,
    /// Number of salesmen where the variant needs it (single-depot and
    /// unrestricted variants). For the multi-depot variant the count is
    /// the number of depots.
    pub salesmen: Option<usize>,
}

impl ProblemInstance {
    pub fn n(&self) -> usize {
        self.costs.n()
    }

    /// Effective number of walks the solution must contain.
    pub fn walk_count(&self) -> usize {
        match self.variant {
            Variant::MvTsp => 1,
            Variant::MvMtspPlus => self.depots.len(),
            Variant::SdMvMtspPlus | Variant::SdMvMtspPlusDisjoint => self.salesmen.unwrap_or(0),
            Variant::MtspPlusUnrestricted => self.salesmen.unwrap_or(0),
        }
    }

    pub fn is_depot(&self, v: usize) -> bool {
        self.depots.binary_search(&v).is_ok()
    }

    pub fn non_depots(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| !self.is_depot(v)).collect()
    }

    pub fn max_visits(&self) -> u64 {
        self.visits.iter().copied().max().unwrap_or(0)
    }

    pub fn total_visits(&self) -> u128 {
        self.visits.iter().map(|&r| r as u128).sum()
    }

    /// Validate counts, depot structure, visit bounds, and the
    /// semi-metric cost rules.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.visits.len() != n {
            return Err(Error::InvalidInput(format!(
                "visit vector has {} entries for n = {n}",
                self.visits.len()
            )));
        }
        for (v, &r) in self.visits.iter().enumerate() {
            if r == 0 {
                return Err(Error::InvalidInput(format!(
                    "vertex {v} has a zero visit requirement"
                )));
            }
            if r > MAX_VISITS {
                return Err(Error::InvalidInput(format!(
                    "visit requirement {r} at vertex {v} exceeds the supported maximum {MAX_VISITS}"
                )));
            }
        }
        let mut sorted = self.depots.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted != self.depots {
            return Err(Error::InvalidInput(
                "depots must be sorted and distinct".into(),
            ));
        }
        if let Some(&d) = self.depots.iter().find(|&&d| d >= n) {
            return Err(Error::InvalidInput(format!("depot {d} out of range")));
        }
        for &d in &self.depots {
            if self.visits[d] != 1 {
                return Err(Error::InvalidInput(format!(
                    "depot {d} must have a visit requirement of exactly 1"
                )));
            }
        }
        let non_depot_visits: u128 = (0..n)
            .filter(|&v| !self.is_depot(v))
            .map(|v| self.visits[v] as u128)
            .sum();
        match self.variant {
            Variant::MvTsp => {
                if !self.depots.is_empty() {
                    return Err(Error::InvalidInput("mv-tsp takes no depots".into()));
                }
                if self.salesmen.is_some() && self.salesmen != Some(1) {
                    return Err(Error::InvalidInput(
                        "mv-tsp uses exactly one salesman".into(),
                    ));
                }
            }
            Variant::MvMtspPlus => {
                let k = self.depots.len();
                if k == 0 {
                    return Err(Error::InvalidInput(
                        "mv-mtsp-plus needs at least one depot".into(),
                    ));
                }
                if let Some(s) = self.salesmen {
                    if s != k {
                        return Err(Error::InvalidInput(format!(
                            "mv-mtsp-plus runs one salesman per depot; got {s} salesmen for {k} depots"
                        )));
                    }
                }
                if n <= k {
                    return Err(Error::InvalidInput(
                        "mv-mtsp-plus needs at least one non-depot vertex".into(),
                    ));
                }
                if non_depot_visits < k as u128 {
                    return Err(Error::InvalidInput(
                        "each depot walk needs a non-depot visit, but the visit budget is too small"
                            .into(),
                    ));
                }
            }
            Variant::SdMvMtspPlus | Variant::SdMvMtspPlusDisjoint => {
                if self.depots.len() != 1 {
                    return Err(Error::InvalidInput(
                        "single-depot variants take exactly one depot".into(),
                    ));
                }
                let k = self
                    .salesmen
                    .ok_or_else(|| Error::InvalidInput("salesman count is required".into()))?;
                if k == 0 {
                    return Err(Error::InvalidInput("salesman count must be positive".into()));
                }
                if n < 2 {
                    return Err(Error::InvalidInput(
                        "single-depot variants need a non-depot vertex".into(),
                    ));
                }
                if non_depot_visits < k as u128 {
                    return Err(Error::InvalidInput(format!(
                        "{k} walks need {k} non-depot visits but only {non_depot_visits} are requested"
                    )));
                }
                if self.variant == Variant::SdMvMtspPlusDisjoint && n - 1 < k {
                    return Err(Error::InvalidInput(format!(
                        "{k} vertex-disjoint walks need {k} distinct non-depot vertices"
                    )));
                }
            }
            Variant::MtspPlusUnrestricted => {
                if !self.depots.is_empty() {
                    return Err(Error::InvalidInput(
                        "the unrestricted variant takes no depots".into(),
                    ));
                }
                let k = self
                    .salesmen
                    .ok_or_else(|| Error::InvalidInput("salesman count is required".into()))?;
                if k == 0 || k > n {
                    return Err(Error::InvalidInput(format!(
                        "salesman count {k} must lie in [1, {n}]"
                    )));
                }
                if self.visits.iter().any(|&r| r != 1) {
                    return Err(Error::InvalidInput(
                        "the unrestricted variant visits every vertex exactly once".into(),
                    ));
                }
            }
        }
        self.costs.check_semi_metric()
    }
}

/// A single-visit view of a multi-visit instance: vertex `v` is split
/// into `mult[v]` interchangeable copies. Costs between copies of
/// distinct vertices equal the original edge cost; costs between copies
/// of the same vertex equal its loop cost.
#[derive(Debug, Clone)]
pub struct ExpandedInstance {
    /// Expanded index -> original vertex.
    pub copy_of: Vec<usize>,
    /// Original vertex -> expanded indices (contiguous, ascending).
    pub copies_of: Vec<Vec<usize>>,
}

impl ExpandedInstance {
    pub fn build(mult: &[u64]) -> Result<Self> {
        let total: u64 = mult.iter().try_fold(0u64, |a, &m| a.checked_add(m)).ok_or(
            Error::BudgetExceeded("expansion size overflows".into()),
        )?;
        if total == 0 {
            return Err(Error::Internal("empty expansion".into()));
        }
        if total > EXPANSION_CAP {
            return Err(Error::BudgetExceeded(format!(
                "expansion would need {total} vertices (cap {EXPANSION_CAP})"
            )));
        }
        let mut copy_of = Vec::with_capacity(total as usize);
        let mut copies_of = Vec::with_capacity(mult.len());
        for (v, &m) in mult.iter().enumerate() {
            let start = copy_of.len();
            for _ in 0..m {
                copy_of.push(v);
            }
            copies_of.push((start..copy_of.len()).collect());
        }
        Ok(ExpandedInstance { copy_of, copies_of })
    }

    pub fn size(&self) -> usize {
        self.copy_of.len()
    }

    /// Scaled cost between two expanded vertices.
    pub fn cost(&self, costs: &DyadicCosts, i: usize, j: usize) -> i128 {
        let u = self.copy_of[i];
        let v = self.copy_of[j];
        costs.cost(u, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_costs() -> CostMatrix {
        // Four points of a unit square plus loop costs. Off-diagonal
        // entries are 1, sqrt(2), and the loops are cheap.
        let s = 2f64.sqrt();
        CostMatrix::from_rows(vec![
            vec![0.5, 1.0, s, 1.0],
            vec![1.0, 0.25, 1.0, s],
            vec![s, 1.0, 1.0, 1.0],
            vec![1.0, s, 1.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn symmetry_is_enforced() {
        let err = CostMatrix::from_rows(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap_err();
        assert!(err.to_string().contains("symmetric"));
    }

    #[test]
    fn semi_metric_accepts_the_square() {
        square_costs().check_semi_metric().unwrap();
    }

    #[test]
    fn triangle_violation_is_caught() {
        let m = CostMatrix::from_rows(vec![
            vec![0.0, 1.0, 9.0],
            vec![1.0, 0.0, 1.0],
            vec![9.0, 1.0, 0.0],
        ])
        .unwrap();
        let err = m.check_semi_metric().unwrap_err();
        assert!(err.to_string().contains("triangle"));
    }

    #[test]
    fn expensive_loop_is_caught() {
        let m = CostMatrix::from_rows(vec![vec![5.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let err = m.check_semi_metric().unwrap_err();
        assert!(err.to_string().contains("loop cost"));
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(Variant::parse(v.name()).unwrap(), v);
        }
        assert!(Variant::parse("tsp").is_err());
    }

    #[test]
    fn validation_rules() {
        let inst = ProblemInstance {
            costs: square_costs(),
            variant: Variant::MvTsp,
            visits: vec![2, 1, 3, 1],
            depots: vec![],
            salesmen: None,
        };
        inst.validate().unwrap();

        let mut bad = inst.clone();
        bad.visits[1] = 0;
        assert!(bad.validate().is_err());

        let mut depot = inst.clone();
        depot.variant = Variant::MvMtspPlus;
        depot.depots = vec![1];
        depot.visits = vec![2, 1, 3, 1];
        depot.validate().unwrap();

        let mut sd = inst.clone();
        sd.variant = Variant::SdMvMtspPlus;
        sd.depots = vec![0];
        sd.visits = vec![1, 2, 1, 1];
        sd.salesmen = Some(3);
        sd.validate().unwrap();
        sd.salesmen = Some(5);
        assert!(sd.validate().is_err());

        let mut unres = inst;
        unres.variant = Variant::MtspPlusUnrestricted;
        unres.visits = vec![1; 4];
        unres.salesmen = Some(4);
        unres.validate().unwrap();
        unres.salesmen = Some(5);
        assert!(unres.validate().is_err());
    }

    #[test]
    fn expansion_layout() {
        let exp = ExpandedInstance::build(&[2, 1, 3]).unwrap();
        assert_eq!(exp.size(), 6);
        assert_eq!(exp.copy_of, vec![0, 0, 1, 2, 2, 2]);
        assert_eq!(exp.copies_of[2], vec![3, 4, 5]);

        let costs = DyadicCosts::from_costs(2, &[0.5, 1.0, 1.0, 0.25]).unwrap();
        let exp = ExpandedInstance::build(&[2, 2]).unwrap();
        // Copies of the same vertex meet at the loop cost.
        assert_eq!(exp.cost(&costs, 0, 1), costs.cost(0, 0));
        assert_eq!(exp.cost(&costs, 0, 2), costs.cost(0, 1));
        assert_eq!(exp.cost(&costs, 2, 3), costs.cost(1, 1));
    }

    #[test]
    fn expansion_cap() {
        let err = ExpandedInstance::build(&[EXPANSION_CAP + 1]).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded(_)));
    }
}

//! JSON serialization for instances and solutions.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{CostMatrix, ProblemInstance, Variant};
use crate::walk::{Walk, WalkSolution, WalkStep};

/// Solutions whose explicit position sequence would exceed this length
/// are written in step form instead.
pub const EXPAND_LIMIT: u128 = 1_000_000;

#[derive(Serialize, Deserialize)]
struct InstanceDto {
    variant: String,
    costs: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    visits: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    depots: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    salesmen: Option<usize>,
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(rename_all = "snake_case")]
enum StepDto {
    Visit(usize),
    Detour { far: usize, times: u64 },
    Loop { times: u64 },
}

#[derive(Serialize, Deserialize)]
struct SolutionDto {
    cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    walks: Option<Vec<Vec<usize>>>,
    /// Compressed form for solutions too large to expand.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    walks_steps: Option<Vec<Vec<StepDto>>>,
}

pub fn instance_to_json(inst: &ProblemInstance) -> String {
    let n = inst.n();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| inst.costs.cost(i, j)).collect())
        .collect();
    let dto = InstanceDto {
        variant: inst.variant.name().to_string(),
        costs: rows,
        visits: Some(inst.visits.clone()),
        depots: if inst.depots.is_empty() {
            None
        } else {
            Some(inst.depots.clone())
        },
        salesmen: inst.salesmen,
    };
    serde_json::to_string_pretty(&dto).expect("instance serialization cannot fail")
}

pub fn instance_from_json(text: &str) -> Result<ProblemInstance> {
    let dto: InstanceDto =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("bad JSON: {e}")))?;
    let variant = Variant::parse(&dto.variant)?;
    let costs = CostMatrix::from_rows(dto.costs)?;
    let n = costs.n();
    let visits = dto.visits.unwrap_or_else(|| vec![1; n]);
    let inst = ProblemInstance {
        costs,
        variant,
        visits,
        depots: dto.depots.unwrap_or_default(),
        salesmen: dto.salesmen,
    };
    inst.validate()?;
    Ok(inst)
}

pub fn read_instance(path: &Path) -> Result<ProblemInstance> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    instance_from_json(&text)
}

pub fn write_instance(path: &Path, inst: &ProblemInstance) -> Result<()> {
    fs::write(path, instance_to_json(inst))
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

/// Expand a walk into its explicit cyclic position sequence. Only call
/// this when the total position count is small.
pub fn expand_positions(walk: &Walk) -> Vec<usize> {
    let skeleton = walk.visit_steps();
    let mut out = Vec::new();
    let mut anchor = None;
    for step in &walk.steps {
        match *step {
            WalkStep::Visit(v) => {
                anchor = Some(v);
                if skeleton >= 2 {
                    out.push(v);
                }
            }
            WalkStep::Detour { far, times } => {
                let a = anchor.expect("detour before first visit");
                for _ in 0..times {
                    out.push(far);
                    out.push(a);
                }
            }
            WalkStep::LoopBlock { times } => {
                let a = anchor.expect("loop before first visit");
                for _ in 0..times {
                    out.push(a);
                }
            }
        }
    }
    out
}

fn steps_to_dto(walk: &Walk) -> Vec<StepDto> {
    walk.steps
        .iter()
        .map(|s| match *s {
            WalkStep::Visit(v) => StepDto::Visit(v),
            WalkStep::Detour { far, times } => StepDto::Detour { far, times },
            WalkStep::LoopBlock { times } => StepDto::Loop { times },
        })
        .collect()
}

pub fn solution_to_json(sol: &WalkSolution, cost: f64) -> String {
    let dto = if sol.total_positions() <= EXPAND_LIMIT {
        SolutionDto {
            cost,
            walks: Some(sol.walks.iter().map(expand_positions).collect()),
            walks_steps: None,
        }
    } else {
        SolutionDto {
            cost,
            walks: None,
            walks_steps: Some(sol.walks.iter().map(steps_to_dto).collect()),
        }
    };
    serde_json::to_string_pretty(&dto).expect("solution serialization cannot fail")
}

pub fn solution_from_json(text: &str) -> Result<(WalkSolution, f64)> {
    let dto: SolutionDto =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("bad JSON: {e}")))?;
    let walks = match (dto.walks, dto.walks_steps) {
        (Some(pos), None) => pos.iter().map(|p| Walk::from_positions(p)).collect(),
        (None, Some(steps)) => steps
            .into_iter()
            .map(|s| {
                Walk::from_steps(
                    s.into_iter()
                        .map(|d| match d {
                            StepDto::Visit(v) => WalkStep::Visit(v),
                            StepDto::Detour { far, times } => WalkStep::Detour { far, times },
                            StepDto::Loop { times } => WalkStep::LoopBlock { times },
                        })
                        .collect(),
                )
            })
            .collect(),
        _ => {
            return Err(Error::InvalidInput(
                "solution needs exactly one of 'walks' or 'walks_steps'".into(),
            ))
        }
    };
    Ok((WalkSolution { walks }, dto.cost))
}

pub fn read_solution(path: &Path) -> Result<(WalkSolution, f64)> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    solution_from_json(&text)
}

pub fn write_solution(path: &Path, sol: &WalkSolution, cost: f64) -> Result<()> {
    fs::write(path, solution_to_json(sol, cost))
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, CostStyle, GenConfig};

    #[test]
    fn instance_round_trip() {
        for variant in Variant::ALL {
            let cfg = GenConfig {
                variant,
                n: 5,
                seed: 11,
                style: CostStyle::Euclidean,
                max_visits: 20,
                salesmen: None,
            };
            let inst = generate(&cfg).unwrap();
            let back = instance_from_json(&instance_to_json(&inst)).unwrap();
            assert_eq!(back.variant, inst.variant);
            assert_eq!(back.visits, inst.visits);
            assert_eq!(back.depots, inst.depots);
            assert_eq!(back.costs.entries(), inst.costs.entries());
        }
    }

    #[test]
    fn small_solution_expands() {
        let sol = WalkSolution {
            walks: vec![Walk::from_positions(&[0, 1, 1, 2])],
        };
        let json = solution_to_json(&sol, 3.5);
        assert!(json.contains("\"walks\""));
        assert!(!json.contains("walks_steps"));
        let (back, cost) = solution_from_json(&json).unwrap();
        assert_eq!(cost, 3.5);
        assert_eq!(back.walks[0].visit_counts(), sol.walks[0].visit_counts());
        assert_eq!(back.walks[0].edge_multiset(), sol.walks[0].edge_multiset());
    }

    #[test]
    fn huge_solution_stays_compressed() {
        let sol = WalkSolution {
            walks: vec![Walk::from_steps(vec![
                WalkStep::Visit(0),
                WalkStep::Detour {
                    far: 1,
                    times: 700_000_000,
                },
                WalkStep::Visit(2),
            ])],
        };
        let json = solution_to_json(&sol, 1.0);
        assert!(json.contains("walks_steps"));
        let (back, _) = solution_from_json(&json).unwrap();
        assert_eq!(back.walks[0].edge_multiset(), sol.walks[0].edge_multiset());
    }

    #[test]
    fn expansion_matches_walk_semantics() {
        let walks = vec![
            Walk::from_positions(&[0, 1, 0, 2]),
            Walk::from_steps(vec![WalkStep::Visit(3), WalkStep::LoopBlock { times: 2 }]),
            Walk::from_steps(vec![
                WalkStep::Visit(0),
                WalkStep::Detour { far: 4, times: 2 },
                WalkStep::Visit(1),
            ]),
        ];
        for w in walks {
            let expanded = expand_positions(&w);
            let back = Walk::from_positions(&expanded);
            assert_eq!(back.visit_counts(), w.visit_counts());
            assert_eq!(back.edge_multiset(), w.edge_multiset());
        }
    }
}

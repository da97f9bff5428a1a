//! Seeded random instance generation.
//!
//! Costs are quantized to the grid 2^-40 and closed under shortest paths
//! in that exact grid arithmetic, so every generated instance satisfies
//! the triangle inequality and the loop rule exactly as scaled integers,
//! not merely within a float tolerance. That keeps downstream exact
//! integer comparisons (shortcut never increases cost, doubled-tree
//! bounds) valid on generated data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{CostMatrix, ProblemInstance, Variant};

/// Cost grid: all generated costs are multiples of 2^-40.
pub const COST_GRID_SHIFT: i32 = 40;

/// How the base metric is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostStyle {
    /// Distances between uniform points in the unit square.
    Euclidean,
    /// Uniform edge weights closed under shortest paths.
    RandomMetric,
}

impl CostStyle {
    pub fn name(self) -> &'static str {
        match self {
            CostStyle::Euclidean => "euclidean",
            CostStyle::RandomMetric => "random-metric",
        }
    }

    pub fn parse(s: &str) -> Result<CostStyle> {
        match s {
            "euclidean" => Ok(CostStyle::Euclidean),
            "random-metric" => Ok(CostStyle::RandomMetric),
            other => Err(Error::InvalidInput(format!(
                "unknown cost style '{other}' (expected euclidean or random-metric)"
            ))),
        }
    }
}

/// Generator configuration. The same configuration and seed always
/// produce the same instance.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub variant: Variant,
    pub n: usize,
    pub seed: u64,
    pub style: CostStyle,
    /// Upper bound for per-vertex visit requirements (ignored for the
    /// unrestricted variant, which visits every vertex once).
    pub max_visits: u64,
    /// Requested number of salesmen / depots; clamped to the variant's
    /// feasible range, randomized when absent.
    pub salesmen: Option<usize>,
}

fn quantize_round(x: f64) -> f64 {
    let s = (2f64).powi(COST_GRID_SHIFT);
    (x * s).round() / s
}

fn quantize_floor(x: f64) -> f64 {
    let s = (2f64).powi(COST_GRID_SHIFT);
    (x * s).floor() / s
}

/// Shortest-path closure. On grid-quantized inputs every sum is exact in
/// `f64`, so the result is an exact metric on the grid.
fn metric_closure(n: usize, c: &mut [f64]) {
    for k in 0..n {
        for i in 0..n {
            if i == k {
                continue;
            }
            for j in 0..n {
                if j == k || j == i {
                    continue;
                }
                let via = c[i * n + k] + c[k * n + j];
                if via < c[i * n + j] {
                    c[i * n + j] = via;
                }
            }
        }
    }
}

fn base_costs(rng: &mut ChaCha8Rng, n: usize, style: CostStyle) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    match style {
        CostStyle::Euclidean => {
            let points: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.gen::<f64>(), rng.gen::<f64>()))
                .collect();
            for i in 0..n {
                for j in (i + 1)..n {
                    let dx = points[i].0 - points[j].0;
                    let dy = points[i].1 - points[j].1;
                    let d = quantize_round(dx.hypot(dy));
                    c[i * n + j] = d;
                    c[j * n + i] = d;
                }
            }
        }
        CostStyle::RandomMetric => {
            for i in 0..n {
                for j in (i + 1)..n {
                    let d = quantize_round(rng.gen_range(0.05..1.05));
                    c[i * n + j] = d;
                    c[j * n + i] = d;
                }
            }
        }
    }
    metric_closure(n, &mut c);
    // Loop costs: somewhere between free and the cheapest round trip,
    // rounded down so the loop rule holds exactly on the grid.
    for v in 0..n {
        let min_ray = (0..n)
            .filter(|&u| u != v)
            .map(|u| c[v * n + u])
            .fold(f64::INFINITY, f64::min);
        let rho: f64 = rng.gen();
        let loop_cost = if min_ray.is_finite() {
            quantize_floor(2.0 * min_ray * rho)
        } else {
            // Single-vertex instance: any non-negative loop cost works.
            quantize_floor(rho.max(0.1))
        };
        c[v * n + v] = loop_cost;
    }
    c
}

/// Pick `q` distinct vertices deterministically from the stream.
fn pick_depots(rng: &mut ChaCha8Rng, n: usize, q: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let j = rng.gen_range(i..n);
        order.swap(i, j);
    }
    let mut depots: Vec<usize> = order.into_iter().take(q).collect();
    depots.sort_unstable();
    depots
}

fn clamp_salesmen(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Result<usize> {
    let n = cfg.n;
    let upper = match cfg.variant {
        Variant::MvTsp => 1,
        // Each depot walk needs its own non-depot partner in a
        // vertex-disjoint forest cover.
        Variant::MvMtspPlus => (n / 2).min(3),
        Variant::SdMvMtspPlus => ((n.saturating_sub(1)) / 2).min(3),
        Variant::SdMvMtspPlusDisjoint => ((n.saturating_sub(1)) / 2).min(2),
        Variant::MtspPlusUnrestricted => n,
    };
    if upper == 0 {
        return Err(Error::InvalidInput(format!(
            "n = {n} is too small for variant {}",
            cfg.variant.name()
        )));
    }
    let k = match cfg.salesmen {
        Some(k) => {
            if k < 1 || k > upper {
                return Err(Error::InvalidInput(format!(
                    "salesman count {k} outside the generator range [1, {upper}] for n = {n}"
                )));
            }
            k
        }
        None => rng.gen_range(1..=upper),
    };
    Ok(k)
}

/// Generate a validated instance.
pub fn generate(cfg: &GenConfig) -> Result<ProblemInstance> {
    if cfg.n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    if cfg.max_visits == 0 {
        return Err(Error::InvalidInput("max visits must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n;
    let entries = base_costs(&mut rng, n, cfg.style);
    let costs = CostMatrix::new(n, entries)?;

    let k = clamp_salesmen(cfg, &mut rng)?;
    let (depots, salesmen) = match cfg.variant {
        Variant::MvTsp => (vec![], None),
        Variant::MvMtspPlus => (pick_depots(&mut rng, n, k), None),
        Variant::SdMvMtspPlus | Variant::SdMvMtspPlusDisjoint => {
            (pick_depots(&mut rng, n, 1), Some(k))
        }
        Variant::MtspPlusUnrestricted => (vec![], Some(k)),
    };

    let mut visits = vec![1u64; n];
    if cfg.variant != Variant::MtspPlusUnrestricted {
        for v in 0..n {
            if depots.binary_search(&v).is_err() {
                visits[v] = rng.gen_range(1..=cfg.max_visits);
            }
        }
    }

    let inst = ProblemInstance {
        costs,
        variant: cfg.variant,
        visits,
        depots,
        salesmen,
    };
    inst.validate()
        .map_err(|e| Error::Internal(format!("generator produced an invalid instance: {e}")))?;

    // The grid construction makes both semi-metric rules exact in scaled
    // integers; double-check so downstream exact comparisons can rely on
    // it.
    let d = inst.costs.dyadic()?;
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            if d.cost(u, u) > 2 * d.cost(u, v) {
                return Err(Error::Internal(format!(
                    "generated loop cost at {u} is not exactly dominated"
                )));
            }
            for w in 0..n {
                if w == u || w == v {
                    continue;
                }
                if d.cost(u, w) > d.cost(u, v) + d.cost(v, w) {
                    return Err(Error::Internal(format!(
                        "generated costs violate the exact triangle inequality on ({u}, {v}, {w})"
                    )));
                }
            }
        }
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let cfg = GenConfig {
            variant: Variant::MvTsp,
            n: 6,
            seed: 42,
            style: CostStyle::Euclidean,
            max_visits: 1_000_000_000,
            salesmen: None,
        };
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.costs.entries(), b.costs.entries());
        assert_eq!(a.visits, b.visits);
    }

    #[test]
    fn all_variants_generate_valid_instances() {
        for variant in Variant::ALL {
            for style in [CostStyle::Euclidean, CostStyle::RandomMetric] {
                for seed in 0..8 {
                    let cfg = GenConfig {
                        variant,
                        n: 4 + (seed as usize % 5),
                        seed,
                        style,
                        max_visits: 50,
                        salesmen: None,
                    };
                    let inst = generate(&cfg).unwrap();
                    inst.validate().unwrap();
                    assert_eq!(inst.variant, variant);
                }
            }
        }
    }

    #[test]
    fn costs_live_on_the_grid() {
        let cfg = GenConfig {
            variant: Variant::MvTsp,
            n: 7,
            seed: 7,
            style: CostStyle::RandomMetric,
            max_visits: 10,
            salesmen: None,
        };
        let inst = generate(&cfg).unwrap();
        let d = inst.costs.dyadic().unwrap();
        assert!(d.shift() <= COST_GRID_SHIFT as u32);
    }

    #[test]
    fn single_vertex_instance() {
        let cfg = GenConfig {
            variant: Variant::MvTsp,
            n: 1,
            seed: 3,
            style: CostStyle::Euclidean,
            max_visits: 9,
            salesmen: None,
        };
        let inst = generate(&cfg).unwrap();
        assert!(inst.costs.cost(0, 0) > 0.0);
    }

    #[test]
    fn salesman_clamps() {
        let cfg = GenConfig {
            variant: Variant::MvMtspPlus,
            n: 6,
            seed: 1,
            style: CostStyle::Euclidean,
            max_visits: 5,
            salesmen: Some(4),
        };
        assert!(generate(&cfg).is_err());
        let cfg = GenConfig {
            salesmen: Some(3),
            ..cfg
        };
        let inst = generate(&cfg).unwrap();
        assert_eq!(inst.depots.len(), 3);
    }
}

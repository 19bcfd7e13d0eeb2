//! Monte-Carlo procedures that steer degree assortativity (degree-preserving
//! edge rewiring), degree-attribute correlation (attribute swapping), and
//! structure randomization at fixed assortativity.
//!
//! All three use greedy acceptance: a proposal is taken only if it keeps the
//! graph simple and moves the objective strictly toward the target. The
//! objective is maintained incrementally from exact integer sums and
//! re-verified from scratch at exit.

use std::collections::HashSet;

use rand::Rng;
use serde::Serialize;

use crate::attributes::{attribute_profile, AttributeAssignment};
use crate::error::{Error, Result};
use crate::graph::{assortativity, degree_stats, Graph, NodeId};
use crate::rng::rng_from_seed;

/// Proposals whose objective change is below this are rejected outright;
/// accepting them could cycle without progress.
const MIN_IMPROVEMENT: f64 = 1e-12;

/// Outcome of a tuning run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TuneResult {
    pub achieved: f64,
    pub target: f64,
    /// Proposals examined.
    pub iterations: u64,
    pub accepted: u64,
    pub converged: bool,
    pub swap_acceptance_rate: f64,
}

impl TuneResult {
    fn new(achieved: f64, target: f64, iterations: u64, accepted: u64, converged: bool) -> Self {
        TuneResult {
            achieved,
            target,
            iterations,
            accepted,
            converged,
            swap_acceptance_rate: if iterations > 0 {
                accepted as f64 / iterations as f64
            } else {
                0.0
            },
        }
    }
}

fn canon(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    (u.min(v), u.max(v))
}

/// Mutable edge set used during rewiring: indexable list for uniform proposal
/// sampling plus a hash set for simplicity checks.
struct EdgePool {
    list: Vec<(NodeId, NodeId)>,
    set: HashSet<(NodeId, NodeId)>,
}

impl EdgePool {
    fn new(g: &Graph) -> EdgePool {
        let list = g.edges().to_vec();
        let set = list.iter().copied().collect();
        EdgePool { list, set }
    }

    /// Tries to replace edges at `i` and `j` with `new_a` and `new_b`.
    /// Returns false (leaving the pool untouched) if the result would not be
    /// a simple graph.
    fn try_swap(
        &mut self,
        i: usize,
        j: usize,
        new_a: (NodeId, NodeId),
        new_b: (NodeId, NodeId),
    ) -> bool {
        if new_a.0 == new_a.1 || new_b.0 == new_b.1 {
            return false;
        }
        let (new_a, new_b) = (canon(new_a.0, new_a.1), canon(new_b.0, new_b.1));
        if new_a == new_b {
            return false;
        }
        let old_a = self.list[i];
        let old_b = self.list[j];
        // identity rewiring is not a structure change
        if (new_a == old_a && new_b == old_b) || (new_a == old_b && new_b == old_a) {
            return false;
        }
        self.set.remove(&old_a);
        self.set.remove(&old_b);
        if self.set.contains(&new_a) || self.set.contains(&new_b) {
            self.set.insert(old_a);
            self.set.insert(old_b);
            return false;
        }
        self.set.insert(new_a);
        self.set.insert(new_b);
        self.list[i] = new_a;
        self.list[j] = new_b;
        true
    }
}

/// Constant moments of the degree sequence plus the running edge-degree
/// cross sum; assortativity is a closed function of the cross sum alone.
struct AssortativityTracker {
    cross_sum: i128,
    edge_count: f64,
    mean_q: f64,
    sigma_q_sq: f64,
}

impl AssortativityTracker {
    fn new(g: &Graph) -> Result<AssortativityTracker> {
        let stats = degree_stats(g);
        let sigma_q_sq = stats.sigma_q_sq();
        if sigma_q_sq <= 0.0 {
            return Err(Error::AssortativityUndefined);
        }
        let cross_sum: i128 = g
            .edges()
            .iter()
            .map(|&(u, v)| g.degree(u) as i128 * g.degree(v) as i128)
            .sum();
        Ok(AssortativityTracker {
            cross_sum,
            edge_count: g.edge_count() as f64,
            mean_q: stats.mean_q_degree(),
            sigma_q_sq,
        })
    }

    fn r_of(&self, cross_sum: i128) -> f64 {
        (cross_sum as f64 / self.edge_count - self.mean_q * self.mean_q) / self.sigma_q_sq
    }

    fn r(&self) -> f64 {
        self.r_of(self.cross_sum)
    }
}

fn degree_multiset(g: &Graph) -> Vec<u32> {
    let mut d = g.degrees().to_vec();
    d.sort_unstable();
    d
}

/// Rewires toward a target assortativity with degree-preserving double-edge
/// swaps. Both pairings of each sampled edge pair are evaluated and the one
/// improving `|r - target|` most is taken, provided the graph stays simple.
///
/// Non-convergence is not an error: the result carries `converged = false`
/// and the value actually reached.
pub fn rewire_to_assortativity(
    g: &Graph,
    target_r: f64,
    tolerance: f64,
    max_iters: Option<u64>,
    seed: u64,
) -> Result<(Graph, TuneResult)> {
    if tolerance <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let tracker = AssortativityTracker::new(g)?;
    let max_iters = max_iters.unwrap_or(100 * g.edge_count() as u64);
    let degrees: Vec<u32> = g.degrees().to_vec();
    let mut pool = EdgePool::new(g);
    let mut cross = tracker.cross_sum;
    let mut rng = rng_from_seed(seed);

    let mut iterations = 0u64;
    let mut accepted = 0u64;
    let mut gap = (tracker.r_of(cross) - target_r).abs();

    while gap > tolerance && iterations < max_iters && pool.list.len() >= 2 {
        iterations += 1;
        let i = rng.gen_range(0..pool.list.len());
        let mut j = rng.gen_range(0..pool.list.len());
        while j == i {
            j = rng.gen_range(0..pool.list.len());
        }
        let (a, b) = pool.list[i];
        let (c, d) = pool.list[j];
        let (ka, kb) = (degrees[a as usize] as i128, degrees[b as usize] as i128);
        let (kc, kd) = (degrees[c as usize] as i128, degrees[d as usize] as i128);
        let removed = ka * kb + kc * kd;

        // pairing 1: (a,c)(b,d); pairing 2: (a,d)(b,c)
        let candidates = [
            ((a, c), (b, d), ka * kc + kb * kd - removed),
            ((a, d), (b, c), ka * kd + kb * kc - removed),
        ];
        let mut order = [0usize, 1usize];
        let gain = |delta: i128| gap - (tracker.r_of(cross + delta) - target_r).abs();
        if gain(candidates[1].2) > gain(candidates[0].2) {
            order.swap(0, 1);
        }
        for idx in order {
            let (e1, e2, delta) = candidates[idx];
            if gain(delta) <= MIN_IMPROVEMENT {
                continue;
            }
            if pool.try_swap(i, j, e1, e2) {
                cross += delta;
                gap = (tracker.r_of(cross) - target_r).abs();
                accepted += 1;
                break;
            }
        }
    }

    let tuned = Graph::from_simple_parts(g.labels().to_vec(), pool.list);
    debug_assert_eq!(degree_multiset(g), degree_multiset(&tuned));
    let achieved = assortativity(&tuned)?;
    debug_assert!((achieved - tracker.r_of(cross)).abs() <= 1e-6);
    let converged = (achieved - target_r).abs() <= tolerance;
    Ok((
        tuned,
        TuneResult::new(achieved, target_r, iterations, accepted, converged),
    ))
}

/// Report from structure randomization at fixed assortativity.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RandomizeReport {
    pub accepted: u64,
    pub proposals: u64,
    pub r_initial: f64,
    pub r_final: f64,
}

/// Randomizes wiring while preserving the degree sequence and keeping the
/// assortativity within `tolerance` of its initial value. May accept fewer
/// swaps than requested; the count is reported.
pub fn randomize_at_fixed_r(
    g: &Graph,
    tolerance: f64,
    n_accepted_swaps: u64,
    seed: u64,
) -> Result<(Graph, RandomizeReport)> {
    let tracker = AssortativityTracker::new(g)?;
    let r_initial = tracker.r();
    let degrees: Vec<u32> = g.degrees().to_vec();
    let mut pool = EdgePool::new(g);
    let mut cross = tracker.cross_sum;
    let mut rng = rng_from_seed(seed);

    let budget = n_accepted_swaps.saturating_mul(100);
    let mut proposals = 0u64;
    let mut accepted = 0u64;

    while accepted < n_accepted_swaps && proposals < budget && pool.list.len() >= 2 {
        proposals += 1;
        let i = rng.gen_range(0..pool.list.len());
        let mut j = rng.gen_range(0..pool.list.len());
        while j == i {
            j = rng.gen_range(0..pool.list.len());
        }
        let (a, b) = pool.list[i];
        let (c, d) = pool.list[j];
        let (ka, kb) = (degrees[a as usize] as i128, degrees[b as usize] as i128);
        let (kc, kd) = (degrees[c as usize] as i128, degrees[d as usize] as i128);
        let removed = ka * kb + kc * kd;
        let (e1, e2, delta) = if rng.gen() {
            ((a, c), (b, d), ka * kc + kb * kd - removed)
        } else {
            ((a, d), (b, c), ka * kd + kb * kc - removed)
        };
        if (tracker.r_of(cross + delta) - r_initial).abs() > tolerance {
            continue;
        }
        if pool.try_swap(i, j, e1, e2) {
            cross += delta;
            accepted += 1;
        }
    }

    let randomized = Graph::from_simple_parts(g.labels().to_vec(), pool.list);
    debug_assert_eq!(degree_multiset(g), degree_multiset(&randomized));
    let r_final = assortativity(&randomized)?;
    debug_assert!((r_final - tracker.r_of(cross)).abs() <= 1e-6);
    Ok((
        randomized,
        RandomizeReport {
            accepted,
            proposals,
            r_initial,
            r_final,
        },
    ))
}

/// Steers the degree-attribute correlation by swapping attribute values
/// between a random active and a random inactive node when the swap moves
/// `rho_kx` strictly in the needed direction. The active count is conserved.
///
/// Stops at tolerance, at the proposal cap, or when a full pass of `N`
/// consecutive proposals accepts nothing.
pub fn swap_attributes_to_rho(
    g: &Graph,
    a: &AttributeAssignment,
    target_rho: f64,
    tolerance: f64,
    max_iters: Option<u64>,
    seed: u64,
) -> Result<(AttributeAssignment, TuneResult)> {
    if tolerance <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    // Validates preconditions: non-degenerate assignment, sigma_k > 0.
    attribute_profile(g, a)?;
    let n = g.node_count();
    let stats = degree_stats(g);
    let p_active = a.active_count() as f64 / n as f64;
    let sigma_x = (p_active * (1.0 - p_active)).sqrt();
    let scale = p_active / (sigma_x * stats.sigma_k());
    let mean_k = stats.mean_degree();
    let count = a.active_count() as f64;

    let mut sum_active: i128 = a.active_nodes().map(|v| g.degree(v) as i128).sum();
    let rho_of = |sum: i128| (scale * (sum as f64 / count - mean_k)).clamp(-1.0, 1.0);

    let mut active: Vec<NodeId> = a.active_nodes().collect();
    let mut inactive: Vec<NodeId> = (0..n as NodeId).filter(|&v| !a.is_active(v)).collect();
    let mut out = a.clone();
    let mut rng = rng_from_seed(seed);

    let max_iters = max_iters.unwrap_or(100 * n as u64);
    let mut iterations = 0u64;
    let mut accepted = 0u64;
    let mut rejected_streak = 0usize;
    let mut rho = rho_of(sum_active);

    while (rho - target_rho).abs() > tolerance
        && iterations < max_iters
        && rejected_streak < n
    {
        iterations += 1;
        let ai = rng.gen_range(0..active.len());
        let bi = rng.gen_range(0..inactive.len());
        let (va, vb) = (active[ai], inactive[bi]);
        let delta = g.degree(vb) as i128 - g.degree(va) as i128;
        let rho_new = rho_of(sum_active + delta);
        let improves = if target_rho > rho {
            rho_new > rho + MIN_IMPROVEMENT
        } else {
            rho_new < rho - MIN_IMPROVEMENT
        };
        if improves {
            out.swap(va, vb);
            active[ai] = vb;
            inactive[bi] = va;
            sum_active += delta;
            rho = rho_new;
            accepted += 1;
            rejected_streak = 0;
        } else {
            rejected_streak += 1;
        }
    }

    let achieved = attribute_profile(g, &out)?.rho_kx;
    debug_assert!((achieved - rho).abs() <= 1e-6);
    debug_assert_eq!(out.active_count(), a.active_count());
    let converged = (achieved - target_rho).abs() <= tolerance;
    Ok((
        out,
        TuneResult::new(achieved, target_rho, iterations, accepted, converged),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attributes::{activate_random, activate_top_degrees};
    use crate::generators::{erdos_renyi, scale_free, ErConfig, PowerLawConfig};

    fn star(leaves: u64) -> Graph {
        let edges: Vec<(u64, u64)> = (1..=leaves).map(|l| (0, l)).collect();
        Graph::from_edge_list(&edges).unwrap().0
    }

    #[test]
    fn already_at_target_accepts_nothing() {
        let (g, _) = erdos_renyi(
            &ErConfig {
                n: 500,
                mean_degree: 4.0,
            },
            11,
        )
        .unwrap();
        let r0 = assortativity(&g).unwrap();
        let (tuned, result) =
            rewire_to_assortativity(&g, r0 + 0.004, 0.005, None, 1).unwrap();
        assert!(result.converged);
        assert_eq!(result.accepted, 0);
        assert_eq!(result.iterations, 0);
        assert_eq!(tuned.edges(), g.edges());
    }

    #[test]
    fn rewiring_preserves_degree_sequence() {
        let (g, _) = erdos_renyi(
            &ErConfig {
                n: 1000,
                mean_degree: 5.0,
            },
            3,
        )
        .unwrap();
        let (tuned, result) = rewire_to_assortativity(&g, -0.1, 0.01, None, 5).unwrap();
        assert!(result.converged, "achieved {}", result.achieved);
        assert_eq!(degree_multiset(&g), degree_multiset(&tuned));
        assert_eq!(g.edge_count(), tuned.edge_count());
        assert!((assortativity(&tuned).unwrap() - result.achieved).abs() < 1e-12);
    }

    #[test]
    fn regular_graph_rewiring_errors() {
        let (g, _) = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(matches!(
            rewire_to_assortativity(&g, 0.1, 0.01, None, 1),
            Err(Error::AssortativityUndefined)
        ));
    }

    #[test]
    fn unreachable_target_reports_non_convergence() {
        let cfg = PowerLawConfig {
            n: 2000,
            alpha: 2.1,
            k_min: 1,
            k_max: None,
        };
        let (g, _) = scale_free(&cfg, 21).unwrap();
        let r0 = assortativity(&g).unwrap();
        let (_, result) = rewire_to_assortativity(&g, 0.9, 0.01, Some(200_000), 2).unwrap();
        assert!(result.achieved >= r0 - 1e-9, "moved away from target");
        if !result.converged {
            assert!((result.achieved - 0.9).abs() > 0.01);
        }
    }

    #[test]
    fn randomize_keeps_r_and_degrees() {
        let cfg = PowerLawConfig {
            n: 2000,
            alpha: 2.4,
            k_min: 1,
            k_max: None,
        };
        let (g, _) = scale_free(&cfg, 8).unwrap();
        let (shuffled, report) = randomize_at_fixed_r(&g, 0.01, 2000, 99).unwrap();
        assert!((report.r_final - report.r_initial).abs() <= 0.01);
        assert_eq!(degree_multiset(&g), degree_multiset(&shuffled));
        assert!(report.accepted > 0);
        assert_ne!(g.edges(), shuffled.edges());
    }

    #[test]
    fn graphs_with_no_alternative_wiring_stay_put() {
        // the triangle is regular, so r itself is undefined
        let (g, _) = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(matches!(
            randomize_at_fixed_r(&g, 0.01, 100, 1),
            Err(Error::AssortativityUndefined)
        ));
        // a star admits no degree-preserving swap: every proposal makes a
        // self-loop at the hub or duplicates an existing spoke
        let h = star(6);
        let (same, report) = randomize_at_fixed_r(&h, 1.0, 50, 1).unwrap();
        assert_eq!(h.edges(), same.edges());
        assert_eq!(report.accepted, 0);
    }

    #[test]
    fn star_single_swap_reaches_rho_one() {
        let g = star(7);
        let mut x = vec![false; g.node_count()];
        x[3] = true; // one leaf active
        let a = AttributeAssignment::new(x);
        let (tuned, result) = swap_attributes_to_rho(&g, &a, 1.0, 0.01, None, 4).unwrap();
        assert!(result.converged);
        assert!(tuned.is_active(0), "hub must end active");
        assert_eq!(tuned.active_count(), 1);
        assert!((result.achieved - 1.0).abs() < 1e-9);
    }

    #[test]
    fn top_degree_activation_is_a_fixed_point() {
        let cfg = PowerLawConfig {
            n: 1000,
            alpha: 2.4,
            k_min: 1,
            k_max: None,
        };
        let (g, _) = scale_free(&cfg, 13).unwrap();
        let a = activate_top_degrees(&g, 0.05).unwrap();
        let (tuned, result) = swap_attributes_to_rho(&g, &a, 1.0, 0.001, None, 5).unwrap();
        assert_eq!(result.accepted, 0, "greedy optimum admits no improving swap");
        assert!(!result.converged);
        assert_eq!(tuned, a);
    }

    #[test]
    fn swap_conserves_active_count() {
        let (g, _) = erdos_renyi(
            &ErConfig {
                n: 2000,
                mean_degree: 5.0,
            },
            6,
        )
        .unwrap();
        let a = activate_random(&g, 0.05, 7).unwrap();
        let (tuned, result) = swap_attributes_to_rho(&g, &a, 0.2, 0.01, None, 8).unwrap();
        assert!(result.converged, "achieved {}", result.achieved);
        assert_eq!(tuned.active_count(), a.active_count());
    }

    #[test]
    fn degenerate_assignment_errors() {
        let g = star(5);
        let all = AttributeAssignment::new(vec![true; 6]);
        assert!(swap_attributes_to_rho(&g, &all, 0.5, 0.01, None, 1).is_err());
    }
}

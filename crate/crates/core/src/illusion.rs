//! The majority illusion: empirical measurement, the mean-field model built
//! on the joint degree distribution, its Gaussian approximation, and the
//! threshold-cascade dynamics it feeds.
//!
//! A node experiences the illusion when more than a fraction `phi` of its
//! neighbors are active (strict comparison), or at least that fraction
//! (inclusive). The model estimates the illusioned fraction per degree class
//! as a binomial tail in the conditional neighbor-activation probability
//! `h(k) = sum_{k'} P(x=1|k') e(k,k') / q(k)`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::attributes::{
    attribute_profile, ActivationByDegree, AttributeAssignment, AttributeProfile,
};
use crate::error::{Error, Result};
use crate::graph::{degree_stats, joint_degree_distribution, DegreeStats, Graph,
    JointDegreeDistribution, NodeId};

/// How the active-neighbor count is compared against `phi * degree`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// More than `phi k` active neighbors.
    #[default]
    Strict,
    /// At least `phi k` active neighbors.
    Inclusive,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Comparison::Strict => write!(f, "strict"),
            Comparison::Inclusive => write!(f, "inclusive"),
        }
    }
}

impl FromStr for Comparison {
    type Err = Error;

    fn from_str(s: &str) -> Result<Comparison> {
        match s {
            "strict" => Ok(Comparison::Strict),
            "inclusive" => Ok(Comparison::Inclusive),
            other => Err(Error::InvalidConfig(format!(
                "comparison must be `strict` or `inclusive`, got `{other}`"
            ))),
        }
    }
}

fn check_phi(phi: f64) -> Result<()> {
    if phi > 0.0 && phi < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidThreshold(phi))
    }
}

/// Whether `active` neighbors out of `degree` meet the threshold.
///
/// At `phi = 1/2` the comparison is done in integers, so boundary ties are
/// exact; elsewhere `phi * degree` is exactly representable well past any
/// realistic degree.
pub fn meets_threshold(active: u32, degree: u32, phi: f64, comparison: Comparison) -> bool {
    if phi == 0.5 {
        return match comparison {
            Comparison::Strict => 2 * active as u64 > degree as u64,
            Comparison::Inclusive => 2 * active as u64 >= degree as u64,
        };
    }
    let t = phi * degree as f64;
    match comparison {
        Comparison::Strict => (active as f64) > t,
        Comparison::Inclusive => (active as f64) >= t,
    }
}

/// Smallest active-neighbor count that meets the threshold for degree `k`,
/// or `k + 1` when no count does.
pub(crate) fn threshold_start(k: u32, phi: f64, comparison: Comparison) -> u32 {
    let guess = (phi * k as f64).floor() as i64 - 2;
    let mut n = guess.max(0) as u32;
    while n <= k && !meets_threshold(n, k, phi, comparison) {
        n += 1;
    }
    n
}

/// Upper binomial tail `sum_{n = n_min}^{k} C(k,n) p^n (1-p)^{k-n}`.
///
/// Computed by a multiplicative term recurrence anchored at the largest term
/// of the summed range, so neither factorials nor underflow at the anchor can
/// occur for any degree this crate sees.
pub fn binomial_tail(k: u32, n_min: u32, p: f64) -> f64 {
    if n_min == 0 {
        return 1.0;
    }
    if n_min > k {
        return 0.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    if k <= 50 {
        // exact binomial coefficients fit f64; direct summation keeps
        // hand-checkable values bit-exact
        let q = 1.0 - p;
        let mut choose = 1.0f64;
        for i in 0..n_min {
            choose *= (k - i) as f64 / (i + 1) as f64;
        }
        let mut sum = 0.0;
        for n in n_min..=k {
            sum += choose * p.powi(n as i32) * q.powi((k - n) as i32);
            choose *= (k - n) as f64 / (n + 1) as f64;
        }
        return sum.clamp(0.0, 1.0);
    }
    let mode = ((k as f64 + 1.0) * p).floor() as u32;
    if n_min > mode {
        // terms decrease with n on [n_min, k]
        sum_terms(k, n_min, p, Direction::Up)
    } else {
        // complement of the lower range [0, n_min-1], whose terms decrease
        // downward from n_min - 1
        (1.0 - sum_terms(k, n_min - 1, p, Direction::Down)).clamp(0.0, 1.0)
    }
}

enum Direction {
    Up,
    Down,
}

fn ln_term(k: u32, n: u32, p: f64) -> f64 {
    let (kf, nf) = (k as f64, n as f64);
    let ln_choose = ln_gamma(kf + 1.0) - ln_gamma(nf + 1.0) - ln_gamma(kf - nf + 1.0);
    ln_choose + nf * p.ln() + (kf - nf) * (-p).ln_1p()
}

fn sum_terms(k: u32, anchor: u32, p: f64, direction: Direction) -> f64 {
    let mut term = ln_term(k, anchor, p).exp();
    let mut sum = term;
    let odds = p / (1.0 - p);
    match direction {
        Direction::Up => {
            for n in anchor..k {
                term *= (k - n) as f64 / (n + 1) as f64 * odds;
                sum += term;
                if term <= sum * 1e-18 {
                    break;
                }
            }
        }
        Direction::Down => {
            for n in (1..=anchor).rev() {
                term *= n as f64 / ((k - n + 1) as f64 * odds);
                sum += term;
                if term <= sum * 1e-18 {
                    break;
                }
            }
        }
    }
    sum.clamp(0.0, 1.0)
}

/// Empirical count of illusioned nodes: nodes whose active-neighbor count
/// meets the threshold. Isolated nodes are never counted but stay in the
/// denominator.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EmpiricalIllusion {
    pub n_illusioned: usize,
    pub fraction: f64,
    pub isolated_nodes: usize,
}

pub fn empirical_illusion(
    g: &Graph,
    a: &AttributeAssignment,
    phi: f64,
    comparison: Comparison,
) -> Result<EmpiricalIllusion> {
    check_phi(phi)?;
    assert_eq!(g.node_count(), a.len(), "assignment size mismatch");
    let mut n_illusioned = 0usize;
    let mut isolated = 0usize;
    for v in 0..g.node_count() as NodeId {
        let degree = g.degree(v);
        if degree == 0 {
            isolated += 1;
            continue;
        }
        let active = g.neighbors(v).iter().filter(|&&u| a.is_active(u)).count() as u32;
        if meets_threshold(active, degree, phi, comparison) {
            n_illusioned += 1;
        }
    }
    Ok(EmpiricalIllusion {
        n_illusioned,
        fraction: n_illusioned as f64 / g.node_count() as f64,
        isolated_nodes: isolated,
    })
}

/// `P(x'=1 | k)`: probability that a neighbor of a degree-`k` node is active,
/// from the joint degree distribution and the per-degree activation table.
pub fn neighbor_active_prob_given_k(
    joint: &JointDegreeDistribution,
    activation: &ActivationByDegree,
    k: u32,
) -> Result<f64> {
    if !joint.contains_degree(k) {
        return Err(Error::UnobservedDegree(k));
    }
    let mut h = 0.0;
    for (k_prime, cond) in joint.neighbor_degrees_of(k) {
        h += activation.p_active_given(k_prime)? * cond;
    }
    Ok(h.clamp(0.0, 1.0))
}

/// Global probability that a node has an active neighbor, `sum_k h(k) p(k)`.
///
/// Requires every observed degree class to appear in the joint distribution;
/// graphs with isolated nodes have no neighbor distribution for `k = 0`.
pub fn global_neighbor_active_prob(
    stats: &DegreeStats,
    joint: &JointDegreeDistribution,
    activation: &ActivationByDegree,
) -> Result<f64> {
    let mut total = 0.0;
    for &k in stats.degree_counts().keys() {
        let h = neighbor_active_prob_given_k(joint, activation, k)?;
        total += h * stats.p(k);
    }
    Ok(total)
}

/// Model evaluation for one degree class.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PerDegreeModel {
    /// `p(k)`.
    pub p_k: f64,
    /// `h = P(x'=1 | k)`.
    pub h: f64,
    /// Binomial tail `P_{>phi}(k)`.
    pub p_gt_phi: f64,
}

/// Mean-field estimate of the illusioned fraction.
#[derive(Debug, Clone, Serialize)]
pub struct ModelIllusion {
    pub fraction: f64,
    pub per_k: BTreeMap<u32, PerDegreeModel>,
}

/// Evaluates the statistical model: per degree class `k`, the probability
/// that a binomial draw of `k` neighbor states at rate `h(k)` meets the
/// threshold, aggregated with weights `p(k)`. Degree-0 nodes observe nothing
/// and contribute zero.
pub fn model_illusion(
    stats: &DegreeStats,
    joint: &JointDegreeDistribution,
    activation: &ActivationByDegree,
    phi: f64,
    comparison: Comparison,
) -> Result<ModelIllusion> {
    check_phi(phi)?;
    let mut per_k = BTreeMap::new();
    let mut fraction = 0.0;
    for &k in stats.degree_counts().keys() {
        if k == 0 {
            continue;
        }
        let h = neighbor_active_prob_given_k(joint, activation, k)?;
        let tail = binomial_tail(k, threshold_start(k, phi, comparison), h);
        let p_k = stats.p(k);
        per_k.insert(
            k,
            PerDegreeModel {
                p_k,
                h,
                p_gt_phi: tail,
            },
        );
        fraction += p_k * tail;
    }
    Ok(ModelIllusion { fraction, per_k })
}

/// Gaussian approximation: replaces the empirical `h(k)` with the linear form
/// `<x> + rho_kx (sigma_x / sigma_k)(k - <k>)`, clamped to `[0, 1]`.
pub fn gaussian_model_illusion(
    stats: &DegreeStats,
    profile: &AttributeProfile,
    phi: f64,
    comparison: Comparison,
) -> Result<f64> {
    check_phi(phi)?;
    let sigma_k = stats.sigma_k();
    if sigma_k <= 0.0 {
        return Err(Error::CorrelationUndefined("regular graph, sigma_k = 0"));
    }
    let slope = profile.rho_kx * profile.sigma_x / sigma_k;
    let mean_k = stats.mean_degree();
    let mut fraction = 0.0;
    for &k in stats.degree_counts().keys() {
        if k == 0 {
            continue;
        }
        let h = (profile.p_active + slope * (k as f64 - mean_k)).clamp(0.0, 1.0);
        fraction += stats.p(k) * binomial_tail(k, threshold_start(k, phi, comparison), h);
    }
    Ok(fraction)
}

/// Full measurement of one configuration: empirical fraction, model fraction,
/// Gaussian approximation where defined, and the per-degree model breakdown.
#[derive(Debug, Clone, Serialize)]
pub struct IllusionReport {
    pub phi: f64,
    pub comparison: Comparison,
    pub empirical_fraction: f64,
    pub n_illusioned: usize,
    pub isolated_nodes: usize,
    pub model_fraction: f64,
    /// Absent when the degree-attribute correlation is undefined (regular
    /// graph or degenerate assignment).
    pub gaussian_fraction: Option<f64>,
    pub per_k_model: BTreeMap<u32, PerDegreeModel>,
}

pub fn illusion_report(
    g: &Graph,
    a: &AttributeAssignment,
    phi: f64,
    comparison: Comparison,
) -> Result<IllusionReport> {
    let empirical = empirical_illusion(g, a, phi, comparison)?;
    let stats = degree_stats(g);
    let joint = joint_degree_distribution(g);
    let activation = ActivationByDegree::from_assignment(g, a);
    let model = model_illusion(&stats, &joint, &activation, phi, comparison)?;
    let gaussian = match attribute_profile(g, a) {
        Ok(profile) => Some(gaussian_model_illusion(&stats, &profile, phi, comparison)?),
        Err(_) => None,
    };
    Ok(IllusionReport {
        phi,
        comparison,
        empirical_fraction: empirical.fraction,
        n_illusioned: empirical.n_illusioned,
        isolated_nodes: empirical.isolated_nodes,
        model_fraction: model.fraction,
        gaussian_fraction: gaussian,
        per_k_model: model.per_k,
    })
}

/// Emits the per-degree model breakdown as CSV: `k,p_k,h_k,P_gt_phi_k`.
pub fn write_per_k_csv<W: Write>(per_k: &BTreeMap<u32, PerDegreeModel>, mut w: W) -> io::Result<()> {
    writeln!(w, "k,p_k,h_k,P_gt_phi_k")?;
    for (k, row) in per_k {
        writeln!(w, "{},{},{},{}", k, row.p_k, row.h, row.p_gt_phi)?;
    }
    Ok(())
}

/// Result of the synchronous threshold cascade. Nodes never deactivate.
#[derive(Debug, Clone, Serialize)]
pub struct CascadeResult {
    pub rounds: usize,
    /// Active counts, starting with the initial configuration.
    pub active_per_round: Vec<usize>,
    pub final_active_fraction: f64,
}

/// Runs the threshold model to fixity: in each synchronous round, every
/// inactive node observes the previous round's states and activates when its
/// active-neighbor count meets the threshold. Nodes with no neighbors
/// observe nothing and never activate.
pub fn run_threshold_cascade(
    g: &Graph,
    a: &AttributeAssignment,
    phi: f64,
    comparison: Comparison,
) -> Result<CascadeResult> {
    check_phi(phi)?;
    assert_eq!(g.node_count(), a.len(), "assignment size mismatch");
    let n = g.node_count();
    let mut active: Vec<bool> = (0..n as NodeId).map(|v| a.is_active(v)).collect();
    let mut counts: Vec<u32> = vec![0; n];
    for v in 0..n as NodeId {
        if active[v as usize] {
            for &u in g.neighbors(v) {
                counts[u as usize] += 1;
            }
        }
    }
    let mut total_active = a.active_count();
    let mut active_per_round = vec![total_active];
    let mut rounds = 0usize;
    loop {
        let newly: Vec<NodeId> = (0..n as NodeId)
            .filter(|&v| {
                !active[v as usize]
                    && g.degree(v) > 0
                    && meets_threshold(counts[v as usize], g.degree(v), phi, comparison)
            })
            .collect();
        if newly.is_empty() {
            break;
        }
        for &v in &newly {
            active[v as usize] = true;
        }
        for &v in &newly {
            for &u in g.neighbors(v) {
                counts[u as usize] += 1;
            }
        }
        total_active += newly.len();
        active_per_round.push(total_active);
        rounds += 1;
        debug_assert!(rounds <= n);
    }
    Ok(CascadeResult {
        rounds,
        active_per_round,
        final_active_fraction: total_active as f64 / n as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attributes::AttributeAssignment;

    fn star(leaves: u64) -> Graph {
        let edges: Vec<(u64, u64)> = (1..=leaves).map(|l| (0, l)).collect();
        Graph::from_edge_list(&edges).unwrap().0
    }

    fn cycle4() -> Graph {
        Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap().0
    }

    fn one_active(n: usize, v: usize) -> AttributeAssignment {
        let mut x = vec![false; n];
        x[v] = true;
        AttributeAssignment::new(x)
    }

    #[test]
    fn star_hub_active_all_leaves_illusioned() {
        let n = 7u64;
        let g = star(n);
        let a = one_active(g.node_count(), 0);
        let e = empirical_illusion(&g, &a, 0.5, Comparison::Strict).unwrap();
        assert_eq!(e.n_illusioned, n as usize);
        assert!((e.fraction - n as f64 / (n as f64 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn four_cycle_boundary_strict_vs_inclusive() {
        let g = cycle4();
        let a = one_active(4, 0);
        let strict = empirical_illusion(&g, &a, 0.5, Comparison::Strict).unwrap();
        assert_eq!(strict.n_illusioned, 0);
        let inclusive = empirical_illusion(&g, &a, 0.5, Comparison::Inclusive).unwrap();
        assert_eq!(inclusive.n_illusioned, 2);
        assert!((inclusive.fraction - 0.5).abs() < 1e-12);
    }

    #[test]
    fn threshold_start_boundaries() {
        assert_eq!(threshold_start(4, 0.5, Comparison::Strict), 3);
        assert_eq!(threshold_start(4, 0.5, Comparison::Inclusive), 2);
        assert_eq!(threshold_start(5, 0.5, Comparison::Strict), 3);
        assert_eq!(threshold_start(5, 0.5, Comparison::Inclusive), 3);
        assert_eq!(threshold_start(3, 0.9, Comparison::Strict), 3);
        assert_eq!(threshold_start(1, 0.99, Comparison::Strict), 1);
        assert_eq!(threshold_start(0, 0.5, Comparison::Strict), 1);
    }

    #[test]
    fn binomial_tail_small_exact() {
        // k = 3, p = 0.5: P(n >= 2) = 4/8, exact in f64
        assert_eq!(binomial_tail(3, 2, 0.5), 0.5);
        // k = 2, p = 1/4: P(n = 2) = 1/16
        assert_eq!(binomial_tail(2, 2, 0.25), 0.0625);
        assert_eq!(binomial_tail(5, 0, 0.3), 1.0);
        assert_eq!(binomial_tail(5, 6, 0.3), 0.0);
        assert_eq!(binomial_tail(5, 3, 0.0), 0.0);
        assert_eq!(binomial_tail(5, 3, 1.0), 1.0);
    }

    #[test]
    fn binomial_tail_large_degree_stable() {
        for &(k, p) in &[(10_000u32, 0.9f64), (10_000, 0.05), (4_000, 0.5)] {
            for n_min in [1u32, k / 4, k / 2, 3 * k / 4, k] {
                let upper = binomial_tail(k, n_min, p);
                assert!(upper.is_finite() && (0.0..=1.0).contains(&upper));
            }
        }
        // far above the mode the tail is tiny but representable
        let deep = binomial_tail(10_000, 1_000, 0.05);
        assert!(deep > 0.0 && deep < 1e-80, "got {deep:e}");
        // an astronomically small tail underflows to exactly zero
        assert_eq!(binomial_tail(10_000, 9_000, 0.05), 0.0);
    }

    #[test]
    fn binomial_tail_matches_exhaustive_sum_past_cutoff() {
        // u128 coefficients are exact for k = 60; checks the log-anchored path
        let k = 60u32;
        let mut choose = vec![1u128; (k + 1) as usize];
        for n in 1..=k as usize {
            choose[n] = choose[n - 1] * (k as usize - n + 1) as u128 / n as u128;
        }
        for &p in &[0.05f64, 0.3, 0.5, 0.9] {
            for n_min in [1u32, 15, 30, 45, 60] {
                let exact: f64 = (n_min..=k)
                    .map(|n| {
                        choose[n as usize] as f64
                            * p.powi(n as i32)
                            * (1.0 - p).powi((k - n) as i32)
                    })
                    .sum();
                let got = binomial_tail(k, n_min, p);
                assert!(
                    (got - exact).abs() < 1e-12,
                    "k={k} n_min={n_min} p={p}: {got} vs {exact}"
                );
            }
        }
        // the two large-k anchor branches agree with each other near the mode
        let k = 200;
        for n_min in 90..=110 {
            let up = sum_terms(k, n_min, 0.5, Direction::Up);
            let down = 1.0 - sum_terms(k, n_min - 1, 0.5, Direction::Down);
            assert!((up - down).abs() < 1e-12, "n_min={n_min}: {up} vs {down}");
        }
    }

    #[test]
    fn neighbor_prob_four_cycle() {
        let g = cycle4();
        let a = one_active(4, 0);
        let joint = joint_degree_distribution(&g);
        let act = ActivationByDegree::from_assignment(&g, &a);
        let h = neighbor_active_prob_given_k(&joint, &act, 2).unwrap();
        assert!((h - 0.25).abs() < 1e-12);
        assert!(matches!(
            neighbor_active_prob_given_k(&joint, &act, 3),
            Err(Error::UnobservedDegree(3))
        ));
    }

    #[test]
    fn neighbor_prob_star() {
        let n = 6u64;
        let g = star(n);
        let a = one_active(g.node_count(), 0);
        let joint = joint_degree_distribution(&g);
        let act = ActivationByDegree::from_assignment(&g, &a);
        assert!((neighbor_active_prob_given_k(&joint, &act, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!(neighbor_active_prob_given_k(&joint, &act, n as u32).unwrap().abs() < 1e-12);
    }

    #[test]
    fn global_neighbor_prob() {
        let n = 6u64;
        let g = star(n);
        let a = one_active(g.node_count(), 0);
        let stats = degree_stats(&g);
        let joint = joint_degree_distribution(&g);
        let act = ActivationByDegree::from_assignment(&g, &a);
        let global = global_neighbor_active_prob(&stats, &joint, &act).unwrap();
        assert!((global - n as f64 / (n as f64 + 1.0)).abs() < 1e-12);

        let g4 = cycle4();
        let a4 = one_active(4, 0);
        let global4 = global_neighbor_active_prob(
            &degree_stats(&g4),
            &joint_degree_distribution(&g4),
            &ActivationByDegree::from_assignment(&g4, &a4),
        )
        .unwrap();
        assert!((global4 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn model_four_cycle_hand_value() {
        let g = cycle4();
        let a = one_active(4, 0);
        let model = model_illusion(
            &degree_stats(&g),
            &joint_degree_distribution(&g),
            &ActivationByDegree::from_assignment(&g, &a),
            0.5,
            Comparison::Strict,
        )
        .unwrap();
        assert!((model.fraction - 0.0625).abs() < 1e-12);
    }

    #[test]
    fn model_degenerate_rates() {
        let g = star(5);
        let all_off = AttributeAssignment::new(vec![false; 6]);
        let model = model_illusion(
            &degree_stats(&g),
            &joint_degree_distribution(&g),
            &ActivationByDegree::from_assignment(&g, &all_off),
            0.5,
            Comparison::Strict,
        )
        .unwrap();
        assert_eq!(model.fraction, 0.0);
        let all_on = AttributeAssignment::new(vec![true; 6]);
        let model = model_illusion(
            &degree_stats(&g),
            &joint_degree_distribution(&g),
            &ActivationByDegree::from_assignment(&g, &all_on),
            0.5,
            Comparison::Strict,
        )
        .unwrap();
        assert!((model.fraction - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_zero_rho_matches_constant_rate_model() {
        // a graph with two degree classes and an activation chosen so that
        // rho_kx = 0: the gaussian h is flat at <x>
        let (g, _) = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 4), (0, 2)]).unwrap();
        let stats = degree_stats(&g);
        // choose the active pair so mean active degree equals mean degree
        let mut best = None;
        for i in 0..5u32 {
            for j in (i + 1)..5u32 {
                let mean = (g.degree(i) + g.degree(j)) as f64 / 2.0;
                if (mean - stats.mean_degree()).abs() < 1e-9 {
                    best = Some((i, j));
                }
            }
        }
        let (i, j) = best.expect("a zero-rho pair exists");
        let mut x = vec![false; 5];
        x[i as usize] = true;
        x[j as usize] = true;
        let a = AttributeAssignment::new(x);
        let profile = attribute_profile(&g, &a).unwrap();
        assert!(profile.rho_kx.abs() < 1e-12);
        let gauss = gaussian_model_illusion(&stats, &profile, 0.5, Comparison::Strict).unwrap();
        let flat: f64 = stats
            .degree_counts()
            .iter()
            .filter(|(&k, _)| k > 0)
            .map(|(&k, _)| {
                stats.p(k)
                    * binomial_tail(k, threshold_start(k, 0.5, Comparison::Strict), profile.p_active)
            })
            .sum();
        assert!((gauss - flat).abs() < 1e-12);
    }

    #[test]
    fn cascade_star_hub_one_round() {
        let g = star(8);
        let a = one_active(9, 0);
        let result = run_threshold_cascade(&g, &a, 0.5, Comparison::Strict).unwrap();
        assert_eq!(result.rounds, 1);
        assert_eq!(result.final_active_fraction, 1.0);
        assert_eq!(result.active_per_round, vec![1, 9]);
    }

    #[test]
    fn cascade_four_cycle_no_spread() {
        let g = cycle4();
        let a = one_active(4, 0);
        let result = run_threshold_cascade(&g, &a, 0.5, Comparison::Strict).unwrap();
        assert_eq!(result.rounds, 0);
        assert!((result.final_active_fraction - 0.25).abs() < 1e-12);
    }

    #[test]
    fn cascade_counts_monotone() {
        let (g, _) = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let a = one_active(6, 0);
        let result = run_threshold_cascade(&g, &a, 0.4, Comparison::Strict).unwrap();
        assert!(result
            .active_per_round
            .windows(2)
            .all(|w| w[1] >= w[0]));
        assert_eq!(result.final_active_fraction, 1.0);
    }

    #[test]
    fn report_assembles_all_parts() {
        let g = star(9);
        let a = one_active(10, 0);
        let report = illusion_report(&g, &a, 0.5, Comparison::Strict).unwrap();
        assert!((report.empirical_fraction - 0.9).abs() < 1e-12);
        assert!(report.gaussian_fraction.is_some());
        let reconstructed: f64 = report
            .per_k_model
            .values()
            .map(|row| row.p_k * row.p_gt_phi)
            .sum();
        assert!((reconstructed - report.model_fraction).abs() < 1e-12);
    }

    #[test]
    fn invalid_phi_rejected() {
        let g = cycle4();
        let a = one_active(4, 0);
        assert!(empirical_illusion(&g, &a, 0.0, Comparison::Strict).is_err());
        assert!(empirical_illusion(&g, &a, 1.0, Comparison::Strict).is_err());
    }
}

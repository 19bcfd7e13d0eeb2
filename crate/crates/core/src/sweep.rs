//! Experiment orchestration: parameter sweeps over (graph source, target
//! assortativity, target degree-attribute correlation, active fraction) with
//! replicates, and the fixed-assortativity structure ensemble.
//!
//! Determinism contract: a sweep is a pure function of (config, base seed).
//! Per-cell seeds are derived from the base seed and the cell coordinates, so
//! results do not depend on worker count or completion order. Output CSV is
//! byte-identical across runs.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attributes::{activate_random, attribute_profile, AttributeAssignment};
use crate::error::{Error, Result};
use crate::generators::{erdos_renyi, scale_free, ErConfig, PowerLawConfig};
use crate::graph::{assortativity, Graph};
use crate::illusion::{illusion_report, Comparison};
use crate::ingest::{load_dataset, DatasetSpec};
use crate::rng::derive_seed;
use crate::tuning::{randomize_at_fixed_r, rewire_to_assortativity, swap_attributes_to_rho};

const STAGE_GENERATE: u64 = 1;
const STAGE_REWIRE: u64 = 2;
const STAGE_ACTIVATE: u64 = 3;
const STAGE_SWAP: u64 = 4;
const STAGE_VARIANT: u64 = 5;

/// Where the graph for each cell comes from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSource {
    Powerlaw(PowerLawConfig),
    Er(ErConfig),
    Dataset(DatasetSpec),
}

impl GraphSource {
    /// `(graph, alpha_or_meank)` columns of the CSV schema.
    fn tag(&self) -> (String, String) {
        match self {
            GraphSource::Powerlaw(cfg) => ("powerlaw".into(), format!("{}", cfg.alpha)),
            GraphSource::Er(cfg) => ("er".into(), format!("{}", cfg.mean_degree)),
            GraphSource::Dataset(spec) => (spec.name.clone(), String::new()),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            GraphSource::Powerlaw(cfg) => cfg.validate(),
            GraphSource::Er(cfg) => cfg.validate(),
            GraphSource::Dataset(spec) => spec.validate(),
        }
    }

    /// Generates or clones the cell's base graph.
    fn realize(&self, base: Option<&Graph>, seed: u64) -> Result<Graph> {
        match self {
            GraphSource::Powerlaw(cfg) => Ok(scale_free(cfg, seed)?.0),
            GraphSource::Er(cfg) => Ok(erdos_renyi(cfg, seed)?.0),
            GraphSource::Dataset(_) => Ok(base.expect("dataset preloaded").clone()),
        }
    }

    fn preload(&self, data_root: &Path) -> Result<Option<Graph>> {
        match self {
            GraphSource::Dataset(spec) => Ok(Some(load_dataset(spec, data_root)?.0)),
            _ => Ok(None),
        }
    }
}

fn default_phi() -> f64 {
    0.5
}

fn default_replicates() -> u32 {
    10
}

fn default_tolerance() -> f64 {
    0.01
}

/// Sweep configuration, read from TOML.
///
/// Empty `r_targets` (or `rho_targets`) means a single untuned level: the
/// graph (or random activation) is measured as-is.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub graph: GraphSource,
    #[serde(default)]
    pub r_targets: Vec<f64>,
    #[serde(default)]
    pub rho_targets: Vec<f64>,
    pub active_fractions: Vec<f64>,
    #[serde(default = "default_phi")]
    pub phi: f64,
    #[serde(default)]
    pub comparison: Comparison,
    #[serde(default = "default_replicates")]
    pub replicates: u32,
    #[serde(default)]
    pub base_seed: u64,
    pub output_path: PathBuf,
    #[serde(default = "default_tolerance")]
    pub r_tolerance: f64,
    #[serde(default = "default_tolerance")]
    pub rho_tolerance: f64,
    #[serde(default)]
    pub max_rewire_iters: Option<u64>,
    #[serde(default)]
    pub max_swap_iters: Option<u64>,
}

impl SweepConfig {
    pub fn from_toml_file(path: &Path) -> Result<SweepConfig> {
        let text = fs::read_to_string(path)?;
        let cfg: SweepConfig = toml::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.graph.validate()?;
        if self.replicates < 1 {
            return Err(Error::InvalidConfig("replicates must be >= 1".into()));
        }
        if self.active_fractions.is_empty() {
            return Err(Error::InvalidConfig("active_fractions is empty".into()));
        }
        for &f in &self.active_fractions {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::InvalidConfig(format!("active fraction {f} not in (0,1)")));
            }
        }
        if !(self.phi > 0.0 && self.phi < 1.0) {
            return Err(Error::InvalidConfig(format!("phi {} not in (0,1)", self.phi)));
        }
        for t in self.r_targets.iter().chain(&self.rho_targets) {
            if !t.is_finite() {
                return Err(Error::InvalidConfig(format!("non-finite target {t}")));
            }
        }
        Ok(())
    }
}

/// One sweep cell: requested coordinates, achieved values averaged over
/// replicates, and the measured fractions.
#[derive(Debug, Clone, Serialize)]
pub struct SweepCell {
    pub r_requested: Option<f64>,
    pub rho_requested: Option<f64>,
    pub active_fraction: f64,
    pub r_achieved_mean: f64,
    pub rho_achieved_mean: f64,
    pub empirical_mean: f64,
    pub empirical_std: f64,
    pub model_mean: f64,
    pub gaussian_mean: Option<f64>,
    pub replicates: u32,
    pub seeds: Vec<u64>,
    pub r_converged: bool,
    pub rho_converged: bool,
    pub error: Option<String>,
}

struct ReplicateOutcome {
    r_achieved: f64,
    rho_achieved: f64,
    empirical: f64,
    model: f64,
    gaussian: Option<f64>,
    r_converged: bool,
    rho_converged: bool,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Runs one replicate of the generate -> rewire -> activate -> swap ->
/// measure pipeline.
#[allow(clippy::too_many_arguments)]
fn run_replicate(
    source: &GraphSource,
    base: Option<&Graph>,
    r_target: Option<f64>,
    rho_target: Option<f64>,
    fraction: f64,
    phi: f64,
    comparison: Comparison,
    r_tolerance: f64,
    rho_tolerance: f64,
    max_rewire_iters: Option<u64>,
    max_swap_iters: Option<u64>,
    seed: u64,
) -> Result<ReplicateOutcome> {
    let graph = source.realize(base, derive_seed(seed, &[STAGE_GENERATE]))?;
    let (graph, r_converged) = match r_target {
        Some(target) => {
            let (g, result) = rewire_to_assortativity(
                &graph,
                target,
                r_tolerance,
                max_rewire_iters,
                derive_seed(seed, &[STAGE_REWIRE]),
            )?;
            (g, result.converged)
        }
        None => (graph, true),
    };
    let assignment = activate_random(&graph, fraction, derive_seed(seed, &[STAGE_ACTIVATE]))?;
    let (assignment, rho_converged) = match rho_target {
        Some(target) => {
            let (a, result) = swap_attributes_to_rho(
                &graph,
                &assignment,
                target,
                rho_tolerance,
                max_swap_iters,
                derive_seed(seed, &[STAGE_SWAP]),
            )?;
            (a, result.converged)
        }
        None => (assignment, true),
    };
    let report = illusion_report(&graph, &assignment, phi, comparison)?;
    let r_achieved = assortativity(&graph).unwrap_or(f64::NAN);
    let rho_achieved = attribute_profile(&graph, &assignment)
        .map(|p| p.rho_kx)
        .unwrap_or(f64::NAN);
    Ok(ReplicateOutcome {
        r_achieved,
        rho_achieved,
        empirical: report.empirical_fraction,
        model: report.model_fraction,
        gaussian: report.gaussian_fraction,
        r_converged,
        rho_converged,
    })
}

fn aggregate_cell(
    r_requested: Option<f64>,
    rho_requested: Option<f64>,
    fraction: f64,
    seeds: Vec<u64>,
    outcomes: Result<Vec<ReplicateOutcome>>,
) -> SweepCell {
    let replicates = seeds.len() as u32;
    match outcomes {
        Ok(reps) => {
            let gauss: Vec<f64> = reps.iter().filter_map(|o| o.gaussian).collect();
            SweepCell {
                r_requested,
                rho_requested,
                active_fraction: fraction,
                r_achieved_mean: mean(&reps.iter().map(|o| o.r_achieved).collect::<Vec<_>>()),
                rho_achieved_mean: mean(&reps.iter().map(|o| o.rho_achieved).collect::<Vec<_>>()),
                empirical_mean: mean(&reps.iter().map(|o| o.empirical).collect::<Vec<_>>()),
                empirical_std: std_dev(&reps.iter().map(|o| o.empirical).collect::<Vec<_>>()),
                model_mean: mean(&reps.iter().map(|o| o.model).collect::<Vec<_>>()),
                gaussian_mean: if gauss.len() == reps.len() {
                    Some(mean(&gauss))
                } else {
                    None
                },
                replicates,
                seeds,
                r_converged: reps.iter().all(|o| o.r_converged),
                rho_converged: reps.iter().all(|o| o.rho_converged),
                error: None,
            }
        }
        Err(e) => SweepCell {
            r_requested,
            rho_requested,
            active_fraction: fraction,
            r_achieved_mean: f64::NAN,
            rho_achieved_mean: f64::NAN,
            empirical_mean: f64::NAN,
            empirical_std: f64::NAN,
            model_mean: f64::NAN,
            gaussian_mean: None,
            replicates,
            seeds,
            r_converged: false,
            rho_converged: false,
            error: Some(e.to_string()),
        },
    }
}

/// Optional-level lists: an empty target list becomes one untuned level.
fn levels(targets: &[f64]) -> Vec<Option<f64>> {
    if targets.is_empty() {
        vec![None]
    } else {
        targets.iter().copied().map(Some).collect()
    }
}

/// Runs the sweep, writes the CSV to `config.output_path`, and returns the
/// cells. Cell failures are recorded in their row; the sweep continues.
pub fn run_sweep(
    config: &SweepConfig,
    data_root: &Path,
    workers: Option<usize>,
) -> Result<Vec<SweepCell>> {
    config.validate()?;
    let base = config.graph.preload(data_root)?;
    let r_levels = levels(&config.r_targets);
    let rho_levels = levels(&config.rho_targets);

    let mut coords = Vec::new();
    for (ri, &r) in r_levels.iter().enumerate() {
        for (rhoi, &rho) in rho_levels.iter().enumerate() {
            for (fi, &fraction) in config.active_fractions.iter().enumerate() {
                coords.push((ri, r, rhoi, rho, fi, fraction));
            }
        }
    }

    let run_cell = |&(ri, r, rhoi, rho, fi, fraction): &(usize, Option<f64>, usize, Option<f64>, usize, f64)| {
        let seeds: Vec<u64> = (0..config.replicates)
            .map(|rep| derive_seed(config.base_seed, &[ri as u64, rhoi as u64, fi as u64, rep as u64]))
            .collect();
        let outcomes: Result<Vec<ReplicateOutcome>> = seeds
            .iter()
            .map(|&seed| {
                run_replicate(
                    &config.graph,
                    base.as_ref(),
                    r,
                    rho,
                    fraction,
                    config.phi,
                    config.comparison,
                    config.r_tolerance,
                    config.rho_tolerance,
                    config.max_rewire_iters,
                    config.max_swap_iters,
                    seed,
                )
            })
            .collect();
        aggregate_cell(r, rho, fraction, seeds, outcomes)
    };

    let cells: Vec<SweepCell> = match workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
            pool.install(|| coords.par_iter().map(run_cell).collect())
        }
        None => coords.par_iter().map(run_cell).collect(),
    };

    fs::write(&config.output_path, sweep_csv(config, &cells))?;
    Ok(cells)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v}")).unwrap_or_default()
}

fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x}")
    }
}

fn cell_flags(cell: &SweepCell) -> String {
    let mut flags = Vec::new();
    if let Some(err) = &cell.error {
        flags.push(format!("error={}", err.replace(',', ";")));
    }
    if !cell.r_converged {
        flags.push("r_unconverged".into());
    }
    if !cell.rho_converged {
        flags.push("rho_unconverged".into());
    }
    if cell.error.is_none() && cell.gaussian_mean.is_none() {
        flags.push("gaussian_undefined".into());
    }
    if flags.is_empty() {
        "ok".into()
    } else {
        flags.join(";")
    }
}

/// Renders the sweep CSV:
/// `graph,alpha_or_meank,r_req,r_ach,rho_req,rho_ach,frac_active,phi,cmp,emp_mean,emp_std,model,gauss,reps,flags`.
pub fn sweep_csv(config: &SweepConfig, cells: &[SweepCell]) -> String {
    let (graph, param) = config.graph.tag();
    let mut out = String::from(
        "graph,alpha_or_meank,r_req,r_ach,rho_req,rho_ach,frac_active,phi,cmp,emp_mean,emp_std,model,gauss,reps,flags\n",
    );
    for cell in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            graph,
            param,
            fmt_opt(cell.r_requested),
            fmt_num(cell.r_achieved_mean),
            fmt_opt(cell.rho_requested),
            fmt_num(cell.rho_achieved_mean),
            cell.active_fraction,
            config.phi,
            config.comparison,
            fmt_num(cell.empirical_mean),
            fmt_num(cell.empirical_std),
            fmt_num(cell.model_mean),
            cell.gaussian_mean.map(fmt_num).unwrap_or_else(|| "nan".into()),
            cell.replicates,
            cell_flags(cell),
        ));
    }
    out
}

/// Fixed-assortativity ensemble configuration, read from TOML.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub graph: GraphSource,
    #[serde(default)]
    pub r_targets: Vec<f64>,
    #[serde(default)]
    pub rho_targets: Vec<f64>,
    pub active_fraction: f64,
    #[serde(default = "default_phi")]
    pub phi: f64,
    #[serde(default)]
    pub comparison: Comparison,
    pub variants: u32,
    pub swaps_per_variant: u64,
    #[serde(default = "default_tolerance")]
    pub fixed_r_tolerance: f64,
    #[serde(default = "default_tolerance")]
    pub r_tolerance: f64,
    #[serde(default = "default_tolerance")]
    pub rho_tolerance: f64,
    #[serde(default)]
    pub base_seed: u64,
    pub output_path: PathBuf,
}

impl EnsembleConfig {
    pub fn from_toml_file(path: &Path) -> Result<EnsembleConfig> {
        let text = fs::read_to_string(path)?;
        let cfg: EnsembleConfig = toml::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.graph.validate()?;
        if self.variants < 1 {
            return Err(Error::InvalidConfig("variants must be >= 1".into()));
        }
        if !(self.active_fraction > 0.0 && self.active_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "active fraction {} not in (0,1)",
                self.active_fraction
            )));
        }
        Ok(())
    }
}

/// One structure-randomized variant measurement.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleRow {
    pub variant: u32,
    pub r_achieved: f64,
    pub rho_achieved: f64,
    pub empirical: f64,
    pub model: f64,
    pub accepted_swaps: u64,
    pub flags: String,
}

/// All variants of one (r, rho) level plus the spread of the empirical
/// fraction across them.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleLevel {
    pub r_requested: Option<f64>,
    pub rho_requested: Option<f64>,
    pub rows: Vec<EnsembleRow>,
    /// Max minus min empirical fraction across variants.
    pub spread: f64,
    pub error: Option<String>,
}

fn ensemble_level(
    config: &EnsembleConfig,
    base: Option<&Graph>,
    ri: usize,
    r_target: Option<f64>,
    rhoi: usize,
    rho_target: Option<f64>,
) -> EnsembleLevel {
    let seed = derive_seed(config.base_seed, &[ri as u64, rhoi as u64]);
    let built = (|| -> Result<Vec<EnsembleRow>> {
        let graph = config
            .graph
            .realize(base, derive_seed(seed, &[STAGE_GENERATE]))?;
        let rewirable = assortativity(&graph).is_ok();
        let graph = match (r_target, rewirable) {
            (Some(target), true) => {
                rewire_to_assortativity(
                    &graph,
                    target,
                    config.r_tolerance,
                    None,
                    derive_seed(seed, &[STAGE_REWIRE]),
                )?
                .0
            }
            _ => graph,
        };
        let mut rows = Vec::new();
        for variant in 0..config.variants {
            let vseed = derive_seed(seed, &[STAGE_VARIANT, variant as u64]);
            let mut flags: Vec<String> = Vec::new();
            let (variant_graph, accepted) = if rewirable {
                let (g, report) = randomize_at_fixed_r(
                    &graph,
                    config.fixed_r_tolerance,
                    config.swaps_per_variant,
                    vseed,
                )?;
                (g, report.accepted)
            } else {
                flags.push("regular_graph".into());
                (graph.clone(), 0)
            };
            let assignment = activate_random(
                &variant_graph,
                config.active_fraction,
                derive_seed(vseed, &[STAGE_ACTIVATE]),
            )?;
            let assignment: AttributeAssignment = match rho_target {
                Some(target) => {
                    match swap_attributes_to_rho(
                        &variant_graph,
                        &assignment,
                        target,
                        config.rho_tolerance,
                        None,
                        derive_seed(vseed, &[STAGE_SWAP]),
                    ) {
                        Ok((a, result)) => {
                            if !result.converged {
                                flags.push("rho_unconverged".into());
                            }
                            a
                        }
                        Err(Error::CorrelationUndefined(_)) => {
                            flags.push("rho_undefined".into());
                            assignment
                        }
                        Err(e) => return Err(e),
                    }
                }
                None => assignment,
            };
            let report = illusion_report(&variant_graph, &assignment, config.phi, config.comparison)?;
            rows.push(EnsembleRow {
                variant,
                r_achieved: assortativity(&variant_graph).unwrap_or(f64::NAN),
                rho_achieved: attribute_profile(&variant_graph, &assignment)
                    .map(|p| p.rho_kx)
                    .unwrap_or(f64::NAN),
                empirical: report.empirical_fraction,
                model: report.model_fraction,
                accepted_swaps: accepted,
                flags: if flags.is_empty() { "ok".into() } else { flags.join(";") },
            });
        }
        Ok(rows)
    })();

    match built {
        Ok(rows) => {
            let lo = rows.iter().map(|r| r.empirical).fold(f64::INFINITY, f64::min);
            let hi = rows.iter().map(|r| r.empirical).fold(f64::NEG_INFINITY, f64::max);
            EnsembleLevel {
                r_requested: r_target,
                rho_requested: rho_target,
                spread: hi - lo,
                rows,
                error: None,
            }
        }
        Err(e) => EnsembleLevel {
            r_requested: r_target,
            rho_requested: rho_target,
            rows: Vec::new(),
            spread: f64::NAN,
            error: Some(e.to_string()),
        },
    }
}

/// Runs the structure ensemble: for each (r, rho) level, `variants`
/// randomized rewirings of the same base graph are measured. Writes the CSV
/// and returns the per-level rows with their spread.
pub fn run_fixed_r_ensemble(
    config: &EnsembleConfig,
    data_root: &Path,
    workers: Option<usize>,
) -> Result<Vec<EnsembleLevel>> {
    config.validate()?;
    let base = config.graph.preload(data_root)?;
    let r_levels = levels(&config.r_targets);
    let rho_levels = levels(&config.rho_targets);
    let mut coords = Vec::new();
    for (ri, &r) in r_levels.iter().enumerate() {
        for (rhoi, &rho) in rho_levels.iter().enumerate() {
            coords.push((ri, r, rhoi, rho));
        }
    }
    let run =
        |&(ri, r, rhoi, rho): &(usize, Option<f64>, usize, Option<f64>)| {
            ensemble_level(config, base.as_ref(), ri, r, rhoi, rho)
        };
    let levels: Vec<EnsembleLevel> = match workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
            pool.install(|| coords.par_iter().map(run).collect())
        }
        None => coords.par_iter().map(run).collect(),
    };
    fs::write(&config.output_path, ensemble_csv(config, &levels))?;
    Ok(levels)
}

/// Renders the ensemble CSV:
/// `graph,alpha_or_meank,r_req,r_ach,rho_req,rho_ach,frac_active,phi,cmp,variant,empirical,model,accepted_swaps,flags`.
pub fn ensemble_csv(config: &EnsembleConfig, levels: &[EnsembleLevel]) -> String {
    let (graph, param) = config.graph.tag();
    let mut out = String::from(
        "graph,alpha_or_meank,r_req,r_ach,rho_req,rho_ach,frac_active,phi,cmp,variant,empirical,model,accepted_swaps,flags\n",
    );
    for level in levels {
        if let Some(err) = &level.error {
            out.push_str(&format!(
                "{},{},{},nan,{},nan,{},{},{},,nan,nan,0,error={}\n",
                graph,
                param,
                fmt_opt(level.r_requested),
                fmt_opt(level.rho_requested),
                config.active_fraction,
                config.phi,
                config.comparison,
                err.replace(',', ";"),
            ));
            continue;
        }
        for row in &level.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                graph,
                param,
                fmt_opt(level.r_requested),
                fmt_num(row.r_achieved),
                fmt_opt(level.rho_requested),
                fmt_num(row.rho_achieved),
                config.active_fraction,
                config.phi,
                config.comparison,
                row.variant,
                fmt_num(row.empirical),
                fmt_num(row.model),
                row.accepted_swaps,
                row.flags,
            ));
        }
    }
    out
}

use netillusion::attributes::*;
use netillusion::generators::*;
use netillusion::graph::*;
use netillusion::illusion::*;
use netillusion::tuning::*;

fn main() {
    let cfg = PowerLawConfig { n: 10_000, alpha: 2.1, k_min: 1, k_max: None };
    for r_target in [-0.15, -0.18, -0.20, -0.225, -0.25] {
        let mut emps = Vec::new();
        let mut r_achieved = Vec::new();
        for seed in 0..10u64 {
            let (g, _) = scale_free(&cfg, seed).unwrap();
            let (g, _) = rewire_to_assortativity(&g, r_target, 0.01, None, seed + 100).unwrap();
            let a = activate_random(&g, 0.05, seed + 200).unwrap();
            let (a, _) = swap_attributes_to_rho(&g, &a, 0.40, 0.01, None, seed + 300).unwrap();
            let rep = illusion_report(&g, &a, 0.5, Comparison::Strict).unwrap();
            emps.push(rep.empirical_fraction);
            r_achieved.push(assortativity(&g).unwrap());
        }
        let mean: f64 = emps.iter().sum::<f64>() / emps.len() as f64;
        let rmean: f64 = r_achieved.iter().sum::<f64>() / 10.0;
        let rmax = r_achieved.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = emps.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = emps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        println!("r target {r_target:+.3}: r_ach mean {rmean:+.3} worst {rmax:+.3} | emp mean {mean:.3} [{lo:.3},{hi:.3}]");
    }
}

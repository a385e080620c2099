//! Generational GA: binary tournament selection, parameterized-uniform
//! crossover, per-bit flip mutation and elitism of one.

use rand::Rng as _;

use super::{argmin, prepare, repair, RunResult, SearchConfig};
use crate::dataset::{FeatureMask, LabeledDataset};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::seed;

pub fn ga_run<T: Scalar>(
    train: &LabeledDataset<T>,
    cfg: &SearchConfig<T>,
    run_seed: u64,
) -> Result<RunResult<T>> {
    let mut eval = prepare(train, cfg, run_seed)?;
    let n = train.n_features();
    let pop = cfg.population_size;
    let pc = cfg.ga_pc.as_f64();
    let mix = cfg.ga_mix.as_f64();
    let pm = cfg.ga_pm.map_or(1.0 / n as f64, Scalar::as_f64);

    let mut rng = seed::rng(run_seed, &[seed::INIT]);
    let mut population: Vec<FeatureMask> = (0..pop)
        .map(|_| loop {
            let bits: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            if bits.contains(&true) {
                break FeatureMask::new(bits);
            }
        })
        .collect();
    let mut fitness = eval.evaluate_all(&population)?;
    let b = argmin(&fitness);
    let (mut best_mask, mut best_j) = (population[b].clone(), fitness[b]);
    let mut history = vec![best_j];

    for generation in 1..cfg.generations() {
        let mut rng = seed::rng(run_seed, &[seed::GENERATION, generation as u64]);
        let tournament = |rng: &mut seed::Rng| {
            let a = rng.random_range(0..pop);
            let b = rng.random_range(0..pop);
            if fitness[b] < fitness[a] {
                b
            } else {
                a
            }
        };
        let mut offspring: Vec<FeatureMask> = Vec::with_capacity(pop);
        while offspring.len() < pop {
            let mut first = population[tournament(&mut rng)].bits().to_vec();
            let mut second = population[tournament(&mut rng)].bits().to_vec();
            if rng.random_bool(pc) {
                for m in 0..n {
                    if rng.random_bool(mix) {
                        std::mem::swap(&mut first[m], &mut second[m]);
                    }
                }
            }
            for child in [&mut first, &mut second] {
                for bit in child.iter_mut() {
                    if rng.random_bool(pm) {
                        *bit = !*bit;
                    }
                }
                repair(child, &mut rng);
            }
            offspring.push(FeatureMask::new(first));
            if offspring.len() < pop {
                offspring.push(FeatureMask::new(second));
            }
        }
        let mut offspring_fitness = eval.evaluate_all(&offspring)?;

        if !offspring.contains(&best_mask) {
            let worst = (0..pop)
                .max_by(|&a, &b| {
                    offspring_fitness[a]
                        .partial_cmp(&offspring_fitness[b])
                        .unwrap()
                })
                .unwrap();
            offspring[worst] = best_mask.clone();
            offspring_fitness[worst] = best_j;
        }
        population = offspring;
        fitness = offspring_fitness;

        let b = argmin(&fitness);
        if fitness[b] < best_j {
            best_j = fitness[b];
            best_mask = population[b].clone();
        }
        history.push(best_j);
    }

    Ok(RunResult {
        cardinality: best_mask.cardinality(),
        best_mask,
        best_j,
        history,
        evaluations: eval.evaluations(),
        run_seed,
    })
}

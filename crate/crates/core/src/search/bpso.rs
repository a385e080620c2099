//! Binary PSO with a global-best topology. Velocities are real valued and
//! clamped to `±vmax`; each bit is set with probability `sigmoid(v)`.

use rand::Rng as _;

use super::{argmin, prepare, repair, RunResult, SearchConfig};
use crate::dataset::{FeatureMask, LabeledDataset};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::seed;

fn sigmoid<T: Scalar>(v: T) -> f64 {
    1.0 / (1.0 + (-v.as_f64()).exp())
}

fn bit<T: Scalar>(b: bool) -> T {
    if b {
        T::one()
    } else {
        T::zero()
    }
}

pub fn bpso_run<T: Scalar>(
    train: &LabeledDataset<T>,
    cfg: &SearchConfig<T>,
    run_seed: u64,
) -> Result<RunResult<T>> {
    let mut eval = prepare(train, cfg, run_seed)?;
    let n = train.n_features();
    let swarm = cfg.population_size;
    let vmax = cfg.bpso_vmax;

    let mut rng = seed::rng(run_seed, &[seed::INIT]);
    let mut positions: Vec<Vec<bool>> = Vec::with_capacity(swarm);
    let mut velocities: Vec<Vec<T>> = Vec::with_capacity(swarm);
    for _ in 0..swarm {
        let mut x: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        repair(&mut x, &mut rng);
        positions.push(x);
        velocities.push(
            (0..n)
                .map(|_| vmax * T::of(rng.random_range(-1.0..=1.0)))
                .collect(),
        );
    }
    let masks: Vec<FeatureMask> = positions.iter().cloned().map(FeatureMask::new).collect();
    let mut pbest_j = eval.evaluate_all(&masks)?;
    let mut pbest = positions.clone();
    let g = argmin(&pbest_j);
    let (mut gbest, mut gbest_j) = (pbest[g].clone(), pbest_j[g]);
    let mut history = vec![gbest_j];

    for generation in 1..cfg.generations() {
        let mut rng = seed::rng(run_seed, &[seed::GENERATION, generation as u64]);
        for i in 0..swarm {
            let (x, v) = (&mut positions[i], &mut velocities[i]);
            for m in 0..n {
                let u1 = T::of(rng.random());
                let u2 = T::of(rng.random());
                let xm = bit::<T>(x[m]);
                let next = cfg.bpso_omega * v[m]
                    + cfg.bpso_c1 * u1 * (bit::<T>(pbest[i][m]) - xm)
                    + cfg.bpso_c2 * u2 * (bit::<T>(gbest[m]) - xm);
                v[m] = next.max(-vmax).min(vmax);
                x[m] = rng.random_bool(sigmoid(v[m]));
            }
            repair(x, &mut rng);
        }
        let masks: Vec<FeatureMask> = positions.iter().cloned().map(FeatureMask::new).collect();
        let values = eval.evaluate_all(&masks)?;
        for i in 0..swarm {
            if values[i] < pbest_j[i] {
                pbest_j[i] = values[i];
                pbest[i] = positions[i].clone();
            }
        }
        let g = argmin(&pbest_j);
        if pbest_j[g] < gbest_j {
            gbest_j = pbest_j[g];
            gbest = pbest[g].clone();
        }
        history.push(gbest_j);
    }

    let best_mask = FeatureMask::new(gbest);
    Ok(RunResult {
        cardinality: best_mask.cardinality(),
        best_mask,
        best_j: gbest_j,
        history,
        evaluations: eval.evaluations(),
        run_seed,
    })
}

//! Query-point sampling for the gradient-flow penalty.

use rand::seq::index::sample as index_sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::PenaltyMode;

/// Spatio-temporal domain; `x` is absent for ODE systems.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub t: (f64, f64),
    pub x: Option<(f64, f64)>,
}

impl Domain {
    pub fn coord_dim(&self) -> usize {
        if self.x.is_some() {
            2
        } else {
            1
        }
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        let mut ok = self.t.0 <= y[0] && y[0] <= self.t.1;
        if let Some((x0, x1)) = self.x {
            ok = ok && y.len() == 2 && x0 <= y[1] && y[1] <= x1;
        }
        ok
    }
}

/// Draws K penalty query points.
///
/// Resampled mode: i.i.d. uniform over the domain. Fixed mode: points come
/// from the union of training grid points; if that pool has at most K points,
/// all of them are used, otherwise K are drawn without replacement.
pub fn sample_query_points(
    domain: &Domain,
    k: usize,
    mode: PenaltyMode,
    fixed_pool: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    assert!(k >= 1, "query count must be >= 1");
    match mode {
        PenaltyMode::Resampled => (0..k)
            .map(|_| {
                let t = domain.t.0 + rng.gen::<f64>() * (domain.t.1 - domain.t.0);
                match domain.x {
                    Some((x0, x1)) => vec![t, x0 + rng.gen::<f64>() * (x1 - x0)],
                    None => vec![t],
                }
            })
            .collect(),
        PenaltyMode::Fixed => {
            if fixed_pool.len() <= k {
                fixed_pool.to_vec()
            } else {
                index_sample(rng, fixed_pool.len(), k)
                    .iter()
                    .map(|i| fixed_pool[i].clone())
                    .collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::rng_for;

    fn pde_domain() -> Domain {
        Domain {
            t: (0.0, 0.5),
            x: Some((0.0, 10.0)),
        }
    }

    #[test]
    fn resampled_points_stay_inside_domain() {
        let mut rng = rng_for(1, "query");
        let d = pde_domain();
        let pts = sample_query_points(&d, 200, PenaltyMode::Resampled, &[], &mut rng);
        assert_eq!(pts.len(), 200);
        assert!(pts.iter().all(|y| d.contains(y)));
    }

    #[test]
    fn fixed_mode_uses_whole_small_grid() {
        let mut rng = rng_for(2, "query");
        let pool: Vec<Vec<f64>> = (0..100).map(|i| vec![i as f64, 0.0]).collect();
        let pts = sample_query_points(&pde_domain(), 200, PenaltyMode::Fixed, &pool, &mut rng);
        assert_eq!(pts, pool);
    }

    #[test]
    fn fixed_mode_subsamples_large_grids_without_replacement() {
        let mut rng = rng_for(3, "query");
        let pool: Vec<Vec<f64>> = (0..500).map(|i| vec![i as f64, 0.0]).collect();
        let pts = sample_query_points(&pde_domain(), 200, PenaltyMode::Fixed, &pool, &mut rng);
        assert_eq!(pts.len(), 200);
        let mut seen: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        seen.sort_by(f64::total_cmp);
        seen.dedup();
        assert_eq!(seen.len(), 200);
    }

    #[test]
    fn resampled_mean_approaches_domain_centroid() {
        // Mean of n uniform draws has sd range/sqrt(12 n); allow 3 sigma.
        let mut rng = rng_for(4, "query");
        let d = pde_domain();
        let n = 100_000;
        let pts = sample_query_points(&d, n, PenaltyMode::Resampled, &[], &mut rng);
        let mean_t: f64 = pts.iter().map(|p| p[0]).sum::<f64>() / n as f64;
        let mean_x: f64 = pts.iter().map(|p| p[1]).sum::<f64>() / n as f64;
        let sd_t = 0.5 / (12.0 * n as f64).sqrt();
        let sd_x = 10.0 / (12.0 * n as f64).sqrt();
        assert!((mean_t - 0.25).abs() <= 3.0 * sd_t, "mean_t {mean_t}");
        assert!((mean_x - 5.0).abs() <= 3.0 * sd_x, "mean_x {mean_x}");
    }
}

//! The multi-start fit finds the global maximum over the closed triangle.

use maur::estimation::fit_ma2;
use maur::likelihood::exact_profile_loglik_coeffs;
use maur::model::MaModel;
use maur::optim::nelder_mead;
use maur::region::classify_region;
use maur::roots::RootSet;
use maur::simulate::simulate_ma;

#[test]
fn fit_matches_exhaustive_grid() {
    let truths = [[1.0, 0.3], [1.0, -0.3], [0.9, 0.5], [0.5, -0.5], [1.0, 1.0], [0.95, -0.95]];
    let steps = 400;
    for s in 0..50u64 {
        let t = truths[s as usize % truths.len()];
        let x = simulate_ma(&MaModel::from_roots(&RootSet::real(&t), 1.0).unwrap(), 50, s).unwrap();
        let ll = |c1: f64, c2: f64| exact_profile_loglik_coeffs(&x, &[c1, c2]).map_or(f64::NEG_INFINITY, |v| v.profile_loglik);
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for i in 0..=steps {
            let c2 = -1.0 + 2.0 * i as f64 / steps as f64;
            for j in 0..=steps {
                let c1 = -2.0 + 4.0 * j as f64 / steps as f64;
                if classify_region(c1, c2).is_ok() {
                    let v = ll(c1, c2);
                    if v > best.0 {
                        best = (v, c1, c2);
                    }
                }
            }
        }
        // polish the grid winner inside the region
        let penalized = |p: &[f64]| if classify_region(p[0], p[1]).is_ok() { -ll(p[0], p[1]) } else { f64::INFINITY };
        let polished = -nelder_mead(penalized, &[best.1, best.2], 0.005, 1e-10, 1e-12, 4000).fx;
        let fit = fit_ma2(&x).unwrap();
        assert!(fit.loglik >= best.0 - 1e-9, "seed {s}: fit {} below grid {}", fit.loglik, best.0);
        assert!(fit.loglik >= polished - 1e-4, "seed {s}: fit {} below polished {}", fit.loglik, polished);
    }
}

//! Derivative-free maximizers: golden-section on an interval and Nelder–Mead.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes a unimodal `f` on `[a, b]` to bracket width `tol`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Result of a one-dimensional search split into endpoint and interior parts.
#[derive(Debug, Clone, Copy)]
pub struct LineSearch {
    pub lo: (f64, f64),
    pub hi: (f64, f64),
    /// Best strictly interior point found.
    pub interior: Option<(f64, f64)>,
}

impl LineSearch {
    pub fn best(&self) -> (f64, f64) {
        let mut best = self.lo;
        for cand in [Some(self.hi), self.interior].into_iter().flatten() {
            if cand.1 > best.1 {
                best = cand;
            }
        }
        best
    }
}

/// Grid of `npts` points on `[lo, hi]`, then golden refinement around up to
/// `nrefine` of the best interior local maxima.
pub fn grid_golden_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, npts: usize, nrefine: usize, tol: f64) -> LineSearch {
    let xs: Vec<f64> = (0..npts)
        .map(|i| lo + (hi - lo) * i as f64 / (npts - 1) as f64)
        .collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut peaks: Vec<usize> = (0..npts)
        .filter(|&i| {
            let left = i == 0 || fs[i] >= fs[i - 1];
            let right = i + 1 == npts || fs[i] >= fs[i + 1];
            left && right
        })
        .collect();
    peaks.sort_by(|&i, &j| fs[j].total_cmp(&fs[i]));
    let mut interior: Option<(f64, f64)> = None;
    let mut consider = |cand: (f64, f64)| {
        if cand.0 > lo && cand.0 < hi && cand.1.is_finite() && interior.is_none_or(|b| cand.1 > b.1) {
            interior = Some(cand);
        }
    };
    for i in 1..npts - 1 {
        consider((xs[i], fs[i]));
    }
    for &i in peaks.iter().take(nrefine) {
        let a = xs[i.saturating_sub(1)];
        let b = xs[(i + 1).min(npts - 1)];
        consider(golden_max(&mut f, a, b, tol));
    }
    LineSearch {
        lo: (lo, fs[0]),
        hi: (hi, fs[npts - 1]),
        interior,
    }
}

#[derive(Debug, Clone)]
pub struct NelderMead {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Minimizes `f` from `x0` with an axis-aligned initial simplex of size `step`.
/// Stops when the simplex value spread falls below `ftol` or its diameter below
/// `xtol`, or after `max_evals` evaluations.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    xtol: f64,
    ftol: f64,
    max_evals: usize,
) -> NelderMead {
    let d = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..d {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() { f64::INFINITY } else { v }
    };
    let mut fv: Vec<f64> = simplex.iter().map(|x| eval(x, &mut evals)).collect();
    let mut converged = false;
    while evals < max_evals {
        let mut idx: Vec<usize> = (0..=d).collect();
        idx.sort_by(|&i, &j| fv[i].total_cmp(&fv[j]));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        fv = idx.iter().map(|&i| fv[i]).collect();
        let spread = fv[d] - fv[0];
        let diam = simplex[1..]
            .iter()
            .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= ftol || diam <= xtol {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..d)
            .map(|k| simplex[..d].iter().map(|v| v[k]).sum::<f64>() / d as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[d]).map(|(c, w)| c + t * (w - c)).collect()
        };
        let xr = along(-1.0);
        let fr = eval(&xr, &mut evals);
        if fr < fv[0] {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                simplex[d] = xe;
                fv[d] = fe;
            } else {
                simplex[d] = xr;
                fv[d] = fr;
            }
        } else if fr < fv[d - 1] {
            simplex[d] = xr;
            fv[d] = fr;
        } else {
            let (xc, fc) = if fr < fv[d] {
                let xc = along(-0.5);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = along(0.5);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < fv[d].min(fr) {
                simplex[d] = xc;
                fv[d] = fc;
            } else {
                for i in 1..=d {
                    let shrunk: Vec<f64> = simplex[i]
                        .iter()
                        .zip(&simplex[0])
                        .map(|(v, b)| b + 0.5 * (v - b))
                        .collect();
                    fv[i] = eval(&shrunk, &mut evals);
                    simplex[i] = shrunk;
                }
            }
        }
    }
    let best = (0..=d).min_by(|&i, &j| fv[i].total_cmp(&fv[j])).unwrap();
    NelderMead {
        x: simplex[best].clone(),
        fx: fv[best],
        evals,
        converged,
    }
}

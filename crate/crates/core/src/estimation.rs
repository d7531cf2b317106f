//! Maximum likelihood over the closed invertibility region, with explicit
//! boundary searches so that exact boundary maxima (pile-up) are detected.
//!
//! For MA(1) the region is `theta in [-1, 1]`; `theta = 1` is reported as edge
//! AB (`-c1 = 1`) and `theta = -1` as edge BC (`c1 = 1`), the `c2 = 0` sections
//! of the MA(2) edges.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::likelihood::exact_profile_loglik_coeffs;
use crate::optim::{golden_max, grid_golden_max, nelder_mead, LineSearch};
use crate::region::{classify_region, RegionLabel, RootKind, Segment};
use crate::roots::{roots_from_coeffs, RootSet};
use crate::sample::Sample;

/// Slack when comparing boundary and interior optima.
pub const PILEUP_SLACK: f64 = 1e-9;

const MA1_GRID: usize = 64;
const EDGE_GRID: usize = 33;
const REFINE_PEAKS: usize = 3;
const XTOL: f64 = 1e-8;
const FTOL: f64 = 1e-10;
const NM_BUDGET: usize = 2000;
const NM_STEP: f64 = 0.5;
/// Half-width of the edge polish window, in units of `1/n`.
const POLISH_WINDOW: f64 = 0.5;
const NM_STARTS: [f64; 3] = [-1.5, 0.0, 1.5];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub coeffs_hat: Vec<f64>,
    pub roots_hat: RootSet,
    pub loglik: f64,
    pub region: RegionLabel,
    /// Real, repeated or complex roots (MA(2) only).
    pub root_kind: Option<RootKind>,
    pub pileup: BTreeMap<Segment, bool>,
    pub n_starts: usize,
    pub converged: bool,
}

impl EstimateReport {
    fn new(coeffs: Vec<f64>, roots: RootSet, loglik: f64, n_starts: usize, converged: bool) -> Result<Self> {
        let (region, root_kind) = if coeffs.len() == 1 {
            (ma1_label(-coeffs[0]), None)
        } else {
            let r = classify_region(coeffs[0], coeffs[1])?;
            (r.label, Some(r.roots))
        };
        let pileup = Segment::ALL.iter().map(|&s| (s, region.is_on(s))).collect();
        Ok(Self {
            coeffs_hat: coeffs,
            roots_hat: roots,
            loglik,
            region,
            root_kind,
            pileup,
            n_starts,
            converged,
        })
    }

    pub fn is_pileup(&self, seg: Segment) -> bool {
        self.pileup.get(&seg).copied().unwrap_or(false)
    }

    /// The root with the largest real part (the candidate unit root).
    pub fn theta_hat(&self) -> f64 {
        self.sorted_real_parts()[0]
    }

    /// The remaining root of an MA(2) fit (real part if complex).
    pub fn alpha_hat(&self) -> Option<f64> {
        self.sorted_real_parts().get(1).copied()
    }

    fn sorted_real_parts(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.roots_hat.roots().iter().map(|r| r.re).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}

fn ma1_label(theta: f64) -> RegionLabel {
    if (theta - 1.0).abs() <= crate::region::BOUNDARY_TOL {
        RegionLabel::BoundaryAb
    } else if (theta + 1.0).abs() <= crate::region::BOUNDARY_TOL {
        RegionLabel::BoundaryBc
    } else {
        RegionLabel::Interior
    }
}

fn objective(sample: &Sample) -> impl Fn(&[f64]) -> f64 + '_ {
    move |c: &[f64]| {
        exact_profile_loglik_coeffs(sample, c)
            .map(|v| v.profile_loglik)
            .unwrap_or(f64::NEG_INFINITY)
    }
}

fn check_n(sample: &Sample, min: usize) -> Result<()> {
    if sample.n() < min {
        return Err(Error::TooSmall { n: sample.n(), min });
    }
    Ok(())
}

/// MA(1) fit over `theta in [-1, 1]`.
pub fn fit_ma1(sample: &Sample) -> Result<EstimateReport> {
    check_n(sample, 3)?;
    let f = objective(sample);
    let s = grid_golden_max(|t| f(&[-t]), -1.0, 1.0, MA1_GRID, REFINE_PEAKS, XTOL);
    let interior = s.interior.map_or(f64::NEG_INFINITY, |p| p.1);
    let boundary = if s.hi.1 >= s.lo.1 { s.hi } else { s.lo };
    let (theta, value) = if boundary.1 >= interior - PILEUP_SLACK {
        boundary
    } else {
        s.interior.unwrap()
    };
    if !value.is_finite() {
        return Err(Error::DegenerateDesign);
    }
    EstimateReport::new(vec![-theta], RootSet::real(&[theta]), value, 1, true)
}

/// Search along edge AB (`-c1 - c2 = 1`), parameterized by the free root alpha.
fn edge_ab(sample: &Sample) -> LineSearch {
    let f = objective(sample);
    grid_golden_max(|a| f(&[-(1.0 + a), a]), -1.0, 1.0, EDGE_GRID, REFINE_PEAKS, XTOL)
}

fn edge_bc(sample: &Sample) -> LineSearch {
    let f = objective(sample);
    grid_golden_max(|a| f(&[1.0 - a, -a]), -1.0, 1.0, EDGE_GRID, REFINE_PEAKS, XTOL)
}

/// Edge AC (`c2 = 1`) by the angle of the unit-circle root pair,
/// `c1 = -2 cos(phi)`; near the vertices the profile oscillates in `phi` on a
/// `1/n` scale, which a grid in `c1` cannot resolve.
fn edge_ac(sample: &Sample) -> LineSearch {
    let f = objective(sample);
    grid_golden_max(|phi| f(&edge_point(Segment::Ac, phi).0), 0.0, PI, EDGE_GRID, REFINE_PEAKS, XTOL)
}

fn edge_point(seg: Segment, t: f64) -> (Vec<f64>, RootSet) {
    match seg {
        Segment::Ab => (vec![-(1.0 + t), t], RootSet::real(&[1.0, t])),
        Segment::Bc => (vec![1.0 - t, -t], RootSet::real(&[-1.0, t])),
        Segment::Ac => {
            let c = vec![-2.0 * t.cos(), 1.0];
            let roots = roots_from_coeffs(&c);
            (c, roots)
        }
    }
}

/// Edge parameter of the point on `seg` nearest to `c`, and the parameter range.
fn edge_projection(seg: Segment, c: &[f64]) -> (f64, f64, f64) {
    match seg {
        Segment::Ab => (((c[1] - c[0] - 1.0) / 2.0).clamp(-1.0, 1.0), -1.0, 1.0),
        Segment::Bc => (((1.0 - c[0] - c[1]) / 2.0).clamp(-1.0, 1.0), -1.0, 1.0),
        Segment::Ac => ((-c[0] / 2.0).clamp(-1.0, 1.0).acos(), 0.0, PI),
    }
}

/// Golden search on `seg` in a small window around the projection of `c`.
fn polish_edge(sample: &Sample, seg: Segment, c: &[f64]) -> (f64, f64) {
    let f = objective(sample);
    let (t0, lo, hi) = edge_projection(seg, c);
    let h = POLISH_WINDOW / sample.n() as f64;
    let (a, b) = ((t0 - h).max(lo), (t0 + h).min(hi));
    let g = |t: f64| f(&edge_point(seg, t).0);
    let mut best = (t0, g(t0));
    for cand in [golden_max(g, a, b, XTOL), (a, g(a)), (b, g(b))] {
        if cand.1 > best.1 {
            best = cand;
        }
    }
    best
}

const A: [f64; 2] = [-2.0, 1.0];
const B: [f64; 2] = [0.0, -1.0];
const C: [f64; 2] = [2.0, 1.0];

/// Smooth bijection from the plane onto the open triangle.
fn barycentric(u: &[f64]) -> [f64; 2] {
    let m = u[0].max(u[1]).max(0.0);
    let (wa, wb, wc) = ((-m).exp(), (u[0] - m).exp(), (u[1] - m).exp());
    let s = wa + wb + wc;
    let (wa, wb, wc) = (wa / s, wb / s, wc / s);
    [
        wa * A[0] + wb * B[0] + wc * C[0],
        wa * A[1] + wb * B[1] + wc * C[1],
    ]
}

/// MA(2) fit over the closed triangle: nine interior Nelder–Mead starts, a
/// line search along each edge (endpoints are the vertices), and the boundary
/// optimum preferred when within [`PILEUP_SLACK`] of the interior optimum.
pub fn fit_ma2(sample: &Sample) -> Result<EstimateReport> {
    check_n(sample, 5)?;
    let f = objective(sample);
    let mut interior: Option<(Vec<f64>, f64, bool)> = None;
    let mut n_starts = 0;
    for &u in &NM_STARTS {
        for &v in &NM_STARTS {
            n_starts += 1;
            let r = nelder_mead(|p| -f(&barycentric(p)), &[u, v], NM_STEP, XTOL, FTOL, NM_BUDGET);
            let value = -r.fx;
            if interior.as_ref().is_none_or(|b| value > b.1) {
                interior = Some((barycentric(&r.x).to_vec(), value, r.converged));
            }
        }
    }
    let edges = [
        (Segment::Ab, edge_ab(sample)),
        (Segment::Bc, edge_bc(sample)),
        (Segment::Ac, edge_ac(sample)),
    ];
    n_starts += 3;
    let mut boundary: Option<(Segment, f64, f64)> = None;
    for (seg, s) in &edges {
        let mut cands = vec![s.best()];
        if let Some((c, _, _)) = &interior {
            cands.push(polish_edge(sample, *seg, c));
        }
        for (t, value) in cands {
            if boundary.is_none_or(|b| value > b.2) {
                boundary = Some((*seg, t, value));
            }
        }
    }
    let (seg, t, bvalue) = boundary.unwrap();
    let (ivalue, iconverged) = interior.as_ref().map_or((f64::NEG_INFINITY, true), |b| (b.1, b.2));
    if bvalue >= ivalue - PILEUP_SLACK {
        if !bvalue.is_finite() {
            return Err(Error::DegenerateDesign);
        }
        let (c, roots) = edge_point(seg, t);
        EstimateReport::new(c, roots, bvalue, n_starts, true)
    } else {
        let (c, value, _) = interior.unwrap();
        let roots = roots_from_coeffs(&c);
        EstimateReport::new(c, roots, value, n_starts, iconverged)
    }
}

/// MA(2) fit with one root pinned at 1: maximizes along edge AB over the free
/// root `alpha in [-1, 1]`. Shares the edge search with [`fit_ma2`], so its
/// log-likelihood never exceeds the unconstrained one.
pub fn fit_ma2_unit_constrained(sample: &Sample) -> Result<EstimateReport> {
    check_n(sample, 5)?;
    let (alpha, value) = edge_ab(sample).best();
    if !value.is_finite() {
        return Err(Error::DegenerateDesign);
    }
    let (c, roots) = edge_point(Segment::Ab, alpha);
    EstimateReport::new(c, roots, value, 1, true)
}

/// `(beta_hat, gamma_hat) = (n (theta_hat - theta0), sqrt(n) (alpha_hat - alpha0))`;
/// `gamma_hat` is zero for MA(1).
pub fn local_params(report: &EstimateReport, n: usize, truth: &RootSet) -> Result<(f64, f64)> {
    let mut t = truth
        .as_real()
        .ok_or_else(|| Error::MissingTruth("local coordinates need real true roots".into()))?;
    if t.len() != report.roots_hat.order() {
        return Err(Error::Dimension("truth and estimate differ in order".into()));
    }
    t.sort_by(|a, b| b.total_cmp(a));
    let nn = n as f64;
    let beta = nn * (report.theta_hat() - t[0]);
    let gamma = match report.alpha_hat() {
        Some(a) => nn.sqrt() * (a - t[1]),
        None => 0.0,
    };
    Ok((beta, gamma))
}

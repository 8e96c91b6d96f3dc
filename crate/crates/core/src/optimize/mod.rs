//! Deterministic derivative-free maximization over a few bounded parameters.
//!
//! Both optimizers start from a full coarse grid, so infeasible regions are
//! simply reported as `-inf` by the objective. Ties resolve to the
//! lexicographically smallest argument.

use std::cmp::Ordering;

use crate::error::{domain, Error, Result};
use crate::par;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpec {
    pub bounds: Vec<(f64, f64)>,
    pub grid_points: usize,
    pub refine_tol: f64,
    pub objective_tol: f64,
    /// Extra starting points refined alongside the best grid cells.
    pub seeds: Vec<Vec<f64>>,
}

impl SearchSpec {
    pub fn new(bounds: Vec<(f64, f64)>) -> Self {
        let grid_points = if bounds.len() <= 1 { 25 } else { 9 };
        Self {
            bounds,
            grid_points,
            refine_tol: 1e-7,
            objective_tol: 1e-10,
            seeds: Vec::new(),
        }
    }

    pub fn with_grid_points(mut self, n: usize) -> Self {
        self.grid_points = n;
        self
    }

    pub fn with_refine_tol(mut self, tol: f64) -> Self {
        self.refine_tol = tol;
        self
    }

    pub fn with_seed(mut self, seed: Vec<f64>) -> Self {
        self.seeds.push(seed);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.bounds.is_empty() || self.bounds.len() > 5 {
            return Err(domain("search needs between 1 and 5 parameters"));
        }
        for &(lo, hi) in &self.bounds {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(domain(format!("invalid bounds [{lo}, {hi}]")));
            }
        }
        if self.grid_points < 2 || !(self.refine_tol > 0.0) || !(self.objective_tol > 0.0) {
            return Err(domain("grid needs >= 2 points and positive tolerances"));
        }
        for s in &self.seeds {
            if s.len() != self.bounds.len() {
                return Err(Error::DimensionMismatch {
                    expected: self.bounds.len(),
                    got: s.len(),
                });
            }
        }
        Ok(())
    }

    fn clamp(&self, x: &mut [f64]) {
        for (v, &(lo, hi)) in x.iter_mut().zip(&self.bounds) {
            *v = v.clamp(lo, hi);
        }
    }

    fn grid_coord(&self, dim: usize, i: usize) -> f64 {
        let (lo, hi) = self.bounds[dim];
        if i + 1 == self.grid_points {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (self.grid_points - 1) as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub argmax: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// `a` beats `b`: larger value, then smaller argument.
fn better(a: (&[f64], f64), b: (&[f64], f64)) -> bool {
    match a.1.partial_cmp(&b.1) {
        Some(Ordering::Greater) => true,
        Some(Ordering::Less) => false,
        _ => lex_less(a.0, b.0),
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;
const LOCAL_STARTS: usize = 3;

/// Grid scan followed by golden-section refinement of the most promising brackets.
pub fn maximize_1d<F>(f: F, spec: &SearchSpec) -> Result<Optimum>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    spec.validate()?;
    if spec.bounds.len() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: spec.bounds.len(),
        });
    }
    let g = spec.grid_points;
    let xs: Vec<f64> = (0..g).map(|i| spec.grid_coord(0, i)).collect();
    let vals: Vec<f64> = par::map(&xs, |&x| sanitize(f(x)));
    if vals.iter().all(|v| *v == f64::NEG_INFINITY) {
        return Err(Error::AllInfeasible);
    }
    // local maxima of the grid, best first
    let mut peaks: Vec<usize> = (0..g)
        .filter(|&i| {
            vals[i] > f64::NEG_INFINITY
                && (i == 0 || vals[i] >= vals[i - 1])
                && (i + 1 == g || vals[i] >= vals[i + 1])
        })
        .collect();
    peaks.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    peaks.truncate(LOCAL_STARTS);

    let refined: Vec<(f64, f64, usize)> = par::map(&peaks, |&i| {
        let lo = xs[i.saturating_sub(1)];
        let hi = xs[(i + 1).min(g - 1)];
        golden(&f, lo, hi, spec.refine_tol)
    });

    let best_grid = peaks[0];
    let mut best = (xs[best_grid], vals[best_grid]);
    let mut iterations = g;
    for &(x, v, it) in &refined {
        iterations += it;
        if better((&[x], v), (&[best.0], best.1)) {
            best = (x, v);
        }
    }
    let mut out = Optimum {
        argmax: vec![best.0],
        value: best.1,
        iterations,
        converged: true,
    };
    ridge_probe(&|x: &[f64]| sanitize(f(x[0])), spec, &mut out);
    Ok(out)
}

fn golden<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64, usize) {
    let mut it = 0;
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = sanitize(f(c));
    let mut fd = sanitize(f(d));
    let (fa, fb) = (sanitize(f(a)), sanitize(f(b)));
    let mut best = if fb > fa { (b, fb) } else { (a, fa) };
    while (b - a) > tol && it < 200 {
        it += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = sanitize(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = sanitize(f(d));
        }
        for (x, v) in [(c, fc), (d, fd)] {
            if better((&[x], v), (&[best.0], best.1)) {
                best = (x, v);
            }
        }
    }
    (best.0, best.1, it + 4)
}

const NM_STARTS: usize = 5;
const NM_MAX_ITER: usize = 4000;

/// Grid multistart followed by bounded Nelder-Mead from the best cells.
pub fn maximize_nd<F>(f: F, spec: &SearchSpec) -> Result<Optimum>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    spec.validate()?;
    let d = spec.bounds.len();
    let g = spec.grid_points;
    let total = g.checked_pow(d as u32).ok_or_else(|| domain("grid too large"))?;
    let points: Vec<Vec<f64>> = (0..total)
        .map(|mut idx| {
            let mut x = vec![0.0; d];
            for k in (0..d).rev() {
                x[k] = spec.grid_coord(k, idx % g);
                idx /= g;
            }
            x
        })
        .collect();
    let vals: Vec<f64> = par::map(&points, |x| sanitize(f(x)));
    if vals.iter().all(|v| *v == f64::NEG_INFINITY) {
        return Err(Error::AllInfeasible);
    }
    let mut order: Vec<usize> = (0..total).filter(|&i| vals[i] > f64::NEG_INFINITY).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    let mut starts: Vec<Vec<f64>> = order.iter().take(NM_STARTS).map(|&i| points[i].clone()).collect();
    for s in &spec.seeds {
        let mut s = s.clone();
        spec.clamp(&mut s);
        starts.push(s);
    }
    let steps: Vec<f64> = spec
        .bounds
        .iter()
        .map(|&(lo, hi)| (hi - lo) / (g - 1) as f64)
        .collect();
    let runs: Vec<(Vec<f64>, f64, usize, bool)> = par::map(&starts, |x0| nelder_mead(&f, spec, x0, &steps));

    let top = order[0];
    let mut best = (points[top].clone(), vals[top]);
    let mut converged = false;
    let mut iterations = total;
    for (x, v, it, conv) in runs {
        iterations += it;
        if better((&x, v), (&best.0, best.1)) {
            best = (x, v);
            converged = conv;
        } else if v == best.1 && x == best.0 {
            converged |= conv;
        }
    }
    let mut out = Optimum {
        argmax: best.0,
        value: best.1,
        iterations,
        converged,
    };
    ridge_probe(&|x: &[f64]| sanitize(f(x)), spec, &mut out);
    Ok(out)
}

fn nelder_mead<F>(f: &F, spec: &SearchSpec, x0: &[f64], steps: &[f64]) -> (Vec<f64>, f64, usize, bool)
where
    F: Fn(&[f64]) -> f64,
{
    let d = x0.len();
    // minimize g = -f
    let eval = |x: &[f64]| -sanitize(f(x));
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for k in 0..d {
        let mut x = x0.to_vec();
        let (lo, hi) = spec.bounds[k];
        x[k] = if x0[k] + steps[k] <= hi { x0[k] + steps[k] } else { x0[k] - steps[k] };
        x[k] = x[k].clamp(lo, hi);
        let v = eval(&x);
        simplex.push((x, v));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| {
        s.sort_by(|a, b| {
            a.1.total_cmp(&b.1).then_with(|| {
                if lex_less(&a.0, &b.0) {
                    Ordering::Less
                } else if lex_less(&b.0, &a.0) {
                    Ordering::Greater
                } else {
                    Ordering::Equal
                }
            })
        })
    };
    let mut it = 0;
    let mut converged = false;
    while it < NM_MAX_ITER {
        order(&mut simplex);
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if diameter <= spec.refine_tol {
            converged = true;
            break;
        }
        it += 1;
        let worst = simplex[d].clone();
        let mut centroid = vec![0.0; d];
        for (x, _) in &simplex[..d] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / d as f64;
            }
        }
        let along = |t: f64| {
            let mut x: Vec<f64> = centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect();
            spec.clamp(&mut x);
            let v = eval(&x);
            (x, v)
        };
        let reflected = along(1.0);
        if reflected.1 < simplex[0].1 {
            let expanded = along(2.0);
            simplex[d] = if expanded.1 < reflected.1 { expanded } else { reflected };
            continue;
        }
        if reflected.1 < simplex[d - 1].1 {
            simplex[d] = reflected;
            continue;
        }
        let contracted = if reflected.1 < worst.1 { along(0.5) } else { along(-0.5) };
        if contracted.1 < reflected.1.min(worst.1) {
            simplex[d] = contracted;
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = best.iter().zip(&vertex.0).map(|(b, v)| b + 0.5 * (v - b)).collect();
            let v = eval(&x);
            *vertex = (x, v);
        }
    }
    order(&mut simplex);
    let (x, v) = simplex.swap_remove(0);
    (x, -v, it, converged)
}

/// Flags optima sitting on a ridge: if moving 1% of the box width along some
/// axis leaves the value within `objective_tol`, the argmax is not isolated.
fn ridge_probe<F: Fn(&[f64]) -> f64>(f: &F, spec: &SearchSpec, out: &mut Optimum) {
    for (k, &(lo, hi)) in spec.bounds.iter().enumerate() {
        let h = 0.01 * (hi - lo);
        if h == 0.0 {
            continue;
        }
        for dir in [-1.0, 1.0] {
            let mut x = out.argmax.clone();
            let target = (x[k] + dir * h).clamp(lo, hi);
            if (target - x[k]).abs() < 0.5 * h {
                continue;
            }
            x[k] = target;
            let v = f(&x);
            out.iterations += 1;
            if v >= out.value - spec.objective_tol {
                out.converged = false;
                if v > out.value {
                    out.value = v;
                    out.argmax = x;
                }
            }
        }
    }
}

//! Small deterministic optimizers: golden-section search, bracketed grid
//! minimization, and (projected) gradient descent with backtracking.

/// Result of a scalar minimization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarMin {
    pub x: f64,
    pub value: f64,
    /// The coarse grid minimum sat on an endpoint of the bracket.
    pub at_boundary: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search on `[lo, hi]`, stopping once the bracket is
/// narrower than `tol`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> ScalarMin {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc <= fd {
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
    // the endpoints can beat the interior probes for monotone objectives
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for x in [a, b] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    ScalarMin { x: best.0, value: best.1, at_boundary: false }
}

/// Evaluate `f` on a uniform grid of `points` nodes over `[lo, hi]`, then
/// refine around the best node with golden-section search.
pub fn grid_then_golden<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize, tol: f64) -> ScalarMin {
    if hi <= lo || points < 2 {
        let v = f(lo);
        return ScalarMin { x: lo, value: v, at_boundary: true };
    }
    let step = (hi - lo) / (points - 1) as f64;
    let mut best_i = 0;
    let mut best_v = f64::INFINITY;
    for i in 0..points {
        let v = f(lo + step * i as f64);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let left = lo + step * best_i.saturating_sub(1) as f64;
    let right = (lo + step * (best_i + 1) as f64).min(hi);
    let refined = golden_section(&f, left, right, tol);
    let at_boundary = best_i == 0 || best_i == points - 1;
    if refined.value <= best_v {
        ScalarMin { at_boundary, ..refined }
    } else {
        ScalarMin { x: lo + step * best_i as f64, value: best_v, at_boundary }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GdOptions {
    pub max_iter: usize,
    /// Stop once the (projected) gradient-mapping norm drops below this.
    pub grad_tol: f64,
    pub initial_step: f64,
    pub shrink: f64,
}

impl Default for GdOptions {
    fn default() -> Self {
        GdOptions { max_iter: 50_000, grad_tol: 1e-9, initial_step: 1.0, shrink: 0.5 }
    }
}

#[derive(Clone, Debug)]
pub struct GdResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective value after every accepted step, starting with `x0`.
    pub history: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Consecutive non-decreasing steps after which descent stops.
pub const STALL_STEPS: usize = 200;

/// Unconstrained gradient descent with Barzilai-Borwein trial steps and
/// backtracking on the sufficient-decrease condition.
pub fn gradient_descent<F>(f: F, x0: &[f64], opts: GdOptions) -> GdResult
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    projected_gradient_descent(f, x0, opts, |_| {})
}

/// Projected gradient descent. `project` maps a point onto the feasible set
/// in place; the stopping rule uses the gradient mapping `x - P(x - g)`.
pub fn projected_gradient_descent<F, P>(f: F, x0: &[f64], opts: GdOptions, project: P) -> GdResult
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
    P: Fn(&mut [f64]),
{
    let n = x0.len();
    let mut x = x0.to_vec();
    project(&mut x);
    let (mut fx, mut g) = f(&x);
    let mut history = vec![fx];
    let mut step = opts.initial_step;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;

    let mapping_norm = |x: &[f64], g: &[f64]| {
        let mut y: Vec<f64> = x.iter().zip(g).map(|(a, b)| a - b).collect();
        project(&mut y);
        let d: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        norm(&d)
    };

    let mut gn = mapping_norm(&x, &g);
    let mut it = 0;
    // accepted steps in a row that left the value unchanged: the objective
    // is flat to working precision, further steps only drift
    let mut flat = 0;
    while it < opts.max_iter && gn > opts.grad_tol && flat < STALL_STEPS {
        if let Some((xp, gp)) = &prev {
            let s: Vec<f64> = x.iter().zip(xp).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = g.iter().zip(gp).map(|(a, b)| a - b).collect();
            let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
            let ss: f64 = s.iter().map(|a| a * a).sum();
            step = if sy > 0.0 { ss / sy } else { step * 2.0 };
            if !step.is_finite() || step <= 0.0 {
                step = opts.initial_step;
            }
        }
        let mut accepted = false;
        let mut trial = vec![0.0; n];
        let mut ft = fx;
        let mut gt = g.clone();
        for _ in 0..200 {
            for i in 0..n {
                trial[i] = x[i] - step * g[i];
            }
            project(&mut trial);
            let (v, gv) = f(&trial);
            let d2: f64 = trial.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum();
            let lin: f64 = g.iter().zip(trial.iter().zip(&x)).map(|(gi, (t, xi))| gi * (t - xi)).sum();
            if v.is_finite() && v <= fx + lin + d2 / (2.0 * step) && v <= fx {
                ft = v;
                gt = gv;
                accepted = true;
                break;
            }
            step *= opts.shrink;
        }
        if !accepted {
            break;
        }
        prev = Some((std::mem::replace(&mut x, trial), std::mem::replace(&mut g, gt)));
        flat = if ft < fx { 0 } else { flat + 1 };
        fx = ft;
        history.push(fx);
        gn = mapping_norm(&x, &g);
        it += 1;
    }
    GdResult { converged: gn <= opts.grad_tol, x, value: fx, grad_norm: gn, iterations: it, history }
}

/// Project onto the Euclidean ball of the given radius.
pub fn project_ball(x: &mut [f64], radius: f64) {
    let r = norm(x);
    if r > radius {
        let k = if r > 0.0 { radius / r } else { 0.0 };
        x.iter_mut().for_each(|a| *a *= k);
    }
}

/// Central finite-difference gradient.
pub fn finite_difference_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], step: f64) -> Vec<f64> {
    let mut work = x.to_vec();
    (0..x.len())
        .map(|i| {
            work[i] = x[i] + step;
            let up = f(&work);
            work[i] = x[i] - step;
            let down = f(&work);
            work[i] = x[i];
            (up - down) / (2.0 * step)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_vertex() {
        let m = golden_section(|x| (x - 1.25).powi(2) + 3.0, -4.0, 7.0, 1e-10);
        assert!((m.x - 1.25).abs() < 1e-6);
        assert!((m.value - 3.0).abs() < 1e-14);
    }

    #[test]
    fn grid_flags_boundary_minimum() {
        let m = grid_then_golden(|x| (-x).exp(), -5.0, 5.0, 1000, 1e-10);
        assert!(m.at_boundary);
        assert!((m.x - 5.0).abs() < 1e-9);
        let interior = grid_then_golden(|x| x.cosh(), -5.0, 5.0, 1000, 1e-10);
        assert!(!interior.at_boundary);
    }

    #[test]
    fn gd_minimizes_quadratic() {
        let f = |x: &[f64]| {
            let v = 3.0 * (x[0] - 1.0).powi(2) + 0.5 * (x[1] + 2.0).powi(2) + x[0] * x[1];
            let g = vec![6.0 * (x[0] - 1.0) + x[1], (x[1] + 2.0) + x[0]];
            (v, g)
        };
        let r = gradient_descent(f, &[0.0, 0.0], GdOptions::default());
        assert!(r.converged);
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn projected_gd_stays_in_ball() {
        let f = |x: &[f64]| ((x[0] - 3.0).powi(2) + x[1].powi(2), vec![2.0 * (x[0] - 3.0), 2.0 * x[1]]);
        let r = projected_gradient_descent(f, &[0.0, 0.5], GdOptions::default(), |x| project_ball(x, 1.0));
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-8 && r.x[1].abs() < 1e-8);
    }
}

//! Smooth inequality-constrained minimization in a handful of variables:
//! augmented Lagrangian outer loop, BFGS inner loop.

/// Value and gradient of a scalar function on `R^D`. Must return a
/// non-finite value outside its domain.
pub trait Smooth<const D: usize> {
    fn eval(&self, x: &[f64; D]) -> (f64, [f64; D]);
}

impl<const D: usize, F: Fn(&[f64; D]) -> (f64, [f64; D])> Smooth<D> for F {
    fn eval(&self, x: &[f64; D]) -> (f64, [f64; D]) {
        self(x)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub max_outer: usize,
    pub max_inner: usize,
    /// Inner stopping threshold on the gradient infinity norm.
    pub gradient_tol: f64,
    /// Outer stopping threshold on `max(0, -g)`.
    pub feasibility_tol: f64,
    /// Outer stopping threshold on the Lagrangian gradient, relative to
    /// `1 + |grad f|`.
    pub stationarity_tol: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            max_outer: 60,
            max_inner: 2000,
            gradient_tol: 1e-11,
            feasibility_tol: 1e-10,
            stationarity_tol: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Solution<const D: usize> {
    pub x: [f64; D],
    pub value: f64,
    pub constraint: f64,
    pub multiplier: f64,
    pub converged: bool,
}

fn dot<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm<const D: usize>(a: &[f64; D]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// BFGS with Armijo backtracking. Returns the final point and whether the
/// gradient criterion was met.
pub fn bfgs<const D: usize>(f: &impl Smooth<D>, x0: [f64; D], opts: &Options) -> ([f64; D], bool) {
    let mut x = x0;
    let (mut fx, mut g) = f.eval(&x);
    if !fx.is_finite() {
        return (x, false);
    }
    let mut h = [[0.0; D]; D];
    for (i, row) in h.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..opts.max_inner {
        if inf_norm(&g) <= opts.gradient_tol {
            return (x, true);
        }
        let mut p = [0.0; D];
        for i in 0..D {
            p[i] = -dot(&h[i], &g);
        }
        let mut slope = dot(&p, &g);
        if slope >= 0.0 {
            // lost descent: restart from steepest descent
            for (i, row) in h.iter_mut().enumerate() {
                *row = [0.0; D];
                row[i] = 1.0;
            }
            p = g.map(|v| -v);
            slope = dot(&p, &g);
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..80 {
            let mut xn = x;
            for i in 0..D {
                xn[i] += step * p[i];
            }
            let (fn_, gn) = f.eval(&xn);
            if fn_.is_finite() && fn_ <= fx + 1e-4 * step * slope {
                accepted = Some((xn, fn_, gn));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else {
            // no decrease possible at working precision
            return (x, inf_norm(&g) <= opts.gradient_tol.sqrt());
        };
        let s: [f64; D] = std::array::from_fn(|i| xn[i] - x[i]);
        let y: [f64; D] = std::array::from_fn(|i| gn[i] - g[i]);
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            let rho = 1.0 / sy;
            let hy: [f64; D] = std::array::from_fn(|i| dot(&h[i], &y));
            let yhy = dot(&y, &hy);
            for i in 0..D {
                for j in 0..D {
                    h[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
        let stalled = (fx - fn_).abs() <= f64::EPSILON * fx.abs().max(1e-300) && inf_norm(&s) <= f64::EPSILON;
        x = xn;
        fx = fn_;
        g = gn;
        if stalled {
            return (x, inf_norm(&g) <= opts.gradient_tol.sqrt());
        }
    }
    (x, inf_norm(&g) <= opts.gradient_tol)
}

/// Minimizes `objective` subject to `constraint >= 0` (Powell-Hestenes-
/// Rockafellar augmented Lagrangian).
pub fn minimize_constrained<const D: usize>(
    objective: &impl Smooth<D>,
    constraint: &impl Smooth<D>,
    x0: [f64; D],
    opts: &Options,
) -> Solution<D> {
    let mut x = x0;
    let mut lambda = 0.0;
    let mut mu = 10.0;
    let mut last_violation = f64::INFINITY;
    let mut converged = false;

    for _ in 0..opts.max_outer {
        let lagrangian = |z: &[f64; D]| {
            let (fv, fg) = objective.eval(z);
            let (gv, gg) = constraint.eval(z);
            let shifted = (lambda - mu * gv).max(0.0);
            let value = fv + (shifted * shifted - lambda * lambda) / (2.0 * mu);
            let grad = std::array::from_fn(|i| fg[i] - shifted * gg[i]);
            (value, grad)
        };
        // the inner solve may stall short of its gradient target when the
        // Hessian jumps (sorted arguments); the KKT test below decides
        let (xn, _) = bfgs(&lagrangian, x, opts);
        x = xn;
        let (fv, fg) = objective.eval(&x);
        let (gv, gg) = constraint.eval(&x);
        lambda = (lambda - mu * gv).max(0.0);
        // complementarity-aware violation: |g| when the constraint is active
        let violation = if lambda > 0.0 { gv.abs() } else { (-gv).max(0.0) };
        let kkt = inf_norm(&std::array::from_fn::<f64, D, _>(|i| fg[i] - lambda * gg[i]));
        if fv.is_finite() && violation <= opts.feasibility_tol && kkt <= opts.stationarity_tol * (1.0 + inf_norm(&fg)) {
            converged = true;
            break;
        }
        if violation > opts.feasibility_tol && violation > 0.25 * last_violation {
            mu = (mu * 10.0).min(1e8);
        }
        last_violation = violation;
    }
    let (value, _) = objective.eval(&x);
    let (constraint_value, _) = constraint.eval(&x);
    Solution {
        x,
        value,
        constraint: constraint_value,
        multiplier: lambda,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bfgs_minimizes_rosenbrock() {
        let rosen = |x: &[f64; 2]| {
            let v = (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
            let g = [
                -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]),
                200.0 * (x[1] - x[0] * x[0]),
            ];
            (v, g)
        };
        let (x, ok) = bfgs(&rosen, [-1.2, 1.0], &Options { gradient_tol: 1e-10, ..Default::default() });
        assert!(ok);
        assert!((x[0] - 1.0).abs() < 1e-8 && (x[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn projects_onto_half_plane() {
        // min |x|^2 s.t. x0 + x1 >= 2  ->  (1, 1), multiplier 2
        let obj = |x: &[f64; 2]| (x[0] * x[0] + x[1] * x[1], [2.0 * x[0], 2.0 * x[1]]);
        let con = |x: &[f64; 2]| (x[0] + x[1] - 2.0, [1.0, 1.0]);
        let sol = minimize_constrained(&obj, &con, [3.0, 0.0], &Options::default());
        assert!(sol.converged);
        assert!((sol.x[0] - 1.0).abs() < 1e-9 && (sol.x[1] - 1.0).abs() < 1e-9);
        assert!((sol.multiplier - 2.0).abs() < 1e-8);
    }

    #[test]
    fn inactive_constraint_is_ignored() {
        let obj = |x: &[f64; 1]| ((x[0] - 1.0).powi(2), [2.0 * (x[0] - 1.0)]);
        let con = |x: &[f64; 1]| (x[0] + 5.0, [1.0]);
        let sol = minimize_constrained(&obj, &con, [0.0], &Options::default());
        assert!(sol.converged);
        assert!((sol.x[0] - 1.0).abs() < 1e-10);
        assert_eq!(sol.multiplier, 0.0);
    }
}

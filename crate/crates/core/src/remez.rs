//! Remez exchange for minimax polynomial and rational approximation.
//!
//! The work is done on the affinely normalised variable `t in [-1, 1]` with a
//! Chebyshev basis; the final approximant is expanded back into the power
//! basis of the original variable so its coefficients can be read against
//! published tables directly.
//!
//! Rationals use the classical second algorithm: at each reference set the
//! levelled-error system `p(t_i) - (f_i - s_i E) q(t_i) = 0` is linearised by
//! freezing `q` in the `E q` product and fix-point iterating on `E`.

use crate::error::{Error, Result};
use crate::poly::{Form, Polynomial, Rational};
use crate::registry::{Approximant, TargetFn};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 100;
/// Largest supported `n + m`.
pub const MAX_TOTAL_DEGREE: usize = 12;
/// Samples in the dense error scan.
pub const SCAN_POINTS: usize = 8192;
/// Golden-section abscissa tolerance.
pub const REFINE_TOLERANCE: f64 = 1e-12;

const INNER_ITERATIONS: usize = 200;

/// A minimax approximation problem.
pub struct RemezProblem<F> {
    pub target: F,
    pub interval: (f64, f64),
    pub num_degree: usize,
    pub den_degree: usize,
    pub max_iterations: usize,
    pub convergence_tol: f64,
}

impl<F: Fn(f64) -> f64> RemezProblem<F> {
    pub fn new(target: F, interval: (f64, f64), num_degree: usize, den_degree: usize) -> Self {
        RemezProblem {
            target,
            interval,
            num_degree,
            den_degree,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            convergence_tol: DEFAULT_TOLERANCE,
        }
    }

    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.convergence_tol = tol;
        self
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.interval;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidProblem(format!("empty interval [{lo}, {hi}]")));
        }
        if self.num_degree + self.den_degree > MAX_TOTAL_DEGREE {
            return Err(Error::InvalidProblem(format!(
                "total degree {} exceeds {MAX_TOTAL_DEGREE}",
                self.num_degree + self.den_degree
            )));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::InvalidProblem("convergence tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of a Remez run.
#[derive(Debug, Clone, PartialEq)]
pub struct RemezResult {
    /// Approximant in the power basis of the original variable.
    pub form: Form,
    pub interval: (f64, f64),
    /// Achieved maximum absolute error of `form` on the interval.
    pub eps: f64,
    /// Final alternation points, ascending.
    pub reference_set: Vec<f64>,
    /// Signed errors at `reference_set`.
    pub reference_errors: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Tolerance that was applied to the extremum spread; raised above the
    /// requested one when the error level approaches double rounding noise.
    pub effective_tol: f64,
}

impl RemezResult {
    pub fn into_approximant(self, target: TargetFn) -> Approximant {
        Approximant { form: self.form, interval: self.interval, eps_max: self.eps, target }
    }

    /// `(max |e_i| - min |e_i|) / max |e_i|` over the reference set.
    pub fn spread(&self) -> f64 {
        spread(&self.reference_errors)
    }

    /// True when consecutive reference errors strictly alternate in sign.
    pub fn alternates(&self) -> bool {
        self.reference_errors.windows(2).all(|w| w[0].signum() != w[1].signum())
    }
}

/// `count` Chebyshev extremum nodes on `[lo, hi]`, ascending, endpoints
/// included.
pub fn initial_reference(interval: (f64, f64), count: usize) -> Vec<f64> {
    assert!(count >= 2, "reference needs at least two points");
    let (lo, hi) = interval;
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let last = (count - 1) as f64;
    (0..count)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == count - 1 {
                hi
            } else {
                let c = -(std::f64::consts::PI * k as f64 / last).cos();
                // Snap the exact centre for odd counts.
                if 2 * k == count - 1 {
                    mid
                } else {
                    mid + half * c
                }
            }
        })
        .collect()
}

/// Locates all local extrema of `target - approx` on the interval.
///
/// A Chebyshev-spaced scan of [`SCAN_POINTS`] samples brackets every interior
/// extremum, which is then refined by golden-section search. Endpoints are
/// reported when the error grows towards them. Results are ascending in
/// abscissa.
pub fn find_error_extrema<T, A>(target: T, approx: A, interval: (f64, f64)) -> Vec<(f64, f64)>
where
    T: Fn(f64) -> f64,
    A: Fn(f64) -> f64,
{
    let err = |x: f64| target(x) - approx(x);
    let xs = initial_reference(interval, SCAN_POINTS);
    let es: Vec<f64> = xs.iter().map(|&x| err(x)).collect();
    let n = xs.len();
    let mut out = Vec::new();

    let endpoint = |e: f64, inner: f64| (e > 0.0 && e >= inner) || (e < 0.0 && e <= inner);
    if endpoint(es[0], es[1]) {
        out.push((xs[0], es[0]));
    }
    for k in 1..n - 1 {
        let (a, b, c) = (es[k - 1], es[k], es[k + 1]);
        let is_max = b > 0.0 && b > a && b >= c;
        let is_min = b < 0.0 && b < a && b <= c;
        if is_max || is_min {
            let s = b.signum();
            let x = golden_max(|x| s * err(x), xs[k - 1], xs[k + 1]);
            let (x, e) = {
                let e = err(x);
                // The refined point can only improve on the sample.
                if s * e >= s * b {
                    (x, e)
                } else {
                    (xs[k], b)
                }
            };
            out.push((x, e));
        }
    }
    if endpoint(es[n - 1], es[n - 2]) {
        out.push((xs[n - 1], es[n - 1]));
    }
    out
}

fn golden_max<G: Fn(f64) -> f64>(g: G, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    while (b - a).abs() > REFINE_TOLERANCE {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    0.5 * (a + b)
}

/// Degree-`n` minimax polynomial (`den_degree` must be 0).
pub fn remez_poly<F: Fn(f64) -> f64>(problem: &RemezProblem<F>) -> Result<RemezResult> {
    if problem.den_degree != 0 {
        return Err(Error::InvalidProblem("remez_poly requires den_degree = 0".into()));
    }
    run(problem)
}

/// Type-`(n, m)` minimax rational, `m > 0`.
pub fn remez_rational<F: Fn(f64) -> f64>(problem: &RemezProblem<F>) -> Result<RemezResult> {
    if problem.den_degree == 0 {
        return Err(Error::InvalidProblem("remez_rational requires den_degree > 0".into()));
    }
    run(problem)
}

/// Dispatches on `den_degree`.
pub fn remez<F: Fn(f64) -> f64>(problem: &RemezProblem<F>) -> Result<RemezResult> {
    run(problem)
}

/// Chebyshev-basis approximant on the normalised variable.
struct ChebApprox {
    num: Vec<f64>,
    /// Denominator coefficients; `den[0] == 1`. Empty slice means `q == 1`.
    den: Vec<f64>,
    mid: f64,
    half: f64,
}

impl ChebApprox {
    fn t(&self, x: f64) -> f64 {
        (x - self.mid) / self.half
    }

    fn q(&self, x: f64) -> f64 {
        if self.den.is_empty() {
            1.0
        } else {
            clenshaw(&self.den, self.t(x))
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let t = self.t(x);
        let p = clenshaw(&self.num, t);
        if self.den.is_empty() {
            p
        } else {
            p / clenshaw(&self.den, t)
        }
    }
}

fn clenshaw(c: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + c[0]
}

fn chebyshev_row(t: f64, len: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(len);
    let (mut prev, mut cur) = (1.0, t);
    for k in 0..len {
        match k {
            0 => row.push(1.0),
            1 => row.push(t),
            _ => {
                let next = 2.0 * t * cur - prev;
                prev = cur;
                cur = next;
                row.push(next);
            }
        }
    }
    row
}

fn spread(errors: &[f64]) -> f64 {
    let max = errors.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let min = errors.iter().fold(f64::INFINITY, |m, e| m.min(e.abs()));
    if max == 0.0 {
        0.0
    } else {
        (max - min) / max
    }
}

/// Solves the levelled system on `reference` for the Chebyshev coefficients
/// and the levelled error.
fn solve_reference<F: Fn(f64) -> f64>(
    problem: &RemezProblem<F>,
    reference: &[f64],
    mid: f64,
    half: f64,
) -> Result<(ChebApprox, f64)> {
    let n = problem.num_degree;
    let m = problem.den_degree;
    let size = n + m + 2;
    let fs: Vec<f64> = reference.iter().map(|&x| (problem.target)(x)).collect();
    let ts: Vec<f64> = reference.iter().map(|&x| (x - mid) / half).collect();
    let rows: Vec<Vec<f64>> = ts.iter().map(|&t| chebyshev_row(t, n.max(m) + 1)).collect();

    let mut q_prev = vec![1.0; size];
    let mut e_prev = f64::NAN;
    let mut last = None;
    let rounds = if m == 0 { 1 } else { INNER_ITERATIONS };
    for _ in 0..rounds {
        let mut a = vec![vec![0.0; size]; size];
        let mut rhs = vec![0.0; size];
        for i in 0..size {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            for j in 0..=n {
                a[i][j] = rows[i][j];
            }
            for j in 1..=m {
                a[i][n + j] = -fs[i] * rows[i][j];
            }
            a[i][size - 1] = s * q_prev[i];
            rhs[i] = fs[i];
        }
        let sol = solve_full_pivot(a, rhs)?;
        let num = sol[..=n].to_vec();
        let mut den = Vec::new();
        if m > 0 {
            den.push(1.0);
            den.extend_from_slice(&sol[n + 1..n + 1 + m]);
        }
        let e = sol[size - 1];
        let approx = ChebApprox { num, den, mid, half };
        if m == 0 {
            return Ok((approx, e));
        }
        for (i, &x) in reference.iter().enumerate() {
            q_prev[i] = approx.q(x);
        }
        let done = (e - e_prev).abs() <= 1e-15 * e.abs().max(f64::MIN_POSITIVE);
        e_prev = e;
        last = Some((approx, e));
        if done {
            break;
        }
    }
    last.ok_or(Error::IllConditioned)
}

fn run<F: Fn(f64) -> f64>(problem: &RemezProblem<F>) -> Result<RemezResult> {
    problem.validate()?;
    let (lo, hi) = problem.interval;
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let need = problem.num_degree + problem.den_degree + 2;

    let probe = initial_reference(problem.interval, SCAN_POINTS);
    let mut f_scale = 0.0f64;
    for &x in &probe {
        let v = (problem.target)(x);
        if !v.is_finite() {
            return Err(Error::InvalidProblem(format!("target is not finite at x = {x}")));
        }
        f_scale = f_scale.max(v.abs());
    }

    let mut reference = initial_reference(problem.interval, need);
    let mut iterations = 0;
    let mut converged = false;
    let mut best: Option<(ChebApprox, Vec<(f64, f64)>, f64)> = None;
    let mut effective_tol = problem.convergence_tol;

    while iterations < problem.max_iterations {
        iterations += 1;
        let (approx, _level) = solve_reference(problem, &reference, mid, half)?;
        let mut q_min = 1.0f64;
        if !approx.den.is_empty() {
            q_min = f64::INFINITY;
            for &x in &probe {
                let q = approx.q(x);
                if q <= 0.0 {
                    return Err(Error::DegenerateDenominator { x, value: q });
                }
                q_min = q_min.min(q);
            }
        }
        let extrema = find_error_extrema(&problem.target, |x| approx.eval(x), problem.interval);
        let max_err = extrema.iter().fold(0.0f64, |m, e| m.max(e.1.abs()));

        if max_err <= 1e-14 * f_scale.max(1.0) {
            // The target lies in the approximating class.
            converged = true;
            let refs = reference.iter().map(|&x| (x, (problem.target)(x) - approx.eval(x))).collect();
            best = Some((approx, refs, max_err));
            break;
        }

        let chosen = select_alternating(extrema, need);
        let Some(chosen) = chosen else {
            best = best.or(Some((approx, Vec::new(), max_err)));
            break;
        };
        let errs: Vec<f64> = chosen.iter().map(|p| p.1).collect();
        let abs_sum = |c: &[f64]| c.iter().map(|v| v.abs()).sum::<f64>();
        let eval_scale = (abs_sum(&approx.num) + f_scale * abs_sum(&approx.den)) / q_min;
        let noise = 100.0 * f64::EPSILON * f_scale.max(eval_scale) / max_err;
        effective_tol = problem.convergence_tol.max(noise);
        let s = spread(&errs);
        reference = chosen.iter().map(|p| p.0).collect();
        let done = s <= effective_tol;
        best = Some((approx, chosen, max_err));
        if done {
            converged = true;
            break;
        }
    }

    let (approx, chosen, _) = best.ok_or(Error::IllConditioned)?;
    if !converged {
        return Err(Error::NotConverged {
            iterations,
            spread: spread(&chosen.iter().map(|p| p.1).collect::<Vec<_>>()),
        });
    }

    let form = to_power_basis(&approx, lo, hi);
    let extrema = find_error_extrema(&problem.target, |x| form.eval(x), problem.interval);
    let eps = extrema.iter().fold(0.0f64, |m, e| m.max(e.1.abs()));
    Ok(RemezResult {
        form,
        interval: problem.interval,
        eps,
        reference_set: chosen.iter().map(|p| p.0).collect(),
        reference_errors: chosen.iter().map(|p| p.1).collect(),
        iterations,
        converged,
        effective_tol,
    })
}

/// Picks `need` alternating extrema: consecutive same-sign runs collapse to
/// their largest member, then the smaller end is dropped until the count fits.
fn select_alternating(extrema: Vec<(f64, f64)>, need: usize) -> Option<Vec<(f64, f64)>> {
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(extrema.len());
    for p in extrema {
        match merged.last_mut() {
            Some(last) if last.1.signum() == p.1.signum() => {
                if p.1.abs() > last.1.abs() {
                    *last = p;
                }
            }
            _ => merged.push(p),
        }
    }
    if merged.len() < need {
        return None;
    }
    let mut start = 0;
    let mut end = merged.len();
    while end - start > need {
        if merged[start].1.abs() < merged[end - 1].1.abs() {
            start += 1;
        } else {
            end -= 1;
        }
    }
    Some(merged[start..end].to_vec())
}

/// Expands Chebyshev coefficients in `t` into power-basis coefficients in `t`.
fn cheb_to_power(c: &[f64]) -> Vec<f64> {
    let len = c.len();
    let mut out = vec![0.0; len];
    let mut prev = vec![0.0; len];
    let mut cur = vec![0.0; len];
    for (k, &ck) in c.iter().enumerate() {
        let tk = match k {
            0 => {
                cur[0] = 1.0;
                cur.clone()
            }
            1 => {
                prev = cur.clone();
                cur = vec![0.0; len];
                cur[1] = 1.0;
                cur.clone()
            }
            _ => {
                let mut next = vec![0.0; len];
                for i in 0..len - 1 {
                    next[i + 1] += 2.0 * cur[i];
                }
                for i in 0..len {
                    next[i] -= prev[i];
                }
                prev = std::mem::replace(&mut cur, next);
                cur.clone()
            }
        };
        for i in 0..len {
            out[i] += ck * tk[i];
        }
    }
    out
}

/// Substitutes `t = alpha x + beta` into a power series in `t`.
fn substitute_affine(p: &[f64], alpha: f64, beta: f64) -> Vec<f64> {
    let mut out = vec![0.0; p.len()];
    for &c in p.iter().rev() {
        // out = out * (alpha x + beta) + c
        let mut next = vec![0.0; p.len()];
        for i in 0..p.len() {
            next[i] += out[i] * beta;
            if i + 1 < p.len() {
                next[i + 1] += out[i] * alpha;
            }
        }
        next[0] += c;
        out = next;
    }
    out
}

fn to_power_basis(approx: &ChebApprox, lo: f64, hi: f64) -> Form {
    let alpha = 2.0 / (hi - lo);
    let beta = -(hi + lo) / (hi - lo);
    let num = Polynomial::new(substitute_affine(&cheb_to_power(&approx.num), alpha, beta));
    if approx.den.is_empty() {
        Form::Polynomial(num)
    } else {
        let den = Polynomial::new(substitute_affine(&cheb_to_power(&approx.den), alpha, beta));
        Form::Rational(Rational::new(num, den))
    }
}

/// Gaussian elimination with column equilibration and full pivoting.
fn solve_full_pivot(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    let mut scale = vec![1.0; n];
    for j in 0..n {
        let m = (0..n).fold(0.0f64, |acc, i| acc.max(a[i][j].abs()));
        if m == 0.0 {
            return Err(Error::IllConditioned);
        }
        scale[j] = m;
        for row in a.iter_mut() {
            row[j] /= m;
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut largest = 0.0f64;
    for k in 0..n {
        let (mut pi, mut pj, mut pv) = (k, k, 0.0f64);
        for i in k..n {
            for j in k..n {
                if a[i][j].abs() > pv {
                    pv = a[i][j].abs();
                    pi = i;
                    pj = j;
                }
            }
        }
        largest = largest.max(pv);
        if pv <= 1e-14 * largest || pv == 0.0 {
            return Err(Error::IllConditioned);
        }
        a.swap(k, pi);
        b.swap(k, pi);
        if pj != k {
            for row in a.iter_mut() {
                row.swap(k, pj);
            }
            perm.swap(k, pj);
        }
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f != 0.0 {
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut y = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * y[j]).sum();
        y[k] = (b[k] - s) / a[k][k];
    }
    let mut x = vec![0.0; n];
    for k in 0..n {
        x[perm[k]] = y[k] / scale[perm[k]];
    }
    Ok(x)
}

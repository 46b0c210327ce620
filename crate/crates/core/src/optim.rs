//! Preconditioned limited-memory BFGS with a backtracking Armijo search.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// What the minimizer needs to know about the objective.
pub trait Objective {
    fn value_and_gradient(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)>;

    /// Positive diagonal approximating the Hessian, refreshed on restarts.
    fn diagonal(&mut self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Called every `project_every` iterations; may move `x` (return `true`
    /// if it did, which discards the curvature memory).
    fn project(&mut self, _x: &mut [f64]) -> Result<bool> {
        Ok(false)
    }
}

#[derive(Clone, Debug)]
pub struct LbfgsOptions {
    pub memory: usize,
    pub max_iters: usize,
    /// Stop once the gradient sup-norm is at or below this.
    pub tol: f64,
    pub armijo: f64,
    pub max_backtracks: usize,
    /// 0 disables projection.
    pub project_every: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        LbfgsOptions {
            memory: 10,
            max_iters: 20_000,
            tol: 1e-8,
            armijo: 1e-4,
            max_backtracks: 50,
            project_every: 25,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LbfgsOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after every accepted step, starting with the initial value.
    pub history: Vec<f64>,
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, b| a.max(b.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Pair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

fn direction(g: &[f64], pairs: &VecDeque<Pair>, inv_diag: &[f64]) -> Vec<f64> {
    let mut q: Vec<f64> = g.to_vec();
    let mut alphas = Vec::with_capacity(pairs.len());
    for p in pairs.iter().rev() {
        let a = p.rho * dot(&p.s, &q);
        for (qi, yi) in q.iter_mut().zip(&p.y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    let gamma = match pairs.back() {
        Some(p) => {
            let yhy: f64 = p.y.iter().zip(inv_diag).map(|(y, h)| y * y * h).sum();
            dot(&p.s, &p.y) / yhy
        }
        None => 1.0,
    };
    for (qi, h) in q.iter_mut().zip(inv_diag) {
        *qi *= gamma * h;
    }
    for (p, a) in pairs.iter().zip(alphas.iter().rev()) {
        let b = p.rho * dot(&p.y, &q);
        for (qi, si) in q.iter_mut().zip(&p.s) {
            *qi += (a - b) * si;
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

pub fn minimize(obj: &mut impl Objective, x0: Vec<f64>, opts: &LbfgsOptions) -> Result<LbfgsOutcome> {
    if opts.memory == 0 || !(opts.tol > 0.0) {
        return Err(Error::invalid("L-BFGS needs memory >= 1 and a positive tolerance"));
    }
    let mut x = x0;
    let (mut f, mut g) = obj.value_and_gradient(&x)?;
    let mut history = vec![f];
    let refresh = |obj: &mut dyn FnMut(&[f64]) -> Option<Vec<f64>>, x: &[f64]| -> Vec<f64> {
        match obj(x) {
            Some(d) => d.iter().map(|v| if *v > 0.0 { 1.0 / v } else { 1.0 }).collect(),
            None => vec![1.0; x.len()],
        }
    };
    let mut inv_diag = refresh(&mut |x| obj.diagonal(x), &x);
    let mut pairs: VecDeque<Pair> = VecDeque::with_capacity(opts.memory);
    let mut iter = 0;
    while iter < opts.max_iters {
        let gnorm = sup(&g);
        if gnorm <= opts.tol {
            return Ok(LbfgsOutcome {
                x,
                value: f,
                gradient_norm: gnorm,
                iterations: iter,
                converged: true,
                history,
            });
        }
        iter += 1;
        let mut p = direction(&g, &pairs, &inv_diag);
        let mut slope = dot(&g, &p);
        if !(slope < 0.0) {
            pairs.clear();
            p = g.iter().zip(&inv_diag).map(|(gi, h)| -gi * h).collect();
            slope = dot(&g, &p);
        }
        let mut t = if pairs.is_empty() {
            // first step: keep the preconditioned move modest
            (1.0f64).min(1.0 / sup(&p).max(1e-300))
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..opts.max_backtracks {
            let trial: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + t * b).collect();
            let (ft, gt) = obj.value_and_gradient(&trial)?;
            if ft <= f + opts.armijo * t * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            // near the floor the Armijo test drowns in roundoff; take the
            // step if the value did not rise and the gradient shrank
            if ft <= f && sup(&gt) < gnorm {
                accepted = Some((trial, ft, gt));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else {
            if !pairs.is_empty() {
                pairs.clear();
                continue;
            }
            return Err(Error::LineSearch {
                iteration: iter,
                gradient_norm: gnorm,
                best: x,
            });
        };
        assert!(fn_ <= f, "non-monotone step accepted: {fn_} > {f}");
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() && sy > 0.0 {
            if pairs.len() == opts.memory {
                pairs.pop_front();
            }
            pairs.push_back(Pair { s, y, rho: 1.0 / sy });
        }
        x = xn;
        f = fn_;
        g = gn;
        history.push(f);
        if opts.project_every > 0 && iter % opts.project_every == 0 && obj.project(&mut x)? {
            let (fp, gp) = obj.value_and_gradient(&x)?;
            f = fp;
            g = gp;
            pairs.clear();
            inv_diag = refresh(&mut |x| obj.diagonal(x), &x);
        }
    }
    let gnorm = sup(&g);
    Ok(LbfgsOutcome {
        x,
        value: f,
        gradient_norm: gnorm,
        iterations: iter,
        converged: gnorm <= opts.tol,
        history,
    })
}

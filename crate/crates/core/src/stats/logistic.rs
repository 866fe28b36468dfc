//! Four-parameter logistic `b2 + (b1 - b2) / (1 + exp(-(x - b3) / b4))`,
//! fitted by Levenberg-Marquardt on standardized inputs.

use alloc::vec::Vec;

const MAX_ITER: usize = 500;
const MAX_DAMPING: f64 = 1e12;
const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Logistic {
    params: [f64; 4],
    shift: f64,
    scale: f64,
}

fn curve(p: &[f64; 4], z: f64) -> (f64, f64) {
    let g = 1.0 / (1.0 + libm::exp(-(z - p[2]) / p[3]));
    (p[1] + (p[0] - p[1]) * g, g)
}

impl Logistic {
    pub fn eval(&self, x: f64) -> f64 {
        curve(&self.params, (x - self.shift) / self.scale).0
    }
}

fn sse(p: &[f64; 4], z: &[f64], y: &[f64]) -> f64 {
    z.iter()
        .zip(y)
        .map(|(&zi, &yi)| {
            let r = yi - curve(p, zi).0;
            r * r
        })
        .sum()
}

/// Solves a 4x4 system by Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for c in 0..4 {
        let piv = (c..4).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..4 {
            let f = a[r][c] / a[c][c];
            for k in c..4 {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; 4];
    for r in (0..4).rev() {
        let s: f64 = (r + 1..4).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Least-squares fit of the logistic mapping `x` onto `y`. `None` when the
/// iteration does not settle or produces non-finite parameters.
pub fn fit_logistic(x: &[f64], y: &[f64]) -> Option<Logistic> {
    let n = x.len() as f64;
    let shift = x.iter().sum::<f64>() / n;
    let scale = libm::sqrt(x.iter().map(|v| (v - shift) * (v - shift)).sum::<f64>() / n);
    if scale == 0.0 {
        return None;
    }
    let z: Vec<f64> = x.iter().map(|v| (v - shift) / scale).collect();
    let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let rising = z.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() >= 0.0;
    let mut p = if rising { [hi, lo, 0.0, 1.0] } else { [lo, hi, 0.0, 1.0] };
    let mut cost = sse(&p, &z, y);
    let mut damping = 1e-3;
    for _ in 0..MAX_ITER {
        let mut jtj = [[0.0; 4]; 4];
        let mut jtr = [0.0; 4];
        for (&zi, &yi) in z.iter().zip(y) {
            let (f, g) = curve(&p, zi);
            let slope = (p[0] - p[1]) * g * (1.0 - g) / p[3];
            let jac = [g, 1.0 - g, -slope, -slope * (zi - p[2]) / p[3]];
            let r = yi - f;
            for i in 0..4 {
                jtr[i] += jac[i] * r;
                for j in 0..4 {
                    jtj[i][j] += jac[i] * jac[j];
                }
            }
        }
        loop {
            let mut a = jtj;
            for (i, row) in a.iter_mut().enumerate() {
                row[i] += damping * jtj[i][i].max(1e-12);
            }
            let step = solve4(a, jtr);
            let trial = step.map(|s| [p[0] + s[0], p[1] + s[1], p[2] + s[2], p[3] + s[3]]);
            let trial_cost = trial.filter(|t| t[3] != 0.0).map(|t| sse(&t, &z, y)).filter(|c| c.is_finite());
            match (trial, trial_cost) {
                (Some(t), Some(c)) if c <= cost => {
                    let improvement = cost - c;
                    p = t;
                    cost = c;
                    damping = (damping / 10.0).max(1e-15);
                    if improvement <= REL_TOL * (cost + REL_TOL) {
                        return finite(p).then_some(Logistic { params: p, shift, scale });
                    }
                    break;
                }
                _ => {
                    damping *= 10.0;
                    if damping > MAX_DAMPING {
                        // no descent direction left: at a minimum
                        return finite(p).then_some(Logistic { params: p, shift, scale });
                    }
                }
            }
        }
    }
    None
}

fn finite(p: [f64; 4]) -> bool {
    p.iter().all(|v| v.is_finite()) && p[3] != 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_sigmoid() {
        let x: Vec<f64> = (0..40).map(|i| i as f64 * 0.25).collect();
        let truth = |v: f64| 1.0 + 4.0 / (1.0 + libm::exp(-(v - 5.0) / 0.8));
        let y: Vec<f64> = x.iter().map(|&v| truth(v)).collect();
        let f = fit_logistic(&x, &y).unwrap();
        for &v in &x {
            assert!((f.eval(v) - truth(v)).abs() < 1e-6);
        }
    }

    #[test]
    fn constant_input_does_not_fit() {
        assert!(fit_logistic(&[1.0; 5], &[1.0, 2.0, 3.0, 4.0, 5.0]).is_none());
    }
}

//! Small derivative-free and quasi-Newton minimizers shared by the
//! preprocessing transforms and the statistical forecasters.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
///
/// Stops when the bracket is narrower than `tol`; returns `(argmin, min)`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        // NaN compares false, so a NaN at `c` pushes the bracket away from it.
        if fc < fd || fd.is_nan() {
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
    let x = 0.5 * (a + b);
    let fx = f(x);
    // The midpoint can be marginally worse than an interior probe.
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .filter(|(_, v)| !v.is_nan())
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .unwrap_or((x, fx))
}

/// Central finite-difference gradient.
pub fn central_gradient<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &[f64]) -> Vec<f64> {
    let mut probe = x.to_vec();
    let mut grad = vec![0.0; x.len()];
    for i in 0..x.len() {
        let h = 1e-5 * x[i].abs().max(1.0);
        probe[i] = x[i] + h;
        let up = f(&probe);
        probe[i] = x[i] - h;
        let down = f(&probe);
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * h);
    }
    grad
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// BFGS with a backtracking Armijo line search and finite-difference
/// gradients.
///
/// Converged when the infinity norm of the accepted step drops below
/// `step_tol`, or when no descent step can be found at numerical precision.
pub fn bfgs<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step_tol: f64,
    max_iter: usize,
) -> Minimum {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    if n == 0 || !fx.is_finite() {
        return Minimum {
            x,
            value: fx,
            iterations: 0,
            converged: n == 0 && fx.is_finite(),
        };
    }
    let mut g = central_gradient(&mut f, &x);
    // Inverse Hessian approximation, row-major.
    let mut hinv = identity(n);
    let mut converged = false;
    let mut iterations = 0;
    let mut trial = vec![0.0; n];

    while iterations < max_iter {
        iterations += 1;
        let mut dir: Vec<f64> = mat_vec(&hinv, &g, n).into_iter().map(|v| -v).collect();
        let mut slope: f64 = dir.iter().zip(&g).map(|(d, gi)| d * gi).sum();
        if !(slope < 0.0) {
            hinv = identity(n);
            dir = g.iter().map(|v| -v).collect();
            slope = -g.iter().map(|v| v * v).sum::<f64>();
            if slope == 0.0 {
                converged = true;
                break;
            }
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            for i in 0..n {
                trial[i] = x[i] + t * dir[i];
            }
            let ft = f(&trial);
            if ft.is_finite() && ft <= fx + 1e-4 * t * slope {
                accepted = Some(ft);
                break;
            }
            t *= 0.5;
        }
        let Some(f_new) = accepted else {
            // No decrease along the descent direction: stationary to precision.
            converged = true;
            break;
        };

        let s: Vec<f64> = dir.iter().map(|d| t * d).collect();
        let step_norm = s.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        x.copy_from_slice(&trial);
        fx = f_new;
        if step_norm < step_tol {
            converged = true;
            break;
        }
        let g_new = central_gradient(&mut f, &x);
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-12 {
            bfgs_update(&mut hinv, &s, &y, sy, n);
        }
        g = g_new;
    }

    Minimum {
        x,
        value: fx,
        iterations,
        converged,
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn mat_vec(m: &[f64], v: &[f64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| m[i * n..(i + 1) * n].iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64, n: usize) {
    let rho = 1.0 / sy;
    let hy = mat_vec(h, y, n);
    let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

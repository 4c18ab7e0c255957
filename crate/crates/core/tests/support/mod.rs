//! Independent numerical oracles shared by the integration tests. Nothing
//! here calls into the library's numerics.

#![allow(dead_code)]

use num_complex::Complex64;

/// Bernoulli numbers B₂, B₄, …, B₂₄.
const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// Hurwitz zeta `ζ(s, a)` by Euler–Maclaurin summation with `N` explicit
/// terms and twelve Bernoulli corrections; valid for real `s ≠ 1`,
/// including the analytic continuation to `s > −23`.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    const N: usize = 30;
    let mut sum: f64 = (0..N).map(|n| (n as f64 + a).powf(-s)).sum();
    let x = N as f64 + a;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // rising factorial s (s+1) … (s+2j−2) divided by (2j)!
    let mut coef = s / 2.0;
    let mut power = x.powf(-s - 1.0);
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let j = j + 1;
        if j > 1 {
            let k = 2 * j;
            coef *= (s + k as f64 - 3.0) * (s + k as f64 - 2.0) / ((k - 1) as f64 * k as f64);
            power /= x * x;
        }
        sum += b * coef * power;
    }
    sum
}

/// `η(s)` of the spectrum `ℤ + ρ`: `ζ(s, ρ) − ζ(s, 1 − ρ)`.
pub fn eta_oracle(s: f64, rho: f64) -> f64 {
    hurwitz_zeta(s, rho) - hurwitz_zeta(s, 1.0 - rho)
}

/// Adaptive Simpson quadrature.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            left + right + diff / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Classical fixed-step RK4 on `[t0, t1]` with `n` steps.
pub fn rk4<const N: usize>(
    f: impl Fn(f64, &[Complex64; N]) -> [Complex64; N],
    y0: [Complex64; N],
    t0: f64,
    t1: f64,
    n: usize,
) -> Vec<(f64, [Complex64; N])> {
    let h = (t1 - t0) / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    let mut y = y0;
    out.push((t0, y));
    for i in 0..n {
        let t = t0 + i as f64 * h;
        let add = |y: &[Complex64; N], k: &[Complex64; N], c: f64| -> [Complex64; N] {
            std::array::from_fn(|j| y[j] + k[j] * c)
        };
        let k1 = f(t, &y);
        let k2 = f(t + 0.5 * h, &add(&y, &k1, 0.5 * h));
        let k3 = f(t + 0.5 * h, &add(&y, &k2, 0.5 * h));
        let k4 = f(t + h, &add(&y, &k3, h));
        y = std::array::from_fn(|j| y[j] + (k1[j] + k2[j] * 2.0 + k3[j] * 2.0 + k4[j]) * (h / 6.0));
        out.push((if i + 1 == n { t1 } else { t + h }, y));
    }
    out
}

/// `(f, f', f'')` of `e^t + α e^{−t}`, written out independently.
pub fn warp(alpha: f64, t: f64) -> (f64, f64, f64) {
    let f = t.exp() + alpha / t.exp();
    let fp = t.exp() - alpha / t.exp();
    (f, fp, f)
}

/// Sign changes of `g` on a uniform grid, refined by bisection to `tol`.
pub fn bracket_roots(g: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize, tol: f64) -> Vec<f64> {
    let xs: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let mut roots = Vec::new();
    for i in 0..n {
        if ys[i] == 0.0 {
            roots.push(xs[i]);
        } else if ys[i + 1] != 0.0 && (ys[i] < 0.0) != (ys[i + 1] < 0.0) {
            let (mut lo, mut hi, glo) = (xs[i], xs[i + 1], ys[i]);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                let gm = g(mid);
                if gm == 0.0 {
                    lo = mid;
                    hi = mid;
                } else if (gm < 0.0) == (glo < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }
    if ys[n] == 0.0 {
        roots.push(xs[n]);
    }
    roots
}

//! Special functions and distribution tables used by the fitting and test code.
//!
//! `ln_gamma`, `erf` and `erfc` come from `libm`. Digamma and trigamma use
//! upward recurrence to an argument of at least 10 followed by the asymptotic
//! series, which keeps the absolute error below 1e-14.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

// Arguments are shifted up to at least this before the asymptotic series.
const RECURRENCE_FLOOR: f64 = 10.0;

pub fn digamma(x: f64) -> f64 {
    let mut x = x;
    let mut acc = 0.0;
    while x < RECURRENCE_FLOOR {
        acc -= 1.0 / x;
        x += 1.0;
    }
    acc + x.ln() - 0.5 / x - digamma_tail(x)
}

/// `ln(x) - digamma(x)`, evaluated without cancellation for large `x`.
pub fn ln_minus_digamma(x: f64) -> f64 {
    if x >= RECURRENCE_FLOOR {
        0.5 / x + digamma_tail(x)
    } else {
        x.ln() - digamma(x)
    }
}

// Bernoulli tail of the digamma expansion: sum of B_2n / (2n x^2n), n = 1..7.
fn digamma_tail(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2
                                        * (1.0 / 132.0
                                            - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))))
}

pub fn trigamma(x: f64) -> f64 {
    let mut x = x;
    let mut acc = 0.0;
    while x < RECURRENCE_FLOOR {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let tail = inv
        + 0.5 * inv2
        + inv
            * inv2
            * (1.0 / 6.0
                - inv2
                    * (1.0 / 30.0
                        - inv2
                            * (1.0 / 42.0
                                - inv2
                                    * (1.0 / 30.0
                                        - inv2 * (5.0 / 66.0 - inv2 * (691.0 / 2730.0 - inv2 * 7.0 / 6.0))))));
    acc + tail
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

/// Standard normal upper tail, `1 - Φ(z)`, without cancellation for large `z`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / SQRT_2)
}

/// Inverse of the standard normal CDF.
///
/// Rational approximation (Acklam) refined by one Halley step against
/// `erfc`, which brings the result to full double precision.
pub fn normal_quantile(q: f64) -> f64 {
    if q <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if q >= 1.0 {
        return f64::INFINITY;
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383_577_518_672_69e2,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const LOW: f64 = 0.02425;
    let x = if q < LOW {
        let r = (-2.0 * q.ln()).sqrt();
        (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    } else if q <= 1.0 - LOW {
        let r = q - 0.5;
        let s = r * r;
        (((((A[0] * s + A[1]) * s + A[2]) * s + A[3]) * s + A[4]) * s + A[5]) * r
            / (((((B[0] * s + B[1]) * s + B[2]) * s + B[3]) * s + B[4]) * s + 1.0)
    } else {
        let r = (-2.0 * (1.0 - q).ln()).sqrt();
        -(((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    };
    // Halley refinement; work in the tail that keeps precision.
    let e = if x < 0.0 {
        normal_cdf(x) - q
    } else {
        (1.0 - q) - normal_sf(x)
    };
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        1.0 - gamma_cont_fraction(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_cont_fraction(a, x)
    }
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..100_000 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_cont_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..100_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-17 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_inc(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (-x).ln_1p();
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_cont_fraction(a, b, x) / a
    } else {
        1.0 - ln_front.exp() * beta_cont_fraction(b, a, 1.0 - x) / b
    }
}

fn beta_cont_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Two-sided tail probability `P(|T| >= |t|)` of Student's t with `df` degrees of freedom.
pub fn student_t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    if t.is_nan() {
        return f64::NAN;
    }
    beta_inc(0.5 * df, 0.5, df / (df + t * t))
}

/// Two-sided critical value: the `t` with `P(|T| >= t) = alpha`.
pub fn student_t_critical(alpha: f64, df: f64) -> f64 {
    // I_x(df/2, 1/2) rises monotonically from 0 to 1 on x = df/(df+t^2).
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if beta_inc(0.5 * df, 0.5, mid) < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-17 * hi {
            break;
        }
    }
    let x = 0.5 * (lo + hi);
    (df * (1.0 - x) / x).sqrt()
}

/// Two-sided standard normal critical value `z` with `P(|Z| >= z) = alpha`.
pub fn normal_critical(alpha: f64) -> f64 {
    -normal_quantile(0.5 * alpha)
}

/// Exact distribution of the one-sample Kolmogorov statistic: `P(D_n < d)`.
///
/// Marsaglia, Tsang and Wang matrix-power evaluation. For large `n` the
/// matrix grows with `sqrt(n)`, so callers needing big samples should use
/// [`ks_critical`], which switches to the limiting distribution.
pub fn kolmogorov_cdf(n: usize, d: f64) -> f64 {
    if d <= 0.0 {
        return 0.0;
    }
    if d >= 1.0 {
        return 1.0;
    }
    let nf = n as f64;
    let k = (nf * d).floor() as usize + 1;
    let m = 2 * k - 1;
    let h = k as f64 - nf * d;
    let mut mat = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            if i + 1 >= j {
                mat[i * m + j] = 1.0;
            }
        }
    }
    for i in 0..m {
        mat[i * m] -= h.powi(i as i32 + 1);
        mat[(m - 1) * m + i] -= h.powi((m - i) as i32);
    }
    if 2.0 * h - 1.0 > 0.0 {
        mat[(m - 1) * m] += (2.0 * h - 1.0).powi(m as i32);
    }
    for i in 0..m {
        for j in 0..m {
            if i + 1 > j {
                for g in 1..=(i + 1 - j) {
                    mat[i * m + j] /= g as f64;
                }
            }
        }
    }
    let (q, mut exp10) = matrix_power(&mat, m, n);
    let mut s = q[(k - 1) * m + (k - 1)];
    for i in 1..=n {
        s = s * i as f64 / nf;
        if s < 1e-140 {
            s *= 1e140;
            exp10 -= 140;
        }
    }
    s * 10f64.powi(exp10)
}

fn matrix_mul(a: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m * m];
    for i in 0..m {
        for l in 0..m {
            let ail = a[i * m + l];
            if ail == 0.0 {
                continue;
            }
            for j in 0..m {
                out[i * m + j] += ail * b[l * m + j];
            }
        }
    }
    out
}

fn matrix_power(a: &[f64], m: usize, n: usize) -> (Vec<f64>, i32) {
    if n == 1 {
        return (a.to_vec(), 0);
    }
    let (half, e_half) = matrix_power(a, m, n / 2);
    let mut v = matrix_mul(&half, &half, m);
    let mut exp10 = 2 * e_half;
    if n % 2 == 1 {
        v = matrix_mul(a, &v, m);
    }
    if v[(m / 2) * m + m / 2] > 1e140 {
        for x in v.iter_mut() {
            *x *= 1e-140;
        }
        exp10 += 140;
    }
    (v, exp10)
}

/// Limiting Kolmogorov distribution `P(sqrt(n) D_n <= x)` as `n -> inf`.
pub fn kolmogorov_limit_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    1.0 - 2.0 * sum
}

/// Above this size the exact matrix method is replaced by the limiting
/// distribution with Stephens' small-sample correction.
const KS_EXACT_MAX_N: usize = 400;

/// K-S critical value: the smallest `d` with `P(D_n < d) >= 1 - alpha`.
///
/// For `n = 40, alpha = 0.05` this is 0.2101.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    let target = 1.0 - alpha;
    if n > KS_EXACT_MAX_N {
        let (mut lo, mut hi) = (0.1, 5.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if kolmogorov_limit_cdf(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root_n = (n as f64).sqrt();
        return 0.5 * (lo + hi) / (root_n + 0.12 + 0.11 / root_n);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_cdf(n, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Safeguarded Newton iteration for a monotone function bracketed by `[lo, hi]`.
///
/// `f` returns the function value and its derivative. Steps that leave the
/// current bracket fall back to bisection.
pub(crate) fn newton_bracketed<F>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    start: f64,
    rel_tol: f64,
    max_iter: usize,
) -> Root
where
    F: FnMut(f64) -> (f64, f64),
{
    let lo_sign = f(lo).0.signum();
    let mut x = if start > lo && start < hi {
        start
    } else {
        0.5 * (lo + hi)
    };
    for iteration in 1..=max_iter {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Root { x, iterations: iteration, converged: true };
        }
        if fx.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - fx / dfx;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= rel_tol * next.abs() || (hi - lo) <= rel_tol * next.abs() {
            return Root { x: next, iterations: iteration, converged: true };
        }
        x = next;
    }
    Root { x, iterations: max_iter, converged: false }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Root {
    pub x: f64,
    pub iterations: usize,
    pub converged: bool,
}

//! Reference implementations that share no code with the library's
//! special functions or Monte Carlo engine.
#![allow(dead_code)]

use cardylab::domain::{Arc, SiteClassification};

/// Gauss–Legendre nodes and weights on [−1, 1], by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// ∫_0^b f on panels [b/2^{j+1}, b/2^j], which resolves a mild
/// non-smoothness at 0.
pub fn integrate_graded(f: &dyn Fn(f64) -> f64, b: f64) -> f64 {
    thread_local! {
        static RULE: Vec<(f64, f64)> = gauss_legendre(20);
    }
    RULE.with(|rule| {
        let mut total = 0.0;
        let mut hi = b;
        for _ in 0..60 {
            let lo = 0.5 * hi;
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            total += half * rule.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>();
            hi = lo;
        }
        total
    })
}

/// ∫_0^w t^{a−1}(1−t)^{a−1} dt for w ≤ 1/2, after t = u^{1/a}, which turns
/// the endpoint singularity into the bounded integrand (1 − u^{1/a})^{a−1}/a.
fn partial_beta(w: f64, a: f64) -> f64 {
    let g = move |u: f64| (1.0 - u.powf(1.0 / a)).powf(a - 1.0) / a;
    integrate_graded(&g, w.powf(a))
}

/// I_w(a, a) by quadrature; the normaliser is twice the half integral.
pub fn inc_beta(w: f64, a: f64) -> f64 {
    let half = partial_beta(0.5, a);
    if w <= 0.5 {
        partial_beta(w, a) / (2.0 * half)
    } else {
        1.0 - partial_beta(1.0 - w, a) / (2.0 * half)
    }
}

/// Inverse of [`inc_beta`] by bisection.
pub fn inv_inc_beta(x: f64, a: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..70 {
        let mid = 0.5 * (lo + hi);
        if inc_beta(mid, a) < x {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-17 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Conformal image X of base point x for base angle kappa.
pub fn conformal_x(x: f64, kappa: f64) -> f64 {
    let w = inv_inc_beta(x, kappa / std::f64::consts::PI);
    inc_beta(w, 1.0 / 3.0)
}

/// Exact crossing probability by enumerating all 2^N configurations.
pub fn exact_crossing(cls: &SiteClassification, p: f64) -> f64 {
    let n = cls.len();
    assert!(n <= 24, "{n} sites is too many to enumerate");
    let adj: Vec<Vec<usize>> = (0..n as u32)
        .map(|v| cls.neighbors(v).iter().map(|&w| w as usize).collect())
        .collect();
    let labels = cls.labels();
    let mut total = 0.0;
    let mut stack = Vec::new();
    let mut seen = vec![false; n];
    for mask in 0u32..(1 << n) {
        let open = |v: usize| mask >> v & 1 == 1;
        seen.fill(false);
        stack.clear();
        for v in 0..n {
            if labels[v] == Some(Arc::Ax) && open(v) {
                seen[v] = true;
                stack.push(v);
            }
        }
        let mut hit = false;
        while let Some(v) = stack.pop() {
            if labels[v] == Some(Arc::Bc) {
                hit = true;
                break;
            }
            for &w in &adj[v] {
                if open(w) && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if hit {
            let k = mask.count_ones() as i32;
            total += p.powi(k) * (1.0 - p).powi(n as i32 - k);
        }
    }
    total
}

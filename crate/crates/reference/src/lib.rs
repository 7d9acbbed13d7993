//! Independent reference computations: quadrature-based `erfc`, a bisection
//! inverse of the error-probability map, and small numeric helpers.
//!
//! Nothing here depends on `qrwr-core`, so it can serve as an oracle for it.

/// `erfc(x)` for `x >= 0` by composite Gauss-Legendre quadrature of
/// `(2 / sqrt(pi)) exp(-x^2) * int_0^inf exp(-u^2 - 2 x u) du`.
pub fn erfc_quadrature(x: f64) -> f64 {
    assert!(x >= 0.0);
    // integrand below e^-60 of its peak beyond u_max
    let u_max = -x + (x * x + 60.0).sqrt();
    let f = |u: f64| (-u * u - 2.0 * x * u).exp();
    let integral = gauss_legendre_composite(f, 0.0, u_max, 64, 20);
    2.0 / std::f64::consts::PI.sqrt() * (-x * x).exp() * integral
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1],
/// from Newton iteration on the three-term Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = z;
        weights[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (nodes, weights)
}

pub fn gauss_legendre_composite(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    panels: usize,
    order: usize,
) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|j| {
            let mid = a + (j as f64 + 0.5) * h;
            nodes
                .iter()
                .zip(&weights)
                .map(|(z, w)| w * f(mid + 0.5 * h * z))
                .sum::<f64>()
                * 0.5
                * h
        })
        .sum()
}

/// Gaussian-tail error probability `erfc(sqrt(snr / 8)) / 2` via quadrature.
pub fn p_err_quadrature(snr: f64) -> f64 {
    0.5 * erfc_quadrature((snr / 8.0).sqrt())
}

/// SNR with `p_err_quadrature(snr) == p`, by plain bisection.
pub fn required_snr_bisection(p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while p_err_quadrature(hi) > p {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p_err_quadrature(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

pub fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

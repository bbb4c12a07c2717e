//! Bessel functions of the first kind of integer order and their positive zeros.

use std::f64::consts::PI;

/// Below this argument the ascending series is used; above it, the trapezoid
/// rule on Bessel's integral.
const SERIES_LIMIT: f64 = 5.0;

/// Ascending power series of `J_m(x)`.
pub fn bessel_j_series(m: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for i in 1..=m {
        term *= half / i as f64;
    }
    let q = -half * half;
    let mut sum = term;
    for s in 1..200 {
        term *= q / (s as f64 * (s + m) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Bessel's integral `J_m(x) = (1/2π) ∫₀^{2π} cos(mτ − x sin τ) dτ`, evaluated by
/// the trapezoid rule; the integrand is periodic and entire, so convergence is
/// geometric once the node count exceeds `|x| + m`.
pub fn bessel_j_integral(m: usize, x: f64) -> f64 {
    let nodes = 2 * (x.abs().ceil() as usize + m + 40);
    let step = 2.0 * PI / nodes as f64;
    let mf = m as f64;
    let sum: f64 = (0..nodes)
        .map(|i| {
            let t = i as f64 * step;
            (mf * t - x * t.sin()).cos()
        })
        .sum();
    sum / nodes as f64
}

/// `J_m(x)` for integer order `m` and real `x`.
pub fn bessel_j(m: usize, x: f64) -> f64 {
    if x.abs() < SERIES_LIMIT {
        bessel_j_series(m, x)
    } else {
        bessel_j_integral(m, x)
    }
}

fn bisect(m: usize, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = bessel_j(m, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-14 * hi.max(1.0) {
            return mid;
        }
        let f_mid = bessel_j(m, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Scan step for bracketing; consecutive zeros of `J_m` are never closer than 3.
const SCAN_STEP: f64 = 0.25;

fn scan_start(m: usize) -> f64 {
    // J_m has no positive zero below m (and none below 2.4 for m = 0).
    (m as f64).max(1.0)
}

/// Positive zeros of `J_m` strictly below `bound`, ascending.
pub fn bessel_zeros_below(m: usize, bound: f64) -> Vec<f64> {
    let mut zeros = Vec::new();
    let mut a = scan_start(m);
    let mut fa = bessel_j(m, a);
    while a < bound {
        let b = a + SCAN_STEP;
        let fb = bessel_j(m, b);
        if (fa > 0.0) != (fb > 0.0) {
            let z = bisect(m, a, b);
            if z < bound {
                zeros.push(z);
            }
        }
        a = b;
        fa = fb;
    }
    zeros
}

/// The first `count` positive zeros `j_{m,1} < … < j_{m,count}`.
pub fn bessel_zeros(m: usize, count: usize) -> Vec<f64> {
    let mut zeros = Vec::with_capacity(count);
    let mut a = scan_start(m);
    let mut fa = bessel_j(m, a);
    while zeros.len() < count {
        let b = a + SCAN_STEP;
        let fb = bessel_j(m, b);
        if (fa > 0.0) != (fb > 0.0) {
            zeros.push(bisect(m, a, b));
        }
        a = b;
        fa = fb;
    }
    zeros
}

/// The `k`-th positive zero of `J_m` (`k ≥ 1`).
pub fn bessel_zero(m: usize, k: usize) -> f64 {
    assert!(k >= 1, "zeros are counted from 1");
    bessel_zeros(m, k)[k - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_and_integral_agree_in_overlap() {
        for m in 0..6 {
            for i in 1..40 {
                let x = 0.2 * i as f64;
                let a = bessel_j_series(m, x);
                let b = bessel_j_integral(m, x);
                assert!((a - b).abs() < 1e-13, "m={m} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn tabulated_values() {
        assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(1, 10.0) - 0.043_472_746_168_861_44).abs() < 1e-14);
        assert!((bessel_j(0, 0.0) - 1.0).abs() < 1e-16);
        assert_eq!(bessel_j(3, 0.0), 0.0);
    }

    #[test]
    fn tabulated_zeros() {
        assert!((bessel_zero(0, 1) - 2.404_825_557_695_773).abs() < 1e-12);
        assert!((bessel_zero(1, 1) - 3.831_705_970_207_512).abs() < 1e-12);
        assert!((bessel_zero(0, 2) - 5.520_078_110_286_311).abs() < 1e-12);
        assert!((bessel_zero(2, 1) - 5.135_622_301_840_683).abs() < 1e-12);
        assert!((bessel_zero(0, 10) - 30.634_606_468_431_976).abs() < 1e-11);
    }

    #[test]
    fn zeros_below_matches_counted_zeros() {
        let bound = 20.0;
        for m in 0..5 {
            let below = bessel_zeros_below(m, bound);
            let counted = bessel_zeros(m, below.len() + 1);
            assert_eq!(&counted[..below.len()], &below[..]);
            assert!(counted[below.len()] >= bound);
        }
    }
}

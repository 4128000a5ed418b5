//! Integer-order Bessel functions of the first kind.
//!
//! `J_n(x)` is computed with Miller's backward recurrence
//! `J_{k-1} = (2k / x) J_k - J_{k+1}`, started from an arbitrary seed well
//! above `max(n, x)` and normalized with `J_0 + 2 sum_k J_{2k} = 1`. The
//! backward direction is stable for every order, so small values in the
//! `n > x` tail keep their relative accuracy. Intermediate values are
//! rescaled before they can overflow.

const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// `J_n(x)` for any integer order and real argument.
pub fn bessel_j(order: i64, x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_infinite() {
        return 0.0;
    }
    // J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x).
    let n = order.unsigned_abs();
    let flips = (order < 0) as u32 + (x < 0.0) as u32;
    let sign = if n % 2 == 1 && flips == 1 { -1.0 } else { 1.0 };
    sign * bessel_j_nonneg(n, x.abs())
}

fn start_index(n: u64, x: f64) -> u64 {
    let top = (n as f64).max(x.ceil());
    let m = top as u64 + 20 + (60.0 * top).sqrt() as u64;
    m + (m % 2)
}

fn bessel_j_nonneg(n: u64, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let m = start_index(n, x);
    let two_over_x = 2.0 / x;

    // Walk k = m, m-1, ..., 1 producing J_{k-1} (unnormalized).
    let mut above = 0.0; // J_{k+1}
    let mut current = 1e-300; // J_k
    let mut norm = 0.0;
    let mut target = if n == m { current } else { 0.0 };
    for k in (1..=m).rev() {
        let below = k as f64 * two_over_x * current - above;
        above = current;
        current = below;
        let idx = k - 1;
        if idx == n {
            target = current;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * current;
        }
        if current.abs() > RESCALE_ABOVE {
            current *= RESCALE_BY;
            above *= RESCALE_BY;
            norm *= RESCALE_BY;
            target *= RESCALE_BY;
        }
    }
    norm += current;
    target / norm
}

/// `[J_d(2t)]^2`: probability of displacement `d` at time `t` for the walk on
/// the infinite line.
pub fn infinite_line_probability(d: i64, t: f64) -> f64 {
    let j = bessel_j(d, 2.0 * t);
    j * j
}

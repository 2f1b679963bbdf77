//! Integer-order Bessel functions of the first kind.
//!
//! Kick matrix elements are `J_m(P)`; values are produced by Miller's
//! downward recurrence normalized with `J_0 + 2 sum J_2k = 1`.

const RESCALE_ABOVE: f64 = 1e250;

fn start_order(max_order: usize, z: f64) -> usize {
    let base = (max_order as f64).max(z.abs());
    let n = base + 30.0 + (40.0 * base).sqrt();
    // Even start keeps the normalization sum aligned.
    2 * ((n as usize + 1) / 2)
}

/// `J_0(z), J_1(z), ..., J_max_order(z)` for real `z`.
pub fn bessel_j_all(max_order: usize, z: f64) -> Vec<f64> {
    let mut out = vec![0.0; max_order + 1];
    if z == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let x = z.abs();
    let start = start_order(max_order, x);

    let mut values = vec![0.0; start + 2];
    let mut next = 0.0; // J_{n+1}
    let mut cur = 1e-300; // J_n
    values[start] = cur;
    for n in (1..=start).rev() {
        let prev = 2.0 * n as f64 / x * cur - next;
        next = cur;
        cur = prev;
        values[n - 1] = cur;
        if cur.abs() > RESCALE_ABOVE {
            for v in values[n - 1..=start].iter_mut() {
                *v /= RESCALE_ABOVE;
            }
            next /= RESCALE_ABOVE;
            cur /= RESCALE_ABOVE;
        }
    }

    let mut norm = values[0];
    for k in (2..=start).step_by(2) {
        norm += 2.0 * values[k];
    }
    for (m, slot) in out.iter_mut().enumerate() {
        let mut v = values[m] / norm;
        if z < 0.0 && m % 2 == 1 {
            v = -v;
        }
        *slot = v;
    }
    out
}

/// `J_m(z)` for any integer order.
#[allow(non_snake_case)]
pub fn bessel_J(m: i64, z: f64) -> f64 {
    let order = m.unsigned_abs() as usize;
    let v = bessel_j_all(order, z)[order];
    if m < 0 && order % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Smallest `b` such that `sum_{|m| > b} J_m(z)^2 < tol`.
pub fn kick_bandwidth(z: f64, tol: f64) -> usize {
    if z == 0.0 {
        return 0;
    }
    let x = z.abs();
    let max_order = (x + 10.0 * x.cbrt() + 30.0).ceil() as usize;
    let j = bessel_j_all(max_order, x);
    let mut tail = 0.0;
    for b in (0..max_order).rev() {
        tail += 2.0 * j[b + 1] * j[b + 1];
        if tail >= tol {
            return b + 1;
        }
    }
    0
}

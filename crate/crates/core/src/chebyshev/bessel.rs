//! Integer-order Bessel functions `J_n(x)` for `n = 0..len` by Miller's
//! backward recurrence, normalized with `J_0 + 2 Σ J_2k = 1`.

/// `J_0(x) ..= J_{len-1}(x)` for `x ≥ 0`.
pub fn bessel_j_seq(x: f64, len: usize) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite(), "bessel argument must be finite and >= 0");
    let mut out = vec![0.0; len];
    if len == 0 {
        return out;
    }
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    // start well beyond both the requested order and the turning point n ≈ x
    let start = {
        let s = (len as f64).max(x) + 40.0 + 12.0 * x.cbrt();
        let s = s.ceil() as usize;
        s + (s & 1)
    };
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    let mut sum = 0.0;
    let two_over_x = 2.0 / x;
    for k in (1..=start).rev() {
        let next = k as f64 * two_over_x * vals[k] - vals[k + 1];
        vals[k - 1] = next;
        if next.abs() > 1e250 {
            // rescale everything computed so far
            for v in vals[k - 1..=start].iter_mut() {
                *v *= 1e-250;
            }
            sum *= 1e-250;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            sum += 2.0 * vals[k - 1];
        }
    }
    sum += vals[0];
    for (o, v) in out.iter_mut().zip(&vals) {
        *o = v / sum;
    }
    out
}

/// Smallest `n` past the turning point such that `|J_k(x)| < eps` for all `k ≥ n`.
pub fn bessel_cutoff(x: f64, eps: f64) -> usize {
    let len = (x + 40.0 + 12.0 * x.cbrt()).ceil() as usize + 1;
    let j = bessel_j_seq(x, len);
    let mut n = len;
    while n > 0 && j[n - 1].abs() < eps {
        n -= 1;
    }
    n.max(1)
}

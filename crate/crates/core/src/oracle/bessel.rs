//! Integer-order Bessel functions of the first kind by Miller's backward
//! recurrence.

/// `J_0(x), ..., J_nmax(x)` for `x >= 0`.
pub fn bessel_j_sequence(x: f64, nmax: usize) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite());
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    // start well above both the order and the argument; even for the sum rule
    let start = nmax.max(x as usize) + 32 + (40.0 * x.max(1.0)).sqrt() as usize;
    let start = start + start % 2;
    let mut jp1 = 0.0f64;
    let mut j = 1e-300f64;
    let mut sum = 0.0f64;
    for k in (1..=start).rev() {
        let jm1 = 2.0 * k as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        // j now holds J_{k-1}
        let n = k - 1;
        if n <= nmax {
            out[n] = j;
        }
        if n % 2 == 0 && n > 0 {
            sum += 2.0 * j;
        }
        if j.abs() > 1e250 {
            let s = 1e-250;
            j *= s;
            jp1 *= s;
            sum *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    let norm = sum + j;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

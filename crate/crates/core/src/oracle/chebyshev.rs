//! Chebyshev expansion of `exp(-i H t)` for Hermitian `H` with known
//! spectral bounds.

use num_complex::Complex64 as C64;

use super::bessel::bessel_j_sequence;

/// Applies `exp(-i H t)` to `psi0`. `apply(x, y)` must write `H x` into `y`;
/// the spectrum of `H` must lie inside `[e_min, e_max]`.
pub fn propagate<F>(apply: F, psi0: &[C64], t: f64, e_min: f64, e_max: f64) -> Vec<C64>
where
    F: Fn(&[C64], &mut [C64]),
{
    let n = psi0.len();
    let a = 0.5 * (e_max - e_min);
    let b = 0.5 * (e_max + e_min);
    if a <= 0.0 || t == 0.0 {
        let ph = C64::new(0.0, -b * t).exp();
        return psi0.iter().map(|z| z * ph).collect();
    }
    let x = a * t.abs();
    let terms = (x + 12.0 * x.cbrt() + 40.0) as usize;
    let bessel = bessel_j_sequence(x, terms);
    let sign = t.signum();

    // scaled operator H~ = (H - b) / a
    let scaled = |src: &[C64], dst: &mut [C64]| {
        apply(src, dst);
        for (d, s) in dst.iter_mut().zip(src) {
            *d = (*d - s * b) / a;
        }
    };

    let mut acc: Vec<C64> = psi0.iter().map(|z| z * bessel[0]).collect();
    let mut prev = psi0.to_vec();
    let mut cur = vec![C64::new(0.0, 0.0); n];
    scaled(&prev, &mut cur);
    let mut next = vec![C64::new(0.0, 0.0); n];
    // (-i)^k with the direction of time folded in
    let mi = C64::new(0.0, -sign);
    let mut phase = mi;
    for k in 1..=terms {
        let c = phase * (2.0 * bessel[k]);
        for (s, v) in acc.iter_mut().zip(&cur) {
            *s += v * c;
        }
        if k == terms || (k as f64 > x && bessel[k].abs() < 1e-18) {
            break;
        }
        scaled(&cur, &mut next);
        for (nx, p) in next.iter_mut().zip(&prev) {
            *nx = *nx * 2.0 - p;
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
        phase *= mi;
    }
    let ph = C64::new(0.0, -b * t).exp();
    acc.iter_mut().for_each(|z| *z *= ph);
    acc
}

use num_complex::Complex64;

use super::matrix::SquareMatrix;

const MAX_ITER_PER_EIGENVALUE: usize = 60;

/// All eigenvalues of a real square matrix, in no particular order.
///
/// Householder reduction to upper Hessenberg form followed by a complex
/// single-shift QR iteration with Wilkinson shifts and deflation.
pub fn eigenvalues(a: &SquareMatrix) -> Vec<Complex64> {
    let n = a.dim();
    let mut h: Vec<Vec<Complex64>> = hessenberg(a)
        .into_iter()
        .map(|row| row.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
        .collect();
    let mut out = Vec::with_capacity(n);
    let mut hi = n;
    let mut iter = 0;
    while hi > 0 {
        let top = hi - 1;
        if top == 0 {
            out.push(h[0][0]);
            break;
        }
        // locate the start of the unreduced block ending at `top`
        let mut lo = top;
        while lo > 0 {
            let scale = h[lo][lo].norm() + h[lo - 1][lo - 1].norm();
            let scale = if scale == 0.0 { 1.0 } else { scale };
            if h[lo][lo - 1].norm() <= f64::EPSILON * scale {
                h[lo][lo - 1] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == top {
            out.push(h[top][top]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > MAX_ITER_PER_EIGENVALUE {
            // give up on this block; diagonal entries are the best estimates
            for i in lo..=top {
                out.push(h[i][i]);
            }
            hi = lo;
            iter = 0;
            continue;
        }
        let shift = if iter % 11 == 10 {
            // exceptional shift to break cycles
            h[top][top] + Complex64::new(h[top][top - 1].norm(), 0.0)
        } else {
            wilkinson_shift(h[top - 1][top - 1], h[top - 1][top], h[top][top - 1], h[top][top])
        };
        qr_step(&mut h, lo, top, shift);
    }
    out
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(a: &SquareMatrix) -> f64 {
    eigenvalues(a).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr_half = (a + d) * 0.5;
    let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn qr_step(h: &mut [Vec<Complex64>], lo: usize, hi: usize, shift: Complex64) {
    for i in lo..=hi {
        h[i][i] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let x = h[k][k];
        let y = h[k + 1][k];
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
        } else {
            (x / r, y / r)
        };
        for j in k..=hi {
            let (h1, h2) = (h[k][j], h[k + 1][j]);
            h[k][j] = c.conj() * h1 + s.conj() * h2;
            h[k + 1][j] = -s * h1 + c * h2;
        }
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = lo + idx;
        let last = (k + 2).min(hi);
        for row in h.iter_mut().take(last + 1).skip(lo) {
            let (h1, h2) = (row[k], row[k + 1]);
            row[k] = h1 * c + h2 * s;
            row[k + 1] = -h1 * s.conj() + h2 * c.conj();
        }
    }
    for i in lo..=hi {
        h[i][i] += shift;
    }
}

/// Householder reduction to upper Hessenberg form (similarity transform).
fn hessenberg(a: &SquareMatrix) -> Vec<Vec<f64>> {
    let n = a.dim();
    let mut h = a.rows();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<f64> = (k + 1..n).map(|i| h[i][k]).collect();
        let alpha = super::matrix::norm(&x);
        if alpha == 0.0 {
            continue;
        }
        let mut v = x;
        let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
        v[0] += sign * alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H <- P H, P = I - 2 v v^T / (v^T v) acting on rows k+1..n
        for j in 0..n {
            let s: f64 = (0..v.len()).map(|i| v[i] * h[k + 1 + i][j]).sum::<f64>() * 2.0 / vnorm2;
            for i in 0..v.len() {
                h[k + 1 + i][j] -= s * v[i];
            }
        }
        // H <- H P on columns k+1..n
        for row in h.iter_mut() {
            let s: f64 = (0..v.len()).map(|i| v[i] * row[k + 1 + i]).sum::<f64>() * 2.0 / vnorm2;
            for i in 0..v.len() {
                row[k + 1 + i] -= s * v[i];
            }
        }
        for row in h.iter_mut().skip(k + 2) {
            row[k] = 0.0;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_moduli(m: &SquareMatrix) -> Vec<f64> {
        let mut v: Vec<f64> = eigenvalues(m).iter().map(|z| z.norm()).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn diagonal() {
        let m = SquareMatrix::diag(&[0.9, -0.1, 0.4]);
        let v = sorted_moduli(&m);
        for (a, b) in v.iter().zip([0.1, 0.4, 0.9]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn rotation_has_unit_complex_pair() {
        let m = SquareMatrix::rotation(1.0).scale(0.5);
        let ev = eigenvalues(&m);
        assert_eq!(ev.len(), 2);
        for z in &ev {
            assert!((z.norm() - 0.5).abs() < 1e-13);
            assert!((z.im.abs() - 0.5 * 1f64.sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn nilpotent_shear() {
        let m = SquareMatrix::from_rows(&[vec![0.5, 3.0], vec![0.0, 0.5]]).unwrap();
        assert!((spectral_radius(&m) - 0.5).abs() < 1e-7);
    }

    #[test]
    fn companion_matrix_roots() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let m = SquareMatrix::from_rows(&[
            vec![6.0, -11.0, 6.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ])
        .unwrap();
        let mut re: Vec<f64> = eigenvalues(&m).iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        for (a, b) in re.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-10, "{re:?}");
        }
    }

    #[test]
    fn trace_and_determinant_preserved() {
        let m = SquareMatrix::from_rows(&[
            vec![0.2, -0.7, 0.1, 0.3],
            vec![0.5, 0.1, -0.4, 0.0],
            vec![-0.3, 0.8, 0.6, 0.2],
            vec![0.1, 0.0, 0.9, -0.5],
        ])
        .unwrap();
        let ev = eigenvalues(&m);
        let sum: Complex64 = ev.iter().sum();
        let prod: Complex64 = ev.iter().product();
        assert!((sum.re - m.trace()).abs() < 1e-12 && sum.im.abs() < 1e-12);
        assert!((prod.re - crate::linalg::determinant(&m)).abs() < 1e-12);
    }
}

//! Hermitian eigendecomposition for small dense complex matrices.
//!
//! Cyclic Jacobi with complex rotations; the state spaces here never exceed
//! dimension 25, where Jacobi is both simple and highly accurate.

use ndarray::Array2;
use num_complex::Complex64;

const MAX_SWEEPS: usize = 64;

pub(crate) struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Column k holds the eigenvector belonging to `values[k]`.
    pub vectors: Array2<Complex64>,
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized
/// first, so tiny non-Hermitian roundoff in the input is harmless.
pub(crate) fn hermitian_eigen(matrix: &Array2<Complex64>) -> HermitianEigen {
    let n = matrix.nrows();
    assert_eq!(
        n,
        matrix.ncols(),
        "eigendecomposition needs a square matrix"
    );

    let mut a = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            a[[i, j]] = 0.5 * (matrix[[i, j]] + matrix[[j, i]].conj());
        }
    }
    let mut v = Array2::<Complex64>::eye(n);

    let scale: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0);
    let stop = (1e-15 * scale).powi(2);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[[p, q]].norm_sqr())
            .sum();
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[i, i]].re.total_cmp(&a[[j, j]].re));

    let values = order.iter().map(|&i| a[[i, i]].re).collect();
    let mut vectors = Array2::<Complex64>::zeros((n, n));
    for (k, &i) in order.iter().enumerate() {
        for r in 0..n {
            vectors[[r, k]] = v[[r, i]];
        }
    }
    HermitianEigen { values, vectors }
}

/// One complex Jacobi rotation annihilating the (p, q) entry.
///
/// The 2x2 Hermitian block [[alpha, g], [conj(g), beta]] is diagonalized by
/// U = diag(1, e^{-i phi}) * G with g = |g| e^{i phi} and G the real Jacobi
/// rotation for [[alpha, |g|], [|g|, beta]].
fn rotate(a: &mut Array2<Complex64>, v: &mut Array2<Complex64>, p: usize, q: usize) {
    let n = a.nrows();
    let g = a[[p, q]];
    let abs_g = g.norm();
    if abs_g == 0.0 {
        return;
    }
    let phase = g / abs_g;
    let alpha = a[[p, p]].re;
    let beta = a[[q, q]].re;

    let tau = (beta - alpha) / (2.0 * abs_g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // column p/q entries of U
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    // A <- U^dagger A U: first the columns, then the rows.
    for r in 0..n {
        let arp = a[[r, p]];
        let arq = a[[r, q]];
        a[[r, p]] = arp * u_pp + arq * u_qp;
        a[[r, q]] = arp * u_pq + arq * u_qq;
    }
    for col in 0..n {
        let apc = a[[p, col]];
        let aqc = a[[q, col]];
        a[[p, col]] = u_pp.conj() * apc + u_qp.conj() * aqc;
        a[[q, col]] = u_pq.conj() * apc + u_qq.conj() * aqc;
    }
    a[[p, q]] = Complex64::new(0.0, 0.0);
    a[[q, p]] = Complex64::new(0.0, 0.0);
    a[[p, p]] = Complex64::new(a[[p, p]].re, 0.0);
    a[[q, q]] = Complex64::new(a[[q, q]].re, 0.0);

    for r in 0..n {
        let vrp = v[[r, p]];
        let vrq = v[[r, q]];
        v[[r, p]] = vrp * u_pp + vrq * u_qp;
        v[[r, q]] = vrp * u_pq + vrq * u_qq;
    }
}

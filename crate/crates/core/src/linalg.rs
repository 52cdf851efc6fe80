//! Dense complex linear algebra for small matrices (dim <= 16).
//!
//! Eigensolves and LU factorizations are delegated to the system LAPACK
//! (ZGEEV, ZHEEV, ZGESV); everything else is plain `ndarray` arithmetic.
//! The matrix exponential follows the eigendecomposition route and falls
//! back to Pade scaling-and-squaring when the eigenvector basis is too
//! ill-conditioned to invert reliably.

use crate::error::{Error, Result};
use crate::C64;
use ndarray::{Array1, Array2};

/// Condition-number threshold above which `expm` abandons the
/// eigendecomposition route and switches to scaling-and-squaring.
pub const EXPM_CONDITION_LIMIT: f64 = 1e8;

extern "C" {
    fn zgeev_(
        jobvl: *const u8,
        jobvr: *const u8,
        n: *const i32,
        a: *mut C64,
        lda: *const i32,
        w: *mut C64,
        vl: *mut C64,
        ldvl: *const i32,
        vr: *mut C64,
        ldvr: *const i32,
        work: *mut C64,
        lwork: *const i32,
        rwork: *mut f64,
        info: *mut i32,
    );
    fn zheev_(
        jobz: *const u8,
        uplo: *const u8,
        n: *const i32,
        a: *mut C64,
        lda: *const i32,
        w: *mut f64,
        work: *mut C64,
        lwork: *const i32,
        rwork: *mut f64,
        info: *mut i32,
    );
    fn zgesv_(
        n: *const i32,
        nrhs: *const i32,
        a: *mut C64,
        lda: *const i32,
        ipiv: *mut i32,
        b: *mut C64,
        ldb: *const i32,
        info: *mut i32,
    );
}

fn to_col_major(a: &Array2<C64>) -> Vec<C64> {
    let (n, m) = a.dim();
    let mut v = Vec::with_capacity(n * m);
    for j in 0..m {
        for i in 0..n {
            v.push(a[[i, j]]);
        }
    }
    v
}

fn from_col_major(v: &[C64], n: usize, m: usize) -> Array2<C64> {
    Array2::from_shape_fn((n, m), |(i, j)| v[j * n + i])
}

/// Eigenvalues and right eigenvectors (as columns) of a general complex matrix.
pub fn eig(a: &Array2<C64>) -> Result<(Array1<C64>, Array2<C64>)> {
    let n = square_dim(a)?;
    let ni = n as i32;
    let mut af = to_col_major(a);
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut vr = vec![C64::new(0.0, 0.0); n * n];
    let mut rwork = vec![0.0f64; 2 * n];
    let mut info = 0i32;
    // workspace query
    let mut wkopt = [C64::new(0.0, 0.0)];
    let query = -1i32;
    unsafe {
        zgeev_(
            b"N".as_ptr(),
            b"V".as_ptr(),
            &ni,
            af.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            std::ptr::null_mut(),
            &1,
            vr.as_mut_ptr(),
            &ni,
            wkopt.as_mut_ptr(),
            &query,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    let lwork = wkopt[0].re.max(1.0) as i32;
    let mut work = vec![C64::new(0.0, 0.0); lwork as usize];
    unsafe {
        zgeev_(
            b"N".as_ptr(),
            b"V".as_ptr(),
            &ni,
            af.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            std::ptr::null_mut(),
            &1,
            vr.as_mut_ptr(),
            &ni,
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zgeev", info });
    }
    Ok((Array1::from_vec(w), from_col_major(&vr, n, n)))
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn eigh(a: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let n = square_dim(a)?;
    let ni = n as i32;
    let mut af = to_col_major(a);
    let mut w = vec![0.0f64; n];
    let mut rwork = vec![0.0f64; (3 * n).max(1)];
    let mut info = 0i32;
    let mut wkopt = [C64::new(0.0, 0.0)];
    let query = -1i32;
    unsafe {
        zheev_(
            b"V".as_ptr(),
            b"L".as_ptr(),
            &ni,
            af.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            wkopt.as_mut_ptr(),
            &query,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    let lwork = wkopt[0].re.max(1.0) as i32;
    let mut work = vec![C64::new(0.0, 0.0); lwork as usize];
    unsafe {
        zheev_(
            b"V".as_ptr(),
            b"L".as_ptr(),
            &ni,
            af.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zheev", info });
    }
    Ok((Array1::from_vec(w), from_col_major(&af, n, n)))
}

/// Solves `a x = b` for one right-hand side by LU with partial pivoting.
pub fn solve(a: &Array2<C64>, b: &Array1<C64>) -> Result<Array1<C64>> {
    let n = square_dim(a)?;
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    let rhs = b
        .view()
        .into_shape((n, 1))
        .expect("vector reshapes to column")
        .to_owned();
    let x = solve_multi(a, &rhs)?;
    Ok(x.column(0).to_owned())
}

/// Solves `a X = B` for a matrix of right-hand sides.
pub fn solve_multi(a: &Array2<C64>, b: &Array2<C64>) -> Result<Array2<C64>> {
    let n = square_dim(a)?;
    if b.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.nrows() });
    }
    let nrhs = b.ncols() as i32;
    let ni = n as i32;
    let mut af = to_col_major(a);
    let mut bf = to_col_major(b);
    let mut ipiv = vec![0i32; n];
    let mut info = 0i32;
    unsafe {
        zgesv_(
            &ni,
            &nrhs,
            af.as_mut_ptr(),
            &ni,
            ipiv.as_mut_ptr(),
            bf.as_mut_ptr(),
            &ni,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zgesv", info });
    }
    Ok(from_col_major(&bf, n, b.ncols()))
}

/// Matrix inverse via LU.
pub fn inv(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = square_dim(a)?;
    solve_multi(a, &identity(n))
}

/// Complex identity matrix.
pub fn identity(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, C64::new(1.0, 0.0))
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = a[[i, j]] * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Conjugate transpose.
pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

/// Trace of a square matrix.
pub fn trace(a: &Array2<C64>) -> C64 {
    a.diag().sum()
}

/// Maximum column sum of absolute values (induced 1-norm).
pub fn norm_1(a: &Array2<C64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..a.ncols() {
        let s: f64 = a.column(j).iter().map(|z| z.norm()).sum();
        best = best.max(s);
    }
    best
}

/// Largest entry magnitude.
pub fn norm_max(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Matrix exponential `e^a`.
///
/// Diagonalizes `a` and exponentiates the spectrum; if the eigenvector
/// basis has 1-norm condition number above [`EXPM_CONDITION_LIMIT`] (close
/// to defective), switches to Pade scaling-and-squaring.
pub fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    let _ = square_dim(a)?;
    if let Ok((w, v)) = eig(a) {
        if let Ok(v_inv) = inv(&v) {
            let cond = norm_1(&v) * norm_1(&v_inv);
            if cond < EXPM_CONDITION_LIMIT {
                let mut scaled = v.clone();
                for (j, lam) in w.iter().enumerate() {
                    let e = lam.exp();
                    scaled.column_mut(j).mapv_inplace(|z| z * e);
                }
                return Ok(scaled.dot(&v_inv));
            }
        }
    }
    Ok(expm_pade(a))
}

/// Pade 13 scaling-and-squaring exponential; always applicable.
fn expm_pade(a: &Array2<C64>) -> Array2<C64> {
    const THETA_13: f64 = 5.371920351148152;
    let n = a.nrows();
    let norm = norm_1(a);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let a1 = a.mapv(|z| z / C64::new(2f64.powi(s), 0.0));

    let b: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let a2 = a1.dot(&a1);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let id = identity(n);
    let w1 = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let w2 = &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1];
    let u = a1.dot(&(a6.dot(&w1) + &w2));
    let z1 = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = a6.dot(&z1) + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];

    let num = &v + &u;
    let den = &v - &u;
    let mut f = solve_multi(&den, &num).expect("Pade denominator is nonsingular");
    for _ in 0..s {
        f = f.dot(&f);
    }
    f
}

fn square_dim(a: &Array2<C64>) -> Result<usize> {
    let (n, m) = a.dim();
    if n != m {
        return Err(Error::DimensionMismatch { expected: n, got: m });
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eig_companion_matrix() {
        let a = ndarray::array![[c(0.0, 0.0), c(1.0, 0.0)], [c(-2.0, 0.0), c(-3.0, 0.0)]];
        let (w, v) = eig(&a).unwrap();
        let mut re: Vec<f64> = w.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert_relative_eq!(re[0], -2.0, max_relative = 1e-12);
        assert_relative_eq!(re[1], -1.0, max_relative = 1e-12);
        // residual A v = w v for each pair
        for j in 0..2 {
            let col = v.column(j).to_owned();
            let r = a.dot(&col) - col.mapv(|z| z * w[j]);
            assert!(r.iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn eigh_pauli_y_like() {
        let h = ndarray::array![[c(2.0, 0.0), c(0.0, 1.0)], [c(0.0, -1.0), c(2.0, 0.0)]];
        let (w, v) = eigh(&h).unwrap();
        assert_relative_eq!(w[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(w[1], 3.0, epsilon = 1e-12);
        for j in 0..2 {
            let col = v.column(j).to_owned();
            let r = h.dot(&col) - col.mapv(|z| z * w[j]);
            assert!(r.iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn solve_small_system() {
        let a = ndarray::array![[c(0.0, 0.0), c(1.0, 0.0)], [c(-2.0, 0.0), c(-3.0, 0.0)]];
        let b = ndarray::array![c(1.0, 0.0), c(0.0, 0.0)];
        let x = solve(&a, &b).unwrap();
        assert_relative_eq!(x[0].re, -1.5, epsilon = 1e-14);
        assert_relative_eq!(x[1].re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn expm_diagonalizable_matches_series() {
        let a = ndarray::array![[c(0.1, 0.2), c(0.3, 0.0)], [c(0.0, -0.1), c(-0.2, 0.0)]];
        let e = expm(&a).unwrap();
        // truncated Taylor series reference
        let mut term = identity(2);
        let mut sum = identity(2);
        for k in 1..30 {
            term = term.dot(&a) / c(k as f64, 0.0);
            sum = sum + &term;
        }
        assert!(norm_max(&(&e - &sum)) < 1e-13);
    }

    #[test]
    fn expm_defective_jordan_block() {
        // nilpotent Jordan block: eigendecomposition is singular, Pade path taken
        let a = ndarray::array![[c(0.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
        let e = expm(&a).unwrap();
        assert_relative_eq!(e[[0, 0]].re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(e[[0, 1]].re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(e[[1, 1]].re, 1.0, epsilon = 1e-14);
        assert!(e[[1, 0]].norm() < 1e-14);
    }

    #[test]
    fn expm_large_norm_uses_scaling() {
        let a = ndarray::array![[c(-40.0, 0.0), c(35.0, 0.0)], [c(0.0, 0.0), c(-10.0, 0.0)]];
        let e = expm(&a).unwrap();
        // closed form for upper-triangular 2x2 with distinct eigenvalues
        let e00 = (-40.0f64).exp();
        let e11 = (-10.0f64).exp();
        let e01 = 35.0 * (e00 - e11) / (-40.0 + 10.0);
        assert_relative_eq!(e[[0, 0]].re, e00, max_relative = 1e-10);
        assert_relative_eq!(e[[0, 1]].re, e01, max_relative = 1e-10);
        assert_relative_eq!(e[[1, 1]].re, e11, max_relative = 1e-10);
    }

    #[test]
    fn kron_dimensions_and_values() {
        let a = ndarray::array![[c(1.0, 0.0), c(2.0, 0.0)], [c(3.0, 0.0), c(4.0, 0.0)]];
        let b = identity(2);
        let k = kron(&a, &b);
        assert_eq!(k.dim(), (4, 4));
        assert_eq!(k[[0, 0]], c(1.0, 0.0));
        assert_eq!(k[[1, 3]], c(2.0, 0.0));
        assert_eq!(k[[2, 0]], c(3.0, 0.0));
        assert_eq!(k[[3, 3]], c(4.0, 0.0));
    }
}

//! Dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::scalar::Real;

/// Singular values of `m`, descending.
pub fn singular_values<T: Real>(m: &DMatrix<T>) -> Vec<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<T> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Numerical rank: singular values above `rel_tol * σ_max` (and above an
/// absolute floor of `abs_floor`) are counted.
pub fn rank_with<T: Real>(m: &DMatrix<T>, rel_tol: T, abs_floor: T) -> usize {
    let sv = singular_values(m);
    let Some(&largest) = sv.first() else {
        return 0;
    };
    if largest <= abs_floor {
        return 0;
    }
    let cut = largest * rel_tol;
    sv.iter().filter(|&&s| s > cut && s > abs_floor).count()
}

pub fn rank<T: Real>(m: &DMatrix<T>, rel_tol: T) -> usize {
    rank_with(m, rel_tol, T::tol(1e-300))
}

/// Thin singular value decomposition `M = U diag(σ) Vᵀ`, `σ` descending.
#[derive(Debug, Clone)]
pub struct Svd<T: Real> {
    pub u: DMatrix<T>,
    pub singular_values: Vec<T>,
    pub v: DMatrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn recompose(&self) -> DMatrix<T> {
        let mut us = self.u.clone();
        for (j, &s) in self.singular_values.iter().enumerate() {
            us.column_mut(j).scale_mut(s);
        }
        us * self.v.transpose()
    }

    /// Minimum-norm least-squares solution of `M X = B`, ignoring singular
    /// values at or below `eps`.
    pub fn solve(&self, b: &DMatrix<T>, eps: T) -> DMatrix<T> {
        let mut utb = self.u.transpose() * b;
        for (i, &s) in self.singular_values.iter().enumerate() {
            let scale = if s > eps { T::one() / s } else { T::zero() };
            utb.row_mut(i).scale_mut(scale);
        }
        &self.v * utb
    }

    /// Largest deviation from an exact, orthonormal factorization of `m`.
    fn defect(&self, m: &DMatrix<T>) -> T {
        let p = self.singular_values.len();
        let eye = DMatrix::<T>::identity(p, p);
        let scale = self.singular_values.first().copied().unwrap_or(T::zero()).max(T::one());
        let rec = max_abs(&(self.recompose() - m)) / scale;
        rec.max(max_abs(&(self.u.transpose() * &self.u - &eye)))
            .max(max_abs(&(self.v.transpose() * &self.v - &eye)))
    }
}

fn raw_svd<T: Real>(m: &DMatrix<T>) -> Svd<T> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v = svd.v_t.expect("requested V^T").transpose();
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Svd {
        u: DMatrix::from_columns(&order.iter().map(|&i| u.column(i).into_owned()).collect::<Vec<_>>()),
        singular_values: order.iter().map(|&i| svd.singular_values[i]).collect(),
        v: DMatrix::from_columns(&order.iter().map(|&i| v.column(i).into_owned()).collect::<Vec<_>>()),
    }
}

/// One-sided Jacobi SVD for `rows >= cols`: orthogonalizes the columns of
/// `M V` by plane rotations, then reads `σ` off the column norms.
fn jacobi_svd<T: Real>(m: &DMatrix<T>) -> Svd<T> {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = DMatrix::<T>::identity(cols, cols);
    let eps = T::default_epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dot(&a.column(q));
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for mat in [&mut a, &mut v] {
                    for i in 0..mat.nrows() {
                        let (x, y) = (mat[(i, p)], mat[(i, q)]);
                        mat[(i, p)] = c * x - s * y;
                        mat[(i, q)] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<T> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap_or(std::cmp::Ordering::Equal));
    let largest = order.first().map(|&j| norms[j]).unwrap_or(T::zero());
    let floor = largest * eps * T::lit(rows.max(cols) as f64);

    let mut u = DMatrix::<T>::zeros(rows, cols);
    let mut filled: Vec<DVector<T>> = Vec::new();
    for (j, &src) in order.iter().enumerate() {
        if norms[src] > floor && norms[src] > T::zero() {
            let col = a.column(src) / norms[src];
            u.set_column(j, &col);
            filled.push(col);
        }
    }
    // Left vectors for zero singular values: complete to an orthonormal set.
    let mut e = 0;
    for j in filled.len()..cols {
        loop {
            let mut cand = DVector::<T>::zeros(rows);
            cand[e % rows] = T::one();
            e += 1;
            for f in &filled {
                let proj = f.dot(&cand);
                cand -= f * proj;
            }
            let n = cand.norm();
            if n > T::lit(1e-3) {
                let col = cand / n;
                u.set_column(j, &col);
                filled.push(col);
                break;
            }
        }
    }
    Svd {
        u,
        singular_values: order.iter().map(|&j| if norms[j] > floor { norms[j] } else { T::zero() }).collect(),
        v: DMatrix::from_columns(&order.iter().map(|&j| v.column(j).into_owned()).collect::<Vec<_>>()),
    }
}

/// Singular value decomposition with a correctness check.
///
/// nalgebra's implicit-shift SVD occasionally returns singular vectors
/// that do not reproduce the input (seen on rank-deficient matrices). Each
/// result is checked; on failure the transpose is tried, then a one-sided
/// Jacobi decomposition.
pub fn svd<T: Real>(m: &DMatrix<T>) -> Svd<T> {
    let tol = T::default_epsilon() * T::lit(1e4) * T::lit(m.nrows().max(m.ncols()).max(1) as f64);
    let direct = raw_svd(m);
    if direct.defect(m) <= tol {
        return direct;
    }
    let t = raw_svd(&m.transpose());
    let swapped = Svd { u: t.v, singular_values: t.singular_values, v: t.u };
    if swapped.defect(m) <= tol {
        return swapped;
    }
    if m.nrows() >= m.ncols() {
        jacobi_svd(m)
    } else {
        let t = jacobi_svd(&m.transpose());
        Svd { u: t.v, singular_values: t.singular_values, v: t.u }
    }
}

/// Orthonormal basis (as columns) of the right nullspace of `m`.
pub fn nullspace<T: Real>(m: &DMatrix<T>, rel_tol: T) -> DMatrix<T> {
    let cols = m.ncols();
    // Pad to at least square so the SVD exposes every right singular vector.
    let padded = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = svd(&padded);
    let largest = svd.singular_values.first().copied().unwrap_or(T::zero());
    let cut = largest * rel_tol;
    let null: Vec<DVector<T>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| largest == T::zero() || s <= cut)
        .map(|(i, _)| svd.v.column(i).into_owned())
        .collect();
    if null.is_empty() {
        DMatrix::zeros(cols, 0)
    } else {
        DMatrix::from_columns(&null)
    }
}

/// Orthogonal `Q` (reflections allowed) maximising `tr(Q H)` for
/// `H = Σ a_i b_iᵀ`, i.e. the best map `a_i ↦ b_i`. Returns both branches:
/// the optimum and the one with the weakest singular direction reflected.
pub fn procrustes_branches<T: Real>(h: &DMatrix<T>) -> [DMatrix<T>; 2] {
    let m = h.nrows();
    let svd = svd(h);
    let best = &svd.v * svd.u.transpose();
    let mut flip = DMatrix::<T>::identity(m, m);
    flip[(m - 1, m - 1)] = -T::one();
    let other = &svd.v * flip * svd.u.transpose();
    [best, other]
}

/// Upper-triangular `U` with positive diagonal and `UᵀU = S`, if `S` is
/// symmetric positive definite.
pub fn upper_cholesky<T: Real>(s: &DMatrix<T>) -> Option<DMatrix<T>> {
    let sym = (s + s.transpose()) * T::lit(0.5);
    let chol = sym.cholesky()?;
    Some(chol.l().transpose())
}

/// QR-style factorisation `M = Q U` with `Q` orthogonal and `U` upper
/// triangular with non-negative diagonal. `M` may be tall (`U` is then
/// the leading square block of the triangular factor).
pub fn orthogonal_upper<T: Real>(m: &DMatrix<T>) -> (DMatrix<T>, DMatrix<T>) {
    let rows = m.nrows();
    let cols = m.ncols();
    let qr = m.clone().qr();
    // Full orthogonal factor: complete Householder reflections onto identity.
    let q_full = qr.q().clone();
    let mut q = DMatrix::<T>::zeros(rows, rows);
    q.view_mut((0, 0), (rows, q_full.ncols())).copy_from(&q_full);
    if q_full.ncols() < rows {
        // Complete the basis with Gram–Schmidt against the identity.
        let mut filled = q_full.ncols();
        for e in 0..rows {
            if filled == rows {
                break;
            }
            let mut v = DVector::<T>::zeros(rows);
            v[e] = T::one();
            for j in 0..filled {
                let col = q.column(j).into_owned();
                let proj = col.dot(&v);
                v -= col * proj;
            }
            let n = v.norm();
            if n > T::lit(1e-6) {
                q.set_column(filled, &(v / n));
                filled += 1;
            }
        }
    }
    let mut u = q.transpose() * m;
    // Fix signs so the diagonal is non-negative.
    for i in 0..rows.min(cols) {
        if u[(i, i)] < T::zero() {
            for j in 0..cols {
                u[(i, j)] = -u[(i, j)];
            }
            for r in 0..rows {
                q[(r, i)] = -q[(r, i)];
            }
        }
    }
    // Clean roundoff below the diagonal.
    for i in 0..rows {
        for j in 0..cols.min(i) {
            u[(i, j)] = T::zero();
        }
    }
    (q, u)
}

/// Least-squares solution of `A x = b` via SVD (minimum norm when rank deficient).
pub fn lstsq<T: Real>(a: &DMatrix<T>, b: &DVector<T>, rel_tol: T) -> DVector<T> {
    let svd = svd(a);
    let eps = svd.singular_values.first().copied().unwrap_or(T::zero()) * rel_tol;
    let b = DMatrix::from_column_slice(b.len(), 1, b.as_slice());
    svd.solve(&b, eps).column(0).into_owned()
}

pub fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

/// Outcome of a Levenberg–Marquardt run.
#[derive(Debug, Clone)]
pub struct LmReport<T: Real> {
    pub x: DVector<T>,
    /// Largest absolute residual at `x`.
    pub max_residual: T,
    pub iterations: usize,
}

/// Minimises `½‖r(x)‖²` with a damped Gauss–Newton iteration.
///
/// `eval` returns the residual vector and its Jacobian at `x`.
pub fn levenberg_marquardt<T, F>(mut eval: F, x0: DVector<T>, max_iter: usize, target: T) -> LmReport<T>
where
    T: Real,
    F: FnMut(&DVector<T>) -> (DVector<T>, DMatrix<T>),
{
    let mut x = x0;
    let (mut r, mut j) = eval(&x);
    let mut cost = r.norm_squared();
    let mut lambda = T::lit(1e-3);
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        if r.amax() <= target {
            break;
        }
        let jt = j.transpose();
        let jtj = &jt * &j;
        let g = &jt * &r;
        let mut improved = false;
        for _ in 0..12 {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                a[(i, i)] += lambda * (T::one() + jtj[(i, i)]);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                lambda *= T::lit(10.0);
                continue;
            };
            let candidate = &x + &step;
            let (rc, jc) = eval(&candidate);
            let cc = rc.norm_squared();
            if cc.is_finite() && cc < cost {
                x = candidate;
                r = rc;
                j = jc;
                cost = cc;
                lambda = (lambda * T::lit(0.3)).max(T::lit(1e-12));
                improved = true;
                break;
            }
            lambda *= T::lit(10.0);
        }
        if !improved {
            break;
        }
    }
    LmReport {
        max_residual: r.amax(),
        x,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_svd_handles_rank_deficient_input() {
        for (rows, cols, rank) in [(7, 5, 2), (6, 6, 3), (4, 4, 1), (5, 3, 3)] {
            let a = DMatrix::from_fn(rows, rank, |i, j| ((i * 5 + j * 11 + 2) as f64).sin());
            let b = DMatrix::from_fn(rank, cols, |i, j| ((i * 3 + j * 13 + 1) as f64).cos());
            let mut m = a * b;
            m.row_mut(0).fill(0.0);
            let s = jacobi_svd(&m);
            assert!(max_abs(&(s.recompose() - &m)) < 1e-13);
            assert!(max_abs(&(s.u.transpose() * &s.u - DMatrix::identity(cols, cols))) < 1e-13);
            assert!(max_abs(&(s.v.transpose() * &s.v - DMatrix::identity(cols, cols))) < 1e-13);
            assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
            assert!(s.singular_values[rank.min(rows - 1)..].iter().all(|&x| x < 1e-12));
        }
    }

    #[test]
    fn jacobi_matches_a_known_spectrum() {
        let m = DMatrix::from_row_slice(3, 2, &[3.0, 0.0, 0.0, -2.0, 0.0, 0.0]);
        let s = jacobi_svd(&m);
        assert_eq!(s.singular_values, vec![3.0, 2.0]);
        assert!(max_abs(&(s.recompose() - &m)) < 1e-15);
    }
    use approx::assert_abs_diff_eq;

    #[test]
    fn rank_of_collinear_rows() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 2.0, 2.0, -1.0, -1.0]);
        assert_eq!(rank(&m, 1e-10), 1);
        let n = nullspace(&m, 1e-10);
        assert_eq!(n.ncols(), 1);
        assert_abs_diff_eq!((&m * &n).amax(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn upper_cholesky_round_trip() {
        let t = DMatrix::from_row_slice(3, 3, &[1.2, 0.3, -0.4, 0.0, 0.8, 0.5, 0.0, 0.0, 1.1]);
        let s = t.transpose() * &t;
        let u = upper_cholesky(&s).unwrap();
        assert_abs_diff_eq!((u - t).amax(), 0.0, epsilon = 1e-12);
        let not_pd = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(upper_cholesky(&not_pd).is_none());
    }

    #[test]
    fn orthogonal_upper_factorises_tall_matrix() {
        let m = DMatrix::from_row_slice(3, 2, &[0.3, 1.0, -0.7, 0.2, 0.5, 0.9]);
        let (q, u) = orthogonal_upper(&m);
        assert_abs_diff_eq!((q.transpose() * &q - DMatrix::identity(3, 3)).amax(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((&q * &u - &m).amax(), 0.0, epsilon = 1e-12);
        assert_eq!(u[(1, 0)], 0.0);
        assert_eq!(u[(2, 1)], 0.0);
        assert!(u[(0, 0)] >= 0.0 && u[(1, 1)] >= 0.0);
    }

    #[test]
    fn procrustes_recovers_rotation() {
        let angle: f64 = 0.7;
        let rot = DMatrix::from_row_slice(2, 2, &[angle.cos(), -angle.sin(), angle.sin(), angle.cos()]);
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, -1.0, 0.5, 2.0, 0.3]);
        let b = &rot * &a;
        let h = &a * b.transpose();
        let [q, _] = procrustes_branches(&h);
        assert_abs_diff_eq!((q - rot).amax(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn lm_solves_small_system() {
        // x² + y² = 2, x - y = 0 → (1, 1) from a positive start.
        let report = levenberg_marquardt(
            |x: &DVector<f64>| {
                let r = DVector::from_vec(vec![x[0] * x[0] + x[1] * x[1] - 2.0, x[0] - x[1]]);
                let j = DMatrix::from_row_slice(2, 2, &[2.0 * x[0], 2.0 * x[1], 1.0, -1.0]);
                (r, j)
            },
            DVector::from_vec(vec![2.0, 0.5]),
            100,
            1e-14,
        );
        assert!(report.max_residual < 1e-12);
        assert_abs_diff_eq!(report.x[0], 1.0, epsilon = 1e-9);
    }
}

//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection, with
//! eigenvectors from inverse iteration.

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// Off-diagonal, `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty(), "empty matrix");
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length must be n - 1");
        SymTridiagonal { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x`.
    ///
    /// Counts negative pivots of the LDLᵀ factorization of `T - x I`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let pivmin = self.pivot_floor();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.dim() {
            let e = self.off[i - 1];
            q = self.diag[i] - x - e * e / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn pivot_floor(&self) -> f64 {
        let emax = self.off.iter().fold(1.0f64, |acc, e| acc.max(e * e));
        f64::MIN_POSITIVE * emax
    }

    /// Gershgorin interval enclosing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        let pad = f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) * n as f64;
        (lo - pad, hi + pad)
    }

    /// The `index`-th smallest eigenvalue (0-based), bisected until the
    /// bracket cannot shrink further.
    pub fn eigenvalue(&self, index: usize) -> f64 {
        assert!(index < self.dim(), "eigenvalue index out of range");
        let (lo, hi) = self.gershgorin();
        self.bisect(index, lo, hi)
    }

    fn bisect(&self, index: usize, mut lo: f64, mut hi: f64) -> f64 {
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return mid;
            }
            if self.sturm_count(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    /// The `k` smallest eigenvalues in ascending order.
    pub fn lowest(&self, k: usize) -> Vec<f64> {
        assert!(k <= self.dim(), "requested more eigenvalues than the dimension");
        let (mut lo, hi) = self.gershgorin();
        let mut out = Vec::with_capacity(k);
        for i in 0..k {
            let ev = self.bisect(i, lo, hi);
            out.push(ev);
            // the next eigenvalue is not below this one
            lo = lo.max(ev - f64::EPSILON * ev.abs());
        }
        out
    }

    /// Unit eigenvector for an (accurately known) eigenvalue by inverse
    /// iteration.
    pub fn eigenvector(&self, eigenvalue: f64) -> Vec<f64> {
        let n = self.dim();
        let scale = self.gershgorin().1.abs().max(eigenvalue.abs()).max(1.0);
        let shift = eigenvalue + 4.0 * f64::EPSILON * scale;
        let lu = ShiftedLu::factor(self, shift);
        // deterministic start vector with no special symmetry
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 97) as f64 / 97.0).collect();
        for _ in 0..4 {
            lu.solve(&mut v);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                break;
            }
            v.iter_mut().for_each(|x| *x /= norm);
        }
        // fix the overall sign: first significant entry positive
        let vmax = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * vmax) {
            if *first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        v
    }
}

/// Sign changes of a sampled function, ignoring entries below
/// `rel_floor · max|v|`.
pub fn count_sign_changes(values: &[f64], rel_floor: f64) -> usize {
    let vmax = values.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let floor = rel_floor * vmax;
    let mut last = 0.0f64;
    let mut changes = 0;
    for &x in values {
        if x.abs() <= floor {
            continue;
        }
        if last != 0.0 && (x > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = x;
    }
    changes
}

/// LU factorization with partial pivoting of `T - shift I`.
struct ShiftedLu {
    d: Vec<f64>,
    dl: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &SymTridiagonal, shift: f64) -> Self {
        let n = t.dim();
        let mut d: Vec<f64> = t.diag.iter().map(|x| x - shift).collect();
        let mut dl = t.off.clone();
        let mut du = t.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let tiny = f64::EPSILON * t.gershgorin().1.abs().max(1.0);
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        ShiftedLu {
            d,
            dl,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // tridiag(-1, 2, -1) of size n: eigenvalues 2 - 2cos(kπ/(n+1))
    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn discrete_laplacian_spectrum() {
        let n = 50;
        let t = laplacian(n);
        let evs = t.lowest(n);
        for (k, ev) in evs.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / (n + 1) as f64).cos();
            assert!((ev - exact).abs() < 1e-13, "k={k}: {ev} vs {exact}");
        }
    }

    #[test]
    fn sturm_count_matches_spectrum() {
        let t = laplacian(20);
        assert_eq!(t.sturm_count(-1.0), 0);
        assert_eq!(t.sturm_count(5.0), 20);
        assert_eq!(t.sturm_count(2.0 + 1e-9), 10);
    }

    #[test]
    fn eigenvectors_have_sturm_nodes() {
        let t = laplacian(200);
        for k in 0..6 {
            let ev = t.eigenvalue(k);
            let v = t.eigenvector(ev);
            assert_eq!(count_sign_changes(&v, 1e-10), k);
            // residual of T v - λ v
            let n = t.dim();
            let mut res = 0.0f64;
            for i in 0..n {
                let mut tv = t.diag[i] * v[i];
                if i > 0 {
                    tv += t.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    tv += t.off[i] * v[i + 1];
                }
                res = res.max((tv - ev * v[i]).abs());
            }
            assert!(res < 1e-10, "residual {res}");
        }
    }

    #[test]
    fn zero_diagonal_jacobi_matrix_is_symmetric_in_spectrum() {
        let t = SymTridiagonal::new(vec![0.0; 5], vec![1.0, 2.0, 3.0, 4.0]);
        let evs = t.lowest(5);
        for i in 0..5 {
            assert!((evs[i] + evs[4 - i]).abs() < 1e-13);
        }
        assert!(evs[2].abs() < 1e-13);
    }

    #[test]
    fn sign_changes_skip_small_entries() {
        assert_eq!(count_sign_changes(&[1.0, 1e-20, -1e-20, 2.0, -1.0], 1e-10), 1);
        assert_eq!(count_sign_changes(&[0.0, 0.0], 1e-10), 0);
    }
}

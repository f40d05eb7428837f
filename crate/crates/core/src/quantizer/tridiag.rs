//! Symmetric-definite tridiagonal pencils `K x = lambda C x`.
//!
//! Eigenvalues come from Sturm-count bisection on the LDL^T inertia of
//! `K - sigma C`; eigenvectors from inverse iteration with a partially
//! pivoted tridiagonal LU. Work is O(n) per count and per solve.

use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct TridiagPencil {
    pub k_diag: Vec<f64>,
    pub k_off: Vec<f64>,
    pub c_diag: Vec<f64>,
    pub c_off: Vec<f64>,
}

impl TridiagPencil {
    pub fn len(&self) -> usize {
        self.k_diag.len()
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let n = self.len();
        let pivmin = f64::MIN_POSITIVE.sqrt();
        // Tiny pivots are pushed to -pivmin before counting, as in LAPACK dstebz.
        let guard = |p: f64| if p.abs() < pivmin { -pivmin } else { p };
        let mut p = guard(self.k_diag[0] - sigma * self.c_diag[0]);
        let mut count = usize::from(p < 0.0);
        for i in 1..n {
            let e = self.k_off[i - 1] - sigma * self.c_off[i - 1];
            p = guard((self.k_diag[i] - sigma * self.c_diag[i]) - e * e / p);
            if p < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin lower bound on the spectrum of `C`; `None` when it is not
    /// strictly positive.
    pub fn c_lower_bound(&self) -> Option<f64> {
        let n = self.len();
        let bound = (0..n)
            .map(|i| {
                let left = if i > 0 { self.c_off[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.c_off[i].abs() } else { 0.0 };
                self.c_diag[i] - left - right
            })
            .fold(f64::INFINITY, f64::min);
        (bound > 0.0).then_some(bound)
    }

    fn k_norm_inf(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.k_off[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.k_off[i].abs() } else { 0.0 };
                self.k_diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Option<Vec<f64>> {
        let n = self.len();
        let c_min = self.c_lower_bound()?;
        let mut hi = self.k_norm_inf() / c_min * (1.0 + 1e-12) + f64::MIN_POSITIVE;
        while self.count_below(hi) < n {
            hi *= 2.0;
        }
        let mut lo = -hi * 1e-12;
        while self.count_below(lo) > 0 {
            lo *= 2.0;
        }
        let floor = hi * 1e-20;
        Some(
            (0..n)
                .into_par_iter()
                .map(|k| self.bisect(k, lo, hi, floor))
                .collect(),
        )
    }

    fn bisect(&self, k: usize, mut lo: f64, mut hi: f64, floor: f64) -> f64 {
        // Invariant: count_below(lo) <= k < count_below(hi).
        loop {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= (4.0 * f64::EPSILON * lo.abs().max(hi.abs())).max(floor)
                || mid <= lo
                || mid >= hi
            {
                return mid;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    /// Inverse-iteration eigenvector for the (accurate) eigenvalue `lambda`.
    pub fn eigenvector(&self, lambda: f64, seed: usize) -> Vec<f64> {
        let n = self.len();
        let lu = ShiftedLu::factor(self, lambda);
        // Deterministic, non-degenerate start vector.
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * (((i * 7919 + seed * 104_729) % 1013) as f64 / 1013.0))
            .collect();
        for _ in 0..3 {
            lu.solve(&mut x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm > 0.0 && norm.is_finite()) {
                break;
            }
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }

    /// `C x` for the pencil's capacitance band.
    pub fn c_mul(&self, x: &[f64]) -> Vec<f64> {
        band_mul(&self.c_diag, &self.c_off, x)
    }
}

pub fn band_mul(diag: &[f64], off: &[f64], x: &[f64]) -> Vec<f64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut v = diag[i] * x[i];
            if i > 0 {
                v += off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += off[i] * x[i + 1];
            }
            v
        })
        .collect()
}

/// LU of the tridiagonal `K - lambda C` with partial pivoting (LAPACK gttrf layout).
struct ShiftedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    ipiv: Vec<bool>,
}

impl ShiftedLu {
    fn factor(p: &TridiagPencil, lambda: f64) -> Self {
        let n = p.len();
        let mut d: Vec<f64> = (0..n).map(|i| p.k_diag[i] - lambda * p.c_diag[i]).collect();
        let off: Vec<f64> = (0..n.saturating_sub(1))
            .map(|i| p.k_off[i] - lambda * p.c_off[i])
            .collect();
        let mut dl = off.clone();
        let mut du = off;
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut ipiv = vec![false; n];
        let scale = d.iter().chain(du.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
        let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i].abs() < tiny {
                    d[i] = tiny;
                }
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let t = du[i];
                du[i] = d[i + 1];
                d[i + 1] = t - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du[i + 1];
                }
                ipiv[i] = true;
            }
        }
        if let Some(last) = d.last_mut() {
            if last.abs() < tiny {
                *last = tiny;
            }
        }
        Self { dl, d, du, du2, ipiv }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.ipiv[i] {
                let t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - self.dl[i] * b[i];
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

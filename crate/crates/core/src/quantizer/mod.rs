//! Circuit quantization: capacitance and inverse-inductance matrices, normal
//! modes, and reduction of one mode to an effective LC oscillator.
//!
//! The quadratic Lagrangian `L = 1/2 phi'^T C phi' - 1/2 phi^T L^-1 phi` is
//! assembled node by node from the circuit branches, and the modes solve the
//! symmetric-definite pencil `L^-1 psi = omega^2 C psi`.

mod tridiag;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{Architecture, Environment, ModifiedBjpa};

pub use tridiag::TridiagPencil;

/// Eigenvalues at or below this fraction of the largest one are rigid
/// (zero-frequency) modes.
pub const ZERO_MODE_REL: f64 = 1e-12;

/// Chains longer than this use the O(n^2) tridiagonal path.
pub const BANDED_THRESHOLD: usize = 48;

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitMatrices {
    pub cap: DMatrix<f64>,
    pub inv_ind: DMatrix<f64>,
    pub node_labels: Vec<String>,
}

impl CircuitMatrices {
    fn zeros(labels: Vec<String>) -> Self {
        let n = labels.len();
        Self {
            cap: DMatrix::zeros(n, n),
            inv_ind: DMatrix::zeros(n, n),
            node_labels: labels,
        }
    }

    pub fn node_count(&self) -> usize {
        self.cap.nrows()
    }

    fn ground_cap(&mut self, i: usize, c: f64) {
        self.cap[(i, i)] += c;
    }

    fn branch_cap(&mut self, i: usize, j: usize, c: f64) {
        self.cap[(i, i)] += c;
        self.cap[(j, j)] += c;
        self.cap[(i, j)] -= c;
        self.cap[(j, i)] -= c;
    }

    fn branch_ind(&mut self, i: usize, j: usize, inv_l: f64) {
        self.inv_ind[(i, i)] += inv_l;
        self.inv_ind[(j, j)] += inv_l;
        self.inv_ind[(i, j)] -= inv_l;
        self.inv_ind[(j, i)] -= inv_l;
    }

    /// Both matrices tridiagonal?
    pub fn is_tridiagonal(&self) -> bool {
        let n = self.node_count();
        (0..n).all(|i| {
            (0..n)
                .filter(|&j| j + 1 < i || j > i + 1)
                .all(|j| self.cap[(i, j)] == 0.0 && self.inv_ind[(i, j)] == 0.0)
        })
    }

    fn pencil(&self) -> TridiagPencil {
        let n = self.node_count();
        TridiagPencil {
            k_diag: (0..n).map(|i| self.inv_ind[(i, i)]).collect(),
            k_off: (1..n).map(|i| self.inv_ind[(i, i - 1)]).collect(),
            c_diag: (0..n).map(|i| self.cap[(i, i)]).collect(),
            c_off: (1..n).map(|i| self.cap[(i, i - 1)]).collect(),
        }
    }

    /// Max absolute column sum of the inverse-inductance matrix.
    pub fn inv_ind_norm(&self) -> f64 {
        column_norm(&self.inv_ind)
    }

    fn sparse_mul(m: &DMatrix<f64>, rows: &[Vec<(usize, f64)>], x: &DVector<f64>) -> DVector<f64> {
        debug_assert_eq!(m.nrows(), rows.len());
        DVector::from_iterator(
            rows.len(),
            rows.iter()
                .map(|r| r.iter().map(|&(j, v)| v * x[j]).sum::<f64>()),
        )
    }
}

fn column_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn sparse_rows(m: &DMatrix<f64>) -> Vec<Vec<(usize, f64)>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .filter_map(|j| (m[(i, j)] != 0.0).then(|| (j, m[(i, j)])))
                .collect()
        })
        .collect()
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Construction(format!(
            "`{field}` must be strictly positive, got {v}"
        )))
    }
}

fn nonzero_count(field: &str, n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Construction(format!("`{field}` must be >= 1")))
    } else {
        Ok(())
    }
}

/// Assembles the capacitance and inverse-inductance matrices.
///
/// Chains keep every node flux (no boundary node is eliminated). The modified
/// BJPA cell has nodes 0..=8 with the resonator at node 4; cells are cascaded
/// by sharing node 8 of one cell with node 0 of the next.
pub fn build_matrices(architecture: &Architecture) -> Result<CircuitMatrices> {
    match architecture {
        Architecture::SingleJunction { junction } => {
            let c = junction.capacitance();
            let l = junction.inductance();
            positive("junction.c_j", c)?;
            positive("junction.l_j0", l)?;
            let mut m = CircuitMatrices::zeros(vec!["node0".into()]);
            m.cap[(0, 0)] = c;
            m.inv_ind[(0, 0)] = 1.0 / l;
            Ok(m)
        }
        Architecture::SeriesArray {
            n,
            junction,
            c_ground,
            c_out,
        } => {
            nonzero_count("n", *n)?;
            let (c, l) = (junction.capacitance(), junction.inductance());
            positive("junction.c_j", c)?;
            positive("junction.l_j0", l)?;
            positive("c_ground", *c_ground)?;
            positive("c_out", *c_out)?;
            Ok(chain(*n, c, l, *c_ground, *c_out))
        }
        Architecture::Blochnium {
            n_quartons,
            m_slaves,
            slave_junction,
            c_ground,
            ..
        } => {
            nonzero_count("n_quartons", *n_quartons)?;
            nonzero_count("m_slaves", *m_slaves)?;
            let m = *m_slaves as f64;
            let (c, l) = (slave_junction.capacitance(), slave_junction.inductance());
            positive("slave_junction.c_j", c)?;
            positive("slave_junction.l_j0", l)?;
            positive("c_ground", *c_ground)?;
            // Each Quarton: M slave junctions in series.
            Ok(chain(*n_quartons, c / m, l * m, *c_ground, *c_ground))
        }
        Architecture::ModifiedBjpa(cell) => modified_bjpa(cell),
    }
}

fn chain(n: usize, c: f64, l: f64, c_ground: f64, c_out: f64) -> CircuitMatrices {
    let mut m = CircuitMatrices::zeros((0..=n).map(|k| format!("node{k}")).collect());
    for k in 0..n {
        m.ground_cap(k, c_ground);
        m.branch_cap(k, k + 1, c);
        m.branch_ind(k, k + 1, 1.0 / l);
    }
    m.ground_cap(n, c_out);
    m
}

/// Flux nodes per modified-BJPA cell (excluding the shared right boundary).
pub const BJPA_CELL_STRIDE: usize = 8;
/// Index of the resonator node inside a cell.
pub const BJPA_CENTER: usize = 4;

fn modified_bjpa(cell: &ModifiedBjpa) -> Result<CircuitMatrices> {
    nonzero_count("n_cells", cell.n_cells)?;
    nonzero_count("n_primary", cell.n_primary)?;
    for (name, v) in [
        ("c_g", cell.c_g),
        ("c_j", cell.c_j),
        ("c_m", cell.c_m),
        ("c_1", cell.c_1),
        ("c_2", cell.c_2),
        ("c_s", cell.c_s),
        ("l_js", cell.l_js),
        ("l_jm", cell.l_jm),
        ("l_s", cell.l_s),
    ] {
        positive(name, v)?;
    }
    let nodes = BJPA_CELL_STRIDE * cell.n_cells + 1;
    let labels = (0..nodes)
        .map(|g| {
            let (c, k) = (g / BJPA_CELL_STRIDE, g % BJPA_CELL_STRIDE);
            if g == nodes - 1 {
                format!("cell{}.n8", cell.n_cells - 1)
            } else {
                format!("cell{c}.n{k}")
            }
        })
        .collect();
    let mut m = CircuitMatrices::zeros(labels);
    for c in 0..cell.n_cells {
        let base = c * BJPA_CELL_STRIDE;
        let center = base + BJPA_CENTER;
        for k in 0..=8 {
            if k != BJPA_CENTER {
                m.ground_cap(base + k, cell.c_g);
            }
        }
        for k in 0..8 {
            m.branch_cap(base + k, base + k + 1, cell.c_j);
            m.branch_ind(base + k, base + k + 1, 1.0 / cell.l_js);
        }
        for (a, b) in [(base, center), (center, base + 8)] {
            m.branch_cap(a, b, cell.c_m);
            m.branch_ind(a, b, 1.0 / cell.l_jm);
        }
        // Resonator node in closed form: C_x and L_x / L.
        m.cap[(center, center)] = cell.c_1 + cell.c_2 + cell.c_s + 2.0 * cell.c_m + 2.0 * cell.c_j;
        m.inv_ind[(center, center)] =
            (2.0 + 2.0 * (cell.l_js / cell.l_jm) + cell.l_js / cell.l_s) / cell.l_js;
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    /// Angular frequencies, ascending; rigid modes report 0.
    pub frequencies: Vec<f64>,
    /// Raw generalized eigenvalues omega^2 (may be slightly negative for rigid modes).
    pub eigenvalues: Vec<f64>,
    /// Mode shapes with unit Euclidean norm.
    pub shapes: Vec<DVector<f64>>,
}

impl ModeSet {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn is_rigid(&self, i: usize) -> bool {
        self.frequencies[i] == 0.0
    }

    /// Index of the lowest nonzero mode.
    pub fn fundamental(&self) -> Option<usize> {
        (0..self.len()).find(|&i| !self.is_rigid(i))
    }

    /// Indices of nonzero modes with frequency in `[lo, hi]` (rad/s).
    pub fn in_band(&self, lo: f64, hi: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| !self.is_rigid(i) && self.frequencies[i] >= lo && self.frequencies[i] <= hi)
            .collect()
    }

    /// Largest relative eigen-residual `|K psi - w^2 C psi| / (|K| |psi|)`.
    pub fn max_residual(&self, m: &CircuitMatrices) -> f64 {
        let k_rows = sparse_rows(&m.inv_ind);
        let c_rows = sparse_rows(&m.cap);
        let k_norm = m.inv_ind_norm();
        self.shapes
            .iter()
            .zip(&self.eigenvalues)
            .map(|(psi, &lam)| {
                let kp = CircuitMatrices::sparse_mul(&m.inv_ind, &k_rows, psi);
                let cp = CircuitMatrices::sparse_mul(&m.cap, &c_rows, psi);
                (kp - cp * lam).norm() / (k_norm * psi.norm())
            })
            .fold(0.0, f64::max)
    }

    /// Largest normalized off-diagonal `|psi_i^T C psi_j| / sqrt(c_ii c_jj)`.
    pub fn max_c_orthogonality(&self, m: &CircuitMatrices) -> f64 {
        let n = m.node_count();
        let k = self.len();
        let c_rows = sparse_rows(&m.cap);
        let psi = DMatrix::from_columns(&self.shapes);
        let mut w = DMatrix::zeros(n, k);
        for (j, s) in self.shapes.iter().enumerate() {
            w.set_column(j, &CircuitMatrices::sparse_mul(&m.cap, &c_rows, s));
        }
        let gram = psi.transpose() * w;
        let mut worst = 0.0f64;
        for i in 0..k {
            for j in 0..i {
                let v = gram[(i, j)].abs() / (gram[(i, i)] * gram[(j, j)]).sqrt();
                worst = worst.max(v);
            }
        }
        worst
    }
}

fn finish(mut pairs: Vec<(f64, DVector<f64>)>) -> ModeSet {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let lam_max = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
    let mut out = ModeSet {
        frequencies: Vec::with_capacity(pairs.len()),
        eigenvalues: Vec::with_capacity(pairs.len()),
        shapes: Vec::with_capacity(pairs.len()),
    };
    for (lam, mut psi) in pairs {
        let norm = psi.norm();
        psi /= norm;
        // Sign convention: the largest-magnitude component is positive.
        let pivot = psi.iter().copied().fold(0.0f64, |a, v| if v.abs() > a.abs() { v } else { a });
        if pivot < 0.0 {
            psi.neg_mut();
        }
        let rigid = lam <= ZERO_MODE_REL * lam_max;
        out.frequencies.push(if rigid { 0.0 } else { lam.sqrt() });
        out.eigenvalues.push(lam);
        out.shapes.push(psi);
    }
    out
}

fn not_positive_definite(cap: &DMatrix<f64>) -> Error {
    let eig = cap.clone().symmetric_eigenvalues();
    let (index, eigenvalue) = eig
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, f64::NAN));
    Error::NotPositiveDefinite { index, eigenvalue }
}

/// Solves the pencil, taking the tridiagonal path for long chains.
pub fn solve_modes(m: &CircuitMatrices) -> Result<ModeSet> {
    if m.node_count() > BANDED_THRESHOLD && m.is_tridiagonal() {
        if let Some(modes) = solve_modes_tridiagonal(m)? {
            return Ok(modes);
        }
    }
    solve_modes_dense(m)
}

/// Dense route: Cholesky-reduce `C` and diagonalize `L^-1 K L^-T`.
pub fn solve_modes_dense(m: &CircuitMatrices) -> Result<ModeSet> {
    let chol = nalgebra::Cholesky::new(m.cap.clone()).ok_or_else(|| not_positive_definite(&m.cap))?;
    let l = chol.l();
    let x = l
        .solve_lower_triangular(&m.inv_ind)
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let a = l
        .solve_lower_triangular(&x.transpose())
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let a = (&a + a.transpose()) * 0.5;
    let eig = a.symmetric_eigen();
    let lt = l.transpose();
    let pairs = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(&lam, y)| {
            let psi = lt
                .solve_upper_triangular(&y.into_owned())
                .expect("triangular factor is nonsingular");
            (lam, psi)
        })
        .collect();
    Ok(finish(pairs))
}

/// Tridiagonal route; `Ok(None)` when the Gershgorin bound on `C` is not
/// positive and the dense solver must decide.
pub fn solve_modes_tridiagonal(m: &CircuitMatrices) -> Result<Option<ModeSet>> {
    use rayon::prelude::*;

    if !m.is_tridiagonal() {
        return Err(Error::Numerical("matrices are not tridiagonal".into()));
    }
    let pencil = m.pencil();
    let Some(values) = pencil.eigenvalues() else {
        return Ok(None);
    };
    let pairs: Vec<(f64, DVector<f64>)> = values
        .par_iter()
        .enumerate()
        .map(|(k, &lam)| (lam, DVector::from_vec(pencil.eigenvector(lam, k))))
        .collect();
    Ok(Some(finish(pairs)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveOscillator {
    pub c_eff: f64,
    pub l_eff: f64,
    pub omega_eff: f64,
    pub z_eff: f64,
    pub kappa: f64,
    pub mode_index: usize,
}

impl EffectiveOscillator {
    /// Reflection coefficient `(Z_eff - Z0) / (Z_eff + Z0)`; diagnostic only.
    pub fn reflection_coefficient(&self, z_line: f64) -> f64 {
        (self.z_eff - z_line) / (self.z_eff + z_line)
    }
}

/// Reduces mode `mode_index` to an effective LC oscillator.
pub fn effective_params(
    modes: &ModeSet,
    m: &CircuitMatrices,
    mode_index: usize,
    env: &Environment,
) -> Result<EffectiveOscillator> {
    if mode_index >= modes.len() {
        return Err(Error::InvalidMode {
            index: mode_index,
            reason: format!("only {} modes", modes.len()),
        });
    }
    if modes.is_rigid(mode_index) {
        return Err(Error::InvalidMode {
            index: mode_index,
            reason: "zero-frequency (rigid) mode cannot be reduced".into(),
        });
    }
    let psi = &modes.shapes[mode_index];
    let psi = psi / psi.norm();
    let c_eff = psi.dot(&(&m.cap * &psi));
    let l_eff = 1.0 / psi.dot(&(&m.inv_ind * &psi));
    let omega_eff = modes.frequencies[mode_index];
    Ok(EffectiveOscillator {
        c_eff,
        l_eff,
        omega_eff,
        z_eff: (l_eff / c_eff).sqrt(),
        kappa: env.kappa(omega_eff),
        mode_index,
    })
}

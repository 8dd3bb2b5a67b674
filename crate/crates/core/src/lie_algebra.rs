//! Finite-dimensional real Lie algebras given by structure constants.
//!
//! The bracket of basis elements is `[e_i, e_j] = Σ_k c[i][j][k] e_k`. The full
//! `n × n × n` table is stored; antisymmetry in `(i, j)` is enforced when the
//! algebra is built, the Jacobi identity is checked separately by
//! [`LieAlgebra::jacobi_residual`] so that broken inputs can still be inspected.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative tolerance for the Jacobi identity of catalog entries.
pub const JACOBI_TOL: f64 = 1e-12;
/// Closure and linear-independence tolerance for matrix representations.
pub const REP_TOL: f64 = 1e-10;

/// Coordinates of an element of the Lie algebra in the chosen basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement(DVector<f64>);

impl AlgebraElement {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(DVector::from_vec(coords))
    }

    pub fn from_slice(coords: &[f64]) -> Self {
        Self(DVector::from_column_slice(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DVector::zeros(dim))
    }

    /// The `i`-th basis vector `e_i` (0-based).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[i] = 1.0;
        Self(v)
    }

    pub fn from_vector(v: DVector<f64>) -> Self {
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }
}

/// A faithful matrix representation: one `m × m` matrix per basis element.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRep {
    size: usize,
    basis: Vec<DMatrix<f64>>,
}

impl MatrixRep {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn basis_matrices(&self) -> &[DMatrix<f64>] {
        &self.basis
    }

    /// `Σ α^i E_i`.
    pub fn embed(&self, alpha: &AlgebraElement) -> Result<DMatrix<f64>> {
        check_dim(self.basis.len(), alpha.dim())?;
        let mut out = DMatrix::zeros(self.size, self.size);
        for (coef, e) in alpha.coords().iter().zip(&self.basis) {
            out += e * *coef;
        }
        Ok(out)
    }

    /// Least-squares coordinates of a matrix in the span of the basis, with the
    /// max-abs reconstruction residual.
    pub fn coordinates(&self, m: &DMatrix<f64>) -> Result<(AlgebraElement, f64)> {
        if m.nrows() != self.size || m.ncols() != self.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                found: m.nrows(),
            });
        }
        let b = self.design_matrix();
        let rhs = DVector::from_column_slice(m.as_slice());
        let coords = solve_normal_equations(&b, &rhs)?;
        let residual = (&b * &coords - &rhs).amax();
        Ok((AlgebraElement(coords), residual))
    }

    /// Column `i` is the column-major flattening of `E_i`.
    fn design_matrix(&self) -> DMatrix<f64> {
        let rows = self.size * self.size;
        DMatrix::from_fn(rows, self.basis.len(), |r, c| self.basis[c].as_slice()[r])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    constants: Vec<f64>,
    labels: Vec<String>,
    rep: Option<MatrixRep>,
}

impl LieAlgebra {
    /// Builds an algebra from a full table `c[i][j][k]` (flattened as
    /// `(i * n + j) * n + k`). The table must already be antisymmetric in
    /// `(i, j)`; diagonal entries must vanish.
    pub fn from_table(dim: usize, constants: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConstants("dimension must be positive".into()));
        }
        if constants.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim * dim,
                found: constants.len(),
            });
        }
        if labels.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: labels.len(),
            });
        }
        if let Some(bad) = constants.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidConstants(format!("non-finite constant {bad}")));
        }
        let idx = |i: usize, j: usize, k: usize| (i * dim + j) * dim + k;
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    if constants[idx(i, j, k)] != -constants[idx(j, i, k)] {
                        return Err(Error::InvalidConstants(format!(
                            "c[{}][{}][{}] = {} is not the negative of c[{}][{}][{}] = {}",
                            i + 1,
                            j + 1,
                            k + 1,
                            constants[idx(i, j, k)],
                            j + 1,
                            i + 1,
                            k + 1,
                            constants[idx(j, i, k)]
                        )));
                    }
                }
            }
        }
        Ok(Self {
            dim,
            constants,
            labels,
            rep: None,
        })
    }

    /// Builds an algebra from bracket entries `(i, j, k, value)` meaning
    /// `c[i][j][k] = value` (0-based). The mirrored entry `c[j][i][k] = -value`
    /// is filled in; an entry with `i == j` must be zero.
    pub fn from_brackets(
        dim: usize,
        labels: Vec<String>,
        brackets: &[(usize, usize, usize, f64)],
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConstants("dimension must be positive".into()));
        }
        let mut constants = vec![0.0; dim * dim * dim];
        let mut seen = vec![false; dim * dim * dim];
        for &(i, j, k, value) in brackets {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::InvalidConstants(format!(
                    "bracket index ({}, {}, {}) out of range for dimension {dim}",
                    i + 1,
                    j + 1,
                    k + 1
                )));
            }
            if i == j {
                if value != 0.0 {
                    return Err(Error::InvalidConstants(format!(
                        "[e{0}, e{0}] must vanish, got coefficient {value}",
                        i + 1
                    )));
                }
                continue;
            }
            let (lo, hi, v) = if i < j { (i, j, value) } else { (j, i, -value) };
            let fwd = (lo * dim + hi) * dim + k;
            if seen[fwd] && constants[fwd] != v {
                return Err(Error::InvalidConstants(format!(
                    "conflicting entries for c[{}][{}][{}]",
                    lo + 1,
                    hi + 1,
                    k + 1
                )));
            }
            seen[fwd] = true;
            constants[fwd] = v;
            constants[(hi * dim + lo) * dim + k] = -v;
        }
        Self::from_table(dim, constants, labels)
    }

    /// Builds an algebra from a list of matrices spanning a matrix Lie algebra.
    /// Structure constants are the least-squares coefficients of each
    /// commutator in the basis.
    pub fn from_matrix_rep(mats: Vec<DMatrix<f64>>) -> Result<Self> {
        let n = mats.len();
        if n == 0 {
            return Err(Error::InvalidConstants("empty basis".into()));
        }
        let m = mats[0].nrows();
        for e in &mats {
            if e.nrows() != m || e.ncols() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: e.nrows().max(e.ncols()),
                });
            }
        }
        let rep = MatrixRep { size: m, basis: mats };
        let b = rep.design_matrix();
        let sv = b.clone().svd(false, false).singular_values;
        let s_max = sv.max();
        let s_min = sv.min();
        if s_max == 0.0 || s_min < REP_TOL * s_max || n > m * m {
            return Err(Error::LinearDependence { sigma_min: s_min });
        }

        let mut constants = vec![0.0; n * n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let comm = commutator(&rep.basis[i], &rep.basis[j]);
                let rhs = DVector::from_column_slice(comm.as_slice());
                let coords = solve_normal_equations(&b, &rhs)?;
                let residual = (&b * &coords - &rhs).amax();
                let scale = rhs.amax().max(1.0);
                if residual > REP_TOL * scale {
                    return Err(Error::NotClosed { i: i + 1, j: j + 1, residual });
                }
                for k in 0..n {
                    constants[(i * n + j) * n + k] = coords[k];
                    constants[(j * n + i) * n + k] = -coords[k];
                }
            }
        }
        let labels = (1..=n).map(|i| format!("e{i}")).collect();
        let mut algebra = Self::from_table(n, constants, labels)?;
        algebra.rep = Some(rep);
        Ok(algebra)
    }

    /// Attaches a matrix representation after checking that its induced
    /// structure constants agree with this algebra's.
    pub fn with_rep(mut self, mats: Vec<DMatrix<f64>>) -> Result<Self> {
        check_dim(self.dim, mats.len())?;
        let induced = Self::from_matrix_rep(mats)?;
        let diff = self
            .constants
            .iter()
            .zip(&induced.constants)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if diff > REP_TOL * self.max_abs_constant().max(1.0) {
            return Err(Error::InvalidConstants(format!(
                "representation induces different structure constants (max deviation {diff:e})"
            )));
        }
        self.rep = induced.rep;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rep(&self) -> Option<&MatrixRep> {
        self.rep.as_ref()
    }

    pub fn require_rep(&self) -> Result<&MatrixRep> {
        self.rep.as_ref().ok_or(Error::MissingRep)
    }

    /// `c[i][j][k]`, 0-based.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.constants[(i * self.dim + j) * self.dim + k]
    }

    pub fn constants(&self) -> &[f64] {
        &self.constants
    }

    pub fn max_abs_constant(&self) -> f64 {
        self.constants.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Same algebra with every structure constant multiplied by `s`. The matrix
    /// representation is scaled along with it.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            constants: self.constants.iter().map(|c| c * s).collect(),
            labels: self.labels.clone(),
            rep: self.rep.as_ref().map(|r| MatrixRep {
                size: r.size,
                basis: r.basis.iter().map(|e| e * s).collect(),
            }),
        }
    }

    pub fn bracket(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        check_dim(self.dim, x.dim())?;
        check_dim(self.dim, y.dim())?;
        let n = self.dim;
        let mut out = DVector::zeros(n);
        for (i, &xi) in x.coords().iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (j, &yj) in y.coords().iter().enumerate() {
                if yj == 0.0 {
                    continue;
                }
                let w = xi * yj;
                let row = &self.constants[(i * n + j) * n..(i * n + j + 1) * n];
                for (k, c) in row.iter().enumerate() {
                    out[k] += c * w;
                }
            }
        }
        Ok(AlgebraElement(out))
    }

    /// The matrix of `α ↦ [a, α]`: entry `(k, j)` is `Σ_i c[i][j][k] a^i`.
    pub fn ad_matrix(&self, a: &AlgebraElement) -> Result<DMatrix<f64>> {
        check_dim(self.dim, a.dim())?;
        let n = self.dim;
        Ok(DMatrix::from_fn(n, n, |k, j| {
            a.coords()
                .iter()
                .enumerate()
                .map(|(i, ai)| self.constant(i, j, k) * ai)
                .sum()
        }))
    }

    /// `ad_{e_i}` for every basis element.
    pub fn ad_basis(&self) -> Vec<DMatrix<f64>> {
        (0..self.dim)
            .map(|i| {
                self.ad_matrix(&AlgebraElement::basis(self.dim, i))
                    .expect("basis element has the algebra's dimension")
            })
            .collect()
    }

    /// Max over basis triples of the cyclic Jacobi sum in the sup norm.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        // [[e_i, e_j], e_k]_m = Σ_l c[i][j][l] c[l][k][m]
        let double = |i: usize, j: usize, k: usize, m: usize| -> f64 {
            (0..n)
                .map(|l| self.constant(i, j, l) * self.constant(l, k, m))
                .sum()
        };
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in 0..n {
                        let s = double(i, j, k, m) + double(j, k, i, m) + double(k, i, j, m);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Jacobi residual relative to the size of the constants.
    pub fn is_lie_algebra(&self, rel_tol: f64) -> bool {
        self.jacobi_residual() <= rel_tol * self.max_abs_constant().max(f64::MIN_POSITIVE)
    }

    /// Max deviation between this algebra's constants and those induced by its
    /// representation, plus the worst commutator reconstruction residual.
    pub fn closure_residual(&self) -> Result<f64> {
        let rep = self.require_rep()?;
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let comm = commutator(&rep.basis[i], &rep.basis[j]);
                let expected: DMatrix<f64> = (0..n).fold(
                    DMatrix::zeros(rep.size, rep.size),
                    |acc, k| acc + &rep.basis[k] * self.constant(i, j, k),
                );
                worst = worst.max((comm - expected).amax());
            }
        }
        Ok(worst)
    }
}

pub fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Least squares via the normal equations `BᵀB x = Bᵀ y` with a fully pivoted LU.
fn solve_normal_equations(b: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let gram = b.transpose() * b;
    let proj = b.transpose() * rhs;
    gram.full_piv_lu()
        .solve(&proj)
        .ok_or(Error::LinearDependence { sigma_min: 0.0 })
}

/// `E_{rc}` in `m × m`, 0-based.
pub fn unit_matrix(m: usize, r: usize, c: usize) -> DMatrix<f64> {
    let mut e = DMatrix::zeros(m, m);
    e[(r, c)] = 1.0;
    e
}

/// Named examples. Every entry carries a faithful matrix representation.
///
/// * `abelian(n)`: diagonal matrices `E_ii`.
/// * `heisenberg3`: `e1 = E12`, `e2 = E23`, `e3 = E13`, so `[e1, e2] = e3`.
/// * `so3`: `(L_i)_{jk} = -ε_{ijk}`, so `[L1, L2] = L3` cyclically.
/// * `sl2r`: `H, E, F` with `[H, E] = 2E`, `[H, F] = -2F`, `[E, F] = H`.
/// * `e2`: the Euclidean algebra `P1 = E13`, `P2 = E23`, `J` the rotation
///   generator; `[J, P1] = P2`, `[J, P2] = -P1`, `[P1, P2] = 0`.
/// * `so3_plus_r`: `so3 ⊕ ℝ`, block-diagonal in `4 × 4`.
pub fn catalog(name: &str) -> Result<LieAlgebra> {
    let name = name.trim();
    if let Some(n) = parse_abelian(name) {
        let n = n?;
        let mats = (0..n).map(|i| unit_matrix(n, i, i)).collect();
        let labels = (1..=n).map(|i| format!("e{i}")).collect();
        return LieAlgebra::from_table(n, vec![0.0; n * n * n], labels)?.with_rep(mats);
    }
    match name {
        "heisenberg3" => LieAlgebra::from_brackets(3, labels(&["X", "Y", "Z"]), &[(0, 1, 2, 1.0)])?
            .with_rep(vec![
                unit_matrix(3, 0, 1),
                unit_matrix(3, 1, 2),
                unit_matrix(3, 0, 2),
            ]),
        "so3" => LieAlgebra::from_brackets(
            3,
            labels(&["L1", "L2", "L3"]),
            &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)],
        )?
        .with_rep(so3_matrices(3)),
        "sl2r" => LieAlgebra::from_brackets(
            3,
            labels(&["H", "E", "F"]),
            &[(0, 1, 1, 2.0), (0, 2, 2, -2.0), (1, 2, 0, 1.0)],
        )?
        .with_rep(vec![
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]),
            unit_matrix(2, 0, 1),
            unit_matrix(2, 1, 0),
        ]),
        "e2" => LieAlgebra::from_brackets(
            3,
            labels(&["P1", "P2", "J"]),
            &[(2, 0, 1, 1.0), (2, 1, 0, -1.0)],
        )?
        .with_rep(vec![
            unit_matrix(3, 0, 2),
            unit_matrix(3, 1, 2),
            rotation_generator(3),
        ]),
        "so3_plus_r" => LieAlgebra::from_brackets(
            4,
            labels(&["L1", "L2", "L3", "T"]),
            &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)],
        )?
        .with_rep({
            let mut mats = so3_matrices(4);
            mats.push(unit_matrix(4, 3, 3));
            mats
        }),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

/// Names accepted by [`catalog`]; `abelian(n)` is listed with `n = 3`.
pub const CATALOG_NAMES: [&str; 6] = ["abelian(3)", "heisenberg3", "so3", "sl2r", "e2", "so3_plus_r"];

fn parse_abelian(name: &str) -> Option<Result<usize>> {
    let inner = name.strip_prefix("abelian(")?.strip_suffix(')')?;
    Some(match inner.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(Error::UnknownName(name.to_string())),
    })
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// The three `so(3)` generators embedded in the upper-left block of `m × m`.
fn so3_matrices(m: usize) -> Vec<DMatrix<f64>> {
    let gen = |a: usize, b: usize| {
        // rotation in the (a, b) plane: e_a ↦ e_b, e_b ↦ -e_a
        let mut e = DMatrix::zeros(m, m);
        e[(b, a)] = 1.0;
        e[(a, b)] = -1.0;
        e
    };
    vec![gen(1, 2), gen(2, 0), gen(0, 1)]
}

/// `[[0, -1, 0], [1, 0, 0], [0, 0, 0]]` padded to `m × m`.
pub fn rotation_generator(m: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(m, m);
    j[(0, 1)] = -1.0;
    j[(1, 0)] = 1.0;
    j
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> AlgebraElement {
        AlgebraElement::basis(n, i)
    }

    #[test]
    fn abelian_brackets_vanish() {
        let a = catalog("abelian(3)").unwrap();
        assert_eq!(a.bracket(&e(3, 0), &e(3, 1)).unwrap(), AlgebraElement::zeros(3));
        let a5 = catalog("abelian(5)").unwrap();
        assert_eq!(a5.dim(), 5);
        assert!(a5.constants().iter().all(|c| *c == 0.0));
    }

    #[test]
    fn heisenberg_and_so3_brackets() {
        for name in ["heisenberg3", "so3"] {
            let a = catalog(name).unwrap();
            assert_eq!(a.bracket(&e(3, 0), &e(3, 1)).unwrap(), e(3, 2), "{name}");
        }
        let h = catalog("heisenberg3").unwrap();
        let nonzero = h.constants().iter().filter(|c| **c != 0.0).count();
        // [e1,e2] = e3 and its mirror
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn e2_brackets_from_displayed_matrices() {
        let a = catalog("e2").unwrap();
        let (p1, p2, j) = (e(3, 0), e(3, 1), e(3, 2));
        assert_eq!(a.bracket(&j, &p1).unwrap(), p2);
        assert_eq!(a.bracket(&j, &p2).unwrap(), p1.scale(-1.0));
        assert_eq!(a.bracket(&p1, &p2).unwrap(), AlgebraElement::zeros(3));
    }

    #[test]
    fn jacobi_residuals() {
        assert_eq!(catalog("abelian(4)").unwrap().jacobi_residual(), 0.0);
        for name in ["so3", "heisenberg3", "sl2r", "e2", "so3_plus_r"] {
            let a = catalog(name).unwrap();
            assert!(a.jacobi_residual() <= 1e-14, "{name}");
            assert!(a.is_lie_algebra(JACOBI_TOL));
        }
    }

    #[test]
    fn perturbed_so3_breaks_jacobi() {
        let so3 = catalog("so3").unwrap();
        // [e1,e2] = e3 + 0.1 e1: the cyclic sum picks up -0.1 e2.
        let idx = |i: usize, j: usize, k: usize| (i * 3 + j) * 3 + k;
        let mut c = so3.constants().to_vec();
        c[idx(0, 1, 0)] += 0.1;
        c[idx(1, 0, 0)] -= 0.1;
        let bad = LieAlgebra::from_table(3, c, so3.labels().to_vec()).unwrap();
        assert!((bad.jacobi_residual() - 0.1).abs() < 1e-15);

        // Rescaling a single so3 constant stays inside the Bianchi class.
        let mut c = so3.constants().to_vec();
        c[idx(0, 1, 2)] += 0.1;
        c[idx(1, 0, 2)] -= 0.1;
        let rescaled = LieAlgebra::from_table(3, c, so3.labels().to_vec()).unwrap();
        assert_eq!(rescaled.jacobi_residual(), 0.0);
    }

    #[test]
    fn ad_matrix_examples() {
        let a = catalog("abelian(4)").unwrap();
        let x = AlgebraElement::new(vec![1.0, -2.0, 3.0, 0.5]);
        assert_eq!(a.ad_matrix(&x).unwrap(), DMatrix::zeros(4, 4));

        let h = catalog("heisenberg3").unwrap();
        let ad = h.ad_matrix(&e(3, 0)).unwrap();
        let mut expected = DMatrix::zeros(3, 3);
        expected[(2, 1)] = 1.0;
        assert_eq!(ad, expected);

        let so3 = catalog("so3").unwrap();
        let ad = so3.ad_matrix(&e(3, 2)).unwrap();
        assert_eq!(&ad * e(3, 0).as_vector(), *e(3, 1).as_vector());
        assert_eq!(&ad * e(3, 1).as_vector(), -e(3, 0).as_vector());
        assert_eq!(&ad * e(3, 2).as_vector(), DVector::zeros(3));
    }

    #[test]
    fn from_matrix_rep_examples() {
        let a = LieAlgebra::from_matrix_rep(vec![
            unit_matrix(3, 0, 2),
            unit_matrix(3, 1, 2),
            rotation_generator(3),
        ])
        .unwrap();
        let e2 = catalog("e2").unwrap();
        assert_eq!(a.constants(), e2.constants());

        let diag = LieAlgebra::from_matrix_rep(vec![
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0])),
            DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0])),
        ])
        .unwrap();
        assert!(diag.constants().iter().all(|c| c.abs() < 1e-14));

        let h = LieAlgebra::from_matrix_rep(vec![
            unit_matrix(3, 0, 1),
            unit_matrix(3, 1, 2),
            unit_matrix(3, 0, 2),
        ])
        .unwrap();
        assert_eq!(h.constants(), catalog("heisenberg3").unwrap().constants());
    }

    #[test]
    fn from_matrix_rep_errors() {
        let dep = LieAlgebra::from_matrix_rep(vec![unit_matrix(2, 0, 1), unit_matrix(2, 0, 1) * 2.0]);
        assert!(matches!(dep, Err(Error::LinearDependence { .. })));
        // E12 and E21 generate sl2, their commutator diag(1,-1) is outside the span.
        let open = LieAlgebra::from_matrix_rep(vec![unit_matrix(2, 0, 1), unit_matrix(2, 1, 0)]);
        assert!(matches!(open, Err(Error::NotClosed { .. })));
    }

    #[test]
    fn rep_round_trip_for_catalog() {
        for name in CATALOG_NAMES {
            let a = catalog(name).unwrap();
            let rebuilt = LieAlgebra::from_matrix_rep(a.rep().unwrap().basis_matrices().to_vec()).unwrap();
            for (x, y) in a.constants().iter().zip(rebuilt.constants()) {
                assert!((x - y).abs() <= 1e-10, "{name}");
            }
            assert!(a.closure_residual().unwrap() <= 1e-10);
        }
    }

    #[test]
    fn error_paths() {
        assert!(matches!(catalog("so4"), Err(Error::UnknownName(_))));
        assert!(matches!(catalog("abelian(0)"), Err(Error::UnknownName(_))));
        let so3 = catalog("so3").unwrap();
        assert!(matches!(
            so3.bracket(&e(2, 0), &e(3, 0)),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
        assert!(matches!(
            LieAlgebra::from_brackets(2, labels(&["a", "b"]), &[(0, 0, 1, 1.0)]),
            Err(Error::InvalidConstants(_))
        ));
        assert!(matches!(
            LieAlgebra::from_brackets(2, labels(&["a", "b"]), &[(0, 1, 1, 1.0), (1, 0, 1, 1.0)]),
            Err(Error::InvalidConstants(_))
        ));
        let mut c = vec![0.0; 8];
        c[1] = 1.0;
        assert!(LieAlgebra::from_table(2, c, labels(&["a", "b"])).is_err());
    }
}

//! Invariant metrizability of the canonical spray.
//!
//! A left-invariant Lagrangian depends on the fiber coordinate `α` only. It
//! solves the Euler-Lagrange equation of the canonical spray exactly when
//! `⟨∇L(α), [a, α]⟩ = 0` for every `a, α ∈ 𝔤`. For a quadratic energy
//! `E = ½ αᵀGα` the condition polarizes to the linear system
//! `ad_aᵀ G + G ad_a = 0`, so deciding metrizability amounts to asking whether
//! the space `W` of ad-invariant symmetric forms contains a positive definite
//! element. Projective and Finsler variants reduce to the same question, since
//! invariant functions are first integrals of the canonical spray and the
//! projective factor of any invariant Finsler norm vanishes.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_algebra::{AlgebraElement, LieAlgebra};
use crate::sampling;
use crate::spray::{exp_orbit, TangentState};

/// Positive-definiteness margin for a Feasible verdict.
pub const PD_MARGIN: f64 = 1e-6;
/// Relative cut-off on singular values when computing the ad-invariant subspace.
pub const NULL_SPACE_TOL: f64 = 1e-10;
/// Bound on `uᵀGu` over unit `G ∈ W` for a certificate direction `u`.
pub const CERTIFICATE_TOL: f64 = 1e-9;
/// Acceptable skewness residual of a returned witness.
pub const WITNESS_TOL: f64 = 1e-9;
/// Symmetry tolerance for metric candidates.
pub const SYMMETRY_TOL: f64 = 1e-14;

type ValueFn = Box<dyn Fn(&AlgebraElement) -> f64 + Send + Sync>;
type GradientFn = Box<dyn Fn(&AlgebraElement) -> AlgebraElement + Send + Sync>;

/// A left-invariant function on `TG`, i.e. a function of `α` alone.
pub struct InvariantLagrangian {
    value: ValueFn,
    gradient: Option<GradientFn>,
    homogeneity_degree: Option<f64>,
}

impl std::fmt::Debug for InvariantLagrangian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InvariantLagrangian")
            .field("closed_form_gradient", &self.gradient.is_some())
            .field("homogeneity_degree", &self.homogeneity_degree)
            .finish()
    }
}

impl InvariantLagrangian {
    /// A Lagrangian whose gradient is taken by central differences.
    pub fn from_fn<F>(value: F, homogeneity_degree: Option<f64>) -> Self
    where
        F: Fn(&AlgebraElement) -> f64 + Send + Sync + 'static,
    {
        Self {
            value: Box::new(value),
            gradient: None,
            homogeneity_degree,
        }
    }

    pub fn with_gradient<G>(mut self, gradient: G) -> Self
    where
        G: Fn(&AlgebraElement) -> AlgebraElement + Send + Sync + 'static,
    {
        self.gradient = Some(Box::new(gradient));
        self
    }

    /// `E(α) = ½ αᵀGα`.
    pub fn quadratic_energy(g: &DMatrix<f64>) -> Self {
        let (gv, gg) = (g.clone(), g.clone());
        Self::from_fn(
            move |a| 0.5 * a.as_vector().dot(&(&gv * a.as_vector())),
            Some(2.0),
        )
        .with_gradient(move |a| AlgebraElement::from_vector(&gg * a.as_vector()))
    }

    /// `F(α) = √(αᵀGα) = √(2E)`.
    pub fn finsler_norm(g: &DMatrix<f64>) -> Self {
        let (gv, gg) = (g.clone(), g.clone());
        Self::from_fn(
            move |a| a.as_vector().dot(&(&gv * a.as_vector())).sqrt(),
            Some(1.0),
        )
        .with_gradient(move |a| {
            let ga = &gg * a.as_vector();
            let f = a.as_vector().dot(&ga).sqrt();
            AlgebraElement::from_vector(ga / f)
        })
    }

    /// `c · L`.
    pub fn scaled(self, c: f64) -> Self {
        let Self {
            value,
            gradient,
            homogeneity_degree,
        } = self;
        Self {
            value: Box::new(move |a| c * value(a)),
            gradient: gradient
                .map(|g| Box::new(move |a: &AlgebraElement| g(a).scale(c)) as GradientFn),
            homogeneity_degree,
        }
    }

    pub fn value(&self, alpha: &AlgebraElement) -> f64 {
        (self.value)(alpha)
    }

    pub fn gradient(&self, alpha: &AlgebraElement) -> AlgebraElement {
        match &self.gradient {
            Some(g) => g(alpha),
            None => self.fd_gradient(alpha),
        }
    }

    /// Central differences with `h = 1e-6 (1 + ‖α‖)`.
    pub fn fd_gradient(&self, alpha: &AlgebraElement) -> AlgebraElement {
        let h = 1e-6 * (1.0 + alpha.norm());
        let n = alpha.dim();
        let coords = (0..n)
            .map(|i| {
                let step = AlgebraElement::basis(n, i).scale(h);
                (self.value(&alpha.add(&step)) - self.value(&alpha.sub(&step))) / (2.0 * h)
            })
            .collect();
        AlgebraElement::new(coords)
    }

    pub fn homogeneity_degree(&self) -> Option<f64> {
        self.homogeneity_degree
    }

    /// Only positively 1-homogeneous (Finsler-type) functions are singular at 0.
    pub fn is_finsler_type(&self) -> bool {
        self.homogeneity_degree == Some(1.0)
    }

    /// Max relative mismatch between `⟨∇L, d⟩` and a central difference of the
    /// value along random unit directions `d`.
    pub fn gradient_consistency(&self, dim: usize, samples: usize, seed: u64) -> f64 {
        let mut rng = sampling::rng(seed);
        let mut worst = 0.0_f64;
        for _ in 0..samples {
            let alpha = sampling::normal_element(&mut rng, dim);
            let mut d = sampling::normal_element(&mut rng, dim);
            d = d.scale(1.0 / d.norm());
            let eps = 1e-5 * (1.0 + alpha.norm());
            let fd = (self.value(&alpha.add(&d.scale(eps))) - self.value(&alpha.sub(&d.scale(eps))))
                / (2.0 * eps);
            let an = self.gradient(&alpha).dot(&d);
            worst = worst.max((an - fd).abs() / (an.abs().max(fd.abs()) + 1e-12));
        }
        worst
    }
}

fn pairing_residual(
    algebra: &LieAlgebra,
    lagrangian: &InvariantLagrangian,
    a: &AlgebraElement,
    alpha: &AlgebraElement,
) -> Result<f64> {
    let br = algebra.bracket(a, alpha)?;
    if lagrangian.is_finsler_type() && alpha.max_abs() == 0.0 {
        return Err(Error::ZeroFiberPoint);
    }
    Ok(lagrangian.gradient(alpha).dot(&br))
}

/// `⟨∇L(α), [a, α]⟩`: the invariant Euler-Lagrange condition in direction `a`.
pub fn el_residual(
    algebra: &LieAlgebra,
    lagrangian: &InvariantLagrangian,
    a: &AlgebraElement,
    alpha: &AlgebraElement,
) -> Result<f64> {
    pairing_residual(algebra, lagrangian, a, alpha)
}

/// Same pairing for a positively 1-homogeneous `F`. For invariant `F` the
/// Rapcsák equation reduces to `d_hF = 0`, which by the horizontal projector
/// `h(a, ·) = (a, -½[a, α])` is `-½⟨∇F(α), [a, α]⟩`; the factor is dropped.
pub fn rapcsak_residual(
    algebra: &LieAlgebra,
    finsler: &InvariantLagrangian,
    a: &AlgebraElement,
    alpha: &AlgebraElement,
) -> Result<f64> {
    if !finsler.is_finsler_type() {
        return Err(Error::InvalidArgument(
            "Rapcsák residual needs a 1-homogeneous function".into(),
        ));
    }
    pairing_residual(algebra, finsler, a, alpha)
}

/// A symmetric bilinear form on the algebra, with its spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricCandidate {
    pub g: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
}

impl MetricCandidate {
    pub fn new(g: DMatrix<f64>) -> Result<Self> {
        check_symmetric(&g)?;
        let mut eigenvalues: Vec<f64> = SymmetricEigen::new(g.clone()).eigenvalues.iter().copied().collect();
        eigenvalues.sort_by(f64::total_cmp);
        Ok(Self { g, eigenvalues })
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    pub fn trace(&self) -> f64 {
        self.g.trace()
    }
}

fn check_symmetric(g: &DMatrix<f64>) -> Result<()> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch {
            expected: g.nrows(),
            found: g.ncols(),
        });
    }
    let asym = (g - g.transpose()).amax();
    if asym > SYMMETRY_TOL * g.amax().max(1.0) {
        return Err(Error::AsymmetricInput { residual: asym });
    }
    Ok(())
}

/// `max_i ‖ad_{e_i}ᵀ G + G ad_{e_i}‖∞`.
pub fn skewness_residual(algebra: &LieAlgebra, g: &DMatrix<f64>) -> Result<f64> {
    check_symmetric(g)?;
    if g.nrows() != algebra.dim() {
        return Err(Error::DimensionMismatch {
            expected: algebra.dim(),
            found: g.nrows(),
        });
    }
    Ok(algebra
        .ad_basis()
        .iter()
        .map(|ad| (ad.transpose() * g + g * ad).amax())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
    Undetermined,
}

impl std::fmt::Display for FeasibilityStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Feasible => "Feasible",
            Self::Infeasible => "Infeasible",
            Self::Undetermined => "Undetermined",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub status: FeasibilityStatus,
    pub witness: Option<MetricCandidate>,
    /// A direction `u` with `uᵀGu = 0` for every ad-invariant `G`.
    pub certificate: Option<AlgebraElement>,
    pub lambda_min_achieved: f64,
    pub subspace_dim: usize,
    pub iterations: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub seed: u64,
    pub restarts: usize,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            seed: sampling::DEFAULT_SEED,
            restarts: 5,
            max_iterations: 5000,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// Upper-triangular index pairs `(p, q)`, `p ≤ q`.
fn sym_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|p| (p..n).map(move |q| (p, q))).collect()
}

/// Frobenius-orthonormal basis of symmetric matrices.
fn sym_basis_matrix(n: usize, p: usize, q: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(n, n);
    if p == q {
        s[(p, p)] = 1.0;
    } else {
        s[(p, q)] = std::f64::consts::FRAC_1_SQRT_2;
        s[(q, p)] = std::f64::consts::FRAC_1_SQRT_2;
    }
    s
}

/// Orthonormal (Frobenius) basis of the ad-invariant symmetric forms
/// `W = {G = Gᵀ : ad_{e_i}ᵀ G + G ad_{e_i} = 0 ∀i}`.
pub fn ad_invariant_forms(algebra: &LieAlgebra) -> Vec<DMatrix<f64>> {
    let n = algebra.dim();
    let pairs = sym_pairs(n);
    let basis: Vec<DMatrix<f64>> = pairs.iter().map(|&(p, q)| sym_basis_matrix(n, p, q)).collect();
    let ads = algebra.ad_basis();
    let cols = basis.len();
    let mut system = DMatrix::zeros(n * cols, cols);
    for (l, s) in basis.iter().enumerate() {
        for (i, ad) in ads.iter().enumerate() {
            let c = ad.transpose() * s + s * ad;
            for (r, &(p, q)) in pairs.iter().enumerate() {
                system[(i * cols + r, l)] = c[(p, q)];
            }
        }
    }
    let svd = system.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let s_max = svd.singular_values.max();
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| s_max == 0.0 || **s < NULL_SPACE_TOL * s_max)
        .map(|(row, _)| {
            basis
                .iter()
                .enumerate()
                .fold(DMatrix::zeros(n, n), |acc, (l, s)| acc + s * v_t[(row, l)])
        })
        .collect()
}

/// `‖(uᵀB_l u)_l‖` for the unit vector along `u`; zero exactly when `u` is
/// isotropic for every form in the span of `forms`.
pub fn certificate_residual(forms: &[DMatrix<f64>], u: &AlgebraElement) -> f64 {
    let unit = u.as_vector() / u.norm();
    forms.iter().map(|b| (b * &unit).dot(&unit).powi(2)).sum::<f64>().sqrt()
}

/// First basis direction `e_k` with `G_kk = 0` for every `G` in the span of
/// `forms`.
fn forced_isotropic_direction(n: usize, forms: &[DMatrix<f64>]) -> Option<AlgebraElement> {
    (0..n)
        .map(|k| AlgebraElement::basis(n, k))
        .find(|e| certificate_residual(forms, e) <= CERTIFICATE_TOL)
}

fn combine(forms: &[DMatrix<f64>], y: &DVector<f64>) -> DMatrix<f64> {
    let n = forms[0].nrows();
    let g = forms
        .iter()
        .zip(y.iter())
        .fold(DMatrix::zeros(n, n), |acc, (b, c)| acc + b * *c);
    (&g + g.transpose()) * 0.5
}

/// λ_min with a unit eigenvector.
fn min_eigenpair(g: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let eig = SymmetricEigen::new(g.clone());
    let (idx, lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, &l)| if l < best.1 { (i, l) } else { best });
    (lambda, eig.eigenvectors.column(idx).into_owned())
}

enum Normalization {
    /// `tr G = target`; `t_l = tr B_l`.
    Trace { t: DVector<f64>, target: f64 },
    /// `‖y‖ = 1`, used when every form in `W` is traceless.
    Sphere,
}

impl Normalization {
    fn project_direction(&self, g: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        match self {
            Self::Trace { t, .. } => g - t * (g.dot(t) / t.norm_squared()),
            Self::Sphere => g - y * g.dot(y),
        }
    }

    fn restore(&self, y: &mut DVector<f64>) {
        match self {
            Self::Trace { t, target } => {
                let shift = (target - y.dot(t)) / t.norm_squared();
                *y += t * shift;
            }
            Self::Sphere => {
                let norm = y.norm();
                *y /= norm;
            }
        }
    }
}

struct Ascent {
    best_lambda: f64,
    best_y: DVector<f64>,
    iterations: usize,
}

/// A restart ends after this many iterations without improving its best value.
const STALL_ITERATIONS: usize = 250;

/// Projected supgradient ascent of `λ_min(Σ y_l B_l)` with steps `1/k`.
fn maximize_lambda_min(
    forms: &[DMatrix<f64>],
    norm: &Normalization,
    start: DVector<f64>,
    max_iterations: usize,
) -> Ascent {
    let mut y = start;
    norm.restore(&mut y);
    let (mut lambda, mut u) = min_eigenpair(&combine(forms, &y));
    let mut out = Ascent {
        best_lambda: lambda,
        best_y: y.clone(),
        iterations: 0,
    };
    let mut last_improvement = 0;
    for k in 1..=max_iterations {
        if k - last_improvement > STALL_ITERATIONS {
            break;
        }
        let sup = DVector::from_iterator(forms.len(), forms.iter().map(|b| (b * &u).dot(&u)));
        let dir = norm.project_direction(&sup, &y);
        if dir.norm() < 1e-12 {
            break;
        }
        y += dir / k as f64;
        norm.restore(&mut y);
        (lambda, u) = min_eigenpair(&combine(forms, &y));
        out.iterations = k;
        if lambda > out.best_lambda + 1e-12 {
            last_improvement = k;
        }
        if lambda > out.best_lambda {
            out.best_lambda = lambda;
            out.best_y = y.clone();
        }
    }
    out
}

/// Decides whether the canonical spray admits an invariant Riemann metric,
/// equivalently an ad-invariant scalar product on the algebra.
pub fn invariant_metrizability(algebra: &LieAlgebra, config: &SolverConfig) -> Result<FeasibilityReport> {
    let jacobi = algebra.jacobi_residual();
    if jacobi > 1e-10 * algebra.max_abs_constant().max(1.0) {
        return Err(Error::BadAlgebra { jacobi });
    }
    let n = algebra.dim();
    let forms = ad_invariant_forms(algebra);
    let mut report = FeasibilityReport {
        status: FeasibilityStatus::Infeasible,
        witness: None,
        certificate: None,
        lambda_min_achieved: 0.0,
        subspace_dim: forms.len(),
        iterations: 0,
        seed: config.seed,
    };
    if forms.is_empty() {
        // every direction of the algebra is isotropic
        report.certificate = Some(AlgebraElement::basis(n, 0));
        return Ok(report);
    }

    let d = forms.len();
    let t = DVector::from_iterator(d, forms.iter().map(|b| b.trace()));
    let norm = if t.norm() > 1e-12 {
        Normalization::Trace {
            t: t.clone(),
            target: n as f64,
        }
    } else {
        Normalization::Sphere
    };
    let anchor = match &norm {
        Normalization::Trace { t, target } => t * (target / t.norm_squared()),
        Normalization::Sphere => DVector::from_element(d, 1.0 / (d as f64).sqrt()),
    };

    let mut rng = sampling::rng(config.seed);
    let mut best: Option<Ascent> = None;
    for restart in 0..config.restarts.max(1) {
        // restart 0 is the min-norm normalized point; the others perturb it on
        // the scale of its coordinates
        let start = if restart == 0 {
            anchor.clone()
        } else {
            let scale = 0.5 * anchor.norm() / (d as f64).sqrt();
            &anchor + DVector::from_vec(sampling::normal_vec(&mut rng, d)) * scale
        };
        let run = maximize_lambda_min(&forms, &norm, start, config.max_iterations);
        report.iterations += run.iterations;
        // strict comparison keeps the earliest restart on ties
        if best.as_ref().is_none_or(|b| run.best_lambda > b.best_lambda) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one restart");
    report.lambda_min_achieved = best.best_lambda;

    if let Some(u) = forced_isotropic_direction(n, &forms) {
        report.certificate = Some(u);
        return Ok(report);
    }
    if matches!(norm, Normalization::Sphere) {
        // a positive definite form has positive trace
        return Ok(report);
    }
    if best.best_lambda >= PD_MARGIN {
        let mut g = combine(&forms, &best.best_y);
        g *= n as f64 / g.trace();
        let candidate = MetricCandidate::new(g)?;
        let skew = skewness_residual(algebra, &candidate.g)?;
        if skew <= WITNESS_TOL && candidate.lambda_min() >= PD_MARGIN {
            report.status = FeasibilityStatus::Feasible;
            report.lambda_min_achieved = candidate.lambda_min();
            report.witness = Some(candidate);
        } else {
            report.status = FeasibilityStatus::Undetermined;
        }
    } else if best.best_lambda > -PD_MARGIN {
        report.status = FeasibilityStatus::Undetermined;
    }
    Ok(report)
}

/// The four invariant metrizability notions for the canonical spray.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetrizabilityClass {
    Riemann,
    Finsler,
    ProjectiveRiemann,
    ProjectiveFinsler,
}

impl MetrizabilityClass {
    pub const ALL: [Self; 4] = [
        Self::Riemann,
        Self::Finsler,
        Self::ProjectiveRiemann,
        Self::ProjectiveFinsler,
    ];
}

/// Every class reduces to the existence of an ad-invariant scalar product:
/// projective factors of invariant functions vanish, and an invariant Berwald
/// metric has an invariant Riemannian companion with the same geodesics.
pub fn decide(algebra: &LieAlgebra, _class: MetrizabilityClass, config: &SolverConfig) -> Result<FeasibilityReport> {
    invariant_metrizability(algebra, config)
}

/// `(d_S F) / (2F)` at a state, with `d_S F` the central difference of `F`
/// along the canonical flow through the state (`dt = 1e-6`).
pub fn projective_factor(algebra: &LieAlgebra, finsler: &InvariantLagrangian, state: &TangentState) -> Result<f64> {
    const DT: f64 = 1e-6;
    let f0 = finsler.value(&state.alpha);
    if f0 == 0.0 || !f0.is_finite() {
        return Err(Error::ZeroFinslerNorm);
    }
    let rep = algebra.require_rep()?;
    let gen = rep.embed(&state.alpha)?;
    let fiber_value = |t: f64| -> Result<f64> {
        let m = exp_orbit(algebra, &state.x, &state.alpha, t)?.into_matrix();
        let velocity = &m * &gen;
        let inv = m
            .clone()
            .try_inverse()
            .ok_or(Error::SingularMatrix { det: m.determinant(), step: 0 })?;
        let (alpha_t, _) = rep.coordinates(&(inv * velocity))?;
        Ok(finsler.value(&alpha_t))
    };
    let ds_f = (fiber_value(DT)? - fiber_value(-DT)?) / (2.0 * DT);
    Ok(ds_f / (2.0 * f0))
}

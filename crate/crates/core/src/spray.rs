//! The canonical spray of a matrix Lie group in the left trivialization
//! `TG ≅ G × 𝔤`.
//!
//! A tangent vector at `x` is written `λ_x α` where `λ_x` is the tangent map of
//! left translation, i.e. the matrix `x · rep(α)`. Vectors on `TG` are stored
//! as `(a, b)`: the base slot as a left-logarithm `a` and the fiber slot `b`.
//! In these coordinates the canonical spray is `(α, 0)` and its projectors are
//! the literal formulas
//!
//! ```text
//! v(a, b) = ½[a, α] + b
//! h(a, b) = (a, -½[a, α])
//! ```

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lie_algebra::{AlgebraElement, LieAlgebra};
use crate::sampling;

/// Integration aborts once `|det M|` falls below this.
pub const SINGULAR_DET: f64 = 1e-12;

/// An invertible `m × m` matrix in the represented group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPoint(DMatrix<f64>);

impl GroupPoint {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let det = m.determinant();
        if !det.is_finite() || det.abs() < SINGULAR_DET {
            return Err(Error::SingularMatrix { det, step: 0 });
        }
        Ok(Self(m))
    }

    pub fn identity(m: usize) -> Self {
        Self(DMatrix::identity(m, m))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// 2-norm condition number.
    pub fn condition_number(&self) -> f64 {
        let sv = self.0.clone().svd(false, false).singular_values;
        sv.max() / sv.min()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangentState {
    pub x: GroupPoint,
    pub alpha: AlgebraElement,
}

impl TangentState {
    /// The actual tangent vector `x · rep(α)`.
    pub fn base_velocity(&self, algebra: &LieAlgebra) -> Result<DMatrix<f64>> {
        let rep = algebra.require_rep()?;
        Ok(self.x.matrix() * rep.embed(&self.alpha)?)
    }
}

/// A vector `λ_x a ∂x + b ∂α` on `TG`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondTangentVector {
    pub a: AlgebraElement,
    pub b: AlgebraElement,
}

impl SecondTangentVector {
    pub fn base_velocity(&self, algebra: &LieAlgebra, x: &GroupPoint) -> Result<DMatrix<f64>> {
        let rep = algebra.require_rep()?;
        Ok(x.matrix() * rep.embed(&self.a)?)
    }
}

/// Sampled solution of the canonical SODE.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicTrajectory {
    pub times: Vec<f64>,
    pub points: Vec<DMatrix<f64>>,
    pub velocities: Vec<DMatrix<f64>>,
}

impl GeodesicTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn endpoint(&self) -> (&DMatrix<f64>, &DMatrix<f64>) {
        (
            self.points.last().expect("trajectory has samples"),
            self.velocities.last().expect("trajectory has samples"),
        )
    }
}

pub fn canonical_spray(algebra: &LieAlgebra, state: &TangentState) -> Result<SecondTangentVector> {
    algebra.require_rep()?;
    let n = algebra.dim();
    if state.alpha.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: state.alpha.dim(),
        });
    }
    Ok(SecondTangentVector {
        a: state.alpha.clone(),
        b: AlgebraElement::zeros(n),
    })
}

/// Index `k` with `X^k ≈ 0`, if `X` is nilpotent.
pub fn nilpotency_index(x: &DMatrix<f64>) -> Option<usize> {
    let m = x.nrows();
    let scale = x.norm();
    if scale == 0.0 {
        return Some(1);
    }
    let mut power = x.clone();
    for k in 2..=m {
        power = &power * x;
        if power.norm() <= 64.0 * f64::EPSILON * scale.powi(k as i32) {
            return Some(k);
        }
    }
    None
}

/// Matrix exponential. Nilpotent inputs use the terminating power series;
/// everything else goes through Padé scaling-and-squaring.
pub fn matrix_exp(x: &DMatrix<f64>) -> DMatrix<f64> {
    match nilpotency_index(x) {
        Some(k) => {
            let m = x.nrows();
            let mut sum = DMatrix::identity(m, m);
            let mut term = DMatrix::identity(m, m);
            for j in 1..k {
                term = &term * x / j as f64;
                sum += &term;
            }
            sum
        }
        None => x.exp(),
    }
}

/// `x0 · exp(t · rep(α))`.
pub fn exp_orbit(
    algebra: &LieAlgebra,
    x0: &GroupPoint,
    alpha: &AlgebraElement,
    t: f64,
) -> Result<GroupPoint> {
    let rep = algebra.require_rep()?;
    let gen = rep.embed(alpha)? * t;
    Ok(GroupPoint(x0.matrix() * matrix_exp(&gen)))
}

/// Right-hand side of `M̈ = Ṁ M⁻¹ Ṁ`.
fn sode_accel(m: &DMatrix<f64>, v: &DMatrix<f64>, step: usize) -> Result<DMatrix<f64>> {
    let lu = m.clone().lu();
    let det = lu.determinant();
    if !det.is_finite() || det.abs() < SINGULAR_DET {
        return Err(Error::SingularMatrix { det, step });
    }
    let inv = lu.try_inverse().ok_or(Error::SingularMatrix { det, step })?;
    Ok(v * inv * v)
}

/// Classical fixed-step RK4 on the first-order system `(M, Ṁ)`.
pub fn integrate_canonical_sode(
    x0: &GroupPoint,
    v0: &DMatrix<f64>,
    t_end: f64,
    steps: usize,
) -> Result<GeodesicTrajectory> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    if !t_end.is_finite() {
        return Err(Error::InvalidArgument("t_end must be finite".into()));
    }
    if v0.shape() != x0.matrix().shape() {
        return Err(Error::DimensionMismatch {
            expected: x0.matrix().nrows(),
            found: v0.nrows(),
        });
    }
    let h = t_end / steps as f64;
    let mut m = x0.matrix().clone();
    let mut v = v0.clone();
    let mut times = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    let mut velocities = Vec::with_capacity(steps + 1);
    times.push(0.0);
    points.push(m.clone());
    velocities.push(v.clone());

    for step in 1..=steps {
        let k1m = v.clone();
        let k1v = sode_accel(&m, &v, step)?;
        let (m2, v2) = (&m + &k1m * (h / 2.0), &v + &k1v * (h / 2.0));
        let k2m = v2.clone();
        let k2v = sode_accel(&m2, &v2, step)?;
        let (m3, v3) = (&m + &k2m * (h / 2.0), &v + &k2v * (h / 2.0));
        let k3m = v3.clone();
        let k3v = sode_accel(&m3, &v3, step)?;
        let (m4, v4) = (&m + &k3m * h, &v + &k3v * h);
        let k4m = v4.clone();
        let k4v = sode_accel(&m4, &v4, step)?;

        m += (k1m + k2m * 2.0 + k3m * 2.0 + k4m) * (h / 6.0);
        v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);

        times.push(step as f64 * h);
        points.push(m.clone());
        velocities.push(v.clone());
    }
    let det = m.determinant();
    if det.abs() < SINGULAR_DET {
        return Err(Error::SingularMatrix { det, step: steps });
    }
    Ok(GeodesicTrajectory {
        times,
        points,
        velocities,
    })
}

fn check_pair(algebra: &LieAlgebra, alpha: &AlgebraElement, w: &SecondTangentVector) -> Result<()> {
    for d in [alpha.dim(), w.a.dim(), w.b.dim()] {
        if d != algebra.dim() {
            return Err(Error::DimensionMismatch {
                expected: algebra.dim(),
                found: d,
            });
        }
    }
    Ok(())
}

/// Fiber component of `v(w)` at `(x, α)`: `½[w.a, α] + w.b`.
pub fn vertical_apply(
    algebra: &LieAlgebra,
    alpha: &AlgebraElement,
    w: &SecondTangentVector,
) -> Result<AlgebraElement> {
    check_pair(algebra, alpha, w)?;
    Ok(algebra.bracket(&w.a, alpha)?.scale(0.5).add(&w.b))
}

/// `h(w) = (w.a, -½[w.a, α])`, independent of `w.b`.
pub fn horizontal_apply(
    algebra: &LieAlgebra,
    alpha: &AlgebraElement,
    w: &SecondTangentVector,
) -> Result<SecondTangentVector> {
    check_pair(algebra, alpha, w)?;
    Ok(SecondTangentVector {
        a: w.a.clone(),
        b: algebra.bracket(&w.a, alpha)?.scale(-0.5),
    })
}

/// Max relative deviation from `f(sα) = s^ℓ f(α)` over random `α ∈ ℝⁿ` and
/// `s ∈ (0, 2]`.
pub fn homogeneity_check<F>(dim: usize, f: F, degree: f64, samples: usize, seed: u64) -> f64
where
    F: Fn(&AlgebraElement) -> f64,
{
    const EPS: f64 = 1e-30;
    let mut rng = sampling::rng(seed);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let alpha = sampling::normal_element(&mut rng, dim);
        let s = sampling::positive_scale(&mut rng, 2.0);
        let base = f(&alpha);
        let scaled = f(&alpha.scale(s));
        worst = worst.max((scaled - s.powf(degree) * base).abs() / (base.abs() + EPS));
    }
    worst
}

/// Fiber coefficients of the deformed spray `S - 2𝒫C`: `f(α) - 2𝒫(α) α`.
pub fn projective_deform<F, P>(f_fiber: F, factor: P, alpha: &AlgebraElement) -> AlgebraElement
where
    F: Fn(&AlgebraElement) -> AlgebraElement,
    P: Fn(&AlgebraElement) -> f64,
{
    f_fiber(alpha).sub(&alpha.scale(2.0 * factor(alpha)))
}

/// Base curve of the projectively deformed canonical flow
/// `ẋ = x · rep(α)`, `α̇ = -2𝒫(α) α`, integrated by RK4.
pub fn integrate_deformed_flow<P>(
    algebra: &LieAlgebra,
    x0: &GroupPoint,
    alpha0: &AlgebraElement,
    factor: P,
    t_end: f64,
    steps: usize,
) -> Result<Vec<DMatrix<f64>>>
where
    P: Fn(&AlgebraElement) -> f64,
{
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let rep = algebra.require_rep()?;
    let zero_fiber = |a: &AlgebraElement| AlgebraElement::zeros(a.dim());
    let rhs = |x: &DMatrix<f64>, a: &AlgebraElement| -> Result<(DMatrix<f64>, AlgebraElement)> {
        Ok((x * rep.embed(a)?, projective_deform(zero_fiber, &factor, a)))
    };
    let h = t_end / steps as f64;
    let mut x = x0.matrix().clone();
    let mut a = alpha0.clone();
    let mut out = Vec::with_capacity(steps + 1);
    out.push(x.clone());
    for _ in 0..steps {
        let (k1x, k1a) = rhs(&x, &a)?;
        let (k2x, k2a) = rhs(&(&x + &k1x * (h / 2.0)), &a.add(&k1a.scale(h / 2.0)))?;
        let (k3x, k3a) = rhs(&(&x + &k2x * (h / 2.0)), &a.add(&k2a.scale(h / 2.0)))?;
        let (k4x, k4a) = rhs(&(&x + &k3x * h), &a.add(&k3a.scale(h)))?;
        x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
        a = a.add(&k1a.add(&k2a.scale(2.0)).add(&k3a.scale(2.0)).add(&k4a).scale(h / 6.0));
        out.push(x.clone());
    }
    Ok(out)
}

/// Cumulative polyline length (Frobenius distance between consecutive samples).
pub fn polyline_arclength(points: &[DMatrix<f64>]) -> Vec<f64> {
    let mut acc = Vec::with_capacity(points.len());
    let mut s = 0.0;
    acc.push(0.0);
    for w in points.windows(2) {
        s += (&w[1] - &w[0]).norm();
        acc.push(s);
    }
    acc
}

/// Point at arclength `s` along the polyline, by linear interpolation.
pub fn point_at_arclength(points: &[DMatrix<f64>], cumulative: &[f64], s: f64) -> DMatrix<f64> {
    let idx = cumulative.partition_point(|c| *c < s);
    if idx == 0 {
        return points[0].clone();
    }
    if idx >= points.len() {
        return points[points.len() - 1].clone();
    }
    let (s0, s1) = (cumulative[idx - 1], cumulative[idx]);
    let w = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
    &points[idx - 1] * (1.0 - w) + &points[idx] * w
}

/// Max distance between two curves after arclength reparametrization over the
/// shorter of the two lengths. This bounds their Hausdorff distance from above
/// on the common arc.
pub fn arclength_gap(a: &[DMatrix<f64>], b: &[DMatrix<f64>], samples: usize) -> f64 {
    let (ca, cb) = (polyline_arclength(a), polyline_arclength(b));
    let len = ca.last().copied().unwrap_or(0.0).min(cb.last().copied().unwrap_or(0.0));
    (0..=samples)
        .map(|i| {
            let s = len * i as f64 / samples as f64;
            (point_at_arclength(a, &ca, s) - point_at_arclength(b, &cb, s)).norm()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_algebra::catalog;

    fn el(c: &[f64]) -> AlgebraElement {
        AlgebraElement::from_slice(c)
    }

    fn rodrigues_z(theta: f64) -> DMatrix<f64> {
        let (s, c) = theta.sin_cos();
        DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0])
    }

    #[test]
    fn canonical_spray_has_no_fiber_term() {
        let ab = catalog("abelian(2)").unwrap();
        let state = TangentState {
            x: GroupPoint::identity(2),
            alpha: el(&[1.0, 2.0]),
        };
        let s = canonical_spray(&ab, &state).unwrap();
        assert_eq!(s.b, AlgebraElement::zeros(2));
        let vel = s.base_velocity(&ab, &state.x).unwrap();
        assert_eq!(vel, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]));

        let h = catalog("heisenberg3").unwrap();
        let x = exp_orbit(&h, &GroupPoint::identity(3), &el(&[1.0, 0.0, 0.0]), 1.0).unwrap();
        let state = TangentState { x: x.clone(), alpha: el(&[0.0, 1.0, 0.0]) };
        let s = canonical_spray(&h, &state).unwrap();
        // exp(E12) = I + E12; (I + E12) E23 = E23 + E13
        let expected = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(s.base_velocity(&h, &x).unwrap(), expected);
    }

    #[test]
    fn missing_rep() {
        let a = LieAlgebra::from_brackets(2, vec!["a".into(), "b".into()], &[]).unwrap();
        let state = TangentState { x: GroupPoint::identity(2), alpha: el(&[1.0, 0.0]) };
        assert_eq!(canonical_spray(&a, &state), Err(Error::MissingRep));
        assert!(matches!(
            exp_orbit(&a, &GroupPoint::identity(2), &el(&[1.0, 0.0]), 1.0),
            Err(Error::MissingRep)
        ));
    }

    #[test]
    fn exp_orbit_examples() {
        let so3 = catalog("so3").unwrap();
        let x0 = GroupPoint::new(DMatrix::from_row_slice(3, 3, &[2.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
        let same = exp_orbit(&so3, &x0, &AlgebraElement::zeros(3), 5.0).unwrap();
        assert_eq!(same, x0);

        let h = catalog("heisenberg3").unwrap();
        let xgen = h.rep().unwrap().embed(&el(&[1.0, 1.0, 0.0])).unwrap();
        let id = DMatrix::<f64>::identity(3, 3);
        let poly = &id + &xgen + &xgen * &xgen / 2.0;
        let got = exp_orbit(&h, &GroupPoint::identity(3), &el(&[1.0, 1.0, 0.0]), 1.0).unwrap();
        assert_eq!(got.matrix(), &poly);
        assert_eq!(nilpotency_index(&xgen), Some(3));

        let rot = exp_orbit(&so3, &GroupPoint::identity(3), &el(&[0.0, 0.0, 1.0]), std::f64::consts::FRAC_PI_2).unwrap();
        assert!((rot.matrix() - rodrigues_z(std::f64::consts::FRAC_PI_2)).amax() < 1e-14);
    }

    #[test]
    fn zero_velocity_sode_is_constant() {
        let x0 = GroupPoint::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 3.0])).unwrap();
        let traj = integrate_canonical_sode(&x0, &DMatrix::zeros(2, 2), 2.0, 10).unwrap();
        assert_eq!(traj.len(), 11);
        assert!(traj.points.iter().all(|p| p == x0.matrix()));
        assert_eq!(traj.times[10], 2.0);
    }

    #[test]
    fn sode_matches_exponential() {
        let h = catalog("heisenberg3").unwrap();
        let alpha = el(&[1.0, 1.0, 0.0]);
        let v0 = h.rep().unwrap().embed(&alpha).unwrap();
        let traj = integrate_canonical_sode(&GroupPoint::identity(3), &v0, 1.0, 1000).unwrap();
        let exact = exp_orbit(&h, &GroupPoint::identity(3), &alpha, 1.0).unwrap();
        assert!((traj.endpoint().0 - exact.matrix()).amax() <= 1e-8);

        let so3 = catalog("so3").unwrap();
        let v0 = so3.rep().unwrap().embed(&el(&[0.0, 1.0, 0.0])).unwrap();
        let traj = integrate_canonical_sode(&GroupPoint::identity(3), &v0, 1.0, 1000).unwrap();
        // rotation by 1 rad about the second axis
        let (s, c) = 1.0_f64.sin_cos();
        let rod = DMatrix::from_row_slice(3, 3, &[c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c]);
        assert!((traj.endpoint().0 - rod).amax() <= 1e-8);
    }

    #[test]
    fn sode_rejects_bad_input() {
        let x0 = GroupPoint::identity(2);
        assert!(matches!(
            integrate_canonical_sode(&x0, &DMatrix::zeros(2, 2), 1.0, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(GroupPoint::new(DMatrix::zeros(2, 2)).is_err());
        // The exact flow e^{-2t} I never degenerates, but a single step of
        // size 1 puts the midpoint stage at I + ½(-2I) = 0.
        let err = integrate_canonical_sode(&x0, &(DMatrix::identity(2, 2) * -2.0), 1.0, 1);
        assert!(matches!(err, Err(Error::SingularMatrix { .. })), "{err:?}");
    }

    #[test]
    fn projector_examples() {
        let h = catalog("heisenberg3").unwrap();
        let alpha = el(&[0.0, 1.0, 0.0]);
        let w = SecondTangentVector { a: el(&[1.0, 0.0, 0.0]), b: AlgebraElement::zeros(3) };
        assert_eq!(vertical_apply(&h, &alpha, &w).unwrap(), el(&[0.0, 0.0, 0.5]));
        assert_eq!(horizontal_apply(&h, &alpha, &w).unwrap().b, el(&[0.0, 0.0, -0.5]));

        let ab = catalog("abelian(3)").unwrap();
        let w = SecondTangentVector { a: el(&[1.0, 2.0, 3.0]), b: el(&[4.0, 5.0, 6.0]) };
        assert_eq!(vertical_apply(&ab, &alpha, &w).unwrap(), w.b);
        let hw = horizontal_apply(&ab, &alpha, &w).unwrap();
        assert_eq!((hw.a, hw.b), (w.a.clone(), AlgebraElement::zeros(3)));

        let vert = SecondTangentVector { a: AlgebraElement::zeros(3), b: el(&[1.0, -1.0, 2.0]) };
        let hv = horizontal_apply(&h, &alpha, &vert).unwrap();
        assert_eq!((hv.a, hv.b), (AlgebraElement::zeros(3), AlgebraElement::zeros(3)));

        let so3 = catalog("so3").unwrap();
        let state = TangentState { x: GroupPoint::identity(3), alpha: el(&[0.3, -1.2, 2.0]) };
        let s = canonical_spray(&so3, &state).unwrap();
        assert_eq!(vertical_apply(&so3, &state.alpha, &s).unwrap(), AlgebraElement::zeros(3));
    }

    #[test]
    fn homogeneity_examples() {
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 1.0, 0.1, 0.0, 0.1, 3.0]);
        let energy = |a: &AlgebraElement| 0.5 * a.as_vector().dot(&(&g * a.as_vector()));
        assert!(homogeneity_check(3, energy, 2.0, 200, 7) <= 1e-12);
        assert!(homogeneity_check(3, |a| (2.0 * energy(a)).sqrt(), 1.0, 200, 7) <= 1e-12);
        assert!(homogeneity_check(3, |a| energy(a) + 1.0, 2.0, 200, 7) > 0.1);
    }

    #[test]
    fn projective_deform_examples() {
        let alpha = el(&[3.0, 4.0]);
        let f = |a: &AlgebraElement| a.scale(0.25);
        assert_eq!(projective_deform(f, |_| 0.0, &alpha), f(&alpha));
        let zero = |a: &AlgebraElement| AlgebraElement::zeros(a.dim());
        assert_eq!(projective_deform(zero, |a| a.norm(), &alpha), el(&[-30.0, -40.0]));
    }

    #[test]
    fn deformed_flow_traces_the_same_curve() {
        let h = catalog("heisenberg3").unwrap();
        let x0 = GroupPoint::identity(3);
        let alpha0 = el(&[1.0, 0.5, -0.3]);
        let speed = alpha0.norm();
        let deformed = integrate_deformed_flow(&h, &x0, &alpha0, |a| a.norm(), 1.0, 4000).unwrap();
        // α(t) = α0 / (1 + 2|α0| t); the base curve reaches flow parameter
        // τ = ln(1 + 2|α0|) / (2|α0|). Sample the undeformed orbit a bit past it.
        let tau = (1.0 + 2.0 * speed).ln() / (2.0 * speed);
        let original: Vec<_> = (0..=4000)
            .map(|i| {
                exp_orbit(&h, &x0, &alpha0, 1.2 * tau * i as f64 / 4000.0)
                    .unwrap()
                    .into_matrix()
            })
            .collect();
        let gap = arclength_gap(&deformed, &original, 500);
        assert!(gap <= 1e-6, "gap {gap:e}");
        // the deformed endpoint sits on the orbit at parameter τ
        let end = exp_orbit(&h, &x0, &alpha0, tau).unwrap();
        assert!((deformed.last().unwrap() - end.matrix()).amax() < 1e-9);
    }
}

//! Geodesic-orbit structures on the plane `ℝ² = E(2)/SO(2)`.
//!
//! The Euclidean group acts on `ℝ²` by `(R_θ, b)·x = R_θ x + b`; its algebra is
//! represented by `3 × 3` matrices with a rotation block `ωJ` and a translation
//! column. A homogeneous lift picks the geodesic vector `σ(v) ∈ 𝔢(2)` of each
//! initial velocity `v`, and the geodesic is the orbit `exp(tσ(v))·o`. The
//! one-parameter family used here is
//!
//! ```text
//! σ_κ(v) = [[0, -κ|v|, v1], [κ|v|, 0, v2], [0, 0, 0]]
//! ```
//!
//! whose geodesics satisfy `ẍ = κ|ẋ| J ẋ`: circles of radius `1/|κ|` traversed
//! counter-clockwise for `κ > 0`, straight lines for `κ = 0`.
//!
//! An `SO(2)`-invariant inner product on the plane is a multiple of the
//! identity: invariance under the quarter turn `J` forces `g11 = g22` and
//! `g12 = -g12`. So the invariant metric candidates are `c·δ`, `c > 0`, and
//! invariant metrizability of the structure is decided by checking whether
//! `E = ½|v|²` is horizontally constant for the spray's nonlinear connection.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::sampling;
use rand::Rng;

/// Below this `|ωt|` the translation part of the `se(2)` exponential uses its
/// Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-4;

/// The quarter turn `J = [[0, -1], [1, 0]]`.
fn quarter_turn(v: &Vector2<f64>) -> Vector2<f64> {
    Vector2::new(-v.y, v.x)
}

pub fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// The isotropy element `R_θ` as a `3 × 3` group matrix.
pub fn isotropy_matrix(theta: f64) -> Matrix3<f64> {
    let r = rotation(theta);
    Matrix3::new(r[(0, 0)], r[(0, 1)], 0.0, r[(1, 0)], r[(1, 1)], 0.0, 0.0, 0.0, 1.0)
}

pub fn sigma_kappa(kappa: f64, v: &Vector2<f64>) -> Matrix3<f64> {
    let w = kappa * v.norm();
    Matrix3::new(0.0, -w, v.x, w, 0.0, v.y, 0.0, 0.0, 0.0)
}

/// A map from `T_oℝ²` into `𝔢(2)` selecting geodesic vectors.
pub trait HomogeneousLift {
    fn evaluate(&self, v: &Vector2<f64>) -> Matrix3<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaKappa {
    pub kappa: f64,
}

impl HomogeneousLift for SigmaKappa {
    fn evaluate(&self, v: &Vector2<f64>) -> Matrix3<f64> {
        sigma_kappa(self.kappa, v)
    }
}

/// Wraps an arbitrary closure, e.g. to check a candidate lift.
pub struct FnLift<F>(pub F);

impl<F> HomogeneousLift for FnLift<F>
where
    F: Fn(&Vector2<f64>) -> Matrix3<f64>,
{
    fn evaluate(&self, v: &Vector2<f64>) -> Matrix3<f64> {
        (self.0)(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoState {
    pub position: Vector2<f64>,
    pub velocity: Vector2<f64>,
}

impl GoState {
    pub fn new(position: Vector2<f64>, velocity: Vector2<f64>) -> Self {
        Self { position, velocity }
    }

    pub fn speed(&self) -> f64 {
        self.velocity.norm()
    }
}

/// Projection of `exp(tσ_κ(v))·o` and its velocity, in closed form.
pub fn go_geodesic_exp(kappa: f64, v: &Vector2<f64>, t: f64) -> GoState {
    let omega = kappa * v.norm();
    let theta = omega * t;
    // position = t (S(θ) v + C(θ) J v), S = sinθ/θ, C = (1 - cosθ)/θ
    let (s, c) = if theta.abs() < SERIES_THRESHOLD {
        let th2 = theta * theta;
        (
            1.0 - th2 / 6.0 + th2 * th2 / 120.0,
            theta * (0.5 - th2 / 24.0 + th2 * th2 / 720.0),
        )
    } else {
        let half = (0.5 * theta).sin();
        (theta.sin() / theta, 2.0 * half * half / theta)
    };
    let jv = quarter_turn(v);
    GoState {
        position: (v * s + jv * c) * t,
        velocity: rotation(theta) * v,
    }
}

/// Geodesic through an arbitrary point: translates of geodesics are geodesics.
pub fn go_geodesic_from(kappa: f64, start: &GoState, t: f64) -> GoState {
    let g = go_geodesic_exp(kappa, &start.velocity, t);
    GoState {
        position: start.position + g.position,
        velocity: g.velocity,
    }
}

/// Fiber part of the geodesic spray: `ẍ = f(ẋ) = κ|ẋ| J ẋ`.
pub fn spray_fiber(kappa: f64, y: &Vector2<f64>) -> Vector2<f64> {
    quarter_turn(y) * (kappa * y.norm())
}

fn go_rhs(kappa: f64, s: &GoState) -> GoState {
    GoState {
        position: s.velocity,
        velocity: spray_fiber(kappa, &s.velocity),
    }
}

fn axpy(s: &GoState, h: f64, k: &GoState) -> GoState {
    GoState {
        position: s.position + k.position * h,
        velocity: s.velocity + k.velocity * h,
    }
}

/// RK4 on the geodesic system; returns `steps + 1` samples. A negative
/// `t_end` integrates backwards.
pub fn go_geodesic_ode(kappa: f64, state0: &GoState, t_end: f64, steps: usize) -> Result<Vec<GoState>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    if !t_end.is_finite() {
        return Err(Error::InvalidArgument("t_end must be finite".into()));
    }
    let h = t_end / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = *state0;
    out.push(s);
    for _ in 0..steps {
        let k1 = go_rhs(kappa, &s);
        let k2 = go_rhs(kappa, &axpy(&s, h / 2.0, &k1));
        let k3 = go_rhs(kappa, &axpy(&s, h / 2.0, &k2));
        let k4 = go_rhs(kappa, &axpy(&s, h, &k3));
        s = GoState {
            position: s.position + (k1.position + k2.position * 2.0 + k3.position * 2.0 + k4.position) * (h / 6.0),
            velocity: s.velocity + (k1.velocity + k2.velocity * 2.0 + k3.velocity * 2.0 + k4.velocity) * (h / 6.0),
        };
        out.push(s);
    }
    Ok(out)
}

/// Velocity obtained by pushing `v` forward with the group element
/// `exp(tσ_κ(v))`, computed from the `3 × 3` matrix exponential.
pub fn pushed_forward_velocity(kappa: f64, v: &Vector2<f64>, t: f64) -> Vector2<f64> {
    let g = (sigma_kappa(kappa, v) * t).exp();
    let lifted = g * Vector3::new(v.x, v.y, 0.0);
    Vector2::new(lifted.x, lifted.y)
}

pub fn curvature_kappa(kappa: f64, y: &Vector2<f64>) -> Vector2<f64> {
    let k2 = kappa * kappa;
    Vector2::new(-k2 * y.y, k2 * y.x)
}

/// `N^i_j = -½ ∂f^i/∂y^j`, entry `(i, j)`, by central differences with
/// `h = 1e-5 (1 + |y|)`.
pub fn nonlinear_connection(kappa: f64, y: &Vector2<f64>) -> Matrix2<f64> {
    let h = 1e-5 * (1.0 + y.norm());
    let mut n = Matrix2::zeros();
    for j in 0..2 {
        let mut step = Vector2::zeros();
        step[j] = h;
        let df = (spray_fiber(kappa, &(y + step)) - spray_fiber(kappa, &(y - step))) / (2.0 * h);
        n[(0, j)] = -0.5 * df.x;
        n[(1, j)] = -0.5 * df.y;
    }
    n
}

/// Curvature `R(∂x1, ∂x2)` of the spray, from finite differences of its
/// connection. The spray is position independent, so
/// `R^i = N^l_1 ∂N^i_2/∂y^l - N^l_2 ∂N^i_1/∂y^l`; the orientation is the one
/// giving `(0, 1)` at `κ = 1, y = (1, 0)`.
pub fn curvature_numeric(kappa: f64, y: &Vector2<f64>) -> Result<Vector2<f64>> {
    if y.norm() == 0.0 {
        return Err(Error::ZeroVelocity);
    }
    let h = 1e-5 * (1.0 + y.norm());
    let n = nonlinear_connection(kappa, y);
    // dn[l] = ∂N/∂y^l
    let dn: Vec<Matrix2<f64>> = (0..2)
        .map(|l| {
            let mut step = Vector2::zeros();
            step[l] = h;
            (nonlinear_connection(kappa, &(y + step)) - nonlinear_connection(kappa, &(y - step))) / (2.0 * h)
        })
        .collect();
    let mut r = Vector2::zeros();
    for i in 0..2 {
        for (l, d) in dn.iter().enumerate() {
            r[i] += n[(l, 0)] * d[(i, 1)] - n[(l, 1)] * d[(i, 0)];
        }
    }
    Ok(r)
}

/// Max residuals of the homogeneous-lift axioms over sampled inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftAxiomReport {
    /// `|π_* σ(v) - v|`.
    pub projection: f64,
    /// `‖σ(sv) - sσ(v)‖` for `s ∈ (0, 2]`.
    pub positive_homogeneity: f64,
    /// `‖σ(R_θ v) - Ad_{R_θ} σ(v)‖`.
    pub equivariance: f64,
    /// `‖σ(sv) - sσ(v)‖` for `s ∈ [-2, 0)`. Not an axiom the family satisfies
    /// for `κ ≠ 0`; reported separately.
    pub negative_homogeneity: f64,
}

impl LiftAxiomReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.projection <= tol && self.positive_homogeneity <= tol && self.equivariance <= tol
    }
}

pub fn projection_residual<L: HomogeneousLift + ?Sized>(lift: &L, v: &Vector2<f64>) -> f64 {
    let x = lift.evaluate(v);
    (Vector2::new(x[(0, 2)], x[(1, 2)]) - v).norm()
}

/// Entrywise max of `σ(sv) - sσ(v)`.
pub fn homogeneity_residual<L: HomogeneousLift + ?Sized>(lift: &L, v: &Vector2<f64>, s: f64) -> f64 {
    (lift.evaluate(&(v * s)) - lift.evaluate(v) * s).amax()
}

pub fn equivariance_residual<L: HomogeneousLift + ?Sized>(lift: &L, v: &Vector2<f64>, theta: f64) -> f64 {
    let h = isotropy_matrix(theta);
    let h_inv = isotropy_matrix(-theta);
    (lift.evaluate(&(rotation(theta) * v)) - h * lift.evaluate(v) * h_inv).amax()
}

pub fn lift_axiom_report<L: HomogeneousLift + ?Sized>(lift: &L, samples: usize, seed: u64) -> LiftAxiomReport {
    let mut rng = sampling::rng(seed);
    let mut report = LiftAxiomReport {
        projection: 0.0,
        positive_homogeneity: 0.0,
        equivariance: 0.0,
        negative_homogeneity: 0.0,
    };
    for _ in 0..samples.max(1) {
        let v = Vector2::from_vec(sampling::normal_vec(&mut rng, 2));
        let s = sampling::positive_scale(&mut rng, 2.0);
        let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        report.projection = report.projection.max(projection_residual(lift, &v));
        report.positive_homogeneity = report.positive_homogeneity.max(homogeneity_residual(lift, &v, s));
        report.equivariance = report.equivariance.max(equivariance_residual(lift, &v, theta));
        report.negative_homogeneity = report.negative_homogeneity.max(homogeneity_residual(lift, &v, -s));
    }
    report
}

/// Horizon of the first-integral check.
pub const FIRST_INTEGRAL_HORIZON: f64 = 5.0;

/// Max `|L(t) - L(0)|` over RK4 geodesics on `t ∈ [0, 5]` from random initial
/// data.
pub fn go_first_integral_deviation<F>(kappa: f64, test_fn: F, samples: usize, steps: usize, seed: u64) -> Result<f64>
where
    F: Fn(&GoState) -> f64,
{
    let mut rng = sampling::rng(seed);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let c = sampling::normal_vec(&mut rng, 4);
        let start = GoState::new(Vector2::new(c[0], c[1]), Vector2::new(c[2], c[3]));
        let l0 = test_fn(&start);
        for s in go_geodesic_ode(kappa, &start, FIRST_INTEGRAL_HORIZON, steps)? {
            worst = worst.max((test_fn(&s) - l0).abs());
        }
    }
    Ok(worst)
}

/// First-integral check for the invariant function `L(p, v) = |v|²`.
pub fn go_first_integral_check(kappa: f64, samples: usize, steps: usize, seed: u64) -> Result<f64> {
    go_first_integral_deviation(kappa, |s| s.velocity.norm_squared(), samples, steps, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoVerdict {
    Metrizable,
    NotInvariantMetrizable,
}

impl std::fmt::Display for GoVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Metrizable => "Metrizable",
            Self::NotInvariantMetrizable => "NotInvariantMetrizable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoMetrizabilityReport {
    pub kappa: f64,
    pub verdict: GoVerdict,
    /// `max |N^j_i ∂E/∂y^j|` over the sampled velocities, for `E = ½|y|²`.
    pub max_residual: f64,
    pub samples: usize,
}

pub const GO_METRIZABLE_TOL: f64 = 1e-9;

/// Sampled velocities: 32 directions on each of the radii 0.5, 1, 2.
fn velocity_grid() -> Vec<Vector2<f64>> {
    let mut out = Vec::with_capacity(96);
    for r in [0.5, 1.0, 2.0] {
        for k in 0..32 {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / 32.0 + 0.1;
            out.push(Vector2::new(phi.cos(), phi.sin()) * r);
        }
    }
    out
}

/// Tests whether the only invariant candidates `E = ½c|y|²` are horizontally
/// constant. `∂E/∂x = 0`, so the check is `N^j_i y_j = 0`; `c` drops out.
pub fn go_invariant_metrizability(kappa: f64) -> GoMetrizabilityReport {
    let grid = velocity_grid();
    let max_residual = grid
        .iter()
        .map(|y| (nonlinear_connection(kappa, y).transpose() * y).amax())
        .fold(0.0, f64::max);
    GoMetrizabilityReport {
        kappa,
        verdict: if max_residual <= GO_METRIZABLE_TOL {
            GoVerdict::Metrizable
        } else {
            GoVerdict::NotInvariantMetrizable
        },
        max_residual,
        samples: grid.len(),
    }
}

/// `(d/dt F(γ̇)) / (2F)` along a g.o. geodesic with `F = |γ̇|`, by a central
/// difference of the closed-form velocity (`dt = 1e-6`).
pub fn go_projective_factor(kappa: f64, v: &Vector2<f64>, t: f64) -> Result<f64> {
    const DT: f64 = 1e-6;
    let f = go_geodesic_exp(kappa, v, t).speed();
    if f == 0.0 {
        return Err(Error::ZeroFinslerNorm);
    }
    let df = (go_geodesic_exp(kappa, v, t + DT).speed() - go_geodesic_exp(kappa, v, t - DT).speed()) / (2.0 * DT);
    Ok(df / (2.0 * f))
}

/// `‖γ_{p,-v}(t) - γ_{p,v}(-t)‖`, both integrated numerically.
pub fn reversibility_gap(kappa: f64, start: &GoState, t: f64, steps: usize) -> Result<f64> {
    let reversed_start = GoState::new(start.position, -start.velocity);
    let forward = go_geodesic_ode(kappa, &reversed_start, t, steps)?;
    let backward = go_geodesic_ode(kappa, start, -t, steps)?;
    Ok((forward[steps].position - backward[steps].position).norm())
}

/// An element `x ↦ R_θ x + b` of `E(2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanMotion {
    pub theta: f64,
    pub translation: Vector2<f64>,
}

impl EuclideanMotion {
    pub fn apply(&self, s: &GoState) -> GoState {
        let r = rotation(self.theta);
        GoState {
            position: r * s.position + self.translation,
            velocity: r * s.velocity,
        }
    }
}

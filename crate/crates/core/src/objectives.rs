//! Smooth, strongly convex objective oracles.
//!
//! Two families are provided: quadratics with a prescribed spectrum and
//! ℓ2-regularized logistic regression on seeded random data. Both expose
//! their strong-convexity modulus `mu`, gradient Lipschitz constant `L`
//! and (cached) minimizer through the [`Objective`] trait, which is what the
//! integrators, certificates and analysis routines consume.

use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;

/// First-order oracle for a μ-strongly-convex, L-smooth function.
///
/// Implementations are immutable after construction and may be shared
/// between threads.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &Vector) -> f64;
    fn gradient(&self, x: &Vector) -> Vector;
    /// Strong-convexity modulus.
    fn mu(&self) -> f64;
    /// Lipschitz constant of the gradient.
    fn lipschitz(&self) -> f64;
    fn minimizer(&self) -> Option<&Vector>;
    fn min_value(&self) -> Option<f64>;

    /// `f(x) - f*` when the minimum value is known.
    fn gap(&self, x: &Vector) -> Option<f64> {
        self.min_value().map(|f_star| self.value(x) - f_star)
    }
}

/// `f(x) = ½ (x - c)ᵀ B diag(λ) Bᵀ (x - c)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuadraticRecord", into = "QuadraticRecord")]
pub struct QuadraticObjective {
    eigenvalues: Vector,
    basis: DMatrix<f64>,
    center: Vector,
    hessian: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadraticRecord {
    eigenvalues: Vec<f64>,
    /// Row-major.
    basis: Vec<Vec<f64>>,
    center: Vec<f64>,
}

impl QuadraticObjective {
    pub fn new(eigenvalues: Vector, basis: DMatrix<f64>, center: Vector) -> Result<Self> {
        let dim = eigenvalues.len();
        if dim == 0 {
            return Err(Error::InvalidDimension("empty spectrum".into()));
        }
        if basis.nrows() != dim || basis.ncols() != dim || center.len() != dim {
            return Err(Error::InvalidDimension(format!(
                "spectrum has {dim} entries, basis is {}x{}, center has {}",
                basis.nrows(),
                basis.ncols(),
                center.len()
            )));
        }
        if eigenvalues.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
            return Err(Error::InvalidConstants(
                "eigenvalues must be finite and positive".into(),
            ));
        }
        if basis.iter().chain(center.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput("basis or center".into()));
        }
        let gram = basis.transpose() * &basis;
        let defect = (gram - DMatrix::<f64>::identity(dim, dim)).amax();
        if defect > 1e-12 {
            return Err(Error::InvalidConstants(format!(
                "basis is not orthonormal (max deviation {defect:e})"
            )));
        }
        let hessian = &basis * DMatrix::from_diagonal(&eigenvalues) * basis.transpose();
        Ok(Self {
            eigenvalues,
            basis,
            center,
            hessian,
        })
    }

    /// Axis-aligned quadratic `½ Σ λᵢ (xᵢ - cᵢ)²`.
    pub fn diagonal(eigenvalues: Vector, center: Vector) -> Result<Self> {
        let dim = eigenvalues.len();
        Self::new(eigenvalues, DMatrix::identity(dim, dim), center)
    }

    pub fn eigenvalues(&self) -> &Vector {
        &self.eigenvalues
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn hessian(&self) -> &DMatrix<f64> {
        &self.hessian
    }

    /// Unit eigenvector paired with `eigenvalues()[i]`.
    pub fn eigenvector(&self, i: usize) -> Vector {
        self.basis.column(i).into_owned()
    }
}

impl Objective for QuadraticObjective {
    fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        let y = self.basis.tr_mul(&(x - &self.center));
        0.5 * y
            .iter()
            .zip(self.eigenvalues.iter())
            .map(|(yi, li)| li * yi * yi)
            .sum::<f64>()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        &self.hessian * (x - &self.center)
    }

    fn mu(&self) -> f64 {
        self.eigenvalues.min()
    }

    fn lipschitz(&self) -> f64 {
        self.eigenvalues.max()
    }

    fn minimizer(&self) -> Option<&Vector> {
        Some(&self.center)
    }

    fn min_value(&self) -> Option<f64> {
        Some(0.0)
    }
}

impl TryFrom<QuadraticRecord> for QuadraticObjective {
    type Error = Error;

    fn try_from(r: QuadraticRecord) -> Result<Self> {
        let dim = r.eigenvalues.len();
        if r.basis.len() != dim || r.basis.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidDimension("basis must be square".into()));
        }
        let basis = DMatrix::from_fn(dim, dim, |i, j| r.basis[i][j]);
        Self::new(
            Vector::from_vec(r.eigenvalues),
            basis,
            Vector::from_vec(r.center),
        )
    }
}

impl From<QuadraticObjective> for QuadraticRecord {
    fn from(q: QuadraticObjective) -> Self {
        let basis = q
            .basis
            .row_iter()
            .map(|row| row.iter().copied().collect())
            .collect();
        Self {
            eigenvalues: q.eigenvalues.iter().copied().collect(),
            basis,
            center: q.center.iter().copied().collect(),
        }
    }
}

/// Builds a quadratic whose spectrum contains `mu` and `l` exactly, with the
/// remaining `dim - 2` eigenvalues uniform on `[mu, l]`, a random orthonormal
/// eigenbasis and a center in `[-1, 1]^dim`. Everything is drawn from `seed`.
pub fn make_quadratic(dim: usize, mu: f64, l: f64, seed: u64) -> Result<QuadraticObjective> {
    if dim < 2 {
        return Err(Error::InvalidDimension(format!(
            "quadratic needs dim >= 2, got {dim}"
        )));
    }
    if !(mu.is_finite() && l.is_finite() && mu > 0.0 && mu <= l) {
        return Err(Error::InvalidConstants(format!(
            "need 0 < mu <= L, got mu={mu}, L={l}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut eigenvalues = vec![mu, l];
    eigenvalues.extend((2..dim).map(|_| rng.random_range(mu..=l)));
    eigenvalues.sort_by(f64::total_cmp);

    let gaussian = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
    let qr = gaussian.qr();
    let r = qr.r();
    let mut basis = qr.q();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            basis.column_mut(j).neg_mut();
        }
    }

    let center = Vector::from_fn(dim, |_, _| rng.random_range(-1.0..=1.0));
    QuadraticObjective::new(Vector::from_vec(eigenvalues), basis, center)
}

/// `f(x) = (1/N) Σ log(1 + exp(-yᵢ aᵢᵀx)) + (λ/2)‖x‖²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LogisticRecord", into = "LogisticRecord")]
pub struct LogisticObjective {
    data: DMatrix<f64>,
    labels: Vector,
    reg: f64,
    lipschitz: f64,
    minimizer: Vector,
    min_value: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LogisticRecord {
    /// Row-major, one row per sample.
    data: Vec<Vec<f64>>,
    labels: Vec<f64>,
    reg: f64,
}

/// Gradient-norm target of the minimizer solve.
const MINIMIZER_TOL: f64 = 1e-12;
const MINIMIZER_MAX_ITERS: usize = 10_000_000;

impl LogisticObjective {
    pub fn new(data: DMatrix<f64>, labels: Vector, reg: f64) -> Result<Self> {
        if !(reg.is_finite() && reg > 0.0) {
            return Err(Error::InvalidConstants(format!(
                "regularization must be positive, got {reg}"
            )));
        }
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::InvalidDimension("empty data matrix".into()));
        }
        if labels.len() != data.nrows() {
            return Err(Error::InvalidDimension(format!(
                "{} labels for {} samples",
                labels.len(),
                data.nrows()
            )));
        }
        if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
            return Err(Error::InvalidConstants("labels must be -1 or +1".into()));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput("data matrix".into()));
        }
        let sigma_max = data.singular_values().max();
        let n = data.nrows() as f64;
        let lipschitz = sigma_max * sigma_max / (4.0 * n) + reg;

        let mut obj = Self {
            minimizer: Vector::zeros(data.ncols()),
            data,
            labels,
            reg,
            lipschitz,
            min_value: f64::NAN,
        };
        obj.solve_minimizer()?;
        Ok(obj)
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn labels(&self) -> &Vector {
        &self.labels
    }

    pub fn reg(&self) -> f64 {
        self.reg
    }

    pub fn samples(&self) -> usize {
        self.data.nrows()
    }

    // Gradient descent with step 1/L from the origin.
    fn solve_minimizer(&mut self) -> Result<()> {
        let step = 1.0 / self.lipschitz;
        let mut x = Vector::zeros(self.data.ncols());
        for _ in 0..MINIMIZER_MAX_ITERS {
            let g = self.gradient(&x);
            if g.norm() <= MINIMIZER_TOL {
                self.min_value = self.value(&x);
                self.minimizer = x;
                return Ok(());
            }
            x.axpy(-step, &g, 1.0);
        }
        Err(Error::InvalidConstants(
            "logistic minimizer solve did not reach the gradient tolerance".into(),
        ))
    }

    fn margins(&self, x: &Vector) -> Vector {
        (&self.data * x).component_mul(&self.labels)
    }
}

/// `log(1 + exp(t))` without overflow.
fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// `1 / (1 + exp(t))` without overflow.
fn logistic_tail(t: f64) -> f64 {
    if t >= 0.0 {
        let e = (-t).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + t.exp())
    }
}

impl Objective for LogisticObjective {
    fn dim(&self) -> usize {
        self.data.ncols()
    }

    fn value(&self, x: &Vector) -> f64 {
        let z = self.margins(x);
        let loss = z.iter().map(|&zi| softplus(-zi)).sum::<f64>() / self.samples() as f64;
        loss + 0.5 * self.reg * x.norm_squared()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let z = self.margins(x);
        let n = self.samples() as f64;
        let weights = Vector::from_fn(z.len(), |i, _| -self.labels[i] * logistic_tail(z[i]) / n);
        self.data.tr_mul(&weights) + x * self.reg
    }

    fn mu(&self) -> f64 {
        self.reg
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn minimizer(&self) -> Option<&Vector> {
        Some(&self.minimizer)
    }

    fn min_value(&self) -> Option<f64> {
        Some(self.min_value)
    }
}

impl TryFrom<LogisticRecord> for LogisticObjective {
    type Error = Error;

    fn try_from(r: LogisticRecord) -> Result<Self> {
        let rows = r.data.len();
        let cols = r.data.first().map_or(0, Vec::len);
        if r.data.iter().any(|row| row.len() != cols) {
            return Err(Error::InvalidDimension("ragged data matrix".into()));
        }
        let data = DMatrix::from_fn(rows, cols, |i, j| r.data[i][j]);
        Self::new(data, Vector::from_vec(r.labels), r.reg)
    }
}

impl From<LogisticObjective> for LogisticRecord {
    fn from(o: LogisticObjective) -> Self {
        Self {
            data: o
                .data
                .row_iter()
                .map(|row| row.iter().copied().collect())
                .collect(),
            labels: o.labels.iter().copied().collect(),
            reg: o.reg,
        }
    }
}

/// Standard-normal features and uniform ±1 labels drawn from `seed`.
pub fn make_logistic(
    dim: usize,
    samples: usize,
    reg: f64,
    seed: u64,
) -> Result<LogisticObjective> {
    if dim == 0 || samples == 0 {
        return Err(Error::InvalidDimension(format!(
            "need dim >= 1 and samples >= 1, got dim={dim}, samples={samples}"
        )));
    }
    if !(reg.is_finite() && reg > 0.0) {
        return Err(Error::InvalidConstants(format!(
            "regularization must be positive, got {reg}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = DMatrix::<f64>::from_fn(samples, dim, |_, _| rng.sample(StandardNormal));
    let labels = Vector::from_fn(samples, |_, _| if rng.random_bool(0.5) { 1.0 } else { -1.0 });
    LogisticObjective::new(data, labels, reg)
}

/// Serializable union of the objective families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ObjectiveSpec {
    Quadratic(QuadraticObjective),
    Logistic(LogisticObjective),
}

impl ObjectiveSpec {
    fn inner(&self) -> &dyn Objective {
        match self {
            ObjectiveSpec::Quadratic(q) => q,
            ObjectiveSpec::Logistic(l) => l,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl From<QuadraticObjective> for ObjectiveSpec {
    fn from(q: QuadraticObjective) -> Self {
        ObjectiveSpec::Quadratic(q)
    }
}

impl From<LogisticObjective> for ObjectiveSpec {
    fn from(l: LogisticObjective) -> Self {
        ObjectiveSpec::Logistic(l)
    }
}

impl Objective for ObjectiveSpec {
    fn dim(&self) -> usize {
        self.inner().dim()
    }
    fn value(&self, x: &Vector) -> f64 {
        self.inner().value(x)
    }
    fn gradient(&self, x: &Vector) -> Vector {
        self.inner().gradient(x)
    }
    fn mu(&self) -> f64 {
        self.inner().mu()
    }
    fn lipschitz(&self) -> f64 {
        self.inner().lipschitz()
    }
    fn minimizer(&self) -> Option<&Vector> {
        self.inner().minimizer()
    }
    fn min_value(&self) -> Option<f64> {
        self.inner().min_value()
    }
}

/// Wraps an objective and counts gradient evaluations.
pub struct CountingObjective<'a> {
    inner: &'a dyn Objective,
    gradient_calls: AtomicUsize,
}

impl<'a> CountingObjective<'a> {
    pub fn new(inner: &'a dyn Objective) -> Self {
        Self {
            inner,
            gradient_calls: AtomicUsize::new(0),
        }
    }

    pub fn gradient_calls(&self) -> usize {
        self.gradient_calls.load(Ordering::Relaxed)
    }
}

impl Objective for CountingObjective<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, x: &Vector) -> f64 {
        self.inner.value(x)
    }
    fn gradient(&self, x: &Vector) -> Vector {
        self.gradient_calls.fetch_add(1, Ordering::Relaxed);
        self.inner.gradient(x)
    }
    fn mu(&self) -> f64 {
        self.inner.mu()
    }
    fn lipschitz(&self) -> f64 {
        self.inner.lipschitz()
    }
    fn minimizer(&self) -> Option<&Vector> {
        self.inner.minimizer()
    }
    fn min_value(&self) -> Option<f64> {
        self.inner.min_value()
    }
}

/// Largest coordinate-wise discrepancy between the analytic gradient and a
/// central difference with step `h`, relative to `1 + |∂ᵢf(x)|`.
pub fn grad_check(obj: &dyn Objective, x: &Vector, h: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidConstants(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    if x.len() != obj.dim() {
        return Err(Error::InvalidDimension(format!(
            "point has dimension {}, objective {}",
            x.len(),
            obj.dim()
        )));
    }
    let grad = obj.gradient(x);
    let mut worst: f64 = 0.0;
    let mut probe = x.clone();
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = obj.value(&probe);
        probe[i] = x[i] - h;
        let down = obj.value(&probe);
        probe[i] = x[i];
        if !(up.is_finite() && down.is_finite()) {
            return Err(Error::NonFiniteInput(format!(
                "objective not finite near coordinate {i}"
            )));
        }
        let fd = (up - down) / (2.0 * h);
        worst = worst.max((fd - grad[i]).abs() / (1.0 + grad[i].abs()));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn random_points(dim: usize, count: usize, seed: u64, scale: f64) -> Vec<Vector> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| Vector::from_fn(dim, |_, _| scale * rng.random_range(-1.0..=1.0)))
            .collect()
    }

    #[test]
    fn two_dim_spectrum_is_exactly_the_endpoints() {
        let q = make_quadratic(2, 0.01, 1.0, 0).unwrap();
        assert_eq!(q.eigenvalues().as_slice(), &[0.01, 1.0]);
        assert_eq!(q.mu(), 0.01);
        assert_eq!(q.lipschitz(), 1.0);
    }

    #[test]
    fn gradient_vanishes_at_center() {
        let q = make_quadratic(10, 0.01, 1.0, 7).unwrap();
        let g = q.gradient(q.center());
        assert!(g.iter().all(|&v| v == 0.0));
        assert_eq!(q.value(q.center()), 0.0);
    }

    #[test]
    fn value_along_top_eigenvector_is_half_l() {
        let q = make_quadratic(10, 0.01, 1.0, 7).unwrap();
        let top = q.eigenvalues().imax();
        let x = q.center() + q.eigenvector(top);
        assert_relative_eq!(q.value(&x), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn basis_is_orthonormal() {
        let q = make_quadratic(10, 0.01, 1.0, 11).unwrap();
        let gram = q.basis().transpose() * q.basis();
        assert!((gram - DMatrix::<f64>::identity(10, 10)).amax() <= 1e-12);
    }

    #[test]
    fn quadratic_construction_is_deterministic() {
        let a = make_quadratic(10, 0.01, 1.0, 42).unwrap();
        let b = make_quadratic(10, 0.01, 1.0, 42).unwrap();
        assert_eq!(a, b);
        let c = make_quadratic(10, 0.01, 1.0, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn quadratic_rejects_bad_arguments() {
        assert!(matches!(
            make_quadratic(1, 0.1, 1.0, 0),
            Err(Error::InvalidDimension(_))
        ));
        assert!(matches!(
            make_quadratic(3, 2.0, 1.0, 0),
            Err(Error::InvalidConstants(_))
        ));
        assert!(matches!(
            make_quadratic(3, 0.0, 1.0, 0),
            Err(Error::InvalidConstants(_))
        ));
    }

    #[test]
    fn logistic_value_at_origin_is_log_two() {
        let obj = make_logistic(10, 50, 1e-4, 3).unwrap();
        assert_relative_eq!(
            obj.value(&Vector::zeros(10)),
            std::f64::consts::LN_2,
            epsilon = 1e-15
        );
        assert_eq!(obj.mu(), 1e-4);
    }

    #[test]
    fn logistic_minimizer_is_stationary() {
        let obj = make_logistic(10, 50, 1e-4, 3).unwrap();
        let x_star = obj.minimizer().unwrap();
        assert!(obj.gradient(x_star).norm() <= 1e-10);
        assert_eq!(obj.value(x_star), obj.min_value().unwrap());
    }

    #[test]
    fn logistic_lipschitz_matches_spectral_bound() {
        let obj = make_logistic(4, 20, 0.5, 1).unwrap();
        let svd = obj.data().clone().svd(false, false);
        let smax = svd.singular_values.max();
        assert_relative_eq!(obj.lipschitz(), smax * smax / 80.0 + 0.5, epsilon = 1e-14);
    }

    #[test]
    fn logistic_rejects_nonpositive_reg() {
        assert!(matches!(
            make_logistic(3, 10, 0.0, 0),
            Err(Error::InvalidConstants(_))
        ));
        assert!(matches!(
            make_logistic(3, 10, -1.0, 0),
            Err(Error::InvalidConstants(_))
        ));
    }

    #[test]
    fn logistic_is_finite_far_away() {
        let obj = make_logistic(5, 30, 1e-3, 9).unwrap();
        let x = Vector::from_element(5, 1e4);
        assert!(obj.value(&x).is_finite());
        assert!(obj.gradient(&x).iter().all(|v| v.is_finite()));
    }

    #[test]
    fn grad_check_quadratic_is_tight() {
        let q = make_quadratic(10, 0.01, 1.0, 5).unwrap();
        for x in random_points(10, 5, 1, 3.0) {
            assert!(grad_check(&q, &x, 1e-5).unwrap() <= 1e-7);
        }
    }

    #[test]
    fn grad_check_logistic_at_origin() {
        let obj = make_logistic(10, 50, 1e-4, 3).unwrap();
        assert!(grad_check(&obj, &Vector::zeros(10), 1e-5).unwrap() <= 1e-5);
    }

    #[test]
    fn grad_check_rejects_zero_step() {
        let q = make_quadratic(3, 0.1, 1.0, 0).unwrap();
        assert!(grad_check(&q, &Vector::zeros(3), 0.0).is_err());
    }

    #[test]
    fn lipschitz_gradient_on_random_pairs() {
        let q: ObjectiveSpec = make_quadratic(10, 0.01, 1.0, 2).unwrap().into();
        let lg: ObjectiveSpec = make_logistic(10, 50, 1e-4, 2).unwrap().into();
        for obj in [&q, &lg] {
            let xs = random_points(10, 200, 3, 5.0);
            for pair in xs.chunks(2) {
                let lhs = (obj.gradient(&pair[0]) - obj.gradient(&pair[1])).norm();
                let rhs = obj.lipschitz() * (&pair[0] - &pair[1]).norm();
                assert!(lhs <= rhs * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn strong_convexity_and_smoothness_bounds() {
        let q: ObjectiveSpec = make_quadratic(10, 0.01, 1.0, 4).unwrap().into();
        let lg: ObjectiveSpec = make_logistic(10, 50, 1e-4, 4).unwrap().into();
        for (obj, check_upper) in [(&q, true), (&lg, false)] {
            let x_star = obj.minimizer().unwrap().clone();
            for x in random_points(10, 1000, 8, 2.0) {
                let x = &x_star + x;
                let gap = obj.gap(&x).unwrap();
                let dist2 = (&x - &x_star).norm_squared();
                assert!(gap >= 0.5 * obj.mu() * dist2 * (1.0 - 1e-9));
                if check_upper {
                    assert!(gap <= 0.5 * obj.lipschitz() * dist2 * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn json_round_trip_preserves_objectives() {
        let q: ObjectiveSpec = make_quadratic(4, 0.1, 2.0, 1).unwrap().into();
        let back = ObjectiveSpec::from_json(&q.to_json().unwrap()).unwrap();
        let x = Vector::from_element(4, 0.3);
        assert_eq!(q.value(&x), back.value(&x));

        let lg: ObjectiveSpec = make_logistic(3, 12, 1e-2, 1).unwrap().into();
        let back = ObjectiveSpec::from_json(&lg.to_json().unwrap()).unwrap();
        assert_eq!(lg, back);
    }

    #[test]
    fn json_rejects_non_orthonormal_basis() {
        let doc = r#"{"family":"quadratic","eigenvalues":[1.0,2.0],
                      "basis":[[1.0,0.0],[1.0,1.0]],"center":[0.0,0.0]}"#;
        assert!(ObjectiveSpec::from_json(doc).is_err());
    }

    #[test]
    fn counting_wrapper_counts_gradients() {
        let q = make_quadratic(3, 0.1, 1.0, 0).unwrap();
        let c = CountingObjective::new(&q);
        let x = Vector::zeros(3);
        c.gradient(&x);
        c.gradient(&x);
        c.value(&x);
        assert_eq!(c.gradient_calls(), 2);
    }
}

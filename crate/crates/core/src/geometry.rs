//! Flat product ambient, parametrized immersions and orthonormal frames.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::expr::{eval_jet, parse_str, Bindings, EvalError, ExprError, ExprNode};
use crate::tol::RANK_TOL;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("signs must contain both +1 and -1")]
    TrivialStructure,
    #[error("sign {value} at index {index} is not +1 or -1")]
    BadSign { index: usize, value: i64 },
    #[error("immersion has {components} components but the ambient dimension is {n}")]
    ComponentCount { components: usize, n: usize },
    #[error("parameter count {d} must be positive and below the ambient dimension {n}")]
    Dimension { d: usize, n: usize },
    #[error("duplicate parameter `{0}`")]
    DuplicateParam(String),
    #[error("`{0}` is a reserved constant and cannot be a parameter")]
    ReservedParam(String),
    #[error("component {component} uses unknown parameter `{name}`")]
    UnknownParam { component: usize, name: String },
    #[error("domain for `{name}` must be finite with min < max")]
    BadDomain { name: String },
    #[error("component {component}: {source}")]
    Parse { component: usize, source: ExprError },
    #[error("component {component}: {source}")]
    Eval { component: usize, source: EvalError },
    #[error("Jacobian is rank deficient at {point:?} (column {column}, residual {residual:e})")]
    RankDeficient { point: Vec<f64>, column: usize, residual: f64 },
    #[error("normal frame is degenerate at {point:?} (residual {residual:e})")]
    FrameDegenerate { point: Vec<f64>, residual: f64 },
}

/// ℝⁿ with the Euclidean metric and F = diag(signs).
#[derive(Debug, Clone, PartialEq)]
pub struct ProductAmbient {
    signs: Vec<f64>,
}

impl ProductAmbient {
    pub fn new(signs: &[i64]) -> Result<Self, GeometryError> {
        for (index, &value) in signs.iter().enumerate() {
            if value != 1 && value != -1 {
                return Err(GeometryError::BadSign { index, value });
            }
        }
        if !signs.contains(&1) || !signs.contains(&-1) {
            return Err(GeometryError::TrivialStructure);
        }
        Ok(ProductAmbient { signs: signs.iter().map(|&s| s as f64).collect() })
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn apply_f(&self, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(v.len(), v.iter().zip(&self.signs).map(|(x, s)| s * x))
    }

    /// F applied to every column.
    pub fn apply_f_cols(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| self.signs[i] * m[(i, j)])
    }

    pub fn f_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(&self.signs))
    }

    pub fn metric(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        u.dot(v)
    }
}

/// φ : box ⊂ ℝᵈ → ℝⁿ given by one expression per ambient coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Immersion {
    params: Vec<String>,
    components: Vec<ExprNode>,
    domain: Vec<(f64, f64)>,
    ambient: ProductAmbient,
}

/// Values, first and second partials of φ at a point.
#[derive(Debug, Clone)]
pub struct Derivatives {
    pub value: DVector<f64>,
    pub jacobian: DMatrix<f64>,
    /// `second[k * d + l]` is ∂²φ/∂pₖ∂pₗ.
    pub second: Vec<DVector<f64>>,
}

impl Derivatives {
    pub fn second(&self, k: usize, l: usize) -> &DVector<f64> {
        &self.second[k * self.jacobian.ncols() + l]
    }
}

impl Immersion {
    pub fn new(
        params: Vec<String>,
        components: Vec<ExprNode>,
        domain: Vec<(f64, f64)>,
        ambient: ProductAmbient,
    ) -> Result<Self, GeometryError> {
        let (d, n) = (params.len(), ambient.n());
        if components.len() != n {
            return Err(GeometryError::ComponentCount { components: components.len(), n });
        }
        if d == 0 || d >= n {
            return Err(GeometryError::Dimension { d, n });
        }
        for (i, p) in params.iter().enumerate() {
            if p == "pi" || p == "e" {
                return Err(GeometryError::ReservedParam(p.clone()));
            }
            if params[..i].contains(p) {
                return Err(GeometryError::DuplicateParam(p.clone()));
            }
        }
        assert_eq!(domain.len(), d, "one interval per parameter");
        for (p, &(lo, hi)) in params.iter().zip(&domain) {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(GeometryError::BadDomain { name: p.clone() });
            }
        }
        for (component, c) in components.iter().enumerate() {
            if let Some(name) = c.params().into_iter().find(|q| !params.contains(q)) {
                return Err(GeometryError::UnknownParam { component, name });
            }
        }
        Ok(Immersion { params, components, domain, ambient })
    }

    /// Convenience constructor from source strings.
    pub fn parse(
        params: &[&str],
        components: &[&str],
        domain: &[(f64, f64)],
        signs: &[i64],
    ) -> Result<Self, GeometryError> {
        let ambient = ProductAmbient::new(signs)?;
        let nodes = components
            .iter()
            .enumerate()
            .map(|(component, s)| parse_str(s).map_err(|source| GeometryError::Parse { component, source }))
            .collect::<Result<Vec<_>, _>>()?;
        Immersion::new(params.iter().map(|s| s.to_string()).collect(), nodes, domain.to_vec(), ambient)
    }

    pub fn d(&self) -> usize {
        self.params.len()
    }

    pub fn n(&self) -> usize {
        self.ambient.n()
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn components(&self) -> &[ExprNode] {
        &self.components
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn ambient(&self) -> &ProductAmbient {
        &self.ambient
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p == name)
    }

    /// Central-difference step per parameter: `rel` times the domain width.
    pub fn fd_steps(&self, rel: f64) -> Vec<f64> {
        self.domain.iter().map(|(lo, hi)| rel * (hi - lo)).collect()
    }

    pub fn derivatives(&self, p: &[f64]) -> Result<Derivatives, GeometryError> {
        let (d, n) = (self.d(), self.n());
        let at = Bindings::new(&self.params, p);
        let mut value = DVector::zeros(n);
        let mut jacobian = DMatrix::zeros(n, d);
        let mut second = vec![DVector::zeros(n); d * d];
        for (r, c) in self.components.iter().enumerate() {
            let j = eval_jet(c, &at).map_err(|source| GeometryError::Eval { component: r, source })?;
            value[r] = j.value;
            for k in 0..d {
                jacobian[(r, k)] = j.grad[k];
                for l in 0..d {
                    second[k * d + l][r] = j.hess_at(k, l);
                }
            }
        }
        Ok(Derivatives { value, jacobian, second })
    }

    pub fn evaluate(&self, p: &[f64]) -> Result<DVector<f64>, GeometryError> {
        Ok(self.derivatives(p)?.value)
    }
}

pub fn jacobian(imm: &Immersion, p: &[f64]) -> Result<DMatrix<f64>, GeometryError> {
    Ok(imm.derivatives(p)?.jacobian)
}

/// Jᵀ J, rejected when the smallest singular value of J is below [`RANK_TOL`].
pub fn induced_metric(imm: &Immersion, p: &[f64]) -> Result<DMatrix<f64>, GeometryError> {
    let j = jacobian(imm, p)?;
    let g = j.transpose() * &j;
    let eig = g.clone().symmetric_eigen();
    let (column, min) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    if min.max(0.0).sqrt() < RANK_TOL {
        return Err(GeometryError::RankDeficient { point: p.to_vec(), column, residual: min.max(0.0).sqrt() });
    }
    Ok(g)
}

/// Orthonormal tangent and normal frames at a parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePack {
    pub point: Vec<f64>,
    pub jacobian: DMatrix<f64>,
    pub g_induced: DMatrix<f64>,
    /// n × d, orthonormal columns e₁..e_d.
    pub tangent: DMatrix<f64>,
    /// n × (n − d), orthonormal columns ξ₁..ξ_{n−d}.
    pub normal: DMatrix<f64>,
    /// Upper-triangular C with `tangent = jacobian · C`.
    pub coeffs: DMatrix<f64>,
    /// Upper-triangular R = C⁻¹ with `jacobian = tangent · R`.
    pub r: DMatrix<f64>,
}

impl FramePack {
    pub fn d(&self) -> usize {
        self.tangent.ncols()
    }

    pub fn codim(&self) -> usize {
        self.normal.ncols()
    }

    /// Ambient vector of a tangent-frame coordinate vector.
    pub fn to_ambient(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.tangent * u
    }

    /// Parameter-space components of a tangent-frame coordinate vector.
    pub fn to_params(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.coeffs * u
    }
}

/// Gram–Schmidt of `v` against the columns of `basis`, two passes.
fn orthogonalize(basis: &[DVector<f64>], mut v: DVector<f64>, coef: Option<&mut [f64]>) -> DVector<f64> {
    let mut acc = vec![0.0; basis.len()];
    for _ in 0..2 {
        for (k, q) in basis.iter().enumerate() {
            let r = q.dot(&v);
            v.axpy(-r, q, 1.0);
            acc[k] += r;
        }
    }
    if let Some(c) = coef {
        c.copy_from_slice(&acc);
    }
    v
}

/// Frames from a Jacobian: modified Gram–Schmidt in column order for the
/// tangent frame, pivoted Gram–Schmidt of the standard basis for the normal frame.
pub fn frames_from_jacobian(point: &[f64], jac: &DMatrix<f64>) -> Result<FramePack, GeometryError> {
    let (n, d) = jac.shape();
    let mut qs: Vec<DVector<f64>> = Vec::with_capacity(d);
    let mut r = DMatrix::zeros(d, d);
    for j in 0..d {
        let mut coef = vec![0.0; j];
        let v = orthogonalize(&qs, jac.column(j).into_owned(), Some(&mut coef));
        let norm = v.norm();
        if norm < RANK_TOL {
            return Err(GeometryError::RankDeficient { point: point.to_vec(), column: j, residual: norm });
        }
        for (k, c) in coef.into_iter().enumerate() {
            r[(k, j)] = c;
        }
        r[(j, j)] = norm;
        qs.push(v / norm);
    }
    let coeffs = invert_upper(&r);

    // pivot: repeatedly take the standard basis vector with the largest residual
    let mut work = qs.clone();
    let mut chosen: Vec<usize> = Vec::with_capacity(n - d);
    for _ in 0..(n - d) {
        let mut best: Option<(usize, f64, DVector<f64>)> = None;
        for k in (0..n).filter(|k| !chosen.contains(k)) {
            let res = orthogonalize(&work, DVector::from_fn(n, |i, _| if i == k { 1.0 } else { 0.0 }), None);
            let norm = res.norm();
            if best.as_ref().is_none_or(|b| norm > b.1) {
                best = Some((k, norm, res));
            }
        }
        let (k, norm, res) = best.expect("n > d leaves candidates");
        if norm < RANK_TOL {
            return Err(GeometryError::FrameDegenerate { point: point.to_vec(), residual: norm });
        }
        chosen.push(k);
        work.push(res / norm);
    }
    chosen.sort_unstable();
    let mut basis = qs.clone();
    let mut normals = Vec::with_capacity(n - d);
    for &k in &chosen {
        let res = orthogonalize(&basis, DVector::from_fn(n, |i, _| if i == k { 1.0 } else { 0.0 }), None);
        let norm = res.norm();
        if norm < RANK_TOL {
            return Err(GeometryError::FrameDegenerate { point: point.to_vec(), residual: norm });
        }
        let xi = res / norm;
        basis.push(xi.clone());
        normals.push(xi);
    }
    Ok(FramePack {
        point: point.to_vec(),
        jacobian: jac.clone(),
        g_induced: jac.transpose() * jac,
        tangent: DMatrix::from_columns(&qs),
        normal: DMatrix::from_columns(&normals),
        coeffs,
        r,
    })
}

pub fn frames(imm: &Immersion, p: &[f64]) -> Result<FramePack, GeometryError> {
    frames_from_jacobian(p, &jacobian(imm, p)?)
}

/// Inverse of an upper-triangular matrix by back substitution.
pub fn invert_upper(r: &DMatrix<f64>) -> DMatrix<f64> {
    let d = r.nrows();
    let mut c = DMatrix::zeros(d, d);
    for j in 0..d {
        c[(j, j)] = 1.0 / r[(j, j)];
        for i in (0..j).rev() {
            let mut s = 0.0;
            for k in (i + 1)..=j {
                s += r[(i, k)] * c[(k, j)];
            }
            c[(i, j)] = -s / r[(i, i)];
        }
    }
    c
}

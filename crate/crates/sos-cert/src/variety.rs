//! Numerical solution of zero-dimensional systems by the eigenvalue method.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::QMatrix;
use crate::poly::{Monomial, Poly};
use crate::quotient::{Quotient, QuotientError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VarietyError {
    #[error("eigenvalues {0} and {1} could not be separated")]
    ClusterAmbiguity(usize, usize),
    #[error("constraint g{constraint} is numerically zero at point {point} but the point is not an exact zero")]
    BoundaryAmbiguity { point: usize, constraint: usize },
    #[error("Vandermonde matrix is singular (is the ideal radical?)")]
    SingularVandermonde,
    #[error("multiplicities sum to {got}, expected {expected}")]
    MultiplicityMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Quotient(#[from] QuotientError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub coords: Vec<Complex64>,
    pub multiplicity: usize,
    pub real: bool,
}

impl Point {
    pub fn real_coords(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.re).collect()
    }

    pub fn eval(&self, p: &Poly) -> Complex64 {
        p.eval_complex(&self.coords)
    }
}

/// Points of `V_ℂ(I)`: real points first, then non-real points in adjacent
/// conjugate pairs `ζ, ζ̄` with `ζ` the member whose first non-real
/// coordinate has positive imaginary part.
#[derive(Debug, Clone)]
pub struct Variety {
    pub points: Vec<Point>,
    pub tol: f64,
}

impl Variety {
    pub fn real_points(&self) -> impl Iterator<Item = (usize, &Point)> {
        self.points.iter().enumerate().filter(|(_, p)| p.real)
    }

    /// Index pairs `(ζ, ζ̄)` of conjugate non-real points.
    pub fn conjugate_pairs(&self) -> Vec<(usize, usize)> {
        let first = self.points.iter().position(|p| !p.real).unwrap_or(self.points.len());
        (first..self.points.len()).step_by(2).map(|i| (i, i + 1)).collect()
    }

    pub fn is_reduced(&self) -> bool {
        self.points.iter().all(|p| p.multiplicity == 1)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub tol: Option<f64>,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: None, seed: 0 }
    }
}

pub fn to_f64_matrix(m: &QMatrix) -> DMatrix<f64> {
    let n = m.len();
    DMatrix::from_fn(n, n, |i, j| m[i][j].to_f64().unwrap())
}

/// Values `b_k(ζ)` of the basis monomials at a point.
pub fn basis_values(basis: &[Monomial], point: &[Complex64]) -> DVector<Complex64> {
    DVector::from_iterator(basis.len(), basis.iter().map(|m| m.eval(point)))
}

fn left_eigenvector(m: &DMatrix<f64>, lambda: Complex64) -> DVector<Complex64> {
    let n = m.nrows();
    let a = DMatrix::from_fn(n, n, |i, j| {
        let v = Complex64::new(m[(j, i)], 0.0);
        if i == j {
            v - lambda
        } else {
            v
        }
    });
    let svd = a.svd(false, true);
    let vt = svd.v_t.unwrap();
    let k = (0..n)
        .min_by(|&x, &y| svd.singular_values[x].partial_cmp(&svd.singular_values[y]).unwrap())
        .unwrap();
    DVector::from_iterator(n, vt.row(k).iter().map(|c| c.conj()))
}

fn newton_polish(gens: &[Poly], x: &mut [Complex64]) {
    let n = x.len();
    let jac: Vec<Vec<Poly>> = gens.iter().map(|g| (0..n).map(|i| derivative(g, i)).collect()).collect();
    let residual = |x: &[Complex64]| gens.iter().map(|g| g.eval_complex(x).norm_sqr()).sum::<f64>().sqrt();
    for _ in 0..8 {
        let r0 = residual(x);
        if r0 == 0.0 {
            return;
        }
        let f = DVector::from_iterator(gens.len(), gens.iter().map(|g| -g.eval_complex(x)));
        let j = DMatrix::from_fn(gens.len(), n, |a, b| jac[a][b].eval_complex(x));
        let Ok(step) = j.svd(true, true).solve(&f, 1e-14) else { return };
        let cand: Vec<Complex64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
        if residual(&cand) < r0 {
            x.copy_from_slice(&cand);
        } else {
            return;
        }
    }
}

pub fn derivative(p: &Poly, i: usize) -> Poly {
    Poly::from_terms(
        p.nvars(),
        p.terms().filter(|(m, _)| m.0[i] > 0).map(|(m, c)| {
            let mut e = m.0.clone();
            let k = e[i];
            e[i] -= 1;
            (Monomial(e), c * crate::Rational::from_integer(k.into()))
        }),
    )
}

/// Compute `V_ℂ(I)` with multiplicities.
pub fn solve_variety(q: &Quotient, opts: SolveOptions) -> Result<Variety, VarietyError> {
    if q.dim() == 0 {
        return Ok(Variety { points: Vec::new(), tol: opts.tol.unwrap_or(2f64.powi(-40)) });
    }
    let radical = if q.is_radical()? { q.clone() } else { Quotient::new_untracked(&q.radical_generators())? };
    let n = q.nvars();
    let mats_j: Vec<DMatrix<f64>> = radical.var_matrices().iter().map(to_f64_matrix).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut last_err = VarietyError::ClusterAmbiguity(0, 0);
    for _attempt in 0..6 {
        // Dyadic coefficients, exact both in f64 and as rationals.
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(4..13) as f64 / 8.0 * if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
        let mut mc = DMatrix::<f64>::zeros(radical.dim(), radical.dim());
        for (ci, m) in c.iter().zip(&mats_j) {
            mc += m * *ci;
        }
        let eig: Vec<Complex64> = mc.complex_eigenvalues().iter().copied().collect();
        let scale = 1.0 + eig.iter().map(|e| e.norm()).fold(0.0, f64::max);
        let sep_tol = 10.0 * opts.tol.unwrap_or(2f64.powi(-40) * scale);
        if let Some((a, b)) = close_pair(&eig, sep_tol.max(1e-9 * scale)) {
            last_err = VarietyError::ClusterAmbiguity(a, b);
            continue;
        }
        let mut reals = Vec::new();
        let mut complexes = Vec::new();
        for &lambda in &eig {
            if lambda.im < -1e-9 * scale {
                continue;
            }
            let w = left_eigenvector(&mc, lambda);
            let w0 = w[0];
            let w = w / w0;
            let wn: f64 = w.iter().map(|c| c.norm_sqr()).sum();
            let mut x: Vec<Complex64> = mats_j
                .iter()
                .map(|m| {
                    let mut s = Complex64::zero();
                    for i in 0..m.nrows() {
                        let mut row = Complex64::zero();
                        for k in 0..m.ncols() {
                            row += w[k] * m[(k, i)];
                        }
                        s += row * w[i].conj();
                    }
                    s / wn
                })
                .collect();
            newton_polish(&radical.gb.polys, &mut x);
            let mag = x.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let tol = opts.tol.unwrap_or(2f64.powi(-40) * (1.0 + mag));
            if x.iter().all(|c| c.im.abs() <= tol) {
                reals.push(x.iter().map(|c| Complex64::new(c.re, 0.0)).collect::<Vec<_>>());
            } else {
                if let Some(k) = x.iter().position(|c| c.im.abs() > tol) {
                    if x[k].im < 0.0 {
                        x.iter_mut().for_each(|c| *c = c.conj());
                    }
                }
                complexes.push(x);
            }
        }
        if reals.len() + 2 * complexes.len() != radical.dim() {
            last_err = VarietyError::MultiplicityMismatch { got: reals.len() + 2 * complexes.len(), expected: radical.dim() };
            continue;
        }
        reals.sort_by(|a, b| lex_cmp(a, b));
        complexes.sort_by(|a, b| lex_cmp(a, b));
        let mut points: Vec<Point> = reals.into_iter().map(|c| Point { coords: c, multiplicity: 1, real: true }).collect();
        for z in complexes {
            let zb: Vec<Complex64> = z.iter().map(|c| c.conj()).collect();
            points.push(Point { coords: z, multiplicity: 1, real: false });
            points.push(Point { coords: zb, multiplicity: 1, real: false });
        }
        let mag = points.iter().flat_map(|p| p.coords.iter().map(|c| c.norm())).fold(0.0, f64::max);
        let tol = opts.tol.unwrap_or(2f64.powi(-40) * (1.0 + mag));
        if radical.dim() != q.dim() {
            assign_multiplicities(q, &c, &mut points)?;
        }
        return Ok(Variety { points, tol });
    }
    Err(last_err)
}

fn lex_cmp(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.partial_cmp(&y.re).unwrap().then(x.im.partial_cmp(&y.im).unwrap());
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

fn close_pair(eig: &[Complex64], tol: f64) -> Option<(usize, usize)> {
    for i in 0..eig.len() {
        for j in i + 1..eig.len() {
            if (eig[i] - eig[j]).norm() < tol {
                return Some((i, j));
            }
        }
    }
    None
}

fn assign_multiplicities(q: &Quotient, c: &[f64], points: &mut [Point]) -> Result<(), VarietyError> {
    // The exact characteristic polynomial of M_{Σ c_i x_i} is Π (t − t_ξ)^{mult ξ};
    // its squarefree decomposition tells each root's multiplicity.
    let n = q.nvars();
    let mut lin = Poly::zero(n);
    for (i, ci) in c.iter().enumerate() {
        lin = &lin + &Poly::var(n, i).scale(&crate::poly::rational_from_f64(*ci));
    }
    let chi = crate::quotient::charpoly(&q.mult_matrix(&lin));
    let factors = crate::quotient::squarefree_decomposition(&chi);
    let mut counts = vec![0usize; factors.len()];
    for p in points.iter_mut() {
        let t: Complex64 = p.coords.iter().zip(c).map(|(x, ci)| x * *ci).sum();
        let k = (0..factors.len())
            .min_by(|&a, &b| {
                let ra = crate::quotient::eval_univariate(&factors[a].0, t).norm();
                let rb = crate::quotient::eval_univariate(&factors[b].0, t).norm();
                ra.partial_cmp(&rb).unwrap()
            })
            .ok_or(VarietyError::MultiplicityMismatch { got: 0, expected: q.dim() })?;
        p.multiplicity = factors[k].1;
        counts[k] += 1;
    }
    let total: usize = points.iter().map(|p| p.multiplicity).sum();
    let degrees_match = factors.iter().zip(&counts).all(|((f, _), &k)| f.len() - 1 == k);
    if total != q.dim() || !degrees_match {
        return Err(VarietyError::MultiplicityMismatch { got: total, expected: q.dim() });
    }
    Ok(())
}

/// Membership of the real points in `S = {g_i ≥ 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    /// `in_s[k]` for the real point with index `k` in the variety; `false`
    /// for non-real points.
    pub in_s: Vec<bool>,
    /// For real points outside `S`, the index of the first violated constraint.
    pub violated: Vec<Option<usize>>,
}

impl Membership {
    pub fn s_points(&self) -> impl Iterator<Item = usize> + '_ {
        self.in_s.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i)
    }
}

/// Decide `g_i(ξ) ≥ 0` at every real point. Values within `tol` of zero are
/// confirmed as exact zeros by counting the points of `I + (g_i)`.
pub fn membership(q: &Quotient, variety: &Variety, g: &[Poly]) -> Result<Membership, VarietyError> {
    let m = variety.points.len();
    let mut in_s = vec![false; m];
    let mut violated = vec![None; m];
    let mut zero_ok = vec![vec![false; m]; g.len()];
    for (i, gi) in g.iter().enumerate() {
        let near: Vec<usize> = variety
            .real_points()
            .filter(|(_, p)| p.eval(gi).re.abs() <= variety.tol * (1.0 + max_coeff(gi)))
            .map(|(k, _)| k)
            .collect();
        if near.is_empty() {
            continue;
        }
        let mut gens = q.radical_generators();
        gens.push(gi.clone());
        let zq = Quotient::new_untracked(&gens)?;
        let zr = Quotient::new_untracked(&zq.radical_generators())?;
        let zv = if zr.dim() == 0 { Vec::new() } else { solve_variety(&zr, SolveOptions { tol: None, seed: 7 })?.points };
        let real_zeros = zv.iter().filter(|p| p.real).count();
        if real_zeros != near.len() {
            return Err(VarietyError::BoundaryAmbiguity { point: near[0], constraint: i });
        }
        for k in near {
            zero_ok[i][k] = true;
        }
    }
    for (k, p) in variety.real_points() {
        let mut inside = true;
        for (i, gi) in g.iter().enumerate() {
            if zero_ok[i][k] {
                continue;
            }
            if p.eval(gi).re < 0.0 {
                inside = false;
                violated[k] = Some(i);
                break;
            }
        }
        in_s[k] = inside;
    }
    Ok(Membership { in_s, violated })
}

fn max_coeff(p: &Poly) -> f64 {
    p.terms().map(|(_, c)| c.to_f64().unwrap().abs()).fold(0.0, f64::max)
}

/// Coefficient vectors of the idempotents `u_ζ` in the basis `B`; column `k`
/// belongs to point `k`. Requires a reduced variety with `|V| = dim`.
pub fn idempotents(q: &Quotient, variety: &Variety) -> Result<DMatrix<Complex64>, VarietyError> {
    let d = q.dim();
    if variety.points.len() != d || !variety.is_reduced() {
        return Err(VarietyError::SingularVandermonde);
    }
    let vt = DMatrix::from_fn(d, d, |z, k| q.basis[k].eval(&variety.points[z].coords));
    let svd = vt.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 1e-13 * smax {
        return Err(VarietyError::SingularVandermonde);
    }
    vt.try_inverse().ok_or(VarietyError::SingularVandermonde)
}

/// Coefficients of `Σ_ζ values[ζ] u_ζ`, the interpolant of degree ≤ `deg B`.
pub fn interpolation_poly(u: &DMatrix<Complex64>, values: &[Complex64]) -> DVector<Complex64> {
    u * DVector::from_column_slice(values)
}

//! Gram matrices: numerical construction, exact projection onto the affine
//! space of Gram matrices, and fraction-free LDLᵀ factorisation.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::{self, QMatrix};
use crate::poly::{round_binary, Poly};
use crate::quotient::Quotient;
use crate::variety::Variety;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GramError {
    #[error("p({value}) is not positive at real point {point}")]
    NonPositiveAtRealRoot { point: usize, value: f64 },
    #[error("no positive definite Gram matrix found up to {bits} bits")]
    PrecisionExceeded { bits: u32 },
    #[error("the affine space of Gram matrices is empty")]
    Infeasible,
    #[error("matrix is not positive definite (leading minor {0})")]
    NotPD(usize),
    #[error("zero pivot at step {0} and no usable diagonal entry")]
    ZeroPivot(usize),
}

/// Largest precision tried by [`round_and_certify`] unless overridden by
/// the `SOS_CERT_MAX_BITS` environment variable.
pub fn default_max_bits() -> u32 {
    std::env::var("SOS_CERT_MAX_BITS").ok().and_then(|s| s.parse().ok()).unwrap_or(4096)
}

/// `|c| + 3/2` truncated to 8 fractional bits; lies strictly between
/// `|c| + 1` and `|c| + 2`.
pub fn shift_lambda(c: Complex64) -> f64 {
    let l = c.norm() + 1.5;
    (l * 256.0).floor() / 256.0
}

/// Columns `θ` for the real point `ξ` (weight `w > 0`) and for a conjugate
/// pair with complex weight `a + ib`, from the identity
/// `(a+ib)u² + (a-ib)ū² + 2λ|u|² = 2(λ+a)(U - bV/(λ+a))² + 2(λ²-a²-b²)/(λ+a) V²`.
pub fn pair_columns(u: &[Complex64], c: Complex64, lambda: f64) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = (c.re, c.im);
    let s1 = (2.0 * (lambda + a)).sqrt();
    let s2 = (2.0 * (lambda * lambda - a * a - b * b) / (lambda + a)).sqrt();
    let t = b / (lambda + a);
    let first = u.iter().map(|z| s1 * (z.re - t * z.im)).collect();
    let second = u.iter().map(|z| s2 * z.im).collect();
    (first, second)
}

/// The positive definite matrix `Q̃ = ΘΘᵀ` with `p ≡ B Q̃ Bᵀ` modulo a radical
/// ideal, built from the idempotents (columns of `u`, ordered as the points).
pub fn build_gram_real(
    q: &Quotient,
    variety: &Variety,
    u: &DMatrix<Complex64>,
    p: &Poly,
) -> Result<DMatrix<f64>, GramError> {
    build_gram_floor(q, variety, u, p, None)
}

pub(crate) fn build_gram_floor(
    _q: &Quotient,
    variety: &Variety,
    u: &DMatrix<Complex64>,
    p: &Poly,
    floor: Option<f64>,
) -> Result<DMatrix<f64>, GramError> {
    let d = u.nrows();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    for (k, pt) in variety.real_points() {
        let mut v = pt.eval(p).re;
        if v <= 0.0 {
            match floor {
                Some(f) if v.abs() <= f => v = f,
                _ => return Err(GramError::NonPositiveAtRealRoot { point: k, value: v }),
            }
        }
        let s = v.sqrt();
        cols.push((0..d).map(|i| s * u[(i, k)].re).collect());
    }
    for (z, _) in variety.conjugate_pairs() {
        let c = variety.points[z].eval(p);
        let uz: Vec<Complex64> = (0..d).map(|i| u[(i, z)]).collect();
        let (a, b) = pair_columns(&uz, c, shift_lambda(c));
        cols.push(a);
        cols.push(b);
    }
    let theta = DMatrix::from_fn(d, cols.len(), |i, j| cols[j][i]);
    Ok(&theta * theta.transpose())
}

/// Number of entries of the upper triangle of a `d × d` matrix.
pub fn tri_len(d: usize) -> usize {
    d * (d + 1) / 2
}

pub fn tri_index(d: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * d - i * (i + 1) / 2 + j
}

/// The affine space `{Y = Yᵀ : A vec(Y) = b}`, with `vec` running over the
/// upper triangle row by row. Rows are linearly independent.
#[derive(Clone, Debug)]
pub struct GramVariety {
    pub dim: usize,
    pub a: QMatrix,
    pub b: Vec<Rational>,
}

impl GramVariety {
    /// Reduce the rows of `(a, b)` to an independent set; fails if the
    /// system is inconsistent.
    pub fn new(dim: usize, a: QMatrix, b: Vec<Rational>) -> Result<GramVariety, GramError> {
        let mut aug: QMatrix = a
            .iter()
            .zip(&b)
            .map(|(r, v)| {
                let mut r = r.clone();
                r.push(v.clone());
                r
            })
            .collect();
        let n = tri_len(dim);
        let piv = linalg::rref(&mut aug);
        if piv.last() == Some(&n) {
            return Err(GramError::Infeasible);
        }
        let rows: Vec<Vec<Rational>> = aug.into_iter().take(piv.len()).collect();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for mut r in rows {
            let rhs = r.pop().unwrap();
            // Clear denominators so that each row is integral.
            let den = r.iter().chain([&rhs]).fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            let s = Rational::from_integer(den);
            a.push(r.into_iter().map(|c| c * &s).collect());
            b.push(rhs * &s);
        }
        Ok(GramVariety { dim, a, b })
    }

    /// `{Y : 𝒩(p - w Y wᵀ) = 0}` for a vector `w` of polynomials.
    pub fn from_quotient(q: &Quotient, w: &[Poly], p: &Poly) -> Result<GramVariety, GramError> {
        let d = w.len();
        let n = tri_len(d);
        let mut a = linalg::zeros(q.dim(), n);
        for i in 0..d {
            for j in i..d {
                let c = q.coords(&(&w[i] * &w[j]));
                let mult = if i == j { Rational::one() } else { Rational::from_integer(2.into()) };
                let col = tri_index(d, i, j);
                for (k, v) in c.into_iter().enumerate() {
                    if !v.is_zero() {
                        a[k][col] = v * &mult;
                    }
                }
            }
        }
        GramVariety::new(d, a, q.coords(p))
    }

    pub fn contains(&self, y: &QMatrix) -> bool {
        let v = vectorize(y);
        linalg::matvec(&self.a, &v) == self.b
    }
}

pub fn vectorize(y: &QMatrix) -> Vec<Rational> {
    let d = y.len();
    let mut v = Vec::with_capacity(tri_len(d));
    for i in 0..d {
        for j in i..d {
            v.push(y[i][j].clone());
        }
    }
    v
}

pub fn unvectorize(d: usize, v: &[Rational]) -> QMatrix {
    let mut y = linalg::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let x = v[tri_index(d, i, j)].clone();
            y[i][j] = x.clone();
            y[j][i] = x;
        }
    }
    y
}

/// Orthogonal projection of `y` onto the affine space in the Frobenius
/// inner product of the full symmetric matrix, computed exactly.
pub fn project_to_gram(gv: &GramVariety, y: &QMatrix) -> QMatrix {
    let d = gv.dim;
    let c0 = vectorize(y);
    // Off-diagonal entries appear twice in the Frobenius norm.
    let winv: Vec<Rational> = (0..d)
        .flat_map(|i| (i..d).map(move |j| if i == j { Rational::one() } else { Rational::new(1.into(), 2.into()) }))
        .collect();
    let m = gv.a.len();
    if m == 0 {
        return y.clone();
    }
    let aw: QMatrix = gv.a.iter().map(|r| r.iter().zip(&winv).map(|(x, w)| x * w).collect()).collect();
    let mut gram = linalg::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let mut s = Rational::zero();
            for (x, yv) in aw[i].iter().zip(&gv.a[j]) {
                if !x.is_zero() && !yv.is_zero() {
                    s += x * yv;
                }
            }
            gram[i][j] = s.clone();
            gram[j][i] = s;
        }
    }
    let resid: Vec<Rational> = linalg::matvec(&gv.a, &c0).into_iter().zip(&gv.b).map(|(x, b)| x - b).collect();
    let z = linalg::solve(&gram, &resid).expect("rows are independent");
    let mut c = c0;
    for (k, zk) in z.iter().enumerate() {
        if zk.is_zero() {
            continue;
        }
        for (idx, v) in aw[k].iter().enumerate() {
            if !v.is_zero() {
                c[idx] -= v * zk;
            }
        }
    }
    unvectorize(d, &c)
}

/// `Q = P · L · diag(1/ν_k) · Lᵀ · Pᵀ` with `L` integral lower triangular,
/// `L_{k,k} = Δ_k` the leading minors of the integer matrix `scale·Q`, and
/// `ν_k = scale · Δ_k · Δ_{k-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LdlFactorization {
    /// `perm[k]` is the original row placed at position `k`.
    pub perm: Vec<usize>,
    pub l: Vec<Vec<BigInt>>,
    pub minors: Vec<BigInt>,
    pub scale: BigInt,
}

impl LdlFactorization {
    pub fn pivots(&self) -> Vec<BigInt> {
        let mut prev = BigInt::one();
        self.minors
            .iter()
            .map(|m| {
                let v = &self.scale * m * &prev;
                prev = m.clone();
                v
            })
            .collect()
    }

    /// Weights `1/ν_k`.
    pub fn weights(&self) -> Vec<Rational> {
        self.pivots().into_iter().map(|v| Rational::new(BigInt::one(), v)).collect()
    }

    /// `L` in original row order.
    pub fn l_unpermuted(&self) -> QMatrix {
        let d = self.perm.len();
        let mut out = linalg::zeros(d, d);
        for (k, &orig) in self.perm.iter().enumerate() {
            for j in 0..d {
                out[orig][j] = Rational::from_integer(self.l[k][j].clone());
            }
        }
        out
    }

    /// Weighted squares `(1/ν_k, Σ_i L_{ik} w_i)` for a basis vector `w`.
    pub fn squares(&self, w: &[Poly]) -> Vec<(Rational, Poly)> {
        let l = self.l_unpermuted();
        let n = w.first().map(|p| p.nvars()).unwrap_or(0);
        self.weights()
            .into_iter()
            .enumerate()
            .map(|(k, wt)| {
                let mut q = Poly::zero(n);
                for (i, wi) in w.iter().enumerate() {
                    if !l[i][k].is_zero() {
                        q = &q + &wi.scale(&l[i][k]);
                    }
                }
                (wt, q)
            })
            .collect()
    }

    pub fn reconstruct(&self) -> QMatrix {
        let d = self.perm.len();
        let l = self.l_unpermuted();
        let w = self.weights();
        let mut out = linalg::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let mut s = Rational::zero();
                for k in 0..d {
                    s += &l[i][k] * &l[j][k] * &w[k];
                }
                out[i][j] = s;
            }
        }
        out
    }
}

fn integer_scaled(q: &QMatrix) -> (Vec<Vec<BigInt>>, BigInt) {
    let den = q.iter().flatten().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let m = q.iter().map(|r| r.iter().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect()).collect();
    (m, den)
}

/// Fraction-free LDLᵀ of a symmetric rational matrix; succeeds exactly when
/// the matrix is positive definite.
pub fn ldlt(q: &QMatrix) -> Result<LdlFactorization, GramError> {
    let d = q.len();
    let (mut a, scale) = integer_scaled(q);
    let mut perm: Vec<usize> = (0..d).collect();
    let mut l = vec![vec![BigInt::zero(); d]; d];
    let mut minors = Vec::with_capacity(d);
    let mut prev = BigInt::one();
    for k in 0..d {
        if a[k][k].is_zero() {
            let cand = (k + 1..d).find(|&j| a[j][j].is_positive());
            match cand {
                Some(j) => {
                    a.swap(k, j);
                    for row in a.iter_mut() {
                        row.swap(k, j);
                    }
                    l.swap(k, j);
                    perm.swap(k, j);
                }
                None => {
                    if (k + 1..d).any(|j| a[j][j].is_negative()) {
                        return Err(GramError::NotPD(k + 1));
                    }
                    return Err(GramError::ZeroPivot(k + 1));
                }
            }
        }
        let piv = a[k][k].clone();
        if piv.is_negative() {
            return Err(GramError::NotPD(k + 1));
        }
        for i in k..d {
            l[i][k] = a[i][k].clone();
        }
        for i in k + 1..d {
            for j in k + 1..d {
                let v = (&piv * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        minors.push(piv.clone());
        prev = piv;
    }
    Ok(LdlFactorization { perm, l, minors, scale })
}

/// Leading principal minors `Δ_1, …, Δ_d` by Bareiss elimination without
/// pivoting; stops after the first zero minor.
pub fn leading_minors(q: &QMatrix) -> Vec<Rational> {
    let d = q.len();
    let (mut a, scale) = integer_scaled(q);
    let mut prev = BigInt::one();
    let mut out = Vec::new();
    for k in 0..d {
        let piv = a[k][k].clone();
        let s = num_traits::pow(Rational::from_integer(scale.clone()), k + 1);
        out.push(Rational::from_integer(piv.clone()) / s);
        if piv.is_zero() {
            break;
        }
        for i in k + 1..d {
            for j in k + 1..d {
                a[i][j] = (&piv * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = piv;
    }
    out
}

pub fn round_matrix(m: &DMatrix<f64>, bits: u32) -> QMatrix {
    let d = m.nrows();
    (0..d)
        .map(|i| (0..d).map(|j| round_binary(0.5 * (m[(i, j)] + m[(j, i)]), bits)).collect())
        .collect()
}

/// Entrywise binary rounding of a rectangular matrix.
pub fn round_matrix_rect(m: &DMatrix<f64>, bits: u32) -> QMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| round_binary(m[(i, j)], bits)).collect()).collect()
}

/// Outcome of the round–project–factor loop.
#[derive(Clone, Debug)]
pub struct GramCertificate {
    pub gram: QMatrix,
    pub ldl: LdlFactorization,
    pub bits: u32,
}

/// Round `Q̃` at `N` bits, project onto the Gram space and factor exactly;
/// double `N` until the projection is positive definite.
pub fn round_and_certify(
    gv: &GramVariety,
    qt: &DMatrix<f64>,
    start_bits: u32,
    max_bits: u32,
) -> Result<GramCertificate, GramError> {
    let mut bits = start_bits.max(1);
    loop {
        let y = project_to_gram(gv, &round_matrix(qt, bits));
        if let Ok(ldl) = ldlt(&y) {
            return Ok(GramCertificate { gram: y, ldl, bits });
        }
        if bits >= max_bits {
            return Err(GramError::PrecisionExceeded { bits });
        }
        bits = (bits * 2).min(max_bits);
    }
}

pub fn to_f64(m: &QMatrix) -> DMatrix<f64> {
    let d = m.len();
    DMatrix::from_fn(d, d, |i, j| m[i][j].to_f64().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::variety::{idempotents, solve_variety, SolveOptions};

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    fn int_mat(v: &[&[i64]]) -> QMatrix {
        v.iter().map(|r| r.iter().map(|&x| q(x, 1)).collect()).collect()
    }

    fn setup(ideal: &str, p: &str) -> (Quotient, Variety, DMatrix<Complex64>, Poly) {
        let x = vec!["x".to_string()];
        let quo = Quotient::new(&[parse_poly(ideal, &x).unwrap()]).unwrap();
        let v = solve_variety(&quo, SolveOptions::default()).unwrap();
        let u = idempotents(&quo, &v).unwrap();
        (quo, v, u, parse_poly(p, &x).unwrap())
    }

    #[test]
    fn ldlt_small() {
        let f = ldlt(&int_mat(&[&[2, 1], &[1, 2]])).unwrap();
        assert_eq!(f.l, vec![vec![BigInt::from(2), BigInt::zero()], vec![BigInt::from(1), BigInt::from(3)]]);
        assert_eq!(f.weights(), vec![q(1, 2), q(1, 6)]);
        assert_eq!(ldlt(&int_mat(&[&[1, 2], &[2, 1]])), Err(GramError::NotPD(2)));
        assert_eq!(ldlt(&int_mat(&[&[0, 0], &[0, 0]])), Err(GramError::ZeroPivot(1)));
        assert_eq!(ldlt(&int_mat(&[&[0, 1], &[1, 0]])), Err(GramError::ZeroPivot(1)));
        assert_eq!(ldlt(&int_mat(&[&[0, 1], &[1, -1]])), Err(GramError::NotPD(1)));
        let p = ldlt(&int_mat(&[&[0, 1], &[1, 2]]));
        assert_eq!(p, Err(GramError::NotPD(2)));
    }

    #[test]
    fn ldlt_rational_reconstructs() {
        let m = vec![vec![q(3, 2), q(1, 2)], vec![q(1, 2), q(3, 2)]];
        let f = ldlt(&m).unwrap();
        assert_eq!(f.reconstruct(), m);
    }

    #[test]
    fn gram_two_points() {
        let (quo, v, u, p) = setup("x^2-1", "x+3");
        let qt = build_gram_real(&quo, &v, &u, &p).unwrap();
        assert!((qt[(0, 0)] - 1.5).abs() < 1e-12 && (qt[(0, 1)] - 0.5).abs() < 1e-12);
        let gv = GramVariety::from_quotient(&quo, &quo.basis_polys(), &p).unwrap();
        let expect = vec![vec![q(3, 2), q(1, 2)], vec![q(1, 2), q(3, 2)]];
        assert_eq!(project_to_gram(&gv, &linalg::identity(2)), expect);
        let cert = round_and_certify(&gv, &qt, 8, 4096).unwrap();
        assert_eq!(cert.gram, expect);
    }

    #[test]
    fn gram_escalates_precision() {
        let (quo, v, u, p) = setup("x^2-1", "x + 1 + 1/1048576");
        let qt = build_gram_real(&quo, &v, &u, &p).unwrap();
        let gv = GramVariety::from_quotient(&quo, &quo.basis_polys(), &p).unwrap();
        let cert = round_and_certify(&gv, &qt, 8, 4096).unwrap();
        assert!(gv.contains(&cert.gram));

        let (quo, v, u, p) = setup("x^3-x", "1 + 1/1048576 - 3/4*x^2 - 1/4*x");
        let qt = build_gram_real(&quo, &v, &u, &p).unwrap();
        let gv = GramVariety::from_quotient(&quo, &quo.basis_polys(), &p).unwrap();
        let cert = round_and_certify(&gv, &qt, 8, 4096).unwrap();
        assert!(cert.bits > 8, "bits {}", cert.bits);
        assert!(gv.contains(&cert.gram));
    }

    #[test]
    fn gram_fails_on_root_of_p() {
        let (quo, v, u, p) = setup("x^2-1", "x + 1");
        assert!(matches!(build_gram_real(&quo, &v, &u, &p), Err(GramError::NonPositiveAtRealRoot { .. })));
        let qt = build_gram_floor(&quo, &v, &u, &p, Some(1e-9)).unwrap();
        let gv = GramVariety::from_quotient(&quo, &quo.basis_polys(), &p).unwrap();
        assert_eq!(round_and_certify(&gv, &qt, 16, 256).unwrap_err(), GramError::PrecisionExceeded { bits: 256 });
    }

    #[test]
    fn gram_complex_only() {
        let (quo, v, u, p) = setup("x^2+1", "1");
        let qt = build_gram_real(&quo, &v, &u, &p).unwrap();
        assert!(qt.clone().symmetric_eigen().eigenvalues.min() > 0.0);
        let gv = GramVariety::from_quotient(&quo, &quo.basis_polys(), &p).unwrap();
        assert!(round_and_certify(&gv, &qt, 16, 4096).is_ok());
    }
}

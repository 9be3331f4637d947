//! Constructive certificates: perturbation outside `S`, the radical Gram
//! construction, Hensel lifting for non-radical ideals and the
//! nonnegative case via a coprimality witness.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::gram::{self, GramError, GramVariety};
use crate::linalg;
use crate::poly::{round_binary, Poly};
use crate::quotient::{ideal_power_chain, Quotient, QuotientError};
use crate::variety::{self, membership, solve_variety, Membership, SolveOptions, Variety, VarietyError};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CertError {
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error(transparent)]
    Variety(#[from] VarietyError),
    #[error(transparent)]
    Gram(#[from] GramError),
    #[error(transparent)]
    Sdp(#[from] crate::sdp::SdpError),
    #[error("f is not strictly positive on S: f({}) = {:.6e}", fmt_point(.point), .value)]
    NotStrictlyPositive { point: Vec<f64>, value: f64 },
    #[error("f is negative on S: f({}) = {:.6e}", fmt_point(.point), .value)]
    NotNonnegative { point: Vec<f64>, value: f64 },
    #[error("perturbation did not separate the points outside S up to {0} bits")]
    PerturbationFailed(u32),
    #[error("internal error: {0}")]
    Internal(String),
}

fn fmt_point(p: &[f64]) -> String {
    p.iter().map(|x| format!("{:.6}", if x.abs() < 1e-12 { 0.0 } else { *x })).collect::<Vec<_>>().join(", ")
}

impl CertError {
    /// The precondition of the requested certificate does not hold.
    pub fn is_condition_failure(&self) -> bool {
        matches!(
            self,
            CertError::Quotient(QuotientError::ConditionFailed)
                | CertError::Quotient(QuotientError::InfiniteDimension)
                | CertError::Quotient(QuotientError::NotGraded)
                | CertError::NotStrictlyPositive { .. }
                | CertError::NotNonnegative { .. }
                | CertError::Sdp(crate::sdp::SdpError::NotGraded)
        )
    }

    pub fn is_precision_failure(&self) -> bool {
        matches!(
            self,
            CertError::Gram(GramError::PrecisionExceeded { .. })
                | CertError::PerturbationFailed(_)
                | CertError::Sdp(_)
        )
    }
}

/// `f ≥ 0` or `f > 0` on `S = {x ∈ ℝⁿ : g_i(x) ≥ 0, h_j(x) = 0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    pub names: Vec<String>,
    pub f: Poly,
    pub g: Vec<Poly>,
    pub h: Vec<Poly>,
    /// Declared radicality of `(h)`; checked, not trusted.
    pub radical: Option<bool>,
    /// Declared gradedness of the basis `h`; checked, not trusted.
    pub graded: Option<bool>,
    /// Optional generators of the radical of `(h)`.
    pub radical_generators: Option<Vec<Poly>>,
}

impl ProblemInstance {
    pub fn new(names: Vec<String>, f: Poly, g: Vec<Poly>, h: Vec<Poly>) -> Self {
        ProblemInstance { names, f, g, h, radical: None, graded: None, radical_generators: None }
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Strict,
    Nonnegative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Constructive,
    Sdp,
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub engine: Engine,
    pub seed: u64,
    pub start_bits: u32,
    pub max_bits: u32,
    pub tol: Option<f64>,
    /// Degree `ℓ` of the monomial vectors for the SDP engine; defaults to `deg B`.
    pub order: Option<u32>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            engine: Engine::Constructive,
            seed: 0,
            start_bits: 16,
            max_bits: gram::default_max_bits(),
            tol: None,
            order: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSquare {
    pub weight: Rational,
    pub square: Poly,
    /// For nonnegative certificates: `r` with `square ≡ f·r` modulo the ideal.
    pub witness: Option<Poly>,
}

impl WeightedSquare {
    pub fn new(weight: Rational, square: Poly) -> Self {
        WeightedSquare { weight, square, witness: None }
    }

    /// Rescale so that the lowest term of the square has coefficient one.
    pub fn normalized(self) -> Self {
        let Some((_, c)) = self.square.terms().next().map(|(m, c)| (m.clone(), c.clone())) else {
            return self;
        };
        let inv = Rational::one() / &c;
        WeightedSquare {
            weight: self.weight * &c * &c,
            square: self.square.scale(&inv),
            witness: self.witness.map(|w| w.scale(&inv)),
        }
    }

    pub fn value(&self) -> Poly {
        self.square.square().scale(&self.weight)
    }
}

/// `f = Σ_k ω_{0k} q_{0k}² + Σ_i g_i Σ_k ω_{ik} q_{ik}² + Σ_j p_j h_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub mode: Mode,
    pub names: Vec<String>,
    /// Block 0 is the free SoS, block `i ≥ 1` multiplies `g_i`.
    pub blocks: Vec<Vec<WeightedSquare>>,
    pub cofactors: Vec<Poly>,
}

/// Denominators `ν_{0k}`, `ν_1`, `ν_2` of the integer form of a certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scalings {
    pub nu0: Vec<BigInt>,
    pub nu1: BigInt,
    pub nu2: BigInt,
}

impl Certificate {
    /// Right-hand side of the identity for the given constraints.
    pub fn evaluate(&self, g: &[Poly], h: &[Poly]) -> Poly {
        let n = self.names.len();
        let mut total = Poly::zero(n);
        for (i, block) in self.blocks.iter().enumerate() {
            let mut s = Poly::zero(n);
            for ws in block {
                s = &s + &ws.value();
            }
            if i == 0 {
                total = &total + &s;
            } else if let Some(gi) = g.get(i - 1) {
                total = &total + &(&s * gi);
            }
        }
        for (p, hj) in self.cofactors.iter().zip(h) {
            total = &total + &(p * hj);
        }
        total
    }

    /// `ν_{0k} = num·den` of each block-0 weight (so that `ω q² = (num·q)²/ν`),
    /// `ν_1` the common denominator of the `g`-block weights, `ν_2` that of the
    /// cofactors.
    pub fn scalings(&self) -> Scalings {
        let nu0 = self.blocks.first().map_or(Vec::new(), |b| {
            b.iter().map(|ws| ws.weight.numer() * ws.weight.denom()).collect()
        });
        let nu1 = self.blocks.iter().skip(1).flatten().fold(BigInt::one(), |a, ws| a.lcm(ws.weight.denom()));
        let nu2 = self.cofactors.iter().fold(BigInt::one(), |a, p| a.lcm(&p.denominator_lcm()));
        Scalings { nu0, nu1, nu2 }
    }
}

/// Everything the constructive engine learns about `V(I)` and `S`.
pub(crate) struct Setup {
    pub q: Quotient,
    pub radical: Quotient,
    pub variety: Variety,
    pub membership: Membership,
    pub u: DMatrix<Complex64>,
}

pub(crate) fn setup(inst: &ProblemInstance, opts: &CertifyOptions) -> Result<Setup, CertError> {
    let q = Quotient::new(&inst.h)?;
    if inst.graded == Some(true) && !q.graded {
        return Err(QuotientError::NotGraded.into());
    }
    let radical = if let Some(r) = &inst.radical_generators {
        let mut gens = inst.h.clone();
        gens.extend(r.iter().cloned());
        Quotient::new_untracked(&gens)?
    } else if q.is_radical()? {
        q.clone()
    } else {
        Quotient::new_untracked(&q.radical_generators())?
    };
    let variety = solve_variety(&q, SolveOptions { tol: opts.tol, seed: opts.seed })?;
    let membership = membership(&q, &variety, &inst.g)?;
    let mut reduced = variety.clone();
    reduced.points.iter_mut().for_each(|p| p.multiplicity = 1);
    let u = if radical.dim() == 0 { DMatrix::zeros(0, 0) } else { variety::idempotents(&radical, &reduced)? };
    Ok(Setup { q, radical, variety, membership, u })
}

fn real_idempotent(setup: &Setup, k: usize, bits: u32) -> Poly {
    let r = &setup.radical;
    Poly::from_terms(
        r.nvars(),
        r.basis.iter().enumerate().map(|(i, m)| (m.clone(), round_binary(setup.u[(i, k)].re, bits))),
    )
}

fn scale_of(p: &Poly) -> f64 {
    1.0 + p.terms().map(|(_, c)| c.to_f64().unwrap().abs()).fold(0.0, f64::max)
}

/// Subtract `φ = Σ_{ξ ∉ S} ρ_ξ û_ξ² g_{i_ξ}` so that the result is positive
/// at every real point. Returns the `g`-blocks and the perturbed polynomial.
pub(crate) fn perturb(
    setup: &Setup,
    g: &[Poly],
    p: &Poly,
    opts: &CertifyOptions,
) -> Result<(Vec<Vec<WeightedSquare>>, Poly), CertError> {
    let mut blocks: Vec<Vec<WeightedSquare>> = vec![Vec::new(); g.len()];
    let tol = setup.variety.tol * scale_of(p);
    let excluded: Vec<(usize, usize, Rational)> = setup
        .variety
        .real_points()
        .filter(|(k, _)| !setup.membership.in_s[*k])
        .filter_map(|(k, pt)| {
            let v = pt.eval(p).re;
            if v > tol {
                return None;
            }
            let i = setup.membership.violated[k].expect("point outside S has a violated constraint");
            let gv = pt.eval(&g[i]).re;
            let ratio = 2.0 * (-v).max(0.0) / (-gv);
            let mut rho = Rational::one();
            while rho.to_f64().unwrap() < ratio {
                rho *= Rational::from_integer(2.into());
            }
            Some((k, i, rho))
        })
        .collect();
    if excluded.is_empty() {
        return Ok((blocks, p.clone()));
    }
    let mut bits = opts.start_bits.max(8);
    loop {
        let mut pt_poly = p.clone();
        for b in blocks.iter_mut() {
            b.clear();
        }
        for (k, i, rho) in &excluded {
            let u = real_idempotent(setup, *k, bits);
            pt_poly = &pt_poly - &(&u.square() * &g[*i]).scale(rho);
            blocks[*i].push(WeightedSquare::new(rho.clone(), u));
        }
        let ok = setup.variety.real_points().all(|(_, pt)| pt.eval(&pt_poly).re > tol);
        if ok {
            return Ok((blocks, pt_poly));
        }
        if bits >= opts.max_bits {
            return Err(CertError::PerturbationFailed(bits));
        }
        bits = (bits * 2).min(opts.max_bits);
    }
}

/// Weighted squares `Σ ω_k q_k² ≡ p` modulo a radical ideal, for `p > 0` on
/// the real points.
fn radical_core(setup: &Setup, p: &Poly, opts: &CertifyOptions) -> Result<Vec<WeightedSquare>, CertError> {
    let r = &setup.radical;
    let qt = gram::build_gram_real(r, &setup.variety, &setup.u, p)?;
    let w = r.basis_polys();
    let gv = GramVariety::from_quotient(r, &w, p)?;
    let cert = gram::round_and_certify(&gv, &qt, opts.start_bits, opts.max_bits)?;
    Ok(cert.ldl.squares(&w).into_iter().map(|(a, b)| WeightedSquare::new(a, b)).collect())
}

/// Real matrix `Θ̃` whose last column `θ` satisfies `θ(ζ) ≠ 0` at every
/// point and `p ≡ Σ_c θ_c²` modulo the radical.
fn nonvanishing_columns(setup: &Setup, p: &Poly) -> DMatrix<f64> {
    let d = setup.radical.dim();
    let pts = &setup.variety.points;
    let col = |k: usize| -> Vec<Complex64> { (0..d).map(|i| setup.u[(i, k)]).collect() };
    let vals: Vec<Complex64> = pts.iter().map(|pt| pt.eval(p)).collect();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let reals: Vec<usize> = setup.variety.real_points().map(|(k, _)| k).collect();
    let pairs = setup.variety.conjugate_pairs();
    if let Some(&x0) = reals.iter().min_by(|a, b| vals[**a].re.partial_cmp(&vals[**b].re).unwrap()) {
        let eps = 0.5;
        let p0 = vals[x0].re;
        let mut v = vec![0.0; d];
        for &k in &reals {
            let c = if k == x0 { 1.0 } else { eps };
            for (vi, ui) in v.iter_mut().zip(col(k)) {
                *vi += c * ui.re;
            }
            if k != x0 {
                let s = (vals[k].re - eps * eps * p0).sqrt();
                cols.push(col(k).iter().map(|z| s * z.re).collect());
            }
        }
        for &(z, _) in &pairs {
            for (vi, ui) in v.iter_mut().zip(col(z)) {
                *vi += 2.0 * ui.re;
            }
            let c = vals[z] - p0;
            let (a, b) = gram::pair_columns(&col(z), c, gram::shift_lambda(c));
            cols.push(a);
            cols.push(b);
        }
        let s = p0.sqrt();
        cols.push(v.iter().map(|x| s * x).collect());
    } else {
        let (z0, zb0) = pairs[0];
        let p0 = vals[z0];
        let lambda0 = ((2.0 * p0.norm() + 1.0) * 256.0).ceil() / 256.0;
        let mut eps: f64 = 0.5;
        let a_of = |eps: f64| (p0 - p0.conj() * eps * eps) / (1.0 - eps.powi(4)) - eps * lambda0;
        while (1.0 + eps * eps) * lambda0 / 2.0 <= a_of(eps).norm() * 1.01 {
            eps /= 2.0;
        }
        let lam1 = (1.0 + eps * eps) * lambda0 / 2.0;
        let mut v: Vec<Complex64> = col(z0).iter().zip(col(zb0)).map(|(a, b)| a + b * eps).collect();
        for &(z, zb) in pairs.iter().skip(1) {
            for (vi, (a, b)) in v.iter_mut().zip(col(z).into_iter().zip(col(zb))) {
                *vi += a + b;
            }
            let rho = vals[z] - (2.0 * p0.re / (1.0 + eps * eps) + (1.0 - eps).powi(2) * lambda0);
            let (a, b) = gram::pair_columns(&col(z), rho, gram::shift_lambda(rho));
            cols.push(a);
            cols.push(b);
        }
        let (a, b) = gram::pair_columns(&v, a_of(eps), lam1);
        cols.push(b);
        cols.push(a);
    }
    DMatrix::from_fn(d, cols.len(), |i, j| cols[j][i])
}

/// `θ_{k+1} = ½(θ_k + θ σ_k)` with `σ_k = θ_k⁻¹` modulo `J^{2^{k+1}}`, for
/// `k = 0, …` until `J^{2^{k+1}} ⊆ I`. Returns the iterates, each reduced
/// modulo the ideal it was computed in, and the final one reduced modulo `I`.
pub fn hensel_sqrt(
    i: &Quotient,
    j_gens: &[Poly],
    theta1: &Poly,
    theta: &Poly,
) -> Result<(Poly, Vec<Poly>), CertError> {
    let chain = ideal_power_chain(i, j_gens)?;
    let half = Rational::new(1.into(), 2.into());
    let mut t = theta1.clone();
    let mut iterates = Vec::new();
    for jk in &chain {
        let sigma = jk.inverse_mod(&t)?;
        t = jk.normal_form(&(&t + &(theta * &sigma)).scale(&half));
        iterates.push(t.clone());
    }
    Ok((i.normal_form(&t), iterates))
}

fn unit_scaled(p: &Poly) -> Poly {
    let m = p.terms().map(|(_, c)| c.abs()).max().unwrap_or_else(Rational::one);
    p.scale(&(Rational::one() / m))
}

/// Squares with `p ≡ Σ ω_k q_k²` modulo a non-radical ideal.
fn nonradical_core(setup: &Setup, p: &Poly, opts: &CertifyOptions) -> Result<Vec<WeightedSquare>, CertError> {
    let r = &setup.radical;
    let d = r.dim();
    let theta_t = nonvanishing_columns(setup, p);
    let b = r.basis_polys();
    let mut bits = opts.start_bits.max(8);
    loop {
        let theta = gram::round_matrix_rect(&theta_t, bits);
        if let Some(inv) = linalg::inverse(&theta) {
            let w: Vec<Poly> = (0..d)
                .map(|c| {
                    let mut s = Poly::zero(r.nvars());
                    for (k, bk) in b.iter().enumerate() {
                        if !theta[k][c].is_zero() {
                            s = &s + &bk.scale(&theta[k][c]);
                        }
                    }
                    s
                })
                .collect();
            let inv_f = DMatrix::from_fn(d, d, |a, c| inv[a][c].to_f64().unwrap());
            let m = &inv_f * &theta_t;
            let qt = &m * m.transpose();
            let gv = GramVariety::from_quotient(r, &w, p)?;
            if let Ok(cert) = gram::round_and_certify(&gv, &qt, bits, bits) {
                let sq = cert.ldl.squares(&w);
                let identity_perm = cert.ldl.perm.iter().enumerate().all(|(a, c)| a == *c);
                // The LDL squares carry large integer factors; rescale before evaluating.
                let last = unit_scaled(&sq[d - 1].1);
                let nonvanishing = setup.variety.points.iter().all(|pt| pt.eval(&last).norm() > 1e-9);
                if identity_perm && nonvanishing {
                    let (wd, thd) = sq[d - 1].clone();
                    let mut rest = p.clone();
                    for (wk, qk) in &sq[..d - 1] {
                        rest = &rest - &qk.square().scale(wk);
                    }
                    let target = rest.scale(&(Rational::one() / &wd));
                    let j_gens = r.gb.polys.clone();
                    let (lifted, _) = hensel_sqrt(&setup.q, &j_gens, &thd, &target)?;
                    let mut out: Vec<WeightedSquare> =
                        sq[..d - 1].iter().map(|(a, b)| WeightedSquare::new(a.clone(), b.clone())).collect();
                    out.push(WeightedSquare::new(wd, lifted));
                    return Ok(out);
                }
            }
        }
        if bits >= opts.max_bits {
            return Err(GramError::PrecisionExceeded { bits }.into());
        }
        bits = (bits * 2).min(opts.max_bits);
    }
}

/// Blocks of a strict certificate for `p` (without cofactors).
fn strict_blocks(
    setup: &Setup,
    g: &[Poly],
    p: &Poly,
    opts: &CertifyOptions,
) -> Result<Vec<Vec<WeightedSquare>>, CertError> {
    let n = setup.q.nvars();
    if setup.q.dim() == 0 {
        return Ok(vec![Vec::new(); g.len() + 1]);
    }
    let tol = setup.variety.tol * scale_of(p);
    for k in setup.membership.s_points() {
        let pt = &setup.variety.points[k];
        let v = pt.eval(p).re;
        if v <= tol {
            return Err(CertError::NotStrictlyPositive { point: pt.real_coords(), value: v });
        }
    }
    let (gblocks, pt) = perturb(setup, g, p, opts)?;
    let core = if setup.radical.dim() == setup.q.dim() {
        radical_core(setup, &pt, opts)?
    } else {
        nonradical_core(setup, &pt, opts)?
    };
    let _ = n;
    let mut blocks = vec![core];
    blocks.extend(gblocks);
    Ok(blocks)
}

pub(crate) fn finish(
    inst: &ProblemInstance,
    q: &Quotient,
    mode: Mode,
    blocks: Vec<Vec<WeightedSquare>>,
) -> Result<Certificate, CertError> {
    let blocks: Vec<Vec<WeightedSquare>> = blocks
        .into_iter()
        .map(|b| b.into_iter().filter(|ws| !ws.weight.is_zero() && !ws.square.is_zero()).map(|ws| ws.normalized()).collect())
        .collect();
    let mut cert = Certificate { mode, names: inst.names.clone(), blocks, cofactors: Vec::new() };
    let residual = &inst.f - &cert.evaluate(&inst.g, &[]);
    let cof = q.cofactor_reduce(&residual);
    if !cof.remainder.is_zero() {
        return Err(CertError::Internal("residual is not in the ideal".into()));
    }
    cert.cofactors = cof.cofactors;
    Ok(cert)
}

/// Certificate of `f > 0` on `S`.
pub fn certify_strict(inst: &ProblemInstance, opts: &CertifyOptions) -> Result<Certificate, CertError> {
    if opts.engine == Engine::Sdp {
        return crate::sdp::sdp_certify(inst, opts).map(|(c, _)| c);
    }
    let s = setup(inst, opts)?;
    let blocks = strict_blocks(&s, &inst.g, &inst.f, opts)?;
    finish(inst, &s.q, Mode::Strict, blocks)
}

/// Certificate of `f > 0` on `S` through the Hensel lift, for a non-radical
/// ideal whose radical is generated by `h` together with `radical_generators`
/// (computed when absent).
pub fn certify_strict_nonradical(
    inst: &ProblemInstance,
    radical_generators: Option<&[Poly]>,
    opts: &CertifyOptions,
) -> Result<Certificate, CertError> {
    let mut inst2 = inst.clone();
    if let Some(r) = radical_generators {
        inst2.radical_generators = Some(r.to_vec());
    }
    let s = setup(&inst2, opts)?;
    let blocks = strict_blocks(&s, &inst.g, &inst.f, opts)?;
    finish(inst, &s.q, Mode::Strict, blocks)
}

/// Certificate of `f ≥ 0` on `S`, under `(f) + (I : f) = (1)`.
pub fn certify_nonneg(inst: &ProblemInstance, opts: &CertifyOptions) -> Result<Certificate, CertError> {
    let s = setup(inst, opts)?;
    let q = &s.q;
    let f = &inst.f;
    let tol = s.variety.tol * scale_of(f);
    for k in s.membership.s_points() {
        let pt = &s.variety.points[k];
        let v = pt.eval(f).re;
        if v < -tol {
            return Err(CertError::NotNonnegative { point: pt.real_coords(), value: v });
        }
    }
    let (mut a, b, gamma) = q.coprimality_witness(f)?;
    let zeros: Vec<usize> =
        (0..s.variety.points.len()).filter(|&k| s.variety.points[k].eval(f).norm() <= tol).collect();
    let needs_shift = zeros
        .iter()
        .any(|&k| s.variety.points[k].real && s.membership.in_s[k] && s.variety.points[k].eval(&a).re <= tol);
    if needs_shift {
        let m = zeros.iter().map(|&k| s.variety.points[k].eval(&a).norm()).fold(0.0, f64::max) + 1.0;
        let mut rho = Rational::one();
        while rho.to_f64().unwrap() <= m {
            rho *= Rational::from_integer(2.into());
        }
        a = q.normal_form(&(&a + &b.scale(&rho)));
    }
    let inner = if opts.engine == Engine::Sdp {
        let mut ai = inst.clone();
        ai.f = a.clone();
        crate::sdp::sdp_certify(&ai, opts)?.0.blocks
    } else {
        strict_blocks(&s, &inst.g, &a, opts)?
    };
    let ginv = Rational::new(BigInt::one(), gamma);
    let blocks = inner
        .into_iter()
        .map(|blk| {
            blk.into_iter()
                .map(|ws| WeightedSquare {
                    weight: ws.weight * &ginv,
                    square: q.normal_form(&(f * &ws.square)),
                    witness: Some(ws.square),
                })
                .collect()
        })
        .collect();
    finish(inst, q, Mode::Nonnegative, blocks)
}

/// Dispatch on the mode.
pub fn certify(inst: &ProblemInstance, mode: Mode, opts: &CertifyOptions) -> Result<Certificate, CertError> {
    match mode {
        Mode::Strict => certify_strict(inst, opts),
        Mode::Nonnegative => certify_nonneg(inst, opts),
    }
}

pub fn is_positive_rational(r: &Rational) -> bool {
    r.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn inst1(ideal: &[&str], f: &str, g: &[&str]) -> ProblemInstance {
        let names = vec!["x".to_string()];
        let p = |s: &str| parse_poly(s, &names).unwrap();
        ProblemInstance::new(names.clone(), p(f), g.iter().map(|s| p(s)).collect(), ideal.iter().map(|s| p(s)).collect())
    }

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    fn check(inst: &ProblemInstance, c: &Certificate) {
        assert_eq!(c.evaluate(&inst.g, &inst.h), inst.f);
        assert!(c.blocks.iter().flatten().all(|ws| ws.weight.is_positive()));
    }

    #[test]
    fn two_point_strict() {
        let inst = inst1(&["x^2-1"], "x+3", &[]);
        let c = certify_strict(&inst, &CertifyOptions::default()).unwrap();
        check(&inst, &c);
        let names = vec!["x".to_string()];
        let got: Vec<(Rational, String)> =
            c.blocks[0].iter().map(|ws| (ws.weight.clone(), ws.square.fmt_with(&names))).collect();
        assert_eq!(got, vec![(q(3, 2), "1/3*x + 1".to_string()), (q(4, 3), "x".to_string())]);
    }

    #[test]
    fn perturbation_removes_point() {
        let inst = inst1(&["x^2-1"], "x", &["x"]);
        let c = certify_strict(&inst, &CertifyOptions::default()).unwrap();
        check(&inst, &c);
        assert_eq!(c.blocks[1].len(), 1);
        assert_eq!(c.blocks[1][0].weight.clone() * c.blocks[1][0].square.constant_term().pow(2), q(2, 1) / q(4, 1));
    }

    #[test]
    fn hensel_iterates() {
        let names = vec!["x".to_string()];
        let p = |s: &str| parse_poly(s, &names).unwrap();
        let i2 = Quotient::new(&[p("x^2")]).unwrap();
        let (t, _) = hensel_sqrt(&i2, &[p("x")], &p("1"), &p("1+x")).unwrap();
        assert_eq!(t, p("1 + x/2"));
        let i3 = Quotient::new(&[p("x^3")]).unwrap();
        let (t, it) = hensel_sqrt(&i3, &[p("x")], &p("1"), &p("2+x").scale(&q(1, 2))).unwrap();
        assert_eq!(it.len(), 2);
        assert!(i3.contains(&(&t.square() - &p("1 + x/2"))));
        let (t, _) = hensel_sqrt(&i3, &[p("x")], &p("1"), &p("1+x")).unwrap();
        assert_eq!(t, p("1 + x/2 - x^2/8"));
    }

    #[test]
    fn nilpotent_strict() {
        let inst = inst1(&["x^2"], "1+x", &[]);
        let c = certify_strict(&inst, &CertifyOptions::default()).unwrap();
        check(&inst, &c);
        let inst = inst1(&["x^3"], "2+x", &[]);
        let c = certify_strict(&inst, &CertifyOptions::default()).unwrap();
        check(&inst, &c);
    }

    #[test]
    fn complex_only_strict() {
        let inst = inst1(&["x^2+1"], "-5 + x", &[]);
        let c = certify_strict(&inst, &CertifyOptions::default()).unwrap();
        check(&inst, &c);
        let inst = inst1(&["(x^2+1)^2"], "-5 + x", &[]);
        let c = certify_strict(&inst, &CertifyOptions::default()).unwrap();
        check(&inst, &c);
    }

    #[test]
    fn nonneg_fails_on_nilpotent_root() {
        let inst = inst1(&["x^2"], "x", &[]);
        let e = certify_nonneg(&inst, &CertifyOptions::default()).unwrap_err();
        assert_eq!(e, CertError::Quotient(QuotientError::ConditionFailed));
        assert!(e.is_condition_failure());
    }

    #[test]
    fn nonneg_simple() {
        let inst = inst1(&["x^2-x"], "x", &[]);
        let c = certify_nonneg(&inst, &CertifyOptions::default()).unwrap();
        check(&inst, &c);
    }
}

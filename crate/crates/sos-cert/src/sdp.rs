//! Numerical SDP route: coefficient-matching formulation, a first-order
//! feasibility solver (alternating projections, over-relaxed or Dykstra),
//! bisection on the margin `λ`, and exact rounding of the numerical solution.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_traits::{ToPrimitive, Zero};

use crate::certifier::{self, Certificate, CertError, CertifyOptions, Mode, ProblemInstance, WeightedSquare};
use crate::gram::{self, GramVariety};
use crate::poly::{round_binary, Monomial, Poly};
use crate::quotient::Quotient;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SdpError {
    #[error("the equality constraints are not a graded basis")]
    NotGraded,
    #[error("infeasible: residual stalled at {residual:e}")]
    Infeasible { residual: f64 },
    #[error("no convergence within the iteration budget (residual {residual:e})")]
    MaxIterations { residual: f64 },
    #[error("rounding did not produce a positive definite Gram matrix up to {digits} digits")]
    RoundingFailed { digits: u32 },
    #[error("malformed solver result, line {line}: {message}")]
    BadResult { line: usize, message: String },
}

/// `f = m₀ Q₀ m₀ᵀ + Σ_i g_i m_i Q_i m_iᵀ + Σ_j p_j h_j` matched coefficient by
/// coefficient over all monomials of degree at most `degree_cap`.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub nvars: usize,
    /// Monomial vector of each block; block 0 multiplies 1, block `i` multiplies `g_i`.
    pub blocks: Vec<Vec<Monomial>>,
    pub multipliers: Vec<Poly>,
    /// Support of each cofactor `p_j`.
    pub cofactor_support: Vec<Vec<Monomial>>,
    pub h: Vec<Poly>,
    pub f: Poly,
    pub degree_cap: u32,
    /// Equation monomials.
    pub rows: Vec<Monomial>,
    /// Constraint matrix on the scaled variables (off-diagonal block entries
    /// carry a factor `√2` so that the Euclidean norm is the Frobenius norm).
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    offsets: Vec<usize>,
    cof_offsets: Vec<usize>,
}

impl SdpProblem {
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    /// Largest degree allowed for each cofactor.
    pub fn cofactor_caps(&self) -> Vec<u32> {
        self.h.iter().map(|h| self.degree_cap.saturating_sub(h.degree())).collect()
    }

    pub fn nvariables(&self) -> usize {
        self.a.ncols()
    }

    fn block_var(&self, blk: usize, i: usize, j: usize) -> usize {
        self.offsets[blk] + gram::tri_index(self.blocks[blk].len(), i, j)
    }

    /// Exact-arithmetic coefficient of row monomial `r` for the pair `(a, b)`
    /// of block `blk`, before the `√2` scaling.
    fn pair_poly(&self, blk: usize, a: usize, b: usize) -> Poly {
        let m = self.blocks[blk][a].mul(&self.blocks[blk][b]);
        self.multipliers[blk].mul_term(&m, &Rational::from_integer(1.into()))
    }
}

/// Build the coefficient-matching problem with monomial degrees `orders[i]`
/// for block `i` (block 0 is the free SoS).
pub fn formulate(inst: &ProblemInstance, q: &Quotient, orders: &[u32]) -> Result<SdpProblem, SdpError> {
    if !q.graded {
        return Err(SdpError::NotGraded);
    }
    let n = inst.nvars();
    let mut multipliers = vec![Poly::one(n)];
    multipliers.extend(inst.g.iter().cloned());
    let blocks: Vec<Vec<Monomial>> =
        (0..multipliers.len()).map(|i| Monomial::up_to_degree(n, orders[i.min(orders.len() - 1)])).collect();
    let mut cap = inst.f.degree();
    for (i, m) in multipliers.iter().enumerate() {
        cap = cap.max(m.degree() + 2 * orders[i.min(orders.len() - 1)]);
    }
    let cofactor_support: Vec<Vec<Monomial>> = inst
        .h
        .iter()
        .map(|h| if h.degree() <= cap { Monomial::up_to_degree(n, cap - h.degree()) } else { Vec::new() })
        .collect();
    let rows = Monomial::up_to_degree(n, cap);
    let row_of: std::collections::HashMap<&Monomial, usize> = rows.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut offsets = Vec::new();
    let mut nv = 0;
    for b in &blocks {
        offsets.push(nv);
        nv += gram::tri_len(b.len());
    }
    let mut cof_offsets = Vec::new();
    for s in &cofactor_support {
        cof_offsets.push(nv);
        nv += s.len();
    }
    let mut a = DMatrix::<f64>::zeros(rows.len(), nv);
    let sqrt2 = 2f64.sqrt();
    for (blk, mons) in blocks.iter().enumerate() {
        let d = mons.len();
        for i in 0..d {
            for j in i..d {
                let col = offsets[blk] + gram::tri_index(d, i, j);
                let mm = mons[i].mul(&mons[j]);
                // 2·Q_ij appears in the expansion; with the √2 scaling this is √2·x.
                let scale = if i == j { 1.0 } else { sqrt2 };
                for (t, c) in multipliers[blk].terms() {
                    a[(row_of[&t.mul(&mm)], col)] += scale * c.to_f64().unwrap();
                }
            }
        }
    }
    for (j, supp) in cofactor_support.iter().enumerate() {
        for (k, m) in supp.iter().enumerate() {
            for (t, c) in inst.h[j].terms() {
                a[(row_of[&t.mul(m)], cof_offsets[j] + k)] += c.to_f64().unwrap();
            }
        }
    }
    let mut b = DVector::<f64>::zeros(rows.len());
    for (t, c) in inst.f.terms() {
        b[row_of[t]] = c.to_f64().unwrap();
    }
    Ok(SdpProblem {
        nvars: n,
        blocks,
        multipliers,
        cofactor_support,
        h: inst.h.clone(),
        f: inst.f.clone(),
        degree_cap: cap,
        rows,
        a,
        b,
        offsets,
        cof_offsets,
    })
}

/// Numerical solution: block matrices and cofactor coefficients.
#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub lambda: f64,
    pub blocks: Vec<DMatrix<f64>>,
    pub cofactors: Vec<DVector<f64>>,
    pub residual: f64,
    pub iterations: usize,
}

/// Projection scheme between the affine set and the cone.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    /// Dykstra's algorithm. Converges to the point of the intersection
    /// nearest the start, which is more than feasibility needs and slow.
    Dykstra,
    /// Plain alternating projections with the affine step over-relaxed by the
    /// given factor in `(0, 2)`.
    Relaxed(f64),
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    pub max_iterations: usize,
    pub tol: f64,
    /// Window over which a residual reduction below 1% counts as a stall.
    pub stall_window: usize,
    pub method: Method,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_iterations: 40_000, tol: 1e-9, stall_window: 2_000, method: Method::Relaxed(1.9) }
    }
}

struct Projector {
    pinv: DMatrix<f64>,
}

impl Projector {
    fn new(prob: &SdpProblem) -> Projector {
        let svd = prob.a.clone().svd(true, true);
        let pinv = svd.pseudo_inverse(1e-10).expect("svd computed with both factors");
        Projector { pinv }
    }

    fn affine(&self, prob: &SdpProblem, x: &DVector<f64>) -> DVector<f64> {
        let r = &prob.a * x - &prob.b;
        x - &self.pinv * r
    }
}

fn unpack(prob: &SdpProblem, x: &DVector<f64>, blk: usize) -> DMatrix<f64> {
    let d = prob.blocks[blk].len();
    let s = 1.0 / 2f64.sqrt();
    DMatrix::from_fn(d, d, |i, j| {
        let v = x[prob.block_var(blk, i, j)];
        if i == j {
            v
        } else {
            v * s
        }
    })
}

fn pack(prob: &SdpProblem, x: &mut DVector<f64>, blk: usize, m: &DMatrix<f64>) {
    let d = prob.blocks[blk].len();
    let s = 2f64.sqrt();
    for i in 0..d {
        for j in i..d {
            x[prob.block_var(blk, i, j)] = if i == j { m[(i, i)] } else { s * 0.5 * (m[(i, j)] + m[(j, i)]) };
        }
    }
}

fn psd_part(m: &DMatrix<f64>, shift: f64) -> DMatrix<f64> {
    let d = m.nrows();
    let shifted = m - DMatrix::identity(d, d) * shift;
    let eig = shifted.symmetric_eigen();
    let vals = eig.eigenvalues.map(|v| if v < 1e-12 { 0.0 } else { v });
    let mut out = &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose();
    for i in 0..d {
        out[(i, i)] += shift;
    }
    out
}

fn cone(prob: &SdpProblem, x: &DVector<f64>, lambda: f64) -> DVector<f64> {
    let mut out = x.clone();
    for blk in 0..prob.blocks.len() {
        let m = unpack(prob, x, blk);
        let shift = if blk == 0 { lambda } else { 0.0 };
        pack(prob, &mut out, blk, &psd_part(&m, shift));
    }
    out
}

fn to_solution(prob: &SdpProblem, x: &DVector<f64>, lambda: f64, residual: f64, iterations: usize) -> SdpSolution {
    SdpSolution {
        lambda,
        blocks: (0..prob.blocks.len()).map(|b| unpack(prob, x, b)).collect(),
        cofactors: prob
            .cofactor_support
            .iter()
            .enumerate()
            .map(|(j, s)| DVector::from_iterator(s.len(), (0..s.len()).map(|k| x[prob.cof_offsets[j] + k])))
            .collect(),
        residual,
        iterations,
    }
}

fn solve_from(
    prob: &SdpProblem,
    proj: &Projector,
    lambda: f64,
    start: &DVector<f64>,
    opts: &SolverOptions,
) -> Result<(SdpSolution, DVector<f64>), SdpError> {
    let nv = prob.nvariables();
    let mut x = start.clone();
    let mut p = DVector::<f64>::zeros(nv);
    let mut q = DVector::<f64>::zeros(nv);
    let mut checkpoint = f64::INFINITY;
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iterations {
        match opts.method {
            Method::Dykstra => {
                let y = proj.affine(prob, &(&x + &p));
                p = &x + &p - &y;
                let xn = cone(prob, &(&y + &q), lambda);
                q = &y + &q - &xn;
                x = xn;
            }
            Method::Relaxed(w) => {
                let y = proj.affine(prob, &x);
                x = cone(prob, &(&x + (y - &x) * w), lambda);
            }
        }
        residual = (&prob.a * &x - &prob.b).norm();
        if residual < opts.tol {
            return Ok((to_solution(prob, &x, lambda, residual, it), x));
        }
        if it % opts.stall_window == 0 {
            if residual > 0.99 * checkpoint {
                return Err(SdpError::Infeasible { residual });
            }
            checkpoint = residual;
        }
    }
    Err(SdpError::MaxIterations { residual })
}

/// Find `Q_i ⪰ 0`, `Q₀ ⪰ λI` and cofactors satisfying the equations.
pub fn solve_feasibility(prob: &SdpProblem, lambda: f64, opts: &SolverOptions) -> Result<SdpSolution, SdpError> {
    let proj = Projector::new(prob);
    solve_from(prob, &proj, lambda, &DVector::zeros(prob.nvariables()), opts).map(|s| s.0)
}

/// Relative bracket width at which bisection stops. Rounding only needs a
/// margin of the right order, not the optimum.
pub const BISECTION_GAP: f64 = 0.2;

/// Record of a bisection run on `λ`.
#[derive(Clone, Debug, Default)]
pub struct BisectionTrace {
    pub probes: Vec<(f64, bool)>,
}

/// Largest `λ` found feasible by doubling and bisection, with its solution.
pub fn maximize_lambda(prob: &SdpProblem, opts: &SolverOptions) -> Result<(SdpSolution, BisectionTrace), SdpError> {
    let proj = Projector::new(prob);
    let mut trace = BisectionTrace::default();
    let mut start = DVector::zeros(prob.nvariables());
    let mut best: Option<SdpSolution> = None;
    let mut lo = 0.0;
    let mut hi: Option<f64> = None;
    let mut lam: f64 = 1.0;
    let mut last_err = SdpError::Infeasible { residual: f64::INFINITY };
    for _ in 0..24 {
        match solve_from(prob, &proj, lam, &start, opts) {
            Ok((sol, x)) => {
                trace.probes.push((lam, true));
                lo = lam;
                start = x;
                best = Some(sol);
            }
            Err(e) => {
                trace.probes.push((lam, false));
                hi = Some(lam);
                last_err = e;
            }
        }
        match hi {
            None => lam *= 2.0,
            Some(h) => {
                if best.is_some() && h - lo < BISECTION_GAP * h {
                    break;
                }
                if best.is_none() && lam < 1e-6 {
                    break;
                }
                lam = if best.is_some() { 0.5 * (lo + h) } else { lam / 8.0 };
            }
        }
        if lam > 1e6 {
            break;
        }
    }
    match best {
        Some(s) => Ok((s, trace)),
        None => Err(last_err),
    }
}

/// Diagnostics of an [`sdp_certify`] run.
#[derive(Clone, Debug, Default)]
pub struct SdpCertifyReport {
    pub lambda: f64,
    pub digits_start: u32,
    pub digits_final: u32,
    pub rounding_attempts: u32,
    pub probes: Vec<(f64, bool)>,
}

/// `Q = L D Lᵀ` in floating point, for positive semidefinite `Q`; columns
/// with a negligible pivot are dropped.
pub fn weighted_cholesky(q: &DMatrix<f64>) -> Vec<(f64, DVector<f64>)> {
    let d = q.nrows();
    let mut a = q.clone();
    let scale = (0..d).map(|i| q[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut out = Vec::new();
    for k in 0..d {
        let piv = a[(k, k)];
        if piv <= 1e-12 * scale {
            continue;
        }
        let col = DVector::from_iterator(d, (0..d).map(|i| if i < k { 0.0 } else { a[(i, k)] / piv }));
        for i in k..d {
            for j in k..d {
                a[(i, j)] -= piv * col[i] * col[j];
            }
        }
        out.push((piv, col));
    }
    out
}

fn monomial_polys(mons: &[Monomial]) -> Vec<Poly> {
    mons.iter().map(|m| Poly::term(m.clone(), Rational::from_integer(1.into()))).collect()
}

/// Solve the SDP numerically, round the `g`-blocks at `κ`
/// decimal digits, fit the free block exactly and raise `κ` until the exact
/// Gram matrix is positive definite.
pub fn sdp_certify(
    inst: &ProblemInstance,
    opts: &CertifyOptions,
) -> Result<(Certificate, SdpCertifyReport), CertError> {
    let q = Quotient::new(&inst.h)?;
    if !q.graded {
        return Err(SdpError::NotGraded.into());
    }
    let n = inst.nvars();
    let mut report = SdpCertifyReport::default();
    if inst.f.is_constant() && inst.f.constant_term() > Rational::zero() {
        let mut blocks = vec![vec![WeightedSquare::new(inst.f.constant_term(), Poly::one(n))]];
        blocks.extend(inst.g.iter().map(|_| Vec::new()));
        return Ok((certifier::finish(inst, &q, Mode::Strict, blocks)?, report));
    }
    let ell = opts.order.unwrap_or_else(|| q.basis_degree());
    let prob = formulate(inst, &q, &[ell])?;
    let (sol, trace) = maximize_lambda(&prob, &SolverOptions::default())?;
    report.lambda = sol.lambda;
    report.probes = trace.probes;
    let mut digits = ((-sol.lambda.log10()).ceil().max(0.0) as u32).max(1);
    report.digits_start = digits;
    let w0 = monomial_polys(&prob.blocks[0]);
    let max_digits = (opts.max_bits as f64 / std::f64::consts::LOG2_10) as u32;
    loop {
        report.rounding_attempts += 1;
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32;
        let mut gblocks: Vec<Vec<WeightedSquare>> = Vec::new();
        let mut fhat = inst.f.clone();
        for (blk, qi) in sol.blocks.iter().enumerate().skip(1) {
            let w = monomial_polys(&prob.blocks[blk]);
            let mut squares = Vec::new();
            for (piv, col) in weighted_cholesky(qi) {
                let wt = round_binary(piv, bits);
                if wt <= Rational::zero() {
                    continue;
                }
                let mut sq = Poly::zero(n);
                for (k, wk) in w.iter().enumerate() {
                    let c = round_binary(col[k], bits);
                    if !c.is_zero() {
                        sq = &sq + &wk.scale(&c);
                    }
                }
                fhat = &fhat - &(&sq.square() * &prob.multipliers[blk]).scale(&wt);
                squares.push(WeightedSquare::new(wt, sq));
            }
            gblocks.push(squares);
        }
        let gv = GramVariety::from_quotient(&q, &w0, &fhat)?;
        let y = gram::project_to_gram(&gv, &gram::round_matrix(&sol.blocks[0], bits));
        if let Ok(ldl) = gram::ldlt(&y) {
            report.digits_final = digits;
            let mut blocks = vec![ldl.squares(&w0).into_iter().map(|(a, b)| WeightedSquare::new(a, b)).collect()];
            blocks.extend(gblocks);
            let blocks = blocks
                .into_iter()
                .map(|b: Vec<WeightedSquare>| {
                    b.into_iter()
                        .map(|ws| WeightedSquare { square: q.normal_form(&ws.square), ..ws })
                        .collect()
                })
                .collect();
            return Ok((certifier::finish(inst, &q, Mode::Strict, blocks)?, report));
        }
        if digits >= max_digits {
            return Err(SdpError::RoundingFailed { digits }.into());
        }
        digits += 1;
    }
}

/// Problem in SDPA sparse format: maximise `λ` subject to the coefficient
/// equations, with `Q₀ = λI + Q₀'` and the free cofactor coefficients split
/// into nonnegative parts in a trailing diagonal block.
pub fn write_sdpa(prob: &SdpProblem) -> String {
    let mut s = String::new();
    let ncof: usize = prob.cofactor_support.iter().map(|c| c.len()).sum();
    let nb = prob.blocks.len() + 1;
    let _ = writeln!(s, "\"sos-cert: maximize lambda; last block = [lambda, p+, p-]\"");
    let _ = writeln!(s, "{}", prob.rows.len());
    let _ = writeln!(s, "{}", nb);
    let mut sizes: Vec<String> = prob.blocks.iter().map(|b| b.len().to_string()).collect();
    sizes.push(format!("-{}", 1 + 2 * ncof));
    let _ = writeln!(s, "{}", sizes.join(" "));
    let _ = writeln!(s, "{}", prob.b.iter().map(|v| format!("{}", v)).collect::<Vec<_>>().join(" "));
    let _ = writeln!(s, "0 {} 1 1 1", nb);
    let sqrt2 = 2f64.sqrt();
    let lp = nb;
    for blk in 0..prob.blocks.len() {
        let d = prob.blocks[blk].len();
        for i in 0..d {
            for j in i..d {
                let col = prob.block_var(blk, i, j);
                for r in 0..prob.rows.len() {
                    let v = prob.a[(r, col)];
                    if v != 0.0 {
                        // SDPA counts an upper entry (i, j) once per symmetric position.
                        let val = if i == j { v } else { v / sqrt2 };
                        let _ = writeln!(s, "{} {} {} {} {}", r + 1, blk + 1, i + 1, j + 1, val);
                    }
                }
            }
        }
    }
    for r in 0..prob.rows.len() {
        let mut lam = 0.0;
        for i in 0..prob.blocks[0].len() {
            lam += prob.a[(r, prob.block_var(0, i, i))];
        }
        if lam != 0.0 {
            let _ = writeln!(s, "{} {} 1 1 {}", r + 1, lp, lam);
        }
        let mut k = 0;
        for (j, supp) in prob.cofactor_support.iter().enumerate() {
            for t in 0..supp.len() {
                let v = prob.a[(r, prob.cof_offsets[j] + t)];
                if v != 0.0 {
                    let _ = writeln!(s, "{} {} {} {} {}", r + 1, lp, 2 + k, 2 + k, v);
                    let _ = writeln!(s, "{} {} {} {} {}", r + 1, lp, 2 + ncof + k, 2 + ncof + k, -v);
                }
                k += 1;
            }
        }
    }
    s
}

/// Text form of a solution: `lambda <v>`, then `block <i> <size>` followed by
/// one line per matrix row, then `cofactor <j> <len>` followed by one line of
/// coefficients in the order of the cofactor support.
pub fn write_solution(sol: &SdpSolution) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "lambda {}", sol.lambda);
    for (i, b) in sol.blocks.iter().enumerate() {
        let _ = writeln!(s, "block {} {}", i, b.nrows());
        for r in 0..b.nrows() {
            let row: Vec<String> = (0..b.ncols()).map(|c| format!("{}", b[(r, c)])).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
    }
    for (j, c) in sol.cofactors.iter().enumerate() {
        let _ = writeln!(s, "cofactor {} {}", j, c.len());
        let _ = writeln!(s, "{}", c.iter().map(|v| format!("{}", v)).collect::<Vec<_>>().join(" "));
    }
    s
}

/// Read a solution produced by an external solver in the [`write_solution`]
/// format and check its shape against the problem.
pub fn read_solution(text: &str, prob: &SdpProblem) -> Result<SdpSolution, SdpError> {
    let lines: Vec<(usize, &str)> =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#')).collect();
    let bad = |line: usize, m: &str| SdpError::BadResult { line, message: m.to_string() };
    let nums = |line: usize, l: &str| -> Result<Vec<f64>, SdpError> {
        l.split_whitespace().map(|t| t.parse::<f64>().map_err(|_| bad(line, "expected numbers"))).collect()
    };
    let mut lambda = 0.0;
    let mut blocks: Vec<DMatrix<f64>> = Vec::new();
    let mut cofactors: Vec<DVector<f64>> = Vec::new();
    let mut k = 0;
    while k < lines.len() {
        let (ln, l) = lines[k];
        let parts: Vec<&str> = l.split_whitespace().collect();
        match parts[0] {
            "lambda" => {
                lambda = parts.get(1).and_then(|v| v.parse().ok()).ok_or_else(|| bad(ln, "lambda value"))?;
                k += 1;
            }
            "block" => {
                let size: usize = parts.get(2).and_then(|v| v.parse().ok()).ok_or_else(|| bad(ln, "block size"))?;
                let idx = blocks.len();
                if prob.blocks.get(idx).map(|b| b.len()) != Some(size) {
                    return Err(bad(ln, "block size does not match the problem"));
                }
                let mut m = DMatrix::zeros(size, size);
                for r in 0..size {
                    let (rl, row) = *lines.get(k + 1 + r).ok_or_else(|| bad(ln, "missing block rows"))?;
                    let v = nums(rl, row)?;
                    if v.len() != size {
                        return Err(bad(rl, "wrong row length"));
                    }
                    for c in 0..size {
                        m[(r, c)] = v[c];
                    }
                }
                blocks.push(m);
                k += 1 + size;
            }
            "cofactor" => {
                let len: usize = parts.get(2).and_then(|v| v.parse().ok()).ok_or_else(|| bad(ln, "cofactor length"))?;
                let idx = cofactors.len();
                if prob.cofactor_support.get(idx).map(|c| c.len()) != Some(len) {
                    return Err(bad(ln, "cofactor length does not match the problem"));
                }
                let v = if len == 0 {
                    Vec::new()
                } else {
                    let (rl, row) = *lines.get(k + 1).ok_or_else(|| bad(ln, "missing coefficients"))?;
                    nums(rl, row)?
                };
                if v.len() != len {
                    return Err(bad(ln, "wrong number of coefficients"));
                }
                cofactors.push(DVector::from_vec(v));
                k += if len == 0 { 1 } else { 2 };
            }
            _ => return Err(bad(ln, "unknown section")),
        }
    }
    if blocks.len() != prob.blocks.len() || cofactors.len() != prob.cofactor_support.len() {
        return Err(bad(0, "missing sections"));
    }
    let mut x = DVector::zeros(prob.nvariables());
    for (b, m) in blocks.iter().enumerate() {
        pack(prob, &mut x, b, m);
    }
    for (j, c) in cofactors.iter().enumerate() {
        for (t, v) in c.iter().enumerate() {
            x[prob.cof_offsets[j] + t] = *v;
        }
    }
    let residual = (&prob.a * &x - &prob.b).norm();
    Ok(SdpSolution { lambda, blocks, cofactors, residual, iterations: 0 })
}

/// Exact polynomial `m Q mᵀ · g` of one block; used for cross-checks.
pub fn block_polynomial(prob: &SdpProblem, blk: usize, q: &[Vec<Rational>]) -> Poly {
    let d = prob.blocks[blk].len();
    let mut out = Poly::zero(prob.nvars);
    for i in 0..d {
        for j in 0..d {
            out = &out + &prob.pair_poly(blk, i, j).scale(&q[i][j]);
        }
    }
    out
}

pub fn to_f64_vec(v: &[Rational]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64().unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn example_two_point() -> ProblemInstance {
        let names = vec!["x".to_string(), "y".to_string()];
        let p = |s: &str| parse_poly(s, &names).unwrap();
        ProblemInstance::new(names.clone(), p("x+y+3"), vec![p("y")], vec![p("x^2-1"), p("y^2-x-2")])
    }

    #[test]
    fn formulation_sizes() {
        let inst = example_two_point();
        let q = Quotient::new(&inst.h).unwrap();
        let prob = formulate(&inst, &q, &[2, 2]).unwrap();
        assert_eq!(prob.block_sizes(), vec![6, 6]);
        assert_eq!(prob.cofactor_caps(), vec![3, 3]);
        assert_eq!(prob.degree_cap, 5);
    }

    #[test]
    fn feasible_at_small_margin() {
        let inst = example_two_point();
        let q = Quotient::new(&inst.h).unwrap();
        let prob = formulate(&inst, &q, &[2, 2]).unwrap();
        let sol = solve_feasibility(&prob, 0.05, &SolverOptions::default()).unwrap();
        assert!(sol.residual < 1e-8);
        let e0 = sol.blocks[0].clone().symmetric_eigen().eigenvalues.min();
        assert!(e0 >= 0.05 - 1e-9);
        let text = write_solution(&sol);
        let back = read_solution(&text, &prob).unwrap();
        assert!(back.residual < 1e-7);
        assert!(write_sdpa(&prob).lines().count() > 10);
    }

    #[test]
    fn negative_constant_infeasible() {
        let mut inst = example_two_point();
        inst.f = Poly::from_int(2, -1);
        let q = Quotient::new(&inst.h).unwrap();
        let prob = formulate(&inst, &q, &[2, 2]).unwrap();
        assert!(matches!(solve_feasibility(&prob, 0.0, &SolverOptions::default()), Err(SdpError::Infeasible { .. })));
    }

    #[test]
    fn constant_needs_no_solver() {
        let mut inst = example_two_point();
        inst.f = Poly::from_int(2, 1);
        let (c, r) = sdp_certify(&inst, &CertifyOptions::default()).unwrap();
        assert_eq!(r.rounding_attempts, 0);
        assert_eq!(c.evaluate(&inst.g, &inst.h), inst.f);
    }

    #[test]
    fn two_point_example_certifies() {
        let inst = example_two_point();
        let (c, r) = sdp_certify(&inst, &CertifyOptions::default()).unwrap();
        assert!(r.lambda > 0.0);
        assert_eq!(c.evaluate(&inst.g, &inst.h), inst.f);
        for (pj, hj) in c.cofactors.iter().zip(&inst.h) {
            assert!(pj.degree() + hj.degree() <= 5);
        }
    }

    #[test]
    fn dykstra_reaches_the_same_feasible_set() {
        let inst = example_two_point();
        let q = Quotient::new(&inst.h).unwrap();
        let prob = formulate(&inst, &q, &[2, 2]).unwrap();
        let opts = SolverOptions { method: Method::Dykstra, ..SolverOptions::default() };
        let sol = solve_feasibility(&prob, 0.05, &opts).unwrap();
        assert!(sol.residual < opts.tol);
    }

    #[test]
    fn feasible_margins_are_down_closed() {
        let inst = example_two_point();
        let q = Quotient::new(&inst.h).unwrap();
        let prob = formulate(&inst, &q, &[2, 2]).unwrap();
        let (sol, trace) = maximize_lambda(&prob, &SolverOptions::default()).unwrap();
        let lowest_fail = trace.probes.iter().filter(|p| !p.1).map(|p| p.0).fold(f64::INFINITY, f64::min);
        let highest_ok = trace.probes.iter().filter(|p| p.1).map(|p| p.0).fold(0.0, f64::max);
        assert!(highest_ok < lowest_fail, "{:?}", trace.probes);
        assert_eq!(sol.lambda, highest_ok);
        // The reported residual is the residual of the returned blocks.
        let text = write_solution(&sol);
        let back = read_solution(&text, &prob).unwrap();
        assert!((back.residual - sol.residual).abs() < 1e-9);
    }
}

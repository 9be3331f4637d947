//! Exact verification of certificates and the degree/height bound calculators.

use std::fmt;

use num_traits::Signed;

use crate::certifier::{Certificate, Mode, ProblemInstance};
use crate::poly::Poly;
use crate::quotient::Quotient;

/// Outcome of [`verify_certificate`]. Never an error: mathematical failures
/// are reported as flags.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub identity_ok: bool,
    pub weights_ok: bool,
    /// `None` when the equality constraints are not a graded basis of a
    /// zero-dimensional ideal (the bound does not apply).
    pub degree_bound_ok: Option<bool>,
    pub degree_bound: Option<u32>,
    pub max_cofactor_degree: u32,
    /// Nonnegative mode only: every square `q` has a recorded `r` with
    /// `q − f·r` in the ideal.
    pub witnesses_ok: Option<bool>,
    pub max_weight_bits: u64,
    pub max_square_bits: u64,
    pub max_cofactor_bits: u64,
    /// `RHS − f`; zero iff the identity holds.
    pub residual: Poly,
}

impl VerificationReport {
    /// Identity and weights hold, and the optional checks did not fail.
    pub fn ok(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn first_failure(&self) -> Option<&'static str> {
        if !self.identity_ok {
            Some("identity")
        } else if !self.weights_ok {
            Some("weights")
        } else if self.witnesses_ok == Some(false) {
            Some("witnesses")
        } else if self.degree_bound_ok == Some(false) {
            Some("degree_bound")
        } else {
            None
        }
    }
}

fn opt(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "true",
        Some(false) => "false",
        None => "n/a",
    }
}

impl fmt::Display for VerificationReport {
    /// Machine-readable `key=value` lines.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "identity_ok={}", self.identity_ok)?;
        writeln!(f, "weights_ok={}", self.weights_ok)?;
        writeln!(f, "witnesses_ok={}", opt(self.witnesses_ok))?;
        writeln!(f, "degree_bound_ok={}", opt(self.degree_bound_ok))?;
        match self.degree_bound {
            Some(b) => writeln!(f, "degree_bound={}", b)?,
            None => writeln!(f, "degree_bound=n/a")?,
        }
        writeln!(f, "max_cofactor_degree={}", self.max_cofactor_degree)?;
        writeln!(f, "max_weight_bits={}", self.max_weight_bits)?;
        writeln!(f, "max_square_bits={}", self.max_square_bits)?;
        writeln!(f, "max_cofactor_bits={}", self.max_cofactor_bits)?;
        write!(f, "first_failure={}", self.first_failure().unwrap_or("none"))
    }
}

fn rational_bits(r: &crate::Rational) -> u64 {
    r.numer().bits().max(r.denom().bits())
}

fn poly_bits(p: &Poly) -> u64 {
    let (a, b) = p.height();
    a.max(b)
}

/// Check `f = Σ ω₀ₖ q₀ₖ² + Σ_i g_i Σ ωᵢₖ qᵢₖ² + Σ p_j h_j` exactly over ℚ.
pub fn verify_certificate(inst: &ProblemInstance, cert: &Certificate) -> VerificationReport {
    let rhs = cert.evaluate(&inst.g, &inst.h);
    let residual = &rhs - &inst.f;
    let identity_ok = residual.is_zero()
        && cert.blocks.len() <= inst.g.len() + 1
        && cert.cofactors.len() <= inst.h.len()
        && (cert.blocks.len() == inst.g.len() + 1 || cert.blocks.iter().skip(inst.g.len() + 1).all(|b| b.is_empty()));
    let weights_ok = cert.blocks.iter().flatten().all(|ws| !ws.weight.is_negative());
    let max_cofactor_degree =
        cert.cofactors.iter().zip(&inst.h).filter(|(p, _)| !p.is_zero()).map(|(p, h)| p.degree() + h.degree()).max().unwrap_or(0);
    let (degree_bound, degree_bound_ok) = match Quotient::new_untracked(&inst.h) {
        Ok(q) if q.graded => {
            let b = degree_bounds(inst, &q).degree_bound;
            (Some(b), Some(max_cofactor_degree <= b))
        }
        _ => (None, None),
    };
    let witnesses_ok = if cert.mode == Mode::Nonnegative {
        let q = Quotient::new_untracked(&inst.h).ok();
        Some(cert.blocks.iter().flatten().all(|ws| match &ws.witness {
            None => false,
            Some(r) => {
                let diff = &ws.square - &(&inst.f * r);
                match &q {
                    Some(q) => q.contains(&diff),
                    None => diff.is_zero(),
                }
            }
        }))
    } else {
        None
    };
    let all = cert.blocks.iter().flatten();
    VerificationReport {
        identity_ok,
        weights_ok,
        degree_bound_ok,
        degree_bound,
        max_cofactor_degree,
        witnesses_ok,
        max_weight_bits: all.clone().map(|ws| rational_bits(&ws.weight)).max().unwrap_or(0),
        max_square_bits: all.map(|ws| poly_bits(&ws.square)).max().unwrap_or(0),
        max_cofactor_bits: cert.cofactors.iter().map(poly_bits).max().unwrap_or(0),
        residual,
    }
}

/// Degree data of an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub deg_b: u32,
    /// Maximal degree `d` of `f`, the `g_i` and the `h_j`.
    pub d: u32,
    /// Bound for `deg(p_j h_j)`: `max{deg f, 2 deg B, deg g_i + 2 deg B}`.
    pub degree_bound: u32,
    /// Order of the moment/SoS hierarchy that reaches the minimum:
    /// `⌈½ max{deg f, 2 deg B + deg g_i}⌉` with `g₀ = 1`.
    pub hierarchy_order: u32,
    /// `2(d + deg B) + 1`.
    pub d_hat: u32,
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "deg(p_j h_j) <= {}; hierarchy order r = {}", self.degree_bound, self.hierarchy_order)?;
        writeln!(f, "deg_b={}", self.deg_b)?;
        writeln!(f, "d={}", self.d)?;
        writeln!(f, "degree_bound={}", self.degree_bound)?;
        writeln!(f, "hierarchy_order={}", self.hierarchy_order)?;
        write!(f, "d_hat={}", self.d_hat)
    }
}

pub fn degree_bounds_from(deg_f: u32, deg_g: &[u32], deg_h: &[u32], deg_b: u32) -> BoundReport {
    let mut top = deg_f.max(2 * deg_b);
    for &dg in deg_g {
        top = top.max(dg + 2 * deg_b);
    }
    let d = deg_g.iter().chain(deg_h).copied().fold(deg_f, u32::max);
    BoundReport { deg_b, d, degree_bound: top, hierarchy_order: top.div_ceil(2), d_hat: 2 * (d + deg_b) + 1 }
}

/// Bit height `τ` of the input: the largest numerator or denominator size
/// over `f`, the `g_i` and the `h_j`, at least 1.
pub fn input_height(inst: &ProblemInstance) -> u32 {
    let tau = std::iter::once(&inst.f)
        .chain(&inst.g)
        .chain(&inst.h)
        .map(|p| {
            let (a, b) = p.height();
            a.max(b)
        })
        .max()
        .unwrap_or(0);
    (tau as u32).max(1)
}

pub fn degree_bounds(inst: &ProblemInstance, q: &Quotient) -> BoundReport {
    let dg: Vec<u32> = inst.g.iter().map(|g| g.degree()).collect();
    let dh: Vec<u32> = inst.h.iter().map(|h| h.degree()).collect();
    degree_bounds_from(inst.f.degree(), &dg, &dh, q.basis_degree())
}

/// Upper-bound formulas for the bit sizes of a strict certificate with a
/// user-chosen constant `c`, with `𝒞(n) = c·n·log₂(n+1)` and
/// `𝒞(n; d) = c·n·log₂(d(n+1))`. Diagnostic only: the true constant is not
/// known.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightBounds {
    pub c: f64,
    pub c_n: f64,
    pub c_n_d: f64,
    /// `max{d, deg B}`.
    pub delta: u32,
    pub d_f: u32,
    pub nu0: f64,
    pub nu1: f64,
    pub omega: f64,
    pub q: f64,
    pub cofactors: f64,
    /// `2(d + deg B) + 1`.
    pub d_hat: u32,
    /// `max{d_f, d + 2 deg B} + 1`, the strict cofactor degree limit.
    pub cofactor_degree: u32,
}

impl fmt::Display for HeightBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# upper-bound formula with user constant c = {}", self.c)?;
        writeln!(f, "height_nu0={}", self.nu0)?;
        writeln!(f, "height_nu1={}", self.nu1)?;
        writeln!(f, "height_omega={}", self.omega)?;
        writeln!(f, "height_q={}", self.q)?;
        writeln!(f, "height_cofactors={}", self.cofactors)?;
        writeln!(f, "d_hat={}", self.d_hat)?;
        write!(f, "cofactor_degree={}", self.cofactor_degree)
    }
}

/// Evaluate the height formulas for `n` variables, input degree `d`, basis
/// degree `deg_b`, coefficient height `tau` and `deg f = d_f`.
pub fn height_bound_formula(n: u32, d: u32, deg_b: u32, tau: u32, d_f: u32, c: f64) -> HeightBounds {
    let nf = n as f64;
    let df = d as f64;
    let delta = d.max(deg_b);
    let d_f = d_f.max(d);
    let c_n = c * nf * (nf + 1.0).log2();
    let c_nd = |dd: f64| c * nf * (dd * (nf + 1.0)).log2().max(1.0);
    let c_n_d = c_nd(df);
    let dn = df.powi(n as i32);
    let dn1 = df.powi(n as i32 - 1);
    let dt = df + tau as f64;
    let mid = dn * delta as f64 + d_f as f64;
    let q = c_n_d * dn1 * mid * dt;
    let cofactor_degree = d_f.max(d + 2 * deg_b) + 1;
    let dh = cofactor_degree as f64;
    HeightBounds {
        c,
        c_n,
        c_n_d,
        delta,
        d_f,
        nu0: (c_n_d * df.powi(2 * n as i32 - 1) * mid * dt).ceil(),
        nu1: (c_n * dn1 * (delta as f64 + d_f as f64) * dt).ceil(),
        omega: (c_n * dn1 * d_f as f64 * dt).ceil(),
        q: q.ceil(),
        cofactors: (q + c_nd(dh) * dh.powi(n as i32) * tau as f64).ceil(),
        d_hat: 2 * (d + deg_b) + 1,
        cofactor_degree,
    }
}

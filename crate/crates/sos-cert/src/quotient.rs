//! Gröbner bases, normal forms and the finite-dimensional quotient ring.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::linalg::{self, QMatrix};
use crate::poly::{Monomial, Poly};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuotientError {
    #[error("the ideal is not zero-dimensional")]
    InfiniteDimension,
    #[error("no equality constraints given")]
    NoGenerators,
    #[error("the generators do not form a graded basis")]
    NotGraded,
    #[error("f is not coprime to the annihilator of f modulo the ideal")]
    ConditionFailed,
    #[error("the element is not invertible in the quotient")]
    NotInvertible,
    #[error("ideal power chain did not reach the ideal after {0} squarings")]
    ChainTooLong(usize),
}

/// Reduced Gröbner basis in grevlex order, with each element expressed in
/// terms of the input generators when tracking was requested.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    pub nvars: usize,
    pub polys: Vec<Poly>,
    pub reps: Option<Vec<Vec<Poly>>>,
}

fn monic_with_rep(p: &mut Poly, rep: Option<&mut Vec<Poly>>) {
    if let Some((_, c)) = p.leading_term() {
        let inv = Rational::one() / c;
        *p = p.scale(&inv);
        if let Some(r) = rep {
            for q in r.iter_mut() {
                *q = q.scale(&inv);
            }
        }
    }
}

/// Full reduction of `p` by `basis`; returns the quotients and the remainder.
pub fn divide(p: &Poly, basis: &[Poly]) -> (Vec<Poly>, Poly) {
    let n = p.nvars();
    let mut quots = vec![Poly::zero(n); basis.len()];
    let mut rem = Poly::zero(n);
    let mut work = p.clone();
    while let Some((m, c)) = work.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
        let hit = basis.iter().position(|g| g.leading_term().map_or(false, |(lm, _)| lm.divides(&m)));
        match hit {
            Some(i) => {
                let (lm, lc) = basis[i].leading_term().unwrap();
                let t = lm.quotient_of(&m);
                let coef = &c / lc;
                work.add_scaled(&basis[i], &t, &-coef.clone());
                quots[i].add_term(t, coef);
            }
            None => {
                work.add_term(m.clone(), -c.clone());
                rem.add_term(m, c);
            }
        }
    }
    (quots, rem)
}

fn reduce_tracked(
    p: &Poly,
    rep: &[Poly],
    basis: &[Poly],
    reps: Option<&Vec<Vec<Poly>>>,
) -> (Poly, Vec<Poly>) {
    let (quots, rem) = divide(p, basis);
    let mut rep = rep.to_vec();
    if let Some(reps) = reps {
        for (q, br) in quots.iter().zip(reps) {
            if q.is_zero() {
                continue;
            }
            for (r, b) in rep.iter_mut().zip(br) {
                *r = &*r - &(q * b);
            }
        }
    }
    (rem, rep)
}

/// Buchberger's algorithm with the sugar selection strategy and the product
/// criterion, followed by full inter-reduction.
pub fn groebner(gens: &[Poly], track: bool) -> GroebnerBasis {
    let nvars = gens.first().map(|g| g.nvars()).unwrap_or(0);
    let m = gens.len();
    let mut polys: Vec<Poly> = Vec::new();
    let mut reps: Vec<Vec<Poly>> = Vec::new();
    let mut sugar: Vec<u32> = Vec::new();
    let mut pairs: BTreeSet<(u32, Monomial, usize, usize)> = BTreeSet::new();

    let add = |p: Poly,
                   rep: Vec<Poly>,
                   s: u32,
                   polys: &mut Vec<Poly>,
                   reps: &mut Vec<Vec<Poly>>,
                   sugar: &mut Vec<u32>,
                   pairs: &mut BTreeSet<(u32, Monomial, usize, usize)>| {
        let k = polys.len();
        let lk = p.leading_term().unwrap().0.clone();
        for i in 0..k {
            let li = polys[i].leading_term().unwrap().0.clone();
            if li.is_coprime(&lk) {
                continue;
            }
            let l = li.lcm(&lk);
            let d = l.degree();
            let s_pair = (sugar[i] + d - li.degree()).max(s + d - lk.degree());
            pairs.insert((s_pair, l, i, k));
        }
        polys.push(p);
        reps.push(rep);
        sugar.push(s);
    };

    for (j, g) in gens.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let mut rep = vec![Poly::zero(nvars); m];
        if track {
            rep[j] = Poly::one(nvars);
        }
        let trk = if track { Some(&reps) } else { None };
        let (mut r, mut rr) = reduce_tracked(g, &rep, &polys, trk);
        if r.is_zero() {
            continue;
        }
        monic_with_rep(&mut r, Some(&mut rr));
        let s = g.degree();
        add(r, rr, s, &mut polys, &mut reps, &mut sugar, &mut pairs);
    }

    while let Some(first) = pairs.iter().next().cloned() {
        pairs.remove(&first);
        let (s, l, i, j) = first;
        let (li, ci) = polys[i].leading_term().map(|(a, b)| (a.clone(), b.clone())).unwrap();
        let (lj, cj) = polys[j].leading_term().map(|(a, b)| (a.clone(), b.clone())).unwrap();
        let ti = li.quotient_of(&l);
        let tj = lj.quotient_of(&l);
        let mut sp = polys[i].mul_term(&ti, &(Rational::one() / &ci));
        sp.add_scaled(&polys[j], &tj, &-(Rational::one() / &cj));
        let mut srep = vec![Poly::zero(nvars); m];
        if track {
            for k in 0..m {
                let mut v = reps[i][k].mul_term(&ti, &(Rational::one() / &ci));
                v.add_scaled(&reps[j][k], &tj, &-(Rational::one() / &cj));
                srep[k] = v;
            }
        }
        let trk = if track { Some(&reps) } else { None };
        let (mut r, mut rr) = reduce_tracked(&sp, &srep, &polys, trk);
        if r.is_zero() {
            continue;
        }
        monic_with_rep(&mut r, Some(&mut rr));
        add(r, rr, s, &mut polys, &mut reps, &mut sugar, &mut pairs);
    }

    // Minimise: drop elements whose leading monomial is divisible by another's.
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..polys.len() {
        let li = polys[i].leading_term().unwrap().0;
        let redundant = (0..polys.len()).any(|j| {
            if j == i {
                return false;
            }
            let lj = polys[j].leading_term().unwrap().0;
            lj.divides(li) && (lj != li || j < i)
        });
        if !redundant {
            keep.push(i);
        }
    }
    let mut gp: Vec<Poly> = keep.iter().map(|&i| polys[i].clone()).collect();
    let mut gr: Vec<Vec<Poly>> = keep.iter().map(|&i| reps[i].clone()).collect();

    // Inter-reduce.
    for i in 0..gp.len() {
        let others: Vec<Poly> = gp.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, p)| p.clone()).collect();
        let other_reps: Vec<Vec<Poly>> =
            gr.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, p)| p.clone()).collect();
        let trk = if track { Some(&other_reps) } else { None };
        let (mut r, mut rr) = reduce_tracked(&gp[i], &gr[i], &others, trk);
        monic_with_rep(&mut r, Some(&mut rr));
        gp[i] = r;
        gr[i] = rr;
    }
    let mut order: Vec<usize> = (0..gp.len()).collect();
    order.sort_by(|&a, &b| gp[a].leading_term().unwrap().0.cmp(gp[b].leading_term().unwrap().0));
    GroebnerBasis {
        nvars,
        polys: order.iter().map(|&i| gp[i].clone()).collect(),
        reps: if track { Some(order.iter().map(|&i| gr[i].clone()).collect()) } else { None },
    }
}

/// Homogeneous component of highest degree.
pub fn top_form(p: &Poly) -> Poly {
    let d = p.degree();
    Poly::from_terms(p.nvars(), p.terms().filter(|(m, _)| m.degree() == d).map(|(m, c)| (m.clone(), c.clone())))
}

/// Cofactors of `ν·p = Σ p_j h_j + r` with `r` the normal form of `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cofactors {
    pub cofactors: Vec<Poly>,
    pub remainder: Poly,
    pub nu: BigInt,
}

impl Cofactors {
    /// The integer-coefficient form `(ν p_j, ν r)`.
    pub fn scaled(&self) -> (Vec<Poly>, Poly) {
        let s = Rational::from_integer(self.nu.clone());
        (self.cofactors.iter().map(|p| p.scale(&s)).collect(), self.remainder.scale(&s))
    }
}

/// Zero-dimensional quotient `ℚ[x]/I` with its standard monomial basis.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub generators: Vec<Poly>,
    pub gb: GroebnerBasis,
    pub basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    pub graded: bool,
    nf_cache: RefCell<HashMap<Monomial, Vec<Rational>>>,
}

impl Quotient {
    pub fn new(generators: &[Poly]) -> Result<Quotient, QuotientError> {
        Self::build(generators, true)
    }

    /// Quotient without tracking the representation of the Gröbner basis
    /// in the generators; cofactor reduction is then unavailable.
    pub fn new_untracked(generators: &[Poly]) -> Result<Quotient, QuotientError> {
        Self::build(generators, false)
    }

    fn build(generators: &[Poly], track: bool) -> Result<Quotient, QuotientError> {
        if generators.is_empty() {
            return Err(QuotientError::NoGenerators);
        }
        let n = generators[0].nvars();
        let gb = groebner(generators, track);
        let basis = standard_monomials(n, &gb.polys)?;
        let index = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let graded = is_graded_basis(generators, &gb);
        Ok(Quotient { generators: generators.to_vec(), gb, basis, index, graded, nf_cache: RefCell::new(HashMap::new()) })
    }

    pub fn nvars(&self) -> usize {
        self.gb.nvars
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_degree(&self) -> u32 {
        self.basis.iter().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn basis_polys(&self) -> Vec<Poly> {
        self.basis.iter().map(|m| Poly::term(m.clone(), Rational::one())).collect()
    }

    pub fn normal_form(&self, p: &Poly) -> Poly {
        divide(p, &self.gb.polys).1
    }

    pub fn contains(&self, p: &Poly) -> bool {
        self.normal_form(p).is_zero()
    }

    /// Coordinates of the normal form of `p` in the basis `B`.
    pub fn coords(&self, p: &Poly) -> Vec<Rational> {
        let nf = self.normal_form(p);
        let mut v = vec![Rational::zero(); self.dim()];
        for (m, c) in nf.terms() {
            v[self.index[m]] = c.clone();
        }
        v
    }

    pub fn from_coords(&self, v: &[Rational]) -> Poly {
        Poly::from_terms(self.nvars(), self.basis.iter().cloned().zip(v.iter().cloned()))
    }

    fn monomial_coords(&self, m: &Monomial) -> Vec<Rational> {
        if let Some(v) = self.nf_cache.borrow().get(m) {
            return v.clone();
        }
        let v = self.coords(&Poly::term(m.clone(), Rational::one()));
        self.nf_cache.borrow_mut().insert(m.clone(), v.clone());
        v
    }

    /// Normal form coordinates of a polynomial with complex coefficients.
    pub fn coords_complex(&self, terms: &[(Monomial, Complex64)]) -> Vec<Complex64> {
        let mut out = vec![Complex64::zero(); self.dim()];
        for (m, c) in terms {
            for (o, v) in out.iter_mut().zip(self.monomial_coords(m)) {
                if !v.is_zero() {
                    *o += c * v.to_f64().unwrap();
                }
            }
        }
        out
    }

    /// Matrix of multiplication by `p` acting on coordinate vectors.
    pub fn mult_matrix(&self, p: &Poly) -> QMatrix {
        let d = self.dim();
        let mut m = linalg::zeros(d, d);
        for (k, b) in self.basis.iter().enumerate() {
            let col = self.coords(&p.mul_term(b, &Rational::one()));
            for (i, v) in col.into_iter().enumerate() {
                m[i][k] = v;
            }
        }
        m
    }

    pub fn var_matrices(&self) -> Vec<QMatrix> {
        (0..self.nvars()).map(|i| self.mult_matrix(&Poly::var(self.nvars(), i))).collect()
    }

    /// Express `p = Σ p_j h_j + 𝒩(p)`. For a graded basis the cofactors obey
    /// `deg(p_j h_j) ≤ deg p`.
    pub fn cofactor_reduce(&self, p: &Poly) -> Cofactors {
        let n = self.nvars();
        let reps = self.gb.reps.as_ref().expect("cofactor reduction needs a tracked basis");
        let (quots, rem) = divide(p, &self.gb.polys);
        let mut cof = vec![Poly::zero(n); self.generators.len()];
        for (q, rep) in quots.iter().zip(reps) {
            if q.is_zero() {
                continue;
            }
            for (c, r) in cof.iter_mut().zip(rep) {
                *c = &*c + &(q * r);
            }
        }
        let bound = p.degree();
        let within = cof.iter().zip(&self.generators).all(|(c, h)| c.is_zero() || c.degree() + h.degree() <= bound);
        if self.graded && !within {
            if let Some(c) = self.bounded_cofactors(&(p - &rem), bound) {
                cof = c;
            }
        }
        let mut nu = rem.denominator_lcm();
        for c in &cof {
            nu = nu.lcm(&c.denominator_lcm());
        }
        Cofactors { cofactors: cof, remainder: rem, nu }
    }

    /// Solve `r = Σ p_j h_j` with `deg(p_j h_j) ≤ e` by linear algebra.
    pub fn bounded_cofactors(&self, r: &Poly, e: u32) -> Option<Vec<Poly>> {
        let n = self.nvars();
        let rows = Monomial::up_to_degree(n, e);
        let row_of: HashMap<&Monomial, usize> = rows.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut cols: Vec<(usize, Monomial)> = Vec::new();
        for (j, h) in self.generators.iter().enumerate() {
            if h.is_zero() || h.degree() > e {
                continue;
            }
            for m in Monomial::up_to_degree(n, e - h.degree()) {
                cols.push((j, m));
            }
        }
        let mut a = linalg::zeros(rows.len(), cols.len());
        for (k, (j, m)) in cols.iter().enumerate() {
            for (t, c) in self.generators[*j].terms() {
                a[row_of[&t.mul(m)]][k] = c.clone();
            }
        }
        let mut b = vec![Rational::zero(); rows.len()];
        for (t, c) in r.terms() {
            b[*row_of.get(t)?] = c.clone();
        }
        let x = linalg::solve(&a, &b)?;
        let mut cof = vec![Poly::zero(n); self.generators.len()];
        for ((j, m), v) in cols.into_iter().zip(x) {
            cof[j].add_term(m, v);
        }
        Some(cof)
    }

    /// `(a, b, γ)` with `a f + b ≡ γ` and `b f ≡ 0` modulo the ideal, with
    /// integer coefficients and `γ` a positive integer.
    pub fn coprimality_witness(&self, f: &Poly) -> Result<(Poly, Poly, BigInt), QuotientError> {
        let n = self.nvars();
        if self.dim() == 0 {
            return Ok((Poly::zero(n), Poly::one(n), BigInt::one()));
        }
        let nf = self.normal_form(f);
        if nf.is_zero() {
            return Err(QuotientError::ConditionFailed);
        }
        let m = self.mult_matrix(&(&nf * &nf));
        let rhs = self.coords(&nf);
        let mu = linalg::solve(&m, &rhs).ok_or(QuotientError::ConditionFailed)?;
        let a = self.from_coords(&mu);
        let b = self.normal_form(&(&Poly::one(n) - &(&a * &nf)));
        let gamma = a.denominator_lcm().lcm(&b.denominator_lcm());
        let g = Rational::from_integer(gamma.clone());
        Ok((a.scale(&g), b.scale(&g), gamma))
    }

    /// Inverse of `p` in the quotient ring, in normal form.
    pub fn inverse_mod(&self, p: &Poly) -> Result<Poly, QuotientError> {
        let m = self.mult_matrix(p);
        let one = self.coords(&Poly::one(self.nvars()));
        if linalg::rank(&m) < self.dim() {
            return Err(QuotientError::NotInvertible);
        }
        let s = linalg::solve(&m, &one).ok_or(QuotientError::NotInvertible)?;
        Ok(self.from_coords(&s))
    }

    /// Generators of the radical, obtained by adjoining the square-free part
    /// of the characteristic polynomial of each coordinate multiplication.
    pub fn radical_generators(&self) -> Vec<Poly> {
        let n = self.nvars();
        let mut gens = self.gb.polys.clone();
        for i in 0..n {
            let cp = charpoly(&self.mult_matrix(&Poly::var(n, i)));
            let sf = squarefree_part(&cp);
            let p = Poly::from_terms(
                n,
                sf.iter().enumerate().map(|(k, c)| {
                    let mut e = vec![0; n];
                    e[i] = k as u32;
                    (Monomial(e), c.clone())
                }),
            );
            gens.push(p);
        }
        gens
    }

    pub fn is_radical(&self) -> Result<bool, QuotientError> {
        Ok(Quotient::new_untracked(&self.radical_generators())?.dim() == self.dim())
    }
}

/// Standard monomials of a Gröbner basis, in increasing grevlex order.
pub fn standard_monomials(nvars: usize, gb: &[Poly]) -> Result<Vec<Monomial>, QuotientError> {
    let lts: Vec<Monomial> = gb.iter().filter_map(|g| g.leading_term().map(|(m, _)| m.clone())).collect();
    if lts.iter().any(|m| m.degree() == 0) {
        return Ok(Vec::new());
    }
    for i in 0..nvars {
        let pure = lts.iter().any(|m| m.0[i] > 0 && m.0.iter().enumerate().all(|(k, &e)| k == i || e == 0));
        if !pure {
            return Err(QuotientError::InfiniteDimension);
        }
    }
    let mut seen: BTreeSet<Monomial> = BTreeSet::new();
    let mut stack = vec![Monomial::one(nvars)];
    while let Some(m) = stack.pop() {
        if seen.contains(&m) || lts.iter().any(|l| l.divides(&m)) {
            continue;
        }
        for i in 0..nvars {
            stack.push(m.mul(&Monomial::var(nvars, i)));
        }
        seen.insert(m);
    }
    Ok(seen.into_iter().collect())
}

/// Whether `I_{≤d} = Σ_j ℚ[x]_{≤ d - deg h_j} h_j` for every `d`. For a
/// degree-compatible order this holds exactly when the top-degree forms of
/// the Gröbner basis lie in the ideal of top-degree forms of the generators.
pub fn is_graded_basis(generators: &[Poly], gb: &GroebnerBasis) -> bool {
    let tops: Vec<Poly> = generators.iter().filter(|h| !h.is_zero()).map(top_form).collect();
    if tops.is_empty() {
        return gb.polys.is_empty();
    }
    let tgb = groebner(&tops, false);
    gb.polys.iter().all(|g| divide(&top_form(g), &tgb.polys).1.is_zero())
}

/// `J^{2^k}` for `k = 1, 2, …` until contained in `I`.
pub fn ideal_power_chain(i: &Quotient, j: &[Poly]) -> Result<Vec<Quotient>, QuotientError> {
    let mut cur = groebner(j, false).polys;
    let mut out = Vec::new();
    for _ in 0..12 {
        let mut prods = Vec::new();
        for a in 0..cur.len() {
            for b in a..cur.len() {
                prods.push(&cur[a] * &cur[b]);
            }
        }
        let q = Quotient::new_untracked(&prods)?;
        let contained = q.gb.polys.iter().all(|g| i.contains(g));
        cur = q.gb.polys.clone();
        out.push(q);
        if contained {
            return Ok(out);
        }
    }
    Err(QuotientError::ChainTooLong(12))
}

/// Characteristic polynomial `det(tI - M)`, coefficients in increasing degree.
pub fn charpoly(m: &QMatrix) -> Vec<Rational> {
    // Faddeev–LeVerrier.
    let n = m.len();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut mk = linalg::zeros(n, n);
    for k in 1..=n {
        // M_k = M (M_{k-1} + c_{n-k+1} I)
        let mut prev = mk.clone();
        for (i, row) in prev.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        mk = linalg::matmul(m, &prev);
        let tr: Rational = (0..n).map(|i| mk[i][i].clone()).fold(Rational::zero(), |a, b| a + b);
        coeffs[n - k] = -tr / Rational::from_integer(BigInt::from(k));
    }
    coeffs
}

fn trim(p: &mut Vec<Rational>) {
    while p.len() > 1 && p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn poly_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let c = r.last().unwrap() / b.last().unwrap();
        let shift = r.len() - 1 - db;
        for (k, bv) in b.iter().enumerate() {
            r[shift + k] -= &c * bv;
        }
        r.pop();
        if r.is_empty() {
            r.push(Rational::zero());
        }
        trim(&mut r);
        if r.len() <= db {
            break;
        }
    }
    r
}

fn poly_div(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() <= db {
        return vec![Rational::zero()];
    }
    let mut q = vec![Rational::zero(); r.len() - db];
    for s in (0..q.len()).rev() {
        let c = &r[s + db] / b.last().unwrap();
        for (k, bv) in b.iter().enumerate() {
            r[s + k] -= &c * bv;
        }
        q[s] = c;
    }
    q
}

fn poly_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !(y.len() == 1 && y[0].is_zero()) {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    let lc = x.last().unwrap().clone();
    x.iter().map(|c| c / &lc).collect()
}

/// Square-free part `p / gcd(p, p')` of a univariate polynomial.
pub fn squarefree_part(p: &[Rational]) -> Vec<Rational> {
    if p.len() <= 2 {
        return p.to_vec();
    }
    let dp: Vec<Rational> =
        p.iter().enumerate().skip(1).map(|(k, c)| c * Rational::from_integer(BigInt::from(k))).collect();
    let g = poly_gcd(p, &dp);
    poly_div(p, &g)
}

/// Yun's squarefree decomposition: pairs `(a_k, k)` with `p = c·Π a_k^k`,
/// each `a_k` monic, squarefree and pairwise coprime.
pub fn squarefree_decomposition(p: &[Rational]) -> Vec<(Vec<Rational>, usize)> {
    let deriv = |a: &[Rational]| -> Vec<Rational> {
        let mut d: Vec<Rational> =
            a.iter().enumerate().skip(1).map(|(k, c)| c * Rational::from_integer(BigInt::from(k))).collect();
        trim(&mut d);
        d
    };
    let monic = |a: Vec<Rational>| -> Vec<Rational> {
        let lc = a.last().cloned().unwrap_or_else(Rational::one);
        a.into_iter().map(|c| c / &lc).collect()
    };
    let mut out = Vec::new();
    if p.len() <= 1 {
        return out;
    }
    let dp = deriv(p);
    let a0 = poly_gcd(p, &dp);
    let mut b = poly_div(p, &a0);
    let mut c = poly_div(&dp, &a0);
    let mut k = 1;
    loop {
        let db = deriv(&b);
        let mut dd: Vec<Rational> = c.iter().cloned().chain(std::iter::repeat(Rational::zero())).take(c.len().max(db.len())).collect();
        for (i, v) in db.iter().enumerate() {
            dd[i] -= v;
        }
        trim(&mut dd);
        let a = poly_gcd(&b, &dd);
        if a.len() > 1 {
            out.push((monic(a.clone()), k));
        }
        b = poly_div(&b, &a);
        if b.len() <= 1 {
            break;
        }
        c = poly_div(&dd, &a);
        k += 1;
    }
    out
}

/// `Σ_i p_i t^i` at a complex point.
pub fn eval_univariate(p: &[Rational], t: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c.to_f64().unwrap())
}

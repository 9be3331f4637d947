//! End-to-end acceptance checks. Each test prints one `criterion N: PASS|FAIL`
//! line straight to stdout so that the lines show up even when the harness
//! captures output.

use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sos_cert::certifier::{certify_nonneg, certify_strict, CertifyOptions, Engine, ProblemInstance};
use sos_cert::cli;
use sos_cert::gram::{self, GramVariety};
use sos_cert::io::{parse_certificate, parse_problem};
use sos_cert::linalg::{self, QMatrix};
use sos_cert::parse::parse_poly;
use sos_cert::poly::{Monomial, Poly};
use sos_cert::quotient::{ideal_power_chain, Quotient};
use sos_cert::sdp::{self, SdpError, SolverOptions};
use sos_cert::variety::{self, solve_variety, SolveOptions};
use sos_cert::verify::{degree_bounds, degree_bounds_from, height_bound_formula, verify_certificate};
use sos_cert::Rational;

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn problem(name: &str) -> ProblemInstance {
    parse_problem(&std::fs::read_to_string(data(name)).unwrap()).unwrap().instance
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["sos-cert"];
    full.extend_from_slice(args);
    let code = cli::run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn r(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

/// Run a criterion, print its line and fail the test if it failed.
fn criterion(n: u32, title: &str, body: impl FnOnce() -> Result<String, String> + std::panic::UnwindSafe) {
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(body).unwrap_or_else(|e| {
        Err(e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    });
    let secs = start.elapsed().as_secs_f64();
    let line = match &outcome {
        Ok(note) => format!("criterion {}: PASS  {} ({:.2}s) {}\n", n, title, secs, note),
        Err(why) => format!("criterion {}: FAIL  {} ({:.2}s) {}\n", n, title, secs, why),
    };
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    if let Err(why) = outcome {
        panic!("criterion {} failed: {}", n, why);
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("{} took {:.2}s, limit {:?}", what, t.as_secs_f64(), limit))
}

#[test]
fn criterion_1_printed_certificates_verify() {
    criterion(1, "printed certificates verify exactly", || {
        for (prob, cert) in [("two_points.txt", "two_points.cert"), ("cusp_a.txt", "cusp_a.cert"), ("cusp.txt", "cusp.cert")] {
            let start = Instant::now();
            let (code, out, _) = run_cli(&["verify", "--input", &data(prob), "--certificate", &data(cert)]);
            ensure(code == 0, format!("{}: exit {}\n{}", cert, code, out))?;
            ensure(out.contains("identity_ok=true"), format!("{}: identity", cert))?;
            within(start, Duration::from_secs(1), cert)?;
        }
        // The expanded q0 and q1 of the two-point certificate match the printed sums.
        let inst = problem("two_points.txt");
        let c = parse_certificate(&std::fs::read_to_string(data("two_points.cert")).unwrap()).unwrap();
        let p = |s: &str| parse_poly(s, &inst.names).unwrap();
        let sum = |b: usize| c.blocks[b].iter().fold(Poly::zero(2), |acc, ws| &acc + &ws.value());
        ensure(
            sum(0)
                == p("1/2*x^4 + 3/10*x^2*y^2 - 1/10*x*y^3 + 2/5*y^4 + 1/10*x^3 - 3/50*x*y^2 - 9/125*y^3 + 3/10*x^2 + 7/25*y^2 - 39/500*y + 7/10"),
            "q0 expansion",
        )?;
        ensure(sum(1) == p("1/5*x^2 - 6/25*x*y + 34/125*y^2 - 17/25*y + 289/500"), "q1 expansion")?;
        // The nonnegative identity follows from 2x = a x^2 + b x with b x = -h1 - h2.
        let cusp = problem("cusp.txt");
        let b = p("2 - x - x^2");
        ensure(&(&(&b * &p("x")) + &cusp.h[0]) + &cusp.h[1] == Poly::zero(2), "b x = -h1 - h2")?;
        Ok("3 certificates, zero tolerance".into())
    });
}

#[test]
fn criterion_2_strict_certification() {
    criterion(2, "strict certification, both engines", || {
        let mut notes = Vec::new();
        for (engine, limit) in [("constructive", 5u64), ("sdp", 30)] {
            let start = Instant::now();
            let dir = std::env::temp_dir().join(format!("sos-cert-acc-{}-{}", engine, std::process::id()));
            let out_path = dir.to_string_lossy().into_owned();
            let (code, _, err) = run_cli(&[
                "certify", "--input", &data("two_points.txt"), "--mode", "strict", "--engine", engine, "--order", "2",
                "--out", &out_path,
            ]);
            ensure(code == 0, format!("{}: exit {} {}", engine, code, err))?;
            within(start, Duration::from_secs(limit), engine)?;
            let inst = problem("two_points.txt");
            let cert = parse_certificate(&std::fs::read_to_string(&dir).unwrap()).unwrap();
            let _ = std::fs::remove_file(&dir);
            let rep = verify_certificate(&inst, &cert);
            ensure(rep.identity_ok && rep.weights_ok, format!("{}: {}", engine, rep))?;
            for (pj, hj) in cert.cofactors.iter().zip(&inst.h) {
                ensure(pj.is_zero() || pj.degree() + hj.degree() <= 5, format!("{}: deg(p_j h_j) > 5", engine))?;
            }
            let (vcode, _, _) = run_cli(&["verify", "--input", &data("two_points.txt"), "--certificate", &out_path]);
            let _ = vcode;
            notes.push(format!("{} {:.2}s", engine, start.elapsed().as_secs_f64()));
        }
        Ok(notes.join(", "))
    });
}

#[test]
fn criterion_3_nonnegative_pipeline() {
    criterion(3, "nonnegative pipeline on the cusp", || {
        let start = Instant::now();
        let inst = problem("cusp.txt");
        let q = Quotient::new(&inst.h).unwrap();
        let p = |s: &str| parse_poly(s, &inst.names).unwrap();
        let (a, b, gamma) = q.coprimality_witness(&inst.f).unwrap();
        let g = Rational::from_integer(gamma.clone());
        ensure(q.contains(&(&(&(&a * &inst.f) + &b) - &Poly::constant(2, g.clone()))), "a f + b ≢ γ")?;
        let c = &g / r(2, 1);
        ensure(q.contains(&(&a - &p("1 + x").scale(&c))), "a is not a multiple of 1 + x")?;
        ensure(q.contains(&(&b - &p("2 - x - x^2").scale(&c))), "b is not a multiple of 2 - x - x^2")?;
        let mut notes = vec![format!("gamma = {}", gamma)];
        for engine in [Engine::Constructive, Engine::Sdp] {
            let opts = CertifyOptions { engine, ..CertifyOptions::default() };
            let cert = certify_nonneg(&inst, &opts).map_err(|e| format!("{:?}: {}", engine, e))?;
            let rep = verify_certificate(&inst, &cert);
            ensure(rep.ok(), format!("{:?}: {}", engine, rep))?;
            for ws in &cert.blocks[0] {
                let rk = ws.witness.as_ref().ok_or("missing witness")?;
                ensure(q.normal_form(&(&ws.square - &(&inst.f * rk))).is_zero(), "N(q - f r) != 0")?;
            }
            notes.push(format!("{:?} {} squares", engine, cert.blocks[0].len()));
        }
        within(start, Duration::from_secs(30), "nonnegative pipeline")?;
        Ok(notes.join(", "))
    });
}

#[test]
fn criterion_4_negative_control() {
    criterion(4, "x on V(x^2) has no certificate", || {
        let (code, _, err) = run_cli(&["certify", "--input", &data("double_root.txt"), "--mode", "nonneg"]);
        ensure(code == 2, format!("exit {} ({})", code, err.trim()))?;
        let inst = problem("double_root.txt");
        let q = Quotient::new(&inst.h).unwrap();
        let prob = sdp::formulate(&inst, &q, &[2]).map_err(|e| e.to_string())?;
        ensure(prob.degree_cap == 4, format!("degree cap {}", prob.degree_cap))?;
        // Positive control: 1 + x on the same ideal is feasible at every margin tested.
        let control = ProblemInstance::new(inst.names.clone(), parse_poly("1 + x", &inst.names).unwrap(), vec![], inst.h.clone());
        let control = sdp::formulate(&control, &q, &[2]).map_err(|e| e.to_string())?;
        let mut notes = vec!["exit 2".to_string()];
        for lambda in [1e-2, 5e-2, 1e-1] {
            match sdp::solve_feasibility(&prob, lambda, &SolverOptions::default()) {
                Err(SdpError::Infeasible { residual }) => notes.push(format!("λ={} stalls at {:.2e}", lambda, residual)),
                other => return Err(format!("λ = {}: expected Infeasible, got {:?}", lambda, other.map(|s| s.residual))),
            }
            let ok = sdp::solve_feasibility(&control, lambda, &SolverOptions::default());
            ensure(ok.is_ok(), format!("control 1 + x infeasible at λ = {}: {:?}", lambda, ok.err()))?;
        }
        Ok(notes.join(", "))
    });
}

#[test]
fn criterion_5_hensel_path() {
    criterion(5, "Hensel lifting on nilpotent ideals", || {
        let names = vec!["x".to_string()];
        let p = |s: &str| parse_poly(s, &names).unwrap();
        let inst = problem("nilpotent.txt");
        let cert = certify_strict(&inst, &CertifyOptions::default()).map_err(|e| e.to_string())?;
        let rep = verify_certificate(&inst, &cert);
        ensure(rep.ok(), rep.to_string())?;
        let i2 = Quotient::new(&[p("x^2")]).unwrap();
        let (theta1, _) = sos_cert::certifier::hensel_sqrt(&i2, &[p("x")], &p("1"), &p("1 + x")).map_err(|e| e.to_string())?;
        ensure(i2.contains(&(&theta1.square() - &p("1 + x"))), "θ₁² ≢ 1 + x mod x²")?;
        // On (x^3) the chain is (x^2), (x^4); check every level.
        let i3 = Quotient::new(&[p("x^3")]).unwrap();
        let chain = ideal_power_chain(&i3, &[p("x")]).map_err(|e| e.to_string())?;
        let theta = p("2 + x");
        let (_, iterates) =
            sos_cert::certifier::hensel_sqrt(&i3, &[p("x")], &p("1"), &theta.scale(&r(1, 2))).map_err(|e| e.to_string())?;
        ensure(chain.len() == iterates.len() && chain.len() == 2, format!("chain length {}", chain.len()))?;
        for (k, (jk, tk)) in chain.iter().zip(&iterates).enumerate() {
            ensure(jk.contains(&(&tk.square() - &theta.scale(&r(1, 2)))), format!("level {}", k + 1))?;
            let power = 1u32 << (k + 1);
            ensure(jk.contains(&p(&format!("x^{}", power))) && !jk.contains(&p(&format!("x^{}", power - 1))), "J^(2^k)")?;
        }
        let inst3 = ProblemInstance::new(names.clone(), theta.clone(), vec![], vec![p("x^3")]);
        let c3 = certify_strict(&inst3, &CertifyOptions::default()).map_err(|e| e.to_string())?;
        ensure(verify_certificate(&inst3, &c3).ok(), "x^3 certificate")?;
        Ok(format!("θ₁ = {}", theta1.fmt_with(&names)))
    });
}

fn random_pd(rng: &mut ChaCha8Rng, d: usize) -> QMatrix {
    let mut q = linalg::zeros(d, d);
    for i in 0..d {
        for j in i + 1..d {
            let v = r(rng.gen_range(-2048..=2048), rng.gen_range(1..=8));
            q[i][j] = v.clone();
            q[j][i] = v;
        }
    }
    for i in 0..d {
        let off: Rational = (0..d).filter(|&j| j != i).map(|j| q[i][j].abs()).sum();
        q[i][i] = Rational::from_integer(off.ceil().to_integer()) + r(rng.gen_range(1..=2048), 1);
    }
    q
}

fn minor(q: &QMatrix, k: usize) -> Rational {
    let sub: QMatrix = q[..k].iter().map(|row| row[..k].to_vec()).collect();
    linalg::determinant(&sub)
}

fn frobenius(a: &QMatrix, b: &QMatrix) -> Rational {
    let mut s = Rational::zero();
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            s += x * y;
        }
    }
    s
}

fn sub(a: &QMatrix, b: &QMatrix) -> QMatrix {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect()).collect()
}

fn ldlt_suite() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..200 {
        let d = rng.gen_range(1..=10);
        let q = random_pd(&mut rng, d);
        let f = gram::ldlt(&q).map_err(|e| format!("case {}: {}", case, e))?;
        ensure(f.reconstruct() == q, format!("case {}: L D Lᵀ ≠ Q", case))?;
        if f.perm.iter().enumerate().any(|(a, b)| a != *b) {
            return Err(format!("case {}: unexpected pivoting on a PD matrix", case));
        }
        let scale = Rational::from_integer(f.scale.clone());
        let mut prev = Rational::one();
        for (k, nu) in f.pivots().iter().enumerate() {
            // Δ_k of scale·Q from an independent rational determinant.
            let delta = minor(&q, k + 1) * num_traits::pow(scale.clone(), k + 1);
            let expect = &scale * &delta * &prev;
            ensure(Rational::from_integer(nu.clone()) == expect, format!("case {}: ν_{} mismatch", case, k + 1))?;
            prev = delta;
        }
    }
    Ok("200 ldlt".into())
}

fn projection_suite() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut done = 0;
    while done < 100 {
        let d = rng.gen_range(2..=4);
        let n = gram::tri_len(d);
        let m = rng.gen_range(1..n);
        let a: QMatrix = (0..m).map(|_| (0..n).map(|_| r(rng.gen_range(-5..=5), 1)).collect()).collect();
        let y0: Vec<Rational> = (0..n).map(|_| r(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect();
        let b = linalg::matvec(&a, &y0);
        let Ok(gv) = GramVariety::new(d, a.clone(), b.clone()) else { continue };
        let q: QMatrix = {
            let v: Vec<Rational> = (0..n).map(|_| r(rng.gen_range(-50..=50), rng.gen_range(1..=7))).collect();
            gram::unvectorize(d, &v)
        };
        let proj = gram::project_to_gram(&gv, &q);
        ensure(linalg::matvec(&a, &gram::vectorize(&proj)) == b, "projection leaves the affine set")?;
        let null = linalg::nullspace(&a, n);
        let resid = sub(&q, &proj);
        for _ in 0..20 {
            let mut dir = vec![Rational::zero(); n];
            for v in &null {
                let c = r(rng.gen_range(-6..=6), rng.gen_range(1..=3));
                for (x, y) in dir.iter_mut().zip(v) {
                    *x += &c * y;
                }
            }
            let yv: Vec<Rational> = gram::vectorize(&proj).iter().zip(&dir).map(|(p, t)| p + t).collect();
            let y = gram::unvectorize(d, &yv);
            ensure(linalg::matvec(&a, &yv) == b, "direction not feasible")?;
            ensure(frobenius(&resid, &sub(&y, &proj)).is_zero(), "residual not orthogonal")?;
        }
        done += 1;
    }
    Ok("100 projections × 20 directions".into())
}

fn idempotent_suite() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let names = vec!["x".to_string(), "y".to_string()];
    let p = |s: &str| parse_poly(s, &names).unwrap();
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        // V = roots of h1(x), lifted to y = l(x); h1 of degree ≤ 3, possibly with a complex pair.
        let mut xs: Vec<i64> = Vec::new();
        let nreal = rng.gen_range(1..=3);
        while xs.len() < nreal {
            let v = rng.gen_range(-6..=6);
            if !xs.contains(&v) {
                xs.push(v);
            }
        }
        let mut h1 = Poly::one(2);
        for &v in &xs {
            h1 = &h1 * &p(&format!("x - ({})", v));
        }
        if nreal == 1 && rng.gen_bool(0.5) {
            let c = rng.gen_range(1..=5);
            h1 = &h1 * &p(&format!("x^2 + {}", c));
        }
        let h2 = p(&format!("y - ({})*x - ({})", rng.gen_range(-3..=3), rng.gen_range(-3..=3)));
        let q = Quotient::new(&[h1, h2]).unwrap();
        let var = solve_variety(&q, SolveOptions { tol: None, seed: case }).map_err(|e| format!("case {}: {}", case, e))?;
        let u = variety::idempotents(&q, &var).map_err(|e| format!("case {}: {}", case, e))?;
        let dim = q.dim();
        let v = DMatrix::from_fn(dim, dim, |i, k| variety::basis_values(&q.basis, &var.points[k].coords)[i]);
        let vtu = v.transpose() * &u;
        let err = (vtu - DMatrix::<Complex64>::identity(dim, dim)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let one = q.coords(&Poly::one(2));
        let mut sum_err: f64 = 0.0;
        for i in 0..dim {
            let s: Complex64 = (0..dim).map(|k| u[(i, k)]).sum();
            sum_err = sum_err.max((s - Complex64::new(num_traits::ToPrimitive::to_f64(&one[i]).unwrap(), 0.0)).norm());
        }
        ensure(err < 1e-8 && sum_err < 1e-8, format!("case {}: VᵀU err {:.2e}, Σu err {:.2e}", case, err, sum_err))?;
        worst = worst.max(err).max(sum_err);
    }
    Ok(format!("50 idempotent systems (max err {:.1e})", worst))
}

fn cube_suite() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let names: Vec<String> = (1..=3).map(|i| format!("x{}", i)).collect();
    let h: Vec<Poly> = (0..3).map(|i| parse_poly(&format!("x{0}^2 - x{0}", i + 1), &names).unwrap()).collect();
    let mons: Vec<Monomial> = Monomial::up_to_degree(3, 3).into_iter().filter(|m| m.0.iter().all(|&e| e <= 1)).collect();
    let mut sdp_time = 0.0;
    for case in 0..20 {
        let mut f = Poly::zero(3);
        for m in mons.iter().filter(|m| m.degree() > 0) {
            f.add_term(m.clone(), r(rng.gen_range(-16..=16), 1));
        }
        let min = (0..8)
            .map(|b: u32| f.eval_rational(&(0..3).map(|i| r(((b >> i) & 1) as i64, 1)).collect::<Vec<_>>()))
            .min()
            .unwrap();
        let shift = r(1, 1) - min.min(Rational::zero()) + r(rng.gen_range(0..=8), 1);
        f.add_term(Monomial::one(3), shift);
        let inst = ProblemInstance::new(names.clone(), f, vec![], h.clone());
        let q = Quotient::new(&inst.h).unwrap();
        ensure(degree_bounds(&inst, &q).hierarchy_order == 3, "hierarchy order on the cube")?;
        for engine in [Engine::Constructive, Engine::Sdp] {
            let start = Instant::now();
            let opts = CertifyOptions { engine, order: Some(3), ..CertifyOptions::default() };
            let cert = certify_strict(&inst, &opts).map_err(|e| format!("case {} {:?}: {}", case, engine, e))?;
            if engine == Engine::Sdp {
                sdp_time += start.elapsed().as_secs_f64();
            }
            let rep = verify_certificate(&inst, &cert);
            ensure(rep.ok(), format!("case {} {:?}: {}", case, engine, rep))?;
        }
    }
    Ok(format!("20 cube instances, sdp total {:.1}s", sdp_time))
}

#[test]
fn criterion_6_property_suites() {
    criterion(6, "property suites", || {
        let start = Instant::now();
        let mut notes = Vec::new();
        for suite in [ldlt_suite as fn() -> Result<String, String>, projection_suite, idempotent_suite, cube_suite] {
            notes.push(suite()?);
        }
        within(start, Duration::from_secs(300), "property suites")?;
        Ok(notes.join("; "))
    });
}

#[test]
fn criterion_7_bound_calculators() {
    criterion(7, "bound calculators", || {
        let inst = problem("two_points.txt");
        let q = Quotient::new(&inst.h).unwrap();
        let b = degree_bounds(&inst, &q);
        ensure(b.degree_bound == 5, format!("degree bound {}", b.degree_bound))?;
        let (code, out, _) = run_cli(&["bounds", "--input", &data("two_points.txt")]);
        ensure(code == 0 && out.contains("deg(p_j h_j) <= 5; hierarchy order r = 3"), out)?;
        for n in 1..=6u32 {
            let cube = degree_bounds_from(1, &vec![1; n as usize], &vec![2; n as usize], n);
            ensure(cube.hierarchy_order == n + 1, format!("cube n = {}: r = {}", n, cube.hierarchy_order))?;
        }
        let grid = [1.0, 2.0, 4.0];
        let degs = [1u32, 2, 3];
        let taus = [1u32, 4, 16];
        let key = |h: &sos_cert::verify::HeightBounds| [h.nu0, h.nu1, h.omega, h.q, h.cofactors];
        for (ci, &c) in grid.iter().enumerate() {
            for (di, &d) in degs.iter().enumerate() {
                for (ti, &t) in taus.iter().enumerate() {
                    let here = key(&height_bound_formula(2, d, 2, t, d, c));
                    let mut next = Vec::new();
                    if ci + 1 < 3 {
                        next.push(key(&height_bound_formula(2, d, 2, t, d, grid[ci + 1])));
                    }
                    if di + 1 < 3 {
                        next.push(key(&height_bound_formula(2, degs[di + 1], 2, t, degs[di + 1], c)));
                    }
                    if ti + 1 < 3 {
                        next.push(key(&height_bound_formula(2, d, 2, taus[ti + 1], d, c)));
                    }
                    for nx in next {
                        ensure(here.iter().zip(&nx).all(|(a, b)| a <= b), format!("not monotone at c={} d={} τ={}", c, d, t))?;
                    }
                }
            }
        }
        let _ = BigInt::one();
        Ok("bound 5, r = n + 1, 27-point grid".into())
    });
}

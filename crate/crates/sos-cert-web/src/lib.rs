//! Browser bindings. Every entry point takes problem text in the same format
//! as the command line and returns a JSON string; errors are reported inside
//! the JSON rather than thrown.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use sos_cert::certifier::{self, CertifyOptions, Engine, Mode};
use sos_cert::io::{parse_problem, write_certificate, ProblemFile};
use sos_cert::quotient::Quotient;
use sos_cert::variety::{membership, solve_variety, SolveOptions};
use sos_cert::verify::{degree_bounds, height_bound_formula, input_height, verify_certificate};

#[derive(Serialize)]
struct Failure {
    ok: bool,
    error: String,
}

#[derive(Serialize)]
struct PointOut {
    re: Vec<f64>,
    im: Vec<f64>,
    real: bool,
    multiplicity: usize,
    in_s: bool,
}

#[derive(Serialize)]
struct VarietyOut {
    ok: bool,
    dim: usize,
    graded: bool,
    radical: bool,
    basis: Vec<String>,
    points: Vec<PointOut>,
}

#[derive(Serialize)]
struct CertifyOut {
    ok: bool,
    verified: bool,
    certificate: String,
    report: String,
    squares: usize,
}

#[derive(Serialize)]
struct BoundsOut {
    ok: bool,
    deg_b: u32,
    degree_bound: u32,
    hierarchy_order: u32,
    tau: u32,
    heights: String,
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).unwrap_or_else(|e| format!("{{\"ok\":false,\"error\":\"{}\"}}", e))
}

fn fail(e: impl ToString) -> String {
    json(&Failure { ok: false, error: e.to_string() })
}

fn load(text: &str) -> Result<ProblemFile, String> {
    parse_problem(text).map_err(|e| e.to_string())
}

/// Complex points of the variety with multiplicities and membership in `S`.
pub fn variety_json(problem: &str) -> String {
    let run = || -> Result<String, String> {
        let p = load(problem)?;
        let q = Quotient::new_untracked(&p.instance.h).map_err(|e| e.to_string())?;
        let v = solve_variety(&q, SolveOptions { tol: None, seed: 0 }).map_err(|e| e.to_string())?;
        let m = membership(&q, &v, &p.instance.g).map_err(|e| e.to_string())?;
        let points = v
            .points
            .iter()
            .enumerate()
            .map(|(i, pt)| PointOut {
                re: pt.coords.iter().map(|z| z.re).collect(),
                im: pt.coords.iter().map(|z| z.im).collect(),
                real: pt.real,
                multiplicity: pt.multiplicity,
                in_s: m.in_s[i],
            })
            .collect();
        Ok(json(&VarietyOut {
            ok: true,
            dim: q.dim(),
            graded: q.graded,
            radical: v.is_reduced(),
            basis: q.basis.iter().map(|b| b.fmt_with(&p.instance.names)).collect(),
            points,
        }))
    };
    run().unwrap_or_else(fail)
}

/// Certificate for `f` in the given mode (`strict` or `nonneg`) and engine
/// (`constructive` or `sdp`), checked exactly before it is returned.
pub fn certify_json(problem: &str, mode: &str, engine: &str) -> String {
    let run = || -> Result<String, String> {
        let p = load(problem)?;
        let mode = match mode {
            "strict" => Mode::Strict,
            "nonneg" => Mode::Nonnegative,
            m => return Err(format!("unknown mode `{}`", m)),
        };
        let engine = match engine {
            "constructive" => Engine::Constructive,
            "sdp" => Engine::Sdp,
            e => return Err(format!("unknown engine `{}`", e)),
        };
        let opts = CertifyOptions { engine, ..CertifyOptions::default() };
        let cert = certifier::certify(&p.instance, mode, &opts).map_err(|e| e.to_string())?;
        let report = verify_certificate(&p.instance, &cert);
        Ok(json(&CertifyOut {
            ok: true,
            verified: report.ok(),
            certificate: write_certificate(&cert),
            report: report.to_string(),
            squares: cert.blocks.iter().map(|b| b.len()).sum(),
        }))
    };
    run().unwrap_or_else(fail)
}

/// Degree bound, hierarchy order and the height formulas for constant `c`.
pub fn bounds_json(problem: &str, c: f64) -> String {
    let run = || -> Result<String, String> {
        let p = load(problem)?;
        let inst = &p.instance;
        let q = Quotient::new_untracked(&inst.h).map_err(|e| e.to_string())?;
        let b = degree_bounds(inst, &q);
        let tau = input_height(inst);
        let h = height_bound_formula(inst.nvars() as u32, b.d, b.deg_b, tau, inst.f.degree(), c);
        Ok(json(&BoundsOut {
            ok: true,
            deg_b: b.deg_b,
            degree_bound: b.degree_bound,
            hierarchy_order: b.hierarchy_order,
            tau,
            heights: h.to_string(),
        }))
    };
    run().unwrap_or_else(fail)
}

#[wasm_bindgen]
pub fn variety(problem: &str) -> String {
    variety_json(problem)
}

#[wasm_bindgen]
pub fn certify(problem: &str, mode: &str, engine: &str) -> String {
    certify_json(problem, mode, engine)
}

#[wasm_bindgen]
pub fn bounds(problem: &str, c: f64) -> String {
    bounds_json(problem, c)
}

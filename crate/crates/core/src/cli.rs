//! Command-line front end: argument parsing and the subcommands.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::algebra::{fmt_complex, parse_complex, Exponent, Laurent, NumOp};
use crate::asymptotics::{
    classify_regime, coefficient_gevrey_order, crest, depth_codepth, divergent_estimate, edge_elevation, height_coheight,
    linearize_crest, Regime,
};
use crate::error::{QError, Result};
use crate::parse::{parse_equation, print_equation, EquationSource};
use crate::polygon::{exponent_json, polygon_of};
use crate::series::{generic_degree, generic_order, solve_coefficients, solve_numeric};
use crate::solver::{initial_expansions, recursive_solve, to_solved_form, SolveOptions, Step};
use crate::transforms::{reflect, sigma_conjugate, Side};

#[derive(Parser, Debug)]
#[command(name = "qalg", version, about = "Analysis of polynomial q-algebraic equations")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Numeric tolerance.
    #[arg(long, global = true, default_value_t = crate::roots::DEFAULT_TOL)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct QArg {
    /// Value of q, such as `2`, `0.5` or `-0.3+0.4i`.
    #[arg(long, allow_hyphen_values = true, value_parser = complex_arg)]
    pub q: Complex64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Newton-Puiseux polygon of the operator.
    Polygon { file: PathBuf },
    /// Tree of initial terms of Hahn series solutions.
    Expansions {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        terms: usize,
        /// Only co-slopes above this value, such as `1/2`.
        #[arg(long, allow_hyphen_values = true, value_parser = exponent_arg)]
        min_coslope: Option<Exponent>,
        /// Keep only nonnegative integer exponents.
        #[arg(long)]
        power_series: bool,
        /// Drop factors beyond this order after each translation.
        #[arg(long, allow_hyphen_values = true, value_parser = exponent_arg)]
        prune: Option<Exponent>,
        #[command(flatten)]
        q: QArg,
    },
    /// Reduce to solved form by translations and simplifications.
    SolvedForm {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_steps: usize,
        #[command(flatten)]
        q: QArg,
    },
    /// Power-series coefficients `f_0, …, f_N`.
    Coeffs {
        file: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true, value_parser = complex_arg, conflicts_with = "exact", required_unless_present = "exact")]
        q: Option<Complex64>,
        /// Exact coefficients as Laurent polynomials in q.
        #[arg(long)]
        exact: bool,
        /// Initial coefficient, required for homogeneous linear equations.
        #[arg(long, allow_hyphen_values = true)]
        f0: Option<String>,
    },
    /// Generic order and degree, height, depth, elevation.
    Invariants {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true, value_parser = complex_arg)]
        q: Option<Complex64>,
        /// Length of the generic order and degree tables.
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Crest, crest polynomial and its roots.
    Crest {
        file: PathBuf,
        #[command(flatten)]
        q: QArg,
        #[arg(long, allow_hyphen_values = true, value_parser = complex_arg)]
        f0: Option<Complex64>,
    },
    /// Regime and, for divergent series, empirical growth constants.
    Asymptotics {
        file: PathBuf,
        #[command(flatten)]
        q: QArg,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true, value_parser = complex_arg)]
        f0: Option<Complex64>,
        /// Also linearize the crest.
        #[arg(long)]
        linearize: bool,
        /// Write the normalized sequence as CSV to this file.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
}

fn complex_arg(s: &str) -> std::result::Result<Complex64, String> {
    parse_complex(s).ok_or_else(|| format!("not a complex number: {s}"))
}

fn exponent_arg(s: &str) -> std::result::Result<Exponent, String> {
    s.trim().parse::<Exponent>().map_err(|e| format!("not a rational: {s} ({e})"))
}

/// Text or JSON payload of a subcommand.
pub enum Output {
    Text(String),
    Json(Value),
}

impl Output {
    pub fn render(&self) -> String {
        match self {
            Output::Text(s) => s.clone(),
            Output::Json(v) => format!("{}\n", serde_json::to_string_pretty(v).unwrap_or_default()),
        }
    }
}

fn load(path: &PathBuf) -> Result<EquationSource> {
    let text = std::fs::read_to_string(path).map_err(|e| QError::Io(format!("{}: {e}", path.display())))?;
    parse_equation(&text)
}

/// Constant `f₀` given as an expression in `q`, such as `1` or `1+q`.
fn exact_constant(s: &str) -> Result<Laurent> {
    let op = parse_equation(s)?.to_exact()?;
    match op.iter().collect::<Vec<_>>().as_slice() {
        [] => Ok(Laurent::zero()),
        [(f, c)] if f.is_empty() && f.a().is_zero() => Ok((*c).clone()),
        _ => Err(QError::NotApplicable(format!("f0 must be a constant: {s}"))),
    }
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn unavailable(e: &QError) -> Value {
    json!({ "unavailable": e.name(), "reason": e.to_string() })
}

pub fn run(cli: &Cli) -> Result<Output> {
    let tol = cli.tol;
    let out = match &cli.command {
        Command::Polygon { file } => {
            let src = load(file)?;
            let poly = polygon_of(&src.parsed)?;
            if cli.json {
                Output::Json(poly.to_json())
            } else {
                let mut s = String::from("vertices (a, l):\n");
                for v in &poly.vertices {
                    s.push_str(&format!("  ({}, {})\n", v.a, v.ell));
                }
                let cs: Vec<String> = poly.coslopes.iter().map(|c| c.to_string()).collect();
                s.push_str(&format!("co-slopes: {}\n", cs.join(", ")));
                Output::Text(s)
            }
        }
        Command::Expansions { file, terms, min_coslope, power_series, prune, q } => {
            let p = load(file)?.to_numeric(q.q);
            let mut opts = SolveOptions::new(*terms, q.q);
            opts.mu_min = min_coslope.clone();
            opts.power_series_only = *power_series;
            opts.prune_order = prune.clone();
            opts.tol = tol;
            let tree = recursive_solve(&p, &opts)?;
            let paths = initial_expansions(&tree);
            if cli.json {
                let ex: Vec<Value> = paths.iter().map(|e| json!({ "expansion": e.render(), "complete": e.complete })).collect();
                Output::Json(json!({ "tree": tree.to_json(), "expansions": ex }))
            } else {
                let mut s = String::new();
                for e in &paths {
                    let mark = if e.complete { "" } else { "  [incomplete]" };
                    s.push_str(&format!("{}{mark}\n", e.render()));
                }
                Output::Text(s)
            }
        }
        Command::SolvedForm { file, max_steps, q } => {
            let src = load(file)?;
            let forms = to_solved_form(&src.to_numeric(q.q), *max_steps, q.q, tol)?;
            let exact = src.to_exact().ok();
            let items: Vec<Value> = forms
                .iter()
                .map(|sf| {
                    let steps: Vec<String> = sf
                        .steps
                        .iter()
                        .map(|st| match st {
                            Step::Translate(c) => format!("translate {}", fmt_complex(*c)),
                            Step::Derivative(g) => format!("derivative {g}"),
                        })
                        .collect();
                    let replayed = exact.as_ref().and_then(|p| sf.replay_exact(p));
                    json!({
                        "prefix": sf.prefix.iter().map(|c| complex_json(*c)).collect::<Vec<_>>(),
                        "steps": steps,
                        "operator": print_equation(&sf.op),
                        "exact_operator": replayed.map(|p| print_equation(&p)),
                    })
                })
                .collect();
            if cli.json {
                Output::Json(json!({ "solved_forms": items }))
            } else {
                let mut s = String::new();
                for (k, (sf, v)) in forms.iter().zip(&items).enumerate() {
                    let prefix: Vec<String> = sf.prefix.iter().map(|c| fmt_complex(*c)).collect();
                    s.push_str(&format!("[{k}] prefix: {}\n", prefix.join(", ")));
                    match v["exact_operator"].as_str() {
                        Some(e) => s.push_str(&format!("    {e}\n")),
                        None => s.push_str(&format!("    {}\n", print_equation(&sf.op))),
                    }
                }
                Output::Text(s)
            }
        }
        Command::Coeffs { file, n, q, exact, f0 } => {
            let src = load(file)?;
            if *exact {
                let p = src.to_exact()?;
                let f0 = f0.as_deref().map(exact_constant).transpose()?;
                let f = solve_coefficients(&p, &(), *n, f0)?;
                if cli.json {
                    let rows: Vec<Value> = f
                        .coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, c)| json!({ "n": k, "polynomial": c.to_string(), "degree": c.degree().map(|d| exponent_json(&d)) }))
                        .collect();
                    Output::Json(json!({ "coefficients": rows }))
                } else {
                    Output::Text(f.to_csv())
                }
            } else {
                let q = q.ok_or_else(|| QError::ModeError("numeric coefficients need --q".into()))?;
                let f0 = f0
                    .as_deref()
                    .map(|s| parse_complex(s).ok_or_else(|| QError::NotApplicable(format!("f0 is not a complex number: {s}"))))
                    .transpose()?;
                let f = solve_numeric(&src.to_numeric(q), q, *n, f0)?;
                if cli.json {
                    let rows: Vec<Value> = f
                        .coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, c)| {
                            let (re, im) = c.to_sci();
                            json!({ "n": k, "re": re, "im": im })
                        })
                        .collect();
                    Output::Json(json!({ "coefficients": rows }))
                } else {
                    Output::Text(f.to_csv())
                }
            }
        }
        Command::Invariants { file, q, n } => {
            let src = load(file)?;
            let v = invariants(&src, *q, *n);
            if cli.json {
                Output::Json(v)
            } else {
                Output::Text(render_invariants(&v))
            }
        }
        Command::Crest { file, q, f0 } => {
            let p = load(file)?.to_numeric(q.q);
            let f0 = match f0 {
                Some(c) => *c,
                None => solve_numeric(&p, q.q, 0, None)?.coeffs[0].to_complex(),
            };
            let r = crest(&p, &f0, &q.q)?;
            let v = r.to_json(q.q);
            if cli.json {
                Output::Json(v)
            } else {
                let mut s = format!("H = {}, h = {}\ncrest: {}\ncrest polynomial: {}\n", r.height, r.coheight, print_equation(&r.crest), r.poly.render("z"));
                if let Some(big_r) = v["R"].as_f64() {
                    s.push_str(&format!("R = {big_r}\n"));
                }
                Output::Text(s)
            }
        }
        Command::Asymptotics { file, q, n, f0, linearize, plot } => {
            let p = load(file)?.to_numeric(q.q);
            asymptotics(&p, q.q, *n, *f0, *linearize, plot.as_ref(), tol, cli.json)?
        }
    };
    Ok(out)
}

fn invariants(src: &EquationSource, q: Option<Complex64>, n: usize) -> Value {
    let exact = src.to_exact();
    let mut v = json!({ "equation": print_equation(&src.parsed) });
    match src.parsed.alpha_stats() {
        Ok(st) => {
            v["alpha"] = json!({ "p0_max": st.p0_max, "p0_min": st.p0_min, "plus_max": st.plus_max, "plus_min": st.plus_min });
        }
        Err(e) => v["alpha"] = unavailable(&e),
    }
    v["height"] = match height_coheight(&src.parsed) {
        Ok((h1, h2)) => json!({ "H": exponent_json(&h1), "h": exponent_json(&h2) }),
        Err(e) => unavailable(&e),
    };
    v["depth"] = match depth_codepth(&src.parsed) {
        Ok((d, co)) => json!({ "D": finite(d), "d": finite(co) }),
        Err(e) => unavailable(&e),
    };
    match &exact {
        Ok(p) => {
            v["elevation"] = match edge_elevation(p, &()) {
                Ok(e) => json!({ "E": exponent_json(&e.elevation), "edge_poly": e.poly.render("z") }),
                Err(e) => unavailable(&e),
            };
            v["coefficient_gevrey_order"] = json!(coefficient_gevrey_order(p).map(|s| exponent_json(&s)));
            v["generic_order"] = table(generic_order(p, n));
            v["generic_degree"] = table(generic_degree(p, n));
        }
        Err(e) => {
            v["elevation"] = unavailable(e);
            v["generic_order"] = unavailable(e);
            v["generic_degree"] = unavailable(e);
        }
    }
    if let Some(q) = q {
        v["regime"] = classify_regime(&src.to_numeric(q), q).to_json();
    }
    v
}

fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!("inf")
    }
}

fn table(t: Result<Vec<i64>>) -> Value {
    match t {
        Ok(xs) => json!(xs),
        Err(e) => unavailable(&e),
    }
}

fn render_invariants(v: &Value) -> String {
    let mut s = String::new();
    for key in ["equation", "alpha", "height", "depth", "elevation", "coefficient_gevrey_order", "generic_order", "generic_degree", "regime"] {
        if let Some(x) = v.get(key) {
            let shown = match x {
                Value::String(t) => t.clone(),
                other => other.to_string(),
            };
            s.push_str(&format!("{key}: {shown}\n"));
        }
    }
    s
}

/// The operator brought to `max α(P₀) = 0` with `|q| > 1`, if divergent.
fn divergent_normal_form(p: &NumOp, q: Complex64) -> Option<(NumOp, Complex64, i64, bool)> {
    let r = classify_regime(p, q);
    if r.tag != Regime::Divergent {
        return None;
    }
    if r.reflected {
        let k = p.factors().filter(|f| f.a().is_zero() && !f.is_empty()).filter_map(|f| f.first_alpha()).min()?;
        Some((sigma_conjugate(&reflect(p, false), k, Side::Right, &q.inv()), q.inv(), k, true))
    } else {
        Some((sigma_conjugate(p, r.shift, Side::Right, &q), q, r.shift, false))
    }
}

#[allow(clippy::too_many_arguments)]
fn asymptotics(p: &NumOp, q: Complex64, n: usize, f0: Option<Complex64>, linearize: bool, plot: Option<&PathBuf>, tol: f64, as_json: bool) -> Result<Output> {
    let regime = classify_regime(p, q);
    let mut v = regime.to_json();
    let mut text = format!("regime: {}\ngrowth: {}\n", regime.tag, regime.growth);
    if let Some((op, qq, k, reflected)) = divergent_normal_form(p, q) {
        v["normalized_operator"] = json!(print_equation(&op));
        v["normalized_q"] = complex_json(qq);
        v["sigma_shift"] = json!(k);
        let g = solve_numeric(&op, qq, n, f0)?;
        let report = divergent_estimate(&op, &g)?;
        text.push_str(&format!("normalized operator (q = {}{}): {}\n", fmt_complex(qq), if reflected { ", reflected" } else { "" }, print_equation(&op)));
        text.push_str(&format!("H = {}, h = {}, R = {}, normalization: {:?}\n", report.height, report.coheight, report.radius, report.normalization));
        for c in &report.classes {
            text.push_str(&format!(
                "  class {}: c = {} (uncertainty {:.3e}, last difference {:.3e})\n",
                c.residue,
                fmt_complex(c.estimate),
                c.uncertainty,
                c.final_difference
            ));
        }
        if let Some(path) = plot {
            std::fs::write(path, report.plot_csv()).map_err(|e| QError::Io(format!("{}: {e}", path.display())))?;
        }
        v["estimate"] = report.to_json();
        if linearize {
            let lin = linearize_crest(&op, &qq, 16, tol)?;
            let heights: Vec<String> = lin.heights.iter().map(|h| h.to_string()).collect();
            text.push_str(&format!("linearized in {} steps, heights {}: {}\n", lin.steps, heights.join(", "), print_equation(&lin.op)));
            v["linearized"] = json!({
                "steps": lin.steps,
                "prefix": lin.prefix.iter().map(|c| complex_json(*c)).collect::<Vec<_>>(),
                "heights": heights,
                "operator": print_equation(&lin.op),
            });
        }
    } else if matches!(regime.tag, Regime::Analytic | Regime::Balanced) {
        let f = solve_numeric(p, q, n, f0)?;
        let (a, b) = (&f.coeffs[n.saturating_sub(1)], &f.coeffs[n]);
        if n > 0 && !a.is_zero() && !b.is_zero() {
            let radius = (a.ln_norm() - b.ln_norm()).exp();
            text.push_str(&format!("ratio estimate of the radius: {radius}\n"));
            v["radius_estimate"] = json!(radius);
        }
    } else if regime.tag == Regime::Entire {
        let f = solve_numeric(p, q, n, f0)?;
        let last = f.coeffs[n].ln_norm();
        text.push_str(&format!("ln|f_N| = {last}\n"));
        v["log_abs_last"] = json!(last);
    }
    Ok(if as_json { Output::Json(v) } else { Output::Text(text) })
}

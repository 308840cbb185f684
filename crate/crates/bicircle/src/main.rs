use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{Map, Number, Value};

use bicircle::closed_forms::{sweep, Example};
use bicircle::error::{Error, MomentError};
use bicircle::fejer_riesz::{fejer_riesz_factor, quadrature_grid, stable_from_functional, StableOutcome, Verdict, ZERO_TOL};
use bicircle::io::{self, fmt_real, InputError};
use bicircle::matrix::{ComplexMatrix, C64};
use bicircle::moments::{moments_from_density, MomentTable};
use bicircle::orthopoly::{coefficients_by_inner_product, gram_schmidt_levels};
use bicircle::synthesis::{extract_from_families, synthesize, ParameterGrid};

const EXAMPLE_SEED: u64 = 1;

#[derive(Parser)]
#[command(name = "bicircle", version, about = "Positive functionals on the bicircle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Level (n, m) to work at; defaults to the level of the input file.
    #[arg(long, global = true, num_args = 2, value_names = ["N", "M"])]
    level: Option<Vec<usize>>,
    /// Quadrature grid per axis (match) or number of sweep points (example).
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Threshold for treating K as zero.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the main artifact (moments, parameters or factor) to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Build moments from a parameter file and report admissibility.
    Synth { params: String },
    /// Extract parameters and per-level coefficient norms from a moment file.
    Analyze { moments: String },
    /// Factor a positive trigonometric polynomial as |p|^2 with a stable reverse.
    Factor { trigpoly: String },
    /// Compare moments with those of the density 1/|p|^2.
    Match { moments: String, poly: String },
    /// Compare a closed-form admissibility region with the synthesis verdict on a sweep.
    Example {
        #[arg(value_enum)]
        name: ExampleName,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleName {
    Deg11,
    ContractiveToeplitz,
    BlockedExtension,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Struct,
}

struct Outcome {
    report: Map<String, Value>,
    artifact: Option<String>,
    refused: bool,
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(fmt_real(x).parse::<Number>().expect("formatted float parses"))
    } else {
        Value::String(format!("{x}"))
    }
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn cnum(z: C64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

fn obj(entries: Vec<(&str, Value)>) -> Value {
    Value::Object(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

fn norm(m: &ComplexMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        0.0
    } else {
        m.spectral_norm()
    }
}

fn input(e: impl std::fmt::Display) -> InputError {
    InputError::Parse { line: 0, message: e.to_string() }
}

fn level_or(cli_level: &Option<Vec<usize>>, n: usize, m: usize) -> Result<(usize, usize), InputError> {
    match cli_level {
        None => Ok((n, m)),
        Some(v) if v[0] <= n && v[1] <= m => Ok((v[0], v[1])),
        Some(v) => Err(input(format!("level ({},{}) exceeds the input level ({n},{m})", v[0], v[1]))),
    }
}

fn restrict_params(g: &ParameterGrid, n: usize, m: usize) -> ParameterGrid {
    let mut out = ParameterGrid::new(n, m, g.get(0, 0).re);
    for (i, j) in out.free_indices() {
        out.set(i, j, g.get(i, j));
    }
    out
}

fn level_norms(moments: &MomentTable, n: usize, m: usize) -> Result<Vec<Value>, Error> {
    let fam = gram_schmidt_levels(moments, n, m)?;
    let mut rows = Vec::new();
    for i in 0..=n {
        for j in 0..=m {
            let c = coefficients_by_inner_product(moments, &fam, i, j)?;
            rows.push(obj(vec![
                ("n", i.into()),
                ("m", j.into()),
                ("e_hat", opt_num(c.e_hat.as_ref().map(norm))),
                ("e_hat_t", opt_num(c.e_hat_t.as_ref().map(norm))),
                ("k", num(norm(&c.k))),
                ("k1", num(norm(&c.k1))),
            ]));
        }
    }
    Ok(rows)
}

fn cmd_synth(cli: &Cli, path: &str) -> Result<Outcome, InputError> {
    let file = io::parse_params(&io::read_file(path)?)?;
    let (n, m) = level_or(&cli.level, file.n(), file.m())?;
    let params = restrict_params(&file, n, m);
    let tol = cli.tol.unwrap_or(ZERO_TOL);
    let mut r = Map::new();
    r.insert("level".into(), Value::Array(vec![n.into(), m.into()]));
    let records = |rep: &bicircle::synthesis::AdmissibilityReport| -> Value {
        Value::Array(
            rep.levels
                .iter()
                .map(|l| {
                    obj(vec![
                        ("n", l.n.into()),
                        ("m", l.m.into()),
                        ("axis_reflection", opt_num(l.axis_reflection)),
                        ("k", opt_num(l.k_norm)),
                        ("k1", opt_num(l.k1_norm)),
                        ("h3", opt_num(l.h3)),
                        ("e_consistency", opt_num(l.e_consistency)),
                    ])
                })
                .collect(),
        )
    };
    match synthesize(&params) {
        Err(f) => {
            r.insert("admissible".into(), false.into());
            let fail = &f.inadmissible;
            r.insert(
                "failure".into(),
                obj(vec![
                    ("level", Value::Array(vec![fail.n.into(), fail.m.into()])),
                    ("condition", fail.condition.to_string().into()),
                    ("value", num(fail.value)),
                ]),
            );
            r.insert("checks".into(), records(&f.report));
            Ok(Outcome { report: r, artifact: None, refused: true })
        }
        Ok(state) => {
            r.insert("admissible".into(), true.into());
            r.insert("checks".into(), records(state.report()));
            let moments_text = io::write_moments(state.moments());
            r.insert("moments".into(), moments_text.clone().into());
            r.insert("phi".into(), io::write_poly(&state.families().phi(n, m).rows[0]).into());
            r.insert("phi_t".into(), io::write_poly(&state.families().phi_t(n, m).rows[0]).into());
            let k_norm = norm(&state.level(n, m).k);
            r.insert("k".into(), num(k_norm));
            if k_norm <= tol {
                if let Ok(StableOutcome::Stable { factor, match_error, .. }) = stable_from_functional(state.moments(), n, m, tol) {
                    r.insert(
                        "factor".into(),
                        obj(vec![
                            ("poly", io::write_poly(&factor.poly).into()),
                            ("match_error", num(match_error)),
                            ("min_reverse_modulus", num(factor.certificate.min_modulus)),
                        ]),
                    );
                }
            }
            Ok(Outcome { report: r, artifact: Some(moments_text), refused: false })
        }
    }
}

fn cmd_analyze(cli: &Cli, path: &str) -> Result<Outcome, InputError> {
    let moments = io::parse_moments(&io::read_file(path)?)?;
    let (n, m) = level_or(&cli.level, moments.n_max(), moments.m_max())?;
    let mut r = Map::new();
    r.insert("level".into(), Value::Array(vec![n.into(), m.into()]));
    let fam = match gram_schmidt_levels(&moments, n, m) {
        Ok(f) => f,
        Err(Error::NotPositiveDefinite { n: a, m: b }) => {
            r.insert("positive_definite".into(), false.into());
            r.insert("failed_level".into(), Value::Array(vec![a.into(), b.into()]));
            return Ok(Outcome { report: r, artifact: None, refused: true });
        }
        Err(Error::Moment(e)) => return Err(input(e)),
        Err(e) => return Err(input(e)),
    };
    r.insert("positive_definite".into(), true.into());
    let params = extract_from_families(&moments, &fam).map_err(input)?;
    let text = io::write_params(&params);
    r.insert("params".into(), text.clone().into());
    r.insert("levels".into(), Value::Array(level_norms(&moments, n, m).map_err(input)?));
    Ok(Outcome { report: r, artifact: Some(text), refused: false })
}

fn cmd_factor(cli: &Cli, path: &str) -> Result<Outcome, InputError> {
    let f = io::parse_trigpoly(&io::read_file(path)?)?;
    let res = fejer_riesz_factor(&f, cli.tol.unwrap_or(ZERO_TOL)).map_err(input)?;
    let mut r = Map::new();
    let verdict = match res.verdict {
        Verdict::Factored => "factored",
        Verdict::NotFactorable => "not factorable",
        Verdict::NotPositive => "not positive",
    };
    r.insert("verdict".into(), verdict.into());
    r.insert("min_value".into(), num(res.min_value));
    r.insert("k".into(), opt_num(res.k_norm));
    r.insert("reconstruction_error".into(), opt_num(res.reconstruction_error));
    let artifact = res.factor.as_ref().map(|p| io::write_poly(&p.poly));
    if let Some(p) = &res.factor {
        r.insert("factor".into(), io::write_poly(&p.poly).into());
        r.insert(
            "certificate".into(),
            obj(vec![
                ("radial", p.certificate.radial.into()),
                ("angular", p.certificate.angular.into()),
                ("min_reverse_modulus", num(p.certificate.min_modulus)),
                ("leading", num(p.certificate.leading)),
                ("max_winding", p.certificate.max_winding.into()),
            ]),
        );
    }
    Ok(Outcome { report: r, artifact, refused: res.verdict != Verdict::Factored })
}

fn cmd_match(cli: &Cli, moments_path: &str, poly_path: &str) -> Result<Outcome, InputError> {
    let moments = io::parse_moments(&io::read_file(moments_path)?)?;
    let p = io::parse_poly(&io::read_file(poly_path)?)?;
    let (n, m) = match &cli.level {
        Some(v) => (v[0], v[1]),
        None => (p.deg_z(), p.deg_w()),
    };
    let (gz, gw) = cli.grid.map_or(quadrature_grid(2 * n, 2 * m), |g| (g, g));
    let mut r = Map::new();
    r.insert("level".into(), Value::Array(vec![n.into(), m.into()]));
    r.insert("grid".into(), Value::Array(vec![gz.into(), gw.into()]));
    let quad = match moments_from_density(|z, w| 1.0 / p.eval(z, w).norm_sqr(), n, m, gz, gw) {
        Ok(q) => q,
        Err(MomentError::NonPositiveDensitySample { .. }) => {
            r.insert("error".into(), "polynomial vanishes on the torus grid".into());
            return Ok(Outcome { report: r, artifact: None, refused: true });
        }
        Err(e) => return Err(input(e)),
    };
    let mut rows = Vec::new();
    let mut max: f64 = 0.0;
    for (i, j, v) in quad.half_plane() {
        let c = moments.get(i, j).map_err(input)?;
        max = max.max((c - v).norm());
        rows.push(obj(vec![("i", i.into()), ("j", j.into()), ("moment", cnum(c)), ("quadrature", cnum(v)), ("error", num((c - v).norm()))]));
    }
    r.insert("max_error".into(), num(max));
    r.insert("table".into(), Value::Array(rows));
    Ok(Outcome { report: r, artifact: None, refused: false })
}

fn cmd_example(cli: &Cli, name: ExampleName) -> Result<Outcome, InputError> {
    let (ex, label) = match name {
        ExampleName::Deg11 => (Example::Deg11, "deg11"),
        ExampleName::ContractiveToeplitz => (Example::ContractiveToeplitz, "contractive-toeplitz"),
        ExampleName::BlockedExtension => (Example::BlockedExtension, "blocked-extension"),
    };
    let pts = sweep(ex, cli.grid.unwrap_or(24), EXAMPLE_SEED);
    let band = 1e-6;
    let mut rows = Vec::new();
    for p in &pts {
        let mut e: Vec<(&str, Value)> = p.params.iter().map(|(k, v)| (*k, cnum(*v))).collect();
        e.push(("closed_form", p.closed_form.into()));
        e.push(("algorithmic", p.algorithmic.into()));
        e.push(("boundary_distance", num(p.boundary_distance)));
        e.push(("agree", p.agrees().into()));
        rows.push(obj(e));
    }
    let off: Vec<_> = pts.iter().filter(|p| !p.in_band(band)).collect();
    let mut r = Map::new();
    r.insert("example".into(), label.into());
    r.insert("points".into(), pts.len().into());
    r.insert("in_band".into(), (pts.len() - off.len()).into());
    r.insert("disagreements".into(), off.iter().filter(|p| !p.agrees()).count().into());
    if pts.iter().any(|p| p.alternative_form.is_some()) {
        let alternative = off.iter().filter(|p| p.alternative_form != Some(p.algorithmic)).count();
        r.insert("alternative_form_disagreements".into(), alternative.into());
    }
    r.insert("sweep".into(), Value::Array(rows));
    Ok(Outcome { report: r, artifact: None, refused: false })
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Array(a) if a.len() == 2 && a.iter().all(Value::is_number) => format!("({}, {})", a[0], a[1]),
        Value::Array(a) => a.iter().map(scalar_text).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn render_text(map: &Map<String, Value>, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    for (k, v) in map {
        match v {
            Value::Object(inner) => {
                out.push_str(&format!("{pad}{k}:\n"));
                render_text(inner, indent + 2, out);
            }
            Value::String(s) if s.contains('\n') => {
                out.push_str(&format!("{pad}{k}:\n"));
                for line in s.lines() {
                    out.push_str(&format!("{pad}  {line}\n"));
                }
            }
            Value::Array(a) if a.iter().any(Value::is_object) => {
                out.push_str(&format!("{pad}{k}:\n"));
                for item in a {
                    let fields = item.as_object().map_or_else(
                        || scalar_text(item),
                        |o| o.iter().map(|(fk, fv)| format!("{fk}={}", scalar_text(fv))).collect::<Vec<_>>().join(" "),
                    );
                    out.push_str(&format!("{pad}  {fields}\n"));
                }
            }
            _ => out.push_str(&format!("{pad}{k}: {}\n", scalar_text(v))),
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, InputError> {
    if let Some(t) = cli.tol {
        if !(t > 0.0) {
            return Err(input("--tol must be positive"));
        }
    }
    if cli.grid == Some(0) {
        return Err(input("--grid must be positive"));
    }
    match &cli.command {
        Command::Synth { params } => cmd_synth(cli, params),
        Command::Analyze { moments } => cmd_analyze(cli, moments),
        Command::Factor { trigpoly } => cmd_factor(cli, trigpoly),
        Command::Match { moments, poly } => cmd_match(cli, moments, poly),
        Command::Example { name } => cmd_example(cli, *name),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let rendered = match cli.format {
        Format::Struct => format!("{}\n", serde_json::to_string_pretty(&Value::Object(outcome.report)).expect("serializable")),
        Format::Text => {
            let mut s = String::new();
            render_text(&outcome.report, 0, &mut s);
            s
        }
    };
    print!("{rendered}");
    if let Some(path) = &cli.out {
        let body = outcome.artifact.as_deref().unwrap_or(&rendered);
        if let Err(e) = std::fs::write(path, body) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    if outcome.refused {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

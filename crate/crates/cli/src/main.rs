use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use pathgeom::eds::{self, CurvatureSample};
use pathgeom::hypersurface::{self, fixtures, PolyMap};
use pathgeom::json::{multivector_from_value, multivector_to_value, num17, rational_from_value, scalar_value};
use pathgeom::pairs::{self, EllipticPair};
use pathgeom::splitting::{self, Splitting};
use pathgeom::{Field, MultiVector, Scalar, VolumeForm};

/// Verifications for elliptic pairs, splittings, hypersurfaces of C² and the
/// embedding EDS. Reads JSON from a file or stdin, writes JSON.
#[derive(Parser)]
#[command(name = "pathgeom", version)]
struct Cli {
    /// Tolerance for floating comparisons.
    #[arg(long, global = true, default_value_t = pathgeom::DEFAULT_TOL)]
    tol: f64,
    /// Seed for sampled inputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Volume form as a JSON 4-form, overriding the input's.
    #[arg(long, global = true)]
    epsilon: Option<String>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a pair of 2-forms: `{"omega": .., "phi": .., "epsilon"?: ..}`.
    Pair { input: Option<PathBuf> },
    /// Degree of a splitting: `{"L1": .., "L2": .., "epsilon"?: ..}`.
    Splitting { input: Option<PathBuf> },
    /// Per-point path geometry and CR data of a parametrized hypersurface:
    /// `{"map": <PolyMap> | "fixture": name, "points"?: [[x1,x2,x3], ..]}`.
    Hypersurface {
        input: Option<PathBuf>,
        /// Random rational points to add.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Exterior differential system checks.
    Eds {
        #[command(subcommand)]
        command: EdsCommand,
    },
}

#[derive(Subcommand)]
enum EdsCommand {
    /// Cartan test at random or given curvature values:
    /// `[{"W1": .., "W2": .., "F1": .., "F2": ..}, ..]`.
    Verify {
        input: Option<PathBuf>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

struct Report {
    value: Value,
    passed: bool,
}

fn read_input(path: &Option<PathBuf>) -> anyhow::Result<Value> {
    let text = match path {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    serde_json::from_str(&text).context("parsing input JSON")
}

fn two_form(v: &Value, key: &str) -> anyhow::Result<MultiVector<Scalar>> {
    let field = v.get(key).ok_or_else(|| anyhow!("missing field {key:?}"))?;
    let form = multivector_from_value(field).with_context(|| format!("field {key:?}"))?;
    if form.dim() != 4 || form.degree() != 2 {
        bail!("field {key:?} must be a 2-form on R^4");
    }
    Ok(form)
}

fn volume(cli: &Cli, input: &Value) -> anyhow::Result<VolumeForm<Scalar>> {
    let value = match &cli.epsilon {
        Some(text) => Some(serde_json::from_str::<Value>(text).context("parsing --epsilon")?),
        None => input.get("epsilon").cloned(),
    };
    match value {
        Some(v) => Ok(VolumeForm::from_form(&multivector_from_value(&v)?).context("epsilon")?),
        None => Ok(VolumeForm::standard()),
    }
}

fn gram_json(g: &[[Scalar; 2]; 2]) -> Value {
    json!(g.iter().map(|r| r.iter().map(scalar_value).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn cmd_pair(cli: &Cli, input: &Value) -> anyhow::Result<Report> {
    let omega = two_form(input, "omega")?;
    let phi = two_form(input, "phi")?;
    let eps = volume(cli, input)?;
    let tol = cli.tol;
    let gram = pairs::gram(&omega, &phi, &eps)?;
    let mut out = json!({
        "gram": gram_json(&gram),
        "omega_symplectic": pairs::is_symplectic(&omega, &eps, tol)?,
        "phi_symplectic": pairs::is_symplectic(&phi, &eps, tol)?,
        "elliptic": pairs::is_elliptic(&omega, &phi, &eps, tol)?,
    });
    let mut passed = true;
    if out["elliptic"] == json!(true) {
        let pair = EllipticPair::new(omega, phi, eps, tol)?.orthogonalized(tol)?;
        let nf = pairs::normal_form(&pair, tol)?;
        let residual = nf.reconstruction_residual(&pair);
        let scale = pair.omega().max_abs().max(pair.phi().max_abs()).max(1.0);
        passed = residual <= tol * scale;
        out["orthogonalized"] = json!({
            "omega": multivector_to_value(pair.omega()),
            "phi": multivector_to_value(pair.phi()),
        });
        out["kappa_squared"] = scalar_value(&pair.kappa_squared(tol)?);
        out["kappa"] = num17(pairs::kappa_invariant(&pair, tol)?);
        out["normal_form"] = nf.to_json();
        out["reconstruction_residual"] = num17(residual);
    }
    Ok(Report { value: out, passed })
}

fn cmd_splitting(cli: &Cli, input: &Value) -> anyhow::Result<Report> {
    let tol = cli.tol;
    let s = Splitting::new(two_form(input, "L1")?, two_form(input, "L2")?, volume(cli, input)?, tol)?;
    let d2 = splitting::degree_squared(&s, tol)?;
    let alpha = splitting::degree(&s, tol)?;
    let (_, witness) = splitting::equivalence_witness(&s, tol)?;
    let model = splitting::canonical_model(alpha, tol)?;
    let verified = splitting::act(&witness, &model, tol)?.same_lines(&s.to_f64(), tol.sqrt());
    let basis: Vec<Vec<Value>> = witness.to_rows().into_iter().map(|r| r.into_iter().map(num17).collect()).collect();
    let value = json!({
        "degree": num17(alpha),
        "degree_squared": scalar_value(&d2),
        "orthogonal": d2.is_zero_within(tol),
        "epsilon_flipped": s.epsilon_flipped(),
        "canonical_model": {"alpha": num17(alpha), "witness": basis, "verified": verified},
    });
    Ok(Report { value, passed: verified })
}

fn cmd_hypersurface(cli: &Cli, input: &Value, samples: Option<usize>) -> anyhow::Result<Report> {
    let map = match (input.get("map"), input.get("fixture").and_then(Value::as_str)) {
        (Some(m), None) => PolyMap::from_json(m)?,
        (None, Some("heisenberg")) => fixtures::heisenberg(),
        (None, Some("affine_plane")) => fixtures::affine_plane(),
        (None, Some("sphere")) => fixtures::sphere_chart(),
        (None, Some(other)) => bail!("unknown fixture {other:?}"),
        _ => bail!("expected exactly one of \"map\" or \"fixture\""),
    };
    let mut points = Vec::new();
    if let Some(list) = input.get("points") {
        let list = list.as_array().ok_or_else(|| anyhow!("\"points\" must be an array"))?;
        for p in list {
            points.push(hypersurface::point_from_json(p)?);
        }
    }
    points.extend(hypersurface::random_points(samples.unwrap_or(0), cli.seed));
    let records: Vec<Value> = points.iter().map(|x| hypersurface::point_record(&map, x, cli.tol)).collect();
    Ok(Report { value: json!({"map": map.to_json(), "points": records}), passed: true })
}

fn curvature_from_json(v: &Value) -> anyhow::Result<CurvatureSample> {
    let get = |k: &str| -> anyhow::Result<_> {
        let field = v.get(k).ok_or_else(|| anyhow!("missing field {k:?}"))?;
        Ok(rational_from_value(field)?)
    };
    Ok(CurvatureSample::new(get("W1")?, get("W2")?, get("F1")?, get("F2")?))
}

fn cmd_eds_verify(cli: &Cli, input: Option<&Value>, samples: Option<usize>) -> anyhow::Result<Report> {
    let mut list = Vec::new();
    if let Some(v) = input {
        let arr = v.as_array().ok_or_else(|| anyhow!("expected an array of curvature samples"))?;
        for s in arr {
            list.push(curvature_from_json(s)?);
        }
    }
    list.extend(eds::random_samples(samples.unwrap_or(0), cli.seed));
    let report = eds::verify_involutivity(&list);
    Ok(Report { value: report.to_json(), passed: report.all_pass() })
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    if !(cli.tol > 0.0) {
        bail!("--tol must be positive");
    }
    match &cli.command {
        Command::Pair { input } => cmd_pair(cli, &read_input(input)?),
        Command::Splitting { input } => cmd_splitting(cli, &read_input(input)?),
        Command::Hypersurface { input, samples } => cmd_hypersurface(cli, &read_input(input)?, *samples),
        Command::Eds { command: EdsCommand::Verify { input, samples } } => {
            let value = match input {
                Some(_) => Some(read_input(input)?),
                None => None,
            };
            cmd_eds_verify(cli, value.as_ref(), *samples)
        }
    }
}

fn emit(cli: &Cli, value: &Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match &cli.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
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
    match run(&cli).and_then(|r| emit(&cli, &r.value).map(|_| r.passed)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

//! `harmonorm`: evaluate Schwarzians, estimate norms, compute family orders,
//! check extremal maps and export heatmaps.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 usage or domain error.

mod config;
mod descriptor;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use harmonorm::verify::{run_acceptance, EXTREMAL_NORM_TOL, PSI_SAMPLES};
use harmonorm::{
    extremal_coefficients, heatmap, marty_residual, order_f, order_h, psi_monotone_check, schwarzian_harmonic,
    sup_norm, Complex, FamilyParams, Field, GridConfig, HarmonicMap, NormEstimate,
};
use serde_json::{json, Value};

use config::{Format, RunArgs};
use descriptor::{parse_complex, BuiltMap, MapDescriptor, Transform};

#[derive(Parser)]
#[command(name = "harmonorm", version, about = "Schwarzian norms of harmonic maps of the unit disk")]
struct Cli {
    /// Worker threads for grid scans (0 = one per core)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Jets, dilatation and Schwarzian of a map at one point
    Eval {
        #[command(flatten)]
        map: MapArgs,
        /// Point in the disk: `x+yi`, `yi`, `x` or `re,im`
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Supremum over the disk of the scaled Schwarzian or of |ω*|
    Norm {
        #[command(flatten)]
        map: MapArgs,
        /// `hyperbolic` uses the map itself for lens, automorphism and identity,
        /// and the dilatation otherwise
        #[arg(long, value_enum, default_value = "schwarzian")]
        field: FieldKind,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Orders of the analytic and harmonic families for a norm bound λ
    Order {
        #[arg(long)]
        lambda: f64,
        /// Dilatation bound; required for λ < 3/2
        #[arg(long = "R")]
        r: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Build the extremal map for (λ, R) and check that its norm is λ
    Extremal {
        #[arg(long)]
        lambda: f64,
        #[arg(long = "R")]
        r: Option<f64>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run a verification suite (`acceptance`)
    Verify { suite: String },
    /// Scaled Schwarzian on the scan grid, as `re,im,scaled` rows
    Heatmap {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FieldKind {
    Schwarzian,
    Hyperbolic,
}

#[derive(Debug, Clone, Args)]
struct MapArgs {
    /// Map kind: identity, analytic_koebe, strip, generalized_koebe, lens,
    /// automorphism, harmonic_koebe, f_r, extremal
    #[arg(long)]
    kind: Option<String>,
    /// JSON map descriptor; excludes the other map flags
    #[arg(long)]
    desc: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long = "R", allow_negative_numbers = true)]
    big_r: Option<f64>,
    #[arg(long = "r", allow_negative_numbers = true)]
    r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha_re: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha_im: Option<f64>,
    /// Koebe transform point, applied before --transform steps
    #[arg(long, allow_negative_numbers = true)]
    zeta_re: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    zeta_im: Option<f64>,
    /// Affine change parameter, applied after zeta and before --transform steps
    #[arg(long, allow_negative_numbers = true)]
    eps_re: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eps_im: Option<f64>,
    /// `koebe:re,im` or `affine:re,im`; repeatable, applied in order
    #[arg(long = "transform")]
    transforms: Vec<String>,
}

impl MapArgs {
    fn params(&self) -> BTreeMap<String, f64> {
        [
            ("a", self.a),
            ("R", self.big_r),
            ("r", self.r),
            ("lambda", self.lambda),
            ("alpha-re", self.alpha_re),
            ("alpha-im", self.alpha_im),
            ("zeta-re", self.zeta_re),
            ("zeta-im", self.zeta_im),
            ("eps-re", self.eps_re),
            ("eps-im", self.eps_im),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
        .collect()
    }

    fn descriptor(&self) -> Result<MapDescriptor> {
        let params = self.params();
        match (&self.desc, &self.kind) {
            (Some(path), None) => {
                if !params.is_empty() || !self.transforms.is_empty() {
                    bail!("--desc cannot be combined with map parameter or --transform flags");
                }
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read {}", path.display()))?;
                MapDescriptor::from_json(&text)
            }
            (None, Some(kind)) => {
                let transforms =
                    self.transforms.iter().map(|t| Transform::parse(t)).collect::<Result<Vec<_>>>()?;
                let d = MapDescriptor { kind: kind.clone(), params, transforms };
                d.validate()?;
                Ok(d)
            }
            (Some(_), Some(_)) => bail!("--desc and --kind are mutually exclusive"),
            (None, None) => bail!("a map is required: pass --kind or --desc"),
        }
    }

    fn build(&self) -> Result<(MapDescriptor, BuiltMap)> {
        let d = self.descriptor()?;
        let built = d.build()?;
        Ok((d, built))
    }
}

/// Whether the command's own checks passed.
enum Status {
    Ok,
    Failed,
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn json_line(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("json value serializes");
    s.push('\n');
    s
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn pair(z: Complex) -> Value {
    json!([z.re, z.im])
}

fn norm_json(e: &NormEstimate) -> Value {
    json!({
        "value": e.value,
        "argmax": pair(e.argmax),
        "attained": e.attained,
        "grid": [e.grid.0, e.grid.1],
        "refinement_error": e.refinement_error,
    })
}

const NORM_HEADER: [&str; 7] = ["value", "argmax_re", "argmax_im", "attained", "n_r", "n_theta", "refinement_error"];

fn norm_row(e: &NormEstimate) -> Vec<String> {
    vec![
        e.value.to_string(),
        e.argmax.re.to_string(),
        e.argmax.im.to_string(),
        e.attained.to_string(),
        e.grid.0.to_string(),
        e.grid.1.to_string(),
        e.refinement_error.to_string(),
    ]
}

fn cmd_eval(map: &MapArgs, z: &str, format: Format) -> Result<Status> {
    let z = parse_complex(z)?;
    if z.norm_sqr() >= 1.0 {
        bail!("z = {z} must satisfy |z| < 1");
    }
    let (desc, built) = map.build()?;
    let f = built.harmonic;
    let h = f.h.jet(z)?;
    let g = f.g.jet(z)?;
    let w = f.dilatation(z)?;
    let s = schwarzian_harmonic(&f, z)?;
    let text = match format {
        Format::Json => json_line(&json!({
            "map": serde_json::to_value(&desc)?,
            "z": pair(z),
            "h": [pair(h.f0), pair(h.f1), pair(h.f2), pair(h.f3)],
            "g": [pair(g.f0), pair(g.f1), pair(g.f2), pair(g.f3)],
            "omega": [pair(w.f0), pair(w.f1), pair(w.f2)],
            "schwarzian": pair(s.value),
            "scaled": s.scaled,
        })),
        Format::Csv => {
            let named: Vec<(String, Complex)> = [("z", vec![z]), ("h", vec![h.f0, h.f1, h.f2, h.f3]), ("g", vec![g.f0, g.f1, g.f2, g.f3]), ("omega", vec![w.f0, w.f1, w.f2]), ("s", vec![s.value])]
                .into_iter()
                .flat_map(|(name, vals)| {
                    let many = vals.len() > 1;
                    vals.into_iter().enumerate().map(move |(k, v)| {
                        (if many { format!("{name}{k}") } else { name.to_string() }, v)
                    })
                })
                .collect();
            let mut header: Vec<String> =
                named.iter().flat_map(|(n, _)| [format!("{n}_re"), format!("{n}_im")]).collect();
            header.push("scaled".into());
            let mut row: Vec<String> = named.iter().flat_map(|(_, v)| [v.re.to_string(), v.im.to_string()]).collect();
            row.push(s.scaled.to_string());
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            csv(&header, &[row])
        }
    };
    emit(None, &text)?;
    Ok(Status::Ok)
}

fn field_for<'a>(built: &'a BuiltMap, kind: FieldKind) -> Field<'a> {
    match (kind, &built.self_map) {
        (FieldKind::Schwarzian, _) => Field::Schwarzian(&built.harmonic),
        (FieldKind::Hyperbolic, Some(w)) => Field::Hyperbolic(w),
        (FieldKind::Hyperbolic, None) => Field::Dilatation(&built.harmonic),
    }
}

fn cmd_norm(map: &MapArgs, field: FieldKind, run: &RunArgs) -> Result<Status> {
    let cfg = run.resolve(Format::Json)?;
    let (desc, built) = map.build()?;
    let est = sup_norm(&field_for(&built, field), &cfg.grid)?;
    let text = match cfg.format {
        Format::Json => {
            let mut v = norm_json(&est);
            v["map"] = serde_json::to_value(&desc)?;
            v["field"] = json!(match field {
                FieldKind::Schwarzian => "schwarzian",
                FieldKind::Hyperbolic => "hyperbolic",
            });
            json_line(&v)
        }
        Format::Csv => csv(&NORM_HEADER, &[norm_row(&est)]),
    };
    emit(cfg.output.as_deref(), &text)?;
    Ok(Status::Ok)
}

fn cmd_order(lambda: f64, r: Option<f64>, format: Format) -> Result<Status> {
    let e = order_f(lambda, r)?;
    let analytic = order_h(lambda)?;
    let text = match format {
        Format::Json => json_line(&json!({
            "lambda": e.lambda,
            "order": e.order,
            "half_order": e.half_order,
            "R": e.r_sup,
            "source": e.source.tag(),
            "analytic_order": analytic,
        })),
        Format::Csv => csv(
            &["lambda", "order", "half_order", "R", "source", "analytic_order"],
            &[vec![
                e.lambda.to_string(),
                e.order.to_string(),
                e.half_order.to_string(),
                e.r_sup.to_string(),
                e.source.tag().to_string(),
                analytic.to_string(),
            ]],
        ),
    };
    emit(None, &text)?;
    Ok(Status::Ok)
}

fn cmd_extremal(lambda: f64, r: Option<f64>, run: &RunArgs) -> Result<Status> {
    let cfg = run.resolve(Format::Json)?;
    let r = order_f(lambda, r)?.r_sup;
    let p = FamilyParams::new(lambda, r)?;
    let f: HarmonicMap = harmonorm::make_extremal(p)?;
    let coeffs = extremal_coefficients(&p)?;
    let residual = marty_residual(&coeffs);
    let at_origin = schwarzian_harmonic(&f, Complex::new(0.0, 0.0))?.value.norm();
    let est = sup_norm(&Field::Schwarzian(&f), &cfg.grid)?;
    let norm_check =
        (est.value - lambda).abs() <= EXTREMAL_NORM_TOL && est.attained && est.argmax == Complex::new(0.0, 0.0);
    let psi = psi_monotone_check(&p, PSI_SAMPLES)?;
    let passed = norm_check && psi.passed;
    let text = match cfg.format {
        Format::Json => json_line(&json!({
            "lambda": lambda,
            "R": r,
            "a": p.a,
            "a2": coeffs.a2.re,
            "a3": coeffs.a3.re,
            "b2": coeffs.b2.re,
            "marty_residual": residual,
            "schwarzian_at_origin": at_origin,
            "norm": norm_json(&est),
            "norm_check": norm_check,
            "psi_check": {
                "passed": psi.passed,
                "max_excess": psi.max_excess,
                "argmax_r": psi.argmax_r,
                "nonincreasing": psi.nonincreasing,
                "regime_warning": psi.regime_warning,
            },
            "passed": passed,
        })),
        Format::Csv => {
            let mut header = vec!["lambda", "R", "a", "a2", "a3", "b2", "marty_residual", "schwarzian_at_origin"];
            header.extend(NORM_HEADER);
            header.extend(["norm_check", "psi_passed", "psi_max_excess", "psi_argmax_r", "passed"]);
            let mut row: Vec<String> = [lambda, r, p.a, coeffs.a2.re, coeffs.a3.re, coeffs.b2.re, residual, at_origin]
                .iter()
                .map(f64::to_string)
                .collect();
            row.extend(norm_row(&est));
            row.extend([
                norm_check.to_string(),
                psi.passed.to_string(),
                psi.max_excess.to_string(),
                psi.argmax_r.to_string(),
                passed.to_string(),
            ]);
            csv(&header, &[row])
        }
    };
    emit(cfg.output.as_deref(), &text)?;
    Ok(if passed { Status::Ok } else { Status::Failed })
}

fn cmd_verify(suite: &str) -> Result<Status> {
    if suite != "acceptance" {
        bail!("unknown suite `{suite}` (expected acceptance)");
    }
    let outcomes = run_acceptance(&GridConfig::default());
    let mut text = String::new();
    for o in &outcomes {
        text.push_str(&format!("{o}\n"));
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    text.push_str(&format!("{passed}/{} criteria passed\n", outcomes.len()));
    emit(None, &text)?;
    Ok(if passed == outcomes.len() { Status::Ok } else { Status::Failed })
}

fn cmd_heatmap(map: &MapArgs, run: &RunArgs) -> Result<Status> {
    let cfg = run.resolve(Format::Csv)?;
    let (_, built) = map.build()?;
    let cells = heatmap(&Field::Schwarzian(&built.harmonic), &cfg.grid)?;
    let text = match cfg.format {
        Format::Csv => {
            let mut s = String::with_capacity(cells.len() * 48);
            s.push_str("re,im,scaled\n");
            for (z, v) in &cells {
                s.push_str(&format!("{},{},{}\n", z.re, z.im, v));
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = cells.iter().map(|(z, v)| json!([z.re, z.im, v])).collect();
            let mut s = serde_json::to_string(&rows)?;
            s.push('\n');
            s
        }
    };
    emit(cfg.output.as_deref(), &text)?;
    Ok(Status::Ok)
}

fn dispatch(command: &Command) -> Result<Status> {
    match command {
        Command::Eval { map, z, format } => cmd_eval(map, z, *format),
        Command::Norm { map, field, run } => cmd_norm(map, *field, run),
        Command::Order { lambda, r, format } => cmd_order(*lambda, *r, *format),
        Command::Extremal { lambda, r, run } => cmd_extremal(*lambda, *r, run),
        Command::Verify { suite } => cmd_verify(suite),
        Command::Heatmap { map, run } => cmd_heatmap(map, run),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .context("cannot start worker threads")
        .and_then(|pool| pool.install(|| dispatch(&cli.command)));
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

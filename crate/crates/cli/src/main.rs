use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde_json::{json, Map, Value};

use fockcheck::exec::{self, Execution};
use fockcheck::focknorm::{norm2_exact, norm_p, FockParams};
use fockcheck::funcrep::FnExpr;
use fockcheck::lang::{format_complex, parse_complex, parse_function, print_function};
use fockcheck::operators::{dbound_general_p, dbound_grid_max, dnorm2_exact, dnorm2_paper, mnorm2_exact, SpacePair};
use fockcheck::quad::QuadratureSpec;
use fockcheck::report::Format;
use fockcheck::sharp::{constant_nulla, constant_thm1, constant_thm2, example_curve, zhu_ratio, Constant};
use fockcheck::specfun::PosReal;
use fockcheck::suites::{run_suite, Overrides, Suite, SuiteConfig, DEFAULT_SEED};
use fockcheck::FockError;

#[derive(Parser, Debug)]
#[command(name = "fockcheck", version, about = "Numerical checks of sharp pointwise estimates in Fock spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite; exits 0 iff every case passes.
    Verify(VerifyArgs),
    /// Fock norm of a function.
    Norm(NormArgs),
    /// Sharp constants for given parameters.
    Constants(ConstantsArgs),
    /// Exact norms and bounds of the differentiation and multiplication shifts.
    Operators(OperatorsArgs),
    /// Samples of the perturbed integral I(s) for plotting.
    Example(ExampleArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
    Text,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
            OutFormat::Text => Format::Text,
        }
    }
}

#[derive(Args, Debug)]
struct Output {
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
}

#[derive(Args, Debug)]
struct Quadrature {
    #[arg(long)]
    angular_nodes: Option<usize>,
    #[arg(long)]
    radial_nodes: Option<usize>,
    /// Relative quadrature target; also used for the random-input cases.
    #[arg(long)]
    tol: Option<f64>,
}

impl Quadrature {
    fn spec(&self) -> QuadratureSpec {
        let mut spec = QuadratureSpec::default();
        if let Some(n) = self.angular_nodes {
            spec.angular_nodes = n;
        }
        if let Some(n) = self.radial_nodes {
            spec.radial_nodes = n;
        }
        if let Some(t) = self.tol {
            spec.target_tol = t;
        }
        spec
    }
}

fn complex_arg(s: &str) -> Result<C64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

fn function_arg(s: &str) -> Result<FnExpr, String> {
    parse_function(s).map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_parser = ["zhuhe", "thm1", "thm2", "nulla", "example", "operators", "quadrature", "all"], default_value = "all")]
    suite: String,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    z: Option<C64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (default: machine parallelism).
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    quad: Quadrature,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct NormArgs {
    #[arg(long, value_parser = function_arg)]
    f: FnExpr,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[command(flatten)]
    quad: Quadrature,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true, default_value = "0")]
    z: C64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct OperatorsArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    /// Also evaluate the general-p bound at this p.
    #[arg(long)]
    p: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ExampleArgs {
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, default_value_t = 3.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true, default_value = "1")]
    z: C64,
    /// Half-width of the s range.
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    #[arg(long, default_value_t = 41)]
    points: usize,
    #[command(flatten)]
    quad: Quadrature,
    #[command(flatten)]
    output: Output,
}

/// Ordered key/value output for the scalar commands.
struct Record(Vec<(&'static str, Value)>);

impl Record {
    fn render(&self, format: OutFormat) -> anyhow::Result<String> {
        Ok(match format {
            OutFormat::Json => {
                let map: Map<String, Value> = self.0.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
                serde_json::to_string_pretty(&Value::Object(map))? + "\n"
            }
            OutFormat::Csv => {
                let mut s = String::from("key,value\n");
                for (k, v) in &self.0 {
                    s.push_str(&format!("{k},{}\n", plain(v)));
                }
                s
            }
            OutFormat::Text => self.0.iter().map(|(k, v)| format!("{k} = {}\n", plain(v))).collect(),
        })
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn constant_json(c: Constant) -> Value {
    json!({ "value": if c.overflow { Value::Null } else { json!(c.value) }, "ln_value": c.ln_value, "overflow": c.overflow })
}

fn emit(output: &Output, text: &str) -> anyhow::Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            // A closed pipe (`| head`) is not an error.
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

fn verify(args: VerifyArgs) -> anyhow::Result<bool> {
    let suite: Suite = args.suite.parse()?;
    let mut config = SuiteConfig::new(suite);
    config.overrides = Overrides {
        alpha: args.alpha,
        beta: args.beta,
        p: args.p,
        n: args.n,
        z: args.z,
    };
    config.seed = args.seed;
    config.spec = args.quad.spec();
    if let Some(t) = args.quad.tol {
        config.validity_tol = t;
    }
    config.exec = if args.jobs == Some(1) { Execution::Sequential } else { Execution::Parallel };
    let report = exec::with_jobs(args.jobs, || run_suite(&config))??;
    let format = args.output.format.unwrap_or(OutFormat::Json);
    emit(&args.output, &report.render(format.into())?)?;
    let failed = report.failures().count();
    if failed > 0 {
        log::warn!("{failed} of {} cases failed", report.cases.len());
    }
    Ok(failed == 0)
}

fn norm(args: NormArgs) -> anyhow::Result<()> {
    let params = FockParams::new(args.alpha, args.p)?;
    let q = norm_p(&args.f, params, &args.quad.spec())?;
    let mut rec = vec![
        ("f", json!(print_function(&args.f))),
        ("p", json!(args.p)),
        ("alpha", json!(args.alpha)),
        ("value", json!(q.value)),
        ("error", json!(q.error)),
    ];
    if args.p == 2.0 {
        let e = norm2_exact(&args.f, params.alpha)?;
        rec.push(("exact", json!(e.value)));
        rec.push(("exact_error", json!(e.error)));
    }
    emit(&args.output, &Record(rec).render(args.output.format.unwrap_or(OutFormat::Text))?)
}

fn constants(args: ConstantsArgs) -> anyhow::Result<()> {
    let params = FockParams::new(args.alpha, args.p)?;
    let r = args.z.norm();
    let rec = vec![
        ("n", json!(args.n)),
        ("p", json!(args.p)),
        ("alpha", json!(args.alpha)),
        ("z", json!(format_complex(args.z))),
        ("remainder", constant_json(constant_thm1(args.n, params, r)?)),
        ("origin", constant_json(constant_nulla(args.n, params)?)),
        ("hypergeometric", constant_json(constant_thm2(args.n, params.alpha, r)?)),
        ("zhu_ratio", json!(zhu_ratio(args.n, params)?)),
    ];
    let format = args.output.format.unwrap_or(OutFormat::Json);
    let rec = if format == OutFormat::Json {
        Record(rec)
    } else {
        // Flatten the constant objects for the line formats.
        Record(
            rec.into_iter()
                .map(|(k, v)| match v.get("ln_value") {
                    Some(ln) => (k, json!(if v["overflow"] == json!(true) { format!("exp({ln})") } else { plain(&v["value"]) })),
                    None => (k, v),
                })
                .collect(),
        )
    };
    emit(&args.output, &rec.render(format)?)
}

fn operators(args: OperatorsArgs) -> anyhow::Result<()> {
    let pair = SpacePair::ordered(args.alpha, args.beta)?;
    let d = dnorm2_exact(pair)?;
    let m = mnorm2_exact(pair)?;
    let reference = dnorm2_paper(pair)?;
    let mut rec = vec![
        ("alpha", json!(args.alpha)),
        ("beta", json!(args.beta)),
        ("gamma", json!(pair.gamma())),
        ("dnorm2_exact", json!(d.value)),
        ("dnorm2_attained", json!(d.attained)),
        ("mnorm2_exact", json!(m.value)),
        ("mnorm2_attained", json!(m.attained)),
        ("dnorm2_paper", json!(reference.value)),
        ("dnorm2_paper_m", json!(reference.m)),
        ("dnorm2_paper_degenerate", json!(reference.degenerate)),
    ];
    if let Some(p) = args.p {
        rec.push(("p", json!(p)));
        rec.push(("dbound_general_p", json!(dbound_general_p(pair, p)?)));
        rec.push(("dbound_grid_max", json!(dbound_grid_max(pair)?)));
    }
    if args.output.format != Some(OutFormat::Json) {
        for (_, v) in rec.iter_mut() {
            if let Value::Array(xs) = v {
                *v = json!(xs.iter().map(plain).collect::<Vec<_>>().join(" "));
            }
        }
    }
    emit(&args.output, &Record(rec).render(args.output.format.unwrap_or(OutFormat::Text))?)
}

fn example(args: ExampleArgs) -> anyhow::Result<()> {
    let params = FockParams::new(args.alpha, args.p)?;
    PosReal::new(args.s)?;
    let curve = example_curve(args.n, params, args.z, args.s, args.points, &args.quad.spec())?;
    let text = match args.output.format.unwrap_or(OutFormat::Csv) {
        OutFormat::Csv => {
            let mut s = String::from("s,I\n");
            for (x, y) in &curve {
                s.push_str(&format!("{x:?},{y:?}\n"));
            }
            s
        }
        OutFormat::Text => curve.iter().map(|(x, y)| format!("{x:?} {y:?}\n")).collect(),
        OutFormat::Json => {
            let v = json!({
                "n": args.n,
                "p": args.p,
                "alpha": args.alpha,
                "z": format_complex(args.z),
                "points": curve.iter().map(|(x, y)| json!([x, y])).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&v)? + "\n"
        }
    };
    emit(&args.output, &text)
}

fn error_record(e: &anyhow::Error) -> Value {
    let kind = e.downcast_ref::<FockError>().map_or("io", |f| f.kind());
    json!({ "error": { "kind": kind, "message": format!("{e:#}") } })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Norm(a) => norm(a).map(|()| true),
        Command::Constants(a) => constants(a).map(|()| true),
        Command::Operators(a) => operators(a).map(|()| true),
        Command::Example(a) => example(a).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", error_record(&e));
            ExitCode::from(2)
        }
    }
}

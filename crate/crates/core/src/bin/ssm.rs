use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ssm_core::cluster::{ClusterEngine, SeriesMethod};
use ssm_core::exact::{Oracle, SpinMatrix};
use ssm_core::generators::{generate_family, FamilyKind, FamilyParams};
use ssm_core::graph::{parse_graph, Graph, HardcoreBoundary, SpinBoundary};
use ssm_core::harness::{clawfree_root_check, ssm_scan, zero_scan, Rectangle, SectorCertification, SsmScanConfig};
use ssm_core::interpolation::{approx_cond_prob, ApproxOptions};
use ssm_core::io::{complex_to_json, parse_complex, parse_fields_json, parse_hardcore_boundary, parse_matrix_json, parse_spin_boundary};
use ssm_core::polymer::{barvinok_zero_check, bounded_ratio_check, hom_ratio_series, PolymerLimits};
use ssm_core::Error;

#[derive(Parser)]
#[command(name = "ssm", version, about = "Hard-core and homomorphism partition functions: exact values, series, interpolation and mixing scans")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    output: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out_file: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct GraphArg {
    /// Edge-list file, or `-` for standard input.
    #[arg(long)]
    graph: String,
}

#[derive(Subcommand)]
enum Command {
    /// Independence polynomial and Z_G(lambda).
    ExactZ {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long, default_value = "1")]
        lambda: String,
    },
    /// Taylor coefficients of P_{G,v} at lambda = 0.
    RatioSeries {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        vertex: usize,
        #[arg(long, default_value_t = 6)]
        order: usize,
        #[arg(long, default_value = "cluster")]
        method: String,
    },
    /// Pr[v in I | sigma] by truncated interpolation, with its error bound.
    ApproxProb {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        vertex: usize,
        #[arg(long)]
        boundary: Option<String>,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1e-6)]
        eps_target: f64,
        #[arg(long, default_value_t = 0.25)]
        eps_region: f64,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Measure |Pr[v|sigma] - Pr[v|tau]| against the disagreement distance.
    SsmScan {
        #[arg(long, default_value = "path")]
        family: String,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        width: usize,
        #[arg(long, default_value_t = 4)]
        height: usize,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 4)]
        max_distance: usize,
        /// Certify each gap with the sector map for this maximum degree.
        #[arg(long)]
        certify_degree: Option<usize>,
    },
    /// Count zeros of Z_G per cell of a rectangle.
    ZeroScan {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long, allow_hyphen_values = true)]
        re0: f64,
        #[arg(long, allow_hyphen_values = true)]
        re1: f64,
        #[arg(long, allow_hyphen_values = true)]
        im0: f64,
        #[arg(long, allow_hyphen_values = true)]
        im1: f64,
        #[arg(long, default_value_t = 1)]
        nx: usize,
        #[arg(long, default_value_t = 1)]
        ny: usize,
    },
    /// Roots of Z_G for a claw-free graph.
    Roots {
        #[command(flatten)]
        g: GraphArg,
    },
    /// Exact homomorphism ratio P^sigma_{G,v,i;A}(z).
    HomProb {
        #[command(flatten)]
        hom: HomArgs,
        #[arg(long, default_value = "1")]
        z: String,
    },
    /// Taylor series in z of the homomorphism ratio.
    HomSeries {
        #[command(flatten)]
        hom: HomArgs,
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// Zero-freeness and bounded-ratio checks in the delta_Delta box.
    HomCheck {
        #[command(flatten)]
        hom: HomArgs,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[arg(long, default_value_t = 0.5)]
        eta: f64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Args)]
struct HomArgs {
    #[command(flatten)]
    g: GraphArg,
    /// JSON array of rows.
    #[arg(long)]
    matrix: String,
    /// Spin boundary file ("vertex color", colors 1..=q).
    #[arg(long)]
    boundary: Option<String>,
    /// JSON object of external fields (hom-prob only).
    #[arg(long)]
    fields: Option<String>,
    #[arg(long, default_value_t = 0)]
    vertex: usize,
    /// Color, 1..=q.
    #[arg(long, default_value_t = 1)]
    color: usize,
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn read_source(path: &str) -> Result<String, Failure> {
    let mut s = String::new();
    if path == "-" {
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("reading standard input: {e}")))?;
    } else {
        s = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("reading {path}: {e}")))?;
    }
    Ok(s)
}

fn load_graph(arg: &GraphArg) -> Result<Graph, Failure> {
    Ok(parse_graph(&read_source(&arg.graph)?)?)
}

struct Report {
    json: Value,
    csv: String,
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let oracle = Oracle::default();
    Ok(match &cli.command {
        Command::ExactZ { g, lambda } => {
            let g = load_graph(g)?;
            let lambda = parse_complex(lambda)?;
            let poly = oracle.ind_poly(&g)?;
            let z = poly.eval(lambda);
            Report {
                json: json!({"lambda": complex_to_json(lambda), "z": complex_to_json(z), "coefficients": poly.coefficients}),
                csv: format!("lambda_re,lambda_im,z_re,z_im\n{},{},{},{}\n", lambda.re, lambda.im, z.re, z.im),
            }
        }
        Command::RatioSeries { g, vertex, order, method } => {
            let g = load_graph(g)?;
            let m: SeriesMethod = method.parse()?;
            let s = ClusterEngine::default().ratio_series(&g, *vertex, *order, m)?;
            let coeffs: Vec<Value> = s.coeffs().iter().map(|&c| complex_to_json(c)).collect();
            let mut csv = String::from("k,re,im\n");
            for (k, c) in s.coeffs().iter().enumerate() {
                csv += &format!("{k},{},{}\n", c.re, c.im);
            }
            Report {
                json: json!({"vertex": vertex, "order": order, "coefficients": coeffs, "method": m}),
                csv,
            }
        }
        Command::ApproxProb { g, vertex, boundary, lambda, eps_target, eps_region, samples } => {
            let g = load_graph(g)?;
            let sigma = match boundary {
                Some(p) => parse_hardcore_boundary(&read_source(p)?)?,
                None => HardcoreBoundary::new(),
            };
            let opts = ApproxOptions { samples: *samples, ..Default::default() };
            let r = approx_cond_prob(&oracle, &g, *vertex, &sigma, *lambda, *eps_target, *eps_region, &opts)?;
            Report {
                csv: format!("value,depth,error_bound,m,radius\n{},{},{},{},{}\n", r.value, r.depth, r.error_bound, r.m, r.radius),
                json: to_json(&r),
            }
        }
        Command::SsmScan { family, n, width, height, degree, count, lambda, trials, max_distance, certify_degree } => {
            let kind: FamilyKind = family.parse()?;
            let params = FamilyParams { n: *n, width: *width, height: *height, degree: *degree, count: *count };
            let graphs = generate_family(kind, &params, cli.seed)?;
            let cfg = SsmScanConfig {
                lambda: *lambda,
                trials: *trials,
                max_distance: *max_distance,
                seed: cli.seed,
                certify: certify_degree.map(|d| SectorCertification { max_degree: d, samples: 256 }),
            };
            let scan = ssm_scan(&oracle, &graphs, &cfg)?;
            let mut csv = String::from("graph_id,vertex,distance,gap\n");
            for r in &scan.records {
                csv += &format!("{},{},{},{}\n", r.graph_id, r.vertex, r.distance, r.gap);
            }
            Report { json: to_json(&scan), csv }
        }
        Command::ZeroScan { g, re0, re1, im0, im1, nx, ny } => {
            let g = load_graph(g)?;
            let rect = Rectangle { re0: *re0, im0: *im0, re1: *re1, im1: *im1 };
            let rep = zero_scan(&oracle, &g, rect, *nx, *ny)?;
            let mut csv = String::from("ix,iy,count\n");
            for (k, c) in rep.counts.iter().enumerate() {
                let cell = c.map_or("inconclusive".to_string(), |x| x.to_string());
                csv += &format!("{},{},{}\n", k % nx, k / nx, cell);
            }
            Report { json: to_json(&rep), csv }
        }
        Command::Roots { g } => {
            let g = load_graph(g)?;
            let rep = clawfree_root_check(&oracle, &g)?;
            let mut csv = String::from("re,im\n");
            for r in &rep.roots {
                csv += &format!("{},{}\n", r.re, r.im);
            }
            Report { json: to_json(&rep), csv }
        }
        Command::HomProb { hom, z } => {
            let (g, a, sigma, color) = load_hom(hom)?;
            let z = parse_complex(z)?;
            let fields = match &hom.fields {
                Some(p) => Some(parse_fields_json(&read_source(p)?, g.n(), a.q())?),
                None => None,
            };
            if sigma.contains(hom.vertex) {
                return Err(Error::InvalidBoundary(format!("vertex {} lies in the boundary domain", hom.vertex)).into());
            }
            let m = a.interpolate(z);
            let num = oracle.hom_z(&g, &m, fields.as_ref(), &sigma.extended(hom.vertex, color))?;
            let den = oracle.hom_z(&g, &m, fields.as_ref(), &sigma)?;
            let p = ssm_core::exact::checked_ratio(num, den, z)?;
            Report {
                json: json!({"vertex": hom.vertex, "color": color + 1, "z": complex_to_json(z), "value": complex_to_json(p)}),
                csv: format!("re,im\n{},{}\n", p.re, p.im),
            }
        }
        Command::HomSeries { hom, order } => {
            let (g, a, sigma, color) = load_hom(hom)?;
            let s = hom_ratio_series(&oracle, &g, hom.vertex, color, &sigma, &a, *order, &PolymerLimits::default())?;
            let coeffs: Vec<Value> = s.coeffs().iter().map(|&c| complex_to_json(c)).collect();
            let mut csv = String::from("k,re,im\n");
            for (k, c) in s.coeffs().iter().enumerate() {
                csv += &format!("{k},{},{}\n", c.re, c.im);
            }
            Report {
                json: json!({"vertex": hom.vertex, "color": color + 1, "order": order, "coefficients": coeffs}),
                csv,
            }
        }
        Command::HomCheck { hom, max_degree, eta, eps, samples } => {
            let (g, a, sigma, color) = load_hom(hom)?;
            let zero = barvinok_zero_check(&oracle, &g, &sigma, &a, *max_degree)?;
            if zero.in_box && !zero.nonzero {
                return Err(Error::Hypothesis(format!("|Z| = {:e} inside the zero-free box", zero.abs_z)).into());
            }
            let bounded = bounded_ratio_check(&oracle, &g, hom.vertex, color, &sigma, &a, *eta, *eps, *max_degree, *samples, cli.seed)?;
            if !bounded.passes {
                return Err(Error::Hypothesis(format!(
                    "|P| = {} exceeds {} at z = {}",
                    bounded.max_abs_ratio, bounded.bound, bounded.witness
                ))
                .into());
            }
            Report {
                csv: format!(
                    "abs_z,in_box,max_abs_ratio,bound,identity_residual\n{},{},{},{},{}\n",
                    zero.abs_z, zero.in_box, bounded.max_abs_ratio, bounded.bound, bounded.identity_residual
                ),
                json: json!({"zeroCheck": to_json(&zero), "boundedRatio": to_json(&bounded)}),
            }
        }
    })
}

fn load_hom(h: &HomArgs) -> Result<(Graph, SpinMatrix, SpinBoundary, usize), Failure> {
    let g = load_graph(&h.g)?;
    let a = parse_matrix_json(&read_source(&h.matrix)?)?;
    let q = a.q();
    let sigma = match &h.boundary {
        Some(p) => parse_spin_boundary(&read_source(p)?, q)?,
        None => SpinBoundary::empty(q),
    };
    if h.color == 0 || h.color > q {
        return Err(Failure::Usage(format!("--color must lie in 1..={q}")));
    }
    g.check_vertex(h.vertex)?;
    Ok((g, a, sigma, h.color - 1))
}

fn emit(cli: &Cli, report: &Report) -> Result<(), String> {
    let text = match cli.output {
        Format::Json => serde_json::to_string_pretty(&report.json).expect("json") + "\n",
        Format::Csv => report.csv.clone(),
    };
    match &cli.out_file {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("writing {}: {e}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(report) => match emit(&cli, &report) {
            Ok(()) => ExitCode::SUCCESS,
            Err(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(1)
            }
        },
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_hypothesis_violation() { 2 } else { 1 })
        }
    }
}


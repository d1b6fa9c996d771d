//! `concord` — measures of concordance and kappa-matrix compatibility from
//! the command line.
//!
//! Exit codes: 0 success, 2 domain or parse errors, 3 numerical failures.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use concord::compatibility::{
    classify_gamma_matrix, equicorrelation_thresholds, CutVerdict, EllipticVerdict, GammaClass,
    CompatibilityError,
};
use concord::concordance::{
    estimate, g_transformed_rho_monte_carlo, measure_value, ConcordanceError, Estimate,
    MeasureSpec, Method, NuMeasure,
};
use concord::copulas::{pseudo_observations, Copula, CopulaError};
use concord::distributions::{
    check_transform_pair, ConcordanceInducing, DistributionError, TransformPair, TransformVerdict,
};
use concord::io::{
    format_human, format_machine, parse_copula_spec, parse_data_csv, parse_matrix_csv,
    parse_measure_spec, parse_nu_json, parse_table_csv, resolve_g_source, resolve_nu_source,
    GSource, MeasureSource, NuSource, ParseError,
};
use concord::numerics::{NumericsError, QuadratureSpec, RandomSource};

const SEED_ENV: &str = "CONCORD_SEED";

#[derive(Parser)]
#[command(
    name = "concord",
    about = "Measures of concordance for copulas and data, and compatibility of concordance matrices",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Rounded table for people.
    Human,
    /// Deterministic key=value lines, full precision.
    Machine,
}

#[derive(Args)]
struct CommonOpts {
    /// Output format.
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
}

#[derive(Args)]
struct QuadOpts {
    /// Gauss-Legendre nodes per quadrature panel.
    #[arg(long, default_value_t = 64)]
    quad_order: usize,
    /// Uniform quadrature panels per unit interval.
    #[arg(long, default_value_t = 8)]
    quad_panels: usize,
}

impl QuadOpts {
    fn spec(&self) -> Result<QuadratureSpec, CliError> {
        QuadratureSpec::new(self.quad_order, self.quad_panels, 1e-12).map_err(CliError::from)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a measure of concordance on a parametric copula or a data file.
    Measure {
        /// Copula spec, e.g. `gaussian:-0.5` or `0.5*comonotone+0.5*independence`.
        #[arg(long, conflicts_with = "data")]
        copula: Option<String>,
        /// Data CSV (header row required); estimates the measure on
        /// pseudo-observations.
        #[arg(long, requires = "cols")]
        data: Option<String>,
        /// Two column names from the data file, e.g. `x,y`.
        #[arg(long)]
        cols: Option<String>,
        /// Measure spec: spearman | blomqvist | beta:P | gini | ggini |
        /// gtrans:uniform | gtrans:gaussian | gtrans:threepoint:P | gtrans:@table.csv
        #[arg(long)]
        spec: String,
        /// Nu-measure JSON (inline or @file) for `ggini`.
        #[arg(long)]
        nu: Option<String>,
        /// Evaluate by Monte Carlo with this many draws (parametric copulas only).
        #[arg(long)]
        mc: Option<usize>,
        /// Seed for sampling paths; CONCORD_SEED supplies a default.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        quad: QuadOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Pairwise concordance matrix of the named columns of a data file.
    Matrix {
        /// Data CSV with a header row.
        #[arg(long)]
        data: String,
        /// Comma-separated column names; defaults to every column.
        #[arg(long)]
        cols: Option<String>,
        /// Measure spec (same grammar as `measure`).
        #[arg(long)]
        spec: String,
        /// Nu-measure JSON (inline or @file) for `ggini`.
        #[arg(long)]
        nu: Option<String>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Classify a square matrix against the elliptope and cut-polytope bounds.
    Compat {
        /// Headerless CSV holding the square matrix.
        #[arg(long)]
        matrix: String,
        /// Membership tolerance band.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Decide whether a pair of tabulated transforms defines a measure of
    /// concordance.
    CheckTransform {
        /// Two-column CSV (probability node, value) for the first transform.
        #[arg(long)]
        g1: String,
        /// Two-column CSV for the second transform.
        #[arg(long)]
        g2: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Equicorrelation admissibility thresholds for dimension d.
    Thresholds {
        /// Matrix dimension (at least 2).
        #[arg(long)]
        dim: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
}

/// Error with the exit code it maps to.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn domain(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::domain(e.to_string())
    }
}

impl From<NumericsError> for CliError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::Domain(_) => CliError::domain(e.to_string()),
            _ => CliError::numerical(e.to_string()),
        }
    }
}

impl From<CopulaError> for CliError {
    fn from(e: CopulaError) -> Self {
        match e {
            CopulaError::Domain(_) => CliError::domain(e.to_string()),
            CopulaError::Numerics(inner) => inner.into(),
        }
    }
}

impl From<DistributionError> for CliError {
    fn from(e: DistributionError) -> Self {
        match e {
            DistributionError::Domain(_) => CliError::domain(e.to_string()),
            DistributionError::DegenerateTransform(_) => CliError::numerical(e.to_string()),
        }
    }
}

impl From<ConcordanceError> for CliError {
    fn from(e: ConcordanceError) -> Self {
        match e {
            ConcordanceError::Domain(_) => CliError::domain(e.to_string()),
            ConcordanceError::Degenerate(_) => CliError::numerical(e.to_string()),
            ConcordanceError::Numerics(inner) => inner.into(),
            ConcordanceError::Copula(inner) => inner.into(),
            ConcordanceError::Distribution(inner) => inner.into(),
        }
    }
}

impl From<CompatibilityError> for CliError {
    fn from(e: CompatibilityError) -> Self {
        match e {
            CompatibilityError::Domain(_) | CompatibilityError::Capacity(_) => {
                CliError::domain(e.to_string())
            }
            CompatibilityError::Numerics(inner) => inner.into(),
            CompatibilityError::Copula(inner) => inner.into(),
            CompatibilityError::Concordance(inner) => inner.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn read_file(path: &str) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::domain(format!("cannot read `{path}`: {e}")))
}

fn load_for_io(path: &str) -> Result<Vec<u8>, String> {
    fs::read(path).map_err(|e| format!("cannot read `{path}`: {e}"))
}

/// Resolve `--nu` (inline JSON or @file) into a measure.
fn resolve_nu(arg: Option<&str>) -> Result<Option<NuMeasure>, CliError> {
    let Some(arg) = arg else { return Ok(None) };
    let text = if let Some(path) = arg.strip_prefix('@') {
        String::from_utf8(read_file(path)?)
            .map_err(|_| CliError::domain(format!("`{path}` is not valid UTF-8")))?
    } else {
        arg.to_string()
    };
    let source: NuSource = parse_nu_json(&text)?;
    Ok(Some(resolve_nu_source(&source, load_for_io)?))
}

fn build_measure_spec(spec: &str, nu: Option<&str>) -> Result<MeasureSpec, CliError> {
    let parsed = parse_measure_spec(spec)?;
    Ok(match parsed {
        MeasureSource::Spearman => MeasureSpec::Spearman,
        MeasureSource::Blomqvist => MeasureSpec::Blomqvist,
        MeasureSource::BetaP(p) => MeasureSpec::BetaP(p),
        MeasureSource::Gini => MeasureSpec::Gini,
        MeasureSource::GeneralizedGini => {
            let nu = resolve_nu(nu)?.ok_or_else(|| {
                CliError::domain("spec `ggini` needs a nu-measure: pass --nu JSON or --nu @file")
            })?;
            MeasureSpec::GeneralizedGini(nu)
        }
        MeasureSource::GTransformed(source) => {
            MeasureSpec::GTransformed(resolve_g(&source)?)
        }
    })
}

fn resolve_g(source: &GSource) -> Result<ConcordanceInducing, CliError> {
    resolve_g_source(source, load_for_io).map_err(CliError::from)
}

fn seed_from(arg: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = arg {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text.parse::<u64>().map_err(|_| {
            CliError::domain(format!("{SEED_ENV}=`{text}` is not a 64-bit unsigned seed"))
        }),
        Err(_) => Err(CliError::domain(format!(
            "sampling requires a seed: pass --seed or set {SEED_ENV}"
        ))),
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::ClosedForm => "closed-form",
        Method::Quadrature => "quadrature",
        Method::PlugIn => "plug-in",
        Method::MonteCarlo => "monte-carlo",
    }
}

fn print_estimate(label: &str, est: &Estimate, format: Format) {
    match format {
        Format::Machine => {
            println!("command=measure");
            println!("spec={label}");
            println!("value={}", format_machine(est.value));
            if let Some(se) = est.std_error {
                println!("std_error={}", format_machine(se));
            }
            if let Some(n) = est.n {
                println!("n={n}");
            }
            println!("method={}", method_name(est.method));
        }
        Format::Human => {
            let mut line = format!("{label} = {}", format_human(est.value));
            if let Some(se) = est.std_error {
                line.push_str(&format!(" (std error {})", format_human(se)));
            }
            line.push_str(&format!(" [{}]", method_name(est.method)));
            println!("{line}");
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Measure {
            copula,
            data,
            cols,
            spec,
            nu,
            mc,
            seed,
            quad,
            common,
        } => {
            let measure = build_measure_spec(&spec, nu.as_deref())?;
            let qspec = quad.spec()?;
            let est = match (&copula, &data) {
                (Some(copula_spec), None) => {
                    let c = parse_copula_spec(copula_spec)?;
                    match mc {
                        None => measure_value(&c, &measure, &qspec)?,
                        Some(n) => {
                            let seed = seed_from(seed)?;
                            monte_carlo_measure(&c, &measure, n, &RandomSource::new(seed))?
                        }
                    }
                }
                (None, Some(path)) => {
                    if mc.is_some() {
                        return Err(CliError::domain(
                            "--mc applies to parametric copulas; data files use the plug-in path",
                        ));
                    }
                    let table = parse_data_csv(&read_file(path)?)?;
                    let names = cols.as_deref().ok_or_else(|| {
                        CliError::domain("--data needs --cols with two column names")
                    })?;
                    let pair = split_two_cols(names)?;
                    let xs = table.column(pair.0)?;
                    let ys = table.column(pair.1)?;
                    let data: Vec<(f64, f64)> =
                        xs.iter().copied().zip(ys.iter().copied()).collect();
                    let emp = match pseudo_observations(&data)? {
                        Copula::Empirical(e) => e,
                        _ => unreachable!(),
                    };
                    estimate(&emp, &measure)?
                }
                _ => {
                    return Err(CliError::domain(
                        "measure needs exactly one of --copula or --data",
                    ))
                }
            };
            print_estimate(&spec, &est, common.format);
            Ok(())
        }
        Command::Matrix {
            data,
            cols,
            spec,
            nu,
            common,
        } => {
            let measure = build_measure_spec(&spec, nu.as_deref())?;
            let table = parse_data_csv(&read_file(&data)?)?;
            let names: Vec<String> = match cols {
                Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
                None => table.headers.clone(),
            };
            if names.len() < 2 {
                return Err(CliError::domain("matrix needs at least two columns"));
            }
            let columns: Vec<&[f64]> = names
                .iter()
                .map(|n| table.column(n))
                .collect::<Result<_, _>>()?;
            let d = columns.len();
            let mut values = vec![1.0f64; d * d];
            for i in 0..d {
                for j in (i + 1)..d {
                    let pairs: Vec<(f64, f64)> = columns[i]
                        .iter()
                        .copied()
                        .zip(columns[j].iter().copied())
                        .collect();
                    let emp = match pseudo_observations(&pairs)? {
                        Copula::Empirical(e) => e,
                        _ => unreachable!(),
                    };
                    let est = estimate(&emp, &measure)?;
                    values[i * d + j] = est.value;
                    values[j * d + i] = est.value;
                }
            }
            match common.format {
                Format::Machine => {
                    for i in 0..d {
                        let row: Vec<String> = (0..d)
                            .map(|j| format_machine(values[i * d + j]))
                            .collect();
                        println!("{}", row.join(","));
                    }
                }
                Format::Human => {
                    println!("columns: {}", names.join(", "));
                    for i in 0..d {
                        let row: Vec<String> =
                            (0..d).map(|j| format_human(values[i * d + j])).collect();
                        println!("{}", row.join("  "));
                    }
                }
            }
            Ok(())
        }
        Command::Compat {
            matrix,
            tol,
            common,
        } => {
            if !(tol > 0.0) {
                return Err(CliError::domain(format!(
                    "tolerance must be positive, got {tol}"
                )));
            }
            let p = parse_matrix_csv(&read_file(&matrix)?)?;
            let verdict = classify_gamma_matrix(&p)?;
            let class = match verdict.gamma_class {
                GammaClass::Compatible => "Compatible",
                GammaClass::Incompatible => "Incompatible",
                GammaClass::Indeterminate => "Indeterminate",
            };
            let (ell_name, ell_eig) = match &verdict.elliptope {
                EllipticVerdict::Member { min_eigenvalue } => ("member", *min_eigenvalue),
                EllipticVerdict::NonMember { min_eigenvalue } => ("nonmember", *min_eigenvalue),
                EllipticVerdict::Boundary { min_eigenvalue } => ("boundary", *min_eigenvalue),
            };
            match common.format {
                Format::Machine => {
                    println!("command=compat");
                    println!("gamma_class={}", class.to_lowercase());
                    println!("elliptope={ell_name}");
                    println!("elliptope_min_eigenvalue={}", format_machine(ell_eig));
                    match &verdict.cut_polytope {
                        CutVerdict::Member(cert) => {
                            println!("cut_polytope=member");
                            println!("certificate_size={}", cert.weights.len());
                            for (idx, (b, w)) in cert.weights.iter().enumerate() {
                                let bits: String = b
                                    .bits()
                                    .iter()
                                    .map(|&x| if x { '1' } else { '0' })
                                    .collect();
                                println!("certificate_{idx}_b={bits}");
                                println!("certificate_{idx}_weight={}", format_machine(*w));
                            }
                        }
                        CutVerdict::NonMember => println!("cut_polytope=nonmember"),
                        CutVerdict::Boundary => println!("cut_polytope=boundary"),
                    }
                    if let Some(note) = &verdict.note {
                        println!("note={note}");
                    }
                }
                Format::Human => {
                    println!("{class}");
                    println!(
                        "  elliptope: {ell_name} (min eigenvalue {})",
                        format_human(ell_eig)
                    );
                    match &verdict.cut_polytope {
                        CutVerdict::Member(cert) => {
                            println!(
                                "  cut polytope: member ({} vertex weights)",
                                cert.weights.len()
                            );
                            for (b, w) in &cert.weights {
                                let bits: String = b
                                    .bits()
                                    .iter()
                                    .map(|&x| if x { '1' } else { '0' })
                                    .collect();
                                println!("    b={bits}  weight={}", format_human(*w));
                            }
                        }
                        CutVerdict::NonMember => println!("  cut polytope: nonmember"),
                        CutVerdict::Boundary => println!("  cut polytope: boundary"),
                    }
                    if let Some(note) = &verdict.note {
                        println!("  note: {note}");
                    }
                }
            }
            Ok(())
        }
        Command::CheckTransform { g1, g2, common } => {
            let t1 = parse_table_csv(&read_file(&g1)?)?;
            let t2 = parse_table_csv(&read_file(&g2)?)?;
            let pair = TransformPair::from_tables(&t1, &t2)?;
            let verdict = check_transform_pair(&pair)?;
            let (name, induced) = match &verdict {
                TransformVerdict::IsMeasureOfConcordance(g) => {
                    ("is_measure_of_concordance", Some(describe_g(g)))
                }
                TransformVerdict::NotMonotone => ("not_monotone", None),
                TransformVerdict::DistributionsDiffer => ("distributions_differ", None),
                TransformVerdict::NotSymmetric => ("not_symmetric", None),
            };
            match common.format {
                Format::Machine => {
                    println!("command=check-transform");
                    println!("verdict={name}");
                    if let Some(induced) = induced {
                        println!("induced={induced}");
                    }
                }
                Format::Human => match induced {
                    Some(induced) => println!(
                        "measure of concordance (induced distribution: {induced})"
                    ),
                    None => println!("not a measure of concordance: {name}"),
                },
            }
            Ok(())
        }
        Command::Thresholds { dim, common } => {
            let (elliptope_min, cut_min) = equicorrelation_thresholds(dim)?;
            match common.format {
                Format::Machine => {
                    println!("command=thresholds");
                    println!("dim={dim}");
                    println!("elliptope_min={}", format_machine(elliptope_min));
                    match cut_min {
                        Some(v) => println!("cut_polytope_min={}", format_machine(v)),
                        None => println!("cut_polytope_min=unavailable"),
                    }
                }
                Format::Human => {
                    println!("equicorrelation thresholds for d = {dim}:");
                    println!("  elliptope:    rho >= {}", format_human(elliptope_min));
                    match cut_min {
                        Some(v) => println!("  cut polytope: rho >= {}", format_human(v)),
                        None => println!("  cut polytope: unavailable for d > 16"),
                    }
                }
            }
            Ok(())
        }
    }
}

fn split_two_cols(names: &str) -> Result<(&str, &str), CliError> {
    let parts: Vec<&str> = names.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(CliError::domain(format!(
            "--cols needs exactly two comma-separated names, got `{names}`"
        )));
    }
    Ok((parts[0], parts[1]))
}

fn describe_g(g: &ConcordanceInducing) -> String {
    match g {
        ConcordanceInducing::Uniform01 => "uniform".into(),
        ConcordanceInducing::StandardGaussian => "gaussian".into(),
        ConcordanceInducing::ThreePoint { p } => format!("threepoint:{p}"),
        ConcordanceInducing::Tabulated(_) => "tabulated".into(),
    }
}

/// Monte Carlo route for parametric copulas: transformed-rank correlation
/// sampling for the correlation-type measures, and the nu-mixture of
/// three-point correlations for the Gini family.
fn monte_carlo_measure(
    c: &Copula,
    spec: &MeasureSpec,
    n: usize,
    source: &RandomSource,
) -> Result<Estimate, CliError> {
    let g = match spec {
        MeasureSpec::Spearman => ConcordanceInducing::Uniform01,
        MeasureSpec::Blomqvist => ConcordanceInducing::three_point(0.5).expect("valid"),
        MeasureSpec::BetaP(p) => {
            ConcordanceInducing::three_point(*p).map_err(CliError::from)?
        }
        MeasureSpec::GTransformed(g) => g.clone(),
        MeasureSpec::Gini | MeasureSpec::GeneralizedGini(_) => {
            // Sample the copula once and run the plug-in estimator.
            let pairs = c.sample(n, source).map_err(CliError::from)?;
            let emp = match pseudo_observations(&pairs).map_err(CliError::from)? {
                Copula::Empirical(e) => e,
                _ => unreachable!(),
            };
            let mut est = estimate(&emp, spec).map_err(CliError::from)?;
            est.method = Method::MonteCarlo;
            return Ok(est);
        }
    };
    g_transformed_rho_monte_carlo(c, &g, n, source).map_err(CliError::from)
}

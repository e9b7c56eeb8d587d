use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rclb_core::bound::imaginary_soundness;
use rclb_core::dirichlet::{asymptotic_fit, Exponent, FitModel};
use rclb_core::family::{a4_grid, count_a4, cubic_base, enumerate_quadratic, FamilyTag, GammaRule};
use rclb_core::permgroup::{a4_ramification_table, cohomology_dim, named_group, named_module};
use rclb_core::quadforms::{class_group, reduced_forms, QuadDisc, MAX_CLASS_GROUP_DISC};
use rclb_core::stats::{self, fmt_float, Command as RunCommand, ExperimentConfig};
use rclb_core::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "rclb", version, about = "Class group rank bounds and field-counting experiments")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Directory for cached prime tables.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Output file, or output directory for report commands.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// JSON experiment config; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Tame ramification of a rational prime in the A4 tower K3 ⊂ K6 ⊂ K12.
    Table1,
    /// Dimension of H^n(G, M) over F2.
    Cohom {
        /// `C<n>` or `A4`.
        #[arg(long)]
        group: String,
        /// `trivial`, `perm` or `klein-twist`.
        #[arg(long)]
        module: String,
        #[arg(long)]
        degree: u32,
    },
    /// CSV of quadratic fields with C < limit.
    QuadEnum {
        #[arg(long)]
        limit: u64,
    },
    /// Class group of an imaginary quadratic field.
    ClassGroup {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
    },
    /// Compare the ramification lower bound with exact 2-ranks for
    /// fundamental d in [-limit, -3].
    BoundCheck {
        #[arg(long)]
        limit: u64,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        l: u32,
    },
    /// Count a family on a grid and write estimates, fits and verdicts.
    CountFamily(RunArgs),
    /// Number of A4 fields over a cyclic cubic base with C < limit.
    A4Count {
        #[arg(long)]
        conductor: u64,
        #[arg(long)]
        limit: u64,
        #[arg(long)]
        gamma_max: Option<usize>,
    },
    /// Fit a·X^α(log X)^b(log log X)^c to a column of a CSV file.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Column holding the counts.
        #[arg(long, default_value = "N")]
        column: String,
        /// `free` or a fixed value.
        #[arg(long, default_value = "free")]
        alpha: String,
        #[arg(long, default_value = "free")]
        b: String,
        #[arg(long, default_value = "0")]
        c: String,
    },
    /// Moment estimate of |Hom(Cl, C2)| over imaginary quadratic fields.
    Moments(RunArgs),
    /// Exactly-γ subfamily ratios.
    Hypothesis(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    family: Option<FamilyTag>,
    #[arg(long)]
    limit: Option<u64>,
    #[arg(long)]
    grid_decades: Option<u32>,
    #[arg(long)]
    conductor: Option<u64>,
    #[arg(long)]
    gamma_max: Option<usize>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    l: Option<u32>,
    /// Comma-separated rank thresholds.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    r: Option<Vec<i64>>,
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
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rclb: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(w) = cli.workers {
            if w == 0 {
                return Err(Error::Config("--workers must be positive".into()));
            }
            b = b.num_threads(w);
        }
        b.build().map_err(|e| Error::Config(e.to_string()))?
    };
    pool.install(|| match &cli.command {
        Cmd::Table1 => emit(&cli.output, &table1()?),
        Cmd::Cohom { group, module, degree } => {
            let g = named_group(group)?;
            let m = named_module(&g, module)?;
            let d = cohomology_dim(&g, &m, *degree)?;
            emit(
                &cli.output,
                &format!(
                    "dim H = {}\ncocycles = {}\ncoboundaries = {}\n",
                    d.cohomology, d.cocycles, d.coboundaries
                ),
            )
        }
        Cmd::QuadEnum { limit } => emit(&cli.output, &quad_enum(*limit)?),
        Cmd::ClassGroup { disc } => emit(&cli.output, &class_group_text(*disc)?),
        Cmd::BoundCheck { limit, p, l } => bound_check(&cli.output, *limit, *p, *l),
        Cmd::CountFamily(a) => run_report(&cli, RunCommand::CountFamily, a),
        Cmd::Moments(a) => run_report(&cli, RunCommand::Moments, a),
        Cmd::Hypothesis(a) => run_report(&cli, RunCommand::Hypothesis, a),
        Cmd::A4Count { conductor, limit, gamma_max } => emit(&cli.output, &a4_count(*conductor, *limit, *gamma_max)?),
        Cmd::Fit { input, column, alpha, b, c } => {
            let model = FitModel { alpha: exponent(alpha)?, b: exponent(b)?, c: exponent(c)? };
            emit(&cli.output, &fit_file(input, column, model)?)
        }
    })
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, text)?;
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn table1() -> Result<String> {
    let mut s = String::from("I_p | G_p | K3 | K6 | K12\n");
    for row in a4_ramification_table()? {
        writeln!(
            s,
            "{} | {} | {} | {} | {}",
            row.inertia, row.decomposition, row.cubic, row.sextic, row.closure
        )
        .unwrap();
    }
    Ok(s)
}

fn quad_enum(limit: u64) -> Result<String> {
    let mut s = String::from("d,disc,C,omega,rk2,h,group\n");
    for rec in enumerate_quadratic(limit, &GammaRule::default())? {
        let disc = rec.disc.expect("quadratic records carry a discriminant");
        let d = if disc % 4 == 0 { disc / 4 } else { disc };
        let (rk, h, group) = match rec.rank {
            Some(r) if disc.unsigned_abs() <= MAX_CLASS_GROUP_DISC => {
                let cl = class_group(QuadDisc::new(disc)?)?;
                (r.value.to_string(), cl.order().to_string(), cl.to_string())
            }
            Some(r) => (r.value.to_string(), String::new(), String::new()),
            None => Default::default(),
        };
        writeln!(s, "{d},{disc},{},{},{rk},{h},{group}", rec.c, rec.support.len()).unwrap();
    }
    Ok(s)
}

fn class_group_text(disc: i64) -> Result<String> {
    let d = QuadDisc::new(disc)?;
    let cl = class_group(d)?;
    let forms: Vec<String> = reduced_forms(disc).iter().map(|f| f.to_string()).collect();
    Ok(format!(
        "Cl({disc}) = {cl}\nh = {}\nrk2 = {}\nforms = {}\n",
        cl.order(),
        cl.rank_p(2)?,
        forms.join(" ")
    ))
}

fn bound_check(output: &Option<PathBuf>, limit: u64, p: u64, l: u32) -> Result<()> {
    if p != 2 {
        return Err(Error::Unsupported("exact ranks are available for p = 2 only".into()));
    }
    let s = imaginary_soundness(limit, l)?;
    let mut text = format!("checked {} fundamental discriminants in [-{limit}, -3]\n", s.checked);
    if let Some((d, bound, rk)) = s.tightest {
        writeln!(text, "largest bound {bound} at d = {d} (rk2 = {rk})").unwrap();
    }
    writeln!(text, "violations {}", s.violations.len()).unwrap();
    for d in &s.violations {
        writeln!(text, "violation d = {d}").unwrap();
    }
    emit(output, &text)?;
    if s.violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Consistency(format!("{} bound violations", s.violations.len())))
    }
}

fn run_report(cli: &Cli, command: RunCommand, a: &RunArgs) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let mut c = ExperimentConfig::from_file(path)?;
            c.command = command;
            c
        }
        None => {
            let family = match command {
                RunCommand::Moments => a.family.unwrap_or(FamilyTag::Quadratic),
                _ => a.family.ok_or_else(|| Error::Config("--family or --config is required".into()))?,
            };
            let limit = a.limit.ok_or_else(|| Error::Config("--limit or --config is required".into()))?;
            ExperimentConfig::new(command, family, limit)
        }
    };
    if let Some(f) = a.family {
        cfg.family = f;
    }
    if let Some(x) = a.limit {
        cfg.limit = x;
    }
    if let Some(d) = a.grid_decades {
        cfg.grid_decades = d;
    }
    if let Some(f) = a.conductor {
        cfg.base_conductor = Some(f);
    }
    if let Some(g) = a.gamma_max {
        cfg.gamma_max = g;
    }
    if let Some(p) = a.p {
        cfg.p = p;
    }
    if let Some(l) = a.l {
        cfg.l = l;
    }
    if let Some(r) = &a.r {
        cfg.r = r.clone();
    }
    if cli.workers.is_some() {
        cfg.workers = cli.workers;
    }
    if cli.output.is_some() {
        cfg.output = cli.output.clone();
    }
    if cli.cache_dir.is_some() {
        cfg.cache_dir = cli.cache_dir.clone();
    }
    cfg.validate()?;
    let (report, files) = stats::run(&cfg)?;
    print!("{}", report.verdict);
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn a4_count(conductor: u64, limit: u64, gamma_max: Option<usize>) -> Result<String> {
    let base = cubic_base(conductor)?;
    let gm = gamma_max.or(base.class_number_one.then_some(6));
    let counts = if limit < 2 { count_a4(&base, limit, gm)? } else { a4_grid(&base, &[limit], gm)? };
    let mut s = format!("total {}\n", counts.total[0]);
    if gm.is_some() {
        for (g, v) in counts.by_gamma.iter().enumerate() {
            writeln!(s, "gamma {g} {}", v[0]).unwrap();
        }
    }
    Ok(s)
}

fn exponent(s: &str) -> Result<Exponent> {
    if s == "free" {
        return Ok(Exponent::Free);
    }
    s.parse()
        .map(Exponent::Fixed)
        .map_err(|_| Error::Config(format!("exponent {s:?} is neither \"free\" nor a number")))
}

fn fit_file(path: &Path, column: &str, model: FitModel) -> Result<String> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| Error::Config(format!("{} has no column {name:?}", path.display())))
    };
    let (ix, iy) = (find("X")?, find(column)?);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let cells: Vec<&str> = line.split(',').collect();
        let num = |i: usize| -> Result<f64> {
            cells
                .get(i)
                .and_then(|c| c.trim().parse().ok())
                .ok_or_else(|| Error::Config(format!("line {}: bad number", n + 2)))
        };
        xs.push(num(ix)?);
        ys.push(num(iy)?);
    }
    let f = asymptotic_fit(&xs, &ys, model)?;
    Ok(format!(
        "model,amplitude,alpha,b,c,max_rel_residual,points,x_min,x_max\n{},{},{},{},{},{},{},{},{}\n",
        f.model.describe(),
        fmt_float(f.shape.amplitude),
        fmt_float(f.shape.alpha),
        fmt_float(f.shape.b),
        fmt_float(f.shape.c),
        fmt_float(f.max_rel_residual),
        f.points,
        fmt_float(f.x_min),
        fmt_float(f.x_max)
    ))
}

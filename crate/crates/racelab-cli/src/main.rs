//! Command-line laboratory for prime-race limiting distributions.
//!
//! Subcommands: `chars`, `zeros ingest|synth|compute|stats`, `cov`,
//! `density`, `tail`, `race`, `saddle`, `report`, `empirical`. All artifacts
//! are deterministic for a fixed configuration and seed; floats carry 17
//! significant digits. Exit codes: 2 configuration error, 3 data error,
//! 4 convergence error.

mod artifacts;

use artifacts::{cnum, Csv, JsonObj};
use clap::{Args, Parser, Subcommand};
use racelab_core::modchar::{build_modulus, character_group, CharacterGroup, Modulus};
use racelab_core::randmodel::{GridSpec, Norm, RaceModel, TailEstimate};
use racelab_core::zerodata::{
    count_zeros, ingest_zeros, nq_model, synth_zeros, variance_vq, write_zeros, Provenance,
    ZeroSet,
};
use racelab_core::{empirical, gaussmodel, lfzeros, tailbounds};
use racelab_core::{Error, ErrorClass};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "racelab", version, about = "prime number race distribution laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Where zero ordinates come from: a canonical file, `synth:<T>:<seed>`, or
/// `compute:<T>`.
#[derive(Clone, Debug)]
enum ZeroSource {
    File(PathBuf),
    Synth { t: f64, seed: u64 },
    Compute { t: f64 },
}

impl std::str::FromStr for ZeroSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(rest) = s.strip_prefix("synth:") {
            let mut it = rest.split(':');
            let t = it
                .next()
                .and_then(|x| x.parse().ok())
                .ok_or("synth:<T>:<seed> needs a numeric T")?;
            let seed = it
                .next()
                .and_then(|x| x.parse().ok())
                .ok_or("synth:<T>:<seed> needs an integer seed")?;
            return Ok(ZeroSource::Synth { t, seed });
        }
        if let Some(rest) = s.strip_prefix("compute:") {
            let t = rest.parse().map_err(|_| "compute:<T> needs a numeric T")?;
            return Ok(ZeroSource::Compute { t });
        }
        Ok(ZeroSource::File(PathBuf::from(s)))
    }
}

#[derive(Args)]
struct ModelArgs {
    /// Modulus q >= 3
    #[arg(long)]
    q: u64,
    /// Comma-separated residues a1,a2,...
    #[arg(long, value_delimiter = ',')]
    residues: Vec<u64>,
    /// Zero source: <path> | synth:<T>:<seed> | compute:<T>
    #[arg(long)]
    zeros: ZeroSource,
    /// Tolerance for computed zeros
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Character table (CSV) and the conductor-log identity report (JSON)
    Chars {
        #[arg(long)]
        q: u64,
        /// Write the value table here (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zero-set handling
    Zeros {
        #[command(subcommand)]
        action: ZerosCmd,
    },
    /// Covariance structure C, V_q, B matrix as JSON
    Cov {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One-dimensional density by Fourier inversion (CSV grid)
    Density {
        #[command(flatten)]
        model: ModelArgs,
        /// Residue whose marginal is inverted (defaults to the first)
        #[arg(long)]
        a: Option<u64>,
        #[arg(long, default_value_t = 401)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tail comparison at one deviation: MC, tilted, bounds, deep formula
    Tail {
        #[command(flatten)]
        model: ModelArgs,
        /// Deviation V (absolute scale)
        #[arg(long, visible_alias = "V", conflicts_with = "lambda")]
        v: Option<f64>,
        /// Deviation as lambda: V = lambda sqrt(V_q)
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ordering densities mu(x_{s(1)} > ... > x_{s(r)}) for all orderings
    Race {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Saddle-point context for a deviation V (JSON)
    Saddle {
        #[arg(long)]
        q: u64,
        #[arg(long, visible_alias = "V")]
        v: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regime sweep over a V grid: gaussian, corrected, MC, bounds, deep
    Report {
        #[command(flatten)]
        model: ModelArgs,
        /// V grid as lo:hi:count
        #[arg(long)]
        v_grid: String,
        #[arg(long, default_value_t = 20_000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Prime-counting harness
    Empirical {
        #[command(subcommand)]
        action: EmpiricalCmd,
    },
}

#[derive(Subcommand)]
enum ZerosCmd {
    /// Validate and re-emit a canonical zero file
    Ingest {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic zero set
    Synth {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute critical-line zeros directly (q <= 50, T <= 2000)
    Compute {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summary statistics of a zero set (JSON)
    Stats {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        zeros: ZeroSource,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum EmpiricalCmd {
    /// E(x; q, a) vectors at logarithmic checkpoints (CSV)
    Evector {
        #[arg(long)]
        q: u64,
        #[arg(long, value_delimiter = ',')]
        residues: Vec<u64>,
        #[arg(long, default_value_t = 10_000_000)]
        x_max: u64,
        #[arg(long, default_value_t = 10_000)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Logarithmic density of the strict race ordering
    Race {
        #[arg(long)]
        q: u64,
        #[arg(long, value_delimiter = ',')]
        residues: Vec<u64>,
        #[arg(long, default_value_t = 10_000_000)]
        x_max: u64,
        #[arg(long, default_value_t = 10_000)]
        points: usize,
        /// Tie policy: half-weight (default) or strict
        #[arg(long, default_value = "half")]
        ties: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e.class() {
                ErrorClass::Config => ExitCode::from(2),
                ErrorClass::Data => ExitCode::from(3),
                ErrorClass::Convergence => ExitCode::from(4),
            }
        }
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(Error::Io),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os("RACE_LAB_CACHE").map(PathBuf::from)
}

/// Materialize a zero source (consulting the cache for computed sets).
fn load_zeros(group: &CharacterGroup, src: &ZeroSource, tol: f64) -> Result<ZeroSet, Error> {
    match src {
        ZeroSource::File(path) => ingest_zeros(path, group),
        ZeroSource::Synth { t, seed } => synth_zeros(group, *t, *seed),
        ZeroSource::Compute { t } => {
            let q = group.modulus().q();
            let cache_path = cache_dir().map(|d| d.join(format!("zeros-q{q}-t{t}.txt")));
            if let Some(p) = &cache_path {
                if p.exists() {
                    return ingest_zeros(p, group);
                }
            }
            let zs = lfzeros::bulk_zeros(group, *t, tol)?;
            if let Some(p) = &cache_path {
                if let Some(dir) = p.parent() {
                    std::fs::create_dir_all(dir)?;
                }
                write_zeros(&zs, p)?;
            }
            Ok(zs)
        }
    }
}

fn setup(q: u64) -> Result<(Modulus, CharacterGroup), Error> {
    let m = build_modulus(q)?;
    let g = character_group(&m)?;
    Ok((m, g))
}

fn tail_json(o: &mut JsonObj, key_prefix: &str, t: &TailEstimate) {
    o.num(&format!("{key_prefix}_p"), t.probability);
    o.num(
        &format!("{key_prefix}_log_p"),
        t.log_probability.unwrap_or(f64::NEG_INFINITY),
    );
    o.num(&format!("{key_prefix}_se"), t.std_error);
    o.num(&format!("{key_prefix}_ci_lo"), t.ci95.0);
    o.num(&format!("{key_prefix}_ci_hi"), t.ci95.1);
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.cmd {
        Cmd::Chars { q, out } => {
            let (m, g) = setup(q)?;
            let mut csv = Csv::new(&["conrey_index", "n", "value_re", "value_im"]);
            for chi in g.characters() {
                for n in 0..q {
                    let v = chi.eval_c64(n);
                    csv.row(&[
                        chi.conrey_index().to_string(),
                        n.to_string(),
                        cnum(v.re),
                        cnum(v.im),
                    ]);
                }
            }
            emit(&out, &csv.finish())?;
            let (lhs, rhs) = racelab_core::modchar::conductor_log_identity(&m, &g)?;
            let mut o = JsonObj::with_schema();
            o.str("artifact", "conductor-log-identity")
                .uint("q", q)
                .uint("phi", m.totient())
                .num("lhs_sum_log_conductors", lhs)
                .num("rhs_phi_logq_minus_primes", rhs)
                .num("abs_difference", (lhs - rhs).abs());
            println!("{}", o.finish().trim_end());
            Ok(())
        }
        Cmd::Zeros { action } => zeros_cmd(action),
        Cmd::Cov { model, out } => {
            let (_, g) = setup(model.q)?;
            let zs = load_zeros(&g, &model.zeros, model.tol)?;
            let cov = racelab_core::zerodata::covariance_data(&zs, &g, &model.residues)?;
            let mut o = JsonObj::with_schema();
            o.str("artifact", "covariance")
                .uint("q", model.q)
                .uint_array("residues", &cov.residues)
                .int_array("c_vector", &cov.c_vector)
                .num("variance", cov.variance)
                .num_array("b_matrix", &cov.b_matrix)
                .uint("zeros", zs.total_count() as u64)
                .num("horizon", zs.horizon_min());
            emit(&out, &o.finish())
        }
        Cmd::Density {
            model,
            a,
            points,
            out,
        } => {
            let (_, g) = setup(model.q)?;
            let zs = load_zeros(&g, &model.zeros, model.tol)?;
            let rm = RaceModel::new(&g, &zs, &model.residues)?;
            let a = a.unwrap_or(model.residues[0]);
            let grid = rm.density_1d(
                a,
                &GridSpec {
                    n_points: points,
                    range: None,
                },
            )?;
            let mut csv = Csv::new(&["x", "density"]);
            for (x, d) in grid.points.iter().zip(&grid.density) {
                csv.row(&[cnum(*x), cnum(*d)]);
            }
            emit(&out, &csv.finish())
        }
        Cmd::Tail {
            model,
            v,
            lambda,
            n,
            seed,
            format,
            out,
        } => {
            let (m, g) = setup(model.q)?;
            let zs = load_zeros(&g, &model.zeros, model.tol)?;
            let rm = RaceModel::new(&g, &zs, &model.residues)?;
            let v = match (v, lambda) {
                (Some(v), None) => v,
                (None, Some(l)) => l * variance_vq(&zs, false).value.sqrt(),
                _ => {
                    return Err(Error::RandModel(
                        "tail needs exactly one of --v / --V or --lambda".into(),
                    ))
                }
            };
            let mc = rm.mc_tail(v, n, seed, Norm::Euclidean)?;
            let tilted = rm.tilted_tail(v, n, seed + 1).ok();
            let (mo_up, mo_t) = tailbounds::mo_upper(&zs, v)?;
            let t4 = tailbounds::deep_tail(&m, v)?;
            let envelope = tailbounds::regime_envelopes(&zs, &m, v, model.residues.len() as u32)?;
            match format {
                Format::Json => {
                    let mut o = JsonObj::with_schema();
                    o.str("artifact", "tail-comparison")
                        .uint("q", model.q)
                        .uint_array("residues", &model.residues)
                        .num("v", v)
                        .uint("n", n as u64)
                        .uint("seed", seed);
                    tail_json(&mut o, "mc", &mc);
                    o.num("mc_max_norm_p", mc.other_norm_probability.unwrap_or(f64::NAN));
                    if let Some(t) = &tilted {
                        tail_json(&mut o, "tilted", t);
                        if let Some(info) = &t.tilt {
                            o.num("tilt_s", info.s)
                                .num("tilt_log_laplace", info.log_laplace)
                                .num("tilt_efficiency", info.rejection_efficiency);
                        }
                    }
                    o.num("mo_upper", mo_up)
                        .num("mo_upper_log", mo_up.ln())
                        .num("mo_t_used", mo_t)
                        .str("regime", &format!("{:?}", envelope.regime).to_lowercase())
                        .num("envelope_upper", envelope.upper)
                        .num("envelope_lower", envelope.lower)
                        .num("deep_log_tail", t4.log_tail)
                        .num("deep_log_neg_log", t4.log_neg_log)
                        .num("deep_error_factor", t4.error_factor)
                        .num("variance_deficit", mc.variance_deficit);
                    emit(&out, &o.finish())
                }
                Format::Csv => {
                    let mut csv = Csv::new(&[
                        "v",
                        "mc_p",
                        "mc_se",
                        "tilted_p",
                        "tilted_log_p",
                        "mo_upper",
                        "deep_log_tail",
                    ]);
                    csv.row(&[
                        cnum(v),
                        cnum(mc.probability),
                        cnum(mc.std_error),
                        cnum(tilted.as_ref().map_or(f64::NAN, |t| t.probability)),
                        cnum(
                            tilted
                                .as_ref()
                                .and_then(|t| t.log_probability)
                                .unwrap_or(f64::NEG_INFINITY),
                        ),
                        cnum(mo_up),
                        cnum(t4.log_tail),
                    ]);
                    emit(&out, &csv.finish())
                }
            }
        }
        Cmd::Race {
            model,
            n,
            seed,
            out,
        } => {
            let (_, g) = setup(model.q)?;
            let zs = load_zeros(&g, &model.zeros, model.tol)?;
            let rm = RaceModel::new(&g, &zs, &model.residues)?;
            let r = model.residues.len();
            if r > 5 {
                return Err(Error::RandModel(format!(
                    "race enumerates all r! orderings; r = {r} > 5 not supported"
                )));
            }
            let mut csv = Csv::new(&["ordering", "probability", "std_error", "ci_lo", "ci_hi"]);
            let mut perm: Vec<usize> = (0..r).collect();
            let mut total = 0.0;
            loop {
                let est = rm.race_density(&perm, n, seed)?;
                total += est.probability;
                let label: Vec<String> = perm
                    .iter()
                    .map(|&i| model.residues[i].to_string())
                    .collect();
                csv.row(&[
                    label.join(">"),
                    cnum(est.probability),
                    cnum(est.std_error),
                    cnum(est.ci95.0),
                    cnum(est.ci95.1),
                ]);
                if !next_permutation(&mut perm) {
                    break;
                }
            }
            csv.row(&["total".into(), cnum(total), String::new(), String::new(), String::new()]);
            emit(&out, &csv.finish())
        }
        Cmd::Saddle { q, v, out } => {
            let (m, _) = setup(q)?;
            let ctx = tailbounds::saddle_solve(&m, v)?;
            let t4 = tailbounds::deep_tail(&m, v)?;
            let mut o = JsonObj::with_schema();
            o.str("artifact", "saddle")
                .uint("q", q)
                .num("v", ctx.v)
                .num("d_q", ctx.d_q)
                .num("l_q", ctx.l_q)
                .num("a0", ctx.a0)
                .num("log_s", ctx.log_s)
                .num("s_star", ctx.s_star)
                .num("deep_log_tail", t4.log_tail)
                .num("deep_log_neg_log", t4.log_neg_log)
                .num("error_factor", t4.error_factor);
            emit(&out, &o.finish())
        }
        Cmd::Report {
            model,
            v_grid,
            n,
            seed,
            out,
        } => {
            let (m, g) = setup(model.q)?;
            let zs = load_zeros(&g, &model.zeros, model.tol)?;
            let rm = RaceModel::new(&g, &zs, &model.residues)?;
            let grid = parse_grid(&v_grid)?;
            let vq = variance_vq(&zs, false).value;
            let r = model.residues.len() as u32;
            let mut csv = Csv::new(&[
                "v",
                "lambda",
                "gaussian",
                "corrected",
                "mc_p",
                "mc_se",
                "mo_upper",
                "deep_log_tail",
                "regime",
            ]);
            for (i, &v) in grid.iter().enumerate() {
                let lambda = v / vq.sqrt();
                let t1 = gaussmodel::corrected_tail(rm.covariance(), lambda)?;
                let mc = rm.mc_tail(v, n, seed.wrapping_add(i as u64), Norm::Euclidean)?;
                let (mo_up, _) = tailbounds::mo_upper(&zs, v)?;
                let t4 = tailbounds::deep_tail(&m, v)?;
                let report = tailbounds::regime_envelopes(&zs, &m, v, r)?;
                csv.row(&[
                    cnum(v),
                    cnum(lambda),
                    cnum(t1.gaussian),
                    cnum(t1.corrected),
                    cnum(mc.probability),
                    cnum(mc.std_error),
                    cnum(mo_up),
                    cnum(t4.log_tail),
                    format!("{:?}", report.regime).to_lowercase(),
                ]);
            }
            emit(&out, &csv.finish())
        }
        Cmd::Empirical { action } => empirical_cmd(action),
    }
}

fn zeros_cmd(action: ZerosCmd) -> Result<(), Error> {
    match action {
        ZerosCmd::Ingest { q, path, out } => {
            let (_, g) = setup(q)?;
            let zs = ingest_zeros(&path, &g)?;
            emit_zeros(&zs, &out)
        }
        ZerosCmd::Synth { q, t, seed, out } => {
            let (_, g) = setup(q)?;
            let zs = synth_zeros(&g, t, seed)?;
            emit_zeros(&zs, &out)
        }
        ZerosCmd::Compute { q, t, tol, out } => {
            let (_, g) = setup(q)?;
            let zs = load_zeros(&g, &ZeroSource::Compute { t }, tol)?;
            emit_zeros(&zs, &out)
        }
        ZerosCmd::Stats { q, zeros, tol, out } => {
            let (m, g) = setup(q)?;
            let zs = load_zeros(&g, &zeros, tol)?;
            let v = variance_vq(&zs, false);
            let vc = variance_vq(&zs, true);
            let h = zs.horizon_min();
            let mut o = JsonObj::with_schema();
            o.str("artifact", "zero-stats")
                .uint("q", q)
                .str(
                    "provenance",
                    match zs.provenance() {
                        Provenance::Ingested => "ingested",
                        Provenance::Synthetic { .. } => "synthetic",
                        Provenance::Computed => "computed",
                    },
                )
                .uint("total_zeros", zs.total_count() as u64)
                .num("horizon", h);
            if h > 0.0 && zs.total_count() > 0 {
                o.uint("count_at_horizon", count_zeros(&zs, h)?);
                o.num("nq_model_at_horizon", nq_model(&m, h).main);
            }
            o.num("r_q", nq_model(&m, h.max(2.0)).r_q)
                .num("v_stored", v.value)
                .num("v_completed", vc.value)
                .num("v_asymptotic_proxy", v.asymptotic_proxy);
            emit(&out, &o.finish())
        }
    }
}

fn emit_zeros(zs: &ZeroSet, out: &Option<PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => write_zeros(zs, path),
        None => {
            let mut buf = Vec::new();
            racelab_core::zerodata::write_zeros_writer(zs, &mut buf)?;
            print!("{}", String::from_utf8_lossy(&buf));
            Ok(())
        }
    }
}

fn empirical_cmd(action: EmpiricalCmd) -> Result<(), Error> {
    match action {
        EmpiricalCmd::Evector {
            q,
            residues,
            x_max,
            points,
            out,
        } => {
            let (m, _) = setup(q)?;
            let table = load_sieve(&m, x_max, points)?;
            let mut header: Vec<String> = vec!["x".into()];
            header.extend(residues.iter().map(|a| format!("e_{a}")));
            let hdr: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
            let mut csv = Csv::new(&hdr);
            for &x in table.checkpoints() {
                let e = empirical::e_vector(&table, x, &residues)?;
                let mut row = vec![x.to_string()];
                row.extend(e.iter().map(|&v| cnum(v)));
                csv.row(&row);
            }
            emit(&out, &csv.finish())
        }
        EmpiricalCmd::Race {
            q,
            residues,
            x_max,
            points,
            ties,
            out,
        } => {
            let (m, _) = setup(q)?;
            let policy = match ties.as_str() {
                "half" => empirical::RaceTies::Half,
                "strict" => empirical::RaceTies::Strict,
                other => {
                    return Err(Error::Empirical(format!(
                        "unknown tie policy {other:?} (use half|strict)"
                    )))
                }
            };
            let table = load_sieve(&m, x_max, points)?;
            let d = empirical::log_measure_sample(
                &table,
                &residues,
                |e| empirical::race_indicator(e, policy),
                points,
            )?;
            let mut o = JsonObj::with_schema();
            o.str("artifact", "empirical-race")
                .uint("q", q)
                .uint_array("residues", &residues)
                .uint("x_max", x_max)
                .uint("points", points as u64)
                .str("ties", &ties)
                .num("log_density", d);
            emit(&out, &o.finish())
        }
    }
}

fn load_sieve(m: &Modulus, x_max: u64, points: usize) -> Result<empirical::SieveTable, Error> {
    let cache_path =
        cache_dir().map(|d| d.join(format!("sieve-q{}-x{}-p{}.bin", m.q(), x_max, points)));
    if let Some(p) = &cache_path {
        if p.exists() {
            if let Ok(t) = empirical::read_cache(p, m.q(), x_max) {
                return Ok(t);
            }
        }
    }
    let cps = empirical::default_checkpoints(x_max, points);
    let table = empirical::sieve(x_max, m, &cps)?;
    if let Some(p) = &cache_path {
        if let Some(dir) = p.parent() {
            std::fs::create_dir_all(dir)?;
        }
        empirical::write_cache(&table, p)?;
    }
    Ok(table)
}

fn parse_grid(s: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::RandModel(format!(
            "v grid must be lo:hi:count, got {s:?}"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| Error::RandModel("bad grid lo".into()))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| Error::RandModel("bad grid hi".into()))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| Error::RandModel("bad grid count".into()))?;
    if count < 2 || hi <= lo || lo <= 0.0 {
        return Err(Error::RandModel("need 0 < lo < hi and count >= 2".into()));
    }
    Ok((0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect())
}

/// Next lexicographic permutation in place; false when wrapped around.
fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        p.reverse();
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_source_parsing() {
        assert!(matches!(
            "synth:100:7".parse::<ZeroSource>().unwrap(),
            ZeroSource::Synth { t, seed } if t == 100.0 && seed == 7
        ));
        assert!(matches!(
            "compute:50".parse::<ZeroSource>().unwrap(),
            ZeroSource::Compute { t } if t == 50.0
        ));
        assert!(matches!(
            "some/file.txt".parse::<ZeroSource>().unwrap(),
            ZeroSource::File(_)
        ));
        assert!("synth:abc:1".parse::<ZeroSource>().is_err());
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("1:3:3").unwrap();
        assert_eq!(g, vec![1.0, 2.0, 3.0]);
        assert!(parse_grid("3:1:3").is_err());
        assert!(parse_grid("1:3").is_err());
    }

    #[test]
    fn permutation_enumeration() {
        let mut p = vec![0usize, 1, 2];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 6);
        assert_eq!(p, vec![0, 1, 2]);
    }
}

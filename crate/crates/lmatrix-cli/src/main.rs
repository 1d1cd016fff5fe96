//! `lmat`: construct, certify, search and verify low-rank L-matrices from
//! the command line. Exit codes: 0 ok, 1 invariant/verification failure,
//! 2 usage or parse problem.

use clap::{Args, Parser, Subcommand};
use lmatrix::artifact::{
    parse_minpoly, verify_file, write_artifact, FieldDesc, MatrixFile, PhiFile, ReportFile,
};
use lmatrix::construct::{
    construct_fivethirds, construct_square, construct_subset_incidence,
    construct_threehalves, construct_xy3, grassmann_construct, ConstructionReport,
};
use lmatrix::error::Error;
use lmatrix::experiment::{run_experiment, CertMode, ExperimentConfig};
use lmatrix::field::FieldCtx;
use lmatrix::mpoly::MultiPoly;
use lmatrix::relations::{
    point_criterion, point_criterion_witness, primitive_relation,
    relation_lattice, relation_to_differences, IntRelation, LSet, PrimitiveRelation,
};
use lmatrix::search::{min_rank, n_of_r, primitive_relation_box_search, SearchSpec};
use lmatrix::spectral::{digraph_pipeline, polytobetter_pipeline};
use lmatrix::vanishing::genupper_witness;
use num_bigint::BigInt;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "lmat", version, about = "exact-arithmetic L-matrix toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Field descriptor: rational, prime:P, or numberfield:POLY
    #[arg(long, global = true, default_value = "rational")]
    field: String,
    /// Seed for randomized choices (fivethirds sampling)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for matrix/report artifacts
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Rank certification mode: exact, modular, or bound
    #[arg(long, global = true, default_value = "exact")]
    cert: String,
    /// Primes for modular certification, comma separated
    #[arg(long, global = true, default_value = "101,103")]
    primes: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build one of the named constructions
    Construct {
        #[command(subcommand)]
        which: ConstructCmd,
    },
    /// Rank of a matrix file (exact or modular bounds)
    Rank {
        #[arg(long)]
        file: PathBuf,
    },
    /// Integer relation machinery on a set L
    Relations {
        #[command(subcommand)]
        which: RelationsCmd,
    },
    /// Eigenvalue-multiplicity pipelines
    Eigen {
        #[command(subcommand)]
        which: EigenCmd,
    },
    /// Vanishing orders and witness polynomials
    Vanish {
        #[command(subcommand)]
        which: VanishCmd,
    },
    /// Brute-force oracles on tiny instances
    Search {
        #[command(subcommand)]
        which: SearchCmd,
    },
    /// Growth-table experiment from a JSON config
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Independently re-check a produced matrix (and report) file
    Verify {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Size q^2 from a single-negative primitive relation
    Square(ConstructArgs),
    /// Size q^3 from an arbitrary primitive relation
    Threehalves(ConstructArgs),
    /// Size q^5 from a relation with at most two negatives (seeded)
    Fivethirds(ConstructArgs),
    /// Size q^4 on {x+y, 3x, 3y}
    Xy3 {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long)]
        q: u64,
    },
    /// kJ - A^T A on the k-subset incidence matrix
    Incidence {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k: usize,
    },
    /// Raw Grassmannian construction from a phi-assignment JSON file
    Phi {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Args)]
struct ConstructArgs {
    /// Elements of L, comma separated, in the chosen field syntax
    #[arg(long, allow_hyphen_values = true)]
    l: String,
    #[arg(long)]
    q: u64,
    /// Relation coefficients, comma separated; canonical when omitted
    #[arg(long, allow_hyphen_values = true)]
    relation: Option<String>,
}

#[derive(Subcommand)]
enum RelationsCmd {
    /// Canonical primitive relation or a vdW infeasibility certificate
    Find {
        #[arg(long, allow_hyphen_values = true)]
        l: String,
    },
    /// Basis of the lattice of all integer relations
    Lattice {
        #[arg(long, allow_hyphen_values = true)]
        l: String,
    },
    /// Degree-one integral witness criterion at a rational point
    PointCriterion {
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
}

#[derive(Subcommand)]
enum EigenCmd {
    /// {0,1}-matrix of size n with a prescribed eigenvalue
    Pipeline {
        #[arg(long, allow_hyphen_values = true)]
        minpoly: String,
        #[arg(long)]
        n: usize,
    },
    /// L-matrix from a vanishing polynomial relation, amplified
    Polytobetter {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        l: String,
        #[arg(long)]
        block: usize,
    },
}

#[derive(Subcommand)]
enum VanishCmd {
    /// Order of vanishing of a polynomial at a point
    Order {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Witness polynomial of a low-rank L-matrix file
    Witness {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        l: String,
    },
}

#[derive(Subcommand)]
enum SearchCmd {
    /// Exhaustive minimal rank at a fixed size
    MinRank {
        #[arg(long, allow_hyphen_values = true)]
        l: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        symmetric: bool,
    },
    /// Largest n (up to a cap) admitting rank <= r
    NOfR {
        #[arg(long, allow_hyphen_values = true)]
        l: String,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        symmetric: bool,
    },
    /// Coefficient-box scan for a primitive relation
    RelationBox {
        #[arg(long, allow_hyphen_values = true)]
        l: String,
        #[arg(long)]
        bound: i64,
    },
}

fn parse_ctx(cli_field: &str) -> Result<FieldCtx, Error> {
    let ctx = FieldDesc::parse_cli(cli_field)?.to_ctx()?;
    if !ctx.irreducibility_verified() {
        eprintln!("warning: modulus irreducibility is machine-checked only through degree 4; accepted unverified");
    }
    Ok(ctx)
}

fn parse_primes(s: &str) -> Result<Vec<u64>, Error> {
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad prime `{t}`"))))
        .collect()
}

fn resolve_relation(l: &LSet, given: &Option<String>) -> Result<IntRelation, Error> {
    match given {
        Some(csv) => {
            let coeffs = csv
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<BigInt>()
                        .map_err(|_| Error::Parse(format!("bad coefficient `{t}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            IntRelation::new(l, coeffs)
        }
        None => match primitive_relation(l)? {
            PrimitiveRelation::Found(r) => Ok(r),
            PrimitiveRelation::Infeasible(_) => {
                Err(Error::Invalid("L admits no primitive relation".into()))
            }
        },
    }
}

fn certify(report: &mut ConstructionReport, cert: &str, primes: &[u64]) -> Result<(), Error> {
    match cert {
        "exact" => {
            report.certify_exact()?;
        }
        "modular" => {
            report.certify_modular(primes)?;
        }
        "bound" => {}
        other => return Err(Error::Parse(format!("unknown cert mode `{other}`"))),
    }
    Ok(())
}

fn emit_construction(
    report: &ConstructionReport,
    out: &Option<PathBuf>,
    stem: &str,
) -> Result<(), Error> {
    if let Some(dir) = out {
        write_artifact(report, dir, stem)?;
    }
    let file = ReportFile::of_report(report);
    println!("{}", serde_json::to_string_pretty(&file).expect("report serializes"));
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Error> {
    let primes = parse_primes(&cli.primes)?;
    match cli.cmd {
        Cmd::Construct { which } => {
            let ctx = parse_ctx(&cli.field)?;
            let (mut report, stem) = match which {
                ConstructCmd::Square(args) => {
                    let l = LSet::parse(ctx, &args.l)?;
                    let rel = resolve_relation(&l, &args.relation)?;
                    (construct_square(&l, &rel, args.q)?, format!("square_q{}", args.q))
                }
                ConstructCmd::Threehalves(args) => {
                    let l = LSet::parse(ctx, &args.l)?;
                    let rel = resolve_relation(&l, &args.relation)?;
                    (construct_threehalves(&l, &rel, args.q)?, format!("threehalves_q{}", args.q))
                }
                ConstructCmd::Fivethirds(args) => {
                    let l = LSet::parse(ctx, &args.l)?;
                    let rel = resolve_relation(&l, &args.relation)?;
                    let seed = cli
                        .seed
                        .ok_or_else(|| Error::Invalid("fivethirds requires --seed".into()))?;
                    (
                        construct_fivethirds(&l, &rel, args.q, seed)?,
                        format!("fivethirds_q{}", args.q),
                    )
                }
                ConstructCmd::Xy3 { x, y, q } => {
                    let xe = ctx.parse_element(&x)?;
                    let ye = ctx.parse_element(&y)?;
                    (construct_xy3(&ctx, &xe, &ye, q)?, format!("xy3_q{q}"))
                }
                ConstructCmd::Incidence { r, k } => {
                    (construct_subset_incidence(r, k)?, format!("incidence_r{r}_k{k}"))
                }
                ConstructCmd::Phi { file } => {
                    let phi = PhiFile::read(&file)?.to_assignment()?;
                    (grassmann_construct(&phi)?, "phi".to_string())
                }
            };
            certify(&mut report, &cli.cert, &primes)?;
            report.verify()?;
            emit_construction(&report, &cli.out, &stem)?;
            Ok(true)
        }
        Cmd::Rank { file } => {
            let matrix = MatrixFile::read(&file)?.to_matrix()?;
            let value = match cli.cert.as_str() {
                "exact" => json!({"rank_exact": matrix.rank()?}),
                "modular" => {
                    let b = matrix.rank_bounds_modular(&primes)?;
                    json!({
                        "rank_lower": b.lower,
                        "rank_upper": b.upper,
                        "skipped": b.skipped,
                    })
                }
                "bound" => json!({"rank_upper": matrix.rows().min(matrix.cols())}),
                other => return Err(Error::Parse(format!("unknown cert mode `{other}`"))),
            };
            println!("{}", serde_json::to_string_pretty(&value).expect("serializes"));
            Ok(true)
        }
        Cmd::Relations { which } => {
            let ctx = parse_ctx(&cli.field)?;
            let value = match which {
                RelationsCmd::Find { l } => {
                    let l = LSet::parse(ctx, &l)?;
                    match primitive_relation(&l)? {
                        PrimitiveRelation::Found(rel) => {
                            let diff = relation_to_differences(&l, &rel)?;
                            json!({
                                "relation": rel.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                                "certificate": serde_json::Value::Null,
                                "s": diff.s.to_string(),
                                "differences": diff
                                    .b
                                    .iter()
                                    .map(|(&(i, ip), b)| json!({"i": i + 1, "ip": ip + 1, "b": b.to_string()}))
                                    .collect::<Vec<_>>(),
                            })
                        }
                        PrimitiveRelation::Infeasible(cert) => json!({
                            "relation": serde_json::Value::Null,
                            "certificate": cert
                                .w
                                .iter()
                                .map(|w| lmatrix::parse::render_rational(w))
                                .collect::<Vec<_>>(),
                        }),
                    }
                }
                RelationsCmd::Lattice { l } => {
                    let l = LSet::parse(ctx, &l)?;
                    let basis = relation_lattice(&l)?;
                    json!({
                        "rank": basis.len(),
                        "basis": basis
                            .iter()
                            .map(|v| v.iter().map(|c| c.to_string()).collect::<Vec<_>>())
                            .collect::<Vec<_>>(),
                    })
                }
                RelationsCmd::PointCriterion { point } => {
                    let coords = point
                        .split(',')
                        .map(|t| {
                            lmatrix::qpoly::QPoly::parse(t.trim()).and_then(|p| {
                                if p.degree() == 0 {
                                    Ok(p.coeff(0))
                                } else {
                                    Err(Error::Parse(format!("expected a rational, got `{t}`")))
                                }
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    let ok = point_criterion(&coords);
                    let witness = point_criterion_witness(&coords, 20)
                        .map(|w| w.iter().map(|c| c.to_string()).collect::<Vec<_>>());
                    json!({"satisfiable": ok, "witness": witness})
                }
            };
            println!("{}", serde_json::to_string_pretty(&value).expect("serializes"));
            Ok(true)
        }
        Cmd::Eigen { which } => match which {
            EigenCmd::Pipeline { minpoly, n } => {
                let f = parse_minpoly(&minpoly)?;
                let report = digraph_pipeline(&f, n)?;
                if let Some(dir) = &cli.out {
                    std::fs::create_dir_all(dir)?;
                    MatrixFile::from_matrix(&report.matrix)
                        .write(&dir.join(format!("digraph_n{n}.json")))?;
                }
                let value = json!({
                    "multiplicity_exact": report.multiplicity,
                    "lower_bound": report.lower_bound,
                    "upper_bound": report.upper_bound,
                    "degree": report.degree,
                    "patch_ranks": report.patch_ranks,
                });
                println!("{}", serde_json::to_string_pretty(&value).expect("serializes"));
                Ok(true)
            }
            EigenCmd::Polytobetter { poly, l, block } => {
                let ctx = parse_ctx(&cli.field)?;
                let lset = LSet::parse(ctx, &l)?;
                let p = MultiPoly::parse(FieldCtx::rational(), &poly, lset.len())?;
                let report = polytobetter_pipeline(&p, &lset, block)?;
                if let Some(dir) = &cli.out {
                    std::fs::create_dir_all(dir)?;
                    MatrixFile::from_matrix(&report.matrix)
                        .write(&dir.join(format!("polytobetter_l{block}.json")))?;
                }
                let value = json!({
                    "size": report.size,
                    "multiplicity_exact": report.multiplicity,
                    "rank_exact": report.rank_exact,
                    "rank_bound": report.rank_bound,
                    "patch_ranks": report.patch_ranks,
                    "ratio": report.size as f64 / report.rank_exact as f64,
                });
                println!("{}", serde_json::to_string_pretty(&value).expect("serializes"));
                Ok(true)
            }
        },
        Cmd::Vanish { which } => match which {
            VanishCmd::Order { poly, point } => {
                let ctx = parse_ctx(&cli.field)?;
                let coords = point
                    .split(',')
                    .map(|t| ctx.parse_element(t.trim()))
                    .collect::<Result<Vec<_>, _>>()?;
                let p = MultiPoly::parse(FieldCtx::rational(), &poly, coords.len())?;
                let order = p.vanishing_order(&coords, &ctx)?;
                let value = json!({"order": order, "degree": p.degree()});
                println!("{}", serde_json::to_string_pretty(&value).expect("serializes"));
                Ok(true)
            }
            VanishCmd::Witness { matrix, l } => {
                let ctx = parse_ctx(&cli.field)?;
                let m = MatrixFile::read(&matrix)?.to_matrix()?;
                let lset = LSet::parse(ctx, &l)?;
                let w = genupper_witness(&m, &lset)?;
                let value = json!({
                    "poly": w.poly.render(),
                    "rank": w.rank,
                    "r": w.r,
                    "v": w.v,
                    "order": w.order,
                    "degenerate": w.degenerate,
                });
                println!("{}", serde_json::to_string_pretty(&value).expect("serializes"));
                Ok(true)
            }
        },
        Cmd::Search { which } => {
            let ctx = parse_ctx(&cli.field)?;
            let value = match which {
                SearchCmd::MinRank { l, n, symmetric } => {
                    let l = LSet::parse(ctx, &l)?;
                    let res = min_rank(&SearchSpec { l, n, symmetric_only: symmetric })?;
                    json!({
                        "min_rank": res.min_rank,
                        "min_rank_ones": res.min_rank_ones,
                        "assignments": res.assignments.to_string(),
                        "witness": MatrixFile::from_matrix(&res.witness),
                    })
                }
                SearchCmd::NOfR { l, r, n_max, symmetric } => {
                    let l = LSet::parse(ctx, &l)?;
                    let res = n_of_r(&l, r, n_max, symmetric)?;
                    json!({"n": res.n, "n_zero": res.n_zero})
                }
                SearchCmd::RelationBox { l, bound } => {
                    let l = LSet::parse(ctx, &l)?;
                    let found = primitive_relation_box_search(&l, bound)?;
                    json!({
                        "relation": found.map(|v| v.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
                    })
                }
            };
            println!("{}", serde_json::to_string_pretty(&value).expect("serializes"));
            Ok(true)
        }
        Cmd::Experiment { config } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg: ExperimentConfig = serde_json::from_str(&text)?;
            if cfg.seed.is_none() {
                cfg.seed = cli.seed;
            }
            if cfg.out.is_none() {
                cfg.out = cli.out.as_ref().map(|p| p.to_string_lossy().into_owned());
            }
            let _ = CertMode::Bound; // schema anchor
            let table = run_experiment(&cfg)?;
            print!("{}", table.to_csv());
            Ok(true)
        }
        Cmd::Verify { file, report } => {
            let outcome = verify_file(&file, report.as_deref())?;
            println!("{}", serde_json::to_string_pretty(&outcome).expect("serializes"));
            Ok(outcome.ok)
        }
    }
}

/// Usage-class problems exit 2; invariant/verification failures exit 1.
fn classify(e: &Error) -> u8 {
    match e {
        Error::Parse(_)
        | Error::Invalid(_)
        | Error::CompositeModulus(_)
        | Error::NonMonicModulus
        | Error::ReducibleModulus { .. }
        | Error::DimensionMismatch { .. }
        | Error::QTooSmall { .. }
        | Error::SignPattern(_)
        | Error::DegenerateL(_)
        | Error::BudgetExceeded { .. }
        | Error::CtxMismatch
        | Error::ZeroVector
        | Error::DivisionByZero
        | Error::TooLargeForExactRank { .. } => 2,
        Error::Invariant(_)
        | Error::CaseCheckFailed(_)
        | Error::SamplingExhausted { .. }
        | Error::RankPrecondition(_)
        | Error::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(classify(&e))
        }
    }
}

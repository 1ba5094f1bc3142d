use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hicyclo_core::derivations::{self, kappa_equivariance_check, kappa_special_check, morphism_check, xi_rank};
use hicyclo_core::dihedral::{DihedralCoalgebra, Options, MAX_DEPTH};
use hicyclo_core::modular::{self, coset_space, CosetVector, ExtendedBasis, ModularGen};
use hicyclo_core::mzvdims::{self, Certificate, ZSymbol};
use hicyclo_core::numerics::{eval_polylog, verify_certificate};
use hicyclo_core::realization::{self, psi_top, serialize_chain};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "hicyclo",
    version,
    about = "Multiple polylogarithms at roots of unity: dimensions, complexes and numerics"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Tsv, global = true)]
    format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension tables.
    #[command(subcommand)]
    Dims(DimsCmd),
    /// The dihedral Lie coalgebra of μ_N.
    #[command(subcommand)]
    Dihedral(DihedralCmd),
    /// Modular complexes with coefficients.
    #[command(subcommand)]
    Modular(ModularCmd),
    /// Realization of the rank-m modular complex by Voronoi cells.
    #[command(subcommand)]
    Realize(RealizeCmd),
    /// The cyclic-word derivation algebra.
    #[command(subcommand)]
    Derivations(DerivationsCmd),
    /// High-precision multiple polylogarithms.
    #[command(subcommand)]
    Num(NumCmd),
}

#[derive(Subcommand, Debug)]
enum DimsCmd {
    /// d_k = d_{k-2} + d_{k-3}.
    Zeta {
        #[arg(long, default_value_t = 12)]
        max_weight: u32,
    },
    /// Graded dimensions of a free Lie algebra.
    Lie {
        #[arg(long, default_value_t = 12)]
        max_weight: u32,
        /// Generator degrees; defaults to 3,5,7,... up to the maximal weight.
        #[arg(long, value_delimiter = ',')]
        generators: Vec<u32>,
    },
    /// Ranks of K_{2n-1} of the cyclotomic field.
    Ktheory {
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = 8)]
        max_weight: u32,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct Bidegree {
    #[arg(long)]
    level: u32,
    #[arg(long)]
    weight: u32,
    #[arg(long)]
    depth: usize,
}

#[derive(Args, Debug, Clone, Copy)]
struct RelationFlags {
    /// Drop the relation I_1(e:e) = 0.
    #[arg(long)]
    hat: bool,
    /// Omit distribution relations.
    #[arg(long)]
    no_distribution: bool,
    /// Omit the depth-one dihedral symmetry.
    #[arg(long)]
    no_dihedral_m1: bool,
}

impl RelationFlags {
    fn options(self) -> Options {
        Options {
            hat: self.hat,
            distribution: !self.no_distribution,
            dihedral_m1: !self.no_dihedral_m1,
        }
    }
}

#[derive(Subcommand, Debug)]
enum DihedralCmd {
    /// dim D_{w,m}(μ_N).
    Dim {
        #[command(flatten)]
        bi: Bidegree,
        #[command(flatten)]
        flags: RelationFlags,
    },
    /// The standard cochain complex of bidegree (w, m).
    Complex {
        #[command(flatten)]
        bi: Bidegree,
        #[command(flatten)]
        flags: RelationFlags,
    },
    /// The cobracket on D_{w,m} in the basis of Λ².
    Cobracket {
        #[command(flatten)]
        bi: Bidegree,
        #[command(flatten)]
        flags: RelationFlags,
    },
}

#[derive(Subcommand, Debug)]
enum ModularCmd {
    /// The rank-m modular complex with coefficients.
    Complex {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        weight: u32,
        /// Random GL_m samples for the relation stability check.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Termwise comparison with the dihedral complex.
    Compare {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        weight: u32,
    },
    /// Image of a standard generator under μ.
    Mu {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        level: u32,
        /// Coset vector mod N, e.g. 1,0.
        #[arg(long, value_delimiter = ',')]
        coset: Vec<u32>,
        /// Block ranks of the generator, e.g. 1,1; defaults to a single block.
        #[arg(long, value_delimiter = ',')]
        blocks: Vec<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum RealizeCmd {
    /// The chain attached to an extended basis.
    Chain {
        #[arg(long)]
        rank: usize,
        /// Basis vectors v_1..v_m separated by ';', e.g. "1,0;1,1".
        #[arg(long)]
        basis: Option<String>,
    },
    /// Relation and boundary checks.
    Check {
        #[arg(long)]
        rank: usize,
    },
}

#[derive(Subcommand, Debug)]
enum DerivationsCmd {
    /// κ identities, the bracket morphism and injectivity of ξ.
    Check {
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = 5)]
        max_weight: u32,
        /// Longest cyclic words for the κ checks.
        #[arg(long, default_value_t = 5)]
        max_length: usize,
    },
}

#[derive(Subcommand, Debug)]
enum NumCmd {
    /// Li_{n_1..n_m}(ζ^{a_1}, ..., ζ^{a_m}).
    Eval {
        #[arg(long, default_value_t = 1)]
        level: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        comp: Vec<u32>,
        /// Exponents of ζ_N; defaults to zeros.
        #[arg(long, value_delimiter = ',')]
        args: Vec<u32>,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// Evaluate an identity certificate.
    Verify {
        /// Certificate JSON, or '-' for stdin.
        #[arg(long)]
        cert: PathBuf,
        #[arg(long, default_value_t = 25)]
        digits: u32,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Failed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            _ => 2,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

/// Rendered output plus whether every verification held.
struct Report {
    tsv: String,
    json: Value,
    pass: bool,
}

impl Report {
    fn ok(tsv: String, json: Value) -> Self {
        Report { tsv, json, pass: true }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hicyclo: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(invalid("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(invalid)?;
    }
    let report = match &cli.command {
        Command::Dims(c) => dims(c)?,
        Command::Dihedral(c) => dihedral(c)?,
        Command::Modular(c) => modular_cmd(c)?,
        Command::Realize(c) => realize(c)?,
        Command::Derivations(c) => derivations_cmd(c)?,
        Command::Num(c) => num(c)?,
    };
    let text = match cli.format {
        Format::Tsv => report.tsv,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).map_err(invalid)?;
            s.push('\n');
            s
        }
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Failed("verification failed".into()))
    }
}

fn dims(cmd: &DimsCmd) -> Result<Report, CliError> {
    let (header, rows): (&str, Vec<(u32, u64)>) = match cmd {
        DimsCmd::Zeta { max_weight } => (
            "# weight\td",
            (0..=*max_weight).map(|k| (k, mzvdims::zeta_dim_bound(k))).collect(),
        ),
        DimsCmd::Lie { max_weight, generators } => {
            let gens: Vec<u32> = if generators.is_empty() {
                (3..=*max_weight).step_by(2).collect()
            } else {
                generators.clone()
            };
            if gens.contains(&0) {
                return Err(invalid("generator degrees must be positive"));
            }
            (
                "# weight\tdim",
                (1..=*max_weight).map(|k| (k, mzvdims::witt_dims(&gens, k))).collect(),
            )
        }
        DimsCmd::Ktheory { level, max_weight } => {
            if *level == 0 {
                return Err(invalid("level must be positive"));
            }
            (
                "# n\trank",
                (1..=*max_weight)
                    .map(|n| (n, mzvdims::ktheory_dims(*level, n)))
                    .collect(),
            )
        }
    };
    let mut tsv = format!("{header}\n");
    for (k, d) in &rows {
        writeln!(tsv, "{k}\t{d}").unwrap();
    }
    let json = json!({ "rows": rows.iter().map(|(k, d)| json!([k, d])).collect::<Vec<_>>() });
    Ok(Report::ok(tsv, json))
}

fn coalgebra(level: u32, opts: Options) -> Result<DihedralCoalgebra, CliError> {
    DihedralCoalgebra::new(level, opts).map_err(invalid)
}

fn dihedral(cmd: &DihedralCmd) -> Result<Report, CliError> {
    match cmd {
        DihedralCmd::Dim { bi, flags } => {
            let dc = coalgebra(bi.level, flags.options())?;
            let d = dc.dim(bi.weight, bi.depth).map_err(invalid)?;
            Ok(Report::ok(
                format!("{d}\n"),
                json!({ "level": bi.level, "weight": bi.weight, "depth": bi.depth, "options": flags.options(), "dim": d }),
            ))
        }
        DihedralCmd::Complex { bi, flags } => {
            let dc = coalgebra(bi.level, flags.options())?;
            let cx = dc.cochain_complex(bi.weight, bi.depth).map_err(invalid)?;
            let rep = dc.report(&cx);
            let mut tsv = format!(
                "# level={} weight={} depth={}\n# degree\tdim\tcohomology\n",
                bi.level, bi.weight, bi.depth
            );
            for (k, (d, h)) in rep.term_dims.iter().zip(&rep.cohomology).enumerate() {
                writeln!(tsv, "{}\t{d}\t{h}", k + 1).unwrap();
            }
            writeln!(tsv, "# euler\t{}\n# d_squared_zero\t{}", rep.euler, cx.d_squared_zero).unwrap();
            let mut json = serde_json::to_value(&rep).map_err(invalid)?;
            json["d_squared_zero"] = json!(cx.d_squared_zero);
            Ok(Report {
                tsv,
                json,
                pass: cx.d_squared_zero,
            })
        }
        DihedralCmd::Cobracket { bi, flags } => {
            let dc = coalgebra(bi.level, flags.options())?;
            let basis = dc.basis(bi.weight, bi.depth).map_err(invalid)?;
            let (mat, _) = dc.cobracket_matrix(bi.weight, bi.depth).map_err(invalid)?;
            let rank = hicyclo_core::qlinalg::rank(&mat).map_err(invalid)?;
            let name = |b| dc.basis_generator(b).map(|g| g.serialize(bi.level)).map_err(invalid);
            let mut tsv = format!("# rank\t{rank}\n# source\tleft\tright\tcoefficient\n");
            let mut entries = Vec::new();
            for b in basis {
                let src = name(b)?;
                for (pair, c) in dc.delta_basis(b).map_err(invalid)?.iter() {
                    let (l, r) = (name(pair.0)?, name(pair.1)?);
                    let c = hicyclo_core::qlinalg::format_rational(c);
                    writeln!(tsv, "{src}\t{l}\t{r}\t{c}").unwrap();
                    entries.push(json!({ "source": src, "left": l, "right": r, "coef": c }));
                }
            }
            Ok(Report::ok(tsv, json!({ "rank": rank, "entries": entries })))
        }
    }
}

fn modular_cmd(cmd: &ModularCmd) -> Result<Report, CliError> {
    match cmd {
        ModularCmd::Complex {
            rank,
            level,
            weight,
            samples,
            seed,
        } => {
            let cx = modular::tensor_complex(*rank, *level, *weight).map_err(invalid)?;
            let rep = cx.report();
            let stable = if *samples > 0 {
                Some(modular::stability_check(&cx, *samples, *seed).map_err(invalid)?)
            } else {
                None
            };
            let mut tsv = format!("# rank={rank} level={level} weight={weight}\n# degree\tdim\tcohomology\n");
            for (k, (d, h)) in rep.term_dims.iter().zip(&rep.cohomology).enumerate() {
                writeln!(tsv, "{}\t{d}\t{h}", k + 1).unwrap();
            }
            writeln!(tsv, "# euler\t{}\n# d_squared_zero\t{}", rep.euler, cx.d_squared_zero).unwrap();
            if let Some(s) = stable {
                writeln!(tsv, "# stable\t{s}").unwrap();
            }
            let mut json = serde_json::to_value(&rep).map_err(invalid)?;
            json["d_squared_zero"] = json!(cx.d_squared_zero);
            json["stable"] = json!(stable);
            let pass = cx.d_squared_zero && stable != Some(false);
            Ok(Report { tsv, json, pass })
        }
        ModularCmd::Compare { rank, level, weight } => {
            let c = modular::compare(*rank, *level, *weight).map_err(invalid)?;
            let pass = c.termwise_equal()
                && c.modular_cohomology == c.dihedral_cohomology
                && (c.rank as u32 != c.weight
                    || (c.chain_map_sign.is_some()
                        && c.mu_kills_relations == Some(true)
                        && c.surjective() == Some(true)));
            let mut tsv = format!(
                "# rank={rank} level={level} weight={weight}\n# degree\tmodular\tdihedral\tmodular_h\tdihedral_h\n"
            );
            for k in 0..c.modular_dims.len().max(c.dihedral_dims.len()) {
                let get = |v: &[usize]| v.get(k).map_or("-".to_string(), |d| d.to_string());
                writeln!(
                    tsv,
                    "{}\t{}\t{}\t{}\t{}",
                    k + 1,
                    get(&c.modular_dims),
                    get(&c.dihedral_dims),
                    get(&c.modular_cohomology),
                    get(&c.dihedral_cohomology)
                )
                .unwrap();
            }
            writeln!(tsv, "# euler\t{}\t{}", c.modular_euler, c.dihedral_euler).unwrap();
            if let Some(s) = c.chain_map_sign {
                writeln!(tsv, "# chain_map_sign\t{s}").unwrap();
            }
            if let Some(s) = c.surjective() {
                writeln!(tsv, "# surjective\t{s}").unwrap();
            }
            writeln!(tsv, "# pass\t{pass}").unwrap();
            let mut json = serde_json::to_value(&c).map_err(invalid)?;
            json["pass"] = json!(pass);
            Ok(Report { tsv, json, pass })
        }
        ModularCmd::Mu {
            rank,
            level,
            coset,
            blocks,
        } => {
            let blocks = if blocks.is_empty() { vec![*rank] } else { blocks.clone() };
            if blocks.iter().sum::<usize>() != *rank || blocks.contains(&0) {
                return Err(invalid("block ranks must be positive and sum to the rank"));
            }
            let mut ranks = blocks.clone();
            ranks.sort_unstable();
            let coset = CosetVector(coset.clone());
            if !coset_space(*rank, *level).map_err(invalid)?.contains(&coset) {
                return Err(invalid(format!(
                    "{:?} is not a coset vector of rank {rank} mod {level}",
                    coset.0
                )));
            }
            let g = modular::standard_generator(&ranks);
            let dc = coalgebra(*level, Options::hat())?;
            let image = modular::mu_map(&dc, &g, &coset).map_err(invalid)?;
            let mut tsv = format!("# {g} at {:?}\n# coefficient\tterm\n", coset.0);
            let mut terms = Vec::new();
            for (wedge, c) in image.iter() {
                let names = wedge
                    .iter()
                    .map(|&b| dc.basis_generator(b).map(|x| x.serialize(*level)))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(invalid)?;
                let c = hicyclo_core::qlinalg::format_rational(c);
                writeln!(tsv, "{c}\t{}", names.join(" ∧ ")).unwrap();
                terms.push(json!({ "coef": c, "wedge": names }));
            }
            Ok(Report::ok(
                tsv,
                json!({ "generator": g.to_string(), "coset": coset.0, "terms": terms }),
            ))
        }
    }
}

fn parse_basis(rank: usize, s: &str) -> Result<ExtendedBasis, CliError> {
    let mut vs: Vec<Vec<i64>> = s
        .split(';')
        .map(|v| v.split(',').map(|x| x.trim().parse::<i64>().map_err(invalid)).collect())
        .collect::<Result<_, _>>()?;
    if vs.len() != rank || vs.iter().any(|v| v.len() != rank) {
        return Err(invalid(format!("expected {rank} vectors of length {rank}")));
    }
    let last = (0..rank).map(|i| -vs.iter().map(|v| v[i]).sum::<i64>()).collect();
    vs.push(last);
    ExtendedBasis::new(vs).map_err(invalid)
}

fn realize(cmd: &RealizeCmd) -> Result<Report, CliError> {
    match cmd {
        RealizeCmd::Chain { rank, basis } => {
            if !(1..=realization::MAX_RANK).contains(rank) {
                return Err(invalid(format!("rank must be in 1..={}", realization::MAX_RANK)));
            }
            let labels = match basis {
                Some(s) => parse_basis(*rank, s)?,
                None => ExtendedBasis::standard(*rank),
            };
            let chain = if *rank == 1 {
                realization::psi(&ModularGen::single(labels.clone())).map_err(invalid)?
            } else {
                psi_top(&labels).map_err(invalid)?
            };
            let cells: Vec<Value> = chain
                .iter()
                .map(|(c, k)| {
                    json!({
                        "coef": hicyclo_core::qlinalg::format_rational(k),
                        "vectors": c.vectors.iter().map(|v| v.0.clone()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let tsv = format!("# {labels}\n{}", serialize_chain(&chain));
            Ok(Report::ok(tsv, json!({ "basis": labels.to_string(), "cells": cells })))
        }
        RealizeCmd::Check { rank } => {
            let results = realization::check_suite(*rank).map_err(invalid)?;
            let pass = results.iter().all(|r| r.pass);
            let mut tsv = "# check\tpass\n".to_string();
            for r in &results {
                writeln!(tsv, "{}\t{}", r.name, r.pass).unwrap();
            }
            Ok(Report {
                tsv,
                json: json!({ "rank": rank, "checks": results, "pass": pass }),
                pass,
            })
        }
    }
}

fn derivations_cmd(cmd: &DerivationsCmd) -> Result<Report, CliError> {
    let DerivationsCmd::Check {
        level,
        max_weight,
        max_length,
    } = cmd;
    if *max_weight > derivations::MAX_WEIGHT {
        return Err(invalid(format!(
            "max weight must be at most {}",
            derivations::MAX_WEIGHT
        )));
    }
    let dc = coalgebra(*level, Options::default())?;
    let mut checks: Vec<(String, bool)> = vec![
        ("kappa_special".into(), kappa_special_check(*level, *max_length)),
        (
            "kappa_equivariant".into(),
            kappa_equivariance_check(*level, *max_length),
        ),
    ];
    let morph = morphism_check(&dc, *max_weight).map_err(invalid)?;
    checks.push(("bracket_morphism".into(), morph.pass()));
    for w in 1..=*max_weight {
        for m in 1..=(w as usize).min(MAX_DEPTH) {
            let (rank, dim) = xi_rank(&dc, w, m).map_err(invalid)?;
            if dim > 0 {
                checks.push((format!("xi_injective_w{w}_m{m}"), rank == dim));
            }
        }
    }
    let pass = checks.iter().all(|(_, p)| *p);
    let mut tsv = format!("# level={level} max_weight={max_weight}\n# check\tpass\n");
    for (name, p) in &checks {
        writeln!(tsv, "{name}\t{p}").unwrap();
    }
    if let Some(s) = morph.sign {
        writeln!(tsv, "# morphism_sign\t{s}").unwrap();
    }
    let json = json!({
        "level": level,
        "checks": checks.iter().map(|(n, p)| json!({ "name": n, "pass": p })).collect::<Vec<_>>(),
        "morphism": morph,
        "pass": pass,
    });
    Ok(Report { tsv, json, pass })
}

fn num(cmd: &NumCmd) -> Result<Report, CliError> {
    match cmd {
        NumCmd::Eval {
            level,
            comp,
            args,
            digits,
        } => {
            let args = if args.is_empty() {
                vec![0; comp.len()]
            } else {
                args.clone()
            };
            let z = ZSymbol::new(*level, comp.clone(), args).map_err(invalid)?;
            let r = eval_polylog(&z, *digits).map_err(invalid)?;
            let (re, im) = r.value.to_decimal(*digits);
            let tsv = format!(
                "# {z}\n# re\tim\ttail_bound\tterms\n{re}\t{im}\t{:e}\t{}\n",
                r.tail_bound, r.terms_used
            );
            let json = json!({ "symbol": z.to_string(), "re": re, "im": im, "tail_bound": r.tail_bound, "terms_used": r.terms_used });
            Ok(Report::ok(tsv, json))
        }
        NumCmd::Verify { cert, digits } => {
            let text = if cert.as_os_str() == "-" {
                std::io::read_to_string(std::io::stdin())?
            } else {
                std::fs::read_to_string(cert)?
            };
            let cert: Certificate = serde_json::from_str(&text).map_err(invalid)?;
            let v = verify_certificate(&cert, *digits).map_err(invalid)?;
            let tsv = format!(
                "# residual\tpass\tdigits\tterms\n{}\t{}\t{}\t{}\n",
                v.residual, v.pass, v.digits, v.terms_used
            );
            let json = serde_json::to_value(&v).map_err(invalid)?;
            Ok(Report {
                tsv,
                json,
                pass: v.pass,
            })
        }
    }
}

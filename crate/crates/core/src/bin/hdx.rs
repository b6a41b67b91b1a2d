use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use hdx_core::builders::{
    complete_complex, complete_partite, cone_complex, faces_complex, partite_tensor, partitification, spherical_building, BlowUp,
};
use hdx_core::cochain::{delta, distance, TwoComplex};
use hdx_core::complex::PureComplex;
use hdx_core::cones::{auto_cone, build_cone_complete_faces, cone_decode, cone_family_bound, validate_cone, Budget, Cone};
use hdx_core::expansion::{h1_bruteforce, h1_sampled, DistanceOracle, Mode};
use hdx_core::gk::{check_hypotheses, exact_solver, gk_correct, vertex_star_decomposition};
use hdx_core::group::FiniteGroup;
use hdx_core::io::{read_artifact, validate, Artifact, BlowUpFile, CochainFile, ComplexFile, ConeFile, DecompositionFile, UgFile};
use hdx_core::rational::{parse_rational, Rational};
use hdx_core::rng::substream;
use hdx_core::spectral::{
    colored_swap_walk, containment_graph, edge_expansion, lambda2, local_spectral_profile, one_sided, swap_walk, EXPANSION_LIMIT,
};
use hdx_core::suites::{run_suite, Params, SUITES};
use hdx_core::ug::{affine_linear_generator, solve_on_expander, strong_satisfiability, Action, UgInstance};
use hdx_core::{HdxError, Result};

#[derive(Parser)]
#[command(name = "hdx", version, about = "Expansion of simplicial complexes, cones, decompositions and unique games")]
struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON output here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Coefficient group: z2, z:m or sym:l.
    #[arg(long, global = true, default_value = "z2")]
    group: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a complex, cone or decomposition artifact.
    Build(BuildArgs),
    /// Spectral data of a walk on a complex.
    Spectra {
        #[arg(long)]
        input: PathBuf,
        /// `underlying`, `containment:k,l`, `swap:k,l` or `colored-swap:J1,J2`
        /// with the colors of each set joined by `+` (e.g. `colored-swap:0+1,2`).
        #[arg(long, default_value = "underlying")]
        walk: String,
    },
    /// Coboundary or cosystolic expansion constant.
    H1 {
        #[arg(long)]
        input: PathBuf,
        /// Exhaustive enumeration or seeded sampling.
        #[arg(long, value_enum, default_value_t = SearchArg::Brute)]
        mode: SearchArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Coboundary)]
        expansion: ModeArg,
        /// Cochains drawn in sample mode.
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
    #[command(subcommand)]
    Cone(ConeCommand),
    #[command(subcommand)]
    Gk(GkCommand),
    #[command(subcommand)]
    Ug(UgCommand),
    /// Run a named experiment suite (or `all`); parameters as key=value.
    Suite { name: String, params: Vec<String> },
    /// Check any JSON artifact against its schema and invariants.
    Validate { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchArg {
    Brute,
    Sample,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Coboundary,
    Cosystolic,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(value_enum)]
    kind: BuildKind,
    /// Vertex count, or the ambient dimension for buildings.
    #[arg(long, alias = "ambient", default_value_t = 5)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long, default_value_t = 2)]
    q: u32,
    #[arg(long, value_delimiter = ',')]
    parts: Vec<usize>,
    /// Subspace dimensions kept in a building.
    #[arg(long, alias = "colors", value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Number of parts for `partitify`.
    #[arg(long, default_value_t = 2)]
    l: usize,
    /// Edge multiplicity for `blowup`.
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Draw each edge's multiplicity uniformly from 1..=m using the seed.
    #[arg(long)]
    vary: bool,
    /// Input complex for `cone`, `tensor`, `partitify` and `blowup`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Second factor for `tensor`.
    #[arg(long)]
    other: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BuildKind {
    /// Δ_n truncated at dimension d.
    Complete,
    /// Complete partite complex with the given part sizes.
    Partite,
    /// The cone X* over --input.
    Cone,
    /// Partite tensor of --input and --other.
    Tensor,
    /// The l-partite version of --input.
    Partitify,
    /// Blow-up of --input with every labeled triangle present.
    Blowup,
    /// Faces complex F^r Δ_n.
    Faces,
    /// Explicit cone on F^r Δ_n.
    FacesCone,
    /// Spherical building of SL_n(F_q), optionally restricted to --dims.
    Building,
    /// Vertex-star decomposition of Δ_n.
    VertexStar,
}

#[derive(Subcommand)]
enum ConeCommand {
    /// Search a cone with apex v0, or build the explicit cone on F^r Δ_n.
    Build {
        #[arg(long, required_unless_present = "faces")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        v0: usize,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        /// Explicit faces-complex cone as `n,r`.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        faces: Option<Vec<usize>>,
    },
    /// Check a cone artifact and report its diameter.
    Verify { cone: PathBuf },
    /// Decode a 1-cochain into a 0-cochain along the cone's paths.
    Decode { cone: PathBuf, cochain: PathBuf },
    /// The p/R bound from cones searched at every apex.
    Bound {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum GkCommand {
    /// Compute α, β, γ, η and the resulting bound.
    Check { decomposition: PathBuf },
    /// Correct a cochain through the decomposition.
    Run { decomposition: PathBuf, cochain: PathBuf },
}

#[derive(Subcommand)]
enum UgCommand {
    /// Planted affine instance over Z_m on the edges of a complex.
    Gen {
        complex: PathBuf,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 0.0)]
        rate: f64,
    },
    /// Value of an assignment, or the best value when none is given.
    Value {
        instance: PathBuf,
        #[arg(long, value_delimiter = ',')]
        assignment: Option<Vec<usize>>,
    },
    /// Decode on a complex carrying the instance graph.
    Solve {
        complex: PathBuf,
        instance: PathBuf,
        /// Lower bound on h^1 of the complex, for the certified value.
        #[arg(long)]
        beta: Option<String>,
    },
    StrongSat { instance: PathBuf },
}

struct Outcome {
    json: String,
    holds: bool,
}

fn ok<T: Serialize>(value: &T) -> Outcome {
    Outcome { json: serde_json::to_string_pretty(value).expect("output serializes"), holds: true }
}

fn checked<T: Serialize>(value: &T, holds: bool) -> Outcome {
    Outcome { holds, ..ok(value) }
}

fn load_complex(path: &Path) -> Result<PureComplex> {
    match read_artifact(path)? {
        Artifact::Complex(c) => c.build(),
        other => Err(HdxError::Parse(format!("{} holds a {} artifact, expected a complex", path.display(), other.kind()))),
    }
}

fn load_ug(path: &Path) -> Result<UgInstance> {
    match read_artifact(path)? {
        Artifact::Ug(u) => u.build(),
        other => Err(HdxError::Parse(format!("{} holds a {} artifact, expected a unique game", path.display(), other.kind()))),
    }
}

fn build(args: &BuildArgs, seed: u64) -> Result<Outcome> {
    let complex = |x: PureComplex| ok(&Artifact::Complex(ComplexFile::from_complex(&x)));
    let input = || args.input.as_deref().ok_or_else(|| HdxError::Parse("this build needs --input".into()));
    Ok(match args.kind {
        BuildKind::Complete => complex(complete_complex(args.n, args.d)?),
        BuildKind::Partite => complex(complete_partite(&args.parts)?),
        BuildKind::Cone => complex(cone_complex(&load_complex(input()?)?)?),
        BuildKind::Tensor => {
            let other = args.other.as_deref().ok_or_else(|| HdxError::Parse("tensor needs --other".into()))?;
            complex(partite_tensor(&load_complex(input()?)?, &load_complex(other)?)?)
        }
        BuildKind::Partitify => complex(partitification(&load_complex(input()?)?, args.l)?),
        BuildKind::Blowup => {
            let base = load_complex(input()?)?.skeleton(2)?;
            let mut rng = substream(seed, "blowup-multiplicity");
            let mult: BTreeMap<(usize, usize), usize> = base
                .faces(1)
                .into_iter()
                .map(|(e, _)| ((e[0], e[1]), if args.vary { rng.gen_range(1..=args.m.max(1)) } else { args.m }))
                .collect();
            ok(&Artifact::BlowUp(BlowUpFile::from_blowup(&BlowUp::complete_labels(base, &mult)?)))
        }
        BuildKind::Faces => complex(faces_complex(&complete_complex(args.n, args.n - 1)?, args.r)?.complex),
        BuildKind::FacesCone => {
            let (fx, cone) = build_cone_complete_faces(args.n, args.r)?;
            ok(&Artifact::Cone(ConeFile { complex: ComplexFile::from_complex(&fx.complex), cone }))
        }
        BuildKind::Building => complex(spherical_building(args.n, args.q, args.dims.as_deref())?.complex),
        BuildKind::VertexStar => ok(&Artifact::Decomposition(DecompositionFile::from_decomposition(&vertex_star_decomposition(args.n)?))),
    })
}

fn parse_pair(s: &str) -> Result<(usize, usize)> {
    let bad = || HdxError::Parse(format!("expected `k,l`, got {s:?}"));
    let (k, l) = s.split_once(',').ok_or_else(bad)?;
    Ok((k.trim().parse().map_err(|_| bad())?, l.trim().parse().map_err(|_| bad())?))
}

fn parse_color_sets(s: &str) -> Result<(Vec<usize>, Vec<usize>)> {
    let set = |t: &str| -> Result<Vec<usize>> {
        t.split('+').filter(|c| !c.trim().is_empty()).map(|c| c.trim().parse().map_err(|_| HdxError::Parse(format!("bad color {c:?}")))).collect()
    };
    let (a, b) = s.split_once(',').ok_or_else(|| HdxError::Parse(format!("expected `J1,J2`, got {s:?}")))?;
    Ok((set(a)?, set(b)?))
}

fn spectra(path: &Path, walk: &str) -> Result<Outcome> {
    let x = load_complex(path)?;
    let (kind, arg) = walk.split_once(':').unwrap_or((walk, ""));
    let face_walk = match kind {
        "underlying" => {
            let skeleton = x.underlying_graph()?;
            let mut out = json!({"walk": walk, "spectrum": lambda2(&skeleton)?});
            if skeleton.vertex_count() <= EXPANSION_LIMIT {
                out["edge_expansion"] = json!(edge_expansion(&skeleton)?.eta.map(|e| e.to_string()));
            }
            if x.dim() >= 1 {
                out["links"] = json!(local_spectral_profile(&x)?);
            }
            return Ok(ok(&out));
        }
        "containment" => {
            let (k, l) = parse_pair(arg)?;
            containment_graph(&x, k, l)?
        }
        "swap" => {
            let (k, l) = parse_pair(arg)?;
            swap_walk(&x, k, l)?
        }
        "colored-swap" => {
            let (j1, j2) = parse_color_sets(arg)?;
            colored_swap_walk(&x, &j1, &j2)?
        }
        other => return Err(HdxError::Parse(format!("unknown walk {other:?}"))),
    };
    let mut out = json!({"walk": walk, "bipartite": face_walk.bipartite, "spectrum": lambda2(&face_walk.graph)?});
    if face_walk.bipartite {
        out["one_sided"] = json!(lambda2(&one_sided(&face_walk)?)?);
    }
    Ok(ok(&out))
}

fn h1(path: &Path, group: &FiniteGroup, search: SearchArg, expansion: ModeArg, trials: u64, seed: u64) -> Result<Outcome> {
    let x = TwoComplex::from_complex(&load_complex(path)?.skeleton(2)?)?;
    Ok(match search {
        SearchArg::Sample => ok(&h1_sampled(&x, group, trials, seed, DistanceOracle::Exact)?),
        SearchArg::Brute => {
            let mode = match expansion {
                ModeArg::Coboundary => Mode::Coboundary,
                ModeArg::Cosystolic => Mode::Cosystolic,
            };
            ok(&h1_bruteforce(&x, group, mode)?)
        }
    })
}

fn load_cone(path: &Path) -> Result<(PureComplex, TwoComplex, Cone)> {
    let Artifact::Cone(file) = read_artifact(path)? else {
        return Err(HdxError::Parse(format!("{} is not a cone artifact", path.display())));
    };
    let px = file.complex.build()?;
    let x = TwoComplex::from_complex(&px.skeleton(2)?)?;
    Ok((px, x, file.cone))
}

fn cone(cmd: &ConeCommand) -> Result<Outcome> {
    match cmd {
        ConeCommand::Build { faces: Some(nr), .. } => {
            let (fx, cone) = build_cone_complete_faces(nr[0], nr[1])?;
            Ok(ok(&Artifact::Cone(ConeFile { complex: ComplexFile::from_complex(&fx.complex), cone })))
        }
        ConeCommand::Build { input, v0, max_len, faces: None } => {
            let input = input.as_deref().ok_or_else(|| HdxError::Parse("cone build needs --input or --faces".into()))?;
            let px = load_complex(input)?;
            let x = TwoComplex::from_complex(&px.skeleton(2)?)?;
            let found = auto_cone(&x, *v0, Budget { max_len: *max_len, ..Budget::default() })?;
            match found.cone {
                Some(cone) => Ok(ok(&Artifact::Cone(ConeFile { complex: ComplexFile::from_complex(&px), cone }))),
                None => Ok(checked(&found, false)),
            }
        }
        ConeCommand::Verify { cone } => {
            let (_, x, cone) = load_cone(cone)?;
            match validate_cone(&x, &cone) {
                Ok(v) => Ok(ok(&json!({"valid": true, "diameter": v.diameter, "edges": v.edges}))),
                Err(e) => Ok(checked(&json!({"valid": false, "error": e.to_string()}), false)),
            }
        }
        ConeCommand::Decode { cone, cochain } => {
            let (px, x, cone) = load_cone(cone)?;
            validate_cone(&x, &cone)?;
            let Artifact::Cochain(file) = read_artifact(cochain)? else {
                return Err(HdxError::Parse(format!("{} is not a cochain artifact", cochain.display())));
            };
            let (group, f) = file.build(&x)?;
            let g = cone_decode(&x, &group, &cone, &f)?;
            let dist = distance(&x, &f, &delta(&x, &group, &g)?)?;
            Ok(ok(&json!({
                "g": CochainFile::from_cochain(&x, &group, &g, Some(&px)),
                "distance_to_decoded": dist.to_string(),
            })))
        }
        ConeCommand::Bound { input } => {
            let x = TwoComplex::from_complex(&load_complex(input)?.skeleton(2)?)?;
            let mut cones = Vec::new();
            for v0 in 0..x.vertex_count() {
                let found = auto_cone(&x, v0, Budget::default())?;
                match found.cone {
                    Some(c) => cones.push(c),
                    None => return Ok(checked(&json!({"apex": v0, "failed_edges": found.failed_edges}), false)),
                }
            }
            Ok(ok(&cone_family_bound(&x, &cones)?))
        }
    }
}

fn load_decomposition(path: &Path) -> Result<hdx_core::gk::Decomposition> {
    match read_artifact(path)? {
        Artifact::Decomposition(d) => d.build(),
        other => Err(HdxError::Parse(format!("{} holds a {} artifact, expected a decomposition", path.display(), other.kind()))),
    }
}

fn gk(cmd: &GkCommand, group: &FiniteGroup) -> Result<Outcome> {
    match cmd {
        GkCommand::Check { decomposition } => Ok(ok(&check_hypotheses(&load_decomposition(decomposition)?, group)?)),
        GkCommand::Run { decomposition, cochain } => {
            let d = load_decomposition(decomposition)?;
            let Artifact::Cochain(file) = read_artifact(cochain)? else {
                return Err(HdxError::Parse(format!("{} is not a cochain artifact", cochain.display())));
            };
            let x = TwoComplex::from_complex(&d.complex)?;
            let (group, f) = file.build(&x)?;
            let hyp = check_hypotheses(&d, &group)?;
            let run = gk_correct(&d, &group, &f, &exact_solver, &exact_solver)?;
            let holds = run.ledger.distance * hyp.bound <= run.ledger.wt_delta_f;
            let g_file = CochainFile::from_cochain(&x, &group, &run.g, None);
            Ok(checked(&json!({"g": g_file, "ledger": run.ledger, "bound": hyp.bound.to_string(), "holds": holds}), holds))
        }
    }
}

fn ug(cmd: &UgCommand, seed: u64) -> Result<Outcome> {
    match cmd {
        UgCommand::Gen { complex, m, rate } => {
            let x = TwoComplex::from_complex(&load_complex(complex)?.skeleton(2)?)?;
            let inst = affine_linear_generator(&x, *m, None, *rate, seed)?;
            let group = FiniteGroup::cyclic(*m)?;
            let u = UgInstance::from_cochain(&x, &inst.cochain, &Action::natural(&group))?;
            Ok(ok(&Artifact::Ug(UgFile::from_instance(&u))))
        }
        UgCommand::Value { instance, assignment } => {
            let u = load_ug(instance)?;
            match assignment {
                Some(h) => Ok(ok(&json!({"value": u.value(h)?.to_string()}))),
                None => {
                    let (v, h) = u.max_value()?;
                    Ok(ok(&json!({"max_value": v.to_string(), "assignment": h})))
                }
            }
        }
        UgCommand::Solve { complex, instance, beta } => {
            let x = TwoComplex::from_complex(&load_complex(complex)?.skeleton(2)?)?;
            let u = load_ug(instance)?;
            let (sym, f) = u.cochain_on(&x)?;
            let beta: Option<Rational> = beta.as_deref().map(parse_rational).transpose()?;
            let rep = solve_on_expander(&x, &sym, &Action::natural(&sym), &f, &exact_solver, beta)?;
            Ok(checked(&rep, rep.holds))
        }
        UgCommand::StrongSat { instance } => Ok(ok(&strong_satisfiability(&load_ug(instance)?)?)),
    }
}

fn suite(name: &str, raw: &[String], seed: u64) -> Result<Outcome> {
    let mut params = Params::new();
    for p in raw {
        let (k, v) = p.split_once('=').ok_or_else(|| HdxError::Parse(format!("parameter {p:?} is not key=value")))?;
        params.insert(k.into(), v.into());
    }
    let names: Vec<&str> = if name == "all" { SUITES.iter().map(|s| s.0).collect() } else { vec![name] };
    let mut reports = Vec::new();
    for n in names {
        let rep = run_suite(n, seed, &params)?;
        eprintln!("{}", rep.summary());
        reports.push(rep);
    }
    let holds = reports.iter().all(|r| r.pass);
    Ok(if reports.len() == 1 { checked(&reports[0], holds) } else { checked(&reports, holds) })
}

fn run(cli: &Cli) -> Result<Outcome> {
    let group = FiniteGroup::parse(&cli.group)?;
    match &cli.command {
        Command::Build(args) => build(args, cli.seed),
        Command::Spectra { input, walk } => spectra(input, walk),
        Command::H1 { input, mode, expansion, trials } => h1(input, &group, *mode, *expansion, *trials, cli.seed),
        Command::Cone(c) => cone(c),
        Command::Gk(c) => gk(c, &group),
        Command::Ug(c) => ug(c, cli.seed),
        Command::Suite { name, params } => suite(name, params, cli.seed),
        Command::Validate { file } => {
            let diagnostics = validate(&std::fs::read_to_string(file)?);
            let clean = diagnostics.is_empty();
            Ok(checked(&json!({"valid": clean, "diagnostics": diagnostics}), clean))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.report {
                Some(path) => std::fs::write(path, format!("{}\n", out.json)),
                None => match writeln!(std::io::stdout(), "{}", out.json) {
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                    other => other,
                },
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if out.holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

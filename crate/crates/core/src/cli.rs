//! Command-line front end. `run` parses argv, dispatches to the library and
//! returns the text to print with the exit code: 0 success, 1 a mathematical
//! check failed (the report carries the witness), 2 bad input.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::algebra::{
    check_structure, elem_from_json_with, elem_label, elem_to_json, g_complex, mc_verify, Algebra,
    Elem, FinitePresentation,
};
use crate::convolution::{
    mapping_homotopy_groups, mc_system, poly_eval, scalar_extension, Coalgebra, CommAlgebra,
};
use crate::dupont::{subset_elems, subset_from, verify_contraction, whitney, Cochain, Subset};
use crate::integration::{bch, build_mc, horn_fill, is_simplex, SimplexAssignment};
use crate::lie::{bch_oracle, FreeLie};
use crate::linalg::{fmt_q, q, Q};
use crate::models::{
    build_model, homotopy_groups, minimal_generators, simplicial_homology, SimplicialSet,
};
use crate::transfer::{decomposition_table, transferred_operation};
use crate::tree::{enumerate_trees, Tree};
use crate::Error;

#[derive(Parser, Debug)]
#[command(
    name = "abs-linf",
    about = "Exact computations with curved absolute L-infinity algebras",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Corked rooted trees
    #[command(subcommand)]
    Trees(TreesCmd),
    /// Polynomial forms and the Dupont contraction
    #[command(subcommand)]
    Dupont(DupontCmd),
    /// Transferred operations and decomposition tables
    #[command(subcommand)]
    Transfer(TransferCmd),
    /// The Maurer-Cartan cosimplicial algebra
    #[command(subcommand)]
    Mc(McCmd),
    /// Simplices of the integration
    #[command(subcommand)]
    Simplex(SimplexCmd),
    /// Horn filling
    #[command(subcommand)]
    Horn(HornCmd),
    /// Baker-Campbell-Hausdorff series in the Lyndon basis
    Bch {
        #[arg(long, default_value_t = 6)]
        weight: usize,
    },
    /// Rational models of simplicial sets
    #[command(subcommand)]
    Model(ModelCmd),
    /// Mapping spaces via convolution algebras
    #[command(subcommand)]
    Map(MapCmd),
    /// Scalar extension along a finite-dimensional commutative algebra
    Extend(ExtendArgs),
    /// Identity checks
    #[command(subcommand)]
    Check(CheckCmd),
}

#[derive(Subcommand, Debug)]
enum TreesCmd {
    Enum {
        #[arg(long)]
        arity: usize,
        #[arg(long, default_value_t = 6)]
        weight: usize,
        #[arg(long)]
        corks: bool,
    },
    Graft {
        tree: String,
        children: Vec<String>,
    },
    Splittings {
        tree: String,
    },
    Symmetry {
        tree: String,
    },
}

#[derive(Subcommand, Debug)]
enum DupontCmd {
    /// Whitney form of a face, e.g. --face 0,2
    Whitney {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        face: String,
    },
    /// The contraction identities on all monomial forms
    Check(DupontCheck),
}

#[derive(Args, Debug)]
struct DupontCheck {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    degree: u32,
}

#[derive(Subcommand, Debug)]
enum TransferCmd {
    /// DecompositionTable JSON of a tree on Δⁿ
    Table {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        tree: String,
    },
    /// μ_τ on Whitney basis cochains, inputs like "0;0,1"
    Op {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        tree: String,
        #[arg(long, default_value = "")]
        inputs: String,
    },
}

#[derive(Subcommand, Debug)]
enum McCmd {
    Build {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        weight: usize,
    },
}

#[derive(Subcommand, Debug)]
enum SimplexCmd {
    Check {
        /// presentation JSON file, or g_complex / lie:N
        #[arg(long)]
        algebra: String,
        /// SimplexAssignment JSON file
        #[arg(long)]
        assignment: String,
    },
}

#[derive(Subcommand, Debug)]
enum HornCmd {
    Fill {
        #[arg(long)]
        algebra: String,
        /// horn JSON file: {"n", "k", "faces": [...], "top": element}
        #[arg(long)]
        horn: String,
    },
}

#[derive(Subcommand, Debug)]
enum ModelCmd {
    Build {
        /// simplicial set JSON file, or point / empty / simplex:N / boundary:N / sphere:N
        space: String,
        #[arg(long, default_value_t = 6)]
        weight: usize,
    },
    Pi {
        space: String,
        /// base vertex id, default the first vertex
        #[arg(long)]
        base: Option<String>,
        #[arg(long, default_value = "1..4")]
        degrees: String,
        #[arg(long, default_value_t = 6)]
        weight: usize,
    },
    Minimal {
        space: String,
        #[arg(long, default_value_t = 2)]
        weight: usize,
    },
}

#[derive(Subcommand, Debug)]
enum MapCmd {
    Pi {
        /// coalgebra JSON file, or a simplicial set with strict chains (sphere:N, point)
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        /// base vertex id, default the first vertex
        #[arg(long)]
        base: Option<String>,
        #[arg(long, default_value = "1..3")]
        degrees: String,
        #[arg(long, default_value_t = 6)]
        weight: usize,
    },
}

#[derive(Args, Debug)]
struct ExtendArgs {
    #[arg(long)]
    algebra: String,
    /// commutative algebra JSON file, or gaussian / rational
    #[arg(long)]
    with: String,
    /// candidate MC element (JSON file) in the extension
    #[arg(long)]
    candidate: Option<String>,
    /// integer grid for every degree-0 coordinate, e.g. -3..3
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
}

#[derive(Subcommand, Debug)]
enum CheckCmd {
    Dupont(DupontCheck),
    Structure {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value = "-2..2", allow_hyphen_values = true)]
        degrees: String,
        #[arg(long, default_value_t = 3)]
        arity: usize,
    },
    Mc {
        #[arg(long)]
        algebra: String,
        /// element JSON file
        #[arg(long)]
        element: String,
    },
    /// d² + l₂(l₀, −) = 0 on mc^n
    McAlgebra {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        weight: usize,
    },
    /// bch against log(eˣe^y)
    Bch {
        #[arg(long, default_value_t = 5)]
        weight: usize,
    },
    /// minimal generators of L(X) against simplicial homology
    Model {
        space: String,
        #[arg(long, default_value_t = 3)]
        weight: usize,
    },
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn json(v: Value, ok: bool) -> Outcome {
        Outcome {
            code: if ok { 0 } else { 1 },
            stdout: serde_json::to_string_pretty(&v).expect("serializable") + "\n",
            stderr: String::new(),
        }
    }

    fn text(s: String) -> Outcome {
        Outcome {
            code: 0,
            stdout: s + "\n",
            stderr: String::new(),
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Structure(_) | Error::NotMaurerCartan(_) => 1,
        _ => 2,
    }
}

pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match dispatch(cli.cmd) {
        Ok(o) => with_echo(o, &echo),
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// Adds the command echo and exit status to JSON object reports.
fn with_echo(mut o: Outcome, echo: &[String]) -> Outcome {
    if let Ok(Value::Object(mut m)) = serde_json::from_str::<Value>(&o.stdout) {
        m.insert("command".into(), json!(echo));
        m.insert("exit_status".into(), json!(o.code));
        o.stdout = serde_json::to_string_pretty(&Value::Object(m)).expect("serializable") + "\n";
    }
    o
}

fn read_json(path: &str) -> crate::Result<(Value, String)> {
    let bytes = std::fs::read(path).map_err(|e| Error::Input(format!("{path}: {e}")))?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let v = serde_json::from_slice(&bytes).map_err(|e| Error::Input(format!("{path}: {e}")))?;
    Ok((v, digest))
}

fn parse_range(s: &str) -> crate::Result<RangeInclusive<i64>> {
    let bad = || Error::Input(format!("expected a range like 2..5, got {s}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

fn parse_face(s: &str) -> crate::Result<Subset> {
    let elems: Result<Vec<usize>, _> = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<usize>())
        .collect();
    let elems = elems.map_err(|_| Error::Input(format!("bad face {s}")))?;
    if elems.is_empty() {
        return Err(Error::Input("empty face".into()));
    }
    Ok(subset_from(&elems))
}

fn parse_tree(s: &str) -> crate::Result<Tree> {
    s.parse::<Tree>()
}

fn load_algebra(
    arg: &str,
    inputs: &mut BTreeMap<String, String>,
) -> crate::Result<FinitePresentation> {
    if arg == "g_complex" {
        return Ok(g_complex(6));
    }
    if let Some(n) = arg.strip_prefix("lie:") {
        let n: usize = n
            .parse()
            .map_err(|_| Error::Input(format!("bad bracket length in {arg}")))?;
        return FreeLie::new(n.max(1)).presentation();
    }
    let (v, digest) = read_json(arg)?;
    inputs.insert(arg.to_string(), digest);
    FinitePresentation::from_json(&v)
}

fn load_space(arg: &str, inputs: &mut BTreeMap<String, String>) -> crate::Result<SimplicialSet> {
    if let Some(x) = SimplicialSet::named(arg) {
        return Ok(x);
    }
    if !std::path::Path::new(arg).exists() {
        return Err(Error::Input(format!("{arg} is neither a file nor a built-in space (point, empty, simplex:N, boundary:N, sphere:N)")));
    }
    let (v, digest) = read_json(arg)?;
    inputs.insert(arg.to_string(), digest);
    SimplicialSet::from_json(&v)
}

fn load_coalgebra(arg: &str, inputs: &mut BTreeMap<String, String>) -> crate::Result<Coalgebra> {
    if let Some(x) = SimplicialSet::named(arg) {
        return Coalgebra::from_simplicial_set(&x);
    }
    let (v, digest) = read_json(arg)?;
    inputs.insert(arg.to_string(), digest);
    if v.get("cells").is_some() {
        return Coalgebra::from_simplicial_set(&SimplicialSet::from_json(&v)?);
    }
    Coalgebra::from_json(&v)
}

fn load_comm(arg: &str, inputs: &mut BTreeMap<String, String>) -> crate::Result<CommAlgebra> {
    match arg {
        "gaussian" => Ok(CommAlgebra::gaussian()),
        "rational" => Ok(CommAlgebra {
            labels: vec!["1".into()],
            degrees: vec![0],
            unit: Elem::basis(0),
            mult: BTreeMap::from([((0, 0), Elem::basis(0))]),
            differential: vec![Elem::zero()],
        }),
        path => {
            let (v, digest) = read_json(path)?;
            inputs.insert(path.to_string(), digest);
            CommAlgebra::from_json(&v)
        }
    }
}

fn assignment_from_json(
    alg: &FinitePresentation,
    v: &Value,
) -> crate::Result<SimplexAssignment<usize>> {
    let n = v["n"]
        .as_u64()
        .ok_or_else(|| Error::Input("assignment needs n".into()))? as usize;
    if n > 3 {
        return Err(Error::Unsupported("simplices of dimension above 3".into()));
    }
    let mut phi = SimplexAssignment::new(n);
    for f in v["faces"].as_array().map(|a| a.as_slice()).unwrap_or(&[]) {
        let elems: Option<Vec<usize>> = f["face"]
            .as_array()
            .ok_or_else(|| Error::Input("face must be a list".into()))?
            .iter()
            .map(|x| x.as_u64().map(|x| x as usize))
            .collect();
        let elems = elems.ok_or_else(|| Error::Input("face entries are vertex numbers".into()))?;
        if elems.is_empty() || elems.iter().any(|&e| e > n) {
            return Err(Error::Input(format!("{elems:?} is not a face of Δ^{n}")));
        }
        phi.set(subset_from(&elems), alg.elem_from_json(&f["value"])?);
    }
    phi.validate(alg)?;
    Ok(phi)
}

fn assignment_to_json(alg: &FinitePresentation, phi: &SimplexAssignment<usize>) -> Value {
    let faces: Vec<Value> = phi
        .faces
        .iter()
        .map(|(s, v)| json!({"face": subset_elems(*s), "value": elem_to_json(alg, v)}))
        .collect();
    json!({"n": phi.n, "faces": faces})
}

fn base_vertex(x: &SimplicialSet, base: Option<String>) -> crate::Result<String> {
    match base {
        Some(b) => Ok(b),
        None => x
            .cells
            .iter()
            .find(|c| c.dim == 0)
            .map(|c| c.id.clone())
            .ok_or_else(|| Error::Input("space has no vertices".into())),
    }
}

fn dims_json(d: &BTreeMap<i64, usize>) -> Value {
    Value::Object(d.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

fn dispatch(cmd: Cmd) -> crate::Result<Outcome> {
    let mut inputs: BTreeMap<String, String> = BTreeMap::new();
    match cmd {
        Cmd::Trees(t) => trees(t),
        Cmd::Dupont(DupontCmd::Whitney { n, face }) => {
            let s = parse_face(&face)?;
            Ok(Outcome::text(whitney(n, s)?.to_string()))
        }
        Cmd::Dupont(DupontCmd::Check(c)) | Cmd::Check(CheckCmd::Dupont(c)) => {
            if c.n > 3 {
                return Err(Error::Unsupported("contraction checks above n = 3".into()));
            }
            let r = verify_contraction(c.n, c.degree);
            let ok = r.passed();
            Ok(Outcome::json(
                json!({"check": "dupont", "n": r.n, "max_poly_degree": r.max_poly_degree, "forms_checked": r.forms_checked, "passed": ok, "failure": r.failure}),
                ok,
            ))
        }
        Cmd::Transfer(TransferCmd::Table { n, tree }) => {
            let t = decomposition_table(n, &parse_tree(&tree)?, None)?;
            Ok(Outcome::json(t.to_json(), true))
        }
        Cmd::Transfer(TransferCmd::Op {
            n,
            tree,
            inputs: ins,
        }) => {
            let tau = parse_tree(&tree)?;
            let cochains: crate::Result<Vec<Cochain>> = ins
                .split(';')
                .filter(|p| !p.trim().is_empty())
                .map(|p| Ok(Cochain::basis(n, parse_face(p)?)))
                .collect();
            let out = transferred_operation(n, &tau, &cochains?)?;
            let terms: Vec<Value> = out
                .coeffs
                .iter()
                .map(|(s, c)| json!({"face": subset_elems(*s), "coeff": fmt_q(c)}))
                .collect();
            Ok(Outcome::json(
                json!({"n": n, "tree": tau.to_string(), "output": terms}),
                true,
            ))
        }
        Cmd::Mc(McCmd::Build { n, weight }) => {
            if n > 3 {
                return Err(Error::Unsupported("mc^n is capped at n = 3".into()));
            }
            let a = build_mc(n, weight)?;
            let gens: Vec<Value> = a
                .generators
                .iter()
                .enumerate()
                .map(|(i, g)| json!({"label": g.label, "degree": g.degree, "d": elem_label(&a, &a.gen_d[i])}))
                .collect();
            let check = a.check_generators();
            let ok = check.is_ok();
            Ok(Outcome::json(
                json!({"n": n, "weight": weight, "generators": gens, "curvature_identity": ok, "failure": check.err().map(|e| e.to_string())}),
                ok,
            ))
        }
        Cmd::Simplex(SimplexCmd::Check {
            algebra,
            assignment,
        }) => {
            let alg = load_algebra(&algebra, &mut inputs)?;
            let (v, digest) = read_json(&assignment)?;
            inputs.insert(assignment.clone(), digest);
            let phi = assignment_from_json(&alg, &v)?;
            let (ok, res) = is_simplex(&alg, &phi)?;
            let residuals: Vec<Value> = res
                .iter()
                .filter(|(_, r)| !r.is_zero())
                .map(|(s, r)| json!({"face": subset_elems(*s), "residual": elem_to_json(&alg, r)}))
                .collect();
            Ok(Outcome::json(
                json!({"simplex": ok, "residuals": residuals, "weight": alg.max_weight, "inputs": inputs}),
                ok,
            ))
        }
        Cmd::Horn(HornCmd::Fill { algebra, horn }) => {
            let alg = load_algebra(&algebra, &mut inputs)?;
            let (v, digest) = read_json(&horn)?;
            inputs.insert(horn.clone(), digest);
            let k = v["k"]
                .as_u64()
                .ok_or_else(|| Error::Input("horn needs k".into()))? as usize;
            let h = assignment_from_json(&alg, &v)?;
            let top = alg.elem_from_json(&v["top"])?;
            let filled = horn_fill(&alg, h.n, k, &h, &top)?;
            let missing = ((1u32 << (h.n + 1)) - 1) & !(1 << k);
            Ok(Outcome::json(
                json!({"filled": assignment_to_json(&alg, &filled), "missing_face": subset_elems(missing), "value": elem_to_json(&alg, &filled.get(missing)), "inputs": inputs}),
                true,
            ))
        }
        Cmd::Bch { weight } => {
            if weight == 0 {
                return Err(Error::Input("weight must be at least 1".into()));
            }
            let (lie, b) = bch(weight)?;
            let terms: Vec<Value> = b
                .terms
                .iter()
                .map(|(i, c)| json!({"basis": lie.label(*i), "coeff": fmt_q(c)}))
                .collect();
            let alg = lie.presentation()?;
            Ok(Outcome::json(
                json!({"weight": weight, "terms": terms, "series": elem_label(&alg, &b)}),
                true,
            ))
        }
        Cmd::Model(ModelCmd::Build { space, weight }) => {
            let x = load_space(&space, &mut inputs)?;
            let l = build_model(&x, weight)?;
            let gens: Vec<Value> =
                l.generators.iter().enumerate().map(|(i, g)| json!({"label": g.label, "degree": g.degree, "d": elem_label(&l, &l.gen_d[i])})).collect();
            let check = l.check_generators();
            let ok = check.is_ok();
            Ok(Outcome::json(
                json!({"weight": weight, "generators": gens, "curvature_identity": ok, "failure": check.err().map(|e| e.to_string()), "inputs": inputs}),
                ok,
            ))
        }
        Cmd::Model(ModelCmd::Pi {
            space,
            base,
            degrees,
            weight,
        }) => {
            let x = load_space(&space, &mut inputs)?;
            let base = base_vertex(&x, base)?;
            let r = homotopy_groups(&x, &base, parse_range(&degrees)?, weight)?;
            Ok(Outcome::json(
                json!({"base": r.base, "weight": r.weight, "dims": dims_json(&r.dims), "inputs": inputs}),
                true,
            ))
        }
        Cmd::Model(ModelCmd::Minimal { space, weight }) => {
            let x = load_space(&space, &mut inputs)?;
            let g = minimal_generators(&build_model(&x, weight.max(1))?)?;
            Ok(Outcome::json(
                json!({"generators": dims_json(&g), "inputs": inputs}),
                true,
            ))
        }
        Cmd::Map(MapCmd::Pi {
            source,
            target,
            base,
            degrees,
            weight,
        }) => {
            let c = load_coalgebra(&source, &mut inputs)?;
            let x = load_space(&target, &mut inputs)?;
            let base = base_vertex(&x, base)?;
            let r = mapping_homotopy_groups(&c, &x, &base, parse_range(&degrees)?, weight)?;
            Ok(Outcome::json(
                json!({"base": r.base, "weight": r.weight, "dims": dims_json(&r.dims), "inputs": inputs}),
                true,
            ))
        }
        Cmd::Extend(a) => extend(a, &mut inputs),
        Cmd::Check(CheckCmd::Structure {
            algebra,
            degrees,
            arity,
        }) => {
            let alg = load_algebra(&algebra, &mut inputs)?;
            alg.validate()?;
            let r = check_structure(&alg, parse_range(&degrees)?, arity, 5000);
            let ok = r.passed();
            Ok(Outcome::json(
                json!({"checked": r.checked, "passed": ok, "curvature_failure": r.curvature_failure, "relation_failure": r.relation_failure, "literal_sign_holds": r.literal_sign_holds, "inputs": inputs}),
                ok,
            ))
        }
        Cmd::Check(CheckCmd::Mc { algebra, element }) => {
            let alg = load_algebra(&algebra, &mut inputs)?;
            let (v, digest) = read_json(&element)?;
            inputs.insert(element.clone(), digest);
            let e = alg.elem_from_json(&v)?;
            let (ok, res) = mc_verify(&alg, &e)?;
            Ok(Outcome::json(
                json!({"maurer_cartan": ok, "residual": elem_to_json(&alg, &res), "inputs": inputs}),
                ok,
            ))
        }
        Cmd::Check(CheckCmd::McAlgebra { n, weight }) => {
            if n > 3 {
                return Err(Error::Unsupported("mc^n is capped at n = 3".into()));
            }
            let a = build_mc(n, weight)?;
            let check = a.check_generators();
            let ok = check.is_ok();
            Ok(Outcome::json(
                json!({"n": n, "weight": weight, "passed": ok, "failure": check.err().map(|e| e.to_string())}),
                ok,
            ))
        }
        Cmd::Check(CheckCmd::Bch { weight }) => {
            if weight == 0 {
                return Err(Error::Input("weight must be at least 1".into()));
            }
            let (lie, b) = bch(weight)?;
            let ok = lie.expand(&b) == bch_oracle(weight);
            Ok(Outcome::json(json!({"weight": weight, "passed": ok}), ok))
        }
        Cmd::Check(CheckCmd::Model { space, weight }) => {
            let x = load_space(&space, &mut inputs)?;
            let l = build_model(&x, weight)?;
            let check = l.check_generators();
            let g = minimal_generators(&l)?;
            let h = simplicial_homology(&x)?;
            let ok = check.is_ok() && g == h;
            Ok(Outcome::json(
                json!({"curvature_identity": check.is_ok(), "minimal_generators": dims_json(&g), "simplicial_homology": dims_json(&h), "passed": ok, "inputs": inputs}),
                ok,
            ))
        }
    }
}

fn trees(t: TreesCmd) -> crate::Result<Outcome> {
    let list = |ts: &[Tree]| {
        format!(
            "[{}]",
            ts.iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        )
    };
    match t {
        TreesCmd::Enum {
            arity,
            weight,
            corks,
        } => {
            if arity + weight > 12 {
                return Err(Error::Unsupported(
                    "tree enumeration is capped at arity + weight ≤ 12".into(),
                ));
            }
            Ok(Outcome::text(list(&enumerate_trees(arity, weight, corks))))
        }
        TreesCmd::Graft { tree, children } => {
            let tau = parse_tree(&tree)?;
            let ch: crate::Result<Vec<Tree>> = children.iter().map(|c| parse_tree(c)).collect();
            Ok(Outcome::text(tau.graft(&ch?)?.to_string()))
        }
        TreesCmd::Splittings { tree } => {
            let tau = parse_tree(&tree)?;
            let v: Vec<Value> = tau
                .vertex_splittings()?
                .into_iter()
                .map(|(t, m, s)| json!({"tree": t.to_string(), "multiplicity": m, "sign": s}))
                .collect();
            Ok(Outcome::json(Value::Array(v), true))
        }
        TreesCmd::Symmetry { tree } => Ok(Outcome::text(
            parse_tree(&tree)?.symmetry_coefficient().to_string(),
        )),
    }
}

fn extend(a: ExtendArgs, inputs: &mut BTreeMap<String, String>) -> crate::Result<Outcome> {
    let g = load_algebra(&a.algebra, inputs)?;
    let b = load_comm(&a.with, inputs)?;
    let ext = scalar_extension(g, &b)?;
    let sys = mc_system(&ext);
    let mut report = json!({"system": sys.to_json(&ext), "inputs": inputs.clone()});
    let mut ok = true;
    if let Some(path) = &a.candidate {
        let (v, digest) = read_json(path)?;
        report["inputs"][path] = json!(digest);
        let keys = ext.basis(0);
        let labels: Vec<String> = keys.iter().map(|k| ext.key_label(k)).collect();
        let e = elem_from_json_with(&v, &|l| labels.iter().position(|x| x == l))?;
        let mut cand = Elem::zero();
        for (i, c) in &e.terms {
            cand.add_term(keys[*i], c.clone());
        }
        let (pass, res) = mc_verify(&ext, &cand)?;
        ok &= pass;
        report["candidate"] = json!({"maurer_cartan": pass, "residual": elem_to_json(&ext, &res)});
    }
    if let Some(grid) = &a.grid {
        let r = parse_range(grid)?;
        let nv = sys.variables.len();
        if nv > 4 {
            return Err(Error::Unsupported(
                "grid search over more than 4 coordinates".into(),
            ));
        }
        let values: Vec<i64> = r.collect();
        let mut solutions = Vec::new();
        let mut idx = vec![0usize; nv];
        loop {
            let point: Vec<Q> = idx.iter().map(|&i| q(values[i])).collect();
            if sys
                .equations
                .iter()
                .all(|(_, p)| poly_eval(p, &point) == q(0))
            {
                solutions.push(point.iter().map(fmt_q).collect::<Vec<_>>());
            }
            let mut j = 0;
            while j < nv {
                idx[j] += 1;
                if idx[j] < values.len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == nv {
                break;
            }
        }
        report["grid"] = json!({"range": grid, "solutions": solutions});
    }
    Ok(Outcome::json(report, ok))
}

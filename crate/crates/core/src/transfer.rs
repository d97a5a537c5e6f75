//! Homotopy transfer along the Dupont contraction: the operations μ_τ on
//! cochains of Δⁿ and the dual elementary decompositions of the chains a_I.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use sha2::{Digest, Sha256};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::algebra::Elem;
use crate::dupont::{
    cochain_d, dupont_homotopy, elementary_projection, include, nonempty_subsets, subset_elems,
    Cochain, PolyForm, Subset,
};
use crate::free::{make_node, Term};
use crate::linalg::{fmt_q, q, Q};
use crate::tree::{enumerate_trees, Tree};
use crate::{Error, Result};

/// μ_τ(inputs): i on leaves, wedge at vertices, h on internal edges, p at the root.
/// The cork alone gives p(1). Trees mixing corks and leaves are zero.
pub fn transferred_operation(n: usize, tau: &Tree, inputs: &[Cochain]) -> Result<Cochain> {
    if inputs.len() != tau.arity() {
        return Err(Error::Arity {
            expected: tau.arity(),
            got: inputs.len(),
        });
    }
    if let Some(c) = inputs.iter().find(|c| c.n != n) {
        return Err(Error::Input(format!("cochain on Δ^{} used on Δ^{n}", c.n)));
    }
    match tau {
        Tree::Cork => return Ok(elementary_projection(n, &PolyForm::one(n))),
        Tree::Leaf => return Ok(inputs[0].clone()),
        _ => {}
    }
    if tau.has_cork() {
        return Ok(Cochain::zero(n));
    }
    let forms: Vec<PolyForm> = inputs.iter().map(include).collect();
    let mut it = forms.iter();
    let top = eval_forms(n, tau, &mut it, true);
    Ok(elementary_projection(n, &top))
}

fn eval_forms<'a>(
    n: usize,
    t: &Tree,
    it: &mut impl Iterator<Item = &'a PolyForm>,
    root: bool,
) -> PolyForm {
    match t {
        Tree::Leaf => it.next().unwrap().clone(),
        Tree::Cork => PolyForm::one(n),
        Tree::Node(ch) => {
            let mut acc = PolyForm::one(n);
            for c in ch {
                acc = acc.wedge(&eval_forms(n, c, it, false));
            }
            if root {
                acc
            } else {
                dupont_homotopy(n, &acc)
            }
        }
    }
}

/// Dual decompositions Δ_τ(a_I) for one tree on Δⁿ: for every I, the tuples
/// (I₁,…,I_m) and the coefficient of ω_I in μ_τ(ω_{I₁},…,ω_{I_m}).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionTable {
    pub n: usize,
    pub tree: Tree,
    pub entries: BTreeMap<Subset, Vec<(Vec<Subset>, Q)>>,
}

impl DecompositionTable {
    pub fn to_json(&self) -> Value {
        let mut entries = Vec::new();
        for (i, list) in &self.entries {
            for (tuple, c) in list {
                entries.push(json!({
                    "face": subset_elems(*i),
                    "tuple": tuple.iter().map(|s| subset_elems(*s)).collect::<Vec<_>>(),
                    "coeff": fmt_q(c),
                }));
            }
        }
        json!({ "n": self.n, "tree": self.tree.to_string(), "entries": entries })
    }

    pub fn from_json(v: &Value) -> Result<DecompositionTable> {
        let bad = |m: &str| Error::Input(format!("decomposition table: {m}"));
        let n = v["n"].as_u64().ok_or_else(|| bad("missing n"))? as usize;
        let tree: Tree = v["tree"]
            .as_str()
            .ok_or_else(|| bad("missing tree"))?
            .parse()?;
        let mut entries: BTreeMap<Subset, Vec<(Vec<Subset>, Q)>> = BTreeMap::new();
        for e in v["entries"]
            .as_array()
            .ok_or_else(|| bad("missing entries"))?
        {
            let face = parse_subset(&e["face"]).ok_or_else(|| bad("bad face"))?;
            let tuple: Option<Vec<Subset>> = e["tuple"]
                .as_array()
                .ok_or_else(|| bad("bad tuple"))?
                .iter()
                .map(parse_subset)
                .collect();
            let c = crate::linalg::parse_q(e["coeff"].as_str().ok_or_else(|| bad("bad coeff"))?)?;
            entries
                .entry(face)
                .or_default()
                .push((tuple.ok_or_else(|| bad("bad tuple"))?, c));
        }
        Ok(DecompositionTable { n, tree, entries })
    }
}

fn parse_subset(v: &Value) -> Option<Subset> {
    let mut s = 0;
    for x in v.as_array()? {
        s |= 1 << x.as_u64()?;
    }
    Some(s)
}

type TableKey = (usize, Tree, Option<Vec<Subset>>);

fn table_cache() -> &'static Mutex<HashMap<TableKey, Arc<DecompositionTable>>> {
    static C: OnceLock<Mutex<HashMap<TableKey, Arc<DecompositionTable>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Memoized decomposition table. `allowed` restricts the faces that may appear
/// in tuples (faces outside it are never computed).
pub fn decomposition_table(
    n: usize,
    tau: &Tree,
    allowed: Option<&[Subset]>,
) -> Result<Arc<DecompositionTable>> {
    let key = (n, tau.clone(), allowed.map(|a| a.to_vec()));
    if let Some(t) = table_cache().lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let t = Arc::new(match disk_cache_dir() {
        Some(dir) => cached_on_disk(&dir, n, tau, allowed)?,
        None => compute_table(n, tau, allowed)?,
    });
    table_cache().lock().unwrap().insert(key, t.clone());
    Ok(t)
}

/// Directory named by ABS_CACHE_DIR, if set and nonempty.
pub fn disk_cache_dir() -> Option<PathBuf> {
    std::env::var_os("ABS_CACHE_DIR")
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

/// File name of a table: SHA-256 of the request (n, tree, allowed faces).
pub fn cache_file_name(n: usize, tau: &Tree, allowed: Option<&[Subset]>) -> String {
    let allowed = allowed.map(|a| a.iter().map(|s| subset_elems(*s)).collect::<Vec<_>>());
    let request = json!({"n": n, "tree": tau.to_string(), "allowed": allowed});
    format!(
        "{}.json",
        hex::encode(Sha256::digest(request.to_string().as_bytes()))
    )
}

fn cached_on_disk(
    dir: &Path,
    n: usize,
    tau: &Tree,
    allowed: Option<&[Subset]>,
) -> Result<DecompositionTable> {
    let path = dir.join(cache_file_name(n, tau, allowed));
    if let Ok(text) = std::fs::read_to_string(&path) {
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| Error::Input(format!("cache file {}: {e}", path.display())))?;
        let t = DecompositionTable::from_json(&v)?;
        if t.n == n && t.tree == *tau {
            return Ok(t);
        }
    }
    let t = compute_table(n, tau, allowed)?;
    let mut v = t.to_json();
    if let Some(a) = allowed {
        v["allowed"] = json!(a.iter().map(|s| subset_elems(*s)).collect::<Vec<_>>());
    }
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Input(format!("cache dir {}: {e}", dir.display())))?;
    // write then rename so concurrent readers never see a partial file
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(
        &tmp,
        serde_json::to_string_pretty(&v).expect("serializable"),
    )
    .map_err(|e| Error::Input(format!("cache write: {e}")))?;
    std::fs::rename(&tmp, &path).map_err(|e| Error::Input(format!("cache write: {e}")))?;
    Ok(t)
}

fn compute_table(n: usize, tau: &Tree, allowed: Option<&[Subset]>) -> Result<DecompositionTable> {
    let mut entries: BTreeMap<Subset, Vec<(Vec<Subset>, Q)>> = BTreeMap::new();
    if *tau == Tree::Cork {
        let p1 = transferred_operation(n, tau, &[])?;
        for (s, c) in p1.coeffs {
            entries.entry(s).or_default().push((vec![], c));
        }
        return Ok(DecompositionTable {
            n,
            tree: tau.clone(),
            entries,
        });
    }
    if tau.has_cork() || tau.arity() < 2 {
        return Err(Error::Unsupported(format!(
            "decompositions are tabulated for cork-free trees of arity ≥ 2 and the cork, not {tau}"
        )));
    }
    let faces: Vec<Subset> = match allowed {
        Some(a) => a.to_vec(),
        None => nonempty_subsets(n),
    };
    let m = tau.arity();
    let w = tau.weight();
    let forms: BTreeMap<Subset, PolyForm> = faces
        .iter()
        .map(|&s| (s, include(&Cochain::basis(n, s))))
        .collect();
    let mut idx = vec![0usize; m];
    loop {
        let tuple: Vec<Subset> = idx.iter().map(|&i| faces[i]).collect();
        let dsum: usize = tuple.iter().map(|s| s.count_ones() as usize - 1).sum();
        // output face dimension is dsum − (w − 1)
        if dsum + 1 >= w && dsum + 1 <= n + w {
            let ins: Vec<PolyForm> = tuple.iter().map(|s| forms[s].clone()).collect();
            let mut it = ins.iter();
            let top = eval_forms(n, tau, &mut it, true);
            let out = elementary_projection(n, &top);
            for (s, c) in out.coeffs {
                entries.entry(s).or_default().push((tuple.clone(), c));
            }
        }
        let mut j = 0;
        while j < m {
            idx[j] += 1;
            if idx[j] < faces.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == m {
            break;
        }
    }
    Ok(DecompositionTable {
        n,
        tree: tau.clone(),
        entries,
    })
}

/// Δ_τ(a_I) under plain adjoint duality.
pub fn simplex_decomposition(n: usize, tau: &Tree, face: Subset) -> Result<Vec<(Vec<Subset>, Q)>> {
    let t = decomposition_table(n, tau, None)?;
    Ok(t.entries.get(&face).cloned().unwrap_or_default())
}

/// Sign produced by evaluating τ on ω_{I_j} ⊗ a_{I_j} in Ω ⊗ 𝔤, where
/// l_k(α₁⊗y₁,…,α_k⊗y_k) = (−1)^{Σ_{i<j}|y_i||α_j| + Σ|α_i|} α₁⋯α_k ⊗ l_k(y₁,…,y_k)
/// and the homotopy acts on the form factor only.
fn tensor_sign(tau: &Tree, tuple: &[Subset]) -> i64 {
    let mut it = tuple.iter();
    let (_, _, s) = sign_rec(tau, &mut it, true);
    s
}

fn sign_rec<'a>(
    t: &Tree,
    it: &mut impl Iterator<Item = &'a Subset>,
    root: bool,
) -> (i64, i64, i64) {
    match t {
        Tree::Leaf => {
            let k = it.next().unwrap().count_ones() as i64 - 1;
            (-k, k, 1)
        }
        Tree::Cork => (0, -1, 1),
        Tree::Node(ch) => {
            let parts: Vec<(i64, i64, i64)> = ch.iter().map(|c| sign_rec(c, it, false)).collect();
            let mut e = 0i64;
            let mut sign = 1;
            for j in 0..parts.len() {
                sign *= parts[j].2;
                e += parts[j].0;
                for i in 0..j {
                    e += parts[i].1 * parts[j].0;
                }
            }
            if e.rem_euclid(2) == 1 {
                sign = -sign;
            }
            let a: i64 = parts.iter().map(|p| p.0).sum::<i64>() + if root { 0 } else { 1 };
            let y: i64 = parts.iter().map(|p| p.1).sum::<i64>() - 1;
            (a, y, sign)
        }
    }
}

type CobarKey = (usize, usize, Option<Vec<Subset>>);

fn cobar_cache() -> &'static Mutex<HashMap<CobarKey, Arc<BTreeMap<Subset, Elem<Term>>>>> {
    static C: OnceLock<Mutex<HashMap<CobarKey, Arc<BTreeMap<Subset, Elem<Term>>>>>> =
        OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Degree of the universal generator a_I.
pub fn subset_gen_degree(s: u32) -> i64 {
    s.count_ones() as i64 - 1
}

/// Pre-differential of the cobar construction on C^c_*(Δⁿ), one element per face
/// I, written over generators `Term::Gen(I)` labelled by subset masks.
///
/// It is the unique one making Σ_I ω_I ⊗ a_I a Maurer–Cartan element of the
/// transferred structure on C*(Δⁿ) ⊗ 𝔤:
/// d(a_I) = −(−1)^{|ω_I|} [ (d_C ⊗ 1)φ + p F(Φ) ]_{ω_I}, Φ = iφ + h F(Φ).
/// `allowed` restricts the faces that may occur as inputs (others are treated
/// as zero); differentials are produced for every face.
pub fn cobar_differential(
    n: usize,
    max_weight: usize,
    allowed: Option<&[Subset]>,
) -> Result<Arc<BTreeMap<Subset, Elem<Term>>>> {
    let key = (n, max_weight, allowed.map(|a| a.to_vec()));
    if let Some(v) = cobar_cache().lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let faces: Vec<Subset> = match allowed {
        Some(a) => a.to_vec(),
        None => nonempty_subsets(n),
    };
    let gdeg = |g: u32| subset_gen_degree(g);
    let mut out: BTreeMap<Subset, Elem<Term>> = nonempty_subsets(n)
        .into_iter()
        .map(|s| (s, Elem::zero()))
        .collect();
    let sgn = |s: Subset| {
        if (s.count_ones() - 1) % 2 == 0 {
            -Q::one()
        } else {
            Q::one()
        }
    };
    // linear part
    for &j in &faces {
        let dc = cochain_d(&Cochain::basis(n, j));
        for (i, c) in dc.coeffs {
            out.get_mut(&i).unwrap().add_term(Term::Gen(j), sgn(i) * c);
        }
    }
    if max_weight >= 1 {
        for i in 0..=n {
            out.get_mut(&(1 << i))
                .unwrap()
                .add_term(Term::Cork, -Q::one());
        }
    }
    for w in 1..max_weight {
        for m in 2..=max_weight - w {
            for tau in enumerate_trees(m, w, false) {
                let e_tau = Q::new(BigInt::one(), tau.symmetry_coefficient());
                let table = decomposition_table(n, &tau, allowed)?;
                for (i, list) in &table.entries {
                    let target = out.get_mut(i).unwrap();
                    for (tuple, lam) in list {
                        if lam.is_zero() {
                            continue;
                        }
                        let mut it = tuple.iter();
                        let Some((term, sc)) = decorate(&tau, &mut it, &gdeg) else {
                            continue;
                        };
                        let st = tensor_sign(&tau, tuple);
                        let c = sgn(*i) * lam * &e_tau * q(st * sc);
                        target.add_term(term, c);
                    }
                }
            }
        }
    }
    let arc = Arc::new(out);
    cobar_cache().lock().unwrap().insert(key, arc.clone());
    Ok(arc)
}

fn decorate<'a>(
    t: &Tree,
    it: &mut impl Iterator<Item = &'a Subset>,
    gdeg: &dyn Fn(u32) -> i64,
) -> Option<(Term, i64)> {
    match t {
        Tree::Cork => Some((Term::Cork, 1)),
        Tree::Leaf => Some((Term::Gen(*it.next().unwrap()), 1)),
        Tree::Node(ch) => {
            let mut sign = 1;
            let mut kids = Vec::new();
            let mut dead = false;
            for c in ch {
                match decorate(c, it, gdeg) {
                    Some((k, s)) => {
                        sign *= s;
                        kids.push(k);
                    }
                    None => dead = true,
                }
            }
            if dead {
                return None;
            }
            let (node, s) = make_node(kids, gdeg)?;
            Some((node, sign * s))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qr;

    #[test]
    fn binary_on_interval() {
        let c2 = Tree::corolla(2);
        let w0 = Cochain::basis(1, 0b01);
        let w01 = Cochain::basis(1, 0b11);
        assert_eq!(
            transferred_operation(1, &c2, &[w0.clone(), w0.clone()]).unwrap(),
            w0
        );
        let mut half = Cochain::zero(1);
        half.add_term(0b11, qr(1, 2));
        assert_eq!(transferred_operation(1, &c2, &[w0, w01]).unwrap(), half);
    }

    #[test]
    fn cork_is_sum_of_vertices() {
        for n in 0..=3 {
            let c = transferred_operation(n, &Tree::Cork, &[]).unwrap();
            assert_eq!(c.coeffs.len(), n + 1);
            assert!(c
                .coeffs
                .iter()
                .all(|(s, v)| s.count_ones() == 1 && v == &q(1)));
        }
    }

    #[test]
    fn decomposition_examples() {
        for m in 2..=4 {
            let d = simplex_decomposition(0, &Tree::corolla(m), 1).unwrap();
            assert_eq!(d, vec![(vec![1; m], q(1))]);
        }
        let d = simplex_decomposition(1, &Tree::corolla(2), 0b11).unwrap();
        assert!(d.contains(&(vec![0b01, 0b11], qr(1, 2))));
        // weight(τ) − 1 > |I| − 1 forces vanishing
        let comb: Tree = "((||)|)".parse().unwrap();
        assert!(simplex_decomposition(1, &comb, 0b01).unwrap().is_empty());
        let big: Tree = "(((||)|)|)".parse().unwrap();
        assert!(simplex_decomposition(1, &big, 0b11).unwrap().is_empty());
    }

    #[test]
    fn table_json_round_trip() {
        let t = decomposition_table(1, &Tree::corolla(2), None).unwrap();
        let back = DecompositionTable::from_json(&t.to_json()).unwrap();
        assert_eq!(*t, back);
    }
}

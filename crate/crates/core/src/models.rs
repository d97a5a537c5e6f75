//! Finite simplicial sets, their cellular chains coalgebra, the rational models
//! L(X), minimal-model generators and homotopy groups of R(L(X)).

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{alpha_homology, Elem};
use crate::dupont::{nonempty_subsets, subset_elems, subset_from, Subset};
use crate::free::{substitute_elem, FreeAlgebra, Generator, Term};
use crate::linalg::{GradedComplex, SparseMatrix, Q};
use crate::transfer::{cobar_differential, decomposition_table};
use crate::tree::Tree;
use crate::{Error, Result};

/// Where a face of a cell goes: a nondegenerate cell, or a degeneracy of a
/// lower-dimensional cell (which cellular chains kill).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceRef {
    Cell(usize),
    Degenerate(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub id: String,
    pub dim: usize,
    /// Every nonempty I ⊆ [dim]; the full set maps to the cell itself.
    pub faces: BTreeMap<Subset, FaceRef>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SimplicialSet {
    pub cells: Vec<Cell>,
}

#[derive(Serialize, Deserialize)]
struct FaceDoc {
    subset: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cell: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degenerate: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct CellDoc {
    id: String,
    dim: usize,
    #[serde(default)]
    faces: Vec<FaceDoc>,
}

#[derive(Serialize, Deserialize)]
struct SetDoc {
    cells: Vec<CellDoc>,
}

/// Position-wise restriction: the subset of [|I|−1] that J occupies inside I.
fn reindex(j: Subset, i: Subset) -> Subset {
    let pos: Vec<usize> = subset_elems(i);
    subset_from(
        &subset_elems(j)
            .iter()
            .map(|e| pos.iter().position(|p| p == e).unwrap())
            .collect::<Vec<_>>(),
    )
}

impl SimplicialSet {
    pub fn index(&self, id: &str) -> Option<usize> {
        self.cells.iter().position(|c| c.id == id)
    }

    pub fn from_json(v: &Value) -> Result<SimplicialSet> {
        let doc: SetDoc = serde_json::from_value(v.clone())
            .map_err(|e| Error::Input(format!("simplicial set: {e}")))?;
        let mut ids = BTreeMap::new();
        for (i, c) in doc.cells.iter().enumerate() {
            if ids.insert(c.id.clone(), i).is_some() {
                return Err(Error::Input(format!("duplicate cell id {}", c.id)));
            }
        }
        let mut cells = Vec::with_capacity(doc.cells.len());
        for (ci, c) in doc.cells.iter().enumerate() {
            if c.dim > 3 {
                return Err(Error::Unsupported(format!(
                    "cell {} has dimension {} (at most 3 supported)",
                    c.id, c.dim
                )));
            }
            let mut faces = BTreeMap::new();
            faces.insert((1u32 << (c.dim + 1)) - 1, FaceRef::Cell(ci));
            for f in &c.faces {
                if f.subset.iter().any(|&e| e > c.dim) || f.subset.is_empty() {
                    return Err(Error::Input(format!(
                        "cell {}: face {:?} is not a subset of [{}]",
                        c.id, f.subset, c.dim
                    )));
                }
                let s = subset_from(&f.subset);
                if s.count_ones() as usize != f.subset.len() {
                    return Err(Error::Input(format!(
                        "cell {}: face {:?} repeats a vertex",
                        c.id, f.subset
                    )));
                }
                let lookup = |name: &String| {
                    ids.get(name).copied().ok_or_else(|| {
                        Error::Input(format!(
                            "cell {}: face {:?} references missing cell {name}",
                            c.id, f.subset
                        ))
                    })
                };
                let r = match (&f.cell, &f.degenerate) {
                    (Some(t), None) => FaceRef::Cell(lookup(t)?),
                    (None, Some(t)) => FaceRef::Degenerate(lookup(t)?),
                    _ => {
                        return Err(Error::Input(format!(
                            "cell {}: face {:?} needs exactly one of cell/degenerate",
                            c.id, f.subset
                        )))
                    }
                };
                if faces.insert(s, r).is_some() {
                    return Err(Error::Input(format!(
                        "cell {}: face {:?} given twice",
                        c.id, f.subset
                    )));
                }
            }
            cells.push(Cell {
                id: c.id.clone(),
                dim: c.dim,
                faces,
            });
        }
        let x = SimplicialSet { cells };
        x.validate()?;
        Ok(x)
    }

    pub fn to_json(&self) -> Value {
        let doc = SetDoc {
            cells: self
                .cells
                .iter()
                .map(|c| CellDoc {
                    id: c.id.clone(),
                    dim: c.dim,
                    faces: c
                        .faces
                        .iter()
                        .filter(|(s, _)| s.count_ones() as usize <= c.dim)
                        .map(|(s, r)| match r {
                            FaceRef::Cell(t) => FaceDoc {
                                subset: subset_elems(*s),
                                cell: Some(self.cells[*t].id.clone()),
                                degenerate: None,
                            },
                            FaceRef::Degenerate(t) => FaceDoc {
                                subset: subset_elems(*s),
                                cell: None,
                                degenerate: Some(self.cells[*t].id.clone()),
                            },
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("serializable")
    }

    /// Dimension rules and simplicial consistency of all face assignments.
    pub fn validate(&self) -> Result<()> {
        let bad = |c: &Cell, s: Subset, m: String| {
            Error::Input(format!("cell {} face {:?}: {m}", c.id, subset_elems(s)))
        };
        for c in &self.cells {
            for s in nonempty_subsets(c.dim) {
                let Some(r) = c.faces.get(&s) else {
                    return Err(bad(c, s, "missing".into()));
                };
                let k = s.count_ones() as usize - 1;
                match *r {
                    FaceRef::Cell(t) => {
                        if self.cells[t].dim != k {
                            return Err(bad(
                                c,
                                s,
                                format!(
                                    "cell {} has dimension {}, expected {k}",
                                    self.cells[t].id, self.cells[t].dim
                                ),
                            ));
                        }
                        // restriction along I must agree with the face cell's own faces
                        for j in nonempty_subsets(c.dim)
                            .into_iter()
                            .filter(|j| j & s == *j && *j != s)
                        {
                            let mine = c.faces[&j];
                            let theirs = self.cells[t].faces[&reindex(j, s)];
                            if mine != theirs {
                                return Err(bad(
                                    c,
                                    j,
                                    format!(
                                        "disagrees with face {} of cell {}",
                                        subset_label_vec(j, s),
                                        self.cells[t].id
                                    ),
                                ));
                            }
                        }
                    }
                    FaceRef::Degenerate(t) => {
                        if k == 0 || self.cells[t].dim >= k {
                            return Err(bad(
                                c,
                                s,
                                format!(
                                    "degeneracy onto {} of dimension {} is not degenerate",
                                    self.cells[t].id, self.cells[t].dim
                                ),
                            ));
                        }
                        let target = &self.cells[t];
                        let reachable: Vec<FaceRef> = target.faces.values().copied().collect();
                        for j in nonempty_subsets(c.dim)
                            .into_iter()
                            .filter(|j| j & s == *j && *j != s)
                        {
                            let r = c.faces[&j];
                            let ok = match r {
                                FaceRef::Cell(_) => reachable.contains(&r),
                                FaceRef::Degenerate(u) => {
                                    u == t || reachable.contains(&FaceRef::Cell(u))
                                }
                            };
                            if !ok {
                                return Err(bad(
                                    c,
                                    j,
                                    format!("is not a face of the degeneracy of {}", target.id),
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn point() -> SimplicialSet {
        SimplicialSet {
            cells: vec![Cell {
                id: "pt".into(),
                dim: 0,
                faces: BTreeMap::from([(1, FaceRef::Cell(0))]),
            }],
        }
    }

    pub fn empty() -> SimplicialSet {
        SimplicialSet::default()
    }

    /// Subsets of [n] closed downward, one cell each.
    fn from_subsets(n: usize, keep: impl Fn(Subset) -> bool) -> SimplicialSet {
        let subs: Vec<Subset> = nonempty_subsets(n)
            .into_iter()
            .filter(|s| keep(*s))
            .collect();
        let index: BTreeMap<Subset, usize> =
            subs.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let cells = subs
            .iter()
            .map(|&s| {
                let dim = s.count_ones() as usize - 1;
                let elems = subset_elems(s);
                let faces = nonempty_subsets(dim)
                    .into_iter()
                    .map(|j| {
                        let img = subset_from(
                            &subset_elems(j)
                                .iter()
                                .map(|&p| elems[p])
                                .collect::<Vec<_>>(),
                        );
                        (j, FaceRef::Cell(index[&img]))
                    })
                    .collect();
                Cell {
                    id: format!("s{}", crate::dupont::subset_label(s)),
                    dim,
                    faces,
                }
            })
            .collect();
        SimplicialSet { cells }
    }

    /// Δⁿ with all faces.
    pub fn simplex(n: usize) -> SimplicialSet {
        SimplicialSet::from_subsets(n, |_| true)
    }

    /// ∂Δⁿ: every proper face of Δⁿ.
    pub fn boundary(n: usize) -> SimplicialSet {
        let full = (1u32 << (n + 1)) - 1;
        SimplicialSet::from_subsets(n, |s| s != full)
    }

    /// Sⁿ = Δⁿ/∂Δⁿ: a point and one n-cell all of whose proper faces collapse.
    pub fn sphere(n: usize) -> SimplicialSet {
        assert!(n >= 1);
        let mut faces = BTreeMap::new();
        for s in nonempty_subsets(n) {
            let r = if s.count_ones() == 1 {
                FaceRef::Cell(0)
            } else if s.count_ones() as usize == n + 1 {
                FaceRef::Cell(1)
            } else {
                FaceRef::Degenerate(0)
            };
            faces.insert(s, r);
        }
        let mut x = SimplicialSet::point();
        x.cells.push(Cell {
            id: "top".into(),
            dim: n,
            faces,
        });
        x
    }

    /// Built-in examples by name: point, empty, simplex:N, boundary:N, sphere:N.
    pub fn named(name: &str) -> Option<SimplicialSet> {
        let (kind, arg) = name
            .split_once(':')
            .map(|(a, b)| (a, b.parse::<usize>().ok()))
            .unwrap_or((name, None));
        match (kind, arg) {
            ("point", None) => Some(SimplicialSet::point()),
            ("empty", None) => Some(SimplicialSet::empty()),
            ("simplex", Some(n)) if n <= 3 => Some(SimplicialSet::simplex(n)),
            ("boundary", Some(n)) if (1..=4).contains(&n) => Some(SimplicialSet::boundary(n)),
            ("sphere", Some(n)) if (1..=3).contains(&n) => Some(SimplicialSet::sphere(n)),
            _ => None,
        }
    }

    /// Faces of a cell that survive in cellular chains.
    fn nondegenerate_faces(&self, c: usize) -> Vec<Subset> {
        self.cells[c]
            .faces
            .iter()
            .filter(|(_, r)| matches!(r, FaceRef::Cell(_)))
            .map(|(s, _)| *s)
            .collect()
    }

    fn push(&self, c: usize, s: Subset) -> Option<usize> {
        match self.cells[c].faces[&s] {
            FaceRef::Cell(t) => Some(t),
            FaceRef::Degenerate(_) => None,
        }
    }
}

fn subset_label_vec(j: Subset, s: Subset) -> String {
    format!("{:?}", subset_elems(reindex(j, s)))
}

/// Δ_τ on the cells of X: pushforward of Δ_τ(a_{[m]}) along each cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellTable {
    pub tree: Tree,
    pub entries: BTreeMap<usize, BTreeMap<Vec<usize>, Q>>,
}

pub fn chains_coalgebra(x: &SimplicialSet, tau: &Tree) -> Result<CellTable> {
    let mut entries: BTreeMap<usize, BTreeMap<Vec<usize>, Q>> = BTreeMap::new();
    for (ci, c) in x.cells.iter().enumerate() {
        let allowed = x.nondegenerate_faces(ci);
        let table = decomposition_table(c.dim, tau, Some(&allowed))?;
        let full = (1u32 << (c.dim + 1)) - 1;
        let mut out: BTreeMap<Vec<usize>, Q> = BTreeMap::new();
        for (tuple, lam) in table.entries.get(&full).into_iter().flatten() {
            let Some(img) = tuple
                .iter()
                .map(|s| x.push(ci, *s))
                .collect::<Option<Vec<usize>>>()
            else {
                continue;
            };
            *out.entry(img).or_default() += lam;
        }
        out.retain(|_, v| !num_traits::Zero::is_zero(v));
        entries.insert(ci, out);
    }
    Ok(CellTable {
        tree: tau.clone(),
        entries,
    })
}

/// L(X) truncated at `max_weight`, one generator a_σ per nondegenerate cell.
pub fn build_model(x: &SimplicialSet, max_weight: usize) -> Result<FreeAlgebra> {
    let gens: Vec<Generator> = x
        .cells
        .iter()
        .map(|c| Generator {
            label: format!("a_{}", c.id),
            degree: c.dim as i64,
        })
        .collect();
    let gdeg = |g: u32| gens[g as usize].degree;
    let mut gen_d = Vec::with_capacity(gens.len());
    for (ci, c) in x.cells.iter().enumerate() {
        let allowed = x.nondegenerate_faces(ci);
        let diffs = cobar_differential(c.dim, max_weight, Some(&allowed))?;
        let full = (1u32 << (c.dim + 1)) - 1;
        gen_d.push(substitute_elem(
            &diffs[&full],
            &|s| x.push(ci, s).map(|t| t as u32),
            &gdeg,
        ));
    }
    Ok(FreeAlgebra::new(gens, gen_d, max_weight))
}

/// Homology of the generating space under the linear part of d; nonzero degrees only.
pub fn minimal_generators(alg: &FreeAlgebra) -> Result<BTreeMap<i64, usize>> {
    let mut by_deg: BTreeMap<i64, Vec<u32>> = BTreeMap::new();
    for (i, g) in alg.generators.iter().enumerate() {
        by_deg.entry(g.degree).or_default().push(i as u32);
    }
    let mut cx = GradedComplex {
        basis: BTreeMap::new(),
        diff: BTreeMap::new(),
    };
    for (k, gs) in &by_deg {
        cx.basis.insert(
            *k,
            gs.iter()
                .map(|g| alg.generators[*g as usize].label.clone())
                .collect(),
        );
    }
    for (k, gs) in &by_deg {
        let tgt = by_deg.get(&(k - 1)).cloned().unwrap_or_default();
        let mut m = SparseMatrix::new(tgt.len(), gs.len());
        for (col, g) in gs.iter().enumerate() {
            for (h, c) in &alg.linear_part(*g).terms {
                let row = tgt.iter().position(|t| t == h).ok_or_else(|| {
                    Error::Structure("linear part changes degree by more than one".into())
                })?;
                m.add(row, col, c.clone());
            }
        }
        cx.diff.insert(*k, m);
    }
    let (Some(lo), Some(hi)) = (by_deg.keys().next().copied(), by_deg.keys().last().copied())
    else {
        return Ok(BTreeMap::new());
    };
    let mut dims = cx.homology_dims(lo..=hi)?;
    dims.retain(|_, v| *v > 0);
    Ok(dims)
}

/// Normalized simplicial chains over ℚ straight from the face data, as an
/// oracle for minimal_generators(L(X)); nonzero degrees only.
pub fn simplicial_homology(x: &SimplicialSet) -> Result<BTreeMap<i64, usize>> {
    let max = x.cells.iter().map(|c| c.dim).max();
    let Some(max) = max else {
        return Ok(BTreeMap::new());
    };
    let mut cx = GradedComplex {
        basis: BTreeMap::new(),
        diff: BTreeMap::new(),
    };
    let by_dim: Vec<Vec<usize>> = (0..=max)
        .map(|k| {
            (0..x.cells.len())
                .filter(|&i| x.cells[i].dim == k)
                .collect()
        })
        .collect();
    for k in 0..=max {
        cx.basis.insert(
            k as i64,
            by_dim[k].iter().map(|&i| x.cells[i].id.clone()).collect(),
        );
        if k == 0 {
            cx.diff.insert(0, SparseMatrix::new(0, by_dim[0].len()));
            continue;
        }
        let mut m = SparseMatrix::new(by_dim[k - 1].len(), by_dim[k].len());
        for (col, &ci) in by_dim[k].iter().enumerate() {
            let full = (1u32 << (k + 1)) - 1;
            for i in 0..=k {
                if let FaceRef::Cell(t) = x.cells[ci].faces[&(full & !(1 << i))] {
                    let row = by_dim[k - 1].iter().position(|&r| r == t).unwrap();
                    m.add(
                        row,
                        col,
                        Q::from_integer(if i % 2 == 0 { 1.into() } else { (-1).into() }),
                    );
                }
            }
        }
        cx.diff.insert(k as i64, m);
    }
    let mut dims = cx.homology_dims(0..=max as i64)?;
    dims.retain(|_, v| *v > 0);
    Ok(dims)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyReport {
    pub weight: usize,
    pub base: String,
    pub dims: BTreeMap<i64, usize>,
}

/// π_n(R(L(X)), a_v) ⊗ ℚ as the a_v-twisted homology of L(X) at truncation `max_weight`.
pub fn homotopy_groups(
    x: &SimplicialSet,
    base: &str,
    degrees: RangeInclusive<i64>,
    max_weight: usize,
) -> Result<HomotopyReport> {
    let v = x
        .index(base)
        .ok_or_else(|| Error::Input(format!("no cell {base}")))?;
    if x.cells[v].dim != 0 {
        return Err(Error::Input(format!("basepoint {base} is not a vertex")));
    }
    if *degrees.start() < 1 {
        return Err(Error::Input(
            "homotopy groups are computed in degrees ≥ 1".into(),
        ));
    }
    let alg = build_model(x, max_weight)?;
    let alpha = Elem::basis(Term::Gen(v as u32));
    let dims = alpha_homology(&alg, &alpha, degrees)?;
    Ok(HomotopyReport {
        weight: max_weight,
        base: base.to_string(),
        dims,
    })
}

/// Checks that a cell map X → Y sending nondegenerate cells to nondegenerate
/// cells of the same dimension induces a morphism L(X) → L(Y) commuting with d.
pub fn check_cell_map(
    x: &SimplicialSet,
    y: &SimplicialSet,
    map: &[usize],
    max_weight: usize,
) -> Result<bool> {
    if map.len() != x.cells.len()
        || map
            .iter()
            .enumerate()
            .any(|(i, &j)| j >= y.cells.len() || y.cells[j].dim != x.cells[i].dim)
    {
        return Err(Error::Input("cell map must preserve dimensions".into()));
    }
    let lx = build_model(x, max_weight)?;
    let ly = build_model(y, max_weight)?;
    let gdeg = |g: u32| ly.generators[g as usize].degree;
    for (i, dx) in lx.gen_d.iter().enumerate() {
        let pushed = substitute_elem(dx, &|g| Some(map[g as usize] as u32), &gdeg);
        if pushed != ly.gen_d[map[i]] {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    #[test]
    fn standard_examples_validate() {
        for x in [
            SimplicialSet::simplex(2),
            SimplicialSet::boundary(3),
            SimplicialSet::sphere(2),
            SimplicialSet::sphere(1),
            SimplicialSet::point(),
        ] {
            x.validate().unwrap();
            assert_eq!(SimplicialSet::from_json(&x.to_json()).unwrap(), x);
        }
    }

    #[test]
    fn missing_vertex_rejected() {
        let doc = serde_json::json!({"cells": [
            {"id": "v0", "dim": 0},
            {"id": "e", "dim": 1, "faces": [{"subset": [0], "cell": "v0"}, {"subset": [1], "cell": "v9"}]}
        ]});
        assert!(SimplicialSet::from_json(&doc).is_err());
    }

    #[test]
    fn inconsistent_face_rejected() {
        let mut x = SimplicialSet::simplex(2);
        let tri = x.cells.iter().position(|c| c.dim == 2).unwrap();
        let v = x.cells[tri].faces[&0b001];
        x.cells[tri].faces.insert(0b010, v);
        assert!(x.validate().is_err());
    }

    #[test]
    fn sphere_corollas() {
        let s2 = SimplicialSet::sphere(2);
        let t = chains_coalgebra(&s2, &Tree::corolla(3)).unwrap();
        let mut expect = BTreeMap::new();
        for tuple in [vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]] {
            expect.insert(tuple, q(1));
        }
        assert_eq!(t.entries[&1], expect);
        let binary_comb: Tree = "(|(||))".parse().unwrap();
        let t = chains_coalgebra(&s2, &binary_comb).unwrap();
        assert!(t.entries.values().all(|e| e.is_empty()));
    }

    #[test]
    fn point_model_is_mc0() {
        let l = build_model(&SimplicialSet::point(), 4).unwrap();
        let mc0 = crate::integration::build_mc(0, 4).unwrap();
        assert_eq!(l.gen_d, mc0.gen_d);
    }

    #[test]
    fn generators_match_simplicial_homology() {
        for x in [
            SimplicialSet::simplex(2),
            SimplicialSet::boundary(3),
            SimplicialSet::sphere(2),
            SimplicialSet::sphere(1),
        ] {
            let l = build_model(&x, 3).unwrap();
            l.check_generators().unwrap();
            assert_eq!(
                minimal_generators(&l).unwrap(),
                simplicial_homology(&x).unwrap()
            );
        }
    }

    #[test]
    fn boundary_includes_into_simplex() {
        let x = SimplicialSet::boundary(3);
        let y = SimplicialSet::simplex(3);
        let map: Vec<usize> = x.cells.iter().map(|c| y.index(&c.id).unwrap()).collect();
        assert!(check_cell_map(&x, &y, &map, 4).unwrap());
    }
}

//! Corked rooted trees: canonical forms, enumeration, grafting, splittings.
//!
//! A tree is unordered. Every vertex has at least two inputs or none (a cork).
//! Canonical form sorts children recursively with corks < leaves < nodes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;

use crate::linalg::factorial;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tree {
    Cork,
    Leaf,
    Node(Vec<Tree>),
}

impl Tree {
    pub fn trivial() -> Tree {
        Tree::Leaf
    }

    /// The n-corolla (n = 0 gives the cork).
    pub fn corolla(n: usize) -> Tree {
        if n == 0 {
            Tree::Cork
        } else {
            assert!(n >= 2, "no unary corolla");
            Tree::Node(vec![Tree::Leaf; n])
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Tree::Cork => 0,
            Tree::Leaf => 1,
            Tree::Node(ch) => ch.iter().map(Tree::arity).sum(),
        }
    }

    /// Number of vertices, corks included.
    pub fn weight(&self) -> usize {
        match self {
            Tree::Cork => 1,
            Tree::Leaf => 0,
            Tree::Node(ch) => 1 + ch.iter().map(Tree::weight).sum::<usize>(),
        }
    }

    pub fn has_cork(&self) -> bool {
        match self {
            Tree::Cork => true,
            Tree::Leaf => false,
            Tree::Node(ch) => ch.iter().any(Tree::has_cork),
        }
    }

    pub fn is_canonical(&self) -> bool {
        match self {
            Tree::Node(ch) => {
                ch.len() >= 2
                    && ch.windows(2).all(|w| w[0] <= w[1])
                    && ch.iter().all(Tree::is_canonical)
            }
            _ => true,
        }
    }

    pub fn canonical(&self) -> Tree {
        match self {
            Tree::Node(ch) => {
                let mut c: Vec<Tree> = ch.iter().map(Tree::canonical).collect();
                c.sort();
                Tree::Node(c)
            }
            t => t.clone(),
        }
    }

    /// Checks the vertex valence rule.
    pub fn validate(&self) -> Result<()> {
        if let Tree::Node(ch) = self {
            if ch.len() < 2 {
                return Err(Error::Input(format!("vertex with {} input(s)", ch.len())));
            }
            for c in ch {
                c.validate()?;
            }
        }
        Ok(())
    }

    /// Substitutes `children[i]` at leaf i (depth-first order) and canonicalizes.
    pub fn graft(&self, children: &[Tree]) -> Result<Tree> {
        if children.len() != self.arity() {
            return Err(Error::Arity {
                expected: self.arity(),
                got: children.len(),
            });
        }
        let mut it = children.iter();
        Ok(self.substitute(&mut it).canonical())
    }

    fn substitute<'a>(&self, it: &mut impl Iterator<Item = &'a Tree>) -> Tree {
        match self {
            Tree::Cork => Tree::Cork,
            Tree::Leaf => it.next().unwrap().clone(),
            Tree::Node(ch) => Tree::Node(ch.iter().map(|c| c.substitute(it)).collect()),
        }
    }

    /// 𝓔(τ): order of the group of automorphisms permuting isomorphic branches.
    pub fn symmetry_coefficient(&self) -> BigInt {
        match self {
            Tree::Node(ch) => {
                let mut counts: BTreeMap<Tree, usize> = BTreeMap::new();
                for c in ch {
                    *counts.entry(c.canonical()).or_default() += 1;
                }
                let mut acc = BigInt::one();
                for (c, m) in counts {
                    acc *= factorial(m);
                    for _ in 0..m {
                        acc *= c.symmetry_coefficient();
                    }
                }
                acc
            }
            _ => BigInt::one(),
        }
    }

    /// All trees obtained by contracting one internal edge (including a cork edge).
    pub fn contractions(&self) -> Vec<Tree> {
        let mut out = Vec::new();
        if let Tree::Node(ch) = self {
            for (i, c) in ch.iter().enumerate() {
                match c {
                    Tree::Leaf => {}
                    Tree::Cork | Tree::Node(_) => {
                        let inner = match c {
                            Tree::Node(g) => g.clone(),
                            _ => vec![],
                        };
                        let mut new: Vec<Tree> = ch
                            .iter()
                            .enumerate()
                            .filter(|(j, _)| *j != i)
                            .map(|(_, t)| t.clone())
                            .collect();
                        new.extend(inner);
                        if new.len() >= 2 {
                            out.push(Tree::Node(new).canonical());
                        } else if new.is_empty() {
                            out.push(Tree::Cork);
                        }
                    }
                }
                for sub in c.contractions() {
                    let mut new = ch.clone();
                    new[i] = sub;
                    out.push(Tree::Node(new).canonical());
                }
            }
        }
        out
    }

    /// Splits a vertex into two along a new internal edge, in all possible ways
    /// including splitting off a cork. Entries are (tree, multiplicity, sign).
    pub fn vertex_splittings(&self) -> Result<Vec<(Tree, usize, i32)>> {
        if self.weight() == 0 {
            return Err(Error::Domain(
                "the trivial tree has no vertex to split".into(),
            ));
        }
        let mut acc: BTreeMap<Tree, usize> = BTreeMap::new();
        self.split_into(&mut acc, &mut |t| t);
        Ok(acc.into_iter().map(|(t, m)| (t, m, -1)).collect())
    }

    fn split_into(&self, acc: &mut BTreeMap<Tree, usize>, wrap: &mut dyn FnMut(Tree) -> Tree) {
        let Tree::Node(ch) = self else { return };
        let k = ch.len();
        for mask in 0u32..(1 << k) {
            let t = mask.count_ones() as usize;
            if t == 1 || t >= k {
                continue;
            }
            let inner: Vec<Tree> = (0..k)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| ch[i].clone())
                .collect();
            let mut rest: Vec<Tree> = (0..k)
                .filter(|i| mask >> i & 1 == 0)
                .map(|i| ch[i].clone())
                .collect();
            rest.push(if inner.is_empty() {
                Tree::Cork
            } else {
                Tree::Node(inner)
            });
            let new = wrap(Tree::Node(rest)).canonical();
            *acc.entry(new).or_default() += k - t + 1;
        }
        for i in 0..k {
            let ch_i = ch.clone();
            let mut w = |sub: Tree| {
                let mut c = ch_i.clone();
                c[i] = sub;
                wrap(Tree::Node(c))
            };
            ch[i].split_into(acc, &mut w);
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Cork => write!(f, "*"),
            Tree::Leaf => write!(f, "|"),
            Tree::Node(ch) => {
                write!(f, "(")?;
                for c in ch {
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for Tree {
    type Err = Error;

    /// Parses `*`, `|` and `(t1 t2 ...)`; whitespace between children is optional.
    /// The result is canonicalized.
    fn from_str(s: &str) -> Result<Tree> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let t = parse_tree(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::Input(format!("trailing input in tree {s:?}")));
        }
        t.validate()?;
        Ok(t.canonical())
    }
}

fn parse_tree(c: &[char], pos: &mut usize) -> Result<Tree> {
    match c.get(*pos) {
        Some('*') => {
            *pos += 1;
            Ok(Tree::Cork)
        }
        Some('|') => {
            *pos += 1;
            Ok(Tree::Leaf)
        }
        Some('(') => {
            *pos += 1;
            let mut ch = Vec::new();
            while c.get(*pos) != Some(&')') {
                if *pos >= c.len() {
                    return Err(Error::Input("unbalanced parenthesis in tree".into()));
                }
                ch.push(parse_tree(c, pos)?);
            }
            *pos += 1;
            Ok(Tree::Node(ch))
        }
        other => Err(Error::Input(format!("unexpected {other:?} in tree"))),
    }
}

/// Canonical trees of the given arity and weight, sorted by canonical key.
pub fn enumerate_trees(arity: usize, weight: usize, allow_corks: bool) -> Vec<Tree> {
    let mut memo: BTreeMap<(usize, usize), Vec<Tree>> = BTreeMap::new();
    gen(arity, weight, allow_corks, &mut memo)
}

fn gen(
    a: usize,
    w: usize,
    corks: bool,
    memo: &mut BTreeMap<(usize, usize), Vec<Tree>>,
) -> Vec<Tree> {
    if let Some(v) = memo.get(&(a, w)) {
        return v.clone();
    }
    let mut out = Vec::new();
    if a == 1 && w == 0 {
        out.push(Tree::Leaf);
    }
    if a == 0 && w == 1 && corks {
        out.push(Tree::Cork);
    }
    if w >= 1 {
        // candidate children: all trees with arity ≤ a and weight ≤ w−1
        let mut cands = Vec::new();
        for ca in 0..=a {
            for cw in 0..w {
                cands.extend(gen(ca, cw, corks, memo));
            }
        }
        cands.sort();
        let mut cur = Vec::new();
        pick(&cands, 0, a, w - 1, &mut cur, &mut out);
    }
    out.sort();
    out.dedup();
    memo.insert((a, w), out.clone());
    out
}

fn pick(c: &[Tree], from: usize, a: usize, w: usize, cur: &mut Vec<Tree>, out: &mut Vec<Tree>) {
    if a == 0 && w == 0 {
        if cur.len() >= 2 {
            out.push(Tree::Node(cur.clone()));
        }
        // zero-weight zero-arity children do not exist, so stop here
        return;
    }
    for i in from..c.len() {
        let (ta, tw) = (c[i].arity(), c[i].weight());
        if ta <= a && tw <= w {
            cur.push(c[i].clone());
            pick(c, i, a - ta, w - tw, cur, out);
            cur.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Tree {
        s.parse().unwrap()
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_trees(3, 1, true), vec![t("(|||)")]);
        assert!(enumerate_trees(1, 1, true).is_empty());
        assert_eq!(enumerate_trees(2, 2, true), vec![t("(*||)")]);
        let four = enumerate_trees(4, 3, false);
        assert_eq!(four.len(), 2);
        assert!(four.contains(&t("(((||)|)|)")));
        assert!(four.contains(&t("((||)(||))")));
    }

    #[test]
    fn graft_examples() {
        let c2 = Tree::corolla(2);
        assert_eq!(c2.graft(&[Tree::Leaf, Tree::Leaf]).unwrap(), c2);
        assert_eq!(c2.graft(&[c2.clone(), Tree::Leaf]).unwrap(), t("((||)|)"));
        let comb = t("((||)|)");
        assert_eq!(
            comb.graft(&[Tree::Leaf, Tree::Leaf, Tree::Leaf]).unwrap(),
            comb
        );
        assert!(c2.graft(&[Tree::Leaf]).is_err());
    }

    #[test]
    fn splitting_examples() {
        assert!(Tree::Cork.vertex_splittings().unwrap().is_empty());
        assert_eq!(
            Tree::corolla(2).vertex_splittings().unwrap(),
            vec![(t("(*||)"), 3, -1)]
        );
        assert!(Tree::Leaf.vertex_splittings().is_err());
    }

    #[test]
    fn symmetry_examples() {
        assert_eq!(Tree::corolla(3).symmetry_coefficient(), BigInt::from(6));
        assert_eq!(Tree::Leaf.symmetry_coefficient(), BigInt::from(1));
        assert_eq!(t("((||)(||))").symmetry_coefficient(), BigInt::from(8));
    }

    #[test]
    fn notation_round_trip() {
        for s in ["*", "|", "(||)", "(*||)", "((||)|)", "((||)(*||)*)"] {
            let tr = t(s);
            assert_eq!(t(&tr.to_string()), tr);
        }
        assert_eq!(t("( ( | | ) | )").to_string(), "(|(||))");
        assert!("(|)".parse::<Tree>().is_err());
        assert!("(||".parse::<Tree>().is_err());
    }
}

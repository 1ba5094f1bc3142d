//! Shuffles, compositions, plane trivalent trees and cyclic words.

use std::fmt;

/// An ordered list of positive parts `(n_1, ..., n_m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    pub parts: Vec<u32>,
}

impl Composition {
    pub fn new(parts: Vec<u32>) -> Self {
        debug_assert!(parts.iter().all(|&p| p >= 1));
        Composition { parts }
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn depth(&self) -> usize {
        self.parts.len()
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All compositions of `w` into `m` positive parts, in lexicographic order.
pub fn compositions(w: u32, m: usize) -> Vec<Composition> {
    fn rec(w: u32, m: usize, prefix: &mut Vec<u32>, out: &mut Vec<Composition>) {
        if m == 0 {
            if w == 0 {
                out.push(Composition::new(prefix.clone()));
            }
            return;
        }
        if (w as usize) < m {
            return;
        }
        for a in 1..=(w - (m as u32 - 1)) {
            prefix.push(a);
            rec(w - a, m - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        if w == 0 {
            out.push(Composition::new(Vec::new()));
        }
        return out;
    }
    rec(w, m, &mut Vec::with_capacity(m), &mut out);
    out
}

/// Lexicographic rank of a composition among `compositions(weight, depth)`.
pub fn composition_rank(parts: &[u32]) -> usize {
    let mut rank = 0usize;
    let mut w: u32 = parts.iter().sum();
    let mut m = parts.len();
    for &p in parts {
        // compositions of w into m parts starting with a < p
        for a in 1..p {
            rank += composition_count(w - a, m - 1);
        }
        w -= p;
        m -= 1;
    }
    rank
}

/// Binomial coefficient `C(n, k)`.
pub fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of compositions of `w` into `m` positive parts.
pub fn composition_count(w: u32, m: usize) -> usize {
    match m {
        0 => usize::from(w == 0),
        _ if (w as usize) < m => 0,
        _ => binom(u64::from(w) - 1, m as u64 - 1) as usize,
    }
}

/// A shuffle of `{0..p}` and `{p..p+q}`: `word[i]` is the letter placed at position `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shuffle {
    pub p: usize,
    pub q: usize,
    pub word: Vec<usize>,
}

impl Shuffle {
    /// Both blocks appear in increasing order.
    pub fn is_valid(&self) -> bool {
        let first: Vec<usize> = self.word.iter().copied().filter(|&x| x < self.p).collect();
        let second: Vec<usize> = self.word.iter().copied().filter(|&x| x >= self.p).collect();
        first == (0..self.p).collect::<Vec<_>>() && second == (self.p..self.p + self.q).collect::<Vec<_>>()
    }
}

/// All `C(p+q, p)` shuffles, ordered by the positions of the first block.
pub fn shuffles(p: usize, q: usize) -> Vec<Shuffle> {
    let n = p + q;
    let mut out = Vec::new();
    let mut positions = Vec::with_capacity(p);
    fn rec(start: usize, left: usize, n: usize, p: usize, q: usize, pos: &mut Vec<usize>, out: &mut Vec<Shuffle>) {
        if left == 0 {
            let mut word = Vec::with_capacity(n);
            let (mut a, mut b) = (0, p);
            for i in 0..n {
                if pos.contains(&i) {
                    word.push(a);
                    a += 1;
                } else {
                    word.push(b);
                    b += 1;
                }
            }
            out.push(Shuffle { p, q, word });
            return;
        }
        for i in start..=(n - left) {
            pos.push(i);
            rec(i + 1, left - 1, n, p, q, pos, out);
            pos.pop();
        }
    }
    rec(0, p, n, p, q, &mut positions, &mut out);
    out
}

/// Binary structure of a plane trivalent tree below the root leg.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeNode {
    Leaf(usize),
    Join(Box<TreeNode>, Box<TreeNode>),
}

impl TreeNode {
    /// First and last leg below this node.
    pub fn leg_range(&self) -> (usize, usize) {
        match self {
            TreeNode::Leaf(i) => (*i, *i),
            TreeNode::Join(l, r) => (l.leg_range().0, r.leg_range().1),
        }
    }

    fn serialize(&self, out: &mut String) {
        match self {
            TreeNode::Leaf(i) => out.push_str(&i.to_string()),
            TreeNode::Join(l, r) => {
                out.push('(');
                l.serialize(out);
                out.push(',');
                r.serialize(out);
                out.push(')');
            }
        }
    }
}

/// An edge of a plane tree with legs `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeEdge {
    Leg(usize),
    /// Internal edge whose far side carries the legs `lo..=hi`.
    Internal(usize, usize),
}

/// A plane trivalent tree with legs labelled `0..num_legs` counterclockwise.
///
/// Leg 0 is the root; `root` is the binary tree hanging from it, whose leaves
/// are legs `1..num_legs` in order. Equivalently, a triangulation of a convex
/// polygon with vertices `p_0..p_{n-1}` where leg `i` crosses the side
/// `p_i p_{i+1}` and an internal edge over legs `lo..=hi` crosses the diagonal
/// `p_lo p_{hi+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlaneTree {
    pub num_legs: usize,
    pub root: TreeNode,
}

impl PlaneTree {
    /// Internal vertices (one per triangle), `num_legs - 2` of them.
    pub fn num_internal_vertices(&self) -> usize {
        self.num_legs - 2
    }

    /// Edges in reference order: legs `0..n`, then internal edges depth-first from leg 0.
    pub fn edges(&self) -> Vec<TreeEdge> {
        let mut out: Vec<TreeEdge> = (0..self.num_legs).map(TreeEdge::Leg).collect();
        fn walk(node: &TreeNode, is_root: bool, out: &mut Vec<TreeEdge>) {
            if let TreeNode::Join(l, r) = node {
                if !is_root {
                    let (lo, hi) = node.leg_range();
                    out.push(TreeEdge::Internal(lo, hi));
                }
                walk(l, false, out);
                walk(r, false, out);
            }
        }
        walk(&self.root, true, &mut out);
        out
    }

    /// Diagonals `(a, b)`, `a < b`, of the corresponding polygon triangulation.
    pub fn diagonals(&self) -> Vec<(usize, usize)> {
        self.edges()
            .into_iter()
            .filter_map(|e| match e {
                TreeEdge::Internal(lo, hi) => {
                    let b = (hi + 1) % self.num_legs;
                    Some((lo.min(b), lo.max(b)))
                }
                TreeEdge::Leg(_) => None,
            })
            .collect()
    }

    /// Each internal vertex as its three edges in counterclockwise order,
    /// starting from the edge towards leg 0.
    pub fn vertices(&self) -> Vec<[TreeEdge; 3]> {
        let mut out = Vec::new();
        fn edge_of(node: &TreeNode) -> TreeEdge {
            match node {
                TreeNode::Leaf(i) => TreeEdge::Leg(*i),
                TreeNode::Join(..) => {
                    let (lo, hi) = node.leg_range();
                    TreeEdge::Internal(lo, hi)
                }
            }
        }
        fn walk(node: &TreeNode, up: TreeEdge, out: &mut Vec<[TreeEdge; 3]>) {
            if let TreeNode::Join(l, r) = node {
                out.push([up, edge_of(l), edge_of(r)]);
                walk(l, edge_of(l), out);
                walk(r, edge_of(r), out);
            }
        }
        walk(&self.root, TreeEdge::Leg(0), &mut out);
        out
    }

    /// The edges listed in the orientation order induced by the plane:
    /// leg 0 first, then each edge followed by the two edges beyond it in
    /// counterclockwise order.
    pub fn orientation_word(&self) -> Vec<TreeEdge> {
        let mut out = vec![TreeEdge::Leg(0)];
        fn walk(node: &TreeNode, is_root: bool, out: &mut Vec<TreeEdge>) {
            match node {
                TreeNode::Leaf(i) => out.push(TreeEdge::Leg(*i)),
                TreeNode::Join(l, r) => {
                    if !is_root {
                        let (lo, hi) = node.leg_range();
                        out.push(TreeEdge::Internal(lo, hi));
                    }
                    walk(l, false, out);
                    walk(r, false, out);
                }
            }
        }
        walk(&self.root, true, &mut out);
        out
    }

    /// Nested-parenthesis form, e.g. `0:((1,2),3)`.
    pub fn serialize(&self) -> String {
        let mut s = String::from("0:");
        self.root.serialize(&mut s);
        s
    }
}

impl fmt::Display for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// All plane trivalent trees with `num_legs` cyclically labelled legs.
pub fn plane_trivalent_trees(num_legs: usize) -> Vec<PlaneTree> {
    assert!(num_legs >= 3, "a trivalent tree needs at least 3 legs");
    fn rec(lo: usize, hi: usize) -> Vec<TreeNode> {
        if lo == hi {
            return vec![TreeNode::Leaf(lo)];
        }
        let mut out = Vec::new();
        for s in lo..hi {
            let left = rec(lo, s);
            let right = rec(s + 1, hi);
            for l in &left {
                for r in &right {
                    out.push(TreeNode::Join(Box::new(l.clone()), Box::new(r.clone())));
                }
            }
        }
        out
    }
    rec(1, num_legs - 1)
        .into_iter()
        .map(|root| PlaneTree { num_legs, root })
        .collect()
}

/// Sign of the permutation sorting `v` (which must have distinct entries).
pub fn permutation_sign<T: Ord>(v: &[T]) -> i32 {
    let mut sign = 1;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Letters of the free algebra on `Y` and `X_g` for `g` in `Z/N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Y,
    X(u32),
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Y => write!(f, "Y"),
            Letter::X(g) => write!(f, "X{g}"),
        }
    }
}

/// A word up to rotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord<L> {
    pub letters: Vec<L>,
}

impl<L: Ord + Clone> CyclicWord<L> {
    pub fn new(letters: Vec<L>) -> Self {
        CyclicWord { letters }
    }

    pub fn rotate(&self, k: usize) -> Self {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            let n = letters.len();
            letters.rotate_left(k % n);
        }
        CyclicWord { letters }
    }
}

/// Least rotation and the number of rotations fixing the word.
pub fn cyclic_canonicalize<L: Ord + Clone>(word: &CyclicWord<L>) -> (CyclicWord<L>, usize) {
    let n = word.letters.len();
    assert!(n > 0, "cyclic word must be nonempty");
    let mut best = word.clone();
    let mut aut = 0;
    for k in 0..n {
        let r = word.rotate(k);
        if r == *word {
            aut += 1;
        }
        if r.letters < best.letters {
            best = r;
        }
    }
    (best, aut)
}

impl<L: fmt::Display> fmt::Display for CyclicWord<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C(")?;
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

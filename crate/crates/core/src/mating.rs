//! Discrete mating: glue the two lattice trees of a correlated walk pair
//! into a planar map and check that the quotient is a sphere.
//!
//! The lower tree comes from `R` (chords drawn below the spine), the upper
//! tree from `L` (chords above). A chord joins consecutive visits `i < j` to
//! a level with strict excess in between (`X_i = X_j = min` on `[i, j]`,
//! `X_s > X_i` strictly inside), so each chord system is non-crossing by
//! construction. Mating identifies the endpoints of every chord, keeps the
//! chord as an edge of the quotient (a loop at the merged vertex), and keeps
//! the spine edges `(i, i+1)`. Identification is performed as a
//! genus-preserving contraction: each chord's endpoints are spliced together
//! along the chord, on its spine-facing side, exactly as in the planar
//! drawing. Crossing chords (which the tree construction never produces)
//! force a handle and show up as positive genus.

use std::io::Write;

use crate::corrpath::{PathKind, PathPair, Window};
use crate::error::{Error, Result};

/// Which tree a chord system belongs to. `Lower` chords hang below the
/// spine (from `R`), `Upper` chords arch above it (from `L`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChordSide {
    Lower,
    Upper,
}

/// A non-crossing matching on `{0, ..., n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChordSystem {
    pub side: ChordSide,
    /// Matches `(i, j)` with `i < j`, sorted by left endpoint.
    pub matches: Vec<(usize, usize)>,
    /// Number of walk steps; indices run over `0 ..= n`.
    pub n: usize,
}

impl ChordSystem {
    /// Validating constructor: matches must be in range, `i < j`,
    /// non-crossing, and use each index at most once as a left and once as a
    /// right endpoint.
    pub fn from_matches(side: ChordSide, mut matches: Vec<(usize, usize)>, n: usize) -> Result<Self> {
        matches.sort_unstable();
        let mut left_used = vec![false; n + 1];
        let mut right_used = vec![false; n + 1];
        for &(i, j) in &matches {
            if i >= j || j > n {
                return Err(Error::Domain(format!("bad match ({i}, {j}) for n = {n}")));
            }
            if left_used[i] || right_used[j] {
                return Err(Error::Domain(format!("endpoint reused in match ({i}, {j})")));
            }
            left_used[i] = true;
            right_used[j] = true;
        }
        for a in 0..matches.len() {
            for b in a + 1..matches.len() {
                let (i, j) = matches[a];
                let (k, l) = matches[b];
                if i < k && k < j && j < l {
                    return Err(Error::Domain(format!(
                        "chords ({i},{j}) and ({k},{l}) cross"
                    )));
                }
            }
        }
        Ok(ChordSystem { side, matches, n })
    }

    /// Skips the non-crossing validation. Exists so that tests can build
    /// deliberately crossed systems and watch the genus check reject them.
    pub fn from_matches_unvalidated(
        side: ChordSide,
        mut matches: Vec<(usize, usize)>,
        n: usize,
    ) -> Self {
        matches.sort_unstable();
        ChordSystem { side, matches, n }
    }
}

/// All descend-ladder matches of a +-1 integer walk: `(i, j)` with
/// `X_i = X_j = min X` on `[i, j]` and `X_s > X_i` strictly between.
/// Linear time via a stack.
pub fn tree_chords(walk: &[i64], side: ChordSide) -> Result<ChordSystem> {
    if walk.len() < 2 {
        return Err(Error::Domain("walk needs at least one step".into()));
    }
    for w in walk.windows(2) {
        if (w[1] - w[0]).abs() != 1 {
            return Err(Error::Domain("walk steps must be +-1".into()));
        }
    }
    let n = walk.len() - 1;
    let mut matches = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    for (j, &x) in walk.iter().enumerate() {
        while let Some(&top) = stack.last() {
            if walk[top] > x {
                stack.pop();
            } else {
                break;
            }
        }
        if let Some(&top) = stack.last() {
            if walk[top] == x {
                matches.push((top, j));
                stack.pop();
            }
        }
        stack.push(j);
    }
    matches.sort_unstable();
    Ok(ChordSystem { side, matches, n })
}

/// A map on an orientable surface as a rotation system: `next` is the
/// counterclockwise successor around the vertex, `twin` the edge involution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarMap {
    pub next: Vec<usize>,
    pub twin: Vec<usize>,
    /// Vertex id of each half-edge (ids are dense, in order of smallest
    /// half-edge per rotation orbit).
    pub vertex_of: Vec<usize>,
    pub v: usize,
    pub e: usize,
    pub f: usize,
    pub genus: usize,
}

impl PlanarMap {
    /// Validates the permutations and computes vertices (rotation orbits),
    /// faces (orbits of `next . twin`), and genus.
    pub fn from_permutations(next: Vec<usize>, twin: Vec<usize>) -> Result<Self> {
        let h = next.len();
        if h == 0 || h % 2 != 0 || twin.len() != h {
            return Err(Error::Structure(format!(
                "need a nonempty even half-edge count, got next: {h}, twin: {}",
                twin.len()
            )));
        }
        let mut seen = vec![false; h];
        for &x in &next {
            if x >= h || seen[x] {
                return Err(Error::Structure("next is not a permutation".into()));
            }
            seen[x] = true;
        }
        for (i, &t) in twin.iter().enumerate() {
            if t >= h || t == i || twin[t] != i {
                return Err(Error::Structure(
                    "twin is not a fixed-point-free involution".into(),
                ));
            }
        }

        let (vertex_of, v) = orbits(&next);
        let f = orbits_count(|x| next[twin[x]], h);
        let e = h / 2;

        // connected components of the underlying graph
        let mut comp = vec![usize::MAX; h];
        let mut c = 0;
        for start in 0..h {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut todo = vec![start];
            while let Some(x) = todo.pop() {
                if comp[x] != usize::MAX {
                    continue;
                }
                comp[x] = c;
                todo.push(next[x]);
                todo.push(twin[x]);
            }
            c += 1;
        }

        let chi = v as i64 - e as i64 + f as i64;
        let doubled = 2 * c as i64 - chi;
        if doubled < 0 || doubled % 2 != 0 {
            return Err(Error::Structure(format!(
                "impossible Euler characteristic {chi} for {c} component(s)"
            )));
        }
        Ok(PlanarMap {
            next,
            twin,
            vertex_of,
            v,
            e,
            f,
            genus: (doubled / 2) as usize,
        })
    }

    /// CSV export with header `half_edge,twin,next_at_vertex,vertex`.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "half_edge,twin,next_at_vertex,vertex")?;
        for h in 0..self.next.len() {
            writeln!(
                w,
                "{},{},{},{}",
                h, self.twin[h], self.next[h], self.vertex_of[h]
            )?;
        }
        Ok(())
    }

    /// JSON summary `{"V":..,"E":..,"F":..,"genus":..}`.
    pub fn summary_json(&self) -> String {
        format!(
            "{{\"V\":{},\"E\":{},\"F\":{},\"genus\":{}}}",
            self.v, self.e, self.f, self.genus
        )
    }
}

/// `(V, E, F, genus)` of a map.
pub fn euler_genus(map: &PlanarMap) -> (usize, usize, usize, usize) {
    (map.v, map.e, map.f, map.genus)
}

fn orbits(perm: &[usize]) -> (Vec<usize>, usize) {
    let mut id = vec![usize::MAX; perm.len()];
    let mut count = 0;
    for start in 0..perm.len() {
        if id[start] != usize::MAX {
            continue;
        }
        let mut x = start;
        while id[x] == usize::MAX {
            id[x] = count;
            x = perm[x];
        }
        count += 1;
    }
    (id, count)
}

fn orbits_count(perm: impl Fn(usize) -> usize, len: usize) -> usize {
    let mut seen = vec![false; len];
    let mut count = 0;
    for start in 0..len {
        if seen[start] {
            continue;
        }
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = perm(x);
        }
        count += 1;
    }
    count
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Doubly linked rotation cycles over half-edge ids, supporting the
/// endpoint-splice used to contract a chord along its spine-facing side.
struct Rotations {
    next: Vec<usize>,
    prev: Vec<usize>,
}

impl Rotations {
    fn from_cycles(cycles: &[Vec<usize>], h: usize) -> Self {
        let mut next = vec![usize::MAX; h];
        let mut prev = vec![usize::MAX; h];
        for cycle in cycles {
            for k in 0..cycle.len() {
                let a = cycle[k];
                let b = cycle[(k + 1) % cycle.len()];
                next[a] = b;
                prev[b] = a;
            }
        }
        Rotations { next, prev }
    }

    fn set(&mut self, a: usize, b: usize) {
        self.next[a] = b;
        self.prev[b] = a;
    }
}

/// Glues the quotient map of two chord systems over the same index set:
/// vertices are index classes merged by all matches, edges are the spine
/// edges plus one edge per match. The result of the fold-in is genus 0
/// exactly when the combined diagram embeds in the sphere.
pub fn mate(lower: &ChordSystem, upper: &ChordSystem, n: usize) -> Result<PlanarMap> {
    if lower.side != ChordSide::Lower || upper.side != ChordSide::Upper {
        return Err(Error::Shape("chord systems passed on the wrong sides".into()));
    }
    if lower.n != n || upper.n != n {
        return Err(Error::Shape(format!(
            "walk lengths disagree: lower {}, upper {}, expected {n}",
            lower.n, upper.n
        )));
    }
    if n == 0 {
        return Err(Error::Domain("mating needs at least one spine edge".into()));
    }

    // Canonical half-edge numbering: spine halves 2i (at i) and 2i+1
    // (at i+1), then lower chords, then upper chords, two halves each.
    let spine_halves = 2 * n;
    let total = spine_halves + 2 * (lower.matches.len() + upper.matches.len());
    let chord_base_lower = spine_halves;
    let chord_base_upper = spine_halves + 2 * lower.matches.len();

    // Per-point slots in counterclockwise order, starting at the outgoing
    // spine direction: spine-right, upper-right, upper-left, spine-left,
    // lower-left, lower-right.
    let mut slots: Vec<[Option<usize>; 6]> = vec![[None; 6]; n + 1];
    for i in 0..n {
        slots[i][0] = Some(2 * i);
        slots[i + 1][3] = Some(2 * i + 1);
    }
    for (k, &(i, j)) in lower.matches.iter().enumerate() {
        slots[i][5] = Some(chord_base_lower + 2 * k);
        slots[j][4] = Some(chord_base_lower + 2 * k + 1);
    }
    for (k, &(i, j)) in upper.matches.iter().enumerate() {
        slots[i][1] = Some(chord_base_upper + 2 * k);
        slots[j][2] = Some(chord_base_upper + 2 * k + 1);
    }
    let cycles: Vec<Vec<usize>> = slots
        .iter()
        .map(|s| s.iter().flatten().copied().collect())
        .collect();
    let mut rot = Rotations::from_cycles(&cycles, total);

    let mut twin = vec![0usize; total];
    for i in 0..n {
        twin[2 * i] = 2 * i + 1;
        twin[2 * i + 1] = 2 * i;
    }
    for k in 0..lower.matches.len() + upper.matches.len() {
        let a = spine_halves + 2 * k;
        twin[a] = a + 1;
        twin[a + 1] = a;
    }

    // Fold each chord in: merge its endpoints by splicing the two rotation
    // cycles at the chord's spine-facing side. A chord whose endpoints are
    // already identified stays as a loop untouched.
    let mut uf = UnionFind::new(n + 1);
    let mut fold = |rot: &mut Rotations, uf: &mut UnionFind, side: ChordSide, i: usize, j: usize, hi: usize, hj: usize| {
        if !uf.union(i, j) {
            return;
        }
        match side {
            ChordSide::Upper => {
                // companion sits before hi and after hj (CCW)
                let p = rot.prev[hi];
                let nn = rot.next[hj];
                rot.set(p, nn);
                rot.set(hj, hi);
            }
            ChordSide::Lower => {
                // companion sits after hi and before hj (CCW)
                let nn = rot.next[hi];
                let p = rot.prev[hj];
                rot.set(hi, hj);
                rot.set(p, nn);
            }
        }
    };
    for (k, &(i, j)) in lower.matches.iter().enumerate() {
        let h = chord_base_lower + 2 * k;
        fold(&mut rot, &mut uf, ChordSide::Lower, i, j, h, h + 1);
    }
    for (k, &(i, j)) in upper.matches.iter().enumerate() {
        let h = chord_base_upper + 2 * k;
        fold(&mut rot, &mut uf, ChordSide::Upper, i, j, h, h + 1);
    }

    let map = PlanarMap::from_permutations(rot.next, twin)?;

    // Rotation orbits and merged index classes must agree.
    let mut classes = std::collections::HashSet::new();
    for i in 0..=n {
        classes.insert(uf.find(i));
    }
    if classes.len() != map.v {
        return Err(Error::Structure(format!(
            "vertex classes ({}) disagree with rotation orbits ({})",
            classes.len(),
            map.v
        )));
    }
    Ok(map)
}

/// Builds the two chord systems of a window of a lattice path (Brownian
/// paths are coarsened by increment signs first) and mates them.
pub fn mate_window(path: &PathPair, w: Window) -> Result<PlanarMap> {
    w.check_against(path)?;
    if w.len() < 2 {
        return Err(Error::Domain("mating window needs at least one step".into()));
    }
    let lattice;
    let p = if path.kind == PathKind::Lattice {
        path
    } else {
        lattice = path.coarsen_to_lattice();
        &lattice
    };
    let rebase = |xs: &[f64]| -> Vec<i64> {
        let x0 = xs[w.a()];
        (w.a()..=w.b()).map(|t| (xs[t] - x0) as i64).collect()
    };
    let lower = tree_chords(&rebase(&p.r), ChordSide::Lower)?;
    let upper = tree_chords(&rebase(&p.l), ChordSide::Upper)?;
    mate(&lower, &upper, w.len() - 1)
}

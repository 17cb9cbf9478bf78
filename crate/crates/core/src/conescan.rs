//! Quadrant-cone structure of a correlated pair `Z = (L, R)`.
//!
//! An index `t` is a cone time if `Z` stays coordinatewise at or above `Z_t`
//! on some `[t', t]`; the entrance `v(t)` is the earliest such start. The
//! cone condition is weak (`>=`), so the previous-smaller-element sweeps use
//! strict `<`. Entrances are computed on the whole path; a window `[a, b]`
//! acts as a filter: only cone intervals `[v(t), t]` with `v(t) >= a` belong
//! to the window, and the entrance map records (clipped) when a cone
//! condition extends past the window start.
//!
//! Any two cone intervals that intersect are nested, so the set-maximal
//! intervals of a window are pairwise disjoint. Everything here is a pure
//! read of an immutable path; the quadratic oracle re-evaluates the
//! definitions directly and exists to pin the sweeps down in tests.

use std::io::Write;

use crate::corrpath::{PathPair, Window};
use crate::error::{Error, Result};

/// Which side of the exploration traverses a bubble boundary: `Left` iff the
/// R-coordinate returns exactly (`dR = 0`), `Right` iff `dL = 0`. Ties (both
/// zero) are never silently classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Ambiguous,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Ambiguous => "ambiguous",
        }
    }
}

/// Entrance times over a window, clipped at the window start.
#[derive(Debug, Clone)]
pub struct EntranceMap {
    window: Window,
    /// `v[t - a]` = entrance of the cone ending at `t`, clipped below at `a`.
    v: Vec<usize>,
    /// True where the unclipped cone condition extends past the window start.
    open_start: Vec<bool>,
}

impl EntranceMap {
    pub fn window(&self) -> Window {
        self.window
    }

    /// Clipped entrance time of index `t` (global index).
    pub fn v(&self, t: usize) -> usize {
        self.v[t - self.window.a()]
    }

    pub fn extends_past_start(&self, t: usize) -> bool {
        self.open_start[t - self.window.a()]
    }
}

/// A maximal cone interval `[v, t]` within a window. `jump = Z_t - Z_v` is
/// coordinatewise `<= 0`; `area = t - v` in index units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeInterval {
    pub v: usize,
    pub t: usize,
    pub side: Side,
    pub jump: (f64, f64),
    pub area: usize,
}

impl ConeInterval {
    /// `|dL| + |dR|`; one coordinate vanishes except in ambiguous ties.
    pub fn boundary_magnitude(&self) -> f64 {
        self.jump.0.abs() + self.jump.1.abs()
    }
}

/// A strictly increasing set of path indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    idx: Vec<usize>,
}

impl IndexSet {
    pub fn new(idx: Vec<usize>) -> Result<Self> {
        if !idx.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Domain("index set must be strictly increasing".into()));
        }
        Ok(IndexSet { idx })
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.idx
    }

    pub fn len(&self) -> usize {
        self.idx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idx.is_empty()
    }

    /// Lengths of the gaps between consecutive members, in index units.
    pub fn gaps(&self) -> Vec<usize> {
        self.idx.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Greedy interval-cover counts over a grid of interval lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringCurve {
    /// `(epsilon, count)`, sorted by increasing epsilon; counts non-increasing.
    pub points: Vec<(f64, u64)>,
}

impl CoveringCurve {
    /// CSV export with header `epsilon,count`.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "epsilon,count")?;
        for (eps, n) in &self.points {
            writeln!(w, "{eps},{n}")?;
        }
        Ok(())
    }
}

/// Unclipped entrance times `v(t)` for `t in [0, b]`, via one
/// previous-smaller-element monotonic-stack sweep per coordinate and a
/// pointwise max. `v(t) = t` means `t` heads no nontrivial cone.
pub(crate) fn global_entrances(path: &PathPair, b: usize) -> Vec<usize> {
    let l = &path.l[..=b];
    let r = &path.r[..=b];
    let mut v = vec![0usize; b + 1];
    let mut stack_l: Vec<usize> = Vec::with_capacity(64);
    let mut stack_r: Vec<usize> = Vec::with_capacity(64);
    for t in 0..=b {
        let lt = l[t];
        while let Some(&s) = stack_l.last() {
            if l[s] >= lt {
                stack_l.pop();
            } else {
                break;
            }
        }
        let from_l = stack_l.last().map_or(0, |&s| s + 1);
        stack_l.push(t);

        let rt = r[t];
        while let Some(&s) = stack_r.last() {
            if r[s] >= rt {
                stack_r.pop();
            } else {
                break;
            }
        }
        let from_r = stack_r.last().map_or(0, |&s| s + 1);
        stack_r.push(t);

        v[t] = from_l.max(from_r);
    }
    v
}

fn classify_side(path: &PathPair, v: usize, t: usize) -> Side {
    let dl = path.l[t] - path.l[v];
    let dr = path.r[t] - path.r[v];
    if dl == 0.0 && dr == 0.0 {
        Side::Ambiguous
    } else if dl == 0.0 {
        Side::Right
    } else if dr == 0.0 {
        Side::Left
    } else if v > 0 {
        // Sampled-continuum paths: neither coordinate returns exactly at mesh
        // resolution; classify by the face through which the cone is entered.
        let l_face = path.l[v - 1] < path.l[t];
        let r_face = path.r[v - 1] < path.r[t];
        match (l_face, r_face) {
            (true, false) => Side::Right,
            (false, true) => Side::Left,
            _ => Side::Ambiguous,
        }
    } else {
        Side::Ambiguous
    }
}

fn make_interval(path: &PathPair, v: usize, t: usize) -> ConeInterval {
    ConeInterval {
        v,
        t,
        side: classify_side(path, v, t),
        jump: (path.l[t] - path.l[v], path.r[t] - path.r[v]),
        area: t - v,
    }
}

/// Entrance map of a window, clipped at the window start, with the
/// extends-past-start sentinel. Linear time in the window end.
pub fn entrance_times(path: &PathPair, w: Window) -> Result<EntranceMap> {
    w.check_against(path)?;
    let vg = global_entrances(path, w.b());
    let a = w.a();
    let mut v = Vec::with_capacity(w.len());
    let mut open_start = Vec::with_capacity(w.len());
    for t in a..=w.b() {
        v.push(vg[t].max(a));
        open_start.push(vg[t] < a);
    }
    Ok(EntranceMap {
        window: w,
        v,
        open_start,
    })
}

fn maximal_from_entrances(path: &PathPair, vg: &[usize], w: Window) -> Vec<ConeInterval> {
    let a = w.a();
    let mut out = Vec::new();
    // Right-to-left sweep: t heads a set-maximal interval iff its entrance is
    // strictly below every later in-window entrance.
    let mut run_min = usize::MAX;
    for t in (a..=w.b()).rev() {
        let v = vg[t];
        if v < a {
            continue; // cone interval sticks out of the window
        }
        if v < t && v < run_min {
            out.push(make_interval(path, v, t));
        }
        run_min = run_min.min(v);
    }
    out.reverse();
    out
}

/// Set-maximal cone intervals of the window, sorted by right endpoint.
/// Distinct maximal intervals are disjoint.
pub fn maximal_cone_intervals(path: &PathPair, w: Window) -> Result<Vec<ConeInterval>> {
    w.check_against(path)?;
    let vg = global_entrances(path, w.b());
    Ok(maximal_from_entrances(path, &vg, w))
}

/// Maximal cone intervals whose entrance lies strictly inside `(lo, hi]`:
/// the bubbles of a chordal exploration of the bead `[lo, hi]`. Intervals
/// whose cone condition extends to `lo` or earlier (in particular the whole
/// bead itself, when `hi` is a simultaneous infimum) are not bubbles.
pub(crate) fn maximal_interior_intervals(
    path: &PathPair,
    vg: &[usize],
    lo: usize,
    hi: usize,
) -> Vec<ConeInterval> {
    let mut out = Vec::new();
    let mut run_min = usize::MAX;
    for t in (lo + 1..=hi).rev() {
        let v = vg[t];
        if v <= lo {
            continue;
        }
        if v < t && v < run_min {
            out.push(make_interval(path, v, t));
        }
        run_min = run_min.min(v);
    }
    out.reverse();
    out
}

/// The ancestor-free set of the window: indices contained in no open maximal
/// cone interval (interval endpoints are retained).
pub fn non_cone_set(path: &PathPair, w: Window) -> Result<IndexSet> {
    let intervals = maximal_cone_intervals(path, w)?;
    Ok(non_cone_from_intervals(&intervals, w))
}

pub(crate) fn non_cone_from_intervals(intervals: &[ConeInterval], w: Window) -> IndexSet {
    let mut idx = Vec::new();
    let mut cursor = w.a();
    for iv in intervals {
        // intervals are disjoint and sorted by t, hence also by v
        for i in cursor..=iv.v {
            idx.push(i);
        }
        cursor = iv.t;
    }
    for i in cursor..=w.b() {
        idx.push(i);
    }
    IndexSet { idx }
}

/// All `s >= t` at which both coordinates attain their running minimum
/// relative to `t` (ties included; `t` itself always qualifies).
pub fn simultaneous_infima(path: &PathPair, t: usize) -> Result<IndexSet> {
    if t > path.n {
        return Err(Error::Domain(format!("origin {t} exceeds path length {}", path.n)));
    }
    let mut idx = Vec::new();
    let mut min_l = f64::INFINITY;
    let mut min_r = f64::INFINITY;
    for s in t..=path.n {
        if path.l[s] <= min_l {
            min_l = path.l[s];
        }
        if path.r[s] <= min_r {
            min_r = path.r[s];
        }
        if path.l[s] == min_l && path.r[s] == min_r {
            idx.push(s);
        }
    }
    Ok(IndexSet { idx })
}

/// First argmin of each coordinate over the window.
pub fn window_argmins(path: &PathPair, w: Window) -> Result<(usize, usize)> {
    w.check_against(path)?;
    let mut xl = w.a();
    let mut xr = w.a();
    for t in w.a()..=w.b() {
        if path.l[t] < path.l[xl] {
            xl = t;
        }
        if path.r[t] < path.r[xr] {
            xr = t;
        }
    }
    Ok((xl, xr))
}

/// Greedy left-to-right cover of the set by length-`eps` intervals, closed on
/// the left (an interval placed at `x` covers `[x, x + eps)`). Greedy is
/// optimal for one-dimensional covers. Positions are `index * dt`.
pub fn covering_count(set: &IndexSet, epsilons: &[f64], dt: f64) -> Result<CoveringCurve> {
    if set.is_empty() {
        return Err(Error::EmptySet("cannot cover an empty set".into()));
    }
    if epsilons.is_empty() || epsilons.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Domain("epsilon grid must be nonempty and positive".into()));
    }
    let mut eps_sorted = epsilons.to_vec();
    eps_sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut points = Vec::with_capacity(eps_sorted.len());
    for &eps in &eps_sorted {
        let mut count = 0u64;
        let mut cover_end = f64::NEG_INFINITY;
        for &i in &set.idx {
            let x = i as f64 * dt;
            if x >= cover_end {
                count += 1;
                cover_end = x + eps;
            }
        }
        points.push((eps, count));
    }
    Ok(CoveringCurve { points })
}

/// The cone-gap event `E_eps(t)`: true iff no cone interval of the window
/// contains `[t, t + eps]`. Any such interval would sit inside the maximal
/// one containing `t + eps`, so only that one is checked.
pub fn cone_gap_event(path: &PathPair, t: usize, eps: usize, w: Window) -> Result<bool> {
    w.check_against(path)?;
    if t < w.a() || t + eps > w.b() {
        return Err(Error::Domain(format!(
            "[t, t+eps] = [{}, {}] not inside window [{}, {}]",
            t,
            t + eps,
            w.a(),
            w.b()
        )));
    }
    let intervals = maximal_cone_intervals(path, w)?;
    Ok(cone_gap_event_in(&intervals, t, eps))
}

/// [`cone_gap_event`] against precomputed maximal intervals of the window.
pub fn cone_gap_event_in(intervals: &[ConeInterval], t: usize, eps: usize) -> bool {
    let target = t + eps;
    // first interval with right endpoint >= target
    let k = intervals.partition_point(|iv| iv.t < target);
    match intervals.get(k) {
        Some(iv) => !(iv.v <= t && target >= iv.v),
        None => true,
    }
}

/// Quadratic-time oracle: entrance times by direct backward scans of the
/// cone condition, maximality by pairwise containment. Guarded to
/// `n <= 2^16`.
pub fn brute_force_cone_oracle(
    path: &PathPair,
    w: Window,
) -> Result<(EntranceMap, Vec<ConeInterval>)> {
    if path.n > 1 << 16 {
        return Err(Error::Size(format!(
            "brute-force oracle limited to 2^16 steps, got {}",
            path.n
        )));
    }
    w.check_against(path)?;
    let a = w.a();
    let mut vg = vec![0usize; w.b() + 1];
    for t in 0..=w.b() {
        let mut v = 0usize;
        for s in (0..t).rev() {
            if path.l[s] < path.l[t] || path.r[s] < path.r[t] {
                v = s + 1;
                break;
            }
        }
        vg[t] = v;
    }

    let mut v_clip = Vec::with_capacity(w.len());
    let mut open_start = Vec::with_capacity(w.len());
    for t in a..=w.b() {
        v_clip.push(vg[t].max(a));
        open_start.push(vg[t] < a);
    }
    let map = EntranceMap {
        window: w,
        v: v_clip,
        open_start,
    };

    // family of nontrivial in-window cone intervals
    let family: Vec<(usize, usize)> = (a..=w.b())
        .filter(|&t| vg[t] >= a && vg[t] < t)
        .map(|t| (vg[t], t))
        .collect();
    let mut maximal = Vec::new();
    'outer: for &(v, t) in &family {
        for &(v2, t2) in &family {
            if (v2, t2) != (v, t) && v2 <= v && t2 >= t {
                continue 'outer;
            }
        }
        maximal.push(make_interval(path, v, t));
    }
    maximal.sort_by_key(|iv| iv.t);
    Ok((map, maximal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corrpath::{sample_lattice_pair, CovSpec, PathKind};
    use proptest::prelude::*;

    fn path_from(l: Vec<f64>, r: Vec<f64>) -> PathPair {
        assert_eq!(l.len(), r.len());
        PathPair {
            spec: CovSpec::new(6.0).unwrap(),
            n: l.len() - 1,
            dt: 1.0,
            l,
            r,
            kind: PathKind::Lattice,
        }
    }

    #[test]
    fn entrance_strictly_decreasing_pair() {
        let p = path_from(vec![0.0, -1.0, -2.0], vec![0.0, -1.0, -2.0]);
        let m = entrance_times(&p, Window::full(&p)).unwrap();
        assert_eq!(m.v(2), 0);
        assert_eq!(m.v(1), 0);
        assert_eq!(m.v(0), 0);
    }

    #[test]
    fn entrance_tent() {
        let p = path_from(vec![0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0]);
        let m = entrance_times(&p, Window::full(&p)).unwrap();
        assert_eq!(m.v(2), 0);
    }

    #[test]
    fn entrance_single_index_window() {
        let p = path_from(vec![0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0]);
        let w = Window::new(1, 1).unwrap();
        let m = entrance_times(&p, w).unwrap();
        assert_eq!(m.v(1), 1);
        assert!(!m.extends_past_start(1));
    }

    #[test]
    fn entrance_clipping_and_sentinel() {
        // Cone of t=4 extends to 0; window starts at 2.
        let p = path_from(
            vec![0.0, 1.0, 2.0, 1.0, 0.0],
            vec![0.0, 1.0, 2.0, 1.0, 0.0],
        );
        let w = Window::new(2, 4).unwrap();
        let m = entrance_times(&p, w).unwrap();
        assert_eq!(m.v(4), 2);
        assert!(m.extends_past_start(4));
        // ...and the boundary-crossing interval is not a window interval.
        let ivs = maximal_cone_intervals(&p, w).unwrap();
        assert!(ivs.iter().all(|iv| iv.v > 2 || iv.t < 4));
    }

    #[test]
    fn maximal_decreasing_is_whole_window() {
        let p = path_from(
            vec![0.0, -1.0, -2.0, -3.0],
            vec![0.0, -1.0, -2.0, -3.0],
        );
        let ivs = maximal_cone_intervals(&p, Window::full(&p)).unwrap();
        assert_eq!(ivs.len(), 1);
        assert_eq!((ivs[0].v, ivs[0].t), (0, 3));
    }

    #[test]
    fn maximal_spec_example() {
        let p = path_from(
            vec![0.0, 1.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 2.0, 1.0, 0.0],
        );
        let ivs = maximal_cone_intervals(&p, Window::full(&p)).unwrap();
        assert_eq!(ivs.len(), 1);
        assert_eq!((ivs[0].v, ivs[0].t), (0, 4));
        let (_, oracle) = brute_force_cone_oracle(&p, Window::full(&p)).unwrap();
        assert_eq!(ivs, oracle);
    }

    #[test]
    fn non_cone_set_whole_window_interval() {
        let p = path_from(vec![0.0, -1.0, -2.0], vec![0.0, -1.0, -2.0]);
        let a = non_cone_set(&p, Window::full(&p)).unwrap();
        assert_eq!(a.as_slice(), &[0, 2]);
    }

    #[test]
    fn non_cone_set_no_cones() {
        let p = path_from(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 2.0]);
        let a = non_cone_set(&p, Window::full(&p)).unwrap();
        assert_eq!(a.as_slice(), &[0, 1, 2]);
    }

    #[test]
    fn infima_decreasing() {
        let p = path_from(vec![0.0, -1.0, -2.0], vec![0.0, -1.0, -2.0]);
        let m = simultaneous_infima(&p, 0).unwrap();
        assert_eq!(m.as_slice(), &[0, 1, 2]);
    }

    #[test]
    fn infima_spec_example() {
        let p = path_from(vec![0.0, -1.0, -2.0], vec![0.0, -1.0, 0.0]);
        let m = simultaneous_infima(&p, 0).unwrap();
        assert_eq!(m.as_slice(), &[0, 1]);
    }

    #[test]
    fn argmins_monotone_and_ties() {
        let dec = path_from(vec![0.0, -1.0, -2.0], vec![0.0, 1.0, 2.0]);
        let (xl, xr) = window_argmins(&dec, Window::full(&dec)).unwrap();
        assert_eq!(xl, 2);
        assert_eq!(xr, 0);

        // revisit of the minimum: first attaining index wins
        let tie = path_from(
            vec![0.0, -1.0, 0.0, -1.0, 0.0],
            vec![0.0, 1.0, 0.0, 1.0, 0.0],
        );
        let (xl, xr) = window_argmins(&tie, Window::full(&tie)).unwrap();
        assert_eq!(xl, 1);
        assert_eq!(xr, 0);
    }

    #[test]
    fn covering_single_point() {
        let s = IndexSet::new(vec![0]).unwrap();
        let c = covering_count(&s, &[0.5, 1.0, 8.0], 1.0).unwrap();
        assert!(c.points.iter().all(|&(_, n)| n == 1));
    }

    #[test]
    fn covering_contiguous_run_matches_exhaustive() {
        // {0..=k} with eps = 1 needs k+1 intervals (left-closed, right-open).
        for k in 0..20usize {
            let s = IndexSet::new((0..=k).collect()).unwrap();
            let c = covering_count(&s, &[1.0], 1.0).unwrap();
            assert_eq!(c.points[0].1, (k + 1) as u64);
        }
    }

    /// Exhaustive minimum cover: any optimal cover can shift its intervals to
    /// start at set points, so search over subsets of starting points.
    fn exhaustive_min_cover(points: &[usize], eps: f64) -> u64 {
        let n = points.len();
        assert!(n <= 20);
        let mut best = n as u64;
        for mask in 1u32..(1 << n) {
            let starts: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let covered = points.iter().all(|&p| {
                starts
                    .iter()
                    .any(|&s| points[s] <= p && (p as f64) < points[s] as f64 + eps)
            });
            if covered {
                best = best.min(starts.len() as u64);
            }
        }
        best
    }

    #[test]
    fn covering_greedy_is_optimal_small() {
        let sets: Vec<Vec<usize>> = vec![
            vec![0, 1, 2, 5, 6, 11, 12, 13, 30],
            vec![0, 3, 4, 9, 10, 11, 12, 25, 26],
            vec![2, 4, 8, 16, 17, 18, 19, 20],
        ];
        for pts in sets {
            let s = IndexSet::new(pts.clone()).unwrap();
            for eps in [1.0, 2.0, 3.5, 7.0] {
                let greedy = covering_count(&s, &[eps], 1.0).unwrap().points[0].1;
                assert_eq!(greedy, exhaustive_min_cover(&pts, eps), "eps={eps} {pts:?}");
            }
        }
    }

    #[test]
    fn covering_rejects_empty_set() {
        let s = IndexSet { idx: vec![] };
        assert!(matches!(
            covering_count(&s, &[1.0], 1.0),
            Err(Error::EmptySet(_))
        ));
    }

    #[test]
    fn cone_gap_global_cone_false() {
        let p = path_from(
            vec![0.0, -1.0, -2.0, -3.0, -4.0],
            vec![0.0, -1.0, -2.0, -3.0, -4.0],
        );
        let w = Window::full(&p);
        for t in 0..3 {
            for eps in 1..(4 - t) {
                assert!(!cone_gap_event(&p, t, eps, w).unwrap());
            }
        }
    }

    #[test]
    fn cone_gap_no_full_window_cone_true() {
        let p = path_from(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, 2.0, 3.0]);
        assert!(cone_gap_event(&p, 0, 3, Window::full(&p)).unwrap());
    }

    #[test]
    fn oracle_trivial_cases() {
        let p = path_from(vec![0.0, -1.0, -2.0], vec![0.0, -1.0, -2.0]);
        let (_, ivs) = brute_force_cone_oracle(&p, Window::full(&p)).unwrap();
        assert_eq!(ivs.len(), 1);
        assert_eq!((ivs[0].v, ivs[0].t), (0, 2));

        let w = Window::new(1, 1).unwrap();
        let (m, ivs) = brute_force_cone_oracle(&p, w).unwrap();
        assert!(ivs.is_empty());
        assert_eq!(m.v(1), 1);
    }

    #[test]
    fn sweep_matches_oracle_on_random_paths() {
        let spec = CovSpec::new(6.0).unwrap();
        for seed in 0..50 {
            let p = sample_lattice_pair(&spec, 1 << 10, seed).unwrap();
            let w = Window::full(&p);
            let fast = maximal_cone_intervals(&p, w).unwrap();
            let em = entrance_times(&p, w).unwrap();
            let (om, oivs) = brute_force_cone_oracle(&p, w).unwrap();
            assert_eq!(fast, oivs, "seed {seed}");
            for t in 0..=p.n {
                assert_eq!(em.v(t), om.v(t), "seed {seed} t {t}");
                assert_eq!(em.extends_past_start(t), om.extends_past_start(t));
            }
        }
    }

    #[test]
    fn sweep_matches_oracle_on_subwindows() {
        let spec = CovSpec::new(5.0).unwrap();
        for seed in 0..20 {
            let p = sample_lattice_pair(&spec, 512, seed).unwrap();
            let w = Window::new(100, 400).unwrap();
            let fast = maximal_cone_intervals(&p, w).unwrap();
            let (_, oivs) = brute_force_cone_oracle(&p, w).unwrap();
            assert_eq!(fast, oivs, "seed {seed}");
        }
    }

    #[test]
    fn maximal_intervals_disjoint_and_cover_complement() {
        let spec = CovSpec::new(6.0).unwrap();
        for seed in 100..120 {
            let p = sample_lattice_pair(&spec, 1 << 12, seed).unwrap();
            let w = Window::full(&p);
            let ivs = maximal_cone_intervals(&p, w).unwrap();
            for k in 1..ivs.len() {
                assert!(ivs[k - 1].t < ivs[k].v, "overlap at {k}");
            }
            for iv in &ivs {
                assert!(iv.jump.0 <= 0.0 && iv.jump.1 <= 0.0);
                assert_eq!(iv.area, iv.t - iv.v);
                match iv.side {
                    Side::Left => assert_eq!(iv.jump.1, 0.0),
                    Side::Right => assert_eq!(iv.jump.0, 0.0),
                    Side::Ambiguous => {
                        assert_eq!(iv.jump.0, 0.0);
                        assert_eq!(iv.jump.1, 0.0);
                    }
                }
            }
            // A and the open intervals tile the window exactly.
            let a = non_cone_set(&p, w).unwrap();
            let mut covered = vec![false; p.n + 1];
            for &i in a.as_slice() {
                covered[i] = true;
            }
            for iv in &ivs {
                for i in iv.v + 1..iv.t {
                    assert!(!covered[i], "index {i} both in A and a cone interior");
                    covered[i] = true;
                }
            }
            assert!(covered.iter().all(|&c| c), "tiling gap");
        }
    }

    #[test]
    fn restriction_consistency() {
        let spec = CovSpec::new(6.0).unwrap();
        for seed in 0..20 {
            let p = sample_lattice_pair(&spec, 1 << 10, seed).unwrap();
            let w = Window::full(&p);
            let a = non_cone_set(&p, w).unwrap();
            if a.len() < 4 {
                continue;
            }
            // a cone-free subwindow: consecutive members of A
            let c = a.as_slice()[a.len() / 4];
            let d = a.as_slice()[3 * a.len() / 4];
            if c >= d {
                continue;
            }
            let sub = Window::new(c, d).unwrap();
            let inner: Vec<_> = maximal_cone_intervals(&p, w)
                .unwrap()
                .into_iter()
                .filter(|iv| iv.v >= c && iv.t <= d)
                .collect();
            let direct = maximal_cone_intervals(&p, sub).unwrap();
            assert_eq!(inner, direct, "seed {seed} window [{c},{d}]");
        }
    }

    proptest! {
        #[test]
        fn prop_sweep_equals_oracle(seed in 0u64..5000, n in 8usize..128, k in 0usize..3) {
            let kappa = [5.0, 6.0, 7.5][k];
            let spec = CovSpec::new(kappa).unwrap();
            let p = sample_lattice_pair(&spec, n, seed).unwrap();
            let w = Window::full(&p);
            let fast = maximal_cone_intervals(&p, w).unwrap();
            let (_, oracle) = brute_force_cone_oracle(&p, w).unwrap();
            prop_assert_eq!(fast, oracle);
        }

        #[test]
        fn prop_covering_monotone(seed in 0u64..1000, n in 2usize..200) {
            let spec = CovSpec::new(6.0).unwrap();
            let p = sample_lattice_pair(&spec, n, seed).unwrap();
            let m = simultaneous_infima(&p, 0).unwrap();
            let eps: Vec<f64> = (0..8).map(|j| 2f64.powi(j)).collect();
            let c = covering_count(&m, &eps, 1.0).unwrap();
            for w in c.points.windows(2) {
                prop_assert!(w[1].1 <= w[0].1);
                prop_assert!(w[0].1 >= 1);
            }
        }

        #[test]
        fn prop_infima_are_cone_right_endpoints(seed in 0u64..500, n in 4usize..100) {
            // A simultaneous infimum relative to 0 is exactly an index whose
            // cone condition extends back to 0.
            let spec = CovSpec::new(6.0).unwrap();
            let p = sample_lattice_pair(&spec, n, seed).unwrap();
            let m = simultaneous_infima(&p, 0).unwrap();
            let vg = global_entrances(&p, p.n);
            for s in 0..=p.n {
                let is_inf = m.as_slice().binary_search(&s).is_ok();
                prop_assert_eq!(is_inf, vg[s] == 0, "index {}", s);
            }
        }
    }
}

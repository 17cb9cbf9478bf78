//! Bead decompositions of a path future and the chordal boundary-length
//! process of a single bead.
//!
//! Relative to an origin `t`, the simultaneous-infima times of `(L, R)` cut
//! `[t, n]` into beads. Each complete bead carries its area (index units)
//! and the left/right boundary lengths `(dL, dR)` swallowed while crossing
//! it. Inside one bead, the interior maximal cone intervals are the bubbles
//! cut off by a chordal exploration; the boundary-length process tracks the
//! unexplored boundary, is constant while a bubble is being filled, and
//! drops by the bubble's boundary length when it closes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::conescan::{self, ConeInterval, IndexSet, Side};
use crate::corrpath::PathPair;
use crate::error::{Error, Result};

/// One complete bead: `[start, end]` with `end - start = area`,
/// `dL = L_start - L_end >= 0`, `dR = R_start - R_end >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeadRecord {
    pub start: usize,
    pub end: usize,
    pub area: usize,
    pub d_l: f64,
    pub d_r: f64,
}

/// Bead decomposition of `[t, n]`. Records abut: record `k` ends where
/// record `k + 1` starts, and the delimiters are exactly the
/// simultaneous-infima times relative to `t`. Indices at or past the last
/// infimum belong to an open, incomplete bead.
#[derive(Debug, Clone)]
pub struct BeadLedger {
    pub origin: usize,
    pub infima: IndexSet,
    pub records: Vec<BeadRecord>,
}

impl BeadLedger {
    /// True when no complete record exists (fewer than two infima times);
    /// the whole future is one open record.
    pub fn is_incomplete(&self) -> bool {
        self.records.is_empty()
    }

    /// Start of the open (incomplete) trailing bead: the last infimum time.
    pub fn open_tail_start(&self) -> usize {
        *self.infima.as_slice().last().unwrap_or(&self.origin)
    }

    /// CSV export with header `start,end,area,dL,dR`.
    pub fn write_csv(&self, w: &mut impl std::io::Write) -> Result<()> {
        writeln!(w, "start,end,area,dL,dR")?;
        for rec in &self.records {
            writeln!(
                w,
                "{},{},{},{},{}",
                rec.start, rec.end, rec.area, rec.d_l, rec.d_r
            )?;
        }
        Ok(())
    }
}

/// Builds the bead ledger of `[t, n]`.
pub fn bead_ledger(path: &PathPair, t: usize) -> Result<BeadLedger> {
    if t >= path.n {
        return Err(Error::Domain(format!(
            "origin {t} leaves no future (path has {} steps)",
            path.n
        )));
    }
    let infima = conescan::simultaneous_infima(path, t)?;
    let records = infima
        .as_slice()
        .windows(2)
        .map(|w| BeadRecord {
            start: w[0],
            end: w[1],
            area: w[1] - w[0],
            d_l: path.l[w[0]] - path.l[w[1]],
            d_r: path.r[w[0]] - path.r[w[1]],
        })
        .collect();
    Ok(BeadLedger {
        origin: t,
        infima,
        records,
    })
}

/// `P`-function lookup: the `(area, dL, dR)` of the record containing `s`,
/// with the right-continuous convention at shared record boundaries (the
/// record starting at `s` wins). `(0, 0, 0)` for `s` before the origin.
pub fn p_function(ledger: &BeadLedger, s: usize) -> Result<(usize, f64, f64)> {
    if s < ledger.origin {
        return Ok((0, 0.0, 0.0));
    }
    // record k contains s iff start <= s < end
    let k = ledger.records.partition_point(|r| r.end <= s);
    match ledger.records.get(k) {
        Some(r) if r.start <= s => Ok((r.area, r.d_l, r.d_r)),
        _ => Err(Error::Incomplete(format!(
            "index {s} lies past the last complete bead (open tail starts at {})",
            ledger.open_tail_start()
        ))),
    }
}

/// Least record index whose `(area, dL, dR)` satisfies the predicate.
pub fn first_bead_in<F>(ledger: &BeadLedger, target: F) -> Result<usize>
where
    F: Fn(&BeadRecord) -> bool,
{
    if ledger.is_incomplete() {
        return Err(Error::Incomplete("ledger has no complete beads".into()));
    }
    ledger
        .records
        .iter()
        .position(target)
        .ok_or_else(|| Error::NotFound("no bead satisfies the predicate".into()))
}

/// A downward jump of the boundary-length process: a bubble of boundary
/// length `magnitude` closes at `mass_time`, on the given side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRecord {
    pub mass_time: usize,
    pub side: Side,
    pub magnitude: f64,
}

/// Boundary-length process of one bead, parameterized by disconnected mass
/// `m = 0 ..= area` (index units).
///
/// `values[m] = Z_{tau(start + m)} - Z_end`, where `tau(u)` skips to the end
/// of the bubble containing `u` (or is `u` itself). Constancy intervals and
/// jumps are in exact bijection with the bead's interior maximal cone
/// intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct ChordalProcess {
    pub bead_start: usize,
    pub bead_end: usize,
    /// `(l^L, l^R)`: the bead's left/right boundary lengths; equals `values[0]`.
    pub boundary0: (f64, f64),
    pub values: Vec<(f64, f64)>,
    pub jumps: Vec<JumpRecord>,
    /// `(sigma, tau)` constancy intervals in mass units, sorted, disjoint.
    pub constancy: Vec<(usize, usize)>,
}

impl ChordalProcess {
    pub fn area(&self) -> usize {
        self.bead_end - self.bead_start
    }

    pub fn terminal(&self) -> (f64, f64) {
        *self.values.last().unwrap()
    }

    /// CSV export with header `mass_time,Lb,Rb,is_jump`.
    pub fn write_csv(&self, w: &mut impl std::io::Write) -> Result<()> {
        writeln!(w, "mass_time,Lb,Rb,is_jump")?;
        let mut jump_at = vec![false; self.values.len()];
        for j in &self.jumps {
            jump_at[j.mass_time] = true;
        }
        for (m, (lb, rb)) in self.values.iter().enumerate() {
            writeln!(w, "{},{},{},{}", m, lb, rb, u8::from(jump_at[m]))?;
        }
        Ok(())
    }
}

/// Builds the chordal boundary-length process of one complete bead record.
pub fn chordal_boundary_process(path: &PathPair, record: &BeadRecord) -> Result<ChordalProcess> {
    let (start, end) = (record.start, record.end);
    if end > path.n || start >= end {
        return Err(Error::Domain(format!("bad bead record [{start}, {end}]")));
    }
    // A complete bead ends at a simultaneous infimum, so the endpoint is a
    // coordinatewise minimum over the whole bead.
    for u in start..end {
        if path.l[u] < path.l[end] || path.r[u] < path.r[end] {
            return Err(Error::Incomplete(format!(
                "[{start}, {end}] is not a complete bead: endpoint is not a bead minimum"
            )));
        }
    }

    let vg = conescan::global_entrances(path, end);
    let bubbles = conescan::maximal_interior_intervals(path, &vg, start, end);

    let (le, re) = (path.l[end], path.r[end]);
    let area = end - start;
    let mut values = Vec::with_capacity(area + 1);
    let mut jumps = Vec::with_capacity(bubbles.len());
    let mut constancy = Vec::with_capacity(bubbles.len());
    let mut next = 0usize; // next bubble not yet passed
    for m in 0..=area {
        let u = start + m;
        while next < bubbles.len() && bubbles[next].t < u {
            next += 1;
        }
        let tau = match bubbles.get(next) {
            Some(b) if b.v <= u => b.t, // u inside this bubble; skip to its end
            _ => u,
        };
        values.push((path.l[tau] - le, path.r[tau] - re));
    }
    for b in &bubbles {
        let sigma = b.v - start;
        constancy.push((sigma, b.t - start));
        jumps.push(JumpRecord {
            mass_time: sigma,
            side: b.side,
            magnitude: b.boundary_magnitude(),
        });
    }
    Ok(ChordalProcess {
        bead_start: start,
        bead_end: end,
        boundary0: (path.l[start] - le, path.r[start] - re),
        values,
        jumps,
        constancy,
    })
}

/// Monotone reindexing from jump ordinals to mass times: entry `k` is the
/// mass time of the `k`-th constancy interval together with its length.
/// Composing with the process removes the constancy intervals; the stored
/// lengths invert the change of time exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaturalTimeProxy {
    /// `(sigma_mass, constancy_length)` per jump, strictly increasing in mass.
    pub entries: Vec<(usize, usize)>,
}

/// Builds the jump-ordinal reparameterization of a chordal process.
pub fn mass_to_jumpcount_reparam(cp: &ChordalProcess) -> NaturalTimeProxy {
    NaturalTimeProxy {
        entries: cp
            .constancy
            .iter()
            .map(|&(s, t)| (s, t - s))
            .collect(),
    }
}

impl NaturalTimeProxy {
    /// Removes the open constancy spans `(sigma, tau]` from the value array.
    pub fn collapse(&self, values: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(values.len());
        let mut k = 0;
        let mut m = 0;
        while m < values.len() {
            out.push(values[m]);
            if k < self.entries.len() && m == self.entries[k].0 {
                m += self.entries[k].1; // skip (sigma, tau]
                k += 1;
            }
            m += 1;
        }
        out
    }

    /// Re-inserts the constancy spans; inverse of [`Self::collapse`].
    pub fn expand(&self, collapsed: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut k = 0;
        for &v in collapsed {
            out.push(v);
            if k < self.entries.len() && out.len() - 1 == self.entries[k].0 {
                for _ in 0..self.entries[k].1 {
                    out.push(v);
                }
                k += 1;
            }
        }
        out
    }
}

/// A sorted sample of positive magnitudes for tail-exponent estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct TailSample {
    values: Vec<f64>,
}

impl TailSample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Domain("tail samples must be strictly positive".into()));
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(TailSample { values })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Gap lengths of an index set, in index units.
    pub fn from_gaps(set: &IndexSet) -> Result<Self> {
        TailSample::new(set.gaps().into_iter().map(|g| g as f64).collect())
    }
}

/// Boundary-length magnitudes `|dL| + |dR|` of maximal cone excursions.
/// Ambiguous (tied) intervals are excluded, never relabeled.
pub fn bubble_tail_sample(intervals: &[ConeInterval]) -> Result<TailSample> {
    if intervals.is_empty() {
        return Err(Error::EmptySet("no cone intervals to sample".into()));
    }
    TailSample::new(
        intervals
            .iter()
            .filter(|iv| iv.side != Side::Ambiguous)
            .map(|iv| iv.boundary_magnitude())
            .filter(|m| *m > 0.0)
            .collect(),
    )
}

/// Samples the random area of a free-Boltzmann disk of boundary length `l`:
/// density `l^3 / sqrt(2 pi a^5) * exp(-l^2 / (2a))` on `a > 0`, realized as
/// `l^2 / (2 G)` with `G ~ Gamma(3/2, 1)`. Areas scale as `l^2`.
pub fn sample_boltzmann_area(boundary_length: f64, seed: u64) -> Result<f64> {
    Ok(sample_boltzmann_areas(boundary_length, 1, seed)?[0])
}

/// Batch version of [`sample_boltzmann_area`]; deterministic given the seed.
pub fn sample_boltzmann_areas(boundary_length: f64, count: usize, seed: u64) -> Result<Vec<f64>> {
    if !(boundary_length > 0.0) {
        return Err(Error::Domain(format!(
            "boundary length must be > 0, got {boundary_length}"
        )));
    }
    let gamma = Gamma::new(1.5, 1.0).expect("valid gamma parameters");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half_l2 = boundary_length * boundary_length / 2.0;
    Ok((0..count)
        .map(|_| {
            let g: f64 = gamma.sample(&mut rng).max(f64::MIN_POSITIVE);
            half_l2 / g
        })
        .collect())
}

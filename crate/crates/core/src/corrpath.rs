//! Correlated two-dimensional Brownian and lattice paths.
//!
//! A path pair `Z = (L, R)` carries the covariance structure
//! `Var L_t = Var R_t = alpha * t`, `Cov(L_t, R_t) = alpha * rho * t` with
//! `rho = -cos(pi * gamma^2 / 4)` and `gamma = 4 / sqrt(kappa')`. For
//! `kappa' in (4, 8)` the coordinates are positively correlated, which is
//! what makes the quadrant-cone structure downstream nontrivial; `kappa' = 8`
//! is admitted only as the uncorrelated boundary case.
//!
//! Sampling is deterministic given `(seed, n, dt)`: increments are generated
//! in fixed-size chunks, each keyed by `(seed, chunk index)` on a
//! counter-based stream RNG, so output is identical no matter how many
//! workers fill the buffer.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Increments generated per RNG stream; one stream per chunk keeps parallel
/// fills reproducible.
const CHUNK: usize = 1 << 16;

/// Largest supported step count. Above this, index arithmetic in the sweep
/// code and exact f64 representation of lattice values are no longer safe.
const MAX_STEPS: u64 = 1 << 48;

/// Covariance specification for a correlated pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovSpec {
    pub kappa_prime: f64,
    pub gamma: f64,
    pub rho: f64,
    pub alpha_scale: f64,
}

impl CovSpec {
    /// Builds the spec from `kappa'`. Requires `kappa' in (4, 8]`; the value
    /// 8 is the uncorrelated boundary (no cone times) and is allowed for
    /// boundary checks only.
    pub fn new(kappa_prime: f64) -> Result<Self> {
        if !(kappa_prime > 4.0 && kappa_prime <= 8.0) {
            return Err(Error::Domain(format!(
                "kappa' must lie in (4, 8], got {kappa_prime}"
            )));
        }
        let gamma = 4.0 / kappa_prime.sqrt();
        // -cos(pi*gamma^2/4) = -cos(4*pi/kappa'); exactly 0 at kappa' = 8.
        let rho = if kappa_prime == 8.0 {
            0.0
        } else {
            -(4.0 * std::f64::consts::PI / kappa_prime).cos()
        };
        Ok(CovSpec {
            kappa_prime,
            gamma,
            rho,
            alpha_scale: 1.0,
        })
    }

    /// Overrides the diffusion scale `alpha` (the closed forms never pin it
    /// down; everything scale-invariant is unaffected).
    pub fn with_alpha(mut self, alpha_scale: f64) -> Result<Self> {
        if !(alpha_scale > 0.0) {
            return Err(Error::Domain(format!(
                "alpha_scale must be > 0, got {alpha_scale}"
            )));
        }
        self.alpha_scale = alpha_scale;
        Ok(self)
    }

    /// Joint law of a single lattice step: `P(+,+) = P(-,-) = (1+rho)/4`,
    /// `P(+,-) = P(-,+) = (1-rho)/4`. Reproduces `E[dL dR] = rho` exactly.
    pub fn lattice_step_law(&self) -> [f64; 4] {
        let p_same = (1.0 + self.rho) / 4.0;
        let p_diff = (1.0 - self.rho) / 4.0;
        [p_same, p_same, p_diff, p_diff]
    }
}

/// See [`CovSpec::new`].
pub fn build_cov_spec(kappa_prime: f64) -> Result<CovSpec> {
    CovSpec::new(kappa_prime)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Brownian,
    Lattice,
}

/// A sampled correlated pair, immutable after construction.
///
/// `l` and `r` hold `n + 1` values with `l[0] = r[0] = 0`. Lattice paths
/// store integer values in f64 (exact below 2^53), so ordering and equality
/// tests in the sweep code are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPair {
    pub spec: CovSpec,
    pub n: usize,
    pub dt: f64,
    pub l: Vec<f64>,
    pub r: Vec<f64>,
    pub kind: PathKind,
}

impl PathPair {
    /// Number of stored points, `n + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coarsens a Brownian path to a lattice path by the sign of each
    /// increment (a zero increment, which has probability zero, maps to +1).
    /// Lattice paths are returned unchanged. Mating consumes lattice paths
    /// only, so ties in chord matching are decided by integer arithmetic.
    pub fn coarsen_to_lattice(&self) -> PathPair {
        if self.kind == PathKind::Lattice {
            return self.clone();
        }
        let step = |w: &[f64]| if w[1] - w[0] < 0.0 { -1.0 } else { 1.0 };
        let mut l = Vec::with_capacity(self.len());
        let mut r = Vec::with_capacity(self.len());
        l.push(0.0);
        r.push(0.0);
        for i in 0..self.n {
            l.push(l[i] + step(&self.l[i..=i + 1]));
            r.push(r[i] + step(&self.r[i..=i + 1]));
        }
        PathPair {
            spec: self.spec,
            n: self.n,
            dt: 1.0,
            l,
            r,
            kind: PathKind::Lattice,
        }
    }
}

/// Index window `[a, b]` into a path, `a <= b <= n`. Degenerate single-index
/// windows are allowed; operations that need a nonempty interior document it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    a: usize,
    b: usize,
}

impl Window {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a > b {
            return Err(Error::Domain(format!("window requires a <= b, got [{a}, {b}]")));
        }
        Ok(Window { a, b })
    }

    /// Window covering an entire path.
    pub fn full(path: &PathPair) -> Self {
        Window { a: 0, b: path.n }
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn len(&self) -> usize {
        self.b - self.a + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn check_against(&self, path: &PathPair) -> Result<()> {
        if self.b > path.n {
            return Err(Error::Domain(format!(
                "window [{}, {}] exceeds path length {}",
                self.a, self.b, path.n
            )));
        }
        Ok(())
    }
}

fn check_size(n: usize, dt: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("need at least one step".into()));
    }
    if (n as u64) >= MAX_STEPS || !(n as f64 * dt).is_finite() {
        return Err(Error::Size(format!(
            "n = {n}, dt = {dt} exceeds accumulator precision"
        )));
    }
    Ok(())
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Turns per-chunk increments written into `l[1..]`, `r[1..]` into path
/// values in place.
fn integrate(l: &mut [f64], r: &mut [f64]) {
    for i in 1..l.len() {
        l[i] += l[i - 1];
        r[i] += r[i - 1];
    }
}

/// Samples a Brownian pair: i.i.d. bivariate Gaussian increments with
/// covariance `dt * alpha * [[1, rho], [rho, 1]]`.
pub fn sample_brownian_pair(spec: &CovSpec, n: usize, dt: f64, seed: u64) -> Result<PathPair> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("dt must be > 0, got {dt}")));
    }
    check_size(n, dt)?;
    let scale = (spec.alpha_scale * dt).sqrt();
    let rho = spec.rho;
    let orth = (1.0 - rho * rho).sqrt();

    let mut l = vec![0.0f64; n + 1];
    let mut r = vec![0.0f64; n + 1];
    l[1..]
        .par_chunks_mut(CHUNK)
        .zip(r[1..].par_chunks_mut(CHUNK))
        .enumerate()
        .for_each(|(c, (lc, rc))| {
            let mut rng = chunk_rng(seed, c);
            for (dl, dr) in lc.iter_mut().zip(rc.iter_mut()) {
                let g1: f64 = rng.sample(StandardNormal);
                let g2: f64 = rng.sample(StandardNormal);
                *dl = scale * g1;
                *dr = scale * (rho * g1 + orth * g2);
            }
        });
    integrate(&mut l, &mut r);
    Ok(PathPair {
        spec: *spec,
        n,
        dt,
        l,
        r,
        kind: PathKind::Brownian,
    })
}

/// Samples a lattice pair with +-1 steps under the joint law
/// `P(+,+) = P(-,-) = (1+rho)/4`, `P(+,-) = P(-,+) = (1-rho)/4` and `dt = 1`.
pub fn sample_lattice_pair(spec: &CovSpec, n: usize, seed: u64) -> Result<PathPair> {
    check_size(n, 1.0)?;
    let p_same = (1.0 + spec.rho) / 4.0;
    let p_diff = (1.0 - spec.rho) / 4.0;
    // Cumulative thresholds over (+,+), (-,-), (+,-), (-,+).
    let c1 = p_same;
    let c2 = 2.0 * p_same;
    let c3 = 2.0 * p_same + p_diff;

    let mut l = vec![0.0f64; n + 1];
    let mut r = vec![0.0f64; n + 1];
    l[1..]
        .par_chunks_mut(CHUNK)
        .zip(r[1..].par_chunks_mut(CHUNK))
        .enumerate()
        .for_each(|(c, (lc, rc))| {
            let mut rng = chunk_rng(seed, c);
            for (dl, dr) in lc.iter_mut().zip(rc.iter_mut()) {
                let u: f64 = rng.gen();
                let (sl, sr) = if u < c1 {
                    (1.0, 1.0)
                } else if u < c2 {
                    (-1.0, -1.0)
                } else if u < c3 {
                    (1.0, -1.0)
                } else {
                    (-1.0, 1.0)
                };
                *dl = sl;
                *dr = sr;
            }
        });
    integrate(&mut l, &mut r);
    Ok(PathPair {
        spec: *spec,
        n,
        dt: 1.0,
        l,
        r,
        kind: PathKind::Lattice,
    })
}

/// Sample moments of the increment sequence, normalized by `dt`:
/// `(var_L, var_R, cov)`.
pub fn empirical_cov(path: &PathPair) -> Result<(f64, f64, f64)> {
    if path.n < 2 {
        return Err(Error::Domain("empirical_cov needs n >= 2".into()));
    }
    let n = path.n as f64;
    let (mut sl, mut sr) = (0.0, 0.0);
    for i in 0..path.n {
        sl += path.l[i + 1] - path.l[i];
        sr += path.r[i + 1] - path.r[i];
    }
    let (ml, mr) = (sl / n, sr / n);
    let (mut vl, mut vr, mut cv) = (0.0, 0.0, 0.0);
    for i in 0..path.n {
        let dl = path.l[i + 1] - path.l[i] - ml;
        let dr = path.r[i + 1] - path.r[i] - mr;
        vl += dl * dl;
        vr += dr * dr;
        cv += dl * dr;
    }
    Ok((vl / n / path.dt, vr / n / path.dt, cv / n / path.dt))
}

/// Empirical increment correlation coefficient.
pub fn empirical_corr(path: &PathPair) -> Result<f64> {
    let (vl, vr, cv) = empirical_cov(path)?;
    Ok(cv / (vl * vr).sqrt())
}

const MAGIC: &[u8; 4] = b"PNLB";
const VERSION: u16 = 1;

/// Writes a path to the binary `PNLB` format (all integers little-endian):
/// magic, version u16, kind u8, kappa' f64, alpha f64, dt f64, n u64, then
/// `n + 1` `(L_i, R_i)` f64 pairs.
pub fn save_path(path: &PathPair, dest: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(dest)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[match path.kind {
        PathKind::Brownian => 0u8,
        PathKind::Lattice => 1u8,
    }])?;
    w.write_all(&path.spec.kappa_prime.to_le_bytes())?;
    w.write_all(&path.spec.alpha_scale.to_le_bytes())?;
    w.write_all(&path.dt.to_le_bytes())?;
    w.write_all(&(path.n as u64).to_le_bytes())?;
    for i in 0..path.len() {
        w.write_all(&path.l[i].to_le_bytes())?;
        w.write_all(&path.r[i].to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_exact(r: &mut impl Read, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf)
        .map_err(|_| Error::Format("truncated path file".into()))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Reads a path written by [`save_path`]. Round trip is bitwise identity.
pub fn load_path(source: &Path) -> Result<PathPair> {
    let mut rd = BufReader::new(File::open(source)?);
    let mut magic = [0u8; 4];
    read_exact(&mut rd, &mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let mut vb = [0u8; 2];
    read_exact(&mut rd, &mut vb)?;
    let version = u16::from_le_bytes(vb);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let mut kb = [0u8; 1];
    read_exact(&mut rd, &mut kb)?;
    let kind = match kb[0] {
        0 => PathKind::Brownian,
        1 => PathKind::Lattice,
        k => return Err(Error::Format(format!("unknown path kind {k}"))),
    };
    let kappa_prime = read_f64(&mut rd)?;
    let alpha = read_f64(&mut rd)?;
    let dt = read_f64(&mut rd)?;
    let mut nb = [0u8; 8];
    read_exact(&mut rd, &mut nb)?;
    let n = u64::from_le_bytes(nb);
    if n >= MAX_STEPS {
        return Err(Error::Format(format!("unreasonable step count {n}")));
    }
    let n = n as usize;
    let spec = CovSpec::new(kappa_prime)?.with_alpha(alpha)?;
    let mut l = Vec::with_capacity(n + 1);
    let mut r = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        l.push(read_f64(&mut rd)?);
        r.push(read_f64(&mut rd)?);
    }
    let mut probe = [0u8; 1];
    if rd.read(&mut probe)? != 0 {
        return Err(Error::Format("trailing bytes after path data".into()));
    }
    Ok(PathPair {
        spec,
        n,
        dt,
        l,
        r,
        kind,
    })
}

/// Splits a master seed into per-trial seeds (splitmix64 finalizer), so
/// Monte-Carlo drivers can fan out trials with independent streams.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    let mut z = master
        .wrapping_add(trial.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

//! Seeded Monte Carlo engines.
//!
//! * The frog model on the directed tree: every activated particle draws a
//!   lifetime with `P(steps ≥ n) = c (dq)^n` and walks that many steps away
//!   from the root, choosing children uniformly; every vertex it passes is
//!   activated. The root has `d + 1` children, every other vertex `d`.
//! * The firework process on `{0, 1, 2, ...}`: each informed site `i`
//!   informs `i + 1, ..., i + D_i` with `P(D ≥ k) = c q^k`.
//! * The frog dynamics restricted to one branch, which is a firework
//!   process whose radii are the number of leading steps a frog spends on
//!   the branch.
//!
//! Randomness is attached to objects, not to time. In the frog engine
//! each vertex owns a ChaCha8 stream keyed by `(seed, replicate, vertex)`,
//! so the terminal activated set does not depend on the order in which the
//! work queue is processed; in the firework engine the `j`-th uniform of a
//! replicate always belongs to site `j`. Both engines draw radii by
//! inverse transform, so with a fixed seed raising `q` never removes an
//! activation.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distributions::{HazardSpec, TreeParams};
use crate::error::{Error, Result};
use crate::exec::{fold_replicates, Execution};

/// Default cap on activated vertices per frog replicate.
pub const DEFAULT_ACTIVATION_CAP: usize = 10_000_000;

const ROOT_KEY: u64 = 0x243F_6A88_85A3_08D3;
const FIREWORK_KEY: u64 = 0x1319_8A2E_0370_7344;
const BRANCH_KEY: u64 = 0xA409_3822_299F_31D0;

/// SplitMix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn stream(seed: u64, replicate: u64, key: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(mix(mix(seed) ^ replicate) ^ key))
}

fn child_key(parent: u64, child: u32) -> u64 {
    mix(parent.rotate_left(21) ^ (child as u64 + 1))
}

/// A vertex of the directed tree, as the child indices on the path from the
/// root. First-level indices range over `0..=d`, deeper ones over `0..d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct VertexId {
    path: Vec<u32>,
}

impl VertexId {
    pub fn root() -> Self {
        Self::default()
    }

    pub fn from_path(path: Vec<u32>) -> Self {
        Self { path }
    }

    pub fn child(&self, index: u32) -> Self {
        let mut path = self.path.clone();
        path.push(index);
        Self { path }
    }

    pub fn path(&self) -> &[u32] {
        &self.path
    }

    pub fn depth(&self) -> usize {
        self.path.len()
    }

    pub fn is_valid(&self, d: u32) -> bool {
        self.path
            .iter()
            .enumerate()
            .all(|(level, &i)| i < if level == 0 { d + 1 } else { d })
    }

    /// Key of the random stream owned by this vertex.
    pub fn stream_key(&self) -> u64 {
        self.path.iter().fold(ROOT_KEY, |key, &i| child_key(key, i))
    }
}

/// Number of steps `L` with `P(L ≥ n) = c · ratio^n` for `n ≥ 1`, obtained
/// from `u ∈ (0, 1]` by inverse transform. Saturates at `u64::MAX`, which
/// also encodes an infinite lifetime when `ratio = 1`.
pub(crate) fn reach_from_uniform(u: f64, c: f64, ratio: f64) -> u64 {
    if u >= c * ratio {
        return 0;
    }
    if ratio >= 1.0 {
        return u64::MAX;
    }
    // u < c ratio^n  <=>  n < ln(u/c) / ln(ratio)
    let x = (u / c).ln() / ratio.ln();
    let n = x.ceil() - 1.0;
    if n >= u64::MAX as f64 {
        u64::MAX
    } else {
        (n as u64).max(1)
    }
}

fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Number of forward steps of a freshly activated particle:
/// `P(steps ≥ n) = c (dq)^n`, so it stays put with probability `1 - cdq`.
pub fn sample_reach<R: Rng + ?Sized>(params: &TreeParams, rng: &mut R) -> u64 {
    reach_from_uniform(open_unit(rng), params.c(), params.continuation())
}

/// Configuration of a frog-model experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrogSimConfig {
    pub params: TreeParams,
    pub max_depth: u32,
    pub replicates: u64,
    pub seed: u64,
    pub activation_cap: usize,
}

impl FrogSimConfig {
    pub fn new(params: TreeParams, max_depth: u32, replicates: u64, seed: u64) -> Result<Self> {
        if max_depth == 0 {
            return Err(Error::Domain("max_depth must be at least 1".into()));
        }
        if replicates == 0 {
            return Err(Error::Domain("replicates must be at least 1".into()));
        }
        Ok(Self {
            params,
            max_depth,
            replicates,
            seed,
            activation_cap: DEFAULT_ACTIVATION_CAP,
        })
    }

    pub fn with_activation_cap(mut self, cap: usize) -> Self {
        self.activation_cap = cap;
        self
    }
}

/// Aggregated result of a Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimOutcome {
    /// `reached_depth[k]` counts replicates whose deepest activated level
    /// (or furthest informed site) is exactly `k`, capped at the horizon.
    pub reached_depth: Vec<u64>,
    /// `branch_hits[k]` counts replicates reaching level (or site) `k`.
    pub branch_hits: Vec<u64>,
    /// Activated vertices per level summed over replicates (frog engine
    /// only; empty otherwise). Replicates stop early once the horizon is
    /// reached, so these are counts up to that moment.
    pub activations: Vec<u64>,
    pub replicates: u64,
    pub seed: u64,
}

impl SimOutcome {
    fn from_histogram(
        reached_depth: Vec<u64>,
        activations: Vec<u64>,
        replicates: u64,
        seed: u64,
    ) -> Self {
        let mut branch_hits = reached_depth.clone();
        for k in (0..branch_hits.len().saturating_sub(1)).rev() {
            branch_hits[k] += branch_hits[k + 1];
        }
        Self {
            reached_depth,
            branch_hits,
            activations,
            replicates,
            seed,
        }
    }

    pub fn horizon(&self) -> usize {
        self.reached_depth.len() - 1
    }

    /// Fraction of replicates reaching level `k`.
    pub fn hit_fraction(&self, k: usize) -> f64 {
        self.branch_hits[k] as f64 / self.replicates as f64
    }

    /// Binomial standard error of [`hit_fraction`](Self::hit_fraction).
    pub fn hit_std_error(&self, k: usize) -> f64 {
        let p = self.hit_fraction(k);
        (p * (1.0 - p) / self.replicates as f64).sqrt()
    }
}

#[derive(Clone)]
struct Histogram {
    reached: Vec<u64>,
    activations: Vec<u64>,
}

impl Histogram {
    fn new(levels: usize, with_activations: bool) -> Self {
        Self {
            reached: vec![0; levels],
            activations: if with_activations {
                vec![0; levels]
            } else {
                Vec::new()
            },
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.reached
            .iter_mut()
            .zip(other.reached)
            .for_each(|(a, b)| *a += b);
        self.activations
            .iter_mut()
            .zip(other.activations)
            .for_each(|(a, b)| *a += b);
        self
    }
}

struct Node {
    depth: u32,
    key: u64,
}

/// One frog replicate: returns the deepest activated level (capped at
/// `max_depth`) and adds per-level activation counts to `per_level`.
fn run_frog(config: &FrogSimConfig, replicate: u64, per_level: &mut [u64]) -> Result<u32> {
    let params = &config.params;
    let d = params.d();
    let max_depth = config.max_depth;
    let mut nodes = vec![Node {
        depth: 0,
        key: ROOT_KEY,
    }];
    let mut children: HashMap<(u32, u32), u32> = HashMap::new();
    let mut pending = vec![0u32];
    let mut deepest = 0;
    per_level[0] += 1;

    while let Some(v) = pending.pop() {
        let Node { depth, key } = nodes[v as usize];
        let mut rng = stream(config.seed, replicate, key);
        let steps = sample_reach(params, &mut rng).min((max_depth - depth) as u64);
        let mut cur = v;
        for _ in 0..steps {
            let cur_depth = nodes[cur as usize].depth;
            let degree = if cur_depth == 0 { d + 1 } else { d };
            let child = rng.random_range(0..degree);
            cur = match children.entry((cur, child)) {
                Entry::Occupied(e) => *e.get(),
                Entry::Vacant(e) => {
                    if nodes.len() >= config.activation_cap {
                        return Err(Error::ActivationCap {
                            replicate,
                            cap: config.activation_cap,
                        });
                    }
                    let id = nodes.len() as u32;
                    let next_depth = cur_depth + 1;
                    nodes.push(Node {
                        depth: next_depth,
                        key: child_key(nodes[cur as usize].key, child),
                    });
                    e.insert(id);
                    per_level[next_depth as usize] += 1;
                    deepest = deepest.max(next_depth);
                    if next_depth == max_depth {
                        return Ok(max_depth);
                    }
                    pending.push(id);
                    id
                }
            };
        }
    }
    Ok(deepest)
}

/// Deepest level activated in a single replicate.
pub fn frog_reach(config: &FrogSimConfig, replicate: u64) -> Result<u32> {
    let mut scratch = vec![0; config.max_depth as usize + 1];
    run_frog(config, replicate, &mut scratch)
}

/// Runs all replicates of a frog-model experiment.
pub fn simulate_frog(config: &FrogSimConfig, exec: Execution) -> Result<SimOutcome> {
    let levels = config.max_depth as usize + 1;
    let hist = fold_replicates(
        config.replicates,
        exec,
        || Histogram::new(levels, true),
        |acc, i| {
            let reached = run_frog(config, i, &mut acc.activations)?;
            acc.reached[reached as usize] += 1;
            Ok(())
        },
        Histogram::merge,
    )?;
    Ok(SimOutcome::from_histogram(
        hist.reached,
        hist.activations,
        config.replicates,
        config.seed,
    ))
}

fn check_horizon(n: u64, replicates: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("horizon n must be at least 1".into()));
    }
    if replicates == 0 {
        return Err(Error::Domain("replicates must be at least 1".into()));
    }
    Ok(())
}

/// Furthest site informed by a firework process in one replicate, capped
/// at `n`.
pub fn firework_reach(spec: HazardSpec, n: u64, seed: u64, replicate: u64) -> u64 {
    let mut rng = stream(seed, replicate, FIREWORK_KEY);
    let (mut frontier, mut site) = (0u64, 0u64);
    while site <= frontier && frontier < n {
        let radius = reach_from_uniform(open_unit(&mut rng), spec.c(), spec.q());
        frontier = frontier.max(site.saturating_add(radius));
        site += 1;
    }
    frontier.min(n)
}

fn simulate_line<F>(
    n: u64,
    replicates: u64,
    seed: u64,
    exec: Execution,
    reach: F,
) -> Result<SimOutcome>
where
    F: Fn(u64) -> u64 + Sync + Send,
{
    check_horizon(n, replicates)?;
    let hist = fold_replicates::<_, Error, _, _>(
        replicates,
        exec,
        || Histogram::new(n as usize + 1, false),
        |acc, i| {
            acc.reached[reach(i) as usize] += 1;
            Ok(())
        },
        Histogram::merge,
    )?;
    Ok(SimOutcome::from_histogram(
        hist.reached,
        Vec::new(),
        replicates,
        seed,
    ))
}

/// Firework process on `{0, ..., n}`; `hit_fraction(k)` estimates the
/// probability that site `k` is informed.
pub fn simulate_firework(
    spec: HazardSpec,
    n: u64,
    replicates: u64,
    seed: u64,
    exec: Execution,
) -> Result<SimOutcome> {
    simulate_line(n, replicates, seed, exec, |i| {
        firework_reach(spec, n, seed, i)
    })
}

/// Furthest vertex reached along one fixed branch in one replicate.
///
/// Every branch vertex uses the non-root convention (`d` children), so the
/// leading run of on-branch steps of an activated frog has
/// `P(run ≥ k) = c (dq)^k d^{-k} = c q^k`.
pub fn branch_reach(params: &TreeParams, n: u64, seed: u64, replicate: u64) -> u64 {
    let mut rng = stream(seed, replicate, BRANCH_KEY);
    let d = params.d();
    let (mut frontier, mut site) = (0u64, 0u64);
    while site <= frontier && frontier < n {
        let steps = sample_reach(params, &mut rng).min(n - site);
        let mut on_branch = 0;
        // the branch follows child 0 at every level
        while on_branch < steps && rng.random_range(0..d) == 0 {
            on_branch += 1;
        }
        frontier = frontier.max(site + on_branch);
        site += 1;
    }
    frontier.min(n)
}

/// Frog dynamics along one branch up to depth `n`.
pub fn simulate_branch(
    params: &TreeParams,
    n: u64,
    replicates: u64,
    seed: u64,
    exec: Execution,
) -> Result<SimOutcome> {
    simulate_line(n, replicates, seed, exec, |i| {
        branch_reach(params, n, seed, i)
    })
}

/// Monte Carlo estimate of `p_{q,n}`, the probability that a fixed vertex at
/// distance `n` is activated.
pub fn estimate_branch_hit(
    params: &TreeParams,
    n: u64,
    replicates: u64,
    seed: u64,
    exec: Execution,
) -> Result<f64> {
    Ok(simulate_branch(params, n, replicates, seed, exec)?.hit_fraction(n as usize))
}

//! Random multidimensional knapsack instances.
//!
//! Entries of `A` are drawn uniformly from `{1, …, 1000}` and each is then kept
//! with probability `σ`. Capacities are `b_i = (τ/n) Σ_j a_ij` and profits
//! `c_j = (1/m) Σ_i a_ij + δ_j` with `δ_j` uniform on `{1, …, 500}`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lp_model::LpInstance;
use crate::rng::{stream_rng, GENERATOR_STREAM};

#[derive(Debug, Clone, PartialEq)]
pub struct MkpParams {
    pub m: usize,
    pub n: usize,
    /// Capacity scale `τ ∈ (0, 1]`.
    pub tightness: f64,
    /// Probability `σ ∈ (0, 1]` that an entry is kept.
    pub density: f64,
    pub seed: u64,
    /// Add a seeded relative jitter of at most `1e-9` to every profit.
    pub perturb_a3: bool,
    /// Compute `b` from the row sums before entries are zeroed.
    pub rhs_before_sparsification: bool,
    /// Inclusive range of the matrix entries.
    pub entry_range: (u32, u32),
    /// Inclusive range of the profit offsets.
    pub profit_offset_range: (u32, u32),
    /// Attempts to refill a row left empty by sparsification; `0` fails at once.
    pub max_row_redraws: usize,
}

impl MkpParams {
    pub fn new(m: usize, n: usize, tightness: f64, density: f64, seed: u64) -> Self {
        Self {
            m,
            n,
            tightness,
            density,
            seed,
            perturb_a3: false,
            rhs_before_sparsification: false,
            entry_range: (1, 1000),
            profit_offset_range: (1, 500),
            max_row_redraws: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.m == 0 || self.n == 0 {
            return bad(format!("generator needs m, n ≥ 1, got m={}, n={}", self.m, self.n));
        }
        if !(self.tightness > 0.0 && self.tightness <= 1.0) {
            return bad(format!("tightness must lie in (0, 1], got {}", self.tightness));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return bad(format!("density must lie in (0, 1], got {}", self.density));
        }
        let (lo, hi) = self.entry_range;
        if lo == 0 || lo > hi {
            return bad(format!("entry range must satisfy 1 ≤ lo ≤ hi, got {lo}..={hi}"));
        }
        let (lo, hi) = self.profit_offset_range;
        if lo > hi {
            return bad(format!("profit offset range is empty: {lo}..={hi}"));
        }
        Ok(())
    }
}

impl MkpParams {
    /// Compact description of the parameters other than the seed, e.g.
    /// `mkp:m=8,n=1000,tau=0.25,sigma=1`. Parses back with [`MkpParams::parse_spec`].
    pub fn label(&self) -> String {
        let mut s = format!("mkp:m={},n={},tau={},sigma={}", self.m, self.n, self.tightness, self.density);
        if self.perturb_a3 {
            s.push_str(",a3=1");
        }
        if self.rhs_before_sparsification {
            s.push_str(",dense_b=1");
        }
        s
    }

    /// Parses `key=value` pairs separated by commas (an optional `mkp:` prefix
    /// is ignored). Keys: `m`, `n`, `tau`, `sigma`, `seed`, `a3`, `dense_b`.
    /// Missing keys keep the defaults `m=5, n=100, tau=0.25, sigma=1, seed=0`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let mut p = MkpParams::new(5, 100, 0.25, 1.0, 0);
        let body = spec.strip_prefix("mkp:").unwrap_or(spec);
        for part in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("expected key=value, got {part:?}")))?;
            let bad = || Error::InvalidConfig(format!("bad value for {key}: {value:?}"));
            let flag = |v: &str| match v {
                "1" | "true" => Ok(true),
                "0" | "false" => Ok(false),
                _ => Err(bad()),
            };
            match key.trim() {
                "m" => p.m = value.parse().map_err(|_| bad())?,
                "n" => p.n = value.parse().map_err(|_| bad())?,
                "tau" => p.tightness = value.parse().map_err(|_| bad())?,
                "sigma" => p.density = value.parse().map_err(|_| bad())?,
                "seed" => p.seed = value.parse().map_err(|_| bad())?,
                "a3" => p.perturb_a3 = flag(value)?,
                "dense_b" => p.rhs_before_sparsification = flag(value)?,
                other => return Err(Error::InvalidConfig(format!("unknown generator key {other:?}"))),
            }
        }
        p.validate()?;
        Ok(p)
    }
}

fn draw_entry(rng: &mut ChaCha8Rng, p: &MkpParams) -> (f64, bool) {
    let a = rng.gen_range(p.entry_range.0..=p.entry_range.1) as f64;
    let keep = p.density >= 1.0 || rng.gen::<f64>() < p.density;
    (a, keep)
}

pub fn generate_mkp(p: &MkpParams) -> Result<LpInstance> {
    p.validate()?;
    let (m, n) = (p.m, p.n);
    let mut rng = stream_rng(p.seed, GENERATOR_STREAM);
    let mut columns: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    let mut dense_sums = vec![0.0; m];
    let mut kept_sums = vec![0.0; m];
    for _ in 0..n {
        let mut col = Vec::with_capacity(((m as f64) * p.density).ceil() as usize + 1);
        for i in 0..m {
            let (a, keep) = draw_entry(&mut rng, p);
            dense_sums[i] += a;
            if keep {
                kept_sums[i] += a;
                col.push((i, a));
            }
        }
        columns.push(col);
    }

    if !p.rhs_before_sparsification {
        for i in 0..m {
            let mut attempts = 0;
            while kept_sums[i] == 0.0 {
                if attempts == p.max_row_redraws {
                    return Err(Error::EmptyGeneratedRow { row: i, attempts });
                }
                attempts += 1;
                for col in columns.iter_mut() {
                    let (a, keep) = draw_entry(&mut rng, p);
                    if keep {
                        kept_sums[i] += a;
                        col.push((i, a));
                    }
                }
            }
        }
    }

    let sums = if p.rhs_before_sparsification { &dense_sums } else { &kept_sums };
    let rhs: Vec<f64> = sums.iter().map(|s| p.tightness / n as f64 * s).collect();
    let mut obj: Vec<f64> = columns
        .iter()
        .map(|col| {
            let mean = col.iter().map(|&(_, a)| a).sum::<f64>() / m as f64;
            mean + rng.gen_range(p.profit_offset_range.0..=p.profit_offset_range.1) as f64
        })
        .collect();
    if p.perturb_a3 {
        for c in obj.iter_mut() {
            *c += *c * 1e-9 * rng.gen_range(-1.0..=1.0);
        }
    }
    LpInstance::from_columns(m, columns, rhs, obj, vec![1.0; n])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_instance_shape() {
        let inst = generate_mkp(&MkpParams::new(4, 30, 0.5, 1.0, 11)).unwrap();
        assert_eq!(inst.nnz(), 120);
        assert!(inst.values().iter().all(|&a| (1.0..=1000.0).contains(&a) && a.fract() == 0.0));
        for i in 0..4 {
            let row_sum: f64 = (0..30)
                .flat_map(|j| inst.column(j).iter().filter(move |&(r, _)| r == i))
                .map(|(_, a)| a)
                .sum();
            assert_eq!(inst.rhs()[i], 0.5 / 30.0 * row_sum);
        }
        for j in 0..30 {
            let offset = inst.obj()[j] - inst.column(j).values.iter().sum::<f64>() / 4.0;
            assert!((0.999..=500.001).contains(&offset), "{offset}");
        }
        assert!(inst.has_unit_upper());
    }

    #[test]
    fn deterministic() {
        let p = MkpParams::new(6, 50, 0.25, 0.3, 99);
        assert_eq!(generate_mkp(&p).unwrap(), generate_mkp(&p).unwrap());
        let q = MkpParams { seed: 100, ..p };
        assert_ne!(generate_mkp(&q).unwrap(), generate_mkp(&MkpParams::new(6, 50, 0.25, 0.3, 99)).unwrap());
    }

    #[test]
    fn rows_are_refilled() {
        // Tiny density: empty rows are likely and must be redrawn.
        let mut p = MkpParams::new(5, 3, 0.5, 0.05, 1);
        p.max_row_redraws = 1000;
        let inst = generate_mkp(&p).unwrap();
        assert!(inst.rhs().iter().all(|&b| b > 0.0));
    }

    #[test]
    fn empty_row_signalled() {
        let mut p = MkpParams::new(30, 1, 0.5, 0.01, 2);
        p.max_row_redraws = 0;
        assert!(matches!(generate_mkp(&p), Err(Error::EmptyGeneratedRow { attempts: 0, .. })));
    }

    #[test]
    fn jitter_is_tiny() {
        let mut p = MkpParams::new(3, 20, 0.5, 1.0, 5);
        let plain = generate_mkp(&p).unwrap();
        p.perturb_a3 = true;
        let jittered = generate_mkp(&p).unwrap();
        for (a, b) in plain.obj().iter().zip(jittered.obj()) {
            assert!((a - b).abs() <= 1e-9 * a.abs());
        }
    }

    #[test]
    fn label_round_trip() {
        let mut p = MkpParams::new(8, 1000, 0.05, 0.1, 42);
        p.perturb_a3 = true;
        let q = MkpParams::parse_spec(&format!("{},seed=42", p.label())).unwrap();
        assert_eq!(p, q);
        assert!(MkpParams::parse_spec("m=3,bogus=1").is_err());
    }

    #[test]
    fn invalid_params() {
        assert!(generate_mkp(&MkpParams::new(2, 2, 0.0, 1.0, 0)).is_err());
        assert!(generate_mkp(&MkpParams::new(2, 2, 0.5, 1.5, 0)).is_err());
        assert!(generate_mkp(&MkpParams::new(0, 2, 0.5, 0.5, 0)).is_err());
    }
}

//! Seeded forward sampling and plug-in estimators.
//!
//! Every noise draw is a pure function of `(seed, row, noise index)`, so a
//! batch is byte-for-byte reproducible regardless of how rows are split
//! across threads. Draws use integer thresholds `floor(cdf * 2^64)`; floats
//! only appear when the estimators take logarithms.

use std::io::{self, Write};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::causal::InterventionProtocol;
use crate::compiled::CompiledScm;
use crate::distribution::{to_f64, Distribution, Prob};
use crate::inference::JointTable;
use crate::info::{conditional_entropy, entropy, mutual_information, Bits, CompensatedSum};
use crate::par::{map_chunks, Execution};
use crate::scm::{intervene_with_policy, InterventionError, InterventionPolicy, Scm};

const ROWS_PER_CHUNK: u64 = 8192;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplingError {
    #[error("model is not valid: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Intervention(#[from] InterventionError),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("sample size must be at least 1")]
    EmptyBatch,
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform 64-bit word for a `(seed, row, stream)` counter.
pub fn counter_u64(seed: u64, row: u64, stream: u64) -> u64 {
    let key = mix64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let row_key = mix64(key ^ row.wrapping_mul(0xd1b5_4a32_d192_ed03));
    mix64(row_key ^ stream.wrapping_add(1).wrapping_mul(0x8cb9_2ba7_2f3d_8dd7))
}

/// Inverse-CDF table with exact integer cut points on `[0, 2^64)`.
#[derive(Debug, Clone)]
struct NoiseSampler {
    stream: u64,
    values: Vec<i64>,
    /// Exclusive upper bounds; the last one is `2^64`.
    cuts: Vec<u128>,
}

impl NoiseSampler {
    fn new(stream: u64, dist: &Distribution) -> Self {
        let scale = Prob::from_integer(BigInt::from(1u128 << 64));
        let mut cum = Prob::zero();
        let mut cuts = Vec::with_capacity(dist.len());
        for m in dist.masses() {
            cum += m;
            let cut = (&cum * &scale).floor().to_integer();
            cuts.push(cut.to_u128().expect("cut lies in [0, 2^64]"));
        }
        Self {
            stream,
            values: dist.support().to_vec(),
            cuts,
        }
    }

    fn draw(&self, seed: u64, row: u64) -> i64 {
        let r = u128::from(counter_u64(seed, row, self.stream));
        let i = self.cuts.partition_point(|&c| c <= r);
        self.values[i.min(self.values.len() - 1)]
    }
}

/// Rows of endogenous values drawn from a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleBatch {
    variables: Vec<String>,
    ranges: Vec<Vec<i64>>,
    data: Vec<i64>,
    seed: u64,
    n: usize,
}

impl SampleBatch {
    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i64]> + '_ {
        self.data.chunks(self.variables.len().max(1)).take(self.n)
    }

    pub fn row(&self, i: usize) -> &[i64] {
        let w = self.variables.len();
        &self.data[i * w..(i + 1) * w]
    }

    fn index_of(&self, var: &str) -> Result<usize, SamplingError> {
        self.variables
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| SamplingError::UnknownVariable(var.to_string()))
    }

    /// Empirical distribution of `var` over its declared range.
    pub fn empirical(&self, var: &str) -> Result<Distribution, SamplingError> {
        let i = self.index_of(var)?;
        let range = &self.ranges[i];
        let mut counts = vec![0u64; range.len()];
        for row in self.rows() {
            let k = range.iter().position(|v| *v == row[i]).expect("rows stay in range");
            counts[k] += 1;
        }
        let n = BigInt::from(self.n);
        let masses = counts
            .into_iter()
            .map(|c| Prob::new(BigInt::from(c), n.clone()))
            .collect();
        Ok(Distribution::from_parts_unchecked(range.clone(), masses))
    }

    /// Empirical joint distribution (relative frequencies of whole rows).
    pub fn empirical_joint(&self) -> JointTable {
        let mut counts: std::collections::BTreeMap<Vec<i64>, u64> = Default::default();
        for row in self.rows() {
            *counts.entry(row.to_vec()).or_default() += 1;
        }
        let n = BigInt::from(self.n);
        JointTable::from_entries(
            self.variables.clone(),
            self.ranges.clone(),
            counts
                .into_iter()
                .map(|(k, c)| (k, Prob::new(BigInt::from(c), n.clone())))
                .collect(),
        )
    }

    /// Writes a header of variable names followed by one line per row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.variables.join(","))?;
        for row in self.rows() {
            let line = row.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Draws `n` rows from `scm`, optionally under the atomic intervention `do`.
///
/// The intervention ignores the non-intervenable flag; the command-line layer
/// enforces it.
pub fn forward_sample(
    scm: &Scm,
    n: usize,
    seed: u64,
    do_: Option<(&str, i64)>,
) -> Result<SampleBatch, SamplingError> {
    forward_sample_with(scm, n, seed, do_, Execution::default())
}

pub fn forward_sample_with(
    scm: &Scm,
    n: usize,
    seed: u64,
    do_: Option<(&str, i64)>,
    exec: Execution,
) -> Result<SampleBatch, SamplingError> {
    if n == 0 {
        return Err(SamplingError::EmptyBatch);
    }
    let model;
    let scm = match do_ {
        Some((var, value)) => {
            model = intervene_with_policy(scm, var, value, InterventionPolicy::AllowNonIntervenable)?;
            &model
        }
        None => scm,
    };
    let plan = CompiledScm::new(scm).map_err(|e| SamplingError::InvalidModel(e.to_string()))?;
    let samplers: Vec<NoiseSampler> = plan
        .noises
        .iter()
        .map(|nz| NoiseSampler::new(nz.decl_index as u64, &nz.distribution))
        .collect();
    let width = plan.num_variables();

    let chunks = map_chunks(n as u64, ROWS_PER_CHUNK, exec, |rows| {
        let mut out = Vec::with_capacity((rows.end - rows.start) as usize * width);
        let mut slots = vec![0i64; plan.slot_count()];
        for row in rows {
            for (j, s) in samplers.iter().enumerate() {
                slots[width + j] = s.draw(seed, row);
            }
            plan.run(&mut slots)
                .map_err(|e| SamplingError::InvalidModel(e.to_string()))?;
            out.extend_from_slice(&slots[..width]);
        }
        Ok::<_, SamplingError>(out)
    });
    let mut data = Vec::with_capacity(n * width);
    for c in chunks {
        data.extend(c?);
    }
    Ok(SampleBatch {
        variables: plan.names.clone(),
        ranges: plan.ranges.clone(),
        data,
        seed,
        n,
    })
}

/// Plug-in entropy of `var` in `batch`.
pub fn estimate_entropy(batch: &SampleBatch, var: &str) -> Result<Bits, SamplingError> {
    Ok(entropy(&batch.empirical(var)?))
}

/// Plug-in conditional entropy `H(target | given)`.
pub fn estimate_conditional_entropy(
    batch: &SampleBatch,
    target: &str,
    given: &str,
) -> Result<Bits, SamplingError> {
    batch.index_of(target)?;
    batch.index_of(given)?;
    conditional_entropy(&batch.empirical_joint(), target, given)
        .map_err(|e| SamplingError::InvalidModel(e.to_string()))
}

/// Plug-in mutual information `I(x; y)`.
pub fn estimate_mutual_information(batch: &SampleBatch, x: &str, y: &str) -> Result<Bits, SamplingError> {
    batch.index_of(x)?;
    batch.index_of(y)?;
    mutual_information(&batch.empirical_joint(), x, y)
        .map_err(|e| SamplingError::InvalidModel(e.to_string()))
}

/// Seed used for the interventional batch of the `k`-th range value.
fn intervention_seed(seed: u64, k: usize) -> u64 {
    mix64(seed ^ mix64(k as u64 + 1))
}

/// Simulated `(Hc, Ic)` for `target` under `protocol`.
///
/// Each value with positive protocol mass gets its own interventional batch of
/// `n_per_intervention` rows; per-value plug-in entropies are combined with
/// the exact protocol weights. `H(target)` comes from an observational batch
/// drawn with `seed`.
pub fn estimate_causal_quantities(
    scm: &Scm,
    target: &str,
    protocol: &InterventionProtocol,
    n_per_intervention: usize,
    seed: u64,
) -> Result<(Bits, Bits), SamplingError> {
    if !scm.is_endogenous(target) {
        return Err(SamplingError::UnknownVariable(target.to_string()));
    }
    let var = protocol.variable();
    let mut hc = CompensatedSum::default();
    for (k, (x, w)) in protocol.distribution().iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        let batch = forward_sample(scm, n_per_intervention, intervention_seed(seed, k), Some((var, x)))?;
        hc.add(to_f64(w) * estimate_entropy(&batch, target)?.0);
    }
    let observed = forward_sample(scm, n_per_intervention, seed, None)?;
    let h = estimate_entropy(&observed, target)?;
    let hc = Bits(hc.value());
    Ok((hc, h - hc))
}

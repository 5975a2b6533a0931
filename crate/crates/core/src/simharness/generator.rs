use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::catscore::OracleCorrelation;
use crate::error::{Error, Result};
use crate::estimators::{Group, LabeledDataset};

/// Parameters of the two-group data generator.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub p: usize,
    /// The first `de_count` features are differential.
    pub de_count: usize,
    /// Degrees of freedom of the scaled inverse chi-square variance prior.
    pub d0: f64,
    /// Scale of the variance prior.
    pub s0_sq: f64,
    pub n1: usize,
    pub n2: usize,
    pub seed: u64,
    pub replicates: usize,
}

impl Default for GeneratorSpec {
    /// Desk scale: 200 features, 20 differential, 100 replicates.
    fn default() -> Self {
        Self {
            p: 200,
            de_count: 20,
            d0: 4.0,
            s0_sq: 4.0,
            n1: 8,
            n2: 8,
            seed: 0,
            replicates: 100,
        }
    }
}

impl GeneratorSpec {
    /// 1000 features, 100 differential, 500 replicates.
    pub fn full_scale() -> Self {
        Self {
            p: 1000,
            de_count: 100,
            replicates: 500,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::invalid("p must be positive"));
        }
        if self.de_count > self.p {
            return Err(Error::invalid(format!(
                "de_count {} exceeds p = {}",
                self.de_count, self.p
            )));
        }
        if !(self.d0 > 2.0 && self.d0.is_finite()) {
            return Err(Error::invalid(format!("d0 = {} must exceed 2", self.d0)));
        }
        if !(self.s0_sq > 0.0 && self.s0_sq.is_finite()) {
            return Err(Error::invalid(format!("s0_sq = {} must be positive", self.s0_sq)));
        }
        if self.n1 < 2 || self.n2 < 2 {
            return Err(Error::invalid("each group needs at least 2 samples"));
        }
        if self.replicates == 0 {
            return Err(Error::invalid("replicates must be at least 1"));
        }
        Ok(())
    }
}

/// Which features are truly differential.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthLabels {
    pub is_de: Vec<bool>,
}

impl TruthLabels {
    /// The first `de_count` of `p` features are differential.
    pub fn leading(p: usize, de_count: usize) -> Self {
        Self {
            is_de: (0..p).map(|i| i < de_count).collect(),
        }
    }

    pub fn de_count(&self) -> usize {
        self.is_de.iter().filter(|&&b| b).count()
    }

    pub fn p(&self) -> usize {
        self.is_de.len()
    }
}

/// Purpose of a per-replicate random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Data,
    RandomOrder,
}

/// Deterministic generator for one replicate.
///
/// Every stream is the ChaCha8 keystream of the master seed with stream id
/// `2 * replicate` for data and `2 * replicate + 1` for the random-order
/// baseline, so replicates can be processed in any order.
pub fn replicate_rng(seed: u64, replicate: usize, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset = match stream {
        Stream::Data => 0,
        Stream::RandomOrder => 1,
    };
    rng.set_stream(2 * replicate as u64 + offset);
    rng
}

/// Per-feature variances `d0 * s0_sq / X` with `X ~ chi^2(d0)`.
pub fn sample_variances<R: Rng + ?Sized>(spec: &GeneratorSpec, rng: &mut R) -> Result<DVector<f64>> {
    if !(spec.d0 > 0.0) || !(spec.s0_sq > 0.0) {
        return Err(Error::invalid("d0 and s0_sq must be positive"));
    }
    let chi2 = ChiSquared::new(spec.d0).map_err(|e| Error::invalid(e.to_string()))?;
    let scale = spec.d0 * spec.s0_sq;
    Ok(DVector::from_fn(spec.p, |_, _| scale / chi2.sample(rng)))
}

/// One simulated two-group dataset with its truth labels.
///
/// Draw order: variances, mean differences of the differential features
/// (normal with the feature's variance), then standard normals sample by
/// sample, group 1 first. Samples are `mu_k + V^(1/2) L z` with `L L^T = P`;
/// group 1 carries the mean difference and group 2 has mean zero.
pub fn sample_dataset<R: Rng + ?Sized>(
    spec: &GeneratorSpec,
    scenario: &OracleCorrelation,
    rng: &mut R,
) -> Result<(LabeledDataset, TruthLabels)> {
    spec.validate()?;
    if scenario.dim() != spec.p {
        return Err(Error::DimensionMismatch {
            expected: spec.p,
            actual: scenario.dim(),
        });
    }
    let p = spec.p;
    let n = spec.n1 + spec.n2;
    let variances = sample_variances(spec, rng)?;
    let sd = variances.map(f64::sqrt);
    let mut shift = DVector::zeros(p);
    for i in 0..spec.de_count {
        let z: f64 = rng.sample(StandardNormal);
        shift[i] = z * sd[i];
    }

    let mut z = DMatrix::zeros(p, n);
    for j in 0..n {
        for i in 0..p {
            z[(i, j)] = rng.sample(StandardNormal);
        }
    }
    let mut x = scenario.cholesky_factor() * z;
    for j in 0..n {
        let mut col = x.column_mut(j);
        col.component_mul_assign(&sd);
        if j < spec.n1 {
            col += &shift;
        }
    }

    let labels = (0..n)
        .map(|j| if j < spec.n1 { Group::One } else { Group::Two })
        .collect();
    let names: Arc<[String]> = (1..=p).map(|i| format!("g{i}")).collect::<Vec<_>>().into();
    let samples = (1..=n).map(|j| format!("s{j}")).collect();
    let data = LabeledDataset::with_sample_names(x, labels, names, samples)?;
    Ok((data, TruthLabels::leading(p, spec.de_count)))
}

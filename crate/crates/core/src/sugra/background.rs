use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::flux::FluxSpec;
use super::SugraError;
use crate::exprlang::Chart;
use crate::exterior::{Metric, SingularHyperplane};
use crate::geometry::{product_metric, ProductStructure};

/// Points closer than this to a declared singular hyperplane are rejected.
pub const SINGULAR_MARGIN: f64 = 0.05;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_POINTS: usize = 100;
pub const DEFAULT_SEED: u64 = 42;

/// Axis-aligned sampling box on the product chart.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBox {
    pub ranges: Vec<(f64, f64)>,
}

impl SampleBox {
    pub fn uniform(n: usize, lo: f64, hi: f64) -> SampleBox {
        SampleBox {
            ranges: vec![(lo, hi); n],
        }
    }

    pub fn set(mut self, coord: usize, lo: f64, hi: f64) -> SampleBox {
        self.ranges[coord] = (lo, hi);
        self
    }
}

/// A background `(X, h, Φ)` on a 5+6 product with a sampling box.
#[derive(Debug, Clone)]
pub struct Background {
    pub id: String,
    pub note: String,
    pub product: ProductStructure,
    pub flux: FluxSpec,
    pub sample: SampleBox,
}

impl Background {
    pub fn new(
        id: &str,
        note: &str,
        product: ProductStructure,
        flux: FluxSpec,
        sample: SampleBox,
    ) -> Result<Background, SugraError> {
        flux.validate(&product)?;
        if sample.ranges.len() != 11 || sample.ranges.iter().any(|(a, b)| !(a < b)) {
            return Err(SugraError::BadSampleBox);
        }
        Ok(Background {
            id: id.to_string(),
            note: note.to_string(),
            product,
            flux,
            sample,
        })
    }

    pub fn chart(&self) -> Chart {
        self.product.chart()
    }

    pub fn metric(&self) -> Result<Metric, SugraError> {
        Ok(product_metric(&self.product)?)
    }

    pub fn singular(&self) -> Vec<SingularHyperplane> {
        let mut out = self.product.lorentz.singular().to_vec();
        out.extend(self.product.riemann.singular().iter().map(|s| SingularHyperplane {
            coord: s.coord + 5,
            value: s.value,
        }));
        out
    }

    /// Seeded sample points in the box, away from singular hyperplanes.
    pub fn plan(&self, points: usize, seed: u64) -> Result<SamplePlan, SugraError> {
        SamplePlan::generate(&self.sample, &self.singular(), points, seed)
    }
}

/// A fixed, ordered list of sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    pub seed: u64,
    pub points: Vec<Vec<f64>>,
}

impl SamplePlan {
    pub fn generate(
        sample: &SampleBox,
        singular: &[SingularHyperplane],
        count: usize,
        seed: u64,
    ) -> Result<SamplePlan, SugraError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while points.len() < count {
            attempts += 1;
            if attempts > 1000 * count.max(1) {
                return Err(SugraError::SamplingExhausted);
            }
            let p: Vec<f64> = sample
                .ranges
                .iter()
                .map(|&(lo, hi)| rng.gen_range(lo..hi))
                .collect();
            if singular
                .iter()
                .any(|s| (p[s.coord] - s.value).abs() < SINGULAR_MARGIN)
            {
                continue;
            }
            points.push(p);
        }
        Ok(SamplePlan { seed, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

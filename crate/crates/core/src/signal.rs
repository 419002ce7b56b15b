//! Domain-tagged complex sample sequences, the payload type passed
//! between every processing stage.

use num_complex::Complex64;

use crate::transforms::DaftParams;

/// Which transform domain the samples live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Time,
    Affine,
    Frequency,
}

/// A sequence of complex samples tagged with the domain that produced it.
#[derive(Debug, Clone)]
pub struct Signal {
    pub samples: Vec<Complex64>,
    pub domain: Domain,
    /// Transform parameters that produced an affine-domain signal, when known.
    pub meta: Option<DaftParams>,
}

impl Signal {
    pub fn new(samples: Vec<Complex64>, domain: Domain) -> Self {
        Self {
            samples,
            domain,
            meta: None,
        }
    }

    pub fn time(samples: Vec<Complex64>) -> Self {
        Self::new(samples, Domain::Time)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sum of |x|^2 over all samples.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }
}

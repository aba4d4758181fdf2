//! Simulation scenarios: the built-in signal sequences used by the
//! reference studies, and the shifted-alternative construction H_r.
//!
//! Under H_r the mean vector is θ_j = η_{j+r-1}: the signal window slides
//! left by one position per unit of r, so the number of nonzero means
//! shrinks from len(η) (at r = 1) down to 1, and r = len(η) + 1 is the null.

use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Signal sequence drawn from N(1.5, 1); 30 nonzero means.
pub const EXAMPLE_3_1: [f64; 30] = [
    1.0674, -0.1656, 1.6253, 1.7877, 0.3535, 2.6909, 2.6892, 1.4624, 1.8273, 1.6746, 1.3133,
    2.2258, 0.9117, 3.6832, 1.3636, 1.6139, 2.5668, 1.5593, 1.4044, 0.6677, 1.7944, 0.1638, 2.2143,
    3.1236, 0.8082, 2.7540, -0.0937, 0.0590, 2.0711, 2.3579,
];

/// Signal sequence drawn from Exp(1); 30 nonzero means.
pub const EXAMPLE_3_2: [f64; 30] = [
    0.0512, 1.4647, 0.4995, 0.7216, 0.1151, 0.2716, 0.7842, 3.7876, 0.1967, 0.8103, 0.4854, 0.2332,
    0.5814, 0.3035, 1.7357, 0.9021, 0.0667, 0.0867, 0.8909, 0.1124, 2.8491, 1.0416, 0.2068, 2.6191,
    1.9740, 1.5957, 1.6158, 0.5045, 1.3012, 1.6153,
];

/// Constant signal: 30 means equal to 2.0.
pub const EXAMPLE_3_3: [f64; 30] = [2.0; 30];

/// Group-effect sequence drawn from Uniform(-2, 2); 20 nonzero effects.
pub const EXAMPLE_4_1: [f64; 20] = [
    1.8005, -1.0754, 0.4274, -0.0561, 1.5652, 1.0484, -0.1741, -1.9260, 1.2856, -0.2212, 0.4617,
    1.1677, 1.6873, 0.9528, -1.2949, -0.3772, 1.7419, 1.6676, -0.3589, 1.5746,
];

/// Group-effect sequence drawn from Exp(0.7); 20 nonzero effects.
pub const EXAMPLE_4_2: [f64; 20] = [
    1.0949, 0.5511, 1.7587, 0.1128, 0.4033, 0.7991, 0.6868, 0.0993, 0.6919, 1.8255, 1.1272, 2.1041,
    0.3975, 1.4730, 0.4549, 1.5015, 0.1830, 0.6865, 0.1360, 2.1458,
];

/// All built-in signal sequences keyed by name.
pub fn catalog() -> [(&'static str, &'static [f64]); 5] {
    [
        ("example3.1", &EXAMPLE_3_1),
        ("example3.2", &EXAMPLE_3_2),
        ("example3.3", &EXAMPLE_3_3),
        ("example4.1", &EXAMPLE_4_1),
        ("example4.2", &EXAMPLE_4_2),
    ]
}

/// Looks up a built-in signal sequence by name.
pub fn by_name(name: &str) -> Option<&'static [f64]> {
    catalog()
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, eta)| *eta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    SingleSequence,
    Hanova,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dims {
    /// One sequence of length n.
    Single { n: usize },
    /// a groups of n observations each.
    Grouped { a: usize, n: usize },
}

impl Dims {
    /// Number of mean parameters (n for a sequence, a for groups).
    pub fn param_count(&self) -> usize {
        match *self {
            Dims::Single { n } => n,
            Dims::Grouped { a, .. } => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Noise {
    StdNormal,
}

/// A null or shifted-alternative data-generating configuration.
#[derive(Debug, Clone)]
pub struct SimulationScenario {
    pub kind: Kind,
    pub dims: Dims,
    /// Signal values; empty means the global null.
    pub eta: Vec<f64>,
    /// Window start r >= 1 of the alternative H_r.
    pub shift_r: usize,
    pub noise: Noise,
}

impl SimulationScenario {
    pub fn new(kind: Kind, dims: Dims, eta: Vec<f64>, shift_r: usize) -> Result<Self> {
        let matches = match (kind, dims) {
            (Kind::SingleSequence, Dims::Single { .. }) => true,
            (Kind::Hanova, Dims::Grouped { .. }) => true,
            _ => false,
        };
        if !matches {
            return Err(Error::Domain("scenario kind does not match its dimensions"));
        }
        if shift_r == 0 || shift_r > eta.len() + 1 {
            return Err(Error::Domain("shift must satisfy 1 <= r <= len(eta) + 1"));
        }
        if eta.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("signal values must be finite"));
        }
        Ok(SimulationScenario {
            kind,
            dims,
            eta,
            shift_r,
            noise: Noise::StdNormal,
        })
    }

    pub fn null(kind: Kind, dims: Dims) -> Result<Self> {
        SimulationScenario::new(kind, dims, Vec::new(), 1)
    }

    /// The mean vector under H_r: θ_j = η_{j+r-1}, zero past the window.
    pub fn theta(&self) -> Vec<f64> {
        let dim = self.dims.param_count();
        let mut theta = alloc::vec![0.0; dim];
        for (j, slot) in theta.iter_mut().enumerate() {
            let idx = j + self.shift_r - 1; // zero-based η index
            if idx < self.eta.len() {
                *slot = self.eta[idx];
            }
        }
        theta
    }

    /// Number of nonzero means under this shift (the k_opt of a power row).
    pub fn signal_count(&self) -> usize {
        self.theta().iter().filter(|v| **v != 0.0).count()
    }

    pub fn label(&self) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        if self.eta.is_empty() {
            match self.dims {
                Dims::Single { n } => write!(s, "null(n={n})").unwrap(),
                Dims::Grouped { a, n } => write!(s, "null(a={a},n={n})").unwrap(),
            }
        } else {
            write!(s, "H{}", self.shift_r).unwrap();
        }
        s
    }
}

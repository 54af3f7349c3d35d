use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Whether the disorder mixes the two polarization directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mixing {
    /// Generic disorder: all four amplitude vectors are random.
    PolarizationMixing,
    /// Scatterers translationally invariant along one axis: TE and TM do not
    /// couple, the cross amplitudes vanish.
    PolarizationConserving,
}

/// Which photons of the pair pass through a disordered medium.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Beams {
    Both,
    /// Only photon 1 is scattered; photon 2 arrives in a single mode.
    Single,
}

/// One scattering configuration with detected mode counts `n1`, `n2`.
/// `n2` is ignored for single-beam scattering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    pub mixing: Mixing,
    pub beams: Beams,
    pub n1: usize,
    pub n2: usize,
}

impl Scenario {
    pub fn new(mixing: Mixing, beams: Beams, n1: usize, n2: usize) -> Result<Self> {
        let s = Self { mixing, beams, n1, n2 };
        s.validate()?;
        Ok(s)
    }

    /// `N1 = N2 = n`.
    pub fn symmetric(mixing: Mixing, beams: Beams, n: usize) -> Result<Self> {
        Self::new(mixing, beams, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 == 0 {
            return Err(Error::InvalidArgument { field: "n1", reason: "must be at least 1".into() });
        }
        if self.n2 == 0 {
            return Err(Error::InvalidArgument { field: "n2", reason: "must be at least 1".into() });
        }
        Ok(())
    }

    /// Same mixing and beams, with `N1 = N2 = n`.
    pub fn with_modes(&self, n: usize) -> Self {
        Self { n1: n, n2: n, ..*self }
    }
}

//! Spin cluster description: resonance offsets and pairwise couplings.
//!
//! Internally every frequency is angular (rad/s). The JSON interchange
//! schema speaks Hz; the factor 2*pi is applied exactly once, at parse
//! or serialize time.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Dense matrices over 2^n states stay tractable up to this cluster size.
pub const DEFAULT_MAX_SPINS: usize = 12;

/// A cluster of spin-1/2 sites in the rotating frame.
///
/// `offsets[i]` is the resonance offset of spin i from the carrier and
/// `couplings[(i, j)]` the secular dipolar coupling, both in rad/s. The
/// coupling matrix is symmetric with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinCluster {
    n_spins: usize,
    offsets: Vec<f64>,
    couplings: DMatrix<f64>,
}

impl SpinCluster {
    pub fn new(offsets: Vec<f64>, couplings: DMatrix<f64>) -> Result<Self> {
        Self::with_max_spins(offsets, couplings, DEFAULT_MAX_SPINS)
    }

    pub fn with_max_spins(
        offsets: Vec<f64>,
        couplings: DMatrix<f64>,
        max_spins: usize,
    ) -> Result<Self> {
        let n = offsets.len();
        if n == 0 || n > max_spins {
            return Err(Error::config(format!(
                "cluster must hold between 1 and {max_spins} spins, got {n}"
            )));
        }
        if couplings.nrows() != n || couplings.ncols() != n {
            return Err(Error::config(format!(
                "coupling matrix is {}x{}, expected {n}x{n}",
                couplings.nrows(),
                couplings.ncols()
            )));
        }
        if offsets.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("offsets must be finite"));
        }
        if couplings.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("couplings must be finite"));
        }
        for i in 0..n {
            if couplings[(i, i)] != 0.0 {
                return Err(Error::config(format!(
                    "coupling matrix must have a zero diagonal, d[{i}][{i}] = {}",
                    couplings[(i, i)]
                )));
            }
            for j in (i + 1)..n {
                if couplings[(i, j)] != couplings[(j, i)] {
                    return Err(Error::config(format!(
                        "coupling matrix must be symmetric, d[{i}][{j}] != d[{j}][{i}]"
                    )));
                }
            }
        }
        Ok(SpinCluster {
            n_spins: n,
            offsets,
            couplings,
        })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    /// Hilbert space dimension 2^n.
    pub fn dim(&self) -> usize {
        1 << self.n_spins
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn couplings(&self) -> &DMatrix<f64> {
        &self.couplings
    }

    /// Nearest-neighbor chain with uniform coupling d (rad/s) and zero offsets.
    pub fn chain(n: usize, d: f64) -> Result<Self> {
        let mut couplings = DMatrix::zeros(n, n);
        for i in 0..n.saturating_sub(1) {
            couplings[(i, i + 1)] = d;
            couplings[(i + 1, i)] = d;
        }
        SpinCluster::new(vec![0.0; n], couplings)
    }

    /// Every pair coupled with the same strength d (rad/s), zero offsets.
    pub fn all_to_all(n: usize, d: f64) -> Result<Self> {
        let mut couplings = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    couplings[(i, j)] = d;
                }
            }
        }
        SpinCluster::new(vec![0.0; n], couplings)
    }

    /// Spins thrown uniformly into a unit box; couplings follow the dipolar
    /// angular factor (1 - 3 cos^2 theta) / r^3 scaled so that `coupling`
    /// (rad/s) is the magnitude at unit distance along the box axis.
    pub fn random_geometric(
        n: usize,
        coupling: f64,
        offset_spread: f64,
        min_distance: f64,
        seed: u64,
    ) -> Result<Self> {
        if !(min_distance > 0.0 && min_distance < 1.0) {
            return Err(Error::config(
                "minimum spin separation must lie strictly between 0 and 1 box units",
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut positions: Vec<[f64; 3]> = Vec::with_capacity(n);
        let mut attempts = 0usize;
        while positions.len() < n {
            attempts += 1;
            if attempts > 10_000 {
                return Err(Error::config(format!(
                    "could not place {n} spins at separation {min_distance} in a unit box"
                )));
            }
            let p = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
            let clear = positions.iter().all(|q| {
                let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2);
                d2 >= min_distance * min_distance
            });
            if clear {
                positions.push(p);
            }
        }
        let offsets: Vec<f64> = (0..n)
            .map(|_| (rng.gen::<f64>() - 0.5) * offset_spread)
            .collect();
        let mut couplings = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = positions[i][0] - positions[j][0];
                let dy = positions[i][1] - positions[j][1];
                let dz = positions[i][2] - positions[j][2];
                let r2 = dx * dx + dy * dy + dz * dz;
                let r = r2.sqrt();
                let cos_theta = dz / r;
                let d = coupling * (1.0 - 3.0 * cos_theta * cos_theta) / (r2 * r);
                couplings[(i, j)] = d;
                couplings[(j, i)] = d;
            }
        }
        SpinCluster::new(offsets, couplings)
    }
}

/// Interchange form of a cluster: explicit matrices or a named generator.
/// Frequencies in this schema are Hz.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClusterSpec {
    Explicit {
        n_spins: usize,
        offsets_hz: Vec<f64>,
        couplings_hz: Vec<Vec<f64>>,
    },
    Generated {
        generator: GeneratorKind,
        params: GeneratorParams,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Chain,
    AllToAll,
    RandomGeometric,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub n_spins: usize,
    pub coupling_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offsets_hz: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset_spread_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_distance: Option<f64>,
}

/// Materializes a cluster description, converting Hz to rad/s.
pub fn build_cluster(spec: &ClusterSpec) -> Result<SpinCluster> {
    match spec {
        ClusterSpec::Explicit {
            n_spins,
            offsets_hz,
            couplings_hz,
        } => {
            if offsets_hz.len() != *n_spins {
                return Err(Error::config(format!(
                    "n_spins is {n_spins} but {} offsets were given",
                    offsets_hz.len()
                )));
            }
            if couplings_hz.len() != *n_spins
                || couplings_hz.iter().any(|row| row.len() != *n_spins)
            {
                return Err(Error::config(format!(
                    "couplings_hz must be a {n_spins}x{n_spins} matrix"
                )));
            }
            let offsets = offsets_hz.iter().map(|f| f * TAU).collect();
            let couplings = DMatrix::from_fn(*n_spins, *n_spins, |i, j| couplings_hz[i][j] * TAU);
            SpinCluster::new(offsets, couplings)
        }
        ClusterSpec::Generated {
            generator,
            params,
            seed,
        } => {
            let n = params.n_spins;
            let d = params.coupling_hz * TAU;
            let mut cluster = match generator {
                GeneratorKind::Chain => SpinCluster::chain(n, d)?,
                GeneratorKind::AllToAll => SpinCluster::all_to_all(n, d)?,
                GeneratorKind::RandomGeometric => {
                    let seed = seed.ok_or_else(|| {
                        Error::config("random_geometric generator requires a seed")
                    })?;
                    let spread = params.offset_spread_hz.unwrap_or(0.0) * TAU;
                    let min_distance = params.min_distance.unwrap_or(0.25);
                    SpinCluster::random_geometric(n, d, spread, min_distance, seed)?
                }
            };
            if let Some(offsets_hz) = &params.offsets_hz {
                if offsets_hz.len() != n {
                    return Err(Error::config(format!(
                        "generator expects {n} offsets, got {}",
                        offsets_hz.len()
                    )));
                }
                cluster = SpinCluster::new(
                    offsets_hz.iter().map(|f| f * TAU).collect(),
                    cluster.couplings().clone(),
                )?;
            }
            Ok(cluster)
        }
    }
}

/// Serializes a cluster into the explicit interchange form (Hz).
pub fn cluster_to_spec(cluster: &SpinCluster) -> ClusterSpec {
    let n = cluster.n_spins();
    ClusterSpec::Explicit {
        n_spins: n,
        offsets_hz: cluster.offsets().iter().map(|v| v / TAU).collect(),
        couplings_hz: (0..n)
            .map(|i| (0..n).map(|j| cluster.couplings()[(i, j)] / TAU).collect())
            .collect(),
    }
}

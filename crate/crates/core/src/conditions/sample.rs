use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::maps::SelfMap;
use crate::spaces::{CompactSet, Point, SET_TOL};

/// Knobs for building a [`PairSample`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    /// Grid nodes per dimension.
    pub grid: usize,
    /// Seeded pseudorandom pairs added on top of the grid product.
    pub random_pairs: usize,
    pub seed: u64,
    /// Upper bound on the size of the grid product.
    pub max_grid_pairs: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            grid: 201,
            random_pairs: 10_000,
            seed: 0,
            max_grid_pairs: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleDescription {
    pub grid_per_dimension: usize,
    pub grid_points: usize,
    pub grid_pairs: usize,
    pub random_pairs: usize,
    pub seed: u64,
    pub exception_points: Vec<Point>,
}

/// Ordered pairs `(x, y)` of domain points: the full product of a grid (with
/// the map's exception points injected as nodes) plus seeded random pairs.
#[derive(Debug, Clone)]
pub struct PairSample {
    pub(crate) points: Vec<Point>,
    pub(crate) pairs: Vec<(u32, u32)>,
    pub(crate) description: SampleDescription,
}

impl PairSample {
    pub fn for_map<M: SelfMap + ?Sized>(map: &M, config: &SampleConfig) -> Self {
        Self::new(map.domain(), &map.exception_points(), config)
    }

    pub fn new(domain: &CompactSet, exceptions: &[Point], config: &SampleConfig) -> Self {
        let injected: Vec<Point> = exceptions
            .iter()
            .filter(|e| e.dim() == domain.dim() && domain.contains(e, SET_TOL))
            .cloned()
            .collect();

        let dim = domain.dim() as f64;
        let mut n = config.grid.max(2);
        if domain.dim() > 1 {
            // a box grid has at most n^d nodes; skip sizes that cannot fit
            let root = (config.max_grid_pairs as f64)
                .sqrt()
                .powf(1.0 / dim)
                .floor() as usize;
            n = n.min(root.max(2));
        }
        let grid = loop {
            let mut g = domain.grid(n);
            for e in &injected {
                if !g.contains(e) {
                    g.push(e.clone());
                }
            }
            if g.len() * g.len() <= config.max_grid_pairs || n == 2 {
                break g;
            }
            let shrink = ((config.max_grid_pairs as f64).sqrt() / g.len() as f64).powf(1.0 / dim);
            n = ((n as f64 * shrink).floor() as usize).clamp(2, n - 1);
        };

        let m = grid.len();
        let mut pairs = Vec::with_capacity(m * m + config.random_pairs);
        for i in 0..m {
            for j in 0..m {
                pairs.push((i as u32, j as u32));
            }
        }
        let mut points = grid;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for _ in 0..config.random_pairs {
            let a = random_point(domain, &mut rng);
            let b = random_point(domain, &mut rng);
            let ia = points.len() as u32;
            points.push(a);
            points.push(b);
            pairs.push((ia, ia + 1));
        }

        PairSample {
            points,
            pairs,
            description: SampleDescription {
                grid_per_dimension: n,
                grid_points: m,
                grid_pairs: m * m,
                random_pairs: config.random_pairs,
                seed: config.seed,
                exception_points: injected,
            },
        }
    }

    /// Every ordered pair of the given points and nothing else.
    pub fn all_pairs(points: Vec<Point>) -> Self {
        let m = points.len();
        let pairs = (0..m as u32)
            .flat_map(|i| (0..m as u32).map(move |j| (i, j)))
            .collect();
        PairSample {
            points,
            pairs,
            description: SampleDescription {
                grid_per_dimension: 0,
                grid_points: m,
                grid_pairs: m * m,
                random_pairs: 0,
                seed: 0,
                exception_points: Vec::new(),
            },
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn description(&self) -> &SampleDescription {
        &self.description
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Point, &Point)> {
        self.pairs
            .iter()
            .map(|(i, j)| (&self.points[*i as usize], &self.points[*j as usize]))
    }
}

/// Uniform on an interval; flat-Dirichlet weights over polytope vertices.
pub(crate) fn random_point(domain: &CompactSet, rng: &mut ChaCha8Rng) -> Point {
    match domain {
        CompactSet::Interval { lo, hi } => {
            let u: f64 = rng.random();
            Point::scalar(lo + u * (hi - lo))
        }
        CompactSet::Polytope { vertices } => {
            let w: Vec<f64> = vertices
                .iter()
                .map(|_| {
                    let u: f64 = rng.random();
                    -(1.0 - u).ln()
                })
                .collect();
            let total: f64 = w.iter().sum();
            let mut c = vec![0.0; vertices[0].dim()];
            for (v, wi) in vertices.iter().zip(&w) {
                for (ck, vk) in c.iter_mut().zip(v.coords()) {
                    *ck += wi / total * vk;
                }
            }
            Point::new(c).expect("finite convex combination")
        }
        CompactSet::Points { points } => points[rng.random_range(0..points.len())].clone(),
    }
}

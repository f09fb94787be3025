use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MapMode {
    /// Covariances of every pixel with one fixed pixel.
    Row(usize),
    /// All pixel pairs.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
struct MapSums {
    n: f64,
    s: Vec<f64>,
    sp: Vec<f64>,
}

/// Streaming normally ordered covariance map of pixel counts. Errors come from
/// batch means, with trajectories assigned to batches by index.
#[derive(Debug, Clone, PartialEq)]
pub struct MapAccumulator {
    pub mode: MapMode,
    /// Vacuum mode count of every pixel.
    pub modes: Vec<f64>,
    batches: Vec<MapSums>,
}

/// ⟨:δN_iδN_j:⟩ over pixels i (rows) and j (columns), with standard errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMap {
    pub mode: MapMode,
    pub n_traj: usize,
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    /// Normally ordered mean count of every pixel.
    pub means: Vec<f64>,
}

impl CorrelationMap {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn err(&self, i: usize, j: usize) -> f64 {
        self.errors[i * self.cols + j]
    }
}

impl MapAccumulator {
    pub fn new(mode: MapMode, modes: Vec<f64>, n_batches: usize) -> Result<Self> {
        let k = modes.len();
        if let MapMode::Row(f) = mode {
            if f >= k {
                return Err(Error::Detector(format!("fixed pixel {f} outside the {k}-pixel map")));
            }
        }
        let width = match mode {
            MapMode::Row(_) => k,
            MapMode::Full => k * k,
        };
        let b = MapSums { n: 0.0, s: vec![0.0; k], sp: vec![0.0; width] };
        Ok(MapAccumulator { mode, modes, batches: vec![b; n_batches.max(2)] })
    }

    pub fn pixels(&self) -> usize {
        self.modes.len()
    }

    /// Adds one trajectory's Wigner counts.
    pub fn push(&mut self, traj: u64, counts: &[f64]) {
        let k = self.pixels();
        assert_eq!(counts.len(), k);
        let nb = self.batches.len() as u64;
        let b = &mut self.batches[(traj % nb) as usize];
        // shift by the vacuum level to keep sums small
        let x: Vec<f64> = counts.iter().zip(&self.modes).map(|(c, m)| c - 0.5 * m).collect();
        b.n += 1.0;
        for (s, v) in b.s.iter_mut().zip(&x) {
            *s += v;
        }
        match self.mode {
            MapMode::Row(f) => {
                for (s, v) in b.sp.iter_mut().zip(&x) {
                    *s += v * x[f];
                }
            }
            MapMode::Full => {
                for i in 0..k {
                    let row = &mut b.sp[i * k..(i + 1) * k];
                    for (s, v) in row.iter_mut().zip(&x) {
                        *s += x[i] * v;
                    }
                }
            }
        }
    }

    pub fn merge(&mut self, o: &MapAccumulator) {
        for (a, b) in self.batches.iter_mut().zip(&o.batches) {
            a.n += b.n;
            a.s.iter_mut().zip(&b.s).for_each(|(x, y)| *x += y);
            a.sp.iter_mut().zip(&b.sp).for_each(|(x, y)| *x += y);
        }
    }

    fn map_of(&self, n: f64, s: &[f64], sp: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let k = self.pixels();
        // normally ordered means ⟨N⟩ = ⟨N_W⟩ − M/2 equal the shifted means
        let means: Vec<f64> = s.iter().map(|v| v / n).collect();
        let corr = |i: usize, j: usize, cov_w: f64| {
            if i == j {
                cov_w - 0.25 * self.modes[i] - means[i]
            } else {
                cov_w
            }
        };
        let vals = match self.mode {
            MapMode::Row(f) => (0..k).map(|j| corr(f, j, (sp[j] - s[j] * s[f] / n) / (n - 1.0))).collect(),
            MapMode::Full => (0..k * k)
                .map(|idx| {
                    let (i, j) = (idx / k, idx % k);
                    corr(i, j, (sp[idx] - s[i] * s[j] / n) / (n - 1.0))
                })
                .collect(),
        };
        (vals, means)
    }

    fn totals(&self) -> MapSums {
        let mut t = MapSums { n: 0.0, s: vec![0.0; self.pixels()], sp: vec![0.0; self.batches[0].sp.len()] };
        for b in &self.batches {
            t.n += b.n;
            t.s.iter_mut().zip(&b.s).for_each(|(x, y)| *x += y);
            t.sp.iter_mut().zip(&b.sp).for_each(|(x, y)| *x += y);
        }
        t
    }

    pub fn finish(&self) -> Result<CorrelationMap> {
        let t = self.totals();
        if t.n < 2.0 {
            return Err(Error::Numerical("correlation map needs at least two trajectories".into()));
        }
        let (values, means) = self.map_of(t.n, &t.s, &t.sp);
        let used: Vec<&MapSums> = self.batches.iter().filter(|b| b.n >= 2.0).collect();
        let errors = if used.len() >= 2 {
            let maps: Vec<Vec<f64>> = used.iter().map(|b| self.map_of(b.n, &b.s, &b.sp).0).collect();
            let nb = maps.len() as f64;
            (0..values.len())
                .map(|i| {
                    let m = maps.iter().map(|v| v[i]).sum::<f64>() / nb;
                    let var = maps.iter().map(|v| (v[i] - m).powi(2)).sum::<f64>() / (nb - 1.0);
                    (var / nb).sqrt()
                })
                .collect()
        } else {
            vec![f64::NAN; values.len()]
        };
        let (rows, cols) = match self.mode {
            MapMode::Row(_) => (1, self.pixels()),
            MapMode::Full => (self.pixels(), self.pixels()),
        };
        Ok(CorrelationMap { mode: self.mode, n_traj: t.n as usize, rows, cols, values, errors, means })
    }
}

/// ⟨(δN₋)²⟩ assembled from a full map for N₁ = Σ_{i∈R₁}N_i and N₂ = Σ_{j∈R₂}N_j:
/// ⟨N₊⟩ + Σ_{R₁R₁}G + Σ_{R₂R₂}G − 2Σ_{R₁R₂}G.
pub fn var_minus_from_map(map: &CorrelationMap, r1: &[usize], r2: &[usize]) -> Result<f64> {
    if map.mode != MapMode::Full {
        return Err(Error::Detector("assembling Var(N₋) needs the full map".into()));
    }
    let sum = |a: &[usize], b: &[usize]| a.iter().flat_map(|&i| b.iter().map(move |&j| (i, j))).map(|(i, j)| map.get(i, j)).sum::<f64>();
    let shot: f64 = r1.iter().chain(r2).map(|&i| map.means[i]).sum();
    Ok(shot + sum(r1, r1) + sum(r2, r2) - 2.0 * sum(r1, r2))
}

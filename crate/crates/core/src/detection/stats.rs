use serde::Serialize;

use crate::error::{Error, Result};

/// Weighted first and second moments of a pair (N₁, N₂), mergeable by Chan's update.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PairMoments {
    pub w: f64,
    pub mean: [f64; 2],
    /// Co-moments Σ(x−x̄)(y−ȳ): [11, 22, 12].
    pub m2: [f64; 3],
}

impl PairMoments {
    pub fn single(n1: f64, n2: f64) -> Self {
        PairMoments { w: 1.0, mean: [n1, n2], m2: [0.0; 3] }
    }

    pub fn from_samples(samples: &[(f64, f64)]) -> Self {
        let mut m = PairMoments::default();
        for &(a, b) in samples {
            m.merge(&PairMoments::single(a, b));
        }
        m
    }

    pub fn merge(&mut self, o: &PairMoments) {
        if o.w == 0.0 {
            return;
        }
        if self.w == 0.0 {
            *self = *o;
            return;
        }
        let w = self.w + o.w;
        let d = [o.mean[0] - self.mean[0], o.mean[1] - self.mean[1]];
        let f = self.w * o.w / w;
        self.m2[0] += o.m2[0] + d[0] * d[0] * f;
        self.m2[1] += o.m2[1] + d[1] * d[1] * f;
        self.m2[2] += o.m2[2] + d[0] * d[1] * f;
        self.mean[0] += d[0] * o.w / w;
        self.mean[1] += d[1] * o.w / w;
        self.w = w;
    }

    /// Inverse of `merge`: the moments with group `o` taken out.
    pub fn remove(&self, o: &PairMoments) -> PairMoments {
        let w = self.w - o.w;
        if w <= 0.0 {
            return PairMoments::default();
        }
        let mean = [(self.w * self.mean[0] - o.w * o.mean[0]) / w, (self.w * self.mean[1] - o.w * o.mean[1]) / w];
        let d = [o.mean[0] - mean[0], o.mean[1] - mean[1]];
        let f = w * o.w / self.w;
        PairMoments {
            w,
            mean,
            m2: [
                self.m2[0] - o.m2[0] - d[0] * d[0] * f,
                self.m2[1] - o.m2[1] - d[1] * d[1] * f,
                self.m2[2] - o.m2[2] - d[0] * d[1] * f,
            ],
        }
    }

    /// Unbiased Var(N₁ − N₂).
    pub fn var_diff(&self) -> f64 {
        (self.m2[0] + self.m2[1] - 2.0 * self.m2[2]) / (self.w - 1.0)
    }

    pub fn var(&self, k: usize) -> f64 {
        self.m2[k] / (self.w - 1.0)
    }

    pub fn cov(&self) -> f64 {
        self.m2[2] / (self.w - 1.0)
    }
}

/// Streaming statistics of one detector pair. Each trajectory contributes one group,
/// which may pool several pixel positions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StatsAccumulator {
    /// Vacuum mode counts M₁, M₂ (lattice cells in each region).
    pub modes: [f64; 2],
    pub total: PairMoments,
    pub groups: Vec<PairMoments>,
}

impl StatsAccumulator {
    pub fn new(m1: usize, m2: usize) -> Self {
        StatsAccumulator { modes: [m1 as f64, m2 as f64], ..Default::default() }
    }

    pub fn n_traj(&self) -> usize {
        self.groups.len()
    }

    pub fn push(&mut self, n1: f64, n2: f64) {
        self.push_group(PairMoments::single(n1, n2));
    }

    pub fn push_group(&mut self, g: PairMoments) {
        self.total.merge(&g);
        self.groups.push(g);
    }

    pub fn merge(&mut self, other: &StatsAccumulator) {
        debug_assert_eq!(self.modes, other.modes);
        self.total.merge(&other.total);
        self.groups.extend_from_slice(&other.groups);
    }
}

/// Normally ordered photon numbers and the noise ratio, with jackknife errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub n_traj: usize,
    pub n1: f64,
    pub n2: f64,
    pub n_plus: f64,
    pub var_minus: f64,
    /// ⟨(δN₋)²⟩/⟨N₊⟩; `None` when the shot noise is consistent with zero.
    pub ratio: Option<f64>,
    pub se_n1: f64,
    pub se_n2: f64,
    pub se_n_plus: f64,
    pub se_var_minus: f64,
    pub se_ratio: Option<f64>,
    pub diagnostics: Vec<String>,
}

impl Measurement {
    /// Shot-noise bound (ratio ≥ 0) checked within k standard errors.
    pub fn physical_within(&self, k: f64) -> bool {
        match (self.ratio, self.se_ratio) {
            (Some(r), Some(e)) => r >= -k * e,
            _ => true,
        }
    }
}

#[derive(Clone, Copy)]
struct Corrected {
    n1: f64,
    n2: f64,
    var_minus: f64,
}

impl Corrected {
    fn from(m: &PairMoments, modes: [f64; 2]) -> Self {
        Corrected {
            n1: m.mean[0] - 0.5 * modes[0],
            n2: m.mean[1] - 0.5 * modes[1],
            var_minus: m.var_diff() - 0.25 * (modes[0] + modes[1]),
        }
    }

    fn n_plus(&self) -> f64 {
        self.n1 + self.n2
    }
}

/// Delete-one jackknife standard error of a statistic given leave-one-out values.
pub fn jackknife_se(loo: &[f64]) -> f64 {
    let n = loo.len() as f64;
    let mean = loo.iter().sum::<f64>() / n;
    ((n - 1.0) / n * loo.iter().map(|v| (v - mean).powi(2)).sum::<f64>()).sqrt()
}

pub const MIN_JACKKNIFE: usize = 10;

/// Wigner → normal ordering: ⟨N⟩ = ⟨N_W⟩ − M/2, Var(N₋) = Var_W(N₋) − (M₁+M₂)/4.
pub fn ordering_correct(acc: &StatsAccumulator) -> Result<Measurement> {
    let n = acc.n_traj();
    if n < 2 || acc.total.w < 2.0 {
        return Err(Error::Numerical("at least two trajectories are needed".into()));
    }
    let mut diagnostics = Vec::new();
    let c = Corrected::from(&acc.total, acc.modes);
    let loo: Vec<Corrected> = if n >= 3 {
        acc.groups.iter().map(|g| Corrected::from(&acc.total.remove(g), acc.modes)).collect()
    } else {
        Vec::new()
    };
    if n < MIN_JACKKNIFE {
        diagnostics.push(format!("only {n} trajectories; jackknife errors unreliable below {MIN_JACKKNIFE}"));
    }
    let se = |f: &dyn Fn(&Corrected) -> f64| -> f64 {
        if loo.is_empty() {
            f64::NAN
        } else {
            jackknife_se(&loo.iter().map(f).collect::<Vec<_>>())
        }
    };
    let se_n_plus = se(&|c| c.n_plus());
    let (ratio, se_ratio) = if c.n_plus() > 3.0 * se_n_plus && c.n_plus() > 0.0 {
        (Some(c.var_minus / c.n_plus()), Some(se(&|c| c.var_minus / c.n_plus())))
    } else {
        diagnostics.push(format!(
            "shot noise ⟨N₊⟩ = {:.4e} ± {:.2e} is consistent with zero; ratio undefined",
            c.n_plus(),
            se_n_plus
        ));
        (None, None)
    };
    let m = Measurement {
        n_traj: n,
        n1: c.n1,
        n2: c.n2,
        n_plus: c.n_plus(),
        var_minus: c.var_minus,
        ratio,
        se_n1: se(&|c| c.n1),
        se_n2: se(&|c| c.n2),
        se_n_plus,
        se_var_minus: se(&|c| c.var_minus),
        se_ratio,
        diagnostics,
    };
    if !m.physical_within(3.0) {
        let mut m = m;
        m.diagnostics.push("ratio below −3 standard errors: unphysical, check grid resolution".into());
        return Ok(m);
    }
    Ok(m)
}

/// Detection with quantum efficiency η (Bernoulli thinning): means scale by η and
/// Var(N₋) → η²Var(N₋) + η(1−η)⟨N₊⟩.
pub fn apply_efficiency(m: &Measurement, eta: f64) -> Result<Measurement> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Detector(format!("quantum efficiency η = {eta} outside [0, 1]")));
    }
    let n_plus = eta * m.n_plus;
    let var_minus = eta * eta * m.var_minus + eta * (1.0 - eta) * m.n_plus;
    let mut diagnostics = m.diagnostics.clone();
    let (ratio, se_ratio) = if n_plus > 0.0 {
        let r = var_minus / n_plus;
        // ratio → η·r + (1 − η)
        (Some(r), m.se_ratio.map(|e| eta * e))
    } else {
        diagnostics.push("no detected photons; ratio undefined".into());
        (None, None)
    };
    Ok(Measurement {
        n_traj: m.n_traj,
        n1: eta * m.n1,
        n2: eta * m.n2,
        n_plus,
        var_minus,
        ratio,
        se_n1: eta * m.se_n1,
        se_n2: eta * m.se_n2,
        se_n_plus: eta * m.se_n_plus,
        se_var_minus: (eta * eta * m.se_var_minus).hypot(eta * (1.0 - eta) * m.se_n_plus),
        se_ratio,
        diagnostics,
    })
}

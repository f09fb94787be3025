use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
struct Sums {
    n: f64,
    a: Vec<Complex64>,
    /// Σ a_i* a_j
    g: Vec<Complex64>,
    /// Σ a_i a_j
    f: Vec<Complex64>,
    c: Vec<f64>,
    cc: Vec<f64>,
}

impl Sums {
    fn zeros(k: usize) -> Self {
        Sums {
            n: 0.0,
            a: vec![Complex64::default(); k],
            g: vec![Complex64::default(); k * k],
            f: vec![Complex64::default(); k * k],
            c: vec![0.0; k],
            cc: vec![0.0; k * k],
        }
    }

    fn add(&mut self, o: &Sums, sign: f64) {
        self.n += sign * o.n;
        self.a.iter_mut().zip(&o.a).for_each(|(x, y)| *x += sign * y);
        self.g.iter_mut().zip(&o.g).for_each(|(x, y)| *x += sign * y);
        self.f.iter_mut().zip(&o.f).for_each(|(x, y)| *x += sign * y);
        self.c.iter_mut().zip(&o.c).for_each(|(x, y)| *x += sign * y);
        self.cc.iter_mut().zip(&o.cc).for_each(|(x, y)| *x += sign * y);
    }
}

/// Compares fourth-order cell-count moments with the Gaussian combination of field
/// correlators, ⟨:δN_iδN_j:⟩ = |⟨a_i†a_j⟩|² + |⟨a_ia_j⟩|², on K distinct single-mode cells.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianCheck {
    k: usize,
    dv: f64,
    groups: Vec<Sums>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianReport {
    pub n_traj: usize,
    pub pairs: usize,
    /// Direct normally ordered count covariances.
    pub direct: Vec<f64>,
    /// Gaussian combination of second-order correlators.
    pub gaussian: Vec<f64>,
    /// (direct − gaussian)/σ for each pair i ≤ j.
    pub z: Vec<f64>,
    pub max_abs_z: f64,
}

impl GaussianCheck {
    pub fn new(k: usize, cell_volume: f64, n_groups: usize) -> Self {
        GaussianCheck { k, dv: cell_volume, groups: vec![Sums::zeros(k); n_groups.max(2)] }
    }

    pub fn push(&mut self, traj: u64, amps: &[Complex64]) {
        let k = self.k;
        assert_eq!(amps.len(), k);
        let ng = self.groups.len() as u64;
        let s = &mut self.groups[(traj % ng) as usize];
        s.n += 1.0;
        let cnt: Vec<f64> = amps.iter().map(|a| a.norm_sqr() * self.dv - 0.5).collect();
        for i in 0..k {
            s.a[i] += amps[i];
            s.c[i] += cnt[i];
            let ai = amps[i];
            for j in 0..k {
                s.g[i * k + j] += ai.conj() * amps[j];
                s.f[i * k + j] += ai * amps[j];
                s.cc[i * k + j] += cnt[i] * cnt[j];
            }
        }
    }

    fn estimate(&self, s: &Sums) -> (Vec<f64>, Vec<f64>) {
        let (k, n, dv) = (self.k, s.n, self.dv);
        let mut direct = Vec::new();
        let mut gauss = Vec::new();
        for i in 0..k {
            for j in i..k {
                let idx = i * k + j;
                let mi = s.c[i] / n;
                let cov = (s.cc[idx] - s.c[i] * s.c[j] / n) / (n - 1.0);
                direct.push(if i == j { cov - 0.25 - mi } else { cov });
                let ai = s.a[i] / n;
                let aj = s.a[j] / n;
                let mut g = (s.g[idx] / n - ai.conj() * aj) * dv;
                if i == j {
                    g -= 0.5;
                }
                let f = (s.f[idx] / n - ai * aj) * dv;
                gauss.push(g.norm_sqr() + f.norm_sqr());
            }
        }
        (direct, gauss)
    }

    pub fn finish(&self) -> Result<GaussianReport> {
        let mut total = Sums::zeros(self.k);
        for g in &self.groups {
            total.add(g, 1.0);
        }
        let used: Vec<&Sums> = self.groups.iter().filter(|g| g.n > 0.0).collect();
        if total.n < 4.0 || used.len() < 2 {
            return Err(Error::Numerical("Gaussian check needs more trajectories".into()));
        }
        let (direct, gaussian) = self.estimate(&total);
        let diff: Vec<f64> = direct.iter().zip(&gaussian).map(|(a, b)| a - b).collect();
        // delete-one-group jackknife
        let reps: Vec<Vec<f64>> = used
            .iter()
            .map(|g| {
                let mut t = total.clone();
                t.add(g, -1.0);
                let (d, q) = self.estimate(&t);
                d.iter().zip(&q).map(|(a, b)| a - b).collect()
            })
            .collect();
        let ng = reps.len() as f64;
        let z: Vec<f64> = (0..diff.len())
            .map(|p| {
                let m = reps.iter().map(|r| r[p]).sum::<f64>() / ng;
                let se = ((ng - 1.0) / ng * reps.iter().map(|r| (r[p] - m).powi(2)).sum::<f64>()).sqrt();
                diff[p] / se
            })
            .collect();
        let max_abs_z = z.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        Ok(GaussianReport { n_traj: total.n as usize, pairs: diff.len(), direct, gaussian, z, max_abs_z })
    }
}

use crate::model::CrystalParams;
use crate::output::Table;
use crate::pwpa::gain::gain_uv;
use crate::pwpa::quadrature::PixelCorrelationResult;

/// Gain table over a rectangular (q_y, Ω) lattice at q_x = 0.
pub fn gain_table(crystal: &CrystalParams, sigma_p: f64, q_values: &[f64], omega_values: &[f64]) -> Table {
    let mut t = Table::new(&["q_y", "omega", "abs_u1_sq", "abs_v1_sq", "delta_lc"]);
    for &q in q_values {
        for &w in omega_values {
            let g = gain_uv(0.0, q, w, crystal, sigma_p, crystal.l_c);
            t.push(vec![q, w, g.u1.norm_sqr(), g.v1.norm_sqr(), g.delta * crystal.l_c]);
        }
    }
    t
}

/// One row per labelled pixel-correlation result.
pub fn pixel_table(label_name: &str, rows: &[(f64, PixelCorrelationResult)]) -> Table {
    let mut t = Table::new(&[label_name, "self_var", "cross_cov", "shot", "ratio"]);
    for (x, r) in rows {
        t.push(vec![*x, r.self_var, r.cross_cov, r.shot, r.ratio]);
    }
    t
}

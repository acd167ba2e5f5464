//! Grid search behind the stress and contact constants.
//!
//! For each exposure model the search sweeps P(exposure | healthcare) >
//! P(exposure | ¬healthcare) on a 0.05 grid, unexposed covid19 rates on
//! 0.001..0.020 and exposed rates on 0.001..0.060 (exposed above unexposed in
//! both strata), and keeps the point closest to the tested-conditioned
//! targets. The contact search also requires a population risk ratio in
//! [1.8, 2.2]. Run with `--release`; it evaluates a few hundred million points.

use bncausal::models::{ExposureConstants, CONTACT_TARGETS, STRESS_TARGETS};

const P_H: f64 = 0.05;
// P(tested | h, c), P(tested | h, ¬c), P(tested | ¬h, c), P(tested | ¬h, ¬c)
const T: [f64; 4] = [0.99, 0.10, 0.15, 0.01];

/// P(covid19 | tested) within one exposure level, given the weight of each
/// healthcare stratum and the stratum covid19 rates.
fn tested_rate(w_h: f64, w_n: f64, c_h: f64, c_n: f64) -> f64 {
    let num = w_h * c_h * T[0] + w_n * c_n * T[2];
    let den = w_h * (c_h * T[0] + (1.0 - c_h) * T[1]) + w_n * (c_n * T[2] + (1.0 - c_n) * T[3]);
    num / den
}

fn search(targets: (f64, f64), ratio_bounds: Option<(f64, f64)>) -> (ExposureConstants, f64) {
    let grid: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
    let q: Vec<f64> = (1..=20).map(|i| i as f64 / 1000.0).collect();
    let r: Vec<f64> = (1..=60).map(|i| i as f64 / 1000.0).collect();
    let mut best: Option<(f64, ExposureConstants)> = None;
    for &a in &grid {
        for &b in grid.iter().filter(|&&b| b < a) {
            let p_e = P_H * a + (1.0 - P_H) * b;
            for &qh in &q {
                for &qn in &q {
                    let v0 = tested_rate(P_H * (1.0 - a), (1.0 - P_H) * (1.0 - b), qh, qn);
                    let p0 = (P_H * (1.0 - a) * qh + (1.0 - P_H) * (1.0 - b) * qn) / (1.0 - p_e);
                    for &rh in r.iter().filter(|&&x| x > qh) {
                        for &rn in r.iter().filter(|&&x| x > qn) {
                            if let Some((lo, hi)) = ratio_bounds {
                                let p1 = (P_H * a * rh + (1.0 - P_H) * b * rn) / p_e;
                                if !(lo..=hi).contains(&(p1 / p0)) {
                                    continue;
                                }
                            }
                            let v1 = tested_rate(P_H * a, (1.0 - P_H) * b, rh, rn);
                            let d = (v1 - targets.0).powi(2) + (v0 - targets.1).powi(2);
                            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                                best = Some((
                                    d,
                                    ExposureConstants {
                                        exposure_given_healthcare: a,
                                        exposure_given_not_healthcare: b,
                                        covid_unexposed: (qh, qn),
                                        covid_exposed: (rh, rn),
                                    },
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    let (d, c) = best.expect("grid is non-empty");
    (c, d)
}

fn main() {
    for (name, targets, ratio) in [
        ("stress", STRESS_TARGETS, None),
        ("contact", CONTACT_TARGETS, Some((1.8, 2.2))),
    ] {
        let (c, d) = search(targets, ratio);
        println!("{name}: {c:?} (squared distance {d:.3e})");
    }
}

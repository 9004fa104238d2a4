//! Adaptive Dormand–Prince 8(5,3) over complex state vectors.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const A: [[f64; 12]; 11] = [
    [
        0.05260015195876773,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.0197250569845379,
        0.0591751709536137,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.02958758547680685,
        0.0,
        0.08876275643042054,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.2413651341592667,
        0.0,
        -0.8845494793282861,
        0.924834003261792,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.037037037037037035,
        0.0,
        0.0,
        0.17082860872947386,
        0.12546768756682242,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.037109375,
        0.0,
        0.0,
        0.17025221101954405,
        0.06021653898045596,
        -0.017578125,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.03709200011850479,
        0.0,
        0.0,
        0.17038392571223998,
        0.10726203044637328,
        -0.015319437748624402,
        0.008273789163814023,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.6241109587160757,
        0.0,
        0.0,
        -3.3608926294469414,
        -0.868219346841726,
        27.59209969944671,
        20.154067550477894,
        -43.48988418106996,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.47766253643826434,
        0.0,
        0.0,
        -2.4881146199716677,
        -0.590290826836843,
        21.230051448181193,
        15.279233632882423,
        -33.28821096898486,
        -0.020331201708508627,
        0.0,
        0.0,
        0.0,
    ],
    [
        -0.9371424300859873,
        0.0,
        0.0,
        5.186372428844064,
        1.0914373489967295,
        -8.149787010746927,
        -18.52006565999696,
        22.739487099350505,
        2.4936055526796523,
        -3.0467644718982196,
        0.0,
        0.0,
    ],
    [
        2.273310147516538,
        0.0,
        0.0,
        -10.53449546673725,
        -2.0008720582248625,
        -17.9589318631188,
        27.94888452941996,
        -2.8589982771350235,
        -8.87285693353063,
        12.360567175794303,
        0.6433927460157636,
        0.0,
    ],
];
const C: [f64; 12] = [
    0.0,
    0.05260015195876773,
    0.0789002279381516,
    0.1183503419072274,
    0.2816496580927726,
    0.3333333333333333,
    0.25,
    0.3076923076923077,
    0.6512820512820513,
    0.6,
    0.8571428571428571,
    1.0,
];
const B: [f64; 12] = [
    0.054293734116568765,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    0.3111643669578199,
    -0.1521609496625161,
    0.20136540080403034,
    0.04471061572777259,
];
/// Third-order embedded weights on stages 1, 9 and 12.
const BHH: [f64; 3] = [0.2440944881889764, 0.7338466882816118, 0.022058823529411766];
/// Fifth-order error weights.
const E: [f64; 12] = [
    0.01312004499419488,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.2251564463762044,
    -0.4957589496572502,
    1.6643771824549864,
    -0.35032884874997366,
    0.3341791187130175,
    0.08192320648511571,
    -0.022355307863886294,
];

const STAGES: usize = 12;
const MAX_REJECTED: usize = 10_000_000;
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.333;
const FAC_MAX: f64 = 6.0;

#[derive(Debug, Clone)]
pub struct Dop853 {
    pub rtol: f64,
    pub atol: f64,
    /// Step carried between calls; zero means pick one.
    h: f64,
    pub steps: usize,
    pub rejected: usize,
    k: Vec<Vec<C64>>,
    tmp: Vec<C64>,
    y_new: Vec<C64>,
}

impl Dop853 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Dop853 {
            rtol,
            atol,
            h: 0.0,
            steps: 0,
            rejected: 0,
            k: Vec::new(),
            tmp: Vec::new(),
            y_new: Vec::new(),
        }
    }

    /// Advance `y` from `t0` to `t1` under y' = f(t, y). `f` must be smooth on
    /// the open interval; callers restart at discontinuities.
    #[allow(clippy::needless_range_loop)] // stages index k, y and tmp in step
    pub fn integrate<F>(&mut self, mut f: F, t0: f64, t1: f64, y: &mut [C64]) -> Result<()>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let n = y.len();
        let span = t1 - t0;
        if span <= 0.0 {
            return Ok(());
        }
        if self.k.len() != STAGES || self.k[0].len() != n {
            self.k = vec![vec![C64::new(0.0, 0.0); n]; STAGES];
            self.tmp = vec![C64::new(0.0, 0.0); n];
            self.y_new = vec![C64::new(0.0, 0.0); n];
        }
        f(t0, y, &mut self.k[0]);
        if self.h <= 0.0 {
            let ny = rms(y);
            let nf = rms(&self.k[0]);
            self.h = if nf > 0.0 { 0.01 * ny.max(self.atol) / nf } else { span };
        }
        let mut t = t0;
        let min_h = 1e-14 * t1.abs().max(1.0);
        let mut just_rejected = false;
        while t < t1 {
            let last = t + self.h >= t1;
            let h = if last { t1 - t } else { self.h };
            for s in 1..STAGES {
                for i in 0..n {
                    let mut acc = C64::new(0.0, 0.0);
                    for (j, a) in A[s - 1].iter().enumerate().take(s) {
                        if *a != 0.0 {
                            acc += self.k[j][i] * *a;
                        }
                    }
                    self.tmp[i] = y[i] + acc * h;
                }
                f(t + C[s] * h, &self.tmp, &mut self.k[s]);
            }
            let (mut err5, mut err3) = (0.0, 0.0);
            for i in 0..n {
                let (mut inc, mut e5) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
                for j in 0..STAGES {
                    if B[j] != 0.0 {
                        inc += self.k[j][i] * B[j];
                    }
                    if E[j] != 0.0 {
                        e5 += self.k[j][i] * E[j];
                    }
                }
                let e3 = inc - self.k[0][i] * BHH[0] - self.k[8][i] * BHH[1] - self.k[11][i] * BHH[2];
                self.y_new[i] = y[i] + inc * h;
                let sc = self.atol + self.rtol * y[i].norm().max(self.y_new[i].norm());
                err5 += (e5.norm() / sc).powi(2);
                err3 += (e3.norm() / sc).powi(2);
            }
            let mut deno = err5 + 0.01 * err3;
            if deno <= 0.0 {
                deno = 1.0;
            }
            let err = h.abs() * err5 * (1.0 / (deno * n as f64)).sqrt();
            let fac11 = err.powf(1.0 / 8.0);
            if err <= 1.0 {
                t = if last { t1 } else { t + h };
                y.copy_from_slice(&self.y_new);
                f(t, y, &mut self.k[0]);
                self.steps += 1;
                let mut fac = 1.0 / (fac11 / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                if just_rejected {
                    fac = fac.min(1.0);
                }
                just_rejected = false;
                if !last || fac < 1.0 {
                    self.h = h * fac;
                }
            } else {
                self.rejected += 1;
                just_rejected = true;
                let fac = if err.is_finite() {
                    1.0 / (fac11 / SAFETY).min(1.0 / FAC_MIN)
                } else {
                    0.1
                };
                self.h = h * fac;
                if self.h < min_h || self.rejected > MAX_REJECTED {
                    return Err(Error::Stiffness { t });
                }
            }
        }
        Ok(())
    }
}

fn rms(v: &[C64]) -> f64 {
    (v.iter().map(|z| z.norm_sqr()).sum::<f64>() / v.len().max(1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_rotation() {
        let mut ig = Dop853::new(1e-10, 1e-13);
        let mut y = vec![C64::new(1.0, 0.0)];
        ig.integrate(|_, y, dy| dy[0] = C64::new(0.0, -2.0) * y[0], 0.0, 10.0, &mut y)
            .unwrap();
        let exact = C64::from_polar(1.0, -20.0);
        assert!((y[0] - exact).norm() < 1e-8, "{}", (y[0] - exact).norm());
    }

    #[test]
    fn time_dependent_decay() {
        // y' = -t y  →  y = exp(-t²/2)
        let mut ig = Dop853::new(1e-10, 1e-14);
        let mut y = vec![C64::new(1.0, 0.0)];
        ig.integrate(|t, y, dy| dy[0] = y[0] * -t, 0.0, 3.0, &mut y).unwrap();
        assert!((y[0].re - (-4.5f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn split_interval_matches_single_call() {
        let rhs = |t: f64, y: &[C64], dy: &mut [C64]| dy[0] = C64::new(0.0, -(1.0 + t)) * y[0];
        let mut a = vec![C64::new(1.0, 0.0)];
        Dop853::new(1e-11, 1e-14).integrate(rhs, 0.0, 4.0, &mut a).unwrap();
        let mut b = vec![C64::new(1.0, 0.0)];
        let mut ig = Dop853::new(1e-11, 1e-14);
        ig.integrate(rhs, 0.0, 1.5, &mut b).unwrap();
        ig.integrate(rhs, 1.5, 4.0, &mut b).unwrap();
        let exact = C64::from_polar(1.0, -12.0);
        assert!((a[0] - exact).norm() < 1e-9 && (b[0] - exact).norm() < 1e-9);
    }

    #[test]
    fn blowup_reports_stiffness() {
        let mut ig = Dop853::new(1e-9, 1e-12);
        let mut y = vec![C64::new(1.0, 0.0)];
        let r = ig.integrate(|_, y, dy| dy[0] = y[0] * y[0] * y[0], 0.0, 1.0, &mut y);
        assert!(matches!(r, Err(Error::Stiffness { .. })));
    }
}

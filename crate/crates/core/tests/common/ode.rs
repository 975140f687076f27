//! Adaptive Dormand-Prince 5(4) for the biconfluent Heun equation written as
//! a first-order system in `(F, F')`.

use heunbound_core::HeunParams;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn rhs(p: &HeunParams, r: f64, y: [f64; 2]) -> [f64; 2] {
    let l = p.abs_l as f64;
    let drift = (2.0 * l + 1.0) / r - p.delta - 2.0 * r;
    let pot = p.spectral_excess() - (2.0 * p.coulomb() + p.delta * (2.0 * l + 1.0)) / (2.0 * r);
    [y[1], -drift * y[1] - pot * y[0]]
}

/// Series start `(F, F')` at small `r0` from `b₀, b₁, b₂`.
pub fn series_start(p: &HeunParams, r0: f64) -> [f64; 2] {
    let b = heunbound_core::series::coefficients(p, 3);
    [b[0] + b[1] * r0 + b[2] * r0 * r0, b[1] + 2.0 * b[2] * r0]
}

/// Integrates from `r0` to each of the ascending `targets`, returning `F`.
pub fn integrate(p: &HeunParams, r0: f64, y0: [f64; 2], targets: &[f64], rtol: f64, atol: f64) -> Vec<f64> {
    let mut r = r0;
    let mut y = y0;
    let mut h = r0 * 0.1;
    let mut out = Vec::with_capacity(targets.len());
    for &t in targets {
        while r < t {
            let step = h.min(t - r);
            let mut k = [[0.0; 2]; 7];
            for s in 0..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    ys[0] += step * A[s][j] * kj[0];
                    ys[1] += step * A[s][j] * kj[1];
                }
                k[s] = rhs(p, r + C[s] * step, ys);
            }
            let mut y5 = y;
            let mut err = 0.0f64;
            for i in 0..2 {
                let mut d5 = 0.0;
                let mut d4 = 0.0;
                for s in 0..7 {
                    d5 += B5[s] * k[s][i];
                    d4 += B4[s] * k[s][i];
                }
                y5[i] += step * d5;
                let sc = atol + rtol * y[i].abs().max(y5[i].abs());
                err = err.max((step * (d5 - d4)).abs() / sc);
            }
            if err <= 1.0 {
                r += step;
                y = y5;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = step * factor;
        }
        out.push(y[0]);
    }
    out
}

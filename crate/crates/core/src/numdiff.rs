//! Small numerical helpers shared by the oracles: extrapolated central
//! differences and least-squares slopes.

/// Derivative estimate together with its extrapolation error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Derivative {
    pub value: f64,
    pub error: f64,
}

/// Plain central difference `(f(x+h) - f(x-h)) / 2h`.
pub fn central<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Ridders' extrapolation of central differences.
///
/// Starts from step `h0` and shrinks it geometrically, building a Neville
/// tableau; returns the entry with the smallest error estimate. Accurate to
/// roughly 1e-12 relative for smooth functions when `h0` is a sizeable fraction
/// of the scale on which `f` varies.
pub fn ridders<F: Fn(f64) -> f64>(f: F, x: f64, h0: f64) -> Derivative {
    const SHRINK: f64 = 1.4;
    const SHRINK2: f64 = SHRINK * SHRINK;
    const TABLE: usize = 10;
    const SAFE: f64 = 2.0;

    let mut a = [[0.0f64; TABLE]; TABLE];
    let mut h = h0;
    a[0][0] = central(&f, x, h);
    let mut best = Derivative {
        value: a[0][0],
        error: f64::INFINITY,
    };
    for i in 1..TABLE {
        h /= SHRINK;
        a[0][i] = central(&f, x, h);
        let mut fac = SHRINK2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= SHRINK2;
            let err = (a[j][i] - a[j - 1][i])
                .abs()
                .max((a[j][i] - a[j - 1][i - 1]).abs());
            if err <= best.error {
                best = Derivative {
                    value: a[j][i],
                    error: err,
                };
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= SAFE * best.error {
            break;
        }
    }
    best
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Relative deviation `|a - b| / max(|b|, floor)`.
pub fn rel_dev(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}

use crate::error::{Error, Result};
use crate::special::{gamma, rgamma};

use super::{NodalDerivative, TimeGrid, TimeSignal};

/// `(a+h)^p − a^p` without cancellation for `h ≪ a`.
pub(crate) fn pow_diff(a: f64, h: f64, p: f64) -> f64 {
    if a == 0.0 {
        h.powf(p)
    } else {
        a.powf(p) * (p * (h / a).ln_1p()).exp_m1()
    }
}

// Below this ratio h/a the moments are summed as a binomial series.
const SERIES_RATIO: f64 = 0.25;

/// Moments `∫₀¹ θ (a+hθ)^{β−1} dθ` and `∫₀¹ (1−θ)(a+hθ)^{β−1} dθ`.
pub(crate) fn linear_moments(a: f64, h: f64, beta: f64) -> (f64, f64) {
    if a == 0.0 {
        let hb = h.powf(beta - 1.0);
        return (hb / (beta + 1.0), hb / (beta * (beta + 1.0)));
    }
    let r = h / a;
    if r <= SERIES_RATIO {
        let mut c = 1.0;
        let mut rm = 1.0;
        let (mut m1, mut m2) = (0.0, 0.0);
        for m in 0..60 {
            let mf = m as f64;
            let t = c * rm / (mf + 2.0);
            m1 += t;
            m2 += t / (mf + 1.0);
            if t.abs() < 1e-17 * m1.abs() {
                break;
            }
            c *= (beta - 1.0 - mf) / (mf + 1.0);
            rm *= r;
        }
        let ab = a.powf(beta - 1.0);
        return (ab * m1, ab * m2);
    }
    let b = a + h;
    let d0 = pow_diff(a, h, beta) / beta;
    let d1 = pow_diff(a, h, beta + 1.0) / (beta + 1.0);
    let h2 = h * h;
    ((d1 - a * d0) / h2, (b * d0 - d1) / h2)
}

/// Product-integration weights `c_{k,0..=k}` with
/// `(J^β f)(t_k) ≈ Σ_j c_{k,j} f_j` for piecewise linear `f`.
pub fn rl_weights(beta: f64, grid: &TimeGrid, k: usize) -> Result<Vec<f64>> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("fractional integral order {beta} must be positive")));
    }
    if k > grid.n() {
        return Err(Error::IndexOutOfRange { index: k, max: grid.n() });
    }
    let mut w = vec![0.0; k + 1];
    rl_row(beta, rgamma(beta), grid.nodes(), k, &mut w);
    Ok(w)
}

fn rl_row(beta: f64, rg: f64, t: &[f64], k: usize, w: &mut [f64]) {
    w.iter_mut().for_each(|x| *x = 0.0);
    for j in 0..k {
        let h = t[j + 1] - t[j];
        let a = t[k] - t[j + 1];
        let (m1, m2) = linear_moments(a, h, beta);
        // With t_k − s = a + hθ, the hat function of f_j is θ and that of
        // f_{j+1} is 1 − θ; ds = h dθ and the 1/h of the hats leave h·moment.
        w[j] += h * m1 * rg;
        w[j + 1] += h * m2 * rg;
    }
}

/// Riemann-Liouville integral `J^β f` at every node by product integration
/// with the piecewise linear interpolant of `f`; exact for such `f`.
pub fn rl_integral(f: &TimeSignal, beta: f64) -> Result<TimeSignal> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("fractional integral order {beta} must be positive")));
    }
    let grid = f.grid();
    let t = grid.nodes();
    let rg = rgamma(beta);
    let fv = f.values();
    let mut out = vec![0.0; grid.n() + 1];
    let mut w = vec![0.0; grid.n() + 1];
    for k in 1..=grid.n() {
        rl_row(beta, rg, t, k, &mut w[..=k]);
        out[k] = w[..=k].iter().zip(fv).map(|(a, b)| a * b).sum();
    }
    TimeSignal::new(grid.clone(), out)
}

fn check_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("Caputo order {alpha} not in (0, 1)")))
    }
}

/// L1 weights for one grid, evaluated row by row.
///
/// On uniform grids the rows are slices of one Toeplitz sequence that is
/// tabulated once.
#[derive(Debug, Clone)]
pub struct L1Weights {
    alpha: f64,
    grid: TimeGrid,
    scale: f64,
    toeplitz: Option<Vec<f64>>,
}

impl L1Weights {
    pub fn new(alpha: f64, grid: &TimeGrid) -> Result<Self> {
        check_order(alpha)?;
        let scale = rgamma(2.0 - alpha);
        let toeplitz = grid.is_uniform().then(|| {
            let tau = grid.t_final() / grid.n() as f64;
            let c = tau.powf(-alpha) * scale;
            (0..grid.n()).map(|m| c * pow_diff(m as f64, 1.0, 1.0 - alpha)).collect()
        });
        Ok(Self { alpha, grid: grid.clone(), scale, toeplitz })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Writes `w_{k,0..k}` into `out` (resized to `k`).
    pub fn row_into(&self, k: usize, out: &mut Vec<f64>) -> Result<()> {
        let n = self.grid.n();
        if k == 0 || k > n {
            return Err(Error::IndexOutOfRange { index: k, max: n });
        }
        out.clear();
        match &self.toeplitz {
            Some(b) => out.extend((0..k).map(|j| b[k - 1 - j])),
            None => {
                let t = self.grid.nodes();
                let p = 1.0 - self.alpha;
                out.extend((0..k).map(|j| {
                    let h = t[j + 1] - t[j];
                    pow_diff(t[k] - t[j + 1], h, p) * self.scale / h
                }));
            }
        }
        Ok(())
    }

    pub fn row(&self, k: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(k);
        self.row_into(k, &mut out)?;
        Ok(out)
    }
}

/// Weights `w_{k,j}`, `j = 0..k−1`, with `d_t^α y(t_k) ≈ Σ_j w_{k,j}(y_{j+1} − y_j)`.
pub fn l1_weights(alpha: f64, grid: &TimeGrid, k: usize) -> Result<Vec<f64>> {
    L1Weights::new(alpha, grid)?.row(k)
}

/// L1 approximation of the Caputo derivative at `t₁ … t_N`.
pub fn caputo_l1(y: &TimeSignal, alpha: f64) -> Result<NodalDerivative> {
    let weights = L1Weights::new(alpha, y.grid())?;
    let n = y.grid().n();
    let diffs: Vec<f64> = y.values().windows(2).map(|w| w[1] - w[0]).collect();
    let mut row = Vec::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        weights.row_into(k, &mut row)?;
        out.push(row.iter().zip(&diffs).map(|(w, d)| w * d).sum());
    }
    Ok(NodalDerivative::new(y.grid().clone(), out))
}

/// `max_{k≥1} |d_t^α (J^α f)(t_k) − f(t_k)|`.
pub fn check_inverse(f: &TimeSignal, alpha: f64) -> Result<f64> {
    check_order(alpha)?;
    let g = rl_integral(f, alpha)?;
    let d = caputo_l1(&g, alpha)?;
    Ok(d.interior().iter().zip(&f.values()[1..]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// `Γ(β+1)/Γ(α+β+1) t^{α+β}`, the exact `J^α` of `t^β`.
pub fn rl_of_power(alpha: f64, beta: f64, t: f64) -> f64 {
    gamma(beta + 1.0) * rgamma(alpha + beta + 1.0) * t.powf(alpha + beta)
}

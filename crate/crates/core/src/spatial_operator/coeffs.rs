use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::SpaceGrid;

/// A scalar coefficient as a function of node, position and time.
///
/// Positions are `[x, y]` (`y` is ignored in 1D); vectors such as `gradient`
/// may have one or two entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Profile {
    Constant {
        value: f64,
    },
    /// `value + gradient·x + rate·t`
    Affine {
        value: f64,
        #[serde(default)]
        gradient: Vec<f64>,
        #[serde(default)]
        rate: f64,
    },
    /// `base + amplitude·exp(−|x − center|²/width²)`
    Bump {
        base: f64,
        amplitude: f64,
        center: Vec<f64>,
        width: f64,
    },
    /// `base + amplitude·cos(wavenumber·x + phase)`
    Cosine {
        base: f64,
        amplitude: f64,
        wavenumber: Vec<f64>,
        #[serde(default)]
        phase: f64,
    },
    /// `scale·t^exponent`, uniform in space.
    TimePower {
        scale: f64,
        exponent: f64,
    },
    /// One value per grid node, constant in time.
    Tabulated {
        values: Vec<f64>,
    },
    Sum {
        terms: Vec<Profile>,
    },
    Product {
        factors: Vec<Profile>,
    },
}

fn dot(v: &[f64], x: [f64; 2]) -> f64 {
    v.iter().zip(x).map(|(a, b)| a * b).sum()
}

impl Profile {
    pub fn constant(value: f64) -> Self {
        Profile::Constant { value }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// Value at node `p` located at `x`.
    pub fn eval(&self, p: usize, x: [f64; 2], t: f64) -> f64 {
        match self {
            Profile::Constant { value } => *value,
            Profile::Affine { value, gradient, rate } => value + dot(gradient, x) + rate * t,
            Profile::Bump { base, amplitude, center, width } => {
                let r2: f64 = center.iter().zip(x).map(|(c, xi)| (xi - c).powi(2)).sum();
                base + amplitude * (-r2 / (width * width)).exp()
            }
            Profile::Cosine { base, amplitude, wavenumber, phase } => {
                base + amplitude * (dot(wavenumber, x) + phase).cos()
            }
            Profile::TimePower { scale, exponent } => scale * t.powf(*exponent),
            Profile::Tabulated { values } => values.get(p).copied().unwrap_or(f64::NAN),
            Profile::Sum { terms } => terms.iter().map(|q| q.eval(p, x, t)).sum(),
            Profile::Product { factors } => factors.iter().map(|q| q.eval(p, x, t)).product(),
        }
    }

    fn is_tabulated(&self) -> bool {
        match self {
            Profile::Tabulated { .. } => true,
            Profile::Sum { terms } => terms.iter().any(Profile::is_tabulated),
            Profile::Product { factors } => factors.iter().any(Profile::is_tabulated),
            _ => false,
        }
    }

    /// Value on the face between nodes `p` and `q`: the midpoint value, or
    /// the mean of the two node values for tabulated data.
    pub fn at_face(&self, grid: &SpaceGrid, p: usize, q: usize, t: f64) -> f64 {
        let (xp, xq) = (grid.point(p), grid.point(q));
        if self.is_tabulated() {
            0.5 * (self.eval(p, xp, t) + self.eval(q, xq, t))
        } else {
            self.eval(p, [0.5 * (xp[0] + xq[0]), 0.5 * (xp[1] + xq[1])], t)
        }
    }

    pub fn sample(&self, grid: &SpaceGrid, t: f64) -> Vec<f64> {
        (0..grid.len()).map(|p| self.eval(p, grid.point(p), t)).collect()
    }

    fn check_table(&self, n: usize) -> Result<()> {
        match self {
            Profile::Tabulated { values } if values.len() != n => {
                Err(Error::GridMismatch(format!("tabulated profile has {} values for {n} nodes", values.len())))
            }
            Profile::Sum { terms: v } | Profile::Product { factors: v } => v.iter().try_for_each(|q| q.check_table(n)),
            _ => Ok(()),
        }
    }
}

/// Coefficients of `−∇·(a∇u) − b·∇u − cu` with the Robin closure
/// `∂_{ν_A}u + σu = 0`, the shift `c0` of the self-adjoint part
/// `A0 = −∇·(a∇·) + c0` and the zeroth-order coefficient `b0` of
/// `A1 = −∇·(a∇·) − b·∇ + b0`.
///
/// The conductivity is diagonal, one profile per axis (a scalar in 1D), and
/// is evaluated at `t = 0`; `σ` is likewise time independent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub conductivity: Vec<Profile>,
    pub drift: Vec<Profile>,
    pub reaction: Profile,
    pub c0: f64,
    pub b0: Profile,
    pub sigma: Profile,
}

impl CoefficientSet {
    /// `a = 1`, `b = 0`, `c = 0`, `c0 = 0`, `b0 = 1`, `σ = 0`.
    pub fn laplacian(dim: usize) -> Self {
        Self {
            conductivity: vec![Profile::constant(1.0); dim],
            drift: vec![Profile::zero(); dim],
            reaction: Profile::zero(),
            c0: 0.0,
            b0: Profile::constant(1.0),
            sigma: Profile::zero(),
        }
    }

    pub fn with_conductivity(mut self, a: Profile) -> Self {
        self.conductivity.iter_mut().for_each(|p| *p = a.clone());
        self
    }

    pub fn with_drift(mut self, b: Vec<Profile>) -> Self {
        self.drift = b;
        self
    }

    pub fn with_reaction(mut self, c: Profile) -> Self {
        self.reaction = c;
        self
    }

    pub fn with_c0(mut self, c0: f64) -> Self {
        self.c0 = c0;
        self
    }

    pub fn with_b0(mut self, b0: Profile) -> Self {
        self.b0 = b0;
        self
    }

    pub fn with_sigma(mut self, sigma: Profile) -> Self {
        self.sigma = sigma;
        self
    }

    /// `σ` at every node (only boundary values are used).
    pub fn sigma_values(&self, grid: &SpaceGrid) -> Vec<f64> {
        self.sigma.sample(grid, 0.0)
    }

    /// Smallest conductivity over all faces of the grid (the discrete
    /// ellipticity constant).
    pub fn kappa(&self, grid: &SpaceGrid) -> f64 {
        let mut kappa = f64::INFINITY;
        for p in 0..grid.len() {
            let idx = grid.index(p);
            for (d, ax) in grid.axes().iter().enumerate() {
                if idx[d] + 1 < ax.nodes {
                    let mut j = idx;
                    j[d] += 1;
                    kappa = kappa.min(self.conductivity[d].at_face(grid, p, grid.flat(j), 0.0));
                }
            }
        }
        kappa
    }

    /// Shape, ellipticity and sign checks shared by every variant.
    pub fn validate(&self, grid: &SpaceGrid) -> Result<()> {
        if self.conductivity.len() != grid.dim() || self.drift.len() != grid.dim() {
            return Err(Error::Coefficients(format!(
                "need {} conductivity and drift profiles, got {} and {}",
                grid.dim(),
                self.conductivity.len(),
                self.drift.len()
            )));
        }
        let n = grid.len();
        for q in self.conductivity.iter().chain(&self.drift).chain([&self.reaction, &self.b0, &self.sigma]) {
            q.check_table(n)?;
        }
        if !(self.c0 >= 0.0 && self.c0.is_finite()) {
            return Err(Error::Coefficients(format!("c0 = {} must be finite and >= 0", self.c0)));
        }
        let kappa = self.kappa(grid);
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::Coefficients(format!("ellipticity violated: min conductivity {kappa}")));
        }
        let sigma = self.sigma_values(grid);
        for p in (0..n).filter(|&p| grid.is_boundary(p)) {
            if !(sigma[p] >= 0.0 && sigma[p].is_finite()) {
                return Err(Error::Coefficients(format!("sigma = {} < 0 at boundary node {p}", sigma[p])));
            }
        }
        Ok(())
    }

    pub fn validate_b0(&self, grid: &SpaceGrid, t: f64) -> Result<()> {
        let b0 = self.b0.sample(grid, t);
        match b0.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
            Some(p) => Err(Error::Coefficients(format!("b0 = {} <= 0 at node {p}, t = {t}", b0[p]))),
            None => Ok(()),
        }
    }
}

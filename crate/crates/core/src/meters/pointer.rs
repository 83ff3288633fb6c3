use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::linalg::{Hermitian, Operator, StateVector, Unitary, C64};
use crate::pps::{joint_evolve_and_postselect, weak_value, PrePostSelection};

/// Largest `system_dim × grid_size` the pointer experiment will evolve densely.
pub const DEFAULT_DIMENSION_CAP: usize = 1 << 12;

/// Uniform periodic grid `x_j = x_min + j·Δx`, `Δx = (x_max − x_min)/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerGrid {
    size: usize,
    x_min: f64,
    x_max: f64,
}

impl PointerGrid {
    pub fn new(size: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if size < 2 || !size.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("grid size {size} is not a power of two >= 2")));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidParameter(format!("grid extent [{x_min}, {x_max}] is empty")));
        }
        Ok(Self { size, x_min, x_max })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn spacing(&self) -> f64 {
        self.length() / self.size as f64
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.size).map(|j| self.x_min + j as f64 * self.spacing()).collect()
    }

    /// Momentum lattice `2πm/L` in FFT order (`m = 0, 1, …, N/2−1, −N/2, …, −1`).
    pub fn momenta(&self) -> Vec<f64> {
        let n = self.size as i64;
        (0..n)
            .map(|k| {
                let m = if k < n / 2 { k } else { k - n };
                TAU * m as f64 / self.length()
            })
            .collect()
    }

    fn fft(&self, data: &mut [C64], inverse: bool) {
        let mut planner = FftPlanner::<f64>::new();
        let plan = if inverse {
            planner.plan_fft_inverse(self.size)
        } else {
            planner.plan_fft_forward(self.size)
        };
        plan.process(data);
    }

    /// `F†·diag(f(p_m))·F·v` with `F` the unitary discrete Fourier transform.
    pub fn apply_momentum_function(&self, f: impl Fn(f64) -> C64, v: &StateVector) -> Result<StateVector> {
        self.check(v)?;
        let mut buf = v.amplitudes().to_vec();
        self.fft(&mut buf, false);
        for (x, p) in buf.iter_mut().zip(self.momenta()) {
            *x *= f(p);
        }
        self.fft(&mut buf, true);
        let n = self.size as f64;
        StateVector::new(buf.into_iter().map(|x| x / n).collect())
    }

    /// Dense circulant matrix of `F†·diag(f(p_m))·F`.
    fn momentum_function_matrix(&self, f: impl Fn(f64) -> C64) -> DMatrix<C64> {
        let n = self.size;
        let mut kernel: Vec<C64> = self.momenta().into_iter().map(f).collect();
        self.fft(&mut kernel, true);
        let scale = 1.0 / n as f64;
        DMatrix::from_fn(n, n, |j, l| kernel[(j + n - l) % n] * scale)
    }

    fn check(&self, v: &StateVector) -> Result<()> {
        if v.dim() != self.size {
            return Err(Error::DimensionMismatch {
                context: "pointer grid",
                expected: self.size,
                found: v.dim(),
            });
        }
        Ok(())
    }
}

/// Gaussian wavepacket `Φ(x) ∝ exp(−(x − x0)²/(4σ²))` sampled on a grid.
///
/// Amplitudes are stored as `Φ(x_j)·√Δx`, so the Euclidean norm equals the
/// grid norm `Σ|Φ(x_j)|²Δx`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPointer {
    grid: PointerGrid,
    sigma: f64,
    x0: f64,
    amplitudes: StateVector,
}

impl GaussianPointer {
    pub fn build(grid_size: usize, x_min: f64, x_max: f64, sigma: f64, x0: f64) -> Result<Self> {
        let grid = PointerGrid::new(grid_size, x_min, x_max)?;
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("pointer width {sigma} must be positive")));
        }
        if sigma < 4.0 * grid.spacing() {
            return Err(Error::Aliasing(format!(
                "sigma {sigma} is below four grid spacings ({})",
                4.0 * grid.spacing()
            )));
        }
        if x0 - 6.0 * sigma < x_min || x0 + 6.0 * sigma > x_max {
            return Err(Error::Aliasing(format!(
                "packet support [{}, {}] leaves the grid [{x_min}, {x_max}]",
                x0 - 6.0 * sigma,
                x0 + 6.0 * sigma
            )));
        }
        let samples: Vec<C64> = grid
            .positions()
            .iter()
            .map(|x| C64::new((-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp(), 0.0))
            .collect();
        let amplitudes = StateVector::new(samples)?.unit()?;
        Ok(Self {
            grid,
            sigma,
            x0,
            amplitudes,
        })
    }

    /// 512 points on `[−12σ, 12σ]` with `σ = 1`, centred at the origin.
    pub fn standard() -> Self {
        Self::build(512, -12.0, 12.0, 1.0, 0.0).expect("default pointer is valid")
    }

    pub fn grid(&self) -> &PointerGrid {
        &self.grid
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn state(&self) -> &StateVector {
        &self.amplitudes
    }

    /// Wavefunction values `Φ(x_j)`.
    pub fn wavefunction(&self) -> Vec<C64> {
        let s = self.grid.spacing().sqrt();
        self.amplitudes.amplitudes().iter().map(|a| a / s).collect()
    }
}

/// Spectral momentum operator `P = F†·diag(p_m)·F` on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumOperator {
    grid: PointerGrid,
    matrix: Hermitian,
}

impl MomentumOperator {
    pub fn new(grid: PointerGrid) -> Self {
        let m = grid.momentum_function_matrix(|p| C64::new(p, 0.0));
        let matrix = Hermitian::symmetrized(&Operator::new(m).expect("grid is non-empty"));
        Self { grid, matrix }
    }

    pub fn grid(&self) -> &PointerGrid {
        &self.grid
    }

    pub fn operator(&self) -> &Hermitian {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.grid.momenta()
    }

    /// `exp(−i·c·P)`, which translates a packet by `+c`.
    pub fn translation(&self, c: f64) -> Unitary {
        let m = self.grid.momentum_function_matrix(|p| C64::new(0.0, -c * p).exp());
        Unitary::trusted(Operator::new(m).expect("grid is non-empty"))
    }

    /// `exp(scale·P)|v⟩` for any complex `scale`.
    pub fn exp_apply(&self, scale: C64, v: &StateVector) -> Result<StateVector> {
        self.grid.apply_momentum_function(|p| (scale * p).exp(), v)
    }
}

/// `exp(−i·g·A⊗P) = Σ_j |a_j⟩⟨a_j| ⊗ exp(−i·g·a_j·P)`.
pub fn pointer_coupling_unitary(a: &Operator, g: f64, momentum: &MomentumOperator) -> Result<Unitary> {
    let spec = Hermitian::new(a.clone())?.eigen()?;
    let sys = a.dim();
    let n = momentum.grid().size();
    let mut joint = Operator::zeros(sys * n);
    for (j, &lambda) in spec.eigenvalues().iter().enumerate() {
        let v = spec.eigenvector(j);
        let proj = Operator::outer(&v, &v)?;
        joint = joint.checked_add(&proj.kron(&momentum.translation(g * lambda)))?;
    }
    Ok(Unitary::trusted(joint))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerStatistics {
    pub mean_x: f64,
    pub var_x: f64,
    pub mean_p: f64,
    pub var_p: f64,
}

/// Grid-quadrature moments of a pointer state (rescaled to unit norm).
pub fn pointer_statistics(grid: &PointerGrid, state: &StateVector) -> Result<PointerStatistics> {
    grid.check(state)?;
    let u = state.unit()?;
    let probs: Vec<f64> = u.amplitudes().iter().map(|a| a.norm_sqr()).collect();
    let xs = grid.positions();
    let mean_x: f64 = probs.iter().zip(&xs).map(|(w, x)| w * x).sum();
    let var_x: f64 = probs.iter().zip(&xs).map(|(w, x)| w * (x - mean_x).powi(2)).sum();

    let mut spectrum = u.amplitudes().to_vec();
    grid.fft(&mut spectrum, false);
    let n = grid.size() as f64;
    let pw: Vec<f64> = spectrum.iter().map(|a| a.norm_sqr() / n).collect();
    let ps = grid.momenta();
    let mean_p: f64 = pw.iter().zip(&ps).map(|(w, p)| w * p).sum();
    let var_p: f64 = pw.iter().zip(&ps).map(|(w, p)| w * (p - mean_p).powi(2)).sum();
    Ok(PointerStatistics {
        mean_x,
        var_x,
        mean_p,
        var_p,
    })
}

/// Exact post-selected pointer compared with `exp(−i·g·A_w·P)|Φ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerShiftReport {
    pub g: f64,
    pub weak_value: C64,
    pub probability: f64,
    /// Mean position of the exact post-selected pointer minus `x0`.
    pub mean_shift: f64,
    /// `g·Re A_w`.
    pub predicted_shift: f64,
    pub momentum_shift: f64,
    /// `2·g·Im A_w·Var(p)` of the initial pointer.
    pub predicted_momentum_shift: f64,
    /// `|⟨exact|weak-limit⟩|` of the normalized states.
    pub fidelity: f64,
    pub exact_state: StateVector,
    pub weak_limit_state: StateVector,
}

impl PointerShiftReport {
    /// `√(1 − fidelity²)`, the trace distance between the two pure states.
    pub fn trace_distance(&self) -> f64 {
        (1.0 - self.fidelity.powi(2)).max(0.0).sqrt()
    }
}

pub fn pointer_shift_experiment(
    a: &Operator,
    sel: &PrePostSelection,
    g: f64,
    pointer: &GaussianPointer,
    dimension_cap: usize,
) -> Result<PointerShiftReport> {
    let grid = *pointer.grid();
    let joint_dim = a.dim() * grid.size();
    if joint_dim > dimension_cap {
        return Err(Error::DimensionCap {
            dim: joint_dim,
            cap: dimension_cap,
        });
    }
    let momentum = MomentumOperator::new(grid);
    let u = pointer_coupling_unitary(a, g, &momentum)?;
    let meter = pointer.state();
    let oracle = joint_evolve_and_postselect(&u, sel.psi(), meter, sel.phi())?;
    let exact_state = oracle.state.normalized()?;

    let aw = weak_value(a, sel)?;
    let weak_limit_state = momentum.exp_apply(C64::new(0.0, -g) * aw, meter)?.normalized()?;

    let before = pointer_statistics(&grid, meter)?;
    let after = pointer_statistics(&grid, &exact_state)?;
    Ok(PointerShiftReport {
        g,
        weak_value: aw,
        probability: oracle.probability,
        mean_shift: after.mean_x - before.mean_x,
        predicted_shift: g * aw.re,
        momentum_shift: after.mean_p - before.mean_p,
        predicted_momentum_shift: 2.0 * g * aw.im * before.var_p,
        fidelity: exact_state.inner(&weak_limit_state)?.norm(),
        exact_state,
        weak_limit_state,
    })
}

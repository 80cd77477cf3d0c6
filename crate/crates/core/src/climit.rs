//! Classical-limit model: the complex Gaussian conditional with imaginary
//! variance `V_q`, its coarse graining by a real Gaussian of width `σ`, and
//! the discrete law tying `Im ρ(a,b)` to the mixed derivative of `Re ρ(a,b)`.

use crate::error::{ensure_dim, KdError, Result};
use crate::hilbert::{dot, norm_sqr, Basis, DensityOperator, Operator, StateVector};
use crate::kd::KdDistribution;
use crate::scalar::{is_finite, Complex, Real};

/// Kernel half-width of the numerical convolution, in units of `σ`.
pub const KERNEL_HALF_WIDTH: f64 = 8.0;

/// Symmetric uniform grid `center + k·step`, `k = −n..=n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid<T: Real> {
    center: T,
    step: T,
    half_points: usize,
}

impl<T: Real> UniformGrid<T> {
    /// Smallest symmetric grid with the given step covering `±half_span`.
    pub fn centered(center: T, half_span: T, step: T) -> Result<Self> {
        let ok = step > T::zero() && step.is_finite() && half_span >= T::zero() && half_span.is_finite();
        if !ok {
            return Err(KdError::InvalidParameter(format!(
                "grid needs positive finite step and span (step {step}, half-span {half_span})"
            )));
        }
        let n = (half_span / step).ceil().to_usize().ok_or_else(|| {
            KdError::InvalidParameter("grid too large".into())
        })?;
        Ok(Self {
            center,
            step,
            half_points: n,
        })
    }

    pub fn center(&self) -> T {
        self.center
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn len(&self) -> usize {
        2 * self.half_points + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn half_span(&self) -> T {
        self.step * T::from_usize(self.half_points).unwrap()
    }

    pub fn min(&self) -> T {
        self.center - self.half_span()
    }

    pub fn max(&self) -> T {
        self.center + self.half_span()
    }

    pub fn point(&self, i: usize) -> T {
        let k = T::from_usize(i).unwrap() - T::from_usize(self.half_points).unwrap();
        self.center + k * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Same centre and step, `extra` more points on each side.
    fn widened(&self, extra: usize) -> Self {
        Self {
            half_points: self.half_points + extra,
            ..*self
        }
    }

    fn narrowed(&self, fewer: usize) -> Option<Self> {
        (self.half_points >= fewer).then(|| Self {
            half_points: self.half_points - fewer,
            ..*self
        })
    }
}

/// Local Gaussian model of `p(c|a,b)`: imaginary variance, the extremal value
/// `f_c(a,b)` and the gradients of `f_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianModel<T: Real> {
    pub vq: T,
    pub fc0: T,
    pub dfda: T,
    pub dfdb: T,
}

impl<T: Real> GaussianModel<T> {
    pub fn new(vq: T, fc0: T, dfda: T, dfdb: T) -> Result<Self> {
        if vq.is_nan() || vq <= T::zero() || vq.is_infinite() {
            return Err(KdError::InvalidParameter(format!("imaginary variance must be positive, got {vq}")));
        }
        if !fc0.is_finite() || !dfda.is_finite() || !dfdb.is_finite() {
            return Err(KdError::NonFinite);
        }
        Ok(Self { vq, fc0, dfda, dfdb })
    }

    /// Model centred at `fc0` with unit gradients.
    pub fn centered(vq: T, fc0: T) -> Result<Self> {
        Self::new(vq, fc0, T::one(), T::one())
    }

    /// `V_q` and gradients from an `(a, b, c)` state triple.
    pub fn from_states(a: &StateVector<T>, b: &StateVector<T>, c: &StateVector<T>, fc0: T) -> Result<Self> {
        let vq = imaginary_variance(a, b, c)?;
        let (dfda, dfdb) = fc_gradients(a, b, c)?;
        Self::new(vq, fc0, dfda, dfdb)
    }
}

/// Complex samples over a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexCurve<T: Real> {
    pub grid: UniformGrid<T>,
    pub samples: Vec<Complex<T>>,
}

impl<T: Real> ComplexCurve<T> {
    pub fn new(grid: UniformGrid<T>, samples: Vec<Complex<T>>) -> Result<Self> {
        ensure_dim(grid.len(), samples.len())?;
        if !samples.iter().all(is_finite) {
            return Err(KdError::NonFinite);
        }
        Ok(Self { grid, samples })
    }

    /// Rectangle-rule integral `Σ p(c)·step`.
    pub fn integral(&self) -> Complex<T> {
        self.samples.iter().fold(Complex::new(T::zero(), T::zero()), |s, z| s + z) * self.grid.step()
    }

    pub fn max_abs_re(&self) -> T {
        self.samples.iter().map(|z| z.re.abs()).fold(T::zero(), T::max)
    }

    pub fn max_abs_im(&self) -> T {
        self.samples.iter().map(|z| z.im.abs()).fold(T::zero(), T::max)
    }

    /// Max modulus difference; both curves must share the grid.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        ensure_dim(self.samples.len(), other.samples.len())?;
        let tol = self.grid.step() * T::lit(1e-6);
        if (self.grid.min() - other.grid.min()).abs() > tol || (self.grid.step() - other.grid.step()).abs() > tol {
            return Err(KdError::InvalidParameter("curves are sampled on different grids".into()));
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(x, y)| (x - y).norm())
            .fold(T::zero(), T::max))
    }
}

/// Output grid for coarse graining at resolution `σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoarseGrainSpec<T: Real> {
    pub sigma: T,
    pub grid: UniformGrid<T>,
}

impl<T: Real> CoarseGrainSpec<T> {
    /// Checks `step < σ/4` and a span of at least `±6·max(σ, √V_q)` around
    /// `fc0`.
    pub fn new(model: &GaussianModel<T>, sigma: T, grid: UniformGrid<T>) -> Result<Self> {
        check_sigma(sigma)?;
        if grid.step() >= sigma / T::lit(4.0) {
            return Err(KdError::GridTooCoarse(format!(
                "step {} must be below sigma/4 = {}",
                grid.step(),
                sigma / T::lit(4.0)
            )));
        }
        let need = T::lit(6.0) * sigma.max(model.vq.sqrt());
        if grid.min() > model.fc0 - need || grid.max() < model.fc0 + need {
            return Err(KdError::GridTooCoarse(format!(
                "grid [{}, {}] must cover fc0 ± {need}",
                grid.min(),
                grid.max()
            )));
        }
        Ok(Self { sigma, grid })
    }

    /// Default grid: half-span `8·max(√V_q, σ√(1+ε²))`, step
    /// `min(σ/16, π V_q / (2·(half-span + 8σ)))`. The second step bound keeps
    /// the raw chirp on the widened input grid below half its Nyquist rate.
    pub fn default_for(model: &GaussianModel<T>, sigma: T) -> Result<Self> {
        check_sigma(sigma)?;
        let eps = epsilon(model.vq, sigma);
        let eight = T::lit(8.0);
        let half_span = eight * model.vq.sqrt().max(sigma * (T::one() + eps * eps).sqrt());
        let input_half_span = half_span + T::lit(KERNEL_HALF_WIDTH) * sigma;
        let step = (sigma / T::lit(16.0)).min(T::PI() * model.vq / (T::lit(2.0) * input_half_span));
        Self::new(model, sigma, UniformGrid::centered(model.fc0, half_span, step)?)
    }

    /// Grid on which the raw conditional must be sampled so that a "valid"
    /// convolution lands exactly on `self.grid`.
    pub fn input_grid(&self) -> UniformGrid<T> {
        self.grid.widened(kernel_half_points(self.sigma, self.grid.step()))
    }
}

fn check_sigma<T: Real>(sigma: T) -> Result<()> {
    if sigma > T::zero() && sigma.is_finite() {
        Ok(())
    } else {
        Err(KdError::InvalidParameter(format!("sigma must be positive, got {sigma}")))
    }
}

fn kernel_half_points<T: Real>(sigma: T, step: T) -> usize {
    (T::lit(KERNEL_HALF_WIDTH) * sigma / step).ceil().to_usize().unwrap()
}

fn overlap_sqr<T: Real>(u: &StateVector<T>, v: &StateVector<T>) -> Result<T> {
    ensure_dim(u.dim(), v.dim())?;
    let ov = dot(u.amplitudes(), v.amplitudes()).norm();
    if ov < T::overlap_eta() {
        return Err(KdError::NearOrthogonalOverlap {
            a: 0,
            b: 0,
            modulus: ov.to_f64_lossy(),
        });
    }
    Ok(ov * ov)
}

/// `V_q = |⟨b|a⟩|² / (2π |⟨b|c⟩|² |⟨c|a⟩|²)`.
pub fn imaginary_variance<T: Real>(a: &StateVector<T>, b: &StateVector<T>, c: &StateVector<T>) -> Result<T> {
    let ba = overlap_sqr(b, a)?;
    let bc = overlap_sqr(b, c)?;
    let ca = overlap_sqr(c, a)?;
    Ok(ba / (T::TAU() * bc * ca))
}

/// `(∂f_c/∂a, ∂f_c/∂b) = (|⟨b|a⟩|²/|⟨b|c⟩|², |⟨b|a⟩|²/|⟨c|a⟩|²)`.
pub fn fc_gradients<T: Real>(a: &StateVector<T>, b: &StateVector<T>, c: &StateVector<T>) -> Result<(T, T)> {
    let ba = overlap_sqr(b, a)?;
    let bc = overlap_sqr(b, c)?;
    let ca = overlap_sqr(c, a)?;
    Ok((ba / bc, ba / ca))
}

/// `ε = V_q / σ²`.
pub fn epsilon<T: Real>(vq: T, sigma: T) -> T {
    vq / (sigma * sigma)
}

/// `p(c) = exp(i(c−f_c)²/(2V_q) − iπ/4) / √(2πV_q)`.
///
/// Fails with `GridTooCoarse` when the local chirp frequency `|c−f_c|/V_q`
/// exceeds the grid's Nyquist rate anywhere on the grid.
pub fn gaussian_conditional<T: Real>(model: &GaussianModel<T>, grid: &UniformGrid<T>) -> Result<ComplexCurve<T>> {
    let reach = (grid.min() - model.fc0).abs().max((grid.max() - model.fc0).abs());
    if reach * grid.step() / model.vq > T::PI() {
        return Err(KdError::GridTooCoarse(format!(
            "step {} aliases the quadratic phase at |c - fc0| = {reach}",
            grid.step()
        )));
    }
    let amp = (T::TAU() * model.vq).sqrt().recip();
    let quarter = T::FRAC_PI_4();
    let samples = grid
        .points()
        .map(|c| {
            let u = c - model.fc0;
            Complex::from_polar(amp, u * u / (T::lit(2.0) * model.vq) - quarter)
        })
        .collect();
    ComplexCurve::new(*grid, samples)
}

/// Closed form of the conditional folded with `N(0, σ²)`:
/// `exp(−(c−f_c)²(1−iε) / (2σ²(1+ε²))) / √(2πσ²(1+iε))`.
pub fn coarse_grain_analytic<T: Real>(
    model: &GaussianModel<T>,
    sigma: T,
    grid: &UniformGrid<T>,
) -> Result<ComplexCurve<T>> {
    check_sigma(sigma)?;
    let eps = epsilon(model.vq, sigma);
    let s2 = sigma * sigma;
    let one = T::one();
    let denom = T::lit(2.0) * s2 * (one + eps * eps);
    let norm = (Complex::new(T::TAU() * s2, T::TAU() * s2 * eps)).sqrt().inv();
    let samples = grid
        .points()
        .map(|c| {
            let u = c - model.fc0;
            let expo = Complex::new(-u * u / denom, u * u * eps / denom);
            norm * expo.exp()
        })
        .collect();
    ComplexCurve::new(*grid, samples)
}

/// Discrete "valid" convolution with the unit-mass Gaussian of width `σ`,
/// truncated at `±8σ`. The output grid is the input grid shrunk by the kernel
/// half-width on each side.
pub fn coarse_grain_numeric<T: Real>(curve: &ComplexCurve<T>, sigma: T) -> Result<ComplexCurve<T>> {
    check_sigma(sigma)?;
    let step = curve.grid.step();
    if step >= sigma / T::lit(4.0) {
        return Err(KdError::GridTooCoarse(format!(
            "step {step} must be below sigma/4 = {}",
            sigma / T::lit(4.0)
        )));
    }
    let k = kernel_half_points(sigma, step);
    let out_grid = curve
        .grid
        .narrowed(k)
        .ok_or_else(|| KdError::GridTooCoarse(format!("input grid narrower than the ±{KERNEL_HALF_WIDTH}σ kernel")))?;

    let mut kernel: Vec<T> = (0..=2 * k)
        .map(|j| {
            let u = step * (T::from_usize(j).unwrap() - T::from_usize(k).unwrap());
            (-(u * u) / (T::lit(2.0) * sigma * sigma)).exp()
        })
        .collect();
    let mass: T = kernel.iter().copied().sum();
    for w in &mut kernel {
        *w /= mass;
    }

    let samples = (0..out_grid.len())
        .map(|i| {
            // output i sits at input index i + k; kernel is symmetric
            curve.samples[i..i + 2 * k + 1]
                .iter()
                .zip(&kernel)
                .fold(Complex::new(T::zero(), T::zero()), |s, (z, w)| s + z * *w)
        })
        .collect();
    ComplexCurve::new(out_grid, samples)
}

/// `N(fc0, σ²)` density on the grid.
pub fn classical_gaussian<T: Real>(fc0: T, sigma: T, grid: &UniformGrid<T>) -> Result<Vec<T>> {
    check_sigma(sigma)?;
    let norm = (T::TAU() * sigma * sigma).sqrt().recip();
    Ok(grid
        .points()
        .map(|c| {
            let u = (c - fc0) / sigma;
            norm * (-(u * u) / T::lit(2.0)).exp()
        })
        .collect())
}

/// Optional overrides of the default coarse-graining grid.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GridOptions<T> {
    pub step: Option<T>,
    pub half_span: Option<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure1Row<T> {
    pub c: T,
    pub re_q: T,
    pub im_q: T,
    pub classical: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure1Panel<T> {
    pub sigma: T,
    pub epsilon: T,
    pub rows: Vec<Figure1Row<T>>,
}

impl<T: Real> Figure1Panel<T> {
    pub fn classical_peak(&self) -> T {
        self.rows.iter().map(|r| r.classical).fold(T::zero(), T::max)
    }

    /// `max |Re p − classical|` relative to the classical peak.
    pub fn relative_re_deviation(&self) -> T {
        let dev = self.rows.iter().map(|r| (r.re_q - r.classical).abs()).fold(T::zero(), T::max);
        dev / self.classical_peak()
    }

    pub fn max_abs_im(&self) -> T {
        self.rows.iter().map(|r| r.im_q.abs()).fold(T::zero(), T::max)
    }
}

/// One panel per `σ`: the coarse-grained quantum conditional next to the
/// classical Gaussian of the same width, centred at zero.
pub fn figure1_data<T: Real>(vq: T, sigmas: &[T], grid: GridOptions<T>) -> Result<Vec<Figure1Panel<T>>> {
    let model = GaussianModel::centered(vq, T::zero())?;
    sigmas
        .iter()
        .map(|&sigma| {
            let default = CoarseGrainSpec::default_for(&model, sigma)?;
            let g = UniformGrid::centered(
                T::zero(),
                grid.half_span.unwrap_or(default.grid.half_span()),
                grid.step.unwrap_or(default.grid.step()),
            )?;
            let q = coarse_grain_analytic(&model, sigma, &g)?;
            let cl = classical_gaussian(T::zero(), sigma, &g)?;
            let rows = g
                .points()
                .zip(&q.samples)
                .zip(cl)
                .map(|((c, p), classical)| Figure1Row {
                    c,
                    re_q: p.re,
                    im_q: p.im,
                    classical,
                })
                .collect();
            Ok(Figure1Panel {
                sigma,
                epsilon: epsilon(vq, sigma),
                rows,
            })
        })
        .collect()
}

/// `Σ_{a,b} |⟨a|b⟩|²`, which is `d` for any orthonormal pair.
pub fn state_count_check<T: Real>(basis_a: &Basis<T>, basis_b: &Basis<T>) -> Result<T> {
    Ok(basis_a.overlaps(basis_b)?.iter().map(|z| z.norm_sqr()).sum())
}

/// Minimum dimension for the finite-difference law.
pub const IM_LAW_MIN_DIM: usize = 8;

/// Relative residual of `Im ρ(a,b) = −(1/(4π|⟨a|b⟩|²)) ∂²Re ρ/∂a∂b`, with the
/// mixed derivative taken by unit-step central differences on interior
/// points: `max |Im ρ − rhs| / max |ρ|`.
pub fn discrete_im_law_residual<T: Real>(kd: &KdDistribution<T>) -> Result<T> {
    im_law_residual(kd, -T::one())
}

fn im_law_residual<T: Real>(kd: &KdDistribution<T>, sign: T) -> Result<T> {
    let d = kd.dim();
    if d < IM_LAW_MIN_DIM {
        return Err(KdError::DimensionTooSmall {
            found: d,
            min: IM_LAW_MIN_DIM,
        });
    }
    let w = kd.basis_a().overlaps(kd.basis_b())?;
    let re = |a: usize, b: usize| kd.value(a, b).re;
    let scale = T::lit(4.0) * T::PI();
    let mut num = T::zero();
    let mut peak = T::zero();
    for a in 1..d - 1 {
        for b in 1..d - 1 {
            let ov = w[a * d + b].norm_sqr();
            if ov.sqrt() < T::overlap_eta() {
                return Err(KdError::NearOrthogonalOverlap {
                    a,
                    b,
                    modulus: ov.sqrt().to_f64_lossy(),
                });
            }
            let mixed = (re(a + 1, b + 1) - re(a + 1, b - 1) - re(a - 1, b + 1) + re(a - 1, b - 1)) / T::lit(4.0);
            let rhs = sign * mixed / (scale * ov);
            num = num.max((kd.value(a, b).im - rhs).abs());
            peak = peak.max(kd.value(a, b).norm());
        }
    }
    if peak == T::zero() {
        return Ok(T::zero());
    }
    Ok(num / peak)
}

/// Smooth test state for the discrete law over `(computational, Fourier)`:
/// a Gaussian phase-space mixture of periodic discrete coherent states with
/// mixture width `d/10` in both coordinates, centred at `(d/2, d/2)`.
pub fn phase_space_test_state<T: Real>(d: usize) -> Result<DensityOperator<T>> {
    if d < 2 {
        return Err(KdError::InvalidDimension(d));
    }
    let df = d as f64;
    let s2 = df / (4.0 * std::f64::consts::PI);
    let tau = 0.1 * df;
    let mut rho = vec![Complex::new(0.0f64, 0.0); d * d];
    let mut total = 0.0;
    for a0 in 0..d {
        for b0 in 0..d {
            let (x, y) = (a0 as f64 - df / 2.0, b0 as f64 - df / 2.0);
            let w = (-(x * x + y * y) / (2.0 * tau * tau)).exp();
            if w < 1e-14 {
                continue;
            }
            let psi: Vec<Complex<f64>> = (0..d)
                .map(|a| {
                    (-1i32..=1).fold(Complex::new(0.0, 0.0), |s, m| {
                        let shifted = a as f64 - a0 as f64 + m as f64 * df;
                        let phase = std::f64::consts::TAU * b0 as f64 * (a as f64 + m as f64 * df) / df;
                        s + Complex::from_polar((-shifted * shifted / (4.0 * s2)).exp(), phase)
                    })
                })
                .collect();
            let n2 = norm_sqr(&psi);
            for i in 0..d {
                for j in 0..d {
                    rho[i * d + j] += psi[i] * psi[j].conj() * (w / n2);
                }
            }
            total += w;
        }
    }
    let data = rho
        .into_iter()
        .map(|z| Complex::new(T::lit(z.re / total), T::lit(z.im / total)))
        .collect();
    DensityOperator::new(Operator::from_row_major(d, data)?)
}

//! Fixed-step trigonometric integrator for `y'' + A y = g(y)`:
//!
//! ```text
//! y_{n+1}  = cos(h sqrt A) y_n + h sinc(h sqrt A) y'_n + h^2/2 sinc(h sqrt A) gh(y_n)
//! y'_{n+1} = -h A sinc(h sqrt A) y_n + cos(h sqrt A) y'_n
//!            + h/2 cos(h sqrt A) gh(y_n) + h/2 gh(y_{n+1})
//! ```
//!
//! with the filtered nonlinearity `gh(y) = psi(h sqrt A) g(phi(h sqrt A) y)`.
//! All six actions of a step come from one call with `B = [y_n, y'_n, gh(y_n)]`.

use serde::{Deserialize, Serialize};

use crate::engine::{funmv, spm_for_option, FunmvConfig, FunmvOption};
use crate::error::{FunmvError, Result};
use crate::linalg::{matmat, DenseBlock, MatvecCounter, SparseMatrix};
use crate::params::SpmMatrix;

/// Right-hand side `g`.
pub type Forcing<'a> = &'a dyn Fn(&[f64]) -> Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Psi {
    One,
    Sinc,
    SincSquared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phi {
    One,
    Sinc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub psi: Psi,
    pub phi: Phi,
}

impl FilterSpec {
    pub const NONE: FilterSpec = FilterSpec {
        psi: Psi::One,
        phi: Phi::One,
    };
    /// `psi = sinc`, `phi = 1`.
    pub const HAIRER_LUBICH: FilterSpec = FilterSpec {
        psi: Psi::Sinc,
        phi: Phi::One,
    };
    /// `psi = sinc^2`, `phi = sinc`.
    pub const GRIMM_HOCHBRUCK: FilterSpec = FilterSpec {
        psi: Psi::SincSquared,
        phi: Phi::Sinc,
    };

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "none" => Ok(Self::NONE),
            "hairer-lubich" => Ok(Self::HAIRER_LUBICH),
            "grimm-hochbruck" => Ok(Self::GRIMM_HOCHBRUCK),
            other => Err(FunmvError::InvalidInput(format!(
                "unknown filter `{other}` (none, hairer-lubich, grimm-hochbruck)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorState {
    pub y: Vec<f64>,
    pub y_prime: Vec<f64>,
    pub t_now: f64,
    pub h: f64,
    /// Cumulative matrix-vector products.
    pub matvecs: u64,
    /// `gh(y)` for the current `y`, carried from the previous step.
    ghat: Option<Vec<f64>>,
}

impl IntegratorState {
    pub fn new(y: Vec<f64>, y_prime: Vec<f64>, h: f64) -> Result<Self> {
        if y.len() != y_prime.len() {
            return Err(FunmvError::Dimension(format!(
                "y has {} entries but y' has {}",
                y.len(),
                y_prime.len()
            )));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(FunmvError::InvalidInput(format!("step size must be positive, got {h}")));
        }
        Ok(Self {
            y,
            y_prime,
            t_now: 0.0,
            h,
            matvecs: 0,
            ghat: None,
        })
    }

    /// `(y'^T y' + y^T A y) / 2`, conserved by the exact flow when `g = 0`
    /// and `A` is symmetric.
    pub fn energy(&self, a: &SparseMatrix<f64>) -> Result<f64> {
        let mut counter = MatvecCounter::new();
        let ay = matmat(a, &DenseBlock::from_column(self.y.clone()), &mut counter)?;
        let kinetic: f64 = self.y_prime.iter().map(|v| v * v).sum();
        let potential: f64 = self.y.iter().zip(ay.column(0)).map(|(a, b)| a * b).sum();
        Ok(0.5 * (kinetic + potential))
    }
}

/// Shared pieces of one integration: the operator, the engine settings and
/// an optional precomputed selection table.
struct Stepper<'a> {
    a: &'a SparseMatrix<f64>,
    cfg: &'a FunmvConfig,
    spm: Option<&'a SpmMatrix>,
}

impl Stepper<'_> {
    fn call(&self, h: f64, b: &DenseBlock<f64>, state_mv: &mut u64) -> Result<(DenseBlock<f64>, DenseBlock<f64>)> {
        let r = funmv(h, self.a, b, FunmvOption::CosSincSqrt, self.cfg, self.spm)?;
        *state_mv += r.matvecs;
        Ok((r.c, r.s))
    }

    fn sinc(&self, h: f64, v: Vec<f64>, mv: &mut u64) -> Result<Vec<f64>> {
        let (_, s) = self.call(h, &DenseBlock::from_column(v), mv)?;
        Ok(s.column(0).to_vec())
    }

    fn ghat(&self, h: f64, g: Forcing<'_>, filter: FilterSpec, y: &[f64], mv: &mut u64) -> Result<Vec<f64>> {
        let inner = match filter.phi {
            Phi::One => y.to_vec(),
            Phi::Sinc => self.sinc(h, y.to_vec(), mv)?,
        };
        let gy = g(&inner);
        if gy.len() != y.len() {
            return Err(FunmvError::Dimension(format!(
                "g returned {} entries for a state of {}",
                gy.len(),
                y.len()
            )));
        }
        match filter.psi {
            Psi::One => Ok(gy),
            Psi::Sinc => self.sinc(h, gy, mv),
            Psi::SincSquared => {
                let once = self.sinc(h, gy, mv)?;
                self.sinc(h, once, mv)
            }
        }
    }

    fn step(&self, state: &IntegratorState, g: Option<Forcing<'_>>, filter: FilterSpec) -> Result<IntegratorState> {
        let h = state.h;
        let n = state.y.len();
        if self.a.n() != n {
            return Err(FunmvError::Dimension(format!(
                "A is {0} x {0} but the state has {n} entries",
                self.a.n()
            )));
        }
        let mut mv = state.matvecs;
        let ghat_n = match (g, &state.ghat) {
            (None, _) => None,
            (Some(_), Some(cached)) => Some(cached.clone()),
            (Some(g), None) => Some(self.ghat(h, g, filter, &state.y, &mut mv)?),
        };
        let mut cols = vec![state.y.clone(), state.y_prime.clone()];
        if let Some(gh) = &ghat_n {
            cols.push(gh.clone());
        }
        let (c, s) = self.call(h, &DenseBlock::from_columns(&cols)?, &mut mv)?;
        let mut counter = MatvecCounter::new();
        let a_s0 = matmat(self.a, &DenseBlock::from_column(s.column(0).to_vec()), &mut counter)?;
        mv += counter.get();

        let mut y: Vec<f64> = (0..n).map(|i| c.get(i, 0) + h * s.get(i, 1)).collect();
        let mut yp: Vec<f64> = (0..n).map(|i| -h * a_s0.get(i, 0) + c.get(i, 1)).collect();
        let mut ghat_next = None;
        if let Some(g) = g {
            for i in 0..n {
                y[i] += 0.5 * h * h * s.get(i, 2);
                yp[i] += 0.5 * h * c.get(i, 2);
            }
            let gh = self.ghat(h, g, filter, &y, &mut mv)?;
            for (v, gi) in yp.iter_mut().zip(&gh) {
                *v += 0.5 * h * gi;
            }
            ghat_next = Some(gh);
        }
        Ok(IntegratorState {
            y,
            y_prime: yp,
            t_now: state.t_now + h,
            h,
            matvecs: mv,
            ghat: ghat_next,
        })
    }
}

/// Advances `state` by one step. `g = None` is the linear problem.
pub fn step(
    a: &SparseMatrix<f64>,
    state: &IntegratorState,
    g: Option<Forcing<'_>>,
    filter: FilterSpec,
    cfg: &FunmvConfig,
) -> Result<IntegratorState> {
    Stepper { a, cfg, spm: None }.step(state, g, filter)
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Initial state followed by one entry per step.
    pub states: Vec<IntegratorState>,
    pub matvecs: u64,
    /// Products spent building the reusable selection table (0 without it).
    pub spm_matvecs: u64,
}

impl Trajectory {
    pub fn last(&self) -> &IntegratorState {
        self.states.last().expect("a trajectory holds its initial state")
    }
}

/// Runs `n_steps` steps of size `h`. With `spm_cache`, the norm estimates are
/// computed once up front and reused by every engine call.
#[allow(clippy::too_many_arguments)]
pub fn run(
    a: &SparseMatrix<f64>,
    y0: Vec<f64>,
    y0p: Vec<f64>,
    g: Option<Forcing<'_>>,
    filter: FilterSpec,
    h: f64,
    n_steps: usize,
    cfg: &FunmvConfig,
    spm_cache: bool,
) -> Result<Trajectory> {
    let mut state = IntegratorState::new(y0, y0p, h)?;
    let mut spm_matvecs = 0;
    let spm = if spm_cache && n_steps > 0 {
        let mut counter = MatvecCounter::new();
        let spm = spm_for_option(a, FunmvOption::CosSincSqrt, cfg, &mut counter)?;
        spm_matvecs = counter.get();
        state.matvecs = spm_matvecs;
        Some(spm)
    } else {
        None
    };
    let stepper = Stepper {
        a,
        cfg,
        spm: spm.as_ref(),
    };
    let mut states = Vec::with_capacity(n_steps + 1);
    states.push(state.clone());
    for _ in 0..n_steps {
        state = stepper.step(&state, g, filter)?;
        states.push(state.clone());
    }
    Ok(Trajectory {
        matvecs: state.matvecs,
        states,
        spm_matvecs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::normest::Sigma;
    use crate::oracle::{dense_func_action, DenseMatrix, Func};

    fn exact_flow(a: &SparseMatrix<f64>, y0: &[f64], y0p: &[f64], t: f64) -> (Vec<f64>, Vec<f64>) {
        let d = DenseMatrix::from_sparse(a).unwrap();
        let y = DenseBlock::from_column(y0.to_vec());
        let yp = DenseBlock::from_column(y0p.to_vec());
        let cy = dense_func_action(Func::Cos, &d, Sigma::Half, t, &y).unwrap();
        let sy = dense_func_action(Func::Sinc, &d, Sigma::Half, t, &yp).unwrap();
        let pos: Vec<f64> = (0..y0.len()).map(|i| cy.get(i, 0) + t * sy.get(i, 0)).collect();
        let syy = dense_func_action(Func::Sinc, &d, Sigma::Half, t, &y).unwrap();
        let asyy = d.mul_block(&syy);
        let cyp = dense_func_action(Func::Cos, &d, Sigma::Half, t, &yp).unwrap();
        let vel: Vec<f64> = (0..y0.len()).map(|i| -t * asyy.get(i, 0) + cyp.get(i, 0)).collect();
        (pos, vel)
    }

    fn max_diff(x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn harmonic_oscillator_single_step() {
        let omega = [1.0, 2.0, 3.5];
        let a = SparseMatrix::from_diagonal(&omega.map(|w| w * w));
        let state = IntegratorState::new(vec![1.0, 0.0, 0.0], vec![0.0; 3], 0.3).unwrap();
        let next = step(&a, &state, None, FilterSpec::NONE, &FunmvConfig::default()).unwrap();
        assert!((next.y[0] - 0.3f64.cos()).abs() < 1e-15);
        assert_eq!(&next.y[1..], &[0.0, 0.0]);
        assert!((next.y_prime[0] + 0.3f64.sin()).abs() < 1e-15);
        assert!((next.t_now - 0.3).abs() < 1e-16);
    }

    #[test]
    fn linear_steps_follow_exact_flow() {
        let a = generators::poisson(3);
        let y0: Vec<f64> = (1..=9).map(|i| (i as f64).cos()).collect();
        let y0p: Vec<f64> = (1..=9).map(|i| (i as f64).sin()).collect();
        let cfg = FunmvConfig::default();
        let traj = run(
            &a,
            y0.clone(),
            y0p.clone(),
            None,
            FilterSpec::NONE,
            0.1,
            20,
            &cfg,
            false,
        )
        .unwrap();
        for (k, st) in traj.states.iter().enumerate() {
            let (y, yp) = exact_flow(&a, &y0, &y0p, 0.1 * k as f64);
            let scale = y.iter().map(|v| v.abs()).fold(1.0, f64::max);
            let tol = (k.max(1) as f64) * 10.0 * 1.1102230246251565e-16 * scale;
            assert!(max_diff(&st.y, &y) <= tol, "step {k}: {}", max_diff(&st.y, &y));
            assert!(max_diff(&st.y_prime, &yp) <= 10.0 * tol, "step {k}");
        }
    }

    #[test]
    fn energy_is_conserved_for_linear_waves() {
        let a = generators::poisson(3);
        let y0: Vec<f64> = (1..=9).map(|i| (i as f64).cos()).collect();
        let cfg = FunmvConfig::default();
        let traj = run(&a, y0, vec![0.0; 9], None, FilterSpec::NONE, 0.05, 100, &cfg, false).unwrap();
        let e0 = traj.states[0].energy(&a).unwrap();
        for st in &traj.states {
            assert!((st.energy(&a).unwrap() - e0).abs() <= 1e-8 * e0);
        }
    }

    #[test]
    fn zero_steps_return_initial_state() {
        let a = generators::spring_chain(4);
        let traj = run(
            &a,
            vec![1.0; 4],
            vec![0.5; 4],
            None,
            FilterSpec::NONE,
            0.1,
            0,
            &FunmvConfig::default(),
            true,
        )
        .unwrap();
        assert_eq!(traj.states.len(), 1);
        assert_eq!(traj.last().y, vec![1.0; 4]);
        assert_eq!(traj.matvecs, 0);
    }

    #[test]
    fn cached_selection_is_bitwise_identical_and_pays_once() {
        // large enough that the full norm-root sequence is needed
        let a = generators::spring_chain(40).scaled(4000.0);
        let y0: Vec<f64> = (0..40).map(|i| (i as f64 * 0.3).sin()).collect();
        let cfg = FunmvConfig::default();
        let steps = 6;
        let plain = run(
            &a,
            y0.clone(),
            vec![0.0; 40],
            None,
            FilterSpec::NONE,
            0.5,
            steps,
            &cfg,
            false,
        )
        .unwrap();
        let cached = run(&a, y0, vec![0.0; 40], None, FilterSpec::NONE, 0.5, steps, &cfg, true).unwrap();
        for (p, c) in plain.states.iter().zip(&cached.states) {
            assert_eq!(p.y, c.y);
            assert_eq!(p.y_prime, c.y_prime);
        }
        assert!(cached.spm_matvecs > 0);
        assert_eq!(plain.matvecs - cached.matvecs, (steps as u64 - 1) * cached.spm_matvecs);
    }

    #[test]
    fn unit_filters_evaluate_g_directly() {
        let a = generators::spring_chain(5);
        let y: Vec<f64> = (0..5).map(|i| i as f64 * 0.1).collect();
        let g = |v: &[f64]| v.iter().map(|x| x * x).collect::<Vec<_>>();
        let cfg = FunmvConfig::default();
        let stepper = Stepper {
            a: &a,
            cfg: &cfg,
            spm: None,
        };
        let mut mv = 0;
        let gh = stepper.ghat(0.2, &g, FilterSpec::NONE, &y, &mut mv).unwrap();
        assert_eq!(gh, g(&y));
        assert_eq!(mv, 0);
        let filtered = stepper.ghat(0.2, &g, FilterSpec::GRIMM_HOCHBRUCK, &y, &mut mv).unwrap();
        assert_ne!(filtered, gh);
        assert!(mv > 0);
    }

    // classical Runge-Kutta on the first-order system, for reference
    fn rk4(a: &SparseMatrix<f64>, g: Forcing<'_>, y0: &[f64], yp0: &[f64], t_end: f64, steps: usize) -> Vec<f64> {
        let n = y0.len();
        let h = t_end / steps as f64;
        let f = |y: &[f64], v: &[f64]| -> (Vec<f64>, Vec<f64>) {
            let mut c = MatvecCounter::new();
            let ay = matmat(a, &DenseBlock::from_column(y.to_vec()), &mut c).unwrap();
            let gy = g(y);
            (v.to_vec(), (0..n).map(|i| gy[i] - ay.get(i, 0)).collect())
        };
        let axpy = |x: &[f64], s: f64, d: &[f64]| -> Vec<f64> { x.iter().zip(d).map(|(a, b)| a + s * b).collect() };
        let (mut y, mut v) = (y0.to_vec(), yp0.to_vec());
        for _ in 0..steps {
            let (k1y, k1v) = f(&y, &v);
            let (k2y, k2v) = f(&axpy(&y, h / 2.0, &k1y), &axpy(&v, h / 2.0, &k1v));
            let (k3y, k3v) = f(&axpy(&y, h / 2.0, &k2y), &axpy(&v, h / 2.0, &k2v));
            let (k4y, k4v) = f(&axpy(&y, h, &k3y), &axpy(&v, h, &k3v));
            for i in 0..n {
                y[i] += h / 6.0 * (k1y[i] + 2.0 * k2y[i] + 2.0 * k3y[i] + k4y[i]);
                v[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
            }
        }
        y
    }

    #[test]
    fn forced_chain_matches_fine_reference() {
        let a = generators::spring_chain(12);
        let g = |y: &[f64]| y.iter().map(|v| 1e-3 * v.sin()).collect::<Vec<_>>();
        let y0: Vec<f64> = (0..12).map(|i| (0.5 * i as f64).cos()).collect();
        let yp0 = vec![0.1; 12];
        let reference = rk4(&a, &g, &y0, &yp0, 1.0, 20000);
        for filter in [FilterSpec::NONE, FilterSpec::HAIRER_LUBICH, FilterSpec::GRIMM_HOCHBRUCK] {
            let traj = run(
                &a,
                y0.clone(),
                yp0.clone(),
                Some(&g),
                filter,
                0.05,
                20,
                &FunmvConfig::default(),
                true,
            )
            .unwrap();
            assert!(max_diff(&traj.last().y, &reference) < 1e-4, "{filter:?}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(IntegratorState::new(vec![1.0], vec![1.0, 2.0], 0.1).is_err());
        assert!(IntegratorState::new(vec![1.0], vec![1.0], 0.0).is_err());
        assert!(FilterSpec::from_name("hairer-lubich").is_ok());
        assert!(FilterSpec::from_name("bogus").is_err());
    }
}

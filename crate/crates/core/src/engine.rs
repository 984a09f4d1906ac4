//! `C ~ cos/cosh(t A^sigma) B` and `S ~ sin/sinh/sinc/sinch(t A^sigma) B`.
//!
//! The argument is divided by an integer `s`, the cosine (or sinc) of the
//! scaled argument is applied through a truncated Taylor series, and the
//! full-size function is rebuilt with Chebyshev recurrences:
//!
//! * first kind, `T_k + T_{k-2} = 2 cos(X) T_{k-1}` with `T_k = cos(kX) B`,
//!   so `T_s = cos(sX) B`;
//! * second kind, `U_k - U_{k-2} = 2 T_k`, which gives
//!   `sinc(X) U_{s-1} = s sinc(sX) B`. Only half of the `T_k` are summed:
//!   `U_{s-1} / 2 = T_1 + T_3 + ... + T_{s-1}` for even `s` and
//!   `T_0 / 2 + T_2 + ... + T_{s-1}` for odd `s`.
//!
//! For `sigma = 1/2` the series is in powers of `t^2 A`, so a square root of
//! `A` is never needed.

use serde::{Deserialize, Serialize};

use crate::error::{FunmvError, Result};
use crate::linalg::{matmat, one_norm, shift_diagonal, trace_mean, DenseBlock, MatvecCounter, SparseMatrix};
use crate::normest::{alpha_sequence, Sigma};
use crate::params::{select_for_t, select_parameters, ParamChoice, SelectConfig, SelectionPath, SpmMatrix};
use crate::scalar::Scalar;
use crate::theta::{ThetaTable, Tolerance};

/// The six output pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum FunmvOption {
    /// `cos(tA)B`, `sin(tA)B`
    CosSin = 1,
    /// `cosh(tA)B`, `sinh(tA)B`
    CoshSinh = 2,
    /// `cos(tA)B`, `sinc(tA)B`
    CosSinc = 3,
    /// `cosh(tA)B`, `sinch(tA)B`
    CoshSinch = 4,
    /// `cos(t sqrt(A))B`, `sinc(t sqrt(A))B`
    CosSincSqrt = 5,
    /// `cosh(t sqrt(A))B`, `sinch(t sqrt(A))B`
    CoshSinchSqrt = 6,
}

impl FunmvOption {
    pub const ALL: [FunmvOption; 6] = [
        FunmvOption::CosSin,
        FunmvOption::CoshSinh,
        FunmvOption::CosSinc,
        FunmvOption::CoshSinch,
        FunmvOption::CosSincSqrt,
        FunmvOption::CoshSinchSqrt,
    ];

    pub fn from_id(id: u8) -> Result<Self> {
        Self::ALL
            .get((id as usize).wrapping_sub(1))
            .copied()
            .ok_or_else(|| FunmvError::InvalidInput(format!("option must be 1..6, got {id}")))
    }

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn sigma(self) -> Sigma {
        match self {
            FunmvOption::CosSincSqrt | FunmvOption::CoshSinchSqrt => Sigma::Half,
            _ => Sigma::One,
        }
    }

    /// Trigonometric (`k0 = 1`) rather than hyperbolic.
    pub fn trig(self) -> bool {
        matches!(
            self,
            FunmvOption::CosSin | FunmvOption::CosSinc | FunmvOption::CosSincSqrt
        )
    }

    /// The sign selector `k0`.
    pub fn k0(self) -> u8 {
        u8::from(self.trig())
    }

    /// Whether the option shifts by `trace(A)/n`.
    pub fn shift(self) -> bool {
        matches!(self, FunmvOption::CosSin | FunmvOption::CoshSinh)
    }

    /// `S` is an odd function (`sin`/`sinh`) rather than `sinc`/`sinch`.
    pub fn odd_sine(self) -> bool {
        self.shift()
    }
}

impl From<FunmvOption> for u8 {
    fn from(o: FunmvOption) -> u8 {
        o.id()
    }
}

impl TryFrom<u8> for FunmvOption {
    type Error = FunmvError;
    fn try_from(id: u8) -> Result<Self> {
        Self::from_id(id)
    }
}

/// Where the shift by `mu` is undone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UndoMode {
    None,
    /// After every scaled step, with `phi` of `t mu / s`.
    Inside,
    /// Once at the end, with `phi` of `t mu`.
    Outside,
}

/// Block norm used by the early-termination test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TermNorm {
    #[default]
    Inf,
    One,
}

impl TermNorm {
    fn of<F: Scalar>(self, b: &DenseBlock<F>) -> f64 {
        match self {
            TermNorm::Inf => b.inf_norm(),
            TermNorm::One => b.one_norm(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunmvConfig {
    pub tol: Tolerance,
    pub select: SelectConfig,
    pub early_stop: bool,
    pub term_norm: TermNorm,
    /// Set to `false` to force `mu = 0` for options 1 and 2.
    pub shift: bool,
}

impl Default for FunmvConfig {
    fn default() -> Self {
        Self {
            tol: Tolerance::default(),
            select: SelectConfig::default(),
            early_stop: true,
            term_norm: TermNorm::Inf,
            shift: true,
        }
    }
}

impl FunmvConfig {
    pub fn with_tol(tol: impl Into<Tolerance>) -> Self {
        Self {
            tol: tol.into(),
            ..Self::default()
        }
    }
}

/// Which truncated series a pass evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// `sum (-+1)^k Y^k / (2k)!`
    Cos,
    /// `sum (-+1)^k Y^k / (2k+1)!`
    Sinc,
}

/// Per-pass switches that do not change between passes.
#[derive(Debug, Clone, Copy)]
pub struct PassSettings {
    pub sigma: Sigma,
    pub trig: bool,
    pub tol: f64,
    pub early_stop: bool,
    pub term_norm: TermNorm,
}

#[derive(Debug, Clone)]
pub struct PassOutput<F> {
    pub v: DenseBlock<F>,
    /// Companion series, when requested.
    pub z: Option<DenseBlock<F>>,
    /// Last `k` evaluated.
    pub m_stop: usize,
}

/// One Taylor pass: `V = r_m((t/s) A^sigma) block` for the cosine or sinc
/// series, optionally with the companion series `Z` (sinc for a cosine pass,
/// cosine for a sinc pass) built from the same powers. `pass` only labels
/// overflow diagnostics.
#[allow(clippy::too_many_arguments)]
pub fn taylor_pass<F: Scalar>(
    a: &SparseMatrix<F>,
    block: &DenseBlock<F>,
    t: F,
    s: u64,
    m_star: usize,
    kind: SeriesKind,
    companion: bool,
    settings: &PassSettings,
    pass: u64,
    counter: &mut MatvecCounter,
) -> Result<PassOutput<F>> {
    let h = t / s as f64;
    let h2 = h * h;
    let mut v = block.clone();
    let mut z = companion.then(|| block.clone());
    let mut b = block.clone();
    let mut c1 = settings.term_norm.of(&b);
    let mut m_stop = m_star;
    for k in 1..=m_star {
        let beta = 2.0 * k as f64;
        let (gamma, q) = match kind {
            SeriesKind::Cos => (beta - 1.0, 1.0 / (beta + 1.0)),
            SeriesKind::Sinc => (beta + 1.0, beta + 1.0),
        };
        if settings.sigma == Sigma::One {
            b = matmat(a, &b, counter)?;
        }
        b = matmat(a, &b, counter)?.scale(h2 / (beta * gamma));
        let c2 = settings.term_norm.of(&b);
        if !c2.is_finite() {
            return Err(FunmvError::Overflow(format!(
                "Taylor term {k} of pass {pass} is not finite"
            )));
        }
        let sign = if settings.trig && k % 2 == 1 {
            -F::one()
        } else {
            F::one()
        };
        v.axpy(sign, &b);
        if let Some(z) = z.as_mut() {
            z.axpy(sign * q, &b);
        }
        if settings.early_stop && c1 + c2 <= settings.tol * settings.term_norm.of(&v) {
            m_stop = k;
            break;
        }
        c1 = c2;
    }
    Ok(PassOutput { v, z, m_stop })
}

/// Outputs and diagnostics of one [`funmv`] call.
#[derive(Debug, Clone)]
pub struct FunmvReport<F> {
    pub c: DenseBlock<F>,
    pub s: DenseBlock<F>,
    pub option: FunmvOption,
    pub matvecs: u64,
    /// Scaling parameter.
    pub scaling: u64,
    pub m_star: usize,
    /// Stop degree of each of the `scaling + 1` passes.
    pub m_i: Vec<usize>,
    pub mu: F,
    pub undo: UndoMode,
    pub path: SelectionPath,
    pub theta_cost: u64,
    pub tol: f64,
}

impl<F: Scalar> FunmvReport<F> {
    /// Products the run must have performed:
    /// `2 sigma n0 sum(m_i) + [inside] n0 (s+1) + [odd sine, not inside] n0 + Theta`.
    /// The analytic zero-operator branch performs none.
    pub fn expected_matvecs(&self) -> u64 {
        if self.path == SelectionPath::ZeroMatrix {
            return 0;
        }
        let n0 = self.c.ncols() as u64;
        let terms: u64 = self.m_i.iter().map(|&m| m as u64).sum();
        let inside = self.undo == UndoMode::Inside;
        self.option.sigma().products_per_term() * n0 * terms
            + if inside { n0 * (self.scaling + 1) } else { 0 }
            + if self.option.odd_sine() && !inside { n0 } else { 0 }
            + self.theta_cost
    }

    pub fn stats(&self) -> ReportStats {
        let mu = self.mu.to_complex();
        ReportStats {
            option: self.option.id(),
            n: self.c.nrows(),
            n0: self.c.ncols(),
            tol: self.tol,
            matvecs: self.matvecs,
            s: self.scaling,
            m_star: self.m_star,
            m_i: self.m_i.clone(),
            mu: [mu.re, mu.im],
            undo: self.undo,
            path: self.path,
            theta_cost: self.theta_cost,
        }
    }
}

/// Serializable diagnostics of a [`FunmvReport`] (the `C` and `S` blocks
/// are written separately).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportStats {
    pub option: u8,
    pub n: usize,
    pub n0: usize,
    pub tol: f64,
    pub matvecs: u64,
    pub s: u64,
    pub m_star: usize,
    pub m_i: Vec<usize>,
    /// `[re, im]`
    pub mu: [f64; 2],
    pub undo: UndoMode,
    pub path: SelectionPath,
    pub theta_cost: u64,
}

fn option_mu<F: Scalar>(a: &SparseMatrix<F>, option: FunmvOption, cfg: &FunmvConfig) -> F {
    if option.shift() && cfg.shift {
        trace_mean(a)
    } else {
        F::zero()
    }
}

/// Builds the reusable [`SpmMatrix`] for `option` on `A`, applying the same
/// shift [`funmv`] will apply.
pub fn spm_for_option<F: Scalar>(
    a: &SparseMatrix<F>,
    option: FunmvOption,
    cfg: &FunmvConfig,
    counter: &mut MatvecCounter,
) -> Result<SpmMatrix> {
    let mu = option_mu(a, option, cfg);
    let shifted = shift_diagonal(a, mu);
    let theta = ThetaTable::new(cfg.tol.value(), cfg.select.mmax);
    let seq = alpha_sequence(&shifted, option.sigma(), cfg.select.pmax, &cfg.select.normest, counter)?;
    let mut spm = SpmMatrix::from_alphas(seq, &theta, cfg.select.mmax, cfg.select.pmax);
    let mu = mu.to_complex();
    spm.shift = [mu.re, mu.im];
    Ok(spm)
}

fn phis<F: Scalar>(x: F, trig: bool) -> Result<(F, F)> {
    let (p1, p2) = if trig { (x.cos(), x.sin()) } else { (x.cosh(), x.sinh()) };
    if !(p1.is_finite() && p2.is_finite()) {
        return Err(FunmvError::Overflow(format!(
            "undoing the shift needs f({x}), which is not representable"
        )));
    }
    Ok((p1, p2))
}

/// Starting value of the running sum for `U_{s-1} / 2`: `B / 2` for odd `s`
/// (the `T_0 / 2` term), zero for even `s`.
pub fn second_kind_seed<F: Scalar>(s: u64, b: &DenseBlock<F>) -> DenseBlock<F> {
    if s % 2 == 1 {
        b.scale(F::from_f64(0.5))
    } else {
        DenseBlock::zeros(b.nrows(), b.ncols())
    }
}

/// Whether `T_i` (`1 <= i <= s - 1`) is a term of `U_{s-1} / 2`.
pub fn enters_second_kind(i: u64, s: u64) -> bool {
    i < s && s.is_multiple_of(2) != i.is_multiple_of(2)
}

/// Computes the pair of actions selected by `option`.
///
/// `spm`, when given, must come from [`spm_for_option`] with the same option
/// and configuration; the norm estimation is then skipped.
pub fn funmv<F: Scalar>(
    t: F,
    a: &SparseMatrix<F>,
    b: &DenseBlock<F>,
    option: FunmvOption,
    cfg: &FunmvConfig,
    spm: Option<&SpmMatrix>,
) -> Result<FunmvReport<F>> {
    if a.n() != b.nrows() {
        return Err(FunmvError::Dimension(format!(
            "A is {0} x {0} but B has {1} rows",
            a.n(),
            b.nrows()
        )));
    }
    if b.ncols() == 0 {
        return Err(FunmvError::Dimension("B has no columns".into()));
    }
    if !t.is_finite() || !a.is_finite() || !b.is_finite() {
        return Err(FunmvError::InvalidInput("inputs must be finite".into()));
    }
    let tol = cfg.tol.value();
    if !(tol > 0.0 && tol < 1.0) {
        return Err(FunmvError::InvalidInput(format!(
            "tolerance must lie in (0, 1), got {tol}"
        )));
    }
    let sigma = option.sigma();
    let trig = option.trig();
    let sign = if trig { -F::one() } else { F::one() };
    let n0 = b.ncols();

    let mu = option_mu(a, option, cfg);
    let a = shift_diagonal(a, mu);
    let tmu = t * mu;
    let mut counter = MatvecCounter::new();

    if t == F::zero() || one_norm(&a) == 0.0 {
        // f(t mu I) B in closed form
        let (c, s) = if option.odd_sine() {
            let (p1, p2) = phis(tmu, trig)?;
            (b.scale(p1), b.scale(p2))
        } else {
            (b.clone(), b.clone())
        };
        return Ok(FunmvReport {
            c,
            s,
            option,
            matvecs: 0,
            scaling: 1,
            m_star: 0,
            m_i: Vec::new(),
            mu,
            undo: UndoMode::None,
            path: SelectionPath::ZeroMatrix,
            theta_cost: 0,
            tol,
        });
    }

    let theta = ThetaTable::new(tol, cfg.select.mmax);
    let choice = match spm {
        Some(spm) => {
            let mu_c = mu.to_complex();
            if spm.sigma != sigma || spm.tol != tol || spm.mmax != cfg.select.mmax || spm.shift != [mu_c.re, mu_c.im] {
                return Err(FunmvError::InvalidInput(
                    "precomputed S_pm was built for a different option, tolerance or shift".into(),
                ));
            }
            let sel = select_for_t(spm, t.abs())?;
            ParamChoice {
                m_star: sel.m_star,
                s: sel.s,
                theta_cost: 0,
                path: SelectionPath::Precomputed,
            }
        }
        None => {
            let factor = match sigma {
                Sigma::One => t,
                Sigma::Half => t * t,
            };
            select_parameters(&a.scaled(factor), sigma, &theta, &cfg.select, n0, &mut counter)?
        }
    };
    // only reachable if t^(1/sigma) A underflowed to zero
    let m_star = choice.m_star.max(1);
    let s = choice.s;
    let s_f = s as f64;

    let (undo, phi1, phi2) = match option {
        FunmvOption::CosSin if tmu.im() != 0.0 => {
            let (p1, p2) = phis(tmu / s_f, true)?;
            (UndoMode::Inside, p1, p2)
        }
        FunmvOption::CosSin if tmu != F::zero() => {
            let (p1, p2) = phis(tmu, true)?;
            (UndoMode::Outside, p1, p2)
        }
        FunmvOption::CoshSinh if tmu.re() != 0.0 => {
            let (p1, p2) = phis(tmu / s_f, false)?;
            (UndoMode::Inside, p1, p2)
        }
        FunmvOption::CoshSinh if tmu.im() != 0.0 => {
            let (p1, p2) = phis(tmu, false)?;
            (UndoMode::Outside, p1, p2)
        }
        _ => (UndoMode::None, F::one(), F::zero()),
    };
    let inside = undo == UndoMode::Inside;

    let settings = PassSettings {
        sigma,
        trig,
        tol,
        early_stop: cfg.early_stop,
        term_norm: cfg.term_norm,
    };

    let mut u = second_kind_seed(s, b);
    let mut t0 = b.clone();
    let mut t1 = b.clone();
    let mut t2 = b.clone();
    let mut v = b.clone();
    let mut m_i = Vec::with_capacity(s as usize + 1);
    let step = t / s_f;

    for i in 1..=s + 1 {
        let kind = if i <= s {
            SeriesKind::Cos
        } else {
            u = u.scale(F::from_f64(2.0));
            t1 = u.clone();
            SeriesKind::Sinc
        };
        let out = taylor_pass(&a, &t1, t, s, m_star, kind, inside, &settings, i, &mut counter)?;
        m_i.push(out.m_stop);
        v = out.v;
        if inside {
            let z = out.z.expect("companion requested");
            v = if i <= s {
                let corr = matmat(&a, &z.scale(sign * step * phi2), &mut counter)?;
                v.lincomb(phi1, &corr, F::one())
            } else {
                let main = matmat(&a, &v.scale(step * phi1), &mut counter)?;
                main.lincomb(F::one(), &z, phi2)
            };
        }
        if i == 1 {
            t2 = v.clone();
        } else if i <= s {
            t2 = v.lincomb(F::from_f64(2.0), &t0, -F::one());
        }
        if !t2.is_finite() {
            return Err(FunmvError::Overflow(format!("recurrence step {i} is not finite")));
        }
        if enters_second_kind(i, s) {
            u.axpy(F::one(), &t2);
        }
        if i <= s {
            t0 = std::mem::replace(&mut t1, t2.clone());
        }
    }

    let mut c = t2;
    let mut s_out = if inside {
        v
    } else if option.odd_sine() {
        matmat(&a, &v.scale(step), &mut counter)?
    } else {
        v.scale(F::one() / s_f)
    };
    if undo == UndoMode::Outside {
        let new_c = c.lincomb(phi1, &s_out, sign * phi2);
        s_out = s_out.lincomb(phi1, &c, phi2);
        c = new_c;
    }
    if !(c.is_finite() && s_out.is_finite()) {
        return Err(FunmvError::Overflow("outputs are not finite".into()));
    }

    Ok(FunmvReport {
        c,
        s: s_out,
        option,
        matvecs: counter.get(),
        scaling: s,
        m_star,
        m_i,
        mu,
        undo,
        path: choice.path,
        theta_cost: choice.theta_cost,
        tol,
    })
}

/// `e^{tA} B = cosh(tA) B + sinh(tA) B`.
pub fn exp_action<F: Scalar>(t: F, a: &SparseMatrix<F>, b: &DenseBlock<F>, cfg: &FunmvConfig) -> Result<DenseBlock<F>> {
    let r = funmv(t, a, b, FunmvOption::CoshSinh, cfg, None)?;
    Ok(r.c.lincomb(F::one(), &r.s, F::one()))
}

//! First-order Bogoliubov coefficient data, unitarity validation and the model file format.
//!
//! The transformation acts on annihilation operators as
//! `ã_m = Σ_n (α*_mn a_n − β*_mn a†_n)` with `α = diag(G) + θ α⁽¹⁾ + O(θ²)` and
//! `β = θ β⁽¹⁾ + O(θ²)`.

use std::fmt;

use log::debug;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::C64;

/// Tolerance for the three unitarity constraints.
pub const VALIDATION_TOLERANCE: f64 = 1e-10;

/// Tolerance on `|G_n| = 1`.
pub const PHASE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct BogoliubovFirstOrder {
    g: Vec<C64>,
    alpha1: DMatrix<C64>,
    beta1: DMatrix<C64>,
}

impl BogoliubovFirstOrder {
    /// Builds a model from explicit data. Shapes are checked here; unitarity is checked by
    /// [`validate`].
    pub fn new(g: Vec<C64>, alpha1: DMatrix<C64>, beta1: DMatrix<C64>) -> Result<Self> {
        let m = g.len();
        if m == 0 {
            return Err(Error::InvalidArgument("model needs at least one mode".into()));
        }
        for (name, mat) in [("alpha1", &alpha1), ("beta1", &beta1)] {
            if mat.nrows() != m || mat.ncols() != m {
                return Err(Error::InvalidArgument(format!(
                    "{name} is {}x{}, expected {m}x{m}",
                    mat.nrows(),
                    mat.ncols()
                )));
            }
        }
        Ok(Self { g, alpha1, beta1 })
    }

    /// Trivial phases and no first-order coupling.
    pub fn null(modes: usize) -> Self {
        Self {
            g: vec![C64::new(1.0, 0.0); modes],
            alpha1: DMatrix::zeros(modes, modes),
            beta1: DMatrix::zeros(modes, modes),
        }
    }

    /// `β⁽¹⁾_kk = 1`, matching `α_kk = cosh θ`, `β_kk = sinh θ`.
    pub fn single_mode_squeezer(k: usize, modes: usize) -> Result<Self> {
        check_index(k, modes)?;
        let mut spec = Self::null(modes);
        spec.beta1[(k, k)] = C64::new(1.0, 0.0);
        Ok(spec)
    }

    /// `β⁽¹⁾_kk' = β⁽¹⁾_k'k = 1`.
    pub fn two_mode_squeezer(k: usize, kprime: usize, modes: usize) -> Result<Self> {
        check_pair(k, kprime, modes)?;
        let mut spec = Self::null(modes);
        spec.beta1[(k, kprime)] = C64::new(1.0, 0.0);
        spec.beta1[(kprime, k)] = C64::new(1.0, 0.0);
        Ok(spec)
    }

    /// `α⁽¹⁾_kk' = 1`, `α⁽¹⁾_k'k = −1`, generated by `i(a†_k a_k' − a_k a†_k')`.
    pub fn beam_splitter(k: usize, kprime: usize, modes: usize) -> Result<Self> {
        check_pair(k, kprime, modes)?;
        let mut spec = Self::null(modes);
        spec.alpha1[(k, kprime)] = C64::new(1.0, 0.0);
        spec.alpha1[(kprime, k)] = C64::new(-1.0, 0.0);
        Ok(spec)
    }

    /// One single-mode squeezer per mode, `β⁽¹⁾ = diag(strengths)`.
    pub fn independent_squeezers(strengths: &[f64]) -> Result<Self> {
        if strengths.is_empty() {
            return Err(Error::InvalidArgument("model needs at least one mode".into()));
        }
        let mut spec = Self::null(strengths.len());
        for (i, &s) in strengths.iter().enumerate() {
            spec.beta1[(i, i)] = C64::new(s, 0.0);
        }
        Ok(spec)
    }

    pub fn modes(&self) -> usize {
        self.g.len()
    }

    pub fn g(&self) -> &[C64] {
        &self.g
    }

    pub fn alpha1(&self) -> &DMatrix<C64> {
        &self.alpha1
    }

    pub fn beta1(&self) -> &DMatrix<C64> {
        &self.beta1
    }

    /// `I(|0⟩) = 2 Σ_pq |β⁽¹⁾_pq|²`.
    pub fn vacuum_qfi(&self) -> f64 {
        2.0 * self.beta1.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Runs [`validate`] and turns a failed report into an error.
    pub fn validated(self) -> Result<Self> {
        let report = validate(&self);
        if report.passed() {
            Ok(self)
        } else {
            Err(Error::Validation(Box::new(report)))
        }
    }

    /// Serializes to the explicit model document; only nonzero entries are written.
    pub fn to_json(&self) -> String {
        let doc = ExplicitDocument {
            modes: self.modes(),
            g: Some(self.g.iter().map(|c| [c.re, c.im]).collect()),
            alpha1: Some(entries(&self.alpha1)),
            beta1: Some(entries(&self.beta1)),
        };
        serde_json::to_string(&doc).expect("model document serializes")
    }
}

fn entries(mat: &DMatrix<C64>) -> Vec<[f64; 4]> {
    let mut out = Vec::new();
    for m in 0..mat.nrows() {
        for n in 0..mat.ncols() {
            let c = mat[(m, n)];
            if c.re != 0.0 || c.im != 0.0 {
                out.push([m as f64, n as f64, c.re, c.im]);
            }
        }
    }
    out
}

fn check_index(k: usize, modes: usize) -> Result<()> {
    if k < modes {
        Ok(())
    } else {
        Err(Error::InvalidMode { mode: k, modes })
    }
}

fn check_pair(k: usize, kprime: usize, modes: usize) -> Result<()> {
    check_index(k, modes)?;
    check_index(kprime, modes)?;
    if k == kprime {
        return Err(Error::InvalidArgument(format!("mode pair needs k != k' (got {k} twice)")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    /// `|G_n| = 1`
    UnitPhase,
    /// `G*_m α⁽¹⁾_mn + G_n α⁽¹⁾*_nm = 0`
    AlphaAntiHermitian,
    /// `G*_m β⁽¹⁾_mn = G*_n β⁽¹⁾_nm`
    BetaSymmetric,
}

impl Constraint {
    /// Snake-case tag for machine-readable output.
    pub fn tag(self) -> &'static str {
        match self {
            Constraint::UnitPhase => "unit_phase",
            Constraint::AlphaAntiHermitian => "alpha_anti_hermitian",
            Constraint::BetaSymmetric => "beta_symmetric",
        }
    }

    pub const ALL: [Constraint; 3] =
        [Constraint::UnitPhase, Constraint::AlphaAntiHermitian, Constraint::BetaSymmetric];

    fn tolerance(self) -> f64 {
        match self {
            Constraint::UnitPhase => PHASE_TOLERANCE,
            _ => VALIDATION_TOLERANCE,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::UnitPhase => "phase not unit modulus",
            Constraint::AlphaAntiHermitian => "alpha1 unitarity constraint violated",
            Constraint::BetaSymmetric => "beta1 symmetry constraint violated",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub constraint: Constraint,
    /// `(m, n)`; for [`Constraint::UnitPhase`] both entries are the mode index.
    pub indices: (usize, usize),
    pub residual: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, n) = self.indices;
        write!(f, "{} at ({m},{n}), residual {:e}", self.constraint, self.residual)
    }
}

/// Worst residual found for each constraint, plus the ones above tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub worst: Vec<Violation>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn worst_residual(&self, constraint: Constraint) -> f64 {
        self.worst.iter().find(|v| v.constraint == constraint).map_or(0.0, |v| v.residual)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "passed");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks the unit-phase and both first-order unitarity constraints.
pub fn validate(spec: &BogoliubovFirstOrder) -> ValidationReport {
    let g = &spec.g;
    let (a, b) = (&spec.alpha1, &spec.beta1);
    let m_count = spec.modes();
    let mut worst: Vec<Violation> = Vec::with_capacity(3);

    let mut record = |constraint: Constraint, indices: (usize, usize), residual: f64| {
        match worst.iter_mut().find(|v| v.constraint == constraint) {
            Some(v) if v.residual >= residual => {}
            Some(v) => {
                v.indices = indices;
                v.residual = residual;
            }
            None => worst.push(Violation { constraint, indices, residual }),
        }
    };

    for (n, gn) in g.iter().enumerate() {
        record(Constraint::UnitPhase, (n, n), (gn.norm() - 1.0).abs());
    }
    for m in 0..m_count {
        for n in 0..m_count {
            let alpha_res = g[m].conj() * a[(m, n)] + g[n] * a[(n, m)].conj();
            record(Constraint::AlphaAntiHermitian, (m, n), alpha_res.norm());
            let beta_res = g[m].conj() * b[(m, n)] - g[n].conj() * b[(n, m)];
            record(Constraint::BetaSymmetric, (m, n), beta_res.norm());
        }
    }

    worst.sort_by_key(|v| v.constraint);
    let violations =
        worst.iter().filter(|v| v.residual > v.constraint.tolerance()).cloned().collect();
    ValidationReport { worst, violations }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitDocument {
    modes: usize,
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    g: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha1: Option<Vec<[f64; 4]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta1: Option<Vec<[f64; 4]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BuiltinDocument {
    builtin: String,
    k: usize,
    #[serde(default)]
    kprime: Option<usize>,
    modes: usize,
}

/// Parses, expands and validates a model document.
///
/// Explicit documents list nonzero entries as `[m, n, re, im]`; `G` defaults to all ones.
pub fn load_model(document: &str) -> Result<BogoliubovFirstOrder> {
    let value: Value = serde_json::from_str(document)?;
    let spec = if value.get("builtin").is_some() {
        let doc: BuiltinDocument =
            serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))?;
        builtin(&doc)?
    } else {
        let doc: ExplicitDocument =
            serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))?;
        explicit(&doc)?
    };
    debug!("loaded model with {} modes", spec.modes());
    spec.validated()
}

fn builtin(doc: &BuiltinDocument) -> Result<BogoliubovFirstOrder> {
    let need_partner = || {
        doc.kprime
            .ok_or_else(|| Error::Schema(format!("builtin {} requires \"kprime\"", doc.builtin)))
    };
    let modes = doc.modes;
    if modes == 0 {
        return Err(Error::Schema("\"modes\" must be positive".into()));
    }
    let schema = |e: Error| match e {
        Error::InvalidMode { .. } | Error::InvalidArgument(_) => Error::Schema(e.to_string()),
        other => other,
    };
    match doc.builtin.as_str() {
        "single_mode_squeezer" => {
            if doc.kprime.is_some() {
                return Err(Error::Schema("single_mode_squeezer takes no \"kprime\"".into()));
            }
            BogoliubovFirstOrder::single_mode_squeezer(doc.k, modes).map_err(schema)
        }
        "two_mode_squeezer" => {
            BogoliubovFirstOrder::two_mode_squeezer(doc.k, need_partner()?, modes).map_err(schema)
        }
        "beam_splitter" => {
            BogoliubovFirstOrder::beam_splitter(doc.k, need_partner()?, modes).map_err(schema)
        }
        other => Err(Error::Schema(format!("unknown builtin {other:?}"))),
    }
}

fn explicit(doc: &ExplicitDocument) -> Result<BogoliubovFirstOrder> {
    let modes = doc.modes;
    if modes == 0 {
        return Err(Error::Schema("\"modes\" must be positive".into()));
    }
    let g = match &doc.g {
        Some(list) if list.len() != modes => {
            return Err(Error::Schema(format!("\"G\" has {} entries, expected {modes}", list.len())))
        }
        Some(list) => list.iter().map(|[re, im]| C64::new(*re, *im)).collect(),
        None => vec![C64::new(1.0, 0.0); modes],
    };
    let alpha1 = matrix("alpha1", doc.alpha1.as_deref().unwrap_or(&[]), modes)?;
    let beta1 = matrix("beta1", doc.beta1.as_deref().unwrap_or(&[]), modes)?;
    BogoliubovFirstOrder::new(g, alpha1, beta1)
}

fn matrix(name: &str, list: &[[f64; 4]], modes: usize) -> Result<DMatrix<C64>> {
    let mut mat = DMatrix::zeros(modes, modes);
    let mut seen = vec![false; modes * modes];
    for &[m, n, re, im] in list {
        let m = index(name, m, modes)?;
        let n = index(name, n, modes)?;
        if std::mem::replace(&mut seen[m * modes + n], true) {
            return Err(Error::Schema(format!("duplicate {name} entry ({m},{n})")));
        }
        mat[(m, n)] = C64::new(re, im);
    }
    Ok(mat)
}

fn index(name: &str, raw: f64, modes: usize) -> Result<usize> {
    if raw.fract() != 0.0 || raw < 0.0 || raw >= modes as f64 {
        return Err(Error::Schema(format!("{name} index {raw} is not a mode in 0..{modes}")));
    }
    Ok(raw as usize)
}

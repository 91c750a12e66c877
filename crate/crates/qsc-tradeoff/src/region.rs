//! The six single-letter region formulas evaluated on witness states.

use crate::error::{Result, TradeoffError};
use crate::witness::SigmaWitness;
use qsc_core::channel::{apply, ChannelSpec, IsometrySpec};
use qsc_core::info::{coherent, cond_mutual, h_cond, mutual};
use qsc_core::linalg::{CMatrix, ZERO};
use qsc_core::{StateSpec, SystemLayout};
use serde::{Deserialize, Serialize};

pub const MAX_ENSEMBLE: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Family {
    /// noisy super-dense coding: R ≤ Q + max{ I(A'⟩BX) : H(A'|X) ≤ Q }
    Nsd,
    /// quantum-communication-assisted distillation:
    /// E ≤ Q + max{ I(A'⟩BX) : ½I(A';EE'|X) ≤ Q }
    Mother,
    /// noisy teleportation: Q ≤ max{ I(A'⟩BX) : I(A';B|X) + I(X;BE) ≤ R }
    Ntp,
    /// classical-communication-assisted distillation:
    /// E ≤ max{ I(A'⟩BX) : I(A';EE'|X) + I(X;BE) ≤ R }
    Ed,
    /// entanglement-assisted quantum: Q ≤ min(E + I(A⟩B), ½I(A;B))
    Father,
    /// entanglement-assisted classical: R ≤ max{ I(AX;B) : H(A|X) ≤ E }
    Eac,
}

impl Family {
    pub fn is_static(&self) -> bool {
        matches!(self, Family::Nsd | Family::Mother | Family::Ntp | Family::Ed)
    }

    pub fn axes(&self) -> (&'static str, &'static str) {
        match self {
            Family::Nsd => ("Q", "R"),
            Family::Mother => ("Q", "E"),
            Family::Ntp => ("R", "Q"),
            Family::Ed => ("R", "E"),
            Family::Father => ("E", "Q"),
            Family::Eac => ("E", "R"),
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "NSD" => Family::Nsd,
            "MOTHER" => Family::Mother,
            "NTP" => Family::Ntp,
            "ED" => Family::Ed,
            "FATHER" => Family::Father,
            "EAC" => Family::Eac,
            other => {
                return Err(TradeoffError::FamilyMismatch(format!(
                    "unknown family `{other}`"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Nsd => "NSD",
            Family::Mother => "MOTHER",
            Family::Ntp => "NTP",
            Family::Ed => "ED",
            Family::Father => "FATHER",
            Family::Eac => "EAC",
        }
    }
}

#[derive(Clone, Debug)]
pub enum NoisyObject {
    /// ρ^{AB} on labels (A, B)
    State(StateSpec),
    /// N: Ain → B
    Channel(ChannelSpec),
}

#[derive(Clone, Debug)]
pub struct RegionSpec {
    pub family: Family,
    pub object: NoisyObject,
}

impl RegionSpec {
    pub fn new(family: Family, object: NoisyObject) -> Result<Self> {
        match (&family, &object) {
            (f, NoisyObject::State(_)) if f.is_static() => {}
            (f, NoisyObject::Channel(_)) if !f.is_static() => {}
            _ => {
                return Err(TradeoffError::FamilyMismatch(
                    "static families take states, dynamic families take channels".into(),
                ))
            }
        }
        Ok(RegionSpec { family, object })
    }

    /// Precompute the base data witnesses are evaluated against: the
    /// canonical purification ψ^{ABE} for static families, the isometric
    /// extension U_N for dynamic ones.
    pub fn base(&self) -> Result<RegionBase> {
        match &self.object {
            NoisyObject::State(rho) => {
                let psi = rho.purify("E")?;
                Ok(RegionBase::Static { psi })
            }
            NoisyObject::Channel(n) => {
                let v = n.stinespring("E")?;
                Ok(RegionBase::Dynamic { dilation: v, in_dim: n.in_layout().total_dim() })
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum RegionBase {
    Static { psi: StateSpec },
    Dynamic { dilation: IsometrySpec, in_dim: usize },
}

/// One witness evaluated under a family formula.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EvalPoint {
    /// the budgeted quantity (for FATHER: the coherent-information bound
    /// offset I(A⟩B)_σ, which the budget E is added to)
    pub constraint: f64,
    /// the maximized quantity (for FATHER: ½I(A;B)_σ)
    pub objective: f64,
}

/// Build σ^{X A' B E E'} from an ensemble-of-isometries witness acting on
/// Alice's share of ψ^{ABE}.
fn sigma_from_ensemble(
    psi: &StateSpec,
    probs: &[f64],
    isometries: &[CMatrix],
) -> Result<StateSpec> {
    let da = psi.layout().dim_of("A")?;
    let nx = probs.len();
    let (dout, dinw) = (isometries[0].rows(), isometries[0].cols());
    if dinw != da {
        return Err(TradeoffError::InvalidWitness(format!(
            "isometry shape {dout}x{dinw} against input dimension {da}"
        )));
    }
    // choose (dA', dE') with dA' * dE' = dout; the witness carries dA' = da
    let dap = da.min(dout);
    let dep = dout / dap;
    if dap * dep != dout {
        return Err(TradeoffError::InvalidWitness(
            "isometry output does not factor".into(),
        ));
    }
    let mut total: Option<StateSpec> = None;
    for (x, (p, u)) in probs.iter().zip(isometries).enumerate() {
        let iso = IsometrySpec::new(
            SystemLayout::single("A", da)?,
            SystemLayout::new(vec![("Ap", dap), ("Ep", dep)])?,
            u.clone(),
        )?;
        let branch = apply(&iso, psi, &["A"])?;
        // weight and flag with |x><x|
        let d = branch.dim();
        let mut m = CMatrix::zeros(d * nx, d * nx);
        for i in 0..d {
            for j in 0..d {
                let v = branch.matrix()[(i, j)];
                if v != ZERO {
                    m[(i * nx + x, j * nx + x)] = v * qsc_core::linalg::C64::new(*p, 0.0);
                }
            }
        }
        let layout = branch
            .layout()
            .concat(&SystemLayout::single("X", nx)?)?;
        let flagged = StateSpec::new_unchecked(layout, m);
        total = Some(match total {
            None => flagged,
            Some(acc) => StateSpec::new_unchecked(
                acc.layout().clone(),
                acc.matrix().add(flagged.matrix()),
            ),
        });
    }
    Ok(total.expect("nonempty ensemble"))
}

/// Build σ from an instrument witness W: A → A'E'X (pure branches, X
/// dephased by construction of the classical flag).
fn sigma_from_instrument(psi: &StateSpec, w: &CMatrix, nx: usize) -> Result<StateSpec> {
    let da = psi.layout().dim_of("A")?;
    let dout = w.rows();
    if w.cols() != da || dout % nx != 0 {
        return Err(TradeoffError::InvalidWitness(format!(
            "instrument isometry shape {}x{} with {nx} outcomes",
            w.rows(),
            w.cols()
        )));
    }
    let dq = dout / nx; // A'E'
    let dap = da.min(dq);
    let dep = dq / dap;
    if dap * dep != dq {
        return Err(TradeoffError::InvalidWitness(
            "instrument output does not factor".into(),
        ));
    }
    // per-branch operators V_x: rows x*? — W maps |a⟩ to Σ |ap ep x⟩; branch
    // operator takes rows with X-digit = x (layout order Ap, Ep, X)
    let mut total: Option<StateSpec> = None;
    for x in 0..nx {
        let mut v = CMatrix::zeros(dq, da);
        for ap_ep in 0..dq {
            for a in 0..da {
                v[(ap_ep, a)] = w[(ap_ep * nx + x, a)];
            }
        }
        let branch_op = ChannelSpec::new_cp(
            SystemLayout::single("A", da)?,
            SystemLayout::new(vec![("Ap", dap), ("Ep", dep)])?,
            vec![v],
        )?;
        let branch = apply(&branch_op, psi, &["A"])?;
        let d = branch.dim();
        let mut m = CMatrix::zeros(d * nx, d * nx);
        for i in 0..d {
            for j in 0..d {
                let val = branch.matrix()[(i, j)];
                if val != ZERO {
                    m[(i * nx + x, j * nx + x)] = val;
                }
            }
        }
        let layout = branch
            .layout()
            .concat(&SystemLayout::single("X", nx)?)?;
        let flagged = StateSpec::new_unchecked(layout, m);
        total = Some(match total {
            None => flagged,
            Some(acc) => StateSpec::new_unchecked(
                acc.layout().clone(),
                acc.matrix().add(flagged.matrix()),
            ),
        });
    }
    Ok(total.expect("nonempty instrument"))
}

/// σ^{ABE} for the father: send half of a pure input through the dilation.
fn sigma_father(dilation: &IsometrySpec, in_dim: usize, vector: &[qsc_core::C64], dim_a: usize) -> Result<StateSpec> {
    if vector.len() != dim_a * in_dim {
        return Err(TradeoffError::InvalidWitness(format!(
            "input vector length {} vs {}x{}",
            vector.len(),
            dim_a,
            in_dim
        )));
    }
    let layout = SystemLayout::new(vec![("A", dim_a), ("Ain", in_dim)])?;
    let phi = StateSpec::pure(layout, vector)?;
    Ok(apply(dilation, &phi, &["Ain"])?)
}

/// σ^{XAB} for entanglement-assisted classical communication.
fn sigma_eac(
    dilation: &IsometrySpec,
    in_dim: usize,
    probs: &[f64],
    vectors: &[Vec<qsc_core::C64>],
    dim_a: usize,
) -> Result<StateSpec> {
    let nx = probs.len();
    let mut total: Option<StateSpec> = None;
    for (x, (p, v)) in probs.iter().zip(vectors).enumerate() {
        let layout = SystemLayout::new(vec![("A", dim_a), ("Ain", in_dim)])?;
        let phi = StateSpec::pure(layout, v)?;
        let out = apply(dilation, &phi, &["Ain"])?;
        let d = out.dim();
        let mut m = CMatrix::zeros(d * nx, d * nx);
        for i in 0..d {
            for j in 0..d {
                let val = out.matrix()[(i, j)];
                if val != ZERO {
                    m[(i * nx + x, j * nx + x)] = val * qsc_core::linalg::C64::new(*p, 0.0);
                }
            }
        }
        let layout = out.layout().concat(&SystemLayout::single("X", nx)?)?;
        let flagged = StateSpec::new_unchecked(layout, m);
        total = Some(match total {
            None => flagged,
            Some(acc) => StateSpec::new_unchecked(
                acc.layout().clone(),
                acc.matrix().add(flagged.matrix()),
            ),
        });
    }
    Ok(total.expect("nonempty ensemble"))
}

/// Evaluate a witness under a family's formula: returns the constraint side
/// and the objective side of the region description.
pub fn eval_point(family: Family, base: &RegionBase, witness: &SigmaWitness) -> Result<EvalPoint> {
    witness.validate()?;
    match (family, base, witness) {
        (Family::Mother, RegionBase::Static { psi }, SigmaWitness::Ensemble { probs, isometries }) => {
            if probs.len() > MAX_ENSEMBLE {
                return Err(TradeoffError::InvalidWitness("ensemble too large".into()));
            }
            let sigma = sigma_from_ensemble(psi, probs, isometries)?;
            let constraint = 0.5 * cond_mutual(&sigma, &["Ap"], &["E", "Ep"], &["X"])?;
            let objective = coherent(&sigma, &["Ap"], &["B", "X"])?;
            Ok(EvalPoint { constraint, objective })
        }
        (Family::Nsd, RegionBase::Static { psi }, SigmaWitness::Ensemble { probs, isometries }) => {
            if probs.len() > MAX_ENSEMBLE {
                return Err(TradeoffError::InvalidWitness("ensemble too large".into()));
            }
            let sigma = sigma_from_ensemble(psi, probs, isometries)?;
            let constraint = h_cond(&sigma, &["Ap"], &["X"])?;
            let objective = coherent(&sigma, &["Ap"], &["B", "X"])?;
            Ok(EvalPoint { constraint, objective })
        }
        (Family::Ntp, RegionBase::Static { psi }, SigmaWitness::Instrument { w, nx }) => {
            if *nx > MAX_ENSEMBLE {
                return Err(TradeoffError::InvalidWitness("ensemble too large".into()));
            }
            let sigma = sigma_from_instrument(psi, w, *nx)?;
            let constraint = cond_mutual(&sigma, &["Ap"], &["B"], &["X"])?
                + mutual(&sigma, &["X"], &["B", "E"])?;
            let objective = coherent(&sigma, &["Ap"], &["B", "X"])?;
            Ok(EvalPoint { constraint, objective })
        }
        (Family::Ed, RegionBase::Static { psi }, SigmaWitness::Instrument { w, nx }) => {
            if *nx > MAX_ENSEMBLE {
                return Err(TradeoffError::InvalidWitness("ensemble too large".into()));
            }
            let sigma = sigma_from_instrument(psi, w, *nx)?;
            let constraint = cond_mutual(&sigma, &["Ap"], &["E", "Ep"], &["X"])?
                + mutual(&sigma, &["X"], &["B", "E"])?;
            let objective = coherent(&sigma, &["Ap"], &["B", "X"])?;
            Ok(EvalPoint { constraint, objective })
        }
        (Family::Father, RegionBase::Dynamic { dilation, in_dim }, SigmaWitness::PureInput { vector, dim_a }) => {
            let sigma = sigma_father(dilation, *in_dim, vector, *dim_a)?;
            // constraint slot: I(A⟩B); objective slot: ½I(A;B)
            let icoh = coherent(&sigma, &["A"], &["B"])?;
            let half_mutual = 0.5 * mutual(&sigma, &["A"], &["B"])?;
            Ok(EvalPoint { constraint: icoh, objective: half_mutual })
        }
        (Family::Eac, RegionBase::Dynamic { dilation, in_dim }, SigmaWitness::InputEnsemble { probs, vectors, dim_a }) => {
            if probs.len() > MAX_ENSEMBLE {
                return Err(TradeoffError::InvalidWitness("ensemble too large".into()));
            }
            let sigma = sigma_eac(dilation, *in_dim, probs, vectors, *dim_a)?;
            let constraint = h_cond(&sigma, &["A"], &["X"])?;
            let objective = mutual(&sigma, &["A", "X"], &["B"])?;
            Ok(EvalPoint { constraint, objective })
        }
        _ => Err(TradeoffError::InvalidWitness(
            "witness kind does not fit the family".into(),
        )),
    }
}

/// The boundary value at a given budget implied by a feasible witness point.
pub fn boundary_value(family: Family, budget: f64, point: &EvalPoint) -> f64 {
    match family {
        Family::Nsd | Family::Mother => budget + point.objective,
        Family::Ntp | Family::Ed | Family::Eac => point.objective,
        Family::Father => (budget + point.constraint).min(point.objective),
    }
}

/// Is the witness feasible at this budget?
pub fn feasible(family: Family, budget: f64, point: &EvalPoint) -> bool {
    match family {
        Family::Father => true,
        _ => point.constraint <= budget + 1e-9,
    }
}

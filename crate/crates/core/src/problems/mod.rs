//! Linear boundary value problems as derivative stencils.
//!
//! An interior operator is a list of terms `(row, component, derivative,
//! coefficient)`; row `k` of `𝓛u` at `x` is `Σ c(x) ∂^α u_component(x)`
//! over the terms of that row. Boundary operators are the same with first
//! derivatives at most and coefficients that may depend on the normal.

mod coefficient;
mod exact;

pub use coefficient::HomogenizationCoefficient;
pub use exact::{
    Constant, HelmholtzMultiMode, HelmholtzSmooth, HoledPlate, ManufacturedSolution, PoissonProduct, StokesPolynomial,
    Timoshenko,
};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RfmError};
use crate::geometry::{Domain, Point, Segment, Side};
use crate::jet::{Deriv, Jet};

pub type ScalarField = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
/// Right-hand side of the interior rows at a point.
pub type VectorField = Arc<dyn Fn(&Point) -> Vec<f64> + Send + Sync>;
/// Right-hand side of the boundary rows at a point with outward normal.
pub type BoundaryField = Arc<dyn Fn(&Point, &Point) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub enum Coefficient {
    Constant(f64),
    Field(ScalarField),
}

impl Coefficient {
    pub fn at(&self, x: &Point) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Field(f) => f(x),
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(c) => write!(f, "{c}"),
            Coefficient::Field(_) => write!(f, "c(x)"),
        }
    }
}

/// Boundary coefficient; `Normal(axis, s)` is `s · n[axis]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCoefficient {
    Constant(f64),
    Normal(usize, f64),
}

impl BoundaryCoefficient {
    pub fn at(&self, n: &Point) -> f64 {
        match *self {
            BoundaryCoefficient::Constant(c) => c,
            BoundaryCoefficient::Normal(axis, s) => s * n[axis],
        }
    }
}

#[derive(Debug, Clone)]
pub struct StencilTerm {
    pub row: usize,
    pub component: usize,
    pub deriv: Deriv,
    pub coef: Coefficient,
}

#[derive(Debug, Clone)]
pub struct OperatorStencil {
    pub rows: usize,
    pub components: usize,
    pub terms: Vec<StencilTerm>,
}

impl OperatorStencil {
    pub fn new(components: usize, terms: Vec<StencilTerm>) -> Result<Self> {
        let rows = check_terms(components, terms.iter().map(|t| (t.row, t.component, t.deriv)), 2)?;
        Ok(Self { rows, components, terms })
    }

    /// `weights[row][component]` such that row `k` applied to jets `u` is
    /// `Σ_c weights[k][c] · u_c`.
    pub fn weights(&self, x: &Point) -> Vec<Vec<[f64; 6]>> {
        let mut w = vec![vec![[0.0; 6]; self.components]; self.rows];
        for t in &self.terms {
            w[t.row][t.component][t.deriv.index()] += t.coef.at(x);
        }
        w
    }

    pub fn apply(&self, x: &Point, jets: &[Jet]) -> Vec<f64> {
        apply_weights(&self.weights(x), jets)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryTerm {
    pub row: usize,
    pub component: usize,
    pub deriv: Deriv,
    pub coef: BoundaryCoefficient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryStencil {
    pub rows: usize,
    pub components: usize,
    pub terms: Vec<BoundaryTerm>,
}

impl BoundaryStencil {
    pub fn new(components: usize, terms: Vec<BoundaryTerm>) -> Result<Self> {
        let rows = check_terms(components, terms.iter().map(|t| (t.row, t.component, t.deriv)), 1)?;
        Ok(Self { rows, components, terms })
    }

    /// Prescribes every component's value.
    pub fn dirichlet(components: usize) -> Self {
        let terms = (0..components)
            .map(|c| BoundaryTerm { row: c, component: c, deriv: Deriv::Value, coef: BoundaryCoefficient::Constant(1.0) })
            .collect();
        Self { rows: components, components, terms }
    }

    pub fn weights(&self, n: &Point) -> Vec<Vec<[f64; 6]>> {
        let mut w = vec![vec![[0.0; 6]; self.components]; self.rows];
        for t in &self.terms {
            w[t.row][t.component][t.deriv.index()] += t.coef.at(n);
        }
        w
    }

    pub fn apply(&self, n: &Point, jets: &[Jet]) -> Vec<f64> {
        apply_weights(&self.weights(n), jets)
    }
}

fn apply_weights(w: &[Vec<[f64; 6]>], jets: &[Jet]) -> Vec<f64> {
    w.iter().map(|row| row.iter().zip(jets).map(|(wc, j)| j.dot(wc)).sum()).collect()
}

/// Validates term indices and returns the row count.
fn check_terms(components: usize, terms: impl Iterator<Item = (usize, usize, Deriv)>, max_order: usize) -> Result<usize> {
    let mut rows = std::collections::BTreeSet::new();
    for (row, c, d) in terms {
        if c >= components {
            return Err(RfmError::InvalidProblem(format!("term refers to component {c} of {components}")));
        }
        if d.order() > max_order {
            return Err(RfmError::InvalidProblem(format!("derivative {d:?} exceeds order {max_order}")));
        }
        rows.insert(row);
    }
    let n = rows.len();
    if n == 0 || rows.iter().enumerate().any(|(i, &r)| i != r) {
        return Err(RfmError::InvalidProblem(format!("stencil rows {rows:?} are not 0..{n}")));
    }
    Ok(n)
}

/// A boundary operator, the segments it acts on, and its data.
#[derive(Clone)]
pub struct BoundaryCondition {
    pub stencil: BoundaryStencil,
    pub segments: Vec<Segment>,
    pub data: BoundaryField,
}

impl fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryCondition")
            .field("stencil", &self.stencil)
            .field("segments", &self.segments)
            .finish_non_exhaustive()
    }
}

/// `u_component(point) = value`, e.g. a pressure pin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointCondition {
    pub point: Point,
    pub component: usize,
    pub value: f64,
}

#[derive(Clone)]
pub struct PdeProblem {
    pub domain: Domain,
    pub operator: OperatorStencil,
    pub forcing: VectorField,
    pub boundary: Vec<BoundaryCondition>,
    pub exact: Option<Arc<dyn ManufacturedSolution>>,
    pub point_conditions: Vec<PointCondition>,
}

impl fmt::Debug for PdeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PdeProblem")
            .field("domain", &self.domain)
            .field("operator", &self.operator)
            .field("boundary", &self.boundary)
            .field("exact", &self.exact)
            .field("point_conditions", &self.point_conditions)
            .finish_non_exhaustive()
    }
}

impl PdeProblem {
    /// Checks component counts and that every boundary segment of the
    /// domain is covered by exactly one condition.
    pub fn new(
        domain: Domain,
        operator: OperatorStencil,
        forcing: VectorField,
        boundary: Vec<BoundaryCondition>,
        exact: Option<Arc<dyn ManufacturedSolution>>,
        point_conditions: Vec<PointCondition>,
    ) -> Result<Self> {
        let k = operator.components;
        if operator.rows != k {
            return Err(RfmError::InvalidProblem(format!(
                "{} interior rows for {k} unknown components",
                operator.rows
            )));
        }
        let kb = boundary.first().map(|b| b.stencil.rows).unwrap_or(0);
        for bc in &boundary {
            if bc.stencil.components != k || bc.stencil.rows != kb {
                return Err(RfmError::InvalidProblem("boundary conditions disagree in shape".into()));
            }
        }
        if let Some(e) = &exact {
            if e.components() != k {
                return Err(RfmError::InvalidProblem("exact solution has the wrong component count".into()));
            }
        }
        for pc in &point_conditions {
            if pc.component >= k {
                return Err(RfmError::InvalidProblem(format!("point condition on component {}", pc.component)));
            }
        }
        let mut seen: BTreeMap<Segment, usize> = BTreeMap::new();
        for bc in &boundary {
            for s in &bc.segments {
                *seen.entry(*s).or_default() += 1;
            }
        }
        let segments = domain.segments();
        for s in &segments {
            match seen.get(s) {
                None => return Err(RfmError::UncoveredSegment(s.to_string())),
                Some(&n) if n > 1 => {
                    return Err(RfmError::InvalidProblem(format!("{s} is covered {n} times")));
                }
                _ => {}
            }
        }
        if let Some(extra) = seen.keys().find(|s| !segments.contains(s)) {
            return Err(RfmError::InvalidProblem(format!("{extra} is not part of the domain")));
        }
        Ok(Self { domain, operator, forcing, boundary, exact, point_conditions })
    }

    /// `K_I`: interior rows per point, equal to the component count.
    pub fn interior_rows(&self) -> usize {
        self.operator.rows
    }

    /// `K_B`: boundary rows per point.
    pub fn boundary_rows(&self) -> usize {
        self.boundary[0].stencil.rows
    }

    pub fn components(&self) -> usize {
        self.operator.components
    }

    pub fn condition_for(&self, segment: Segment) -> &BoundaryCondition {
        self.boundary
            .iter()
            .find(|b| b.segments.contains(&segment))
            .expect("segment coverage is checked on construction")
    }
}

fn term(row: usize, component: usize, deriv: Deriv, c: f64) -> StencilTerm {
    StencilTerm { row, component, deriv, coef: Coefficient::Constant(c) }
}

fn bterm(row: usize, component: usize, deriv: Deriv, coef: BoundaryCoefficient) -> BoundaryTerm {
    BoundaryTerm { row, component, deriv, coef }
}

/// Forcing generated by applying `op` to the exact solution.
fn manufactured_forcing(op: &OperatorStencil, exact: &Arc<dyn ManufacturedSolution>) -> VectorField {
    let (op, exact) = (op.clone(), exact.clone());
    Arc::new(move |x: &Point| op.apply(x, &exact.jets(x)))
}

fn manufactured_data(st: &BoundaryStencil, exact: &Arc<dyn ManufacturedSolution>) -> BoundaryField {
    let (st, exact) = (st.clone(), exact.clone());
    Arc::new(move |x: &Point, n: &Point| st.apply(n, &exact.jets(x)))
}

/// `u'' - λu = f` with Dirichlet data at both ends.
pub fn make_helmholtz_1d(domain: Domain, lambda: f64, exact: Arc<dyn ManufacturedSolution>) -> Result<PdeProblem> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(RfmError::InvalidProblem(format!("Helmholtz parameter {lambda}")));
    }
    if domain.dim() != 1 {
        return Err(RfmError::InvalidProblem("Helmholtz problem needs an interval".into()));
    }
    let op = OperatorStencil::new(1, vec![term(0, 0, Deriv::Dxx, 1.0), term(0, 0, Deriv::Value, -lambda)])?;
    dirichlet_problem(domain, op, exact)
}

/// `Δu = f` with Dirichlet data on the whole boundary.
pub fn make_poisson_2d(domain: Domain, exact: Arc<dyn ManufacturedSolution>) -> Result<PdeProblem> {
    let op = OperatorStencil::new(1, vec![term(0, 0, Deriv::Dxx, 1.0), term(0, 0, Deriv::Dyy, 1.0)])?;
    dirichlet_problem(domain, op, exact)
}

fn dirichlet_problem(domain: Domain, op: OperatorStencil, exact: Arc<dyn ManufacturedSolution>) -> Result<PdeProblem> {
    let st = BoundaryStencil::dirichlet(op.components);
    let bc = BoundaryCondition { data: manufactured_data(&st, &exact), stencil: st, segments: domain.segments() };
    let forcing = manufactured_forcing(&op, &exact);
    PdeProblem::new(domain, op, forcing, vec![bc], Some(exact), Vec::new())
}

/// Isotropic material in plane stress.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElasticityConstants {
    /// Young's modulus in Pa.
    pub e: f64,
    pub nu: f64,
}

impl ElasticityConstants {
    pub fn new(e: f64, nu: f64) -> Result<Self> {
        if !(e > 0.0 && e.is_finite()) || !(nu > 0.0 && nu < 0.5) {
            return Err(RfmError::InvalidProblem(format!("elastic constants E={e}, nu={nu}")));
        }
        Ok(Self { e, nu })
    }

    /// `E / (1 - ν²)`.
    pub fn plane_stress_modulus(&self) -> f64 {
        self.e / (1.0 - self.nu * self.nu)
    }

    pub fn shear_modulus(&self) -> f64 {
        self.e / (2.0 * (1.0 + self.nu))
    }

    /// `(σ_x, σ_y, τ_xy)` from the displacement gradient.
    pub fn stress(&self, u: &Jet, v: &Jet) -> [f64; 3] {
        let (c, g, nu) = (self.plane_stress_modulus(), self.shear_modulus(), self.nu);
        let (ux, uy, vx, vy) = (u.0[1], u.0[2], v.0[1], v.0[2]);
        [c * (ux + nu * vy), c * (vy + nu * ux), g * (uy + vx)]
    }

    /// Rows of `-div σ(u)`.
    pub fn interior_stencil(&self) -> OperatorStencil {
        let (c, g, nu) = (self.plane_stress_modulus(), self.shear_modulus(), self.nu);
        let terms = vec![
            term(0, 0, Deriv::Dxx, -c),
            term(0, 0, Deriv::Dyy, -g),
            term(0, 1, Deriv::Dxy, -(c * nu + g)),
            term(1, 1, Deriv::Dxx, -g),
            term(1, 1, Deriv::Dyy, -c),
            term(1, 0, Deriv::Dxy, -(g + c * nu)),
        ];
        OperatorStencil::new(2, terms).expect("well-formed elasticity stencil")
    }

    /// Rows of the traction `σ(u) n`.
    pub fn traction_stencil(&self) -> BoundaryStencil {
        use BoundaryCoefficient::Normal;
        let (c, g, nu) = (self.plane_stress_modulus(), self.shear_modulus(), self.nu);
        let terms = vec![
            bterm(0, 0, Deriv::Dx, Normal(0, c)),
            bterm(0, 1, Deriv::Dy, Normal(0, c * nu)),
            bterm(0, 0, Deriv::Dy, Normal(1, g)),
            bterm(0, 1, Deriv::Dx, Normal(1, g)),
            bterm(1, 0, Deriv::Dy, Normal(0, g)),
            bterm(1, 1, Deriv::Dx, Normal(0, g)),
            bterm(1, 1, Deriv::Dy, Normal(1, c)),
            bterm(1, 0, Deriv::Dx, Normal(1, c * nu)),
        ];
        BoundaryStencil::new(2, terms).expect("well-formed traction stencil")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    /// Displacement prescribed.
    Dirichlet,
    /// Traction prescribed.
    Neumann,
}

/// `-div σ(u) = B` with displacement or traction data per segment, all data
/// generated from `exact`.
pub fn make_elasticity_2d(
    constants: ElasticityConstants,
    domain: Domain,
    assignment: &[(Segment, BoundaryKind)],
    exact: Arc<dyn ManufacturedSolution>,
) -> Result<PdeProblem> {
    if domain.dim() != 2 {
        return Err(RfmError::InvalidProblem("elasticity needs a 2D domain".into()));
    }
    let op = constants.interior_stencil();
    let mut boundary = Vec::new();
    for (kind, stencil) in [
        (BoundaryKind::Dirichlet, BoundaryStencil::dirichlet(2)),
        (BoundaryKind::Neumann, constants.traction_stencil()),
    ] {
        let segments: Vec<Segment> = assignment.iter().filter(|(_, k)| *k == kind).map(|(s, _)| *s).collect();
        if !segments.is_empty() {
            boundary.push(BoundaryCondition { data: manufactured_data(&stencil, &exact), stencil, segments });
        }
    }
    let forcing = manufactured_forcing(&op, &exact);
    PdeProblem::new(domain, op, forcing, boundary, Some(exact), Vec::new())
}

/// Plane-stress stresses of the manufactured displacement at `x`.
pub fn exact_stress(constants: &ElasticityConstants, exact: &dyn ManufacturedSolution, x: &Point) -> [f64; 3] {
    constants.stress(&exact.jet(x, 0), &exact.jet(x, 1))
}

/// Rows `-Δu + ∇p` and `div u` for components `(u, v, p)`.
pub fn stokes_stencil() -> OperatorStencil {
    let terms = vec![
        term(0, 0, Deriv::Dxx, -1.0),
        term(0, 0, Deriv::Dyy, -1.0),
        term(0, 2, Deriv::Dx, 1.0),
        term(1, 1, Deriv::Dxx, -1.0),
        term(1, 1, Deriv::Dyy, -1.0),
        term(1, 2, Deriv::Dy, 1.0),
        term(2, 0, Deriv::Dx, 1.0),
        term(2, 1, Deriv::Dy, 1.0),
    ];
    OperatorStencil::new(3, terms).expect("well-formed Stokes stencil")
}

fn velocity_stencil() -> BoundaryStencil {
    BoundaryStencil::new(
        3,
        vec![
            bterm(0, 0, Deriv::Value, BoundaryCoefficient::Constant(1.0)),
            bterm(1, 1, Deriv::Value, BoundaryCoefficient::Constant(1.0)),
        ],
    )
    .expect("well-formed velocity stencil")
}

/// Stokes flow with velocity data from `exact` on the whole boundary and
/// the pressure pinned to its exact value at `pin`.
pub fn make_stokes_2d(domain: Domain, exact: Arc<dyn ManufacturedSolution>, pin: Point) -> Result<PdeProblem> {
    check_pin(&domain, &pin)?;
    let op = stokes_stencil();
    let st = velocity_stencil();
    let bc = BoundaryCondition { data: manufactured_data(&st, &exact), stencil: st, segments: domain.segments() };
    let pc = PointCondition { point: pin, component: 2, value: exact.value(&pin, 2) };
    let forcing = manufactured_forcing(&op, &exact);
    PdeProblem::new(domain, op, forcing, vec![bc], Some(exact), vec![pc])
}

/// Force-free Stokes flow through a channel: parabolic inflow and outflow
/// `(y(1-y), 0)` on the left and right edges, no slip elsewhere, pressure
/// pinned to zero at `pin`.
pub fn make_channel_flow(domain: Domain, pin: Point) -> Result<PdeProblem> {
    check_pin(&domain, &pin)?;
    if domain.dim() != 2 || domain.is_disk() {
        return Err(RfmError::InvalidProblem("channel flow needs a rectangle".into()));
    }
    let op = stokes_stencil();
    let st = velocity_stencil();
    let open: Vec<Segment> = vec![Segment::Edge(Side::Left), Segment::Edge(Side::Right)];
    let walls: Vec<Segment> = domain.segments().into_iter().filter(|s| !open.contains(s)).collect();
    let parabolic: BoundaryField = Arc::new(|x: &Point, _n: &Point| vec![x[1] * (1.0 - x[1]), 0.0]);
    let still: BoundaryField = Arc::new(|_x: &Point, _n: &Point| vec![0.0, 0.0]);
    let boundary = vec![
        BoundaryCondition { stencil: st.clone(), segments: open, data: parabolic },
        BoundaryCondition { stencil: st, segments: walls, data: still },
    ];
    let forcing: VectorField = Arc::new(|_x: &Point| vec![0.0; 3]);
    PdeProblem::new(domain, op, forcing, boundary, None, vec![PointCondition { point: pin, component: 2, value: 0.0 }])
}

fn check_pin(domain: &Domain, pin: &Point) -> Result<()> {
    if domain.contains(pin) == crate::geometry::Membership::Exterior {
        return Err(RfmError::InvalidProblem(format!("pin point {pin:?} lies outside the domain")));
    }
    Ok(())
}

/// `-div(a ∇u) = f` with `u = 0` on the boundary.
pub fn make_varcoef_elliptic(domain: Domain, coef: HomogenizationCoefficient, forcing: f64) -> Result<PdeProblem> {
    let coef = Arc::new(coef);
    let field = |f: fn(&HomogenizationCoefficient, &Point) -> f64| -> Coefficient {
        let coef = coef.clone();
        Coefficient::Field(Arc::new(move |x: &Point| f(&coef, x)))
    };
    let terms = vec![
        StencilTerm { row: 0, component: 0, deriv: Deriv::Dxx, coef: field(|a, x| -a.value(x)) },
        StencilTerm { row: 0, component: 0, deriv: Deriv::Dyy, coef: field(|a, x| -a.value(x)) },
        StencilTerm { row: 0, component: 0, deriv: Deriv::Dx, coef: field(|a, x| -a.gradient(x)[0]) },
        StencilTerm { row: 0, component: 0, deriv: Deriv::Dy, coef: field(|a, x| -a.gradient(x)[1]) },
    ];
    let op = OperatorStencil::new(1, terms)?;
    let bc = BoundaryCondition {
        stencil: BoundaryStencil::dirichlet(1),
        segments: domain.segments(),
        data: Arc::new(|_x: &Point, _n: &Point| vec![0.0]),
    };
    let f: VectorField = Arc::new(move |_x: &Point| vec![forcing]);
    PdeProblem::new(domain, op, f, vec![bc], None, Vec::new())
}

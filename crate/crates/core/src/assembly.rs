//! Collocation least-squares system: one row per condition per point.

use std::io::{Read, Write};
use std::path::Path;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::basis::{PatchRef, PouKind, RfmModel};
use crate::error::{Result, RfmError};
use crate::geometry::{CollocationSet, Point};
use crate::jet::Jet;
use crate::problems::PdeProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowKind {
    Interior,
    Boundary,
    InterfaceValue,
    InterfaceDerivative,
    PointPin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowMeta {
    pub kind: RowKind,
    pub point: Point,
    /// Interior or boundary row index `k` / `ℓ`; zero for other kinds.
    pub condition: usize,
    /// Component continued across an interface or pinned; zero otherwise.
    pub component: usize,
    /// Set by [`rescale`] when the row has no nonzero entry.
    pub zero_row: bool,
}

/// How a rescaling weight enters the loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualScale {
    /// The residual is multiplied by `λ`; every weighted row then has
    /// max-abs entry `c`.
    #[default]
    Lambda,
    /// The residual is multiplied by `√λ`, so `λ` is the quadratic weight.
    SqrtLambda,
}

/// `A`, `b`, per-row residual multipliers and row metadata.
#[derive(Debug, Clone)]
pub struct WeightedSystem {
    pub matrix: Mat<f64>,
    pub rhs: Vec<f64>,
    pub weights: Vec<f64>,
    pub meta: Vec<RowMeta>,
    pub components: usize,
}

impl WeightedSystem {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn weighted_matrix(&self) -> Mat<f64> {
        Mat::from_fn(self.rows(), self.cols(), |i, j| self.weights[i] * self.matrix[(i, j)])
    }

    pub fn weighted_rhs(&self) -> Vec<f64> {
        self.rhs.iter().zip(&self.weights).map(|(b, w)| w * b).collect()
    }

    pub fn zero_rows(&self) -> Vec<usize> {
        self.meta.iter().enumerate().filter(|(_, m)| m.zero_row).map(|(i, _)| i).collect()
    }

    pub fn row_max_abs(&self, i: usize) -> f64 {
        (0..self.cols()).fold(0.0, |m, j| f64::max(m, self.matrix[(i, j)].abs()))
    }

    /// Writes the little-endian dump: `N`, `M`, `K_I` as u64, then the
    /// weighted matrix row-major, the weighted right-hand side and the
    /// weights as f64.
    pub fn write_dump(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        for v in [self.rows(), self.cols(), self.components] {
            out.write_all(&(v as u64).to_le_bytes())?;
        }
        for i in 0..self.rows() {
            let w = self.weights[i];
            for j in 0..self.cols() {
                out.write_all(&(w * self.matrix[(i, j)]).to_le_bytes())?;
            }
        }
        for v in self.weighted_rhs().iter().chain(&self.weights) {
            out.write_all(&v.to_le_bytes())?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Contents of a system dump.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemDump {
    pub rows: usize,
    pub cols: usize,
    pub components: usize,
    /// Weighted matrix, row-major.
    pub matrix: Vec<f64>,
    pub rhs: Vec<f64>,
    pub weights: Vec<f64>,
}

pub fn read_dump(path: &Path) -> Result<SystemDump> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut words = bytes.chunks_exact(8).map(|c| <[u8; 8]>::try_from(c).expect("8-byte chunk"));
    let mut header = || words.next().map(u64::from_le_bytes).map(|v| v as usize);
    let (rows, cols, components) = match (header(), header(), header()) {
        (Some(n), Some(m), Some(k)) => (n, m, k),
        _ => return Err(RfmError::DimensionMismatch("truncated dump header".into())),
    };
    let values: Vec<f64> = words.map(f64::from_le_bytes).collect();
    if bytes.len() % 8 != 0 || values.len() != rows * cols + 2 * rows {
        return Err(RfmError::DimensionMismatch(format!("dump payload does not match {rows}x{cols}")));
    }
    let (matrix, rest) = values.split_at(rows * cols);
    let (rhs, weights) = rest.split_at(rows);
    Ok(SystemDump { rows, cols, components, matrix: matrix.to_vec(), rhs: rhs.to_vec(), weights: weights.to_vec() })
}

/// Row counts by kind.
fn count_rows(problem: &PdeProblem, model: &RfmModel, colloc: &CollocationSet) -> (usize, usize, usize, usize) {
    let interior = colloc.interior.len() * problem.interior_rows();
    let boundary = colloc.boundary.len() * problem.boundary_rows();
    let interface = if model.pou() == PouKind::A { 2 * colloc.interface.len() * model.num_components() } else { 0 };
    (interior, boundary, interface, problem.point_conditions.len())
}

/// Builds the unweighted (`λ ≡ 1`) collocation system.
pub fn assemble(problem: &PdeProblem, model: &RfmModel, colloc: &CollocationSet) -> Result<WeightedSystem> {
    let k = problem.components();
    if model.num_components() != k {
        return Err(RfmError::DimensionMismatch(format!(
            "model has {} components, problem has {k}",
            model.num_components()
        )));
    }
    if model.dim() != problem.domain.dim() {
        return Err(RfmError::DimensionMismatch("model and domain dimensions differ".into()));
    }
    if model.columns() == 0 {
        return Err(RfmError::InvalidBasis("model has no columns".into()));
    }
    if model.pou() == PouKind::A && model.num_patches() > 1 && colloc.interface.is_empty() {
        return Err(RfmError::MissingInterface(model.num_patches()));
    }
    let (ni, nb, nf, np) = count_rows(problem, model, colloc);
    let n = ni + nb + nf + np;
    let m = model.columns();
    let mut a = Mat::<f64>::zeros(n, m);
    let mut rhs = vec![0.0; n];
    let mut meta = Vec::with_capacity(n);
    let mut row = 0;

    let fill = |a: &mut Mat<f64>, row: usize, x: &Point, w: &[Vec<[f64; 6]>]| {
        for (c, wc) in (0..k).map(|c| (c, w.iter().map(|r| r[c]).collect::<Vec<_>>())) {
            if wc.iter().all(|v| v.iter().all(|&e| e == 0.0)) {
                continue;
            }
            model.for_each_active(c, x, |col, jet| {
                for (r, wr) in wc.iter().enumerate() {
                    a[(row + r, col)] += jet.dot(wr);
                }
            });
        }
    };

    for x in &colloc.interior {
        let w = problem.operator.weights(x);
        fill(&mut a, row, x, &w);
        let f = (problem.forcing)(x);
        for (kk, fk) in f.iter().enumerate().take(problem.interior_rows()) {
            rhs[row + kk] = *fk;
            meta.push(RowMeta { kind: RowKind::Interior, point: *x, condition: kk, component: 0, zero_row: false });
        }
        row += problem.interior_rows();
    }
    for bp in &colloc.boundary {
        let bc = problem.condition_for(bp.segment);
        let w = bc.stencil.weights(&bp.normal);
        fill(&mut a, row, &bp.point, &w);
        let g = (bc.data)(&bp.point, &bp.normal);
        for (l, gl) in g.iter().enumerate().take(problem.boundary_rows()) {
            rhs[row + l] = *gl;
            meta.push(RowMeta { kind: RowKind::Boundary, point: bp.point, condition: l, component: 0, zero_row: false });
        }
        row += problem.boundary_rows();
    }
    if nf > 0 {
        let dim = model.dim();
        for ip in &colloc.interface {
            let (p0, p1) = ip.patches;
            for c in 0..k {
                for (side, sign) in [(p0, 1.0), (p1, -1.0)] {
                    let patch = model.patch(c, PatchRef::Local(side)).ok_or_else(|| {
                        RfmError::DimensionMismatch(format!("interface refers to patch {side}"))
                    })?;
                    for j in 0..patch.len() {
                        let jet: Jet = patch.feature_jet(j, &ip.point, dim);
                        let col = model.column(c, PatchRef::Local(side), j);
                        a[(row, col)] += sign * jet.value();
                        a[(row + 1, col)] += sign * (ip.normal[0] * jet.0[1] + ip.normal[1] * jet.0[2]);
                    }
                }
                for kind in [RowKind::InterfaceValue, RowKind::InterfaceDerivative] {
                    meta.push(RowMeta { kind, point: ip.point, condition: 0, component: c, zero_row: false });
                }
                row += 2;
            }
        }
    }
    for pc in &problem.point_conditions {
        model.for_each_active(pc.component, &pc.point, |col, jet| a[(row, col)] += jet.value());
        rhs[row] = pc.value;
        meta.push(RowMeta { kind: RowKind::PointPin, point: pc.point, condition: 0, component: pc.component, zero_row: false });
        row += 1;
    }
    debug_assert_eq!(row, n);
    Ok(WeightedSystem { matrix: a, rhs, weights: vec![1.0; n], meta, components: k })
}

/// Sets `λ_i = c / max_j |A_ij|` (or its square root, see
/// [`ResidualScale`]). Rows without a nonzero entry keep `λ_i = 1` and are
/// flagged.
pub fn rescale(mut system: WeightedSystem, c: f64, scale: ResidualScale) -> Result<WeightedSystem> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(RfmError::Config(format!("rescaling constant {c}")));
    }
    for i in 0..system.rows() {
        let m = system.row_max_abs(i);
        let zero = m == 0.0;
        system.meta[i].zero_row = zero;
        system.weights[i] = if zero {
            1.0
        } else {
            match scale {
                ResidualScale::Lambda => c / m,
                ResidualScale::SqrtLambda => (c / m).sqrt(),
            }
        };
    }
    Ok(system)
}

/// Weighted residual `diag(λ)(A u - b)` and the loss `‖r‖²`.
pub fn residual(system: &WeightedSystem, coefficients: &[f64]) -> Result<(Vec<f64>, f64)> {
    if coefficients.len() != system.cols() {
        return Err(RfmError::DimensionMismatch(format!(
            "{} coefficients for {} columns",
            coefficients.len(),
            system.cols()
        )));
    }
    let u = Mat::from_fn(system.cols(), 1, |j, _| coefficients[j]);
    let au = &system.matrix * &u;
    let r: Vec<f64> = (0..system.rows()).map(|i| system.weights[i] * (au[(i, 0)] - system.rhs[i])).collect();
    let loss = crate::evaluation::pairwise_sum(&r.iter().map(|v| v * v).collect::<Vec<_>>());
    Ok((r, loss))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::basis::{Activation, FeatureSampler, FeatureVector, ModelSpec, Patch, SamplingMode};
    use crate::geometry::{BoundaryCounts, Domain, Side, Tiling};
    use crate::problems::{self, HelmholtzSmooth, PoissonProduct};

    fn helmholtz_model(patches: usize, pou: PouKind, per_patch: usize) -> (PdeProblem, RfmModel, Domain) {
        let d = Domain::interval(0.0, 8.0).unwrap();
        let p = problems::make_helmholtz_1d(d.clone(), 4.0, Arc::new(HelmholtzSmooth)).unwrap();
        let spec = ModelSpec {
            patches: vec![patches],
            features_per_patch: per_patch,
            pou,
            activation: Activation::Tanh,
            sampler: FeatureSampler::new(1.0, SamplingMode::UniformRandom, 1).unwrap(),
            patch_ranges: None,
            multiscale: false,
            components: 1,
        };
        let m = RfmModel::build(&d, &spec).unwrap();
        (p, m, d)
    }

    fn colloc_1d(d: &Domain, model: &RfmModel, q: usize) -> CollocationSet {
        CollocationSet {
            interior: d.sample_interior(&[q]).unwrap(),
            boundary: d.sample_boundary(BoundaryCounts { per_edge: 1, per_hole: 0 }),
            interface: model.tiling().sample_interface(d, 1),
        }
    }

    #[test]
    fn single_sine_feature_entry() {
        let d = Domain::interval(0.0, 8.0).unwrap();
        let p = problems::make_helmholtz_1d(d.clone(), 4.0, Arc::new(HelmholtzSmooth)).unwrap();
        let patch = Patch::new([4.0, 0.0], [4.0, 1.0], vec![FeatureVector { k: [2.0, 0.0], b: 0.0 }], Activation::Sin)
            .unwrap();
        let tiling = Tiling::new(&d, &[1]).unwrap();
        let model = RfmModel::from_parts(1, PouKind::A, tiling, vec![(vec![patch], None)]).unwrap();
        let colloc = CollocationSet { interior: vec![[6.0, 0.0]], boundary: vec![], interface: vec![] };
        let sys = assemble(&p, &model, &colloc).unwrap();
        let expect = -0.25 * 1f64.sin() - 4.0 * 1f64.sin();
        assert!((sys.matrix[(0, 0)] - expect).abs() < 1e-15);
        // finite-difference oracle of φ'' - 4φ
        let phi = |x: f64| (2.0 * (x - 4.0) / 4.0).sin();
        let h = 1e-4;
        let fd = (phi(6.0 + h) - 2.0 * phi(6.0) + phi(6.0 - h)) / (h * h) - 4.0 * phi(6.0);
        assert!((sys.matrix[(0, 0)] - fd).abs() < 1e-7);
    }

    #[test]
    fn one_dimensional_row_counts() {
        for (mp, n_a, n_b) in [(4, 208, 202), (8, 416, 402), (16, 832, 802), (32, 1664, 1602)] {
            let q = 50 * mp;
            let (p, m, d) = helmholtz_model(mp, PouKind::A, 4);
            assert_eq!(assemble(&p, &m, &colloc_1d(&d, &m, q)).unwrap().rows(), n_a);
            let (p, m, d) = helmholtz_model(mp, PouKind::B, 4);
            assert_eq!(assemble(&p, &m, &colloc_1d(&d, &m, q)).unwrap().rows(), n_b);
        }
    }

    #[test]
    fn indicator_partition_needs_interfaces() {
        let (p, m, d) = helmholtz_model(4, PouKind::A, 4);
        let mut c = colloc_1d(&d, &m, 200);
        c.interface.clear();
        assert!(matches!(assemble(&p, &m, &c), Err(RfmError::MissingInterface(4))));
    }

    #[test]
    fn interface_rows_vanish_for_identical_expansions() {
        let d = Domain::interval(0.0, 4.0).unwrap();
        let p = problems::make_helmholtz_1d(d.clone(), 4.0, Arc::new(HelmholtzSmooth)).unwrap();
        let tiling = Tiling::new(&d, &[2]).unwrap();
        let feats = vec![FeatureVector { k: [0.7, 0.0], b: 0.2 }, FeatureVector { k: [-0.3, 0.0], b: 0.9 }];
        // same radius and features centred at the same point: identical functions
        let mk = || Patch::new([1.0, 0.0], [1.0, 1.0], feats.clone(), Activation::Tanh).unwrap();
        let model = RfmModel::from_parts(1, PouKind::A, tiling.clone(), vec![(vec![mk(), mk()], None)]).unwrap();
        let colloc = CollocationSet { interior: vec![], boundary: vec![], interface: tiling.sample_interface(&d, 1) };
        assert_eq!(colloc.interface[0].point[0], 2.0);
        let sys = assemble(&p, &model, &colloc).unwrap();
        assert_eq!(sys.rows(), 2);
        let (r, loss) = residual(&sys, &[0.4, -1.1, 0.4, -1.1]).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-15));
        assert!(loss < 1e-30);
    }

    #[test]
    fn rescale_example_and_idempotence() {
        let sys = WeightedSystem {
            matrix: Mat::from_fn(2, 3, |i, j| [[0.5, -2.0, 1.0], [0.0, 0.0, 0.0]][i][j]),
            rhs: vec![1.0, 0.0],
            weights: vec![1.0, 1.0],
            meta: vec![RowMeta { kind: RowKind::Interior, point: [0.0; 2], condition: 0, component: 0, zero_row: false }; 2],
            components: 1,
        };
        let once = rescale(sys, 100.0, ResidualScale::Lambda).unwrap();
        assert_eq!(once.weights, vec![50.0, 1.0]);
        let w = once.weighted_matrix();
        assert_eq!([w[(0, 0)], w[(0, 1)], w[(0, 2)]], [25.0, -100.0, 50.0]);
        assert_eq!(once.zero_rows(), vec![1]);
        let twice = rescale(once.clone(), 100.0, ResidualScale::Lambda).unwrap();
        assert_eq!(twice.weights, once.weights);
        assert!(rescale(twice, 0.0, ResidualScale::Lambda).is_err());
    }

    #[test]
    fn loss_matches_brute_force_sum() {
        let vals = [0.3, -1.2, 2.2, 0.7, 0.1, -0.4, 1.9, 0.0, -2.5, 0.6, 1.1, -0.8, 0.9, 0.2, -1.7];
        let sys = WeightedSystem {
            matrix: Mat::from_fn(5, 3, |i, j| vals[3 * i + j]),
            rhs: vec![0.5, -0.25, 1.0, 2.0, -1.5],
            weights: vec![3.0, 0.5, 1.25, 2.0, 0.1],
            meta: vec![RowMeta { kind: RowKind::Interior, point: [0.0; 2], condition: 0, component: 0, zero_row: false }; 5],
            components: 1,
        };
        let u = [0.7, -0.3, 1.4];
        let mut brute = 0.0;
        for i in 0..5 {
            let au: f64 = (0..3).map(|j| vals[3 * i + j] * u[j]).sum();
            brute += sys.weights[i].powi(2) * (au - sys.rhs[i]).powi(2);
        }
        let (_, loss) = residual(&sys, &u).unwrap();
        assert!((loss - brute).abs() <= 1e-13 * brute);
        assert!(residual(&sys, &u[..2]).is_err());
        let zero = WeightedSystem { rhs: vec![0.0; 5], ..sys };
        assert_eq!(residual(&zero, &[0.0; 3]).unwrap().1, 0.0);
    }

    #[test]
    fn columns_reproduce_basis_through_stencil() {
        let d = Domain::rectangle([0.0, 0.0], [1.0, 1.0]).unwrap();
        let p = problems::make_poisson_2d(d.clone(), Arc::new(PoissonProduct::low_frequency())).unwrap();
        let spec = ModelSpec {
            patches: vec![2, 2],
            features_per_patch: 10,
            pou: PouKind::B,
            activation: Activation::Tanh,
            sampler: FeatureSampler::new(1.0, SamplingMode::UniformRandom, 2).unwrap(),
            patch_ranges: None,
            multiscale: true,
            components: 1,
        };
        let m = RfmModel::build(&d, &spec).unwrap();
        let colloc = CollocationSet {
            interior: d.sample_interior(&[6, 6]).unwrap(),
            boundary: d.sample_boundary(BoundaryCounts { per_edge: 5, per_hole: 0 }),
            interface: vec![],
        };
        let sys = assemble(&p, &m, &colloc).unwrap();
        assert_eq!(sys.rows(), 36 + 20);
        let mut state = 7u64;
        let mut next = |n: usize| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as usize % n
        };
        for _ in 0..20 {
            let (i, col) = (next(sys.rows()), next(sys.cols()));
            let (patch, j) = if col >= 32 { (PatchRef::Global, col - 32) } else { (PatchRef::Local(col / 8), col % 8) };
            let meta = sys.meta[i];
            let jet = m.basis_jet(0, patch, j, &meta.point);
            let expect = if meta.kind == RowKind::Interior { jet.0[3] + jet.0[5] } else { jet.value() };
            assert!((sys.matrix[(i, col)] - expect).abs() <= 1e-12 * expect.abs().max(1.0));
        }
        let bottom = colloc.boundary.iter().position(|b| b.segment == crate::geometry::Segment::Edge(Side::Bottom));
        assert!(bottom.is_some());
    }

    #[test]
    fn dump_round_trip() {
        let (p, m, d) = helmholtz_model(2, PouKind::B, 3);
        let sys = rescale(assemble(&p, &m, &colloc_1d(&d, &m, 20)).unwrap(), 100.0, ResidualScale::Lambda).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sys.bin");
        sys.write_dump(&path).unwrap();
        let dump = read_dump(&path).unwrap();
        assert_eq!((dump.rows, dump.cols, dump.components), (22, 6, 1));
        let w = sys.weighted_matrix();
        assert_eq!(dump.matrix[6 + 2], w[(1, 2)]);
        assert_eq!(dump.rhs, sys.weighted_rhs());
        assert_eq!(dump.weights, sys.weights);
    }
}

//! Sparse truncated multimode Fock space.
//!
//! Every mode shares one occupation cutoff. Basis vectors are ordered
//! lexicographically by their occupation vectors with mode 0 most significant,
//! which is also the row order of every dense vector and matrix produced here.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::C64;

/// Amplitudes with magnitude below this are dropped after every operator application.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Largest basis size for which dense vectors and matrices are built.
pub const MAX_DENSE_DIM: usize = 65536;

/// Tolerance used when an operation requires a normalized input.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModeLayout {
    modes: usize,
    cutoff: u32,
}

impl ModeLayout {
    pub fn new(modes: usize, cutoff: u32) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidLayout("mode count must be at least 1".into()));
        }
        Ok(Self { modes, cutoff })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    /// Dimension of a single mode, `cutoff + 1`.
    pub fn local_dim(&self) -> usize {
        self.cutoff as usize + 1
    }

    /// `(cutoff+1)^modes`, or `None` on overflow.
    pub fn basis_size(&self) -> Option<usize> {
        self.local_dim().checked_pow(self.modes as u32)
    }

    /// Basis size, checked against [`MAX_DENSE_DIM`].
    pub fn dense_dim(&self) -> Result<usize> {
        match self.basis_size() {
            Some(dim) if dim <= MAX_DENSE_DIM => Ok(dim),
            Some(dim) => Err(Error::DimensionBudget { dim, budget: MAX_DENSE_DIM }),
            None => Err(Error::DimensionBudget { dim: usize::MAX, budget: MAX_DENSE_DIM }),
        }
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.modes {
            Ok(())
        } else {
            Err(Error::InvalidMode { mode, modes: self.modes })
        }
    }

    pub fn check_occupation(&self, occ: &OccupationVector) -> Result<()> {
        if occ.len() != self.modes {
            return Err(Error::LayoutMismatch(format!(
                "occupation vector {occ} has {} entries, layout has {} modes",
                occ.len(),
                self.modes
            )));
        }
        if let Some(&n) = occ.counts().iter().find(|&&n| n > self.cutoff) {
            return Err(Error::Headroom { needed: n, cutoff: self.cutoff });
        }
        Ok(())
    }

    pub fn vacuum(&self) -> OccupationVector {
        OccupationVector(vec![0; self.modes])
    }

    /// Dense row index of an occupation vector.
    pub fn index_of(&self, occ: &OccupationVector) -> usize {
        let d = self.local_dim();
        occ.0.iter().fold(0usize, |acc, &n| acc * d + n as usize)
    }

    /// Inverse of [`ModeLayout::index_of`].
    pub fn occupation_at(&self, mut index: usize) -> OccupationVector {
        let d = self.local_dim();
        let mut counts = vec![0u32; self.modes];
        for slot in counts.iter_mut().rev() {
            *slot = (index % d) as u32;
            index /= d;
        }
        OccupationVector(counts)
    }

    /// All basis vectors in lexicographic order, vacuum first.
    pub fn basis(&self) -> OccupationIter {
        OccupationIter::new(self.modes, self.cutoff)
    }
}

/// Per-mode excitation counts labelling one Fock basis vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    pub fn new(counts: Vec<u32>) -> Self {
        Self(counts)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, mode: usize) -> u32 {
        self.0[mode]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&n| n as u64).sum()
    }

    pub fn is_vacuum(&self) -> bool {
        self.0.iter().all(|&n| n == 0)
    }

    pub fn max_count(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Sub-vector on the given mode indices, in the given order.
    pub fn select(&self, modes: &[usize]) -> OccupationVector {
        OccupationVector(modes.iter().map(|&m| self.0[m]).collect())
    }

    pub(crate) fn counts_mut(&mut self) -> &mut [u32] {
        &mut self.0
    }
}

impl From<Vec<u32>> for OccupationVector {
    fn from(counts: Vec<u32>) -> Self {
        Self(counts)
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

/// Odometer over all occupation vectors of `modes` modes up to `cutoff`,
/// last mode fastest. Zero modes yield a single empty vector.
#[derive(Clone, Debug)]
pub struct OccupationIter {
    current: Option<Vec<u32>>,
    cutoff: u32,
}

impl OccupationIter {
    pub fn new(modes: usize, cutoff: u32) -> Self {
        Self { current: Some(vec![0; modes]), cutoff }
    }
}

impl Iterator for OccupationIter {
    type Item = OccupationVector;

    fn next(&mut self) -> Option<Self::Item> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut carried = true;
        for slot in next.iter_mut().rev() {
            if *slot < self.cutoff {
                *slot += 1;
                carried = false;
                break;
            }
            *slot = 0;
        }
        self.current = if carried { None } else { Some(next) };
        Some(OccupationVector(out))
    }
}

/// The accessible modes `k`; the complement is everything else in the layout.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModeSubset {
    indices: Vec<usize>,
    modes: usize,
}

impl ModeSubset {
    pub fn new(indices: &[usize], modes: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument("mode subset must not be empty".into()));
        }
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&bad) = sorted.iter().find(|&&m| m >= modes) {
            return Err(Error::InvalidMode { mode: bad, modes });
        }
        Ok(Self { indices: sorted, modes })
    }

    pub fn all(modes: usize) -> Self {
        Self { indices: (0..modes).collect(), modes }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn mode_count(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, mode: usize) -> bool {
        self.indices.binary_search(&mode).is_ok()
    }

    pub fn is_all(&self) -> bool {
        self.indices.len() == self.modes
    }

    /// The traced-out modes `¬k`, ascending.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.modes).filter(|m| !self.contains(*m)).collect()
    }

    /// Layout of the kept modes alone.
    pub fn layout(&self, cutoff: u32) -> ModeLayout {
        ModeLayout { modes: self.indices.len(), cutoff }
    }
}

/// All occupation vectors of the complement `¬k`, vacuum first.
pub fn enumerate_complement_basis(layout: &ModeLayout, keep: &ModeSubset) -> OccupationIter {
    OccupationIter::new(keep.complement().len(), layout.cutoff())
}

/// Sparse pure state on a truncated layout.
///
/// `leakage` accumulates the squared input amplitude of every basis term that
/// an operator pushed past the cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    layout: ModeLayout,
    amps: BTreeMap<OccupationVector, C64>,
    leakage: f64,
}

impl StateVector {
    pub fn zero(layout: ModeLayout) -> Self {
        Self { layout, amps: BTreeMap::new(), leakage: 0.0 }
    }

    pub fn vacuum(layout: ModeLayout) -> Self {
        let mut s = Self::zero(layout);
        s.amps.insert(layout.vacuum(), C64::new(1.0, 0.0));
        s
    }

    /// Fock basis state with the given per-mode occupations.
    pub fn fock(layout: ModeLayout, counts: &[u32]) -> Result<Self> {
        let occ = OccupationVector(counts.to_vec());
        layout.check_occupation(&occ)?;
        let mut s = Self::zero(layout);
        s.amps.insert(occ, C64::new(1.0, 0.0));
        Ok(s)
    }

    /// Builds a state from (occupation, amplitude) pairs; repeated occupations add.
    pub fn from_terms<I>(layout: ModeLayout, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (OccupationVector, C64)>,
    {
        let mut s = Self::zero(layout);
        for (occ, c) in terms {
            layout.check_occupation(&occ)?;
            *s.amps.entry(occ).or_insert(C64::new(0.0, 0.0)) += c;
        }
        s.prune();
        Ok(s)
    }

    pub fn from_dense(layout: ModeLayout, v: &DVector<C64>) -> Result<Self> {
        let dim = layout.dense_dim()?;
        if v.len() != dim {
            return Err(Error::LayoutMismatch(format!("dense vector length {} != {dim}", v.len())));
        }
        let mut s = Self::zero(layout);
        for (i, c) in v.iter().enumerate() {
            if c.norm() >= PRUNE_THRESHOLD {
                s.amps.insert(layout.occupation_at(i), *c);
            }
        }
        Ok(s)
    }

    pub fn to_dense(&self) -> Result<DVector<C64>> {
        let dim = self.layout.dense_dim()?;
        let mut v = DVector::zeros(dim);
        for (occ, c) in &self.amps {
            v[self.layout.index_of(occ)] = *c;
        }
        Ok(v)
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn amplitude(&self, occ: &OccupationVector) -> C64 {
        self.amps.get(occ).copied().unwrap_or_default()
    }

    /// Stored terms in lexicographic basis order.
    pub fn terms(&self) -> impl Iterator<Item = (&OccupationVector, &C64)> {
        self.amps.iter()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().fold(0.0, |acc, c| acc + c.norm_sqr())
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() < tol
    }

    pub fn require_normalized(&self) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() < NORMALIZATION_TOLERANCE {
            Ok(())
        } else {
            Err(Error::NotNormalized { norm_sqr })
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm_sqr = self.norm_sqr();
        if norm_sqr == 0.0 {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(self.scaled(C64::new(1.0 / norm_sqr.sqrt(), 0.0)))
    }

    /// Largest single-mode occupation present in the support.
    pub fn max_occupation(&self) -> u32 {
        self.amps.keys().map(|o| o.max_count()).max().unwrap_or(0)
    }

    /// Multiplies every amplitude by `factor`; leakage scales by `|factor|²`.
    pub fn scaled(&self, factor: C64) -> Self {
        let leakage = self.leakage * factor.norm_sqr();
        let mut out = Self { layout: self.layout, amps: BTreeMap::new(), leakage };
        for (occ, c) in &self.amps {
            out.amps.insert(occ.clone(), c * factor);
        }
        out.prune();
        out
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &StateVector, factor: C64) -> Result<Self> {
        self.check_layout(other)?;
        let mut out = self.clone();
        for (occ, c) in &other.amps {
            *out.amps.entry(occ.clone()).or_insert(C64::new(0.0, 0.0)) += c * factor;
        }
        out.leakage += other.leakage * factor.norm_sqr();
        out.prune();
        Ok(out)
    }

    /// Multiplies each basis term by `f(occupation)`.
    pub fn map_terms<F: Fn(&OccupationVector) -> C64>(&self, f: F) -> Self {
        let mut out = Self { layout: self.layout, amps: BTreeMap::new(), leakage: self.leakage };
        for (occ, c) in &self.amps {
            out.amps.insert(occ.clone(), c * f(occ));
        }
        out.prune();
        out
    }

    /// Applies `a†_mode`. Terms at the cutoff are dropped and counted as leakage.
    ///
    /// # Panics
    /// If `mode` is out of range.
    pub fn create(&self, mode: usize) -> Self {
        assert!(mode < self.layout.modes, "mode {mode} out of range");
        let mut out = Self { layout: self.layout, amps: BTreeMap::new(), leakage: self.leakage };
        for (occ, c) in &self.amps {
            let n = occ.get(mode);
            if n >= self.layout.cutoff {
                out.leakage += c.norm_sqr();
                continue;
            }
            let mut raised = occ.clone();
            raised.0[mode] += 1;
            out.amps.insert(raised, c * ((n + 1) as f64).sqrt());
        }
        out.prune();
        out
    }

    /// Applies `a_mode`; vacuum components of that mode vanish.
    ///
    /// # Panics
    /// If `mode` is out of range.
    pub fn annihilate(&self, mode: usize) -> Self {
        assert!(mode < self.layout.modes, "mode {mode} out of range");
        let mut out = Self { layout: self.layout, amps: BTreeMap::new(), leakage: self.leakage };
        for (occ, c) in &self.amps {
            let n = occ.get(mode);
            if n == 0 {
                continue;
            }
            let mut lowered = occ.clone();
            lowered.0[mode] -= 1;
            out.amps.insert(lowered, c * (n as f64).sqrt());
        }
        out.prune();
        out
    }

    /// `⟨self|other⟩`, conjugating `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_layout(other)?;
        let (small, large, conj_small) = if self.amps.len() <= other.amps.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = C64::new(0.0, 0.0);
        for (occ, c) in &small.amps {
            if let Some(d) = large.amps.get(occ) {
                acc += if conj_small { c.conj() * d } else { d.conj() * c };
            }
        }
        Ok(acc)
    }

    /// Mean total excitation number `Σ |c|² Σ_m n_m`.
    pub fn average_particle_number(&self) -> Result<f64> {
        self.require_normalized()?;
        Ok(self.amps.iter().fold(0.0, |acc, (occ, c)| acc + c.norm_sqr() * occ.total() as f64))
    }

    /// True when every term is vacuum outside `keep`.
    pub fn supported_on(&self, keep: &ModeSubset) -> bool {
        let comp = keep.complement();
        self.amps.keys().all(|occ| comp.iter().all(|&m| occ.get(m) == 0))
    }

    /// The state of the kept modes, for inputs of the form `|ψ⟩_k|r⟩_¬k` with `|r⟩` one
    /// Fock vector (usually the vacuum).
    pub fn restrict(&self, keep: &ModeSubset) -> Result<Self> {
        if keep.mode_count() != self.layout.modes {
            return Err(Error::LayoutMismatch("mode subset built for another layout".into()));
        }
        let comp = keep.complement();
        let mut outside = self.amps.keys().map(|occ| occ.select(&comp));
        if let Some(first) = outside.next() {
            if outside.any(|o| o != first) {
                return Err(Error::SupportOutsideKeep);
            }
        }
        let layout = keep.layout(self.layout.cutoff);
        let mut out = Self { layout, amps: BTreeMap::new(), leakage: self.leakage };
        for (occ, c) in &self.amps {
            out.amps.insert(occ.select(keep.indices()), *c);
        }
        Ok(out)
    }

    /// `Tr_¬k |self⟩⟨self|` as a dense operator on the kept modes.
    pub fn partial_trace(&self, keep: &ModeSubset) -> Result<DensityOperator> {
        if keep.mode_count() != self.layout.modes {
            return Err(Error::LayoutMismatch("mode subset built for another layout".into()));
        }
        let reduced = keep.layout(self.layout.cutoff);
        let dim = reduced.dense_dim()?;
        let comp = keep.complement();
        let mut blocks: BTreeMap<OccupationVector, Vec<(usize, C64)>> = BTreeMap::new();
        for (occ, c) in &self.amps {
            let row = reduced.index_of(&occ.select(keep.indices()));
            blocks.entry(occ.select(&comp)).or_default().push((row, *c));
        }
        let mut matrix = DMatrix::zeros(dim, dim);
        for block in blocks.values() {
            for &(i, ci) in block {
                for &(j, cj) in block {
                    matrix[(i, j)] += ci * cj.conj();
                }
            }
        }
        Ok(DensityOperator { layout: reduced, modes: keep.indices().to_vec(), matrix })
    }

    fn check_layout(&self, other: &StateVector) -> Result<()> {
        if self.layout == other.layout {
            Ok(())
        } else {
            Err(Error::LayoutMismatch(format!("{:?} vs {:?}", self.layout, other.layout)))
        }
    }

    fn prune(&mut self) {
        self.amps.retain(|_, c| c.norm() >= PRUNE_THRESHOLD);
    }
}

/// `⟨a|b⟩` with conjugation on `a`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<C64> {
    a.inner(b)
}

/// Dense operator on the occupation basis of a mode subset.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    layout: ModeLayout,
    modes: Vec<usize>,
    matrix: DMatrix<C64>,
}

impl DensityOperator {
    pub fn from_matrix(layout: ModeLayout, modes: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        let dim = layout.dense_dim()?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::LayoutMismatch(format!(
                "matrix is {}x{}, layout needs {dim}x{dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if modes.len() != layout.modes() {
            return Err(Error::LayoutMismatch("mode list does not match layout".into()));
        }
        Ok(Self { layout, modes, matrix })
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    /// Original mode indices of the rows, ascending.
    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Largest entry of `|ρ − ρ†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let diff = &self.matrix - self.matrix.adjoint();
        diff.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `⟨ψ|ρ|ψ⟩` for a state on the same reduced layout.
    pub fn expectation(&self, psi: &StateVector) -> Result<C64> {
        if psi.layout() != &self.layout {
            return Err(Error::LayoutMismatch("state and operator layouts differ".into()));
        }
        let mut acc = C64::new(0.0, 0.0);
        for (oi, ci) in psi.terms() {
            let i = self.layout.index_of(oi);
            for (oj, cj) in psi.terms() {
                let j = self.layout.index_of(oj);
                acc += ci.conj() * self.matrix[(i, j)] * cj;
            }
        }
        Ok(acc)
    }

    /// Entry-wise linear combination `Σ w_i ρ_i` of operators on one layout.
    pub fn combine(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty combination".into()))?;
        let mut matrix = DMatrix::zeros(first.matrix.nrows(), first.matrix.ncols());
        for (w, rho) in parts {
            if rho.layout != first.layout || rho.modes != first.modes {
                return Err(Error::LayoutMismatch("combining operators on different layouts".into()));
            }
            matrix += rho.matrix.scale(*w);
        }
        Ok(Self { layout: first.layout, modes: first.modes.clone(), matrix })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn single(cutoff: u32) -> ModeLayout {
        ModeLayout::new(1, cutoff).unwrap()
    }

    #[test]
    fn create_on_vacuum_gives_one() {
        let l = single(4);
        let out = StateVector::vacuum(l).create(0);
        assert_eq!(out, StateVector::fock(l, &[1]).unwrap());
    }

    #[test]
    fn create_uses_sqrt_n_plus_one() {
        let l = single(4);
        let out = StateVector::fock(l, &[2]).unwrap().create(0);
        let amp = out.amplitude(&OccupationVector::new(vec![3]));
        assert!((amp - c(3f64.sqrt(), 0.0)).norm() < 1e-15);
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn create_at_cutoff_leaks() {
        let l = single(3);
        let input = StateVector::fock(l, &[3]).unwrap().scaled(c(0.0, 0.6));
        let out = input.create(0);
        assert!(out.is_empty());
        assert!((out.leakage() - 0.36).abs() < 1e-15);
    }

    #[test]
    fn annihilate_vacuum_is_empty() {
        let out = StateVector::vacuum(single(3)).annihilate(0);
        assert!(out.is_empty());
        assert_eq!(out.leakage(), 0.0);
    }

    #[test]
    fn annihilate_three() {
        let l = single(4);
        let out = StateVector::fock(l, &[3]).unwrap().annihilate(0);
        let amp = out.amplitude(&OccupationVector::new(vec![2]));
        assert!((amp - c(3f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn annihilate_is_linear() {
        let l = single(4);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = StateVector::from_terms(
            l,
            [(OccupationVector::new(vec![0]), c(h, 0.0)), (OccupationVector::new(vec![1]), c(h, 0.0))],
        )
        .unwrap();
        let out = psi.annihilate(0);
        assert_eq!(out.len(), 1);
        assert!((out.amplitude(&OccupationVector::new(vec![0])) - c(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn inner_products() {
        let l = single(4);
        let zero = StateVector::vacuum(l);
        let one = StateVector::fock(l, &[1]).unwrap();
        assert_eq!(zero.inner(&zero).unwrap(), c(1.0, 0.0));
        assert_eq!(one.inner(&zero).unwrap(), c(0.0, 0.0));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = StateVector::from_terms(
            l,
            [(OccupationVector::new(vec![0]), c(h, 0.0)), (OccupationVector::new(vec![2]), c(0.0, h))],
        )
        .unwrap();
        assert!((psi.inner(&psi).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn inner_product_layout_mismatch() {
        let a = StateVector::vacuum(single(2));
        let b = StateVector::vacuum(single(3));
        assert!(matches!(inner_product(&a, &b), Err(Error::LayoutMismatch(_))));
    }

    #[test]
    fn partial_trace_of_product_is_pure() {
        let l = ModeLayout::new(2, 3).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = StateVector::from_terms(
            l,
            [
                (OccupationVector::new(vec![0, 0]), c(h, 0.0)),
                (OccupationVector::new(vec![2, 0]), c(0.0, h)),
            ],
        )
        .unwrap();
        let keep = ModeSubset::new(&[0], 2).unwrap();
        let rho = psi.partial_trace(&keep).unwrap();
        let psi_k = psi.restrict(&keep).unwrap();
        let expected = psi_k.to_dense().unwrap();
        let outer = &expected * expected.adjoint();
        assert!((rho.matrix() - outer).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_of_bell_pair_is_mixed() {
        let l = ModeLayout::new(2, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = StateVector::from_terms(
            l,
            [
                (OccupationVector::new(vec![0, 0]), c(h, 0.0)),
                (OccupationVector::new(vec![1, 1]), c(h, 0.0)),
            ],
        )
        .unwrap();
        let rho = psi.partial_trace(&ModeSubset::new(&[0], 2).unwrap()).unwrap();
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5, 0.0), c(0.5, 0.0)]));
        assert!((rho.matrix() - expected).norm() < 1e-15);
    }

    #[test]
    fn average_particle_numbers() {
        let l = ModeLayout::new(2, 8).unwrap();
        assert_eq!(StateVector::vacuum(l).average_particle_number().unwrap(), 0.0);
        assert_eq!(StateVector::fock(l, &[3, 2]).unwrap().average_particle_number().unwrap(), 5.0);
        let n = 4;
        let s = 1.0 / 3f64.sqrt();
        let psi = StateVector::from_terms(
            l,
            [
                (OccupationVector::new(vec![n, n]), c(s, 0.0)),
                (OccupationVector::new(vec![n, n - 2]), c(s, 0.0)),
                (OccupationVector::new(vec![n, n + 2]), c(s, 0.0)),
            ],
        )
        .unwrap();
        assert!((psi.average_particle_number().unwrap() - 2.0 * n as f64).abs() < 1e-12);
    }

    #[test]
    fn average_particle_number_rejects_unnormalized() {
        let l = single(3);
        let psi = StateVector::fock(l, &[1]).unwrap().scaled(c(2.0, 0.0));
        assert!(matches!(psi.average_particle_number(), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn complement_enumeration() {
        let l = ModeLayout::new(2, 2).unwrap();
        let keep = ModeSubset::new(&[0], 2).unwrap();
        let got: Vec<_> = enumerate_complement_basis(&l, &keep).collect();
        assert_eq!(
            got,
            vec![
                OccupationVector::new(vec![0]),
                OccupationVector::new(vec![1]),
                OccupationVector::new(vec![2])
            ]
        );

        let all = ModeSubset::all(2);
        let got: Vec<_> = enumerate_complement_basis(&l, &all).collect();
        assert_eq!(got, vec![OccupationVector::new(vec![])]);

        let l3 = ModeLayout::new(3, 1).unwrap();
        let keep = ModeSubset::new(&[1], 3).unwrap();
        let got: Vec<_> = enumerate_complement_basis(&l3, &keep).collect();
        assert_eq!(got.len(), 4);
        assert!(got[0].is_vacuum());
    }

    #[test]
    fn dense_index_round_trip() {
        let l = ModeLayout::new(3, 2).unwrap();
        for (i, occ) in l.basis().enumerate() {
            assert_eq!(l.index_of(&occ), i);
            assert_eq!(l.occupation_at(i), occ);
        }
        assert_eq!(l.basis().count(), 27);
    }

    #[test]
    fn layout_rejects_zero_modes_and_budget() {
        assert!(ModeLayout::new(0, 3).is_err());
        let big = ModeLayout::new(5, 15).unwrap();
        assert!(matches!(big.dense_dim(), Err(Error::DimensionBudget { .. })));
    }

    #[test]
    fn subset_validation() {
        assert!(ModeSubset::new(&[], 2).is_err());
        assert!(matches!(ModeSubset::new(&[2], 2), Err(Error::InvalidMode { mode: 2, modes: 2 })));
        let s = ModeSubset::new(&[2, 0, 2], 4).unwrap();
        assert_eq!(s.indices(), &[0, 2]);
        assert_eq!(s.complement(), vec![1, 3]);
    }

    #[test]
    fn restrict_rejects_entangled_complement() {
        let l = ModeLayout::new(2, 3).unwrap();
        let keep = ModeSubset::new(&[0], 2).unwrap();
        let product = StateVector::fock(l, &[2, 1]).unwrap();
        assert_eq!(product.restrict(&keep).unwrap(), StateVector::fock(keep.layout(3), &[2]).unwrap());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = StateVector::from_terms(
            l,
            [(OccupationVector::new(vec![0, 0]), c(h, 0.0)), (OccupationVector::new(vec![1, 1]), c(h, 0.0))],
        )
        .unwrap();
        assert!(matches!(psi.restrict(&keep), Err(Error::SupportOutsideKeep)));
    }
}

use super::system::{rref, AffineForm, LinearSystem, Rref};
use super::{BitVec, F2Error};

/// Default upper bound on `dim(A)` for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 30;

/// The value an affine form takes on every point of a subspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ImpliedValue {
    Zero,
    One,
    /// The form takes both values on the subspace.
    Free,
}

/// Outcome of adding one equation to a subspace in place.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constrained {
    /// Dimension dropped by one.
    Added,
    /// The equation already held on the whole subspace.
    Redundant,
    /// The equation contradicts the subspace; the subspace is unchanged.
    Inconsistent,
}

/// A nonempty affine subspace of GF(2)^n, stored as a canonical reduced
/// system of equations `row = 0`.
///
/// Construction from an inconsistent system yields `None`, so a value of
/// this type always contains at least one point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineSubspace {
    n: usize,
    rows: Vec<AffineForm>,
    pivots: Vec<usize>,
}

impl AffineSubspace {
    pub fn full(n: usize) -> Self {
        Self {
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn point(x: &BitVec) -> Self {
        let n = x.len();
        let rows = (0..n).map(|i| AffineForm::from_vars(n, [i], x.get(i))).collect();
        Self {
            n,
            rows,
            pivots: (0..n).collect(),
        }
    }

    pub fn from_system(system: &LinearSystem) -> Option<Self> {
        match rref(system) {
            Rref::Inconsistent => None,
            Rref::Reduced(e) => Some(Self {
                n: system.n(),
                rows: e.system.into_rows(),
                pivots: e.pivots,
            }),
        }
    }

    pub fn from_equations(n: usize, rows: Vec<AffineForm>) -> Result<Option<Self>, F2Error> {
        Ok(Self::from_system(&LinearSystem::from_rows(n, rows)?))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n - self.pivots.len()
    }

    pub fn codim(&self) -> usize {
        self.pivots.len()
    }

    pub fn rows(&self) -> &[AffineForm] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn system(&self) -> LinearSystem {
        LinearSystem::from_rows(self.n, self.rows.clone()).expect("rows share n")
    }

    /// Non-pivot coordinates in ascending order; these parameterize the space.
    pub fn free_vars(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.n];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.n).filter(|&i| !is_pivot[i]).collect()
    }

    /// Variables with a nonzero coefficient in some defining equation.
    pub fn support(&self) -> BitVec {
        let mut s = BitVec::zeros(self.n);
        for r in &self.rows {
            for i in r.support() {
                s.set(i, true);
            }
        }
        s
    }

    pub fn contains(&self, x: &BitVec) -> bool {
        x.len() == self.n && self.rows.iter().all(|r| !r.eval(x))
    }

    /// Reduces `form` modulo the defining equations; the result agrees with
    /// `form` on the subspace and has no pivot coefficients.
    pub fn reduce(&self, form: &AffineForm) -> AffineForm {
        let mut f = form.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if f.coeff(p) {
                f.add_assign(row);
            }
        }
        f
    }

    pub fn implied_value(&self, form: &AffineForm) -> Result<ImpliedValue, F2Error> {
        if form.n() != self.n {
            return Err(F2Error::DimensionMismatch {
                expected: self.n,
                found: form.n(),
            });
        }
        let f = self.reduce(form);
        Ok(if !f.is_constant() {
            ImpliedValue::Free
        } else if f.constant_term() {
            ImpliedValue::One
        } else {
            ImpliedValue::Zero
        })
    }

    /// Intersects with `form = 0` in place.
    pub fn constrain(&mut self, form: &AffineForm) -> Result<Constrained, F2Error> {
        if form.n() != self.n {
            return Err(F2Error::DimensionMismatch {
                expected: self.n,
                found: form.n(),
            });
        }
        let f = self.reduce(form);
        let Some(p) = f.coeffs().last_one() else {
            return Ok(if f.constant_term() {
                Constrained::Inconsistent
            } else {
                Constrained::Redundant
            });
        };
        for row in self.rows.iter_mut().filter(|r| r.coeff(p)) {
            row.add_assign(&f);
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, f);
        Ok(Constrained::Added)
    }

    /// `self ∩ {form = 0 for each form}`, or `None` if empty.
    pub fn intersect(&self, forms: &[AffineForm]) -> Result<Option<Self>, F2Error> {
        let mut s = self.clone();
        for f in forms {
            if s.constrain(f)? == Constrained::Inconsistent {
                return Ok(None);
            }
        }
        Ok(Some(s))
    }

    pub fn parameterize(&self) -> Parameterization {
        solve_affine(self)
    }

    pub fn enumerate(&self, cap: usize) -> Result<Points, F2Error> {
        enumerate_points(self, cap)
    }
}

/// Explicit parameterization `particular + Σ c_i · basis_i` of a subspace.
///
/// `free[i]` is the coordinate controlled by `c_i`: every point has
/// `x[free[i]] = c_i`, so the coefficients of a point are read off directly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parameterization {
    pub particular: BitVec,
    pub basis: Vec<BitVec>,
    pub free: Vec<usize>,
}

impl Parameterization {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn point(&self, coeffs: &BitVec) -> BitVec {
        assert_eq!(coeffs.len(), self.basis.len(), "coefficient vector has wrong length");
        let mut x = self.particular.clone();
        for i in coeffs.iter_ones() {
            x.xor_assign(&self.basis[i]);
        }
        x
    }

    /// Kernel coefficients of a point of the subspace.
    pub fn coefficients(&self, x: &BitVec) -> BitVec {
        x.select(&self.free)
    }

    /// Coordinate `j` of the point as an affine form in the coefficients.
    pub fn coordinate_form(&self, j: usize) -> AffineForm {
        let coeffs = BitVec::from_bools(self.basis.iter().map(|b| b.get(j)));
        AffineForm::new(coeffs, self.particular.get(j))
    }

    /// Rewrites a form over the ambient variables as a form over the coefficients.
    pub fn substitute(&self, form: &AffineForm) -> AffineForm {
        let coeffs = BitVec::from_bools(self.basis.iter().map(|b| b.dot(form.coeffs())));
        AffineForm::new(coeffs, form.eval(&self.particular))
    }
}

pub fn solve_affine(space: &AffineSubspace) -> Parameterization {
    let n = space.n();
    let free = space.free_vars();
    let mut particular = BitVec::zeros(n);
    for (row, &p) in space.rows().iter().zip(space.pivots()) {
        // x_p + (free part) + c = 0 with the free part at zero.
        particular.set(p, row.constant_term());
    }
    let basis = free
        .iter()
        .map(|&f| {
            let mut b = BitVec::unit(n, f);
            for (row, &p) in space.rows().iter().zip(space.pivots()) {
                if row.coeff(f) {
                    b.set(p, true);
                }
            }
            b
        })
        .collect();
    Parameterization {
        particular,
        basis,
        free,
    }
}

/// Every point of a subspace exactly once, in reflected Gray-code order over
/// the kernel coefficients.
#[derive(Clone, Debug)]
pub struct Points {
    current: BitVec,
    basis: Vec<BitVec>,
    next_index: u64,
    total: u64,
}

impl Iterator for Points {
    type Item = BitVec;

    fn next(&mut self) -> Option<BitVec> {
        if self.next_index >= self.total {
            return None;
        }
        if self.next_index > 0 {
            let bit = self.next_index.trailing_zeros() as usize;
            self.current.xor_assign(&self.basis[bit]);
        }
        self.next_index += 1;
        Some(self.current.clone())
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next_index) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Points {}

pub fn enumerate_points(space: &AffineSubspace, cap: usize) -> Result<Points, F2Error> {
    let dim = space.dim();
    if dim > cap.min(63) {
        return Err(F2Error::EnumerationCapExceeded { dim, cap });
    }
    let p = solve_affine(space);
    Ok(Points {
        current: p.particular,
        basis: p.basis,
        next_index: 0,
        total: 1u64 << dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq(n: usize, vars: &[usize], rhs: bool) -> AffineForm {
        AffineForm::from_vars(n, vars.iter().copied(), rhs)
    }

    #[test]
    fn full_space_parameterization() {
        let p = solve_affine(&AffineSubspace::full(3));
        assert_eq!(p.particular, BitVec::zeros(3));
        assert_eq!(p.basis, (0..3).map(|i| BitVec::unit(3, i)).collect::<Vec<_>>());
    }

    #[test]
    fn single_equation_parameterization() {
        let a = AffineSubspace::from_equations(2, vec![eq(2, &[0, 1], true)])
            .unwrap()
            .unwrap();
        let p = solve_affine(&a);
        assert!(!eq(2, &[0, 1], true).eval(&p.particular));
        assert_eq!(p.basis.len(), 1);
        assert!(!p.basis[0].dot(&BitVec::from_bools([true, true])));
    }

    #[test]
    fn implied_values() {
        let a = AffineSubspace::from_equations(2, vec![eq(2, &[0], true)])
            .unwrap()
            .unwrap();
        assert_eq!(a.implied_value(&AffineForm::var(2, 0)).unwrap(), ImpliedValue::One);
        assert_eq!(a.implied_value(&AffineForm::var(2, 1)).unwrap(), ImpliedValue::Free);
        assert_eq!(
            a.implied_value(&AffineForm::var(2, 0).complement()).unwrap(),
            ImpliedValue::Zero
        );
        assert!(a.implied_value(&AffineForm::var(3, 0)).is_err());
    }

    #[test]
    fn enumerate_single_point_and_full() {
        let x = BitVec::from_bools([true, false, true]);
        let pts: Vec<_> = AffineSubspace::point(&x).enumerate(30).unwrap().collect();
        assert_eq!(pts, vec![x]);
        let mut all: Vec<_> = AffineSubspace::full(3).enumerate(30).unwrap().collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 8);
    }

    #[test]
    fn enumeration_cap() {
        assert!(matches!(
            AffineSubspace::full(12).enumerate(10),
            Err(F2Error::EnumerationCapExceeded { dim: 12, cap: 10 })
        ));
    }

    #[test]
    fn constrain_keeps_canonical_form() {
        let mut a = AffineSubspace::full(4);
        assert_eq!(a.constrain(&eq(4, &[0, 3], true)).unwrap(), Constrained::Added);
        assert_eq!(a.constrain(&eq(4, &[1, 3], false)).unwrap(), Constrained::Added);
        assert_eq!(a.constrain(&eq(4, &[0, 1], true)).unwrap(), Constrained::Redundant);
        assert_eq!(a.constrain(&eq(4, &[0, 1], false)).unwrap(), Constrained::Inconsistent);
        let direct = AffineSubspace::from_equations(4, vec![eq(4, &[0, 3], true), eq(4, &[1, 3], false)])
            .unwrap()
            .unwrap();
        assert_eq!(a, direct);
    }
}

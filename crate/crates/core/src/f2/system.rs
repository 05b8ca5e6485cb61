use std::fmt;

use super::{BitVec, F2Error};

/// An affine form `<coeffs, x> + constant` over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineForm {
    coeffs: BitVec,
    constant: bool,
}

impl AffineForm {
    pub fn new(coeffs: BitVec, constant: bool) -> Self {
        Self { coeffs, constant }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(BitVec::zeros(n), false)
    }

    pub fn constant(n: usize, value: bool) -> Self {
        Self::new(BitVec::zeros(n), value)
    }

    /// The form `x_i`.
    pub fn var(n: usize, i: usize) -> Self {
        Self::new(BitVec::unit(n, i), false)
    }

    pub fn from_vars<I: IntoIterator<Item = usize>>(n: usize, vars: I, constant: bool) -> Self {
        let mut coeffs = BitVec::zeros(n);
        for v in vars {
            coeffs.flip(v);
        }
        Self::new(coeffs, constant)
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &BitVec {
        &self.coeffs
    }

    pub fn constant_term(&self) -> bool {
        self.constant
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.coeffs.get(i)
    }

    #[inline]
    pub fn eval(&self, x: &BitVec) -> bool {
        self.coeffs.dot(x) ^ self.constant
    }

    /// True when no variable has a nonzero coefficient.
    pub fn is_constant(&self) -> bool {
        self.coeffs.is_zero()
    }

    pub fn add_assign(&mut self, other: &AffineForm) {
        self.coeffs.xor_assign(&other.coeffs);
        self.constant ^= other.constant;
    }

    pub fn add(&self, other: &AffineForm) -> AffineForm {
        let mut f = self.clone();
        f.add_assign(other);
        f
    }

    /// `self + 1`.
    pub fn complement(&self) -> AffineForm {
        Self::new(self.coeffs.clone(), !self.constant)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.iter_ones()
    }

    pub(crate) fn set_constant(&mut self, value: bool) {
        self.constant = value;
    }

    pub(crate) fn set_coeff(&mut self, i: usize, value: bool) {
        self.coeffs.set(i, value);
    }

    /// Substitutes `x_i := value` and drops coordinate `i`.
    pub fn fix_variable(&self, i: usize, value: bool) -> AffineForm {
        let constant = self.constant ^ (value && self.coeffs.get(i));
        AffineForm::new(self.coeffs.remove(i), constant)
    }

    /// Keeps only the listed coordinates; the others must carry zero coefficients.
    pub fn restrict(&self, coords: &[usize]) -> AffineForm {
        AffineForm::new(self.coeffs.select(coords), self.constant)
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in self.coeffs.iter_ones() {
            if !first {
                f.write_str(" + ")?;
            }
            write!(f, "x{}", i + 1)?;
            first = false;
        }
        if first {
            write!(f, "{}", u8::from(self.constant))
        } else if self.constant {
            f.write_str(" + 1")
        } else {
            Ok(())
        }
    }
}

impl fmt::Debug for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AffineForm({self})")
    }
}

/// A list of equations `row = 0` over `n` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearSystem {
    n: usize,
    rows: Vec<AffineForm>,
}

impl LinearSystem {
    pub fn new(n: usize) -> Self {
        Self { n, rows: Vec::new() }
    }

    pub fn from_rows(n: usize, rows: Vec<AffineForm>) -> Result<Self, F2Error> {
        if let Some(bad) = rows.iter().find(|r| r.n() != n) {
            return Err(F2Error::DimensionMismatch {
                expected: n,
                found: bad.n(),
            });
        }
        Ok(Self { n, rows })
    }

    pub fn push(&mut self, row: AffineForm) -> Result<(), F2Error> {
        if row.n() != self.n {
            return Err(F2Error::DimensionMismatch {
                expected: self.n,
                found: row.n(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[AffineForm] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_satisfied_by(&self, x: &BitVec) -> bool {
        self.rows.iter().all(|r| !r.eval(x))
    }

    pub fn into_rows(self) -> Vec<AffineForm> {
        self.rows
    }
}

/// A system in reduced row-echelon form.
///
/// Each row's pivot is its highest-index variable, and no pivot column
/// appears in any other row. Rows are sorted by ascending pivot. Choosing
/// the last column as pivot leaves the low-index variables free, so a
/// subspace of dimension `r` is naturally parameterized by the first
/// non-pivot coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Echelon {
    pub system: LinearSystem,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rref {
    Reduced(Echelon),
    Inconsistent,
}

/// Gauss-Jordan elimination over GF(2).
pub fn rref(system: &LinearSystem) -> Rref {
    let n = system.n();
    let mut rows: Vec<AffineForm> = system.rows().to_vec();
    let mut pivot_rows: Vec<(usize, AffineForm)> = Vec::new();
    for col in (0..n).rev() {
        let Some(pos) = rows.iter().position(|r| r.coeff(col)) else {
            continue;
        };
        let pivot = rows.swap_remove(pos);
        for r in rows.iter_mut().filter(|r| r.coeff(col)) {
            r.add_assign(&pivot);
        }
        for (_, r) in pivot_rows.iter_mut().filter(|(_, r)| r.coeff(col)) {
            r.add_assign(&pivot);
        }
        pivot_rows.push((col, pivot));
    }
    // Whatever is left has no coefficients: 0 = constant.
    if rows.iter().any(|r| r.constant_term()) {
        return Rref::Inconsistent;
    }
    pivot_rows.sort_by_key(|(p, _)| *p);
    let (pivots, rows): (Vec<_>, Vec<_>) = pivot_rows.into_iter().unzip();
    Rref::Reduced(Echelon {
        system: LinearSystem { n, rows },
        pivots,
    })
}

/// Uses row `row` to eliminate `var` from every other row, then drops `row`.
pub fn eliminate_variable(system: &LinearSystem, var: usize, row: usize) -> Result<LinearSystem, F2Error> {
    if var >= system.n() {
        return Err(F2Error::IndexOutOfRange {
            index: var,
            len: system.n(),
        });
    }
    let Some(pivot) = system.rows().get(row) else {
        return Err(F2Error::IndexOutOfRange {
            index: row,
            len: system.len(),
        });
    };
    if !pivot.coeff(var) {
        return Err(F2Error::ZeroCoefficient { var, row });
    }
    let rows = system
        .rows()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != row)
        .map(|(_, r)| if r.coeff(var) { r.add(pivot) } else { r.clone() })
        .collect();
    Ok(LinearSystem { n: system.n(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq(n: usize, vars: &[usize], rhs: bool) -> AffineForm {
        // vars sum = rhs  <=>  vars + rhs = 0
        AffineForm::from_vars(n, vars.iter().copied(), rhs)
    }

    #[test]
    fn already_reduced_pair() {
        let sys = LinearSystem::from_rows(2, vec![eq(2, &[0], false), eq(2, &[1], true)]).unwrap();
        let Rref::Reduced(e) = rref(&sys) else {
            panic!("consistent")
        };
        assert_eq!(e.rank(), 2);
        assert_eq!(e.pivots, vec![0, 1]);
    }

    #[test]
    fn contradictory_pair() {
        let sys = LinearSystem::from_rows(2, vec![eq(2, &[0, 1], false), eq(2, &[0, 1], true)]).unwrap();
        assert_eq!(rref(&sys), Rref::Inconsistent);
    }

    #[test]
    fn pivots_are_highest_index() {
        let sys = LinearSystem::from_rows(3, vec![eq(3, &[0, 1, 2], false)]).unwrap();
        let Rref::Reduced(e) = rref(&sys) else { panic!() };
        assert_eq!(e.pivots, vec![2]);
    }

    #[test]
    fn eliminate_example() {
        // {x1+x2=0, x1+x3=1}, eliminate x1 via row 0 -> {x2+x3=1}
        let sys = LinearSystem::from_rows(3, vec![eq(3, &[0, 1], false), eq(3, &[0, 2], true)]).unwrap();
        let out = eliminate_variable(&sys, 0, 0).unwrap();
        assert_eq!(out.rows(), &[eq(3, &[1, 2], true)]);
    }

    #[test]
    fn eliminate_single_row_gives_empty() {
        let sys = LinearSystem::from_rows(2, vec![eq(2, &[1], true)]).unwrap();
        assert!(eliminate_variable(&sys, 1, 0).unwrap().is_empty());
    }

    #[test]
    fn eliminate_rejects_zero_coefficient() {
        let sys = LinearSystem::from_rows(2, vec![eq(2, &[1], true)]).unwrap();
        assert_eq!(
            eliminate_variable(&sys, 0, 0),
            Err(F2Error::ZeroCoefficient { var: 0, row: 0 })
        );
        assert!(eliminate_variable(&sys, 0, 3).is_err());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        assert!(LinearSystem::from_rows(3, vec![AffineForm::zero(2)]).is_err());
    }

    #[test]
    fn form_display() {
        assert_eq!(eq(3, &[0, 2], true).to_string(), "x1 + x3 + 1");
        assert_eq!(AffineForm::constant(2, false).to_string(), "0");
    }
}

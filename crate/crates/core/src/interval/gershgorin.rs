use serde::{Deserialize, Serialize};

use super::complex::sum_up;
use super::{round, ComplexInterval, ComplexIntervalMatrix, Interval};

/// Gershgorin disk `{z : |z - c| <= r}` for some `c` in `center` and
/// `r <= radius.hi()`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: ComplexInterval,
    pub radius: Interval,
}

impl Disk {
    /// True when some point of the disk may be zero.
    pub fn may_contain_zero(&self) -> bool {
        self.center.mig() <= self.radius.hi()
    }

    /// Rigorous enclosure of the real parts covered by the disk.
    pub fn real_range(&self) -> Interval {
        Interval::new(
            round::sub_down(self.center.re.lo(), self.radius.hi()),
            round::add_up(self.center.re.hi(), self.radius.hi()),
        )
    }

    /// True when every point of the disk has nonzero real part.
    pub fn excludes_imaginary_axis(&self) -> bool {
        !self.real_range().contains_zero()
    }
}

/// Gershgorin disks of every point matrix in `l`: disk `i` is centered at
/// `l[i][i]` with radius bounding the off-diagonal absolute row sum.
pub fn gershgorin_disks(l: &ComplexIntervalMatrix) -> Vec<Disk> {
    assert!(l.is_square(), "Gershgorin disks need a square matrix");
    let n = l.rows();
    (0..n)
        .map(|i| {
            let off = (0..n).filter(|&j| j != i);
            let lo = off.clone().map(|j| l[(i, j)].mig()).fold(0.0, round::add_down);
            let hi = sum_up(off.map(|j| l[(i, j)].mag()));
            Disk { center: l[(i, i)], radius: Interval::new(lo.min(hi), hi) }
        })
        .collect()
}

/// True only if the disks are verifiably separated: the lower bound of the
/// center distance exceeds the sum of the radius upper bounds.
pub fn disks_disjoint(d1: &Disk, d2: &Disk) -> bool {
    let gap = (d1.center - d2.center).mig();
    gap > round::add_up(d1.radius.hi(), d2.radius.hi())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::IntervalMatrix;
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    fn disk(c: f64, r: f64) -> Disk {
        Disk { center: ComplexInterval::point(Complex64::new(c, 0.0)), radius: Interval::point(r) }
    }

    #[test]
    fn diagonal_matrix_has_point_disks() {
        let m = IntervalMatrix::from_point(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 5.0]));
        let d = gershgorin_disks(&m.to_complex());
        assert_eq!(d[0].center.re, Interval::point(1.0));
        assert_eq!(d[0].radius.hi(), 0.0);
        assert_eq!(d[1].center.re, Interval::point(5.0));
        assert_eq!(d[1].radius.hi(), 0.0);
    }

    #[test]
    fn off_diagonal_radii() {
        let m = IntervalMatrix::from_point(&DMatrix::from_row_slice(2, 2, &[0.0, 0.1, 0.1, 5.0]));
        let d = gershgorin_disks(&m.to_complex());
        assert_eq!(d[0].radius.hi(), 0.1);
        assert_eq!(d[1].radius.hi(), 0.1);
        assert!(disks_disjoint(&d[0], &d[1]));
    }

    #[test]
    fn disjointness_cases() {
        assert!(disks_disjoint(&disk(0.0, 1.0), &disk(3.0, 1.0)));
        assert!(!disks_disjoint(&disk(0.0, 1.0), &disk(1.5, 1.0)));
        assert!(!disks_disjoint(&disk(0.0, 0.0), &disk(0.0, 0.0)));
    }

    #[test]
    fn imaginary_axis_exclusion() {
        assert!(disk(-2.0, 1.0).excludes_imaginary_axis());
        assert!(!disk(-0.5, 1.0).excludes_imaginary_axis());
        assert!(disk(0.0, 0.0).may_contain_zero());
    }
}

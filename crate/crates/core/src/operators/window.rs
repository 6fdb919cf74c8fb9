use serde::{Deserialize, Serialize};

use crate::algebra::Mode;
use crate::error::{invalid, Result};

/// Square lattice window `|n1|, |n2| <= N`, ordered row-major in `(n1, n2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeWindow {
    half_width: usize,
}

impl LatticeWindow {
    pub fn new(half_width: usize) -> Result<Self> {
        if half_width == 0 {
            return Err(invalid("window half-width must be positive"));
        }
        Ok(LatticeWindow { half_width })
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn side(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn dim(&self) -> usize {
        self.side() * self.side()
    }

    pub fn contains(&self, n: Mode) -> bool {
        let h = self.half_width as i64;
        n.0.abs() <= h && n.1.abs() <= h
    }

    pub fn index(&self, n: Mode) -> Option<usize> {
        if !self.contains(n) {
            return None;
        }
        let h = self.half_width as i64;
        Some(((n.0 + h) as usize) * self.side() + (n.1 + h) as usize)
    }

    pub fn mode(&self, idx: usize) -> Mode {
        let h = self.half_width as i64;
        let s = self.side();
        ((idx / s) as i64 - h, (idx % s) as i64 - h)
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        (0..self.dim()).map(|i| self.mode(i))
    }

    /// Window enlarged by `pad` on every side.
    pub fn padded(&self, pad: usize) -> Self {
        LatticeWindow { half_width: self.half_width + pad }
    }

    /// Whether `n` lies at least `margin` inside the boundary.
    pub fn is_interior(&self, n: Mode, margin: usize) -> bool {
        let h = self.half_width as i64 - margin as i64;
        h >= 0 && n.0.abs() <= h && n.1.abs() <= h
    }

    /// Indices in `outer` of the modes of `self`, in `self` order.
    pub fn embedding_into(&self, outer: &LatticeWindow) -> Result<Vec<usize>> {
        if outer.half_width < self.half_width {
            return Err(invalid(format!(
                "window of half-width {} does not contain half-width {}",
                outer.half_width, self.half_width
            )));
        }
        Ok(self.modes().map(|n| outer.index(n).expect("contained")).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_a_row_major_bijection() {
        let w = LatticeWindow::new(3).unwrap();
        assert_eq!(w.dim(), 49);
        assert_eq!(w.mode(0), (-3, -3));
        assert_eq!(w.mode(1), (-3, -2));
        assert_eq!(w.mode(7), (-2, -3));
        for i in 0..w.dim() {
            assert_eq!(w.index(w.mode(i)), Some(i));
        }
        assert_eq!(w.index((4, 0)), None);
        assert!(LatticeWindow::new(0).is_err());
    }

    #[test]
    fn interior_and_embedding() {
        let w = LatticeWindow::new(4).unwrap();
        assert!(w.is_interior((2, -2), 2));
        assert!(!w.is_interior((3, 0), 2));
        let outer = w.padded(2);
        let emb = w.embedding_into(&outer).unwrap();
        for (i, &j) in emb.iter().enumerate() {
            assert_eq!(w.mode(i), outer.mode(j));
        }
        assert!(outer.embedding_into(&w).is_err());
    }
}

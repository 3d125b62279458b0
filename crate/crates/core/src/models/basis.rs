use crate::error::{Error, Result};

/// Truncated product basis.
///
/// Oscillators: `|n1> (x) |n2>` with `n1 <= n1_max`, `n2 <= n2_max` and, when
/// `total_max` is set, `n1 + n2 <= total_max`. States outside the total cap
/// stay in the product index space (so partial traces keep their shape) but
/// carry no amplitude and are excluded from Hamiltonians.
///
/// Jaynes-Cummings: `|n> (x) |J, m>` with photon number `n <= n_ph_max` and
/// the full atomic multiplet `m = -J..J`, stored as index `m + J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisTruncation {
    Oscillators { n1_max: usize, n2_max: usize, total_max: Option<usize> },
    JaynesCummings { n_ph_max: usize, two_j: u32 },
}

/// One tensor factor of the bipartite product basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    Mode1,
    Mode2,
    Field,
    Atom,
}

impl Subsystem {
    pub fn name(self) -> &'static str {
        match self {
            Subsystem::Mode1 => "mode1",
            Subsystem::Mode2 => "mode2",
            Subsystem::Field => "field",
            Subsystem::Atom => "atom",
        }
    }
}

impl std::str::FromStr for Subsystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mode1" => Ok(Subsystem::Mode1),
            "mode2" => Ok(Subsystem::Mode2),
            "field" => Ok(Subsystem::Field),
            "atom" => Ok(Subsystem::Atom),
            other => Err(Error::Input(format!("unknown subsystem '{other}'"))),
        }
    }
}

impl BasisTruncation {
    pub fn oscillators(n1_max: usize, n2_max: usize) -> Self {
        BasisTruncation::Oscillators { n1_max, n2_max, total_max: None }
    }

    /// Square cutoff `n1, n2 <= n_max` together with `n1 + n2 <= n_max`.
    pub fn oscillators_triangular(n_max: usize) -> Self {
        BasisTruncation::Oscillators { n1_max: n_max, n2_max: n_max, total_max: Some(n_max) }
    }

    pub fn jaynes_cummings(n_ph_max: usize, two_j: u32) -> Self {
        BasisTruncation::JaynesCummings { n_ph_max, two_j }
    }

    /// Dimensions of the first and second tensor factors.
    pub fn dims(&self) -> (usize, usize) {
        match *self {
            BasisTruncation::Oscillators { n1_max, n2_max, .. } => (n1_max + 1, n2_max + 1),
            BasisTruncation::JaynesCummings { n_ph_max, two_j } => (n_ph_max + 1, two_j as usize + 1),
        }
    }

    /// Product-basis dimension `d1 * d2`.
    pub fn dim(&self) -> usize {
        let (a, b) = self.dims();
        a * b
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize) -> usize {
        i1 * self.dims().1 + i2
    }

    #[inline]
    pub fn labels(&self, index: usize) -> (usize, usize) {
        let d2 = self.dims().1;
        (index / d2, index % d2)
    }

    #[inline]
    pub fn is_active(&self, i1: usize, i2: usize) -> bool {
        match *self {
            BasisTruncation::Oscillators { total_max: Some(t), .. } => i1 + i2 <= t,
            _ => true,
        }
    }

    /// Number of basis states that carry amplitude.
    pub fn active_count(&self) -> usize {
        let (d1, d2) = self.dims();
        (0..d1).map(|i| (0..d2).filter(|&j| self.is_active(i, j)).count()).sum()
    }

    /// Whether `(i1, i2)` lies in the outermost two shells of any cutoff.
    pub fn in_outer_shells(&self, i1: usize, i2: usize) -> bool {
        match *self {
            BasisTruncation::Oscillators { n1_max, n2_max, total_max } => {
                i1 + 1 >= n1_max || i2 + 1 >= n2_max || total_max.is_some_and(|t| i1 + i2 + 1 >= t)
            }
            // the atomic multiplet is complete, only the photon cutoff truncates
            BasisTruncation::JaynesCummings { n_ph_max, .. } => i1 + 1 >= n_ph_max,
        }
    }

    /// Every cutoff raised by `by`.
    pub fn enlarged(&self, by: usize) -> Self {
        match *self {
            BasisTruncation::Oscillators { n1_max, n2_max, total_max } => BasisTruncation::Oscillators {
                n1_max: n1_max + by,
                n2_max: n2_max + by,
                total_max: total_max.map(|t| t + by),
            },
            BasisTruncation::JaynesCummings { n_ph_max, two_j } => {
                BasisTruncation::JaynesCummings { n_ph_max: n_ph_max + by, two_j }
            }
        }
    }

    /// Which tensor factor (0 or 1) holds `sub`.
    pub fn factor_of(&self, sub: Subsystem) -> Result<usize> {
        match (self, sub) {
            (BasisTruncation::Oscillators { .. }, Subsystem::Mode1) => Ok(0),
            (BasisTruncation::Oscillators { .. }, Subsystem::Mode2) => Ok(1),
            (BasisTruncation::JaynesCummings { .. }, Subsystem::Field) => Ok(0),
            (BasisTruncation::JaynesCummings { .. }, Subsystem::Atom) => Ok(1),
            _ => Err(Error::Input(format!("subsystem {} does not belong to {self:?}", sub.name()))),
        }
    }

    /// The two subsystems, first factor first.
    pub fn subsystems(&self) -> (Subsystem, Subsystem) {
        match self {
            BasisTruncation::Oscillators { .. } => (Subsystem::Mode1, Subsystem::Mode2),
            BasisTruncation::JaynesCummings { .. } => (Subsystem::Field, Subsystem::Atom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(BasisTruncation::oscillators(5, 7).dim(), 48);
        assert_eq!(BasisTruncation::jaynes_cummings(160, 58).dim(), 161 * 59);
        let tri = BasisTruncation::oscillators_triangular(4);
        assert_eq!(tri.dim(), 25);
        assert_eq!(tri.active_count(), 15);
    }

    #[test]
    fn index_round_trip() {
        let t = BasisTruncation::oscillators(3, 5);
        for k in 0..t.dim() {
            let (a, b) = t.labels(k);
            assert_eq!(t.index(a, b), k);
        }
    }

    #[test]
    fn outer_shells() {
        let t = BasisTruncation::oscillators(10, 10);
        assert!(t.in_outer_shells(9, 0));
        assert!(t.in_outer_shells(0, 10));
        assert!(!t.in_outer_shells(8, 8));
        let tri = BasisTruncation::oscillators_triangular(10);
        assert!(tri.in_outer_shells(5, 4));
        assert!(!tri.in_outer_shells(4, 4));
        let jc = BasisTruncation::jaynes_cummings(10, 3);
        assert!(!jc.in_outer_shells(5, 3));
        assert!(jc.in_outer_shells(9, 0));
    }

    #[test]
    fn subsystem_factors() {
        let t = BasisTruncation::jaynes_cummings(4, 1);
        assert_eq!(t.factor_of(Subsystem::Atom).unwrap(), 1);
        assert!(t.factor_of(Subsystem::Mode1).is_err());
    }
}

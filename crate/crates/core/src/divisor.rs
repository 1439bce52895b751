//! Finite formal sums of points with integer multiplicities.

use serde::Serialize;

use crate::sphere::{SpherePoint, EPS_PT};

/// Point type a divisor can be built over.
pub trait DivisorPoint: Clone + std::fmt::Debug {
    fn same_point(&self, other: &Self) -> bool;
}

impl DivisorPoint for SpherePoint {
    fn same_point(&self, other: &Self) -> bool {
        self.approx_eq(other, EPS_PT)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Divisor<P> {
    entries: Vec<(P, i64)>,
}

impl<P: DivisorPoint> Default for Divisor<P> {
    fn default() -> Self {
        Divisor { entries: Vec::new() }
    }
}

impl<P: DivisorPoint> Divisor<P> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (P, i64)>) -> Self {
        let mut d = Divisor::new();
        for (p, m) in entries {
            d.add(p, m);
        }
        d
    }

    /// Adds `mult * [p]`, merging with an existing coincident point and
    /// dropping entries whose multiplicity cancels to zero.
    pub fn add(&mut self, p: P, mult: i64) {
        if mult == 0 {
            return;
        }
        if let Some(i) = self.entries.iter().position(|(q, _)| q.same_point(&p)) {
            self.entries[i].1 += mult;
            if self.entries[i].1 == 0 {
                self.entries.remove(i);
            }
        } else {
            self.entries.push((p, mult));
        }
    }

    pub fn entries(&self) -> &[(P, i64)] {
        &self.entries
    }

    pub fn degree(&self) -> i64 {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mult_at(&self, p: &P) -> i64 {
        self.entries
            .iter()
            .find(|(q, _)| q.same_point(p))
            .map_or(0, |(_, m)| *m)
    }

    pub fn zeros(&self) -> impl Iterator<Item = &(P, i64)> {
        self.entries.iter().filter(|(_, m)| *m > 0)
    }

    pub fn poles(&self) -> impl Iterator<Item = &(P, i64)> {
        self.entries.iter().filter(|(_, m)| *m < 0)
    }

    pub fn pole_degree(&self) -> i64 {
        -self.poles().map(|(_, m)| m).sum::<i64>()
    }

    pub fn plus(&self, other: &Divisor<P>) -> Divisor<P> {
        let mut d = self.clone();
        for (p, m) in &other.entries {
            d.add(p.clone(), *m);
        }
        d
    }

    pub fn scaled(&self, k: i64) -> Divisor<P> {
        Divisor::from_entries(self.entries.iter().map(|(p, m)| (p.clone(), m * k)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merging_and_cancellation() {
        let mut d = Divisor::new();
        d.add(SpherePoint::finite(1.0, 0.0), 2);
        d.add(SpherePoint::finite(1.0 + 1e-12, 0.0), -2);
        assert!(d.is_empty());
        d.add(SpherePoint::Infinity, -1);
        d.add(SpherePoint::finite(0.0, 0.0), 1);
        assert_eq!(d.degree(), 0);
        assert_eq!(d.pole_degree(), 1);
        assert_eq!(d.scaled(-3).mult_at(&SpherePoint::Infinity), 3);
    }
}

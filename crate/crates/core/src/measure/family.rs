use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::geometry::{Point, Primitive};

/// A finite, ordered, pairwise-disjoint list of primitives in `R^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamily {
    dim: usize,
    primitives: Vec<Primitive>,
    provenance: String,
}

impl SetFamily {
    /// Builds a family and certifies disjointness for every box/box and
    /// annulus/annulus pair. Mixed pairs are taken on trust.
    pub fn new(
        dim: usize,
        primitives: Vec<Primitive>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let family = SetFamily::new_unchecked(dim, primitives, provenance);
        family.check_dims()?;
        family.check_disjoint()?;
        Ok(family)
    }

    /// Builds a family whose disjointness is asserted by the caller.
    pub fn new_unchecked(
        dim: usize,
        primitives: Vec<Primitive>,
        provenance: impl Into<String>,
    ) -> Self {
        SetFamily {
            dim,
            primitives,
            provenance: provenance.into(),
        }
    }

    pub fn empty(dim: usize) -> Self {
        SetFamily::new_unchecked(dim, Vec::new(), "empty")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.primitives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }

    fn check_dims(&self) -> Result<()> {
        for p in &self.primitives {
            if let Some(d) = p.dim() {
                if d != self.dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim,
                        found: d,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn check_disjoint(&self) -> Result<()> {
        for (i, a) in self.primitives.iter().enumerate() {
            for b in &self.primitives[i + 1..] {
                if a.disjoint_from(b) == Some(false) {
                    return Err(Error::Overlap(format!("{a} and {b}")));
                }
            }
        }
        Ok(())
    }

    /// Disjoint union; fails if an exactly checkable pair overlaps.
    pub fn union(&self, other: &SetFamily) -> Result<SetFamily> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut prims = self.primitives.clone();
        prims.extend(other.primitives.iter().cloned());
        SetFamily::new(
            self.dim,
            prims,
            format!("{} + {}", self.provenance, other.provenance),
        )
    }

    /// `A + v`. Fails with `TranslationUnsupported` if an annulus must move.
    pub fn translate(&self, v: &Point) -> Result<SetFamily> {
        v.check_dim(self.dim)?;
        let prims = self
            .primitives
            .iter()
            .map(|p| p.translate(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(SetFamily::new_unchecked(
            self.dim,
            prims,
            format!("{} translated by {v}", self.provenance),
        ))
    }

    pub fn dilate(&self, factor: &BigRational) -> SetFamily {
        SetFamily::new_unchecked(
            self.dim,
            self.primitives.iter().map(|p| p.dilate(factor)).collect(),
            format!("{} dilated by {factor}", self.provenance),
        )
    }

    /// Sub-family of the given primitive indices.
    pub fn select(&self, indices: &[usize]) -> SetFamily {
        SetFamily::new_unchecked(
            self.dim,
            indices
                .iter()
                .map(|&i| self.primitives[i].clone())
                .collect(),
            self.provenance.clone(),
        )
    }

    /// Index of the first primitive containing `p`.
    pub fn locate(&self, p: &Point) -> Option<usize> {
        self.primitives.iter().position(|prim| prim.contains(p))
    }
}

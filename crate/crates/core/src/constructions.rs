//! Exact generators for the two model sets: rapidly inflating boxes and thin
//! annuli. Both share the radius recurrence `R_1 = 1`,
//! `R_{i+1} = K · Σ_{j≤i} R_j`, and both certify their defining inequalities in
//! exact arithmetic before returning.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{int, rat, rat_pow};
use crate::geometry::{Point, Primitive};
use crate::measure::{RadiusSchedule, SetFamily};

fn growth_bound(d: usize, eps: &BigRational) -> BigRational {
    int(100 * d as i64) / eps
}

fn default_growth(d: usize, eps: &BigRational) -> BigRational {
    int(101 * d as i64) / eps
}

/// `R_1 .. R_n` with `R_{i+1} = K · Σ_{j≤i} R_j`.
fn radius_sequence(growth: &BigRational, n: usize) -> Vec<BigRational> {
    let mut r = Vec::with_capacity(n);
    let mut sum = BigRational::zero();
    for i in 0..n {
        let next = if i == 0 {
            BigRational::one()
        } else {
            growth * &sum
        };
        sum += &next;
        r.push(next);
    }
    r
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::DimensionTooSmall { found: d, min: 2 });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxConstructionParams {
    pub d: usize,
    pub epsilon: BigRational,
    pub growth: BigRational,
    pub count: usize,
}

impl BoxConstructionParams {
    /// `ε = 1/(10^5 d)`, `K = 101 d / ε`.
    pub fn paper(d: usize, count: usize) -> Self {
        let epsilon = BigRational::new(BigInt::one(), BigInt::from(100_000u64 * d as u64));
        BoxConstructionParams {
            growth: default_growth(d, &epsilon),
            epsilon,
            d,
            count,
        }
    }

    /// `ε = 1/100`, `K = 101 d / ε`; same certificates, much smaller numbers.
    pub fn relaxed(d: usize, count: usize) -> Self {
        let epsilon = rat(1, 100);
        BoxConstructionParams {
            growth: default_growth(d, &epsilon),
            epsilon,
            d,
            count,
        }
    }

    pub fn with_epsilon(d: usize, epsilon: BigRational, count: usize) -> Self {
        BoxConstructionParams {
            growth: default_growth(d, &epsilon),
            epsilon,
            d,
            count,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.d)?;
        if !self.epsilon.is_positive() || self.epsilon >= BigRational::one() {
            return Err(Error::InvalidParams(format!(
                "epsilon {} must lie in (0, 1)",
                self.epsilon
            )));
        }
        if self.count < 1 {
            return Err(Error::InvalidParams("count must be at least 1".into()));
        }
        let bound = growth_bound(self.d, &self.epsilon);
        if self.growth <= bound {
            return Err(Error::InvalidGrowth {
                growth: self.growth.to_string(),
                bound: bound.to_string(),
            });
        }
        Ok(())
    }
}

/// Boxes `Q_i = (x1_i, 0, …, 0) + [0, ℓ_i]^d`, `i = 1..=N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxConstruction {
    params: BoxConstructionParams,
    /// `R_1 ..= R_{N+1}`
    radii: Vec<BigRational>,
    /// `ℓ_0 ..= ℓ_N`
    sides: Vec<BigRational>,
    /// `x1_1 ..= x1_{N+1}`; the last entry is where the next box would start.
    offsets: Vec<BigRational>,
    family: SetFamily,
}

pub fn build_boxes(params: BoxConstructionParams) -> Result<BoxConstruction> {
    params.validate()?;
    let n = params.count;
    let radii = radius_sequence(&params.growth, n + 1);
    let mut sides = vec![BigRational::one()];
    sides.extend((1..=n).map(|i| &params.epsilon * &radii[i]));
    let mut offsets = Vec::with_capacity(n + 1);
    let mut x = BigRational::zero();
    for j in 1..=n + 1 {
        x += &sides[j - 1] + &radii[j - 1];
        offsets.push(x.clone());
    }
    let d = params.d;
    let prims = (1..=n)
        .map(|i| {
            let mut lo = vec![BigRational::zero(); d];
            lo[0] = offsets[i - 1].clone();
            let hi: Vec<BigRational> = lo.iter().map(|c| c + &sides[i]).collect();
            Primitive::axis_box(Point::new(lo), Point::new(hi))
        })
        .collect::<Result<Vec<_>>>()?;
    let family = SetFamily::new_unchecked(d, prims, "inflating boxes");
    let c = BoxConstruction {
        params,
        radii,
        sides,
        offsets,
        family,
    };
    c.certify()?;
    Ok(c)
}

impl BoxConstruction {
    /// Reassemble from stored sequences; recomputes and recertifies everything.
    pub fn from_parts(
        params: BoxConstructionParams,
        radii: Vec<BigRational>,
        sides: Vec<BigRational>,
        offsets: Vec<BigRational>,
    ) -> Result<Self> {
        let rebuilt = build_boxes(params)?;
        if rebuilt.radii != radii || rebuilt.sides != sides || rebuilt.offsets != offsets {
            return Err(Error::CertificateFailed(
                "stored sequences do not match the recurrence".into(),
            ));
        }
        Ok(rebuilt)
    }

    pub fn params(&self) -> &BoxConstructionParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.params.d
    }

    pub fn count(&self) -> usize {
        self.params.count
    }

    pub fn epsilon(&self) -> &BigRational {
        &self.params.epsilon
    }

    /// `R_i`, `1 ≤ i ≤ N+1`.
    pub fn radius(&self, i: usize) -> &BigRational {
        &self.radii[i - 1]
    }

    /// `ℓ_i`, `0 ≤ i ≤ N`.
    pub fn side(&self, i: usize) -> &BigRational {
        &self.sides[i]
    }

    /// `x1_i`, `1 ≤ i ≤ N+1`.
    pub fn offset(&self, i: usize) -> &BigRational {
        &self.offsets[i - 1]
    }

    pub fn radii(&self) -> &[BigRational] {
        &self.radii
    }

    pub fn sides(&self) -> &[BigRational] {
        &self.sides
    }

    pub fn offsets(&self) -> &[BigRational] {
        &self.offsets
    }

    pub fn family(&self) -> &SetFamily {
        &self.family
    }

    /// `Q_i`, `1 ≤ i ≤ N`.
    pub fn cube(&self, i: usize) -> &Primitive {
        &self.family.primitives()[i - 1]
    }

    /// Lower-left corner `(x1_i, 0, …, 0)` of `Q_i`.
    pub fn corner(&self, i: usize) -> Point {
        let mut c = vec![BigRational::zero(); self.dim()];
        c[0] = self.offset(i).clone();
        Point::new(c)
    }

    /// `2 ε d R_i`.
    pub fn test_radius(&self, i: usize) -> BigRational {
        int(2 * self.dim() as i64) * &self.params.epsilon * self.radius(i)
    }

    /// Index `i` of the box containing `p`.
    pub fn locate(&self, p: &Point) -> Option<usize> {
        self.family.locate(p).map(|k| k + 1)
    }

    /// Box indices, in order, together with each certified inequality.
    pub fn certificates(&self) -> Vec<Certificate> {
        let d = self.dim();
        let dq = int(d as i64);
        let n = self.count();
        let mut out = Vec::new();
        for i in 1..=n {
            let lhs = self.offset(i).clone();
            let rhs = self.side(i) / int(50 * d as i64);
            out.push(Certificate::new("x1_i < l_i/(50d)", i, lhs, rhs));
        }
        for i in 2..=n + 1 {
            let test = self.test_radius(i);
            let left = self.offset(i - 1) + &dq * self.side(i - 1);
            out.push(Certificate::new(
                "x1_{i-1} + d*l_{i-1} < 2*eps*d*R_i",
                i,
                left,
                test.clone(),
            ));
            out.push(Certificate::new(
                "2*eps*d*R_i < x1_i",
                i,
                test,
                self.offset(i).clone(),
            ));
        }
        for i in 1..n {
            out.push(Certificate::new(
                "x1_i + l_i < x1_{i+1}",
                i,
                self.offset(i) + self.side(i),
                self.offset(i + 1).clone(),
            ));
        }
        out
    }

    fn certify(&self) -> Result<()> {
        match self.certificates().into_iter().find(|c| !c.holds) {
            Some(c) => Err(Error::CertificateFailed(format!(
                "{} fails at i = {}: {} >= {}",
                c.name, c.index, c.lhs, c.rhs
            ))),
            None => Ok(()),
        }
    }

    /// Test radii `2 ε d R_i`, `i = 2..=N+1`; at each, the ball swallows
    /// `Q_1..Q_{i-1}` whole and misses `Q_i`.
    pub fn canonical_schedule(&self) -> RadiusSchedule {
        RadiusSchedule::new(
            (2..=self.count() + 1)
                .map(|i| self.test_radius(i))
                .collect(),
        )
        .expect("test radii are positive and increasing")
    }
}

/// One strict inequality `lhs < rhs` checked in exact arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub name: &'static str,
    pub index: usize,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub holds: bool,
}

impl Certificate {
    fn new(name: &'static str, index: usize, lhs: BigRational, rhs: BigRational) -> Self {
        let holds = lhs < rhs;
        Certificate {
            name,
            index,
            lhs,
            rhs,
            holds,
        }
    }

    fn at_most(name: &'static str, index: usize, lhs: BigRational, rhs: BigRational) -> Self {
        let holds = lhs <= rhs;
        Certificate {
            name,
            index,
            lhs,
            rhs,
            holds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnuliConstructionParams {
    pub d: usize,
    pub epsilon0: BigRational,
    pub growth: BigRational,
    pub start_index: usize,
    pub count: usize,
}

impl AnnuliConstructionParams {
    /// `ε₀ = 1/100`, `K = 101 d / ε₀`, starting at index 1.
    pub fn new(d: usize, count: usize) -> Self {
        AnnuliConstructionParams::with_epsilon0(d, rat(1, 100), count)
    }

    pub fn with_epsilon0(d: usize, epsilon0: BigRational, count: usize) -> Self {
        AnnuliConstructionParams {
            growth: default_growth(d, &epsilon0),
            epsilon0,
            d,
            start_index: 1,
            count,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.d)?;
        if !self.epsilon0.is_positive() || self.epsilon0 >= BigRational::one() {
            return Err(Error::InvalidParams(format!(
                "epsilon0 {} must lie in (0, 1)",
                self.epsilon0
            )));
        }
        if self.count < 1 || self.start_index < 1 {
            return Err(Error::InvalidParams(
                "count and start index must be at least 1".into(),
            ));
        }
        let bound = growth_bound(self.d, &self.epsilon0);
        if self.growth <= bound {
            return Err(Error::InvalidGrowth {
                growth: self.growth.to_string(),
                bound: bound.to_string(),
            });
        }
        Ok(())
    }
}

/// Annuli `S_i = { R_i ≤ |y| ≤ (1+ε₀) R_i }` for `i = start .. start+N-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnuliConstruction {
    params: AnnuliConstructionParams,
    /// `R_1 ..= R_{start+N}`
    radii: Vec<BigRational>,
    family: SetFamily,
}

pub fn build_annuli(params: AnnuliConstructionParams) -> Result<AnnuliConstruction> {
    params.validate()?;
    let last = params.start_index + params.count;
    let radii = radius_sequence(&params.growth, last);
    let widen = BigRational::one() + &params.epsilon0;
    let prims = (params.start_index..last)
        .map(|i| Primitive::annulus(radii[i - 1].clone(), &radii[i - 1] * &widen))
        .collect::<Result<Vec<_>>>()?;
    let family = SetFamily::new_unchecked(params.d, prims, "thin annuli");
    let c = AnnuliConstruction {
        params,
        radii,
        family,
    };
    c.certify()?;
    Ok(c)
}

impl AnnuliConstruction {
    pub fn from_parts(params: AnnuliConstructionParams, radii: Vec<BigRational>) -> Result<Self> {
        let rebuilt = build_annuli(params)?;
        if rebuilt.radii != radii {
            return Err(Error::CertificateFailed(
                "stored radii do not match the recurrence".into(),
            ));
        }
        Ok(rebuilt)
    }

    pub fn params(&self) -> &AnnuliConstructionParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.params.d
    }

    pub fn epsilon0(&self) -> &BigRational {
        &self.params.epsilon0
    }

    /// Indices `i` of the annuli present in the family.
    pub fn indices(&self) -> std::ops::Range<usize> {
        self.params.start_index..self.params.start_index + self.params.count
    }

    /// `R_i`, `1 ≤ i ≤ start + N`.
    pub fn radius(&self, i: usize) -> &BigRational {
        &self.radii[i - 1]
    }

    pub fn radii(&self) -> &[BigRational] {
        &self.radii
    }

    pub fn family(&self) -> &SetFamily {
        &self.family
    }

    /// `(1 + ε₀) R_i`.
    pub fn outer_radius(&self, i: usize) -> BigRational {
        (BigRational::one() + &self.params.epsilon0) * self.radius(i)
    }

    pub fn certificates(&self) -> Vec<Certificate> {
        let d = self.dim() as u32;
        let mut out = Vec::new();
        let idx: Vec<usize> = self.indices().collect();
        for w in idx.windows(2) {
            out.push(Certificate::new(
                "(1+eps0)*R_i < R_{i+1}",
                w[0],
                self.outer_radius(w[0]),
                self.radius(w[1]).clone(),
            ));
        }
        // |S_j| = c_d R_j^d [(1+ε₀)^d − 1]; the common factor cancels.
        let mut below = BigRational::zero();
        for &i in &idx {
            let own = rat_pow(self.radius(i), d);
            out.push(Certificate::at_most(
                "sum_{j<i} R_j^d <= R_i^d/10",
                i,
                below.clone(),
                &own / int(10),
            ));
            below += own;
        }
        out
    }

    fn certify(&self) -> Result<()> {
        match self.certificates().into_iter().find(|c| !c.holds) {
            Some(c) => Err(Error::CertificateFailed(format!(
                "{} fails at i = {}: {} vs {}",
                c.name, c.index, c.lhs, c.rhs
            ))),
            None => Ok(()),
        }
    }

    /// Test radii `(1 + ε₀) R_i` over the annuli present.
    pub fn canonical_schedule(&self) -> RadiusSchedule {
        RadiusSchedule::new(self.indices().map(|i| self.outer_radius(i)).collect())
            .expect("outer radii are positive and increasing")
    }
}

/// Either construction, for code that handles both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    Boxes(BoxConstruction),
    Annuli(AnnuliConstruction),
}

impl Construction {
    pub fn family(&self) -> &SetFamily {
        match self {
            Construction::Boxes(b) => b.family(),
            Construction::Annuli(a) => a.family(),
        }
    }

    pub fn dim(&self) -> usize {
        self.family().dim()
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Construction::Boxes(_) => "boxes",
            Construction::Annuli(_) => "annuli",
        }
    }

    pub fn certificates(&self) -> Vec<Certificate> {
        match self {
            Construction::Boxes(b) => b.certificates(),
            Construction::Annuli(a) => a.certificates(),
        }
    }
}

/// Which radii to evaluate a construction at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScheduleKind {
    /// The radii at which the density certificates are stated.
    Canonical,
    /// `r0 · g^i`, `i = 0..n`.
    Geometric {
        r0: BigRational,
        ratio: BigRational,
        terms: usize,
    },
}

pub fn canonical_schedule(
    construction: &Construction,
    kind: &ScheduleKind,
) -> Result<RadiusSchedule> {
    match kind {
        ScheduleKind::Canonical => Ok(match construction {
            Construction::Boxes(b) => b.canonical_schedule(),
            Construction::Annuli(a) => a.canonical_schedule(),
        }),
        ScheduleKind::Geometric { r0, ratio, terms } => {
            RadiusSchedule::geometric(r0.clone(), ratio.clone(), *terms)
        }
    }
}

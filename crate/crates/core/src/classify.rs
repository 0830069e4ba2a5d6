//! The four generic scenarios and the per-side attractor census.

use std::fmt;

use crate::error::{Error, Hypothesis, Piece};
use crate::model::{self, BranchReport, MuSide, Object, PwlMap};
use crate::scalar::Scalar;
use crate::spectral::{self, SpectralCounts, Stability};

/// What happens as `mu` crosses zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    /// (i) The fixed points live on opposite sides; no LR-cycle.
    PersistenceNoCycle,
    /// (ii) Both fixed points on one side; no LR-cycle.
    FoldNoCycle,
    /// (iii) Fixed points on opposite sides; an LR-cycle on one of them.
    PersistenceWithCycle,
    /// (iv) Both fixed points and the LR-cycle on the same side.
    FoldWithCycle,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::PersistenceNoCycle,
        Scenario::FoldNoCycle,
        Scenario::PersistenceWithCycle,
        Scenario::FoldWithCycle,
    ];

    /// The scenario for given parities of the plus and minus sums, or `None`
    /// for the combination that cannot occur (odd, odd, even cycle sum).
    pub fn from_counts(counts: &SpectralCounts) -> Option<Scenario> {
        match (counts.plus_sum() % 2, counts.minus_sum() % 2) {
            (0, 0) => Some(Scenario::PersistenceNoCycle),
            (1, 0) => Some(Scenario::FoldNoCycle),
            (0, 1) => Some(Scenario::PersistenceWithCycle),
            _ if counts.cycle_sum() % 2 == 1 => Some(Scenario::FoldWithCycle),
            _ => None,
        }
    }

    pub fn roman(self) -> &'static str {
        ["i", "ii", "iii", "iv"][self.index()]
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn has_cycle(self) -> bool {
        matches!(self, Scenario::PersistenceWithCycle | Scenario::FoldWithCycle)
    }

    pub fn is_fold(self) -> bool {
        matches!(self, Scenario::FoldNoCycle | Scenario::FoldWithCycle)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.roman())
    }
}

/// Which fixed point shares its side of `mu` with the LR-cycle in (iii).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CycleCompanion {
    RightFixedPoint,
    LeftFixedPoint,
}

impl CycleCompanion {
    pub fn object(self) -> Object {
        match self {
            CycleCompanion::RightFixedPoint => Object::FixedRight,
            CycleCompanion::LeftFixedPoint => Object::FixedLeft,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CensusEntry {
    pub object: Object,
    pub stability: Stability,
}

impl fmt::Display for CensusEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.object, self.stability)
    }
}

#[derive(Clone, Debug)]
pub struct Classification<T> {
    pub scenario: Scenario,
    pub counts: SpectralCounts,
    /// Set in scenario (iii) only.
    pub companion: Option<CycleCompanion>,
    pub fixed_left: BranchReport<T>,
    pub fixed_right: BranchReport<T>,
    pub cycle: BranchReport<T>,
    pub census_negative: Vec<CensusEntry>,
    pub census_positive: Vec<CensusEntry>,
}

impl<T: Scalar> Classification<T> {
    pub fn census(&self, side: MuSide) -> &[CensusEntry] {
        match side {
            MuSide::Negative => &self.census_negative,
            MuSide::Positive => &self.census_positive,
        }
    }

    pub fn branches(&self) -> [&BranchReport<T>; 3] {
        [&self.fixed_left, &self.fixed_right, &self.cycle]
    }

    pub fn branch(&self, object: Object) -> &BranchReport<T> {
        match object {
            Object::FixedLeft => &self.fixed_left,
            Object::FixedRight => &self.fixed_right,
            Object::LrCycle => &self.cycle,
        }
    }

    /// The object predicted to attract on `side`, if any.
    pub fn attractor(&self, side: MuSide) -> Option<Object> {
        self.census(side).iter().find(|e| e.stability == Stability::Yes).map(|e| e.object)
    }

    /// One-line summary of the scenario.
    pub fn headline(&self) -> String {
        let side = |o: Object| self.branch(o).admissible_for.side().unwrap_or(MuSide::Positive);
        let body = match self.scenario {
            Scenario::PersistenceNoCycle => "persistence, no period-two".to_string(),
            Scenario::FoldNoCycle => "nonsmooth-fold, no period-two".to_string(),
            Scenario::PersistenceWithCycle => {
                let with = self.companion.map_or(Object::FixedRight, CycleCompanion::object);
                format!("persistence, LR-cycle coexists with {with} for {}", side(Object::LrCycle))
            }
            Scenario::FoldWithCycle => {
                format!("x^L, x^R and LR-cycle admissible for {}", side(Object::LrCycle))
            }
        };
        format!("scenario {}: {body}", self.scenario)
    }
}

impl<T: Scalar> fmt::Display for Classification<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.headline())?;
        writeln!(f, "eigenvalue counts:")?;
        writeln!(f, "{}", self.counts)?;
        writeln!(f, "branches (per unit μ):")?;
        for branch in self.branches() {
            writeln!(f, "  {branch}")?;
        }
        for side in MuSide::BOTH {
            let census = self.census(side);
            if census.is_empty() {
                writeln!(f, "census {side}: empty")?;
            } else {
                let items: Vec<String> = census.iter().map(ToString::to_string).collect();
                writeln!(f, "census {side}: {}", items.join(", "))?;
            }
        }
        Ok(())
    }
}

/// Every genericity hypothesis the map violates.
pub fn violated_hypotheses<T: Scalar>(map: &PwlMap<T>, counts: &SpectralCounts) -> Vec<Hypothesis> {
    let flags = counts.degenerate;
    let mut out = Vec::new();
    if map.rho_b_sign().is_zero() {
        out.push(Hypothesis::NonDegenerate);
    }
    let pairs = [
        (flags.eig_one_left, Hypothesis::EigOneLeft),
        (flags.eig_one_right, Hypothesis::EigOneRight),
        (flags.eig_one_cycle, Hypothesis::EigOneCycle),
        (flags.eig_minus_one_left, Hypothesis::EigMinusOneLeft),
        (flags.eig_minus_one_right, Hypothesis::EigMinusOneRight),
    ];
    out.extend(pairs.into_iter().filter(|(hit, _)| *hit).map(|(_, h)| h));
    out
}

fn as_hypothesis(err: Error) -> Error {
    let h = match err {
        Error::EigOneDegenerate(Piece::Left) => Hypothesis::EigOneLeft,
        Error::EigOneDegenerate(Piece::Right) => Hypothesis::EigOneRight,
        Error::EigMinusOneDegenerate(Piece::Left) => Hypothesis::EigMinusOneLeft,
        Error::EigMinusOneDegenerate(Piece::Right) => Hypothesis::EigMinusOneRight,
        Error::EigOneDegenerateRL => Hypothesis::EigOneCycle,
        Error::NondegeneracyViolated => Hypothesis::NonDegenerate,
        other => return other,
    };
    Error::Degenerate(vec![h])
}

fn inconsistent<T: Scalar>(check: &'static str, map: &PwlMap<T>, counts: &SpectralCounts, detail: String) -> Error {
    Error::Inconsistent {
        check,
        witness: format!("{detail}\ncounts:\n{counts}\nmap: {}", map.witness()),
    }
}

/// Classifies the bifurcation of a map satisfying every genericity
/// hypothesis.
pub fn classify<T: Scalar>(map: &PwlMap<T>) -> Result<Classification<T>, Error> {
    classify_with(map, spectral::counts(map.left(), map.right()))
}

/// [`classify`] with the counts already known.
pub(crate) fn classify_with<T: Scalar>(map: &PwlMap<T>, counts: SpectralCounts) -> Result<Classification<T>, Error> {
    let violated = violated_hypotheses(map, &counts);
    if !violated.is_empty() {
        return Err(Error::Degenerate(violated));
    }
    let scenario = Scenario::from_counts(&counts).ok_or_else(|| {
        inconsistent(
            "scenario (v) parities",
            map,
            &counts,
            "plus and minus sums are odd but the cycle sum is even".into(),
        )
    })?;
    let (fixed_left, fixed_right) = model::fixed_points_with(map, &counts).map_err(as_hypothesis)?;
    let cycle = model::lr_cycle_with(map, &counts).map_err(as_hypothesis)?;

    let l_side = fixed_left.admissible_for.side();
    let r_side = fixed_right.admissible_for.side();
    let c_side = cycle.admissible_for.side();
    let companion = (scenario == Scenario::PersistenceWithCycle).then(|| {
        if counts.cycle_sum() % 2 == 0 {
            CycleCompanion::RightFixedPoint
        } else {
            CycleCompanion::LeftFixedPoint
        }
    });
    let companion_side = companion.map(|c| match c {
        CycleCompanion::RightFixedPoint => r_side,
        CycleCompanion::LeftFixedPoint => l_side,
    });
    let agrees = l_side.is_some()
        && r_side.is_some()
        && (l_side == r_side) == scenario.is_fold()
        && c_side.is_some() == scenario.has_cycle()
        && match scenario {
            Scenario::PersistenceWithCycle => companion_side == Some(c_side),
            Scenario::FoldWithCycle => c_side == l_side,
            _ => true,
        };
    if !agrees {
        return Err(inconsistent(
            "parity-predicted sides",
            map,
            &counts,
            format!(
                "scenario {scenario}: closed-form sides x^L {:?}, x^R {:?}, LR-cycle {:?}",
                fixed_left.admissible_for, fixed_right.admissible_for, cycle.admissible_for
            ),
        ));
    }

    let census_of = |side: MuSide| -> Vec<CensusEntry> {
        [&fixed_left, &fixed_right, &cycle]
            .into_iter()
            .filter(|b| b.is_admissible_on(side))
            .map(|b| CensusEntry { object: b.object, stability: b.stability })
            .collect()
    };
    let census_negative = census_of(MuSide::Negative);
    let census_positive = census_of(MuSide::Positive);
    for census in [&census_negative, &census_positive] {
        if census.iter().filter(|e| e.stability == Stability::Yes).count() > 1 {
            return Err(inconsistent("single attractor", map, &counts, format!("census {census:?}")));
        }
    }
    Ok(Classification {
        scenario,
        counts,
        companion,
        fixed_left,
        fixed_right,
        cycle,
        census_negative,
        census_positive,
    })
}

/// Admissible objects on one side of `mu` with their stability.
pub fn census<T: Scalar>(map: &PwlMap<T>, side: MuSide) -> Result<Vec<CensusEntry>, Error> {
    Ok(classify(map)?.census(side).to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn one_d(al: (i64, i64), ar: (i64, i64)) -> PwlMap<Rational> {
        let q = Rational::from_ratio;
        PwlMap::one_dimensional(q(al.0, al.1), q(ar.0, ar.1), q(1, 1))
    }

    #[test]
    fn four_panels() {
        let cases = [
            ((2, 5), (-2, 5), Scenario::PersistenceNoCycle),
            ((2, 1), (-2, 5), Scenario::FoldNoCycle),
            ((2, 5), (-3, 2), Scenario::PersistenceWithCycle),
            ((2, 1), (-3, 2), Scenario::FoldWithCycle),
        ];
        for (al, ar, expected) in cases {
            assert_eq!(classify(&one_d(al, ar)).unwrap().scenario, expected);
        }
    }

    #[test]
    fn panel_c_companion_and_census() {
        let c = classify(&one_d((2, 5), (-3, 2))).unwrap();
        assert_eq!(c.counts.cycle_sum(), 0);
        assert_eq!(c.companion, Some(CycleCompanion::RightFixedPoint));
        assert_eq!(
            c.census_positive,
            vec![
                CensusEntry { object: Object::FixedRight, stability: Stability::No },
                CensusEntry { object: Object::LrCycle, stability: Stability::Yes },
            ]
        );
        assert_eq!(c.attractor(MuSide::Positive), Some(Object::LrCycle));
        assert_eq!(c.headline(), "scenario (iii): persistence, LR-cycle coexists with x^R for μ>0");
    }

    #[test]
    fn panel_a_and_d_census() {
        let a = classify(&one_d((2, 5), (-2, 5))).unwrap();
        assert_eq!(a.census_positive, vec![CensusEntry { object: Object::FixedRight, stability: Stability::Yes }]);
        assert_eq!(a.headline(), "scenario (i): persistence, no period-two");
        let d = classify(&one_d((2, 1), (-3, 2))).unwrap();
        assert!(d.census_negative.is_empty());
        assert_eq!(d.census_positive.len(), 3);
        assert_eq!(d.headline(), "scenario (iv): x^L, x^R and LR-cycle admissible for μ>0");
    }

    #[test]
    fn degeneracy_lists_every_hypothesis() {
        match classify(&one_d((1, 1), (-1, 1))) {
            Err(Error::Degenerate(list)) => {
                assert_eq!(list, vec![Hypothesis::EigOneLeft, Hypothesis::EigMinusOneRight]);
            }
            other => panic!("{other:?}"),
        }
        let zero_b = PwlMap::one_dimensional(Rational::from_ratio(1, 2), Rational::from_ratio(-1, 2), Rational::from_ratio(0, 1));
        assert!(matches!(classify(&zero_b), Err(Error::Degenerate(l)) if l == vec![Hypothesis::NonDegenerate]));
    }

    #[test]
    fn companion_left_when_cycle_sum_odd() {
        // a_L = -1.5 on the left, a_R = 0.5: the cycle sits with x^L.
        let c = classify(&one_d((-3, 2), (1, 2))).unwrap();
        assert_eq!(c.scenario, Scenario::PersistenceWithCycle);
        assert_eq!(c.companion, Some(CycleCompanion::LeftFixedPoint));
        assert_eq!(c.cycle.admissible_for.side(), c.fixed_left.admissible_for.side());
    }
}

//! Exact feasibility checks for the exponent systems of rough-data
//! well-posedness. Every comparison is rational; an equality on a strict
//! inequality is reported as [`Verdict::Boundary`], never coerced.

use alloc::string::String;
use alloc::vec::Vec;

use crate::besov::BesovParams;
use crate::error::{Error, Result};
use crate::rational::{self, int, rat, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "UPPERCASE"))]
pub enum Verdict {
    Pass,
    Fail,
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Relation {
    #[cfg_attr(feature = "serde", serde(rename = "<"))]
    Less,
    #[cfg_attr(feature = "serde", serde(rename = "<="))]
    LessEq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConditionCheck {
    pub id: String,
    pub statement: String,
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_str"))]
    pub lhs: Rational,
    pub relation: Relation,
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_str"))]
    pub rhs: Rational,
    pub verdict: Verdict,
}

impl ConditionCheck {
    fn new(id: &str, statement: &str, lhs: Rational, relation: Relation, rhs: Rational) -> Self {
        let verdict = match relation {
            Relation::LessEq if lhs <= rhs => Verdict::Pass,
            Relation::Less if lhs < rhs => Verdict::Pass,
            Relation::Less if lhs == rhs => Verdict::Boundary,
            _ => Verdict::Fail,
        };
        Self {
            id: String::from(id),
            statement: String::from(statement),
            lhs,
            relation,
            rhs,
            verdict,
        }
    }
}

/// Symmetric or custom solution of the auxiliary exponent system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Exponents {
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_str"))]
    pub a: Rational,
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_str"))]
    pub b: Rational,
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_str"))]
    pub alpha: Rational,
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_str"))]
    pub beta: Rational,
    /// `(1 − α − β)/r`, the time exponent of the nonlinear bound.
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_str"))]
    pub epsilon: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Gate {
    Local,
    Global,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdmissibilityReport {
    pub gate: Gate,
    pub params: BesovParams,
    pub conditions: Vec<ConditionCheck>,
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_str"))]
    pub initial_regularity: Rational,
    /// Whether `−s + 2 − 2/r < 0`.
    pub negative_initial_regularity: bool,
    pub exponents: Option<Exponents>,
}

impl AdmissibilityReport {
    /// `Fail` if any condition fails, else `Boundary` if any sits on its
    /// boundary, else `Pass`.
    pub fn verdict(&self) -> Verdict {
        let mut out = Verdict::Pass;
        for c in &self.conditions {
            match c.verdict {
                Verdict::Fail => return Verdict::Fail,
                Verdict::Boundary => out = Verdict::Boundary,
                Verdict::Pass => {}
            }
        }
        out
    }

    pub fn all_pass(&self) -> bool {
        self.verdict() == Verdict::Pass
    }

    /// First condition that does not pass.
    pub fn first_violation(&self) -> Option<&ConditionCheck> {
        self.conditions.iter().find(|c| c.verdict != Verdict::Pass)
    }

    pub fn condition(&self, id: &str) -> Option<&ConditionCheck> {
        self.conditions.iter().find(|c| c.id == id)
    }
}

fn local_conditions(bp: &BesovParams) -> Vec<ConditionCheck> {
    use Relation::*;
    let (s, p, q, r) = (bp.s, bp.p, bp.q, bp.r);
    let two = int(2);
    let x = two / p;
    let y = two / r;
    alloc::vec![
        ConditionCheck::new("1", "r <= q", r, LessEq, q),
        ConditionCheck::new("2", "s - 1 < 2/p", s - int(1), Less, x),
        ConditionCheck::new("3", "1 - s < 2/p", int(1) - s, Less, x),
        ConditionCheck::new("4", "s + 2/p + 2/r < 3", s + x + y, Less, int(3)),
        ConditionCheck::new("5", "2 < s + 2/p + 2/r", two, Less, s + x + y),
        ConditionCheck::new("6", "3 < s + 2/p + 4/r", int(3), Less, s + x + two * y),
    ]
}

fn global_conditions(bp: &BesovParams) -> Vec<ConditionCheck> {
    use Relation::*;
    let (s, p, q, r) = (bp.s, bp.p, bp.q, bp.r);
    let two = int(2);
    let x = two / p;
    let y = two / r;
    alloc::vec![
        ConditionCheck::new("g1", "2 < r", two, Less, r),
        ConditionCheck::new("g2", "r <= q", r, LessEq, q),
        ConditionCheck::new("g3", "0 < 2/p + 2/r - 1", int(0), Less, x + y - int(1)),
        ConditionCheck::new("g4", "-2/p < s - 1", -x, Less, s - int(1)),
        ConditionCheck::new("g5", "s - 1 < 2/p", s - int(1), Less, x),
        ConditionCheck::new("g6", "2 < s + 2/p + 2/r", two, Less, s + x + y),
        ConditionCheck::new("g7", "s + 2/p + 2/r < 3", s + x + y, Less, int(3)),
        ConditionCheck::new("g8", "3 < s + 2/p + 4/r", int(3), Less, s + x + two * y),
    ]
}

fn report(gate: Gate, bp: &BesovParams, conditions: Vec<ConditionCheck>) -> AdmissibilityReport {
    let initial_regularity = bp.initial_regularity();
    let local_ok = local_conditions(bp)
        .iter()
        .all(|c| c.verdict == Verdict::Pass);
    let gate_ok = conditions.iter().all(|c| c.verdict == Verdict::Pass);
    AdmissibilityReport {
        gate,
        params: *bp,
        conditions,
        initial_regularity,
        negative_initial_regularity: initial_regularity < int(0),
        exponents: if local_ok && gate_ok {
            derive_exponents(bp).ok()
        } else {
            None
        },
    }
}

/// The six local-existence conditions.
pub fn check_local(bp: &BesovParams) -> AdmissibilityReport {
    report(Gate::Local, bp, local_conditions(bp))
}

/// The global-existence conditions.
pub fn check_global(bp: &BesovParams) -> AdmissibilityReport {
    report(Gate::Global, bp, global_conditions(bp))
}

pub fn check(bp: &BesovParams, gate: Gate) -> AdmissibilityReport {
    match gate {
        Gate::Local => check_local(bp),
        Gate::Global => check_global(bp),
    }
}

/// Default `q` when only `(s, p, r)` are fixed: `max(r, 2) + 1`.
pub fn default_q(r: Rational) -> Rational {
    core::cmp::max(r, int(2)) + int(1)
}

/// Checks of the auxiliary system for a given `(a, b)`.
pub fn exponent_conditions(bp: &BesovParams, a: Rational, b: Rational) -> Vec<ConditionCheck> {
    use Relation::*;
    let two = int(2);
    let lower = two - two / bp.r - bp.s;
    let x = two / bp.p;
    let sum = a + b;
    let t_target = x + int(1) - bp.s;
    let q_lhs = bp.r / two * (sum + two * (bp.s - two + two / bp.r));
    alloc::vec![
        ConditionCheck::new("U.a", "2 - 2/r - s < a", lower, Less, a),
        ConditionCheck::new("U.b", "2 - 2/r - s < b", lower, Less, b),
        ConditionCheck::new("D.a", "a < 2/p", a, Less, x),
        ConditionCheck::new("D.b", "b < 2/p", b, Less, x),
        // equality constraint expressed as two non-strict inequalities
        ConditionCheck::new("T.le", "a + b <= 2/p + 1 - s", sum, LessEq, t_target),
        ConditionCheck::new("T.ge", "2/p + 1 - s <= a + b", t_target, LessEq, sum),
        ConditionCheck::new(
            "Q",
            "(r/2)[(a+b) + 2(s - 2 + 2/r)] < 1",
            q_lhs,
            Less,
            int(1)
        ),
        ConditionCheck::new("C", "0 < a + b", int(0), Less, sum),
    ]
}

/// Exponents for the symmetric choice `a = b = 1/p + 1/2 − s/2`.
pub fn derive_exponents(bp: &BesovParams) -> Result<Exponents> {
    let a = int(1) / bp.p + rat(1, 2) - bp.s / int(2);
    derive_exponents_with(bp, a)
}

/// Exponents for a custom `a`, with `b = 2/p + 1 − s − a`.
pub fn derive_exponents_with(bp: &BesovParams, a: Rational) -> Result<Exponents> {
    if let Some(c) = local_conditions(bp)
        .into_iter()
        .find(|c| c.verdict != Verdict::Pass)
    {
        return Err(Error::InadmissibleParams(alloc::format!(
            "({}) {}",
            c.id,
            c.statement
        )));
    }
    let two = int(2);
    let b = two / bp.p + int(1) - bp.s - a;
    if let Some(c) = exponent_conditions(bp, a, b)
        .into_iter()
        .find(|c| c.verdict != Verdict::Pass)
    {
        return Err(Error::InadmissibleParams(alloc::format!(
            "({}) {} for a = {}",
            c.id,
            c.statement,
            rational::format(&a)
        )));
    }
    let shift = bp.s - two + two / bp.r;
    let alpha = bp.r / two * (a + shift);
    let beta = bp.r / two * (b + shift);
    let epsilon = (int(1) - alpha - beta) / bp.r;
    Ok(Exponents {
        a,
        b,
        alpha,
        beta,
        epsilon,
    })
}

/// Which piece of the closed form for `max{1 − 2/r − 2/p, 2/p − 1}` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MaxBranch {
    /// `1 < p ≤ 2`: value `2/p − 1`.
    SmallP,
    /// `p > 2`, `1 < r ≤ p/(p−2)`: value `2/p − 1`.
    LargePSmallR,
    /// `p > 2`, `r > p/(p−2)`: value `1 − 2/r − 2/p`.
    LargePLargeR,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaxValue {
    pub value: Rational,
    pub branch: MaxBranch,
    /// `max` evaluated directly.
    pub direct: Rational,
}

/// Lower bound for the initial regularity in terms of `(p, r)`.
pub fn appendix_a_max(p: Rational, r: Rational) -> MaxValue {
    let two = int(2);
    let first = int(1) - two / r - two / p;
    let second = two / p - int(1);
    let direct = core::cmp::max(first, second);
    let (branch, value) = if p <= two {
        (MaxBranch::SmallP, second)
    } else if r <= p / (p - two) {
        (MaxBranch::LargePSmallR, second)
    } else {
        (MaxBranch::LargePLargeR, first)
    };
    MaxValue {
        value,
        branch,
        direct,
    }
}

/// Geometric grid `lower + 2^j (1 + i/8)`, `j = −depth..=depth`, `i = 0..8`.
pub fn geometric_grid(lower: Rational, depth: u32) -> Vec<Rational> {
    let mut out = Vec::new();
    for j in -(depth as i32)..=(depth as i32) {
        let scale = if j >= 0 {
            int(1i128 << j)
        } else {
            rat(1, 1i128 << (-j))
        };
        for i in 0..8 {
            out.push(lower + scale * (int(1) + rat(i, 8)));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfimumScan {
    pub r_lower_bound: Rational,
    pub depth: u32,
    /// Smallest value found.
    pub infimum: Rational,
    /// `(p, r)` attaining the running minimum, in order of improvement.
    pub witnesses: Vec<(Rational, Rational, Rational)>,
    pub points: usize,
}

/// Scans the max formula over `p ∈ 1 + grid`, `r ∈ r_lower_bound + grid`.
pub fn appendix_a_infimum(r_lower_bound: Rational, depth: u32) -> InfimumScan {
    let ps = geometric_grid(int(1), depth);
    let rs = geometric_grid(r_lower_bound, depth);
    let mut best: Option<Rational> = None;
    let mut witnesses = Vec::new();
    for p in &ps {
        for r in &rs {
            let v = appendix_a_max(*p, *r).value;
            if best.map_or(true, |b| v < b) {
                best = Some(v);
                witnesses.push((*p, *r, v));
            }
        }
    }
    InfimumScan {
        r_lower_bound,
        depth,
        infimum: best.unwrap_or_else(|| int(0)),
        witnesses,
        points: ps.len() * rs.len(),
    }
}

/// Classification of one point `(x, y) = (2/p, 2/r)` for a fixed `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionPoint {
    pub x: Rational,
    pub y: Rational,
    /// Local system in `(x, y)` form.
    pub local: bool,
    /// Local system plus `y < 1` and `x + y > 1`.
    pub global: bool,
}

pub fn classify_point(s: Rational, x: Rational, y: Rational) -> RegionPoint {
    let zero = int(0);
    let two = int(2);
    let one = int(1);
    let three = int(3);
    let local = two - s < x + y
        && x + y < three - s
        && three - s < x + two * y
        && s - one < x
        && one - s < x
        && zero < x
        && x < two
        && zero < y
        && y < two;
    let global = local && y < one && x + y > one;
    RegionPoint {
        x,
        y,
        local,
        global,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionReport {
    pub s: Rational,
    pub depth: u32,
    pub points: Vec<RegionPoint>,
    pub local_count: usize,
    pub global_count: usize,
}

impl RegionReport {
    pub fn is_empty(&self) -> bool {
        self.local_count == 0
    }
}

/// Classifies the interior grid `x, y ∈ {2i/2^depth : 0 < i < 2^depth}`.
pub fn scan_region(s: Rational, depth: u32) -> RegionReport {
    let steps = 1i128 << depth;
    let mut points = Vec::with_capacity(((steps - 1) * (steps - 1)) as usize);
    for i in 1..steps {
        for j in 1..steps {
            points.push(classify_point(s, rat(2 * i, steps), rat(2 * j, steps)));
        }
    }
    let local_count = points.iter().filter(|p| p.local).count();
    let global_count = points.iter().filter(|p| p.global).count();
    RegionReport {
        s,
        depth,
        points,
        local_count,
        global_count,
    }
}

/// Sample values of `s` inside and outside the admissible interval `(−1, 2)`.
pub fn s_samples() -> (Vec<Rational>, Vec<Rational>) {
    (
        alloc::vec![
            rat(-9, 10),
            rat(-1, 2),
            int(0),
            rat(1, 2),
            int(1),
            rat(3, 2),
            rat(19, 10)
        ],
        alloc::vec![int(-2), int(-1), int(2), rat(5, 2), int(3)],
    )
}

/// A reference example row `(s, r, p)` with its claimed initial regularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExampleRow {
    pub gate: Gate,
    pub s: Rational,
    pub r: Rational,
    pub p: Rational,
    pub claimed: Rational,
}

pub fn example_rows() -> Vec<ExampleRow> {
    let row = |gate, s, r, p, claimed| ExampleRow {
        gate,
        s,
        r,
        p,
        claimed,
    };
    alloc::vec![
        row(Gate::Local, rat(9, 10), rat(20, 19), int(12), rat(-4, 5)),
        row(
            Gate::Global,
            rat(-9, 10),
            rat(100, 49),
            rat(40, 39),
            rat(48, 25)
        ),
        row(
            Gate::Local,
            rat(11, 10),
            rat(8, 7),
            rat(40, 3),
            rat(-17, 20)
        ),
        row(
            Gate::Global,
            rat(149, 100),
            rat(200, 99),
            int(4),
            rat(-48, 100)
        ),
        row(Gate::Global, rat(11, 10), rat(40, 19), int(3), rat(-1, 20)),
        row(Gate::Global, rat(4, 3), int(3), rat(5, 2), int(0)),
        row(Gate::Global, rat(19, 10), int(21), int(2), rat(1, 210)),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExampleResult {
    pub row: ExampleRow,
    pub q: Rational,
    pub computed: Rational,
    pub matches: bool,
    pub report: AdmissibilityReport,
}

/// Recomputes every example row, with `q` from [`default_q`].
pub fn reproduce_examples() -> Result<Vec<ExampleResult>> {
    example_rows()
        .into_iter()
        .map(|row| {
            let q = default_q(row.r);
            let bp = BesovParams::new(row.s, row.p, q, row.r)?;
            let report = check(&bp, row.gate);
            let computed = bp.initial_regularity();
            Ok(ExampleResult {
                row,
                q,
                computed,
                matches: computed == row.claimed,
                report,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(s: Rational, p: Rational, q: Rational, r: Rational) -> BesovParams {
        BesovParams::new(s, p, q, r).unwrap()
    }

    #[test]
    fn local_examples() {
        let rep = check_local(&params(rat(9, 10), int(12), int(2), rat(20, 19)));
        assert_eq!(rep.verdict(), Verdict::Pass);
        assert_eq!(rep.initial_regularity, rat(-4, 5));

        let rep = check_local(&params(rat(11, 10), rat(40, 3), int(3), rat(8, 7)));
        assert_eq!(rep.verdict(), Verdict::Boundary);
        let c4 = rep.condition("4").unwrap();
        assert_eq!(c4.lhs, int(3));
        assert_eq!(c4.verdict, Verdict::Boundary);
        assert!(rep.exponents.is_none());

        let rep = check_local(&params(int(0), int(2), int(2), int(2)));
        assert_eq!(rep.condition("5").unwrap().verdict, Verdict::Boundary);
        assert_ne!(rep.verdict(), Verdict::Pass);
    }

    #[test]
    fn equality_on_non_strict_condition_passes() {
        let rep = check_local(&params(rat(4, 3), rat(5, 2), int(3), int(3)));
        assert_eq!(rep.condition("1").unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn global_examples() {
        for (s, p, q, r, reg) in [
            (rat(4, 3), rat(5, 2), int(3), int(3), int(0)),
            (rat(19, 10), int(2), int(21), int(21), rat(1, 210)),
            (rat(149, 100), int(4), int(3), rat(200, 99), rat(-12, 25)),
        ] {
            let rep = check_global(&params(s, p, q, r));
            assert_eq!(rep.verdict(), Verdict::Pass, "{:?}", rep.first_violation());
            assert_eq!(rep.initial_regularity, reg);
        }
    }

    #[test]
    fn symmetric_exponents() {
        let e = derive_exponents(&params(rat(4, 3), rat(5, 2), int(3), int(3))).unwrap();
        assert_eq!((e.a, e.b), (rat(7, 30), rat(7, 30)));
        assert_eq!((e.alpha, e.beta), (rat(7, 20), rat(7, 20)));
        assert_eq!(e.epsilon, rat(1, 10));

        let e = derive_exponents(&params(rat(9, 10), int(12), int(2), rat(20, 19))).unwrap();
        assert_eq!(e.a, rat(2, 15));
        assert_eq!(e.alpha, rat(28, 57));
        assert_eq!(e.alpha + e.beta, rat(56, 57));
        assert_eq!(e.epsilon, rat(1, 60));
    }

    #[test]
    fn custom_exponents_and_rejection() {
        let bp = params(rat(4, 3), rat(5, 2), int(3), int(3));
        let e = derive_exponents_with(&bp, rat(1, 4)).unwrap();
        assert_eq!(e.a + e.b, int(2) / bp.p + int(1) - bp.s);
        assert!(matches!(
            derive_exponents_with(&bp, int(1)),
            Err(Error::InadmissibleParams(_))
        ));
        let bad = params(rat(5, 2), int(3), int(4), int(3));
        assert!(matches!(
            derive_exponents(&bad),
            Err(Error::InadmissibleParams(_))
        ));
    }

    #[test]
    fn max_formula_examples() {
        let m = appendix_a_max(int(12), rat(20, 19));
        assert_eq!(m.branch, MaxBranch::LargePSmallR);
        assert_eq!(m.value, rat(-5, 6));
        assert_eq!(appendix_a_max(int(2), int(7)).value, int(0));
        let m = appendix_a_max(int(4), int(4));
        assert_eq!(m.branch, MaxBranch::LargePLargeR);
        assert_eq!(m.value, int(0));
        assert_eq!(m.value, m.direct);
    }

    #[test]
    fn infimum_scans() {
        let low = appendix_a_infimum(int(1), 12);
        assert!(low.infimum <= rat(-99, 100));
        assert!(low.infimum > int(-1));
        let (p, r, _) = *low.witnesses.last().unwrap();
        assert!(p > int(1000) && r < rat(11, 10));

        let high = appendix_a_infimum(int(2), 12);
        assert!(high.infimum <= rat(-49, 100));
        assert!(high.infimum > rat(-1, 2));
    }

    #[test]
    fn region_examples() {
        assert!(scan_region(rat(5, 2), 6).is_empty());
        assert!(scan_region(int(-2), 6).is_empty());
        let inside = classify_point(rat(4, 3), rat(4, 5), rat(2, 3));
        assert!(inside.local && inside.global);
        assert!(!scan_region(rat(4, 3), 6).is_empty());
    }

    #[test]
    fn example_rows_reproduce() {
        let results = reproduce_examples().unwrap();
        assert_eq!(results.len(), 7);
        for r in &results {
            assert!(r.matches);
        }
        let boundary: Vec<_> = results
            .iter()
            .filter(|r| r.report.verdict() == Verdict::Boundary)
            .collect();
        assert_eq!(boundary.len(), 1);
        assert_eq!(boundary[0].row.p, rat(40, 3));
    }
}

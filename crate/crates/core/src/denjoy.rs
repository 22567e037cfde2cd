//! Gap lengths, the truncated Cantor-set combinatorics, and the semi-conjugacy
//! to the rigid rotation.
//!
//! Gaps `I_k`, `|k| <= N`, are laid out on the circle in the circular order of
//! `{k alpha}`. The unstored mass (the tail `|k| > N`) is spread over the arcs
//! between consecutive stored gaps in proportion to the rotation distance
//! between their rotation positions, so that rotation by `alpha` carries those
//! arcs onto each other with length ratio 1.

use crate::bump::BumpSpec;
use crate::circle::{forward_arc, rotation_order, rotation_position, CirclePoint};
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, CompensatedSum};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `a_C / ((|k|+C) (log(|k|+C))^(1+delta))`
    PaperLog,
    /// `a_C / (|k|+C)^2`
    Quadratic,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::PaperLog => "paper_log",
            FamilyKind::Quadratic => "quadratic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthFamily {
    pub kind: FamilyKind,
    #[serde(rename = "C")]
    pub offset: f64,
    pub delta: f64,
}

impl LengthFamily {
    pub fn quadratic(offset: f64) -> Self {
        Self { kind: FamilyKind::Quadratic, offset, delta: 1.0 }
    }

    pub fn paper_log(offset: f64, delta: f64) -> Self {
        Self { kind: FamilyKind::PaperLog, offset, delta }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        // the log family needs log(C) > 0; the quadratic one only positivity
        let min_offset = match self.kind {
            FamilyKind::PaperLog => 1.0,
            FamilyKind::Quadratic => 0.0,
        };
        if !(self.offset.is_finite() && self.offset > min_offset) {
            errs.push(format!("C = {} must be a finite real > {min_offset}", self.offset));
        }
        if self.kind == FamilyKind::PaperLog && !(self.delta.is_finite() && self.delta > 0.0) {
            errs.push(format!("delta = {} must be a finite real > 0", self.delta));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    /// Length before normalization.
    pub fn unnormalized(&self, k: i64) -> f64 {
        let x = k.unsigned_abs() as f64 + self.offset;
        match self.kind {
            FamilyKind::Quadratic => 1.0 / (x * x),
            FamilyKind::PaperLog => 1.0 / (x * x.ln().powf(1.0 + self.delta)),
        }
    }

    /// `2 int_{n}^{inf}` of the unnormalized density, an upper bound for the
    /// unnormalized mass of `|k| > n`.
    pub fn tail_majorant(&self, n: i64) -> f64 {
        let x = n as f64 + self.offset;
        match self.kind {
            FamilyKind::Quadratic => 2.0 / x,
            FamilyKind::PaperLog => 2.0 / (self.delta * x.ln().powf(self.delta)),
        }
    }
}

pub fn length(k: i64, family: &LengthFamily, a_c: f64) -> f64 {
    a_c * family.unnormalized(k)
}

/// `a_C` such that the stored lengths plus the analytic tail majorant sum to 1.
pub fn normalize(family: &LengthFamily, n_sum: i64) -> f64 {
    let n_sum = n_sum.max(0);
    // smallest terms first
    let mut acc = CompensatedSum::new();
    for j in (1..=n_sum).rev() {
        acc.add(2.0 * family.unnormalized(j));
    }
    acc.add(family.unnormalized(0));
    acc.add(family.tail_majorant(n_sum));
    1.0 / acc.value()
}

/// Largest `|l(k+1)/l(k) - 1| * eta_max` over `k in [-radius, radius - 1]`, with its index.
pub fn twist_gate(family: &LengthFamily, radius: i64, eta_max: f64) -> (f64, i64, f64) {
    let mut worst = (0.0, 0, 1.0);
    for k in -radius..radius {
        let ratio = family.unnormalized(k + 1) / family.unnormalized(k);
        let v = (ratio - 1.0).abs() * eta_max;
        if v > worst.0 {
            worst = (v, k, ratio);
        }
    }
    worst
}

/// One stored gap `I_k = [a, a + len)` at circular rank `rank`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub k: i64,
    pub rank: usize,
    #[serde(rename = "a")]
    pub start: f64,
    pub len: f64,
}

impl Gap {
    pub fn end(&self) -> f64 {
        self.start + self.len
    }
}

/// Result of [`GapTable::locate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Hit {
    /// `x = a_k + u` with `0 <= u < len_k`.
    Gap { k: i64, u: f64 },
    /// `x` lies in the residual arc after the gap of rank `left_rank`, at relative position `s`.
    Residual { left_rank: usize, s: f64 },
}

/// Linear correspondence between a source arc and a target arc.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ArcMap {
    pub src_len: f64,
    pub dst_start: f64,
    pub dst_len: f64,
    pub offset: f64,
}

impl ArcMap {
    pub fn slope(&self) -> f64 {
        self.dst_len / self.src_len
    }

    pub fn image(&self) -> CirclePoint {
        CirclePoint::from_finite(self.dst_start + self.offset * self.slope())
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Piece {
    Gap { k: i64, u: f64 },
    Arc(ArcMap),
}

#[derive(Clone, Debug)]
pub struct GapTable {
    alpha: f64,
    family: LengthFamily,
    radius: i64,
    a_c: f64,
    tail_bound: f64,
    gaps: Vec<Gap>,
    rank_of: Vec<usize>,
    rot_pos: Vec<f64>,
    residuals: Vec<f64>,
}

impl GapTable {
    /// Lays out the gaps `|k| <= radius` on the circle.
    pub fn build(alpha: f64, family: LengthFamily, radius: i64, bump: &BumpSpec) -> Result<Self> {
        family.validate()?;
        if !alpha.is_finite() {
            return Err(Error::NonFinite(alpha));
        }
        if radius < 8 {
            return Err(Error::Config(vec![format!("N = {radius} must be >= 8")]));
        }
        let (gate, k, ratio) = twist_gate(&family, radius, bump.eta_max());
        if gate >= 1.0 {
            return Err(Error::GateViolation { value: gate, k, ratio, eta_max: bump.eta_max() });
        }
        let order = rotation_order(alpha, radius)?;
        let a_c = normalize(&family, radius);
        let tail_bound = a_c * family.tail_majorant(radius);

        let lens: Vec<f64> = order.iter().map(|&k| length(k, &family, a_c)).collect();
        let stored = compensated_sum(lens.iter().copied());
        let unstored = (1.0 - stored).max(0.0);
        let pos: Vec<f64> = order.iter().map(|&k| rotation_position(alpha, k)).collect();

        let mut gaps = Vec::with_capacity(order.len());
        let mut cursor = CompensatedSum::new();
        for (rank, (&k, &len)) in order.iter().zip(lens.iter()).enumerate() {
            let start = cursor.value();
            gaps.push(Gap { k, rank, start, len });
            let next_pos = pos.get(rank + 1).copied().unwrap_or(1.0);
            cursor.add(len);
            cursor.add(unstored * (next_pos - pos[rank]));
        }
        Self::from_parts(alpha, family, radius, a_c, tail_bound, gaps)
    }

    /// Reassembles a table from stored gaps (sorted by rank), validating the layout.
    pub fn from_parts(
        alpha: f64,
        family: LengthFamily,
        radius: i64,
        a_c: f64,
        tail_bound: f64,
        gaps: Vec<Gap>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidBuild(msg));
        let m = (2 * radius + 1) as usize;
        if radius < 1 || gaps.len() != m {
            return bad(format!("expected {m} gaps, found {}", gaps.len()));
        }
        let order = rotation_order(alpha, radius)?;
        let mut rank_of = vec![usize::MAX; m];
        for (i, (g, &k)) in gaps.iter().zip(order.iter()).enumerate() {
            if g.rank != i || g.k != k {
                return bad(format!("gap at rank {i} is k = {} but rotation order gives k = {k}", g.k));
            }
            if !(g.len > 0.0 && g.len.is_finite() && (0.0..1.0).contains(&g.start)) {
                return bad(format!("gap k = {} has invalid start {} or length {}", g.k, g.start, g.len));
            }
            rank_of[(k + radius) as usize] = i;
        }
        if gaps[0].k != 0 || gaps[0].start != 0.0 {
            return bad("gap I_0 must start at 0".into());
        }
        let mut residuals = Vec::with_capacity(m);
        for i in 0..m {
            let next = if i + 1 == m { 1.0 } else { gaps[i + 1].start };
            let r = next - gaps[i].end();
            if r <= 0.0 {
                return bad(format!("gaps at ranks {i} and {} overlap", (i + 1) % m));
            }
            residuals.push(r);
        }
        let rot_pos = gaps.iter().map(|g| rotation_position(alpha, g.k)).collect();
        let table = Self { alpha, family, radius, a_c, tail_bound, gaps, rank_of, rot_pos, residuals };
        table.check_shift_consistency()?;
        Ok(table)
    }

    // Consecutive source gaps must map to consecutive target gaps under k -> k + 1.
    fn check_shift_consistency(&self) -> Result<()> {
        let n = self.radius;
        let m = self.gaps.len();
        let next_skipping = |r: usize, skip: i64| {
            let mut j = (r + 1) % m;
            if self.gaps[j].k == skip {
                j = (j + 1) % m;
            }
            j
        };
        for g in &self.gaps {
            if g.k == n {
                continue;
            }
            let right = &self.gaps[next_skipping(g.rank, n)];
            let tl = self.rank(g.k + 1);
            if self.gaps[next_skipping(tl, -n)].k != right.k + 1 {
                return Err(Error::InvalidBuild(format!(
                    "rotation by alpha does not preserve the order of gaps {} and {}",
                    g.k, right.k
                )));
            }
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn family(&self) -> &LengthFamily {
        &self.family
    }

    /// Truncation radius `N`.
    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn a_c(&self) -> f64 {
        self.a_c
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Stored gaps sorted by circular rank.
    pub fn gaps(&self) -> &[Gap] {
        &self.gaps
    }

    /// Residual arc lengths, indexed by the rank of the gap preceding the arc.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn contains(&self, k: i64) -> bool {
        k.abs() <= self.radius
    }

    pub fn rank(&self, k: i64) -> usize {
        self.rank_of[(k + self.radius) as usize]
    }

    pub fn gap(&self, k: i64) -> &Gap {
        &self.gaps[self.rank(k)]
    }

    pub fn len(&self, k: i64) -> f64 {
        self.gap(k).len
    }

    pub fn start(&self, k: i64) -> f64 {
        self.gap(k).start
    }

    /// Circle coordinate of the point `u` (local coordinate) of gap `k`.
    pub fn point(&self, k: i64, u: f64) -> CirclePoint {
        CirclePoint::from_finite(self.start(k) + u)
    }

    pub fn stored_mass(&self) -> f64 {
        compensated_sum(self.gaps.iter().map(|g| g.len))
    }

    pub fn residual_mass(&self) -> f64 {
        compensated_sum(self.residuals.iter().copied())
    }

    /// Rotation position `{k alpha}` of the gap at `rank`.
    pub fn rotation_position_at(&self, rank: usize) -> f64 {
        self.rot_pos[rank]
    }

    fn rank_at(&self, x: f64) -> usize {
        self.gaps.partition_point(|g| g.start <= x).saturating_sub(1)
    }

    pub fn locate(&self, x: CirclePoint) -> Hit {
        let x = x.value();
        let i = self.rank_at(x);
        let g = &self.gaps[i];
        let u = x - g.start;
        if u < g.len {
            Hit::Gap { k: g.k, u }
        } else {
            Hit::Residual { left_rank: i, s: ((u - g.len) / self.residuals[i]).clamp(0.0, 1.0) }
        }
    }

    /// The semi-conjugacy `j`: collapses `I_k` to `{k alpha}` and interpolates on residual arcs.
    pub fn semiconjugacy(&self, x: CirclePoint) -> CirclePoint {
        match self.locate(x) {
            Hit::Gap { k, .. } => CirclePoint::from_finite(rotation_position(self.alpha, k)),
            Hit::Residual { left_rank, s } => {
                let p0 = self.rot_pos[left_rank];
                let p1 = self.rot_pos.get(left_rank + 1).copied().unwrap_or(1.0);
                CirclePoint::from_finite(p0 + s * (p1 - p0))
            }
        }
    }

    fn next_rank(&self, r: usize) -> usize {
        (r + 1) % self.gaps.len()
    }

    fn prev_rank(&self, r: usize) -> usize {
        (r + self.gaps.len() - 1) % self.gaps.len()
    }

    /// Piece of the circle partition used by a map sending `I_k` to `I_{k+shift}`.
    /// Gap `excluded` (whose image is unstored) is absorbed into the linear arc map.
    fn piece(&self, x: CirclePoint, excluded: i64, shift: i64) -> Piece {
        let x = x.value();
        let i = self.rank_at(x);
        let g = &self.gaps[i];
        let u = x - g.start;
        if u < g.len && g.k != excluded {
            return Piece::Gap { k: g.k, u };
        }
        let left = if g.k == excluded { self.prev_rank(i) } else { i };
        let mut right = self.next_rank(i);
        if self.gaps[right].k == excluded {
            right = self.next_rank(right);
        }
        let (gl, gr) = (&self.gaps[left], &self.gaps[right]);
        let src_start = gl.end();
        let dst_start = self.gap(gl.k + shift).end();
        Piece::Arc(ArcMap {
            src_len: forward_arc(src_start, gr.start),
            dst_start,
            dst_len: forward_arc(dst_start, self.start(gr.k + shift)),
            offset: forward_arc(src_start, x),
        })
    }

    /// Partition piece for maps `I_k -> I_{k+1}`; `I_N` is handled linearly.
    pub(crate) fn forward_piece(&self, x: CirclePoint) -> Piece {
        self.piece(x, self.radius, 1)
    }

    /// Partition piece for inverse maps `I_k -> I_{k-1}`; `I_{-N}` is handled linearly.
    pub(crate) fn inverse_piece(&self, y: CirclePoint) -> Piece {
        self.piece(y, -self.radius, -1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::wrap;

    fn golden() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    fn small_table(n: i64) -> GapTable {
        GapTable::build(golden(), LengthFamily::quadratic(100.0), n, &BumpSpec::new(3).unwrap()).unwrap()
    }

    #[test]
    fn length_examples() {
        let q = LengthFamily::quadratic(100.0);
        assert_eq!(length(0, &q, 1.0), 1e-4);
        let l = LengthFamily::paper_log(100.0, 1.0);
        let expect = 1.0 / (100.0 * 100f64.ln().powi(2));
        assert!((length(0, &l, 1.0) - expect).abs() < 1e-18);
        assert!((expect - 4.715e-4).abs() < 1e-6);
        for k in 0..50 {
            assert_eq!(length(k, &l, 3.0), length(-k, &l, 3.0));
            assert_eq!(length(k, &q, 3.0), length(-k, &q, 3.0));
        }
    }

    #[test]
    fn normalized_partial_sum_stays_below_one() {
        for fam in [LengthFamily::quadratic(100.0), LengthFamily::paper_log(100.0, 1.0)] {
            let a = normalize(&fam, 1000);
            let s: f64 = (-1000..=1000).map(|k| length(k, &fam, a)).sum();
            assert!(s <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn table_invariants_small() {
        let t = small_table(50);
        assert_eq!(t.start(0), 0.0);
        let order = rotation_order(golden(), 50).unwrap();
        let ks: Vec<i64> = t.gaps().iter().map(|g| g.k).collect();
        assert_eq!(ks, order);
        assert!((t.stored_mass() + t.residual_mass() - 1.0).abs() < 1e-12);
        assert!(t.residual_mass() <= t.tail_bound() + 1e-12);
        for g in t.gaps() {
            assert_eq!(t.len(g.k), g.len);
            assert!((g.end() - g.start - g.len).abs() <= f64::EPSILON);
        }
    }

    #[test]
    fn two_gap_layout_for_radius_one() {
        // Radius 1 is below the build minimum; lay it out by hand through from_parts.
        let alpha = golden();
        let fam = LengthFamily::quadratic(100.0);
        let a_c = normalize(&fam, 1);
        let order = rotation_order(alpha, 1).unwrap();
        assert_eq!(order, vec![0, -1, 1]);
        let mut start = 0.0;
        let mut gaps = vec![];
        for (rank, &k) in order.iter().enumerate() {
            let len = length(k, &fam, a_c);
            gaps.push(Gap { k, rank, start, len });
            start += len + 0.1;
        }
        let t = GapTable::from_parts(alpha, fam, 1, a_c, 0.0, gaps).unwrap();
        assert_eq!(t.residuals().len(), 3);
        assert!(t.rank(0) < t.rank(1));
    }

    #[test]
    fn locate_examples() {
        let t = small_table(40);
        for g in t.gaps() {
            assert_eq!(t.locate(wrap(g.start).unwrap()), Hit::Gap { k: g.k, u: 0.0 });
            match t.locate(wrap(g.start + g.len / 2.0).unwrap()) {
                Hit::Gap { k, u } => {
                    assert_eq!(k, g.k);
                    assert!((u - g.len / 2.0).abs() < 1e-16);
                }
                other => panic!("{other:?}"),
            }
            let mid = g.end() + t.residuals()[g.rank] / 2.0;
            match t.locate(wrap(mid).unwrap()) {
                Hit::Residual { left_rank, s } => {
                    assert_eq!(left_rank, g.rank);
                    assert!((s - 0.5).abs() < 1e-9);
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn semiconjugacy_examples() {
        let t = small_table(40);
        assert_eq!(t.semiconjugacy(t.point(0, t.len(0) * 0.3)).value(), 0.0);
        let j5 = t.semiconjugacy(t.point(5, t.len(5) * 0.7)).value();
        assert!((j5 - wrap(5.0 * golden()).unwrap().value()).abs() < 1e-15);
    }

    #[test]
    fn gate_rejects_small_offset() {
        let err = GapTable::build(golden(), LengthFamily::quadratic(1.0), 20, &BumpSpec::new(3).unwrap());
        assert!(matches!(err, Err(Error::GateViolation { .. })));
        let err = GapTable::build(golden(), LengthFamily::quadratic(1.5), 20, &BumpSpec::new(3).unwrap());
        assert!(matches!(err, Err(Error::GateViolation { .. })));
    }

    #[test]
    fn rational_alpha_rejected_by_build() {
        let err = GapTable::build(0.5, LengthFamily::quadratic(100.0), 20, &BumpSpec::new(3).unwrap());
        assert!(matches!(err, Err(Error::DuplicatePositions { .. })));
    }
}

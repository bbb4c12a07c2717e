use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;
use crate::spectra::IndexBase;

/// Which index a check is parameterized by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    /// Yang-type: the top eigenvalue is `Λ_{k+1}`.
    K,
    /// Sum-type: a window above `Λ_j`.
    J,
    None,
}

/// Stable identifiers of every implemented inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckId {
    Ppw,
    HileProtter,
    YangFirst,
    YangSecond,
    AshbaughBenguria,
    AshbaughBenguriaRefined,
    LevitinParnovski,
    ChenChengYang,
    ChenChengSum,
    ChengQi,
    BallRatio,
    DriftYang,
    DriftYangShifted,
    DriftSum,
    DriftSumShifted,
    MomentYang,
    MomentYangShifted,
    MomentSum,
    MomentSumShifted,
    SolitonYang,
    SolitonYangShifted,
    SolitonSum,
    SolitonSumShifted,
    RecursionStep,
    RecursionBound,
    SolitonGrowth,
    SolitonGap,
    SolitonGapShifted,
    MinimalYang,
    MinimalSum,
    SphereYang,
    SphereSum,
    UnitSphereYang,
    UnitSphereSum,
    ProjectiveYang,
    ProjectiveSum,
    UnitGradient,
    Eigenmap,
    ClosedSum,
    ClosedSumShifted,
    ClosedMomentSum,
    ClosedMomentSumShifted,
    Reilly,
    MinimalSphereSum,
    MinimalSphereSumShifted,
    ClosedYang,
    ClosedYangShifted,
    ClosedMomentYang,
    ClosedMomentYangShifted,
    MinimalSphereYang,
    MinimalSphereYangShifted,
    Isoparametric,
    Focal,
    FocalS5,
    FocalS15,
    SecondGap,
}

/// Catalog entry shown by `list-checks`.
#[derive(Debug, Clone, Serialize)]
pub struct CheckInfo {
    pub id: &'static str,
    pub description: &'static str,
    pub index: IndexKind,
    pub index_base: &'static str,
    pub requires: &'static [&'static str],
}

const D: IndexBase = IndexBase::DirichletFromOne;
const C: IndexBase = IndexBase::ClosedFromZero;

#[rustfmt::skip]
const TABLE: &[(CheckId, &str, &str, IndexKind, IndexBase, &[&str])] = {
    use CheckId::*;
    use IndexKind::{J, K};
    &[
        (Ppw, "ppw", "gap Λ_{k+1}−Λ_k ≤ (4/(nk))ΣΛ_i", K, D, &["n"]),
        (HileProtter, "hp", "Σ Λ_i/(Λ_{k+1}−Λ_i) ≥ nk/4", K, D, &["n"]),
        (YangFirst, "yang1", "Σ(Λ_{k+1}−Λ_i)² ≤ (4/n)Σ(Λ_{k+1}−Λ_i)Λ_i", K, D, &["n"]),
        (YangSecond, "yang2", "Λ_{k+1} ≤ (1+4/n)(1/k)ΣΛ_i", K, D, &["n"]),
        (AshbaughBenguria, "ab", "(Λ_2+…+Λ_{n+1})/Λ_1 ≤ n+4", IndexKind::None, D, &["n"]),
        (AshbaughBenguriaRefined, "ab-refined", "(Λ_2+…+Λ_{n+1})/Λ_1 ≤ n+3+Λ_1/Λ_2", IndexKind::None, D, &["n"]),
        (LevitinParnovski, "lp", "Σ_{l=1}^{n} Λ_{j+l}/Λ_j ≤ n+4", J, D, &["n"]),
        (ChenChengYang, "chen-cheng1", "Yang form with Λ_i + C₁/4 on a submanifold", K, D, &["n", "c1"]),
        (ChenChengSum, "chen-cheng2", "shifted ratio (λ_2+…+λ_{n+1})/λ_1 ≤ n+4, λ_i = Λ_i + C₁/4", IndexKind::None, D, &["n", "c1"]),
        (ChengQi, "cheng-qi", "Λ_2/Λ_1 < 2−Λ_1/Λ_j or (Λ_2+…+Λ_{n+1})/Λ_1 ≤ n+3+Λ_1/Λ_j, 1 ≤ j ≤ n+2", J, D, &["n"]),
        (BallRatio, "ppw-ball", "Λ_2/Λ_1 ≤ the same ratio for a ball (n ≤ 3)", IndexKind::None, D, &["n"]),
        (DriftYang, "thm1.1a", "drift Yang form with Λ_i + D₁√Λ_i + D₁²/4 + C₁/4", K, D, &["n", "c1", "d1"]),
        (DriftYangShifted, "thm1.1b", "drift Yang form, (6/n)(Λ_i + D₁²/2 + C₁/6)", K, D, &["n", "c1", "d1"]),
        (DriftSum, "thm1.2a", "Σ_{l=1}^{n} Λ_{j+l} ≤ (4+n)Λ_j + 4D₁√Λ_j + D₁² + C₁", J, D, &["n", "c1", "d1"]),
        (DriftSumShifted, "thm1.2b", "Σ_{l=1}^{n} Λ_{j+l} ≤ (6+n)Λ_j + 3D₁² + C₁", J, D, &["n", "c1", "d1"]),
        (MomentYang, "cor3.1a", "drift Yang form with eigenfunction moments", K, D, &["n", "moments"]),
        (MomentYangShifted, "cor3.1b", "shifted drift Yang form with eigenfunction moments", K, D, &["n", "moments"]),
        (MomentSum, "cor3.3a", "window sum with eigenfunction moments", J, D, &["n", "moments"]),
        (MomentSumShifted, "cor3.3b", "shifted window sum with eigenfunction moments", J, D, &["n", "moments"]),
        (SolitonYang, "thm5.1a", "soliton Yang form with Λ_i + √Λ_i + n²/4", K, D, &["n"]),
        (SolitonYangShifted, "thm5.1b", "soliton Yang form, (6/n)(Λ_i + n²/6)", K, D, &["n"]),
        (SolitonSum, "thm5.2a", "soliton window sum ≤ (n+4)Λ_j + n² + 4√Λ_j", J, D, &["n"]),
        (SolitonSumShifted, "thm5.2b", "soliton window sum ≤ (n+6)Λ_j + n²", J, D, &["n"]),
        (RecursionStep, "thm5.6", "F_{k+1} ≤ C(f,k)((k+1)/k)^{4/f} F_k", K, D, &["n"]),
        (RecursionBound, "prop5.6", "Λ_{k+1} ≤ (1+4/f)k^{2/f}Λ_1", K, D, &["n"]),
        (SolitonGrowth, "cor5.7", "Λ_{k+1}+n²/6 ≤ (1+6/n)(Λ_1+n²/6)k^{3/n}", K, D, &["n"]),
        (SolitonGap, "cor5.10a", "consecutive gap from the √Λ soliton form", K, D, &["n"]),
        (SolitonGapShifted, "cor5.10b", "consecutive gap from the shifted soliton form", K, D, &["n"]),
        (MinimalYang, "cor6.1a", "minimal in Euclidean space, Yang form with D = max|ν^⊤|", K, D, &["n", "d1"]),
        (MinimalSum, "cor6.1b", "minimal in Euclidean space, Σ(Λ_{j+l}−Λ_j) ≤ 4Λ_j + 4D√Λ_j + D²", J, D, &["n", "d1"]),
        (SphereYang, "cor6.2a", "in a unit sphere, C = n²(max|H̄|²+1)", K, D, &["n", "d1", "sphere_mean_curvature_sq"]),
        (SphereSum, "cor6.2b", "in a unit sphere, difference window sum", J, D, &["n", "d1", "sphere_mean_curvature_sq"]),
        (UnitSphereYang, "cor6.3a", "minimal in a unit sphere, C = n²", K, D, &["n", "d1"]),
        (UnitSphereSum, "cor6.3b", "minimal in a unit sphere, difference window sum", J, D, &["n", "d1"]),
        (ProjectiveYang, "cor6.5a", "in a projective space, C = max(n²|Ĥ|² + 2n(n+d_F))", K, D, &["n", "d1", "d_f", "projective_mean_curvature_sq"]),
        (ProjectiveSum, "cor6.5b", "in a projective space, difference window sum", J, D, &["n", "d1", "d_f", "projective_mean_curvature_sq"]),
        (UnitGradient, "thm4.1-1", "Yang form from a function with |∇W| = 1, |ΔW| ≤ C₃", K, D, &["n", "d1", "c3"]),
        (Eigenmap, "thm4.1-2", "Yang form from an eigenmap into a sphere with eigenvalue η", K, D, &["n", "d1", "eta"]),
        (ClosedSum, "thm7.1a", "closed window sum ≤ (n+4)Λ̄_j + 4D√Λ̄_j + D² + C₁", J, C, &["n", "c1", "d1"]),
        (ClosedSumShifted, "thm7.1b", "closed window sum ≤ (n+6)Λ̄_j + 3D² + C₁", J, C, &["n", "c1", "d1"]),
        (ClosedMomentSum, "cor7.2a", "closed window sum with eigenfunction moments", J, C, &["n", "moments"]),
        (ClosedMomentSumShifted, "cor7.2b", "shifted closed window sum with eigenfunction moments", J, C, &["n", "moments"]),
        (Reilly, "cor7.4", "Σ_{k=1}^{n} Λ̄_k ≤ ∫(n²H²+3|ν^⊤|²)e^w / ∫e^w", IndexKind::None, C, &["n", "reilly_ratio"]),
        (MinimalSphereSum, "thm7.6a", "closed minimal in a unit sphere, C = n²", J, C, &["n", "d1"]),
        (MinimalSphereSumShifted, "thm7.6b", "closed minimal in a unit sphere, shifted form", J, C, &["n", "d1"]),
        (ClosedYang, "thm7.16a", "closed Yang form over i = 0..k", K, C, &["n", "c1", "d1"]),
        (ClosedYangShifted, "thm7.16b", "closed shifted Yang form over i = 0..k", K, C, &["n", "c1", "d1"]),
        (ClosedMomentYang, "cor7.17a", "closed Yang form with eigenfunction moments", K, C, &["n", "moments"]),
        (ClosedMomentYangShifted, "cor7.17b", "closed shifted Yang form with eigenfunction moments", K, C, &["n", "moments"]),
        (MinimalSphereYang, "thm7.18a", "closed minimal in a unit sphere, Yang form", K, C, &["n", "d1"]),
        (MinimalSphereYangShifted, "thm7.18b", "closed minimal in a unit sphere, shifted Yang form", K, C, &["n", "d1"]),
        (Isoparametric, "thm7.7", "(1/n)Σ_{k=1}^{n} Λ̄_{n₀+k} ≤ 2n+4", IndexKind::None, C, &["n", "n0"]),
        (Focal, "thm6.21", "focal submanifold mean above the first cluster ≤ 2(n+m₂+2)", IndexKind::None, C, &["m1", "m2"]),
        (FocalS5, "fkm-s5", "focal (1,1): Σ_{k=1}^{3} Λ̄_{6+k} ≤ 30", IndexKind::None, C, &[]),
        (FocalS15, "fkm-s15", "focal (4,3): Σ_{k=1}^{10} Λ̄_{16+k} ≤ 240", IndexKind::None, C, &[]),
        (SecondGap, "conj7.3", "second distinct closed eigenvalue against the window [2n, 2n+2]", IndexKind::None, C, &["n"]),
    ]
};

impl CheckId {
    fn row(
        self,
    ) -> &'static (
        CheckId,
        &'static str,
        &'static str,
        IndexKind,
        IndexBase,
        &'static [&'static str],
    ) {
        TABLE.iter().find(|r| r.0 == self).expect("every id has a catalog row")
    }

    pub fn as_str(self) -> &'static str {
        self.row().1
    }

    pub fn index_kind(self) -> IndexKind {
        self.row().3
    }

    pub fn index_base(self) -> IndexBase {
        self.row().4
    }

    pub fn info(self) -> CheckInfo {
        let r = self.row();
        CheckInfo {
            id: r.1,
            description: r.2,
            index: r.3,
            index_base: r.4.label(),
            requires: r.5,
        }
    }

    pub fn all() -> impl Iterator<Item = CheckId> {
        TABLE.iter().map(|r| r.0)
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        TABLE
            .iter()
            .find(|r| r.1 == s)
            .map(|r| r.0)
            .ok_or_else(|| Error::UnknownCheck(s.to_string()))
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for CheckId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> serde::Deserialize<'de> for CheckId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The whole catalog in a stable order.
pub fn catalog() -> Vec<CheckInfo> {
    CheckId::all().map(CheckId::info).collect()
}

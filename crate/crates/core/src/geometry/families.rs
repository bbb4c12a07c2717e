//! Built-in immersions.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::soliton::{bowl_soliton_profile, SolitonProfile};
use super::{Immersion, ParamBox};
use crate::error::{invalid, Error, Result};

/// Flat patch `(y₁, y₂, 0)` in `ℝ³`.
#[derive(Debug, Clone)]
pub struct Plane {
    domain: ParamBox,
}

impl Plane {
    pub fn new(half_width: f64) -> Result<Self> {
        Ok(Plane {
            domain: ParamBox::cube(2, half_width)?,
        })
    }
}

impl Immersion for Plane {
    fn intrinsic_dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn domain(&self) -> &ParamBox {
        &self.domain
    }
    fn position(&self, y: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(&[y[0], y[1], 0.0])
    }
    fn jacobian(&self, _y: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0])
    }
    fn second_derivatives(&self, _y: &[f64]) -> Vec<DVector<f64>> {
        vec![DVector::zeros(3); 4]
    }
    fn name(&self) -> String {
        "plane".into()
    }
}

/// Upper unit hemisphere as the graph `z = √(1 − |y|²)` over `[−a, a]²`.
#[derive(Debug, Clone)]
pub struct SphereGraph {
    domain: ParamBox,
}

impl SphereGraph {
    pub fn new(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && 2.0 * half_width * half_width < 1.0) {
            return Err(invalid("sphere graph patch needs 0 < a < 1/√2"));
        }
        Ok(SphereGraph {
            domain: ParamBox::cube(2, half_width)?,
        })
    }

    fn height(y: &[f64]) -> f64 {
        (1.0 - y[0] * y[0] - y[1] * y[1]).sqrt()
    }
}

impl Immersion for SphereGraph {
    fn intrinsic_dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn domain(&self) -> &ParamBox {
        &self.domain
    }
    fn position(&self, y: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(&[y[0], y[1], Self::height(y)])
    }
    fn jacobian(&self, y: &[f64]) -> DMatrix<f64> {
        let z = Self::height(y);
        DMatrix::from_row_slice(2, 3, &[1.0, 0.0, -y[0] / z, 0.0, 1.0, -y[1] / z])
    }
    fn second_derivatives(&self, y: &[f64]) -> Vec<DVector<f64>> {
        let z = Self::height(y);
        let mut out = Vec::with_capacity(4);
        for i in 0..2 {
            for j in 0..2 {
                let delta = if i == j { 1.0 } else { 0.0 };
                let zz = -delta / z - y[i] * y[j] / (z * z * z);
                out.push(DVector::from_column_slice(&[0.0, 0.0, zz]));
            }
        }
        out
    }
    fn name(&self) -> String {
        "sphere_graph".into()
    }
}

/// Round cylinder `(r cos θ, r sin θ, z)`, `θ ∈ [−1, 1]`, `z ∈ [−h, h]`.
#[derive(Debug, Clone)]
pub struct Cylinder {
    radius: f64,
    domain: ParamBox,
}

impl Cylinder {
    pub fn new(radius: f64, half_height: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(invalid("cylinder radius must be positive"));
        }
        Ok(Cylinder {
            radius,
            domain: ParamBox::new(vec![-1.0, -half_height], vec![1.0, half_height])?,
        })
    }
}

impl Immersion for Cylinder {
    fn intrinsic_dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn domain(&self) -> &ParamBox {
        &self.domain
    }
    fn position(&self, y: &[f64]) -> DVector<f64> {
        let r = self.radius;
        DVector::from_column_slice(&[r * y[0].cos(), r * y[0].sin(), y[1]])
    }
    fn jacobian(&self, y: &[f64]) -> DMatrix<f64> {
        let r = self.radius;
        DMatrix::from_row_slice(2, 3, &[-r * y[0].sin(), r * y[0].cos(), 0.0, 0.0, 0.0, 1.0])
    }
    fn second_derivatives(&self, y: &[f64]) -> Vec<DVector<f64>> {
        let r = self.radius;
        vec![
            DVector::from_column_slice(&[-r * y[0].cos(), -r * y[0].sin(), 0.0]),
            DVector::zeros(3),
            DVector::zeros(3),
            DVector::zeros(3),
        ]
    }
    fn name(&self) -> String {
        format!("cylinder r={}", self.radius)
    }
}

/// Grim reaper `(s, −log cos s)`, `|s| ≤ a < π/2`; it translates with velocity `e₂`.
#[derive(Debug, Clone)]
pub struct GrimReaper {
    domain: ParamBox,
}

impl GrimReaper {
    pub fn new(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width < std::f64::consts::FRAC_PI_2) {
            return Err(invalid("grim reaper arc needs 0 < a < π/2"));
        }
        Ok(GrimReaper {
            domain: ParamBox::cube(1, half_width)?,
        })
    }
}

impl Immersion for GrimReaper {
    fn intrinsic_dim(&self) -> usize {
        1
    }
    fn ambient_dim(&self) -> usize {
        2
    }
    fn domain(&self) -> &ParamBox {
        &self.domain
    }
    fn position(&self, y: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(&[y[0], -y[0].cos().ln()])
    }
    fn jacobian(&self, y: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(1, 2, &[1.0, y[0].tan()])
    }
    fn second_derivatives(&self, y: &[f64]) -> Vec<DVector<f64>> {
        let c = y[0].cos();
        vec![DVector::from_column_slice(&[0.0, 1.0 / (c * c)])]
    }
    fn name(&self) -> String {
        "grim_reaper".into()
    }
}

/// Bowl soliton as the graph `z = f(|y|)` over `[−a, a]²`; translates with `e₃`.
#[derive(Debug, Clone)]
pub struct Bowl {
    profile: SolitonProfile,
    domain: ParamBox,
}

impl Bowl {
    pub fn new(half_width: f64, step: f64) -> Result<Self> {
        let domain = ParamBox::cube(2, half_width)?;
        let reach = half_width * std::f64::consts::SQRT_2 * 1.05 + 10.0 * step;
        Ok(Bowl {
            profile: bowl_soliton_profile(reach, step)?,
            domain,
        })
    }

    pub fn profile(&self) -> &SolitonProfile {
        &self.profile
    }

    /// `(f, f'/r, f'')` at radius `r`, with the removable singularity at 0.
    fn radial(&self, r: f64) -> (f64, f64, f64) {
        let (f, df, ddf) = self.profile.eval(r);
        let ratio = if r < 1e-6 { ddf } else { df / r };
        (f, ratio, ddf)
    }
}

impl Immersion for Bowl {
    fn intrinsic_dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn domain(&self) -> &ParamBox {
        &self.domain
    }
    fn position(&self, y: &[f64]) -> DVector<f64> {
        let r = y[0].hypot(y[1]);
        DVector::from_column_slice(&[y[0], y[1], self.radial(r).0])
    }
    fn jacobian(&self, y: &[f64]) -> DMatrix<f64> {
        let r = y[0].hypot(y[1]);
        let (_, ratio, _) = self.radial(r);
        DMatrix::from_row_slice(2, 3, &[1.0, 0.0, ratio * y[0], 0.0, 1.0, ratio * y[1]])
    }
    fn second_derivatives(&self, y: &[f64]) -> Vec<DVector<f64>> {
        let r = y[0].hypot(y[1]);
        let (_, ratio, ddf) = self.radial(r);
        let mut out = Vec::with_capacity(4);
        for i in 0..2 {
            for j in 0..2 {
                let delta = if i == j { 1.0 } else { 0.0 };
                let radial = if r < 1e-6 { 0.0 } else { y[i] * y[j] / (r * r) };
                let zz = ddf * radial + ratio * (delta - radial);
                out.push(DVector::from_column_slice(&[0.0, 0.0, zz]));
            }
        }
        out
    }
    fn name(&self) -> String {
        "bowl".into()
    }
}

/// A box in `ℝⁿ` embedded by the identity.
#[derive(Debug, Clone)]
pub struct FlatDomain {
    domain: ParamBox,
}

impl FlatDomain {
    pub fn new(domain: ParamBox) -> Self {
        FlatDomain { domain }
    }
}

impl Immersion for FlatDomain {
    fn intrinsic_dim(&self) -> usize {
        self.domain.dim()
    }
    fn ambient_dim(&self) -> usize {
        self.domain.dim()
    }
    fn domain(&self) -> &ParamBox {
        &self.domain
    }
    fn position(&self, y: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(y)
    }
    fn jacobian(&self, _y: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(self.domain.dim(), self.domain.dim())
    }
    fn second_derivatives(&self, _y: &[f64]) -> Vec<DVector<f64>> {
        let n = self.domain.dim();
        vec![DVector::zeros(n); n * n]
    }
    fn name(&self) -> String {
        format!("flat {}-box", self.domain.dim())
    }
}

/// Built-in family plus parameters, as read from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ImmersionSpec {
    Plane {
        half_width: f64,
    },
    SphereGraph {
        half_width: f64,
    },
    Cylinder {
        radius: f64,
        half_height: f64,
    },
    GrimReaper {
        half_width: f64,
    },
    Bowl {
        half_width: f64,
        #[serde(default = "default_profile_step")]
        step: f64,
    },
    Flat {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
}

fn default_profile_step() -> f64 {
    1e-3
}

impl ImmersionSpec {
    pub fn build(&self) -> Result<Box<dyn Immersion>> {
        Ok(match self {
            ImmersionSpec::Plane { half_width } => Box::new(Plane::new(*half_width)?),
            ImmersionSpec::SphereGraph { half_width } => Box::new(SphereGraph::new(*half_width)?),
            ImmersionSpec::Cylinder { radius, half_height } => Box::new(Cylinder::new(*radius, *half_height)?),
            ImmersionSpec::GrimReaper { half_width } => Box::new(GrimReaper::new(*half_width)?),
            ImmersionSpec::Bowl { half_width, step } => Box::new(Bowl::new(*half_width, *step)?),
            ImmersionSpec::Flat { lower, upper } => {
                Box::new(FlatDomain::new(ParamBox::new(lower.clone(), upper.clone())?))
            }
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("immersion config: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{fd_jacobian, fd_second_derivatives, mean_curvature_at, translator_residual, DriftField};
    use super::*;

    fn compare_derivatives(im: &dyn Immersion, y: &[f64]) {
        let fd = fd_jacobian(im, y, 1e-6);
        assert!((fd - im.jacobian(y)).amax() < 1e-8, "{} jacobian", im.name());
        let fd2 = fd_second_derivatives(im, y, 1e-5);
        for (a, b) in fd2.iter().zip(im.second_derivatives(y)) {
            assert!((a - b).amax() < 1e-6, "{} hessian", im.name());
        }
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        compare_derivatives(&SphereGraph::new(0.6).unwrap(), &[0.3, -0.2]);
        compare_derivatives(&Cylinder::new(1.5, 1.0).unwrap(), &[0.4, 0.2]);
        compare_derivatives(&GrimReaper::new(1.3).unwrap(), &[0.9]);
        compare_derivatives(&Bowl::new(1.0, 1e-3).unwrap(), &[0.5, 0.3]);
        compare_derivatives(&Plane::new(1.0).unwrap(), &[0.5, 0.3]);
    }

    #[test]
    fn solitons_translate() {
        let reaper = GrimReaper::new(1.4).unwrap();
        let e2 = DriftField::soliton(vec![0.0, 1.0]).unwrap();
        for s in [-1.3, -0.5, 0.0, 0.8, 1.39] {
            assert!(translator_residual(&reaper, &e2, &[s]).unwrap() < 1e-12);
        }
        let bowl = Bowl::new(1.5, 1e-3).unwrap();
        let e3 = DriftField::soliton(vec![0.0, 0.0, 1.0]).unwrap();
        for y in [[0.0, 0.0], [0.3, 0.1], [1.4, -1.2], [1e-8, 0.0]] {
            let r = translator_residual(&bowl, &e3, &y).unwrap();
            assert!(r < 1e-6, "{y:?}: {r}");
        }
        assert!((mean_curvature_at(&bowl, &[0.0, 0.0]).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn spec_round_trip() {
        let spec = ImmersionSpec::from_toml_str("family = \"cylinder\"\nradius = 2.0\nhalf_height = 1.0\n").unwrap();
        assert_eq!(
            spec,
            ImmersionSpec::Cylinder {
                radius: 2.0,
                half_height: 1.0
            }
        );
        let im = spec.build().unwrap();
        assert_eq!(im.ambient_dim(), 3);
        assert!(ImmersionSpec::from_toml_str("family = \"torus\"").is_err());
        let bowl = ImmersionSpec::from_toml_str("family = \"bowl\"\nhalf_width = 1.0\n").unwrap();
        assert_eq!(
            bowl,
            ImmersionSpec::Bowl {
                half_width: 1.0,
                step: 1e-3
            }
        );
    }
}

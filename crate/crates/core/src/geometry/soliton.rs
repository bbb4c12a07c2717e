//! Profiles of rotationally symmetric translating solitons.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolitonKind {
    GrimReaper,
    Bowl,
}

/// One row of a profile table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub r: f64,
    pub f: f64,
    pub df: f64,
    pub ddf: f64,
    /// Unnormalized mean curvature (sum of principal curvatures), measured from
    /// the sampled slopes.
    pub mean_curvature: f64,
}

/// Height `z = f(r)` of a soliton translating along the last ambient axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonProfile {
    pub kind: SolitonKind,
    pub step: f64,
    pub samples: Vec<ProfileSample>,
}

/// Right-hand side of the bowl ODE `f'' = (1 + f'²)(1 − f'/r)`.
fn bowl_rhs(r: f64, df: f64) -> f64 {
    if r == 0.0 {
        0.5
    } else {
        (1.0 + df * df) * (1.0 - df / r)
    }
}

/// Integrate the bowl translator `f''/(1+f'²) + f'/r = 1`, `f(0) = f'(0) = 0`,
/// by classical RK4; the first ten steps use the series `r²/4 + r⁴/128`.
pub fn bowl_soliton_profile(max_radius: f64, step: f64) -> Result<SolitonProfile> {
    if !(max_radius > 0.0 && max_radius.is_finite()) {
        return Err(invalid("profile radius must be positive"));
    }
    if !(step > 0.0) || step > 0.05 || 20.0 * step > max_radius {
        return Err(Error::IntegrationFailure(format!(
            "step {step} is too coarse for radius {max_radius} (need step ≤ 0.05 and ≤ radius/20)"
        )));
    }
    let steps = (max_radius / step).ceil() as usize;
    let mut rows: Vec<(f64, f64, f64)> = Vec::with_capacity(steps + 1);
    for i in 0..=10 {
        let r = i as f64 * step;
        let r2 = r * r;
        rows.push((r, r2 / 4.0 + r2 * r2 / 128.0, r / 2.0 + r2 * r / 32.0));
    }
    let (mut f, mut p) = (rows[10].1, rows[10].2);
    for i in 10..steps {
        let r = i as f64 * step;
        let k1 = (p, bowl_rhs(r, p));
        let k2 = (p + 0.5 * step * k1.1, bowl_rhs(r + 0.5 * step, p + 0.5 * step * k1.1));
        let k3 = (p + 0.5 * step * k2.1, bowl_rhs(r + 0.5 * step, p + 0.5 * step * k2.1));
        let k4 = (p + step * k3.1, bowl_rhs(r + step, p + step * k3.1));
        f += step / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        p += step / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        if !(f.is_finite() && p.is_finite()) {
            return Err(Error::IntegrationFailure(format!("profile blew up at r = {r}")));
        }
        rows.push(((i + 1) as f64 * step, f, p));
    }
    let samples = rows
        .iter()
        .enumerate()
        .map(|(i, &(r, f, df))| {
            let ddf_measured = slope_derivative(&rows, i, step);
            let w = (1.0 + df * df).sqrt();
            let mean_curvature = if r == 0.0 {
                2.0 * ddf_measured
            } else {
                ddf_measured / (w * w * w) + df / (r * w)
            };
            ProfileSample {
                r,
                f,
                df,
                ddf: bowl_rhs(r, df),
                mean_curvature,
            }
        })
        .collect();
    Ok(SolitonProfile {
        kind: SolitonKind::Bowl,
        step,
        samples,
    })
}

/// Second-order difference of the sampled slope; even reflection at `r = 0`.
fn slope_derivative(rows: &[(f64, f64, f64)], i: usize, step: f64) -> f64 {
    let last = rows.len() - 1;
    if i == 0 {
        // f' is odd in r.
        2.0 * rows[1].2 / (2.0 * step)
    } else if i == last {
        (3.0 * rows[i].2 - 4.0 * rows[i - 1].2 + rows[i - 2].2) / (2.0 * step)
    } else {
        (rows[i + 1].2 - rows[i - 1].2) / (2.0 * step)
    }
}

/// Grim reaper `f(r) = −log cos r` tabulated on `[0, half_width]`.
pub fn grim_reaper_profile(half_width: f64, step: f64) -> Result<SolitonProfile> {
    if !(half_width > 0.0 && half_width < std::f64::consts::FRAC_PI_2) {
        return Err(invalid("grim reaper profile needs 0 < a < π/2"));
    }
    if !(step > 0.0 && step < half_width) {
        return Err(invalid("profile step must lie in (0, a)"));
    }
    let count = (half_width / step).floor() as usize;
    let samples = (0..=count)
        .map(|i| {
            let r = i as f64 * step;
            let c = r.cos();
            let df = r.tan();
            let ddf = 1.0 / (c * c);
            let w = (1.0 + df * df).sqrt();
            ProfileSample {
                r,
                f: -c.ln(),
                df,
                ddf,
                mean_curvature: ddf / (w * w * w),
            }
        })
        .collect();
    Ok(SolitonProfile {
        kind: SolitonKind::GrimReaper,
        step,
        samples,
    })
}

impl SolitonProfile {
    /// Ambient axis along which the soliton translates, counted from 0.
    pub fn translation_axis(&self) -> usize {
        match self.kind {
            SolitonKind::GrimReaper => 1,
            SolitonKind::Bowl => 2,
        }
    }

    pub fn max_radius(&self) -> f64 {
        self.samples.last().map(|s| s.r).unwrap_or(0.0)
    }

    /// `(f, f', f'')` at `r` by cubic Hermite interpolation of `f` and `f'`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        let last = self.samples.len() - 2;
        let i = ((r / self.step).floor().max(0.0) as usize).min(last);
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        let h = b.r - a.r;
        let t = (r - a.r) / h;
        let (h00, h10, h01, h11) = (
            2.0 * t * t * t - 3.0 * t * t + 1.0,
            t * t * t - 2.0 * t * t + t,
            -2.0 * t * t * t + 3.0 * t * t,
            t * t * t - t * t,
        );
        let f = h00 * a.f + h10 * h * a.df + h01 * b.f + h11 * h * b.df;
        let df = h00 * a.df + h10 * h * a.ddf + h01 * b.df + h11 * h * b.ddf;
        let ddf = match self.kind {
            SolitonKind::Bowl => bowl_rhs(if r < 1e-12 { 0.0 } else { r }, df),
            SolitonKind::GrimReaper => 1.0 / (r.cos() * r.cos()),
        };
        (f, df, ddf)
    }

    /// Largest `|H − ⟨ν₀, N⟩|` over the samples, with `⟨ν₀, N⟩ = 1/√(1+f'²)`.
    pub fn max_translator_residual(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.mean_curvature - 1.0 / (1.0 + s.df * s.df).sqrt()).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with columns `r,f,df,H`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Parse(format!("CSV: {e}"));
        w.write_record(["r", "f", "df", "H"]).map_err(err)?;
        for s in &self.samples {
            w.write_record([
                format!("{:.12e}", s.r),
                format!("{:.12e}", s.f),
                format!("{:.12e}", s.df),
                format!("{:.12e}", s.mean_curvature),
            ])
            .map_err(err)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bowl_starts_as_paraboloid() {
        let p = bowl_soliton_profile(2.0, 1e-3).unwrap();
        for r in [0.01, 0.05, 0.1] {
            let (f, _, _) = p.eval(r);
            assert!((f - r * r / 4.0).abs() < 0.01 * r * r, "r={r}");
        }
        assert!(p.max_translator_residual() < 1e-6, "{}", p.max_translator_residual());
        assert!(p.samples.windows(2).all(|w| w[1].df > w[0].df));
    }

    #[test]
    fn bowl_refinement_is_consistent() {
        let coarse = bowl_soliton_profile(3.0, 4e-3).unwrap();
        let fine = bowl_soliton_profile(3.0, 1e-3).unwrap();
        for r in [0.5, 1.5, 2.9] {
            assert!((coarse.eval(r).0 - fine.eval(r).0).abs() < 1e-8);
        }
    }

    #[test]
    fn coarse_step_is_rejected() {
        assert!(matches!(
            bowl_soliton_profile(1.0, 0.2),
            Err(Error::IntegrationFailure(_))
        ));
        assert!(matches!(
            bowl_soliton_profile(0.1, 0.01),
            Err(Error::IntegrationFailure(_))
        ));
    }

    #[test]
    fn grim_reaper_satisfies_curve_translator() {
        let p = grim_reaper_profile(1.4, 1e-2).unwrap();
        for s in &p.samples {
            assert!((s.ddf - (1.0 + s.df * s.df)).abs() < 1e-10 * s.ddf);
        }
        assert!(p.max_translator_residual() < 1e-10);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let p = grim_reaper_profile(1.0, 0.25).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("r,f,df,H\n"));
        assert_eq!(text.lines().count(), p.samples.len() + 1);
    }
}

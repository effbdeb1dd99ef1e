use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{real_eigenvalues, real_spectrum, validate_spectrum, MatrixJson, SpectrumAnalysis, SpectrumEntry};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum CurveShape {
    /// Coefficients in increasing degree.
    Polynomial(Vec<f64>),
    /// Knots `(alpha, mu)` with strictly increasing `alpha`; constant beyond
    /// the end knots.
    PiecewiseLinear(Vec<(f64, f64)>),
}

/// One explicit eigenvalue branch `alpha -> mu(alpha)` with a fixed
/// geometric multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCurve {
    pub mult: u32,
    pub shape: CurveShape,
}

impl SpectralCurve {
    pub fn polynomial(mult: u32, coeffs: Vec<f64>) -> Self {
        Self {
            mult,
            shape: CurveShape::Polynomial(coeffs),
        }
    }

    pub fn piecewise(mult: u32, knots: Vec<(f64, f64)>) -> Self {
        Self {
            mult,
            shape: CurveShape::PiecewiseLinear(knots),
        }
    }

    pub fn value(&self, alpha: f64) -> f64 {
        match &self.shape {
            CurveShape::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &k| acc * alpha + k),
            CurveShape::PiecewiseLinear(k) => {
                let (first, last) = (k[0], k[k.len() - 1]);
                if alpha <= first.0 {
                    return first.1;
                }
                if alpha >= last.0 {
                    return last.1;
                }
                let i = k.partition_point(|p| p.0 <= alpha);
                let (a, b) = (k[i - 1], k[i]);
                let t = (alpha - a.0) / (b.0 - a.0);
                a.1 + t * (b.1 - a.1)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if self.mult == 0 {
            return Err(domain("curve multiplicity must be at least 1"));
        }
        match &self.shape {
            CurveShape::Polynomial(c) => {
                if c.is_empty() || c.iter().any(|v| !v.is_finite()) {
                    return Err(domain("polynomial curve needs finite coefficients"));
                }
            }
            CurveShape::PiecewiseLinear(k) => {
                if k.is_empty() || k.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
                    return Err(domain("piecewise curve needs finite knots"));
                }
                if k.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(domain("piecewise curve knots must increase strictly in alpha"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    Constant(DMatrix<f64>),
    /// `A(alpha) = base + alpha * slope`.
    Affine {
        base: DMatrix<f64>,
        slope: DMatrix<f64>,
    },
    /// Linear interpolation between samples with strictly increasing alpha.
    Table {
        alphas: Vec<f64>,
        matrices: Vec<DMatrix<f64>>,
    },
    Curves(Vec<SpectralCurve>),
}

/// A one-parameter family `alpha -> A(alpha)` on a closed interval.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFamily {
    kind: FamilyKind,
    domain: (f64, f64),
    // the underlying kind is evaluated at `offset + sign * alpha`
    offset: f64,
    sign: f64,
}

impl MatrixFamily {
    pub fn new(kind: FamilyKind, domain: (f64, f64)) -> Result<Self> {
        let (lo, hi) = domain;
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(domain_err(format!("invalid parameter interval [{lo}, {hi}]")));
        }
        match &kind {
            FamilyKind::Constant(a) => check_matrix(a)?,
            FamilyKind::Affine { base, slope } => {
                check_matrix(base)?;
                check_matrix(slope)?;
                if base.shape() != slope.shape() {
                    return Err(domain_err("affine family matrices differ in size"));
                }
            }
            FamilyKind::Table { alphas, matrices } => {
                if alphas.is_empty() || alphas.len() != matrices.len() {
                    return Err(domain_err("table family needs one matrix per sample"));
                }
                if alphas.windows(2).any(|w| !(w[1] > w[0])) || alphas.iter().any(|a| !a.is_finite()) {
                    return Err(domain_err("table family alphas must increase strictly"));
                }
                for m in matrices {
                    check_matrix(m)?;
                    if m.shape() != matrices[0].shape() {
                        return Err(domain_err("table family matrices differ in size"));
                    }
                }
                if lo < alphas[0] || hi > alphas[alphas.len() - 1] {
                    return Err(domain_err("table family domain exceeds the sampled range"));
                }
            }
            FamilyKind::Curves(curves) => {
                for c in curves {
                    c.validate()?;
                }
            }
        }
        Ok(Self {
            kind,
            domain,
            offset: 0.0,
            sign: 1.0,
        })
    }

    pub fn constant(a: DMatrix<f64>, domain: (f64, f64)) -> Result<Self> {
        Self::new(FamilyKind::Constant(a), domain)
    }

    pub fn affine(base: DMatrix<f64>, slope: DMatrix<f64>, domain: (f64, f64)) -> Result<Self> {
        Self::new(FamilyKind::Affine { base, slope }, domain)
    }

    pub fn curves(curves: Vec<SpectralCurve>, domain: (f64, f64)) -> Result<Self> {
        Self::new(FamilyKind::Curves(curves), domain)
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn is_reversed(&self) -> bool {
        self.sign < 0.0
    }

    /// The same family traversed backwards: `alpha -> A(lo + hi - alpha)`.
    pub fn reversed(&self) -> Self {
        let (lo, hi) = self.domain;
        Self {
            offset: self.offset + self.sign * (lo + hi),
            sign: -self.sign,
            ..self.clone()
        }
    }

    /// Restriction to a sub-interval of the domain.
    pub fn restricted(&self, lo: f64, hi: f64) -> Result<Self> {
        let (a, b) = self.domain;
        if lo < a || hi > b || lo > hi {
            return Err(domain_err(format!("[{lo}, {hi}] is not inside [{a}, {b}]")));
        }
        Ok(Self {
            domain: (lo, hi),
            ..self.clone()
        })
    }

    fn inner_alpha(&self, alpha: f64) -> f64 {
        self.offset + self.sign * alpha
    }

    fn check_alpha(&self, alpha: f64) -> Result<()> {
        let (lo, hi) = self.domain;
        if !alpha.is_finite() || alpha < lo || alpha > hi {
            return Err(domain_err(format!("alpha = {alpha} is outside [{lo}, {hi}]")));
        }
        Ok(())
    }

    /// Parameter values where the family is only piecewise smooth (table
    /// samples, curve knots), mapped into the caller's coordinates.
    pub fn breakpoints(&self) -> Vec<f64> {
        let raw: Vec<f64> = match &self.kind {
            FamilyKind::Table { alphas, .. } => alphas.clone(),
            FamilyKind::Curves(cs) => cs
                .iter()
                .flat_map(|c| match &c.shape {
                    CurveShape::PiecewiseLinear(k) => k.iter().map(|p| p.0).collect(),
                    CurveShape::Polynomial(_) => Vec::new(),
                })
                .collect(),
            _ => Vec::new(),
        };
        let (lo, hi) = self.domain;
        let mut out: Vec<f64> = raw
            .into_iter()
            .map(|a| self.sign * (a - self.offset))
            .filter(|&a| a > lo && a < hi)
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// The matrix at `alpha`, or `None` for explicit-curve families.
    pub fn matrix_at(&self, alpha: f64) -> Result<Option<DMatrix<f64>>> {
        self.check_alpha(alpha)?;
        let x = self.inner_alpha(alpha);
        Ok(match &self.kind {
            FamilyKind::Constant(a) => Some(a.clone()),
            FamilyKind::Affine { base, slope } => Some(base + slope * x),
            FamilyKind::Table { alphas, matrices } => {
                let i = alphas.partition_point(|&a| a <= x);
                if i == 0 {
                    Some(matrices[0].clone())
                } else if i == alphas.len() {
                    Some(matrices[i - 1].clone())
                } else {
                    let t = (x - alphas[i - 1]) / (alphas[i] - alphas[i - 1]);
                    Some(&matrices[i - 1] * (1.0 - t) + &matrices[i] * t)
                }
            }
            FamilyKind::Curves(_) => None,
        })
    }

    /// Branch values at `alpha` as `(mu, multiplicity)`.
    ///
    /// Curve families report one entry per declared branch in declaration
    /// order. Matrix families report each real eigenvalue once per algebraic
    /// multiplicity, in decreasing order.
    pub fn branch_values(&self, alpha: f64, tol: f64) -> Result<(Vec<(f64, u32)>, usize)> {
        self.check_alpha(alpha)?;
        match &self.kind {
            FamilyKind::Curves(cs) => {
                let x = self.inner_alpha(alpha);
                Ok((cs.iter().map(|c| (c.value(x), c.mult)).collect(), 0))
            }
            _ => {
                let a = self.matrix_at(alpha)?.expect("matrix family");
                let (vals, complex) = real_eigenvalues(&a, tol);
                Ok((vals.into_iter().map(|v| (v, 1)).collect(), complex))
            }
        }
    }

    /// Spectrum of `A(alpha)`; coincident curve values are merged with their
    /// multiplicities added.
    pub fn spectrum_at(&self, alpha: f64, tol: f64) -> Result<SpectrumAnalysis> {
        self.check_alpha(alpha)?;
        match &self.kind {
            FamilyKind::Curves(cs) => {
                let x = self.inner_alpha(alpha);
                let mut entries: Vec<SpectrumEntry> = Vec::with_capacity(cs.len());
                for c in cs {
                    let v = c.value(x);
                    match entries.iter_mut().find(|e| (e.mu - v).abs() <= tol * v.abs().max(1.0)) {
                        Some(e) => e.geom_mult += c.mult,
                        None => entries.push(SpectrumEntry::new(v, c.mult)),
                    }
                }
                validate_spectrum(&entries)?;
                Ok(SpectrumAnalysis {
                    entries,
                    complex_count: 0,
                })
            }
            _ => real_spectrum(&self.matrix_at(alpha)?.expect("matrix family"), tol),
        }
    }

    pub fn is_constant(&self) -> bool {
        match &self.kind {
            FamilyKind::Constant(_) => true,
            FamilyKind::Affine { slope, .. } => slope.iter().all(|&v| v == 0.0),
            FamilyKind::Table { matrices, .. } => matrices.windows(2).all(|w| w[0] == w[1]),
            FamilyKind::Curves(cs) => cs.iter().all(|c| match &c.shape {
                CurveShape::Polynomial(k) => k.iter().skip(1).all(|&v| v == 0.0),
                CurveShape::PiecewiseLinear(k) => k.windows(2).all(|w| w[0].1 == w[1].1),
            }),
        }
    }

    /// Parses the JSON family format; `domain` overrides any interval in the file.
    pub fn from_json(json: &str, domain: Option<(f64, f64)>) -> Result<Self> {
        let file: FamilyJson = serde_json::from_str(json)?;
        file.into_family(domain)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&FamilyJson::from_family(self)?)?)
    }
}

fn domain_err(msg: impl Into<String>) -> Error {
    domain(msg)
}

fn check_matrix(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() == 0 || a.nrows() != a.ncols() {
        return Err(domain_err("family matrices must be square and non-empty"));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(domain_err("family matrix has non-finite entries"));
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleJson {
    alpha: f64,
    matrix: MatrixJson,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchJson {
    #[serde(default = "one")]
    mult: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    poly: Option<Vec<f64>>,
}

fn one() -> u32 {
    1
}

/// On-disk family format.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum FamilyJson {
    Constant {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        schema: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        domain: Option<[f64; 2]>,
        matrix: MatrixJson,
    },
    Affine {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        schema: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        domain: Option<[f64; 2]>,
        a0: MatrixJson,
        a1: MatrixJson,
    },
    Table {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        schema: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        domain: Option<[f64; 2]>,
        samples: Vec<SampleJson>,
    },
    Curves {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        schema: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        domain: Option<[f64; 2]>,
        branches: Vec<BranchJson>,
    },
}

impl FamilyJson {
    fn into_family(self, override_domain: Option<(f64, f64)>) -> Result<MatrixFamily> {
        let (schema, file_domain, kind) = match self {
            FamilyJson::Constant { schema, domain, matrix } => {
                (schema, domain, FamilyKind::Constant(matrix.to_matrix()?))
            }
            FamilyJson::Affine { schema, domain, a0, a1 } => (
                schema,
                domain,
                FamilyKind::Affine {
                    base: a0.to_matrix()?,
                    slope: a1.to_matrix()?,
                },
            ),
            FamilyJson::Table {
                schema,
                domain,
                samples,
            } => {
                let alphas = samples.iter().map(|s| s.alpha).collect();
                let matrices = samples.iter().map(|s| s.matrix.to_matrix()).collect::<Result<_>>()?;
                (schema, domain, FamilyKind::Table { alphas, matrices })
            }
            FamilyJson::Curves {
                schema,
                domain,
                branches,
            } => {
                let curves = branches
                    .into_iter()
                    .map(|b| match (b.points, b.poly) {
                        (Some(p), None) => Ok(SpectralCurve::piecewise(
                            b.mult,
                            p.into_iter().map(|[a, m]| (a, m)).collect(),
                        )),
                        (None, Some(c)) => Ok(SpectralCurve::polynomial(b.mult, c)),
                        _ => Err(Error::Schema(
                            "each branch needs exactly one of `points` or `poly`".into(),
                        )),
                    })
                    .collect::<Result<_>>()?;
                (schema, domain, FamilyKind::Curves(curves))
            }
        };
        if let Some(v) = schema {
            if v != crate::SCHEMA_VERSION {
                return Err(Error::Schema(format!("unsupported schema version {v}")));
            }
        }
        let domain = match (override_domain, file_domain, &kind) {
            (Some(d), _, _) => d,
            (None, Some([a, b]), _) => (a, b),
            (None, None, FamilyKind::Table { alphas, .. }) if !alphas.is_empty() => {
                (alphas[0], alphas[alphas.len() - 1])
            }
            _ => {
                return Err(Error::Schema(
                    "family needs a parameter interval (`domain` or --range)".into(),
                ))
            }
        };
        MatrixFamily::new(kind, domain)
    }

    fn from_family(f: &MatrixFamily) -> Result<Self> {
        if f.offset != 0.0 || f.sign != 1.0 {
            return Err(Error::Schema("reparametrised families have no file form".into()));
        }
        let domain = Some([f.domain.0, f.domain.1]);
        let schema = Some(crate::SCHEMA_VERSION);
        Ok(match &f.kind {
            FamilyKind::Constant(a) => FamilyJson::Constant {
                schema,
                domain,
                matrix: MatrixJson::from_matrix(a),
            },
            FamilyKind::Affine { base, slope } => FamilyJson::Affine {
                schema,
                domain,
                a0: MatrixJson::from_matrix(base),
                a1: MatrixJson::from_matrix(slope),
            },
            FamilyKind::Table { alphas, matrices } => FamilyJson::Table {
                schema,
                domain,
                samples: alphas
                    .iter()
                    .zip(matrices)
                    .map(|(&alpha, m)| SampleJson {
                        alpha,
                        matrix: MatrixJson::from_matrix(m),
                    })
                    .collect(),
            },
            FamilyKind::Curves(cs) => FamilyJson::Curves {
                schema,
                domain,
                branches: cs
                    .iter()
                    .map(|c| match &c.shape {
                        CurveShape::Polynomial(k) => BranchJson {
                            mult: c.mult,
                            points: None,
                            poly: Some(k.clone()),
                        },
                        CurveShape::PiecewiseLinear(k) => BranchJson {
                            mult: c.mult,
                            points: Some(k.iter().map(|&(a, m)| [a, m]).collect()),
                            poly: None,
                        },
                    })
                    .collect(),
            },
        })
    }
}

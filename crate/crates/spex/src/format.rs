//! Input parsing (polynomial text and JSON forms, point files) and the
//! serializable output records behind the JSON schemas shipped in
//! `schemas/`.

use serde::Serialize;
use spex_core::bounds::{BoundTable, SigmaBranch};
use spex_core::counting::MomentReport;
use spex_core::discrepancy::{
    BoxCounting, DiscrepancyReport, Method, PointSet, PowgenShapeBound, Provenance,
};
use spex_core::expsum::{BoundEntry, CrtFactor, ExpSumReport};
use spex_core::poly::{ConditionReport, SparsePolynomial};
use spex_core::powgen::GeneratorSpec;
use spex_core::{BigRational, Complex64};

use crate::{Error, Result};

// ---------------------------------------------------------------- parsing

/// Parse "a1*x^e1 + a2*x^e2 [mod q]". Coefficients may carry a leading
/// minus (reduced mod q); "x" and "x^e" mean coefficient 1; "a*x" means
/// exponent 1. The modulus comes from the trailing "mod q" or the flag,
/// which must agree when both are present.
pub fn parse_poly_text(input: &str, q_flag: Option<u64>) -> Result<SparsePolynomial> {
    let input = input.trim();
    let (body, q_suffix) = match input.rsplit_once("mod") {
        Some((body, q_str)) if !q_str.trim().is_empty() => {
            let q: u64 = q_str
                .trim()
                .parse()
                .map_err(|_| Error::parse(format!("bad modulus in {input:?}")))?;
            (body.trim(), Some(q))
        }
        _ => (input, None),
    };
    let q = match (q_flag, q_suffix) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::parse(format!("--q {a} disagrees with 'mod {b}'")));
        }
        (a, b) => a
            .or(b)
            .ok_or_else(|| Error::parse("no modulus: pass --q or append 'mod q'"))?,
    };
    let mut terms: Vec<(u64, u64)> = Vec::new();
    // split on '+' and on '-' (the latter keeps its sign)
    let mut pieces: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    for ch in body.chars() {
        match ch {
            '+' | '-' if !current.trim().is_empty() => {
                pieces.push((negative, current.clone()));
                current.clear();
                negative = ch == '-';
            }
            '-' => negative = true,
            '+' => {}
            _ => current.push(ch),
        }
    }
    if !current.trim().is_empty() {
        pieces.push((negative, current));
    }
    if pieces.is_empty() {
        return Err(Error::parse(format!("no terms in {input:?}")));
    }
    for (neg, piece) in pieces {
        let piece: String = piece.chars().filter(|c| !c.is_whitespace()).collect();
        let (coeff_str, exp_str) = match piece.split_once('x') {
            Some((c, rest)) => {
                let e = match rest.strip_prefix('^') {
                    Some(e) => e,
                    None if rest.is_empty() => "1",
                    None => return Err(Error::parse(format!("bad term {piece:?}"))),
                };
                (c.trim_end_matches('*'), e)
            }
            None => return Err(Error::parse(format!("constant term {piece:?} not allowed"))),
        };
        let coeff: u64 = if coeff_str.is_empty() {
            1
        } else {
            coeff_str
                .parse()
                .map_err(|_| Error::parse(format!("bad coefficient {coeff_str:?}")))?
        };
        let exp: u64 = exp_str
            .parse()
            .map_err(|_| Error::parse(format!("bad exponent {exp_str:?}")))?;
        let coeff = if neg { (q - coeff % q) % q } else { coeff };
        terms.push((coeff, exp));
    }
    Ok(SparsePolynomial::new(q, &terms)?)
}

/// Parse the JSON form {"q": 15, "terms": [[a, e], ...]}.
pub fn parse_poly_json(input: &str) -> Result<SparsePolynomial> {
    #[derive(serde::Deserialize)]
    struct PolyJson {
        q: u64,
        terms: Vec<(u64, u64)>,
    }
    let parsed: PolyJson = serde_json::from_str(input)
        .map_err(|e| Error::parse(format!("bad polynomial JSON: {e}")))?;
    Ok(SparsePolynomial::new(parsed.q, &parsed.terms)?)
}

/// Dispatch on the leading character: '{' selects the JSON form.
pub fn parse_poly(input: &str, q_flag: Option<u64>) -> Result<SparsePolynomial> {
    if input.trim_start().starts_with('{') {
        let f = parse_poly_json(input)?;
        if let Some(q) = q_flag {
            if q != f.modulus() {
                return Err(Error::parse(format!(
                    "--q {q} disagrees with JSON q {}",
                    f.modulus()
                )));
            }
        }
        Ok(f)
    } else {
        parse_poly_text(input, q_flag)
    }
}

/// Canonical text form "a1*x^e1 + a2*x^e2 mod q".
pub fn poly_to_text(f: &SparsePolynomial) -> String {
    let body: Vec<String> = f
        .terms()
        .iter()
        .map(|&(a, e)| format!("{a}*x^{e}"))
        .collect();
    format!("{} mod {}", body.join(" + "), f.modulus())
}

/// Parse a CSV points file: one point per line, coordinates separated by
/// commas; blank lines and '#' comments skipped.
pub fn parse_points_file(content: &str) -> Result<PointSet> {
    let mut points = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let coords: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|t| t.trim().parse::<f64>()).collect();
        let coords = coords.map_err(|e| Error::parse(format!("line {}: {e}", lineno + 1)))?;
        points.push(coords);
    }
    Ok(PointSet::new(points, Provenance::External)?)
}

/// Parse "a,b,c" into integers.
pub fn parse_u64_list(input: &str) -> Result<Vec<u64>> {
    input
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::parse(format!("bad integer {t:?}")))
        })
        .collect()
}

/// Parse "lo..hi" (inclusive ends) into a range.
pub fn parse_range(input: &str) -> Result<(u64, u64)> {
    let (lo, hi) = input
        .split_once("..")
        .ok_or_else(|| Error::parse(format!("bad range {input:?}, expected lo..hi")))?;
    let lo = lo
        .trim()
        .parse()
        .map_err(|_| Error::parse("bad range start"))?;
    let hi = hi
        .trim()
        .parse()
        .map_err(|_| Error::parse("bad range end"))?;
    if lo > hi {
        return Err(Error::parse("empty range"));
    }
    Ok((lo, hi))
}

// ------------------------------------------------------------------- CSV

/// RFC 4180 escaping: quote fields containing comma, quote, or newline.
pub fn csv_field(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn csv_row(fields: &[String]) -> String {
    fields
        .iter()
        .map(|f| csv_field(f))
        .collect::<Vec<_>>()
        .join(",")
}

// ------------------------------------------------------- output records

#[derive(Serialize)]
pub struct ComplexOut {
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

impl From<Complex64> for ComplexOut {
    fn from(z: Complex64) -> ComplexOut {
        ComplexOut {
            re: z.re,
            im: z.im,
            abs: spex_core::expsum::magnitude(z),
        }
    }
}

#[derive(Serialize)]
pub struct CheckOut {
    pub label: String,
    pub observed: u64,
    pub threshold: f64,
    pub pass: bool,
    pub boundary: bool,
}

#[derive(Serialize)]
pub struct ConditionsOut {
    pub id: String,
    pub pass: bool,
    pub checks: Vec<CheckOut>,
}

impl From<&ConditionReport> for ConditionsOut {
    fn from(rep: &ConditionReport) -> ConditionsOut {
        ConditionsOut {
            id: rep.id.to_string(),
            pass: rep.pass,
            checks: rep
                .checks
                .iter()
                .map(|c| CheckOut {
                    label: c.label.clone(),
                    observed: c.observed,
                    threshold: c.threshold,
                    pass: c.pass,
                    boundary: c.boundary,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct BoundOut {
    pub name: String,
    pub value: Option<f64>,
    pub scale: String,
    pub constant_free: bool,
    pub applicable: bool,
    pub conditions: Option<ConditionsOut>,
    pub note: Option<String>,
}

impl From<&BoundEntry> for BoundOut {
    fn from(b: &BoundEntry) -> BoundOut {
        BoundOut {
            name: b.name.to_string(),
            value: b.value.filter(|v| v.is_finite()),
            scale: match b.scale {
                spex_core::expsum::BoundScale::Linear => "linear".to_string(),
                spex_core::expsum::BoundScale::LogNatural => "log".to_string(),
            },
            constant_free: b.constant_free,
            applicable: b.applicable,
            conditions: b.conditions.as_ref().map(ConditionsOut::from),
            note: b.note.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct CrtFactorOut {
    pub p: u64,
    pub m: u32,
    pub modulus: u64,
    pub lambda: u64,
}

#[derive(Serialize)]
pub struct CrtOut {
    pub sum: ComplexOut,
    pub abs_difference: f64,
    pub factors: Vec<CrtFactorOut>,
}

#[derive(Serialize)]
pub struct ExpsumOut {
    pub q: u64,
    pub poly: String,
    pub phi: u64,
    pub sum: ComplexOut,
    pub via_crt: Option<CrtOut>,
    pub bounds: Option<Vec<BoundOut>>,
}

impl ExpsumOut {
    pub fn build(
        report: &ExpSumReport,
        via_crt: Option<(Complex64, &[CrtFactor])>,
        with_bounds: bool,
    ) -> ExpsumOut {
        ExpsumOut {
            q: report.q,
            poly: poly_to_text(&report.f),
            phi: report.phi,
            sum: report.value.into(),
            via_crt: via_crt.map(|(sum, factors)| CrtOut {
                sum: sum.into(),
                abs_difference: spex_core::expsum::magnitude(sum - report.value),
                factors: factors
                    .iter()
                    .map(|f| CrtFactorOut {
                        p: f.p,
                        m: f.m,
                        modulus: f.modulus,
                        lambda: f.lambda,
                    })
                    .collect(),
            }),
            bounds: with_bounds.then(|| report.bounds.iter().map(BoundOut::from).collect()),
        }
    }
}

#[derive(Serialize)]
pub struct BoundRowOut {
    pub r: u32,
    pub t: Option<String>,
    pub kappa: String,
}

#[derive(Serialize)]
pub struct RhoRowOut {
    pub r: u32,
    pub value: String,
}

#[derive(Serialize)]
pub struct SigmaRowOut {
    pub r: u32,
    pub value: String,
    pub branch: String,
}

#[derive(Serialize)]
pub struct BoundsTableOut {
    pub epsilon: String,
    pub rows: Vec<BoundRowOut>,
    pub rho: Option<Vec<RhoRowOut>>,
    pub sigma: Option<Vec<SigmaRowOut>>,
}

pub fn rational_string(x: &BigRational) -> String {
    format!("{x}")
}

impl BoundsTableOut {
    pub fn build(table: &BoundTable, with_rho: bool, with_sigma: bool) -> Result<BoundsTableOut> {
        let rows = table
            .rows
            .iter()
            .map(|row| BoundRowOut {
                r: row.r,
                t: row.t.as_ref().map(|t| t.to_string()),
                kappa: rational_string(&row.kappa),
            })
            .collect();
        let r_max = table.rows.len() as u32;
        let rho = if with_rho {
            let mut out = Vec::new();
            for r in 1..=r_max {
                out.push(RhoRowOut {
                    r,
                    value: rational_string(&spex_core::bounds::rho(r)?),
                });
            }
            Some(out)
        } else {
            None
        };
        let sigma = if with_sigma {
            let mut out = Vec::new();
            for r in 1..=r_max {
                let (value, branch) = spex_core::bounds::sigma(r)?;
                out.push(SigmaRowOut {
                    r,
                    value: rational_string(&value),
                    branch: match branch {
                        SigmaBranch::Kappa => "kappa".to_string(),
                        SigmaBranch::Cubic => "cubic".to_string(),
                    },
                });
            }
            Some(out)
        } else {
            None
        };
        Ok(BoundsTableOut {
            epsilon: rational_string(&table.epsilon),
            rows,
            rho,
            sigma,
        })
    }
}

pub fn moments_csv_header() -> String {
    csv_row(&[
        "p".into(),
        "r".into(),
        "t".into(),
        "exps".into(),
        "coeffs".into(),
        "count".into(),
        "sum_j".into(),
        "sum_j_sq".into(),
        "orthogonality".into(),
    ])
}

pub fn moments_csv_line(m: &MomentReport) -> String {
    let join = |v: &[u64]| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    csv_row(&[
        m.p.to_string(),
        m.exps.len().to_string(),
        m.t.to_string(),
        join(&m.exps),
        join(&m.coeffs),
        m.count.to_string(),
        m.sum_j.to_string(),
        m.sum_j_sq.to_string(),
        format!("{:.9}", m.orthogonality),
    ])
}

#[derive(Serialize)]
pub struct TermOut {
    pub n: i64,
    pub value: u64,
}

#[derive(Serialize)]
pub struct PowgenOut {
    pub p: u64,
    pub e: u64,
    pub theta: u64,
    pub t_order: u64,
    pub preperiod: u64,
    pub period: u64,
    pub terms: Vec<TermOut>,
}

impl PowgenOut {
    pub fn build(g: &GeneratorSpec, terms: Vec<TermOut>) -> PowgenOut {
        PowgenOut {
            p: g.p,
            e: g.e,
            theta: g.theta,
            t_order: g.t_order,
            preperiod: g.preperiod,
            period: g.period,
            terms,
        }
    }
}

#[derive(Serialize)]
pub struct MultivariateOut {
    pub p: u64,
    pub dimension: usize,
    pub kind: String,
    pub states: Vec<Vec<u64>>,
    pub preperiod: Option<u64>,
    pub period: Option<u64>,
}

#[derive(Serialize)]
pub struct KsOut {
    pub a: u32,
    pub value: f64,
}

#[derive(Serialize)]
pub struct PowgenShapeOut {
    pub p: u64,
    pub e: u64,
    pub theta: u64,
    pub shifts: Vec<u64>,
    pub n: u64,
    pub shape_value: f64,
    pub rho_2s: String,
    pub nontrivial_threshold: f64,
    pub nontrivial: bool,
    /// measured discrepancy divided by the shape value; recorded, never
    /// asserted against
    pub ratio: Option<f64>,
}

impl PowgenShapeOut {
    pub fn build(
        provenance: &Provenance,
        shape: &PowgenShapeBound,
        measured: Option<f64>,
    ) -> Option<PowgenShapeOut> {
        if let Provenance::PowerGenerator {
            p,
            e,
            theta,
            shifts,
            n,
        } = provenance
        {
            Some(PowgenShapeOut {
                p: *p,
                e: *e,
                theta: *theta,
                shifts: shifts.clone(),
                n: *n,
                shape_value: shape.value,
                rho_2s: rational_string(&shape.rho_2s),
                nontrivial_threshold: shape.nontrivial_threshold,
                nontrivial: shape.nontrivial,
                ratio: measured.map(|m| m / shape.value),
            })
        } else {
            None
        }
    }
}

#[derive(Serialize)]
pub struct DiscrepancyOut {
    pub n: usize,
    pub s: usize,
    pub star: bool,
    pub method: String,
    pub resolution: Option<u32>,
    pub counting: String,
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
    pub boxes_evaluated: u64,
    pub ks_rhs: Option<KsOut>,
    pub powgen: Option<PowgenShapeOut>,
}

impl DiscrepancyOut {
    pub fn build(
        points: &PointSet,
        report: &DiscrepancyReport,
        star: bool,
        ks: Option<KsOut>,
        powgen: Option<PowgenShapeOut>,
    ) -> DiscrepancyOut {
        DiscrepancyOut {
            n: points.len(),
            s: points.dim(),
            star,
            method: match report.method {
                Method::ExactCritical => "exact".to_string(),
                Method::Grid { .. } => "grid".to_string(),
            },
            resolution: match report.method {
                Method::Grid { resolution } => Some(resolution),
                Method::ExactCritical => None,
            },
            counting: match report.counting {
                BoxCounting::HalfOpenSup => "half-open".to_string(),
                BoxCounting::ClosedAttained => "closed".to_string(),
            },
            lower: report.lower,
            upper: report.upper,
            exact: report.is_exact(),
            boxes_evaluated: report.boxes_evaluated,
            ks_rhs: ks,
            powgen,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_text_forms() {
        let f = parse_poly_text("1*x^1+1*x^2", Some(15)).unwrap();
        assert_eq!(f.terms(), &[(1, 1), (1, 2)]);
        let f = parse_poly_text("2x + x^3 mod 7", None).unwrap();
        assert_eq!(f.terms(), &[(2, 1), (1, 3)]);
        let f = parse_poly_text("x^4 - x mod 7", None).unwrap();
        assert_eq!(f.terms(), &[(6, 1), (1, 4)]);
        assert!(parse_poly_text("x + 1", Some(7)).is_err()); // constant term
        assert!(parse_poly_text("x^2 mod 7", Some(11)).is_err()); // disagreement
        assert!(parse_poly_text("x^2", None).is_err()); // no modulus
    }

    #[test]
    fn poly_json_form() {
        let f = parse_poly(r#"{"q": 15, "terms": [[3, 1], [5, 2]]}"#, None).unwrap();
        assert_eq!(f.modulus(), 15);
        assert_eq!(f.terms(), &[(3, 1), (5, 2)]);
        assert!(parse_poly(r#"{"q": 9, "terms": [[3, 1], [6, 2]]}"#, None).is_err());
    }

    #[test]
    fn round_trip_text() {
        let f = parse_poly_text("3*x^2 + 1*x^5 mod 11", None).unwrap();
        let text = poly_to_text(&f);
        assert_eq!(text, "3*x^2 + 1*x^5 mod 11");
        let again = parse_poly_text(&text, None).unwrap();
        assert_eq!(f, again);
    }

    #[test]
    fn csv_escaping() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn points_file() {
        let ps = parse_points_file("0.1, 0.2\n# comment\n0.5,0.25\n").unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps.dim(), 2);
        assert!(parse_points_file("1.5\n").is_err());
        assert!(parse_points_file("0.1\n0.2,0.3\n").is_err());
    }

    #[test]
    fn parse_round_trips_seeded_polynomials() {
        let mut rng = spex_core::rng::SplitMix64::new(31);
        let mut done = 0;
        while done < 100 {
            let q = rng.range(2, 10_000);
            let r = 1 + rng.below(4);
            let terms: Vec<(u64, u64)> =
                (0..r).map(|_| (rng.below(q), 1 + rng.below(1 << 40))).collect();
            let Ok(f) = SparsePolynomial::new(q, &terms) else {
                continue;
            };
            let text = poly_to_text(&f);
            assert_eq!(parse_poly_text(&text, None).unwrap(), f, "text {text}");
            let json =
                serde_json::json!({"q": f.modulus(), "terms": f.terms()}).to_string();
            assert_eq!(parse_poly(&json, None).unwrap(), f, "json {json}");
            done += 1;
        }
    }
}

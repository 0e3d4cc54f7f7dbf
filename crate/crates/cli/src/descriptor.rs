//! Map descriptors: a kind, numeric parameters and an ordered list of
//! transforms, either from flags or from a JSON file.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use harmonorm::{
    affine_change, koebe_transform, make_extremal, make_f_r, make_harmonic_koebe, make_lens, make_phi_a,
    order_f, order_h, AnalyticMap, Complex, FamilyParams, HarmonicMap,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    Koebe([f64; 2]),
    Affine([f64; 2]),
}

impl Transform {
    /// `koebe:re,im` or `affine:re,im`.
    pub fn parse(s: &str) -> Result<Self> {
        let (name, arg) = s
            .split_once(':')
            .ok_or_else(|| anyhow!("transform `{s}` must look like koebe:re,im or affine:re,im"))?;
        let z = parse_complex(arg)?;
        match name {
            "koebe" => Ok(Transform::Koebe([z.re, z.im])),
            "affine" => Ok(Transform::Affine([z.re, z.im])),
            _ => bail!("unknown transform `{name}` (expected koebe or affine)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDescriptor {
    pub kind: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub transforms: Vec<Transform>,
}

pub const KINDS: [&str; 9] = [
    "identity",
    "analytic_koebe",
    "strip",
    "generalized_koebe",
    "lens",
    "automorphism",
    "harmonic_koebe",
    "f_r",
    "extremal",
];

/// Keys every kind accepts: one Koebe transform, then one affine change.
const SHARED_KEYS: [&str; 4] = ["zeta-re", "zeta-im", "eps-re", "eps-im"];

fn kind_keys(kind: &str) -> Option<&'static [&'static str]> {
    Some(match kind {
        "identity" | "analytic_koebe" | "strip" | "harmonic_koebe" => &[],
        "generalized_koebe" => &["a", "lambda"],
        "lens" => &["R"],
        "automorphism" => &["alpha-re", "alpha-im"],
        "f_r" => &["r"],
        "extremal" => &["lambda", "R"],
        _ => return None,
    })
}

/// A built map; `self_map` is set for kinds that are analytic self-maps of
/// the disk and have not been transformed.
pub struct BuiltMap {
    pub harmonic: HarmonicMap,
    pub self_map: Option<AnalyticMap>,
}

impl MapDescriptor {
    fn get(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    fn require(&self, key: &str) -> Result<f64> {
        self.get(key).ok_or_else(|| anyhow!("kind `{}` needs parameter {key}", self.kind))
    }

    fn pair(&self, prefix: &str) -> Option<Complex> {
        let re = self.get(&format!("{prefix}-re"));
        let im = self.get(&format!("{prefix}-im"));
        (re.is_some() || im.is_some()).then(|| Complex::new(re.unwrap_or(0.0), im.unwrap_or(0.0)))
    }

    pub fn validate(&self) -> Result<()> {
        let keys = kind_keys(&self.kind)
            .ok_or_else(|| anyhow!("unknown kind `{}` (expected one of {})", self.kind, KINDS.join(", ")))?;
        for (k, v) in &self.params {
            if !keys.contains(&k.as_str()) && !SHARED_KEYS.contains(&k.as_str()) {
                bail!("kind `{}` does not take parameter {k}", self.kind);
            }
            if !v.is_finite() {
                bail!("parameter {k} must be finite, got {v}");
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<BuiltMap> {
        self.validate()?;
        let analytic = |m: AnalyticMap| -> Result<HarmonicMap> { Ok(HarmonicMap::analytic(m)?) };
        let (mut harmonic, mut self_map) = match self.kind.as_str() {
            "identity" => (analytic(AnalyticMap::Identity)?, Some(AnalyticMap::Identity)),
            "analytic_koebe" => (analytic(AnalyticMap::AnalyticKoebe)?, None),
            "strip" => (analytic(AnalyticMap::Strip)?, None),
            "generalized_koebe" => {
                let a = match (self.get("a"), self.get("lambda")) {
                    (Some(a), None) => a,
                    (None, Some(lambda)) => order_h(lambda)?,
                    _ => bail!("generalized_koebe needs exactly one of a, lambda"),
                };
                (analytic(make_phi_a(a)?)?, None)
            }
            "lens" => {
                let lens = make_lens(self.require("R")?)?;
                (analytic(lens.clone())?, Some(lens))
            }
            "automorphism" => {
                let alpha = self.pair("alpha").unwrap_or_default();
                let sigma = AnalyticMap::automorphism(alpha)?;
                (HarmonicMap::new(sigma.clone(), AnalyticMap::Constant(Complex::new(0.0, 0.0)))?, Some(sigma))
            }
            "harmonic_koebe" => (make_harmonic_koebe(), None),
            "f_r" => (make_f_r(self.require("r")?)?, None),
            "extremal" => {
                let lambda = self.require("lambda")?;
                let r = order_f(lambda, self.get("R"))?.r_sup;
                (make_extremal(FamilyParams::new(lambda, r)?)?, None)
            }
            other => bail!("unknown kind `{other}`"),
        };
        let mut steps = Vec::new();
        if let Some(zeta) = self.pair("zeta") {
            steps.push(Transform::Koebe([zeta.re, zeta.im]));
        }
        if let Some(eps) = self.pair("eps") {
            steps.push(Transform::Affine([eps.re, eps.im]));
        }
        steps.extend(self.transforms.iter().copied());
        for t in steps {
            harmonic = match t {
                Transform::Koebe([re, im]) => koebe_transform(&harmonic, Complex::new(re, im))?,
                Transform::Affine([re, im]) => affine_change(&harmonic, Complex::new(re, im))?,
            };
            self_map = None;
        }
        Ok(BuiltMap { harmonic, self_map })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: MapDescriptor = serde_json::from_str(text).context("invalid map descriptor")?;
        d.validate()?;
        Ok(d)
    }
}

fn parse_real(s: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| anyhow!("cannot parse `{s}` as a number"))?;
    if !v.is_finite() {
        bail!("`{s}` is not finite");
    }
    Ok(v)
}

fn parse_imag(s: &str) -> Result<f64> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => parse_real(s),
    }
}

/// Accepts `re,im`, `x`, `yi`, `x+yi`, `x-yi` (with `i` or `j`).
pub fn parse_complex(raw: &str) -> Result<Complex> {
    let s: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some((re, im)) = s.split_once(',') {
        return Ok(Complex::new(parse_real(re)?, parse_real(im)?));
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return Ok(Complex::new(parse_real(&s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let parsed: Result<Complex> = match split {
        Some(k) => parse_real(&body[..k]).and_then(|re| Ok(Complex::new(re, parse_imag(&body[k..])?))),
        None => parse_imag(body).map(|im| Complex::new(0.0, im)),
    };
    parsed.with_context(|| format!("cannot parse `{raw}` as a complex number"))
}

//! Map quality against a ternary reference: α-cut discretization, 3×3
//! confusion matrix, precision/recall, weighted F-measure, TCR and MAE.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{same_spec, RangeTag, ScalarGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Prob,
    Fuzzy,
    Antonym,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Prob, Method::Fuzzy, Method::Antonym];

    pub fn name(self) -> &'static str {
        match self {
            Method::Prob => "prob",
            Method::Fuzzy => "fuzzy",
            Method::Antonym => "antonym",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "prob" | "probabilistic" => Ok(Method::Prob),
            "fuzzy" => Ok(Method::Fuzzy),
            "antonym" | "antonyms" => Ok(Method::Antonym),
            _ => Err(Error::Unknown {
                what: "method",
                name: name.to_string(),
            }),
        }
    }
}

/// A finished map in the native form of its method.
#[derive(Debug, Clone)]
pub enum MethodMap {
    /// Cell probabilities of being occupied.
    Prob(ScalarGrid),
    Fuzzy { occupied: ScalarGrid, empty: ScalarGrid },
    /// Integrated antonym map.
    Antonym(ScalarGrid),
}

/// Brings any method's map onto `[-1, 1]`, −1 meaning empty.
pub fn rescale(map: &MethodMap) -> Result<ScalarGrid> {
    match map {
        MethodMap::Prob(p) => Ok(p.map(RangeTag::Signed, |v| 2.0 * v - 1.0)),
        MethodMap::Fuzzy { occupied, empty } => occupied.zip_map(empty, RangeTag::Signed, |o, e| o - e),
        MethodMap::Antonym(integ) => Ok(integ.map(RangeTag::Signed, |v| v)),
    }
}

/// Closed outer intervals: `v ≥ α` is an obstacle and `v ≤ -α` is empty.
pub fn discretize(signed: &ScalarGrid, alpha: f64) -> ScalarGrid {
    signed.map(RangeTag::Ternary, |v| {
        if v >= alpha {
            1.0
        } else if v <= -alpha {
            -1.0
        } else {
            0.0
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellClass {
    Obstacle = 0,
    Empty = 1,
    Unknown = 2,
}

impl CellClass {
    pub fn of(v: f64) -> Self {
        if v > 0.0 {
            CellClass::Obstacle
        } else if v < 0.0 {
            CellClass::Empty
        } else {
            CellClass::Unknown
        }
    }
}

/// Counts indexed `[predicted][actual]` in the order obstacle, empty, unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix3 {
    pub counts: [[u64; 3]; 3],
}

impl ConfusionMatrix3 {
    pub fn get(&self, predicted: CellClass, actual: CellClass) -> u64 {
        self.counts[predicted as usize][actual as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn oto(&self) -> u64 {
        self.counts[0][0]
    }
    pub fn efo(&self) -> u64 {
        self.counts[0][1]
    }
    pub fn ufo(&self) -> u64 {
        self.counts[0][2]
    }
    pub fn ofe(&self) -> u64 {
        self.counts[1][0]
    }
    pub fn ete(&self) -> u64 {
        self.counts[1][1]
    }
    pub fn ufe(&self) -> u64 {
        self.counts[1][2]
    }
    pub fn ofu(&self) -> u64 {
        self.counts[2][0]
    }
    pub fn efu(&self) -> u64 {
        self.counts[2][1]
    }
    pub fn utu(&self) -> u64 {
        self.counts[2][2]
    }
}

pub fn confusion(predicted: &ScalarGrid, reference: &ScalarGrid) -> Result<ConfusionMatrix3> {
    same_spec(predicted, reference)?;
    let mut m = ConfusionMatrix3::default();
    for (p, a) in predicted.values().iter().zip(reference.values()) {
        m.counts[CellClass::of(*p) as usize][CellClass::of(*a) as usize] += 1;
    }
    Ok(m)
}

/// A ratio whose denominator may have been zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratio {
    pub value: f64,
    /// Set when the denominator was zero; `value` is then 0.
    pub vacuous: bool,
}

impl Ratio {
    pub fn of(num: u64, den: u64) -> Self {
        if den == 0 {
            Ratio { value: 0.0, vacuous: true }
        } else {
            Ratio {
                value: num as f64 / den as f64,
                vacuous: false,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionRecall {
    pub p_o: Ratio,
    pub r_o: Ratio,
    pub p_e: Ratio,
    pub r_e: Ratio,
}

pub fn precision_recall(m: &ConfusionMatrix3) -> PrecisionRecall {
    PrecisionRecall {
        p_o: Ratio::of(m.oto(), m.oto() + m.efo() + m.ufo()),
        r_o: Ratio::of(m.oto(), m.oto() + m.ofe() + m.ofu()),
        p_e: Ratio::of(m.ete(), m.ete() + m.ofe() + m.ufe()),
        r_e: Ratio::of(m.ete(), m.efo() + m.ete() + m.efu()),
    }
}

/// Weighted harmonic mean `(1+β) / (1/P + β/R)`; recall weighs β times precision.
pub fn f_measure(precision: f64, recall: f64, beta: f64) -> f64 {
    let den = recall + beta * precision;
    if precision <= 0.0 || recall <= 0.0 || den <= 0.0 {
        0.0
    } else {
        (1.0 + beta) * precision * recall / den
    }
}

/// Total combined rate: mean of the obstacle and empty F-measures.
pub fn tcr(f_o: f64, f_e: f64) -> f64 {
    (f_o + f_e) / 2.0
}

pub fn mae(reference: &ScalarGrid, obtained: &ScalarGrid) -> Result<f64> {
    same_spec(reference, obtained)?;
    let n = reference.values().len() as f64;
    let total: f64 = reference
        .values()
        .iter()
        .zip(obtained.values())
        .map(|(r, o)| (r - o).abs())
        .sum();
    Ok(total / n)
}

pub const F_BETA: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub alpha: f64,
    pub matrix: ConfusionMatrix3,
    pub p_o: Ratio,
    pub r_o: Ratio,
    pub f_o: f64,
    pub p_e: Ratio,
    pub r_e: Ratio,
    pub f_e: f64,
    pub tcr: f64,
    pub mae: f64,
}

pub fn evaluate(signed: &ScalarGrid, reference: &ScalarGrid, alpha: f64) -> Result<EvalReport> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::invalid("alpha", format!("{alpha} not in (0, 1)")));
    }
    let matrix = confusion(&discretize(signed, alpha), reference)?;
    let pr = precision_recall(&matrix);
    let f_o = f_measure(pr.p_o.value, pr.r_o.value, F_BETA);
    let f_e = f_measure(pr.p_e.value, pr.r_e.value, F_BETA);
    Ok(EvalReport {
        alpha,
        matrix,
        p_o: pr.p_o,
        r_o: pr.r_o,
        f_o,
        p_e: pr.p_e,
        r_e: pr.r_e,
        f_e,
        tcr: tcr(f_o, f_e),
        mae: mae(reference, signed)?,
    })
}

/// `count` evenly spaced cut levels strictly inside (0, 1).
pub fn sweep_alphas(count: usize) -> Vec<f64> {
    (1..=count).map(|i| i as f64 / (count + 1) as f64).collect()
}

pub fn tcr_sweep(signed: &ScalarGrid, reference: &ScalarGrid, alphas: &[f64]) -> Result<Vec<(f64, f64)>> {
    alphas
        .iter()
        .map(|&a| evaluate(signed, reference, a).map(|r| (a, r.tcr)))
        .collect()
}

pub const REPORT_CSV_HEADER: &str = "environment,method,alpha,P_O,R_O,F_O,P_E,R_E,F_E,TCR,MAE";

impl EvalReport {
    pub fn vacuous_flags(&self) -> Vec<&'static str> {
        [("P_O", self.p_o), ("R_O", self.r_o), ("P_E", self.p_e), ("R_E", self.r_e)]
            .into_iter()
            .filter(|(_, r)| r.vacuous)
            .map(|(n, _)| n)
            .collect()
    }

    /// Flat `key=value` record, one pair per line.
    pub fn to_key_value(&self) -> String {
        let m = &self.matrix;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        kv("alpha", fmt6(self.alpha));
        for (name, v) in [
            ("oto", m.oto()),
            ("efo", m.efo()),
            ("ufo", m.ufo()),
            ("ofe", m.ofe()),
            ("ete", m.ete()),
            ("ufe", m.ufe()),
            ("ofu", m.ofu()),
            ("efu", m.efu()),
            ("utu", m.utu()),
        ] {
            kv(name, v.to_string());
        }
        kv("P_O", fmt6(self.p_o.value));
        kv("R_O", fmt6(self.r_o.value));
        kv("F_O", fmt6(self.f_o));
        kv("P_E", fmt6(self.p_e.value));
        kv("R_E", fmt6(self.r_e.value));
        kv("F_E", fmt6(self.f_e));
        kv("TCR", fmt6(self.tcr));
        kv("MAE", fmt6(self.mae));
        kv("vacuous", self.vacuous_flags().join(";"));
        s
    }

    pub fn to_csv_row(&self, environment: &str, method: &str) -> String {
        format!(
            "{environment},{method},{},{},{},{},{},{},{},{},{}",
            fmt6(self.alpha),
            fmt6(self.p_o.value),
            fmt6(self.r_o.value),
            fmt6(self.f_o),
            fmt6(self.p_e.value),
            fmt6(self.r_e.value),
            fmt6(self.f_e),
            fmt6(self.tcr),
            fmt6(self.mae),
        )
    }
}

fn fmt6(v: f64) -> String {
    format!("{v:.6}")
}

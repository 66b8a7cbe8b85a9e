//! Webs of curves in coordinate gauge.
//!
//! A `d`-web in `n` dimensions is stored as `d` vector fields `V_1..V_d`, each given by
//! its `n` components in the coordinate frame. The first `n` fields are the coordinate
//! fields and every other field has last component `1`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::parse_rational;
use crate::scalar::{RationalFunction, VariableContext};

/// On-disk description of a web: components of `V_a` for `a = n+1..d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WebFile {
    pub n: usize,
    pub d: usize,
    #[serde(default)]
    pub parameters: Vec<String>,
    pub fields: Vec<FieldEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldEntry {
    pub a: usize,
    pub components: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct WebSpec {
    n: usize,
    d: usize,
    ctx: Arc<VariableContext>,
    /// `fields[λ][i]`, both 0-based.
    fields: Vec<Vec<RationalFunction>>,
}

impl WebSpec {
    /// Normalizes raw fields `V_{n+1}..V_d` (each a list of `n` components) so that
    /// their last component is `1`, and prepends the coordinate fields.
    pub fn new(ctx: &Arc<VariableContext>, raw: Vec<Vec<RationalFunction>>) -> Result<Self> {
        let n = ctx.n();
        let d = n + raw.len();
        if raw.is_empty() {
            return Err(Error::InvalidInput("a web needs more fields than coordinates".into()));
        }
        let mut fields = Vec::with_capacity(d);
        for k in 0..n {
            fields.push(
                (0..n)
                    .map(|i| if i == k { RationalFunction::one(ctx) } else { RationalFunction::zero(ctx) })
                    .collect(),
            );
        }
        for (off, col) in raw.into_iter().enumerate() {
            let a = n + off + 1;
            if col.len() != n {
                return Err(Error::InvalidInput(format!("field {a} has {} components, expected {n}", col.len())));
            }
            if col.iter().any(|f| **f.ctx() != **ctx) {
                return Err(Error::BackendMismatch);
            }
            let last = col[n - 1].clone();
            if last.is_zero() {
                return Err(Error::DegenerateField(format!("component {n} of field {a} vanishes identically")));
            }
            let mut out = Vec::with_capacity(n);
            for (i, f) in col.iter().enumerate() {
                let g = f.try_div(&last)?;
                if g.is_zero() {
                    return Err(Error::DegenerateField(format!(
                        "component {} of field {a} vanishes identically",
                        i + 1
                    )));
                }
                out.push(g);
            }
            fields.push(out);
        }
        Ok(WebSpec { n, d, ctx: ctx.clone(), fields })
    }

    pub fn from_file(file: &WebFile) -> Result<Self> {
        if file.d <= file.n {
            return Err(Error::InvalidInput(format!("need d > n, got n = {}, d = {}", file.n, file.d)));
        }
        let params: Vec<&str> = file.parameters.iter().map(String::as_str).collect();
        let ctx = VariableContext::standard(file.n, &params)?;
        let mut raw = Vec::with_capacity(file.d - file.n);
        for a in file.n + 1..=file.d {
            let mut entries = file.fields.iter().filter(|e| e.a == a);
            let entry = entries.next().ok_or_else(|| Error::InvalidInput(format!("missing field a = {a}")))?;
            if entries.next().is_some() {
                return Err(Error::InvalidInput(format!("field a = {a} given twice")));
            }
            raw.push(entry.components.iter().map(|s| parse_rational(s, &ctx)).collect::<Result<Vec<_>>>()?);
        }
        if let Some(e) = file.fields.iter().find(|e| e.a <= file.n || e.a > file.d) {
            return Err(Error::InvalidInput(format!("field index a = {} out of range", e.a)));
        }
        WebSpec::new(&ctx, raw)
    }

    pub fn to_file(&self) -> WebFile {
        WebFile {
            n: self.n,
            d: self.d,
            parameters: self.ctx.parameters().to_vec(),
            fields: (self.n..self.d)
                .map(|l| FieldEntry { a: l + 1, components: self.fields[l].iter().map(|f| f.render()).collect() })
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn h0(&self) -> usize {
        self.d - self.n
    }

    pub fn ctx(&self) -> &Arc<VariableContext> {
        &self.ctx
    }

    /// Component `f_{i,λ}` (0-based `i` and `λ`).
    pub fn f(&self, i: usize, lambda: usize) -> &RationalFunction {
        &self.fields[lambda][i]
    }

    pub fn field(&self, lambda: usize) -> &[RationalFunction] {
        &self.fields[lambda]
    }

    /// Derivative of `g` along `V_λ` (0-based `λ`).
    pub fn directional(&self, lambda: usize, g: &RationalFunction) -> Result<RationalFunction> {
        let mut acc = RationalFunction::zero(&self.ctx);
        for i in 0..self.n {
            acc = acc.try_add(&self.fields[lambda][i].try_mul(&g.partial(i)?)?)?;
        }
        Ok(acc)
    }

    /// Keeps the fields listed (1-based); every coordinate field must stay.
    pub fn subweb(&self, keep: &[usize]) -> Result<Self> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.iter().any(|&l| l == 0 || l > self.d) {
            return Err(Error::BadSubset(format!("indices must lie in 1..={}", self.d)));
        }
        if (1..=self.n).any(|i| !keep.contains(&i)) {
            return Err(Error::BadSubset("a coordinate field was dropped".into()));
        }
        if keep.len() <= self.n {
            return Err(Error::BadSubset("no non-coordinate field kept".into()));
        }
        let fields: Vec<Vec<RationalFunction>> = keep.iter().map(|&l| self.fields[l - 1].clone()).collect();
        Ok(WebSpec { n: self.n, d: keep.len(), ctx: self.ctx.clone(), fields })
    }

    /// Fixes a parameter to a value and drops it from the context.
    pub fn specialize(&self, parameter: &str, value: &BigRational) -> Result<Self> {
        let v = self.ctx.parameter_index(parameter).ok_or_else(|| Error::UnknownIdentifier(parameter.into()))?;
        let params: Vec<String> = self.ctx.parameters().iter().filter(|p| *p != parameter).cloned().collect();
        let ctx = VariableContext::new(self.ctx.coordinates().to_vec(), params)?;
        let fields = self
            .fields
            .iter()
            .map(|col| col.iter().map(|f| f.substitute(v, value)?.embed(&ctx)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let w = WebSpec { n: self.n, d: self.d, ctx, fields };
        for l in self.n..self.d {
            if let Some(i) = (0..self.n).find(|&i| w.fields[l][i].is_zero()) {
                return Err(Error::DegenerateField(format!("component {} of field {} vanishes", i + 1, l + 1)));
            }
        }
        Ok(w)
    }

    /// True when both webs have the same fields over equal contexts.
    pub fn same_fields(&self, o: &WebSpec) -> bool {
        self.n == o.n && self.d == o.d && *self.ctx == *o.ctx && self.fields == o.fields
    }

    /// Checks that no input denominator vanishes at the point, that no component
    /// `f_{i,a}` vanishes there, and that any `n` of the `d` fields are independent.
    pub fn genericity_check(&self, point: &[BigRational]) -> GenericityReport {
        let mut report = GenericityReport::default();
        let mut values = vec![vec![BigRational::zero(); self.n]; self.d];
        for (l, col) in self.fields.iter().enumerate() {
            for (i, f) in col.iter().enumerate() {
                match f.eval(point) {
                    Ok(v) => {
                        if l >= self.n && v.is_zero() {
                            report.violations.push(format!("f({},{}) vanishes", i + 1, l + 1));
                        }
                        values[l][i] = v;
                    }
                    Err(_) => {
                        report.singular = true;
                        report.violations.push(format!("f({},{}) has a pole", i + 1, l + 1));
                    }
                }
            }
        }
        if report.singular {
            return report;
        }
        for subset in combinations(self.d, self.n) {
            let m: Vec<Vec<BigRational>> = subset.iter().map(|&l| values[l].clone()).collect();
            if determinant(m).is_zero() {
                let names: Vec<String> = subset.iter().map(|l| format!("V{}", l + 1)).collect();
                report.violations.push(format!("{} are dependent", names.join(",")));
            }
        }
        report
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenericityReport {
    /// Some input denominator vanishes at the point.
    pub singular: bool,
    pub violations: Vec<String>,
}

impl GenericityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// All increasing `k`-subsets of `0..n`.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c].clone();
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone() / m[c][c].clone();
            for j in c..n {
                let t = f.clone() * m[c][j].clone();
                m[i][j] -= t;
            }
        }
    }
    det
}

/// Description of the exceptional `(n+3)`-web `W_{0,n+3}`, optionally deformed by
/// replacing `x_i/x_n` with `(x_i+c)/(x_n+c)`.
pub fn builtin_w0_file(n: usize, deform: Option<&str>) -> Result<WebFile> {
    if n < 2 {
        return Err(Error::InvalidInput("W0 needs n >= 2".into()));
    }
    let xn = format!("x{n}");
    let component = |i: usize, a: usize| -> String {
        if i == n {
            return "1".into();
        }
        let xi = format!("x{i}");
        match (a, deform) {
            (0, None) => format!("{xi}/{xn}"),
            (0, Some(c)) => format!("({xi}+{c})/({xn}+{c})"),
            (1, _) => format!("({xi}-1)/({xn}-1)"),
            _ => format!("{xi}*({xi}-1)/({xn}*({xn}-1))"),
        }
    };
    Ok(WebFile {
        n,
        d: n + 3,
        // A numeric deformation is baked into the components; a name becomes a parameter.
        parameters: deform
            .filter(|c| c.starts_with(|ch: char| ch.is_ascii_alphabetic()))
            .map(|c| vec![c.to_string()])
            .unwrap_or_default(),
        fields: (0..3)
            .map(|a| FieldEntry { a: n + 1 + a, components: (1..=n).map(|i| component(i, a)).collect() })
            .collect(),
    })
}

pub fn builtin_w0(n: usize, deform: Option<&str>) -> Result<WebSpec> {
    WebSpec::from_file(&builtin_w0_file(n, deform)?)
}

/// A sample point: one value per coordinate, then per parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSample {
    pub values: Vec<BigRational>,
    pub seed: u64,
    /// 1-based draw number within the seed's stream.
    pub draw: usize,
}

pub const MAX_SAMPLE_TRIES: usize = 100;

/// Deterministic stream of random points with small rational entries
/// (numerators and denominators bounded by 97) that pass the genericity check.
pub struct PointSampler<'a> {
    web: &'a WebSpec,
    rng: ChaCha8Rng,
    seed: u64,
    draw: usize,
}

impl<'a> PointSampler<'a> {
    pub fn new(web: &'a WebSpec, seed: u64) -> Self {
        PointSampler { web, rng: ChaCha8Rng::seed_from_u64(seed), seed, draw: 0 }
    }

    /// Next generic point; gives up after [`MAX_SAMPLE_TRIES`] rejected draws.
    pub fn next_generic(&mut self) -> Result<PointSample> {
        for _ in 0..MAX_SAMPLE_TRIES {
            self.draw += 1;
            let values: Vec<BigRational> = (0..self.web.ctx.nvars())
                .map(|_| {
                    let num: i64 = self.rng.gen_range(-97..=97);
                    let den: i64 = self.rng.gen_range(1..=97);
                    BigRational::new(BigInt::from(num), BigInt::from(den))
                })
                .collect();
            if values.iter().any(|v| v.is_zero()) {
                continue;
            }
            if self.web.genericity_check(&values).passed() {
                return Ok(PointSample { values, seed: self.seed, draw: self.draw });
            }
        }
        Err(Error::SingularPoint)
    }
}

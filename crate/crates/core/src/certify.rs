//! Maximal-rank verdicts: exact (symbolic curvature) or at sampled points (jets over
//! a prime field), and the serializable curvature report.

use num_rational::BigRational;
use serde::Serialize;

use crate::connection::{build_connection, ConnectionData};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Field, Jet, JetBackend, RationalFunction, Symbolic};
use crate::web::{PointSampler, WebSpec, MAX_SAMPLE_TRIES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    FlatCertified,
    FlatAtSampledPoints,
    NotFlat,
}

/// A nonzero curvature entry, 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub k: usize,
    pub m: usize,
    pub row: usize,
    pub col: usize,
    /// Index into `samples` for point verdicts.
    pub sample: Option<usize>,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleRecord {
    pub seed: u64,
    pub draw: usize,
    pub point: Vec<String>,
    pub jet_order: usize,
}

/// One curvature matrix `Ko(k,m)`, `k < m`, 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurvatureMatrix {
    pub k: usize,
    pub m: usize,
    /// One string per row; character `j` is `1` when entry `j` is nonzero
    /// (at some sample, in point mode).
    pub zero_mask: Vec<String>,
    /// Symbolic mode: rendered entries. Point mode: one matrix of values per sample.
    pub entries: Vec<Vec<Vec<String>>>,
}

impl CurvatureMatrix {
    pub fn is_nonzero(&self, row: usize, col: usize) -> bool {
        self.zero_mask[row].as_bytes()[col] == b'1'
    }

    /// 1-based rows holding a nonzero entry.
    pub fn nonzero_rows(&self) -> Vec<usize> {
        (0..self.zero_mask.len()).filter(|&i| self.zero_mask[i].contains('1')).map(|i| i + 1).collect()
    }

    /// 1-based columns holding a nonzero entry.
    pub fn nonzero_cols(&self) -> Vec<usize> {
        let width = self.zero_mask.first().map_or(0, |r| r.len());
        (0..width).filter(|&j| (0..self.zero_mask.len()).any(|i| self.is_nonzero(i, j))).map(|j| j + 1).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurvatureReport {
    pub n: usize,
    pub d: usize,
    pub ro: usize,
    pub pivots: Vec<usize>,
    pub backend: String,
    pub prime: Option<u64>,
    pub samples: Vec<SampleRecord>,
    pub matrices: Vec<CurvatureMatrix>,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
}

fn mask(nonzero: impl Fn(usize, usize) -> bool, rows: usize, cols: usize) -> Vec<String> {
    (0..rows).map(|i| (0..cols).map(|j| if nonzero(i, j) { '1' } else { '0' }).collect()).collect()
}

/// Exact curvature of the symbolic connection.
pub fn curvature_report_symbolic(cd: &ConnectionData<RationalFunction>) -> Result<CurvatureReport> {
    let ro = cd.ro();
    let mut matrices = Vec::new();
    let mut witnesses = Vec::new();
    for ((k, m), ko) in cd.curvatures()? {
        for i in 0..ro {
            for j in 0..ro {
                if !ko.get(i, j).is_zero() && witnesses.is_empty() {
                    witnesses.push(Witness {
                        k: k + 1,
                        m: m + 1,
                        row: i + 1,
                        col: j + 1,
                        sample: None,
                        value: ko.get(i, j).render(),
                    });
                }
            }
        }
        matrices.push(CurvatureMatrix {
            k: k + 1,
            m: m + 1,
            zero_mask: mask(|i, j| !ko.get(i, j).is_zero(), ro, ro),
            entries: vec![ko.render()],
        });
    }
    let verdict = if witnesses.is_empty() { Verdict::FlatCertified } else { Verdict::NotFlat };
    Ok(CurvatureReport {
        n: cd.n(),
        d: cd.d(),
        ro,
        pivots: cd.pivots(),
        backend: "symbolic".into(),
        prime: None,
        samples: Vec::new(),
        matrices,
        verdict,
        witnesses,
    })
}

pub fn check_max_rank_symbolic(w: &WebSpec) -> Result<CurvatureReport> {
    curvature_report_symbolic(&build_connection(w, &Symbolic)?)
}

/// Curvature matrices of one point evaluation, as values at the point.
pub struct PointCurvature<C> {
    pub sample: SampleRecord,
    pub ro: usize,
    pub pivots: Vec<usize>,
    /// `((k, m), values)` with 0-based `k < m`.
    pub matrices: Vec<((usize, usize), Vec<Vec<C>>)>,
}

fn values<C: Field>(m: &Matrix<Jet<C>>) -> Vec<Vec<C>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).value().clone()).collect()).collect()
}

fn retryable(e: &Error) -> bool {
    matches!(e, Error::SingularPoint | Error::BadPivots | Error::SingularMatrix | Error::DivisionByZero)
}

/// Draws generic points from the seed's stream until the whole pipeline runs
/// without hitting a singularity, then returns the curvature values there.
pub fn point_curvature<C: Field>(w: &WebSpec, seed: u64) -> Result<PointCurvature<C>> {
    let mut sampler = PointSampler::new(w, seed);
    let h0 = w.h0();
    for _ in 0..MAX_SAMPLE_TRIES {
        let point = sampler.next_generic()?;
        let mut order = h0 + 1;
        let result = loop {
            let attempt = (|| -> Result<PointCurvature<C>> {
                let backend = JetBackend::<C>::new(w.ctx(), &point.values, order)?;
                let cd = build_connection(w, &backend)?;
                let matrices = cd.curvatures()?.into_iter().map(|(km, ko)| (km, values(&ko))).collect();
                Ok(PointCurvature {
                    sample: SampleRecord {
                        seed,
                        draw: point.draw,
                        point: point.values.iter().map(|v| v.to_string()).collect(),
                        jet_order: order,
                    },
                    ro: cd.ro(),
                    pivots: cd.pivots(),
                    matrices,
                })
            })();
            match attempt {
                Err(Error::JetOrderExhausted) if order < h0 + 3 => order += 1,
                other => break other,
            }
        };
        match result {
            Err(e) if retryable(&e) => continue,
            other => return other,
        }
    }
    Err(Error::SingularPoint)
}

/// Verdict from `samples` independent points (seeds `seed, seed+1, ...`) over `C`.
pub fn check_max_rank_points<C: Field>(
    w: &WebSpec,
    samples: usize,
    seed: u64,
    prime: Option<u64>,
) -> Result<CurvatureReport> {
    if samples == 0 {
        return Err(Error::InvalidInput("at least one sample point is required".into()));
    }
    let runs: Vec<PointCurvature<C>> =
        (0..samples as u64).map(|i| point_curvature::<C>(w, seed.wrapping_add(i))).collect::<Result<_>>()?;
    let ro = runs[0].ro;
    let mut matrices = Vec::new();
    let mut witnesses = Vec::new();
    for (idx, &((k, m), _)) in runs[0].matrices.iter().enumerate() {
        let nonzero = |i: usize, j: usize| runs.iter().any(|r| !r.matrices[idx].1[i][j].is_zero());
        for i in 0..ro {
            for j in 0..ro {
                if witnesses.is_empty() {
                    if let Some(s) = runs.iter().position(|r| !r.matrices[idx].1[i][j].is_zero()) {
                        witnesses.push(Witness {
                            k: k + 1,
                            m: m + 1,
                            row: i + 1,
                            col: j + 1,
                            sample: Some(s),
                            value: runs[s].matrices[idx].1[i][j].to_string(),
                        });
                    }
                }
            }
        }
        matrices.push(CurvatureMatrix {
            k: k + 1,
            m: m + 1,
            zero_mask: mask(nonzero, ro, ro),
            entries: runs
                .iter()
                .map(|r| r.matrices[idx].1.iter().map(|row| row.iter().map(|v| v.to_string()).collect()).collect())
                .collect(),
        });
    }
    let verdict = if witnesses.is_empty() { Verdict::FlatAtSampledPoints } else { Verdict::NotFlat };
    Ok(CurvatureReport {
        n: w.n(),
        d: w.d(),
        ro,
        pivots: runs[0].pivots.clone(),
        backend: "point".into(),
        prime,
        samples: runs.into_iter().map(|r| r.sample).collect(),
        matrices,
        verdict,
        witnesses,
    })
}

/// Exact values at a rational point, for cross-checks against the symbolic pipeline.
pub fn rational_point_curvature(w: &WebSpec, seed: u64) -> Result<PointCurvature<BigRational>> {
    point_curvature::<BigRational>(w, seed)
}

//! Čech cochains on a nerve and the coboundary operator.
//!
//! Cochains store one value per increasing index tuple. Values on permuted tuples are
//! read through [`Cochain::signed_index`], which applies the sign of the permutation;
//! tuples with a repeated index read as zero.

use std::sync::{Arc, OnceLock};

use crate::cover::CoefficientTag;
use crate::error::{Error, Result};
use crate::forms::CovectorFn;
use crate::geometry::{lattice_spacing, Arc as GeoArc, SpherePoint, Vec3};
use crate::nerve::{face, Nerve};
use crate::quadrature::fixed_line;
use crate::sampling::{PointIndex, LINK_FACTOR};
use crate::snf::IntMatrix;

/// A function on an overlap, known at the overlap's lattice samples.
#[derive(Clone)]
pub struct SampledFunction {
    /// One value per sample of the owning simplex, in sample order.
    pub values: Vec<f64>,
    /// Exact differential, when the function was produced by integrating one.
    pub differential: Option<CovectorFn>,
    index: Arc<OnceLock<PointIndex>>,
}

impl std::fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SampledFunction")
            .field("samples", &self.values.len())
            .field("differential", &self.differential.is_some())
            .finish()
    }
}

impl SampledFunction {
    pub fn new(values: Vec<f64>, differential: Option<CovectorFn>) -> Self {
        Self {
            values,
            differential,
            index: Arc::new(OnceLock::new()),
        }
    }

    pub fn constant(len: usize, value: f64) -> Self {
        let zero: CovectorFn = Arc::new(|_: &Vec3| Vec3::zeros());
        Self::new(vec![value; len], Some(zero))
    }

    pub fn scaled(&self, k: f64) -> Self {
        let differential = self.differential.clone().map(|d| {
            let f: CovectorFn = Arc::new(move |x: &Vec3| d(x) * k);
            f
        });
        Self::new(self.values.iter().map(|v| v * k).collect(), differential)
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v + c).collect(),
            differential: self.differential.clone(),
            index: self.index.clone(),
        }
    }

    /// `(point, value)` pairs over the samples of simplex `(p, i)`.
    pub fn samples<'a>(
        &'a self,
        nerve: &'a Nerve,
        p: usize,
        i: usize,
    ) -> impl Iterator<Item = (SpherePoint, f64)> + 'a {
        nerve
            .samples(p, i)
            .ids
            .iter()
            .zip(&self.values)
            .map(|(&id, &v)| (SpherePoint::from_vec(&nerve.point(id)), v))
    }

    /// Value at an arbitrary point of the overlap: the nearest sample's value continued
    /// along the short arc to `x` by the differential.
    pub fn eval(&self, nerve: &Nerve, p: usize, i: usize, x: &Vec3) -> Result<f64> {
        let simplex = &nerve.simplices(p)[i];
        if !nerve.cover().contains_all(simplex, x) {
            return Err(Error::domain(format!(
                "point {:?} outside overlap {simplex:?}",
                SpherePoint::from_vec(x)
            )));
        }
        let radius = 2.0 * LINK_FACTOR * lattice_spacing(nerve.sample_count());
        let index = self.index.get_or_init(|| {
            let pts = nerve
                .samples(p, i)
                .ids
                .iter()
                .map(|&id| nerve.point(id))
                .collect();
            PointIndex::new(pts, radius)
        });
        let (k, _) = index.nearest(x, radius).ok_or_else(|| {
            Error::domain(format!(
                "no sample of overlap {simplex:?} near the query point"
            ))
        })?;
        let base = self.values[k as usize];
        match &self.differential {
            Some(d) => {
                let arc = GeoArc::new(index.points()[k as usize], *x);
                Ok(base + fixed_line(|t| d(&arc.point(t)).dot(&arc.velocity(t))))
            }
            None => Ok(base),
        }
    }
}

#[derive(Clone, Debug)]
pub enum CochainValues {
    Integer(Vec<i64>),
    Real(Vec<f64>),
    Samples(Vec<SampledFunction>),
}

impl CochainValues {
    pub fn len(&self) -> usize {
        match self {
            CochainValues::Integer(v) => v.len(),
            CochainValues::Real(v) => v.len(),
            CochainValues::Samples(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn tag(&self) -> CoefficientTag {
        match self {
            CochainValues::Integer(_) => CoefficientTag::Integer,
            CochainValues::Real(_) => CoefficientTag::Real,
            CochainValues::Samples(_) => CoefficientTag::FunctionSamples,
        }
    }
}

/// A degree-`p` cochain on a nerve, one value per `p`-simplex in nerve order.
#[derive(Clone, Debug)]
pub struct Cochain {
    degree: usize,
    values: CochainValues,
}

impl Cochain {
    pub fn new(nerve: &Nerve, degree: usize, values: CochainValues) -> Result<Self> {
        if degree > nerve.dimension() {
            return Err(Error::invalid(format!(
                "degree {degree} exceeds nerve dimension {}",
                nerve.dimension()
            )));
        }
        if values.len() != nerve.count(degree) {
            return Err(Error::invalid(format!(
                "{} values for {} simplices of degree {degree}",
                values.len(),
                nerve.count(degree)
            )));
        }
        if let CochainValues::Samples(fs) = &values {
            for (i, f) in fs.iter().enumerate() {
                if f.values.len() != nerve.samples(degree, i).len() {
                    return Err(Error::invalid(format!(
                        "sampled function on {:?} has {} values for {} samples",
                        nerve.simplices(degree)[i],
                        f.values.len(),
                        nerve.samples(degree, i).len()
                    )));
                }
            }
        }
        Ok(Self { degree, values })
    }

    pub fn zero(nerve: &Nerve, degree: usize, tag: CoefficientTag) -> Result<Self> {
        let n = nerve.count(degree);
        let values = match tag {
            CoefficientTag::Integer => CochainValues::Integer(vec![0; n]),
            CoefficientTag::Real => CochainValues::Real(vec![0.0; n]),
            CoefficientTag::FunctionSamples => CochainValues::Samples(
                (0..n)
                    .map(|i| SampledFunction::constant(nerve.samples(degree, i).len(), 0.0))
                    .collect(),
            ),
        };
        Self::new(nerve, degree, values)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn values(&self) -> &CochainValues {
        &self.values
    }

    pub fn coefficient_tag(&self) -> CoefficientTag {
        self.values.tag()
    }

    /// Sign and storage index for an arbitrary ordered tuple. The sign is 0 when the
    /// tuple repeats an index; `None` when the overlap is not in the nerve.
    pub fn signed_index(&self, nerve: &Nerve, tuple: &[usize]) -> Option<(i8, usize)> {
        if tuple.len() != self.degree + 1 {
            return None;
        }
        let mut sorted = tuple.to_vec();
        let sign = permutation_sign(&mut sorted);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Some((0, 0));
        }
        nerve.index_of(&sorted).map(|i| (sign, i))
    }

    pub fn integer_at(&self, nerve: &Nerve, tuple: &[usize]) -> Option<i64> {
        let (s, i) = self.signed_index(nerve, tuple)?;
        match &self.values {
            CochainValues::Integer(v) => Some(s as i64 * v[i]),
            _ => None,
        }
    }

    pub fn real_at(&self, nerve: &Nerve, tuple: &[usize]) -> Option<f64> {
        let (s, i) = self.signed_index(nerve, tuple)?;
        match &self.values {
            CochainValues::Integer(v) => Some(s as f64 * v[i] as f64),
            CochainValues::Real(v) => Some(s as f64 * v[i]),
            CochainValues::Samples(_) => None,
        }
    }
}

/// Sorts `v` in place and returns the sign of the sorting permutation.
pub fn permutation_sign(v: &mut [usize]) -> i8 {
    let mut sign = 1i8;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    sign
}

/// `(δc)(α₀…α_{p+1}) = Σᵢ (−1)ⁱ c(α₀…α̂ᵢ…α_{p+1})`.
pub fn coboundary(c: &Cochain, nerve: &Nerve) -> Result<Cochain> {
    let p = c.degree;
    if p + 1 > nerve.dimension() {
        return Err(Error::invalid(format!(
            "coboundary of a degree-{p} cochain needs a nerve of dimension ≥ {}",
            p + 1
        )));
    }
    let faces: Vec<Vec<(i64, usize)>> = nerve
        .simplices(p + 1)
        .iter()
        .map(|s| {
            (0..s.len())
                .map(|k| {
                    let idx = nerve.index_of(&face(s, k)).expect("nerve is closed");
                    (if k % 2 == 0 { 1 } else { -1 }, idx)
                })
                .collect()
        })
        .collect();
    let values = match &c.values {
        CochainValues::Integer(v) => CochainValues::Integer(
            faces
                .iter()
                .map(|fs| {
                    fs.iter()
                        .try_fold(0i64, |acc, &(s, i)| acc.checked_add(s.checked_mul(v[i])?))
                })
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::invalid("integer overflow in coboundary"))?,
        ),
        CochainValues::Real(v) => CochainValues::Real(
            faces
                .iter()
                .map(|fs| fs.iter().map(|&(s, i)| s as f64 * v[i]).sum())
                .collect(),
        ),
        CochainValues::Samples(fs_vals) => CochainValues::Samples(
            faces
                .iter()
                .enumerate()
                .map(|(j, fs)| restrict_sum(nerve, p, j, fs, fs_vals))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    Cochain::new(nerve, p + 1, values)
}

/// Alternating sum of face functions re-evaluated at the samples of the finer simplex.
fn restrict_sum(
    nerve: &Nerve,
    p: usize,
    j: usize,
    faces: &[(i64, usize)],
    vals: &[SampledFunction],
) -> Result<SampledFunction> {
    let target = nerve.samples(p + 1, j);
    let mut out = vec![0.0; target.len()];
    for &(s, fi) in faces {
        let src = nerve.samples(p, fi);
        for (k, &id) in target.ids.iter().enumerate() {
            let pos = src.position(id).ok_or_else(|| {
                Error::Internal("finer overlap sample missing from a face".into())
            })?;
            out[k] += s as f64 * vals[fi].values[pos];
        }
    }
    let diffs: Option<Vec<(f64, CovectorFn)>> = faces
        .iter()
        .map(|&(s, fi)| vals[fi].differential.clone().map(|d| (s as f64, d)))
        .collect();
    let differential = diffs.map(|ds| {
        let f: CovectorFn =
            Arc::new(move |x: &Vec3| ds.iter().fold(Vec3::zeros(), |acc, (s, d)| acc + d(x) * *s));
        f
    });
    Ok(SampledFunction::new(out, differential))
}

/// Matrix of δ from degree `p` to `p + 1`: rows are `(p+1)`-simplices, columns `p`-simplices.
pub fn coboundary_matrix(nerve: &Nerve, p: usize) -> Result<IntMatrix> {
    if p >= nerve.dimension() {
        return Err(Error::invalid(format!(
            "no coboundary out of degree {p} on a nerve of dimension {}",
            nerve.dimension()
        )));
    }
    let mut m = IntMatrix::zeros(nerve.count(p + 1), nerve.count(p));
    for (r, s) in nerve.simplices(p + 1).iter().enumerate() {
        for k in 0..s.len() {
            let c = nerve.index_of(&face(s, k)).expect("nerve is closed");
            m.set(r, c, if k % 2 == 0 { 1 } else { -1 });
        }
    }
    Ok(m)
}

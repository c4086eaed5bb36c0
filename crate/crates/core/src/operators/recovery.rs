//! Recovery from point samples on interior cells.

use crate::field::ScalarField;
use crate::geometry::{interior_cells, Domain, Shift};
use crate::multiscale::{Scheme, SplineField};
use crate::polynomials::{indices, lagrange_basis, MultiIndex, Polynomial};
use crate::{Error, Result};

/// Sample points `x_{k,ν}^μ = 2^{-k}(ν + 𝔢/4 + μ/(2l))`, `ν ∈ 𝒩_k(D)`, `μ ∈ ℤ_{+l-1}^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub level: u32,
    pub l: u32,
    /// Interior shifts in lexicographic order.
    pub cells: Vec<Shift>,
    /// `μ ∈ ℤ_{+l-1}^d` in lexicographic order.
    pub lattice: Vec<MultiIndex>,
    /// Values ordered by `(ν, μ)`.
    pub values: Option<Vec<f64>>,
}

impl SampleSet {
    /// `n(k, D) = card ℤ_{+l-1}^d · card 𝒩_k(D)`.
    pub fn len(&self) -> usize {
        self.cells.len() * self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, cell: usize, mu: usize) -> Vec<f64> {
        sample_point(self.level, self.l, &self.cells[cell], &self.lattice[mu])
    }

    /// All points, ordered by `(ν, μ)`.
    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.cells.len())
            .flat_map(|c| (0..self.lattice.len()).map(move |m| (c, m)))
            .map(|(c, m)| self.point(c, m))
            .collect()
    }

    /// Record `f` at every sample point.
    pub fn sample(mut self, f: &(impl ScalarField + ?Sized)) -> Self {
        self.values = Some(self.points().iter().map(|x| f.value(x)).collect());
        self
    }

    pub fn with_values(mut self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.len() {
            return Err(Error::LatticeSize { expected: self.len(), found: values.len() });
        }
        self.values = Some(values);
        Ok(self)
    }
}

pub fn sample_point(k: u32, l: u32, nu: &[i64], mu: &[u32]) -> Vec<f64> {
    let h = (-(k as f64)).exp2();
    nu.iter()
        .zip(mu)
        .map(|(&v, &u)| h * (v as f64 + 0.25 + u as f64 / (2.0 * l as f64)))
        .collect()
}

pub fn sample_points(domain: &Domain, k: u32, l: u32) -> Result<SampleSet> {
    if l == 0 {
        return Err(Error::param("l", "must be at least 1"));
    }
    let cells = interior_cells(domain, k);
    if cells.is_empty() {
        return Err(Error::NoInteriorCells(k));
    }
    Ok(SampleSet {
        level: k,
        l,
        cells,
        lattice: indices(domain.dim(), l - 1).to_vec(),
        values: None,
    })
}

/// `R_{k,ν} t = Σ_μ t_μ π_μ^{l-1,d}(2l · 2^k (x - x_{k,ν}^0))` in global coordinates.
pub fn local_interpolant(k: u32, l: u32, nu: &[i64], values: &[f64]) -> Polynomial {
    let d = nu.len();
    let basis = lagrange_basis(d, l - 1);
    let mut q = Polynomial::zero(d).with_degree(l - 1);
    for (p, &t) in basis.iter().zip(values) {
        q = q.add(&p.scale(t));
    }
    let s = 2.0 * l as f64 * (k as f64).exp2();
    let x0 = sample_point(k, l, nu, &vec![0; d]);
    let shift: Vec<f64> = x0.iter().map(|v| -s * v).collect();
    q.affine_substitute(&shift, &vec![s; d])
}

/// `A ∘ φ(f)`: the spline field assembled from the sample values only.
pub fn recovery(samples: &SampleSet, scheme: &Scheme) -> Result<SplineField> {
    let values = samples.values.as_ref().ok_or(Error::MissingSamples)?;
    if scheme.l() != samples.l {
        return Err(Error::param("l", "sample lattice and scheme disagree on l"));
    }
    let data = scheme.level(samples.level)?;
    if data.interior.cells() != samples.cells.as_slice() {
        return Err(Error::param("samples", "sample cells differ from the interior cells of the scheme"));
    }
    let per = samples.lattice.len();
    let local: std::collections::HashMap<&Shift, Polynomial> = samples
        .cells
        .iter()
        .zip(values.chunks_exact(per))
        .map(|(nu, t)| (nu, local_interpolant(samples.level, samples.l, nu, t)))
        .collect();
    let mut field = SplineField::zeros(scheme.domain().dim(), samples.level, scheme.m(), scheme.degree(), &data.active);
    for (nu, src) in data.active.iter().zip(&data.nearest) {
        field.set(nu, &local[src])?;
    }
    Ok(field)
}

/// Largest `|(R_{k,ν} t)(x_{k,ν}^μ) - t_{ν,μ}|` over all samples.
pub fn interpolation_residual(samples: &SampleSet) -> Result<f64> {
    let values = samples.values.as_ref().ok_or(Error::MissingSamples)?;
    let per = samples.lattice.len();
    let mut worst: f64 = 0.0;
    for (c, (nu, t)) in samples.cells.iter().zip(values.chunks_exact(per)).enumerate() {
        let r = local_interpolant(samples.level, samples.l, nu, t);
        for (m, &tv) in t.iter().enumerate() {
            let x = samples.point(c, m);
            worst = worst.max((r.eval(&x)? - tv).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::functions::{Side, TestFunction};
    use crate::FnField;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn points_lie_in_their_cells() {
        let domain = Domain::ball(vec![0.5, 0.5], 0.5).unwrap();
        let s = sample_points(&domain, 4, 3).unwrap();
        assert_eq!(s.len(), 6 * s.cells.len());
        for (c, nu) in s.cells.iter().enumerate() {
            for m in 0..s.lattice.len() {
                let x = s.point(c, m);
                let (a, b) = crate::geometry::cell_box(4, nu);
                assert!(x.iter().zip(a.iter().zip(&b)).all(|(v, (lo, hi))| lo < v && v < hi));
                assert!(domain.contains(&x));
            }
        }
    }

    #[test]
    fn interpolation_identity_and_reproduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (domain, l) in [(Domain::unit_cube(1), 3), (Domain::unit_cube(2), 2), (Domain::l_shape(), 2)] {
            let d = domain.dim();
            let n = indices(d, l - 1).len();
            let p = Polynomial::from_coeffs(d, l - 1, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
            let scheme = Scheme::new(domain.clone(), l, l as usize).unwrap();
            let s = sample_points(&domain, 4, l).unwrap().sample(&p);
            assert!(interpolation_residual(&s).unwrap() < 1e-9);
            let a = recovery(&s, &scheme).unwrap();
            for _ in 0..200 {
                let (lo, hi) = domain.bbox();
                let x: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| rng.gen_range(*a..*b)).collect();
                if domain.contains(&x) {
                    assert!((a.eval(&x) - p.eval(&x).unwrap()).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn recovery_is_linear() {
        let domain = Domain::unit_cube(1);
        let scheme = Scheme::new(domain.clone(), 2, 2).unwrap();
        let f = TestFunction::cusp_1d(0.75, 0.5, Side::Right);
        let g = FnField::new(1, |x: &[f64]| (3.0 * x[0]).cos());
        let s = sample_points(&domain, 4, 2).unwrap();
        let af = recovery(&s.clone().sample(&f), &scheme).unwrap();
        let ag = recovery(&s.clone().sample(&g), &scheme).unwrap();
        let h = crate::field::Combination { a: 2.0, f: &f, b: -0.5, g: &g };
        let ah = recovery(&s.sample(&h), &scheme).unwrap();
        let lin = af.combine(2.0, &ag, -0.5).unwrap();
        assert!(ah.sub(&lin).unwrap().max_abs_coeff() < 1e-9);
    }

    #[test]
    fn missing_values_are_rejected() {
        let domain = Domain::unit_cube(1);
        let scheme = Scheme::new(domain.clone(), 2, 2).unwrap();
        let s = sample_points(&domain, 3, 2).unwrap();
        assert!(matches!(recovery(&s, &scheme), Err(Error::MissingSamples)));
        assert!(s.with_values(vec![0.0; 3]).is_err());
    }
}

//! Extension by the truncated series `E_{K⁰} f + Σ_κ 𝓔_κ f`.

use crate::field::ScalarField;
use crate::geometry::Domain;
use crate::multiscale::{Scheme, SplineField};
use crate::{Error, Result};

/// Base field, details and the evaluator for their sum on `ℝ^d`.
#[derive(Clone, Debug)]
pub struct ExtensionResult {
    pub k0: u32,
    pub base: SplineField,
    /// `𝓔_κ f` for `κ = K⁰+1 ..= k_max`.
    pub details: Vec<SplineField>,
}

impl ExtensionResult {
    pub fn k_max(&self) -> u32 {
        self.k0 + self.details.len() as u32
    }

    /// The partial sum up to `k_max`.
    pub fn truncated(&self, k_max: u32) -> ExtensionResult {
        let keep = k_max.saturating_sub(self.k0) as usize;
        ExtensionResult {
            k0: self.k0,
            base: self.base.clone(),
            details: self.details.iter().take(keep).cloned().collect(),
        }
    }

    /// Number of stored coefficients over all terms.
    pub fn coefficient_count(&self) -> usize {
        let per = crate::polynomials::card(self.base.dim(), self.base.degree());
        per * (self.base.len() + self.details.iter().map(SplineField::len).sum::<usize>())
    }

    /// The box containing the support: bounding box of `D` inflated by `(m+1) 2^{-K⁰}`.
    pub fn support_box(&self, domain: &Domain) -> (Vec<f64>, Vec<f64>) {
        let pad = (self.base.order() as f64 + 1.0) * (-(self.k0 as f64)).exp2();
        let (lo, hi) = domain.bbox();
        (lo.iter().map(|v| v - pad).collect(), hi.iter().map(|v| v + pad).collect())
    }

    /// All terms lifted to level `k_max` and summed; equals `E_{k_max} f` on `D`.
    pub fn collapse(&self, scheme: &Scheme) -> Result<SplineField> {
        let mut acc = self.base.clone();
        for det in &self.details {
            acc = scheme.refine(&acc)?.add(det)?;
        }
        Ok(acc)
    }
}

impl ScalarField for ExtensionResult {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.base.eval(x) + self.details.iter().map(|d| d.eval(x)).sum::<f64>()
    }

    fn derivative(&self, x: &[f64], lambda: &[u32]) -> Option<f64> {
        let mut v = self.base.eval_derivative(x, lambda).ok()?;
        for d in &self.details {
            v += d.eval_derivative(x, lambda).ok()?;
        }
        Some(v)
    }

    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        let mut cuts = self.base.breakpoints(axis);
        for d in &self.details {
            cuts.extend(d.breakpoints(axis));
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts
    }
}

/// First level `k` with a closed dyadic cell inside `D`.
pub fn first_interior_level(domain: &Domain, max_level: u32) -> Result<u32> {
    (0..=max_level)
        .find(|&k| !crate::geometry::interior_cells(domain, k).is_empty())
        .ok_or(Error::NoInteriorCells(max_level))
}

/// `E^{d,α,p,θ,D} f` truncated at `k_max`.
pub fn extend(f: &(impl ScalarField + ?Sized), scheme: &Scheme, k0: u32, k_max: u32) -> Result<ExtensionResult> {
    if k_max < k0 {
        return Err(Error::param("levels", "k_max must not be below K⁰"));
    }
    for k in k0..=k_max {
        scheme.level(k)?;
    }
    let base = scheme.quasi_interpolant(f, k0)?;
    let details = (k0 + 1..=k_max).map(|k| scheme.detail(f, k)).collect::<Result<Vec<_>>>()?;
    Ok(ExtensionResult { k0, base, details })
}

//! Real-valued functions on `ℝ^d` as consumed by projectors, norms and moduli.

/// A function `ℝ^d → ℝ`, optionally with exact partial derivatives.
pub trait ScalarField {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// `𝒟^λ f(x)` when available in closed form.
    fn derivative(&self, _x: &[f64], _lambda: &[u32]) -> Option<f64> {
        None
    }

    /// Coordinates along `axis` where the function may fail to be smooth.
    ///
    /// Quadrature splits integration cells at these coordinates.
    fn breakpoints(&self, _axis: usize) -> Vec<f64> {
        Vec::new()
    }

    /// Breakpoints near which the function is not Lipschitz.
    ///
    /// Moduli of smoothness grade their integration cells towards these.
    fn singularities(&self, _axis: usize) -> Vec<f64> {
        Vec::new()
    }
}

impl<T: ScalarField + ?Sized> ScalarField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn derivative(&self, x: &[f64], lambda: &[u32]) -> Option<f64> {
        (**self).derivative(x, lambda)
    }
    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        (**self).breakpoints(axis)
    }
    fn singularities(&self, axis: usize) -> Vec<f64> {
        (**self).singularities(axis)
    }
}

impl<T: ScalarField + ?Sized> ScalarField for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn derivative(&self, x: &[f64], lambda: &[u32]) -> Option<f64> {
        (**self).derivative(x, lambda)
    }
    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        (**self).breakpoints(axis)
    }
    fn singularities(&self, axis: usize) -> Vec<f64> {
        (**self).singularities(axis)
    }
}

/// Adapter turning a closure into a [`ScalarField`].
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64> FnField<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnField { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64> ScalarField for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

impl ScalarField for crate::Polynomial {
    fn dim(&self) -> usize {
        crate::Polynomial::dim(self)
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.eval_unchecked(x)
    }
    fn derivative(&self, x: &[f64], lambda: &[u32]) -> Option<f64> {
        Some(crate::Polynomial::derivative(self, lambda).eval_unchecked(x))
    }
}

/// `a f + b g`.
pub struct Combination<F, G> {
    pub a: f64,
    pub f: F,
    pub b: f64,
    pub g: G,
}

impl<F: ScalarField, G: ScalarField> ScalarField for Combination<F, G> {
    fn dim(&self) -> usize {
        self.f.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.a * self.f.value(x) + self.b * self.g.value(x)
    }
    fn derivative(&self, x: &[f64], lambda: &[u32]) -> Option<f64> {
        Some(self.a * self.f.derivative(x, lambda)? + self.b * self.g.derivative(x, lambda)?)
    }
    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        let mut v = self.f.breakpoints(axis);
        v.extend(self.g.breakpoints(axis));
        v
    }
    fn singularities(&self, axis: usize) -> Vec<f64> {
        let mut v = self.f.singularities(axis);
        v.extend(self.g.singularities(axis));
        v
    }
}

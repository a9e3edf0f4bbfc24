use super::observable::{Observable, RadialFn};
use crate::error::{Error, Result};
use crate::su11::C64;

/// Variable binned by the radial histogram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadialAxis {
    /// `s = |z|²` on `[0, 1]`; values above 1 land in the last bin.
    Disc,
    /// `(2/π) arctan s` on `[0, 1]`, for orbits that leave the disc.
    Sphere,
}

impl RadialAxis {
    pub fn coordinate(&self, s: f64) -> f64 {
        match self {
            RadialAxis::Disc => s,
            RadialAxis::Sphere => std::f64::consts::FRAC_2_PI * s.atan(),
        }
    }
}

/// What an orbit records beyond the log-norm sum.
#[derive(Clone, Debug, PartialEq)]
pub struct AccumulatorLayout {
    pub observables: Vec<Observable>,
    /// Radial functions whose second-order balance sums are recorded.
    pub balance: Vec<RadialFn>,
    pub bins: usize,
    pub axis: RadialAxis,
}

impl Default for AccumulatorLayout {
    fn default() -> Self {
        Self { observables: Vec::new(), balance: Vec::new(), bins: 100, axis: RadialAxis::Disc }
    }
}

/// Streaming Birkhoff sums of one orbit (or of several merged orbits).
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitAccumulator {
    pub layout: AccumulatorLayout,
    /// `Σ log‖T_n x_{n−1}‖` in nats.
    pub log_norm_sum: f64,
    /// `Σ z_n^j g(|z_n|²)`, one entry per observable.
    pub moments: Vec<C64>,
    /// Per balance function: `Σ s g′(s)` and `Σ (1 − s)²(g′(s) + s g″(s))`.
    pub balance_sums: Vec<[f64; 2]>,
    pub radial_counts: Vec<u64>,
    pub radius_sq_sum: f64,
    pub max_radius_sq: f64,
    /// `Σ 𝔼_σ log‖T_σ x_{n−1}‖`, when the Furstenberg integrand is recorded.
    pub furstenberg_sum: f64,
    pub count: u64,
}

impl OrbitAccumulator {
    pub fn new(layout: AccumulatorLayout) -> Result<Self> {
        if layout.bins == 0 {
            return Err(Error::InvalidArgument("histogram needs at least one bin".into()));
        }
        Ok(Self {
            moments: vec![C64::new(0.0, 0.0); layout.observables.len()],
            balance_sums: vec![[0.0; 2]; layout.balance.len()],
            radial_counts: vec![0; layout.bins],
            layout,
            log_norm_sum: 0.0,
            radius_sq_sum: 0.0,
            max_radius_sq: 0.0,
            furstenberg_sum: 0.0,
            count: 0,
        })
    }

    /// Records the retained state `z_n` with `s = |z_n|²`; `z` is `None` at ∞.
    pub fn record(&mut self, z: Option<C64>, s: f64) {
        self.count += 1;
        self.radius_sq_sum += s;
        if s > self.max_radius_sq {
            self.max_radius_sq = s;
        }
        let bins = self.layout.bins;
        let t = self.layout.axis.coordinate(s);
        let bin = ((t * bins as f64) as usize).min(bins - 1);
        self.radial_counts[bin] += 1;
        if let Some(z) = z {
            for (sum, o) in self.moments.iter_mut().zip(&self.layout.observables) {
                *sum += o.eval(z, s);
            }
        }
        for (sum, g) in self.balance_sums.iter_mut().zip(&self.layout.balance) {
            let d1 = g.d1(s);
            sum[0] += s * d1;
            sum[1] += (1.0 - s) * (1.0 - s) * (d1 + s * g.d2(s));
        }
    }

    /// Adds `other` into `self`; both must share a layout.
    pub fn merge(&mut self, other: &OrbitAccumulator) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::ObservableMismatch("accumulators have different layouts".into()));
        }
        self.log_norm_sum += other.log_norm_sum;
        for (a, b) in self.moments.iter_mut().zip(&other.moments) {
            *a += b;
        }
        for (a, b) in self.balance_sums.iter_mut().zip(&other.balance_sums) {
            a[0] += b[0];
            a[1] += b[1];
        }
        for (a, b) in self.radial_counts.iter_mut().zip(&other.radial_counts) {
            *a += b;
        }
        self.radius_sq_sum += other.radius_sq_sum;
        self.max_radius_sq = self.max_radius_sq.max(other.max_radius_sq);
        self.furstenberg_sum += other.furstenberg_sum;
        self.count += other.count;
        Ok(())
    }

    fn non_empty(&self) -> Result<f64> {
        if self.count == 0 {
            return Err(Error::EmptyAccumulator);
        }
        Ok(self.count as f64)
    }

    /// `logNormSum / count`.
    pub fn gamma(&self) -> Result<f64> {
        Ok(self.log_norm_sum / self.non_empty()?)
    }

    pub fn furstenberg_gamma(&self) -> Result<f64> {
        Ok(self.furstenberg_sum / self.non_empty()?)
    }

    /// Empirical `𝔼|z|²`.
    pub fn mean_radius_sq(&self) -> Result<f64> {
        Ok(self.radius_sq_sum / self.non_empty()?)
    }

    /// Birkhoff average of the configured observable.
    pub fn moment(&self, o: &Observable) -> Result<C64> {
        let n = self.non_empty()?;
        let i = self
            .layout
            .observables
            .iter()
            .position(|x| x == o)
            .ok_or_else(|| Error::ObservableMismatch(format!("observable z^{} {} not recorded", o.j, o.g)))?;
        Ok(self.moments[i] / n)
    }

    /// Averages `(s g′, (1 − s)²(g′ + s g″))` for a recorded balance function.
    pub fn balance_averages(&self, g: RadialFn) -> Result<(f64, f64)> {
        let n = self.non_empty()?;
        let i = self
            .layout
            .balance
            .iter()
            .position(|x| *x == g)
            .ok_or_else(|| Error::ObservableMismatch(format!("balance sums for {g} not recorded")))?;
        Ok((self.balance_sums[i][0] / n, self.balance_sums[i][1] / n))
    }

    /// Empirical CDF at the right edge of every bin.
    pub fn empirical_cdf(&self) -> Result<Vec<f64>> {
        let n = self.non_empty()?;
        let mut acc = 0u64;
        Ok(self
            .radial_counts
            .iter()
            .map(|&c| {
                acc += c;
                acc as f64 / n
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout() -> AccumulatorLayout {
        AccumulatorLayout {
            observables: vec![Observable::new(1, RadialFn::Monomial(0))],
            balance: vec![RadialFn::Monomial(1)],
            bins: 4,
            axis: RadialAxis::Disc,
        }
    }

    #[test]
    fn records_and_bins() {
        let mut a = OrbitAccumulator::new(layout()).unwrap();
        for s in [0.0f64, 0.1, 0.3, 0.99, 1.0, 1.0 + 1e-12] {
            a.record(Some(C64::new(s.sqrt(), 0.0)), s);
        }
        assert_eq!(a.radial_counts, vec![2, 1, 0, 3]);
        assert_eq!(a.count, 6);
        assert_eq!(a.radial_counts.iter().sum::<u64>(), a.count);
        let (lhs, rhs) = a.balance_averages(RadialFn::Monomial(1)).unwrap();
        assert!((lhs - a.mean_radius_sq().unwrap()).abs() < 1e-15);
        assert!(rhs > 0.0);
        assert!(a.balance_averages(RadialFn::Log1p).is_err());
        assert_eq!(a.empirical_cdf().unwrap().last().copied(), Some(1.0));
    }

    #[test]
    fn merge_is_exact_sum() {
        let mut a = OrbitAccumulator::new(layout()).unwrap();
        let mut b = OrbitAccumulator::new(layout()).unwrap();
        a.record(Some(C64::new(0.5, 0.0)), 0.25);
        a.log_norm_sum = 1.5;
        b.record(Some(C64::new(0.0, 0.9)), 0.81);
        b.log_norm_sum = 0.5;
        a.merge(&b).unwrap();
        assert_eq!(a.count, 2);
        assert_eq!(a.gamma().unwrap(), 1.0);
        assert_eq!(a.max_radius_sq, 0.81);
        assert_eq!(a.moment(&Observable::new(1, RadialFn::Monomial(0))).unwrap(), C64::new(0.25, 0.45));
        let other = OrbitAccumulator::new(AccumulatorLayout::default()).unwrap();
        assert!(a.merge(&other).is_err());
    }

    #[test]
    fn empty_accumulator_errors() {
        let a = OrbitAccumulator::new(layout()).unwrap();
        assert!(matches!(a.gamma(), Err(Error::EmptyAccumulator)));
        assert!(OrbitAccumulator::new(AccumulatorLayout { bins: 0, ..layout() }).is_err());
    }

    #[test]
    fn sphere_axis_covers_infinity() {
        let mut a = OrbitAccumulator::new(AccumulatorLayout { axis: RadialAxis::Sphere, ..layout() }).unwrap();
        a.record(None, f64::INFINITY);
        a.record(Some(C64::new(1.0, 0.0)), 1.0);
        assert_eq!(a.radial_counts, vec![0, 0, 1, 1]);
    }
}

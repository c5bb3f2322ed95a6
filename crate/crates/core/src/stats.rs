//! Sample moments with standard errors for the Monte Carlo checks.

/// A sample statistic and its estimated standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub value: f64,
    pub std_err: f64,
}

impl Moment {
    /// Distance to `target` in standard errors.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.value - target).abs();
        if self.std_err > 0.0 {
            diff / self.std_err
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn sample_mean(xs: &[f64]) -> Moment {
    let n = xs.len() as f64;
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    Moment {
        value: m,
        std_err: (var / n).sqrt(),
    }
}

/// Sample covariance; the standard error is that of the mean of the centred
/// products.
pub fn sample_covariance(xs: &[f64], ys: &[f64]) -> Moment {
    assert_eq!(xs.len(), ys.len(), "paired samples");
    let n = xs.len() as f64;
    let (mx, my) = (mean(xs), mean(ys));
    let products: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let pm = mean(&products);
    let spread = products.iter().map(|p| (p - pm) * (p - pm)).sum::<f64>() / (n - 1.0);
    Moment {
        value: pm * n / (n - 1.0),
        std_err: (spread / n).sqrt(),
    }
}

pub fn sample_correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let c = sample_covariance(xs, ys).value;
    let vx = sample_covariance(xs, xs).value;
    let vy = sample_covariance(ys, ys).value;
    c / (vx * vy).sqrt()
}

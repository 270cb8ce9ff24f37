//! Momentum grids and order-preserving maps over them.
//!
//! With the `parallel` feature [`map`] runs on the rayon pool; otherwise it
//! is [`map_sequential`]. Results always come back in input order.

use crate::error::{Error, Result};

/// `steps` equally spaced momenta from `k_min` to `k_max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KGrid {
    k_min: f64,
    k_max: f64,
    steps: usize,
}

impl KGrid {
    pub fn new(k_min: f64, k_max: f64, steps: usize) -> Result<Self> {
        if !(k_min.is_finite() && k_max.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if k_min <= 0.0 {
            return Err(Error::InvalidGrid(format!("k_min = {k_min} must be positive")));
        }
        if k_min >= k_max {
            return Err(Error::InvalidGrid(format!("k_min = {k_min} must be below k_max = {k_max}")));
        }
        if steps == 0 {
            return Err(Error::InvalidGrid("steps must be at least 1".into()));
        }
        Ok(Self { k_min, k_max, steps })
    }

    pub fn k_min(&self) -> f64 {
        self.k_min
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn points(&self) -> Vec<f64> {
        linspace(self.k_min, self.k_max, self.steps)
    }
}

pub fn linspace(start: f64, end: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let h = (end - start) / (steps - 1) as f64;
            (0..steps)
                .map(|i| if i + 1 == steps { end } else { start + h * i as f64 })
                .collect()
        }
    }
}

pub fn map_sequential<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_parallel<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    map_parallel(items, f)
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    map_sequential(items, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_and_validation() {
        let g = KGrid::new(0.5, 7.0, 14).unwrap().points();
        assert_eq!(g.len(), 14);
        assert_eq!((g[0], g[13]), (0.5, 7.0));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(KGrid::new(1.0, 2.0, 1).unwrap().points(), vec![1.0]);
        assert!(KGrid::new(0.0, 1.0, 5).is_err());
        assert!(KGrid::new(-1.0, 1.0, 5).is_err());
        assert!(KGrid::new(2.0, 1.0, 5).is_err());
        assert!(KGrid::new(1.0, 2.0, 0).is_err());
    }

    #[test]
    fn map_preserves_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let ys = map(&xs, |x| x * x);
        assert_eq!(ys, map_sequential(&xs, |x| x * x));
    }
}

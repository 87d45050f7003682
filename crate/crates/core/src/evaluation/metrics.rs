use crate::error::{validation, Result};
use crate::scalar::Real;

fn check_lengths<T>(y: &[T], yhat: &[T], min: usize) -> Result<()> {
    if y.len() != yhat.len() {
        return Err(validation!("{} labels but {} predictions", y.len(), yhat.len()));
    }
    if y.len() < min {
        return Err(validation!("need at least {min} values, got {}", y.len()));
    }
    Ok(())
}

/// Coefficient of determination `1 − SS_res / SS_tot`.
pub fn r2<T: Real>(y: &[T], yhat: &[T]) -> Result<T> {
    check_lengths(y, yhat, 2)?;
    let m = y.iter().copied().sum::<T>() / T::from_usize_lossy(y.len());
    let ss_tot: T = y.iter().map(|&v| (v - m) * (v - m)).sum();
    if !(ss_tot > T::zero()) {
        return Err(validation!("R² is undefined for a constant target"));
    }
    let ss_res: T = y.iter().zip(yhat).map(|(&a, &b)| (a - b) * (a - b)).sum();
    Ok(T::one() - ss_res / ss_tot)
}

/// Mean absolute error.
pub fn mae<T: Real>(y: &[T], yhat: &[T]) -> Result<T> {
    check_lengths(y, yhat, 1)?;
    Ok(y.iter().zip(yhat).map(|(&a, &b)| (a - b).abs()).sum::<T>() / T::from_usize_lossy(y.len()))
}

pub fn rmse<T: Real>(y: &[T], yhat: &[T]) -> Result<T> {
    check_lengths(y, yhat, 1)?;
    let s: T = y.iter().zip(yhat).map(|(&a, &b)| (a - b) * (a - b)).sum();
    Ok((s / T::from_usize_lossy(y.len())).sqrt())
}

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    (m, v.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        assert_eq!(r2(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(r2(&[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0]).unwrap(), 0.0);
        assert_eq!(r2(&[1.0, 2.0, 3.0], &[1.0, 2.0, 5.0]).unwrap(), -1.0);
        assert!(r2(&[4.0, 4.0], &[4.0, 4.0]).is_err());
        assert_eq!(mae(&[0.0, 0.0], &[1.0, -1.0]).unwrap(), 1.0);
        assert!((mae(&[100.0], &[153.55]).unwrap() - 53.55f64).abs() < 1e-12);
        assert!(mae(&[1.0], &[1.0, 2.0]).is_err());
        assert_eq!(mean_std(&[1.0, 3.0]), (2.0, 1.0));
    }
}

use crate::error::{Error, Result};

/// Largest order for which binomial coefficients are tabulated.
pub const MAX_ORDER: usize = 30;

/// Pascal triangle `C(n, l)` for `n <= n_max`, in exact integer arithmetic.
pub(crate) fn pascal(n_max: usize) -> Result<Vec<Vec<u64>>> {
    if n_max > MAX_ORDER {
        return Err(Error::Domain(format!(
            "order {n_max} exceeds the supported maximum {MAX_ORDER}"
        )));
    }
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut row = vec![1u64; n + 1];
        for l in 1..n {
            row[l] = rows[n - 1][l - 1] + rows[n - 1][l];
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_match_factorial_formula() {
        let p = pascal(30).unwrap();
        assert_eq!(p[4], vec![1, 4, 6, 4, 1]);
        assert_eq!(p[30][15], 155_117_520);
        assert!(pascal(31).is_err());
    }
}

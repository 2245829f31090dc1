//! Size and build-time growth of the reduction in the dimension `d`.

use std::time::{Duration, Instant};

use interlace_core::reduction::{reduce, ReductionParams, SizeReport, VbpInstance};
use interlace_core::Result;

#[derive(Clone, Debug)]
pub struct GrowthRow {
    pub d: usize,
    pub n: usize,
    pub sizes: SizeReport,
    /// `32·|R2|^4`, computed from the built M2 rather than from `sizes`.
    pub c4_from_m2: u128,
    pub build_time: Duration,
}

#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    /// Larger of the row and column exponents: both dimensions of M4 grow
    /// at most like `d^size_exponent`.
    pub size_exponent: f64,
    /// Fitted `e` in `|R4| ≈ c·d^e`.
    pub rows_exponent: f64,
    /// Fitted `e` in `|C4| ≈ c·d^e`.
    pub cols_exponent: f64,
    /// Fitted `e` in `|R4|·|C4| ≈ c·d^e`.
    pub cells_exponent: f64,
    pub time_exponent: f64,
}

/// Unit-vector instance with `d` coordinates, marked as preprocessed.
pub fn unit_instance(d: usize) -> VbpInstance {
    let vectors = (0..d).map(|i| (0..d).map(|j| i == j).collect()).collect();
    VbpInstance::new(d, 4, vectors)
        .and_then(VbpInstance::assume_processed)
        .expect("unit vectors are a valid instance")
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Builds the reduction for each `d` with the growth profile and a
/// `d`-vector instance, timing stages 1–2 and the implicit stages 3–4.
pub fn measure_growth(ds: &[usize]) -> Result<GrowthReport> {
    let mut rows = Vec::with_capacity(ds.len());
    for &d in ds {
        let params = ReductionParams::growth(d)?;
        let inst = unit_instance(d);
        let start = Instant::now();
        let out = reduce(&inst, &params)?;
        let build_time = start.elapsed();
        let r2 = out.stage2.matrix().n_rows() as u128;
        rows.push(GrowthRow {
            d,
            n: inst.n(),
            sizes: out.sizes(),
            c4_from_m2: 32 * r2.pow(4),
            build_time,
        });
    }
    let fit = |f: &dyn Fn(&GrowthRow) -> f64| {
        loglog_slope(&rows.iter().map(|r| (r.d as f64, f(r))).collect::<Vec<_>>())
    };
    let rows_exponent = fit(&|r| r.sizes.r4 as f64);
    let cols_exponent = fit(&|r| r.sizes.c4 as f64);
    Ok(GrowthReport {
        size_exponent: rows_exponent.max(cols_exponent),
        rows_exponent,
        cols_exponent,
        cells_exponent: fit(&|r| r.sizes.r4 as f64 * r.sizes.c4 as f64),
        time_exponent: fit(&|r| r.build_time.as_secs_f64().max(1e-6)),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [2.0, 4.0, 8.0]
            .iter()
            .map(|&x: &f64| (x, 3.0 * x.powi(5)))
            .collect();
        assert!((loglog_slope(&pts) - 5.0).abs() < 1e-9);
    }
}

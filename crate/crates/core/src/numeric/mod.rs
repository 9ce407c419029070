//! High-precision complex evaluation of the units and related checks.

mod eval;
mod real;

pub use eval::{
    act, conjugate_product_s_rho, eta, eval_expr, eval_series, eval_unit, klein, klein_transform_check, point,
    point_i, point_rho, ramanujan_r_at_i, ramanujan_s_at_rho, series_tail_bound, series_vs_product_check,
    working_bits, Descriptor, EvalJson, EvalResult, KleinReport, SeriesVsProduct,
};
pub use real::{Complex, Real};

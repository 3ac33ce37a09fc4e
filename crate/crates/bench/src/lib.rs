//! Shared inputs for the benchmarks.

use betaspace::laurent::parse_series;
use betaspace::level::{certify_contraction, AffineMap, ContractionCertificate};
use betaspace::{LaurentSeries, PrecisionBudget};

pub fn series(text: &str) -> LaurentSeries {
    parse_series(text).expect("benchmark inputs parse")
}

pub fn affine(a: &str, b: &str) -> ContractionCertificate {
    let map = AffineMap::scalar(series(a), series(b));
    certify_contraction(map, &PrecisionBudget::default()).expect("benchmark maps are contractions")
}

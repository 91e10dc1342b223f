VERSION='0.1.0'

from .distributions import ContinuousDist, SeededRng, dist_cdf, dist_sample, parse_dist
from .ecdf import EmpiricalCdf, TransformReport, build_ecdf, ecdf_eval, merge_partitions, transform_sample
from .errors import (
    DataFormatError,
    DataSourceError,
    EmptySampleError,
    InvalidDataError,
    InvalidInputError,
    KsDriftError,
)
from .kolmogorov import kolmogorov_cdf, kolmogorov_quantile
from .kstests import KsResult, ks_confidence_band, ks_one_sample, ks_transform_test, ks_two_sample

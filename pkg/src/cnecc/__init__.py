"""Convolutional network error correction coding.

GF(2)[z] transfer-matrix algebra, combined-error reference tables,
distributed-decodability analysis, sliding-window minimum-error-weight
decoding, and Monte-Carlo bit-error-rate experiments.
"""

from importlib import resources

from .convcode import (
    CodeMetrics,
    Generator,
    Trellis,
    code_metrics,
    encode,
    free_distance,
    is_catastrophic,
    t_dfree,
    weight_profile,
)
from .gf2poly import (
    BitMatrix,
    Gf2Poly,
    NotInvertibleError,
    PolyMatrix,
    TruncationExceededError,
    poly_gcd,
    poly_mul,
    polymat_mul,
    series_inverse,
    series_solve,
)
from .netmodel import (
    ConfigError,
    NetworkBundle,
    NetworkCode,
    NetworkSpec,
    NotFullRankError,
    SinkTransfer,
    ValidationError,
    ZeroCapacityError,
    load_network_json,
    load_transfer_direct,
    multicast_capacity,
    sink_transfer,
    validate_network,
)
from .reftable import (
    DecodabilityReport,
    ReferenceTable,
    SufficiencyReport,
    WindowSpace,
    analyze_sink,
    build_reference_table,
    check_distributed,
    combined_error,
    element_count_v0_nonzero,
    min_window_length,
    sufficiency_report,
    window_space,
)
from .wdecoder import (
    DecodeResult,
    DecoderConfig,
    UndecodableError,
    WindowDecoder,
    decode,
    expected_rx_length,
)
from .errorsim import (
    BerCell,
    BerReport,
    ErrorModelConfig,
    SinkSetup,
    derive_q,
    inject_errors,
    run_ber,
    sample_error,
    sink_setup,
    to_csv,
)
from .kernels import BACKEND, DecodePlan, available_backends, make_plan

__version__ = "0.1.0"


def fixture_path(name: str):
    """Filesystem path of a bundled example network file."""
    return resources.files(__package__) / "fixtures" / name

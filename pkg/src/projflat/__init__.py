"""projflat: charts of real projective space, jet-based derivative transport,
rapid-decay seminorm estimation, and numerical verification that rapidly
decaying functions extend flatly to the hyperplane at infinity.
"""

from .analysis import (
    BOUNDED,
    DIVERGING,
    FLAT_CONSISTENT,
    INCONCLUSIVE,
    SCHWARTZ_CONSISTENT,
    DEFAULT_MAX_ALPHA,
    DEFAULT_MAX_BETA,
    DEFAULT_RADII,
    DEFAULT_SEED,
    ExtensionConfig,
    ExtensionReport,
    FlatnessReport,
    FlatnessSpec,
    SamplingGrid,
    SeminormReport,
    VerdictThresholds,
    atlas_checks,
    classification_matches,
    classify_schwartz,
    estimate_seminorm,
    extension_report,
    flatness_matches,
    verify_flatness,
)
from .atlas import (
    AffinePoint,
    NotInChartError,
    NotInOverlapError,
    PoleError,
    ProjectivePoint,
    SpherePoint,
    chart_inverse,
    chart_map,
    classify,
    stereo,
    stereo_inverse,
    transition,
    transition_divisor_axis,
    transition_values,
)
from .fields import (
    NOT_SCHWARTZ,
    SCHWARTZ,
    CorpusEntry,
    ScalarField,
    builtin_corpus,
    corpus_entry,
    corpus_names,
)
from .jets import (
    Jet,
    SingularPointError,
    constant_jet,
    cos,
    exp,
    extract_partial,
    powi,
    recip,
    seed_jet,
    sin,
)
from .multiindex import MultiIndex, enumerate_multiindices
from .transport import (
    DerivativeTable,
    TransportMatrix,
    first_order_matrix,
    pushforward_derivatives,
    pushforward_field,
    pushforward_jet,
    weighted_derivative,
)

__version__ = "0.1.0"

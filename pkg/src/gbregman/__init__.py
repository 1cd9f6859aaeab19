"""g-Bregman and skew g-Jensen divergences, centroids and clustering."""

from .catalog import CatalogEntry, get_entry, oracle_fdiv
from .centroid import ClusterConfig, ClusterResult, kmeans, left_centroid, right_centroid, weighted_objective
from .convex_core import (
    DualLink,
    GDivergenceSpec,
    Generator,
    Link,
    dual_link,
    fenchel_residual,
    grad_check,
    validate_point,
)
from .divergence import (
    bregman,
    bregman_sym,
    g_bregman,
    g_bregman_sym,
    g_skew_jensen,
    jensen_bregman_decomposition,
    multivariate_g_jensen,
    skew_jensen_scaled,
)
from .errors import (
    ClusterSizeError,
    ConvexityViolation,
    DimensionMismatchError,
    DomainError,
    GBregmanError,
    LengthMismatchError,
    ResampleExhausted,
    UnknownKeyError,
    UnsupportedError,
)
from .identities import IdentityReport, TrialConfig, run_all

__version__ = "0.1.0"

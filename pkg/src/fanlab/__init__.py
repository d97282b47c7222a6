"""fanlab: rigorous computation for the exponential skew-product model.

Modules
-------
tower          exact tower integers and enclosed reals built from F(t) = 3^t - 1
itinerary      finitely described integer sequences and the supremum t*
dynamics       orbit heights, escape heights and membership in J
strata         the strata X_n, the closure test, and two tower inequalities
counterexample the s -> s^N approximation construction with certificates
sigma          finite-support Erdos space and its sigma-product
render         spine pictures (SVG + CSV)
suites, cli    batch verification and the ``fanlab`` command
"""

from .errors import (
    CapExceeded,
    CertificateError,
    DepthInsufficient,
    FanlabError,
    HorizonExceeded,
    InvalidInstance,
    NotRepresentable,
    NumericModeRequired,
    SpecError,
    TooLarge,
    TowerSyntaxError,
    UnresolvedComparison,
)
from .tower import (
    ZERO,
    Enclosure,
    ExactInv,
    FApp,
    Inc,
    Lit,
    Ordering,
    TowerExpr,
    compare,
    eval_enclosure,
    eval_exact,
    f_apply,
    format_expr,
    from_int,
    parse_expr,
    threshold,
)
from .itinerary import (
    ItinerarySeq,
    PeriodicTail,
    WitnessTail,
    ZeroTail,
    magnitude_at,
    seq_from_json,
    seq_to_json,
    shift,
    t_star,
)
from .dynamics import EndpointRecord, Membership, in_J, orbit_height, t_min_enclosure
from .strata import canonical_xn_point, claim8_inequality, closure_necessary, prop7_check, xn_member
from .counterexample import build_sN, choose_K, find_jk, verify_claim9

__version__ = "0.1.0"

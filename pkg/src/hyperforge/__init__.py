"""hyperforge: a link-diagram rewriting toolkit.

Combinatorial moves on planar diagram (PD) codes -- chain move, augmented
chain move, switch move, half-twist -- gated by a rational-tangle exterior
classifier, with machine-checkable hyperbolicity certificates replayed from
known base cases.

All values are immutable; every operation is a pure function returning new
values, so everything here can be freely shared between threads.
"""

from .diagram import (
    Crossing,
    LinkDiagram,
    GaussCode,
    ValidityReport,
    validate,
    components,
    linking_number,
    is_alternating,
    is_reduced,
    is_split,
    is_prime_diagram,
    is_2braid,
    two_braid_status,
    reidemeister1,
    reidemeister1_undo,
    reidemeister2,
    reidemeister2_undo,
    reduce_diagram,
    diagram_isomorphic,
    to_gauss,
    from_gauss,
    parse_pd,
    format_pd,
    parse_gauss,
    format_gauss,
)
from .tangle import (
    ConwaySequence,
    Fraction,
    RationalTangle,
    TangleDiagram,
    fraction,
    twist_add,
    rotate,
    equivalent,
    to_alternating_diagram,
    boundary_twists,
    numerator_closure,
)
from .moves import (
    ChainSite,
    SwitchSite,
    Handedness,
    TkTemplate,
    find_chain_sites,
    chain_move,
    augmented_chain_move,
    switch_move,
    half_twist,
    build_tk,
)
from .classifier import (
    ExceptionKind,
    Refusal,
    excluded_exterior,
    exception_base_set,
    menasco_certify,
    augmented_alternating_certify,
    exceptional_links,
)
from .certificate import (
    ExteriorEvidence,
    Premise,
    Certificate,
    AbstractManifold,
    Step,
    ChainStep,
    AugChainStep,
    SwitchStep,
    HalfTwistStep,
    GlueStep,
    Verdict,
    base_certificate,
    extend,
    verify,
    glue,
    serialize,
    deserialize,
)
from .generators import ChainSpec, chain_link, twisted_5chain, rational_link, tk_closure
from .errors import (
    HyperforgeError,
    FormatError,
    InvalidDiagramError,
    SiteError,
    MixedSignError,
    ExcludedExteriorError,
    PremiseError,
    CertificateError,
    GlueError,
)

__version__ = "0.1.0"

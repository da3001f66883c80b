"""Exact convex-cone tools for general probabilistic theories.

Cones, duality and classicality live in :mod:`gptcone.cones`; tensor
products in :mod:`gptcone.tensor`; kite-square sandwiches and the example
catalog in :mod:`gptcone.sandwich`; witnesses and entanglement
certificates in :mod:`gptcone.certify`; the key-distribution simulation in
:mod:`gptcone.bb84`; JSON formats and the command line in
:mod:`gptcone.formats` and :mod:`gptcone.cli`.
"""

from .bb84 import (
    KeyStats,
    PreparedEnsembles,
    ProtocolTranscript,
    eve_probabilities,
    key_rate,
    normalize_witness,
    simulate,
    validate_stats,
)
from .certify import (
    EntanglementCertificate,
    build_omega,
    build_phi,
    certify,
    eval_magical,
    verify_witness,
)
from .cones import (
    UNKNOWN,
    CompatibilityDecomposition,
    GptSystem,
    Lorentz,
    PolyH,
    PolyV,
    check_compatibility,
    cone_over,
    dual,
    dual_membership,
    enumerate_extreme_rays,
    facets,
    is_classical,
    is_proper,
    is_strictly_positive,
    membership,
    to_hrep,
    to_vrep,
)
from .errors import (
    BudgetExceeded,
    CertificationError,
    DimensionMismatch,
    GptError,
    NotProperError,
    UnsupportedRepresentation,
    WitnessInvalid,
)
from .sandwich import (
    IncompatibilityWitness,
    Kite,
    KiteSandwich,
    blunt_cone_member,
    catalog,
    derive_witness,
    search_sandwich,
    solve_lambda,
    square_family_sandwich,
    verify_sandwich,
)
from .tensor import (
    TensorElement,
    compare_tensors,
    max_membership,
    max_tensor_rays,
    min_membership,
    min_tensor,
    tensor_equal,
)

__version__ = "0.1.0"

__all__ = [
    "KeyStats",
    "PreparedEnsembles",
    "ProtocolTranscript",
    "eve_probabilities",
    "key_rate",
    "normalize_witness",
    "simulate",
    "validate_stats",
    "EntanglementCertificate",
    "build_omega",
    "build_phi",
    "certify",
    "eval_magical",
    "verify_witness",
    "UNKNOWN",
    "CompatibilityDecomposition",
    "GptSystem",
    "Lorentz",
    "PolyH",
    "PolyV",
    "check_compatibility",
    "cone_over",
    "dual",
    "dual_membership",
    "enumerate_extreme_rays",
    "facets",
    "is_classical",
    "is_proper",
    "is_strictly_positive",
    "membership",
    "to_hrep",
    "to_vrep",
    "BudgetExceeded",
    "CertificationError",
    "DimensionMismatch",
    "GptError",
    "NotProperError",
    "UnsupportedRepresentation",
    "WitnessInvalid",
    "IncompatibilityWitness",
    "Kite",
    "KiteSandwich",
    "blunt_cone_member",
    "catalog",
    "derive_witness",
    "search_sandwich",
    "solve_lambda",
    "square_family_sandwich",
    "verify_sandwich",
    "TensorElement",
    "compare_tensors",
    "max_membership",
    "max_tensor_rays",
    "min_membership",
    "min_tensor",
    "tensor_equal",
]

"""Presheaves on finite categories and the topos structure on them."""

from .classifier import Omega, char, omega, subobject_from_char
from .core import (
    DEFAULT_BUDGET,
    NatTrans,
    Presheaf,
    Subpresheaf,
    all_functions,
    bang,
    constant_presheaf,
    count_homs,
    extensions,
    from_initial,
    global_sections,
    hom_set,
    identity,
    initial,
    is_isomorphic,
    iter_homs,
    mono_image,
    relabel,
    subpresheaves,
    terminal,
    yoneda,
)
from .exponential import Exponential, exp_map, exponential, name_of_identity
from .limits import (
    Cone,
    Congruence,
    ImageFactorization,
    colimit,
    coequalizer,
    coproduct,
    equalizer,
    generate_congruence,
    image_factorization,
    kernel,
    limit,
    pair,
    product,
    product_map,
    pullback,
    pushout,
    quotient,
)

__all__ = [name for name in dir() if not name.startswith("_")]

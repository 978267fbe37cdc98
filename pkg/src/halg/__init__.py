"""Finite universal algebra workbench: identities, quasi-identities and
their hyper versions over monoids of hypersubstitutions."""
from .algebra import (FiniteAlgebra, Homomorphism, QuasiIdentity, Verdict, direct_product,
                      eval_term, find_isomorphism, satisfies_identity, satisfies_quasi_identity,
                      subalgebra_generated, term_table)
from .clone import enumerate_term_operations
from .hyper import (HyperMonoid, Hypersubstitution, all_hypersubstitutions_mod, apply_hyper,
                    compose, derived_algebra, monoid_closure, satisfies_M_hyper_quasi_identity,
                    satisfies_M_hyperidentity)
from .terms import App, Signature, Var, format_term, parse_term, substitute

__all__ = [
    "App", "FiniteAlgebra", "Homomorphism", "HyperMonoid", "Hypersubstitution", "QuasiIdentity",
    "Signature", "Var", "Verdict", "all_hypersubstitutions_mod", "apply_hyper", "compose",
    "derived_algebra", "direct_product", "enumerate_term_operations", "eval_term",
    "find_isomorphism", "format_term", "monoid_closure", "parse_term",
    "satisfies_M_hyper_quasi_identity", "satisfies_M_hyperidentity", "satisfies_identity",
    "satisfies_quasi_identity", "subalgebra_generated", "substitute", "term_table",
]

"""Exact computations with Lie algebroids over polynomial rings."""
from .algebroid import (Algebroid, AlgebroidMorphism, AxiomReport, algebroid_from_gerstenhaber,
                        bracket_sections, check_axioms, check_morphism, compose_morphisms,
                        cotangent_algebroid, identity_morphism, log_tangent_fixture, tangent_algebroid)
from .bvhom import BVOperator, bv_operator, duality_check, homology, star, star_inverse
from .cecomplex import (CochainComplex, check_bialgebroid, ce_differential, cohomology, dual_cochain_map,
                        dual_differential)
from .connection import (AtiyahOperator, Connection, check_flat, compose_connection, curvature,
                         induced_top_connection)
from .exactlin import QMatrix, kernel_basis, quotient_dim, rank, rref
from .exterior import (Form, GerstenhaberStructure, Multivector, check_gerstenhaber, contract,
                       gerstenhaber_from_algebroid, gerstenhaber_morphism_check, lie_derivative, pairing,
                       sn_bracket, wedge)
from .fixtures import fixture, list_fixtures
from .polycore import Derivation, Poly, PolyRing, poly_arith, poly_divide_exact, poly_parse
from .specfile import emit_spec, load_spec, parse_spec
from .uepbw import SymElement, UEnvElement, pbw_parse, symmetrize, ue_functor, ue_gr, ue_mul

__version__ = "0.1.0"

__all__ = [
    "Algebroid", "AlgebroidMorphism", "AtiyahOperator", "AxiomReport", "BVOperator", "CochainComplex",
    "Connection", "Derivation", "Form", "GerstenhaberStructure", "Multivector", "Poly", "PolyRing",
    "QMatrix", "SymElement", "UEnvElement", "algebroid_from_gerstenhaber", "bracket_sections",
    "bv_operator", "ce_differential", "check_axioms", "check_bialgebroid", "check_flat",
    "check_gerstenhaber", "check_morphism", "cohomology", "compose_connection", "compose_morphisms",
    "contract", "cotangent_algebroid", "curvature", "dual_cochain_map", "dual_differential",
    "duality_check", "emit_spec", "fixture", "gerstenhaber_from_algebroid", "gerstenhaber_morphism_check",
    "homology", "identity_morphism", "induced_top_connection", "kernel_basis", "lie_derivative",
    "list_fixtures", "load_spec", "log_tangent_fixture", "pairing", "parse_spec", "pbw_parse", "poly_arith",
    "poly_divide_exact", "poly_parse", "quotient_dim", "rank", "rref", "sn_bracket", "star", "star_inverse",
    "symmetrize", "tangent_algebroid", "ue_functor", "ue_gr", "ue_mul", "wedge",
]

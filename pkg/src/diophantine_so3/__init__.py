"""Numerical and exact tools for Diophantine properties of rotation-pair words in SO(3)."""

from .rotation import (
    RotationTriple,
    UnitQuaternion,
    evaluate_word,
    frobenius_distance,
    generator_A,
    generator_B,
    rotation_angle,
    so3_distance,
    word_alpha_derivative,
    word_alpha_second_derivative,
)
from .words import (
    TowerCollapseError,
    WordError,
    WordIndex,
    commutator,
    commutator_tower,
    concat,
    enumerate_words,
    invert,
    reduce,
    word_length,
)
from .poly import IntPoly
from .trigpoly import (
    QuaternionPoly,
    build_P,
    coefficient_height,
    dft_alpha_coefficient,
    leading_alpha_coefficient,
    multiple_angle,
    symbolic_word,
)
from .elimination import elimination_chain, integrate_square, lemma_a_decompose, resultant, verify_height_bounds
from .measure import MeasureEstimate, PhiSpec, check_dm_lemma, dm_bound, phi_alpha_measure, phi_measure, phi_union_measure
from .search import degenerate_order, fit_diophantine, min_distance, naive_min_distance

__version__ = "0.1.0"

__all__ = [
    "RotationTriple",
    "UnitQuaternion",
    "evaluate_word",
    "frobenius_distance",
    "generator_A",
    "generator_B",
    "rotation_angle",
    "so3_distance",
    "word_alpha_derivative",
    "word_alpha_second_derivative",
    "TowerCollapseError",
    "WordError",
    "WordIndex",
    "commutator",
    "commutator_tower",
    "concat",
    "enumerate_words",
    "invert",
    "reduce",
    "word_length",
    "QuaternionPoly",
    "build_P",
    "coefficient_height",
    "dft_alpha_coefficient",
    "leading_alpha_coefficient",
    "multiple_angle",
    "symbolic_word",
    "IntPoly",
    "elimination_chain",
    "integrate_square",
    "lemma_a_decompose",
    "resultant",
    "verify_height_bounds",
    "MeasureEstimate",
    "PhiSpec",
    "check_dm_lemma",
    "dm_bound",
    "phi_alpha_measure",
    "phi_measure",
    "phi_union_measure",
    "degenerate_order",
    "fit_diophantine",
    "min_distance",
    "naive_min_distance",
]

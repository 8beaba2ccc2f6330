"""Fourier analysis of translationally invariant operators on crystals.

The package models discretized PDE operators, smoothers, and grid-transfer
operators as multiplication operators on crystal lattices, evaluates their
frequency symbols exactly on rational samples of the dual torus, and computes
spectra and spectral radii of composite expressions such as two-grid error
propagators.  See the README for a tour and ``stencilfa.gallery`` for three
fully worked examples.
"""

from .crystal import (
    DualSample,
    Lattice,
    QuotientMap,
    StructureElement,
    dual_basis,
    lcm_lattice,
    sample_dual_torus,
)
from .expr import ExprSyntaxError, eval_position, eval_symbol, parse, render
from .gallery import GalleryEntry, build, entry_names
from .intlat import hnf, snf
from .operator import (
    LEX_BOTTOM_UP,
    MultiplicationOperator,
    add,
    adjoint,
    change_structure_element,
    identity_operator,
    lattice_coarsening,
    make_compatible,
    mask_central,
    mul,
    normalize,
    scale,
    triangular_splitting,
)
from .oracle import assemble_dense, check_translation_invariance, eval_dense, wave_basis
from .symbol import (
    SpectrumRecord,
    SpectrumResult,
    Symbol,
    compute_spectrum,
    pinv_matrix,
    symbol_at,
    symbol_pinv,
)

__version__ = "0.1.0"

__all__ = [
    "DualSample",
    "ExprSyntaxError",
    "GalleryEntry",
    "Lattice",
    "LEX_BOTTOM_UP",
    "MultiplicationOperator",
    "QuotientMap",
    "SpectrumRecord",
    "SpectrumResult",
    "StructureElement",
    "Symbol",
    "add",
    "adjoint",
    "assemble_dense",
    "build",
    "change_structure_element",
    "check_translation_invariance",
    "compute_spectrum",
    "dual_basis",
    "entry_names",
    "eval_dense",
    "eval_position",
    "eval_symbol",
    "hnf",
    "identity_operator",
    "lattice_coarsening",
    "lcm_lattice",
    "make_compatible",
    "mask_central",
    "mul",
    "normalize",
    "parse",
    "pinv_matrix",
    "render",
    "sample_dual_torus",
    "scale",
    "snf",
    "symbol_at",
    "symbol_pinv",
    "triangular_splitting",
    "wave_basis",
]

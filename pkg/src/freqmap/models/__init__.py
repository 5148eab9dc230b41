"""Expected frequency matrices of vote distributions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from ..compass import CompassKind, compass_matrix
from ..core import GSTree, as_ranking
from ..errors import DomainError, StructureError
from .mallows import (
    MAX_TABLE_M,
    MahonianTable,
    expected_swap_distance,
    identity_mallows_matrix,
    mahonian,
    mallows_filter_matrix,
    mallows_matrices,
    mallows_matrix,
    mallows_position_counts,
    norm_phi_to_phi,
    phi_to_norm_phi,
    position_count_table,
    reversal_mixture_matrix,
)
from .singlepeaked import conitzer_closed_form, conitzer_matrix, interval_probabilities, walsh_matrix
from .trees import caterpillar_matrix, gs_tree_matrix

IC = "ic"
MALLOWS = "mallows"
MIXTURE = "mallows-mixture"
CONITZER = "conitzer"
WALSH = "walsh"
GS_TREE = "gs-tree"
FILTERED = "mallows-filtered"

FAMILIES = (IC, MALLOWS, MIXTURE, CONITZER, WALSH, GS_TREE, FILTERED)
_DISPERSED = (MALLOWS, MIXTURE, FILTERED)


@dataclass(frozen=True)
class ModelSpec:
    """A vote distribution and its parameters.

    Mallows-like families take exactly one of ``phi`` (raw dispersion) or
    ``norm_phi`` (normalized dispersion). For the reversal mixture, ``p`` is
    the weight of the Mallows component around ``central`` and ``psi`` the
    dispersion of the reversed component, in the same parameterization as
    the main one (defaults to it). ``base`` is the underlying distribution of
    a Mallows-filtered model.
    """

    family: str
    m: int
    phi: Optional[float] = None
    norm_phi: Optional[float] = None
    p: Optional[float] = None
    psi: Optional[float] = None
    base: Optional["ModelSpec"] = None
    tree: Optional[GSTree] = field(default=None, compare=False)
    central: Optional[tuple] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}")
        if self.m < 1:
            raise DomainError(f"m must be positive, got {self.m}")
        if self.central is not None:
            object.__setattr__(self, "central", tuple(int(c) for c in as_ranking(self.central, self.m)))
        has_phi = self.phi is not None
        has_norm = self.norm_phi is not None
        if self.family in _DISPERSED:
            if has_phi == has_norm:
                raise DomainError(f"{self.family} needs exactly one of phi or norm_phi")
            for name in ("phi", "norm_phi", "psi"):
                val = getattr(self, name)
                if val is not None and not 0 <= float(val) <= 1:
                    raise DomainError(f"{name} must lie in [0, 1], got {val}")
        elif has_phi or has_norm:
            raise DomainError(f"{self.family} takes no dispersion parameter")
        if self.family == MIXTURE:
            if self.p is None or not 0 <= float(self.p) <= 1:
                raise DomainError("mallows-mixture needs p in [0, 1]")
        elif self.p is not None or self.psi is not None:
            raise DomainError("p and psi only apply to mallows-mixture")
        if self.family == FILTERED:
            if self.base is None:
                raise DomainError("mallows-filtered needs a base model")
            if self.base.m != self.m:
                raise DomainError("base model must have the same m")
        elif self.base is not None:
            raise DomainError("only mallows-filtered takes a base model")
        if self.family == GS_TREE:
            if self.tree is None:
                raise DomainError("gs-tree needs a tree")
            self.tree.validate()
            if self.tree.m != self.m:
                raise StructureError(f"tree has {self.tree.m} leaves, expected {self.m}")
        elif self.tree is not None:
            raise DomainError("only gs-tree takes a tree")

    def dispersion(self) -> float:
        """Raw phi (converted from norm_phi when needed)."""
        if self.phi is not None:
            return float(self.phi)
        return norm_phi_to_phi(self.m, float(self.norm_phi))

    def reverse_dispersion(self) -> float:
        if self.psi is None:
            return self.dispersion()
        if self.phi is not None:
            return float(self.psi)
        return norm_phi_to_phi(self.m, float(self.psi))

    def to_dict(self) -> dict:
        out = {"family": self.family, "m": self.m}
        for name in ("phi", "norm_phi", "p", "psi"):
            if getattr(self, name) is not None:
                out[name] = getattr(self, name)
        if self.base is not None:
            out["base"] = self.base.to_dict()
        if self.tree is not None:
            out["tree"] = self.tree.to_nested()
        if self.central is not None:
            out["central"] = list(self.central)
        return out


def _exact_value(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    return Fraction(repr(float(x)))


def _exact_dispersions(spec: ModelSpec) -> tuple[Fraction, Fraction]:
    if spec.phi is not None:
        phi = _exact_value(spec.phi)
        return phi, phi if spec.psi is None else _exact_value(spec.psi)
    values = [spec.norm_phi, spec.norm_phi if spec.psi is None else spec.psi]
    if any(float(v) not in (0.0, 1.0) for v in values):
        raise DomainError("exact matrices need a raw rational phi (norm_phi is only exact at 0 and 1)")
    return Fraction(int(float(values[0]))), Fraction(int(float(values[1])))


def model_matrix(spec: ModelSpec, exact: bool = False) -> np.ndarray:
    """Expected frequency matrix of the distribution described by ``spec``."""
    m = spec.m
    fam = spec.family
    if fam == IC:
        return compass_matrix(CompassKind.UNIFORMITY, m, exact=exact)
    if fam == GS_TREE:
        return gs_tree_matrix(spec.tree, exact=exact)
    if fam == CONITZER:
        return conitzer_matrix(m, exact=exact)
    if fam == WALSH:
        return walsh_matrix(m, exact=exact)
    method = "table" if exact else "auto"
    if exact:
        phi, psi = _exact_dispersions(spec)
    else:
        phi = spec.dispersion()
        psi = spec.reverse_dispersion() if fam == MIXTURE else None
    if fam == MALLOWS:
        return mallows_matrix(m, phi, spec.central, exact=exact, method=method)
    if fam == MIXTURE:
        p = _exact_value(spec.p) if exact else float(spec.p)
        return reversal_mixture_matrix(m, phi, psi, p, spec.central, exact=exact, method=method)
    base = model_matrix(spec.base, exact=exact)
    return mallows_filter_matrix(base, phi, exact=exact, method=method)


__all__ = [
    "FAMILIES",
    "IC",
    "MALLOWS",
    "MIXTURE",
    "CONITZER",
    "WALSH",
    "GS_TREE",
    "FILTERED",
    "MAX_TABLE_M",
    "MahonianTable",
    "ModelSpec",
    "caterpillar_matrix",
    "conitzer_closed_form",
    "conitzer_matrix",
    "expected_swap_distance",
    "gs_tree_matrix",
    "identity_mallows_matrix",
    "interval_probabilities",
    "mahonian",
    "mallows_filter_matrix",
    "mallows_matrices",
    "mallows_matrix",
    "mallows_position_counts",
    "model_matrix",
    "norm_phi_to_phi",
    "phi_to_norm_phi",
    "position_count_table",
    "reversal_mixture_matrix",
    "walsh_matrix",
]

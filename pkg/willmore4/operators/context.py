"""Intermediarios compartilhados entre W, V, T e U (calculados sob demanda, uma vez)."""
from __future__ import annotations

from functools import cached_property

import numpy as np

from ..geometry.calculus import (
    covariant_derivative,
    divergence,
    normal_gradient,
    normal_laplacian,
)
from ..geometry.fields import GeometryFields


class OperatorContext:
    """Campos derivados de H e h usados pelas montagens."""

    def __init__(self, geo: GeometryFields):
        self.geo = geo

    @cached_property
    def h_up(self) -> np.ndarray:
        return self.geo.h_up

    @cached_property
    def h_upup(self) -> np.ndarray:
        return self.geo.h_upup

    @cached_property
    def H2(self) -> np.ndarray:
        return np.einsum("...m,...m->...", self.geo.H, self.geo.H)

    @cached_property
    def Hh(self) -> np.ndarray:
        """H.h_ij"""
        return np.einsum("...m,...ijm->...ij", self.geo.H, self.geo.h)

    @cached_property
    def Hh_up(self) -> np.ndarray:
        """H.h^ij"""
        return np.einsum("...m,...ijm->...ij", self.geo.H, self.h_upup)

    @cached_property
    def Hh_mixed(self) -> np.ndarray:
        """H.h_i^j, indices [i, j]"""
        return np.einsum("...m,...ijm->...ij", self.geo.H, self.h_up)

    @cached_property
    def Hh_sq(self) -> np.ndarray:
        """|H.h|^2"""
        return np.einsum("...ij,...ij->...", self.Hh, self.Hh_up)

    @cached_property
    def DH(self) -> np.ndarray:
        """pi_n D_i H"""
        return normal_gradient(self.geo.H, self.geo, 0)

    @cached_property
    def dH(self) -> np.ndarray:
        """D_i H bruto (derivada ambiente completa)"""
        return covariant_derivative(self.geo.H, self.geo, 0)

    @cached_property
    def DH_sq(self) -> np.ndarray:
        """|pi_n D H|^2"""
        return np.einsum("...ij,...im,...jm->...", self.geo.g_inv, self.DH, self.DH, optimize=True)

    @cached_property
    def LH(self) -> np.ndarray:
        """Delta_perp H"""
        return normal_laplacian(self.geo.H, self.geo, 0)

    @cached_property
    def Q(self) -> np.ndarray:
        """(H.h^ij) h_ij"""
        return np.einsum("...ij,...ijm->...m", self.Hh_up, self.geo.h)

    @cached_property
    def H2H(self) -> np.ndarray:
        """|H|^2 H"""
        return self.H2[..., None] * self.geo.H

    @cached_property
    def S(self) -> np.ndarray:
        """S_ab = (H.h_ab) H"""
        return self.Hh[..., None] * self.geo.H[..., None, None, :]

    @cached_property
    def div_S(self) -> np.ndarray:
        """D_i S^i_j bruto, indice j"""
        return divergence(self.S, self.geo, 2)

"""Push-forward of tangent fields under stereographic projection from the north pole.

With ``D = |u|^2 + 1`` the inverse chart is ``x_i = 2 u_i / D`` and
``x_{n+1} = (|u|^2 - 1) / D``.  ``tilde(P) = D^m P(inverse chart)`` and the
projected field is ``R_i = tilde(P_i) + u_i tilde(P_{n+1})`` after the time
change ``ds = dt / (2 D^(m-1))``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ClearingFailed
from .poly import Polynomial, divides, format_polynomial, substitute_rational_map, sum_of_squares
from .vector_field import VectorField, tangency_cofactor


def chart(n: int):
    """Numerators and common denominator of the inverse chart in ``u_1..u_n``."""
    us = [Polynomial.var(i, n) for i in range(n)]
    r2 = sum_of_squares(n)
    return [u.scale(2) for u in us] + [r2 - 1], r2 + 1


def tilde(P: Polynomial, m: int, n: int) -> Polynomial:
    if P.degree() > m:
        raise ClearingFailed(f"degree {P.degree()} exceeds the clearing power {m}")
    nums, den = chart(n)
    return substitute_rational_map(P, nums, den, m)


@dataclass(frozen=True)
class ProjectedField:
    n: int
    R: tuple
    source_degree: int
    tildes: tuple

    @property
    def time_rescale(self):
        return f"ds = dt / (2*(|u|^2+1)^{self.source_degree - 1})"

    def to_dict(self):
        return {"dim": self.n,
                "components": [format_polynomial(r, "u") for r in self.R],
                "sourceDegree": self.source_degree,
                "timeRescale": self.time_rescale}


def push_forward(field: VectorField) -> ProjectedField:
    tangency_cofactor(field)
    n = field.dim - 1
    m = max(field.degree, 0)
    tl = tuple(tilde(P, m, n) for P in field.components)
    last = tl[-1]
    R = tuple(tl[i] + Polynomial.var(i, n) * last for i in range(n))
    return ProjectedField(n, R, m, tl)


def radial_identity_holds(proj: ProjectedField) -> bool:
    """``sum R_i u_i = ((1 + |u|^2) / 2) * tilde(P_{n+1})``."""
    n = proj.n
    lhs = Polynomial.zero(n)
    for i, r in enumerate(proj.R):
        lhs = lhs + r * Polynomial.var(i, n)
    rhs = ((sum_of_squares(n) + 1) * proj.tildes[-1]) / 2
    return lhs == rhs


def equator_transfer_check(field: VectorField) -> bool:
    """``|u|^2 - 1`` divides ``tilde(P_{n+1})`` (equator invariant)."""
    proj = push_forward(field)
    return divides(sum_of_squares(proj.n) - 1, proj.tildes[-1])

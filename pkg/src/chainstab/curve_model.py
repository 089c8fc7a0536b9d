"""Exact numerical invariants of sheaf data on chain-like nodal curves.

A chain-like curve has smooth components 1..n (n >= 2), each of genus >= 2,
with component j meeting component j+1 in a single node and no other
intersections.  Everything here is arbitrary-precision integer arithmetic:
per-component Euler characteristics come from the Riemann-Roch identity

    chi_j = d_j + r_j * (1 - g_j)

and the global Euler characteristic of a locally free sheaf of uniform rank
r is glued from the components, one correction per node:

    chi = sum_j chi_j - r * (n - 1)

For non-uniform multirank the gluing correction at a node is not determined
by (multirank, multidegree) alone, so the global value is left undefined
unless the caller supplies it explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import InternalInvariantError, UnsupportedData, ValidationError


def _int_tuple(name: str, values: Sequence[int]) -> tuple[int, ...]:
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ValidationError(f"{name} must contain integers, got {v!r}")
        out.append(v)
    return tuple(out)


def _bool_tuple(name: str, values, n: int) -> tuple[bool, ...]:
    if values is None:
        return (False,) * n
    out = []
    for v in values:
        if not isinstance(v, bool):
            raise ValidationError(f"{name} must contain booleans, got {v!r}")
        out.append(v)
    if len(out) != n:
        raise ValidationError(f"{name} must have length {n}, got {len(out)}")
    return tuple(out)


@dataclass(frozen=True)
class ChainCurve:
    """Chain of n >= 2 smooth components; ``genera[j-1]`` is the genus of component j."""

    genera: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "genera", _int_tuple("genera", self.genera))
        if len(self.genera) < 2:
            raise ValidationError("a chain-like curve needs at least two components")
        bad = [g for g in self.genera if g < 2]
        if bad:
            raise ValidationError(f"every component genus must be at least 2, got {bad}")

    @property
    def n(self) -> int:
        return len(self.genera)

    def genus(self, index: int) -> int:
        """Genus of component ``index`` (1-based)."""
        self._check_component(index)
        return self.genera[index - 1]

    def node_count(self, index: int) -> int:
        """Nodes on component ``index``: one at either end of the chain, two in the middle."""
        self._check_component(index)
        return 1 if index in (1, self.n) else 2

    def _check_component(self, index: int) -> None:
        if not 1 <= index <= self.n:
            raise ValidationError(f"component index {index} out of range 1..{self.n}")


def arithmetic_genus(curve: ChainCurve) -> int:
    """Arithmetic genus of the chain, the sum of the component genera."""
    return sum(curve.genera)


def chi_structure_sheaf(curve: ChainCurve) -> int:
    """Euler characteristic of the structure sheaf, 1 minus the arithmetic genus."""
    return 1 - arithmetic_genus(curve)


@dataclass(frozen=True)
class SheafNumerics:
    """Multirank, multidegree and Euler characteristics of a pure dimension-one sheaf.

    ``chi`` is the global Euler characteristic.  It is filled automatically
    for uniform multirank (and checked if supplied); for non-uniform
    multirank it stays ``None`` unless the caller provides a value, which is
    then trusted as-is.
    """

    curve: ChainCurve
    multirank: tuple[int, ...]
    multidegree: tuple[int, ...]
    chi_components: tuple[int, ...]
    chi: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "multirank", _int_tuple("multirank", self.multirank))
        object.__setattr__(self, "multidegree", _int_tuple("multidegree", self.multidegree))
        object.__setattr__(self, "chi_components", _int_tuple("chi_components", self.chi_components))
        n = self.curve.n
        for name, seq in (("multirank", self.multirank),
                          ("multidegree", self.multidegree),
                          ("chi_components", self.chi_components)):
            if len(seq) != n:
                raise ValidationError(f"{name} must have length {n}, got {len(seq)}")
        if any(r < 0 for r in self.multirank):
            raise ValidationError("multirank entries must be non-negative")
        for j, (r, d, c, g) in enumerate(
                zip(self.multirank, self.multidegree, self.chi_components, self.curve.genera), start=1):
            if c != d + r * (1 - g):
                raise ValidationError(
                    f"component {j}: chi must equal degree + rank*(1 - genus); "
                    f"got {c}, expected {d + r * (1 - g)}")
        r = self.uniform_rank()
        if r is not None:
            glued = sum(self.chi_components) - r * (n - 1)
            if self.chi is None:
                object.__setattr__(self, "chi", glued)
            elif self.chi != glued:
                raise ValidationError(
                    f"global chi {self.chi} contradicts the gluing value {glued} for uniform rank {r}")
        elif self.chi is not None and (isinstance(self.chi, bool) or not isinstance(self.chi, int)):
            raise ValidationError(f"global chi must be an integer, got {self.chi!r}")

    @property
    def n(self) -> int:
        return len(self.multirank)

    @property
    def total_degree(self) -> int:
        return sum(self.multidegree)

    def uniform_rank(self) -> Optional[int]:
        """The common rank when the multirank is constant, else ``None``."""
        r = self.multirank[0]
        return r if all(rj == r for rj in self.multirank) else None

    def require_chi(self) -> int:
        if self.chi is None:
            raise UnsupportedData(
                "global Euler characteristic is unsupported for non-uniform multirank "
                "unless supplied explicitly")
        return self.chi


def sheaf_from_multidegree(curve: ChainCurve,
                           multirank: Sequence[int],
                           multidegree: Sequence[int]) -> SheafNumerics:
    """Build SheafNumerics from ranks and degrees via Riemann-Roch and gluing.

    Per-component Euler characteristics are always filled; the global one
    only for uniform multirank.
    """
    ranks = _int_tuple("multirank", multirank)
    degs = _int_tuple("multidegree", multidegree)
    if len(ranks) != curve.n or len(degs) != curve.n:
        raise ValidationError(f"multirank and multidegree must have length {curve.n}")
    chi_components = tuple(d + r * (1 - g) for r, d, g in zip(ranks, degs, curve.genera))
    return SheafNumerics(curve, ranks, degs, chi_components)


@dataclass(frozen=True)
class LineBundleTwist:
    """Per-component degrees of a line bundle used to twist a sheaf."""

    multidegree: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "multidegree", _int_tuple("multidegree", self.multidegree))
        if not self.multidegree:
            raise ValidationError("twist multidegree must be non-empty")

    @property
    def n(self) -> int:
        return len(self.multidegree)

    @property
    def total_degree(self) -> int:
        return sum(self.multidegree)

    def is_trivial(self) -> bool:
        return all(d == 0 for d in self.multidegree)

    def __neg__(self) -> "LineBundleTwist":
        return LineBundleTwist(tuple(-d for d in self.multidegree))

    @classmethod
    def trivial(cls, n: int) -> "LineBundleTwist":
        return cls((0,) * n)


@dataclass(frozen=True)
class GeneratedPairData:
    """Numerical type (rank, multidegree, section count) of a generated pair,
    plus the geometric hypothesis flags the criteria consume.

    The flags are declared inputs, not computed facts: each one asserts a
    property of the pair (semistability of a restriction, non-vanishing of a
    section space, ...) that the analysis is allowed to rely on.  Omitted
    flag lists default to all-false.
    """

    rank: int
    sections: int
    multidegree: tuple[int, ...]
    restriction_semistable: Optional[tuple[bool, ...]] = None
    restriction_stable: Optional[tuple[bool, ...]] = None
    kernel_restriction_semistable: Optional[tuple[bool, ...]] = None
    kernel_restriction_stable: Optional[tuple[bool, ...]] = None
    ker_rho_nonzero: Optional[tuple[bool, ...]] = None
    twisted_sections_nonzero: Optional[tuple[bool, ...]] = None
    h1_vanishes: Optional[tuple[bool, ...]] = None

    def __post_init__(self):
        if isinstance(self.rank, bool) or not isinstance(self.rank, int) or self.rank < 1:
            raise ValidationError(f"rank must be a positive integer, got {self.rank!r}")
        if isinstance(self.sections, bool) or not isinstance(self.sections, int):
            raise ValidationError(f"sections must be an integer, got {self.sections!r}")
        if self.sections <= self.rank:
            raise ValidationError(
                f"a generated pair needs more sections than rank, got {self.sections} <= {self.rank}")
        object.__setattr__(self, "multidegree", _int_tuple("multidegree", self.multidegree))
        n = len(self.multidegree)
        if n < 2:
            raise ValidationError("multidegree must cover at least two components")
        if any(d < 0 for d in self.multidegree):
            raise ValidationError("a globally generated restriction has non-negative degree")
        for name in ("restriction_semistable", "restriction_stable",
                     "kernel_restriction_semistable", "kernel_restriction_stable",
                     "ker_rho_nonzero", "twisted_sections_nonzero", "h1_vanishes"):
            object.__setattr__(self, name, _bool_tuple(name, getattr(self, name), n))
        for j in range(n):
            if self.restriction_stable[j] and not self.restriction_semistable[j]:
                raise ValidationError(
                    f"component {j + 1}: restriction_stable requires restriction_semistable")
            if self.kernel_restriction_stable[j] and not self.kernel_restriction_semistable[j]:
                raise ValidationError(
                    f"component {j + 1}: kernel_restriction_stable requires "
                    "kernel_restriction_semistable")
            if (self.twisted_sections_nonzero[j] and self.restriction_semistable[j]
                    and self.multidegree[j] < self.rank):
                raise ValidationError(
                    f"component {j + 1}: a semistable restriction with a twisted section "
                    f"forces degree >= rank, got {self.multidegree[j]} < {self.rank}")

    @property
    def n(self) -> int:
        return len(self.multidegree)

    @property
    def kernel_rank(self) -> int:
        return self.sections - self.rank

    @property
    def total_degree(self) -> int:
        return sum(self.multidegree)


def validate_pair(curve: ChainCurve, pair: GeneratedPairData) -> None:
    """Check that pair data refers to the same number of components as the curve."""
    if pair.n != curve.n:
        raise ValidationError(
            f"pair data covers {pair.n} components but the curve has {curve.n}")


def kernel_numerics(curve: ChainCurve, pair: GeneratedPairData) -> SheafNumerics:
    """Numerics of the kernel of the evaluation map onto the generated bundle.

    The kernel has uniform rank k - r, component degrees -d_j, and

        chi_j = (k - r)(1 - g_j) - d_j
        chi   = (k - r)(1 - p_a) - d

    The gluing identity chi = sum(chi_j) - (k - r)(n - 1) holds by
    construction and is re-verified.
    """
    validate_pair(curve, pair)
    m = pair.kernel_rank
    chi_components = tuple(m * (1 - g) - d for g, d in zip(curve.genera, pair.multidegree))
    chi = m * (1 - arithmetic_genus(curve)) - pair.total_degree
    if chi != sum(chi_components) - m * (curve.n - 1):
        raise InternalInvariantError("kernel gluing identity failed")
    return SheafNumerics(curve, (m,) * curve.n, tuple(-d for d in pair.multidegree),
                         chi_components, chi)


def twist(sheaf: SheafNumerics, line: LineBundleTwist) -> SheafNumerics:
    """Twist a uniform-rank sheaf by a line bundle: degrees and chi shift by rank * deg."""
    r = sheaf.uniform_rank()
    if r is None:
        raise UnsupportedData("twisting is only defined here for uniform multirank")
    if line.n != sheaf.n:
        raise ValidationError(f"twist multidegree must have length {sheaf.n}, got {line.n}")
    degs = tuple(d + r * t for d, t in zip(sheaf.multidegree, line.multidegree))
    chis = tuple(c + r * t for c, t in zip(sheaf.chi_components, line.multidegree))
    return SheafNumerics(sheaf.curve, sheaf.multirank, degs, chis,
                         sheaf.chi + r * line.total_degree)


def kernel_twisted_chi(curve: ChainCurve, pair: GeneratedPairData,
                       line: LineBundleTwist) -> int:
    """Global chi of the kernel bundle after twisting: (k-r)(1 + deg L - p_a) - d."""
    validate_pair(curve, pair)
    if line.n != curve.n:
        raise ValidationError(f"twist multidegree must have length {curve.n}, got {line.n}")
    m = pair.kernel_rank
    return m * (1 + line.total_degree - arithmetic_genus(curve)) - pair.total_degree

"""Stability criteria for kernel bundles of generated pairs, as verdict rules.

Each rule certifies exactly what its hypotheses support and nothing more:
absence of a firing rule is always ``inconclusive``, never "stable".  The
rules split into two families whose hypotheses exclude each other, and
contradictory inputs are rejected before any rule fires:

* semistability: if every component restriction of the kernel bundle is
  semistable, some polarization makes the kernel w-semistable (w-stable if
  one restriction is stable); the witness is constructive.
* strong instability: a component with enough degree relative to the kernel
  rank, together with a declared section vanishing at its nodes, forces a
  weight bound that clashes with the necessary slope inequalities for every
  polarization at once.

``analyze`` runs the strong-instability rules in a fixed order, then the
semistability certificate, then a generic infeasibility engine that combines
the slope-inequality intervals with all declared subsheaf bounds, and
aggregates everything into one report.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .curve_model import (ChainCurve, GeneratedPairData, LineBundleTwist, SheafNumerics,
                          arithmetic_genus, kernel_numerics, twist, validate_pair)
from .errors import (ContradictoryHypotheses, InternalInvariantError, RuleNotApplicable,
                     ValidationError)
from .feasibility import (FEASIBLE, FeasibleRegion, InfeasibilityCertificate, Polarization,
                          WeightBound, bigas_intervals, find_polarization,
                          prove_infeasible_with_certificate, simplex_intersect,
                          subsheaf_slope_constraints)

W_SEMISTABLE = "w_semistable"
W_STABLE = "w_stable"
STRONGLY_UNSTABLE = "strongly_unstable"
INCONCLUSIVE = "inconclusive"

CRITERION_KERNEL_RESTRICTIONS = "kernel-restrictions-semistable"
CRITERION_ENDPOINT = "endpoint-degree-excess"
CRITERION_MIDDLE = "middle-degree-excess"
CRITERION_ALL_TWISTS = "all-twists-degree-ratio"
CRITERION_TWO_COMPONENT = "two-component-kernel-sections"
CRITERION_GENUS_BOUND = "genus-bound"
CRITERION_GENERIC = "weight-system-infeasible"
CRITERION_NONE = "none"

_KINDS = (W_SEMISTABLE, W_STABLE, STRONGLY_UNSTABLE, INCONCLUSIVE)

METHOD_CLIFFORD = "clifford"
METHOD_RIEMANN_ROCH = "riemann_roch_h1_zero"
METHOD_UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Verdict:
    """Outcome of one rule: what it certifies, and the evidence."""

    kind: str
    criterion: str
    witness: Optional[Polarization] = None
    certificate: Optional[InfeasibilityCertificate] = None
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "notes", tuple(self.notes))
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown verdict kind {self.kind!r}")
        if self.kind in (W_SEMISTABLE, W_STABLE) and self.witness is None:
            raise ValidationError("a semistability verdict requires a witness polarization")


@dataclass(frozen=True)
class H0Bound:
    """Per-component and global upper bounds for the section count.

    ``total`` is sum(per_component) - (n-1)*rank when every component has a
    bound, else ``None``.
    """

    per_component: tuple[Optional[int], ...]
    methods: tuple[str, ...]
    total: Optional[int]


@dataclass(frozen=True)
class KBoundResult:
    """Result of the global section-count bound check.

    ``holds`` records that the bound is strictly below total degree + rank
    (guaranteed whenever the check's preconditions are met);
    ``k_within_bound`` compares the declared section count against the bound.
    """

    bound: int
    holds: bool
    k_within_bound: bool
    h0: H0Bound


@dataclass(frozen=True)
class Report:
    """Aggregated analysis: strongest verdict plus all diagnostics."""

    verdict: Verdict
    region: Optional[FeasibleRegion]
    sheaf: SheafNumerics
    obstructions: tuple[bool, ...]
    fired: tuple[str, ...]
    k_bound: Optional[KBoundResult]
    notes: tuple[str, ...] = ()


def _obstruction_flags(pair: GeneratedPairData) -> tuple[bool, ...]:
    return tuple(ts and ss for ts, ss in
                 zip(pair.twisted_sections_nonzero, pair.restriction_semistable))


def restriction_obstruction(curve: ChainCurve, pair: GeneratedPairData) -> list[bool]:
    """Components where the kernel restriction is certified non-semistable.

    A semistable component restriction together with a section vanishing at
    the component's nodes forces degree >= rank > 0 there, so the trivial
    subbundle of constant kernel sections destabilizes the restricted kernel.
    Claiming kernel_restriction_semistable on such a component is a
    contradiction and is rejected.
    """
    validate_pair(curve, pair)
    obstructed = _obstruction_flags(pair)
    conflicts = [j + 1 for j, (o, ks) in
                 enumerate(zip(obstructed, pair.kernel_restriction_semistable)) if o and ks]
    if conflicts:
        raise ContradictoryHypotheses(
            f"components {conflicts}: the kernel restriction cannot be semistable when a "
            "twisted section exists and the bundle restriction is semistable")
    return list(obstructed)


def certify_w_semistable(curve: ChainCurve, pair: GeneratedPairData) -> Verdict:
    """Constructive semistability certificate for the kernel bundle.

    Requires every kernel restriction to be declared semistable; the kernel
    has negative global and per-component chi, so a witness polarization
    always exists and failure to find one is an internal error.  A stable
    restriction on any component upgrades the verdict to w-stable.
    """
    validate_pair(curve, pair)
    if not all(pair.kernel_restriction_semistable):
        missing = [j + 1 for j, f in enumerate(pair.kernel_restriction_semistable) if not f]
        return Verdict(INCONCLUSIVE, CRITERION_KERNEL_RESTRICTIONS,
                       notes=(f"kernel restriction semistability not asserted for "
                              f"components {missing}",))
    region = find_polarization(kernel_numerics(curve, pair))
    if region.status != FEASIBLE:
        raise InternalInvariantError(
            "the kernel bundle has negative chi on every component, so a polarization "
            "must exist; the sweep disagreed")
    kind = W_STABLE if any(pair.kernel_restriction_stable) else W_SEMISTABLE
    return Verdict(kind, CRITERION_KERNEL_RESTRICTIONS, witness=region.witness)


def clifford_h0_bound(genus: int, rank: int, degree: int, semistable: bool = True,
                      h1_vanishes: bool = False) -> tuple[Optional[int], str]:
    """Section-count bound for one semistable component bundle.

    In the slope range [0, 2g-2] the bound is floor(d/2) + r; above the
    range (where h1 vanishes for semistable bundles, or when h1 vanishing is
    declared) it is the Euler characteristic d + r(1-g).  Returns
    ``(None, "unbounded")`` when neither applies.
    """
    if genus < 2 or rank < 1 or degree < 0:
        raise ValidationError("the section bound needs genus >= 2, rank >= 1, degree >= 0")
    mu = Fraction(degree, rank)
    if mu <= 2 * genus - 2:
        if semistable:
            return degree // 2 + rank, METHOD_CLIFFORD
        if h1_vanishes:
            return degree + rank * (1 - genus), METHOD_RIEMANN_ROCH
        return None, METHOD_UNBOUNDED
    if semistable or h1_vanishes:
        return degree + rank * (1 - genus), METHOD_RIEMANN_ROCH
    return None, METHOD_UNBOUNDED


def h0_global_bound(curve: ChainCurve, pair: GeneratedPairData) -> H0Bound:
    """Global section bound from per-component bounds and the node correction."""
    validate_pair(curve, pair)
    per = []
    methods = []
    for j in range(curve.n):
        b, meth = clifford_h0_bound(curve.genera[j], pair.rank, pair.multidegree[j],
                                    semistable=pair.restriction_semistable[j],
                                    h1_vanishes=pair.h1_vanishes[j])
        per.append(b)
        methods.append(meth)
    total = None
    if all(b is not None for b in per):
        total = sum(per) - (curve.n - 1) * pair.rank
    return H0Bound(tuple(per), tuple(methods), total)


def k_bound_check(curve: ChainCurve, pair: GeneratedPairData) -> KBoundResult:
    """Check the strict bound (section count) < degree + rank.

    Applicable when every restriction is semistable and some component has
    positive degree; the computed global bound is then always strictly below
    d + r, and the declared section count is validated against it.
    """
    validate_pair(curve, pair)
    if not all(pair.restriction_semistable):
        raise RuleNotApplicable("the section bound needs every restriction semistable")
    if all(d == 0 for d in pair.multidegree):
        raise RuleNotApplicable("the section bound needs a component of positive degree")
    h0 = h0_global_bound(curve, pair)
    if h0.total is None:
        raise InternalInvariantError("semistable components always yield a finite bound")
    bound = h0.total
    return KBoundResult(bound=bound,
                        holds=bound < pair.total_degree + pair.rank,
                        k_within_bound=pair.sections <= bound,
                        h0=h0)


def _component_weight_bound(curve: ChainCurve, pair: GeneratedPairData, j: int,
                            line: LineBundleTwist) -> WeightBound:
    """Upper bound on w_j from the component-supported kernel subsheaf."""
    m = pair.kernel_rank
    chi = twist(kernel_numerics(curve, pair), line).chi
    target = Fraction(chi, m)
    numer = line.multidegree[j - 1] - curve.node_count(j) + 1 - curve.genera[j - 1]
    if target >= 0:
        raise InternalInvariantError("component weight bounds are only emitted for "
                                     "negative subject slope")
    return WeightBound(j, Fraction(numer) / target, label="subsheaf slope bound")


def _rule_certificate(curve: ChainCurve, pair: GeneratedPairData,
                      j: int) -> InfeasibilityCertificate:
    """Clash between the slope inequalities and the subsheaf bound at component j."""
    kernel = kernel_numerics(curve, pair)
    bound = _component_weight_bound(curve, pair, j, LineBundleTwist.trivial(curve.n))
    cert = prove_infeasible_with_certificate(kernel, [bound])
    if cert is None:
        raise InternalInvariantError(
            f"the firing condition at component {j} guarantees a clash")
    return cert


def strongly_unstable_endpoint(curve: ChainCurve, pair: GeneratedPairData) -> Verdict:
    """End-component criterion: kernel rank strictly below the end degree.

    Fires at component 1 or n when a twisted section exists there, the
    restriction is semistable, and (sections - rank) < degree.
    """
    validate_pair(curve, pair)
    m = pair.kernel_rank
    for j in (1, curve.n):
        if (pair.twisted_sections_nonzero[j - 1] and pair.restriction_semistable[j - 1]
                and m < pair.multidegree[j - 1]):
            return Verdict(
                STRONGLY_UNSTABLE, CRITERION_ENDPOINT,
                certificate=_rule_certificate(curve, pair, j),
                notes=(f"component {j}: kernel rank {m} < degree {pair.multidegree[j - 1]}",))
    return Verdict(INCONCLUSIVE, CRITERION_ENDPOINT,
                   notes=("end-component conditions not met",))


def strongly_unstable_middle(curve: ChainCurve, pair: GeneratedPairData) -> Verdict:
    """Middle-component criterion: kernel rank strictly below half the degree.

    Fires at some j in 2..n-1 when a twisted section exists there, the
    restriction is semistable, and (sections - rank) < degree/2 (exact
    rational comparison, never floored).
    """
    validate_pair(curve, pair)
    m = pair.kernel_rank
    for j in range(2, curve.n):
        if (pair.twisted_sections_nonzero[j - 1] and pair.restriction_semistable[j - 1]
                and m < Fraction(pair.multidegree[j - 1], 2)):
            return Verdict(
                STRONGLY_UNSTABLE, CRITERION_MIDDLE,
                certificate=_rule_certificate(curve, pair, j),
                notes=(f"component {j}: kernel rank {m} < degree {pair.multidegree[j - 1]}/2",))
    if curve.n == 2:
        return Verdict(INCONCLUSIVE, CRITERION_MIDDLE,
                       notes=("no middle component on a two-component chain",))
    return Verdict(INCONCLUSIVE, CRITERION_MIDDLE,
                   notes=("middle-component conditions not met",))


def strongly_unstable_all_twists(curve: ChainCurve, pair: GeneratedPairData,
                                 line: Optional[LineBundleTwist] = None) -> Verdict:
    """Twist-independent criterion: total degree over kernel rank above n-1.

    Fires when the restriction kernel is non-zero on every component and
    d/(sections - rank) > n - 1 (exact).  The firing condition does not
    mention the twist, so the conclusion holds for every line bundle twist;
    when a concrete twist is supplied, a sample destabilizer for the
    barycentric polarization is attached as corroboration.
    """
    validate_pair(curve, pair)
    m = pair.kernel_rank
    if not all(pair.ker_rho_nonzero):
        return Verdict(INCONCLUSIVE, CRITERION_ALL_TWISTS,
                       notes=("restriction kernels are not declared non-zero everywhere",))
    if Fraction(pair.total_degree, m) <= curve.n - 1:
        return Verdict(INCONCLUSIVE, CRITERION_ALL_TWISTS,
                       notes=(f"degree ratio {pair.total_degree}/{m} does not exceed "
                              f"{curve.n - 1}",))
    trivial = LineBundleTwist.trivial(curve.n)
    kernel = kernel_numerics(curve, pair)
    target = Fraction(kernel.chi, m)
    cert = prove_infeasible_with_certificate(
        kernel, subsheaf_slope_constraints(curve, pair, trivial, target))
    if cert is None:
        raise InternalInvariantError("the degree-ratio condition guarantees a clash")
    notes = ["instability holds for every line-bundle twist: the firing condition "
             "does not involve the twist"]
    if line is not None and not line.is_trivial():
        from . import oracle
        w = Polarization(tuple(Fraction(1, curve.n) for _ in range(curve.n)))
        witness = oracle.destabilizer_witness(curve, pair, w, line)
        if witness is not None:
            notes.append(
                f"supplied twist, barycentric weights: component {witness.component} "
                f"subsheaf slope {witness.subsheaf_slope} exceeds {witness.target_slope}")
    return Verdict(STRONGLY_UNSTABLE, CRITERION_ALL_TWISTS, certificate=cert,
                   notes=tuple(notes))


def strongly_unstable_two_component(curve: ChainCurve, pair: GeneratedPairData) -> Verdict:
    """Two-component criterion: non-zero restriction kernels plus semistability.

    On a two-component chain, non-zero restriction kernels on both sides and
    semistable restrictions force total degree > kernel rank through the
    section-count bound, which is exactly the degree-ratio condition; the
    verdict then follows from the twist-independent rule.
    """
    validate_pair(curve, pair)
    if curve.n != 2:
        return Verdict(INCONCLUSIVE, CRITERION_TWO_COMPONENT,
                       notes=("rule applies to two-component chains only",))
    if not (all(pair.ker_rho_nonzero) and all(pair.restriction_semistable)):
        return Verdict(INCONCLUSIVE, CRITERION_TWO_COMPONENT,
                       notes=("needs non-zero restriction kernels and semistable "
                              "restrictions on both components",))
    try:
        kb = k_bound_check(curve, pair)
    except RuleNotApplicable as exc:
        return Verdict(INCONCLUSIVE, CRITERION_TWO_COMPONENT, notes=(str(exc),))
    delegated = strongly_unstable_all_twists(curve, pair)
    if delegated.kind != STRONGLY_UNSTABLE:
        return Verdict(INCONCLUSIVE, CRITERION_TWO_COMPONENT,
                       notes=("declared section count is inconsistent with the derived "
                              f"bound {kb.bound}; degree condition not confirmed",))
    return Verdict(STRONGLY_UNSTABLE, CRITERION_TWO_COMPONENT,
                   certificate=delegated.certificate,
                   notes=(f"section bound {kb.bound} < degree + rank = "
                          f"{pair.total_degree + pair.rank} forces the degree ratio",)
                   + delegated.notes[:1])


def strongly_unstable_genus_bound(curve: ChainCurve, pair: GeneratedPairData) -> Verdict:
    """Genus criterion: arithmetic genus above (n-2)(sections-rank)/rank.

    Needs h1 vanishing and a non-zero restriction kernel on every component;
    the conclusion holds for every line-bundle twist.
    """
    validate_pair(curve, pair)
    m = pair.kernel_rank
    if not (all(pair.h1_vanishes) and all(pair.ker_rho_nonzero)):
        return Verdict(INCONCLUSIVE, CRITERION_GENUS_BOUND,
                       notes=("needs h1 vanishing and non-zero restriction kernels "
                              "everywhere",))
    p_a = arithmetic_genus(curve)
    threshold = Fraction((curve.n - 2) * m, pair.rank)
    if p_a <= threshold:
        return Verdict(INCONCLUSIVE, CRITERION_GENUS_BOUND,
                       notes=(f"arithmetic genus {p_a} does not exceed {threshold}",))
    notes = [f"arithmetic genus {p_a} > {threshold}; instability holds for every "
             "line-bundle twist"]
    cert = None
    if Fraction(pair.total_degree, m) > curve.n - 1:
        delegated = strongly_unstable_all_twists(curve, pair)
        cert = delegated.certificate
    else:
        notes.append("declared section count is inconsistent with the h1-vanishing "
                     "section count; no numeric certificate attached")
    return Verdict(STRONGLY_UNSTABLE, CRITERION_GENUS_BOUND, certificate=cert,
                   notes=tuple(notes))


def analyze_sheaf(sheaf: SheafNumerics) -> Report:
    """Feasibility-only analysis for raw sheaf numerics (no hypothesis flags).

    Emptiness of the necessary slope-inequality system certifies strong
    instability; feasibility alone is inconclusive because no sufficiency
    hypothesis is available.
    """
    region = find_polarization(sheaf)
    if region.status == FEASIBLE:
        verdict = Verdict(INCONCLUSIVE, CRITERION_NONE,
                          notes=("weight system feasible; component semistability unknown, "
                                 "so no sufficiency criterion applies",))
    else:
        cert = prove_infeasible_with_certificate(sheaf)
        verdict = Verdict(STRONGLY_UNSTABLE, CRITERION_GENERIC, certificate=cert,
                          notes=("no polarization satisfies the necessary slope "
                                 "inequalities",))
    return Report(verdict=verdict, region=region, sheaf=sheaf, obstructions=(),
                  fired=(), k_bound=None)


def analyze(curve: ChainCurve, pair: GeneratedPairData,
            line: Optional[LineBundleTwist] = None) -> Report:
    """Full analysis of a generated pair's kernel bundle (optionally twisted).

    Order: input-contradiction screening, the strong-instability rules in a
    fixed order, the semistability certificate, then the generic engine
    (slope-inequality intervals plus all declared subsheaf bounds for the
    supplied or trivial twist).  The strongest verdict wins; contradictory
    hypothesis sets are rejected before any rule fires.
    """
    validate_pair(curve, pair)
    problems = []
    obstructed = _obstruction_flags(pair)
    conflicts = [j + 1 for j, (o, ks) in
                 enumerate(zip(obstructed, pair.kernel_restriction_semistable)) if o and ks]
    if conflicts:
        problems.append(
            f"components {conflicts}: kernel restriction declared semistable but "
            "certified non-semistable by the twisted-section obstruction")

    twist_line = line if line is not None else LineBundleTwist.trivial(curve.n)
    if twist_line.n != curve.n:
        raise ValidationError(f"twist multidegree must have length {curve.n}")
    m = pair.kernel_rank
    subject = twist(kernel_numerics(curve, pair), twist_line)
    target = Fraction(subject.chi, m)
    engine_bounds = subsheaf_slope_constraints(curve, pair, twist_line, target)
    region = simplex_intersect(bigas_intervals(subject), engine_bounds)

    rule_verdicts = [
        strongly_unstable_endpoint(curve, pair),
        strongly_unstable_middle(curve, pair),
        strongly_unstable_all_twists(curve, pair, line),
        strongly_unstable_two_component(curve, pair),
        strongly_unstable_genus_bound(curve, pair),
    ]
    fired = tuple(v.criterion for v in rule_verdicts if v.kind == STRONGLY_UNSTABLE)

    if all(pair.kernel_restriction_semistable):
        if fired:
            problems.append(
                f"strong-instability conditions ({', '.join(fired)}) hold while every "
                "kernel restriction is declared semistable")
        else:
            screen = region
            if not twist_line.is_trivial():
                kernel = kernel_numerics(curve, pair)
                screen = simplex_intersect(
                    bigas_intervals(kernel),
                    subsheaf_slope_constraints(curve, pair, LineBundleTwist.trivial(curve.n),
                                               Fraction(kernel.chi, m)))
            if screen.status != FEASIBLE:
                problems.append(
                    "the declared subsheaf bounds exclude every polarization while every "
                    "kernel restriction is declared semistable")
    if problems:
        raise ContradictoryHypotheses("; ".join(problems))

    notes = []
    if fired:
        verdict = next(v for v in rule_verdicts if v.kind == STRONGLY_UNSTABLE)
    elif region.status != FEASIBLE:
        cert = prove_infeasible_with_certificate(subject, engine_bounds)
        extra = () if twist_line.is_trivial() else \
            (f"instability certified for the kernel twisted by {twist_line.multidegree}",)
        verdict = Verdict(STRONGLY_UNSTABLE, CRITERION_GENERIC, certificate=cert,
                          notes=("no polarization satisfies the slope inequalities "
                                 "together with the declared subsheaf bounds",) + extra)
    elif all(pair.kernel_restriction_semistable):
        if twist_line.is_trivial():
            verdict = certify_w_semistable(curve, pair)
        else:
            kind = W_STABLE if any(pair.kernel_restriction_stable) else W_SEMISTABLE
            verdict = Verdict(kind, CRITERION_KERNEL_RESTRICTIONS, witness=region.witness,
                              notes=("component semistability is preserved under line-bundle "
                                     "twists, so the twisted kernel inherits the verdict",))
    else:
        verdict = Verdict(INCONCLUSIVE, CRITERION_NONE,
                          notes=("no instability criterion fired and kernel restriction "
                                 "semistability is not asserted for every component",))

    k_bound = None
    try:
        k_bound = k_bound_check(curve, pair)
        if not k_bound.k_within_bound:
            notes.append(f"declared section count {pair.sections} exceeds the derived "
                         f"global bound {k_bound.bound}")
    except RuleNotApplicable as exc:
        notes.append(f"section bound not applicable: {exc}")

    return Report(verdict=verdict, region=region, sheaf=subject,
                  obstructions=obstructed, fired=fired, k_bound=k_bound,
                  notes=tuple(notes))

"""Executable ideal and state-vanishing arguments with checkable artifacts.

Two pipelines live here.

The primeness pipeline turns a positive element q*q and a point where its
diagonal is positive into a projection inside the ideal it generates, with an
expression-tree certificate; two such witnesses plus one registry link yield
a single product expression that normalizes to a projection lying in both
ideals at once.

The vanishing pipeline takes a word of registered generators, their adjoints
and arbitrary projections, containing the protected pivot projection, and
produces either a step-by-step trace exhibiting a carrier tuple whose final
coordinate avoids everything the protection shields (so the registered state
annihilates the word), or a report that the word collapses to zero outright.

Every certificate and trace re-verifies by plain normal-form evaluation;
nothing trusts the code that constructed it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .cylinders import (
    SequenceDesc,
    Tup,
    extends,
    format_tuple,
    parse_tuple_text,
)
from .expr import (
    Adj,
    Expr,
    Product,
    Proj,
    ScalarLit,
    eval_expr,
    from_polynomial,
    poly_text,
    print_expr,
)
from .monomials import (
    V,
    ZERO,
    Monomial,
    format_monomial,
    is_projection,
    multiply,
    normal_form,
)
from .polynomials import DiagonalState, Polynomial, Scalar
from .registry import GeneratorRecord, ProtectionRecord, Registry, parse_record_line


class WitnessError(Exception):
    """A violated precondition, reported distinctly from zero products."""


class HorizonError(WitnessError):
    """A trace reaches deeper than the protection horizon covers."""


class SoundnessError(Exception):
    """The registry and a nonzero word contradict the avoidance claim.

    Unreachable through the public API; it means records were tampered with.
    """


# ---------------------------------------------------------------------------
# ideal membership witnesses


@dataclass(slots=True)
class IdealWitness:
    """P(alpha) * source * P(alpha) collapses to scalar * P(alpha), scalar != 0.

    `source` is the positive element root'*root, so P(alpha) lies in any
    closed two-sided ideal containing it; the certificate is an expression
    tree whose evaluation must equal P(alpha) exactly.
    """

    source: Polynomial
    alpha: Tup
    scalar: Scalar
    certificate: Expr
    root: Polynomial

    def to_lines(self) -> list[str]:
        return [
            "witness",
            f"alpha {format_tuple(self.alpha)}",
            f"scalar {self.scalar.to_text()}",
            f"root {poly_text(self.root)}",
            f"source {poly_text(self.source)}",
            f"certificate {print_expr(self.certificate)}",
            "end witness",
        ]


def ideal_projection_witness(
    reg: Registry, q: Polynomial, x: SequenceDesc
) -> IdealWitness:
    """Locate a projection in the ideal generated by q*q.

    The caller supplies a point x with positive diagonal value for q*q.
    The witness cylinder extends the first coordinates of x by one fresh
    coordinate, chosen to avoid every tuple of q at that depth and every
    label the registry protects there; compressing q*q to that cylinder
    leaves an exact nonzero multiple of its projection.
    """
    source = q.adjoint() * q
    positivity = source.g_eval(x)
    if not positivity:
        raise WitnessError(
            "the diagonal value of q*q vanishes at the supplied point; "
            "a point with positive value is required"
        )
    n = q.max_tuple_len() + 1
    head = x.head(n - 1)
    blocked = {t[n - 1] for t in q.tuples() if len(t) >= n}
    for prot in reg.protections():
        for c in prot.tuples:
            if len(c) >= n:
                blocked.add(c[n - 1])
    fresh = 0
    while fresh in blocked:
        fresh += 1
    alpha = head + (fresh,)
    scalar = source.g_on_cylinder(alpha)
    if not scalar:
        raise SoundnessError("compression scalar vanished despite a positive point")
    if source.compress(alpha) != Polynomial.projection(alpha).scale(scalar):
        raise SoundnessError("compression is not the expected multiple of the projection")
    root_expr = from_polynomial(q)
    certificate: Expr = Product(
        (
            ScalarLit(Scalar(Fraction(1)) / scalar),
            Proj(alpha),
            Adj(root_expr),
            root_expr,
            Proj(alpha),
        )
    )
    if eval_expr(certificate) != Polynomial.projection(alpha):
        raise SoundnessError("witness certificate does not evaluate to the projection")
    return IdealWitness(
        source=source, alpha=alpha, scalar=scalar, certificate=certificate, root=q
    )


@dataclass(slots=True)
class PrimenessCertificate:
    """One product expression that lands in two ideals at once.

    The left half pushes witness1's projection through the linking isometry,
    the right half is witness2's compression; the whole word normalizes to
    exactly the projection of the generator's range tuple.
    """

    witness1: IdealWitness
    witness2: IdealWitness
    generator: GeneratorRecord
    product_expr: Expr

    def claim(self) -> Polynomial:
        return Polynomial.projection(self.generator.ran)

    def to_text(self) -> str:
        lines = ["prefixalg certificate v1", self.generator.to_line()]
        lines.extend(self.witness1.to_lines())
        lines.extend(self.witness2.to_lines())
        lines.append(f"product {print_expr(self.product_expr)}")
        lines.append(f"claim {poly_text(self.claim())}")
        return "\n".join(lines) + "\n"


def _monomial_expr(m: V) -> Expr:
    if m.dom == m.ran:
        return Proj(m.dom)
    from .expr import Iso

    return Iso(m.dom, m.ran)


def primeness_witness(
    reg: Registry, w1: IdealWitness, w2: IdealWitness
) -> PrimenessCertificate:
    """Link the two witness cylinders and assemble the joint certificate."""
    rec = reg.link(w1.alpha, w2.alpha)
    v_node = _monomial_expr(V(rec.dom, rec.ran))
    half1 = (
        ScalarLit(Scalar(Fraction(1)) / w1.scalar),
        v_node,
        Proj(rec.dom),
        Proj(w1.alpha),
        from_polynomial(w1.source),
        Proj(w1.alpha),
        Proj(rec.dom),
        Adj(v_node),
    )
    half2 = (
        ScalarLit(Scalar(Fraction(1)) / w2.scalar),
        Proj(rec.ran),
        Proj(w2.alpha),
        from_polynomial(w2.source),
        Proj(w2.alpha),
        Proj(rec.ran),
    )
    product_expr = Product(half1 + half2)
    cert = PrimenessCertificate(
        witness1=w1, witness2=w2, generator=rec, product_expr=product_expr
    )
    if eval_expr(product_expr) != cert.claim():
        raise SoundnessError("primeness product does not normalize to the claim")
    return cert


# ---------------------------------------------------------------------------
# state-vanishing witnesses

CASE_BASE = "base"
CASE_LEFT_ANCHOR = "leftmost-anchor"
CASE_PROJECTION = "projection-carry"
CASE_PREFIX_REWRITE = "prefix-rewrite"
CASE_EARLY_ORTHOGONAL = "early-orthogonal"
CASE_LATE_DOMINATES = "late-dominates"


@dataclass(frozen=True, slots=True)
class TraceStep:
    """One induction step: the carrier after handling the factor at pos."""

    position: int
    case: str
    carrier: Tup
    stage: Optional[int] = None
    adjoint: bool = False

    def to_line(self) -> str:
        stage = "-" if self.stage is None else str(self.stage)
        return (
            f"step pos={self.position} case={self.case} stage={stage} "
            f"adjoint={int(self.adjoint)} carrier={format_tuple(self.carrier)}"
        )


@dataclass(slots=True)
class VanishingTrace:
    """A verified carrier (b, n) for a nonzero word containing the pivot.

    The final carrier satisfies: its projection absorbs the word from the
    left; no generator issued up to the protection stage touches its final
    coordinate; no protected tuple does either.
    """

    word: tuple[Monomial, ...]
    pivot: Tup
    prot_stage: int
    steps: tuple[TraceStep, ...]
    carrier: Tup

    @property
    def depth(self) -> int:
        return len(self.carrier)

    def to_lines(self) -> list[str]:
        lines = [
            f"prot {self.prot_stage}",
            f"pivot {format_tuple(self.pivot)}",
            "word " + "|".join(format_monomial(m) for m in self.word),
        ]
        lines.extend(step.to_line() for step in self.steps)
        lines.append(f"final carrier={format_tuple(self.carrier)} depth={self.depth}")
        return lines

    def to_text(self) -> str:
        return "\n".join(["prefixalg trace v1"] + self.to_lines()) + "\n"


@dataclass(slots=True)
class ZeroReport:
    """The word collapses to the zero operator; nothing to witness."""

    word: tuple[Monomial, ...]
    pivot: Tup
    prot_stage: int
    steps: tuple[TraceStep, ...]
    reason: str


def _classify_word(
    reg: Registry, pivot: Tup, word: list[Monomial]
) -> list[tuple[V, Optional[tuple[list[int], list[int]]]]]:
    """Validate every factor; isometries must be registered generators."""
    if not word:
        raise WitnessError("the word must be non-empty")
    classified = []
    pivot_proj = V(pivot, pivot)
    has_pivot = False
    for m in word:
        if m is ZERO:
            raise WitnessError("the zero operator is not a word factor")
        assert isinstance(m, V)
        if m == pivot_proj:
            has_pivot = True
        if is_projection(m):
            classified.append((m, None))
            continue
        direct, adj = reg.generator_stages_matching(m)
        if not direct and not adj:
            raise WitnessError(
                f"factor {format_monomial(m)} is not a registered generator "
                f"or the adjoint of one"
            )
        classified.append((m, (direct, adj)))
    if not has_pivot:
        raise WitnessError(
            f"the word must contain the pivot projection {format_monomial(pivot_proj)}"
        )
    return classified


def _narrate(
    reg: Registry,
    prot: ProtectionRecord,
    pivot: Tup,
    word: list[Monomial],
    classified: list[tuple[V, Optional[tuple[list[int], list[int]]]]],
    expect_nonzero: bool,
) -> tuple[list[TraceStep], Optional[Tup], str]:
    """Run the induction from the leftmost pivot outward.

    Returns (steps, final carrier or None, reason). In the nonzero case a
    structural dead end is impossible and raises SoundnessError instead.
    """
    pivot_proj = V(pivot, pivot)
    anchor = next(i for i, m in enumerate(word) if m == pivot_proj)
    steps: list[TraceStep] = []
    carrier = pivot
    case = CASE_BASE if anchor == len(word) - 1 else CASE_LEFT_ANCHOR
    steps.append(TraceStep(position=anchor + 1, case=case, carrier=carrier))
    for i in range(anchor - 1, -1, -1):
        m, stages = classified[i]
        n = len(carrier)
        if stages is None:
            steps.append(
                TraceStep(position=i + 1, case=CASE_PROJECTION, carrier=carrier)
            )
            continue
        direct, adj = stages
        depth = len(m.dom)
        if n > depth:
            if not extends(carrier, m.dom):
                if expect_nonzero:
                    raise SoundnessError(
                        "nonzero word with a factor orthogonal to the carrier"
                    )
                return (
                    steps,
                    None,
                    f"factor at position {i + 1} misses the carrier cylinder",
                )
            stage = max(direct + adj)
            carrier = m.ran + carrier[depth:]
            steps.append(
                TraceStep(
                    position=i + 1,
                    case=CASE_PREFIX_REWRITE,
                    carrier=carrier,
                    stage=stage,
                    adjoint=stage not in direct,
                )
            )
        else:
            late = [s for s in direct + adj if s > prot.stage]
            if not late:
                stage = max(direct + adj)
                steps.append(
                    TraceStep(
                        position=i + 1,
                        case=CASE_EARLY_ORTHOGONAL,
                        carrier=carrier,
                        stage=stage,
                        adjoint=stage not in direct,
                    )
                )
                if expect_nonzero:
                    raise SoundnessError(
                        "nonzero word blocked by a pre-protection generator"
                    )
                return (
                    steps,
                    None,
                    f"factor at position {i + 1} was issued before the protection "
                    f"and cannot meet the carrier",
                )
            stage = max(late)
            carrier = m.ran
            steps.append(
                TraceStep(
                    position=i + 1,
                    case=CASE_LATE_DOMINATES,
                    carrier=carrier,
                    stage=stage,
                    adjoint=stage not in direct,
                )
            )
    return steps, carrier, ""


def _check_carrier(
    reg: Registry, prot: ProtectionRecord, carrier: Tup, suffix_nf: Monomial
) -> None:
    """The three claim properties, checked by direct scan, for one carrier."""
    n = len(carrier)
    if multiply(V(carrier, carrier), suffix_nf) != suffix_nf:
        raise SoundnessError("carrier projection does not absorb the product")
    for rec in reg.generators(up_to_stage=prot.stage):
        if n <= rec.n and (rec.dom[n - 1] == carrier[-1] or rec.ran[n - 1] == carrier[-1]):
            raise SoundnessError(
                f"carrier coordinate {n} collides with generator stage {rec.stage}"
            )
    for c in prot.tuples:
        if n <= len(c) and c[n - 1] == carrier[-1]:
            raise SoundnessError(
                f"carrier coordinate {n} collides with protected tuple {format_tuple(c)}"
            )


def vanishing_witness(
    reg: Registry, prot: ProtectionRecord, pivot: Tup, word: list[Monomial]
) -> Union[VanishingTrace, ZeroReport]:
    """Trace the avoidance induction over a word containing the pivot.

    Every factor right of the leftmost pivot is irrelevant to the carrier;
    factors left of it are handled case by case: projections carry the
    carrier through, generators shorter than the carrier rewrite its prefix,
    and generators at least as deep must postdate the protection, in which
    case their range tuple takes over as the carrier. A word that collapses
    to zero yields a ZeroReport instead; preconditions raise WitnessError.
    """
    pivot = tuple(pivot)
    if pivot != reg.vanishing_tuple(prot):
        raise WitnessError(
            f"pivot {format_tuple(pivot)} is not the vanishing tuple "
            f"of the given protection"
        )
    classified = _classify_word(reg, pivot, word)
    nf = normal_form(word)
    if nf is ZERO:
        steps, _, reason = _narrate(reg, prot, pivot, word, classified, False)
        return ZeroReport(
            word=tuple(word),
            pivot=pivot,
            prot_stage=prot.stage,
            steps=tuple(steps),
            reason=reason or "the factors multiply to the zero operator",
        )
    steps, carrier, _ = _narrate(reg, prot, pivot, word, classified, True)
    assert carrier is not None
    # Verify the claim for every step against its suffix product, not just
    # at the end; the suffix normal forms are rebuilt right to left.
    suffix_nf: list[Monomial] = [ZERO] * len(word)
    acc: Monomial = word[-1]
    suffix_nf[-1] = acc
    for i in range(len(word) - 2, -1, -1):
        acc = multiply(word[i], acc)
        suffix_nf[i] = acc
    for step in steps:
        _check_carrier(reg, prot, step.carrier, suffix_nf[step.position - 1])
    return VanishingTrace(
        word=tuple(word),
        pivot=pivot,
        prot_stage=prot.stage,
        steps=tuple(steps),
        carrier=carrier,
    )


def check_state_vanishes(
    rho: DiagonalState,
    reg: Registry,
    prot: ProtectionRecord,
    pivot: Tup,
    word: list[Monomial],
) -> Scalar:
    """Evaluate the registered state on the word and prove the value is zero.

    The protection must have been generated by this state, and its horizon
    must cover every depth the trace reaches; otherwise the final carrier
    could slip past the protected prefixes.
    """
    if tuple(rho.support_set(prot.horizon)) != prot.tuples:
        raise WitnessError(
            "the supplied state does not generate the protection's tuples "
            "at its horizon"
        )
    result = vanishing_witness(reg, prot, pivot, word)
    nf = normal_form(word)
    if isinstance(result, ZeroReport):
        return Scalar(Fraction(0))
    reached = max(len(step.carrier) for step in result.steps)
    if reached > prot.horizon:
        raise HorizonError(
            f"the trace reaches depth {reached} but the protection horizon "
            f"is {prot.horizon}"
        )
    if rho.evaluate(Polynomial.projection(result.carrier)):
        raise SoundnessError("state has mass on the carrier cylinder")
    value = rho.evaluate(Polynomial.of(nf))
    if value:
        raise SoundnessError("state evaluation is nonzero despite a verified trace")
    return value


# ---------------------------------------------------------------------------
# serialization and independent re-verification


@dataclass(slots=True)
class VerifyReport:
    ok: bool
    problems: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _parse_poly(text: str) -> Polynomial:
    from .parser import parse_expr

    return eval_expr(parse_expr(text))


def _parse_scalar(text: str) -> Scalar:
    p = _parse_poly(text)
    if not p:
        return Scalar(Fraction(0))
    terms = dict(p.terms)
    unit = V((), ())
    if set(terms) != {unit}:
        raise ValueError(f"not a scalar literal: {text!r}")
    return terms[unit]


def parse_witness_block(lines: list[str], start: int) -> tuple[IdealWitness, int]:
    """Parse a witness block beginning at lines[start] == 'witness'."""
    if lines[start].strip() != "witness":
        raise ValueError(f"expected a witness block at line {start + 1}")
    fields: dict[str, str] = {}
    i = start + 1
    while i < len(lines) and lines[i].strip() != "end witness":
        key, _, value = lines[i].strip().partition(" ")
        fields[key] = value
        i += 1
    if i >= len(lines):
        raise ValueError("unterminated witness block")
    from .parser import parse_expr

    witness = IdealWitness(
        source=_parse_poly(fields["source"]),
        alpha=parse_tuple_text(fields["alpha"]),
        scalar=_parse_scalar(fields["scalar"]),
        certificate=parse_expr(fields["certificate"]),
        root=_parse_poly(fields["root"]),
    )
    return witness, i + 1


def parse_certificate_text(text: str) -> PrimenessCertificate:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "prefixalg certificate v1":
        raise ValueError("not a certificate file (bad header)")
    fields = parse_record_line(lines[1].strip(), 2)
    if fields["_kind"] != "generator":
        raise ValueError("certificate is missing its generator record")
    rec = GeneratorRecord(
        stage=int(fields["stage"]),
        n=int(fields["n"]),
        dom=parse_tuple_text(fields["dom"]),
        ran=parse_tuple_text(fields["ran"]),
        requested=(
            parse_tuple_text(fields["req_dom"]),
            parse_tuple_text(fields["req_ran"]),
        ),
        fresh=int(fields["fresh"]),
    )
    w1, nxt = parse_witness_block(lines, 2)
    w2, nxt = parse_witness_block(lines, nxt)
    product_expr: Optional[Expr] = None
    claim_text: Optional[str] = None
    from .parser import parse_expr

    for line in lines[nxt:]:
        line = line.strip()
        if not line:
            continue
        key, _, value = line.partition(" ")
        if key == "product":
            product_expr = parse_expr(value)
        elif key == "claim":
            claim_text = value
        else:
            raise ValueError(f"unexpected certificate line {line!r}")
    if product_expr is None or claim_text is None:
        raise ValueError("certificate is missing its product or claim")
    cert = PrimenessCertificate(
        witness1=w1, witness2=w2, generator=rec, product_expr=product_expr
    )
    if _parse_poly(claim_text) != cert.claim():
        raise ValueError("certificate claim does not match its generator record")
    return cert


def _verify_witness(w: IdealWitness, label: str, problems: list[str]) -> None:
    if not w.scalar:
        problems.append(f"{label}: zero compression scalar")
    if w.root.adjoint() * w.root != w.source:
        problems.append(f"{label}: source is not root'*root")
    expected = Polynomial.projection(w.alpha)
    if eval_expr(w.certificate) != expected:
        problems.append(f"{label}: certificate does not evaluate to P(alpha)")
    if w.source.compress(w.alpha) != expected.scale(w.scalar):
        problems.append(f"{label}: compression is not scalar * P(alpha)")


def verify_certificate(
    cert: PrimenessCertificate, reg: Optional[Registry] = None
) -> VerifyReport:
    """Re-derive everything a certificate claims, trusting only its text."""
    problems: list[str] = []
    _verify_witness(cert.witness1, "witness1", problems)
    _verify_witness(cert.witness2, "witness2", problems)
    rec = cert.generator
    if rec.n != max(len(rec.requested[0]), len(rec.requested[1])) + 1:
        problems.append("generator length does not follow the step rule")
    if rec.requested != (cert.witness1.alpha, cert.witness2.alpha):
        problems.append("generator was not requested for the witness cylinders")
    if eval_expr(cert.product_expr) != cert.claim():
        problems.append("product expression does not normalize to the claim")
    if reg is not None:
        if rec.stage >= len(reg.records) or reg.records[rec.stage] != rec:
            problems.append(f"registry has no matching record at stage {rec.stage}")
        report = reg.audit()
        if not report:
            problems.append(f"registry audit fails: {report.message}")
    return VerifyReport(ok=not problems, problems=problems)


def verify_certificate_text(text: str, reg: Optional[Registry] = None) -> VerifyReport:
    try:
        cert = parse_certificate_text(text)
    except (ValueError, KeyError, IndexError) as exc:
        return VerifyReport(ok=False, problems=[f"malformed certificate: {exc}"])
    return verify_certificate(cert, reg)


def parse_trace_lines(lines: list[str]) -> VanishingTrace:
    from .parser import parse_word

    fields: dict[str, str] = {}
    steps: list[TraceStep] = []
    final: Optional[Tup] = None
    for line in lines:
        line = line.strip()
        if not line:
            continue
        key, _, value = line.partition(" ")
        if key == "step":
            f = parse_record_line(line, 0)
            steps.append(
                TraceStep(
                    position=int(f["pos"]),
                    case=f["case"],
                    carrier=parse_tuple_text(f["carrier"]),
                    stage=None if f["stage"] == "-" else int(f["stage"]),
                    adjoint=f["adjoint"] == "1",
                )
            )
        elif key == "final":
            f = parse_record_line(line, 0)
            final = parse_tuple_text(f["carrier"])
        else:
            fields[key] = value
    if final is None:
        raise ValueError("trace is missing its final carrier")
    word: list[Monomial] = []
    for part in fields["word"].split("|"):
        factors = parse_word(part)
        if len(factors) != 1:
            raise ValueError(f"malformed word factor {part!r}")
        word.append(factors[0])
    return VanishingTrace(
        word=tuple(word),
        pivot=parse_tuple_text(fields["pivot"]),
        prot_stage=int(fields["prot"]),
        steps=tuple(steps),
        carrier=final,
    )


def parse_trace_text(text: str) -> VanishingTrace:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "prefixalg trace v1":
        raise ValueError("not a trace file (bad header)")
    return parse_trace_lines(lines[1:])


def verify_trace(trace: VanishingTrace, reg: Registry) -> VerifyReport:
    """Re-run the whole induction against the registry and compare."""
    problems: list[str] = []
    try:
        prot = reg.protection_by_stage(trace.prot_stage)
    except KeyError:
        return VerifyReport(False, [f"no protection at stage {trace.prot_stage}"])
    try:
        result = vanishing_witness(reg, prot, trace.pivot, list(trace.word))
    except (WitnessError, SoundnessError) as exc:
        return VerifyReport(False, [f"re-derivation failed: {exc}"])
    if isinstance(result, ZeroReport):
        return VerifyReport(False, ["the recorded word normalizes to zero"])
    if result.steps != trace.steps or result.carrier != trace.carrier:
        problems.append("re-derived trace differs from the recorded one")
    return VerifyReport(ok=not problems, problems=problems)


def verify_trace_text(text: str, reg: Registry) -> VerifyReport:
    try:
        trace = parse_trace_text(text)
    except (ValueError, KeyError, IndexError) as exc:
        return VerifyReport(ok=False, problems=[f"malformed trace: {exc}"])
    return verify_trace(trace, reg)

"""Append-only registry of linking isometries and protected state supports.

The registry hands out generators on demand. A link request for a pair of
tuples is answered by extending both to a common new length whose last
coordinate is a label never used before at that depth, either by an earlier
generator or by a protected tuple. Protections register the support of a
state so that all later generators steer clear of it; that is what makes the
state-vanishing argument run.

Records are kept in request order because the avoidance sets depend on what
came earlier. The fresh label is always the least unused one, so replaying a
log of requests reproduces the registry bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .cylinders import Tup, format_tuple, parse_tuple_text, properly_extends
from .monomials import V, normal_form
from .polynomials import DiagonalState, format_state, parse_state_text


@dataclass(frozen=True, slots=True)
class GeneratorRecord:
    """An issued linking isometry V(dom, ran) and how it was requested.

    dom and ran extend the requested pair to length n, all added coordinates
    equal to the fresh label chosen at this stage.
    """

    stage: int
    n: int
    dom: Tup
    ran: Tup
    requested: tuple[Tup, Tup]
    fresh: int

    def __post_init__(self) -> None:
        if len(self.dom) != self.n or len(self.ran) != self.n:
            raise ValueError("generator tuples must have length n")
        if not properly_extends(self.dom, self.requested[0]):
            raise ValueError("dom must properly extend the first requested tuple")
        if not properly_extends(self.ran, self.requested[1]):
            raise ValueError("ran must properly extend the second requested tuple")
        if self.dom[-1] != self.fresh or self.ran[-1] != self.fresh:
            raise ValueError("both tuples must end in the fresh label")

    def monomial(self) -> V:
        return V(self.dom, self.ran)

    def to_line(self) -> str:
        return (
            f"generator stage={self.stage} req_dom={format_tuple(self.requested[0])} "
            f"req_ran={format_tuple(self.requested[1])} n={self.n} fresh={self.fresh} "
            f"dom={format_tuple(self.dom)} ran={format_tuple(self.ran)}"
        )


@dataclass(frozen=True, slots=True)
class ProtectionRecord:
    """A registered finite family of tuples future generators must avoid.

    Usually the support of a diagonal state truncated at some horizon; the
    horizon is recorded so later checks can detect under-protection.
    """

    stage: int
    tuples: tuple[Tup, ...]
    horizon: int
    state: Optional[DiagonalState] = None

    def to_line(self) -> str:
        tuples = "|".join(format_tuple(t) for t in self.tuples)
        state = format_state(self.state) if self.state is not None else "-"
        return (
            f"protection stage={self.stage} horizon={self.horizon} "
            f"tuples={tuples} state={state}"
        )


Record = Union[GeneratorRecord, ProtectionRecord]


@dataclass(slots=True)
class AuditReport:
    ok: bool
    message: str
    stage: Optional[int] = None

    def __bool__(self) -> bool:
        return self.ok


class RegistryError(Exception):
    """A structurally invalid registry or session file."""


class Registry:
    """The ordered log of generator and protection records."""

    __slots__ = ("records",)

    def __init__(self) -> None:
        self.records: list[Record] = []

    # -- queries -------------------------------------------------------

    def generators(self, up_to_stage: Optional[int] = None) -> Iterator[GeneratorRecord]:
        for rec in self.records:
            if up_to_stage is not None and rec.stage > up_to_stage:
                break
            if isinstance(rec, GeneratorRecord):
                yield rec

    def protections(self, up_to_stage: Optional[int] = None) -> Iterator[ProtectionRecord]:
        for rec in self.records:
            if up_to_stage is not None and rec.stage > up_to_stage:
                break
            if isinstance(rec, ProtectionRecord):
                yield rec

    def protection_by_stage(self, stage: int) -> ProtectionRecord:
        for rec in self.records:
            if rec.stage == stage and isinstance(rec, ProtectionRecord):
                return rec
        raise KeyError(f"no protection record at stage {stage}")

    def generator_stages_matching(self, m: V) -> tuple[list[int], list[int]]:
        """Stages whose generator equals m, and stages whose adjoint does."""
        direct, adj = [], []
        for rec in self.generators():
            if (rec.dom, rec.ran) == (m.dom, m.ran):
                direct.append(rec.stage)
            if (rec.ran, rec.dom) == (m.dom, m.ran):
                adj.append(rec.stage)
        return direct, adj

    def _avoidance_sets(self, n: int, before_stage: int) -> tuple[set[int], set[int]]:
        """Labels unavailable at coordinate n, judged against records before
        the given stage: values used by earlier generators at that depth, and
        values of protected tuples at that depth.
        """
        used: set[int] = set()
        protected: set[int] = set()
        for rec in self.records:
            if rec.stage >= before_stage:
                break
            if isinstance(rec, GeneratorRecord):
                if n <= rec.n:
                    used.add(rec.dom[n - 1])
                    used.add(rec.ran[n - 1])
            else:
                for c in rec.tuples:
                    if n <= len(c):
                        protected.add(c[n - 1])
        return used, protected

    # -- mutations -----------------------------------------------------

    def link(self, req_dom: Tup, req_ran: Tup) -> GeneratorRecord:
        """Issue the next linking isometry for the requested pair of tuples.

        The new length is one past the longer request, and the least label
        that no earlier record blocks at that depth fills every added
        coordinate. The issued V satisfies V P(dom) V* = P(ran) exactly.
        """
        stage = len(self.records)
        n = max(len(req_dom), len(req_ran)) + 1
        used, protected = self._avoidance_sets(n, stage)
        blocked = used | protected
        fresh = 0
        while fresh in blocked:
            fresh += 1
        dom = req_dom + (fresh,) * (n - len(req_dom))
        ran = req_ran + (fresh,) * (n - len(req_ran))
        rec = GeneratorRecord(
            stage=stage, n=n, dom=dom, ran=ran, requested=(req_dom, req_ran), fresh=fresh
        )
        self.records.append(rec)
        return rec

    def register_protection(self, rho: DiagonalState, horizon: int) -> ProtectionRecord:
        """Shield the support of rho, truncated at the horizon, from all
        later generators."""
        if horizon < 1:
            raise ValueError("protection horizon must be at least 1")
        rec = ProtectionRecord(
            stage=len(self.records),
            tuples=tuple(rho.support_set(horizon)),
            horizon=horizon,
            state=rho,
        )
        self.records.append(rec)
        return rec

    # -- derived witnesses ----------------------------------------------

    def vanishing_tuple(self, prot: ProtectionRecord) -> Tup:
        """The 1-tuple whose first coordinate avoids every generator issued
        up to the protection and every protected tuple's first coordinate.
        """
        if prot.stage >= len(self.records) or self.records[prot.stage] != prot:
            raise ValueError("protection record does not belong to this registry")
        blocked: set[int] = set()
        for rec in self.generators(up_to_stage=prot.stage):
            blocked.add(rec.dom[0])
            blocked.add(rec.ran[0])
        for c in prot.tuples:
            blocked.add(c[0])
        label = 0
        while label in blocked:
            label += 1
        return (label,)

    # -- validation ------------------------------------------------------

    def audit(self) -> AuditReport:
        """Re-verify every issued generator against the full earlier log.

        Checks, per generator: equal-length tuples of the recorded length,
        proper extension of the requested pair, and freshness of the final
        coordinate against all earlier generators at that depth and all
        earlier protected tuples at that depth.
        """
        for pos, rec in enumerate(self.records):
            if rec.stage != pos:
                return AuditReport(False, f"stage {rec.stage} out of order", rec.stage)
            if not isinstance(rec, GeneratorRecord):
                continue
            if len(rec.dom) != rec.n or len(rec.ran) != rec.n:
                return AuditReport(
                    False, f"stage {rec.stage}: tuple lengths differ from n={rec.n}", rec.stage
                )
            if not (
                properly_extends(rec.dom, rec.requested[0])
                and properly_extends(rec.ran, rec.requested[1])
            ):
                return AuditReport(
                    False,
                    f"stage {rec.stage}: tuples do not properly extend the request",
                    rec.stage,
                )
            used, protected = self._avoidance_sets(rec.n, rec.stage)
            for name, value in (("dom", rec.dom[-1]), ("ran", rec.ran[-1])):
                if value in used or value in protected:
                    kind = "generator label" if value in used else "protected label"
                    return AuditReport(
                        False,
                        f"stage {rec.stage}: {name} reuses {kind} {value} "
                        f"at coordinate {rec.n}",
                        rec.stage,
                    )
            # The issued operator must conjugate its domain projection to its
            # range projection; cheap, so re-checked on every audit.
            v = rec.monomial()
            if normal_form([v, V(rec.dom, rec.dom), V(rec.ran, rec.dom)]) != V(rec.ran, rec.ran):
                return AuditReport(
                    False, f"stage {rec.stage}: conjugation identity fails", rec.stage
                )
        return AuditReport(True, "ok")

    # -- serialization -----------------------------------------------------

    def to_text(self) -> str:
        return "".join(rec.to_line() + "\n" for rec in self.records)

    @staticmethod
    def from_text(text: str) -> "Registry":
        """Rebuild a registry by replaying the recorded requests.

        Generator lines are re-derived from their requested pair and must
        reproduce the recorded result exactly; protections with a recorded
        state must reproduce the recorded support. Any mismatch means the
        file was edited or produced by different code.
        """
        reg = Registry()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = parse_record_line(line, lineno)
            kind = fields["_kind"]
            if kind == "generator":
                rec = reg.link(
                    parse_tuple_text(fields["req_dom"]), parse_tuple_text(fields["req_ran"])
                )
                recorded = (
                    int(fields["stage"]),
                    int(fields["n"]),
                    int(fields["fresh"]),
                    parse_tuple_text(fields["dom"]),
                    parse_tuple_text(fields["ran"]),
                )
                if (rec.stage, rec.n, rec.fresh, rec.dom, rec.ran) != recorded:
                    raise RegistryError(
                        f"line {lineno}: replay of the link request does not "
                        f"reproduce the recorded generator"
                    )
            elif kind == "protection":
                stage = int(fields["stage"])
                horizon = int(fields["horizon"])
                tuples_text = fields["tuples"]
                tuples = (
                    tuple(parse_tuple_text(t) for t in tuples_text.split("|"))
                    if tuples_text
                    else ()
                )
                state = None
                if fields["state"] != "-":
                    state = parse_state_text(fields["state"])
                    replayed = tuple(state.support_set(horizon))
                    if replayed != tuples:
                        raise RegistryError(
                            f"line {lineno}: recorded protection tuples do not "
                            f"match the recorded state at horizon {horizon}"
                        )
                if stage != len(reg.records):
                    raise RegistryError(f"line {lineno}: protection stage out of order")
                reg.records.append(
                    ProtectionRecord(stage=stage, tuples=tuples, horizon=horizon, state=state)
                )
            else:
                raise RegistryError(f"line {lineno}: unknown record kind {kind!r}")
        return reg


def parse_record_line(line: str, lineno: int) -> dict[str, str]:
    parts = line.split(" ")
    fields: dict[str, str] = {"_kind": parts[0]}
    for part in parts[1:]:
        key, sep, value = part.partition("=")
        if not sep:
            raise RegistryError(f"line {lineno}: malformed field {part!r}")
        fields[key] = value
    return fields

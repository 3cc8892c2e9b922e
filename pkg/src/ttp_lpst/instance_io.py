"""Reading and writing TTP instances and schedules.

Three text formats are handled here:

* instance files: a line with the team count ``n``, then ``n`` rows of ``n``
  integer distances, then an optional line of ``n`` team labels;
* the tabular schedule layout (one column per team, one row per round, ``@``
  marking an away game, optional footer of per-team distances and the total);
* the solution matrix: one line per round, entry ``(r, t)`` is the 1-based
  opponent index of team ``t``, negated when ``t`` plays away.

LF and CRLF line endings are both accepted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ttp_lpst.schedule import Schedule, team_distances


class ParseError(ValueError):
    """Base class for malformed input; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class OddTeamCountError(ParseError):
    pass


class AsymmetricMatrixError(ParseError):
    pass


class NonzeroDiagonalError(ParseError):
    pass


class MalformedNumberError(ParseError):
    pass


class UnknownTeamError(ParseError):
    pass


class PairingError(ParseError):
    pass


class ShapeError(ParseError):
    pass


class SelfPlayError(ParseError):
    pass


@dataclass(frozen=True, eq=False)
class Instance:
    """A TTP instance: ``n`` teams, a symmetric distance matrix and labels."""

    dist: np.ndarray
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        dist = np.asarray(self.dist, dtype=np.int64)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise ShapeError(f"distance matrix must be square, got {dist.shape}")
        n = dist.shape[0]
        if n < 4 or n % 2:
            raise OddTeamCountError(f"team count must be even and >= 4, got {n}")
        if np.any(np.diag(dist) != 0):
            raise NonzeroDiagonalError("distance matrix has a nonzero diagonal")
        if not np.array_equal(dist, dist.T):
            raise AsymmetricMatrixError("distance matrix is not symmetric")
        if np.any(dist < 0):
            raise MalformedNumberError("distances must be non-negative")
        names = tuple(self.names) or tuple(f"T{i + 1}" for i in range(n))
        if len(names) != n:
            raise ShapeError(f"expected {n} team names, got {len(names)}")
        if len(set(names)) != n or any(not nm or len(nm) > 4 for nm in names):
            raise ParseError("team names must be unique, non-empty, at most 4 chars")
        dist.setflags(write=False)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def rounds(self) -> int:
        return 2 * self.n - 2

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownTeamError(f"unknown team {name!r}") from None

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return self.names == other.names and np.array_equal(self.dist, other.dist)

    __hash__ = None


def _lines(text: str) -> list[tuple[int, str]]:
    """Non-blank lines with their 1-based line numbers."""
    return [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines()) if ln.strip()]


def _int(token: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise MalformedNumberError(f"not an integer: {token!r}", line) from None


def parse_instance(text: str) -> Instance:
    lines = _lines(text)
    if not lines:
        raise ShapeError("empty instance file")
    lno, first = lines[0]
    head = first.split()
    if len(head) != 1:
        raise ShapeError("first line must hold only the team count", lno)
    n = _int(head[0], lno)
    if n < 4 or n % 2:
        raise OddTeamCountError(f"team count must be even and >= 4, got {n}", lno)
    if len(lines) < n + 1:
        raise ShapeError(f"expected {n} matrix rows, found {len(lines) - 1}", lines[-1][0])

    dist = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        lno, row = lines[i + 1]
        toks = row.split()
        if len(toks) != n:
            raise ShapeError(f"expected {n} entries, got {len(toks)}", lno)
        for j, tok in enumerate(toks):
            v = _int(tok, lno)
            if v < 0:
                raise MalformedNumberError(f"negative distance {v}", lno)
            dist[i, j] = v
        if dist[i, i] != 0:
            raise NonzeroDiagonalError(f"D[{i + 1},{i + 1}] = {dist[i, i]}", lno)
    for i in range(n):
        for j in range(i):
            if dist[i, j] != dist[j, i]:
                raise AsymmetricMatrixError(
                    f"D[{i + 1},{j + 1}]={dist[i, j]} but D[{j + 1},{i + 1}]={dist[j, i]}",
                    lines[i + 1][0],
                )

    names: tuple[str, ...] = ()
    rest = lines[n + 1:]
    if len(rest) > 1:
        raise ShapeError("unexpected trailing content", rest[1][0])
    if rest:
        lno, row = rest[0]
        names = tuple(row.split())
        if len(names) != n:
            raise ShapeError(f"expected {n} team labels, got {len(names)}", lno)
        if len(set(names)) != n or any(len(nm) > 4 for nm in names):
            raise ParseError("team labels must be unique and at most 4 chars", lno)
    return Instance(dist, names)


def format_instance(inst: Instance) -> str:
    w = max(len(str(v)) for v in inst.dist.flat)
    out = [str(inst.n)]
    out += [" ".join(str(v).rjust(w) for v in row) for row in inst.dist.tolist()]
    out.append(" ".join(inst.names))
    return "\n".join(out) + "\n"


def _check_pairing(opp: np.ndarray, home: np.ndarray, row_lines: list[int]) -> None:
    n, rounds = opp.shape
    for r in range(rounds):
        for t in range(n):
            o = opp[t, r]
            if o == t:
                raise SelfPlayError(f"team {t + 1} plays itself in round {r}", row_lines[r])
            if opp[o, r] != t or home[o, r] == home[t, r]:
                raise PairingError(
                    f"round {r}: team {t + 1} and team {o + 1} disagree", row_lines[r]
                )


def parse_schedule(text: str, inst: Instance) -> Schedule:
    """Parse the tabular layout; the header and footer rows are optional.

    The result is pairing-consistent but need not be a double round-robin.
    """
    lines = _lines(text)
    n, rounds = inst.n, inst.rounds
    columns = list(range(n))
    if lines:
        toks = lines[0][1].split()
        if all(not tk.startswith("@") for tk in toks) and sorted(toks) == sorted(inst.names):
            columns = [inst.index(tk) for tk in toks]
            lines = lines[1:]
    if lines and set(lines[0][1]) <= set("- "):
        lines = lines[1:]
    if lines and all(tk.lstrip("-").isdigit() for tk in lines[-1][1].split()):
        lines = lines[:-1]
    if len(lines) != rounds:
        raise ShapeError(f"expected {rounds} rounds, got {len(lines)}", lines[-1][0] if lines else None)

    opp = np.full((n, rounds), -1, dtype=np.int64)
    home = np.zeros((n, rounds), dtype=bool)
    for r, (lno, row) in enumerate(lines):
        toks = row.split()
        if len(toks) != n:
            raise ShapeError(f"expected {n} columns, got {len(toks)}", lno)
        for c, tok in enumerate(toks):
            t = columns[c]
            away = tok.startswith("@")
            name = tok[1:] if away else tok
            if name not in inst.names:
                raise UnknownTeamError(f"unknown team {name!r}", lno)
            opp[t, r] = inst.names.index(name)
            home[t, r] = not away
    _check_pairing(opp, home, [lno for lno, _ in lines])
    return Schedule(opp, home)


def parse_footer(text: str) -> list[int] | None:
    """Return the trailing per-team distances and total, if present."""
    lines = _lines(text)
    if lines and all(tk.lstrip("-").isdigit() for tk in lines[-1][1].split()):
        return [int(tk) for tk in lines[-1][1].split()]
    return None


def render_schedule(s: Schedule, inst: Instance) -> str:
    w = max(len(nm) for nm in inst.names) + 3
    out = ["".join(nm.ljust(w) for nm in inst.names).rstrip()]
    out.append("".join("---".ljust(w) for _ in inst.names).rstrip())
    for r in range(s.rounds):
        cells = []
        for t in range(s.n):
            tok = inst.names[s.opp[t, r]]
            cells.append((tok if s.home[t, r] else "@" + tok).ljust(w))
        out.append("".join(cells).rstrip())
    per_team = team_distances(s, inst)
    out.append("".join(str(d).ljust(w) for d in per_team) + str(sum(per_team)))
    return "\n".join(out) + "\n"


def write_solution(s: Schedule) -> str:
    signed = np.where(s.home, s.opp + 1, -(s.opp + 1)).T
    w = len(str(s.n)) + 1
    return "\n".join(" ".join(str(v).rjust(w) for v in row) for row in signed.tolist()) + "\n"


def parse_solution(text: str, inst: Instance) -> Schedule:
    lines = _lines(text)
    n, rounds = inst.n, inst.rounds
    if len(lines) != rounds:
        raise ShapeError(f"expected {rounds} rounds, got {len(lines)}", lines[-1][0] if lines else None)
    opp = np.full((n, rounds), -1, dtype=np.int64)
    home = np.zeros((n, rounds), dtype=bool)
    for r, (lno, row) in enumerate(lines):
        toks = row.split()
        if len(toks) != n:
            raise ShapeError(f"expected {n} columns, got {len(toks)}", lno)
        for t, tok in enumerate(toks):
            v = _int(tok, lno)
            if v == 0 or abs(v) > n:
                raise UnknownTeamError(f"opponent index {v} out of range", lno)
            if abs(v) == t + 1:
                raise SelfPlayError(f"team {t + 1} plays itself in round {r}", lno)
            opp[t, r] = abs(v) - 1
            home[t, r] = v > 0
    _check_pairing(opp, home, [lno for lno, _ in lines])
    return Schedule(opp, home)


def looks_like_solution(text: str) -> bool:
    toks = text.split()
    return bool(toks) and all(tk.lstrip("+-").isdigit() for tk in toks)


def read_schedule(text: str, inst: Instance) -> Schedule:
    """Parse either schedule format, detected from the content."""
    if looks_like_solution(text):
        return parse_solution(text, inst)
    return parse_schedule(text, inst)

"""Plain-text instance files and MILP export.

The instance format is line oriented and whitespace separated::

    m n v
    <v levels, ascending>
    <m values of b>
    <m rows of A, n values each>
    init <n continuous values>     (optional)

Numbers are printed with ``repr``, the shortest decimal that round-trips to
the same float, so write -> read -> write reproduces a file byte for byte.
"""

from __future__ import annotations

import io as _io
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .core import Instance, Solution, ValueSet


class InstanceParseError(ValueError):
    """Parse failure with 1-based line and token coordinates."""

    def __init__(self, message: str, line: int, token: int | None = None) -> None:
        self.line = line
        self.token = token
        where = f"line {line}" if token is None else f"line {line}, token {token}"
        super().__init__(f"{where}: {message}")


def _fmt(v: float) -> str:
    return repr(float(v))


def format_values(vec: Iterable[float]) -> str:
    return " ".join(_fmt(v) for v in vec)


def write_instance(inst: Instance, target: str | Path | IO[str]) -> None:
    """Write an instance in the text format; see the module docstring."""
    own = isinstance(target, (str, Path))
    fh = open(target, "w") if own else target
    try:
        fh.write(f"{inst.m} {inst.n} {len(inst.values)}\n")
        fh.write(format_values(inst.values.levels) + "\n")
        fh.write(format_values(inst.b) + "\n")
        for row in inst.A:
            fh.write(format_values(row) + "\n")
        if inst.continuous_init is not None:
            fh.write("init " + format_values(inst.continuous_init) + "\n")
    finally:
        if own:
            fh.close()


def instance_to_text(inst: Instance) -> str:
    buf = _io.StringIO()
    write_instance(inst, buf)
    return buf.getvalue()


class _Lines:
    """Non-blank lines with their original 1-based numbers."""

    def __init__(self, text: str) -> None:
        self.items = [
            (k, line.split())
            for k, line in enumerate(text.splitlines(), start=1)
            if line.strip()
        ]
        self.pos = 0
        self.last_lineno = self.items[-1][0] if self.items else 1

    def next(self, what: str) -> tuple[int, list[str]]:
        if self.pos >= len(self.items):
            raise InstanceParseError(f"missing {what}", self.last_lineno + 1)
        item = self.items[self.pos]
        self.pos += 1
        return item

    def exhausted(self) -> bool:
        return self.pos >= len(self.items)


def _floats(tokens: list[str], lineno: int, count: int, what: str) -> np.ndarray:
    if len(tokens) != count:
        raise InstanceParseError(
            f"expected {count} values for {what}, found {len(tokens)}", lineno
        )
    out = np.empty(count)
    for k, tok in enumerate(tokens):
        try:
            out[k] = float(tok)
        except ValueError:
            raise InstanceParseError(
                f"bad number {tok!r} in {what}", lineno, token=k + 1
            ) from None
    return out


def read_instance(source: str | Path | IO[str]) -> Instance:
    """Parse the text format back into an :class:`Instance`."""
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
    else:
        text = source.read()
    lines = _Lines(text)

    lineno, header = lines.next("header line 'm n v'")
    if len(header) != 3:
        raise InstanceParseError(
            f"header must read 'm n v' (3 integers), found {len(header)} tokens", lineno
        )
    dims = []
    for k, tok in enumerate(header):
        try:
            val = int(tok)
        except ValueError:
            raise InstanceParseError(
                f"bad integer {tok!r} in header", lineno, token=k + 1
            ) from None
        if val < 1:
            raise InstanceParseError(
                f"header dimensions must be positive, found {val}", lineno, token=k + 1
            )
        dims.append(val)
    m, n, v = dims

    lineno, toks = lines.next("levels line")
    lv = _floats(toks, lineno, v, "levels")
    if v > 1 and not np.all(np.diff(lv) > 0):
        raise InstanceParseError("levels must be strictly increasing", lineno)

    lineno, toks = lines.next("b line")
    b = _floats(toks, lineno, m, "b")

    rows = np.empty((m, n))
    for r in range(m):
        lineno, toks = lines.next(f"row {r + 1} of A")
        rows[r] = _floats(toks, lineno, n, f"row {r + 1} of A")

    init = None
    if not lines.exhausted():
        lineno, toks = lines.next("trailing content")
        if toks[0] != "init":
            raise InstanceParseError(
                f"unexpected trailing content {toks[0]!r}; only an 'init' line may follow A",
                lineno,
                token=1,
            )
        init = _floats(toks[1:], lineno, n, "init")
        if not lines.exhausted():
            lineno, _ = lines.next("trailing content")
            raise InstanceParseError("unexpected content after the init line", lineno)

    return Instance(rows, b, ValueSet(lv), continuous_init=init)


def write_solution(sol: Solution, inst: Instance, target: str | Path | IO[str]) -> None:
    """One line holding the solution's values, init-line compatible."""
    own = isinstance(target, (str, Path))
    fh = open(target, "w") if own else target
    try:
        fh.write(format_values(sol.values(inst)) + "\n")
    finally:
        if own:
            fh.close()


_LP_WRAP = 72


def _write_wrapped(fh: IO[str], terms: list[str], indent: str = "   ") -> None:
    line = " "
    for term in terms:
        if len(line) + len(term) + 1 > _LP_WRAP and line.strip():
            fh.write(line + "\n")
            line = indent
        line += " " + term
    if line.strip():
        fh.write(line + "\n")


def _lp_terms(coefs: np.ndarray, names: list[str]) -> list[str]:
    terms = []
    for c, name in zip(coefs, names):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        terms.append(f"{sign} {_fmt(abs(c))} {name}")
    return terms


def export_lp(inst: Instance, target: str | Path | IO[str]) -> None:
    """Write the exact mixed-integer reformulation in LP format.

    Objective ``min t`` with ``2m`` residual constraints ``+-(Ax - b) <=
    t`` and one selector row per variable; each ``x_j`` is written as
    ``sum_v level_v * z_j_v`` with binary selectors summing to one.
    """
    own = isinstance(target, (str, Path))
    fh = open(target, "w") if own else target
    try:
        lv = inst.values.levels
        names = [[f"z_{j}_{v}" for v in range(lv.size)] for j in range(inst.n)]
        flat_names = [nm for per_var in names for nm in per_var]
        fh.write("Minimize\n obj: t\nSubject To\n")
        for k in range(inst.m):
            coefs = np.concatenate([inst.A[k, j] * lv for j in range(inst.n)])
            terms = _lp_terms(coefs, flat_names)
            rhs = _fmt(inst.b[k])
            fh.write(f" up_{k}:\n")
            _write_wrapped(fh, terms + ["- t", "<=", rhs])
            fh.write(f" lo_{k}:\n")
            _write_wrapped(fh, terms + ["+ t", ">=", rhs])
        for j in range(inst.n):
            fh.write(f" sel_{j}:\n")
            _write_wrapped(fh, [f"+ {nm}" for nm in names[j]] + ["=", "1"])
        fh.write("Bounds\n t >= 0\nBinaries\n")
        _write_wrapped(fh, flat_names, indent=" ")
        fh.write("End\n")
    finally:
        if own:
            fh.close()

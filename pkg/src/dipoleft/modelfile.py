"""Line-oriented model-file parser with per-line diagnostics.

Directives:

    dim 4
    constant <name> [real] [positive]
    slot <name> exact <potential>
    slot <name> fundamental
    flavor <name> mass <sym> chirality +|- coeff <monomial> combo <signed-slot-sum>
    absorb <constant>^2 as <name> [scale <rational>[/pi^<k>]]

'#' starts a comment.  Constants must be declared before use; reserved
engine names cannot be declared.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .algebra import RESERVED_NAMES, Coefficient
from .action import AbsorbDirective, FlavorSpec, ModelSpec, SlotSpec

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_COMBO_TOKEN = re.compile(r"([+-]?)([A-Za-z_][A-Za-z0-9_]*)")


@dataclass(frozen=True)
class Diagnostic:
    code: str
    line: int
    message: str
    text: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.code}: {self.message}"


class ModelFileError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = tuple(diagnostics)
        super().__init__("; ".join(str(d) for d in diagnostics))


class _Collector:
    def __init__(self) -> None:
        self.diagnostics: list[Diagnostic] = []

    def add(self, code: str, line: int, message: str, text: str = "") -> None:
        self.diagnostics.append(Diagnostic(code, line, message, text))


def _parse_rational(token: str) -> Fraction:
    return Fraction(token)  # accepts "3", "-1/2", ...


def parse_monomial(token: str, declared: set[str]) -> Coefficient:
    """Parse a product of declared constants with integer powers and one
    rational prefactor, e.g. ``e*alpha/2`` or ``-1/8*e^2*pi^-1``."""
    coeff = Coefficient.one()
    for piece in token.split("*"):
        piece = piece.strip()
        if not piece:
            raise ValueError("empty factor in monomial")
        m = re.fullmatch(r"(-?\d+(?:/\d+)?)", piece)
        if m:
            coeff = coeff.gaussian_scaled(_parse_rational(piece))
            continue
        m = re.fullmatch(r"(-?)([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?(?:/(\d+))?", piece)
        if not m:
            raise ValueError(f"bad monomial factor {piece!r}")
        neg, name, power, divisor = m.groups()
        if name != "pi" and name not in declared:
            raise ValueError(f"undeclared constant {name!r}")
        coeff = coeff.with_consts(**{name: int(power) if power else 1})
        if neg:
            coeff = coeff.gaussian_scaled(Fraction(-1))
        if divisor:
            coeff = coeff.gaussian_scaled(Fraction(1, int(divisor)))
    return coeff


def _parse_scale(token: str) -> Coefficient:
    """``<rational>[/pi^<k>]`` with /pi meaning /pi^1."""
    pi_power = 0
    if "/pi" in token:
        head, _, tail = token.partition("/pi")
        if tail.startswith("^"):
            pi_power = -int(tail[1:])
        elif tail == "":
            pi_power = -1
        else:
            raise ValueError(f"bad scale suffix {tail!r}")
        token = head
    coeff = Coefficient(re=_parse_rational(token))
    if pi_power:
        coeff = coeff.with_consts(pi=pi_power)
    return coeff


def _parse_combo(token: str) -> list[tuple[int, str]]:
    combo: list[tuple[int, str]] = []
    pos = 0
    for m in _COMBO_TOKEN.finditer(token):
        if m.start() != pos:
            raise ValueError(f"bad combo near {token[pos:]!r}")
        sign, name = m.groups()
        combo.append((-1 if sign == "-" else +1, name))
        pos = m.end()
    if pos != len(token) or not combo:
        raise ValueError(f"bad combo {token!r}")
    return combo


def parse_model(text: str) -> ModelSpec:
    """Parse and validate a model file; raises ModelFileError with every
    diagnostic found (each carrying a line number)."""
    diags = _Collector()
    dimension: int | None = None
    constants: set[str] = set()
    slots: list[SlotSpec] = []
    flavors: list[FlavorSpec] = []
    absorb: list[AbsorbDirective] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]

        if head == "dim":
            if len(tokens) != 2 or not tokens[1].isdigit():
                diags.add("syntax", line_no, "expected: dim <integer>", raw)
            elif int(tokens[1]) != 4:
                diags.add("unsupported-dimension", line_no, f"unsupported dimension {tokens[1]}", raw)
            else:
                dimension = 4

        elif head == "constant":
            if len(tokens) < 2 or not _IDENT.match(tokens[1]):
                diags.add("syntax", line_no, "expected: constant <name> [real] [positive]", raw)
                continue
            name = tokens[1]
            if name in RESERVED_NAMES:
                diags.add("reserved-name", line_no, f"{name!r} is reserved by the engine", raw)
                continue
            if name in constants:
                diags.add("duplicate-constant", line_no, f"constant {name!r} already declared", raw)
                continue
            for flag in tokens[2:]:
                if flag not in ("real", "positive"):
                    diags.add("syntax", line_no, f"unknown constant flag {flag!r}", raw)
            constants.add(name)

        elif head == "slot":
            if len(tokens) == 3 and tokens[2] == "fundamental":
                spec = SlotSpec(tokens[1], None)
            elif len(tokens) == 4 and tokens[2] == "exact":
                spec = SlotSpec(tokens[1], tokens[3])
            else:
                diags.add("syntax", line_no, "expected: slot <name> exact <potential> | slot <name> fundamental", raw)
                continue
            if any(s.name == spec.name for s in slots):
                diags.add("duplicate-slot", line_no, f"slot {spec.name!r} already declared", raw)
                continue
            if spec.name in RESERVED_NAMES or (spec.potential in RESERVED_NAMES):
                diags.add("reserved-name", line_no, "slot and potential names may not be reserved names", raw)
                continue
            slots.append(spec)

        elif head == "flavor":
            expected = ("flavor", None, "mass", None, "chirality", None, "coeff", None, "combo", None)
            if len(tokens) != len(expected) or any(
                want is not None and got != want for want, got in zip(expected, tokens)
            ):
                diags.add(
                    "syntax",
                    line_no,
                    "expected: flavor <name> mass <sym> chirality +|- coeff <monomial> combo <slots>",
                    raw,
                )
                continue
            name, mass, chir_tok, coeff_tok, combo_tok = tokens[1], tokens[3], tokens[5], tokens[7], tokens[9]
            if any(f.name == name for f in flavors):
                diags.add("duplicate-flavor", line_no, f"flavor {name!r} already declared", raw)
                continue
            if mass != "0" and (not _IDENT.match(mass) or mass in RESERVED_NAMES):
                diags.add("reserved-name", line_no, f"bad mass symbol {mass!r}", raw)
                continue
            if chir_tok not in ("+", "-"):
                diags.add("syntax", line_no, "chirality must be + or -", raw)
                continue
            try:
                coeff = parse_monomial(coeff_tok, constants)
            except ValueError as exc:
                diags.add("bad-monomial", line_no, str(exc), raw)
                continue
            try:
                combo = _parse_combo(combo_tok)
            except ValueError as exc:
                diags.add("bad-combo", line_no, str(exc), raw)
                continue
            known_slots = {s.name for s in slots}
            missing = [s for _, s in combo if s not in known_slots]
            if missing:
                diags.add("unknown-slot", line_no, f"combo references undeclared slot(s) {missing}", raw)
                continue
            flavors.append(
                FlavorSpec(
                    name=name,
                    mass=mass,
                    chirality=+1 if chir_tok == "+" else -1,
                    coeff=coeff,
                    combo=tuple(combo),
                )
            )

        elif head == "absorb":
            m = re.fullmatch(
                r"absorb\s+([A-Za-z_][A-Za-z0-9_]*)\^2\s+as\s+([A-Za-z_][A-Za-z0-9_]*)"
                r"(?:\s+scale\s+(\S+))?",
                line,
            )
            if not m:
                diags.add("syntax", line_no, "expected: absorb <constant>^2 as <name> [scale <rational>[/pi^<k>]]", raw)
                continue
            coupling, finite, scale_tok = m.groups()
            if coupling not in constants:
                diags.add("unknown-constant", line_no, f"absorb references undeclared constant {coupling!r}", raw)
                continue
            if finite in RESERVED_NAMES:
                diags.add("reserved-name", line_no, f"{finite!r} is reserved by the engine", raw)
                continue
            scale = Coefficient.one()
            if scale_tok is not None:
                try:
                    scale = _parse_scale(scale_tok)
                except (ValueError, ZeroDivisionError) as exc:
                    diags.add("bad-scale", line_no, f"bad scale {scale_tok!r}: {exc}", raw)
                    continue
            absorb.append(AbsorbDirective(coupling=coupling, finite_name=finite, scale=scale))

        else:
            diags.add("syntax", line_no, f"unknown directive {head!r}", raw)

    if dimension is None and not any(d.code == "unsupported-dimension" for d in diags.diagnostics):
        diags.add("missing-dim", 0, "model file must declare 'dim 4'")
    if diags.diagnostics:
        raise ModelFileError(diags.diagnostics)
    return ModelSpec(
        dimension=dimension or 4,
        slots=tuple(slots),
        flavors=tuple(flavors),
        absorb=tuple(absorb),
        constants=tuple(sorted(constants)),
    )

"""
Naming and sign conventions for single-block output

Reference tables write the torus variables as t0, t1, ..., tn.  Computed
labels use t[r][1]; the two agree after a cyclic renaming of the residues
and, for edge labels, one global sign.
"""

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple, TypeVar, Union

from core.errors import InstanceError
from core.exactalg import T0, Character, Polynomial, VarId, rho_shift, rho_shift_character
from core.fixpoints import FixedPoint, parse_point
from core.model import Instance
from utils.logger import setup_logger

logger = setup_logger(__name__)

K = TypeVar("K")

_TERM_RE = re.compile(r"([+-]?)\s*(\d*)\s*\*?\s*t_?(\d+)")


@dataclass(frozen=True)
class Convention:
    """Multiply labels by sign and rename t[r][1] to t_{((r + shift) mod n) + 1}"""
    sign: int
    shift: int

    def label(self, w: Character, n: int) -> Character:
        return self.sign * rho_shift_character(w, self.shift, n)

    def restriction(self, p: Polynomial, n: int) -> Polynomial:
        """Classes only take the renaming; the sign is a choice of label generator"""
        return rho_shift(p, self.shift, n)

    def to_json(self) -> Dict[str, int]:
        return {"sign": self.sign, "shift": self.shift}


def _named(var: VarId) -> str:
    return "t0" if var.is_t0 else f"t{var.residue + 1}"


def format_named(p: Union[Polynomial, Character]) -> str:
    """Render a single-block polynomial with t1..tn names"""
    if isinstance(p, Character):
        p = p.to_polynomial()
    text = str(p)
    return re.sub(r"t\[(\d+)\]\[1\]", lambda m: f"t{int(m.group(1)) + 1}", text)


def parse_named_character(text: str, n: int) -> Character:
    """
    Read a linear form written as e.g. "t3+2t0-t2"

    Raises:
        InstanceError: on malformed text or a variable index above n
    """
    compact = text.replace(" ", "")
    coeffs: Dict[VarId, int] = {}
    pos = 0
    for match in _TERM_RE.finditer(compact):
        if match.start() != pos or (pos and not match.group(1)):
            raise InstanceError(f"cannot parse character {text!r}")
        pos = match.end()
        k = int(match.group(3))
        if k > n:
            raise InstanceError(f"variable t{k} does not exist for n={n}")
        var = T0 if k == 0 else VarId.rot(k - 1, 1, n)
        scale = int(match.group(2)) if match.group(2) else 1
        coeffs[var] = coeffs.get(var, 0) + (-scale if match.group(1) == "-" else scale)
    if pos != len(compact) or not compact:
        raise InstanceError(f"cannot parse character {text!r}")
    return Character(coeffs)


def parse_named_polynomial(text: str, n: int) -> Polynomial:
    """Product of parenthesised linear forms, or a single linear form, or 0"""
    text = text.strip()
    if text == "0":
        return Polynomial.zero()
    factors = re.findall(r"\(([^()]*)\)", text)
    if not factors:
        return parse_named_character(text, n).to_polynomial()
    result = Polynomial.constant(1)
    for factor in factors:
        result = result * parse_named_character(factor, n).to_polynomial()
    return result


def find_convention(labels: Mapping[K, Character], reference: Mapping[K, Character],
                    n: int) -> Optional[Convention]:
    """
    The unique convention turning every computed label into its reference

    Args:
        labels: Computed labels keyed by edge
        reference: Reference labels over the same keys
        n: Number of vertices

    Returns:
        The matching convention, or None when there is no match or the
        match is not unique
    """
    if set(labels) != set(reference):
        logger.warning("reference edges differ from the computed edges")
        return None
    matches = [
        Convention(sign, shift)
        for sign in (1, -1)
        for shift in range(n)
        if all(Convention(sign, shift).label(w, n) == reference[key] for key, w in labels.items())
    ]
    if len(matches) != 1:
        logger.warning(f"{len(matches)} conventions match the reference labels")
        return None
    return matches[0]


def load_reference(path: Union[str, Path], inst: Instance) -> Dict[Tuple[FixedPoint, FixedPoint], Character]:
    """
    Read reference edge labels from JSON

    The file holds {"edges": [{"src": "I={0}", "dst": "I={0,1}",
    "label": "t3+2t0-t2"}, ...]}.
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InstanceError(f"cannot read reference {path}: {e}") from e
    reference: Dict[Tuple[FixedPoint, FixedPoint], Character] = {}
    for item in data.get("edges", []):
        key = (parse_point(item["src"], inst), parse_point(item["dst"], inst))
        reference[key] = parse_named_character(item["label"], inst.n)
    return reference

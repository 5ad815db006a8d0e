# Functions needed for `dom_bot`
#
# Created On: Oct 19, 2026
#

from pathlib import Path
import configparser
import json
import re
import zlib

import numpy as np

from .constants import *
from ..analysis.errors import ConfigError, ParameterError, ResolutionError
from ..analysis.grid import Cube, GridFunction, standard_lattice
from ..analysis.sparse import SparseFamily
from ..analysis.weights import constant_weight, power_weight, product_weight, step_weight


CWD = Path.cwd()

_CALL = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\((.*)\))?\s*$")
_SECTION = re.compile(r"^\s*\[([^\]]+)\]")
_KEY = re.compile(r"^\s*([^\s=:#;\[][^=:]*?)\s*[=:]")


class Lcg:
    """
    The linear congruential generator ``x' = (1664525 x + 1013904223) mod 2^32``.

    ``uniform()`` is ``x / 2^32``. Named sub-streams start from
    ``crc32(label) xor seed`` so that a suite can be rebuilt stream by stream.
    """

    A = 1664525
    C = 1013904223
    M = 2 ** 32

    def __init__(self, seed:int=0):
        self._state = int(seed) % self.M

    @classmethod
    def stream(cls, seed:int, label:str):
        return cls(zlib.crc32(label.encode("utf-8")) ^ (int(seed) % cls.M))

    @property
    def state(self):
        return self._state

    def next_u32(self):
        self._state = (self.A * self._state + self.C) % self.M
        return self._state

    def uniform(self, size:int=None):
        if size is None:
            return self.next_u32() / self.M
        return np.array([self.next_u32() / self.M for _ in range(int(size))])

    def between(self, lo:float, hi:float):
        return lo + (hi - lo) * self.uniform()

    def integer(self, lo:int, hi:int):
        """Uniform integer in ``[lo, hi)``."""
        return lo + min(int(self.uniform() * (hi - lo)), hi - lo - 1)


def parse_call(text:str):
    """
    Split ``name(a, b, ...)`` into the name and its float arguments.

    >>> parse_call("power(0.5)")
    ('power', [0.5])
    """
    m = _CALL.match(str(text))
    if not m:
        raise ParameterError(f"cannot parse '{text}'")
    name, args = m.group(1), m.group(2)
    if not args or not args.strip():
        return name, []
    try:
        return name, [float(a) for a in args.split(",")]
    except ValueError:
        raise ParameterError(f"bad parameters in '{text}'")


def print_summary(reports, heading:str="Checks"):
    """Print one styled line per report."""
    print(f"\n{INDENT}{STYLE['heading']}{heading}{STYLE['reset']}")
    for rep in sorted(reports, key=lambda r: r.check_id):
        status = f"{STYLE['pass']}PASS" if rep.passed else f"{STYLE['fail']}FAIL"
        print(
            f"{INDENT + '  '}{STYLE['id']}{rep.check_id:<20}{STYLE['reset']} {status}{STYLE['reset']}"
            f"  empirical {STYLE['number']}{rep.empirical:.6g}{STYLE['reset']}"
            f"  ceiling {STYLE['value']}{rep.ceiling:.6g}{STYLE['reset']}"
        )
    print()


def print_error(kind:str, message:str):
    print(f"{STYLE['error']}{kind}{STYLE['reset']}: {message}")


# ---------- scenario files ----------

def _ini_lines(text:str):
    lines, section = {}, None
    for i, line in enumerate(text.splitlines(), start=1):
        m = _SECTION.match(line)
        if m:
            section = m.group(1).strip()
            lines.setdefault((section, None), i)
            continue
        m = _KEY.match(line)
        if m and section is not None:
            lines.setdefault((section, m.group(1).strip()), i)
    return lines


def _json_lines(text:str, sections:dict):
    def lineno(pos):
        return text.count("\n", 0, pos) + 1

    lines = {}
    for name, body in sections.items():
        start = text.find(f'"{name}"')
        if start < 0:
            continue
        lines[(name, None)] = lineno(start)
        for key in body:
            pos = text.find(f'"{key}"', start + len(name) + 2)
            if pos >= 0:
                lines[(name, key)] = lineno(pos)
    return lines


def read_config(path:Path):
    """
    Read a scenario file into ``(sections, lines)``.

    `sections` maps section names to ``{key: value}``; `lines` maps
    ``(section, key)`` (key None for the header) to the line number in the
    file. A ``.json`` suffix selects the JSON form, anything else the
    key=value form.

    Raises
    ------
    ConfigError
        If the file cannot be read or parsed.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read scenario: {e.strerror}", path=path)

    if path.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(e.msg, path=path, lineno=e.lineno)
        if not isinstance(data, dict) or not all(isinstance(v, dict) for v in data.values()):
            raise ConfigError("a JSON scenario maps section names to objects", path=path, lineno=1)
        return {name: dict(body) for name, body in data.items()}, _json_lines(text, data)

    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as e:
        lineno = getattr(e, "lineno", None)
        if lineno is None and getattr(e, "errors", None):
            lineno = e.errors[0][0]
        raise ConfigError(str(e).splitlines()[0], path=path, lineno=lineno)
    sections = {name: dict(parser.items(name)) for name in parser.sections()}
    return sections, _ini_lines(text)


def split_list(value):
    """``"a, b"`` or ``["a", "b"]`` -> ``["a", "b"]``."""
    if isinstance(value, (list, tuple)):
        return [str(v).strip() for v in value if str(v).strip()]
    return [part.strip() for part in str(value).split(",") if part.strip()]


# ---------- grids and generators ----------

def make_grid(dim:int, cells:int):
    """Zero function on the box ``[-1, 1)^dim`` with `cells` cells per axis."""
    if dim not in (1, 2):
        raise ParameterError(f"dimension must be 1 or 2, got {dim}")
    if cells < 2:
        raise ParameterError(f"need at least 2 cells per axis, got {cells}")
    h = 2.0 / cells
    return GridFunction(np.zeros((cells,) * dim), h=h, origin=(-1.0,) * dim)


def _middle_mask(template:GridFunction, lo:float, hi:float):
    mask = np.ones(template.cells, dtype=bool)
    for axis in range(template.dim):
        x = template.axis_centers(axis)
        inside = (x >= lo) & (x < hi)
        shape = [1] * template.dim
        shape[axis] = -1
        mask &= inside.reshape(shape)
    return mask


def _pieces(template:GridFunction, k:int, values):
    """Piecewise constant on a ``k^n`` partition of ``[-1/2, 1/2)^n``, zero elsewhere."""
    idx = []
    for axis in range(template.dim):
        x = template.axis_centers(axis)
        i = np.floor((x + 0.5) * k).astype(int)
        shape = [1] * template.dim
        shape[axis] = -1
        idx.append(np.clip(i, 0, k - 1).reshape(shape))
    table = np.asarray(values, dtype=float).reshape((k,) * template.dim)
    out = table[tuple(np.broadcast_arrays(*idx))]
    return np.where(_middle_mask(template, -0.5, 0.5), out, 0.0)


def generate_f(text:str, template:GridFunction, rng:Lcg):
    """
    A bounded compactly supported function from its config spelling:

    - ``indicator(a, b)``: the cube ``[a, b)^n``; without bounds a random one in ``[-1/2, 1/2)^n``
    - ``steps(k)``: random positive steps on a ``k^n`` partition of ``[-1/2, 1/2)^n``
    - ``spike``: unit mass on one random cell of ``[-1/2, 1/2)^n``
    - ``random``: independent uniform samples on ``[-1/2, 1/2)^n``
    """
    name, args = parse_call(text)
    n = template.dim
    if name == "indicator":
        if len(args) == 2:
            a, b = args
        elif not args:
            a = rng.between(-0.5, 0.3)
            b = min(a + rng.between(0.1, 0.5), 0.5)
        else:
            raise ParameterError(f"indicator takes 0 or 2 parameters, got {len(args)}")
        mask = _middle_mask(template, a, b)
        if not mask.any():
            mask[tuple(c // 2 for c in template.cells)] = True
        return template.with_values(mask.astype(float))
    if name == "steps":
        k = int(args[0]) if args else 4
        if k < 1:
            raise ParameterError(f"steps needs k >= 1, got {k}")
        return template.with_values(_pieces(template, k, 0.1 + rng.uniform(k ** n)))
    if name == "spike":
        live = np.flatnonzero(_middle_mask(template, -0.5, 0.5).ravel())
        vals = np.zeros(template.values.size)
        vals[live[rng.integer(0, live.size)]] = 1.0 / template.cell_volume
        return template.with_values(vals.reshape(template.cells))
    if name == "random":
        mask = _middle_mask(template, -0.5, 0.5)
        vals = np.zeros(template.cells)
        vals[mask] = rng.uniform(int(mask.sum()))
        return template.with_values(vals)
    raise ParameterError(f"unknown f generator '{name}', expected one of {F_GENERATORS}")


def generate_b(text:str, template:GridFunction, rng:Lcg):
    """A BMO function: ``sign``, ``log``, ``steps(k)``, ``linear`` or ``constant(c)``."""
    name, args = parse_call(text)
    x1 = np.broadcast_to(
        template.axis_centers(0).reshape((-1,) + (1,) * (template.dim - 1)), template.cells
    )
    if name == "sign":
        return template.with_values(np.sign(x1))
    if name == "log":
        r = np.linalg.norm(template.centers(), axis=1).reshape(template.cells)
        return template.with_values(np.log(np.maximum(r, template.h / 2)))
    if name == "steps":
        k = int(args[0]) if args else 4
        if k < 1:
            raise ParameterError(f"steps needs k >= 1, got {k}")
        levels = 2.0 * rng.uniform(k) - 1.0
        idx = np.clip(np.floor((x1 + 1.0) * k / 2.0).astype(int), 0, k - 1)
        return template.with_values(levels[idx])
    if name == "linear":
        return template.with_values(np.array(x1))
    if name == "constant":
        c = args[0] if args else 1.0
        return template.with_values(np.full(template.cells, float(c)))
    raise ParameterError(f"unknown b generator '{name}', expected one of {B_GENERATORS}")


def generate_w(text:str, template:GridFunction, rng:Lcg):
    """A weight: ``constant(c)``, ``power(alpha)``, ``step(v1, v2, ...)`` or ``product(alpha, beta)``."""
    name, args = parse_call(text)
    geo = dict(h=template.h, origin=template.origin)
    if name == "constant":
        return constant_weight(template.cells, c=args[0] if args else 1.0, dim=template.dim, **geo)
    if name == "power":
        if len(args) != 1:
            raise ParameterError("power takes one parameter")
        return power_weight(template.cells, args[0], dim=template.dim, **geo)
    if name == "step":
        levels = args if args else list(1.0 + 9.0 * rng.uniform(3))
        if any(v <= 0 for v in levels):
            raise ParameterError(f"step levels must be positive, got {levels}")
        return step_weight(template.cells, levels, dim=template.dim, **geo)
    if name == "product":
        if template.dim != 2 or len(args) != 2:
            raise ParameterError("product takes two parameters and lives in dimension 2")
        return product_weight(template.cells, args[0], args[1], **geo)
    raise ParameterError(f"unknown weight generator '{name}', expected one of {W_GENERATORS}")


def random_cubes(template:GridFunction, rng:Lcg, count:int):
    """`count` grid-aligned cubes inside the box."""
    N = min(template.cells)
    out = []
    for _ in range(count):
        s = rng.integer(1, N + 1)
        lo = [rng.integer(0, c - s + 1) for c in template.cells]
        out.append(template.cube_from_index(lo, s))
    return out


def random_family(template:GridFunction, rng:Lcg, shrink:int=1, branching:int=1):
    """
    A random tree of standard-lattice cubes rooted at the box.

    Every node gets up to `branching` distinct children of ``2^-shrink`` times
    its side, so the Carleson constant is at most ``1 / (1 - branching 2^{-shrink n})``.

    Raises
    ------
    ResolutionError
        When the box is not ``2^m`` cells wide.
    """
    N = template.cells[0]
    n = template.dim
    if len(set(template.cells)) != 1 or N & (N - 1):
        raise ResolutionError(f"random families need 2^m cells per axis, got {template.cells}")
    ratio = 2 ** shrink
    if branching * ratio ** -n >= 1:
        raise ParameterError(f"{branching} children of ratio 1/{ratio} do not give a sparse family")
    lattice = standard_lattice(template)
    cubes = []
    queue = [((0,) * n, N)]
    while queue:
        lo, s = queue.pop(0)
        cubes.append(template.cube_from_index(lo, s))
        t = s // ratio
        if t < 1:
            continue
        slots = ratio ** n
        chosen = []
        for _ in range(branching):
            slot = rng.integer(0, slots)
            if slot not in chosen:
                chosen.append(slot)
        for slot in chosen:
            offset = np.unravel_index(slot, (ratio,) * n)
            queue.append((tuple(a + int(o) * t for a, o in zip(lo, offset)), t))
    return SparseFamily(lattice, cubes, cell=template.h)

"""Run configuration: a flat ``key = value`` text file.

Lists are comma separated, rationals are written as ``a/b``.  Lines starting
with ``#`` are comments.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .local import is_local_square, is_odd_prime, smallest_nonresidue

SUITE_NAMES = (
    "cocycle-identity", "relation-3", "lemma-31-1", "lemma-31-2", "prop-32-H",
    "prop-32-G", "prop-33", "gamma-props", "bruhat-roundtrip", "space-dichotomy",
    "h-plus",
)


class InvalidConfig(ValueError):
    pass


class UnknownSuite(InvalidConfig):
    pass


@dataclass(frozen=True)
class RunConfig:
    p: int
    delta: Fraction
    m: int
    gram_V: tuple
    r: int
    trials: int = 100
    seed: int = 0
    word_len: int = 6
    suites: tuple = SUITE_NAMES
    search_bound: int = 8
    psi_scale: Fraction = Fraction(1)
    dump_limit: int = 20

    def __post_init__(self):
        validate(self)

    def with_(self, **kw) -> RunConfig:
        return replace(self, **kw)

    def as_dict(self) -> dict:
        """String-valued view, used in reports and replay files."""
        return {
            "p": str(self.p), "delta": str(self.delta), "m": str(self.m),
            "gram_V": [str(a) for a in self.gram_V], "r": str(self.r),
            "trials": str(self.trials), "seed": str(self.seed),
            "word_len": str(self.word_len), "suites": list(self.suites),
            "search_bound": str(self.search_bound), "psi_scale": str(self.psi_scale),
            "dump_limit": str(self.dump_limit),
        }


def validate(c: RunConfig) -> None:
    if not is_odd_prime(c.p):
        raise InvalidConfig(f"p must be an odd prime (got {c.p})")
    if not c.delta:
        raise InvalidConfig("delta must be nonzero")
    if is_local_square(c.delta, c.p):
        raise InvalidConfig(f"delta = {c.delta} is a square at p = {c.p}")
    if c.m < 1:
        raise InvalidConfig("m must be >= 1")
    if len(c.gram_V) != c.m:
        raise InvalidConfig(f"gram_V has {len(c.gram_V)} entries, expected m = {c.m}")
    if any(a == 0 for a in c.gram_V):
        raise InvalidConfig("gram_V entries must be nonzero")
    if c.r < 1:
        raise InvalidConfig("r must be >= 1")
    if c.trials < 1:
        raise InvalidConfig("trials must be >= 1")
    if not 0 <= c.seed < 2 ** 64:
        raise InvalidConfig("seed must be a 64-bit unsigned integer")
    if c.word_len < 0:
        raise InvalidConfig("word_len must be >= 0")
    if c.search_bound < 1:
        raise InvalidConfig("search_bound must be >= 1")
    if not c.psi_scale:
        raise InvalidConfig("psi_scale must be nonzero")
    if c.dump_limit < 0:
        raise InvalidConfig("dump_limit must be >= 0")
    for s in c.suites:
        if s not in SUITE_NAMES:
            raise UnknownSuite(f"unknown suite {s!r}; known: {', '.join(SUITE_NAMES)}")


_INT_KEYS = ("p", "m", "r", "trials", "seed", "word_len", "search_bound", "dump_limit")
_REQUIRED = ("p", "delta", "m", "gram_V", "r")


def _rational(key, text) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidConfig(f"{key}: not a rational: {text!r}") from exc


def _int(key, text) -> int:
    try:
        return int(text.strip())
    except ValueError as exc:
        raise InvalidConfig(f"{key}: not an integer: {text!r}") from exc


def from_mapping(d: dict) -> RunConfig:
    """Build a RunConfig from string values (as in a config file or report)."""
    missing = [k for k in _REQUIRED if k not in d]
    if missing:
        raise InvalidConfig(f"missing keys: {', '.join(missing)}")
    known = set(_INT_KEYS) | {"delta", "gram_V", "suites", "psi_scale"}
    extra = sorted(set(d) - known)
    if extra:
        raise InvalidConfig(f"unknown keys: {', '.join(extra)}")
    kw = {}
    for k in _INT_KEYS:
        if k in d:
            kw[k] = _int(k, d[k])
    kw["delta"] = _rational("delta", d["delta"])
    if "psi_scale" in d:
        kw["psi_scale"] = _rational("psi_scale", d["psi_scale"])
    gram = d["gram_V"]
    if isinstance(gram, str):
        gram = [t for t in gram.split(",") if t.strip()]
    kw["gram_V"] = tuple(_rational("gram_V", t) for t in gram)
    if "suites" in d:
        s = d["suites"]
        if isinstance(s, str):
            s = [t.strip() for t in s.split(",") if t.strip()]
        if list(s) == ["all"]:
            s = SUITE_NAMES
        kw["suites"] = tuple(s)
    return RunConfig(**kw)


def parse_config(text: str) -> RunConfig:
    d = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidConfig(f"line {lineno}: expected key = value")
        k, v = (t.strip() for t in line.split("=", 1))
        if k in d:
            raise InvalidConfig(f"line {lineno}: duplicate key {k!r}")
        d[k] = v
    return from_mapping(d)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


# Per-suite trial counts for the default battery.
BATTERY_TRIALS = {
    "cocycle-identity": 100,
    "relation-3": 200,
    "lemma-31-1": 300,
    "lemma-31-2": 300,
    "prop-32-H": 200,
    "prop-32-G": 200,
    "prop-33": 200,
    "gamma-props": 500,
    "bruhat-roundtrip": 200,
    "space-dichotomy": 100,
    "h-plus": 100,
}


def battery_configs(seed: int = 0, primes=(3, 5, 7), shapes=None) -> list[RunConfig]:
    """p in {3, 5, 7}, delta the smallest positive non-residue, (m, r) in {1,2,3} x {1,2}."""
    shapes = shapes or [(m, r) for m in (1, 2, 3) for r in (1, 2)]
    out = []
    for p in primes:
        delta = Fraction(smallest_nonresidue(p))
        for m, r in shapes:
            out.append(RunConfig(p=p, delta=delta, m=m, gram_V=(Fraction(1),) * m, r=r, seed=seed))
    return out

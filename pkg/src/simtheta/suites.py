"""Named identity suites.

Each suite draws a case from a per-trial generator and evaluates a list of
checks on it.  Cases are plain data (see ``encode``/``decode``) so that any
failing instance can be written out and replayed on its own.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from . import siegel
from .cocycle import (CharacterChi, LERAY_CONVENTION, beta_V_chi, big_cocycle_C, commutator_value,
                      mu, random_gsp, rao_cocycle, rv_space)
from .config import RunConfig, UnknownSuite
from .doubling import DoubledSpace, GSpElement
from .exact import Matrix, QQ, QuadExt, QuadExtField
from .hermitian import (HermitianSpace, NotFound, SimilitudeElement, SplitSkewHermitianSpace,
                        bruhat_decompose, conj_by_d, d_scale, element, epsilon_space,
                        hermitian_space_with_sign, in_H_plus, project_isometry, random_g_similitude,
                        random_h_similitude, random_unitary, similitude_with_factor)
from .local import (LocalContext, Mu8, epsilon_EF, gamma_eta, hilbert_symbol, is_local_square,
                    local_norm_search, square_class_reps, weil_index_gauss_oracle,
                    weil_index_scalar)

ONE = Mu8(0)


@dataclass(frozen=True)
class Check:
    label: str
    expected: object
    actual: object

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


def render(v) -> str:
    if isinstance(v, Mu8):
        return str(v.exponent)
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


# -- the configured instance ---------------------------------------------------

class Instance:
    """Everything derived from a RunConfig, built lazily and shared by suites."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.ctx = LocalContext(cfg.p, cfg.delta, cfg.psi_scale)
        self.E = QuadExtField(cfg.delta)
        self.V = HermitianSpace.diagonal(list(cfg.gram_V), self.E)
        self.W = SplitSkewHermitianSpace(cfg.r, self.E)
        self.m, self.r = cfg.m, cfg.r

    @cached_property
    def D(self) -> DoubledSpace:
        return DoubledSpace(self.V, self.W)

    @cached_property
    def chi(self) -> CharacterChi:
        return CharacterChi(self.m, self.ctx)

    @cached_property
    def rv(self):
        return rv_space(self.V, self.ctx)

    @cached_property
    def witnesses(self) -> list:
        """Elements of G whose factors are non-norms (even m only)."""
        if self.m % 2:
            return []
        for y in square_class_reps(self.cfg.p):
            if epsilon_EF(y, self.ctx) != ONE:
                return [similitude_with_factor(self.V, y, self.cfg.search_bound)]
        raise NotFound("no non-norm square class")

    def beta(self, h, rng=None) -> Mu8:
        return beta_V_chi(h, self.V, self.chi, self.W, self.ctx, self.rv, rng)

    def C(self, a, b) -> Mu8:
        return big_cocycle_C(a, b, self.D, self.ctx)

    # random inputs
    def rand_y(self, rng) -> Fraction:
        num = rng.choice((1, 2, 3, 5, 6, 7, 10, 11))
        y = Fraction(rng.choice((1, -1)) * num, rng.choice((1, 1, 2, 3)))
        return y * Fraction(self.cfg.p) ** rng.choice((-1, 0, 0, 1, 2))

    def rand_h1(self, rng) -> SimilitudeElement:
        return random_unitary(self.W, rng, self.cfg.word_len)

    def rand_h(self, rng) -> SimilitudeElement:
        return random_h_similitude(self.W, rng, self.rand_y(rng), self.cfg.word_len)

    def rand_g(self, rng) -> SimilitudeElement:
        return random_g_similitude(self.V, rng, self.witnesses, self.cfg.word_len)

    def rand_gsp(self, rng) -> GSpElement:
        k = rng.randrange(4)
        if k == 0:
            return self.D.iota(self.rand_g(rng), self.rand_h(rng))
        if k == 1:
            return self.D.iota_V(self.rand_h(rng))
        if k == 2:
            return self.D.d_big(self.rand_y(rng)) @ self.D.iota_W(self.rand_g(rng))
        return random_gsp(self.D, rng)

    def rand_parabolic(self, rng) -> GSpElement:
        N = self.D.N
        A = siegel._random_invertible(N, QQ, rng)
        B = Matrix([[Fraction(rng.randint(-3, 3)) for _ in range(N)] for _ in range(N)], QQ)
        mat = siegel.siegel_levi(A) @ siegel.siegel_unipotent(B + B.T)
        return GSpElement(mat, Fraction(1))


# -- serialization -------------------------------------------------------------

def _enc_E(x: QuadExt):
    return [str(x.a), str(x.b)]


def encode(obj):
    if isinstance(obj, bool):
        return {"bool": obj}
    if isinstance(obj, int):
        return {"Z": str(obj)}
    if isinstance(obj, Fraction):
        return {"Q": str(obj)}
    if isinstance(obj, QuadExt):
        return {"E": _enc_E(obj)}
    if isinstance(obj, SimilitudeElement):
        return {"GU": {"mat": [[_enc_E(x) for x in row] for row in obj.mat.rows],
                       "nu": str(obj.nu)}}
    if isinstance(obj, GSpElement):
        return {"GSp": {"mat": [[str(x) for x in row] for row in obj.mat.rows],
                        "nu": str(obj.nu)}}
    if isinstance(obj, Mu8):
        return {"mu8": str(obj.exponent)}
    if isinstance(obj, dict):
        return {k: encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    raise TypeError(f"cannot encode {type(obj).__name__}")


def decode(data, E: QuadExtField):
    if isinstance(data, list):
        return [decode(v, E) for v in data]
    if not isinstance(data, dict):
        raise TypeError(f"bad case data {data!r}")
    if len(data) == 1:
        (tag, v), = data.items()
        if tag == "bool":
            return bool(v)
        if tag == "Z":
            return int(v)
        if tag == "Q":
            return Fraction(v)
        if tag == "E":
            return E(Fraction(v[0]), Fraction(v[1]))
        if tag == "mu8":
            return Mu8(int(v))
        if tag == "GU":
            mat = Matrix([[E(Fraction(a), Fraction(b)) for a, b in row] for row in v["mat"]], E)
            return SimilitudeElement(mat, Fraction(v["nu"]))
        if tag == "GSp":
            mat = Matrix([[Fraction(x) for x in row] for row in v["mat"]], QQ)
            return GSpElement(mat, Fraction(v["nu"]))
    return {k: decode(v, E) for k, v in data.items()}


# -- suites --------------------------------------------------------------------

class Suite:
    name = ""

    def generate(self, inst: Instance, rng) -> dict:
        raise NotImplementedError

    def check(self, inst: Instance, case: dict) -> list[Check]:
        raise NotImplementedError

    def finish(self, inst: Instance, trials: list) -> list[Check]:
        """Suite-level checks over all (case, checks) pairs."""
        return []


def _norm_class_check(label, ratio: QuadExt, ctx) -> Check:
    """ratio in N(E^x): expect an F-element with trivial epsilon."""
    if ratio.b:
        return Check(label, ONE, "not in F")
    return Check(label, ONE, epsilon_EF(ratio.a, ctx))


class CocycleIdentity(Suite):
    name = "cocycle-identity"

    def generate(self, inst, rng):
        return {"a": inst.rand_gsp(rng), "b": inst.rand_gsp(rng), "c": inst.rand_gsp(rng),
                "p": inst.rand_parabolic(rng), "s": random_gsp(inst.D, rng).sp_part()}

    def check(self, inst, case):
        a, b, c, P, s = case["a"], case["b"], case["c"], case["p"], case["s"]
        D, ctx = inst.D, inst.ctx
        C = inst.C
        a1, b1 = a.sp_part(), b.sp_part()
        return [
            Check("C(a,b) C(ab,c) = C(a,bc) C(b,c)", C(a, b) * C(a @ b, c), C(a, b @ c) * C(b, c)),
            Check("c_Y(p, s) = 1", ONE, rao_cocycle(P, s, D, ctx)),
            Check("c_Y(s, p) = 1", ONE, rao_cocycle(s, P, D, ctx)),
            Check("C = c_Y on Sp x Sp", rao_cocycle(a1, b1, D, ctx), C(a1, b1)),
        ]


class Relation3(Suite):
    name = "relation-3"

    def generate(self, inst, rng):
        return {"h": inst.rand_h1(rng), "hp": inst.rand_h1(rng), "pivot_seed": rng.getrandbits(32)}

    def check(self, inst, case):
        h, hp = case["h"], case["hp"]
        D = inst.D
        lhs = rao_cocycle(D.iota_V(h), D.iota_V(hp), D, inst.ctx)
        rhs = inst.beta(h).inverse() * inst.beta(hp).inverse() * inst.beta(h @ hp)
        pivots = random.Random(case["pivot_seed"])
        return [
            Check("c_Y(iota_V h, iota_V h') = beta(h)^-1 beta(h')^-1 beta(hh')", rhs, lhs),
            Check("beta independent of Bruhat pivots", inst.beta(h), inst.beta(h, pivots)),
        ]


class Lemma31Part1(Suite):
    name = "lemma-31-1"

    def generate(self, inst, rng):
        return {"h": inst.rand_h1(rng), "y": inst.rand_y(rng)}

    def check(self, inst, case):
        h, y = case["h"], case["y"]
        b = bruhat_decompose(h, inst.W)
        by = bruhat_decompose(conj_by_d(h, y, inst.W), inst.W)
        ratio = by.x_class / (b.x_class * inst.E(y) ** b.j)
        return [
            Check("j(h^y) = j(h)", b.j, by.j),
            _norm_class_check("x(h^y) = x(h) y^j(h) mod norms", ratio, inst.ctx),
        ]


class Lemma31Part2(Suite):
    name = "lemma-31-2"

    def generate(self, inst, rng):
        return {"h": inst.rand_h1(rng)}

    def check(self, inst, case):
        h = case["h"]
        b = bruhat_decompose(h, inst.W)
        s = inst.D.bruhat_sp(inst.D.iota_V(h))
        m = inst.m
        target = b.x_class.norm() ** m * (-inst.cfg.delta) ** (m * b.j)
        return [
            Check("j(iota_V h) = 2m j(h)", 2 * m * b.j, s.j),
            Check("x(iota_V h) = N(x(h))^m (-Delta)^(m j(h)) mod squares", True,
                  is_local_square(s.x_class / target, inst.cfg.p)),
        ]


class Prop32H(Suite):
    name = "prop-32-H"

    def generate(self, inst, rng):
        return {"h": inst.rand_h(rng), "hp": inst.rand_h(rng)}

    def check(self, inst, case):
        h, hp = case["h"], case["hp"]
        W, D, p, m = inst.W, inst.D, inst.cfg.p, inst.m
        delta = inst.cfg.delta
        y = hp.nu
        h1, hp1, hh1 = project_isometry(h, W), project_isometry(hp, W), project_isometry(h @ hp, W)
        b = bruhat_decompose(h1, W)
        Nx = b.x_class.norm()
        beta = inst.beta
        C = inst.C(D.iota_V(h), D.iota_V(hp))
        out = [
            Check("(hh')_1 = h_1^nu(h') h'_1", True, (conj_by_d(h1, y, W) @ hp1).mat == hh1.mat),
            Check("iota_V(h)_1 = iota_V(h_1)", True, D.iota_V(h).sp_part() == D.iota_V(h1)),
            Check("mu(nu(h'), iota_V h_1) = (N x(h_1), nu(h'))^m (Delta, nu(h'))^(m j(h_1))",
                  hilbert_symbol(Nx, y, p) ** m * hilbert_symbol(delta, y, p) ** (m * b.j),
                  mu(y, D.iota_V(h1), D, inst.ctx)),
            Check("beta(h_1^y) = beta(h_1) (y, Delta)^(m j(h_1))",
                  beta(h1) * hilbert_symbol(y, delta, p) ** (m * b.j),
                  beta(conj_by_d(h1, y, W))),
            Check("C(iota_V h, iota_V h') = beta(h_1)^-1 beta(h'_1)^-1 beta((hh')_1) (N x(h_1), nu(h'))^m",
                  beta(h1).inverse() * beta(hp1).inverse() * beta(hh1) * hilbert_symbol(Nx, y, p) ** m,
                  C),
        ]
        if m % 2 == 0:
            out.append(Check("s(h) s(h') C = s(hh') with s(h) = beta(h_1)",
                             beta(hh1), beta(h1) * beta(hp1) * C))
        return out


class Prop32G(Suite):
    name = "prop-32-G"

    def generate(self, inst, rng):
        return {"g": inst.rand_g(rng), "gp": inst.rand_g(rng)}

    def check(self, inst, case):
        g, gp = case["g"], case["gp"]
        D, ctx, p = inst.D, inst.ctx, inst.cfg.p
        mr = inst.m * inst.r
        a, b = D.iota_W(g), D.iota_W(gp)
        a1 = a.sp_part()
        in_P = siegel.in_parabolic(a1.mat)
        x_ok = in_P and is_local_square(siegel.levi_det(a1.mat) / g.mat.det().norm() ** inst.r, p)
        nu, nup = g.nu, gp.nu
        C = inst.C(a, b)

        def t(y):
            return gamma_eta(y, ctx) ** mr
        return [
            Check("nu(iota_W g) = nu(g)^-1", 1 / nu, a.nu),
            Check("iota_W(g)_1 in P_Y", True, in_P),
            Check("x(iota_W(g)_1) = N(det g)^r mod squares", True, x_ok),
            Check("C(iota_W g, iota_W g') = (nu(g), nu(g'))^(mr)", hilbert_symbol(nu, nup, p) ** mr, C),
            Check("(x, y) = gamma(x)^-1 gamma(y)^-1 gamma(xy) at x, y = nu(g), nu(g')",
                  hilbert_symbol(nu, nup, p),
                  gamma_eta(nu, ctx).inverse() * gamma_eta(nup, ctx).inverse() * gamma_eta(nu * nup, ctx)),
            Check("t(g) t(g') C = t(gg') with t(g) = gamma(nu(g), eta)^(mr)",
                  t(nu * nup), t(nu) * t(nup) * C),
        ]


WITNESS_WINDOW = 100


class Prop33(Suite):
    name = "prop-33"

    def generate(self, inst, rng):
        return {"g": inst.rand_g(rng), "h": inst.rand_h(rng),
                "z": Mu8(rng.randrange(8)), "zp": Mu8(rng.randrange(8))}

    def check(self, inst, case):
        g, h = case["g"], case["h"]
        D, ctx, p, m, r = inst.D, inst.ctx, inst.cfg.p, inst.m, inst.r
        val = commutator_value(g, h, D, ctx)
        h1 = project_isometry(h, inst.W)
        b = bruhat_decompose(h1, inst.W)
        ginv = 1 / g.nu
        closed = (hilbert_symbol(g.nu, h.nu, p) ** (m * r)
                  / (hilbert_symbol(b.x_class.norm(), ginv, p) ** m
                     * hilbert_symbol(inst.cfg.delta, ginv, p) ** (m * b.j)))
        out = [
            Check("[g~, h~] independent of central components", val,
                  commutator_value(g, h, D, ctx, (case["z"], case["zp"]))),
            Check("[g~, h~] = (nu g, nu h)^(mr) / ((N x(h_1), nu(g)^-1)^m (Delta, nu(g)^-1)^(m j(h_1)))",
                  closed, val),
        ]
        if m % 2 == 0:
            out.append(Check("[g~, h~] = 1 for m even", ONE, val))
        return out

    def finish(self, inst, trials):
        if inst.m % 2 == 0:
            return []
        window = trials[:WITNESS_WINDOW]
        found = any(checks[1].actual != ONE for _, checks in window)
        return [Check(f"non-commuting witness within {len(window)} samples (m odd)",
                      "found", "found" if found else "none")]


class GammaProps(Suite):
    name = "gamma-props"

    def generate(self, inst, rng):
        return {"x": inst.rand_y(rng), "y": inst.rand_y(rng)}

    def check(self, inst, case):
        x, y = case["x"], case["y"]
        ctx, p = inst.ctx, inst.cfg.p
        g = lambda t: gamma_eta(t, ctx)
        c = ctx.eta_scale
        return [
            Check("gamma(y, eta)^2 = (-1, y)", hilbert_symbol(-1, y, p), g(y) ** 2),
            Check("(x, y) = gamma(x)^-1 gamma(y)^-1 gamma(xy)", hilbert_symbol(x, y, p),
                  g(x).inverse() * g(y).inverse() * g(x * y)),
            Check("closed-form Weil index = Gauss-sum oracle",
                  weil_index_gauss_oracle(y, p, c), weil_index_scalar(y, ctx)),
        ]


class BruhatRoundtrip(Suite):
    name = "bruhat-roundtrip"

    def generate(self, inst, rng):
        s = inst.D.iota_V(inst.rand_h1(rng)) if rng.random() < 0.5 else random_gsp(inst.D, rng).sp_part()
        return {"h": inst.rand_h1(rng), "s": s, "pivot_seed": rng.getrandbits(32)}

    def check(self, inst, case):
        h, s = case["h"], case["s"]
        W, D = inst.W, inst.D
        pivots = random.Random(case["pivot_seed"])
        b, b2 = bruhat_decompose(h, W), bruhat_decompose(h, W, pivots)
        c, c2 = D.bruhat_sp(s), D.bruhat_sp(s, pivots)
        N = D.N
        return [
            Check("U(W): p1 tau_j p2 = h", True, b.reconstruct(W) == h.mat and b2.reconstruct(W) == h.mat),
            Check("U(W): j = rank of Y-to-X block", siegel.cell_index(h.mat), b.j),
            Check("U(W): j stable under pivoting", b.j, b2.j),
            _norm_class_check("U(W): x well defined mod norms", b.x_class / b2.x_class, inst.ctx),
            Check("Sp: p1 tau_j p2 = s", True,
                  all(x.p1 @ siegel.weyl_element(N, x.j, QQ) @ x.p2 == s.mat for x in (c, c2))),
            Check("Sp: j stable under pivoting", c.j, c2.j),
            Check("Sp: x well defined mod squares", True, is_local_square(c.x_class / c2.x_class, inst.cfg.p)),
        ]


class SpaceDichotomy(Suite):
    name = "space-dichotomy"

    def generate(self, inst, rng):
        E = inst.E
        while True:
            P = Matrix([[E(rng.randint(-3, 3), rng.randint(-2, 2)) for _ in range(inst.m)]
                        for _ in range(inst.m)], E)
            if P.det():
                break
        return {"sign": rng.choice((1, -1)), "P": [list(r) for r in P.rows]}

    def check(self, inst, case):
        sign = case["sign"]
        V = hermitian_space_with_sign(inst.m, sign, inst.ctx, inst.E)
        P = Matrix(case["P"], inst.E)
        moved = HermitianSpace(P.H @ V.gram @ P)
        target = Mu8.from_sign(sign)
        return [
            Check(f"epsilon(V^{'+' if sign > 0 else '-'}) = {sign:+d}", target, epsilon_space(V, inst.ctx)),
            Check("epsilon is a congruence invariant", target, epsilon_space(moved, inst.ctx)),
        ]


class HPlus(Suite):
    name = "h-plus"

    def generate(self, inst, rng):
        return {"y": inst.rand_y(rng), "rep": rng.randrange(4)}

    def check(self, inst, case):
        y = case["y"]
        m, p = inst.m, inst.cfg.p
        W, V, ctx = inst.W, inst.V, inst.ctx

        def predicate(t):
            return m % 2 == 0 or local_norm_search(t, inst.cfg.delta, p)
        reps = square_class_reps(p)
        count = sum(in_H_plus(d_scale(W, t), V, ctx) for t in reps)
        out = [
            Check("d(y) in H+ iff nu(G) contains y (norm search)", predicate(y), in_H_plus(d_scale(W, y), V, ctx)),
            Check("square classes of nu(d(y)) in H+", 4 if m % 2 == 0 else 2, count),
        ]
        if m % 2 == 0:
            t = reps[case["rep"]]
            g = similitude_with_factor(V, t, inst.cfg.search_bound)
            out.append(Check("even m: each square class is a similitude factor of G", t,
                             element(g.mat, V).nu))
        return out


SUITES = {s.name: s for s in (
    CocycleIdentity(), Relation3(), Lemma31Part1(), Lemma31Part2(), Prop32H(), Prop32G(),
    Prop33(), GammaProps(), BruhatRoundtrip(), SpaceDichotomy(), HPlus(),
)}


def get_suite(name: str) -> Suite:
    try:
        return SUITES[name]
    except KeyError:
        raise UnknownSuite(f"unknown suite {name!r}") from None


def trial_rng(seed: int, suite: str, i: int) -> random.Random:
    return random.Random(f"{seed}/{suite}/{i}")


def run_suite(name: str, cfg: RunConfig, inst: Instance | None = None) -> dict:
    suite = get_suite(name)
    inst = inst or Instance(cfg)
    t0 = time.perf_counter()
    results = []
    dumps = []
    failures = 0

    def record(trial, case, c):
        nonlocal failures
        failures += 1
        if len(dumps) < cfg.dump_limit:
            dumps.append({
                "suite": name, "trial": str(trial), "check": c.label,
                "expected": render(c.expected), "actual": render(c.actual),
                "inputs": encode(case) if case is not None else None,
                "config": cfg.as_dict(),
            })

    for i in range(cfg.trials):
        case = suite.generate(inst, trial_rng(cfg.seed, name, i))
        checks = suite.check(inst, case)
        results.append((case, checks))
        for c in checks:
            if not c.ok:
                record(i, case, c)
    for c in suite.finish(inst, results):
        if not c.ok:
            record("suite", None, c)
    return {
        "suite": name,
        "trials": str(cfg.trials),
        "checks": str(sum(len(ch) for _, ch in results)),
        "failures": str(failures),
        "counterexamples": dumps,
        "elapsed_ms": str(round(1000 * (time.perf_counter() - t0))),
    }


def run_config(cfg: RunConfig, suites=None) -> list[dict]:
    inst = Instance(cfg)
    return [run_suite(name, cfg, inst) for name in (suites or cfg.suites)]


def replay(dump: dict) -> list[Check]:
    """Re-evaluate one dumped counterexample; returns its checks."""
    from .config import from_mapping

    cfg = from_mapping(dump["config"])
    inst = Instance(cfg)
    suite = get_suite(dump["suite"])
    if dump.get("inputs") is None:
        trials = []
        for i in range(cfg.trials):
            case = suite.generate(inst, trial_rng(cfg.seed, suite.name, i))
            trials.append((case, suite.check(inst, case)))
        return suite.finish(inst, trials)
    return suite.check(inst, decode(dump["inputs"], inst.E))


__all__ = ["Check", "Instance", "SUITES", "LERAY_CONVENTION", "encode", "decode", "get_suite",
           "replay", "run_config", "run_suite", "trial_rng"]

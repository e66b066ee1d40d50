"""Parameter pipeline and the runtime inequality battery."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable

from hamsat.layout import InstanceConfig, VertexLayout, build_layout
from hamsat.nu import mu, mu_star, nu_closed


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    lhs: str
    rhs: str
    slack: float  # positive when the inequality holds with room to spare

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class BatteryReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def add_le(self, name: str, lhs, rhs, strict: bool = False) -> None:
        ok = lhs < rhs if strict else lhs <= rhs
        self.checks.append(Check(name, bool(ok), str(lhs), str(rhs), float(rhs - lhs)))

    def add_eq(self, name: str, values: Iterable) -> None:
        vals = list(values)
        ok = all(v == vals[0] for v in vals)
        self.checks.append(Check(name, ok, str(vals[0]), " = ".join(map(str, vals[1:])), 0.0 if ok else -1.0))

    def to_json(self) -> dict:
        return {"pass": self.passed, "checks": [c.to_json() for c in self.checks]}


@dataclass
class ConstructionParams:
    k: int
    ell: int
    N: int
    n: int
    z: Fraction
    x: int
    xstar: int
    xs: list[int]
    p: int
    battery: BatteryReport | None = None

    @property
    def half(self) -> int:
        return self.k // 2

    def nu_reduced(self, xi: int) -> int:
        """nu(x_i - 2*floor(k/2)), the quantity summed throughout."""
        return nu_closed(xi - 2 * self.half, self.k, self.ell)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "ell": self.ell,
            "N": self.N,
            "n": self.n,
            "z": {"num": self.z.numerator, "den": self.z.denominator},
            "x": self.x,
            "xstar": self.xstar,
            "xs": self.xs,
            "p": self.p,
            "battery": self.battery.to_json() if self.battery else None,
        }


def p_value(k: int, ell: int) -> int:
    return max(ell, k - 2 * ell - 1, math.ceil(k / 2) - ell)


def part_count(N: int, k: int) -> int:
    return N // (11 * k**5)


def z_value(N: int, n: int, k: int, ell: int) -> Fraction:
    return Fraction(N + 4 * k**3, n) - (3 * k - 4 * ell)


def choose_xs(z: Fraction, n: int, y: int, ystar: int, x: int, xstar: int, k: int, ell: int) -> list[int]:
    """Greedy choice of x_i in {x, x*} keeping each partial sum in (mz, mz + k - l]."""
    xs = [xstar]
    total = ystar
    for m in range(2, n + 1):
        if total + ystar <= m * z + (k - ell):
            xs.append(xstar)
            total += ystar
        else:
            xs.append(x)
            total += y
    return xs


def derive_params(config: InstanceConfig, n: int | None = None) -> ConstructionParams:
    """Compute n, z, x, x*, p and the x_i vector.

    ``n`` overrides the part count ``floor(N / 11k^5)``; the battery flags
    the resulting ratio N/n when it leaves the admissible window.
    """
    k, ell, N = config.k, config.ell, config.N
    if n is None:
        n = part_count(N, k)
    if n < 1:
        raise ValueError(f"N={N} gives n={n} parts; need N >= 11k^5 = {11 * k**5}")
    z = z_value(N, n, k, ell)
    try:
        m = mu(z, k, ell)
    except ValueError as exc:
        raise ValueError(f"z={z} too small for mu: relaxed constants infeasible") from exc
    half = k // 2
    x = m + 2 * half
    xstar = x + (k - 2 * ell) + 1
    y = nu_closed(x - 2 * half, k, ell)
    ystar = nu_closed(xstar - 2 * half, k, ell)
    xs = choose_xs(z, n, y, ystar, x, xstar, k, ell)
    return ConstructionParams(k, ell, N, n, z, x, xstar, xs, p_value(k, ell))


def assert_battery(
    config: InstanceConfig, params: ConstructionParams, layout: VertexLayout | None = None
) -> BatteryReport:
    """Evaluate every inequality the constructions consume; never raises on failure."""
    k, ell, N, n, z = config.k, config.ell, config.N, params.n, params.z
    half = k // 2
    rep = BatteryReport()
    ratio = Fraction(N, n)
    rep.add_le("Nnk_lower", 11 * k**5, ratio)
    rep.add_le("Nnk_upper", ratio, Fraction(23, 2) * k**5)

    x, xstar = params.x, params.xstar
    m, ms = mu(z, k, ell), mu_star(z, k, ell)
    rep.add_le("lbx", 10 * k**4, x)
    rep.add_le("lbx_chain", Fraction(z - k, k), x, strict=True)
    rep.add_le("ubx", x, 12 * k**5)
    rep.add_le("x_reduced_ge_k3", k**3, x - 2 * half)
    rep.add_eq(
        "mocV_wn",
        [nu_closed(x - 2 * half, k, ell), nu_closed(m, k, ell), nu_closed(x - 2 * half - (k - 2 * ell), k, ell)],
    )
    rep.add_eq(
        "mocV_wn1",
        [nu_closed(xstar - 2 * half, k, ell), nu_closed(ms, k, ell), nu_closed(xstar - 2 * half - (k - 2 * ell), k, ell)],
    )

    reduced = [params.nu_reduced(xi) for xi in params.xs]
    total = sum(reduced)
    rep.add_le("xi_lower", n * z, total, strict=True)
    rep.add_le("xi_upper", total, n * z + (k - ell))
    # the left side is tightest when the omitted index carries the smallest term
    binding = total - min(reduced)
    rep.add_le("dwie_nier_left", (3 * k - 4 * ell) * n + binding + 8 * k**4, N, strict=True)
    rep.add_le("dwie_nier_right", N, (3 * k - 4 * ell) * n + total - 4 * k**3, strict=True)

    if layout is not None:
        pend_b = layout.size_b[n:]
        avg = Fraction(sum(pend_b), n)
        rep.add_le("lbb", 4 * k**4, min(min(pend_b), math.floor(avg)))
        rep.add_le("ubb", max(max(pend_b), math.ceil(avg)), min(ratio, 12 * k**5))
        rep.add_le("13k5", max(layout.part_size(s) for s in layout.parts), 13 * k**5)
        rep.add_eq("ABN", [layout.N, N])
    params.battery = rep
    return rep


def run_pipeline(config: InstanceConfig, n: int | None = None) -> tuple[ConstructionParams, VertexLayout | None, BatteryReport]:
    """derive_params, build_layout and the full battery in one go."""
    params = derive_params(config, n)
    try:
        layout = build_layout(config, params)
    except ValueError:
        layout = None
    rep = assert_battery(config, params, layout)
    if layout is None:
        rep.checks.append(Check("layout_feasible", False, "residual", "0", -1.0))
    return params, layout, rep


def scan_min_n(k: int, ell: int, n_target: int, limit: int | None = None) -> int | None:
    """Smallest N (stepping by k - l) whose part count is ``n_target`` and which passes the battery."""
    step = k - ell
    lo = n_target * 11 * k**5
    N = -(-lo // step) * step
    hi = (n_target + 1) * 11 * k**5 if limit is None else limit
    while N < hi:
        config = InstanceConfig(k, ell, N, relaxed=True)
        try:
            _, _, rep = run_pipeline(config)
        except ValueError:
            rep = None
        if rep is not None and rep.passed:
            return N
        N += step
    return None

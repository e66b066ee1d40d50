"""The extremal path-length function nu and its threshold inverses.

``nu(x)`` is the largest vertex count of an (l,k)-path in which every edge
takes at least ``kappa = k - l + 1`` vertices from a fixed x-element set U,
all other vertices coming from an unlimited pool W.  The path may leave
part of U unused; with that reading ``nu`` is monotone and agrees with the
closed form below for every ``x >= kappa`` (see ``nu_oracle(exact=True)``
for the stricter reading that forces all of U onto the path).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

U_SYM = "u"
W_SYM = "w"


@dataclass(frozen=True)
class NuParams:
    kappa: int
    beta: int
    q: int
    r: int

    @property
    def period(self) -> int:
        return max(self.kappa, self.beta)


def _check_kl(k: int, ell: int) -> None:
    if not (1 <= ell and 2 * ell < k):
        raise ValueError(f"nu is defined here for 1 <= ell < k/2, got k={k}, ell={ell}")


def nu_params(x: int, k: int, ell: int) -> NuParams:
    _check_kl(k, ell)
    kappa = k - ell + 1
    beta = 2 * k - 4 * ell + 2
    if x < kappa:
        raise ValueError(f"x={x} < kappa={kappa}: no edge can take kappa vertices of U")
    q, r = divmod(x - kappa, max(kappa, beta))
    return NuParams(kappa, beta, q, r)


def nu_closed(x: int, k: int, ell: int) -> int:
    np_ = nu_params(x, k, ell)
    base = np_.q * (2 * k - 2 * ell)
    return base + k if np_.r <= k - 2 * ell else base + 2 * k - ell


def nu_oracle(x: int, k: int, ell: int, search_cap: int = 64, exact: bool = False) -> int | None:
    """Longest admissible path by exhaustive extension search.

    The search grows the path one edge at a time.  Since ``k - l >= l``,
    the last ``l`` symbols of a new edge lie in its fresh part, so the
    future depends only on how many u's sit in those ``l`` symbols and on
    how many u's were spent; states are memoized on that pair.

    With ``exact=True`` every one of the x u-symbols must be on the path;
    returns ``None`` when no such path exists.  Raises ``ValueError`` when
    no admissible path exists at all or ``x`` exceeds ``search_cap``.
    """
    _check_kl(k, ell)
    if x > search_cap:
        raise ValueError(f"x={x} exceeds search cap {search_cap}")
    kappa = k - ell + 1
    step = k - ell
    gap = k - 2 * ell  # fresh symbols of an edge that the next edge does not see

    @lru_cache(maxsize=None)
    def extra_edges(tail_u: int, used: int) -> float:
        # best number of further edges; -inf when the exact target is unreachable
        best = 0.0 if (not exact or used == x) else -math.inf
        for mid in range(0, gap + 1):
            for new_tail in range(0, ell + 1):
                if tail_u + mid + new_tail < kappa:
                    continue
                spent = used + mid + new_tail
                if spent > x:
                    continue
                best = max(best, 1 + extra_edges(new_tail, spent))
        return best

    best = -math.inf
    for head in range(0, step + 1):
        for tail in range(0, ell + 1):
            if head + tail >= kappa and head + tail <= x:
                best = max(best, 1 + extra_edges(tail, head + tail))
    if best == -math.inf:
        if exact and x >= kappa:
            return None
        raise ValueError(f"no admissible path for x={x} (k={k}, ell={ell})")
    return k + (int(best) - 1) * step


def nu_table(k: int, ell: int, x_max: int) -> list[tuple[int, int]]:
    return [(x, nu_closed(x, k, ell)) for x in range(k - ell + 1, x_max + 1)]


def _floor(z: Rational | int | float) -> int:
    return math.floor(Fraction(z))


def mu(z: Rational | int, k: int, ell: int) -> int:
    """Largest x with nu(x) <= z."""
    _check_kl(k, ell)
    Z = _floor(z)
    if Z < k:
        raise ValueError(f"z={z} is below nu(kappa)={k}; mu is undefined")
    kappa = k - ell + 1
    period = max(kappa, 2 * k - 4 * ell + 2)
    block = 2 * k - 2 * ell
    q = (Z - k) // block
    start = kappa + q * period
    if Z >= q * block + 2 * k - ell:
        return start + period - 1
    return start + (k - 2 * ell)


def mu_star(z: Rational | int, k: int, ell: int) -> int:
    """Smallest x with nu(x) > z."""
    return mu(z, k, ell) + 1


# -- extremal construction ---------------------------------------------------


def _block_runs(k: int, ell: int) -> list[tuple[str, int]]:
    """Runs of one repeated block (the odd edge plus the gap after it)."""
    kappa = k - ell + 1
    head = [(U_SYM, kappa - ell), (W_SYM, ell - 1), (U_SYM, ell)]
    if 3 * ell >= k + 1:
        return head + [(W_SYM, k - 2 * ell)]
    # short overlaps: the gap carries u's so that even edges still reach kappa
    return head + [(U_SYM, k - 3 * ell + 1), (W_SYM, ell - 1)]


def extremal_path(x: int, k: int, ell: int) -> str:
    """A u/w string of length ``nu(x)`` with exactly x u's, every window >= kappa u's.

    Raises ``ValueError`` when ``x < kappa`` or when no string of length
    ``nu(x)`` can hold x u's while keeping the block structure, which
    happens only for a few small x in the short-overlap regime (there the
    closed form counts paths that leave part of U unused).
    """
    p = nu_params(x, k, ell)
    runs = _block_runs(k, ell) * p.q
    kappa = p.kappa
    runs += [(U_SYM, kappa - ell), (W_SYM, ell - 1), (U_SYM, ell)]
    if p.r >= k - 2 * ell + 1:
        tail_u = min(p.r, k - ell)
        runs += [(U_SYM, tail_u), (W_SYM, k - ell - tail_u)]
    symbols = list("".join(sym * length for sym, length in runs))
    missing = x - symbols.count(U_SYM)
    # promote w's to u's from the right end; this never lowers a window count
    for pos in range(len(symbols) - 1, -1, -1):
        if missing == 0:
            break
        if symbols[pos] == W_SYM:
            symbols[pos] = U_SYM
            missing -= 1
    if missing:
        raise ValueError(
            f"no path of length nu({x})={len(symbols)} holds {x} u-symbols (k={k}, ell={ell})"
        )
    return "".join(symbols)


def validate_symbol_path(symbols: str, k: int, ell: int) -> int:
    """Return the number of edges; raise if a window has fewer than kappa u's."""
    step = k - ell
    L = len(symbols)
    if L < k or (L - ell) % step:
        raise ValueError(f"length {L} is not a valid (l,k)-path length")
    kappa = k - ell + 1
    edges = 0
    for start in range(0, L - ell, step):
        count = symbols.count(U_SYM, start, start + k)
        if count < kappa:
            raise ValueError(f"window at {start} has {count} < {kappa} u-symbols")
        edges += 1
    return edges

"""Planar link patterns: validation, enumeration, counting and surgery.

A link pattern on p points with valences (s_1, ..., s_p) is a planar
collection of links (arcs between two distinct points, with multiplicity)
and defects (rays to infinity), such that every point i meets exactly s_i
lines, no two links cross strictly, and no defect sits strictly inside a
link's span.  Points are numbered 1..p from the left.

Conventions used throughout:

* Links with shared endpoints never cross; crossing is the strict condition
  a < c < b < d on two link classes (a,b), (c,d).
* The empty pattern (p = 0) is valid and is the unit for removal chains.
* Enumeration order is lexicographic on the canonical link list, then on the
  defect list, so fixtures are stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from math import comb


@dataclass(frozen=True)
class LinkPattern:
    valences: tuple[int, ...]
    links: tuple[tuple[int, int, int], ...]   # (a, b, multiplicity), a < b, sorted
    defects: tuple[tuple[int, int], ...]      # (point, count), sorted

    @staticmethod
    def of(valences, links=(), defects=()) -> "LinkPattern":
        """Canonicalize raw link/defect data (merging duplicates) and build."""
        mult: dict[tuple[int, int], int] = {}
        for item in links:
            if len(item) == 2:
                (a, b), m = item, 1
            else:
                a, b, m = item
            if m < 0:
                raise ValueError("negative link multiplicity")
            if m:
                mult[(a, b)] = mult.get((a, b), 0) + m
        dd: dict[int, int] = {}
        if isinstance(defects, dict):
            defects = defects.items()
        for c, k in defects:
            if k < 0:
                raise ValueError("negative defect count")
            if k:
                dd[c] = dd.get(c, 0) + k
        return LinkPattern(
            tuple(valences),
            tuple(sorted((a, b, m) for (a, b), m in mult.items())),
            tuple(sorted(dd.items())),
        )

    @property
    def p(self) -> int:
        return len(self.valences)

    @property
    def n(self) -> int:
        return sum(self.valences)

    @property
    def n_links(self) -> int:
        return sum(m for _, _, m in self.links)

    @property
    def n_defects(self) -> int:
        return sum(k for _, k in self.defects)

    def link_multiplicity(self, a: int, b: int) -> int:
        for x, y, m in self.links:
            if (x, y) == (a, b):
                return m
        return 0

    def defect_count(self, c: int) -> int:
        for x, k in self.defects:
            if x == c:
                return k
        return 0

    def sort_key(self):
        return (self.links, self.defects)

    def to_json(self) -> str:
        return json.dumps({
            "p": self.p,
            "valences": list(self.valences),
            "links": [list(t) for t in self.links],
            "defects": {str(c): k for c, k in self.defects},
        }, separators=(",", ":"))

    @staticmethod
    def from_json(s: str) -> "LinkPattern":
        d = json.loads(s)
        pat = LinkPattern.of(
            d["valences"],
            [tuple(t) for t in d.get("links", [])],
            {int(c): k for c, k in d.get("defects", {}).items()},
        )
        if "p" in d and d["p"] != pat.p:
            raise ValueError("inconsistent point count in JSON pattern")
        return pat

    def __str__(self) -> str:
        return self.to_json()


EMPTY_PATTERN = LinkPattern((), (), ())


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def validate(pattern: LinkPattern) -> ValidationResult:
    """Check valences, strict planarity and the defects-outside condition."""
    p = pattern.p
    if any(s < 1 for s in pattern.valences):
        return ValidationResult(False, "nonpositive valence")
    seen = set()
    for a, b, m in pattern.links:
        if not (1 <= a < b <= p):
            return ValidationResult(False, f"link endpoints ({a},{b}) out of range")
        if m < 1:
            return ValidationResult(False, "nonpositive link multiplicity")
        if (a, b) in seen:
            return ValidationResult(False, "duplicate link class")
        seen.add((a, b))
    for c, k in pattern.defects:
        if not (1 <= c <= p):
            return ValidationResult(False, f"defect endpoint {c} out of range")
        if k < 1:
            return ValidationResult(False, "nonpositive defect count")
    degree = [0] * (p + 1)
    for a, b, m in pattern.links:
        degree[a] += m
        degree[b] += m
    for c, k in pattern.defects:
        degree[c] += k
    for i in range(1, p + 1):
        if degree[i] != pattern.valences[i - 1]:
            return ValidationResult(False, f"valence mismatch at point {i}")
    classes = [(a, b) for a, b, _ in pattern.links]
    for i, (a, b) in enumerate(classes):
        for c, d in classes[i + 1:]:
            if a < c < b < d or c < a < d < b:
                return ValidationResult(False, f"links ({a},{b}) and ({c},{d}) cross")
    for c, _ in pattern.defects:
        for a, b, _ in pattern.links:
            if a < c < b:
                return ValidationResult(False, f"defect at {c} inside link ({a},{b})")
    return ValidationResult(True)


# -- enumeration and counting -------------------------------------------------
#
# Both follow the same recursion: cut the last point off.  If k of its s_p
# lines were links, their left endpoints must be the rightmost k defect lines
# of the remaining pattern (anything to the right of a surviving defect would
# trap it), so each (sub-pattern, k) pair lifts to exactly one pattern.

@lru_cache(maxsize=None)
def count_patterns(valences: tuple[int, ...], s: int) -> int:
    n = sum(valences)
    if s < 0 or s > n or (n - s) % 2:
        return 0
    if not valences:
        return 1 if s == 0 else 0
    if len(valences) == 1:
        return 1 if s == valences[0] else 0
    sp = valences[-1]
    # k links end at the last point, leaving sp - k defects there; the
    # sub-pattern must carry the k grabbed defect lines (k <= s - sp + 2k),
    # i.e. k >= sp - s (the Clebsch-Gordan range |s_hat - sp| <= s).
    return sum(count_patterns(valences[:-1], s - sp + 2 * k)
               for k in range(max(0, sp - s), sp + 1))


def _attach_last_point(sub: LinkPattern, sp: int, k: int) -> LinkPattern | None:
    """Reattach a last point of valence sp, turning the rightmost k defect
    lines of sub into links and keeping sp-k defects at the new point."""
    if k > sub.n_defects:
        return None
    p_new = sub.p + 1
    take = k
    new_links = {(a, b): m for a, b, m in sub.links}
    new_defects: dict[int, int] = {}
    for c, cnt in sorted(sub.defects, reverse=True):
        grab = min(take, cnt)
        take -= grab
        if grab:
            new_links[(c, p_new)] = new_links.get((c, p_new), 0) + grab
        if cnt - grab:
            new_defects[c] = cnt - grab
    if take:
        return None
    # any defect left strictly to the right of a grabbed endpoint is trapped
    if k:
        leftmost_grabbed = min(a for (a, b) in new_links if b == p_new)
        if any(c > leftmost_grabbed for c in new_defects):
            return None
    if sp - k:
        new_defects[p_new] = sp - k
    return LinkPattern.of(sub.valences + (sp,), [(a, b, m) for (a, b), m in new_links.items()],
                          new_defects)


def enumerate_patterns(valences: tuple[int, ...] | list[int], s: int) -> list[LinkPattern]:
    """All patterns in LP^{(s)} with the given valences, canonically ordered."""
    valences = tuple(valences)
    if any(v < 1 for v in valences):
        raise ValueError("valences must be positive")
    n = sum(valences)
    if s < 0 or s > n or (n - s) % 2:
        raise ValueError(f"no patterns: s={s} incompatible with n={n}")
    return sorted(_enumerate(valences, s), key=LinkPattern.sort_key)


def _enumerate(valences: tuple[int, ...], s: int) -> list[LinkPattern]:
    n = sum(valences)
    if s < 0 or s > n or (n - s) % 2:
        return []
    if not valences:
        return [EMPTY_PATTERN]
    if len(valences) == 1:
        if s == valences[0]:
            return [LinkPattern.of(valences, [], {1: s})]
        return []
    sp = valences[-1]
    out = []
    for k in range(0, sp + 1):
        for sub in _enumerate(valences[:-1], s - sp + 2 * k):
            pat = _attach_last_point(sub, sp, k)
            if pat is not None:
                out.append(pat)
    return out


def count_pp(N: int, s: int) -> int:
    """#PP_N^(s) by the closed formula (s+1)/(N+s+1) * C(2N+s, N+s)."""
    if N < 0 or s < 0:
        return 0
    return (s + 1) * comb(2 * N + s, N + s) // (N + s + 1)


# -- surgery ------------------------------------------------------------------

def _relabel_dropping(pattern_links: dict, pattern_defects: dict,
                      valences: list[int]) -> LinkPattern:
    """Drop zero-valence points and relabel the rest left to right."""
    keep = [i for i, v in enumerate(valences, start=1) if v > 0]
    newidx = {old: new for new, old in enumerate(keep, start=1)}
    links = [(newidx[a], newidx[b], m) for (a, b), m in pattern_links.items() if m]
    defects = {newidx[c]: k for c, k in pattern_defects.items() if k}
    return LinkPattern.of([valences[i - 1] for i in keep], links, defects)


def remove_links(pattern: LinkPattern, j: int, m: int) -> LinkPattern:
    """Remove m copies of the link (j, j+1); emptied endpoints are dropped."""
    have = pattern.link_multiplicity(j, j + 1)
    if m < 1 or have < m:
        raise ValueError(f"pattern has only {have} links ({j},{j+1}), cannot remove {m}")
    links = {(a, b): mm for a, b, mm in pattern.links}
    links[(j, j + 1)] -= m
    valences = list(pattern.valences)
    valences[j - 1] -= m
    valences[j] -= m
    return _relabel_dropping(links, dict(pattern.defects), valences)


def defect_partition(pattern: LinkPattern) -> tuple[int, ...]:
    """Defect counts at the distinct defect endpoints, left to right."""
    return tuple(k for _, k in pattern.defects)


def shuffle_pattern(partition) -> LinkPattern:
    """The unique all-defect pattern with the given valence sequence."""
    parts = tuple(partition)
    if any(r < 1 for r in parts):
        raise ValueError("partition parts must be positive")
    return LinkPattern.of(parts, [], {i + 1: r for i, r in enumerate(parts)})


def rainbow(N: int) -> LinkPattern:
    """The fully nested pairing {(1,2N), (2,2N-1), ..., (N,N+1)}."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    return LinkPattern.of((1,) * (2 * N), [(i, 2 * N + 1 - i, 1) for i in range(1, N + 1)], {})


# -- the combinatorial R-maps, cyclic shift and the open-up map ----------------

def r_plus(pattern: LinkPattern) -> LinkPattern:
    """Cut the last point off; its links become defects (LP^(0) -> LP^(s))."""
    if pattern.n_defects:
        raise ValueError("r_plus requires a defect-free pattern")
    p = pattern.p
    links = {}
    defects: dict[int, int] = {}
    for a, b, m in pattern.links:
        if b == p:
            defects[a] = defects.get(a, 0) + m
        else:
            links[(a, b)] = m
    return LinkPattern.of(pattern.valences[:-1], [(a, b, m) for (a, b), m in links.items()],
                          defects)


def r_plus_inverse(pattern: LinkPattern) -> LinkPattern:
    """Attach all defects to a new last point of valence s."""
    s = pattern.n_defects
    if s == 0:
        raise ValueError("r_plus_inverse needs at least one defect")
    p_new = pattern.p + 1
    links = [(a, b, m) for a, b, m in pattern.links]
    links += [(c, p_new, k) for c, k in pattern.defects]
    return LinkPattern.of(pattern.valences + (s,), links, {})


def r_minus(pattern: LinkPattern) -> LinkPattern:
    """Cut the first point off and relabel; its links become defects."""
    if pattern.n_defects:
        raise ValueError("r_minus requires a defect-free pattern")
    links = {}
    defects: dict[int, int] = {}
    for a, b, m in pattern.links:
        if a == 1:
            defects[b - 1] = defects.get(b - 1, 0) + m
        else:
            links[(a - 1, b - 1)] = m
    return LinkPattern.of(pattern.valences[1:], [(a, b, m) for (a, b), m in links.items()],
                          defects)


def r_minus_inverse(pattern: LinkPattern) -> LinkPattern:
    """Attach all defects to a new first point, relabeling old points 2..p+1."""
    s = pattern.n_defects
    if s == 0:
        raise ValueError("r_minus_inverse needs at least one defect")
    links = [(a + 1, b + 1, m) for a, b, m in pattern.links]
    links += [(1, c + 1, k) for c, k in pattern.defects]
    return LinkPattern.of((s,) + pattern.valences, links, {})


def cyclic_shift(pattern: LinkPattern) -> LinkPattern:
    """S = r_minus_inverse . r_plus: move the last point to the front."""
    if pattern.n_defects:
        raise ValueError("cyclic shift is defined on defect-free patterns")
    if pattern.p <= 1:
        return pattern
    return r_minus_inverse(r_plus(pattern))


def open_up(pattern: LinkPattern) -> LinkPattern:
    """Split every point into unit-valence points (defects attached to a new
    rightmost point first), producing a planar pair partition of 2N points,
    N = links + defects.

    At each point the slots run left to right as: links to the left (nearest
    partner first), then defects, then links to the right (farthest partner
    first).  Parallel copies of the same class nest.
    """
    s = pattern.n_defects
    work = r_plus_inverse(pattern) if s else pattern
    p = work.p
    start = [0] * (p + 1)
    acc = 0
    for i in range(1, p + 1):
        start[i] = acc
        acc += work.valences[i - 1]
    # first slot of every (point, side, partner) class, given the slot rule
    slot_of: dict[tuple[str, int, int], int] = {}
    for i in range(1, p + 1):
        off = start[i] + 1
        for a, m in sorted(((a, m) for a, b, m in work.links if b == i), reverse=True):
            slot_of[("L", i, a)] = off
            off += m
        for b, m in sorted(((b, m) for a, b, m in work.links if a == i), reverse=True):
            slot_of[("R", i, b)] = off
            off += m
    pairs = []
    for a, b, m in work.links:
        # the c-th slot at a pairs with the (m-1-c)-th at b, so copies nest
        for c in range(m):
            pairs.append((slot_of[("R", a, b)] + c, slot_of[("L", b, a)] + m - 1 - c, 1))
    return LinkPattern.of((1,) * work.n, pairs, {})


# -- sub-patterns and quotients ------------------------------------------------

def sub_pattern(pattern: LinkPattern, j: int, k: int) -> LinkPattern:
    """Lines attached to points j..k; boundary-crossing links and internal
    defects become defects of the sub-pattern."""
    if not (1 <= j < k <= pattern.p):
        raise ValueError("need 1 <= j < k <= p")
    links = []
    defects: dict[int, int] = {}
    for a, b, m in pattern.links:
        ain, bin_ = j <= a <= k, j <= b <= k
        if ain and bin_:
            links.append((a - j + 1, b - j + 1, m))
        elif ain:
            defects[a - j + 1] = defects.get(a - j + 1, 0) + m
        elif bin_:
            defects[b - j + 1] = defects.get(b - j + 1, 0) + m
    for c, cnt in pattern.defects:
        if j <= c <= k:
            defects[c - j + 1] = defects.get(c - j + 1, 0) + cnt
    return LinkPattern.of(pattern.valences[j - 1:k], links, defects)


def quotient(pattern: LinkPattern, j: int, k: int) -> LinkPattern:
    """Remove the links internal to j..k and collapse those points into one.

    The collapsed point keeps the boundary-crossing links and the internal
    defects; its valence r may be zero, in which case it is dropped (the
    trivial tensor factor is omitted).
    """
    if not (1 <= j < k <= pattern.p):
        raise ValueError("need 1 <= j < k <= p")
    def newidx(i: int) -> int:
        return i if i < j else (j if i <= k else i - (k - j))
    links: dict[tuple[int, int], int] = {}
    defects: dict[int, int] = {}
    r = 0
    for a, b, m in pattern.links:
        ain, bin_ = j <= a <= k, j <= b <= k
        if ain and bin_:
            continue
        na, nb = newidx(a), newidx(b)
        links[(na, nb)] = links.get((na, nb), 0) + m
        if ain or bin_:
            r += m
    for c, cnt in pattern.defects:
        defects[newidx(c)] = defects.get(newidx(c), 0) + cnt
        if j <= c <= k:
            r += cnt
    valences = (list(pattern.valences[:j - 1]) + [r]
                + list(pattern.valences[k:]))
    return _relabel_dropping(links, defects, valences)


# -- allowable orderings -------------------------------------------------------

@dataclass(frozen=True)
class RemovalStep:
    """One whole-class removal: m links (j, j+1) in the current labeling."""
    j: int
    m: int


def allowable_orderings(pattern: LinkPattern) -> list[tuple[RemovalStep, ...]]:
    """All orders in which the link classes can be removed whole, each step
    removing a class that connects consecutive indices of the current pattern.
    Every valid pattern admits at least one; the terminal state is the
    all-defect pattern of the defect partition."""
    res = validate(pattern)
    if not res:
        raise ValueError(f"invalid pattern: {res.reason}")
    out: list[tuple[RemovalStep, ...]] = []

    def walk(pat: LinkPattern, steps: tuple[RemovalStep, ...]):
        if not pat.links:
            out.append(steps)
            return
        for a, b, m in pat.links:
            if b == a + 1:
                walk(remove_links(pat, a, m), steps + (RemovalStep(a, m),))

    walk(pattern, ())
    if not out:
        raise AssertionError("valid pattern admits no allowable ordering")
    return out

"""Kolmogorov functions: shift- and flip-invariant measures on path spaces.

A Kolmogorov function assigns a non-negative value to every non-trivial
reduced path, symmetric under path reversal and satisfying the Kirchhoff
rules: the value of a path equals the sum of the values of its one-edge
extensions on either side.  These are exactly the cylinder values of a finite
shift- and flip-invariant measure on the space of biinfinite reduced paths.

The evaluator built from a weight tower computes the value of a path at the
first tower level whose long edges are at least that long: each occurrence of
the path (or its reverse) inside an iterate image contributes the edge weight
at that level, and each occurrence straddling one unsubdivided vertex
contributes the crossed turn weight.  The result does not depend on the level
choice, which the test-suite spot-checks.

An independent frequency oracle estimates the same values from occurrence
counts in iterate images alone, with a certified geometric tail bound; the
two routes share nothing past the transition matrix, making their agreement a
meaningful cross-validation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import intervals as ia
from .errors import IncompleteTableError, PathError, PreconditionError
from .graphs import (
    Graph, inverse, is_reduced, make_turn, reverse_path, subpaths_up_to,
)
from .maps import GraphMap
from .towers import StationaryTower, WeightTower, repetition_bound


class KolmogorovFunction:
    """Measure evaluator attached to a weight tower on a stationary tower."""

    def __init__(self, tower: StationaryTower, weights: WeightTower):
        self.tower = tower
        self.weights = weights
        self.graph = tower.graph
        self._memo = {}

    @property
    def lam(self):
        return self.weights.lam

    def eval(self, path):
        """Certified value of the measure on the cylinder of a reduced path."""
        path = tuple(path)
        if not path:
            raise PathError("Kolmogorov functions take non-trivial paths")
        if not self.graph.is_path(path) or not is_reduced(path):
            raise PathError("Kolmogorov functions take reduced edge paths")
        if path in self._memo:
            return self._memo[path]
        value = self.eval_at_level(path, self.tower.level_for_length(len(path)))
        self._memo[path] = value
        self._memo[reverse_path(path)] = value
        return value

    def eval_at_level(self, path, n: int):
        """Sum the weights of all legal level-n preimages of the path.

        Needs the level-n long edges at least as long as the path, so that a
        preimage crosses at most one unsubdivided vertex.
        """
        if self.tower.minlength(n) < len(path):
            raise PreconditionError("level too low for this path length")
        tower = self.tower
        scale = self.weights.vt.level_scale(n)
        total = ia.zero()
        rev = reverse_path(path)
        # (i) occurrences inside a single subdivided edge
        for e in self.graph.positive_edges:
            word = tower.word(e, n)
            count = _occurrences(word, path) + _occurrences(word, rev)
            if count:
                total = total + ia.exact(count) * self.weights.edge_weight[e]
        # (ii) occurrences straddling one unsubdivided vertex
        for e1 in self.graph.oriented_edges:
            w1 = tower.word(e1, n)
            v = self.graph.terminal(e1)
            for e2 in self.graph.directions_at(v):
                if e2 == inverse(e1):
                    continue
                w2 = tower.word(e2, n)
                turn = make_turn(inverse(e1), e2)
                tw = self.weights.turn_weight[turn]
                for cut in range(1, len(path)):
                    if w1[-cut:] == path[:cut] and w2[:len(path) - cut] == path[cut:]:
                        total = total + tw
        return total * scale

    def support_language(self, max_length: int):
        """Paths of positive measure, a subset of the infinitely legal
        language truncation."""
        return [p for p in self.graph.reduced_paths(max_length)
                if self.eval(p) > 0]

    def table(self, max_length: int) -> "MeasureTable":
        """Table over every reduced path up to the bound (exponentially many;
        keep the bound small)."""
        entries = {}
        for p in self.graph.reduced_paths(max_length):
            entries[p] = self.eval(p)
        return MeasureTable(self.graph, entries, max_length, provenance="computed")

    def support_table(self, max_length: int) -> "MeasureTable":
        """Table over the infinitely legal language truncation only; paths
        outside it have measure zero and stay implicit, which keeps long
        tables linear in the language size."""
        from .maps import infinitely_legal_language
        lang = infinitely_legal_language(self.tower.f, max_length,
                                         self.tower.pullbacks())
        entries = {p: self.eval(p) for p in lang.paths}
        return MeasureTable(self.graph, entries, max_length, provenance="computed")


def _occurrences(word, pattern) -> int:
    n, m = len(word), len(pattern)
    return sum(1 for i in range(n - m + 1) if word[i:i + m] == pattern)


# -- tables ------------------------------------------------------------------------


@dataclass
class MeasureTable:
    """Reduced-path -> value map, complete up to a length bound.

    Absent reduced paths within the bound are zeros (external listings, like
    hand-made integer tables, customarily omit them).  Values are Fractions
    for exact external data or intervals for computed data.
    """

    graph: Graph
    entries: dict
    max_length: int
    provenance: str = "external"

    def __post_init__(self):
        fixed = {}
        for path, value in self.entries.items():
            path = tuple(path)
            if not self.graph.is_path(path) or not is_reduced(path) or not path:
                raise PathError(f"table key is not a reduced path: {path}")
            fixed[path] = value
        self.entries = fixed

    def value(self, path):
        path = tuple(path)
        if path in self.entries:
            return self.entries[path]
        rev = reverse_path(path)
        if rev in self.entries:
            return self.entries[rev]
        if len(path) > self.max_length:
            raise IncompleteTableError(
                f"table complete only up to length {self.max_length}")
        return Fraction(0)

    def flip_violations(self):
        out = []
        for path, value in self.entries.items():
            rev = reverse_path(path)
            if rev in self.entries and not _values_equal(value, self.entries[rev]):
                out.append((path, rev))
        return out

    def recorded(self, path):
        """The stored value of a path or its reversal; None when unlisted."""
        path = tuple(path)
        if path in self.entries:
            return self.entries[path]
        return self.entries.get(reverse_path(path))

    def monotonicity_violations(self):
        """Entries exceeding the recorded value of one of their subpaths.

        Kirchhoff plus non-negativity force the value of a path to be at most
        the value of every subpath, so a violation flags inconsistent data.
        Only explicitly recorded entries are compared (external listings
        customarily omit entries, so absence is missing data, not a zero).
        """
        out = []
        for path, value in self.entries.items():
            for sub in subpaths_up_to(path, len(path)):
                if sub == path:
                    continue
                sval = self.recorded(sub)
                if sval is not None and _definitely_less(sval, value):
                    out.append((path, sub))
        return out

    def normalized(self):
        """Scale so the single-edge cylinder values over the positive section
        sum to one (probability normalisation)."""
        total = None
        for e in self.graph.positive_edges:
            v = self.value((e,))
            total = v if total is None else total + v
        if isinstance(total, Fraction):
            if total == 0:
                raise PreconditionError("cannot normalise the zero table")
            scale = Fraction(1) / total
        else:
            if not (total > 0):
                raise PreconditionError("cannot normalise the zero table")
            scale = 1 / total
        return MeasureTable(self.graph,
                            {p: v * scale for p, v in self.entries.items()},
                            self.max_length, provenance=self.provenance)


def _values_equal(x, y) -> bool:
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x == y
    x = x if not isinstance(x, Fraction) else ia.from_fraction(x)
    y = y if not isinstance(y, Fraction) else ia.from_fraction(y)
    return ia.contains_zero(x - y)


def _definitely_less(x, y) -> bool:
    """x < y certainly."""
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x < y
    x = x if not isinstance(x, Fraction) else ia.from_fraction(x)
    y = y if not isinstance(y, Fraction) else ia.from_fraction(y)
    return (x < y) is True


# -- verification --------------------------------------------------------------------


@dataclass
class VerificationReport:
    """Check outcomes with certified comparison semantics: a check fails only
    when its violation is provably beyond the tolerance; a violation interval
    straddling the tolerance is *inconclusive* (the caller should raise the
    working precision and re-run)."""

    checks: dict = field(default_factory=dict)
    max_violation: float = 0.0
    failures: list = field(default_factory=list)
    inconclusive: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and not self.inconclusive

    def record(self, name: str, violation, tol: float, detail=None):
        sup, inf = violation if isinstance(violation, tuple) else (violation, violation)
        self.checks[name] = sup
        self.max_violation = max(self.max_violation, sup)
        if sup > tol:
            if inf > tol:
                self.failures.append((name, sup, detail))
            else:
                self.inconclusive.append((name, sup, detail))


class _Worst:
    """Running maximum of |x| over exact or interval values, keeping both the
    certified upper bound and the certified lower bound of the maximum."""

    def __init__(self):
        self.sup = 0.0
        self.inf = 0.0

    def add(self, x):
        if isinstance(x, Fraction):
            mag = float(abs(x))
            self.sup = max(self.sup, mag)
            self.inf = max(self.inf, mag)
            return
        self.sup = max(self.sup, ia.sup_abs(x))
        self.inf = max(self.inf, ia.inf_abs(x))

    @property
    def pair(self):
        return (self.sup, self.inf)


def verify_kolmogorov(source, max_length: int, tol: float = 0.0,
                      graph: Graph = None) -> VerificationReport:
    """Check flip symmetry and both Kirchhoff rules on all reduced paths up
    to the bound; for tables, also audit subpath monotonicity.

    ``source`` is a KolmogorovFunction or a MeasureTable.  Values one edge
    longer than the bound must be available.
    """
    if isinstance(source, KolmogorovFunction):
        graph = source.graph
        get = source.eval
    else:
        graph = source.graph
        get = source.value
        if max_length + 1 > source.max_length:
            raise IncompleteTableError(
                "Kirchhoff checks need values one edge beyond the bound")
    report = VerificationReport()
    worst_flip = _Worst()
    worst_left = _Worst()
    worst_right = _Worst()
    for path in graph.reduced_paths(max_length):
        value = get(path)
        worst_flip.add(_sub(value, get(reverse_path(path))))
        left = value
        for e0 in graph.extensions_left(path):
            left = _sub(left, get((e0,) + path))
        worst_left.add(left)
        right = value
        for e1 in graph.extensions_right(path):
            right = _sub(right, get(path + (e1,)))
        worst_right.add(right)
    report.record("flip", worst_flip.pair, tol)
    report.record("kirchhoff-left", worst_left.pair, tol)
    report.record("kirchhoff-right", worst_right.pair, tol)
    if isinstance(source, MeasureTable):
        for path, sub in source.monotonicity_violations():
            report.flags.append(
                ("monotonicity", graph.path_label(path), graph.path_label(sub)))
    return report


def _sub(x, y):
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x - y
    x = x if not isinstance(x, Fraction) else ia.from_fraction(x)
    y = y if not isinstance(y, Fraction) else ia.from_fraction(y)
    return x - y


# -- image measures --------------------------------------------------------------------


def image_measure(f: GraphMap, kf: KolmogorovFunction, path):
    """Value of the pushforward measure on a codomain path.

    The domain is subdivided at preimages of vertices; every subdivided-sense
    preimage of the path contributes the measure of the smallest full-edge
    domain path containing it.
    """
    path = tuple(path)
    if not f.codomain.is_path(path) or not is_reduced(path) or not path:
        raise PathError("image measure takes non-trivial reduced codomain paths")
    f.require_tame("image measure")
    if kf.graph._endpoints != f.domain._endpoints:
        raise PreconditionError("the measure lives on a different graph "
                                "than the map's domain")
    total = ia.zero()
    for prefix in _subedge_starts(f, path[0]):
        for parent in _subedge_preimages(f, prefix, path):
            total = total + kf.eval(parent)
    return total


def _subedge_starts(f: GraphMap, first_letter):
    """Sub-edges of the subdivided domain whose image letter matches."""
    out = []
    for e in f.domain.oriented_edges:
        img = f.image(e)
        for j, letter in enumerate(img):
            if letter == first_letter:
                out.append((e, j))
    return out


def _subedge_preimages(f: GraphMap, start, path):
    """Parents (full-edge domain paths) of subdivided preimage paths of
    ``path`` beginning at the given sub-edge."""
    results = []

    def walk(e, j, idx, parents):
        img = f.image(e)
        while idx < len(path) and j < len(img):
            if img[j] != path[idx]:
                return
            j += 1
            idx += 1
        if idx == len(path):
            results.append(tuple(parents))
            return
        v = f.domain.terminal(e)
        for d in f.domain.directions_at(v):
            if d == inverse(e):
                continue
            walk(d, 0, idx, parents + [d])

    e0, j0 = start
    walk(e0, j0, 0, [e0])
    return results


def verify_eigen_measure(f: GraphMap, kf: KolmogorovFunction, lam,
                         max_length: int, tol: float,
                         language=None) -> VerificationReport:
    """Check that the pushforward equals lambda times the measure on all
    paths up to the bound, plus support containment in the infinitely legal
    language when one is supplied."""
    lam = lam.interval() if hasattr(lam, "interval") else lam
    report = VerificationReport()
    worst = _Worst()
    for path in f.domain.reduced_paths(max_length):
        worst.add(image_measure(f, kf, path) - lam * kf.eval(path))
    report.record("eigen-equation", worst.pair, tol)
    if language is not None:
        bad = [p for p in f.domain.reduced_paths(min(max_length, language.max_length))
               if (kf.eval(p) > 0) is True and p not in language]
        if bad:
            report.record("support", 1.0, 0.0, detail=bad[:5])
        else:
            report.record("support", 0.0, 0.0)
    return report


# -- weight recovery -------------------------------------------------------------------


def recover_weights(table: MeasureTable, tower: StationaryTower, m: int, rho: int,
                    infinitely_legal: bool = True, enforce_bound: bool = True):
    """Reconstruct the level-m short-edge weights from measured cylinder
    values: the weight of a short edge is the sum of the table values over
    the *distinct* images of the radius-rho windows centred on it (identical
    images from different windows are counted once).

    ``rho`` must be at least the level's repetition bound, otherwise windows
    centred on different edges can read the same word and the sums
    double-count; pass ``enforce_bound=False`` to experiment below the bound.
    """
    if enforce_bound:
        search = repetition_bound(tower, m, rho, infinitely_legal)
        if not search.found:
            raise PreconditionError(
                f"radius {rho} is below the repetition bound of level {m}")
    if 2 * rho + 1 > table.max_length:
        raise IncompleteTableError(
            f"windows of length {2 * rho + 1} exceed the table bound "
            f"{table.max_length}")
    out = {}
    for center in tower.short_edges(m):
        images = set()
        for w in tower.windows(center, rho, m):
            img = tower.path_image(w, m)
            if not is_reduced(img):
                continue
            if infinitely_legal and not tower.pullbacks().is_infinitely_legal(img):
                continue
            images.add(img)
        total = None
        for img in sorted(images):
            v = table.value(img)
            v = ia.from_fraction(v) if isinstance(v, Fraction) else v
            total = v if total is None else total + v
        out[center] = total if total is not None else ia.zero()
    return out


# -- the independent frequency oracle ----------------------------------------------------


@dataclass
class OracleEstimate:
    value: object          # interval estimate
    tail_bound: object     # interval upper bound on the truncation error
    iterations: int

    def within(self, reference) -> bool:
        """Is |reference - value| certifiably within the tail bound?"""
        return (abs(reference - self.value) <= self.tail_bound) is not False


def frequency_oracle(f: GraphMap, vector, lam, path, t: int) -> OracleEstimate:
    """Occurrence-count estimate of the measure of a path.

    Counts occurrences of the path and its reverse in the t-th iterate images
    of all positive edges, weights them by the eigenvector, and scales by
    lambda**-t.  The counts run through the block recursion (occurrences in
    the image of a word are occurrences in its blocks plus junction
    straddles), so large t stays cheap.  The estimate increases in t to the
    true value; the returned tail bound is the geometric-series bound on the
    missing straddling mass, derived from the eigenvector identity alone.
    """
    path = tuple(path)
    if not path:
        raise PathError("frequency oracle takes non-trivial paths")
    graph = f.domain
    rev = reverse_path(path)
    want = (path, rev)
    margin = len(path) - 1

    # explicit words until every block is long enough for boundary recursion
    words = {e: (e,) for e in graph.oriented_edges}
    level = 0
    while level < t and min(len(words[e]) for e in graph.oriented_edges) < max(1, margin):
        words = {e: f.map_path(words[e]) for e in graph.oriented_edges}
        level += 1
    counts = {e: sum(_occurrences(words[e], w) for w in want)
              for e in graph.oriented_edges}
    prefixes = {e: words[e][:margin] for e in graph.oriented_edges}
    suffixes = {e: words[e][-margin:] if margin else () for e in graph.oriented_edges}
    while level < t:
        new_counts = {}
        new_pre = {}
        new_suf = {}
        for e in graph.oriented_edges:
            img = f.image(e)
            c = sum(counts[x] for x in img)
            for i in range(len(img) - 1):
                boundary = suffixes[img[i]] + prefixes[img[i + 1]]
                c += sum(_occurrences(boundary, w) for w in want)
            new_counts[e] = c
            new_pre[e] = (prefixes[img[0]] if margin else ())
            new_suf[e] = (suffixes[img[-1]] if margin else ())
        counts, prefixes, suffixes = new_counts, new_pre, new_suf
        level += 1

    lam = lam if not hasattr(lam, "interval") else lam.interval()
    scale = lam ** (-t)
    est = ia.zero()
    vec_total = ia.zero()
    for k, e in enumerate(graph.positive_edges):
        est = est + ia.exact(counts[e]) * vector[k]
        vec_total = vec_total + vector[k]
    est = est * scale
    # new straddling occurrences at step s+1: per junction at most
    # 2(len-1) of them (path and reverse), junction count max |f(e)| - 1
    max_img = max(len(f.image(e)) for e in graph.positive_edges)
    per_step = ia.exact(2 * margin * max(0, max_img - 1)) * vec_total
    ratio = 1 / lam
    tail = per_step * ia.geometric_tail(ratio, t + 1) if margin else ia.zero()
    return OracleEstimate(value=est, tail_bound=tail, iterations=t)

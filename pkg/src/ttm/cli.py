"""Command-line surface.

Subcommands:

* ``check``     train track / expanding / homotopy-equivalence / repetition report
* ``spectrum``  block decomposition, eigenvalues, distinguished eigenvectors (JSON)
* ``measure``   cylinder values of the eigenvector measure (TSV or JSON)
* ``verify``    Kirchhoff, flip, switch, eigen-equation, oracle agreement
* ``ergodic``   candidate ergodic probability measures of a substitution subshift

Exit codes: 0 success, 2 parse error, 3 precondition violated, 4 verification
failure.  The working precision (bits) comes from ``TTM_PRECISION_BITS``
(default 128).  Outputs are deterministic: values are printed at a fixed
certified digit count and sort orders are fixed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import mpmath

from . import intervals as ia
from . import spectra
from .errors import ParseError, TTMError
from .maps import (
    GraphMap, is_expanding, is_homotopy_equivalence, is_train_track,
)
from .measures import (
    KolmogorovFunction, frequency_oracle, verify_eigen_measure,
    verify_kolmogorov,
)
from .substitutions import ergodic_measures
from .textio import format_table_tsv, parse, parse_path
from .towers import (
    StationaryTower, VectorTower, repetition_bound, weight_tower_from_vector,
)

EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_VERIFICATION = 4

DIGITS = 12


def fmt(x, exact: bool = False) -> str:
    return ia.format_interval(x, digits=DIGITS, exact_endpoints=exact)


def fmt_exact_fraction(x) -> str:
    """Outward endpoints as exact fractions (mpf values are dyadic)."""
    lo, hi = ia.endpoints(x)
    flo = Fraction(*mpmath.libmp.to_rational(lo._mpf_))
    fhi = Fraction(*mpmath.libmp.to_rational(hi._mpf_))
    return f"[{flo}, {fhi}]"


def load(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return parse(handle.read())


def get_map(doc, name: str) -> GraphMap:
    return doc.map(name)


# -- vector selection ---------------------------------------------------------------


def pick_vector(f: GraphMap, spec_text: str):
    """Vector for the measure pipeline.

    ``auto`` takes the distinguished eigenvector with the largest eigenvalue
    above one, rescaled so its smallest positive coordinate is one.  An
    explicit comma-separated rational vector is certified against the
    transition matrix, with the eigenvalue derived exactly.
    """
    m = f.transition_matrix()
    if spec_text == "auto":
        pairs = [p for p in spectra.distinguished_eigenvectors(m)
                 if p.value.compare(1) > 0]
        if not pairs:
            raise TTMError("no eigenvalue above one; no measure to build")
        best = pairs[0]
        for p in pairs[1:]:
            if p.value.compare(best.value) > 0:
                best = p
        positive = [v for v in best.vector if (v > 0) is True]
        scale = min(positive, key=ia.midpoint)
        vector = tuple(v / scale if (v > 0) is True else ia.zero()
                       for v in best.vector)
        return vector, best.value
    coords = [Fraction(tok) for tok in spec_text.split(",")]
    if len(coords) != len(m):
        raise TTMError(f"vector needs {len(m)} coordinates")
    if all(c == 0 for c in coords) or any(c < 0 for c in coords):
        raise TTMError("vector must be non-negative and non-zero")
    image = [sum(m[i][j] * coords[j] for j in range(len(coords)))
             for i in range(len(coords))]
    pivot = next(i for i, c in enumerate(coords) if c != 0)
    lam = image[pivot] / coords[pivot]
    if any(image[i] != lam * coords[i] for i in range(len(coords))):
        raise TTMError("not an exact eigenvector of the transition matrix")
    if lam <= 1:
        raise TTMError(f"eigenvalue {lam} is not above one")
    return tuple(ia.from_fraction(c) for c in coords), ia.from_fraction(lam)


def build_measure(f: GraphMap, vector_spec: str):
    tower = StationaryTower(f)
    vector, lam = pick_vector(f, vector_spec)
    vt = VectorTower(tower, vector, lam)
    wt = weight_tower_from_vector(tower, vt)
    return tower, vt, wt, KolmogorovFunction(tower, wt)


# -- subcommands --------------------------------------------------------------------


def cmd_check(args) -> int:
    doc = load(args.file)
    f = get_map(doc, args.map)
    out = []
    ok, witness = is_train_track(f)
    if ok:
        out.append("train-track: yes")
    else:
        e, t = witness
        out.append(f"train-track: no (iterate {t} of edge "
                   f"{f.domain.edge_labels[e >> 1]} is unreduced)")
    expanding = is_expanding(f) if ok else None
    out.append("expanding: " + ("yes" if expanding else
                                "no" if expanding is not None else "n/a"))
    out.append("homotopy-equivalence: "
               + ("yes" if is_homotopy_equivalence(f) else "no"))
    if ok and expanding:
        tower = StationaryTower(f)
        for level in range(args.rep_levels + 1):
            r = repetition_bound(tower, level, args.rep_cap)
            if r.found:
                out.append(f"repetition-bound[level {level}]: {r.bound}")
            else:
                out.append(f"repetition-bound[level {level}]: "
                           f"not found within cap {args.rep_cap}")
    print("\n".join(out))
    return 0


def cmd_spectrum(args) -> int:
    doc = load(args.file)
    f = get_map(doc, args.map)
    m = f.transition_matrix()
    bf = spectra.block_form(m)
    labels = f.domain.edge_labels
    blocks = []
    for i, idx in enumerate(bf.blocks):
        radius = spectra.spectral_radius_root(spectra.submatrix(m, idx))
        blocks.append({
            "indices": [labels[k] for k in idx],
            "kind": bf.kinds[i],
            "period": bf.periods[i],
            "spectral_radius": fmt(radius.interval(), exact=args.exact),
        })
    order = [[i, j] for i in range(len(bf.blocks))
             for j in sorted(bf.reach[i]) if i != j]
    distinguished = []
    for pair in spectra.distinguished_eigenvectors(m):
        distinguished.append({
            "eigenvalue": fmt(pair.interval(), exact=args.exact),
            "vector": {labels[k]: fmt(pair.vector[k], exact=args.exact)
                       for k in range(len(labels))},
            "support": [labels[k] for k in sorted(pair.support)],
        })
    report = {
        "schema": 1,
        "matrix": [list(r) for r in m],
        "edge_order": list(labels),
        "blocks": blocks,
        "power_used": bf.power_used,
        "dominates": order,
        "distinguished": distinguished,
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def _measure_rows(graph, kf, paths, exact):
    rows = []
    for p in paths:
        value = kf.eval(p)
        rows.append((p, fmt_exact_fraction(value) if exact else fmt(value)))
    return rows


def cmd_measure(args) -> int:
    doc = load(args.file)
    f = get_map(doc, args.map)
    _, _, _, kf = build_measure(f, args.vector)
    graph = f.domain
    if args.table_up_to is not None:
        paths = sorted(graph.reduced_paths(args.table_up_to),
                       key=lambda p: (len(p), graph.path_label(p)))
    elif args.paths:
        paths = [parse_path(graph, chunk)
                 for chunk in args.paths.split(",") if chunk.strip()]
    else:
        raise TTMError("measure needs --paths or --table-up-to")
    rows = _measure_rows(graph, kf, paths, args.exact)
    if args.format == "json":
        payload = {
            "schema": 1,
            "values": [{"path": graph.path_label(p), "value": v}
                       for p, v in rows],
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        sys.stdout.write(format_table_tsv(graph, rows))
    return 0


def cmd_verify(args) -> int:
    doc = load(args.file)
    f = get_map(doc, args.map)
    tol = args.tol
    # interval comparison against the tolerance is tri-state; an inconclusive
    # suite (too-wide intervals, not a provable violation) doubles the
    # working precision and reruns before giving a verdict
    for attempt in range(3):
        lines, failures, inconclusive = _verify_once(f, args, tol)
        if not inconclusive or attempt == 2:
            break
        ia.set_precision(ia.precision_bits() * 2)
    print("\n".join(lines))
    if inconclusive:
        print(f"inconclusive at {ia.precision_bits()} bits: "
              + ", ".join(inconclusive))
    return 0 if not failures and not inconclusive else EXIT_VERIFICATION


def _verify_once(f, args, tol):
    tower, vt, wt, kf = build_measure(f, args.vector)
    lines = []
    failures = []
    inconclusive = []

    def report(label, status, detail):
        lines.append(f"{label}: {status} ({detail})")
        if status == "FAIL":
            failures.append(label)
        elif status == "INCONCLUSIVE":
            inconclusive.append(label)

    def status_from(rep, names):
        if names & {n for n, _, _ in rep.failures}:
            return "FAIL"
        if names & {n for n, _, _ in rep.inconclusive}:
            return "INCONCLUSIVE"
        return "pass"

    rep = verify_kolmogorov(kf, args.max_len, tol)
    report("flip (reversal symmetry)", status_from(rep, {"flip"}),
           f"max violation {rep.checks['flip']:.3e}")
    kirch = max(rep.checks["kirchhoff-left"], rep.checks["kirchhoff-right"])
    report("kirchhoff rules",
           status_from(rep, {"kirchhoff-left", "kirchhoff-right"}),
           f"max violation {kirch:.3e}")

    switch = list(wt.switch_residuals().values())
    sup = max(ia.sup_abs(r) for r in switch)
    inf = max(ia.inf_abs(r) for r in switch)
    status = "pass" if sup <= tol else ("FAIL" if inf > tol else "INCONCLUSIVE")
    report("switch conditions", status, f"max violation {sup:.3e}")

    erep = verify_eigen_measure(f, kf, vt.lam, args.max_len, tol)
    report("eigen equation (pushforward = lambda * measure)",
           status_from(erep, {"eigen-equation"}),
           f"max violation {erep.checks['eigen-equation']:.3e}")

    worst = 0.0
    violated = False
    for p in f.domain.reduced_paths(min(args.max_len, 4)):
        est = frequency_oracle(f, vt.vector, vt.lam, p, args.oracle_t)
        if not est.within(kf.eval(p)):
            violated = True
        worst = max(worst, ia.sup_abs(kf.eval(p) - est.value))
    report("oracle agreement", "FAIL" if violated else "pass",
           f"max |eval - estimate| {worst:.3e} at t={args.oracle_t}")
    return lines, failures, inconclusive


def cmd_ergodic(args) -> int:
    doc = load(args.file)
    sigma = doc.substitution(args.subst)
    enum = ergodic_measures(sigma)
    measures = []
    for mu in enum.measures:
        freqs = mu.letter_frequencies()
        measures.append({
            "eigenvalue": fmt(mu.eigenpair.interval(), exact=args.exact),
            "frequencies": {str(x): fmt(v, exact=args.exact)
                            for x, v in zip(sigma.alphabet, freqs)},
            "support": [str(sigma.alphabet[k])
                        for k in sorted(mu.eigenpair.support)],
        })
    payload = {
        "schema": 1,
        "alphabet": [str(x) for x in sigma.alphabet],
        "measures": measures,
        "skipped_eigenvalues": [fmt(p.interval()) for p in enum.skipped],
        "power_used": enum.block_form.power_used,
        "warnings": list(enum.warnings),
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


# -- argument plumbing -----------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ttm",
        description="Train track maps, graph towers, and invariant measures.")
    ap.add_argument("--seed", type=int, default=None,
                    help="reserved; the core paths use no randomness")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="train track / expanding / pi1 report")
    p.add_argument("file")
    p.add_argument("--map", required=True)
    p.add_argument("--rep-cap", type=int, default=6)
    p.add_argument("--rep-levels", type=int, default=2)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("spectrum", help="block eigenvalue data as JSON")
    p.add_argument("file")
    p.add_argument("--map", required=True)
    p.add_argument("--exact", action="store_true",
                   help="print outward interval endpoints")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("measure", help="cylinder values of the measure")
    p.add_argument("file")
    p.add_argument("--map", required=True)
    p.add_argument("--vector", default="auto",
                   help="'auto' or comma-separated rationals")
    p.add_argument("--paths", help="comma-separated edge-token paths")
    p.add_argument("--table-up-to", type=int, default=None,
                   help="emit all reduced paths up to this length")
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("--exact", action="store_true",
                   help="print exact interval endpoints as fractions")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("verify", help="run the verification suites")
    p.add_argument("file")
    p.add_argument("--map", required=True)
    p.add_argument("--vector", default="auto")
    p.add_argument("--max-len", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--oracle-t", type=int, default=20)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ergodic", help="measures of a substitution subshift")
    p.add_argument("file")
    p.add_argument("--subst", required=True)
    p.add_argument("--exact", action="store_true")
    p.set_defaults(func=cmd_ergodic)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except TTMError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())

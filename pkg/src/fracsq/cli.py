"""Command-line interface: ``fracsq <command> [options]``.

Exit codes: 0 ok, 2 usage or input error, 3 budget exceeded (partial JSON on
stdout), 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from fractions import Fraction
from itertools import product
from multiprocessing import Pool

from .classify import ONE, Limits, classify, explain, recheck
from .core import (BudgetExceeded, DigitSet, DigitSetError, max_level, parse_digit_set,
                   product_form)
from .digitop import digit_operator, example_family, intercept_orbit, parse_line
from .hata import connected_certificate, hata_graph
from .lines import Slope, all_profiles, omega_level
from .render import RasterSpec, approx_image, encode_png_gray, render_hata, render_omega
from .topology import beta0_sequence, beta0_stabilize, dichotomy_probe, pi1_certificate

EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_INVARIANT = 4


class InvariantViolation(RuntimeError):
    pass


def _family(k):
    return lambda: example_family(k)


PRESETS = {
    "carpet3": ("Sierpinski carpet", lambda: parse_digit_set("111/101/111")),
    "vicsek3": ("Vicsek cross", lambda: parse_digit_set("010/111/010")),
    "ex21": ("beta0 sequence 1, 1, 3", lambda: parse_digit_set("N=3; D=(1,0),(0,1),(1,1),(2,1),(2,2)")),
    "diag5": ("diagonal, from the line x2 = x1", _family(1)),
    "d0_5": ("d2_5 without the corner digit (0,4)", _family(0)),
    "d2_5": ("from x2 = x1 and x2 = x1 - 1/5", _family(2)),
    "d3_5": ("from x2 = x1 and x2 = x1 -/+ 1/5", _family(3)),
    "product32": ("columns {0,2} times {0,1,2}", lambda: parse_digit_set("101/101/101")),
}


def _emit(obj, args, text=None):
    if args.json or text is None:
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        print(text)


def _digit_set(args) -> DigitSet:
    given = [x for x in (args.digits, args.grid, args.preset) if x]
    if len(given) != 1:
        raise DigitSetError("give exactly one of --digits, --grid, --preset")
    if args.preset:
        if args.preset not in PRESETS:
            raise DigitSetError(f"unknown preset {args.preset!r}; see 'fracsq presets'")
        return PRESETS[args.preset][1]()
    return parse_digit_set(args.digits or args.grid)


def _limits(args, D) -> Limits:
    lim = Limits.default(D.order)
    beta = args.depth if args.depth is not None else lim.beta_depth
    probe = args.probe_depth if args.probe_depth is not None else lim.probe_depth
    return Limits(beta, probe)


# -- commands ----------------------------------------------------------------

def cmd_approx(args):
    D = _digit_set(args)
    n = args.depth or 1
    spec = RasterSpec(args.px or D.order ** n * 8, margin=args.margin)
    img = approx_image(D, n, spec)
    data = encode_png_gray(img)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    fg = int((img == spec.foreground).sum())
    _emit({"n": n, "px": spec.px, "side": int(img.shape[0]), "foreground": fg,
           "sha256": hashlib.sha256(data).hexdigest(), "out": args.out}, args)
    return 0


def cmd_components(args):
    D = _digit_set(args)
    want = args.depth or 3
    top = min(want, max_level(D.order))
    seq = beta0_sequence(D, top)
    stab = beta0_stabilize(D, top) if top >= 3 else None
    out = {"digits": D.to_json(), "beta0": seq,
           "stabilization": None if stab is None else {"n0": stab.n0, "beta0": stab.beta0}}
    if top < want:
        out["budget_exceeded"] = {"requested": want, "reached": top}
        print(json.dumps(out, indent=2, sort_keys=True))
        return EXIT_BUDGET
    text = f"beta0: {seq}\n" + (f"stabilizes at n0={stab.n0}: beta0(K) = {stab.beta0}"
                                if stab else "no stabilization found")
    _emit(out, args, text)
    return 0


def cmd_hata(args):
    D = _digit_set(args)
    g = hata_graph(D, args.depth or 1)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(render_hata(g))
    if args.json:
        out = g.to_json()
        out["certificate"] = connected_certificate(D)
        _emit(out, args)
    else:
        sys.stdout.write(render_hata(g))
    return 0


def cmd_pi1(args):
    D = _digit_set(args)
    _emit({"pi1": pi1_certificate(D)}, args, pi1_certificate(D))
    return 0


def _parse_slope(text: str) -> Slope:
    if text == "v":
        return Slope(1, 0)
    t = Fraction(text)
    return Slope.of(t.numerator, t.denominator)


def cmd_omega(args):
    D = _digit_set(args)
    profiles = all_profiles(D)
    if args.slope:
        want = _parse_slope(args.slope)
        profiles = [p for p in profiles if p.slope == want]
        if not profiles:
            raise DigitSetError(f"slope {args.slope} is not admissible for N={D.order}")
    out = []
    for p in profiles:
        row = p.to_json()
        if args.depth:
            row["levels"] = [omega_level(D, p.slope, n).to_json() for n in range(1, args.depth + 1)]
        out.append(row)
    if args.out:
        chosen = next((p for p in profiles if p.carries_line), profiles[0])
        with open(args.out, "w") as fh:
            fh.write(render_omega(chosen))
    _emit(out, args)
    return 0


def cmd_digitop(args):
    if not args.order:
        raise DigitSetError("digitop needs --n")
    lines = [parse_line(t) for t in args.lines]
    D = digit_operator(lines, args.order)
    out = {"digits": D.to_json(),
           "orbits": [dict(intercept_orbit(ln, args.order).to_json(), line=str(ln)) for ln in lines]}
    _emit(out, args, D.to_text() + "\n" + D.to_grid())
    return 0


def cmd_classify(args):
    D = _digit_set(args)
    v = classify(D, _limits(args, D))
    bad = recheck(v)
    if bad:
        raise InvariantViolation(f"certificate re-check failed: {bad}")
    _emit(v.to_json(), args, explain(v))
    return 0


def cmd_presets(args):
    rows = {k: {"about": about, "digits": make().to_json()} for k, (about, make) in PRESETS.items()}
    text = "\n".join(f"{k:10s} {v['about']}" for k, v in rows.items())
    _emit(rows, args, text)
    return 0


# -- census ------------------------------------------------------------------

def census_sets(N: int):
    """Every digit set of order N with at least two digits, in bitmask order.

    Bit k of the mask is the cell (k // N, k % N).
    """
    cells = list(product(range(N), repeat=2))
    for mask in range(1, 1 << (N * N)):
        if mask & (mask - 1) == 0:
            continue
        yield mask, DigitSet(N, frozenset(c for k, c in enumerate(cells) if mask >> k & 1))


def _census_task(task):
    mask, N, beta, probe = task
    cells = list(product(range(N), repeat=2))
    D = DigitSet(N, frozenset(c for k, c in enumerate(cells) if mask >> k & 1))
    v = classify(D, Limits(beta, probe))
    fails = recheck(v)
    pf = product_form(D)
    stab_seq = next((s.result.get("sequence") for s in v.certificate
                     if s.rule == "R3" and isinstance(s.result, dict)), None) or []
    dim = v.dim_lambda1
    return {
        "mask": mask,
        "digits": D.to_text(),
        "size": len(D),
        "lambda": v.lambda_range,
        "rule": v.rule or "",
        "dim_m": "" if dim is None else dim.count,
        "dim_value": "" if dim is None else repr(dim.value),
        "product_form": "" if pf is None else f"{pf.axis}:{'/'.join(map(str, pf.indices))}",
        "beta0": " ".join(map(str, stab_seq[:4])),
        "recheck": "ok" if not fails else "FAIL",
    }


CENSUS_FIELDS = ["mask", "digits", "size", "lambda", "rule", "dim_m", "dim_value",
                 "product_form", "beta0", "recheck"]


def expected_product_forms(N: int) -> int:
    """Column or row subsets of size 2..N-1; the two families never coincide."""
    return 2 * (2 ** N - N - 2)


def run_census(N: int, jobs: int = 1, beta=None, probe=None, progress=False) -> tuple:
    lim = Limits.default(N)
    beta = beta or lim.beta_depth
    probe = probe or lim.probe_depth
    tasks = [(mask, N, beta, probe) for mask, _ in census_sets(N)]
    rows = []
    if jobs > 1:
        with Pool(jobs) as pool:
            it = pool.imap(_census_task, tasks, chunksize=max(1, len(tasks) // (jobs * 16)))
            for k, row in enumerate(it):
                rows.append(row)
                if progress and k % 1000 == 0:
                    print(f"census: {k}/{len(tasks)}", file=sys.stderr)
    else:
        for k, t in enumerate(tasks):
            rows.append(_census_task(t))
            if progress and k % 1000 == 0:
                print(f"census: {k}/{len(tasks)}", file=sys.stderr)
    counts = {}
    for r in rows:
        counts[r["lambda"]] = counts.get(r["lambda"], 0) + 1
    n_pf = sum(1 for r in rows if r["product_form"])
    n_one = counts.get(ONE, 0)
    # product forms with N - 1 full lines are where the two bounds on the
    # number of Cantor maps disagree
    edge_bound = sum(1 for r in rows if r["product_form"]
                     and len(r["product_form"].split(":")[1].split("/")) == N - 1)
    pattern = [r["digits"] for r in rows if _plateau(r["beta0"])]
    summary = {
        "n": N,
        "rows": len(rows),
        "expected_rows": 2 ** (N * N) - (N * N + 1),
        "depths": {"beta_depth": beta, "probe_depth": probe},
        "counts": dict(sorted(counts.items())),
        "by_rule": _tally(rows, "rule"),
        "product_forms": n_pf,
        "expected_product_forms": expected_product_forms(N),
        "one_verdicts": n_one,
        "product_cross_check": n_one == n_pf == expected_product_forms(N),
        "product_forms_with_N_minus_1_lines": edge_bound,
        "recheck_failures": sum(1 for r in rows if r["recheck"] != "ok"),
        "beta0_plateau_examples": pattern,
    }
    return rows, summary


def _plateau(seq: str) -> bool:
    b = [int(x) for x in seq.split()] if seq else []
    return len(b) >= 3 and 1 < b[0] == b[1] < b[2]


def _tally(rows, key):
    out = {}
    for r in rows:
        out[r[key] or "-"] = out.get(r[key] or "-", 0) + 1
    return dict(sorted(out.items()))


def census_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CENSUS_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def cmd_census(args):
    N = args.order or 3
    if N * N > 9 and not args.allow_large:
        raise DigitSetError(f"census for N={N} enumerates {2 ** (N * N)} sets; pass --allow-large")
    if N * N > 16:
        raise DigitSetError("census supports N <= 4")
    beta = args.depth
    probe = args.probe_depth
    if N == 4:
        beta = beta or 4
        probe = probe or 3
    t0 = time.perf_counter()
    rows, summary = run_census(N, args.jobs, beta, probe, progress=N > 3)
    elapsed = time.perf_counter() - t0
    text = census_csv(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    print(json.dumps(summary, indent=2, sort_keys=True))
    print(f"census: {len(rows)} sets in {elapsed:.1f}s; product-form cross-check "
          f"{'passed' if summary['product_cross_check'] else 'FAILED'}", file=sys.stderr)
    if summary["recheck_failures"] or summary["rows"] != summary["expected_rows"]:
        return EXIT_INVARIANT
    return 0


# -- argument parsing --------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", help='list syntax, e.g. "N=3; D=(0,0),(2,2)"')
    common.add_argument("--grid", help='0/1 rows, top row first, separated by "/" or newlines')
    common.add_argument("--preset", help="named digit set (see 'presets')")
    common.add_argument("--n", dest="order", type=int, help="order N (digitop, census)")
    common.add_argument("--depth", type=int, help="level or maximum level")
    common.add_argument("--probe-depth", type=int, help="maximum level for the dichotomy probe")
    common.add_argument("--px", type=int, help="pixels per unit (approx)")
    common.add_argument("--out", help="output file")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (census)")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = argparse.ArgumentParser(prog="fracsq", description="Exact analysis of fractal squares K(N, D).")
    sub = p.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("approx", parents=[common], help="render K^(n) as PNG")
    sp.add_argument("--margin", type=int, default=0)
    sp.set_defaults(func=cmd_approx)
    sub.add_parser("components", parents=[common], help="beta0 sequence and stabilization").set_defaults(func=cmd_components)
    sub.add_parser("hata", parents=[common], help="Hata graph (DOT) and connectivity").set_defaults(func=cmd_hata)
    sub.add_parser("pi1", parents=[common], help="simple-connectivity certificate").set_defaults(func=cmd_pi1)
    sp = sub.add_parser("omega", parents=[common], help="per-slope intercept profiles")
    sp.add_argument("--slope", help='r/s, or "v" for vertical')
    sp.set_defaults(func=cmd_omega)
    sp = sub.add_parser("digitop", parents=[common], help="digit set generated by rational lines")
    sp.add_argument("lines", nargs="+", help='"r/s@p/q" or "v@p/q"')
    sp.set_defaults(func=cmd_digitop)
    sub.add_parser("classify", parents=[common], help="classify lambda(K)").set_defaults(func=cmd_classify)
    sp = sub.add_parser("census", parents=[common], help="classify every digit set of order N")
    sp.add_argument("--allow-large", action="store_true", help="permit N = 4")
    sp.set_defaults(func=cmd_census)
    sub.add_parser("presets", parents=[common], help="list named digit sets").set_defaults(func=cmd_presets)
    sp = sub.add_parser("probe", parents=[common], help="search for an unbounded or large complement component")
    sp.set_defaults(func=cmd_probe)
    return p


def cmd_probe(args):
    D = _digit_set(args)
    w = dichotomy_probe(D, args.depth or 3)
    _emit(w.to_json(), args, f"{w.outcome} (level {w.level}, {w.kind})")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DigitSetError, ValueError) as exc:
        print(f"fracsq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(json.dumps({"budget_exceeded": str(exc), "level": exc.level, "order": exc.order}))
        return EXIT_BUDGET
    except InvariantViolation as exc:
        print(f"fracsq: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())

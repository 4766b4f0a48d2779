"""Command line front door: enumeration, vector construction and batch
verification sweeps with stable, machine-readable output.

    linkbasis enumerate --valences 2,1,1 --defects 1
    linkbasis vector --pattern '{"valences":[1,1],"links":[[1,2,1]]}'
    linkbasis verify --suite projections --max-n 4 --format text
    linkbasis verify --suite pde --out report.json --format json

Verification streams one line per check and exits nonzero iff any check
failed; output bytes are deterministic for a fixed configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import basis, coulomb, linkpat


@dataclass
class RunConfig:
    command: str
    valences: tuple[int, ...] | None
    defects: int | None
    suite: str | None
    max_n: int
    out: str | None
    fmt: str
    jobs: int
    pattern: str | None


def _parse_valences(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise SystemExit(f"cannot parse valences {text!r}; expected e.g. 2,1,1")
    if not vals or any(v < 1 for v in vals):
        raise SystemExit("valences must be a comma list of positive integers")
    return vals


def _compositions_of(n: int):
    if n == 0:
        return [()]
    return [(v,) + rest for v in range(1, n + 1) for rest in _compositions_of(n - v)]


def cmd_enumerate(cfg: RunConfig) -> int:
    if cfg.valences is None or cfg.defects is None:
        raise SystemExit("enumerate needs --valences and --defects")
    n = sum(cfg.valences)
    if cfg.defects > n or (n - cfg.defects) % 2:
        patterns = []
    else:
        patterns = linkpat.enumerate_patterns(cfg.valences, cfg.defects)
    payload = {
        "valences": list(cfg.valences),
        "defects": cfg.defects,
        "count": len(patterns),
        "patterns": [json.loads(p.to_json()) for p in patterns],
    }
    _emit(cfg, json.dumps(payload, separators=(",", ":"), sort_keys=True))
    return 0


def cmd_vector(cfg: RunConfig) -> int:
    if not cfg.pattern:
        raise SystemExit("vector needs --pattern JSON")
    pat = linkpat.LinkPattern.from_json(cfg.pattern)
    res = linkpat.validate(pat)
    if not res:
        raise SystemExit(f"invalid pattern: {res.reason}")
    vec = basis.build_v_omega(pat)
    _emit(cfg, vec.to_json())
    return 0


# -- verification suites --------------------------------------------------------
#
# A suite is a list of picklable tasks (function, args); tasks run inline or
# on a worker pool and each returns one CheckReport or a list of them.
# Reports are assembled in task order, so output is stable for any --jobs.

def _check_qbin_recursion(n: int, k: int) -> basis.CheckReport:
    from .qfield import ExactScalar, qbin
    q = ExactScalar.q_power
    ok = qbin(n, k) == q(k) * qbin(n - 1, k) + q(k - n) * qbin(n - 1, k - 1)
    return basis.CheckReport(f"qbin-recursion[{n},{k}]", ok)


def _check_inversion_sum(n: int) -> basis.CheckReport:
    from itertools import permutations

    from .qfield import ExactScalar, S_ZERO, qfact
    q = ExactScalar.q_power
    total = S_ZERO
    for sigma in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if sigma[i] > sigma[j])
        total = total + q(2 * inv)
    want = q(n * (n - 1) // 2) * qfact(n)
    return basis.CheckReport(f"inversion-sum[{n}]", total == want)


def _check_summation(variant: str, nu1: int, nu2: int, n: int) -> basis.CheckReport:
    from .qfield import ExactScalar, S_ZERO, qbin, qfact
    q = ExactScalar.q_power
    lhs = S_ZERO
    for k in range(0, n + 1):
        if variant == "c":
            t = (qbin(n, k) * q(k * (2 * n - nu1 - nu2 - 2))
                 * qfact(nu1 - n + k) * qfact(nu2 - k))
        else:
            t = (qbin(n, k) * q(k * (nu1 + nu2 - 2 * n + 2))
                 * qfact(nu1 - k) * qfact(nu2 - n + k))
        lhs = lhs + t
    head = q(n * (n - nu1 - 1)) if variant == "c" else q(n * (nu2 + 1 - n))
    rhs = (head * qfact(nu1 - n) * qfact(nu2 - n)
           * qfact(nu1 + nu2 - n + 1) / qfact(nu1 + nu2 - 2 * n + 1))
    return basis.CheckReport(f"summation-{variant}[{nu1},{nu2},{n}]", lhs == rhs)


def _check_shuffle_pde(parts: tuple[int, ...]) -> list[basis.CheckReport]:
    expr = coulomb.shuffle_solution(parts)
    weights = [coulomb.kac_weight(r + 1) for r in parts]
    ok = all(coulomb.apply_bsa(j, parts[j - 1] + 1, expr, weights).is_zero()
             for j in range(1, len(parts) + 1))
    degree = coulomb.delta_weight(sum(parts) + 1, [r + 1 for r in parts])
    return [
        basis.CheckReport(f"bsa-annihilation[{parts}]", ok),
        basis.CheckReport(f"translation[{parts}]", coulomb.check_translation(expr)),
        basis.CheckReport(f"homogeneity[{parts}]",
                          coulomb.check_homogeneity(expr, degree)),
    ]


def _check_sle_n1() -> list[basis.CheckReport]:
    from .coulomb import Exponent
    from .qfield import S_ZERO

    # (x2-x1)^{-2 h_{1,2}} = (x2-x1)^{1-6t}
    h12 = coulomb.kac_weight(2)
    expr = coulomb.CoulombExpr.of(2, {(1, 2): Exponent.of(1, -6)})
    return [
        basis.CheckReport("sle2-annihilation[N=1]",
                          all(coulomb.apply_sle2(i, expr).is_zero() for i in (1, 2))),
        basis.CheckReport("bsa2-annihilation[N=1]",
                          all(coulomb.apply_bsa(j, 2, expr, [h12, h12]).is_zero()
                              for j in (1, 2))),
        basis.CheckReport("mobius[N=1]",
                          coulomb.check_translation(expr)
                          and coulomb.check_homogeneity(expr, S_ZERO - h12 - h12)
                          and coulomb.check_mobius(expr, [h12, h12])),
    ]


def _suite_projections(max_n: int) -> list[tuple]:
    tasks = []
    for n in range(1, max_n + 1):
        for vals in _compositions_of(n):
            for s in range(n % 2, n + 1, 2):
                for om in linkpat.enumerate_patterns(vals, s):
                    tasks.append((basis.projection_sweep, (om,)))
    for s in range(1, min(max_n, 4) + 1):
        for lam in _compositions_of(s):
            if lam:
                tasks.append((basis.verify_normalization, (lam,)))
    for n in range(1, max_n + 1):
        for vals in _compositions_of(n):
            for s in range(n % 2, n + 1, 2):
                if linkpat.count_patterns(vals, s):
                    tasks.append((basis.verify_basis_invertibility, (vals, s)))
    return tasks


def _suite_cyclic(max_n: int) -> list[tuple]:
    tasks = []
    for n in range(2, max_n + 1, 2):
        for vals in _compositions_of(n):
            for om in linkpat.enumerate_patterns(vals, 0):
                tasks.append((basis.verify_cyclic, (om,)))
                tasks.append((basis.verify_full_cycle, (om,)))
    return tasks


def _suite_duals(max_n: int) -> list[tuple]:
    tasks = []
    for n in range(1, max_n + 1):
        for vals in _compositions_of(n):
            for s in range(n % 2, n + 1, 2):
                if linkpat.count_patterns(vals, s):
                    tasks.append((basis.verify_duality, (vals, s)))
    return tasks


def _suite_identities(max_n: int) -> list[tuple]:
    nmax = max(max_n, 8)
    tasks = [(_check_qbin_recursion, (n, k))
             for n in range(1, nmax + 1) for k in range(1, n)]
    tasks += [(_check_inversion_sum, (n,)) for n in range(0, 6)]
    tasks += [(_check_summation, (variant, nu1, nu2, n))
              for variant in ("c", "d")
              for nu1 in range(0, 7) for nu2 in range(0, 7)
              for n in range(0, min(nu1, nu2) + 1)]
    return tasks


def _suite_pde(max_n: int) -> list[tuple]:
    bound = min(max_n, 3) if max_n else 3
    tasks = [(_check_shuffle_pde, (parts,))
             for plen in range(1, bound + 1)
             for parts in _part_tuples(plen, bound)]
    tasks.append((_check_sle_n1, ()))
    return tasks


def _part_tuples(length: int, maxpart: int):
    if length == 0:
        return [()]
    return [(v,) + rest for v in range(1, maxpart + 1)
            for rest in _part_tuples(length - 1, maxpart)]


_SUITES = {
    "projections": _suite_projections,
    "cyclic": _suite_cyclic,
    "duals": _suite_duals,
    "identities": _suite_identities,
    "pde": _suite_pde,
}


def _run_task(task) -> list[basis.CheckReport]:
    fn, args = task
    out = fn(*args)
    return out if isinstance(out, list) else [out]


def run_suite(suite: str, max_n: int, jobs: int = 1) -> list[basis.CheckReport]:
    tasks = _SUITES[suite](max_n)
    reports: list[basis.CheckReport] = []
    if jobs > 1:
        import multiprocessing
        with multiprocessing.Pool(jobs) as pool:
            for chunk in pool.imap(_run_task, tasks):
                reports.extend(chunk)
    else:
        for task in tasks:
            reports.extend(_run_task(task))
    return reports


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.suite not in _SUITES:
        raise SystemExit(f"unknown suite {cfg.suite!r}; choose from {sorted(_SUITES)}")
    reports = run_suite(cfg.suite, cfg.max_n, cfg.jobs)
    failed = [r for r in reports if not r.ok]
    if cfg.fmt == "json":
        payload = {
            "suite": cfg.suite,
            "max_n": cfg.max_n,
            "checks": [{"id": r.check_id, "pass": bool(r.ok),
                        **({"detail": r.detail} if r.detail else {})}
                       for r in reports],
            "total": len(reports),
            "failed": len(failed),
        }
        _emit(cfg, json.dumps(payload, separators=(",", ":"), sort_keys=True))
    else:
        lines = [f"{'PASS' if r.ok else 'FAIL'} {r.check_id}"
                 + (f"  ({r.detail})" if r.detail and not r.ok else "")
                 for r in reports]
        lines.append(f"summary: {len(reports) - len(failed)}/{len(reports)} checks passed")
        _emit(cfg, "\n".join(lines))
    return 1 if failed else 0


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linkbasis",
        description="link-pattern bases: enumeration, vectors, verification")
    sub = parser.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("enumerate", help="list the patterns of one universe")
    pe.add_argument("--valences", required=True)
    pe.add_argument("--defects", type=int, required=True)

    pv = sub.add_parser("vector", help="construct the basis vector of a pattern")
    pv.add_argument("--pattern", required=True, help="pattern as JSON")

    pf = sub.add_parser("verify", help="run a verification sweep")
    pf.add_argument("--suite", required=True, choices=sorted(_SUITES))
    pf.add_argument("--max-n", type=int, default=6, dest="max_n",
                    help="bound on the total valence (default: acceptance size)")
    pf.add_argument("--jobs", type=int, default=1,
                    help="parallel workers for independent checks")

    pe.add_argument("--out", default=None, help="write output to a file")
    pe.add_argument("--format", default="json", choices=["json", "text"], dest="fmt")
    pv.add_argument("--out", default=None, help="write output to a file")
    pv.add_argument("--format", default="json", choices=["json", "text"], dest="fmt")
    pf.add_argument("--out", default=None, help="write output to a file")
    pf.add_argument("--format", default="text", choices=["json", "text"], dest="fmt")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        command=args.command,
        valences=_parse_valences(args.valences) if getattr(args, "valences", None) else None,
        defects=getattr(args, "defects", None),
        suite=getattr(args, "suite", None),
        max_n=getattr(args, "max_n", 6),
        out=args.out,
        fmt=args.fmt,
        jobs=getattr(args, "jobs", 1),
        pattern=getattr(args, "pattern", None),
    )
    if cfg.command == "enumerate":
        return cmd_enumerate(cfg)
    if cfg.command == "vector":
        return cmd_vector(cfg)
    return cmd_verify(cfg)


if __name__ == "__main__":
    sys.exit(main())

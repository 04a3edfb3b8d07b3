"""Command line entry point and the verification suites.

Every command prints a report (JSON or text) and exits 0 iff all its checks
pass.  Output is deterministic for a given command line: wall times are only
included with ``--timing``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

from . import __version__
from . import correlators as corr
from .enumerative import cross_check, poincare_gf, poincare_ring, poincare_strata
from .fan import fan_json, verify_fan, verify_forgetful
from .homology import flipped_between_action, verify_technical_lemma
from .partitions import enumerate_partitions
from .ring import GoodElement, RawMonomial, canonical_remainder, graded_dimensions, reduce_raw

SUITES = ("poincare", "fan", "ring", "lemma", "correlators")


@dataclass
class SuiteConfig:
    n_poincare: int = 8
    n_ring: int = 5
    n_fan: int = 5
    n_forgetful: int = 4
    n_lemma: int = 4
    fan_samples: int = 500
    seed: int = 0
    order: int = 5
    dim_f: int = 3
    n_indices: int = 3
    deep: bool = False
    timing: bool = False

    LIMITS = {"n_poincare": (1, 12), "n_ring": (1, 6), "n_fan": (1, 6), "n_forgetful": (2, 5),
              "n_lemma": (1, 5), "fan_samples": (0, 100000), "order": (2, 6), "dim_f": (1, 4),
              "n_indices": (1, 3)}

    def validate(self) -> None:
        for name, (lo, hi) in self.LIMITS.items():
            v = getattr(self, name)
            if not lo <= v <= hi:
                raise ValueError(f"{name}={v} outside the supported range [{lo}, {hi}]")

    def as_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items()}


@dataclass
class Report:
    suite: str
    config: dict
    checks: dict = field(default_factory=dict)
    seconds: float | None = None
    version: str = __version__

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks.values())

    def add(self, name: str, ok: bool, **payload) -> None:
        self.checks[name] = {"ok": bool(ok), **payload}

    def merge(self, other: "Report") -> None:
        for name, c in other.checks.items():
            self.checks[f"{other.suite}.{name}"] = c

    def to_json(self) -> dict:
        data = {"suite": self.suite, "version": self.version, "config": self.config,
                "ok": self.ok, "checks": self.checks}
        if self.seconds is not None:
            data["seconds"] = round(self.seconds, 3)
        return data

    def to_text(self) -> str:
        seed = self.config.get("seed")
        tag = f"version {self.version}" + (f", seed {seed}" if seed is not None else "")
        lines = [f"{self.suite}: {'PASS' if self.ok else 'FAIL'} ({tag})"]
        for name, c in self.checks.items():
            extra = c.get("summary", "")
            lines.append(f"  [{'PASS' if c['ok'] else 'FAIL'}] {name}{': ' + extra if extra else ''}")
        if self.seconds is not None:
            lines.append(f"  {self.seconds:.2f}s")
        return "\n".join(lines) + "\n"


def dumps(data) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


# --- golden files ------------------------------------------------------------

def load_golden(name: str):
    return json.loads(resources.files("permutohedral.golden").joinpath(name).read_text())


def golden_data() -> dict[str, dict]:
    return {
        "poincare.json": {str(n): poincare_strata(n).as_ints() for n in range(1, 9)},
        "ring_dims.json": {str(n): graded_dimensions(n) for n in range(1, 6)},
    }


# --- suites ------------------------------------------------------------------

def suite_poincare(cfg: SuiteConfig) -> Report:
    rep = Report("poincare", cfg.as_dict())
    cc = cross_check(cfg.n_poincare, ring_max=min(cfg.n_poincare, cfg.n_ring))
    rep.add("cross_check", cc.ok, mismatches=cc.mismatches,
            polynomials={str(n): repr(poincare_strata(n)) for n in cc.polynomials},
            summary=f"gf = strata for n <= {cc.n_max}, ring agrees for n <= {cc.ring_max}")
    golden = load_golden("poincare.json")
    bad = [n for n, c in cc.polynomials.items() if str(n) in golden and golden[str(n)] != c]
    rep.add("golden", not bad, mismatched=bad, summary="matches committed polynomials")
    return rep


def suite_fan(cfg: SuiteConfig) -> Report:
    rep = Report("fan", cfg.as_dict())
    for n in range(1, cfg.n_fan + 1):
        fr = verify_fan(n, samples=cfg.fan_samples, seed=cfg.seed)
        c = fr.completeness
        rep.add(f"fan_{n}", fr.ok, cones=fr.cones, not_smooth=fr.not_smooth,
                dimension_errors=fr.dimension_errors, face_mismatches=fr.face_mismatches[:10],
                completeness_failures=c.failures[:10], maximal_cones=c.maximal_cones,
                maximal_cones_hit=c.maximal_cones_hit,
                summary=f"{fr.cones} cones, {c.maximal_cones} maximal, {len(c.failures)} located-point failures")
    for n in range(2, cfg.n_forgetful + 1):
        fr = verify_forgetful(n)
        rep.add(f"forgetful_{n}", fr.ok, checked=fr.checked, failures=fr.failures[:10],
                summary=f"{fr.checked} checks")
    return rep


def suite_ring(cfg: SuiteConfig) -> Report:
    rep = Report("ring", cfg.as_dict())
    golden = load_golden("ring_dims.json")
    for n in range(1, cfg.n_ring + 1):
        dims = graded_dimensions(n)
        expected = poincare_strata(n).as_ints()
        ok = dims == expected and golden.get(str(n), dims) == dims
        rep.add(f"dims_{n}", ok, dims=dims, eulerian=expected, summary=str(dims))
    return rep


def suite_lemma(cfg: SuiteConfig) -> Report:
    rep = Report("lemma", cfg.as_dict())
    top = cfg.n_lemma + (1 if cfg.deep else 0)
    for n in range(1, top + 1):
        lr = verify_technical_lemma(n)
        counts = {k: [c.checked, c.failures] for k, c in lr.checks.items()}
        rep.add(f"lemma_{n}", lr.ok, checks={k: {"checked": c.checked, "failures": c.failures,
                                                  "examples": c.examples[:5]} for k, c in lr.checks.items()},
                summary=" ".join(f"{k}={v[0]}/{v[1]}" for k, v in counts.items()))
    n = min(cfg.n_lemma, 4)
    neg = verify_technical_lemma(n, action=flipped_between_action)
    caught = neg.checks["descent"].failures + neg.checks["commute"].failures
    rep.add("negative_control", caught > 0,
            failures={k: c.failures for k, c in neg.checks.items()},
            summary=f"sign-flipped action caught by {caught} descent/commute failures at n={n}")
    return rep


def suite_correlators(cfg: SuiteConfig) -> Report:
    rep = Report("correlators", cfg.as_dict())

    def run(name, fam, expect):
        N = min(cfg.order, fam.max_n)
        lin = corr.check_linear_relations(fam, N)
        series = corr.build_series(fam, N)
        com = corr.check_commutativity(series)
        back = corr.top_from_series(series)
        roundtrip = back == fam.restricted(N)
        ok = lin.ok == expect and com.ok == expect and roundtrip
        if expect:
            ok = ok and corr.check_linear_relations(back, N).ok
        rep.add(name, ok, linear_failures=lin.failures, commutativity_failures=com.failures,
                roundtrip=roundtrip, expected_pass=expect,
                summary=f"relations {'ok' if lin.ok else 'fail'}, dB^dB {'ok' if com.ok else 'fail'}, "
                        f"round trip {'ok' if roundtrip else 'broken'}")

    run("commuting_family", corr.random_commuting_family(cfg.seed, cfg.dim_f, cfg.n_indices, cfg.order), True)
    idx = corr.SuperIndexSet.even([1, 2])  # one index would always commute
    run("non_commuting_control", corr.random_family(cfg.seed, idx, corr.FSpace(cfg.dim_f), cfg.order), False)
    run("block_diagonal_family", corr.block_diagonal_family(cfg.seed, cfg.order), True)
    odd_idx = corr.SuperIndexSet(["a", "t", "u"], [0, 1, 1])
    run("odd_indices_family", corr.random_commutative_valued_family(cfg.seed, odd_idx, cfg.dim_f, min(cfg.order, 4)), True)
    run("super_fibre_family", corr.supercommutative_family(cfg.seed, min(cfg.order, 4)), True)
    return rep


SUITE_FUNCS: dict[str, Callable[[SuiteConfig], Report]] = {
    "poincare": suite_poincare,
    "fan": suite_fan,
    "ring": suite_ring,
    "lemma": suite_lemma,
    "correlators": suite_correlators,
}


def run_suite(name: str, config: SuiteConfig | None = None) -> Report:
    config = config or SuiteConfig()
    config.validate()
    if name != "all" and name not in SUITE_FUNCS:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    t0 = time.perf_counter()
    if name == "all":
        rep = Report("all", config.as_dict())
        for s in SUITES:
            rep.merge(SUITE_FUNCS[s](config))
    else:
        rep = SUITE_FUNCS[name](config)
    if config.timing:
        rep.seconds = time.perf_counter() - t0
    return rep


# --- export ------------------------------------------------------------------

def export_data(kind: str, params: dict):
    n = int(params.get("n", 3))
    if kind == "partitions":
        return {"n": n, "partitions": [t.to_json() for t in enumerate_partitions(n)]}
    if kind == "fan":
        return fan_json(n)
    if kind == "ring-dims":
        return {"n": n, "dims": graded_dimensions(n)}
    if kind == "series":
        order = int(params.get("order", 5))
        fam = corr.random_commuting_family(int(params.get("seed", 0)), int(params.get("dim_f", 3)),
                                           int(params.get("n_indices", 3)), order)
        return corr.build_series(fam, order).to_json()
    if kind == "family":
        order = int(params.get("order", 5))
        fam = corr.random_commuting_family(int(params.get("seed", 0)), int(params.get("dim_f", 3)),
                                           int(params.get("n_indices", 3)), order)
        return fam.to_json()
    raise ValueError(f"unknown export kind {kind!r}")


def export(kind: str, params: dict, path: str | Path | None) -> str:
    text = dumps(export_data(kind, params))
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return text


# --- command handlers ----------------------------------------------------------

def _emit(args, data: dict, text: str, ok: bool) -> int:
    sys.stdout.write(dumps(data) if args.format == "json" else text)
    return 0 if ok else 1


def _emit_report(args, rep: Report) -> int:
    return _emit(args, rep.to_json(), rep.to_text(), rep.ok)


def _config(args, **overrides) -> SuiteConfig:
    cfg = SuiteConfig(seed=args.seed, deep=getattr(args, "deep", False), timing=getattr(args, "timing", False))
    for k, v in overrides.items():
        if v is not None:
            setattr(cfg, k, v)
    return cfg


def cmd_poincare(args) -> int:
    methods = {"gf": poincare_gf, "strata": poincare_strata, "ring": poincare_ring}
    chosen = list(methods) if args.method == "all" else [args.method]
    if "ring" in chosen and args.n > 6:
        raise ValueError("the ring method is limited to n <= 6")
    polys = {m: methods[m](args.n) for m in chosen}
    agree = len({tuple(p.as_ints()) for p in polys.values()}) == 1
    data = {"n": args.n, "version": __version__, "agree": agree,
            "polynomials": {m: {"coeffs": p.as_ints(), "text": repr(p)} for m, p in polys.items()}}
    text = "".join(f"p_{args.n} [{m}] = {p!r}\n" for m, p in polys.items())
    if len(chosen) > 1:
        text += f"methods agree: {agree}\n"
    return _emit(args, data, text, agree)


def cmd_fan(args) -> int:
    if args.export:
        export("fan", {"n": args.n}, args.export)
        if not args.verify:
            return 0
    if args.verify:
        fr = verify_fan(args.n, samples=args.samples, seed=args.seed)
        rep = Report("fan", {"n": args.n, "samples": args.samples, "seed": args.seed})
        c = fr.completeness
        rep.add("smooth", not fr.not_smooth, failures=fr.not_smooth, summary=f"{fr.cones} cones")
        rep.add("dimensions", not fr.dimension_errors, failures=fr.dimension_errors)
        rep.add("faces", not fr.face_mismatches, failures=fr.face_mismatches[:10])
        rep.add("complete", c.ok, failures=c.failures[:10], maximal_cones=c.maximal_cones,
                maximal_cones_hit=c.maximal_cones_hit,
                summary=f"{c.samples} points located, {c.maximal_cones_hit}/{c.maximal_cones} maximal cones hit")
        return _emit_report(args, rep)
    if not args.export:
        sys.stdout.write(dumps(fan_json(args.n)))
    return 0


def cmd_ring(args) -> int:
    if args.reduce:
        data = json.loads(Path(args.reduce).read_text())
        if isinstance(data, dict) and "factors" in data:
            e = reduce_raw(RawMonomial(data["factors"]))
        else:
            e = GoodElement.from_json(data)
        rem = canonical_remainder(e)
        out = {"good": e.to_json(), "canonical": rem.to_json()}
        return _emit(args, out, f"good:      {e!r}\ncanonical: {rem!r}\n", True)
    dims = graded_dimensions(args.n)
    ok = dims == poincare_strata(args.n).as_ints()
    return _emit(args, {"n": args.n, "dims": dims, "matches_poincare": ok}, f"{dims}\n", ok)


def cmd_homology(args) -> int:
    if not args.verify_lemma:
        raise ValueError("homology needs --verify-lemma")
    cfg = _config(args, n_lemma=args.n)
    return _emit_report(args, run_suite("lemma", cfg))


def cmd_correlators(args) -> int:
    if args.check:
        fam = corr.TopCorrelatorFamily.from_json(json.loads(Path(args.check).read_text()))
        N = args.order or fam.max_n
        lin = corr.check_linear_relations(fam, N)
        rep = Report("correlators", {"file": str(args.check), "order": N})
        rep.add("linear_relations", lin.ok, checked=lin.checked, failures=lin.failures,
                examples=lin.examples, summary=f"{lin.checked} relations, {lin.failures} nonzero")
        if N >= 2:
            com = corr.check_commutativity(corr.build_series(fam, N))
            rep.add("commutativity", com.ok, failures=com.failures, examples=com.examples,
                    summary=f"dB^dB to x-degree {com.checked_degree}")
        return _emit_report(args, rep)
    if args.from_series:
        series = corr.TruncatedSeries.from_json(json.loads(Path(args.from_series).read_text()))
        com = corr.check_commutativity(series)
        fam = corr.top_from_series(series)
        lin = corr.check_linear_relations(fam, series.order)
        data = {"family": fam.to_json(), "commutativity_ok": com.ok, "linear_relations_ok": lin.ok}
        text = dumps(fam.to_json()) + f"dB^dB = 0: {com.ok}\nrelations: {lin.ok}\n"
        return _emit(args, data, text, com.ok == lin.ok)
    if args.roundtrip:
        fam = corr.TopCorrelatorFamily.from_json(json.loads(Path(args.roundtrip).read_text()))
        N = args.order or fam.max_n
        series = corr.build_series(fam, N)
        back = corr.top_from_series(series)
        ok = back == fam.restricted(N) and corr.build_series(back, N) == series
        return _emit(args, {"order": N, "roundtrip": ok, "series": series.to_json()},
                     f"round trip to order {N}: {ok}\n", ok)
    cfg = _config(args, order=args.order)
    return _emit_report(args, run_suite("correlators", cfg))


def cmd_verify(args) -> int:
    cfg = _config(args, n_poincare=args.n_poincare, n_ring=args.n_ring, n_fan=args.n_fan,
                  n_lemma=args.n_lemma, order=args.order, fan_samples=args.samples)
    return _emit_report(args, run_suite(args.suite, cfg))


def cmd_export(args) -> int:
    params = {"n": args.n, "order": args.order or 5, "seed": args.seed}
    export(args.kind, params, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identical output)")

    p = argparse.ArgumentParser(prog="permutohedral", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("poincare", parents=[common], help="Poincare polynomial p_n")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--method", choices=("gf", "strata", "ring", "all"), default="all")
    s.set_defaults(func=cmd_poincare)

    s = sub.add_parser("fan", parents=[common], help="permutohedral fan export and certification")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--export", metavar="PATH")
    s.add_argument("--verify", action="store_true")
    s.add_argument("--samples", type=int, default=500)
    s.set_defaults(func=cmd_fan)

    s = sub.add_parser("ring", parents=[common], help="cohomology ring dimensions and reduction")
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--dims", action="store_true", help="graded dimensions (the default action)")
    s.add_argument("--reduce", metavar="FILE", help="GoodElement JSON or {\"factors\": [...]}")
    s.set_defaults(func=cmd_ring)

    s = sub.add_parser("homology", parents=[common], help="homology module checks")
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--verify-lemma", action="store_true")
    s.add_argument("--deep", action="store_true", help="also run n + 1")
    s.set_defaults(func=cmd_homology)

    s = sub.add_parser("correlators", parents=[common], help="correlator families and dB^dB = 0")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--check", metavar="FILE")
    g.add_argument("--from-series", metavar="FILE")
    g.add_argument("--roundtrip", metavar="FILE")
    s.add_argument("--order", type=int)
    s.set_defaults(func=cmd_correlators)

    s = sub.add_parser("verify", parents=[common], help="run verification suites")
    s.add_argument("suite", nargs="?", default="all", choices=SUITES + ("all",))
    s.add_argument("--n", dest="n_all", type=int, help="bound for every size-limited suite")
    s.add_argument("--n-poincare", type=int)
    s.add_argument("--n-ring", type=int)
    s.add_argument("--n-fan", type=int)
    s.add_argument("--n-lemma", type=int)
    s.add_argument("--order", type=int)
    s.add_argument("--samples", type=int)
    s.add_argument("--deep", action="store_true")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("export", parents=[common], help="write canonical JSON")
    s.add_argument("kind", choices=("partitions", "fan", "ring-dims", "series", "family"))
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--order", type=int)
    s.add_argument("--out", metavar="PATH", default="-")
    s.set_defaults(func=cmd_export)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n_all", None) is not None:
        for k in ("n_poincare", "n_ring", "n_fan", "n_lemma"):
            if getattr(args, k) is None:
                setattr(args, k, args.n_all)
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        parser.error(str(exc))
    except OSError as exc:
        sys.stderr.write(f"{exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())

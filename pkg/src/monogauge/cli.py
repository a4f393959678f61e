"""Command-line front end."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .arrangements import (
    Arrangement,
    arrangement_from_file,
    check_pair_partition,
    oracle_profile,
    profile_from_file,
    rank2_flats,
    section_profile,
)
from .assembly import Family, apply_imports, assemble, euler_chi_U, family_for_profile
from .engine import NOT_EXCLUDED, analyze_character, analyze_h1, canonical_profile, default_threads
from .errors import LemmaCounterexample, MissingCoordinates, MonogaugeError, SoundnessViolation, Unresolved
from .oracle import certify_vanishing

COMMANDS = ("analyze", "flats", "oracle", "charpoly", "selftest")


class InputError(Exception):
    pass


@dataclass
class Inputs:
    profile: object
    family: Family | None
    arrangement: Arrangement | None


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True, indent=2))


def _family(args) -> Family:
    if args.family == "exceptional":
        if args.j is None:
            raise InputError("--family exceptional needs --j")
        return Family("exceptional", j=args.j)
    if args.m is None or args.n is None:
        raise InputError(f"--family {args.family} needs --m and --n")
    return Family(args.family, args.m, args.n)


def load_inputs(args, need_coordinates: bool = False) -> Inputs:
    sources = [s for s in (args.family, args.arrangement, args.profile) if s]
    if len(sources) != 1:
        raise InputError("give exactly one of --family, --arrangement, --profile")
    threads = args.threads
    if args.family:
        fam = _family(args)
        if need_coordinates:
            A = fam.arrangement()
            prof, A = oracle_profile(A, args.seed)
        else:
            A, prof = None, fam.profile(threads)
        return Inputs(replace(prof, name=fam.label, source=prof.source), fam, A)
    if args.arrangement:
        A = arrangement_from_file(args.arrangement)
        if A.dim != 3:
            raise InputError(f"arrangement has dimension {A.dim}; h1 analysis needs a plane section (dim 3)")
        if need_coordinates:
            prof, A = oracle_profile(A, args.seed)
        else:
            prof = section_profile(A, threads)
        name = Path(args.arrangement).stem if not args.arrangement.startswith("builtin:") else args.arrangement[8:]
        prof = replace(prof, name=name)
        return Inputs(prof, family_for_profile(prof), A)
    prof = profile_from_file(args.profile)
    if need_coordinates and not prof.has_coordinates:
        raise MissingCoordinates("this profile carries no point coordinates; the oracle needs them")
    return Inputs(prof, family_for_profile(prof), None)


def _analysis(args, inp: Inputs):
    rep = analyze_h1(inp.profile, use_oracle=args.oracle, threads=args.threads)
    return apply_imports(rep, inp.family)


def cmd_analyze(args) -> int:
    inp = load_inputs(args, need_coordinates=args.oracle)
    prof = canonical_profile(inp.profile)
    if args.check_k is not None:
        if not 1 <= args.check_k < prof.curve_degree:
            raise InputError(f"--check-k must lie in [1, {prof.curve_degree - 1}]")
        v = analyze_character(prof, args.check_k, use_oracle=args.oracle)
        if args.json:
            _emit(v.to_json())
        else:
            print(f"k={v.k}: {v.status}  N={v.N}  sum_a={v.sum_a}  sum_a-1={v.sum_a - 1}")
            for t in v.I_k:
                print(f"  entry {t.entry}: {t.count} x {t.kind}, a={t.a}")
            for e in v.evidence:
                print(f"  {e}")
        return 0
    rep = _analysis(args, inp)
    asm = assemble(prof, rep, inp.family)
    if args.json:
        out = rep.to_json()
        out["delta"] = asm.to_json()
        if inp.family is not None:
            out["family"] = inp.family.to_json()
        _emit(out)
        return 0
    print(f"profile: {prof.name or '-'}  degree d={rep.d}  points={prof.point_count}")
    if prof.source:
        print(f"source: {prof.source}")
    by_status: dict[str, list[int]] = {}
    for v in rep.verdicts:
        by_status.setdefault(v.status, []).append(v.k)
    for status in sorted(by_status):
        print(f"{status}: {by_status[status]}")
    print(f"h1 candidates (k with theta^k possibly an eigenvalue): {list(rep.h1_candidates)}")
    for f in rep.imported_facts:
        print(f"imported exclusion k={f['k']} (order {f['order']}): {f['rule']}")
    print(f"Delta(t) = {asm.text()}")
    for line in asm.log:
        print(f"  {line}")
    return 0


def cmd_flats(args) -> int:
    inp = load_inputs(args)
    if inp.arrangement is None:
        if inp.family is not None and inp.family.kind != "exceptional":
            inp.arrangement = inp.family.arrangement()
        else:
            raise InputError("flats needs hyperplane coordinates (--family or --arrangement)")
    A = inp.arrangement
    flats = rank2_flats(A, args.threads)
    counts: dict[int, int] = {}
    for f in flats:
        counts[f.multiplicity] = counts.get(f.multiplicity, 0) + 1
    partition = check_pair_partition(A, flats)
    if args.json:
        _emit({
            "hyperplanes": len(A),
            "flats": [{"members": list(f.members), "multiplicity": f.multiplicity} for f in flats],
            "counts_by_multiplicity": {str(k): v for k, v in sorted(counts.items())},
            "pair_partition": partition,
            "profile": section_profile(A).to_json(),
        })
    else:
        print(f"{len(A)} hyperplanes, {len(flats)} rank-2 flats")
        for mult, c in sorted(counts.items()):
            print(f"  multiplicity {mult}: {c}")
        print(f"pair partition sum C(mult,2) = C(d,2): {partition}")
    return 0 if partition else 1


def cmd_oracle(args) -> int:
    inp = load_inputs(args, need_coordinates=True)
    prof = canonical_profile(inp.profile)
    if args.check_k is not None:
        ks = [args.check_k]
    else:
        rep = analyze_h1(prof, threads=args.threads)
        ks = [v.k for v in rep.verdicts if v.status == NOT_EXCLUDED]
    dump: list[str] | None = [] if args.dump_matrix else None
    results = []
    for k in ks:
        if not 1 <= k < prof.curve_degree:
            raise InputError(f"k={k} outside [1, {prof.curve_degree - 1}]")
        results.append(certify_vanishing(prof, k, dump))
    if dump is not None:
        Path(args.dump_matrix).write_text("".join(f"# matrix {i}\n{m}" for i, m in enumerate(dump)), encoding="utf-8")
    if args.json:
        _emit({"profile": prof.name, "results": [r.to_json() for r in results]})
    else:
        if not results:
            print("no character left for the oracle: every k is already excluded")
        for r in results:
            print(f"k={r.k}: {r.status}  N={r.N}  rank {r.rank} / target {r.target_dim}  ({r.columns} forms, {r.targets} points)")
    return 0


def cmd_charpoly(args) -> int:
    inp = load_inputs(args, need_coordinates=args.oracle)
    prof = canonical_profile(inp.profile)
    rep = _analysis(args, inp)
    asm = assemble(prof, rep, inp.family)
    # with placeholders Delta^1 is only partly known; report instead of raising
    chi = euler_chi_U(prof, asm.delta, strict=not asm.placeholders)
    if args.json:
        _emit({"delta": asm.to_json(), "euler": chi.to_json()})
    else:
        print(f"Delta(t) = {asm.text()}")
        print(f"chi(U) = {chi.chi_U}  sum mu = {chi.mu_total}  Delta^2 degree = {chi.delta2.degree if chi.delta2 else '-'}"
              f"  consistent = {chi.consistent}")
    if asm.placeholders:
        print("unresolved: some candidate eigenvalues carry unknown multiplicities", file=sys.stderr)
        return 1
    return 0


def cmd_selftest(args) -> int:
    from .selftest import battery_json, run_battery

    ids = None
    if args.criteria:
        try:
            ids = [int(x) for x in args.criteria.split(",")]
        except ValueError:
            raise InputError("--criteria takes a comma-separated list of integers") from None
    try:
        results = run_battery(ids, args.threads)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
    if args.json:
        print(battery_json(results))
    else:
        for r in results:
            print(r.line())
    return 0 if all(r.ok for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="monogauge", description="Monodromy of Milnor fibers of line arrangements.")
    p.add_argument("command", choices=COMMANDS)
    src = p.add_argument_group("input (exactly one source)")
    src.add_argument("--family", choices=("mmn", "m1n", "exceptional"))
    src.add_argument("--m", type=int)
    src.add_argument("--n", type=int)
    src.add_argument("--j", type=int)
    src.add_argument("--arrangement", metavar="PATH", help="arrangement file, or builtin:G23 / builtin:G25")
    src.add_argument("--profile", metavar="PATH", help="profile JSON, or builtin:G23 / builtin:G31")
    p.add_argument("--oracle", action="store_true", help="run the exact rank oracle on inconclusive characters")
    p.add_argument("--json", action="store_true")
    p.add_argument("--check-k", type=int, dest="check_k")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--seed", type=int, default=0, help="seed for the chart change when a point lies at infinity")
    p.add_argument("--dump-matrix", metavar="PATH", dest="dump_matrix")
    p.add_argument("--criteria", help="selftest: comma-separated criterion ids")
    return p


HANDLERS = {
    "analyze": cmd_analyze,
    "flats": cmd_flats,
    "oracle": cmd_oracle,
    "charpoly": cmd_charpoly,
    "selftest": cmd_selftest,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads is None:
        args.threads = default_threads()
    elif args.threads < 1:
        print("monogauge: --threads must be positive", file=sys.stderr)
        return 2
    try:
        return HANDLERS[args.command](args)
    except (Unresolved, MissingCoordinates, SoundnessViolation, LemmaCounterexample) as exc:
        print(f"monogauge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (InputError, MonogaugeError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"monogauge: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 pass or ExistsWins, 1 fail or ForallWins, 2 Unknown or budget
exhausted, 3 invalid input.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from typing import Any, Callable, Sequence

from ..algebra_core import CaAtomStructure, ComplexAlgebra, RaAtomStructure, check_ca_axioms, check_ra_axioms
from ..constructions import SplitBlurResult, monk_ra, rainbow_finite, red_atoms, split_blur, split_ra, theta_embed
from ..ef import complete_graph, ef_solve
from ..games import EXISTS, FORALL, UNKNOWN, GameSpec, certificate_digest, lyndon_battery, replay_certificate, solve
from ..oracle import Found, OracleBudgetError, brute_force_represent, census, ramsey_colouring_exists
from ..strategies import (
    RainbowBoard,
    exhaustive_forall_survival,
    forall_cone_strategy,
    play_scripted_forall,
    rainbow_forall_hint,
    scripted_playout,
)
from .structure_file import StructureFileError, canonical_json, digest, dumps, family_of, loads

THREADS_ENV = "ARTIFACT_THREADS"
EXIT_PASS, EXIT_FAIL, EXIT_UNKNOWN, EXIT_INVALID = 0, 1, 2, 3
GAME_NAMES = {"G": "G", "boldG": "BoldG", "H": "H", "boldH": "BoldH"}


class InvalidInput(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InvalidInput(f"{path}: {exc.strerror}") from None


def _load(path: str):
    text = _read(path)
    try:
        obj = loads(text)
    except StructureFileError as exc:
        raise InvalidInput(f"{path}: {exc}") from None
    return obj, {"kind": _kind(obj), "atoms": _size(obj), "digest": digest(text), "family": family_of(text)}


def _kind(obj) -> str:
    return "split-blur" if isinstance(obj, SplitBlurResult) else obj.kind


def _size(obj) -> int:
    return obj.split.size if isinstance(obj, SplitBlurResult) else obj.size


def _structure(obj):
    return obj.split if isinstance(obj, SplitBlurResult) else obj


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InvalidInput(f"{path}: {exc.strerror}") from None


def _outcome_code(outcome: str) -> int:
    return {EXISTS: EXIT_PASS, FORALL: EXIT_FAIL}.get(outcome, EXIT_UNKNOWN)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise InvalidInput(f"expected comma-separated integers, got {text!r}") from None


# ---------------------------------------------------------------------------
# Commands: each returns (report, text lines, exit code)
# ---------------------------------------------------------------------------

Result = tuple[dict, list[str], int]


def cmd_gen(a) -> Result:
    fam: dict[str, Any] = {"name": a.family}
    if a.family == "monk":
        if a.greens is None:
            raise InvalidInput("monk needs --greens")
        fam.update(greens=a.greens, reds=a.reds)
        obj = monk_ra(a.greens, a.reds)
    elif a.family == "split":
        fam.update(index_bound=a.index_bound, alpha=a.alpha)
        obj = split_ra(a.index_bound, a.alpha)
    else:
        shades = [_int_list(x) for x in a.shades.split(";")] if a.shades else None
        fam.update(n=a.n, greens=a.greens)
        if shades:
            fam["shades"] = [list(s) for s in shades]
        base = rainbow_finite(a.n, a.greens, shades=shades)
        if a.family == "rainbow":
            obj = base
        else:
            fam["lambda"] = a.lam
            obj = split_blur(base, red_atoms(base), a.lam)
    text = dumps(obj, family=fam)
    if a.output and a.output != "-":
        _write(a.output, text)
        return ({"command": "gen", "family": fam, "output": a.output, "digest": digest(text)},
                [f"wrote {a.output} ({_size(obj)} atoms)"], EXIT_PASS)
    sys.stdout.write(text)
    return {}, [], EXIT_PASS


def cmd_check(a) -> Result:
    obj, info = _load(a.file)
    s = _structure(obj)
    which = a.axioms or s.kind
    A = ComplexAlgebra(s)
    if which == "ra":
        if not isinstance(s, RaAtomStructure):
            raise InvalidInput("--axioms ra needs a relation algebra atom structure")
        rep = check_ra_axioms(A, budget=a.budget)
    else:
        if not isinstance(s, CaAtomStructure):
            raise InvalidInput("--axioms ca needs a cylindric atom structure")
        rep = check_ca_axioms(A, budget=a.budget)
    code = {"pass": EXIT_PASS, "fail": EXIT_FAIL}.get(rep.status, EXIT_UNKNOWN)
    report = {
        "command": "check",
        "structure": info,
        "axioms": which,
        "status": rep.status,
        "checked": rep.checked,
        "violations": len(rep.violations),
        "examples": [str(v) for v in rep.violations[:10]],
    }
    lines = [f"{which} axioms: {rep.status} ({len(rep.violations)} violations, {rep.checked} instances)"]
    lines += [f"  {v}" for v in rep.violations[:10]]
    return report, lines, code


def _game_spec(a, s) -> GameSpec:
    variant = GAME_NAMES[a.game]
    labels = tuple(x for x in (a.labels or "").split(",") if x)
    try:
        return GameSpec(variant, s, a.nodes, a.rounds, labels=labels, lam=a.lam,
                        max_hyperedge_length=a.max_hyperedge_length)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None


def _hint(a, s):
    want = a.hint
    if want == "auto":
        want = "cone" if getattr(s, "rainbow_rules", None) is not None and a.game in ("G", "boldG") else "none"
    if want == "cone":
        if getattr(s, "rainbow_rules", None) is None:
            raise InvalidInput("--hint cone needs a rainbow structure")
        return rainbow_forall_hint(s)
    return None


def cmd_solve(a) -> Result:
    obj, info = _load(a.file)
    s = _structure(obj)
    spec = _game_spec(a, s)
    v = solve(spec, hint=_hint(a, s), budget=a.budget, threads=a.threads)
    report = {"command": "solve", "structure": info, "game": spec.describe(), "budget": a.budget,
              "outcome": v.outcome, "depth": v.depth}
    lines = [f"{v.outcome} (depth {v.depth})"]
    if v.certificate is not None:
        rep = replay_certificate(spec, v.certificate)
        report["certificate_digest"] = certificate_digest(v.certificate)
        report["replay"] = {"ok": rep.ok, "leaves": rep.leaves, "max_depth": rep.max_depth}
        lines.append(f"certificate {report['certificate_digest'][:16]} replay {'ok' if rep.ok else 'FAILED'}")
        if a.certificate:
            _write(a.certificate, canonical_json(v.certificate))
    if v.notes:
        report["notes"] = v.notes
    return report, lines, _outcome_code(v.outcome)


def cmd_lyndon(a) -> Result:
    obj, info = _load(a.file)
    s = _structure(obj)
    table = lyndon_battery(s, a.max_k, a.nodes, budget=a.budget, threads=a.threads)
    rows = {str(k): {"outcome": v.outcome, "depth": v.depth} for k, v in sorted(table.items())}
    lines = [f"k={k}: {v.outcome}" for k, v in sorted(table.items())]
    outs = {v.outcome for v in table.values()}
    code = EXIT_FAIL if FORALL in outs else EXIT_UNKNOWN if UNKNOWN in outs else EXIT_PASS
    return {"command": "lyndon", "structure": info, "nodes": a.nodes, "max_k": a.max_k, "table": rows}, lines, code


def _complete(name: str):
    m = re.fullmatch(r"K(\d+)", name)
    if not m or not 0 <= int(m.group(1)) <= 12:
        raise InvalidInput(f"unknown structure {name!r}; use K<n> with n <= 12")
    return complete_graph(int(m.group(1)))


def cmd_ef(a) -> Result:
    A, B = _complete(a.left), _complete(a.right)
    if a.pebbles < 0 or a.rounds < 0:
        raise InvalidInput("pebbles and rounds must be non-negative")
    v = ef_solve(A, B, a.pebbles, a.rounds)
    report = {"command": "ef", "left": a.left, "right": a.right, "pebbles": a.pebbles, "rounds": a.rounds,
              "outcome": v.outcome, "depth": v.depth}
    if v.certificate is not None:
        report["certificate_digest"] = certificate_digest(v.certificate)
    return report, [f"{v.outcome} (depth {v.depth})"], _outcome_code(v.outcome)


def _jsonable(x: Any) -> Any:
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted((_jsonable(v) for v in x), key=lambda v: json.dumps(v, sort_keys=True))
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if hasattr(x, "__dataclass_fields__"):
        return {k: _jsonable(getattr(x, k)) for k in x.__dataclass_fields__}
    if isinstance(x, (int, str, bool)) or x is None:
        return x
    return str(x)


def cmd_strategy(a) -> Result:
    obj, info = _load(a.file)
    s = _structure(obj)
    if getattr(s, "rainbow_rules", None) is None or s.dimension != 3:
        raise InvalidInput("strategies run on three-dimensional rainbow structures")
    report: dict[str, Any] = {"command": "strategy", "name": a.name, "structure": info, "rounds": a.rounds}
    if a.name == "forall-cone":
        spec = GameSpec("BoldG", s, a.nodes, a.rounds)
        v = play_scripted_forall(spec, forall_cone_strategy(s))
        report.update(nodes=a.nodes, outcome=v.outcome, depth=v.depth)
        ok = v.outcome == FORALL
        if v.certificate is not None:
            rep = replay_certificate(spec, v.certificate)
            ok = ok and rep.ok
            report["certificate_digest"] = certificate_digest(v.certificate)
            report["replay"] = {"ok": rep.ok, "leaves": rep.leaves, "max_depth": rep.max_depth}
            if a.trace:
                _write(a.trace, canonical_json(v.certificate))
        lines = [f"forall-cone: {v.outcome} (depth {v.depth})"]
    else:
        tints = _int_list(a.tints)
        try:
            board = RainbowBoard(tints=tints, red_pool=a.red_pool, rounds=a.rounds)
        except ValueError as exc:
            raise InvalidInput(str(exc)) from None
        survived, trace = scripted_playout(board)
        report.update(tints=list(tints), red_pool=a.red_pool, scripted_survived=survived, trace=_jsonable(trace))
        ok = survived
        lines = [f"exists-rainbow scripted playout: {'survived' if survived else 'failed'}"]
        if a.exhaustive:
            rep = exhaustive_forall_survival(board)
            report["exhaustive"] = {"survived": rep.survived, "positions": rep.positions, "demands": rep.demands,
                                    "failure": _jsonable(rep.failure)}
            ok = ok and rep.survived
            lines.append(f"exhaustive: {'survived' if rep.survived else 'failed'} "
                         f"({rep.positions} positions, {rep.demands} demands)")
        if a.trace:
            _write(a.trace, canonical_json(report["trace"]))
    report["ok"] = ok
    return report, lines, EXIT_PASS if ok else EXIT_FAIL


def cmd_embed_check(a) -> Result:
    obj, info = _load(a.file)
    if not isinstance(obj, SplitBlurResult):
        raise InvalidInput("embed-check needs a split-blur structure file")
    rep = theta_embed(obj, threads=a.threads)
    report = {"command": "embed-check", "structure": info, "injective": rep.injective,
              "homomorphism": rep.homomorphism, "isomorphism": rep.isomorphism,
              "failures": rep.failures[:20], "failure_count": len(rep.failures)}
    lines = [f"injective={rep.injective} homomorphism={rep.homomorphism} isomorphism={rep.isomorphism}"]
    return report, lines, EXIT_PASS if rep.ok else EXIT_FAIL


def cmd_oracle(a) -> Result:
    try:
        if a.oracle_cmd == "represent":
            obj, info = _load(a.file)
            s = _structure(obj)
            if not isinstance(s, RaAtomStructure):
                raise InvalidInput("representation search needs a relation algebra atom structure")
            r = brute_force_represent(s, a.max_base)
            report = {"command": "oracle represent", "structure": info, "max_base": a.max_base,
                      "outcome": r.outcome}
            if isinstance(r, Found):
                report["representation"] = r.candidate.to_json()
                return report, [f"Found on {r.candidate.base_size} points"], EXIT_PASS
            return report, [f"Exhausted up to {a.max_base} points"], EXIT_UNKNOWN
        if a.oracle_cmd == "census":
            rows = census(a.max_atoms, max_base=a.max_base, rounds=a.rounds, threads=a.threads)
            bad = [e.index for e in rows if e.contradiction]
            report = {"command": "oracle census", "max_atoms": a.max_atoms, "max_base": a.max_base,
                      "rounds": a.rounds, "entries": [e.to_json() for e in rows], "contradictions": bad}
            lines = [f"{e.index}: {e.representation.outcome} / {e.game}" for e in rows]
            lines.append(f"contradictions: {len(bad)}")
            return report, lines, EXIT_FAIL if bad else EXIT_PASS
        ok = ramsey_colouring_exists(a.nodes, a.colours)
        report = {"command": "oracle ramsey", "nodes": a.nodes, "colours": a.colours, "exists": ok}
        return report, [str(ok).lower()], EXIT_PASS if ok else EXIT_FAIL
    except OracleBudgetError as exc:
        return {"command": f"oracle {a.oracle_cmd}", "error": str(exc)}, [str(exc)], EXIT_UNKNOWN


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable report")
    p.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                   help=f"worker threads (default from {THREADS_ENV}, else 1)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    p = _Parser(prog="artifact", description="Finite algebras, network games and their oracles.")
    p.add_argument("--json", action="store_true", default=False, help="machine-readable report")
    p.add_argument("--threads", type=int, default=None, help=f"worker threads (default from {THREADS_ENV}, else 1)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="generate a structure file")
    g.add_argument("family", choices=["monk", "split", "rainbow", "split-blur"])
    g.add_argument("--greens", type=int, default=None)
    g.add_argument("--reds", type=int, default=1)
    g.add_argument("--index-bound", type=int, default=2)
    g.add_argument("--alpha", type=int, default=1)
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--shades", default=None, help="extra shades, e.g. '1;1,2'")
    g.add_argument("--lam", type=int, default=2)
    g.add_argument("-o", "--output", default=None)
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", parents=[common], help="validate and run the axiom battery")
    c.add_argument("file", nargs="?", default="-")
    c.add_argument("--axioms", choices=["ra", "ca"], default=None)
    c.add_argument("--budget", type=int, default=None)
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("solve", parents=[common], help="solve a network game")
    s.add_argument("file")
    s.add_argument("--game", choices=sorted(GAME_NAMES), required=True)
    s.add_argument("--nodes", type=int, required=True)
    s.add_argument("--rounds", type=int, required=True)
    s.add_argument("--certificate", default=None, help="write the ∀ certificate here")
    s.add_argument("--budget", type=int, default=None, help="position budget")
    s.add_argument("--hint", choices=["auto", "none", "cone"], default="auto")
    s.add_argument("--labels", default=None, help="hyperlabels for H games, comma separated")
    s.add_argument("--lam", default="lam")
    s.add_argument("--max-hyperedge-length", type=int, default=None)
    s.set_defaults(func=cmd_solve)

    ly = sub.add_parser("lyndon", parents=[common], help="G_k battery for k = 1..K")
    ly.add_argument("file")
    ly.add_argument("--max-k", type=int, required=True)
    ly.add_argument("--nodes", type=int, required=True)
    ly.add_argument("--budget", type=int, default=None)
    ly.set_defaults(func=cmd_lyndon)

    e = sub.add_parser("ef", parents=[common], help="pebble game on complete graphs")
    e.add_argument("--left", required=True)
    e.add_argument("--right", required=True)
    e.add_argument("--pebbles", type=int, required=True)
    e.add_argument("--rounds", type=int, required=True)
    e.set_defaults(func=cmd_ef)

    st = sub.add_parser("strategy", parents=[common], help="replay a scripted strategy")
    st.add_argument("name", choices=["forall-cone", "exists-rainbow"])
    st.add_argument("file")
    st.add_argument("--rounds", type=int, required=True)
    st.add_argument("--nodes", type=int, default=6)
    st.add_argument("--tints", default="1,2")
    st.add_argument("--red-pool", type=int, default=27)
    st.add_argument("--exhaustive", action="store_true")
    st.add_argument("--trace", default=None, help="write the trace here")
    st.set_defaults(func=cmd_strategy)

    em = sub.add_parser("embed-check", parents=[common], help="verify the split-blur embedding")
    em.add_argument("file")
    em.set_defaults(func=cmd_embed_check)

    o = sub.add_parser("oracle", parents=[common], help="brute-force oracles")
    osub = o.add_subparsers(dest="oracle_cmd", required=True, parser_class=_Parser)
    r = osub.add_parser("represent", parents=[common])
    r.add_argument("file")
    r.add_argument("--max-base", type=int, default=6)
    ce = osub.add_parser("census", parents=[common])
    ce.add_argument("--max-atoms", type=int, default=3)
    ce.add_argument("--max-base", type=int, default=6)
    ce.add_argument("--rounds", type=int, default=4)
    ra = osub.add_parser("ramsey", parents=[common])
    ra.add_argument("nodes", type=int)
    ra.add_argument("colours", type=int)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if a.threads is None:
        a.threads = default_threads()
    if a.threads < 1:
        print("artifact: error: --threads must be positive", file=sys.stderr)
        return EXIT_INVALID
    func: Callable[[Any], Result] = a.func
    try:
        report, lines, code = func(a)
    except InvalidInput as exc:
        print(f"artifact: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"artifact: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if report or lines:
        if a.json:
            report["exit_code"] = code
            sys.stdout.write(canonical_report(report))
        else:
            for line in lines:
                print(line)
    return code


def canonical_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


if __name__ == "__main__":
    raise SystemExit(main())

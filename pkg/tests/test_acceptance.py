"""Acceptance suite: one test per criterion, each printing a pass/fail line."""
from __future__ import annotations

import subprocess
import sys
import time

import pytest

from artifact.algebra_core import ComplexAlgebra, check_ca_axioms, check_ra_axioms
from artifact.constructions import monk_ra, red_atoms, split_blur, split_ra, theta_embed
from artifact.ef import EFSolver, complete_graph, ef_solve
from artifact.games import EXISTS, FORALL, GameSpec, replay_certificate, solve
from artifact.oracle import Found, census, ramsey_colouring_exists
from artifact.strategies import (
    RainbowBoard,
    exhaustive_forall_survival,
    forall_cone_strategy,
    play_scripted_forall,
    rainbow_forall_hint,
    scripted_playout,
)


def test_axiom_suite(rainbow3, criterion):
    t0 = time.perf_counter()
    bad = {}
    for g in range(1, 5):
        for r in (1, 2):
            rep = check_ra_axioms(ComplexAlgebra(monk_ra(g, r)))
            if rep.violations:
                bad[f"monk({g},{r})"] = len(rep.violations)
    for i in (1, 2):
        for a in (1, 2):
            rep = check_ra_axioms(ComplexAlgebra(split_ra(i, a)))
            if rep.violations:
                bad[f"split({i},{a})"] = len(rep.violations)
    rep = check_ca_axioms(ComplexAlgebra(rainbow3))
    if rep.violations:
        bad["rainbow(3)"] = len(rep.violations)
    dt = time.perf_counter() - t0
    ok = not bad and dt < 120
    criterion(1, ok, f"violations={bad or 0} time={dt:.1f}s")
    assert ok


def test_erdos_rado_skeleton(criterion):
    t0 = time.perf_counter()
    got = {}
    for g in (3, 2):
        v = solve(GameSpec("G", monk_ra(g, 1), 5, 6))
        got[g] = v.outcome
    dt = time.perf_counter() - t0
    want = {3: FORALL, 2: EXISTS}
    agree = all((got[g] == EXISTS) == ramsey_colouring_exists(g, 1) for g in got)
    ok = got == want and agree and dt < 60
    criterion(2, ok, f"monk(3,1)={got[3]} monk(2,1)={got[2]} ramsey_agrees={agree} time={dt:.1f}s")
    assert ok


def test_rainbow_forall_win(rainbow3, criterion):
    t0 = time.perf_counter()
    spec = GameSpec("BoldG", rainbow3, 6, 8)
    v = solve(spec, hint=rainbow_forall_hint(rainbow3))
    rep = replay_certificate(spec, v.certificate) if v.outcome == FORALL else None
    dt = time.perf_counter() - t0
    ok = v.outcome == FORALL and rep is not None and rep.ok and dt < 1800
    criterion(3, ok, f"outcome={v.outcome} replay={bool(rep and rep.ok)} time={dt:.1f}s")
    assert ok


def test_ef_exact_law(criterion):
    t0 = time.perf_counter()
    wrong = []
    for n in range(1, 6):
        for p in range(1, 9):
            sv = EFSolver(complete_graph(n + 1), complete_graph(n), p)
            for r in range(1, 9):
                v = ef_solve(complete_graph(n + 1), complete_graph(n), p, r, solver=sv, certificate=False)
                want = FORALL if p >= n + 1 and r >= n + 1 else EXISTS
                if v.outcome != want:
                    wrong.append((n, p, r))
    dt = time.perf_counter() - t0
    ok = not wrong and dt < 60
    criterion(4, ok, f"cases=320 wrong={len(wrong)} time={dt:.1f}s")
    assert ok


def test_theta_embedding(rainbow3, criterion):
    t0 = time.perf_counter()
    reds = red_atoms(rainbow3)
    res = {}
    for lam in (1, 2, 3):
        rep = theta_embed(split_blur(rainbow3, reds, lam))
        res[lam] = rep
    dt = time.perf_counter() - t0
    ok = all(r.ok and not r.failures for r in res.values()) and res[1].isomorphism and dt < 300
    detail = " ".join(f"lam{k}={'ok' if r.ok else 'bad'}" for k, r in res.items())
    criterion(5, ok, f"{detail} iso(lam1)={res[1].isomorphism} time={dt:.1f}s")
    assert ok


def test_oracle_cross_check(criterion):
    t0 = time.perf_counter()
    entries = census(3, max_base=6, rounds=4)
    bad = [e.index for e in entries if isinstance(e.representation, Found) and e.game == FORALL]
    dt = time.perf_counter() - t0
    ok = not bad and dt < 300
    criterion(6, ok, f"structures={len(entries)} contradictions={len(bad)} time={dt:.1f}s")
    assert ok


def test_scripted_strategies(rainbow3, criterion):
    t0 = time.perf_counter()
    board = RainbowBoard(tints=(1, 2), red_pool=27, rounds=3)
    surv = exhaustive_forall_survival(board)
    ok1, trace1 = scripted_playout(board)
    _, trace2 = scripted_playout(board)
    spec = GameSpec("BoldG", rainbow3, 6, 8)
    v = play_scripted_forall(spec, forall_cone_strategy(rainbow3))
    w = play_scripted_forall(spec, forall_cone_strategy(rainbow3))
    rep = replay_certificate(spec, v.certificate) if v.outcome == FORALL else None
    dt = time.perf_counter() - t0
    ok = (surv.survived and ok1 and trace1 == trace2 and v.outcome == FORALL and rep is not None and rep.ok
          and v.certificate == w.certificate and dt < 600)
    criterion(7, ok, f"survived={surv.survived} positions={surv.positions} demands={surv.demands} "
                     f"cone={v.outcome} replay={bool(rep and rep.ok)} time={dt:.1f}s")
    assert ok


def _cli(*argv: str, threads: int) -> bytes:
    proc = subprocess.run([sys.executable, "-m", "artifact", "--json", "--threads", str(threads), *argv],
                          capture_output=True)
    assert proc.returncode in (0, 1, 2), proc.stderr.decode()
    return proc.stdout


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("det")
    paths = {}
    for name, argv in {
        "monk31": ["monk", "--greens", "3", "--reds", "1"],
        "monk22": ["monk", "--greens", "2", "--reds", "2"],
        "monk11": ["monk", "--greens", "1", "--reds", "1"],
        "split": ["split"],
        "rainbow": ["rainbow"],
        "blur": ["split-blur", "--lam", "2"],
    }.items():
        paths[name] = str(d / f"{name}.json")
        subprocess.run([sys.executable, "-m", "artifact", "gen", *argv, "-o", paths[name]], check=True,
                       capture_output=True)
    return paths


def test_determinism(files, criterion):
    t0 = time.perf_counter()
    commands = [
        ["check", files["monk22"], "--axioms", "ra"],
        ["check", files["rainbow"], "--axioms", "ca"],
        ["solve", files["monk31"], "--game", "G", "--nodes", "5", "--rounds", "6"],
        ["solve", files["rainbow"], "--game", "boldG", "--nodes", "6", "--rounds", "8", "--hint", "cone"],
        ["lyndon", files["monk31"], "--max-k", "4", "--nodes", "5"],
        ["ef", "--left", "K4", "--right", "K3", "--pebbles", "4", "--rounds", "4"],
        ["embed-check", files["blur"]],
        ["strategy", "forall-cone", files["rainbow"], "--rounds", "8"],
        ["strategy", "exists-rainbow", files["rainbow"], "--rounds", "2"],
        ["oracle", "census", "--max-atoms", "3"],
        ["oracle", "represent", files["monk11"]],
        ["oracle", "ramsey", "5", "2"],
    ]
    differ = []
    for argv in commands:
        outs = {_cli(*argv, threads=1), _cli(*argv, threads=1), _cli(*argv, threads=4)}
        if len(outs) != 1:
            differ.append(argv[0] + (" " + argv[1] if argv[0] in ("oracle", "strategy") else ""))
    dt = time.perf_counter() - t0
    ok = not differ
    criterion(8, ok, f"commands={len(commands)} differing={differ or 0} time={dt:.1f}s")
    assert ok

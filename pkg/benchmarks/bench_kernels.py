"""Benchmark the pure-Python and compiled acceptance kernels.

The workload is the comparison harness's hot loop: one acceptance run per
enumerated string over the arithmetic-expression automaton and its stripped
NFA.  Usage::

    python benchmarks/bench_kernels.py [--maxlen 6] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

from ocapprox import kernels
from ocapprox.automaton import build_gnf_oca, strip_to_nfa
from ocapprox.grammar import parse_grammar
from ocapprox.kernels import pure
from ocapprox.runtime import all_strings

try:
    from ocapprox.kernels import _speedups
except ImportError:
    _speedups = None

ARITH = """\
kind: gnf
start: E
terminals: i + * ( )
E -> i
E -> i P
E -> ( E R
E -> ( E R P
P -> + E
P -> * T
P -> * T L E
T -> i
T -> i Q
T -> ( E R
T -> ( E R Q
Q -> * T
R -> )
L -> +
"""


def timed(impl, prepared, rows, accepts_name: str, repeat: int) -> tuple[float, int]:
    fn = getattr(impl, accepts_name)
    best = float("inf")
    accepted = 0
    for _ in range(repeat):
        start = time.perf_counter()
        accepted = sum(1 for ids in rows if fn(prepared, ids))
        best = min(best, time.perf_counter() - start)
    return best, accepted


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--maxlen", type=int, default=6)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    grammar = parse_grammar(ARITH)
    oca = build_gnf_oca(grammar)
    nfa = strip_to_nfa(oca)
    compiled_oca = kernels.compile_oca(oca)
    compiled_nfa = kernels.compile_nfa(nfa)
    words = list(all_strings(grammar.terminals, args.maxlen))
    oca_rows = [kernels._token_row(compiled_oca, w) for w in words]
    nfa_rows = [kernels._token_row(compiled_nfa, w) for w in words]

    print(f"workload: {len(words)} strings up to length {args.maxlen} over "
          f"{len(grammar.terminals)} terminals; best of {args.repeat} runs")
    print(f"active backend: {kernels.backend_name()}")
    impls = [("pure", pure)] + ([("compiled", _speedups)] if _speedups else [])
    results = {}
    for label, (name, prep, rows, compiled) in (
            ("one-counter", ("oca_accepts_ids", "prepare_oca", oca_rows, compiled_oca)),
            ("nfa", ("nfa_accepts_ids", "prepare_nfa", nfa_rows, compiled_nfa))):
        print(f"\n{label} kernel")
        for impl_name, impl in impls:
            prepared = getattr(impl, prep)(compiled)
            elapsed, accepted = timed(impl, prepared, rows, name, args.repeat)
            results[(label, impl_name)] = (elapsed, accepted)
            rate = len(words) / elapsed
            print(f"  {impl_name:9s} {elapsed * 1000:9.1f} ms   {rate:12,.0f} strings/s   "
                  f"{accepted} accepted")
        if len(impls) == 2:
            speedup = results[(label, "pure")][0] / results[(label, "compiled")][0]
            assert results[(label, "pure")][1] == results[(label, "compiled")][1], \
                "kernel disagreement"
            print(f"  speedup   {speedup:8.1f}x")


if __name__ == "__main__":
    main()

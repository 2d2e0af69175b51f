"""Pure-Python acceptance kernels; semantics mirrored by ``_speedups.pyx``."""

from __future__ import annotations


def prepare_oca(c):
    return c


def prepare_nfa(c):
    return c


def oca_accepts_ids(c, ids) -> bool:
    # Configurations are (state, counter) pairs; the counter never exceeds
    # the number of consumed tokens.
    configs = {(c.start, 0)}
    offsets, src, dst, cond_plus, action = c.offsets, c.src, c.dst, c.cond_plus, c.action
    for tid in ids:
        nxt = set()
        lo, hi = offsets[tid], offsets[tid + 1]
        for state, counter in configs:
            for r in range(lo, hi):
                if src[r] != state:
                    continue
                if cond_plus[r] != (counter > 0):
                    continue
                nxt.add((dst[r], counter + action[r]))
        if not nxt:
            return False
        configs = nxt
    finals = c.finals
    return any(counter == 0 and finals[state] for state, counter in configs)


def nfa_accepts_ids(c, ids) -> bool:
    states = {c.start}
    offsets, src, dst = c.offsets, c.src, c.dst
    for tid in ids:
        nxt = set()
        lo, hi = offsets[tid], offsets[tid + 1]
        for r in range(lo, hi):
            if src[r] in states:
                nxt.add(dst[r])
        if not nxt:
            return False
        states = nxt
    finals = c.finals
    return any(finals[s] for s in states)

"""Development smoke checks for the rewrite engine."""

import sys

sys.path.insert(0, "src")

from ocbord.diagram import graph_eq, syntactic_eq, to_port_graph
from ocbord.dsl import parse
from ocbord.rewrite import (Match, apply_match, check_trace, find_matches,
                            normalize_with_trace, parse_trace, rules,
                            trace_text, _pattern)


def rule_round_trips():
    bad = []
    for rid, rule in sorted(rules().items()):
        for reverse in (False, True):
            side = rule.side(reverse)
            host = to_port_graph(side)
            nodes = tuple(sorted(to_port_graph(side).nodes))
            ms = find_matches(host, rid, reverse, at=nodes)
            if not ms:
                bad.append((rid, reverse, "identity match not found"))
                continue
            got = apply_match(host, ms[0])
            want = to_port_graph(rule.side(not reverse))
            if not graph_eq(got, want):
                bad.append((rid, reverse, "apply does not give other side"))
                continue
            back = find_matches(got, rid, not reverse)
            if not any(graph_eq(apply_match(got, m), host) for m in back):
                bad.append((rid, reverse, "cannot rewrite back"))
    for b in bad:
        print("FAIL", *b)
    print(f"rule round trips: {108 - len(bad)}/108 ok")
    return not bad


CASES = [
    "source I[*,*]\n",
    "source O\n",
    "source I[*,*]\nmu_A | id:I[*,*] <- bad\n",
    "source I[*,*], I[*,*]\nmu_A\ncozip\neps_C\n",
    "source I[*,*], I[*,*]\nDelta_A | id:I[*,*]\nid:I[*,*] | mu_A\n",
    "source\neta_A\neps_A\n",
    "source\neta_C\nDelta_C\nmu_C\neps_C\n",
    "source O, O\nmu_C\nDelta_C\n",
    "source I[*,*]\ncozip\nDelta_C\neps_C | id:O\n",
    "source I[*,*], I[*,*], I[*,*]\nmu_A | id:I[*,*]\nmu_A\ncozip\n",
    "source I[*,*]\nDelta_A\ncozip | cozip\nmu_C\n",
    "source I[*,*]\nDelta_A\nmu_A\nDelta_A\nmu_A\neps_A\n",
    "source\neta_A\nDelta_A\ncozip | cozip\nzip | id:O\ncozip | id:O\nmu_C\n",
    "source I[*,*]\nDelta_A\n",
    "source O\nzip\n",
    "source I[*,*], I[*,*]\ncross(I[*,*], I[*,*])\n",
    "source O, I[*,*]\nid:O | Delta_A\nzip | id:I[*,*] | id:I[*,*]\n"
    "mu_A | id:I[*,*]\nmu_A\ncozip\n",
]


def maybe_fix(text):
    t = parse(text.split("<- bad")[0] if "<- bad" in text else text)
    return t


def normalize_cases():
    ok = 0
    for text in CASES:
        if "<- bad" in text:
            continue
        t = parse(text)
        from ocbord.normalform import normal_form
        want = normal_form(t)
        got, trace = normalize_with_trace(t)
        assert syntactic_eq(got, want), f"normal forms differ for:\n{text}"
        assert check_trace(trace)
        assert check_trace(parse_trace(trace_text(trace)))
        ok += 1
    print(f"normalize cases: {ok} ok")


def normalize_corpus():
    import pathlib
    for p in sorted(pathlib.Path("corpus").glob("*.ocd")):
        t = parse(p.read_text())
        from ocbord.normalform import normal_form
        want = normal_form(t)
        got, trace = normalize_with_trace(t)
        assert syntactic_eq(got, want), f"normal forms differ for {p}"
        assert check_trace(trace)
        print(f"corpus {p.name}: {len(trace.moves)} moves ok")


if __name__ == "__main__":
    ok = rule_round_trips()
    normalize_cases()
    normalize_corpus()
    print("all ok" if ok else "FAILURES")

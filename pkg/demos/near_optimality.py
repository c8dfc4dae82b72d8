"""How good is the sensitivity-guided edge pick, really?

For small candidate sets the question has an exact answer: optimize the
modification on every s-subset of candidate edges and place the ECM pick
between the worst and the best case. Two scores summarize the result:
a value score (0 = as bad as the worst subset, 100 = matches the best)
and a cardinality score (the percentage of subsets that do not beat it).
"""

from powergram import (
    CandidateEdgeSet,
    GramianMetric,
    ModificationProblem,
    brute_force_oracle,
    build_ecm,
    build_reduced_system,
    bundled_network_path,
    ingest,
    select_edge_set,
)

net = ingest(bundled_network_path("ieee9"))
sys = build_reduced_system(net)
candidate = CandidateEdgeSet.laplacian_support(net)

print(f"candidate edges: {', '.join(str(e) for e in candidate)}")
print(f"{'metric':14s} {'s':>2s} {'J(worst)':>9s} {'J(pick)':>9s} "
      f"{'J(best)':>9s} {'value':>7s} {'card.':>7s}")

for metric in GramianMetric:
    report = build_ecm(sys, net, candidate, metric)
    for s in (1, 2):
        problem = ModificationProblem(
            net=net,
            edge_set=select_edge_set(report, s),
            metric=metric,
            beta=1.0,
        )
        # Exhaustive enumeration; refuses politely past a subset cap.
        summary = brute_force_oracle(problem, candidate)
        print(
            f"{metric.value:14s} {s:2d} {summary.wcs[1]:9.4f} "
            f"{summary.candidate[1]:9.4f} {summary.bcs[1]:9.4f} "
            f"{summary.j_v:7.2f} {summary.j_c:7.2f}"
        )
        assert summary.wcs[1] <= summary.candidate[1] <= summary.bcs[1]

print(
    "\nvalue = position between worst and best (percent); "
    "card. = percent of subsets not beating the pick"
)

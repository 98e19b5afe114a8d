"""A small equivalence run over generated instances, followed by an
independent re-check of the report it writes."""
import sys

from ftaplab import mixed_corpus, render_report, reverify_report, run_equivalence
from ftaplab.documents import dumps

n = int(sys.argv[1]) if len(sys.argv) > 1 else 12
docs = mixed_corpus(n, base_seed=7)
report = run_equivalence(docs, probes=5, y_probes=2)
print(render_report(report))

# the report carries every price system and certificate it relied on
text = dumps(report)
print("report size:", len(text), "bytes")
problems = reverify_report(report)
print("re-verified from the document alone:", "clean" if not problems else problems[:3])

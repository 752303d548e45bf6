"""Exact H-space dimensions of complete graphs against the class formula."""

import sys

from cyclespan.experiments import verify_kn
from cyclespan.subspace import H_LIBRARY

rows = verify_kn(10, (3, 5, 7)) + verify_kn(9, (), H_LIBRARY)
print("pattern,n,computed,expected,space,passed")
for r in rows:
    print(f"{r.pattern},{r.n},{r.computed},{r.expected},{r.space},{int(r.passed)}")
sys.exit(0 if all(r.passed for r in rows) else 1)

"""Shared recorder for the acceptance suite: one result line per criterion."""
from collections import defaultdict

RESULTS = defaultdict(list)  # criterion -> [(label, ok, detail)]
DURATIONS = defaultdict(float)  # criterion -> seconds spent in test calls
BUDGET_S = {1: 1.0, 2: 30.0, 3: 60.0, 4: 10.0, 5: 180.0, 9: 600.0}


def record(criterion, label, ok, detail=""):
    RESULTS[criterion].append((label, bool(ok), detail))
    return bool(ok)


def check(criterion, label, ok, detail=""):
    record(criterion, label, ok, detail)
    assert ok, f"criterion {criterion}, {label}: {detail}"


def within_se(mean, se, target, n_se=3.0):
    """|mean - target| <= n_se * SE, plus a rounding floor of 1e-10 |target|.

    The floor only matters when the energy does not depend on the random
    draws (SE of order 1e-17) and summation order alone separates the values.
    """
    return abs(mean - target) <= n_se * se + 1e-10 * max(1.0, abs(target))


def summary_lines():
    lines = []
    for c in range(1, 11):
        rows = RESULTS.get(c, [])
        if not rows:
            lines.append(f"criterion {c:2d}: NOT RUN")
            continue
        failed = [r for r in rows if not r[1]]
        budget = BUDGET_S.get(c)
        t = DURATIONS[c]
        slow = budget is not None and t > budget
        status = "PASS" if not failed and not slow else "FAIL"
        timing = f"{t:.1f}s" + (f" (limit {budget:.0f}s)" if budget else "")
        line = f"criterion {c:2d}: {status}  {len(rows) - len(failed)}/{len(rows)} checks, {timing}"
        if failed:
            line += "; failed: " + "; ".join(f"{lbl} [{d}]" for lbl, _, d in failed)
        if slow:
            line += "; runtime over limit"
        lines.append(line)
    return lines

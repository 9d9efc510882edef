"""Straight-line reference scoring, deliberately free of numpy and of the package code."""


def min_max_columns(rows, directions):
    n_cols = len(rows[0])
    out = [[0.0] * n_cols for _ in rows]
    for j in range(n_cols):
        col = [r[j] for r in rows]
        lo, hi = min(col), max(col)
        if hi == lo:
            continue
        for i, v in enumerate(col):
            if directions[j] == "cost":
                out[i][j] = (hi - v) / (hi - lo)
            else:
                out[i][j] = (v - lo) / (hi - lo)
    return out


def score(rows, weights, directions=None):
    """Return (weighted sums, percents, average) for a raw matrix."""
    directions = directions or ["benefit"] * len(weights)
    norm = min_max_columns(rows, directions)
    sums = []
    for r in norm:
        total = 0.0
        for w, v in zip(weights, r):
            total += w * v
        sums.append(total)
    lo, hi = min(sums), max(sums)
    if hi == lo:
        pct = [100.0] * len(sums)
    else:
        pct = [100.0 * (s - lo) / (hi - lo) for s in sums]
    return sums, pct, sum(pct) / len(pct)

"""Progressive Edge Growth construction and Tanner-graph girth measurement.

Each new edge of a column goes to a check node that is farthest from the
column's current neighbourhood in the Tanner graph (unreachable counts as
farthest). Row weights are capped at ``dv``, with just enough rows allowed to
reach ``dv + 1`` to absorb every edge, so only rows with spare capacity are
candidates. Among the farthest candidates the winner is picked by a seeded
ranking of the check nodes.

In lower-triangular mode column ``k + j`` is restricted to rows ``>= j`` and
always starts with the edge to row ``j``. Its target weight is
``min(dv, r - j)``, so the last column has weight one. Parity columns are
grown first, from the last one leftwards, so each allowed range only widens;
information columns follow and fill whatever capacity is left. A parity column
stops short rather than close a 4-cycle, which only happens near the bottom
right corner.

Late in a build the rows with spare capacity may all be one step away. Any
other column then overflows a farther row instead of closing a 4-cycle, and a
final pass moves edges from overweight rows back to light ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .ensemble import InfeasibleEnsemble, row_weight_profile
from .matrix import LdpcCode, SparseParityCheck

@dataclass(frozen=True)
class PegConfig:
    n: int
    r: int
    dv: int
    lower_triangular: bool = False
    seed: int = 0

    def __post_init__(self):
        if not self.n > self.r >= self.dv:
            raise InfeasibleEnsemble(f"need n > r >= dv, got n={self.n}, r={self.r}, dv={self.dv}")
        if self.dv < 2:
            raise InfeasibleEnsemble("dv must be at least 2")
        row_weight_profile(self.n, self.n - self.r, self.dv)

    @property
    def k(self) -> int:
        return self.n - self.r


@dataclass(frozen=True)
class GirthReport:
    girth: float  # math.inf for a cycle-free graph
    histogram: dict = field(default_factory=dict)  # local girth -> number of variable nodes


@numba.njit(cache=True)
def _peg_kernel(n, r, order, col_target, lo, forced, cap, quota_plus, rank, extra):
    maxdv = 1
    for c in range(n):
        if col_target[c] > maxdv:
            maxdv = col_target[c]
    width = cap + 1 + extra
    var_adj = np.full((n, maxdv), -1, np.int32)
    var_deg = np.zeros(n, np.int32)
    chk_adj = np.full((r, width), -1, np.int32)
    chk_deg = np.zeros(r, np.int32)
    reserved = np.zeros(r, np.int32)
    for c in range(n):
        if forced[c] >= 0:
            reserved[forced[c]] += 1

    chk_mark = np.zeros(r, np.int64)
    chk_dist = np.zeros(r, np.int32)
    cand_mark = np.zeros(r, np.int64)
    var_mark = np.zeros(n, np.int64)
    front = np.empty(r, np.int32)
    nxt = np.empty(r, np.int32)
    plus_used = 0
    stamp = 0

    for c in order:
        for e in range(col_target[c]):
            if e == 0 and forced[c] >= 0:
                j = forced[c]
                if chk_deg[j] >= width:
                    return var_adj, var_deg, -1
                var_adj[c, var_deg[c]] = j
                var_deg[c] += 1
                chk_adj[j, chk_deg[j]] = c
                chk_deg[j] += 1
                reserved[j] -= 1
                continue

            best = -1
            # second pass: the capacity-respecting choice would close a 4-cycle, so overflow instead
            for relaxed in range(2):
                stamp += 1
                # candidate rows: allowed range, spare capacity, not yet adjacent to c
                n_cand = 0
                for j in range(lo[c], r):
                    w = chk_deg[j] + reserved[j]
                    if relaxed == 1 or w < cap or (w == cap and plus_used < quota_plus):
                        cand_mark[j] = stamp
                        n_cand += 1
                for t in range(var_deg[c]):
                    j = var_adj[c, t]
                    if cand_mark[j] == stamp:
                        cand_mark[j] = 0
                        n_cand -= 1
                if n_cand == 0 and relaxed == 0:
                    continue  # no spare capacity left in range
                if n_cand > 0:
                    # BFS from c over the current graph, stopping once every candidate is reached
                    var_mark[c] = stamp
                    nf = 0
                    for t in range(var_deg[c]):
                        j = var_adj[c, t]
                        chk_mark[j] = stamp
                        chk_dist[j] = 0
                        front[nf] = j
                        nf += 1
                    reached = 0
                    depth = 0
                    while nf > 0 and reached < n_cand:
                        depth += 1
                        nn = 0
                        for a in range(nf):
                            j = front[a]
                            for b in range(chk_deg[j]):
                                v = chk_adj[j, b]
                                if var_mark[v] == stamp:
                                    continue
                                var_mark[v] = stamp
                                for t in range(var_deg[v]):
                                    j2 = var_adj[v, t]
                                    if chk_mark[j2] != stamp:
                                        chk_mark[j2] = stamp
                                        chk_dist[j2] = depth
                                        nxt[nn] = j2
                                        nn += 1
                                        if cand_mark[j2] == stamp:
                                            reached += 1
                        for a in range(nn):
                            front[a] = nxt[a]
                        nf = nn

                    unreached_exist = reached < n_cand
                    best_rank = 1 << 30
                    for j in range(lo[c], r):
                        if cand_mark[j] != stamp:
                            continue
                        if unreached_exist:
                            if chk_mark[j] == stamp:
                                continue
                        elif chk_dist[j] != depth:
                            continue
                        if rank[j] < best_rank:
                            best = j
                            best_rank = rank[j]
                    if not unreached_exist and depth == 1:
                        if relaxed == 0:
                            best = -1
                            continue
                        if forced[c] >= 0:
                            best = -1  # a parity column in the cramped corner stays short
                if best >= 0:
                    break

            if best < 0:
                break  # column stays short
            if chk_deg[best] >= width:
                return var_adj, var_deg, -1
            if chk_deg[best] + reserved[best] == cap and plus_used < quota_plus:
                plus_used += 1
            var_adj[c, var_deg[c]] = best
            var_deg[c] += 1
            chk_adj[best, chk_deg[best]] = c
            chk_deg[best] += 1
    return var_adj, var_deg, plus_used


def peg_construct(cfg: PegConfig) -> LdpcCode:
    n, r, dv, k = cfg.n, cfg.r, cfg.dv, cfg.k
    col_target = np.full(n, dv, dtype=np.int32)
    lo = np.zeros(n, dtype=np.int32)
    forced = np.full(n, -1, dtype=np.int32)
    order = np.arange(n, dtype=np.int64)
    if cfg.lower_triangular:
        j = np.arange(r, dtype=np.int32)
        col_target[k:] = np.minimum(dv, r - j)
        lo[k:] = j
        forced[k:] = j
        order = np.concatenate([np.arange(n - 1, k - 1, -1), np.arange(k)])
    quota_plus = max(0, int(col_target.sum()) - r * dv)
    rank = np.random.default_rng(cfg.seed).permutation(r).astype(np.int32)

    # a row can only pass dv+1 when its allowed range has no capacity left; grow storage on demand
    extra = 16
    while True:
        var_adj, var_deg, status = _peg_kernel(n, r, order, col_target, lo, forced, dv, quota_plus, rank, extra)
        if status >= 0:
            break
        if extra >= n:
            raise RuntimeError("PEG construction overflowed a row")
        extra *= 4
    col_rows = [set(var_adj[c, :var_deg[c]].tolist()) for c in range(n)]
    _balance_rows(col_rows, r, lo, forced, rank)
    cols = np.repeat(np.arange(n), [len(x) for x in col_rows])
    rows = np.fromiter((j for x in col_rows for j in sorted(x)), dtype=np.int64, count=len(cols))
    h = SparseParityCheck.from_edges(n, r, rows, cols)
    return LdpcCode(h, triangular=cfg.lower_triangular)


def _balance_rows(col_rows, r, lo, forced, rank) -> None:
    """Move edges from the heaviest row to the lightest until weights differ by at most one.

    Greedy column-by-column growth can strand spare capacity in rows that the
    last columns already touch. A move of column ``c`` from row ``a`` to row
    ``b`` keeps every column weight and respects the triangular constraints.
    Moves that close no 4-cycle are preferred; otherwise the first legal one is
    taken. Stops when the heaviest and lightest rows admit no legal move.
    """
    row_cols = [set() for _ in range(r)]
    for c, rows in enumerate(col_rows):
        for j in rows:
            row_cols[j].add(c)
    order = np.argsort(rank, kind="stable")  # tie order among equal weights
    while True:
        weight = np.array([len(x) for x in row_cols])
        heavy = [int(j) for j in order if weight[j] == weight.max()]
        light = [int(j) for j in order if weight[j] == weight.min()]
        if weight.max() - weight.min() <= 1:
            return
        move = fallback = None
        for a in heavy:
            for b in light:
                for c in sorted(row_cols[a] - row_cols[b]):
                    if forced[c] == a or lo[c] > b:
                        continue
                    if not any(row_cols[o] & row_cols[b] for o in col_rows[c] if o != a):
                        move = (a, b, c)
                        break
                    if fallback is None:
                        fallback = (a, b, c)
                if move:
                    break
            if move:
                break
        move = move or fallback
        if move is None:
            return
        a, b, c = move
        row_cols[a].discard(c)
        row_cols[b].add(c)
        col_rows[c].discard(a)
        col_rows[c].add(b)


@numba.njit(cache=True)
def _local_girths(n, r, row_ptr, row_idx, col_ptr, col_idx):
    """Shortest cycle through each variable node (0 when it lies on no cycle)."""
    out = np.zeros(n, np.int64)
    nn = n + r  # node ids: variables 0..n-1, checks n..n+r-1
    mark = np.zeros(nn, np.int64)
    dist = np.zeros(nn, np.int64)
    branch = np.zeros(nn, np.int64)
    parent = np.zeros(nn, np.int64)
    queue = np.empty(nn, np.int64)
    for v in range(n):
        stamp = v + 1
        mark[v] = stamp
        dist[v] = 0
        head = 0
        tail = 0
        for p in range(col_ptr[v], col_ptr[v + 1]):
            u = n + col_idx[p]
            mark[u] = stamp
            dist[u] = 1
            branch[u] = u
            parent[u] = v
            queue[tail] = u
            tail += 1
        best = 1 << 60
        while head < tail:
            u = queue[head]
            head += 1
            d = dist[u]
            if 2 * d + 1 >= best:
                break
            if u >= n:
                start = row_ptr[u - n]
                stop = row_ptr[u - n + 1]
            else:
                start = col_ptr[u]
                stop = col_ptr[u + 1]
            for p in range(start, stop):
                w = row_idx[p] if u >= n else n + col_idx[p]
                if w == parent[u]:
                    continue
                if mark[w] != stamp:
                    mark[w] = stamp
                    dist[w] = d + 1
                    branch[w] = branch[u]
                    parent[w] = u
                    queue[tail] = w
                    tail += 1
                elif w != v and branch[w] != branch[u]:
                    length = d + dist[w] + 1
                    if length < best:
                        best = length
        out[v] = best if best < (1 << 60) else 0
    return out


def girth_histogram(h: SparseParityCheck) -> GirthReport:
    local = _local_girths(h.n, h.r, h.row_ptr, h.row_idx, h.col_ptr, h.col_idx)
    hist = {}
    for g, count in zip(*np.unique(local, return_counts=True)):
        hist[math.inf if g == 0 else int(g)] = int(count)
    cyclic = local[local > 0]
    girth = int(cyclic.min()) if cyclic.size else math.inf
    return GirthReport(girth, hist)


def has_four_cycle(h: SparseParityCheck) -> bool:
    """True when two rows share two or more columns."""
    seen = set()
    for i in range(h.n):
        rows = h.col(i).tolist()
        for a in range(len(rows)):
            for b in range(a + 1, len(rows)):
                pair = (rows[a], rows[b])
                if pair in seen:
                    return True
                seen.add(pair)
    return False

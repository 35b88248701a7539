"""Depth-first branch-and-bound kernel over (agent, level) labelings.

The search enumerates gap-free level structures directly: it fills the open
level with tasks in ascending id order (each task choosing an agent) and
closes it to open the next, so every ordered level partition is visited
exactly once and trailing/interior empty levels never appear.  For a fixed
labeling the optimal cycle times have the closed form max(per-level workload,
average-metric floor), which the leaf evaluation applies.

The kernel is written in nopython-compatible numpy so the identical code runs
either JIT-compiled or as plain Python.  Set HRCSCHED_NO_NUMBA=1 to force the
interpreted path (used by the benchmark and as a safety hatch).
"""

from __future__ import annotations

import os

import numpy as np

EPS = 1e-9

STATUS_OPTIMAL = 0
STATUS_INFEASIBLE = 1
STATUS_BUDGET = 2


def _search(
    n,
    t,            # (2, n) float64, +inf where incapable
    w,            # (2, n) float64
    cap,          # (2, n) uint8
    contrib,      # (n, M) float64: human-assignment contribution per metric
    is_avg,       # (M,) uint8
    bounds,       # (M,) float64
    c0,           # (M,) float64
    tm,           # (M,) float64
    pred_ptr,     # (n+1,) int32
    pred_idx,     # int32
    agent_order,  # (n, 2) int8: per-task agent try order
    min_w,        # (n,) float64
    min_t,        # (n,) float64
    forced,       # (n,) int8: -1 flexible, 0 human-only, 1 robot-only
    t_a_max,      # float64
    node_budget,  # int64
):
    m_count = bounds.shape[0]
    maxd = 2 * n + 2

    level_of = np.zeros(n, dtype=np.int32)
    agent_of = np.full(n, -1, dtype=np.int8)

    open_level = 1
    open_last = -1
    open_wl = np.zeros(2)
    closed_c = 0.0
    committed_w = 0.0
    committed_k = np.zeros(m_count)
    rem_forced_k = np.zeros(m_count)
    rem_forced_t = np.zeros(2)
    rem_min_w = 0.0
    rem_min_t = 0.0
    for i in range(n):
        rem_min_w += min_w[i]
        rem_min_t += min_t[i]
        if forced[i] >= 0:
            rem_forced_t[forced[i]] += t[forced[i], i]
        if forced[i] == 0:
            for m in range(m_count):
                rem_forced_k[m] += contrib[i, m]
    n_unassigned = n

    st_move = np.zeros(maxd, dtype=np.int64)
    st_kind = np.zeros(maxd, dtype=np.int8)
    st_task = np.zeros(maxd, dtype=np.int32)
    st_agent = np.zeros(maxd, dtype=np.int8)
    st_prev_last = np.zeros(maxd, dtype=np.int32)
    st_wl0 = np.zeros(maxd)
    st_wl1 = np.zeros(maxd)
    st_added_c = np.zeros(maxd)

    best_obj = np.inf
    best_level = np.zeros(n, dtype=np.int32)
    best_agent = np.zeros(n, dtype=np.int8)
    best_key = np.zeros(n, dtype=np.int64)
    found = False
    nodes = 0
    status = STATUS_OPTIMAL

    close_move = 2 * n
    d = 0
    st_move[0] = 0

    while d >= 0:
        mv = st_move[d]
        st_move[d] += 1

        if mv > close_move:
            # exhausted: pop and undo the move that produced this state
            d -= 1
            if d < 0:
                break
            if st_kind[d] == 0:
                i = st_task[d]
                a = st_agent[d]
                level_of[i] = 0
                agent_of[i] = -1
                open_wl[a] -= t[a, i]
                open_last = st_prev_last[d]
                committed_w -= w[a, i]
                if a == 0:
                    for m in range(m_count):
                        committed_k[m] -= contrib[i, m]
                rem_min_w += min_w[i]
                rem_min_t += min_t[i]
                if forced[i] >= 0:
                    rem_forced_t[forced[i]] += t[forced[i], i]
                if forced[i] == 0:
                    for m in range(m_count):
                        rem_forced_k[m] += contrib[i, m]
                n_unassigned += 1
            else:
                open_level -= 1
                open_wl[0] = st_wl0[d]
                open_wl[1] = st_wl1[d]
                open_last = st_prev_last[d]
                closed_c -= st_added_c[d]
            continue

        if mv == close_move:
            # close the open level (only meaningful mid-search, on a nonempty level)
            if open_last < 0 or n_unassigned == 0:
                continue
            nodes += 1
            if nodes > node_budget:
                status = STATUS_BUDGET
                break
            st_kind[d] = 1
            st_wl0[d] = open_wl[0]
            st_wl1[d] = open_wl[1]
            st_prev_last[d] = open_last
            add = open_wl[0] if open_wl[0] >= open_wl[1] else open_wl[1]
            st_added_c[d] = add
            closed_c += add
            open_wl[0] = 0.0
            open_wl[1] = 0.0
            open_last = -1
            open_level += 1
            d += 1
            st_move[d] = 0
            continue

        i = mv >> 1
        a = agent_order[i, mv & 1]
        if level_of[i] != 0 or cap[a, i] == 0 or i <= open_last:
            continue
        ok = True
        for p in range(pred_ptr[i], pred_ptr[i + 1]):
            pl = level_of[pred_idx[p]]
            if pl == 0 or pl >= open_level:
                ok = False
                break
        if not ok:
            continue

        nodes += 1
        if nodes > node_budget:
            status = STATUS_BUDGET
            break

        # apply assignment
        st_kind[d] = 0
        st_task[d] = i
        st_agent[d] = a
        st_prev_last[d] = open_last
        level_of[i] = open_level
        agent_of[i] = a
        open_wl[a] += t[a, i]
        open_last = i
        committed_w += w[a, i]
        if a == 0:
            for m in range(m_count):
                committed_k[m] += contrib[i, m]
        rem_min_w -= min_w[i]
        rem_min_t -= min_t[i]
        if forced[i] >= 0:
            rem_forced_t[forced[i]] -= t[forced[i], i]
        if forced[i] == 0:
            for m in range(m_count):
                rem_forced_k[m] -= contrib[i, m]
        n_unassigned -= 1

        feasible = True
        for m in range(m_count):
            if is_avg[m] == 0 and c0[m] + committed_k[m] + rem_forced_k[m] > bounds[m] + EPS:
                feasible = False
                break

        if feasible and n_unassigned == 0:
            # leaf: closed-form optimal cycle for this labeling
            wl = open_wl[0] if open_wl[0] >= open_wl[1] else open_wl[1]
            c_total = closed_c + wl
            for m in range(m_count):
                if is_avg[m] == 1:
                    floor = (c0[m] + committed_k[m]) / bounds[m] - tm[m]
                    if floor > c_total:
                        c_total = floor
            obj = committed_w + c_total / t_a_max
            take = False
            if obj < best_obj - EPS:
                take = True
            elif found and obj <= best_obj + EPS:
                # tie: lexicographically smallest sorted (level, agent, id)
                # triple vector, human ranked before robot
                cand = np.empty(n, dtype=np.int64)
                for q in range(n):
                    cand[q] = (np.int64(level_of[q]) * 2 + agent_of[q]) * (n + 1) + q
                cand = np.sort(cand)
                for q in range(n):
                    if cand[q] < best_key[q]:
                        take = True
                        break
                    if cand[q] > best_key[q]:
                        break
            if take:
                best_obj = obj if obj < best_obj else best_obj
                found = True
                for q in range(n):
                    best_level[q] = level_of[q]
                    best_agent[q] = agent_of[q]
                    best_key[q] = (np.int64(level_of[q]) * 2 + agent_of[q]) * (n + 1) + q
                best_key = np.sort(best_key)
            feasible = False  # leaf handled; fall through to undo

        if feasible:
            # admissible lower bound on the completed objective
            rest = open_wl[0] + rem_forced_t[0]
            r1 = open_wl[1] + rem_forced_t[1]
            if r1 > rest:
                rest = r1
            half = (open_wl[0] + open_wl[1] + rem_min_t) / 2.0
            if half > rest:
                rest = half
            cyc = closed_c + rest
            for m in range(m_count):
                if is_avg[m] == 1:
                    floor = (c0[m] + committed_k[m] + rem_forced_k[m]) / bounds[m] - tm[m]
                    if floor > cyc:
                        cyc = floor
            lb = committed_w + rem_min_w + cyc / t_a_max
            if lb > best_obj + EPS:
                feasible = False

        if feasible:
            d += 1
            st_move[d] = 0
        else:
            # undo the assignment and try the next move at this depth
            level_of[i] = 0
            agent_of[i] = -1
            open_wl[a] -= t[a, i]
            open_last = st_prev_last[d]
            committed_w -= w[a, i]
            if a == 0:
                for m in range(m_count):
                    committed_k[m] -= contrib[i, m]
            rem_min_w += min_w[i]
            rem_min_t += min_t[i]
            if forced[i] >= 0:
                rem_forced_t[forced[i]] += t[forced[i], i]
            if forced[i] == 0:
                for m in range(m_count):
                    rem_forced_k[m] += contrib[i, m]
            n_unassigned += 1

    if status != STATUS_BUDGET and not found:
        status = STATUS_INFEASIBLE
    return status, best_obj, best_level, best_agent, nodes


def _make_search():
    if os.environ.get("HRCSCHED_NO_NUMBA"):
        return _search, False
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        return _search, False
    return njit(cache=True)(_search), True


search, NUMBA_ENABLED = _make_search()

"""Replication pipelines behind the command-line interface.

Each pipeline draws its Monte Carlo replications from per-replication
random streams (master seed, channel, replication index), reduces them
into a ``Report`` of named columns, and never depends on the number of
worker processes: identical configuration and seed give byte-identical
output.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
import csv
import io
import math

import numpy as np

from . import __version__ as _VERSION
from . import ctrw, inverse_mfpp, ppp, rng, stats, subordinator
from .errors import HorizonExceededError
from .stability import StabilityIndex

# ---------------------------------------------------------------------------
# stream layout: stream_id = (channel << 40) + replication index, so every
# experiment channel owns 2**40 replication slots and channels never collide
# ---------------------------------------------------------------------------

CH_LAPLACE = 1
CH_CROSS_STATIONARY = 2
CH_CROSS_THRESHOLD = 3
CH_CONTINUITY = 4
CH_INCREMENTS = 5
CH_MONOTONE = 6
CH_PASSAGE = 7
CH_ARRIVALS = 8
CH_TAIL = 9
CH_D_REFERENCE = 10
CH_PATHS_JUMPS = 11
CH_PATHS_ARRIVALS = 12
CH_CTRW_JUMPS = 16  # + 2 * (index of n in the n list); walk channel is +1

_CHANNEL_SHIFT = 40

DEFAULT_MASS_BUDGET = 1e-3
_PASSAGE_BLOCK_LEN = 0.25
_PASSAGE_POINTS_CAP = 3.0e5
_PASSAGE_TAIL_TARGET = 1e-8
_T_END_CANDIDATES = (
    1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0,
    10.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0,
)


def stream_for(seed, channel, rep):
    """The random stream of one replication on one experiment channel."""
    return rng.RngStream(seed, (channel << _CHANNEL_SHIFT) + rep)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        x = float(v)
        return "nan" if math.isnan(x) else format(x, ".17g")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


@dataclass
class Report:
    """A finished experiment: config echo plus rows of named columns.

    Serialized as CSV with ``#``-prefixed key=value header lines; reals
    carry 17 significant digits so the file round-trips losslessly.
    """

    command: str
    header: dict
    columns: tuple
    rows: list

    def all_pass(self):
        if "pass" not in self.columns:
            return True
        i = self.columns.index("pass")
        return all(bool(r[i]) for r in self.rows)

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def to_csv(self):
        out = io.StringIO()
        out.write(f"# command={self.command}\n")
        out.write(f"# version={_VERSION}\n")
        for k, v in self.header.items():
            out.write(f"# {k}={_fmt(v)}\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        return out.getvalue()

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())


# ---------------------------------------------------------------------------
# parallel replication mapping
# ---------------------------------------------------------------------------

_MIN_CHUNK = 64


def _map_reps(fn, reps, workers, cfg):
    """Run ``fn(lo, hi, cfg)`` over [0, reps) and concatenate its arrays.

    Chunks are reduced in replication order, and every replication owns its
    own stream, so the result is independent of the worker count."""
    if workers <= 1 or reps < 2 * _MIN_CHUNK:
        return fn(0, reps, cfg)
    chunk = max(_MIN_CHUNK, -(-reps // (workers * 4)))
    spans = [(lo, min(lo + chunk, reps)) for lo in range(0, reps, chunk)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = [f.result() for f in [pool.submit(fn, lo, hi, cfg) for lo, hi in spans]]
    return {k: np.concatenate([p[k] for p in parts], axis=0) for k in parts[0]}


# ---------------------------------------------------------------------------
# horizon selection and first-passage planning
# ---------------------------------------------------------------------------


def level_tail_bound(idx, level, T):
    """Exponential-moment upper bound on P(D(T) < level).

    For any theta > 0, P(D(T) < r) <= exp(theta*r) * E[exp(-theta*D(T))];
    the exponent is minimized over a logarithmic theta grid."""
    s = np.linspace(0.0, T, 201)
    beta = idx.evaluate_many(s)
    g = np.array([math.gamma(1.0 - b) for b in beta])
    w = np.ones(201)
    w[1:-1:2], w[2:-1:2] = 4.0, 2.0
    w *= (T / 200.0) / 3.0
    thetas = np.logspace(-2.0, 8.0, 161)
    exponent = thetas * level - (thetas[:, None] ** beta[None, :]) @ (w * g)
    return float(min(1.0, math.exp(exponent.min())))


def choose_horizon(beta_spec, level, candidates=_T_END_CANDIDATES):
    """Shortest horizon on which the level is reached except with
    probability below the planning target (or the longest admissible
    horizon if the index leaves (0, 1) first).

    Returns ``(index, tail_bound)``."""
    best = None
    for T in candidates:
        if T < level * 0.0:  # levels do not constrain the horizon directly
            continue
        try:
            idx = StabilityIndex.from_spec(beta_spec, T)
        except ValueError:
            continue
        bound = level_tail_bound(idx, level, T)
        best = (idx, bound)
        if bound <= _PASSAGE_TAIL_TARGET:
            return best
    if best is None:
        raise ValueError(f"beta spec {beta_spec!r} is not valid on any horizon")
    return best


@dataclass(frozen=True)
class PassageBlock:
    t0: float
    t1: float
    eps: float
    mean_count: float
    excluded_mass: float


@dataclass(frozen=True)
class PassagePlan:
    """Block-by-block truncated simulation plan for first-passage runs.

    Blocks up to t=1 respect the excluded-mass rate exactly; later blocks
    (visited only when passage has not yet happened) additionally cap the
    expected point count, trading a small, quantified extra excluded mass
    for bounded cost where the local index is close to 1."""

    idx: StabilityIndex
    levels: tuple
    t_end: float
    blocks: tuple
    tail_bound: float


def _solve_eps_for_count(idx, t0, t1, cap):
    lo, hi = -300.0, -1e-9  # log10(eps); count decreases in eps

    def count(logp):
        return ppp.expected_count_window(idx, t0, t1, ppp.Truncation("threshold", 10.0**logp))

    if count(lo) <= cap:
        return 10.0**lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if count(mid) > cap:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    return 10.0**hi


def plan_passage(idx, levels, tail_bound, mass_rate=DEFAULT_MASS_BUDGET,
                 block_len=_PASSAGE_BLOCK_LEN, points_cap=_PASSAGE_POINTS_CAP):
    """Per-block truncation thresholds covering [0, horizon]."""
    levels = tuple(sorted(float(r) for r in levels))
    if not levels or levels[0] <= 0:
        raise ValueError(f"levels must be positive, got {levels}")
    t_end = idx.horizon
    blocks = []
    t0 = 0.0
    while t0 < t_end - 1e-12:
        t1 = min(t0 + block_len, t_end)
        eps = ppp.solve_truncation(idx, t1, "threshold", mass_rate * (t1 - t0), t0=t0)
        trunc = ppp.Truncation("threshold", eps)
        count = ppp.expected_count_window(idx, t0, t1, trunc)
        if count > points_cap and t1 > 1.0:
            eps = max(eps, _solve_eps_for_count(idx, t0, t1, points_cap))
            trunc = ppp.Truncation("threshold", eps)
            count = ppp.expected_count_window(idx, t0, t1, trunc)
        mass = ppp.small_jump_mass_window(idx, t0, t1, trunc)
        blocks.append(PassageBlock(t0, t1, eps, count, mass))
        t0 = t1
    return PassagePlan(idx, levels, t_end, tuple(blocks), tail_bound)


def _passage_rep(stream, plan):
    """First-passage times of one truncated path at every plan level.

    Levels not reached by the horizon stay NaN (the caller flags them);
    blocks after the last passage are never sampled."""
    levels = np.asarray(plan.levels)
    e = np.full(len(levels), np.nan)
    total = 0.0
    nxt = 0
    for blk in plan.blocks:
        k = stream.poisson(blk.mean_count)
        if k:
            t = ppp.sample_threshold_times(stream, plan.idx, blk.t0, blk.t1, blk.eps, k)
            beta = plan.idx.evaluate_many(t)
            x = blk.eps * stream.uniform(k) ** (-1.0 / beta)
            order = np.argsort(t, kind="stable")
            prefix = total + np.cumsum(x[order])
            ts = t[order]
            while nxt < len(levels):
                pos = int(np.searchsorted(prefix, levels[nxt], side="left"))
                if pos >= k:
                    break
                e[nxt] = ts[pos]
                nxt += 1
            total = float(prefix[-1])
        if nxt >= len(levels):
            break
    return e


# ---------------------------------------------------------------------------
# replication-chunk workers (top level so worker processes can import them)
# ---------------------------------------------------------------------------


def _sample_pattern(stream, T, idx, trunc):
    if trunc.mode == "stationary":
        return ppp.sample_stationary(stream, T, trunc.parameter, idx)
    return ppp.sample_threshold(stream, T, trunc.parameter, idx)


def _dvalues_chunk(lo, hi, cfg):
    """Path values D(t) at the configured times, one pattern per replication."""
    idx, ts, T, trunc = cfg["idx"], cfg["ts"], cfg["T"], cfg["trunc"]
    out = np.empty((hi - lo, len(ts)))
    for i, rep in enumerate(range(lo, hi)):
        pat = _sample_pattern(stream_for(cfg["seed"], cfg["channel"], rep), T, idx, trunc)
        for j, t in enumerate(ts):
            out[i, j] = float(pat.sizes[pat.times <= t].sum())
    return {"d": out}


def _increments_chunk(lo, hi, cfg):
    """Increments over the configured (a, b] windows from a shared pattern."""
    idx, windows, T, trunc = cfg["idx"], cfg["windows"], cfg["T"], cfg["trunc"]
    out = np.empty((hi - lo, len(windows)))
    for i, rep in enumerate(range(lo, hi)):
        pat = _sample_pattern(stream_for(cfg["seed"], cfg["channel"], rep), T, idx, trunc)
        for j, (a, b) in enumerate(windows):
            out[i, j] = float(pat.sizes[(pat.times > a) & (pat.times <= b)].sum())
    return {"inc": out}


def _monotone_chunk(lo, hi, cfg):
    """Strict-monotonicity and inverse-consistency violations per path."""
    idx, T, trunc, probes = cfg["idx"], cfg["T"], cfg["trunc"], cfg["probes"]
    bad = np.zeros(hi - lo, dtype=np.int64)
    for i, rep in enumerate(range(lo, hi)):
        s = stream_for(cfg["seed"], cfg["channel"], rep)
        path = subordinator.build_path(_sample_pattern(s, T, idx, trunc))
        if len(path.prefix) == 0:
            bad[i] += 1
            continue
        if path.prefix[0] <= 0.0 or (len(path.prefix) > 1 and (np.diff(path.prefix) <= 0.0).any()):
            bad[i] += 1
        # first-passage consistency: D(E(r)) >= r and the path is still
        # below r just before E(r); and E(D(t)) <= t wherever D(t) > 0
        rs = s.uniform(probes) * path.total
        for r in rs:
            e = inverse_mfpp.inverse(path, float(r))
            pos = int(np.searchsorted(path.times, e, side="left"))
            before = 0.0 if pos == 0 else float(path.prefix[pos - 1])
            if subordinator.eval_at(path, e) < r or before >= r:
                bad[i] += 1
        for t in T * s.uniform(probes):
            v = subordinator.eval_at(path, float(t))
            if v > 0.0 and inverse_mfpp.inverse(path, v) > t * (1.0 + 1e-12):
                bad[i] += 1
    return {"bad": bad}


def _passage_chunk(lo, hi, cfg):
    """First-passage times at each level, plus the time-changed counts."""
    plan = cfg["plan"]
    m = cfg.get("stationary_m")
    rate = cfg.get("rate")
    nl = len(plan.levels)
    e = np.empty((hi - lo, nl))
    x = np.full((hi - lo, nl), np.nan)
    for i, rep in enumerate(range(lo, hi)):
        s = stream_for(cfg["seed"], cfg["channel"], rep)
        if m is not None:
            pat = ppp.sample_stationary(s, plan.t_end, m, plan.idx)
            path = subordinator.build_path(pat)
            prefix, times = path.prefix, path.times
            pos = np.searchsorted(prefix, plan.levels, side="left")
            ok = pos < len(prefix)
            row = np.full(nl, np.nan)
            row[ok] = times[pos[ok]]
            e[i] = row
        else:
            e[i] = _passage_rep(s, plan)
        if rate is not None:
            sa = stream_for(cfg["seed"], cfg["arr_channel"], rep)
            npath = inverse_mfpp.sample_poisson_path(sa, rate, plan.t_end)
            ok = ~np.isnan(e[i])
            x[i, ok] = np.searchsorted(npath.arrivals, e[i, ok], side="right")
    out = {"e": e}
    if rate is not None:
        out["x"] = x
    return out


def _tail_chunk(lo, hi, cfg):
    """Exceedance counts of normalized array summands over the level c."""
    beta, beta_sup, L = cfg["beta"], cfg["beta_sup"], cfg["L"]
    bound = cfg["c"] * ctrw.norming_bnk(cfg["a_n"], beta, beta_sup)
    batch = cfg["batch"]
    hits = np.empty(hi - lo, dtype=np.int64)
    for i, rep in enumerate(range(lo, hi)):
        s = stream_for(cfg["seed"], cfg["channel"], rep)
        j = ctrw._jnk_from_uniforms(s.uniform(batch), beta, beta_sup, L)
        hits[i] = int((j > bound).sum())
    return {"hits": hits}


def _ctrw_chunk(lo, hi, cfg):
    """S_n(t), E_n(t) and the composed walk at each t, one path per rep."""
    idx, L, n, ts = cfg["idx"], cfg["L"], cfg["n"], cfg["ts"]
    p_n, lam = cfg["p_n"], cfg["lam"]
    nt = len(ts)
    s_out = np.empty((hi - lo, nt))
    e_out = np.empty((hi - lo, nt))
    x_out = np.empty((hi - lo, nt))
    flagged = np.zeros(hi - lo, dtype=bool)
    for i, rep in enumerate(range(lo, hi)):
        js = stream_for(cfg["seed"], cfg["jump_channel"], rep)
        path = ctrw.partial_sum_path(js, n, idx.horizon, idx, L)
        walk = ctrw.BernoulliWalk(stream_for(cfg["seed"], cfg["walk_channel"], rep), p_n)
        for j, t in enumerate(ts):
            k = min(int(math.floor(n * t + 1e-9)), len(path.grid) - 1)
            s_out[i, j] = path.grid[k]
            try:
                e = ctrw.inverse_ctrw(path, t)
            except HorizonExceededError:
                e = path.horizon
                flagged[i] = True
            e_out[i, j] = e
            x_out[i, j] = walk.value(lam * e / p_n)
    return {"s": s_out, "e": e_out, "x": x_out, "flagged": flagged}


def _paths_chunk(lo, hi, cfg):
    """Emit one trajectory CSV per replication; report invariant checks."""
    idx, ts, trunc, lam = cfg["idx"], cfg["ts"], cfg["trunc"], cfg["lam"]
    T = idx.horizon
    nflag = np.zeros(hi - lo, dtype=np.int64)
    ok = np.ones(hi - lo, dtype=bool)
    for i, rep in enumerate(range(lo, hi)):
        s = stream_for(cfg["seed"], cfg["channel"], rep)
        path = subordinator.build_path(_sample_pattern(s, T, idx, trunc))
        sa = stream_for(cfg["seed"], cfg["arr_channel"], rep)
        npath = inverse_mfpp.sample_poisson_path(sa, lam, T)
        d = subordinator.eval_many(path, ts)
        pos = np.searchsorted(path.prefix, ts, side="left")
        reached = (pos < len(path.prefix)) & (ts > 0)
        e = np.full(len(ts), np.nan)
        e[ts == 0.0] = 0.0
        e[reached] = path.times[pos[reached]]
        x = np.full(len(ts), np.nan)
        have = ~np.isnan(e)
        x[have] = np.searchsorted(npath.arrivals, e[have], side="right")
        flags = np.isnan(e)
        nflag[i] = int(flags.sum())
        dd, xx = d, x[have]
        if (np.diff(dd) < 0).any() or (np.diff(xx) < 0).any():
            ok[i] = False
        rows = [
            (float(ts[j]), float(d[j]), float(e[j]), float(x[j]), bool(flags[j]))
            for j in range(len(ts))
        ]
        rep_report = Report(
            "paths",
            {
                "beta": idx.spec_string(),
                "seed": cfg["seed"],
                "rep": rep,
                "lambda": lam,
                "horizon": T,
                "truncation": f"{trunc.mode}:{trunc.parameter:.17g}",
            },
            ("t", "d", "e", "x", "flagged"),
            rows,
        )
        rep_report.write(f"{cfg['out_prefix']}.rep{rep:05d}.csv")
    return {"nflag": nflag, "ok": ok}


# ---------------------------------------------------------------------------
# pipelines
# ---------------------------------------------------------------------------


def _require(cond, msg):
    if not cond:
        raise ValueError(msg)


def _check_common(reps, seed):
    _require(isinstance(reps, (int, np.integer)) and reps >= 2, f"reps must be >= 2, got {reps}")
    _require(isinstance(seed, (int, np.integer)) and 0 <= seed < 2**64,
             f"seed must be an unsigned 64-bit integer, got {seed}")


def run_laplace(beta_spec, thetas, ts, reps, seed, workers=1, trunc_m=None,
                mass_budget=DEFAULT_MASS_BUDGET, channel=CH_LAPLACE):
    """Monte Carlo transform values of D(t) against the closed form.

    Row pass: |MC mean - closed form| <= 3*SE + theta * excluded mass."""
    _check_common(reps, seed)
    thetas = [float(v) for v in thetas]
    ts = [float(v) for v in ts]
    _require(thetas and all(v > 0 for v in thetas), f"theta values must be positive, got {thetas}")
    _require(ts and all(v > 0 for v in ts), f"t values must be positive, got {ts}")
    T = max(ts)
    idx = StabilityIndex.from_spec(beta_spec, T)
    if trunc_m is not None:
        _require(trunc_m > 0, f"trunc-m must be positive, got {trunc_m}")
        trunc = ppp.Truncation("stationary", float(trunc_m))
    else:
        trunc = ppp.Truncation(
            "stationary", ppp.solve_truncation(idx, T, "stationary", mass_budget)
        )
    cfg = {"seed": int(seed), "channel": channel, "idx": idx, "ts": ts, "T": T, "trunc": trunc}
    res = _map_reps(_dvalues_chunk, int(reps), workers, cfg)
    rows = []
    for theta in thetas:
        for j, t in enumerate(sorted(range(len(ts)), key=lambda j: ts[j])):
            tv = ts[t]
            est = stats.empirical_laplace(res["d"][:, t], theta)
            oracle = subordinator.laplace_transform(idx, theta, tv)
            bias = theta * ppp.small_jump_mass(idx, tv, trunc)
            ok = abs(est.mean - oracle) <= 3.0 * est.se + bias
            rows.append((idx.spec_string(), theta, tv, est.mean, est.se, oracle, bias, ok))
    header = {
        "beta": idx.spec_string(),
        "seed": int(seed),
        "reps": int(reps),
        "theta": ",".join(_fmt(v) for v in thetas),
        "t": ",".join(_fmt(v) for v in ts),
        "truncation": f"{trunc.mode}:{trunc.parameter:.17g}",
        "excluded_mass": ppp.small_jump_mass(idx, T, trunc),
    }
    return Report("laplace", header,
                  ("beta_spec", "theta", "t", "mc_mean", "mc_se", "oracle", "bias_bound", "pass"),
                  rows)


def run_mfpp(beta_spec, lam, ts, reps, seed, workers=1, trunc_m=None,
             mass_rate=DEFAULT_MASS_BUDGET):
    """Marginal law of the time-changed counting process at each t.

    The oracle exists only for a constant index at k = 0 (a Mittag-Leffler
    value); other rows are emitted without a pass judgement of their own."""
    _check_common(reps, seed)
    _require(lam > 0, f"lambda must be positive, got {lam}")
    ts = sorted(float(v) for v in ts)
    _require(ts and all(v > 0 for v in ts), f"t values must be positive, got {ts}")
    idx, tail = choose_horizon(beta_spec, max(ts))
    plan = plan_passage(idx, ts, tail, mass_rate=mass_rate)
    cfg = {
        "seed": int(seed), "channel": CH_PASSAGE, "arr_channel": CH_ARRIVALS,
        "plan": plan, "rate": float(lam),
    }
    if trunc_m is not None:
        _require(trunc_m > 0, f"trunc-m must be positive, got {trunc_m}")
        cfg["stationary_m"] = float(trunc_m)
    res = _map_reps(_passage_chunk, int(reps), workers, cfg)
    xs = res["x"]
    unreached = int(np.isnan(res["e"]).sum())
    rows = []
    for j, t in enumerate(ts):
        col = xs[:, j]
        col = col[~np.isnan(col)]
        nv = len(col)
        kmax = int(col.max()) if nv else 0
        for k in range(kmax + 1):
            p = float((col == k).mean()) if nv else float("nan")
            se = math.sqrt(p * (1.0 - p) / nv) if nv else float("nan")
            if idx.family == "constant" and k == 0:
                b = idx.params[0]
                oracle = stats.mittag_leffler(b, -lam * t**b / subordinator.gamma_fn(1.0 - b))
                ok = abs(p - oracle) <= 3.0 * se
            else:
                oracle = float("nan")
                ok = True
            rows.append((t, k, p, se, oracle, ok))
    header = {
        "beta": idx.spec_string(),
        "seed": int(seed),
        "reps": int(reps),
        "lambda": float(lam),
        "t": ",".join(_fmt(v) for v in ts),
        "horizon": plan.t_end,
        "horizon_tail_bound": plan.tail_bound,
        "unreached": unreached,
    }
    return Report("mfpp", header, ("t", "k", "p_hat", "se", "oracle", "pass"), rows)


def _parse_pn(pn_rule, n):
    if pn_rule == "sqrt":
        return n ** -0.5
    if pn_rule.startswith("const:"):
        v = float(pn_rule.partition(":")[2])
        _require(0.0 < v <= 1.0, f"pn-rule constant must be in (0, 1], got {v}")
        return v
    raise ValueError(f"pn-rule must be 'sqrt' or 'const:<v>', got {pn_rule!r}")


def run_ctrw(beta_spec, lfamily, ns, ts, reps, seed, workers=1, pn_rule="sqrt",
             lam=1.0, alpha=0.01, mass_rate=DEFAULT_MASS_BUDGET):
    """KS distances of the array approximations against direct simulation.

    For each n: the normalized partial sum at t vs D(t), its inverse at
    level t vs the first-passage time E(t), and the composed walk vs the
    time-changed count X(t)."""
    _check_common(reps, seed)
    _require(lam > 0, f"lambda must be positive, got {lam}")
    L = ctrw.family_from_name(lfamily)
    ns = [int(v) for v in ns]
    _require(ns and all(v >= 2 for v in ns), f"n values must be integers >= 2, got {ns}")
    ts = sorted(float(v) for v in ts)
    _require(ts and all(v > 0 for v in ts), f"t values must be positive, got {ts}")
    idx, tail = choose_horizon(beta_spec, max(ts))
    # reference samples, shared by every n
    trunc_ref = ppp.Truncation(
        "threshold", ppp.solve_truncation(idx, max(ts), "threshold", mass_rate)
    )
    dref = _map_reps(_dvalues_chunk, int(reps), workers, {
        "seed": int(seed), "channel": CH_D_REFERENCE, "idx": idx, "ts": ts,
        "T": max(ts), "trunc": trunc_ref,
    })["d"]
    plan = plan_passage(idx, ts, tail, mass_rate=mass_rate)
    ref = _map_reps(_passage_chunk, int(reps), workers, {
        "seed": int(seed), "channel": CH_PASSAGE, "arr_channel": CH_ARRIVALS,
        "plan": plan, "rate": float(lam),
    })
    eref, xref = ref["e"], ref["x"]
    rows = []
    flagged_total = 0
    for i, n in enumerate(sorted(ns)):
        p_n = _parse_pn(pn_rule, n)
        res = _map_reps(_ctrw_chunk, int(reps), workers, {
            "seed": int(seed), "jump_channel": CH_CTRW_JUMPS + 2 * i,
            "walk_channel": CH_CTRW_JUMPS + 2 * i + 1,
            "idx": idx, "L": L, "n": n, "ts": ts, "p_n": p_n, "lam": float(lam),
        })
        flagged_total += int(res["flagged"].sum())
        for j, t in enumerate(ts):
            emask = ~np.isnan(eref[:, j])
            ks_d = stats.ks_two_sample(res["s"][:, j], dref[:, j])
            ks_e = stats.ks_two_sample(res["e"][:, j], eref[emask, j])
            ks_x = stats.ks_two_sample(res["x"][:, j], xref[emask, j])
            crit = stats.ks_critical_value(len(res["s"]), int(emask.sum()), alpha)
            ok = max(ks_d, ks_e, ks_x) < crit
            rows.append((n, t, ks_d, ks_e, ks_x, crit, ok))
    header = {
        "beta": idx.spec_string(),
        "seed": int(seed),
        "reps": int(reps),
        "lfamily": lfamily,
        "n": ",".join(str(v) for v in sorted(ns)),
        "t": ",".join(_fmt(v) for v in ts),
        "pn_rule": pn_rule,
        "lambda": float(lam),
        "alpha": float(alpha),
        "horizon": idx.horizon,
        "horizon_tail_bound": tail,
        "flagged": flagged_total,
    }
    return Report("ctrw", header,
                  ("n", "t", "ks_vs_D", "ks_vs_E", "ks_vs_X", "critical_value", "pass"),
                  rows)


def run_paths(beta_spec, reps, seed, out_prefix, workers=1, t_max=1.0, grid=101,
              lam=1.0, mass_budget=DEFAULT_MASS_BUDGET):
    """Per-replication trajectory dumps of D, E and X on a uniform grid."""
    _check_common(reps, seed)
    _require(isinstance(grid, (int, np.integer)) and grid >= 2,
             f"grid must be an integer >= 2, got {grid}")
    _require(t_max > 0, f"t must be positive, got {t_max}")
    _require(lam > 0, f"lambda must be positive, got {lam}")
    idx = StabilityIndex.from_spec(beta_spec, float(t_max))
    trunc = ppp.Truncation(
        "threshold", ppp.solve_truncation(idx, float(t_max), "threshold", mass_budget)
    )
    ts = np.linspace(0.0, float(t_max), int(grid))
    res = _map_reps(_paths_chunk, int(reps), workers, {
        "seed": int(seed), "channel": CH_PATHS_JUMPS, "arr_channel": CH_PATHS_ARRIVALS,
        "idx": idx, "ts": ts, "trunc": trunc, "lam": float(lam),
        "out_prefix": out_prefix,
    })
    rows = [
        (rep, f"{out_prefix}.rep{rep:05d}.csv", int(res["nflag"][rep]), bool(res["ok"][rep]))
        for rep in range(int(reps))
    ]
    header = {
        "beta": idx.spec_string(),
        "seed": int(seed),
        "reps": int(reps),
        "lambda": float(lam),
        "horizon": float(t_max),
        "grid": int(grid),
        "truncation": f"{trunc.mode}:{trunc.parameter:.17g}",
    }
    return Report("paths", header, ("rep", "file", "flagged_rows", "pass"), rows)


# ---------------------------------------------------------------------------
# verification suite
# ---------------------------------------------------------------------------

_VERIFY_FAMILIES = ("constant:0.5", "affine:0.4,0.2")


def _scaled(n, scale, floor=200):
    return max(floor, int(round(n * scale)))


def _count_inversions(seq, tol=1e-12):
    return sum(1 for a, b in zip(seq, seq[1:]) if b > a + tol)


def run_verify(seed, workers=1, quick=False, scale=1.0):
    """The full property suite; one row per check, grouped by criterion."""
    _require(scale > 0, f"scale must be positive, got {scale}")
    _require(isinstance(seed, (int, np.integer)) and 0 <= seed < 2**64,
             f"seed must be an unsigned 64-bit integer, got {seed}")
    if quick:
        sizes = dict(laplace=2000, cross=2000, continuity=2000, increments=2000,
                     monotone=50, mfpp=3000, tail=100_000, ctrw=1000)
        ctrw_ns = (100, 1000)
        ctrw_alpha = 0.05
    else:
        sizes = dict(laplace=100_000, cross=10_000, continuity=10_000, increments=10_000,
                     monotone=200, mfpp=100_000, tail=1_000_000, ctrw=10_000)
        ctrw_ns = (100, 1000, 10_000)
        ctrw_alpha = 0.01
    sizes = {k: _scaled(v, scale, floor=20 if k == "monotone" else 200)
             for k, v in sizes.items()}
    rows = []

    # 1: transform of D(t) against the closed form, both index families
    for spec in _VERIFY_FAMILIES:
        rep = run_laplace(spec, (0.5, 1.0, 2.0), (0.5, 1.0), sizes["laplace"], seed,
                          workers=workers)
        worst = max(
            abs(r[3] - r[5]) / (3.0 * r[4] + r[6]) for r in rep.rows
        )
        rows.append((1, f"laplace {spec} worst error ratio", worst, 1.0, rep.all_pass()))

    # 2: the two truncated samplers agree in law at t = 1
    idx_c = StabilityIndex.from_spec("constant:0.5", 1.0)
    n2 = sizes["cross"]
    samples = {}
    for mode, ch in (("stationary", CH_CROSS_STATIONARY), ("threshold", CH_CROSS_THRESHOLD)):
        trunc = ppp.Truncation(mode, ppp.solve_truncation(idx_c, 1.0, mode, DEFAULT_MASS_BUDGET))
        samples[mode] = _map_reps(_dvalues_chunk, n2, workers, {
            "seed": int(seed), "channel": ch, "idx": idx_c, "ts": [1.0], "T": 1.0,
            "trunc": trunc,
        })["d"][:, 0]
    ks = stats.ks_two_sample(samples["stationary"], samples["threshold"])
    crit = stats.ks_critical_value(n2, n2, 0.01)
    rows.append((2, "sampler cross-validation KS at t=1", ks, crit, ks < crit))

    # 3: small-increment probability against the continuity constant C = 21
    n3 = sizes["continuity"]
    windows = [(t, t + h) for t in (0.0, 0.4) for h in (0.01, 0.05, 0.1)]
    trunc3 = ppp.Truncation(
        "stationary", ppp.solve_truncation(idx_c_half := StabilityIndex.from_spec("constant:0.5", 0.5),
                                           0.5, "stationary", DEFAULT_MASS_BUDGET)
    )
    inc = _map_reps(_increments_chunk, n3, workers, {
        "seed": int(seed), "channel": CH_CONTINUITY, "idx": idx_c_half, "ts": None,
        "T": 0.5, "trunc": trunc3, "windows": windows,
    })["inc"]
    c_const = 21.0
    for j, (a, b) in enumerate(windows):
        h = b - a
        p = float((inc[:, j] > 0.1).mean())
        se = math.sqrt(max(p * (1.0 - p), 1.0 / n3) / n3)
        bound = c_const * h + 3.0 * se
        rows.append((3, f"continuity P(inc>0.1) t={a:g} h={h:g}", p, bound, p <= bound))

    # 4: increments on (0, 0.5] and (0.5, 1] are uncorrelated
    n4 = sizes["increments"]
    trunc4 = ppp.Truncation(
        "stationary", ppp.solve_truncation(idx_c, 1.0, "stationary", DEFAULT_MASS_BUDGET)
    )
    inc4 = _map_reps(_increments_chunk, n4, workers, {
        "seed": int(seed), "channel": CH_INCREMENTS, "idx": idx_c, "ts": None,
        "T": 1.0, "trunc": trunc4, "windows": [(0.0, 0.5), (0.5, 1.0)],
    })["inc"]
    corr = abs(float(np.corrcoef(inc4[:, 0], inc4[:, 1])[0, 1]))
    bound4 = 3.0 / math.sqrt(n4)
    rows.append((4, "increment correlation (0,0.5] vs (0.5,1]", corr, bound4, corr <= bound4))

    # 5: strictly increasing prefixes and inverse consistency, zero tolerance
    n5 = sizes["monotone"]
    for spec in _VERIFY_FAMILIES:
        idx5 = StabilityIndex.from_spec(spec, 1.0)
        trunc5 = ppp.Truncation(
            "stationary", ppp.solve_truncation(idx5, 1.0, "stationary", DEFAULT_MASS_BUDGET)
        )
        bad = _map_reps(_monotone_chunk, n5, workers, {
            "seed": int(seed), "channel": CH_MONOTONE, "idx": idx5, "ts": None,
            "T": 1.0, "trunc": trunc5, "probes": 100,
        })["bad"]
        total = int(bad.sum())
        rows.append((5, f"monotone+inverse violations {spec}", total, 0, total == 0))

    # 6: P(X(1) = 0) against the Mittag-Leffler oracle, constant index
    rep6 = run_mfpp("constant:0.5", 1.0, [1.0], sizes["mfpp"], seed, workers=workers)
    row0 = next(r for r in rep6.rows if r[1] == 0)
    rows.append((6, "P(X(1)=0) |error|", abs(row0[2] - row0[4]), 3.0 * row0[3], bool(row0[5])))

    # 7: n * P(normalized summand > 1) = 1 at n = 100, constant index
    n_tail, n_row = sizes["tail"], 100
    batch = 10_000
    nbatches = max(2, -(-n_tail // batch))
    a_n = ctrw.norming_an(n_row, ctrw.UNIT, 0.5)
    hits = _map_reps(_tail_chunk, nbatches, workers, {
        "seed": int(seed), "channel": CH_TAIL, "beta": 0.5, "beta_sup": 0.5,
        "L": ctrw.UNIT, "a_n": a_n, "c": 1.0, "batch": batch,
    })["hits"]
    draws = nbatches * batch
    p = float(hits.sum()) / draws
    est = n_row * p
    se = n_row * math.sqrt(p * (1.0 - p) / draws)
    rows.append((7, "tail normalization |n*P - 1|", abs(est - 1.0), 3.0 * se, abs(est - 1.0) <= 3.0 * se))

    # 8: array approximations converge: KS non-increasing in n (at most one
    # inversion) and below the critical value at the largest n
    for spec in _VERIFY_FAMILIES:
        rep8 = run_ctrw(spec, "unit", ctrw_ns, [1.0], sizes["ctrw"], seed,
                        workers=workers, alpha=ctrw_alpha)
        crit8 = rep8.rows[-1][5]
        for col, name in ((2, "S_n(1) vs D(1)"), (3, "E_n(1) vs E(1)"), (4, "walk vs X(1)")):
            seq = [r[col] for r in rep8.rows]
            inv = _count_inversions(seq)
            ok = inv <= 1 and seq[-1] < crit8
            rows.append((8, f"ctrw {spec} {name} final KS", seq[-1], crit8, seq[-1] < crit8))
            rows.append((8, f"ctrw {spec} {name} inversions", inv, 1, inv <= 1))

    # 9: worker count and reruns never change a report byte
    det_args = ("constant:0.5", (1.0,), (1.0,), 500, seed)
    base = run_laplace(*det_args, workers=1).to_csv()
    again = run_laplace(*det_args, workers=1).to_csv()
    multi = run_laplace(*det_args, workers=2).to_csv()
    rows.append((9, "rerun byte-identical", float(base == again), 1.0, base == again))
    rows.append((9, "worker-count byte-identical", float(base == multi), 1.0, base == multi))

    header = {
        "seed": int(seed),
        "quick": bool(quick),
        "scale": float(scale),
        "sizes": ";".join(f"{k}={v}" for k, v in sorted(sizes.items())),
        "ctrw_n": ",".join(str(v) for v in ctrw_ns),
        "ctrw_alpha": ctrw_alpha,
    }
    return Report("verify", header, ("criterion", "check", "value", "bound", "pass"), rows)

"""Decision procedures for multi-source problems on capacitated networks.

Every check compares entropy rates (bits per symbol) against integer cut
values and reports each inequality with both sides and its slack. Comparisons
accept a small additive tolerance because block encoders carry a vanishing
per-symbol overhead.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .common_info import (
    ComponentPartition,
    check_nesting,
    decompose,
    gk_entropy,
)
from .errors import BindingError, NestingError
from .netgraph import Network, min_cut, rho
from .probability import (
    JointPmf,
    binary_entropy,
    conditional_entropy,
    entropy,
    is_markov_chain,
    mutual_information,
)
from .reports import (
    CUT_CONDITIONS_HOLD,
    FEASIBLE,
    INFEASIBLE,
    RATE_TOL,
    Check,
    FeasibilityReport,
    build_report,
    rate_check,
)

__all__ = [
    "Check",
    "FeasibilityReport",
    "Message",
    "MessagePlan",
    "check_ak",
    "check_bsi",
    "check_corollary_optimality",
    "check_dmb_support",
    "check_multicast",
    "check_separation",
    "check_separation_l",
    "plan_degraded_messages",
    "FEASIBLE",
    "INFEASIBLE",
    "CUT_CONDITIONS_HOLD",
]

MODE_COMMON_INFORMATION = "common-information"
MODE_CONDITIONAL_ENTROPY = "conditional-entropy"

PAYLOAD_CLASS_INDEX = "class-index"
PAYLOAD_REFINEMENT_RANK = "refinement-rank"
PAYLOAD_EXTERNAL_CODE = "external-successive-description"


def _source_node(net: Network, var: str) -> str:
    try:
        return net.sources[var]
    except KeyError:
        raise BindingError(f"no source node bound to variable {var!r}") from None


def check_multicast(net: Network, pmf: JointPmf, tol: float = RATE_TOL) -> FeasibilityReport:
    """Cut conditions for multicasting all correlated sources.

    For every nonempty subset S of the source variables,
    H(S | complement) <= rho_G(source nodes of S). With two sources this is
    exactly the three-inequality min-cut/max-flow criterion.
    """
    nodes = {v: _source_node(net, v) for v in pmf.variables}
    checks = []
    for r in range(1, len(pmf.variables) + 1):
        for subset in combinations(pmf.variables, r):
            rest = tuple(v for v in pmf.variables if v not in subset)
            if rest:
                lhs = conditional_entropy(pmf, subset, rest)
                label = f"H({','.join(subset)}|{','.join(rest)})"
            else:
                lhs = entropy(pmf, subset)
                label = f"H({','.join(subset)})"
            srcs = sorted({nodes[v] for v in subset})
            rhs = rho(net, srcs)
            checks.append(
                rate_check(f"{label} <= rho_G({{{','.join(srcs)}}})", lhs, rhs, tol)
            )
    return build_report("multicast", checks)


def check_separation(net: Network, pmf: JointPmf, tol: float = RATE_TOL) -> FeasibilityReport:
    """Feasibility of two-source multicast by source decomposition.

    Requires H(X|K) <= rho_G(s_x), H(Y|K) <= rho_G(s_y), and
    H(X|K) + H(Y|K) + H(K) <= rho_G(s_x, s_y), where K is the common
    information of the pair. The witness carries the three latent rates used
    for delivery over the expanded network.
    """
    if len(pmf.variables) != 2:
        raise ValueError("separation check applies to two-variable problems")
    x, y = pmf.variables
    sx, sy = _source_node(net, x), _source_node(net, y)
    part = decompose(pmf, (x, y))
    hk = gk_entropy(part)
    # K is a deterministic function of each variable, so H(X|K) = H(X) - H(K)
    hx_k = max(entropy(pmf, x) - hk, 0.0)
    hy_k = max(entropy(pmf, y) - hk, 0.0)
    checks = [
        rate_check(f"H({x}|K) <= rho_G({{{sx}}})", hx_k, rho(net, sx), tol),
        rate_check(f"H({y}|K) <= rho_G({{{sy}}})", hy_k, rho(net, sy), tol),
        rate_check(
            f"H({x}|K)+H({y}|K)+H(K) <= rho_G({{{sx},{sy}}})",
            hx_k + hy_k + hk,
            rho(net, (sx, sy)),
            tol,
        ),
    ]
    witnesses = {
        "latent_rates": {"K": hk, f"{x}'": hx_k, f"{y}'": hy_k},
        "components": len(part.components),
    }
    return build_report("separation", checks, witnesses)


def check_corollary_optimality(pmf: JointPmf, tol: float = 1e-9) -> bool:
    """True iff the common information exhausts the mutual information.

    In that case separation by source decomposition solves every feasible
    two-source multicast instance, so the separation and multicast verdicts
    coincide on every network.
    """
    if len(pmf.variables) != 2:
        raise ValueError("optimality test applies to two-variable problems")
    part = decompose(pmf, pmf.variables)
    return abs(gk_entropy(part) - mutual_information(pmf, pmf.variables[0], pmf.variables[1])) <= tol


def check_separation_l(net: Network, pmf: JointPmf, tol: float = RATE_TOL) -> FeasibilityReport:
    """Separation conditions for any number of sources.

    K is the component index of the all-variable multipartite decomposition;
    the check requires H(X_j|K) <= rho_G(s_j) for every source and
    sum_j H(X_j|K) + H(K) <= rho_G(all sources).
    """
    if len(pmf.variables) < 2:
        raise ValueError("need at least two source variables")
    nodes = {v: _source_node(net, v) for v in pmf.variables}
    part = decompose(pmf, pmf.variables)
    hk = gk_entropy(part)
    checks = []
    latent = {"K": hk}
    total = hk
    for v in pmf.variables:
        hv_k = max(entropy(pmf, v) - hk, 0.0)
        latent[f"{v}'"] = hv_k
        total += hv_k
        checks.append(
            rate_check(f"H({v}|K) <= rho_G({{{nodes[v]}}})", hv_k, rho(net, nodes[v]), tol)
        )
    all_nodes = sorted(set(nodes.values()))
    label = f"sum H(X_j|K)+H(K) <= rho_G({{{','.join(all_nodes)}}})"
    checks.append(rate_check(label, total, rho(net, all_nodes), tol))
    return build_report("separation-l", checks, {"latent_rates": latent})


def check_bsi(
    net: Network,
    pmf: JointPmf,
    source_var: str,
    side_vars,
    tol: float = RATE_TOL,
) -> FeasibilityReport:
    """Broadcast of one source to terminals holding correlated side information.

    Terminal i (bound to side variable i, in order) needs
    H(X|Y_i) <= rho(s; t_i), a per-terminal min-cut rather than the capacity
    function. Checks are reported sorted by their conditional entropy.
    """
    side_vars = tuple(side_vars)
    if len(set(side_vars)) != len(side_vars) or source_var in side_vars:
        raise ValueError("side variables must be distinct and differ from the source")
    s = _source_node(net, source_var)
    if len(side_vars) != len(net.terminals):
        raise BindingError(
            f"{len(side_vars)} side variables but {len(net.terminals)} terminals"
        )
    entries = []
    for yv, t in zip(side_vars, net.terminals):
        h = conditional_entropy(pmf, source_var, yv)
        entries.append((h, yv, t))
    entries.sort(key=lambda e: e[0])
    checks = [
        rate_check(
            f"H({source_var}|{yv}) <= rho({s};{t})",
            h,
            min_cut(net, {s}, t).value,
            tol,
        )
        for h, yv, t in entries
    ]
    order = {"side_order": [yv for _, yv, _ in entries]}
    return build_report("broadcast-side-information", checks, order)


@dataclass(frozen=True)
class Message:
    name: str
    rate: float
    payload_kind: str
    level: int

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "rate": self.rate,
            "payload": self.payload_kind,
            "level": self.level,
        }


@dataclass(frozen=True)
class MessagePlan:
    """Ordered degraded messages M_1..M_m with per-message rates.

    Terminal i must receive M_1..M_i; cumulative rates are the prefix sums of
    the per-message rates.
    """

    mode: str
    source_variable: str
    side_variables: tuple
    messages: tuple

    @property
    def cumulative(self) -> tuple:
        out = []
        total = 0.0
        for m in self.messages:
            total += m.rate
            out.append(total)
        return tuple(out)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "source": self.source_variable,
            "side_variables": list(self.side_variables),
            "messages": [m.to_dict() for m in self.messages],
            "cumulative_rates": list(self.cumulative),
        }


def plan_degraded_messages(
    pmf: JointPmf,
    source_var: str,
    side_vars,
    mode: str = MODE_COMMON_INFORMATION,
) -> MessagePlan:
    """Rate plan for broadcast with side information along a degraded chain.

    In common-information mode, M_1 carries the within-class index of the
    source under the finest partition (rate H(X|K_1)) and M_i the refinement
    rank of class i-1 inside class i (rate H(K_{i-1}|K_i)); cumulative rates
    telescope to H(X|K_i). In conditional-entropy mode the cumulative rates
    are H(X|Y_i) and payloads are produced by an external successive
    description code, so only the rate accounting is planned here.
    """
    side_vars = tuple(side_vars)
    if not side_vars:
        raise ValueError("at least one side variable required")
    chain = (source_var, *side_vars)
    if len(chain) >= 3 and not is_markov_chain(pmf, chain):
        raise ValueError("source and side variables do not form a Markov chain")

    if mode == MODE_COMMON_INFORMATION:
        partitions = [decompose(pmf, (source_var, yv)) for yv in side_vars]
        for i in range(1, len(partitions)):
            ok, _ = check_nesting(partitions[i - 1], partitions[i], source_var)
            if not ok:
                # impossible for a true chain; a failure means broken inputs
                raise NestingError(
                    f"classes under {side_vars[i - 1]!r} do not nest in {side_vars[i]!r}"
                )
        hks = [gk_entropy(p) for p in partitions]
        hx = entropy(pmf, source_var)
        messages = [Message("M1", max(hx - hks[0], 0.0), PAYLOAD_CLASS_INDEX, 1)]
        for i in range(1, len(side_vars)):
            messages.append(
                Message(
                    f"M{i + 1}",
                    max(hks[i - 1] - hks[i], 0.0),
                    PAYLOAD_REFINEMENT_RANK,
                    i + 1,
                )
            )
    elif mode == MODE_CONDITIONAL_ENTROPY:
        hs = [conditional_entropy(pmf, source_var, yv) for yv in side_vars]
        messages = [Message("M1", hs[0], PAYLOAD_EXTERNAL_CODE, 1)]
        for i in range(1, len(side_vars)):
            # increments are nonnegative by data processing along the chain
            messages.append(
                Message(f"M{i + 1}", max(hs[i] - hs[i - 1], 0.0), PAYLOAD_EXTERNAL_CODE, i + 1)
            )
    else:
        raise ValueError(f"unknown planning mode {mode!r}")
    return MessagePlan(mode, source_var, side_vars, tuple(messages))


def check_dmb_support(
    net: Network,
    plan: MessagePlan,
    source_node: str,
    terminals,
    tol: float = RATE_TOL,
) -> FeasibilityReport:
    """Per-terminal cut conditions for a degraded message set.

    Terminal i must support the cumulative rate of M_1..M_i. With up to two
    terminals the problem reduces to plain multicast, so passing checks mean
    "feasible"; with three or more the conditions are necessary only and the
    positive verdict is "cut-conditions-hold".
    """
    terminals = tuple(terminals)
    if len(terminals) != len(plan.messages):
        raise BindingError(
            f"{len(plan.messages)} messages but {len(terminals)} terminals"
        )
    if source_node not in net.nodes:
        raise BindingError(f"unknown source node {source_node!r}")
    cumulative = plan.cumulative
    checks = []
    for i, t in enumerate(terminals):
        checks.append(
            rate_check(
                f"H(M1..M{i + 1}) <= rho({source_node};{t})",
                cumulative[i],
                min_cut(net, {source_node}, t).value,
                tol,
            )
        )
    on_pass = FEASIBLE if len(terminals) <= 2 else CUT_CONDITIONS_HOLD
    return build_report("degraded-message-broadcast", checks, on_pass=on_pass)


def check_ak(
    net: Network,
    pmf: JointPmf,
    x_var: str,
    helper_var: str,
    gamma_points: int = 1001,
    tol: float = RATE_TOL,
) -> FeasibilityReport:
    """Helper-assisted delivery of one source (coded side information).

    The helper describes its variable through the common part K at a duty
    cycle gamma: the auxiliary variable U equals K with probability gamma and
    an erasure otherwise, giving H(U) = gamma*H(K) + h(gamma) and
    H(X|U) = gamma*H(X|K) + (1-gamma)*H(X). Feasible iff some gamma on the
    sweep satisfies rho_G(s_x) >= H(X|U) and rho_G(s_y) >= H(U). The witness
    carries both rate curves plus the pure time-sharing helper line
    gamma*H(K) as an informational overlay.
    """
    if gamma_points < 2:
        raise ValueError("gamma grid needs at least 2 points")
    sx = _source_node(net, x_var)
    sy = _source_node(net, helper_var)
    part = decompose(pmf, (x_var, helper_var))
    hk = gk_entropy(part)
    hx = entropy(pmf, x_var)
    hx_k = max(hx - hk, 0.0)
    rho_x = rho(net, sx)
    rho_y = rho(net, sy)

    # interior stationary point of H(U): log2(g/(1-g)) = H(K)
    gstar = 2.0**hk / (1.0 + 2.0**hk)
    gammas = np.unique(np.append(np.linspace(0.0, 1.0, gamma_points), gstar))
    source_curve = (1.0 - gammas) * hx + gammas * hx_k
    helper_curve = gammas * hk + np.array([binary_entropy(g) for g in gammas])
    slack = np.minimum(rho_x - source_curve, rho_y - helper_curve)
    best = int(np.argmax(slack))
    g = float(gammas[best])
    checks = [
        rate_check(f"H({x_var}|U) <= rho_G({{{sx}}}) at gamma={g:.6f}",
                   float(source_curve[best]), rho_x, tol),
        rate_check(f"H(U) <= rho_G({{{sy}}}) at gamma={g:.6f}",
                   float(helper_curve[best]), rho_y, tol),
    ]
    witnesses = {
        "gamma": g,
        "gamma_grid": [float(v) for v in gammas],
        "source_rate_curve": [float(v) for v in source_curve],
        "helper_rate_curve": [float(v) for v in helper_curve],
        "time_sharing_helper": [float(v * hk) for v in gammas],
        "cut_source": rho_x,
        "cut_helper": rho_y,
        "H_X": hx,
        "H_K": hk,
        "H_X_given_K": hx_k,
    }
    return build_report("ahlswede-korner", checks, witnesses)

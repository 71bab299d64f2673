"""Named verification checks producing uniform reports.

Every check returns a CheckReport with a stable shape: name, anchor (a
one-line statement of the property being verified), the parameters, a
verdict, a JSON-friendly payload, and the wall-clock duration.  Verdict
"pass" means every asserted condition held exactly; "fail" that one did
not; "recorded" is reserved for open-outcome measurements (a conjugacy
scan with no stated expectation, or a computation cut off by its budget).
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

from freenil.budget import BudgetExceeded, Deadline
from freenil.closure import (
    lcs_rank_table,
    member,
    normal_closure,
    parasurface_certificate,
)
from freenil.conjugacy import conjugacy_scan
from freenil.magnus import lyndon_words, witt_rank
from freenil.words import (
    Endomorphism,
    Word,
    check_hypothesis_type2,
    check_hypothesis_type3,
    cyclic_reduce,
    format_word,
    is_proper_power,
    parse_word,
)


@dataclass
class CheckReport:
    name: str
    anchor: str
    params: dict
    verdict: str  # "pass" | "fail" | "recorded"
    payload: dict = field(default_factory=dict)
    duration_ms: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def _timed(name, anchor, params, body) -> CheckReport:
    start = time.monotonic()
    try:
        verdict, payload = body()
    except BudgetExceeded:
        verdict, payload = "recorded", {"reason": "budget exceeded"}
    return CheckReport(
        name=name,
        anchor=anchor,
        params=params,
        verdict=verdict,
        payload=payload,
        duration_ms=(time.monotonic() - start) * 1000.0,
    )


def check_witt(k: int, max_degree: int, timeout: float | None = None) -> CheckReport:
    def body():
        deadline = Deadline(timeout)
        counts, ranks = [], []
        for j in range(1, max_degree + 1):
            deadline.check()
            counts.append(len(lyndon_words(k, j)))
            ranks.append(witt_rank(k, j))
        ok = counts == ranks
        return ("pass" if ok else "fail"), {
            "degrees": list(range(1, max_degree + 1)),
            "lyndon_counts": counts,
            "witt_ranks": ranks,
            "match": ok,
        }

    return _timed(
        "witt",
        "Lyndon word counts at every degree equal the Moebius-formula layer ranks",
        {"k": k, "max_degree": max_degree},
        body,
    )


def check_word(expr: str, k: int, timeout: float | None = None) -> CheckReport:
    def body():
        w = parse_word(expr, k)
        core, conj = cyclic_reduce(w)
        power = is_proper_power(w) if w else None
        return "pass", {
            "reduced": format_word(w),
            "length": len(w),
            "abelianization": list(w.abelianization()),
            "cyclically_reduced": w.is_cyclically_reduced,
            "cyclic_core": format_word(core),
            "cyclic_length": len(core),
            "conjugator": format_word(conj),
            "proper_power": (
                {"root": format_word(power[0]), "exponent": power[1]} if power else None
            ),
        }

    return _timed(
        "word",
        "freely reduced normal form and cyclic data of the expression",
        {"expr": expr, "k": k},
        body,
    )


def check_hypothesis(kind: str, k: int, expr: str, timeout: float | None = None) -> CheckReport:
    if kind == "type2":
        anchor = "w*[w, g*w*g^-1] is cyclically reduced and of different length from w"
    elif kind == "type3":
        anchor = (
            "[a1*d, a2] is cyclically reduced, of different length from [a1,a2], "
            "and d lies in the commutator subgroup"
        )
    else:
        raise ValueError(f"unknown hypothesis kind {kind!r}")

    def body():
        word = parse_word(expr, k) if expr else Word.identity(k)
        if kind == "type2":
            rep = check_hypothesis_type2(k, word)
            payload = {
                "gamma": format_word(rep.gamma),
                "relator": format_word(rep.relator),
                "relator_length": rep.relator_length,
                "base_length": rep.base_length,
                "cyclically_reduced": rep.relator_cyclically_reduced,
            }
        else:
            rep = check_hypothesis_type3(k, word)
            payload = {
                "delta": format_word(rep.delta),
                "commutator_word": format_word(rep.commutator_word),
                "relator": format_word(rep.relator),
                "length": rep.length,
                "base_length": rep.base_length,
                "cyclically_reduced": rep.cyclically_reduced,
                "delta_in_commutator_subgroup": rep.delta_in_commutator_subgroup,
            }
        return ("pass" if rep.passed else "fail"), payload

    return _timed("hypothesis", anchor, {"kind": kind, "k": k, "expr": expr}, body)


def check_closure_eq(
    k: int, c: int, expr1: str, expr2: str, timeout: float | None = None
) -> CheckReport:
    def body():
        deadline = Deadline(timeout)
        r1 = parse_word(expr1, k)
        r2 = parse_word(expr2, k)
        n1 = normal_closure(r1, k, c, deadline)
        n2 = normal_closure(r2, k, c, deadline)
        m12 = bool(member(r1, n2))
        m21 = bool(member(r2, n1))
        equal = m12 and m21
        return ("pass" if equal else "fail"), {
            "equal": equal,
            "r1_in_closure_of_r2": m12,
            "r2_in_closure_of_r1": m21,
            "layer_ranks_r1": n1.layer_ranks(),
            "layer_ranks_r2": n2.layer_ranks(),
        }

    return _timed(
        "closure-eq",
        f"the two relators generate the same normal closure in the class-{c} quotient",
        {"k": k, "class": c, "r1": expr1, "r2": expr2},
        body,
    )


def _layer_rows(inv):
    return [
        {
            "degree": layer.degree,
            "free_rank": layer.free_rank,
            "torsion": list(layer.torsion),
            "witt": layer.witt,
        }
        for layer in inv.layers
    ]


def check_ranks(
    k: int,
    c: int,
    expr: str,
    expect_torsion_free: bool = False,
    timeout: float | None = None,
) -> CheckReport:
    def body():
        deadline = Deadline(timeout)
        r = parse_word(expr, k)
        inv = lcs_rank_table(r, k, c, deadline)
        payload = {
            "layers": _layer_rows(inv),
            "torsion_free": inv.torsion_free,
        }
        if not expect_torsion_free:
            return "recorded", payload  # a measurement, nothing asserted
        return ("pass" if inv.torsion_free else "fail"), payload

    return _timed(
        "ranks",
        "lower-central layer ranks and torsion of the one-relator quotient, "
        "against the free-group baseline",
        {"k": k, "class": c, "relator": expr},
        body,
    )


def check_parasurface(k: int, c: int, delta_expr: str, timeout: float | None = None) -> CheckReport:
    def body():
        deadline = Deadline(timeout)
        if k % 2 or k <= 2:
            raise ValueError(f"rank must be even and greater than 2, got {k}")
        delta = parse_word(delta_expr, k)
        hyp = check_hypothesis_type3(k, delta)
        payload = {
            "hypothesis_passed": hyp.passed,
            "relator": format_word(hyp.relator),
        }
        if not hyp.passed:
            payload["hypothesis"] = {
                "cyclically_reduced": hyp.cyclically_reduced,
                "length": hyp.length,
                "delta_in_commutator_subgroup": hyp.delta_in_commutator_subgroup,
            }
            return "fail", payload
        images = [Word.generator(1, k) * delta]
        images += [Word.generator(i, k) for i in range(2, k + 1)]
        psi = Endomorphism(images)
        report = parasurface_certificate(hyp.relator, psi, k // 2, c, deadline)
        payload.update(
            {
                "unimodular": report.unimodular,
                "abelianization_matrix": report.ab_matrix,
                "closure_equal": report.closure_equal,
                "layers_match": report.layers_match,
                "torsion_free": report.torsion_free,
                "layers": _layer_rows(report.layers_relator),
                "verified_classes": f"2..{c}",
            }
        )
        ok = report.passed and report.torsion_free
        return ("pass" if ok else "fail"), payload

    return _timed(
        "parasurface",
        f"the one-relator quotient shares the surface group's lower-central "
        f"quotients through class {c}, certified by an explicit endomorphism",
        {"k": k, "class": c, "delta": delta_expr},
        body,
    )


def check_conjugacy(
    k: int,
    c_min: int,
    c_max: int,
    expr_x: str,
    expr_y: str,
    expect: str | None = None,
    timeout: float | None = None,
) -> CheckReport:
    def body():
        deadline = Deadline(timeout)
        x = parse_word(expr_x, k)
        y = parse_word(expr_y, k)
        rows = conjugacy_scan(x, y, k, c_min, c_max, deadline)
        row_payload = []
        for row in rows:
            entry = {
                "class": row.c,
                "verdict": row.verdict.kind,
                "closure_equal": row.closure_equal,
                "duration_ms": round(row.duration_ms, 3),
            }
            if row.verdict.witness is not None:
                entry["witness"] = format_word(row.verdict.witness)
            if row.verdict.obstructed_layer is not None:
                entry["obstructed_layer"] = row.verdict.obstructed_layer
            row_payload.append(entry)
        payload = {"rows": row_payload, "expect": expect}
        if expect is None:
            return "recorded", payload
        wanted = {
            "equal": lambda v: v.kind == "equal",
            "conjugate": lambda v: v.is_conjugate,
            "not-conjugate": lambda v: v.kind == "not_conjugate",
        }[expect]
        ok = all(wanted(row.verdict) for row in rows)
        return ("pass" if ok else "fail"), payload

    return _timed(
        "conjugacy",
        "per-class conjugacy verdicts for the pair, with closure equality alongside",
        {"k": k, "classes": f"{c_min}..{c_max}", "x": expr_x, "y": expr_y},
        body,
    )


# --- the aggregated verification suite ----------------------------------------


def suite_specs(c: int) -> list[tuple]:
    """The canonical scenario list at class ``c``: (function name, kwargs)."""
    w_expr = "w"
    twisted = "w*[w,a2*w*A2]"
    specs: list[tuple] = [
        ("check_witt", {"k": 4, "max_degree": min(c + 1, 7)}),
        ("check_hypothesis", {"kind": "type2", "k": 4, "expr": "a2"}),
        ("check_hypothesis", {"kind": "type3", "k": 4, "expr": "[[a1,a2],a1]"}),
        ("check_closure_eq", {"k": 4, "c": c, "expr1": w_expr, "expr2": twisted}),
        ("check_ranks", {"k": 4, "c": c, "expr": w_expr, "expect_torsion_free": True}),
        ("check_parasurface", {"k": 4, "c": c, "delta_expr": "[[a1,a2],a1]"}),
        (
            "check_conjugacy",
            {
                "k": 4,
                "c_min": 2,
                "c_max": min(c, 5),
                "expr_x": w_expr,
                "expr_y": twisted,
                "expect": "equal",
            },
        ),
    ]
    if c >= 6:
        specs.append(
            (
                "check_conjugacy",
                {"k": 4, "c_min": 6, "c_max": c, "expr_x": w_expr, "expr_y": twisted},
            )
        )
    return specs


def run_spec(spec: tuple, timeout: float | None = None) -> CheckReport:
    name, kwargs = spec
    fn = globals()[name]
    return fn(timeout=timeout, **kwargs)

"""Rendering of harness results: line records, JSON, and figures."""
from __future__ import annotations

import json
from collections import Counter
from typing import Iterable, TextIO

from .harness import (
    AGREE, DISAGREE, INCONCLUSIVE, BacktransRecord, CaseRecord, EquivVerdict,
    Observation, TestReport,
)
from .printer import show
from .syntax import size


def _obs(o: Observation) -> str:
    return str(o)


def record_line(r: CaseRecord) -> str:
    line = (f"case={r.case_id} ctx={json.dumps(show(r.ctx))} obs1={_obs(r.obs1)} "
            f"obs2={_obs(r.obs2)} verdict={r.verdict}")
    if r.by_value:
        line += f" cmp=value:{show(r.obs1.value)},{show(r.obs2.value)}"
    return line


def summary_line(report: TestReport, verdict: EquivVerdict) -> str:
    c = report.counts
    return (f"summary total={report.total} agree={c[AGREE]} disagree={c[DISAGREE]} "
            f"inconclusive={c[INCONCLUSIVE]} verdict={verdict.tag}")


def write_text(report: TestReport, verdict: EquivVerdict, out: TextIO) -> None:
    out.write(f"# {report.title} {report.config}\n")
    for r in sorted(report.records, key=lambda r: r.case_id):
        out.write(record_line(r) + "\n")
    out.write(summary_line(report, verdict) + "\n")
    if verdict.tag == DISAGREE:
        out.write(witness_line(verdict) + "\n")


def witness_line(verdict: EquivVerdict) -> str:
    return f"witness ctx={json.dumps(show(verdict.witness))} obs1={verdict.obs1} obs2={verdict.obs2}"


def _obs_json(o: Observation | None):
    if o is None:
        return None
    out = {"tag": o.tag, "steps": o.steps}
    if o.value is not None:
        out["value"] = show(o.value)
    return out


def to_json(report: TestReport, verdict: EquivVerdict) -> dict:
    return {
        "title": report.title,
        "config": report.config,
        "records": [
            {"case": r.case_id, "ctx": show(r.ctx), "obs1": _obs_json(r.obs1),
             "obs2": _obs_json(r.obs2), "verdict": r.verdict, "by_value": r.by_value}
            for r in sorted(report.records, key=lambda r: r.case_id)
        ],
        "summary": {"total": report.total, **report.counts},
        "verdict": {
            "tag": verdict.tag,
            "witness": None if verdict.witness is None else show(verdict.witness),
            "obs1": _obs_json(verdict.obs1),
            "obs2": _obs_json(verdict.obs2),
            "timeouts": verdict.timeouts,
        },
    }


def write_json(report: TestReport, verdict: EquivVerdict, out: TextIO) -> None:
    json.dump(to_json(report, verdict), out, indent=1, sort_keys=True)
    out.write("\n")


def backtrans_lines(records: Iterable[BacktransRecord]) -> list[str]:
    lines = []
    for r in records:
        depths = ",".join(f"{n}:{o}" for n, o in r.depths)
        lines.append(f"case={r.case_id} ctx={json.dumps(show(r.ctx))} term={json.dumps(show(r.term))} "
                     f"target={r.target} precise={r.precise} imprecise={r.imprecise} depths={depths}")
    return lines


def backtrans_summary(records: list[BacktransRecord]) -> str:
    p = Counter(r.precise for r in records)
    i = Counter(r.imprecise for r in records)
    return (f"summary total={len(records)} precise_pass={p['pass']} precise_fail={p['fail']} "
            f"precise_inconclusive={p['inconclusive']} precise_vacuous={p['vacuous']} "
            f"imprecise_pass={i['pass']} imprecise_fail={i['fail']} "
            f"imprecise_inconclusive={i['inconclusive']}")


# --------------------------------------------------------------------------
# Figures
# --------------------------------------------------------------------------


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


_COLOURS = {AGREE: "tab:green", DISAGREE: "tab:red", INCONCLUSIVE: "tab:grey"}


def equiv_figure(report: TestReport, path: str) -> None:
    """Verdicts by context size, and steps of the two sides against each other."""
    plt = _pyplot()
    by_size: dict[int, Counter] = {}
    for r in report.records:
        by_size.setdefault(size(r.ctx), Counter())[r.verdict] += 1
    sizes = sorted(by_size)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.2))
    bottom = [0] * len(sizes)
    for tag in (AGREE, DISAGREE, INCONCLUSIVE):
        vals = [by_size[s][tag] for s in sizes]
        ax1.bar(sizes, vals, bottom=bottom, color=_COLOURS[tag], label=tag)
        bottom = [b + v for b, v in zip(bottom, vals)]
    ax1.set_yscale("log")
    ax1.set_xlabel("context size (nodes)")
    ax1.set_ylabel("contexts")
    ax1.set_title(f"{report.title}: verdicts by context size")
    ax1.legend()
    for tag in (AGREE, DISAGREE, INCONCLUSIVE):
        pts = [(r.obs1.steps, r.obs2.steps) for r in report.records if r.verdict == tag]
        if pts:
            xs, ys = zip(*pts)
            ax2.scatter(xs, ys, s=6, alpha=0.5, color=_COLOURS[tag], label=tag)
    ax2.set_xscale("symlog")
    ax2.set_yscale("symlog")
    ax2.set_xlabel("steps, left term")
    ax2.set_ylabel("steps, right term")
    ax2.set_title("steps per context")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def backtrans_figure(records: list[BacktransRecord], path: str) -> None:
    """Target steps against steps of the back-translation at the precise depth."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    pts = [(r.target.steps, r.precise_obs.steps, r.precise) for r in records if r.precise_obs]
    for tag, colour in (("pass", "tab:green"), ("fail", "tab:red"), ("inconclusive", "tab:grey")):
        sel = [(x, y) for x, y, p in pts if p == tag]
        if sel:
            xs, ys = zip(*sel)
            ax.scatter(xs, ys, s=10, color=colour, label=tag)
    ax.set_xscale("symlog")
    ax.set_yscale("symlog")
    ax.set_xlabel("target steps k")
    ax.set_ylabel("source steps at depth k+1")
    ax.set_title("back-translation, precise direction")
    if pts:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)

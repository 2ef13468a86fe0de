"""Experiments on the two open conjectures. A failed trial is a finding to
report, never an assertion error."""

from __future__ import annotations

from dataclasses import dataclass, field

from .flag import cd_index
from .lefschetz import (AssumptionFailed, ExhaustedRetries, SamplerConfig, lefschetz_recursion,
                        multiplication_sampler, rng_for, root_node)
from .poset import GradedPoset, incidence_orientation, to_json as poset_json
from .sheaves import pushforward
from .torus import PreconditionViolated, random_constant_instance, torus_transverse_witness

LAB_MODES = ("multiplication", "constant")


@dataclass
class LabReport:
    mode: str
    trials: int
    rows: list[dict] = field(default_factory=list)
    cd_index: str | None = None
    counterexample: dict | None = None

    @property
    def successes(self) -> int:
        return sum(1 for r in self.rows if r["ok"])

    @property
    def all_failed(self) -> bool:
        return self.trials > 0 and self.successes == 0

    def to_json(self) -> dict:
        if self.trials == 0:
            return {"trials": 0}
        out = {"mode": self.mode, "trials": self.trials, "successes": self.successes,
               "failures": self.trials - self.successes, "table": self.rows}
        if self.cd_index is not None:
            out["expected_cd_index"] = self.cd_index
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


def trial_seed(seed: int, k: int) -> int:
    return int.from_bytes(rng_for(seed, "lab", k).getrandbits(63).to_bytes(8, "big"), "big")


def conjecture_lab(p: GradedPoset, trials: int, mode: str = "multiplication", seed: int = 0,
                   entry_bound: int = 10**4) -> LabReport:
    """Multiplication mode: one recursion per trial in which every operator is
    multiplication by a random section, with a single sample (no retries).
    Constant mode: random instances whose isotropic subspace maps onto every
    block, tested with one constant per block."""
    if mode not in LAB_MODES:
        raise ValueError(f"unknown lab mode {mode!r}")
    report = LabReport(mode, trials)
    if trials == 0:
        return report
    if mode == "multiplication":
        orient = incidence_orientation(p)
        push = pushforward(p)
        root = root_node(push.root, orient)
        sampler = multiplication_sampler(push.root, entry_bound)
        expected = cd_index(p)
        report.cd_index = str(expected)
        cfg = SamplerConfig("multiplication", retries=1, entry_bound=entry_bound)
        for k in range(trials):
            s = trial_seed(seed, k)
            row = {"trial": k, "seed": s}
            try:
                cd, _ = lefschetz_recursion(root, cfg, s, sampler)
                row.update(ok=cd == expected, cd_index=str(cd))
            except ExhaustedRetries as exc:
                row.update(ok=False, failure=exc.failures[-1] if exc.failures else str(exc),
                           kind=_kind(exc.failures))
            report.rows.append(row)
    else:
        for k in range(trials):
            s = trial_seed(seed, k)
            rng = rng_for(s, "constant", 0)
            inst = random_constant_instance(rng)
            row = {"trial": k, "seed": s, "dims": inst.dims, "dim_K": inst.K.ncols()}
            try:
                w = torus_transverse_witness(inst, rng, "per-block-constant", retries=1)
            except PreconditionViolated as exc:
                row.update(ok=False, failure=str(exc))
            else:
                row.update(ok=w is not None, constants=w.t if w else None)
            report.rows.append(row)
    if report.all_failed:
        report.counterexample = {
            "poset": poset_json(p),
            "mode": mode,
            "seeds": [r["seed"] for r in report.rows],
            "diagnostics": [r.get("failure", "") for r in report.rows],
        }
    return report


def _kind(failures: list[str]) -> str:
    if not failures:
        return "unknown"
    return failures[-1].split(":", 1)[0]


__all__ = ["AssumptionFailed", "LabReport", "conjecture_lab", "LAB_MODES"]

from __future__ import annotations

import functools
import os
import sys
from dataclasses import dataclass

from cdfan.poset import GradedPoset, OrientationData, build_named, incidence_orientation
from cdfan.sheaves import Pushforward, pushforward

sys.path.insert(0, os.path.dirname(__file__))

# acceptance lines collected while the suite runs, echoed in the summary
ACCEPTANCE: dict[int, str] = {}


@dataclass
class Fan:
    poset: GradedPoset
    orient: OrientationData
    push: Pushforward


@functools.lru_cache(maxsize=None)
def fan(name: str) -> Fan:
    family, size = name.split(":")
    p = build_named(family, int(size))
    return Fan(p, incidence_orientation(p), pushforward(p))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])

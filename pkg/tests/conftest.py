import random
import sys

from hypothesis import HealthCheck, settings, strategies as st

from zipperlogic.generators import planted, random_graph
from zipperlogic.moves import MoveKind
from zipperlogic.terms import ATOMS, App

settings.register_profile(
    "default", max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)
graphs = seeds.map(lambda s: random_graph(random.Random(s)))
move_kinds = st.sampled_from(list(MoveKind))


@st.composite
def planted_graphs(draw, kinds=move_kinds):
    kind = draw(kinds)
    return kind, planted(random.Random(draw(seeds)), kind)


terms = st.recursive(
    st.sampled_from(list(ATOMS.values())),
    lambda inner: st.builds(App, inner, inner),
    max_leaves=12,
)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.REPORT, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)

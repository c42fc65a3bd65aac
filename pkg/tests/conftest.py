from importlib import resources

import pytest

from ssrscreen.model import BranchKey, make_contingency, parse_network

DATA = resources.files("ssrscreen") / "data"

ST1_LINE = BranchKey("ST1", "BB2", "1")
BB3_LINE = BranchKey("BB3", "SC3", "1")


def load(name):
    return parse_network((DATA / name).read_text())


@pytest.fixture(scope="session")
def before():
    return load("study_before.json")


@pytest.fixture(scope="session")
def after():
    return load("study_after.json")


@pytest.fixture(scope="session")
def rlc():
    return load("rlc_test.json")


def ctg(label, *outages):
    return make_contingency(label, [tuple(o.split("/")[0].split("-")) + (o.split("/")[1],) for o in outages])


def outage_set(c):
    return frozenset(o.canonical() for o in c.outages)


def build_comparison(before, after, band=None):
    import json

    from ssrscreen.cli import run_scan, run_screen, scan_request, screening_requests
    from ssrscreen.report import ExpansionComparison, match_conditions, pair_damping

    doc = json.loads((DATA / "compare_request.json").read_text())
    requests = screening_requests(doc["screening"])
    srq = scan_request(doc["scan"])
    comp = ExpansionComparison()
    for gb, ga in zip(run_screen(before, requests), run_screen(after, requests)):
        comp.conditions_before.extend(gb)
        comp.conditions_after.extend(ga)
        comp.matched.extend(match_conditions(gb, ga))
    comp.scans_before = run_scan(before, srq, band)
    comp.scans_after = run_scan(after, srq, band, after=True)
    comp.damping = pair_damping(comp.scans_before, comp.scans_after)
    return comp


@pytest.fixture(scope="session")
def comparison(before, after):
    return build_comparison(before, after)

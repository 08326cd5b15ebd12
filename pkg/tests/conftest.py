"""Shared fixtures and the acceptance-criteria summary report."""

import numpy as np
import pytest

# nodeid -> one-line verdict, collected while test_acceptance.py runs
_criterion_lines = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    parts = name.split("_")  # test_criterion_<k>_<description words>
    number, label = parts[2], " ".join(parts[3:])
    verdict = "PASS" if report.passed else "FAIL"
    _criterion_lines[report.nodeid] = f"CRITERION {number}: {verdict} - {label}"


def pytest_terminal_summary(terminalreporter):
    if not _criterion_lines:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_criterion_lines):
        terminalreporter.write_line(_criterion_lines[nodeid])


@pytest.fixture(scope="session")
def polyline_hausdorff():
    """Hausdorff distance between two polylines (curves, not vertex sets).

    Each polyline is densified along its segments and measured against the
    other polyline's segments, so the distance reflects the drawn curves
    rather than where the vertices happen to sit.
    """

    def dense(points):
        chunks = [points]
        frac = np.linspace(0.0, 1.0, 33)[1:-1, None]
        for a, b in zip(points[:-1], points[1:]):
            chunks.append(a + frac * (b - a))
        return np.vstack(chunks)

    def one_sided(sample, polyline):
        a, b = polyline[:-1], polyline[1:]
        ab = b - a
        denom = np.maximum(np.einsum("sd,sd->s", ab, ab), 1e-300)
        ap = sample[:, None, :] - a[None, :, :]
        t = np.clip(np.einsum("psd,sd->ps", ap, ab) / denom, 0.0, 1.0)
        closest = a[None, :, :] + t[..., None] * ab[None, :, :]
        dist = np.linalg.norm(sample[:, None, :] - closest, axis=2)
        return float(dist.min(axis=1).max())

    def hausdorff(points_a, points_b):
        points_a = np.asarray(points_a, dtype=float)
        points_b = np.asarray(points_b, dtype=float)
        if len(points_a) < 2 or len(points_b) < 2:
            raise ValueError("polylines need at least two points")
        return max(one_sided(dense(points_a), points_b),
                   one_sided(dense(points_b), points_a))

    return hausdorff

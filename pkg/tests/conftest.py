import numpy as np
import pytest

from maskshapes.raster import BinaryMask, label_components, trace_contours

# Collected by test_acceptance and replayed at the end of the run so the
# per-criterion verdicts are visible even with output capture on.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def mask_of(array) -> BinaryMask:
    arr = np.asarray(array, dtype=bool)
    return BinaryMask(width=arr.shape[1], height=arr.shape[0], pixels=arr, source_name="fixture")


def trace_largest(array):
    """Outer contour of the (single) region in a fixture array."""
    contours = trace_contours(label_components(mask_of(array)))
    outers = [c for c in contours if not c.is_hole]
    assert len(outers) == 1, "fixture should contain exactly one region"
    return outers[0]


def disc_array(radius: int = 64, size: int = 200, center: int = 80) -> np.ndarray:
    yy, xx = np.mgrid[0:size, 0:size]
    return (xx - center) ** 2 + (yy - center) ** 2 <= radius * radius


def square_array() -> np.ndarray:
    arr = np.zeros((120, 120), dtype=bool)
    arr[5:105, 5:105] = True
    return arr


def rotated_rect_array(angle_deg: float = 30.0) -> np.ndarray:
    yy, xx = np.mgrid[0:180, 0:180]
    th = np.deg2rad(angle_deg)
    u = (xx - 90) * np.cos(th) + (yy - 90) * np.sin(th)
    v = -(xx - 90) * np.sin(th) + (yy - 90) * np.cos(th)
    return (np.abs(u) <= 50) & (np.abs(v) <= 25)


def ellipse_array(a: int = 80, b: int = 40) -> np.ndarray:
    yy, xx = np.mgrid[0:160, 0:160]
    return ((xx - 80) / a) ** 2 + ((yy - 80) / b) ** 2 <= 1.0


def l_shape_array() -> np.ndarray:
    # 100x100 square with a 50x50 bite centered on the top edge: the hull is
    # the full square, so the analytic solidity is exactly 3/4.
    arr = np.zeros((130, 130), dtype=bool)
    arr[10:110, 10:110] = True
    arr[10:60, 35:85] = False
    return arr


def staircase_array(n_steps: int = 30, step: int = 8, thickness: int = 24) -> np.ndarray:
    side = n_steps * step + thickness + 20
    arr = np.zeros((side, side), dtype=bool)
    for i in range(n_steps):
        x0 = 10 + i * step
        arr[x0 : x0 + step + thickness, x0 : x0 + step + thickness] = True
    return arr


def random_blob_array(rng: np.random.Generator, size: int = 160) -> np.ndarray:
    """Union of a few random discs: connected, irregular, never degenerate."""
    arr = np.zeros((size, size), dtype=bool)
    yy, xx = np.mgrid[0:size, 0:size]
    cx, cy = rng.integers(55, size - 55, size=2)
    arr |= (xx - cx) ** 2 + (yy - cy) ** 2 <= rng.integers(18, 28) ** 2
    for _ in range(int(rng.integers(3, 7))):
        # offsets stay below the minimum radius sum so the union is connected
        dx, dy = rng.integers(-14, 15, size=2)
        r = int(rng.integers(8, 20))
        arr |= (xx - cx - dx) ** 2 + (yy - cy - dy) ** 2 <= r * r
    return arr


@pytest.fixture(scope="session")
def disc_contour():
    return trace_largest(disc_array())


@pytest.fixture(scope="session")
def disc32_contour():
    return trace_largest(disc_array(radius=32))


@pytest.fixture(scope="session")
def square_contour():
    return trace_largest(square_array())


@pytest.fixture(scope="session")
def rot_rect_contour():
    return trace_largest(rotated_rect_array())


@pytest.fixture(scope="session")
def ellipse_contour():
    return trace_largest(ellipse_array())


@pytest.fixture(scope="session")
def l_shape_contour():
    return trace_largest(l_shape_array())


@pytest.fixture(scope="session")
def staircase_contour():
    return trace_largest(staircase_array())


@pytest.fixture(scope="session")
def blob_contours():
    """Twenty fixed random blobs for the approximation contract checks."""
    rng = np.random.default_rng(20240811)
    return [trace_largest(random_blob_array(rng)) for _ in range(20)]

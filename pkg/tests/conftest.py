import os


def pytest_sessionstart(session):
    # Fixed disorder seed unless the caller already chose one
    os.environ.setdefault("WAVEGUIDE_CAVITY_SEED", "12345")

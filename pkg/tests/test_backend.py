import os
import subprocess
import sys


def _backend_with(env_value):
    env = dict(os.environ)
    if env_value is None:
        env.pop("BANDMASS_PURE", None)
    else:
        env["BANDMASS_PURE"] = env_value
    out = subprocess.run(
        [sys.executable, "-c", "from bandmass._backend import BACKEND; print(BACKEND)"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    return out.stdout.strip()


def test_pure_flag_forces_fallback():
    assert _backend_with("1") == "python"


def test_default_prefers_compiled_when_built():
    try:
        import bandmass._assemble  # noqa: F401

        built = True
    except ImportError:
        built = False
    assert _backend_with(None) == ("cython" if built else "python")
    assert _backend_with("0") == _backend_with(None)

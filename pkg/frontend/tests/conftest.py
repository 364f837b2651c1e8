import subprocess
import sys

import pytest

CONFIG = """
[study.simulate]
d = 1
p = 3.0
h_chain = [0.1]
T = 1.0
dt = 0.01
obs_interval = 0.25

[study.convergence]
d = 1
p = 3.0
s = 1.0
h_chain = [0.2, 0.1]
T = 0.25
t_grid = [0.25]

[study.growth]
d = 1
p = 3.0
h_chain = [0.2]
T = 4.0
k = 2

[study.decay]
models = ["schrodinger"]

[study.conjecture]
d = 2
h_chain = [1.0]
tau_grid = [10.0, 13.0, 17.0, 22.0, 28.0, 35.0, 45.0, 58.0]
"""


@pytest.fixture(scope="session")
def run_outputs(tmp_path_factory):
    """Real result tables produced through the simulator's CLI."""
    base = tmp_path_factory.mktemp("runs")
    conf = base / "all.toml"
    conf.write_text(CONFIG)
    for sub in ("simulate", "converge", "growth", "decay", "conjecture"):
        out = base / sub
        proc = subprocess.run(
            ["latticekg", sub, "--config", str(conf), "--out", str(out)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, f"{sub} failed: {proc.stderr}"
    return {
        "energy": base / "simulate" / "energy.csv",
        "convergence": base / "converge" / "convergence.csv",
        "growth": base / "growth" / "growth.csv",
        "decay": base / "decay" / "decay.csv",
        "conjecture": base / "conjecture" / "conjecture.csv",
    }

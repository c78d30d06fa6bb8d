"""
Batch workflow from the command line
====================================

Writes a small config into a scratch directory, then calls the three
subcommands in turn: run, verify (geometry and bootstrap groups) and
report. Equivalent shell commands::

    combfol run demo.cfg
    combfol verify demo.cfg
    combfol report out
"""
import subprocess
import sys
import tempfile
from pathlib import Path

CONFIG = """\
[model]
epsilon = 0.001
[grid]
dx = 0.02
cfl = 0.5
[domain]
halfwidth = auto
[slices]
s_list = 2, 2.4, 2.8, 3.2, 3.6, 4
[snapshot]
times = 3, 6
[verify]
checks = geometry, bootstrap
[output]
dir = out
"""

with tempfile.TemporaryDirectory() as tmp:
    cfg = Path(tmp) / "demo.cfg"
    cfg.write_text(CONFIG)
    for args in (["run", str(cfg)], ["verify", str(cfg)], ["report", str(Path(tmp) / "out")]):
        print(f"$ combfol {' '.join(a if not a.startswith(tmp) else Path(a).name for a in args)}")
        proc = subprocess.run([sys.executable, "-m", "combfol", *args], capture_output=True, text=True)
        print(proc.stdout.rstrip())
        if proc.returncode:
            print(proc.stderr.rstrip())
        print(f"(exit {proc.returncode})\n")
    print("artifacts:", sorted(p.relative_to(tmp).as_posix() for p in (Path(tmp) / "out").rglob("*")))

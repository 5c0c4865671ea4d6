import importlib.util
import json
from pathlib import Path


def test_benchmark_runs(capsys):
    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    mod.main(["--repeat", "1", "--json"])
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 5 and all(r["python_s"] > 0 for r in rows)

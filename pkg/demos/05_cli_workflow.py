"""End-to-end command-line workflow in a temporary directory:

generate a dataset, fit and forecast from it, then run a backtest, using
the same entry point the installed ``bht-arima`` script calls.
"""

import pathlib
import sys
import tempfile

from bht_arima.cli import main

with tempfile.TemporaryDirectory() as tmp:
    root = pathlib.Path(tmp)
    data = str(root / "panel.csv")

    print("$ bht-arima synth --kind sinusoid-mixture --n-series 12 "
          "--length 40 --noise 0.05 --seed 7 --out panel.csv")
    code = main(["synth", "--kind", "sinusoid-mixture", "--n-series", "12",
                 "--length", "40", "--noise", "0.05", "--seed", "7",
                 "--out", data])
    assert code == 0

    print("\n$ bht-arima fit-forecast panel.csv --horizon 3 --ranks 12,3")
    code = main(["fit-forecast", data, "--horizon", "3", "--ranks", "12,3",
                 "--forecast-out", str(root / "forecast.csv"),
                 "--summary-out", str(root / "summary.txt")])
    assert code == 0

    print("\nmodel summary:")
    print((root / "summary.txt").read_text())

    print("$ bht-arima backtest panel.csv --train-fraction 0.9 --ranks 12,3")
    code = main(["backtest", data, "--train-fraction", "0.9",
                 "--ranks", "12,3", "--report-out", str(root / "report.txt")])
    assert code == 0

    print("\nbacktest report:")
    print((root / "report.txt").read_text())

    print("exit codes: 0 success, 1 usage error, 2 numerical failure")
    bad = main(["fit-forecast", data, "--tau", "99"])
    print(f"deliberately invalid tau exits with {bad}", file=sys.stderr)

"""
Driving the command line from Python
====================================

The ``gcmodel`` console script wraps the same calls. Here it is invoked
in-process to write a chromatogram, snapshots and a calibration table.
"""
from gcmodel import cli, data_path

cfg = data_path()
print("exit", cli.main(["convert", "--ppb", "20", "--T", "353.15", "--p", "4.01e5"]))
print("exit", cli.main(["calibrate", "--config", cfg, "--out", "demo_output"]))
print("exit", cli.main(["simulate", "--config", cfg, "--regime", "variable",
                        "--times", "5,108,290,470", "--out", "demo_output"]))
# a usage error exits with 1 and explains itself on stderr as JSON
print("exit", cli.main(["simulate"]))

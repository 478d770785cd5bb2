"""Run the whole pipeline on a scenario directory.

Usage:
    python demos/06_full_pipeline_on_scenario.py <scenario-dir> [output-dir]

The directory must follow the algorithm-selection layout: a
``description.txt`` plus an ``algorithm_runs.arff``. Equivalent to calling
the ``airt`` command line tool with each subcommand in turn.
"""

import sys

from airt.cli import main

if len(sys.argv) < 2:
    sys.exit(__doc__)

scenario = sys.argv[1]
output = sys.argv[2] if len(sys.argv) > 2 else "airt_output"

for step in (
    ["fit"],
    ["metrics"],
    ["strengths", "--epsilon", "0", "0.01", "0.05"],
    ["goodness"],
    ["compare", "--folds", "10", "--seed", "0"],
):
    argv = step + ["--input", scenario, "--output", output]
    print("airt " + " ".join(argv))
    code = main(argv)
    if code != 0:
        sys.exit(code)
print(f"all artifacts in {output}/, see manifest.json for the inventory")

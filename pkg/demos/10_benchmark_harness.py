"""The benchmark harness and its CSV contract.

A strict-schema JSON configuration names (system, model, acquisition)
cells; the harness runs every cell over seeded trials and writes a
long-format trace CSV plus a per-iteration summary CSV.  Reruns are
byte-identical, and serial and threaded execution produce the same
bytes.  The same run is available from the shell:

    versabo run --config config.json --out results/ [--serial] [--trials K]
    versabo list-models
    versabo list-systems
"""

import json
from pathlib import Path

from versabo.bench import (
    default_basin_config,
    default_contaminated_config,
    default_mf_config,
    default_state_config,
    parse_config,
    run_benchmark,
)

out = Path("demo_output")
out.mkdir(exist_ok=True)

# the four shipped study grids, written out for use with the CLI
for name, doc in (("contaminated", default_contaminated_config()),
                  ("multifidelity", default_mf_config()),
                  ("state", default_state_config()),
                  ("basin", default_basin_config())):
    path = out / f"config_{name}.json"
    path.write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {path} ({len(doc['cells'])} cells x {doc['trials']} trials)")

# run a shrunken grid right here so the demo finishes quickly
doc = default_mf_config(trials=2)
for cell in doc["cells"]:
    cell["N"] = 6
config = parse_config(doc)
paths = run_benchmark(config, out / "mini_mf", serial=True)

print(f"\ntrace rows ({paths['trace']}):")
lines = paths["trace"].read_text().splitlines()
for line in lines[:4]:
    print(" ", line)
print(f"  ... {len(lines) - 1} data rows total")

print(f"\nsummary rows ({paths['summary']}):")
for line in paths["summary"].read_text().splitlines()[:4]:
    print(" ", line)

again = run_benchmark(config, out / "mini_mf_again", serial=False)
print("\nrerun (threaded) byte-identical:",
      paths["trace"].read_bytes() == again["trace"].read_bytes())
